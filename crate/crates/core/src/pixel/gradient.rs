use super::erosion::StructuringElement;
use super::image::{Image, ScalarField};
use crate::error::{Error, Result};

/// Morphological gradient (dilation minus erosion) of the luminance by a
/// Euclidean disk. Pixels outside the image are ignored.
pub fn morphological_gradient(img: &Image, radius: u32) -> Result<ScalarField> {
    if radius == 0 {
        return Err(Error::InvalidParameter(
            "gradient radius must be at least 1".into(),
        ));
    }
    let (w, h) = (img.width(), img.height());
    let lum = img.luminance();
    let offsets = StructuringElement::Disk(radius).offsets();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let v = lum[ny as usize * w + nx as usize];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            out.push(hi - lo);
        }
    }
    ScalarField::new(w, h, out)
}
