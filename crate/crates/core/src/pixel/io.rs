//! Image and label-map file I/O (PNG, PGM/PPM).

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use super::image::Image;
use super::labels::LabelMap;
use crate::error::{Error, Result};

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

fn is_sixteen_bit(img: &DynamicImage) -> bool {
    matches!(
        img,
        DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    )
}

/// Loads an 8- or 16-bit gray or color image; alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let gray = !img.color().has_color();
    let values: Vec<f64> = match (gray, is_sixteen_bit(&img)) {
        (true, false) => img
            .to_luma8()
            .into_raw()
            .iter()
            .map(|&v| v as f64 / 255.0)
            .collect(),
        (true, true) => img
            .to_luma16()
            .into_raw()
            .iter()
            .map(|&v| v as f64 / 65535.0)
            .collect(),
        (false, false) => img
            .to_rgb8()
            .into_raw()
            .iter()
            .map(|&v| v as f64 / 255.0)
            .collect(),
        (false, true) => img
            .to_rgb16()
            .into_raw()
            .iter()
            .map(|&v| v as f64 / 65535.0)
            .collect(),
    };
    Image::new(w, h, if gray { 1 } else { 3 }, values)
}

/// Reads a single-channel label image and normalizes it into a [`LabelMap`].
///
/// `expected` is the `(width, height)` of the companion image, if any.
pub fn import_labels(path: impl AsRef<Path>, expected: Option<(usize, usize)>) -> Result<LabelMap> {
    let path = path.as_ref();
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if let Some((ew, eh)) = expected {
        if (ew, eh) != (w, h) {
            return Err(Error::Dimension(format!(
                "{}: label map is {w}x{h}, image is {ew}x{eh}",
                path.display()
            )));
        }
    }
    if img.color().has_color() {
        return Err(Error::Format(format!(
            "{}: label maps must be single-channel",
            path.display()
        )));
    }
    let raw: Vec<u32> = img
        .to_luma16()
        .into_raw()
        .into_iter()
        .map(u32::from)
        .collect();
    LabelMap::normalize(w, h, &raw)
}

/// Writes `labels` as a 16-bit single-channel PNG.
pub fn save_labels(labels: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if labels.n_regions() > u16::MAX as usize + 1 {
        return Err(Error::Format(format!(
            "{} regions do not fit a 16-bit label image",
            labels.n_regions()
        )));
    }
    let raw: Vec<u16> = labels.labels().iter().map(|&l| l as u16).collect();
    save_gray16(labels.width(), labels.height(), raw, path)
}

pub(crate) fn save_gray16(width: usize, height: usize, raw: Vec<u16>, path: &Path) -> Result<()> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(width as u32, height as u32, raw)
            .ok_or_else(|| Error::Dimension("buffer size mismatch".into()))?;
    buf.save(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a gray image as an 8-bit PNG (values rounded from `[0, 1]`).
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = img
        .values()
        .iter()
        .map(|v| (v * 255.0).round() as u8)
        .collect();
    let color = if img.channels() == 1 {
        image::ExtendedColorType::L8
    } else {
        image::ExtendedColorType::Rgb8
    };
    image::save_buffer(path, &raw, img.width() as u32, img.height() as u32, color).map_err(
        |source| Error::Decode {
            path: path.to_path_buf(),
            source,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_roundtrip_and_normalization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.png");
        // Labels {3, 7}: left column 3, right column 7.
        let raw: Vec<u16> = vec![3, 7, 3, 7];
        save_gray16(2, 2, raw, &path).unwrap();
        let labels = import_labels(&path, Some((2, 2))).unwrap();
        assert_eq!(labels.labels(), &[0, 1, 0, 1]);
        assert!(matches!(
            import_labels(&path, Some((3, 2))),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn gray8_image_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.png");
        let img = Image::from_fn(3, 2, |x, y| ((x + 3 * y) as f64 * 40.0) / 255.0).unwrap();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn pgm_is_readable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        std::fs::write(&path, b"P2\n2 1\n255\n0 255\n").unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.values(), &[0.0, 1.0]);
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(load_image("/nonexistent/nope.png").is_err());
    }
}
