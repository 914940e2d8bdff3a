use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::IndexedHierarchy;
use crate::pixel::{save_gray16, LabelMap};

/// Contour strength on the doubled inter-pixel grid.
///
/// The grid is `(2w+1) × (2h+1)`. Pixel `(x, y)` sits at `(2x+1, 2y+1)` and
/// is always 0; the cell between two 4-adjacent pixels carries the altitude
/// at which their fine regions merge (0 inside a region); a corner carries
/// the maximum of its adjacent edge cells; the outer frame is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Cells whose saliency is strictly above `lambda`.
    pub fn superlevel(&self, lambda: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v > lambda).collect()
    }

    /// Writes a 16-bit PNG scaled so the maximum maps to 65535, plus a
    /// sidecar `<stem>.scale.txt` holding the factor. Returns the factor.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<f64> {
        let path = path.as_ref();
        let max = self.max();
        let scale = if max > 0.0 {
            u16::MAX as f64 / max
        } else {
            1.0
        };
        let raw = self
            .values
            .iter()
            .map(|&v| (v * scale).round().clamp(0.0, u16::MAX as f64) as u16)
            .collect();
        save_gray16(self.width, self.height, raw, path)?;
        let sidecar = sidecar_path(path);
        let text = format!("scale {scale}\noffset 0\nmax {max}\n");
        fs::write(&sidecar, text).map_err(|e| Error::io(sidecar, e))?;
        Ok(scale)
    }
}

pub fn sidecar_path(png: &Path) -> PathBuf {
    png.with_extension("scale.txt")
}

pub fn render_saliency(h: &IndexedHierarchy, fine: &LabelMap) -> Result<SaliencyImage> {
    if fine.n_regions() != h.n_leaves() {
        return Err(Error::Dimension(format!(
            "label map has {} regions, hierarchy has {} leaves",
            fine.n_regions(),
            h.n_leaves()
        )));
    }
    let (w, ht) = (fine.width(), fine.height());
    let (gw, gh) = (2 * w + 1, 2 * ht + 1);
    let mut values = vec![0.0; gw * gh];
    let mut memo: HashMap<(u32, u32), f64> = HashMap::new();
    let mut level = |a: u32, b: u32| -> f64 {
        if a == b {
            return 0.0;
        }
        let key = (a.min(b), a.max(b));
        *memo
            .entry(key)
            .or_insert_with(|| h.merge_altitude(a as usize, b as usize))
    };
    for y in 0..ht {
        for x in 0..w {
            let l = fine.get(x, y);
            if x + 1 < w {
                values[(2 * y + 1) * gw + 2 * x + 2] = level(l, fine.get(x + 1, y));
            }
            if y + 1 < ht {
                values[(2 * y + 2) * gw + 2 * x + 1] = level(l, fine.get(x, y + 1));
            }
        }
    }
    for gy in (2..gh - 1).step_by(2) {
        for gx in (2..gw - 1).step_by(2) {
            let i = gy * gw + gx;
            values[i] = values[i - 1]
                .max(values[i + 1])
                .max(values[i - gw])
                .max(values[i + gw]);
        }
    }
    Ok(SaliencyImage {
        width: gw,
        height: gh,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_dendrogram, Edge, Mst};

    #[test]
    fn two_by_one_regions() {
        // Three fine regions in a row, merged at 2 then 5.
        let fine = LabelMap::new(3, 1, vec![0, 1, 2]).unwrap();
        let mst = Mst::from_tree(3, vec![Edge::new(0, 1, 2.0), Edge::new(1, 2, 5.0)]).unwrap();
        let h = build_dendrogram(&mst);
        let s = render_saliency(&h, &fine).unwrap();
        assert_eq!((s.width(), s.height()), (7, 3));
        assert_eq!(s.get(2, 1), 2.0);
        assert_eq!(s.get(4, 1), 5.0);
        assert_eq!(s.get(1, 1), 0.0);
        assert_eq!(s.get(2, 0), 0.0);
    }

    #[test]
    fn png_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let fine = LabelMap::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        let mst = Mst::from_tree(2, vec![Edge::new(0, 1, 0.5)]).unwrap();
        let s = render_saliency(&build_dendrogram(&mst), &fine).unwrap();
        let path = dir.path().join("s.png");
        let scale = s.save_png(&path).unwrap();
        assert_eq!(scale, 65535.0 / 0.5);
        let text = fs::read_to_string(sidecar_path(&path)).unwrap();
        assert!(text.starts_with("scale 131070"));
        let back = image::open(&path).unwrap().into_luma16();
        assert_eq!(back.get_pixel(2, 1).0[0], 65535);
        assert_eq!(back.get_pixel(2, 2).0[0], 65535);
        assert_eq!(back.get_pixel(1, 1).0[0], 0);
    }
}
