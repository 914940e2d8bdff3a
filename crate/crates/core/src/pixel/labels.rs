use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Per-pixel region ids of a fine partition.
///
/// Ids are contiguous from zero and every region is 4-connected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    n_regions: usize,
}

impl LabelMap {
    /// Wraps labels that already satisfy the contiguity and connectivity rules.
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        let map = Self::normalize(width, height, &labels)?;
        if map.labels != labels {
            return Err(Error::InvalidParameter(
                "labels are not contiguous, raster-ordered, 4-connected regions".into(),
            ));
        }
        Ok(map)
    }

    /// Splits each label into its 4-connected components and renumbers them
    /// in raster order of first appearance.
    pub fn normalize(width: usize, height: usize, raw: &[u32]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "empty label map {width}x{height}"
            )));
        }
        if raw.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} labels, got {}",
                width * height,
                raw.len()
            )));
        }
        const UNSET: u32 = u32::MAX;
        let mut labels = vec![UNSET; raw.len()];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..raw.len() {
            if labels[start] != UNSET {
                continue;
            }
            let value = raw[start];
            labels[start] = next;
            queue.push_back(start);
            while let Some(p) = queue.pop_front() {
                for q in neighbors4(p, width, height) {
                    if labels[q] == UNSET && raw[q] == value {
                        labels[q] = next;
                        queue.push_back(q);
                    }
                }
            }
            next += 1;
        }
        Ok(Self {
            width,
            height,
            labels,
            n_regions: next as usize,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count of every region.
    pub fn areas(&self) -> Vec<u64> {
        let mut areas = vec![0u64; self.n_regions];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Bounding boxes `(x0, y0, x1, y1)`, inclusive, of every region.
    pub fn bounding_boxes(&self) -> Vec<[usize; 4]> {
        let mut boxes = vec![[usize::MAX, usize::MAX, 0, 0]; self.n_regions];
        for y in 0..self.height {
            for x in 0..self.width {
                let b = &mut boxes[self.labels[y * self.width + x] as usize];
                b[0] = b[0].min(x);
                b[1] = b[1].min(y);
                b[2] = b[2].max(x);
                b[3] = b[3].max(y);
            }
        }
        boxes
    }
}

/// Row-major 4-neighbors of pixel `p`, in the order up, left, right, down.
pub(crate) fn neighbors4(p: usize, width: usize, height: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (p % width, p / width);
    let up = (y > 0).then(|| p - width);
    let left = (x > 0).then(|| p - 1);
    let right = (x + 1 < width).then(|| p + 1);
    let down = (y + 1 < height).then(|| p + width);
    [up, left, right, down].into_iter().flatten()
}
