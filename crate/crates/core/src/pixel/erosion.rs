//! Structuring elements and exact binary erosion.
//!
//! Disks are eroded through an exact squared Euclidean distance transform,
//! segments through directional run lengths. Pixels outside the raster are
//! background, so an element poking out of the image never fits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::image::BinaryMask;
use crate::error::{Error, Result};

/// Structuring element with its origin at the element's center.
///
/// Segment origins sit at offset `length / 2` from the left (top) end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StructuringElement {
    /// `{(dx, dy) : dx² + dy² ≤ radius²}`.
    Disk(u32),
    /// Horizontal segment of `length` pixels.
    HSeg(u32),
    /// Vertical segment of `length` pixels.
    VSeg(u32),
}

impl StructuringElement {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StructuringElement::HSeg(0) | StructuringElement::VSeg(0) => Err(
                Error::InvalidParameter("segment length must be at least 1".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Offsets `(dx, dy)` covered by the element relative to its origin.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        match *self {
            StructuringElement::Disk(r) => {
                let r = r as isize;
                let mut out = Vec::new();
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx * dx + dy * dy <= r * r {
                            out.push((dx, dy));
                        }
                    }
                }
                out
            }
            StructuringElement::HSeg(n) => {
                let c = (n / 2) as isize;
                (0..n as isize).map(|i| (i - c, 0)).collect()
            }
            StructuringElement::VSeg(n) => {
                let c = (n / 2) as isize;
                (0..n as isize).map(|i| (0, i - c)).collect()
            }
        }
    }

    pub fn is_single_pixel(&self) -> bool {
        matches!(
            self,
            StructuringElement::Disk(0) | StructuringElement::HSeg(1) | StructuringElement::VSeg(1)
        )
    }
}

impl fmt::Display for StructuringElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuringElement::Disk(r) => write!(f, "disk:{r}"),
            StructuringElement::HSeg(n) => write!(f, "hseg:{n}"),
            StructuringElement::VSeg(n) => write!(f, "vseg:{n}"),
        }
    }
}

impl FromStr for StructuringElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::SpecSyntax {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (kind, size) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("expected `<disk|hseg|vseg>:<size>`"))?;
        let size: u32 = size
            .trim()
            .parse()
            .map_err(|_| bad("size is not an integer"))?;
        let se = match kind.trim() {
            "disk" => StructuringElement::Disk(size),
            "hseg" => StructuringElement::HSeg(size),
            "vseg" => StructuringElement::VSeg(size),
            _ => return Err(bad("unknown structuring element")),
        };
        se.validate()
            .map_err(|_| bad("segment length must be at least 1"))?;
        Ok(se)
    }
}

impl TryFrom<String> for StructuringElement {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StructuringElement> for String {
    fn from(se: StructuringElement) -> String {
        se.to_string()
    }
}

/// Erosion of `mask` by `se`: pixels where the centered element fits inside the mask.
pub fn erode(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    match se {
        StructuringElement::Disk(r) => erode_disk(mask, r),
        StructuringElement::HSeg(n) => erode_segment(mask, n as usize, true),
        StructuringElement::VSeg(n) => erode_segment(mask, n as usize, false),
    }
}

/// Number of pixels surviving erosion of `mask` by `se`.
pub fn eroded_area(mask: &BinaryMask, se: StructuringElement) -> u64 {
    erode(mask, se).area()
}

fn erode_disk(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if radius == 0 {
        return mask.clone();
    }
    // One-pixel background frame stands in for everything outside the raster.
    let (pw, ph) = (w + 2, h + 2);
    let mut grid = vec![0.0f64; pw * ph];
    for y in 0..h {
        for x in 0..w {
            if mask.data()[y * w + x] {
                grid[(y + 1) * pw + x + 1] = f64::INFINITY;
            }
        }
    }
    squared_distance_transform(&mut grid, pw, ph);
    let r2 = (radius as f64) * (radius as f64);
    BinaryMask::from_fn(w, h, |x, y| grid[(y + 1) * pw + x + 1] > r2)
}

/// In-place squared Euclidean distance transform; zero cells are the sites.
fn squared_distance_transform(grid: &mut [f64], width: usize, height: usize) {
    let n = width.max(height);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for x in 0..width {
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        lower_envelope(&f[..height], &mut d[..height], &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = d[y];
        }
    }
    for y in 0..height {
        let row = &mut grid[y * width..(y + 1) * width];
        f[..width].copy_from_slice(row);
        lower_envelope(&f[..width], &mut d[..width], &mut v, &mut z);
        row.copy_from_slice(&d[..width]);
    }
}

/// One-dimensional pass of the Felzenszwalb-Huttenlocher transform.
fn lower_envelope(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let first = match f.iter().position(|x| x.is_finite()) {
        Some(i) => i,
        None => {
            d.iter_mut().for_each(|x| *x = f64::INFINITY);
            return;
        }
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let qf = q as f64;
        let mut s;
        loop {
            let p = v[k] as f64;
            s = ((f[q] + qf * qf) - (f[v[k]] + p * p)) / (2.0 * qf - 2.0 * p);
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        if s <= z[k] {
            // k == 0 and the new parabola dominates the first one everywhere.
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            continue;
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let p = v[k] as f64;
        *out = (qf - p) * (qf - p) + f[v[k]];
    }
}

fn erode_segment(mask: &BinaryMask, length: usize, horizontal: bool) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let center = length / 2;
    let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
    let idx = |o: usize, i: usize| if horizontal { o * w + i } else { i * w + o };
    let mut out = vec![false; w * h];
    let mut run = vec![0usize; inner + 1];
    for o in 0..outer {
        // run[i]: foreground run length starting at i going forward.
        run[inner] = 0;
        for i in (0..inner).rev() {
            run[i] = if mask.data()[idx(o, i)] {
                run[i + 1] + 1
            } else {
                0
            };
        }
        for i in center..inner {
            if run[i - center] >= length {
                out[idx(o, i)] = true;
            }
        }
    }
    BinaryMask::new(w, h, out).expect("same dimensions")
}
