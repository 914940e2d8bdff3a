//! Raster containers shared by the pixel-level operators.

use crate::error::{Error, Result};

/// A gray or RGB image with intensities normalized to `[0, 1]`.
///
/// Samples are stored row-major and channel-interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    values: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty image {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Dimension(format!(
                "unsupported channel count {channels}"
            )));
        }
        if values.len() != width * height * channels {
            return Err(Error::Dimension(format!(
                "expected {} samples, got {}",
                width * height * channels,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "sample {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            values,
        })
    }

    pub fn gray(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(width, height, 1, values)
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::gray(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Channel samples of pixel `idx` (row-major index).
    pub fn pixel(&self, idx: usize) -> &[f64] {
        &self.values[idx * self.channels..(idx + 1) * self.channels]
    }

    /// Unweighted channel mean per pixel.
    pub fn luminance(&self) -> Vec<f64> {
        if self.channels == 1 {
            return self.values.clone();
        }
        self.values
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / self.channels as f64)
            .collect()
    }

    /// Multiplies every sample by `factor`, clamping into `[0, 1]`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|v| (v * factor).clamp(0.0, 1.0))
                .collect(),
            ..self.clone()
        }
    }
}

/// A non-negative real-valued field, typically the relief to flood.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty field {width}x{height}")));
        }
        if values.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "field values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

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
}

/// Binary raster; pixels outside the raster count as background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} mask cells, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    /// Foreground test with out-of-bounds coordinates treated as background.
    pub fn get(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    pub fn area(&self) -> u64 {
        self.data.iter().filter(|&&b| b).count() as u64
    }
}

pub(crate) fn check_same_dims(
    what: &str,
    (w1, h1): (usize, usize),
    (w2, h2): (usize, usize),
) -> Result<()> {
    if (w1, h1) != (w2, h2) {
        return Err(Error::Dimension(format!("{what}: {w1}x{h1} vs {w2}x{h2}")));
    }
    Ok(())
}
