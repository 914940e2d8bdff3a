use std::fmt;

use crate::error::{Error, Result};
use crate::pixel::StructuringElement;

/// How a cluster is measured when markers are implanted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// Pixel area.
    Surface,
    /// Lake volume between the cluster's formation and merge altitudes.
    Volume,
    /// Area surviving erosion by the structuring element.
    ErodedSurface(StructuringElement),
    /// Volume scaled by the eroded-to-total area ratio.
    ErodedVolume(StructuringElement),
}

impl MeasureKind {
    pub fn erosion(&self) -> Option<StructuringElement> {
        match *self {
            MeasureKind::ErodedSurface(se) | MeasureKind::ErodedVolume(se) => Some(se),
            _ => None,
        }
    }

    pub fn is_volumic(&self) -> bool {
        matches!(self, MeasureKind::Volume | MeasureKind::ErodedVolume(_))
    }
}

/// Marker intensity of a Poisson process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intensity {
    /// Rate chosen so that the expected number of markers over the whole
    /// domain equals this count.
    ExpectedCount(f64),
    /// Explicit rate per unit of measure.
    Rate(f64),
}

/// Random marker process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarkerProcess {
    Poisson(Intensity),
    /// `N` markers drawn i.i.d. proportionally to the measure.
    Uniform(u32),
}

impl Default for MarkerProcess {
    fn default() -> Self {
        MarkerProcess::Poisson(Intensity::ExpectedCount(100.0))
    }
}

impl MarkerProcess {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarkerProcess::Poisson(Intensity::ExpectedCount(c)) => c.is_finite() && c > 0.0,
            MarkerProcess::Poisson(Intensity::Rate(t)) => t.is_finite() && t > 0.0,
            MarkerProcess::Uniform(n) => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid marker process {self}"
            )))
        }
    }

    /// Poisson rate for a domain of the given total measure.
    pub(crate) fn rate(&self, total: f64) -> Option<f64> {
        match *self {
            MarkerProcess::Poisson(Intensity::ExpectedCount(c)) => Some(c / total),
            MarkerProcess::Poisson(Intensity::Rate(t)) => Some(t),
            MarkerProcess::Uniform(_) => None,
        }
    }
}

impl fmt::Display for MarkerProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkerProcess::Poisson(Intensity::ExpectedCount(c)) => write!(f, "poisson({c})"),
            MarkerProcess::Poisson(Intensity::Rate(t)) => write!(f, "poisson(theta={t})"),
            MarkerProcess::Uniform(n) => write!(f, "uniform({n})"),
        }
    }
}

/// A stochastic watershed operator: a marker process and a cluster measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkerModel {
    pub process: MarkerProcess,
    pub measure: MeasureKind,
}

impl MarkerModel {
    pub fn new(process: MarkerProcess, measure: MeasureKind) -> Self {
        Self { process, measure }
    }

    pub fn validate(&self) -> Result<()> {
        self.process.validate()?;
        if let Some(se) = self.measure.erosion() {
            se.validate()?;
        }
        Ok(())
    }

    /// Short operator name as used in figure captions, e.g. `(SSurf,hseg:4)`.
    pub fn short_name(&self) -> String {
        match self.measure {
            MeasureKind::Surface => "SSurf".into(),
            MeasureKind::Volume => "SVol".into(),
            MeasureKind::ErodedSurface(se) => format!("(SSurf,{se})"),
            MeasureKind::ErodedVolume(se) => format!("(SVol,{se})"),
        }
    }
}

impl fmt::Display for MarkerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.measure {
            MeasureKind::Surface => write!(f, "ssurf")?,
            MeasureKind::Volume => write!(f, "svol")?,
            MeasureKind::ErodedSurface(se) => write!(f, "ssurf(erode={se})")?,
            MeasureKind::ErodedVolume(se) => write!(f, "svol(erode={se})")?,
        }
        write!(f, "@{}", self.process)
    }
}
