//! Declarative hierarchy chains and their text grammar.
//!
//! ```text
//! spec    := (op '|')* 'grad'
//! op      := ('ssurf' | 'svol') ['(erode=' se ')'] ['@' process]
//! se      := ('disk' | 'hseg' | 'vseg') ':' size
//! process := 'poisson(' count ')' | 'poisson(theta=' rate ')' | 'uniform(' n ')'
//! ```
//!
//! Operators read outermost first: `svol|ssurf|grad` applies `ssurf` to the
//! gradient hierarchy, then `svol` to the result.

use std::fmt;
use std::str::FromStr;

use super::model::{Intensity, MarkerModel, MarkerProcess, MeasureKind};
use crate::error::{Error, Result};
use crate::pixel::StructuringElement;

pub const MAX_CHAIN_DEPTH: usize = 2;

/// Chain of at most two stochastic watershed operators over the gradient hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchySpec {
    /// Operators in application order (innermost first).
    ops: Vec<MarkerModel>,
}

impl HierarchySpec {
    pub fn base() -> Self {
        Self { ops: Vec::new() }
    }

    pub fn new(ops: Vec<MarkerModel>) -> Result<Self> {
        if ops.len() > MAX_CHAIN_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "chain depth {} exceeds {MAX_CHAIN_DEPTH}",
                ops.len()
            )));
        }
        for op in &ops {
            op.validate()?;
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[MarkerModel] {
        &self.ops
    }

    pub fn depth(&self) -> usize {
        self.ops.len()
    }

    pub fn is_base(&self) -> bool {
        self.ops.is_empty()
    }

    /// Spec made of the first `depth` operators.
    pub fn prefix(&self, depth: usize) -> Self {
        Self {
            ops: self.ops[..depth].to_vec(),
        }
    }

    /// Canonical grammar string; parsing it yields the same spec.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Function-style name such as `λ_SVol(λ_SSurf(λ_Grad))`.
    pub fn display_name(&self) -> String {
        self.ops.iter().fold("λ_Grad".to_string(), |inner, op| {
            format!("λ_{}({inner})", op.short_name())
        })
    }

    /// Parses `s`, using `default` for operators without an explicit process.
    pub fn parse_with_default(s: &str, default: MarkerProcess) -> Result<Self> {
        let err = |reason: String| Error::SpecSyntax {
            input: s.to_string(),
            reason,
        };
        let parts: Vec<&str> = s.split('|').map(str::trim).collect();
        let (last, ops) = parts.split_last().expect("split yields one part");
        if *last != "grad" {
            return Err(err("chain must end with `grad`".into()));
        }
        let mut models = ops
            .iter()
            .map(|op| parse_op(op, default).map_err(&err))
            .collect::<Result<Vec<_>>>()?;
        models.reverse();
        if models.len() > MAX_CHAIN_DEPTH {
            return Err(err(format!("at most {MAX_CHAIN_DEPTH} operators")));
        }
        for m in &models {
            m.validate().map_err(|e| err(e.to_string()))?;
        }
        Ok(Self { ops: models })
    }
}

impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in self.ops.iter().rev() {
            write!(f, "{op}|")?;
        }
        write!(f, "grad")
    }
}

impl FromStr for HierarchySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_default(s, MarkerProcess::default())
    }
}

impl FromStr for MarkerProcess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = parse_process(s.trim()).map_err(Error::InvalidParameter)?;
        p.validate()?;
        Ok(p)
    }
}

fn parse_op(op: &str, default: MarkerProcess) -> std::result::Result<MarkerModel, String> {
    let (head, process) = match op.split_once('@') {
        Some((h, p)) => (h.trim(), parse_process(p.trim())?),
        None => (op, default),
    };
    let (name, erosion) = match head.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| format!("unbalanced parenthesis in `{op}`"))?;
            let se = inner
                .trim()
                .strip_prefix("erode=")
                .ok_or_else(|| format!("expected `erode=<se>` in `{op}`"))?;
            let se: StructuringElement = se.parse().map_err(|e: Error| e.to_string())?;
            (name.trim(), Some(se))
        }
        None => (head, None),
    };
    let measure = match (name, erosion) {
        ("ssurf", None) => MeasureKind::Surface,
        ("svol", None) => MeasureKind::Volume,
        ("ssurf", Some(se)) => MeasureKind::ErodedSurface(se),
        ("svol", Some(se)) => MeasureKind::ErodedVolume(se),
        _ => return Err(format!("unknown operator `{name}`")),
    };
    Ok(MarkerModel::new(process, measure))
}

fn parse_process(s: &str) -> std::result::Result<MarkerProcess, String> {
    let (name, rest) = s
        .split_once('(')
        .ok_or_else(|| format!("expected `poisson(..)` or `uniform(..)`, got `{s}`"))?;
    let arg = rest
        .strip_suffix(')')
        .ok_or_else(|| format!("unbalanced parenthesis in `{s}`"))?
        .trim();
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}`"))
    };
    match name.trim() {
        "poisson" => match arg.strip_prefix("theta=") {
            Some(t) => Ok(MarkerProcess::Poisson(Intensity::Rate(number(t)?))),
            None => Ok(MarkerProcess::Poisson(Intensity::ExpectedCount(number(
                arg,
            )?))),
        },
        "uniform" => arg
            .parse::<u32>()
            .map(MarkerProcess::Uniform)
            .map_err(|_| format!("bad marker count `{arg}`")),
        other => Err(format!("unknown marker process `{other}`")),
    }
}

/// Operator template; erosion templates expand over a structuring-element catalog.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorTemplate {
    pub volumic: bool,
    pub eroded: bool,
    pub process: MarkerProcess,
}

impl OperatorTemplate {
    fn expand(&self, catalog: &[StructuringElement]) -> Vec<MarkerModel> {
        let plain = |volumic| {
            if volumic {
                MeasureKind::Volume
            } else {
                MeasureKind::Surface
            }
        };
        if !self.eroded {
            return vec![MarkerModel::new(self.process, plain(self.volumic))];
        }
        catalog
            .iter()
            .map(|&se| {
                let measure = if self.volumic {
                    MeasureKind::ErodedVolume(se)
                } else {
                    MeasureKind::ErodedSurface(se)
                };
                MarkerModel::new(self.process, measure)
            })
            .collect()
    }
}

/// Surface, volume, eroded surface and eroded volume operators.
pub fn default_operator_set(process: MarkerProcess) -> Vec<OperatorTemplate> {
    [(false, false), (true, false), (false, true), (true, true)]
        .into_iter()
        .map(|(volumic, eroded)| OperatorTemplate {
            volumic,
            eroded,
            process,
        })
        .collect()
}

/// Disk of radius 4, horizontal segment of 4, vertical segment of 15.
pub fn default_se_catalog() -> Vec<StructuringElement> {
    vec![
        StructuringElement::Disk(4),
        StructuringElement::HSeg(4),
        StructuringElement::VSeg(15),
    ]
}

/// The base hierarchy, every single operator and every ordered pair of
/// operators, in that order.
pub fn enumerate_specs(
    operators: &[OperatorTemplate],
    catalog: &[StructuringElement],
) -> Vec<HierarchySpec> {
    let ops: Vec<MarkerModel> = operators.iter().flat_map(|t| t.expand(catalog)).collect();
    let mut specs = Vec::with_capacity(1 + ops.len() + ops.len() * ops.len());
    specs.push(HierarchySpec::base());
    specs.extend(ops.iter().map(|&op| HierarchySpec { ops: vec![op] }));
    for &first in &ops {
        for &second in &ops {
            specs.push(HierarchySpec {
                ops: vec![first, second],
            });
        }
    }
    specs
}
