//! Manifold-tagged loading and saving of diffeomorphism files.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::circle::{CircleDiffeo, CircleFamily};
use crate::diffeo::{Diffeomorphism, Manifold};
use crate::error::{Error, Result};
use crate::interval::IntervalDiffeo;

#[derive(Debug, Clone, PartialEq)]
pub enum Diffeo {
    Interval(IntervalDiffeo),
    Circle(CircleDiffeo),
}

#[derive(Deserialize)]
struct ManifoldProbe {
    manifold: String,
}

impl Diffeo {
    pub fn manifold(&self) -> Manifold {
        match self {
            Diffeo::Interval(_) => Manifold::Interval,
            Diffeo::Circle(_) => Manifold::Circle,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Diffeo::Interval(f) => f.order(),
            Diffeo::Circle(f) => f.order(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Diffeo::Interval(f) => f.n(),
            Diffeo::Circle(f) => f.n(),
        }
    }

    /// Build a named family member. `rotation` and `cosine` are circle
    /// families; every other name is looked up among the interval families.
    pub fn from_family(name: &str, params: &[f64], k: usize, n: usize) -> Result<Self> {
        match name {
            "rotation" | "cosine" => Ok(Diffeo::Circle(CircleDiffeo::from_family(
                CircleFamily::parse(name, params)?,
                k,
                n,
            )?)),
            _ => Ok(Diffeo::Interval(IntervalDiffeo::from_family_name(name, params, k, n)?)),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let probe: ManifoldProbe = serde_json::from_str(s)?;
        match probe.manifold.as_str() {
            "interval" => Ok(Diffeo::Interval(IntervalDiffeo::from_json(s)?)),
            "circle" => Ok(Diffeo::Circle(CircleDiffeo::from_json(s)?)),
            other => Err(Error::Shape(format!("unknown manifold {other}"))),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        match self {
            Diffeo::Interval(f) => f.to_json(),
            Diffeo::Circle(f) => f.to_json(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        Diffeo::from_json_str(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string()?)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
    }
}
