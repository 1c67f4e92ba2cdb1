//! Run configuration files.
//!
//! ```json
//! {"q": "3^1", "f": "1", "p": "1+0x+1x^2", "S": ["1+0x+1x^2"], "Sigma": ["0+1x"],
//!  "N": 1, "precision": 24, "budget": 10000000, "seed": 0}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::{parse_poly, parse_q, FinitePlace, FqField, Place};
use crate::geometry::DEFAULT_POINT_BUDGET;
use crate::rayclass::TowerConfig;
use crate::tower::TowerOptions;

fn default_conductor() -> String {
    "1".into()
}
fn default_layers() -> usize {
    1
}
fn default_precision() -> u32 {
    24
}
fn default_budget() -> u64 {
    DEFAULT_POINT_BUDGET
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub q: String,
    #[serde(default = "default_conductor")]
    pub f: String,
    pub p: String,
    /// Defaults to {𝔭}.
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<String>>,
    #[serde(rename = "Sigma")]
    pub sigma: Vec<String>,
    #[serde(rename = "N", default = "default_layers")]
    pub layers: usize,
    /// Fixed enumeration degree; per-layer bound + 4 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    /// Largest q^i the plane-model point count may enumerate.
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// `inf` (or `infinity`, `∞`) or a monic irreducible polynomial.
pub fn parse_place(field: &Arc<FqField>, s: &str) -> Result<Place> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Place::Infinity),
        t => Ok(Place::Finite(FinitePlace::new(parse_poly(field, t)?)?)),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn field(&self) -> Result<Arc<FqField>> {
        let (p, e) = parse_q(&self.q)?;
        FqField::new(p, e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be positive".into()));
        }
        self.tower_config().map(|_| ())
    }

    pub fn tower_config(&self) -> Result<TowerConfig> {
        let field = self.field()?;
        let conductor = parse_poly(&field, &self.f)?;
        let prime = FinitePlace::new(parse_poly(&field, &self.p)?)?;
        let s = self.s.as_ref().map(|list| list.iter().map(|v| parse_place(&field, v)).collect::<Result<Vec<_>>>()).transpose()?;
        let sigma = self
            .sigma
            .iter()
            .map(|v| match parse_place(&field, v)? {
                Place::Finite(w) => Ok(w),
                Place::Infinity => Err(Error::InvalidArgument("Σ must consist of finite places".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        TowerConfig::new(&conductor, &prime, s, sigma)
    }

    pub fn tower_options(&self) -> TowerOptions {
        TowerOptions { degree: self.degree, precision: self.precision, point_budget: self.budget, ..TowerOptions::default() }
    }
}
