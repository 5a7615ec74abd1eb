//! JSON run configuration.
//!
//! ```json
//! {
//!   "topology": {
//!     "family": "cascaded", "variant": "nr", "n": 3,
//!     "gb": 0.01, "gamma": 0.1, "big_gamma": 0.1, "xi": [1.0, 0.0]
//!   },
//!   "sweep": { "variable": "gb", "start": 0.001, "stop": 0.03, "points": 30, "scale": "log" },
//!   "observables": ["steady_energy", "gain"]
//! }
//! ```
//!
//! Unknown keys are rejected at every level; errors carry the JSON path of the
//! offending value.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Family, NetworkSpec, TopologyParams, Variant};
use crate::nonreciprocity::DEFAULT_GRID;
use crate::optimize::Scale;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyConfig>,
    /// Explicit network, used instead of `topology` by `steady`, `evolve` and `power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    /// Target mode ids; `bN` stands for the terminal battery.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_landscape_points")]
    pub landscape_points: usize,
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::SteadyEnergy]
}

fn default_landscape_points() -> usize {
    DEFAULT_GRID
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            topology: None,
            network: None,
            targets: Vec::new(),
            time_grid: None,
            sweep: None,
            observables: default_observables(),
            out_dir: None,
            landscape_points: default_landscape_points(),
        }
    }
}

/// Mirror of [`TopologyParams`]. `gamma_c` and `gamma_b` default to `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub family: Family,
    pub variant: Variant,
    pub n: usize,
    pub gb: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_b: Option<Vec<f64>>,
    pub big_gamma: f64,
    /// `[re, im]`.
    pub xi: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
}

impl TopologyConfig {
    pub fn to_params(&self) -> Result<TopologyParams> {
        let p = TopologyParams {
            family: self.family,
            variant: self.variant,
            n: self.n,
            g_b: self.gb,
            gamma_c: self.gamma_c.unwrap_or(self.gamma),
            gamma_b: self.gamma_b.clone().unwrap_or_else(|| vec![self.gamma; self.n]),
            big_gamma: self.big_gamma,
            xi: self.xi,
            thetas: self.thetas.clone(),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        crate::optimize::grid(self.start, self.stop, self.points, Scale::Linear)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Gb,
    Theta,
    N,
    Gamma,
    BigGamma,
    Xi,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Gb => "gb",
            SweepVariable::Theta => "theta",
            SweepVariable::N => "n",
            SweepVariable::Gamma => "gamma",
            SweepVariable::BigGamma => "big_gamma",
            SweepVariable::Xi => "xi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

impl From<SweepScale> for Scale {
    fn from(s: SweepScale) -> Self {
        match s {
            SweepScale::Linear => Scale::Linear,
            SweepScale::Log => Scale::Log,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: SweepScale,
    /// 1-based battery index of the swept phase; all phases when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

fn default_scale() -> SweepScale {
    SweepScale::Linear
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    SteadyEnergy,
    MaxPower,
    Gain,
    Eta,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks that serde cannot express.
    pub fn check(&self) -> Result<()> {
        let err = |path: &str, message: String| {
            Err(Error::Config {
                path: path.to_string(),
                message,
            })
        };
        if let Some(t) = &self.topology {
            if let Err(e) = t.to_params() {
                return err("topology", e.to_string());
            }
        }
        if let Some(net) = &self.network {
            if let Err(e) = net.check() {
                return err("network", e.to_string());
            }
        }
        if let Some(g) = &self.time_grid {
            if !(g.start >= 0.0 && g.stop >= g.start && g.stop.is_finite()) {
                return err(
                    "time_grid",
                    format!("need 0 <= start <= stop, got [{}, {}]", g.start, g.stop),
                );
            }
        }
        if let Some(s) = &self.sweep {
            if !(s.start.is_finite() && s.stop.is_finite()) {
                return err("sweep", "start and stop must be finite".into());
            }
            if s.scale == SweepScale::Log && s.points > 0 && !(s.start > 0.0 && s.stop > 0.0) {
                return err("sweep.scale", "log sweeps need positive start and stop".into());
            }
            if s.index.is_some() && s.variable != SweepVariable::Theta {
                return err("sweep.index", "index only applies to theta sweeps".into());
            }
            if s.index == Some(0) {
                return err("sweep.index", "battery index is 1-based".into());
            }
        }
        if self.landscape_points < crate::nonreciprocity::MIN_GRID {
            return err(
                "landscape_points",
                format!("need at least {} points", crate::nonreciprocity::MIN_GRID),
            );
        }
        Ok(())
    }

    pub fn params(&self) -> Result<TopologyParams> {
        match &self.topology {
            Some(t) => t.to_params(),
            None => Err(Error::Config {
                path: "topology".into(),
                message: "missing topology section".into(),
            }),
        }
    }
}
