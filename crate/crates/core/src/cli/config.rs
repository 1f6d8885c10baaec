//! Scenario configuration: a flat TOML file.
//!
//! ```toml
//! surface = "cp2-clifford"      # catalog id, or "custom"
//! ambient = "cp2"               # defaults to the surface's own ambient
//! resolution = 96               # or [n1, n2]; at least 16 per axis
//! seed = 7
//! connection = "levi-civita"    # or "coordinate"
//! path = "linear-potential"     # linear-potential | general-potential |
//!                               # exact-one-form | killing-flow | flow-pullback
//! potential = "random"          # random | distance-squared | saddle | zero
//! field = "random"              # random | lemma62 | isotopy
//! node = 0                      # defaults to the first argmax of sin α
//! oracle_dt = 1e-3
//! oracle_t_probe = 1.0
//! invariance_count = 20
//! killing_target = 1.0
//! out = "out"
//!
//! # only with surface = "custom"
//! custom_id = "my-torus"
//! custom_domain = [1.0, 1.0]
//! custom_base = [0.0, 0.0, 0.0, 0.0]
//! custom_a = [1.0, 0.0, 0.0, 0.0]
//! custom_b = [0.0, 0.0, 1.0, 0.0]
//! custom_terms = [{ coeff = [0.0, 0.0, 0.0, 0.05], m = 1, n = 0, phase = 0.0 }]
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ambient::{ambient_by_id, AmbientModel, Connection};
use crate::error::{Error, Result};
use crate::immersion::{surface_by_id, FourierSurface, FourierTerm, ParamSurface};
use crate::variation::{OracleSettings, PathMode};

pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Square(usize),
    Rect([usize; 2]),
}

impl Resolution {
    pub fn get(&self) -> [usize; 2] {
        match *self {
            Resolution::Square(n) => [n, n],
            Resolution::Rect(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomTerm {
    pub coeff: Vec<f64>,
    pub m: i32,
    pub n: i32,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surface: String,
    pub ambient: Option<String>,
    #[serde(default = "default_resolution")]
    pub resolution: Resolution,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_connection")]
    pub connection: String,
    #[serde(default = "default_path")]
    pub path: String,
    #[serde(default = "default_random")]
    pub potential: String,
    #[serde(default = "default_random")]
    pub field: String,
    pub node: Option<usize>,
    #[serde(default = "default_dt")]
    pub oracle_dt: f64,
    #[serde(default = "default_probe")]
    pub oracle_t_probe: f64,
    #[serde(default = "default_count")]
    pub invariance_count: usize,
    #[serde(default = "default_target")]
    pub killing_target: f64,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub custom_id: Option<String>,
    pub custom_domain: Option<[f64; 2]>,
    pub custom_base: Option<Vec<f64>>,
    pub custom_a: Option<Vec<f64>>,
    pub custom_b: Option<Vec<f64>>,
    pub custom_terms: Option<Vec<CustomTerm>>,
}

fn default_resolution() -> Resolution {
    Resolution::Square(64)
}
fn default_connection() -> String {
    "levi-civita".into()
}
fn default_path() -> String {
    PathMode::LinearPotential.name().into()
}
fn default_random() -> String {
    "random".into()
}
fn default_dt() -> f64 {
    1e-3
}
fn default_probe() -> f64 {
    1.0
}
fn default_count() -> usize {
    20
}
fn default_target() -> f64 {
    1.0
}

/// Everything a command needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: Arc<dyn AmbientModel>,
    pub surface: Arc<dyn ParamSurface>,
    pub resolution: [usize; 2],
    pub connection: Connection,
    pub mode: PathMode,
    pub oracle: OracleSettings,
    /// SHA-256 of the resolved configuration.
    pub hash: String,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn custom_surface(&self, dim: usize) -> Result<FourierSurface> {
        let vector = |v: &Option<Vec<f64>>| {
            v.as_ref()
                .map_or_else(|| DVector::zeros(dim), |v| DVector::from_column_slice(v))
        };
        let terms = self
            .custom_terms
            .iter()
            .flatten()
            .map(|t| FourierTerm {
                coeff: DVector::from_column_slice(&t.coeff),
                m: t.m,
                n: t.n,
                phase: t.phase,
            })
            .collect();
        Ok(FourierSurface {
            id: self.custom_id.clone().unwrap_or_else(|| "custom".into()),
            domain: self
                .custom_domain
                .ok_or_else(|| Error::Config("custom surface needs `custom_domain`".into()))?,
            base: vector(&self.custom_base),
            a: vector(&self.custom_a),
            b: vector(&self.custom_b),
            terms,
        })
    }

    /// Resolve identifiers and check every constraint.
    pub fn resolve(self) -> Result<Scenario> {
        let resolution = self.resolution.get();
        if resolution.iter().any(|&n| n < MIN_RESOLUTION) {
            return Err(Error::Config(format!(
                "resolution must be at least {MIN_RESOLUTION} per axis, got {resolution:?}"
            )));
        }
        let connection = match self.connection.as_str() {
            "levi-civita" => Connection::LeviCivita,
            "coordinate" => Connection::Coordinate,
            other => return Err(Error::Config(format!("unknown connection `{other}`"))),
        };
        let mode = PathMode::parse(&self.path)
            .ok_or_else(|| Error::Config(format!("unknown path mode `{}`", self.path)))?;
        if !["random", "distance-squared", "saddle", "zero"].contains(&self.potential.as_str()) {
            return Err(Error::Config(format!(
                "unknown potential `{}`",
                self.potential
            )));
        }
        if !["random", "lemma62", "isotopy"].contains(&self.field.as_str()) {
            return Err(Error::Config(format!("unknown field `{}`", self.field)));
        }
        if !(self.oracle_dt > 0.0 && self.oracle_dt.is_finite()) {
            return Err(Error::Config("oracle_dt must be positive".into()));
        }
        if !(self.oracle_t_probe > 0.0 && self.oracle_t_probe.is_finite()) {
            return Err(Error::Config("oracle_t_probe must be positive".into()));
        }
        let (surface, model): (Arc<dyn ParamSurface>, Arc<dyn AmbientModel>) =
            if self.surface == "custom" {
                let amb = self
                    .ambient
                    .as_deref()
                    .ok_or_else(|| Error::Config("custom surface needs `ambient`".into()))?;
                let model = ambient_by_id(amb).map_err(config_error)?;
                let s = self.custom_surface(model.dim())?;
                s.check_closed(model.as_ref()).map_err(config_error)?;
                (Arc::new(s), model)
            } else {
                let (s, default_amb) = surface_by_id(&self.surface).map_err(config_error)?;
                let model = ambient_by_id(self.ambient.as_deref().unwrap_or(default_amb))
                    .map_err(config_error)?;
                s.check_closed(model.as_ref()).map_err(config_error)?;
                (Arc::new(s), model)
            };
        let canonical = serde_json::to_string(&self).expect("config serializes");
        let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        Ok(Scenario {
            oracle: OracleSettings {
                dt: self.oracle_dt,
                t_probe: self.oracle_t_probe,
            },
            config: self,
            model,
            surface,
            resolution,
            connection,
            mode,
            hash,
        })
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = ScenarioConfig::parse("surface = \"t4-holomorphic\"").unwrap();
        assert_eq!(c.resolution.get(), [64, 64]);
        assert_eq!(c.path, "linear-potential");
        let s = c.resolve().unwrap();
        assert_eq!(s.model.id(), "flat-t4");
        assert_eq!(s.mode, PathMode::LinearPotential);
        assert_eq!(s.oracle, OracleSettings::default());
    }

    #[test]
    fn rectangular_resolution_and_hash() {
        let a = ScenarioConfig::parse("surface = \"cp2-clifford\"\nresolution = [16, 32]").unwrap();
        assert_eq!(a.resolution.get(), [16, 32]);
        let mut b = a.clone();
        b.out = Some("elsewhere".into());
        let (ha, hb) = (a.resolve().unwrap().hash, b.resolve().unwrap().hash);
        assert_eq!(ha, hb);
        let c = ScenarioConfig::parse("surface = \"cp2-clifford\"\nresolution = [16, 33]").unwrap();
        assert_ne!(ha, c.resolve().unwrap().hash);
    }

    #[test]
    fn custom_surface_must_close_up() {
        let ok = "surface = \"custom\"\nambient = \"flat-t4\"\ncustom_domain = [1.0, 1.0]\n\
                  custom_a = [1.0, 0.0, 0.0, 0.0]\ncustom_b = [0.0, 1.0, 0.0, 0.0]\nresolution = 16";
        let s = ScenarioConfig::parse(ok).unwrap().resolve().unwrap();
        assert_eq!(s.surface.id(), "custom");
        let bad = ok.replace("custom_a = [1.0,", "custom_a = [0.5,");
        assert!(matches!(
            ScenarioConfig::parse(&bad).unwrap().resolve(),
            Err(Error::Config(_))
        ));
        let no_ambient = ok.replace("ambient = \"flat-t4\"\n", "");
        assert!(ScenarioConfig::parse(&no_ambient)
            .unwrap()
            .resolve()
            .is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "surface = \"t4-holomorphic\"\noracle_dt = -1.0",
            "surface = \"t4-holomorphic\"\nconnection = \"flat\"",
            "surface = \"t4-holomorphic\"\npotential = \"huge\"",
            "surface = \"t4-holomorphic\"\nfield = \"wind\"",
            "surface = \"t4-holomorphic\"\nresolution = [16, 15]",
        ] {
            let r = ScenarioConfig::parse(text).and_then(|c| c.resolve());
            assert!(matches!(r, Err(Error::Config(_))), "{text}");
        }
        assert!(ScenarioConfig::parse("resolution = 16").is_err());
    }
}
