//! Machine-readable summaries of a variation experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Error;
use crate::immersion::SurfaceGrid;

use super::check::PathCheck;
use super::destabilize::{Certificate, Destabilization};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub surface: String,
    pub ambient: String,
    pub resolution: [usize; 2],
    #[serde(rename = "A0")]
    pub a0: f64,
    pub max_sin_alpha: f64,
    #[serde(rename = "Aprime")]
    pub a_prime: Option<f64>,
    #[serde(rename = "Asecond")]
    pub a_second: Option<f64>,
    #[serde(rename = "oracle_Aprime")]
    pub oracle_a_prime: Option<f64>,
    #[serde(rename = "oracle_Asecond")]
    pub oracle_a_second: Option<f64>,
    #[serde(rename = "tolerance_Aprime")]
    pub tolerance_a_prime: Option<f64>,
    #[serde(rename = "tolerance_Asecond")]
    pub tolerance_a_second: Option<f64>,
    pub consistent: bool,
    pub certificate: Option<Certificate>,
    pub paths: Vec<PathCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub destabilization: Option<Destabilization>,
    /// Command-specific scalar results, keyed by name.
    pub values: BTreeMap<String, f64>,
    #[serde(rename = "D1_field")]
    pub d1_field: Vec<f64>,
    #[serde(rename = "D2_field")]
    pub d2_field: Vec<f64>,
    #[serde(skip)]
    pub sin_alpha_field: Vec<f64>,
}

impl VariationReport {
    pub fn new(grid: &SurfaceGrid) -> Self {
        VariationReport {
            surface: grid.surface().id().to_string(),
            ambient: grid.model().id().to_string(),
            resolution: grid.resolution(),
            a0: grid.area(),
            max_sin_alpha: grid.max_sin_alpha().1,
            a_prime: None,
            a_second: None,
            oracle_a_prime: None,
            oracle_a_second: None,
            tolerance_a_prime: None,
            tolerance_a_second: None,
            consistent: true,
            certificate: None,
            paths: vec![],
            destabilization: None,
            values: BTreeMap::new(),
            d1_field: vec![],
            d2_field: vec![],
            sin_alpha_field: grid.nodes().iter().map(|n| n.sin_alpha()).collect(),
        }
    }

    /// Record a path check; the first one recorded fills the headline fields.
    pub fn push_path(&mut self, check: PathCheck) {
        if self.paths.is_empty() {
            self.a_prime = Some(check.a_prime);
            self.a_second = Some(check.a_second);
            self.oracle_a_prime = Some(check.oracle_a_prime);
            self.oracle_a_second = Some(check.oracle_a_second);
            self.tolerance_a_prime = Some(check.tolerance_a_prime);
            self.tolerance_a_second = Some(check.tolerance_a_second);
            if let Some(s) = &check.second {
                self.d1_field = s.d1.clone();
                self.d2_field = s.d2.clone();
            }
        }
        self.consistent &= check.consistent;
        self.paths.push(check);
    }

    pub fn set_destabilization(&mut self, d: Destabilization) {
        self.certificate = Some(d.certificate);
        self.consistent &= d.consistent();
        for p in &d.paths {
            if self.paths.is_empty() {
                self.push_path(p.clone());
            }
        }
        self.destabilization = Some(d);
    }

    /// Per-node `D₁, D₂, sin α`.
    pub fn nodes_csv(&self, grid: &SurfaceGrid) -> String {
        let mut out = String::from("node,u1,u2,sin_alpha,d1,d2\n");
        for n in grid.nodes() {
            let d1 = self.d1_field.get(n.index).copied().unwrap_or(0.0);
            let d2 = self.d2_field.get(n.index).copied().unwrap_or(0.0);
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e}",
                n.index, n.u[0], n.u[1], self.sin_alpha_field[n.index], d1, d2
            );
        }
        out
    }
}

/// `(u₁, u₂, cos α, sin α, dμ)` per node.
pub fn angle_csv(grid: &SurfaceGrid) -> String {
    let mut out = String::from("u1,u2,cos_alpha,sin_alpha,dmu\n");
    for n in grid.nodes() {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            n.u[0],
            n.u[1],
            n.cos_alpha(),
            n.sin_alpha(),
            n.dmu
        );
    }
    out
}
