//! Formula-vs-oracle comparison for one path.

use serde::Serialize;

use crate::error::Result;
use crate::immersion::SurfaceGrid;

use super::formulas::{first_variation, second_variation, SecondVariation};
use super::oracle::{area_path_oracle, OracleResult, OracleSettings};
use super::path::{PathMode, VariationPath};

/// `max(1e-6, 1e-3·|oracle|)`.
pub fn first_variation_tolerance(oracle: f64) -> f64 {
    (1e-3 * oracle.abs()).max(1e-6)
}

/// `max(1e-5, 1e-2·|oracle|)`.
pub fn second_variation_tolerance(oracle: f64) -> f64 {
    (1e-2 * oracle.abs()).max(1e-5)
}

/// Pointwise `D₁, D₂` at a chosen node against an expected `D₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseCheck {
    pub node: usize,
    pub sin_alpha: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
    #[serde(rename = "expected_D2")]
    pub expected_d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCheck {
    pub label: String,
    pub mode: PathMode,
    #[serde(rename = "Aprime")]
    pub a_prime: f64,
    #[serde(rename = "Asecond")]
    pub a_second: f64,
    #[serde(rename = "oracle_Aprime")]
    pub oracle_a_prime: f64,
    #[serde(rename = "oracle_Asecond")]
    pub oracle_a_second: f64,
    #[serde(rename = "tolerance_Aprime")]
    pub tolerance_a_prime: f64,
    #[serde(rename = "tolerance_Asecond")]
    pub tolerance_a_second: f64,
    /// `max(|formula − oracle|, quadrature round-off)` for `A'(0)`.
    #[serde(rename = "noise_floor_Aprime")]
    pub noise_floor_a_prime: f64,
    #[serde(rename = "noise_floor_Asecond")]
    pub noise_floor_a_second: f64,
    pub oracle_dt: f64,
    pub t_max: f64,
    pub richardson: bool,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise: Option<PointwiseCheck>,
    #[serde(skip)]
    pub second: Option<SecondVariation>,
}

impl PathCheck {
    /// `A'(0) ≠ 0` resolved above `factor` times its noise floor, with the
    /// oracle agreeing in sign.
    pub fn first_order_evidence(&self, factor: f64) -> bool {
        self.a_prime.abs() > factor * self.noise_floor_a_prime
            && self.a_prime.signum() == self.oracle_a_prime.signum()
    }

    /// `A''(0) < 0` resolved above `factor` times its noise floor, with the
    /// oracle agreeing in sign.
    pub fn second_order_evidence(&self, factor: f64) -> bool {
        self.a_second < 0.0
            && self.oracle_a_second < 0.0
            && self.a_second.abs() > factor * self.noise_floor_a_second
    }
}

/// Evaluate both variation formulas and the area oracle on one path.
pub fn check_path(
    grid: &SurfaceGrid,
    label: &str,
    path: &VariationPath,
    settings: &OracleSettings,
) -> Result<PathCheck> {
    let a_prime = first_variation(grid, &path.first);
    let second = second_variation(grid, &path.first, path.second.as_deref());
    let oracle: OracleResult = area_path_oracle(grid, path, settings)?;
    let tolerance_a_prime = first_variation_tolerance(oracle.a_prime);
    let tolerance_a_second = second_variation_tolerance(oracle.a_second);
    let err1 = (a_prime - oracle.a_prime).abs();
    let err2 = (second.value - oracle.a_second).abs();
    Ok(PathCheck {
        label: label.to_string(),
        mode: path.mode,
        a_prime,
        a_second: second.value,
        oracle_a_prime: oracle.a_prime,
        oracle_a_second: oracle.a_second,
        tolerance_a_prime,
        tolerance_a_second,
        noise_floor_a_prime: err1.max(oracle.noise_a_prime),
        noise_floor_a_second: err2.max(oracle.noise_a_second),
        oracle_dt: oracle.dt,
        t_max: oracle.t_max,
        richardson: oracle.richardson,
        consistent: err1 <= tolerance_a_prime && err2 <= tolerance_a_second,
        pointwise: None,
        second: Some(second),
    })
}
