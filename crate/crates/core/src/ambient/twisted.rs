use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::flat::standard_omega;
use super::{AmbientModel, ChartPoint};

/// Flat `T⁴` with `ω₀` and a position-dependent compatible `J`.
///
/// `J = R J₀ R⁻¹` with `R = diag(S(s₁), S(s₂))`, `S(s) = [[1, s], [0, 1]]`.
/// Each shear is symplectic, so `J` stays `ω₀`-compatible; the shears vary
/// over the torus, so `∇̄J ≠ 0`. Metric, Christoffels and `∇̄J` are
/// finite-difference derived.
#[derive(Debug, Clone)]
pub struct TwistedTorus {
    pub eps: f64,
}

impl Default for TwistedTorus {
    fn default() -> Self {
        TwistedTorus { eps: 0.2 }
    }
}

impl TwistedTorus {
    fn shears(&self, x: &[f64]) -> (f64, f64) {
        let s1 = self.eps * ((TAU * x[2]).sin() + 0.5 * (TAU * x[3]).cos());
        let s2 = self.eps * (TAU * (x[0] + x[1])).sin();
        (s1, s2)
    }
}

impl AmbientModel for TwistedTorus {
    fn id(&self) -> &str {
        "t4-twisted"
    }

    fn dim(&self) -> usize {
        4
    }

    fn periods(&self) -> Option<Vec<f64>> {
        Some(vec![1.0; 4])
    }

    fn is_kahler(&self) -> bool {
        false
    }

    fn omega(&self, _p: &ChartPoint) -> DMatrix<f64> {
        standard_omega(2)
    }

    fn omega_partials(&self, _p: &ChartPoint) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(4, 4); 4]
    }

    fn complex_structure(&self, p: &ChartPoint) -> DMatrix<f64> {
        let (s1, s2) = self.shears(p.coords.as_slice());
        let mut j = DMatrix::zeros(4, 4);
        for (k, s) in [(0, s1), (2, s2)] {
            j[(k, k)] = s;
            j[(k, k + 1)] = -s * s - 1.0;
            j[(k + 1, k)] = 1.0;
            j[(k + 1, k + 1)] = -s;
        }
        j
    }
}
