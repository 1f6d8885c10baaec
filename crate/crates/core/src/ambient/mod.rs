//! Chart-based model ambient spaces `(M, ω, J, ḡ)`.
//!
//! Every model exposes `ω` and `J` as coordinate matrices in a single chart.
//! Conventions used throughout the crate:
//!
//! - Real coordinates are interleaved, `(x₁, y₁, x₂, y₂, …)`, with
//!   `z_j = x_j + √−1 y_j`.
//! - A 2-form `β` is stored as the antisymmetric matrix `B` with
//!   `β(X, Y) = Xᵀ B Y`.
//! - `J` acts on column vectors: `(JX)^a = J^a_b X^b`.
//! - The metric attached to a pair is `ḡ(X, Y) = ½(ω(X, JY) + ω(Y, JX))`.
//! - `d^c ψ = −dψ ∘ J`, so that `dd^c = 2√−1 ∂∂̄` on integrable models.

pub mod calculus;
mod flat;
pub mod fubini_study;
mod twisted;

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{fd_step, matrix_field_partials, sym};

pub use calculus::{
    dc_of, ddc_matrix, ddc_via_hessian, metric_from_pair, taming_margin, MetricCheck, PointJet,
    ScalarField,
};
pub use flat::Flat;
pub use fubini_study::{normalize_at, ChartAutomorphism, FubiniStudy};
pub use twisted::TwistedTorus;

/// A point of `M` in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: DVector<f64>,
    pub chart: usize,
}

impl ChartPoint {
    pub fn new(coords: DVector<f64>) -> Self {
        ChartPoint { coords, chart: 0 }
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Christoffel symbols `Γ^a_{bc}` of a torsion-free connection.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Christoffels of `g` from its coordinate partials `dg[c] = ∂_c g`.
    pub fn from_metric(g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Self {
        let d = g.nrows();
        let g_inv = g.clone().try_inverse().expect("metric must be invertible");
        let mut out = Christoffel::zeros(d);
        // Γ_{dbc} = ½(∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc})
        let mut lowered = vec![0.0; d * d * d];
        for e in 0..d {
            for b in 0..d {
                for c in 0..d {
                    lowered[(e * d + b) * d + c] =
                        0.5 * (dg[b][(e, c)] + dg[c][(e, b)] - dg[e][(b, c)]);
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut s = 0.0;
                    for e in 0..d {
                        s += g_inv[(a, e)] * lowered[(e * d + b) * d + c];
                    }
                    out.set(a, b, c, s);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    /// `Γ(X, Y)^a = Γ^a_{bc} X^b Y^c`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |a, _| {
            let mut s = 0.0;
            for b in 0..d {
                for c in 0..d {
                    s += self.get(a, b, c) * x[b] * y[c];
                }
            }
            s
        })
    }

    /// Matrix `(Γ_X)^a_c = Γ^a_{bc} X^b`.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |a, c| (0..d).map(|b| self.get(a, b, c) * x[b]).sum())
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Which torsion-free connection enters covariant Hessians and `∇J`.
///
/// `dd^c ψ` does not depend on the choice; exposing it lets callers
/// cross-check the two routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connection {
    /// Levi-Civita connection of the model metric `ḡ`.
    #[default]
    LeviCivita,
    /// Flat coordinate connection of the chart.
    Coordinate,
}

/// All pointwise ambient data the variation formulas consume.
#[derive(Debug, Clone)]
pub struct AmbientTensors {
    pub omega: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub christoffel: Christoffel,
    /// `nabla_j[c] = ∇_{∂c} J` as a matrix `(∇_c J)^a_b`.
    pub nabla_j: Vec<DMatrix<f64>>,
}

impl AmbientTensors {
    /// `∇_X J` for a vector `X`.
    pub fn nabla_j_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.j.nrows();
        let mut out = DMatrix::zeros(d, d);
        for (c, m) in self.nabla_j.iter().enumerate() {
            if x[c] != 0.0 {
                out += m * x[c];
            }
        }
        out
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.metric * y)[(0, 0)]
    }

    pub fn form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.omega * y)[(0, 0)]
    }
}

/// A chart model of `(M, ω, J)` with derived metric and connection data.
///
/// Implementations are pure functions of the point and safe to share
/// between threads.
pub trait AmbientModel: Send + Sync + Debug {
    fn id(&self) -> &str;

    /// Real dimension `2n`.
    fn dim(&self) -> usize;

    /// Lattice periods when the chart covers a flat torus.
    fn periods(&self) -> Option<Vec<f64>> {
        None
    }

    /// True when `∇J = 0` for the model metric.
    fn is_kahler(&self) -> bool;

    fn omega(&self, p: &ChartPoint) -> DMatrix<f64>;

    fn complex_structure(&self, p: &ChartPoint) -> DMatrix<f64>;

    fn validate(&self, p: &ChartPoint) -> Result<()> {
        if p.chart != 0 {
            return Err(Error::invalid(format!(
                "model `{}` has a single chart, got chart {}",
                self.id(),
                p.chart
            )));
        }
        if p.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "point of dimension {} in model of dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        if p.coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite chart coordinates"));
        }
        Ok(())
    }

    fn metric(&self, p: &ChartPoint) -> DMatrix<f64> {
        sym(&(self.omega(p) * self.complex_structure(p)))
    }

    /// Analytic coordinate partials of the metric, if the model has them.
    fn metric_partials(&self, _p: &ChartPoint) -> Option<Vec<DMatrix<f64>>> {
        None
    }

    /// Coordinate partials of `J`; central differences unless overridden.
    fn j_partials(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        let h = fd_step(&p.coords);
        matrix_field_partials(
            |x| self.complex_structure(&ChartPoint::new(x.clone())),
            &p.coords,
            h,
        )
    }

    /// Coordinate partials of `ω`; central differences unless overridden.
    fn omega_partials(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        let h = fd_step(&p.coords);
        matrix_field_partials(|x| self.omega(&ChartPoint::new(x.clone())), &p.coords, h)
    }

    fn christoffel(&self, p: &ChartPoint) -> Christoffel {
        match self.metric_partials(p) {
            Some(dg) => Christoffel::from_metric(&self.metric(p), &dg),
            None => fd_christoffel(self, p),
        }
    }

    fn nabla_j(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        derived_nabla_j(
            &self.complex_structure(p),
            &self.j_partials(p),
            &self.christoffel(p),
        )
    }

    fn tensors(&self, p: &ChartPoint) -> AmbientTensors {
        self.tensors_with(p, Connection::LeviCivita)
    }

    fn tensors_with(&self, p: &ChartPoint, conn: Connection) -> AmbientTensors {
        let omega = self.omega(p);
        let j = self.complex_structure(p);
        let metric = self.metric(p);
        let (christoffel, nabla_j) = match conn {
            Connection::LeviCivita => (self.christoffel(p), self.nabla_j(p)),
            Connection::Coordinate => (Christoffel::zeros(self.dim()), self.j_partials(p)),
        };
        AmbientTensors {
            omega,
            j,
            metric,
            christoffel,
            nabla_j,
        }
    }
}

/// Christoffels from central differences of the model metric.
pub fn fd_christoffel<M: AmbientModel + ?Sized>(model: &M, p: &ChartPoint) -> Christoffel {
    let h = fd_step(&p.coords);
    let dg = matrix_field_partials(|x| model.metric(&ChartPoint::new(x.clone())), &p.coords, h);
    Christoffel::from_metric(&model.metric(p), &dg)
}

/// `(∇_c J)^a_b = ∂_c J^a_b + Γ^a_{ce} J^e_b − Γ^e_{cb} J^a_e`.
pub fn derived_nabla_j(
    j: &DMatrix<f64>,
    dj: &[DMatrix<f64>],
    gamma: &Christoffel,
) -> Vec<DMatrix<f64>> {
    let d = j.nrows();
    (0..d)
        .map(|c| {
            let mut e_c = DVector::zeros(d);
            e_c[c] = 1.0;
            let gc = gamma.along(&e_c); // (Γ_c)^a_e = Γ^a_{ce}
            &dj[c] + &gc * j - j * &gc
        })
        .collect()
}

/// Resolve a built-in ambient model by identifier.
///
/// Known ids: `flat-t4`, `flat-c2`, `flat-c<n>`, `cp<N>`, `t4-twisted`.
pub fn ambient_by_id(id: &str) -> Result<Arc<dyn AmbientModel>> {
    match id {
        "flat-t4" => Ok(Arc::new(Flat::torus(2))),
        "t4-twisted" => Ok(Arc::new(TwistedTorus::default())),
        _ => {
            if let Some(n) = id
                .strip_prefix("flat-c")
                .and_then(|s| s.parse::<usize>().ok())
            {
                if n >= 1 {
                    return Ok(Arc::new(Flat::euclidean(n)));
                }
            }
            if let Some(n) = id.strip_prefix("cp").and_then(|s| s.parse::<usize>().ok()) {
                return Ok(Arc::new(FubiniStudy::new(n)?));
            }
            Err(Error::UnknownId(id.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_builtins() {
        for id in [
            "flat-t4",
            "flat-c2",
            "flat-c3",
            "cp1",
            "cp2",
            "cp3",
            "t4-twisted",
        ] {
            let m = ambient_by_id(id).unwrap();
            assert_eq!(m.id(), id);
        }
        assert!(matches!(ambient_by_id("cp0"), Err(Error::InvalidInput(_))));
        assert!(matches!(ambient_by_id("s2"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn christoffel_contract_is_symmetric_for_symmetric_symbols() {
        let g = DMatrix::<f64>::identity(2, 2);
        let dg = vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.2, 0.2, 2.0]),
        ];
        let gamma = Christoffel::from_metric(&g, &dg);
        let x = DVector::from_vec(vec![0.3, -1.0]);
        let y = DVector::from_vec(vec![2.0, 0.7]);
        assert!((gamma.contract(&x, &y) - gamma.contract(&y, &x)).norm() < 1e-15);
    }

    #[test]
    fn validate_rejects_foreign_charts() {
        let m = Flat::euclidean(2);
        let mut p = ChartPoint::from_slice(&[0.0; 4]);
        assert!(m.validate(&p).is_ok());
        p.chart = 1;
        assert!(m.validate(&p).is_err());
        assert!(m.validate(&ChartPoint::from_slice(&[0.0; 3])).is_err());
        assert!(m
            .validate(&ChartPoint::from_slice(&[f64::NAN, 0.0, 0.0, 0.0]))
            .is_err());
    }
}
