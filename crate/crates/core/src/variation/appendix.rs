//! First variation of area when both the immersion and the ambient metric
//! move: `δ𝓐 = ½∫ tr_g(F^*h) dμ − ∫ ḡ(F_t, H) dμ`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::ChartPoint;
use crate::error::{Error, Result};
use crate::immersion::{NodeGeom, SurfaceGrid};
use crate::numerics::{five_point, pairwise_sum};

/// A variation vector field along the surface, as a function of the
/// parameters.
pub trait SurfaceVectorField: Send + Sync {
    fn value(&self, u: [f64; 2]) -> DVector<f64>;

    /// `[∂₁V, ∂₂V]`; central differences unless overridden.
    fn partials(&self, u: [f64; 2]) -> [DVector<f64>; 2] {
        let h = 1e-5;
        let d = |k: usize| {
            let mut up = u;
            let mut um = u;
            up[k] += h;
            um[k] -= h;
            (self.value(up) - self.value(um)) / (2.0 * h)
        };
        [d(0), d(1)]
    }
}

/// A symmetric 2-tensor field on the ambient chart.
pub trait TensorField: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// `k·ḡ`.
pub struct ScaledMetric<'a> {
    pub grid: &'a SurfaceGrid,
    pub k: f64,
}

impl TensorField for ScaledMetric<'_> {
    fn value(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.grid.model().metric(&ChartPoint::new(x.clone())) * self.k
    }
}

/// `h = 0`.
pub struct ZeroTensor;

impl TensorField for ZeroTensor {
    fn value(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// `F_t = 0`.
pub struct ZeroVariation(pub usize);

impl SurfaceVectorField for ZeroVariation {
    fn value(&self, _u: [f64; 2]) -> DVector<f64> {
        DVector::zeros(self.0)
    }

    fn partials(&self, _u: [f64; 2]) -> [DVector<f64>; 2] {
        [DVector::zeros(self.0), DVector::zeros(self.0)]
    }
}

/// A doubly periodic trigonometric variation field
/// `Σ c_k cos(2π(m u₁/L₁ + n u₂/L₂) + φ_k)` with vector coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVariation {
    pub periods: [f64; 2],
    pub terms: Vec<(DVector<f64>, i32, i32, f64)>,
}

impl FourierVariation {
    /// Random field with every component bounded by `bound`.
    pub fn random<R: Rng>(dim: usize, periods: [f64; 2], bound: f64, rng: &mut R) -> Self {
        let count = 4;
        let terms = (0..count)
            .map(|_| {
                let c =
                    DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0) * bound / count as f64);
                (
                    c,
                    rng.gen_range(-2..=2),
                    rng.gen_range(-2..=2),
                    rng.gen_range(0.0..TAU),
                )
            })
            .collect();
        FourierVariation { periods, terms }
    }

    fn angle(&self, m: i32, n: i32, u: [f64; 2]) -> f64 {
        TAU * (m as f64 * u[0] / self.periods[0] + n as f64 * u[1] / self.periods[1])
    }
}

impl SurfaceVectorField for FourierVariation {
    fn value(&self, u: [f64; 2]) -> DVector<f64> {
        let d = self.terms.first().map_or(0, |t| t.0.len());
        let mut v = DVector::zeros(d);
        for (c, m, n, ph) in &self.terms {
            v += c * (self.angle(*m, *n, u) + ph).cos();
        }
        v
    }

    fn partials(&self, u: [f64; 2]) -> [DVector<f64>; 2] {
        let d = self.terms.first().map_or(0, |t| t.0.len());
        let mut out = [DVector::zeros(d), DVector::zeros(d)];
        for (c, m, n, ph) in &self.terms {
            let s = -(self.angle(*m, *n, u) + ph).sin() * TAU;
            out[0] += c * (s * *m as f64 / self.periods[0]);
            out[1] += c * (s * *n as f64 / self.periods[1]);
        }
        out
    }
}

/// `F_t = H`, evaluated off-grid from the surface geometry.
pub struct MeanCurvatureVariation<'a>(pub &'a SurfaceGrid);

impl SurfaceVectorField for MeanCurvatureVariation<'_> {
    fn value(&self, u: [f64; 2]) -> DVector<f64> {
        self.0
            .geometry_at(u)
            .map(|n| n.mean_curvature)
            .unwrap_or_else(|_| DVector::from_element(self.0.model().dim(), f64::NAN))
    }
}

fn trace_term(n: &NodeGeom, h: &DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += n.g_inv[(i, j)] * (n.tangents[i].transpose() * h * &n.tangents[j])[(0, 0)];
        }
    }
    s
}

/// `½∫ tr_g(F^*h) dμ − ∫ ḡ(F_t, H) dμ` with `F_t` and `h` given at each
/// node.
pub fn general_first_variation_values(
    grid: &SurfaceGrid,
    ft: &[DVector<f64>],
    h: &[DMatrix<f64>],
) -> f64 {
    grid.integrate(|n| {
        0.5 * trace_term(n, &h[n.index]) - n.tensors.inner(&ft[n.index], &n.mean_curvature)
    })
}

fn node_values(
    grid: &SurfaceGrid,
    ft: &dyn SurfaceVectorField,
    h: &dyn TensorField,
) -> (Vec<DVector<f64>>, Vec<DMatrix<f64>>) {
    grid.nodes()
        .par_iter()
        .map(|n| (ft.value(n.u), h.value(&n.point.coords)))
        .unzip()
}

pub fn general_first_variation(
    grid: &SurfaceGrid,
    ft: &dyn SurfaceVectorField,
    h: &dyn TensorField,
) -> f64 {
    let (values, hs) = node_values(grid, ft, h);
    general_first_variation_values(grid, &values, &hs)
}

/// Area of `F + tF_t` in the metric `ḡ + t h`.
pub fn moved_area(
    grid: &SurfaceGrid,
    ft: &dyn SurfaceVectorField,
    h: &dyn TensorField,
    t: f64,
) -> Result<f64> {
    let model = grid.model().clone();
    let dmu: Vec<Result<f64>> = grid
        .nodes()
        .par_iter()
        .map(|n| {
            let x = &n.point.coords + ft.value(n.u) * t;
            let dv = ft.partials(n.u);
            let f1 = &n.tangents[0] + &dv[0] * t;
            let f2 = &n.tangents[1] + &dv[1] * t;
            let g = model.metric(&ChartPoint::new(x.clone())) + h.value(&x) * t;
            let g11 = f1.dot(&(&g * &f1));
            let g12 = f1.dot(&(&g * &f2));
            let g22 = f2.dot(&(&g * &f2));
            let det = g11 * g22 - g12 * g12;
            if !(det > 0.0) {
                return Err(Error::TamingViolation { t, margin: det });
            }
            Ok(det.sqrt())
        })
        .collect();
    let dmu = dmu.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(grid.weight() * pairwise_sum(&dmu))
}

/// Five-point derivative of [`moved_area`] at `t = 0`.
pub fn general_variation_oracle(
    grid: &SurfaceGrid,
    ft: &dyn SurfaceVectorField,
    h: &dyn TensorField,
    dt: f64,
) -> Result<f64> {
    let mut s = [0.0; 5];
    for (k, v) in s.iter_mut().enumerate() {
        *v = moved_area(grid, ft, h, (k as f64 - 2.0) * dt)?;
    }
    Ok(five_point(s, dt).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricDestabilizers {
    /// `max |ḡ(F_t, H)|` over the grid.
    pub c0: f64,
    /// `h₁ = k ḡ` and `h₂ = −k ḡ` with `k = 2(C₀+1)`.
    pub k: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub area: f64,
}

/// Metric variations `h₁ = 2(C₀+1)ḡ`, `h₂ = −h₁` that respectively increase
/// and decrease area to first order whatever `F_t` is.
pub fn appendix_destabilizers(
    grid: &SurfaceGrid,
    ft: &dyn SurfaceVectorField,
) -> MetricDestabilizers {
    let values: Vec<DVector<f64>> = grid.nodes().par_iter().map(|n| ft.value(n.u)).collect();
    let c0 = grid
        .nodes()
        .iter()
        .map(|n| n.tensors.inner(&values[n.index], &n.mean_curvature).abs())
        .fold(0.0_f64, f64::max);
    let k = 2.0 * (c0 + 1.0);
    MetricDestabilizers {
        c0,
        k,
        delta_plus: general_first_variation(grid, ft, &ScaledMetric { grid, k }),
        delta_minus: general_first_variation(grid, ft, &ScaledMetric { grid, k: -k }),
        area: grid.area(),
    }
}
