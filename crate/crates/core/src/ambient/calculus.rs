//! Pointwise `d^c` calculus: the metric attached to `(ω, J)`, `d^c ψ`,
//! `dd^c ψ` through covariant Hessians, and the sampled taming margin.

use nalgebra::{DMatrix, DVector};

use super::{AmbientModel, AmbientTensors, ChartPoint, Christoffel};
use crate::error::{Error, Result};
use crate::numerics::sym;

/// A symmetric bilinear form together with its positivity status.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCheck {
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub positive_definite: bool,
}

/// `ḡ(X, Y) = ½(ω(X, JY) + ω(Y, JX))`.
///
/// Loss of positivity is reported in the result instead of failing; the
/// matrix is symmetric by construction.
pub fn metric_from_pair(omega: &DMatrix<f64>, j: &DMatrix<f64>) -> MetricCheck {
    let matrix = sym(&(omega * j));
    let min_eigenvalue = matrix
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    MetricCheck {
        positive_definite: min_eigenvalue > 0.0,
        min_eigenvalue,
        matrix,
    }
}

/// A scalar function on a chart with coordinate derivatives.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;

    /// Coordinate components of `dψ`.
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Coordinate second partials `∂_a ∂_b ψ`.
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// The 2-jet of a potential at one point: value, `dψ` and `∇̄²ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl PointJet {
    pub fn zero(dim: usize) -> Self {
        PointJet {
            value: 0.0,
            grad: DVector::zeros(dim),
            hess: DMatrix::zeros(dim, dim),
        }
    }

    /// Jet of `field` at `x`, with the covariant Hessian taken for `gamma`.
    pub fn of(field: &dyn ScalarField, x: &DVector<f64>, gamma: &Christoffel) -> Self {
        let grad = field.gradient(x);
        let hess = covariant_hessian(&field.hessian(x), &grad, gamma);
        PointJet {
            value: field.value(x),
            grad,
            hess,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        PointJet {
            value: self.value * s,
            grad: &self.grad * s,
            hess: &self.hess * s,
        }
    }
}

/// `∇²ψ_{bc} = ∂_b∂_c ψ − Γ^a_{bc} ∂_a ψ`, symmetrized against round-off.
pub fn covariant_hessian(
    coord_hess: &DMatrix<f64>,
    grad: &DVector<f64>,
    gamma: &Christoffel,
) -> DMatrix<f64> {
    let d = grad.len();
    let mut h = coord_hess.clone();
    for b in 0..d {
        for c in 0..d {
            let mut s = 0.0;
            for a in 0..d {
                s += gamma.get(a, b, c) * grad[a];
            }
            h[(b, c)] -= s;
        }
    }
    sym(&h)
}

/// `d^c ψ(X) = −dψ(JX)`.
pub fn dc_of(grad: &DVector<f64>, j: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    -grad.dot(&(j * x))
}

/// `dd^c ψ(X, Y) = −∇²ψ(X, JY) + ∇²ψ(Y, JX) + dψ((∇_Y J)X − (∇_X J)Y)`.
pub fn ddc_via_hessian(
    jet: &PointJet,
    t: &AmbientTensors,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let jx = &t.j * x;
    let jy = &t.j * y;
    let hess_term =
        -(x.transpose() * &jet.hess * &jy)[(0, 0)] + (y.transpose() * &jet.hess * &jx)[(0, 0)];
    let w = t.nabla_j_along(y) * x - t.nabla_j_along(x) * y;
    hess_term + jet.grad.dot(&w)
}

/// Matrix `B` of `dd^c ψ`, i.e. `dd^c ψ(X, Y) = Xᵀ B Y`.
///
/// `B = −HJ + (HJ)ᵀ + M − Mᵀ` with `M_{bc} = dψ_a (∇_c J)^a_b`.
pub fn ddc_matrix(jet: &PointJet, t: &AmbientTensors) -> DMatrix<f64> {
    let hj = &jet.hess * &t.j;
    let mut b = hj.transpose() - &hj;
    if t.nabla_j.iter().any(|m| m.iter().any(|v| *v != 0.0)) {
        let d = t.j.nrows();
        let mut m = DMatrix::zeros(d, d);
        for (c, njc) in t.nabla_j.iter().enumerate() {
            let row = jet.grad.transpose() * njc; // row_b = Σ_a grad_a (∇_c J)^a_b
            for bb in 0..d {
                m[(bb, c)] = row[(0, bb)];
            }
        }
        b += &m - m.transpose();
    }
    b
}

/// Minimum of `ω'(X, JX)` over sampled `(point, vector)` pairs.
///
/// `form` returns the coefficient matrix of `ω'` at a point; `J` comes
/// from `model`. A positive result certifies taming on the sample set.
pub fn taming_margin<F>(
    model: &dyn AmbientModel,
    form: F,
    samples: &[(ChartPoint, DVector<f64>)],
) -> Result<f64>
where
    F: Fn(&ChartPoint) -> DMatrix<f64>,
{
    if samples.is_empty() {
        return Err(Error::invalid("taming_margin needs at least one sample"));
    }
    let mut margin = f64::INFINITY;
    for (p, x) in samples {
        let w = form(p);
        let jx = model.complex_structure(p) * x;
        margin = margin.min((x.transpose() * w * jx)[(0, 0)]);
    }
    Ok(margin)
}

/// Coefficients of `dα` for a 1-form field, by central differences:
/// `(dα)_{bc} = ∂_b α_c − ∂_c α_b`.
pub fn exterior_derivative_1form<F>(alpha: F, x: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let d = x.len();
    let mut partials = Vec::with_capacity(d);
    for b in 0..d {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[b] += h;
        xm[b] -= h;
        partials.push((alpha(&xp) - alpha(&xm)) / (2.0 * h));
    }
    DMatrix::from_fn(d, d, |b, c| partials[b][c] - partials[c][b])
}

/// Largest component of `dβ` for a 2-form field, by central differences.
pub fn exterior_derivative_2form_max<F>(beta: F, x: &DVector<f64>, h: f64) -> f64
where
    F: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let d = x.len();
    let partials = crate::numerics::matrix_field_partials(beta, x, h);
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in (a + 1)..d {
            for c in (b + 1)..d {
                let v = partials[a][(b, c)] + partials[b][(c, a)] + partials[c][(a, b)];
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}
