//! Vector fields, exact one-form variations and their flows.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::expr::{TrigPolynomial, TrigTerm};
use crate::ambient::ScalarField;

/// A smooth vector field on a chart with its coordinate Jacobian
/// `(DW)^a_b = ∂_b W^a`.
pub trait VectorField: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// A constant field; on a flat torus these are the Killing fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantField(pub DVector<f64>);

impl VectorField for ConstantField {
    fn value(&self, _x: &DVector<f64>) -> DVector<f64> {
        self.0.clone()
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// A linear field `W(x) = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField(pub DMatrix<f64>);

impl VectorField for LinearField {
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.0 * x
    }

    fn jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.0.clone()
    }
}

/// Components given by trigonometric polynomials. Used both as a vector
/// field and as a 1-form `β = β_a dx^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigComponents {
    pub comps: Vec<TrigPolynomial>,
}

impl TrigComponents {
    /// Random smooth periodic components with small amplitude.
    pub fn random<R: Rng>(periods: &[f64], amplitude: f64, rng: &mut R) -> Self {
        let d = periods.len();
        let comps = (0..d)
            .map(|_| TrigPolynomial {
                periods: periods.to_vec(),
                terms: (0..3)
                    .map(|_| TrigTerm {
                        coeff: amplitude * rng.gen_range(-1.0..1.0),
                        freq: (0..d).map(|_| rng.gen_range(-1..=1)).collect(),
                        phase: rng.gen_range(0.0..TAU),
                    })
                    .collect(),
            })
            .collect();
        TrigComponents { comps }
    }

    /// Coefficients of `dβ` when read as a 1-form:
    /// `(dβ)_{bc} = ∂_b β_c − ∂_c β_b`.
    pub fn exterior_derivative(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let jac = self.jacobian(x);
        jac.transpose() - jac
    }

    /// Partials `∂_a (dβ)` for `a = 0..d`.
    pub fn exterior_derivative_partials(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let d = x.len();
        let hessians: Vec<DMatrix<f64>> = self.comps.iter().map(|c| c.hessian(x)).collect();
        (0..d)
            .map(|a| DMatrix::from_fn(d, d, |b, c| hessians[c][(b, a)] - hessians[b][(c, a)]))
            .collect()
    }
}

impl VectorField for TrigComponents {
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.value(x)))
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = x.len();
        let mut m = DMatrix::zeros(d, d);
        for (a, c) in self.comps.iter().enumerate() {
            m.set_row(a, &c.gradient(x).transpose());
        }
        m
    }
}

/// Flow of `field` for time `t` with its derivative, by classical RK4 on
/// `ẋ = W(x)`, `Ṁ = DW(x) M`.
pub fn flow_with_jacobian(
    field: &dyn VectorField,
    x0: &DVector<f64>,
    t: f64,
    steps: usize,
) -> (DVector<f64>, DMatrix<f64>) {
    let d = x0.len();
    let mut x = x0.clone();
    let mut m = DMatrix::<f64>::identity(d, d);
    if t == 0.0 || steps == 0 {
        return (x, m);
    }
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1x = field.value(&x);
        let k1m = field.jacobian(&x) * &m;
        let x2 = &x + &k1x * (0.5 * h);
        let m2 = &m + &k1m * (0.5 * h);
        let k2x = field.value(&x2);
        let k2m = field.jacobian(&x2) * &m2;
        let x3 = &x + &k2x * (0.5 * h);
        let m3 = &m + &k2m * (0.5 * h);
        let k3x = field.value(&x3);
        let k3m = field.jacobian(&x3) * &m3;
        let x4 = &x + &k3x * h;
        let m4 = &m + &k3m * h;
        let k4x = field.value(&x4);
        let k4m = field.jacobian(&x4) * &m4;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        m += (k1m + k2m * 2.0 + k3m * 2.0 + k4m) * (h / 6.0);
    }
    (x, m)
}

/// `L_W β = W^a ∂_a β + (DW)ᵀ β + β DW` in coordinates.
pub fn lie_derivative_2form(
    w: &DVector<f64>,
    dw: &DMatrix<f64>,
    beta: &DMatrix<f64>,
    dbeta: &[DMatrix<f64>],
) -> DMatrix<f64> {
    let mut out = dw.transpose() * beta + beta * dw;
    for (a, m) in dbeta.iter().enumerate() {
        if w[a] != 0.0 {
            out += m * w[a];
        }
    }
    out
}
