use nalgebra::{DMatrix, DVector};

use crate::ambient::AmbientTensors;

/// Threshold on `sin α` below which the frame is built from a fallback
/// normal instead of `J e₁`.
pub const DEGENERACY_TAU: f64 = 1e-8;

/// Orthonormal frame `e₁, …, e_{2n}` adapted to a tangent plane, with
/// `e₁, e₂` tangent and `J` in block form on `span(e₁, …, e₄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub e: Vec<DVector<f64>>,
    pub cos_alpha: f64,
    pub sin_alpha: f64,
    /// Kähler angle in `[0, π]`.
    pub alpha: f64,
    pub degenerate: bool,
}

/// The block of `J` on `(e₁, …, e₄)` for a given angle; row `i` holds the
/// coefficients of `J e_i`.
pub fn block_form(cos_alpha: f64, sin_alpha: f64) -> DMatrix<f64> {
    let (c, s) = (cos_alpha, sin_alpha);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, c, s, 0.0, //
            -c, 0.0, 0.0, -s, //
            -s, 0.0, 0.0, c, //
            0.0, s, -c, 0.0,
        ],
    )
}

fn inner(t: &AmbientTensors, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    t.inner(x, y)
}

/// Removes the components along `basis` (assumed orthonormal) and returns
/// the residual.
fn residual(t: &AmbientTensors, v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut r = v.clone();
    for b in basis {
        let c = inner(t, &r, b);
        r -= b * c;
    }
    r
}

/// Unit vector from the coordinate axis that is furthest from `basis`.
fn best_axis(t: &AmbientTensors, basis: &[DVector<f64>]) -> DVector<f64> {
    let d = t.j.nrows();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for k in 0..d {
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        // two passes keep the completion orthonormal to round-off
        let r = residual(t, &residual(t, &v, basis), basis);
        let n = inner(t, &r, &r).sqrt();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, r / n));
        }
    }
    best.expect("dimension is positive").1
}

fn normalize(t: &AmbientTensors, v: DVector<f64>) -> DVector<f64> {
    let n = inner(t, &v, &v).sqrt();
    v / n
}

impl AdaptedFrame {
    /// Frame from an oriented orthonormal tangent pair `(e₁, e₂)`.
    pub fn from_tangent_pair(t: &AmbientTensors, e1: DVector<f64>, e2: DVector<f64>) -> Self {
        let cos_alpha = t.form(&e1, &e2).clamp(-1.0, 1.0);
        let je1 = &t.j * &e1;
        let je2 = &t.j * &e2;
        let normal_part = residual(t, &je1, &[e1.clone(), e2.clone()]);
        let sin_alpha = inner(t, &normal_part, &normal_part).sqrt().min(1.0);
        let alpha = sin_alpha.atan2(cos_alpha);
        let degenerate = sin_alpha < DEGENERACY_TAU;
        let mut e = vec![e1.clone(), e2.clone()];
        if !degenerate {
            e.push((&je1 - &e2 * cos_alpha) / sin_alpha);
            e.push(-(&je2 + &e1 * cos_alpha) / sin_alpha);
        } else {
            let e3 = best_axis(t, &e);
            // continuity with the block form as sin α → 0: J e₃ = cos α e₄
            let sign = if cos_alpha >= 0.0 { 1.0 } else { -1.0 };
            let mut basis = e.clone();
            basis.push(e3.clone());
            let e4 = normalize(t, residual(t, &(&t.j * &e3 * sign), &basis));
            e.push(e3);
            e.push(e4);
        }
        while e.len() < t.j.nrows() {
            let v = best_axis(t, &e);
            e.push(v);
        }
        AdaptedFrame {
            e,
            cos_alpha,
            sin_alpha,
            alpha,
            degenerate,
        }
    }

    /// `M_{ij} = ḡ(J e_i, e_j)` on the first four frame vectors.
    pub fn j_block(&self, t: &AmbientTensors) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| inner(t, &(&t.j * &self.e[i]), &self.e[j]))
    }

    pub fn gram(&self, t: &AmbientTensors) -> DMatrix<f64> {
        let d = self.e.len();
        DMatrix::from_fn(d, d, |i, j| inner(t, &self.e[i], &self.e[j]))
    }

    /// Frame obtained by rotating `(e₁, e₂)` by `theta` and rebuilding.
    pub fn rotated(&self, t: &AmbientTensors, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let e1 = &self.e[0] * c + &self.e[1] * s;
        let e2 = &self.e[1] * c - &self.e[0] * s;
        Self::from_tangent_pair(t, e1, e2)
    }

    /// Columns are the frame vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.e)
    }
}
