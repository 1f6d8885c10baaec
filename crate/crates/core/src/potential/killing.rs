//! Killing fields of `CP^N` from linear holomorphic fields, and the
//! construction of a Killing field with prescribed normal derivative at a
//! surface point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::fields::VectorField;
use crate::ambient::{
    fubini_study::realify_complex_linear, normalize_at, AmbientModel, ChartAutomorphism,
    ChartPoint, FubiniStudy,
};
use crate::error::{Error, Result};
use crate::immersion::{NodeGeom, SurfaceGrid};

/// Which real part of the holomorphic field is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KillingPart {
    Real,
    Imaginary,
}

/// Coefficients `a^{AB}` of the homogeneous linear field `Ż = aᵀ Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingSpec {
    pub a: DMatrix<Complex64>,
    pub part: KillingPart,
}

impl KillingSpec {
    pub fn n(&self) -> usize {
        self.a.nrows() - 1
    }

    /// Deviation of `a` from anti-Hermitian (real part) or Hermitian
    /// (imaginary part), modulo scalars. Zero iff the field is Killing.
    pub fn isometry_defect(&self) -> f64 {
        let m = match self.part {
            KillingPart::Real => self.a.clone(),
            KillingPart::Imaginary => &self.a * Complex64::new(0.0, -1.0),
        };
        let d = m.nrows();
        let skew = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        // remove the real scalar part, which acts trivially
        let tr = skew.trace() / d as f64;
        (skew - DMatrix::identity(d, d) * tr).norm()
    }
}

/// Random anti-Hermitian coefficients of size `(n+1)×(n+1)` with entries
/// of modulus at most `scale`.
pub fn random_killing_spec<R: rand::Rng>(n: usize, scale: f64, rng: &mut R) -> KillingSpec {
    let d = n + 1;
    let m = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
    });
    KillingSpec {
        a: (&m - m.adjoint()) * Complex64::new(0.5, 0.0),
        part: KillingPart::Real,
    }
}

/// The real vector field `Re X` or `Im X` in the chart `U₀`, optionally
/// rotated by `J`. Its complex velocity is `mult · f(z)` with
/// `f_j = −a^{00} z_j − Σ_i a^{i0} z_i z_j + a^{0j} + Σ_i a^{ij} z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingField {
    pub a: DMatrix<Complex64>,
    pub mult: Complex64,
}

/// Field generated by `spec` on the model's chart.
pub fn killing_from_matrix(spec: &KillingSpec, model: &FubiniStudy) -> Result<KillingField> {
    if spec.a.nrows() != model.n() + 1 || spec.a.ncols() != model.n() + 1 {
        return Err(Error::invalid(format!(
            "Killing coefficients must be {0}x{0} for cp{1}",
            model.n() + 1,
            model.n()
        )));
    }
    let mult = match spec.part {
        KillingPart::Real => Complex64::new(0.5, 0.0),
        KillingPart::Imaginary => Complex64::new(0.0, -0.5),
    };
    Ok(KillingField {
        a: spec.a.clone(),
        mult,
    })
}

fn complex_coords(x: &DVector<f64>) -> Vec<Complex64> {
    (0..x.len() / 2)
        .map(|j| Complex64::new(x[2 * j], x[2 * j + 1]))
        .collect()
}

impl KillingField {
    pub fn n(&self) -> usize {
        self.a.nrows() - 1
    }

    /// `J` applied to the field.
    pub fn j_rotated(&self) -> KillingField {
        KillingField {
            a: self.a.clone(),
            mult: self.mult * Complex64::new(0.0, 1.0),
        }
    }

    pub fn holomorphic(&self, z: &[Complex64]) -> Vec<Complex64> {
        let a = &self.a;
        let lin: Complex64 = z.iter().enumerate().map(|(i, zi)| a[(i + 1, 0)] * zi).sum();
        (0..self.n())
            .map(|j| {
                let mut f = -a[(0, 0)] * z[j] - lin * z[j] + a[(0, j + 1)];
                for (i, zi) in z.iter().enumerate() {
                    f += a[(i + 1, j + 1)] * zi;
                }
                f
            })
            .collect()
    }

    /// `∂f_j/∂z_k`.
    pub fn holomorphic_jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let a = &self.a;
        let n = self.n();
        let lin: Complex64 = z.iter().enumerate().map(|(i, zi)| a[(i + 1, 0)] * zi).sum();
        DMatrix::from_fn(n, n, |j, k| {
            let mut v = a[(k + 1, j + 1)] - a[(k + 1, 0)] * z[j];
            if j == k {
                v -= a[(0, 0)] + lin;
            }
            v
        })
    }
}

impl VectorField for KillingField {
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        let f = self.holomorphic(&complex_coords(x));
        let mut out = DVector::zeros(x.len());
        for (j, fj) in f.iter().enumerate() {
            let v = self.mult * fj;
            out[2 * j] = v.re;
            out[2 * j + 1] = v.im;
        }
        out
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let jac = self.holomorphic_jacobian(&complex_coords(x)) * self.mult;
        realify_complex_linear(&jac)
    }
}

/// Matrix of `∇V`: `(∇_X V) = N X` with `N = DV + Γ(V, ·)`.
pub fn covariant_derivative(
    model: &dyn AmbientModel,
    field: &dyn VectorField,
    p: &ChartPoint,
) -> DMatrix<f64> {
    let v = field.value(&p.coords);
    field.jacobian(&p.coords) + model.christoffel(p).along(&v)
}

/// `max |L_V ḡ|` at `p`, with `∂ḡ` by central differences:
/// `L_V ḡ = (DV)ᵀ G + G DV + V^c ∂_c G`.
pub fn killing_residual(model: &dyn AmbientModel, field: &dyn VectorField, p: &ChartPoint) -> f64 {
    let x = &p.coords;
    let g = model.metric(p);
    let dv = field.jacobian(x);
    let v = field.value(x);
    let h = 1e-5;
    let mut lie = dv.transpose() * &g + &g * &dv;
    for c in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let dg =
            (model.metric(&ChartPoint::new(xp)) - model.metric(&ChartPoint::new(xm))) / (2.0 * h);
        lie += dg * v[c];
    }
    lie.amax()
}

/// The Killing field with value `x` at the chart origin and vanishing
/// derivative there (a transvection through the origin).
pub fn transvection(model: &FubiniStudy, x: &DVector<f64>) -> KillingField {
    let n = model.n();
    let mut a = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for j in 0..n {
        let c = Complex64::new(2.0 * x[2 * j], 2.0 * x[2 * j + 1]);
        a[(0, j + 1)] = c;
        a[(j + 1, 0)] = -c.conj();
    }
    KillingField {
        a,
        mult: Complex64::new(0.5, 0.0),
    }
}

/// `[U, V] = DV·U − DU·V` at `x`.
pub fn bracket(u: &dyn VectorField, v: &dyn VectorField, x: &DVector<f64>) -> DVector<f64> {
    v.jacobian(x) * u.value(x) - u.jacobian(x) * v.value(x)
}

/// Outcome of normalizing a Killing field at one surface node.
#[derive(Debug, Clone)]
pub struct KillingNormalization {
    pub node: usize,
    pub target: f64,
    pub cos_alpha: f64,
    pub sin_alpha: f64,
    pub automorphism: ChartAutomorphism,
    /// Un-rescaled coefficients in the chart centred at `q`.
    pub normalized: KillingSpec,
    /// `⟨∇_{ẽ₁}V, ẽ₃⟩ + ⟨∇_{ẽ₂}V, ẽ₄⟩` before rescaling.
    pub pairing_unscaled: f64,
    /// `|∇V|²(q)` before rescaling.
    pub grad_norm_sq_unscaled: f64,
    pub scale: f64,
    /// Rescaled coefficients in the original chart.
    pub spec: KillingSpec,
    /// Pairing of the rescaled field, recomputed in the original chart.
    pub pairing: f64,
    /// `|∇V|(q)` of the rescaled field, recomputed in the original chart.
    pub grad_norm: f64,
    /// `max |L_V ḡ|` over `q` and the sample points.
    pub killing_residual: f64,
}

fn complex_frame_vector(v: &DVector<f64>) -> DVector<Complex64> {
    DVector::from_fn(v.len() / 2, |j, _| Complex64::new(v[2 * j], v[2 * j + 1]))
}

/// Pairing and `|∇V|²` of a field at `p` against an orthonormal frame.
pub fn frame_pairing(
    model: &dyn AmbientModel,
    field: &dyn VectorField,
    p: &ChartPoint,
    frame: &[DVector<f64>],
) -> (f64, f64) {
    let g = model.metric(p);
    let nv = covariant_derivative(model, field, p);
    let ip = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * &g * y)[(0, 0)];
    let pairing = ip(&(&nv * &frame[0]), &frame[2]) + ip(&(&nv * &frame[1]), &frame[3]);
    let norm_sq = frame.iter().map(|e| {
        let w = &nv * e;
        ip(&w, &w)
    });
    (pairing, norm_sq.sum())
}

/// Killing field `V` with `⟨∇_{e₁}V, e₃⟩ + ⟨∇_{e₂}V, e₄⟩ = target` at the
/// node, built in the chart centred at the node.
///
/// `samples` are extra chart points at which the Killing equation is
/// checked.
pub fn lemma62_killing(
    model: &FubiniStudy,
    node: &NodeGeom,
    target: f64,
    samples: &[ChartPoint],
) -> Result<KillingNormalization> {
    let frame = &node.frame;
    if frame.degenerate {
        return Err(Error::DegenerateFrame {
            node: node.index,
            sin_alpha: frame.sin_alpha,
        });
    }
    let n = model.n();
    let q = &node.point;
    let automorphism = normalize_at(model, q);
    let jac = automorphism.real_jacobian(model, q);
    let r: Vec<DVector<Complex64>> = frame.e[..4]
        .iter()
        .map(|e| complex_frame_vector(&(&jac * e)))
        .collect();

    // Õ_{ij} = R̄₁^i R₃^j, placed in the lower-right block
    let mut a = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            a[(i + 1, j + 1)] = r[0][i].conj() * r[2][j];
        }
    }
    let inner = a.view((1, 1), (n, n)).into_owned();
    let vel1 = inner.transpose() * &r[0] * Complex64::new(0.5, 0.0);
    let vel2 = inner.transpose() * &r[1] * Complex64::new(0.5, 0.0);
    let pairing_unscaled = (r[2].adjoint() * vel1)[(0, 0)].re + (r[3].adjoint() * vel2)[(0, 0)].re;
    let grad_norm_sq_unscaled = 0.5 * inner.norm_squared();
    let scale = target / pairing_unscaled;

    let u = &automorphism.unitary;
    let a_orig = u.transpose() * (&a * Complex64::new(scale, 0.0)) * u.map(|v| v.conj());
    let spec = KillingSpec {
        a: a_orig,
        part: KillingPart::Real,
    };
    let field = killing_from_matrix(&spec, model)?;
    let (pairing, grad_sq) = frame_pairing(model, &field, q, &frame.e);
    let killing_residual = std::iter::once(q)
        .chain(samples.iter())
        .map(|p| killing_residual(model, &field, p))
        .fold(0.0, f64::max);

    Ok(KillingNormalization {
        node: node.index,
        target,
        cos_alpha: frame.cos_alpha,
        sin_alpha: frame.sin_alpha,
        automorphism,
        normalized: KillingSpec {
            a,
            part: KillingPart::Real,
        },
        pairing_unscaled,
        grad_norm_sq_unscaled,
        scale,
        spec,
        pairing,
        grad_norm: grad_sq.sqrt(),
        killing_residual,
    })
}

/// `ω'(0) = L_W ω` along the surface for `W = J V`, evaluated as
/// `d(ι_W ω)` by central differences and as `ω(∇W·, ·) + ω(·, ∇W·)`.
#[derive(Debug, Clone)]
pub struct KillingForms {
    /// Covariant evaluation, one coefficient matrix per node.
    pub forms: Vec<DMatrix<f64>>,
    /// Finite-difference evaluation of `d(ι_W ω)`.
    pub fd_forms: Vec<DMatrix<f64>>,
    pub max_discrepancy: f64,
}

/// Tolerance for the agreement of the two `L_W ω` evaluations.
pub const LIE_DERIVATIVE_TOLERANCE: f64 = 1e-4;

pub fn killing_two_form(grid: &SurfaceGrid, w: &dyn VectorField) -> Result<KillingForms> {
    let model = grid.model().clone();
    let pairs: Vec<(DMatrix<f64>, DMatrix<f64>)> = grid
        .nodes()
        .par_iter()
        .map(|n| {
            let x = &n.point.coords;
            let nw = w.jacobian(x) + n.tensors.christoffel.along(&w.value(x));
            let omega = &n.tensors.omega;
            let cov = nw.transpose() * omega + omega * &nw;
            let h = 1e-5 * x.norm().max(1.0);
            let fd = crate::ambient::calculus::exterior_derivative_1form(
                |p| {
                    let om = model.omega(&ChartPoint::new(p.clone()));
                    om.transpose() * w.value(p)
                },
                x,
                h,
            );
            (cov, fd)
        })
        .collect();
    let mut max_discrepancy = 0.0_f64;
    for (c, f) in &pairs {
        max_discrepancy = max_discrepancy.max((c - f).amax() / c.amax().max(1.0));
    }
    if !(max_discrepancy <= LIE_DERIVATIVE_TOLERANCE) {
        return Err(Error::Consistency {
            what: "L_W omega: covariant vs exterior-derivative evaluation".into(),
            discrepancy: max_discrepancy,
            tolerance: LIE_DERIVATIVE_TOLERANCE,
        });
    }
    let (forms, fd_forms) = pairs.into_iter().unzip();
    Ok(KillingForms {
        forms,
        fd_forms,
        max_discrepancy,
    })
}

/// `D̂₂(W)` through covariant derivatives of `W` in the adapted frame:
/// `sin α{sin α[⟨∇₁W,e₁⟩ − ⟨∇₂W,e₂⟩ + ⟨∇₃W,e₃⟩ − ⟨∇₄W,e₄⟩]
///  + cos α[⟨∇₂W,e₃⟩ + ⟨∇₃W,e₂⟩ − ⟨∇₁W,e₄⟩ − ⟨∇₄W,e₁⟩]}`.
pub fn d2_hat_covariant(node: &NodeGeom, nabla_w: &DMatrix<f64>) -> f64 {
    let e = &node.frame.e;
    let t = &node.tensors;
    let p = |i: usize, j: usize| t.inner(&(nabla_w * &e[i]), &e[j]);
    let (c, s) = (node.frame.cos_alpha, node.frame.sin_alpha);
    s * (s * (p(0, 0) - p(1, 1) + p(2, 2) - p(3, 3)) + c * (p(1, 2) + p(2, 1) - p(0, 3) - p(3, 0)))
}

#[cfg(test)]
mod tests;
