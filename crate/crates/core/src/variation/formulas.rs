//! Closed-form first and second variations of area along a surface.

use nalgebra::{DMatrix, DVector, Matrix2};
use rayon::prelude::*;

use crate::ambient::AmbientTensors;
use crate::immersion::{AdaptedFrame, NodeGeom, SurfaceFunctionJet, SurfaceGrid};
use crate::potential::PotentialJet;

fn pair(b: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * b * y)[(0, 0)]
}

/// `½ Σ_{ij} g^{ij} ω'(F_i, J F_j)` at one node.
pub fn first_variation_density(n: &NodeGeom, form: &DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let jf = &n.tensors.j * &n.tangents[j];
            s += n.g_inv[(i, j)] * pair(form, &n.tangents[i], &jf);
        }
    }
    0.5 * s
}

/// `A'(0) = ½ Σ_{ij} ∫ g^{ij} ω'(0)(F_i, J F_j) dμ` for per-node 2-forms.
pub fn first_variation(grid: &SurfaceGrid, forms: &[DMatrix<f64>]) -> f64 {
    grid.integrate(|n| first_variation_density(n, &forms[n.index]))
}

/// `A'(0)` for `ω'(0) = dd^cψ`, expanded in the adapted frame through the
/// covariant Hessian and `∇̄J`.
pub fn first_variation_expanded(grid: &SurfaceGrid, psi: &PotentialJet) -> f64 {
    grid.integrate(|n| expanded_density(n, &psi.jets[n.index].hess, &psi.jets[n.index].grad))
}

fn expanded_density(n: &NodeGeom, hess: &DMatrix<f64>, grad: &DVector<f64>) -> f64 {
    let t: &AmbientTensors = &n.tensors;
    let e = &n.frame.e;
    let (c, s) = (n.frame.cos_alpha, n.frame.sin_alpha);
    let h = |a: usize, b: usize| pair(hess, &e[a], &e[b]);
    let gram = Matrix2::from_fn(|i, j| t.inner(&e[i], &e[j]));
    let gi = gram.try_inverse().unwrap_or_else(Matrix2::identity);
    let (g11, g12, g22) = (gi[(0, 0)], gi[(0, 1)], gi[(1, 1)]);

    let mut v = 0.5 * g11 * (h(0, 0) + c * c * h(1, 1) + s * s * h(2, 2) + 2.0 * s * c * h(1, 2));
    v += 0.5 * g22 * (h(1, 1) + c * c * h(0, 0) + s * s * h(3, 3) + 2.0 * s * c * h(0, 3));
    v += g12 * (s * s * h(0, 1) - s * s * h(2, 3) - s * c * (h(0, 2) + h(1, 3)));

    if t.nabla_j.iter().any(|m| m.amax() > 0.0) {
        let je = [&t.j * &e[0], &t.j * &e[1]];
        let nj = |x: &DVector<f64>| t.nabla_j_along(x);
        let w11 = nj(&je[0]) * &e[0] - nj(&e[0]) * &je[0];
        let w22 = nj(&je[1]) * &e[1] - nj(&e[1]) * &je[1];
        let w12 = nj(&je[0]) * &e[1] - nj(&e[1]) * &je[0] + nj(&je[1]) * &e[0] - nj(&e[0]) * &je[1];
        v += 0.5 * grad.dot(&(w11 * g11 + w22 * g22));
        v += 0.5 * grad.dot(&(w12 * g12));
    }
    v
}

/// `(D₁, D₂)` of a 2-form in a given adapted frame:
/// `D₁ = sin α[−β(e₁,e₄) + β(e₂,e₃)]`, `D₂ = sin α[β(e₁,e₃) + β(e₂,e₄)]`.
pub fn d1_d2_in(frame: &AdaptedFrame, form: &DMatrix<f64>) -> (f64, f64) {
    let e = &frame.e;
    let s = frame.sin_alpha;
    if s == 0.0 {
        return (0.0, 0.0);
    }
    (
        s * (-pair(form, &e[0], &e[3]) + pair(form, &e[1], &e[2])),
        s * (pair(form, &e[0], &e[2]) + pair(form, &e[1], &e[3])),
    )
}

pub fn d1_d2(grid: &SurfaceGrid, node: usize, form: &DMatrix<f64>) -> (f64, f64) {
    d1_d2_in(&grid.node(node).frame, form)
}

/// `β(e₁, Je₁) − β(e₂, Je₂)`, the unreduced form of `D₂`.
pub fn d2_raw(frame: &AdaptedFrame, tensors: &AmbientTensors, form: &DMatrix<f64>) -> f64 {
    let e = &frame.e;
    pair(form, &e[0], &(&tensors.j * &e[0])) - pair(form, &e[1], &(&tensors.j * &e[1]))
}

/// `β(e₁, Je₂) + β(e₂, Je₁)`, the unreduced form of `D₁`.
pub fn d1_raw(frame: &AdaptedFrame, tensors: &AmbientTensors, form: &DMatrix<f64>) -> f64 {
    let e = &frame.e;
    pair(form, &e[0], &(&tensors.j * &e[1])) + pair(form, &e[1], &(&tensors.j * &e[0]))
}

/// The pieces of `D₂ = sin α[sin α·A + cos α·B + C]` for the normal
/// extension of a surface function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2Decomposition {
    /// `∇²f(e₁,e₁) − ∇²f(e₂,e₂)`.
    pub a: f64,
    /// `2[(h³₂₁ − h⁴₁₁) e₁f + (h³₂₂ − h⁴₁₂) e₂f]`.
    pub b: f64,
    /// `⟨∇̄ψ, (∇̄_{e₃}J)e₁ − (∇̄_{e₁}J)e₃ + (∇̄_{e₄}J)e₂ − (∇̄_{e₂}J)e₄⟩`.
    pub c: f64,
    pub value: f64,
}

pub fn d2_decomposed(grid: &SurfaceGrid, f: &SurfaceFunctionJet) -> D2Decomposition {
    let n = grid.node(f.node);
    let (cos, sin) = (n.frame.cos_alpha, n.frame.sin_alpha);
    let a = f.hess[(0, 0)] - f.hess[(1, 1)];
    let h3 = n.sff.h3();
    let h4 = n.sff.h4();
    let b = 2.0 * ((h3[(1, 0)] - h4[(0, 0)]) * f.grad[0] + (h3[(1, 1)] - h4[(0, 1)]) * f.grad[1]);
    let t = &n.tensors;
    let e = &n.frame.e;
    let grad = &t.metric * n.tangent(f.grad[0], f.grad[1]);
    let w = t.nabla_j_along(&e[2]) * &e[0] - t.nabla_j_along(&e[0]) * &e[2]
        + t.nabla_j_along(&e[3]) * &e[1]
        - t.nabla_j_along(&e[1]) * &e[3];
    let c = grad.dot(&w);
    D2Decomposition {
        a,
        b,
        c,
        value: sin * (sin * a + cos * b + c),
    }
}

/// Second variation and its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondVariation {
    pub value: f64,
    /// `½ Σ_i ∫ ω''(e_i, J e_i) dμ`.
    pub curvature_term: f64,
    pub d1_sq: f64,
    pub d2_sq: f64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// `A''(0) = ½ Σ_i ∫ ω''(e_i,Je_i) dμ − ¼∫D₁² dμ − ¼∫D₂² dμ`.
///
/// `second = None` is a linear path (`ω'' = 0`).
pub fn second_variation(
    grid: &SurfaceGrid,
    first: &[DMatrix<f64>],
    second: Option<&[DMatrix<f64>]>,
) -> SecondVariation {
    let (d1, d2): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .par_iter()
        .map(|n| d1_d2_in(&n.frame, &first[n.index]))
        .unzip();
    let d1_sq = grid.integrate(|n| d1[n.index] * d1[n.index]);
    let d2_sq = grid.integrate(|n| d2[n.index] * d2[n.index]);
    let curvature_term = match second {
        Some(f2) => grid.integrate(|n| {
            let e = &n.frame.e;
            let j = &n.tensors.j;
            0.5 * (pair(&f2[n.index], &e[0], &(j * &e[0]))
                + pair(&f2[n.index], &e[1], &(j * &e[1])))
        }),
        None => 0.0,
    };
    SecondVariation {
        value: curvature_term - 0.25 * d1_sq - 0.25 * d2_sq,
        curvature_term,
        d1_sq,
        d2_sq,
        d1,
        d2,
    }
}
