//! Deformation potentials represented by their 2-jets along a surface,
//! plus the vector fields and Killing fields that generate deformations.

mod expr;
mod fields;
mod killing;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ambient::{ddc_matrix, PointJet, ScalarField};
use crate::error::{Error, Result};
use crate::immersion::{NodeGeom, SurfaceFunctionJet, SurfaceGrid};

pub use expr::{
    random_bump, random_potential, Bump, Constant, Polynomial, PotentialExpr, TrigPolynomial,
    TrigTerm,
};
pub use fields::{
    flow_with_jacobian, lie_derivative_2form, ConstantField, LinearField, TrigComponents,
    VectorField,
};
pub use killing::{
    bracket, covariant_derivative, d2_hat_covariant, frame_pairing, killing_from_matrix,
    killing_residual, killing_two_form, lemma62_killing, random_killing_spec, transvection,
    KillingField, KillingForms, KillingNormalization, KillingPart, KillingSpec,
    LIE_DERIVATIVE_TOLERANCE,
};

/// How a potential jet was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    DistanceSquared,
    NormalExtension,
    Killing,
}

/// Value, `dψ` and `∇̄²ψ` of a potential at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialJet {
    pub provenance: Provenance,
    pub jets: Vec<PointJet>,
}

impl PotentialJet {
    pub fn zero(grid: &SurfaceGrid) -> Self {
        PotentialJet {
            provenance: Provenance::Analytic,
            jets: vec![PointJet::zero(grid.model().dim()); grid.len()],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        PotentialJet {
            provenance: self.provenance,
            jets: self.jets.iter().map(|j| j.scaled(s)).collect(),
        }
    }

    /// Coefficient matrices of `dd^c ψ` at every node.
    pub fn ddc_forms(&self, grid: &SurfaceGrid) -> Vec<DMatrix<f64>> {
        self.jets
            .par_iter()
            .zip(grid.nodes().par_iter())
            .map(|(j, n)| ddc_matrix(j, &n.tensors))
            .collect()
    }
}

/// Jet of a closed-form potential along the surface, with the covariant
/// Hessian taken for the grid's connection.
pub fn analytic_potential_jet(field: &dyn ScalarField, grid: &SurfaceGrid) -> PotentialJet {
    let jets = grid
        .nodes()
        .par_iter()
        .map(|n| PointJet::of(field, &n.point.coords, &n.tensors.christoffel))
        .collect();
    PotentialJet {
        provenance: Provenance::Analytic,
        jets,
    }
}

/// Largest relative mismatch between an analytic jet and central
/// differences of the field at step `h`, over the given nodes.
///
/// Covariant Hessians are converted back to coordinate Hessians before
/// comparison.
pub fn jet_difference_check(
    field: &dyn ScalarField,
    jet: &PotentialJet,
    grid: &SurfaceGrid,
    nodes: &[usize],
    h: f64,
) -> f64 {
    let mut worst = 0.0_f64;
    for &i in nodes {
        let n = grid.node(i);
        let x = &n.point.coords;
        let pj = &jet.jets[i];
        let d = x.len();
        let mut coord_hess = pj.hess.clone();
        for b in 0..d {
            for c in 0..d {
                for a in 0..d {
                    coord_hess[(b, c)] += n.tensors.christoffel.get(a, b, c) * pj.grad[a];
                }
            }
        }
        let scale = 1.0 + pj.grad.amax() + coord_hess.amax();
        worst = worst.max((field.value(x) - pj.value).abs() / scale);
        for a in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[a] += h;
            xm[a] -= h;
            let g = (field.value(&xp) - field.value(&xm)) / (2.0 * h);
            worst = worst.max((g - pj.grad[a]).abs() / scale);
            let gg = (field.gradient(&xp) - field.gradient(&xm)) / (2.0 * h);
            worst = worst.max((gg - coord_hess.column(a)).amax() / scale);
        }
    }
    worst
}

/// Jet of `½ dist²(·, Σ)` along Σ: zero value and gradient, Hessian the
/// orthogonal projector onto the normal space (as a bilinear form).
pub fn distance_squared_jet(grid: &SurfaceGrid) -> PotentialJet {
    let d = grid.model().dim();
    let jets = grid
        .nodes()
        .par_iter()
        .map(|n| {
            let g = &n.tensors.metric;
            let mut hess = g.clone();
            for e in &n.frame.e[..2] {
                let ge = g * e;
                hess -= &ge * ge.transpose();
            }
            PointJet {
                value: 0.0,
                grad: DVector::zeros(d),
                hess: crate::numerics::sym(&hess),
            }
        })
        .collect();
    PotentialJet {
        provenance: Provenance::DistanceSquared,
        jets,
    }
}

/// Jet along Σ of the extension of a surface function that is constant
/// along normal geodesics.
///
/// In the adapted frame: tangential Hessian `∇²f`, mixed entries
/// `∇²ψ(e_i, e_σ) = Σ_k h^σ_{ik} e_k f`, normal block zero, and `dψ` tangent.
pub fn normal_extension_jet(grid: &SurfaceGrid, f: &[SurfaceFunctionJet]) -> Result<PotentialJet> {
    if f.len() != grid.len() {
        return Err(Error::invalid(format!(
            "surface function has {} jets for {} nodes",
            f.len(),
            grid.len()
        )));
    }
    let jets = grid
        .nodes()
        .par_iter()
        .zip(f.par_iter())
        .map(|(n, fj)| extension_point_jet(n, fj))
        .collect();
    Ok(PotentialJet {
        provenance: Provenance::NormalExtension,
        jets,
    })
}

/// Normal-extension jet at the single node carrying `f`.
pub fn normal_extension_at(grid: &SurfaceGrid, f: &SurfaceFunctionJet) -> Result<PointJet> {
    if f.node >= grid.len() {
        return Err(Error::invalid(format!("node {} outside the grid", f.node)));
    }
    Ok(extension_point_jet(grid.node(f.node), f))
}

fn extension_point_jet(n: &NodeGeom, fj: &SurfaceFunctionJet) -> PointJet {
    let d = n.tensors.metric.nrows();
    let mut hf = DMatrix::zeros(d, d);
    for i in 0..2 {
        for k in 0..2 {
            hf[(i, k)] = fj.hess[(i, k)];
        }
    }
    for (s, h) in n.sff.h.iter().enumerate() {
        for i in 0..2 {
            let v = h[(i, 0)] * fj.grad[0] + h[(i, 1)] * fj.grad[1];
            hf[(i, s + 2)] = v;
            hf[(s + 2, i)] = v;
        }
    }
    let ge = &n.tensors.metric * n.frame.matrix();
    let tangent = n.tangent(fj.grad[0], fj.grad[1]);
    PointJet {
        value: fj.value,
        grad: &n.tensors.metric * tangent,
        hess: crate::numerics::sym(&(&ge * hf * ge.transpose())),
    }
}

#[cfg(test)]
mod tests;
