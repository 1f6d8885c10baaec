//! Paths of symplectic forms `ω(t)` along a fixed surface.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientModel, ChartPoint};
use crate::error::Result;
use crate::immersion::SurfaceGrid;
use crate::numerics::matrix_field_partials;
use crate::potential::{
    flow_with_jacobian, killing_two_form, lie_derivative_2form, PotentialJet, TrigComponents,
    VectorField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// `ω + t dd^cψ`.
    LinearPotential,
    /// `ω + t dd^cψ + ½t² dd^cη`.
    GeneralPotential,
    /// `ω + t dβ`.
    ExactOneForm,
    /// `ω + t L_W ω`.
    KillingFlow,
    /// `Φ_t^* ω` for the flow `Φ_t` of `W`.
    FlowPullback,
}

impl PathMode {
    pub const ALL: [PathMode; 5] = [
        PathMode::LinearPotential,
        PathMode::GeneralPotential,
        PathMode::ExactOneForm,
        PathMode::KillingFlow,
        PathMode::FlowPullback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PathMode::LinearPotential => "linear-potential",
            PathMode::GeneralPotential => "general-potential",
            PathMode::ExactOneForm => "exact-one-form",
            PathMode::KillingFlow => "killing-flow",
            PathMode::FlowPullback => "flow-pullback",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        PathMode::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// A path `ω(t)` sampled at the surface nodes through its first two
/// derivatives at `t = 0`, plus an exact evaluator for `ω(t)`.
#[derive(Clone)]
pub struct VariationPath {
    pub mode: PathMode,
    /// `ω'(0)` at each node.
    pub first: Vec<DMatrix<f64>>,
    /// `ω''(0)` at each node; `None` for linear paths.
    pub second: Option<Vec<DMatrix<f64>>>,
    flow: Option<Arc<dyn VectorField>>,
}

impl std::fmt::Debug for VariationPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationPath")
            .field("mode", &self.mode)
            .field("nodes", &self.first.len())
            .field("second", &self.second.is_some())
            .finish()
    }
}

/// `L_W ω` in coordinates.
pub fn lie_derivative_of_omega(
    model: &dyn AmbientModel,
    w: &dyn VectorField,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    let p = ChartPoint::new(x.clone());
    lie_derivative_2form(
        &w.value(x),
        &w.jacobian(x),
        &model.omega(&p),
        &model.omega_partials(&p),
    )
}

impl VariationPath {
    /// The zero path `ω(t) ≡ ω`.
    pub fn zero(grid: &SurfaceGrid) -> Self {
        let d = grid.model().dim();
        VariationPath {
            mode: PathMode::LinearPotential,
            first: vec![DMatrix::zeros(d, d); grid.len()],
            second: None,
            flow: None,
        }
    }

    pub fn linear_potential(grid: &SurfaceGrid, psi: &PotentialJet) -> Self {
        VariationPath {
            mode: PathMode::LinearPotential,
            first: psi.ddc_forms(grid),
            second: None,
            flow: None,
        }
    }

    pub fn general_potential(grid: &SurfaceGrid, psi: &PotentialJet, eta: &PotentialJet) -> Self {
        VariationPath {
            mode: PathMode::GeneralPotential,
            first: psi.ddc_forms(grid),
            second: Some(eta.ddc_forms(grid)),
            flow: None,
        }
    }

    pub fn exact_one_form(grid: &SurfaceGrid, beta: &TrigComponents) -> Self {
        VariationPath {
            mode: PathMode::ExactOneForm,
            first: grid
                .nodes()
                .par_iter()
                .map(|n| beta.exterior_derivative(&n.point.coords))
                .collect(),
            second: None,
            flow: None,
        }
    }

    /// Linear path along `L_W ω`. In Kähler models the covariant and
    /// exterior-derivative evaluations are cross-checked.
    pub fn killing_flow(grid: &SurfaceGrid, w: Arc<dyn VectorField>) -> Result<Self> {
        let first = lie_forms(grid, w.as_ref())?;
        Ok(VariationPath {
            mode: PathMode::KillingFlow,
            first,
            second: None,
            flow: None,
        })
    }

    /// `Φ_t^* ω` with `ω'(0) = L_W ω` and `ω''(0) = L_W L_W ω`.
    pub fn flow_pullback(grid: &SurfaceGrid, w: Arc<dyn VectorField>) -> Result<Self> {
        let first = lie_forms(grid, w.as_ref())?;
        let model = grid.model().clone();
        let second = grid
            .nodes()
            .par_iter()
            .map(|n| {
                let x = &n.point.coords;
                let beta =
                    |y: &DVector<f64>| lie_derivative_of_omega(model.as_ref(), w.as_ref(), y);
                let h = 1e-4 * x.norm().max(1.0);
                let dbeta = matrix_field_partials(beta, x, h);
                lie_derivative_2form(&w.value(x), &w.jacobian(x), &first[n.index], &dbeta)
            })
            .collect();
        Ok(VariationPath {
            mode: PathMode::FlowPullback,
            first,
            second: Some(second),
            flow: Some(w),
        })
    }

    pub fn is_linear(&self) -> bool {
        self.second.is_none()
    }

    /// `ω(t)` at a node.
    pub fn form_at(&self, grid: &SurfaceGrid, node: usize, t: f64) -> DMatrix<f64> {
        let n = grid.node(node);
        match &self.flow {
            Some(w) => {
                let steps = ((t.abs() / 0.05).ceil() as usize).max(4);
                let (y, m) = flow_with_jacobian(w.as_ref(), &n.point.coords, t, steps);
                let omega = grid.model().omega(&ChartPoint::new(y));
                m.transpose() * omega * m
            }
            None => {
                let mut f = &n.tensors.omega + &self.first[node] * t;
                if let Some(s) = &self.second {
                    f += &s[node] * (0.5 * t * t);
                }
                f
            }
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(self.flow.is_none(), "flow paths are not rescaled");
        VariationPath {
            mode: self.mode,
            first: self.first.iter().map(|m| m * lambda).collect(),
            second: self
                .second
                .as_ref()
                .map(|s| s.iter().map(|m| m * (lambda * lambda)).collect()),
            flow: None,
        }
    }
}

fn lie_forms(grid: &SurfaceGrid, w: &dyn VectorField) -> Result<Vec<DMatrix<f64>>> {
    let model = grid.model().clone();
    if model.is_kahler() {
        return Ok(killing_two_form(grid, w)?.forms);
    }
    Ok(grid
        .nodes()
        .par_iter()
        .map(|n| lie_derivative_of_omega(model.as_ref(), w, &n.point.coords))
        .collect())
}
