//! Representative paths of each mode for a given surface.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::ambient::fubini_study::realify_complex_linear;
use crate::ambient::FubiniStudy;
use crate::error::Result;
use crate::immersion::SurfaceGrid;
use crate::potential::{
    analytic_potential_jet, killing_from_matrix, random_killing_spec, random_potential,
    ConstantField, LinearField, TrigComponents, VectorField,
};

use super::path::{PathMode, VariationPath};

/// Infinitesimal symmetry generating a deformation of `ω`: the `J`-rotation
/// of a random Killing field in `CP^N` and flat `Cⁿ`, a translation on tori.
pub fn random_symmetry<R: Rng>(grid: &SurfaceGrid, rng: &mut R) -> Result<Arc<dyn VectorField>> {
    let model = grid.model();
    let d = model.dim();
    if let Some(n) = model
        .id()
        .strip_prefix("cp")
        .and_then(|s| s.parse::<usize>().ok())
    {
        let fs = FubiniStudy::new(n)?;
        let v = killing_from_matrix(&random_killing_spec(n, 0.5, rng), &fs)?;
        return Ok(Arc::new(v.j_rotated()));
    }
    if model.periods().is_some() {
        return Ok(Arc::new(ConstantField(DVector::from_fn(d, |_, _| {
            rng.gen_range(-0.5..0.5)
        }))));
    }
    // J·(i H) x = −H x for Hermitian H
    let n = d / 2;
    let m = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
    });
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(Arc::new(LinearField(-realify_complex_linear(&h))))
}

/// A smooth non-isometric field: periodic on tori, `2π`-periodic
/// trigonometric components elsewhere.
pub fn random_isotopy<R: Rng>(grid: &SurfaceGrid, rng: &mut R) -> TrigComponents {
    let d = grid.model().dim();
    let periods = grid.model().periods().unwrap_or_else(|| vec![TAU; d]);
    TrigComponents::random(&periods, 0.05, rng)
}

/// A random path of the requested mode.
pub fn random_path<R: Rng>(
    grid: &SurfaceGrid,
    mode: PathMode,
    rng: &mut R,
) -> Result<VariationPath> {
    let model = grid.model().clone();
    let potential =
        |rng: &mut R| analytic_potential_jet(&random_potential(model.as_ref(), rng), grid);
    Ok(match mode {
        PathMode::LinearPotential => VariationPath::linear_potential(grid, &potential(rng)),
        PathMode::GeneralPotential => {
            let psi = potential(rng);
            let eta = potential(rng);
            VariationPath::general_potential(grid, &psi, &eta)
        }
        PathMode::ExactOneForm => VariationPath::exact_one_form(grid, &random_isotopy(grid, rng)),
        PathMode::KillingFlow => VariationPath::killing_flow(grid, random_symmetry(grid, rng)?)?,
        PathMode::FlowPullback => {
            let w: Arc<dyn VectorField> = if model.id().starts_with("cp") {
                random_symmetry(grid, rng)?
            } else {
                Arc::new(random_isotopy(grid, rng))
            };
            VariationPath::flow_pullback(grid, w)?
        }
    })
}
