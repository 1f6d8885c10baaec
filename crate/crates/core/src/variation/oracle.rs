//! Independent finite-difference oracle: recompute the metric of `ω(t)`,
//! re-quadrature the area and difference in `t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersion::SurfaceGrid;
use crate::numerics::{five_point, min_generalized_eigenvalue, pairwise_sum, sym};

use super::path::VariationPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSettings {
    /// Requested stencil step.
    pub dt: f64,
    /// Largest `|t|` probed when locating the taming range.
    pub t_probe: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            dt: 1e-3,
            t_probe: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub t_max: f64,
    /// Stencil step actually used.
    pub dt: f64,
    pub richardson: bool,
    /// `(t, A(t))` at the stencil points.
    pub samples: Vec<(f64, f64)>,
    pub a_prime: f64,
    pub a_second: f64,
    /// Round-off bound on `a_prime` from the area quadrature.
    pub noise_a_prime: f64,
    /// Round-off bound on `a_second` from the area quadrature.
    pub noise_a_second: f64,
}

/// Smallest eigenvalue of `sym(Ω(t) J)` relative to the base metric over all
/// nodes; positive iff `ω(t)` tames `J` along the surface.
pub fn taming_margin_at(grid: &SurfaceGrid, path: &VariationPath, t: f64) -> f64 {
    let margins: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|n| {
            let g = sym(&(path.form_at(grid, n.index, t) * &n.tensors.j));
            min_generalized_eigenvalue(&g, &n.tensors.metric).unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    margins.into_iter().fold(f64::INFINITY, f64::min)
}

/// Half the largest probed `t` (halving from `t_probe`) at which both
/// `ω(±t)` tame `J` on every node.
pub fn t_max(grid: &SurfaceGrid, path: &VariationPath, t_probe: f64) -> Result<f64> {
    let mut t = t_probe;
    for _ in 0..48 {
        let m = taming_margin_at(grid, path, t).min(taming_margin_at(grid, path, -t));
        if m > 0.0 {
            return Ok(0.5 * t);
        }
        t *= 0.5;
    }
    Err(Error::TamingViolation {
        t,
        margin: taming_margin_at(grid, path, t),
    })
}

/// Area of the surface for `ω(t)`, with `g_t = sym(Ω(t) J)`.
pub fn area_at(grid: &SurfaceGrid, path: &VariationPath, t: f64) -> Result<f64> {
    let dmu: Vec<Result<f64>> = grid
        .nodes()
        .par_iter()
        .map(|n| {
            let form = path.form_at(grid, n.index, t);
            let g = sym(&(form * &n.tensors.j));
            let gf: Vec<_> = n.tangents.iter().map(|f| &g * f).collect();
            let g11 = n.tangents[0].dot(&gf[0]);
            let g12 = n.tangents[0].dot(&gf[1]);
            let g22 = n.tangents[1].dot(&gf[1]);
            let det = g11 * g22 - g12 * g12;
            if !(det > 0.0 && g11 > 0.0) {
                return Err(Error::TamingViolation { t, margin: det });
            }
            Ok(det.sqrt())
        })
        .collect();
    let dmu = dmu.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(grid.weight() * pairwise_sum(&dmu))
}

/// `A(t)` over `ts`, stopping at the first taming violation.
pub fn area_samples(
    grid: &SurfaceGrid,
    path: &VariationPath,
    ts: &[f64],
) -> (Vec<(f64, f64)>, Option<Error>) {
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        match area_at(grid, path, t) {
            Ok(a) => out.push((t, a)),
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

fn stencil(grid: &SurfaceGrid, path: &VariationPath, h: f64) -> Result<[f64; 5]> {
    let mut s = [0.0; 5];
    for (k, v) in s.iter_mut().enumerate() {
        *v = area_at(grid, path, (k as f64 - 2.0) * h)?;
    }
    Ok(s)
}

/// Five-point central differences of `A(t)` at `t = 0`.
///
/// The step is `min(dt, t_max/2)` so the stencil stays inside the taming
/// range; when that clips the requested step the estimate is Richardson
/// extrapolated from steps `h` and `h/2`.
pub fn area_path_oracle(
    grid: &SurfaceGrid,
    path: &VariationPath,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    if !(settings.dt > 0.0 && settings.dt.is_finite()) {
        return Err(Error::invalid("oracle step must be positive"));
    }
    let tm = t_max(grid, path, settings.t_probe)?;
    let h = settings.dt.min(0.5 * tm);
    let s = stencil(grid, path, h)?;
    let (mut a1, mut a2) = five_point(s, h);
    let mut samples: Vec<(f64, f64)> = (0..5).map(|k| ((k as f64 - 2.0) * h, s[k])).collect();
    let richardson = h < settings.dt;
    if richardson {
        let s2 = stencil(grid, path, 0.5 * h)?;
        let (b1, b2) = five_point(s2, 0.5 * h);
        a1 = (16.0 * b1 - a1) / 15.0;
        a2 = (16.0 * b2 - a2) / 15.0;
        samples.extend((0..5).map(|k| ((k as f64 - 2.0) * 0.5 * h, s2[k])));
    }
    let eps_a = 64.0 * f64::EPSILON * s[2].abs().max(1.0);
    Ok(OracleResult {
        t_max: tm,
        dt: h,
        richardson,
        samples,
        a_prime: a1,
        a_second: a2,
        noise_a_prime: 1.5 * eps_a / h,
        noise_a_second: (64.0 / 12.0) * eps_a / (h * h),
    })
}
