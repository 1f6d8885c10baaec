//! Built-in closed surfaces, all expressed as affine-plus-Fourier maps.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::ParamSurface;
use crate::ambient::AmbientModel;
use crate::error::{Error, Result};

/// One term `coeff · cos(2π(m u₁/L₁ + n u₂/L₂) + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTerm {
    pub coeff: DVector<f64>,
    pub m: i32,
    pub n: i32,
    pub phase: f64,
}

/// `F(u) = base + u₁ a + u₂ b + Σ_k coeff_k cos(θ_k(u))` on `[0,L₁)×[0,L₂)`.
///
/// The affine part must close up modulo the ambient lattice; on
/// non-periodic ambients it must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSurface {
    pub id: String,
    pub domain: [f64; 2],
    pub base: DVector<f64>,
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub terms: Vec<FourierTerm>,
}

impl FourierSurface {
    fn angle(&self, t: &FourierTerm, u: [f64; 2]) -> (f64, f64, f64) {
        let k1 = TAU * t.m as f64 / self.domain[0];
        let k2 = TAU * t.n as f64 / self.domain[1];
        (k1 * u[0] + k2 * u[1] + t.phase, k1, k2)
    }

    /// Checks dimensions and that the map closes up in `model`.
    pub fn check_closed(&self, model: &dyn AmbientModel) -> Result<()> {
        let d = model.dim();
        let dims_ok = self.base.len() == d
            && self.a.len() == d
            && self.b.len() == d
            && self.terms.iter().all(|t| t.coeff.len() == d);
        if !dims_ok {
            return Err(Error::invalid(format!(
                "surface `{}` does not match ambient dimension {d}",
                self.id
            )));
        }
        if !(self.domain[0] > 0.0 && self.domain[1] > 0.0) {
            return Err(Error::invalid("surface domain periods must be positive"));
        }
        match model.periods() {
            None => {
                if self.a.norm() + self.b.norm() > 0.0 {
                    return Err(Error::invalid(format!(
                        "surface `{}` has an affine part in non-periodic ambient `{}`",
                        self.id,
                        model.id()
                    )));
                }
            }
            Some(periods) => {
                for (v, l) in [(&self.a, self.domain[0]), (&self.b, self.domain[1])] {
                    for (c, p) in v.iter().zip(&periods) {
                        let k = c * l / p;
                        if (k - k.round()).abs() > 1e-9 {
                            return Err(Error::invalid(format!(
                                "surface `{}` does not close up in the lattice of `{}`",
                                self.id,
                                model.id()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl ParamSurface for FourierSurface {
    fn id(&self) -> &str {
        &self.id
    }

    fn domain(&self) -> [f64; 2] {
        self.domain
    }

    fn eval(&self, u: [f64; 2]) -> DVector<f64> {
        let mut x = &self.base + &self.a * u[0] + &self.b * u[1];
        for t in &self.terms {
            let (th, _, _) = self.angle(t, u);
            x += &t.coeff * th.cos();
        }
        x
    }

    fn jacobian(&self, u: [f64; 2]) -> DMatrix<f64> {
        let mut f1 = self.a.clone();
        let mut f2 = self.b.clone();
        for t in &self.terms {
            let (th, k1, k2) = self.angle(t, u);
            let s = th.sin();
            f1 -= &t.coeff * (k1 * s);
            f2 -= &t.coeff * (k2 * s);
        }
        DMatrix::from_columns(&[f1, f2])
    }

    fn second(&self, u: [f64; 2]) -> Option<[DVector<f64>; 3]> {
        let d = self.base.len();
        let mut out = [DVector::zeros(d), DVector::zeros(d), DVector::zeros(d)];
        for t in &self.terms {
            let (th, k1, k2) = self.angle(t, u);
            let c = th.cos();
            out[0] -= &t.coeff * (k1 * k1 * c);
            out[1] -= &t.coeff * (k1 * k2 * c);
            out[2] -= &t.coeff * (k2 * k2 * c);
        }
        Some(out)
    }
}

fn vec4(v: [f64; 4]) -> DVector<f64> {
    DVector::from_column_slice(&v)
}

fn term(coeff: [f64; 4], m: i32, n: i32, phase: f64) -> FourierTerm {
    FourierTerm {
        coeff: vec4(coeff),
        m,
        n,
        phase,
    }
}

/// Amplitude of the `t4-perturbed` bump along `∂y₂`.
pub const PERTURBATION: f64 = 0.05;

/// Identifiers of the built-in surfaces.
pub const CATALOG: [&str; 5] = [
    "t4-holomorphic",
    "t4-tilted-3-4-5",
    "t4-perturbed",
    "c2-circle-product",
    "cp2-clifford",
];

/// A built-in surface and the ambient it is designed for.
pub fn surface_by_id(id: &str) -> Result<(FourierSurface, &'static str)> {
    let zero = vec4([0.0; 4]);
    let tilted = |id: &str, terms: Vec<FourierTerm>| FourierSurface {
        id: id.to_string(),
        domain: [1.0, 5.0],
        base: zero.clone(),
        a: vec4([1.0, 0.0, 0.0, 0.0]),
        b: vec4([0.0, 0.6, 0.8, 0.0]),
        terms,
    };
    let s = match id {
        "t4-holomorphic" => (
            FourierSurface {
                id: id.to_string(),
                domain: [1.0, 1.0],
                base: zero.clone(),
                a: vec4([1.0, 0.0, 0.0, 0.0]),
                b: vec4([0.0, 1.0, 0.0, 0.0]),
                terms: vec![],
            },
            "flat-t4",
        ),
        "t4-tilted-3-4-5" => (tilted(id, vec![]), "flat-t4"),
        "t4-perturbed" => {
            // ε sin(2πu₁) sin(2πu₂/5) = ε/2 [cos(θ₁ − θ₂) − cos(θ₁ + θ₂)]
            let e = 0.5 * PERTURBATION;
            (
                tilted(
                    id,
                    vec![
                        term([0.0, 0.0, 0.0, e], 1, -1, 0.0),
                        term([0.0, 0.0, 0.0, -e], 1, 1, 0.0),
                    ],
                ),
                "flat-t4",
            )
        }
        "c2-circle-product" => (
            FourierSurface {
                id: id.to_string(),
                domain: [TAU, TAU],
                base: zero.clone(),
                a: zero.clone(),
                b: zero.clone(),
                terms: vec![
                    term([FRAC_1_SQRT_2, 0.0, 0.0, 0.0], 1, 0, 0.0),
                    term([0.0, FRAC_1_SQRT_2, 0.0, 0.0], 1, 0, -FRAC_PI_2),
                    term([0.0, 0.0, FRAC_1_SQRT_2, 0.0], 0, 1, 0.0),
                    term([0.0, 0.0, 0.0, FRAC_1_SQRT_2], 0, 1, -FRAC_PI_2),
                ],
            },
            "flat-c2",
        ),
        "cp2-clifford" => (
            // [e^{iu₁} : e^{iu₂} : 1] in U₀: z₁ = e^{i(u₂−u₁)}, z₂ = e^{−iu₁}
            FourierSurface {
                id: id.to_string(),
                domain: [TAU, TAU],
                base: zero.clone(),
                a: zero.clone(),
                b: zero.clone(),
                terms: vec![
                    term([1.0, 0.0, 0.0, 0.0], -1, 1, 0.0),
                    term([0.0, 1.0, 0.0, 0.0], -1, 1, -FRAC_PI_2),
                    term([0.0, 0.0, 1.0, 0.0], -1, 0, 0.0),
                    term([0.0, 0.0, 0.0, 1.0], -1, 0, -FRAC_PI_2),
                ],
            },
            "cp2",
        ),
        _ => return Err(Error::UnknownId(id.to_string())),
    };
    Ok(s)
}

/// Shared handle to a built-in surface.
pub fn catalog_surface(id: &str) -> Result<Arc<dyn ParamSurface>> {
    Ok(Arc::new(surface_by_id(id)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::ambient_by_id;

    #[test]
    fn catalog_surfaces_close_up() {
        for id in CATALOG {
            let (s, amb) = surface_by_id(id).unwrap();
            s.check_closed(ambient_by_id(amb).unwrap().as_ref())
                .unwrap();
        }
        let (s, _) = surface_by_id("t4-tilted-3-4-5").unwrap();
        assert!(s
            .check_closed(ambient_by_id("flat-c2").unwrap().as_ref())
            .is_err());
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let h = 1e-5;
        for id in CATALOG {
            let s = surface_by_id(id).unwrap().0;
            let u = [0.37, 1.21];
            let jac = s.jacobian(u);
            let sec = s.second(u).unwrap();
            for k in 0..2 {
                let mut up = u;
                let mut um = u;
                up[k] += h;
                um[k] -= h;
                let fd = (s.eval(up) - s.eval(um)) / (2.0 * h);
                assert!((fd - jac.column(k)).norm() < 1e-8, "{id}");
                let fd2 = (s.jacobian(up) - s.jacobian(um)) / (2.0 * h);
                let (i11, i12) = if k == 0 { (0, 1) } else { (1, 2) };
                assert!((fd2.column(0) - &sec[i11]).norm() < 1e-7, "{id}");
                assert!((fd2.column(1) - &sec[i12]).norm() < 1e-7, "{id}");
            }
        }
    }

    #[test]
    fn clifford_matches_homogeneous_description() {
        let s = surface_by_id("cp2-clifford").unwrap().0;
        let u = [0.4, 2.2];
        let x = s.eval(u);
        let z1 = num_complex::Complex64::from_polar(1.0, u[1] - u[0]);
        let z2 = num_complex::Complex64::from_polar(1.0, -u[0]);
        assert!((x[0] - z1.re).abs() + (x[1] - z1.im).abs() < 1e-14);
        assert!((x[2] - z2.re).abs() + (x[3] - z2.im).abs() < 1e-14);
    }
}
