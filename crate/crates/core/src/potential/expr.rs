//! Closed-form chart potentials with exact first and second derivatives.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::ambient::{AmbientModel, ScalarField};

/// `Σ c · Π x_a^{p_a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, Vec<u32>)>,
}

fn powi(x: f64, p: u32) -> f64 {
    if p == 0 {
        1.0
    } else {
        x.powi(p as i32)
    }
}

impl Polynomial {
    /// `Π x_a^{p_a}` with the factors at `skip` (up to two axes, possibly
    /// equal) differentiated once each.
    fn monomial(x: &DVector<f64>, p: &[u32], d: &[usize]) -> f64 {
        let mut out = 1.0;
        for (a, &pa) in p.iter().enumerate() {
            let k = d.iter().filter(|&&i| i == a).count() as u32;
            if k > pa {
                return 0.0;
            }
            let mut c = 1.0;
            for j in 0..k {
                c *= (pa - j) as f64;
            }
            out *= c * powi(x[a], pa - k);
        }
        out
    }
}

impl ScalarField for Polynomial {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(c, p)| c * Self::monomial(x, p, &[]))
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |a, _| {
            self.terms
                .iter()
                .map(|(c, p)| c * Self::monomial(x, p, &[a]))
                .sum()
        })
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.len(), x.len(), |a, b| {
            self.terms
                .iter()
                .map(|(c, p)| c * Self::monomial(x, p, &[a, b]))
                .sum()
        })
    }
}

/// `Σ c · cos(2π k·(x/P) + φ)`: a trigonometric polynomial, periodic with
/// periods `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub periods: Vec<f64>,
    pub terms: Vec<TrigTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub coeff: f64,
    pub freq: Vec<i32>,
    pub phase: f64,
}

impl TrigPolynomial {
    fn wave(&self, t: &TrigTerm) -> DVector<f64> {
        DVector::from_fn(self.periods.len(), |a, _| {
            TAU * t.freq[a] as f64 / self.periods[a]
        })
    }
}

impl ScalarField for TrigPolynomial {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * (self.wave(t).dot(x) + t.phase).cos())
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        for t in &self.terms {
            let w = self.wave(t);
            g -= &w * (t.coeff * (w.dot(x) + t.phase).sin());
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(x.len(), x.len());
        for t in &self.terms {
            let w = self.wave(t);
            h -= &w * w.transpose() * (t.coeff * (w.dot(x) + t.phase).cos());
        }
        h
    }
}

/// A smooth bump: periodic von Mises profile on tori, Gaussian otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: DVector<f64>,
    pub amplitude: f64,
    /// Concentration on tori, width `σ` otherwise.
    pub width: f64,
    pub periods: Option<Vec<f64>>,
}

impl Bump {
    /// `(f, ∂f/f, axis second-derivative factors)`.
    fn parts(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DVector<f64>) {
        let d = x.len();
        match &self.periods {
            Some(p) => {
                let kappa = self.width;
                let mut s = 0.0;
                let mut g = DVector::zeros(d);
                let mut diag = DVector::zeros(d);
                for a in 0..d {
                    let w = TAU / p[a];
                    let th = w * (x[a] - self.center[a]);
                    s += th.cos() - 1.0;
                    g[a] = -kappa * w * th.sin();
                    diag[a] = -kappa * w * w * th.cos();
                }
                (self.amplitude * (kappa * s).exp(), g, diag)
            }
            None => {
                let s2 = self.width * self.width;
                let r = x - &self.center;
                let f = self.amplitude * (-r.norm_squared() / (2.0 * s2)).exp();
                (f, -r / s2, DVector::from_element(d, -1.0 / s2))
            }
        }
    }
}

impl ScalarField for Bump {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.parts(x).0
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (f, g, _) = self.parts(x);
        g * f
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (f, g, diag) = self.parts(x);
        (&g * g.transpose() + DMatrix::from_diagonal(&diag)) * f
    }
}

/// A constant potential.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn value(&self, _x: &DVector<f64>) -> f64 {
        self.0
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// Any of the closed-form potentials.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialExpr {
    Constant(Constant),
    Polynomial(Polynomial),
    Trig(TrigPolynomial),
    Bump(Bump),
}

impl PotentialExpr {
    pub fn as_field(&self) -> &dyn ScalarField {
        match self {
            PotentialExpr::Constant(c) => c,
            PotentialExpr::Polynomial(p) => p,
            PotentialExpr::Trig(t) => t,
            PotentialExpr::Bump(b) => b,
        }
    }

    /// Multiplies the potential by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            PotentialExpr::Constant(c) => c.0 *= s,
            PotentialExpr::Polynomial(p) => p.terms.iter_mut().for_each(|t| t.0 *= s),
            PotentialExpr::Trig(t) => t.terms.iter_mut().for_each(|t| t.coeff *= s),
            PotentialExpr::Bump(b) => b.amplitude *= s,
        }
        out
    }
}

impl ScalarField for PotentialExpr {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.as_field().value(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.as_field().gradient(x)
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.as_field().hessian(x)
    }
}

/// A random low-degree potential suited to `model`.
///
/// On tori the potential must descend to the quotient, so the draw is a
/// trigonometric polynomial with frequencies in `{−2, …, 2}`; otherwise it
/// is an ordinary polynomial of total degree at most 3.
pub fn random_potential<R: Rng>(model: &dyn AmbientModel, rng: &mut R) -> PotentialExpr {
    let d = model.dim();
    match model.periods() {
        Some(periods) => {
            let terms = (0..6)
                .map(|_| {
                    let freq: Vec<i32> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
                    let k2: i32 = freq.iter().map(|k| k * k).sum();
                    TrigTerm {
                        coeff: rng.gen_range(-1.0..1.0) * 0.05 / (1.0 + k2 as f64),
                        freq,
                        phase: rng.gen_range(0.0..TAU),
                    }
                })
                .collect();
            PotentialExpr::Trig(TrigPolynomial { periods, terms })
        }
        None => {
            let terms = (0..8)
                .map(|_| {
                    let mut p = vec![0u32; d];
                    let degree = rng.gen_range(1..=3);
                    for _ in 0..degree {
                        p[rng.gen_range(0..d)] += 1;
                    }
                    (rng.gen_range(-1.0..1.0) * 0.05, p)
                })
                .collect();
            PotentialExpr::Polynomial(Polynomial { terms })
        }
    }
}

/// A random bump centred at a random chart point.
pub fn random_bump<R: Rng>(model: &dyn AmbientModel, rng: &mut R) -> PotentialExpr {
    let d = model.dim();
    let periods = model.periods();
    let center = DVector::from_fn(d, |a, _| match &periods {
        Some(p) => rng.gen_range(0.0..p[a]),
        None => rng.gen_range(-1.0..1.0),
    });
    PotentialExpr::Bump(Bump {
        center,
        amplitude: rng.gen_range(0.02..0.1),
        width: if periods.is_some() {
            rng.gen_range(0.5..2.0)
        } else {
            rng.gen_range(0.5..1.5)
        },
        periods,
    })
}
