//! `CP^N` with the Fubini–Study structure in the affine chart
//! `U₀ = {Z₀ ≠ 0}`, `z_j = Z_j / Z₀`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::flat::standard_j;
use super::{AmbientModel, ChartPoint, Christoffel};
use crate::error::{Error, Result};

/// Fubini–Study model of `CP^N` on the chart `U₀`.
///
/// The Kähler potential is `log(1 + |z|²)`, scaled so that the real metric
/// at the chart origin is the identity.
#[derive(Debug, Clone)]
pub struct FubiniStudy {
    n: usize,
    id: String,
}

fn complex_coords(x: &DVector<f64>) -> Vec<Complex64> {
    (0..x.len() / 2)
        .map(|j| Complex64::new(x[2 * j], x[2 * j + 1]))
        .collect()
}

/// Real matrix of a Hermitian form `h`: `g(∂x_j, ∂x_k) = Re h_{jk}`,
/// `g(∂x_j, ∂y_k) = Im h_{jk}`.
fn realify_hermitian(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let v = h[(j, k)];
            g[(2 * j, 2 * k)] = v.re;
            g[(2 * j, 2 * k + 1)] = v.im;
            g[(2 * j + 1, 2 * k)] = -v.im;
            g[(2 * j + 1, 2 * k + 1)] = v.re;
        }
    }
    g
}

/// Real `2N×2N` matrix of the complex-linear map with matrix `c`.
pub fn realify_complex_linear(c: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, k) = c.shape();
    let mut m = DMatrix::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let v = c[(i, j)];
            m[(2 * i, 2 * j)] = v.re;
            m[(2 * i, 2 * j + 1)] = -v.im;
            m[(2 * i + 1, 2 * j)] = v.im;
            m[(2 * i + 1, 2 * j + 1)] = v.re;
        }
    }
    m
}

impl FubiniStudy {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("CP^N needs N >= 1"));
        }
        let model = FubiniStudy {
            n,
            id: format!("cp{n}"),
        };
        let g0 = model.metric(&ChartPoint::new(DVector::zeros(2 * n)));
        assert!(
            (g0 - DMatrix::<f64>::identity(2 * n, 2 * n)).norm() < 1e-14,
            "Fubini–Study normalization"
        );
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `h_{jk} = δ_{jk}/s − z̄_j z_k / s²`, `s = 1 + |z|²`.
    fn hermitian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let s = 1.0 + z.iter().map(|v| v.norm_sqr()).sum::<f64>();
        DMatrix::from_fn(self.n, self.n, |j, k| {
            let d = if j == k { 1.0 / s } else { 0.0 };
            Complex64::new(d, 0.0) - z[j].conj() * z[k] / (s * s)
        })
    }

    /// Chart point of the homogeneous vector `Z`.
    pub fn from_homogeneous(&self, z: &[Complex64]) -> Result<ChartPoint> {
        if z.len() != self.n + 1 {
            return Err(Error::invalid("homogeneous vector has wrong length"));
        }
        let scale = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(z[0].norm() > 1e-12 * scale) {
            return Err(Error::OutsideChart);
        }
        let mut x = DVector::zeros(2 * self.n);
        for j in 0..self.n {
            let w = z[j + 1] / z[0];
            x[2 * j] = w.re;
            x[2 * j + 1] = w.im;
        }
        Ok(ChartPoint::new(x))
    }

    /// Homogeneous vector `(1, z₁, …, z_N)`.
    pub fn to_homogeneous(&self, p: &ChartPoint) -> Vec<Complex64> {
        let mut z = vec![Complex64::new(1.0, 0.0)];
        z.extend(complex_coords(&p.coords));
        z
    }
}

impl AmbientModel for FubiniStudy {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        2 * self.n
    }

    fn is_kahler(&self) -> bool {
        true
    }

    fn omega(&self, p: &ChartPoint) -> DMatrix<f64> {
        // ω(X, Y) = ḡ(JX, Y), i.e. Ω = −G J
        -self.metric(p) * standard_j(self.n)
    }

    fn complex_structure(&self, _p: &ChartPoint) -> DMatrix<f64> {
        standard_j(self.n)
    }

    fn metric(&self, p: &ChartPoint) -> DMatrix<f64> {
        realify_hermitian(&self.hermitian(&complex_coords(&p.coords)))
    }

    fn metric_partials(&self, p: &ChartPoint) -> Option<Vec<DMatrix<f64>>> {
        let z = complex_coords(&p.coords);
        let n = self.n;
        let s = 1.0 + z.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let i = Complex64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(2 * n);
        for m in 0..n {
            for imag in [false, true] {
                // ∂s and ∂(z̄_j z_k) along x_m or y_m
                let ds = 2.0 * if imag { z[m].im } else { z[m].re };
                let dh = DMatrix::from_fn(n, n, |j, k| {
                    let mut dprod = Complex64::new(0.0, 0.0);
                    if j == m {
                        dprod += if imag { -i * z[k] } else { z[k] };
                    }
                    if k == m {
                        dprod += if imag { i * z[j].conj() } else { z[j].conj() };
                    }
                    let delta = if j == k { 1.0 } else { 0.0 };
                    Complex64::new(-delta * ds / (s * s), 0.0) - dprod / (s * s)
                        + z[j].conj() * z[k] * (2.0 * ds / (s * s * s))
                });
                out.push(realify_hermitian(&dh));
            }
        }
        Some(out)
    }

    fn omega_partials(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        let j = standard_j(self.n);
        self.metric_partials(p)
            .expect("analytic partials")
            .into_iter()
            .map(|dg| -dg * &j)
            .collect()
    }

    fn j_partials(&self, _p: &ChartPoint) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(2 * self.n, 2 * self.n); 2 * self.n]
    }

    fn nabla_j(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        self.j_partials(p)
    }

    fn christoffel(&self, p: &ChartPoint) -> Christoffel {
        let dg = self.metric_partials(p).expect("analytic partials");
        Christoffel::from_metric(&self.metric(p), &dg)
    }
}

/// A unitary change of homogeneous coordinates, `Z ↦ U Z`, viewed as a
/// holomorphic isometry of the chart `U₀` (where defined).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartAutomorphism {
    pub unitary: DMatrix<Complex64>,
}

impl ChartAutomorphism {
    pub fn identity(n: usize) -> Self {
        ChartAutomorphism {
            unitary: DMatrix::identity(n + 1, n + 1),
        }
    }

    pub fn inverse(&self) -> Self {
        ChartAutomorphism {
            unitary: self.unitary.adjoint(),
        }
    }

    pub fn apply_homogeneous(&self, z: &[Complex64]) -> Vec<Complex64> {
        let v = &self.unitary * DVector::from_column_slice(z);
        v.iter().cloned().collect()
    }

    /// Image of a chart point; fails if the image leaves `U₀`.
    pub fn apply(&self, model: &FubiniStudy, p: &ChartPoint) -> Result<ChartPoint> {
        model.from_homogeneous(&self.apply_homogeneous(&model.to_homogeneous(p)))
    }

    /// `∂w_i/∂z_j = U_{ij}/W₀ − W_i U_{0j}/W₀²` with `W = U(1, z)`.
    pub fn complex_jacobian(&self, model: &FubiniStudy, p: &ChartPoint) -> DMatrix<Complex64> {
        let n = model.n();
        let w = self.apply_homogeneous(&model.to_homogeneous(p));
        let u = &self.unitary;
        DMatrix::from_fn(n, n, |i, j| {
            u[(i + 1, j + 1)] / w[0] - w[i + 1] * u[(0, j + 1)] / (w[0] * w[0])
        })
    }

    pub fn real_jacobian(&self, model: &FubiniStudy, p: &ChartPoint) -> DMatrix<f64> {
        realify_complex_linear(&self.complex_jacobian(model, p))
    }
}

/// Unitary taking the homogeneous point `q` to `[1:0:⋯:0]`.
///
/// Built from a Householder reflection `I − 2vv†/|v|²` with
/// `v = q̂ − e^{iθ}e₀`, `q̂₀ = |q̂₀|e^{iθ}`, followed by the phase `e^{−iθ}`.
pub fn normalize_homogeneous(q: &[Complex64]) -> ChartAutomorphism {
    let m = q.len();
    let norm = q.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let qh: Vec<Complex64> = q.iter().map(|v| v / norm).collect();
    let phase = if qh[0].norm() > 0.0 {
        qh[0] / qh[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut v = DVector::from_column_slice(&qh);
    v[0] -= phase;
    let vv = v.norm_squared();
    let mut u = DMatrix::<Complex64>::identity(m, m);
    if vv > 1e-30 {
        u -= (&v * v.adjoint()) * Complex64::new(2.0 / vv, 0.0);
    }
    ChartAutomorphism {
        unitary: u * phase.conj(),
    }
}

/// Unitary automorphism moving the chart point `q` to the origin.
pub fn normalize_at(model: &FubiniStudy, q: &ChartPoint) -> ChartAutomorphism {
    normalize_homogeneous(&model.to_homogeneous(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::calculus::exterior_derivative_2form_max;
    use crate::ambient::fd_christoffel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> ChartPoint {
        ChartPoint::new(DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.5..1.5)))
    }

    #[test]
    fn metric_is_identity_at_origin() {
        for n in 1..=3 {
            let m = FubiniStudy::new(n).unwrap();
            let g = m.metric(&ChartPoint::new(DVector::zeros(2 * n)));
            assert!((g - DMatrix::<f64>::identity(2 * n, 2 * n)).norm() < 1e-15);
        }
        assert!(FubiniStudy::new(0).is_err());
    }

    #[test]
    fn omega_is_closed_and_compatible() {
        let m = FubiniStudy::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_point(&mut rng, 2);
            let dw = exterior_derivative_2form_max(
                |x| m.omega(&ChartPoint::new(x.clone())),
                &p.coords,
                1e-4,
            );
            assert!(dw < 1e-6, "dω = {dw}");
            let w = m.omega(&p);
            assert!((&w + w.transpose()).norm() == 0.0);
            let j = m.complex_structure(&p);
            assert!((j.transpose() * &w * &j - &w).norm() < 1e-14);
        }
    }

    #[test]
    fn analytic_christoffels_match_finite_differences() {
        let m = FubiniStudy::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_point(&mut rng, 2);
            let diff = m.christoffel(&p).max_abs_diff(&fd_christoffel(&m, &p));
            assert!(diff < 1e-6, "Christoffel mismatch {diff}");
        }
    }

    #[test]
    fn constant_j_is_parallel() {
        // ∇J = 0 for the analytic connection: ΓJ − JΓ vanishes
        let m = FubiniStudy::new(2).unwrap();
        let p = ChartPoint::from_slice(&[0.3, -0.4, 0.8, 0.1]);
        let derived = crate::ambient::derived_nabla_j(
            &m.complex_structure(&p),
            &m.j_partials(&p),
            &m.christoffel(&p),
        );
        for d in derived {
            assert!(d.norm() < 1e-13);
        }
    }

    #[test]
    fn normalize_trivial_cases() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let id = normalize_homogeneous(&[one, zero, zero]);
        assert!((id.unitary - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-15);
        let swap = normalize_homogeneous(&[zero, one, zero]);
        let expected =
            DMatrix::from_row_slice(3, 3, &[zero, one, zero, one, zero, zero, zero, zero, one]);
        assert!((swap.unitary - expected).norm() < 1e-15);
    }

    #[test]
    fn normalize_moves_point_to_origin_isometrically() {
        let m = FubiniStudy::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q = random_point(&mut rng, 2);
            let a = normalize_at(&m, &q);
            let u = &a.unitary;
            assert!((u.adjoint() * u - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-13);
            let image = a.apply(&m, &q).unwrap();
            assert!(image.coords.norm() < 1e-12);
            // pulled-back metric at q equals the pushed identity at the origin
            let jac = a.real_jacobian(&m, &q);
            let pulled = jac.transpose() * m.metric(&image) * &jac;
            assert!((pulled - m.metric(&q)).norm() < 1e-10);
            let pushed_j = &jac * m.complex_structure(&q) * jac.clone().try_inverse().unwrap();
            assert!((pushed_j - m.complex_structure(&image)).norm() < 1e-10);
        }
    }

    #[test]
    fn leaving_the_chart_is_an_error() {
        let m = FubiniStudy::new(1).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(m.from_homogeneous(&[zero, one]), Err(Error::OutsideChart));
    }
}
