//! Small numerical helpers shared across modules: deterministic summation,
//! finite-difference steps and derivative stencils.

use nalgebra::{DMatrix, DVector};

/// Pairwise (cascade) summation in fixed index order.
///
/// The split points depend only on the length, so the result is bit-for-bit
/// reproducible for a given input slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Central-difference step for derived ambient tensors.
pub fn fd_step(x: &DVector<f64>) -> f64 {
    (1e-5 * x.norm()).max(1e-5)
}

/// First and second derivatives at `0` from samples at `-2h, -h, 0, h, 2h`.
pub fn five_point(samples: [f64; 5], h: f64) -> (f64, f64) {
    let [m2, m1, z, p1, p2] = samples;
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// First and second derivatives at `0` from samples at `-h, 0, h`.
pub fn three_point(samples: [f64; 3], h: f64) -> (f64, f64) {
    let [m1, z, p1] = samples;
    ((p1 - m1) / (2.0 * h), (p1 - 2.0 * z + m1) / (h * h))
}

/// Central difference of a matrix-valued field along every coordinate axis.
///
/// Entry `c` of the result approximates `∂_c M(x)`.
pub fn matrix_field_partials<F>(field: F, x: &DVector<f64>, h: f64) -> Vec<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    (0..x.len())
        .map(|c| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            (field(&xp) - field(&xm)) / (2.0 * h)
        })
        .collect()
}

/// Symmetric part of a square matrix.
pub fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of `a` relative to the SPD matrix `b`,
/// i.e. `min_{x≠0} xᵀ a x / xᵀ b x` for symmetric `a`.
pub fn min_generalized_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<f64> {
    let chol = b.clone().cholesky()?;
    let l_inv = chol.l().try_inverse()?;
    let c = &l_inv * sym(a) * l_inv.transpose();
    let eig = c.symmetric_eigenvalues();
    eig.iter().cloned().reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_for_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        // quartic: five-point stencil is exact for first derivatives up to degree 4
        let f = |t: f64| 1.0 + 2.0 * t - 3.0 * t * t + 0.5 * t.powi(3) + 0.25 * t.powi(4);
        let h = 0.1;
        let s = [f(-2.0 * h), f(-h), f(0.0), f(h), f(2.0 * h)];
        let (d1, d2) = five_point(s, h);
        assert!((d1 - 2.0).abs() < 1e-12);
        assert!((d2 + 6.0).abs() < 1e-10);
    }

    #[test]
    fn generalized_eigenvalue_of_scaled_identity() {
        let b = DMatrix::<f64>::identity(3, 3) * 2.0;
        let a = DMatrix::<f64>::identity(3, 3) * 3.0;
        let m = min_generalized_eigenvalue(&a, &b).unwrap();
        assert!((m - 1.5).abs() < 1e-14);
    }
}
