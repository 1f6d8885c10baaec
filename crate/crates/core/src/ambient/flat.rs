use nalgebra::DMatrix;

use super::{AmbientModel, ChartPoint, Christoffel};

/// Standard `(ω₀, J₀)` on `Cⁿ`, optionally viewed as the unit torus
/// `Cⁿ / Z²ⁿ`.
#[derive(Debug, Clone)]
pub struct Flat {
    n: usize,
    periodic: bool,
    id: String,
}

impl Flat {
    pub fn euclidean(n: usize) -> Self {
        Flat {
            n,
            periodic: false,
            id: format!("flat-c{n}"),
        }
    }

    /// `Cⁿ / Z²ⁿ`; `torus(2)` is the unit `T⁴`.
    pub fn torus(n: usize) -> Self {
        Flat {
            n,
            periodic: true,
            id: format!("flat-t{}", 2 * n),
        }
    }
}

/// `ω₀ = Σ dx_j ∧ dy_j` in interleaved coordinates.
pub fn standard_omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        w[(2 * j, 2 * j + 1)] = 1.0;
        w[(2 * j + 1, 2 * j)] = -1.0;
    }
    w
}

/// `J₀ ∂x_j = ∂y_j`, `J₀ ∂y_j = −∂x_j`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

impl AmbientModel for Flat {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        2 * self.n
    }

    fn periods(&self) -> Option<Vec<f64>> {
        self.periodic.then(|| vec![1.0; 2 * self.n])
    }

    fn is_kahler(&self) -> bool {
        true
    }

    fn omega(&self, _p: &ChartPoint) -> DMatrix<f64> {
        standard_omega(self.n)
    }

    fn complex_structure(&self, _p: &ChartPoint) -> DMatrix<f64> {
        standard_j(self.n)
    }

    fn metric(&self, _p: &ChartPoint) -> DMatrix<f64> {
        DMatrix::identity(2 * self.n, 2 * self.n)
    }

    fn metric_partials(&self, _p: &ChartPoint) -> Option<Vec<DMatrix<f64>>> {
        Some(vec![DMatrix::zeros(2 * self.n, 2 * self.n); 2 * self.n])
    }

    fn j_partials(&self, _p: &ChartPoint) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(2 * self.n, 2 * self.n); 2 * self.n]
    }

    fn omega_partials(&self, _p: &ChartPoint) -> Vec<DMatrix<f64>> {
        self.j_partials(_p)
    }

    fn christoffel(&self, _p: &ChartPoint) -> Christoffel {
        Christoffel::zeros(2 * self.n)
    }

    fn nabla_j(&self, p: &ChartPoint) -> Vec<DMatrix<f64>> {
        self.j_partials(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::metric_from_pair;

    #[test]
    fn standard_pair_is_compatible() {
        let j = standard_j(3);
        let w = standard_omega(3);
        let id = DMatrix::<f64>::identity(6, 6);
        assert_eq!(&j * &j, -&id);
        assert_eq!(metric_from_pair(&w, &j).matrix, id);
        // ω(JX, JY) = ω(X, Y)
        assert_eq!(j.transpose() * &w * &j, w);
    }

    #[test]
    fn torus_periods() {
        assert_eq!(Flat::torus(2).periods(), Some(vec![1.0; 4]));
        assert_eq!(Flat::euclidean(2).periods(), None);
    }
}
