//! Closed parametrized surfaces in a model ambient space and their cached
//! geometry on a periodic quadrature grid.

mod catalog;
mod frame;

use std::f64::consts::TAU;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::ambient::{AmbientModel, AmbientTensors, ChartPoint, Connection};
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

pub use catalog::{
    catalog_surface, surface_by_id, FourierSurface, FourierTerm, CATALOG, PERTURBATION,
};
pub use frame::{block_form, AdaptedFrame, DEGENERACY_TAU};

/// A smooth map from the periodic rectangle `[0,L₁)×[0,L₂)` into a chart.
pub trait ParamSurface: Send + Sync + Debug {
    fn id(&self) -> &str;

    /// Periods `(L₁, L₂)`.
    fn domain(&self) -> [f64; 2];

    fn eval(&self, u: [f64; 2]) -> DVector<f64>;

    /// `2n × 2` matrix with columns `F_{u₁}`, `F_{u₂}`.
    fn jacobian(&self, u: [f64; 2]) -> DMatrix<f64>;

    /// Analytic `(F_{11}, F_{12}, F_{22})`, if available.
    fn second(&self, _u: [f64; 2]) -> Option<[DVector<f64>; 3]> {
        None
    }
}

/// `(F_{11}, F_{12}, F_{22})`, by central differences of the Jacobian at
/// step `1e-5·L` when no analytic version exists.
pub fn second_derivatives(s: &dyn ParamSurface, u: [f64; 2]) -> [DVector<f64>; 3] {
    if let Some(sec) = s.second(u) {
        return sec;
    }
    let l = s.domain();
    let partial = |k: usize| {
        let h = 1e-5 * l[k];
        let mut up = u;
        let mut um = u;
        up[k] += h;
        um[k] -= h;
        (s.jacobian(up) - s.jacobian(um)) / (2.0 * h)
    };
    let d1 = partial(0);
    let d2 = partial(1);
    let f12 = (d1.column(1) + d2.column(0)) * 0.5;
    [d1.column(0).into_owned(), f12, d2.column(1).into_owned()]
}

/// Normal components `h^σ_{ij}` of the second fundamental form in the
/// adapted frame; entry `k` belongs to the normal `e_{k+3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    pub h: Vec<Matrix2<f64>>,
}

impl SecondFundamentalForm {
    pub fn h3(&self) -> &Matrix2<f64> {
        &self.h[0]
    }

    pub fn h4(&self) -> &Matrix2<f64> {
        &self.h[1]
    }
}

/// 2-jet of a function on the surface at one node, in the adapted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFunctionJet {
    pub node: usize,
    pub value: f64,
    /// `(e₁f, e₂f)`.
    pub grad: Vector2<f64>,
    /// Intrinsic Hessian `∇²f(e_i, e_j)`.
    pub hess: Matrix2<f64>,
}

/// A function on the parameter domain with coordinate derivatives.
pub trait SurfaceFunction: Send + Sync {
    fn value(&self, u: [f64; 2]) -> f64;
    fn grad(&self, u: [f64; 2]) -> Vector2<f64>;
    fn hess(&self, u: [f64; 2]) -> Matrix2<f64>;
}

/// Cached geometry at one grid node.
#[derive(Debug, Clone)]
pub struct NodeGeom {
    pub index: usize,
    pub u: [f64; 2],
    pub point: ChartPoint,
    /// `F_{u₁}`, `F_{u₂}`.
    pub tangents: [DVector<f64>; 2],
    /// `F_{11}`, `F_{12}`, `F_{22}`.
    pub second: [DVector<f64>; 3],
    pub tensors: AmbientTensors,
    pub g: Matrix2<f64>,
    pub g_inv: Matrix2<f64>,
    pub dmu: f64,
    pub frame: AdaptedFrame,
    /// `[e₁ e₂] = [F_{u₁} F_{u₂}] E`.
    pub e_coeff: Matrix2<f64>,
    pub sff: SecondFundamentalForm,
    /// Induced Christoffels, indexed `[k][i][j]` for `Γ̃^k_{ij}`.
    pub induced_gamma: [[[f64; 2]; 2]; 2],
    pub mean_curvature: DVector<f64>,
}

impl NodeGeom {
    pub fn cos_alpha(&self) -> f64 {
        self.frame.cos_alpha
    }

    pub fn sin_alpha(&self) -> f64 {
        self.frame.sin_alpha
    }

    /// `F_{ij} + Γ(F_i, F_j)` for `ij ∈ {11, 12, 22}`.
    fn ambient_second(&self, i: usize, j: usize) -> DVector<f64> {
        let idx = i + j;
        &self.second[idx]
            + self
                .tensors
                .christoffel
                .contract(&self.tangents[i], &self.tangents[j])
    }

    /// Surface function jet in the adapted frame from coordinate data.
    pub fn function_jet(
        &self,
        value: f64,
        grad: Vector2<f64>,
        hess: Matrix2<f64>,
    ) -> SurfaceFunctionJet {
        let mut cov = hess;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    cov[(i, j)] -= self.induced_gamma[k][i][j] * grad[k];
                }
            }
        }
        let e = &self.e_coeff;
        SurfaceFunctionJet {
            node: self.index,
            value,
            grad: e.transpose() * grad,
            hess: e.transpose() * cov * e,
        }
    }

    /// Second fundamental form relative to another adapted frame of the
    /// same tangent plane.
    pub fn sff_in(&self, frame: &AdaptedFrame) -> SecondFundamentalForm {
        let proj = Matrix2::from_fn(|k, j| self.tensors.inner(&self.tangents[k], &frame.e[j]));
        let e = self.g_inv * proj;
        let acc = [
            [self.ambient_second(0, 0), self.ambient_second(0, 1)],
            [self.ambient_second(0, 1), self.ambient_second(1, 1)],
        ];
        let h = frame.e[2..]
            .iter()
            .map(|nu| {
                let k = Matrix2::from_fn(|i, j| self.tensors.inner(&acc[i][j], nu));
                let hs = e.transpose() * k * e;
                (hs + hs.transpose()) * 0.5
            })
            .collect();
        SecondFundamentalForm { h }
    }

    /// Tangent vector with frame components `(a, b)` as an ambient vector.
    pub fn tangent(&self, a: f64, b: f64) -> DVector<f64> {
        &self.frame.e[0] * a + &self.frame.e[1] * b
    }
}

fn build_node(
    model: &dyn AmbientModel,
    surface: &dyn ParamSurface,
    conn: Connection,
    index: usize,
    u: [f64; 2],
) -> Result<NodeGeom> {
    let point = ChartPoint::new(surface.eval(u));
    model.validate(&point)?;
    let jac = surface.jacobian(u);
    let tangents = [jac.column(0).into_owned(), jac.column(1).into_owned()];
    let second = second_derivatives(surface, u);
    let tensors = model.tensors_with(&point, conn);
    let g = Matrix2::from_fn(|i, j| tensors.inner(&tangents[i], &tangents[j]));
    let det = g.determinant();
    if !(det > 1e-12 * g[(0, 0)] * g[(1, 1)]) || !det.is_finite() {
        return Err(Error::ImmersionViolation { node: index });
    }
    let g_inv = g
        .try_inverse()
        .ok_or(Error::ImmersionViolation { node: index })?;
    let dmu = det.sqrt();

    // Gram–Schmidt, F_{u₁} first
    let n1 = g[(0, 0)].sqrt();
    let p = g[(0, 1)] / n1;
    let r = (g[(1, 1)] - p * p).sqrt();
    let e_coeff = Matrix2::new(1.0 / n1, -p / (n1 * r), 0.0, 1.0 / r);
    let e1 = &tangents[0] * e_coeff[(0, 0)];
    let e2 = &tangents[0] * e_coeff[(0, 1)] + &tangents[1] * e_coeff[(1, 1)];
    let frame = AdaptedFrame::from_tangent_pair(&tensors, e1, e2);

    let mut geom = NodeGeom {
        index,
        u,
        point,
        tangents,
        second,
        tensors,
        g,
        g_inv,
        dmu,
        frame,
        e_coeff,
        sff: SecondFundamentalForm { h: vec![] },
        induced_gamma: [[[0.0; 2]; 2]; 2],
        mean_curvature: DVector::zeros(model.dim()),
    };

    let acc = [
        [geom.ambient_second(0, 0), geom.ambient_second(0, 1)],
        [geom.ambient_second(0, 1), geom.ambient_second(1, 1)],
    ];
    for (k, row) in geom.induced_gamma.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                let lowered =
                    Vector2::from_fn(|l, _| geom.tensors.inner(&acc[i][j], &geom.tangents[l]));
                row[i][j] = (g_inv * lowered)[k];
            }
        }
    }
    let e = &geom.e_coeff;
    let mut h = Vec::with_capacity(model.dim() - 2);
    let mut mean = DVector::zeros(model.dim());
    for nu in &geom.frame.e[2..] {
        let k = Matrix2::from_fn(|i, j| geom.tensors.inner(&acc[i][j], nu));
        let hs = e.transpose() * k * e;
        let hs = (hs + hs.transpose()) * 0.5;
        mean += nu * (hs[(0, 0)] + hs[(1, 1)]);
        h.push(hs);
    }
    geom.sff = SecondFundamentalForm { h };
    geom.mean_curvature = mean;
    Ok(geom)
}

/// A surface sampled on an `n₁ × n₂` periodic grid with cached geometry.
///
/// Node `i·n₂ + j` sits at `(i L₁/n₁, j L₂/n₂)`; every node carries the
/// trapezoid weight `L₁L₂/(n₁n₂)`.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    model: Arc<dyn AmbientModel>,
    surface: Arc<dyn ParamSurface>,
    resolution: [usize; 2],
    weight: f64,
    nodes: Vec<NodeGeom>,
}

impl SurfaceGrid {
    pub fn build(
        model: Arc<dyn AmbientModel>,
        surface: Arc<dyn ParamSurface>,
        resolution: [usize; 2],
    ) -> Result<Self> {
        Self::build_with(model, surface, resolution, Connection::LeviCivita)
    }

    pub fn build_with(
        model: Arc<dyn AmbientModel>,
        surface: Arc<dyn ParamSurface>,
        resolution: [usize; 2],
        conn: Connection,
    ) -> Result<Self> {
        let [n1, n2] = resolution;
        if n1 < 2 || n2 < 2 {
            return Err(Error::invalid("grid needs at least 2 nodes per axis"));
        }
        let [l1, l2] = surface.domain();
        let nodes = (0..n1 * n2)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n2, idx % n2);
                let u = [i as f64 * l1 / n1 as f64, j as f64 * l2 / n2 as f64];
                build_node(model.as_ref(), surface.as_ref(), conn, idx, u)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfaceGrid {
            model,
            surface,
            resolution,
            weight: l1 * l2 / (n1 * n2) as f64,
            nodes,
        })
    }

    /// Geometry at an arbitrary parameter point, with the grid's connection
    /// choice taken as Levi-Civita. The node index is `usize::MAX`.
    pub fn geometry_at(&self, u: [f64; 2]) -> Result<NodeGeom> {
        build_node(
            self.model.as_ref(),
            self.surface.as_ref(),
            Connection::LeviCivita,
            usize::MAX,
            u,
        )
    }

    pub fn model(&self) -> &Arc<dyn AmbientModel> {
        &self.model
    }

    pub fn surface(&self) -> &Arc<dyn ParamSurface> {
        &self.surface
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.resolution
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn nodes(&self) -> &[NodeGeom] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NodeGeom {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of raw per-node values (already including any density).
    pub fn sum_weighted(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        self.weight * pairwise_sum(values)
    }

    /// `∫_Σ f dμ` for a per-node integrand.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&NodeGeom) -> f64 + Sync,
    {
        let v: Vec<f64> = self.nodes.par_iter().map(|n| f(n) * n.dmu).collect();
        self.sum_weighted(&v)
    }

    pub fn area(&self) -> f64 {
        let v: Vec<f64> = self.nodes.iter().map(|n| n.dmu).collect();
        self.sum_weighted(&v)
    }

    pub fn induced_metric(&self, node: usize) -> Matrix2<f64> {
        self.nodes[node].g
    }

    pub fn kahler_angle(&self, node: usize) -> f64 {
        self.nodes[node].frame.alpha
    }

    pub fn adapted_frame(&self, node: usize) -> &AdaptedFrame {
        &self.nodes[node].frame
    }

    pub fn second_fundamental_form(&self, node: usize) -> &SecondFundamentalForm {
        &self.nodes[node].sff
    }

    pub fn mean_curvature(&self, node: usize) -> &DVector<f64> {
        &self.nodes[node].mean_curvature
    }

    /// First node (row-major) attaining the maximum of `sin α`.
    pub fn max_sin_alpha(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for n in &self.nodes {
            if n.sin_alpha() > best.1 {
                best = (n.index, n.sin_alpha());
            }
        }
        best
    }

    /// `∫_Σ F*β` for a 2-form given by its coefficient matrix per node.
    pub fn integrate_pullback_2form<F>(&self, beta: F) -> f64
    where
        F: Fn(&NodeGeom) -> DMatrix<f64> + Sync,
    {
        let v: Vec<f64> = self
            .nodes
            .par_iter()
            .map(|n| (n.tangents[0].transpose() * beta(n) * &n.tangents[1])[(0, 0)])
            .collect();
        self.sum_weighted(&v)
    }

    /// Jets of a surface function at every node.
    pub fn function_jets(&self, f: &dyn SurfaceFunction) -> Vec<SurfaceFunctionJet> {
        self.nodes
            .par_iter()
            .map(|n| n.function_jet(f.value(n.u), f.grad(n.u), f.hess(n.u)))
            .collect()
    }

    /// Jet at `q` of the saddle `f(exp_q(t e₁ + s e₂)) = t² − s²`.
    pub fn surface_saddle_function(&self, q: usize) -> Result<SurfaceFunctionJet> {
        if q >= self.nodes.len() {
            return Err(Error::invalid(format!("node {q} outside the grid")));
        }
        Ok(SurfaceFunctionJet {
            node: q,
            value: 0.0,
            grad: Vector2::zeros(),
            hess: Matrix2::new(2.0, 0.0, 0.0, -2.0),
        })
    }

    /// A smooth periodic function on Σ whose jet at `q` is the saddle jet.
    pub fn periodic_saddle(&self, q: usize) -> Result<PeriodicSaddle> {
        let n = self
            .nodes
            .get(q)
            .ok_or_else(|| Error::invalid(format!("node {q} outside the grid")))?;
        let e_inv = n
            .e_coeff
            .try_inverse()
            .ok_or(Error::ImmersionViolation { node: q })?;
        let coeff = e_inv.transpose() * Matrix2::new(1.0, 0.0, 0.0, -1.0) * e_inv;
        Ok(PeriodicSaddle {
            center: n.u,
            periods: self.surface.domain(),
            coeff,
        })
    }
}

/// `f(u) = Σ c_{ij} s_i s_j` with `s_i = (L_i/2π) sin(2π(u_i − q_i)/L_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSaddle {
    pub center: [f64; 2],
    pub periods: [f64; 2],
    pub coeff: Matrix2<f64>,
}

impl PeriodicSaddle {
    /// `(s, s', s'')` per axis.
    fn parts(&self, u: [f64; 2]) -> [(f64, f64, f64); 2] {
        let mut out = [(0.0, 0.0, 0.0); 2];
        for k in 0..2 {
            let w = TAU / self.periods[k];
            let th = w * (u[k] - self.center[k]);
            out[k] = (th.sin() / w, th.cos(), -w * th.sin());
        }
        out
    }
}

impl SurfaceFunction for PeriodicSaddle {
    fn value(&self, u: [f64; 2]) -> f64 {
        let p = self.parts(u);
        let s = Vector2::new(p[0].0, p[1].0);
        (s.transpose() * self.coeff * s)[(0, 0)]
    }

    fn grad(&self, u: [f64; 2]) -> Vector2<f64> {
        let p = self.parts(u);
        let s = Vector2::new(p[0].0, p[1].0);
        let ds = Vector2::new(p[0].1, p[1].1);
        let cs = (self.coeff + self.coeff.transpose()) * s;
        Vector2::new(cs[0] * ds[0], cs[1] * ds[1])
    }

    fn hess(&self, u: [f64; 2]) -> Matrix2<f64> {
        let p = self.parts(u);
        let s = Vector2::new(p[0].0, p[1].0);
        let c = self.coeff + self.coeff.transpose();
        let cs = c * s;
        Matrix2::from_fn(|i, j| {
            let mut v = c[(i, j)] * p[i].1 * p[j].1;
            if i == j {
                v += cs[i] * p[i].2;
            }
            v
        })
    }
}
