use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ambient::{ambient_by_id, ddc_via_hessian, ChartPoint, Connection};
use crate::immersion::{surface_by_id, ParamSurface, SurfaceFunction, SurfaceGrid};

fn grid(id: &str, n: usize) -> SurfaceGrid {
    let (s, amb) = surface_by_id(id).unwrap();
    SurfaceGrid::build(ambient_by_id(amb).unwrap(), Arc::new(s), [n, n]).unwrap()
}

/// Parameter of the closest surface point to `x` near `u0` in flat space.
fn closest_parameter(s: &dyn ParamSurface, x: &DVector<f64>, u0: [f64; 2]) -> [f64; 2] {
    let mut u = u0;
    for _ in 0..50 {
        let r = s.eval(u) - x;
        let jac = s.jacobian(u);
        let sec = s.second(u).unwrap();
        let grad = Vector2::new(jac.column(0).dot(&r), jac.column(1).dot(&r));
        let h = Matrix2::new(
            jac.column(0).dot(&jac.column(0)) + sec[0].dot(&r),
            jac.column(0).dot(&jac.column(1)) + sec[1].dot(&r),
            jac.column(1).dot(&jac.column(0)) + sec[1].dot(&r),
            jac.column(1).dot(&jac.column(1)) + sec[2].dot(&r),
        );
        let step = h.try_inverse().unwrap() * grad;
        u = [u[0] - step[0], u[1] - step[1]];
        if step.norm() < 1e-15 {
            break;
        }
    }
    u
}

fn fd_hessian<F: Fn(&DVector<f64>) -> f64>(f: F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let d = x.len();
    DMatrix::from_fn(d, d, |a, b| {
        let at = |sa: f64, sb: f64| {
            let mut y = x.clone();
            y[a] += sa * h;
            y[b] += sb * h;
            f(&y)
        };
        (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
    })
}

#[test]
fn constant_potential_has_zero_jet_and_form() {
    let g = grid("t4-perturbed", 16);
    let jet = analytic_potential_jet(&Constant(1.0), &g);
    for (j, f) in jet.jets.iter().zip(jet.ddc_forms(&g)) {
        assert_eq!(j.value, 1.0);
        assert_eq!(j.grad.norm(), 0.0);
        assert_eq!(j.hess.norm(), 0.0);
        assert_eq!(f.norm(), 0.0);
    }
}

#[test]
fn analytic_jets_pass_difference_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for id in ["t4-perturbed", "cp2-clifford", "c2-circle-product"] {
        let g = grid(id, 16);
        let nodes: Vec<usize> = (0..20).map(|_| rng.gen_range(0..g.len())).collect();
        for _ in 0..3 {
            let p = random_potential(g.model().as_ref(), &mut rng);
            let b = random_bump(g.model().as_ref(), &mut rng);
            for f in [p, b] {
                let jet = analytic_potential_jet(&f, &g);
                assert!(
                    jet_difference_check(&f, &jet, &g, &nodes, 1e-4) < 1e-5,
                    "{id}"
                );
            }
        }
    }
}

#[test]
fn distance_squared_jet_is_normal_projector() {
    for id in ["t4-tilted-3-4-5", "t4-perturbed", "cp2-clifford"] {
        let g = grid(id, 16);
        let jet = distance_squared_jet(&g);
        for (j, n) in jet.jets.iter().zip(g.nodes()) {
            let e = &n.frame.e;
            assert!(j.grad.norm() == 0.0);
            assert!((e[0].transpose() * &j.hess * &e[0])[(0, 0)].abs() < 1e-12);
            assert!(((e[2].transpose() * &j.hess * &e[2])[(0, 0)] - 1.0).abs() < 1e-12);
            let p = n.tensors.metric.clone().try_inverse().unwrap() * &j.hess;
            assert!((&p * &p - &p).amax() < 1e-10);
            assert!((p.trace() - 2.0).abs() < 1e-10);
        }
    }
}

#[test]
fn distance_squared_matches_closest_point_oracle() {
    let g = grid("t4-tilted-3-4-5", 16);
    let s = g.surface().clone();
    let jet = distance_squared_jet(&g);
    for i in (0..g.len()).step_by(g.len() / 10).take(10) {
        let n = g.node(i);
        let eta = |x: &DVector<f64>| {
            let u = closest_parameter(s.as_ref(), x, n.u);
            0.5 * (s.eval(u) - x).norm_squared()
        };
        let h = fd_hessian(eta, &n.point.coords, 1e-3);
        assert!((h - &jet.jets[i].hess).amax() < 1e-4);
    }
}

struct WaveFunction;

impl SurfaceFunction for WaveFunction {
    fn value(&self, u: [f64; 2]) -> f64 {
        (std::f64::consts::TAU * u[0]).sin() * (0.4 * std::f64::consts::PI * u[1]).cos()
    }
    fn grad(&self, u: [f64; 2]) -> Vector2<f64> {
        let (a, b) = (std::f64::consts::TAU, 0.4 * std::f64::consts::PI);
        Vector2::new(
            a * (a * u[0]).cos() * (b * u[1]).cos(),
            -b * (a * u[0]).sin() * (b * u[1]).sin(),
        )
    }
    fn hess(&self, u: [f64; 2]) -> Matrix2<f64> {
        let (a, b) = (std::f64::consts::TAU, 0.4 * std::f64::consts::PI);
        let (s1, c1) = (a * u[0]).sin_cos();
        let (s2, c2) = (b * u[1]).sin_cos();
        Matrix2::new(
            -a * a * s1 * c2,
            -a * b * c1 * s2,
            -a * b * c1 * s2,
            -b * b * s1 * c2,
        )
    }
}

#[test]
fn normal_extension_matches_tubular_oracle() {
    let g = grid("t4-perturbed", 32);
    let s = g.surface().clone();
    let f = WaveFunction;
    let jet = normal_extension_jet(&g, &g.function_jets(&f)).unwrap();
    for i in [3usize, 100, 333, 517, 900] {
        let n = g.node(i);
        let ext = |x: &DVector<f64>| f.value(closest_parameter(s.as_ref(), x, n.u));
        let h = fd_hessian(ext, &n.point.coords, 1e-3);
        let scale = 1.0 + h.amax();
        assert!((h - &jet.jets[i].hess).amax() / scale < 1e-4, "node {i}");
        assert!((jet.jets[i].value - f.value(n.u)).abs() < 1e-14);
        // tangential derivatives agree with f; normal derivative vanishes
        let df = n.tangents[0].dot(&jet.jets[i].grad);
        assert!((df - f.grad(n.u)[0]).abs() < 1e-10);
        assert!(jet.jets[i].grad.dot(&n.frame.e[2]).abs() < 1e-12);
    }
}

#[test]
fn normal_extension_of_constant_and_flat_cases() {
    let g = grid("t4-tilted-3-4-5", 16);
    let jets: Vec<_> = g
        .nodes()
        .iter()
        .map(|n| n.function_jet(2.0, Vector2::zeros(), Matrix2::zeros()))
        .collect();
    let ext = normal_extension_jet(&g, &jets).unwrap();
    for j in &ext.jets {
        assert_eq!(j.value, 2.0);
        assert!(j.grad.norm() < 1e-15 && j.hess.norm() < 1e-15);
    }
    // h ≡ 0: mixed block vanishes, tangential block is the intrinsic Hessian
    let f = g.function_jets(&WaveFunction);
    let ext = normal_extension_jet(&g, &f).unwrap();
    for (j, (n, fj)) in ext.jets.iter().zip(g.nodes().iter().zip(&f)) {
        let fm = n.frame.matrix();
        let hf = fm.transpose() * &j.hess * &fm;
        assert!((hf[(0, 0)] - fj.hess[(0, 0)]).abs() < 1e-10);
        for a in 0..2 {
            for b in 2..4 {
                assert!(hf[(a, b)].abs() < 1e-12 && hf[(b, b)].abs() < 1e-12);
            }
        }
    }
    assert!(normal_extension_jet(&g, &f[..3]).is_err());
}

#[test]
fn ddc_antisymmetric_and_connection_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for amb in ["cp2", "t4-twisted", "flat-c2"] {
        let m = ambient_by_id(amb).unwrap();
        for _ in 0..20 {
            let x = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
            let p = ChartPoint::new(x.clone());
            let psi = random_potential(m.as_ref(), &mut rng);
            let lc = m.tensors_with(&p, Connection::LeviCivita);
            let co = m.tensors_with(&p, Connection::Coordinate);
            let j1 = crate::ambient::PointJet::of(&psi, &x, &lc.christoffel);
            let j2 = crate::ambient::PointJet::of(&psi, &x, &co.christoffel);
            let a = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
            let b = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
            let v1 = ddc_via_hessian(&j1, &lc, &a, &b);
            let v2 = ddc_via_hessian(&j2, &co, &a, &b);
            let rev = ddc_via_hessian(&j1, &lc, &b, &a);
            assert!((v1 + rev).abs() <= 1e-12 * (1.0 + v1.abs()));
            assert!(
                (v1 - v2).abs() < 1e-6 * (1.0 + v1.abs()),
                "{amb}: {v1} vs {v2}"
            );
        }
    }
}

#[test]
fn ddc_matches_exterior_derivative_of_dc() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for amb in ["cp2", "flat-c2", "t4-twisted"] {
        let m = ambient_by_id(amb).unwrap();
        for _ in 0..10 {
            let x = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
            let p = ChartPoint::new(x.clone());
            let psi = random_potential(m.as_ref(), &mut rng);
            let t = m.tensors(&p);
            let jet = crate::ambient::PointJet::of(&psi, &x, &t.christoffel);
            let b = ddc_matrix(&jet, &t);
            // d^c ψ as a 1-form: (d^cψ)_a = −dψ_b J^b_a
            let dc = |y: &DVector<f64>| {
                -(m.complex_structure(&ChartPoint::new(y.clone())).transpose() * psi.gradient(y))
            };
            let fd = crate::ambient::calculus::exterior_derivative_1form(dc, &x, 1e-5);
            let scale = 1.0 + b.amax();
            assert!((b - fd).amax() / scale < 1e-4, "{amb}");
        }
    }
}

#[test]
fn dc_matches_differences_of_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = ambient_by_id("t4-twisted").unwrap();
    for _ in 0..20 {
        let psi = random_potential(m.as_ref(), &mut rng);
        let x = DVector::from_fn(4, |_, _| rng.gen_range(0.0..1.0));
        let v = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let j = m.complex_structure(&ChartPoint::new(x.clone()));
        let jv = &j * &v;
        let h = 1e-5;
        let fd = -(psi.value(&(&x + &jv * h)) - psi.value(&(&x - &jv * h))) / (2.0 * h);
        let exact = crate::ambient::dc_of(&psi.gradient(&x), &j, &v);
        assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-3));
    }
}

#[test]
fn pullback_commutes_with_ddc_for_holomorphic_maps() {
    // ι(z) = (z, z²) from C into the chart of CP²
    let cp2 = ambient_by_id("cp2").unwrap();
    let c1 = ambient_by_id("flat-c1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let iota = |w: &DVector<f64>| {
        let z = num_complex::Complex64::new(w[0], w[1]);
        let z2 = z * z;
        DVector::from_vec(vec![z.re, z.im, z2.re, z2.im])
    };
    for _ in 0..20 {
        let psi = random_potential(cp2.as_ref(), &mut rng);
        let w = DVector::from_fn(2, |_, _| rng.gen_range(-0.8..0.8));
        let x = iota(&w);
        let p = ChartPoint::new(x.clone());
        let t = cp2.tensors(&p);
        let b = ddc_matrix(&crate::ambient::PointJet::of(&psi, &x, &t.christoffel), &t);
        let z = num_complex::Complex64::new(w[0], w[1]);
        let dz = DMatrix::from_row_slice(
            4,
            2,
            &[
                1.0,
                0.0,
                0.0,
                1.0,
                2.0 * z.re,
                -2.0 * z.im,
                2.0 * z.im,
                2.0 * z.re,
            ],
        );
        let pulled = dz.transpose() * b * &dz;
        let composite = |v: &DVector<f64>| psi.value(&iota(v));
        let hess = fd_hessian(composite, &w, 1e-4);
        let h = 1e-6;
        let grad = DVector::from_fn(2, |a, _| {
            let mut vp = w.clone();
            let mut vm = w.clone();
            vp[a] += h;
            vm[a] -= h;
            (composite(&vp) - composite(&vm)) / (2.0 * h)
        });
        let pc = ChartPoint::new(w.clone());
        let tc = c1.tensors(&pc);
        let jet = crate::ambient::PointJet {
            value: composite(&w),
            grad,
            hess: crate::numerics::sym(&hess),
        };
        let direct = ddc_matrix(&jet, &tc);
        assert!((pulled - direct).amax() < 1e-6);
    }
}

#[test]
fn taming_margin_bound_along_linear_deformation() {
    let g = grid("cp2-clifford", 16);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let psi = random_potential(g.model().as_ref(), &mut rng);
    let forms = analytic_potential_jet(&psi, &g).ddc_forms(&g);
    let samples: Vec<(ChartPoint, DVector<f64>)> = g
        .nodes()
        .iter()
        .flat_map(|n| n.frame.e.iter().map(move |e| (n.point.clone(), e.clone())))
        .collect();
    // |ω'(X, JX)| ≤ ‖dd^cψ‖_F |X| |JX| in chart norms
    let norm = g
        .nodes()
        .iter()
        .flat_map(|n| {
            let f = forms[n.index].norm();
            n.frame
                .e
                .iter()
                .map(move |e| f * e.norm() * (&n.tensors.j * e).norm())
        })
        .fold(0.0, f64::max);
    for t in [0.0, 0.01, 0.1, 0.3] {
        let margin = crate::ambient::taming_margin(
            g.model().as_ref(),
            |p| {
                let n = g.nodes().iter().position(|n| n.point == *p).unwrap();
                &g.node(n).tensors.omega + &forms[n] * t
            },
            &samples,
        )
        .unwrap();
        assert!(margin >= 1.0 - t * norm - 1e-12);
    }
}
