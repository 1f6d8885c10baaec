use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::immersion::{surface_by_id, SurfaceGrid};
use crate::potential::fields::flow_with_jacobian;

fn cp2() -> FubiniStudy {
    FubiniStudy::new(2).unwrap()
}

fn random_anti_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&m - m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn random_point(rng: &mut ChaCha8Rng) -> ChartPoint {
    ChartPoint::new(DVector::from_fn(4, |_, _| rng.gen_range(-1.5..1.5)))
}

fn clifford(n: usize) -> SurfaceGrid {
    let (s, _) = surface_by_id("cp2-clifford").unwrap();
    SurfaceGrid::build(Arc::new(cp2()), Arc::new(s), [n, n]).unwrap()
}

#[test]
fn anti_hermitian_coefficients_give_killing_fields() {
    let m = cp2();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for part in [KillingPart::Real, KillingPart::Imaginary] {
        let a = random_anti_hermitian(&mut rng, 3);
        let a = match part {
            KillingPart::Real => a,
            KillingPart::Imaginary => a * Complex64::new(0.0, 1.0),
        };
        let spec = KillingSpec { a, part };
        assert!(spec.isometry_defect() < 1e-14);
        let v = killing_from_matrix(&spec, &m).unwrap();
        for _ in 0..50 {
            assert!(killing_residual(&m, &v, &random_point(&mut rng)) < 1e-6);
        }
    }
    let hermitian = KillingSpec {
        a: random_anti_hermitian(&mut rng, 3) * Complex64::new(0.0, 1.0),
        part: KillingPart::Real,
    };
    assert!(hermitian.isometry_defect() > 1e-3);
    let v = killing_from_matrix(&hermitian, &m).unwrap();
    assert!(killing_residual(&m, &v, &random_point(&mut rng)) > 1e-3);
}

#[test]
fn diagonal_torus_action_flow_is_isometric() {
    let m = cp2();
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 2.0),
    ]));
    let v = killing_from_matrix(
        &KillingSpec {
            a,
            part: KillingPart::Real,
        },
        &m,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let p = random_point(&mut rng);
        let (q, d) = flow_with_jacobian(&v, &p.coords, 0.7, 200);
        let pulled = d.transpose() * m.metric(&ChartPoint::new(q)) * &d;
        assert!((pulled - m.metric(&p)).amax() < 1e-9);
    }
    // scalar coefficients act trivially
    let id = DMatrix::identity(3, 3) * Complex64::new(0.0, 1.0);
    let zero = killing_from_matrix(
        &KillingSpec {
            a: id,
            part: KillingPart::Real,
        },
        &m,
    )
    .unwrap();
    assert!(zero.value(&random_point(&mut rng).coords).norm() < 1e-15);
}

#[test]
fn holomorphic_jacobian_matches_differences() {
    let m = cp2();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DMatrix::from_fn(3, 3, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let v = killing_from_matrix(
        &KillingSpec {
            a,
            part: KillingPart::Imaginary,
        },
        &m,
    )
    .unwrap();
    let x = random_point(&mut rng).coords;
    let jac = v.jacobian(&x);
    let h = 1e-6;
    for c in 0..4 {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        assert!(((v.value(&xp) - v.value(&xm)) / (2.0 * h) - jac.column(c)).norm() < 1e-8);
    }
}

#[test]
fn bracket_with_transvection_gives_covariant_derivative_at_origin() {
    let m = cp2();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let origin = ChartPoint::new(DVector::zeros(4));
    let v = killing_from_matrix(
        &KillingSpec {
            a: random_anti_hermitian(&mut rng, 3),
            part: KillingPart::Real,
        },
        &m,
    )
    .unwrap();
    let nv = covariant_derivative(&m, &v, &origin);
    for _ in 0..5 {
        let x = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let u = transvection(&m, &x);
        assert!((u.value(&origin.coords) - &x).norm() < 1e-15);
        assert!(u.jacobian(&origin.coords).norm() < 1e-15);
        let br = bracket(&u, &v, &origin.coords);
        // finite-difference ∇_X V with Christoffels from differences of the metric
        let h = 1e-6;
        let dv =
            (v.value(&(&origin.coords + &x * h)) - v.value(&(&origin.coords - &x * h))) / (2.0 * h);
        let fd =
            dv + crate::ambient::fd_christoffel(&m, &origin).contract(&x, &v.value(&origin.coords));
        assert!((&br - &nv * &x).norm() < 1e-12);
        assert!((br - fd).norm() < 1e-6);
    }
}

#[test]
fn lemma62_constants_on_clifford_torus() {
    let g = clifford(16);
    let m = cp2();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<_> = (0..50).map(|_| random_point(&mut rng)).collect();
    for q in [0usize, 37, 101, 255] {
        let n = g.node(q);
        let l = lemma62_killing(&m, n, 1.0, &samples).unwrap();
        let c2 = n.cos_alpha().powi(2);
        assert!((l.pairing_unscaled - 0.5 * (1.0 + c2)).abs() < 1e-8);
        assert!((l.grad_norm_sq_unscaled - 0.5).abs() < 1e-8);
        assert!((l.pairing - 1.0).abs() < 1e-8, "pairing {}", l.pairing);
        assert!(l.grad_norm >= 0.5f64.sqrt() - 1e-12 && l.grad_norm <= 2f64.sqrt() + 1e-12);
        assert!(l.killing_residual < 1e-6);
        // the automorphism sends q to the origin
        assert!(l.automorphism.apply(&m, &n.point).unwrap().coords.norm() < 1e-12);
    }
}

#[test]
fn lemma62_constants_on_non_lagrangian_points() {
    // a tilted holomorphic-ish torus is not available in CP², so build a
    // frame by hand: the pairing identity holds for any angle
    let m = cp2();
    let (s, _) = surface_by_id("cp2-clifford").unwrap();
    let mut s = s;
    // shear z₂ by z₁ to create a non-Lagrangian surface in the chart
    s.terms.push(crate::immersion::FourierTerm {
        coeff: DVector::from_vec(vec![0.0, 0.0, 0.3, 0.0]),
        m: 0,
        n: 1,
        phase: 0.0,
    });
    let g = SurfaceGrid::build(Arc::new(m.clone()), Arc::new(s), [16, 16]).unwrap();
    for q in [5usize, 77, 200] {
        let n = g.node(q);
        assert!(n.cos_alpha().abs() > 1e-3);
        for target in [1.0, -0.5, 3.0] {
            let l = lemma62_killing(&m, n, target, &[]).unwrap();
            assert!((l.pairing_unscaled - 0.5 * (1.0 + n.cos_alpha().powi(2))).abs() < 1e-8);
            assert!((l.grad_norm_sq_unscaled - 0.5).abs() < 1e-8);
            assert!((l.pairing - target).abs() < 1e-8);
        }
    }
}

#[test]
fn lie_derivative_routes_agree_and_give_d2_hat() {
    let g = clifford(16);
    let m = cp2();
    let q = 37;
    let l = lemma62_killing(&m, g.node(q), 1.0, &[]).unwrap();
    let v = killing_from_matrix(&l.spec, &m).unwrap();
    let w = v.j_rotated();
    let forms = killing_two_form(&g, &w).unwrap();
    assert!(forms.max_discrepancy < 1e-5);
    let n = g.node(q);
    let e = &n.frame.e;
    let form = &forms.forms[q];
    let d2 = n.sin_alpha()
        * ((e[0].transpose() * form * &e[2])[(0, 0)] + (e[1].transpose() * form * &e[3])[(0, 0)]);
    assert!((d2 + 2.0).abs() < 1e-8, "D2 = {d2}");
    let nw = covariant_derivative(&m, &w, &n.point);
    assert!((d2_hat_covariant(n, &nw) - d2).abs() < 1e-8);
    let nv = covariant_derivative(&m, &v, &n.point);
    let pairing = n.tensors.inner(&(&nv * &e[0]), &e[2]) + n.tensors.inner(&(&nv * &e[1]), &e[3]);
    assert!((d2 + 2.0 * n.sin_alpha() * pairing).abs() < 1e-8);
}

#[test]
fn degenerate_frames_are_rejected() {
    let m = cp2();
    // the complex line z₂ = 0 is holomorphic
    let s = crate::immersion::FourierSurface {
        id: "line".into(),
        domain: [std::f64::consts::TAU, std::f64::consts::TAU],
        base: DVector::zeros(4),
        a: DVector::zeros(4),
        b: DVector::zeros(4),
        terms: vec![
            crate::immersion::FourierTerm {
                coeff: DVector::from_vec(vec![0.5, 0.0, 0.0, 0.0]),
                m: 1,
                n: 0,
                phase: 0.0,
            },
            crate::immersion::FourierTerm {
                coeff: DVector::from_vec(vec![0.0, 0.5, 0.0, 0.0]),
                m: 1,
                n: 0,
                phase: -std::f64::consts::FRAC_PI_2,
            },
            crate::immersion::FourierTerm {
                coeff: DVector::from_vec(vec![0.2, 0.0, 0.0, 0.0]),
                m: 0,
                n: 1,
                phase: 0.0,
            },
            crate::immersion::FourierTerm {
                coeff: DVector::from_vec(vec![0.0, 0.2, 0.0, 0.0]),
                m: 0,
                n: 1,
                phase: -std::f64::consts::FRAC_PI_2,
            },
        ],
    };
    let g = SurfaceGrid::build(Arc::new(m.clone()), Arc::new(s), [8, 8]);
    // an annulus-type map of a torus into a line is not an immersion everywhere;
    // pick a node where it is, or accept the immersion error
    match g {
        Ok(g) => {
            let n = g.node(1);
            assert!(n.frame.degenerate);
            assert!(matches!(
                lemma62_killing(&m, n, 1.0, &[]),
                Err(Error::DegenerateFrame { .. })
            ));
        }
        Err(e) => assert!(matches!(e, Error::ImmersionViolation { .. })),
    }
}
