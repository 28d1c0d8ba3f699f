mod common;

use common::{degenerate_two_by_two, elimination_oracle, matrix, vector};
use degen_mixed::dae::{
    certify, energy_report, garding_constants, inf_sup_constant, integrate, integrate_reduced, l2_time_distance,
    lift_vperp, recover_multiplier, CertifiedSystem, DaeError, DiscreteMixedSystem, Load, Scheme, SystemParts,
    TimeProfile, Tolerances,
};
use degen_mixed::linalg::{DenseMatrix, Vector};

fn system(r: DenseMatrix, a: DenseMatrix, b: DenseMatrix, mx: DenseMatrix, mm: DenseMatrix) -> DiscreteMixedSystem {
    let n = r.nrows();
    let m = b.nrows();
    DiscreteMixedSystem::new(SystemParts {
        name: "test".into(),
        my: DenseMatrix::identity(n, n),
        r,
        a,
        b,
        mx,
        mm,
        f: Load::zero(n),
        g: Load::zero(m),
        u0: Vector::zeros(n),
        t_final: 1.0,
        g_regular: true,
    })
    .unwrap()
}

fn scalar_decay() -> DiscreteMixedSystem {
    DiscreteMixedSystem::new(SystemParts {
        name: "scalar".into(),
        r: matrix(1, 1, &[1.0]),
        a: matrix(1, 1, &[1.0]),
        b: DenseMatrix::zeros(0, 1),
        mx: matrix(1, 1, &[1.0]),
        my: matrix(1, 1, &[1.0]),
        mm: DenseMatrix::zeros(0, 0),
        f: Load::zero(1),
        g: Load::zero(0),
        u0: vector(&[1.0]),
        t_final: 1.0,
        g_regular: true,
    })
    .unwrap()
}

#[test]
fn inf_sup_examples() {
    let id = DenseMatrix::identity(2, 2);
    let one = DenseMatrix::identity(1, 1);
    let sys = system(id.clone(), id.clone(), matrix(1, 2, &[1.0, 0.0]), id.clone(), one.clone());
    assert!((inf_sup_constant(&sys).unwrap() - 1.0).abs() < 1e-14);
    let sys = system(id.clone(), id.clone(), matrix(1, 2, &[2.0, 0.0]), id.clone(), one);
    assert!((inf_sup_constant(&sys).unwrap() - 2.0).abs() < 1e-14);
    let sys = system(
        id.clone(),
        id.clone(),
        matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        id.clone(),
        DenseMatrix::identity(2, 2),
    );
    assert!(matches!(inf_sup_constant(&sys), Err(DaeError::RankDeficientB { rank: 1, rows: 2 })));
    let cert = certify(&sys, &Tolerances::default()).unwrap();
    assert!(!cert.verdict.h1_inf_sup && !cert.verdict.pass);
}

#[test]
fn inf_sup_is_invariant_under_consistent_row_scaling() {
    let b = matrix(2, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0]);
    let mx = matrix(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.5, 0.2, 0.0, 0.2, 1.0]);
    let mm = matrix(2, 2, &[1.2, 0.1, 0.1, 0.8]);
    let id = DenseMatrix::identity(3, 3);
    let base = inf_sup_constant(&system(id.clone(), id.clone(), b.clone(), mx.clone(), mm.clone())).unwrap();
    let d = DenseMatrix::from_diagonal(&vector(&[3.0, 0.01]));
    let scaled = inf_sup_constant(&system(id.clone(), id, &d * b, mx, &d * mm * &d)).unwrap();
    assert!((scaled - base).abs() <= 1e-10 * base);
}

#[test]
fn garding_examples() {
    let id = DenseMatrix::identity(2, 2);
    let sys = system(DenseMatrix::zeros(2, 2), id.clone(), DenseMatrix::zeros(0, 2), id.clone(), DenseMatrix::zeros(0, 0));
    let g = garding_constants(&sys, &[0.0, 1.0, 10.0, 100.0]).unwrap();
    assert_eq!(g.gamma, 0.0);
    assert!((g.alpha - 1.0).abs() < 1e-14);

    let sys = system(
        matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]),
        DenseMatrix::zeros(0, 2),
        id.clone(),
        DenseMatrix::zeros(0, 0),
    );
    let g = garding_constants(&sys, &[1.0]).unwrap();
    assert!((g.alpha - 1.0).abs() < 1e-14);
    assert!(matches!(garding_constants(&sys, &[0.0]), Err(DaeError::NoPositiveAlpha { .. })));
    assert!(matches!(garding_constants(&sys, &[]), Err(DaeError::EmptyKernelGrid)));
}

#[test]
fn lift_examples() {
    let id = DenseMatrix::identity(2, 2);
    let mut parts = system(id.clone(), id.clone(), matrix(1, 2, &[1.0, 0.0]), id.clone(), DenseMatrix::identity(1, 1))
        .into_parts();
    parts.g = Load::single(vector(&[3.0]), TimeProfile::Constant);
    let sys = DiscreteMixedSystem::new(parts.clone()).unwrap();
    assert_eq!(lift_vperp(&sys, 0.3).unwrap().as_slice(), &[3.0, 0.0]);
    parts.b = matrix(1, 2, &[1.0, 1.0]);
    parts.g = Load::single(vector(&[2.0]), TimeProfile::Constant);
    let sys = DiscreteMixedSystem::new(parts).unwrap();
    let z = lift_vperp(&sys, 0.0).unwrap();
    assert!((z[0] - 1.0).abs() < 1e-14 && (z[1] - 1.0).abs() < 1e-14);
}

#[test]
fn scalar_backward_euler_closed_form() {
    let cs = CertifiedSystem::new(scalar_decay(), &Tolerances::default()).unwrap();
    let traj = integrate(&cs, 0.1, Scheme::BackwardEuler).unwrap();
    assert_eq!(traj.steps(), 10);
    for (n, u) in traj.u.iter().enumerate().skip(1) {
        let exact = 1.1f64.powi(-(n as i32));
        assert!((u[0] - exact).abs() < 1e-14, "step {n}: {} vs {exact}", u[0]);
    }
}

#[test]
fn degenerate_two_by_two_constraint_and_oracle() {
    let sys = degenerate_two_by_two(1.0);
    let cs = CertifiedSystem::new(sys.clone(), &Tolerances::default()).unwrap();
    let dt = 0.1;
    let traj = integrate(&cs, dt, Scheme::BackwardEuler).unwrap();
    assert!(traj.lambda[0].iter().all(|&v| v == 0.0));
    for (n, u) in traj.u.iter().enumerate().skip(1) {
        assert!((u[1] - traj.times[n]).abs() < 1e-15);
        assert!((u[0] - 1.1f64.powi(-(n as i32))).abs() < 1e-14);
    }
    let (u_ref, l_ref) = elimination_oracle(&sys, dt);
    for n in 1..=traj.steps() {
        assert!((&traj.u[n] - &u_ref[n]).amax() <= 1e-12);
        assert!((&traj.lambda[n] - &l_ref[n]).amax() <= 1e-12);
    }
    let reduced = integrate_reduced(&cs, dt, Scheme::BackwardEuler).unwrap();
    for n in 1..=traj.steps() {
        assert!((&traj.u[n] - &reduced.u[n]).amax() <= 1e-10);
    }
    let recovered = recover_multiplier(&cs, &traj);
    for n in 0..=traj.steps() {
        assert!((&recovered[n] - &traj.lambda[n]).amax() <= 1e-12);
    }
}

#[test]
fn crank_nicolson_is_second_order_on_scalar_decay() {
    let cs = CertifiedSystem::new(scalar_decay(), &Tolerances::default()).unwrap();
    let err = |dt: f64| {
        let traj = integrate(&cs, dt, Scheme::CrankNicolson).unwrap();
        (traj.u.last().unwrap()[0] - (-1.0f64).exp()).abs()
    };
    let ratio = err(0.05) / err(0.025);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let mut parts = degenerate_two_by_two(1.0).into_parts();
    parts.g = Load::zero(1);
    parts.u0 = Vector::zeros(2);
    let cs = CertifiedSystem::new(DiscreteMixedSystem::new(parts).unwrap(), &Tolerances::default()).unwrap();
    for scheme in [Scheme::BackwardEuler, Scheme::CrankNicolson] {
        let traj = integrate(&cs, 0.1, scheme).unwrap();
        assert!(traj.u.iter().chain(&traj.lambda).all(|v| v.amax() == 0.0));
        let report = energy_report(cs.system(), &traj).unwrap();
        assert_eq!(report.lhs, 0.0);
        assert_eq!(report.empirical_c, None);
    }
}

#[test]
fn empirical_constant_is_stable_under_step_halving() {
    let cs = CertifiedSystem::new(scalar_decay(), &Tolerances::default()).unwrap();
    let c = |dt: f64| {
        let traj = integrate(&cs, dt, Scheme::BackwardEuler).unwrap();
        energy_report(cs.system(), &traj).unwrap().empirical_c.unwrap()
    };
    let (c1, c2) = (c(0.1), c(0.05));
    assert!(c1.is_finite() && (c2 / c1 - 1.0).abs() < 0.2, "{c1} {c2}");
}

#[test]
fn oversized_steps_are_rejected() {
    let sys = system(
        matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        matrix(2, 2, &[-0.5, 0.0, 0.0, 1.0]),
        DenseMatrix::zeros(0, 2),
        DenseMatrix::identity(2, 2),
        DenseMatrix::zeros(0, 0),
    );
    let cs = CertifiedSystem::new(sys, &Tolerances::default()).unwrap();
    assert_eq!(cs.gamma(), 1.0);
    assert!(matches!(
        integrate(&cs, 1.0, Scheme::BackwardEuler),
        Err(DaeError::StepExceedsGarding { .. })
    ));
    assert!(integrate(&cs, 0.5, Scheme::BackwardEuler).is_ok());
    assert!(matches!(integrate(&cs, 0.3, Scheme::BackwardEuler), Err(DaeError::InvalidStep(_))));
}

#[test]
fn reduced_and_full_agree_to_first_order() {
    let sys = degenerate_two_by_two(1.0);
    let cs = CertifiedSystem::new(sys, &Tolerances::default()).unwrap();
    for scheme in [Scheme::BackwardEuler, Scheme::CrankNicolson] {
        let dt = 0.05;
        let full = integrate(&cs, dt, scheme).unwrap();
        let reduced = integrate_reduced(&cs, dt, scheme).unwrap();
        let d = l2_time_distance(cs.system().mx(), &full.times, &full.u, &reduced.u);
        assert!(d <= 5.0 * dt, "{scheme}: {d}");
    }
}
