use nalgebra::DMatrix;
use num_complex::Complex64;

use rmlab::pseudolattice::Mat2;
use rmlab::qtorus::{
    bimodule_action_residual, boca_projection, heisenberg_inner, morita_act, mumford_theta_check, qtheta_coeffs,
    qtheta_dual_coeffs, qtheta_fe_residual, rieffel_products, EmbeddedLattice, Gaussian, Multiplier, SiegelPoint,
};
use rmlab::quadfield::QuadElem;

fn theta() -> f64 {
    2f64.sqrt() - 1.0
}

fn t_i() -> SiegelPoint {
    SiegelPoint::diagonal(&[Complex64::new(0.0, 1.0)]).unwrap()
}

#[test]
fn morita_examples() {
    let r2 = QuadElem::sqrt_d(2);
    let m = morita_act(&Mat2::new(1, 1, 0, 1), &r2).unwrap();
    assert_eq!(m.target, QuadElem::from_ints(1, 1, 2));
    let m = morita_act(&Mat2::new(0, 1, 1, 0), &r2).unwrap();
    assert_eq!(m.target, QuadElem::from_frac(0, 1, 2, 2));
    assert_eq!(m.j, r2);
}

#[test]
fn dual_of_rotation_lattice() {
    let d = EmbeddedLattice::rotation(theta()).unwrap();
    let expect = EmbeddedLattice::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / theta()])).unwrap();
    assert!(d.dual().unwrap().same_lattice(&expect, 1e-12));
    let z2 = EmbeddedLattice::new(DMatrix::identity(2, 2)).unwrap();
    assert!(z2.dual().unwrap().same_lattice(&z2, 1e-12));
}

#[test]
fn quantum_theta_leading_coefficients() {
    let th = theta();
    let s = qtheta_coeffs(&EmbeddedLattice::rotation(th).unwrap(), &t_i(), 4).unwrap();
    for (m1, m2) in [(0, 0), (1, 0), (0, 1), (2, -1)] {
        let expect =
            (-std::f64::consts::FRAC_PI_2 * (th * th * (m1 * m1) as f64 + (m2 * m2) as f64)).exp() / 2f64.sqrt();
        assert!((s.coeffs.get(&[m1, m2]) - expect).norm() < 1e-15, "{} {}", m1, m2);
    }
    let z4 = EmbeddedLattice::new(DMatrix::identity(4, 4)).unwrap();
    let t2 = SiegelPoint::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)]).unwrap();
    let c0 = qtheta_coeffs(&z4, &t2, 1).unwrap().coeffs.get(&[0, 0, 0, 0]);
    assert!((c0.re - 8f64.sqrt().recip()).abs() < 1e-15);
}

#[test]
fn heisenberg_pairing_quadrature() {
    let d = EmbeddedLattice::rotation(theta()).unwrap();
    let r = heisenberg_inner(&d, &t_i(), &[0, 0]).unwrap();
    assert!((r.closed[0] - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(r.residual() < 1e-8);
    assert!(heisenberg_inner(&d, &t_i(), &[1, 0]).unwrap().residual() < 1e-8);
}

#[test]
fn functional_equation_multipliers() {
    let d = EmbeddedLattice::rotation(theta()).unwrap();
    let s = qtheta_coeffs(&d, &t_i(), 8).unwrap();
    let sd = qtheta_dual_coeffs(&d, &t_i(), 8).unwrap();
    assert_eq!(qtheta_fe_residual(&s, &[0, 0], Multiplier::Corrected).unwrap(), 0.0);
    assert!(qtheta_fe_residual(&s, &[1, 0], Multiplier::Corrected).unwrap() < 1e-12);
    assert!(qtheta_fe_residual(&sd, &[1, 0], Multiplier::Corrected).unwrap() < 1e-12);
    assert!(qtheta_fe_residual(&s, &[1, 0], Multiplier::Printed).unwrap() > 1.0);
}

#[test]
fn rieffel_series_match_quantum_theta() {
    let d = EmbeddedLattice::rotation(theta()).unwrap();
    let f = Gaussian::standard(&t_i());
    let r = rieffel_products(&f, &f, &d, 12).unwrap();
    let q = qtheta_coeffs(&d, &t_i(), 12).unwrap().coeffs.scaled(Complex64::new(d.covolume(), 0.0));
    let qd = qtheta_dual_coeffs(&d, &t_i(), 12).unwrap().coeffs;
    assert!(r.series_a.max_diff(&q) < 1e-14);
    assert!(r.series_b.max_diff(&qd) < 1e-14);
    assert!(rieffel_products(&f, &f, &d, 6).is_err());
}

#[test]
fn boca_idempotency_improves_with_radius() {
    let d = EmbeddedLattice::rotation(theta()).unwrap();
    let r6 = boca_projection(&d, &t_i(), 6, 1e-15).unwrap();
    let r10 = boca_projection(&d, &t_i(), 10, 1e-15).unwrap();
    assert!(r10.idempotency < r6.idempotency);
    assert!(r10.idempotency < 1e-6 && r10.self_adjointness < 1e-10);
    assert!(r10.min_eigenvalue > 0.0);
}

#[test]
fn bimodule_relations() {
    let f = |x: f64, mu: i64| Complex64::new((-x * x).exp() * (1.0 + 0.1 * mu as f64), 0.3 * x);
    let r = bimodule_action_residual(theta(), [[0, 1], [1, -1]], &f, 5.0, 64).unwrap();
    assert!(r.right_relation < 1e-12 && r.left_relation < 1e-12 && r.commutation < 1e-12);
    assert!(r.left_phase_vs_minus < 1e-12);
    let zero = |_: f64, _: i64| Complex64::new(0.0, 0.0);
    let z = bimodule_action_residual(theta(), [[0, 1], [1, -1]], &zero, 5.0, 64).unwrap();
    assert_eq!((z.right_relation, z.left_relation, z.commutation), (0.0, 0.0, 0.0));
}

#[test]
fn mumford_ratio_is_constant() {
    let xs = [(0.0, 0.0), (0.3, -0.2), (-0.7, 0.5), (1.1, 0.9), (0.25, 1.4)];
    for t in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)] {
        let r = mumford_theta_check(t, &xs).unwrap();
        assert!(r.deviation < 1e-9, "{}: {}", t, r.deviation);
    }
    assert!(mumford_theta_check(Complex64::new(0.0, -1.0), &xs).is_err());
}
