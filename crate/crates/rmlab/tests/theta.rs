use num_complex::Complex64;

use rmlab::pseudolattice::Pseudolattice;
use rmlab::quadfield::QuadElem;
use rmlab::rmtheta::{self, coset_reps, gaussian_ft_check, lattice_fe_residual};
use rmlab::starkzeta::{self, algebraicity_probe, stark_conditions_check, stark_number, zeta_direct, zeta_mellin};

const ZETA_2: f64 = 0.9694453644914062;
const ZETA_PRIME_0: f64 = 1.3586306533922083;
const S0: f64 = 3.89086171394308;

#[test]
fn gaussian_transform_closed_form() {
    for (v, eta, y) in [
        (Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.2)),
        (Complex64::new(0.4, 0.8), Complex64::new(0.5, -1.5), Complex64::new(-0.7, 0.1)),
    ] {
        let (closed, quad) = gaussian_ft_check(v, eta, y).unwrap();
        assert!((closed - quad).norm() < 1e-8, "{} vs {}", closed, quad);
    }
    assert!(gaussian_ft_check(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
}

#[test]
fn lattice_theta_functional_equation() {
    let l = Pseudolattice::new(QuadElem::one(3), QuadElem::sqrt_d(3)).unwrap();
    let l0 = QuadElem::from_frac(1, 0, 3, 3);
    let m0 = QuadElem::from_frac(0, 1, 4, 3);
    for (t, v) in [(0.0, Complex64::new(0.1, 1.1)), (0.8, Complex64::new(-0.3, 0.7))] {
        let r = lattice_fe_residual(&l, &l0, &m0, Complex64::new(1.0, 0.5), t, v, 1e-14).unwrap();
        assert!(r.residual < 1e-9, "t = {}: {}", t, r.residual);
        assert!(r.lhs.norm() > 1e-3);
    }
}

#[test]
fn coset_count_doubles_with_the_bound() {
    let spec = rmtheta::worked_example();
    let n = |b: f64| coset_reps(&spec.lattice, &spec.l0, &spec.eps, b).unwrap().len() as f64;
    let ratio = n(4e4) / n(2e4);
    assert!((ratio - 2.0).abs() < 0.05, "{}", ratio);
}

#[test]
fn worked_example_conditions() {
    let w = starkzeta::worked_example();
    assert!(w.diagnostics.pass);
    assert!(w.diagnostics.condition_i && w.diagnostics.condition_ii);
    assert_eq!(w.eta, Some(QuadElem::from_ints(26, 15, 3)));
    // l0 = 0 puts l0 in L, which is excluded
    assert!(stark_conditions_check(&w.lattice, &QuadElem::zero(3)).is_err());
    // -phi^4 = 1 mod 3 with negative conjugate
    let l = Pseudolattice::ring_of_integers(5).unwrap().scale(&QuadElem::from_ints(3, 0, 5)).unwrap();
    let bad = stark_conditions_check(&l, &QuadElem::one(5)).unwrap();
    assert!(!bad.diagnostics.pass);
    assert!(bad.diagnostics.counterexample.is_some());
}

#[test]
fn frozen_zeta_values() {
    let w = starkzeta::worked_example();
    let two = Complex64::new(2.0, 0.0);
    let m = zeta_mellin(&w, two, 1e-13).unwrap().complex();
    assert!((m.re - ZETA_2).abs() < 1e-10 && m.im.abs() < 1e-12, "{}", m);
    let d = zeta_direct(&w, two, 1e6).unwrap().complex();
    assert!((d.re - ZETA_2).abs() < 1e-8, "{}", d);
    // signed terms: the unit-norm orbit dominates as s grows, so zeta(s) rises towards 1
    let three = zeta_mellin(&w, Complex64::new(3.0, 0.0), 1e-13).unwrap().complex();
    let direct3 = zeta_direct(&w, Complex64::new(3.0, 0.0), 1e5).unwrap().complex();
    assert!((three - direct3).norm() < 1e-12, "{} vs {}", three, direct3);
    assert!(m.re < three.re && three.re < 1.0);
    assert!(zeta_direct(&w, Complex64::new(1.0, 0.0), 1e4).is_err());
}

#[test]
fn frozen_stark_number() {
    let w = starkzeta::worked_example();
    let s = stark_number(&w, 1e-13).unwrap();
    assert!((s.zeta_prime_at_0 - ZETA_PRIME_0).abs() < 1e-10, "{}", s.zeta_prime_at_0);
    assert!((s.s0 - S0).abs() < 1e-9, "{}", s.s0);
}

#[test]
fn probe_recognises_quadratic_irrationals() {
    let r = algebraicity_probe(2f64.sqrt() + 1.0, 2, 5, 1e-12, 1_000_000).unwrap();
    assert_eq!(r.polynomial.unwrap().coeffs, vec![-1, -2, 1]);
    let none = algebraicity_probe(std::f64::consts::PI, 2, 3, 1e-12, 1_000_000).unwrap();
    assert!(none.polynomial.is_none());
}
