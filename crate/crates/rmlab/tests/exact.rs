use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use rmlab::pseudolattice::{
    cf_expand, delta, dual_pseudolattice, geodesic_lift, geodesic_tau, gl2z_equivalent, Pseudolattice,
};
use rmlab::quadfield::{fundamental_unit, integer_basis, order_of_conductor, qf_arith, ArithOp, ArithValue, QuadElem};
use rmlab::Error;

fn phi() -> QuadElem {
    QuadElem::from_frac(1, 1, 2, 5)
}

#[test]
fn golden_ratio_norm_trace_sign() {
    let r = |n: i64| ArithValue::Rational(BigRational::from_integer(BigInt::from(n)));
    assert_eq!(qf_arith(&phi(), None, ArithOp::Norm).unwrap(), r(-1));
    assert_eq!(qf_arith(&phi(), None, ArithOp::Trace).unwrap(), r(1));
    assert_eq!(qf_arith(&phi().conj(), None, ArithOp::Sign).unwrap(), ArithValue::Sign(-1));
}

#[test]
fn mixed_fields_are_rejected() {
    let e = QuadElem::sqrt_d(2).try_mul(&QuadElem::sqrt_d(3));
    assert_eq!(e, Err(Error::MixedField(2, 3)));
}

#[test]
fn integral_bases_match_parity_rule() {
    assert_eq!(integer_basis(5).unwrap().1, phi());
    assert_eq!(integer_basis(2).unwrap().1, QuadElem::sqrt_d(2));
    assert_eq!(integer_basis(13).unwrap().1, QuadElem::from_frac(1, 1, 2, 13));
    // (a + b sqrt 5)/2 is integral exactly when a = b mod 2
    for a in -6..=6 {
        for b in -6..=6 {
            let x = QuadElem::from_frac(a, b, 2, 5);
            assert_eq!(x.is_integral(), (a - b) % 2 == 0, "{}", x);
        }
    }
}

#[test]
fn fundamental_units() {
    let u = fundamental_unit(5).unwrap();
    assert_eq!((u.unit, u.norm, u.totally_positive), (phi(), -1, QuadElem::from_frac(3, 1, 2, 5)));
    let u = fundamental_unit(2).unwrap();
    assert_eq!((u.unit, u.norm, u.totally_positive), (QuadElem::from_ints(1, 1, 2), -1, QuadElem::from_ints(3, 2, 2)));
    let u = fundamental_unit(3).unwrap();
    assert_eq!((u.unit.clone(), u.norm, u.totally_positive), (QuadElem::from_ints(2, 1, 3), 1, u.unit));
    // no smaller unit among b = 1..40 for d = 94, whose unit is large
    let big = fundamental_unit(94).unwrap().unit;
    assert_eq!(big, QuadElem::from_ints(2143295, 221064, 94));
}

#[test]
fn orders_of_small_conductor() {
    assert_eq!(order_of_conductor(5, 1).unwrap().basis.1, phi());
    assert_eq!(order_of_conductor(5, 2).unwrap().basis.1, QuadElem::from_ints(1, 1, 5));
    assert_eq!(order_of_conductor(2, 3).unwrap().basis.1, QuadElem::from_ints(0, 3, 2));
    assert!(order_of_conductor(2, 0).is_err());
}

#[test]
fn root_two_and_its_half_are_equivalent() {
    let r2 = QuadElem::sqrt_d(2);
    let half = QuadElem::from_frac(0, 1, 2, 2);
    let g = gl2z_equivalent(&r2, &half).unwrap().unwrap();
    assert_eq!(g.act(&half).unwrap(), r2);
    let e = cf_expand(&half, 6).unwrap();
    assert_eq!(e.notation(), "[0; 1, (2)]");
}

#[test]
fn covolumes() {
    let l = Pseudolattice::from_ints(2, (0, 1), (1, 0)).unwrap();
    assert_eq!(delta(&l), QuadElem::from_ints(0, 2, 2));
    let m = dual_pseudolattice(&l);
    assert_eq!(&delta(&l) * &delta(&m), QuadElem::one(2));
    let ok = Pseudolattice::ring_of_integers(5).unwrap();
    assert_eq!(delta(&ok.scale(&phi()).unwrap()), delta(&ok));
}

#[test]
fn geodesic_tends_to_theta() {
    let s5 = 5f64.sqrt();
    let tau = geodesic_tau((1.0 - s5) / 2.0, (1.0 + s5) / 2.0, 40.0).unwrap();
    assert!((tau - Complex64::new((1.0 - s5) / 2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn lift_of_scaled_lattice() {
    // Lambda_t(aL) = sqrt(a a') Lambda_{t + log(a/a')}(L) for totally positive a
    let l = Pseudolattice::new(QuadElem::one(3), QuadElem::sqrt_d(3)).unwrap();
    let a = QuadElem::from_ints(2, 1, 3);
    let al = l.scale(&a).unwrap();
    let (a1, a2) = (a.to_f64(), a.conj_f64());
    let zero = QuadElem::zero(3);
    for t in [-1.0, 0.0, 0.7] {
        let lhs = geodesic_lift(&al, &zero, &zero, t);
        let rhs = geodesic_lift(&l, &zero, &zero, t + (a1 / a2).ln());
        for k in 0..2 {
            assert!((lhs.basis[k] - rhs.basis[k] * (a1 * a2).sqrt()).norm() < 1e-12);
        }
        assert_eq!(lhs.lambda0, Complex64::new(0.0, 0.0));
    }
}
