use num_complex::Complex64;
use proptest::prelude::*;

use rmlab::pseudolattice::{delta, dual_pseudolattice, gl2z_equivalent, Mat2, Pseudolattice};
use rmlab::qexp::{eq_series, euler_coefficient, nc_mul, NCPoly, QSeriesParams};
use rmlab::qtorus::{morita_act, morita_compose, qtheta_coeffs, qtheta_dual_coeffs, qtheta_fe_residual};
use rmlab::qtorus::{EmbeddedLattice, Multiplier, SiegelPoint};
use rmlab::quadfield::QuadElem;
use rmlab::rmtheta::{theta_rm, worked_example};

const FIELDS: [i64; 6] = [2, 3, 5, 6, 7, 13];

fn elem() -> impl Strategy<Value = QuadElem> {
    (0..FIELDS.len(), -30i64..=30, -30i64..=30, 1i64..=6)
        .prop_map(|(i, a, b, q)| QuadElem::from_frac(a, b, q, FIELDS[i]))
}

fn pair() -> impl Strategy<Value = (QuadElem, QuadElem)> {
    (0..FIELDS.len(), [-30i64..=30, -30i64..=30, 1i64..=6, -30i64..=30, -30i64..=30, 1i64..=6]).prop_map(
        |(i, [a, b, q, c, e, r])| (QuadElem::from_frac(a, b, q, FIELDS[i]), QuadElem::from_frac(c, e, r, FIELDS[i])),
    )
}

fn irrational() -> impl Strategy<Value = QuadElem> {
    (0..FIELDS.len(), -12i64..=12, 1i64..=6, 1i64..=5).prop_map(|(i, a, b, q)| QuadElem::from_frac(a, b, q, FIELDS[i]))
}

fn gl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec((0u8..3, -3i64..=3), 1..5).prop_map(|steps| {
        steps.into_iter().fold(Mat2::identity(), |g, (kind, k)| {
            let s = match kind {
                0 => Mat2::new(1, k, 0, 1),
                1 => Mat2::new(1, 0, k, 1),
                _ => Mat2::new(0, 1, 1, 0),
            };
            g.mul(&s)
        })
    })
}

fn ncpoly(p: &QSeriesParams) -> impl Strategy<Value = NCPoly> {
    let p = *p;
    prop::collection::vec((0u32..3, 0u32..3, 0u32..4, -3i64..=3), 1..5).prop_map(move |terms| {
        terms.into_iter().fold(NCPoly::zero(&p), |acc, (a, b, k, c)| {
            let mut m = NCPoly::zero(&p);
            for _ in 0..c.unsigned_abs() {
                m = m.add(&NCPoly::monomial(&p, a, b, k));
            }
            if c < 0 {
                acc.sub(&m)
            } else {
                acc.add(&m)
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative_and_trace_additive((x, y) in pair()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x + &y).trace(), x.trace() + y.trace());
        prop_assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn exact_sign_matches_embedding(x in elem()) {
        let f = x.to_f64();
        prop_assume!(f.abs() > 1e-9);
        prop_assert_eq!(x.sign(), if f > 0.0 { 1 } else { -1 });
    }

    #[test]
    fn delta_is_basis_invariant((l1, l2) in pair(), g in gl2z()) {
        let Ok(l) = Pseudolattice::new(l1.clone(), l2.clone()) else { return Ok(()) };
        let a = |n: &num_bigint::BigInt| num_rational::BigRational::from_integer(n.clone());
        let m1 = &l1.scale(&a(&g.a)) + &l2.scale(&a(&g.b));
        let m2 = &l1.scale(&a(&g.c)) + &l2.scale(&a(&g.d));
        let m = Pseudolattice::new(m1, m2).unwrap();
        prop_assert!(m.same_lattice(&l));
        prop_assert_eq!(delta(&m), delta(&l));
        prop_assert_eq!(&delta(&l) * &delta(&dual_pseudolattice(&l)), QuadElem::one(l.d));
    }

    #[test]
    fn dual_is_involutive((l1, l2) in pair()) {
        let Ok(l) = Pseudolattice::new(l1, l2) else { return Ok(()) };
        prop_assert!(dual_pseudolattice(&dual_pseudolattice(&l)).same_lattice(&l));
    }

    #[test]
    fn equivalence_witness_is_exact(theta in irrational(), g in gl2z()) {
        let target = morita_act(&g, &theta).unwrap().target;
        let w = gl2z_equivalent(&target, &theta).unwrap();
        prop_assert!(w.is_some());
        let w = w.unwrap();
        prop_assert_eq!(w.act(&theta).unwrap(), target);
        prop_assert!(w.cocycle(&theta).sign() > 0);
    }

    #[test]
    fn morita_cocycle_is_multiplicative(theta in irrational(), g in gl2z(), h in gl2z()) {
        let c = morita_compose(&g, &h, &theta).unwrap();
        prop_assert!(c.exact);
        prop_assert_eq!(c.j_product.clone(), &c.j_outer * &c.j_inner);
        prop_assert!(c.j_product.sign() > 0);
    }

    #[test]
    fn twisted_product_is_associative(
        (x, y, z) in {
            let p = QSeriesParams::new(4, 12, 0).unwrap();
            (ncpoly(&p), ncpoly(&p), ncpoly(&p))
        }
    ) {
        let left = nc_mul(&nc_mul(&x, &y).unwrap(), &z).unwrap();
        let right = nc_mul(&x, &nc_mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn quantum_theta_fe_per_coefficient(
        theta in 0.2f64..2.0,
        re in -0.5f64..0.5,
        im in 0.6f64..2.0,
        g in (-2i64..=2, -2i64..=2),
        dual in any::<bool>(),
    ) {
        let d = EmbeddedLattice::rotation(theta).unwrap();
        let t = SiegelPoint::diagonal(&[Complex64::new(re, im)]).unwrap();
        let s = if dual { qtheta_dual_coeffs(&d, &t, 6) } else { qtheta_coeffs(&d, &t, 6) }.unwrap();
        prop_assert!(qtheta_fe_residual(&s, &[g.0, g.1], Multiplier::Corrected).unwrap() < 1e-12);
    }

    #[test]
    fn rm_theta_depends_only_on_the_coset(n1 in -3i64..=3, n2 in -3i64..=3) {
        let spec = worked_example();
        let mut shifted = spec.clone();
        shifted.l0 = &spec.l0 + &spec.lattice.element(&n1.into(), &n2.into());
        let v = Complex64::new(0.1, 1.0);
        let a = theta_rm(&spec, v, 1e-13).unwrap().value;
        let b = theta_rm(&shifted, v, 1e-13).unwrap().value;
        prop_assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn euler_coefficients_up_to_six() {
    let p = QSeriesParams::new(6, 48, 0).unwrap();
    let e = eq_series(&NCPoly::u(&p)).unwrap();
    for k in 0..=6 {
        assert_eq!(e.coefficient(k, 0), euler_coefficient(k, 48), "k = {}", k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sign_agrees_with_float_for_large_entries(i in 0..FIELDS.len(), a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000) {
        let x = QuadElem::from_ints(a, b, FIELDS[i]);
        let f = x.to_f64();
        let expect = if x.is_zero() { 0 } else if f > 0.0 { 1 } else { -1 };
        prop_assert_eq!(x.sign(), expect);
    }
}
