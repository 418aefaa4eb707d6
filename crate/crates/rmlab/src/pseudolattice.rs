//! Rank-two pseudolattices `L = Z l1 + Z l2` inside a real quadratic field.
//!
//! Everything here is exact except the geodesic helpers, which map
//! elements to `C` through `l -> l e^{t/2} + i l' e^{-t/2}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quadfield::{check_d, omega, order_of_conductor, parse_rational, Order, QuadElem};

/// Integer 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn cf_step(q: &BigInt) -> Self {
        Mat2 { a: q.clone(), b: BigInt::one(), c: BigInt::one(), d: BigInt::zero() }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<Mat2> {
        let det = self.det();
        if det.abs() != BigInt::one() {
            return None;
        }
        Some(Mat2 { a: &self.d * &det, b: -&self.b * &det, c: -&self.c * &det, d: &self.a * &det })
    }

    /// Cocycle `c x + d`.
    pub fn cocycle(&self, x: &QuadElem) -> QuadElem {
        x.scale(&BigRational::from_integer(self.c.clone())).add_rational(&BigRational::from_integer(self.d.clone()))
    }

    /// Fractional linear action `(a x + b) / (c x + d)`.
    pub fn act(&self, x: &QuadElem) -> Result<QuadElem> {
        let num = x
            .scale(&BigRational::from_integer(self.a.clone()))
            .add_rational(&BigRational::from_integer(self.b.clone()));
        num.try_div(&self.cocycle(x))
    }

    pub fn to_array(&self) -> [[String; 2]; 2] {
        [[self.a.to_string(), self.b.to_string()], [self.c.to_string(), self.d.to_string()]]
    }
}

impl std::fmt::Display for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Complete quotient `(p + m sqrt d) / q` of the continued fraction algorithm,
/// normalised so that `q | D - p^2` with `D = m^2 d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CfState {
    pub p: BigInt,
    pub q: BigInt,
    pub m: BigInt,
    pub d: i64,
}

impl CfState {
    pub fn from_elem(x: &QuadElem) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::InvalidInput(format!("{} is rational", x.pretty())));
        }
        let (a, b, q) = x.to_common();
        let (mut p, mut q, m) = if b.is_positive() { (a, q, b) } else { (-a, -q, -b) };
        let dd = &m * &m * BigInt::from(x.d);
        let mut m = m;
        if !(&dd - &p * &p).is_multiple_of(&q) {
            let aq = q.abs();
            p *= &aq;
            m *= &aq;
            q *= &aq;
        }
        Ok(CfState { p, q, m, d: x.d })
    }

    fn big_d(&self) -> BigInt {
        &self.m * &self.m * BigInt::from(self.d)
    }

    pub fn value(&self) -> QuadElem {
        let q = BigRational::from_integer(self.q.clone());
        QuadElem::new(
            BigRational::from_integer(self.p.clone()) / &q,
            BigRational::from_integer(self.m.clone()) / &q,
            self.d,
        )
    }

    pub fn partial_quotient(&self) -> BigInt {
        let s = self.big_d().sqrt();
        if self.q.is_positive() {
            (&self.p + &s).div_floor(&self.q)
        } else {
            (&self.p + &s + BigInt::one()).div_floor(&self.q)
        }
    }

    pub fn next(&self, a: &BigInt) -> CfState {
        let p = a * &self.q - &self.p;
        let q = (self.big_d() - &p * &p) / &self.q;
        CfState { p, q, m: self.m.clone(), d: self.d }
    }
}

/// Continued fraction data: `preperiod` always carries the integer part.
#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion {
    pub terms: Vec<BigInt>,
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
    pub states: Vec<CfState>,
}

impl CfExpansion {
    pub fn notation(&self) -> String {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let head = &self.preperiod[0];
        let rest = join(&self.preperiod[1..]);
        if rest.is_empty() {
            format!("[{}; ({})]", head, join(&self.period))
        } else {
            format!("[{}; {}, ({})]", head, rest, join(&self.period))
        }
    }

    pub fn term(&self, i: usize) -> &BigInt {
        let k = self.preperiod.len();
        if i < k {
            &self.preperiod[i]
        } else {
            &self.period[(i - k) % self.period.len()]
        }
    }

    /// Product of the step matrices for the first `i` quotients.
    pub fn prefix_matrix(&self, i: usize) -> Mat2 {
        (0..i).fold(Mat2::identity(), |m, j| m.mul(&Mat2::cf_step(self.term(j))))
    }
}

/// Quadratic-irrational continued fraction with exact period detection.
pub fn cf_expand(theta: &QuadElem, n: usize) -> Result<CfExpansion> {
    let mut state = CfState::from_elem(theta)?;
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    let mut states = Vec::new();
    let start = loop {
        let idx = quotients.len();
        if idx >= 1 {
            if let Some(&j) = seen.get(&(state.p.clone(), state.q.clone())) {
                break j;
            }
            seen.insert((state.p.clone(), state.q.clone()), idx);
        }
        let a = state.partial_quotient();
        let next = state.next(&a);
        states.push(state);
        quotients.push(a);
        state = next;
    };
    let preperiod = quotients[..start].to_vec();
    let period = quotients[start..].to_vec();
    let mut exp = CfExpansion { terms: Vec::new(), preperiod, period, states };
    exp.terms = (0..n).map(|i| exp.term(i).clone()).collect();
    Ok(exp)
}

/// Witness `g` with `theta1 = g theta2` and `c theta2 + d > 0`, or `None`.
pub fn gl2z_equivalent(theta1: &QuadElem, theta2: &QuadElem) -> Result<Option<Mat2>> {
    let e1 = cf_expand(theta1, 0)?;
    let e2 = cf_expand(theta2, 0)?;
    if theta1.d != theta2.d {
        return Ok(None);
    }
    let k1 = e1.preperiod.len();
    let k2 = e2.preperiod.len();
    let mut index2: HashMap<QuadElem, usize> = HashMap::new();
    for j in k2..k2 + e2.period.len() {
        index2.insert(e2.states[j].value(), j);
    }
    for i in k1..k1 + e1.period.len() {
        if let Some(&j) = index2.get(&e1.states[i].value()) {
            let m1 = e1.prefix_matrix(i);
            let m2 = e2.prefix_matrix(j).inverse_unimodular().expect("cf matrices are unimodular");
            let mut g = m1.mul(&m2);
            if g.cocycle(theta2).sign() < 0 {
                g = g.neg();
            }
            if &g.act(theta2)? != theta1 {
                return Err(Error::Numeric("equivalence witness failed exact check".into()));
            }
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Stabiliser of a quadratic irrational.
#[derive(Clone, Debug, PartialEq)]
pub struct Stabilizer {
    pub g: Mat2,
    pub eps: QuadElem,
    pub g_sl2: Mat2,
    pub eps_sl2: QuadElem,
}

pub fn stabilizer_matrix(theta: &QuadElem) -> Result<Stabilizer> {
    let e = cf_expand(theta, 0)?;
    let k = e.preperiod.len();
    let m = e.prefix_matrix(k);
    let p = e.period.iter().fold(Mat2::identity(), |acc, a| acc.mul(&Mat2::cf_step(a)));
    let g = m.mul(&p).mul(&m.inverse_unimodular().expect("unimodular"));
    if &g.act(theta)? != theta {
        return Err(Error::Numeric("stabilizer does not fix theta".into()));
    }
    let eps = g.cocycle(theta);
    let (g_sl2, eps_sl2) = if g.det().is_one() { (g.clone(), eps.clone()) } else { (g.mul(&g), &eps * &eps) };
    Ok(Stabilizer { g, eps, g_sl2, eps_sl2 })
}

/// `Z l1 + Z l2` with nonzero `l1 l2' - l1' l2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pseudolattice {
    pub d: i64,
    pub l1: QuadElem,
    pub l2: QuadElem,
    /// Sign of `l1 l2' - l1' l2`.
    pub orientation: i32,
}

impl Pseudolattice {
    pub fn new(l1: QuadElem, l2: QuadElem) -> Result<Self> {
        if l1.d != l2.d {
            return Err(Error::MixedField(l1.d, l2.d));
        }
        check_d(l1.d)?;
        let det = &l1 * &l2.conj() - &l1.conj() * &l2;
        if det.is_zero() {
            return Err(Error::InvalidInput("basis is Q-dependent".into()));
        }
        Ok(Pseudolattice { d: l1.d, orientation: det.sign(), l1, l2 })
    }

    pub fn from_ints(d: i64, l1: (i64, i64), l2: (i64, i64)) -> Result<Self> {
        Pseudolattice::new(QuadElem::from_ints(l1.0, l1.1, d), QuadElem::from_ints(l2.0, l2.1, d))
    }

    /// `O_K` with basis `(omega, 1)`.
    pub fn ring_of_integers(d: i64) -> Result<Self> {
        check_d(d)?;
        Pseudolattice::new(omega(d), QuadElem::one(d))
    }

    /// `l1 l2' - l1' l2`.
    pub fn det(&self) -> QuadElem {
        &self.l1 * &self.l2.conj() - &self.l1.conj() * &self.l2
    }

    pub fn theta(&self) -> QuadElem {
        self.l1.try_div(&self.l2).expect("nonzero basis element")
    }

    /// Rational coordinates of `x` in the basis.
    pub fn coords(&self, x: &QuadElem) -> (BigRational, BigRational) {
        let det = self.det();
        let xc = x.conj();
        let alpha = (x * &self.l2.conj() - &xc * &self.l2).try_div(&det).expect("det != 0");
        let beta = (&self.l1 * &xc - &self.l1.conj() * x).try_div(&det).expect("det != 0");
        debug_assert!(alpha.is_rational() && beta.is_rational());
        (alpha.a, beta.a)
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        let (a, b) = self.coords(x);
        a.is_integer() && b.is_integer()
    }

    pub fn element(&self, n1: &BigInt, n2: &BigInt) -> QuadElem {
        self.l1.scale(&BigRational::from_integer(n1.clone())) + self.l2.scale(&BigRational::from_integer(n2.clone()))
    }

    pub fn scale(&self, a: &QuadElem) -> Result<Self> {
        Pseudolattice::new(a * &self.l1, a * &self.l2)
    }

    /// Same lattice (as a set) as `other`.
    pub fn same_lattice(&self, other: &Pseudolattice) -> bool {
        self.contains(&other.l1) && self.contains(&other.l2) && other.contains(&self.l1) && other.contains(&self.l2)
    }

    /// Parse `"basis=(a1 b1, a2 b2) d=<d>"`; each entry may also end in `/q`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse pseudolattice {:?}", text));
        let open = text.find('(').ok_or_else(bad)?;
        let close = text.find(')').ok_or_else(bad)?;
        let inner = &text[open + 1..close];
        let rest = &text[close + 1..];
        let d: i64 = rest.trim().strip_prefix("d=").ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        check_d(d)?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let mut elems = Vec::new();
        for p in parts {
            let toks: Vec<&str> = p.split_whitespace().collect();
            if toks.len() != 2 && toks.len() != 3 {
                return Err(bad());
            }
            let a = parse_rational(toks[0]).ok_or_else(bad)?;
            let b = parse_rational(toks[1]).ok_or_else(bad)?;
            let mut x = QuadElem::new(a, b, d);
            if toks.len() == 3 {
                let q = toks[2].strip_prefix('/').and_then(parse_rational).ok_or_else(bad)?;
                if q.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                x = x.scale(&q.recip());
            }
            elems.push(x);
        }
        let l2 = elems.pop().unwrap();
        let l1 = elems.pop().unwrap();
        Pseudolattice::new(l1, l2)
    }

    pub fn to_text(&self) -> String {
        let part = |x: &QuadElem| {
            let (a, b, q) = x.to_common();
            if q.is_one() {
                format!("{} {}", a, b)
            } else {
                format!("{} {} /{}", a, b, q)
            }
        };
        format!("basis=({}, {}) d={}", part(&self.l1), part(&self.l2), self.d)
    }
}

/// `{a in K : a L in L}` as `Z + f O_K`; `f` is the least integer with `f omega L in L`.
pub fn endomorphism_ring(l: &Pseudolattice) -> Order {
    let w = omega(l.d);
    let mut f = BigInt::one();
    for x in [&l.l1, &l.l2] {
        let (a, b) = l.coords(&(&w * x));
        f = f.lcm(a.denom()).lcm(b.denom());
    }
    let f: i64 = f.try_into().expect("conductor fits in i64");
    order_of_conductor(l.d, f).expect("valid conductor")
}

/// `{m in K : tr(l' m) in Z for all l in L}` with the dual basis `(-l2/D, l1/D)`.
pub fn dual_pseudolattice(l: &Pseudolattice) -> Pseudolattice {
    let det = l.det();
    let m1 = (-&l.l2).try_div(&det).expect("det != 0");
    let m2 = l.l1.try_div(&det).expect("det != 0");
    Pseudolattice::new(m1, m2).expect("dual basis is independent")
}

/// `|l1 l2' - l1' l2|`.
pub fn delta(l: &Pseudolattice) -> QuadElem {
    l.det().abs()
}

/// Reduced invariant: `theta - floor(theta)` in `(0, 1)` with the translation used.
pub fn normal_form(l: &Pseudolattice) -> (QuadElem, Mat2) {
    let theta = l.theta();
    let n = theta.floor();
    let g = Mat2 { a: BigInt::one(), b: -&n, c: BigInt::zero(), d: BigInt::one() };
    let red = g.act(&theta).expect("translation");
    (red, g)
}

/// Point `tau_t` on the geodesic joining `theta` and `theta_p > theta`.
pub fn geodesic_tau(theta: f64, theta_p: f64, t: f64) -> Result<Complex64> {
    if !(theta_p > theta) {
        return Err(Error::Domain(format!("need theta' > theta, got {} <= {}", theta_p, theta)));
    }
    let (ep, em) = (t.exp(), (-t).exp());
    let s = ep + em;
    Ok(Complex64::new((theta * ep + theta_p * em) / s, (theta_p - theta) / s))
}

/// `x e^{t/2} + i x' e^{-t/2}`.
pub fn lift_point(x: &QuadElem, t: f64) -> Complex64 {
    Complex64::new(x.to_f64() * (t / 2.0).exp(), x.conj_f64() * (-t / 2.0).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicLift {
    pub basis: [Complex64; 2],
    pub lambda0: Complex64,
    pub mu0: Complex64,
}

pub fn geodesic_lift(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem, t: f64) -> GeodesicLift {
    GeodesicLift {
        basis: [lift_point(&l.l1, t), lift_point(&l.l2, t)],
        lambda0: lift_point(l0, t),
        mu0: lift_point(m0, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> QuadElem {
        QuadElem::from_frac(1, 1, 2, 5)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn continued_fractions() {
        let e = cf_expand(&phi(), 5).unwrap();
        assert_eq!((e.preperiod.clone(), e.period.clone()), (ints(&[1]), ints(&[1])));
        assert_eq!(e.notation(), "[1; (1)]");
        let e = cf_expand(&QuadElem::sqrt_d(2), 4).unwrap();
        assert_eq!((e.preperiod, e.period), (ints(&[1]), ints(&[2])));
        let e = cf_expand(&QuadElem::sqrt_d(3), 4).unwrap();
        assert_eq!((e.preperiod, e.period), (ints(&[1]), ints(&[1, 2])));
        assert!(cf_expand(&QuadElem::from_ints(3, 0, 2), 3).is_err());
    }

    #[test]
    fn equivalence_witnesses() {
        let r2 = QuadElem::sqrt_d(2);
        let g = gl2z_equivalent(&(&r2 + &QuadElem::one(2)), &r2).unwrap().unwrap();
        assert_eq!(g, Mat2::new(1, 1, 0, 1));
        let g = gl2z_equivalent(&r2.inv().unwrap(), &r2).unwrap().unwrap();
        assert_eq!(g, Mat2::new(0, 1, 1, 0));
        let half = QuadElem::from_frac(0, 1, 2, 2);
        let g = gl2z_equivalent(&r2, &half).unwrap().unwrap();
        assert_eq!(g.act(&half).unwrap(), r2);
        assert!(gl2z_equivalent(&r2, &QuadElem::from_ints(0, 2, 2)).unwrap().is_none());
    }

    #[test]
    fn conductors() {
        let l = Pseudolattice::new(phi(), QuadElem::one(5)).unwrap();
        assert_eq!(endomorphism_ring(&l).f, 1);
        let l = Pseudolattice::from_ints(5, (0, 1), (1, 0)).unwrap();
        assert_eq!(endomorphism_ring(&l).f, 2);
        let l = Pseudolattice::from_ints(2, (0, 3), (1, 0)).unwrap();
        assert_eq!(endomorphism_ring(&l).f, 3);
    }

    #[test]
    fn duals_and_covolumes() {
        let ok = Pseudolattice::ring_of_integers(5).unwrap();
        let dual = dual_pseudolattice(&ok);
        let scaled = ok.scale(&QuadElem::sqrt_d(5).inv().unwrap()).unwrap();
        assert!(dual.same_lattice(&scaled));
        assert_eq!(delta(&ok), QuadElem::sqrt_d(5));
        assert_eq!(&delta(&ok) * &delta(&dual), QuadElem::one(5));
        let l = Pseudolattice::from_ints(2, (0, 1), (1, 0)).unwrap();
        assert_eq!(delta(&l), QuadElem::from_ints(0, 2, 2));
        assert_eq!(delta(&ok.scale(&phi()).unwrap()), QuadElem::sqrt_d(5));
    }

    #[test]
    fn stabilizers() {
        let s = stabilizer_matrix(&phi()).unwrap();
        assert_eq!(s.g, Mat2::new(1, 1, 1, 0));
        assert_eq!(s.eps, phi());
        assert_eq!(s.g_sl2, Mat2::new(2, 1, 1, 1));
        assert_eq!(s.eps_sl2, QuadElem::from_frac(3, 1, 2, 5));
        let s = stabilizer_matrix(&QuadElem::sqrt_d(2)).unwrap();
        assert_eq!(s.g, Mat2::new(1, 2, 1, 1));
        assert_eq!(s.eps, QuadElem::from_ints(1, 1, 2));
        assert_eq!(s.g_sl2, Mat2::new(3, 4, 2, 3));
        assert_eq!(s.eps_sl2, QuadElem::from_ints(3, 2, 2));
        let s = stabilizer_matrix(&QuadElem::sqrt_d(3)).unwrap();
        assert_eq!(s.eps, QuadElem::from_ints(2, 1, 3));
    }

    #[test]
    fn geodesic_points() {
        let s5 = 5f64.sqrt();
        let tau = geodesic_tau((1.0 - s5) / 2.0, (1.0 + s5) / 2.0, 0.0).unwrap();
        assert!((tau - Complex64::new(0.5, s5 / 2.0)).norm() < 1e-15);
        let tau = geodesic_tau((1.0 - s5) / 2.0, (1.0 + s5) / 2.0, 1.0).unwrap();
        assert!(((tau - 0.5).norm() - s5 / 2.0).abs() < 1e-14);
        assert!(geodesic_tau(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn lift_at_zero() {
        let l = Pseudolattice::new(phi(), QuadElem::one(5)).unwrap();
        let lift = geodesic_lift(&l, &QuadElem::zero(5), &QuadElem::zero(5), 0.0);
        let p = phi();
        assert!((lift.basis[0] - Complex64::new(p.to_f64(), p.conj_f64())).norm() < 1e-15);
        assert_eq!(lift.basis[1], Complex64::new(1.0, 1.0));
        assert_eq!(lift.lambda0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn parse_round_trip() {
        let l = Pseudolattice::parse("basis=(1/2 1/2, 1 0) d=5").unwrap();
        assert_eq!(l.l1, phi());
        assert_eq!(Pseudolattice::parse(&l.to_text()).unwrap(), l);
        assert!(Pseudolattice::parse("basis=(1 0, 2 0) d=5").is_err());
    }
}
