//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.
//!
//! A [`QuadElem`] stores `a + b sqrt(d)` with arbitrary precision rationals.
//! Mixing two different `d` is an error; the operator impls panic on it and
//! the `try_*` methods report [`Error::MixedField`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element `a + b sqrt(d)` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

pub fn is_squarefree(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2i64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn check_d(d: i64) -> Result<()> {
    if is_squarefree(d) {
        Ok(())
    } else {
        Err(Error::NotSquarefree(d))
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn sign_rat(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        QuadElem { a, b, d }
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        QuadElem::new(rat(a), rat(b), d)
    }

    /// `(a + b sqrt d) / q` with integer data.
    pub fn from_frac(a: i64, b: i64, q: i64, d: i64) -> Self {
        let q = BigInt::from(q);
        QuadElem::new(BigRational::new(BigInt::from(a), q.clone()), BigRational::new(BigInt::from(b), q), d)
    }

    pub fn from_rational(a: BigRational, d: i64) -> Self {
        QuadElem::new(a, BigRational::zero(), d)
    }

    pub fn zero(d: i64) -> Self {
        QuadElem::from_ints(0, 0, d)
    }

    pub fn one(d: i64) -> Self {
        QuadElem::from_ints(1, 0, d)
    }

    pub fn sqrt_d(d: i64) -> Self {
        QuadElem::from_ints(0, 1, d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::MixedField(self.d, other.d))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(QuadElem::new(&self.a + &other.a, &self.b + &other.b, self.d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(QuadElem::new(&self.a - &other.a, &self.b - &other.b, self.d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let d = rat(self.d);
        let a = &self.a * &other.a + d * &self.b * &other.b;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(QuadElem::new(a, b, self.d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadElem::new(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn conj(&self) -> Self {
        QuadElem::new(self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(self.d) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadElem::new(&self.a * r, &self.b * r, self.d)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&rat(n))
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        QuadElem::new(&self.a + r, self.b.clone(), self.d)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QuadElem::one(self.d);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of the real number `a + b sqrt d`.
    pub fn sign(&self) -> i32 {
        let sa = sign_rat(&self.a);
        let sb = sign_rat(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with d b^2
        let lhs = &self.a * &self.a;
        let rhs = rat(self.d) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Float embedding with the positive square root, free of cancellation.
    pub fn to_f64(&self) -> f64 {
        let sa = sign_rat(&self.a);
        let sb = sign_rat(&self.b);
        let r = (self.d as f64).sqrt();
        if sa * sb >= 0 {
            rat_to_f64(&self.a) + rat_to_f64(&self.b) * r
        } else {
            let n = rat_to_f64(&self.norm());
            n / (rat_to_f64(&self.a) - rat_to_f64(&self.b) * r)
        }
    }

    /// Float value of the conjugate `a - b sqrt d`.
    pub fn conj_f64(&self) -> f64 {
        self.conj().to_f64()
    }

    pub fn floor(&self) -> BigInt {
        let est = self.to_f64().floor();
        let mut n = if est.is_finite() {
            BigInt::from(est as i128)
        } else {
            // very large values: fall back to the rational part bound
            (&self.a + &self.b * rat(self.d.sqrt() + 1)).floor().to_integer()
        };
        loop {
            let diff = self.add_rational(&-BigRational::from_integer(n.clone()));
            if diff.sign() < 0 {
                n -= 1;
                continue;
            }
            let next = self.add_rational(&-BigRational::from_integer(&n + 1));
            if next.sign() >= 0 {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Algebraic integer test: trace and norm integral.
    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }

    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        (self - other).sign().cmp(&0)
    }

    /// Common denominator representation `(A + B sqrt d) / q` with `q > 0`.
    pub fn to_common(&self) -> (BigInt, BigInt, BigInt) {
        let q = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * BigRational::from_integer(q.clone())).to_integer();
        let b = (&self.b * BigRational::from_integer(q.clone())).to_integer();
        (a, b, q)
    }

    /// Machine text form `"A B d"` or `"A B d /q"`.
    pub fn to_text(&self) -> String {
        let (a, b, q) = self.to_common();
        if q.is_one() {
            format!("{} {} {}", a, b, self.d)
        } else {
            format!("{} {} {} /{}", a, b, self.d, q)
        }
    }

    /// Human form such as `(1+√5)/2` or `3+2√2`.
    pub fn pretty(&self) -> String {
        let (a, b, q) = self.to_common();
        let mut s = String::new();
        if b.is_zero() {
            s.push_str(&a.to_string());
        } else {
            let root = format!("√{}", self.d);
            let bpart = if b.is_one() {
                root
            } else if b == -BigInt::one() {
                format!("-{}", root)
            } else {
                format!("{}{}", b, root)
            };
            if a.is_zero() {
                s.push_str(&bpart);
            } else if b.is_negative() {
                s.push_str(&format!("{}{}", a, bpart));
            } else {
                s.push_str(&format!("{}+{}", a, bpart));
            }
        }
        if q.is_one() {
            s
        } else if b.is_zero() || a.is_zero() {
            format!("{}/{}", s, q)
        } else {
            format!("({})/{}", s, q)
        }
    }

    /// Parse `"a b d"` or `"a b d /q"`; `a` and `b` may be written `p/q`.
    pub fn parse(text: &str) -> Result<Self> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let bad = || Error::InvalidInput(format!("cannot parse element {:?}", text));
        if toks.len() != 3 && toks.len() != 4 {
            return Err(bad());
        }
        let a = parse_rational(toks[0]).ok_or_else(bad)?;
        let b = parse_rational(toks[1]).ok_or_else(bad)?;
        let d: i64 = toks[2].parse().map_err(|_| bad())?;
        check_d(d)?;
        let mut x = QuadElem::new(a, b, d);
        if toks.len() == 4 {
            let q = toks[3].strip_prefix('/').ok_or_else(bad)?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            x = x.scale(&BigRational::new(BigInt::one(), q));
        }
        Ok(x)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: &QuadElem) -> QuadElem {
                self.$try(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $tr<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: QuadElem) -> QuadElem {
                (&self).$try(&rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-self.a.clone(), -self.b.clone(), self.d)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// Operation selector mirroring the command-line `arith` vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Conj,
    Norm,
    Trace,
    Sign,
}

/// Result of [`qf_arith`].
#[derive(Clone, Debug, PartialEq)]
pub enum ArithValue {
    Elem(QuadElem),
    Rational(BigRational),
    Sign(i32),
}

pub fn qf_arith(x: &QuadElem, y: Option<&QuadElem>, op: ArithOp) -> Result<ArithValue> {
    let need_y = || y.ok_or_else(|| Error::InvalidInput("second operand required".into()));
    Ok(match op {
        ArithOp::Add => ArithValue::Elem(x.try_add(need_y()?)?),
        ArithOp::Mul => ArithValue::Elem(x.try_mul(need_y()?)?),
        ArithOp::Inv => ArithValue::Elem(x.inv()?),
        ArithOp::Conj => ArithValue::Elem(x.conj()),
        ArithOp::Norm => ArithValue::Rational(x.norm()),
        ArithOp::Trace => ArithValue::Rational(x.trace()),
        ArithOp::Sign => ArithValue::Sign(x.sign()),
    })
}

/// `omega` with `O_K = Z + Z omega`.
pub fn omega(d: i64) -> QuadElem {
    if d.rem_euclid(4) == 1 {
        QuadElem::from_frac(1, 1, 2, d)
    } else {
        QuadElem::sqrt_d(d)
    }
}

pub fn integer_basis(d: i64) -> Result<(QuadElem, QuadElem)> {
    check_d(d)?;
    Ok((QuadElem::one(d), omega(d)))
}

/// Coordinates `(m, n)` of `x = m + n omega`, rational in general.
pub fn ok_coords(x: &QuadElem) -> (BigRational, BigRational) {
    if x.d.rem_euclid(4) == 1 {
        let n = &x.b + &x.b;
        let m = &x.a - &x.b;
        (m, n)
    } else {
        (x.a.clone(), x.b.clone())
    }
}

pub fn from_ok_coords(m: &BigInt, n: &BigInt, d: i64) -> QuadElem {
    let w = omega(d);
    w.scale(&BigRational::from_integer(n.clone())).add_rational(&BigRational::from_integer(m.clone()))
}

/// Fundamental unit data of `O_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitInfo {
    pub unit: QuadElem,
    pub norm: i32,
    pub totally_positive: QuadElem,
}

pub const DEFAULT_PELL_CAP: u64 = 10_000_000;

pub fn fundamental_unit(d: i64) -> Result<UnitInfo> {
    fundamental_unit_with_cap(d, DEFAULT_PELL_CAP)
}

/// Pell search over `b = 1, 2, ...`: the first `b` with `d b^2 +- 1` (or `+- 4`
/// in the half-integral case) a perfect square gives the smallest unit above 1.
pub fn fundamental_unit_with_cap(d: i64, cap: u64) -> Result<UnitInfo> {
    check_d(d)?;
    let half = d.rem_euclid(4) == 1;
    let dd = d as u128;
    for b in 1..=cap as u128 {
        let db2 = dd * b * b;
        let deltas: [(u128, bool, i32); 2] =
            if half { [(db2 - 4, false, -1), (db2 + 4, true, 1)] } else { [(db2 - 1, false, -1), (db2 + 1, true, 1)] };
        // smaller a first: a^2 = db^2 - k gives the smaller unit
        for (a2, _, norm) in deltas {
            let a = a2.sqrt();
            if a * a == a2 && a > 0 {
                let unit = if half {
                    QuadElem::from_frac(a as i64, b as i64, 2, d)
                } else {
                    QuadElem::from_ints(a as i64, b as i64, d)
                };
                let tp = if norm == 1 { unit.clone() } else { unit.pow(2) };
                return Ok(UnitInfo { unit, norm, totally_positive: tp });
            }
        }
    }
    Err(Error::SearchBound(cap))
}

/// The order `R_f = Z + f O_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Order {
    pub d: i64,
    pub f: u64,
    pub basis: (QuadElem, QuadElem),
}

impl Order {
    pub fn contains(&self, x: &QuadElem) -> bool {
        if x.d != self.d {
            return false;
        }
        let (m, n) = ok_coords(x);
        let f = BigRational::from_integer(BigInt::from(self.f));
        m.is_integer() && n.is_integer() && (n / f).is_integer()
    }
}

pub fn order_of_conductor(d: i64, f: i64) -> Result<Order> {
    check_d(d)?;
    if f < 1 {
        return Err(Error::InvalidInput(format!("conductor must be >= 1, got {}", f)));
    }
    Ok(Order { d, f: f as u64, basis: (QuadElem::one(d), omega(d).scale_int(f)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, qq: i64, d: i64) -> QuadElem {
        QuadElem::from_frac(a, b, qq, d)
    }

    #[test]
    fn golden_ratio_norm_trace_sign() {
        let phi = q(1, 1, 2, 5);
        assert_eq!(phi.norm(), rat(-1));
        assert_eq!(phi.trace(), rat(1));
        assert_eq!(q(1, -1, 2, 5).sign(), -1);
    }

    #[test]
    fn integer_bases() {
        assert_eq!(integer_basis(5).unwrap().1, q(1, 1, 2, 5));
        assert_eq!(integer_basis(2).unwrap().1, QuadElem::sqrt_d(2));
        assert_eq!(integer_basis(13).unwrap().1, q(1, 1, 2, 13));
        assert!(integer_basis(12).is_err());
    }

    #[test]
    fn units() {
        let u5 = fundamental_unit(5).unwrap();
        assert_eq!(u5.unit, q(1, 1, 2, 5));
        assert_eq!(u5.norm, -1);
        assert_eq!(u5.totally_positive, q(3, 1, 2, 5));
        let u2 = fundamental_unit(2).unwrap();
        assert_eq!(u2.unit, QuadElem::from_ints(1, 1, 2));
        assert_eq!(u2.totally_positive, QuadElem::from_ints(3, 2, 2));
        let u3 = fundamental_unit(3).unwrap();
        assert_eq!(u3.unit, QuadElem::from_ints(2, 1, 3));
        assert_eq!(u3.norm, 1);
        assert_eq!(u3.totally_positive, u3.unit);
    }

    #[test]
    fn orders() {
        let o = order_of_conductor(5, 2).unwrap();
        assert_eq!(o.basis.1, QuadElem::from_ints(1, 1, 5));
        assert!(o.contains(&QuadElem::sqrt_d(5)));
        assert!(!o.contains(&q(1, 1, 2, 5)));
        assert_eq!(order_of_conductor(2, 3).unwrap().basis.1, QuadElem::from_ints(0, 3, 2));
        assert!(order_of_conductor(2, 0).is_err());
    }

    #[test]
    fn mixed_field_is_error() {
        let x = QuadElem::sqrt_d(2);
        let y = QuadElem::sqrt_d(3);
        assert_eq!(x.try_mul(&y), Err(Error::MixedField(2, 3)));
        assert_eq!(QuadElem::zero(2).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn text_round_trip() {
        let phi = QuadElem::parse("1 1 5 /2").unwrap();
        assert_eq!(phi, q(1, 1, 2, 5));
        assert_eq!(phi.to_text(), "1 1 5 /2");
        assert_eq!(phi.pretty(), "(1+√5)/2");
        assert_eq!(QuadElem::parse("1/2 1/2 5").unwrap(), phi);
        assert!(QuadElem::parse("1 1").is_err());
    }

    #[test]
    fn floor_is_exact() {
        assert_eq!(q(1, 1, 2, 5).floor(), BigInt::from(1));
        assert_eq!(q(-1, -1, 2, 5).floor(), BigInt::from(-2));
        assert_eq!(QuadElem::from_ints(0, 1, 2).floor(), BigInt::from(1));
    }

    #[test]
    fn float_embedding_of_small_conjugate() {
        let e = QuadElem::from_ints(26, 15, 3);
        let c = e.conj_f64();
        assert!((c * e.to_f64() - 1.0).abs() < 1e-14);
    }
}
