//! Truncated q-series in two variables with `u v = q^2 v u`.
//!
//! Monomials are kept in the normal order `v^b u^a`, coefficients are
//! integer polynomials in `q` cut at degree `qdeg`, and total degree in
//! `u, v` is cut at `ndeg`. The q-exponential is
//! `e_q(t) = prod_{n >= 0} (1 + q^{2n+1} t)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::special::{dilog, rogers};

/// Truncation and the middle scaling `mu = q^mu_exp` of the pentagon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QSeriesParams {
    pub ndeg: u32,
    pub qdeg: u32,
    pub mu_exp: u32,
}

impl QSeriesParams {
    pub fn new(ndeg: u32, qdeg: u32, mu_exp: u32) -> Result<Self> {
        if qdeg < 1 {
            return Err(Error::InvalidInput("qdeg must be >= 1".into()));
        }
        Ok(QSeriesParams { ndeg, qdeg, mu_exp })
    }
}

/// Integer polynomial in `q` truncated above degree `qdeg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<BigInt>,
}

impl QPoly {
    pub fn zero(qdeg: u32) -> Self {
        QPoly { coeffs: vec![BigInt::zero(); qdeg as usize + 1] }
    }

    /// `c q^k`, dropped when `k > qdeg`.
    pub fn monomial(c: i64, k: u32, qdeg: u32) -> Self {
        let mut p = QPoly::zero(qdeg);
        if k <= qdeg {
            p.coeffs[k as usize] = c.into();
        }
        p
    }

    pub fn from_coeffs(c: &[i64], qdeg: u32) -> Self {
        let mut p = QPoly::zero(qdeg);
        for (k, v) in c.iter().enumerate().take(qdeg as usize + 1) {
            p.coeffs[k] = (*v).into();
        }
        p
    }

    pub fn qdeg(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len();
        let mut out = QPoly::zero(self.qdeg());
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: u32) -> QPoly {
        let mut out = QPoly::zero(self.qdeg());
        for (i, a) in self.coeffs.iter().enumerate() {
            if i + (k as usize) < out.coeffs.len() {
                out.coeffs[i + k as usize] = a.clone();
            }
        }
        out
    }

    /// `self / (1 - q^k)` as a truncated power series.
    pub fn div_one_minus(&self, k: u32) -> QPoly {
        let mut out = self.clone();
        for i in k as usize..out.coeffs.len() {
            let prev = out.coeffs[i - k as usize].clone();
            out.coeffs[i] += prev;
        }
        out
    }

    pub fn max_abs(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            let unit = mag == BigInt::from(1);
            match k {
                0 => write!(f, "{}", mag)?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{}q", mag)?,
                _ if unit => write!(f, "q^{}", k)?,
                _ => write!(f, "{}q^{}", mag, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `sum c_{a,b}(q) v^b u^a` with `a + b <= ndeg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly {
    pub ndeg: u32,
    pub qdeg: u32,
    /// Keyed by `(a, b)` = (degree in `u`, degree in `v`).
    pub terms: BTreeMap<(u32, u32), QPoly>,
}

impl NCPoly {
    pub fn zero(p: &QSeriesParams) -> Self {
        NCPoly { ndeg: p.ndeg, qdeg: p.qdeg, terms: BTreeMap::new() }
    }

    /// `q^k v^b u^a`.
    pub fn monomial(p: &QSeriesParams, a: u32, b: u32, k: u32) -> Self {
        let mut x = NCPoly::zero(p);
        x.add_term(a, b, &QPoly::monomial(1, k, p.qdeg));
        x
    }

    pub fn one(p: &QSeriesParams) -> Self {
        NCPoly::monomial(p, 0, 0, 0)
    }

    pub fn u(p: &QSeriesParams) -> Self {
        NCPoly::monomial(p, 1, 0, 0)
    }

    pub fn v(p: &QSeriesParams) -> Self {
        NCPoly::monomial(p, 0, 1, 0)
    }

    fn add_term(&mut self, a: u32, b: u32, c: &QPoly) {
        if a + b > self.ndeg || c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(|| QPoly::zero(c.qdeg()));
        *e = e.add(c);
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coefficient(&self, a: u32, b: u32) -> QPoly {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| QPoly::zero(self.qdeg))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for ((a, b), c) in &o.terms {
            out.add_term(*a, *b, c);
        }
        out
    }

    pub fn sub(&self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for ((a, b), c) in &o.terms {
            out.add_term(*a, *b, &c.neg());
        }
        out
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: u32) -> NCPoly {
        let mut out = NCPoly { terms: BTreeMap::new(), ..self.clone() };
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, &c.shift(k));
        }
        out
    }

    /// Largest absolute integer coefficient.
    pub fn max_abs(&self) -> BigInt {
        self.terms.values().map(QPoly::max_abs).max().unwrap_or_default()
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, b), c)| format!("({}) v^{} u^{}", c, b, a)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Normal-ordered product: `v^b u^a . v^b' u^a' = q^{2ab'} v^{b+b'} u^{a+a'}`.
pub fn nc_mul(x: &NCPoly, y: &NCPoly) -> Result<NCPoly> {
    if x.ndeg != y.ndeg || x.qdeg != y.qdeg {
        return Err(Error::InvalidInput("truncation parameters differ".into()));
    }
    let mut out = NCPoly { terms: BTreeMap::new(), ..x.clone() };
    for ((a, b), c) in &x.terms {
        for ((a2, b2), c2) in &y.terms {
            if a + b + a2 + b2 > x.ndeg {
                continue;
            }
            let k = 2 * a * b2;
            if k > x.qdeg {
                continue;
            }
            out.add_term(a + a2, b + b2, &c.mul(c2).shift(k));
        }
    }
    Ok(out)
}

/// `e_q(t)` as the product of `1 + q^{2n+1} t` over `2n + 1 <= qdeg`.
pub fn eq_series(t: &NCPoly) -> Result<NCPoly> {
    if t.terms.contains_key(&(0, 0)) {
        return Err(Error::InvalidInput("argument of e_q has a constant term".into()));
    }
    let p = QSeriesParams { ndeg: t.ndeg, qdeg: t.qdeg, mu_exp: 0 };
    let one = NCPoly::one(&p);
    let mut out = one.clone();
    let mut k = 1;
    while k <= t.qdeg {
        out = nc_mul(&out, &one.add(&t.shift(k)))?;
        k += 2;
    }
    Ok(out)
}

/// Outcome of an exact identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub residual: NCPoly,
    pub max_coefficient: BigInt,
    pub nonzero_terms: usize,
}

impl IdentityReport {
    fn new(residual: NCPoly) -> Self {
        IdentityReport { max_coefficient: residual.max_abs(), nonzero_terms: residual.terms.len(), residual }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `e_q(u) e_q(v) - e_q(u + v)`.
pub fn addition_check(p: &QSeriesParams) -> Result<IdentityReport> {
    let (u, v) = (NCPoly::u(p), NCPoly::v(p));
    let lhs = nc_mul(&eq_series(&u)?, &eq_series(&v)?)?;
    let rhs = eq_series(&u.add(&v))?;
    Ok(IdentityReport::new(lhs.sub(&rhs)))
}

/// `e_q(v) e_q(u) - e_q(u) e_q(mu vu) e_q(v)` with `mu = q^mu_exp`.
pub fn pentagon_check(p: &QSeriesParams) -> Result<IdentityReport> {
    let (u, v) = (NCPoly::u(p), NCPoly::v(p));
    let vu = NCPoly::monomial(p, 1, 1, p.mu_exp);
    let lhs = nc_mul(&eq_series(&v)?, &eq_series(&u)?)?;
    let rhs = nc_mul(&nc_mul(&eq_series(&u)?, &eq_series(&vu)?)?, &eq_series(&v)?)?;
    Ok(IdentityReport::new(lhs.sub(&rhs)))
}

/// `(q^4 + q - q^3 - q^2) / (1 - q^2)^2` truncated at `qdeg`.
pub fn pentagon_obstruction(qdeg: u32) -> QPoly {
    QPoly::from_coeffs(&[0, 1, -1, -1, 1], qdeg).div_one_minus(2).div_one_minus(2)
}

/// `q^{k^2} / ((q^2; q^2)_k)` truncated, the `u^k` coefficient of `e_q(u)`.
pub fn euler_coefficient(k: u32, qdeg: u32) -> QPoly {
    let mut c = QPoly::monomial(1, k * k, qdeg);
    for j in 1..=k {
        c = c.div_one_minus(2 * j);
    }
    c
}

/// `L(x) + L(y) - L(xy) - L((x - xy)/(1 - xy)) - L((y - xy)/(1 - xy))`.
pub fn rogers_numeric(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return Err(Error::Domain("x and y must lie in (0, 1)".into()));
    }
    let xy = x * y;
    let r = rogers(x) + rogers(y) - rogers(xy) - rogers((x - xy) / (1.0 - xy)) - rogers((y - xy) / (1.0 - xy));
    Ok(r.abs())
}

/// `log e_q(t)` for `q = exp(-2 pi y)`, summed until the terms vanish.
pub fn log_eq(t: f64, y: f64) -> Result<f64> {
    if t <= 0.0 || y <= 0.0 {
        return Err(Error::Domain("need t > 0 and y > 0".into()));
    }
    let mut s = 0.0;
    let mut n = 0u64;
    loop {
        let term = (t * (-2.0 * PI * y * (2 * n + 1) as f64).exp()).ln_1p();
        s += term;
        if term < 1e-18 * s.abs() {
            return Ok(s);
        }
        n += 1;
        if n > 100_000_000 {
            return Err(Error::Numeric("log e_q did not converge".into()));
        }
    }
}

/// Which form of the small-`y` asymptotic to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticForm {
    /// `|log e_q(t) + log(1 + q t)/2 - L2(-t)/(4 pi y)|`.
    Printed,
    /// `|log e_q(t) + L2(-t)/(4 pi y)|`.
    Corrected,
}

/// Remainder of the asymptotic for `log e_q(t)` as `y -> 0`.
pub fn dilog_asymptotic(t: f64, y: f64, form: AsymptoticForm) -> Result<f64> {
    let l = log_eq(t, y)?;
    let main = dilog(-t) / (4.0 * PI * y);
    Ok(match form {
        AsymptoticForm::Printed => {
            let q = (-2.0 * PI * y).exp();
            (l + 0.5 * (q * t).ln_1p() - main).abs()
        }
        AsymptoticForm::Corrected => (l + main).abs(),
    })
}

/// `r(y) / r(2y)`, about `1/2` when the remainder is `O(y)`.
pub fn asymptotic_ratio(t: f64, y: f64, form: AsymptoticForm) -> Result<f64> {
    Ok(dilog_asymptotic(t, y, form)? / dilog_asymptotic(t, 2.0 * y, form)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ndeg: u32, qdeg: u32, mu_exp: u32) -> QSeriesParams {
        QSeriesParams::new(ndeg, qdeg, mu_exp).unwrap()
    }

    #[test]
    fn defining_relation() {
        let p = params(3, 10, 0);
        let (u, v) = (NCPoly::u(&p), NCPoly::v(&p));
        assert_eq!(nc_mul(&u, &v).unwrap(), NCPoly::monomial(&p, 1, 1, 2));
        assert_eq!(nc_mul(&v, &u).unwrap(), NCPoly::monomial(&p, 1, 1, 0));
        let s = u.add(&v);
        let sq = nc_mul(&s, &s).unwrap();
        assert_eq!(sq.coefficient(1, 1), QPoly::from_coeffs(&[1, 0, 1], 10));
        assert_eq!(sq.coefficient(2, 0), QPoly::monomial(1, 0, 10));
    }

    #[test]
    fn linear_coefficient_is_odd_geometric_sum() {
        let p = params(2, 15, 0);
        let e = eq_series(&NCPoly::u(&p)).unwrap();
        let expect = QPoly::monomial(1, 1, 15).div_one_minus(2);
        assert_eq!(e.coefficient(1, 0), expect);
        assert_eq!(eq_series(&NCPoly::u(&params(0, 9, 0))).unwrap(), NCPoly::one(&params(0, 9, 0)));
    }

    #[test]
    fn quadratic_coefficient_brute_force() {
        let qdeg = 24;
        let e = eq_series(&NCPoly::u(&params(2, qdeg, 0))).unwrap();
        let mut brute = QPoly::zero(qdeg);
        for m in 0..qdeg {
            for n in m + 1..qdeg {
                brute = brute.add(&QPoly::monomial(1, 2 * m + 2 * n + 2, qdeg));
            }
        }
        assert_eq!(e.coefficient(2, 0), brute);
    }

    #[test]
    fn constant_term_rejected() {
        let p = params(2, 5, 0);
        assert!(eq_series(&NCPoly::one(&p)).is_err());
    }

    #[test]
    fn pentagon_degree_two_obstruction() {
        let r = pentagon_check(&params(2, 20, 0)).unwrap();
        assert_eq!(r.residual.coefficient(1, 1), pentagon_obstruction(20).neg());
        assert!(pentagon_check(&params(1, 20, 0)).unwrap().holds());
        assert!(pentagon_check(&params(3, 20, 1)).unwrap().holds());
    }

    #[test]
    fn qpoly_display() {
        assert_eq!(QPoly::from_coeffs(&[0, 1, -1, -3, 1], 6).to_string(), "q - q^2 - 3q^3 + q^4");
        assert_eq!(QPoly::zero(3).to_string(), "0");
    }

    #[test]
    fn rogers_at_half() {
        assert!(rogers_numeric(0.5, 0.5).unwrap() < 1e-12);
        assert!(rogers_numeric(1.5, 0.5).is_err());
    }
}
