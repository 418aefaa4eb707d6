//! Partial zeta functions of pseudolattices and Stark numbers.
//!
//! For an integral ideal `L` and `l0 in O_K` the partial zeta is
//! `zeta(L, l0, s) = sgn(l0') N(b)^s sum sgn(x') |N(x)|^{-s}` over
//! `(l0 + L) / U` with `b = L + l0 O_K` and `U` the units `= 1 mod f`.
//! Two routes are provided: the Dirichlet series itself and the Mellin
//! transform of the RM theta with `eta = 1`, `m0 = 0`, split at `y0` with the
//! functional equation on the lower piece.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pseudolattice::Pseudolattice;
use crate::quad::gauss_kronrod;
use crate::quadfield::{from_ok_coords, fundamental_unit, ok_coords, omega, QuadElem};
use crate::rmtheta::{coset_reps, rm_truncation, RmThetaSeries, ThetaSpec};
use crate::special::rgamma;

/// A full-rank `Z`-submodule of `O_K`, stored in Hermite normal form as the
/// basis `a`, `b + c omega` with `0 <= b < a` and `c > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    pub d: i64,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Ideal {
    /// HNF of the `Z`-span of elements given by `O_K` coordinates.
    pub fn from_coords(d: i64, gens: &[(BigInt, BigInt)]) -> Result<Self> {
        let mut zero_rows: Vec<BigInt> = Vec::new();
        let mut pivot: Option<(BigInt, BigInt)> = None;
        for (m, n) in gens {
            if n.is_zero() {
                zero_rows.push(m.clone());
                continue;
            }
            match pivot.take() {
                None => pivot = Some((m.clone(), n.clone())),
                Some((pm, pn)) => {
                    let eg = pn.extended_gcd(n);
                    let g = eg.gcd;
                    let new = (&eg.x * &pm + &eg.y * m, g.clone());
                    // complementary row with vanishing omega coordinate
                    zero_rows.push((n / &g) * &pm - (&pn / &g) * m);
                    pivot = Some(new);
                }
            }
        }
        let (mut pm, mut pn) = pivot.ok_or_else(|| Error::InvalidInput("module has rank < 2".into()))?;
        if pn.is_negative() {
            pm = -pm;
            pn = -pn;
        }
        let a = zero_rows.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if a.is_zero() {
            return Err(Error::InvalidInput("module has rank < 2".into()));
        }
        let b = pm.mod_floor(&a);
        Ok(Ideal { d, a, b, c: pn })
    }

    pub fn from_elems(d: i64, gens: &[QuadElem]) -> Result<Self> {
        let mut coords = Vec::with_capacity(gens.len());
        for g in gens {
            let (m, n) = ok_coords(g);
            if !m.is_integer() || !n.is_integer() {
                return Err(Error::InvalidInput(format!("{} is not integral", g.pretty())));
            }
            coords.push((m.to_integer(), n.to_integer()));
        }
        Ideal::from_coords(d, &coords)
    }

    pub fn unit(d: i64) -> Self {
        Ideal { d, a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    pub fn basis(&self) -> [QuadElem; 2] {
        [from_ok_coords(&self.a, &BigInt::zero(), self.d), from_ok_coords(&self.b, &self.c, self.d)]
    }

    /// Index in `O_K`; the absolute norm for ideals.
    pub fn index(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        let (m, n) = ok_coords(x);
        if !m.is_integer() || !n.is_integer() {
            return false;
        }
        let (m, n) = (m.to_integer(), n.to_integer());
        if !n.is_multiple_of(&self.c) {
            return false;
        }
        let k = n / &self.c;
        (m - k * &self.b).is_multiple_of(&self.a)
    }

    /// Closed under multiplication by `omega`.
    pub fn is_ideal(&self) -> bool {
        let w = omega(self.d);
        self.basis().iter().all(|x| self.contains(&(&w * x)))
    }

    pub fn mul(&self, other: &Ideal) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(&x * &y);
            }
        }
        Ideal::from_elems(self.d, &gens)
    }

    pub fn conj(&self) -> Result<Ideal> {
        let [x, y] = self.basis();
        Ideal::from_elems(self.d, &[x.conj(), y.conj()])
    }

    pub fn add(&self, other: &Ideal) -> Result<Ideal> {
        let [x, y] = self.basis();
        let [u, v] = other.basis();
        Ideal::from_elems(self.d, &[x, y, u, v])
    }

    /// Exact division of every element by the integer `n`.
    pub fn div_int(&self, n: &BigInt) -> Result<Ideal> {
        if !self.a.is_multiple_of(n) || !self.b.is_multiple_of(n) || !self.c.is_multiple_of(n) {
            return Err(Error::Domain(format!("ideal is not divisible by {}", n)));
        }
        Ok(Ideal { d: self.d, a: &self.a / n, b: &self.b / n, c: &self.c / n })
    }

    /// `self + other = O_K`.
    pub fn coprime(&self, other: &Ideal) -> Result<bool> {
        Ok(self.add(other)?.index().is_one())
    }

    /// `x mod self` with `O_K` coordinates reduced into `[0, a) x [0, c)`.
    pub fn reduce(&self, x: &QuadElem) -> Result<QuadElem> {
        let (m, n) = ok_coords(x);
        if !m.is_integer() || !n.is_integer() {
            return Err(Error::InvalidInput(format!("{} is not integral", x.pretty())));
        }
        let (m, n) = (m.to_integer(), n.to_integer());
        let k = n.div_floor(&self.c);
        let n = &n - &k * &self.c;
        let m = (&m - &k * &self.b).mod_floor(&self.a);
        Ok(from_ok_coords(&m, &n, self.d))
    }

    pub fn to_text(&self) -> String {
        let [x, y] = self.basis();
        format!("<{}, {}>", x.pretty(), y.pretty())
    }
}

/// Outcome of the checks on `(L, l0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarkDiagnostics {
    pub b: String,
    pub f: String,
    pub a0: String,
    pub norm_b: String,
    pub b_coprime_f: bool,
    pub a0_coprime_f: bool,
    /// `-1 = 1 mod f`.
    pub minus_one_is_one: bool,
    /// Generator `eta` of the units `= 1 mod f` (up to the sign check above).
    pub unit_generator: Option<String>,
    pub unit_exponent: Option<u64>,
    /// A unit `= 1 mod f` with negative conjugate, when one exists.
    pub counterexample: Option<String>,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub pass: bool,
}

/// Data `(L, l0)` with the derived ideals and unit group.
#[derive(Clone, Debug)]
pub struct StarkInput {
    pub lattice: Pseudolattice,
    pub l0: QuadElem,
    pub b: Ideal,
    pub f: Ideal,
    pub a0: Ideal,
    pub diagnostics: StarkDiagnostics,
    /// Generator of the units `= 1 mod f`.
    pub eta: Option<QuadElem>,
    /// Totally positive part `U+` of that group.
    pub eps: Option<QuadElem>,
    /// `[U : U+]^{-1}`.
    pub orbit_factor: f64,
}

fn lattice_ideal(l: &Pseudolattice) -> Result<Ideal> {
    let i = Ideal::from_elems(l.d, &[l.l1.clone(), l.l2.clone()])?;
    if !i.is_ideal() {
        return Err(Error::InvalidInput("L is not an ideal of O_K".into()));
    }
    Ok(i)
}

fn is_one_mod(f: &Ideal, x: &QuadElem) -> bool {
    f.contains(&(x - &QuadElem::one(x.d)))
}

/// Units `= 1 mod f` form `<eta>` or `<-1, eta>`; returns `eta` and its exponent
/// over the fundamental unit, searching `k <= |(O_K / f)^*| < N(f)`.
fn units_one_mod(f: &Ideal) -> Result<(QuadElem, u64)> {
    let e0 = fundamental_unit(f.d)?.unit;
    let bound = f.index().to_u64().unwrap_or(u64::MAX);
    let one = QuadElem::one(f.d);
    let mut r = f.reduce(&e0)?;
    let mut p = e0.clone();
    for k in 1..=bound.max(1) {
        if f.contains(&(&r - &one)) {
            return Ok((p, k));
        }
        if f.contains(&(&r + &one)) {
            return Ok((-p, k));
        }
        r = f.reduce(&(&r * &e0))?;
        p = &p * &e0;
    }
    Err(Error::SearchBound(bound))
}

pub fn stark_conditions_check(l: &Pseudolattice, l0: &QuadElem) -> Result<StarkInput> {
    let d = l.d;
    if l0.d != d {
        return Err(Error::MixedField(d, l0.d));
    }
    let li = lattice_ideal(l)?;
    let w = omega(d);
    let mut gens = li.basis().to_vec();
    gens.push(l0.clone());
    gens.push(l0 * &w);
    let b = Ideal::from_elems(d, &gens)?;
    let nb = b.index();
    let bc = b.conj()?;
    let f = li.mul(&bc)?.div_int(&nb)?;
    let a0 = Ideal::from_elems(d, &[l0.clone(), l0 * &w])?.mul(&bc)?.div_int(&nb)?;
    let b_coprime_f = b.coprime(&f)?;
    let a0_coprime_f = a0.coprime(&f)?;
    let minus_one = -&QuadElem::one(d);
    let minus_one_is_one = is_one_mod(&f, &minus_one);
    let (eta, k) = units_one_mod(&f)?;
    let eta_ok = eta.conj().sign() > 0;
    let counterexample = if minus_one_is_one {
        Some(minus_one.pretty())
    } else if !eta_ok {
        Some(eta.pretty())
    } else {
        None
    };
    let condition_i = b_coprime_f && a0_coprime_f;
    let condition_ii = !minus_one_is_one && eta_ok;
    let diagnostics = StarkDiagnostics {
        b: b.to_text(),
        f: f.to_text(),
        a0: a0.to_text(),
        norm_b: nb.to_string(),
        b_coprime_f,
        a0_coprime_f,
        minus_one_is_one,
        unit_generator: Some(eta.pretty()),
        unit_exponent: Some(k),
        counterexample,
        condition_i,
        condition_ii,
        pass: condition_i && condition_ii,
    };
    let (eps, orbit_factor) = if !condition_ii {
        (None, 1.0)
    } else if eta.sign() > 0 {
        (Some(eta.clone()), 1.0)
    } else {
        // eta < 0 < eta': U+ = <eta^2> has index 2 and both orbits give equal terms
        (Some(eta.pow(2)), 0.5)
    };
    Ok(StarkInput { lattice: l.clone(), l0: l0.clone(), b, f, a0, diagnostics, eta: Some(eta), eps, orbit_factor })
}

/// `Q(sqrt 3)`, `L = 5 O_K`, `l0 = 1`.
pub fn worked_example() -> StarkInput {
    let l = Pseudolattice::from_ints(3, (0, 5), (5, 0)).expect("5 O_K");
    stark_conditions_check(&l, &QuadElem::one(3)).expect("worked example")
}

impl StarkInput {
    fn require_pass(&self) -> Result<&QuadElem> {
        match (&self.eps, self.diagnostics.pass) {
            (Some(e), true) => Ok(e),
            _ => Err(Error::Domain(format!(
                "Stark conditions fail: condition (i) {}, condition (ii) {}",
                self.diagnostics.condition_i, self.diagnostics.condition_ii
            ))),
        }
    }

    /// RM theta data with `eta = 1`, `m0 = 0`.
    pub fn theta_spec(&self) -> Result<ThetaSpec> {
        let eps = self.require_pass()?.clone();
        ThetaSpec::new(
            self.lattice.clone(),
            self.l0.clone(),
            QuadElem::zero(self.lattice.d),
            Complex64::new(1.0, 0.0),
            eps,
        )
    }

    pub fn sign_l0(&self) -> f64 {
        self.l0.conj().sign() as f64
    }

    pub fn norm_b(&self) -> f64 {
        self.b.index().to_f64().unwrap_or(f64::NAN)
    }

    /// `sgn(l0') N(b)^s [U : U+]^{-1}`.
    fn prefactor(&self, s: Complex64) -> Complex64 {
        self.sign_l0() * self.orbit_factor * Complex64::new(self.norm_b(), 0.0).powc(s)
    }

    /// `(a L, a l0)`.
    pub fn scaled(&self, a: &QuadElem) -> Result<StarkInput> {
        stark_conditions_check(&self.lattice.scale(a)?, &(a * &self.l0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaMethod {
    Direct,
    Mellin,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: [f64; 2],
    pub value: [f64; 2],
    pub method: ZetaMethod,
    /// `Nbound` for the direct sum; the theta truncation on each side for Mellin.
    pub truncation: Vec<f64>,
    pub terms: usize,
    pub evaluations: usize,
}

impl ZetaValue {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

/// Dirichlet series over the orbit representatives with `|N(x)| <= nbound`.
pub fn zeta_direct(input: &StarkInput, s: Complex64, nbound: f64) -> Result<ZetaValue> {
    if s.re <= 1.0 {
        return Err(Error::Domain(format!("the direct sum needs Re s > 1, got {}", s)));
    }
    let spec = input.theta_spec()?;
    let reps = coset_reps(&spec.lattice, &spec.l0, &spec.eps, nbound)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for r in reps.iter().rev() {
        acc += r.sgn_conj() as f64 * Complex64::new(r.abs_norm(), 0.0).powc(-s);
    }
    let value = input.prefactor(s) * acc;
    Ok(ZetaValue {
        s: [s.re, s.im],
        value: [value.re, value.im],
        method: ZetaMethod::Direct,
        truncation: vec![nbound],
        terms: reps.len(),
        evaluations: 0,
    })
}

/// `I(s) = int_{y0}^inf y^{s-1} Theta(iy) dy + (i Delta)^{-1} int_{1/y0}^inf u^{-s} Theta^dual(iu) du`.
#[derive(Clone, Debug)]
pub struct MellinData {
    pub primal: RmThetaSeries,
    pub dual: RmThetaSeries,
    pub delta: f64,
    pub y0: f64,
}

impl MellinData {
    pub fn new(input: &StarkInput, y0: f64, tol: f64) -> Result<Self> {
        if !(y0 > 0.0) {
            return Err(Error::InvalidInput(format!("split point must be positive, got {}", y0)));
        }
        let spec = input.theta_spec()?;
        let dual = spec.dual()?;
        // series accuracy well below the quadrature tolerance
        let inner = tol * 1e-3;
        let primal = RmThetaSeries::build(&spec, rm_truncation(&spec, y0, inner))?;
        let dual_s = RmThetaSeries::build(&dual, rm_truncation(&dual, 1.0 / y0, inner))?;
        Ok(MellinData { primal, dual: dual_s, delta: spec.delta(), y0 })
    }

    pub fn integral(&self, s: Complex64, tol: f64) -> Result<(Complex64, usize)> {
        let (a, ea) = half_line(&self.primal, s - 1.0, self.y0, tol)?;
        let (b, eb) = half_line(&self.dual, -s, 1.0 / self.y0, tol)?;
        let i = Complex64::new(0.0, 1.0);
        Ok((a + b / (i * self.delta), ea + eb))
    }
}

/// `int_{y_lo}^inf y^p sum c_n e^{-2 pi n y} dy`, cut where the integrand is
/// below `tol` and split into unit-decay panels.
fn half_line(series: &RmThetaSeries, p: Complex64, y_lo: f64, tol: f64) -> Result<(Complex64, usize)> {
    let Some(&nmin) = series.norms.first() else {
        return Ok((Complex64::new(0.0, 0.0), 0));
    };
    let mass: f64 = series.coeffs.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
    let rate = 2.0 * std::f64::consts::PI * nmin;
    let mut y_hi = y_lo + 1.0 / rate;
    while mass * y_hi.powf(p.re.max(0.0)) * (-rate * y_hi).exp() / rate > tol * 1e-3 {
        y_hi += 1.0 / rate;
    }
    let f = |y: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for (n, c) in series.norms.iter().zip(&series.coeffs).rev() {
            let e = (-2.0 * std::f64::consts::PI * n * y).exp();
            if e != 0.0 {
                s += c * e;
            }
        }
        s * (p * y.ln()).exp()
    };
    let panels = (((y_hi - y_lo) * rate / 4.0).ceil() as usize).clamp(1, 4000);
    let h = (y_hi - y_lo) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    for k in 0..panels {
        let a = y_lo + k as f64 * h;
        let r = gauss_kronrod(f, a, a + h, tol / panels as f64)?;
        total += r.value;
        evals += r.evaluations;
    }
    Ok((total, evals))
}

pub const DEFAULT_SPLIT: f64 = 1.0;

/// `sgn(l0') N(b)^s (2 pi)^s / Gamma(s) I(s)`, valid for all `s`.
pub fn zeta_mellin(input: &StarkInput, s: Complex64, tol: f64) -> Result<ZetaValue> {
    zeta_mellin_split(input, s, tol, DEFAULT_SPLIT)
}

pub fn zeta_mellin_split(input: &StarkInput, s: Complex64, tol: f64, y0: f64) -> Result<ZetaValue> {
    let data = MellinData::new(input, y0, tol)?;
    let (i_s, evals) = data.integral(s, tol)?;
    let two_pi = Complex64::new(2.0 * std::f64::consts::PI, 0.0);
    let value = input.prefactor(s) * two_pi.powc(s) * rgamma(s) * i_s;
    Ok(ZetaValue {
        s: [s.re, s.im],
        value: [value.re, value.im],
        method: ZetaMethod::Mellin,
        truncation: vec![data.primal.nbound, data.dual.nbound],
        terms: data.primal.terms + data.dual.terms,
        evaluations: evals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarkNumber {
    pub zeta_prime_at_0: f64,
    pub s0: f64,
    /// `I(0)`; the prefactor of `I(s)` vanishes to first order at `s = 0`.
    pub i0: [f64; 2],
}

/// `zeta'(0) = sgn(l0') [U:U+]^{-1} I(0)` and `S0 = exp(zeta'(0))`.
pub fn stark_number(input: &StarkInput, tol: f64) -> Result<StarkNumber> {
    input.require_pass()?;
    let data = MellinData::new(input, DEFAULT_SPLIT, tol)?;
    let (i0, _) = data.integral(Complex64::new(0.0, 0.0), tol)?;
    if !i0.re.is_finite() || !i0.im.is_finite() {
        return Err(Error::Numeric("I(0) is not finite".into()));
    }
    let zp = input.sign_l0() * input.orbit_factor * i0.re;
    Ok(StarkNumber { zeta_prime_at_0: zp, s0: zp.exp(), i0: [i0.re, i0.im] })
}

/// Richardson-extrapolated central difference of `zeta_mellin` at `s = 0`.
pub fn zeta_prime_fd(input: &StarkInput, h: f64, tol: f64) -> Result<f64> {
    let z = |s: f64| -> Result<f64> { Ok(zeta_mellin(input, Complex64::new(s, 0.0), tol)?.value[0]) };
    let d1 = z(h)? - z(-h)?;
    let d2 = z(2.0 * h)? - z(-2.0 * h)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

/// Monic integer polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPoly {
    pub coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{}", a)?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{}x", a)?,
                (_, 1) => write!(f, "x^{}", k)?,
                _ => write!(f, "{}x^{}", a, k)?,
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub polynomial: Option<IntPoly>,
    pub residual: Option<f64>,
    pub candidates: u64,
}

pub const DEFAULT_PROBE_CAP: u64 = 50_000_000;

/// Exploratory search for a monic `P` with `|P(x)| < tol`, by degree and then
/// lexicographically in `(c_{n-1}, ..., c_1)`; the constant term is the
/// nearest integer to `-(P(x) - c_0)` so only that candidate is tried.
pub fn algebraicity_probe(x: f64, max_deg: usize, max_height: i64, tol: f64, cap: u64) -> Result<ProbeResult> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("x must be finite".into()));
    }
    if max_deg == 0 || max_height < 0 {
        return Err(Error::InvalidInput("need degree >= 1 and height >= 0".into()));
    }
    let mut candidates = 0u64;
    for deg in 1..=max_deg {
        let free = deg - 1;
        let width = (2 * max_height + 1) as u64;
        let total = width.checked_pow(free as u32).ok_or(Error::SearchBound(cap))?;
        if candidates.saturating_add(total) > cap {
            return Err(Error::SearchBound(cap));
        }
        let mut mid = vec![0i64; free];
        for idx in 0..total {
            candidates += 1;
            // digit 0 is the most significant and belongs to c_{deg-1}
            let mut rest = idx;
            for k in (0..free).rev() {
                mid[k] = (rest % width) as i64 - max_height;
                rest /= width;
            }
            // x^deg + sum_{k=1}^{deg-1} c_k x^k with mid[0] = c_{deg-1}
            let mut v = x.powi(deg as i32);
            for (j, &c) in mid.iter().enumerate() {
                v += c as f64 * x.powi((deg - 1 - j) as i32);
            }
            let c0 = (-v).round();
            if c0.abs() <= max_height as f64 {
                let r = (v + c0).abs();
                if r < tol {
                    let mut coeffs = vec![c0 as i64];
                    coeffs.extend(mid.iter().rev());
                    coeffs.push(1);
                    return Ok(ProbeResult { polynomial: Some(IntPoly { coeffs }), residual: Some(r), candidates });
                }
            }
        }
    }
    Ok(ProbeResult { polynomial: None, residual: None, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_principal_ideal() {
        // (2 + sqrt 3) has norm 1
        let x = QuadElem::from_ints(2, 1, 3);
        let i = Ideal::from_elems(3, &[x.clone(), &x * &QuadElem::sqrt_d(3)]).unwrap();
        assert_eq!(i, Ideal::unit(3));
        let five = Ideal::from_elems(3, &[QuadElem::from_ints(5, 0, 3), QuadElem::from_ints(0, 5, 3)]).unwrap();
        assert_eq!(five.index(), BigInt::from(25));
        assert!(five.contains(&QuadElem::from_ints(10, -5, 3)));
        assert!(!five.contains(&QuadElem::from_ints(1, 0, 3)));
    }

    #[test]
    fn worked_example_passes() {
        let w = worked_example();
        assert!(w.diagnostics.pass);
        assert_eq!(w.eps, Some(QuadElem::from_ints(26, 15, 3)));
        assert_eq!(w.diagnostics.unit_exponent, Some(3));
        assert_eq!(w.b, Ideal::unit(3));
        assert_eq!(w.orbit_factor, 1.0);
    }

    #[test]
    fn golden_field_examples_fail() {
        let three = Pseudolattice::new(QuadElem::from_ints(3, 0, 5), QuadElem::from_frac(3, 3, 2, 5)).unwrap();
        let r = stark_conditions_check(&three, &QuadElem::one(5)).unwrap();
        assert!(!r.diagnostics.condition_ii);
        let phi4 = QuadElem::from_frac(1, 1, 2, 5).pow(4);
        assert_eq!(r.eta, Some(-phi4));
        let root5 = Pseudolattice::new(QuadElem::sqrt_d(5), QuadElem::from_frac(5, 1, 2, 5)).unwrap();
        let r = stark_conditions_check(&root5, &QuadElem::one(5)).unwrap();
        assert!(!r.diagnostics.pass);
        assert_eq!(r.eta, Some(-QuadElem::from_frac(1, 1, 2, 5).pow(2)));
    }

    #[test]
    fn ideal_reduction_is_canonical() {
        let w = worked_example();
        let x = QuadElem::from_ints(26, 15, 3);
        assert_eq!(w.f.reduce(&x).unwrap(), QuadElem::one(3));
    }

    #[test]
    fn direct_rejects_small_s() {
        let w = worked_example();
        assert!(zeta_direct(&w, Complex64::new(1.0, 0.0), 10.0).is_err());
    }

    #[test]
    fn shifted_l0_gives_identical_sum() {
        let w = worked_example();
        let v = w.clone();
        let shifted = stark_conditions_check(&v.lattice, &QuadElem::from_ints(6, 0, 3)).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let a = zeta_direct(&w, s, 2000.0).unwrap();
        let b = zeta_direct(&shifted, s, 2000.0).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn probe_examples() {
        let r = algebraicity_probe(3.0 + 2.0 * 2f64.sqrt(), 2, 10, 1e-9, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!(r.polynomial.unwrap().coeffs, vec![1, -6, 1]);
        let r = algebraicity_probe(std::f64::consts::PI, 2, 10, 1e-9, DEFAULT_PROBE_CAP).unwrap();
        assert!(r.polynomial.is_none());
        let r = algebraicity_probe(1.0, 3, 5, 1e-12, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!(r.polynomial.unwrap().to_string(), "x - 1");
    }

    #[test]
    fn probe_cap_is_enforced() {
        assert!(matches!(algebraicity_probe(0.3, 6, 50, 1e-12, 1000), Err(Error::SearchBound(_))));
    }

    #[test]
    fn poly_display() {
        assert_eq!(IntPoly { coeffs: vec![1, -6, 1] }.to_string(), "x^2 - 6x + 1");
        assert_eq!(IntPoly { coeffs: vec![-2, 0, 0, 1] }.to_string(), "x^3 - 2");
    }
}
