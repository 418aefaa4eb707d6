//! Theta functions attached to pseudolattices with real multiplication.
//!
//! Two families live here:
//!
//! * the RM theta `Theta^U_{L,eta}[l0; m0](v)`, a sum over `U`-orbits of
//!   `l0 + L` weighted by `eta0 sgn(x') + eta1 sgn(x)`, and
//! * the lattice theta `theta_{Lambda,eta}[lambda0; mu0](v)` of a complex
//!   lattice, built from the pairing `(x . y) = Im(xy) = x0 y1 + x1 y0`.
//!
//! The character of `L` attached to `m0` is `l -> exp(-2 pi i tr(l m0'))`,
//! which is exactly the lattice character `exp(-2 pi i (lambda_t . mu_t))`
//! after the geodesic lift. Hecke averaging connects the two families and
//! Poisson summation gives their functional equations.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pseudolattice::{delta, dual_pseudolattice, lift_point, Pseudolattice};
use crate::quad::adaptive_simpson;
use crate::quadfield::{fundamental_unit, QuadElem};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(x . y) = x0 y1 + x1 y0`.
pub fn pairing(x: Complex64, y: Complex64) -> f64 {
    x.re * y.im + x.im * y.re
}

/// `tr(a b')`, the pairing that the geodesic lift turns into `(x . y)`.
pub fn twisted_trace(a: &QuadElem, b: &QuadElem) -> BigRational {
    (a * &b.conj()).trace()
}

/// Data `(L, l0, m0, eta, eps)` of an RM theta.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSpec {
    pub lattice: Pseudolattice,
    pub l0: QuadElem,
    pub m0: QuadElem,
    pub eta: Complex64,
    pub eps: QuadElem,
}

/// Which of the invariance conditions on `U` fail.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UnitConditions {
    pub totally_positive: bool,
    pub preserves_coset: bool,
    pub character_mod_z: bool,
    pub shift_mod_2z: bool,
}

impl UnitConditions {
    pub fn all(&self) -> bool {
        self.totally_positive && self.preserves_coset && self.character_mod_z && self.shift_mod_2z
    }
}

pub fn unit_conditions(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem, eps: &QuadElem) -> UnitConditions {
    let one = QuadElem::one(l.d);
    let totally_positive = eps.sign() > 0 && eps.conj().sign() > 0 && eps.cmp_value(&one).is_gt();
    let inv = eps.inv().ok();
    let preserves_coset = inv
        .is_some_and(|inv| [&l.l1, &l.l2].iter().all(|b| l.contains(&(eps * *b)) && l.contains(&(&inv * *b))))
        && l.contains(&(&(eps - &one) * l0));
    let character_mod_z =
        [&l.l1, &l.l2].iter().all(|b| (twisted_trace(&(eps * *b), m0) - twisted_trace(b, m0)).is_integer());
    let two = BigRational::from_integer(BigInt::from(2));
    let shift_mod_2z = ((twisted_trace(&(eps * l0), m0) - twisted_trace(l0, m0)) / two).is_integer();
    UnitConditions { totally_positive, preserves_coset, character_mod_z, shift_mod_2z }
}

pub const DEFAULT_UNIT_SEARCH: u32 = 10_000;

/// Smallest power of the totally positive fundamental unit meeting the conditions.
pub fn unit_group_for(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem) -> Result<QuadElem> {
    unit_group_for_with_cap(l, l0, m0, DEFAULT_UNIT_SEARCH)
}

pub fn unit_group_for_with_cap(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem, cap: u32) -> Result<QuadElem> {
    let base = fundamental_unit(l.d)?.totally_positive;
    let mut e = base.clone();
    for _ in 1..=cap {
        if unit_conditions(l, l0, m0, &e).all() {
            return Ok(e);
        }
        e = &e * &base;
    }
    Err(Error::SearchBound(cap as u64))
}

impl ThetaSpec {
    pub fn new(lattice: Pseudolattice, l0: QuadElem, m0: QuadElem, eta: Complex64, eps: QuadElem) -> Result<Self> {
        if l0.d != lattice.d || m0.d != lattice.d || eps.d != lattice.d {
            return Err(Error::MixedField(lattice.d, eps.d));
        }
        let c = unit_conditions(&lattice, &l0, &m0, &eps);
        if !c.all() {
            return Err(Error::InvalidInput(format!("unit {} violates {:?}", eps.pretty(), c)));
        }
        Ok(ThetaSpec { lattice, l0, m0, eta, eps })
    }

    /// Data of the right-hand side of the functional equation:
    /// `(L^?, m0, -l0, i conj(eta))` with the same unit group.
    pub fn dual(&self) -> Result<ThetaSpec> {
        ThetaSpec::new(
            dual_pseudolattice(&self.lattice),
            self.m0.clone(),
            -&self.l0,
            I * self.eta.conj(),
            self.eps.clone(),
        )
    }

    pub fn log_eps(&self) -> f64 {
        self.eps.to_f64().ln()
    }

    pub fn delta(&self) -> f64 {
        delta(&self.lattice).to_f64()
    }
}

/// `Q(sqrt 3)`, `L = 5 O_K`, `l0 = 1`, `m0 = 0`, `eta = 1`, `U = <26 + 15 sqrt 3>`.
pub fn worked_example() -> ThetaSpec {
    let lattice = Pseudolattice::from_ints(3, (0, 5), (5, 0)).expect("5 O_K");
    ThetaSpec::new(
        lattice,
        QuadElem::one(3),
        QuadElem::zero(3),
        Complex64::new(1.0, 0.0),
        QuadElem::from_ints(26, 15, 3),
    )
    .expect("worked example satisfies the unit conditions")
}

/// Integer model of `l0 + n1 l1 + n2 l2 = (A + B sqrt d) / Q`.
#[derive(Clone, Debug)]
struct IntModel {
    d: i128,
    q: i128,
    base: (i128, i128),
    v1: (i128, i128),
    v2: (i128, i128),
    /// Cancellation-free embeddings `(x, x')` of `l0`, `l1`, `l2`.
    emb: [(f64, f64); 3],
}

impl IntModel {
    fn new(l: &Pseudolattice, l0: &QuadElem) -> Result<Self> {
        let elems = [l0, &l.l1, &l.l2];
        let mut q = BigInt::one();
        for x in elems {
            let (_, _, qx) = x.to_common();
            q = num_integer::Integer::lcm(&q, &qx);
        }
        let conv = |x: &QuadElem| -> Result<(i128, i128)> {
            let qr = BigRational::from_integer(q.clone());
            let a = (&x.a * &qr).to_integer().to_i128();
            let b = (&x.b * &qr).to_integer().to_i128();
            a.zip(b).ok_or_else(|| Error::Numeric("lattice data too large for i128".into()))
        };
        Ok(IntModel {
            d: l.d as i128,
            q: q.to_i128().ok_or_else(|| Error::Numeric("denominator too large".into()))?,
            base: conv(l0)?,
            v1: conv(&l.l1)?,
            v2: conv(&l.l2)?,
            emb: [l0, &l.l1, &l.l2].map(|x| (x.to_f64(), x.conj_f64())),
        })
    }

    fn at(&self, n1: i64, n2: i64) -> Result<(i128, i128)> {
        let (n1, n2) = (n1 as i128, n2 as i128);
        let part = |b: i128, x: i128, y: i128| {
            n1.checked_mul(x).zip(n2.checked_mul(y)).and_then(|(p, q)| p.checked_add(q)).and_then(|s| s.checked_add(b))
        };
        part(self.base.0, self.v1.0, self.v2.0)
            .zip(part(self.base.1, self.v1.1, self.v2.1))
            .ok_or_else(|| Error::Numeric("lattice coordinates overflow i128".into()))
    }

    fn elem(&self, ab: (i128, i128), d: i64) -> QuadElem {
        let q = BigInt::from(self.q);
        QuadElem::new(BigRational::new(BigInt::from(ab.0), q.clone()), BigRational::new(BigInt::from(ab.1), q), d)
    }
}

/// One representative `x = l0 + n1 l1 + n2 l2` of a `U`-orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetRep {
    pub n1: i64,
    pub n2: i64,
    /// `|N(x)|` as an exact fraction `num / den`.
    pub norm_num: i128,
    pub norm_den: i128,
    pub x: f64,
    pub x_conj: f64,
}

impl CosetRep {
    pub fn abs_norm(&self) -> f64 {
        self.norm_num as f64 / self.norm_den as f64
    }

    pub fn sgn(&self) -> i32 {
        sgn_f(self.x)
    }

    pub fn sgn_conj(&self) -> i32 {
        sgn_f(self.x_conj)
    }
}

fn sgn_f(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// All `x in l0 + L`, `0 < |N(x)| <= nbound`, with `0 <= log|x/x'| < 2 log eps`.
/// Sorted by `(|N(x)|, n1, n2)`.
///
/// With `eps = e0^m` for the totally positive fundamental unit `e0`, the
/// domain splits into `m` slabs `e0^j D0`; slab `j` is enumerated as the
/// domain `D0` of `e0` inside `e0^{-j}(l0 + L)`.
pub fn coset_reps(l: &Pseudolattice, l0: &QuadElem, eps: &QuadElem, nbound: f64) -> Result<Vec<CosetRep>> {
    let base = fundamental_unit(l.d)?.totally_positive;
    let mut m = 1u32;
    let mut p = base.clone();
    while &p != eps {
        if p.cmp_value(eps).is_gt() {
            return Err(Error::InvalidInput(format!("{} is not a power of {}", eps.pretty(), base.pretty())));
        }
        p = &p * &base;
        m += 1;
    }
    let inv = base.inv()?;
    let e0 = base.to_f64();
    let mut scale = QuadElem::one(l.d);
    let mut out = Vec::new();
    for j in 0..m {
        let lj = Pseudolattice::new(&scale * &l.l1, &scale * &l.l2)?;
        let model = IntModel::new(&lj, &(&scale * l0))?;
        let (up, down) = (e0.powi(j as i32), e0.powi(-(j as i32)));
        for mut r in slab_reps(&model, l.d, &base, nbound)? {
            r.x *= up;
            r.x_conj *= down;
            out.push(r);
        }
        scale = &scale * &inv;
    }
    out.sort_by(|a, b| {
        (a.norm_num * b.norm_den).cmp(&(b.norm_num * a.norm_den)).then(a.n1.cmp(&b.n1)).then(a.n2.cmp(&b.n2))
    });
    Ok(out)
}

/// Representatives in `0 <= log|x/x'| < 2 log e0` for one slab.
fn slab_reps(model: &IntModel, d: i64, e0: &QuadElem, nbound: f64) -> Result<Vec<CosetRep>> {
    let sd = (d as f64).sqrt();
    let e = e0.to_f64();
    let log_e2 = 2.0 * e.ln();
    let eps4 = e0.pow(4);
    let root_b = nbound.max(0.0).sqrt();
    let umax = e * root_b * (1.0 + 1e-12) + 1e-12;
    let wmax = root_b * (1.0 + 1e-12) + 1e-12;
    let bound = BigRational::from_float(nbound).unwrap_or_else(BigRational::zero);
    let mut out = Vec::new();
    for (n1, n2) in box_points(model, umax, wmax)? {
        let ab = model.at(n1, n2)?;
        if ab == (0, 0) {
            continue;
        }
        let num = int_norm(ab, model.d)?.abs();
        let den = model.q * model.q;
        if (num as f64) > nbound * den as f64 * (1.0 + 1e-12) {
            continue;
        }
        let g = gcd_i128(num, den);
        let (num, den) = (num / g, den / g);
        if BigRational::new(num.into(), den.into()) > bound {
            continue;
        }
        // |x| >= |x'|  <=>  a b >= 0
        if ab.0.signum() * ab.1.signum() < 0 {
            continue;
        }
        let (x, xc) = precise_embedding(ab, model.q, model.d, sd)?;
        let lr = (x.abs() / xc.abs()).ln();
        let inside = if (lr - log_e2).abs() > 1e-9 * log_e2.max(1.0) {
            lr < log_e2
        } else {
            let xe = model.elem(ab, d);
            let xc2 = &xe.conj() * &xe.conj();
            (&(&eps4 * &xc2) - &(&xe * &xe)).sign() > 0
        };
        if inside {
            out.push(CosetRep { n1, n2, norm_num: num, norm_den: den, x, x_conj: xc });
        }
    }
    Ok(out)
}

/// Coefficients `(n1, n2)` whose point `l0 + n1 l1 + n2 l2` may lie in
/// `|x| <= umax`, `|x'| <= wmax`. Works in a basis reduced for the box metric.
fn box_points(model: &IntModel, umax: f64, wmax: f64) -> Result<Vec<(i64, i64)>> {
    let [(x0, w0), _, _] = model.emb;
    let norm = |v: (f64, f64)| (v.0 / umax, v.1 / wmax);
    let (r, t) = reduce_exact(model, umax, wmax)?;
    let (p0, q0) = norm((x0, w0));
    let c = Complex64::new(-p0, -q0);
    let det = r[0].re * r[1].im - r[1].re * r[0].im;
    // the box becomes the unit square |p|, |q| <= 1
    let k1c = (c.re * r[1].im - r[1].re * c.im) / det;
    let k1s = (r[1].re.abs() + r[1].im.abs()) / det.abs() + 1.0;
    let mut out = Vec::new();
    for k1 in (k1c - k1s).floor() as i64..=(k1c + k1s).ceil() as i64 {
        let base = Complex64::new(p0, q0) + r[0] * k1 as f64;
        let range = |c: f64, step: f64| -> (f64, f64) {
            if step == 0.0 {
                if c.abs() <= 1.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    (1.0, 0.0)
                }
            } else {
                let a = (-1.0 - c) / step;
                let b = (1.0 - c) / step;
                (a.min(b), a.max(b))
            }
        };
        let (lo1, hi1) = range(base.re, r[1].re);
        let (lo2, hi2) = range(base.im, r[1].im);
        let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
        if lo > hi {
            continue;
        }
        for k2 in (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1) {
            out.push((k1 * t[0][0] + k2 * t[1][0], k1 * t[0][1] + k2 * t[1][1]));
        }
    }
    Ok(out)
}

/// Gauss reduction of `(l1, l2)` in the metric of the box, with exact
/// integer updates so that large multipliers do not destroy the embeddings.
fn reduce_exact(model: &IntModel, umax: f64, wmax: f64) -> Result<([Complex64; 2], [[i64; 2]; 2])> {
    let sd = (model.d as f64).sqrt();
    let emb = |ab: (i128, i128)| -> Result<Complex64> {
        let (x, xc) = precise_embedding(ab, model.q, model.d, sd)?;
        Ok(Complex64::new(x / umax, xc / wmax))
    };
    let overflow = || Error::Numeric("lattice coordinates overflow i128".into());
    let comb = |w: (i128, i128), k: i128, u: (i128, i128)| -> Result<(i128, i128)> {
        let a = k.checked_mul(u.0).and_then(|p| w.0.checked_sub(p)).ok_or_else(overflow)?;
        let b = k.checked_mul(u.1).and_then(|p| w.1.checked_sub(p)).ok_or_else(overflow)?;
        Ok((a, b))
    };
    let (mut u, mut w) = (model.v1, model.v2);
    let (mut tu, mut tw) = ([1i64, 0], [0i64, 1]);
    let (mut eu, mut ew) = (emb(u)?, emb(w)?);
    if eu.norm_sqr() > ew.norm_sqr() {
        std::mem::swap(&mut u, &mut w);
        std::mem::swap(&mut tu, &mut tw);
        std::mem::swap(&mut eu, &mut ew);
    }
    for _ in 0..400 {
        let k = ((eu.re * ew.re + eu.im * ew.im) / eu.norm_sqr()).round();
        if k != 0.0 {
            let ki = k as i64;
            w = comb(w, ki as i128, u)?;
            tw = [tw[0] - ki * tu[0], tw[1] - ki * tu[1]];
            ew = emb(w)?;
        }
        if ew.norm_sqr() >= eu.norm_sqr() {
            return Ok(([eu, ew], [tu, tw]));
        }
        std::mem::swap(&mut u, &mut w);
        std::mem::swap(&mut tu, &mut tw);
        std::mem::swap(&mut eu, &mut ew);
    }
    Err(Error::Numeric("basis reduction did not terminate".into()))
}

fn int_norm(ab: (i128, i128), d: i128) -> Result<i128> {
    let a2 = ab.0.checked_mul(ab.0);
    let b2 = ab.1.checked_mul(ab.1).and_then(|x| x.checked_mul(d));
    a2.zip(b2).and_then(|(a2, b2)| a2.checked_sub(b2)).ok_or_else(|| Error::Numeric("norm overflows i128".into()))
}

fn precise_embedding(ab: (i128, i128), q: i128, d: i128, sd: f64) -> Result<(f64, f64)> {
    let (a, b) = (ab.0 as f64, ab.1 as f64);
    let q = q as f64;
    let n = int_norm(ab, d)? as f64;
    Ok(if ab.0.signum() * ab.1.signum() >= 0 {
        let x = (a + b * sd) / q;
        let xc = if x != 0.0 { n / (q * q) / x } else { (a - b * sd) / q };
        (x, xc)
    } else {
        let xc = (a - b * sd) / q;
        let x = if xc != 0.0 { n / (q * q) / xc } else { (a + b * sd) / q };
        (x, xc)
    })
}

/// `l0 + n1 l1 + n2 l2 -> -2 pi tr(l m0') - pi tr(l0 m0')`, reduced exactly mod `2 pi`.
struct Character {
    t1: (i128, i128),
    t2: (i128, i128),
    t0: f64,
}

impl Character {
    fn new(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem) -> Result<Self> {
        let frac = |r: BigRational| -> Result<(i128, i128)> {
            r.numer()
                .to_i128()
                .zip(r.denom().to_i128())
                .ok_or_else(|| Error::Numeric("character data too large".into()))
        };
        let t0 = twisted_trace(l0, m0);
        let two = BigRational::from_integer(BigInt::from(2));
        // only tr(l0 m0') mod 2 matters
        let t0 = &t0 - (&t0 / &two).floor() * &two;
        Ok(Character {
            t1: frac(twisted_trace(&l.l1, m0))?,
            t2: frac(twisted_trace(&l.l2, m0))?,
            t0: t0.to_f64().unwrap_or(0.0),
        })
    }

    fn phase(&self, n1: i64, n2: i64) -> f64 {
        let (t1, t2) = (self.t1, self.t2);
        let den = t1.1 * t2.1;
        let num = (n1 as i128 * t1.0 * t2.1 + n2 as i128 * t2.0 * t1.1).rem_euclid(den);
        -2.0 * PI * (num as f64 / den as f64) - PI * self.t0
    }
}

/// RM theta as a Dirichlet-type series `sum_n c_n e^{2 pi i v n}` grouped by norm.
#[derive(Clone, Debug)]
pub struct RmThetaSeries {
    /// Distinct values of `|N(x)|` in increasing order.
    pub norms: Vec<f64>,
    pub coeffs: Vec<Complex64>,
    pub nbound: f64,
    pub terms: usize,
}

impl RmThetaSeries {
    pub fn build(spec: &ThetaSpec, nbound: f64) -> Result<Self> {
        let l = &spec.lattice;
        let reps = coset_reps(l, &spec.l0, &spec.eps, nbound)?;
        let ch = Character::new(l, &spec.l0, &spec.m0)?;
        let mut grouped: BTreeMap<(i128, i128), Complex64> = BTreeMap::new();
        let mut order: Vec<(i128, i128)> = Vec::new();
        for r in &reps {
            let w = spec.eta.re * r.sgn_conj() as f64 + spec.eta.im * r.sgn() as f64;
            if w == 0.0 {
                continue;
            }
            let phase = ch.phase(r.n1, r.n2);
            let key = (r.norm_num, r.norm_den);
            let entry = grouped.entry(key).or_insert_with(|| {
                order.push(key);
                Complex64::new(0.0, 0.0)
            });
            *entry += w * Complex64::from_polar(1.0, phase);
        }
        let mut norms = Vec::with_capacity(order.len());
        let mut coeffs = Vec::with_capacity(order.len());
        for key in order {
            norms.push(key.0 as f64 / key.1 as f64);
            coeffs.push(grouped[&key]);
        }
        Ok(RmThetaSeries { norms, coeffs, nbound, terms: reps.len() })
    }

    /// Evaluate at `v`; the smallest terms are added first.
    pub fn eval(&self, v: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (n, c) in self.norms.iter().zip(&self.coeffs).rev() {
            s += c * (2.0 * PI * I * v * n).exp();
        }
        s
    }

    /// `sum_n c_n n^{-s}`, the truncated Dirichlet series.
    pub fn dirichlet(&self, s: Complex64, weight: impl Fn(f64) -> f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in self.norms.iter().zip(&self.coeffs).rev() {
            let w = weight(*n);
            if w != 0.0 {
                acc += c * w * Complex64::new(*n, 0.0).powc(-s);
            }
        }
        acc
    }
}

/// Truncation bound `B` with the Gaussian tail below `tol`.
///
/// With `A = 4 log(eps) / Delta(L)` the number of orbit representatives with
/// `|N(x)| <= X` is `A X + O(sqrt X)`; we use the cruder `2 A X + 2 A + 16`
/// which gives `tail(B) <= |eta|_1 (2 A (B + 1/(2 pi y)) + 2 A + 16) e^{-2 pi y B}`.
pub fn rm_truncation(spec: &ThetaSpec, y: f64, tol: f64) -> f64 {
    let a = 4.0 * spec.log_eps() / spec.delta();
    let w = spec.eta.re.abs() + spec.eta.im.abs();
    let tail = |b: f64| w * (2.0 * a * (b + 1.0 / (2.0 * PI * y)) + 2.0 * a + 16.0) * (-2.0 * PI * y * b).exp();
    let mut b = 1.0;
    while tail(b) > tol {
        b *= 1.1;
    }
    b
}

fn check_upper(v: Complex64) -> Result<()> {
    if v.im > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Im v must be positive, got {}", v)))
    }
}

/// Evaluated theta value with its truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub nbound: f64,
    pub terms: usize,
}

pub fn theta_rm(spec: &ThetaSpec, v: Complex64, tol: f64) -> Result<ThetaValue> {
    check_upper(v)?;
    if spec.eta == Complex64::new(0.0, 0.0) {
        return Ok(ThetaValue { value: Complex64::new(0.0, 0.0), nbound: 0.0, terms: 0 });
    }
    let b = rm_truncation(spec, v.im, tol);
    let series = RmThetaSeries::build(spec, b)?;
    Ok(ThetaValue { value: series.eval(v), nbound: b, terms: series.terms })
}

/// Data of a classical lattice theta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeThetaSpec {
    pub basis: [Complex64; 2],
    pub lambda0: Complex64,
    pub mu0: Complex64,
    pub eta: Complex64,
}

impl LatticeThetaSpec {
    pub fn covolume(&self) -> f64 {
        let [w1, w2] = self.basis;
        (w1.re * w2.im - w2.re * w1.im).abs()
    }

    /// `Lambda_t(L)` with shifts lifted from `l0`, `m0`.
    pub fn from_lift(l: &Pseudolattice, l0: &QuadElem, m0: &QuadElem, eta: Complex64, t: f64) -> Self {
        LatticeThetaSpec {
            basis: [lift_point(&l.l1, t), lift_point(&l.l2, t)],
            lambda0: lift_point(l0, t),
            mu0: lift_point(m0, t),
            eta,
        }
    }
}

/// Lagrange-Gauss reduction; returns the reduced basis and the integer change
/// `reduced = M * original` as rows.
fn reduce_basis(b: [Complex64; 2]) -> ([Complex64; 2], [[i64; 2]; 2]) {
    let (mut u, mut w) = (b[0], b[1]);
    let mut mu = [1i64, 0];
    let mut mw = [0i64, 1];
    if u.norm_sqr() > w.norm_sqr() {
        std::mem::swap(&mut u, &mut w);
        std::mem::swap(&mut mu, &mut mw);
    }
    loop {
        let k = ((u.re * w.re + u.im * w.im) / u.norm_sqr()).round();
        w -= u * k;
        let ki = k as i64;
        mw = [mw[0] - ki * mu[0], mw[1] - ki * mu[1]];
        if w.norm_sqr() >= u.norm_sqr() {
            break;
        }
        std::mem::swap(&mut u, &mut w);
        std::mem::swap(&mut mu, &mut mw);
    }
    ([u, w], [mu, mw])
}

/// Lattice theta with the radius chosen from the Gaussian tail.
pub fn theta_lattice(spec: &LatticeThetaSpec, v: Complex64, tol: f64) -> Result<ThetaValue> {
    check_upper(v)?;
    let y = v.im;
    let eta_abs = spec.eta.norm();
    if eta_abs == 0.0 {
        return Ok(ThetaValue { value: Complex64::new(0.0, 0.0), nbound: 0.0, terms: 0 });
    }
    let ([r1, r2], m) = reduce_basis(spec.basis);
    let radius = lattice_radius(spec.covolume(), r1.norm(), eta_abs, y, tol);
    // enumerate k1 r1 + k2 r2 around -lambda0
    let det = r1.re * r2.im - r2.re * r1.im;
    let c = -spec.lambda0;
    let k1c = (c.re * r2.im - r2.re * c.im) / det;
    let k2c = (r1.re * c.im - c.re * r1.im) / det;
    let k1s = radius * r2.norm() / det.abs() + 1.0;
    let k2s = radius * r1.norm() / det.abs() + 1.0;
    let mut pts: Vec<(f64, [i64; 2], Complex64)> = Vec::new();
    for k1 in (k1c - k1s).floor() as i64..=(k1c + k1s).ceil() as i64 {
        for k2 in (k2c - k2s).floor() as i64..=(k2c + k2s).ceil() as i64 {
            let lam = r1 * k1 as f64 + r2 * k2 as f64;
            let s = spec.lambda0 + lam;
            let rr = s.norm();
            if rr <= radius {
                let n = [k1 * m[0][0] + k2 * m[1][0], k1 * m[0][1] + k2 * m[1][1]];
                pts.push((rr, n, lam));
            }
        }
    }
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(b.1.cmp(&a.1)));
    let base_phase = -PI * pairing(spec.lambda0, spec.mu0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (_, _, lam) in &pts {
        let s = spec.lambda0 + lam;
        let coef = pairing(s, spec.eta);
        if coef == 0.0 {
            continue;
        }
        let ph = -2.0 * PI * pairing(*lam, spec.mu0) + base_phase;
        sum += coef * (PI * I * v * s.norm_sqr()).exp() * Complex64::from_polar(1.0, ph);
    }
    Ok(ThetaValue { value: sum, nbound: radius, terms: pts.len() })
}

/// `theta_{Lambda_t(L), eta}[l0_t; m0_t](v)` enumerated over `(n1, n2)` with
/// exact phases `(lambda . mu0_t) = tr(l m0')` and cancellation-free lifts.
pub fn theta_lifted(
    l: &Pseudolattice,
    l0: &QuadElem,
    m0: &QuadElem,
    eta: Complex64,
    t: f64,
    v: Complex64,
    tol: f64,
) -> Result<ThetaValue> {
    check_upper(v)?;
    let y = v.im;
    let eta_abs = eta.norm();
    if eta_abs == 0.0 {
        return Ok(ThetaValue { value: Complex64::new(0.0, 0.0), nbound: 0.0, terms: 0 });
    }
    let model = IntModel::new(l, l0)?;
    let ch = Character::new(l, l0, m0)?;
    let (sp, sm) = ((t / 2.0).exp(), (-t / 2.0).exp());
    let lifted = |e: (f64, f64)| Complex64::new(e.0 * sp, e.1 * sm);
    let (red, _) = reduce_basis([lifted(model.emb[1]), lifted(model.emb[2])]);
    let radius = lattice_radius(delta(l).to_f64(), red[0].norm(), eta_abs, y, tol);
    let sd = (l.d as f64).sqrt();
    let mut pts: Vec<(f64, i64, i64, Complex64)> = Vec::new();
    for (n1, n2) in box_points(&model, radius / sp, radius / sm)? {
        let ab = model.at(n1, n2)?;
        if ab == (0, 0) {
            continue;
        }
        let s = lifted(precise_embedding(ab, model.q, model.d, sd)?);
        let r = s.norm();
        if r <= radius {
            pts.push((r, n1, n2, s));
        }
    }
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then((b.1, b.2).cmp(&(a.1, a.2))));
    let mut sum = Complex64::new(0.0, 0.0);
    for (_, n1, n2, s) in &pts {
        let coef = pairing(*s, eta);
        sum += coef * (PI * I * v * s.norm_sqr()).exp() * Complex64::from_polar(1.0, ch.phase(*n1, *n2));
    }
    Ok(ThetaValue { value: sum, nbound: radius, terms: pts.len() })
}

/// Radius with the Gaussian tail of a lattice theta below `tol`; points in
/// the annulus `[r, r + dr]` are bounded by `(2 pi r / cov + 4 / lmin + 1) dr`.
fn lattice_radius(cov: f64, lmin: f64, eta_abs: f64, y: f64, tol: f64) -> f64 {
    let tail = |r: f64| {
        eta_abs * (r + 1.0) * (2.0 * PI * r / cov + 4.0 / lmin + 1.0) * (r + 1.0 / (PI * y)) * (-PI * y * r * r).exp()
            / (2.0 * PI * y * r).max(1.0)
    };
    let mut radius = 1.0;
    while tail(radius) > tol {
        radius *= 1.05;
    }
    radius
}

/// `sqrt(-i v)`, positive on the upper imaginary axis.
pub fn sqrt_minus_iv(v: Complex64) -> Complex64 {
    (-I * v).sqrt()
}

const HECKE_PANEL: f64 = 0.25;

/// Hecke average `sqrt(-iv) int_{-log eps}^{log eps} theta_{Lambda_t}(v) dt`.
pub fn hecke_average(spec: &ThetaSpec, v: Complex64, quad_tol: f64) -> Result<(Complex64, usize)> {
    check_upper(v)?;
    let le = spec.log_eps();
    // tiny inner tolerance keeps truncation jumps far below the Simpson tolerance
    let inner_tol = 1e-18;
    let err = std::cell::Cell::new(None);
    let f = |t: f64| match theta_lifted(&spec.lattice, &spec.l0, &spec.m0, spec.eta, t, v, inner_tol) {
        Ok(x) => x.value,
        Err(e) => {
            err.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    // fixed panels first: the integrand is concentrated and Simpson alone
    // can accept a near-zero estimate from its first five samples
    let panels = ((2.0 * le / HECKE_PANEL).ceil() as usize).max(1);
    let h = 2.0 * le / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    for k in 0..panels {
        let a = -le + k as f64 * h;
        let r = adaptive_simpson(f, a, a + h, quad_tol / panels as f64)?;
        total += r.value;
        evals += r.evaluations;
    }
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok((sqrt_minus_iv(v) * total, evals))
}

/// Both sides of the lattice functional equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// `theta_{Lambda_t, eta}[l0; m0](v)` against
/// `i / (Delta v^2) theta_{Lambda_t(L^?), i conj(eta)}[m0; -l0](-1/v)`.
pub fn lattice_fe_residual(
    l: &Pseudolattice,
    l0: &QuadElem,
    m0: &QuadElem,
    eta: Complex64,
    t: f64,
    v: Complex64,
    tol: f64,
) -> Result<FeReport> {
    let lhs = theta_lifted(l, l0, m0, eta, t, v, tol)?.value;
    let dual = dual_pseudolattice(l);
    let dl = delta(l).to_f64();
    let w = theta_lifted(&dual, m0, &-l0, I * eta.conj(), t, -1.0 / v, tol)?.value;
    let rhs = I / (dl * v * v) * w;
    Ok(FeReport { lhs, rhs, residual: (lhs - rhs).norm() })
}

/// `Theta^U_L(v)` against `1/(Delta v) Theta^U_{L^?}[m0; -l0](-1/v)`.
pub fn fe_rm_residual(spec: &ThetaSpec, v: Complex64, tol: f64) -> Result<FeReport> {
    let lhs = theta_rm(spec, v, tol)?.value;
    let dual = spec.dual()?;
    let w = -1.0 / v;
    let rhs = theta_rm(&dual, w, tol * spec.delta() * v.norm())?.value / (spec.delta() * v);
    Ok(FeReport { lhs, rhs, residual: (lhs - rhs).norm() })
}

/// Closed-form Fourier transform of `(x . eta) e^{pi i v |x|^2}` at `y`.
pub fn gaussian_ft_closed(v: Complex64, eta: Complex64, y: Complex64) -> Complex64 {
    I / (v * v) * pairing(y, I * eta.conj()) * (-PI * I / v * y.norm_sqr()).exp()
}

/// Same transform by tensor Gauss-Legendre quadrature over a large square.
pub fn gaussian_ft_quadrature(v: Complex64, eta: Complex64, y: Complex64) -> Complex64 {
    let half = (45.0 / (PI * v.im)).sqrt();
    let freq = 2.0 * PI * (v.re.abs() * half + y.norm()) + 1.0;
    let panels = ((2.0 * half * freq / 8.0).ceil() as usize).clamp(24, 400);
    let rule = crate::quad::CompositeRule::new(-half, half, panels, 16);
    let mut total = Complex64::new(0.0, 0.0);
    for (&x0, &w0) in rule.nodes.iter().zip(&rule.weights) {
        let mut row = Complex64::new(0.0, 0.0);
        for (&x1, &w1) in rule.nodes.iter().zip(&rule.weights) {
            let x = Complex64::new(x0, x1);
            let f = pairing(x, eta) * (PI * I * v * x.norm_sqr()).exp();
            row += w1 * f * Complex64::from_polar(1.0, -2.0 * PI * pairing(x, y));
        }
        total += w0 * row;
    }
    total
}

pub fn gaussian_ft_check(v: Complex64, eta: Complex64, y: Complex64) -> Result<(Complex64, Complex64)> {
    check_upper(v)?;
    Ok((gaussian_ft_closed(v, eta, y), gaussian_ft_quadrature(v, eta, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn worked_example_unit_is_found_by_search() {
        let spec = worked_example();
        let e = unit_group_for(&spec.lattice, &spec.l0, &spec.m0).unwrap();
        assert_eq!(e, QuadElem::from_ints(26, 15, 3));
        let ok = Pseudolattice::ring_of_integers(5).unwrap();
        let e = unit_group_for(&ok, &QuadElem::zero(5), &QuadElem::zero(5)).unwrap();
        assert_eq!(e, QuadElem::from_frac(3, 1, 2, 5));
    }

    #[test]
    fn half_character_needs_a_power() {
        let ok = Pseudolattice::ring_of_integers(2).unwrap();
        let half = QuadElem::from_frac(1, 0, 2, 2);
        let e = unit_group_for(&ok, &QuadElem::zero(2), &half).unwrap();
        // 3+2 sqrt 2 moves tr(l/2) by an integer for l = sqrt 2 but the
        // condition on l = 1 needs tr((e-1)/2) integral: (2+2sqrt2)/2 has trace 2
        assert!(unit_conditions(&ok, &QuadElem::zero(2), &half, &e).all());
        assert_eq!(e, QuadElem::from_ints(3, 2, 2));
    }

    #[test]
    fn reps_are_distinct_orbits() {
        let spec = worked_example();
        let reps = coset_reps(&spec.lattice, &spec.l0, &spec.eps, 50.0).unwrap();
        assert!(!reps.is_empty());
        let model_l0 = &spec.l0;
        for (i, a) in reps.iter().enumerate() {
            let xa = &spec.lattice.element(&a.n1.into(), &a.n2.into()) + model_l0;
            assert!(xa.norm().abs() <= BigRational::from_integer(50.into()));
            for b in reps.iter().skip(i + 1) {
                let xb = &spec.lattice.element(&b.n1.into(), &b.n2.into()) + model_l0;
                let ratio = xa.try_div(&xb).unwrap();
                for k in -3..=3i32 {
                    let p = if k >= 0 { spec.eps.pow(k as u32) } else { spec.eps.inv().unwrap().pow((-k) as u32) };
                    assert_ne!(ratio, p);
                }
            }
        }
    }

    #[test]
    fn squared_unit_doubles_reps() {
        let spec = worked_example();
        let a = coset_reps(&spec.lattice, &spec.l0, &spec.eps, 400.0).unwrap();
        let b = coset_reps(&spec.lattice, &spec.l0, &spec.eps.pow(2), 400.0).unwrap();
        assert_eq!(2 * a.len(), b.len());
    }

    #[test]
    fn zero_eta_gives_zero() {
        let mut spec = worked_example();
        spec.eta = Complex64::new(0.0, 0.0);
        assert_eq!(theta_rm(&spec, I, 1e-12).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn theta_rm_truncation_is_stable() {
        let spec = worked_example();
        let a = theta_rm(&spec, I, 1e-12).unwrap();
        let s = RmThetaSeries::build(&spec, 2.0 * a.nbound).unwrap();
        assert!((s.eval(I) - a.value).norm() < 1e-10);
        let b = theta_rm(&spec, 2.0 * I, 1e-12).unwrap();
        assert!(b.value.norm() < a.value.norm());
    }

    #[test]
    fn square_lattice_theta_matches_double_sum() {
        let spec = LatticeThetaSpec {
            basis: [Complex64::new(1.0, 0.0), I],
            lambda0: Complex64::new(0.0, 0.0),
            mu0: Complex64::new(0.0, 0.0),
            eta: Complex64::new(1.0, 0.0),
        };
        let got = theta_lattice(&spec, I, 1e-14).unwrap().value;
        let mut brute = Complex64::new(0.0, 0.0);
        for a in -12..=12 {
            for b in -12..=12 {
                let x = Complex64::new(a as f64, b as f64);
                brute += pairing(x, spec.eta) * (-PI * x.norm_sqr()).exp();
            }
        }
        assert!((got - brute).norm() < 1e-12);
    }

    #[test]
    fn ft_at_origin_vanishes() {
        let z = gaussian_ft_closed(I, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sqrt_branch() {
        assert!((sqrt_minus_iv(2.0 * I) - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }
}
