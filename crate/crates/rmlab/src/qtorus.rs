//! Quantum tori `C(D, alpha)` built from a lattice `D` embedded in a
//! symplectic space `R^{2N}` with form `A(x, y) = x1.y2 - x2.y1`.
//!
//! Operators act on `L2(R^N)` through the realization
//! `(U_y f)(x) = exp(2 pi i x.y2 + pi i y1.y2) f(x + y1)`, so that
//! `U_y U_z = psi(y, z) U_{y+z}` with `psi = exp(pi i A)`. The lattice
//! generators are `e(h) = U_{Bh}` and the dual lattice acts on the right by
//! `f . e!(k) = U_{-B!k} f`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pseudolattice::Mat2;
use crate::quad::CompositeRule;
use crate::quadfield::QuadElem;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

// ---------------------------------------------------------------- Morita

/// `g` normalized so that `j = c theta + d > 0`, with `target = g theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoritaMatrix {
    pub g: Mat2,
    pub source: QuadElem,
    pub target: QuadElem,
    pub j: QuadElem,
}

/// Exact fractional linear action, flipping the sign of `g` if needed.
pub fn morita_act(g: &Mat2, theta: &QuadElem) -> Result<MoritaMatrix> {
    let det = g.det();
    if det != 1.into() && det != (-1).into() {
        return Err(Error::InvalidInput(format!("{} is not in GL(2, Z)", g)));
    }
    let mut g = g.clone();
    let mut j = g.cocycle(theta);
    match j.sign() {
        0 => {
            return Err(Error::Domain(format!("c theta + d vanishes for {} at {}", g, theta)));
        }
        -1 => {
            g = g.neg();
            j = -j;
        }
        _ => {}
    }
    let target = g.act(theta)?;
    Ok(MoritaMatrix { g, source: theta.clone(), target, j })
}

/// Float version of [`morita_act`]: returns `(g', theta', j)`.
pub fn morita_act_f64(g: [[i64; 2]; 2], theta: f64) -> Result<([[i64; 2]; 2], f64, f64)> {
    let [[a, b], [c, d]] = g;
    if (a * d - b * c).abs() != 1 {
        return Err(Error::InvalidInput(format!("{:?} is not in GL(2, Z)", g)));
    }
    let j = c as f64 * theta + d as f64;
    if j == 0.0 || !j.is_finite() {
        return Err(Error::Domain("c theta + d vanishes".into()));
    }
    let s = j.signum() as i64;
    let g = [[s * a, s * b], [s * c, s * d]];
    Ok((g, (a as f64 * theta + b as f64) / (c as f64 * theta + d as f64), j.abs()))
}

/// Composition `g h` acting on `theta`, with the three cocycle values.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition {
    pub product: Mat2,
    pub target: QuadElem,
    pub j_product: QuadElem,
    pub j_outer: QuadElem,
    pub j_inner: QuadElem,
    pub exact: bool,
}

/// `j(gh, theta) = j(g, h theta) j(h, theta)`, checked exactly.
pub fn morita_compose(g: &Mat2, h: &Mat2, theta: &QuadElem) -> Result<Composition> {
    let inner = morita_act(h, theta)?;
    let outer = morita_act(g, &inner.target)?;
    let product = outer.g.mul(&inner.g);
    let j_product = product.cocycle(theta);
    let target = product.act(theta)?;
    let exact = j_product == &outer.j * &inner.j && target == outer.target;
    Ok(Composition { product, target, j_product, j_outer: outer.j, j_inner: inner.j, exact })
}

// ------------------------------------------------------ embedded lattices

/// Lattice `D = B Z^{2N}` inside `R^{2N}`; columns of `basis` generate it.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedLattice {
    pub n: usize,
    pub basis: DMatrix<f64>,
    pairing: DMatrix<f64>,
}

fn symplectic_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

impl EmbeddedLattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let m = basis.nrows();
        if m == 0 || !m.is_multiple_of(2) || basis.ncols() != m {
            return Err(Error::InvalidInput("basis must be a square 2N x 2N matrix".into()));
        }
        let det = basis.determinant();
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(Error::Domain("lattice basis is singular".into()));
        }
        let pairing = basis.transpose() * symplectic_j(m / 2) * &basis;
        Ok(EmbeddedLattice { n: m / 2, basis, pairing })
    }

    /// `D = theta Z x Z` in `R^2`.
    pub fn rotation(theta: f64) -> Result<Self> {
        EmbeddedLattice::new(DMatrix::from_row_slice(2, 2, &[theta, 0.0, 0.0, 1.0]))
    }

    pub fn rank(&self) -> usize {
        2 * self.n
    }

    pub fn point(&self, h: &[i64]) -> DVector<f64> {
        let v = DVector::from_iterator(h.len(), h.iter().map(|&x| x as f64));
        &self.basis * v
    }

    /// `A(Bh, Bk)`.
    pub fn form(&self, h: &[i64], k: &[i64]) -> f64 {
        let mut s = 0.0;
        for (i, &hi) in h.iter().enumerate() {
            if hi == 0 {
                continue;
            }
            for (j, &kj) in k.iter().enumerate() {
                s += hi as f64 * self.pairing[(i, j)] * kj as f64;
            }
        }
        s
    }

    /// Volume `|det B|` of a fundamental domain.
    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// `D! = {x : A(Bg, x) in Z for all g}` with basis `-J B^{-T}`.
    pub fn dual(&self) -> Result<EmbeddedLattice> {
        let inv_t = self.basis.transpose().try_inverse().ok_or_else(|| Error::Domain("singular pairing".into()))?;
        EmbeddedLattice::new(-symplectic_j(self.n) * inv_t)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match self.basis.clone().lu().solve(x) {
            Some(c) => c.iter().all(|v| (v - v.round()).abs() <= tol),
            None => false,
        }
    }

    /// Mutual membership of the two bases.
    pub fn same_lattice(&self, other: &EmbeddedLattice, tol: f64) -> bool {
        self.n == other.n
            && other.basis.column_iter().all(|c| self.contains(&c.into_owned(), tol))
            && self.basis.column_iter().all(|c| other.contains(&c.into_owned(), tol))
    }
}

// ------------------------------------------------------------ Siegel space

/// Complex symmetric `T` with positive definite imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    pub t: DMatrix<Complex64>,
    y: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    det_y: f64,
    gram: DMatrix<f64>,
}

impl SiegelPoint {
    pub fn new(t: DMatrix<Complex64>) -> Result<Self> {
        let n = t.nrows();
        if n == 0 || t.ncols() != n {
            return Err(Error::InvalidInput("T must be square".into()));
        }
        let scale = t.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..n {
            for j in 0..i {
                if (t[(i, j)] - t[(j, i)]).norm() > 1e-14 * scale {
                    return Err(Error::InvalidInput("T is not symmetric".into()));
                }
            }
        }
        let y = t.map(|z| z.im);
        let chol = y.clone().cholesky().ok_or_else(|| Error::Domain("Im T is not positive definite".into()))?;
        let det_y = chol.l().diagonal().iter().map(|d| d * d).product();
        let y_inv = chol.inverse();
        // cross(z, z) = z^t gram z
        let x = t.map(|z| z.re);
        let xyi = &x * &y_inv;
        let mut gram = DMatrix::zeros(2 * n, 2 * n);
        gram.view_mut((0, 0), (n, n)).copy_from(&(&xyi * &x + &y));
        gram.view_mut((0, n), (n, n)).copy_from(&xyi);
        gram.view_mut((n, 0), (n, n)).copy_from(&xyi.transpose());
        gram.view_mut((n, n), (n, n)).copy_from(&y_inv);
        Ok(SiegelPoint { t, y, y_inv, det_y, gram })
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        SiegelPoint::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// `(2^N det Im T)^{-1/2}`.
    pub fn normalization(&self) -> f64 {
        (2f64.powi(self.n() as i32) * self.det_y).powf(-0.5)
    }

    fn halves(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n = self.n();
        (z.rows(0, n).into_owned(), z.rows(n, n).into_owned())
    }

    /// `z = T z1 + z2`.
    pub fn underline(&self, z: &DVector<f64>) -> DVector<Complex64> {
        let (z1, z2) = self.halves(z);
        &self.t * z1.map(Complex64::from) + z2.map(Complex64::from)
    }

    /// `Re(g^t (Im T)^{-1} h*)`, a real symmetric bilinear form.
    pub fn cross(&self, g: &DVector<f64>, h: &DVector<f64>) -> f64 {
        let (g1, g2) = self.halves(g);
        let (h1, h2) = self.halves(h);
        let x = self.t.map(|z| z.re);
        let (ug, uh) = (&x * &g1 + g2, &x * &h1 + h2);
        let (vg, vh) = (&self.y * g1, &self.y * h1);
        ug.dot(&(&self.y_inv * uh)) + vg.dot(&(&self.y_inv * vh))
    }

    /// `cross(z, z)` without allocating.
    pub fn quad_form(&self, z: &[f64]) -> f64 {
        let m = z.len();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += z[i] * self.gram[(i, j)] * z[j];
            }
        }
        s
    }

    /// `<f_T, U_z f_T>` for arbitrary `z`.
    pub fn gaussian_inner(&self, z: &DVector<f64>) -> f64 {
        self.normalization() * (-0.5 * PI * self.quad_form(z.as_slice())).exp()
    }

    /// `f_T(x) = exp(pi i x^t T x)`.
    pub fn f_t(&self, x: &[f64]) -> Complex64 {
        let mut s = Complex64::zero();
        for i in 0..x.len() {
            for j in 0..x.len() {
                s += self.t[(i, j)] * x[i] * x[j];
            }
        }
        (PI * I * s).exp()
    }
}

// ---------------------------------------------------------- coefficient maps

/// Coefficients on the box `||h||_inf <= radius` of `Z^rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMap {
    pub rank: usize,
    pub radius: i64,
    pub data: Vec<Complex64>,
}

impl CoeffMap {
    pub fn zero(rank: usize, radius: i64) -> Self {
        let side = (2 * radius + 1) as usize;
        CoeffMap { rank, radius, data: vec![Complex64::zero(); side.pow(rank as u32)] }
    }

    pub fn unit(rank: usize, radius: i64) -> Self {
        let mut m = CoeffMap::zero(rank, radius);
        let o = m.index(&vec![0; rank]).unwrap();
        m.data[o] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn index(&self, h: &[i64]) -> Option<usize> {
        let side = 2 * self.radius + 1;
        let mut idx = 0i64;
        for &x in h.iter().rev() {
            if x.abs() > self.radius {
                return None;
            }
            idx = idx * side + x + self.radius;
        }
        Some(idx as usize)
    }

    pub fn point(&self, mut idx: usize) -> Vec<i64> {
        let side = (2 * self.radius + 1) as usize;
        (0..self.rank)
            .map(|_| {
                let x = (idx % side) as i64 - self.radius;
                idx /= side;
                x
            })
            .collect()
    }

    pub fn get(&self, h: &[i64]) -> Complex64 {
        self.index(h).map_or(Complex64::zero(), |i| self.data[i])
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.data.len()).map(move |i| self.point(i))
    }

    /// `(F*)_h = conj(F_{-h})`.
    pub fn adjoint(&self) -> CoeffMap {
        let mut out = self.clone();
        for (i, h) in self.points().enumerate() {
            let neg: Vec<i64> = h.iter().map(|x| -x).collect();
            out.data[i] = self.get(&neg).conj();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn l1(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).sum()
    }

    pub fn max_diff(&self, other: &CoeffMap) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> CoeffMap {
        CoeffMap { data: self.data.iter().map(|z| z * s).collect(), ..self.clone() }
    }

    pub fn combine(&self, other: &CoeffMap, a: f64, b: f64) -> CoeffMap {
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect();
        CoeffMap { data, ..self.clone() }
    }

    /// Largest coefficient on the boundary of the box.
    pub fn boundary_max(&self) -> f64 {
        self.points()
            .zip(&self.data)
            .filter(|(h, _)| h.iter().any(|x| x.abs() == self.radius))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}

const NEGLIGIBLE: f64 = 1e-22;

/// Twisted convolution on `C(D, psi^sign)`: `e(k) e(l) = exp(sign pi i A(Bk, Bl)) e(k+l)`.
#[derive(Clone, Debug)]
pub struct TwistedAlgebra {
    pub lattice: EmbeddedLattice,
    pub sign: f64,
}

impl TwistedAlgebra {
    pub fn cocycle(&self, k: &[i64], l: &[i64]) -> Complex64 {
        cis(self.sign * PI * self.lattice.form(k, l))
    }

    /// Truncated product and the mass `sum |F_k||G_l|` of dropped terms.
    pub fn mul(&self, f: &CoeffMap, g: &CoeffMap) -> (CoeffMap, f64) {
        let mut out = CoeffMap::zero(f.rank, f.radius);
        let mut dropped = 0.0;
        let rank = f.rank;
        let pts: Vec<i64> = f.points().flatten().collect();
        let rows: Vec<f64> = pts
            .chunks(rank)
            .flat_map(|k| {
                (0..rank).map(move |j| (0..rank).map(|i| k[i] as f64 * self.lattice.pairing[(i, j)]).sum::<f64>())
            })
            .collect();
        let (gmax, gl1) = (g.max_abs(), g.l1());
        let live: Vec<usize> = (0..g.len()).filter(|&l| !g.data[l].is_zero()).collect();
        let mut sum = vec![0i64; rank];
        for (ki, k) in pts.chunks(rank).enumerate() {
            let fk = f.data[ki];
            let fkn = fk.norm();
            if fkn * gmax < NEGLIGIBLE {
                dropped += fkn * gl1;
                continue;
            }
            let row = &rows[ki * rank..(ki + 1) * rank];
            for &li in &live {
                let gl = g.data[li];
                if fkn * gl.norm() < NEGLIGIBLE {
                    dropped += fkn * gl.norm();
                    continue;
                }
                let l = &pts[li * rank..(li + 1) * rank];
                let mut a = 0.0;
                for i in 0..rank {
                    sum[i] = k[i] + l[i];
                    a += row[i] * l[i] as f64;
                }
                match out.index(&sum) {
                    Some(i) => out.data[i] += fk * gl * cis(self.sign * PI * a),
                    None => dropped += fkn * gl.norm(),
                }
            }
        }
        (out, dropped)
    }

    /// Matrix of left multiplication by `f` compressed to the box.
    pub fn regular_matrix(&self, f: &CoeffMap) -> DMatrix<Complex64> {
        let m = f.len();
        let pts: Vec<Vec<i64>> = f.points().collect();
        DMatrix::from_fn(m, m, |i, l| {
            let k: Vec<i64> = pts[i].iter().zip(&pts[l]).map(|(a, b)| a - b).collect();
            f.get(&k) * self.cocycle(&k, &pts[l])
        })
    }
}

// ------------------------------------------------------------ quantum thetas

/// Which side of the Rieffel pairing a series lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Primal,
    Dual,
}

/// Truncated `Theta_D` or `Theta_{D!}`.
#[derive(Clone, Debug)]
pub struct QuantumThetaSeries {
    pub lattice: EmbeddedLattice,
    pub siegel: SiegelPoint,
    pub side: Side,
    pub coeffs: CoeffMap,
}

impl QuantumThetaSeries {
    pub fn radius(&self) -> i64 {
        self.coeffs.radius
    }

    /// The twisted algebra this series lives in.
    pub fn algebra(&self) -> TwistedAlgebra {
        let sign = match self.side {
            Side::Primal => 1.0,
            Side::Dual => -1.0,
        };
        TwistedAlgebra { lattice: self.lattice.clone(), sign }
    }
}

fn theta_series(lattice: EmbeddedLattice, t: &SiegelPoint, radius: i64, side: Side) -> Result<QuantumThetaSeries> {
    if t.n() != lattice.n {
        return Err(Error::InvalidInput("T and D have different dimensions".into()));
    }
    if radius < 0 {
        return Err(Error::InvalidInput("radius must be >= 0".into()));
    }
    let mut coeffs = CoeffMap::zero(lattice.rank(), radius);
    for i in 0..coeffs.len() {
        let h = coeffs.point(i);
        coeffs.data[i] = Complex64::new(t.gaussian_inner(&lattice.point(&h)), 0.0);
    }
    Ok(QuantumThetaSeries { lattice, siegel: t.clone(), side, coeffs })
}

/// `c_h = (2^N det Im T)^{-1/2} exp(-(pi/2) h^t (Im T)^{-1} h*)` on `D`.
pub fn qtheta_coeffs(d: &EmbeddedLattice, t: &SiegelPoint, radius: i64) -> Result<QuantumThetaSeries> {
    theta_series(d.clone(), t, radius, Side::Primal)
}

/// Same formula on the dual lattice `D!`.
pub fn qtheta_dual_coeffs(d: &EmbeddedLattice, t: &SiegelPoint, radius: i64) -> Result<QuantumThetaSeries> {
    theta_series(d.dual()?, t, radius, Side::Dual)
}

/// Closed form and direct quadrature of `<f_T, e(h) f_T>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerReport {
    pub closed: [f64; 2],
    pub quadrature: [f64; 2],
    pub evaluations: usize,
}

impl InnerReport {
    pub fn residual(&self) -> f64 {
        (Complex64::new(self.closed[0], self.closed[1]) - Complex64::new(self.quadrature[0], self.quadrature[1])).norm()
    }
}

/// Shift `lambda_h = (i/2) (Im T)^{-1} (conj(T) y1 + y2)` completing the square.
pub fn lambda_h(t: &SiegelPoint, y: &DVector<f64>) -> DVector<Complex64> {
    let (y1, y2) = t.halves(y);
    let w = t.t.map(|z| z.conj()) * y1.map(Complex64::from) + y2.map(Complex64::from);
    t.y_inv.map(Complex64::from) * w * (0.5 * I)
}

fn inner_closed(t: &SiegelPoint, y: &DVector<f64>) -> Complex64 {
    let (y1, y2) = t.halves(y);
    let y1c = y1.map(Complex64::from);
    let tbar = t.t.map(|z| z.conj());
    let c_h = PI * I * y1c.dot(&(&tbar * &y1c));
    let lam = lambda_h(t, y);
    let q = 2.0 * PI * lam.dot(&(t.y.map(Complex64::from) * &lam));
    let phase = -PI * I * y1.dot(&y2);
    t.normalization() * (phase - c_h + q).exp()
}

fn inner_integrand(t: &SiegelPoint, y1: &[f64], y2: &[f64], x: &[f64]) -> Complex64 {
    let n = x.len();
    let mut s = Complex64::zero();
    for i in 0..n {
        for j in 0..n {
            let tij = t.t[(i, j)];
            s += tij * x[i] * x[j] - tij.conj() * (x[i] + y1[i]) * (x[j] + y1[j]);
        }
        s -= 2.0 * x[i] * y2[i];
    }
    (PI * I * s).exp()
}

/// `<f_T, e(h) f_T>_{L2}` by completing the square and by Gauss-Legendre
/// quadrature of the defining integral (`N <= 2`).
pub fn heisenberg_inner(d: &EmbeddedLattice, t: &SiegelPoint, h: &[i64]) -> Result<InnerReport> {
    let n = d.n;
    if t.n() != n || h.len() != 2 * n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if n > 2 {
        return Err(Error::InvalidInput("quadrature oracle supports N <= 2".into()));
    }
    let y = d.point(h);
    let closed = inner_closed(t, &y);
    let (y1, y2) = t.halves(&y);
    let (y1, y2): (Vec<f64>, Vec<f64>) = (y1.iter().copied().collect(), y2.iter().copied().collect());

    // |integrand| = exp(-2 pi u^t Y u - (pi/2) y1^t Y y1) with u = x + y1/2
    let lmin = t.y.clone().symmetric_eigen().eigenvalues.min();
    let half = (40.0 / (2.0 * PI * lmin)).sqrt();
    let xr = t.t.map(|z| z.re);
    let freq: f64 = (xr * DVector::from_column_slice(&y1) + DVector::from_column_slice(&y2)).norm();
    let panels = ((2.0 * half / 0.5).ceil() + (2.0 * half * freq).ceil()) as usize;
    let rules: Vec<CompositeRule> =
        (0..n).map(|i| CompositeRule::new(-0.5 * y1[i] - half, -0.5 * y1[i] + half, panels, 20)).collect();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || t.t[(i, j)].is_zero()));
    let mut sum = Complex64::new(1.0, 0.0);
    let mut evals = 0;
    if diagonal {
        // the integrand factors coordinatewise
        for (i, rule) in rules.iter().enumerate() {
            let ti = SiegelPoint::diagonal(&[t.t[(i, i)]])?;
            sum *= rule.integrate(|x| inner_integrand(&ti, &y1[i..=i], &y2[i..=i], &[x]));
            evals += rule.nodes.len();
        }
    } else {
        sum = Complex64::zero();
        for (x0, w0) in rules[0].nodes.iter().zip(&rules[0].weights) {
            for (x1, w1) in rules[1].nodes.iter().zip(&rules[1].weights) {
                sum += inner_integrand(t, &y1, &y2, &[*x0, *x1]) * (w0 * w1);
                evals += 1;
            }
        }
    }
    let quad = cis(-PI * y1.iter().zip(&y2).map(|(a, b)| a * b).sum::<f64>()) * sum;
    if !quad.re.is_finite() || !quad.im.is_finite() {
        return Err(Error::Numeric("quadrature produced a non-finite value".into()));
    }
    Ok(InnerReport { closed: [closed.re, closed.im], quadrature: [quad.re, quad.im], evaluations: evals })
}

/// Multiplier `c_g` used in the functional equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Multiplier {
    /// `exp((3 pi/2) g^t (Im T)^{-1} g*)`.
    Printed,
    /// `exp(-(pi/2) g^t (Im T)^{-1} g*)`, the value the per-coefficient identity forces.
    Corrected,
}

/// Max over `||h|| <= R/2` of `|c_g exp(X_g(h-g) + s pi i A(g, h-g)) c_{h-g} - c_h|`.
pub fn qtheta_fe_residual(series: &QuantumThetaSeries, g: &[i64], multiplier: Multiplier) -> Result<f64> {
    let r = series.radius();
    let rank = series.lattice.rank();
    if g.len() != rank {
        return Err(Error::InvalidInput(format!("g must have {} entries", rank)));
    }
    if g.iter().any(|x| 2 * x.abs() > r) {
        return Err(Error::InvalidInput("g must lie within R/2 of the origin".into()));
    }
    let t = &series.siegel;
    let gv = series.lattice.point(g);
    let qg = t.cross(&gv, &gv);
    let cg = match multiplier {
        Multiplier::Printed => (1.5 * PI * qg).exp(),
        Multiplier::Corrected => (-0.5 * PI * qg).exp(),
    };
    // primal: X_g carries -pi i A and the product +pi i A; dual flips both
    let s = match series.side {
        Side::Primal => 1.0,
        Side::Dual => -1.0,
    };
    let mut worst = 0.0f64;
    for (i, h) in series.coeffs.points().enumerate() {
        if h.iter().any(|x| 2 * x.abs() > r) {
            continue;
        }
        let k: Vec<i64> = h.iter().zip(g).map(|(a, b)| a - b).collect();
        let kv = series.lattice.point(&k);
        let a = series.lattice.form(g, &k);
        let x = Complex64::new(-PI * t.cross(&gv, &kv), -s * PI * a);
        let lhs = cg * (x + s * PI * I * a).exp() * series.coeffs.get(&k);
        worst = worst.max((lhs - series.coeffs.data[i]).norm());
    }
    Ok(worst)
}

// ------------------------------------------------------- Gaussian vectors

/// `c exp(pi i x^t T x + 2 pi i b^t x)` with `Im T > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    pub t: DMatrix<Complex64>,
    pub b: DVector<Complex64>,
    pub c: Complex64,
}

fn sqrt_det_continued(p: &DMatrix<Complex64>) -> Complex64 {
    // follow det(Re P + i s Im P) from s = 0, where it is positive
    let re = p.map(|z| Complex64::new(z.re, 0.0));
    let im = p.map(|z| Complex64::new(0.0, z.im));
    let steps = 256;
    let mut root = re.determinant().sqrt();
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let r = (&re + &im * Complex64::new(s, 0.0)).determinant().sqrt();
        root = if (r - root).norm() <= (r + root).norm() { r } else { -r };
    }
    root
}

impl Gaussian {
    pub fn new(t: DMatrix<Complex64>, b: DVector<Complex64>, c: Complex64) -> Result<Self> {
        SiegelPoint::new(t.clone())?;
        if b.len() != t.nrows() {
            return Err(Error::InvalidInput("b has the wrong length".into()));
        }
        Ok(Gaussian { t, b, c })
    }

    /// `f_T` itself.
    pub fn standard(t: &SiegelPoint) -> Self {
        Gaussian { t: t.t.clone(), b: DVector::zeros(t.n()), c: Complex64::new(1.0, 0.0) }
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let xv = DVector::from_iterator(x.len(), x.iter().map(|&v| Complex64::from(v)));
        self.c * (PI * I * (xv.dot(&(&self.t * &xv)) + 2.0 * self.b.dot(&xv))).exp()
    }

    /// `U_y` applied to this vector, again a Gaussian.
    pub fn translate(&self, y: &DVector<f64>) -> Gaussian {
        let n = self.n();
        let y1 = y.rows(0, n).map(Complex64::from);
        let y2 = y.rows(n, n).map(Complex64::from);
        let phase = y1.dot(&y2) + y1.dot(&(&self.t * &y1)) + 2.0 * self.b.dot(&y1);
        Gaussian { t: self.t.clone(), b: &self.b + &self.t * &y1 + &y2, c: self.c * (PI * I * phase).exp() }
    }

    pub fn scaled(&self, s: Complex64) -> Gaussian {
        Gaussian { c: self.c * s, ..self.clone() }
    }

    /// `<self, other>_{L2} = int self * conj(other)`.
    pub fn inner(&self, other: &Gaussian) -> Complex64 {
        let p = (&self.t - other.t.map(|z| z.conj())) * Complex64::new(0.0, -1.0);
        let w = &self.b - other.b.map(|z| z.conj());
        let pinv = p.clone().try_inverse().expect("Re P is positive definite");
        let q = w.dot(&(&pinv * &w));
        self.c * other.c.conj() * (-PI * q).exp() / sqrt_det_continued(&p)
    }
}

/// `|K/D| _D<Phi, Psi>` and `<Phi, Psi>_{D!}` truncated at `radius`.
#[derive(Clone, Debug)]
pub struct RieffelProducts {
    pub series_a: CoeffMap,
    pub series_b: CoeffMap,
    pub tail: f64,
}

/// Both Rieffel scalar products of two Gaussians.
pub fn rieffel_products(phi: &Gaussian, psi: &Gaussian, d: &EmbeddedLattice, radius: i64) -> Result<RieffelProducts> {
    if phi.n() != d.n || psi.n() != d.n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let dual = d.dual()?;
    let vol = d.covolume();
    let mut a = CoeffMap::zero(d.rank(), radius);
    let mut b = CoeffMap::zero(d.rank(), radius);
    for i in 0..a.len() {
        let h = a.point(i);
        a.data[i] = phi.inner(&psi.translate(&d.point(&h))) * vol;
        b.data[i] = psi.translate(&dual.point(&h)).inner(phi);
    }
    let scale = a.max_abs().max(b.max_abs());
    let tail = a.boundary_max().max(b.boundary_max());
    if tail > 1e-6 * scale {
        return Err(Error::Numeric(format!("truncation radius {} too small: boundary coefficient {:e}", radius, tail)));
    }
    Ok(RieffelProducts { series_a: a, series_b: b, tail })
}

/// Max over `points` of `|_A<l, m> n - l <m, n>_B|`.
pub fn rieffel_identity_residual(
    l: &Gaussian,
    m: &Gaussian,
    n: &Gaussian,
    d: &EmbeddedLattice,
    radius: i64,
    points: &[Vec<f64>],
) -> Result<f64> {
    let a = rieffel_products(l, m, d, radius)?.series_a;
    let b = rieffel_products(m, n, d, radius)?.series_b;
    let dual = d.dual()?;
    let left: Vec<Gaussian> = a.points().map(|h| n.translate(&d.point(&h))).collect();
    let right: Vec<Gaussian> = b.points().map(|k| l.translate(&(-dual.point(&k)))).collect();
    let mut worst = 0.0f64;
    for x in points {
        let lhs: Complex64 = a.data.iter().zip(&left).map(|(c, g)| c * g.eval(x)).sum();
        let rhs: Complex64 = b.data.iter().zip(&right).map(|(c, g)| c * g.eval(x)).sum();
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------- Boca projection

/// Output of [`boca_projection`].
#[derive(Clone, Debug)]
pub struct BocaReport {
    pub p: CoeffMap,
    pub theta_inv_sqrt: CoeffMap,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    pub unit_residual: f64,
    pub idempotency: f64,
    pub self_adjointness: f64,
    pub trace: f64,
    pub dropped_mass: f64,
}

/// Largest regular-representation matrix used for the positivity check.
pub const MAX_REGULAR_SIZE: usize = 4096;
/// Boundary size at which the projection box stops growing.
pub const PROJECTION_TAIL: f64 = 1e-13;
const MAX_PROJECTION_SIZE: usize = 20_000;
const NEWTON_MAX_ITER: usize = 200;

/// `p = |K/D| _D<f_T X, f_T X>` with `X = Theta_{D!}^{-1/2}` from Newton-Schulz.
///
/// `radius` truncates `Theta_{D!}` and the iteration. The coefficients of `p`
/// decay only exponentially along directions where `D` nearly meets `D!`, so
/// `p` is evaluated on a box grown until its boundary drops below
/// [`PROJECTION_TAIL`].
pub fn boca_projection(d: &EmbeddedLattice, t: &SiegelPoint, radius: i64, newton_tol: f64) -> Result<BocaReport> {
    let theta = qtheta_dual_coeffs(d, t, radius)?;
    let alg_b = theta.algebra();
    let th = &theta.coeffs;
    if th.len() > MAX_REGULAR_SIZE {
        return Err(Error::InvalidInput(format!(
            "box of {} coefficients exceeds the positivity check limit {}",
            th.len(),
            MAX_REGULAR_SIZE
        )));
    }
    let min_eigenvalue = alg_b.regular_matrix(th).symmetric_eigen().eigenvalues.min();
    if min_eigenvalue <= 0.0 {
        return Err(Error::Numeric(format!("Theta is not numerically positive: {:e}", min_eigenvalue)));
    }

    let rank = d.rank();
    let mut dropped = 0.0f64;
    let mut x = CoeffMap::unit(rank, radius).scaled(Complex64::new(th.l1().powf(-0.5), 0.0));
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (x2, e1) = alg_b.mul(&x, &x);
        let (tx2, e2) = alg_b.mul(th, &x2);
        let inner = CoeffMap::unit(rank, radius).combine(&tx2, 3.0, -1.0);
        let (next, e3) = alg_b.mul(&x, &inner);
        let next = next.scaled(Complex64::new(0.5, 0.0));
        dropped = dropped.max(e1 + e2 + e3);
        let step = next.max_diff(&x);
        x = next;
        if !step.is_finite() || x.max_abs() > 1e8 {
            return Err(Error::Numeric(format!("Newton-Schulz diverged at iteration {}", iterations)));
        }
        if step < newton_tol {
            break;
        }
        if iterations >= NEWTON_MAX_ITER {
            return Err(Error::Numeric(format!(
                "Newton-Schulz stalled after {} iterations, last step {:e}",
                iterations, step
            )));
        }
    }
    let (xt, _) = alg_b.mul(&x, th);
    let (xtx, _) = alg_b.mul(&xt, &x);
    let unit_residual = xtx.max_diff(&CoeffMap::unit(rank, radius));

    // p_h = |K/D| sum_j exp(-pi i A(z_j, Bh)) G(Bh + z_j) W_j,
    // W_j = sum_l x_{l+j} conj(x_l) exp(pi i A(z_j, z_l)), z = B! k
    let dual = &theta.lattice;
    let wide = CoeffMap::zero(rank, 2 * radius);
    let mut w = Vec::new();
    for j in wide.points() {
        let zj = dual.point(&j);
        let mut s = Complex64::zero();
        for (li, l) in x.points().enumerate() {
            let lj: Vec<i64> = l.iter().zip(&j).map(|(a, b)| a + b).collect();
            let xlj = x.get(&lj);
            if !xlj.is_zero() {
                s += xlj * x.data[li].conj() * cis(PI * symplectic(&zj, &dual.point(&l)));
            }
        }
        if !s.is_zero() {
            w.push((zj, s));
        }
    }
    let vol = d.covolume();
    let term = |h: &[i64], bh: &mut [f64]| -> Complex64 {
        let p = d.point(h);
        let mut s = Complex64::zero();
        for (zj, wj) in &w {
            for (b, (pi, zi)) in bh.iter_mut().zip(p.iter().zip(zj.iter())) {
                *b = pi + zi;
            }
            let g = t.normalization() * (-0.5 * PI * t.quad_form(bh)).exp();
            s += wj * cis(-PI * symplectic(zj, &p)) * g;
        }
        s * vol
    };
    let mut buf = vec![0.0; rank];
    let mut p_radius = radius;
    loop {
        let probe = CoeffMap::zero(rank, p_radius);
        if probe.len() > MAX_PROJECTION_SIZE {
            return Err(Error::Numeric(format!(
                "projection coefficients still above {:e} at radius {}",
                PROJECTION_TAIL, p_radius
            )));
        }
        let edge = probe
            .points()
            .filter(|h| h.iter().any(|x| x.abs() == p_radius))
            .map(|h| term(&h, &mut buf).norm())
            .fold(0.0, f64::max);
        if edge <= PROJECTION_TAIL {
            break;
        }
        p_radius += (radius / 2).max(1);
    }
    let mut p = CoeffMap::zero(rank, p_radius);
    for i in 0..p.len() {
        p.data[i] = term(&p.point(i), &mut buf);
    }
    let alg_a = TwistedAlgebra { lattice: d.clone(), sign: 1.0 };
    let (pp, e4) = alg_a.mul(&p, &p);
    let idempotency = pp.max_diff(&p);
    let self_adjointness = p.adjoint().max_diff(&p);
    let trace = p.get(&vec![0; rank]).re;
    Ok(BocaReport {
        p,
        theta_inv_sqrt: x,
        min_eigenvalue,
        iterations,
        unit_residual,
        idempotency,
        self_adjointness,
        trace,
        dropped_mass: dropped.max(e4),
    })
}

fn symplectic(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

// ---------------------------------------------------------------- bimodule

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    U,
    V,
    LeftU,
    LeftV,
}

/// Right action of `A_theta` and left action of `A_theta'` on `S(R x Z_c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bimodule {
    pub theta: f64,
    pub theta_prime: f64,
    pub g: [[i64; 2]; 2],
    j: f64,
}

impl Bimodule {
    pub fn new(theta: f64, g: [[i64; 2]; 2]) -> Result<Self> {
        if g[1][0] == 0 {
            return Err(Error::InvalidInput("the bimodule needs c != 0".into()));
        }
        let (g, theta_prime, j) = morita_act_f64(g, theta)?;
        Ok(Bimodule { theta, theta_prime, g, j })
    }

    /// Size `|c|` of the finite factor `Z_c`.
    pub fn modulus(&self) -> i64 {
        self.g[1][0].abs()
    }

    fn apply<F: Fn(f64, i64) -> Complex64>(&self, ops: &[Op], f: &F, x: f64, mu: i64) -> Complex64 {
        let Some((last, rest)) = ops.split_last() else {
            return f(x, mu.rem_euclid(self.modulus()));
        };
        let [[a, _], [c, d]] = self.g;
        let cf = c as f64;
        let m = mu.rem_euclid(self.modulus());
        match last {
            Op::U => self.apply(rest, f, x - self.j / cf, m - 1),
            Op::V => {
                let ph = x - (m * d).rem_euclid(c.abs()) as f64 / cf;
                cis(2.0 * PI * ph) * self.apply(rest, f, x, m)
            }
            Op::LeftU => self.apply(rest, f, x - 1.0 / cf, m - a),
            Op::LeftV => cis(2.0 * PI * (x / self.j - m as f64 / cf)) * self.apply(rest, f, x, m),
        }
    }
}

/// Residuals of the defining relations of the bimodule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BimoduleReport {
    pub theta_prime: f64,
    /// `max |f(UV) - e^{2 pi i theta} f(VU)|`.
    pub right_relation: f64,
    /// `|f(UV)/f(VU) - e^{2 pi i theta}|` at the largest sample.
    pub right_phase_error: f64,
    /// Measured `U'V'f / V'U'f`.
    pub left_phase: [f64; 2],
    /// `max |U'V'f - phase V'U'f|`.
    pub left_relation: f64,
    /// `|phase - e^{2 pi i theta'}|`.
    pub left_phase_vs_plus: f64,
    /// `|phase - e^{-2 pi i theta'}|`.
    pub left_phase_vs_minus: f64,
    /// Max over the four left/right pairs of `|L(fR) - (Lf)R|`.
    pub commutation: f64,
}

/// Evaluates the four generators on `f` over `[-half_width, half_width] x Z_c`.
pub fn bimodule_action_residual<F>(
    theta: f64,
    g: [[i64; 2]; 2],
    f: &F,
    half_width: f64,
    points: usize,
) -> Result<BimoduleReport>
where
    F: Fn(f64, i64) -> Complex64,
{
    let m = Bimodule::new(theta, g)?;
    let grid: Vec<(f64, i64)> = (0..points.max(2))
        .flat_map(|k| {
            let x = -half_width + 2.0 * half_width * k as f64 / (points.max(2) - 1) as f64;
            (0..m.modulus()).map(move |mu| (x, mu))
        })
        .collect();
    let e_theta = cis(2.0 * PI * theta);
    let mut right = 0.0f64;
    // phases are measured where the denominators are largest
    let (mut best, mut best_right) = (0.0f64, Complex64::zero());
    let (mut best_den, mut best_left) = (0.0f64, Complex64::zero());
    for &(x, mu) in &grid {
        let uv = m.apply(&[Op::U, Op::V], f, x, mu);
        let vu = m.apply(&[Op::V, Op::U], f, x, mu);
        right = right.max((uv - e_theta * vu).norm());
        if vu.norm() > best {
            best = vu.norm();
            best_right = uv / vu;
        }
        let luv = m.apply(&[Op::LeftV, Op::LeftU], f, x, mu);
        let lvu = m.apply(&[Op::LeftU, Op::LeftV], f, x, mu);
        if lvu.norm() > best_den {
            best_den = lvu.norm();
            best_left = luv / lvu;
        }
    }
    let mut left = 0.0f64;
    let mut commutation = 0.0f64;
    for &(x, mu) in &grid {
        let luv = m.apply(&[Op::LeftV, Op::LeftU], f, x, mu);
        let lvu = m.apply(&[Op::LeftU, Op::LeftV], f, x, mu);
        left = left.max((luv - best_left * lvu).norm());
        for l in [Op::LeftU, Op::LeftV] {
            for r in [Op::U, Op::V] {
                let a = m.apply(&[r, l], f, x, mu);
                let b = m.apply(&[l, r], f, x, mu);
                commutation = commutation.max((a - b).norm());
            }
        }
    }
    let tp = m.theta_prime;
    Ok(BimoduleReport {
        theta_prime: tp,
        right_relation: right,
        right_phase_error: if best > 0.0 { (best_right - e_theta).norm() } else { 0.0 },
        left_phase: [best_left.re, best_left.im],
        left_relation: left,
        left_phase_vs_plus: (best_left - cis(2.0 * PI * tp)).norm(),
        left_phase_vs_minus: (best_left - cis(-2.0 * PI * tp)).norm(),
        commutation,
    })
}

// ---------------------------------------------------------------- Mumford

/// `<U_x f_T, e_Z> e^{-pi i x1 xbar} / theta(xbar, T)` at each sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MumfordReport {
    pub ratios: Vec<[f64; 2]>,
    pub deviation: f64,
}

/// Classical `theta(z, T) = sum exp(pi i n^2 T + 2 pi i n z)` for `N = 1`.
pub fn classical_theta(z: Complex64, t: Complex64) -> Complex64 {
    let cut = theta_cutoff(t, z.im);
    (-cut..=cut)
        .map(|n| {
            let n = n as f64;
            (PI * I * (n * n * t + 2.0 * n * z)).exp()
        })
        .sum()
}

fn theta_cutoff(t: Complex64, shift: f64) -> i64 {
    // pi n^2 Im T - 2 pi |n| |shift| > 40 well past the peak
    let y = t.im;
    ((shift.abs() + (shift * shift + 40.0 * y / PI).sqrt()) / y).ceil() as i64 + 2
}

/// Ratio constancy for the theta matrix coefficient with `N = 1`.
pub fn mumford_theta_check(t: Complex64, xs: &[(f64, f64)]) -> Result<MumfordReport> {
    if t.im <= 0.0 {
        return Err(Error::Domain("Im T must be positive".into()));
    }
    let siegel = SiegelPoint::diagonal(&[t])?;
    let mut ratios = Vec::with_capacity(xs.len());
    for &(x1, x2) in xs {
        let cut = theta_cutoff(t, 0.0) + x1.abs().ceil() as i64;
        let pairing: Complex64 = (-cut..=cut)
            .map(|n| {
                let n = n as f64;
                cis(2.0 * PI * n * x2 + PI * x1 * x2) * siegel.f_t(&[n + x1])
            })
            .sum();
        let xbar = t * x1 + x2;
        let th = classical_theta(xbar, t);
        ratios.push(pairing * (-PI * I * x1 * xbar).exp() / th);
    }
    let first = ratios.first().copied().unwrap_or_default();
    let deviation = ratios.iter().map(|r| (r - first).norm()).fold(0.0, f64::max);
    Ok(MumfordReport { ratios: ratios.iter().map(|r| [r.re, r.im]).collect(), deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> f64 {
        2f64.sqrt() - 1.0
    }

    fn ti() -> SiegelPoint {
        SiegelPoint::diagonal(&[I]).unwrap()
    }

    #[test]
    fn morita_examples() {
        let r2 = QuadElem::sqrt_d(2);
        let m = morita_act(&Mat2::new(1, 1, 0, 1), &r2).unwrap();
        assert_eq!(m.target, QuadElem::from_ints(1, 1, 2));
        assert_eq!(m.j, QuadElem::one(2));
        let m = morita_act(&Mat2::new(0, 1, 1, 0), &r2).unwrap();
        assert_eq!(m.target, QuadElem::from_frac(0, 1, 2, 2));
        assert_eq!(m.j, r2);
        let m = morita_act(&Mat2::new(0, -1, -1, 0), &r2).unwrap();
        assert_eq!(m.g, Mat2::new(0, 1, 1, 0));
    }

    #[test]
    fn dual_of_rotation_lattice() {
        let d = EmbeddedLattice::rotation(theta()).unwrap();
        let dd = d.dual().unwrap();
        let expect = EmbeddedLattice::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / theta()])).unwrap();
        assert!(dd.same_lattice(&expect, 1e-9));
        assert!((d.covolume() * dd.covolume() - 1.0).abs() < 1e-14);
        assert!(dd.dual().unwrap().same_lattice(&d, 1e-9));
        let z = EmbeddedLattice::new(DMatrix::identity(2, 2)).unwrap();
        assert!(z.dual().unwrap().same_lattice(&z, 1e-12));
    }

    #[test]
    fn theta_coefficients_match_expanded_formula() {
        let d = EmbeddedLattice::rotation(theta()).unwrap();
        let s = qtheta_coeffs(&d, &ti(), 3).unwrap();
        assert!((s.coeffs.get(&[0, 0]).re - 0.5f64.sqrt()).abs() < 1e-15);
        for h in s.coeffs.points() {
            let (m1, m2) = (h[0] as f64, h[1] as f64);
            let e = 0.5f64.sqrt() * (-0.5 * PI * (theta() * theta() * m1 * m1 + m2 * m2)).exp();
            assert!((s.coeffs.get(&h).re - e).abs() < 1e-15);
        }
        let t2 = SiegelPoint::diagonal(&[I, I * 2.0]).unwrap();
        assert!((t2.normalization() - 8f64.sqrt().recip()).abs() < 1e-15);
    }

    #[test]
    fn closed_inner_matches_quadrature() {
        let d = EmbeddedLattice::rotation(theta()).unwrap();
        let t = SiegelPoint::diagonal(&[Complex64::new(0.3, 1.1)]).unwrap();
        for h in [[0, 0], [1, 0], [2, -1], [-3, 2]] {
            let r = heisenberg_inner(&d, &t, &h).unwrap();
            assert!(r.residual() < 1e-10, "h = {:?}: {:e}", h, r.residual());
            assert!((r.closed[0] - t.gaussian_inner(&d.point(&h))).abs() < 1e-14);
            assert!(r.closed[1].abs() < 1e-14);
        }
        assert!(lambda_h(&t, &d.point(&[0, 0])).norm() == 0.0);
    }

    #[test]
    fn functional_equation_needs_corrected_multiplier() {
        let d = EmbeddedLattice::rotation(theta()).unwrap();
        let s = qtheta_coeffs(&d, &ti(), 8).unwrap();
        assert_eq!(qtheta_fe_residual(&s, &[0, 0], Multiplier::Printed).unwrap(), 0.0);
        assert!(qtheta_fe_residual(&s, &[1, 0], Multiplier::Corrected).unwrap() < 1e-15);
        assert!(qtheta_fe_residual(&s, &[1, 0], Multiplier::Printed).unwrap() > 1e-3);
        let sd = qtheta_dual_coeffs(&d, &ti(), 8).unwrap();
        assert!(qtheta_fe_residual(&sd, &[1, -1], Multiplier::Corrected).unwrap() < 1e-15);
    }

    #[test]
    fn gaussian_inner_against_closed_theta_coefficient() {
        let t = SiegelPoint::diagonal(&[Complex64::new(0.4, 0.9)]).unwrap();
        let f = Gaussian::standard(&t);
        let y = DVector::from_vec(vec![0.7, -0.2]);
        let v = f.inner(&f.translate(&y));
        assert!((v - t.gaussian_inner(&y)).norm() < 1e-14);
    }

    #[test]
    fn rieffel_first_identity_is_conjugate_flip() {
        let d = EmbeddedLattice::rotation(theta()).unwrap();
        let t = SiegelPoint::diagonal(&[I / theta()]).unwrap();
        let phi = Gaussian::standard(&t);
        let psi = phi.translate(&DVector::from_vec(vec![0.3, 0.1]));
        let ab = rieffel_products(&phi, &psi, &d, 6).unwrap().series_a;
        let ba = rieffel_products(&psi, &phi, &d, 6).unwrap().series_a;
        assert!(ab.adjoint().max_diff(&ba) < 1e-14);
    }

    #[test]
    fn bimodule_zero_function() {
        let r = bimodule_action_residual(theta(), [[0, 1], [1, -1]], &|_, _| Complex64::zero(), 5.0, 16).unwrap();
        assert_eq!(r.right_relation, 0.0);
        assert_eq!(r.commutation, 0.0);
    }

    #[test]
    fn mumford_at_origin_is_theta_constant() {
        let r = mumford_theta_check(I, &[(0.0, 0.0), (0.3, -0.2)]).unwrap();
        assert!((r.ratios[0][0] - 1.0).abs() < 1e-14 && r.ratios[0][1].abs() < 1e-14);
        assert!(r.deviation < 1e-12);
    }
}
