//! Command-line front end.
//!
//! Every command prints one document
//! `{command, config, result, metadata: {truncation, iterations, residuals}}`.
//! Exact values are strings in `"a b d /q"` form; floats are shortest
//! round-trip decimals unless `RMLAB_PRECISION` asks for fewer digits.

use std::f64::consts::PI;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::acceptance;
use crate::error::{Error, Result};
use crate::pseudolattice::{
    cf_expand, delta, dual_pseudolattice, endomorphism_ring, normal_form, stabilizer_matrix, Mat2, Pseudolattice,
};
use crate::qexp::{asymptotic_ratio, dilog_asymptotic, pentagon_check, rogers_numeric, AsymptoticForm, QSeriesParams};
use crate::qtorus::{
    bimodule_action_residual, boca_projection, morita_act, morita_compose, qtheta_coeffs, qtheta_dual_coeffs,
    qtheta_fe_residual, EmbeddedLattice, Multiplier, QuantumThetaSeries, SiegelPoint,
};
use crate::quadfield::{fundamental_unit, QuadElem};
use crate::rmtheta::{
    self, fe_rm_residual, hecke_average, lattice_fe_residual, theta_lattice, theta_rm, unit_group_for,
    LatticeThetaSpec, ThetaSpec,
};
use crate::starkzeta::{
    self, algebraicity_probe, stark_conditions_check, stark_number, zeta_direct, zeta_mellin_split, StarkInput,
    DEFAULT_PROBE_CAP, DEFAULT_SPLIT,
};

pub const PRECISION_VAR: &str = "RMLAB_PRECISION";

#[derive(Debug, Parser)]
#[command(name = "rmlab", version, about = "Real multiplication laboratory")]
pub struct Cli {
    /// Target absolute tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Truncation override (Nbound, radius or q-degree, per command).
    #[arg(long, global = true)]
    pub trunc: Option<f64>,
    /// JSON output (default).
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Flat `key = value` output.
    #[arg(long, global = true)]
    pub table: bool,
    /// Seed for the randomized parts of `selftest`.
    #[arg(long, global = true, default_value_t = acceptance::DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct RmArgs {
    /// Pseudolattice `"basis=(a1 b1, a2 b2) d=D"`; defaults to the Q(sqrt 3), L = 5 O_K example.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Shift `l0` as `"a b d [/q]"`.
    #[arg(long)]
    pub l0: Option<String>,
    /// Character `m0` as `"a b d [/q]"`.
    #[arg(long)]
    pub m0: Option<String>,
    /// `eta` as `re,im`.
    #[arg(long, value_parser = parse_complex)]
    pub eta: Option<Complex64>,
}

#[derive(Debug, Args, Clone)]
pub struct TorusArgs {
    /// Rotation number of `D = diag(theta, 1) Z^2`.
    #[arg(long, default_value_t = acceptance::rotation_theta())]
    pub theta: f64,
    /// Siegel point `T` (N = 1) as `re,im`.
    #[arg(long = "T", value_parser = parse_complex, default_value = "0,1")]
    pub t: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mu {
    Q,
    #[value(name = "1")]
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Printed,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MoritaAction {
    Act,
    Compose,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continued fraction of a quadratic irrational.
    Reduce {
        #[arg(long)]
        theta: String,
    },
    /// Fundamental unit of Q(sqrt d).
    Unit {
        #[arg(short, long)]
        d: i64,
    },
    /// Dual pseudolattice `L^?`.
    Dual {
        /// Pseudolattice `"basis=(a1 b1, a2 b2) d=D"`.
        #[arg(long)]
        lattice: String,
    },
    /// Covolume, conductor and normal form of a pseudolattice.
    Delta {
        /// Pseudolattice `"basis=(a1 b1, a2 b2) d=D"`.
        #[arg(long)]
        lattice: String,
    },
    /// Stabiliser of a quadratic irrational in GL(2, Z).
    Stab {
        #[arg(long)]
        theta: String,
    },
    /// RM theta `Theta^U(v)`.
    ThetaRm {
        #[command(flatten)]
        rm: RmArgs,
        #[arg(long, value_parser = parse_complex, default_value = "0,1")]
        v: Complex64,
    },
    /// Classical lattice theta of the Hecke lift at time `t`.
    ThetaLattice {
        #[command(flatten)]
        rm: RmArgs,
        #[arg(long, value_parser = parse_complex, default_value = "0,1")]
        v: Complex64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Hecke average of lattice thetas against the RM theta.
    HeckeAvg {
        #[command(flatten)]
        rm: RmArgs,
        #[arg(long, value_parser = parse_complex, default_value = "0,1")]
        v: Complex64,
    },
    /// Functional equation residual (RM theta, or the lifted lattice theta with `--lift`).
    FeCheck {
        #[command(flatten)]
        rm: RmArgs,
        #[arg(long, value_parser = parse_complex, default_value = "0,1")]
        v: Complex64,
        /// Check the lattice theta lifted to time `t` instead.
        #[arg(long)]
        lift: Option<f64>,
    },
    /// Partial zeta function.
    Zeta {
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        l0: Option<String>,
        #[arg(long, value_parser = parse_complex, default_value = "2,0")]
        s: Complex64,
        #[arg(long, conflicts_with = "mellin")]
        direct: bool,
        #[arg(long)]
        mellin: bool,
        #[arg(long, default_value_t = DEFAULT_SPLIT)]
        split: f64,
    },
    /// Stark number `S0 = exp(zeta'(0))`.
    Stark {
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        l0: Option<String>,
    },
    /// Search for a monic integer polynomial vanishing at `x` (exploratory).
    Probe {
        /// Defaults to the Stark number of the worked example.
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 4)]
        deg: usize,
        #[arg(long, default_value_t = 10)]
        height: i64,
        #[arg(long, default_value_t = DEFAULT_PROBE_CAP)]
        cap: u64,
    },
    /// Quantum theta coefficients on the rotation lattice.
    Qtheta {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 3)]
        radius: i64,
        #[arg(long)]
        dual: bool,
    },
    /// Per-coefficient functional equation residual of the quantum theta.
    QthetaFe {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 8)]
        radius: i64,
        #[arg(long, value_parser = parse_ints::<2>, default_value = "1,0")]
        g: [i64; 2],
        #[arg(long, value_enum, default_value_t = FormArg::Corrected)]
        multiplier: FormArg,
        #[arg(long)]
        dual: bool,
    },
    /// Boca projection in the twisted convolution algebra.
    BocaProj {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 10)]
        radius: i64,
        #[arg(long, default_value_t = 1e-15)]
        newton_tol: f64,
        /// Include the coefficients of `p` above `--tol`.
        #[arg(long)]
        dump: bool,
    },
    /// Relations of the Morita bimodule on a sampled Gaussian.
    BimoduleCheck {
        #[arg(long, default_value_t = acceptance::rotation_theta())]
        theta: f64,
        #[arg(long, value_parser = parse_ints::<4>, default_value = "0,1,1,-1", allow_hyphen_values = true)]
        g: [i64; 4],
        #[arg(long, default_value_t = 5.0)]
        width: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Morita action `theta' = g theta` and composition cocycles.
    Morita {
        #[arg(value_enum, default_value_t = MoritaAction::Act)]
        action: MoritaAction,
        #[arg(long, value_parser = parse_ints::<4>, allow_hyphen_values = true)]
        g: [i64; 4],
        #[arg(long, value_parser = parse_ints::<4>, allow_hyphen_values = true)]
        h: Option<[i64; 4]>,
        #[arg(long)]
        theta: String,
    },
    /// Pentagon identity for the q-exponential.
    Pentagon {
        #[arg(long, default_value_t = 4)]
        ndeg: u32,
        #[arg(long, default_value_t = 20)]
        qdeg: u32,
        #[arg(long, value_enum, default_value_t = Mu::Q)]
        mu: Mu,
    },
    /// Five-term identity of the Rogers dilogarithm.
    Rogers {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// Remainder of the small-`y` asymptotic of `log e_q(t)`.
    DilogAsym {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Printed)]
        form: FormArg,
    },
    /// Acceptance suite; exits 0 iff every criterion passes.
    Selftest {
        #[arg(long)]
        criterion: Option<u32>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Reduce { .. } => "reduce",
            Command::Unit { .. } => "unit",
            Command::Dual { .. } => "dual",
            Command::Delta { .. } => "delta",
            Command::Stab { .. } => "stab",
            Command::ThetaRm { .. } => "theta-rm",
            Command::ThetaLattice { .. } => "theta-lattice",
            Command::HeckeAvg { .. } => "hecke-avg",
            Command::FeCheck { .. } => "fe-check",
            Command::Zeta { .. } => "zeta",
            Command::Stark { .. } => "stark",
            Command::Probe { .. } => "probe",
            Command::Qtheta { .. } => "qtheta",
            Command::QthetaFe { .. } => "qtheta-fe",
            Command::BocaProj { .. } => "boca-proj",
            Command::BimoduleCheck { .. } => "bimodule-check",
            Command::Morita { .. } => "morita",
            Command::Pentagon { .. } => "pentagon",
            Command::Rogers { .. } => "rogers",
            Command::DilogAsym { .. } => "dilog-asym",
            Command::Selftest { .. } => "selftest",
        }
    }
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number {:?} in {:?}", t, s));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {:?}", s)),
    }
}

pub fn parse_ints<const K: usize>(s: &str) -> std::result::Result<[i64; K], String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad integer {:?} in {:?}", t, s)))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected {} comma separated integers, got {:?}", K, s))
}

/// Significant digits requested through `RMLAB_PRECISION`, if any.
pub fn precision_from_env() -> Result<Option<usize>> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(p) if (1..=17).contains(&p) => Ok(Some(p)),
            _ => Err(Error::InvalidInput(format!("{} must be an integer in 1..=17, got {:?}", PRECISION_VAR, s))),
        },
    }
}

/// Result payload plus the metadata block.
#[derive(Debug, Default)]
pub struct Report {
    pub result: Value,
    pub truncation: Value,
    pub iterations: Value,
    pub residuals: Value,
    /// `false` when the command ran but its check did not hold (selftest).
    pub failed: bool,
}

impl Report {
    fn new(result: Value) -> Self {
        Report { result, ..Default::default() }
    }

    fn truncation(mut self, v: Value) -> Self {
        self.truncation = v;
        self
    }

    fn iterations(mut self, v: Value) -> Self {
        self.iterations = v;
        self
    }

    fn residuals(mut self, v: Value) -> Self {
        self.residuals = v;
        self
    }
}

fn c2(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn elem(text: &str) -> Result<QuadElem> {
    QuadElem::parse(text)
}

fn rm_spec(args: &RmArgs) -> Result<ThetaSpec> {
    let Some(lattice) = &args.lattice else {
        if args.l0.is_some() || args.m0.is_some() {
            return Err(Error::InvalidInput("--l0 and --m0 need --lattice".into()));
        }
        let mut spec = rmtheta::worked_example();
        if let Some(eta) = args.eta {
            spec.eta = eta;
        }
        return Ok(spec);
    };
    let l = Pseudolattice::parse(lattice)?;
    let l0 = args.l0.as_deref().map(elem).transpose()?.unwrap_or_else(|| QuadElem::zero(l.d));
    let m0 = args.m0.as_deref().map(elem).transpose()?.unwrap_or_else(|| QuadElem::zero(l.d));
    let eps = unit_group_for(&l, &l0, &m0)?;
    ThetaSpec::new(l, l0, m0, args.eta.unwrap_or(Complex64::new(1.0, 0.0)), eps)
}

fn stark_input(lattice: &Option<String>, l0: &Option<String>) -> Result<StarkInput> {
    match (lattice, l0) {
        (None, None) => Ok(starkzeta::worked_example()),
        (Some(l), l0) => {
            let l = Pseudolattice::parse(l)?;
            let l0 = l0.as_deref().map(elem).transpose()?.unwrap_or_else(|| QuadElem::one(l.d));
            stark_conditions_check(&l, &l0)
        }
        (None, Some(_)) => Err(Error::InvalidInput("--l0 needs --lattice".into())),
    }
}

fn spec_json(spec: &ThetaSpec) -> Value {
    json!({
        "lattice": spec.lattice.to_text(),
        "l0": spec.l0.to_text(),
        "m0": spec.m0.to_text(),
        "eta": c2(spec.eta),
        "unit": spec.eps.to_text(),
    })
}

fn mat(g: [i64; 4]) -> Mat2 {
    Mat2::new(g[0], g[1], g[2], g[3])
}

fn torus(args: &TorusArgs) -> Result<(EmbeddedLattice, SiegelPoint)> {
    if !(args.theta > 0.0) {
        return Err(Error::InvalidInput("--theta must be positive".into()));
    }
    Ok((EmbeddedLattice::rotation(args.theta)?, SiegelPoint::diagonal(&[args.t])?))
}

fn series(args: &TorusArgs, radius: i64, dual: bool) -> Result<QuantumThetaSeries> {
    if radius < 0 {
        return Err(Error::InvalidInput("--radius must be non-negative".into()));
    }
    let (d, t) = torus(args)?;
    if dual {
        qtheta_dual_coeffs(&d, &t, radius)
    } else {
        qtheta_coeffs(&d, &t, radius)
    }
}

/// Default `Nbound` for direct zeta sums.
fn direct_nbound(s: f64) -> f64 {
    if s < 1.75 {
        4e6
    } else {
        1e6
    }
}

fn form(f: FormArg) -> AsymptoticForm {
    match f {
        FormArg::Printed => AsymptoticForm::Printed,
        FormArg::Corrected => AsymptoticForm::Corrected,
    }
}

/// Runs one command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("--tol must be positive".into()));
    }
    Ok(match &cli.command {
        Command::Reduce { theta } => {
            let x = elem(theta)?;
            let e = cf_expand(&x, 0)?;
            let strs = |v: &[num_bigint::BigInt]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
            Report::new(json!({
                "theta": x.to_text(),
                "pretty": x.pretty(),
                "cf": e.notation(),
                "preperiod": strs(&e.preperiod),
                "period": strs(&e.period),
            }))
            .iterations(json!(e.terms.len()))
        }
        Command::Unit { d } => {
            let u = fundamental_unit(*d)?;
            Report::new(json!({
                "unit": u.unit.pretty(),
                "norm": u.norm,
                "totally_positive": u.totally_positive.pretty(),
                "exact": {"unit": u.unit.to_text(), "totally_positive": u.totally_positive.to_text()},
            }))
        }
        Command::Dual { lattice } => {
            let l = Pseudolattice::parse(lattice)?;
            let m = dual_pseudolattice(&l);
            let (dl, dm) = (delta(&l), delta(&m));
            Report::new(json!({
                "lattice": l.to_text(),
                "dual": m.to_text(),
                "delta": dl.to_text(),
                "delta_dual": dm.to_text(),
                "delta_product": (&dl * &dm).to_text(),
            }))
        }
        Command::Delta { lattice } => {
            let l = Pseudolattice::parse(lattice)?;
            let (red, g) = normal_form(&l);
            Report::new(json!({
                "lattice": l.to_text(),
                "delta": delta(&l).to_text(),
                "delta_pretty": delta(&l).pretty(),
                "conductor": endomorphism_ring(&l).f,
                "orientation": l.orientation,
                "theta": l.theta().to_text(),
                "normal_form": red.to_text(),
                "translation": g.to_array(),
            }))
        }
        Command::Stab { theta } => {
            let x = elem(theta)?;
            let s = stabilizer_matrix(&x)?;
            Report::new(json!({
                "theta": x.to_text(),
                "g": s.g.to_array(),
                "eigenvalue": s.eps.to_text(),
                "eigenvalue_pretty": s.eps.pretty(),
                "g_sl2": s.g_sl2.to_array(),
                "eigenvalue_sl2": s.eps_sl2.to_text(),
            }))
        }
        Command::ThetaRm { rm, v } => {
            let spec = rm_spec(rm)?;
            let r = theta_rm(&spec, *v, tol)?;
            Report::new(json!({"spec": spec_json(&spec), "v": c2(*v), "value": c2(r.value)}))
                .truncation(json!({"nbound": r.nbound, "terms": r.terms}))
        }
        Command::ThetaLattice { rm, v, t } => {
            let spec = rm_spec(rm)?;
            let ls = LatticeThetaSpec::from_lift(&spec.lattice, &spec.l0, &spec.m0, spec.eta, *t);
            let r = theta_lattice(&ls, *v, tol)?;
            Report::new(json!({
                "spec": spec_json(&spec),
                "t": t,
                "basis": [c2(ls.basis[0]), c2(ls.basis[1])],
                "v": c2(*v),
                "value": c2(r.value),
            }))
            .truncation(json!({"radius": r.nbound, "terms": r.terms}))
        }
        Command::HeckeAvg { rm, v } => {
            let spec = rm_spec(rm)?;
            let (avg, evals) = hecke_average(&spec, *v, tol.max(1e-13))?;
            let direct = theta_rm(&spec, *v, tol)?;
            let gap = (avg - direct.value).norm();
            Report::new(json!({
                "spec": spec_json(&spec),
                "v": c2(*v),
                "average": c2(avg),
                "theta_rm": c2(direct.value),
            }))
            .truncation(json!({"nbound": direct.nbound}))
            .iterations(json!({"integrand_evaluations": evals}))
            .residuals(json!({"difference": gap}))
        }
        Command::FeCheck { rm, v, lift } => {
            let spec = rm_spec(rm)?;
            let r = match lift {
                Some(t) => lattice_fe_residual(&spec.lattice, &spec.l0, &spec.m0, spec.eta, *t, *v, tol)?,
                None => fe_rm_residual(&spec, *v, tol)?,
            };
            Report::new(json!({
                "spec": spec_json(&spec),
                "v": c2(*v),
                "lift": lift,
                "lhs": c2(r.lhs),
                "rhs": c2(r.rhs),
            }))
            .residuals(json!({"functional_equation": r.residual}))
        }
        Command::Zeta { lattice, l0, s, direct, mellin: _, split } => {
            let input = stark_input(lattice, l0)?;
            let z = if *direct {
                zeta_direct(&input, *s, cli.trunc.unwrap_or_else(|| direct_nbound(s.re)))?
            } else {
                zeta_mellin_split(&input, *s, tol, *split)?
            };
            Report::new(json!({"diagnostics": input.diagnostics, "zeta": z}))
                .truncation(json!(z.truncation))
                .iterations(json!({"terms": z.terms, "evaluations": z.evaluations}))
        }
        Command::Stark { lattice, l0 } => {
            let input = stark_input(lattice, l0)?;
            let s = stark_number(&input, tol)?;
            Report::new(json!({"diagnostics": input.diagnostics, "stark": s}))
        }
        Command::Probe { x, deg, height, cap } => {
            let x = match x {
                Some(x) => *x,
                None => stark_number(&starkzeta::worked_example(), tol)?.s0,
            };
            let r = algebraicity_probe(x, *deg, *height, tol.max(1e-12), *cap)?;
            let poly = r.polynomial.as_ref().map(|p| p.to_string());
            Report::new(json!({"x": x, "polynomial": poly, "coefficients": r.polynomial}))
                .iterations(json!({"candidates": r.candidates}))
                .residuals(json!({"value": r.residual}))
        }
        Command::Qtheta { torus: ta, radius, dual } => {
            let radius = cli.trunc.map(|r| r as i64).unwrap_or(*radius);
            let s = series(ta, radius, *dual)?;
            let mut coeffs = Map::new();
            for (h, c) in s.coeffs.points().zip(&s.coeffs.data) {
                coeffs.insert(format!("{:?}", h), c2(*c));
            }
            Report::new(json!({
                "theta": ta.theta,
                "T": c2(ta.t),
                "side": if *dual { "dual" } else { "primal" },
                "normalization": s.siegel.normalization(),
                "coefficients": coeffs,
            }))
            .truncation(json!({"radius": radius}))
        }
        Command::QthetaFe { torus: ta, radius, g, multiplier, dual } => {
            let s = series(ta, *radius, *dual)?;
            let m = match multiplier {
                FormArg::Printed => Multiplier::Printed,
                FormArg::Corrected => Multiplier::Corrected,
            };
            let r = qtheta_fe_residual(&s, g, m)?;
            Report::new(
                json!({"theta": ta.theta, "T": c2(ta.t), "g": g, "multiplier": format!("{:?}", m).to_lowercase()}),
            )
            .truncation(json!({"radius": radius}))
            .residuals(json!({"functional_equation": r}))
        }
        Command::BocaProj { torus: ta, radius, newton_tol, dump } => {
            let (d, t) = torus(ta)?;
            let r = boca_projection(&d, &t, *radius, *newton_tol)?;
            let mut result = json!({
                "theta": ta.theta,
                "T": c2(ta.t),
                "trace": r.trace,
                "min_eigenvalue": r.min_eigenvalue,
                "positivity": "heuristic: smallest eigenvalue of the truncated regular representation",
            });
            if *dump {
                let mut coeffs = Map::new();
                for (h, c) in r.p.points().zip(&r.p.data) {
                    if c.norm() > tol {
                        coeffs.insert(format!("{:?}", h), c2(*c));
                    }
                }
                result["p"] = Value::Object(coeffs);
            }
            Report::new(result)
                .truncation(json!({"radius": radius, "p_radius": r.p.radius, "dropped_mass": r.dropped_mass}))
                .iterations(json!({"newton": r.iterations}))
                .residuals(json!({
                    "idempotency": r.idempotency,
                    "self_adjointness": r.self_adjointness,
                    "newton_unit": r.unit_residual,
                }))
        }
        Command::BimoduleCheck { theta, g, width, points } => {
            let f = |x: f64, mu: i64| Complex64::from_polar((-0.5 * x * x).exp() * (1.0 + mu as f64), 0.3 * x);
            let r = bimodule_action_residual(*theta, [[g[0], g[1]], [g[2], g[3]]], &f, *width, *points)?;
            Report::new(json!({
                "theta": theta,
                "g": g,
                "theta_prime": r.theta_prime,
                "right_phase": c2(Complex64::from_polar(1.0, 2.0 * PI * theta)),
                "left_phase": r.left_phase,
            }))
            .residuals(json!({
                "right_relation": r.right_relation,
                "right_phase_error": r.right_phase_error,
                "left_relation": r.left_relation,
                "left_phase_vs_plus": r.left_phase_vs_plus,
                "left_phase_vs_minus": r.left_phase_vs_minus,
                "commutation": r.commutation,
            }))
        }
        Command::Morita { action, g, h, theta } => {
            let x = elem(theta)?;
            match action {
                MoritaAction::Act => {
                    if h.is_some() {
                        return Err(Error::InvalidInput("--h is only used by `morita compose`".into()));
                    }
                    let m = morita_act(&mat(*g), &x)?;
                    Report::new(json!({
                        "g": m.g.to_array(),
                        "source": m.source.to_text(),
                        "target": m.target.to_text(),
                        "j": m.j.to_text(),
                    }))
                }
                MoritaAction::Compose => {
                    let h = h.ok_or_else(|| Error::InvalidInput("`morita compose` needs --h".into()))?;
                    let c = morita_compose(&mat(*g), &mat(h), &x)?;
                    Report::new(json!({
                        "product": c.product.to_array(),
                        "target": c.target.to_text(),
                        "j_product": c.j_product.to_text(),
                        "j_outer": c.j_outer.to_text(),
                        "j_inner": c.j_inner.to_text(),
                        "exact": c.exact,
                    }))
                }
            }
        }
        Command::Pentagon { ndeg, qdeg, mu } => {
            let qdeg = cli.trunc.map(|q| q as u32).unwrap_or(*qdeg);
            let mu_exp = match mu {
                Mu::Q => 1,
                Mu::One => 0,
            };
            let r = pentagon_check(&QSeriesParams::new(*ndeg, qdeg, mu_exp)?)?;
            Report::new(json!({
                "mu": if mu_exp == 1 { "q" } else { "1" },
                "residual": r.residual.to_string(),
                "nonzero_terms": r.nonzero_terms,
                "max_coefficient": r.max_coefficient.to_string(),
            }))
            .truncation(json!({"ndeg": ndeg, "qdeg": qdeg}))
        }
        Command::Rogers { x, y } => {
            Report::new(json!({"x": x, "y": y})).residuals(json!({"five_term": rogers_numeric(*x, *y)?}))
        }
        Command::DilogAsym { t, y, form: f } => {
            let r = dilog_asymptotic(*t, *y, form(*f))?;
            let ratio = asymptotic_ratio(*t, *y, form(*f))?;
            Report::new(json!({"t": t, "y": y, "form": format!("{:?}", f).to_lowercase(), "ratio_y_over_2y": ratio}))
                .residuals(json!({"remainder": r}))
        }
        Command::Selftest { criterion } => {
            let list = match criterion {
                Some(id) if (1..=15).contains(id) => vec![acceptance::run(*id, cli.seed)],
                Some(id) => return Err(Error::InvalidInput(format!("criterion must be in 1..=15, got {}", id))),
                None => acceptance::run_all(cli.seed),
            };
            let all = list.iter().all(|c| c.pass);
            let mut rep = Report::new(json!({"criteria": list, "all_pass": all}));
            rep.failed = !all;
            rep
        }
    })
}

fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if let Ok(r) = format!("{:.*e}", digits - 1, x).parse::<f64>() {
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{}.{}", prefix, k) };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{}[{}]", prefix, i), x, out);
            }
        }
        _ => out.push(format!("{} = {}", prefix, v)),
    }
}

/// Document printed for `cli`, or the error document; returns the exit code.
pub fn render(cli: &Cli, precision: Option<usize>, outcome: &Result<Report>) -> (String, i32) {
    let config = json!({
        "tol": cli.tol,
        "trunc": cli.trunc,
        "format": if cli.table { "table" } else { "json" },
        "seed": cli.seed,
        "precision": precision.map(|p| format!("{} significant digits", p)).unwrap_or_else(|| "f64 shortest round-trip".into()),
    });
    let (mut doc, code) = match outcome {
        Ok(r) => (
            json!({
                "command": cli.command.name(),
                "config": config,
                "result": r.result,
                "metadata": {"truncation": r.truncation, "iterations": r.iterations, "residuals": r.residuals},
            }),
            i32::from(r.failed),
        ),
        Err(e) => (
            json!({
                "command": cli.command.name(),
                "config": config,
                "error": {"kind": if e.is_input_error() { "input" } else { "numeric" }, "message": e.to_string()},
            }),
            if e.is_input_error() { 2 } else { 1 },
        ),
    };
    if let Some(p) = precision {
        round_floats(&mut doc, p);
    }
    let text = if cli.table {
        if let (Some(list), true) = (doc["result"]["criteria"].as_array(), cli.command.name() == "selftest") {
            list.iter()
                .filter_map(|c| serde_json::from_value::<SelftestLine>(c.clone()).ok())
                .map(|c| c.line())
                .collect::<Vec<_>>()
                .join("\n")
        } else {
            let mut lines = Vec::new();
            flatten("", &doc, &mut lines);
            lines.join("\n")
        }
    } else {
        serde_json::to_string_pretty(&doc).expect("serializable")
    };
    (text, code)
}

#[derive(serde::Deserialize)]
struct SelftestLine {
    id: u32,
    name: String,
    pass: bool,
    detail: String,
}

impl SelftestLine {
    fn line(&self) -> String {
        format!("[{}] {:>2} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

/// Entry point of the `rmlab` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let precision = match precision_from_env() {
        Ok(p) => p,
        Err(e) => {
            let (text, code) = render(&cli, None, &Err(e));
            emit(&text);
            return code;
        }
    };
    let outcome = execute(&cli);
    if let Err(e) = &outcome {
        eprintln!("rmlab {}: {}", cli.command.name(), e);
    }
    let (text, code) = render(&cli, precision, &outcome);
    emit(&text);
    code
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{}", text);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (Value, i32) {
        let cli = Cli::try_parse_from(args).unwrap();
        let (text, code) = render(&cli, None, &execute(&cli));
        (serde_json::from_str(&text).unwrap(), code)
    }

    #[test]
    fn unit_of_five() {
        let (doc, code) = run(&["rmlab", "unit", "-d", "5"]);
        assert_eq!(code, 0);
        assert_eq!(doc["result"]["unit"], "(1+√5)/2");
        assert_eq!(doc["result"]["norm"], -1);
        assert_eq!(doc["result"]["totally_positive"], "(3+√5)/2");
    }

    #[test]
    fn golden_ratio_reduction() {
        let (doc, _) = run(&["rmlab", "reduce", "--theta", "1 1 5 /2"]);
        assert_eq!(doc["result"]["cf"], "[1; (1)]");
        assert_eq!(doc["result"]["period"], json!(["1"]));
    }

    #[test]
    fn pentagon_with_mu_q() {
        let (doc, _) = run(&["rmlab", "pentagon", "--ndeg", "4", "--mu", "q"]);
        assert_eq!(doc["result"]["residual"], "0");
    }

    #[test]
    fn input_errors_exit_two() {
        let (doc, code) = run(&["rmlab", "unit", "-d", "4"]);
        assert_eq!(code, 2);
        assert_eq!(doc["error"]["kind"], "input");
    }

    #[test]
    fn complex_and_int_parsers() {
        assert_eq!(parse_complex("0.2,0.7").unwrap(), Complex64::new(0.2, 0.7));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("a,b").is_err());
        assert_eq!(parse_ints::<4>("0,1,1,-1").unwrap(), [0, 1, 1, -1]);
        assert!(parse_ints::<2>("1,2,3").is_err());
    }

    #[test]
    fn rounding_keeps_integers() {
        let mut v = json!({"a": 1.23456789, "b": 7, "c": [0.1 + 0.2]});
        round_floats(&mut v, 3);
        assert_eq!(v, json!({"a": 1.23, "b": 7, "c": [0.3]}));
    }
}
