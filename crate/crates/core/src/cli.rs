//! The `uncertainty` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 no closed form known,
//! 3 solver failure, 4 verification failure. Option values are taken from
//! flags first, then from a flat `key = value` file given by `--config`,
//! then from built-in defaults.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::certificates::{verify_certificate, Certificate, Contract, VerifyOptions};
use crate::constants::{
    alpha0, closed_form_constant, cross_check, lambda_beta, lambda_residual, positive_fourier_constant,
    signed_ratio_demo, Source,
};
use crate::error::Error;
use crate::lp::{self, LpInstance, LpStatus, PivotRule};
use crate::positivity::{check_g_beta1, check_g_general, check_tan_bounds};
use crate::radial::{Exemplar, RadialMeasure, Triple};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const UNKNOWN: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const VERIFY: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(
    name = "uncertainty",
    version,
    about = "Sharp constants and extremizers for radial Fourier uncertainty principles"
)]
pub struct Cli {
    /// Flat `key = value` file supplying option defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the report bundle (solve) or a copy of stdout.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form constant, extremizer and cross-check.
    Constant(TripleArgs),
    /// Critical frequency lambda_beta.
    Lambda {
        /// One or more comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
    },
    /// Solve the discretized primal problem.
    Solve(SolveArgs),
    /// Check a certificate against a measure.
    Verify(VerifyArgs),
    /// Certify the trigonometric and G-function inequalities.
    Trig {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Dump `t, mu^(t), |mu^(t)| t^beta` on a grid as CSV.
    Fourier(FourierArgs),
    /// Median ratio of random-sign lacunary sums.
    DemoSigned(DemoArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TripleArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub dim: Option<u32>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub triple: TripleArgs,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub n_radii: Option<usize>,
    #[arg(long)]
    pub initial_freqs: Option<usize>,
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub max_cut_rounds: Option<usize>,
    #[arg(long)]
    pub violation_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub pivot_rule: Option<PivotArg>,
    /// Add the constraint `mu^ >= 0`.
    #[arg(long)]
    pub positive_fourier: bool,
    /// Start from a saved instance instead of building one.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PivotArg {
    Dantzig,
    Bland,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub measure: PathBuf,
    /// Defaults to the certificate's exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Treat negative terms as multipliers of `mu^ >= 0`.
    #[arg(long)]
    pub positive_fourier: bool,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    #[arg(long, conflicts_with = "exemplar")]
    pub measure: Option<PathBuf>,
    /// box, triangle, inverse-radius-3d or unit-sphere-3d.
    #[arg(long)]
    pub exemplar: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

/// Result of one command: exit code plus text for stdout.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: exit::OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg.into() }
    }
}

/// Parses `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>, String> {
    let mut out = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

struct Resolver {
    config: HashMap<String, String>,
}

impl Resolver {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: Option<T>) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(s) = self.config.get(key) {
            return s.parse().map_err(|_| format!("config value for {key} is not valid: {s:?}"));
        }
        default.ok_or_else(|| format!("missing required option --{key}"))
    }

    fn list<T: FromStr>(&self, flag: Vec<T>, key: &str, default: Vec<T>) -> Result<Vec<T>, String> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        match self.config.get(key) {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| format!("config value for {key} is not valid: {s:?}")))
                .collect(),
            None => Ok(default),
        }
    }

    fn triple(&self, a: &TripleArgs) -> Result<(f64, f64, u32), String> {
        Ok((self.get(a.alpha, "alpha", None)?, self.get(a.beta, "beta", None)?, self.get(a.dim, "dim", None)?))
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(exit::USAGE, text),
            };
        }
    };
    let config = match &cli.config {
        Some(p) => match std::fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| parse_config(&t)) {
            Ok(c) => c,
            Err(e) => return Outcome::fail(exit::USAGE, format!("cannot read config {}: {e}", p.display())),
        },
        None => HashMap::new(),
    };
    let res = Resolver { config };
    let started = Instant::now();
    let out = match dispatch(&cli, &res) {
        Ok(o) => o,
        Err(Failure(code, msg)) => Outcome::fail(code, msg),
    };
    if let Some(dir) = &cli.output_dir {
        if let Err(e) = write_sidecar(dir, &cli.command, &out, started) {
            return Outcome::fail(exit::USAGE, format!("cannot write to {}: {e}", dir.display()));
        }
    }
    out
}

struct Failure(i32, String);

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(exit::USAGE, s)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Solver(_) | Error::QuadratureNonConvergence { .. } => exit::SOLVER,
            Error::UnknownCase(_) => exit::UNKNOWN,
            _ => exit::USAGE,
        };
        Failure(code, e.to_string())
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = crate::json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn dispatch(cli: &Cli, res: &Resolver) -> Result<Outcome, Failure> {
    let format = match cli.format {
        Some(f) => Some(f),
        None => match res.config.get("format").map(String::as_str) {
            None => None,
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            Some(other) => return Err(format!("unknown format {other:?}").into()),
        },
    };
    let seed = res.get(cli.seed, "seed", Some(20240601))?;
    match &cli.command {
        Command::Constant(a) => cmd_constant(res, a),
        Command::Lambda { beta } => cmd_lambda(beta),
        Command::Solve(a) => cmd_solve(res, a, cli.output_dir.as_deref(), format == Some(Format::Csv)),
        Command::Verify(a) => cmd_verify(res, a),
        Command::Trig { points } => cmd_trig(res, *points),
        Command::Fourier(a) => cmd_fourier(res, a),
        Command::DemoSigned(a) => cmd_demo(res, a, seed, format == Some(Format::Json)),
    }
}

#[derive(Serialize)]
struct ConstantReport {
    triple: Triple,
    value: Option<f64>,
    source: Source,
    extremizer_hint: Option<&'static str>,
    lambda_beta: Option<f64>,
    cross_check: Option<CrossCheckOut>,
}

#[derive(Serialize)]
struct CrossCheckOut {
    functional: f64,
    rel_err: f64,
}

fn cmd_constant(res: &Resolver, a: &TripleArgs) -> Result<Outcome, Failure> {
    let (alpha, beta, dim) = res.triple(a)?;
    let t = Triple::new(alpha, beta, dim)?;
    let c = closed_form_constant(&t);
    let lambda = if c.source == Source::SphereFormula { Some(lambda_beta(beta)?) } else { None };
    let cc = if c.value.is_some() {
        let x = cross_check(&t)?;
        Some(CrossCheckOut { functional: x.functional, rel_err: x.rel_err })
    } else {
        None
    };
    let report = ConstantReport {
        triple: t,
        value: c.value,
        source: c.source,
        extremizer_hint: c.extremizer_hint.map(Exemplar::name),
        lambda_beta: lambda,
        cross_check: cc,
    };
    let code = if c.value.is_none() { exit::UNKNOWN } else { exit::OK };
    Ok(Outcome { code, stdout: json(&report)?, stderr: String::new() })
}

#[derive(Serialize)]
struct LambdaEntry {
    beta: f64,
    lambda: f64,
    residual: f64,
    /// `(2 pi lambda)^2`, to compare with `3 beta - 0.75 beta^2` and `3 beta`.
    two_pi_lambda_sq: f64,
    lower_bound: f64,
    upper_bound: f64,
    bounds_hold: bool,
}

fn cmd_lambda(betas: &[f64]) -> Result<Outcome, Failure> {
    let mut entries = Vec::new();
    for &b in betas {
        let l = lambda_beta(b)?;
        let s = (2.0 * std::f64::consts::PI * l).powi(2);
        let (lo, hi) = (3.0 * b - 0.75 * b * b, 3.0 * b);
        entries.push(LambdaEntry {
            beta: b,
            lambda: l,
            residual: lambda_residual(b, l).abs(),
            two_pi_lambda_sq: s,
            lower_bound: lo,
            upper_bound: hi,
            bounds_hold: lo < s && s < hi,
        });
    }
    #[derive(Serialize)]
    struct Out {
        entries: Vec<LambdaEntry>,
    }
    Ok(Outcome::ok(json(&Out { entries })?))
}

#[derive(Serialize)]
struct SolveReport {
    triple: Triple,
    positive_fourier: bool,
    status: LpStatus,
    objective: f64,
    constant_estimate: f64,
    closed_form: Option<f64>,
    rel_err: Option<f64>,
    cut_rounds: usize,
    max_violation: f64,
    converged: bool,
    /// `[radius, mass]` for every nonzero mass.
    masses: Vec<[f64; 2]>,
    /// `[frequency, multiplier]` for every nonzero multiplier.
    duals: Vec<[f64; 2]>,
    eq_dual: f64,
    diagnostics: Option<Diagnostics>,
}

#[derive(Serialize)]
struct Diagnostics {
    duality: lp::DualityReport,
    structure: lp::StructureReport,
    certificate_terms: usize,
    certificate_passed: bool,
    certificate_failed: Vec<String>,
    profile: Option<lp::ProfileReport>,
}

fn cmd_solve(res: &Resolver, a: &SolveArgs, out_dir: Option<&Path>, csv: bool) -> Result<Outcome, Failure> {
    let positive = a.positive_fourier || res.get(None, "positive-fourier", Some(false))?;
    let mut inst = match &a.instance {
        Some(p) => LpInstance::load(p)?,
        None => {
            let (alpha, beta, dim) = res.triple(&a.triple)?;
            let t = Triple::new(alpha, beta, dim)?;
            lp::build_instance(
                t,
                res.get(a.r_max, "r-max", Some(1.0))?,
                res.get(a.n_radii, "n-radii", Some(401))?,
                res.get(a.initial_freqs, "initial-freqs", Some(64))?,
                res.get(a.window, "window", Some(30.0))?,
            )?
        }
    };
    let o = &mut inst.options;
    o.max_cut_rounds = res.get(a.max_cut_rounds, "max-cut-rounds", Some(o.max_cut_rounds))?;
    o.violation_tol = res.get(a.violation_tol, "violation-tol", Some(o.violation_tol))?;
    let rule = res.get(a.pivot_rule.map(|p| format!("{p:?}").to_lowercase()), "pivot-rule", Some("dantzig".into()))?;
    o.simplex_pivot_rule = match rule.as_str() {
        "dantzig" => PivotRule::Dantzig,
        "bland" => PivotRule::Bland,
        other => return Err(format!("unknown pivot rule {other:?}").into()),
    };
    inst.validate()?;

    let sol = if positive { lp::solve_positive_fourier(&inst)? } else { lp::solve(&inst)? };
    let t = inst.triple;
    let mut note = String::new();
    let closed = if !positive {
        closed_form_constant(&t).value
    } else if (t.alpha, t.beta, t.dim) == (2.0, 2.0, 1) {
        let pf = positive_fourier_constant()?;
        note = pf.note();
        Some(pf.computed)
    } else {
        None
    };
    let nonzero = |xs: &[f64], ys: &[f64]| -> Vec<[f64; 2]> {
        xs.iter().zip(ys).filter(|(_, &y)| y != 0.0).map(|(&x, &y)| [x, y]).collect()
    };
    let mut report = SolveReport {
        triple: t,
        positive_fourier: positive,
        status: sol.status,
        objective: sol.objective,
        constant_estimate: sol.constant_estimate(),
        closed_form: closed,
        rel_err: closed.map(|c| (sol.constant_estimate() - c).abs() / c),
        cut_rounds: sol.cut_rounds,
        max_violation: sol.max_violation,
        converged: sol.converged,
        masses: nonzero(&sol.radii, &sol.masses),
        duals: nonzero(&sol.freqs, &sol.duals),
        eq_dual: sol.eq_dual,
        diagnostics: None,
    };
    if sol.status != LpStatus::Optimal {
        return Ok(Outcome {
            code: exit::SOLVER,
            stdout: json(&report)?,
            stderr: format!("LP status {:?}", sol.status),
        });
    }
    let cert = lp::extract_certificate(&sol)?;
    let duality = lp::duality_report(&sol, &cert)?;
    let structure = lp::structure_diagnostics(&sol, inst.options.freq_window)?;
    let check = lp::check_certificate(&sol, &cert)?;
    let profile = if positive { Some(lp::profile_correlation(&sol, 1.5 / inst.options.freq_window)?) } else { None };
    report.diagnostics = Some(Diagnostics {
        duality,
        structure,
        certificate_terms: cert.terms.len(),
        certificate_passed: check.passed,
        certificate_failed: check.failed,
        profile,
    });

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        std::fs::write(dir.join("solution.json"), sol.to_json()?).map_err(Error::from)?;
        cert.save(&dir.join("certificate.json"))?;
        inst.save(&dir.join("instance.json"))?;
        std::fs::write(dir.join("masses.csv"), masses_csv(&sol)).map_err(Error::from)?;
        let m = sol.measure()?;
        std::fs::write(dir.join("spectrum.csv"), fourier_csv(&m, t.beta, inst.options.freq_window, 3000)?)
            .map_err(Error::from)?;
    }
    let stdout = if csv { masses_csv(&sol) } else { json(&report)? };
    Ok(Outcome { code: exit::OK, stdout, stderr: note })
}

fn masses_csv(sol: &lp::LpSolution) -> String {
    let mut s = String::from("radius,mass\n");
    for (r, m) in sol.radii.iter().zip(&sol.masses) {
        let _ = writeln!(s, "{r:.16e},{m:.16e}");
    }
    s
}

fn fourier_csv(m: &RadialMeasure, beta: f64, window: f64, points: usize) -> crate::Result<String> {
    let mut s = String::from("t,fourier,weighted\n");
    for k in 0..=points {
        let t = window * k as f64 / points as f64;
        let f = m.fourier_at(t)?;
        let _ = writeln!(s, "{t:.16e},{f:.16e},{:.16e}", f.abs() * t.powf(beta));
    }
    Ok(s)
}

fn cmd_verify(res: &Resolver, a: &VerifyArgs) -> Result<Outcome, Failure> {
    let cert = Certificate::load(&a.cert)?;
    let measure = RadialMeasure::load(&a.measure)?;
    let alpha = res.get(a.alpha, "alpha", Some(cert.alpha))?;
    let beta: f64 = res.get(a.beta, "beta", None)?;
    let t = Triple::new(alpha, beta, cert.dim)?;
    let positive = a.positive_fourier || res.get(None, "positive-fourier", Some(false))?;
    let opts = VerifyOptions {
        contract: if positive { Contract::PositiveFourier } else { Contract::Standard },
        ..Default::default()
    };
    let report = verify_certificate(&cert, &measure, &t, &opts)?;
    let code = if report.passed { exit::OK } else { exit::VERIFY };
    let stderr = if report.passed { String::new() } else { format!("failed conditions: {}", report.failed.join(", ")) };
    Ok(Outcome { code, stdout: json(&report)?, stderr })
}

fn cmd_trig(res: &Resolver, points: Option<usize>) -> Result<Outcome, Failure> {
    let n = res.get(points, "points", Some(2001))?;
    let tan = check_tan_bounds(n)?;
    let g_beta1 = [alpha0(), 1.9, 2.0].into_iter().map(|al| check_g_beta1(al, n)).collect::<crate::Result<Vec<_>>>()?;
    let mut g_general = Vec::new();
    for al in [2.0, 3.0, 5.0] {
        for b in [0.25, 0.5, 0.75, 1.0] {
            g_general.push(check_g_general(al, b, n)?);
        }
    }
    let all = tan.upper.certified
        && tan.lower.certified
        && tan.certified
        && g_beta1.iter().all(|g| g.certified)
        && g_general.iter().all(|g| g.certified);
    #[derive(Serialize)]
    struct Out {
        tan_upper: bool,
        tan_lower: bool,
        g_beta1_all: bool,
        g_general_all: bool,
        all_certified: bool,
        tan_bounds: crate::positivity::TanBoundsReport,
        g_beta1: Vec<crate::positivity::GReport>,
        g_general: Vec<crate::positivity::GReport>,
    }
    let out = Out {
        tan_upper: tan.upper.certified,
        tan_lower: tan.lower.certified,
        g_beta1_all: g_beta1.iter().all(|g| g.certified),
        g_general_all: g_general.iter().all(|g| g.certified),
        all_certified: all,
        tan_bounds: tan,
        g_beta1,
        g_general,
    };
    let code = if all { exit::OK } else { exit::VERIFY };
    Ok(Outcome { code, stdout: json(&out)?, stderr: String::new() })
}

fn cmd_fourier(res: &Resolver, a: &FourierArgs) -> Result<Outcome, Failure> {
    let m = match (&a.measure, &a.exemplar) {
        (Some(p), _) => RadialMeasure::load(p)?,
        (None, Some(name)) => {
            RadialMeasure::exemplar(Exemplar::from_name(name).ok_or_else(|| format!("unknown exemplar {name:?}"))?)
        }
        (None, None) => return Err("give --measure or --exemplar".to_string().into()),
    };
    let beta = res.get(a.beta, "beta", Some(0.0))?;
    let window = res.get(a.window, "window", Some(m.default_window()))?;
    let points = res.get(a.points, "points", Some(2000))?;
    if !(window > 0.0) || points == 0 || beta < 0.0 {
        return Err("window and points must be positive and beta nonnegative".to_string().into());
    }
    Ok(Outcome::ok(fourier_csv(&m, beta, window, points)?))
}

fn cmd_demo(res: &Resolver, a: &DemoArgs, seed: u64, as_json: bool) -> Result<Outcome, Failure> {
    let beta = res.get(a.beta, "beta", Some(0.4))?;
    let modes = res.list(a.modes.clone(), "modes", vec![8, 64, 512])?;
    let trials = res.get(a.trials, "trials", Some(20))?;
    let stats = modes.iter().map(|&n| signed_ratio_demo(beta, n, trials, seed)).collect::<crate::Result<Vec<_>>>()?;
    if as_json {
        return Ok(Outcome::ok(json(&stats)?));
    }
    let mut s = String::from("modes,trial,ratio,median\n");
    for st in &stats {
        for (i, r) in st.ratios.iter().enumerate() {
            let _ = writeln!(s, "{},{},{:.16e},{:.16e}", st.num_modes, i, r, st.median);
        }
    }
    Ok(Outcome::ok(s))
}

fn write_sidecar(dir: &Path, cmd: &Command, out: &Outcome, started: Instant) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let name = match cmd {
        Command::Constant(_) => "constant",
        Command::Lambda { .. } => "lambda",
        Command::Solve(_) => "solve",
        Command::Verify(_) => "verify",
        Command::Trig { .. } => "trig",
        Command::Fourier(_) => "fourier",
        Command::DemoSigned(_) => "demo-signed",
    };
    let ext = if out.stdout.starts_with('{') || out.stdout.starts_with('[') { "json" } else { "csv" };
    std::fs::write(dir.join(format!("{name}.{ext}")), &out.stdout)?;
    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut log = format!(
        "command={name}\nexit={}\nunix_time={now}\nelapsed_s={:.3}\n",
        out.code,
        started.elapsed().as_secs_f64()
    );
    for line in out.stderr.lines() {
        log.push_str(&format!("note={line}\n"));
    }
    std::fs::write(dir.join(format!("{name}.log")), log)
}
