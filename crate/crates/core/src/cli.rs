//! Command-line front end.
//!
//! Exit codes: 0 success; 1 numerical failure or a failed asserted check;
//! 2 malformed arguments or a point outside the coherent-state domain.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::coherent::{
    self, auto_dim, chebyshev_closed_form, coherent_state, coherent_state_with_tail, hermite_closed_form,
    laguerre_closed_forms, laguerre_overlap_bessel_ratio, laguerre_printed_wavefunction, legendre_closed_forms,
    legendre_overlap_closed, legendre_printed_wavefunction, normalization_sum, overlap, DomainOfDefinition,
    TAIL_TOL, WAVE_TAIL_TOL,
};
use crate::error::OscError;
use crate::moments::{check_theorem1, MomentTable};
use crate::oscillator::{check_theorem2, DeformedRelation};
use crate::recurrence::{builtin_family, eval_poly_all, measure_of, CoefficientSequence, FamilyLabel};
use crate::report::{Status, VerificationReport};
use crate::resolution::{check_unity, hermite_calibration_measure, laguerre_measure, legendre_measure, unity_moments};
use crate::specfun::{bessel_i, gauss_2f1, SeriesControl};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gencoh", version, about = "Generalized oscillator algebras and Barut-Girardello coherent states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate orthonormal polynomials Ψ_0..Ψ_n over a grid.
    Poly(PolyArgs),
    /// Coherent-state coefficients or wavefunction values.
    Coherent(CoherentArgs),
    /// Run verification checks and print JSON reports.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// hermite, laguerre, legendre or chebyshev
    #[arg(long, value_parser = parse_family)]
    pub family: FamilyLabel,
    /// Laguerre parameter α > -1
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Highest degree
    #[arg(long)]
    pub n: usize,
    /// start:stop:count
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Grid,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Coeffs,
    Wave,
}

#[derive(Args, Debug)]
pub struct CoherentArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Complex point a+bi or a-bi
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long, value_enum, default_value_t = Mode::Coeffs)]
    pub mode: Mode,
    /// Truncation size; chosen from the tail bound when omitted
    #[arg(long)]
    pub dim: Option<usize>,
    /// x grid for --mode wave (start:stop:count)
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Theorem1,
    Theorem2,
    Eigen,
    Normalization,
    Closed,
    Overlap,
    Unity,
}

impl Suite {
    const EACH: [Suite; 7] = [
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Eigen,
        Suite::Normalization,
        Suite::Closed,
        Suite::Overlap,
        Suite::Unity,
    ];
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Restrict to one family
    #[arg(long, value_parser = parse_family)]
    pub family: Option<FamilyLabel>,
    /// Laguerre parameter; replaces the default parameter set
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Truncation size for the commutator checks
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    /// Override every asserted tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Inclusive, evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("grid `{s}` must look like start:stop:count"));
        };
        let num = |t: &str| -> Result<f64, String> {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad grid bound `{t}`"))
        };
        let count: usize = count.parse().map_err(|_| format!("bad grid count `{count}`"))?;
        if count < 2 {
            return Err("grid count must be at least 2".into());
        }
        Ok(Grid {
            start: num(start)?,
            stop: num(stop)?,
            count,
        })
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse()
}

pub fn parse_family(s: &str) -> Result<FamilyLabel, String> {
    let label: FamilyLabel = s.parse().map_err(|e: OscError| e.to_string())?;
    if label == FamilyLabel::Custom {
        return Err("custom families are library-only".into());
    }
    Ok(label)
}

/// Parses `a+bi` or `a-bi` with no spaces; either part may use exponent notation.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("complex literal `{s}` must look like a+bi or a-bi");
    let body = s.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<OscError> for CliError {
    fn from(e: OscError) -> Self {
        let code = match e {
            OscError::UnknownFamily(_) | OscError::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Output text plus the exit code it should be reported with.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

/// Shortest representation that parses back to the same f64, switching to
/// exponent form outside [1e-5, 1e16) like `%.17g` does.
pub fn format_real(v: f64) -> String {
    let mag = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&mag) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|&v| format_real(v)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": self.rows }))
                    .expect("table serializes");
                out.push('\n');
                out
            }
        }
    }
}

fn family_of(args: &FamilyArgs) -> Result<CoefficientSequence, CliError> {
    match (args.family, args.alpha) {
        (FamilyLabel::Laguerre, alpha) => Ok(builtin_family(FamilyLabel::Laguerre, &[alpha.unwrap_or(0.0)])?),
        (label, None) => Ok(builtin_family(label, &[])?),
        (label, Some(_)) => Err(CliError::usage(format!("--alpha does not apply to {label}"))),
    }
}

fn check_dim(dim: usize, min: usize) -> Result<usize, CliError> {
    let cap = coherent::max_dim();
    if dim < min || dim > cap {
        return Err(CliError::usage(format!("--dim must lie in {min}..={cap} (cap from OSC_MAX_DIM)")));
    }
    Ok(dim)
}

pub fn cmd_poly(args: &PolyArgs) -> Result<Table, CliError> {
    let coeffs = family_of(&args.family)?;
    let mut columns = vec!["x".to_string()];
    columns.extend((0..=args.n).map(|k| format!("psi_{k}")));
    let mut table = Table::new(columns);
    for x in args.grid.points() {
        let mut row = vec![x];
        row.extend(eval_poly_all(&coeffs, args.n, x)?);
        table.rows.push(row);
    }
    Ok(table)
}

fn domain_message(label: FamilyLabel, z: Complex64, domain: DomainOfDefinition) -> String {
    format!(
        "z = {z} (|z| = {}) lies outside the {label} coherent-state domain |z| < 1/√2 ≈ {}",
        z.norm(),
        domain.radius
    )
}

fn default_wave_grid(label: FamilyLabel) -> Grid {
    let (start, stop, count) = match label {
        FamilyLabel::Laguerre => (0.0, 10.0, 21),
        FamilyLabel::Hermite => (-3.0, 3.0, 13),
        _ => (-0.9, 0.9, 19),
    };
    Grid { start, stop, count }
}

fn closed_wavefunction(coeffs: &CoefficientSequence, z: Complex64, x: f64) -> Result<Complex64, OscError> {
    let value = match coeffs.label() {
        FamilyLabel::Hermite => Ok(hermite_closed_form(z, x)),
        FamilyLabel::Laguerre => laguerre_closed_forms(coeffs.alpha().unwrap_or(0.0), z, x).map(|(_, w)| w),
        FamilyLabel::Legendre => legendre_closed_forms(z, x).map(|(_, w)| w),
        FamilyLabel::ChebyshevFirst => chebyshev_closed_form(z, x).map(|f| f.derived),
        FamilyLabel::Custom => Err(OscError::UnknownFamily("custom".into())),
    };
    match value {
        // branch points have no finite closed-form value
        Err(OscError::Pole(_)) => Ok(Complex64::new(f64::NAN, f64::NAN)),
        other => other,
    }
}

pub fn cmd_coherent(args: &CoherentArgs) -> Result<Table, CliError> {
    let coeffs = family_of(&args.family)?;
    let domain = DomainOfDefinition::of(&coeffs);
    if !domain.contains(args.z) {
        return Err(CliError::usage(domain_message(coeffs.label(), args.z, domain)));
    }
    let dim = match args.dim {
        Some(d) => check_dim(d, 1)?,
        None => {
            let tol = if args.mode == Mode::Wave { WAVE_TAIL_TOL } else { TAIL_TOL };
            auto_dim(&coeffs, args.z, tol)?
        }
    };
    let state = coherent_state(&coeffs, args.z, dim)?;
    match args.mode {
        Mode::Coeffs => {
            let mut table = Table::new(vec!["n".into(), "c_re".into(), "c_im".into()]);
            for (n, c) in state.coeffs.iter().enumerate() {
                table.rows.push(vec![n as f64, c.re, c.im]);
            }
            Ok(table)
        }
        Mode::Wave => {
            let grid = args.grid.unwrap_or_else(|| default_wave_grid(coeffs.label()));
            let mut table = Table::new(
                ["x", "series_re", "series_im", "closed_re", "closed_im", "abs_diff"]
                    .map(String::from)
                    .to_vec(),
            );
            for x in grid.points() {
                let series = state.wavefunction(&coeffs, x)?;
                let closed = closed_wavefunction(&coeffs, args.z, x)?;
                table
                    .rows
                    .push(vec![x, series.re, series.im, closed.re, closed.im, (series - closed).norm()]);
            }
            Ok(table)
        }
    }
}

/// Options shared by the verification suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub family: Option<FamilyLabel>,
    pub alpha: Option<f64>,
    pub dim: usize,
    pub tol: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            family: None,
            alpha: None,
            dim: 64,
            tol: None,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn wants(&self, label: FamilyLabel) -> bool {
        self.family.is_none_or(|f| f == label)
    }

    fn alphas(&self, default: &[f64]) -> Vec<f64> {
        self.alpha.map_or_else(|| default.to_vec(), |a| vec![a])
    }

    fn symmetric(&self) -> Vec<CoefficientSequence> {
        [FamilyLabel::Hermite, FamilyLabel::Legendre, FamilyLabel::ChebyshevFirst]
            .into_iter()
            .filter(|&l| self.wants(l))
            .map(|l| builtin_family(l, &[]).expect("builtin"))
            .collect()
    }

    fn all(&self, laguerre_alphas: &[f64]) -> Result<Vec<CoefficientSequence>, OscError> {
        let mut out = Vec::new();
        for label in FamilyLabel::BUILTINS {
            if !self.wants(label) {
                continue;
            }
            if label == FamilyLabel::Laguerre {
                for alpha in self.alphas(laguerre_alphas) {
                    out.push(CoefficientSequence::laguerre(alpha)?);
                }
            } else {
                out.push(builtin_family(label, &[])?);
            }
        }
        Ok(out)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

fn with_family_params(mut report: VerificationReport, coeffs: &CoefficientSequence) -> VerificationReport {
    if let Some(alpha) = coeffs.alpha() {
        report = report.with_param("alpha", alpha);
    }
    report
}

/// A 3×3 grid of points well inside the family's domain.
pub fn eigen_grid(coeffs: &CoefficientSequence) -> Vec<Complex64> {
    let step = if DomainOfDefinition::of(coeffs).radius.is_finite() { 0.4 } else { 1.5 };
    let axis = [-step, 0.0, step];
    axis.iter().flat_map(|&re| axis.iter().map(move |&im| c(re, im))).collect()
}

fn suite_theorem1(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    const N_MAX: usize = 8;
    let mut out = Vec::new();
    for coeffs in opts.symmetric() {
        let moments = MomentTable::via_quadrature(&measure_of(&coeffs)?, 2 * N_MAX + 2, 200)?;
        out.push(check_theorem1(&coeffs, &moments, N_MAX, opts.tol(1e-8))?);
    }
    Ok(out)
}

fn suite_theorem2(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let half = |_n: usize| 0.5;
    let canonical = DeformedRelation {
        a_coeff: 1.0,
        c_fn: &half,
    };
    opts.symmetric()
        .iter()
        .map(|coeffs| {
            let relation = (coeffs.label() == FamilyLabel::Hermite).then_some(&canonical);
            check_theorem2(coeffs, opts.dim, opts.tol(1e-12), relation)
        })
        .collect()
}

fn suite_eigen(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let mut out = Vec::new();
    for coeffs in opts.all(&[0.0, 1.0])? {
        let mut worst = 0.0f64;
        let mut points = Vec::new();
        for z in eigen_grid(&coeffs) {
            let state = coherent_state_with_tail(&coeffs, z, TAIL_TOL)?;
            let residual = state.eigen_residual(&coeffs)?;
            worst = worst.max(residual);
            points.push(json!({ "z": [z.re, z.im], "dim": state.dim, "tail_bound": state.tail_bound, "residual": residual }));
        }
        let report = VerificationReport::new("eigen_residual", coeffs.label().name())
            .judged(worst, opts.tol(1e-9))
            .with_details(json!({ "points": points }));
        out.push(with_family_params(report, &coeffs));
    }
    Ok(out)
}

fn suite_normalization(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let ctl = SeriesControl::default();
    let tol = opts.tol(1e-10);
    let mut out = Vec::new();
    for coeffs in opts.all(&[0.0, 0.5, 1.0, 2.5])? {
        let label = coeffs.label();
        let radii: Vec<f64> = match label {
            FamilyLabel::Hermite | FamilyLabel::Laguerre => vec![0.1, 1.0, 5.0],
            _ => (0..=6).map(|k| 0.1 * k as f64).collect(),
        };
        let mut worst = 0.0f64;
        let mut rows = Vec::new();
        for &r in &radii {
            let t = r * r;
            let series = normalization_sum(&coeffs, t, 1e-16)?;
            let closed = match label {
                FamilyLabel::Hermite => t.exp(),
                FamilyLabel::Laguerre => laguerre_closed_forms(coeffs.alpha().unwrap_or(0.0), c(r, 0.0), 0.0)?.0,
                FamilyLabel::Legendre => gauss_2f1(0.5, 1.5, 1.0, c(2.0 * t, 0.0), ctl)?.re,
                _ => (1.0 - t) / (1.0 - 2.0 * t),
            };
            let err = ((series - closed) / closed).abs();
            worst = worst.max(err);
            rows.push(json!({ "abs_z": r, "series": series, "closed": closed, "rel_error": err }));
        }
        let mut details = json!({ "points": rows });
        if label == FamilyLabel::Laguerre && coeffs.alpha() == Some(0.0) {
            let spot = normalization_sum(&coeffs, 1.0, 1e-16)?;
            let i0 = bessel_i(0.0, SQRT_2, ctl)?;
            worst = worst.max(((spot - i0) / i0).abs());
            details["spot_i0_sqrt2"] = json!({ "series": spot, "bessel": i0 });
        }
        if DomainOfDefinition::of(&coeffs).radius.is_finite() {
            let guard = normalization_sum(&coeffs, 0.75 * 0.75, 1e-16);
            let triggered = matches!(guard, Err(OscError::OutOfDomain { .. }));
            if !triggered {
                worst = f64::INFINITY;
            }
            details["guard_at_0.75"] = json!(triggered);
        }
        let report = VerificationReport::new("normalization", label.name())
            .judged(worst, tol)
            .with_details(details);
        out.push(with_family_params(report, &coeffs));
    }
    Ok(out)
}

/// Points where the series and the closed forms are compared.
fn closed_grid(label: FamilyLabel) -> (Vec<Complex64>, Vec<f64>) {
    match label {
        FamilyLabel::Hermite => (vec![c(0.5, 0.0), c(1.0, -0.5), c(-1.2, 0.8)], vec![-2.0, -0.5, 0.0, 1.0, 2.5]),
        FamilyLabel::Laguerre => (
            vec![c(0.5, 0.0), c(1.0, 0.5), c(-0.8, 1.2), c(2.0, 0.0)],
            vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0],
        ),
        FamilyLabel::Legendre => (
            vec![c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0), c(0.3, 0.3), c(-0.4, 0.2)],
            vec![-0.9, -0.5, 0.0, 0.5, 0.9],
        ),
        _ => (
            vec![c(0.3, 0.0), c(0.0, 0.5), c(-0.2, 0.4), c(0.6, 0.0)],
            vec![-0.9, -0.3, 0.5, 0.8],
        ),
    }
}

/// Distance below which |1 - √2 z x| counts as a branch-point neighborhood.
const BRANCH_EXCLUSION: f64 = 1e-2;

fn suite_closed(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let mut out = Vec::new();
    for coeffs in opts.all(&[0.0, 1.0])? {
        let label = coeffs.label();
        let tol = opts.tol(match label {
            FamilyLabel::Laguerre | FamilyLabel::Legendre => 1e-7,
            _ => 1e-10,
        });
        let (zs, xs) = closed_grid(label);
        let mut worst = 0.0f64;
        let mut printed_ratios = Vec::new();
        let mut skipped = 0usize;
        let mut points = 0usize;
        for &z in &zs {
            let state = coherent_state_with_tail(&coeffs, z, WAVE_TAIL_TOL)?;
            for &x in &xs {
                if label == FamilyLabel::Legendre && (c(1.0, 0.0) - z * (SQRT_2 * x)).norm() < BRANCH_EXCLUSION {
                    skipped += 1;
                    continue;
                }
                let series = state.wavefunction(&coeffs, x)?;
                let closed = closed_wavefunction(&coeffs, z, x)?;
                worst = worst.max(rel_err(closed, series));
                points += 1;
                let printed = match label {
                    FamilyLabel::Laguerre if x > 0.0 => {
                        Some(laguerre_printed_wavefunction(coeffs.alpha().unwrap_or(0.0), z, x)?)
                    }
                    FamilyLabel::Legendre => Some(legendre_printed_wavefunction(z, x)?),
                    FamilyLabel::ChebyshevFirst => Some(chebyshev_closed_form(z, x)?.printed),
                    _ => None,
                };
                if let Some(p) = printed {
                    let ratio = p / series;
                    printed_ratios.push(json!({ "z": [z.re, z.im], "x": x, "printed_over_series": [ratio.re, ratio.im] }));
                }
            }
        }
        let report = VerificationReport::new("closed_form_wavefunction", label.name())
            .judged(worst, tol)
            .with_details(json!({ "points": points, "skipped_near_branch_point": skipped }));
        out.push(with_family_params(report, &coeffs));
        if !printed_ratios.is_empty() {
            let spread = printed_ratios
                .iter()
                .filter_map(|r| r["printed_over_series"][0].as_f64())
                .map(|re| (re - 1.0).abs())
                .fold(0.0, f64::max);
            let report = VerificationReport::new("printed_wavefunction", label.name())
                .informational(spread)
                .with_details(json!({ "ratios": printed_ratios }));
            out.push(with_family_params(report, &coeffs));
        }
    }
    Ok(out)
}

fn overlap_points(coeffs: &CoefficientSequence) -> Vec<Complex64> {
    if DomainOfDefinition::of(coeffs).radius.is_finite() {
        vec![c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3), c(0.1, 0.6)]
    } else {
        vec![c(0.0, 0.0), c(0.7, 0.2), c(-1.0, 1.5), c(2.0, -0.5), c(0.3, -2.5)]
    }
}

fn suite_overlap(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let mut out = Vec::new();
    for coeffs in opts.all(&[0.0, 1.0])? {
        let label = coeffs.label();
        let pts = overlap_points(&coeffs);
        let mut worst = 0.0f64;
        let mut max_off_diagonal = 0.0f64;
        let mut closed_error = 0.0f64;
        let mut printed = Vec::new();
        for (i, &z1) in pts.iter().enumerate() {
            for (j, &z2) in pts.iter().enumerate() {
                let o = overlap(&coeffs, z1, z2, 1e-16)?;
                let back = overlap(&coeffs, z2, z1, 1e-16)?;
                worst = worst.max((o - back.conj()).norm());
                if i == j {
                    worst = worst.max((o - 1.0).norm());
                } else {
                    max_off_diagonal = max_off_diagonal.max(o.norm());
                }
                if label == FamilyLabel::Legendre {
                    closed_error = closed_error.max(rel_err(o, legendre_overlap_closed(z1, z2)?));
                }
            }
        }
        if label == FamilyLabel::Laguerre {
            // pairs with z̄₁z₂ > 0, where the Bessel-ratio form carries no phase
            let alpha = coeffs.alpha().unwrap_or(0.0);
            for (z1, scale) in [(c(0.6, 0.8), 2.0), (c(1.0, 0.0), 0.5), (c(-0.3, 1.1), 3.0)] {
                let z2 = z1 * scale;
                let series = overlap(&coeffs, z1, z2, 1e-16)?;
                closed_error = closed_error.max(rel_err(laguerre_overlap_bessel_ratio(alpha, z1, z2, SQRT_2)?, series));
                let as_printed = laguerre_overlap_bessel_ratio(alpha, z1, z2, 2.0)?;
                printed.push(json!({ "z1": [z1.re, z1.im], "z2": [z2.re, z2.im], "printed_over_series": (as_printed / series).re }));
            }
        }
        // equality |⟨z₁|z₂⟩| = 1 only on the diagonal
        if max_off_diagonal >= 1.0 {
            worst = f64::INFINITY;
        }
        let report = VerificationReport::new("overlap", label.name())
            .judged(worst.max(closed_error), opts.tol(1e-9))
            .with_details(json!({
                "max_offdiagonal_modulus": max_off_diagonal,
                "closed_form_rel_error": closed_error,
                "printed_argument": printed,
            }));
        out.push(with_family_params(report, &coeffs));
    }
    Ok(out)
}

fn suite_unity(opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    let mut out = Vec::new();
    if opts.wants(FamilyLabel::Hermite) {
        let hermite = CoefficientSequence::hermite();
        let (d, _, _) = unity_moments(&hermite, &hermite_calibration_measure(), 10, Default::default())?;
        let err = d.iter().map(|dn| (dn - 1.0).abs()).fold(0.0, f64::max);
        out.push(
            VerificationReport::new("unity_calibration", "hermite")
                .with_param("n_max", 10.0)
                .judged(err, opts.tol(1e-8))
                .with_details(json!({ "measure": "hermite_calibration", "d": d })),
        );
    }
    if opts.wants(FamilyLabel::Laguerre) {
        for alpha in opts.alphas(&[0.0, 1.0]) {
            let lag = CoefficientSequence::laguerre(alpha)?;
            out.push(check_unity(&lag, &laguerre_measure(alpha)?, 8, opts.tol(1e-6))?);
        }
    }
    if opts.wants(FamilyLabel::Legendre) {
        out.push(check_unity(&CoefficientSequence::legendre(), &legendre_measure(), 6, opts.tol(1e-6))?);
    }
    if opts.family == Some(FamilyLabel::ChebyshevFirst) {
        out.push(
            VerificationReport::new("unity", "chebyshev")
                .informational(f64::NAN)
                .with_details(json!({ "note": "no radial measure is available for this family" })),
        );
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<VerificationReport>, OscError> {
    if let Some(tol) = opts.tol {
        if !(tol > 0.0) {
            return Err(OscError::InvalidParameter(format!("--tol must be positive, got {tol}")));
        }
    }
    if let Some(alpha) = opts.alpha {
        CoefficientSequence::laguerre(alpha)?;
    }
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, opts)?);
            }
            Ok(out)
        }
        Suite::Theorem1 => suite_theorem1(opts),
        Suite::Theorem2 => suite_theorem2(opts),
        Suite::Eigen => suite_eigen(opts),
        Suite::Normalization => suite_normalization(opts),
        Suite::Closed => suite_closed(opts),
        Suite::Overlap => suite_overlap(opts),
        Suite::Unity => suite_unity(opts),
    }
}

pub fn render_reports(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
            out.push('\n');
            out
        }
        Format::Csv => {
            let mut out = String::from("check,family,params,status,max_error\n");
            for r in reports {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let status = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Report => "report",
                };
                out.push_str(&format!("{},{},{},{},{}\n", r.check, r.family, params.join(";"), status, format_real(r.max_error)));
            }
            out
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Output, CliError> {
    check_dim(args.dim, 4)?;
    let opts = SuiteOptions {
        family: args.family,
        alpha: args.alpha,
        dim: args.dim,
        tol: args.tol,
    };
    if args.family.is_some_and(|f| f != FamilyLabel::Laguerre) && args.alpha.is_some() {
        return Err(CliError::usage("--alpha only applies to laguerre"));
    }
    let reports = run_suite(args.suite, &opts)?;
    if reports.is_empty() {
        return Err(CliError::usage("no checks apply to this suite and family"));
    }
    let code = if reports.iter().all(VerificationReport::passed) { EXIT_OK } else { EXIT_FAILURE };
    Ok(Output {
        text: render_reports(&reports, args.format),
        code,
    })
}

/// Executes a parsed command line without touching stdout.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ok = |text: String| Output { text, code: EXIT_OK };
    match &cli.command {
        Command::Poly(args) => Ok(ok(cmd_poly(args)?.render(args.output.format))),
        Command::Coherent(args) => Ok(ok(cmd_coherent(args)?.render(args.output.format))),
        Command::Verify(args) => cmd_verify(args),
    }
}

pub fn output_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Poly(a) => a.output.out.as_ref(),
        Command::Coherent(a) => a.output.out.as_ref(),
        Command::Verify(a) => a.out.as_ref(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.3+0i").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("-1-2.5i").unwrap(), c(-1.0, -2.5));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        for bad in ["0.3", "1+i", "i", "1 + 2i", "abc", "+2i", "1+2j", "nan+0i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g: Grid = "-1:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g: Grid = "0:0:2".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.0]);
        for bad in ["0:1:1", "0:1", "a:1:3", "0:1:x", "0:inf:3"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_uses_shortest_round_trip() {
        let mut t = Table::new(vec!["x".into(), "y".into()]);
        t.rows.push(vec![1.0, 0.1 + 0.2]);
        t.rows.push(vec![-6.5e-16, 1e20]);
        assert_eq!(t.render(Format::Csv), "x,y\n1,0.30000000000000004\n-6.5e-16,1e20\n");
        for v in [1.234e-300, 5e-324, 0.1, 123456.789, -2.5e17, f64::MAX] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn every_suite_passes_with_defaults() {
        for suite in Suite::EACH {
            let reports = run_suite(suite, &SuiteOptions::default()).unwrap();
            assert!(!reports.is_empty());
            for r in &reports {
                assert!(r.passed(), "{suite:?} {} {}: {}", r.check, r.family, r.details);
            }
        }
    }

    #[test]
    fn error_classification() {
        assert_eq!(CliError::from(OscError::InvalidParameter("x".into())).code, EXIT_USAGE);
        assert_eq!(CliError::from(OscError::Overflow("x")).code, EXIT_FAILURE);
    }
}
