//! Command-line front end for the `coleman` library.
//!
//! The [`run`] entry point parses a subcommand, resolves the configuration
//! (defaults, then an optional `key=value` config file, then flags), runs
//! the corresponding library operation, and renders the result in human or
//! JSON form.  Exit codes: 0 on success, 1 for usage errors, 2 for
//! computation failures (precision exhausted, unfactorable or excluded
//! input), and 3 when `selftest` finds a mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use coleman::heisenberg::albanese;
use coleman::kim::{evaluate_decomposition, CoefficientTable};
use coleman::padic::parse_rational;
use coleman::polylog::{dilog_to_order, plog};
use coleman::selftest::{run_selftest, SelftestReport};
use coleman::solver::{
    build_exp_equation_function, build_unit_equation_function, find_zeros, solve_exp_equation,
    verify_candidate, ColemanFunction, Recognized, RecognizedKind, SolverOptions, VerifyRing,
    ZeroReport,
};
use coleman::symbols::{decompose, factor_symbol, Decomposition, DEFAULT_FACTOR_BOUND};
use coleman::{PadicNumber, Rational};

/// Success.
pub const EXIT_OK: u8 = 0;
/// Bad flags, arguments, or configuration.
pub const EXIT_USAGE: u8 = 1;
/// The computation itself failed.
pub const EXIT_COMPUTE: u8 = 2;
/// A selftest battery found a mismatch.
pub const EXIT_SELFTEST: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "coleman",
    version,
    about = "p-adic polylogarithms, relator decompositions, and depth-two \
             solvers for unit and exponential equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working prime p (odd).
    #[arg(short = 'p', long = "prime", global = true, value_name = "P")]
    p: Option<u64>,

    /// Target precision N in p-adic digits.
    #[arg(short = 'N', long = "precision", global = true, value_name = "N")]
    n: Option<u32>,

    /// Frobenius dilogarithm series truncation order M.
    #[arg(short = 'M', long = "series-order", global = true, value_name = "M")]
    m: Option<usize>,

    /// Slack digits for residual certification.
    #[arg(long, global = true, value_name = "DIGITS")]
    slack: Option<u32>,

    /// Height bound for rational recognition.
    #[arg(long, global = true, value_name = "H")]
    rational_height: Option<u64>,

    /// Coefficient bound for quadratic recognition.
    #[arg(long, global = true, value_name = "B")]
    quad_bound: Option<i64>,

    /// Exponent bound for discrete-logarithm recognition.
    #[arg(long, global = true, value_name = "E")]
    exp_bound: Option<i64>,

    /// Output format.
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<Format>,

    /// Seed for the selftest batteries.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Prime set S, comma separated (e.g. -S 2,3,7).
    #[arg(
        short = 'S',
        long = "s-primes",
        global = true,
        value_delimiter = ',',
        value_name = "Q1,..,QS"
    )]
    s: Option<Vec<u64>>,

    /// Config file in key=value format (keys: p, N, M, slack,
    /// rational_height, quad_bound, exp_bound, format, seed, S).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the p-adic dilogarithm Li2(z).
    Dilog {
        /// Rational argument, as `num` or `num/den`.
        #[arg(allow_hyphen_values = true, value_name = "Z")]
        z: String,
    },
    /// Evaluate the Iwasawa-branch p-adic logarithm log(x).
    Plog {
        /// Rational argument, as `num` or `num/den`.
        #[arg(allow_hyphen_values = true, value_name = "X")]
        x: String,
    },
    /// Decompose q (x) q' into symmetric and Steinberg relators.
    Decompose {
        /// First prime.
        #[arg(value_name = "Q")]
        q: u64,
        /// Second prime.
        #[arg(value_name = "Q'")]
        q_prime: u64,
    },
    /// Evaluate the bilinear coefficient h(q (x) q') at p.
    Coeff {
        /// First prime.
        #[arg(value_name = "Q")]
        q: u64,
        /// Second prime.
        #[arg(value_name = "Q'")]
        q_prime: u64,
    },
    /// Build the coefficient table over the prime set S at p.
    Table,
    /// Locate and certify the zeros of the unit-equation Coleman function.
    UnitEq,
    /// Solve a·b^x + c·d^y = 1 over the S-units.
    ExpEq {
        /// Coefficient a, as `num` or `num/den`.
        #[arg(allow_hyphen_values = true, value_name = "A")]
        a: String,
        /// Base b.
        #[arg(allow_hyphen_values = true, value_name = "B")]
        b: String,
        /// Coefficient c.
        #[arg(allow_hyphen_values = true, value_name = "C")]
        c: String,
        /// Base d.
        #[arg(allow_hyphen_values = true, value_name = "D")]
        d: String,
    },
    /// Evaluate the depth-two unipotent Albanese map at z.
    Albanese {
        /// Rational argument, as `num` or `num/den`.
        #[arg(allow_hyphen_values = true, value_name = "Z")]
        z: String,
    },
    /// Run the seeded invariant batteries.
    Selftest,
}

#[derive(Debug, Clone)]
struct Config {
    p: u64,
    n: u32,
    m: usize,
    slack: u32,
    rational_height: u64,
    quad_bound: i64,
    exp_bound: i64,
    format: Format,
    seed: u64,
    s: Option<Vec<u64>>,
}

#[derive(Debug, Default)]
struct Overrides {
    p: Option<u64>,
    n: Option<u32>,
    m: Option<usize>,
    slack: Option<u32>,
    rational_height: Option<u64>,
    quad_bound: Option<i64>,
    exp_bound: Option<i64>,
    format: Option<Format>,
    seed: Option<u64>,
    s: Option<Vec<u64>>,
}

/// A failed command: either the invocation was malformed (exit 1) or the
/// computation could not be completed (exit 2).
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<coleman::Error> for Failure {
    fn from(e: coleman::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// A successful command: a JSON value, a human rendering, and the exit
/// code (0 everywhere except a failed selftest, which exits 3).
struct Outcome {
    json: serde_json::Value,
    human: String,
    code: u8,
}

impl Outcome {
    fn ok(json: serde_json::Value, human: String) -> Self {
        Outcome {
            json,
            human,
            code: EXIT_OK,
        }
    }
}

fn parse_key<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("config key `{key}` has invalid value `{value}`"))
}

fn parse_config_file(text: &str) -> Result<Overrides, String> {
    let mut o = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", idx + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" => o.p = Some(parse_key(key, value)?),
            "N" => o.n = Some(parse_key(key, value)?),
            "M" => o.m = Some(parse_key(key, value)?),
            "slack" => o.slack = Some(parse_key(key, value)?),
            "rational_height" => o.rational_height = Some(parse_key(key, value)?),
            "quad_bound" => o.quad_bound = Some(parse_key(key, value)?),
            "exp_bound" => o.exp_bound = Some(parse_key(key, value)?),
            "seed" => o.seed = Some(parse_key(key, value)?),
            "format" => {
                o.format = Some(match value {
                    "human" => Format::Human,
                    "json" => Format::Json,
                    _ => return Err("config key `format` must be human or json".to_string()),
                })
            }
            "S" => {
                let mut s = Vec::new();
                for part in value.split(',') {
                    s.push(parse_key("S", part.trim())?);
                }
                o.s = Some(s);
            }
            _ => return Err(format!("unknown config key `{key}`")),
        }
    }
    Ok(o)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn resolve_config(cli: &Cli) -> Result<Config, String> {
    let mut o = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            parse_config_file(&text)?
        }
        None => Overrides::default(),
    };
    // Command-line flags override the config file.
    o.p = cli.p.or(o.p);
    o.n = cli.n.or(o.n);
    o.m = cli.m.or(o.m);
    o.slack = cli.slack.or(o.slack);
    o.rational_height = cli.rational_height.or(o.rational_height);
    o.quad_bound = cli.quad_bound.or(o.quad_bound);
    o.exp_bound = cli.exp_bound.or(o.exp_bound);
    o.format = cli.format.or(o.format);
    o.seed = cli.seed.or(o.seed);
    o.s = cli.s.clone().or(o.s);

    let p = o.p.unwrap_or(5);
    let n = o.n.unwrap_or(32);
    let m =
        o.m.unwrap_or((n as usize + 8) * (p.saturating_sub(1)) as usize);
    if p < 3 || !is_prime(p) {
        return Err(format!("p = {p} must be an odd prime"));
    }
    if n < 8 {
        return Err(format!("N = {n} must be at least 8"));
    }
    let m_floor = (n as usize + 4) * (p - 1) as usize;
    if m < m_floor {
        return Err(format!("M = {m} must be at least (N+4)(p−1) = {m_floor}"));
    }
    if let Some(s) = &o.s {
        if s.is_empty() {
            return Err("S must not be empty".to_string());
        }
    }
    Ok(Config {
        p,
        n,
        m,
        slack: o.slack.unwrap_or(4),
        rational_height: o.rational_height.unwrap_or(1_000_000),
        quad_bound: o.quad_bound.unwrap_or(100),
        exp_bound: o.exp_bound.unwrap_or(64),
        format: o.format.unwrap_or(Format::Human),
        seed: o.seed.unwrap_or(0),
        s: o.s,
    })
}

fn solver_options(cfg: &Config) -> SolverOptions {
    SolverOptions {
        rational_height: cfg.rational_height,
        quad_bound: cfg.quad_bound,
        exp_bound: cfg.exp_bound,
        ..SolverOptions::default()
    }
}

fn arg_rational(text: &str) -> Result<Rational, Failure> {
    parse_rational(text)
        .map_err(|_| Failure::Usage(format!("`{text}` is not a rational (use num or num/den)")))
}

fn embed(z: &Rational, cfg: &Config) -> Result<PadicNumber, Failure> {
    PadicNumber::from_rational(z, cfg.p, cfg.n).map_err(Failure::from)
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("library types serialize to plain JSON")
}

fn render_recognized(rec: &Recognized) -> String {
    match rec.kind {
        RecognizedKind::Rational => {
            let q = rec
                .as_rational()
                .expect("rational recognitions carry a value");
            format!("recognized {q}")
        }
        RecognizedKind::Quadratic => {
            let [a, b, c] = rec.poly;
            format!("recognized as a root of {a}·z² + ({b})·z + ({c})")
        }
    }
}

fn render_report(r: &ZeroReport) -> String {
    let mut line = format!("  disk {}: z = {}", r.disk, r.root);
    if !r.simple {
        line.push_str(" (multiple)");
    }
    if let Some(rec) = &r.recognized {
        line.push_str(", ");
        line.push_str(&render_recognized(rec));
    }
    if let Some(v) = &r.verified {
        if v.ok {
            line.push_str(&format!(", verified in {}", v.ring));
        } else {
            line.push_str(&format!(", REJECTED over {}", v.ring));
        }
    }
    line
}

/// Verifies recognized zeros: rational candidates against the S-unit ring,
/// quadratic candidates against the real quadratic maximal order.
fn fill_verification(reports: &mut [ZeroReport], s: &[u64]) {
    for r in reports.iter_mut() {
        if let Some(rec) = &r.recognized {
            let ring = match rec.kind {
                RecognizedKind::Rational => VerifyRing::SUnits(s.to_vec()),
                RecognizedKind::Quadratic => VerifyRing::RealQuadratic,
            };
            r.verified = Some(verify_candidate(rec, &ring));
        }
    }
}

/// Re-evaluates the function at every reported root and checks the
/// residual vanishes to `N − slack` digits (capped by the root's own
/// precision).
fn check_residuals(
    f: &ColemanFunction,
    reports: &[ZeroReport],
    cfg: &Config,
) -> Result<(), Failure> {
    for r in reports {
        let residual = f.evaluate(&r.root)?;
        let threshold = (cfg.n as i64 - cfg.slack as i64).min(r.root.abs_precision());
        if residual.val_lower_bound() < threshold {
            return Err(Failure::Compute(format!(
                "residual check failed on disk {}: F(z) = {residual} is not O(p^{threshold})",
                r.disk
            )));
        }
    }
    Ok(())
}

fn cmd_dilog(cfg: &Config, z: &str) -> Result<Outcome, Failure> {
    let zq = arg_rational(z)?;
    let zp = embed(&zq, cfg)?;
    let v = dilog_to_order(&zp, cfg.m)?;
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "z": zq.to_string(),
        "value": to_json(&v),
    });
    Ok(Outcome::ok(json, format!("Li2({zq}) = {v}")))
}

fn cmd_plog(cfg: &Config, x: &str) -> Result<Outcome, Failure> {
    let xq = arg_rational(x)?;
    let xp = embed(&xq, cfg)?;
    let v = plog(&xp)?;
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "x": xq.to_string(),
        "value": to_json(&v),
    });
    Ok(Outcome::ok(json, format!("log({xq}) = {v}")))
}

fn render_decomposition(d: &Decomposition) -> String {
    let mut lines = Vec::new();
    if let Some((q, qp)) = d.pair {
        lines.push(format!("{q} (x) {qp} ="));
    }
    for (u, v, s) in &d.symmetric {
        lines.push(format!("  {s} · ({u} (x) {v} + {v} (x) {u})"));
    }
    let one = Rational::from_integer(1.into());
    for (t, c) in &d.steinberg {
        lines.push(format!("  {c} · ({t} (x) {})", &one - t));
    }
    if d.symmetric.is_empty() && d.steinberg.is_empty() {
        lines.push("  0".to_string());
    }
    lines.join("\n")
}

fn cmd_decompose(q: u64, q_prime: u64) -> Result<Outcome, Failure> {
    let d = decompose(q, q_prime)?;
    Ok(Outcome::ok(to_json(&d), render_decomposition(&d)))
}

fn cmd_coeff(cfg: &Config, q: u64, q_prime: u64) -> Result<Outcome, Failure> {
    let d = decompose(q, q_prime)?;
    let v = evaluate_decomposition(&d, cfg.p, cfg.n)?;
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "q": q,
        "q_prime": q_prime,
        "value": to_json(&v),
    });
    Ok(Outcome::ok(json, format!("h({q} (x) {q_prime}) = {v}")))
}

fn cmd_table(cfg: &Config) -> Result<Outcome, Failure> {
    let s = cfg
        .s
        .clone()
        .ok_or_else(|| Failure::Usage("table requires a prime set: -S q1,..,qs".to_string()))?;
    let table = CoefficientTable::new(&s, cfg.p, cfg.n)?;
    let mut lines = vec![format!(
        "S = {{{}}}, p = {}, N = {}",
        join(&s),
        cfg.p,
        cfg.n
    )];
    for (i, q) in table.primes().iter().enumerate() {
        lines.push(format!("  log {q} = {}", table.log_of_prime(i)));
    }
    for (i, q) in table.primes().iter().enumerate() {
        for (j, qp) in table.primes().iter().enumerate() {
            lines.push(format!("  h({q} (x) {qp}) = {}", table.entry(i, j)));
        }
    }
    Ok(Outcome::ok(to_json(&table), lines.join("\n")))
}

fn join(s: &[u64]) -> String {
    s.iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_unit_eq(cfg: &Config) -> Result<Outcome, Failure> {
    let f = build_unit_equation_function(cfg.p, cfg.n)?;
    let opts = solver_options(cfg);
    let mut finding = find_zeros(&f, &opts)?;
    let s = cfg.s.clone().unwrap_or_else(|| vec![2]);
    fill_verification(&mut finding.reports, &s);
    check_residuals(&f, &finding.reports, cfg)?;
    let mut lines = vec![format!(
        "p = {}, N = {}: {} zero(s), {} irrational, {} unresolved",
        cfg.p, cfg.n, finding.total_zeros, finding.irrational, finding.unresolved
    )];
    for r in &finding.reports {
        lines.push(render_report(r));
    }
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "S": s,
        "finding": to_json(&finding),
    });
    Ok(Outcome::ok(json, lines.join("\n")))
}

/// The union of the prime factors of the four equation constants.
fn derive_s(values: [&Rational; 4]) -> Result<Vec<u64>, Failure> {
    let mut s = Vec::new();
    for v in values {
        let f = factor_symbol(v, DEFAULT_FACTOR_BOUND)?;
        for (q, _) in f.iter() {
            s.push(q);
        }
    }
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

fn cmd_exp_eq(cfg: &Config, a: &str, b: &str, c: &str, d: &str) -> Result<Outcome, Failure> {
    let a = arg_rational(a)?;
    let b = arg_rational(b)?;
    let c = arg_rational(c)?;
    let d = arg_rational(d)?;
    let s = match cfg.s.clone() {
        Some(s) => s,
        None => derive_s([&a, &b, &c, &d])?,
    };
    let table = CoefficientTable::new(&s, cfg.p, cfg.n)?;
    let f = build_exp_equation_function(&a, &b, &c, &d, &table)?;
    let opts = solver_options(cfg);
    let mut report = solve_exp_equation(&a, &b, &c, &d, &table, &opts)?;
    fill_verification(&mut report.reports, &s);
    check_residuals(&f, &report.reports, cfg)?;
    let mut lines = vec![
        format!(
            "({a})·({b})^x + ({c})·({d})^y = 1 over S = {{{}}}, p = {}, N = {}",
            join(&s),
            cfg.p,
            cfg.n
        ),
        format!(
            "{} zero(s); {} certified non-solution(s); at most {} solution(s)",
            report.zero_count, report.certified_non_solutions, report.bound
        ),
    ];
    if report.solutions.is_empty() {
        lines.push("no verified solutions".to_string());
    } else {
        let sols = report
            .solutions
            .iter()
            .map(|(x, y)| format!("(x, y) = ({x}, {y})"))
            .collect::<Vec<_>>()
            .join(", ");
        lines.push(format!("verified solutions: {sols}"));
    }
    for r in &report.reports {
        lines.push(render_report(r));
    }
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "S": s,
        "equation": {
            "a": a.to_string(),
            "b": b.to_string(),
            "c": c.to_string(),
            "d": d.to_string(),
        },
        "report": to_json(&report),
    });
    Ok(Outcome::ok(json, lines.join("\n")))
}

fn cmd_albanese(cfg: &Config, z: &str) -> Result<Outcome, Failure> {
    let zq = arg_rational(z)?;
    let zp = embed(&zq, cfg)?;
    let h = albanese(&zp)?;
    let json = json!({
        "p": cfg.p,
        "N": cfg.n,
        "z": zq.to_string(),
        "x1": to_json(&h.x1),
        "x2": to_json(&h.x2),
        "x3": to_json(&h.x3),
    });
    let human = format!(
        "alb({zq}) =\n  x1 = {}\n  x2 = {}\n  x3 = {}",
        h.x1, h.x2, h.x3
    );
    Ok(Outcome::ok(json, human))
}

fn selftest_outcome(report: &SelftestReport) -> Outcome {
    let mut lines = Vec::new();
    let mut failed = 0usize;
    for c in &report.checks {
        if c.ok {
            lines.push(format!("ok   {}", c.name));
        } else {
            failed += 1;
            lines.push(format!(
                "FAIL {}: {}",
                c.name,
                c.detail.as_deref().unwrap_or("no detail")
            ));
        }
    }
    if failed == 0 {
        lines.push(format!(
            "all {} batteries passed (seed {})",
            report.checks.len(),
            report.seed
        ));
    } else {
        lines.push(format!(
            "{failed} of {} batteries FAILED (seed {})",
            report.checks.len(),
            report.seed
        ));
    }
    Outcome {
        json: to_json(report),
        human: lines.join("\n"),
        code: if failed == 0 { EXIT_OK } else { EXIT_SELFTEST },
    }
}

fn cmd_selftest(cfg: &Config) -> Result<Outcome, Failure> {
    Ok(selftest_outcome(&run_selftest(cfg.seed)))
}

fn dispatch(cli: &Cli, cfg: &Config) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Dilog { z } => cmd_dilog(cfg, z),
        Command::Plog { x } => cmd_plog(cfg, x),
        Command::Decompose { q, q_prime } => cmd_decompose(*q, *q_prime),
        Command::Coeff { q, q_prime } => cmd_coeff(cfg, *q, *q_prime),
        Command::Table => cmd_table(cfg),
        Command::UnitEq => cmd_unit_eq(cfg),
        Command::ExpEq { a, b, c, d } => cmd_exp_eq(cfg, a, b, c, d),
        Command::Albanese { z } => cmd_albanese(cfg, z),
        Command::Selftest => cmd_selftest(cfg),
    }
}

/// Parses `args` (including the program name), runs the subcommand, and
/// writes the result; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli, &cfg) {
        Ok(outcome) => {
            let rendered = match cfg.format {
                Format::Json => {
                    serde_json::to_string_pretty(&outcome.json).expect("JSON values render")
                }
                Format::Human => outcome.human,
            };
            let _ = writeln!(out, "{rendered}");
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_COMPUTE
        }
    }
}
