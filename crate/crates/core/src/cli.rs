//! Command-line front end of the `halfmap` binary.
//!
//! Every command writes a single report to stdout, either CSV with a fixed
//! header or a JSON object `{command, params, results, diagnostics}`. Numbers
//! are printed with 17 significant digits in exponent form so they survive a
//! round trip through any parser; non-finite values become the strings
//! `"inf"`, `"-inf"` or `"nan"`. Exit status is 0 on success, 1 when
//! `verify` finds a mismatch, 2 for domain and argument errors and 3 for
//! convergence failures.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::halfmap::{left_halfmap_with, map_derivative, HalfMapResult, SolverOptions};
use crate::lienard::{GeneralLinearSystem, LienardParams};
use crate::oracle::oracle_left_halfmap;
use crate::pwl::{find_limit_cycles, PwlSystem};

/// Solver-vs-oracle agreement required by `verify`.
pub const VERIFY_TOL: f64 = 1e-7;
const DEFAULT_RTOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "halfmap", version, about = "Poincaré half-maps of planar linear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Half-map solver tolerance (overrides HALFMAP_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Liénard parameters, or a general system to be reduced.
#[derive(Debug, Clone, clap::Args)]
pub struct SystemArgs {
    #[arg(short = 'a', allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(short = 'T', allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(short = 'D', allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// General system `x' = Mx + b` as "m11,m12,m21,m22,b1,b2".
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["a", "t", "d"])]
    pub system: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the system and print c, q = cT, the loop constant and the
    /// admissible interval.
    Classify {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Left half-map and flight time at one point.
    Halfmap {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
    },
    /// Left half-map over an evenly spaced range of y0.
    Scan {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(short = 'n', long, default_value_t = 11)]
        n: usize,
    },
    /// Crossing limit cycles of a two-zone system.
    LimitCycle {
        /// Left zone as "a,T,D".
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right zone as "a,T,D".
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value_t = 10.0)]
        y0_max: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Compare the solver with direct integration of the flow.
    Verify {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
        /// Relative tolerance of the integrator.
        #[arg(long, default_value_t = DEFAULT_RTOL)]
        rtol: f64,
    },
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_convergence() {
        3
    } else {
        2
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and messages to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut opts = SolverOptions::from_env();
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            let _ = writeln!(err, "error: --tol must be a positive finite number, got {tol}");
            return 2;
        }
        opts.tol = tol;
    }
    match dispatch(&cli, &opts) {
        Ok((report, status)) => {
            let text = match cli.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            let _ = out.write_all(text.as_bytes());
            for line in &report.messages {
                let _ = writeln!(err, "{line}");
            }
            status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let values: std::result::Result<Vec<f64>, _> = s.split(',').map(|v| v.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::InvalidArgument(format!("{what} must be {n} comma-separated numbers, got {s:?}"))),
    }
}

fn parse_zone(s: &str, what: &str) -> Result<LienardParams> {
    let v = parse_list(s, 3, what)?;
    LienardParams::new(v[0], v[1], v[2])
}

impl SystemArgs {
    fn params(&self) -> Result<LienardParams> {
        if let Some(s) = &self.system {
            let v = parse_list(s, 6, "--system")?;
            return GeneralLinearSystem::new([[v[0], v[1]], [v[2], v[3]]], [v[4], v[5]]).to_lienard();
        }
        match (self.a, self.t, self.d) {
            (Some(a), Some(t), Some(d)) => LienardParams::new(a, t, d),
            _ => Err(Error::InvalidArgument("give either -a, -T and -D, or --system".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num_value(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits, locale independent.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn num_value(x: f64) -> Value {
    if x.is_finite() {
        let n: Number = fmt_num(x).parse().expect("formatted float is a valid JSON number");
        Value::Number(n)
    } else {
        Value::String(fmt_num(x))
    }
}

struct Report {
    command: &'static str,
    params: Vec<(&'static str, Cell)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    diagnostics: Vec<(&'static str, Cell)>,
    /// Written to stderr in either format.
    messages: Vec<String>,
}

impl Report {
    fn new(command: &'static str, header: Vec<&'static str>) -> Self {
        Report { command, params: Vec::new(), header, rows: Vec::new(), diagnostics: Vec::new(), messages: Vec::new() }
    }

    fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> String {
        let object = |pairs: &[(&'static str, Cell)]| -> Value {
            Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.json())).collect())
        };
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.header.iter().zip(row).map(|(k, v)| (k.to_string(), v.json())).collect()))
            .collect();
        let mut diagnostics = match object(&self.diagnostics) {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        if !self.messages.is_empty() {
            diagnostics.insert("messages".into(), self.messages.iter().map(|m| Value::String(m.clone())).collect());
        }
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.into()));
        top.insert("params".into(), object(&self.params));
        top.insert("results".into(), Value::Array(results));
        top.insert("diagnostics".into(), Value::Object(diagnostics));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

fn lienard_params(p: &LienardParams) -> Vec<(&'static str, Cell)> {
    vec![("a", Cell::Num(p.a)), ("T", Cell::Num(p.t)), ("D", Cell::Num(p.d))]
}

/// One half-map row: `y1, tau, residual, derivative`.
fn halfmap_cells(p: &LienardParams, y0: f64, r: &HalfMapResult) -> Vec<Cell> {
    let derivative = if y0 > 0.0 && r.image < 0.0 { map_derivative(p, y0, r.image).ok() } else { None };
    vec![Cell::Num(r.image), Cell::Num(r.tau), Cell::Num(r.residual), Cell::opt(derivative)]
}

fn dispatch(cli: &Cli, opts: &SolverOptions) -> Result<(Report, i32)> {
    let mut status = 0;
    let report = match &cli.command {
        Command::Classify { sys } => {
            let p = sys.params()?;
            let c = p.classify()?;
            let mut r = Report::new("classify", vec!["scenario", "c", "q", "d", "interval_lower", "interval_upper"]);
            r.params = lienard_params(&p);
            let (lo, hi) = match c.interval {
                Some(i) => {
                    (Cell::Num(i.lower.unwrap_or(f64::NEG_INFINITY)), Cell::Num(i.upper.unwrap_or(f64::INFINITY)))
                }
                None => (Cell::Empty, Cell::Empty),
            };
            let num_or_empty = |v: f64| if c.admits_half_map() { Cell::Num(v) } else { Cell::Empty };
            r.rows.push(vec![
                Cell::Text(c.scenario.as_str().into()),
                num_or_empty(c.c),
                num_or_empty(c.q),
                num_or_empty(c.d),
                lo,
                hi,
            ]);
            r
        }
        Command::Halfmap { sys, y0 } => {
            let p = sys.params()?;
            let res = left_halfmap_with(&p, *y0, opts)?;
            let mut r = Report::new("halfmap", vec!["y0", "y1", "tau", "residual", "derivative", "boundary"]);
            r.params = lienard_params(&p);
            let mut row = vec![Cell::Num(*y0)];
            row.extend(halfmap_cells(&p, *y0, &res));
            row.push(Cell::Bool(res.boundary));
            r.rows.push(row);
            r.diagnostics = vec![("tol", Cell::Num(opts.tol)), ("iterations", Cell::Int(res.iterations))];
            r
        }
        Command::Scan { sys, from, to, n } => {
            let p = sys.params()?;
            scan_report(&p, *from, *to, *n, opts)?
        }
        Command::LimitCycle { left, right, y0_max, grid } => {
            let s = PwlSystem::new(parse_zone(left, "--left")?, parse_zone(right, "--right")?)?;
            let cycles = find_limit_cycles(&s, *y0_max, *grid)?;
            let mut r = Report::new("limit-cycle", vec!["y0", "y1", "period", "multiplier"]);
            r.params = vec![
                ("left", Cell::Text(left.trim().into())),
                ("right", Cell::Text(right.trim().into())),
                ("y0_max", Cell::Num(*y0_max)),
                ("grid", Cell::Int(*grid)),
            ];
            for c in &cycles.cycles {
                r.rows.push(vec![Cell::Num(c.y0), Cell::Num(c.y1), Cell::Num(c.period), Cell::Num(c.multiplier)]);
            }
            r.diagnostics = vec![("degenerate_continuum", Cell::Bool(cycles.degenerate_continuum))];
            if cycles.degenerate_continuum {
                r.messages.push("every scanned orbit is periodic (degenerate continuum)".into());
            }
            r.messages.extend(cycles.diagnostics);
            r
        }
        Command::Verify { sys, y0, rtol } => {
            let p = sys.params()?;
            let solved = left_halfmap_with(&p, *y0, opts)?;
            let oracle = oracle_left_halfmap(&p, *y0, *rtol)?;
            let dy = (solved.image - oracle.y1).abs();
            let dt = (solved.tau - oracle.tau).abs();
            let pass = dy <= VERIFY_TOL * (1.0 + solved.image.abs()) && dt <= VERIFY_TOL * (1.0 + solved.tau);
            let mut r = Report::new(
                "verify",
                vec!["y0", "y1_solver", "y1_oracle", "delta_y1", "tau_solver", "tau_oracle", "delta_tau", "pass"],
            );
            r.params = lienard_params(&p);
            r.rows.push(vec![
                Cell::Num(*y0),
                Cell::Num(solved.image),
                Cell::Num(oracle.y1),
                Cell::Num(dy),
                Cell::Num(solved.tau),
                Cell::Num(oracle.tau),
                Cell::Num(dt),
                Cell::Bool(pass),
            ]);
            r.diagnostics = vec![
                ("tol", Cell::Num(opts.tol)),
                ("rtol", Cell::Num(*rtol)),
                ("threshold", Cell::Num(VERIFY_TOL)),
                ("oracle_steps", Cell::Int(oracle.steps)),
            ];
            if !pass {
                r.messages.push(format!("solver and oracle disagree: delta_y1 = {dy:e}, delta_tau = {dt:e}"));
                status = 1;
            }
            r
        }
    };
    Ok((report, status))
}

fn scan_report(p: &LienardParams, lo: f64, hi: f64, n: usize, opts: &SolverOptions) -> Result<Report> {
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("scan needs 0 <= from < to, got [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("scan needs n >= 2, got {n}")));
    }
    p.classify()?;
    let mut r = Report::new("scan", vec!["y0", "y1", "tau", "residual", "derivative", "status"]);
    r.params = lienard_params(p);
    r.params.push(("from", Cell::Num(lo)));
    r.params.push(("to", Cell::Num(hi)));
    r.params.push(("n", Cell::Int(n)));
    let mut failed = 0;
    for i in 0..n {
        let y0 = if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut row = vec![Cell::Num(y0)];
        match left_halfmap_with(p, y0, opts) {
            Ok(res) => {
                row.extend(halfmap_cells(p, y0, &res));
                row.push(Cell::Text("ok".into()));
            }
            Err(e) => {
                failed += 1;
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                row.push(Cell::Text(e.kind().into()));
            }
        }
        r.rows.push(row);
    }
    r.diagnostics = vec![("tol", Cell::Num(opts.tol)), ("failed_rows", Cell::Int(failed))];
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["halfmap"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn number_format_round_trips() {
        for x in [std::f64::consts::PI, -3.0, 1e-300, 0.1 + 0.2, 0.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn classify_json() {
        let (code, out, _) = run_str(&["classify", "-a", "0", "-T", "1", "-D", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let row = &v["results"][0];
        assert_eq!(row["scenario"], "S1");
        let c: f64 = row["c"].to_string().parse().unwrap();
        assert!((c - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(row["interval_lower"], "-inf");
        assert_eq!(row["interval_upper"], "inf");
    }

    #[test]
    fn negative_arguments_parse() {
        let (code, out, err) = run_str(&["halfmap", "-a", "-1", "-T", "-0.5", "-D", "1", "--y0", "4"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("y0,y1,tau,residual,derivative,boundary\n"));
        let (code, _, err) = run_str(&["classify", "--system", "-1,1,-1,0,0,0"]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["halfmap", "-a", "0", "-T", "3", "-D", "1", "--y0", "1"]).0, 2);
        assert_eq!(run_str(&["halfmap", "-a", "1", "-T", "0", "-D", "-1", "--y0", "2"]).0, 2);
        assert_eq!(run_str(&["classify", "-a", "0", "-T", "1"]).0, 2);
        assert_eq!(run_str(&["classify", "--system", "1,0,0,1,0,0"]).0, 2);
        assert_eq!(run_str(&["bogus"]).0, 2);
        assert_eq!(run_str(&["halfmap", "-a", "0", "-T", "0", "-D", "1", "--y0", "1", "--tol", "-1"]).0, 2);
    }

    #[test]
    fn scan_flags_out_of_domain_rows() {
        // The domain starts at the preimage of the tangency point, about 3.5167.
        let (code, out, _) =
            run_str(&["scan", "-a", "-1", "-T", "-0.5", "-D", "1", "--from", "0", "--to", "3", "-n", "4"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1..].iter().all(|l| l.ends_with(",,,,OutOfDomain")), "{out}");
        let (_, out, _) =
            run_str(&["scan", "-a", "-1", "-T", "-0.5", "-D", "1", "--from", "0", "--to", "6", "-n", "4"]);
        let status: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        assert_eq!(status, ["OutOfDomain", "OutOfDomain", "ok", "ok"]);
    }

    #[test]
    fn verify_passes() {
        let (code, out, err) = run_str(&["verify", "-a", "1", "-T", "0.5", "-D", "1", "--y0", "2", "--format", "json"]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"][0]["pass"], true);
    }

    #[test]
    fn limit_cycle_reports_continuum() {
        let (code, out, _) = run_str(&["limit-cycle", "--left", "0,0,1", "--right", "0,0,1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["diagnostics"]["degenerate_continuum"], true);
        assert_eq!(v["results"].as_array().unwrap().len(), 0);
    }
}
