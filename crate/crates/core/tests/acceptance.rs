//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use poincare_halfmap::quadrature::{self, MAX_EVALUATIONS};
use poincare_halfmap::*;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn lp(a: f64, t: f64, d: f64) -> LienardParams {
    LienardParams::new(a, t, d).unwrap()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail.push_str(&format!("; {:.3} s", elapsed.as_secs_f64()));
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail.push_str(&format!(" exceeds {:.1} s", limit.as_secs_f64()));
        }
    }
    o
}

fn harmonic_center() -> Outcome {
    let p = lp(0.0, 0.0, 1.0);
    let mut worst: f64 = 0.0;
    for y0 in [0.0, 0.5, 1.0, 3.0] {
        match left_halfmap(&p, y0) {
            Ok(r) => worst = worst.max((r.image + y0).abs()).max((r.tau - PI).abs()),
            Err(e) => return outcome(false, format!("y0 = {y0}: {e}")),
        }
    }
    outcome(worst <= 1e-12, format!("max error {worst:.2e} (tol 1e-12)"))
}

fn s1_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in [0.5, 1.0, 4.0] {
        let bound = 2.0 * f64::sqrt(d);
        for k in -4..=4 {
            let t = bound * k as f64 / 5.0;
            let p = lp(0.0, t, d);
            let root = (4.0 * d - t * t).sqrt();
            let tau = 2.0 * PI / root;
            for y0 in [0.1, 1.0, 3.0] {
                let y1 = -y0 * (PI * t / root).exp();
                match left_halfmap(&p, y0) {
                    Ok(r) => {
                        worst = worst.max(((r.image - y1) / y1).abs()).max(((r.tau - tau) / tau).abs());
                        cases += 1;
                    }
                    Err(e) => return outcome(false, format!("{p}, y0 = {y0}: {e}")),
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("{cases} cases, max relative error {worst:.2e} (tol 1e-12)"))
}

struct SweepRow {
    p: LienardParams,
    y0: f64,
    y1: f64,
    tau: f64,
}

/// Starting points of the oracle sweep, clipped to the domain.
fn sweep_points(p: &LienardParams) -> Vec<f64> {
    let class = p.classify().unwrap();
    let mut out = Vec::new();
    for y0 in [0.1, 1.0, 5.0] {
        let mut y: f64 = y0;
        if let Some(upper) = class.interval.and_then(|i| i.upper) {
            y = y.min(0.9 * upper);
        }
        if p.a < 0.0 && p.t < 0.0 {
            let hat = boundary_point(p).unwrap();
            y = y.max(hat + 0.1 * (1.0 + hat));
        }
        out.push(y);
    }
    out
}

fn oracle_sweep(rows: &mut Vec<SweepRow>) -> Outcome {
    let grid = [-1.0, -0.3, 0.0, 0.3, 1.0];
    let mut worst_y: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    let mut failures = Vec::new();
    for a in grid {
        for t in grid {
            for d in [-1.0, 0.0, 0.5, 1.0, 4.0] {
                let p = lp(a, t, d);
                match p.classify() {
                    Ok(c) if c.admits_half_map() => {}
                    _ => continue,
                }
                for y0 in sweep_points(&p) {
                    let solved = left_halfmap(&p, y0);
                    let oracle = oracle_left_halfmap(&p, y0, 1e-12);
                    match (solved, oracle) {
                        (Ok(s), Ok(o)) => {
                            let ey = (s.image - o.y1).abs() / (1.0 + s.image.abs());
                            let et = (s.tau - o.tau).abs() / (1.0 + s.tau);
                            worst_y = worst_y.max(ey);
                            worst_t = worst_t.max(et);
                            if ey > 1e-7 || et > 1e-7 {
                                failures.push(format!("{p} y0 = {y0}: dy {ey:.1e}, dtau {et:.1e}"));
                            }
                            rows.push(SweepRow { p, y0, y1: s.image, tau: s.tau });
                        }
                        (s, o) => failures.push(format!("{p} y0 = {y0}: solver {:?}, oracle {:?}", s.err(), o.err())),
                    }
                }
            }
        }
    }
    let n = rows.len() + failures.len();
    let pass = failures.is_empty() && n >= 200;
    let mut detail = format!("{n} combinations, max scaled |dy1| {worst_y:.2e}, |dtau| {worst_t:.2e} (tol 1e-7)");
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; {} failures, first: {f}", failures.len()));
    }
    outcome(pass, detail)
}

fn v_ratio(rows: &[SweepRow]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in rows {
        let lhs = r.p.v_on_section(r.y1);
        let rhs = (r.p.t * r.tau).exp() * r.p.v_on_section(r.y0);
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    outcome(
        !rows.is_empty() && worst <= 1e-9,
        format!("{} rows, max relative error {worst:.2e} (tol 1e-9)", rows.len()),
    )
}

fn loop_constants() -> Outcome {
    let s0 = [((1.0, 0.5, 1.0), 2.0), ((1.0, 0.0, -1.0), 0.5), ((1.0, -0.3, 4.0), 1.0)];
    let s2 = [((-1.0, 0.5, 1.0), 1.0), ((-1.0, -0.3, 1.0), 5.0), ((-0.3, 1.0, 4.0), 1.0)];
    let mut worst: f64 = 0.0;
    for (k, ((a, t, d), y0)) in s0.into_iter().chain(s2).enumerate() {
        let p = lp(a, t, d);
        let expected = if k < 3 { 0.0 } else { 2.0 * PI * t / (d * (4.0 * d - t * t).sqrt()) };
        match gamma_loop_check(&p, y0) {
            Ok(v) => worst = worst.max((v - expected).abs()),
            Err(e) => return outcome(false, format!("{p}, y0 = {y0}: {e}")),
        }
    }
    outcome(worst <= 1e-6, format!("3 S0 + 3 S2 loops, max error {worst:.2e} (tol 1e-6)"))
}

fn sample(runner: &mut TestRunner, s: impl Strategy<Value = f64>) -> f64 {
    s.new_tree(runner).unwrap().current()
}

/// Sum of the absolute values of the monomials of `∇V·L` and `TV`: the
/// natural scale for the rounding error of `∇V·L - TV`.
fn invariance_scale(p: &LienardParams, x: f64, y: f64) -> f64 {
    let (a, t, d) = (p.a.abs(), p.t.abs(), p.d.abs());
    let (x, y) = (x.abs(), y.abs());
    let gx = 2.0 * d * d * x + d * t * y + a * (t * t + 2.0 * d);
    let gy = d * t * x + 2.0 * d * y + a * t;
    let v = d * d * x * x + d * t * x * y + d * y * y + a * (t * t + 2.0 * d) * x + a * t * y + a * a;
    gx * (t * x + y) + gy * (d * x + a) + t * v
}

fn analytic_identities() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let cases = [
        lp(1.0, 0.5, 1.0),
        lp(-1.0, 0.5, 1.0),
        lp(1.0, 0.0, -1.0),
        lp(0.3, -1.0, 0.5),
        lp(-0.5, 1.5, 2.0),
        lp(2.0, 1.0, 0.0),
    ];
    let mut anti: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    let mut quad: f64 = 0.0;
    for p in &cases {
        let class = p.classify().unwrap();
        let iv = class.interval.unwrap();
        let lo = iv.lower.map_or(-4.0, |l| 0.9 * l);
        let hi = iv.upper.map_or(4.0, |u| 0.9 * u);
        for _ in 0..20 {
            let y1 = sample(&mut runner, lo..hi);
            let y0 = sample(&mut runner, lo..hi);
            let f = index_f(p, y1, y0).unwrap();
            anti = anti.max((f + index_f(p, y0, y1).unwrap()).abs());
            let h = 1e-5 * (1.0 + y1.abs());
            let fd = (index_f(p, y1 + h, y0).unwrap() - index_f(p, y1 - h, y0).unwrap()) / (2.0 * h);
            let exact = y1 / p.v_on_section(y1);
            deriv = deriv.max((fd - exact).abs() / exact.abs().max(1e-3));
            quad = quad.max((quadrature_f(p, y1, y0, 1e-13).unwrap() - f).abs());
        }
    }
    let mut invariance: f64 = 0.0;
    let mut charpoly: f64 = 0.0;
    for _ in 0..1000 {
        let p = lp(sample(&mut runner, -3.0..3.0), sample(&mut runner, -3.0..3.0), sample(&mut runner, -3.0..3.0));
        let (x, y) = (sample(&mut runner, -10.0..10.0), sample(&mut runner, -10.0..10.0));
        let [gx, gy] = p.grad_v(x, y);
        let [fx, fy] = p.field(x, y);
        let lhs = gx * fx + gy * fy;
        let rhs = p.t * p.v(x, y);
        let scale = invariance_scale(&p, x, y) + f64::MIN_POSITIVE;
        invariance = invariance.max((lhs - rhs).abs() / scale);
        if y != 0.0 {
            let v = p.v_on_section(y);
            charpoly = charpoly.max((y * y * p.char_poly(p.a / y) - v).abs() / v.abs().max(f64::MIN_POSITIVE));
        }
    }
    let pass = anti == 0.0 && deriv <= 1e-6 && quad <= 1e-10 && invariance <= 1e-12 && charpoly <= 1e-12;
    outcome(
        pass,
        format!(
            "antisymmetry {anti:.1e}, dF/dy1 {deriv:.1e} (1e-6), quadrature {quad:.1e} (1e-10), \
             grad V . L - TV {invariance:.1e} (1e-12), char. poly {charpoly:.1e} (1e-12)"
        ),
    )
}

fn t_zero_flight_time() -> Outcome {
    let (a, d) = (1.0, 1.0);
    let p = lp(a, 0.0, d);
    let mut worst: f64 = 0.0;
    for y0 in [0.5, 1.0, 2.0] {
        let tau = match left_halfmap(&p, y0) {
            Ok(r) => r.tau,
            Err(e) => return outcome(false, format!("y0 = {y0}: {e}")),
        };
        let integrand = |y: f64| -1.0 / (a * a + d * y0 * y0 - d * y * y).sqrt();
        match quadrature::integrate(integrand, y0, -y0, 1e-11, MAX_EVALUATIONS) {
            Ok(q) => worst = worst.max((q.value - tau).abs()),
            Err(e) => return outcome(false, format!("quadrature at y0 = {y0}: {e}")),
        }
    }
    outcome(worst <= 1e-8, format!("max difference {worst:.2e} (tol 1e-8)"))
}

fn pwl() -> Outcome {
    let sys = |l: (f64, f64, f64), r: (f64, f64, f64)| PwlSystem::new(lp(l.0, l.1, l.2), lp(r.0, r.1, r.2)).unwrap();
    for (name, s) in [
        ("harmonic pair", sys((0.0, 0.0, 1.0), (0.0, 0.0, 1.0))),
        ("cancelling pair", sys((0.0, 0.3, 1.0), (0.0, -0.3, 1.0))),
    ] {
        match find_limit_cycles(&s, 10.0, 32) {
            Ok(r) if r.degenerate_continuum => {}
            Ok(_) => return outcome(false, format!("{name}: continuum not detected")),
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    let mut detail = String::from("continua detected");
    let mut worst_res: f64 = 0.0;
    let mut worst_closure: f64 = 0.0;
    for (l, r) in [((1.0, 0.5, 1.0), (-1.0, -0.8, 2.0)), ((-1.0, -0.2, 1.0), (-1.0, 0.5, 1.0))] {
        let s = sys(l, r);
        let report = match find_limit_cycles(&s, 20.0, 64) {
            Ok(rep) => rep,
            Err(e) => return outcome(false, format!("{l:?}/{r:?}: {e}")),
        };
        for c in &report.cycles {
            let [rl, rr] = s.zone_residuals(c.y0, c.y1).unwrap();
            worst_res = worst_res.max(rl).max(rr);
            match oracle::oracle_two_zone_flow(&s.left, &s.right, c.y0, c.period, 1e-12) {
                Ok(end) => worst_closure = worst_closure.max(end[0].abs().max((end[1] - c.y0).abs()) / (1.0 + c.y0)),
                Err(e) => return outcome(false, format!("closure at y0 = {}: {e}", c.y0)),
            }
        }
        detail.push_str(&format!("; {l:?}/{r:?}: {} cycle(s)", report.cycles.len()));
    }
    detail.push_str(&format!("; max residual {worst_res:.1e} (1e-10), closure {worst_closure:.1e} (1e-8)"));
    outcome(worst_res <= 1e-10 && worst_closure <= 1e-8, detail)
}

fn cli_determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["classify", "-a", "0", "-T", "1", "-D", "1", "--format", "json"],
        &["classify", "-a", "1", "-T", "0", "-D", "-1"],
        &["halfmap", "-a", "0", "-T", "0", "-D", "1", "--y0", "3"],
        &["halfmap", "-a", "1", "-T", "0.5", "-D", "1", "--y0", "2", "--format", "json"],
        &["scan", "-a", "0", "-T", "0", "-D", "1", "--from", "0", "--to", "2", "-n", "3"],
        &["scan", "-a", "-1", "-T", "-0.5", "-D", "1", "--from", "0", "--to", "6", "-n", "4", "--format", "json"],
        &["scan", "-a", "1", "-T", "0.5", "-D", "1", "--from", "0", "--to", "2", "-n", "5"],
        &["limit-cycle", "--left", "-1,-0.2,1", "--right", "-1,0.5,1", "--format", "json"],
        &["limit-cycle", "--left", "0,0,1", "--right", "0,0,1"],
        &["verify", "-a", "1", "-T", "0.5", "-D", "1", "--y0", "2"],
    ];
    let exe = env!("CARGO_BIN_EXE_halfmap");
    for args in commands {
        let run = || Command::new(exe).args(*args).env_remove("HALFMAP_TOL").output().unwrap();
        let (first, second) = (run(), run());
        if !first.status.success() {
            return outcome(false, format!("{args:?} exited with {:?}", first.status.code()));
        }
        if first.stdout != second.stdout {
            return outcome(false, format!("{args:?} produced different output"));
        }
    }
    outcome(true, format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() -> ExitCode {
    let mut rows = Vec::new();
    let results = [
        ("1 harmonic-center exactness", timed(Some(Duration::from_millis(100)), harmonic_center)),
        ("2 S1 closed-form map", timed(Some(Duration::from_millis(500)), s1_closed_form)),
        ("3 oracle sweep", timed(Some(Duration::from_secs(10)), || oracle_sweep(&mut rows))),
        ("4 V-ratio law", timed(None, || v_ratio(&rows))),
        ("5 loop-integral constants", timed(None, loop_constants)),
        ("6 analytic identities", timed(None, analytic_identities)),
        ("7 T = 0 flight-time equivalence", timed(None, t_zero_flight_time)),
        ("8 piecewise-linear cycles", timed(Some(Duration::from_secs(5)), pwl)),
        ("9 CLI determinism", timed(None, cli_determinism)),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
