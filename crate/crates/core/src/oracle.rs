//! Direct integration of the flow, used to check the half-map solver.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with the standard
//! fourth-order continuous extension. Crossings of `x = 0` are bracketed at
//! accepted steps, located by bisection on the dense output and then
//! polished with Newton steps on re-integrated states. Nothing here uses the
//! eigenstructure of the system or the index-like function.

use crate::error::{Error, Result};
use crate::integrals::line_integral_g;
use crate::lienard::{LienardParams, Scenario};

/// Orbits leaving this box are reported as not returning.
pub const BOX_LIMIT: f64 = 1e9;
/// Integration horizon.
pub const T_MAX: f64 = 1e4;
const MAX_STEPS: usize = 5_000_000;
/// Dense-output points recorded inside each accepted step.
const DENSE_POINTS_PER_STEP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitResult {
    /// `y` at the return to `x = 0`.
    pub y1: f64,
    /// Time of the return.
    pub tau: f64,
    /// Most negative `x` seen (most positive for a right excursion).
    pub min_x: f64,
    pub steps: usize,
    /// `|x|` at the located crossing.
    pub event_residual: f64,
}

/// Half-plane in which an excursion takes place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Where to stop integrating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// First return to `x = 0` after entering the given half-plane.
    Section(Side),
    /// At a fixed elapsed time, ignoring crossings.
    Time(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Excursion {
    pub end: [f64; 2],
    pub time: f64,
    /// Extreme `x` towards the excursion side (minimum for left).
    pub extreme_x: f64,
    pub steps: usize,
    pub event_residual: f64,
    /// `(t, point)` samples, starting at the initial point and ending at `end`.
    pub trajectory: Trajectory,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State = [f64; 2];

fn axpy(y: State, terms: &[(f64, State)]) -> State {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += c * k[0];
        out[1] += c * k[1];
    }
    out
}

struct Step {
    y: State,
    k7: State,
    err: State,
    dense: [State; 5],
}

fn dopri_step<F: Fn(State) -> State>(f: &F, y: State, k1: State, h: f64) -> Step {
    let k2 = f(axpy(y, &[(h * A21, k1)]));
    let k3 = f(axpy(y, &[(h * A31, k1), (h * A32, k2)]));
    let k4 = f(axpy(y, &[(h * A41, k1), (h * A42, k2), (h * A43, k3)]));
    let k5 = f(axpy(y, &[(h * A51, k1), (h * A52, k2), (h * A53, k3), (h * A54, k4)]));
    let k6 = f(axpy(y, &[(h * A61, k1), (h * A62, k2), (h * A63, k3), (h * A64, k4), (h * A65, k5)]));
    let y_new = axpy(y, &[(h * A71, k1), (h * A73, k3), (h * A74, k4), (h * A75, k5), (h * A76, k6)]);
    let k7 = f(y_new);
    let err = axpy([0.0; 2], &[(h * E1, k1), (h * E3, k3), (h * E4, k4), (h * E5, k5), (h * E6, k6), (h * E7, k7)]);
    let diff = [y_new[0] - y[0], y_new[1] - y[1]];
    let bspl = [h * k1[0] - diff[0], h * k1[1] - diff[1]];
    let r4 = [diff[0] - h * k7[0] - bspl[0], diff[1] - h * k7[1] - bspl[1]];
    let r5 = axpy([0.0; 2], &[(h * D1, k1), (h * D3, k3), (h * D4, k4), (h * D5, k5), (h * D6, k6), (h * D7, k7)]);
    Step { y: y_new, k7, err, dense: [y, diff, bspl, r4, r5] }
}

/// Continuous extension at `theta ∈ [0, 1]` of the step.
fn dense_at(d: &[State; 5], theta: f64) -> State {
    let s1 = 1.0 - theta;
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = d[0][i] + theta * (d[1][i] + s1 * (d[2][i] + theta * (d[3][i] + s1 * d[4][i])));
    }
    out
}

fn error_norm(err: State, y: State, y_new: State, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

/// Integrates `field` from `start` until `stop`.
///
/// For [`Stop::Section`] the crossing is accepted only after the orbit has
/// been strictly inside the requested half-plane at an accepted step, which
/// discards the trivial crossing at `t = 0`.
pub fn integrate<F: Fn(State) -> State>(field: F, start: State, stop: Stop, rtol: f64) -> Result<Excursion> {
    if !(rtol > 0.0 && rtol < 1.0) {
        return Err(Error::InvalidArgument(format!("rtol must lie in (0, 1), got {rtol}")));
    }
    let scale = 1.0 + start[0].abs().max(start[1].abs());
    let atol = rtol * scale * 1e-3;
    let event_tol = 1e-12 * scale;
    let side_sign = match stop {
        Stop::Section(side) => side.sign(),
        Stop::Time(_) => -1.0,
    };
    let t_end = match stop {
        Stop::Time(t) if t >= 0.0 && t.is_finite() => t,
        Stop::Time(t) => return Err(Error::InvalidArgument(format!("stop time must be finite and >= 0, got {t}"))),
        Stop::Section(_) => T_MAX,
    };

    let mut t = 0.0;
    let mut y = start;
    let mut k1 = field(y);
    let speed = k1[0].abs().max(k1[1].abs());
    let mut h = (0.01 * rtol.powf(0.2) * scale / speed.max(1e-300)).clamp(1e-10, 0.01);
    let mut extreme = start[0];
    let mut entered = false;
    let mut steps = 0;
    let mut trajectory = vec![(0.0, start)];

    if t_end == 0.0 {
        return Ok(Excursion { end: start, time: 0.0, extreme_x: extreme, steps, event_residual: 0.0, trajectory });
    }

    loop {
        if steps >= MAX_STEPS {
            return Err(Error::NoReturn { reason: "step budget exhausted" });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let step = dopri_step(&field, y, k1, h);
        let err = error_norm(step.err, y, step.y, rtol, atol);
        if !(err <= 1.0) {
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            h *= factor;
            if h < 1e-14 * (1.0 + t) {
                return Err(Error::NoReturn { reason: "step size underflow" });
            }
            continue;
        }
        steps += 1;

        let inside_new = side_sign * step.y[0] > 0.0;
        if let Stop::Section(_) = stop {
            if entered && !inside_new {
                // Crossing inside this step.
                let (theta, _) = locate_crossing(&step.dense, event_tol)?;
                let (end, dt) = polish_crossing(&field, y, k1, theta * h, event_tol);
                let time = t + dt;
                for k in 1..=DENSE_POINTS_PER_STEP {
                    let th = theta * k as f64 / (DENSE_POINTS_PER_STEP + 1) as f64;
                    let pt = dense_at(&step.dense, th);
                    extreme = extreme_of(extreme, pt[0], side_sign);
                    trajectory.push((t + th * h, pt));
                }
                trajectory.push((time, end));
                return Ok(Excursion {
                    end,
                    time,
                    extreme_x: extreme,
                    steps,
                    event_residual: end[0].abs(),
                    trajectory,
                });
            }
        }
        for k in 1..=DENSE_POINTS_PER_STEP {
            let th = k as f64 / (DENSE_POINTS_PER_STEP + 1) as f64;
            let pt = dense_at(&step.dense, th);
            extreme = extreme_of(extreme, pt[0], side_sign);
            trajectory.push((t + th * h, pt));
        }
        t += h;
        y = step.y;
        k1 = step.k7;
        extreme = extreme_of(extreme, y[0], side_sign);
        trajectory.push((t, y));
        entered |= inside_new;

        if y[0].abs() > BOX_LIMIT || y[1].abs() > BOX_LIMIT {
            return Err(Error::NoReturn { reason: "orbit left the bounding box" });
        }
        if last {
            return match stop {
                Stop::Time(_) => {
                    Ok(Excursion { end: y, time: t, extreme_x: extreme, steps, event_residual: 0.0, trajectory })
                }
                Stop::Section(_) => Err(Error::NoReturn { reason: "time horizon exceeded" }),
            };
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
}

fn extreme_of(current: f64, x: f64, side_sign: f64) -> f64 {
    if side_sign * x > side_sign * current {
        x
    } else {
        current
    }
}

/// Bisection on the dense output for the sign change of `x` in `[0, 1]`.
fn locate_crossing(dense: &[State; 5], tol: f64) -> Result<(f64, f64)> {
    let x_at = |th: f64| dense_at(dense, th)[0];
    let (mut lo, mut hi) = (0.0, 1.0);
    let (x_lo, x_hi) = (x_at(lo), x_at(hi));
    if x_lo == 0.0 {
        return Ok((0.0, 0.0));
    }
    if x_lo.signum() == x_hi.signum() && x_hi != 0.0 {
        return Err(Error::EventMissed);
    }
    let sign_lo = x_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let xm = x_at(mid);
        if xm.abs() <= tol * 1e-2 || mid == lo || mid == hi {
            return Ok((mid, xm));
        }
        if xm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, x_at(mid)))
}

/// Re-integrates from the step start to the located time and corrects the
/// time with Newton steps on `x`, using `x' = field_x`.
fn polish_crossing<F: Fn(State) -> State>(f: &F, y: State, k1: State, dt: f64, tol: f64) -> (State, f64) {
    let mut dt = dt;
    let mut state = dopri_step(f, y, k1, dt).y;
    for _ in 0..4 {
        if state[0].abs() <= 1e-3 * tol {
            break;
        }
        let xdot = f(state)[0];
        if xdot == 0.0 {
            break;
        }
        let next_dt = dt - state[0] / xdot;
        let next = dopri_step(f, y, k1, next_dt).y;
        if next[0].abs() >= state[0].abs() {
            break;
        }
        dt = next_dt;
        state = next;
    }
    (state, dt)
}

/// Dense samples `(t, [x, y])` of an orbit.
pub type Trajectory = Vec<(f64, [f64; 2])>;

/// Left excursion of the Liénard flow from `(0, y0)` with its recorded
/// trajectory.
pub fn trace_left_excursion(p: &LienardParams, y0: f64, rtol: f64) -> Result<(OrbitResult, Trajectory)> {
    if !(y0 >= 0.0) || !y0.is_finite() {
        return Err(Error::OutOfDomain { y: y0, reason: "y0 must be finite and non-negative" });
    }
    if y0 == 0.0 {
        if p.a > 0.0 {
            // The orbit through the origin stays in x >= 0: degenerate
            // excursion of zero length.
            let result = OrbitResult { y1: 0.0, tau: 0.0, min_x: 0.0, steps: 0, event_residual: 0.0 };
            return Ok((result, vec![(0.0, [0.0, 0.0])]));
        }
        if p.a == 0.0 {
            return Err(Error::NoReturn { reason: "the start point is an equilibrium" });
        }
    }
    let field = |s: State| p.field(s[0], s[1]);
    let exc = integrate(field, [0.0, y0], Stop::Section(Side::Left), rtol)?;
    let result = OrbitResult {
        y1: exc.end[1],
        tau: exc.time,
        min_x: exc.extreme_x,
        steps: exc.steps,
        event_residual: exc.event_residual,
    };
    Ok((result, exc.trajectory))
}

/// Integrates `x' = Tx - y, y' = Dx - a` from `(0, y0)` to its first return
/// to `x = 0` from the left half-plane.
pub fn oracle_left_halfmap(p: &LienardParams, y0: f64, rtol: f64) -> Result<OrbitResult> {
    trace_left_excursion(p, y0, rtol).map(|(r, _)| r)
}

/// Mirror-free right excursion: integrates the field itself from `(0, y1)`,
/// `y1 ≤ 0`, until it returns to `x = 0` from the right half-plane.
pub fn oracle_right_halfmap(p: &LienardParams, y1: f64, rtol: f64) -> Result<OrbitResult> {
    if !(y1 < 0.0) || !y1.is_finite() {
        return Err(Error::OutOfDomain { y: y1, reason: "y1 must be finite and negative" });
    }
    let field = |s: State| p.field(s[0], s[1]);
    let exc = integrate(field, [0.0, y1], Stop::Section(Side::Right), rtol)?;
    Ok(OrbitResult {
        y1: exc.end[1],
        tau: exc.time,
        min_x: exc.extreme_x,
        steps: exc.steps,
        event_residual: exc.event_residual,
    })
}

/// Integral of the orthogonal field around the closed curve made of the
/// integrated left excursion from `(0, y0)` and the section segment back to
/// the start. Reproduces the loop constant `d_k` of the classification.
pub fn gamma_loop_check(p: &LienardParams, y0: f64) -> Result<f64> {
    let class = p.classify()?;
    match class.scenario {
        Scenario::S0 | Scenario::S2 => {}
        Scenario::S1 => {
            return Err(Error::InvalidArgument(
                "the loop check excludes a = 0: the equilibrium lies on the section".into(),
            ))
        }
        Scenario::NoHalfMap => return Err(Error::NoHalfMap { a: p.a, t: p.t, d: p.d }),
    }
    if !(y0 > 0.0) {
        return Err(Error::OutOfDomain { y: y0, reason: "the loop check needs y0 > 0" });
    }
    let (_, trajectory) = trace_left_excursion(p, y0, 1e-12)?;
    let mut path: Vec<[f64; 2]> = trajectory.into_iter().map(|(_, pt)| pt).collect();
    path.push([0.0, y0]);
    line_integral_g(p, &path)
}

/// Point reached after integrating the two-zone flow from `(0, y0)` for
/// `duration`: left field until the first return to `x = 0`, right field for
/// the remaining time.
pub fn oracle_two_zone_flow(
    left: &LienardParams,
    right: &LienardParams,
    y0: f64,
    duration: f64,
    rtol: f64,
) -> Result<[f64; 2]> {
    let left_field = |s: State| left.field(s[0], s[1]);
    let right_field = |s: State| right.field(s[0], s[1]);
    let first = integrate(left_field, [0.0, y0], Stop::Section(Side::Left), rtol)?;
    let remaining = duration - first.time;
    if remaining < 0.0 {
        return Err(Error::InvalidArgument("duration ends before the first return".into()));
    }
    Ok(integrate(right_field, first.end, Stop::Time(remaining), rtol)?.end)
}
