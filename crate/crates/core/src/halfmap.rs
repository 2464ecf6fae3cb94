//! Left and right Poincaré half-maps on `x = 0` as level curves of the
//! index-like function.
//!
//! For `y0 ≥ 0` the left image is the unique `y1 ∈ (μ1, 0]` with
//! `F(y1, y0) = cT`. `F(·, y0)` is strictly decreasing on `(μ1, 0)` and
//! diverges to `+∞` at `μ1`, so the root is bracketed by expanding towards
//! `μ1`, narrowed by bisection and polished with Newton steps using the
//! exact partial derivative `y1 / V(0, y1)`.

use crate::error::{Error, Result};
use crate::integrals::{a_integral, index_f};
use crate::lienard::{Classification, LienardParams, Scenario};

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection stops once the bracket is narrower than `tol · (1 + |y1|)`.
    pub tol: f64,
    /// Cap on bracket expansions plus bisection steps.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iterations: 4000 }
    }
}

impl SolverOptions {
    /// Default options with `tol` replaced by `HALFMAP_TOL` when that
    /// variable holds a positive number.
    pub fn from_env() -> Self {
        let mut opts = Self::default();
        if let Some(tol) = std::env::var("HALFMAP_TOL").ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if tol > 0.0 && tol.is_finite() {
                opts.tol = tol;
            }
        }
        opts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfMapResult {
    /// `y1 ≤ 0` for the left map, `y0 ≥ 0` for the right map.
    pub image: f64,
    /// Flight time.
    pub tau: f64,
    /// `|F(y1, y0) - cT|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    /// The image sits on the section at the tangency point while the
    /// argument does not (domain endpoint of a stable focus).
    pub boundary: bool,
}

struct Root {
    z: f64,
    iterations: usize,
}

/// Root of a strictly increasing `g` on `[0, limit)` with `g(0) ≤ 0` and
/// `g → +∞` at `limit` (`None` for `+∞`).
fn increasing_root<G, DG>(g: G, dg: DG, start: f64, limit: Option<f64>, opts: &SolverOptions) -> Result<Root>
where
    G: Fn(f64) -> Result<f64>,
    DG: Fn(f64) -> f64,
{
    let no_convergence = |iterations| Error::NoConvergence { what: "level-curve solver", evaluations: iterations };
    let mut iterations = 0;
    if g(0.0)? == 0.0 {
        return Ok(Root { z: 0.0, iterations });
    }

    let mut lo = 0.0;
    let mut z = match limit {
        Some(l) if start >= l => 0.5 * l,
        _ => start,
    };
    let hi = loop {
        iterations += 1;
        if iterations > opts.max_iterations {
            return Err(no_convergence(iterations));
        }
        let gz = g(z)?;
        if gz > 0.0 {
            break z;
        }
        if gz == 0.0 {
            return Ok(Root { z, iterations });
        }
        lo = z;
        let next = match limit {
            Some(l) => 0.5 * (z + l),
            None => 2.0 * z,
        };
        if next == z || !next.is_finite() {
            // The root lies within rounding of the end of the domain.
            return Err(Error::NoConvergence {
                what: "level-curve bracket at the domain end",
                evaluations: iterations,
            });
        }
        z = next;
    };

    let mut hi = hi;
    while hi - lo > opts.tol * (1.0 + hi) {
        iterations += 1;
        if iterations > opts.max_iterations {
            return Err(no_convergence(iterations));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Newton polish inside the bracket; matters mostly for roots close to 0,
    // where the absolute bracket width is coarse.
    let mut z = 0.5 * (lo + hi);
    let mut best = (g(z)?.abs(), z);
    for _ in 0..30 {
        iterations += 1;
        let gz = g(z)?;
        if gz.abs() < best.0 {
            best = (gz.abs(), z);
        }
        if gz == 0.0 {
            break;
        }
        if gz > 0.0 {
            hi = hi.min(z);
        } else {
            lo = lo.max(z);
        }
        let slope = dg(z);
        let newton = z - gz / slope;
        // Fall back to bisection when the step leaves the open bracket.
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next <= lo || next >= hi || (next - z).abs() <= 0.5 * f64::EPSILON * z.abs() {
            break;
        }
        z = next;
    }
    Ok(Root { z: best.1, iterations })
}

fn require_half_map(p: &LienardParams) -> Result<Classification> {
    let class = p.classify()?;
    if !class.admits_half_map() {
        return Err(Error::NoHalfMap { a: p.a, t: p.t, d: p.d });
    }
    Ok(class)
}

/// Left half-map with default solver options.
pub fn left_halfmap(p: &LienardParams, y0: f64) -> Result<HalfMapResult> {
    left_halfmap_with(p, y0, &SolverOptions::default())
}

/// Image of `y0 ≥ 0` under the left Poincaré half-map and the flight time
/// `τ = 2Dc + ∫_{y1}^{y0} a / V(0, y) dy`.
///
/// `a = 0` is handled in closed form (`y1 = -y0 e^{DcT}`, `τ = 2Dc`), as is
/// the invisible tangency `y0 = 0, a > 0` (`y1 = 0, τ = 0`).
pub fn left_halfmap_with(p: &LienardParams, y0: f64, opts: &SolverOptions) -> Result<HalfMapResult> {
    let class = require_half_map(p)?;
    let interval = class.interval.expect("half-map scenarios have a non-empty interval");
    if !(y0 >= 0.0) || !y0.is_finite() {
        return Err(Error::OutOfDomain { y: y0, reason: "y0 must be finite and non-negative" });
    }
    if interval.upper.is_some_and(|u| y0 >= u) {
        return Err(Error::OutOfDomain { y: y0, reason: "y0 is beyond the admissible interval" });
    }
    let q = class.q;
    let flight_base = 2.0 * p.d * class.c;

    if class.scenario == Scenario::S1 {
        let y1 = -y0 * (p.d * q).exp();
        let residual = if y0 == 0.0 { 0.0 } else { (index_f(p, y1, y0)? - q).abs() };
        return Ok(HalfMapResult { image: y1, tau: flight_base, residual, iterations: 0, boundary: false });
    }
    if y0 == 0.0 && p.a > 0.0 {
        return Ok(HalfMapResult { image: 0.0, tau: 0.0, residual: 0.0, iterations: 0, boundary: false });
    }

    // g(z) = F(-z, y0) - q, increasing in z = -y1.
    let g = |z: f64| Ok(index_f(p, -z, y0)? - q);
    if g(0.0)? > 0.0 {
        return Err(Error::OutOfDomain { y: y0, reason: "y0 is below the preimage of the tangency point" });
    }
    let dg = |z: f64| z / p.v_on_section(-z);
    let start = y0.max(1e-8 * (1.0 + y0));
    let limit = interval.lower.map(|l| -l);
    let root = increasing_root(g, dg, start, limit, opts)?;

    let y1 = if root.z == 0.0 { 0.0 } else { -root.z };
    let residual = (index_f(p, y1, y0)? - q).abs();
    let tau = flight_base + a_integral(p, y1, y0)?;
    // Slowly turning unstable foci can map beyond the range where V(0, y1) is
    // representable; the solver then stalls off the level curve.
    let sensitivity = if y1 == 0.0 { 0.0 } else { (y1 / p.v_on_section(y1) * y1).abs() };
    let accepted = level_tolerance(q) + 64.0 * f64::EPSILON * sensitivity;
    if !(residual <= accepted && tau.is_finite()) {
        return Err(Error::NoConvergence {
            what: "level-curve solver (image out of range)",
            evaluations: root.iterations,
        });
    }
    Ok(HalfMapResult { image: y1, tau, residual, iterations: root.iterations, boundary: y1 == 0.0 && y0 > 0.0 })
}

/// Right half-map with default solver options.
pub fn right_halfmap(p: &LienardParams, y1: f64) -> Result<HalfMapResult> {
    right_halfmap_with(p, y1, &SolverOptions::default())
}

/// Image of `y1 ≤ 0` under the right half-map (through `x > 0`), obtained
/// from the left half-map of the mirrored system `(-a, T, D)`.
pub fn right_halfmap_with(p: &LienardParams, y1: f64, opts: &SolverOptions) -> Result<HalfMapResult> {
    if !(y1 <= 0.0) {
        return Err(Error::OutOfDomain { y: y1, reason: "y1 must be finite and non-positive" });
    }
    let mirrored = left_halfmap_with(&p.mirrored(), -y1, opts).map_err(|e| match e {
        Error::OutOfDomain { y, reason } => Error::OutOfDomain { y: -y, reason },
        e => e,
    })?;
    Ok(HalfMapResult { image: -mirrored.image, ..mirrored })
}

/// Tolerance for accepting a point as lying on the half-map level curve.
fn level_tolerance(q: f64) -> f64 {
    1e-8 * (1.0 + q.abs())
}

/// `P'(y0) = y0 V(0, y1) / (y1 V(0, y0))` for a point `(y1, y0)` on the
/// left half-map, `y0 > 0 > y1`.
pub fn map_derivative(p: &LienardParams, y0: f64, y1: f64) -> Result<f64> {
    let class = require_half_map(p)?;
    if !(y0 > 0.0 && y1 < 0.0) {
        return Err(Error::InvalidArgument(format!("the derivative needs y0 > 0 > y1 (got y0 = {y0}, y1 = {y1})")));
    }
    let residual = (index_f(p, y1, y0)? - class.q).abs();
    if !(residual <= level_tolerance(class.q)) {
        return Err(Error::OffLevelCurve { y1, y0, residual });
    }
    Ok(y0 * p.v_on_section(y1) / (y1 * p.v_on_section(y0)))
}

/// Derivative `dy0/dy1` of the right half-map at a point `(y1, y0)` on it.
pub fn right_map_derivative(p: &LienardParams, y1: f64, y0: f64) -> Result<f64> {
    let mirrored = p.mirrored();
    let class = require_half_map(&mirrored)?;
    if !(y0 > 0.0 && y1 < 0.0) {
        return Err(Error::InvalidArgument(format!("the derivative needs y0 > 0 > y1 (got y0 = {y0}, y1 = {y1})")));
    }
    // The right map lives on the level -c'T of the original system's F.
    let residual = (index_f(p, y1, y0)? + class.q).abs();
    if !(residual <= level_tolerance(class.q)) {
        return Err(Error::OffLevelCurve { y1, y0, residual });
    }
    Ok(y1 * p.v_on_section(y0) / (y0 * p.v_on_section(y1)))
}

/// Value of the half-map branch at the tangency point, `φ_{cT}(0)`.
///
/// Zero when `cT = 0` or `a = 0`; for `a < 0` it is the image `ŷ1 < 0` of
/// the origin when `T > 0`, and the preimage `ŷ0 > 0` of the origin when
/// `T < 0`.
pub fn boundary_point(p: &LienardParams) -> Result<f64> {
    boundary_point_with(p, &SolverOptions::default())
}

pub fn boundary_point_with(p: &LienardParams, opts: &SolverOptions) -> Result<f64> {
    let class = require_half_map(p)?;
    if p.a == 0.0 || class.q == 0.0 {
        return Ok(0.0);
    }
    if p.t > 0.0 {
        return Ok(left_halfmap_with(p, 0.0, opts)?.image);
    }
    // g(z) = q - F(0, z), increasing from q < 0.
    let q = class.q;
    let g = |z: f64| Ok(q - index_f(p, 0.0, z)?);
    let dg = |z: f64| z / p.v_on_section(z);
    let limit = class.interval.and_then(|i| i.upper);
    Ok(increasing_root(g, dg, 1.0, limit, opts)?.z)
}
