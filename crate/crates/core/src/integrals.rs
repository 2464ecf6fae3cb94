//! The index-like function
//!
//! ```text
//!     F(y1, y0) = PV ∫_{y1}^{y0} -y / V(0, y) dy
//! ```
//!
//! its flight-time companion `∫ a / V(0, y) dy`, and line integrals of the
//! orthogonal field `G = (-(Dx - a), Tx - y) / V`.
//!
//! Everything on the section is evaluated in closed form. The antiderivative
//! of `1 / V(0, ·)` has four shapes depending on the sign of `T² - 4D`
//! (plus the linear case `D = 0`); differences of antiderivatives are
//! combined algebraically before taking `atan`/`log` so that nearby
//! endpoints and the seam `T² = 4D` keep their digits.

use crate::error::{Error, Result};
use crate::lienard::LienardParams;
use crate::quadrature;

/// Shape of `V(0, y) = D y² - aT y + a²` as a function of `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelBranch {
    /// `T² < 4D`, `a ≠ 0`; `scale = |a| √(4D - T²)`.
    Elliptic { scale: f64 },
    /// `T² > 4D`, `a ≠ 0`, `D ≠ 0`; `scale = |a| √(T² - 4D)`.
    Hyperbolic { scale: f64 },
    /// `T² = 4D` up to relative 1e-12, `a ≠ 0`.
    Parabolic,
    /// `D = 0`, `a ≠ 0`: `V(0, y) = a (a - T y)`.
    Linear,
    /// `a = 0`: `V(0, y) = D y²`.
    AZero,
}

impl KernelBranch {
    pub fn new(p: &LienardParams) -> Self {
        let LienardParams { a, t, d } = *p;
        if a == 0.0 {
            return KernelBranch::AZero;
        }
        if d == 0.0 {
            return KernelBranch::Linear;
        }
        let disc = t * t - 4.0 * d;
        let seam = 1e-12 * 1f64.max(t * t).max(4.0 * d.abs());
        if disc.abs() <= seam {
            KernelBranch::Parabolic
        } else if disc < 0.0 {
            KernelBranch::Elliptic { scale: a.abs() * (-disc).sqrt() }
        } else {
            KernelBranch::Hyperbolic { scale: a.abs() * disc.sqrt() }
        }
    }
}

/// `V(0, y)`, in factored form when real roots exist so that values close to
/// a root keep their relative precision.
fn v_section(p: &LienardParams, roots: &[f64], y: f64) -> f64 {
    match roots {
        [r1, r2] if p.d != 0.0 => p.d * (y - r1) * (y - r2),
        [r] if p.d != 0.0 => p.d * (y - r) * (y - r),
        _ => p.v_on_section(y),
    }
}

/// Rejects endpoints where `V(0, ·) ≤ 0` and pairs separated by a zero of
/// `V(0, ·)`.
fn check_segment(p: &LienardParams, roots: &[f64], y1: f64, y0: f64) -> Result<(f64, f64)> {
    if !(y1.is_finite() && y0.is_finite()) {
        return Err(Error::InvalidArgument(format!("endpoints must be finite (y1 = {y1}, y0 = {y0})")));
    }
    let (lo, hi) = if y1 <= y0 { (y1, y0) } else { (y0, y1) };
    if let Some(&r) = roots.iter().find(|&&r| lo <= r && r <= hi) {
        return Err(Error::SingularPoint { y: r });
    }
    let v1 = v_section(p, roots, y1);
    let v0 = v_section(p, roots, y0);
    if !(v1 > 0.0) {
        return Err(Error::SingularPoint { y: y1 });
    }
    if !(v0 > 0.0) {
        return Err(Error::SingularPoint { y: y0 });
    }
    Ok((v1, v0))
}

/// `ln(1 + z) - z`, accurate for small `z`.
fn log1p_minus_x(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let mut term = -z;
        let mut sum = 0.0;
        for k in 2..40 {
            term *= -z;
            let next = sum + term / k as f64;
            if next == sum {
                break;
            }
            sum = next;
        }
        -sum
    } else {
        z.ln_1p() - z
    }
}

/// An antiderivative of `1 / V(0, y)`.
///
/// Branch forms: `(2/s) atan(u/s)`, `(1/s) ln|(u - s)/(u + s)|`, `-2/u` with
/// `u = 2Dy - aT`; `-ln V(0, y) / (aT)` (or `y/a²`) when `D = 0`; and
/// `-1/(Dy)` when `a = 0`.
pub fn kernel_k(p: &LienardParams, y: f64) -> Result<f64> {
    if p.is_degenerate() {
        return Err(Error::DegenerateSystem);
    }
    let v = p.v_on_section(y);
    if !(v > 0.0) {
        return Err(Error::SingularPoint { y });
    }
    let LienardParams { a, t, d } = *p;
    let u = 2.0 * d * y - a * t;
    Ok(match KernelBranch::new(p) {
        KernelBranch::Elliptic { scale } => 2.0 / scale * (u / scale).atan(),
        KernelBranch::Hyperbolic { scale } => ((u - scale) / (u + scale)).abs().ln() / scale,
        KernelBranch::Parabolic => -2.0 / u,
        KernelBranch::Linear if t == 0.0 => y / (a * a),
        KernelBranch::Linear => -v.ln() / (a * t),
        KernelBranch::AZero => -1.0 / (d * y),
    })
}

/// `∫_{y1}^{y0} dy / V(0, y)` without forming `K(y0) - K(y1)` explicitly.
fn kernel_integral(p: &LienardParams, roots: &[f64], y1: f64, y0: f64) -> Result<f64> {
    let (v1, _) = check_segment(p, roots, y1, y0)?;
    if y1 == y0 {
        return Ok(0.0);
    }
    let LienardParams { a, t, d } = *p;
    let u1 = 2.0 * d * y1 - a * t;
    let u0 = 2.0 * d * y0 - a * t;
    // u0 - u1, free of the cancellation in the difference of the rounded values.
    let du = 2.0 * d * (y0 - y1);
    Ok(match KernelBranch::new(p) {
        KernelBranch::Elliptic { scale: s } => 2.0 / s * (s * du).atan2(s * s + u0 * u1),
        KernelBranch::Hyperbolic { scale: s } => {
            // u - s = 2D (y - ra) and u + s = 2D (y - rb): distances to the
            // roots keep their precision where u ± s would cancel.
            let (ra, rb) = hyperbolic_roots(p, roots, s);
            let (a0, b0, a1, b1) = (y0 - ra, y0 - rb, y1 - ra, y1 - rb);
            let x = s * (y0 - y1) / (d * b0 * a1);
            let log_ratio = if x.abs() < 0.5 { x.ln_1p() } else { (a0 * b1 / (b0 * a1)).abs().ln() };
            log_ratio / s
        }
        KernelBranch::Parabolic => {
            let r = a * t / (2.0 * d);
            (y0 - y1) / (d * (y0 - r) * (y1 - r))
        }
        KernelBranch::Linear if t == 0.0 => (y0 - y1) / (a * a),
        KernelBranch::Linear => {
            let w1 = v1 / a;
            let z = -t * (y0 - y1) / w1;
            -z.ln_1p() / (a * t)
        }
        KernelBranch::AZero => (1.0 / y1 - 1.0 / y0) / d,
    })
}

/// Roots `((aT + s) / 2D, (aT - s) / 2D)` of `V(0, ·)` on the hyperbolic
/// branch, taken from the precomputed pair when available.
fn hyperbolic_roots(p: &LienardParams, roots: &[f64], s: f64) -> (f64, f64) {
    let at = p.a * p.t;
    let ra = (at + s) / (2.0 * p.d);
    let rb = (at - s) / (2.0 * p.d);
    match roots {
        [r1, r2] if (r1 - ra).abs() <= (r2 - ra).abs() => (*r1, *r2),
        [r1, r2] => (*r2, *r1),
        _ => (ra, rb),
    }
}

/// `ln(V(0, y0) / V(0, y1))`.
fn log_v_ratio(p: &LienardParams, roots: &[f64], y1: f64, y0: f64) -> f64 {
    let v1 = v_section(p, roots, y1);
    let v0 = v_section(p, roots, y0);
    let rel = (y0 - y1) * (p.d * (y0 + y1) - p.a * p.t) / v1;
    if rel.abs() < 0.5 {
        rel.ln_1p()
    } else {
        (v0 / v1).ln()
    }
}

/// The index-like function `F(y1, y0) = PV ∫_{y1}^{y0} -y / V(0, y) dy`.
///
/// For `a = 0` the principal value is resolved analytically as
/// `(1/D) ln|y1 / y0|`, with the convention `F(y, y) = 0` (also at `y = 0`).
/// `F(y1, y0) = -F(y0, y1)` holds exactly.
pub fn index_f(p: &LienardParams, y1: f64, y0: f64) -> Result<f64> {
    if p.is_degenerate() {
        return Err(Error::DegenerateSystem);
    }
    // Evaluate in one canonical orientation so that antisymmetry is exact.
    if y1 > y0 {
        return index_f(p, y0, y1).map(|v| -v);
    }
    let LienardParams { a, t, d } = *p;
    if a == 0.0 {
        if !(y1.is_finite() && y0.is_finite()) {
            return Err(Error::InvalidArgument(format!("endpoints must be finite (y1 = {y1}, y0 = {y0})")));
        }
        if y1 == y0 {
            return Ok(0.0);
        }
        if y1 == 0.0 || y0 == 0.0 {
            return Err(Error::UndefinedAtAxis);
        }
        return Ok((y1 / y0).abs().ln() / d);
    }
    let roots = p.section_roots();
    let (v1, _) = check_segment(p, &roots, y1, y0)?;
    if y1 == y0 {
        return Ok(0.0);
    }
    if d == 0.0 {
        let delta = y0 - y1;
        if t == 0.0 {
            return Ok(-delta * (y0 + y1) / (2.0 * a * a));
        }
        let w1 = v1 / a;
        let z = -t * delta / w1;
        return Ok(-delta * y1 / v1 + log1p_minus_x(z) / (t * t));
    }
    let log_part = log_v_ratio(p, &roots, y1, y0);
    let kernel_part = if t == 0.0 { 0.0 } else { kernel_integral(p, &roots, y1, y0)? };
    Ok(-(log_part + a * t * kernel_part) / (2.0 * d))
}

/// `∫_{y1}^{y0} a / V(0, y) dy`; identically zero for `a = 0`.
pub fn a_integral(p: &LienardParams, y1: f64, y0: f64) -> Result<f64> {
    if p.is_degenerate() {
        return Err(Error::DegenerateSystem);
    }
    if p.a == 0.0 {
        return Ok(0.0);
    }
    if y1 > y0 {
        return a_integral(p, y0, y1).map(|v| -v);
    }
    let roots = p.section_roots();
    Ok(p.a * kernel_integral(p, &roots, y1, y0)?)
}

/// Adaptive quadrature of `-y / V(0, y)` from `y1` to `y0`, to absolute
/// tolerance `tol`. Independent of the closed forms used by [`index_f`].
pub fn quadrature_f(p: &LienardParams, y1: f64, y0: f64, tol: f64) -> Result<f64> {
    if p.a == 0.0 {
        return Err(Error::InvalidArgument(
            "quadrature of the index-like function needs a != 0 (principal value)".into(),
        ));
    }
    let roots = p.section_roots();
    check_segment(p, &roots, y1, y0)?;
    let h = |y: f64| -y / p.v_on_section(y);
    Ok(quadrature::integrate(h, y1, y0, tol, quadrature::MAX_EVALUATIONS)?.value)
}

/// The orthogonal field `G(x, y)`.
pub fn orthogonal_field(p: &LienardParams, x: f64, y: f64) -> [f64; 2] {
    let v = p.v(x, y);
    [-(p.d * x - p.a) / v, (p.t * x - y) / v]
}

/// Whether `sign · V > 0` along the whole segment. `V` restricted to a line
/// is a quadratic in the parameter, so its extreme value is exact; values
/// within rounding of zero count as touching the zero set.
fn segment_keeps_sign(p: &LienardParams, from: [f64; 2], to: [f64; 2], sign: f64) -> bool {
    let at = |s: f64| p.v(from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1]));
    let (v0, vm, v1) = (at(0.0), at(0.5), at(1.0));
    let scale = v0.abs().max(vm.abs()).max(v1.abs());
    // V(s) = c2 s² + c1 s + v0.
    let c2 = 2.0 * (v0 + v1) - 4.0 * vm;
    let c1 = v1 - v0 - c2;
    let mut extreme = (sign * v0).min(sign * v1);
    if c2 != 0.0 {
        let s = -c1 / (2.0 * c2);
        if s > 0.0 && s < 1.0 {
            extreme = extreme.min(sign * at(s));
        }
    }
    extreme > 1e-13 * scale
}

/// `∫ G · dr` along the polyline through `path`.
///
/// Positive orientation follows the vertex order. A segment on the section
/// from `(0, y1)` up to `(0, y0)` contributes `F(y1, y0)`.
///
/// `V` must keep one strict sign along the whole path, otherwise the path is
/// rejected as crossing the zero set.
pub fn line_integral_g(p: &LienardParams, path: &[[f64; 2]]) -> Result<f64> {
    if p.is_degenerate() {
        return Err(Error::DegenerateSystem);
    }
    if path.len() < 2 {
        return Err(Error::InvalidArgument("a path needs at least two vertices".into()));
    }
    if path.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("path vertices must be finite".into()));
    }
    let sign = p.v(path[0][0], path[0][1]).signum();
    for (i, seg) in path.windows(2).enumerate() {
        if !segment_keeps_sign(p, seg[0], seg[1], sign) {
            return Err(Error::SingularPath { segment: i });
        }
    }
    let segments = path.len() - 1;
    let tol = (1e-12 / segments as f64).max(1e-15);
    let mut total = 0.0;
    for seg in path.windows(2) {
        let [x0, y0] = seg[0];
        let (dx, dy) = (seg[1][0] - x0, seg[1][1] - y0);
        let integrand = |s: f64| {
            let [gx, gy] = orthogonal_field(p, x0 + s * dx, y0 + s * dy);
            gx * dx + gy * dy
        };
        total += quadrature::integrate(integrand, 0.0, 1.0, tol, 100_000)?.value;
    }
    Ok(total)
}
