//! Planar linear systems in generalized Liénard form
//!
//! ```text
//!     x' = T x - y
//!     y' = D x - a
//! ```
//!
//! together with the quadratic inverse integrating factor
//! `V(x, y) = D²x² - DTxy + Dy² + a(T² - 2D)x - aTy + a²`, which satisfies
//! `∇V · L = T V` for the field `L = (Tx - y, Dx - a)`. The section of
//! interest is always `Σ = {x = 0}`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// `x' = M x + b` with `M = [[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralLinearSystem {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub b1: f64,
    pub b2: f64,
}

impl GeneralLinearSystem {
    pub fn new(m: [[f64; 2]; 2], b: [f64; 2]) -> Self {
        Self { m11: m[0][0], m12: m[0][1], m21: m[1][0], m22: m[1][1], b1: b[0], b2: b[1] }
    }

    /// Reduces to Liénard form through `x = x1`, `y = m22 x1 - m12 x2 - b1`.
    ///
    /// The section `x1 = 0` is preserved. Fails when `m12 = 0`: the first
    /// equation is then uncoupled and no orbit can come back to the section.
    pub fn to_lienard(&self) -> Result<LienardParams> {
        let all = [self.m11, self.m12, self.m21, self.m22, self.b1, self.b2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("system coefficients must be finite".into()));
        }
        if self.m12 == 0.0 {
            return Err(Error::NotObservable);
        }
        Ok(LienardParams {
            a: self.m12 * self.b2 - self.m22 * self.b1,
            t: self.m11 + self.m22,
            d: self.m11 * self.m22 - self.m12 * self.m21,
        })
    }
}

/// The triple `(a, T, D)` of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LienardParams {
    pub a: f64,
    /// Trace.
    pub t: f64,
    /// Determinant.
    pub d: f64,
}

impl LienardParams {
    pub fn new(a: f64, t: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && t.is_finite() && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameters must be finite (a = {a}, T = {t}, D = {d})")));
        }
        Ok(Self { a, t, d })
    }

    /// Image under `(x, y, a) -> (-x, -y, -a)`, which exchanges the left and
    /// right half-planes.
    pub fn mirrored(&self) -> Self {
        Self { a: -self.a, ..*self }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == 0.0 && self.d == 0.0
    }

    /// `4D - T²`; positive exactly for foci and centers.
    pub fn focus_discriminant(&self) -> f64 {
        4.0 * self.d - self.t * self.t
    }

    /// Vector field `L(x, y)`.
    pub fn field(&self, x: f64, y: f64) -> [f64; 2] {
        [self.t * x - y, self.d * x - self.a]
    }

    /// The inverse integrating factor.
    pub fn v(&self, x: f64, y: f64) -> f64 {
        let LienardParams { a, t, d } = *self;
        d * d * x * x - d * t * x * y + d * y * y + a * (t * t - 2.0 * d) * x - a * t * y + a * a
    }

    /// `∇V(x, y)`.
    pub fn grad_v(&self, x: f64, y: f64) -> [f64; 2] {
        let LienardParams { a, t, d } = *self;
        [2.0 * d * d * x - d * t * y + a * (t * t - 2.0 * d), -d * t * x + 2.0 * d * y - a * t]
    }

    /// `V(0, y) = D y² - aT y + a²`.
    pub fn v_on_section(&self, y: f64) -> f64 {
        (self.d * y - self.a * self.t) * y + self.a * self.a
    }

    /// Characteristic polynomial `λ² - Tλ + D` of the system matrix.
    pub fn char_poly(&self, lambda: f64) -> f64 {
        (lambda - self.t) * lambda + self.d
    }

    /// Magnitude of the terms of `V(0, y)`, used to scale zero tests.
    pub fn section_scale(&self, y: f64) -> f64 {
        (self.d * y * y).abs() + (self.a * self.t * y).abs() + self.a * self.a
    }

    /// Distance of the parameters to the nearest classification branch set
    /// (`a = 0` or `4D = T²`). Diagnostic only; classification itself uses
    /// exact tests.
    pub fn boundary_distance(&self) -> f64 {
        self.a.abs().min(self.focus_discriminant().abs())
    }

    /// Real roots of `V(0, ·)`, ascending. Empty when there are none or when
    /// `V(0, ·)` vanishes identically.
    pub fn section_roots(&self) -> Vec<f64> {
        let LienardParams { a, t, d } = *self;
        let b = -a * t;
        let c = a * a;
        if d == 0.0 {
            return if b == 0.0 { vec![] } else { vec![-c / b] };
        }
        let disc = b * b - 4.0 * d * c;
        if disc < 0.0 {
            return vec![];
        }
        if disc == 0.0 {
            return vec![-b / (2.0 * d)];
        }
        let sign = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sign * disc.sqrt());
        let (r1, r2) = (q / d, c / q);
        if r1 < r2 {
            vec![r1, r2]
        } else {
            vec![r2, r1]
        }
    }

    pub fn classify(&self) -> Result<Classification> {
        classify(self)
    }
}

impl fmt::Display for LienardParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a = {}, T = {}, D = {})", self.a, self.t, self.d)
    }
}

/// Open interval `(lower, upper)` on the section; `None` stands for an
/// infinite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lower: None, upper: None };

    pub fn contains(&self, y: f64) -> bool {
        self.lower.is_none_or(|l| y > l) && self.upper.is_none_or(|u| y < u)
    }

    pub fn lower_or(&self, inf: f64) -> f64 {
        self.lower.unwrap_or(-inf.abs())
    }

    pub fn upper_or(&self, inf: f64) -> f64 {
        self.upper.unwrap_or(inf.abs())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lower {
            Some(l) => write!(f, "({l}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match self.upper {
            Some(u) => write!(f, "{u})"),
            None => write!(f, "inf)"),
        }
    }
}

/// Position of the equilibrium relative to the Jordan curve formed by a
/// left excursion and the section segment it cuts off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// No equilibrium inside or on the curve; `a > 0`.
    S0,
    /// Equilibrium at the origin, focus or center; `a = 0`.
    S1,
    /// Equilibrium enclosed by the curve, focus or center; `a < 0`.
    S2,
    NoHalfMap,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::S0 => "S0",
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::NoHalfMap => "NoHalfMap",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub scenario: Scenario,
    /// Level constant `c`.
    pub c: f64,
    /// Level value `q = cT` of the index-like function on the half-map graph.
    pub q: f64,
    /// Loop constant `d_k`: the integral of the orthogonal field around the
    /// Jordan curve.
    pub d: f64,
    /// Admissible interval `I = (μ1, μ2)`; `None` when empty.
    pub interval: Option<Interval>,
}

impl Classification {
    pub fn admits_half_map(&self) -> bool {
        self.scenario != Scenario::NoHalfMap
    }
}

/// Scenario, level constant and admissible interval of `p`.
pub fn classify(p: &LienardParams) -> Result<Classification> {
    if p.is_degenerate() {
        return Err(Error::DegenerateSystem);
    }
    let disc = p.focus_discriminant();
    let (scenario, c) = if p.a > 0.0 {
        (Scenario::S0, 0.0)
    } else if disc > 0.0 {
        let k = if p.a == 0.0 { 1.0 } else { 2.0 };
        let scenario = if p.a == 0.0 { Scenario::S1 } else { Scenario::S2 };
        (scenario, k * PI / (p.d * disc.sqrt()))
    } else {
        (Scenario::NoHalfMap, 0.0)
    };
    let q = c * p.t;
    let d = if scenario == Scenario::S0 { 0.0 } else { q };
    let interval = admissible_interval(p);
    Ok(Classification { scenario, c, q, d, interval })
}

/// Maximal interval around 0 on which `V(0, ·) > 0`. For `a = 0` the origin
/// is the equilibrium itself and the interval is the whole line for foci
/// and centers, empty otherwise.
fn admissible_interval(p: &LienardParams) -> Option<Interval> {
    if p.a == 0.0 {
        return (p.focus_discriminant() > 0.0).then_some(Interval::REAL_LINE);
    }
    // V(0, 0) = a² > 0, so the roots split around the origin.
    let roots = p.section_roots();
    let lower =
        roots.iter().copied().filter(|&r| r < 0.0).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |m| m.max(r))));
    let upper =
        roots.iter().copied().filter(|&r| r > 0.0).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |m| m.min(r))));
    Some(Interval { lower, upper })
}
