//! Two-zone piecewise-linear systems sewn along `x = 0`.
//!
//! The full return map is the left half-map of the left zone followed by the
//! right half-map of the right zone. Crossing periodic orbits are fixed points
//! of that composition.

use crate::error::{Error, Result, Zone};
use crate::halfmap::{left_halfmap, map_derivative, right_halfmap, right_map_derivative};
use crate::integrals::index_f;
use crate::lienard::LienardParams;

/// Intersections closer than this to the origin are not transversal crossings.
const CROSSING_EPS: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwlSystem {
    /// Governs `x < 0`.
    pub left: LienardParams,
    /// Governs `x > 0`.
    pub right: LienardParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycle {
    pub y0: f64,
    pub y1: f64,
    pub period: f64,
    /// Derivative of the return map at the fixed point.
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CycleReport {
    /// Sorted by `y0`.
    pub cycles: Vec<LimitCycle>,
    pub degenerate_continuum: bool,
    /// Probes that failed or were skipped, one line each.
    pub diagnostics: Vec<String>,
}

/// One full turn: the intermediate crossing, the return point and both times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnTrip {
    pub y0: f64,
    pub y1: f64,
    pub y0_next: f64,
    pub tau_left: f64,
    pub tau_right: f64,
}

impl PwlSystem {
    pub fn new(left: LienardParams, right: LienardParams) -> Result<Self> {
        left.classify().map_err(|e| e.in_zone(Zone::Left))?;
        right.classify().map_err(|e| e.in_zone(Zone::Right))?;
        Ok(PwlSystem { left, right })
    }

    /// Full return from `(0, y0)` back to the positive half of the section.
    pub fn return_trip(&self, y0: f64) -> Result<ReturnTrip> {
        let l = left_halfmap(&self.left, y0).map_err(|e| e.in_zone(Zone::Left))?;
        let r = right_halfmap(&self.right, l.image).map_err(|e| e.in_zone(Zone::Right))?;
        Ok(ReturnTrip { y0, y1: l.image, y0_next: r.image, tau_left: l.tau, tau_right: r.tau })
    }

    /// Residuals of the two level-curve equations at `(y0, y1)`: the left
    /// zone's `F(y1, y0) = q` and the right zone's `F(y1, y0) = -q'`.
    pub fn zone_residuals(&self, y0: f64, y1: f64) -> Result<[f64; 2]> {
        let ql = self.left.classify().map_err(|e| e.in_zone(Zone::Left))?.q;
        let qr = self.right.mirrored().classify().map_err(|e| e.in_zone(Zone::Right))?.q;
        let fl = index_f(&self.left, y1, y0).map_err(|e| e.in_zone(Zone::Left))?;
        let fr = index_f(&self.right, y1, y0).map_err(|e| e.in_zone(Zone::Right))?;
        Ok([(fl - ql).abs(), (fr + qr).abs()])
    }
}

/// `y0'` after one left excursion and one right excursion.
pub fn compose_return(s: &PwlSystem, y0: f64) -> Result<f64> {
    s.return_trip(y0).map(|t| t.y0_next)
}

/// Scans the displacement `compose_return(y0) - y0` over `(0, y0_max]` and
/// refines every sign change to a crossing periodic orbit.
pub fn find_limit_cycles(s: &PwlSystem, y0_max: f64, grid: usize) -> Result<CycleReport> {
    if grid < 8 {
        return Err(Error::InvalidArgument(format!("grid must be at least 8, got {grid}")));
    }
    if !(y0_max > 0.0) || !y0_max.is_finite() {
        return Err(Error::InvalidArgument(format!("y0_max must be finite and positive, got {y0_max}")));
    }
    let mut report = CycleReport::default();
    let left_class = s.left.classify().map_err(|e| e.in_zone(Zone::Left))?;
    let mut hi = y0_max;
    if let Some(sup) = left_class.interval.and_then(|i| i.upper) {
        if sup < hi {
            report.diagnostics.push(format!("scan range clipped to the left-zone domain sup {sup}"));
            hi = sup;
        }
    }

    let displacement = |y: f64| -> Result<(f64, ReturnTrip)> {
        let trip = s.return_trip(y)?;
        if trip.y1 > -CROSSING_EPS {
            return Err(Error::OutOfDomain { y, reason: "intermediate crossing is not transversal" });
        }
        Ok((trip.y0_next - y, trip))
    };

    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(grid);
    for i in 1..=grid {
        // The supremum itself is excluded from open domains.
        let y = if i == grid && hi < y0_max { hi * (1.0 - 1e-9) } else { hi * i as f64 / grid as f64 };
        match displacement(y) {
            Ok((d, _)) => samples.push((y, d)),
            Err(e) => report.diagnostics.push(format!("y0 = {y}: {e}")),
        }
    }
    if samples.is_empty() {
        report.diagnostics.push("no grid point admits a full return".into());
        return Ok(report);
    }

    report.degenerate_continuum = samples.iter().all(|&(y, d)| d.abs() < DEGENERACY_TOL * (1.0 + y));
    if report.degenerate_continuum {
        return Ok(report);
    }

    let mut roots = Vec::new();
    for (i, &(y, d)) in samples.iter().enumerate() {
        if d == 0.0 {
            roots.push(y);
        } else if let Some(&(yn, dn)) = samples.get(i + 1) {
            if dn != 0.0 && d.signum() != dn.signum() {
                match refine(&|y| displacement(y).map(|r| r.0), (y, d), (yn, dn)) {
                    Ok(r) => roots.push(r),
                    Err(e) => report.diagnostics.push(format!("refinement in [{y}, {yn}]: {e}")),
                }
            }
        }
    }

    for y0 in roots {
        match build_cycle(s, y0) {
            Ok(c) => report.cycles.push(c),
            Err(e) => report.diagnostics.push(format!("cycle at y0 = {y0}: {e}")),
        }
    }
    report.cycles.sort_by(|a, b| a.y0.total_cmp(&b.y0));
    Ok(report)
}

fn build_cycle(s: &PwlSystem, y0: f64) -> Result<LimitCycle> {
    let trip = s.return_trip(y0)?;
    let p = map_derivative(&s.left, y0, trip.y1).map_err(|e| e.in_zone(Zone::Left))?;
    let q = right_map_derivative(&s.right, trip.y1, trip.y0_next).map_err(|e| e.in_zone(Zone::Right))?;
    Ok(LimitCycle { y0, y1: trip.y1, period: trip.tau_left + trip.tau_right, multiplier: p * q })
}

/// Bracketed root refinement: Illinois-modified regula falsi, with a
/// bisection step whenever the bracket fails to halve.
fn refine<F: Fn(f64) -> Result<f64>>(f: &F, a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    let ((mut xa, mut fa), (mut xb, mut fb)) = (a, b);
    let mut side = 0i8;
    for _ in 0..200 {
        let width = (xb - xa).abs();
        if width <= ROOT_TOL * (1.0 + xa.abs().max(xb.abs())) {
            break;
        }
        let mut x = (xa * fb - xb * fa) / (fb - fa);
        if !(x > xa.min(xb) && x < xa.max(xb)) {
            x = 0.5 * (xa + xb);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            xb = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            xa = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (xb - xa).abs() > 0.5 * width {
            let m = 0.5 * (xa + xb);
            let fm = f(m)?;
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                xa = m;
                fa = fm;
            } else {
                xb = m;
                fb = fm;
            }
            side = 0;
        }
    }
    Ok(if fa.abs() < fb.abs() { xa } else { xb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_two_zone_flow;

    fn sys(l: (f64, f64, f64), r: (f64, f64, f64)) -> PwlSystem {
        PwlSystem::new(LienardParams::new(l.0, l.1, l.2).unwrap(), LienardParams::new(r.0, r.1, r.2).unwrap()).unwrap()
    }

    #[test]
    fn global_center_is_identity() {
        let s = sys((0.0, 0.0, 1.0), (0.0, 0.0, 1.0));
        assert_eq!(compose_return(&s, 2.0).unwrap(), 2.0);
        let r = find_limit_cycles(&s, 5.0, 16).unwrap();
        assert!(r.degenerate_continuum && r.cycles.is_empty());
    }

    #[test]
    fn cancelling_exponents() {
        let s = sys((0.0, 0.3, 1.0), (0.0, -0.3, 1.0));
        assert!((compose_return(&s, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(find_limit_cycles(&s, 5.0, 8).unwrap().degenerate_continuum);
    }

    #[test]
    fn return_matches_two_zone_integration() {
        let s = sys((1.0, 0.5, 1.0), (-1.0, -0.5, 1.0));
        let trip = s.return_trip(1.0).unwrap();
        let end = oracle_two_zone_flow(&s.left, &s.right, 1.0, trip.tau_left + trip.tau_right, 1e-12).unwrap();
        assert!(end[0].abs() < 1e-8, "{end:?}");
        assert!((end[1] - trip.y0_next).abs() < 1e-8, "{end:?} vs {}", trip.y0_next);
    }

    #[test]
    fn frozen_composition() {
        let s = sys((1.0, 0.5, 1.0), (-1.0, -0.8, 2.0));
        let trip = s.return_trip(1.0).unwrap();
        assert!((trip.y1 + 1.3810245618162957).abs() < 1e-10);
        assert!((trip.tau_left - 1.7496821481890796).abs() < 1e-10);
        assert!((trip.y0_next - 0.8875912338638878).abs() < 1e-10);
        assert!((trip.tau_right - 1.4433140812061336).abs() < 1e-10);
    }

    #[test]
    fn reported_cycles_are_consistent() {
        let s = sys((1.0, 0.5, 1.0), (-1.0, -0.8, 2.0));
        let report = find_limit_cycles(&s, 20.0, 64).unwrap();
        assert!(!report.degenerate_continuum);
        for c in &report.cycles {
            let [rl, rr] = s.zone_residuals(c.y0, c.y1).unwrap();
            assert!(rl <= 1e-10 && rr <= 1e-10, "{rl} {rr}");
            assert!(c.period > 0.0 && c.multiplier > 0.0);
            let h = 1e-6 * (1.0 + c.y0);
            let fd = (compose_return(&s, c.y0 + h).unwrap() - compose_return(&s, c.y0 - h).unwrap()) / (2.0 * h);
            assert!(((fd - c.multiplier) / c.multiplier).abs() < 1e-5);
        }
    }

    #[test]
    fn unstable_cycle_between_two_foci() {
        let s = sys((-1.0, -0.2, 1.0), (-1.0, 0.5, 1.0));
        let report = find_limit_cycles(&s, 20.0, 64).unwrap();
        assert_eq!(report.cycles.len(), 1, "{report:?}");
        let c = report.cycles[0];
        // Independent two-zone integration with a bracketing root finder.
        assert!((c.y0 - 3.5093772566653976).abs() < 1e-9);
        assert!((c.y1 + 2.097006765998909).abs() < 1e-9);
        assert!((c.period - 6.355799581032401).abs() < 1e-9);
        assert!(c.multiplier > 1.0);
        let end = oracle_two_zone_flow(&s.left, &s.right, c.y0, c.period, 1e-12).unwrap();
        assert!(end[0].abs().max((end[1] - c.y0).abs()) <= 1e-8 * (1.0 + c.y0));
        // The left zone's domain starts above the small grid points.
        assert!(!report.diagnostics.is_empty());
    }

    #[test]
    fn bad_arguments() {
        let s = sys((0.0, 0.0, 1.0), (0.0, 0.0, 1.0));
        assert!(find_limit_cycles(&s, 1.0, 7).is_err());
        assert!(find_limit_cycles(&s, -1.0, 8).is_err());
        let zero = LienardParams::new(0.0, 1.0, 0.0).unwrap();
        let err = PwlSystem::new(zero, zero).unwrap_err();
        assert!(matches!(err, Error::Zone { zone: Zone::Left, .. }));
    }
}
