//! Adaptive Gauss–Kronrod (7, 15) quadrature with local bisection.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default evaluation budget.
pub const MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the accepted local error estimates.
    pub error: f64,
    pub evaluations: usize,
}

/// Kronrod estimate and `|Kronrod - Gauss|` on `[lo, hi]` (signed orientation).
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` from `lo` to `hi` to absolute tolerance `tol`.
///
/// A subinterval is accepted once its error estimate is within its share of
/// `tol`, proportional to its length; otherwise it is bisected.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_evaluations: usize) -> Result<Quadrature> {
    if !(lo.is_finite() && hi.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs finite limits and a positive tolerance (got [{lo}, {hi}], tol {tol})"
        )));
    }
    let total = (hi - lo).abs();
    if total == 0.0 {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        if evaluations + 15 > max_evaluations {
            return Err(Error::NoConvergence { what: "adaptive quadrature", evaluations });
        }
        let (est, err) = gk15(&f, a, b);
        evaluations += 15;
        if !est.is_finite() {
            return Err(Error::NoConvergence { what: "adaptive quadrature", evaluations });
        }
        let share = tol * (b - a).abs() / total;
        let mid = 0.5 * (a + b);
        // Accept when within budget, or when the interval can no longer be split.
        if err <= share || mid == a || mid == b {
            if err > share && err > 1e3 * f64::EPSILON * est.abs().max(tol) {
                return Err(Error::NoConvergence { what: "adaptive quadrature", evaluations });
            }
            value += est;
            error += err;
        } else {
            stack.push((mid, b));
            stack.push((a, mid));
        }
    }
    Ok(Quadrature { value, error, evaluations })
}
