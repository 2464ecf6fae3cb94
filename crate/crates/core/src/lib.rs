//! Poincaré half-maps of planar linear systems on the section `x = 0`,
//! computed from level curves of an index-like function instead of by
//! integrating the flow.
//!
//! A system `x' = Mx + b` with `m12 ≠ 0` is reduced to Liénard form
//! `x' = Tx - y, y' = Dx - a` ([`lienard`]). The left half-map sends
//! `y0 ≥ 0` to the unique `y1 ≤ 0` with `F(y1, y0) = cT`, where `F` is the
//! principal-value integral of `-y / V(0, y)` and `V` is a quadratic inverse
//! integrating factor ([`integrals`]); the constant `c` depends only on the
//! sign of `a` and on `4D - T²`. The flight time follows as
//! `τ = 2Dc + ∫ a / V(0, y) dy` ([`halfmap`]).
//!
//! [`oracle`] reproduces the same quantities by event-detecting Runge–Kutta
//! integration, and [`pwl`] composes half-maps of two zones to locate
//! crossing limit cycles of piecewise-linear systems.

// Negated float comparisons are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod halfmap;
pub mod integrals;
pub mod lienard;
pub mod oracle;
pub mod pwl;
pub mod quadrature;

pub use error::{Error, Result, Zone};
pub use halfmap::{
    boundary_point, left_halfmap, map_derivative, right_halfmap, right_map_derivative, HalfMapResult, SolverOptions,
};
pub use integrals::{a_integral, index_f, kernel_k, line_integral_g, quadrature_f, KernelBranch};
pub use lienard::{classify, Classification, GeneralLinearSystem, Interval, LienardParams, Scenario};
pub use oracle::{gamma_loop_check, oracle_left_halfmap, OrbitResult};
pub use pwl::{compose_return, find_limit_cycles, CycleReport, LimitCycle, PwlSystem};
