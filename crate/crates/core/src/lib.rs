//! Numerical laboratory for the divisor-sum error term.
//!
//! `divlab-core` computes the error term Δ(x) = D(x) − x·log x − (2γ−1)x of
//! the divisor summatory function D(x) = Σ_{n≤x} d(n) exactly (up to
//! floating-point roundoff far below every reported tolerance), and builds a
//! set of measurement instruments on top of it:
//!
//! - [`arith`] — divisor sieves, exact divisor sums via the hyperbola method,
//!   the main term M(x) in extended precision, Δ(x), and the sawtooth
//!   representation −2·Σ ψ(x/n);
//! - [`voronoi`] — truncated oscillatory-series approximations to Δ and
//!   smooth-window integral probes;
//! - [`moment`] — piecewise-exact integration of |Δ|^k and friends over long
//!   ranges, mean-square asymptotics, short-interval mean squares;
//! - [`short_interval`] — the short-interval mean-square main term, dyadic
//!   shift decompositions, large-value scans and exponent-pair bounds;
//! - [`sign_scan`] — exact sign-change location, persistence intervals, and
//!   related detectors;
//! - [`experiment`] — deterministic batch runs with CSV/JSON reports.
//!
//! Everything is deterministic: fixed seeds, fixed chunk decompositions, and
//! in-order reductions make repeated runs byte-identical, independent of
//! worker count.

pub mod arith;
pub mod dd;
pub mod error;
pub mod experiment;
pub mod moment;
pub mod quad;
pub mod short_interval;
pub mod sign_scan;
pub mod voronoi;

pub use error::{Error, Result};
