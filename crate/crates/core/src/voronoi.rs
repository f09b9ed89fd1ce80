//! Truncated oscillating-series approximation of Δ(x), the bare cosine sum
//! it is built from, measured truncation error, and smooth-window integrals
//! of the weighted sum.
//!
//! The truncated series is
//!
//! ```text
//! V_N(x) = (x^{1/4}/(√2·π)) Σ_{n≤N} d(n) n^{−3/4} cos(4π√(nx) − π/4)
//! ```
//!
//! with truncation error of magnitude ~x^{1/2}N^{−1/2}. The crate exposes
//! both the prefactored form and the bare sum, because downstream probes use
//! each.

use crate::arith::{self, WindowStream};
use crate::dd::{consts, two_prod, Dd};
use crate::quad;
use crate::{ensure, Error, Result};

/// Above this raw phase (radians), 53-bit evaluation of 4π√(nx) can miss the
/// 10⁻⁶-radian budget and the reduction runs in double-double instead.
const PHASE_DIRECT_LIMIT: f64 = 1e8;

/// x^{1/4}/(√2·π) — the series prefactor.
#[inline]
fn prefactor(x: f64) -> f64 {
    x.powf(0.25) / (core::f64::consts::SQRT_2 * core::f64::consts::PI)
}

/// One truncated-series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiSum {
    pub x: f64,
    pub n_terms: u32,
    pub value: f64,
    /// true: `value` includes the x^{1/4}/(√2π) prefactor.
    pub prefactor_included: bool,
    /// Magnitude of the truncation error term, x^{1/2}·N^{−1/2}
    /// (unit constant; a diagnostic, not a guarantee).
    pub tail_bound: f64,
}

fn check_range(x: f64, n_terms: u32) -> Result<()> {
    ensure!(
        x.is_finite() && (1.0..=1e12).contains(&x),
        "voronoi: x must be in [1, 10^12], got {x}"
    );
    ensure!(
        n_terms >= 1 && n_terms <= 100_000_000 && (n_terms as f64) <= x,
        "voronoi: n_terms must be in [1, min(x, 10^8)], got {n_terms} at x = {x}"
    );
    Ok(())
}

/// cos(4π√(nx) − π/4) with the phase accurate to ≤ 10⁻⁶ radians over the
/// whole supported range.
#[inline]
fn phase_cos(n: u64, x: f64) -> f64 {
    let raw = 2.0 * core::f64::consts::TAU * ((n as f64) * x).sqrt();
    let phase = if raw <= PHASE_DIRECT_LIMIT {
        raw
    } else {
        reduced_phase(n, x)
    };
    (phase - core::f64::consts::FRAC_PI_4).cos()
}

/// 4π√(nx) reduced modulo 2π in double-double. The product n·x is formed
/// error-free (n ≤ 10⁸ is exact in f64), so the only error sources are the
/// dd square root and the reduction itself: ≤ ~10⁻²⁰ radians absolute at the
/// top of the range, against a 10⁻⁶ budget.
pub(crate) fn reduced_phase(n: u64, x: f64) -> f64 {
    let (p, e) = two_prod(n as f64, x);
    let phase = Dd::new(p, e).sqrt() * consts::TWO_PI * 2.0;
    let k = (phase / consts::TWO_PI).floor();
    (phase - consts::TWO_PI * k).to_f64()
}

#[inline]
fn neumaier_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

fn bare_sum(x: f64, n_terms: u32) -> Result<f64> {
    let mut stream = WindowStream::new(1, n_terms as u64 + 1)?;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for n in 1..=n_terms as u64 {
        let term = stream.d(n) as f64 * (n as f64).powf(-0.75) * phase_cos(n, x);
        neumaier_add(&mut sum, &mut comp, term);
    }
    Ok(sum + comp)
}

/// Truncated series V_N(x) with the prefactor. Phases are reduced in
/// extended precision past the direct-evaluation limit; summation is
/// compensated.
pub fn voronoi_delta(x: f64, n_terms: u32) -> Result<VoronoiSum> {
    check_range(x, n_terms)?;
    let value = prefactor(x) * bare_sum(x, n_terms)?;
    Ok(VoronoiSum {
        x,
        n_terms,
        value,
        prefactor_included: true,
        tail_bound: x.sqrt() / (n_terms as f64).sqrt(),
    })
}

/// The bare sum Σ_{n≤N} d(n) n^{−3/4} cos(4π√(nx) − π/4), no prefactor.
///
/// Unlike [`voronoi_delta`], any x > 0 is accepted: the bare sum stands on
/// its own as an oscillating object and small-x evaluations are useful
/// closed-form checks (at x = 1/16 the single-term phase is exactly π).
pub fn oscillatory_sum(x: f64, n_terms: u32) -> Result<f64> {
    ensure!(
        x.is_finite() && x > 0.0 && x <= 1e12,
        "oscillatory_sum: x must be in (0, 10^12], got {x}"
    );
    ensure!(
        (1..=100_000_000).contains(&n_terms),
        "oscillatory_sum: n_terms must be in [1, 10^8], got {n_terms}"
    );
    bare_sum(x, n_terms)
}

/// |Δ(x) − V_N(x)|. Integer x is nudged to x + 10⁻⁶ first so the comparison
/// never straddles a jump.
pub fn approximation_error(x: f64, n_terms: u32) -> Result<f64> {
    check_range(x, n_terms)?;
    let x = if x.fract() == 0.0 { x + 1e-6 } else { x };
    let exact = arith::delta(x)?;
    Ok((exact - voronoi_delta(x, n_terms)?.value).abs())
}

/// C∞ window: 0 outside [x0−h, x0+2h], identically 1 on [x0, x0+h], with
/// transition zones of width h on each side built from the standard
/// exp(−1/t) cutoff, so every derivative vanishes at the zone edges and the
/// r-th derivative is O(h^{−r}).
#[derive(Debug, Clone, Copy)]
pub struct SmoothWindow {
    pub x0: f64,
    pub h: f64,
}

/// Monotone C∞ step: 0 for t ≤ 0, 1 for t ≥ 1, f(t)/(f(t)+f(1−t)) with
/// f(t) = e^{−1/t} in between.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        // f(1−t)/f(t) = exp(1/t − 1/(1−t)) = exp((1−2t)/(t(1−t)))
        1.0 / (1.0 + ((1.0 - 2.0 * t) / (t * (1.0 - t))).exp())
    }
}

impl SmoothWindow {
    pub fn new(x0: f64, h: f64) -> Result<SmoothWindow> {
        ensure!(
            x0.is_finite() && h.is_finite() && x0 > 0.0 && h > 0.0,
            "SmoothWindow: need x0 > 0 and h > 0, got x0 = {x0}, h = {h}"
        );
        Ok(SmoothWindow { x0, h })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.x0 - self.h, self.x0 + 2.0 * self.h)
    }

    /// φ(x) ∈ [0, 1].
    pub fn weight(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            0.0
        } else if x < self.x0 {
            smooth_step((x - lo) / self.h)
        } else if x <= self.x0 + self.h {
            1.0
        } else {
            smooth_step((hi - x) / self.h)
        }
    }
}

/// ∫ φ(x) · x^{1/4} · F_N(x) dx over the window support, by panel-adaptive
/// Gauss–Legendre. Initial panels resolve the fastest oscillation
/// (frequency 2π√(N/x) at the left edge); each panel refines until its
/// GL16−GL8 discrepancy clears a 10⁻⁶ share of the amplitude envelope.
pub fn smooth_weighted_integral(window: &SmoothWindow, n_terms: u32) -> Result<f64> {
    ensure!(
        window.x0 >= 1e3 && window.h >= 10.0,
        "smooth_weighted_integral: need x0 >= 10^3 and h >= 10, got x0 = {}, h = {}",
        window.x0,
        window.h
    );
    ensure!(
        (1..=10_000_000).contains(&n_terms),
        "smooth_weighted_integral: n_terms must be in [1, 10^7], got {n_terms}"
    );
    // tabulate d(n)·n^{−3/4} once; each integrand evaluation is then O(N)
    let coeff: Vec<f64> = {
        let window = arith::sieve_window(1, n_terms as u64 + 1)?;
        window
            .counts
            .iter()
            .enumerate()
            .map(|(i, &d)| d as f64 * ((i + 1) as f64).powf(-0.75))
            .collect()
    };
    let f = |x: f64| {
        let w = window.weight(x);
        if w == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (i, &c) in coeff.iter().enumerate() {
            neumaier_add(&mut sum, &mut comp, c * phase_cos(i as u64 + 1, x));
        }
        w * x.powf(0.25) * (sum + comp)
    };
    let (lo, hi) = window.support();
    let envelope = hi.powf(0.25) * coeff.iter().sum::<f64>() * (hi - lo);
    weighted_integral_impl(lo, hi, n_terms, envelope, f)
}

/// Shared quadrature driver (also the linearity test seam).
fn weighted_integral_impl<F: FnMut(f64) -> f64>(
    lo: f64,
    hi: f64,
    n_terms: u32,
    envelope: f64,
    mut f: F,
) -> Result<f64> {
    let len = hi - lo;
    // half-period of the fastest term at the left edge: π / (2π√(N/lo))
    let half_period = 0.5 * (lo / n_terms as f64).sqrt();
    let n_panels = ((len / half_period).ceil() as usize).clamp(8, 65_536);
    let tol_total = 1e-6 * envelope;
    let tol_panel = tol_total / n_panels as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..n_panels {
        let a = lo + len * (i as f64 / n_panels as f64);
        let b = lo + len * ((i + 1) as f64 / n_panels as f64);
        let (v, e) = quad::adaptive(a, b, tol_panel, 12, &mut f);
        total += v;
        err += e;
    }
    if err > tol_total {
        return Err(Error::NonConvergence(format!(
            "smooth_weighted_integral: panel error {err:.3e} above target {tol_total:.3e} \
             after refinement ({n_panels} base panels)"
        )));
    }
    Ok(total)
}
