//! Exact piecewise integration of powers and sign-parts of Δ.
//!
//! Δ is piecewise smooth: on each unit segment [m, m+1) it equals D − M(x)
//! with D = D(m) a constant integer and M strictly increasing, so every
//! integral of f(Δ) decomposes into per-segment integrals of a smooth
//! function. The sweep machinery here walks segments with a running exact D
//! (optionally against a second lattice shifted by U, for differenced
//! integrands), and the integrators use closed-form antiderivatives where
//! they exist (signed first and second moments) and Gauss–Legendre panels
//! everywhere else, splitting at the unique in-segment root of Δ when a
//! mode needs sign information.

use crate::arith::{
    self, divisor_sum, main_term_diff, main_term_unchecked, WindowStream,
    TWO_GAMMA_MINUS_ONE_F64,
};
use crate::dd::{consts, Dd};
use crate::quad;
use crate::{ensure, Error, Result};
use std::time::{Duration, Instant};

/// One constant-D piece of [a, b].
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// D(⌊lo⌋), constant on [lo, hi).
    pub d: u128,
    /// D(⌊lo + U⌋) when the sweep was built with a shifted lattice.
    pub d_shifted: Option<u128>,
}

/// Iterator over the constant-D pieces of [a, b]: breakpoints at every
/// integer, plus every point m − U for integer m when a shift U is
/// configured. The running divisor sums advance by exactly d(m) at each
/// crossing, streamed from sieve windows.
pub struct SegmentSweep {
    b: f64,
    shift: Option<f64>,
    x: f64,
    d_main: u128,
    d_shift: u128,
    next_main: u64,
    next_shift_m: u64,
    main_stream: Option<WindowStream>,
    shift_stream: Option<WindowStream>,
    done: bool,
}

impl SegmentSweep {
    pub fn new(a: f64, b: f64) -> Result<SegmentSweep> {
        Self::build(a, b, None)
    }

    /// Sweep of [a, b] with extra breakpoints at m − u for every integer m.
    pub fn with_shift(a: f64, b: f64, u: f64) -> Result<SegmentSweep> {
        ensure!(
            u.is_finite() && u > 0.0,
            "SegmentSweep: shift must be positive, got {u}"
        );
        Self::build(a, b, Some(u))
    }

    fn build(a: f64, b: f64, shift: Option<f64>) -> Result<SegmentSweep> {
        ensure!(
            a.is_finite() && b.is_finite() && a >= 1.0 && b > a,
            "SegmentSweep: need 1 <= a < b, got [{a}, {b}]"
        );
        let u = shift.unwrap_or(0.0);
        ensure!(
            b + u <= 1e12,
            "SegmentSweep: b + shift must be <= 10^12, got {}",
            b + u
        );
        let fa = a.floor() as u64;
        let fb = b.floor() as u64;
        let main_stream = if fb > fa {
            Some(WindowStream::new(fa + 1, fb + 1)?)
        } else {
            None
        };
        let d_main = divisor_sum(fa)?;
        let (d_shift, next_shift_m, shift_stream) = if shift.is_some() {
            let fau = (a + u).floor() as u64;
            let fbu = (b + u).floor() as u64;
            let stream = if fbu > fau {
                Some(WindowStream::new(fau + 1, fbu + 1)?)
            } else {
                None
            };
            (divisor_sum(fau)?, fau + 1, stream)
        } else {
            (0, 0, None)
        };
        Ok(SegmentSweep {
            b,
            shift,
            x: a,
            d_main,
            d_shift,
            next_main: fa + 1,
            next_shift_m,
            main_stream,
            shift_stream,
            done: false,
        })
    }
}

impl Iterator for SegmentSweep {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        if self.done {
            return None;
        }
        let lo = self.x;
        let d = self.d_main;
        let d_shifted = self.shift.map(|_| self.d_shift);
        let bm = self.next_main as f64;
        let bs = match self.shift {
            Some(u) => self.next_shift_m as f64 - u,
            None => f64::INFINITY,
        };
        let hi = bm.min(bs).min(self.b);
        if hi >= self.b {
            self.done = true;
        } else {
            if bm == hi {
                let d = self.main_stream.as_mut().expect("main stream").d(self.next_main);
                self.d_main += d as u128;
                self.next_main += 1;
            }
            if bs == hi {
                let d = self
                    .shift_stream
                    .as_mut()
                    .expect("shift stream")
                    .d(self.next_shift_m);
                self.d_shift += d as u128;
                self.next_shift_m += 1;
            }
        }
        self.x = hi;
        Some(Segment {
            lo,
            hi: hi.min(self.b),
            d,
            d_shifted,
        })
    }
}

/// What function of Δ gets integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// Δ^k; integer k only.
    Signed,
    /// |Δ|^k.
    Absolute,
    /// Δ₊^k = (max(Δ, 0))^k.
    PositivePart,
    /// Δ₋^k = (max(−Δ, 0))^k, reported as a non-negative magnitude.
    NegativePart,
}

impl MomentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentMode::Signed => "signed",
            MomentMode::Absolute => "absolute",
            MomentMode::PositivePart => "positive_part",
            MomentMode::NegativePart => "negative_part",
        }
    }
}

impl std::str::FromStr for MomentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<MomentMode> {
        match s {
            "signed" => Ok(MomentMode::Signed),
            "absolute" => Ok(MomentMode::Absolute),
            "positive_part" => Ok(MomentMode::PositivePart),
            "negative_part" => Ok(MomentMode::NegativePart),
            other => Err(Error::InvalidParameter(format!(
                "unknown moment mode {other:?} (expected signed | absolute | positive_part | negative_part)"
            ))),
        }
    }
}

/// Result of one moment integration.
#[derive(Debug, Clone, Copy)]
pub struct MomentReport {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub mode: MomentMode,
    pub value: f64,
    /// Sum of per-segment quadrature error estimates (0 for pure
    /// closed-form paths).
    pub error_bound: f64,
    pub segment_count: u64,
    pub elapsed: Duration,
}

/// Result of the max-over-shift integral probe.
#[derive(Debug, Clone, Copy)]
pub struct MaxDiffReport {
    pub t: f64,
    pub h: f64,
    pub u: f64,
    pub integral_value: f64,
    pub samples_per_unit: u32,
    pub max_observed: f64,
    pub argmax_x: f64,
}

/// Antiderivatives in double-double: I1(x) = ∫₀ˣ M, and I2(x) = ∫₀ˣ M²,
/// both elementary:
///
/// ```text
/// I1(x) = x²(L/2 − 1/4 + c/2),                        L = log x, c = 2γ−1
/// I2(x) = x³(L²/3 + (2c/3 − 2/9)L + 2/27 − 2c/9 + c²/3)
/// ```
struct Antider {
    k1: Dd, // 2c/3 − 2/9
    k0: Dd, // 2/27 − 2c/9 + c²/3
    third: Dd,
}

impl Antider {
    fn new() -> Antider {
        let c = consts::TWO_GAMMA_MINUS_ONE;
        let third = Dd::ONE / 3.0;
        let two_ninths = Dd::from_f64(2.0) / 9.0;
        Antider {
            k1: c * (Dd::from_f64(2.0) / 3.0) - two_ninths,
            k0: Dd::from_f64(2.0) / 27.0 - c * two_ninths + c.sqr() * third,
            third,
        }
    }

    /// (L, I1, I2) at x.
    fn eval(&self, x: f64) -> (Dd, Dd, Dd) {
        let l = Dd::ln_f64(x);
        let x2 = Dd::sqr(Dd::from_f64(x));
        let i1 = x2 * ((l + consts::TWO_GAMMA_MINUS_ONE) * 0.5 - 0.25);
        let i2 = (x2 * x) * (l.sqr() * self.third + l * self.k1 + self.k0);
        (l, i1, i2)
    }
}

pub(crate) const ROOT_X_TOL: f64 = 1e-12;
pub(crate) const ROOT_F_TOL: f64 = 1e-9;

/// Root of Δ in a piece where Δ(x) = delta_lo − (M(x_lo + t) − M(x_lo)):
/// Δ is strictly decreasing, so a root exists iff the values at the ends
/// straddle zero. Bisection–Newton hybrid to 10⁻¹² in x; the returned point
/// satisfies |Δ| ≤ 10⁻⁹ (slope ≤ log x keeps the residual tiny).
pub(crate) fn root_in_segment(delta_lo: f64, x_lo: f64, len: f64) -> Option<f64> {
    if delta_lo <= 0.0 {
        return None;
    }
    let g = |t: f64| delta_lo - main_term_diff(x_lo, t);
    if g(len) >= 0.0 {
        return None;
    }
    let (mut a, mut b) = (0.0f64, len);
    for _ in 0..8 {
        let m = 0.5 * (a + b);
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut t = 0.5 * (a + b);
    while b - a > ROOT_X_TOL {
        let gt = g(t);
        if gt > 0.0 {
            a = t;
        } else {
            b = t;
        }
        // M'(x) = log x + 2γ
        let slope = (x_lo + t).ln() + TWO_GAMMA_MINUS_ONE_F64 + 1.0;
        let tn = t + gt / slope;
        t = if tn > a && tn < b { tn } else { 0.5 * (a + b) };
    }
    debug_assert!(g(t).abs() <= ROOT_F_TOL);
    Some(x_lo + t)
}

#[inline]
fn pow_k(v: f64, k: f64, k_int: Option<i32>) -> f64 {
    match k_int {
        Some(ki) => v.powi(ki),
        None => v.powf(k),
    }
}

/// ∫_a^b f(Δ(x)) dx with f chosen by `mode` and exponent `k`.
///
/// Signed k ∈ {1, 2} run entirely in closed form (double-double, exact
/// integer D); every other combination uses per-piece Gauss–Legendre with a
/// 10⁻¹⁰ per-segment relative target, splitting pieces at the root of Δ
/// when the mode distinguishes signs.
pub fn integrate_moment(a: f64, b: f64, k: f64, mode: MomentMode) -> Result<MomentReport> {
    let start = Instant::now();
    ensure!(
        a.is_finite() && b.is_finite() && a >= 1.0 && b > a && b <= 1e12,
        "integrate_moment: need 1 <= a < b <= 10^12, got [{a}, {b}]"
    );
    ensure!(
        b - a <= 1e9,
        "integrate_moment: range length {} exceeds 10^9 segments",
        b - a
    );
    ensure!(
        k.is_finite() && k >= 0.0,
        "integrate_moment: exponent k must be >= 0, got {k}"
    );
    if mode == MomentMode::Signed {
        ensure!(
            k.fract() == 0.0,
            "integrate_moment: signed mode requires integer k, got {k}"
        );
    }
    // |Δ|⁰ = Δ⁰ = 1 off a measure-zero set
    if k == 0.0 && matches!(mode, MomentMode::Signed | MomentMode::Absolute) {
        return Ok(MomentReport {
            a,
            b,
            k,
            mode,
            value: b - a,
            error_bound: 0.0,
            segment_count: 0,
            elapsed: start.elapsed(),
        });
    }
    let k_int = if k.fract() == 0.0 && k <= 32.0 {
        Some(k as i32)
    } else {
        None
    };
    let closed_form = mode == MomentMode::Signed && (k == 1.0 || k == 2.0);
    let anti = Antider::new();
    let mut cache: Option<(f64, Dd, Dd)> = None; // (x, I1, I2)
    let mut total = Dd::ZERO;
    let mut error_bound = 0.0;
    let mut segment_count = 0u64;

    for seg in SegmentSweep::new(a, b)? {
        segment_count += 1;
        let len = seg.hi - seg.lo;
        if closed_form {
            let (i1_lo, i2_lo) = match cache {
                Some((x, i1, i2)) if x == seg.lo => (i1, i2),
                _ => {
                    let (_, i1, i2) = anti.eval(seg.lo);
                    (i1, i2)
                }
            };
            let (_, i1_hi, i2_hi) = anti.eval(seg.hi);
            cache = Some((seg.hi, i1_hi, i2_hi));
            let d = Dd::from_u128(seg.d);
            let piece = if k == 1.0 {
                d * len - (i1_hi - i1_lo)
            } else {
                d.sqr() * len - (d * (i1_hi - i1_lo)) * 2.0 + (i2_hi - i2_lo)
            };
            total = total + piece;
            continue;
        }

        // quadrature path: Δ(x) = delta_lo − (M(x) − M(lo)), drift in f64
        let delta_lo = (Dd::from_u128(seg.d) - main_term_unchecked(seg.lo)).to_f64();
        let delta_hi = delta_lo - main_term_diff(seg.lo, len);
        let needs_sign = mode != MomentMode::Signed;
        let skip = match mode {
            MomentMode::PositivePart => delta_lo <= 0.0,
            MomentMode::NegativePart => delta_hi >= 0.0 && delta_lo >= 0.0,
            _ => false,
        };
        if skip {
            continue;
        }
        let scale = delta_lo.abs().max(delta_hi.abs()).max(1e-3);
        let tol = 1e-10 * pow_k(scale, k, k_int) * len;
        let raw = |x: f64| delta_lo - main_term_diff(seg.lo, x - seg.lo);
        let mut add_piece = |lo: f64, hi: f64, sign: f64| -> Result<()> {
            if hi <= lo {
                return Ok(());
            }
            let mut f = |x: f64| pow_k(sign * raw(x), k, k_int);
            let (v, e) = quad::adaptive(lo, hi, tol, 10, &mut f);
            if e > tol * 1e3 {
                return Err(Error::NonConvergence(format!(
                    "integrate_moment: segment [{lo}, {hi}] quadrature error {e:.3e} \
                     above budget {:.3e}",
                    tol * 1e3
                )));
            }
            total = total + v;
            error_bound += e;
            Ok(())
        };
        if needs_sign && delta_lo > 0.0 && delta_hi < 0.0 {
            let r = root_in_segment(delta_lo, seg.lo, len).expect("straddling segment has root");
            match mode {
                MomentMode::Absolute => {
                    add_piece(seg.lo, r, 1.0)?;
                    add_piece(r, seg.hi, -1.0)?;
                }
                MomentMode::PositivePart => add_piece(seg.lo, r, 1.0)?,
                MomentMode::NegativePart => add_piece(r, seg.hi, -1.0)?,
                MomentMode::Signed => unreachable!(),
            }
        } else {
            let sign = match mode {
                MomentMode::Signed => 1.0,
                _ => {
                    if delta_lo > 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            match (mode, sign > 0.0) {
                (MomentMode::PositivePart, false) | (MomentMode::NegativePart, true) => {}
                _ => add_piece(seg.lo, seg.hi, sign)?,
            }
        }
    }
    Ok(MomentReport {
        a,
        b,
        k,
        mode,
        value: total.to_f64(),
        error_bound,
        segment_count,
        elapsed: start.elapsed(),
    })
}

/// F(T) = ∫₁ᵀ Δ²(x) dx − C·T^{3/2}, C the mean-square constant
/// ζ(3/2)⁴/(6π²ζ(3)).
pub fn cramer_deviation(t: f64) -> Result<f64> {
    ensure!(
        t.is_finite() && (1.0..=1e8).contains(&t),
        "cramer_deviation: T must be in [1, 10^8], got {t}"
    );
    let main = consts::CRAMER * (Dd::from_f64(t).sqrt() * t);
    if t == 1.0 {
        return Ok((-main).to_f64());
    }
    let integral = integrate_moment(1.0, t, 2.0, MomentMode::Signed)?.value;
    Ok((Dd::from_f64(integral) - main).to_f64())
}

/// ∫₀ᵀ Δ(x) dx − T/4. Below 1, D = 0 and the integral of −M has the closed
/// form −I1 (the log singularity is integrable: ∫₀¹ x log x dx = −1/4).
pub fn voronoi_mean_deviation(t: f64) -> Result<f64> {
    ensure!(
        t.is_finite() && t > 0.0 && t <= 1e8,
        "voronoi_mean_deviation: T must be in (0, 10^8], got {t}"
    );
    let anti = Antider::new();
    let (_, i1, _) = anti.eval(t.min(1.0));
    let mut acc = -i1;
    if t > 1.0 {
        let tail = integrate_moment(1.0, t, 1.0, MomentMode::Signed)?.value;
        acc = acc + tail;
    }
    Ok((acc - Dd::from_f64(t) / 4.0).to_f64())
}

/// ∫_T^{T+H} (Δ(x+U) − Δ(x))² dx, exactly piecewise: the integrand is
/// (ΔD − ΔM(x))² with ΔD a constant integer on each piece of the merged
/// lattice {m} ∪ {m − U}, and ΔM(x) = M(x+U) − M(x) evaluated in the
/// cancellation-free form. U = 0 returns 0.
pub fn jutila_lhs(t: f64, h: f64, u: f64) -> Result<f64> {
    ensure!(
        t.is_finite() && h.is_finite() && u.is_finite() && t >= 1e3 && h >= 1.0 && u >= 0.0,
        "jutila_lhs: need T >= 10^3, H >= 1, U >= 0, got T={t}, H={h}, U={u}"
    );
    ensure!(h <= 1e8, "jutila_lhs: H must be <= 10^8, got {h}");
    ensure!(
        t + h + u <= 1e12,
        "jutila_lhs: T + H + U must be <= 10^12, got {}",
        t + h + u
    );
    if u == 0.0 {
        return Ok(0.0);
    }
    ensure!(u >= 1.0, "jutila_lhs: U must be 0 or >= 1, got {u}");
    let mut total = 0.0;
    let mut comp = 0.0;
    for seg in SegmentSweep::with_shift(t, t + h, u)? {
        let dd_jump = (seg.d_shifted.expect("shifted sweep") - seg.d) as f64;
        let mut f = |x: f64| {
            let dm = main_term_diff(x, u);
            let v = dd_jump - dm;
            v * v
        };
        let (v, e) = quad::gl16_with_error(seg.lo, seg.hi, &mut f);
        let v = if e > 1e-10 * v.abs().max(1e-9) {
            let (v2, _) = quad::adaptive(seg.lo, seg.hi, 1e-12 * v.abs().max(1e-9), 8, &mut f);
            v2
        } else {
            v
        };
        // Neumaier-compensated accumulation over up to 2·10⁸ pieces
        let s = total + v;
        if total.abs() >= v.abs() {
            comp += (total - s) + v;
        } else {
            comp += (v - s) + total;
        }
        total = s;
    }
    Ok(total + comp)
}

/// Shared candidate scan: sup over 0 ≤ u ≤ U of |Δ(x+u) − Δ(x)|, exactly.
/// Within each piece between jump points the difference is J − drift(u)
/// with J constant and drift increasing, so the sup over the whole range is
/// attained at u = 0, u = U, or one-sided limits at the integers in
/// (x, x+U] — all of which are checked. `d_of` supplies d(m).
fn max_abs_shift_diff(x: f64, u: f64, mut d_of: impl FnMut(u64) -> u32) -> f64 {
    let fx = x.floor() as u64;
    let fxu = (x + u).floor() as u64;
    let mut best = 0.0f64;
    let mut jumps = 0.0f64;
    for m in fx + 1..=fxu {
        let drift = main_term_diff(x, m as f64 - x);
        best = best.max((jumps - drift).abs()); // left limit at m
        jumps += d_of(m) as f64;
        best = best.max((jumps - drift).abs()); // value at m
    }
    best.max((jumps - main_term_diff(x, u)).abs()) // u = U
}

/// max_{0≤u≤U} |Δ(x+u) − Δ(x)|, exact over the finite candidate set.
pub fn max_diff(x: f64, u: f64) -> Result<f64> {
    ensure!(
        x.is_finite() && u.is_finite() && x >= 1.0 && u > 0.0 && u <= 1e6 && x + u <= 1e12,
        "max_diff: need 1 <= x, 0 < U <= 10^6, x + U <= 10^12, got x={x}, U={u}"
    );
    let fx = x.floor() as u64;
    let fxu = (x + u).floor() as u64;
    if fxu > fx {
        let mut stream = WindowStream::new(fx + 1, fxu + 1)?;
        Ok(max_abs_shift_diff(x, u, move |m| stream.d(m)))
    } else {
        Ok(max_abs_shift_diff(x, u, |_| 0))
    }
}

const MAXDIFF_WORK_BUDGET: f64 = 2e9;

/// Midpoint-sampled ∫_T^{T+H} max_{0≤u≤U}|Δ(x+u) − Δ(x)|² dx: each sample
/// is an exact [`max_diff`] evaluation; the sampling density is the only
/// approximation (the self-consistency check doubles it).
pub fn maxdiff_integral(t: f64, h: f64, u: f64, samples_per_unit: u32) -> Result<MaxDiffReport> {
    ensure!(
        t.is_finite() && h.is_finite() && u.is_finite(),
        "maxdiff_integral: parameters must be finite"
    );
    ensure!(
        t >= 1e3 && (1.0..=1e7).contains(&h) && u > 0.0 && u <= 1e4 && samples_per_unit >= 1,
        "maxdiff_integral: need T >= 10^3, 1 <= H <= 10^7, 0 < U <= 10^4, samples >= 1, \
         got T={t}, H={h}, U={u}, samples={samples_per_unit}"
    );
    ensure!(
        t + h + u <= 1e12,
        "maxdiff_integral: T + H + U exceeds 10^12"
    );
    let n_samples = (h * samples_per_unit as f64).ceil();
    let work = n_samples * (u + 2.0);
    if work > MAXDIFF_WORK_BUDGET {
        return Err(Error::ResourceBudget(format!(
            "maxdiff_integral: H·U·samples work {work:.3e} exceeds the {MAXDIFF_WORK_BUDGET:.0e} budget"
        )));
    }
    let lo = t.floor() as u64;
    let hi = (t + h + u).floor() as u64 + 1;
    let window = arith::sieve_window(lo, hi)?;
    let n_samples = n_samples as u64;
    let step = 1.0 / samples_per_unit as f64;
    let mut integral = 0.0;
    let mut max_observed = 0.0;
    let mut argmax_x = t;
    for i in 0..n_samples {
        let x = t + (i as f64 + 0.5) * step;
        if x >= t + h {
            break;
        }
        let md = max_abs_shift_diff(x, u, |m| window.d(m));
        integral += md * md * step;
        if md > max_observed {
            max_observed = md;
            argmax_x = x;
        }
    }
    Ok(MaxDiffReport {
        t,
        h,
        u,
        integral_value: integral,
        samples_per_unit,
        max_observed,
        argmax_x,
    })
}

/// ∫_T^{T+T^β} |Δ(x)| dx / (T^β · T^{1/4}).
pub fn tsang_ratio(t: f64, beta: f64) -> Result<f64> {
    ensure!(
        t.is_finite() && (1e3..=1e8).contains(&t),
        "tsang_ratio: T must be in [10^3, 10^8], got {t}"
    );
    ensure!(
        (0.25..1.0).contains(&beta),
        "tsang_ratio: beta must be in [1/4, 1), got {beta}"
    );
    let h = t.powf(beta);
    ensure!(
        h <= 1e7,
        "tsang_ratio: T^beta = {h:.3e} exceeds the 10^7 interval budget"
    );
    let v = integrate_moment(t, t + h, 1.0, MomentMode::Absolute)?.value;
    Ok(v / (h * t.powf(0.25)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{delta, divisor_count};
    use crate::experiment::rng::SplitMix64;

    #[test]
    fn sweep_unit_segments() {
        let segs: Vec<Segment> = SegmentSweep::new(1.0, 5.5).unwrap().collect();
        let lohi: Vec<(f64, f64)> = segs.iter().map(|s| (s.lo, s.hi)).collect();
        assert_eq!(
            lohi,
            vec![(1.0, 2.0), (2.0, 3.0), (3.0, 4.0), (4.0, 5.0), (5.0, 5.5)]
        );
        let ds: Vec<u128> = segs.iter().map(|s| s.d).collect();
        assert_eq!(ds, vec![1, 3, 5, 8, 10]);
        assert!(segs.iter().all(|s| s.d_shifted.is_none()));

        let segs: Vec<Segment> = SegmentSweep::new(2.5, 4.5).unwrap().collect();
        let lohi: Vec<(f64, f64)> = segs.iter().map(|s| (s.lo, s.hi)).collect();
        assert_eq!(lohi, vec![(2.5, 3.0), (3.0, 4.0), (4.0, 4.5)]);
        assert_eq!(segs.iter().map(|s| s.d).collect::<Vec<_>>(), vec![3, 5, 8]);
    }

    #[test]
    fn sweep_jump_sizes_match_sieve() {
        let segs: Vec<Segment> = SegmentSweep::new(1000.0, 1050.0).unwrap().collect();
        for pair in segs.windows(2) {
            let m = pair[1].lo as u64;
            assert_eq!(
                (pair[1].d - pair[0].d) as u32,
                divisor_count(m).unwrap(),
                "jump at {m}"
            );
        }
    }

    #[test]
    fn sweep_with_shift_breaks_at_both_lattices() {
        let segs: Vec<Segment> = SegmentSweep::with_shift(10.0, 12.0, 0.5).unwrap().collect();
        let lohi: Vec<(f64, f64)> = segs.iter().map(|s| (s.lo, s.hi)).collect();
        assert_eq!(
            lohi,
            vec![(10.0, 10.5), (10.5, 11.0), (11.0, 11.5), (11.5, 12.0)]
        );
        let d: Vec<u128> = segs.iter().map(|s| s.d).collect();
        assert_eq!(d, vec![27, 27, 29, 29]);
        let ds: Vec<u128> = segs.iter().map(|s| s.d_shifted.unwrap()).collect();
        assert_eq!(ds, vec![27, 29, 29, 35]);

        // integer shift: both lattices coincide, still one piece per unit
        let segs: Vec<Segment> = SegmentSweep::with_shift(10.0, 12.0, 2.0).unwrap().collect();
        let lohi: Vec<(f64, f64)> = segs.iter().map(|s| (s.lo, s.hi)).collect();
        assert_eq!(lohi, vec![(10.0, 11.0), (11.0, 12.0)]);
        let ds: Vec<u128> = segs.iter().map(|s| s.d_shifted.unwrap()).collect();
        assert_eq!(ds, vec![35, 37]); // D(12), D(13)
    }

    #[test]
    fn closed_form_first_moment_on_unit_interval() {
        // ∫_1^2 (1 − M(x)) dx, frozen from the symbolic antiderivative
        let r = integrate_moment(1.0, 2.0, 1.0, MomentMode::Signed).unwrap();
        assert!((r.value - 0.13205864417551080).abs() < 1e-12, "got {}", r.value);
        assert_eq!(r.segment_count, 1);
        assert_eq!(r.error_bound, 0.0);
    }

    #[test]
    fn closed_form_second_moment_on_unit_interval() {
        // ∫_1^2 (1 − M(x))² dx, frozen from the symbolic antiderivative
        let r = integrate_moment(1.0, 2.0, 2.0, MomentMode::Signed).unwrap();
        assert!((r.value - 0.21790284424999171).abs() < 1e-12, "got {}", r.value);
    }

    #[test]
    fn zeroth_moment_is_length() {
        let r = integrate_moment(5.0, 17.25, 0.0, MomentMode::Absolute).unwrap();
        assert_eq!(r.value, 12.25);
        let r = integrate_moment(5.0, 17.25, 0.0, MomentMode::Signed).unwrap();
        assert_eq!(r.value, 12.25);
    }

    #[test]
    fn signed_mode_rejects_fractional_k() {
        assert!(matches!(
            integrate_moment(1.0, 2.0, 1.5, MomentMode::Signed),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn interval_additivity() {
        for &(k, mode) in &[
            (2.0, MomentMode::Signed),
            (1.0, MomentMode::Absolute),
            (3.0, MomentMode::PositivePart),
        ] {
            let whole = integrate_moment(1000.0, 1002.0, k, mode).unwrap().value;
            let left = integrate_moment(1000.0, 1001.3, k, mode).unwrap().value;
            let right = integrate_moment(1001.3, 1002.0, k, mode).unwrap().value;
            let diff = (whole - (left + right)).abs();
            assert!(
                diff <= 1e-9 * whole.abs().max(1.0),
                "additivity broke for {mode:?} k={k}: {diff}"
            );
        }
    }

    #[test]
    fn sign_decomposition_consistency() {
        for k in [1.0, 2.0, 3.0] {
            let abs = integrate_moment(1000.0, 1100.0, k, MomentMode::Absolute).unwrap();
            let pos = integrate_moment(1000.0, 1100.0, k, MomentMode::PositivePart).unwrap();
            let neg = integrate_moment(1000.0, 1100.0, k, MomentMode::NegativePart).unwrap();
            let budget = abs.error_bound + pos.error_bound + neg.error_bound + 1e-9;
            assert!(
                (abs.value - (pos.value + neg.value)).abs() <= budget,
                "decomposition k={k}: |{} - ({} + {})| > {budget}",
                abs.value,
                pos.value,
                neg.value
            );
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        // |Δ| on a range where Δ < 0 throughout equals −∫Δ by closed form
        // Δ(x) = 1 − M(x) < 0 for x ∈ [1.5, 2): pick a range inside
        let abs = integrate_moment(1.7, 1.9, 1.0, MomentMode::Absolute).unwrap();
        let signed = integrate_moment(1.7, 1.9, 1.0, MomentMode::Signed).unwrap();
        assert!((abs.value + signed.value).abs() < 1e-11);
        // and k = 2 absolute equals k = 2 signed everywhere
        let abs2 = integrate_moment(100.0, 140.0, 2.0, MomentMode::Absolute).unwrap();
        let signed2 = integrate_moment(100.0, 140.0, 2.0, MomentMode::Signed).unwrap();
        assert!(
            (abs2.value - signed2.value).abs() < 1e-8 * signed2.value,
            "abs {} vs signed {}",
            abs2.value,
            signed2.value
        );
    }

    #[test]
    fn root_finder_lands_on_zero() {
        let mut found = 0;
        for seg in SegmentSweep::new(10_000.0, 10_100.0).unwrap() {
            let delta_lo = delta(seg.lo).unwrap();
            if let Some(r) = root_in_segment(delta_lo, seg.lo, seg.hi - seg.lo) {
                assert!(
                    delta(r).unwrap().abs() <= ROOT_F_TOL,
                    "root at {r} misses zero: {}",
                    delta(r).unwrap()
                );
                found += 1;
            }
        }
        assert!(found >= 1, "no roots in [10^4, 10^4 + 100]?");
    }

    #[test]
    fn mean_square_tracks_asymptotic_at_desk_scale() {
        // ∫_1^{10^6} Δ² / (C·10⁹) ∈ [0.9, 1.1]
        let r = integrate_moment(1.0, 1e6, 2.0, MomentMode::Signed).unwrap();
        let main = consts::CRAMER.to_f64() * 1e9;
        let ratio = r.value / main;
        assert!(
            (0.9..=1.1).contains(&ratio),
            "mean square ratio {ratio} outside [0.9, 1.1]"
        );
    }

    #[test]
    fn doubling_ratio_matches_growth_exponent() {
        // ∫_{2T}^{4T} Δ² / ∫_T^{2T} Δ² ≈ 2^{3/2} ≈ 2.83
        let lo = integrate_moment(1e5, 2e5, 2.0, MomentMode::Signed).unwrap().value;
        let hi = integrate_moment(2e5, 4e5, 2.0, MomentMode::Signed).unwrap().value;
        let ratio = hi / lo;
        assert!(
            (2.6..=3.1).contains(&ratio),
            "doubling ratio {ratio} outside [2.6, 3.1]"
        );
    }

    #[test]
    fn cramer_deviation_values() {
        let c = consts::CRAMER.to_f64();
        assert!((cramer_deviation(1.0).unwrap() + c).abs() < 1e-15);
        // |F(T)| / T^{5/4} stays small at 10⁵
        let f = cramer_deviation(1e5).unwrap();
        assert!(f.abs() / 1e5f64.powf(1.25) < 10.0, "F(1e5) = {f}");
    }

    #[test]
    fn voronoi_mean_deviation_values() {
        // T = 1: closed form −(2γ−1)/2
        let v = voronoi_mean_deviation(1.0).unwrap();
        assert!((v - (-0.07721566490153287)).abs() < 1e-12, "got {v}");
        // |∫_0^T Δ − T/4| ≤ 5·T^{3/4} at T = 10⁴
        let v = voronoi_mean_deviation(1e4).unwrap();
        assert!(v.abs() <= 5.0 * 1e4f64.powf(0.75), "deviation {v} too large");
    }

    #[test]
    fn jutila_lhs_zero_shift() {
        assert_eq!(jutila_lhs(1e4, 100.0, 0.0).unwrap(), 0.0);
        assert!(jutila_lhs(1e4, 100.0, 0.5).is_err());
    }

    #[test]
    fn jutila_lhs_matches_dense_sampling() {
        let (t, h, u) = (1e4, 10.0, 2.0);
        let exact = jutila_lhs(t, h, u).unwrap();
        // brute force: midpoint rule at 10³ nodes per unit on Δdiff²
        let nodes = (h * 1000.0) as u64;
        let mut brute = 0.0;
        for i in 0..nodes {
            let x = t + (i as f64 + 0.5) / 1000.0;
            let d = arith::delta_diff(x, u).unwrap();
            brute += d * d / 1000.0;
        }
        assert!(
            ((exact - brute) / brute).abs() < 1e-6,
            "exact {exact} vs brute {brute}"
        );
    }

    #[test]
    fn max_diff_pure_drift_below_next_integer() {
        // no integer in (10.5, 10.8]: the max is the drift at u = U
        let got = max_diff(10.5, 0.3).unwrap();
        let want = main_term_diff(10.5, 0.3).abs();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn max_diff_matches_candidate_enumeration() {
        let x = 10.5;
        let base = delta(x).unwrap();
        let mut want = 0.0f64;
        for m in [11u64, 12] {
            let at = delta(m as f64).unwrap();
            let left = at - divisor_count(m).unwrap() as f64;
            want = want.max((at - base).abs()).max((left - base).abs());
        }
        want = want.max((delta(12.5).unwrap() - base).abs());
        let got = max_diff(x, 2.0).unwrap();
        assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
    }

    #[test]
    fn max_diff_monotone_in_u() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..50 {
            let x = 1.0 + rng.next_f64() * 1e6;
            let u1 = 0.5 + rng.next_f64() * 20.0;
            let u2 = u1 + rng.next_f64() * 20.0;
            let m1 = max_diff(x, u1).unwrap();
            let m2 = max_diff(x, u2).unwrap();
            assert!(m1 <= m2 + 1e-12, "max_diff({x}, {u1}) = {m1} > ({x}, {u2}) = {m2}");
        }
    }

    #[test]
    fn maxdiff_integral_small_shift_vanishes() {
        let r = maxdiff_integral(1e3, 50.0, 0.01, 1).unwrap();
        assert!(r.integral_value < 50.0 * 1e-2, "got {}", r.integral_value);
        assert!(r.max_observed < 0.1);
    }

    #[test]
    fn maxdiff_integral_budget() {
        assert!(matches!(
            maxdiff_integral(1e3, 1e7, 1e4, 1),
            Err(Error::ResourceBudget(_))
        ));
    }

    #[test]
    fn maxdiff_integral_refinement_stability() {
        let a = maxdiff_integral(1e5, 1e4, 50.0, 1).unwrap();
        let b = maxdiff_integral(1e5, 1e4, 50.0, 2).unwrap();
        let rel = ((a.integral_value - b.integral_value) / a.integral_value).abs();
        assert!(rel < 0.05, "doubling samples moved the integral by {rel:.3}");
        assert!(a.argmax_x >= 1e5 && a.argmax_x <= 1e5 + 1e4);
        assert!(a.max_observed > 0.0);
    }

    #[test]
    fn tsang_ratio_finite_and_guarded() {
        let r = tsang_ratio(1e4, 0.3).unwrap();
        assert!(r.is_finite() && r > 0.0);
        assert!(tsang_ratio(1e8, 0.9).is_err()); // T^β over budget
        assert!(tsang_ratio(1e4, 0.2).is_err());
    }
}
