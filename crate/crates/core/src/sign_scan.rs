//! Sign structure of Δ: exact sign-change location, gap statistics,
//! persistent large-|Δ| intervals, the ω(x) positivity detector, and the
//! sign-change-anchored probe for short first-moment integrals.

use crate::arith;
use crate::dd::Dd;
use crate::moment::{self, MomentMode, SegmentSweep};
use crate::{ensure, Error, Result};

/// How Δ crossed zero: continuously inside a segment (downward, since Δ
/// strictly decreases there) or by a jump at an integer (upward).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeKind {
    ContinuousRoot,
    JumpCrossing,
}

impl ChangeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChangeKind::ContinuousRoot => "continuous_root",
            ChangeKind::JumpCrossing => "jump_crossing",
        }
    }
}

/// One sign change of Δ.
#[derive(Debug, Clone, Copy)]
pub struct SignChange {
    pub location: f64,
    pub kind: ChangeKind,
    /// The unit segment [m, m+1) containing the change.
    pub segment: u64,
}

/// Maximal intervals on which Δ stays above c·T^{1/4} (resp. below the
/// negative), with fractional endpoints located exactly.
#[derive(Debug, Clone)]
pub struct PersistenceReport {
    pub t: f64,
    pub h: f64,
    pub threshold_coefficient: f64,
    pub min_length: f64,
    pub plus_intervals: Vec<(f64, f64)>,
    pub minus_intervals: Vec<(f64, f64)>,
    pub plus_count: usize,
    pub minus_count: usize,
}

/// Parameters of the ω detector: shift window U and margin δ.
#[derive(Debug, Clone, Copy)]
pub struct OmegaParams {
    pub u: f64,
    pub delta: f64,
}

/// Sign-change anchors in [T, 2T], thinned to H0-separation, with the
/// first-moment integral ∫_{x_j}^{x_j+H} |Δ| at each anchor.
#[derive(Debug, Clone)]
pub struct TsangAnchorReport {
    pub t: f64,
    pub h0: f64,
    pub h: f64,
    /// R, the number of anchors surviving the thinning.
    pub anchor_count: usize,
    pub min_integral: f64,
    pub median_integral: f64,
    /// min_integral / (H·T^{1/2}·R^{−1/2}·log^{5/2}T).
    pub normalized_min: f64,
}

/// Drives `visit(segment, Δ(lo), Δ(hi⁻))` over every constant-D piece of
/// [a, b], evaluating the main term in double-double once per breakpoint.
fn sweep_deltas<F>(a: f64, b: f64, mut visit: F) -> Result<()>
where
    F: FnMut(f64, f64, u128, f64, f64) -> Result<()>,
{
    let mut cache: Option<(f64, Dd)> = None;
    for seg in SegmentSweep::new(a, b)? {
        let m_lo = match cache {
            Some((x, v)) if x == seg.lo => v,
            _ => arith::main_term(seg.lo)?,
        };
        let m_hi = arith::main_term(seg.hi)?;
        cache = Some((seg.hi, m_hi));
        let d = Dd::from_u128(seg.d);
        let delta_lo = (d - m_lo).to_f64();
        let delta_hi = (d - m_hi).to_f64();
        visit(seg.lo, seg.hi, seg.d, delta_lo, delta_hi)?;
    }
    Ok(())
}

/// All sign changes of Δ in [a, b], in increasing order. Within a segment
/// Δ is strictly decreasing, so a continuous crossing exists iff
/// Δ(m⁺) > 0 > Δ((m+1)⁻); upward crossings happen only by the jump d(m)
/// at an integer.
pub fn scan_sign_changes(a: f64, b: f64) -> Result<Vec<SignChange>> {
    ensure!(
        a.is_finite() && b.is_finite() && a >= 1.0 && a < b && b <= 1e10,
        "scan_sign_changes: need 1 <= a < b <= 10^10, got [{a}, {b}]"
    );
    ensure!(
        b - a <= 1e8,
        "scan_sign_changes: range length {} exceeds 10^8",
        b - a
    );
    let mut out = Vec::new();
    let mut prev_end: Option<f64> = None;
    sweep_deltas(a, b, |lo, hi, _d, delta_lo, delta_hi| {
        if let Some(prev) = prev_end {
            if prev < 0.0 && delta_lo >= 0.0 {
                out.push(SignChange {
                    location: lo,
                    kind: ChangeKind::JumpCrossing,
                    segment: lo as u64,
                });
            }
        }
        if delta_lo > 0.0 && delta_hi < 0.0 {
            if let Some(root) = moment::root_in_segment(delta_lo, lo, hi - lo) {
                out.push(SignChange {
                    location: root,
                    kind: ChangeKind::ContinuousRoot,
                    segment: lo.floor() as u64,
                });
            }
        }
        prev_end = Some(delta_hi);
        Ok(())
    })?;
    Ok(out)
}

/// Maximum spacing between consecutive sign changes in [a, b].
pub fn max_sign_gap(a: f64, b: f64) -> Result<f64> {
    let changes = scan_sign_changes(a, b)?;
    if changes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "max_sign_gap: found {} sign change(s) in [{a}, {b}], need at least 2",
            changes.len()
        )));
    }
    let gap = changes
        .windows(2)
        .map(|w| w[1].location - w[0].location)
        .fold(0.0f64, f64::max);
    Ok(gap)
}

/// Maximal intervals in [T, T+H] where Δ ≥ c·T^{1/4} (plus list) or
/// Δ ≤ −c·T^{1/4} (minus list), of length ≥ L. Interval endpoints are
/// exact: entries/exits inside a segment are located by root solving,
/// and intra-segment monotonicity makes endpoint checks sufficient.
pub fn persistent_intervals(t: f64, h: f64, c: f64, l: f64) -> Result<PersistenceReport> {
    ensure!(
        t.is_finite() && h.is_finite() && c.is_finite() && l.is_finite(),
        "persistent_intervals: parameters must be finite"
    );
    ensure!(t >= 1e4, "persistent_intervals: T must be >= 10^4, got {t}");
    ensure!(
        h > 0.0 && h <= 1e8 && t + h <= 1e10,
        "persistent_intervals: need 0 < H <= 10^8 and T+H <= 10^10, got H={h}"
    );
    ensure!(c > 0.0, "persistent_intervals: c must be positive, got {c}");
    ensure!(l > 0.0, "persistent_intervals: L must be positive, got {l}");
    let thr = c * t.powf(0.25);
    let b = t + h;
    let mut plus: Vec<(f64, f64)> = Vec::new();
    let mut minus: Vec<(f64, f64)> = Vec::new();
    let mut plus_run: Option<f64> = None;
    let mut minus_run: Option<f64> = None;
    sweep_deltas(t, b, |lo, hi, _d, delta_lo, delta_hi| {
        // plus side: condition can only begin at a breakpoint and can only
        // end inside a segment (Δ jumps up at integers, decreases between)
        if plus_run.is_none() && delta_lo >= thr {
            plus_run = Some(lo);
        }
        if let Some(start) = plus_run {
            if delta_hi < thr {
                let end = if delta_lo - thr <= 0.0 {
                    lo
                } else {
                    moment::root_in_segment(delta_lo - thr, lo, hi - lo).unwrap_or(hi)
                };
                if end - start >= l {
                    plus.push((start, end));
                }
                plus_run = None;
            }
        }
        // minus side: mirror image — begins inside a segment (downward
        // crossing of −thr), ends at an integer jump
        if let Some(start) = minus_run {
            if delta_lo > -thr {
                if lo - start >= l {
                    minus.push((start, lo));
                }
                minus_run = None;
            }
        }
        if minus_run.is_none() {
            if delta_lo <= -thr {
                minus_run = Some(lo);
            } else if delta_hi < -thr {
                let start = moment::root_in_segment(delta_lo + thr, lo, hi - lo).unwrap_or(hi);
                minus_run = Some(start);
            }
        }
        Ok(())
    })?;
    if let Some(start) = plus_run {
        if b - start >= l {
            plus.push((start, b));
        }
    }
    if let Some(start) = minus_run {
        if b - start >= l {
            minus.push((start, b));
        }
    }
    Ok(PersistenceReport {
        t,
        h,
        threshold_coefficient: c,
        min_length: l,
        plus_count: plus.len(),
        minus_count: minus.len(),
        plus_intervals: plus,
        minus_intervals: minus,
    })
}

/// The ω detector: Δ₊(x)² − 4·(max_{0≤u≤U}|Δ(x+u)−Δ(x)|)² − δ·x^{1/2}.
/// Positivity certifies |Δ| ≥ √δ·x^{1/4} with persistent sign on [x, x+U].
pub fn omega(x: f64, params: OmegaParams) -> Result<f64> {
    ensure!(
        x.is_finite() && x >= 16.0,
        "omega: x must be >= 16, got {x}"
    );
    ensure!(
        params.u > 0.0 && x + params.u <= 1e12,
        "omega: need U > 0 and x + U <= 10^12, got U={}",
        params.u
    );
    ensure!(
        params.delta > 0.0 && params.delta < 1.0,
        "omega: delta must be in (0, 1), got {}",
        params.delta
    );
    let dp = arith::delta(x)?.max(0.0);
    let md = moment::max_diff(x, params.u)?;
    Ok(dp * dp - 4.0 * md * md - params.delta * x.sqrt())
}

/// Measure estimate of {x ∈ [T, T+H] : ω(x) > 0} by equispaced midpoint
/// sampling: H · (positive count) / samples.
pub fn omega_positive_measure(
    t: f64,
    h: f64,
    params: OmegaParams,
    samples: u64,
) -> Result<f64> {
    ensure!(
        samples >= 1000,
        "omega_positive_measure: samples must be >= 10^3, got {samples}"
    );
    ensure!(
        t.is_finite() && h.is_finite() && t >= 16.0 && h > 0.0 && t + h + params.u <= 1e12,
        "omega_positive_measure: need T >= 16, H > 0, T+H+U <= 10^12"
    );
    let mut positive = 0u64;
    for i in 0..samples {
        let x = t + (i as f64 + 0.5) * h / samples as f64;
        if omega(x, params)? > 0.0 {
            positive += 1;
        }
    }
    Ok(h * positive as f64 / samples as f64)
}

const SCAN_CHUNK: f64 = 5e7;

/// Sign-change anchors in [T, 2T] thinned greedily to H0-separation, each
/// probed with ∫_{x_j}^{x_j+H} |Δ|. Reports the count R, the minimum and
/// median integrals, and min/(H·T^{1/2}·R^{−1/2}·log^{5/2}T).
pub fn tsang_anchor_probe(t: f64, h0: f64, h: f64) -> Result<TsangAnchorReport> {
    ensure!(
        t.is_finite() && h0.is_finite() && h.is_finite() && t >= 2.0 && t <= 1e9,
        "tsang_anchor_probe: need 2 <= T <= 10^9, got {t}"
    );
    ensure!(
        h > 2.0 && h <= h0 / 2.0,
        "tsang_anchor_probe: need 2 < H <= H0/2, got H={h}, H0={h0}"
    );
    // anchors: exact sign-change points, scanned in chunks with one unit
    // of overlap so jump crossings at chunk boundaries are not lost
    let mut anchors: Vec<f64> = Vec::new();
    let mut last_kept = f64::NEG_INFINITY;
    let mut lo = t;
    while lo < 2.0 * t {
        let hi = (lo + SCAN_CHUNK).min(2.0 * t);
        let scan_lo = if lo == t { lo } else { lo - 1.0 };
        for ch in scan_sign_changes(scan_lo, hi)? {
            if ch.location < lo {
                continue; // covered by the previous chunk
            }
            if ch.location - last_kept >= h0 || last_kept == f64::NEG_INFINITY {
                anchors.push(ch.location);
                last_kept = ch.location;
            }
        }
        lo = hi;
    }
    if anchors.is_empty() {
        return Err(Error::InsufficientData(format!(
            "tsang_anchor_probe: no sign changes found in [{t}, {}]",
            2.0 * t
        )));
    }
    let mut integrals: Vec<f64> = Vec::with_capacity(anchors.len());
    for &x in &anchors {
        let report = moment::integrate_moment(x, x + h, 1.0, MomentMode::Absolute)?;
        integrals.push(report.value);
    }
    let r = integrals.len();
    let mut sorted = integrals.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if r % 2 == 1 {
        sorted[r / 2]
    } else {
        0.5 * (sorted[r / 2 - 1] + sorted[r / 2])
    };
    let min = sorted[0];
    let norm = h * t.sqrt() * (r as f64).powf(-0.5) * t.ln().powf(2.5);
    Ok(TsangAnchorReport {
        t,
        h0,
        h,
        anchor_count: r,
        min_integral: min,
        median_integral: median,
        normalized_min: min / norm,
    })
}
