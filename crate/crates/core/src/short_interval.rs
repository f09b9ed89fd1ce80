//! Short-interval machinery: the main-term evaluator for the mean square of
//! Δ(x+U) − Δ(x), the dyadic telescoping decomposition of shift
//! differences, greedy large-value counting, exponent-pair comparison
//! bounds, and pointwise envelope diagnostics.

use crate::arith::{self, divisor_sum, main_term_diff, WindowStream};
use crate::moment;
use crate::quad;
use crate::{ensure, Error, Result};

/// Both sides of the short-interval mean-square comparison.
#[derive(Debug, Clone, Copy)]
pub struct JutilaEstimate {
    pub t: f64,
    pub h: f64,
    pub u: f64,
    /// ∫_T^{T+H} (Δ(x+U) − Δ(x))² dx, exact piecewise.
    pub lhs: f64,
    /// The main-term sum (1/4π²) Σ_{n≤T/2U} d²(n) n^{−3/2} ∫ 4 x^{1/2} sin²(πU√(n/x)) dx.
    pub rhs_main: f64,
    /// lhs / rhs_main (NaN when rhs_main is 0, e.g. U = 0).
    pub ratio: f64,
    /// ⌊T/(2U)⌋.
    pub n_terms: u64,
    /// Accumulated inner-quadrature error estimate of rhs_main.
    pub quadrature_error: f64,
    /// Magnitude of the comparison's error term, T·log³T·log log T — the
    /// scale on which lhs and rhs_main may legitimately differ.
    pub predicted_error: f64,
}

/// Exponent pair (κ, λ) with 0 < κ ≤ 1/2 ≤ λ ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub kappa: f64,
    pub lambda: f64,
}

impl ExponentPair {
    pub fn new(kappa: f64, lambda: f64) -> Result<ExponentPair> {
        ensure!(
            kappa.is_finite() && lambda.is_finite() && kappa > 0.0 && kappa <= 0.5
                && (0.5..=1.0).contains(&lambda),
            "ExponentPair: need 0 < kappa <= 1/2 <= lambda <= 1, got ({kappa}, {lambda})"
        );
        Ok(ExponentPair { kappa, lambda })
    }

    /// The three standard presets: (1/2, 1/2), (2/7, 4/7), (1/6, 4/6).
    pub fn standard_presets() -> [ExponentPair; 3] {
        [
            ExponentPair { kappa: 0.5, lambda: 0.5 },
            ExponentPair { kappa: 2.0 / 7.0, lambda: 4.0 / 7.0 },
            ExponentPair { kappa: 1.0 / 6.0, lambda: 4.0 / 6.0 },
        ]
    }
}

/// Binary telescoping plan for a shift j0·b decomposed into dyadic-length
/// differences: j0 = Σ_{μ∈S} 2^{level−μ} and ν_μ = Σ_{ρ∈S, ρ<μ} 2^{μ−ρ}.
#[derive(Debug, Clone)]
pub struct DyadicPlan {
    /// The dyadic exponent (U = 2^level · b).
    pub level: u32,
    pub j0: u64,
    /// S: the exponents of the binary expansion, strictly increasing.
    pub mu_set: Vec<u32>,
    /// ν_μ for each μ ∈ S, in the same order.
    pub nu_values: Vec<u64>,
}

/// Well-separated large-|Δ(x+U)−Δ(x)| points found by the greedy scan.
#[derive(Debug, Clone)]
pub struct LargeValueReport {
    pub x: f64,
    pub u: f64,
    pub v: f64,
    /// Accepted points, increasing, pairwise ≥ V apart, all in [X/2, X].
    pub points: Vec<f64>,
    pub count: usize,
}

/// |Δ(x+U) − Δ(x)| measured against the standard comparison envelopes,
/// plus the pointwise |Δ(x)| against its cube-root-type envelope.
#[derive(Debug, Clone, Copy)]
pub struct BoundRatios {
    /// |Δ(x+U) − Δ(x)| itself.
    pub shift_diff: f64,
    /// shift_diff / (x^{1/4} U^{1/4}).
    pub vs_quarter_powers: f64,
    /// shift_diff / (x^{2/9} U^{1/3}).
    pub vs_x_two_ninths_u_third: f64,
    /// shift_diff / U^{1/2}.
    pub vs_sqrt_u: f64,
    /// shift_diff / U.
    pub vs_u: f64,
    /// shift_diff / x^{131/416}.
    pub vs_x_131_416: f64,
    /// |Δ(x)| / (x^{1/3} log^{5/3}x (log log x)^{1/3}).
    pub point_vs_cube_root_envelope: f64,
}

fn check_jutila_params(t: f64, h: f64, u: f64) -> Result<u64> {
    ensure!(
        t.is_finite() && h.is_finite() && u.is_finite() && t >= 1e3,
        "jutila_rhs: T must be >= 10^3, got {t}"
    );
    let rt = t.sqrt();
    ensure!(
        (1.0..=rt).contains(&u),
        "jutila_rhs: U must be in [1, sqrt(T)], got U={u} at T={t}"
    );
    ensure!(
        u == 0.0 || ((rt..=t).contains(&h)),
        "jutila_rhs: H must be in [sqrt(T), T], got H={h} at T={t}"
    );
    let n_max = (t / (2.0 * u)).floor() as u64;
    if n_max > 10_000_000 {
        return Err(Error::ResourceBudget(format!(
            "jutila_rhs: T/(2U) = {n_max} terms exceeds the 10^7 budget"
        )));
    }
    Ok(n_max)
}

/// Inner integral ∫_T^{T+H} x^{1/2} · 4 sin²(πU√(n/x)) dx by GL-16 panels
/// of width ≤ H/8, each bisected until two successive refinements agree.
/// Returns (value, final discrepancy estimate).
fn inner_integral(t: f64, h: f64, u: f64, n: u64) -> Result<(f64, f64)> {
    let f = |x: f64| {
        // sin of πU√(n/x), squared, times 4·x^{1/2}
        let s = (std::f64::consts::PI * u * (n as f64 / x).sqrt()).sin();
        4.0 * x.sqrt() * s * s
    };
    // first pass: 8 fixed panels set the scale
    let mut coarse = 0.0;
    for i in 0..8 {
        let a = t + h * i as f64 / 8.0;
        let b = t + h * (i + 1) as f64 / 8.0;
        coarse += quad::gl16(a, b, f);
    }
    let tol_panel = 1e-8 * coarse.abs() / 8.0;
    fn refine<F: Fn(f64) -> f64 + Copy>(
        a: f64,
        b: f64,
        v1: f64,
        tol: f64,
        depth: u32,
        n: u64,
        f: F,
    ) -> Result<(f64, f64)> {
        let m = 0.5 * (a + b);
        let v2 = quad::gl16(a, m, f) + quad::gl16(m, b, f);
        let disc = (v2 - v1).abs();
        if disc <= tol {
            return Ok((v2, disc));
        }
        if depth == 0 {
            return Err(Error::NonConvergence(format!(
                "jutila_rhs: inner integral for n = {n} failed to converge \
                 (residual {disc:.3e} vs target {tol:.3e})"
            )));
        }
        let (vl, el) = refine(a, m, quad::gl16(a, m, f), 0.5 * tol, depth - 1, n, f)?;
        let (vr, er) = refine(m, b, quad::gl16(m, b, f), 0.5 * tol, depth - 1, n, f)?;
        Ok((vl + vr, el + er))
    }
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..8 {
        let a = t + h * i as f64 / 8.0;
        let b = t + h * (i + 1) as f64 / 8.0;
        let v1 = quad::gl16(a, b, f);
        let (v, e) = refine(a, b, v1, tol_panel, 20, n, f)?;
        total += v;
        err += e;
    }
    Ok((total, err))
}

fn rhs_impl(t: f64, h: f64, u: f64, n_max: u64) -> Result<(f64, f64)> {
    let inv_4pi2 = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let mut stream = WindowStream::new(1, n_max + 1)?;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err_acc = 0.0;
    for n in 1..=n_max {
        let d = stream.d(n) as f64;
        let coeff = inv_4pi2 * d * d * (n as f64).powf(-1.5);
        let (integral, e) = inner_integral(t, h, u, n)?;
        let v = coeff * integral;
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
        err_acc += coeff * e;
    }
    Ok((sum + comp, err_acc))
}

/// Main-term sum for the short-interval mean square, with the sine-squared
/// kernel: (1/4π²) Σ_{n≤T/(2U)} d²(n) n^{−3/2} ∫_T^{T+H} 4 x^{1/2} sin²(πU√(n/x)) dx.
/// U = 0 is the trivial limit: 0.
pub fn jutila_rhs(t: f64, h: f64, u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    let n_max = check_jutila_params(t, h, u)?;
    Ok(rhs_impl(t, h, u, n_max)?.0)
}

/// [`jutila_rhs`] with the n-sum cut at `n_max` instead of ⌊T/(2U)⌋ —
/// exposes single terms and partial sums to independent verification.
pub fn jutila_rhs_truncated(t: f64, h: f64, u: f64, n_max: u64) -> Result<f64> {
    let full = check_jutila_params(t, h, u)?;
    ensure!(
        n_max >= 1 && n_max <= full,
        "jutila_rhs_truncated: n_max must be in [1, {full}], got {n_max}"
    );
    Ok(rhs_impl(t, h, u, n_max)?.0)
}

/// Evaluates both sides of the comparison and their ratio.
pub fn jutila_compare(t: f64, h: f64, u: f64) -> Result<JutilaEstimate> {
    let (rhs_main, quadrature_error, n_terms) = if u == 0.0 {
        (0.0, 0.0, 0)
    } else {
        let n_max = check_jutila_params(t, h, u)?;
        let (v, e) = rhs_impl(t, h, u, n_max)?;
        (v, e, n_max)
    };
    let lhs = moment::jutila_lhs(t, h, u)?;
    let ratio = if rhs_main > 0.0 { lhs / rhs_main } else { f64::NAN };
    let l = t.ln();
    Ok(JutilaEstimate {
        t,
        h,
        u,
        lhs,
        rhs_main,
        ratio,
        n_terms,
        quadrature_error,
        predicted_error: t * l.powi(3) * l.ln(),
    })
}

/// Builds the dyadic plan for shift index j0 at the given level:
/// S from the binary expansion j0 = Σ_{μ∈S} 2^{level−μ}, and
/// ν_μ = Σ_{ρ∈S, ρ<μ} 2^{μ−ρ}.
pub fn dyadic_plan(j0: u64, level: u32) -> Result<DyadicPlan> {
    ensure!(level <= 40, "dyadic_plan: level must be <= 40, got {level}");
    ensure!(
        j0 >= 1 && j0 <= (1u64 << level),
        "dyadic_plan: j0 must be in [1, 2^level] = [1, {}], got {j0}",
        1u64 << level
    );
    let mut mu_set = Vec::new();
    for p in (0..=level).rev() {
        if j0 & (1u64 << p) != 0 {
            mu_set.push(level - p);
        }
    }
    let nu_values: Vec<u64> = mu_set
        .iter()
        .map(|&mu| {
            mu_set
                .iter()
                .take_while(|&&rho| rho < mu)
                .map(|&rho| 1u64 << (mu - rho))
                .sum()
        })
        .collect();
    for (&mu, &nu) in mu_set.iter().zip(&nu_values) {
        debug_assert!(nu < (1u64 << mu) || mu == 0, "nu_{mu} = {nu} >= 2^{mu}");
    }
    Ok(DyadicPlan {
        level,
        j0,
        mu_set,
        nu_values,
    })
}

/// Evaluates both sides of the telescoping identity:
/// lhs = Δ(x + j0·b) − Δ(x), rhs = Σ_{μ∈S} [Δ(x + (ν_μ+1)·2^{level−μ}·b) −
/// Δ(x + ν_μ·2^{level−μ}·b)]. The identity is exact; the returned pair lets
/// callers measure the numerical residual.
pub fn dyadic_telescope_check(x: f64, b: f64, plan: &DyadicPlan) -> Result<(f64, f64)> {
    ensure!(
        x.is_finite() && b.is_finite() && x >= 1.0 && b > 0.0,
        "dyadic_telescope_check: need x >= 1 and b > 0, got x={x}, b={b}"
    );
    let reach = x + plan.j0 as f64 * b;
    ensure!(
        reach <= 1e12,
        "dyadic_telescope_check: x + j0·b = {reach} exceeds 10^12"
    );
    let lhs = arith::delta(x + plan.j0 as f64 * b)? - arith::delta(x)?;
    let mut rhs = 0.0;
    for (&mu, &nu) in plan.mu_set.iter().zip(&plan.nu_values) {
        let block = 1u64 << (plan.level - mu);
        let upper = x + ((nu + 1) * block) as f64 * b;
        let lower = x + (nu * block) as f64 * b;
        rhs += arith::delta(upper)? - arith::delta(lower)?;
    }
    Ok((lhs, rhs))
}

/// Greedy scan of [X/2, X]: walk the grid X/2, X/2+step, …, accepting x
/// when |Δ(x+U) − Δ(x)| ≥ V and x is ≥ V past the last accepted point.
/// The result is a V-separated system — a lower bound for the maximal one.
pub fn large_value_scan(x: f64, u: f64, v: f64, step: f64) -> Result<LargeValueReport> {
    ensure!(
        x.is_finite() && u.is_finite() && v.is_finite() && step.is_finite(),
        "large_value_scan: parameters must be finite"
    );
    ensure!(
        x >= 2.0 && x <= 1e10 && u > 0.0,
        "large_value_scan: need 2 <= X <= 10^10 and U > 0, got X={x}, U={u}"
    );
    ensure!(
        v >= u.sqrt(),
        "large_value_scan: V must be >= sqrt(U), got V={v}, U={u}"
    );
    ensure!(
        step > 0.0 && step <= v,
        "large_value_scan: need 0 < step <= V, got {step}"
    );
    let half = x / 2.0;
    if half / step > 1e8 {
        return Err(Error::ResourceBudget(format!(
            "large_value_scan: (X/2)/step = {:.3e} grid points exceeds the 10^8 budget",
            half / step
        )));
    }
    if half > 1e9 {
        return Err(Error::ResourceBudget(format!(
            "large_value_scan: scan range X/2 = {half:.3e} exceeds the 10^9 sieve budget"
        )));
    }
    // two running cursors D(⌊x⌋) and D(⌊x+U⌋), streamed
    let mut d_lo = divisor_sum(half.floor() as u64)?;
    let mut d_hi = divisor_sum((half + u).floor() as u64)?;
    let mut next_lo = half.floor() as u64 + 1;
    let mut next_hi = (half + u).floor() as u64 + 1;
    let mut lo_stream = WindowStream::new(next_lo, x.floor() as u64 + 2)?;
    let mut hi_stream = WindowStream::new(next_hi, (x + u).floor() as u64 + 2)?;
    let mut points = Vec::new();
    let mut last_accept = f64::NEG_INFINITY;
    let n_steps = ((x - half) / step).floor() as u64;
    for i in 0..=n_steps {
        let xi = half + i as f64 * step;
        if xi > x {
            break;
        }
        while (next_lo as f64) <= xi {
            d_lo += lo_stream.d(next_lo) as u128;
            next_lo += 1;
        }
        while (next_hi as f64) <= xi + u {
            d_hi += hi_stream.d(next_hi) as u128;
            next_hi += 1;
        }
        let diff = (d_hi - d_lo) as f64 - main_term_diff(xi, u);
        if diff.abs() >= v && xi - last_accept >= v {
            points.push(xi);
            last_accept = xi;
        }
    }
    Ok(LargeValueReport {
        x,
        u,
        v,
        count: points.len(),
        points,
    })
}

/// The comparison bound X^ε(X V^{−5} U² + X^{(κ+λ)/κ} U^{(2κ+2)/κ}
/// V^{−(3+4κ+2λ)/κ}) and its validity condition
/// X^{λ−κ} ≤ V^{3+2λ−2κ} U^{−2}.
pub fn exponent_pair_bound(
    x: f64,
    u: f64,
    v: f64,
    pair: ExponentPair,
    epsilon: f64,
) -> Result<(f64, bool)> {
    ensure!(
        x.is_finite() && u.is_finite() && v.is_finite() && x >= 1.0 && u > 0.0 && v > 0.0,
        "exponent_pair_bound: need X >= 1, U > 0, V > 0"
    );
    ensure!(
        (0.0..=0.1).contains(&epsilon),
        "exponent_pair_bound: epsilon must be in [0, 0.1], got {epsilon}"
    );
    // re-validate: a hand-built pair could bypass the constructor
    let pair = ExponentPair::new(pair.kappa, pair.lambda)?;
    let (k, l) = (pair.kappa, pair.lambda);
    let first = x * v.powf(-5.0) * u * u;
    let second = x.powf((k + l) / k) * u.powf((2.0 * k + 2.0) / k) * v.powf(-(3.0 + 4.0 * k + 2.0 * l) / k);
    let bound = x.powf(epsilon) * (first + second);
    // compare in log space: (λ−κ)·log X ≤ (3+2λ−2κ)·log V − 2·log U
    let valid = (l - k) * x.ln() <= (3.0 + 2.0 * l - 2.0 * k) * v.ln() - 2.0 * u.ln();
    Ok((bound, valid))
}

/// |Δ(x+U) − Δ(x)| against each comparison envelope, plus |Δ(x)| against
/// its pointwise envelope.
pub fn pointwise_bound_ratios(x: f64, u: f64) -> Result<BoundRatios> {
    ensure!(
        x.is_finite() && u.is_finite() && x >= 16.0 && u > 0.0 && u <= x && x + u <= 1e12,
        "pointwise_bound_ratios: need 16 <= x, 0 < U <= x, x + U <= 10^12, got x={x}, U={u}"
    );
    let diff = arith::delta_diff(x, u)?.abs();
    let l = x.ln();
    let point = arith::delta(x)?.abs() / (x.powf(1.0 / 3.0) * l.powf(5.0 / 3.0) * l.ln().powf(1.0 / 3.0));
    Ok(BoundRatios {
        shift_diff: diff,
        vs_quarter_powers: diff / (x.powf(0.25) * u.powf(0.25)),
        vs_x_two_ninths_u_third: diff / (x.powf(2.0 / 9.0) * u.powf(1.0 / 3.0)),
        vs_sqrt_u: diff / u.sqrt(),
        vs_u: diff / u,
        vs_x_131_416: diff / x.powf(131.0 / 416.0),
        point_vs_cube_root_envelope: point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::rng::SplitMix64;

    #[test]
    fn rhs_single_term_frozen_oracles() {
        // n = 1 restrictions, frozen from an independent 60-digit quadrature
        let v = jutila_rhs_truncated(1e6, 1e4, 10.0, 1).unwrap();
        let want = 997.18592537718209;
        assert!(((v - want) / want).abs() < 1e-6, "got {v}, want {want}");
        let v = jutila_rhs_truncated(1e4, 1e2, 5.0, 1).unwrap();
        let want = 24.734390111728980;
        assert!(((v - want) / want).abs() < 1e-6, "got {v}, want {want}");
    }

    #[test]
    fn rhs_first_term_matches_independent_quadrature() {
        let (t, h, u) = (1e4, 1e2, 5.0);
        let got = jutila_rhs_truncated(t, h, u, 1).unwrap();
        let mut f = |x: f64| {
            let s = (std::f64::consts::PI * u / x.sqrt()).sin();
            4.0 * x.sqrt() * s * s / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
        };
        let (want, _) = quad::adaptive(t, t + h, 1e-10, 24, &mut f);
        assert!(((got - want) / want).abs() < 1e-6, "got {got}, want {want}");
    }

    #[test]
    fn rhs_zero_shift_and_monotonicity() {
        assert_eq!(jutila_rhs(1e4, 1e2, 0.0).unwrap(), 0.0);
        let small = jutila_rhs(1e4, 100.0, 5.0).unwrap();
        let large = jutila_rhs(1e4, 200.0, 5.0).unwrap();
        assert!(small > 0.0 && large > small, "H-monotonicity: {small} vs {large}");
    }

    #[test]
    fn rhs_preconditions() {
        assert!(jutila_rhs(1e4, 1e2, 200.0).is_err()); // U > √T
        assert!(jutila_rhs(1e4, 50.0, 5.0).is_err()); // H < √T
        assert!(jutila_rhs(1e4, 2e4, 5.0).is_err()); // H > T
        assert!(jutila_rhs(100.0, 50.0, 2.0).is_err()); // T too small
        assert!(jutila_rhs_truncated(1e4, 1e2, 5.0, 0).is_err());
        assert!(jutila_rhs_truncated(1e4, 1e2, 5.0, 1_001).is_err()); // beyond ⌊T/2U⌋
    }

    #[test]
    fn compare_wires_both_sides() {
        let est = jutila_compare(1e4, 1e2, 5.0).unwrap();
        assert!(est.lhs > 0.0 && est.rhs_main > 0.0);
        assert_eq!(est.n_terms, 1000);
        assert!((est.ratio - est.lhs / est.rhs_main).abs() < 1e-15);
        assert!(est.predicted_error > 0.0);
        // U = 0: both sides zero, ratio reported as NaN
        let est = jutila_compare(1e4, 1e2, 0.0).unwrap();
        assert_eq!(est.lhs, 0.0);
        assert_eq!(est.rhs_main, 0.0);
        assert!(est.ratio.is_nan());
    }

    #[test]
    fn dyadic_plan_worked_instance() {
        let plan = dyadic_plan(5, 3).unwrap();
        assert_eq!(plan.mu_set, vec![1, 3]);
        assert_eq!(plan.nu_values, vec![0, 4]);

        let plan = dyadic_plan(16, 4).unwrap();
        assert_eq!(plan.mu_set, vec![0]);
        assert_eq!(plan.nu_values, vec![0]);

        let plan = dyadic_plan(1, 4).unwrap();
        assert_eq!(plan.mu_set, vec![4]);
        assert_eq!(plan.nu_values, vec![0]);
    }

    #[test]
    fn dyadic_plan_reconstructs_j0() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..200 {
            let level = (rng.next_u64() % 41) as u32;
            let j0 = 1 + rng.next_u64() % (1u64 << level);
            let plan = dyadic_plan(j0, level).unwrap();
            let back: u64 = plan.mu_set.iter().map(|&mu| 1u64 << (level - mu)).sum();
            assert_eq!(back, j0);
            for w in plan.mu_set.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
        assert!(dyadic_plan(0, 3).is_err());
        assert!(dyadic_plan(9, 3).is_err());
        assert!(dyadic_plan(1, 41).is_err());
    }

    #[test]
    fn telescope_exact_on_worked_instance() {
        let plan = dyadic_plan(5, 3).unwrap();
        let (lhs, rhs) = dyadic_telescope_check(100.3, 0.7, &plan).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9, "lhs {lhs} vs rhs {rhs}");
        // j0 = 1: single-term plan, rhs is literally lhs
        let plan1 = dyadic_plan(1, 3).unwrap();
        let (l1, r1) = dyadic_telescope_check(100.3, 0.7, &plan1).unwrap();
        assert_eq!(l1, r1);
    }

    #[test]
    fn telescope_randomized() {
        let mut rng = SplitMix64::new(42);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let x = 1.0 + rng.next_f64() * 1e6;
            let b = 0.01 + rng.next_f64() * 16.0;
            let level = (rng.next_u64() % 11) as u32;
            let j0 = 1 + rng.next_u64() % (1u64 << level);
            let plan = dyadic_plan(j0, level).unwrap();
            let (lhs, rhs) = dyadic_telescope_check(x, b, &plan).unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
        assert!(worst <= 1e-9, "worst telescoping residual {worst}");
    }

    #[test]
    fn large_value_scan_basics() {
        // a threshold above sup|Δdiff| yields an empty system
        let r = large_value_scan(10_000.0, 4.0, 5000.0, 100.0).unwrap();
        assert_eq!(r.count, 0);

        let r = large_value_scan(1e6, 10.0, 5.0, 1.0).unwrap();
        assert!(r.count > 0, "no large values found at X=10^6, U=10, V=5");
        // internal consistency: each point re-verifies, separation >= V
        for w in r.points.windows(2) {
            assert!(w[1] - w[0] >= r.v);
        }
        for &p in r.points.iter().take(20) {
            let d = arith::delta_diff(p, r.u).unwrap().abs();
            assert!(d >= r.v - 1e-9, "point {p} re-verifies to {d} < {}", r.v);
        }
        assert!(r.points.iter().all(|&p| (5e5..=1e6).contains(&p)));
    }

    #[test]
    fn large_value_count_shrinks_with_threshold() {
        let lo = large_value_scan(1e5, 10.0, 4.0, 1.0).unwrap();
        let hi = large_value_scan(1e5, 10.0, 8.0, 1.0).unwrap();
        assert!(hi.count <= lo.count);
    }

    #[test]
    fn large_value_scan_guards() {
        assert!(large_value_scan(1e5, 100.0, 5.0, 1.0).is_err()); // V < √U
        assert!(large_value_scan(1e5, 4.0, 5.0, 6.0).is_err()); // step > V
        assert!(large_value_scan(1e10, 4.0, 5.0, 5.0).is_err()); // sieve range over budget
    }

    #[test]
    fn exponent_pair_presets_match_hand_formulas() {
        let (x, u, v, eps) = (100.0, 2.0, 4.0, 0.0);
        let [p1, p2, p3] = ExponentPair::standard_presets();

        let (b, _) = exponent_pair_bound(x, u, v, p1, eps).unwrap();
        let want = x * v.powf(-5.0) * u * u + x * x * u.powi(6) * v.powf(-12.0);
        assert!(((b - want) / want).abs() < 1e-12);

        let (b, _) = exponent_pair_bound(x, u, v, p2, eps).unwrap();
        let want = x * v.powf(-5.0) * u * u + x.powi(3) * u.powi(9) * v.powf(-18.5);
        assert!(((b - want) / want).abs() < 1e-12);

        let (b, _) = exponent_pair_bound(x, u, v, p3, eps).unwrap();
        let want = x * v.powf(-5.0) * u * u + x.powi(5) * u.powi(14) * v.powf(-30.0);
        assert!(((b - want) / want).abs() < 1e-12);
    }

    #[test]
    fn exponent_pair_validity_condition() {
        // (1/2, 1/2): condition reduces to V ≥ U^{2/3}, X-free
        let p = ExponentPair::new(0.5, 0.5).unwrap();
        let u = 8.0; // U^{2/3} = 4
        let (_, valid) = exponent_pair_bound(1e8, u, 4.001, p, 0.0).unwrap();
        assert!(valid);
        let (_, valid) = exponent_pair_bound(1e8, u, 3.999, p, 0.0).unwrap();
        assert!(!valid);
        // (1/6, 4/6): V ≥ U^{1/2} X^{1/8}
        let p = ExponentPair::new(1.0 / 6.0, 4.0 / 6.0).unwrap();
        let x = 256.0f64;
        let threshold = u.sqrt() * x.powf(0.125); // = √8 · 2
        let (_, valid) = exponent_pair_bound(x, u, threshold * 1.001, p, 0.0).unwrap();
        assert!(valid);
        let (_, valid) = exponent_pair_bound(x, u, threshold * 0.999, p, 0.0).unwrap();
        assert!(!valid);
    }

    #[test]
    fn exponent_pair_constructor_guards() {
        assert!(ExponentPair::new(0.0, 0.5).is_err()); // κ = 0 excluded
        assert!(ExponentPair::new(0.6, 0.7).is_err());
        assert!(ExponentPair::new(0.3, 0.4).is_err());
        assert!(ExponentPair::new(0.3, 1.1).is_err());
    }

    #[test]
    fn bound_ratios_wiring() {
        let r = pointwise_bound_ratios(1e6, 100.0).unwrap();
        assert!(r.shift_diff >= 0.0);
        assert!((r.vs_sqrt_u * 10.0 - r.shift_diff).abs() < 1e-12);
        assert!((r.vs_u * 100.0 - r.shift_diff).abs() < 1e-12);
        let env = 1e6f64.powf(0.25) * 100f64.powf(0.25);
        assert!((r.vs_quarter_powers * env - r.shift_diff).abs() < 1e-9);
        assert!(r.point_vs_cube_root_envelope >= 0.0);
        assert!(pointwise_bound_ratios(10.0, 1.0).is_err()); // x < 16
        assert!(pointwise_bound_ratios(1e6, 2e6).is_err()); // U > x
    }
}
