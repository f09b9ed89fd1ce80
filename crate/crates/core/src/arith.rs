//! Exact arithmetic foundation: divisor counts and sieves, the divisor
//! summatory function D(x), the main term M(x), the error term Δ(x), and the
//! sawtooth representation.
//!
//! Conventions used throughout the crate:
//!
//! - d(n) is the **number** of positive divisors of n (d(1)=1, d(p)=2);
//! - D(x) = Σ_{n≤x} d(n), computed exactly in O(√x) integer operations via
//!   the hyperbola identity D(x) = 2·Σ_{n≤⌊√x⌋} ⌊x/n⌋ − ⌊√x⌋²;
//! - M(x) = x·log x + (2γ−1)x, evaluated in double-double precision — at
//!   x = 10¹² a plain f64 product loses ~10⁻³ absolute, far above the 10⁻⁶
//!   budget for Δ;
//! - Δ(x) = D(⌊x⌋) − M(x), right-continuous at integers (the defining sum
//!   n ≤ x includes n = x), jumping up by d(m) at each integer m and
//!   strictly decreasing in between (M′ = log x + 2γ > 0).
//!
//! Divisor sums accumulate in u128: overflow is structurally impossible in
//! every supported range rather than merely unlikely.

use crate::dd::{consts, Dd};
use crate::{ensure, Error, Result};

/// Point-evaluation cap: O(√x) = 10⁶ operations per isolated point.
pub const MAX_X: u64 = 1_000_000_000_000;
/// Maximum sieve-window length.
pub const MAX_WINDOW_LEN: u64 = 1_000_000_000;

/// f64 image of 2γ−1, for hot-loop drift formulas that don't need Dd.
pub(crate) const TWO_GAMMA_MINUS_ONE_F64: f64 = 0.15443132980306573;

/// High-precision constants bundle (each ≥ 30 significant digits; stored as
/// exact two-f64 sums in [`crate::dd::consts`]).
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    /// Euler–Mascheroni constant γ.
    pub euler_gamma: Dd,
    /// ζ(3/2).
    pub zeta_three_halves: Dd,
    /// ζ(3).
    pub zeta_three: Dd,
    /// ζ(3/2)⁴/(6π²ζ(3)): the coefficient of T^{3/2} in ∫₁ᵀ Δ².
    pub cramer_constant: Dd,
}

impl Constants {
    pub const STANDARD: Constants = Constants {
        euler_gamma: consts::EULER_GAMMA,
        zeta_three_halves: consts::ZETA_THREE_HALVES,
        zeta_three: consts::ZETA_THREE,
        cramer_constant: consts::CRAMER,
    };

    /// Relative deviation of the stored cramer_constant from
    /// ζ(3/2)⁴/(6π²ζ(3)) recomputed from the other stored constants.
    /// Must be ≤ 10⁻²⁵ (asserted in tests).
    pub fn cramer_cross_check(&self) -> f64 {
        let num = self.zeta_three_halves.sqr().sqr();
        let den = consts::PI.sqr() * 6.0 * self.zeta_three;
        ((num / den - self.cramer_constant) / self.cramer_constant)
            .abs()
            .to_f64()
    }
}

/// ⌊√x⌋, exact.
pub(crate) fn isqrt(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as u64;
    // the f64 seed can be off by one ulp in either direction
    while r.checked_mul(r).map_or(true, |sq| sq > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    r
}

/// d(n): number of positive divisors, by trial factorization. Worst case
/// (prime n near 10¹²) is ~5·10⁵ divisions; windows should use
/// [`sieve_window`] instead.
pub fn divisor_count(n: u64) -> Result<u32> {
    ensure!(
        (1..=MAX_X).contains(&n),
        "divisor_count: n must be in [1, 10^12], got {n}"
    );
    let mut m = n;
    let mut count: u32 = 1;
    let mut e = 0;
    while m % 2 == 0 {
        m /= 2;
        e += 1;
    }
    count *= e + 1;
    let mut p: u64 = 3;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            count *= e + 1;
        }
        p += 2;
    }
    if m > 1 {
        count *= 2; // leftover prime factor
    }
    Ok(count)
}

/// D(x) = Σ_{n≤x} d(n) by the hyperbola identity, exact, O(√x).
pub fn divisor_sum(x: u64) -> Result<u128> {
    ensure!(
        (1..=MAX_X).contains(&x),
        "divisor_sum: x must be in [1, 10^12], got {x}"
    );
    let r = isqrt(x);
    let mut acc: u128 = 0;
    for n in 1..=r {
        acc += (x / n) as u128;
    }
    Ok(2 * acc - (r as u128) * (r as u128))
}

/// Divisor counts for one contiguous window [lo, hi).
#[derive(Debug, Clone)]
pub struct DivisorWindow {
    pub lo: u64,
    /// counts[i] = d(lo + i).
    pub counts: Vec<u32>,
}

impl DivisorWindow {
    #[inline]
    pub fn d(&self, n: u64) -> u32 {
        self.counts[(n - self.lo) as usize]
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.counts.len() as u64
    }
}

/// Sieve-window memory budget in bytes, from DIVLAB_MEM_BUDGET_MB
/// (default 512). The window costs 12 bytes per element (u32 count +
/// u64 cofactor).
pub(crate) fn mem_budget_bytes() -> u64 {
    let mb = std::env::var("DIVLAB_MEM_BUDGET_MB")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(512);
    mb.saturating_mul(1 << 20)
}

const WINDOW_BYTES_PER_ELEM: u64 = 12;

/// Odd-only prime list up to and including n, plus 2.
fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = vec![2u64];
    let mut p = 3usize;
    while p <= n {
        if !is_comp[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                is_comp[m] = true;
                m += 2 * p; // odd multiples only
            }
        }
        p += 2;
    }
    primes
}

/// Core sieve fill, assuming `primes` covers everything up to √(hi−1).
fn fill_window(lo: u64, hi: u64, primes: &[u64]) -> DivisorWindow {
    let len = (hi - lo) as usize;
    let mut counts = vec![1u32; len];
    let mut remaining: Vec<u64> = (lo..hi).collect();
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let idx = (m - lo) as usize;
            let mut e = 0u32;
            let mut v = remaining[idx];
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            remaining[idx] = v;
            counts[idx] *= e + 1;
            m += p;
        }
    }
    // whatever survives all primes ≤ √(hi−1) is 1 or a single large prime
    for i in 0..len {
        if remaining[i] > 1 {
            counts[i] *= 2;
        }
    }
    DivisorWindow { lo, counts }
}

pub(crate) fn sieve_window_with_budget(lo: u64, hi: u64, budget_bytes: u64) -> Result<DivisorWindow> {
    ensure!(
        lo >= 1 && hi > lo,
        "sieve_window: need 1 <= lo < hi, got [{lo}, {hi})"
    );
    ensure!(
        hi - lo <= MAX_WINDOW_LEN && hi <= MAX_X + 1,
        "sieve_window: window [{lo}, {hi}) exceeds supported range (len <= 10^9, hi <= 10^12)"
    );
    let need = (hi - lo) * WINDOW_BYTES_PER_ELEM;
    if need > budget_bytes {
        return Err(Error::ResourceBudget(format!(
            "sieve window [{lo}, {hi}) needs {} MB, budget is {} MB (set DIVLAB_MEM_BUDGET_MB)",
            need >> 20,
            budget_bytes >> 20
        )));
    }
    let primes = primes_upto(isqrt(hi - 1));
    Ok(fill_window(lo, hi, &primes))
}

/// Segmented divisor sieve: d(n) for every n ∈ [lo, hi).
///
/// Marks multiples of each prime p ≤ √(hi−1), extracting the full
/// prime-power exponent per element; the surviving cofactor is 1 or a single
/// prime > √(hi−1), contributing one final factor 2. Memory is capped by
/// DIVLAB_MEM_BUDGET_MB (default 512).
pub fn sieve_window(lo: u64, hi: u64) -> Result<DivisorWindow> {
    sieve_window_with_budget(lo, hi, mem_budget_bytes())
}

/// Streaming divisor counts over [start, end) for monotone queries: long
/// sweeps use this to visit millions of integers without materializing the
/// full table. The prime list is computed once for the final window.
pub struct WindowStream {
    window: DivisorWindow,
    end: u64,
    chunk: u64,
    primes: Vec<u64>,
}

impl WindowStream {
    pub fn new(start: u64, end: u64) -> Result<WindowStream> {
        ensure!(
            start >= 1 && end > start && end <= MAX_X + 1,
            "WindowStream: need 1 <= start < end <= 10^12+1, got [{start}, {end})"
        );
        let budget = mem_budget_bytes();
        let chunk = (budget / WINDOW_BYTES_PER_ELEM)
            .min(1_000_000)
            .min(end - start);
        if chunk == 0 {
            return Err(Error::ResourceBudget(
                "WindowStream: memory budget below one sieve element".into(),
            ));
        }
        let primes = primes_upto(isqrt(end - 1));
        let window = fill_window(start, (start + chunk).min(end), &primes);
        Ok(WindowStream {
            window,
            end,
            chunk,
            primes,
        })
    }

    /// d(n); n must be in [start, end) and non-decreasing across calls.
    #[inline]
    pub fn d(&mut self, n: u64) -> u32 {
        debug_assert!(n < self.end, "WindowStream query {n} past end {}", self.end);
        if n >= self.window.hi() {
            let lo = n;
            let hi = (lo + self.chunk).min(self.end);
            self.window = fill_window(lo, hi, &self.primes);
        }
        self.window.d(n)
    }
}

/// M(x) = x·(log x + 2γ−1) in double-double precision.
/// Absolute error ≤ ~10⁻¹⁶ over the whole supported range (budget: 10⁻⁶).
pub fn main_term(x: f64) -> Result<Dd> {
    ensure!(
        x.is_finite() && x >= 1.0,
        "main_term: x must be >= 1, got {x}"
    );
    Ok(main_term_unchecked(x))
}

#[inline]
pub(crate) fn main_term_unchecked(x: f64) -> Dd {
    (Dd::ln_f64(x) + consts::TWO_GAMMA_MINUS_ONE) * x
}

/// Δ(x) = D(⌊x⌋) − M(x). Right-continuous at integers.
pub fn delta(x: f64) -> Result<f64> {
    ensure!(
        x.is_finite() && x >= 1.0 && x <= MAX_X as f64,
        "delta: x must be in [1, 10^12], got {x}"
    );
    let d = divisor_sum(x.floor() as u64)?;
    Ok((Dd::from_u128(d) - main_term_unchecked(x)).to_f64())
}

/// Sawtooth ψ(t) = {t} − 1/2 ∈ [−1/2, 1/2).
#[inline]
pub fn psi(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// The representation −2·Σ_{n≤√x} ψ(x/n); differs from Δ(x) by a bounded
/// quantity (empirically ≤ 3 on half-integer sweeps to 10⁶; only O(1) is
/// guaranteed).
pub fn delta_psi(x: f64) -> Result<f64> {
    ensure!(
        x.is_finite() && x >= 1.0 && x <= 1e10,
        "delta_psi: x must be in [1, 10^10], got {x}"
    );
    // r = ⌊√x⌋ on the real value: r² ≤ x < (r+1)²
    let mut r = x.sqrt().floor() as u64;
    while (r * r) as f64 > x {
        r -= 1;
    }
    while ((r + 1) * (r + 1)) as f64 <= x {
        r += 1;
    }
    let mut s = 0.0f64;
    for n in 1..=r {
        s += psi(x / n as f64);
    }
    Ok(-2.0 * s)
}

/// M(x+u) − M(x) in plain f64: x·log1p(u/x) + u·log(x+u) + (2γ−1)u.
/// The rearrangement avoids the catastrophic cancellation that makes M
/// itself need extended precision; absolute error ~10⁻¹¹ at x = 10¹².
#[inline]
pub(crate) fn main_term_diff(x: f64, u: f64) -> f64 {
    x * (u / x).ln_1p() + u * (x + u).ln() + TWO_GAMMA_MINUS_ONE_F64 * u
}

/// Δ(x+U) − Δ(x) = Σ_{x<n≤x+U} d(n) − (M(x+U)−M(x)), without forming either
/// Δ. Agrees with delta(x+U) − delta(x) to well under 10⁻⁶ absolute.
pub fn delta_diff(x: f64, u: f64) -> Result<f64> {
    ensure!(
        x.is_finite() && u.is_finite() && x >= 1.0 && u > 0.0 && x + u <= MAX_X as f64,
        "delta_diff: need 1 <= x, 0 < U, x+U <= 10^12, got x={x}, U={u}"
    );
    let fx = x.floor() as u64;
    let fxu = (x + u).floor() as u64;
    let jump_sum: u64 = if fxu > fx {
        sieve_window(fx + 1, fxu + 1)?
            .counts
            .iter()
            .map(|&c| c as u64)
            .sum()
    } else {
        0
    };
    Ok(jump_sum as f64 - main_term_diff(x, u))
}

/// Σ_{n≤x} d²(n), exact, streamed in million-element windows.
pub fn d_squared_sum(x: u64) -> Result<u128> {
    ensure!(
        (1..=1_000_000_000).contains(&x),
        "d_squared_sum: x must be in [1, 10^9], got {x}"
    );
    let mut stream = WindowStream::new(1, x + 1)?;
    let mut acc: u128 = 0;
    for n in 1..=x {
        let c = stream.d(n) as u128;
        acc += c * c;
    }
    Ok(acc)
}
