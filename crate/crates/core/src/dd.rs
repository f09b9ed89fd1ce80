//! Double-double arithmetic: ~31.9 significant decimal digits.
//!
//! Δ(x) is a difference of quantities of size x·log x, so at x = 10¹² plain
//! f64 evaluation of the main term loses ~10⁻³ absolute — far above the 10⁻⁶
//! budget. A [`Dd`] value is an unevaluated sum `hi + lo` of two f64s with
//! `|lo| ≤ ulp(hi)/2`, giving a 106-bit significand. The error-free
//! transformations (two_sum, two_prod) are the classical Dekker/Knuth ones;
//! two_prod uses a Veltkamp split rather than FMA because the baseline
//! x86-64 target may lower `mul_add` to a slow libm call.
//!
//! Only the operations this crate needs are provided: ring ops, division,
//! sqrt, exp, ln, floor, and conversions. `ln` is the workhorse (one call
//! per unit segment in long sweeps): an f64 seed refined by a single Newton
//! step through `exp`, which squares the 53-bit seed accuracy to ~10⁻³²
//! relative.

/// Unevaluated sum of two f64s, `hi + lo`, non-overlapping.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: returns (s, e) with s = fl(a+b) and a+b = s+e exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// two_sum under the precondition |a| ≥ |b| (or a = 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Veltkamp split of a 53-bit float into two 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Error-free product: returns (p, e) with p = fl(a·b) and a·b = p+e exactly.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion; i128 covers every divisor-sum magnitude in range
    /// (|v| < 2^107 stays exact through the two-part split).
    pub fn from_i128(v: i128) -> Dd {
        let hi = v as f64;
        // hi is an integer for |v| ≥ 2^52, so the difference is exact in i128.
        let rem = v - hi as i128;
        let (s, e) = quick_two_sum(hi, rem as f64);
        Dd { hi: s, lo: e }
    }

    pub fn from_u128(v: u128) -> Dd {
        debug_assert!(v < 1 << 126);
        Dd::from_i128(v as i128)
    }

    pub fn from_u64(v: u64) -> Dd {
        Dd::from_i128(v as i128)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqr(self) -> Dd {
        let (p, mut e) = two_prod(self.hi, self.hi);
        e += 2.0 * self.hi * self.lo;
        e += self.lo * self.lo;
        let (s, e) = quick_two_sum(p, e);
        Dd { hi: s, lo: e }
    }

    /// Largest integer ≤ self, exact.
    pub fn floor(self) -> Dd {
        let f = self.hi.floor();
        if f == self.hi {
            let (s, e) = quick_two_sum(f, self.lo.floor());
            Dd { hi: s, lo: e }
        } else {
            Dd { hi: f, lo: 0.0 }
        }
    }

    /// √self for self ≥ 0: f64 seed + one Newton step in Dd.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative Dd");
        let y0 = self.hi.sqrt();
        // y = y0 + (self − y0²) / (2 y0); the seed is 53-bit accurate, one
        // step squares that.
        let r = self - Dd::sqr(Dd::from_f64(y0));
        Dd::from_f64(y0) + r / Dd::from_f64(2.0 * y0)
    }

    /// exp(self) to ~5·10⁻³¹ relative. Reduction exp(x) = 2^k·exp(r) with
    /// r = x − k·ln2, |r| ≤ ln2/2, then a direct Taylor sum. No
    /// scale-and-square: a squaring chain would amplify its own roundoff by
    /// the scale factor, costing ~2 digits.
    pub fn exp(self) -> Dd {
        // below ~1e-304 the 2^k scale factor would hit the denormal range;
        // nothing in this crate distinguishes such values from zero
        if self.hi < -700.0 {
            return Dd::ZERO;
        }
        assert!(self.hi < 700.0, "Dd::exp overflow: {}", self.hi);
        let k = (self.hi / consts::LN_2.hi).round();
        let r = self - consts::LN_2 * k;
        // Taylor: term ← term·r/j in full Dd precision (an f64 1/j! would
        // inject ~1e-17-relative noise); |r| ≤ 0.347 converges in ≤ 26 terms
        let mut term = r;
        let mut sum = Dd::ONE + r;
        for j in 2..=30 {
            term = term * r / (j as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        let scale = libm_free_exp2(k as i32);
        Dd::new(sum.hi * scale, sum.lo * scale)
    }

    /// ln(self) for self > 0: f64 seed + one Newton step.
    /// y₁ = y₀ + self·exp(−y₀) − 1 has error ~(seed error)² ≈ 10⁻³².
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "ln of non-positive Dd");
        let y0 = self.hi.ln();
        let e = Dd::from_f64(-y0).exp();
        let correction = self * e - Dd::ONE;
        Dd::from_f64(y0) + correction
    }

    /// ln of a plain f64 (the common case: segment bases, f64 x-coordinates).
    #[inline]
    pub fn ln_f64(x: f64) -> Dd {
        Dd::from_f64(x).ln()
    }

    /// self·n for integer n, exact scaling when n is a power of two.
    #[inline]
    pub fn scale_pow2(self, k: i32) -> Dd {
        let s = libm_free_exp2(k);
        Dd::new(self.hi * s, self.lo * s)
    }
}

/// 2^k as f64 without going through powi (exact for |k| ≤ 1023).
#[inline]
fn libm_free_exp2(k: i32) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd::new(s1, s2)
    }
}

impl std::ops::Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let (s1, s2) = quick_two_sum(s1, s2 + self.lo);
        Dd::new(s1, s2)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl std::ops::Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, b.hi);
        e += self.hi * b.lo + self.lo * b.hi;
        let (s, e) = quick_two_sum(p, e);
        Dd::new(s, e)
    }
}

impl std::ops::Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p, mut e) = two_prod(self.hi, b);
        e += self.lo * b;
        let (s, e) = quick_two_sum(p, e);
        Dd::new(s, e)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e) + q3
    }
}

impl std::ops::Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<std::cmp::Ordering> {
        // valid for normalized (non-overlapping) components
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Frozen high-precision constants, stored as exact (hi, lo) pairs.
///
/// Each pair was generated from 60-digit evaluations and reconstructs the
/// true value to ~10⁻³³ relative; decimal expansions to 36 digits are in the
/// doc comments as the authoritative source expression.
pub mod consts {
    use super::Dd;

    /// Euler–Mascheroni constant γ = 0.577215664901532860606512090082402431…
    pub const EULER_GAMMA: Dd = Dd::new(0.5772156649015329, -4.942915152430645e-18);
    /// 2γ − 1 = 0.154431329803065721213024180164804862…
    pub const TWO_GAMMA_MINUS_ONE: Dd = Dd::new(0.15443132980306573, -9.88583030486129e-18);
    /// ζ(3/2) = 2.61237534868548834334856756792407163…
    pub const ZETA_THREE_HALVES: Dd = Dd::new(2.612375348685488, 1.9109248306373604e-16);
    /// ζ(3) = 1.20205690315959428539973816151144999… (Apéry's constant)
    pub const ZETA_THREE: Dd = Dd::new(1.2020569031595942, 4.875891010379532e-17);
    /// ζ(3/2)⁴ / (6π²ζ(3)) = 0.654283977508845603747012994680885380…
    /// — the coefficient of T^{3/2} in the mean square of Δ.
    pub const CRAMER: Dd = Dd::new(0.6542839775088456, 1.0384305590086483e-17);
    /// π = 3.14159265358979323846264338327950288…
    pub const PI: Dd = Dd::new(3.141592653589793, 1.2246467991473532e-16);
    /// 2π = 6.28318530717958647692528676655900577…
    pub const TWO_PI: Dd = Dd::new(6.283185307179586, 2.4492935982947064e-16);
    /// π/4 = 0.785398163397448309615660845819875721…
    pub const FRAC_PI_4: Dd = Dd::new(0.7853981633974483, 3.061616997868383e-17);
    /// ln 2 = 0.693147180559945309417232121458176568…
    pub const LN_2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
}

#[cfg(test)]
mod tests {
    use super::consts::*;
    use super::*;

    /// |a − b| ≤ tol·|b| measured in Dd so sub-f64 differences are visible.
    fn assert_dd_close(a: Dd, b: Dd, rel_tol: f64) {
        let diff = (a - b).abs().to_f64();
        let scale = b.abs().to_f64().max(f64::MIN_POSITIVE);
        assert!(
            diff <= rel_tol * scale,
            "dd mismatch: got {:?}, want {:?}, rel err {:e}",
            a,
            b,
            diff / scale
        );
    }

    #[test]
    fn ring_identities() {
        let a = Dd::from_f64(1.0) / 3.0;
        let b = Dd::from_f64(1.0) / 7.0;
        assert_dd_close((a + b) - b, a, 1e-31);
        assert_dd_close((a * b) / b, a, 1e-31);
        assert_dd_close(a * 21.0, Dd::from_f64(7.0), 1e-31);
        assert_dd_close(a.sqr(), a * a, 1e-31);
    }

    #[test]
    fn from_i128_exact() {
        // divisor-sum scale: D(1e12) ≈ 2.8e13 fits a single f64 exactly
        let v = 27_785_452_449_086_i128;
        assert_eq!(Dd::from_i128(v).hi, 27_785_452_449_086.0);
        assert_eq!(Dd::from_i128(v).lo, 0.0);
        // beyond 2^53: split must be exact
        let big = (1_i128 << 80) + 12345;
        let d = Dd::from_i128(big);
        assert_eq!(d.hi as i128 + d.lo as i128, big);
    }

    #[test]
    fn floor_handles_carried_lo() {
        let x = Dd::new(3.0, -1e-20); // value just below 3
        assert_eq!(x.floor().to_f64(), 2.0);
        let y = Dd::new(3.0, 1e-20);
        assert_eq!(y.floor().to_f64(), 3.0);
        assert_eq!(Dd::from_f64(2.75).floor().to_f64(), 2.0);
    }

    // Frozen reference vectors: 60-digit evaluations of the function at the
    // exact binary64 value of the literal (not at the decimal literal).
    const LN_VECTORS: &[(f64, Dd)] = &[
        (2.0, Dd::new(0.6931471805599453, 2.3190468138462996e-17)),
        (10.0, Dd::new(2.302585092994046, -2.1707562233822494e-16)),
        (0.7, Dd::new(-0.35667494393873245, 4.82556379937662e-18)),
        (1000003.0, Dd::new(13.815513557959774, 4.636218047193209e-16)),
        (987654321.123, Dd::new(20.71084331708489, 1.0708215718069128e-15)),
        (1e12, Dd::new(27.631021115928547, 9.478062107418016e-16)),
        (1.5, Dd::new(0.4054651081081644, -2.8811380259626426e-18)),
    ];

    #[test]
    fn ln_matches_reference() {
        for &(x, want) in LN_VECTORS {
            assert_dd_close(Dd::ln_f64(x), want, 1e-30);
        }
    }

    const EXP_VECTORS: &[(f64, Dd)] = &[
        (1.0, Dd::new(2.718281828459045, 1.4456468917292502e-16)),
        (-0.3, Dd::new(0.7408182206817179, -1.805530505953e-18)),
        (0.25, Dd::new(1.2840254166877414, 8.968972781793724e-17)),
        (20.0, Dd::new(485165195.4097903, 4.880277289790406e-10)),
        (-20.0, Dd::new(2.061153622438558e-9, -4.19755767595054e-26)),
        (0.0009765625, Dd::new(1.0009770394924165, 8.141755997634129e-17)),
    ];

    #[test]
    fn exp_matches_reference() {
        for &(x, want) in EXP_VECTORS {
            assert_dd_close(Dd::from_f64(x).exp(), want, 1e-30);
        }
        assert_eq!(Dd::ZERO.exp().to_f64(), 1.0);
    }

    const SQRT_VECTORS: &[(f64, Dd)] = &[
        (2.0, Dd::new(1.4142135623730951, -9.667293313452913e-17)),
        (1e20, Dd::new(1e10, 0.0)),
        (31415926535.897932, Dd::new(177245.3850905516, -4.611653535556686e-12)),
    ];

    #[test]
    fn sqrt_matches_reference() {
        for &(x, want) in SQRT_VECTORS {
            assert_dd_close(Dd::from_f64(x).sqrt(), want, 1e-30);
        }
    }

    #[test]
    fn exp_ln_round_trip() {
        // log-spaced sweep over the full supported range
        let mut x = 1.0f64;
        while x < 1e12 {
            let ln = Dd::ln_f64(x);
            assert_dd_close(ln.exp(), Dd::from_f64(x), 1e-29);
            x *= 1.7;
        }
    }

    #[test]
    fn constant_cross_checks() {
        // cramer = ζ(3/2)⁴/(6π²ζ(3)) must hold to 1e-25 relative
        let z = ZETA_THREE_HALVES;
        let num = z.sqr().sqr();
        let den = PI.sqr() * 6.0 * ZETA_THREE;
        assert_dd_close(num / den, CRAMER, 1e-25);
        // 2γ−1 consistency
        assert_dd_close(EULER_GAMMA * 2.0 - 1.0, TWO_GAMMA_MINUS_ONE, 1e-30);
        // ln of the stored 2 equals the stored ln 2
        assert_dd_close(Dd::ln_f64(2.0), LN_2, 1e-30);
        assert_dd_close(TWO_PI, PI * 2.0, 1e-31);
        assert_dd_close(FRAC_PI_4, PI / 4.0, 1e-31);
    }

    #[test]
    fn comparisons() {
        let a = Dd::new(1.0, -1e-20);
        let b = Dd::new(1.0, 0.0);
        assert!(a < b);
        assert!(Dd::from_f64(2.0) > b);
        assert_eq!(Dd::new(1.0, 1e-20).abs(), Dd::new(1.0, 1e-20));
        assert_eq!((-Dd::new(1.0, 1e-20)).abs(), Dd::new(1.0, 1e-20));
    }
}
