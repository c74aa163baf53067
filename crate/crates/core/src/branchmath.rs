//! Square-root branches, half-line geometry, and a complex type with an
//! unbounded binary exponent.
//!
//! Two branches of the square root are used throughout: `sq_plus` takes
//! `arg ∈ [0, 2π)` and lands in the closed upper half-plane, `sq_minus` takes
//! `arg ∈ [−π, π)` and lands in the closed right half-plane. On the cuts the
//! tie is broken once and for all: `arg₊ = 0` on ℝ₊ and `arg₋ = −π` on ℝ₋.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI, TAU};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Replaces a negative-zero imaginary part by `+0.0`.
#[inline]
pub fn unsign_zero(z: C64) -> C64 {
    if z.im == 0.0 {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

/// Principal square root with full componentwise accuracy.
fn principal_sqrt(z: C64) -> C64 {
    if z.re == 0.0 && z.im == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let t = ((z.re.abs() + z.norm()) / 2.0).sqrt();
    if z.re >= 0.0 {
        C64::new(t, z.im / (2.0 * t))
    } else {
        C64::new(z.im.abs() / (2.0 * t), t.copysign(z.im))
    }
}

/// `arg₊(ζ) ∈ [0, 2π)`.
pub fn arg_plus(zeta: C64) -> f64 {
    let zeta = unsign_zero(zeta);
    let a = zeta.im.atan2(zeta.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// `arg₋(ζ) ∈ [−π, π)`.
pub fn arg_minus(zeta: C64) -> f64 {
    let zeta = unsign_zero(zeta);
    let a = zeta.im.atan2(zeta.re);
    if a >= PI {
        -PI
    } else {
        a
    }
}

/// Square root with `Im ≥ 0`.
pub fn sq_plus(zeta: C64) -> C64 {
    let p = principal_sqrt(unsign_zero(zeta));
    if p.im < 0.0 {
        -p
    } else {
        p
    }
}

/// Square root with `Re ≥ 0`; equals `−i√|ζ|` on the negative real axis.
pub fn sq_minus(zeta: C64) -> C64 {
    let zeta = unsign_zero(zeta);
    let p = principal_sqrt(zeta);
    if zeta.im == 0.0 && zeta.re < 0.0 {
        C64::new(0.0, -p.im)
    } else {
        p
    }
}

/// Distance from `λ` to the closed half-line `[0, ∞)`.
pub fn dist_to_halfline(lambda: C64) -> f64 {
    if lambda.re >= 0.0 {
        lambda.im.abs()
    } else {
        lambda.norm()
    }
}

/// `Im sq_plus(λ)`, the Jensen summand.
pub fn im_sqrt_plus(lambda: C64) -> f64 {
    sq_plus(lambda).im
}

/// `2^k` for `k` in the normal exponent range.
#[inline]
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `x · 2^k` without intermediate overflow.
pub fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1023 {
        x *= pow2(1023);
        k -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1022 {
        x *= pow2(-1022);
        k += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(k as i32)
}

/// Binary exponent of a finite nonzero `x`, so that `|x| / 2^e ∈ [1, 2)`.
fn ilogb(x: f64) -> i64 {
    let bits = x.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal
        ilogb(x * pow2(54)) - 54
    } else {
        raw - 1023
    }
}

/// A complex number `m · 2^e` whose exponent is tracked separately, so that
/// products of exponentially large and small factors stay representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wide {
    m: C64,
    e: i64,
}

impl Wide {
    pub const ZERO: Wide = Wide { m: C64::new(0.0, 0.0), e: 0 };
    pub const ONE: Wide = Wide { m: C64::new(1.0, 0.0), e: 0 };

    pub fn new(m: C64) -> Self {
        Self::normalized(m, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(C64::new(x, 0.0))
    }

    fn normalized(m: C64, e: i64) -> Self {
        let big = m.re.abs().max(m.im.abs());
        if big == 0.0 || !big.is_finite() {
            return if big == 0.0 { Self::ZERO } else { Wide { m, e } };
        }
        let k = ilogb(big);
        Wide {
            m: C64::new(ldexp(m.re, -k), ldexp(m.im, -k)),
            e: e + k,
        }
    }

    /// `exp(z)` for any finite `z`.
    pub fn exp(z: C64) -> Self {
        let k = (z.re / LN_2).round();
        let r = z.re - k * LN_2;
        let mag = r.exp();
        Self::normalized(C64::new(mag * z.im.cos(), mag * z.im.sin()), k as i64)
    }

    pub fn mantissa(&self) -> C64 {
        self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.re.is_finite() && self.m.im.is_finite()
    }

    /// Converts to an ordinary complex number; may overflow to infinity or
    /// underflow to zero.
    pub fn to_c64(&self) -> C64 {
        C64::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }

    /// `log₂|self|`; `-∞` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.m.norm().log2() + self.e as f64
    }

    pub fn ln_abs(&self) -> f64 {
        self.log2_abs() * LN_2
    }

    /// `|self|` as an ordinary float (may overflow).
    pub fn abs(&self) -> f64 {
        ldexp(self.m.norm(), self.e)
    }

    /// `|self|` kept in wide form (real, nonnegative).
    pub fn abs_wide(&self) -> Wide {
        Self::normalized(C64::new(self.m.norm(), 0.0), self.e)
    }

    pub fn arg(&self) -> f64 {
        self.m.im.atan2(self.m.re)
    }

    pub fn conj(&self) -> Wide {
        Wide { m: self.m.conj(), e: self.e }
    }

    /// `self / other` as an ordinary complex number.
    pub fn ratio(&self, other: &Wide) -> C64 {
        (*self / *other).to_c64()
    }

    /// `|self| / |other|` as an ordinary float.
    pub fn abs_ratio(&self, other: &Wide) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        ldexp(self.m.norm() / other.m.norm(), self.e - other.e)
    }

    /// Multiplication by `2^k`.
    pub fn scale2(&self, k: i64) -> Wide {
        if self.is_zero() {
            return *self;
        }
        Wide { m: self.m, e: self.e + k }
    }
}

impl From<C64> for Wide {
    fn from(m: C64) -> Self {
        Wide::new(m)
    }
}

impl Mul for Wide {
    type Output = Wide;
    fn mul(self, rhs: Wide) -> Wide {
        Wide::normalized(self.m * rhs.m, self.e + rhs.e)
    }
}

impl Mul<C64> for Wide {
    type Output = Wide;
    fn mul(self, rhs: C64) -> Wide {
        Wide::normalized(self.m * rhs, self.e)
    }
}

impl Mul<f64> for Wide {
    type Output = Wide;
    fn mul(self, rhs: f64) -> Wide {
        Wide::normalized(self.m * rhs, self.e)
    }
}

impl Div for Wide {
    type Output = Wide;
    fn div(self, rhs: Wide) -> Wide {
        Wide::normalized(self.m / rhs.m, self.e - rhs.e)
    }
}

impl Add for Wide {
    type Output = Wide;
    fn add(self, rhs: Wide) -> Wide {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let d = hi.e - lo.e;
        if d > 1100 {
            return hi;
        }
        let shifted = C64::new(ldexp(lo.m.re, -d), ldexp(lo.m.im, -d));
        Wide::normalized(hi.m + shifted, hi.e)
    }
}

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide { m: -self.m, e: self.e }
    }
}

impl Sub for Wide {
    type Output = Wide;
    fn sub(self, rhs: Wide) -> Wide {
        self + (-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn sq_plus_examples() {
        assert!(close(sq_plus(c(-1.0, 0.0)), c(0.0, 1.0), 1e-15));
        assert!(close(sq_plus(c(4.0, 0.0)), c(2.0, 0.0), 1e-15));
        assert!(close(sq_plus(c(0.0, 2.0)), c(1.0, 1.0), 1e-15));
        // below the axis the root flips into the upper half-plane
        assert!(close(sq_plus(c(0.0, -2.0)), c(-1.0, 1.0), 1e-15));
    }

    #[test]
    fn sq_minus_examples() {
        assert!(close(sq_minus(c(4.0, 0.0)), c(2.0, 0.0), 1e-15));
        assert!(close(sq_minus(c(-1.0, 0.0)), c(0.0, -1.0), 1e-15));
        assert!(close(sq_minus(c(0.0, 2.0)), c(1.0, 1.0), 1e-15));
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(sq_plus(c(-1.0, -0.0)), sq_plus(c(-1.0, 0.0)));
        assert_eq!(sq_minus(c(-1.0, -0.0)), sq_minus(c(-1.0, 0.0)));
        assert_eq!(arg_plus(c(2.0, -0.0)), 0.0);
        assert_eq!(arg_minus(c(-2.0, -0.0)), -PI);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist_to_halfline(c(3.0, 4.0)), 4.0);
        assert_eq!(dist_to_halfline(c(-4.0, 0.0)), 4.0);
        assert_eq!(dist_to_halfline(c(-3.0, 4.0)), 5.0);
    }

    #[test]
    fn im_sqrt_examples() {
        assert!((im_sqrt_plus(c(-1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((im_sqrt_plus(c(-4.0, 0.0)) - 2.0).abs() < 1e-15);
        // √|i|·sin(arg₊(i)/2) with arg₊(i) = π/2
        let want = (PI / 4.0).sin();
        assert!((im_sqrt_plus(c(0.0, 1.0)) - want).abs() < 1e-15);
        assert!((want - 0.707107).abs() < 1e-6);
    }

    #[test]
    fn wide_round_trip_and_overflow() {
        let a = Wide::exp(c(800.0, 0.3));
        let b = Wide::exp(c(-800.0, -0.3));
        let p = (a * b).to_c64();
        assert!(close(p, c(1.0, 0.0), 1e-12));
        assert!((a.ln_abs() - 800.0).abs() < 1e-10);
        // 1 is far below the last mantissa bit of e^800
        assert!(((a + Wide::ONE) - a).is_zero());
        let x = Wide::new(c(3.0, -4.0));
        assert_eq!(x.to_c64(), c(3.0, -4.0));
        assert_eq!((x - x).to_c64(), c(0.0, 0.0));
    }

    #[test]
    fn ldexp_extremes() {
        assert_eq!(ldexp(1.0, 2000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -2000), 0.0);
        assert_eq!(ldexp(3.0, 4), 48.0);
        assert_eq!(ilogb(5e-320), (5e-320f64).log2().floor() as i64);
    }
}
