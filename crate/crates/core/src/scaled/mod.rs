//! Complex numbers with a separated binary exponent.
//!
//! Values of `π_n` reach magnitudes like `(n/e)^n`, far outside the `f64`
//! range for the degrees of interest. A [`ScaledComplex`] stores a complex
//! mantissa together with an `i64` power of two, so products and sums of such
//! values can be carried out with ordinary double rounding while the exponent
//! absorbs the range.
//!
//! Two slower number systems live alongside it and serve as oracles:
//! [`HpComplex`] (binary floating point with a configurable mantissa width)
//! and [`RationalComplex`] (exact rational arithmetic).

mod exact;
mod highprec;

pub use exact::{rational_from_f64, RationalComplex};
pub use highprec::{BigFloat, HpComplex};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits in the `f64` significand.
pub const MANTISSA_BITS: i64 = 53;

const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// `x · 2^k`, exact whenever the result is a normal number.
pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // 2^±1000 are representable; step through in chunks.
    while k > 1000 {
        x *= f64::from_bits(((1023 + 1000) as u64) << 52);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= f64::from_bits(((1023 - 1000) as u64) << 52);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((1023 + k) as u64) << 52)
}

/// Unbiased binary exponent of a finite non-zero `f64` (`floor(log2|x|)`).
pub(crate) fn ilogb(x: f64) -> i64 {
    let bits = x.abs().to_bits();
    let biased = (bits >> 52) as i64;
    if biased == 0 {
        // subnormal
        let scaled = x.abs() * f64::from_bits(((1023 + 64) as u64) << 52);
        ((scaled.to_bits() >> 52) as i64) - 1023 - 64
    } else {
        biased - 1023
    }
}

/// A complex value `mantissa · 2^exp`.
///
/// Canonical form: either the mantissa is exactly zero and `exp == 0`, or
/// `1 ≤ |mantissa| < 2`. Every constructor returns canonical values, so two
/// `ScaledComplex` compare equal exactly when their values are equal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ScaledRepr", try_from = "ScaledRepr")]
pub struct ScaledComplex {
    mantissa: Complex64,
    exp: i64,
}

#[derive(Serialize, Deserialize)]
struct ScaledRepr {
    re: f64,
    im: f64,
    exp2: i64,
}

impl From<ScaledComplex> for ScaledRepr {
    fn from(v: ScaledComplex) -> Self {
        ScaledRepr {
            re: v.mantissa.re,
            im: v.mantissa.im,
            exp2: v.exp,
        }
    }
}

impl TryFrom<ScaledRepr> for ScaledComplex {
    type Error = Error;

    fn try_from(r: ScaledRepr) -> Result<Self> {
        ScaledComplex::normalize(Complex64::new(r.re, r.im), r.exp2)
    }
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(0.0, 0.0),
        exp: 0,
    };
    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(1.0, 0.0),
        exp: 0,
    };

    /// Bring `mantissa · 2^exp` into canonical form. The value is preserved
    /// exactly: only powers of two are moved between mantissa and exponent.
    pub fn normalize(mantissa: Complex64, exp: i64) -> Result<Self> {
        if !mantissa.re.is_finite() || !mantissa.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite mantissa {mantissa}")));
        }
        if mantissa.re == 0.0 && mantissa.im == 0.0 {
            return Ok(Self::ZERO);
        }
        let big = mantissa.re.abs().max(mantissa.im.abs());
        let mut k = ilogb(big);
        let mut m = Complex64::new(ldexp(mantissa.re, -k), ldexp(mantissa.im, -k));
        // max component now in [1, 2), so |m|^2 in [1, 8)
        if m.norm_sqr() >= 4.0 {
            m = Complex64::new(m.re * 0.5, m.im * 0.5);
            k += 1;
        }
        // flush negative zeros so equality is structural
        if m.re == 0.0 {
            m.re = 0.0;
        }
        if m.im == 0.0 {
            m.im = 0.0;
        }
        let exp = exp.checked_add(k).ok_or(Error::ExponentOverflow)?;
        Ok(Self { mantissa: m, exp })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::normalize(z, 0)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Self::normalize(Complex64::new(x, 0.0), 0)
    }

    /// `exp(w)` for complex `w` whose real part may be far beyond the `f64`
    /// exponent range.
    pub fn from_log(w: Complex64) -> Result<Self> {
        if w.re == f64::NEG_INFINITY {
            return Ok(Self::ZERO);
        }
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite logarithm {w}")));
        }
        let k = (w.re / std::f64::consts::LN_2).floor();
        if k.abs() > 9.0e18 {
            return Err(Error::ExponentOverflow);
        }
        let r = (w.re - k * LN2_HI) - k * LN2_LO;
        let (s, c) = w.im.sin_cos();
        let mag = r.exp();
        Self::normalize(Complex64::new(mag * c, mag * s), k as i64)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    /// log2 of the modulus; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().log2() + self.exp as f64
    }

    /// Argument in `(-π, π]`.
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Convert to a plain complex number; overflows to infinity and
    /// underflows to zero outside the `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.mantissa.re, self.exp), ldexp(self.mantissa.im, self.exp))
    }

    pub fn conj(&self) -> Self {
        Self {
            mantissa: self.mantissa.conj(),
            exp: self.exp,
        }
        .canon_zero()
    }

    pub fn neg(&self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exp: self.exp,
        }
        .canon_zero()
    }

    fn canon_zero(mut self) -> Self {
        if self.mantissa.re == 0.0 {
            self.mantissa.re = 0.0;
        }
        if self.mantissa.im == 0.0 {
            self.mantissa.im = 0.0;
        }
        self
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::ZERO);
        }
        let exp = self.exp.checked_add(other.exp).ok_or(Error::ExponentOverflow)?;
        Self::normalize(self.mantissa * other.mantissa, exp)
    }

    /// Multiply by an ordinary complex number.
    pub fn mul_complex(&self, c: Complex64) -> Result<Self> {
        self.mul(&Self::from_complex(c)?)
    }

    pub fn scale(&self, x: f64) -> Result<Self> {
        self.mul_complex(Complex64::new(x, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(*self);
        }
        if self.is_zero() {
            return Ok(*other);
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let gap = (hi.exp as i128) - (lo.exp as i128);
        if gap > MANTISSA_BITS as i128 {
            return Ok(*hi);
        }
        let shifted = Complex64::new(
            ldexp(lo.mantissa.re, -(gap as i64)),
            ldexp(lo.mantissa.im, -(gap as i64)),
        );
        Self::normalize(hi.mantissa + shifted, hi.exp)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        let exp = self.exp.checked_sub(other.exp).ok_or(Error::ExponentOverflow)?;
        Self::normalize(self.mantissa / other.mantissa, exp)
    }

    /// `|self / other - 1|`.
    ///
    /// When `self` exceeds `other` by more than the mantissa precision the
    /// two are treated as incomparable and `+inf` is returned; when `self` is
    /// negligible against `other` the error is exactly 1.
    pub fn rel_error(&self, other: &Self) -> Result<f64> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(1.0);
        }
        let gap = (self.exp as i128) - (other.exp as i128);
        if gap > MANTISSA_BITS as i128 {
            return Ok(f64::INFINITY);
        }
        if gap < -(MANTISSA_BITS as i128) {
            return Ok(1.0);
        }
        let q = self.mantissa / other.mantissa;
        let q = Complex64::new(ldexp(q.re, gap as i64), ldexp(q.im, gap as i64));
        Ok((q - 1.0).norm())
    }
}

impl fmt::Display for ScaledComplex {
    /// Text form `m_re m_im e`, lossless for every canonical value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.mantissa.re, self.mantissa.im, self.exp)
    }
}

impl FromStr for ScaledComplex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("expected `m_re m_im e`, got {s:?}")));
        }
        let bad = |p: &str| Error::InvalidInput(format!("cannot parse {p:?}"));
        let re: f64 = parts[0].parse().map_err(|_| bad(parts[0]))?;
        let im: f64 = parts[1].parse().map_err(|_| bad(parts[1]))?;
        let e: i64 = parts[2].parse().map_err(|_| bad(parts[2]))?;
        Self::normalize(Complex64::new(re, im), e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(ScaledComplex::normalize(c(0.0, 0.0), 17).unwrap(), ScaledComplex::ZERO);
        let one = ScaledComplex::normalize(c(1.0, 0.0), 0).unwrap();
        assert_eq!((one.mantissa(), one.exponent()), (c(1.0, 0.0), 0));
        let four = ScaledComplex::normalize(c(4.0, 0.0), 0).unwrap();
        assert_eq!((four.mantissa(), four.exponent()), (c(1.0, 0.0), 2));
        assert!(ScaledComplex::normalize(c(f64::NAN, 0.0), 0).is_err());
        assert!(ScaledComplex::normalize(c(1.0, f64::INFINITY), 0).is_err());
    }

    #[test]
    fn canonical_modulus_range() {
        for z in [
            c(1.999, 1.999),
            c(-3.0, 0.5),
            c(1e-310, 0.0),
            c(0.0, -7e300),
            c(1.5, 1.5),
        ] {
            let s = ScaledComplex::from_complex(z).unwrap();
            let m = s.mantissa().norm();
            assert!((1.0..2.0).contains(&m), "{z}: |m| = {m}");
        }
    }

    #[test]
    fn mul_examples() {
        let x = ScaledComplex::normalize(c(1.25, -0.5), 40).unwrap();
        assert_eq!(ScaledComplex::ONE.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&ScaledComplex::ZERO).unwrap(), ScaledComplex::ZERO);
        let big = ScaledComplex::normalize(c(1.0, 0.0), i64::MAX - 1).unwrap();
        assert_eq!(big.mul(&big), Err(Error::ExponentOverflow));
    }

    #[test]
    fn add_examples() {
        let u = ScaledComplex::normalize(c(1.5, 0.25), 3).unwrap();
        assert_eq!(u.add(&ScaledComplex::ZERO).unwrap(), u);
        let one = ScaledComplex::ONE;
        assert_eq!(one.add(&one.neg()).unwrap(), ScaledComplex::ZERO);
        let huge = ScaledComplex::normalize(c(1.0, 0.0), 1000).unwrap();
        assert_eq!(huge.add(&one).unwrap(), huge);
    }

    #[test]
    fn rel_error_examples() {
        let u = ScaledComplex::normalize(c(1.3, -0.2), 77).unwrap();
        assert_eq!(u.rel_error(&u).unwrap(), 0.0);
        let two = ScaledComplex::from_f64(2.0).unwrap();
        assert_eq!(two.rel_error(&ScaledComplex::ONE).unwrap(), 1.0);
        let far = ScaledComplex::normalize(c(1.0, 0.0), 300).unwrap();
        assert_eq!(far.rel_error(&ScaledComplex::ONE).unwrap(), f64::INFINITY);
        assert_eq!(ScaledComplex::ONE.rel_error(&far).unwrap(), 1.0);
        assert_eq!(u.rel_error(&ScaledComplex::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn from_log_beyond_native_range() {
        let v = ScaledComplex::from_log(c(1000.0, 0.0)).unwrap();
        assert!((v.log_abs() - 1000.0).abs() < 1e-12);
        assert!(v.to_complex().re.is_infinite());
        let w = ScaledComplex::from_log(c(-5000.0, 1.0)).unwrap();
        assert!((w.log_abs() + 5000.0).abs() < 1e-11);
        assert!((w.arg() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn text_and_json_forms() {
        let v = ScaledComplex::normalize(c(0.1, -1.0 / 3.0), -12345).unwrap();
        let text = v.to_string();
        assert_eq!(text.parse::<ScaledComplex>().unwrap(), v);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"exp2\""));
        assert_eq!(serde_json::from_str::<ScaledComplex>(&json).unwrap(), v);
        assert!("1 2".parse::<ScaledComplex>().is_err());
    }

    fn exact(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    fn pow2(e: i64) -> BigRational {
        let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs());
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    }

    #[test]
    fn mul_matches_exact_rational_to_one_ulp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mut draw = || {
                let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                ScaledComplex::normalize(z, rng.random_range(-2000..2000)).unwrap()
            };
            let (u, v) = (draw(), draw());
            let p = u.mul(&v).unwrap();
            let (ur, ui) = (exact(u.mantissa().re), exact(u.mantissa().im));
            let (vr, vi) = (exact(v.mantissa().re), exact(v.mantissa().im));
            let scale = pow2(u.exponent() + v.exponent() - p.exponent());
            let want_re = (&ur * &vr - &ui * &vi) * &scale;
            let want_im = (&ur * &vi + &ui * &vr) * &scale;
            let got_re = exact(p.mantissa().re);
            let got_im = exact(p.mantissa().im);
            // complex product: each component within a couple of ulps of |m|
            let ulp = exact(4.0 * f64::EPSILON);
            assert!((got_re - want_re).abs() <= ulp, "{u} * {v}");
            assert!((got_im - want_im).abs() <= ulp, "{u} * {v}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_native(re in -1e300f64..1e300, im in -1e300f64..1e300) {
            let z = c(re, im);
            prop_assert_eq!(ScaledComplex::from_complex(z).unwrap().to_complex(), z);
        }

        #[test]
        fn log_abs_is_additive(
            a in 0.5f64..2.0, b in 0.5f64..2.0,
            ea in -1_000_000i64..1_000_000, eb in -1_000_000i64..1_000_000,
        ) {
            let u = ScaledComplex::normalize(c(a, 0.3), ea).unwrap();
            let v = ScaledComplex::normalize(c(-0.2, b), eb).unwrap();
            let lhs = u.mul(&v).unwrap().log_abs();
            let rhs = u.log_abs() + v.log_abs();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn add_is_commutative(a in -4.0f64..4.0, b in -4.0f64..4.0, e in -80i64..80) {
            let u = ScaledComplex::normalize(c(a, b), e).unwrap();
            let v = ScaledComplex::normalize(c(b, -a), 0).unwrap();
            prop_assert_eq!(u.add(&v).unwrap(), v.add(&u).unwrap());
        }
    }

    #[test]
    fn zero_is_canonical_after_cancellation() {
        let z = ScaledComplex::normalize(c(-0.0, -0.0), 5).unwrap();
        assert_eq!(z, ScaledComplex::ZERO);
    }
}
