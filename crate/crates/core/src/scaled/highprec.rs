use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::ScaledComplex;
use crate::error::Result;

/// Binary floating point with an arbitrary-size integer significand:
/// `value = mant · 2^exp`. The working precision is passed to every rounding
/// operation rather than stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

fn decompose(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if biased == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), biased - 1075)
    }
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64({x})");
        if x == 0.0 {
            return Self::zero();
        }
        let (m, e) = decompose(x);
        BigFloat {
            mant: BigInt::from(m),
            exp: e,
        }
    }

    pub fn from_int(k: i64) -> Self {
        BigFloat {
            mant: BigInt::from(k),
            exp: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Smallest `t` with `|value| < 2^t`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn rounded(mant: BigInt, exp: i64, prec: u32) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let bits = mant.bits() as i64;
        let excess = bits - prec as i64;
        if excess <= 0 {
            return BigFloat { mant, exp };
        }
        // round half away from zero on the magnitude
        let (sign, mag) = (mant.sign(), mant.magnitude().clone());
        let half = num_bigint::BigUint::from(1u8) << (excess as u64 - 1);
        let mag = (mag + half) >> excess as u64;
        BigFloat {
            mant: BigInt::from_biguint(sign, mag),
            exp: exp + excess,
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        // an operand more than prec+2 bits below the other cannot change
        // the rounded result
        if self.top() - other.top() > prec as i64 + 2 {
            return self.clone();
        }
        if other.top() - self.top() > prec as i64 + 2 {
            return other.clone();
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (hi.exp - lo.exp) as u64;
        let sum = (&hi.mant << shift) + &lo.mant;
        Self::rounded(sum, lo.exp, prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::rounded(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    /// Significand truncated so that it is expressed in units of `2^unit`.
    fn in_units(&self, unit: i64) -> f64 {
        let v = if self.exp >= unit {
            &self.mant << (self.exp - unit) as u64
        } else {
            // arithmetic shift; the truncation is far below f64 resolution
            &self.mant >> (unit - self.exp) as u64
        };
        v.to_f64().unwrap_or(0.0)
    }

    /// Nearest `f64` (saturating to infinities outside the range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let unit = self.top() - 64;
        super::ldexp(self.in_units(unit), unit)
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }
}

/// Complex number over [`BigFloat`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl HpComplex {
    pub fn zero() -> Self {
        HpComplex {
            re: BigFloat::zero(),
            im: BigFloat::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_real(BigFloat::from_int(1))
    }

    pub fn from_real(re: BigFloat) -> Self {
        HpComplex {
            re,
            im: BigFloat::zero(),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        HpComplex {
            re: BigFloat::from_f64(z.re),
            im: BigFloat::from_f64(z.im),
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        HpComplex {
            re: self.re.add(&o.re, prec),
            im: self.im.add(&o.im, prec),
        }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        HpComplex {
            re: self.re.sub(&o.re, prec),
            im: self.im.sub(&o.im, prec),
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        if self.im.is_zero() {
            return self.mul_real(&self.re, o, prec);
        }
        if o.im.is_zero() {
            return self.mul_real(&o.re, self, prec);
        }
        // one extra guard word for the cancellation in re
        let wide = prec + 64;
        let re = self.re.mul(&o.re, wide).sub(&self.im.mul(&o.im, wide), prec);
        let im = self.re.mul(&o.im, wide).add(&self.im.mul(&o.re, wide), prec);
        HpComplex { re, im }
    }

    fn mul_real(&self, r: &BigFloat, z: &Self, prec: u32) -> Self {
        HpComplex {
            re: r.mul(&z.re, prec),
            im: r.mul(&z.im, prec),
        }
    }

    pub fn to_scaled(&self) -> Result<ScaledComplex> {
        let top = match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => return Ok(ScaledComplex::ZERO),
            (false, true) => self.re.top(),
            (true, false) => self.im.top(),
            (false, false) => self.re.top().max(self.im.top()),
        };
        let unit = top - 62;
        let re = if self.re.is_zero() { 0.0 } else { self.re.in_units(unit) };
        let im = if self.im.is_zero() { 0.0 } else { self.im.in_units(unit) };
        ScaledComplex::normalize(Complex64::new(re, im), unit)
    }
}
