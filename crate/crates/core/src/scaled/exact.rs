use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ScaledComplex;
use crate::error::{Error, Result};

/// Complex number with exact rational components.
pub type RationalComplex = Complex<BigRational>;

/// Exact value of a finite `f64` as a rational.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite {x}")))
}

fn top_bits(r: &BigRational) -> i64 {
    r.numer().bits() as i64 - r.denom().bits() as i64
}

/// `r · 2^shift` truncated to an integer, as `f64`.
fn shifted_quotient(r: &BigRational, shift: i64) -> f64 {
    let (mut num, mut den): (BigInt, BigInt) = (r.numer().clone(), r.denom().clone());
    if shift >= 0 {
        num <<= shift as u64;
    } else {
        den <<= (-shift) as u64;
    }
    (num / den).to_f64().unwrap_or(0.0)
}

pub(crate) fn rational_to_scaled(z: &RationalComplex) -> Result<ScaledComplex> {
    let top = match (z.re.is_zero(), z.im.is_zero()) {
        (true, true) => return Ok(ScaledComplex::ZERO),
        (false, true) => top_bits(&z.re),
        (true, false) => top_bits(&z.im),
        (false, false) => top_bits(&z.re).max(top_bits(&z.im)),
    };
    let shift = 64 - top;
    let re = shifted_quotient(&z.re, shift);
    let im = shifted_quotient(&z.im, shift);
    ScaledComplex::normalize(Complex64::new(re, im), -shift)
}

impl ScaledComplex {
    /// Nearest scaled value to an exact rational complex number.
    pub fn from_rational(z: &RationalComplex) -> Result<Self> {
        rational_to_scaled(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn conversion_of_thirds() {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let z = Complex::new(third.clone(), -third);
        let s = ScaledComplex::from_rational(&z).unwrap().to_complex();
        assert_eq!(s, Complex64::new(1.0 / 3.0, -1.0 / 3.0));
    }

    #[test]
    fn huge_rationals_keep_their_exponent() {
        let big = BigRational::from_integer(BigInt::one() << 5000u32);
        let z = Complex::new(big, BigRational::zero());
        let s = ScaledComplex::from_rational(&z).unwrap();
        assert_eq!(s.exponent(), 5000);
        assert_eq!(s.mantissa(), Complex64::new(1.0, 0.0));
    }
}
