//! Branch-pinned elementary functions.
//!
//! Every multi-valued function here uses the principal logarithm with
//! argument in `(-pi, pi]`. A signed zero imaginary part is treated as `+0`
//! so that points on a cut always take the value from above.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaled::ScaledComplex;

/// Which of the two square-root branches to use: `phi` or `-phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub const BOTH: [BranchSign; 2] = [BranchSign::Plus, BranchSign::Minus];

    pub fn factor(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }

    pub fn apply(self, phi: Complex64) -> Complex64 {
        match self {
            BranchSign::Plus => phi,
            BranchSign::Minus => -phi,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            BranchSign::Plus => BranchSign::Minus,
            BranchSign::Minus => BranchSign::Plus,
        }
    }
}

#[inline]
fn unsigned_zero(z: Complex64) -> Complex64 {
    // -0.0 + 0.0 == +0.0
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

pub fn principal_sqrt(z: Complex64) -> Complex64 {
    unsigned_zero(z).sqrt()
}

pub fn principal_log(z: Complex64) -> Complex64 {
    unsigned_zero(z).ln()
}

/// Product of principal square roots `sqrt(z - r) * sqrt(z + r)` with
/// `r = 2 sqrt(a)` (real for `a > 0`, imaginary for `a < 0`).
///
/// For `a > 0` the only cut is `[-r, r]` and the result behaves like `z` at
/// infinity. For `a < 0` the kernel is evaluated literally: besides the
/// segment between the roots it also jumps across the horizontal rays
/// `Re z < 0, Im z = ±2 sqrt(-a)`, and it is positive on the negative real
/// axis. Callers that need a particular branch pick one with [`BranchSign`].
pub fn sqrt_quad(a: f64, z: Complex64) -> Result<Complex64> {
    if !a.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput(format!("sqrt_quad({a}, {z})")));
    }
    if a == 0.0 {
        return Ok(z);
    }
    let half_len = 2.0 * a.abs().sqrt();
    let r = if a > 0.0 {
        if z.im == 0.0 && z.re.abs() < half_len {
            return Err(Error::BranchCut(format!("{z} lies on [-{half_len}, {half_len}]")));
        }
        Complex64::new(half_len, 0.0)
    } else {
        if z.re == 0.0 && z.im.abs() < half_len {
            return Err(Error::BranchCut(format!("{z} lies on [-{half_len}i, {half_len}i]")));
        }
        Complex64::new(0.0, half_len)
    };
    Ok(principal_sqrt(z - r) * principal_sqrt(z + r))
}

/// `exp(exponent * Log(base))` returned in scaled form.
pub fn log_pow(base: Complex64, exponent: Complex64) -> Result<ScaledComplex> {
    if base == Complex64::new(0.0, 0.0) {
        return if exponent.re > 0.0 {
            Ok(ScaledComplex::ZERO)
        } else {
            Err(Error::Singular(format!("0^{exponent}")))
        };
    }
    if exponent == Complex64::new(0.0, 0.0) {
        return Ok(ScaledComplex::ONE);
    }
    ScaledComplex::from_log(exponent * principal_log(base))
}

/// Principal arccos, exactly real with range `[0, pi]` on `[-1, 1]`.
pub fn arccos_branch(w: Complex64) -> Complex64 {
    let w = unsigned_zero(w);
    if w.im == 0.0 && w.re.abs() <= 1.0 {
        return Complex64::new(w.re.acos(), 0.0);
    }
    w.acos()
}
