//! Forward evaluation of the three-term recurrence
//! `p_{k+1} = (x - d k) p_k - (a k + b) p_{k-1}`, `p_0 = 1`, `p_1 = x`.

use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::branch::sqrt_quad;
use crate::error::{Error, Result};
use crate::scaled::{ldexp, rational_from_f64, BigFloat, HpComplex, RationalComplex, ScaledComplex};

/// Parameter regime, decided by the sign of `d` (after reflection) and `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `d > 0, a > 0`
    Ia,
    /// `d > 0, a < 0`
    Ib,
    /// `d > 0, a = 0`
    Ic,
    /// `d = 0, a > 0`
    IIa,
    /// `d = 0, a < 0`
    IIb,
    /// `d = 0, a = 0`
    IIc,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::Ia => "IA",
            Case::Ib => "IB",
            Case::Ic => "IC",
            Case::IIa => "IIA",
            Case::IIb => "IIB",
            Case::IIc => "IIC",
        }
    }

    /// Drifting recurrences (`d != 0`) are scaled as `x = n d + sqrt(n) z`.
    pub fn drifts(self) -> bool {
        matches!(self, Case::Ia | Case::Ib | Case::Ic)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Coefficients of `A_k = d k` and `B_k = a k + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceParams {
    pub d: f64,
    pub a: f64,
    pub b: f64,
}

impl RecurrenceParams {
    pub fn new(d: f64, a: f64, b: f64) -> Result<Self> {
        if !(d.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "parameters must be finite (d={d}, a={a}, b={b})"
            )));
        }
        Ok(RecurrenceParams { d, a, b })
    }

    /// Case tag; a negative `d` is tagged as its reflection.
    pub fn case(&self) -> Case {
        let drift = self.d != 0.0;
        match (drift, self.a.partial_cmp(&0.0)) {
            (true, Some(std::cmp::Ordering::Greater)) => Case::Ia,
            (true, Some(std::cmp::Ordering::Less)) => Case::Ib,
            (true, _) => Case::Ic,
            (false, Some(std::cmp::Ordering::Greater)) => Case::IIa,
            (false, Some(std::cmp::Ordering::Less)) => Case::IIb,
            (false, _) => Case::IIc,
        }
    }

    /// Parameters of `(-1)^n p_n(-x)`, which satisfies the recurrence with `d`
    /// negated.
    pub fn reflected(&self) -> Self {
        RecurrenceParams { d: -self.d, ..*self }
    }

    /// Reflects when `d < 0`, so the result always has `d >= 0`.
    pub fn normalized(&self) -> (Self, bool) {
        if self.d < 0.0 {
            (self.reflected(), true)
        } else {
            (*self, false)
        }
    }

    /// `-a`, the positive slope parameter of the negative-`a` cases.
    pub fn neg_a(&self) -> f64 {
        -self.a
    }

    /// `-b`, paired with [`Self::neg_a`].
    pub fn neg_b(&self) -> f64 {
        -self.b
    }

    /// Coefficients as used by native evaluation.
    #[inline]
    pub fn coefficients(&self, k: usize) -> (f64, f64) {
        let kf = k as f64;
        (self.d * kf, self.a * kf + self.b)
    }
}

/// How the recurrence is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum EvalMode {
    /// `f64` mantissa with a separate binary exponent.
    Native,
    /// Binary floating point with the given number of significand bits.
    HighPrec { bits: u32 },
    /// Exact rational arithmetic on the `f64` inputs.
    Rational,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalMode::Native => f.write_str("native"),
            EvalMode::HighPrec { bits } => write!(f, "highprec({bits})"),
            EvalMode::Rational => f.write_str("rational"),
        }
    }
}

/// `p_n(x)` and optionally its derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyValue {
    pub n: usize,
    pub x: Complex64,
    pub value: ScaledComplex,
    pub derivative: Option<ScaledComplex>,
}

// Native path: plain complex arithmetic with exact power-of-two rescaling.
// Value pair and derivative pair carry separate exponents.

const RESCALE_HI: f64 = 1.0e150;
const RESCALE_LO: f64 = 1.0e-150;

#[inline]
fn needs_rescale(u: Complex64, v: Complex64) -> bool {
    let m = u.re.abs().max(u.im.abs()).max(v.re.abs()).max(v.im.abs());
    m > RESCALE_HI || (m < RESCALE_LO && m != 0.0)
}

#[inline]
fn rescale_pair(u: &mut Complex64, v: &mut Complex64, exp: &mut i64) {
    let m = u.re.abs().max(u.im.abs()).max(v.re.abs()).max(v.im.abs());
    let shift = crate::scaled::ilogb(m);
    *u = Complex64::new(ldexp(u.re, -shift), ldexp(u.im, -shift));
    *v = Complex64::new(ldexp(v.re, -shift), ldexp(v.im, -shift));
    *exp += shift;
}

#[inline]
fn shift_c(z: Complex64, k: i64) -> Complex64 {
    Complex64::new(ldexp(z.re, k), ldexp(z.im, k))
}

fn check_x(x: Complex64) -> Result<()> {
    if x.re.is_finite() && x.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite argument {x}")))
    }
}

/// Value and derivative in native scaled arithmetic.
pub(crate) fn native_with_deriv(
    p: &RecurrenceParams,
    x: Complex64,
    n: usize,
) -> Result<(ScaledComplex, ScaledComplex)> {
    check_x(x)?;
    if n == 0 {
        return Ok((ScaledComplex::ONE, ScaledComplex::ZERO));
    }
    let (mut v0, mut v1) = (Complex64::new(1.0, 0.0), x);
    let (mut d0, mut d1) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let (mut ev, mut ed) = (0i64, 0i64);
    for k in 1..n {
        let (ak, bk) = p.coefficients(k);
        let lin = x - ak;
        // derivative uses v1 at the value exponent; bring it to ed
        let v1_in_d = shift_c(v1, ev - ed);
        let d2 = v1_in_d + lin * d1 - bk * d0;
        let v2 = lin * v1 - bk * v0;
        v0 = v1;
        v1 = v2;
        d0 = d1;
        d1 = d2;
        if needs_rescale(v0, v1) {
            rescale_pair(&mut v0, &mut v1, &mut ev);
        }
        if needs_rescale(d0, d1) {
            rescale_pair(&mut d0, &mut d1, &mut ed);
        }
        if !(v1.re.is_finite() && v1.im.is_finite() && d1.re.is_finite() && d1.im.is_finite()) {
            return Err(Error::ExponentOverflow);
        }
    }
    Ok((ScaledComplex::normalize(v1, ev)?, ScaledComplex::normalize(d1, ed)?))
}

/// `p_n(x)` in native scaled arithmetic.
pub(crate) fn native_value(p: &RecurrenceParams, x: Complex64, n: usize) -> Result<ScaledComplex> {
    check_x(x)?;
    if n == 0 {
        return Ok(ScaledComplex::ONE);
    }
    let (mut v0, mut v1) = (Complex64::new(1.0, 0.0), x);
    let mut ev = 0i64;
    for k in 1..n {
        let (ak, bk) = p.coefficients(k);
        let v2 = (x - ak) * v1 - bk * v0;
        v0 = v1;
        v1 = v2;
        if needs_rescale(v0, v1) {
            rescale_pair(&mut v0, &mut v1, &mut ev);
        }
    }
    ScaledComplex::normalize(v1, ev)
}

/// Arithmetic used by the exact and high-precision paths.
trait Arith {
    type T: Clone;
    fn zero(&self) -> Self::T;
    fn one(&self) -> Self::T;
    fn int(&self, k: usize) -> Self::T;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn sub(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn to_scaled(&self, a: &Self::T) -> Result<ScaledComplex>;
}

struct HighPrec(u32);

impl Arith for HighPrec {
    type T = HpComplex;
    fn zero(&self) -> HpComplex {
        HpComplex::zero()
    }
    fn one(&self) -> HpComplex {
        HpComplex::one()
    }
    fn int(&self, k: usize) -> HpComplex {
        HpComplex::from_real(BigFloat::from_int(k as i64))
    }
    fn add(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        a.add(b, self.0)
    }
    fn sub(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        a.sub(b, self.0)
    }
    fn mul(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        a.mul(b, self.0)
    }
    fn to_scaled(&self, a: &HpComplex) -> Result<ScaledComplex> {
        a.to_scaled()
    }
}

struct Exact;

impl Arith for Exact {
    type T = RationalComplex;
    fn zero(&self) -> RationalComplex {
        RationalComplex::zero()
    }
    fn one(&self) -> RationalComplex {
        RationalComplex::one()
    }
    fn int(&self, k: usize) -> RationalComplex {
        Complex::new(BigRational::from_integer(k.into()), BigRational::zero())
    }
    fn add(&self, a: &RationalComplex, b: &RationalComplex) -> RationalComplex {
        a + b
    }
    fn sub(&self, a: &RationalComplex, b: &RationalComplex) -> RationalComplex {
        a - b
    }
    fn mul(&self, a: &RationalComplex, b: &RationalComplex) -> RationalComplex {
        a * b
    }
    fn to_scaled(&self, a: &RationalComplex) -> Result<ScaledComplex> {
        ScaledComplex::from_rational(a)
    }
}

/// Runs the recurrence and hands `(k, p_k, p'_k)` to `sink` for every
/// `k = 0..=n`.
fn run<R: Arith>(
    ar: &R,
    coef: [&R::T; 3],
    x: &R::T,
    n: usize,
    with_deriv: bool,
    mut sink: impl FnMut(usize, &R::T, Option<&R::T>) -> Result<()>,
) -> Result<()> {
    let [d, a, b] = coef;
    let (mut v0, mut v1) = (ar.one(), x.clone());
    let (mut d0, mut d1) = (ar.zero(), ar.one());
    sink(0, &v0, with_deriv.then_some(&d0))?;
    if n == 0 {
        return Ok(());
    }
    sink(1, &v1, with_deriv.then_some(&d1))?;
    for k in 1..n {
        let kk = ar.int(k);
        let lin = ar.sub(x, &ar.mul(d, &kk));
        let bk = ar.add(&ar.mul(a, &kk), b);
        let v2 = ar.sub(&ar.mul(&lin, &v1), &ar.mul(&bk, &v0));
        if with_deriv {
            let d2 = ar.sub(&ar.add(&v1, &ar.mul(&lin, &d1)), &ar.mul(&bk, &d0));
            d0 = std::mem::replace(&mut d1, d2);
        }
        v0 = std::mem::replace(&mut v1, v2);
        sink(k + 1, &v1, with_deriv.then_some(&d1))?;
    }
    Ok(())
}

/// Exact rational coefficients; the parameters need not be dyadic.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalParams {
    pub d: BigRational,
    pub a: BigRational,
    pub b: BigRational,
}

impl RationalParams {
    pub fn from_params(p: &RecurrenceParams) -> Result<Self> {
        Ok(RationalParams {
            d: rational_from_f64(p.d)?,
            a: rational_from_f64(p.a)?,
            b: rational_from_f64(p.b)?,
        })
    }
}

fn real(r: &BigRational) -> RationalComplex {
    Complex::new(r.clone(), BigRational::zero())
}

/// Exact `p_0(x), ..., p_n(x)` for rational parameters and argument.
pub fn rational_sequence(p: &RationalParams, x: &RationalComplex, n: usize) -> Result<Vec<RationalComplex>> {
    let mut out = Vec::with_capacity(n + 1);
    let coef = [real(&p.d), real(&p.a), real(&p.b)];
    run(&Exact, [&coef[0], &coef[1], &coef[2]], x, n, false, |_, v, _| {
        out.push(v.clone());
        Ok(())
    })?;
    Ok(out)
}

fn sequence_with<R: Arith>(
    ar: &R,
    coef: [R::T; 3],
    x: R::T,
    n: usize,
    with_deriv: bool,
) -> Result<Vec<(ScaledComplex, Option<ScaledComplex>)>> {
    let mut out = Vec::with_capacity(n + 1);
    run(ar, [&coef[0], &coef[1], &coef[2]], &x, n, with_deriv, |_, v, dv| {
        let dv = dv.map(|t| ar.to_scaled(t)).transpose()?;
        out.push((ar.to_scaled(v)?, dv));
        Ok(())
    })?;
    Ok(out)
}

fn exact_sequence(
    p: &RecurrenceParams,
    x: Complex64,
    n: usize,
    mode: EvalMode,
    with_deriv: bool,
) -> Result<Vec<(ScaledComplex, Option<ScaledComplex>)>> {
    check_x(x)?;
    match mode {
        EvalMode::HighPrec { bits } => {
            if bits < 16 {
                return Err(Error::InvalidInput(format!("{bits} bits is too few")));
            }
            let lift = |v: f64| HpComplex::from_real(BigFloat::from_f64(v));
            sequence_with(
                &HighPrec(bits),
                [lift(p.d), lift(p.a), lift(p.b)],
                HpComplex::from_complex(x),
                n,
                with_deriv,
            )
        }
        EvalMode::Rational => {
            let rp = RationalParams::from_params(p)?;
            let rx = Complex::new(rational_from_f64(x.re)?, rational_from_f64(x.im)?);
            sequence_with(&Exact, [real(&rp.d), real(&rp.a), real(&rp.b)], rx, n, with_deriv)
        }
        EvalMode::Native => unreachable!("native mode has its own loop"),
    }
}

/// `p_k(x)` for every `k = 0..=n` in the requested mode.
pub fn pi_sequence(p: &RecurrenceParams, x: Complex64, n: usize, mode: EvalMode) -> Result<Vec<ScaledComplex>> {
    if mode == EvalMode::Native {
        check_x(x)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(ScaledComplex::ONE);
        if n == 0 {
            return Ok(out);
        }
        let (mut v0, mut v1) = (Complex64::new(1.0, 0.0), x);
        let mut ev = 0i64;
        out.push(ScaledComplex::normalize(v1, ev)?);
        for k in 1..n {
            let (ak, bk) = p.coefficients(k);
            let v2 = (x - ak) * v1 - bk * v0;
            v0 = v1;
            v1 = v2;
            if needs_rescale(v0, v1) {
                rescale_pair(&mut v0, &mut v1, &mut ev);
            }
            out.push(ScaledComplex::normalize(v1, ev)?);
        }
        return Ok(out);
    }
    Ok(exact_sequence(p, x, n, mode, false)?
        .into_iter()
        .map(|(v, _)| v)
        .collect())
}

/// `p_n(x)` in native scaled arithmetic.
pub fn eval_pi(p: &RecurrenceParams, x: Complex64, n: usize) -> Result<PolyValue> {
    eval_pi_mode(p, x, n, EvalMode::Native)
}

/// `p_n(x)` together with `p_n'(x)` in native scaled arithmetic.
pub fn eval_pi_deriv(p: &RecurrenceParams, x: Complex64, n: usize) -> Result<PolyValue> {
    eval_pi_deriv_mode(p, x, n, EvalMode::Native)
}

pub fn eval_pi_mode(p: &RecurrenceParams, x: Complex64, n: usize, mode: EvalMode) -> Result<PolyValue> {
    let value = match mode {
        EvalMode::Native => native_value(p, x, n)?,
        _ => exact_sequence(p, x, n, mode, false)?.pop().expect("nonempty").0,
    };
    Ok(PolyValue {
        n,
        x,
        value,
        derivative: None,
    })
}

pub fn eval_pi_deriv_mode(p: &RecurrenceParams, x: Complex64, n: usize, mode: EvalMode) -> Result<PolyValue> {
    let (value, deriv) = match mode {
        EvalMode::Native => native_with_deriv(p, x, n)?,
        _ => {
            let (v, dv) = exact_sequence(p, x, n, mode, true)?.pop().expect("nonempty");
            (v, dv.expect("derivative requested"))
        }
    };
    Ok(PolyValue {
        n,
        x,
        value,
        derivative: Some(deriv),
    })
}

/// Magnitude below which a ratio is treated as zero.
pub const RATIO_FLOOR: f64 = 1e-290;

/// Successive ratios `w_k = p_k / p_{k-1}` for `k = 1..=n`.
pub fn ratio_sequence(p: &RecurrenceParams, x: Complex64, n: usize) -> Result<Vec<Complex64>> {
    check_x(x)?;
    if n == 0 {
        return Err(Error::InvalidInput("ratio sequence needs n >= 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut w = x;
    for k in 1..=n {
        if w.norm() < RATIO_FLOOR {
            return Err(Error::NearZeroRatio { k, magnitude: w.norm() });
        }
        out.push(w);
        if k < n {
            let (ak, bk) = p.coefficients(k);
            w = x - ak - bk / w;
        }
    }
    Ok(out)
}

/// Two-term approximation of `w_k(x)` obtained by successive substitution in
/// the ratio recurrence.
pub fn wk_asymptotic(p: &RecurrenceParams, x: Complex64, k: usize, n: usize) -> Result<Complex64> {
    check_x(x)?;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n (k={k}, n={n})")));
    }
    if p.d < 0.0 {
        // w_k(-d; -x) = -w_k(d; x)
        return Ok(-wk_asymptotic(&p.reflected(), -x, k, n)?);
    }
    let kf = k as f64;
    let (d, a, b) = (p.d, p.a, p.b);
    if d > 0.0 {
        let u = x - d * kf;
        let s = sqrt_quad(a * kf, u)?;
        if s.norm() == 0.0 {
            return Err(Error::Singular(format!("turning point at k={k}")));
        }
        let corr = 1.0 + d / (2.0 * s) + (d * x - d * d * kf) / (2.0 * s * s);
        Ok((u + s) / 2.0 * corr)
    } else {
        let s = sqrt_quad(a * kf, x)?;
        if s.norm() == 0.0 || (x + s).norm() == 0.0 {
            return Err(Error::Singular(format!("turning point at k={k}")));
        }
        let corr = 1.0 + a / (s * s) - 2.0 * b / ((x + s) * s);
        Ok((x + s) / 2.0 * corr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(u: &ScaledComplex, v: &ScaledComplex) -> f64 {
        u.rel_error(v).unwrap()
    }

    fn params(d: f64, a: f64, b: f64) -> RecurrenceParams {
        RecurrenceParams::new(d, a, b).unwrap()
    }

    #[test]
    fn case_tags() {
        assert_eq!(params(1.0, 1.0, 0.0).case(), Case::Ia);
        assert_eq!(params(-1.0, -1.0, 0.0).case(), Case::Ib);
        assert_eq!(params(2.0, 0.0, 3.0).case(), Case::Ic);
        assert_eq!(params(0.0, 0.5, 0.0).case(), Case::IIa);
        assert_eq!(params(0.0, -1.0, 0.0).case(), Case::IIb);
        assert_eq!(params(0.0, 0.0, 0.25).case(), Case::IIc);
        assert!(RecurrenceParams::new(f64::NAN, 0.0, 0.0).is_err());
        let p = params(1.0, -2.0, 0.5);
        assert_eq!((p.neg_a(), p.neg_b()), (2.0, -0.5));
    }

    #[test]
    fn low_degree_examples() {
        let p = params(1.3, -0.7, 0.4);
        let x = c(0.9, -1.7);
        assert_eq!(eval_pi(&p, x, 0).unwrap().value, ScaledComplex::ONE);
        assert_eq!(eval_pi(&p, x, 1).unwrap().value.to_complex(), x);
        let two = eval_pi(&p, x, 2).unwrap().value.to_complex();
        let want = x * (x - p.d) - (p.a + p.b);
        assert!((two - want).norm() < 1e-15 * want.norm());

        let d1 = eval_pi_deriv(&p, x, 1).unwrap().derivative.unwrap();
        assert_eq!(d1.to_complex(), c(1.0, 0.0));
        let d2 = eval_pi_deriv(&p, x, 2).unwrap().derivative.unwrap().to_complex();
        assert!((d2 - (2.0 * x - p.d)).norm() < 1e-15 * d2.norm());
    }

    #[test]
    fn leading_behaviour_is_degree_n() {
        let p = params(1.0, 1.0, 0.5);
        for n in [5usize, 40, 120] {
            let x = c(1e8, 3e7);
            let v = eval_pi(&p, x, n).unwrap().value;
            let want = n as f64 * x.norm().ln();
            assert!((v.log_abs() - want).abs() / want < 1e-6);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = params(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = rng.random_range(1..=50);
            let x = c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let h = 1e-6 * (1.0 + x.norm());
            let fd = (eval_pi(&p, x + h, n)
                .unwrap()
                .value
                .sub(&eval_pi(&p, x - h, n).unwrap().value))
            .unwrap()
            .scale(0.5 / h)
            .unwrap();
            let an = eval_pi_deriv(&p, x, n).unwrap().derivative.unwrap();
            assert!(rel(&fd, &an) < 1e-6, "n={n} x={x} p={p:?}");
        }
    }

    #[test]
    fn ratio_examples() {
        let p = params(1.0, 1.0, 0.0);
        assert_eq!(ratio_sequence(&p, c(0.3, 0.1), 1).unwrap(), vec![c(0.3, 0.1)]);
        let w = ratio_sequence(&p, c(10.0, 0.0), 2).unwrap();
        assert_eq!(w[0], c(10.0, 0.0));
        assert!((w[1] - c(8.9, 0.0)).norm() < 1e-15);
        assert!(matches!(
            ratio_sequence(&p, c(0.0, 0.0), 3),
            Err(Error::NearZeroRatio { k: 1, .. })
        ));
    }

    #[test]
    fn ratio_product_reproduces_value() {
        let p = params(1.0, 1.0, 0.0);
        let n = 100;
        let x = c(n as f64 + 30.0, 0.0);
        let w = ratio_sequence(&p, x, n).unwrap();
        let mut prod = ScaledComplex::ONE;
        for wk in &w {
            prod = prod.mul_complex(*wk).unwrap();
        }
        assert!(rel(&prod, &eval_pi(&p, x, n).unwrap().value) < 1e-10);
    }

    fn max_ratio_error(p: &RecurrenceParams, x: Complex64, n: usize) -> f64 {
        let w = ratio_sequence(p, x, n).unwrap();
        (1..=n)
            .map(|k| (wk_asymptotic(p, x, k, n).unwrap() / w[k - 1] - 1.0).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ratio_approximation_examples() {
        assert!(max_ratio_error(&params(1.0, 1.0, 0.0), c(460.0, 0.0), 400) < 0.05);
        assert!(max_ratio_error(&params(0.0, 1.0, 0.0), c(60.0, 0.0), 400) < 0.05);
        // negative d goes through the reflection
        assert!(max_ratio_error(&params(-1.0, 1.0, 0.0), c(-460.0, 0.0), 400) < 0.05);
        let p = params(1.0, 0.0, 0.0);
        let mut last = f64::INFINITY;
        for r in [1e2, 1e4, 1e6] {
            let x = c(r, 0.0);
            let e = (wk_asymptotic(&p, x, 1, 1).unwrap() - x + 1.0).norm() / x.norm();
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn chebyshev_closed_form() {
        let p = params(0.0, 0.0, 0.25);
        for j in 0..50 {
            let x = -0.99 + 1.98 * j as f64 / 49.0;
            let seq = pi_sequence(&p, c(x, 0.0), 100, EvalMode::Native).unwrap();
            for (n, v) in seq.iter().enumerate().skip(1) {
                let closed = ((n + 1) as f64 * x.acos()).sin() / (2f64.powi(n as i32) * (1.0 - x * x).sqrt());
                let want = ScaledComplex::from_f64(closed).unwrap();
                assert!(rel(v, &want) < 1e-11, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn modes_agree_with_native() {
        let p = params(1.0, 0.75, -0.125);
        let x = c(37.25, 1.5);
        let native = eval_pi_deriv(&p, x, 60).unwrap();
        for mode in [EvalMode::Rational, EvalMode::HighPrec { bits: 200 }] {
            let other = eval_pi_deriv_mode(&p, x, 60, mode).unwrap();
            assert!(rel(&native.value, &other.value) < 1e-12);
            assert!(rel(native.derivative.as_ref().unwrap(), other.derivative.as_ref().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn conjugation_is_exact_in_rational_mode() {
        let p = RationalParams {
            d: BigRational::new(1.into(), 3.into()),
            a: BigRational::new((-2).into(), 7.into()),
            b: BigRational::new(1.into(), 5.into()),
        };
        let x = Complex::new(
            BigRational::new(5.into(), 11.into()),
            BigRational::new(2.into(), 9.into()),
        );
        let fwd = rational_sequence(&p, &x, 30).unwrap();
        let bwd = rational_sequence(&p, &x.conj(), 30).unwrap();
        for (u, v) in fwd.iter().zip(&bwd) {
            assert_eq!(u.conj(), *v);
        }
    }

    #[test]
    fn forward_recurrence_is_unstable_on_the_negative_slope_segment() {
        // With d > 0 and a < 0 the zeros sit on a curve off the real axis,
        // and real points inside the drift interval see heavy cancellation.
        let p = params(1.0, -1.0, 0.0);
        let x = c(70.7, 0.0);
        let native = eval_pi(&p, x, 100).unwrap().value;
        let exact = eval_pi_mode(&p, x, 100, EvalMode::HighPrec { bits: 256 })
            .unwrap()
            .value;
        assert!(rel(&native, &exact) > 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reflection(d in -2.0..2.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64,
                      re in -30.0..30.0f64, im in 0.5..30.0f64, n in 0usize..200) {
            let p = params(d, a, b);
            let x = c(re, im);
            let lhs = eval_pi(&p, x, n).unwrap().value;
            let mut rhs = eval_pi(&p.reflected(), -x, n).unwrap().value;
            if n % 2 == 1 {
                rhs = rhs.neg();
            }
            prop_assert!(rel(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn rotation(a in -2.0..2.0f64, b in -2.0..2.0f64, re in -10.0..10.0f64,
                    im in 0.5..10.0f64, n in 0usize..200) {
            let z = c(re, im);
            let lhs = eval_pi(&params(0.0, a, b), c(0.0, 1.0) * z, n).unwrap().value;
            let phase = c(0.0, -1.0).powu(n as u32);
            let lhs = lhs.mul_complex(phase).unwrap();
            let rhs = eval_pi(&params(0.0, -a, -b), z, n).unwrap().value;
            prop_assert!(rel(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn conjugation(d in -2.0..2.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64,
                       re in -30.0..30.0f64, im in 0.5..30.0f64, n in 0usize..150) {
            let p = params(d, a, b);
            let x = c(re, im);
            let u = eval_pi(&p, x.conj(), n).unwrap().value;
            let v = eval_pi(&p, x, n).unwrap().value.conj();
            prop_assert!(rel(&u, &v) < 1e-13);
        }
    }
}
