//! Large-degree approximations of `p_n` at scaled points, per parameter case.
//!
//! Every formula is assembled in log space and exponentiated into a
//! [`ScaledComplex`]. Oscillatory formulas `2 cos w` are returned as the sum
//! of `e^{iw}` and `e^{-iw}` parts; outer formulas are evaluated on both
//! square-root branches. Where the cut is a straight segment the value is the
//! branch that behaves like `z` at infinity; on the curved cut of the
//! negative-`a` drifting case it is the branch of larger modulus.
//!
//! Scaled coordinates: `x = n d + sqrt(n) z` for `d > 0`, `x = n y` in the
//! zero-slope drifting case, `x = sqrt(n) y` and `x = i sqrt(n) y` for the
//! non-drifting cases with `a > 0` and `a < 0`, and `x` itself when
//! `d = a = 0`. Negative `d` is handled by reflection: the point is read in
//! the reflected frame and the value is multiplied by `(-1)^n`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::{arccos_branch, principal_log, principal_sqrt, sqrt_quad, BranchSign};
use crate::curve::{default_curve, segment_distance};
use crate::error::{Error, Result};
use crate::recurrence::{Case, RecurrenceParams};
use crate::scaled::ScaledComplex;

/// Default turning-point exclusion radius in scaled coordinates.
pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Outer,
    OscillatoryBulk,
    OscillatoryLeft,
    CurveNeighborhood,
    TurningPointExcluded,
}

impl RegionKind {
    pub fn label(self) -> &'static str {
        match self {
            RegionKind::Outer => "outer",
            RegionKind::OscillatoryBulk => "oscillatory_bulk",
            RegionKind::OscillatoryLeft => "oscillatory_left",
            RegionKind::CurveNeighborhood => "curve_neighborhood",
            RegionKind::TurningPointExcluded => "turning_point_excluded",
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classification of a scaled point together with its distance to the
/// nearest classification boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub kind: RegionKind,
    pub margin: f64,
}

impl Region {
    pub fn new(kind: RegionKind) -> Self {
        Region { kind, margin: f64::NAN }
    }
}

/// Both square-root branches of an outer formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterBranches {
    pub plus: ScaledComplex,
    pub minus: ScaledComplex,
    pub selected: BranchSign,
}

/// How an outer formula picks between its two branch evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Selection {
    /// The `+phi` evaluation, with `phi` the branch that behaves like `z`.
    Principal,
    /// Whichever evaluation has the larger modulus.
    Dominance,
}

impl OuterBranches {
    /// `log|other| - log|selected|`. Negative whenever the selected branch
    /// dominates; it can be positive for straight-cut formulas, whose
    /// continuation to the second sheet grows faster beyond the turning point.
    pub fn log_gap(&self) -> f64 {
        let (p, m) = (self.plus.log_abs(), self.minus.log_abs());
        match self.selected {
            BranchSign::Plus => m - p,
            BranchSign::Minus => p - m,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticValue {
    pub value: ScaledComplex,
    pub region: Region,
    /// The two terms whose sum is `value` (oscillatory and curve formulas).
    pub branch_parts: Option<(ScaledComplex, ScaledComplex)>,
    /// Both branch evaluations of an outer formula; `value` is the selected one.
    pub outer: Option<OuterBranches>,
}

impl AsymptoticValue {
    fn negate(mut self) -> Self {
        self.value = self.value.neg();
        if let Some((p, m)) = self.branch_parts.take() {
            self.branch_parts = Some((p.neg(), m.neg()));
        }
        if let Some(o) = self.outer.as_mut() {
            o.plus = o.plus.neg();
            o.minus = o.minus.neg();
        }
        self
    }

    fn rotate(mut self, unit: Complex64) -> Result<Self> {
        self.value = self.value.mul_complex(unit)?;
        if let Some((p, m)) = self.branch_parts.take() {
            self.branch_parts = Some((p.mul_complex(unit)?, m.mul_complex(unit)?));
        }
        if let Some(o) = self.outer.as_mut() {
            o.plus = o.plus.mul_complex(unit)?;
            o.minus = o.minus.mul_complex(unit)?;
        }
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// coordinates and classification

fn require_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(Error::InvalidInput("degree must be positive".into()))
    } else {
        Ok(n as f64)
    }
}

fn chebyshev_half_width(b: f64) -> Result<f64> {
    if b > 0.0 {
        Ok(2.0 * b.sqrt())
    } else {
        Err(Error::InvalidInput(format!(
            "zero-slope, zero-drift recurrence needs b > 0, got {b}"
        )))
    }
}

/// Polynomial argument `x` of a scaled point.
pub fn scaled_to_argument(params: &RecurrenceParams, n: usize, point: Complex64) -> Complex64 {
    let (p, reflected) = params.normalized();
    let nf = n as f64;
    let x = match p.case() {
        Case::Ia | Case::Ib => nf * p.d + nf.sqrt() * point,
        Case::Ic => nf * point,
        Case::IIa => nf.sqrt() * point,
        Case::IIb => Complex64::new(0.0, nf.sqrt()) * point,
        Case::IIc => point,
    };
    if reflected {
        -x
    } else {
        x
    }
}

/// Scaled coordinate of a polynomial argument.
pub fn argument_to_scaled(params: &RecurrenceParams, n: usize, x: Complex64) -> Complex64 {
    let (p, reflected) = params.normalized();
    let x = if reflected { -x } else { x };
    let nf = n as f64;
    match p.case() {
        Case::Ia | Case::Ib => (x - nf * p.d) / nf.sqrt(),
        Case::Ic => x / nf,
        Case::IIa => x / nf.sqrt(),
        Case::IIb => x / Complex64::new(0.0, nf.sqrt()),
        Case::IIc => x,
    }
}

/// Points where the printed formulas degenerate, in scaled coordinates.
pub fn turning_points(params: &RecurrenceParams, n: usize) -> Result<Vec<Complex64>> {
    let nf = require_n(n)?;
    let (p, _) = params.normalized();
    let re = |x: f64| Complex64::new(x, 0.0);
    Ok(match p.case() {
        Case::Ia => {
            let r = 2.0 * p.a.sqrt();
            vec![re(-nf.sqrt() * p.d), re(-r), re(r)]
        }
        Case::Ib => {
            let curve = default_curve(p.neg_a())?;
            let r = 2.0 * p.neg_a().sqrt();
            vec![
                re(-nf.sqrt() * p.d),
                re(curve.junction),
                Complex64::new(0.0, r),
                Complex64::new(0.0, -r),
            ]
        }
        Case::Ic => vec![re(0.0), re(p.d)],
        Case::IIa | Case::IIb => {
            let (slope, shift) = if p.case() == Case::IIa {
                (p.a, p.b)
            } else {
                (p.neg_a(), p.neg_b())
            };
            let r = 2.0 * slope.sqrt();
            let mut v = vec![re(-r), re(r)];
            if shift != 0.0 {
                v.push(re(0.0));
            }
            v
        }
        Case::IIc => {
            let r = chebyshev_half_width(p.b)?;
            vec![re(-r), re(r)]
        }
    })
}

/// Region of a scaled point. `delta` is the neighborhood half-width around
/// the limiting zero set and the exclusion radius around turning points.
pub fn classify_region(params: &RecurrenceParams, n: usize, point: Complex64, delta: f64) -> Result<Region> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    let nf = require_n(n)?;
    let (p, _) = params.normalized();
    let tps = turning_points(&p, n)?;
    let tp_dist = tps.iter().map(|t| (point - t).norm()).fold(f64::INFINITY, f64::min);
    if tp_dist < delta {
        return Ok(Region {
            kind: RegionKind::TurningPointExcluded,
            margin: delta - tp_dist,
        });
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut pieces: Vec<(f64, RegionKind)> = Vec::new();
    let mut interval = |lo: f64, hi: f64, kind: RegionKind| {
        if lo < hi {
            pieces.push((segment_distance(point, re(lo), re(hi)), kind));
        }
    };
    match p.case() {
        Case::Ia => {
            let r = 2.0 * p.a.sqrt();
            interval(-r, r, RegionKind::OscillatoryBulk);
            interval(-nf.sqrt() * p.d, -r, RegionKind::OscillatoryLeft);
        }
        Case::Ib => {
            let curve = default_curve(p.neg_a())?;
            interval(-nf.sqrt() * p.d, curve.junction, RegionKind::OscillatoryLeft);
            pieces.push((curve.distance(point), RegionKind::CurveNeighborhood));
        }
        Case::Ic => interval(0.0, p.d, RegionKind::OscillatoryBulk),
        Case::IIa | Case::IIb => {
            let slope = if p.case() == Case::IIa { p.a } else { p.neg_a() };
            let r = 2.0 * slope.sqrt();
            interval(0.0, r, RegionKind::OscillatoryBulk);
            interval(-r, 0.0, RegionKind::OscillatoryLeft);
        }
        Case::IIc => {
            let r = chebyshev_half_width(p.b)?;
            interval(-r, r, RegionKind::OscillatoryBulk);
        }
    }
    let (dist, kind) = pieces.into_iter().fold(
        (f64::INFINITY, RegionKind::Outer),
        |best, c| if c.0 < best.0 { c } else { best },
    );
    if dist < delta {
        Ok(Region {
            kind,
            margin: (delta - dist).min(tp_dist - delta),
        })
    } else {
        Ok(Region {
            kind: RegionKind::Outer,
            margin: (dist - delta).min(tp_dist - delta),
        })
    }
}

// ---------------------------------------------------------------------------
// assembly helpers

fn ln(z: Complex64) -> Complex64 {
    principal_log(z)
}

fn cx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{lg + i w} + e^{lg - i w} = 2 e^{lg} cos w`.
fn cosine_value(lg: Complex64, w: Complex64, region: Region, negate: bool) -> Result<AsymptoticValue> {
    let up = ScaledComplex::from_log(lg + I * w)?;
    let down = ScaledComplex::from_log(lg - I * w)?;
    let (up, down) = if negate { (up.neg(), down.neg()) } else { (up, down) };
    Ok(AsymptoticValue {
        value: up.add(&down)?,
        region,
        branch_parts: Some((up, down)),
        outer: None,
    })
}

/// `(e^{lg + i w} - e^{lg - i w}) / 2i = e^{lg} sin w`.
fn sine_value(lg: Complex64, w: Complex64, region: Region) -> Result<AsymptoticValue> {
    let up = ScaledComplex::from_log(lg + I * w)?.mul_complex(Complex64::new(0.0, -0.5))?;
    let down = ScaledComplex::from_log(lg - I * w)?.mul_complex(Complex64::new(0.0, 0.5))?;
    Ok(AsymptoticValue {
        value: up.add(&down)?,
        region,
        branch_parts: Some((up, down)),
        outer: None,
    })
}

fn from_log_or_zero(lg: Complex64) -> Result<ScaledComplex> {
    if lg.re == f64::NEG_INFINITY || (lg.re.is_finite() && lg.im.is_finite()) {
        ScaledComplex::from_log(lg)
    } else {
        // a branch that degenerates at this point contributes nothing
        Ok(ScaledComplex::ZERO)
    }
}

/// Evaluates an outer formula on both branches and keeps one of them.
fn outer_value(
    formula: impl Fn(Complex64) -> Complex64,
    phi: Complex64,
    region: Region,
    rule: Selection,
) -> Result<AsymptoticValue> {
    let lp = formula(phi);
    let lm = formula(-phi);
    let plus = from_log_or_zero(lp)?;
    let minus = from_log_or_zero(lm)?;
    if plus.is_zero() && minus.is_zero() {
        return Err(Error::Singular("both branches degenerate".into()));
    }
    let selected = match rule {
        _ if plus.is_zero() => BranchSign::Minus,
        Selection::Dominance if !minus.is_zero() && lm.re > lp.re => BranchSign::Minus,
        _ => BranchSign::Plus,
    };
    let value = match selected {
        BranchSign::Plus => plus,
        BranchSign::Minus => minus,
    };
    Ok(AsymptoticValue {
        value,
        region,
        branch_parts: None,
        outer: Some(OuterBranches { plus, minus, selected }),
    })
}

fn require_case(params: &RecurrenceParams, want: Case) -> Result<RecurrenceParams> {
    let (p, _) = params.normalized();
    if p.case() != want {
        return Err(Error::InvalidInput(format!(
            "{want} formula called with {} parameters",
            p.case()
        )));
    }
    Ok(p)
}

fn require_region(want: Case, region: Region, allowed: &[RegionKind]) -> Result<()> {
    if region.kind == RegionKind::TurningPointExcluded {
        return Err(Error::ExcludedRegion);
    }
    if !allowed.contains(&region.kind) {
        return Err(Error::WrongRegion {
            requested: want.label().into(),
            actual: region.kind.label().into(),
        });
    }
    Ok(())
}

fn reflect_sign(params: &RecurrenceParams, n: usize, v: AsymptoticValue) -> AsymptoticValue {
    if params.d < 0.0 && n % 2 == 1 {
        v.negate()
    } else {
        v
    }
}

fn stirling(nf: f64) -> f64 {
    nf * (nf.ln() - 1.0)
}

// ---------------------------------------------------------------------------
// d > 0, a > 0

fn ia_outer_log(d: f64, a: f64, nf: f64, z: Complex64, s: Complex64) -> Complex64 {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let e = -a / (d * d) - rn * shift / d;
    stirling(nf)
        + nf * ln((z + s) / (2.0 * rn))
        + e * ln((z + s) / (2.0 * shift))
        + 0.5 * ln(shift / s)
        + (2.0 * a - z * z - 4.0 * rn * d * z + (z + 4.0 * rn * d) * s) / (4.0 * d * d)
}

fn ia_bulk_log(d: f64, a: f64, nf: f64, z: Complex64) -> (Complex64, Complex64) {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let q = principal_sqrt(4.0 * a - z * z);
    let lg = stirling(nf)
        + (-a / (d * d) - rn * z / d) * ln(cx(a.sqrt() / rn))
        + (a / (d * d) + rn * shift / d) * ln(d + z / rn)
        + 0.5 * ln(shift / q)
        + (2.0 * a - z * z - 4.0 * rn * d * z) / (4.0 * d * d);
    let w = (nf - a / (d * d) - rn * shift / d) * arccos_branch(z / (2.0 * a.sqrt())) - FRAC_PI_4
        + (z + 4.0 * rn * d) * q / (4.0 * d * d);
    (lg, w)
}

fn ia_left_log(d: f64, a: f64, nf: f64, z: Complex64) -> (Complex64, Complex64) {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let r = 2.0 * a.sqrt();
    let t = principal_sqrt(-z - r) * principal_sqrt(-z + r);
    let lg = stirling(nf)
        + (-a / (d * d) - rn * z / d) * ln((-z + t) / (2.0 * rn))
        + (a / (d * d) + rn * shift / d) * ln(d + z / rn)
        + 0.5 * ln(shift / t)
        + (2.0 * a - z * z - 4.0 * rn * d * z - (z + 4.0 * rn * d) * t) / (4.0 * d * d);
    let w = PI * (-a / (d * d) - rn * z / d - 0.5);
    (lg, w)
}

/// Positive drift, positive slope.
pub fn asym_ia(params: &RecurrenceParams, n: usize, z: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::Ia)?;
    let nf = require_n(n)?;
    require_region(
        Case::Ia,
        region,
        &[
            RegionKind::Outer,
            RegionKind::OscillatoryBulk,
            RegionKind::OscillatoryLeft,
        ],
    )?;
    let (d, a) = (p.d, p.a);
    let v = match region.kind {
        RegionKind::Outer => {
            let s = sqrt_quad(a, z)?;
            outer_value(|phi| ia_outer_log(d, a, nf, z, phi), s, region, Selection::Principal)?
        }
        RegionKind::OscillatoryBulk => {
            let (lg, w) = ia_bulk_log(d, a, nf, z);
            cosine_value(lg, w, region, false)?
        }
        _ => {
            let (lg, w) = ia_left_log(d, a, nf, z);
            cosine_value(lg, w, region, false)?
        }
    };
    Ok(reflect_sign(params, n, v))
}

// ---------------------------------------------------------------------------
// d > 0, a < 0

fn ib_outer_log(d: f64, big: f64, nf: f64, z: Complex64, s: Complex64) -> Complex64 {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let e1 = big / (d * d) - rn * z / d;
    let e2 = -big / (d * d) + rn * shift / d;
    stirling(nf)
        + e1 * ln((z + s) / (2.0 * rn))
        + e2 * ln(d + z / rn)
        + 0.5 * ln(shift / s)
        + (-2.0 * big - z * z - 4.0 * rn * d * z + (z + 4.0 * rn * d) * s) / (4.0 * d * d)
}

fn ib_left_log(d: f64, big: f64, nf: f64, z: Complex64) -> (Complex64, Complex64) {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let r = Complex64::new(0.0, 2.0 * big.sqrt());
    let t = principal_sqrt(-z - r) * principal_sqrt(-z + r);
    let e1 = big / (d * d) - rn * z / d;
    let e2 = -big / (d * d) + rn * shift / d;
    let lg = stirling(nf)
        + e1 * ln((-z + t) / (2.0 * rn))
        + e2 * ln(d + z / rn)
        + 0.5 * ln(shift / t)
        + (-2.0 * big - z * z - 4.0 * rn * d * z - (z + 4.0 * rn * d) * t) / (4.0 * d * d);
    let w = PI * (big / (d * d) - rn * z / d - 0.5);
    (lg, w)
}

/// The two terms of the near-curve formula, in log form.
fn ib_curve_logs(d: f64, big: f64, nf: f64, z: Complex64, s: Complex64) -> (Complex64, Complex64) {
    let rn = nf.sqrt();
    let shift = rn * d + z;
    let e1 = big / (d * d) - rn * z / d;
    let e2 = -big / (d * d) + rn * shift / d;
    let common =
        nf * (rn.ln() - 1.0) + (e2 + 0.5) * ln(shift) + (-2.0 * big - z * z - 4.0 * rn * d * z) / (4.0 * d * d);
    let swing = (z + 4.0 * rn * d) * s / (4.0 * d * d);
    let first = common + e1 * ln((z + s) / 2.0) - 0.5 * ln(s) + swing;
    let second = common + e1 * ln((z - s) / 2.0) - 0.5 * ln(-s) - swing;
    (first, second)
}

/// Positive drift, negative slope.
pub fn asym_ib(params: &RecurrenceParams, n: usize, z: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::Ib)?;
    let nf = require_n(n)?;
    require_region(
        Case::Ib,
        region,
        &[
            RegionKind::Outer,
            RegionKind::OscillatoryLeft,
            RegionKind::CurveNeighborhood,
        ],
    )?;
    let (d, big) = (p.d, p.neg_a());
    let v = match region.kind {
        RegionKind::Outer => {
            let s = sqrt_quad(p.a, z)?;
            outer_value(|phi| ib_outer_log(d, big, nf, z, phi), s, region, Selection::Dominance)?
        }
        RegionKind::OscillatoryLeft => {
            let (lg, w) = ib_left_log(d, big, nf, z);
            cosine_value(lg, w, region, false)?
        }
        _ => {
            let s = sqrt_quad(p.a, z)?;
            let (l1, l2) = ib_curve_logs(d, big, nf, z, s);
            let first = ScaledComplex::from_log(l1)?;
            let second = ScaledComplex::from_log(l2)?;
            AsymptoticValue {
                value: first.add(&second)?,
                region,
                branch_parts: Some((first, second)),
                outer: None,
            }
        }
    };
    Ok(reflect_sign(params, n, v))
}

// ---------------------------------------------------------------------------
// d > 0, a = 0 (point is y with x = n y)

/// Positive drift, zero slope.
pub fn asym_ic(params: &RecurrenceParams, n: usize, y: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::Ic)?;
    let nf = require_n(n)?;
    require_region(Case::Ic, region, &[RegionKind::Outer, RegionKind::OscillatoryBulk])?;
    let d = p.d;
    let power = nf * y / d + 0.5;
    let v = if region.kind == RegionKind::Outer {
        let lg = stirling(nf) + power * ln(y / (y - d)) + nf * ln(y - d);
        AsymptoticValue {
            value: ScaledComplex::from_log(lg)?,
            region,
            branch_parts: None,
            outer: None,
        }
    } else {
        let lg = stirling(nf) + nf * ln(d - y) + power * ln(y / (d - y));
        let w = PI * (nf - nf * y / d - 0.5);
        cosine_value(lg, w, region, false)?
    };
    Ok(reflect_sign(params, n, v))
}

// ---------------------------------------------------------------------------
// d = 0, a != 0 (slope and shift passed as positive-slope values)

fn iia_outer_log(slope: f64, shift: f64, nf: f64, y: Complex64, s: Complex64) -> Complex64 {
    let mut lg = 0.5 * nf * (nf / (4.0 * std::f64::consts::E)).ln()
        + nf * ln(y + s)
        + 0.5 * ln((y + s) / (2.0 * s))
        + nf * y * (y - s) / (4.0 * slope);
    if shift != 0.0 {
        lg += shift / slope * ln((y + s) / (2.0 * y));
    }
    lg
}

fn iia_osc_log(slope: f64, shift: f64, nf: f64, y: Complex64, left: bool) -> (Complex64, Complex64) {
    let ra = slope.sqrt();
    let t = principal_sqrt(2.0 * ra - y) * principal_sqrt(2.0 * ra + y);
    let side = if left { -y } else { y };
    let mut lg = 0.5 * nf * (nf * slope / std::f64::consts::E).ln() + 0.5 * ln(ra / t) + nf * y * y / (4.0 * slope);
    if shift != 0.0 {
        lg += shift / slope * ln(ra / side);
    }
    let twist = nf * y / (4.0 * slope) * t;
    let w =
        (nf + 0.5 + shift / slope) * arccos_branch(side / (2.0 * ra)) - FRAC_PI_4 + if left { twist } else { -twist };
    (lg, w)
}

fn iia_value(slope: f64, shift: f64, n: usize, y: Complex64, region: Region) -> Result<AsymptoticValue> {
    let nf = n as f64;
    match region.kind {
        RegionKind::Outer => {
            let s = sqrt_quad(slope, y)?;
            outer_value(
                |phi| iia_outer_log(slope, shift, nf, y, phi),
                s,
                region,
                Selection::Principal,
            )
        }
        RegionKind::OscillatoryBulk => {
            let (lg, w) = iia_osc_log(slope, shift, nf, y, false);
            cosine_value(lg, w, region, false)
        }
        _ => {
            let (lg, w) = iia_osc_log(slope, shift, nf, y, true);
            cosine_value(lg, w, region, n % 2 == 1)
        }
    }
}

const NON_DRIFT_REGIONS: [RegionKind; 3] = [
    RegionKind::Outer,
    RegionKind::OscillatoryBulk,
    RegionKind::OscillatoryLeft,
];

/// Zero drift, positive slope (point is y with x = sqrt(n) y).
pub fn asym_iia(params: &RecurrenceParams, n: usize, y: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::IIa)?;
    require_n(n)?;
    require_region(Case::IIa, region, &NON_DRIFT_REGIONS)?;
    iia_value(p.a, p.b, n, y, region)
}

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Zero drift, negative slope (point is y with x = i sqrt(n) y), computed by
/// rotating the positive-slope result: `i^{-n} p_n(i z)` satisfies the
/// recurrence with `a, b` negated.
pub fn asym_iib(params: &RecurrenceParams, n: usize, y: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::IIb)?;
    require_n(n)?;
    require_region(Case::IIb, region, &NON_DRIFT_REGIONS)?;
    let rotated = RecurrenceParams::new(0.0, p.neg_a(), p.neg_b())?;
    asym_iia(&rotated, n, y, region)?.rotate(i_pow(n))
}

/// Same as [`asym_iib`], written out directly in terms of `-a` and `-b`.
pub fn asym_iib_direct(params: &RecurrenceParams, n: usize, y: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::IIb)?;
    let nf = require_n(n)?;
    require_region(Case::IIb, region, &NON_DRIFT_REGIONS)?;
    let (big_a, big_b) = (p.neg_a(), p.neg_b());
    let unit = i_pow(n);
    match region.kind {
        RegionKind::Outer => {
            let s = sqrt_quad(big_a, y)?;
            let formula = |phi: Complex64| {
                let mut lg = 0.5 * nf * (nf / (4.0 * std::f64::consts::E)).ln()
                    + nf * ln(y + phi)
                    + 0.5 * ln((y + phi) / (2.0 * phi))
                    + nf * y * (y - phi) / (4.0 * big_a);
                if big_b != 0.0 {
                    lg += big_b / big_a * ln((y + phi) / (2.0 * y));
                }
                lg
            };
            outer_value(formula, s, region, Selection::Principal)?.rotate(unit)
        }
        kind => {
            let left = kind == RegionKind::OscillatoryLeft;
            let ra = big_a.sqrt();
            let t = principal_sqrt(2.0 * ra - y) * principal_sqrt(2.0 * ra + y);
            let side = if left { -y } else { y };
            let mut lg =
                0.5 * nf * (nf * big_a / std::f64::consts::E).ln() + 0.5 * ln(ra / t) + nf * y * y / (4.0 * big_a);
            if big_b != 0.0 {
                lg += big_b / big_a * ln(ra / side);
            }
            let twist = nf * y / (4.0 * big_a) * t;
            let w = (nf + 0.5 + big_b / big_a) * arccos_branch(side / (2.0 * ra)) - FRAC_PI_4
                + if left { twist } else { -twist };
            cosine_value(lg, w, region, left && n % 2 == 1)?.rotate(unit)
        }
    }
}

// ---------------------------------------------------------------------------
// d = 0, a = 0: Chebyshev polynomials of the second kind, rescaled for b

/// Zero drift, zero slope; point is `x` itself. General `b > 0` is reduced
/// to `b = 1/4` via `p_n(x; b) = (2 sqrt b)^n p_n(x / (2 sqrt b); 1/4)`.
pub fn asym_iic(params: &RecurrenceParams, n: usize, x: Complex64, region: Region) -> Result<AsymptoticValue> {
    let p = require_case(params, Case::IIc)?;
    let nf = require_n(n)?;
    require_region(Case::IIc, region, &[RegionKind::Outer, RegionKind::OscillatoryBulk])?;
    let width = chebyshev_half_width(p.b)?;
    let u = x / width;
    if u == cx(1.0) || u == cx(-1.0) {
        return Err(Error::Singular(format!(
            "{x} is an endpoint of the oscillatory interval"
        )));
    }
    let scale = nf * width.ln();
    if region.kind == RegionKind::Outer {
        let s = sqrt_quad(0.25, u)?;
        let formula = |phi: Complex64| (nf + 1.0) * ln((u + phi) / 2.0) - ln(phi) + scale;
        outer_value(formula, s, region, Selection::Principal)
    } else {
        let lg = -nf * std::f64::consts::LN_2 - 0.5 * ln(1.0 - u * u) + scale;
        let w = (nf + 1.0) * arccos_branch(u);
        sine_value(lg, w, region)
    }
}

/// Dispatches on the parameter case.
pub fn asymptotic(params: &RecurrenceParams, n: usize, point: Complex64, region: Region) -> Result<AsymptoticValue> {
    match params.case() {
        Case::Ia => asym_ia(params, n, point, region),
        Case::Ib => asym_ib(params, n, point, region),
        Case::Ic => asym_ic(params, n, point, region),
        Case::IIa => asym_iia(params, n, point, region),
        Case::IIb => asym_iib(params, n, point, region),
        Case::IIc => asym_iic(params, n, point, region),
    }
}

/// Classifies the point and evaluates the matching formula.
pub fn evaluate(params: &RecurrenceParams, n: usize, point: Complex64, delta: f64) -> Result<AsymptoticValue> {
    let region = classify_region(params, n, point, delta)?;
    asymptotic(params, n, point, region)
}

/// Full real argument of the cosine (of the sine when `d = a = 0`) in the
/// oscillatory formula that applies at a real scaled point.
pub fn oscillatory_phase(params: &RecurrenceParams, n: usize, point: Complex64) -> Result<f64> {
    let nf = require_n(n)?;
    if point.im != 0.0 {
        return Err(Error::InvalidInput(format!("phase needs a real point, got {point}")));
    }
    let (p, _) = params.normalized();
    let t = point.re;
    let wrong = || Error::WrongRegion {
        requested: format!("{} oscillatory phase", p.case()),
        actual: RegionKind::Outer.label().into(),
    };
    let inside = |lo: f64, hi: f64| lo < t && t < hi;
    let w = match p.case() {
        Case::Ia => {
            let r = 2.0 * p.a.sqrt();
            if inside(-r, r) {
                ia_bulk_log(p.d, p.a, nf, point).1
            } else if inside(-nf.sqrt() * p.d, -r) {
                ia_left_log(p.d, p.a, nf, point).1
            } else {
                return Err(wrong());
            }
        }
        Case::Ib => {
            let za = default_curve(p.neg_a())?.junction;
            if !inside(-nf.sqrt() * p.d, za) {
                return Err(wrong());
            }
            ib_left_log(p.d, p.neg_a(), nf, point).1
        }
        Case::Ic => {
            if !inside(0.0, p.d) {
                return Err(wrong());
            }
            cx(PI * (nf - nf * t / p.d - 0.5))
        }
        Case::IIa | Case::IIb => {
            let (slope, shift) = if p.case() == Case::IIa {
                (p.a, p.b)
            } else {
                (p.neg_a(), p.neg_b())
            };
            let r = 2.0 * slope.sqrt();
            if inside(0.0, r) || (t == 0.0 && shift == 0.0) {
                iia_osc_log(slope, shift, nf, point, false).1
            } else if inside(-r, 0.0) {
                iia_osc_log(slope, shift, nf, point, true).1
            } else {
                return Err(wrong());
            }
        }
        Case::IIc => {
            let r = chebyshev_half_width(p.b)?;
            if !inside(-r, r) {
                return Err(wrong());
            }
            (nf + 1.0) * arccos_branch(point / r)
        }
    };
    Ok(w.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{eval_pi, eval_pi_mode, EvalMode};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(d: f64, a: f64, b: f64) -> RecurrenceParams {
        RecurrenceParams::new(d, a, b).unwrap()
    }

    fn error_vs(p: &RecurrenceParams, n: usize, point: Complex64, delta: f64, mode: EvalMode) -> f64 {
        let asym = evaluate(p, n, point, delta).unwrap();
        let exact = eval_pi_mode(p, scaled_to_argument(p, n, point), n, mode).unwrap();
        asym.value.rel_error(&exact.value).unwrap()
    }

    fn kind(p: &RecurrenceParams, n: usize, point: Complex64, delta: f64) -> RegionKind {
        classify_region(p, n, point, delta).unwrap().kind
    }

    #[test]
    fn classification_examples() {
        let p = params(1.0, 1.0, 0.0);
        assert_eq!(kind(&p, 400, c(3.0, 0.0), 0.1), RegionKind::Outer);
        assert_eq!(kind(&p, 400, c(0.0, 0.0), 0.1), RegionKind::OscillatoryBulk);
        assert_eq!(kind(&p, 400, c(2.0, 0.0), 0.1), RegionKind::TurningPointExcluded);
        assert_eq!(kind(&p, 400, c(-5.0, 0.05), 0.1), RegionKind::OscillatoryLeft);
        assert_eq!(kind(&p, 400, c(-20.05, 0.0), 0.1), RegionKind::TurningPointExcluded);
        assert_eq!(kind(&p, 400, c(-21.0, 0.0), 0.1), RegionKind::Outer);

        let ib = params(1.0, -1.0, 0.0);
        assert_eq!(kind(&ib, 400, c(-5.13, 0.0), 0.1), RegionKind::OscillatoryLeft);
        assert_eq!(kind(&ib, 400, c(-1.616364, 1.0), 0.1), RegionKind::CurveNeighborhood);
        assert_eq!(kind(&ib, 400, c(-3.0, 0.0), 0.1), RegionKind::TurningPointExcluded);
        assert_eq!(kind(&ib, 400, c(0.0, 1.95), 0.1), RegionKind::TurningPointExcluded);
        assert_eq!(kind(&ib, 400, c(-1.0, 0.5), 0.1), RegionKind::Outer);

        let iic = params(0.0, 0.0, 1.0);
        assert_eq!(kind(&iic, 10, c(1.5, 0.0), 0.1), RegionKind::OscillatoryBulk);
        assert_eq!(kind(&iic, 10, c(2.5, 0.0), 0.1), RegionKind::Outer);
        assert!(classify_region(&params(0.0, 0.0, -1.0), 10, c(0.0, 0.0), 0.1).is_err());
        assert!(classify_region(&p, 10, c(0.0, 0.0), 0.0).is_err());

        let shifted = params(0.0, 0.5, 0.3);
        assert_eq!(kind(&shifted, 10, c(0.05, 0.0), 0.1), RegionKind::TurningPointExcluded);
    }

    #[test]
    fn coordinates_round_trip() {
        for p in [
            params(1.0, 1.0, 0.0),
            params(-2.0, 1.0, 0.0),
            params(1.0, 0.0, 0.3),
            params(0.0, 0.5, 0.0),
            params(0.0, -1.0, 0.0),
            params(0.0, 0.0, 0.25),
        ] {
            let z = c(0.3, -1.1);
            let x = scaled_to_argument(&p, 100, z);
            assert!((argument_to_scaled(&p, 100, x) - z).norm() < 1e-12);
        }
        assert_eq!(
            scaled_to_argument(&params(1.0, 1.0, 0.0), 400, c(3.0, 0.0)),
            c(460.0, 0.0)
        );
        assert_eq!(
            scaled_to_argument(&params(0.0, -1.0, 0.0), 400, c(3.0, 0.0)),
            c(0.0, 60.0)
        );
    }

    #[test]
    fn region_errors() {
        let p = params(1.0, 1.0, 0.0);
        let r = Region::new(RegionKind::CurveNeighborhood);
        assert!(matches!(
            asym_ia(&p, 100, c(0.0, 1.0), r),
            Err(Error::WrongRegion { .. })
        ));
        let r = Region::new(RegionKind::TurningPointExcluded);
        assert!(matches!(asym_ia(&p, 100, c(2.0, 0.0), r), Err(Error::ExcludedRegion)));
        assert!(asym_ib(&p, 100, c(3.0, 0.0), Region::new(RegionKind::Outer)).is_err());
        assert!(matches!(
            oscillatory_phase(&p, 100, c(3.0, 0.0)),
            Err(Error::WrongRegion { .. })
        ));
    }

    #[test]
    fn positive_slope_examples() {
        let p = params(1.0, 1.0, 0.0);
        let e100 = error_vs(&p, 100, c(3.0, 0.0), 0.1, EvalMode::Native);
        let e400 = error_vs(&p, 400, c(3.0, 0.0), 0.1, EvalMode::Native);
        assert!(e400 < 0.05 && e400 < e100, "{e100} {e400}");
        assert!(error_vs(&p, 400, c(0.0, 0.0), 0.1, EvalMode::Native) < 0.1);
        let v = evaluate(&p, 400, c(3.0, 0.0), 0.1).unwrap().value.to_complex();
        assert!(v.im.abs() <= 1e-12 * v.norm());
    }

    #[test]
    fn oscillatory_values_are_real() {
        let cases = [
            (params(1.0, 1.0, 0.0), c(-1.3, 0.0)),
            (params(1.0, 1.0, 0.0), c(-5.13, 0.0)),
            (params(1.0, -1.0, 0.0), c(-5.13, 0.0)),
            (params(1.0, 0.0, 0.3), c(0.5713, 0.0)),
            (params(0.0, 0.5, 0.2), c(1.0, 0.0)),
            (params(0.0, 0.5, 0.2), c(-1.0, 0.0)),
            (params(0.0, 0.0, 0.25), c(0.3, 0.0)),
        ];
        for (p, z) in cases {
            let v = evaluate(&p, 400, z, 0.1).unwrap();
            assert!(v.branch_parts.is_some());
            let m = v.value.to_complex();
            assert!(m.im.abs() <= 1e-10 * m.norm(), "{p:?} {z}");
        }
    }

    #[test]
    fn negative_slope_outer_and_curve() {
        let p = params(1.0, -1.0, 0.0);
        assert!(error_vs(&p, 400, c(3.0, 0.0), 0.1, EvalMode::Native) < 0.05);
        // on the curve itself both terms have comparable size
        for n in [100usize, 400, 1600] {
            let v = asym_ib(
                &p,
                n,
                c(-1.616364004846772, 1.0),
                Region::new(RegionKind::CurveNeighborhood),
            )
            .unwrap();
            let (u, w) = v.branch_parts.unwrap();
            assert!((u.log_abs() - w.log_abs()).abs() < 10.0);
        }
    }

    #[test]
    fn junction_gap_grows_with_degree() {
        let p = params(1.0, -1.0, 0.0);
        let za = crate::curve::solve_za(1.0, 1e-12).unwrap();
        let z = c(za + 0.15, 0.0);
        // signed log|plus| - log|minus|; the sign flips once the degree is large
        let gaps: Vec<f64> = [100usize, 400, 1600]
            .iter()
            .map(|&n| {
                let o = asym_ib(&p, n, z, Region::new(RegionKind::Outer))
                    .unwrap()
                    .outer
                    .unwrap();
                o.plus.log_abs() - o.minus.log_abs()
            })
            .collect();
        assert!(gaps[1] > gaps[0] && gaps[2] > gaps[1] && gaps[2] > 0.0, "{gaps:?}");
        // affine in sqrt(n): increments double with each quadrupling of n
        let ratio = (gaps[2] - gaps[1]) / (gaps[1] - gaps[0]);
        assert!((ratio - 2.0).abs() < 0.1, "{gaps:?}");
    }

    #[test]
    fn zero_slope_examples() {
        let p = params(1.0, 0.0, 0.0);
        assert!(error_vs(&p, 200, c(2.0, 0.0), 0.1, EvalMode::Native) < 0.05);
        let q = params(1.0, 0.0, 0.3);
        let e100 = error_vs(&q, 100, c(2.0, 0.0), 0.1, EvalMode::Native);
        let e400 = error_vs(&q, 400, c(2.0, 0.0), 0.1, EvalMode::Native);
        assert!(e400 < e100);
        let v = evaluate(&q, 100, c(2.0, 0.0), 0.1).unwrap().value.to_complex();
        assert!(v.im.abs() <= 1e-12 * v.norm());
    }

    #[test]
    fn hermite_scaling_examples() {
        let p = params(0.0, 0.5, 0.0);
        assert!(error_vs(&p, 400, c(3.0, 0.0), 0.1, EvalMode::Native) < 0.05);
        assert!(error_vs(&p, 400, c(1.0, 0.0), 0.1, EvalMode::Native) < 0.1);
        let right = evaluate(&p, 400, c(1.0, 0.0), 0.1).unwrap().value;
        let left = evaluate(&p, 400, c(-1.0, 0.0), 0.1).unwrap().value;
        assert!(left.rel_error(&right).unwrap() < 1e-10);
        // sign pattern on a grid inside the bulk
        let mut agree = 0;
        for k in 0..20 {
            let y = 0.2 + 1.0 * k as f64 / 19.0;
            let a = evaluate(&p, 400, c(y, 0.0), 0.1).unwrap().value.to_complex().re;
            let e = eval_pi(&p, c(20.0 * y, 0.0), 400).unwrap().value.to_complex().re;
            agree += (a.signum() == e.signum()) as usize;
        }
        assert!(agree >= 19, "{agree}");
    }

    #[test]
    fn bulk_signs_follow_the_recurrence() {
        for (p, lo, hi) in [(params(1.0, 1.0, 0.0), -1.8, 1.8), (params(0.0, 0.5, 0.0), -1.3, 1.3)] {
            let mut agree = 0;
            for k in 0..50 {
                // stay off the origin, which is a turning point when d = 0
                let t = lo + (hi - lo) * (k as f64 + 0.5) / 50.0;
                let z = c(t, 0.0);
                let a = evaluate(&p, 400, z, 0.1).unwrap().value.to_complex().re;
                let x = scaled_to_argument(&p, 400, z);
                let e = eval_pi(&p, x, 400).unwrap().value.to_complex().re;
                agree += (a.signum() == e.signum()) as usize;
            }
            assert!(agree >= 48, "{p:?}: {agree}");
        }
    }

    #[test]
    fn rotation_paths_agree() {
        let p = params(0.0, -1.0, 0.4);
        for y in [c(3.0, 0.0), c(2.5, 1.0), c(-3.0, -0.5), c(0.3, 2.0)] {
            let r = Region::new(RegionKind::Outer);
            let u = asym_iib(&p, 77, y, r).unwrap().value;
            let v = asym_iib_direct(&p, 77, y, r).unwrap().value;
            assert!(u.rel_error(&v).unwrap() < 1e-12);
        }
        let q = params(0.0, -1.0, 0.0);
        assert!(error_vs(&q, 400, c(3.0, 0.0), 0.1, EvalMode::Native) < 0.05);
        // sign changes of the rotated polynomial follow the cosine factor
        let mut agree = 0;
        for k in 0..20 {
            let y = 0.2 + 1.5 * k as f64 / 19.0;
            // i^{-400} = 1
            let a = evaluate(&q, 400, c(y, 0.0), 0.1).unwrap().value;
            let e = eval_pi(&q, c(0.0, 20.0 * y), 400).unwrap().value;
            let (a, e) = (a.to_complex().re, e.to_complex().re);
            agree += (a.signum() == e.signum()) as usize;
        }
        assert!(agree >= 19, "{agree}");
    }

    #[test]
    fn chebyshev_examples() {
        let p = params(0.0, 0.0, 0.25);
        let bulk = Region::new(RegionKind::OscillatoryBulk);
        let v = asym_iic(&p, 2, c(0.0, 0.0), bulk).unwrap().value.to_complex();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
        let v = asym_iic(&p, 1, c(0.0, 0.0), bulk).unwrap().value.to_complex();
        assert!(v.norm() < 1e-15);
        let outer = Region::new(RegionKind::Outer);
        let mut last = f64::INFINITY;
        for n in [1usize, 2, 4, 8, 16] {
            let a = asym_iic(&p, n, c(2.0, 0.0), outer).unwrap().value;
            let e = eval_pi(&p, c(2.0, 0.0), n).unwrap().value;
            let err = a.rel_error(&e).unwrap();
            if n == 1 {
                assert!(err < 0.01);
            }
            assert!(err < last);
            last = err;
        }
        assert!(matches!(asym_iic(&p, 3, c(1.0, 0.0), bulk), Err(Error::Singular(_))));
        // general b by rescaling is exact too
        let q = params(0.0, 0.0, 2.0);
        for x in [-2.5, 0.1, 1.9] {
            let a = asym_iic(&q, 40, c(x, 0.0), bulk).unwrap().value;
            let e = eval_pi(&q, c(x, 0.0), 40).unwrap().value;
            assert!(a.rel_error(&e).unwrap() < 1e-10);
        }
    }

    #[test]
    fn reflection_of_formulas() {
        let p = params(1.0, 1.0, 0.0);
        let q = p.reflected();
        for z in [c(3.0, 0.5), c(-1.3, 0.0)] {
            let u = evaluate(&p, 101, z, 0.1).unwrap().value;
            let v = evaluate(&q, 101, z, 0.1).unwrap().value;
            assert!(u.rel_error(&v.neg()).unwrap() < 1e-15);
        }
        // and the reflected frame agrees with the recurrence
        let err = error_vs(&q, 400, c(3.0, 0.0), 0.1, EvalMode::Native);
        assert!(err < 0.05);
    }

    #[test]
    fn phase_examples() {
        let p = params(1.0, 1.0, 0.0);
        let (z0, z1) = (-5.0, -5.5);
        let slope = (oscillatory_phase(&p, 400, c(z1, 0.0)).unwrap() - oscillatory_phase(&p, 400, c(z0, 0.0)).unwrap())
            / (z1 - z0);
        assert!((slope + PI * 20.0).abs() < 1e-9);
        let cheb = params(0.0, 0.0, 0.25);
        let x = (3.0 * PI / 21.0).cos();
        let w = oscillatory_phase(&cheb, 20, c(x, 0.0)).unwrap();
        assert!((w - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn outer_branches_separate_with_degree() {
        // points away from the cut where the selected branch dominates
        let cases = [
            (params(1.0, 1.0, 0.0), c(0.5, 1.0)),
            (params(1.0, 1.0, 0.0), c(-3.0, 1.0)),
            (params(1.0, -1.0, 0.0), c(2.0, 0.0)),
            (params(1.0, -1.0, 0.0), c(-5.0, 1.0)),
            (params(0.0, 0.5, 0.0), c(0.0, 1.5)),
            (params(0.0, -1.0, 0.0), c(0.0, 1.5)),
        ];
        for (p, z) in cases {
            let gaps: Vec<f64> = [100usize, 400, 1600]
                .iter()
                .map(|&n| evaluate(&p, n, z, 0.1).unwrap().outer.unwrap().log_gap())
                .collect();
            assert!(
                gaps[2] < gaps[1] && gaps[1] < gaps[0] && gaps[0] < 0.0,
                "{p:?} {z} {gaps:?}"
            );
        }
    }

    #[test]
    fn second_sheet_grows_beyond_the_turning_point() {
        let p = params(1.0, 1.0, 0.0);
        let gaps: Vec<f64> = [100usize, 400, 1600]
            .iter()
            .map(|&n| evaluate(&p, n, c(3.0, 0.0), 0.1).unwrap().outer.unwrap().log_gap())
            .collect();
        assert!(gaps[0] > 0.0 && gaps[1] > gaps[0] && gaps[2] > gaps[1], "{gaps:?}");
    }
}
