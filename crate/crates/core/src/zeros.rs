//! All zeros of `p_n` by simultaneous Aberth-Ehrlich iteration on the
//! recurrence itself, with per-zero residual certificates.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{argument_to_scaled, scaled_to_argument};
use crate::csv_float;
use crate::curve::{distance_to_yset, CurvePolyline};
use crate::error::{Error, Result};
use crate::recurrence::{eval_pi_deriv_mode, Case, EvalMode, RecurrenceParams};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAXITER: usize = 400;
pub const DEFAULT_SEED: u64 = 0x5eed;
/// Residuals below this certify a zero.
pub const CERTIFY_THRESHOLD: f64 = 1e-6;
/// Zeros this close to an endpoint of the limiting set are not compared.
pub const ENDPOINT_EXCLUSION: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroOptions {
    pub tol: f64,
    pub maxiter: usize,
    pub mode: EvalMode,
    pub seed: u64,
}

impl ZeroOptions {
    /// Defaults for the given problem, including the evaluation mode.
    pub fn for_problem(params: &RecurrenceParams, n: usize) -> Self {
        ZeroOptions {
            tol: DEFAULT_TOL,
            maxiter: DEFAULT_MAXITER,
            mode: default_mode(params, n),
            seed: DEFAULT_SEED,
        }
    }
}

/// Native arithmetic everywhere except the negative-`a` drifting case, where
/// the recurrence cancels heavily on the real segment and needs extra bits.
pub fn default_mode(params: &RecurrenceParams, n: usize) -> EvalMode {
    match params.normalized().0.case() {
        Case::Ib => EvalMode::HighPrec {
            bits: 128 + n as u32 / 2,
        },
        _ => EvalMode::Native,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub params: RecurrenceParams,
    pub n: usize,
    /// Sorted by real part, then imaginary part.
    pub zeros: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub scaled: Vec<Complex64>,
    pub iterations: usize,
}

impl ZeroSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "scaled_re", "scaled_im", "residual"])?;
        for ((z, s), r) in self.zeros.iter().zip(&self.scaled).zip(&self.residuals) {
            w.write_record([
                csv_float(z.re),
                csv_float(z.im),
                csv_float(s.re),
                csv_float(s.im),
                csv_float(*r),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Zeros with the default options for `params` and `n`.
pub fn find_zeros(params: &RecurrenceParams, n: usize, tol: f64, maxiter: usize) -> Result<ZeroSet> {
    let opts = ZeroOptions {
        tol,
        maxiter,
        ..ZeroOptions::for_problem(params, n)
    };
    find_zeros_with(params, n, &opts)
}

pub fn find_zeros_with(params: &RecurrenceParams, n: usize, opts: &ZeroOptions) -> Result<ZeroSet> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    if !(opts.tol > 0.0) || opts.maxiter == 0 {
        return Err(Error::InvalidInput(format!(
            "tol = {}, maxiter = {}",
            opts.tol, opts.maxiter
        )));
    }
    // solve in the positive-slope frame and reflect back
    let (q, reflected) = params.normalized();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last_err = None;
    let mut found = None;
    let mut starts: Vec<Vec<Complex64>> = [case_seeds(&q, n, &mut rng), circle_seeds(&q, n, &mut rng)]
        .into_iter()
        .flatten()
        .collect();
    if opts.mode != EvalMode::Native {
        // a cheap native pass gets close; the requested mode only polishes
        let native = ZeroOptions {
            mode: EvalMode::Native,
            ..*opts
        };
        let warm = match aberth(&q, n, starts[0].clone(), &native) {
            Ok((z, _)) => Some(z),
            Err(Error::NotConverged { partial, .. }) => Some(partial),
            Err(_) => None,
        };
        if let Some(z) = warm.filter(|z| z.iter().all(|w| w.is_finite())) {
            starts.insert(0, z);
        }
    }
    for seeds in starts {
        match aberth(&q, n, seeds, opts) {
            Ok(r) => {
                found = Some(r);
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (mut zeros, iterations) = match found {
        Some(r) => r,
        None => return Err(last_err.expect("at least one attempt")),
    };
    if reflected {
        zeros.iter_mut().for_each(|z| *z = -*z);
    }
    zeros.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    let residuals = zero_residuals_mode(params, &zeros, opts.mode)?;
    let scaled = zeros.iter().map(|&x| argument_to_scaled(params, n, x)).collect();
    Ok(ZeroSet {
        params: *params,
        n,
        zeros,
        residuals,
        scaled,
        iterations,
    })
}

fn newton_ratio(p: &RecurrenceParams, x: Complex64, n: usize, mode: EvalMode) -> Result<Complex64> {
    let pv = eval_pi_deriv_mode(p, x, n, mode)?;
    let dv = pv.derivative.expect("derivative requested");
    if pv.value.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if dv.is_zero() {
        return Err(Error::Singular(format!("p_n' vanishes at {x}")));
    }
    Ok(pv.value.div(&dv)?.to_complex())
}

fn aberth(
    p: &RecurrenceParams,
    n: usize,
    mut z: Vec<Complex64>,
    opts: &ZeroOptions,
) -> Result<(Vec<Complex64>, usize)> {
    let mut done = vec![false; n];
    for iter in 1..=opts.maxiter {
        let current = &z;
        let updates: Vec<(Complex64, bool)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let zi = current[i];
                if done[i] {
                    return (zi, true);
                }
                let ratio = match newton_ratio(p, zi, n, opts.mode) {
                    Ok(r) if r.is_finite() => r,
                    // nudge off a critical point deterministically
                    _ => return (zi + Complex64::new(0.0, 1e-3) * (1.0 + zi.norm()), false),
                };
                let conv = ratio.norm() < opts.tol * (1.0 + zi.norm());
                let repulsion: Complex64 = current
                    .iter()
                    .enumerate()
                    .filter(|&(j, zj)| j != i && *zj != zi)
                    .map(|(_, &zj)| (zi - zj).inv())
                    .sum();
                let step = ratio / (1.0 - ratio * repulsion);
                let step = if step.is_finite() { step } else { ratio };
                (zi - step, conv)
            })
            .collect();
        for (i, (zi, conv)) in updates.into_iter().enumerate() {
            if !done[i] {
                z[i] = zi;
                done[i] = conv;
            }
        }
        if done.iter().all(|&c| c) {
            return Ok((z, iter));
        }
    }
    Err(Error::NotConverged {
        n,
        unconverged: (0..n).filter(|&i| !done[i]).collect(),
        partial: z,
    })
}

/// Small random offset of relative size `scale`.
fn jitter(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
}

/// Chebyshev nodes on `[lo, hi]` along direction `dir`, slightly perturbed.
fn interval_seeds(lo: f64, hi: f64, dir: Complex64, n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo).max(1e-3));
    let gap = half / n as f64;
    (0..n)
        .map(|k| {
            let t = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            dir * (mid + half * t.cos()) + jitter(rng, 0.1 * gap)
        })
        .collect()
}

/// Seeds placed where the zeros are expected for this parameter case, or
/// `None` when there is no useful guess.
fn case_seeds(p: &RecurrenceParams, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    if n == 1 {
        return Some(vec![Complex64::new(0.5, 0.0)]);
    }
    let couplings: Vec<f64> = (1..n).map(|k| p.coefficients(k).1).collect();
    let real = Complex64::new(1.0, 0.0);
    if couplings.iter().all(|&b| b > 0.0) {
        // symmetric Jacobi matrix: real zeros inside a Gershgorin-type interval
        let spread = 2.0 * couplings.iter().copied().fold(0.0, f64::max).sqrt();
        let top = p.d * (n - 1) as f64;
        return Some(interval_seeds(-spread, top + spread, real, n, rng));
    }
    if p.d == 0.0 && couplings.iter().all(|&b| b < 0.0) {
        // rotation to the previous case: purely imaginary zeros
        let spread = 2.0 * couplings.iter().copied().fold(0.0f64, |m, b| m.max(-b)).sqrt();
        return Some(interval_seeds(-spread, spread, Complex64::new(0.0, 1.0), n, rng));
    }
    if p.case() == Case::Ib {
        return yset_seeds(p, n, rng);
    }
    None
}

/// Seeds spread by arclength over the scaled segment and curve, in
/// conjugate pairs on the curve.
fn yset_seeds(p: &RecurrenceParams, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let curve = crate::curve::default_curve(p.neg_a()).ok()?;
    let half = &curve.points[..curve.half_len()];
    let mut arc = vec![0.0];
    for w in half.windows(2) {
        arc.push(arc.last().unwrap() + (w[1] - w[0]).norm());
    }
    let curve_len = *arc.last().unwrap();
    let left = -(n as f64).sqrt() * p.d;
    let seg_len = (curve.junction - left).max(0.0);
    let pairs = ((n as f64 * curve_len / (seg_len + 2.0 * curve_len)).round() as usize).min(n / 2);
    let on_segment = n - 2 * pairs;
    let spacing = (seg_len + 2.0 * curve_len) / n as f64;
    let mut scaled = Vec::with_capacity(n);
    for k in 0..on_segment {
        let t = (k as f64 + 0.5) / on_segment as f64;
        scaled.push(Complex64::new(left + t * seg_len, 0.0));
    }
    for k in 0..pairs {
        let s = curve_len * (k as f64 + 0.5) / pairs as f64;
        let j = arc.partition_point(|&a| a < s).clamp(1, arc.len() - 1);
        let f = (s - arc[j - 1]) / (arc[j] - arc[j - 1]).max(f64::MIN_POSITIVE);
        let z = half[j - 1] + (half[j] - half[j - 1]) * f;
        scaled.push(z);
        scaled.push(z.conj());
    }
    Some(
        scaled
            .into_iter()
            .map(|z| scaled_to_argument(p, n, z + jitter(rng, 0.05 * spacing)))
            .collect(),
    )
}

fn circle_seeds(p: &RecurrenceParams, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let nf = n as f64;
    let radius = (2.0 * (p.a.abs() * nf).sqrt() + p.d.abs() * nf).max(1.0) * 1.1;
    // the zeros sum to the trace of the Jacobi matrix
    let center = p.d * (nf - 1.0) / 2.0;
    let phase: f64 = rng.random_range(0.0..1.0);
    Some(
        (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + phase) / nf;
                Complex64::new(center, 0.0) + Complex64::from_polar(radius, t)
            })
            .collect(),
    )
}

/// `|p_n(z)| / (|p_n'(z)| * gap)` at each zero, with `gap` the distance to
/// the nearest other zero (1 when there is none). `n` is `zeros.len()`.
pub fn zero_residuals(params: &RecurrenceParams, zeros: &[Complex64]) -> Result<Vec<f64>> {
    zero_residuals_mode(params, zeros, default_mode(params, zeros.len()))
}

pub fn zero_residuals_mode(params: &RecurrenceParams, zeros: &[Complex64], mode: EvalMode) -> Result<Vec<f64>> {
    let n = zeros.len();
    zeros
        .par_iter()
        .enumerate()
        .map(|(i, &z)| {
            let gap = zeros
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            let gap = if gap.is_finite() { gap } else { 1.0 };
            let pv = eval_pi_deriv_mode(params, z, n, mode)?;
            let dv = pv.derivative.expect("derivative requested");
            if pv.value.is_zero() {
                return Ok(0.0);
            }
            if dv.is_zero() || gap == 0.0 {
                return Ok(f64::INFINITY);
            }
            let ratio = pv.value.div(&dv)?;
            Ok((ratio.log_abs() - gap.ln()).exp())
        })
        .collect()
}

/// Largest distance from a scaled zero to the segment-plus-curve set,
/// skipping zeros near the three endpoints.
pub fn max_yset_distance(set: &ZeroSet, curve: &CurvePolyline) -> Result<f64> {
    let (q, _) = set.params.normalized();
    if q.case() != Case::Ib {
        return Err(Error::InvalidInput(format!(
            "case {} has no curved zero set",
            q.case().label()
        )));
    }
    let big = q.neg_a();
    if curve.neg_a != big {
        return Err(Error::InvalidInput(format!(
            "curve traced for A = {}, parameters give A = {big}",
            curve.neg_a
        )));
    }
    let tip = 2.0 * big.sqrt();
    let ends = [
        Complex64::new(-(set.n as f64).sqrt() * q.d, 0.0),
        Complex64::new(0.0, tip),
        Complex64::new(0.0, -tip),
    ];
    Ok(set
        .scaled
        .iter()
        .filter(|z| ends.iter().all(|e| (*z - e).norm() > ENDPOINT_EXCLUSION))
        .map(|&z| distance_to_yset(big, q.d, set.n, z, curve))
        .fold(0.0, f64::max))
}

pub fn zeros_vs_yset(params: &RecurrenceParams, n: usize, curve: &CurvePolyline) -> Result<f64> {
    if params.normalized().0.case() != Case::Ib {
        return Err(Error::InvalidInput("zeros_vs_yset needs d != 0 and a < 0".into()));
    }
    let set = find_zeros(params, n, DEFAULT_TOL, DEFAULT_MAXITER)?;
    max_yset_distance(&set, curve)
}
