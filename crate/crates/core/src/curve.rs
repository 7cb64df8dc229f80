//! The junction point on the negative real axis and the curve through it on
//! which the zeros of the negative-slope drifting recurrence accumulate.
//!
//! Both are level sets of `Re F(z)` with
//! `F(z) = 2 s - z Log((z + s) / (z - s))`, `s = sqrt(z - 2ic) sqrt(z + 2ic)`,
//! `c = sqrt(A)`. Since `F'(z) = -Log((z + s) / (z - s))`, the gradient of
//! `Re F` is available in closed form.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::{principal_log, principal_sqrt};
use crate::csv_float;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_POINTS: usize = 512;

fn check_strength(neg_a: f64) -> Result<()> {
    if neg_a.is_finite() && neg_a > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "curve parameter must be positive, got {neg_a}"
        )))
    }
}

/// `(Re F, conj F')`; the second entry is the gradient of `Re F` as a
/// vector in the plane.
fn residual_and_gradient(neg_a: f64, z: Complex64) -> (f64, Complex64) {
    let r = Complex64::new(0.0, 2.0 * neg_a.sqrt());
    let s = principal_sqrt(z - r) * principal_sqrt(z + r);
    let log_ratio = principal_log((z + s) / (z - s));
    let f = 2.0 * s - z * log_ratio;
    (f.re, (-log_ratio).conj())
}

/// Value of the level-set function; zero on the curve and at the junction.
pub fn gamma_residual(neg_a: f64, z: Complex64) -> Result<f64> {
    check_strength(neg_a)?;
    let top = 2.0 * neg_a.sqrt();
    if z.re == 0.0 && z.im.abs() == top {
        return Err(Error::Endpoint(format!("{z}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite point {z}")));
    }
    Ok(residual_and_gradient(neg_a, z).0)
}

/// Negative real root of the residual, by bracket doubling and bisection.
pub fn solve_za(neg_a: f64, tol: f64) -> Result<f64> {
    check_strength(neg_a)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let g = |x: f64| residual_and_gradient(neg_a, Complex64::new(x, 0.0)).0;
    let (mut hi, mut lo) = (-neg_a.sqrt(), -4.0 * neg_a.sqrt());
    let (g_hi, mut g_lo) = (g(hi), g(lo));
    let mut doublings = 0;
    while g_hi.signum() == g_lo.signum() {
        doublings += 1;
        if doublings > 60 {
            return Err(Error::SolverFailure("no sign change for the junction".into()));
        }
        hi = lo;
        lo *= 2.0;
        g_lo = g(lo);
    }
    // bisect to adjacent floats
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let root = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let r = g(root).abs();
    if r >= tol {
        return Err(Error::SolverFailure(format!("junction residual {r:e} above {tol:e}")));
    }
    Ok(root)
}

/// Newton iteration along the gradient of the residual.
fn correct(neg_a: f64, mut z: Complex64, tol: f64) -> Option<(Complex64, f64)> {
    let mut best = (z, f64::INFINITY);
    for _ in 0..60 {
        let (r, g) = residual_and_gradient(neg_a, z);
        if !r.is_finite() {
            return None;
        }
        if r.abs() < best.1 {
            best = (z, r.abs());
        }
        if r.abs() <= 1e-3 * tol {
            break;
        }
        let gn = g.norm_sqr();
        if gn == 0.0 {
            return None;
        }
        let step = g * (r / gn);
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            let r = residual_and_gradient(neg_a, z).0.abs();
            if r < best.1 {
                best = (z, r);
            }
            break;
        }
    }
    (best.1 < tol).then_some(best)
}

/// Direction in which the curve leaves the upper endpoint, found by probing
/// a small semicircle on the left of it.
fn start_direction(neg_a: f64) -> Result<f64> {
    let top = Complex64::new(0.0, 2.0 * neg_a.sqrt());
    let radius = 1e-3 * neg_a.sqrt();
    let at = |t: f64| residual_and_gradient(neg_a, top + Complex64::from_polar(radius, t)).0;
    let samples = 720;
    let (lo, hi) = (std::f64::consts::FRAC_PI_2, 1.5 * std::f64::consts::PI);
    let mut best: Option<(f64, f64)> = None;
    let mut prev_t = lo + (hi - lo) / samples as f64;
    let mut prev = at(prev_t);
    for k in 2..samples {
        let t = lo + (hi - lo) * k as f64 / samples as f64;
        let v = at(t);
        if v.signum() != prev.signum() {
            let (mut a, mut b, mut fa) = (prev_t, t, prev);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = at(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let m = 0.5 * (a + b);
            let r = at(m).abs();
            // a jump across a cut also changes sign but leaves a large residual
            if best.is_none_or(|(_, br)| r < br) {
                best = Some((m, r));
            }
        }
        prev_t = t;
        prev = v;
    }
    match best {
        Some((t, r)) if r < 1e-3 * radius => Ok(t),
        _ => Err(Error::TraceFailure {
            accepted: 0,
            reason: "no zero direction on the start probe".into(),
        }),
    }
}

/// Ordered samples of the curve, from `2i sqrt(A)` through the junction to
/// `-2i sqrt(A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePolyline {
    #[serde(rename = "A")]
    pub neg_a: f64,
    pub tol: f64,
    pub junction: f64,
    pub points: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

impl CurvePolyline {
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (self.points[0], *self.points.last().expect("nonempty"))
    }

    /// Number of samples on each half, including the shared junction.
    pub fn half_len(&self) -> usize {
        self.points.len().div_ceil(2)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.points
            .windows(2)
            .map(|w| segment_distance(z, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# A = {}", self.neg_a)?;
        writeln!(out, "# z_A = {}", self.junction)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "residual"])?;
        for (p, r) in self.points.iter().zip(&self.residuals) {
            w.write_record([csv_float(p.re), csv_float(p.im), csv_float(*r)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Distance from `z` to the closed segment `[p, q]`.
pub fn segment_distance(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let e = q - p;
    let len2 = e.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p) * e.conj()).re / len2).clamp(0.0, 1.0);
    (z - (p + e * t)).norm()
}

/// Traces the upper half by predictor-corrector continuation, resamples it
/// at uniform arclength with `npts` points and mirrors it into the lower
/// half.
pub fn trace_gamma(neg_a: f64, npts: usize, tol: f64) -> Result<CurvePolyline> {
    check_strength(neg_a)?;
    if npts < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 points, got {npts}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let root = neg_a.sqrt();
    let top = Complex64::new(0.0, 2.0 * root);
    let junction = solve_za(neg_a, tol.min(1e-12))?;

    let fail = |accepted: usize, reason: String| Error::TraceFailure { accepted, reason };

    // fine trace
    let theta = start_direction(neg_a)?;
    let first = top + Complex64::from_polar(1e-3 * root, theta);
    let (mut z, _) = correct(neg_a, first, tol).ok_or_else(|| fail(1, "start corrector".into()))?;
    let mut fine = vec![top, z];
    let mut heading = (z - top) / (z - top).norm();
    let mut h = 2e-3 * root;
    let h_max = 4e-3 * root;
    for _ in 0..1_000_000 {
        let (_, g) = residual_and_gradient(neg_a, z);
        let mut tangent = Complex64::new(0.0, 1.0) * g / g.norm();
        if (tangent * heading.conj()).re < 0.0 {
            tangent = -tangent;
        }
        let pred = z + tangent * h;
        if pred.im <= 0.0 {
            break;
        }
        match correct(neg_a, pred, tol) {
            Some((next, _)) if (next - pred).norm() < 0.5 * h && next.im > 0.0 => {
                heading = (next - z) / (next - z).norm();
                z = next;
                fine.push(z);
                h = (h * 1.25).min(h_max);
            }
            Some((next, _)) if next.im <= 0.0 => break,
            _ => {
                h *= 0.5;
                if h < 1e-10 * root {
                    return Err(fail(fine.len(), format!("step collapsed near {z}")));
                }
            }
        }
    }
    fine.push(Complex64::new(junction, 0.0));

    // uniform arclength resampling
    let mut arc = Vec::with_capacity(fine.len());
    arc.push(0.0);
    for w in fine.windows(2) {
        arc.push(arc.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *arc.last().unwrap();
    let mut upper = Vec::with_capacity(npts);
    let mut upper_res = Vec::with_capacity(npts);
    upper.push(top);
    upper_res.push(0.0);
    let mut seg = 0;
    for k in 1..npts - 1 {
        let target = total * k as f64 / (npts - 1) as f64;
        while arc[seg + 1] < target {
            seg += 1;
        }
        let t = (target - arc[seg]) / (arc[seg + 1] - arc[seg]);
        let guess = fine[seg] + (fine[seg + 1] - fine[seg]) * t;
        let (p, r) =
            correct(neg_a, guess, tol).ok_or_else(|| fail(upper.len(), format!("resampling corrector at {guess}")))?;
        upper.push(p);
        upper_res.push(r);
    }
    let zj = Complex64::new(junction, 0.0);
    upper.push(zj);
    upper_res.push(gamma_residual(neg_a, zj)?.abs());

    let mut points = upper.clone();
    let mut residuals = upper_res.clone();
    for k in (0..npts - 1).rev() {
        points.push(upper[k].conj());
        residuals.push(upper_res[k]);
    }
    Ok(CurvePolyline {
        neg_a,
        tol,
        junction,
        points,
        residuals,
    })
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<CurvePolyline>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CurvePolyline>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Curve traced with the default resolution, memoized per parameter.
pub fn default_curve(neg_a: f64) -> Result<Arc<CurvePolyline>> {
    check_strength(neg_a)?;
    let key = neg_a.to_bits();
    if let Some(c) = cache().lock().expect("curve cache").get(&key) {
        return Ok(c.clone());
    }
    let traced = Arc::new(trace_gamma(neg_a, DEFAULT_POINTS, DEFAULT_TOL)?);
    cache().lock().expect("curve cache").insert(key, traced.clone());
    Ok(traced)
}

/// Distance from a scaled point to the union of the real segment
/// `[-sqrt(n) d, z_A]` and the curve.
pub fn distance_to_yset(neg_a: f64, d: f64, n: usize, z: Complex64, curve: &CurvePolyline) -> f64 {
    let left = Complex64::new(-(n as f64).sqrt() * d, 0.0);
    let junction = Complex64::new(curve.junction, 0.0);
    debug_assert_eq!(curve.neg_a, neg_a, "curve traced for another parameter");
    segment_distance(z, left, junction).min(curve.distance(z))
}
