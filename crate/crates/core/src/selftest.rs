//! Quick invariant checks across all modules, for a smoke test of an
//! installed build.

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{asym_iib, asym_iib_direct, asym_iic, Region, RegionKind};
use crate::branch::sqrt_quad;
use crate::curve::{gamma_residual, solve_za, trace_gamma};
use crate::harness::{compare_sweep, SweepConfig};
use crate::recurrence::{eval_pi, eval_pi_mode, EvalMode, RecurrenceParams};
use crate::scaled::ScaledComplex;
use crate::zeros::{find_zeros, DEFAULT_MAXITER, DEFAULT_TOL};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Probe = fn() -> Result<(bool, String)>;

const PROBES: &[(&str, &str, Probe)] = &[
    ("scaled", "round trip and cancellation", scaled_round_trip),
    ("recurrence", "chebyshev closed form", chebyshev_closed_form),
    ("recurrence", "native matches rational", native_matches_rational),
    ("branch", "square of sqrt_quad", sqrt_quad_squares),
    ("asymptotics", "equality case", equality_case),
    ("asymptotics", "rotation paths agree", rotation_paths),
    ("asymptotics", "positive slope sweep", positive_slope_sweep),
    ("curve", "junction certificate", junction_certificate),
    ("curve", "trace endpoints", trace_endpoints),
    ("zeros", "chebyshev zeros", chebyshev_zeros),
    ("zeros", "imaginary zeros", imaginary_zeros),
];

/// Runs every probe; a probe that errors counts as failed.
pub fn run_selftest() -> Vec<Check> {
    PROBES
        .iter()
        .map(|&(module, name, probe)| {
            let (passed, detail) = probe().unwrap_or_else(|e| (false, e.to_string()));
            Check {
                module,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scaled_round_trip() -> Result<(bool, String)> {
    let w = c(-3.25e-200, 7.5e100);
    let back = ScaledComplex::from_complex(w)?.to_complex();
    let one = ScaledComplex::ONE;
    let zero = one.sub(&one)?;
    Ok((back == w && zero.is_zero(), format!("{:e} + {:e}i", back.re, back.im)))
}

fn chebyshev_closed_form() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.0, 0.0, 0.25)?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let t = (0.05 + 3.0 * k as f64 / 50.0).min(3.1);
        let x = t.cos();
        for n in [1usize, 10, 57, 100] {
            let want = ((n as f64 + 1.0) * t).sin() / (t.sin() * 2f64.powi(n as i32));
            let got = eval_pi(&p, c(x, 0.0), n)?.value.to_complex().re;
            worst = worst.max((got - want).abs() / want.abs().max(1e-300));
        }
    }
    Ok((worst < 1e-9, format!("max rel {worst:e}")))
}

fn native_matches_rational() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.5, -0.75, 0.25)?;
    let x = c(1.25, 0.5);
    let a = eval_pi(&p, x, 60)?.value;
    let b = eval_pi_mode(&p, x, 60, EvalMode::Rational)?.value;
    let e = a.rel_error(&b)?;
    Ok((e < 1e-12, format!("rel {e:e}")))
}

fn sqrt_quad_squares() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for a in [1.0, -1.0, 2.5] {
        for k in 0..40 {
            let z = c(-4.0 + 0.2 * k as f64 + 1e-3, 1.5 - 0.07 * k as f64);
            let s = sqrt_quad(a, z)?;
            let want = z * z - 4.0 * a;
            worst = worst.max((s * s - want).norm() / want.norm());
        }
    }
    Ok((worst < 1e-13, format!("max rel {worst:e}")))
}

fn equality_case() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.0, 0.0, 0.25)?;
    let bulk = Region::new(RegionKind::OscillatoryBulk);
    let mut worst: f64 = 0.0;
    for n in [5usize, 33, 100] {
        for x in [-0.9, -0.31, 0.2, 0.77] {
            let a = asym_iic(&p, n, c(x, 0.0), bulk)?.value;
            let e = eval_pi(&p, c(x, 0.0), n)?.value;
            worst = worst.max(a.rel_error(&e)?);
        }
    }
    Ok((worst < 1e-10, format!("max rel {worst:e}")))
}

fn rotation_paths() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.0, -1.0, 0.3)?;
    let outer = Region::new(RegionKind::Outer);
    let mut worst: f64 = 0.0;
    for y in [c(3.0, 0.0), c(2.0, 1.5), c(-2.5, -1.0)] {
        let u = asym_iib(&p, 64, y, outer)?.value;
        let v = asym_iib_direct(&p, 64, y, outer)?.value;
        worst = worst.max(u.rel_error(&v)?);
    }
    Ok((worst < 1e-12, format!("max rel {worst:e}")))
}

fn positive_slope_sweep() -> Result<(bool, String)> {
    let cfg = SweepConfig::representative(RecurrenceParams::new(1.0, 1.0, 0.0)?)?;
    let report = compare_sweep(&cfg);
    let max = report.final_max_error();
    Ok((
        report.is_monotone() && max < 0.1,
        format!("max error at n = 1600: {max:.3e}"),
    ))
}

fn junction_certificate() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for big in [0.25, 1.0, 4.0] {
        let z = solve_za(big, 1e-14)?;
        worst = worst.max(gamma_residual(big, c(z, 0.0))?.abs());
    }
    Ok((worst < 1e-12, format!("max residual {worst:e}")))
}

fn trace_endpoints() -> Result<(bool, String)> {
    let curve = trace_gamma(1.0, 128, 1e-10)?;
    let (top, bottom) = curve.endpoints();
    let end = (top - c(0.0, 2.0)).norm().max((bottom - c(0.0, -2.0)).norm());
    let res = curve.max_residual();
    Ok((end < 1e-9 && res < 1e-10, format!("endpoint {end:e}, residual {res:e}")))
}

fn chebyshev_zeros() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.0, 0.0, 0.25)?;
    let set = find_zeros(&p, 20, DEFAULT_TOL, DEFAULT_MAXITER)?;
    // sorted ascending, so zero k matches cos((21 - k) pi / 21)
    let worst = set
        .zeros
        .iter()
        .enumerate()
        .map(|(k, z)| (z - ((20 - k) as f64 * std::f64::consts::PI / 21.0).cos()).norm())
        .fold(0.0, f64::max);
    Ok((worst < 1e-8, format!("max deviation {worst:e}")))
}

fn imaginary_zeros() -> Result<(bool, String)> {
    let p = RecurrenceParams::new(0.0, -1.0, 0.0)?;
    let set = find_zeros(&p, 50, DEFAULT_TOL, DEFAULT_MAXITER)?;
    let worst = set.zeros.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    Ok((worst < 1e-8, format!("max |re| {worst:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_probe_passes() {
        let checks = run_selftest();
        assert_eq!(checks.len(), PROBES.len());
        for c in &checks {
            assert!(c.passed, "{}/{}: {}", c.module, c.name, c.detail);
        }
    }
}
