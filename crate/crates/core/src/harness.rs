//! Comparison sweeps between the asymptotic formulas and the recurrence,
//! and the data files behind the zero-set figure.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    asymptotic, classify_region, oscillatory_phase, scaled_to_argument, RegionKind, DEFAULT_DELTA,
};
use crate::csv_float;
use crate::curve::{default_curve, CurvePolyline};
use crate::error::{Error, Result};
use crate::recurrence::{eval_pi_mode, Case, EvalMode, RecurrenceParams};
use crate::zeros::{find_zeros, max_yset_distance, ZeroSet, DEFAULT_MAXITER, DEFAULT_TOL};

/// Absolute slack allowed when checking that errors do not increase, so
/// that roundoff-level values of an exact formula never flag.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Reference arithmetic for comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum OracleMode {
    /// High precision with at least 256 bits, growing as `n / 2` so the
    /// unstable directions of the recurrence stay resolved.
    Auto,
    Fixed(EvalMode),
}

impl OracleMode {
    pub fn resolve(self, n: usize) -> EvalMode {
        match self {
            OracleMode::Auto => EvalMode::HighPrec {
                bits: 256.max(n as u32 / 2),
            },
            OracleMode::Fixed(m) => m,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: RecurrenceParams,
    pub n_list: Vec<usize>,
    /// Scaled points in the coordinate of the parameter case.
    pub points: Vec<Complex64>,
    pub delta: f64,
    pub mode: OracleMode,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    /// Validates the degree list and rejects points that fall in a
    /// turning-point neighbourhood at any configured degree.
    pub fn new(
        params: RecurrenceParams,
        n_list: Vec<usize>,
        points: Vec<Complex64>,
        delta: f64,
        mode: OracleMode,
    ) -> Result<Self> {
        if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "degree list must be nonempty, positive and strictly ascending: {n_list:?}"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("no sweep points".into()));
        }
        for &z in &points {
            for &n in &n_list {
                if classify_region(&params, n, z, delta)?.kind == RegionKind::TurningPointExcluded {
                    return Err(Error::InvalidInput(format!(
                        "point {z} is within {delta} of a turning point at n = {n}"
                    )));
                }
            }
        }
        Ok(SweepConfig {
            params,
            n_list,
            points,
            delta,
            mode,
            format: OutputFormat::Csv,
            out: None,
        })
    }

    /// One point per region that has a formula, swept over `n = 100, 400, 1600`.
    pub fn representative(params: RecurrenceParams) -> Result<Self> {
        let n_list = vec![100, 400, 1600];
        let points = representative_points(&params, &n_list)?;
        SweepConfig::new(params, n_list, points, representative_delta(&params), OracleMode::Auto)
    }

    /// Header lines echoing the resolved configuration.
    pub fn header(&self) -> Vec<String> {
        vec![format!(
            "config: {}",
            serde_json::to_string(self).expect("config serializes")
        )]
    }
}

/// Offset of the curve sample point from the curve itself.
pub const CURVE_OFFSET: f64 = 0.15;

/// Region width used by [`SweepConfig::representative`]; wide enough in the
/// curved case that the offset curve point is still in its neighbourhood.
pub fn representative_delta(params: &RecurrenceParams) -> f64 {
    match params.normalized().0.case() {
        Case::Ib => 0.2,
        _ => DEFAULT_DELTA,
    }
}

/// Candidate points on `[lo, hi]`, ranked by how far the leading-order
/// oscillation stays from a zero across all degrees; the best one wins.
/// Only the formula is consulted, never the recurrence.
fn crest_point(params: &RecurrenceParams, n_list: &[usize], lo: f64, hi: f64, sine: bool) -> Result<f64> {
    const CANDIDATES: usize = 2001;
    let mut best = (f64::NEG_INFINITY, lo);
    for k in 0..CANDIDATES {
        let t = lo + (hi - lo) * k as f64 / (CANDIDATES - 1) as f64;
        let mut score = f64::INFINITY;
        for &n in n_list {
            let w = oscillatory_phase(params, n, Complex64::new(t, 0.0))?;
            score = score.min(if sine { w.sin() } else { w.cos() }.abs());
        }
        if score > best.0 {
            best = (score, t);
        }
    }
    Ok(best.1)
}

/// Representative scaled points, one per region with a formula: an outer
/// point at a fixed offset, oscillatory points chosen by [`crest_point`],
/// and for the curved case a point just outside the middle of the curve.
pub fn representative_points(params: &RecurrenceParams, n_list: &[usize]) -> Result<Vec<Complex64>> {
    let (p, _) = params.normalized();
    let c = Complex64::new;
    let crest = |lo, hi| crest_point(&p, n_list, lo, hi, false).map(|t| c(t, 0.0));
    Ok(match p.case() {
        Case::Ia => {
            let r = 2.0 * p.a.sqrt();
            vec![c(r + 1.0, 0.0), crest(-0.7 * r, 0.7 * r)?, crest(-r - 3.5, -r - 0.5)?]
        }
        Case::Ib => {
            let curve = default_curve(p.neg_a())?;
            let i = curve.half_len() / 2;
            let tangent = curve.points[i + 1] - curve.points[i - 1];
            let mut normal = Complex64::i() * tangent / tangent.norm();
            if normal.re > 0.0 {
                normal = -normal;
            }
            vec![
                c(3.0, 0.0),
                crest(curve.junction - 3.5, curve.junction - 0.5)?,
                curve.points[i] + normal * CURVE_OFFSET,
            ]
        }
        Case::Ic => vec![c(2.0 * p.d, 0.0), crest(0.2 * p.d, 0.8 * p.d)?],
        Case::IIa | Case::IIb => {
            let slope = if p.case() == Case::IIa { p.a } else { p.neg_a() };
            let r = 2.0 * slope.sqrt();
            vec![c(r + 1.0, 0.0), crest(0.2 * r, 0.8 * r)?, crest(-0.8 * r, -0.2 * r)?]
        }
        Case::IIc => {
            let r = 2.0 * p.b.abs().sqrt();
            let t = crest_point(&p, n_list, -0.9 * r, 0.9 * r, true)?;
            vec![c(2.0 * r, 0.0), c(t, 0.0)]
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub point: Complex64,
    pub region: RegionKind,
    pub error: Option<f64>,
    /// `log|other| - log|selected|` for outer formulas.
    pub log_gap: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub region: RegionKind,
    pub max_error: f64,
}

/// An increase of the error at one point between consecutive degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Complex64,
    pub n_before: usize,
    pub n_after: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub config: SweepConfig,
    pub rows: Vec<ErrorRow>,
    pub summary: Vec<SummaryRow>,
    pub violations: Vec<Violation>,
}

impl ErrorReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failures(&self) -> impl Iterator<Item = &ErrorRow> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }

    /// Largest error at the last degree, with failed rows counting as infinite.
    pub fn final_max_error(&self) -> f64 {
        let last = *self.config.n_list.last().expect("nonempty");
        self.rows
            .iter()
            .filter(|r| r.n == last)
            .map(|r| r.error.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for line in self.config.header() {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re", "im", "region", "error", "log_gap", "failure"])?;
        let opt = |v: Option<f64>| v.map(csv_float).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                csv_float(r.point.re),
                csv_float(r.point.im),
                r.region.label().to_string(),
                opt(r.error),
                opt(r.log_gap),
                r.failure.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn compare_one(config: &SweepConfig, n: usize, z: Complex64) -> ErrorRow {
    let mut row = ErrorRow {
        n,
        point: z,
        region: RegionKind::Outer,
        error: None,
        log_gap: None,
        failure: None,
    };
    let result = (|| -> Result<()> {
        let region = classify_region(&config.params, n, z, config.delta)?;
        row.region = region.kind;
        let asym = asymptotic(&config.params, n, z, region)?;
        row.log_gap = asym.outer.as_ref().map(|o| o.log_gap());
        let x = scaled_to_argument(&config.params, n, z);
        let exact = eval_pi_mode(&config.params, x, n, config.mode.resolve(n))?;
        row.error = Some(asym.value.rel_error(&exact.value)?);
        Ok(())
    })();
    if let Err(e) = result {
        row.failure = Some(e.to_string());
    }
    row
}

/// Evaluates every `(n, point)` pair; failures are recorded, not fatal.
pub fn compare_sweep(config: &SweepConfig) -> ErrorReport {
    let jobs: Vec<(usize, Complex64)> = config
        .n_list
        .iter()
        .flat_map(|&n| config.points.iter().map(move |&z| (n, z)))
        .collect();
    let rows: Vec<ErrorRow> = jobs.par_iter().map(|&(n, z)| compare_one(config, n, z)).collect();

    let mut summary: Vec<SummaryRow> = Vec::new();
    for r in &rows {
        let err = r.error.unwrap_or(f64::INFINITY);
        match summary.iter_mut().find(|s| s.n == r.n && s.region == r.region) {
            Some(s) => s.max_error = s.max_error.max(err),
            None => summary.push(SummaryRow {
                n: r.n,
                region: r.region,
                max_error: err,
            }),
        }
    }

    let np = config.points.len();
    let mut violations = Vec::new();
    for (j, &z) in config.points.iter().enumerate() {
        for w in 1..config.n_list.len() {
            let (a, b) = (&rows[(w - 1) * np + j], &rows[w * np + j]);
            let before = a.error.unwrap_or(f64::INFINITY);
            let after = b.error.unwrap_or(f64::INFINITY);
            // a failed row cannot show improvement
            let failed = a.error.is_none() || b.error.is_none();
            if failed || !(after <= before + MONOTONE_SLACK) {
                violations.push(Violation {
                    point: z,
                    n_before: a.n,
                    n_after: b.n,
                    before,
                    after,
                });
            }
        }
    }
    ErrorReport {
        config: config.clone(),
        rows,
        summary,
        violations,
    }
}

/// What [`emit_figure_data`] wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    pub params: RecurrenceParams,
    pub n: usize,
    #[serde(rename = "A")]
    pub neg_a: f64,
    pub z_a: f64,
    pub max_distance: f64,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Overlay<'a> {
    params: &'a RecurrenceParams,
    n: usize,
    #[serde(rename = "A")]
    neg_a: f64,
    z_a: f64,
    max_distance: f64,
    endpoint_exclusion: f64,
    curve: Vec<[f64; 2]>,
    segment: Vec<[f64; 2]>,
    zeros: Vec<[f64; 2]>,
}

/// Number of samples written for the real segment.
pub const SEGMENT_SAMPLES: usize = 201;

fn segment_samples(left: f64, right: f64) -> Vec<f64> {
    (0..SEGMENT_SAMPLES)
        .map(|k| left + (right - left) * k as f64 / (SEGMENT_SAMPLES - 1) as f64)
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Writes `curve.csv`, `segment.csv`, `zeros.csv` and `overlay.json` for the
/// negative-`a` drifting case.
pub fn emit_figure_data(params: &RecurrenceParams, n: usize, out_dir: &Path) -> Result<FigureSummary> {
    let (q, _) = params.normalized();
    if q.case() != Case::Ib {
        return Err(Error::InvalidInput(format!(
            "figure data needs d != 0 and a < 0, got case {}",
            q.case().label()
        )));
    }
    let curve = default_curve(q.neg_a())?;
    let zeros = find_zeros(params, n, DEFAULT_TOL, DEFAULT_MAXITER)?;
    write_figure(params, n, &curve, &zeros, out_dir)
}

fn write_figure(
    params: &RecurrenceParams,
    n: usize,
    curve: &CurvePolyline,
    zeros: &ZeroSet,
    out_dir: &Path,
) -> Result<FigureSummary> {
    let (q, _) = params.normalized();
    let max_distance = max_yset_distance(zeros, curve)?;
    fs::create_dir_all(out_dir)?;
    let header = vec![format!(
        "config: {}",
        serde_json::json!({ "params": params, "n": n, "A": q.neg_a(), "points": curve.half_len() })
    )];
    let files: Vec<PathBuf> = ["curve.csv", "segment.csv", "zeros.csv", "overlay.json"]
        .iter()
        .map(|f| out_dir.join(f))
        .collect();

    curve.write_csv(create(&files[0])?, &header)?;

    let left = -(n as f64).sqrt() * q.d;
    let segment = segment_samples(left, curve.junction);
    {
        let mut out = create(&files[1])?;
        for line in &header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im"])?;
        for x in &segment {
            w.write_record([csv_float(*x), csv_float(0.0)])?;
        }
        w.flush()?;
    }

    zeros.write_csv(create(&files[2])?, &header)?;

    let overlay = Overlay {
        params,
        n,
        neg_a: q.neg_a(),
        z_a: curve.junction,
        max_distance,
        endpoint_exclusion: crate::zeros::ENDPOINT_EXCLUSION,
        curve: curve.points.iter().map(|z| [z.re, z.im]).collect(),
        segment: segment.iter().map(|&x| [x, 0.0]).collect(),
        zeros: zeros.scaled.iter().map(|z| [z.re, z.im]).collect(),
    };
    let mut out = create(&files[3])?;
    serde_json::to_writer_pretty(&mut out, &overlay)?;
    writeln!(out)?;
    out.flush()?;

    Ok(FigureSummary {
        params: *params,
        n,
        neg_a: q.neg_a(),
        z_a: curve.junction,
        max_distance,
        files,
    })
}
