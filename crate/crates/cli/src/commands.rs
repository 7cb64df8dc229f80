use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use prasymp::asymptotics::evaluate;
use prasymp::curve::trace_gamma;
use prasymp::harness::{
    compare_sweep, emit_figure_data, representative_delta, representative_points, OracleMode, OutputFormat, SweepConfig,
};
use prasymp::recurrence::{eval_pi_deriv_mode, eval_pi_mode};
use prasymp::selftest::run_selftest;
use prasymp::zeros::{find_zeros_with, ZeroOptions};
use prasymp::{Error, RecurrenceParams, Result};
use serde_json::{json, Value};

use crate::{
    parse_mode, AsymArgs, Command, CompareArgs, CurveArgs, EvalArgs, FigureArgs, Format, OutputArgs, ParamArgs,
    SelftestArgs, ZerosArgs,
};

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Asym(a) => asym(a),
        Command::Compare(a) => compare(a),
        Command::Zeros(a) => zeros(a),
        Command::Curve(a) => curve(a),
        Command::Figure(a) => figure(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn params(p: ParamArgs, scaled: bool) -> Result<RecurrenceParams> {
    let params = RecurrenceParams::new(p.d, p.a, p.b)?;
    if scaled && p.d < 0.0 {
        eprintln!("note: d < 0, scaled points are read in the reflected frame x -> -x");
    }
    Ok(params)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn resolve_format(o: &OutputArgs) -> Format {
    if let Some(f) = o.format {
        return f;
    }
    match &o.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    }
}

fn eval(a: EvalArgs) -> Result<ExitCode> {
    let p = params(a.params, false)?;
    let pv = if a.deriv {
        eval_pi_deriv_mode(&p, a.x, a.n, a.mode)?
    } else {
        eval_pi_mode(&p, a.x, a.n, a.mode)?
    };
    let mut value = serde_json::to_value(pv.value)?;
    if let Some(dv) = pv.derivative {
        value["derivative"] = serde_json::to_value(dv)?;
    }
    value["config"] = json!({
        "command": "eval", "params": p, "n": a.n, "x": [a.x.re, a.x.im], "mode": a.mode,
    });
    emit_json(a.out.as_deref(), &value)?;
    Ok(ExitCode::SUCCESS)
}

fn asym(a: AsymArgs) -> Result<ExitCode> {
    let p = params(a.params, true)?;
    let v = evaluate(&p, a.n, a.z, a.delta)?;
    let mut value = serde_json::to_value(&v)?;
    value["config"] = json!({
        "command": "asym", "params": p, "n": a.n, "z": [a.z.re, a.z.im], "delta": a.delta,
    });
    emit_json(a.out.as_deref(), &value)?;
    Ok(ExitCode::SUCCESS)
}

fn oracle_mode(s: &str) -> Result<OracleMode> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(OracleMode::Auto);
    }
    parse_mode(s).map(OracleMode::Fixed).map_err(Error::InvalidInput)
}

fn compare(a: CompareArgs) -> Result<ExitCode> {
    let p = params(a.params, true)?;
    let mode = oracle_mode(&a.mode)?;
    let points = if a.z.is_empty() {
        representative_points(&p, &a.n_list)?
    } else {
        a.z.clone()
    };
    let delta = a.delta.unwrap_or_else(|| representative_delta(&p));
    let mut cfg = SweepConfig::new(p, a.n_list.clone(), points, delta, mode)?;
    let format = resolve_format(&a.output);
    cfg.format = match format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    cfg.out = a.output.out.clone();
    let report = compare_sweep(&cfg);
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            emit(a.output.out.as_deref(), &buf)?;
        }
        Format::Json => emit_json(a.output.out.as_deref(), &serde_json::to_value(&report)?)?,
    }
    for s in &report.summary {
        eprintln!("n = {:>6}  {:<20} max error {:.3e}", s.n, s.region.label(), s.max_error);
    }
    for v in &report.violations {
        eprintln!(
            "flag: error at {} rose from {:.3e} (n = {}) to {:.3e} (n = {})",
            v.point, v.before, v.n_before, v.after, v.n_after
        );
    }
    let failures = report.failures().count();
    if failures > 0 {
        for r in report.failures() {
            eprintln!(
                "failed: n = {} at {}: {}",
                r.n,
                r.point,
                r.failure.as_deref().unwrap_or("")
            );
        }
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn zeros(a: ZerosArgs) -> Result<ExitCode> {
    let p = params(a.params, true)?;
    let mut opts = ZeroOptions::for_problem(&p, a.n);
    opts.tol = a.tol;
    opts.maxiter = a.maxiter;
    if let Some(m) = a.mode {
        opts.mode = m;
    }
    let set = find_zeros_with(&p, a.n, &opts)?;
    let config = json!({ "command": "zeros", "params": p, "n": a.n, "options": opts });
    match resolve_format(&a.output) {
        Format::Csv => {
            let mut buf = Vec::new();
            set.write_csv(&mut buf, &[format!("config: {config}")])?;
            emit(a.output.out.as_deref(), &buf)?;
        }
        Format::Json => {
            let mut value = serde_json::to_value(&set)?;
            value["config"] = config;
            emit_json(a.output.out.as_deref(), &value)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn curve(a: CurveArgs) -> Result<ExitCode> {
    let poly = trace_gamma(a.neg_a, a.points, a.tol)?;
    let config = json!({ "command": "curve", "A": a.neg_a, "points": a.points, "tol": a.tol });
    match resolve_format(&a.output) {
        Format::Csv => {
            let mut buf = Vec::new();
            poly.write_csv(&mut buf, &[format!("config: {config}")])?;
            emit(a.output.out.as_deref(), &buf)?;
        }
        Format::Json => {
            let mut value = serde_json::to_value(&poly)?;
            value["config"] = config;
            emit_json(a.output.out.as_deref(), &value)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn figure(a: FigureArgs) -> Result<ExitCode> {
    let p = params(ParamArgs { d: a.d, a: a.a, b: a.b }, true)?;
    let summary = emit_figure_data(&p, a.n, &a.out)?;
    emit_json(None, &serde_json::to_value(&summary)?)?;
    Ok(ExitCode::SUCCESS)
}

fn selftest(a: SelftestArgs) -> Result<ExitCode> {
    let checks = run_selftest();
    let all = checks.iter().all(|c| c.passed);
    match a.format {
        Format::Json => emit_json(None, &serde_json::to_value(&checks)?)?,
        Format::Csv => {
            let mut text = String::new();
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                text += &format!("{mark}  {:<12} {:<30} {}\n", c.module, c.name, c.detail);
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            text += &format!("{passed}/{} checks passed\n", checks.len());
            emit(None, text.as_bytes())?;
        }
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
