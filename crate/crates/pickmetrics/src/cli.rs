//! Batch command-line surface: `coeffs`, `metric`, `length`, `separate`,
//! `obstruct`, `embed-check`.
//!
//! Flags take the form `--key value`; an optional JSON config file supplies
//! defaults with flags taking precedence. Every command writes one CSV
//! artifact (UTF-8, LF, header row, 17-significant-digit decimals) and a
//! JSON summary on stdout. Identical configs (including the seed) produce
//! byte-identical CSV. Exit codes: 0 when all internal checks pass, 1 when
//! a check fails, 2 on precondition errors, 3 on numerical non-convergence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::embedding_isometry_gap;
use crate::coeffs::{
    gregory_integral, gregory_recursion, reconstruction_error, reconstruction_error_bound,
    CoeffTable,
};
use crate::error::{Error, Result};
use crate::geodesy::{polyline_length, radial_length, riemannian_length_dirichlet, Curve};
use crate::kernel::{BallPoint, DiscPoint, KernelSpec, Point};
use crate::metrics::{
    delta_from_kernel, dirichlet_metric, disc_rho, pick_two_point, pseudohyperbolic,
    weighted_metric_bounds, MetricId,
};
use crate::packing::{circle_lattice, log_u_grid, obstruction_report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Metric,
    Length,
    Separate,
    Obstruct,
    EmbedCheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Metric => "metric",
            Command::Length => "length",
            Command::Separate => "separate",
            Command::Obstruct => "obstruct",
            Command::EmbedCheck => "embed-check",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "coeffs" => Ok(Command::Coeffs),
            "metric" => Ok(Command::Metric),
            "length" => Ok(Command::Length),
            "separate" => Ok(Command::Separate),
            "obstruct" => Ok(Command::Obstruct),
            "embed-check" => Ok(Command::EmbedCheck),
            other => Err(Error::InvalidParameter {
                name: "command",
                reason: format!(
                    "unknown command `{other}` (expected coeffs, metric, length, separate, obstruct or embed-check)"
                ),
            }),
        }
    }

    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Coeffs => &["n-max", "method", "tol"],
            Command::Metric => &["kernel", "z", "w"],
            Command::Length => &["r", "tol"],
            Command::Separate => &["r", "eps"],
            Command::Obstruct => &["d", "L", "m", "eps", "k-max"],
            Command::EmbedCheck => &["grid", "trunc"],
        }
    }

    fn required_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Coeffs => &["n-max"],
            Command::Metric => &["kernel", "z", "w"],
            Command::Length => &["r"],
            Command::Separate => &["r"],
            Command::Obstruct => &["d"],
            Command::EmbedCheck => &[],
        }
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
    pub output_path: PathBuf,
    pub seed: u64,
}

/// Outcome of one run; serialized as the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub wall_time_s: f64,
    pub checks_passed: u32,
    pub checks_failed: u32,
    pub outputs: Vec<String>,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn json_value_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parse `command --key value ...`, merging an optional `--config FILE`
/// (JSON object) underneath the flags. Deterministic for identical inputs.
pub fn parse_config(args: &[String]) -> Result<RunConfig> {
    let mut it = args.iter();
    let command = Command::parse(
        it.next()
            .ok_or_else(|| invalid("command", "no command given"))?,
    )?;

    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    while let Some(key) = it.next() {
        let key = key
            .strip_prefix("--")
            .ok_or_else(|| invalid("args", format!("expected a --flag, got `{key}`")))?;
        let value = it
            .next()
            .ok_or_else(|| invalid("args", format!("flag --{key} is missing its value")))?;
        if flags.insert(key.to_string(), value.to_string()).is_some() {
            return Err(invalid("args", format!("flag --{key} given twice")));
        }
    }

    let mut params: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = flags.remove("config") {
        let text = fs::read_to_string(&path)
            .map_err(|e| invalid("config", format!("cannot read {path}: {e}")))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| invalid("config", format!("invalid JSON in {path}: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| invalid("config", "config file must hold a JSON object"))?;
        for (k, v) in obj {
            params.insert(k.clone(), json_value_to_string(v));
        }
    }
    // flags win over file values
    params.extend(flags);

    let output_path = PathBuf::from(
        params
            .remove("out")
            .unwrap_or_else(|| format!("{}.csv", command.name())),
    );
    let seed = match params.remove("seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| invalid("seed", format!("not a 64-bit unsigned integer: `{s}`")))?,
        None => 0,
    };

    for key in params.keys() {
        if !command.allowed_keys().contains(&key.as_str()) {
            return Err(invalid(
                "args",
                format!("unknown key `{key}` for command {}", command.name()),
            ));
        }
    }
    for key in command.required_keys() {
        if !params.contains_key(*key) {
            return Err(invalid(
                "args",
                format!("command {} requires --{key}", command.name()),
            ));
        }
    }

    Ok(RunConfig {
        command,
        params,
        output_path,
        seed,
    })
}

fn get_f64(params: &BTreeMap<String, String>, key: &'static str, default: f64) -> Result<f64> {
    match params.get(key) {
        Some(s) => s
            .parse::<f64>()
            .map_err(|_| invalid("params", format!("--{key}: not a number: `{s}`"))),
        None => Ok(default),
    }
}

fn get_usize(
    params: &BTreeMap<String, String>,
    key: &'static str,
    default: usize,
) -> Result<usize> {
    match params.get(key) {
        Some(s) => s.parse::<usize>().map_err(|_| {
            invalid(
                "params",
                format!("--{key}: not a nonnegative integer: `{s}`"),
            )
        }),
        None => Ok(default),
    }
}

fn parse_kernel(s: &str) -> Result<KernelSpec> {
    if s == "hardy" {
        return Ok(KernelSpec::Hardy);
    }
    if s == "dirichlet" {
        return Ok(KernelSpec::Dirichlet);
    }
    if let Some(a) = s.strip_prefix("weighted:") {
        let a: f64 = a
            .parse()
            .map_err(|_| invalid("kernel", format!("bad weight in `{s}`")))?;
        return KernelSpec::weighted_dirichlet(a);
    }
    if let Some(d) = s.strip_prefix("da:") {
        let d: usize = d
            .parse()
            .map_err(|_| invalid("kernel", format!("bad dimension in `{s}`")))?;
        return KernelSpec::drury_arveson(d);
    }
    Err(invalid(
        "kernel",
        format!("unknown kernel `{s}` (expected hardy, dirichlet, weighted:A or da:D)"),
    ))
}

/// `RE,IM` for disc points; `RE0,IM0,RE1,IM1,...` for d-dimensional points.
fn parse_point(s: &str, key: &'static str, dim: usize) -> Result<Point> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid(key, format!("bad coordinate `{t}` in `{s}`")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != 2 * dim {
        return Err(invalid(
            key,
            format!(
                "expected {} comma-separated values, got {}",
                2 * dim,
                vals.len()
            ),
        ));
    }
    let coords: Vec<Complex64> = vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    if dim == 1 {
        Ok(Point::Disc(DiscPoint::new(coords[0])?))
    } else {
        Ok(Point::Ball(BallPoint::new(coords)?))
    }
}

fn fmt_point(p: &Point) -> String {
    let ball = p.ball();
    let mut s = String::new();
    for (i, c) in ball.coords().iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.16e} {:.16e}", c.re, c.im);
    }
    s
}

struct Checks {
    passed: u32,
    failed: u32,
}

impl Checks {
    fn new() -> Self {
        Self {
            passed: 0,
            failed: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

/// Dispatch a validated config, write its CSV artifact, return the summary.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let file = fs::File::create(&config.output_path).map_err(|e| {
        invalid(
            "out",
            format!("cannot write {}: {e}", config.output_path.display()),
        )
    })?;
    let mut out = BufWriter::new(file);
    let mut checks = Checks::new();

    match config.command {
        Command::Coeffs => run_coeffs(config, &mut out, &mut checks)?,
        Command::Metric => run_metric(config, &mut out, &mut checks)?,
        Command::Length => run_length(config, &mut out, &mut checks)?,
        Command::Separate => run_separate(config, &mut out, &mut checks)?,
        Command::Obstruct => run_obstruct(config, &mut out, &mut checks)?,
        Command::EmbedCheck => run_embed_check(config, &mut out, &mut checks)?,
    }
    out.flush()
        .map_err(|e| invalid("out", format!("flush failed: {e}")))?;

    Ok(RunSummary {
        command: config.command.name().to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        checks_passed: checks.passed,
        checks_failed: checks.failed,
        outputs: vec![config.output_path.display().to_string()],
        seed: config.seed,
        params: config.params.clone(),
    })
}

fn run_coeffs<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let n_max = get_usize(&config.params, "n-max", 0)?;
    let tol = get_f64(&config.params, "tol", 1e-13)?;
    let method = config
        .params
        .get("method")
        .map(String::as_str)
        .unwrap_or("recursion");

    let table: CoeffTable = match method {
        "recursion" | "both" => gregory_recursion(n_max)?,
        "integral" => crate::coeffs::gregory_integral_table(n_max, tol)?,
        other => {
            return Err(invalid(
                "method",
                format!("unknown method `{other}` (expected recursion, integral or both)"),
            ))
        }
    };

    checks.record(table.values().iter().all(|&c| c >= 0.0));
    let sums = table.partial_sums();
    checks.record(
        sums.windows(2).all(|w| w[1] >= w[0]) && sums.last().is_none_or(|&s| s <= 1.0 + 1e-12),
    );
    if method == "both" {
        let upto = n_max.min(200);
        let mut agree = true;
        for n in 1..=upto {
            let ci = gregory_integral(n, tol)?;
            if (ci - table.get(n).unwrap()).abs() > 1e-11 {
                agree = false;
            }
        }
        checks.record(agree);
    }

    table
        .write_csv(out)
        .map_err(|e| invalid("out", e.to_string()))?;
    Ok(())
}

fn run_metric<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let kernel = parse_kernel(config.params.get("kernel").expect("required key validated"))?;
    let dim = match kernel {
        KernelSpec::DruryArveson { d } => d,
        _ => 1,
    };
    let z = parse_point(config.params.get("z").unwrap(), "z", dim)?;
    let w = parse_point(config.params.get("w").unwrap(), "w", dim)?;

    let delta = delta_from_kernel(&kernel, &z, &w)?;
    let pick = pick_two_point(&kernel, &z, &w)?;
    let closed = match kernel {
        KernelSpec::Hardy => disc_rho(&z.disc()?, &w.disc()?),
        KernelSpec::Dirichlet => dirichlet_metric(&z.disc()?, &w.disc()?),
        KernelSpec::WeightedDirichlet { a } => {
            weighted_metric_bounds(a, &z.disc()?, &w.disc()?)?.value
        }
        KernelSpec::DruryArveson { .. } => pseudohyperbolic(&z.ball(), &w.ball())?,
    };

    checks.record((delta - pick).abs() <= 1e-12);
    let closed_tol = if delta <= 1e-4 { 1e-10 } else { 1e-12 };
    checks.record((delta - closed).abs() <= closed_tol);

    writeln!(out, "kernel,z,w,delta,pick,closed_form")
        .and_then(|_| {
            writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                kernel,
                fmt_point(&z),
                fmt_point(&w),
                delta,
                pick,
                closed
            )
        })
        .map_err(|e| invalid("out", e.to_string()))?;
    Ok(())
}

fn run_length<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let r = get_f64(&config.params, "r", 0.0)?;
    let tol = get_f64(&config.params, "tol", 1e-8)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("radius must lie in (0,1), got {r}")));
    }

    let radial = radial_length(r, tol)?;
    let segment = Curve::radial_segment(r);
    let dirichlet_poly = polyline_length(
        &MetricId::KernelDelta(KernelSpec::Dirichlet),
        &segment,
        tol,
        20,
    )?;
    let riemann = riemannian_length_dirichlet(&segment, tol)?;
    let rho_poly = polyline_length(&MetricId::Pseudohyperbolic(1), &segment, tol, 20)?;
    let rho_closed = r.atanh();
    let ratio = radial / (-(1.0 - r).ln()).sqrt();

    // polyline sums are lower bounds in exact arithmetic; once refinement
    // stalls at the evaluation-noise floor the last increment bounds the
    // possible overshoot
    checks
        .record(dirichlet_poly.value <= riemann + 1e-9_f64.max(dirichlet_poly.estimate_gap.abs()));
    checks.record(
        !dirichlet_poly.converged
            || (riemann - dirichlet_poly.value).abs() <= 1e-6_f64.max(20.0 * tol),
    );
    checks.record((rho_poly.value - rho_closed).abs() <= 1e-5_f64.max(20.0 * tol));
    checks.record((radial - riemann).abs() <= 1e-6_f64.max(20.0 * tol));

    writeln!(
        out,
        "r,tol,dirichlet_radial,dirichlet_polyline,dirichlet_riemannian,rho_polyline,rho_closed,sqrt_log_ratio"
    )
    .and_then(|_| {
        writeln!(
            out,
            "{:.16e},{:.2e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r, tol, radial, dirichlet_poly.value, riemann, rho_poly.value, rho_closed, ratio
        )
    })
    .map_err(|e| invalid("out", e.to_string()))?;
    Ok(())
}

fn run_separate<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let r = get_f64(&config.params, "r", 0.0)?;
    let eps = get_f64(&config.params, "eps", 0.8)?;
    let set = circle_lattice(r, eps)?;

    checks.record(set.min_pairwise() >= eps);
    checks.record(set.len() as f64 >= 1.0 / (1.0 - r).sqrt());

    set.write_csv(out)
        .map_err(|e| invalid("out", e.to_string()))?;
    Ok(())
}

fn run_obstruct<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let d = get_usize(&config.params, "d", 0)?;
    let lip_upper = get_f64(&config.params, "L", 1.0)?;
    let lip_lower = get_f64(&config.params, "m", 1.0)?;
    let eps = get_f64(&config.params, "eps", 0.8)?;
    let k_max = get_usize(&config.params, "k-max", 15)? as u32;
    if k_max < 1 {
        return Err(invalid("k-max", "need at least one grid decade"));
    }

    let report = obstruction_report(d, lip_upper, lip_lower, eps, &log_u_grid(k_max))?;

    checks.record(
        report
            .rows
            .iter()
            .all(|row| row.lower > 0.0 && row.upper > 0.0),
    );
    checks.record(report.rows.windows(2).all(|w| w[1].lower > w[0].lower));
    if report.rows.len() >= 2 {
        // log-log slopes with respect to u over the final grid decade:
        // lower ~ u^{-1/2}, upper ~ u^{-d/(2d+1)}
        let a = &report.rows[report.rows.len() - 2];
        let b = &report.rows[report.rows.len() - 1];
        let dlog_u = b.u.ln() - a.u.ln();
        let lower_slope = (b.lower.ln() - a.lower.ln()) / dlog_u;
        let upper_slope = (b.upper.ln() - a.upper.ln()) / dlog_u;
        checks.record((lower_slope + 0.5).abs() <= 0.02);
        checks.record((upper_slope + report.alpha * d as f64).abs() <= 0.02);
    }
    checks.record(report.r_star_complement.is_some());

    report
        .write_csv(out)
        .map_err(|e| invalid("out", e.to_string()))?;
    Ok(())
}

fn run_embed_check<W: Write>(config: &RunConfig, out: &mut W, checks: &mut Checks) -> Result<()> {
    let grid = get_usize(&config.params, "grid", 5)?;
    let trunc = get_usize(&config.params, "trunc", 200)?;
    if grid < 1 {
        return Err(invalid("grid", "need at least a 1x1 grid"));
    }
    if trunc < 1 {
        return Err(invalid("trunc", "need a positive truncation order"));
    }
    let table = gregory_recursion(trunc)?;

    // deterministic spiral grid inside |z| <= 0.7
    let golden = 2.399_963_229_728_653;
    let pt = |i: usize, phase: f64, sign: f64| -> Result<DiscPoint> {
        let radius = if grid == 1 {
            0.0
        } else {
            0.7 * i as f64 / (grid - 1) as f64
        };
        DiscPoint::new(Complex64::from_polar(
            radius,
            sign * (golden * i as f64 + phase),
        ))
    };

    writeln!(out, "z,w,recon_error,tail_bound,isometry_gap")
        .map_err(|e| invalid("out", e.to_string()))?;
    let mut bound_ok = true;
    let mut recon_max: f64 = 0.0;
    let mut gap_max: f64 = 0.0;
    for i in 0..grid {
        let z = pt(i, 0.0, 1.0)?;
        for j in 0..grid {
            let w = pt(j, 0.5, -1.0)?;
            let recon = reconstruction_error(&z, &w, trunc, &table)?;
            let bound = reconstruction_error_bound(&z, &w, trunc, &table)?;
            let gap = embedding_isometry_gap(&z, &w, trunc, &table)?;
            bound_ok &= recon <= bound + 1e-15;
            recon_max = recon_max.max(recon);
            gap_max = gap_max.max(gap);
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e}",
                fmt_point(&Point::Disc(z)),
                fmt_point(&Point::Disc(w)),
                recon,
                bound,
                gap
            )
            .map_err(|e| invalid("out", e.to_string()))?;
        }
    }
    checks.record(bound_ok);
    checks.record(recon_max <= 1e-8);
    checks.record(gap_max <= 1e-6);
    Ok(())
}
