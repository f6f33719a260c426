//! Command-line front end. [`run`] parses argv, executes one subcommand and
//! prints `{"config", "result", "diagnostics"}` as JSON, or the result as CSV.
//!
//! Exit codes: 0 success, 2 domain error, 3 infeasible direction, 4 numerical
//! failure (accuracy, bracketing, indeterminate growth), 64 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::are::finite::critical_value_exact;
use crate::are::{self, DirectionSequence};
use crate::error::{Error, Result};
use crate::mc;
use crate::moments::ExtendedP;
use crate::num::{Quadrature, RngStream};
use crate::ptest::{self, CritMethod, Feasibility, ShiftVector, TestPlan};
use crate::regime::regime_row;

#[derive(Parser, Debug)]
#[command(name = "pmean", about = "p-mean tests for high-dimensional Gaussian means", disable_version_flag = true)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads; defaults to $PMEAN_THREADS, else one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed of the Monte Carlo streams.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Asymptotic,
    Mc,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical value c with P(⟨Z⟩_p > c) ≈ α.
    Critval(CritvalArgs),
    /// Power at the normalized shift √n·θ.
    Power(PowerArgs),
    /// Smallest n reaching power β along θ (rescaled to unit Euclidean norm unless --raw).
    Samplesize(SampleSizeArgs),
    /// Feasibility of a direction given its number of zero coordinates.
    Feasible(FeasibleArgs),
    /// d → ∞ classification of the relative efficiency along a direction family.
    Are(AreArgs),
    /// Exact relative efficiency at d ≤ 3 by quadrature.
    AreFinite(AreFiniteArgs),
    /// Table of (p, a_p), optionally with ψ-transformed columns.
    ApCurve(ApCurveArgs),
    /// Checks r(p) > 1 + p²/2 and its rational lower bounds on a grid.
    VerifyAp(VerifyApArgs),
    /// Monte Carlo rejection rate at a shift.
    Simulate(SimulateArgs),
    /// KS distance of the normalized null statistic to its limit law.
    Ks(KsArgs),
    /// Paired Monte Carlo comparison of powers at v and w with w² ≺ v².
    Schur2Check(Schur2Args),
    /// Library version.
    Version,
}

fn p_arg(s: &str) -> std::result::Result<ExtendedP, String> {
    s.parse::<ExtendedP>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct CritvalArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Method::Asymptotic)]
    method: Method,
    /// Replications for --method mc.
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct PowerArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Alternative θ: literal list, equalized:t, spike:t, block:k:s or a file.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Sample size (continuous).
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    #[arg(long, value_enum, default_value_t = Method::Asymptotic)]
    crit: Method,
    /// Replications for Monte Carlo critical values and empirical power; 0 skips the empirical power.
    #[arg(long, default_value_t = 0)]
    reps: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct SampleSizeArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Use θ as given instead of rescaling it to unit Euclidean norm.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct FeasibleArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Extra allowance on d₀ as a fraction of d.
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct AreArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    /// Direction family: equalized, spike or block:k:s (rescaled to ⟨u⟩₂ = 1).
    #[arg(long)]
    u: String,
    /// Probe dimensions, spanning at least three decades.
    #[arg(long, default_value = "100,1000,10000,100000")]
    probes: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
    /// Half-width of the indeterminate band around the threshold exponent.
    #[arg(long, default_value_t = are::DEAD_BAND)]
    band: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct AreFiniteArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ApCurveArgs {
    #[arg(long, default_value_t = -0.49, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Add the columns ψ(p/4) and ψ(a_p), ψ(x) = 2x/(2|x| + 3).
    #[arg(long)]
    psi: bool,
    /// Omit the end rows p = −1/2 and p = ∞.
    #[arg(long)]
    no_ends: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyApArgs {
    #[arg(long, default_value_t = -0.499, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct SimulateArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Normalized shift √n·θ; all zeros gives the size.
    #[arg(long, allow_hyphen_values = true, default_value = "equalized:0")]
    theta: String,
    #[arg(long, value_enum, default_value_t = Method::Mc)]
    crit: Method,
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct KsArgs {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct Schur2Args {
    #[arg(long, value_parser = p_arg, allow_hyphen_values = true)]
    p: ExtendedP,
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    /// Critical value; defaults to the exact one (d ≤ 3) or a Monte Carlo one.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1_000_000)]
    reps: usize,
}

/// A vector given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSpec {
    Literal(Vec<f64>),
    /// t·1_d.
    Equalized(f64),
    /// t·√d·e₁.
    Spike(f64),
    /// (s, …, s, 0, …, 0) with k entries s.
    Block(usize, f64),
}

impl VectorSpec {
    /// Parses a literal list, a generator, or reads a whitespace/comma separated file.
    pub fn parse(s: &str) -> Result<Self> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{t}' in vector '{s}'")));
        let parts: Vec<&str> = s.split(':').collect();
        match parts[0] {
            "equalized" | "spike" => {
                let t = if parts.len() > 1 { num(parts[1])? } else { 1.0 };
                if parts.len() > 2 {
                    return Err(Error::Config(format!("bad generator '{s}'")));
                }
                return Ok(if parts[0] == "spike" { VectorSpec::Spike(t) } else { VectorSpec::Equalized(t) });
            }
            "block" => {
                if parts.len() != 3 {
                    return Err(Error::Config(format!("block generator is block:<k>:<s>, got '{s}'")));
                }
                let k = parts[1].trim().parse::<usize>().map_err(|_| Error::Config(format!("bad block size in '{s}'")))?;
                return Ok(VectorSpec::Block(k, num(parts[2])?));
            }
            _ => {}
        }
        let list = |text: &str| -> Result<Vec<f64>> {
            text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(num).collect()
        };
        match list(s) {
            Ok(v) if !v.is_empty() => Ok(VectorSpec::Literal(v)),
            _ if Path::new(s).is_file() => {
                let text = std::fs::read_to_string(s).map_err(|e| Error::Config(format!("cannot read '{s}': {e}")))?;
                Ok(VectorSpec::Literal(list(&text)?))
            }
            _ => Err(Error::Config(format!("'{s}' is neither a vector, a generator nor a readable file"))),
        }
    }

    /// The vector in dimension d (required for generators, checked for literals).
    pub fn at(&self, d: Option<usize>) -> Result<Vec<f64>> {
        if let VectorSpec::Literal(v) = self {
            return match d {
                Some(d) if d != v.len() => Err(Error::Config(format!("vector has {} entries but --d is {d}", v.len()))),
                _ => Ok(v.clone()),
            };
        }
        let d = d.ok_or_else(|| Error::Config("generators need --d".into()))?;
        if d == 0 {
            return Err(Error::domain("dimension d must be ≥ 1"));
        }
        Ok(match *self {
            VectorSpec::Equalized(t) => vec![t; d],
            VectorSpec::Spike(t) => {
                let mut v = vec![0.0; d];
                v[0] = t * (d as f64).sqrt();
                v
            }
            VectorSpec::Block(k, s) => {
                if k > d {
                    return Err(Error::domain(format!("block size {k} exceeds d = {d}")));
                }
                let mut v = vec![0.0; d];
                v[..k].iter_mut().for_each(|x| *x = s);
                v
            }
            VectorSpec::Literal(_) => unreachable!(),
        })
    }
}

/// Formats with 12 significant digits; integral values print without a fraction.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == x.trunc() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: String| if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if (-5..15).contains(&exp) {
        trim(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

// Rounds every float to 12 significant digits.
fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            fmt_num(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_num(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => serde_json::to_string(v).unwrap_or_default(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), csv_cell(other))),
    }
}

/// CSV rendering: a `rows` array becomes one line per row, anything else one flattened line.
fn to_csv(result: &Value) -> String {
    let rows: Vec<&Value> = match result.get("rows") {
        Some(Value::Array(rows)) => rows.iter().collect(),
        _ => vec![result],
    };
    let mut lines = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        if i == 0 {
            lines.push(cells.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join(","));
        }
        lines.push(cells.into_iter().map(|c| c.1).collect::<Vec<_>>().join(","));
    }
    lines.join("\n") + "\n"
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => 2,
        Error::Infeasible { .. } => 3,
        Error::Accuracy { .. } | Error::Bracket { .. } | Error::Indeterminate { .. } => 4,
        Error::Config(_) => 64,
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize to JSON")
}

fn parse_probes(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad probe dimension '{t}'")))).collect()
}

fn mc_crit(p: ExtendedP, d: usize, alpha: f64, method: Method, reps: usize, seed: u64) -> Result<ptest::CriticalValue> {
    let m = match method {
        Method::Asymptotic => CritMethod::Asymptotic,
        Method::Mc => CritMethod::MonteCarlo { reps, seed },
    };
    ptest::critical_value(p, d, alpha, m)
}

fn execute(cmd: &Command, seed: u64) -> Result<Value> {
    match cmd {
        Command::Critval(a) => Ok(to_json(&mc_crit(a.p, a.d, a.alpha, a.method, a.reps, seed)?)),
        Command::Power(a) => {
            let theta = VectorSpec::parse(&a.theta)?.at(a.d)?;
            if !(a.n >= 0.0) {
                return Err(Error::domain(format!("n must be ≥ 0, got {}", a.n)));
            }
            let d = theta.len();
            let shift = ShiftVector::new(theta.iter().map(|x| a.n.sqrt() * x).collect())?;
            let asymptotic = ptest::power_asymptotic(a.p, d, a.alpha, &shift)?;
            let mut out = json!({ "d": d, "asymptotic_power": asymptotic });
            if a.reps > 0 {
                let c = mc_crit(a.p, d, a.alpha, a.crit, a.reps, seed)?;
                let emp = mc::empirical_power(a.p, d, shift.entries(), c.value, a.reps, &RngStream::new(seed, 1))?;
                out["critical_value"] = to_json(&c);
                out["empirical_power"] = to_json(&emp);
            }
            Ok(out)
        }
        Command::Samplesize(a) => {
            let theta = VectorSpec::parse(&a.theta)?.at(a.d)?;
            let plan = if a.raw {
                TestPlan::with_vector(a.p, a.alpha, a.beta, theta)?
            } else {
                TestPlan::with_direction(a.p, a.alpha, a.beta, theta)?
            };
            let row = plan.row()?;
            let s = ptest::sample_size_with_row(&plan, &row)?;
            Ok(json!({ "n": s.n, "t": s.t, "power": s.power, "d": plan.d(), "d0": plan.d0(), "regime": to_json(&row.regime), "k": row.k }))
        }
        Command::Feasible(a) => {
            let u = VectorSpec::parse(&a.u)?.at(a.d)?;
            let d = u.len();
            let d0 = u.iter().filter(|&&x| x == 0.0).count();
            let row = regime_row(a.p, a.alpha, a.beta, d)?;
            let f = ptest::feasibility_with_row(&row, d0, a.slack)?;
            let threshold = ptest::feasibility_threshold(&row);
            match f {
                Feasibility::Feasible => Ok(json!({ "feasible": true, "d": d, "d0": d0, "threshold": threshold })),
                Feasibility::Infeasible { threshold, d0 } => Err(Error::Infeasible { threshold, d0 }),
            }
        }
        Command::Are(a) => {
            let spec = VectorSpec::parse(&a.u)?;
            if matches!(spec, VectorSpec::Literal(_)) {
                return Err(Error::Config("are needs a direction family (equalized, spike or block:k:s), not a fixed vector".into()));
            }
            let probes = parse_probes(&a.probes)?;
            let seq = DirectionSequence::normalized(a.u.clone(), move |d| spec.at(Some(d)).unwrap_or_else(|_| vec![f64::NAN; d]), probes)?;
            let verdict = are::classify_are_with_band(a.p, &seq, a.alpha, a.beta, a.band)?;
            Ok(to_json(&verdict))
        }
        Command::AreFinite(a) => {
            let u = VectorSpec::parse(&a.u)?.at(a.d)?;
            let r = are::are_finite(a.p, &u, a.alpha, a.beta, &Quadrature::default())?;
            Ok(to_json(&r))
        }
        Command::ApCurve(a) => {
            let mut ps: Vec<ExtendedP> = are::ap::grid(a.from, a.to, a.step).into_iter().map(ExtendedP::new).collect();
            if ps.is_empty() {
                return Err(Error::Config(format!("empty grid from {} to {} step {}", a.from, a.to, a.step)));
            }
            if !a.no_ends {
                if a.from > -0.5 {
                    ps.insert(0, ExtendedP::Finite(-0.5));
                }
                ps.push(ExtendedP::PosInf);
            }
            let rows: Vec<Value> = are::ap_curve(&ps)
                .into_iter()
                .map(|pt| {
                    let mut r = Map::new();
                    r.insert("p".into(), to_json(&pt.p));
                    r.insert("a_p".into(), json!(pt.a));
                    if a.psi {
                        r.insert("psi_p4".into(), json!(pt.psi_p));
                        r.insert("psi_a".into(), json!(pt.psi_a));
                    }
                    Value::Object(r)
                })
                .collect();
            Ok(json!({ "rows": rows }))
        }
        Command::VerifyAp(a) => {
            let grid = are::ap::grid(a.from, a.to, a.step);
            Ok(to_json(&are::verify_ap_bound(&grid)))
        }
        Command::Simulate(a) => {
            let theta = VectorSpec::parse(&a.theta)?.at(a.d)?;
            let d = theta.len();
            let c = mc_crit(a.p, d, a.alpha, a.crit, a.reps, seed)?;
            let emp = mc::empirical_power(a.p, d, &theta, c.value, a.reps, &RngStream::new(seed, 1))?;
            let predicted = ShiftVector::new(theta.clone()).and_then(|s| ptest::power_asymptotic(a.p, d, a.alpha, &s)).ok();
            Ok(json!({ "d": d, "critical_value": to_json(&c), "rejection_rate": to_json(&emp), "asymptotic_power": predicted }))
        }
        Command::Ks(a) => Ok(to_json(&mc::ks_null_limit(a.p, a.d, a.reps, &RngStream::new(seed, 0))?)),
        Command::Schur2Check(a) => {
            let v = VectorSpec::parse(&a.v)?.at(None)?;
            let w = VectorSpec::parse(&a.w)?.at(Some(v.len()))?;
            let c = match a.c {
                Some(c) => c,
                None if v.len() <= are::finite::MAX_FINITE_D => critical_value_exact(a.p, v.len(), a.alpha, &Quadrature::default())?,
                None => mc_crit(a.p, v.len(), a.alpha, Method::Mc, a.reps, seed)?.value,
            };
            let r = mc::schur2_check(a.p, c, &v, &w, a.reps, &RngStream::new(seed, 1))?;
            let mut out = to_json(&r);
            out["c"] = json!(c);
            Ok(out)
        }
        Command::Version => Ok(json!({ "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") })),
    }
}

fn command_config(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Critval(a) => ("critval", to_json(a)),
        Command::Power(a) => ("power", to_json(a)),
        Command::Samplesize(a) => ("samplesize", to_json(a)),
        Command::Feasible(a) => ("feasible", to_json(a)),
        Command::Are(a) => ("are", to_json(a)),
        Command::AreFinite(a) => ("are-finite", to_json(a)),
        Command::ApCurve(a) => ("ap-curve", to_json(a)),
        Command::VerifyAp(a) => ("verify-ap", to_json(a)),
        Command::Simulate(a) => ("simulate", to_json(a)),
        Command::Ks(a) => ("ks", to_json(a)),
        Command::Schur2Check(a) => ("schur2-check", to_json(a)),
        Command::Version => ("version", json!({})),
    }
}

/// Rebuilds an argv (without the program name) from an echoed `config` object.
pub fn config_to_argv(config: &Value) -> Vec<String> {
    let mut argv = Vec::new();
    if let Some(c) = config.get("command").and_then(Value::as_str) {
        argv.push(c.to_string());
    }
    let mut push = |k: &str, v: &Value| match v {
        Value::Bool(true) => argv.push(format!("--{k}")),
        Value::Bool(false) | Value::Null => {}
        Value::String(s) => argv.push(format!("--{k}={s}")),
        other => argv.push(format!("--{k}={other}")),
    };
    for key in ["format", "threads", "seed"] {
        if let Some(v) = config.get(key) {
            push(key, v);
        }
    }
    if let Some(Value::Object(args)) = config.get("args") {
        for (k, v) in args {
            push(k, v);
        }
    }
    argv
}

/// Runs the CLI on `argv` (including the program name), writing to the given streams.
pub fn run_with_io<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    64
                }
            };
        }
    };
    let threads = match cli.threads {
        Some(t) => t,
        None => match std::env::var("PMEAN_THREADS") {
            Ok(s) => match s.trim().parse::<usize>() {
                Ok(t) => t,
                Err(_) => {
                    let _ = writeln!(err, "configuration error: PMEAN_THREADS='{s}' is not a count");
                    return 64;
                }
            },
            Err(_) => 0,
        },
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "configuration error: cannot start {threads} threads: {e}");
            return 64;
        }
    };
    let (name, args) = command_config(&cli.command);
    let config = json!({
        "command": name,
        "format": to_json(&cli.format),
        "threads": threads,
        "seed": cli.seed,
        "args": args,
    });
    let start = Instant::now();
    let outcome = pool.install(|| execute(&cli.command, cli.seed));
    let diagnostics = json!({
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        "worker_threads": pool.current_num_threads(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    match outcome {
        Ok(result) => {
            let result = round_value(result);
            let text = match cli.format {
                Format::Json => {
                    let doc = json!({ "config": config, "result": result, "diagnostics": diagnostics });
                    serde_json::to_string_pretty(&doc).expect("JSON output") + "\n"
                }
                Format::Csv => to_csv(&result),
            };
            let _ = out.write_all(text.as_bytes());
            let _ = writeln!(err, "{name}: done in {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
            0
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.format == Format::Json {
                let mut diag = diagnostics;
                diag["error"] = json!(e.to_string());
                diag["exit_code"] = json!(code);
                let doc = json!({ "config": config, "result": Value::Null, "diagnostics": diag });
                let _ = out.write_all((serde_json::to_string_pretty(&doc).expect("JSON output") + "\n").as_bytes());
            }
            let _ = writeln!(err, "{name}: {e}");
            code
        }
    }
}

/// Runs the CLI with standard output and standard error; returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(2.0 / std::f64::consts::PI), "0.636619772368");
        assert_eq!(fmt_num(-0.49), "-0.49");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(123456.789012345), "123456.789012");
    }

    #[test]
    fn vector_specs() {
        assert_eq!(VectorSpec::parse("1,0,-2").unwrap().at(None).unwrap(), vec![1.0, 0.0, -2.0]);
        assert_eq!(VectorSpec::parse("equalized:0.5").unwrap().at(Some(3)).unwrap(), vec![0.5; 3]);
        assert_eq!(VectorSpec::parse("spike:1").unwrap().at(Some(4)).unwrap(), vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(VectorSpec::parse("block:2:3").unwrap().at(Some(3)).unwrap(), vec![3.0, 3.0, 0.0]);
        assert!(VectorSpec::parse("equalized:1").unwrap().at(None).is_err());
        assert!(VectorSpec::parse("1,2").unwrap().at(Some(3)).is_err());
        assert!(VectorSpec::parse("no/such/file").is_err());
    }

    #[test]
    fn csv_rows() {
        let v = json!({ "rows": [ { "p": 2.0, "a_p": 1.0 }, { "p": 0.0, "a_p": 0.5 } ] });
        assert_eq!(to_csv(&v), "p,a_p\n2,1\n0,0.5\n");
        let s = json!({ "n": 47, "inner": { "x": 0.25 } });
        assert_eq!(to_csv(&s), "n,inner.x\n47,0.25\n");
    }
}
