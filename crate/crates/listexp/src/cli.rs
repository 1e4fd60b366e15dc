//! Command-line surface: configuration ingestion, dispatch to the solver
//! and simulator modules, and result serialization.
//!
//! Exit codes: 0 on success, 2 on validation or input errors, 3 when a
//! solver reports non-convergence or a divergent quantity. Identical
//! invocations produce byte-identical output; there are no timestamps.

use crate::channel::{Dmc, InputDistribution};
use crate::gaussian::GaussianSpec;
use crate::records::{CurveDocument, CurvePoint, ExponentCurve, TOOL_VERSION};
use crate::sim::{Decoder, EngineChoice, ListMode, SimConfig};
use crate::{csiszar, expurgated, gallager, gaussian, guessing, records, sim};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Parses and runs a full command line (first element is the program
/// name) and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests arrive here with exit code 0
            let code = i32::from(e.use_stderr()) * 2;
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence(_) | Error::Divergent(_) => 3,
                _ => 2,
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "listexp",
    version,
    about = "Error exponents for list decoding, with a Monte-Carlo simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random-coding, sphere-packing and fixed-composition exponent curves.
    Exponents(ExponentsArgs),
    /// Expurgated exponent curves (Gallager or constrained tuple-distance form).
    Expurgated(ExpurgatedArgs),
    /// Gaussian-channel expurgated exponent curves in closed form.
    Gaussian(GaussianArgs),
    /// Guessing-moment exponents of the exceeder count, over a grid of orders.
    Guessing(GuessingArgs),
    /// Monte-Carlo simulation of fixed-composition list decoding.
    Simulate(SimulateArgs),
    /// Exact list-error probability by exhaustive enumeration (small instances).
    Oracle(OracleArgs),
    /// Validate a result file previously emitted by this tool.
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct EmitArgs {
    /// Convert rates and exponents to bits on input and output (internal
    /// unit is nats).
    #[arg(long)]
    bits: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExponentMethod {
    RandomCoding,
    SpherePacking,
    SpherePackingCsiszar,
    FixedComposition,
    ExponentialList,
}

impl ExponentMethod {
    fn name(self) -> &'static str {
        match self {
            ExponentMethod::RandomCoding => "random-coding",
            ExponentMethod::SpherePacking => "sphere-packing",
            ExponentMethod::SpherePackingCsiszar => "sphere-packing-csiszar",
            ExponentMethod::FixedComposition => "fixed-composition",
            ExponentMethod::ExponentialList => "exponential-list",
        }
    }
}

#[derive(Args)]
struct ExponentsArgs {
    /// Channel transition matrix as a JSON file.
    #[arg(long)]
    channel: PathBuf,
    /// Rate grid start:stop:points (strictly increasing, points >= 2).
    #[arg(long)]
    rate: String,
    #[arg(long, value_enum, default_value_t = ExponentMethod::RandomCoding)]
    method: ExponentMethod,
    /// List size L (fixed-list methods only).
    #[arg(long, conflicts_with = "lambda")]
    list_size: Option<u32>,
    /// List exponent lambda for the exponential-list regime, in the rate unit.
    #[arg(long)]
    lambda: Option<f64>,
    /// Input distribution: uniform, optimize, or a JSON file path.
    #[arg(long, default_value = "uniform")]
    q: String,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpurgatedMethod {
    Gallager,
    Ckm,
}

#[derive(Args)]
struct ExpurgatedArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    rate: String,
    #[arg(long, value_enum)]
    method: ExpurgatedMethod,
    #[arg(long, default_value_t = 1)]
    list_size: u32,
    #[arg(long, default_value = "uniform")]
    q: String,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct GaussianArgs {
    /// Codeword power constraint S.
    #[arg(long)]
    power: f64,
    /// Noise variance sigma^2.
    #[arg(long)]
    noise_var: f64,
    #[arg(long, default_value_t = 1)]
    list_size: u32,
    #[arg(long)]
    rate: String,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GuessingMethod {
    Lower,
    Conjectured,
}

#[derive(Args)]
struct GuessingArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Fixed coding rate.
    #[arg(long)]
    rate: f64,
    /// Moment-order grid start:stop:points (dimensionless, never converted).
    #[arg(long)]
    rho: String,
    /// The conjectured variant is labeled as such and is not an
    /// established bound.
    #[arg(long, value_enum, default_value_t = GuessingMethod::Lower)]
    method: GuessingMethod,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Block length.
    #[arg(long)]
    n: usize,
    /// Nominal rate; the message count is ceil(e^{nR}) + 1.
    #[arg(long)]
    rate: f64,
    #[arg(long, conflicts_with = "lambda")]
    list_size: Option<u32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = DecoderArg::Ml)]
    decoder: DecoderArg,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Moment orders for exceeder statistics; repeatable.
    #[arg(long = "rho")]
    rho: Vec<f64>,
    /// Input distribution: uniform or a JSON file path.
    #[arg(long, default_value = "uniform")]
    q: String,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Interpret --rate and --lambda in bits.
    #[arg(long)]
    bits: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Ml,
    Mmi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Literal,
    Fast,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    list_size: u32,
    #[arg(long, value_enum, default_value_t = DecoderArg::Ml)]
    decoder: DecoderArg,
    #[arg(long, default_value = "uniform")]
    q: String,
    #[arg(long)]
    bits: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// A JSON record or CSV curve emitted by this tool.
    input: PathBuf,
}

/// Input-distribution selector shared by the curve subcommands.
enum QMode {
    Uniform(InputDistribution),
    File(InputDistribution),
    Optimize,
}

impl QMode {
    fn parse(arg: &str, input_size: usize, allow_optimize: bool) -> Result<Self> {
        match arg {
            "uniform" => Ok(QMode::Uniform(InputDistribution::uniform(input_size))),
            "optimize" if allow_optimize => Ok(QMode::Optimize),
            "optimize" => Err(Error::OutOfRange(
                "this subcommand needs a concrete input distribution; \
                 pass uniform or a JSON file"
                    .into(),
            )),
            path => {
                let text = std::fs::read_to_string(path)?;
                let q = InputDistribution::from_json_str(&text)?;
                if q.len() != input_size {
                    return Err(Error::Dimension(format!(
                        "distribution has {} symbols, channel input has {input_size}",
                        q.len()
                    )));
                }
                Ok(QMode::File(q))
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            QMode::Uniform(_) => "uniform",
            QMode::File(_) => "file",
            QMode::Optimize => "optimize",
        }
    }

    /// Concrete distribution, or `None` for per-point optimization.
    fn fixed(&self) -> Option<&InputDistribution> {
        match self {
            QMode::Uniform(q) | QMode::File(q) => Some(q),
            QMode::Optimize => None,
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Exponents(a) => run_exponents(a),
        Command::Expurgated(a) => run_expurgated(a),
        Command::Gaussian(a) => run_gaussian(a),
        Command::Guessing(a) => run_guessing(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Check(a) => run_check(a),
    }
}

fn load_channel(path: &Path) -> Result<Dmc> {
    let text = std::fs::read_to_string(path)?;
    Dmc::from_json_str(&text)
}

/// Parses "start:stop:points" into an evenly spaced grid; `scale`
/// converts the endpoints into nats.
fn parse_grid(s: &str, scale: f64) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::OutOfRange(format!(
            "grid must be start:stop:points, got {s}"
        )));
    }
    let bad = |what: &str, v: &str| Error::OutOfRange(format!("bad grid {what}: {v}"));
    let start: f64 = parts[0].trim().parse().map_err(|_| bad("start", parts[0]))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad("stop", parts[1]))?;
    let points: usize = parts[2].trim().parse().map_err(|_| bad("points", parts[2]))?;
    if !(start < stop) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::OutOfRange(format!(
            "grid start {start} must be below stop {stop}"
        )));
    }
    if points < 2 {
        return Err(Error::OutOfRange("grid needs at least 2 points".into()));
    }
    Ok((0..points)
        .map(|i| scale * (start + (stop - start) * i as f64 / (points - 1) as f64))
        .collect())
}

fn rate_scale(bits: bool) -> f64 {
    if bits {
        std::f64::consts::LN_2
    } else {
        1.0
    }
}

fn channel_echo(path: &Path, w: &Dmc) -> Value {
    json!({
        "path": path.display().to_string(),
        "input_size": w.input_size(),
        "output_size": w.output_size(),
        "matrix": w.rows(),
    })
}

fn emit_curve(emit: &EmitArgs, config: Value, points: Vec<CurvePoint>) -> Result<()> {
    let curve = ExponentCurve::new(points)?;
    let text = match emit.format {
        OutputFormat::Csv => curve.to_csv(emit.bits),
        OutputFormat::Json => CurveDocument::new(config, curve, emit.bits).to_json_string(),
    };
    write_text(emit.output.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_exponents(a: ExponentsArgs) -> Result<()> {
    let w = load_channel(&a.channel)?;
    let q = QMode::parse(&a.q, w.input_size(), true)?;
    let scale = rate_scale(a.emit.bits);
    let rates = parse_grid(&a.rate, scale)?;
    let method = a.method;

    let list_free = matches!(
        method,
        ExponentMethod::SpherePacking | ExponentMethod::SpherePackingCsiszar
    );
    if list_free && a.list_size.is_some() {
        return Err(Error::OutOfRange(format!(
            "{} does not take a list size",
            method.name()
        )));
    }
    if method == ExponentMethod::ExponentialList {
        if a.lambda.is_none() {
            return Err(Error::OutOfRange(
                "exponential-list requires --lambda".into(),
            ));
        }
    } else if a.lambda.is_some() {
        return Err(Error::OutOfRange(format!(
            "--lambda only applies to exponential-list, not {}",
            method.name()
        )));
    }
    let l = a.list_size.unwrap_or(1);
    let lambda = a.lambda.map(|v| v * scale);

    let mut points = Vec::with_capacity(rates.len());
    for &rate in &rates {
        let (value, converged) = match method {
            ExponentMethod::RandomCoding => {
                let r = gallager::random_coding_exponent(rate, l, &w, q.fixed());
                (r.value, !r.divergent)
            }
            ExponentMethod::SpherePacking => {
                let r = gallager::sphere_packing_exponent(rate, &w, q.fixed());
                if r.divergent {
                    return Err(Error::Divergent(format!(
                        "sphere-packing exponent is infinite at rate {rate}; raise the grid start"
                    )));
                }
                (r.value, true)
            }
            ExponentMethod::SpherePackingCsiszar => {
                let r = match q.fixed() {
                    Some(q) => csiszar::sphere_packing_csiszar(rate, q, &w),
                    None => csiszar::sphere_packing_csiszar_optimized(rate, &w).1,
                };
                if r.divergent {
                    return Err(Error::Divergent(format!(
                        "sphere-packing exponent is infinite at rate {rate}; raise the grid start"
                    )));
                }
                (r.value, r.converged)
            }
            ExponentMethod::FixedComposition => match q.fixed() {
                Some(q) => {
                    let query = csiszar::FixedCompQuery {
                        rate,
                        l,
                        q: q.clone(),
                        w: w.clone(),
                    };
                    let r = csiszar::fixed_composition_exponent(&query);
                    (r.value, r.converged)
                }
                None => {
                    let (_, r) = csiszar::fixed_composition_exponent_optimized(rate, l, &w);
                    (r.value, r.converged)
                }
            },
            ExponentMethod::ExponentialList => {
                let r = csiszar::exponential_list_exponent(rate, lambda.unwrap(), &w, q.fixed())?;
                if r.divergent {
                    return Err(Error::Divergent(format!(
                        "exponential-list exponent is infinite at rate {rate}"
                    )));
                }
                (r.value, r.converged)
            }
        };
        points.push(CurvePoint {
            rate_nats: rate,
            exponent_nats: value,
            method: method.name().into(),
            l_or_lambda: match method {
                ExponentMethod::ExponentialList => lambda.unwrap(),
                _ if list_free => 0.0,
                _ => l as f64,
            },
            q_mode: q.label().into(),
            converged,
        });
    }

    let mut config = json!({
        "subcommand": "exponents",
        "method": method.name(),
        "channel": channel_echo(&a.channel, &w),
        "rate_grid": a.rate,
        "q_mode": q.label(),
    });
    if let Some(lambda) = lambda {
        config["lambda_nats"] = json!(lambda);
    } else if !list_free {
        config["list_size"] = json!(l);
    }
    emit_curve(&a.emit, config, points)
}

fn run_expurgated(a: ExpurgatedArgs) -> Result<()> {
    let w = load_channel(&a.channel)?;
    let q = QMode::parse(&a.q, w.input_size(), true)?;
    let scale = rate_scale(a.emit.bits);
    let rates = parse_grid(&a.rate, scale)?;
    let (method_name, mut points) = match a.method {
        ExpurgatedMethod::Gallager => ("expurgated-gallager", Vec::new()),
        ExpurgatedMethod::Ckm => ("expurgated-ckm", Vec::new()),
    };
    for &rate in &rates {
        let (value, converged) = match a.method {
            ExpurgatedMethod::Gallager => {
                let r = gallager::gallager_expurgated(rate, a.list_size, &w, q.fixed())?;
                if r.divergent {
                    return Err(Error::Divergent(format!(
                        "expurgated exponent is infinite at rate {rate}"
                    )));
                }
                (r.value, true)
            }
            ExpurgatedMethod::Ckm => {
                let r = match q.fixed() {
                    Some(q) => expurgated::ckm_exponent(rate, a.list_size, &w, q)?,
                    None => expurgated::ckm_exponent_optimized(rate, a.list_size, &w)?.1,
                };
                (r.value, r.converged)
            }
        };
        points.push(CurvePoint {
            rate_nats: rate,
            exponent_nats: value,
            method: method_name.into(),
            l_or_lambda: a.list_size as f64,
            q_mode: q.label().into(),
            converged,
        });
    }
    let config = json!({
        "subcommand": "expurgated",
        "method": method_name,
        "channel": channel_echo(&a.channel, &w),
        "rate_grid": a.rate,
        "list_size": a.list_size,
        "q_mode": q.label(),
    });
    emit_curve(&a.emit, config, points)
}

fn run_gaussian(a: GaussianArgs) -> Result<()> {
    let spec = GaussianSpec::new(a.power, a.noise_var)?;
    let scale = rate_scale(a.emit.bits);
    let rates = parse_grid(&a.rate, scale)?;
    let mut points = Vec::with_capacity(rates.len());
    for &rate in &rates {
        let value = gaussian::gaussian_ckm_exponent(rate, a.list_size, &spec)?;
        points.push(CurvePoint {
            rate_nats: rate,
            exponent_nats: value,
            method: "gaussian-ckm".into(),
            l_or_lambda: a.list_size as f64,
            // the minimizing correlation structure is symmetric; there is
            // no input distribution to choose
            q_mode: "symmetric".into(),
            converged: true,
        });
    }
    let config = json!({
        "subcommand": "gaussian",
        "power": a.power,
        "noise_var": a.noise_var,
        "list_size": a.list_size,
        "rate_grid": a.rate,
    });
    emit_curve(&a.emit, config, points)
}

fn run_guessing(a: GuessingArgs) -> Result<()> {
    let w = load_channel(&a.channel)?;
    let scale = rate_scale(a.emit.bits);
    let rate = a.rate * scale;
    let rhos = parse_grid(&a.rho, 1.0)?;
    let method_name = match a.method {
        GuessingMethod::Lower => "guessing-lower",
        GuessingMethod::Conjectured => "guessing-conjectured",
    };
    let mut points = Vec::with_capacity(rhos.len());
    for &rho in &rhos {
        let query = guessing::GuessingQuery::new(rho, rate, w.clone())?;
        let r = match a.method {
            GuessingMethod::Lower => guessing::guessing_moment_lower_exponent(&query)?,
            GuessingMethod::Conjectured => guessing::guessing_moment_conjectured_exponent(&query)?,
        };
        points.push(CurvePoint {
            rate_nats: rate,
            exponent_nats: r.value,
            method: method_name.into(),
            l_or_lambda: rho,
            q_mode: "optimize".into(),
            converged: true,
        });
    }
    let config = json!({
        "subcommand": "guessing",
        "method": method_name,
        "channel": channel_echo(&a.channel, &w),
        "rate_nats": rate,
        "rho_grid": a.rho,
        "conjecture": a.method == GuessingMethod::Conjectured,
    });
    emit_curve(&a.emit, config, points)
}

fn sim_config_from_args(
    channel: &Path,
    n: usize,
    rate: f64,
    list_size: Option<u32>,
    lambda: Option<f64>,
    decoder: DecoderArg,
    trials: u64,
    seed: u64,
    q_arg: &str,
    bits: bool,
) -> Result<(SimConfig, Value)> {
    let w = load_channel(channel)?;
    let q = QMode::parse(q_arg, w.input_size(), false)?;
    let scale = rate_scale(bits);
    let rate = rate * scale;
    let list_mode = match (list_size, lambda) {
        (_, None) => ListMode::Fixed(list_size.unwrap_or(1)),
        (None, Some(lam)) => ListMode::Exponential(lam * scale),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    let decoder = match decoder {
        DecoderArg::Ml => Decoder::Ml,
        DecoderArg::Mmi => Decoder::Mmi,
    };
    let cfg = SimConfig {
        n,
        rate,
        list_mode,
        q: q.fixed().expect("optimize rejected above").clone(),
        w: w.clone(),
        decoder,
        trials,
        master_seed: seed,
    };
    let list_mode_echo = match cfg.list_mode {
        ListMode::Fixed(l) => json!({ "fixed": l }),
        ListMode::Exponential(lam) => json!({ "exponential_nats": lam }),
    };
    let config = json!({
        "n": n,
        "rate_nats": rate,
        "list_mode": list_mode_echo,
        "decoder": decoder.name(),
        "trials": trials,
        "seed": seed,
        "q_mode": q.label(),
        "q": cfg.q.probs(),
        "channel": channel_echo(channel, &w),
    });
    Ok((cfg, config))
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    for &rho in &a.rho {
        if !(rho > 0.0) {
            return Err(Error::OutOfRange(format!(
                "moment order {rho} must be positive"
            )));
        }
    }
    let (cfg, mut config) = sim_config_from_args(
        &a.channel,
        a.n,
        a.rate,
        a.list_size,
        a.lambda,
        a.decoder,
        a.trials,
        a.seed,
        &a.q,
        a.bits,
    )?;
    let engine = match a.engine {
        EngineArg::Auto => EngineChoice::Auto,
        EngineArg::Literal => EngineChoice::Literal,
        EngineArg::Fast => EngineChoice::Fast,
    };
    config["subcommand"] = json!("simulate");
    config["rho"] = json!(a.rho);
    let result = sim::run_simulation(&cfg, &a.rho, engine)?;
    let doc = json!({
        "kind": "simulation",
        "version": TOOL_VERSION,
        "units": "nats",
        "config": config,
        "result": serde_json::to_value(&result)?,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_text(a.output.as_deref(), &text)
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    // trials and seed are irrelevant to exhaustive enumeration but the
    // config type requires valid values
    let (cfg, mut config) = sim_config_from_args(
        &a.channel,
        a.n,
        a.rate,
        Some(a.list_size),
        None,
        a.decoder,
        1,
        0,
        &a.q,
        a.bits,
    )?;
    config["subcommand"] = json!("oracle");
    let config = match config {
        Value::Object(mut m) => {
            m.remove("trials");
            m.remove("seed");
            Value::Object(m)
        }
        other => other,
    };
    let exact = sim::exact_list_error(&cfg)?;
    let doc = json!({
        "kind": "oracle",
        "version": TOOL_VERSION,
        "config": config,
        "result": {
            "exact_error": exact,
            "message_count": cfg.message_count(),
            "list_size": cfg.list_size()?,
            "effective_rate_nats": cfg.effective_rate(),
        },
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_text(a.output.as_deref(), &text)
}

fn run_check(a: CheckArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input)?;
    let kind = if text.trim_start().starts_with('{') {
        records::check_document(&text)?
    } else {
        ExponentCurve::from_csv(&text)?;
        "curve-csv".to_string()
    };
    println!("ok: {kind}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_bsc(dir: &Path) -> PathBuf {
        let path = dir.join("bsc01.json");
        fs::write(&path, Dmc::bsc(0.1).unwrap().to_json_string()).unwrap();
        path
    }

    fn run_vec(args: &[&str]) -> i32 {
        run(args.iter().map(|s| s.to_string()))
    }

    #[test]
    fn exponents_csv_has_requested_rows_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        let out = dir.path().join("curve.csv");
        let code = run_vec(&[
            "listexp",
            "exponents",
            "--channel",
            ch.to_str().unwrap(),
            "--rate",
            "0.05:0.6:12",
            "--list-size",
            "2",
            "--q",
            "uniform",
            "--format",
            "csv",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(&out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 13, "header plus 12 rows");
        assert_eq!(
            lines[0],
            "rate_nats,exponent_nats,method,L_or_lambda,q_mode,converged"
        );
        let rates: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(rates.windows(2).all(|p| p[0] < p[1]));
        assert!((rates[0] - 0.05).abs() < 1e-12);
        assert!((rates[11] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn json_output_round_trips_through_check() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        let out = dir.path().join("curve.json");
        let code = run_vec(&[
            "listexp",
            "exponents",
            "--channel",
            ch.to_str().unwrap(),
            "--rate",
            "0.1:0.3:3",
            "--method",
            "sphere-packing",
            "--output",
            out.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        assert_eq!(run_vec(&["listexp", "check", out.to_str().unwrap()]), 0);
    }

    #[test]
    fn simulate_is_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        let out1 = dir.path().join("a.json");
        let out2 = dir.path().join("b.json");
        for out in [&out1, &out2] {
            let code = run_vec(&[
                "listexp",
                "simulate",
                "--channel",
                ch.to_str().unwrap(),
                "--n",
                "6",
                "--rate",
                "0.2",
                "--list-size",
                "1",
                "--trials",
                "5000",
                "--seed",
                "7",
                "--output",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
        }
        let a = fs::read(&out1).unwrap();
        let b = fs::read(&out2).unwrap();
        assert_eq!(a, b);
        assert_eq!(run_vec(&["listexp", "check", out1.to_str().unwrap()]), 0);
    }

    #[test]
    fn gaussian_rate_zero_row_matches_closed_form() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("g.csv");
        let code = run_vec(&[
            "listexp",
            "gaussian",
            "--power",
            "1",
            "--noise-var",
            "1",
            "--list-size",
            "1",
            "--rate",
            "0:1:11",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(&out).unwrap();
        let first = text.lines().nth(1).unwrap();
        let cols: Vec<&str> = first.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), 0.0);
        assert!((cols[1].parse::<f64>().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn validation_failures_exit_2_and_divergence_exits_3() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        // malformed grid
        assert_eq!(
            run_vec(&[
                "listexp",
                "exponents",
                "--channel",
                ch.to_str().unwrap(),
                "--rate",
                "0.6:0.05:12",
            ]),
            2
        );
        // unknown flag
        assert_eq!(
            run_vec(&["listexp", "exponents", "--nonsense"]),
            2
        );
        // missing channel file
        assert_eq!(
            run_vec(&[
                "listexp",
                "exponents",
                "--channel",
                dir.path().join("missing.json").to_str().unwrap(),
                "--rate",
                "0.1:0.2:2",
            ]),
            2
        );
        // sphere-packing is infinite below the zero-error capacity, which
        // is ln 2 for a noiseless channel (a BSC's is zero, so the BSC
        // exponent stays finite at every positive rate)
        let noiseless = dir.path().join("noiseless.json");
        fs::write(
            &noiseless,
            Dmc::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
                .unwrap()
                .to_json_string(),
        )
        .unwrap();
        assert_eq!(
            run_vec(&[
                "listexp",
                "exponents",
                "--channel",
                noiseless.to_str().unwrap(),
                "--rate",
                "0.1:0.2:2",
                "--method",
                "sphere-packing",
            ]),
            3
        );
    }

    #[test]
    fn guessing_and_expurgated_and_oracle_produce_valid_records() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        let out = dir.path().join("r.json");
        for args in [
            vec![
                "guessing",
                "--channel",
                ch.to_str().unwrap(),
                "--rate",
                "0.2",
                "--rho",
                "0.5:2:4",
                "--format",
                "json",
            ],
            vec![
                "expurgated",
                "--channel",
                ch.to_str().unwrap(),
                "--rate",
                "0.02:0.1:3",
                "--method",
                "ckm",
                "--format",
                "json",
            ],
            vec![
                "oracle",
                "--channel",
                ch.to_str().unwrap(),
                "--n",
                "6",
                "--rate",
                "0.18",
            ],
        ] {
            let mut full = vec!["listexp"];
            full.extend(args);
            full.extend(["--output", out.to_str().unwrap()]);
            assert_eq!(run_vec(&full), 0, "{full:?}");
            assert_eq!(run_vec(&["listexp", "check", out.to_str().unwrap()]), 0);
        }
    }

    #[test]
    fn bits_flag_scales_rates_on_both_sides() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write_bsc(dir.path());
        let nats = dir.path().join("n.csv");
        let bits = dir.path().join("b.csv");
        let ln2 = std::f64::consts::LN_2;
        let base = [
            "exponents",
            "--channel",
            ch.to_str().unwrap(),
            "--list-size",
            "1",
        ];
        let mut a: Vec<&str> = vec!["listexp"];
        a.extend(base);
        a.extend(["--rate", "0.1386294361119890:0.4:3", "--output"]);
        a.push(nats.to_str().unwrap());
        assert_eq!(run_vec(&a), 0);
        let mut b: Vec<&str> = vec!["listexp"];
        b.extend(base);
        b.extend(["--rate", "0.2:0.5770780163555856:3", "--bits", "--output"]);
        b.push(bits.to_str().unwrap());
        assert_eq!(run_vec(&b), 0);
        let row = |text: &str, i: usize| -> Vec<f64> {
            text.lines()
                .nth(i)
                .unwrap()
                .split(',')
                .take(2)
                .map(|v| v.parse().unwrap())
                .collect()
        };
        let tn = fs::read_to_string(&nats).unwrap();
        let tb = fs::read_to_string(&bits).unwrap();
        assert!(tb.starts_with("rate_bits,exponent_bits"));
        // same physical rate: 0.2 bits = 0.1386.. nats
        let rn = row(&tn, 1);
        let rb = row(&tb, 1);
        assert!((rn[0] - rb[0] * ln2).abs() < 1e-12);
        assert!((rn[1] - rb[1] * ln2).abs() < 1e-12);
    }
}
