//! Command-line front end.
//!
//! Every subcommand builds a JSON `results` value. The default output renders
//! it as a plain table; `--json` prints the full [`RunReport`] instead. A
//! `--config FILE` JSON object supplies flag values (keys are flag names with
//! `_` or `-`), and flags given on the command line override it.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::aggregator::{cas_mean, power_mean, Power, PowerSpec, Sense, SentimentProfile};
use crate::dataset::{
    load_csv, make_synthetic, split, GroupedDataset, LoadOptions, Synthetic, ZScore,
};
use crate::emm::{
    sweep_p, train_cover, train_psg, write_sweep_csv, CoverConfig, SubgradientMode, TrainConfig,
};
use crate::error::{Error, Result};
use crate::estimation::{
    bennett_epsilon, bracket_from_estimates, hoeffding_epsilon, nsw_hardness_bound,
    nsw_hardness_simulate, BoundMethod, BoundReport,
};
use crate::inequality::atkinson_index;
use crate::losses::{group_risks, LossKind};
use crate::rng::entropy_seed;

#[derive(Debug, Parser)]
#[command(
    name = "malfare",
    version,
    about = "Power-mean welfare and malfare: evaluation, bounds and fair training"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Print the full JSON run report instead of a table.
    #[arg(long, global = true)]
    json: bool,

    /// JSON file of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a power mean of a sentiment profile.
    Eval(EvalArgs),
    /// Train a linear model by projected subgradient descent.
    Train(TrainArgs),
    /// Train once per p and tabulate per-group risks and malfare.
    Sweep(SweepArgs),
    /// Hoeffding or Bennett confidence radii, optionally as a malfare bracket.
    Bound(BoundArgs),
    /// Sample size needed to estimate Nash welfare of a rare-success group.
    Hardness(HardnessArgs),
    /// Exhaustive malfare minimization over decision stumps.
    CoverEmm(CoverArgs),
}

/// Comma-separated reals.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct FloatList(Vec<f64>);

fn parse_floats(s: &str) -> std::result::Result<FloatList, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {t:?}"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(FloatList)
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct PowerList(Vec<Power>);

fn parse_power(s: &str) -> std::result::Result<Power, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_powers(s: &str) -> std::result::Result<PowerList, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_power)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(PowerList)
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum SenseArg {
    Welfare,
    Malfare,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum ConvexLoss {
    Hinge,
    Logistic,
    Square,
}

impl From<ConvexLoss> for LossKind {
    fn from(l: ConvexLoss) -> LossKind {
        match l {
            ConvexLoss::Hinge => LossKind::Hinge,
            ConvexLoss::Logistic => LossKind::LogisticCE,
            ConvexLoss::Square => LossKind::Square,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum AnyLoss {
    ZeroOne,
    Hinge,
    Logistic,
    Square,
}

impl From<AnyLoss> for LossKind {
    fn from(l: AnyLoss) -> LossKind {
        match l {
            AnyLoss::ZeroOne => LossKind::ZeroOne,
            AnyLoss::Hinge => LossKind::Hinge,
            AnyLoss::Logistic => LossKind::LogisticCE,
            AnyLoss::Square => LossKind::Square,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Hoeffding,
    Bennett,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    /// Nonnegative sentiment values, comma separated.
    #[arg(long, value_parser = parse_floats, allow_hyphen_values = true)]
    values: FloatList,
    /// "uniform" or a comma-separated list.
    #[arg(long, default_value = "uniform")]
    weights: String,
    /// Exponent: a decimal, "inf" or "-inf".
    #[arg(long, value_parser = parse_power, allow_hyphen_values = true)]
    p: Power,
    #[arg(long, value_enum, default_value = "malfare")]
    sense: SenseArg,
    /// Reject p outside the fair range of the chosen sense.
    #[arg(long)]
    fair: bool,
    /// Also report the additively separable form.
    #[arg(long)]
    cas: bool,
    /// Also report the Atkinson index at this inequality aversion.
    #[arg(long, allow_hyphen_values = true)]
    atkinson: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
struct DataArgs {
    /// Headered CSV file.
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    data: Option<PathBuf>,
    /// Bundled generator instead of a CSV: two-gaussians-2group,
    /// jointly-separable, conflict-1d or heterogeneous.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value = "group")]
    group: String,
    #[arg(long, default_value = "label")]
    target: String,
    /// Target value treated as the positive class.
    #[arg(long, default_value = "1")]
    positive: String,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// "freq" (dataset group weights), "uniform", or a comma-separated list.
    #[arg(long, default_value = "freq")]
    weights: String,
    /// Skip z-score standardization of CSV features.
    #[arg(long)]
    no_zscore: bool,
    /// Scale each group's risk by the inverse of its positive-label fraction.
    #[arg(long)]
    bias_weight: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
struct OptimizerArgs {
    #[arg(long, value_enum, default_value = "hinge")]
    loss: ConvexLoss,
    /// Radius of the parameter ball.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Target optimality gap.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    lambda_ell: Option<f64>,
    #[arg(long)]
    lambda_h: Option<f64>,
    #[arg(long)]
    diam: Option<f64>,
    #[arg(long, default_value_t = crate::emm::DEFAULT_MAX_ITERATIONS)]
    max_iterations: u64,
    /// Use forward differences with this step instead of the analytic
    /// subgradient.
    #[arg(long)]
    finite_difference: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
}

#[derive(Debug, Args, Serialize)]
struct TrainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    opt: OptimizerArgs,
    #[arg(long, value_parser = parse_power, default_value = "1")]
    p: Power,
    /// Write the model JSON here.
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Write the objective trace as JSON lines here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    trace_stride: u64,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    opt: OptimizerArgs,
    #[arg(long, value_parser = parse_powers, default_value = "1,2,4,8,16,32")]
    p_grid: PowerList,
    /// CSV output; a JSON mirror is written next to it with a .json
    /// extension. Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[arg(long, value_enum, default_value = "hoeffding")]
    method: MethodArg,
    /// Loss range.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Number of groups; defaults to the number of estimates.
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    delta: f64,
    /// Samples per group.
    #[arg(long)]
    m: usize,
    /// Per-group loss variances (Bennett).
    #[arg(long, value_parser = parse_floats)]
    variances: Option<FloatList>,
    /// Per-group empirical mean losses; turns the radii into a malfare bracket.
    #[arg(long, value_parser = parse_floats)]
    estimates: Option<FloatList>,
    #[arg(long, value_parser = parse_power, default_value = "1")]
    p: Power,
    #[arg(long, default_value = "uniform")]
    weights: String,
}

#[derive(Debug, Args, Serialize)]
struct HardnessArgs {
    /// Success probability of the rare group.
    #[arg(long)]
    p_bias: f64,
    #[arg(long)]
    delta: f64,
    /// Also estimate the all-zero frequency by Monte Carlo.
    #[arg(long)]
    simulate: bool,
    /// Sample size for the simulation; defaults to the bound.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Weight of the rare group in the Nash welfare.
    #[arg(long, default_value_t = 0.5)]
    group_weight: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
struct CoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "zero-one")]
    loss: AnyLoss,
    #[arg(long, value_parser = parse_power, default_value = "1")]
    p: Power,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    test_fraction: f64,
    /// Write the chosen stump as JSON here.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

/// Self-contained record of one invocation.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub config: Value,
    pub results: Value,
    pub timing: Timing,
    pub version: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Usage errors exit with 2, everything else with 1.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidProfile(_)
        | Error::UnfairPower { .. }
        | Error::WrongSense { .. }
        | Error::NonConvexLoss(_) => 2,
        _ => 1,
    }
}

pub fn main() -> i32 {
    run(std::env::args().collect())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run(args: Vec<String>) -> i32 {
    let expanded = match expand_config(&args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(&expanded) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let outcome = dispatch(cli.command);
    match outcome {
        Ok((config, results, extra)) => {
            let report = RunReport {
                command: args,
                config,
                results,
                timing: Timing {
                    seconds: start.elapsed().as_secs_f64(),
                },
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            let stdout = io::stdout();
            let mut out = stdout.lock();
            let written = if cli.json {
                serde_json::to_writer_pretty(&mut out, &report)
                    .map_err(Error::from)
                    .and_then(|_| writeln!(out).map_err(Error::from))
            } else {
                render(&report.results, &mut out).and_then(|_| match extra {
                    Some(text) => out.write_all(text.as_bytes()).map_err(Error::from),
                    None => Ok(()),
                })
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Replaces `--config FILE` by the file's flags, placed right after the
/// subcommand so that explicit flags (parsed later) override them.
fn expand_config(args: &[String]) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| Error::InvalidArgument("--config needs a file".into()))?;
            path = Some(p.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read config {path}: {e}")))?;
    let mut value: Value = serde_json::from_str(&text)?;
    // a saved run report carries its flags under "config"
    if let Some(inner) = value
        .get("config")
        .filter(|_| value.get("results").is_some())
    {
        value = inner.clone();
    }
    let Value::Object(map) = value else {
        return Err(Error::InvalidArgument(
            "config file must hold a JSON object".into(),
        ));
    };
    let flags = config_flags(&map)?;
    let pos = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .ok_or_else(|| Error::InvalidArgument("--config given without a subcommand".into()))?;
    rest.splice(pos..pos, flags);
    Ok(rest)
}

fn config_flags(map: &Map<String, Value>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (key, value) in map {
        if key == "json" || key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match value {
            Value::Null | Value::Bool(false) => continue,
            Value::Bool(true) => {
                out.push(flag);
                continue;
            }
            Value::Array(items) => items
                .iter()
                .map(scalar_text)
                .collect::<Result<Vec<_>>>()?
                .join(","),
            other => scalar_text(other)?,
        };
        out.push(format!("{flag}={text}"));
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(Error::InvalidArgument(format!(
            "unsupported config value {other}"
        ))),
    }
}

type Outcome = (Value, Value, Option<String>);

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Eval(a) => cmd_eval(a),
        Command::Train(a) => cmd_train(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Hardness(a) => cmd_hardness(a),
        Command::CoverEmm(a) => cmd_cover_emm(a),
    }
}

fn explicit_weights(spec: &str, g: usize) -> Result<Option<Vec<f64>>> {
    match spec.trim() {
        "uniform" => Ok(Some(vec![1.0 / g as f64; g])),
        "freq" => Ok(None),
        list => {
            let w = parse_floats(list).map_err(Error::InvalidArgument)?.0;
            if w.len() != g {
                return Err(Error::InvalidArgument(format!(
                    "{} weights for {g} groups",
                    w.len()
                )));
            }
            Ok(Some(w))
        }
    }
}

fn dataset_weights(spec: &str, data: &GroupedDataset) -> Result<Vec<f64>> {
    Ok(explicit_weights(spec, data.n_groups())?.unwrap_or_else(|| data.group_weights().to_vec()))
}

fn cmd_eval(args: EvalArgs) -> Result<Outcome> {
    let values = args.values.0.clone();
    let g = values.len();
    if g == 0 {
        return Err(Error::InvalidArgument("--values is empty".into()));
    }
    let weights = explicit_weights(&args.weights, g)?
        .ok_or_else(|| Error::InvalidArgument("eval weights are \"uniform\" or a list".into()))?;
    let profile = SentimentProfile::new(values, weights)?;
    let sense = match args.sense {
        SenseArg::Welfare => Sense::Welfare,
        SenseArg::Malfare => Sense::Malfare,
    };
    let spec = match (sense, args.fair) {
        (Sense::Malfare, true) => PowerSpec::fair_malfare(args.p)?,
        (Sense::Welfare, true) => PowerSpec::fair_welfare(args.p)?,
        (Sense::Malfare, false) => PowerSpec::malfare(args.p),
        (Sense::Welfare, false) => PowerSpec::welfare(args.p),
    };
    let mut results = Map::new();
    results.insert("power_mean".into(), json!(power_mean(&profile, spec.p)));
    if args.cas {
        let p = match args.p {
            Power::Finite(p) => p,
            _ => return Err(Error::InvalidArgument("--cas needs a finite p".into())),
        };
        results.insert("cas".into(), json!(cas_mean(&profile, p)?));
    }
    if let Some(eps) = args.atkinson {
        results.insert(
            "atkinson".into(),
            serde_json::to_value(atkinson_index(&profile, eps)?)?,
        );
    }
    Ok((serde_json::to_value(&args)?, Value::Object(results), None))
}

struct Prepared {
    train: GroupedDataset,
    test: Option<GroupedDataset>,
    seed: u64,
}

fn prepare_data(args: &mut DataArgs, test_fraction: f64) -> Result<Prepared> {
    let seed = *args.seed.get_or_insert_with(entropy_seed);
    let (full, from_csv) = match (&args.data, &args.synthetic) {
        (Some(path), _) => {
            let mut opts = LoadOptions::new(&args.target, &args.group, &args.positive);
            opts.delimiter = u8::try_from(args.delimiter).map_err(|_| {
                Error::InvalidArgument("delimiter must be a single-byte character".into())
            })?;
            (load_csv(path, &opts)?, true)
        }
        (None, Some(name)) => (make_synthetic(&name.parse::<Synthetic>()?, seed)?, false),
        (None, None) => return Err(Error::InvalidArgument("give --data or --synthetic".into())),
    };
    let (mut train, mut test) = split(&full, test_fraction, seed)?;
    if from_csv && !args.no_zscore {
        let z = ZScore::fit(&train)?;
        for w in z.warnings(train.feature_names()) {
            eprintln!("warning: {w}");
        }
        z.apply(&mut train);
        z.apply(&mut test);
    }
    let test = if test.is_empty() { None } else { Some(test) };
    Ok(Prepared { train, test, seed })
}

fn train_config(
    data: &DataArgs,
    opt: &OptimizerArgs,
    prepared: &Prepared,
    p: Power,
) -> Result<TrainConfig> {
    let train = &prepared.train;
    let mut cfg = TrainConfig::for_dataset(
        train,
        opt.loss.into(),
        p,
        opt.lambda,
        opt.eps,
        data.bias_weight,
    )?;
    cfg.weights = dataset_weights(&data.weights, train)?;
    if let Some(v) = opt.lambda_ell {
        cfg.lambda_ell = v;
    }
    if let Some(v) = opt.lambda_h {
        cfg.lambda_h = v;
    }
    if let Some(v) = opt.diam {
        cfg.diam = v;
    }
    if let Some(h) = opt.finite_difference {
        cfg.subgradient = SubgradientMode::ForwardDifference { h };
    }
    cfg.max_iterations = opt.max_iterations;
    cfg.seed = prepared.seed;
    Ok(cfg)
}

fn risks_of(
    theta: &[f64],
    data: Option<&GroupedDataset>,
    kind: LossKind,
    bias: bool,
) -> Result<Option<Vec<f64>>> {
    match data {
        Some(d) if d.members().iter().all(|m| !m.is_empty()) => {
            Ok(Some(group_risks(theta, d, kind, bias)?.per_group))
        }
        _ => Ok(None),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn cmd_train(mut args: TrainArgs) -> Result<Outcome> {
    let prepared = prepare_data(&mut args.data, args.opt.test_fraction)?;
    let kind: LossKind = args.opt.loss.into();
    let mut cfg = train_config(&args.data, &args.opt, &prepared, args.p)?;
    cfg.trace_stride = args.trace_stride;
    let out = train_psg(&prepared.train, kind, &cfg)?;
    let theta = &out.model.theta;
    let bias = args.data.bias_weight;
    let train_risks = group_risks(theta, &prepared.train, kind, bias)?.per_group;
    let test_risks = risks_of(theta, prepared.test.as_ref(), kind, bias)?;
    let malfare = |r: &Vec<f64>| crate::aggregator::power_mean_slices(r, &out.weights, out.p);
    let model = out.model_file();
    if let Some(path) = &args.model_out {
        write_json(path, &model)?;
    }
    if let Some(path) = &args.trace_out {
        let mut f = BufWriter::new(File::create(path)?);
        out.write_trace(&mut f)?;
        f.flush()?;
    }
    let results = json!({
        "iterations": out.plan.n,
        "step_size": out.plan.alpha,
        "eps_opt": out.plan.eps_opt,
        "lambda_ell": cfg.lambda_ell,
        "lambda_h": cfg.lambda_h,
        "diam": cfg.diam,
        "best_objective": out.best_objective,
        "best_iter": out.best_iter,
        "groups": prepared.train.group_names(),
        "train_risks": train_risks,
        "test_risks": test_risks,
        "train_malfare": malfare(&train_risks),
        "test_malfare": test_risks.as_ref().map(malfare),
        "model": model,
    });
    Ok((serde_json::to_value(&args)?, results, None))
}

fn cmd_sweep(mut args: SweepArgs) -> Result<Outcome> {
    let prepared = prepare_data(&mut args.data, args.opt.test_fraction)?;
    let kind: LossKind = args.opt.loss.into();
    let base = train_config(&args.data, &args.opt, &prepared, Power::ONE)?;
    let rows = sweep_p(
        &prepared.train,
        prepared.test.as_ref(),
        kind,
        &args.p_grid.0,
        &base,
    )?;
    let groups = prepared.train.group_names().to_vec();
    let mirror = json!({ "groups": groups, "rows": rows });
    let mut extra = None;
    let mut files = Map::new();
    match &args.out {
        Some(path) => {
            let f = BufWriter::new(File::create(path)?);
            write_sweep_csv(&rows, &groups, f)?;
            let json_path = path.with_extension("json");
            write_json(&json_path, &mirror)?;
            files.insert("csv".into(), json!(path));
            files.insert("json".into(), json!(json_path));
        }
        None => {
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &groups, &mut buf)?;
            extra = Some(String::from_utf8(buf).expect("CSV output is UTF-8"));
        }
    }
    let mut results = mirror.as_object().cloned().unwrap_or_default();
    results.extend(files);
    Ok((serde_json::to_value(&args)?, Value::Object(results), extra))
}

fn cmd_bound(args: BoundArgs) -> Result<Outcome> {
    let estimates = args.estimates.as_ref().map(|e| e.0.clone());
    let g = match (args.g, &estimates) {
        (Some(g), _) => g,
        (None, Some(e)) => e.len(),
        (None, None) => return Err(Error::InvalidArgument("give --g or --estimates".into())),
    };
    let method = match args.method {
        MethodArg::Hoeffding => BoundMethod::Hoeffding,
        MethodArg::Bennett => BoundMethod::Bennett,
    };
    let eps = match method {
        BoundMethod::Hoeffding => vec![hoeffding_epsilon(args.r, g, args.delta, args.m)?; g],
        BoundMethod::Bennett => {
            let vars = args
                .variances
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("bennett needs --variances".into()))?;
            let vars = if vars.0.len() == 1 {
                vec![vars.0[0]; g]
            } else {
                vars.0.clone()
            };
            bennett_epsilon(args.r, g, args.delta, args.m, &vars)?
        }
    };
    let results = match estimates {
        Some(est) => {
            if est.len() != eps.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} estimates for {} groups",
                    est.len(),
                    eps.len()
                )));
            }
            let weights = explicit_weights(&args.weights, est.len())?.ok_or_else(|| {
                Error::InvalidArgument("bound weights are \"uniform\" or a list".into())
            })?;
            if args.p < Power::ONE {
                return Err(Error::InvalidArgument(format!(
                    "brackets need p ≥ 1, got {}",
                    args.p
                )));
            }
            let profile = SentimentProfile::new(est.clone(), weights)?;
            let (lower, upper) = bracket_from_estimates(&est, &eps, profile.weights(), args.p)?;
            serde_json::to_value(BoundReport {
                estimate: power_mean(&profile, args.p),
                lower,
                upper,
                method,
                delta: args.delta,
                m: args.m,
                r: args.r,
                epsilon_per_group: eps,
                seed: None,
                heuristic: false,
            })?
        }
        None => json!({
            "method": method,
            "r": args.r,
            "g": g,
            "delta": args.delta,
            "m": args.m,
            "epsilon_per_group": eps,
        }),
    };
    Ok((serde_json::to_value(&args)?, results, None))
}

fn cmd_hardness(mut args: HardnessArgs) -> Result<Outcome> {
    let m = nsw_hardness_bound(args.p_bias, args.delta)?;
    let mut results = Map::new();
    results.insert("m".into(), json!(m));
    results.insert(
        "all_zero_probability".into(),
        json!((1.0 - args.p_bias).powf(m as f64)),
    );
    if args.simulate {
        let seed = *args.seed.get_or_insert_with(entropy_seed);
        let m_sim = *args.m.get_or_insert(m as usize);
        let sim = nsw_hardness_simulate(args.p_bias, m_sim, args.trials, seed, args.group_weight)?;
        results.insert("simulation".into(), serde_json::to_value(sim)?);
    }
    Ok((serde_json::to_value(&args)?, Value::Object(results), None))
}

fn cmd_cover_emm(mut args: CoverArgs) -> Result<Outcome> {
    let prepared = prepare_data(&mut args.data, args.test_fraction)?;
    let train = &prepared.train;
    let config = CoverConfig {
        kind: args.loss.into(),
        p: args.p,
        weights: dataset_weights(&args.data.weights, train)?,
        epsilon: args.eps,
        delta: args.delta,
        bias_weighting: args.data.bias_weight,
    };
    let (stump, report) = train_cover(train, &config)?;
    if let Some(path) = &args.model_out {
        write_json(path, &stump)?;
    }
    let mut results = Map::new();
    results.insert("stump".into(), serde_json::to_value(stump)?);
    results.insert("groups".into(), json!(train.group_names()));
    results.insert("report".into(), serde_json::to_value(&report)?);
    if let Some(test) = prepared
        .test
        .as_ref()
        .filter(|t| t.members().iter().all(|m| !m.is_empty()))
    {
        let mut risks = vec![0.0; test.n_groups()];
        for (k, rows) in test.members().iter().enumerate() {
            let total: f64 = rows
                .iter()
                .map(|&i| {
                    crate::losses::loss_value(
                        config.kind,
                        test.label(i),
                        stump.predict(test.row(i)),
                    )
                })
                .sum();
            risks[k] = total / rows.len() as f64;
        }
        results.insert("test_risks".into(), json!(risks));
    }
    Ok((serde_json::to_value(&args)?, Value::Object(results), None))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", cell(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn render_into(prefix: &str, value: &Value, out: &mut dyn Write) -> io::Result<()> {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_into(&key, v, out)?;
            }
            Ok(())
        }
        Value::Array(items) if items.first().is_some_and(Value::is_object) => {
            let Some(Value::Object(first)) = items.first() else {
                unreachable!()
            };
            let keys: Vec<&String> = first.keys().collect();
            writeln!(out, "{prefix}:")?;
            writeln!(
                out,
                "  {}",
                keys.iter()
                    .map(|k| k.as_str())
                    .collect::<Vec<_>>()
                    .join("\t")
            )?;
            for item in items {
                let row: Vec<String> = keys.iter().map(|k| cell(&item[k.as_str()])).collect();
                writeln!(out, "  {}", row.join("\t"))?;
            }
            Ok(())
        }
        other => writeln!(out, "{prefix:<24} {}", cell(other)),
    }
}

fn render(results: &Value, out: &mut dyn Write) -> Result<()> {
    render_into("", results, out)?;
    Ok(())
}
