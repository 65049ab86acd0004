//! Command-line surface for the intentrec pipeline.
//!
//! Every subcommand is a thin wrapper over a library call. The `cmd_*`
//! functions hold that call plus file I/O and are public so tests can compare
//! them against the library directly; [`run`] adds config resolution and the
//! run manifest.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use intentrec::data::{
    build_sequences, filter_k_core, leave_one_out_split, parse_interactions, synth_generate,
    Dataset, SynthConfig,
};
use intentrec::eval::{
    coldstart_sweep, evaluate, perturbation_sweep, MetricsReport, ModelScorer, SweepResult,
    DEFAULT_LEVELS,
};
use intentrec::training::{
    grad_check, train, write_loss_csv, Checkpoint, GradCheckConfig, GradCheckReport, LossWeights,
    TrainOutcome,
};
use intentrec::{Config, Model};
use serde::Serialize;

mod manifest;

pub use manifest::{fingerprint, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "intentrec",
    version,
    about = "Multi-intent sequential recommendation pipeline"
)]
pub struct Cli {
    /// `key = value` configuration file. Flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Run seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for every artifact the command writes.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Override one config key, e.g. `--set epochs=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a ratings log, apply k-core filtering and write a dataset file.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to `<out-dir>/dataset.json`.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        k_core: Option<usize>,
    },
    /// Generate a planted-topic dataset.
    Synth {
        #[arg(long)]
        users: usize,
        #[arg(long)]
        items: usize,
        #[arg(long)]
        topics: usize,
        /// Defaults to `<out-dir>/dataset.json`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train on a dataset file; writes `checkpoint.json` and `loss.csv`.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
    },
    /// Leave-one-out test metrics; writes `metrics.csv`.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Metrics against visible-history length 1..10; writes `coldstart.csv`.
    Coldstart {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Metrics under seeded history shuffling; writes `perturb.csv`.
    Perturb {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated, strictly increasing, within [0, 1].
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Compare analytic gradients with finite differences; writes `gradcheck.csv`.
    Gradcheck {
        /// Number of consecutive seeds, starting at the run seed.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        intents: usize,
        #[arg(long, default_value_t = 20)]
        items: usize,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, default_value_t = 1e-4)]
        step_size: f64,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
        #[arg(long)]
        zero_init: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Preprocess { .. } => "preprocess",
            Command::Synth { .. } => "synth",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::Coldstart { .. } => "coldstart",
            Command::Perturb { .. } => "perturb",
            Command::Gradcheck { .. } => "gradcheck",
        }
    }
}

/// Why a command failed, mapped onto the process exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Check(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Data(e) => write!(f, "{e:#}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<intentrec::Error> for Failure {
    fn from(e: intentrec::Error) -> Self {
        match e {
            intentrec::Error::InvalidConfig(m) => Failure::Usage(m),
            other => Failure::Data(other.into()),
        }
    }
}

fn data_err(path: &Path) -> impl FnOnce(intentrec::Error) -> Failure + '_ {
    move |e| match e {
        intentrec::Error::InvalidConfig(m) => Failure::Usage(m),
        other => Failure::Data(anyhow::Error::new(other).context(path.display().to_string())),
    }
}

/// Defaults, then the config file, then `--set`, then dedicated flags.
pub fn resolve_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = Config::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_str(&text)?;
    }
    for o in &cli.overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got {o:?}")))?;
        cfg.set(key.trim(), value)?;
    }
    match &cli.command {
        Command::Preprocess {
            k_core: Some(k), ..
        } => cfg.k_core = *k,
        Command::Train { epochs, lr, .. } => {
            if let Some(e) = epochs {
                cfg.epochs = *e;
            }
            if let Some(lr) = lr {
                cfg.lr = *lr;
            }
        }
        Command::Evaluate { k: Some(k), .. }
        | Command::Coldstart { k: Some(k), .. }
        | Command::Perturb { k: Some(k), .. } => cfg.eval_k = *k,
        _ => {}
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreprocessSummary {
    /// Non-blank data lines, header excluded.
    pub lines: usize,
    pub malformed: usize,
    pub header: bool,
    pub users: usize,
    pub items: usize,
    pub kept: usize,
    /// Well-formed interactions removed by k-core filtering.
    pub dropped: usize,
}

pub fn cmd_preprocess(
    input: &Path,
    output: &Path,
    k_core: usize,
) -> Result<PreprocessSummary, Failure> {
    let file = std::fs::File::open(input).map_err(|e| data_err(input)(e.into()))?;
    let report = parse_interactions(file).map_err(data_err(input))?;
    let raw = build_sequences(&report.interactions);
    let core = filter_k_core(&raw, k_core).map_err(data_err(input))?;
    core.save(output).map_err(data_err(output))?;
    Ok(PreprocessSummary {
        lines: report.lines,
        malformed: report.malformed,
        header: report.header,
        users: core.n_users(),
        items: core.n_items(),
        kept: core.n_interactions(),
        dropped: raw.n_interactions() - core.n_interactions(),
    })
}

pub fn cmd_synth(cfg: &SynthConfig, output: &Path) -> Result<Dataset, Failure> {
    let d = synth_generate(cfg)?;
    d.save(output).map_err(data_err(output))?;
    Ok(d)
}

pub fn load_dataset(path: &Path) -> Result<Dataset, Failure> {
    Dataset::load(path).map_err(data_err(path))
}

/// Loads a checkpoint and checks it fits the dataset's catalog.
pub fn load_model(checkpoint: &Path, dataset: &Dataset) -> Result<Model, Failure> {
    let ck = Checkpoint::load(checkpoint).map_err(data_err(checkpoint))?;
    if ck.model.n_items() != dataset.n_items() {
        return Err(Failure::Data(anyhow::anyhow!(
            "checkpoint {} scores {} items but the dataset has {}",
            checkpoint.display(),
            ck.model.n_items(),
            dataset.n_items()
        )));
    }
    Ok(ck.model)
}

pub fn cmd_train(
    dataset: &Path,
    cfg: &Config,
    checkpoint: &Path,
    loss_csv: &Path,
) -> Result<TrainOutcome, Failure> {
    let data = load_dataset(dataset)?;
    let out = train(&data, cfg).map_err(data_err(dataset))?;
    Checkpoint::new(cfg.clone(), out.model.clone())
        .save(checkpoint)
        .map_err(data_err(checkpoint))?;
    let file = create(loss_csv)?;
    write_loss_csv(&out.log, file).map_err(data_err(loss_csv))?;
    Ok(out)
}

fn create(path: &Path) -> Result<std::fs::File, Failure> {
    std::fs::File::create(path)
        .map_err(|e| Failure::Data(anyhow::Error::new(e).context(path.display().to_string())))
}

pub fn cmd_evaluate(
    checkpoint: &Path,
    dataset: &Path,
    k: usize,
    out: &Path,
) -> Result<MetricsReport, Failure> {
    let data = load_dataset(dataset)?;
    let model = load_model(checkpoint, &data)?;
    let report = evaluate(&model, &leave_one_out_split(&data), k)?;
    report.write_csv(create(out)?).map_err(data_err(out))?;
    Ok(report)
}

pub fn cmd_coldstart(
    checkpoint: &Path,
    dataset: &Path,
    k: usize,
    out: &Path,
) -> Result<SweepResult, Failure> {
    let data = load_dataset(dataset)?;
    let model = load_model(checkpoint, &data)?;
    let sweep = coldstart_sweep(&ModelScorer::new(&model), &leave_one_out_split(&data), k)?;
    sweep.write_csv(create(out)?).map_err(data_err(out))?;
    Ok(sweep)
}

pub fn cmd_perturb(
    checkpoint: &Path,
    dataset: &Path,
    k: usize,
    levels: &[f64],
    seed: u64,
    out: &Path,
) -> Result<SweepResult, Failure> {
    let data = load_dataset(dataset)?;
    let model = load_model(checkpoint, &data)?;
    let split = leave_one_out_split(&data);
    let sweep = perturbation_sweep(&ModelScorer::new(&model), &split, levels, k, seed)?;
    sweep.write_csv(create(out)?).map_err(data_err(out))?;
    Ok(sweep)
}

/// Runs the check once per seed and writes one CSV row per (seed, group).
pub fn cmd_gradcheck(
    base: &GradCheckConfig,
    seeds: &[u64],
    out: &Path,
) -> Result<Vec<(u64, GradCheckReport)>, Failure> {
    let mut reports = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = GradCheckConfig {
            seed,
            ..base.clone()
        };
        reports.push((seed, grad_check(&cfg)?));
    }
    let mut text = String::from("seed,group,n_params,max_rel_error,passed\n");
    for (seed, report) in &reports {
        for g in &report.groups {
            text.push_str(&format!(
                "{seed},{},{},{:e},{}\n",
                g.name, g.n_params, g.max_rel_error, g.passed
            ));
        }
    }
    std::fs::write(out, text)
        .map_err(|e| Failure::Data(anyhow::Error::new(e).context(out.display().to_string())))?;
    Ok(reports)
}

/// What a successful run reports back.
#[derive(Debug)]
pub struct Outcome {
    pub manifest: PathBuf,
    pub message: String,
}

/// Resolves the configuration, runs the command and writes its manifest.
/// A failed gradient check still writes its report and manifest before
/// returning [`Failure::Check`].
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let cfg = resolve_config(cli)?;
    let dir = &cli.out_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Data(anyhow::Error::new(e).context(dir.display().to_string())))?;
    let mut manifest = RunManifest::new(cli.command.name(), &cfg);
    let mut check_failure = None;

    let message = match &cli.command {
        Command::Preprocess { input, output, .. } => {
            let output = output.clone().unwrap_or_else(|| dir.join("dataset.json"));
            let summary = cmd_preprocess(input, &output, cfg.k_core)?;
            manifest.set_dataset(&output)?;
            manifest.artifacts.push(output);
            manifest.summary = to_value(&summary);
            format!(
                "{} users, {} items, {} interactions kept, {} dropped, {} malformed lines",
                summary.users, summary.items, summary.kept, summary.dropped, summary.malformed
            )
        }
        Command::Synth {
            users,
            items,
            topics,
            output,
        } => {
            let output = output.clone().unwrap_or_else(|| dir.join("dataset.json"));
            let synth = SynthConfig {
                n_users: *users,
                n_items: *items,
                n_topics: *topics,
                seed: cfg.seed,
            };
            let d = cmd_synth(&synth, &output)?;
            manifest.set_dataset(&output)?;
            manifest.artifacts.push(output);
            format!(
                "{} users, {} items, {} interactions",
                d.n_users(),
                d.n_items(),
                d.n_interactions()
            )
        }
        Command::Train { dataset, .. } => {
            let ck = dir.join("checkpoint.json");
            let loss = dir.join("loss.csv");
            let out = cmd_train(dataset, &cfg, &ck, &loss)?;
            manifest.set_dataset(dataset)?;
            manifest.checkpoint = Some(ck.clone());
            manifest.artifacts.extend([ck, loss]);
            match out.log.last() {
                Some(last) => format!("{} epochs, final loss {:.6}", out.log.len(), last.total),
                None => "0 epochs, checkpoint holds the initialization".into(),
            }
        }
        Command::Evaluate {
            checkpoint,
            dataset,
            ..
        } => {
            let out = dir.join("metrics.csv");
            let r = cmd_evaluate(checkpoint, dataset, cfg.eval_k, &out)?;
            manifest.set_dataset(dataset)?;
            manifest.checkpoint = Some(checkpoint.clone());
            manifest.artifacts.push(out);
            manifest.summary = to_value(&r);
            format!(
                "HR@{k} {:.4}  NDCG@{k} {:.4}  IAS {:.4}  users {}",
                r.hr_at_k,
                r.ndcg_at_k,
                r.ias,
                r.n_users,
                k = r.k
            )
        }
        Command::Coldstart {
            checkpoint,
            dataset,
            ..
        } => {
            let out = dir.join("coldstart.csv");
            let s = cmd_coldstart(checkpoint, dataset, cfg.eval_k, &out)?;
            manifest.set_dataset(dataset)?;
            manifest.checkpoint = Some(checkpoint.clone());
            manifest.artifacts.push(out);
            sweep_message("L", &s)
        }
        Command::Perturb {
            checkpoint,
            dataset,
            levels,
            ..
        } => {
            let out = dir.join("perturb.csv");
            let levels = levels.clone().unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
            let s = cmd_perturb(checkpoint, dataset, cfg.eval_k, &levels, cfg.seed, &out)?;
            manifest.set_dataset(dataset)?;
            manifest.checkpoint = Some(checkpoint.clone());
            manifest.artifacts.push(out);
            sweep_message("level", &s)
        }
        Command::Gradcheck {
            seeds,
            dim,
            intents,
            items,
            steps,
            step_size,
            tolerance,
            zero_init,
        } => {
            if *dim > 16 {
                return Err(Failure::Usage("gradient checks need dim <= 16".into()));
            }
            let base = GradCheckConfig {
                dim: *dim,
                n_intents: *intents,
                n_items: *items,
                steps: *steps,
                seed: cfg.seed,
                step_size: *step_size,
                tolerance: *tolerance,
                zero_init: *zero_init,
                weights: LossWeights {
                    lambda_elbo: cfg.lambda_elbo,
                    beta: cfg.beta_max,
                },
            };
            let seed_list: Vec<u64> = (0..*seeds).map(|i| cfg.seed.wrapping_add(i)).collect();
            let out = dir.join("gradcheck.csv");
            let reports = cmd_gradcheck(&base, &seed_list, &out)?;
            manifest.artifacts.push(out);
            let worst = reports
                .iter()
                .map(|(_, r)| r.max_rel_error())
                .fold(0.0, f64::max);
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|(seed, r)| {
                    r.groups
                        .iter()
                        .filter(|g| !g.passed)
                        .map(move |g| format!("{}@seed{seed}", g.name))
                })
                .collect();
            manifest.summary = serde_json::json!({
                "seeds": seed_list,
                "max_rel_error": worst,
                "tolerance": tolerance,
                "failed_groups": failed,
            });
            if !failed.is_empty() {
                check_failure = Some(format!(
                    "max relative error {worst:e} above {tolerance:e} in {}",
                    failed.join(", ")
                ));
            }
            format!("{} seeds, max relative error {worst:e}", seed_list.len())
        }
    };

    manifest.elapsed_secs = start.elapsed().as_secs_f64();
    let path = manifest.write(dir)?;
    match check_failure {
        Some(m) => Err(Failure::Check(m)),
        None => Ok(Outcome {
            manifest: path,
            message,
        }),
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn sweep_message(label: &str, s: &SweepResult) -> String {
    s.rows
        .iter()
        .map(|r| format!("{label}={} HR@{}={:.4}", r.condition, s.k, r.report.hr_at_k))
        .collect::<Vec<_>>()
        .join("  ")
}
