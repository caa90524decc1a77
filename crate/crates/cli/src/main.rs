use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mscnlg::dataset::{generate_synthetic, save_manifest, NormalizeScheme, SyntheticSpec};
use mscnlg::experiment::{
    default_tradeoff_grid, emit_report, gradcheck, run_experiment, sweep, to_json, write_atomic,
    ClusteringReport, DataSource, ExperimentConfig, GradcheckDims, ReportFormat,
};
use mscnlg::graph::FusionMode;
use mscnlg::training::TrainConfig;

#[derive(Parser)]
#[command(name = "mscnlg", version, about = "Multi-view subspace clustering with fused graph regularization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, cluster and evaluate, writing one report.
    Run(RunArgs),
    /// Run one experiment per (k, alpha, beta) grid point.
    Sweep(SweepArgs),
    /// Compare analytic gradients with finite differences on a random instance.
    Gradcheck(GradcheckArgs),
    /// Generate a synthetic dataset and save it in manifest format.
    Synth(SynthArgs),
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct DataArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Synthetic dataset spec: a JSON file, inline JSON, or `default`.
    #[arg(long)]
    synth_spec: Option<String>,
}

impl DataArgs {
    fn source(&self) -> Result<DataSource> {
        match (&self.manifest, &self.synth_spec) {
            (Some(path), None) => Ok(DataSource::Manifest(path.clone())),
            (None, Some(spec)) => Ok(DataSource::Synthetic(parse_synth_spec(spec)?)),
            _ => bail!("give exactly one of --manifest or --synth-spec"),
        }
    }
}

fn parse_synth_spec(arg: &str) -> Result<SyntheticSpec> {
    if arg == "default" {
        return Ok(SyntheticSpec::default());
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading synthetic spec {arg}"))?
    };
    let mut value: serde_json::Value = serde_json::from_str(&text).context("parsing synthetic spec")?;
    // Missing fields fall back to the defaults.
    let mut full = serde_json::to_value(SyntheticSpec::default())?;
    if let (Some(base), Some(overrides)) = (full.as_object_mut(), value.as_object_mut()) {
        for (k, v) in std::mem::take(overrides) {
            if !base.contains_key(&k) {
                bail!("unknown synthetic spec field {k:?}");
            }
            base.insert(k, v);
        }
    } else {
        bail!("synthetic spec must be a JSON object");
    }
    Ok(serde_json::from_value(full)?)
}

#[derive(Args)]
struct TrainArgs {
    /// Self-expression weight (default 0.1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Graph regularization weight (default 100).
    #[arg(long)]
    beta: Option<f64>,
    /// Neighbours for the first- and second-order graphs.
    #[arg(long)]
    k: Option<usize>,
    /// both (first- and second-order) or first.
    #[arg(long, value_parser = parse_fusion)]
    fusion: Option<FusionMode>,
    /// Encoder widths after the input, e.g. `128,128,32`; the decoder mirrors them.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    /// Joint training epochs (default 5000).
    #[arg(long)]
    epochs: Option<usize>,
    /// Reconstruction-only epochs before joint training (default 500; 0 disables).
    #[arg(long)]
    pretrain_epochs: Option<usize>,
    /// Adam step size (default 0.001).
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Training and k-means seed.
    #[arg(long)]
    seed: Option<u64>,
    /// none, unit-norm or min-max.
    #[arg(long)]
    normalize: Option<NormalizeScheme>,
}

fn parse_fusion(s: &str) -> std::result::Result<FusionMode, String> {
    s.parse()
}

impl TrainArgs {
    fn apply(&self, cfg: &mut TrainConfig) {
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.fusion {
            cfg.fusion = v;
        }
        if let Some(v) = &self.layers {
            cfg.layers = Some(v.clone());
        }
        if let Some(v) = self.epochs {
            cfg.epochs = v;
        }
        if let Some(v) = self.pretrain_epochs {
            cfg.pretrain_epochs = v;
        }
        if let Some(v) = self.learning_rate {
            cfg.adam.learning_rate = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.normalize {
            cfg.normalize = v;
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    train: TrainArgs,
    /// Cluster count; defaults to the number of distinct labels.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// k-means restarts per repeat.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Retrain for every repeat instead of reusing one trained model.
    #[arg(long)]
    retrain_per_repeat: bool,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.data.source()?);
        self.train.apply(&mut cfg.train);
        cfg.clusters = self.clusters;
        cfg.repeats = self.repeats;
        cfg.kmeans_restarts = self.restarts;
        cfg.retrain_per_repeat = self.retrain_per_repeat;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Record wall-clock seconds per stage (the report is then not reproducible).
    #[arg(long)]
    timings: bool,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// structured or csv-summary.
    #[arg(long, default_value = "structured")]
    format: ReportFormat,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated alpha values; defaults to 0.001,0.01,...,10000.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Comma-separated beta values; defaults to 0.001,0.01,...,10000.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Comma-separated neighbour counts; defaults to the single --k value.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GradcheckArgs {
    #[arg(long, default_value_t = 12)]
    samples: usize,
    /// Comma-separated input dimension per view.
    #[arg(long, value_delimiter = ',', default_value = "5,4")]
    view_dims: Vec<usize>,
    /// Encoder widths; the network has twice as many layers.
    #[arg(long, value_delimiter = ',', default_value = "4,3,2")]
    layers: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 100.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-6)]
    step: f64,
    #[arg(long, default_value_t = 1e-5)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Base spec: a JSON file, inline JSON, or `default`.
    #[arg(long, default_value = "default")]
    synth_spec: String,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    per_cluster: Option<usize>,
    #[arg(long)]
    subspace_dim: Option<usize>,
    #[arg(long)]
    latent_dim: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    view_dims: Option<Vec<usize>>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the manifest, view CSVs and labels.
    #[arg(long)]
    out: PathBuf,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(write_atomic(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize(report: &ClusteringReport) {
    match &report.summary {
        Some(s) => eprintln!(
            "{}: NMI {:.4} ({:.4})  ACC {:.4} ({:.4})  F {:.4} ({:.4})  RI {:.4} ({:.4})",
            report.dataset.name,
            s.mean.nmi,
            s.std.nmi,
            s.mean.acc,
            s.std.acc,
            s.mean.f_measure,
            s.std.f_measure,
            s.mean.rand_index,
            s.std.rand_index,
        ),
        None => eprintln!("{}: no labels, metrics skipped", report.dataset.name),
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let mut cfg = args.experiment.config()?;
    cfg.record_timings = args.timings;
    let report = run_experiment(&cfg)?;
    summarize(&report);
    match &args.out {
        Some(path) => emit_report(&report, path, args.format)?,
        None => {
            let text = match args.format {
                ReportFormat::Structured => to_json(&report),
                ReportFormat::CsvSummary => mscnlg::experiment::csv_summary(&report),
            };
            print!("{text}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode> {
    let cfg = args.experiment.config()?;
    let alphas = args.alphas.unwrap_or_else(default_tradeoff_grid);
    let betas = args.betas.unwrap_or_else(default_tradeoff_grid);
    let ks = args.ks.unwrap_or_else(|| vec![cfg.train.k]);
    let report = sweep(&cfg, &alphas, &betas, &ks)?;
    let failed = report.cells.iter().filter(|c| c.error.is_some()).count();
    eprintln!("{} cells, {failed} failed", report.cells.len());
    write_or_print(args.out.as_deref(), &to_json(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn run_gradcheck(args: GradcheckArgs) -> Result<ExitCode> {
    let dims = GradcheckDims {
        samples: args.samples,
        view_dims: args.view_dims,
        encoder: args.layers,
        alpha: args.alpha,
        beta: args.beta,
        step: args.step,
    };
    let report = gradcheck(&dims, args.seed, args.tolerance)?;
    for b in &report.blocks {
        eprintln!(
            "{:<24} rel {:.2e}  abs {:.2e}  ({} entries)",
            b.name, b.max_relative, b.max_absolute, b.entries
        );
    }
    write_or_print(args.out.as_deref(), &to_json(&report))?;
    if report.passed {
        eprintln!("gradcheck passed");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("gradcheck FAILED: {}", report.failed.join(", "));
        Ok(ExitCode::from(2))
    }
}

fn run_synth(args: SynthArgs) -> Result<ExitCode> {
    let mut spec = parse_synth_spec(&args.synth_spec)?;
    if let Some(v) = args.clusters {
        spec.clusters = v;
    }
    if let Some(v) = args.per_cluster {
        spec.per_cluster = v;
    }
    if let Some(v) = args.subspace_dim {
        spec.subspace_dim = v;
    }
    if let Some(v) = args.latent_dim {
        spec.latent_dim = v;
    }
    if let Some(v) = args.view_dims {
        spec.view_dims = v;
    }
    if let Some(v) = args.noise {
        spec.noise = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    let data = generate_synthetic(&spec)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let manifest = save_manifest(&data, &args.out)?;
    eprintln!(
        "wrote {} ({} samples, views {:?})",
        manifest.display(),
        data.n_samples(),
        data.view_dims()
    );
    Ok(ExitCode::SUCCESS)
}

/// The error chain, skipping causes already quoted by the message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Gradcheck(a) => run_gradcheck(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}
