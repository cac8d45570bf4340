use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::{error, info};

use densefusion::app;
use densefusion::config::Config;
use densefusion::fusion::FusionPolicy;
use densefusion::risk::RiskModel;
use densefusion::scores::{load_scores, render_scores, write_scores};
use densefusion::thermal_io::{load_manifest, CohortSpec};
use densefusion::Error;

/// Density-informed breast screening: thermal radiomics, mammography
/// thresholding, fusion and screening statistics.
///
/// Logs go to standard error; set RUST_LOG to change the level.
#[derive(Parser)]
#[command(name = "densefusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic cohort: PGM frames with .cal sidecars,
    /// JSON truth files and manifest.csv.
    Phantom {
        /// Cohort spec (key=value); defaults apply when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides the spec's case count.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Train the group classifiers and ensemble on a labelled manifest.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        /// Where to write the model file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Score every case: group scores, ensemble, B-Score and both modality calls.
    Score {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Score CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-view label, skeleton and mask PGMs.
        #[arg(long)]
        debug_dir: Option<PathBuf>,
    },
    /// Stratified screening metrics for one or all fusion policies.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// DENSITY_INFORMED, OR_RULE, MAMMO_ONLY or THERMAL_ONLY; overrides the config.
        #[arg(long)]
        policy: Option<FusionPolicy>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for one `<policy>.csv` per evaluated policy.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohort composition and ROC analysis.
    Report {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Where to write the ROC points as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Phantom { spec, out, seed, cases } => {
            let mut spec = match spec {
                Some(p) => CohortSpec::load(&p)?,
                None => CohortSpec::default(),
            };
            if let Some(n) = cases {
                spec.cases = n;
            }
            let manifest = app::run_phantom(&spec, seed, &out)?;
            println!("{}", manifest.display());
        }
        Command::Train { manifest, out, config } => {
            let config = load_config(config.as_deref())?;
            let cases = load_manifest(&manifest)?;
            let report = app::run_train(&cases, &config)?;
            report.model.save(&out)?;
            let [h, v, a, e] = report.final_losses;
            println!("final losses: hotspot={h} vascular={v} areolar={a} ensemble={e}");
            info!("model written to {}", out.display());
        }
        Command::Score {
            manifest,
            model,
            config,
            out,
            debug_dir,
        } => {
            let config = load_config(config.as_deref())?;
            let cases = load_manifest(&manifest)?;
            if cases.is_empty() {
                return Err(Error::EmptyCohort.into());
            }
            let model = RiskModel::load(&model)?;
            let (rows, failed) = app::run_score(&cases, &model, &config, debug_dir.as_deref())?;
            match &out {
                Some(p) => write_scores(p, &rows)?,
                None => write_out(None, &render_scores(&rows))?,
            }
            if failed > 0 {
                bail!("{failed} of {} cases FAILED", cases.len());
            }
        }
        Command::Evaluate {
            scores,
            manifest,
            policy,
            config,
            out,
        } => {
            let config = load_config(config.as_deref())?;
            let cases = load_manifest(&manifest)?;
            let scores = load_scores(&scores)?;
            let reports = app::run_evaluate(&cases, &scores, policy.or(config.policy))?;
            write_out(None, &app::render_evaluation_text(&reports))?;
            if let Some(dir) = out {
                for p in app::write_evaluation_csv(&dir, &reports)? {
                    info!("wrote {}", p.display());
                }
            }
        }
        Command::Report { manifest, scores, out } => {
            let cases = load_manifest(&manifest)?;
            let scores = scores.map(|p| load_scores(&p)).transpose()?;
            let (text, curves) = app::run_report(&cases, scores.as_deref())?;
            write_out(None, &text)?;
            if let Some(p) = out {
                write_out(Some(&p), &curves)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
