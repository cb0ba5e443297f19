use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dfr_cli::commands;
use dfr_cli::config::{build, read_config_file};
use dfr_cli::svg::ChartKind;
use dfr_core::LossKind;

#[derive(Parser)]
#[command(name = "dfr", version, about = "Train neural PDE solvers with dual-norm residual losses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network and export history, solution, errors and parameters.
    Run(RunArgs),
    /// Train once per loss kind and tabulate the final errors.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated loss kinds.
        #[arg(long, value_delimiter = ',', default_value = "dfr,vpinn,collocation")]
        losses: Vec<String>,
    },
    /// Render a history CSV as an SVG chart.
    Plot {
        history: PathBuf,
        /// loss, validation, error or correlation
        #[arg(long, default_value = "loss")]
        kind: ChartKind,
        #[arg(long, default_value = "chart.svg")]
        out: PathBuf,
    },
    /// List the model problems.
    ListProblems,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_val: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    early_stopping: Option<bool>,
    /// Comma-separated hidden-layer widths.
    #[arg(long)]
    hidden_widths: Option<String>,
    /// Continue from a parameter checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Skip SVG export.
    #[arg(long)]
    no_svg: bool,
}

impl RunArgs {
    fn settings(&self) -> Result<(BTreeMap<String, String>, BTreeMap<String, String>)> {
        let file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let mut flags = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                flags.insert(k.to_string(), v);
            }
        };
        put("problem", self.problem.clone());
        put("loss", self.loss.clone());
        put("n_train", self.n_train.map(|v| v.to_string()));
        put("n_val", self.n_val.map(|v| v.to_string()));
        put("max_iterations", self.max_iterations.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("early_stopping", self.early_stopping.map(|v| v.to_string()));
        put("hidden_widths", self.hidden_widths.clone());
        put("resume", self.resume.as_ref().map(|p| p.display().to_string()));
        if self.no_svg {
            put("svg", Some("false".into()));
        }
        Ok((file, flags))
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("DFR_THREADS") {
        let n: usize = v.parse().with_context(|| format!("DFR_THREADS must be a positive integer, got `{v}`"))?;
        dfr_core::init_thread_pool(n)?;
    }
    match cli.command {
        Command::Run(args) => {
            let (file, flags) = args.settings()?;
            commands::run(&build(&file, &flags)?)?;
        }
        Command::Compare { run, losses } => {
            let kinds = losses
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<LossKind>().map_err(anyhow::Error::msg))
                .collect::<Result<Vec<_>>>()?;
            let (file, mut flags) = run.settings()?;
            flags.remove("loss");
            commands::compare(&build(&file, &flags)?, &kinds)?;
        }
        Command::Plot { history, kind, out } => commands::plot(&history, kind, &out)?,
        Command::ListProblems => print!("{}", commands::list_problems()),
    }
    Ok(())
}
