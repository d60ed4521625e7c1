use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use flock_harness::config::{parse_count_list, ConfigFile, OneOrMany};
use flock_harness::output::{read_results, summary_csv, write_outputs, SUMMARY};
use flock_harness::{run_sweep, summarize, SweepResult};

#[derive(Parser)]
#[command(name = "flocksim", version, about = "Flocking simulations with influencing agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of one cell.
    Run(ExperimentArgs),
    /// Run every cell of a parameter grid. Axis flags take lists
    /// (`10,20,30`) or inclusive ranges (`10:100:10`).
    Sweep(ExperimentArgs),
    /// Recompute summary.csv from timeseries.csv and convergence.csv.
    Summarize {
        /// Directory holding the result files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// small, large or herd.
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    rv_count: Option<String>,
    #[arg(long)]
    inf_count: Option<String>,
    /// random, grid, kmeans, circle-random, circle-grid or circle-border.
    #[arg(long)]
    placement: Option<String>,
    #[arg(long)]
    placement_radius: Option<String>,
    /// face, offset-momentum, lookahead, coordinated, multistep[:stage],
    /// circle, polygon or multicircle.
    #[arg(long)]
    behavior: Option<String>,
    /// Goal direction in radians.
    #[arg(long, allow_negative_numbers = true)]
    goal_theta: Option<f64>,
    /// Multistep latch threshold as a fraction of the flock size.
    #[arg(long)]
    threshold_frac: Option<f64>,
    #[arg(long)]
    final_radius: Option<f64>,
    #[arg(long)]
    circle_radius: Option<f64>,
    #[arg(long)]
    polygon_sides: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
    /// Steps per trial.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    sample_interval: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Alignment tolerance in radians.
    #[arg(long)]
    epsilon_align: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Stop each trial once half the flock is aligned.
    #[arg(long)]
    early_exit: bool,
    /// Count flocks on proximity alone.
    #[arg(long)]
    proximity_only_flocks: bool,
    /// Leave the influencers' own headings out of the multistep goal.
    #[arg(long)]
    exclude_influencer_headings: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn list<T: std::str::FromStr>(text: &str) -> Result<OneOrMany<T>> {
    let items = text
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad list item `{s}`")))
        .collect::<Result<Vec<T>>>()?;
    Ok(items.into())
}

impl ExperimentArgs {
    fn config(&self) -> Result<ConfigFile> {
        let mut file = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ConfigFile::from_toml(&text)?
            }
            None => ConfigFile::default(),
        };
        let counts = |s: &Option<String>| -> Result<Option<OneOrMany<usize>>> {
            s.as_deref().map(|t| parse_count_list(t).map(Into::into).map_err(anyhow::Error::msg)).transpose()
        };
        file.merge(ConfigFile {
            setting: self.setting.clone(),
            rv_count: counts(&self.rv_count)?,
            inf_count: counts(&self.inf_count)?,
            placement: self.placement.as_deref().map(list).transpose()?,
            placement_radius: self.placement_radius.as_deref().map(list).transpose()?,
            behavior: self.behavior.as_deref().map(list).transpose()?,
            goal_theta: self.goal_theta,
            threshold_frac: self.threshold_frac,
            include_influencer_headings: self.exclude_influencer_headings.then_some(false),
            final_radius: self.final_radius,
            circle_radius: self.circle_radius,
            polygon_sides: self.polygon_sides,
            candidates: self.candidates,
            max_steps: self.steps,
            sample_interval: self.sample_interval,
            trials: self.trials,
            seed: self.seed,
            epsilon_align: self.epsilon_align,
            proximity_only_flocks: self.proximity_only_flocks.then_some(true),
            threads: self.threads,
            early_exit: self.early_exit.then_some(true),
        });
        Ok(file)
    }
}

fn report(result: &SweepResult, out: &Path) {
    for c in &result.summary.cells {
        let conv = &c.convergence;
        let mean = conv.converged.map_or("censored".to_string(), |s| format!("{:.1} ± {:.1}", s.mean, s.sem));
        println!(
            "cell {}: 50% convergence {} ({} of {} trials censored)",
            c.cell, mean, conv.censored, conv.trials
        );
    }
    println!("wrote {}", out.display());
}

fn experiment(args: &ExperimentArgs, single: bool) -> Result<()> {
    let cfg = args.config()?.resolve()?;
    if single && cfg.axes.cell_count() != 1 {
        bail!("`run` takes one cell but the parameters describe {}; use `sweep`", cfg.axes.cell_count());
    }
    let start = Instant::now();
    let result = run_sweep(&cfg)?;
    write_outputs(&args.out, &result)?;
    report(&result, &args.out);
    eprintln!("{} trials in {:.2?}", result.trials.len(), start.elapsed());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => experiment(&args, true),
        Command::Sweep(args) => experiment(&args, false),
        Command::Summarize { out } => {
            let trials = read_results(&out)?;
            let summary = summarize(&trials);
            std::fs::write(out.join(SUMMARY), summary_csv(&summary)?)?;
            println!("summarized {} trials into {}", trials.len(), out.join(SUMMARY).display());
            Ok(())
        }
    }
}
