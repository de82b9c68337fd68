//! The `fogsim` command line: load a scenario, run one or more
//! allocators (optionally over a parameter sweep), write CSVs.
//!
//! Exit codes: 0 on success, 2 for config or usage problems (with a
//! line/field diagnostic), 1 if a run fails an internal invariant.

use std::fmt::Display;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::alloc::AllocatorKind;
use crate::config::{self, ScenarioConfig};
use crate::output::{self, EmittedRun};
use crate::sim::{self, RunOutput, SweepAxis};

#[derive(Debug, Parser)]
#[command(
    name = "fogsim",
    about = "Simulates latency-constrained request offloading across fog nodes \
             and a cloud, minimizing computation plus communication energy.",
    after_help = "Sweep axes (canonical units): cloud_beta [GFLOP/(s*W)], \
                  fixed_freq [GHz], d_max [ms], size [MB], \
                  mean_interarrival [ms], theta_max [FLOP/bit]."
)]
pub struct Cli {
    /// Scenario config file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Allocator to run; a comma list runs each on identical traffic.
    /// Overrides the config's `allocator`.
    #[arg(long, value_name = "NAME[,NAME...]")]
    pub allocator: Option<String>,

    /// Swept parameter, either `axis=v1,v2,...` or `axis=lo:hi:step`.
    /// Overrides the config's `sweep`.
    #[arg(long, value_name = "AXIS=VALUES")]
    pub sweep: Option<String>,

    /// RNG seed, overriding the config's `seed`.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,

    /// Directory the CSV files are written into.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Output files to write; repeat for several. Default: all four.
    #[arg(long, value_enum, value_name = "KIND")]
    pub emit: Vec<EmitKind>,

    /// Pin every fog node to this frequency (GHz) instead of optimizing.
    /// Overrides the config's `fixed_freq`.
    #[arg(long, value_name = "GHZ")]
    pub fixed_freq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    Requests,
    Summary,
    Cdf,
    Hist2d,
}

/// Usage and config problems: exit code 2.
#[derive(Debug)]
pub struct UsageError(String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn usage(message: impl Display) -> UsageError {
    UsageError(message.to_string())
}

/// Entry point for the binary: parses `std::env::args`, runs, reports.
pub fn run_from_env() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn parse_allocator_list(text: &str) -> Result<Vec<AllocatorKind>, UsageError> {
    let names = || {
        AllocatorKind::all().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
    };
    let mut kinds = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(usage(format!("empty allocator name; valid names: {}", names())));
        }
        let kind = part
            .parse::<AllocatorKind>()
            .map_err(|_| usage(format!("unknown allocator '{part}'; valid names: {}", names())))?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

/// Applies CLI overrides onto the parsed config and re-validates.
fn merge(cli: &Cli, mut cfg: ScenarioConfig) -> Result<(ScenarioConfig, Vec<AllocatorKind>), UsageError> {
    if let Some(seed) = cli.seed {
        cfg.scenario.seed = seed;
    }
    if let Some(pin) = cli.fixed_freq {
        cfg.scenario.params.fixed_freq_ghz = Some(pin);
    }
    if let Some(spec) = &cli.sweep {
        cfg.sweep = Some(config::parse_sweep(spec).map_err(|e| usage(format!("--sweep: {e}")))?);
    }
    let allocators = match &cli.allocator {
        Some(text) => parse_allocator_list(text)?,
        None => vec![cfg.allocator],
    };
    cfg.validate().map_err(usage)?;
    Ok((cfg, allocators))
}

fn execute(cli: &Cli) -> Result<(), UsageError> {
    let cfg = config::parse_file(&cli.config).map_err(usage)?;
    let (cfg, allocators) = merge(cli, cfg)?;

    // One run per (allocator, sweep point); order fixed by the flags.
    let mut labeled: Vec<(Option<(SweepAxis, f64)>, RunOutput)> = Vec::new();
    for &kind in &allocators {
        match &cfg.sweep {
            Some(spec) => {
                let points = sim::sweep(&cfg.scenario, kind, spec.axis, &spec.values)
                    .unwrap_or_else(|e| panic!("run failed: {e}"));
                labeled
                    .extend(points.into_iter().map(|p| (Some((spec.axis, p.value)), p.output)));
            }
            None => {
                let out = sim::run(&cfg.scenario, kind)
                    .unwrap_or_else(|e| panic!("run failed: {e}"));
                labeled.push((None, out));
            }
        }
    }
    let runs: Vec<EmittedRun> =
        labeled.iter().map(|(axis, output)| EmittedRun { output, axis: *axis }).collect();

    let emit = if cli.emit.is_empty() {
        vec![EmitKind::Requests, EmitKind::Summary, EmitKind::Cdf, EmitKind::Hist2d]
    } else {
        let mut kinds = cli.emit.clone();
        kinds.dedup();
        kinds
    };
    type CsvWriter = fn(&mut Vec<u8>, &[EmittedRun]) -> std::io::Result<()>;
    for kind in emit {
        let (name, writer): (&str, CsvWriter) = match kind {
            EmitKind::Requests => ("requests.csv", output::write_requests_csv),
            EmitKind::Summary => ("summary.csv", output::write_summary_csv),
            EmitKind::Cdf => ("cdf.csv", output::write_cdf_csv),
            EmitKind::Hist2d => ("hist2d.csv", output::write_hist2d_csv),
        };
        let path = cli.out.join(name);
        let mut buf = Vec::new();
        writer(&mut buf, &runs).expect("writing to memory cannot fail");
        std::fs::File::create(&path)
            .and_then(|mut file| file.write_all(&buf))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {} ({} runs)", path.display(), runs.len());
    }
    Ok(())
}
