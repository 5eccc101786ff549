use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dwall_core::clifford::standard_rep;
use dwall_core::dirac::assemble_wall_family;
use dwall_core::verifier::{
    bulk_operator, emit_report, run_experiment, run_delta_sweep, structural_suite, CheckKind, ExperimentConfig,
};

#[derive(Parser, Debug)]
#[command(name = "dwall", version, about = "Numerical checks of the domain-wall index theorem on flat tori")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the ledger tolerance of every config.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Directory receiving reports (one subdirectory per config).
    #[arg(long, global = true, default_value = "dwall-out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and the checks listed in each config.
    Verify {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Index of the smoothed operator for a list of smoothing widths.
    SweepDelta {
        config: PathBuf,
        /// Comma-separated widths in (0, 1]; defaults to the config's list.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Run one check. `structural` needs no config.
    Check {
        /// ledger, cylinder, homotopy, dertau, flow, ta or structural.
        kind: String,
        config: Option<PathBuf>,
    },
    /// Dump an operator matrix in binary form.
    ExportOperator {
        config: PathBuf,
        /// Export the wall operator at this fraction of the family instead
        /// of the bulk operator.
        #[arg(long)]
        wall: Option<f64>,
        /// Output file (default: <out>/<name>.op).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &Path, g: &Global) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(t) = g.tolerance {
        cfg.run.tolerance = t;
    }
    if cfg.name.is_empty() {
        cfg.name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verify(cfg: &ExperimentConfig, out: &Path) -> Result<bool> {
    let report = run_experiment(cfg).with_context(|| format!("config `{}`", cfg.name))?;
    let dir = out.join(&cfg.name);
    emit_report(&report, &dir)?;
    print!("{}", std::fs::read_to_string(dir.join("summary.txt"))?);
    println!("report written to {}", dir.display());
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Verify { configs } => {
            let mut all = true;
            for path in configs {
                all &= verify(&load(path, g)?, &g.out)?;
            }
            Ok(all)
        }
        Command::SweepDelta { config, deltas } => {
            let cfg = load(config, g)?;
            let deltas = deltas.clone().unwrap_or_else(|| cfg.run.deltas.clone());
            let sweep = run_delta_sweep(&cfg, &deltas)?;
            if let Some(i) = sweep.transverse_index {
                println!("delta = 0 (sharp, transverse solver): index {i}");
            }
            for row in &sweep.rows {
                println!("delta = {}: index {} (heat-trace deviation {:.2e})", row.delta, row.index, row.deviation);
            }
            match sweep.jump {
                Some((a, b)) => println!("FAIL: index changes between delta = {a} and delta = {b}"),
                None => println!("PASS: index constant"),
            }
            Ok(sweep.passed())
        }
        Command::Check { kind, config } => {
            let kind = CheckKind::parse(kind)?;
            match (kind, config) {
                (CheckKind::Structural, None) => {
                    let r = structural_suite()?;
                    for e in &r.entries {
                        println!("{:<40} {:.3e}", e.name, e.residual);
                    }
                    let ok = r.passed(1e-8);
                    println!("{}", if ok { "PASS" } else { "FAIL" });
                    Ok(ok)
                }
                (_, None) => bail!("check `{}` needs a config", kind.name()),
                (_, Some(path)) => {
                    let mut cfg = load(path, g)?;
                    cfg.checks.enabled = vec![kind];
                    verify(&cfg, &g.out)
                }
            }
        }
        Command::ExportOperator { config, wall, output } => {
            let cfg = load(config, g)?;
            let path = output.clone().unwrap_or_else(|| g.out.join(format!("{}.op", cfg.name)));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let gauge = cfg.gauge_config()?;
            let op = match wall {
                Some(s) => {
                    if !(0.0..=1.0).contains(s) {
                        bail!("--wall must lie in [0, 1]");
                    }
                    let rep = standard_rep(cfg.geometry.n)?;
                    let sharp = gauge.with_profile(dwall_core::profile::Profile::sharp())?;
                    let family = assemble_wall_family(&sharp, &rep, &cfg.sigma_cutoffs(), cfg.run.family_samples)?;
                    family.operator_at(s * family.length())
                }
                None => bulk_operator(&gauge, &cfg.geometry.cutoffs, &cfg.run)?,
            };
            op.write_dump(&path)?;
            println!("{} ({} x {}) written to {}", op.basis().describe(), op.dim(), op.dim(), path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
