//! `msheaf`: forcing verdicts, propagator tables and generic-model checks
//! driven by a plain-text config.

mod config;
mod output;
mod run;
mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::Config;
use output::Format;
use run::{Outcome, Overrides};

#[derive(Parser)]
#[command(name = "msheaf", version, about = "Forcing over sheaves of metric structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, default_value = "table")]
    format: Format,
    /// Seed for random conditions; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Verdict tolerance; overrides `[resolution] tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Filter chain depth; overrides the depth in chain specs.
    #[arg(long, global = true)]
    depth: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Force each `[condition]` at its location.
    Force { config: PathBuf },
    /// Tabulate the wavepacket propagator against the exact kernel.
    Propagator { config: PathBuf },
    /// Compare the generic model with forcing along a chain.
    Gmt { config: PathBuf },
    /// Approximate `g(0)` by pairing `g` with shrinking packets.
    Delta { config: PathBuf },
    /// Run every command whose block appears in the config.
    Report { config: PathBuf },
}

fn load(path: &Path) -> anyhow::Result<(Config, PathBuf)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = Config::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match go(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("msheaf: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check passed.
fn go(cli: &Cli) -> anyhow::Result<bool> {
    let ov = Overrides { seed: cli.seed, tol: cli.tol, depth: cli.depth };
    let (path, which) = match &cli.command {
        Command::Force { config } => (config, "force"),
        Command::Propagator { config } => (config, "propagator"),
        Command::Gmt { config } => (config, "gmt"),
        Command::Delta { config } => (config, "delta"),
        Command::Report { config } => (config, "report"),
    };
    let (cfg, dir) = load(path)?;
    let ctx = || format!("in {}", path.display());
    let one = |name: &str| -> anyhow::Result<Outcome> {
        match name {
            "force" => run::force(&cfg, &dir, &ov),
            "propagator" => run::propagator(&cfg),
            "gmt" => run::gmt(&cfg, &dir, &ov),
            _ => run::delta(&cfg),
        }
        .with_context(ctx)
    };
    let names: Vec<&str> = if which == "report" {
        let has = |k: &str| cfg.block(k).is_some();
        let mut v = Vec::new();
        if has("condition") && !has("gmt") {
            v.push("force");
        }
        for k in ["propagator", "gmt", "delta"] {
            if has(k) {
                v.push(k);
            }
        }
        if v.is_empty() {
            anyhow::bail!("{}: nothing to run", path.display());
        }
        v
    } else {
        vec![which]
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut ok = true;
    for (i, name) in names.iter().enumerate() {
        let o = one(name)?;
        if which == "report" && cli.format == Format::Table {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "== {name}")?;
        }
        output::write(&mut out, cli.format, o.columns, &o.records)?;
        ok &= !o.failed;
    }
    Ok(ok)
}
