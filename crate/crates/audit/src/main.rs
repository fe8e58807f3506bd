use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsic_audit::config::CheckSpec;
use dsic_audit::{load_config, parse_config, render_text, run_audit, AuditConfig, ConfigError, RunOptions, EXAMPLE1_AUDIT};

#[derive(Parser)]
#[command(name = "dsic-audit", version, about = "Audit social choice functions for dominant-strategy implementability on a type grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Write the JSON report to this path
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every sampler; falls back to DSIC_AUDIT_SEED, then the config
    #[arg(long, global = true, env = "DSIC_AUDIT_SEED")]
    seed: Option<u64>,

    /// Grid resolution for every agent
    #[arg(long, global = true)]
    resolution: Option<usize>,

    /// Tolerance override, e.g. `fit=1e-7` (numeric, tie, boost, fit)
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,

    /// Worker threads for independent checks
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Leave timing out of the JSON report
    #[arg(long, global = true)]
    no_timing: bool,

    /// Print the JSON report instead of the text table
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check the config lists
    Audit { config: PathBuf },
    /// Fit an affine maximizer to the mechanism
    Fit { config: PathBuf },
    /// Synthesize payments, verify them and compare with the configured rule
    Payments { config: PathBuf },
    /// Calibrate offsets and run the neutralize-then-fit pipeline
    Calibrate { config: PathBuf },
    /// Check the induced ordering's axioms and fit a linear representation
    Order { config: PathBuf },
    /// Audit the bundled two-agent bounded-domain example
    DemoExample1,
}

fn with_checks(mut config: AuditConfig, names: &[&str]) -> AuditConfig {
    let old = std::mem::take(&mut config.checks);
    config.checks = names
        .iter()
        .map(|name| {
            old.iter().find(|c| c.name == *name).cloned().unwrap_or_else(|| CheckSpec {
                name: (*name).into(),
                expect: None,
                options: Default::default(),
            })
        })
        .collect();
    config
}

fn apply_flags(mut config: AuditConfig, flags: &Flags) -> Result<AuditConfig, ConfigError> {
    if let Some(seed) = flags.seed {
        config.seed = Some(seed);
    }
    if let Some(r) = flags.resolution {
        config.resolution = vec![r; config.agents];
    }
    for t in &flags.tolerances {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| ConfigError::Schema { field: "--tolerance".into(), message: format!("expected NAME=VALUE, got `{t}`") })?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| ConfigError::Schema { field: "--tolerance".into(), message: format!("`{value}` is not a number") })?;
        config.tolerances.set(name.trim(), value)?;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, include_payments) = match &cli.command {
        Command::Audit { config } => (load_config(config), false),
        Command::Fit { config } => (load_config(config).map(|c| with_checks(c, &["affine-fit"])), false),
        Command::Payments { config } => (
            load_config(config).map(|c| with_checks(c, &["cycle-monotonicity", "ic-verify", "revenue-equivalence"])),
            true,
        ),
        Command::Calibrate { config } => {
            (load_config(config).map(|c| with_checks(c, &["calibrate-kappa", "neutralize-and-fit"])), false)
        }
        Command::Order { config } => (load_config(config).map(|c| with_checks(c, &["order-axioms", "order-fit"])), false),
        Command::DemoExample1 => (parse_config(EXAMPLE1_AUDIT), false),
    };
    let opts = RunOptions { jobs: cli.flags.jobs.max(1), timing: !cli.flags.no_timing, include_payments };
    let report = match config.and_then(|c| apply_flags(c, &cli.flags)).and_then(|c| run_audit(&c, &opts)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.flags.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.flags.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", render_text(&report));
    }
    ExitCode::from(report.exit_code() as u8)
}
