use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperabsorb::check::{run_checks, Fault};
use hyperabsorb::cli::{
    parse_run_config, parse_sweep_config, run_scenario, run_sweep, validate_tolerance, write_report,
    write_sweep, CliError, ConfigError, OutputFormat, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK,
};

/// Two-atom light absorption with recoil: probabilities, entanglement and hyperentanglement.
#[derive(Parser)]
#[command(name = "hyperabsorb", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output format, overriding the configuration file.
    #[arg(long, global = true, value_parser = parse_format)]
    output: Option<OutputFormat>,
    /// Relative tolerance for product-state tests, in (0, 1).
    #[arg(long, global = true, value_parser = parse_tolerance)]
    tolerance: Option<f64>,
    /// Suppress diagnostics on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Run { config: PathBuf },
    /// Evaluate a scenario over a parameter grid.
    Sweep { config: PathBuf },
    /// Run the built-in reproduction checks.
    Check {
        #[arg(long, hide = true, default_value = "none")]
        inject_fault: Fault,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    validate_tolerance(v)
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(ConfigError {
            line: None,
            message: format!("{}: {e}", path.display()),
        })
    })
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let g = &cli.global;
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = parse_run_config(&read_config(config)?)?;
            cfg.output = g.output.unwrap_or(cfg.output);
            cfg.product_tolerance = g.tolerance.unwrap_or(cfg.product_tolerance);
            let report = run_scenario(&cfg)?;
            if report.linear_regime_warning && !g.quiet {
                eprintln!("warning: |alpha| or |gamma| exceeds the linear-regime bound");
            }
            write_report(&mut out, &report, cfg.output)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { config } => {
            let mut cfg = parse_sweep_config(&read_config(config)?)?;
            cfg.base.output = g.output.unwrap_or(cfg.base.output);
            cfg.base.product_tolerance = g.tolerance.unwrap_or(cfg.base.product_tolerance);
            let records = run_sweep(&cfg);
            write_sweep(&mut out, &cfg.axes, &records, cfg.base.output)?;
            if !g.quiet {
                for r in records.iter().filter(|r| r.error.is_some()) {
                    eprintln!("point {}: {}", r.point, r.error.as_deref().unwrap_or_default());
                }
            }
            Ok(records.iter().map(|r| r.exit_code).max().unwrap_or(EXIT_OK))
        }
        Command::Check { inject_fault } => {
            if *inject_fault != Fault::None && !g.quiet {
                eprintln!("injecting fault: {inject_fault}");
            }
            let outcomes = run_checks(*inject_fault);
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            writeln!(
                out,
                "{} of {} checks passed",
                outcomes.len() - failed,
                outcomes.len()
            )?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
