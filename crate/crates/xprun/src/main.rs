use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xprun::commands::{cmd_run, cmd_rwa_check, cmd_sweep, cmd_trace, cmd_verify, report_json};
use xprun::output::{
    emit_csv, emit_rwa_csv, emit_trace_csv, format_float, write_rwa_csv, write_sweep_csv,
    write_trace_csv,
};
use xprun::{Config, XpError, XpResult};

#[derive(Parser)]
#[command(name = "xprun", version, about = "Run holonomic gate experiments from a config file")]
struct Cli {
    /// TOML config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate [gate] at [noise].delta.
    Run,
    /// Evaluate every protocol in [sweep] over its delta grid.
    Sweep,
    /// Logical populations during [gate] from |0>_L.
    Trace,
    /// Check the holonomy conditions of [gate].
    Verify {
        #[arg(long)]
        json: bool,
    },
    /// Compare the full modulated device with its effective coupling.
    RwaCheck,
}

fn csv_to_stdout(result: csv::Result<()>) -> XpResult<()> {
    result.map_err(|e| XpError::Csv {
        path: PathBuf::from("<stdout>"),
        message: e.to_string(),
    })
}

fn write_text(out: Option<&Path>, text: &str) -> XpResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| XpError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> XpResult<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run | Command::Sweep => {
            let rows = match cli.command {
                Command::Run => cmd_run(&cfg)?,
                _ => cmd_sweep(&cfg, cli.threads)?,
            };
            match out {
                Some(path) => emit_csv(&rows, path),
                None => csv_to_stdout(write_sweep_csv(&rows, io::stdout().lock())),
            }
        }
        Command::Trace => {
            let trace = cmd_trace(&cfg)?;
            match out {
                Some(path) => emit_trace_csv(&trace, path),
                None => csv_to_stdout(write_trace_csv(&trace, io::stdout().lock())),
            }
        }
        Command::Verify { json } => {
            let report = cmd_verify(&cfg)?;
            let text = if *json {
                format!("{:#}\n", report_json(&report))
            } else {
                format!("gate {} protocol {}\n{report}\n", cfg.gate.name, cfg.gate.protocol)
            };
            write_text(out, &text)
        }
        Command::RwaCheck => {
            let report = cmd_rwa_check(&cfg)?;
            let summary = format!(
                "rwa_deviation {}\nstep_ns {}\n",
                format_float(report.deviation),
                format_float(report.step)
            );
            match out {
                Some(path) => {
                    emit_rwa_csv(&report, path)?;
                    write_text(None, &summary)
                }
                None => {
                    eprint!("{summary}");
                    csv_to_stdout(write_rwa_csv(&report, io::stdout().lock()))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("xprun: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
