//! `stnc`: BER sweeps, EXIT curves, oracle self-tests and file-level codec access.

mod commands;
mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use toml::Value;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Runtime(_) => "runtime",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "stnc", version, about = "Space-time and network coded cooperation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any configuration value by its dotted name (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory receiving every artifact of the run.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Baseline {
    None,
    Xor,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExitDecoder {
    Inner,
    Outer,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo BER/FER sweep over the Eb/N0 grid, written to ber.csv.
    Ber {
        #[command(flatten)]
        common: Common,
        /// Replace the convolutional network code by the XOR baseline.
        #[arg(long)]
        baseline: Option<Baseline>,
        /// SNR advantage of the relay to destination link.
        #[arg(long, allow_hyphen_values = true)]
        relay_offset_db: Option<f64>,
    },
    /// EXIT transfer curves of the column and row decoders, written to exit.csv.
    Exit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        decoder: Option<ExitDecoder>,
    },
    /// Check the fast code paths against brute-force oracles.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
    /// Encode a message file into a stacked bit frame (frame.bits).
    Encode {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Jointly decode an LLR or bit dump into message bytes (decoded.bin).
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
}

impl Common {
    /// `--set` values first, then the dedicated flags, which win.
    fn overrides(&self, extra: Vec<String>) -> Vec<String> {
        let mut out = self.set.clone();
        if let Some(d) = &self.out_dir {
            out.push(format!("out_dir={}", Value::String(d.clone())));
        }
        if let Some(s) = self.seed {
            out.push(format!("seed={s}"));
        }
        if let Some(t) = self.threads {
            out.push(format!("threads={t}"));
        }
        out.extend(extra);
        out
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common, extra) = match &cli.command {
        Command::Ber { common, baseline, relay_offset_db } => {
            let mut extra = Vec::new();
            if let Some(b) = baseline {
                let scheme = match b {
                    Baseline::None => "proposed",
                    Baseline::Xor => "xor",
                };
                extra.push(format!("ber.scheme={scheme}"));
            }
            if let Some(db) = relay_offset_db {
                extra.push(format!("channel.relay_offset_db={db:?}"));
            }
            ("ber", common, extra)
        }
        Command::Exit { common, decoder } => {
            let extra = decoder
                .map(|d| {
                    let v = match d {
                        ExitDecoder::Inner => "inner",
                        ExitDecoder::Outer => "outer",
                        ExitDecoder::Both => "both",
                    };
                    vec![format!("exit.decoder={v}")]
                })
                .unwrap_or_default();
            ("exit", common, extra)
        }
        Command::Selftest { common } => ("selftest", common, Vec::new()),
        Command::Encode { common, .. } => ("encode", common, Vec::new()),
        Command::Decode { common, .. } => ("decode", common, Vec::new()),
    };
    let cfg = config::RunConfig::load(common.config.as_deref(), &common.overrides(extra))?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Ber { .. } => commands::ber(name, &cfg),
        Command::Exit { .. } => commands::exit(name, &cfg),
        Command::Selftest { .. } => selftest::run(name, &cfg),
        Command::Encode { input, .. } => commands::encode(name, &cfg, input),
        Command::Decode { input, .. } => commands::decode(name, &cfg, input),
    }
}

fn report(e: &CliError) -> ExitCode {
    let msg = e.to_string().replace(['\n', '\r'], " ");
    eprintln!("error[{}]: {}", e.kind(), msg.trim());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ").to_string();
            return report(&CliError::Config(first));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
