use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ucc_cli::commands::{
    cmd_disentangle, cmd_eliminate, cmd_simulate, cmd_ucc2cc, cmd_verify, DisentangleOptions, EliminateOptions, Method,
    SimulateOptions, Ucc2ccOptions, VerifyOptions, DEFAULT_SEED,
};
use ucc_cli::report::{write_atomic, RunInfo, EXIT_INPUT};
use ucc_cli::{CliError, Format, Outcome};
use ucc_core::fockoracle::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "ucc", version, about = "Convert factorized unitary coupled-cluster ansatzes to coupled-cluster form")]
struct Cli {
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Euler,
    Series,
    Trotter,
    Disentangled,
    Sum,
}

#[derive(Subcommand)]
enum Command {
    /// Symbolic conversion of an ansatz file.
    Ucc2cc {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Compares UCC and converted states over sampled angles.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Prints the state produced by one evaluation path.
    Simulate {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Euler)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Extracts CC amplitudes from a state file or an ansatz file.
    Eliminate {
        input: PathBuf,
        #[arg(long)]
        max_rank: Option<usize>,
        /// Rebuild the state from the amplitudes and compare.
        #[arg(long)]
        roundtrip: bool,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Prints the three-factor disentangled form of one factor.
    Disentangle {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        reversed: bool,
    },
}

fn read(path: &PathBuf, command: &'static str, seed: u64) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| {
        let err = CliError::Input(format!("cannot read {}: {}", path.display(), e));
        Outcome::failed(&RunInfo::new(command, "", seed), &err)
    })
}

fn dispatch(cli: &Cli) -> Outcome {
    let seed = cli.seed;
    let go = |path: &PathBuf, name: &'static str, f: &dyn Fn(&str) -> Outcome| match read(path, name, seed) {
        Ok(text) => f(&text),
        Err(o) => o,
    };
    match &cli.command {
        Command::Ucc2cc { spec, tol } => go(spec, "ucc2cc", &|t| cmd_ucc2cc(t, seed, &Ucc2ccOptions { tol: *tol })),
        Command::Verify { spec, samples, tol } => go(spec, "verify", &|t| {
            cmd_verify(t, seed, &VerifyOptions { samples: *samples, tol: *tol })
        }),
        Command::Simulate { spec, method, steps } => {
            let method = match method {
                MethodArg::Euler => Method::Euler,
                MethodArg::Series => Method::Series,
                MethodArg::Trotter => Method::Trotter,
                MethodArg::Disentangled => Method::Disentangled,
                MethodArg::Sum => Method::Sum,
            };
            go(spec, "simulate", &|t| cmd_simulate(t, seed, &SimulateOptions { method, steps: *steps }))
        }
        Command::Eliminate { input, max_rank, roundtrip, tol } => go(input, "eliminate", &|t| {
            cmd_eliminate(
                t,
                seed,
                &EliminateOptions {
                    max_rank: *max_rank,
                    roundtrip: *roundtrip,
                    tol: *tol,
                },
            )
        }),
        Command::Disentangle { spec, index, reversed } => go(spec, "disentangle", &|t| {
            cmd_disentangle(t, seed, &DisentangleOptions { index: *index, reversed: *reversed })
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let outcome = dispatch(&cli);
    let rendered = outcome.render(format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &rendered) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return ExitCode::from(EXIT_INPUT as u8);
            }
            for w in &outcome.warnings {
                eprintln!("warning: {}", w);
            }
        }
        None => {
            print!("{}", rendered);
            if format == Format::Json {
                for w in &outcome.warnings {
                    eprintln!("warning: {}", w);
                }
            }
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
