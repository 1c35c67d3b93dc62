use std::path::PathBuf;
use std::process::ExitCode;

use chainpart_cli::commands::{self, CliError, PlayArgs};
use chainpart_core::Mode;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "chainpart",
    version,
    about = "On-line chain partitioning of up-growing semi-orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the game value floor(phi * w) for w = 1..=W.
    Value {
        #[arg(long = "w", value_name = "W", value_parser = clap::value_parser!(u64).range(1..))]
        max_w: u64,
    },
    /// Play one game and optionally write its transcript.
    Play {
        #[command(flatten)]
        game: GameFlags,
        /// Transcript output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play w = 1..=W for each algorithm and compare with the bound.
    Sweep {
        #[arg(long = "w", value_name = "W", value_parser = clap::value_parser!(u64).range(1..))]
        max_w: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::UpGrowing)]
        mode: ModeArg,
        #[arg(long, default_value = "golden")]
        spoiler: String,
        /// Comma-separated algorithm names.
        #[arg(long, default_value = "alg", value_delimiter = ',')]
        algorithm: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay a transcript file and report the verdict.
    Verify { path: PathBuf },
    /// Run the upper-bound instrumentation on a transcript file.
    Prooflab { path: PathBuf },
    /// Fewest chains any algorithm can end with against a Spoiler.
    Adversary {
        #[arg(long)]
        w: usize,
        #[arg(long, default_value = "golden")]
        spoiler: String,
        #[arg(long, value_enum, default_value_t = ModeArg::UpGrowing)]
        mode: ModeArg,
        #[arg(long, default_value_t = chainpart_core::oracle::DEFAULT_NODE_CAP)]
        node_cap: u64,
    },
    /// Serve the session API over HTTP.
    Serve {
        #[arg(long, env = "GC_PORT", default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    #[value(alias = "up_growing", alias = "upgrowing")]
    UpGrowing,
    General,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::UpGrowing => Mode::UpGrowing,
            ModeArg::General => Mode::General,
        }
    }
}

#[derive(clap::Args)]
struct GameFlags {
    #[arg(long)]
    w: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::UpGrowing)]
    mode: ModeArg,
    #[arg(long, default_value = "golden")]
    spoiler: String,
    #[arg(long, default_value = "alg")]
    algorithm: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Presentation length for the random Spoiler.
    #[arg(long)]
    points: Option<usize>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Value { max_w } => commands::value(max_w),
        Command::Play { game, out } => commands::play(&PlayArgs {
            mode: game.mode.into(),
            w: game.w,
            spoiler: game.spoiler,
            algorithm: game.algorithm,
            seed: game.seed,
            points: game.points,
            out,
        }),
        Command::Sweep {
            max_w,
            mode,
            spoiler,
            algorithm,
            seed,
        } => commands::sweep(max_w as usize, mode.into(), &spoiler, &algorithm, seed),
        Command::Verify { path } => commands::verify(&path),
        Command::Prooflab { path } => commands::prooflab(&path),
        Command::Adversary {
            w,
            spoiler,
            mode,
            node_cap,
        } => commands::adversary(w, &spoiler, mode.into(), node_cap),
        Command::Serve { port } => commands::serve(port),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
