//! Subcommand bodies. Each returns the process exit code.

use std::fmt;
use std::path::{Path, PathBuf};

use chainpart_core::arena::replay_events;
use chainpart_core::oracle::{exhaustive_adversary_with, AdversaryError};
use chainpart_core::prooflab::{full_report, ProofLabError};
use chainpart_core::{
    game_value, run_game, spoiler_by_name, GameConfig, Mode, Outcome, RefereeError, Transcript,
};

#[derive(Debug)]
pub enum CliError {
    Referee(RefereeError),
    Adversary(AdversaryError),
    ProofLab(ProofLabError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    BadTranscript {
        path: PathBuf,
        source: serde_json::Error,
    },
    Serve(std::io::Error),
}

/// `snake_case` code to the `CamelCase` name shown to users.
fn camel(code: &str) -> String {
    code.split('_')
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
                .unwrap_or_default()
        })
        .collect()
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Referee(e) => write!(f, "{}: {e}", camel(&e.code())),
            CliError::Adversary(AdversaryError::UnknownStrategy { name }) => {
                write!(f, "UnknownStrategy: unknown strategy {name:?}")
            }
            CliError::Adversary(e) => write!(f, "{e}"),
            CliError::ProofLab(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::BadTranscript { path, source } => {
                write!(f, "{}: not a transcript: {source}", path.display())
            }
            CliError::Serve(e) => write!(f, "server error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Adversary(AdversaryError::BudgetExceeded { .. }) => 3,
            CliError::Referee(_)
            | CliError::Adversary(_)
            | CliError::Io { .. }
            | CliError::BadTranscript { .. } => 2,
            CliError::ProofLab(_) | CliError::Serve(_) => 1,
        }
    }
}

pub fn value(max_w: u64) -> Result<u8, CliError> {
    for w in 1..=max_w {
        println!("{w}\t{}", game_value(w));
    }
    Ok(0)
}

pub struct PlayArgs {
    pub mode: Mode,
    pub w: usize,
    pub spoiler: String,
    pub algorithm: String,
    pub seed: u64,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Value of the game in each mode.
pub fn mode_bound(mode: Mode, w: usize) -> u64 {
    match mode {
        Mode::UpGrowing => game_value(w as u64),
        Mode::General => (2 * w as u64).saturating_sub(1),
    }
}

fn report_fault(t: &Transcript) {
    if let (_, Some((_, fault))) = replay_events(t) {
        eprintln!(
            "fault at event {}: {}: {}",
            fault.event_index, fault.code, fault.message
        );
    }
}

pub fn play(args: &PlayArgs) -> Result<u8, CliError> {
    let mut config =
        GameConfig::new(args.mode, args.w, &args.spoiler, &args.algorithm).with_seed(args.seed);
    config.points = args.points;
    let t = run_game(&config).map_err(CliError::Referee)?;
    if let Some(path) = &args.out {
        std::fs::write(path, t.to_json_pretty() + "\n").map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    println!(
        "chains={} bound={}",
        t.chains_used,
        mode_bound(args.mode, args.w)
    );
    if t.outcome != Outcome::Completed {
        report_fault(&t);
        return Ok(1);
    }
    Ok(0)
}

pub fn sweep(
    max_w: usize,
    mode: Mode,
    spoiler: &str,
    algorithms: &[String],
    seed: u64,
) -> Result<u8, CliError> {
    let mut all_ok = true;
    println!("w\talgorithm\tchains\tbound\tok");
    for w in 1..=max_w {
        for algorithm in algorithms {
            let config = GameConfig::new(mode, w, spoiler, algorithm).with_seed(seed);
            let t = run_game(&config).map_err(CliError::Referee)?;
            let width = replay_events(&t).0.order().width();
            // Lower bounds the Spoiler guarantees; upper bounds the algorithm guarantees.
            let lower = match spoiler {
                "golden" => game_value(w as u64) as usize,
                "doubler" => 2 * w - 1,
                _ => width,
            };
            let upper = match (mode, config.algorithm.as_str()) {
                (Mode::UpGrowing, "alg") => Some(game_value(width as u64) as usize),
                (Mode::General, "first_fit") => Some((2 * width).saturating_sub(1)),
                _ => None,
            };
            let ok = t.outcome == Outcome::Completed
                && t.chains_used >= lower
                && upper.is_none_or(|u| t.chains_used <= u);
            all_ok &= ok;
            println!(
                "{w}\t{}\t{}\t{lower}\t{}",
                config.algorithm,
                t.chains_used,
                if ok { "yes" } else { "NO" }
            );
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn read_transcript(path: &Path) -> Result<Transcript, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Transcript::from_json(&text).map_err(|source| CliError::BadTranscript {
        path: path.to_path_buf(),
        source,
    })
}

pub fn verify(path: &Path) -> Result<u8, CliError> {
    let t = read_transcript(path)?;
    let verdict = chainpart_core::replay(&t);
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict).expect("verdicts serialize")
    );
    if verdict.ok {
        return Ok(0);
    }
    match &verdict.fault {
        Some(fault) => eprintln!(
            "fault at event {}: {}: {}",
            fault.event_index, fault.code, fault.message
        ),
        None => eprintln!(
            "transcript claims {} chains and outcome {:?}; replay gives {} and {:?}",
            t.chains_used, t.outcome, verdict.chains_used, verdict.outcome
        ),
    }
    Ok(1)
}

pub fn prooflab(path: &Path) -> Result<u8, CliError> {
    let t = read_transcript(path)?;
    let report = full_report(&t).map_err(CliError::ProofLab)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("reports serialize")
    );
    Ok(if report.passed() { 0 } else { 1 })
}

pub fn adversary(w: usize, spoiler: &str, mode: Mode, node_cap: u64) -> Result<u8, CliError> {
    let strategy = spoiler_by_name(spoiler, mode, w, 0, None).ok_or_else(|| {
        CliError::Adversary(AdversaryError::UnknownStrategy {
            name: spoiler.to_string(),
        })
    })?;
    let result =
        exhaustive_adversary_with(strategy, w, mode, node_cap).map_err(CliError::Adversary)?;
    println!("{}", result.min_chains);
    Ok(0)
}

pub fn serve(port: u16) -> Result<u8, CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
    runtime
        .block_on(async {
            let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
            eprintln!("listening on http://{}", listener.local_addr()?);
            axum::serve(listener, crate::service::router())
                .with_graceful_shutdown(async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
        })
        .map_err(CliError::Serve)?;
    Ok(0)
}
