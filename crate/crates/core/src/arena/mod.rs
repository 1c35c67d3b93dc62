//! Referee, game loop and transcripts.
//!
//! The referee owns legality: every presentation is checked against the
//! semi-order axioms, the width budget and (in up-growing mode) maximality;
//! every assignment against chain validity. Strategies are never trusted.

mod session;
mod transcript;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{OrderError, PointId, SemiOrder};
use crate::partition::{
    algorithm_by_name, canonical_algorithm_name, AlgorithmError, ChainChoice, ChainId,
    ChainPartition, OnlineAlgorithm, PartitionError,
};
use crate::spoiler::{solve_ik, spoiler_by_name, Spoiler, StrategyError};

pub use session::{Actor, GameSession, HumanRole, StepOutcome};
pub use transcript::{Event, Fault, Outcome, Transcript, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every new point must be maximal.
    #[default]
    UpGrowing,
    General,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::UpGrowing => "up_growing",
            Mode::General => "general",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "up_growing" | "upgrowing" | "up" => Ok(Mode::UpGrowing),
            "general" => Ok(Mode::General),
            other => Err(format!(
                "unknown mode {other:?} (expected up_growing or general)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub mode: Mode,
    pub w: usize,
    pub spoiler: String,
    pub algorithm: String,
    pub seed: u64,
    /// Presentation length for the random Spoiler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
}

impl GameConfig {
    pub fn new(mode: Mode, w: usize, spoiler: &str, algorithm: &str) -> Self {
        GameConfig {
            mode,
            w,
            spoiler: spoiler.to_string(),
            algorithm: canonical_algorithm_name(algorithm),
            seed: 0,
            points: None,
            max_points: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = Some(points);
        self
    }

    /// Safety cap on presented points: `10 w (k + 2) + 2w` unless overridden.
    pub fn point_cap(&self) -> usize {
        if let Some(cap) = self.max_points {
            return cap;
        }
        let k = solve_ik(self.w.max(1) as u64).k().unwrap_or(0);
        let cap = 10 * self.w * (k + 2) + 2 * self.w;
        cap.max(self.points.unwrap_or(0))
    }

    /// Algorithm seed; kept apart from the Spoiler's stream.
    pub fn algorithm_seed(&self) -> u64 {
        self.seed ^ 0xA5A5_5A5A_DEAD_BEEF
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RefereeError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("presentation raises the width to {width}, above the budget {w}")]
    WidthExceeded { width: usize, w: usize },
    #[error("up-growing mode: the new point may not lie below {above:?}")]
    NotMaximal { above: Vec<PointId> },
    #[error("expected point id {expected}, got {got}")]
    IdMismatch { expected: PointId, got: PointId },
    #[error("it is not this side's turn")]
    NotYourTurn,
    #[error("the game is over")]
    GameOver,
    #[error("more than {cap} points presented")]
    PointCapExceeded { cap: usize },
    #[error("unknown strategy {name:?}")]
    UnknownStrategy { name: String },
    #[error("{strategy} cannot play in {mode} mode")]
    ModeMismatch { strategy: String, mode: Mode },
    #[error("width budget must be at least 1")]
    InvalidWidth,
    #[error("{0} points were never assigned")]
    Unassigned(usize),
}

impl RefereeError {
    /// snake_case name used on the wire.
    pub fn code(&self) -> String {
        match self {
            RefereeError::Order(e) => e.code().to_string(),
            RefereeError::Partition(e) => match e {
                PartitionError::InvalidChain { .. } => "invalid_chain",
                PartitionError::UnknownChain { .. } => "unknown_chain",
                PartitionError::AlreadyAssigned { .. } => "already_assigned",
                PartitionError::UnknownPoint { .. } => "unknown_point",
            }
            .to_string(),
            RefereeError::Algorithm(AlgorithmError::NotMaximal { .. }) => "not_maximal".to_string(),
            RefereeError::Strategy(e) => match e {
                StrategyError::InconsistentReply { .. } => "inconsistent_reply",
                StrategyError::PathOverflow { .. } => "path_overflow",
                StrategyError::Internal(_) => "strategy_internal",
            }
            .to_string(),
            RefereeError::WidthExceeded { .. } => "width_exceeded".to_string(),
            RefereeError::NotMaximal { .. } => "not_maximal".to_string(),
            RefereeError::IdMismatch { .. } => "id_mismatch".to_string(),
            RefereeError::NotYourTurn => "not_your_turn".to_string(),
            RefereeError::GameOver => "game_over".to_string(),
            RefereeError::PointCapExceeded { .. } => "point_cap_exceeded".to_string(),
            RefereeError::UnknownStrategy { .. } => "unknown_strategy".to_string(),
            RefereeError::ModeMismatch { .. } => "mode_mismatch".to_string(),
            RefereeError::InvalidWidth => "invalid_width".to_string(),
            RefereeError::Unassigned(_) => "unassigned".to_string(),
        }
    }
}

/// Live game state under referee control.
#[derive(Clone, Debug)]
pub struct Referee {
    mode: Mode,
    w: usize,
    order: SemiOrder,
    partition: ChainPartition,
    pending: Option<PointId>,
    events: Vec<Event>,
}

impl Referee {
    pub fn new(mode: Mode, w: usize) -> Self {
        Referee {
            mode,
            w,
            order: SemiOrder::new(),
            partition: ChainPartition::new(),
            pending: None,
            events: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn order(&self) -> &SemiOrder {
        &self.order
    }

    pub fn partition(&self) -> &ChainPartition {
        &self.partition
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// The presented point still waiting for its chain.
    pub fn pending(&self) -> Option<PointId> {
        self.pending
    }

    pub fn present(&mut self, down: &[PointId], up: &[PointId]) -> Result<PointId, RefereeError> {
        if self.pending.is_some() {
            return Err(RefereeError::NotYourTurn);
        }
        if self.mode == Mode::UpGrowing && !up.is_empty() {
            let mut above = up.to_vec();
            above.sort_unstable();
            return Err(RefereeError::NotMaximal { above });
        }
        let id = self.order.add_point(down, up)?;
        let width = self.order.width();
        if width > self.w {
            self.order.pop();
            return Err(RefereeError::WidthExceeded { width, w: self.w });
        }
        let mut down = down.to_vec();
        let mut up = up.to_vec();
        down.sort_unstable();
        up.sort_unstable();
        self.events.push(Event::Present { id, down, up });
        self.pending = Some(id);
        Ok(id)
    }

    pub fn assign(&mut self, choice: ChainChoice) -> Result<ChainId, RefereeError> {
        let p = self.pending.ok_or(RefereeError::NotYourTurn)?;
        let chain = self.partition.assign(&self.order, p, choice)?;
        self.events.push(Event::Assign { id: p, chain });
        self.pending = None;
        Ok(chain)
    }

    /// Maps a recorded chain id onto a choice: the next dense id means "new".
    pub fn choice_for(&self, chain: ChainId) -> ChainChoice {
        if chain == self.partition.chain_count() {
            ChainChoice::New
        } else {
            ChainChoice::Existing(chain)
        }
    }
}

/// Resolves both strategies named in the config.
pub fn strategies_for(
    config: &GameConfig,
) -> Result<(Box<dyn Spoiler>, Box<dyn OnlineAlgorithm>), RefereeError> {
    let spoiler = spoiler_by_name(
        &config.spoiler,
        config.mode,
        config.w,
        config.seed,
        config.points,
    )
    .ok_or_else(|| RefereeError::UnknownStrategy {
        name: config.spoiler.clone(),
    })?;
    let algorithm =
        algorithm_by_name(&config.algorithm).ok_or_else(|| RefereeError::UnknownStrategy {
            name: config.algorithm.clone(),
        })?;
    Ok((spoiler, algorithm))
}

/// Plays the named strategies against each other.
pub fn run_game(config: &GameConfig) -> Result<Transcript, RefereeError> {
    let (spoiler, algorithm) = strategies_for(config)?;
    run_game_with(config, spoiler, algorithm)
}

/// Plays explicit strategy objects; the config only supplies mode, width and seed.
pub fn run_game_with(
    config: &GameConfig,
    spoiler: Box<dyn Spoiler>,
    algorithm: Box<dyn OnlineAlgorithm>,
) -> Result<Transcript, RefereeError> {
    let mut session =
        GameSession::with_strategies(config.clone(), HumanRole::None, spoiler, algorithm)?;
    while session.next_actor() != Actor::Done {
        session.step()?;
    }
    Ok(session.transcript())
}

/// Re-executes every validation in the transcript. Problems are reported in
/// the verdict, never raised.
pub fn replay(transcript: &Transcript) -> Verdict {
    let (referee, fault) = replay_events(transcript);
    let (outcome, fault) = match fault {
        Some((outcome, fault)) => (outcome, Some(fault)),
        None => (Outcome::Completed, None),
    };
    let chains_used = referee.partition().chain_count();
    let consistent = outcome == transcript.outcome;
    Verdict {
        ok: fault.is_none() && consistent && chains_used == transcript.chains_used,
        outcome,
        consistent,
        chains_used,
        fault,
    }
}

/// Replays as far as possible, returning the final referee state and the
/// first fault with the side responsible for it.
pub fn replay_events(transcript: &Transcript) -> (Referee, Option<(Outcome, Fault)>) {
    let config = &transcript.config;
    let mut referee = Referee::new(config.mode, config.w);
    let fault = |index: usize, err: RefereeError| Fault {
        event_index: index,
        code: err.code(),
        message: err.to_string(),
    };
    if config.w == 0 {
        return (
            referee,
            Some((Outcome::SpoilerFault, fault(0, RefereeError::InvalidWidth))),
        );
    }
    for (index, event) in transcript.events.iter().enumerate() {
        match event {
            Event::Present { id, down, up } => {
                let expected = PointId(referee.order().len());
                let result = if referee.pending().is_some() {
                    Err(RefereeError::NotYourTurn)
                } else if *id != expected {
                    Err(RefereeError::IdMismatch { expected, got: *id })
                } else {
                    referee.present(down, up).map(|_| ())
                };
                if let Err(err) = result {
                    return (referee, Some((Outcome::SpoilerFault, fault(index, err))));
                }
            }
            Event::Assign { id, chain } => {
                let result = match referee.pending() {
                    None => Err(RefereeError::NotYourTurn),
                    Some(p) if p != *id => Err(RefereeError::IdMismatch {
                        expected: p,
                        got: *id,
                    }),
                    Some(_) => {
                        let choice = referee.choice_for(*chain);
                        referee.assign(choice).map(|_| ())
                    }
                };
                if let Err(err) = result {
                    return (referee, Some((Outcome::AlgorithmFault, fault(index, err))));
                }
            }
        }
    }
    if referee.pending().is_some() && transcript.outcome == Outcome::Completed {
        let index = transcript.events.len();
        return (
            referee,
            Some((
                Outcome::AlgorithmFault,
                fault(index, RefereeError::Unassigned(1)),
            )),
        );
    }
    (referee, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spoiler::game_value;

    #[test]
    fn golden_against_alg_small_widths() {
        let t = run_game(&GameConfig::new(Mode::UpGrowing, 2, "golden", "alg")).unwrap();
        assert_eq!(t.chains_used, 3);
        assert_eq!(t.outcome, Outcome::Completed);

        let t = run_game(&GameConfig::new(Mode::UpGrowing, 1, "golden", "alg")).unwrap();
        assert_eq!(t.chains_used, 1);
        assert_eq!(t.point_count(), 1);

        for w in 1..=12 {
            let t = run_game(&GameConfig::new(Mode::UpGrowing, w, "golden", "alg")).unwrap();
            assert_eq!(t.chains_used as u64, game_value(w as u64), "w={w}");
        }
    }

    #[test]
    fn doubler_against_first_fit() {
        let t = run_game(&GameConfig::new(Mode::General, 2, "doubler", "first_fit")).unwrap();
        assert_eq!(t.chains_used, 3);
    }

    #[test]
    fn configuration_errors() {
        let bad = GameConfig::new(Mode::UpGrowing, 2, "golden", "nope");
        assert_eq!(run_game(&bad).unwrap_err().code(), "unknown_strategy");
        let bad = GameConfig::new(Mode::General, 2, "golden", "alg");
        assert!(matches!(
            run_game(&bad),
            Err(RefereeError::ModeMismatch { .. })
        ));
        let bad = GameConfig::new(Mode::UpGrowing, 2, "doubler", "first_fit");
        assert!(matches!(
            run_game(&bad),
            Err(RefereeError::ModeMismatch { .. })
        ));
        let mut capped = GameConfig::new(Mode::UpGrowing, 5, "golden", "alg");
        capped.max_points = Some(3);
        assert_eq!(
            run_game(&capped),
            Err(RefereeError::PointCapExceeded { cap: 3 })
        );
    }

    #[test]
    fn canonical_wire_layout() {
        let t = run_game(&GameConfig::new(Mode::UpGrowing, 2, "golden", "alg")).unwrap();
        let json = t.to_json();
        assert!(json.starts_with(
            r#"{"config":{"mode":"up_growing","w":2,"spoiler":"golden","algorithm":"alg","seed":0},"events":[{"present":{"id":0,"down":[],"up":[]}},{"assign":{"id":0,"chain":0}},"#
        ));
        assert!(json.ends_with(r#""chains_used":3,"outcome":"completed"}"#));
        assert_eq!(Transcript::from_json(&json).unwrap(), t);
    }

    #[test]
    fn replay_accepts_generated_games() {
        let t = run_game(&GameConfig::new(Mode::UpGrowing, 6, "golden", "alg")).unwrap();
        let v = replay(&t);
        assert!(v.ok, "{v:?}");
        assert_eq!(v.chains_used, t.chains_used);
    }

    #[test]
    fn tampered_assignment_is_an_algorithm_fault() {
        let mut t = run_game(&GameConfig::new(Mode::UpGrowing, 2, "golden", "alg")).unwrap();
        // The last point lies above p0 only; chain 0 holds p0 < p2 with p2 incomparable to it.
        let idx = t
            .events
            .iter()
            .rposition(|e| matches!(e, Event::Assign { .. }))
            .unwrap();
        if let Event::Assign { chain, .. } = &mut t.events[idx] {
            *chain = 0;
        }
        let v = replay(&t);
        assert!(!v.ok);
        assert_eq!(v.outcome, Outcome::AlgorithmFault);
        let fault = v.fault.unwrap();
        assert_eq!(fault.event_index, idx);
        assert_eq!(fault.code, "invalid_chain");
    }

    #[test]
    fn three_plus_one_presentation_is_a_spoiler_fault() {
        let config = GameConfig::new(Mode::UpGrowing, 4, "random", "first_fit");
        let mut events = Vec::new();
        let downs: [&[usize]; 4] = [&[], &[0], &[0, 1], &[]];
        for (i, d) in downs.iter().enumerate() {
            events.push(Event::Present {
                id: PointId(i),
                down: d.iter().copied().map(PointId).collect(),
                up: vec![],
            });
            events.push(Event::Assign {
                id: PointId(i),
                chain: if i == 3 { 1 } else { 0 },
            });
        }
        let t = Transcript {
            config,
            events,
            chains_used: 2,
            outcome: Outcome::Completed,
        };
        let v = replay(&t);
        assert_eq!(v.outcome, Outcome::SpoilerFault);
        let fault = v.fault.unwrap();
        assert_eq!(fault.event_index, 6);
        assert_eq!(fault.code, "three_plus_one");
        assert!(fault.message.contains("p0 < p1 < p2"), "{}", fault.message);
    }

    #[test]
    fn width_budget_is_enforced_and_rolled_back() {
        let mut r = Referee::new(Mode::UpGrowing, 1);
        r.present(&[], &[]).unwrap();
        r.assign(ChainChoice::New).unwrap();
        assert_eq!(
            r.present(&[], &[]),
            Err(RefereeError::WidthExceeded { width: 2, w: 1 })
        );
        assert_eq!(r.order().len(), 1);
        assert_eq!(r.events().len(), 2);
        assert!(matches!(
            r.present(&[], &[PointId(0)]),
            Err(RefereeError::NotMaximal { .. })
        ));
    }
}
