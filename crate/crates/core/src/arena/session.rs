//! Step-wise game driver shared by the batch runner and the HTTP service.

use serde::{Deserialize, Serialize};

use super::{
    strategies_for, Event, Fault, GameConfig, Mode, Outcome, Referee, RefereeError, Transcript,
};
use crate::order::PointId;
use crate::partition::{ChainChoice, ChainId, OnlineAlgorithm};
use crate::spoiler::{Assignment, Spoiler, SpoilerMove};

/// Which side, if any, is played from outside.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanRole {
    #[default]
    None,
    Algorithm,
    Spoiler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Spoiler,
    Algorithm,
    Done,
}

/// Result of one accepted half-move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Presented {
        id: PointId,
    },
    Assigned {
        id: PointId,
        chain: ChainId,
    },
    Finished {
        chains_used: usize,
    },
    /// An automated strategy broke the rules; the game is over.
    Fault(Fault),
}

/// A game in progress. Illegal human moves are rejected and leave the state
/// untouched; illegal automated moves are recorded and end the game.
pub struct GameSession {
    config: GameConfig,
    human: HumanRole,
    referee: Referee,
    spoiler: Box<dyn Spoiler>,
    algorithm: Box<dyn OnlineAlgorithm>,
    last: Option<Assignment>,
    /// Events past the referee's, i.e. a rejected automated move.
    rejected: Option<Event>,
    outcome: Option<Outcome>,
    fault: Option<Fault>,
}

impl GameSession {
    pub fn new(config: GameConfig, human: HumanRole) -> Result<Self, RefereeError> {
        let (spoiler, algorithm) = strategies_for(&config)?;
        Self::with_strategies(config, human, spoiler, algorithm)
    }

    pub fn with_strategies(
        config: GameConfig,
        human: HumanRole,
        spoiler: Box<dyn Spoiler>,
        algorithm: Box<dyn OnlineAlgorithm>,
    ) -> Result<Self, RefereeError> {
        if config.w == 0 {
            return Err(RefereeError::InvalidWidth);
        }
        // A human side plays by the referee's rules only.
        if human != HumanRole::Spoiler
            && config.mode == Mode::UpGrowing
            && spoiler.requires_general()
        {
            return Err(RefereeError::ModeMismatch {
                strategy: spoiler.name().to_string(),
                mode: config.mode,
            });
        }
        if human != HumanRole::Algorithm
            && config.mode == Mode::General
            && !algorithm.supports_general()
        {
            return Err(RefereeError::ModeMismatch {
                strategy: algorithm.name().to_string(),
                mode: config.mode,
            });
        }
        Ok(GameSession {
            referee: Referee::new(config.mode, config.w),
            config,
            human,
            spoiler,
            algorithm,
            last: None,
            rejected: None,
            outcome: None,
            fault: None,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn human_role(&self) -> HumanRole {
        self.human
    }

    pub fn referee(&self) -> &Referee {
        &self.referee
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn fault(&self) -> Option<&Fault> {
        self.fault.as_ref()
    }

    pub fn next_actor(&self) -> Actor {
        if self.outcome.is_some() {
            Actor::Done
        } else if self.referee.pending().is_some() {
            Actor::Algorithm
        } else {
            Actor::Spoiler
        }
    }

    /// Whether the side to move is played from outside.
    pub fn awaiting_human(&self) -> bool {
        match self.next_actor() {
            Actor::Spoiler => self.human == HumanRole::Spoiler,
            Actor::Algorithm => self.human == HumanRole::Algorithm,
            Actor::Done => false,
        }
    }

    pub fn events(&self) -> Vec<Event> {
        let mut events = self.referee.events().to_vec();
        events.extend(self.rejected.clone());
        events
    }

    /// The record so far. An unfinished game is reported as completed at
    /// its current prefix.
    pub fn transcript(&self) -> Transcript {
        Transcript {
            config: self.config.clone(),
            events: self.events(),
            chains_used: self.referee.partition().chain_count(),
            outcome: self.outcome.unwrap_or(Outcome::Completed),
        }
    }

    /// Advances the automated side by one half-move.
    pub fn step(&mut self) -> Result<StepOutcome, RefereeError> {
        match self.next_actor() {
            Actor::Done => Err(RefereeError::GameOver),
            _ if self.awaiting_human() => Err(RefereeError::NotYourTurn),
            Actor::Spoiler => self.spoiler_step(),
            Actor::Algorithm => self.algorithm_step(),
        }
    }

    pub fn human_present(
        &mut self,
        down: &[PointId],
        up: &[PointId],
    ) -> Result<StepOutcome, RefereeError> {
        self.human_turn(HumanRole::Spoiler, Actor::Spoiler)?;
        self.check_cap()?;
        let id = self.referee.present(down, up)?;
        Ok(StepOutcome::Presented { id })
    }

    pub fn human_assign(&mut self, choice: ChainChoice) -> Result<StepOutcome, RefereeError> {
        self.human_turn(HumanRole::Algorithm, Actor::Algorithm)?;
        let id = self
            .referee
            .pending()
            .expect("algorithm turn has a pending point");
        let chain = self.referee.assign(choice)?;
        self.last = Some(Assignment { point: id, chain });
        Ok(StepOutcome::Assigned { id, chain })
    }

    /// A human Spoiler ends the game.
    pub fn stop(&mut self) -> Result<StepOutcome, RefereeError> {
        self.human_turn(HumanRole::Spoiler, Actor::Spoiler)?;
        Ok(self.finish())
    }

    fn human_turn(&self, role: HumanRole, actor: Actor) -> Result<(), RefereeError> {
        match self.next_actor() {
            Actor::Done => Err(RefereeError::GameOver),
            a if a == actor && self.human == role => Ok(()),
            _ => Err(RefereeError::NotYourTurn),
        }
    }

    fn check_cap(&self) -> Result<(), RefereeError> {
        let cap = self.config.point_cap();
        if self.referee.order().len() >= cap {
            return Err(RefereeError::PointCapExceeded { cap });
        }
        Ok(())
    }

    fn finish(&mut self) -> StepOutcome {
        self.outcome = Some(Outcome::Completed);
        StepOutcome::Finished {
            chains_used: self.referee.partition().chain_count(),
        }
    }

    fn record_fault(
        &mut self,
        outcome: Outcome,
        rejected: Option<Event>,
        err: RefereeError,
    ) -> StepOutcome {
        let fault = Fault {
            event_index: self.referee.events().len(),
            code: err.code(),
            message: err.to_string(),
        };
        self.rejected = rejected;
        self.outcome = Some(outcome);
        self.fault = Some(fault.clone());
        StepOutcome::Fault(fault)
    }

    fn spoiler_step(&mut self) -> Result<StepOutcome, RefereeError> {
        let mv = self
            .spoiler
            .next(self.referee.order(), self.referee.partition(), self.last);
        match mv {
            Err(err) => Ok(self.record_fault(Outcome::SpoilerFault, None, err.into())),
            Ok(SpoilerMove::Done) => Ok(self.finish()),
            Ok(SpoilerMove::Present { down, up }) => {
                self.check_cap()?;
                match self.referee.present(&down, &up) {
                    Ok(id) => Ok(StepOutcome::Presented { id }),
                    Err(err) => {
                        let id = PointId(self.referee.order().len());
                        let event = Event::Present { id, down, up };
                        Ok(self.record_fault(Outcome::SpoilerFault, Some(event), err))
                    }
                }
            }
        }
    }

    fn algorithm_step(&mut self) -> Result<StepOutcome, RefereeError> {
        let p = self
            .referee
            .pending()
            .expect("algorithm turn has a pending point");
        let seed = self.config.algorithm_seed();
        let choice =
            match self
                .algorithm
                .choose(self.referee.order(), self.referee.partition(), p, seed)
            {
                Ok(choice) => choice,
                Err(err) => {
                    return Ok(self.record_fault(Outcome::AlgorithmFault, None, err.into()))
                }
            };
        match self.referee.assign(choice) {
            Ok(chain) => {
                self.last = Some(Assignment { point: p, chain });
                Ok(StepOutcome::Assigned { id: p, chain })
            }
            Err(err) => {
                let chain = match choice {
                    ChainChoice::Existing(c) => c,
                    ChainChoice::New => self.referee.partition().chain_count(),
                };
                Ok(self.record_fault(
                    Outcome::AlgorithmFault,
                    Some(Event::Assign { id: p, chain }),
                    err,
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::replay;
    use crate::order::SemiOrder;
    use crate::partition::AlgorithmError;
    use crate::partition::{ChainPartition, OnlineAlgorithm};

    #[test]
    fn human_algorithm_plays_against_golden() {
        let config = GameConfig::new(Mode::UpGrowing, 2, "golden", "alg");
        let mut s = GameSession::new(config, HumanRole::Algorithm).unwrap();
        assert_eq!(s.step().unwrap(), StepOutcome::Presented { id: PointId(0) });
        assert_eq!(s.step(), Err(RefereeError::NotYourTurn));
        assert_eq!(s.human_present(&[], &[]), Err(RefereeError::NotYourTurn));
        assert_eq!(
            s.human_assign(ChainChoice::Existing(3)).unwrap_err().code(),
            "unknown_chain"
        );
        assert_eq!(
            s.human_assign(ChainChoice::New).unwrap(),
            StepOutcome::Assigned {
                id: PointId(0),
                chain: 0
            }
        );
        // Always open a new chain: the Spoiler still finishes.
        while s.next_actor() != Actor::Done {
            if s.awaiting_human() {
                s.human_assign(ChainChoice::New).unwrap();
            } else {
                s.step().unwrap();
            }
        }
        let t = s.transcript();
        assert_eq!(t.outcome, Outcome::Completed);
        assert!(t.chains_used >= 3);
        assert!(replay(&t).ok);
    }

    #[test]
    fn human_spoiler_is_refereed() {
        let config = GameConfig::new(Mode::UpGrowing, 2, "golden", "alg");
        let mut s = GameSession::new(config, HumanRole::Spoiler).unwrap();
        assert_eq!(s.step(), Err(RefereeError::NotYourTurn));
        s.human_present(&[], &[]).unwrap();
        assert_eq!(s.stop(), Err(RefereeError::NotYourTurn));
        s.step().unwrap();
        s.human_present(&[], &[]).unwrap();
        s.step().unwrap();
        assert_eq!(
            s.human_present(&[], &[]).unwrap_err().code(),
            "width_exceeded"
        );
        assert_eq!(
            s.human_present(&[], &[PointId(0)]).unwrap_err().code(),
            "not_maximal"
        );
        assert_eq!(s.events().len(), 4);
        assert_eq!(s.stop().unwrap(), StepOutcome::Finished { chains_used: 2 });
        assert_eq!(s.human_present(&[], &[]), Err(RefereeError::GameOver));
    }

    struct Cheater;

    impl OnlineAlgorithm for Cheater {
        fn name(&self) -> &str {
            "cheater"
        }

        fn choose(
            &self,
            _: &SemiOrder,
            p: &ChainPartition,
            _: PointId,
            _: u64,
        ) -> Result<ChainChoice, AlgorithmError> {
            Ok(if p.chain_count() == 0 {
                ChainChoice::New
            } else {
                ChainChoice::Existing(0)
            })
        }
    }

    #[test]
    fn automated_fault_is_recorded_and_replays() {
        let config = GameConfig::new(Mode::UpGrowing, 3, "golden", "alg");
        let spoiler =
            crate::spoiler::spoiler_by_name("golden", Mode::UpGrowing, 3, 0, None).unwrap();
        let t = super::super::run_game_with(&config, spoiler, Box::new(Cheater)).unwrap();
        assert_eq!(t.outcome, Outcome::AlgorithmFault);
        assert_eq!(t.events.len(), 4);
        let v = replay(&t);
        assert!(v.consistent && !v.ok);
        assert_eq!(v.fault.unwrap().event_index, 3);
    }
}
