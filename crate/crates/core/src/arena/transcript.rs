use serde::{Deserialize, Serialize};

use super::GameConfig;
use crate::order::PointId;
use crate::partition::ChainId;

/// One half-move. A new chain is recorded as the next dense chain id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Present {
        id: PointId,
        down: Vec<PointId>,
        up: Vec<PointId>,
    },
    Assign {
        id: PointId,
        chain: ChainId,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    SpoilerFault,
    AlgorithmFault,
}

/// Replayable record of a game. Field order is the canonical file layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: GameConfig,
    pub events: Vec<Event>,
    pub chains_used: usize,
    pub outcome: Outcome,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn point_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Present { .. }))
            .count()
    }

    /// The prefix ending with the last assignment that opened a new chain.
    /// A Spoiler could have stopped there without changing the chain count.
    pub fn truncated_to_last_new_chain(&self) -> Transcript {
        let mut chains = 0;
        let mut cut = 0;
        for (i, event) in self.events.iter().enumerate() {
            if let Event::Assign { chain, .. } = event {
                if *chain == chains {
                    chains += 1;
                    cut = i + 1;
                }
            }
        }
        Transcript {
            config: self.config.clone(),
            events: self.events[..cut].to_vec(),
            chains_used: chains,
            outcome: self.outcome,
        }
    }
}

/// Where and why replay stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub event_index: usize,
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    /// Outcome reached by re-executing the events.
    pub outcome: Outcome,
    /// Replayed outcome agrees with the recorded one.
    pub consistent: bool,
    pub chains_used: usize,
    pub fault: Option<Fault>,
}
