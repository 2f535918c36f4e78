//! Deviation types and classes, their action on pure strategies, enumeration,
//! and exact evaluation against an empirical distribution of play.

mod benefit;
mod containment;
mod enumerate;
mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::efg_core::{Game, GameError, InfoSetId, PureStrategy};

pub use benefit::{benefit, DeviationTracker};
pub use containment::{covers, deviation_map, realizes};
pub use enumerate::{class_size, enumerate, DEFAULT_ENUMERATION_CAP};
pub use stats::{best_benefit, BestDeviation, HindsightStats, OsrEntry, PlayerStats, StatsOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviationError {
    #[error("{class} enumeration has {size} members, over the cap of {cap}")]
    EnumerationTooLarge { class: DeviationClass, size: u128, cap: u128 },
    #[error("{0} is not supported here")]
    UnsupportedClass(DeviationClass),
    #[error("deviation belongs to player {found}, expected player {expected}")]
    WrongPlayer { expected: usize, found: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DeviationClass {
    External,
    Internal,
    Swap,
    BlindCausal,
    InformedCausal,
    BlindAction,
    InformedAction,
    BlindCf,
    InformedCf,
}

impl DeviationClass {
    pub const ALL: [DeviationClass; 9] = [
        DeviationClass::External,
        DeviationClass::Internal,
        DeviationClass::Swap,
        DeviationClass::BlindCausal,
        DeviationClass::InformedCausal,
        DeviationClass::BlindAction,
        DeviationClass::InformedAction,
        DeviationClass::BlindCf,
        DeviationClass::InformedCf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DeviationClass::External => "external",
            DeviationClass::Internal => "internal",
            DeviationClass::Swap => "swap",
            DeviationClass::BlindCausal => "blind_causal",
            DeviationClass::InformedCausal => "informed_causal",
            DeviationClass::BlindAction => "blind_action",
            DeviationClass::InformedAction => "informed_action",
            DeviationClass::BlindCf => "blind_cf",
            DeviationClass::InformedCf => "informed_cf",
        }
    }

    pub fn is_informed(self) -> bool {
        matches!(self, DeviationClass::InformedCausal | DeviationClass::InformedAction | DeviationClass::InformedCf)
    }

    /// Direct "is at least as strong as" arrows of the deviation lattice.
    /// The flag marks the arrow that only holds under observable sequential
    /// rationality (counterfactual to external).
    pub fn weaker_neighbors(self) -> Vec<(DeviationClass, bool)> {
        use DeviationClass::*;
        match self {
            Swap => vec![(Internal, false)],
            Internal => vec![(InformedCausal, false), (InformedAction, false), (InformedCf, false)],
            InformedCausal => vec![(BlindCausal, false)],
            InformedAction => vec![(BlindAction, false)],
            InformedCf => vec![(BlindCf, false)],
            BlindCausal => vec![(External, false)],
            BlindCf => vec![(External, true)],
            BlindAction | External => vec![],
        }
    }
}

impl fmt::Display for DeviationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeviationClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        DeviationClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == norm)
            .ok_or_else(|| format!("unknown deviation class '{s}'"))
    }
}

/// A map from pure strategies to pure strategies for one player. Variants with
/// `trigger_action: Some(_)` are the informed forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deviation {
    External { target: PureStrategy },
    Internal { from: PureStrategy, to: PureStrategy },
    /// Strategies missing from the table map to themselves.
    Swap { player: usize, table: BTreeMap<PureStrategy, PureStrategy> },
    Causal { player: usize, trigger: InfoSetId, trigger_action: Option<usize>, continuation: BTreeMap<InfoSetId, usize> },
    Action { player: usize, trigger: InfoSetId, trigger_action: Option<usize>, replacement: usize },
    Counterfactual {
        player: usize,
        target: InfoSetId,
        /// Actions forced on the way to `target`.
        path: Vec<(InfoSetId, usize)>,
        trigger_action: Option<usize>,
        replacement: usize,
    },
}

impl Deviation {
    pub fn counterfactual(game: &Game, target: InfoSetId, trigger_action: Option<usize>, replacement: usize) -> Self {
        Deviation::Counterfactual {
            player: game.info_set(target).player,
            target,
            path: game.path_to(target),
            trigger_action,
            replacement,
        }
    }

    pub fn player(&self) -> usize {
        match self {
            Deviation::External { target } => target.player,
            Deviation::Internal { from, .. } => from.player,
            Deviation::Swap { player, .. }
            | Deviation::Causal { player, .. }
            | Deviation::Action { player, .. }
            | Deviation::Counterfactual { player, .. } => *player,
        }
    }

    pub fn class(&self) -> DeviationClass {
        use DeviationClass::*;
        match self {
            Deviation::External { .. } => External,
            Deviation::Internal { .. } => Internal,
            Deviation::Swap { .. } => Swap,
            Deviation::Causal { trigger_action: None, .. } => BlindCausal,
            Deviation::Causal { .. } => InformedCausal,
            Deviation::Action { trigger_action: None, .. } => BlindAction,
            Deviation::Action { .. } => InformedAction,
            Deviation::Counterfactual { trigger_action: None, .. } => BlindCf,
            Deviation::Counterfactual { .. } => InformedCf,
        }
    }

    /// Image of a pure strategy under this deviation.
    pub fn apply(&self, game: &Game, s: &PureStrategy) -> PureStrategy {
        let sets = game.player_info_sets(s.player);
        match self {
            Deviation::External { target } => target.clone(),
            Deviation::Internal { from, to } => {
                if s == from {
                    to.clone()
                } else {
                    s.clone()
                }
            }
            Deviation::Swap { table, .. } => table.get(s).cloned().unwrap_or_else(|| s.clone()),
            Deviation::Causal { trigger, trigger_action, continuation, .. } => {
                if trigger_action.is_some_and(|a| s.action_at(game, *trigger) != a) {
                    return s.clone();
                }
                let mut out = s.clone();
                for (&i, &a) in continuation {
                    out.actions[game.info_set(i).local_index] = a;
                }
                debug_assert!(sets.iter().all(|i| continuation.contains_key(i) == game.is_at_or_below(*trigger, *i)));
                out
            }
            Deviation::Action { trigger, trigger_action, replacement, .. } => {
                let mut out = s.clone();
                if trigger_action.is_none_or(|a| s.action_at(game, *trigger) == a) {
                    out.actions[game.info_set(*trigger).local_index] = *replacement;
                }
                out
            }
            Deviation::Counterfactual { target, path, trigger_action, replacement, .. } => {
                let mut out = s.clone();
                for &(i, a) in path {
                    out.actions[game.info_set(i).local_index] = a;
                }
                if trigger_action.is_none_or(|a| s.action_at(game, *target) == a) {
                    out.actions[game.info_set(*target).local_index] = *replacement;
                }
                out
            }
        }
    }

    /// JSON description with ids and action labels.
    pub fn witness_json(&self, game: &Game) -> Value {
        let label = |i: InfoSetId, a: usize| game.info_set(i).actions[a].clone();
        let strategy = |s: &PureStrategy| -> Value {
            game.player_info_sets(s.player)
                .iter()
                .zip(&s.actions)
                .map(|(i, a)| (game.info_set(*i).key.clone(), Value::String(label(*i, *a))))
                .collect::<serde_json::Map<String, Value>>()
                .into()
        };
        let set = |i: InfoSetId| json!({ "id": i.0, "key": game.info_set(i).key });
        let class = self.class().name();
        match self {
            Deviation::External { target } => json!({ "class": class, "player": target.player + 1, "target": strategy(target) }),
            Deviation::Internal { from, to } => {
                json!({ "class": class, "player": from.player + 1, "from": strategy(from), "to": strategy(to) })
            }
            Deviation::Swap { player, table } => json!({
                "class": class,
                "player": player + 1,
                "table": table.iter().map(|(a, b)| json!({ "from": strategy(a), "to": strategy(b) })).collect::<Vec<_>>(),
            }),
            Deviation::Causal { player, trigger, trigger_action, continuation } => json!({
                "class": class,
                "player": player + 1,
                "trigger": set(*trigger),
                "trigger_action": trigger_action.map(|a| label(*trigger, a)),
                "continuation": continuation
                    .iter()
                    .map(|(i, a)| (game.info_set(*i).key.clone(), Value::String(label(*i, *a))))
                    .collect::<serde_json::Map<String, Value>>(),
            }),
            Deviation::Action { player, trigger, trigger_action, replacement } => json!({
                "class": class,
                "player": player + 1,
                "trigger": set(*trigger),
                "trigger_action": trigger_action.map(|a| label(*trigger, a)),
                "replacement": label(*trigger, *replacement),
            }),
            Deviation::Counterfactual { player, target, path, trigger_action, replacement } => json!({
                "class": class,
                "player": player + 1,
                "target": set(*target),
                "path": path.iter().map(|(i, a)| json!({ "info_set": set(*i), "action": label(*i, *a) })).collect::<Vec<_>>(),
                "trigger_action": trigger_action.map(|a| label(*target, a)),
                "replacement": label(*target, *replacement),
            }),
        }
    }
}

#[cfg(test)]
mod tests;
