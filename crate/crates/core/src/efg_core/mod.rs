//! Extensive-form game model: tree, info sets, profiles and value functions.

mod game;
mod profile;
mod values;

use thiserror::Error;

pub use game::{Game, InfoSet, InfoSetId, Node, NodeId, NodeKind, RawKind, RawNode, Tree, Violation, CHANCE_TOLERANCE};
pub use profile::{
    behavioral_support, pure_strategies, pure_strategy_count, pure_strategy_index, pure_to_behavioral,
    BehavioralProfile, Odometer, PureStrategy, DEFAULT_SUPPORT_CAP, PROB_TOLERANCE,
};
pub use values::{
    bellman_residual, counterfactual_value, expected_utility, immediate_reward, immediate_reward_from, reach_prob,
    CfvTarget, Evaluation, Selector,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("malformed game: {0}")]
    Structure(String),
    #[error("terminal node {node} has {found} payoffs for {expected} players")]
    PayoffArity { node: usize, expected: usize, found: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("unknown info set {0}")]
    UnknownInfoSet(usize),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("enumeration too large: {size} exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("invalid game: {0}")]
    Invalid(String),
}

/// Rejects games with any validation violation.
pub fn validate(game: &Game) -> Result<(), GameError> {
    let v = game.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(GameError::Invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))
    }
}
