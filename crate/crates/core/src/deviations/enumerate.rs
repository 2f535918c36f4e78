use std::collections::BTreeMap;

use crate::efg_core::{pure_strategies, pure_strategy_count, Game, InfoSetId, Odometer};

use super::{Deviation, DeviationClass, DeviationError};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

fn continuation_count(game: &Game, trigger: InfoSetId) -> u128 {
    game.own_subtree(trigger)
        .iter()
        .fold(1u128, |acc, j| acc.saturating_mul(game.info_set(*j).num_actions() as u128))
}

/// Number of deviations `enumerate` yields for the class.
pub fn class_size(game: &Game, player: usize, class: DeviationClass) -> u128 {
    let sets = game.player_info_sets(player);
    let arity = |i: &InfoSetId| game.info_set(*i).num_actions() as u128;
    let s = pure_strategy_count(game, player);
    match class {
        DeviationClass::External => s,
        DeviationClass::Internal => s.saturating_mul(s.saturating_sub(1)),
        DeviationClass::Swap => {
            let mut acc = 1u128;
            for _ in 0..s.min(200) {
                acc = acc.saturating_mul(s);
            }
            if s >= 200 {
                u128::MAX
            } else {
                acc
            }
        }
        DeviationClass::BlindCausal => sets.iter().map(|i| continuation_count(game, *i)).fold(0, u128::saturating_add),
        DeviationClass::InformedCausal => sets
            .iter()
            .map(|i| arity(i).saturating_mul(continuation_count(game, *i)))
            .fold(0, u128::saturating_add),
        DeviationClass::BlindAction | DeviationClass::BlindCf => sets.iter().map(arity).sum(),
        DeviationClass::InformedAction | DeviationClass::InformedCf => sets.iter().map(|i| arity(i) * arity(i)).sum(),
    }
}

fn continuations(game: &Game, trigger: InfoSetId) -> impl Iterator<Item = BTreeMap<InfoSetId, usize>> {
    let subtree = game.own_subtree(trigger);
    let choices = subtree.iter().map(|j| (0..game.info_set(*j).num_actions()).collect()).collect();
    Odometer::new(choices).map(move |acts| subtree.iter().copied().zip(acts).collect())
}

/// Every deviation of the class for `player`, each once, in a fixed order:
/// info sets ascending, then trigger action, then replacement or continuation
/// in lexicographic order.
pub fn enumerate<'a>(
    game: &'a Game,
    player: usize,
    class: DeviationClass,
    cap: u128,
) -> Result<Box<dyn Iterator<Item = Deviation> + 'a>, DeviationError> {
    let size = class_size(game, player, class);
    if size > cap {
        return Err(DeviationError::EnumerationTooLarge { class, size, cap });
    }
    let sets: Vec<InfoSetId> = game.player_info_sets(player).to_vec();
    let arity = move |i: InfoSetId| game.info_set(i).num_actions();
    Ok(match class {
        DeviationClass::External => Box::new(pure_strategies(game, player).map(|target| Deviation::External { target })),
        DeviationClass::Internal => Box::new(pure_strategies(game, player).flat_map(move |from| {
            pure_strategies(game, player)
                .filter(|to| *to != from)
                .map(|to| Deviation::Internal { from: from.clone(), to })
                .collect::<Vec<_>>()
        })),
        DeviationClass::Swap => {
            let all: Vec<_> = pure_strategies(game, player).collect();
            let n = all.len();
            Box::new(Odometer::new(vec![(0..n).collect(); n]).map(move |images| {
                let table = images
                    .iter()
                    .enumerate()
                    .filter(|(k, j)| k != *j)
                    .map(|(k, j)| (all[k].clone(), all[*j].clone()))
                    .collect();
                Deviation::Swap { player, table }
            }))
        }
        DeviationClass::BlindCausal | DeviationClass::InformedCausal => {
            let informed = class == DeviationClass::InformedCausal;
            Box::new(sets.into_iter().flat_map(move |trigger| {
                let triggers: Vec<Option<usize>> =
                    if informed { (0..arity(trigger)).map(Some).collect() } else { vec![None] };
                triggers.into_iter().flat_map(move |trigger_action| {
                    continuations(game, trigger).map(move |continuation| Deviation::Causal {
                        player,
                        trigger,
                        trigger_action,
                        continuation,
                    })
                })
            }))
        }
        DeviationClass::BlindAction | DeviationClass::InformedAction => {
            let informed = class == DeviationClass::InformedAction;
            Box::new(sets.into_iter().flat_map(move |trigger| {
                let n = arity(trigger);
                let triggers: Vec<Option<usize>> = if informed { (0..n).map(Some).collect() } else { vec![None] };
                triggers.into_iter().flat_map(move |trigger_action| {
                    (0..n).map(move |replacement| Deviation::Action { player, trigger, trigger_action, replacement })
                })
            }))
        }
        DeviationClass::BlindCf | DeviationClass::InformedCf => {
            let informed = class == DeviationClass::InformedCf;
            Box::new(sets.into_iter().flat_map(move |target| {
                let n = arity(target);
                let triggers: Vec<Option<usize>> = if informed { (0..n).map(Some).collect() } else { vec![None] };
                triggers.into_iter().flat_map(move |trigger_action| {
                    (0..n).map(move |replacement| Deviation::counterfactual(game, target, trigger_action, replacement))
                })
            }))
        }
    })
}
