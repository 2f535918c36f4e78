//! Brute-force reference: every pure strategy of the deviating player is
//! mapped through the deviation and scored by direct tree recursion.
#![allow(dead_code)]

use hindsight::deviations::{enumerate, Deviation, DeviationClass, DeviationError};
use hindsight::efg_core::{pure_strategies, pure_strategy_index, BehavioralProfile, Game, InfoSetId, NodeId, NodeKind, PureStrategy};
use hindsight::hindsight_eval::EmpiricalPlay;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_play(game: &Game, seed: u64, rounds: usize) -> EmpiricalPlay {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EmpiricalPlay::new(game, (0..rounds).map(|_| BehavioralProfile::random(game, &mut rng, 0.3)).collect()).unwrap()
}

fn own_action(game: &Game, s: &PureStrategy, node: NodeId) -> Option<usize> {
    match game.node(node).kind {
        NodeKind::Decision { player, info_set } if player == s.player => {
            let k = game.player_info_sets(player).iter().position(|i| *i == info_set).unwrap();
            Some(s.actions[k])
        }
        _ => None,
    }
}

/// Value to `s.player` of continuing from `node` with `s` against `profile`.
pub fn value_from(game: &Game, profile: &BehavioralProfile, s: &PureStrategy, node: NodeId) -> f64 {
    let n = game.node(node);
    match &n.kind {
        NodeKind::Terminal { utilities } => utilities[s.player],
        NodeKind::Chance { probs } => n.children.iter().zip(probs).map(|(c, p)| p * value_from(game, profile, s, *c)).sum(),
        NodeKind::Decision { info_set, .. } => match own_action(game, s, node) {
            Some(a) => value_from(game, profile, s, n.children[a]),
            None => n
                .children
                .iter()
                .enumerate()
                .map(|(a, c)| {
                    let p = profile.get(*info_set)[a];
                    if p == 0.0 {
                        0.0
                    } else {
                        p * value_from(game, profile, s, *c)
                    }
                })
                .sum(),
        },
    }
}

/// Probability that chance and the other players move the root to `node`,
/// and whether `s` takes its own actions on that path.
fn path_weights(game: &Game, profile: &BehavioralProfile, s: &PureStrategy, node: NodeId) -> (f64, bool) {
    let mut others = 1.0;
    let mut own = true;
    let mut cur = node;
    while let Some((parent, a)) = game.node(cur).parent {
        match &game.node(parent).kind {
            NodeKind::Chance { probs } => others *= probs[a],
            NodeKind::Decision { player, info_set } => {
                if *player == s.player {
                    own &= own_action(game, s, parent) == Some(a);
                } else {
                    others *= profile.get(*info_set)[a];
                }
            }
            NodeKind::Terminal { .. } => unreachable!(),
        }
        cur = parent;
    }
    (others, own)
}

/// Counterfactual value of `s` at an info set and whether `s` plays to it.
pub fn cf_value(game: &Game, profile: &BehavioralProfile, s: &PureStrategy, i: InfoSetId) -> (f64, bool) {
    let mut v = 0.0;
    let mut reaches = false;
    for &h in &game.info_set(i).members {
        let (w, own) = path_weights(game, profile, s, h);
        reaches = own;
        v += w * value_from(game, profile, s, h);
    }
    (v, reaches)
}

pub struct Oracle<'g> {
    pub game: &'g Game,
    pub player: usize,
    pub strategies: Vec<PureStrategy>,
    /// [round][strategy]
    pub prob: Vec<Vec<f64>>,
    pub util: Vec<Vec<f64>>,
    play: &'g EmpiricalPlay,
}

impl<'g> Oracle<'g> {
    pub fn new(game: &'g Game, play: &'g EmpiricalPlay, player: usize) -> Self {
        let strategies: Vec<PureStrategy> = pure_strategies(game, player).collect();
        let mut prob = Vec::new();
        let mut util = Vec::new();
        for profile in play.profiles() {
            prob.push(
                strategies
                    .iter()
                    .map(|s| {
                        game.player_info_sets(player)
                            .iter()
                            .zip(&s.actions)
                            .map(|(i, a)| profile.get(*i)[*a])
                            .product()
                    })
                    .collect(),
            );
            util.push(strategies.iter().map(|s| value_from(game, profile, s, game.root())).collect());
        }
        Oracle { game, player, strategies, prob, util, play }
    }

    pub fn recommendation_value(&self) -> f64 {
        let t = self.prob.len() as f64;
        self.prob.iter().zip(&self.util).map(|(p, u)| p.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()).sum::<f64>() / t
    }

    pub fn benefit(&self, dev: &Deviation) -> f64 {
        let image: Vec<usize> = self.strategies.iter().map(|s| pure_strategy_index(self.game, &dev.apply(self.game, s))).collect();
        let mut total = 0.0;
        for (p, u) in self.prob.iter().zip(&self.util) {
            for (k, pk) in p.iter().enumerate() {
                if *pk != 0.0 {
                    total += pk * (u[image[k]] - u[k]);
                }
            }
        }
        total / self.prob.len() as f64
    }

    /// Maximum benefit over the enumerated class, or None past the cap.
    pub fn best(&self, class: DeviationClass, cap: u128) -> Option<f64> {
        match enumerate(self.game, self.player, class, cap) {
            Ok(it) => Some(it.map(|d| self.benefit(&d)).fold(f64::NEG_INFINITY, f64::max)),
            Err(DeviationError::EnumerationTooLarge { .. }) => None,
            Err(e) => panic!("{e}"),
        }
    }

    /// Average deviation-reach-weighted counterfactual gain at an info set.
    pub fn observable_gain(&self, dev: &Deviation, i: InfoSetId) -> f64 {
        let mut total = 0.0;
        for (t, profile) in self.play.profiles().iter().enumerate() {
            for (k, s) in self.strategies.iter().enumerate() {
                let pk = self.prob[t][k];
                if pk == 0.0 {
                    continue;
                }
                let image = dev.apply(self.game, s);
                let (dv, reaches) = cf_value(self.game, profile, &image, i);
                if reaches {
                    let (sv, _) = cf_value(self.game, profile, s, i);
                    total += pk * (dv - sv);
                }
            }
        }
        total / self.prob.len() as f64
    }

    /// Positive part of the best observable gain at an info set over the class.
    pub fn observable_gap(&self, class: DeviationClass, i: InfoSetId, cap: u128) -> f64 {
        enumerate(self.game, self.player, class, cap).unwrap().map(|d| self.observable_gain(&d, i)).fold(0.0, f64::max)
    }
}
