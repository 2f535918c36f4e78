//! Behavioral profiles and pure strategies.

use rand::Rng;
use serde::Serialize;

use super::game::{Game, InfoSetId};
use super::GameError;

pub const PROB_TOLERANCE: f64 = 1e-9;

/// Action probabilities for every info set of every player, indexed by info-set id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BehavioralProfile {
    probs: Vec<Vec<f64>>,
}

impl BehavioralProfile {
    pub fn uniform(game: &Game) -> Self {
        let probs = game
            .info_sets()
            .iter()
            .map(|i| vec![1.0 / i.num_actions() as f64; i.num_actions()])
            .collect();
        BehavioralProfile { probs }
    }

    pub fn from_vecs(game: &Game, probs: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let p = BehavioralProfile { probs };
        p.check(game)?;
        Ok(p)
    }

    /// Deterministic profile in which every player follows the given pure strategy.
    pub fn from_pure(game: &Game, strategies: &[PureStrategy]) -> Result<Self, GameError> {
        if strategies.len() != game.num_players() {
            return Err(GameError::Profile(format!(
                "expected {} pure strategies, got {}",
                game.num_players(),
                strategies.len()
            )));
        }
        let mut p = BehavioralProfile::uniform(game);
        for s in strategies {
            p.set_pure(game, s)?;
        }
        Ok(p)
    }

    /// Random profile; each action weight is zeroed with probability `sparsity`
    /// while keeping at least one action per info set.
    pub fn random<R: Rng>(game: &Game, rng: &mut R, sparsity: f64) -> Self {
        let probs = game
            .info_sets()
            .iter()
            .map(|i| {
                let n = i.num_actions();
                let keep = rng.gen_range(0..n);
                let mut w: Vec<f64> = (0..n)
                    .map(|a| if a != keep && rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen::<f64>() + 1e-3 })
                    .collect();
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                w
            })
            .collect();
        BehavioralProfile { probs }
    }

    pub fn get(&self, id: InfoSetId) -> &[f64] {
        &self.probs[id.0]
    }

    pub fn prob(&self, id: InfoSetId, action: usize) -> f64 {
        self.probs[id.0][action]
    }

    pub fn set(&mut self, id: InfoSetId, probs: Vec<f64>) {
        self.probs[id.0] = probs;
    }

    pub fn set_pure(&mut self, game: &Game, s: &PureStrategy) -> Result<(), GameError> {
        s.check(game)?;
        for (k, &i) in game.player_info_sets(s.player).iter().enumerate() {
            let mut v = vec![0.0; game.info_set(i).num_actions()];
            v[s.actions[k]] = 1.0;
            self.probs[i.0] = v;
        }
        Ok(())
    }

    pub fn as_vecs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn check(&self, game: &Game) -> Result<(), GameError> {
        if self.probs.len() != game.info_sets().len() {
            return Err(GameError::Profile(format!(
                "profile covers {} info sets, game has {}",
                self.probs.len(),
                game.info_sets().len()
            )));
        }
        for (k, v) in self.probs.iter().enumerate() {
            let is = &game.info_sets()[k];
            if v.len() != is.num_actions() {
                return Err(GameError::Profile(format!("info set {k} has {} probabilities", v.len())));
            }
            if v.iter().any(|p| !(*p >= -PROB_TOLERANCE)) {
                return Err(GameError::Profile(format!("info set {k} has a negative probability")));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > PROB_TOLERANCE {
                return Err(GameError::Profile(format!("info set {k} probabilities sum to {s}")));
            }
        }
        Ok(())
    }
}

/// One action per info set of `player`, indexed by the info set's local index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PureStrategy {
    pub player: usize,
    pub actions: Vec<usize>,
}

impl PureStrategy {
    pub fn new(player: usize, actions: Vec<usize>) -> Self {
        PureStrategy { player, actions }
    }

    /// Builds a strategy from action labels keyed by info-set key.
    pub fn from_labels(game: &Game, player: usize, choices: &[(&str, &str)]) -> Result<Self, GameError> {
        let mut actions = vec![usize::MAX; game.player_info_sets(player).len()];
        for (key, label) in choices {
            let i = game
                .find_info_set(player, key)
                .ok_or_else(|| GameError::Profile(format!("unknown info set {key}")))?;
            let a = game
                .action_index(i, label)
                .ok_or_else(|| GameError::Profile(format!("unknown action {label} at {key}")))?;
            actions[game.info_set(i).local_index] = a;
        }
        if actions.contains(&usize::MAX) {
            return Err(GameError::Profile("strategy leaves an info set unassigned".into()));
        }
        Ok(PureStrategy { player, actions })
    }

    pub fn action_at(&self, game: &Game, id: InfoSetId) -> usize {
        self.actions[game.info_set(id).local_index]
    }

    pub fn check(&self, game: &Game) -> Result<(), GameError> {
        if self.player >= game.num_players() {
            return Err(GameError::Profile(format!("unknown player {}", self.player)));
        }
        let sets = game.player_info_sets(self.player);
        if sets.len() != self.actions.len() {
            return Err(GameError::Profile(format!(
                "pure strategy has {} actions for {} info sets",
                self.actions.len(),
                sets.len()
            )));
        }
        for (k, &i) in sets.iter().enumerate() {
            if self.actions[k] >= game.info_set(i).num_actions() {
                return Err(GameError::Profile(format!("action {} out of range", self.actions[k])));
            }
        }
        Ok(())
    }

    /// Probability of this strategy under the product distribution of a profile.
    pub fn probability(&self, game: &Game, profile: &BehavioralProfile) -> f64 {
        game.player_info_sets(self.player)
            .iter()
            .zip(&self.actions)
            .map(|(i, a)| profile.prob(*i, *a))
            .product()
    }
}

/// Per-info-set probability vectors (local order) realizing a pure strategy.
pub fn pure_to_behavioral(game: &Game, s: &PureStrategy) -> Vec<Vec<f64>> {
    game.player_info_sets(s.player)
        .iter()
        .zip(&s.actions)
        .map(|(i, &a)| {
            let mut v = vec![0.0; game.info_set(*i).num_actions()];
            v[a] = 1.0;
            v
        })
        .collect()
}

pub fn pure_strategy_count(game: &Game, player: usize) -> u128 {
    game.player_info_sets(player)
        .iter()
        .fold(1u128, |acc, i| acc.saturating_mul(game.info_set(*i).num_actions() as u128))
}

/// Odometer over per-position choice lists, last position fastest.
#[derive(Debug, Clone)]
pub struct Odometer {
    choices: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
}

impl Odometer {
    pub fn new(choices: Vec<Vec<usize>>) -> Self {
        let cursor = if choices.iter().any(|c| c.is_empty()) { None } else { Some(vec![0; choices.len()]) };
        Odometer { choices, cursor }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cursor.as_mut()?;
        let out: Vec<usize> = cur.iter().zip(&self.choices).map(|(k, c)| c[*k]).collect();
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.cursor = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.choices[pos].len() {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// Every pure strategy of `player` in lexicographic order.
pub fn pure_strategies(game: &Game, player: usize) -> impl Iterator<Item = PureStrategy> {
    let choices = game
        .player_info_sets(player)
        .iter()
        .map(|i| (0..game.info_set(*i).num_actions()).collect())
        .collect();
    Odometer::new(choices).map(move |actions| PureStrategy { player, actions })
}

/// Position of a pure strategy in the order of `pure_strategies`.
pub fn pure_strategy_index(game: &Game, s: &PureStrategy) -> usize {
    game.player_info_sets(s.player)
        .iter()
        .zip(&s.actions)
        .fold(0usize, |acc, (i, a)| acc * game.info_set(*i).num_actions() + a)
}

pub const DEFAULT_SUPPORT_CAP: usize = 24;

/// Pure strategies with positive probability under `profile`, with their
/// probabilities, in lexicographic order.
pub fn behavioral_support<'a>(
    game: &'a Game,
    profile: &'a BehavioralProfile,
    player: usize,
    max_info_sets: usize,
) -> Result<impl Iterator<Item = (PureStrategy, f64)> + 'a, GameError> {
    let sets = game.player_info_sets(player);
    if sets.len() > max_info_sets {
        return Err(GameError::EnumerationTooLarge { size: sets.len() as u128, cap: max_info_sets as u128 });
    }
    let choices = sets
        .iter()
        .map(|i| (0..game.info_set(*i).num_actions()).filter(|a| profile.prob(*i, *a) > 0.0).collect())
        .collect();
    Ok(Odometer::new(choices).map(move |actions| {
        let s = PureStrategy { player, actions };
        let p = s.probability(game, profile);
        (s, p)
    }))
}
