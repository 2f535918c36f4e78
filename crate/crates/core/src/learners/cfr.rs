use serde::{Deserialize, Serialize};

use crate::efg_core::{BehavioralProfile, Evaluation, Game, InfoSetId};

use super::regret::{internal_regret_matching, regret_matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    Simultaneous,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerMode {
    External,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    Counterfactual,
    /// Counterfactual values scaled by the owner's reach of the info set.
    ReachWeighted,
}

/// One info set's learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLearnerState {
    /// Per action (external) or per ordered pair `a * n + b` (internal).
    pub regrets: Vec<f64>,
    pub strategy: Vec<f64>,
    /// Fixed-point residual of the last internal strategy refresh.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerStates {
    mode: LearnerMode,
    /// Indexed by global info set id.
    locals: Vec<LocalLearnerState>,
    /// Update passes applied per player.
    updates: Vec<usize>,
}

impl LearnerStates {
    /// Zero regrets and uniform strategies.
    pub fn new(game: &Game, mode: LearnerMode) -> Self {
        let locals = game
            .info_sets()
            .iter()
            .map(|is| {
                let n = is.num_actions();
                let size = match mode {
                    LearnerMode::External => n,
                    LearnerMode::Internal => n * n,
                };
                LocalLearnerState { regrets: vec![0.0; size], strategy: vec![1.0 / n as f64; n], residual: 0.0 }
            })
            .collect();
        LearnerStates { mode, locals, updates: vec![0; game.num_players()] }
    }

    pub fn mode(&self) -> LearnerMode {
        self.mode
    }

    pub fn local(&self, id: InfoSetId) -> &LocalLearnerState {
        &self.locals[id.0]
    }

    pub fn profile(&self, game: &Game) -> BehavioralProfile {
        BehavioralProfile::from_vecs(game, self.locals.iter().map(|l| l.strategy.clone()).collect())
            .expect("learner strategies are distributions")
    }

    /// Largest average regret any single learner of the player holds, never negative.
    pub fn max_average_regret(&self, game: &Game, player: usize) -> f64 {
        let t = self.updates[player].max(1) as f64;
        game.player_info_sets(player)
            .iter()
            .flat_map(|i| self.locals[i.0].regrets.iter())
            .fold(0.0, |m: f64, r| m.max(*r))
            / t
    }

    fn update_player(&mut self, game: &Game, player: usize, profile: &BehavioralProfile, ev: &Evaluation, values: ValueMode) {
        for &i in game.player_info_sets(player) {
            let v = ev.action_values(game, i);
            let pi = profile.get(i);
            let w = match values {
                ValueMode::Counterfactual => 1.0,
                ValueMode::ReachWeighted => ev.own_reach_of(game, i),
            };
            let local = &mut self.locals[i.0];
            if w != 0.0 {
                let n = v.len();
                match self.mode {
                    LearnerMode::External => {
                        let base: f64 = pi.iter().zip(&v).map(|(p, x)| p * x).sum();
                        for a in 0..n {
                            local.regrets[a] += w * (v[a] - base);
                        }
                    }
                    LearnerMode::Internal => {
                        for a in 0..n {
                            for b in 0..n {
                                local.regrets[a * n + b] += w * pi[a] * (v[b] - v[a]);
                            }
                        }
                    }
                }
            }
        }
        self.updates[player] += 1;
    }

    fn refresh(&mut self, game: &Game, player: usize) {
        for &i in game.player_info_sets(player) {
            let local = &mut self.locals[i.0];
            match self.mode {
                LearnerMode::External => local.strategy = regret_matching(&local.regrets),
                LearnerMode::Internal => {
                    let p = internal_regret_matching(&local.regrets, local.strategy.len());
                    local.strategy = p.strategy;
                    local.residual = p.residual;
                }
            }
        }
    }
}

/// One round. Returns the profile each update pass evaluated: a single one in
/// simultaneous mode, one per player (in order) in alternating mode.
pub fn cfr_iteration(game: &Game, states: &mut LearnerStates, update: UpdateMode) -> Vec<BehavioralProfile> {
    iteration(game, states, update, ValueMode::Counterfactual)
}

/// As `cfr_iteration` with every regret increment scaled by the owner's
/// reach of the info set.
pub fn reach_weighted_cfr_iteration(game: &Game, states: &mut LearnerStates, update: UpdateMode) -> Vec<BehavioralProfile> {
    iteration(game, states, update, ValueMode::ReachWeighted)
}

pub(crate) fn iteration(game: &Game, states: &mut LearnerStates, update: UpdateMode, values: ValueMode) -> Vec<BehavioralProfile> {
    evaluated_iteration(game, states, update, values).into_iter().map(|(p, _)| p).collect()
}

pub(crate) fn evaluated_iteration(
    game: &Game,
    states: &mut LearnerStates,
    update: UpdateMode,
    values: ValueMode,
) -> Vec<(BehavioralProfile, Evaluation)> {
    let np = game.num_players();
    match update {
        UpdateMode::Simultaneous => {
            let profile = states.profile(game);
            let ev = Evaluation::new(game, &profile);
            for p in 0..np {
                states.update_player(game, p, &profile, &ev, values);
            }
            for p in 0..np {
                states.refresh(game, p);
            }
            vec![(profile, ev)]
        }
        UpdateMode::Alternating => {
            let mut out = Vec::with_capacity(np);
            for p in 0..np {
                let profile = states.profile(game);
                let ev = Evaluation::new(game, &profile);
                states.update_player(game, p, &profile, &ev, values);
                states.refresh(game, p);
                out.push((profile, ev));
            }
            out
        }
    }
}
