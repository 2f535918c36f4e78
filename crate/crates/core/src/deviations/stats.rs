//! Running sums that make every class's best deviation an exact closed form.
//!
//! Each round adds, per deviating player: others' reach of each terminal, the
//! realized terminal distribution, trigger-weighted terminal weights for each
//! (info set, action), immediate counterfactual regrets (plain, reach-weighted
//! and their internal forms) and, for small strategy spaces, pure-strategy
//! cross utilities. Best responses are then weighted backward induction over
//! the player's info-set forest.

use std::collections::BTreeMap;

use crate::efg_core::{pure_strategies, pure_strategy_count, BehavioralProfile, Evaluation, Game, InfoSetId, NodeId, PureStrategy};
use crate::hindsight_eval::EmpiricalPlay;

use super::enumerate::DEFAULT_ENUMERATION_CAP;
use super::{Deviation, DeviationClass, DeviationError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsOptions {
    /// Pure-strategy statistics (needed by internal and swap classes) are kept
    /// only when the number of strategy pairs is at most this.
    pub pure_pair_cap: u128,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions { pure_pair_cap: DEFAULT_ENUMERATION_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct BestDeviation {
    /// Best benefit with the identity included, so never negative.
    pub value: f64,
    /// Best benefit over the class members alone.
    pub class_max: f64,
    pub witness: Deviation,
}

#[derive(Debug, Clone)]
pub struct OsrEntry {
    pub info_set: InfoSetId,
    pub gap: f64,
    pub raw: f64,
    pub witness: Deviation,
}

#[derive(Debug, Clone)]
struct PureStats {
    strategies: Vec<PureStrategy>,
    reached: Vec<Vec<NodeId>>,
    cross: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PlayerStats {
    player: usize,
    rounds: usize,
    rec_value: f64,
    /// Indexed by node id; only terminal entries are used.
    weights: Vec<f64>,
    realized: Vec<f64>,
    /// Per local info set: [action * n_sub + k] for the k-th subtree terminal.
    trig: Vec<Vec<f64>>,
    /// Per local info set and subtree terminal: the action taken there toward it.
    sub_action: Vec<Vec<usize>>,
    cf_regret: Vec<Vec<f64>>,
    cf_internal: Vec<Vec<f64>>,
    rw_regret: Vec<Vec<f64>>,
    rw_internal: Vec<Vec<f64>>,
    cf_value: Vec<f64>,
    pure: Option<PureStats>,
}

fn utility(game: &Game, z: NodeId, player: usize) -> f64 {
    game.node(z).utilities().unwrap()[player]
}

impl PlayerStats {
    fn new(game: &Game, player: usize, options: StatsOptions) -> Self {
        let sets = game.player_info_sets(player);
        let n = game.num_nodes();
        let sub_action: Vec<Vec<usize>> = sets
            .iter()
            .map(|&i| {
                let depth = game.info_set(i).depth;
                game.subtree_terminals(i).iter().map(|z| game.own_history(player, *z)[depth].1).collect()
            })
            .collect();
        let trig = sets
            .iter()
            .map(|&i| vec![0.0; game.info_set(i).num_actions() * game.subtree_terminals(i).len()])
            .collect();
        let sq = |i: &InfoSetId| vec![0.0; game.info_set(*i).num_actions().pow(2)];
        let lin = |i: &InfoSetId| vec![0.0; game.info_set(*i).num_actions()];
        let count = pure_strategy_count(game, player);
        let pure = (count.saturating_mul(count) <= options.pure_pair_cap).then(|| {
            let strategies: Vec<PureStrategy> = pure_strategies(game, player).collect();
            let reached = strategies
                .iter()
                .map(|s| {
                    game.terminals()
                        .iter()
                        .copied()
                        .filter(|z| game.own_history(player, *z).iter().all(|(i, a)| s.action_at(game, *i) == *a))
                        .collect()
                })
                .collect();
            let m = strategies.len();
            PureStats { strategies, reached, cross: vec![0.0; m * m] }
        });
        PlayerStats {
            player,
            rounds: 0,
            rec_value: 0.0,
            weights: vec![0.0; n],
            realized: vec![0.0; n],
            trig,
            sub_action,
            cf_regret: sets.iter().map(lin).collect(),
            cf_internal: sets.iter().map(sq).collect(),
            rw_regret: sets.iter().map(lin).collect(),
            rw_internal: sets.iter().map(sq).collect(),
            cf_value: vec![0.0; sets.len()],
            pure,
        }
    }

    fn push(&mut self, game: &Game, profile: &BehavioralProfile, ev: &Evaluation) {
        let i = self.player;
        let mut w = vec![0.0; game.num_nodes()];
        for &z in game.terminals() {
            w[z.0] = ev.others_reach(i, z);
            self.weights[z.0] += w[z.0];
            self.realized[z.0] += w[z.0] * ev.own_reach[i][z.0];
        }
        for (k, &set) in game.player_info_sets(i).iter().enumerate() {
            let pi = profile.get(set);
            let n = pi.len();
            let own = ev.own_reach_of(game, set);
            let q = ev.action_values(game, set);
            let cur: f64 = q.iter().zip(pi).map(|(x, p)| x * p).sum();
            self.cf_value[k] += cur;
            for a in 0..n {
                self.cf_regret[k][a] += q[a] - cur;
                self.rw_regret[k][a] += own * (q[a] - cur);
                for b in 0..n {
                    let d = pi[a] * (q[b] - q[a]);
                    self.cf_internal[k][a * n + b] += d;
                    self.rw_internal[k][a * n + b] += own * d;
                }
            }
            if own != 0.0 {
                let sub = game.subtree_terminals(set);
                let m = sub.len();
                for a in 0..n {
                    let f = own * pi[a];
                    if f == 0.0 {
                        continue;
                    }
                    for (j, z) in sub.iter().enumerate() {
                        self.trig[k][a * m + j] += f * w[z.0];
                    }
                }
            }
        }
        if let Some(ps) = self.pure.as_mut() {
            let m = ps.strategies.len();
            let util: Vec<f64> =
                ps.reached.iter().map(|zs| zs.iter().map(|z| w[z.0] * utility(game, *z, i)).sum()).collect();
            for (a, s) in ps.strategies.iter().enumerate() {
                let p = s.probability(game, profile);
                if p == 0.0 {
                    continue;
                }
                for b in 0..m {
                    ps.cross[a * m + b] += p * util[b];
                }
            }
        }
        self.rec_value += ev.values[i][0];
        self.rounds += 1;
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn scale(&self) -> f64 {
        1.0 / self.rounds.max(1) as f64
    }

    /// Average expected utility of the recommendations.
    pub fn recommendation_value(&self) -> f64 {
        self.rec_value * self.scale()
    }

    /// Summed v_I(a) - v(I) per action at a local info set.
    pub fn cf_regrets(&self, local: usize) -> &[f64] {
        &self.cf_regret[local]
    }

    /// Summed pi(a|I) (v_I(b) - v_I(a)), row-major in (a, b).
    pub fn cf_internal_regrets(&self, local: usize) -> &[f64] {
        &self.cf_internal[local]
    }

    pub fn reach_weighted_regrets(&self, local: usize) -> &[f64] {
        &self.rw_regret[local]
    }

    pub fn reach_weighted_internal_regrets(&self, local: usize) -> &[f64] {
        &self.rw_internal[local]
    }

    /// Summed counterfactual value of the recommendation at a local info set.
    pub fn cf_value_sum(&self, local: usize) -> f64 {
        self.cf_value[local]
    }

    fn local(&self, game: &Game, i: InfoSetId) -> usize {
        game.info_set(i).local_index
    }

    /// Weighted backward induction over `sets` (ascending ids, closed under
    /// successors) against per-terminal weights. Returns per-info-set best
    /// values and choices indexed by info-set id.
    fn backward_induction(&self, game: &Game, sets: &[InfoSetId], omega: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut best = vec![0.0; game.info_sets().len()];
        let mut choice = vec![0; game.info_sets().len()];
        for &j in sets.iter().rev() {
            let is = game.info_set(j);
            let mut r = vec![0.0; is.num_actions()];
            for &z in game.subtree_terminals(j) {
                if let Some((jj, a)) = game.last_own(self.player, z) {
                    if jj == j && omega[z.0] != 0.0 {
                        r[a] += omega[z.0] * utility(game, z, self.player);
                    }
                }
            }
            let mut top = f64::NEG_INFINITY;
            for (a, ra) in r.iter().enumerate() {
                let v = ra + is.successors[a].iter().map(|s| best[s.0]).sum::<f64>();
                if v > top {
                    top = v;
                    choice[j.0] = a;
                }
            }
            best[j.0] = top;
        }
        (best, choice)
    }

    fn average_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w * self.scale()).collect()
    }

    fn realized_value_below(&self, game: &Game, set: InfoSetId, action: Option<usize>) -> f64 {
        let k = self.local(game, set);
        game.subtree_terminals(set)
            .iter()
            .zip(&self.sub_action[k])
            .filter(|(_, a)| action.is_none_or(|x| x == **a))
            .map(|(z, _)| self.realized[z.0] * utility(game, *z, self.player))
            .sum::<f64>()
            * self.scale()
    }

    /// Average best counterfactual value reachable from each info set against
    /// the others' average play, minus the recommendation's; indexed by local index.
    pub fn full_external_regrets(&self, game: &Game) -> Vec<f64> {
        let sets = game.player_info_sets(self.player);
        let (best, _) = self.backward_induction(game, sets, &self.average_weights());
        sets.iter().enumerate().map(|(k, i)| best[i.0] - self.cf_value[k] * self.scale()).collect()
    }

    fn path_sum(&self, game: &Game, set: InfoSetId) -> f64 {
        game.path_to(set).iter().map(|(i, a)| self.cf_regret[self.local(game, *i)][*a]).sum()
    }

    pub fn best(&self, game: &Game, class: DeviationClass) -> Result<BestDeviation, DeviationError> {
        let sets = game.player_info_sets(self.player).to_vec();
        let scale = self.scale();
        let mut top: Option<(f64, Deviation)> = None;
        let mut offer = |v: f64, d: &dyn Fn() -> Deviation| {
            if top.as_ref().is_none_or(|(t, _)| v > *t) {
                top = Some((v, d()));
            }
        };
        match class {
            DeviationClass::External => {
                let (best, choice) = self.backward_induction(game, &sets, &self.average_weights());
                let roots = game.root_info_sets(self.player);
                let v: f64 = roots.iter().map(|r| best[r.0] - self.realized_value_below(game, *r, None)).sum();
                let target = PureStrategy::new(self.player, sets.iter().map(|i| choice[i.0]).collect());
                offer(v, &|| Deviation::External { target: target.clone() });
            }
            DeviationClass::BlindCausal | DeviationClass::InformedCausal => {
                for &trigger in &sets {
                    let k = self.local(game, trigger);
                    let sub = game.subtree_terminals(trigger);
                    let m = sub.len();
                    let n = game.info_set(trigger).num_actions();
                    let subtree = game.own_subtree(trigger);
                    let triggers: Vec<Option<usize>> = if class == DeviationClass::InformedCausal {
                        (0..n).map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for ta in triggers {
                        let mut omega = vec![0.0; game.num_nodes()];
                        for (j, z) in sub.iter().enumerate() {
                            omega[z.0] = match ta {
                                Some(a) => self.trig[k][a * m + j],
                                None => (0..n).map(|a| self.trig[k][a * m + j]).sum(),
                            } * scale;
                        }
                        let (best, choice) = self.backward_induction(game, &subtree, &omega);
                        let v = best[trigger.0] - self.realized_value_below(game, trigger, ta);
                        offer(v, &|| Deviation::Causal {
                            player: self.player,
                            trigger,
                            trigger_action: ta,
                            continuation: subtree.iter().map(|j| (*j, choice[j.0])).collect(),
                        });
                    }
                }
            }
            DeviationClass::BlindAction | DeviationClass::InformedAction => {
                for &trigger in &sets {
                    let k = self.local(game, trigger);
                    let n = game.info_set(trigger).num_actions();
                    if class == DeviationClass::BlindAction {
                        for b in 0..n {
                            offer(self.rw_regret[k][b] * scale, &|| Deviation::Action {
                                player: self.player,
                                trigger,
                                trigger_action: None,
                                replacement: b,
                            });
                        }
                    } else {
                        for a in 0..n {
                            for b in 0..n {
                                offer(self.rw_internal[k][a * n + b] * scale, &|| Deviation::Action {
                                    player: self.player,
                                    trigger,
                                    trigger_action: Some(a),
                                    replacement: b,
                                });
                            }
                        }
                    }
                }
            }
            DeviationClass::BlindCf | DeviationClass::InformedCf => {
                for &target in &sets {
                    let k = self.local(game, target);
                    let n = game.info_set(target).num_actions();
                    let path = self.path_sum(game, target);
                    if class == DeviationClass::BlindCf {
                        for b in 0..n {
                            offer((path + self.cf_regret[k][b]) * scale, &|| {
                                Deviation::counterfactual(game, target, None, b)
                            });
                        }
                    } else {
                        for a in 0..n {
                            for b in 0..n {
                                offer((path + self.cf_internal[k][a * n + b]) * scale, &|| {
                                    Deviation::counterfactual(game, target, Some(a), b)
                                });
                            }
                        }
                    }
                }
            }
            DeviationClass::Internal | DeviationClass::Swap => {
                let ps = self.pure.as_ref().ok_or_else(|| {
                    let c = pure_strategy_count(game, self.player);
                    DeviationError::EnumerationTooLarge {
                        class,
                        size: c.saturating_mul(c),
                        cap: StatsOptions::default().pure_pair_cap,
                    }
                })?;
                let m = ps.strategies.len();
                let gain = |a: usize, b: usize| (ps.cross[a * m + b] - ps.cross[a * m + a]) * scale;
                if class == DeviationClass::Internal {
                    for a in 0..m {
                        for b in (0..m).filter(|b| *b != a) {
                            offer(gain(a, b), &|| Deviation::Internal {
                                from: ps.strategies[a].clone(),
                                to: ps.strategies[b].clone(),
                            });
                        }
                    }
                } else {
                    let mut table = BTreeMap::new();
                    let mut total = 0.0;
                    for a in 0..m {
                        let mut best = (0.0, a);
                        for b in 0..m {
                            let g = gain(a, b);
                            if g > best.0 {
                                best = (g, b);
                            }
                        }
                        if best.1 != a {
                            total += best.0;
                            table.insert(ps.strategies[a].clone(), ps.strategies[best.1].clone());
                        }
                    }
                    offer(total, &|| Deviation::Swap { player: self.player, table: table.clone() });
                }
            }
        }
        let (class_max, witness) = match top {
            Some(t) => t,
            None => return Err(DeviationError::UnsupportedClass(class)),
        };
        Ok(BestDeviation { value: class_max.max(0.0), class_max, witness })
    }

    /// Observable sequential gap at every info set of the player, in local order:
    /// the best average gain in counterfactual value from deviating there,
    /// counting only rounds in which the deviation itself plays to the info set.
    pub fn osr(&self, game: &Game, class: DeviationClass) -> Result<Vec<OsrEntry>, DeviationError> {
        let sets = game.player_info_sets(self.player).to_vec();
        let scale = self.scale();
        match class {
            DeviationClass::External => {
                let (best, choice) = self.backward_induction(game, &sets, &self.average_weights());
                Ok(sets
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| {
                        let raw = best[i.0] - self.cf_value[k] * scale;
                        let mut actions: Vec<usize> = sets.iter().map(|j| choice[j.0]).collect();
                        for (j, a) in game.path_to(i) {
                            actions[self.local(game, j)] = a;
                        }
                        OsrEntry {
                            info_set: i,
                            gap: raw.max(0.0),
                            raw,
                            witness: Deviation::External { target: PureStrategy::new(self.player, actions) },
                        }
                    })
                    .collect())
            }
            DeviationClass::BlindCf | DeviationClass::InformedCf => {
                let informed = class == DeviationClass::InformedCf;
                // best (value, target, trigger action, replacement) below each info set
                let mut down: Vec<Option<(f64, InfoSetId, Option<usize>, usize)>> = vec![None; game.info_sets().len()];
                for &j in sets.iter().rev() {
                    let k = self.local(game, j);
                    let is = game.info_set(j);
                    let n = is.num_actions();
                    let mut top: Option<(f64, InfoSetId, Option<usize>, usize)> = None;
                    let mut offer = |c: (f64, InfoSetId, Option<usize>, usize)| {
                        if top.is_none_or(|t| c.0 > t.0) {
                            top = Some(c);
                        }
                    };
                    for a in 0..n {
                        if informed {
                            for b in 0..n {
                                offer((self.cf_internal[k][a * n + b], j, Some(a), b));
                            }
                        } else {
                            offer((self.cf_regret[k][a], j, None, a));
                        }
                        for s in &is.successors[a] {
                            let d = down[s.0].unwrap();
                            offer((self.cf_regret[k][a] + d.0, d.1, d.2, d.3));
                        }
                    }
                    down[j.0] = top;
                }
                Ok(sets
                    .iter()
                    .map(|&i| {
                        let (v, target, ta, b) = down[i.0].unwrap();
                        let raw = v * scale;
                        OsrEntry {
                            info_set: i,
                            gap: raw.max(0.0),
                            raw,
                            witness: Deviation::counterfactual(game, target, ta, b),
                        }
                    })
                    .collect())
            }
            other => Err(DeviationError::UnsupportedClass(other)),
        }
    }

    /// Largest average full counterfactual regret at any info set for any blind
    /// counterfactual deviation re-correlating at or below it, divided by the
    /// number of actions that deviation forces from there on; never negative.
    pub fn forced_action_regret_bound(&self, game: &Game) -> f64 {
        let mut bound: f64 = 0.0;
        for &i in game.player_info_sets(self.player) {
            let mut stack = vec![(i, 0.0, 1usize)];
            while let Some((j, acc, d)) = stack.pop() {
                let k = self.local(game, j);
                let is = game.info_set(j);
                for a in 0..is.num_actions() {
                    let v = acc + self.cf_regret[k][a];
                    bound = bound.max(v * self.scale() / d as f64);
                    for s in &is.successors[a] {
                        stack.push((*s, v, d + 1));
                    }
                }
            }
        }
        bound
    }
}

/// Sufficient statistics of an empirical distribution for every player.
#[derive(Debug, Clone)]
pub struct HindsightStats {
    players: Vec<PlayerStats>,
    rounds: usize,
}

impl HindsightStats {
    pub fn new(game: &Game, options: StatsOptions) -> Self {
        HindsightStats { players: (0..game.num_players()).map(|p| PlayerStats::new(game, p, options)).collect(), rounds: 0 }
    }

    pub fn from_play(game: &Game, play: &EmpiricalPlay, options: StatsOptions) -> Self {
        let mut s = HindsightStats::new(game, options);
        for p in play.profiles() {
            s.push(game, p);
        }
        s
    }

    pub fn push(&mut self, game: &Game, profile: &BehavioralProfile) {
        let ev = Evaluation::new(game, profile);
        self.push_evaluated(game, profile, &ev);
    }

    /// Adds a round whose evaluation is already at hand.
    pub fn push_evaluated(&mut self, game: &Game, profile: &BehavioralProfile, ev: &Evaluation) {
        for p in &mut self.players {
            p.push(game, profile, ev);
        }
        self.rounds += 1;
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn player(&self, player: usize) -> &PlayerStats {
        &self.players[player]
    }

    pub fn players(&self) -> &[PlayerStats] {
        &self.players
    }
}

/// Largest benefit within the class (identity included) and a deviation attaining it.
pub fn best_benefit(
    game: &Game,
    play: &EmpiricalPlay,
    player: usize,
    class: DeviationClass,
) -> Result<BestDeviation, DeviationError> {
    if player >= game.num_players() {
        return Err(DeviationError::WrongPlayer { expected: game.num_players().saturating_sub(1), found: player });
    }
    let mut stats = PlayerStats::new(game, player, StatsOptions::default());
    for p in play.profiles() {
        let ev = Evaluation::new(game, p);
        stats.push(game, p, &ev);
    }
    stats.best(game, class)
}
