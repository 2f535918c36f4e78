//! Per-round evaluation of a fixed deviation by pushing the recommended
//! behavioral strategy forward through it.
//!
//! Within a round the recommended pure strategy is a product of independent
//! per-info-set draws, so the image distribution's terminal reach is a signed
//! sum of a few product-form "strategies" (one per trigger outcome).

use crate::efg_core::{Evaluation, Game, NodeId, NodeKind, PureStrategy};
use crate::efg_core::BehavioralProfile;
use crate::hindsight_eval::EmpiricalPlay;

use super::{Deviation, DeviationError};

type Rows = Vec<Vec<f64>>;

fn pure_rows(game: &Game, s: &PureStrategy) -> Rows {
    crate::efg_core::pure_to_behavioral(game, s)
}

fn onehot(n: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[a] = 1.0;
    v
}

fn terms(game: &Game, dev: &Deviation, profile: &BehavioralProfile) -> Vec<(f64, Rows)> {
    let player = dev.player();
    let base: Rows = game.player_info_sets(player).iter().map(|i| profile.get(*i).to_vec()).collect();
    let local = |i| game.info_set(i).local_index;
    let masked = |rows: &Rows, i, a: usize| {
        let mut r = rows.clone();
        r[local(i)][a] = 0.0;
        r
    };
    // rows with `i` never played: only terminals outside its subtree count
    let zeroed = |rows: &Rows, i| {
        let mut r = rows.clone();
        r[local(i)].iter_mut().for_each(|x| *x = 0.0);
        r
    };
    // triggered with probability p, otherwise the masked rows; outside the
    // trigger's subtree both branches coincide, so the masked term's excess is removed
    let informed = |p: f64, trig: Rows, rows: &Rows, i, a: usize| vec![(p, trig), (1.0, masked(rows, i, a)), (-p, zeroed(rows, i))];
    let with = |rows: &Rows, i, a: usize| {
        let mut r = rows.clone();
        r[local(i)] = onehot(game.info_set(i).num_actions(), a);
        r
    };
    match dev {
        Deviation::External { target } => vec![(1.0, pure_rows(game, target))],
        Deviation::Internal { from, to } => {
            let p = from.probability(game, profile);
            vec![(1.0, base), (p, pure_rows(game, to)), (-p, pure_rows(game, from))]
        }
        Deviation::Swap { table, .. } => {
            let mut out = vec![(1.0, base)];
            for (s, t) in table {
                let p = s.probability(game, profile);
                if p != 0.0 {
                    out.push((p, pure_rows(game, t)));
                    out.push((-p, pure_rows(game, s)));
                }
            }
            out
        }
        Deviation::Causal { trigger, trigger_action, continuation, .. } => {
            let mut trig = base.clone();
            for (&i, &a) in continuation {
                trig = with(&trig, i, a);
            }
            match trigger_action {
                None => vec![(1.0, trig)],
                Some(a) => informed(profile.prob(*trigger, *a), trig, &base, *trigger, *a),
            }
        }
        Deviation::Action { trigger, trigger_action, replacement, .. } => {
            let trig = with(&base, *trigger, *replacement);
            match trigger_action {
                None => vec![(1.0, trig)],
                Some(a) => informed(profile.prob(*trigger, *a), trig, &base, *trigger, *a),
            }
        }
        Deviation::Counterfactual { target, path, trigger_action, replacement, .. } => {
            let mut pathed = base;
            for &(i, a) in path {
                pathed = with(&pathed, i, a);
            }
            let trig = with(&pathed, *target, *replacement);
            match trigger_action {
                None => vec![(1.0, trig)],
                Some(a) => informed(profile.prob(*target, *a), trig, &pathed, *target, *a),
            }
        }
    }
}

/// Expected utility of `player` when their own moves use `rows` (possibly
/// unnormalized) and everyone else's reach is taken from `ev`.
fn value_under(game: &Game, player: usize, ev: &Evaluation, rows: &Rows) -> f64 {
    let mut reach = vec![1.0; game.num_nodes()];
    let mut total = 0.0;
    for idx in 1..game.num_nodes() {
        let (p, a) = game.node(NodeId(idx)).parent.unwrap();
        let step = match game.node(p).kind {
            NodeKind::Decision { player: q, info_set } if q == player => rows[game.info_set(info_set).local_index][a],
            _ => 1.0,
        };
        reach[idx] = reach[p.0] * step;
    }
    for &z in game.terminals() {
        if reach[z.0] != 0.0 {
            total += reach[z.0] * ev.others_reach(player, z) * game.node(z).utilities().unwrap()[player];
        }
    }
    total
}

/// Accumulates the summed benefit of a fixed list of deviations round by round.
#[derive(Debug, Clone)]
pub struct DeviationTracker<'g> {
    game: &'g Game,
    player: usize,
    deviations: Vec<Deviation>,
    totals: Vec<f64>,
    rounds: usize,
}

impl<'g> DeviationTracker<'g> {
    pub fn new(game: &'g Game, player: usize, deviations: Vec<Deviation>) -> Result<Self, DeviationError> {
        for d in &deviations {
            if d.player() != player {
                return Err(DeviationError::WrongPlayer { expected: player, found: d.player() });
            }
        }
        let n = deviations.len();
        Ok(DeviationTracker { game, player, deviations, totals: vec![0.0; n], rounds: 0 })
    }

    pub fn push(&mut self, profile: &BehavioralProfile) {
        let ev = Evaluation::new(self.game, profile);
        let rec = ev.values[self.player][0];
        for (d, tot) in self.deviations.iter().zip(self.totals.iter_mut()) {
            let v: f64 = terms(self.game, d, profile)
                .iter()
                .map(|(w, rows)| if *w == 0.0 { 0.0 } else { w * value_under(self.game, self.player, &ev, rows) })
                .sum();
            *tot += v - rec;
        }
        self.rounds += 1;
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn deviations(&self) -> &[Deviation] {
        &self.deviations
    }

    /// Summed (not averaged) benefit of each deviation so far.
    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn averages(&self) -> Vec<f64> {
        self.totals.iter().map(|t| t / self.rounds.max(1) as f64).collect()
    }
}

/// Average gain of the deviating player from applying `dev` to each round's
/// recommendation, against the others' recommendations.
pub fn benefit(game: &Game, play: &EmpiricalPlay, dev: &Deviation) -> Result<f64, DeviationError> {
    let player = dev.player();
    if player >= game.num_players() {
        return Err(DeviationError::WrongPlayer { expected: game.num_players().saturating_sub(1), found: player });
    }
    let mut t = DeviationTracker::new(game, player, vec![dev.clone()])?;
    for p in play.profiles() {
        t.push(p);
    }
    Ok(t.averages()[0])
}
