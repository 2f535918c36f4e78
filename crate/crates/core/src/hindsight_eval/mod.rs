//! Equilibrium gaps of empirical play, observable sequential rationality gaps,
//! regret-bound checks and the equilibrium relationship table.

mod appendix;
mod empirical;
mod table1;

use serde::Serialize;
use serde_json::Value;

use crate::deviations::{
    BestDeviation, Deviation, DeviationClass, DeviationError, DeviationTracker, HindsightStats, OsrEntry, StatsOptions,
};
use crate::efg_core::Game;

pub use appendix::{verify_appendix, AppendixCheck, ExampleGames, VALUE_TOLERANCE};
pub use empirical::EmpiricalPlay;
pub use table1::{table1_check, CellKind, CellResult, Concept, Table1Report, GAP_TOLERANCE, REFUTE_THRESHOLD, TABLE1};

#[derive(Debug, Clone)]
pub struct GapEntry {
    pub player: usize,
    pub class: DeviationClass,
    /// Positive part of the best benefit.
    pub gap: f64,
    pub best: BestDeviation,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub t: usize,
    /// Ordered by player, then by the requested class order.
    pub entries: Vec<GapEntry>,
}

impl GapReport {
    pub fn get(&self, player: usize, class: DeviationClass) -> Option<&GapEntry> {
        self.entries.iter().find(|e| e.player == player && e.class == class)
    }

    /// Gap of one class summed across players.
    pub fn summed(&self, class: DeviationClass) -> f64 {
        self.entries.iter().filter(|e| e.class == class).map(|e| e.gap).sum()
    }
}

pub fn gap_from_stats(game: &Game, stats: &HindsightStats, classes: &[DeviationClass]) -> Result<GapReport, DeviationError> {
    let mut entries = Vec::new();
    for p in stats.players() {
        for &class in classes {
            let best = p.best(game, class)?;
            entries.push(GapEntry { player: p.player(), class, gap: best.value, best });
        }
    }
    Ok(GapReport { t: stats.rounds(), entries })
}

pub fn gap(game: &Game, play: &EmpiricalPlay, classes: &[DeviationClass]) -> Result<GapReport, DeviationError> {
    gap_from_stats(game, &HindsightStats::from_play(game, play, StatsOptions::default()), classes)
}

#[derive(Debug, Clone)]
pub struct OsrReport {
    pub player: usize,
    pub class: DeviationClass,
    /// One entry per info set of the player, in local order.
    pub entries: Vec<OsrEntry>,
    pub max_gap: f64,
}

pub fn osr_from_stats(game: &Game, stats: &HindsightStats, player: usize, class: DeviationClass) -> Result<OsrReport, DeviationError> {
    let entries = stats.player(player).osr(game, class)?;
    let max_gap = entries.iter().map(|e| e.gap).fold(0.0, f64::max);
    Ok(OsrReport { player, class, entries, max_gap })
}

pub fn osr_gap(game: &Game, play: &EmpiricalPlay, player: usize, class: DeviationClass) -> Result<OsrReport, DeviationError> {
    if player >= game.num_players() {
        return Err(DeviationError::WrongPlayer { expected: game.num_players().saturating_sub(1), found: player });
    }
    let stats = HindsightStats::from_play(game, play, StatsOptions { pure_pair_cap: 0 });
    osr_from_stats(game, &stats, player, class)
}

/// One inequality `lhs <= rhs` checked with a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

pub const BOUND_TOLERANCE: f64 = 1e-9;

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundCheck { name: name.into(), lhs, rhs, slack: rhs - lhs, pass: rhs - lhs >= -BOUND_TOLERANCE }
    }
}

fn positive_immediate_regret_sum(game: &Game, stats: &HindsightStats, player: usize) -> f64 {
    let p = stats.player(player);
    let t = stats.rounds().max(1) as f64;
    (0..game.player_info_sets(player).len())
        .map(|k| p.cf_regrets(k).iter().fold(0.0, |m: f64, r| m.max(*r)))
        .sum::<f64>()
        / t
}

/// Whole-game external and blind counterfactual gaps are each at most the
/// summed positive immediate counterfactual regrets.
pub fn regret_aggregation_checks(game: &Game, stats: &HindsightStats, player: usize) -> Result<Vec<BoundCheck>, DeviationError> {
    let rhs = positive_immediate_regret_sum(game, stats, player);
    let p = stats.player(player);
    Ok(vec![
        BoundCheck::new(format!("player {} external gap vs summed immediate regret", player + 1), p.best(game, DeviationClass::External)?.value, rhs),
        BoundCheck::new(format!("player {} blind counterfactual gap vs summed immediate regret", player + 1), p.best(game, DeviationClass::BlindCf)?.value, rhs),
    ])
}

/// Full external regret at each info set is at most its immediate regret plus
/// the largest summed full regret over the next info sets of one action.
pub fn full_regret_decomposition_checks(game: &Game, stats: &HindsightStats, player: usize) -> Vec<BoundCheck> {
    let p = stats.player(player);
    let t = stats.rounds().max(1) as f64;
    let full = p.full_external_regrets(game);
    game.player_info_sets(player)
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let is = game.info_set(i);
            let immediate = p.cf_regrets(k).iter().fold(f64::NEG_INFINITY, |m, r| m.max(*r)) / t;
            let next = is
                .successors
                .iter()
                .map(|succ| succ.iter().map(|j| full[game.info_set(*j).local_index]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            BoundCheck::new(format!("player {} info set {} full regret decomposition", player + 1, is.key), full[k], immediate + next)
        })
        .collect()
}

/// Tracker over every blind counterfactual deviation of `player`, for
/// measuring their regret directly from the rounds.
pub fn blind_cf_tracker(game: &Game, player: usize) -> DeviationTracker<'_> {
    let devs: Vec<Deviation> = game
        .player_info_sets(player)
        .iter()
        .flat_map(|&i| (0..game.info_set(i).num_actions()).map(move |b| Deviation::counterfactual(game, i, None, b)))
        .collect();
    DeviationTracker::new(game, player, devs).expect("deviations built for the player")
}

/// Each blind counterfactual deviation's measured average regret is at most
/// the target's immediate regret plus the immediate regrets along its path.
pub fn path_regret_checks(game: &Game, stats: &HindsightStats, tracker: &DeviationTracker) -> Vec<BoundCheck> {
    let t = stats.rounds().max(1) as f64;
    assert_eq!(tracker.rounds(), stats.rounds(), "tracker and statistics cover different rounds");
    tracker
        .deviations()
        .iter()
        .zip(tracker.averages())
        .map(|(d, measured)| {
            let Deviation::Counterfactual { player, target, path, .. } = d else { unreachable!("blind counterfactual tracker") };
            let p = stats.player(*player);
            let max_at = |i| p.cf_regrets(game.info_set(i).local_index).iter().fold(f64::NEG_INFINITY, |m: f64, r| m.max(*r));
            let rhs = (max_at(*target) + path.iter().map(|(i, _)| max_at(*i)).sum::<f64>()) / t;
            let label = d.witness_json(game);
            BoundCheck::new(format!("path regret bound {}", compact(&label)), measured, rhs)
        })
        .collect()
}

fn compact(v: &Value) -> String {
    let target = v.get("target").and_then(|t| t.get("key")).and_then(|k| k.as_str()).unwrap_or("?");
    let rep = v.get("replacement").and_then(|r| r.as_str()).unwrap_or("?");
    format!("player {} {target}->{rep}", v.get("player").and_then(|p| p.as_u64()).unwrap_or(0))
}

/// Observable sequential gap for external and blind counterfactual deviations
/// against the number of info sets times the forced-action regret bound.
pub fn observable_sequential_check(game: &Game, stats: &HindsightStats, player: usize) -> Result<BoundCheck, DeviationError> {
    let p = stats.player(player);
    let f = p.forced_action_regret_bound(game);
    let ext = osr_from_stats(game, stats, player, DeviationClass::External)?.max_gap;
    let cf = osr_from_stats(game, stats, player, DeviationClass::BlindCf)?.max_gap;
    let n = game.player_info_sets(player).len() as f64;
    Ok(BoundCheck::new(format!("player {} observable sequential gap bound", player + 1), ext.max(cf), n * f))
}

pub fn observable_sequential_bound(game: &Game, play: &EmpiricalPlay, player: usize) -> Result<BoundCheck, DeviationError> {
    let stats = HindsightStats::from_play(game, play, StatsOptions { pure_pair_cap: 0 });
    observable_sequential_check(game, &stats, player)
}
