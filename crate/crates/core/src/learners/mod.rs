//! Counterfactual regret minimization self-play with external or internal
//! regret matching at every info set.

mod cfr;
mod regret;

use serde::{Deserialize, Serialize};

use crate::efg_core::{BehavioralProfile, Evaluation, Game};
use crate::hindsight_eval::EmpiricalPlay;

pub use cfr::{cfr_iteration, reach_weighted_cfr_iteration, LearnerMode, LearnerStates, LocalLearnerState, UpdateMode, ValueMode};
pub use regret::{internal_regret_matching, regret_matching, swap_transition, StationaryPoint, POWER_ITERATIONS};

/// Which profile of an alternating round enters the empirical distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordConvention {
    /// The strategies at the start of the round.
    #[default]
    PreUpdate,
    /// The profile evaluated by the last player's pass.
    LastEvaluated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cadence {
    /// Every n rounds.
    Every(usize),
    /// Roughly this many points per power of ten.
    Log(usize),
}

impl Cadence {
    /// Snapshot rounds up to `iterations`, ascending; the last round is always one.
    pub fn schedule(&self, iterations: usize) -> Vec<usize> {
        let mut out: Vec<usize> = match *self {
            Cadence::Every(n) => (1..=iterations).filter(|t| t % n.max(1) == 0).collect(),
            Cadence::Log(per) => {
                let per = per.max(1) as f64;
                let mut v = Vec::new();
                let mut j = 0.0;
                loop {
                    let t = 10f64.powf(j / per).round() as usize;
                    if t > iterations {
                        break;
                    }
                    if v.last() != Some(&t) {
                        v.push(t);
                    }
                    j += 1.0;
                }
                v
            }
        };
        if out.last() != Some(&iterations) {
            out.push(iterations);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub iterations: usize,
    pub update: UpdateMode,
    pub learner: LearnerMode,
    pub values: ValueMode,
    /// Kept for reproducible records; full-tree updates use no randomness.
    pub seed: u64,
    pub cadence: Cadence,
    pub record: RecordConvention,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            iterations: 1000,
            update: UpdateMode::Simultaneous,
            learner: LearnerMode::External,
            values: ValueMode::Counterfactual,
            seed: 0,
            cadence: Cadence::Every(1000),
            record: RecordConvention::PreUpdate,
        }
    }
}

/// Learner state at a snapshot round.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: usize,
    /// Per player.
    pub max_average_regret: Vec<f64>,
    /// Per global info set.
    pub cumulative_regrets: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfPlayLog {
    pub config: TrainerConfig,
    pub play: EmpiricalPlay,
    pub snapshots: Vec<Snapshot>,
}

/// Steps self-play one round at a time.
#[derive(Debug, Clone)]
pub struct Trainer<'g> {
    game: &'g Game,
    config: TrainerConfig,
    states: LearnerStates,
    t: usize,
}

impl<'g> Trainer<'g> {
    pub fn new(game: &'g Game, config: TrainerConfig) -> Self {
        Trainer { game, states: LearnerStates::new(game, config.learner), config, t: 0 }
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn states(&self) -> &LearnerStates {
        &self.states
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.config
    }

    /// Runs one round and returns the recorded profile with its evaluation.
    pub fn step(&mut self) -> (BehavioralProfile, Evaluation) {
        let mut passes = cfr::evaluated_iteration(self.game, &mut self.states, self.config.update, self.config.values);
        self.t += 1;
        match self.config.record {
            RecordConvention::PreUpdate => passes.swap_remove(0),
            RecordConvention::LastEvaluated => passes.pop().expect("at least one pass"),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            t: self.t,
            max_average_regret: (0..self.game.num_players()).map(|p| self.states.max_average_regret(self.game, p)).collect(),
            cumulative_regrets: self.game.info_sets().iter().map(|is| self.states.local(is.id).regrets.clone()).collect(),
        }
    }
}

/// Runs self-play, calling `hook` at each snapshot round after that round's
/// profile is recorded.
pub fn run_selfplay_with<F>(game: &Game, config: TrainerConfig, mut hook: F) -> SelfPlayLog
where
    F: FnMut(&Trainer, &BehavioralProfile, &Evaluation, bool),
{
    let iterations = config.iterations.max(1);
    let schedule = config.cadence.schedule(iterations);
    let mut next = schedule.iter().peekable();
    let mut trainer = Trainer::new(game, config.clone());
    let mut profiles = Vec::with_capacity(iterations);
    let mut snapshots = Vec::with_capacity(schedule.len());
    for _ in 0..iterations {
        let (profile, ev) = trainer.step();
        let at_snapshot = next.peek() == Some(&&trainer.rounds());
        if at_snapshot {
            next.next();
            snapshots.push(trainer.snapshot());
        }
        hook(&trainer, &profile, &ev, at_snapshot);
        profiles.push(profile);
    }
    let play = EmpiricalPlay::new(game, profiles).expect("learner profiles are valid");
    SelfPlayLog { config, play, snapshots }
}

pub fn run_selfplay(game: &Game, config: TrainerConfig) -> SelfPlayLog {
    run_selfplay_with(game, config, |_, _, _, _| {})
}
