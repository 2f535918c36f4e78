//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{random_play, Oracle};
use hindsight::deviations::{DeviationClass as D, HindsightStats, StatsOptions, DEFAULT_ENUMERATION_CAP};
use hindsight::efg_core::{bellman_residual, reach_prob, BehavioralProfile, NodeId, NodeKind, Selector};
use hindsight::game_library::{builtin_games, extended_shapleys};
use hindsight::hindsight_eval::{
    blind_cf_tracker, full_regret_decomposition_checks, gap_from_stats, observable_sequential_check, path_regret_checks,
    regret_aggregation_checks, table1_check, verify_appendix, ExampleGames,
};
use hindsight::learners::{run_selfplay_with, Cadence, LearnerMode, TrainerConfig, UpdateMode, ValueMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BONUS: f64 = 0.003;
/// External and blind counterfactual gaps must fall below this by the last round.
const CONVERGED: f64 = 0.01;
/// Causal and action gaps at the last round keep at least this share of their early value.
const PERSISTENT_SHARE: f64 = 0.5;
const EARLY_ROUND: usize = 1_000;
const LATE_ROUND: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    println!("{} {name} ({:.2}s) {}", if o.pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64(), o.detail);
    o.pass
}

fn appendix() -> Outcome {
    let start = Instant::now();
    let checks = verify_appendix(&ExampleGames::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.pass).map(|c| format!("{}: expected {} got {}", c.check, c.expected, c.computed)).collect();
    Outcome {
        pass: failed.is_empty() && elapsed < 1.0,
        detail: format!("{} values, {} mismatched, {elapsed:.3}s {}", checks.len(), failed.len(), failed.join("; ")),
    }
}

fn table() -> Outcome {
    let r = table1_check().unwrap();
    let failed: Vec<String> = r.cells.iter().filter(|c| !c.pass).map(|c| format!("({}, {}) {}", c.row.label(), c.col.label(), c.detail)).collect();
    let refuted = r.cells.iter().filter(|c| c.col_gap.is_some()).count();
    Outcome { pass: failed.is_empty(), detail: format!("{refuted} refuted and {} other cells, failures: [{}]", 36 - refuted, failed.join("; ")) }
}

fn oracle() -> Outcome {
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, game) in builtin_games() {
        for seed in 0..20 {
            let play = random_play(&game, seed, 5);
            let stats = HindsightStats::from_play(&game, &play, StatsOptions::default());
            for p in 0..game.num_players() {
                let o = Oracle::new(&game, &play, p);
                for class in D::ALL {
                    let Some(expected) = o.best(class, DEFAULT_ENUMERATION_CAP) else { continue };
                    let got = stats.player(p).best(&game, class).unwrap().class_max;
                    let err = (got - expected).abs();
                    worst = worst.max(err);
                    compared += 1;
                    if err > 1e-12 {
                        failures.push(format!("{name} seed {seed} player {} {class}: {got} vs {expected}", p + 1));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{compared} comparisons, max error {worst:.2e} {}", failures.iter().take(5).cloned().collect::<Vec<_>>().join("; ")),
    }
}

fn selfplay_bounds() -> Outcome {
    let game = extended_shapleys(BONUS);
    let mut min_slack = f64::INFINITY;
    let mut checks = 0;
    let mut failures = Vec::new();
    for update in [UpdateMode::Simultaneous, UpdateMode::Alternating] {
        let config = TrainerConfig { iterations: 10_000, update, cadence: Cadence::Every(1_000), ..Default::default() };
        let mut stats = HindsightStats::new(&game, StatsOptions { pure_pair_cap: 0 });
        let mut trackers: Vec<_> = (0..2).map(|p| blind_cf_tracker(&game, p)).collect();
        run_selfplay_with(&game, config, |tr, profile, ev, snap| {
            stats.push_evaluated(&game, profile, ev);
            for t in &mut trackers {
                t.push(profile);
            }
            if !snap {
                return;
            }
            for p in 0..2 {
                let mut all = regret_aggregation_checks(&game, &stats, p).unwrap();
                all.extend(full_regret_decomposition_checks(&game, &stats, p));
                all.extend(path_regret_checks(&game, &stats, &trackers[p]));
                all.push(observable_sequential_check(&game, &stats, p).unwrap());
                for c in all {
                    checks += 1;
                    min_slack = min_slack.min(c.slack);
                    if !c.pass {
                        failures.push(format!("{update:?} t={} {}: {} > {}", tr.rounds(), c.name, c.lhs, c.rhs));
                    }
                }
            }
        });
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checks} checks, min slack {min_slack:.3e} {}", failures.iter().take(5).cloned().collect::<Vec<_>>().join("; ")),
    }
}

const PERSISTENT: [D; 4] = [D::BlindCausal, D::BlindAction, D::InformedCausal, D::InformedAction];

fn persistence() -> Outcome {
    let game = extended_shapleys(BONUS);
    let mut pass = true;
    let mut parts = Vec::new();
    for update in [UpdateMode::Simultaneous, UpdateMode::Alternating] {
        let config = TrainerConfig { iterations: LATE_ROUND, update, cadence: Cadence::Every(EARLY_ROUND), ..Default::default() };
        let mut stats = HindsightStats::new(&game, StatsOptions { pure_pair_cap: 0 });
        let mut early = None;
        let mut late = None;
        let mut classes = PERSISTENT.to_vec();
        classes.extend([D::External, D::BlindCf]);
        run_selfplay_with(&game, config, |tr, profile, ev, _| {
            stats.push_evaluated(&game, profile, ev);
            if tr.rounds() == EARLY_ROUND {
                early = Some(gap_from_stats(&game, &stats, &classes).unwrap());
            }
            if tr.rounds() == LATE_ROUND {
                late = Some(gap_from_stats(&game, &stats, &classes).unwrap());
            }
        });
        let (early, late) = (early.unwrap(), late.unwrap());
        let ext = (0..2).map(|p| late.get(p, D::External).unwrap().gap).fold(0.0, f64::max);
        let cf = (0..2).map(|p| late.get(p, D::BlindCf).unwrap().gap).fold(0.0, f64::max);
        let ok_low = ext < CONVERGED && cf < CONVERGED;
        let mut line = format!("{update:?}: external {ext:.2e} blind_cf {cf:.2e}");
        let mut ok_keep = true;
        for c in PERSISTENT {
            let (a, b) = (early.summed(c), late.summed(c));
            ok_keep &= b > PERSISTENT_SHARE * a;
            line.push_str(&format!(" {c} {a:.4}->{b:.4}"));
        }
        pass &= ok_low && ok_keep;
        parts.push(line);
    }
    Outcome { pass, detail: parts.join(" | ") }
}

fn action_gap_bound() -> Outcome {
    let game = extended_shapleys(BONUS);
    let config = TrainerConfig {
        iterations: LATE_ROUND,
        update: UpdateMode::Simultaneous,
        learner: LearnerMode::Internal,
        values: ValueMode::ReachWeighted,
        cadence: Cadence::Every(10_000),
        ..Default::default()
    };
    let mut stats = HindsightStats::new(&game, StatsOptions { pure_pair_cap: 0 });
    let mut min_slack = f64::INFINITY;
    let mut last = [0.0; 2];
    let mut failures = Vec::new();
    run_selfplay_with(&game, config, |tr, profile, ev, snap| {
        stats.push_evaluated(&game, profile, ev);
        if !snap {
            return;
        }
        for p in 0..2 {
            let g = stats.player(p).best(&game, D::InformedAction).unwrap().value;
            let bound = tr.states().max_average_regret(&game, p);
            min_slack = min_slack.min(bound - g);
            if g > bound + 1e-9 {
                failures.push(format!("t={} player {}: {g} > {bound}", tr.rounds(), p + 1));
            }
            last[p] = g;
        }
    });
    let end_ok = last.iter().all(|g| *g <= CONVERGED);
    Outcome {
        pass: failures.is_empty() && end_ok,
        detail: format!("min slack {min_slack:.3e}, final informed action gaps {:.2e} {:.2e} {}", last[0], last[1], failures.join("; ")),
    }
}

fn chance_reach(game: &hindsight::efg_core::Game, node: NodeId) -> f64 {
    let mut p = 1.0;
    let mut cur = node;
    while let Some((parent, a)) = game.node(cur).parent {
        if let NodeKind::Chance { probs } = &game.node(parent).kind {
            p *= probs[a];
        }
        cur = parent;
    }
    p
}

fn numerics() -> Outcome {
    let mut worst_bellman: f64 = 0.0;
    let mut worst_reach: f64 = 0.0;
    for (_, game) in builtin_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let p = BehavioralProfile::random(&game, &mut rng, 0.3);
            for is in game.info_sets() {
                for a in 0..is.num_actions() {
                    worst_bellman = worst_bellman.max(bellman_residual(&game, &p, is.id, a).unwrap());
                }
            }
            for idx in 0..game.num_nodes() {
                let h = NodeId(idx);
                let all = reach_prob(&game, &p, Selector::All, game.root(), h).unwrap();
                let mut product = chance_reach(&game, h);
                for i in 0..game.num_players() {
                    let own = reach_prob(&game, &p, Selector::Player(i), game.root(), h).unwrap();
                    let others = reach_prob(&game, &p, Selector::Others(i), game.root(), h).unwrap();
                    worst_reach = worst_reach.max((own * others - all).abs());
                    product *= own;
                }
                worst_reach = worst_reach.max((product - all).abs());
            }
        }
    }
    Outcome {
        pass: worst_bellman <= 1e-10 && worst_reach <= 1e-12,
        detail: format!("max bellman residual {worst_bellman:.2e}, max reach factorization error {worst_reach:.2e}"),
    }
}

fn main() -> ExitCode {
    let results = [
        report("appendix value reproduction", appendix),
        report("equilibrium relationship table", table),
        report("oracle equivalence", oracle),
        report("regret bounds during self-play", selfplay_bounds),
        report("gap convergence and persistence", persistence),
        report("reach-weighted internal learners bound action gaps", action_gap_bound),
        report("bellman and reach numerics", numerics),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
