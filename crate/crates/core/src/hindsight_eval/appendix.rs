//! Deviation values on the worked example distributions, and the gaps those
//! distributions are known to have.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::deviations::{benefit, Deviation, DeviationClass, DeviationError, HindsightStats, StatsOptions};
use crate::efg_core::{counterfactual_value, CfvTarget, Game, InfoSetId, PureStrategy};
use crate::game_library as lib;

use super::{osr_from_stats, EmpiricalPlay};

pub const VALUE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct AppendixCheck {
    pub check: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AppendixCheck {
    fn new(check: String, expected: f64, computed: f64) -> Self {
        let pass = (expected - computed).abs() <= VALUE_TOLERANCE;
        AppendixCheck { check, expected, computed, tolerance: VALUE_TOLERANCE, pass }
    }
}

/// The example games; replace one to see its checks fail.
#[derive(Debug, Clone)]
pub struct ExampleGames {
    pub extended_bos: Game,
    pub extended_mp: Game,
    pub macqueen: Game,
    pub sequential_bos: Game,
}

impl Default for ExampleGames {
    fn default() -> Self {
        ExampleGames {
            extended_bos: lib::extended_bos(),
            extended_mp: lib::extended_mp(),
            macqueen: lib::macqueen(),
            sequential_bos: lib::sequential_extended_bos(),
        }
    }
}

fn set(game: &Game, player: usize, key: &str) -> Result<InfoSetId, DeviationError> {
    game.find_info_set(player, key)
        .ok_or_else(|| DeviationError::Game(crate::efg_core::GameError::Invalid(format!("no info set {key}"))))
}

fn act(game: &Game, i: InfoSetId, label: &str) -> Result<usize, DeviationError> {
    game.action_index(i, label)
        .ok_or_else(|| DeviationError::Game(crate::efg_core::GameError::Invalid(format!("no action {label}"))))
}

struct Ctx<'a> {
    game: &'a Game,
    play: EmpiricalPlay,
    name: &'static str,
    rec: f64,
    out: &'a mut Vec<AppendixCheck>,
}

impl Ctx<'_> {
    fn value(&mut self, label: String, dev: &Deviation, expected: f64) -> Result<(), DeviationError> {
        let v = self.rec + benefit(self.game, &self.play, dev)?;
        self.out.push(AppendixCheck::new(format!("{} {label}", self.name), expected, v));
        Ok(())
    }

    fn external(&mut self, choices: &[(&str, &str)], expected: f64) -> Result<(), DeviationError> {
        let target = PureStrategy::from_labels(self.game, 0, choices)?;
        let label = choices.iter().map(|(k, a)| format!("{k}:{a}")).collect::<Vec<_>>().join(",");
        self.value(format!("external [{label}]"), &Deviation::External { target }, expected)
    }

    fn blind_causal(&mut self, trigger: &str, action: &str, expected: f64) -> Result<(), DeviationError> {
        let i = set(self.game, 0, trigger)?;
        let continuation: BTreeMap<InfoSetId, usize> = [(i, act(self.game, i, action)?)].into();
        let dev = Deviation::Causal { player: 0, trigger: i, trigger_action: None, continuation };
        self.value(format!("blind causal {trigger}->{action}"), &dev, expected)
    }

    fn blind_cf(&mut self, target: &str, action: &str, expected: f64) -> Result<(), DeviationError> {
        let i = set(self.game, 0, target)?;
        let dev = Deviation::counterfactual(self.game, i, None, act(self.game, i, action)?);
        self.value(format!("blind counterfactual {target}->{action}"), &dev, expected)
    }

    fn recommendation(&mut self, expected: f64) {
        self.out.push(AppendixCheck::new(format!("{} recommendation value", self.name), expected, self.rec));
    }

    fn gap(&mut self, stats: &HindsightStats, class: DeviationClass, expected: f64) -> Result<(), DeviationError> {
        let g = stats.player(0).best(self.game, class)?.value;
        self.out.push(AppendixCheck::new(format!("{} player 1 {class} gap", self.name), expected, g));
        Ok(())
    }
}

fn recommendation_value(game: &Game, play: &EmpiricalPlay) -> f64 {
    HindsightStats::from_play(game, play, StatsOptions { pure_pair_cap: 0 }).player(0).recommendation_value()
}

/// Every tabulated deviation value and example gap, in a fixed order.
pub fn verify_appendix(games: &ExampleGames) -> Result<Vec<AppendixCheck>, DeviationError> {
    let mut out = Vec::new();

    {
        let game = &games.extended_bos;
        let play = lib::extended_bos_recommendations(game);
        let rec = recommendation_value(game, &play);
        let stats = HindsightStats::from_play(game, &play, StatsOptions::default());
        let mut c = Ctx { game, play, name: "extended BotS", rec, out: &mut out };
        c.recommendation(1.5);
        for (root, at_u, at_not_u, v) in [
            ("U", "X", "X", 1.0),
            ("U", "X", "Y", 1.0),
            ("U", "Y", "X", 1.5),
            ("U", "Y", "Y", 1.5),
            ("¬U", "X", "X", 0.5),
            ("¬U", "Y", "X", 0.5),
            ("¬U", "X", "Y", 1.0),
            ("¬U", "Y", "Y", 1.0),
        ] {
            c.external(&[("root", root), ("U", at_u), ("¬U", at_not_u)], v)?;
        }
        for (i, a, v) in [("U", "X", 1.5), ("U", "Y", 1.5), ("¬U", "X", 0.5), ("¬U", "Y", 1.0)] {
            c.blind_causal(i, a, v)?;
        }
        for (i, a, v) in [("root", "U", 2.5), ("U", "X", 1.0), ("U", "Y", 1.5), ("root", "¬U", 1.5), ("¬U", "X", 0.5), ("¬U", "Y", 1.0)] {
            c.blind_cf(i, a, v)?;
        }
        c.gap(&stats, DeviationClass::InformedCausal, 0.0)?;
        c.gap(&stats, DeviationClass::BlindAction, 1.0)?;
        c.gap(&stats, DeviationClass::BlindCf, 1.0)?;
    }

    {
        let game = &games.extended_mp;
        let play = lib::extended_mp_recommendations(game);
        let rec = recommendation_value(game, &play);
        let stats = HindsightStats::from_play(game, &play, StatsOptions::default());
        let mut c = Ctx { game, play, name: "extended MP", rec, out: &mut out };
        c.recommendation(0.0);
        for root in ["M", "¬M"] {
            for at_m in ["H", "T"] {
                for at_not_m in ["H", "T"] {
                    c.external(&[("root", root), ("M", at_m), ("¬M", at_not_m)], 0.0)?;
                }
            }
        }
        for (i, a, v) in [("M", "H", 0.0), ("M", "T", 1.0), ("¬M", "H", -1.0), ("¬M", "T", 0.0)] {
            c.blind_causal(i, a, v)?;
        }
        for (i, a) in [("root", "M"), ("M", "H"), ("M", "T"), ("root", "¬M"), ("¬M", "H"), ("¬M", "T")] {
            c.blind_cf(i, a, 0.0)?;
        }
        c.gap(&stats, DeviationClass::InformedCf, 0.0)?;
        c.gap(&stats, DeviationClass::BlindCausal, 1.0)?;
        c.gap(&stats, DeviationClass::BlindAction, 1.0)?;
    }

    {
        let game = &games.macqueen;
        let play = lib::macqueen_recommendations(game);
        let rec = recommendation_value(game, &play);
        let stats = HindsightStats::from_play(game, &play, StatsOptions::default());
        let mut c = Ctx { game, play, name: "MacQueen", rec, out: &mut out };
        c.recommendation(1.0);
        c.external(&[("root", "R"), ("RL", "R"), ("RR", "R")], 2.0)?;
        c.blind_cf("RL", "R", 0.0)?;
        c.blind_cf("RR", "R", 0.0)?;
        c.gap(&stats, DeviationClass::InformedCf, 0.0)?;
        c.gap(&stats, DeviationClass::External, 1.0)?;
    }

    {
        let game = &games.sequential_bos;
        let play = lib::sequential_bos_recommendations(game);
        let stats = HindsightStats::from_play(game, &play, StatsOptions::default());
        let name = "sequential BotS";
        let i = set(game, 0, "play")?;
        let u = act(game, i, "U")?;
        let t = play.len() as f64;
        let mut rec_cf = 0.0;
        let mut dev_cf = 0.0;
        for p in play.profiles() {
            rec_cf += counterfactual_value(game, p, i, &CfvTarget::Current)?;
            dev_cf += counterfactual_value(game, p, i, &CfvTarget::Action(u))?;
        }
        out.push(AppendixCheck::new(format!("{name} recommended counterfactual value at play"), 1.5, rec_cf / t));
        out.push(AppendixCheck::new(format!("{name} counterfactual value of play->U"), 2.5, dev_cf / t));
        let osr = osr_from_stats(game, &stats, 0, DeviationClass::BlindCf)?;
        let at_play = osr.entries.iter().find(|e| e.info_set == i).map(|e| e.gap).unwrap_or(f64::NAN);
        out.push(AppendixCheck::new(format!("{name} observable blind counterfactual gap at play"), 1.0, at_play));
        let internal = stats.player(0).best(game, DeviationClass::Internal)?.value;
        out.push(AppendixCheck::new(format!("{name} player 1 internal gap"), 0.0, internal));
    }

    Ok(out)
}
