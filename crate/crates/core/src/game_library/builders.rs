//! Small benchmark games used as counterexamples between equilibrium concepts.

use crate::efg_core::{Game, Tree};

const TWO_PLAYERS: [&str; 2] = ["Player 1", "Player 2"];

fn bos_payoff(upgrade: bool, p1: &str, p2: &str) -> [f64; 2] {
    match (upgrade, p1 == p2, p1) {
        (_, false, _) => [0.0, 0.0],
        (true, true, "X") => [2.0, 3.0],
        (true, true, _) => [3.0, 2.0],
        (false, true, "X") => [1.0, 2.0],
        (false, true, _) => [2.0, 1.0],
    }
}

/// Upgrade choice followed by a simultaneous Bach-or-Stravinsky event choice.
fn bos_body(root_key: &str) -> Tree {
    let event = |upgrade: bool, key: &str| {
        Tree::decision(
            0,
            key,
            ["X", "Y"]
                .iter()
                .map(|&e1| {
                    let leaves = ["X", "Y"].iter().map(|&e2| (e2, Tree::terminal(&bos_payoff(upgrade, e1, e2)))).collect();
                    (e1, Tree::decision(1, "event", leaves))
                })
                .collect(),
        )
    };
    Tree::decision(0, root_key, vec![("U", event(true, "U")), ("¬U", event(false, "¬U"))])
}

pub fn extended_bos() -> Game {
    Game::from_tree("Extended Bach or Stravinsky", &TWO_PLAYERS, &bos_body("root")).expect("well-formed builder")
}

pub fn sequential_extended_bos() -> Game {
    let t = Tree::decision(0, "root", vec![("Play", bos_body("play")), ("¬Play", Tree::terminal(&[3.0, 3.0]))]);
    Game::from_tree("Sequential Extended Bach or Stravinsky", &TWO_PLAYERS, &t).expect("well-formed builder")
}

pub fn extended_mp() -> Game {
    let branch = |want_match: bool, key: &str| {
        Tree::decision(
            0,
            key,
            ["H", "T"]
                .iter()
                .map(|&c1| {
                    let leaves = ["H", "T"]
                        .iter()
                        .map(|&c2| {
                            let u = if (c1 == c2) == want_match { 1.0 } else { -1.0 };
                            (c2, Tree::terminal(&[u, -u]))
                        })
                        .collect();
                    (c1, Tree::decision(1, "guess", leaves))
                })
                .collect(),
        )
    };
    let t = Tree::decision(0, "root", vec![("M", branch(true, "M")), ("¬M", branch(false, "¬M"))]);
    Game::from_tree("Extended Matching Pennies", &TWO_PLAYERS, &t).expect("well-formed builder")
}

/// Rock-paper-scissors where player one also predicts whether player two
/// throws rock, earning `bonus` for a right "rock" call and `bonus / 3` for a
/// right "not rock" call.
pub fn extended_shapleys(bonus: f64) -> Game {
    let throws = ["R", "P", "S"];
    let beats = |a: &str, b: &str| matches!((a, b), ("R", "S") | ("P", "R") | ("S", "P"));
    let base = |a: &str, b: &str| -> [f64; 2] {
        if beats(a, b) {
            [1.0, -1.0]
        } else if beats(b, a) {
            [-1.0, 1.0]
        } else {
            [-1.0, -1.0]
        }
    };
    let root = throws
        .iter()
        .map(|&a| {
            let predictions = [("r?", true), ("¬r?", false)]
                .iter()
                .map(|&(label, rock)| {
                    let leaves = throws
                        .iter()
                        .map(|&b| {
                            let mut u = base(a, b);
                            if rock && b == "R" {
                                u[0] += bonus;
                            } else if !rock && b != "R" {
                                u[0] += bonus / 3.0;
                            }
                            (b, Tree::terminal(&u))
                        })
                        .collect();
                    (label, Tree::decision(1, "throw", leaves))
                })
                .collect();
            (a, Tree::decision(0, a, predictions))
        })
        .collect();
    let t = Tree::decision(0, "root", root);
    Game::from_tree(&format!("Extended Shapley's Game (bonus {bonus})"), &TWO_PLAYERS, &t).expect("well-formed builder")
}

pub fn in_or_out() -> Game {
    let second = Tree::decision(0, "second", vec![("In", Tree::terminal(&[1.0])), ("Out", Tree::terminal(&[0.0]))]);
    let t = Tree::decision(0, "root", vec![("In", second), ("Out", Tree::terminal(&[0.0]))]);
    Game::from_tree("In or Out", &["Player 1"], &t).expect("well-formed builder")
}

pub fn macqueen() -> Game {
    let last = |key: &str| Tree::decision(0, key, vec![("L", Tree::terminal(&[-2.0, 0.0])), ("R", Tree::terminal(&[2.0, 0.0]))]);
    let public = Tree::decision(1, "public", vec![("L", last("RL")), ("R", last("RR"))]);
    let t = Tree::decision(0, "root", vec![("L", Tree::terminal(&[1.0, 0.0])), ("R", public)]);
    Game::from_tree("MacQueen's Counterexample", &TWO_PLAYERS, &t).expect("well-formed builder")
}

pub const DEFAULT_SHAPLEY_BONUS: f64 = 0.003;

pub const BUILTIN_NAMES: [&str; 6] =
    ["extended_bos", "extended_mp", "extended_shapleys", "in_or_out", "macqueen", "sequential_extended_bos"];

/// Looks up a built-in game; `bonus` only affects the Shapley variant.
pub fn builtin(name: &str, bonus: f64) -> Option<Game> {
    Some(match name {
        "extended_bos" => extended_bos(),
        "extended_mp" => extended_mp(),
        "extended_shapleys" => extended_shapleys(bonus),
        "in_or_out" => in_or_out(),
        "macqueen" => macqueen(),
        "sequential_extended_bos" => sequential_extended_bos(),
        _ => return None,
    })
}

pub fn builtin_games() -> Vec<(&'static str, Game)> {
    BUILTIN_NAMES.iter().map(|n| (*n, builtin(n, DEFAULT_SHAPLEY_BONUS).unwrap())).collect()
}
