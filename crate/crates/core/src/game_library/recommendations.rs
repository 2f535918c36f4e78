//! Recommendation distributions that separate equilibrium concepts in the
//! built-in games, as uniform mixtures of pure profiles.

use crate::efg_core::{BehavioralProfile, Game, PureStrategy};
use crate::hindsight_eval::EmpiricalPlay;

type Choices<'a> = Vec<Vec<(&'a str, &'a str)>>;

/// Equal-weight mixture of pure profiles given as (info-set key, action) lists per player.
pub fn uniform_mixture(game: &Game, profiles: &[Choices]) -> EmpiricalPlay {
    let rounds = profiles
        .iter()
        .map(|per_player| {
            let pure: Vec<PureStrategy> = per_player
                .iter()
                .enumerate()
                .map(|(pl, c)| PureStrategy::from_labels(game, pl, c).expect("labels exist in the game"))
                .collect();
            BehavioralProfile::from_pure(game, &pure).expect("complete pure profile")
        })
        .collect();
    EmpiricalPlay::new(game, rounds).expect("valid recommendation profiles")
}

/// Both players told to coordinate on one event with no upgrade; player two
/// prefers X, player one prefers Y.
pub fn extended_bos_recommendations(game: &Game) -> EmpiricalPlay {
    uniform_mixture(
        game,
        &[
            vec![vec![("root", "¬U"), ("U", "Y"), ("¬U", "Y")], vec![("event", "Y")]],
            vec![vec![("root", "¬U"), ("U", "X"), ("¬U", "X")], vec![("event", "X")]],
        ],
    )
}

pub fn extended_mp_recommendations(game: &Game) -> EmpiricalPlay {
    uniform_mixture(
        game,
        &[
            vec![vec![("root", "¬M"), ("M", "H"), ("¬M", "T")], vec![("guess", "H")]],
            vec![vec![("root", "M"), ("M", "H"), ("¬M", "T")], vec![("guess", "T")]],
        ],
    )
}

pub fn macqueen_recommendations(game: &Game) -> EmpiricalPlay {
    let p1 = vec![("root", "L"), ("RL", "L"), ("RR", "L")];
    uniform_mixture(game, &[vec![p1.clone(), vec![("public", "L")]], vec![p1, vec![("public", "R")]]])
}

pub fn sequential_bos_recommendations(game: &Game) -> EmpiricalPlay {
    uniform_mixture(
        game,
        &[
            vec![vec![("root", "¬Play"), ("play", "¬U"), ("U", "Y"), ("¬U", "Y")], vec![("event", "Y")]],
            vec![vec![("root", "¬Play"), ("play", "¬U"), ("U", "X"), ("¬U", "X")], vec![("event", "X")]],
        ],
    )
}

pub fn in_or_out_recommendation(game: &Game) -> EmpiricalPlay {
    uniform_mixture(game, &[vec![vec![("root", "Out"), ("second", "Out")]]])
}
