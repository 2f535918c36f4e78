//! Functional comparison of deviation classes via their action on pure strategies.

use std::collections::HashSet;

use crate::efg_core::{pure_strategies, pure_strategy_index, Game};

use super::{enumerate, Deviation, DeviationClass, DeviationError};

/// Image index of every pure strategy (in enumeration order) under `dev`.
pub fn deviation_map(game: &Game, dev: &Deviation) -> Vec<usize> {
    pure_strategies(game, dev.player()).map(|s| pure_strategy_index(game, &dev.apply(game, &s))).collect()
}

/// True when every deviation of `weaker` acts exactly like some single
/// deviation of `stronger`.
pub fn realizes(
    game: &Game,
    player: usize,
    stronger: DeviationClass,
    weaker: DeviationClass,
    cap: u128,
) -> Result<bool, DeviationError> {
    if stronger == DeviationClass::Swap {
        return Ok(true);
    }
    let maps: HashSet<Vec<usize>> = enumerate(game, player, stronger, cap)?.map(|d| deviation_map(game, &d)).collect();
    let mut ok = true;
    for d in enumerate(game, player, weaker, cap)? {
        if !maps.contains(&deviation_map(game, &d)) {
            ok = false;
            break;
        }
    }
    Ok(ok)
}

/// True when every deviation of `weaker` splits into deviations of `stronger`
/// that each modify a disjoint set of pure strategies, agree with it there and
/// jointly modify exactly what it modifies. Its benefit is then the sum of
/// theirs, so no beneficial `stronger` deviation implies no beneficial `weaker` one.
pub fn covers(
    game: &Game,
    player: usize,
    stronger: DeviationClass,
    weaker: DeviationClass,
    cap: u128,
) -> Result<bool, DeviationError> {
    if stronger == DeviationClass::Swap {
        return Ok(true);
    }
    let parts: Vec<Vec<usize>> = enumerate(game, player, stronger, cap)?.map(|d| deviation_map(game, &d)).collect();
    for d in enumerate(game, player, weaker, cap)? {
        let psi = deviation_map(game, &d);
        if !decomposes(&psi, &parts) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn decomposes(psi: &[usize], parts: &[Vec<usize>]) -> bool {
    let modified = |m: &[usize]| -> Vec<usize> { (0..m.len()).filter(|s| m[*s] != *s).collect() };
    let target: Vec<usize> = modified(psi);
    if target.is_empty() {
        return true;
    }
    let mut usable: Vec<Vec<usize>> = parts
        .iter()
        .filter_map(|phi| {
            let m = modified(phi);
            (!m.is_empty() && m.iter().all(|s| phi[*s] == psi[*s])).then_some(m)
        })
        .collect();
    usable.sort_by(|a, b| b.len().cmp(&a.len()));
    let mut covered = vec![false; psi.len()];
    for m in usable {
        if m.iter().all(|s| !covered[*s]) {
            for s in m {
                covered[s] = true;
            }
        }
    }
    target.iter().all(|s| covered[*s])
}
