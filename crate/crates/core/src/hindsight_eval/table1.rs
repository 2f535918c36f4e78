//! Which equilibrium concepts imply which, checked on the example distributions
//! and by comparing how deviation classes act on pure strategies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::deviations::{covers, DeviationClass, DeviationError, HindsightStats, StatsOptions, DEFAULT_ENUMERATION_CAP};
use crate::efg_core::{BehavioralProfile, Game};
use crate::game_library::{self as lib, builtin_games};

use super::{osr_from_stats, EmpiricalPlay};

/// Refuted cells need a column gap above this and at least one.
pub const REFUTE_THRESHOLD: f64 = 0.25;
pub const GAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Concept {
    Ce,
    Cce,
    Ef,
    Af,
    Cf,
    OsCf,
}

impl Concept {
    pub const ALL: [Concept; 6] = [Concept::Ce, Concept::Cce, Concept::Ef, Concept::Af, Concept::Cf, Concept::OsCf];

    pub fn label(self) -> &'static str {
        match self {
            Concept::Ce => "CE",
            Concept::Cce => "CCE",
            Concept::Ef => "EF",
            Concept::Af => "AF",
            Concept::Cf => "CF",
            Concept::OsCf => "OS-CF",
        }
    }

    /// Class whose zero gap certifies the concept in its strongest form.
    fn strongest(self) -> DeviationClass {
        match self {
            Concept::Ce => DeviationClass::Swap,
            Concept::Cce => DeviationClass::External,
            Concept::Ef => DeviationClass::InformedCausal,
            Concept::Af => DeviationClass::InformedAction,
            Concept::Cf | Concept::OsCf => DeviationClass::InformedCf,
        }
    }

    /// Class whose positive gap refutes the concept in its weakest form.
    fn weakest(self) -> DeviationClass {
        match self {
            Concept::Ce => DeviationClass::Swap,
            Concept::Cce => DeviationClass::External,
            Concept::Ef => DeviationClass::BlindCausal,
            Concept::Af => DeviationClass::BlindAction,
            Concept::Cf | Concept::OsCf => DeviationClass::BlindCf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellKind {
    Same,
    Implied,
    /// Refuted by the example distribution with this letter.
    Refuted(char),
}

use CellKind::{Implied as Y, Refuted as N, Same as E};

/// Rows imply columns, both in `Concept::ALL` order.
pub const TABLE1: [[CellKind; 6]; 6] = [
    [E, Y, Y, Y, Y, N('S')],
    [N('M'), E, N('M'), N('B'), N('B'), N('B')],
    [N('B'), Y, E, N('B'), N('B'), N('B')],
    [N('I'), N('I'), N('I'), E, N('I'), N('I')],
    [N('M'), N('R'), N('M'), N('M'), E, N('S')],
    [N('M'), Y, N('M'), N('M'), Y, E],
];

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub row: Concept,
    pub col: Concept,
    pub kind: CellKind,
    pub row_gap: Option<f64>,
    pub col_gap: Option<f64>,
    pub witness: Option<Value>,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub cells: Vec<CellResult>,
}

impl Table1Report {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn cell(&self, row: Concept, col: Concept) -> &CellResult {
        self.cells.iter().find(|c| c.row == row && c.col == col).expect("every cell is checked")
    }

    /// Fixed-width text grid; refuted cells show the column gap.
    pub fn render(&self) -> String {
        let mut out = format!("{:<8}", "");
        for c in Concept::ALL {
            out.push_str(&format!("{:>12}", c.label()));
        }
        out.push('\n');
        for r in Concept::ALL {
            out.push_str(&format!("{:<8}", r.label()));
            for c in Concept::ALL {
                let cell = self.cell(r, c);
                let mark = if cell.pass { "" } else { "!" };
                let text = match cell.kind {
                    CellKind::Same => "=".to_string(),
                    CellKind::Implied => "yes".to_string(),
                    CellKind::Refuted(l) => format!("{l} {:.3}", cell.col_gap.unwrap_or(f64::NAN)),
                };
                out.push_str(&format!("{:>12}", format!("{mark}{text}")));
            }
            out.push('\n');
        }
        out
    }
}

fn example(letter: char) -> (Game, EmpiricalPlay) {
    match letter {
        'I' => {
            let g = lib::in_or_out();
            let p = lib::in_or_out_recommendation(&g);
            (g, p)
        }
        'B' => {
            let g = lib::extended_bos();
            let p = lib::extended_bos_recommendations(&g);
            (g, p)
        }
        'M' => {
            let g = lib::extended_mp();
            let p = lib::extended_mp_recommendations(&g);
            (g, p)
        }
        'S' => {
            let g = lib::sequential_extended_bos();
            let p = lib::sequential_bos_recommendations(&g);
            (g, p)
        }
        'R' => {
            let g = lib::macqueen();
            let p = lib::macqueen_recommendations(&g);
            (g, p)
        }
        other => panic!("no example distribution {other}"),
    }
}

/// Gap of player one for a concept and a witness record.
fn concept_gap(game: &Game, stats: &HindsightStats, concept: Concept, strongest: bool) -> Result<(f64, Value), DeviationError> {
    if concept == Concept::OsCf {
        let classes: &[DeviationClass] =
            if strongest { &[DeviationClass::InformedCf, DeviationClass::BlindCf] } else { &[DeviationClass::BlindCf] };
        let mut best = (0.0, Value::Null);
        for &class in classes {
            let rep = osr_from_stats(game, stats, 0, class)?;
            for e in &rep.entries {
                if best.1.is_null() || e.gap > best.0 {
                    best = (
                        e.gap,
                        json!({"info_set": game.info_set(e.info_set).key, "deviation": e.witness.witness_json(game)}),
                    );
                }
            }
        }
        return Ok(best);
    }
    let class = if strongest { concept.strongest() } else { concept.weakest() };
    let b = stats.player(0).best(game, class)?;
    Ok((b.value, b.witness.witness_json(game)))
}

fn refuted_cell(row: Concept, col: Concept, letter: char) -> Result<CellResult, DeviationError> {
    let (game, play) = example(letter);
    let stats = HindsightStats::from_play(&game, &play, StatsOptions::default());
    let (row_gap, _) = concept_gap(&game, &stats, row, true)?;
    let (col_gap, witness) = concept_gap(&game, &stats, col, false)?;
    let pass = row_gap <= GAP_TOLERANCE && col_gap > REFUTE_THRESHOLD && col_gap >= 1.0 - GAP_TOLERANCE;
    Ok(CellResult {
        row,
        col,
        kind: CellKind::Refuted(letter),
        row_gap: Some(row_gap),
        col_gap: Some(col_gap),
        witness: Some(witness),
        detail: format!("{} for player 1", game.title()),
        pass,
    })
}

fn covered_everywhere(stronger: DeviationClass, weaker: &[DeviationClass]) -> Result<(bool, String), DeviationError> {
    let mut failures = Vec::new();
    for (name, game) in builtin_games() {
        for p in 0..game.num_players() {
            for &w in weaker {
                if !covers(&game, p, stronger, w, DEFAULT_ENUMERATION_CAP)? {
                    failures.push(format!("{name} player {} {w}", p + 1));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{stronger} covers {} on all built-ins", weaker.iter().map(|c| c.name()).collect::<Vec<_>>().join(","))
    } else {
        format!("not covered: {}", failures.join("; "))
    };
    Ok((failures.is_empty(), detail))
}

/// Root info sets' observable gap equals the whole-game gap.
fn root_consistency(class: DeviationClass, seeds: u64) -> Result<(bool, String), DeviationError> {
    for (name, game) in builtin_games() {
        for seed in 0..seeds {
            let play = random_play(&game, seed, 5);
            let stats = HindsightStats::from_play(&game, &play, StatsOptions { pure_pair_cap: 0 });
            for p in 0..game.num_players() {
                let roots = game.root_info_sets(p);
                if roots.len() != 1 {
                    continue;
                }
                let rep = osr_from_stats(&game, &stats, p, class)?;
                let at_root = rep.entries.iter().find(|e| e.info_set == roots[0]).unwrap().raw;
                let whole = stats.player(p).best(&game, class)?.class_max;
                if (at_root - whole).abs() > 1e-12 {
                    return Ok((false, format!("{name} seed {seed} player {}: root {at_root} vs whole {whole}", p + 1)));
                }
            }
        }
    }
    Ok((true, format!("root gap equals whole-game {class} gap on random plays")))
}

/// Zero observable counterfactual gaps force zero external gap: the whole-game
/// external gap never exceeds the summed per-info-set observable gaps.
fn observable_bounds_external(seeds: u64) -> Result<(bool, String), DeviationError> {
    let mut worst = f64::INFINITY;
    for (name, game) in builtin_games() {
        for seed in 0..seeds {
            let play = random_play(&game, seed, 5);
            let stats = HindsightStats::from_play(&game, &play, StatsOptions { pure_pair_cap: 0 });
            for p in 0..game.num_players() {
                let sum: f64 = osr_from_stats(&game, &stats, p, DeviationClass::BlindCf)?.entries.iter().map(|e| e.gap).sum();
                let ext = stats.player(p).best(&game, DeviationClass::External)?.value;
                let slack = sum - ext;
                worst = worst.min(slack);
                if slack < -GAP_TOLERANCE {
                    return Ok((false, format!("{name} seed {seed} player {}: external {ext} > summed observable {sum}", p + 1)));
                }
            }
        }
    }
    Ok((true, format!("external gap <= summed observable counterfactual gaps, worst slack {worst:.3e}")))
}

pub(crate) fn random_play(game: &Game, seed: u64, rounds: usize) -> EmpiricalPlay {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles = (0..rounds).map(|_| BehavioralProfile::random(game, &mut rng, 0.3)).collect();
    EmpiricalPlay::new(game, profiles).expect("random profiles are valid")
}

fn implied_cell(row: Concept, col: Concept) -> Result<CellResult, DeviationError> {
    use DeviationClass as D;
    let (pass, detail) = match (row, col) {
        (Concept::Ce, c) => {
            let classes = if c == Concept::Cce { vec![D::External] } else { vec![c.weakest(), c.strongest()] };
            covered_everywhere(D::Internal, &classes)?
        }
        (Concept::Ef, Concept::Cce) => covered_everywhere(D::InformedCausal, &[D::External])?,
        (Concept::OsCf, Concept::Cf) => {
            let (a, da) = covered_everywhere(D::InformedCf, &[D::BlindCf])?;
            let (b, db) = root_consistency(D::InformedCf, 20)?;
            let (c, dc) = root_consistency(D::BlindCf, 20)?;
            (a && b && c, format!("{da}; {db}; {dc}"))
        }
        (Concept::OsCf, Concept::Cce) => observable_bounds_external(20)?,
        _ => (false, "no check for this cell".into()),
    };
    Ok(CellResult { row, col, kind: CellKind::Implied, row_gap: None, col_gap: None, witness: None, detail, pass })
}

pub fn table1_check() -> Result<Table1Report, DeviationError> {
    let mut cells = Vec::new();
    for (ri, &row) in Concept::ALL.iter().enumerate() {
        for (ci, &col) in Concept::ALL.iter().enumerate() {
            let cell = match TABLE1[ri][ci] {
                CellKind::Same => CellResult {
                    row,
                    col,
                    kind: CellKind::Same,
                    row_gap: None,
                    col_gap: None,
                    witness: None,
                    detail: String::new(),
                    pass: true,
                },
                CellKind::Implied => implied_cell(row, col)?,
                CellKind::Refuted(l) => refuted_cell(row, col, l)?,
            };
            cells.push(cell);
        }
    }
    Ok(Table1Report { cells })
}
