//! Command-line front end: argument types, game loading and the four
//! subcommands, each returning its output text and an exit status.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hindsight::deviations::{DeviationClass, DeviationError, HindsightStats, StatsOptions, DEFAULT_ENUMERATION_CAP};
use hindsight::efg_core::Game;
use hindsight::fmt::g17;
use hindsight::game_library::{builtin, parse_efg, write_efg, BUILTIN_NAMES, DEFAULT_SHAPLEY_BONUS};
use hindsight::hindsight_eval::{gap_from_stats, table1_check, verify_appendix, ExampleGames};
use hindsight::learners::{run_selfplay_with, Cadence, LearnerMode, RecordConvention, TrainerConfig, UpdateMode, ValueMode};
use rayon::prelude::*;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const CSV_HEADER: &str = "t,player,deviation_class,gap,summed_gap";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Deviation(#[from] DeviationError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }
}

#[derive(Debug, Parser)]
#[command(name = "hindsight", version, about = "Hindsight rationality experiments on extensive-form games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run CFR self-play and write equilibrium gaps at each snapshot as CSV.
    Gap(GapArgs),
    /// Check the worked example deviation values.
    VerifyAppendix(AppendixArgs),
    /// Check the equilibrium relationship table.
    Table1(Table1Args),
    /// Write a game as an .efg file.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Built-in game name or path to an .efg file.
    #[arg(long)]
    pub game: String,
    /// Payoff bonus, used by extended_shapleys only.
    #[arg(long, default_value_t = DEFAULT_SHAPLEY_BONUS, allow_negative_numbers = true)]
    pub bonus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Simultaneous,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnerArg {
    External,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValuesArg {
    Counterfactual,
    #[value(name = "reach_weighted", alias = "reach-weighted")]
    ReachWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecordArg {
    #[value(name = "pre_update", alias = "pre-update")]
    PreUpdate,
    #[value(name = "last_evaluated", alias = "last-evaluated")]
    LastEvaluated,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Simultaneous)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = LearnerArg::External)]
    pub learner: LearnerArg,
    #[arg(long, value_enum, default_value_t = ValuesArg::Counterfactual)]
    pub values: ValuesArg,
    /// Comma-separated deviation classes; all classes when omitted.
    #[arg(long, value_delimiter = ',')]
    pub classes: Vec<DeviationClass>,
    /// Snapshot every this many rounds.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "log_cadence")]
    pub cadence: u64,
    /// Snapshots per power of ten instead of a fixed cadence.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub log_cadence: Option<u64>,
    /// Which alternating-round profile is recorded.
    #[arg(long, value_enum, default_value_t = RecordArg::PreUpdate)]
    pub record: RecordArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Several seeds, one CSV each; `--out` must then contain `{seed}`.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    pub seeds: Vec<u64>,
    /// Worker threads for `--seeds`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AppendixArgs {
    /// Print a JSON array instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Replace the extended battle of the sexes with this file.
    #[arg(long)]
    pub bos_efg: Option<PathBuf>,
    #[arg(long)]
    pub mp_efg: Option<PathBuf>,
    #[arg(long)]
    pub macqueen_efg: Option<PathBuf>,
    #[arg(long)]
    pub sequential_bos_efg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Text for standard output plus the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_efg(path: &Path) -> Result<Game, CliError> {
    parse_efg(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A built-in name, or else a path to an .efg file.
pub fn load_game(args: &GameArgs) -> Result<Game, CliError> {
    if !args.bonus.is_finite() {
        return Err(CliError::Usage(format!("bonus must be finite, got {}", args.bonus)));
    }
    if let Some(g) = builtin(&args.game, args.bonus) {
        return Ok(g);
    }
    let path = Path::new(&args.game);
    if path.is_file() {
        return load_efg(path);
    }
    Err(CliError::Usage(format!("unknown game '{}': expected one of {} or an .efg file", args.game, BUILTIN_NAMES.join(", "))))
}

pub fn trainer_config(args: &GapArgs, seed: u64) -> TrainerConfig {
    TrainerConfig {
        iterations: args.iters as usize,
        update: match args.mode {
            ModeArg::Simultaneous => UpdateMode::Simultaneous,
            ModeArg::Alternating => UpdateMode::Alternating,
        },
        learner: match args.learner {
            LearnerArg::External => LearnerMode::External,
            LearnerArg::Internal => LearnerMode::Internal,
        },
        values: match args.values {
            ValuesArg::Counterfactual => ValueMode::Counterfactual,
            ValuesArg::ReachWeighted => ValueMode::ReachWeighted,
        },
        seed,
        cadence: match args.log_cadence {
            Some(k) => Cadence::Log(k as usize),
            None => Cadence::Every(args.cadence as usize),
        },
        record: match args.record {
            RecordArg::PreUpdate => RecordConvention::PreUpdate,
            RecordArg::LastEvaluated => RecordConvention::LastEvaluated,
        },
    }
}

/// Runs self-play and renders the gap CSV.
pub fn gap_csv(game: &Game, config: TrainerConfig, classes: &[DeviationClass]) -> Result<String, CliError> {
    let mut classes = classes.to_vec();
    if classes.is_empty() {
        classes = DeviationClass::ALL.to_vec();
    }
    classes.sort_by_key(|c| c.name());
    classes.dedup();
    let needs_pure = classes.iter().any(|c| matches!(c, DeviationClass::Internal | DeviationClass::Swap));
    let options = StatsOptions { pure_pair_cap: if needs_pure { DEFAULT_ENUMERATION_CAP } else { 0 } };
    let mut stats = HindsightStats::new(game, options);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut failure = None;
    run_selfplay_with(game, config, |tr, profile, ev, snap| {
        stats.push_evaluated(game, profile, ev);
        if !snap || failure.is_some() {
            return;
        }
        match gap_from_stats(game, &stats, &classes) {
            Ok(report) => {
                let summed: BTreeMap<DeviationClass, f64> = classes.iter().map(|c| (*c, report.summed(*c))).collect();
                for p in 0..game.num_players() {
                    for c in &classes {
                        let e = report.get(p, *c).expect("requested class is reported");
                        out.push_str(&format!("{},{},{},{},{}\n", tr.rounds(), p + 1, c, g17(e.gap), g17(summed[c])));
                    }
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

fn emit(out: Option<&Path>, text: String) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome { stdout: String::new(), code: EXIT_OK })
        }
        None => Ok(Outcome { stdout: text, code: EXIT_OK }),
    }
}

pub fn cmd_gap(args: &GapArgs) -> Result<Outcome, CliError> {
    let game = load_game(&args.game)?;
    if args.seeds.len() <= 1 {
        let seed = args.seeds.first().copied().unwrap_or(args.seed);
        let csv = gap_csv(&game, trainer_config(args, seed), &args.classes)?;
        return emit(args.out.as_deref(), csv);
    }
    let template = args
        .out
        .as_ref()
        .and_then(|p| p.to_str())
        .filter(|p| p.contains("{seed}"))
        .ok_or_else(|| CliError::Usage("--seeds with several values needs --out containing {seed}".into()))?
        .to_string();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} jobs: {e}", args.jobs)))?;
    pool.install(|| {
        args.seeds.par_iter().try_for_each(|seed| {
            let csv = gap_csv(&game, trainer_config(args, *seed), &args.classes)?;
            write(Path::new(&template.replace("{seed}", &seed.to_string())), &csv)
        })
    })?;
    Ok(Outcome { stdout: String::new(), code: EXIT_OK })
}

pub fn cmd_verify_appendix(args: &AppendixArgs) -> Result<Outcome, CliError> {
    let mut games = ExampleGames::default();
    if let Some(p) = &args.bos_efg {
        games.extended_bos = load_efg(p)?;
    }
    if let Some(p) = &args.mp_efg {
        games.extended_mp = load_efg(p)?;
    }
    if let Some(p) = &args.macqueen_efg {
        games.macqueen = load_efg(p)?;
    }
    if let Some(p) = &args.sequential_bos_efg {
        games.sequential_bos = load_efg(p)?;
    }
    let checks = verify_appendix(&games)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let stdout = if args.json {
        let mut s = serde_json::to_string_pretty(&checks).expect("checks serialize");
        s.push('\n');
        s
    } else {
        let width = checks.iter().map(|c| c.check.chars().count()).max().unwrap_or(5).max(5);
        let mut s = format!("{:<width$}  {:>10}  {:>10}  result\n", "check", "expected", "computed");
        for c in &checks {
            let result = if c.pass { "ok" } else { "MISMATCH" };
            s.push_str(&format!("{:<width$}  {:>10.6}  {:>10.6}  {result}\n", c.check, c.expected, c.computed));
        }
        s.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
        s
    };
    Ok(Outcome { stdout, code: if failed == 0 { EXIT_OK } else { EXIT_VERIFY } })
}

pub fn cmd_table1(args: &Table1Args) -> Result<Outcome, CliError> {
    let report = table1_check()?;
    let mut stdout = if args.json {
        serde_json::to_string_pretty(&report.cells).expect("cells serialize")
    } else {
        let mut s = report.render();
        for c in &report.cells {
            if c.witness.is_some() || !c.pass {
                let w = c.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
                s.push_str(&format!("{}/{} {}: {} {w}\n", c.row.label(), c.col.label(), if c.pass { "ok" } else { "FAILED" }, c.detail));
            }
        }
        s
    };
    if !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    Ok(Outcome { stdout, code: if report.all_pass() { EXIT_OK } else { EXIT_VERIFY } })
}

pub fn cmd_export(args: &ExportArgs) -> Result<Outcome, CliError> {
    let game = load_game(&args.game)?;
    emit(args.out.as_deref(), write_efg(&game))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gap(a) => cmd_gap(a),
        Command::VerifyAppendix(a) => cmd_verify_appendix(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Export(a) => cmd_export(a),
    }
}
