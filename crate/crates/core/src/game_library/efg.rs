//! Reader and writer for the Gambit `.efg` outcome-per-terminal subset.
//!
//! Accepted layout: a header `EFG 2 R "title" { "p1" "p2" ... }` with an
//! optional comment string, then one node per `c`, `p` or `t` record in
//! depth-first pre-order. Action lists may be omitted on repeat visits to an
//! info set. Terminal records must carry their own payoff list.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::efg_core::{Game, GameError, NodeKind, RawKind, RawNode, CHANCE_TOLERANCE};
use crate::fmt::g17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EfgError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: terminal has {found} payoffs for {expected} players")]
    PayoffArity { line: usize, expected: usize, found: usize },
    #[error("line {line}: chance probabilities sum to {sum}, not 1")]
    ChanceNormalization { line: usize, sum: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Str(String),
    Word(String),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, EfgError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() || c == ',' => {}
            '{' => out.push((Tok::Open, line)),
            '}' => out.push((Tok::Close, line)),
            '"' => {
                let start = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(EfgError::Syntax { line: start, message: "unterminated string".into() }),
                        Some('\\') => match chars.next() {
                            Some(e) => s.push(e),
                            None => return Err(EfgError::Syntax { line, message: "dangling escape".into() }),
                        },
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch)
                        }
                    }
                }
                out.push((Tok::Str(s), start));
            }
            _ => {
                let mut w = c.to_string();
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || matches!(n, '{' | '}' | '"' | ',') {
                        break;
                    }
                    w.push(n);
                    chars.next();
                }
                out.push((Tok::Word(w), line));
            }
        }
    }
    Ok(out)
}

fn parse_number(w: &str) -> Option<f64> {
    match w.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.parse::<f64>().ok()?, b.parse::<f64>().ok()?);
            (b != 0.0).then(|| a / b)
        }
        None => w.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Cursor {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map(|t| t.1).unwrap_or(1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, EfgError> {
        Err(EfgError::Syntax { line: self.line(), message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<String, EfgError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, EfgError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected quoted {what}")),
        }
    }

    fn integer(&mut self, what: &str) -> Result<usize, EfgError> {
        let line = self.line();
        let w = self.word(what)?;
        w.parse().map_err(|_| EfgError::Syntax { line, message: format!("expected integer {what}, found {w}") })
    }

    fn number(&mut self, what: &str) -> Result<f64, EfgError> {
        let line = self.line();
        let w = self.word(what)?;
        parse_number(&w).ok_or(EfgError::Syntax { line, message: format!("expected number {what}, found {w}") })
    }

    fn optional_string(&mut self) -> Option<String> {
        if let Some(Tok::Str(s)) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            Some(s)
        } else {
            None
        }
    }

    fn expect_open(&mut self) -> Result<(), EfgError> {
        match self.next() {
            Some(Tok::Open) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected '{'")
            }
        }
    }

    /// Trailing outcome number on decision and chance records.
    fn outcome_field(&mut self) -> Result<(), EfgError> {
        if let Some(Tok::Word(w)) = self.peek() {
            if let Ok(k) = w.parse::<usize>() {
                if k != 0 {
                    return self.err("outcomes on non-terminal nodes are not supported");
                }
                self.pos += 1;
            }
        }
        Ok(())
    }
}

pub fn parse_efg(text: &str) -> Result<Game, EfgError> {
    let mut c = Cursor { toks: tokenize(text)?, pos: 0 };
    for expected in ["EFG", "2", "R"] {
        let w = c.word(expected)?;
        if w != expected {
            return c.err(format!("expected {expected}, found {w}"));
        }
    }
    let title = c.string("title")?;
    c.expect_open()?;
    let mut players = Vec::new();
    loop {
        match c.next() {
            Some(Tok::Str(s)) => players.push(s),
            Some(Tok::Close) => break,
            _ => return c.err("expected player name or '}'"),
        }
    }
    c.optional_string();

    let np = players.len();
    let mut raw: Vec<RawNode> = Vec::new();
    // (node index, next action to attach)
    let mut open: Vec<(usize, usize)> = Vec::new();
    let mut decision_actions: HashMap<(usize, usize), Vec<String>> = HashMap::new();
    let mut set_keys: HashMap<(usize, usize), String> = HashMap::new();
    let mut used_keys: HashSet<(usize, String)> = HashSet::new();
    let mut chance_actions: HashMap<usize, (Vec<String>, Vec<f64>)> = HashMap::new();

    while let Some(tok) = c.peek().cloned() {
        let line = c.line();
        let kind = match tok {
            Tok::Word(w) if w == "c" || w == "p" || w == "t" => w,
            _ => return c.err("expected node record c, p or t"),
        };
        if raw.len() > 0 && open.is_empty() {
            return c.err("node after the tree is complete");
        }
        c.pos += 1;
        c.string("node name")?;
        let (rk, actions) = match kind.as_str() {
            "t" => {
                c.integer("outcome number")?;
                c.optional_string();
                if c.peek() != Some(&Tok::Open) {
                    return c.err("terminal without a payoff list (outcome reuse is not supported)");
                }
                c.pos += 1;
                let mut pay = Vec::new();
                while c.peek() != Some(&Tok::Close) {
                    if c.peek().is_none() {
                        return c.err("unterminated payoff list");
                    }
                    pay.push(c.number("payoff")?);
                }
                c.pos += 1;
                if pay.len() != np {
                    return Err(EfgError::PayoffArity { line, expected: np, found: pay.len() });
                }
                (RawKind::Terminal(pay), vec![])
            }
            "p" => {
                let player = c.integer("player number")?;
                if player == 0 || player > np {
                    return Err(EfgError::Syntax { line, message: format!("player {player} not declared") });
                }
                let set = c.integer("info set number")?;
                let name = c.optional_string().unwrap_or_default();
                let key = set_keys
                    .entry((player, set))
                    .or_insert_with(|| {
                        let k = if name.is_empty() || used_keys.contains(&(player, name.clone())) { format!("#{set}") } else { name };
                        used_keys.insert((player, k.clone()));
                        k
                    })
                    .clone();
                let actions = if c.peek() == Some(&Tok::Open) {
                    c.pos += 1;
                    let mut a = Vec::new();
                    while c.peek() != Some(&Tok::Close) {
                        a.push(c.string("action label")?);
                    }
                    c.pos += 1;
                    if let Some(prev) = decision_actions.get(&(player, set)) {
                        if *prev != a {
                            return Err(EfgError::Syntax { line, message: format!("info set {set} redeclared with different actions") });
                        }
                    }
                    decision_actions.insert((player, set), a.clone());
                    a
                } else {
                    match decision_actions.get(&(player, set)) {
                        Some(a) => a.clone(),
                        None => return Err(EfgError::Syntax { line, message: format!("info set {set} used before its actions are declared") }),
                    }
                };
                c.outcome_field()?;
                (RawKind::Decision { player: player - 1, info_set: key }, actions)
            }
            _ => {
                let set = c.integer("chance info set number")?;
                c.optional_string();
                let (actions, probs) = if c.peek() == Some(&Tok::Open) {
                    c.pos += 1;
                    let (mut a, mut p) = (Vec::new(), Vec::new());
                    while c.peek() != Some(&Tok::Close) {
                        a.push(c.string("chance action label")?);
                        p.push(c.number("probability")?);
                    }
                    c.pos += 1;
                    chance_actions.insert(set, (a.clone(), p.clone()));
                    (a, p)
                } else {
                    match chance_actions.get(&set) {
                        Some(x) => x.clone(),
                        None => return Err(EfgError::Syntax { line, message: format!("chance set {set} used before declaration") }),
                    }
                };
                if probs.iter().any(|p| *p < 0.0) {
                    return Err(EfgError::Syntax { line, message: "negative chance probability".into() });
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > CHANCE_TOLERANCE {
                    return Err(EfgError::ChanceNormalization { line, sum });
                }
                c.outcome_field()?;
                (RawKind::Chance(probs), actions)
            }
        };
        if matches!(rk, RawKind::Decision { .. } | RawKind::Chance(_)) && actions.is_empty() {
            return Err(EfgError::Syntax { line, message: "node without actions".into() });
        }
        let parent = match open.last_mut() {
            Some((p, a)) => {
                let out = (*p, *a);
                *a += 1;
                Some(out)
            }
            None => None,
        };
        while let Some(&(p, a)) = open.last() {
            if a == raw[p].actions.len() {
                open.pop();
            } else {
                break;
            }
        }
        let id = raw.len();
        let arity = actions.len();
        raw.push(RawNode { parent, kind: rk, actions });
        if arity > 0 {
            open.push((id, 0));
        }
    }
    if raw.is_empty() {
        return c.err("no nodes");
    }
    if !open.is_empty() {
        return c.err("tree ends before every action has a subtree");
    }
    let game = Game::from_raw(&title, players, raw)?;
    crate::efg_core::validate(&game)?;
    Ok(game)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Serializes a game; info sets are numbered per player in pre-order.
pub fn write_efg(game: &Game) -> String {
    let mut out = String::new();
    let names: Vec<String> = game.player_names().iter().map(|n| quote(n)).collect();
    out.push_str(&format!("EFG 2 R {} {{ {} }}\n", quote(game.title()), names.join(" ")));
    let (mut chance_no, mut outcome_no) = (0, 0);
    for node in game.nodes() {
        match &node.kind {
            NodeKind::Terminal { utilities } => {
                outcome_no += 1;
                let pay: Vec<String> = utilities.iter().map(|u| g17(*u)).collect();
                out.push_str(&format!("t \"\" {} \"\" {{ {} }}\n", outcome_no, pay.join(", ")));
            }
            NodeKind::Chance { probs } => {
                chance_no += 1;
                let branches: Vec<String> =
                    node.actions.iter().zip(probs).map(|(a, p)| format!("{} {}", quote(a), g17(*p))).collect();
                out.push_str(&format!("c \"\" {} \"\" {{ {} }} 0\n", chance_no, branches.join(" ")));
            }
            NodeKind::Decision { player, info_set } => {
                let is = game.info_set(*info_set);
                let actions: Vec<String> = node.actions.iter().map(|a| quote(a)).collect();
                out.push_str(&format!(
                    "p \"\" {} {} {} {{ {} }} 0\n",
                    player + 1,
                    is.local_index + 1,
                    quote(&is.key),
                    actions.join(" ")
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_library::{builtin_games, extended_shapleys};

    #[test]
    fn builtins_round_trip() {
        for (name, g) in builtin_games() {
            let text = write_efg(&g);
            let back = parse_efg(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(g.isomorphic(&back), "{name}");
            assert_eq!(write_efg(&back), text);
        }
    }

    #[test]
    fn shapley_payoffs_survive() {
        let g = parse_efg(&write_efg(&extended_shapleys(0.003))).unwrap();
        let pays: Vec<f64> = g.terminals().iter().map(|z| g.node(*z).utilities().unwrap()[0]).collect();
        assert_eq!(g.terminals().len(), 18);
        assert!(pays.contains(&(-1.0 + 0.003)));
    }

    #[test]
    fn terminal_only_game() {
        let g = parse_efg("EFG 2 R \"solo\" { \"A\" }\nt \"\" 1 \"\" { 4 }\n").unwrap();
        assert_eq!(g.num_nodes(), 1);
        assert_eq!(write_efg(&g), "EFG 2 R \"solo\" { \"A\" }\nt \"\" 1 \"\" { 4 }\n");
    }

    #[test]
    fn gambit_style_with_comment_and_omitted_actions() {
        let text = r#"EFG 2 R "mp" { "A" "B" }
"a comment"

p "" 1 1 "" { "H" "T" } 0
p "" 2 1 "" { "H" "T" } 0
t "" 1 "HH" { 1, -1 }
t "" 2 "HT" { -1, 1 }
p "" 2 1 0
t "" 3 "" { -1 1 }
t "" 4 "" { 1/1 -1 }
"#;
        let g = parse_efg(text).unwrap();
        assert_eq!(g.terminals().len(), 4);
        assert_eq!(g.player_info_sets(1).len(), 1);
        assert_eq!(g.info_set(g.player_info_sets(1)[0]).members.len(), 2);
    }

    #[test]
    fn reports_line_of_syntax_error() {
        let text = "EFG 2 R \"x\" { \"A\" }\np \"\" 1 1 \"\" { \"a\" \"b\" } 0\nt \"\" 1 \"\" { 1 }\nq\n";
        match parse_efg(text) {
            Err(EfgError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_payoff_arity() {
        let text = "EFG 2 R \"x\" { \"A\" \"B\" }\nt \"\" 1 \"\" { 1 }\n";
        assert_eq!(parse_efg(text), Err(EfgError::PayoffArity { line: 2, expected: 2, found: 1 }));
    }

    #[test]
    fn reports_chance_normalization() {
        let text = "EFG 2 R \"x\" { \"A\" }\nc \"\" 1 \"\" { \"a\" 0.5 \"b\" 0.4 } 0\nt \"\" 1 \"\" { 1 }\nt \"\" 2 \"\" { 0 }\n";
        assert!(matches!(parse_efg(text), Err(EfgError::ChanceNormalization { line: 2, .. })));
    }

    #[test]
    fn reports_imperfect_recall() {
        let text = "EFG 2 R \"x\" { \"A\" }\np \"\" 1 1 \"\" { \"a\" \"b\" } 0\np \"\" 1 2 \"\" { \"c\" \"d\" } 0\nt \"\" 1 \"\" { 1 }\nt \"\" 2 \"\" { 0 }\np \"\" 1 2 0\nt \"\" 3 \"\" { 0 }\nt \"\" 4 \"\" { 1 }\n";
        assert!(matches!(parse_efg(text), Err(EfgError::Game(GameError::Invalid(_)))));
    }

    #[test]
    fn truncated_tree_is_rejected() {
        let text = "EFG 2 R \"x\" { \"A\" }\np \"\" 1 1 \"\" { \"a\" \"b\" } 0\nt \"\" 1 \"\" { 1 }\n";
        assert!(matches!(parse_efg(text), Err(EfgError::Syntax { .. })));
    }
}
