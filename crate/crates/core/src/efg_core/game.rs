//! Game trees stored as a flat node arena in depth-first pre-order.
//!
//! Node 0 is the root and every child has a larger index than its parent, so
//! forward sweeps visit parents first and reverse sweeps visit children first.

use std::collections::HashMap;

use serde::Serialize;

use super::GameError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InfoSetId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Terminal { utilities: Vec<f64> },
    Chance { probs: Vec<f64> },
    Decision { player: usize, info_set: InfoSetId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Parent node and the action index leading here.
    pub parent: Option<(NodeId, usize)>,
    pub kind: NodeKind,
    pub actions: Vec<String>,
    pub children: Vec<NodeId>,
    pub depth: usize,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }

    pub fn player(&self) -> Option<usize> {
        match self.kind {
            NodeKind::Decision { player, .. } => Some(player),
            _ => None,
        }
    }

    pub fn info_set(&self) -> Option<InfoSetId> {
        match self.kind {
            NodeKind::Decision { info_set, .. } => Some(info_set),
            _ => None,
        }
    }

    pub fn utilities(&self) -> Option<&[f64]> {
        match &self.kind {
            NodeKind::Terminal { utilities } => Some(utilities),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoSet {
    pub id: InfoSetId,
    pub player: usize,
    /// Position within the owner's info sets; pure strategies are indexed this way.
    pub local_index: usize,
    /// Label supplied by the builder or file, unique per player.
    pub key: String,
    pub actions: Vec<String>,
    pub members: Vec<NodeId>,
    /// The owner's previous decision (info set, action) before reaching this set.
    pub parent: Option<(InfoSetId, usize)>,
    /// Own info sets reached next after each action.
    pub successors: Vec<Vec<InfoSetId>>,
    /// Number of own decisions strictly before this one.
    pub depth: usize,
    /// Longest chain of own decisions strictly after this one.
    pub height: usize,
}

impl InfoSet {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Recursive description used by the game builders; flattened into the arena.
#[derive(Debug, Clone)]
pub enum Tree {
    Terminal(Vec<f64>),
    Chance(Vec<(String, f64, Tree)>),
    Decision { player: usize, info_set: String, actions: Vec<(String, Tree)> },
}

impl Tree {
    pub fn terminal(utilities: &[f64]) -> Tree {
        Tree::Terminal(utilities.to_vec())
    }

    pub fn decision(player: usize, info_set: &str, actions: Vec<(&str, Tree)>) -> Tree {
        Tree::Decision {
            player,
            info_set: info_set.to_string(),
            actions: actions.into_iter().map(|(a, t)| (a.to_string(), t)).collect(),
        }
    }

    pub fn chance(branches: Vec<(&str, f64, Tree)>) -> Tree {
        Tree::Chance(branches.into_iter().map(|(a, p, t)| (a.to_string(), p, t)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawKind {
    Terminal(Vec<f64>),
    Chance(Vec<f64>),
    Decision { player: usize, info_set: String },
}

/// One node of a pre-order listing, as produced by parsers.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNode {
    pub parent: Option<(usize, usize)>,
    pub kind: RawKind,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    ActionMismatch { info_set: InfoSetId, node: NodeId },
    ImperfectRecall { info_set: InfoSetId, node: NodeId },
    ChanceNotNormalized { node: NodeId, sum: f64 },
    NegativeChance { node: NodeId, prob: f64 },
    NonFiniteUtility { node: NodeId },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ActionMismatch { info_set, node } => {
                write!(f, "node {} has an action list differing from info set {}", node.0, info_set.0)
            }
            Violation::ImperfectRecall { info_set, node } => write!(
                f,
                "perfect recall violated: node {} in info set {} has a different own history",
                node.0, info_set.0
            ),
            Violation::ChanceNotNormalized { node, sum } => {
                write!(f, "chance node {} probabilities sum to {sum}", node.0)
            }
            Violation::NegativeChance { node, prob } => {
                write!(f, "chance node {} has negative probability {prob}", node.0)
            }
            Violation::NonFiniteUtility { node } => write!(f, "terminal {} has a non-finite payoff", node.0),
        }
    }
}

pub const CHANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    title: String,
    player_names: Vec<String>,
    nodes: Vec<Node>,
    info_sets: Vec<InfoSet>,
    player_info_sets: Vec<Vec<InfoSetId>>,
    terminals: Vec<NodeId>,
    /// [player][node]: the player's last decision strictly above the node.
    last_own: Vec<Vec<Option<(InfoSetId, usize)>>>,
    /// Terminals lying below some member of each info set.
    subtree_terminals: Vec<Vec<NodeId>>,
}

impl Game {
    pub fn from_tree(title: &str, player_names: &[&str], tree: &Tree) -> Result<Game, GameError> {
        let mut raw = Vec::new();
        let mut stack: Vec<(&Tree, Option<(usize, usize)>)> = vec![(tree, None)];
        while let Some((t, parent)) = stack.pop() {
            let id = raw.len();
            let (kind, actions, children): (RawKind, Vec<String>, Vec<&Tree>) = match t {
                Tree::Terminal(u) => (RawKind::Terminal(u.clone()), vec![], vec![]),
                Tree::Chance(b) => (
                    RawKind::Chance(b.iter().map(|x| x.1).collect()),
                    b.iter().map(|x| x.0.clone()).collect(),
                    b.iter().map(|x| &x.2).collect(),
                ),
                Tree::Decision { player, info_set, actions } => (
                    RawKind::Decision { player: *player, info_set: info_set.clone() },
                    actions.iter().map(|x| x.0.clone()).collect(),
                    actions.iter().map(|x| &x.1).collect(),
                ),
            };
            for (a, c) in children.into_iter().enumerate().rev() {
                stack.push((c, Some((id, a))));
            }
            raw.push(RawNode { parent, kind, actions });
        }
        let names: Vec<String> = player_names.iter().map(|s| s.to_string()).collect();
        Game::from_raw(title, names, raw)
    }

    /// Builds a game from a pre-order node listing. Structural problems are
    /// errors; semantic ones (recall, chance normalization) are left to `validate`.
    pub fn from_raw(title: &str, player_names: Vec<String>, raw: Vec<RawNode>) -> Result<Game, GameError> {
        if raw.is_empty() {
            return Err(GameError::Structure("game has no nodes".into()));
        }
        let n_players = player_names.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
        let mut keys: HashMap<(usize, String), InfoSetId> = HashMap::new();
        let mut info_sets: Vec<InfoSet> = Vec::new();
        let mut player_info_sets: Vec<Vec<InfoSetId>> = vec![Vec::new(); n_players];
        let mut terminals = Vec::new();

        for (idx, r) in raw.into_iter().enumerate() {
            let depth = match r.parent {
                None if idx == 0 => 0,
                None => return Err(GameError::Structure(format!("node {idx} has no parent"))),
                Some((p, a)) => {
                    if p >= idx {
                        return Err(GameError::Structure(format!("node {idx} is not in pre-order")));
                    }
                    let parent = &mut nodes[p];
                    if parent.children.len() != a || a >= parent.actions.len() {
                        return Err(GameError::Structure(format!(
                            "node {idx} is attached to action {a} of node {p} out of order"
                        )));
                    }
                    parent.children.push(NodeId(idx));
                    parent.depth + 1
                }
            };
            if idx == 0 && r.parent.is_some() {
                return Err(GameError::Structure("root has a parent".into()));
            }
            let kind = match r.kind {
                RawKind::Terminal(u) => {
                    if u.len() != n_players {
                        return Err(GameError::PayoffArity { node: idx, expected: n_players, found: u.len() });
                    }
                    if !r.actions.is_empty() {
                        return Err(GameError::Structure(format!("terminal {idx} has actions")));
                    }
                    terminals.push(NodeId(idx));
                    NodeKind::Terminal { utilities: u }
                }
                RawKind::Chance(p) => {
                    if p.len() != r.actions.len() || p.is_empty() {
                        return Err(GameError::Structure(format!(
                            "chance node {idx} has {} actions and {} probabilities",
                            r.actions.len(),
                            p.len()
                        )));
                    }
                    NodeKind::Chance { probs: p }
                }
                RawKind::Decision { player, info_set } => {
                    if player >= n_players {
                        return Err(GameError::Structure(format!("node {idx} names unknown player {player}")));
                    }
                    if r.actions.is_empty() {
                        return Err(GameError::Structure(format!("decision node {idx} has no actions")));
                    }
                    let next = InfoSetId(info_sets.len());
                    let id = *keys.entry((player, info_set.clone())).or_insert(next);
                    if id == next {
                        let local_index = player_info_sets[player].len();
                        player_info_sets[player].push(id);
                        info_sets.push(InfoSet {
                            id,
                            player,
                            local_index,
                            key: info_set,
                            actions: r.actions.clone(),
                            members: vec![],
                            parent: None,
                            successors: vec![],
                            depth: 0,
                            height: 0,
                        });
                    }
                    info_sets[id.0].members.push(NodeId(idx));
                    NodeKind::Decision { player, info_set: id }
                }
            };
            nodes.push(Node { parent: r.parent.map(|(p, a)| (NodeId(p), a)), kind, actions: r.actions, children: vec![], depth });
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.children.len() != n.actions.len() {
                return Err(GameError::Structure(format!(
                    "node {i} has {} actions but {} children",
                    n.actions.len(),
                    n.children.len()
                )));
            }
        }

        let mut last_own = vec![vec![None; nodes.len()]; n_players];
        for idx in 1..nodes.len() {
            let (p, a) = nodes[idx].parent.unwrap();
            for (pl, row) in last_own.iter_mut().enumerate() {
                row[idx] = match nodes[p.0].kind {
                    NodeKind::Decision { player, info_set } if player == pl => Some((info_set, a)),
                    _ => row[p.0],
                };
            }
        }

        for k in 0..info_sets.len() {
            let first = info_sets[k].members[0];
            let player = info_sets[k].player;
            let parent = last_own[player][first.0];
            info_sets[k].parent = parent;
            info_sets[k].successors = vec![Vec::new(); info_sets[k].actions.len()];
            if let Some((pi, _)) = parent {
                info_sets[k].depth = info_sets[pi.0].depth + 1;
            }
        }
        for k in 0..info_sets.len() {
            if let Some((pi, a)) = info_sets[k].parent {
                if let Some(slot) = info_sets[pi.0].successors.get_mut(a) {
                    slot.push(InfoSetId(k));
                }
            }
        }
        for k in (0..info_sets.len()).rev() {
            let h = info_sets[k]
                .successors
                .iter()
                .flatten()
                .map(|s| info_sets[s.0].height + 1)
                .max()
                .unwrap_or(0);
            info_sets[k].height = h;
        }

        let mut subtree_terminals = vec![Vec::new(); info_sets.len()];
        for &z in &terminals {
            for row in &last_own {
                let mut cur = row[z.0];
                let mut guard = 0;
                while let Some((i, _)) = cur {
                    subtree_terminals[i.0].push(z);
                    cur = info_sets[i.0].parent;
                    guard += 1;
                    if guard > info_sets.len() {
                        break;
                    }
                }
            }
        }

        Ok(Game {
            title: title.to_string(),
            player_names,
            nodes,
            info_sets,
            player_info_sets,
            terminals,
            last_own,
            subtree_terminals,
        })
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn player_names(&self) -> &[String] {
        &self.player_names
    }

    pub fn num_players(&self) -> usize {
        self.player_names.len()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn info_sets(&self) -> &[InfoSet] {
        &self.info_sets
    }

    pub fn info_set(&self, id: InfoSetId) -> &InfoSet {
        &self.info_sets[id.0]
    }

    pub fn player_info_sets(&self, player: usize) -> &[InfoSetId] {
        &self.player_info_sets[player]
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    /// The player's last decision strictly above `node`.
    pub fn last_own(&self, player: usize, node: NodeId) -> Option<(InfoSetId, usize)> {
        self.last_own[player][node.0]
    }

    /// Terminals below some member of the info set.
    pub fn subtree_terminals(&self, id: InfoSetId) -> &[NodeId] {
        &self.subtree_terminals[id.0]
    }

    /// Own (info set, action) decisions leading to `node`, root first.
    pub fn own_history(&self, player: usize, node: NodeId) -> Vec<(InfoSetId, usize)> {
        let mut out = Vec::new();
        let mut cur = self.last_own(player, node);
        while let Some((i, a)) = cur {
            out.push((i, a));
            cur = self.info_set(i).parent;
        }
        out.reverse();
        out
    }

    /// The chain of (info set, action) pairs that leads the owner into `id`.
    pub fn path_to(&self, id: InfoSetId) -> Vec<(InfoSetId, usize)> {
        let mut out = Vec::new();
        let mut cur = self.info_set(id).parent;
        while let Some((i, a)) = cur {
            out.push((i, a));
            cur = self.info_set(i).parent;
        }
        out.reverse();
        out
    }

    /// True if `descendant` equals `ancestor` or follows it in the owner's forest.
    pub fn is_at_or_below(&self, ancestor: InfoSetId, descendant: InfoSetId) -> bool {
        let mut cur = Some(descendant);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.info_set(c).parent.map(|p| p.0);
        }
        false
    }

    /// `id` and every info set after it in the owner's forest, ascending.
    pub fn own_subtree(&self, id: InfoSetId) -> Vec<InfoSetId> {
        let mut out = vec![id];
        let mut k = 0;
        while k < out.len() {
            let cur = out[k];
            for s in self.info_set(cur).successors.iter().flatten() {
                out.push(*s);
            }
            k += 1;
        }
        out.sort();
        out
    }

    /// Info sets of `player` with no earlier own decision.
    pub fn root_info_sets(&self, player: usize) -> Vec<InfoSetId> {
        self.player_info_sets(player).iter().copied().filter(|i| self.info_set(*i).parent.is_none()).collect()
    }

    pub fn utility_bound(&self) -> f64 {
        self.terminals
            .iter()
            .flat_map(|z| self.node(*z).utilities().unwrap().iter())
            .fold(0.0, |m: f64, u| m.max(u.abs()))
    }

    pub fn find_info_set(&self, player: usize, key: &str) -> Option<InfoSetId> {
        self.player_info_sets(player).iter().copied().find(|i| self.info_set(*i).key == key)
    }

    pub fn action_index(&self, id: InfoSetId, label: &str) -> Option<usize> {
        self.info_set(id).actions.iter().position(|a| a == label)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for is in &self.info_sets {
            let reference = self.full_history(is.members[0]);
            for &m in &is.members {
                if self.node(m).actions != is.actions {
                    out.push(Violation::ActionMismatch { info_set: is.id, node: m });
                }
                if m != is.members[0] && self.full_history(m) != reference {
                    out.push(Violation::ImperfectRecall { info_set: is.id, node: m });
                }
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            match &n.kind {
                NodeKind::Chance { probs } => {
                    for &p in probs {
                        if !(p >= 0.0) {
                            out.push(Violation::NegativeChance { node: NodeId(i), prob: p });
                        }
                    }
                    let sum: f64 = probs.iter().sum();
                    if !((sum - 1.0).abs() <= CHANCE_TOLERANCE) {
                        out.push(Violation::ChanceNotNormalized { node: NodeId(i), sum });
                    }
                }
                NodeKind::Terminal { utilities } => {
                    if utilities.iter().any(|u| !u.is_finite()) {
                        out.push(Violation::NonFiniteUtility { node: NodeId(i) });
                    }
                }
                NodeKind::Decision { .. } => {}
            }
        }
        out
    }

    /// Own decisions above a node read directly off the node path, used to
    /// check recall without trusting the derived info-set forest.
    fn full_history(&self, node: NodeId) -> Vec<(InfoSetId, String)> {
        let player = self.node(node).player().unwrap();
        let mut out = Vec::new();
        let mut cur = self.node(node).parent;
        while let Some((p, a)) = cur {
            if let NodeKind::Decision { player: q, info_set } = self.node(p).kind {
                if q == player {
                    out.push((info_set, self.node(p).actions[a].clone()));
                }
            }
            cur = self.node(p).parent;
        }
        out.reverse();
        out
    }

    /// Same shape, labels, players, info-set partition and payoffs.
    pub fn isomorphic(&self, other: &Game) -> bool {
        if self.num_players() != other.num_players() || self.nodes.len() != other.nodes.len() {
            return false;
        }
        let mut map: HashMap<InfoSetId, InfoSetId> = HashMap::new();
        for (a, b) in self.nodes.iter().zip(&other.nodes) {
            if a.parent.map(|p| (p.0 .0, p.1)) != b.parent.map(|p| (p.0 .0, p.1)) || a.actions != b.actions {
                return false;
            }
            match (&a.kind, &b.kind) {
                (NodeKind::Terminal { utilities: x }, NodeKind::Terminal { utilities: y }) if x == y => {}
                (NodeKind::Chance { probs: x }, NodeKind::Chance { probs: y }) if x == y => {}
                (
                    NodeKind::Decision { player: p, info_set: i },
                    NodeKind::Decision { player: q, info_set: j },
                ) if p == q => {
                    if *map.entry(*i).or_insert(*j) != *j {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        let mut seen: HashMap<InfoSetId, InfoSetId> = HashMap::new();
        map.iter().all(|(i, j)| *seen.entry(*j).or_insert(*i) == *i)
    }
}
