//! Reach probabilities, expected utilities and counterfactual values.

use super::game::{Game, InfoSetId, NodeId, NodeKind};
use super::profile::BehavioralProfile;
use super::GameError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// Only the given player's actions.
    Player(usize),
    /// Everyone else, chance included.
    Others(usize),
    All,
}

impl Selector {
    fn includes(&self, actor: Option<usize>) -> bool {
        match (*self, actor) {
            (Selector::All, _) => true,
            (Selector::Player(i), Some(p)) => i == p,
            (Selector::Player(_), None) => false,
            (Selector::Others(i), Some(p)) => i != p,
            (Selector::Others(_), None) => true,
        }
    }
}

fn step_prob(game: &Game, profile: &BehavioralProfile, parent: NodeId, action: usize) -> (Option<usize>, f64) {
    match &game.node(parent).kind {
        NodeKind::Chance { probs } => (None, probs[action]),
        NodeKind::Decision { player, info_set } => (Some(*player), profile.prob(*info_set, action)),
        NodeKind::Terminal { .. } => unreachable!("terminal nodes have no children"),
    }
}

/// Probability that the selected actors move the game from `from` to `to`;
/// zero when `from` is not a prefix of `to`.
pub fn reach_prob(
    game: &Game,
    profile: &BehavioralProfile,
    selector: Selector,
    from: NodeId,
    to: NodeId,
) -> Result<f64, GameError> {
    if from.0 >= game.num_nodes() || to.0 >= game.num_nodes() {
        return Err(GameError::UnknownNode(from.0.max(to.0)));
    }
    let mut p = 1.0;
    let mut cur = to;
    while cur != from {
        match game.node(cur).parent {
            None => return Ok(0.0),
            Some((parent, a)) => {
                let (actor, q) = step_prob(game, profile, parent, a);
                if selector.includes(actor) {
                    p *= q;
                }
                cur = parent;
            }
        }
    }
    Ok(p)
}

/// Per-node reaches and values for a whole profile, computed in two sweeps.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// [player][node]: product of that player's action probabilities on the path.
    pub own_reach: Vec<Vec<f64>>,
    /// [node]: product of chance probabilities on the path.
    pub chance_reach: Vec<f64>,
    /// [player][node]: expected utility of play continuing from the node.
    pub values: Vec<Vec<f64>>,
}

impl Evaluation {
    pub fn new(game: &Game, profile: &BehavioralProfile) -> Self {
        let n = game.num_nodes();
        let np = game.num_players();
        let mut own_reach = vec![vec![1.0; n]; np];
        let mut chance_reach = vec![1.0; n];
        for idx in 1..n {
            let (p, a) = game.node(NodeId(idx)).parent.unwrap();
            let (actor, q) = step_prob(game, profile, p, a);
            chance_reach[idx] = chance_reach[p.0] * if actor.is_none() { q } else { 1.0 };
            for (pl, r) in own_reach.iter_mut().enumerate() {
                r[idx] = r[p.0] * if actor == Some(pl) { q } else { 1.0 };
            }
        }
        let mut values = vec![vec![0.0; n]; np];
        for idx in (0..n).rev() {
            let node = game.node(NodeId(idx));
            match &node.kind {
                NodeKind::Terminal { utilities } => {
                    for pl in 0..np {
                        values[pl][idx] = utilities[pl];
                    }
                }
                NodeKind::Chance { probs } => {
                    for pl in 0..np {
                        values[pl][idx] = node.children.iter().zip(probs).map(|(c, q)| q * values[pl][c.0]).sum();
                    }
                }
                NodeKind::Decision { info_set, .. } => {
                    let probs = profile.get(*info_set);
                    for pl in 0..np {
                        values[pl][idx] = node.children.iter().zip(probs).map(|(c, q)| q * values[pl][c.0]).sum();
                    }
                }
            }
        }
        Evaluation { own_reach, chance_reach, values }
    }

    /// Reach probability contributed by everyone but `player`, chance included.
    pub fn others_reach(&self, player: usize, node: NodeId) -> f64 {
        let mut p = self.chance_reach[node.0];
        for (pl, r) in self.own_reach.iter().enumerate() {
            if pl != player {
                p *= r[node.0];
            }
        }
        p
    }

    pub fn reach(&self, node: NodeId) -> f64 {
        self.own_reach.iter().fold(self.chance_reach[node.0], |p, r| p * r[node.0])
    }

    pub fn expected_utilities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v[0]).collect()
    }

    /// Counterfactual value of every action at an info set, for its owner.
    pub fn action_values(&self, game: &Game, id: InfoSetId) -> Vec<f64> {
        let is = game.info_set(id);
        let mut out = vec![0.0; is.num_actions()];
        for &h in &is.members {
            let w = self.others_reach(is.player, h);
            if w == 0.0 {
                continue;
            }
            for (a, c) in game.node(h).children.iter().enumerate() {
                out[a] += w * self.values[is.player][c.0];
            }
        }
        out
    }

    /// The owner's reach probability of an info set (shared by all members).
    pub fn own_reach_of(&self, game: &Game, id: InfoSetId) -> f64 {
        let is = game.info_set(id);
        self.own_reach[is.player][is.members[0].0]
    }
}

pub fn expected_utility(game: &Game, profile: &BehavioralProfile) -> Vec<f64> {
    Evaluation::new(game, profile).expected_utilities()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CfvTarget {
    Action(usize),
    Immediate(Vec<f64>),
    Current,
}

/// Counterfactual value at an info set for its owner: others' reach of each
/// member times the value of continuing.
pub fn counterfactual_value(
    game: &Game,
    profile: &BehavioralProfile,
    id: InfoSetId,
    target: &CfvTarget,
) -> Result<f64, GameError> {
    if id.0 >= game.info_sets().len() {
        return Err(GameError::UnknownInfoSet(id.0));
    }
    let n = game.info_set(id).num_actions();
    let values = Evaluation::new(game, profile).action_values(game, id);
    let sigma: Vec<f64> = match target {
        CfvTarget::Action(a) => {
            if *a >= n {
                return Err(GameError::Profile(format!("action {a} out of range")));
            }
            let mut v = vec![0.0; n];
            v[*a] = 1.0;
            v
        }
        CfvTarget::Immediate(s) => {
            if s.len() != n {
                return Err(GameError::Profile(format!("immediate strategy has {} entries", s.len())));
            }
            s.clone()
        }
        CfvTarget::Current => profile.get(id).to_vec(),
    };
    Ok(values.iter().zip(&sigma).map(|(v, s)| v * s).sum())
}

/// Expected payoff collected after taking `action` at `id` before the owner
/// acts again, weighted by the others' reach.
pub fn immediate_reward(game: &Game, profile: &BehavioralProfile, id: InfoSetId, action: usize) -> Result<f64, GameError> {
    if id.0 >= game.info_sets().len() {
        return Err(GameError::UnknownInfoSet(id.0));
    }
    let ev = Evaluation::new(game, profile);
    Ok(immediate_reward_from(game, &ev, id, action))
}

pub fn immediate_reward_from(game: &Game, ev: &Evaluation, id: InfoSetId, action: usize) -> f64 {
    let player = game.info_set(id).player;
    game.subtree_terminals(id)
        .iter()
        .filter(|z| game.last_own(player, **z) == Some((id, action)))
        .map(|z| ev.others_reach(player, *z) * game.node(*z).utilities().unwrap()[player])
        .sum()
}

/// |v_I(a) - r(I,a) - sum of next own info-set values|.
pub fn bellman_residual(game: &Game, profile: &BehavioralProfile, id: InfoSetId, action: usize) -> Result<f64, GameError> {
    if id.0 >= game.info_sets().len() {
        return Err(GameError::UnknownInfoSet(id.0));
    }
    let ev = Evaluation::new(game, profile);
    let q = ev.action_values(game, id)[action];
    let r = immediate_reward_from(game, &ev, id, action);
    let next: f64 = game.info_set(id).successors[action]
        .iter()
        .map(|j| {
            let v = ev.action_values(game, *j);
            v.iter().zip(profile.get(*j)).map(|(x, p)| x * p).sum::<f64>()
        })
        .sum();
    Ok((q - r - next).abs())
}
