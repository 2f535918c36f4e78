use crate::efg_core::{BehavioralProfile, Game, GameError};

/// Uniform mixture over rounds of product distributions, one profile per round.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPlay {
    profiles: Vec<BehavioralProfile>,
}

impl EmpiricalPlay {
    pub fn new(game: &Game, profiles: Vec<BehavioralProfile>) -> Result<Self, GameError> {
        if profiles.is_empty() {
            return Err(GameError::Profile("empirical play needs at least one round".into()));
        }
        for p in &profiles {
            p.check(game)?;
        }
        Ok(EmpiricalPlay { profiles })
    }

    pub fn profiles(&self) -> &[BehavioralProfile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn push(&mut self, profile: BehavioralProfile) {
        self.profiles.push(profile);
    }

    /// The first `t` rounds.
    pub fn prefix(&self, t: usize) -> EmpiricalPlay {
        EmpiricalPlay { profiles: self.profiles[..t.clamp(1, self.profiles.len())].to_vec() }
    }
}
