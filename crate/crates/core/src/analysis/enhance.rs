use std::fmt;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MutexTable;
use crate::bitset::FactSet;
use crate::ground::{FactId, GroundProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum GoalCompletion {
    #[default]
    All,
    Initial,
    Greedy,
}

impl fmt::Display for GoalCompletion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GoalCompletion::All => "all",
            GoalCompletion::Initial => "initial",
            GoalCompletion::Greedy => "greedy",
        })
    }
}

impl FromStr for GoalCompletion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(GoalCompletion::All),
            "initial" => Ok(GoalCompletion::Initial),
            "greedy" => Ok(GoalCompletion::Greedy),
            other => Err(format!("unknown goal-completion method `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoalEnhancement {
    pub method: GoalCompletion,
    pub added: FactSet,
    pub rejected: FactSet,
}

/// Dynamic non-goal facts that are mutex with no goal fact.
pub fn candidate_goal_facts(gp: &GroundProblem, mt: &MutexTable) -> FactSet {
    gp.dynamic_facts()
        .iter()
        .filter(|&f| !gp.goals.contains(f) && !mt.mutex_with_any(f, &gp.goals))
        .collect()
}

/// Up-front enhancement. For `Greedy` the sets start empty and are filled by
/// a [`GreedySelector`] during heuristic construction.
pub fn enhance_goals(method: GoalCompletion, gp: &GroundProblem, mt: &MutexTable) -> GoalEnhancement {
    let candidates = candidate_goal_facts(gp, mt);
    let mut added = FactSet::new();
    let mut rejected = FactSet::new();
    match method {
        GoalCompletion::All => added = candidates,
        GoalCompletion::Initial => {
            for f in candidates.iter().filter(|&f| gp.initial.facts.contains(f)) {
                if !rejected.contains(f) {
                    added.insert(f);
                    let mut clash = mt.row(f).clone();
                    clash.intersect_with(&candidates);
                    rejected.union_with(&clash);
                }
            }
            rejected.difference_with(&added);
        }
        GoalCompletion::Greedy => {}
    }
    GoalEnhancement {
        method,
        added,
        rejected,
    }
}

/// Picks candidate goal facts one at a time, by the preference order: facts
/// that combine with the original goals, facts that combine with already
/// reached facts, initial-state facts, then a seeded random pick.
pub struct GreedySelector<'a> {
    mutexes: &'a MutexTable,
    remaining: FactSet,
    initial: FactSet,
    rng: ChaCha8Rng,
    pub added: FactSet,
    pub rejected: FactSet,
}

impl<'a> GreedySelector<'a> {
    pub fn new(gp: &GroundProblem, mutexes: &'a MutexTable, seed: u64) -> Self {
        GreedySelector {
            mutexes,
            remaining: candidate_goal_facts(gp, mutexes),
            initial: gp.initial.facts.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            added: FactSet::new(),
            rejected: FactSet::new(),
        }
    }

    pub fn remaining(&self) -> &FactSet {
        &self.remaining
    }

    pub fn select(
        &mut self,
        combines_with_goals: impl Fn(FactId) -> bool,
        combines_with_reached: impl Fn(FactId) -> bool,
    ) -> Option<FactId> {
        let pick = self
            .remaining
            .iter()
            .find(|&f| combines_with_goals(f))
            .or_else(|| self.remaining.iter().find(|&f| combines_with_reached(f)))
            .or_else(|| self.remaining.iter().find(|&f| self.initial.contains(f)))
            .or_else(|| self.remaining.iter().choose(&mut self.rng))?;
        self.remaining.remove(pick);
        self.added.insert(pick);
        let mut clash = self.mutexes.row(pick).clone();
        clash.intersect_with(&self.remaining);
        self.remaining.difference_with(&clash);
        self.rejected.union_with(&clash);
        Some(pick)
    }
}
