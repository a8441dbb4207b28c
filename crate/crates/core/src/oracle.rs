//! Exhaustive breadth-first search over ground states.

use std::collections::VecDeque;

use indexmap::IndexSet;

use crate::ground::{apply_unchecked, ActionId, GroundProblem, State};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    /// A shortest plan.
    Optimal(Vec<ActionId>),
    Unsolvable,
    /// More than `bound` states were generated before the search ended.
    BoundHit,
}

impl OracleResult {
    pub fn length(&self) -> Option<usize> {
        match self {
            OracleResult::Optimal(p) => Some(p.len()),
            _ => None,
        }
    }
}

/// Shortest plan from the initial state, visiting at most `bound` states.
pub fn shortest_plan(gp: &GroundProblem, bound: usize) -> OracleResult {
    if gp.static_goal_unmet {
        return OracleResult::Unsolvable;
    }
    if gp.is_goal(&gp.initial) {
        return OracleResult::Optimal(Vec::new());
    }
    let mut seen: IndexSet<State> = IndexSet::new();
    let mut parent: Vec<Option<(usize, ActionId)>> = vec![None];
    seen.insert(gp.initial.clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let s = seen[id].clone();
        for a in gp.applicable_actions(&s) {
            let next = apply_unchecked(&s, gp.action(a));
            let goal = gp.is_goal(&next);
            let (child, fresh) = seen.insert_full(next);
            if !fresh {
                continue;
            }
            parent.push(Some((id, a)));
            if goal {
                let mut plan = Vec::new();
                let mut cur = child;
                while let Some((p, a)) = parent[cur] {
                    plan.push(a);
                    cur = p;
                }
                plan.reverse();
                return OracleResult::Optimal(plan);
            }
            if seen.len() > bound {
                return OracleResult::BoundHit;
            }
            queue.push_back(child);
        }
    }
    OracleResult::Unsolvable
}

/// Every state reachable from the initial state, or `None` past `bound`.
pub fn reachable_states(gp: &GroundProblem, bound: usize) -> Option<Vec<State>> {
    let mut seen: IndexSet<State> = IndexSet::new();
    seen.insert(gp.initial.clone());
    let mut next_id = 0;
    while next_id < seen.len() {
        let s = seen[next_id].clone();
        next_id += 1;
        for a in gp.applicable_actions(&s) {
            seen.insert(apply_unchecked(&s, gp.action(a)));
            if seen.len() > bound {
                return None;
            }
        }
    }
    Some(seen.into_iter().collect())
}
