use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Evaluator, INF};
use crate::bitset::FactSet;
use crate::ground::{GroundProblem, State};

/// Forward additive estimate: every fact of `from` costs 0, an action costs
/// one plus the sum of its precondition costs, and the result is the sum of
/// the costs of `to`. Deletes and resources are ignored.
pub fn additive_distance(from: &State, to: &FactSet, gp: &GroundProblem) -> u32 {
    let cost = additive_costs(from, gp);
    let mut sum: u32 = 0;
    for f in to.iter() {
        let c = cost.get(f.index()).copied().unwrap_or(INF);
        if c == INF {
            return INF;
        }
        sum = sum.saturating_add(c);
    }
    sum
}

pub(crate) fn additive_costs(from: &State, gp: &GroundProblem) -> Vec<u32> {
    let n = gp.facts.len();
    let mut cost = vec![INF; n];
    let mut done = vec![false; n];
    let mut missing: Vec<usize> = gp.actions.iter().map(|a| a.pre.len()).collect();
    let mut acc: Vec<u32> = vec![0; gp.actions.len()];
    let mut heap = BinaryHeap::new();
    for f in from.facts.iter() {
        cost[f.index()] = 0;
        heap.push(Reverse((0u32, f.0)));
    }
    let relax = |a: usize, c: u32, cost: &mut Vec<u32>, heap: &mut BinaryHeap<Reverse<(u32, u32)>>| {
        for q in gp.actions[a].add.iter() {
            if c < cost[q.index()] {
                cost[q.index()] = c;
                heap.push(Reverse((c, q.0)));
            }
        }
    };
    for (i, a) in gp.actions.iter().enumerate() {
        if a.pre.is_empty() {
            relax(i, 1, &mut cost, &mut heap);
        }
    }
    while let Some(Reverse((c, f))) = heap.pop() {
        let fi = f as usize;
        if done[fi] || c != cost[fi] {
            continue;
        }
        done[fi] = true;
        for &a in &gp.consumers[fi] {
            let ai = a.index();
            missing[ai] -= 1;
            acc[ai] = acc[ai].saturating_add(c);
            if missing[ai] == 0 {
                relax(ai, acc[ai].saturating_add(1), &mut cost, &mut heap);
            }
        }
    }
    cost
}

/// Recomputes the forward additive estimate at every state.
pub struct AdditiveEvaluator<'a> {
    pub gp: &'a GroundProblem,
    pub goals: FactSet,
    pub penalty: u32,
}

impl Evaluator for AdditiveEvaluator<'_> {
    fn h(&self, s: &State) -> u32 {
        let cost = additive_costs(s, self.gp);
        self.goals
            .iter()
            .map(|g| match cost[g.index()] {
                INF => self.penalty,
                c => c,
            })
            .fold(0u32, u32::saturating_add)
    }
}
