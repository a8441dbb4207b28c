use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use indexmap::IndexSet;

use super::{Plan, SearchConfig, SearchOutcome, SearchStats};
use crate::ground::{apply_unchecked, ActionId, GroundProblem, State};
use crate::heuristic::Evaluator;

const WEIGHT_SCALE: f64 = 1000.0;

/// Visited states, each stored once; node ids index into it.
struct Arena {
    states: IndexSet<State>,
    parent: Vec<Option<(usize, ActionId)>>,
    g: Vec<u32>,
    expanded: Vec<bool>,
}

impl Arena {
    fn insert(&mut self, s: State, parent: Option<(usize, ActionId)>, g: u32) -> Option<usize> {
        let (id, fresh) = self.states.insert_full(s);
        if !fresh {
            return None;
        }
        self.parent.push(parent);
        self.g.push(g);
        self.expanded.push(false);
        Some(id)
    }

    fn path(&self, mut id: usize) -> Vec<ActionId> {
        let mut out = Vec::new();
        while let Some((p, a)) = self.parent[id] {
            out.push(a);
            id = p;
        }
        out.reverse();
        out
    }
}

fn priority(weight: Option<f64>, g: u32, h: u32) -> u64 {
    match weight {
        None => h as u64,
        Some(w) => (g as f64 * WEIGHT_SCALE + (w * WEIGHT_SCALE).round() * h as f64) as u64,
    }
}

/// Best-first search from the problem's initial state.
pub fn best_first(gp: &GroundProblem, eval: &dyn Evaluator, cfg: &SearchConfig) -> SearchOutcome {
    best_first_from(gp, &gp.initial, eval, cfg)
}

/// Best-first search from `start`. Ties go to lower `h`, then lower `g`,
/// then the earlier generated node.
pub fn best_first_from(
    gp: &GroundProblem,
    start: &State,
    eval: &dyn Evaluator,
    cfg: &SearchConfig,
) -> SearchOutcome {
    let t0 = Instant::now();
    let mut stats = SearchStats::default();
    let finish = |mut stats: SearchStats| {
        stats.elapsed = t0.elapsed();
        stats
    };
    if gp.static_goal_unmet {
        return SearchOutcome::Unsolvable(finish(stats));
    }
    let mut arena = Arena {
        states: IndexSet::new(),
        parent: Vec::new(),
        g: Vec::new(),
        expanded: Vec::new(),
    };
    let root = arena.insert(start.clone(), None, 0).expect("fresh arena");
    if gp.is_goal(start) {
        return SearchOutcome::Solved(Plan {
            actions: Vec::new(),
            stats: finish(stats),
        });
    }
    let h0 = eval.h(start);
    stats.evaluated += 1;
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((priority(cfg.weight, 0, h0), h0, 0u32, seq, root)));
    while let Some(Reverse((_, _, g, _, id))) = open.pop() {
        if let Some(limit) = cfg.limits.nodes {
            if stats.expanded >= limit {
                return SearchOutcome::LimitHit(finish(stats));
            }
        }
        if let Some(limit) = cfg.limits.time {
            if t0.elapsed() >= limit {
                return SearchOutcome::LimitHit(finish(stats));
            }
        }
        if arena.expanded[id] {
            stats.reexpanded += 1;
        }
        arena.expanded[id] = true;
        stats.expanded += 1;
        let state = arena.states[id].clone();
        for a in gp.applicable_actions(&state) {
            let next = apply_unchecked(&state, gp.action(a));
            let goal = gp.is_goal(&next);
            let Some(child) = arena.insert(next, Some((id, a)), g + 1) else {
                continue;
            };
            if goal {
                return SearchOutcome::Solved(Plan {
                    actions: arena.path(child),
                    stats: finish(stats),
                });
            }
            let h = eval.h(&arena.states[child]);
            stats.evaluated += 1;
            seq += 1;
            open.push(Reverse((priority(cfg.weight, g + 1, h), h, g + 1, seq, child)));
        }
    }
    SearchOutcome::Unsolvable(finish(stats))
}
