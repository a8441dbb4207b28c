use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use super::{best_first, Plan, SearchConfig, SearchOutcome, SearchStats};
use crate::ground::{applicable, apply_unchecked, ActionId, GroundProblem, State};
use crate::heuristic::Evaluator;

enum Probe {
    Improved(State, u32, Vec<ActionId>),
    Stuck,
    Limit,
}

/// Hill-climbing with bounded breadth-first probes for a strictly better
/// state. Falls back to [`best_first`] from the initial state when a probe
/// fails.
pub fn enforced_hill_climb(gp: &GroundProblem, eval: &dyn Evaluator, cfg: &SearchConfig) -> SearchOutcome {
    let t0 = Instant::now();
    let mut stats = SearchStats::default();
    if gp.static_goal_unmet {
        stats.elapsed = t0.elapsed();
        return SearchOutcome::Unsolvable(stats);
    }
    let mut current = gp.initial.clone();
    let mut h = eval.h(&current);
    stats.evaluated += 1;
    let mut plan = Vec::new();
    while !gp.is_goal(&current) {
        match probe(gp, eval, cfg, &current, h, &mut stats, t0) {
            Probe::Improved(s, h2, path) => {
                current = s;
                h = h2;
                plan.extend(path);
            }
            Probe::Limit => {
                stats.elapsed = t0.elapsed();
                return SearchOutcome::LimitHit(stats);
            }
            Probe::Stuck => {
                let mut rest = *cfg;
                if let Some(n) = rest.limits.nodes {
                    rest.limits.nodes = Some(n.saturating_sub(stats.expanded));
                }
                if let Some(t) = rest.limits.time {
                    rest.limits.time = Some(t.saturating_sub(t0.elapsed()));
                }
                let mut outcome = best_first(gp, eval, &rest);
                let inner = match &mut outcome {
                    SearchOutcome::Solved(p) => &mut p.stats,
                    SearchOutcome::Unsolvable(s) | SearchOutcome::LimitHit(s) => s,
                };
                stats.absorb(inner);
                stats.restarted = true;
                stats.elapsed = t0.elapsed();
                *inner = stats;
                return outcome;
            }
        }
    }
    stats.elapsed = t0.elapsed();
    SearchOutcome::Solved(Plan { actions: plan, stats })
}

fn probe(
    gp: &GroundProblem,
    eval: &dyn Evaluator,
    cfg: &SearchConfig,
    from: &State,
    h: u32,
    stats: &mut SearchStats,
    t0: Instant,
) -> Probe {
    let mut seen: HashSet<State> = HashSet::new();
    seen.insert(from.clone());
    let mut queue: VecDeque<(State, Vec<ActionId>)> = VecDeque::new();
    queue.push_back((from.clone(), Vec::new()));
    while let Some((s, path)) = queue.pop_front() {
        if cfg.limits.nodes.is_some_and(|n| stats.expanded >= n)
            || cfg.limits.time.is_some_and(|t| t0.elapsed() >= t)
        {
            return Probe::Limit;
        }
        stats.expanded += 1;
        for a in ordered_actions(gp, eval, &s) {
            let next = apply_unchecked(&s, gp.action(a));
            if !seen.insert(next.clone()) {
                continue;
            }
            let mut p = path.clone();
            p.push(a);
            if gp.is_goal(&next) {
                return Probe::Improved(next, 0, p);
            }
            let h2 = eval.h(&next);
            stats.evaluated += 1;
            if h2 < h {
                return Probe::Improved(next, h2, p);
            }
            if p.len() < cfg.ehc_depth {
                queue.push_back((next, p));
            }
        }
    }
    Probe::Stuck
}

/// Applicable preferred actions first, then every other applicable action.
fn ordered_actions(gp: &GroundProblem, eval: &dyn Evaluator, s: &State) -> Vec<ActionId> {
    let mut out: Vec<ActionId> = eval
        .preferred(s)
        .into_iter()
        .filter(|&a| applicable(s, gp.action(a)))
        .collect();
    let first = out.clone();
    out.extend(gp.applicable_actions(s).into_iter().filter(|a| !first.contains(a)));
    out
}
