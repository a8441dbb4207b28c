//! Greedy regression graph: backward distance estimates with related facts.

mod additive;
mod aggregate;

pub use additive::{additive_distance, AdditiveEvaluator};
pub use aggregate::{aggregate, aggregate_detail, Aggregation};

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::analysis::GreedySelector;
use crate::bitset::FactSet;
use crate::ground::{ActionId, FactId, GroundProblem, State};

pub const INF: u32 = u32::MAX;

pub const DEFAULT_PENALTY: u32 = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrgNode {
    pub dist: u32,
    pub related: FactSet,
    /// Inverted action that last improved this fact.
    pub achiever: Option<ActionId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Improved { fact: FactId, from: u32, to: u32 },
    Queued { action: ActionId, from: u32, to: u32 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrgStats {
    pub pops: u64,
    pub improvements: u64,
    pub aggregations: u64,
    pub stalls: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grg {
    pub nodes: Vec<GrgNode>,
    pub action_dist: Vec<u32>,
    /// Facts seeded at distance zero, including greedy selections.
    pub zero: FactSet,
    pub related_facts: bool,
    pub stats: GrgStats,
    pub trace: Option<Vec<TraceEvent>>,
}

impl Grg {
    #[inline]
    pub fn dist(&self, f: FactId) -> u32 {
        self.nodes.get(f.index()).map_or(INF, |n| n.dist)
    }

    #[inline]
    pub fn related(&self, f: FactId) -> &FactSet {
        &self.nodes[f.index()].related
    }

    pub fn achiever(&self, f: FactId) -> Option<ActionId> {
        self.nodes.get(f.index()).and_then(|n| n.achiever)
    }

    /// Three-column dump (fact, dist, related) over dynamic facts in id order.
    pub fn dump(&self, gp: &GroundProblem) -> String {
        let mut out = String::new();
        for f in gp.facts.iter().filter(|f| !f.is_static) {
            let d = self.dist(f.id);
            let d = if d == INF { "inf".to_string() } else { d.to_string() };
            let rel: Vec<String> = gp.facts.names(self.related(f.id));
            let _ = writeln!(out, "{}\t{}\t({})", f, d, rel.join(" "));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrgOptions {
    pub related_facts: bool,
    pub trace: bool,
}

impl Default for GrgOptions {
    fn default() -> Self {
        GrgOptions {
            related_facts: true,
            trace: false,
        }
    }
}

struct Builder<'g> {
    gp: &'g GroundProblem,
    grg: Grg,
    agenda: VecDeque<ActionId>,
}

impl Builder<'_> {
    fn aggregate(&mut self, facts: &FactSet) -> u32 {
        let a = aggregate_detail(facts, &self.grg, None);
        self.grg.stats.aggregations += 1;
        self.grg.stats.stalls += a.stalls as u64;
        a.cost
    }

    /// Re-evaluates the inverted consumers of `f`; returns whether any was queued.
    fn reconsider(&mut self, f: FactId) -> bool {
        let mut queued = false;
        for &b in &self.gp.inv_consumers[f.index()] {
            let c = self.aggregate(&self.gp.inverted[b.index()].pre);
            if c == INF {
                continue;
            }
            let old = self.grg.action_dist[b.index()];
            if c + 1 < old {
                self.grg.action_dist[b.index()] = c + 1;
                if let Some(t) = &mut self.grg.trace {
                    t.push(TraceEvent::Queued {
                        action: b,
                        from: old,
                        to: c + 1,
                    });
                }
                self.agenda.push_back(b);
                queued = true;
            }
        }
        queued
    }

    fn process(&mut self, alpha: ActionId) {
        self.grg.stats.pops += 1;
        let a = &self.gp.inverted[alpha.index()];
        let d = self.grg.action_dist[alpha.index()];
        for f in a.add.iter() {
            let old = self.grg.dist(f);
            if old <= d {
                continue;
            }
            let mut rel = FactSet::new();
            if self.grg.related_facts {
                rel = a.pre.clone();
                for p in a.pre.iter() {
                    rel.union_with(&self.grg.nodes[p.index()].related);
                }
                rel.union_with(&a.add);
                rel.difference_with(&a.del);
                rel.remove(f);
                rel.difference_with(&self.grg.zero);
            }
            let node = &mut self.grg.nodes[f.index()];
            node.dist = d;
            node.related = rel;
            node.achiever = Some(alpha);
            self.grg.stats.improvements += 1;
            if let Some(t) = &mut self.grg.trace {
                t.push(TraceEvent::Improved { fact: f, from: old, to: d });
            }
            self.reconsider(f);
        }
    }
}

/// Builds the regression graph from `goals` (the enhanced goal set). With a
/// greedy selector, candidate facts are moved to distance zero whenever the
/// agenda runs dry, until some inverted action becomes applicable again.
pub fn build_grg(
    gp: &GroundProblem,
    goals: &FactSet,
    opts: GrgOptions,
    mut selector: Option<&mut GreedySelector<'_>>,
) -> Grg {
    let n = gp.facts.len();
    let mut zero = goals.clone();
    zero.intersect_with(&gp.dynamic_facts());
    let mut b = Builder {
        gp,
        grg: Grg {
            nodes: vec![
                GrgNode {
                    dist: INF,
                    related: FactSet::new(),
                    achiever: None,
                };
                n
            ],
            action_dist: vec![INF; gp.inverted.len()],
            zero: zero.clone(),
            related_facts: opts.related_facts,
            stats: GrgStats::default(),
            trace: opts.trace.then(Vec::new),
        },
        agenda: VecDeque::new(),
    };
    for g in zero.iter() {
        b.grg.nodes[g.index()].dist = 0;
    }
    for a in &gp.inverted {
        let c = b.aggregate(&a.pre);
        if c < INF {
            b.grg.action_dist[a.id.index()] = c + 1;
            if let Some(t) = &mut b.grg.trace {
                t.push(TraceEvent::Queued {
                    action: a.id,
                    from: INF,
                    to: c + 1,
                });
            }
            b.agenda.push_back(a.id);
        }
    }
    let dynamic = gp.dynamic_facts();
    loop {
        while let Some(alpha) = b.agenda.pop_front() {
            b.process(alpha);
        }
        let Some(sel) = selector.as_deref_mut() else { break };
        if dynamic.iter().all(|f| b.grg.dist(f) < INF) {
            break;
        }
        let mut resumed = false;
        while !resumed {
            let grg = &b.grg;
            let pick = sel.select(
                |f| {
                    gp.inv_consumers[f.index()].iter().any(|&a| {
                        gp.inverted[a.index()]
                            .pre
                            .iter()
                            .all(|p| p == f || grg.zero.contains(p))
                    })
                },
                |f| {
                    gp.inv_consumers[f.index()].iter().any(|&a| {
                        gp.inverted[a.index()]
                            .pre
                            .iter()
                            .all(|p| p == f || grg.dist(p) < INF)
                    })
                },
            );
            let Some(f) = pick else { break };
            let node = &mut b.grg.nodes[f.index()];
            if let Some(t) = &mut b.grg.trace {
                t.push(TraceEvent::Improved {
                    fact: f,
                    from: node.dist,
                    to: 0,
                });
            }
            node.dist = 0;
            node.related = FactSet::new();
            node.achiever = None;
            b.grg.zero.insert(f);
            resumed = b.reconsider(f);
        }
        if !resumed {
            break;
        }
    }
    b.grg
}

/// Search-time heuristic value; unreachable facts add `penalty` each.
pub fn evaluate(s: &State, grg: &Grg, penalty: u32) -> u32 {
    aggregate_detail(&s.facts, grg, Some(penalty)).cost
}

pub trait Evaluator {
    fn h(&self, s: &State) -> u32;

    /// Forward actions suggested for state `s`, tried first by hill-climbing.
    fn preferred(&self, _s: &State) -> Vec<ActionId> {
        Vec::new()
    }
}

pub struct GrtEvaluator<'a> {
    pub grg: &'a Grg,
    pub penalty: u32,
}

impl Evaluator for GrtEvaluator<'_> {
    fn h(&self, s: &State) -> u32 {
        evaluate(s, self.grg, self.penalty)
    }

    /// Achievers recorded for the state's facts, lowest id first.
    fn preferred(&self, s: &State) -> Vec<ActionId> {
        let mut v: Vec<ActionId> = s.facts.iter().filter_map(|f| self.grg.achiever(f)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::ground::{apply, ground};

    fn load(suite: &str, name: &str) -> GroundProblem {
        let (d, p) = corpus::get(suite, name).unwrap().parse().unwrap();
        ground(&d, &p).unwrap()
    }

    fn plain_grg(gp: &GroundProblem, related_facts: bool) -> Grg {
        let opts = GrgOptions {
            related_facts,
            trace: false,
        };
        build_grg(gp, &gp.goals, opts, None)
    }

    fn dist_of(gp: &GroundProblem, grg: &Grg, text: &str) -> u32 {
        grg.dist(gp.facts.find(text).unwrap())
    }

    #[test]
    fn sussman_table() {
        let gp = load("blocks3", "sussman");
        let grg = plain_grg(&gp, true);
        let expect = [
            ("(on c table)", 0),
            ("(on b c)", 0),
            ("(on a b)", 0),
            ("(clear a)", 0),
            ("(on a table)", 1),
            ("(clear b)", 1),
            ("(on b table)", 2),
            ("(clear c)", 2),
            ("(on c b)", 3),
        ];
        for (f, d) in expect {
            assert_eq!(dist_of(&gp, &grg, f), d, "{f}");
        }
        let rel = gp.facts.names(grg.related(gp.facts.find("(on a table)").unwrap()));
        assert_eq!(rel, vec!["(clear b)"]);
        assert_eq!(aggregate(&gp.initial.facts, &grg), 3);
    }

    #[test]
    fn grid_successors() {
        let gp = load("grid3", "fig");
        let grg = plain_grg(&gp, true);
        assert_eq!(dist_of(&gp, &grg, "(at k n0_2)"), 8);
        assert!(grg
            .related(gp.facts.find("(at k n0_2)").unwrap())
            .contains(gp.facts.find("(at r n0_2)").unwrap()));
        assert_eq!(evaluate(&gp.initial, &grg, DEFAULT_PENALTY), 10);
        let after = |sig: &str| {
            let a = gp.action(gp.find_action(sig).unwrap());
            evaluate(&apply(&gp.initial, a).unwrap(), &grg, DEFAULT_PENALTY)
        };
        assert_eq!(after("(move r n0_0 n1_0)"), 9);
        assert_eq!(after("(move r n0_0 n0_1)"), 11);
    }

    #[test]
    fn without_related_facts_costs_add_up() {
        let gp = load("blocks3", "sussman");
        let grg = plain_grg(&gp, false);
        let sum: u32 = gp.initial.facts.iter().map(|f| grg.dist(f)).sum();
        assert_eq!(aggregate(&gp.initial.facts, &grg), sum);
        assert!(sum > 3);
        assert!(grg.nodes.iter().all(|n| n.related.is_empty()));
    }

    #[test]
    fn unreachable_facts_cost_the_penalty() {
        let gp = load("grid3", "fig");
        let mut grg = plain_grg(&gp, true);
        let f = gp.facts.find("(at r n0_0)").unwrap();
        grg.nodes[f.index()].dist = INF;
        let s = State::new(FactSet::from_ids([f]), Vec::new());
        assert_eq!(evaluate(&s, &grg, 7), 7);
        assert_eq!(aggregate(&s.facts, &grg), INF);
    }

    #[test]
    fn trace_records_improvements() {
        let gp = load("blocks3", "sussman");
        let opts = GrgOptions {
            related_facts: true,
            trace: true,
        };
        let grg = build_grg(&gp, &gp.goals, opts, None);
        let trace = grg.trace.as_ref().unwrap();
        let improved = trace.iter().filter(|e| matches!(e, TraceEvent::Improved { .. })).count();
        assert_eq!(improved as u64, grg.stats.improvements);
        for e in trace {
            if let TraceEvent::Improved { from, to, .. } = e {
                assert!(to < from);
            }
        }
    }

    /// Fixpoint iteration over all actions until no cost changes.
    fn naive_additive(from: &State, to: &FactSet, gp: &GroundProblem) -> u32 {
        let mut cost = vec![INF; gp.facts.len()];
        for f in from.facts.iter() {
            cost[f.index()] = 0;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for a in &gp.actions {
                let mut c: u32 = 1;
                for p in a.pre.iter() {
                    c = c.saturating_add(cost[p.index()]);
                }
                if c >= INF {
                    continue;
                }
                for q in a.add.iter() {
                    if c < cost[q.index()] {
                        cost[q.index()] = c;
                        changed = true;
                    }
                }
            }
        }
        to.iter().fold(0u32, |s, f| s.saturating_add(cost[f.index()]))
    }

    #[test]
    fn additive_matches_fixpoint() {
        for inst in corpus::bundled() {
            let (d, p) = inst.parse().unwrap();
            let gp = ground(&d, &p).unwrap();
            let ours = additive_distance(&gp.initial, &gp.goals, &gp);
            let naive = naive_additive(&gp.initial, &gp.goals, &gp);
            assert_eq!(ours.min(INF), naive.min(INF), "{}", inst.name);
        }
    }

    #[test]
    fn preferred_actions_are_achievers() {
        let gp = load("grid3", "fig");
        let grg = plain_grg(&gp, true);
        let ev = GrtEvaluator {
            grg: &grg,
            penalty: DEFAULT_PENALTY,
        };
        let pref = ev.preferred(&gp.initial);
        assert!(!pref.is_empty());
        for a in &pref {
            assert!(gp.initial.facts.iter().any(|f| grg.achiever(f) == Some(*a)));
        }
        assert!(pref.windows(2).all(|w| w[0] < w[1]));
    }
}
