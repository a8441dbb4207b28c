//! Problem decomposition along ground XOR-constraints.
//!
//! Each paired constraint yields an action sequence read off the regression
//! graph; facts those sequences borrow from other constraints become ordered
//! subgoals, and the subgoals are packed into intermediate states.

mod graph;
mod solve;


pub use graph::{build_ordering_graph, extract_intermediate_states, IntermediateState, OgNode, OrderingGraph};
pub use solve::{solve_decomposed, DecompositionTrace, SubproblemTrace};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bitset::FactSet;
use crate::ground::{ActionId, FactId, GroundProblem};
use crate::heuristic::{Grg, INF};
use crate::pddl::{Atom, Term, XorSchema};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("no regression path from the initial fact of constraint {xor}")]
    NoSequence { xor: String },
    #[error("ordering graph has a cycle")]
    CycleDetected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundXor {
    pub id: usize,
    /// Values of the named variables, or `xor<id>` when there are none.
    pub name: String,
    pub members: FactSet,
    pub init_fact: Option<FactId>,
    pub goal_fact: Option<FactId>,
}

impl GroundXor {
    /// The (initial, goal) pair, when both exist and differ.
    pub fn pair(&self) -> Option<(FactId, FactId)> {
        match (self.init_fact, self.goal_fact) {
            (Some(i), Some(g)) if i != g => Some((i, g)),
            _ => None,
        }
    }
}

type Binding = BTreeMap<String, String>;

fn matches(pattern: &Atom, pred: &str, args: &[String], b: &Binding) -> Option<Binding> {
    if pattern.predicate != pred || pattern.args.len() != args.len() {
        return None;
    }
    let mut out = b.clone();
    for (t, v) in pattern.args.iter().zip(args) {
        match t {
            Term::Any => {}
            Term::Const(c) => {
                if c != v {
                    return None;
                }
            }
            Term::Var(x) => match out.get(x) {
                Some(y) if y != v => return None,
                Some(_) => {}
                None => {
                    out.insert(x.clone(), v.clone());
                }
            },
        }
    }
    Some(out)
}

fn bind_conditions(conds: &[Atom], gp: &GroundProblem, b: Binding, out: &mut Vec<Binding>) {
    let Some((first, rest)) = conds.split_first() else {
        out.push(b);
        return;
    };
    for f in gp.static_init.iter().chain(gp.initial.facts.iter()) {
        let fact = gp.facts.fact(f);
        if let Some(nb) = matches(first, &fact.predicate, &fact.args, &b) {
            bind_conditions(rest, gp, nb, out);
        }
    }
}

/// Instantiates every schema. Named variables bound by the static
/// conditions give one constraint per binding; variables that occur only in
/// the alternatives split the matching facts further by their values.
pub fn ground_xors(schemas: &[XorSchema], gp: &GroundProblem) -> Vec<GroundXor> {
    let dynamic = gp.dynamic_facts();
    let mut out: Vec<GroundXor> = Vec::new();
    for schema in schemas {
        let mut bindings = Vec::new();
        bind_conditions(&schema.conditions, gp, Binding::new(), &mut bindings);
        bindings.sort();
        bindings.dedup();
        for b in bindings {
            let mut full: Vec<(Binding, FactId)> = Vec::new();
            let mut partial: Vec<(Binding, FactId)> = Vec::new();
            let free: Vec<String> = schema
                .alternatives
                .iter()
                .flatten()
                .flat_map(|a| a.vars())
                .filter(|v| !b.contains_key(*v))
                .map(String::from)
                .collect();
            for f in dynamic.iter() {
                let fact = gp.facts.fact(f);
                for pattern in schema.alternatives.iter().flatten() {
                    if let Some(nb) = matches(pattern, &fact.predicate, &fact.args, &b) {
                        let key: Binding = nb.into_iter().filter(|(k, _)| free.contains(k)).collect();
                        let complete = free.iter().all(|v| key.contains_key(v));
                        if complete { &mut full } else { &mut partial }.push((key, f));
                    }
                }
            }
            let mut groups: BTreeMap<Binding, FactSet> = BTreeMap::new();
            for (key, f) in full {
                groups.entry(key).or_default().insert(f);
            }
            if groups.is_empty() && !partial.is_empty() {
                groups.insert(Binding::new(), FactSet::new());
            }
            for (key, members) in groups.iter_mut() {
                for (pk, f) in &partial {
                    if pk.iter().all(|(k, v)| key.get(k).is_none_or(|w| w == v)) {
                        members.insert(*f);
                    }
                }
            }
            for (key, members) in groups {
                if members.is_empty() {
                    continue;
                }
                let id = out.len();
                let mut values: Vec<&str> = b.values().map(String::as_str).collect();
                values.extend(key.values().map(String::as_str));
                let name = if values.is_empty() { format!("xor{id}") } else { values.join("-") };
                let init_fact = members.iter().find(|&f| gp.initial.facts.contains(f));
                let goal_fact = members.iter().find(|&f| gp.goals.contains(f));
                out.push(GroundXor {
                    id,
                    name,
                    members,
                    init_fact,
                    goal_fact,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorSequence {
    pub xor: usize,
    /// Forward actions, first to last.
    pub actions: Vec<ActionId>,
}

/// Follows achiever links from the constraint's initial fact down to a
/// distance-zero member, emitting the forward action of each link.
pub fn extract_sequence(x: &GroundXor, gp: &GroundProblem, grg: &Grg) -> Result<XorSequence, DecomposeError> {
    let none = || DecomposeError::NoSequence { xor: x.name.clone() };
    let mut f = x.init_fact.ok_or_else(none)?;
    let mut actions = Vec::new();
    while grg.dist(f) != 0 {
        if grg.dist(f) == INF {
            return Err(none());
        }
        let a = grg.achiever(f).ok_or_else(none)?;
        actions.push(a);
        let inv = gp.inverted_action(a);
        let next = inv
            .pre
            .iter()
            .filter(|&p| x.members.contains(p) && grg.dist(p) < grg.dist(f))
            .min_by_key(|&p| (grg.dist(p), p));
        match next {
            Some(p) => f = p,
            None => break,
        }
    }
    Ok(XorSequence { xor: x.id, actions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubgoalKind {
    I,
    II,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgoal {
    pub fact: FactId,
    pub kind: SubgoalKind,
    pub action: ActionId,
    /// Sequence the action belongs to, and its position there.
    pub sequence: usize,
    pub step: usize,
    /// Constraint the fact is a member of.
    pub owner: usize,
}

/// Preconditions that belong to another constraint, paired or not (type I),
/// and the add effects of the borrowing action in its own constraint (type II).
pub fn identify_subgoals(sequences: &[XorSequence], xors: &[GroundXor], gp: &GroundProblem) -> Vec<Subgoal> {
    let mut out = Vec::new();
    for (si, seq) in sequences.iter().enumerate() {
        for (step, &a) in seq.actions.iter().enumerate() {
            let act = gp.action(a);
            let mut type_i = Vec::new();
            for p in act.pre.iter() {
                for y in xors.iter().filter(|y| y.id != seq.xor && y.members.contains(p)) {
                    type_i.push((p, y.id));
                }
            }
            if type_i.is_empty() {
                continue;
            }
            for (fact, owner) in type_i {
                out.push(Subgoal {
                    fact,
                    kind: SubgoalKind::I,
                    action: a,
                    sequence: si,
                    step,
                    owner,
                });
            }
            for fact in act.add.iter().filter(|&f| xors[seq.xor].members.contains(f)) {
                out.push(Subgoal {
                    fact,
                    kind: SubgoalKind::II,
                    action: a,
                    sequence: si,
                    step,
                    owner: seq.xor,
                });
            }
        }
    }
    out
}

/// Everything derived from the constraints of one problem.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub xors: Vec<GroundXor>,
    pub sequences: Vec<XorSequence>,
    pub skipped: Vec<String>,
    pub graph: OrderingGraph,
    pub states: Vec<IntermediateState>,
}

/// Runs every decomposition step. Constraints without a pair or without a
/// regression path are left out.
pub fn decompose(schemas: &[XorSchema], gp: &GroundProblem, grg: &Grg) -> Result<Decomposition, DecomposeError> {
    let xors = ground_xors(schemas, gp);
    let mut sequences = Vec::new();
    let mut skipped = Vec::new();
    for x in xors.iter().filter(|x| x.pair().is_some()) {
        match extract_sequence(x, gp, grg) {
            Ok(s) => sequences.push(s),
            Err(_) => skipped.push(x.name.clone()),
        }
    }
    let subgoals = identify_subgoals(&sequences, &xors, gp);
    let graph = build_ordering_graph(subgoals, &sequences)?;
    let states = extract_intermediate_states(&graph, gp);
    Ok(Decomposition {
        xors,
        sequences,
        skipped,
        graph,
        states,
    })
}

impl Decomposition {
    /// Human-readable report: constraints, sequences, ordering edges, states.
    pub fn render(&self, gp: &GroundProblem) -> String {
        let mut s = String::new();
        let name = |f: Option<FactId>| f.map(|f| gp.facts.name(f)).unwrap_or_else(|| "-".into());
        s.push_str("; constraints\n");
        for x in &self.xors {
            s.push_str(&format!("xor {}: {} - {}\n", x.name, name(x.init_fact), name(x.goal_fact)));
        }
        s.push_str("; sequences\n");
        for q in &self.sequences {
            let acts: Vec<String> = q.actions.iter().map(|&a| gp.action(a).signature()).collect();
            s.push_str(&format!("xor {}: {}\n", self.xors[q.xor].name, acts.join(" ")));
        }
        for k in &self.skipped {
            s.push_str(&format!("xor {k}: no sequence\n"));
        }
        s.push_str("; ordering\n");
        s.push_str(&self.graph.render(gp));
        s.push_str("; states\n");
        for st in &self.states {
            s.push_str(&format!("{}: {}\n", st.index + 1, st.render(gp)));
        }
        s
    }
}

impl fmt::Display for SubgoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubgoalKind::I => "I",
            SubgoalKind::II => "II",
        })
    }
}
