//! Ground problem: interned facts, forward and inverted actions, states.

mod eliminate;
mod grounder;

pub use eliminate::{eliminate_irrelevant_objects, eliminate_with, EliminationReport};
pub use grounder::{ground, ground_with, GroundConfig};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bitset::FactSet;
use crate::pddl::GroundAtom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FactId(pub u32);

impl FactId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActionId(pub u32);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("grounding exceeded the {what} ceiling of {limit}")]
    CapacityExceeded { what: &'static str, limit: usize },
    #[error("`{name}` is used as a resource but is not declared as one")]
    UnknownResource { name: String },
    #[error("action {action} is not applicable")]
    NotApplicable { action: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub id: FactId,
    pub predicate: String,
    pub args: Vec<String>,
    pub is_static: bool,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// Bijection between fact ids and `(predicate, args)` pairs.
#[derive(Clone, Debug, Default)]
pub struct FactTable {
    facts: Vec<Fact>,
    index: HashMap<(String, Vec<String>), FactId>,
}

impl FactTable {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn intern(&mut self, predicate: &str, args: &[String]) -> FactId {
        if let Some(&id) = self.index.get(&(predicate.to_string(), args.to_vec())) {
            return id;
        }
        let id = FactId(self.facts.len() as u32);
        self.facts.push(Fact {
            id,
            predicate: predicate.to_string(),
            args: args.to_vec(),
            is_static: false,
        });
        self.index.insert((predicate.to_string(), args.to_vec()), id);
        id
    }

    pub fn get(&self, predicate: &str, args: &[String]) -> Option<FactId> {
        self.index.get(&(predicate.to_string(), args.to_vec())).copied()
    }

    pub fn get_atom(&self, atom: &GroundAtom) -> Option<FactId> {
        self.get(&atom.predicate, &atom.args)
    }

    /// Looks up a fact written as `(pred a b)` or `pred a b`, case-insensitively.
    pub fn find(&self, text: &str) -> Option<FactId> {
        let lower = text.to_lowercase();
        let mut parts = lower
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split_whitespace()
            .map(str::to_string);
        let pred = parts.next()?;
        let args: Vec<String> = parts.collect();
        self.get(&pred, &args)
    }

    pub fn fact(&self, id: FactId) -> &Fact {
        &self.facts[id.index()]
    }

    pub(crate) fn fact_mut(&mut self, id: FactId) -> &mut Fact {
        &mut self.facts[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = FactId> {
        (0..self.facts.len() as u32).map(FactId)
    }

    pub fn name(&self, id: FactId) -> String {
        self.fact(id).to_string()
    }

    pub fn names(&self, set: &FactSet) -> Vec<String> {
        set.iter().map(|f| self.name(f)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub id: ActionId,
    pub name: String,
    pub args: Vec<String>,
    /// Dynamic preconditions.
    pub pre: FactSet,
    pub pre_static: FactSet,
    pub add: FactSet,
    pub del: FactSet,
    /// Conditional preconditions: never required, removed when present.
    pub soft_pre: FactSet,
    pub resource_use: Vec<(usize, u32)>,
}

impl GroundAction {
    pub fn signature(&self) -> String {
        let mut s = format!("({}", self.name);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.signature())
    }
}

/// Pre' = Add ∪ (Pre ∪ SoftPre) \ Del, Del' = Add, Add' = Del; resources dropped.
pub fn invert(a: &GroundAction) -> GroundAction {
    let mut pre = a.pre.clone();
    pre.union_with(&a.soft_pre);
    pre.difference_with(&a.del);
    pre.union_with(&a.add);
    GroundAction {
        id: a.id,
        name: a.name.clone(),
        args: a.args.clone(),
        pre,
        pre_static: a.pre_static.clone(),
        add: a.del.clone(),
        del: a.add.clone(),
        soft_pre: FactSet::new(),
        resource_use: Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct State {
    pub facts: FactSet,
    pub resources: Vec<u32>,
}

impl State {
    pub fn new(facts: FactSet, resources: Vec<u32>) -> Self {
        State { facts, resources }
    }
}

pub fn applicable(s: &State, a: &GroundAction) -> bool {
    a.pre.is_subset(&s.facts)
        && a
            .resource_use
            .iter()
            .all(|&(r, k)| s.resources.get(r).copied().unwrap_or(0) >= k)
}

/// Successor state, assuming `applicable(s, a)`.
pub fn apply_unchecked(s: &State, a: &GroundAction) -> State {
    let mut facts = s.facts.clone();
    facts.difference_with(&a.del);
    facts.difference_with(&a.soft_pre);
    facts.union_with(&a.add);
    let mut resources = s.resources.clone();
    for &(r, k) in &a.resource_use {
        resources[r] -= k;
    }
    State { facts, resources }
}

pub fn apply(s: &State, a: &GroundAction) -> Result<State, GroundError> {
    if !applicable(s, a) {
        return Err(GroundError::NotApplicable {
            action: a.signature(),
        });
    }
    Ok(apply_unchecked(s, a))
}

#[derive(Clone, Debug)]
pub struct GroundProblem {
    pub facts: FactTable,
    pub resources: Vec<String>,
    pub actions: Vec<GroundAction>,
    pub inverted: Vec<GroundAction>,
    pub initial: State,
    /// Original goals restricted to dynamic facts.
    pub goals: FactSet,
    /// A static goal fact is false initially, so no plan exists.
    pub static_goal_unmet: bool,
    /// Static facts true in the initial state.
    pub static_init: FactSet,
    pub achievers: Vec<Vec<ActionId>>,
    pub consumers: Vec<Vec<ActionId>>,
    pub inv_consumers: Vec<Vec<ActionId>>,
    /// Actions indexed by their lowest dynamic precondition.
    first_pre: Vec<Vec<ActionId>>,
    no_pre: Vec<ActionId>,
}

impl GroundProblem {
    pub fn dynamic_facts(&self) -> FactSet {
        self.facts
            .iter()
            .filter(|f| !f.is_static)
            .map(|f| f.id)
            .collect()
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn inverted_action(&self, id: ActionId) -> &GroundAction {
        &self.inverted[id.index()]
    }

    pub fn is_goal(&self, s: &State) -> bool {
        !self.static_goal_unmet && self.goals.is_subset(&s.facts)
    }

    pub fn find_action(&self, signature: &str) -> Option<ActionId> {
        let norm = signature.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
        let norm = if norm.starts_with('(') { norm } else { format!("({norm})") };
        self.actions.iter().find(|a| a.signature() == norm).map(|a| a.id)
    }

    /// Applicable actions in increasing id order.
    pub fn applicable_actions(&self, s: &State) -> Vec<ActionId> {
        let mut out: Vec<ActionId> = self
            .no_pre
            .iter()
            .copied()
            .filter(|&a| applicable(s, self.action(a)))
            .collect();
        for f in s.facts.iter() {
            if let Some(list) = self.first_pre.get(f.index()) {
                out.extend(list.iter().copied().filter(|&a| applicable(s, self.action(a))));
            }
        }
        out.sort_unstable();
        out
    }

    /// Rebuilds inverted actions and every index from `actions`.
    pub fn reindex(&mut self) {
        let n = self.facts.len();
        self.inverted = self.actions.iter().map(invert).collect();
        self.achievers = vec![Vec::new(); n];
        self.consumers = vec![Vec::new(); n];
        self.inv_consumers = vec![Vec::new(); n];
        self.first_pre = vec![Vec::new(); n];
        self.no_pre.clear();
        for a in &self.actions {
            for f in a.add.iter() {
                self.achievers[f.index()].push(a.id);
            }
            for f in a.pre.iter() {
                self.consumers[f.index()].push(a.id);
            }
            match a.pre.iter().next() {
                Some(f) => self.first_pre[f.index()].push(a.id),
                None => self.no_pre.push(a.id),
            }
        }
        for a in &self.inverted {
            for f in a.pre.iter() {
                self.inv_consumers[f.index()].push(a.id);
            }
        }
    }

    /// Marks facts never added or deleted by any action as static and moves
    /// them out of states, goals and dynamic preconditions.
    pub(crate) fn classify_static(&mut self) {
        let mut touched = FactSet::with_capacity(self.facts.len());
        for a in &self.actions {
            touched.union_with(&a.add);
            touched.union_with(&a.del);
        }
        let mut statics = FactSet::with_capacity(self.facts.len());
        for id in self.facts.ids() {
            let st = !touched.contains(id);
            self.facts.fact_mut(id).is_static = st;
            if st {
                statics.insert(id);
            }
        }
        for a in &mut self.actions {
            let mut moved = a.pre.clone();
            moved.intersect_with(&statics);
            a.pre.difference_with(&statics);
            a.pre_static.union_with(&moved);
        }
        let mut si = self.initial.facts.clone();
        si.intersect_with(&statics);
        self.static_init.union_with(&si);
        self.initial.facts.difference_with(&statics);
        let mut static_goals = self.goals.clone();
        static_goals.intersect_with(&statics);
        if !static_goals.is_subset(&self.static_init) {
            self.static_goal_unmet = true;
        }
        self.goals.difference_with(&statics);
    }

    pub fn plan_text(&self, plan: &[ActionId]) -> String {
        let mut s = String::new();
        for a in plan {
            s.push_str(&self.action(*a).signature());
            s.push('\n');
        }
        s
    }

    pub fn num_static(&self) -> usize {
        self.facts.iter().filter(|f| f.is_static).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(v: &[u32]) -> FactSet {
        v.iter().map(|&i| FactId(i)).collect()
    }

    fn act(pre: &[u32], add: &[u32], del: &[u32]) -> GroundAction {
        GroundAction {
            id: ActionId(0),
            name: "a".into(),
            args: vec![],
            pre: fs(pre),
            pre_static: FactSet::new(),
            add: fs(add),
            del: fs(del),
            soft_pre: FactSet::new(),
            resource_use: vec![],
        }
    }

    #[test]
    fn invert_by_substitution() {
        // p=0, q=1, r=2
        let a = act(&[0, 1], &[2], &[1]);
        let b = invert(&a);
        assert_eq!(b.pre, fs(&[0, 2]));
        assert_eq!(b.del, fs(&[2]));
        assert_eq!(b.add, fs(&[1]));
        assert_eq!(invert(&b), a);
    }

    #[test]
    fn apply_and_undo() {
        let a = act(&[0, 1], &[2], &[1]);
        let s = State::new(fs(&[0, 1, 5]), vec![]);
        let t = apply(&s, &a).unwrap();
        assert_eq!(t.facts, fs(&[0, 2, 5]));
        assert_eq!(apply(&t, &invert(&a)).unwrap().facts, s.facts);
        assert!(apply(&t, &a).is_err());
    }

    #[test]
    fn soft_preconditions_and_resources() {
        let mut a = act(&[0], &[2], &[3]);
        a.soft_pre = fs(&[3]);
        a.resource_use = vec![(0, 1)];
        let s = State::new(fs(&[0]), vec![1]);
        assert!(applicable(&s, &a));
        let t = apply(&s, &a).unwrap();
        assert_eq!(t.resources, vec![0]);
        let mut with_soft = s.clone();
        with_soft.facts.insert(FactId(3));
        assert_eq!(apply(&with_soft, &a).unwrap().facts, fs(&[0, 2]));
        assert!(!applicable(&State::new(fs(&[0]), vec![0]), &a));
        assert!(applicable(&State::new(FactSet::new(), vec![]), &act(&[], &[1], &[])));
    }
}
