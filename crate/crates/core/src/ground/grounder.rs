use std::collections::{HashMap, HashSet, VecDeque};

use super::{ActionId, FactId, FactTable, GroundAction, GroundError, GroundProblem, State};
use crate::bitset::FactSet;
use crate::pddl::{Atom, DomainDef, ProblemDef, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundConfig {
    pub max_facts: usize,
    pub max_actions: usize,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig {
            max_facts: 2_000_000,
            max_actions: 4_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Var(usize),
    Obj(u32),
}

#[derive(Clone, Debug)]
struct Pattern {
    pred: u32,
    slots: Vec<Slot>,
}

struct Schema {
    name: String,
    nparams: usize,
    pre: Vec<Pattern>,
    add: Vec<Pattern>,
    del: Vec<Pattern>,
    soft: Vec<Pattern>,
    resources: Vec<(Slot, u32)>,
}

type Key = (u32, Vec<u32>);

struct Closure {
    n_objects: u32,
    /// Fact tuples in discovery order.
    tuples: Vec<Key>,
    ids: HashMap<Key, FactId>,
    by_pred: HashMap<u32, Vec<FactId>>,
    by_arg: HashMap<(u32, usize, u32), Vec<FactId>>,
}

impl Closure {
    fn unify(pattern: &Pattern, args: &[u32], binding: &mut [Option<u32>]) -> bool {
        if pattern.slots.len() != args.len() {
            return false;
        }
        let mut set = Vec::new();
        for (slot, &v) in pattern.slots.iter().zip(args) {
            let ok = match *slot {
                Slot::Obj(o) => o == v,
                Slot::Var(i) => match binding[i] {
                    Some(b) => b == v,
                    None => {
                        binding[i] = Some(v);
                        set.push(i);
                        true
                    }
                },
            };
            if !ok {
                for i in set {
                    binding[i] = None;
                }
                return false;
            }
        }
        true
    }

    fn candidates(&self, p: &Pattern, binding: &[Option<u32>]) -> &[FactId] {
        let mut best: Option<&Vec<FactId>> = self.by_pred.get(&p.pred);
        for (pos, slot) in p.slots.iter().enumerate() {
            let v = match *slot {
                Slot::Obj(o) => Some(o),
                Slot::Var(i) => binding[i],
            };
            if let Some(v) = v {
                let l = self.by_arg.get(&(p.pred, pos, v));
                match l {
                    None => return &[],
                    Some(l) if best.is_none_or(|b| l.len() < b.len()) => best = Some(l),
                    _ => {}
                }
            }
        }
        best.map_or(&[], |v| v.as_slice())
    }

    fn join(&self, s: &Schema, remaining: &mut Vec<usize>, binding: &mut Vec<Option<u32>>, out: &mut Vec<Vec<u32>>) {
        if remaining.is_empty() {
            self.complete(binding, 0, out);
            return;
        }
        let (k, _) = remaining
            .iter()
            .enumerate()
            .map(|(k, &j)| (k, self.candidates(&s.pre[j], binding).len()))
            .min_by_key(|&(_, n)| n)
            .unwrap();
        let j = remaining.swap_remove(k);
        let pattern = &s.pre[j];
        for &f in self.candidates(pattern, binding) {
            let mut b = binding.clone();
            if Self::unify(pattern, &self.tuples[f.index()].1, &mut b) {
                self.join(s, remaining, &mut b, out);
            }
        }
        remaining.push(j);
        let last = remaining.len() - 1;
        remaining.swap(k, last);
    }

    /// Parameters that no precondition mentions range over every object.
    fn complete(&self, binding: &mut Vec<Option<u32>>, from: usize, out: &mut Vec<Vec<u32>>) {
        match (from..binding.len()).find(|&i| binding[i].is_none()) {
            None => out.push(binding.iter().map(|b| b.unwrap()).collect()),
            Some(i) => {
                for o in 0..self.n_objects {
                    binding[i] = Some(o);
                    self.complete(binding, i + 1, out);
                }
                binding[i] = None;
            }
        }
    }

    fn record(&mut self, fact: FactId) {
        let (pred, args) = self.tuples[fact.index()].clone();
        self.by_pred.entry(pred).or_default().push(fact);
        for (pos, v) in args.into_iter().enumerate() {
            self.by_arg.entry((pred, pos, v)).or_default().push(fact);
        }
    }
}

fn instantiate(p: &Pattern, b: &[u32]) -> Key {
    (
        p.pred,
        p.slots
            .iter()
            .map(|s| match *s {
                Slot::Obj(o) => o,
                Slot::Var(i) => b[i],
            })
            .collect(),
    )
}

pub fn ground(domain: &DomainDef, problem: &ProblemDef) -> Result<GroundProblem, GroundError> {
    ground_with(domain, problem, &GroundConfig::default())
}

#[derive(Default)]
struct Names {
    list: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Names {
    fn id(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.ids.get(name) {
            return i;
        }
        self.list.push(name.to_string());
        self.ids.insert(name.to_string(), self.list.len() as u32 - 1);
        self.list.len() as u32 - 1
    }
}

fn pattern(a: &Atom, params: &[String], objects: &mut Names, preds: &mut Names) -> Pattern {
    Pattern {
        pred: preds.id(&a.predicate),
        slots: a.args.iter().map(|t| slot(t, params, objects)).collect(),
    }
}

fn slot(t: &Term, params: &[String], objects: &mut Names) -> Slot {
    match t {
        Term::Var(v) => Slot::Var(params.iter().position(|p| p == v).expect("checked by the parser")),
        Term::Const(c) => Slot::Obj(objects.id(c)),
        Term::Any => unreachable!("wildcards only occur in XOR constraints"),
    }
}

pub fn ground_with(domain: &DomainDef, problem: &ProblemDef, cfg: &GroundConfig) -> Result<GroundProblem, GroundError> {
    let mut objects = Names::default();
    for o in problem
        .objects
        .iter()
        .chain(&domain.constants)
        .chain(&problem.resources)
        .chain(&domain.resources)
    {
        objects.id(o);
    }
    let mut preds = Names::default();
    let mut resources: Vec<String> = Vec::new();
    for r in problem.resources.iter().chain(&domain.resources) {
        if !resources.contains(r) {
            resources.push(r.clone());
        }
    }
    let amounts: Vec<u32> = resources
        .iter()
        .map(|r| problem.amounts.get(r).copied().unwrap_or(0))
        .collect();

    let mut schemas = Vec::new();
    for s in &domain.schemas {
        let mut pats = |atoms: &[Atom]| -> Vec<Pattern> {
            atoms.iter().map(|a| pattern(a, &s.params, &mut objects, &mut preds)).collect()
        };
        let (pre, add, del, soft) = (pats(&s.pre), pats(&s.add), pats(&s.del), pats(&s.conditional_pre));
        let res = s
            .resource_use
            .iter()
            .map(|r| (slot(&r.resource, &s.params, &mut objects), r.amount))
            .collect();
        schemas.push(Schema {
            name: s.name.clone(),
            nparams: s.params.len(),
            pre,
            add,
            del,
            soft,
            resources: res,
        });
    }
    let resource_of_obj: HashMap<u32, usize> = resources
        .iter()
        .enumerate()
        .filter_map(|(i, r)| objects.ids.get(r).map(|&o| (o, i)))
        .collect();

    let mut queue = VecDeque::new();
    let mut init_keys = Vec::new();
    for a in &problem.init {
        let key: Key = (preds.id(&a.predicate), a.args.iter().map(|x| objects.id(x)).collect());
        init_keys.push(key);
    }
    let mut cl = Closure {
        n_objects: objects.list.len() as u32,
        tuples: Vec::new(),
        ids: HashMap::new(),
        by_pred: HashMap::new(),
        by_arg: HashMap::new(),
    };
    let mut init_ids = Vec::new();
    for key in init_keys {
        let next = FactId(cl.tuples.len() as u32);
        let id = *cl.ids.entry(key.clone()).or_insert_with(|| {
            cl.tuples.push(key);
            queue.push_back(next);
            next
        });
        init_ids.push(id);
    }

    let mut seen: HashSet<(usize, Vec<u32>)> = HashSet::new();
    let mut instances: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut pending: Vec<(usize, Vec<u32>)> = Vec::new();
    for (si, s) in schemas.iter().enumerate() {
        if s.pre.is_empty() {
            let mut out = Vec::new();
            cl.complete(&mut vec![None; s.nparams], 0, &mut out);
            pending.extend(out.into_iter().map(|b| (si, b)));
        }
    }
    loop {
        for (si, b) in pending.drain(..) {
            if !seen.insert((si, b.clone())) {
                continue;
            }
            let s = &schemas[si];
            let mut fits = true;
            for &(slot, k) in &s.resources {
                let o = match slot {
                    Slot::Obj(o) => o,
                    Slot::Var(i) => b[i],
                };
                match resource_of_obj.get(&o) {
                    Some(&r) => fits &= k <= amounts[r],
                    None => {
                        return Err(GroundError::UnknownResource {
                            name: objects.list[o as usize].clone(),
                        })
                    }
                }
            }
            if !fits {
                continue;
            }
            for p in &s.add {
                let key = instantiate(p, &b);
                if !cl.ids.contains_key(&key) {
                    let id = FactId(cl.tuples.len() as u32);
                    cl.ids.insert(key.clone(), id);
                    cl.tuples.push(key);
                    queue.push_back(id);
                    if cl.tuples.len() > cfg.max_facts {
                        return Err(GroundError::CapacityExceeded {
                            what: "fact",
                            limit: cfg.max_facts,
                        });
                    }
                }
            }
            instances.push((si, b));
            if instances.len() > cfg.max_actions {
                return Err(GroundError::CapacityExceeded {
                    what: "action",
                    limit: cfg.max_actions,
                });
            }
        }
        let Some(f) = queue.pop_front() else { break };
        cl.record(f);
        let (fp, fargs) = cl.tuples[f.index()].clone();
        for (si, s) in schemas.iter().enumerate() {
            for (j, p) in s.pre.iter().enumerate() {
                if p.pred != fp {
                    continue;
                }
                let mut binding = vec![None; s.nparams];
                if !Closure::unify(p, &fargs, &mut binding) {
                    continue;
                }
                let mut remaining: Vec<usize> = (0..s.pre.len()).filter(|&k| k != j).collect();
                let mut out = Vec::new();
                cl.join(s, &mut remaining, &mut binding, &mut out);
                pending.extend(out.into_iter().map(|b| (si, b)));
            }
        }
    }

    let mut facts = FactTable::default();
    let key_args = |k: &Key| -> Vec<String> { k.1.iter().map(|&o| objects.list[o as usize].clone()).collect() };
    for k in &cl.tuples {
        facts.intern(&preds.list[k.0 as usize], &key_args(k));
    }
    let mut goals = FactSet::new();
    for g in &problem.goals {
        goals.insert(facts.intern(&g.predicate, &g.args));
    }
    let lookup = |facts: &FactTable, k: &Key| facts.get(&preds.list[k.0 as usize], &key_args(k));

    let mut actions = Vec::with_capacity(instances.len());
    for (si, b) in &instances {
        let s = &schemas[*si];
        let set = |ps: &[Pattern]| -> FactSet {
            ps.iter()
                .filter_map(|p| lookup(&facts, &instantiate(p, b)))
                .collect()
        };
        let pre = set(&s.pre);
        let add = set(&s.add);
        let mut del = set(&s.del);
        del.difference_with(&add);
        let soft_pre = set(&s.soft);
        let resource_use = s
            .resources
            .iter()
            .map(|&(slot, k)| {
                let o = match slot {
                    Slot::Obj(o) => o,
                    Slot::Var(i) => b[i],
                };
                (resource_of_obj[&o], k)
            })
            .collect();
        actions.push(GroundAction {
            id: ActionId(actions.len() as u32),
            name: s.name.clone(),
            args: b.iter().map(|&o| objects.list[o as usize].clone()).collect(),
            pre,
            pre_static: FactSet::new(),
            add,
            del,
            soft_pre,
            resource_use,
        });
    }

    let mut gp = GroundProblem {
        facts,
        resources,
        actions,
        inverted: Vec::new(),
        initial: State::new(init_ids.into_iter().collect(), amounts),
        goals,
        static_goal_unmet: false,
        static_init: FactSet::new(),
        achievers: Vec::new(),
        consumers: Vec::new(),
        inv_consumers: Vec::new(),
        first_pre: Vec::new(),
        no_pre: Vec::new(),
    };
    gp.classify_static();
    gp.reindex();
    Ok(gp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem_in};

    fn load(d: &str, p: &str) -> GroundProblem {
        let d = parse_domain(d).unwrap();
        let p = parse_problem_in(p, Some(&d)).unwrap();
        ground(&d, &p).unwrap()
    }

    const LOG: &str = "(define (domain log) (:requirements :strips)
      (:predicates (truck ?t) (loc ?l) (in-city ?l ?c) (at ?x ?l))
      (:action drive :parameters (?t ?a ?b ?c)
        :precondition (and (truck ?t) (at ?t ?a) (in-city ?a ?c) (in-city ?b ?c))
        :effect (and (at ?t ?b) (not (at ?t ?a)))))";

    #[test]
    fn trucks_stay_in_their_city() {
        let gp = load(
            LOG,
            "(define (problem p) (:domain log) (:objects t1 a1 a2 b1 ca cb)
              (:init (truck t1) (at t1 a1) (in-city a1 ca) (in-city a2 ca) (in-city b1 cb))
              (:goal (at t1 a2)))",
        );
        assert!(gp.facts.find("(at t1 a2)").is_some());
        assert!(gp.facts.find("(at t1 b1)").is_none());
        assert!(gp.facts.fact(gp.facts.find("(truck t1)").unwrap()).is_static);
        assert_eq!(gp.dynamic_facts().len(), 2);
        // a1->a1, a1->a2, a2->a1, a2->a2; driving in place deletes nothing.
        assert_eq!(gp.actions.len(), 4);
        let stay = gp.find_action("(drive t1 a1 a1 ca)").unwrap();
        assert!(gp.action(stay).del.is_empty());
        for a in &gp.actions {
            for f in a.add.iter().chain(a.del.iter()) {
                assert!(!gp.facts.fact(f).is_static);
            }
            assert!(a.pre_static.is_subset(&gp.static_init));
        }
    }

    #[test]
    fn nothing_applicable() {
        let gp = load(
            LOG,
            "(define (problem p) (:domain log) (:objects t1 a1) (:init (at t1 a1)) (:goal (at t1 a1)))",
        );
        assert!(gp.actions.is_empty());
        // Untouched facts are static, so the state is empty and so are the goals.
        assert!(gp.initial.facts.is_empty());
        assert!(gp.goals.is_empty());
        assert!(!gp.static_goal_unmet);
    }

    #[test]
    fn unreached_goal_is_static_and_unmet() {
        let gp = load(
            LOG,
            "(define (problem p) (:domain log) (:objects t1 a1 b1 ca cb)
             (:init (truck t1) (at t1 a1) (in-city a1 ca) (in-city b1 cb)) (:goal (at t1 b1)))",
        );
        assert!(gp.static_goal_unmet);
        assert!(!gp.is_goal(&gp.initial));
    }

    #[test]
    fn resource_pruning() {
        let d = "(define (domain m) (:predicates (at ?t ?c) (adj ?a ?b) (fuel-of ?c ?r))
          (:action move :parameters (?t ?a ?b ?r)
            :precondition (and (at ?t ?a) (adj ?a ?b) (fuel-of ?a ?r))
            :effect (and (at ?t ?b) (not (at ?t ?a)))
            :resources (amount ?r 2)))";
        let gp = load(
            d,
            "(define (problem p) (:domain m) (:objects t c1 c2) (:resources r1 r2)
              (:init (at t c1) (adj c1 c2) (adj c2 c1) (fuel-of c1 r1) (fuel-of c2 r2) (amount r1 2) (amount r2 1))
              (:goal (at t c2)))",
        );
        assert_eq!(gp.actions.len(), 1);
        assert_eq!(gp.actions[0].resource_use, vec![(0, 2)]);
        assert_eq!(gp.initial.resources, vec![2, 1]);
        let s = gp.initial.clone();
        let t = super::super::apply(&s, &gp.actions[0]).unwrap();
        assert_eq!(t.resources, vec![0, 1]);
        assert!(gp.is_goal(&t));
    }

    #[test]
    fn capacity_ceiling() {
        let d = parse_domain(LOG).unwrap();
        let p = parse_problem_in(
            "(define (problem p) (:domain log) (:objects t1 a1 a2 ca)
              (:init (truck t1) (at t1 a1) (in-city a1 ca) (in-city a2 ca)) (:goal (at t1 a2)))",
            Some(&d),
        )
        .unwrap();
        let e = ground_with(&d, &p, &GroundConfig { max_facts: 100, max_actions: 2 }).unwrap_err();
        assert_eq!(e, GroundError::CapacityExceeded { what: "action", limit: 2 });
    }
}
