use std::collections::BTreeSet;

use super::{ground_with, GroundConfig, GroundError};
use crate::pddl::{DomainDef, ProblemDef};

/// Objects removed by each elimination pass, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EliminationReport {
    pub passes: Vec<Vec<String>>,
}

impl EliminationReport {
    pub fn removed(&self) -> Vec<String> {
        self.passes.iter().flatten().cloned().collect()
    }
}

/// Removes objects that occur in no unsatisfied goal and whose every
/// precondition occurrence is matched by an occurrence in all effects of the
/// same ground action, repeating until no further object qualifies. Domain
/// constants and declared resources are kept.
pub fn eliminate_irrelevant_objects(
    domain: &DomainDef,
    problem: &ProblemDef,
) -> Result<(DomainDef, ProblemDef, EliminationReport), GroundError> {
    eliminate_with(domain, problem, &GroundConfig::default())
}

pub fn eliminate_with(
    domain: &DomainDef,
    problem: &ProblemDef,
    cfg: &GroundConfig,
) -> Result<(DomainDef, ProblemDef, EliminationReport), GroundError> {
    let mut p = problem.clone();
    let mut report = EliminationReport::default();
    loop {
        let gp = ground_with(domain, &p, cfg)?;
        let mut keep: BTreeSet<&str> = BTreeSet::new();
        for g in &p.goals {
            if !p.init.contains(g) {
                keep.extend(g.args.iter().map(String::as_str));
            }
        }
        for a in &gp.actions {
            let mut effect_objs: Option<BTreeSet<&str>> = None;
            for f in a.add.iter().chain(a.del.iter()) {
                let args: BTreeSet<&str> = gp.facts.fact(f).args.iter().map(String::as_str).collect();
                effect_objs = Some(match effect_objs {
                    None => args,
                    Some(e) => e.intersection(&args).copied().collect(),
                });
            }
            let in_all = effect_objs.unwrap_or_default();
            let no_effects = a.add.is_empty() && a.del.is_empty();
            for f in a.pre.iter().chain(a.pre_static.iter()) {
                for o in &gp.facts.fact(f).args {
                    if !no_effects && !in_all.contains(o.as_str()) {
                        keep.insert(o.as_str());
                    }
                }
            }
        }
        let removed: Vec<String> = p
            .objects
            .iter()
            .filter(|o| {
                !keep.contains(o.as_str())
                    && !domain.constants.contains(o)
                    && !p.resources.contains(o)
                    && !domain.resources.contains(o)
            })
            .cloned()
            .collect();
        if removed.is_empty() {
            break;
        }
        let gone = |args: &[String]| args.iter().any(|a| removed.contains(a));
        p.objects.retain(|o| !removed.contains(o));
        p.init.retain(|a| !gone(&a.args));
        p.goals.retain(|a| !gone(&a.args));
        report.passes.push(removed);
    }
    Ok((domain.clone(), p, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem_in};

    const PAINT: &str = "(define (domain paint) (:requirements :strips)
      (:predicates (pkg ?p) (color ?c) (brush ?b) (have ?b) (paint ?p ?c) (at ?p ?l) (road ?a ?b))
      (:action get :parameters (?b) :precondition (brush ?b) :effect (have ?b))
      (:action leave :parameters (?b) :precondition (have ?b) :effect (not (have ?b)))
      (:action paint :parameters (?p ?c ?b)
        :precondition (and (pkg ?p) (color ?c) (have ?b)) :effect (paint ?p ?c))
      (:action push :parameters (?p ?a ?b)
        :precondition (and (pkg ?p) (at ?p ?a) (road ?a ?b)) :effect (and (at ?p ?b) (not (at ?p ?a)))))";

    #[test]
    fn colors_then_brushes() {
        let d = parse_domain(PAINT).unwrap();
        let p = parse_problem_in(
            "(define (problem p) (:domain paint) (:objects p1 red blue b1 l1 l2)
              (:init (pkg p1) (color red) (color blue) (brush b1) (at p1 l1) (road l1 l2))
              (:goal (at p1 l2)))",
            Some(&d),
        )
        .unwrap();
        let (_, reduced, report) = eliminate_irrelevant_objects(&d, &p).unwrap();
        assert_eq!(report.passes, vec![vec!["red".to_string(), "blue".into()], vec!["b1".into()]]);
        assert_eq!(reduced.objects, vec!["p1", "l1", "l2"]);
    }

    #[test]
    fn satisfied_goal_objects_go() {
        let d = parse_domain(PAINT).unwrap();
        let p = parse_problem_in(
            "(define (problem p) (:domain paint) (:objects p1 p2 l1 l2)
              (:init (pkg p1) (pkg p2) (at p1 l1) (at p2 l2) (road l1 l2))
              (:goal (and (at p1 l2) (at p2 l2))))",
            Some(&d),
        )
        .unwrap();
        let (_, reduced, report) = eliminate_irrelevant_objects(&d, &p).unwrap();
        // p2 only occurs in `push` with itself in every effect, and its goal holds already.
        assert_eq!(report.removed(), vec!["p2"]);
        assert_eq!(reduced.goals.len(), 1);
    }
}
