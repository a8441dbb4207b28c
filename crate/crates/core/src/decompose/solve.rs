use std::time::Instant;

use super::Decomposition;
use crate::bitset::FactSet;
use crate::ground::{ActionId, GroundProblem, State};
use crate::pddl::{DomainDef, GroundAtom, ProblemDef};
use crate::pipeline::{solve_within, translate, PipelineConfig, Status};
use crate::search::{validate, SearchStats};

/// How a problem was split, level by level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionTrace {
    /// Remaining cutoff when this level was entered.
    pub cutoff: u32,
    pub subproblems: Vec<SubproblemTrace>,
    /// A subproblem failed and the undecomposed problem was solved instead.
    pub fell_back: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubproblemTrace {
    pub goals: Vec<String>,
    pub plan_length: Option<usize>,
    pub nested: Option<DecompositionTrace>,
}

impl DecompositionTrace {
    /// Nesting depth: 1 for a single level of subproblems.
    pub fn depth(&self) -> usize {
        1 + self
            .subproblems
            .iter()
            .filter_map(|s| s.nested.as_ref())
            .map(DecompositionTrace::depth)
            .max()
            .unwrap_or(0)
    }
}

fn atoms(gp: &GroundProblem, facts: &FactSet, skip: impl Fn(&str) -> bool) -> Vec<GroundAtom> {
    facts
        .iter()
        .map(|f| gp.facts.fact(f))
        .filter(|f| !skip(&f.predicate))
        .map(|f| GroundAtom::new(f.predicate.clone(), f.args.clone()))
        .collect()
}

/// The problem of reaching `goals` from `state`, both over `plain` facts.
fn subproblem(problem: &ProblemDef, plain: &GroundProblem, state: &State, goals: Vec<GroundAtom>, k: usize) -> ProblemDef {
    let mut init = atoms(plain, &plain.static_init, |_| false);
    init.extend(atoms(plain, &state.facts, |_| false));
    let amounts = plain
        .resources
        .iter()
        .cloned()
        .zip(state.resources.iter().copied())
        .collect();
    ProblemDef {
        name: format!("{}-sub{}", problem.name, k + 1),
        domain: problem.domain.clone(),
        objects: problem.objects.clone(),
        resources: problem.resources.clone(),
        init,
        amounts,
        goals,
    }
}

/// Solves the intermediate states in order, each from the end state of the
/// previous plan, recursing with one less cutoff level. Any failure makes
/// the caller fall back to the undecomposed problem.
pub fn solve_decomposed(
    domain: &DomainDef,
    problem: &ProblemDef,
    plain: &GroundProblem,
    gp: &GroundProblem,
    dec: &Decomposition,
    cfg: &PipelineConfig,
    deadline: Option<Instant>,
) -> (Option<(Vec<ActionId>, SearchStats)>, DecompositionTrace) {
    let mut trace = DecompositionTrace {
        cutoff: cfg.cutoff,
        ..Default::default()
    };
    let sub_cfg = PipelineConfig {
        cutoff: cfg.cutoff - 1,
        ..cfg.clone()
    };
    let mut state = plain.initial.clone();
    let mut plan = Vec::new();
    let mut stats = SearchStats::default();
    for (k, target) in dec.states.iter().enumerate() {
        let goals = atoms(gp, &target.facts, |p| p.starts_with("not_"));
        let sub = subproblem(problem, plain, &state, goals.clone(), k);
        let names = goals.iter().map(|g| g.to_string()).collect();
        let report = match solve_within(domain, &sub, &sub_cfg, deadline) {
            Ok(r) => r,
            Err(_) => {
                trace.fell_back = true;
                return (None, trace);
            }
        };
        stats.absorb(&report.stats);
        let solved = report.status == Status::Solved;
        let sub_plan = report.plan.clone().unwrap_or_default();
        trace.subproblems.push(SubproblemTrace {
            goals: names,
            plan_length: solved.then_some(sub_plan.len()),
            nested: report.decomposition.clone(),
        });
        if !solved {
            trace.fell_back = true;
            return (None, trace);
        }
        let sub_gp = match crate::ground::ground_with(domain, &sub, &cfg.grounding) {
            Ok(g) => g,
            Err(_) => {
                trace.fell_back = true;
                return (None, trace);
            }
        };
        let steps = translate(&sub_gp, plain, &sub_plan);
        match validate(&steps, plain, &state, &FactSet::new()) {
            Ok(next) => state = next,
            Err(_) => {
                trace.fell_back = true;
                return (None, trace);
            }
        }
        plan.extend(steps);
    }
    if !plain.is_goal(&state) {
        trace.fell_back = true;
        return (None, trace);
    }
    (Some((plan, stats)), trace)
}
