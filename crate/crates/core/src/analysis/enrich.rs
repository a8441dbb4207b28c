use super::MutexTable;
use crate::ground::{FactId, GroundProblem};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnrichmentReport {
    /// `(f, not_f)` pairs.
    pub negations: Vec<(FactId, FactId)>,
    /// Distinct synthesized predicate names.
    pub predicates: Vec<String>,
}

/// Adds an explicit negation `not_f` for every dynamic fact `f` outside the
/// initial state that is mutex with no initial fact. `not_f` holds initially
/// and becomes a conditional precondition and a delete of every achiever of `f`.
pub fn enrich_domain(gp: &GroundProblem, mt: &MutexTable) -> (GroundProblem, EnrichmentReport) {
    let mut out = gp.clone();
    let mut report = EnrichmentReport::default();
    let triggers: Vec<FactId> = gp
        .dynamic_facts()
        .iter()
        .filter(|&f| !gp.initial.facts.contains(f) && !mt.mutex_with_any(f, &gp.initial.facts))
        .collect();
    for f in triggers {
        let fact = gp.facts.fact(f);
        let pred = format!("not_{}", fact.predicate);
        let nf = out.facts.intern(&pred, &fact.args.clone());
        out.initial.facts.insert(nf);
        for &a in &gp.achievers[f.index()] {
            let act = &mut out.actions[a.index()];
            act.soft_pre.insert(nf);
            act.del.insert(nf);
        }
        if !report.predicates.contains(&pred) {
            report.predicates.push(pred);
        }
        report.negations.push((f, nf));
    }
    out.reindex();
    (out, report)
}
