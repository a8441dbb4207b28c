use super::{Grg, INF};
use crate::bitset::FactSet;
use crate::ground::FactId;

/// Outcome of one aggregation, with loop diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Aggregation {
    pub cost: u32,
    pub iterations: u32,
    /// Iterations in which no fact was free of one-sided relatedness.
    pub stalls: u32,
}

/// Cost of achieving `facts` together; `INF` if any of them is unreachable.
pub fn aggregate(facts: &FactSet, grg: &Grg) -> u32 {
    aggregate_detail(facts, grg, None).cost
}

/// With `penalty`, unreachable facts add that amount instead of making the
/// result infinite.
pub fn aggregate_detail(facts: &FactSet, grg: &Grg, penalty: Option<u32>) -> Aggregation {
    let mut cost: u32 = 0;
    let mut m1: Vec<FactId> = Vec::with_capacity(facts.len());
    for f in facts.iter() {
        let d = grg.dist(f);
        if d == INF {
            match penalty {
                None => {
                    return Aggregation {
                        cost: INF,
                        iterations: 0,
                        stalls: 0,
                    }
                }
                Some(p) => cost = cost.saturating_add(p),
            }
        } else if d > 0 {
            m1.push(f);
        }
    }
    let mut out = Aggregation {
        cost,
        iterations: 0,
        stalls: 0,
    };
    if m1.is_empty() {
        return out;
    }
    if !grg.related_facts {
        for f in &m1 {
            out.cost = out.cost.saturating_add(grg.dist(*f));
        }
        out.iterations = 1;
        return out;
    }

    while !m1.is_empty() {
        out.iterations += 1;
        let set: FactSet = m1.iter().copied().collect();
        // rin[i]: members of M1 that are related to m1[i].
        let rin: Vec<FactSet> = m1
            .iter()
            .map(|&p| {
                let mut r = grg.related(p).clone();
                r.intersect_with(&set);
                r
            })
            .collect();
        let n = m1.len();
        let mut in_m2: Vec<bool> = (0..n)
            .map(|i| (0..n).all(|j| j == i || !rin[j].contains(m1[i]) || rin[i].contains(m1[j])))
            .collect();
        if !in_m2.iter().any(|&b| b) {
            out.stalls += 1;
            in_m2 = vec![true; n];
        }
        // Groups of mutually related M2 members; each adds its largest distance.
        let mut group = vec![usize::MAX; n];
        for i in 0..n {
            if !in_m2[i] || group[i] != usize::MAX {
                continue;
            }
            group[i] = i;
            let mut stack = vec![i];
            let mut best = grg.dist(m1[i]);
            while let Some(k) = stack.pop() {
                for j in 0..n {
                    if in_m2[j] && group[j] == usize::MAX && rin[k].contains(m1[j]) && rin[j].contains(m1[k]) {
                        group[j] = i;
                        best = best.max(grg.dist(m1[j]));
                        stack.push(j);
                    }
                }
            }
            out.cost = out.cost.saturating_add(best);
        }
        let mut covered = FactSet::new();
        for i in (0..n).filter(|&i| in_m2[i]) {
            covered.union_with(&rin[i]);
        }
        m1 = (0..n)
            .filter(|&i| !in_m2[i] && !covered.contains(m1[i]))
            .map(|i| m1[i])
            .collect();
    }
    out
}
