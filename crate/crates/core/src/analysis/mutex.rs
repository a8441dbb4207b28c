use crate::bitset::FactSet;
use crate::ground::{FactId, GroundProblem};

/// Symmetric, irreflexive binary mutex relation over dynamic facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MutexTable {
    rows: Vec<FactSet>,
    /// Number of planning-graph levels until level-off.
    pub levels: usize,
}

impl MutexTable {
    pub fn is_mutex(&self, p: FactId, q: FactId) -> bool {
        self.rows.get(p.index()).is_some_and(|r| r.contains(q))
    }

    pub fn row(&self, p: FactId) -> &FactSet {
        static EMPTY: FactSet = FactSet::new();
        self.rows.get(p.index()).unwrap_or(&EMPTY)
    }

    /// True if `p` is mutex with some member of `set`.
    pub fn mutex_with_any(&self, p: FactId, set: &FactSet) -> bool {
        self.row(p).intersects(set)
    }

    /// Number of unordered mutex pairs.
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(FactSet::len).sum::<usize>() / 2
    }

    pub fn pairs(&self) -> impl Iterator<Item = (FactId, FactId)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| {
            let p = FactId(i as u32);
            r.iter().filter(move |&q| q > p).map(move |q| (p, q))
        })
    }
}

/// Planning-graph leveling from the initial state until the fact layer and its
/// mutex pairs repeat. Noops are included; soft preconditions and resources are
/// ignored.
pub fn compute_mutexes(gp: &GroundProblem) -> MutexTable {
    let n = gp.facts.len();
    let dynamic = gp.dynamic_facts();
    let mut layer = gp.initial.facts.clone();
    let mut rows: Vec<FactSet> = vec![FactSet::new(); n];
    let mut levels = 0;
    loop {
        levels += 1;
        let mp = |pre: &FactSet, rows: &[FactSet]| {
            let mut m = FactSet::new();
            for p in pre.iter() {
                m.union_with(&rows[p.index()]);
            }
            m
        };
        let mut acts = Vec::new();
        let mut mps = Vec::new();
        for a in &gp.actions {
            if !a.pre.is_subset(&layer) {
                continue;
            }
            let m = mp(&a.pre, &rows);
            if m.intersects(&a.pre) {
                continue;
            }
            acts.push(a);
            mps.push(m);
        }
        let mutex = |i: usize, j: usize| {
            let (a, b) = (acts[i], acts[j]);
            a.del.intersects(&b.add)
                || b.del.intersects(&a.add)
                || a.del.intersects(&b.pre)
                || b.del.intersects(&a.pre)
                || mps[i].intersects(&b.pre)
        };
        let mut next = layer.clone();
        for a in &acts {
            next.union_with(&a.add);
        }
        // Facts compatible with each action: its own adds, adds of non-mutex
        // actions, and facts whose noop it does not clash with.
        let mut compat: Vec<FactSet> = Vec::with_capacity(acts.len());
        for i in 0..acts.len() {
            let mut c = acts[i].add.clone();
            for j in 0..acts.len() {
                if i != j && !mutex(i, j) {
                    c.union_with(&acts[j].add);
                }
            }
            let mut keep = layer.clone();
            keep.difference_with(&acts[i].del);
            keep.difference_with(&mps[i]);
            c.union_with(&keep);
            compat.push(c);
        }
        let mut new_rows: Vec<FactSet> = vec![FactSet::new(); n];
        let mut ok = vec![FactSet::new(); n];
        for p in layer.iter() {
            let mut c = layer.clone();
            c.difference_with(&rows[p.index()]);
            for (j, b) in acts.iter().enumerate() {
                if !b.del.contains(p) && !mps[j].contains(p) {
                    c.union_with(&b.add);
                }
            }
            ok[p.index()] = c;
        }
        for (i, a) in acts.iter().enumerate() {
            for p in a.add.iter() {
                ok[p.index()].union_with(&compat[i]);
            }
        }
        for p in next.iter() {
            let mut r = next.clone();
            r.difference_with(&ok[p.index()]);
            r.remove(p);
            new_rows[p.index()] = r;
        }
        // Keep the relation symmetric.
        for p in next.iter() {
            let row = new_rows[p.index()].clone();
            for q in row.iter() {
                if !new_rows[q.index()].contains(p) {
                    new_rows[p.index()].remove(q);
                }
            }
        }
        let stable = next == layer && new_rows == rows;
        layer = next;
        rows = new_rows;
        if stable {
            break;
        }
    }
    for f in dynamic.iter() {
        if !layer.contains(f) {
            let mut r = dynamic.clone();
            r.remove(f);
            rows[f.index()] = r;
            for q in dynamic.iter() {
                if q != f {
                    rows[q.index()].insert(f);
                }
            }
        }
    }
    MutexTable { rows, levels }
}
