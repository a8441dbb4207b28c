use std::collections::{BTreeMap, BTreeSet};

use super::{DecomposeError, Subgoal, SubgoalKind, XorSequence};
use crate::bitset::FactSet;
use crate::ground::{FactId, GroundProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OgNode {
    Init,
    Goal,
    Subgoal(Subgoal),
}

/// Node 0 is the initial anchor and node 1 the goal anchor; subgoal `i` is
/// node `i + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingGraph {
    pub nodes: Vec<OgNode>,
    /// Strict `a` before `b` edges.
    pub edges: Vec<(usize, usize)>,
    /// Pairs that must be achieved together.
    pub same_time: Vec<(usize, usize)>,
    /// Representative node of each node's same-time group.
    group: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orders the subgoals: every subgoal sits between the anchors, type II
/// subgoals of one constraint follow their actions' order, the type I and
/// type II subgoals of one action are paired, and within one constraint type
/// I comes before type II.
pub fn build_ordering_graph(subgoals: Vec<Subgoal>, _sequences: &[XorSequence]) -> Result<OrderingGraph, DecomposeError> {
    let n = subgoals.len() + 2;
    let node = |i: usize| i + 2;
    let mut edges = BTreeSet::new();
    let mut same_time = BTreeSet::new();
    for i in 0..subgoals.len() {
        edges.insert((0, node(i)));
        edges.insert((node(i), 1));
    }
    let owners: BTreeSet<usize> = subgoals.iter().map(|s| s.owner).collect();
    for &x in &owners {
        let mut ii: Vec<usize> = (0..subgoals.len())
            .filter(|&i| subgoals[i].owner == x && subgoals[i].kind == SubgoalKind::II)
            .collect();
        ii.sort_by_key(|&i| (subgoals[i].sequence, subgoals[i].step, subgoals[i].fact));
        for w in ii.windows(2) {
            edges.insert((node(w[0]), node(w[1])));
        }
        for i in (0..subgoals.len()).filter(|&i| subgoals[i].owner == x && subgoals[i].kind == SubgoalKind::I) {
            for &j in &ii {
                edges.insert((node(i), node(j)));
            }
        }
    }
    for i in 0..subgoals.len() {
        for j in 0..subgoals.len() {
            let (a, b) = (&subgoals[i], &subgoals[j]);
            if a.kind == SubgoalKind::I && b.kind == SubgoalKind::II && a.action == b.action && a.sequence == b.sequence {
                same_time.insert((node(i), node(j)));
            }
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in &same_time {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let group: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut nodes = vec![OgNode::Init, OgNode::Goal];
    nodes.extend(subgoals.into_iter().map(OgNode::Subgoal));
    let og = OrderingGraph {
        nodes,
        edges: edges.into_iter().collect(),
        same_time: same_time.into_iter().collect(),
        group,
    };
    og.topological_order()?;
    Ok(og)
}

impl OrderingGraph {
    pub fn subgoal(&self, node: usize) -> Option<&Subgoal> {
        match &self.nodes[node] {
            OgNode::Subgoal(s) => Some(s),
            _ => None,
        }
    }

    pub fn subgoal_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        2..self.nodes.len()
    }

    /// Same-time groups in an order compatible with every strict edge.
    pub fn topological_order(&self) -> Result<Vec<usize>, DecomposeError> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            let (ga, gb) = (self.group[a], self.group[b]);
            if ga == gb {
                return Err(DecomposeError::CycleDetected);
            }
            succ[ga].push(gb);
            indeg[gb] += 1;
        }
        let reps: Vec<usize> = (0..n).filter(|&i| self.group[i] == i).collect();
        let mut ready: BTreeSet<usize> = reps.iter().copied().filter(|&r| indeg[r] == 0).collect();
        let mut order = Vec::new();
        while let Some(r) = ready.pop_first() {
            order.push(r);
            for &s in &succ[r] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        if order.len() == reps.len() {
            Ok(order)
        } else {
            Err(DecomposeError::CycleDetected)
        }
    }

    /// Nodes from which `node` is reachable along strict edges, across
    /// same-time groups.
    fn ancestors(&self, node: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.group[node]];
        let mut seen = BTreeSet::new();
        while let Some(g) = stack.pop() {
            for &(a, b) in &self.edges {
                if self.group[b] == g && seen.insert(self.group[a]) {
                    stack.push(self.group[a]);
                }
            }
        }
        for i in 0..self.nodes.len() {
            if seen.contains(&self.group[i]) && self.group[i] != self.group[node] {
                out.insert(i);
            }
        }
        out
    }

    fn partners(&self, node: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| i != node && self.group[i] == self.group[node])
            .collect()
    }

    pub fn render(&self, gp: &GroundProblem) -> String {
        let label = |i: usize| match &self.nodes[i] {
            OgNode::Init => "init".to_string(),
            OgNode::Goal => "goal".to_string(),
            OgNode::Subgoal(s) => format!("{}[{}]", gp.facts.name(s.fact), s.kind),
        };
        let mut s = String::new();
        for &(a, b) in &self.edges {
            s.push_str(&format!("{} -> {}\n", label(a), label(b)));
        }
        for &(a, b) in &self.same_time {
            s.push_str(&format!("{} = {}\n", label(a), label(b)));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateState {
    pub index: usize,
    pub facts: FactSet,
}

impl IntermediateState {
    pub fn render(&self, gp: &GroundProblem) -> String {
        format!("({})", gp.facts.names(&self.facts).join(" "))
    }
}

/// Packs subgoals into successive states, at most one fact per constraint
/// per state. A subgoal is eligible once every earlier subgoal of its own
/// constraint has been placed; it is placed together with its same-time
/// partners, all of whose constraints must still be free in the round.
/// Constraints are visited in id order and the lowest fact id wins. The
/// last state is the goal set; states already implied by the goals are
/// dropped.
pub fn extract_intermediate_states(og: &OrderingGraph, gp: &GroundProblem) -> Vec<IntermediateState> {
    let nodes: Vec<usize> = og.subgoal_nodes().collect();
    let mut inserted = vec![false; og.nodes.len()];
    let owner = |i: usize| og.subgoal(i).map(|s| s.owner).unwrap_or(usize::MAX);
    let fact = |i: usize| og.subgoal(i).map(|s| s.fact).expect("subgoal node");
    let ancestors: Vec<BTreeSet<usize>> = (0..og.nodes.len()).map(|i| og.ancestors(i)).collect();
    let blocked = |i: usize, inserted: &[bool]| {
        inserted[i] || ancestors[i].iter().any(|&a| a >= 2 && owner(a) == owner(i) && !inserted[a])
    };
    let mut owners: Vec<usize> = nodes.iter().map(|&i| owner(i)).collect();
    owners.sort_unstable();
    owners.dedup();
    let mut states: Vec<FactSet> = Vec::new();
    loop {
        let mut state = FactSet::new();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut placed = Vec::new();
        for &x in &owners {
            if used.contains(&x) {
                continue;
            }
            let mut cands: Vec<usize> = nodes
                .iter()
                .copied()
                .filter(|&i| owner(i) == x && !blocked(i, &inserted))
                .collect();
            cands.sort_by_key(|&i| (fact(i), i));
            for c in cands {
                let members: Vec<usize> = std::iter::once(c)
                    .chain(og.partners(c))
                    .filter(|&i| !inserted[i])
                    .collect();
                let mut slots: BTreeMap<usize, FactId> = BTreeMap::new();
                let mut ok = true;
                for &i in &members {
                    let free = !blocked(i, &inserted) && !used.contains(&owner(i));
                    let slot = *slots.entry(owner(i)).or_insert(fact(i));
                    if !free || slot != fact(i) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                for i in members {
                    used.insert(owner(i));
                    state.insert(fact(i));
                    placed.push(i);
                }
                break;
            }
        }
        if placed.is_empty() {
            break;
        }
        for i in placed {
            inserted[i] = true;
        }
        // Identical facts reached through several actions share a slot.
        for &i in &nodes {
            if !inserted[i] && state.contains(fact(i)) && !blocked(i, &inserted) {
                inserted[i] = true;
            }
        }
        states.push(state);
    }
    states.retain(|s| !s.is_subset(&gp.goals));
    states.push(gp.goals.clone());
    states
        .into_iter()
        .enumerate()
        .map(|(index, facts)| IntermediateState { index, facts })
        .collect()
}
