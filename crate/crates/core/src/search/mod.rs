//! Forward state-space search and plan validation.

mod best_first;
mod ehc;

pub use best_first::{best_first, best_first_from};
pub use ehc::enforced_hill_climb;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::bitset::FactSet;
use crate::ground::{applicable, apply_unchecked, ActionId, GroundProblem, State};

pub const DEFAULT_EHC_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SearchLimits {
    pub nodes: Option<u64>,
    pub time: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// `None` orders the open list by `h` alone; `Some(w)` by `g + w·h`.
    pub weight: Option<f64>,
    pub ehc_depth: usize,
    pub limits: SearchLimits,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            weight: None,
            ehc_depth: DEFAULT_EHC_DEPTH,
            limits: SearchLimits::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub evaluated: u64,
    pub elapsed: Duration,
    /// Hill-climbing gave up and best-first search produced the result.
    pub restarted: bool,
    /// Expansions of a state that had been expanded before. Always zero.
    pub reexpanded: u64,
}

impl SearchStats {
    pub(crate) fn absorb(&mut self, other: &SearchStats) {
        self.expanded += other.expanded;
        self.evaluated += other.evaluated;
        self.reexpanded += other.reexpanded;
        self.elapsed += other.elapsed;
        self.restarted |= other.restarted;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<ActionId>,
    pub stats: SearchStats,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Solved(Plan),
    Unsolvable(SearchStats),
    LimitHit(SearchStats),
}

impl SearchOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SearchOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    pub fn into_plan(self) -> Option<Plan> {
        match self {
            SearchOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Solved(p) => &p.stats,
            SearchOutcome::Unsolvable(s) | SearchOutcome::LimitHit(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationFailure {
    #[error("step {step}: action not applicable")]
    Inapplicable { step: usize },
    #[error("plan ends without reaching {} goal fact(s)", missing.len())]
    GoalsUnmet { missing: FactSet },
}

impl ValidationFailure {
    /// Index of the failing step; `plan.len()` when only the goals are unmet.
    pub fn index(&self, plan_len: usize) -> usize {
        match self {
            ValidationFailure::Inapplicable { step } => *step,
            ValidationFailure::GoalsUnmet { .. } => plan_len,
        }
    }
}

/// Executes `plan` from `from`, requiring every step to be applicable and
/// `goals` to hold at the end. Returns the final state.
pub fn validate(
    plan: &[ActionId],
    gp: &GroundProblem,
    from: &State,
    goals: &FactSet,
) -> Result<State, ValidationFailure> {
    let mut s = from.clone();
    for (step, &a) in plan.iter().enumerate() {
        let act = gp.action(a);
        if !applicable(&s, act) {
            return Err(ValidationFailure::Inapplicable { step });
        }
        s = apply_unchecked(&s, act);
    }
    if goals.is_subset(&s.facts) {
        Ok(s)
    } else {
        let mut missing = goals.clone();
        missing.difference_with(&s.facts);
        Err(ValidationFailure::GoalsUnmet { missing })
    }
}

/// Plan file body: one action per line followed by the statistics comment.
pub fn format_plan(gp: &GroundProblem, plan: &Plan) -> String {
    let mut out = gp.plan_text(&plan.actions);
    out.push_str(&format!(
        "; expanded={} evaluated={} time_ms={} length={}\n",
        plan.stats.expanded,
        plan.stats.evaluated,
        plan.stats.elapsed.as_millis(),
        plan.len()
    ));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: unknown action `{text}`")]
pub struct PlanParseError {
    pub line: usize,
    pub text: String,
}

/// Reads a sequential plan. `;` starts a comment and an optional `N:` step
/// prefix is ignored.
pub fn parse_plan(text: &str, gp: &GroundProblem) -> Result<Vec<ActionId>, PlanParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut line = raw.split(';').next().unwrap_or("").trim();
        if let Some((prefix, rest)) = line.split_once(':') {
            if prefix.trim().chars().all(|c| c.is_ascii_digit()) {
                line = rest.trim();
            }
        }
        if line.is_empty() {
            continue;
        }
        let id = gp.find_action(line).ok_or_else(|| PlanParseError {
            line: i + 1,
            text: line.to_string(),
        })?;
        out.push(id);
    }
    Ok(out)
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expanded={} evaluated={} time_ms={}",
            self.expanded,
            self.evaluated,
            self.elapsed.as_millis()
        )
    }
}
