//! End-to-end solving: elimination, grounding, mutexes, enrichment, goal
//! completion, regression graph, optional decomposition, search and
//! validation against the untouched problem.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::analysis::{
    compute_mutexes, enhance_goals, enrich_domain, EnrichmentReport, GoalCompletion, GoalEnhancement, GreedySelector,
    MutexTable,
};
use crate::bitset::FactSet;
use crate::decompose::{decompose, solve_decomposed, DecompositionTrace};
use crate::ground::{eliminate_with, ground_with, ActionId, GroundConfig, GroundError, GroundProblem};
use crate::heuristic::{build_grg, Grg, GrgOptions, GrtEvaluator, DEFAULT_PENALTY};
use crate::pddl::{DomainDef, ProblemDef, XorSchema};
use crate::search::{
    best_first, enforced_hill_climb, validate, SearchConfig, SearchLimits, SearchOutcome, SearchStats,
    ValidationFailure, DEFAULT_EHC_DEPTH,
};

pub const SEED_ENV: &str = "GRTKIT_SEED";
pub const DEFAULT_CUTOFF: u32 = 2;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Hill-climbing, restarting with best-first search when stuck.
    #[default]
    Ehc,
    BestFirst,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Ehc => "ehc",
            Strategy::BestFirst => "bfs",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ehc" => Ok(Strategy::Ehc),
            "bfs" | "best-first" => Ok(Strategy::BestFirst),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub strategy: Strategy,
    /// `None` is greedy on `h`; `Some(w)` orders by `g + w·h`.
    pub weight: Option<f64>,
    pub goal_completion: GoalCompletion,
    pub enrichment: bool,
    pub elimination: bool,
    pub related_facts: bool,
    /// Overrides the domain's own XOR-constraints when set.
    pub xor: Option<Vec<XorSchema>>,
    /// Remaining decomposition depth; 0 disables decomposition.
    pub cutoff: u32,
    pub ehc_depth: usize,
    pub penalty: u32,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub seed: u64,
    pub grounding: GroundConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            strategy: Strategy::Ehc,
            weight: None,
            goal_completion: GoalCompletion::All,
            enrichment: true,
            elimination: true,
            related_facts: true,
            xor: None,
            cutoff: DEFAULT_CUTOFF,
            ehc_depth: DEFAULT_EHC_DEPTH,
            penalty: DEFAULT_PENALTY,
            time_limit: Some(DEFAULT_TIME_LIMIT),
            node_limit: None,
            seed: 0,
            grounding: GroundConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Defaults, with the seed taken from `GRTKIT_SEED` when it parses.
    pub fn from_env() -> Self {
        let mut cfg = PipelineConfig::default();
        if let Some(seed) = std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            cfg.seed = seed;
        }
        cfg
    }

    /// Every field in `key=value` form, separated by `;`.
    pub fn describe(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        format!(
            "strategy={};weight={};goals={};enrich={};eliminate={};related={};xor={};cutoff={};ehc_depth={};penalty={};time_limit_ms={};node_limit={};seed={}",
            self.strategy,
            opt(self.weight.map(|w| w.to_string())),
            self.goal_completion,
            self.enrichment,
            self.elimination,
            self.related_facts,
            self.xor.as_ref().map_or("domain".to_string(), |x| format!("{} schemas", x.len())),
            self.cutoff,
            self.ehc_depth,
            self.penalty,
            opt(self.time_limit.map(|t| t.as_millis().to_string())),
            opt(self.node_limit.map(|n| n.to_string())),
            self.seed
        )
    }

    /// 64-bit FNV-1a of [`describe`](Self::describe), in hex.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.describe().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("internal error: produced plan fails validation: {0}")]
    InvalidPlan(ValidationFailure),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    Unsolvable,
    LimitHit,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: Status,
    /// Plan over the problem as given, when solved.
    pub plan: Option<Vec<ActionId>>,
    pub stats: SearchStats,
    /// Stage names and durations, in execution order.
    pub stages: Vec<(&'static str, Duration)>,
    pub wall: Duration,
    pub eliminated: Vec<Vec<String>>,
    pub negations: usize,
    pub goals_added: usize,
    pub facts: usize,
    pub actions: usize,
    pub decomposition: Option<DecompositionTrace>,
}

impl SolveReport {
    pub fn stage(&self, name: &str) -> Duration {
        self.stages.iter().filter(|(n, _)| *n == name).map(|(_, d)| *d).sum()
    }
}

/// Lap timer whose laps partition the elapsed time.
pub(crate) struct Laps {
    start: Instant,
    last: Instant,
    pub(crate) laps: Vec<(&'static str, Duration)>,
}

impl Laps {
    pub(crate) fn new() -> Self {
        let now = Instant::now();
        Laps {
            start: now,
            last: now,
            laps: Vec::new(),
        }
    }

    pub(crate) fn lap(&mut self, name: &'static str) {
        let now = Instant::now();
        self.laps.push((name, now - self.last));
        self.last = now;
    }

    pub(crate) fn wall(&self) -> Duration {
        self.last - self.start
    }
}

/// Solves `problem`, always returning a plan for the problem as given.
pub fn solve(domain: &DomainDef, problem: &ProblemDef, cfg: &PipelineConfig) -> Result<SolveReport, PipelineError> {
    let deadline = cfg.time_limit.map(|t| Instant::now() + t);
    solve_within(domain, problem, cfg, deadline)
}

/// Everything computed before search.
pub struct Prepared {
    /// The problem as given.
    pub plain: GroundProblem,
    /// After elimination and enrichment.
    pub gp: GroundProblem,
    pub mutexes: MutexTable,
    pub enhancement: GoalEnhancement,
    /// Original goals plus completed goal facts.
    pub goals: FactSet,
    pub grg: Grg,
    pub eliminated: Vec<Vec<String>>,
    pub enrichment: EnrichmentReport,
}

/// Runs every stage up to and including the regression graph.
pub fn prepare(domain: &DomainDef, problem: &ProblemDef, cfg: &PipelineConfig) -> Result<Prepared, PipelineError> {
    prepare_timed(domain, problem, cfg, &mut Laps::new())
}

fn prepare_timed(
    domain: &DomainDef,
    problem: &ProblemDef,
    cfg: &PipelineConfig,
    laps: &mut Laps,
) -> Result<Prepared, PipelineError> {
    let plain = ground_with(domain, problem, &cfg.grounding)?;
    laps.lap("ground");
    let mut eliminated = Vec::new();
    let mut gp = if cfg.elimination {
        let (d2, p2, report) = eliminate_with(domain, problem, &cfg.grounding)?;
        eliminated = report.passes;
        let reduced = if eliminated.is_empty() {
            plain.clone()
        } else {
            ground_with(&d2, &p2, &cfg.grounding)?
        };
        laps.lap("eliminate");
        reduced
    } else {
        plain.clone()
    };
    let mut mutexes = compute_mutexes(&gp);
    laps.lap("mutex");
    let mut enrichment = EnrichmentReport::default();
    if cfg.enrichment {
        let (enriched, report) = enrich_domain(&gp, &mutexes);
        if !report.negations.is_empty() {
            gp = enriched;
            mutexes = compute_mutexes(&gp);
        }
        enrichment = report;
        laps.lap("enrich");
    }
    let mut enhancement = enhance_goals(cfg.goal_completion, &gp, &mutexes);
    let mut goals = gp.goals.clone();
    goals.union_with(&enhancement.added);
    laps.lap("enhance");
    let opts = GrgOptions {
        related_facts: cfg.related_facts,
        trace: false,
    };
    let mut selector =
        (cfg.goal_completion == GoalCompletion::Greedy).then(|| GreedySelector::new(&gp, &mutexes, cfg.seed));
    let grg = build_grg(&gp, &goals, opts, selector.as_mut());
    if let Some(sel) = selector {
        enhancement.added = sel.added;
        enhancement.rejected = sel.rejected;
        goals.union_with(&enhancement.added);
    }
    laps.lap("grg");
    Ok(Prepared {
        plain,
        gp,
        mutexes,
        enhancement,
        goals,
        grg,
        eliminated,
        enrichment,
    })
}

pub(crate) fn solve_within(
    domain: &DomainDef,
    problem: &ProblemDef,
    cfg: &PipelineConfig,
    deadline: Option<Instant>,
) -> Result<SolveReport, PipelineError> {
    let mut laps = Laps::new();
    let Prepared {
        plain,
        gp,
        enhancement,
        grg,
        eliminated,
        enrichment,
        ..
    } = prepare_timed(domain, problem, cfg, &mut laps)?;
    let negations = enrichment.negations.len();
    let goals_added = enhancement.added.len();

    let mut report = SolveReport {
        status: Status::Unsolvable,
        plan: None,
        stats: SearchStats::default(),
        stages: Vec::new(),
        wall: Duration::ZERO,
        eliminated,
        negations,
        goals_added,
        facts: gp.facts.len(),
        actions: gp.actions.len(),
        decomposition: None,
    };

    let schemas: &[XorSchema] = cfg.xor.as_deref().unwrap_or(&domain.xor_schemas);
    if cfg.cutoff > 0 && !schemas.is_empty() {
        if let Ok(dec) = decompose(schemas, &gp, &grg) {
            if dec.states.len() >= 2 {
                let (merged, trace) = solve_decomposed(domain, problem, &plain, &gp, &dec, cfg, deadline);
                report.decomposition = Some(trace);
                if let Some((plan, stats)) = merged {
                    report.stats = stats;
                    laps.lap("decompose");
                    return finish(report, &plain, plan, laps);
                }
            }
        }
        laps.lap("decompose");
    }

    let scfg = SearchConfig {
        weight: cfg.weight,
        ehc_depth: cfg.ehc_depth,
        limits: SearchLimits {
            nodes: cfg.node_limit,
            time: deadline.map(|d| d.saturating_duration_since(Instant::now())),
        },
    };
    let eval = GrtEvaluator {
        grg: &grg,
        penalty: cfg.penalty,
    };
    let outcome = match cfg.strategy {
        Strategy::Ehc => enforced_hill_climb(&gp, &eval, &scfg),
        Strategy::BestFirst => best_first(&gp, &eval, &scfg),
    };
    report.stats.absorb(outcome.stats());
    laps.lap("search");
    match outcome {
        SearchOutcome::Solved(p) => {
            let plan = translate(&gp, &plain, &p.actions);
            finish(report, &plain, plan, laps)
        }
        SearchOutcome::Unsolvable(_) => {
            report.status = Status::Unsolvable;
            report.stages = laps.laps.clone();
            report.wall = laps.wall();
            Ok(report)
        }
        SearchOutcome::LimitHit(_) => {
            report.status = Status::LimitHit;
            report.stages = laps.laps.clone();
            report.wall = laps.wall();
            Ok(report)
        }
    }
}

fn finish(
    mut report: SolveReport,
    plain: &GroundProblem,
    plan: Vec<ActionId>,
    mut laps: Laps,
) -> Result<SolveReport, PipelineError> {
    validate(&plan, plain, &plain.initial, &plain.goals).map_err(PipelineError::InvalidPlan)?;
    laps.lap("validate");
    report.status = Status::Solved;
    report.plan = Some(plan);
    report.stages = laps.laps.clone();
    report.wall = laps.wall();
    Ok(report)
}

/// Maps actions of a derived problem onto `target` by signature.
pub(crate) fn translate(from: &GroundProblem, target: &GroundProblem, plan: &[ActionId]) -> Vec<ActionId> {
    let index: HashMap<String, ActionId> = target.actions.iter().map(|a| (a.signature(), a.id)).collect();
    plan.iter()
        .map(|&a| {
            *index
                .get(&from.action(a).signature())
                .expect("derived problems only use actions of the original")
        })
        .collect()
}
