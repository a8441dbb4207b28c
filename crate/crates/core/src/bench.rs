//! Benchmark runner writing one CSV row per (domain, problem) run.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::pddl::{parse_domain, parse_problem_in};
use crate::pipeline::{solve, PipelineConfig, Status};

pub const SCHEMA_VERSION: u32 = 1;

pub const HEADER: [&str; 14] = [
    "schema_version",
    "domain",
    "problem",
    "config",
    "config_digest",
    "status",
    "solved",
    "length",
    "wall_ms",
    "expanded",
    "evaluated",
    "grg_ms",
    "mutex_ms",
    "error",
];

/// Columns holding wall-clock measurements.
pub const TIME_COLUMNS: [&str; 3] = ["wall_ms", "grg_ms", "mutex_ms"];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub domain: String,
    pub problem: String,
    pub config: String,
    pub config_digest: String,
    pub status: String,
    pub solved: bool,
    pub length: Option<usize>,
    pub wall_ms: f64,
    pub expanded: u64,
    pub evaluated: u64,
    pub grg_ms: f64,
    pub mutex_ms: f64,
    pub error: String,
}

impl BenchRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.domain.clone(),
            self.problem.clone(),
            self.config.clone(),
            self.config_digest.clone(),
            self.status.clone(),
            self.solved.to_string(),
            self.length.map(|l| l.to_string()).unwrap_or_default(),
            format!("{:.3}", self.wall_ms),
            self.expanded.to_string(),
            self.evaluated.to_string(),
            format!("{:.3}", self.grg_ms),
            format!("{:.3}", self.mutex_ms),
            self.error.clone(),
        ]
    }
}

/// A domain file and one of its problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub domain: PathBuf,
    pub problem: PathBuf,
}

fn pddl_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "pddl"))
        .collect();
    v.sort();
    Ok(v)
}

/// Every directory holding a `domain.pddl` (the suite root or its direct
/// subdirectories) contributes one job per other `.pddl` file, in path order.
pub fn discover(suite: &Path) -> std::io::Result<Vec<Job>> {
    let mut dirs = vec![suite.to_path_buf()];
    let mut subs: Vec<PathBuf> = fs::read_dir(suite)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subs.sort();
    dirs.extend(subs);
    let mut jobs = Vec::new();
    for d in dirs {
        let domain = d.join("domain.pddl");
        if !domain.is_file() {
            continue;
        }
        for p in pddl_files(&d)? {
            if p != domain {
                jobs.push(Job {
                    domain: domain.clone(),
                    problem: p,
                });
            }
        }
    }
    Ok(jobs)
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn run_job(job: &Job, cfg: &PipelineConfig) -> BenchRow {
    let domain_name = job
        .domain
        .parent()
        .and_then(|p| p.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let problem_name = job
        .problem
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut row = BenchRow {
        domain: domain_name,
        problem: problem_name,
        config: cfg.describe(),
        config_digest: cfg.digest(),
        status: "error".into(),
        solved: false,
        length: None,
        wall_ms: 0.0,
        expanded: 0,
        evaluated: 0,
        grg_ms: 0.0,
        mutex_ms: 0.0,
        error: String::new(),
    };
    let result = (|| -> Result<_, String> {
        let dt = fs::read_to_string(&job.domain).map_err(|e| e.to_string())?;
        let pt = fs::read_to_string(&job.problem).map_err(|e| e.to_string())?;
        let d = parse_domain(&dt).map_err(|e| e.to_string())?;
        let p = parse_problem_in(&pt, Some(&d)).map_err(|e| e.to_string())?;
        solve(&d, &p, cfg).map_err(|e| e.to_string())
    })();
    match result {
        Ok(r) => {
            row.status = match r.status {
                Status::Solved => "solved",
                Status::Unsolvable => "unsolvable",
                Status::LimitHit => "limit",
            }
            .into();
            row.solved = r.status == Status::Solved;
            row.length = r.plan.as_ref().map(Vec::len);
            row.wall_ms = ms(r.wall);
            row.expanded = r.stats.expanded;
            row.evaluated = r.stats.evaluated;
            row.grg_ms = ms(r.stage("grg"));
            row.mutex_ms = ms(r.stage("mutex"));
        }
        Err(e) => row.error = e,
    }
    row
}

/// Runs `jobs` on `threads` workers, writing rows in job order as soon as
/// every earlier row is done. Returns the rows.
pub fn run<W: Write + Send>(
    jobs: &[Job],
    cfg: &PipelineConfig,
    threads: usize,
    out: W,
) -> Result<Vec<BenchRow>, csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    writer.flush()?;
    let state = Mutex::new((writer, vec![None::<BenchRow>; jobs.len()], 0usize));
    let next = AtomicUsize::new(0);
    let error: Mutex<Option<csv::Error>> = Mutex::new(None);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= jobs.len() {
            break;
        }
        let row = run_job(&jobs[i], cfg);
        let mut guard = state.lock().expect("bench state");
        let (writer, rows, written) = &mut *guard;
        rows[i] = Some(row);
        while *written < rows.len() {
            let Some(r) = &rows[*written] else { break };
            if let Err(e) = writer.write_record(r.record()).and_then(|_| Ok(writer.flush()?)) {
                error.lock().expect("bench error").get_or_insert(e);
            }
            *written += 1;
        }
    };
    std::thread::scope(|s| {
        for _ in 1..threads.max(1) {
            s.spawn(work);
        }
        work();
    });
    if let Some(e) = error.into_inner().expect("bench error") {
        return Err(e);
    }
    let (_, rows, _) = state.into_inner().expect("bench state");
    Ok(rows.into_iter().map(|r| r.expect("every job ran")).collect())
}
