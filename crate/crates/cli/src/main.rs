use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use grtkit::analysis::{candidate_goal_facts, GoalCompletion};
use grtkit::bench;
use grtkit::decompose::decompose;
use grtkit::ground::ground;
use grtkit::heuristic::evaluate;
use grtkit::oracle::{shortest_plan, OracleResult};
use grtkit::pddl::{parse_domain, parse_problem_in, parse_xor_schemas_in, DomainDef, ProblemDef};
use grtkit::pipeline::{prepare, solve, PipelineConfig, Status, Strategy, SEED_ENV};
use grtkit::search::{format_plan, parse_plan, validate, Plan};

const EXIT_SOLVED: u8 = 0;
const EXIT_UNSOLVABLE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "grtkit", version, about = "Regression-table STRIPS planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Files {
    domain: PathBuf,
    problem: PathBuf,
}

#[derive(Args, Clone)]
struct Flags {
    /// Search strategy: ehc (falls back to bfs) or bfs.
    #[arg(long, default_value = "ehc")]
    strategy: Strategy,
    /// Order the open list by g + W*h instead of h alone.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long, default_value_t = grtkit::search::DEFAULT_EHC_DEPTH)]
    ehc_depth: usize,
    /// Seconds.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Cost charged per fact unreachable in regression.
    #[arg(long, default_value_t = grtkit::heuristic::DEFAULT_PENALTY)]
    penalty: u32,
    /// all, initial or greedy.
    #[arg(long, default_value = "all")]
    goal_completion: GoalCompletion,
    #[arg(long)]
    no_related_facts: bool,
    #[arg(long)]
    no_enrichment: bool,
    #[arg(long)]
    no_elimination: bool,
    /// XOR-constraint file replacing the domain's own constraints.
    #[arg(long)]
    xor: Option<PathBuf>,
    #[arg(long, default_value_t = grtkit::pipeline::DEFAULT_CUTOFF)]
    cutoff: u32,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and print the plan.
    Solve {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        flags: Flags,
        /// Write the plan here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every problem of a suite directory and write CSV.
    Bench {
        suite: PathBuf,
        #[command(flatten)]
        flags: Flags,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Print ground facts and actions.
    Ground {
        #[command(flatten)]
        files: Files,
        /// List every fact and action.
        #[arg(long)]
        list: bool,
    },
    /// Print mutexes, goal completion, enrichment and elimination results.
    Analyze {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        flags: Flags,
    },
    /// Print the regression table and the initial state's estimate.
    Heuristic {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        flags: Flags,
    },
    /// Print ground XOR-constraints, sequences, ordering graph and states.
    Decompose {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        flags: Flags,
    },
    /// Check a plan file.
    Validate {
        #[command(flatten)]
        files: Files,
        plan: PathBuf,
    },
    /// Exact shortest plan length by breadth-first search.
    Oracle {
        #[command(flatten)]
        files: Files,
        /// Maximum number of generated states.
        #[arg(long, default_value_t = 1_000_000)]
        bound: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(files: &Files) -> Result<(DomainDef, ProblemDef)> {
    let dt = read(&files.domain)?;
    let pt = read(&files.problem)?;
    let d = parse_domain(&dt).with_context(|| files.domain.display().to_string())?;
    let p = parse_problem_in(&pt, Some(&d)).with_context(|| files.problem.display().to_string())?;
    Ok((d, p))
}

fn config(flags: &Flags, domain: &DomainDef) -> Result<PipelineConfig> {
    let xor = match &flags.xor {
        Some(path) => {
            let text = read(path)?;
            Some(parse_xor_schemas_in(&text, Some(domain)).with_context(|| path.display().to_string())?)
        }
        None => None,
    };
    Ok(PipelineConfig {
        strategy: flags.strategy,
        weight: flags.weight,
        goal_completion: flags.goal_completion,
        enrichment: !flags.no_enrichment,
        elimination: !flags.no_elimination,
        related_facts: !flags.no_related_facts,
        xor,
        cutoff: flags.cutoff,
        ehc_depth: flags.ehc_depth,
        penalty: flags.penalty,
        time_limit: Some(Duration::from_secs_f64(flags.time_limit.max(0.0))),
        node_limit: flags.node_limit,
        seed: flags.seed,
        ..PipelineConfig::default()
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { files, flags, output } => {
            let (d, p) = load(&files)?;
            let cfg = config(&flags, &d)?;
            let report = solve(&d, &p, &cfg)?;
            let code = match report.status {
                Status::Solved => {
                    let gp = ground(&d, &p)?;
                    let plan = Plan {
                        actions: report.plan.clone().unwrap_or_default(),
                        stats: report.stats.clone(),
                    };
                    emit(&output, &format_plan(&gp, &plan))?;
                    EXIT_SOLVED
                }
                Status::Unsolvable => {
                    println!("; unsolvable {}", report.stats);
                    EXIT_UNSOLVABLE
                }
                Status::LimitHit => {
                    println!("; limit hit {}", report.stats);
                    EXIT_LIMIT
                }
            };
            let stages: Vec<String> = report
                .stages
                .iter()
                .map(|(n, t)| format!("{n}={:.3}", t.as_secs_f64() * 1000.0))
                .collect();
            eprintln!("; stages_ms {} wall={:.3}", stages.join(" "), report.wall.as_secs_f64() * 1000.0);
            Ok(code)
        }
        Command::Bench {
            suite,
            flags,
            output,
            threads,
        } => {
            let jobs = bench::discover(&suite).with_context(|| suite.display().to_string())?;
            let cfg = config(&flags, &DomainDef::default())?;
            let rows = match &output {
                Some(path) => bench::run(&jobs, &cfg, threads, fs::File::create(path)?)?,
                None => bench::run(&jobs, &cfg, threads, std::io::stdout())?,
            };
            eprintln!("; {} runs, {} solved", rows.len(), rows.iter().filter(|r| r.solved).count());
            Ok(EXIT_SOLVED)
        }
        Command::Ground { files, list } => {
            let (d, p) = load(&files)?;
            let gp = ground(&d, &p)?;
            println!(
                "facts={} static={} actions={} resources={}",
                gp.facts.len(),
                gp.num_static(),
                gp.actions.len(),
                gp.resources.len()
            );
            if list {
                for f in gp.facts.iter() {
                    println!("fact {}{}", f, if f.is_static { " static" } else { "" });
                }
                for a in &gp.actions {
                    println!("action {}", a.signature());
                }
            }
            Ok(EXIT_SOLVED)
        }
        Command::Analyze { files, flags } => {
            let (d, p) = load(&files)?;
            let cfg = config(&flags, &d)?;
            let prep = prepare(&d, &p, &cfg)?;
            for (i, pass) in prep.eliminated.iter().enumerate() {
                println!("eliminated pass {}: {}", i + 1, pass.join(" "));
            }
            println!("mutex pairs: {}", prep.mutexes.pair_count());
            for (f, nf) in &prep.enrichment.negations {
                println!("enriched {} -> {}", prep.gp.facts.name(*f), prep.gp.facts.name(*nf));
            }
            let candidates = candidate_goal_facts(&prep.gp, &prep.mutexes);
            println!("candidates: {}", prep.gp.facts.names(&candidates).join(" "));
            println!(
                "goal completion ({}): {}",
                prep.enhancement.method,
                prep.gp.facts.names(&prep.enhancement.added).join(" ")
            );
            Ok(EXIT_SOLVED)
        }
        Command::Heuristic { files, flags } => {
            let (d, p) = load(&files)?;
            let cfg = config(&flags, &d)?;
            let prep = prepare(&d, &p, &cfg)?;
            print!("{}", prep.grg.dump(&prep.gp));
            println!("h(initial)={}", evaluate(&prep.gp.initial, &prep.grg, cfg.penalty));
            Ok(EXIT_SOLVED)
        }
        Command::Decompose { files, flags } => {
            let (d, p) = load(&files)?;
            let cfg = config(&flags, &d)?;
            let prep = prepare(&d, &p, &cfg)?;
            let schemas = cfg.xor.as_deref().unwrap_or(&d.xor_schemas);
            let dec = decompose(schemas, &prep.gp, &prep.grg)?;
            print!("{}", dec.render(&prep.gp));
            Ok(EXIT_SOLVED)
        }
        Command::Validate { files, plan } => {
            let (d, p) = load(&files)?;
            let gp = ground(&d, &p)?;
            let text = read(&plan)?;
            let steps = parse_plan(&text, &gp)?;
            if gp.static_goal_unmet {
                println!("invalid: a static goal fact is false");
                return Ok(EXIT_UNSOLVABLE);
            }
            match validate(&steps, &gp, &gp.initial, &gp.goals) {
                Ok(_) => {
                    println!("valid length={}", steps.len());
                    Ok(EXIT_SOLVED)
                }
                Err(e) => {
                    println!("invalid at {}: {e}", e.index(steps.len()));
                    Ok(EXIT_UNSOLVABLE)
                }
            }
        }
        Command::Oracle { files, bound } => {
            let (d, p) = load(&files)?;
            let gp = ground(&d, &p)?;
            match shortest_plan(&gp, bound) {
                OracleResult::Optimal(plan) => {
                    println!("optimal length={}", plan.len());
                    print!("{}", gp.plan_text(&plan));
                    Ok(EXIT_SOLVED)
                }
                OracleResult::Unsolvable => {
                    println!("unsolvable");
                    Ok(EXIT_UNSOLVABLE)
                }
                OracleResult::BoundHit => {
                    println!("bound hit");
                    Ok(EXIT_LIMIT)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_SOLVED });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
