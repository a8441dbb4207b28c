use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grtkit"))
}

fn bench(suite: &str, file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/benchmarks").join(suite).join(file)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("GRTKIT_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TOY: &str = "(define (domain toy) (:requirements :strips)
  (:predicates (a) (b) (c))
  (:action ab :parameters () :precondition (a) :effect (and (b) (not (a)))))";

fn toy(dir: &Path, goal: &str) -> (PathBuf, PathBuf) {
    let d = dir.join("domain.pddl");
    let pr = dir.join("problem.pddl");
    fs::write(&d, TOY).unwrap();
    fs::write(&pr, format!("(define (problem t) (:domain toy) (:init (a)) (:goal {goal}))")).unwrap();
    (d, pr)
}

#[test]
fn sussman_solves_in_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.txt");
    let o = run(&[
        "solve",
        p(&bench("blocks3", "domain.pddl")),
        p(&bench("blocks3", "sussman.pddl")),
        "-o",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let plan = fs::read_to_string(&out).unwrap();
    let steps: Vec<_> = plan.lines().filter(|l| l.starts_with('(')).collect();
    assert_eq!(steps.len(), 3);

    let v = run(&[
        "validate",
        p(&bench("blocks3", "domain.pddl")),
        p(&bench("blocks3", "sussman.pddl")),
        p(&out),
    ]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("valid length=3"));
}

#[test]
fn satisfied_goals_give_empty_plan() {
    let dir = tempfile::tempdir().unwrap();
    let (d, pr) = toy(dir.path(), "(a)");
    let out = dir.path().join("plan.txt");
    let o = run(&["solve", p(&d), p(&pr), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let plan = fs::read_to_string(&out).unwrap();
    assert_eq!(plan.lines().filter(|l| l.starts_with('(')).count(), 0);
    assert!(plan.contains("length=0"));
}

#[test]
fn unreachable_goal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (d, pr) = toy(dir.path(), "(c)");
    assert_eq!(run(&["solve", p(&d), p(&pr)]).status.code(), Some(1));
    assert_eq!(run(&["solve", p(&d), p(&pr), "--strategy", "bfs"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", p(&d), p(&pr)]).status.code(), Some(1));
}

#[test]
fn node_limit_exits_two() {
    let o = run(&[
        "solve",
        p(&bench("hanoi", "domain.pddl")),
        p(&bench("hanoi", "p3.pddl")),
        "--strategy",
        "bfs",
        "--node-limit",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pddl");
    fs::write(&bad, "(define (domain").unwrap();
    assert_eq!(run(&["solve", p(&bad), p(&bad)]).status.code(), Some(3));
    assert_eq!(run(&["ground", p(&bad), p(&dir.path().join("missing"))]).status.code(), Some(3));
    assert_eq!(run(&["solve", p(&bad), p(&bad), "--strategy", "dfs"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn oracle_lengths() {
    let o = run(&["oracle", p(&bench("blocks3", "domain.pddl")), p(&bench("blocks3", "sussman.pddl"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("optimal length=3"));

    let dir = tempfile::tempdir().unwrap();
    let (d, pr) = toy(dir.path(), "(a)");
    assert!(stdout(&run(&["oracle", p(&d), p(&pr)])).starts_with("optimal length=0"));

    let o = run(&["oracle", p(&bench("hanoi", "domain.pddl")), p(&bench("hanoi", "p3.pddl")), "--bound", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_rejects_swapped_steps() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    fs::write(&plan, "(move-from-table b c)\n(move-to-table c b)\n(move-from-table a b)\n").unwrap();
    let o = run(&[
        "validate",
        p(&bench("blocks3", "domain.pddl")),
        p(&bench("blocks3", "sussman.pddl")),
        p(&plan),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid at 0"));
}

#[test]
fn inspection_subcommands() {
    let d = bench("grid3", "domain.pddl");
    let pr = bench("grid3", "fig.pddl");
    let g = run(&["ground", p(&d), p(&pr), "--list"]);
    assert_eq!(g.status.code(), Some(0));
    assert!(stdout(&g).lines().any(|l| l == "fact (at r n0_0)"));

    let h = run(&["heuristic", p(&d), p(&pr)]);
    assert!(stdout(&h).contains("h(initial)=10"));

    let e = run(&["analyze", p(&bench("elevator", "domain.pddl")), p(&bench("elevator", "p4-3.pddl"))]);
    assert!(stdout(&e).contains("-> (not_served p0)"));
    let off = run(&[
        "analyze",
        p(&bench("elevator", "domain.pddl")),
        p(&bench("elevator", "p4-3.pddl")),
        "--no-enrichment",
    ]);
    assert!(!stdout(&off).contains("enriched"));

    let x = run(&["decompose", p(&bench("grid4", "domain.pddl")), p(&bench("grid4", "fig.pddl"))]);
    assert_eq!(x.status.code(), Some(0));
    let text = stdout(&x);
    assert!(text.contains("; states"));
    assert!(text.contains("3: ((at r1 n0_0) (at r2 n0_3) (at k1 n1_1) (at k2 n1_3))"));
}

#[test]
fn xor_file_overrides_domain() {
    let dir = tempfile::tempdir().unwrap();
    let xor = dir.path().join("xor.pddl");
    fs::write(&xor, "((xor (at ?r *)) (robot ?r))").unwrap();
    let x = run(&[
        "decompose",
        p(&bench("grid4", "domain.pddl")),
        p(&bench("grid4", "fig.pddl")),
        "--xor",
        p(&xor),
    ]);
    assert_eq!(x.status.code(), Some(0));
    let text = stdout(&x);
    assert!(text.contains("xor r1:"));
    assert!(!text.contains("xor k1:"));
}

#[test]
fn bench_empty_dir_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let o = run(&["bench", p(dir.path()), "-o", p(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("schema_version,domain,problem"));
}

#[test]
fn bench_rows_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let suite = bench("blocks3", "");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(run(&["bench", p(&suite), "-o", p(&a), "--threads", "2"]).status.code(), Some(0));
    assert_eq!(run(&["bench", p(&suite), "-o", p(&b)]).status.code(), Some(0));
    let strip = |path: &Path| -> Vec<String> {
        let mut r = csv_lines(&fs::read_to_string(path).unwrap());
        for row in &mut r {
            // wall_ms, grg_ms, mutex_ms
            for i in [8, 11, 12] {
                row[i].clear();
            }
        }
        r.into_iter().map(|row| row.join(",")).collect()
    };
    let ra = strip(&a);
    assert_eq!(ra.len(), 3);
    assert_eq!(ra, strip(&b));
    assert!(ra[1..].iter().all(|r| r.contains(",solved,true,")));
}

fn csv_lines(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn seed_env_lands_in_config() {
    let suite = bench("blocks3", "");
    let o = bin().args(["bench", p(&suite)]).env("GRTKIT_SEED", "77").output().unwrap();
    assert!(stdout(&o).contains("seed=77"));
}
