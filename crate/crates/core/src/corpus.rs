//! Bundled benchmark problems and small instance generators.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pddl::{parse_domain, parse_problem_in, DomainDef, ParseError, ProblemDef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub suite: String,
    pub name: String,
    pub domain: String,
    pub problem: String,
}

impl Instance {
    pub fn new(suite: &str, name: &str, domain: &str, problem: String) -> Self {
        Instance {
            suite: suite.into(),
            name: name.into(),
            domain: domain.into(),
            problem,
        }
    }

    pub fn parse(&self) -> Result<(DomainDef, ProblemDef), ParseError> {
        let d = parse_domain(&self.domain)?;
        let p = parse_problem_in(&self.problem, Some(&d))?;
        Ok((d, p))
    }
}

macro_rules! bench {
    ($suite:literal, $file:literal) => {
        include_str!(concat!("../benchmarks/", $suite, "/", $file))
    };
}

pub const BLOCKS3: &str = bench!("blocks3", "domain.pddl");
pub const BLOCKS4: &str = bench!("blocks4", "domain.pddl");
pub const GRID3: &str = bench!("grid3", "domain.pddl");
pub const GRID4: &str = bench!("grid4", "domain.pddl");
pub const GRIPPER: &str = bench!("gripper", "domain.pddl");
pub const LOGISTICS: &str = bench!("logistics", "domain.pddl");
pub const COLORED_LOGISTICS: &str = bench!("colored-logistics", "domain.pddl");
pub const ELEVATOR: &str = bench!("elevator", "domain.pddl");
pub const MYSTERY_ATOMS: &str = bench!("mystery-atoms", "domain.pddl");
pub const MYSTERY_NUMERIC: &str = bench!("mystery-numeric", "domain.pddl");
pub const MYSTERY_SIMPLE: &str = bench!("mystery-simple", "domain.pddl");
pub const MOVIE: &str = bench!("movie", "domain.pddl");
pub const HANOI: &str = bench!("hanoi", "domain.pddl");
pub const EIGHT_PUZZLE: &str = bench!("8puzzle", "domain.pddl");
pub const PLATEAU: &str = bench!("plateau", "domain.pddl");

const FILES: &[(&str, &str, &str, &str)] = &[
    ("blocks3", "sussman", BLOCKS3, bench!("blocks3", "sussman.pddl")),
    ("blocks3", "tower4", BLOCKS3, bench!("blocks3", "tower4.pddl")),
    ("blocks4", "p5", BLOCKS4, bench!("blocks4", "p5.pddl")),
    ("grid3", "fig", GRID3, bench!("grid3", "fig.pddl")),
    ("grid4", "fig", GRID4, bench!("grid4", "fig.pddl")),
    ("gripper", "p4", GRIPPER, bench!("gripper", "p4.pddl")),
    ("logistics", "logistics-a", LOGISTICS, bench!("logistics", "logistics-a.pddl")),
    ("colored-logistics", "p22", COLORED_LOGISTICS, bench!("colored-logistics", "p22.pddl")),
    ("elevator", "p4-3", ELEVATOR, bench!("elevator", "p4-3.pddl")),
    ("mystery-atoms", "mysty-x-1", MYSTERY_ATOMS, bench!("mystery-atoms", "mysty-x-1.pddl")),
    ("mystery-numeric", "mysty-x-1", MYSTERY_NUMERIC, bench!("mystery-numeric", "mysty-x-1.pddl")),
    ("mystery-simple", "mysty-x-1", MYSTERY_SIMPLE, bench!("mystery-simple", "mysty-x-1.pddl")),
    ("movie", "p3", MOVIE, bench!("movie", "p3.pddl")),
    ("hanoi", "p3", HANOI, bench!("hanoi", "p3.pddl")),
    ("8puzzle", "p4", EIGHT_PUZZLE, bench!("8puzzle", "p4.pddl")),
    ("plateau", "p", PLATEAU, bench!("plateau", "p.pddl")),
];

/// Every problem shipped under `benchmarks/`.
pub fn bundled() -> Vec<Instance> {
    FILES
        .iter()
        .map(|&(suite, name, d, p)| Instance::new(suite, name, d, p.to_string()))
        .collect()
}

pub fn get(suite: &str, name: &str) -> Option<Instance> {
    bundled().into_iter().find(|i| i.suite == suite && i.name == name)
}

fn atoms(out: &mut String, atoms: &[String]) {
    for chunk in atoms.chunks(6) {
        let _ = writeln!(out, "    {}", chunk.join(" "));
    }
}

fn problem(name: &str, domain: &str, objects: &[String], init: &[String], goal: &[String]) -> String {
    let mut s = format!("(define (problem {name})\n  (:domain {domain})\n  (:objects {})\n  (:init\n", objects.join(" "));
    atoms(&mut s, init);
    s.push_str("  )\n  (:goal (and\n");
    atoms(&mut s, goal);
    s.push_str("  )))\n");
    s
}

/// Stacks of block indices, bottom first.
pub type Towers = Vec<Vec<usize>>;

fn block(i: usize) -> String {
    format!("b{}", i + 1)
}

/// Three-operator blocks world: `init` and `goal` list towers bottom first.
pub fn blocks3(name: &str, n: usize, init: &Towers, goal: &Towers) -> Instance {
    let objects: Vec<String> = (0..n).map(block).collect();
    let mut facts: Vec<String> = objects.iter().map(|b| format!("(block {b})")).collect();
    for x in &objects {
        for y in &objects {
            if x != y {
                facts.push(format!("(neq {x} {y})"));
            }
        }
    }
    let tower_atoms = |towers: &Towers, clear: bool| {
        let mut v = Vec::new();
        for t in towers {
            for (k, &b) in t.iter().enumerate() {
                let below = if k == 0 { "table".to_string() } else { block(t[k - 1]) };
                v.push(format!("(on {} {below})", block(b)));
            }
            if clear {
                if let Some(&top) = t.last() {
                    v.push(format!("(clear {})", block(top)));
                }
            }
        }
        v
    };
    facts.extend(tower_atoms(init, true));
    let goals = tower_atoms(goal, false);
    Instance::new("blocks3", name, BLOCKS3, problem(name, "blocks3", &objects, &facts, &goals))
}

/// A random arrangement of `n` blocks.
pub fn random_towers(n: usize, rng: &mut impl Rng) -> Towers {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut towers: Towers = Vec::new();
    for b in order {
        if towers.is_empty() || rng.gen_bool(0.4) {
            towers.push(vec![b]);
        } else {
            let k = rng.gen_range(0..towers.len());
            towers[k].push(b);
        }
    }
    towers
}

pub fn blocks3_random(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = random_towers(n, &mut rng);
    let goal = random_towers(n, &mut rng);
    blocks3(&format!("blocks{n}-s{seed}"), n, &init, &goal)
}

/// All balls start in `rooma` and must reach `roomb`.
pub fn gripper(balls: usize) -> Instance {
    let mut objects: Vec<String> = ["rooma", "roomb", "left", "right"].map(String::from).to_vec();
    let names: Vec<String> = (1..=balls).map(|i| format!("ball{i}")).collect();
    objects.extend(names.iter().cloned());
    let mut init: Vec<String> = [
        "(room rooma)",
        "(room roomb)",
        "(gripper left)",
        "(gripper right)",
        "(at-robby rooma)",
        "(free left)",
        "(free right)",
    ]
    .map(String::from)
    .to_vec();
    for b in &names {
        init.push(format!("(ball {b})"));
        init.push(format!("(at {b} rooma)"));
    }
    let goal: Vec<String> = names.iter().map(|b| format!("(at {b} roomb)")).collect();
    let name = format!("gripper-{balls}");
    Instance::new("gripper", &name, GRIPPER, problem(&name, "gripper", &objects, &init, &goal))
}

pub type Cell = (usize, usize);

fn node((x, y): Cell) -> String {
    format!("n{x}_{y}")
}

fn grid_cells(w: usize, h: usize) -> (Vec<String>, Vec<String>) {
    let mut nodes = Vec::new();
    let mut conn = Vec::new();
    for x in 0..w {
        for y in 0..h {
            nodes.push(node((x, y)));
            let mut nb = Vec::new();
            if x + 1 < w {
                nb.push((x + 1, y));
            }
            if x > 0 {
                nb.push((x - 1, y));
            }
            if y + 1 < h {
                nb.push((x, y + 1));
            }
            if y > 0 {
                nb.push((x, y - 1));
            }
            for n in nb {
                conn.push(format!("(conn {} {})", node((x, y)), node(n)));
            }
        }
    }
    (nodes, conn)
}

/// One robot and one key on a `w`×`h` grid, in the single-carrier encoding.
pub fn grid3(name: &str, (w, h): Cell, robot: (Cell, Cell), key: (Cell, Cell)) -> Instance {
    let (nodes, conn) = grid_cells(w, h);
    let mut objects = vec!["r".to_string(), "k".to_string()];
    objects.extend(nodes);
    let mut init = vec![
        "(robot r)".to_string(),
        "(key k)".to_string(),
        format!("(at r {})", node(robot.0)),
        format!("(at k {})", node(key.0)),
    ];
    init.extend(conn);
    let goal = vec![format!("(at r {})", node(robot.1)), format!("(at k {})", node(key.1))];
    Instance::new("grid3", name, GRID3, problem(name, "grid3", &objects, &init, &goal))
}

/// Robots and keys with start and goal cells, in the XOR-annotated encoding.
/// A robot without a goal cell is left unconstrained.
pub fn grid4(name: &str, (w, h): Cell, robots: &[(Cell, Option<Cell>)], keys: &[(Cell, Cell)]) -> Instance {
    let (nodes, conn) = grid_cells(w, h);
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = Vec::new();
    for (i, (s, g)) in robots.iter().enumerate() {
        let r = format!("r{}", i + 1);
        init.push(format!("(robot {r})"));
        init.push(format!("(at {r} {})", node(*s)));
        if let Some(g) = g {
            goal.push(format!("(at {r} {})", node(*g)));
        }
        objects.push(r);
    }
    for (i, (s, g)) in keys.iter().enumerate() {
        let k = format!("k{}", i + 1);
        init.push(format!("(key {k})"));
        init.push(format!("(at {k} {})", node(*s)));
        goal.push(format!("(at {k} {})", node(*g)));
        objects.push(k);
    }
    objects.extend(nodes);
    init.extend(conn);
    Instance::new("grid4", name, GRID4, problem(name, "grid4", &objects, &init, &goal))
}

pub fn grid4_random(w: usize, h: usize, robots: usize, keys: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cell = || (rng.gen_range(0..w), rng.gen_range(0..h));
    let rs: Vec<(Cell, Option<Cell>)> = (0..robots).map(|_| (cell(), Some(cell()))).collect();
    let ks: Vec<(Cell, Cell)> = (0..keys).map(|_| (cell(), cell())).collect();
    grid4(&format!("grid{w}x{h}-s{seed}"), (w, h), &rs, &ks)
}

/// Trucks and packages on an undirected city graph.
pub fn mystery_simple(
    name: &str,
    cities: usize,
    edges: &[(usize, usize)],
    trucks: &[usize],
    packages: &[(usize, usize)],
) -> Instance {
    let city = |i: usize| format!("city{}", i + 1);
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = Vec::new();
    for (i, &c) in trucks.iter().enumerate() {
        let t = format!("truck{}", i + 1);
        init.push(format!("(truck {t})"));
        init.push(format!("(at {t} {})", city(c)));
        objects.push(t);
    }
    for (i, &(s, g)) in packages.iter().enumerate() {
        let p = format!("pkg{}", i + 1);
        init.push(format!("(package {p})"));
        init.push(format!("(at {p} {})", city(s)));
        goal.push(format!("(at {p} {})", city(g)));
        objects.push(p);
    }
    for c in 0..cities {
        objects.push(city(c));
        init.push(format!("(city {})", city(c)));
    }
    for &(a, b) in edges {
        init.push(format!("(adjacent_cities {} {})", city(a), city(b)));
        init.push(format!("(adjacent_cities {} {})", city(b), city(a)));
    }
    Instance::new("mystery-simple", name, MYSTERY_SIMPLE, problem(name, "mystery-simple", &objects, &init, &goal))
}

/// Passengers given as (origin, destination) floor pairs.
pub fn elevator(floors: usize, passengers: &[(usize, usize)]) -> Instance {
    let mut objects: Vec<String> = (0..floors).map(|f| format!("f{f}")).collect();
    let mut init = vec!["(lift-at f0)".to_string()];
    for i in 0..floors {
        init.push(format!("(floor f{i})"));
        for j in i + 1..floors {
            init.push(format!("(above f{i} f{j})"));
        }
    }
    let mut goal = Vec::new();
    for (i, &(o, d)) in passengers.iter().enumerate() {
        let p = format!("p{i}");
        init.push(format!("(passenger {p})"));
        init.push(format!("(origin {p} f{o})"));
        init.push(format!("(destin {p} f{d})"));
        goal.push(format!("(served {p})"));
        objects.push(p);
    }
    let name = format!("elevator-{floors}-{}", passengers.len());
    Instance::new("elevator", &name, ELEVATOR, problem(&name, "elevator", &objects, &init, &goal))
}

/// Two-city logistics with `colors` paint colors and `brushes` brushes that
/// no goal mentions.
pub fn colored_logistics(colors: usize, brushes: usize) -> Instance {
    let mut objects: Vec<String> = [
        "pkg1", "pkg2", "pgh_truck", "bos_truck", "plane1", "pgh", "bos", "pgh_po", "pgh_air", "bos_po",
        "bos_air",
    ]
    .map(String::from)
    .to_vec();
    let mut init: Vec<String> = [
        "(package pkg1)",
        "(package pkg2)",
        "(truck pgh_truck)",
        "(truck bos_truck)",
        "(airplane plane1)",
        "(city pgh)",
        "(city bos)",
        "(location pgh_po)",
        "(location pgh_air)",
        "(location bos_po)",
        "(location bos_air)",
        "(airport pgh_air)",
        "(airport bos_air)",
        "(in-city pgh_po pgh)",
        "(in-city pgh_air pgh)",
        "(in-city bos_po bos)",
        "(in-city bos_air bos)",
        "(at plane1 pgh_air)",
        "(at pgh_truck pgh_po)",
        "(at bos_truck bos_po)",
        "(at pkg1 pgh_po)",
        "(at pkg2 bos_po)",
    ]
    .map(String::from)
    .to_vec();
    for c in 1..=colors {
        objects.push(format!("color{c}"));
        init.push(format!("(color color{c})"));
    }
    for b in 1..=brushes {
        objects.push(format!("brush{b}"));
        init.push(format!("(brush brush{b})"));
    }
    let goal = vec!["(at pkg1 bos_po)".to_string(), "(at pkg2 pgh_po)".to_string()];
    let name = format!("colored-{colors}-{brushes}");
    Instance::new(
        "colored-logistics",
        &name,
        COLORED_LOGISTICS,
        problem(&name, "colored-logistics", &objects, &init, &goal),
    )
}

/// Twenty small instances with at most a few thousand reachable states,
/// some of them unsolvable.
pub fn tiny_instances() -> Vec<Instance> {
    let mut v = Vec::new();
    for (n, seed) in [(3, 1), (3, 2), (4, 3), (4, 4), (4, 5), (5, 6)] {
        v.push(blocks3_random(n, seed));
    }
    for balls in 1..=4 {
        v.push(gripper(balls));
    }
    v.push(grid3("grid2x2", (2, 2), ((0, 0), (1, 1)), ((1, 0), (0, 1))));
    v.push(grid3("grid2x3", (2, 3), ((0, 0), (1, 2)), ((1, 0), (0, 2))));
    v.push(grid3("grid3x3", (3, 3), ((0, 0), (2, 0)), ((0, 2), (2, 2))));
    v.push(grid4_random(3, 2, 1, 1, 11));
    v.push(grid4_random(3, 3, 1, 1, 12));
    v.push(mystery_simple("ms-line", 3, &[(0, 1), (1, 2)], &[0], &[(0, 2)]));
    v.push(mystery_simple("ms-two", 4, &[(0, 1), (1, 2), (2, 3)], &[0, 3], &[(1, 3), (2, 0)]));
    v.push(mystery_simple("ms-split", 4, &[(0, 1), (2, 3)], &[0], &[(0, 3)]));
    v.push(mystery_simple("ms-stranded", 3, &[(0, 1)], &[2], &[(0, 1)]));
    v.push(mystery_simple("ms-ring", 4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[0], &[(1, 3), (3, 1)]));
    v
}
