use proptest::prelude::*;

use grtkit::analysis::{compute_mutexes, enrich_domain};
use grtkit::bitset::FactSet;
use grtkit::corpus::{self, Instance};
use grtkit::decompose::{decompose, ground_xors, extract_sequence};
use grtkit::ground::{apply, apply_unchecked, eliminate_irrelevant_objects, ground, invert, GroundProblem, State};
use grtkit::heuristic::{aggregate, aggregate_detail, build_grg, GrgOptions, GrtEvaluator, DEFAULT_PENALTY, INF};
use grtkit::oracle::{reachable_states, shortest_plan, OracleResult};
use grtkit::pipeline::{prepare, solve, PipelineConfig, Status};
use grtkit::search::{best_first, validate, SearchConfig};

fn grounded(inst: &Instance) -> GroundProblem {
    let (d, p) = inst.parse().unwrap();
    ground(&d, &p).unwrap()
}

/// Follows `choices` through applicable actions, stopping at dead ends.
fn walk(gp: &GroundProblem, choices: &[usize]) -> Vec<State> {
    let mut s = gp.initial.clone();
    let mut out = vec![s.clone()];
    for &c in choices {
        let app = gp.applicable_actions(&s);
        if app.is_empty() {
            break;
        }
        s = apply_unchecked(&s, gp.action(app[c % app.len()]));
        out.push(s.clone());
    }
    out
}

fn tiny() -> impl Strategy<Value = Instance> {
    (0..corpus::tiny_instances().len()).prop_map(|i| corpus::tiny_instances().swap_remove(i))
}

fn walk_plan(gp: &GroundProblem, choices: &[usize]) -> Vec<grtkit::ground::ActionId> {
    let mut s = gp.initial.clone();
    let mut plan = Vec::new();
    for &c in choices {
        let app = gp.applicable_actions(&s);
        if app.is_empty() {
            break;
        }
        let a = app[c % app.len()];
        s = apply_unchecked(&s, gp.action(a));
        plan.push(a);
    }
    plan
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_undoes_application(inst in tiny(), choices in proptest::collection::vec(any::<usize>(), 0..12)) {
        let gp = grounded(&inst);
        for s in walk(&gp, &choices) {
            for id in gp.applicable_actions(&s) {
                let a = gp.action(id);
                if a.add.intersects(&s.facts) || !a.del.is_subset(&s.facts) {
                    continue;
                }
                let next = apply_unchecked(&s, a);
                let back = apply(&next, &invert(a)).expect("inverse applicable");
                prop_assert_eq!(&back.facts, &s.facts);
            }
        }
    }

    #[test]
    fn enrichment_preserves_plans(inst in tiny(), choices in proptest::collection::vec(any::<usize>(), 0..15)) {
        let gp = grounded(&inst);
        let mt = compute_mutexes(&gp);
        let (rich, _) = enrich_domain(&gp, &mt);
        let plan = walk_plan(&gp, &choices);
        let mut s = gp.initial.clone();
        let mut r = rich.initial.clone();
        let original: FactSet = gp.facts.ids().collect();
        for a in plan {
            s = apply(&s, gp.action(a)).unwrap();
            r = apply(&r, rich.action(a)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let mut restricted = r.facts.clone();
            restricted.intersect_with(&original);
            prop_assert_eq!(&restricted, &s.facts);
        }
    }

    #[test]
    fn aggregate_bounded_by_max_and_sum(inst in tiny(), choices in proptest::collection::vec(any::<usize>(), 0..10),
                                        mask in any::<u64>()) {
        let gp = grounded(&inst);
        let grg = build_grg(&gp, &gp.goals, GrgOptions::default(), None);
        let s = walk(&gp, &choices).pop().unwrap();
        let subset: FactSet = s.facts.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, f)| f).collect();
        let d: Vec<u32> = subset.iter().map(|f| grg.dist(f)).collect();
        let agg = aggregate(&subset, &grg);
        if d.iter().any(|&x| x == INF) {
            prop_assert_eq!(agg, INF);
        } else {
            let max = d.iter().copied().max().unwrap_or(0);
            let sum: u32 = d.iter().sum();
            prop_assert!(max <= agg && agg <= sum, "{max} <= {agg} <= {sum}");
        }
        prop_assert_eq!(aggregate_detail(&subset, &grg, Some(DEFAULT_PENALTY)).stalls, 0);
    }

    #[test]
    fn elimination_preserves_solvability(inst in tiny()) {
        let (d, p) = inst.parse().unwrap();
        let gp = ground(&d, &p).unwrap();
        let (rd, rp, _) = eliminate_irrelevant_objects(&d, &p).unwrap();
        let reduced = ground(&rd, &rp).unwrap();
        let full = shortest_plan(&gp, 200_000);
        let small = shortest_plan(&reduced, 200_000);
        prop_assert_eq!(matches!(full, OracleResult::Optimal(_)), matches!(small, OracleResult::Optimal(_)));
        if let OracleResult::Optimal(plan) = small {
            let translated: Vec<_> = plan.iter().map(|&a| gp.find_action(&reduced.action(a).signature()).unwrap()).collect();
            prop_assert!(validate(&translated, &gp, &gp.initial, &gp.goals).is_ok());
        }
    }

    #[test]
    fn random_grids_decompose_soundly(w in 2usize..5, h in 2usize..4, robots in 1usize..3, seed in 0u64..500) {
        let inst = corpus::grid4_random(w, h, robots, robots, seed);
        let (d, p) = inst.parse().unwrap();
        let cfg = PipelineConfig { time_limit: Some(std::time::Duration::from_secs(10)), ..PipelineConfig::default() };
        let prep = prepare(&d, &p, &cfg).unwrap();
        if let Ok(dec) = decompose(&d.xor_schemas, &prep.gp, &prep.grg) {
            prop_assert!(dec.graph.topological_order().is_ok());
            for seq in &dec.sequences {
                let x = &dec.xors[seq.xor];
                let (_, goal) = x.pair().unwrap();
                if let Some(&last) = seq.actions.last() {
                    prop_assert!(prep.gp.action(last).add.contains(goal));
                }
            }
        }
        let r = solve(&d, &p, &cfg).unwrap();
        let gp = ground(&d, &p).unwrap();
        match r.status {
            Status::Solved => prop_assert!(validate(r.plan.as_ref().unwrap(), &gp, &gp.initial, &gp.goals).is_ok()),
            Status::Unsolvable => prop_assert_eq!(shortest_plan(&gp, 500_000), OracleResult::Unsolvable),
            Status::LimitHit => {}
        }
    }
}

#[test]
fn static_facts_never_change() {
    let mut all = corpus::bundled();
    all.extend(corpus::tiny_instances());
    for inst in &all {
        let gp = grounded(inst);
        for a in &gp.actions {
            for f in a.add.iter().chain(a.del.iter()) {
                assert!(!gp.facts.fact(f).is_static, "{} in {}", gp.facts.name(f), a.signature());
            }
        }
    }
}

#[test]
fn reachable_facts_are_interned() {
    for inst in corpus::tiny_instances() {
        let gp = grounded(&inst);
        let states = reachable_states(&gp, 100_000).unwrap();
        for s in &states {
            assert!(s.facts.iter().all(|f| f.index() < gp.facts.len()));
            assert!(s.facts.iter().all(|f| !gp.facts.fact(f).is_static));
        }
    }
}

#[test]
fn goal_test_ignores_enhancement() {
    for inst in corpus::bundled() {
        let (d, p) = inst.parse().unwrap();
        let prep = prepare(&d, &p, &PipelineConfig::default()).unwrap();
        // Goals are the original ones, minus those elimination found already satisfied.
        let kept = prep.gp.facts.names(&prep.gp.goals);
        for g in prep.plain.goals.iter() {
            let name = prep.plain.facts.name(g);
            assert!(kept.contains(&name) || prep.plain.initial.facts.contains(g), "{}: {name}", inst.name);
        }
        assert!(kept.iter().all(|k| prep.plain.facts.names(&prep.plain.goals).contains(k)));
        assert!(prep.gp.goals.is_subset(&prep.goals));
        let at_goals = State::new(prep.gp.goals.clone(), prep.gp.initial.resources.clone());
        assert!(prep.gp.is_goal(&at_goals), "{}", inst.name);
    }
}

#[test]
fn regression_table_propositions() {
    let mut all = corpus::bundled();
    all.extend(corpus::tiny_instances());
    for inst in &all {
        let (d, p) = inst.parse().unwrap();
        let prep = prepare(&d, &p, &PipelineConfig::default()).unwrap();
        let (gp, grg) = (&prep.gp, &prep.grg);
        for f in gp.facts.ids() {
            let dp = grg.dist(f);
            if dp == INF {
                continue;
            }
            for q in grg.related(f).iter() {
                assert!(grg.dist(q) <= dp, "{}: rel {} of {}", inst.name, gp.facts.name(q), gp.facts.name(f));
                if grg.related(q).contains(f) && dp > 0 && grg.dist(q) > 0 {
                    assert_eq!(grg.achiever(f), grg.achiever(q), "{}", inst.name);
                }
            }
        }
        let again = prepare(&d, &p, &PipelineConfig::default()).unwrap();
        assert_eq!(again.grg.nodes, grg.nodes, "{}", inst.name);
    }
}

#[test]
fn best_first_never_reexpands() {
    for inst in corpus::tiny_instances() {
        let gp = grounded(&inst);
        let grg = build_grg(&gp, &gp.goals, GrgOptions::default(), None);
        let ev = GrtEvaluator { grg: &grg, penalty: DEFAULT_PENALTY };
        let out = best_first(&gp, &ev, &SearchConfig::default());
        assert_eq!(out.stats().reexpanded, 0, "{}", inst.name);
    }
}

#[test]
fn xor_membership_is_kept_by_actions() {
    let mut grounded_any = 0;
    for inst in corpus::tiny_instances().into_iter().filter(|i| i.suite == "grid4" || i.suite == "mystery-simple") {
        let (d, p) = inst.parse().unwrap();
        let gp = ground(&d, &p).unwrap();
        let xors = ground_xors(&d.xor_schemas, &gp);
        grounded_any += usize::from(!xors.is_empty());
        for s in reachable_states(&gp, 100_000).unwrap() {
            for x in &xors {
                let held = |st: &State| x.members.iter().filter(|&f| st.facts.contains(f)).count();
                if held(&s) != 1 {
                    continue;
                }
                for a in gp.applicable_actions(&s) {
                    assert_eq!(held(&apply_unchecked(&s, gp.action(a))), 1, "{} {}", inst.name, x.name);
                }
            }
        }
        let prep = prepare(&d, &p, &PipelineConfig::default()).unwrap();
        for x in ground_xors(&d.xor_schemas, &prep.gp).iter().filter(|x| x.pair().is_some()) {
            if let Ok(seq) = extract_sequence(x, &prep.gp, &prep.grg) {
                let goal = x.pair().unwrap().1;
                assert!(seq.actions.last().is_none_or(|&a| prep.gp.action(a).add.contains(goal)));
            }
        }
    }
    assert!(grounded_any >= 5);
}
