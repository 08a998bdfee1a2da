use std::collections::BTreeSet;

use cqdet::greenred::Color;
use cqdet::reductions::{compile_thue, qeta_ruleset, Roles, ThueSystem, Word};
use cqdet::spider::Ruleset;
use cqdet::swarm::{
    active_rewrites, check_structural, is_active, is_correct_word, run_swarm, word_set, Check, StructuralContext,
    Swarm, SwarmScheduler, Vertex,
};
use proptest::prelude::*;

fn equal_neighbors(ts: &ThueSystem, w: &[usize]) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for (a, b) in ts.equal_length() {
        for (from, to) in [(a, b), (b, a)] {
            for k in 0..w.len().saturating_sub(1) {
                if w[k..k + 2] == from[..] {
                    let mut v = w.to_vec();
                    v[k..k + 2].copy_from_slice(to);
                    out.insert(v);
                }
            }
        }
    }
    out
}

#[test]
fn correct_words_closed_under_equal_length_productions() {
    let ts = ThueSystem::fixture();
    let c = compile_thue(&ts).unwrap();
    let t = run_swarm(&c.q0, Swarm::green_full(), 2000, SwarmScheduler::Spouse);
    let words = word_set(&t.final_swarm, 6);
    let mut found = 0;
    for w in words.iter().filter(|w| is_correct_word(w, &ts.roles)) {
        for v in equal_neighbors(&ts, w) {
            assert!(words.contains(&v), "{w:?} is a word but its neighbor {v:?} is not");
            found += 1;
        }
    }
    assert!(found > 0);
    let r = ts.roles;
    assert!(words.contains(&vec![r.alpha, r.beta1, r.beta0, r.eta1]));
    assert!(words.contains(&vec![r.alpha, r.gamma, r.gamma_prime, r.eta1]));
}

fn rulesets() -> Vec<Ruleset> {
    vec![
        qeta_ruleset(16, &Roles::fixture()).unwrap(),
        compile_thue(&ThueSystem::fixture()).unwrap().q,
    ]
}

fn check_invariants(rules: &Ruleset, seed: u64, steps: usize) -> Result<(), TestCaseError> {
    let t = run_swarm(rules, Swarm::green_full(), steps, SwarmScheduler::random(seed));
    prop_assert!(t.violations.is_empty(), "{:?}", t.violations);
    let w = &t.final_swarm;
    prop_assert_eq!(&t.stage(t.steps.len()), w);
    for v in 0..w.vertex_count() as Vertex {
        prop_assert!(w.out_edges(v).is_empty() || w.in_edges(v).is_empty());
    }
    for e in w.edges() {
        let labels = w.labels_between(e.tail, e.antenna);
        prop_assert!(labels.len() <= 2);
        prop_assert!(labels.iter().all(|l| l.color == e.label.color));
    }
    for step in &t.steps {
        prop_assert_eq!(
            step.output_edges[0].label.color,
            step.input_edges[0].label.color.opposite()
        );
    }
    for c in &t.couples {
        prop_assert!(c.edges.iter().all(|&e| w.edge(e).label.color == Color::Red));
    }
    for input in active_rewrites(rules, w) {
        prop_assert!(is_active(rules, w, input));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_order_keeps_swarm_invariants(seed in any::<u64>(), which in 0usize..2, steps in 1usize..160) {
        check_invariants(&rulesets()[which], seed, steps)?;
    }

    #[test]
    fn qeta_structure_does_not_depend_on_order(seed in any::<u64>()) {
        let roles = Roles::fixture();
        let rules = qeta_ruleset(16, &roles).unwrap();
        let t = run_swarm(&rules, Swarm::green_full(), 300, SwarmScheduler::random(seed));
        let rep = check_structural(&t, &StructuralContext::new(roles).with_thue(ThueSystem::fixture()));
        for c in [Check::PathLengthOne, Check::AtMostTwo, Check::KnotDegree, Check::RedIffLower, Check::Dangerous, Check::NoGreenGamma] {
            prop_assert!(rep.passed(c), "{c}: {:?}", rep.violations);
        }
    }
}
