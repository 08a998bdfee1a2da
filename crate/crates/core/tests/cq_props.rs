use std::sync::Arc;

use cqdet::chase::{active_triggers, run_chase, Scheduler, Verdict};
use cqdet::cq::{find_homomorphisms, Atom, ConjunctiveQuery, Homomorphism, Name, Signature, Structure, Term};
use cqdet::greenred::{colorize_structure, generate_tgds, Color, ColoredSignature};
use proptest::prelude::*;

fn sig() -> Arc<Signature> {
    Arc::new(
        Signature::new()
            .with_predicate("E", 2)
            .unwrap()
            .with_predicate("F", 2)
            .unwrap(),
    )
}

fn elem(i: usize) -> Term {
    Term::var(&format!("x{i}"))
}

type Edges = Vec<(bool, usize, usize)>;

fn edges(n: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Edges> {
    prop::collection::vec((any::<bool>(), 0..n, 0..n), len)
}

fn atom((f, a, b): (bool, usize, usize)) -> Atom {
    Atom::new(if f { "F" } else { "E" }, vec![elem(a), elem(b)])
}

fn structure(e: &Edges) -> Structure {
    let atoms: Vec<Atom> = e.iter().copied().map(atom).collect();
    Structure::from_atoms(sig(), &atoms).unwrap()
}

/// Every map from the source domain into the target domain that is a homomorphism.
fn brute_force(a: &Structure, b: &Structure) -> usize {
    let dom = a.domain();
    let img = b.domain();
    if img.is_empty() {
        return usize::from(dom.is_empty());
    }
    let mut count = 0;
    let total = img.len().pow(dom.len() as u32);
    for code in 0..total {
        let mut h = Homomorphism::new();
        let mut c = code;
        for t in dom {
            h.insert(t.clone(), img[c % img.len()].clone());
            c /= img.len();
        }
        count += usize::from(h.is_homomorphism(a, b));
    }
    count
}

fn view(body: &Edges, free: &[usize]) -> Option<(Name, ConjunctiveQuery)> {
    let atoms: Vec<Atom> = body.iter().copied().map(atom).collect();
    let used: Vec<String> = free
        .iter()
        .map(|&i| format!("x{i}"))
        .filter(|v| atoms.iter().any(|a| a.args.contains(&Term::var(v))))
        .collect();
    let mut free_vars: Vec<String> = Vec::new();
    for v in used {
        if !free_vars.contains(&v) {
            free_vars.push(v);
        }
    }
    ConjunctiveQuery::new(&free_vars, atoms)
        .ok()
        .map(|q| (Name::from("V"), q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_is_sound_and_complete(a in edges(3, 1..4), b in edges(3, 1..6)) {
        let (a, b) = (structure(&a), structure(&b));
        let found: Vec<Homomorphism> = find_homomorphisms(&a, &b, &Homomorphism::new()).collect();
        for h in &found {
            prop_assert!(h.is_homomorphism(&a, &b));
        }
        prop_assert_eq!(found.len(), brute_force(&a, &b));
    }

    #[test]
    fn homomorphisms_compose(a in edges(4, 1..4), extra1 in edges(5, 0..4), extra2 in edges(5, 0..4)) {
        let sa = structure(&a);
        let b: Edges = a.iter().chain(&extra1).copied().collect();
        let sb = structure(&b);
        let c: Edges = b.iter().chain(&extra2).copied().collect();
        let sc = structure(&c);
        for h in find_homomorphisms(&sa, &sb, &Homomorphism::new()).take(5) {
            for g in find_homomorphisms(&sb, &sc, &Homomorphism::new()).take(5) {
                prop_assert!(h.then(&g).is_homomorphism(&sa, &sc));
            }
        }
    }

    #[test]
    fn chase_is_monotone(body in edges(3, 1..3), free in prop::collection::vec(0usize..3, 0..3), d in edges(4, 1..4), more in edges(5, 0..3)) {
        let Some(v) = view(&body, &free) else { return Ok(()) };
        let tgds = generate_tgds(&[v]).unwrap();
        let csig = ColoredSignature::new(sig()).unwrap();
        let small = colorize_structure(&structure(&d), Color::Green, &csig).unwrap();
        let both: Edges = d.iter().chain(&more).copied().collect();
        let large = colorize_structure(&structure(&both), Color::Green, &csig).unwrap();
        let ts = run_chase(&tgds, small.clone(), 300, Scheduler::Fifo).unwrap();
        let tl = run_chase(&tgds, large, 300, Scheduler::Fifo).unwrap();
        prop_assert!(ts.violations.is_empty() && tl.violations.is_empty());
        for k in 0..ts.steps.len() {
            prop_assert!(ts.stage(k).is_substructure_of(&ts.stage(k + 1)));
        }
        if ts.verdict == Verdict::Saturated {
            prop_assert!(active_triggers(&tgds, &ts.final_structure).unwrap().is_empty());
        }
        if ts.verdict == Verdict::Saturated && tl.verdict == Verdict::Saturated {
            // Identity on the start elements extends to chase(small) -> chase(large).
            let mut seed = Homomorphism::new();
            for t in small.domain() {
                seed.insert(t.clone(), t.clone());
            }
            prop_assert!(find_homomorphisms(&ts.final_structure, &tl.final_structure, &seed).next().is_some());
        }
    }
}
