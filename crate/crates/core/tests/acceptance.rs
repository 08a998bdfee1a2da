//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cqdet::chase::{active_triggers, apply_trigger, Scheduler};
use cqdet::cq::Name;
use cqdet::greenred::{decide_determinacy, Color, DeterminacyInstance, DeterminacyVerdict};
use cqdet::parse::parse_query;
use cqdet::reductions::{
    bfs_reachable, compile_thue, compile_thue_unchecked, encode_reachability, qeta_ruleset, thue_derives, Graph, Roles,
    ThueSystem,
};
use cqdet::spider::{spider_apply, IdealSpider, Ruleset, SpiderWorld, HEAD};
use cqdet::swarm::{
    check_structural, mirror_run, phase_two, run_swarm, Check, Edge, StructuralContext, Swarm, SwarmChase,
    SwarmScheduler, SwarmStep, SwarmTrace, Vertex,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Criterion = (&'static str, fn(&mut Audit) -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Idempotence audit failures gathered from every run.
#[derive(Default)]
struct Audit {
    runs: usize,
    violations: Vec<String>,
}

impl Audit {
    fn add(&mut self, what: &str, v: &[String]) {
        self.runs += 1;
        self.violations.extend(v.iter().map(|m| format!("{what}: {m}")));
    }
}

fn label(s: &str) -> IdealSpider {
    s.parse().expect("fixed label")
}

fn spider_algebra(audit: &mut Audit) -> Outcome {
    let t0 = Instant::now();
    let world = SpiderWorld::new(4).unwrap();
    let queries = world.all_queries();
    let spiders = world.enumerate_ideal();
    let mut mismatches = Vec::new();
    let mut defined = 0;
    for &f in &queries {
        let tgds = world.unary_tgds(&[f]).unwrap();
        for &sp in &spiders {
            let d = world.ideal_spider(sp).unwrap();
            let act = active_triggers(&tgds, &d).unwrap();
            match spider_apply(f, sp) {
                None if act.is_empty() => {}
                None => mismatches.push(format!("{f} on {sp}: undefined but {} active triggers", act.len())),
                Some(expect) => {
                    defined += 1;
                    if act.len() != 1 {
                        mismatches.push(format!("{f} on {sp}: {} active triggers", act.len()));
                        continue;
                    }
                    let (d1, _) = apply_trigger(&tgds, &d, &act[0]).unwrap();
                    let heads = d1.atoms_of(&expect.color.colored_name(HEAD));
                    let got = match heads.as_slice() {
                        [(_, h)] => world
                            .classify_real_spider(&d1, &h.args[0])
                            .ok()
                            .flatten()
                            .map(|(l, _)| l),
                        _ => None,
                    };
                    if got != Some(expect) {
                        mismatches.push(format!("{f} on {sp}: expected {expect}, built {got:?}"));
                    }
                    let again = active_triggers(&tgds, &d1).unwrap();
                    let v: Vec<String> = again
                        .iter()
                        .map(|t| format!("{f} on {sp}: trigger {t:?} still active"))
                        .collect();
                    audit.add("spider algebra", &v);
                }
            }
        }
    }
    let secs = t0.elapsed();
    Outcome::new(
        mismatches.is_empty() && queries.len() == 24 && spiders.len() == 50 && secs < Duration::from_secs(30),
        format!(
            "{} queries x {} spiders, {defined} defined, {} mismatches, {:.2?}{}",
            queries.len(),
            spiders.len(),
            mismatches.len(),
            secs,
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    )
}

fn random_graph(rng: &mut StdRng) -> Graph {
    let t = rng.random_range(2..=6usize);
    let mut edges = vec![(1, rng.random_range(2..=t))];
    for a in 2..=t {
        for b in a + 1..=t {
            if rng.random_bool(0.4) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(t, edges).unwrap()
}

fn reachability(audit: &mut Audit) -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut wrong = Vec::new();
    let mut unfinished = Vec::new();
    let mut tally = [0usize; 3];
    for k in 0..50 {
        let g = random_graph(&mut rng);
        let (world, qs) = encode_reachability(&g).unwrap();
        let views: Vec<(Name, _)> = qs
            .iter()
            .map(|q| (Name::from(q.to_string()), world.spider_query(*q).unwrap()))
            .collect();
        let inst =
            DeterminacyInstance::with_signature(world.base_signature().clone(), views, world.phi_query()).unwrap();
        let rep = decide_determinacy(&inst, 10_000, Scheduler::Fifo).unwrap();
        audit.add("reachability", &rep.trace.violations);
        let reach = bfs_reachable(&g, 1, 2);
        let edges = format!("graph {k}: t={} edges {:?}", g.vertices, g.edges);
        match (&rep.verdict, reach) {
            (DeterminacyVerdict::Determined { .. }, true) => tally[0] += 1,
            (DeterminacyVerdict::NotDetermined, false) => tally[1] += 1,
            (DeterminacyVerdict::Unknown { .. }, _) => {
                tally[2] += 1;
                unfinished.push(format!("{edges}, reachable={reach}, no verdict within 10^4"));
            }
            (v, _) => wrong.push(format!("{edges}, reachable={reach}, verdict {}", v.name())),
        }
    }
    let mut detail = format!(
        "50 graphs: {} reachable/Determined, {} unreachable/NotDetermined, {} without verdict, {} wrong",
        tally[0],
        tally[1],
        tally[2],
        wrong.len()
    );
    for m in wrong.iter().chain(&unfinished) {
        detail.push_str("; ");
        detail.push_str(m);
    }
    Outcome::new(wrong.is_empty() && unfinished.is_empty(), detail)
}

type Pat = (&'static str, &'static str, &'static str);

struct Row {
    rule: &'static str,
    inputs: [Pat; 2],
    outputs: [Pat; 2],
}

/// The rewriting table for the fixture roles, with the rule each row's
/// labels and sharing pattern require.
fn table() -> Vec<Row> {
    let r = |rule, i1, i2, o1, o2| Row {
        rule,
        inputs: [i1, i2],
        outputs: [o1, o2],
    };
    vec![
        r(
            "1A",
            ("G", "s0", "t0"),
            ("G", "s0", "t0"),
            ("R_1", "s0", "t'"),
            ("R_2", "s0", "t'"),
        ),
        r(
            "1B",
            ("R_1", "s0", "t'"),
            ("R_2", "s0", "t'"),
            ("G^10", "s0", "t1"),
            ("G^13", "s0", "t1"),
        ),
        r(
            "3A",
            ("G^13", "s0", "t1"),
            ("G", "s0", "t0"),
            ("R_5", "s'", "t1"),
            ("R_6", "s'", "t0"),
        ),
        r(
            "3B",
            ("R_5", "s'", "t1"),
            ("R_6", "s'", "t0"),
            ("G^11", "s1", "t1"),
            ("G^14", "s1", "t0"),
        ),
        r(
            "2A",
            ("G^14", "s1", "t0"),
            ("G", "s0", "t0"),
            ("R_3", "s1", "t''"),
            ("R_4", "s0", "t''"),
        ),
        r(
            "2B",
            ("R_3", "s1", "t''"),
            ("R_4", "s0", "t''"),
            ("G^12", "s1", "t2"),
            ("G^13", "s0", "t2"),
        ),
        r(
            "3A",
            ("G^13", "s0", "t2"),
            ("G", "s0", "t0"),
            ("R_5", "s''", "t2"),
            ("R_6", "s''", "t0"),
        ),
    ]
}

/// Extends `map` so that `step` matches `row`; leaves `map` untouched on failure.
fn match_row(rules: &Ruleset, step: &SwarmStep, row: &Row, map: &mut HashMap<&'static str, Vertex>) -> bool {
    if &*rules.rules[step.input.rule].name != row.rule {
        return false;
    }
    let mut m = map.clone();
    let pairs = row
        .inputs
        .iter()
        .zip(&step.input_edges)
        .chain(row.outputs.iter().zip(&step.output_edges));
    for (&(l, t, a), e) in pairs {
        if label(l) != e.label {
            return false;
        }
        for (name, v) in [(t, e.tail), (a, e.antenna)] {
            match m.get(name) {
                Some(&x) if x != v => return false,
                Some(_) => {}
                None if m.values().any(|&x| x == v) => return false,
                None => {
                    m.insert(name, v);
                }
            }
        }
    }
    *map = m;
    true
}

/// Checks `H(gβ₁, s_k, t_k)`, `H(gβ₀, s_k, t_{k+1})`, `H(gη₁, s₀, t_k)` for
/// `k = 1..=3` on the swarm; `t_1` is the antenna of the `gα` edge at `s₀`.
fn ladder(w: &Swarm, roles: &Roles) -> Result<Vec<(Vertex, Vertex)>, String> {
    let g = |i: usize| IdealSpider::new(Color::Green, Some(i), None);
    let s0: Vertex = 0;
    let one = |it: Vec<Edge>, what: String| match it.as_slice() {
        [e] => Ok(*e),
        other => Err(format!("{} edges for {what}", other.len())),
    };
    let mut t = one(
        w.edges_labeled(g(roles.alpha))
            .map(|(_, e)| e)
            .filter(|e| e.tail == s0)
            .collect(),
        "H(gα, s0, _)".into(),
    )?
    .antenna;
    let mut out = Vec::new();
    for k in 1..=3 {
        if !w.contains(&Edge::new(g(roles.eta1), s0, t)) {
            return Err(format!("missing H(gη1, s0, t{k})"));
        }
        let sk = one(
            w.edges_labeled(g(roles.beta1))
                .map(|(_, e)| e)
                .filter(|e| e.antenna == t)
                .collect(),
            format!("H(gβ1, _, t{k})"),
        )?
        .tail;
        let next = one(
            w.edges_labeled(g(roles.beta0))
                .map(|(_, e)| e)
                .filter(|e| e.tail == sk)
                .collect(),
            format!("H(gβ0, s{k}, _)"),
        )?
        .antenna;
        out.push((sk, t));
        t = next;
    }
    Ok(out)
}

fn table_replay(audit: &mut Audit) -> Outcome {
    let roles = Roles::fixture();
    let rules = qeta_ruleset(16, &roles).unwrap();
    let trace: SwarmTrace = run_swarm(&rules, Swarm::green_full(), 40, SwarmScheduler::Spouse);
    audit.add("table replay", &trace.violations);
    let mut map = HashMap::new();
    let mut matched = Vec::new();
    let mut from = 0;
    for row in table() {
        match (from..trace.steps.len()).find(|&k| match_row(&rules, &trace.steps[k], &row, &mut map)) {
            Some(k) => {
                matched.push(trace.steps[k].step);
                from = k + 1;
            }
            None => break,
        }
    }
    let lad = ladder(&trace.stage(40), &roles);
    let detail = format!(
        "rows matched {}/7 at steps {:?}; ladder k<=3 within 40 steps: {}",
        matched.len(),
        matched,
        match &lad {
            Ok(v) => format!("ok (s_k, t_k) = {v:?}"),
            Err(e) => e.clone(),
        }
    );
    Outcome::new(matched.len() == 7 && lad.is_ok() && trace.steps.len() <= 40, detail)
}

fn abstraction(audit: &mut Audit) -> Outcome {
    let t0 = Instant::now();
    let world = SpiderWorld::new(16).unwrap();
    let compiled = compile_thue(&ThueSystem::fixture()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, rules) in [
        ("Q_eta", qeta_ruleset(16, &Roles::fixture()).unwrap()),
        ("compiled q", compiled.q),
    ] {
        let rep = mirror_run(&world, &rules, 200, Scheduler::Fifo, 25).unwrap();
        audit.add(name, &rep.low_level_violations);
        let ok = rep.agrees() && (rep.steps == 200 || rep.saturated) && rep.max_heads_per_pair <= 2;
        pass &= ok;
        parts.push(format!(
            "{name}: {}/{} steps agree, {} active-set checks, {} mismatches",
            rep.agreeing_steps,
            rep.steps,
            rep.active_set_checks,
            rep.mismatches.len()
        ));
    }
    let secs = t0.elapsed();
    parts.push(format!("{secs:.2?}"));
    Outcome::new(pass && secs < Duration::from_secs(120), parts.join("; "))
}

fn positive_instance(audit: &mut Audit) -> Outcome {
    let ts = ThueSystem::fixture();
    let r = ts.roles;
    let certified = thue_derives(&ts, &[r.alpha, r.gamma, r.gamma_prime, r.eta1], &r.target(), 8, 6) == Some(true);
    let compiled = compile_thue(&ts).unwrap();
    let mut chase = SwarmChase::new(compiled.q.clone(), Swarm::green_full()).with_goal(IdealSpider::full(Color::Red));
    chase.run(100_000);
    let swarm_step = chase.goal_step();
    audit.add("positive swarm", &chase.into_trace().violations);

    let world = SpiderWorld::new(ts.s).unwrap();
    let views: Vec<(Name, _)> = compiled
        .q
        .named()
        .into_iter()
        .map(|(n, b)| (n, world.combine(&b).unwrap()))
        .collect();
    let inst = DeterminacyInstance::with_signature(world.base_signature().clone(), views, world.phi_query()).unwrap();
    let t0 = Instant::now();
    let rep = decide_determinacy(&inst, 100_000, Scheduler::Fifo).unwrap();
    audit.add("positive low-level", &rep.trace.violations);
    let low = rep.to_json();
    Outcome::new(
        certified && swarm_step.is_some() && matches!(rep.verdict, DeterminacyVerdict::Determined { .. }),
        format!(
            "alpha gamma gamma' eta1 derives alpha eta1: {certified}; {} rules; swarm red-full at step {swarm_step:?}; decide_determinacy {} at step {:?} ({:.2?})",
            compiled.q.len(),
            low.verdict,
            low.step,
            t0.elapsed()
        ),
    )
}

fn negative_control(audit: &mut Audit) -> Outcome {
    let mut ts = ThueSystem::fixture();
    let (g, gp) = (ts.roles.gamma, ts.roles.gamma_prime);
    ts.productions.retain(|(a, b)| *a != [g, gp] && *b != [g, gp]);
    let compiled = compile_thue_unchecked(&ts).unwrap();
    let trace = run_swarm(&compiled.q0, Swarm::green_full(), 1000, SwarmScheduler::Spouse);
    audit.add("negative control", &trace.violations);
    let ctx = StructuralContext::new(ts.roles).with_thue(ts.clone());
    let rep = check_structural(&trace, &ctx);
    let required = [
        Check::RedIffLower,
        Check::KnotDegree,
        Check::Dangerous,
        Check::NoGreenGamma,
        Check::MaximalWords,
    ];
    let all_run = required.iter().all(|c| rep.passed(*c));
    let p2 = phase_two(&trace.final_swarm, &compiled.q, compiled.final_rule);
    let verdict = match trace.verdict {
        cqdet::chase::Verdict::Saturated => "NotDetermined",
        cqdet::chase::Verdict::BudgetExhausted => "Unknown",
    };
    let mut detail = format!(
        "{} steps, {} edges; {} structural violations, {} maximal words, {} inconclusive; final rule fired {} times, {} new active rewrites, red-full {}; verdict {verdict}",
        trace.steps.len(),
        trace.final_swarm.edge_count(),
        rep.violations.len(),
        rep.maximal_words,
        rep.inconclusive.len(),
        p2.fired,
        p2.new_active.len(),
        p2.red_full
    );
    if let Some((c, m)) = rep.violations.first() {
        detail.push_str(&format!("; first: {c}: {m}"));
    }
    let verdict_ok = verdict == "Unknown" || trace.verdict == cqdet::chase::Verdict::Saturated;
    Outcome::new(rep.is_clean() && all_run && p2.holds() && verdict_ok, detail)
}

fn trivial(audit: &mut Audit) -> Outcome {
    let (_, q0) = parse_query("Q(x,y) :- R(x,z), S(z,y), R(y,w).").unwrap();
    let t0 = Instant::now();
    let with = DeterminacyInstance::new(vec![("V".into(), q0.clone())], q0.clone()).unwrap();
    let a = decide_determinacy(&with, 1000, Scheduler::Fifo).unwrap();
    let ta = t0.elapsed();
    let t1 = Instant::now();
    let without = DeterminacyInstance::new(vec![], q0).unwrap();
    let b = decide_determinacy(&without, 1000, Scheduler::Fifo).unwrap();
    let tb = t1.elapsed();
    audit.add("trivial", &a.trace.violations);
    audit.add("trivial", &b.trace.violations);
    let one_step = matches!(a.verdict, DeterminacyVerdict::Determined { step: 1, .. });
    let none = b.verdict == DeterminacyVerdict::NotDetermined;
    let fast = ta < Duration::from_secs(1) && tb < Duration::from_secs(1);
    Outcome::new(
        one_step && none && fast,
        format!(
            "views={{Q0}}: {} step {:?} ({ta:.2?}); views={{}}: {} ({tb:.2?})",
            a.verdict.name(),
            a.to_json().step,
            b.verdict.name()
        ),
    )
}

fn main() -> ExitCode {
    let mut audit = Audit::default();
    let criteria: [Criterion; 6] = [
        ("spider algebra exhaustive oracle", spider_algebra),
        ("graph reachability", reachability),
        ("rewriting table replay", table_replay),
        ("abstraction bijection", abstraction),
        ("positive Thue instance end to end", positive_instance),
        ("negative control properties", negative_control),
    ];
    let mut results = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run(&mut audit);
        results.push((k + 1, *name, out));
    }
    let triv = trivial(&mut audit);
    let idem = Outcome::new(
        audit.violations.is_empty(),
        format!(
            "{} audited runs, {} violations{}",
            audit.runs,
            audit.violations.len(),
            audit
                .violations
                .first()
                .map(|m| format!("; first: {m}"))
                .unwrap_or_default()
        ),
    );
    results.push((7, "idempotence after every application", idem));
    results.push((8, "trivial determinacy", triv));
    let mut failed = 0;
    for (k, name, out) in &results {
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {k}: {name}: {}", out.detail);
        failed += usize::from(!out.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
