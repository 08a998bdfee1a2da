//! Swarms: the edge-labeled graph abstraction of structures made of real
//! spiders, and the swarm rewriting chase.
//!
//! An edge `H(S, a, b)` stands for a real spider of type `S` with tail `a`
//! and antenna `b`. Edges are identified by their label and endpoints, so
//! at most one edge carries a given label between two vertices.

mod mirror;
mod text;
mod words;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

pub use mirror::{mirror_run, MirrorReport};
pub use text::{parse_swarm, swarm_to_dot, swarm_to_text};
pub use words::{
    check_structural, is_correct_word, is_maximal_correct, phase_two, word_set, Check, PhaseTwoReport,
    StructuralContext, StructuralReport,
};

use crate::chase::Verdict;
use crate::cq::{Structure, Term};
use crate::error::{Error, Result};
use crate::greenred::Color;
use crate::spider::{spider_apply, IdealSpider, Mode, Ruleset, SpiderWorld, HEAD};

pub type Vertex = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub label: IdealSpider,
    pub tail: Vertex,
    pub antenna: Vertex,
}

impl Edge {
    pub fn new(label: IdealSpider, tail: Vertex, antenna: Vertex) -> Self {
        Edge { label, tail, antenna }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H({}, v{}, v{})", self.label, self.tail, self.antenna)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Swarm {
    vertices: u32,
    edges: Vec<Edge>,
    index: HashMap<Edge, usize>,
    by_tail: HashMap<Vertex, Vec<usize>>,
    by_antenna: HashMap<Vertex, Vec<usize>>,
}

impl PartialEq for Swarm {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges.len() == other.edges.len()
            && self.edges.iter().all(|e| other.index.contains_key(e))
    }
}

impl Eq for Swarm {}

impl Swarm {
    pub fn new() -> Self {
        Swarm::default()
    }

    /// One green full edge between two fresh vertices: the start of every
    /// rewriting run.
    pub fn green_full() -> Self {
        let mut w = Swarm::new();
        let (a, b) = (w.add_vertex(), w.add_vertex());
        w.add_edge(Edge::new(IdealSpider::full(Color::Green), a, b))
            .expect("fresh swarm");
        w
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn find(&self, e: &Edge) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.index.contains_key(e)
    }

    /// Edge ids with tail `v`, oldest first.
    pub fn out_edges(&self, v: Vertex) -> &[usize] {
        self.by_tail.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Edge ids with antenna `v`, oldest first.
    pub fn in_edges(&self, v: Vertex) -> &[usize] {
        self.by_antenna.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.out_edges(v).len() + self.in_edges(v).len()
    }

    pub fn labels_between(&self, tail: Vertex, antenna: Vertex) -> Vec<IdealSpider> {
        self.out_edges(tail)
            .iter()
            .map(|&i| self.edges[i])
            .filter(|e| e.antenna == antenna)
            .map(|e| e.label)
            .collect()
    }

    /// Adds `e` unless present; returns its id and whether it is new.
    /// Fails if the pair would carry more than two labels or labels of
    /// both colors.
    pub fn add_edge(&mut self, e: Edge) -> Result<(usize, bool)> {
        if let Some(&i) = self.index.get(&e) {
            return Ok((i, false));
        }
        if e.tail >= self.vertices || e.antenna >= self.vertices {
            return Err(Error::Swarm(format!("{e}: unknown vertex")));
        }
        let present = self.labels_between(e.tail, e.antenna);
        if present.len() >= 2 {
            return Err(Error::Swarm(format!("{e}: pair already carries two labels")));
        }
        if present.iter().any(|l| l.color != e.label.color) {
            return Err(Error::Swarm(format!("{e}: pair already carries the other color")));
        }
        let id = self.edges.len();
        self.edges.push(e);
        self.index.insert(e, id);
        self.by_tail.entry(e.tail).or_default().push(id);
        self.by_antenna.entry(e.antenna).or_default().push(id);
        Ok((id, true))
    }

    /// Edges of the given label, in id order.
    pub fn edges_labeled(&self, label: IdealSpider) -> impl Iterator<Item = (usize, Edge)> + '_ {
        self.edges
            .iter()
            .copied()
            .enumerate()
            .filter(move |(_, e)| e.label == label)
    }

    pub fn has_label(&self, label: IdealSpider) -> bool {
        self.edges.iter().any(|e| e.label == label)
    }

    /// Same edge set up to renaming of vertices, using a given candidate
    /// vertex map from `self` to `other`.
    pub fn matches_under(&self, other: &Swarm, map: &HashMap<Vertex, Vertex>) -> bool {
        if self.vertices != other.vertices || self.edges.len() != other.edges.len() {
            return false;
        }
        let image: HashSet<Vertex> = map.values().copied().collect();
        if map.len() != self.vertex_count() || image.len() != map.len() {
            return false;
        }
        self.edges
            .iter()
            .all(|e| match (map.get(&e.tail), map.get(&e.antenna)) {
                (Some(&t), Some(&a)) => other.contains(&Edge::new(e.label, t, a)),
                _ => false,
            })
    }
}

/// The swarm of a structure: one vertex per tail or antenna element, one
/// edge per real spider. Also returns the vertex of each element.
pub fn swarm_of(world: &SpiderWorld, d: &Structure) -> Result<(Swarm, HashMap<Term, Vertex>)> {
    let mut w = Swarm::new();
    let mut vmap: HashMap<Term, Vertex> = HashMap::new();
    let mut heads = Vec::new();
    for color in [Color::Green, Color::Red] {
        heads.extend(d.atoms_of(&color.colored_name(HEAD)));
    }
    heads.sort_by_key(|(i, _)| *i);
    for (_, h) in heads {
        let (head, tail, antenna) = (&h.args[0], &h.args[1], &h.args[2]);
        let (label, _) = world
            .classify_real_spider(d, head)?
            .ok_or_else(|| Error::StructuralViolation(format!("{head} is not a head")))?;
        let mut vertex = |t: &Term, w: &mut Swarm| *vmap.entry(t.clone()).or_insert_with(|| w.add_vertex());
        let a = vertex(tail, &mut w);
        let b = vertex(antenna, &mut w);
        w.add_edge(Edge::new(label, a, b))?;
    }
    Ok((w, vmap))
}

/// A rule and two edges (by id) it is applied to, in order. The same edge
/// may appear twice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RewriteInput {
    pub rule: usize,
    pub first: usize,
    pub second: usize,
}

/// Outputs of `input` if its first four conditions hold: the two output
/// labels, the old vertex each output keeps, and the vertex the inputs share.
fn outputs(
    rules: &Ruleset,
    w: &Swarm,
    input: RewriteInput,
) -> Option<(IdealSpider, Vertex, IdealSpider, Vertex, Vertex)> {
    let q = rules.rules.get(input.rule)?.query;
    let (e1, e2) = (*w.edges.get(input.first)?, *w.edges.get(input.second)?);
    if e1.label.color != e2.label.color {
        return None;
    }
    let l1 = spider_apply(q.left, e1.label)?;
    let l2 = spider_apply(q.right, e2.label)?;
    match q.mode {
        Mode::Wedge if e1.antenna == e2.antenna => Some((l1, e1.tail, l2, e2.tail, e1.antenna)),
        Mode::Vee if e1.tail == e2.tail => Some((l1, e1.antenna, l2, e2.antenna, e1.tail)),
        _ => None,
    }
}

/// Conditions for `input` to be a possible rewrite on `w`, including that
/// its output pattern is not already present.
pub fn is_active(rules: &Ruleset, w: &Swarm, input: RewriteInput) -> bool {
    let Some((l1, v1, l2, v2, _)) = outputs(rules, w, input) else {
        return false;
    };
    match rules.rules[input.rule].query.mode {
        Mode::Wedge => !w
            .out_edges(v1)
            .iter()
            .map(|&i| w.edges[i])
            .any(|e| e.label == l1 && w.contains(&Edge::new(l2, v2, e.antenna))),
        Mode::Vee => !w
            .in_edges(v1)
            .iter()
            .map(|&i| w.edges[i])
            .any(|e| e.label == l1 && w.contains(&Edge::new(l2, e.tail, v2))),
    }
}

/// Candidate inputs in which edge `e` takes part.
fn candidates_with(rules: &Ruleset, w: &Swarm, e: usize, out: &mut Vec<RewriteInput>) {
    let edge = w.edges[e];
    for (ri, r) in rules.rules.iter().enumerate() {
        let q = r.query;
        let partners = |v| match q.mode {
            Mode::Wedge => w.in_edges(v),
            Mode::Vee => w.out_edges(v),
        };
        let shared = match q.mode {
            Mode::Wedge => edge.antenna,
            Mode::Vee => edge.tail,
        };
        let ok = |f, p: usize| {
            let pe = w.edges[p];
            pe.label.color == edge.label.color && spider_apply(f, pe.label).is_some()
        };
        if spider_apply(q.left, edge.label).is_some() {
            for &p in partners(shared) {
                if ok(q.right, p) {
                    out.push(RewriteInput {
                        rule: ri,
                        first: e,
                        second: p,
                    });
                }
            }
        }
        if spider_apply(q.right, edge.label).is_some() {
            for &p in partners(shared) {
                if ok(q.left, p) {
                    out.push(RewriteInput {
                        rule: ri,
                        first: p,
                        second: e,
                    });
                }
            }
        }
    }
}

/// Every active rewrite on `w`, sorted.
pub fn active_rewrites(rules: &Ruleset, w: &Swarm) -> Vec<RewriteInput> {
    let mut all = Vec::new();
    for e in 0..w.edges.len() {
        candidates_with(rules, w, e, &mut all);
    }
    all.sort();
    all.dedup();
    all.retain(|&i| is_active(rules, w, i));
    all
}

/// What one rewrite added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteOutcome {
    pub new_vertex: Vertex,
    /// Ids of the output edges, left output first.
    pub outputs: [usize; 2],
}

impl Swarm {
    /// Applies an active rewrite in place.
    pub fn rewrite(&mut self, rules: &Ruleset, input: RewriteInput) -> Result<RewriteOutcome> {
        if !is_active(rules, self, input) {
            return Err(Error::InactiveRewrite(format!(
                "rule {} on edges {} and {}",
                rules
                    .rules
                    .get(input.rule)
                    .map(|r| r.name.to_string())
                    .unwrap_or_default(),
                input.first,
                input.second
            )));
        }
        let (l1, v1, l2, v2, _) = outputs(rules, self, input).expect("active input has outputs");
        let n = self.add_vertex();
        let (o1, o2) = match rules.rules[input.rule].query.mode {
            Mode::Wedge => (Edge::new(l1, v1, n), Edge::new(l2, v2, n)),
            Mode::Vee => (Edge::new(l1, n, v1), Edge::new(l2, n, v2)),
        };
        let (i1, _) = self.add_edge(o1)?;
        let (i2, _) = self.add_edge(o2)?;
        Ok(RewriteOutcome {
            new_vertex: n,
            outputs: [i1, i2],
        })
    }
}

/// Functional form of [`Swarm::rewrite`].
pub fn rewrite_step(rules: &Ruleset, w: &Swarm, input: RewriteInput) -> Result<Swarm> {
    let mut next = w.clone();
    next.rewrite(rules, input)?;
    Ok(next)
}

/// Two red edges created by one rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Couple {
    /// 1-based step that created the couple.
    pub step: usize,
    pub rule: usize,
    pub edges: [usize; 2],
    /// The fresh vertex both edges share.
    pub knot: Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwarmStep {
    /// 1-based.
    pub step: usize,
    pub input: RewriteInput,
    pub input_edges: [Edge; 2],
    pub outcome: RewriteOutcome,
    pub output_edges: [Edge; 2],
    /// Index into the couple list when the outputs are red.
    pub couple: Option<usize>,
}

/// Hook for callers that need a specific rewrite order.
pub trait RewriteScheduler {
    /// Index into `pending` of the input to try next. Inactive picks are
    /// discarded and the scheduler is asked again.
    fn select(&mut self, pending: &[RewriteInput], swarm: &Swarm, rules: &Ruleset) -> usize;
}

pub enum SwarmScheduler {
    Fifo,
    /// FIFO, except that right after a rewrite creates a married couple the
    /// associated rule is applied to that couple when it is active.
    Spouse,
    /// Random choice with the same bounded-patience fairness rule as the
    /// low-level chase.
    Random {
        seed: u64,
        patience: usize,
    },
    Custom(Box<dyn RewriteScheduler>),
}

impl SwarmScheduler {
    pub fn random(seed: u64) -> Self {
        SwarmScheduler::Random { seed, patience: 64 }
    }
}

impl fmt::Debug for SwarmScheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwarmScheduler::Fifo => write!(f, "Fifo"),
            SwarmScheduler::Spouse => write!(f, "Spouse"),
            SwarmScheduler::Random { seed, patience } => write!(f, "Random(seed={seed}, patience={patience})"),
            SwarmScheduler::Custom(_) => write!(f, "Custom"),
        }
    }
}

enum Sched {
    Fifo,
    Spouse,
    Random { rng: Box<StdRng>, patience: usize },
    Custom(Box<dyn RewriteScheduler>),
}

#[derive(Clone, Debug)]
pub struct SwarmTrace {
    pub rules: Ruleset,
    pub initial: Swarm,
    pub steps: Vec<SwarmStep>,
    pub couples: Vec<Couple>,
    pub final_swarm: Swarm,
    pub verdict: Verdict,
    /// Idempotence audit failures.
    pub violations: Vec<String>,
    /// Step at which the goal label first appeared.
    pub goal_step: Option<usize>,
}

impl SwarmTrace {
    /// Swarm after `k` steps.
    pub fn stage(&self, k: usize) -> Swarm {
        let mut w = self.initial.clone();
        for s in &self.steps[..k.min(self.steps.len())] {
            w.rewrite(&self.rules, s.input).expect("recorded steps replay");
        }
        w
    }

    /// Couple containing edge `e`, if any.
    pub fn couple_of(&self, e: usize) -> Option<&Couple> {
        self.couples.iter().find(|c| c.edges.contains(&e))
    }
}

/// Incremental swarm rewriting.
pub struct SwarmChase {
    rules: Ruleset,
    swarm: Swarm,
    initial: Swarm,
    pending: VecDeque<(RewriteInput, usize)>,
    seen: HashSet<RewriteInput>,
    scanned: usize,
    steps: Vec<SwarmStep>,
    couples: Vec<Couple>,
    violations: Vec<String>,
    sched: Sched,
    priority: Option<RewriteInput>,
    goal: Option<IdealSpider>,
    goal_step: Option<usize>,
}

impl SwarmChase {
    pub fn new(rules: Ruleset, w0: Swarm) -> Self {
        let goal_step = None;
        SwarmChase {
            rules,
            initial: w0.clone(),
            swarm: w0,
            pending: VecDeque::new(),
            seen: HashSet::new(),
            scanned: 0,
            steps: Vec::new(),
            couples: Vec::new(),
            violations: Vec::new(),
            sched: Sched::Fifo,
            priority: None,
            goal: None,
            goal_step,
        }
    }

    pub fn with_scheduler(mut self, s: SwarmScheduler) -> Self {
        self.sched = match s {
            SwarmScheduler::Fifo => Sched::Fifo,
            SwarmScheduler::Spouse => Sched::Spouse,
            SwarmScheduler::Random { seed, patience } => Sched::Random {
                rng: Box::new(StdRng::seed_from_u64(seed)),
                patience,
            },
            SwarmScheduler::Custom(c) => Sched::Custom(c),
        };
        self
    }

    /// Stops the run once an edge with this label exists.
    pub fn with_goal(mut self, label: IdealSpider) -> Self {
        self.goal = Some(label);
        if self.swarm.has_label(label) {
            self.goal_step = Some(0);
        }
        self
    }

    pub fn swarm(&self) -> &Swarm {
        &self.swarm
    }

    pub fn rules(&self) -> &Ruleset {
        &self.rules
    }

    pub fn steps(&self) -> &[SwarmStep] {
        &self.steps
    }

    pub fn couples(&self) -> &[Couple] {
        &self.couples
    }

    pub fn goal_step(&self) -> Option<usize> {
        self.goal_step
    }

    fn discover(&mut self) {
        let applied = self.steps.len();
        let mut found = Vec::new();
        for e in self.scanned..self.swarm.edges.len() {
            candidates_with(&self.rules, &self.swarm, e, &mut found);
        }
        self.scanned = self.swarm.edges.len();
        for input in found {
            if self.seen.insert(input) && is_active(&self.rules, &self.swarm, input) {
                self.pending.push_back((input, applied));
            }
        }
    }

    fn pick(&mut self) -> Option<RewriteInput> {
        if let Some(p) = self.priority.take() {
            if is_active(&self.rules, &self.swarm, p) {
                if let Some(pos) = self.pending.iter().position(|(i, _)| *i == p) {
                    self.pending.remove(pos);
                }
                return Some(p);
            }
        }
        loop {
            if self.pending.is_empty() {
                return None;
            }
            let idx = match &mut self.sched {
                Sched::Fifo | Sched::Spouse => 0,
                Sched::Random { rng, patience } => {
                    if self.steps.len() - self.pending[0].1 >= *patience {
                        0
                    } else {
                        rng.random_range(0..self.pending.len())
                    }
                }
                Sched::Custom(c) => {
                    let inputs: Vec<RewriteInput> = self.pending.iter().map(|(i, _)| *i).collect();
                    c.select(&inputs, &self.swarm, &self.rules).min(inputs.len() - 1)
                }
            };
            let (input, _) = self.pending.remove(idx).expect("index in range");
            if is_active(&self.rules, &self.swarm, input) {
                return Some(input);
            }
        }
    }

    /// Applies `input` directly, bypassing the scheduler.
    pub fn apply(&mut self, input: RewriteInput) -> Result<&SwarmStep> {
        let input_edges = [self.swarm.edge(input.first), self.swarm.edge(input.second)];
        let outcome = self.swarm.rewrite(&self.rules, input)?;
        let step = self.steps.len() + 1;
        let output_edges = outcome.outputs.map(|i| self.swarm.edge(i));
        let mut couple = None;
        if output_edges[0].label.color == Color::Red {
            couple = Some(self.couples.len());
            self.couples.push(Couple {
                step,
                rule: input.rule,
                edges: outcome.outputs,
                knot: outcome.new_vertex,
            });
            if matches!(self.sched, Sched::Spouse) {
                if let Some(a) = self.rules.rules[input.rule].associate {
                    self.priority = Some(RewriteInput {
                        rule: a,
                        first: outcome.outputs[0],
                        second: outcome.outputs[1],
                    });
                }
            }
        }
        let back = RewriteInput {
            rule: input.rule,
            first: outcome.outputs[0],
            second: outcome.outputs[1],
        };
        if is_active(&self.rules, &self.swarm, input) {
            self.violations
                .push(format!("step {step}: input still active after rewriting"));
        }
        if is_active(&self.rules, &self.swarm, back) {
            self.violations
                .push(format!("step {step}: rule active on its own outputs"));
        }
        if let (Some(g), None) = (self.goal, self.goal_step) {
            if output_edges.iter().any(|e| e.label == g) {
                self.goal_step = Some(step);
            }
        }
        self.steps.push(SwarmStep {
            step,
            input,
            input_edges,
            outcome,
            output_edges,
            couple,
        });
        Ok(self.steps.last().unwrap())
    }

    /// One scheduled rewrite. Returns false when nothing is active.
    pub fn step(&mut self) -> bool {
        self.discover();
        let Some(input) = self.pick() else {
            return false;
        };
        self.apply(input).expect("picked inputs are active");
        true
    }

    pub fn run(&mut self, budget: usize) -> Verdict {
        let mut used = 0;
        loop {
            if self.goal_step.is_some() || used >= budget {
                return self.verdict_now();
            }
            if !self.step() {
                return Verdict::Saturated;
            }
            used += 1;
        }
    }

    fn verdict_now(&mut self) -> Verdict {
        self.discover();
        while let Some(&(front, _)) = self.pending.front() {
            if is_active(&self.rules, &self.swarm, front) {
                return Verdict::BudgetExhausted;
            }
            self.pending.pop_front();
        }
        Verdict::Saturated
    }

    pub fn into_trace(mut self) -> SwarmTrace {
        let verdict = self.verdict_now();
        SwarmTrace {
            rules: self.rules,
            initial: self.initial,
            steps: self.steps,
            couples: self.couples,
            final_swarm: self.swarm,
            verdict,
            violations: self.violations,
            goal_step: self.goal_step,
        }
    }
}

/// Runs `rules` from `w0` for at most `budget` rewrites.
pub fn run_swarm(rules: &Ruleset, w0: Swarm, budget: usize, scheduler: SwarmScheduler) -> SwarmTrace {
    let mut c = SwarmChase::new(rules.clone(), w0).with_scheduler(scheduler);
    c.run(budget);
    c.into_trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spider::{BinaryQuery, SpiderQuery};

    fn g() -> IdealSpider {
        IdealSpider::full(Color::Green)
    }

    fn one_a() -> Ruleset {
        let mut rs = Ruleset::new(2);
        rs.push("1A", BinaryQuery::wedge(SpiderQuery::low(1), SpiderQuery::low(2)))
            .unwrap();
        rs
    }

    #[test]
    fn empty_swarm_has_no_rewrites() {
        assert!(active_rewrites(&one_a(), &Swarm::new()).is_empty());
    }

    #[test]
    fn same_edge_twice() {
        let rs = one_a();
        let w = Swarm::green_full();
        let act = active_rewrites(&rs, &w);
        assert_eq!(
            act,
            vec![RewriteInput {
                rule: 0,
                first: 0,
                second: 0
            }]
        );
        let w1 = rewrite_step(&rs, &w, act[0]).unwrap();
        assert_eq!(w1.vertex_count(), 3);
        assert!(w1.contains(&Edge::new(IdealSpider::new(Color::Red, None, Some(1)), 0, 2)));
        assert!(w1.contains(&Edge::new(IdealSpider::new(Color::Red, None, Some(2)), 0, 2)));
        // The outputs now block the input, and the rule on its outputs.
        assert!(active_rewrites(&rs, &w1).is_empty());
        assert!(matches!(rewrite_step(&rs, &w1, act[0]), Err(Error::InactiveRewrite(_))));
    }

    #[test]
    fn vee_shares_tails() {
        let mut rs = Ruleset::new(2);
        rs.push("v", BinaryQuery::vee(SpiderQuery::low(1), SpiderQuery::low(2)))
            .unwrap();
        let mut w = Swarm::green_full();
        let c = w.add_vertex();
        w.add_edge(Edge::new(g(), 0, c)).unwrap();
        let act = active_rewrites(&rs, &w);
        assert_eq!(act.len(), 4);
        let out = w
            .rewrite(
                &rs,
                RewriteInput {
                    rule: 0,
                    first: 0,
                    second: 1,
                },
            )
            .unwrap();
        let e = w.edge(out.outputs[1]);
        assert_eq!((e.tail, e.antenna), (out.new_vertex, c));
    }

    #[test]
    fn pair_invariant_enforced() {
        let mut w = Swarm::green_full();
        let r = IdealSpider::new(Color::Red, None, Some(1));
        assert!(w.add_edge(Edge::new(r, 0, 1)).is_err());
        w.add_edge(Edge::new(IdealSpider::new(Color::Green, Some(1), None), 0, 1))
            .unwrap();
        assert!(w
            .add_edge(Edge::new(IdealSpider::new(Color::Green, Some(2), None), 0, 1))
            .is_err());
        assert_eq!(w.add_edge(Edge::new(g(), 0, 1)).unwrap(), (0, false));
    }

    #[test]
    fn colors_must_agree() {
        let rs = one_a();
        let mut w = Swarm::green_full();
        let c = w.add_vertex();
        w.add_edge(Edge::new(IdealSpider::new(Color::Red, None, Some(2)), c, 1))
            .unwrap();
        let act = active_rewrites(&rs, &w);
        assert!(act.iter().all(|i| i.first == 0 && i.second == 0));
    }

    #[test]
    fn swarm_of_ideal_spider() {
        let world = SpiderWorld::new(2).unwrap();
        let d = world.ideal_spider(IdealSpider::new(Color::Red, Some(1), None)).unwrap();
        let (w, vmap) = swarm_of(&world, &d).unwrap();
        assert_eq!(w.edge_count(), 1);
        assert_eq!(w.edge(0).label, IdealSpider::new(Color::Red, Some(1), None));
        assert_eq!(vmap[&Term::var("z1")], w.edge(0).tail);
    }

    #[test]
    fn chase_saturates_and_records_couples() {
        let rs = one_a();
        let t = run_swarm(&rs, Swarm::green_full(), 10, SwarmScheduler::Fifo);
        assert_eq!(t.verdict, Verdict::Saturated);
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.couples.len(), 1);
        assert_eq!(t.couples[0].knot, 2);
        assert!(t.violations.is_empty());
        assert_eq!(t.stage(1), t.final_swarm);
    }
}
