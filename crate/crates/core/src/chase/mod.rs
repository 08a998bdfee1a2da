//! Standard (lazy) chase over tuple-generating dependencies.
//!
//! Triggers are keyed by (dependency, frontier tuple). New triggers are only
//! looked for in body matches that use at least one atom added by the last
//! step; a trigger is queued once, and its witness condition is checked again
//! when it is popped, so a stale trigger is dropped instead of applied.

mod export;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use crate::cq::matcher::{Matches, Pattern, Slot};
use crate::cq::{Atom, ConjunctiveQuery, ElemId, Homomorphism, Name, NullProvenance, PredId, Structure, Term};
use crate::error::{Error, Result};

pub use export::{structure_to_dot, trace_from_json_lines, trace_to_json_lines, StepRecord};

/// `Φ(x̄,ȳ) ⇒ ∃z̄ Ψ(z̄,ȳ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tgd {
    id: Name,
    body: Vec<Atom>,
    head: Vec<Atom>,
    frontier: Vec<Name>,
    existentials: Vec<Name>,
}

fn vars_in_order(atoms: &[Atom]) -> Vec<Name> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in atoms {
        for t in &a.args {
            if let Term::Variable(n) = t {
                if seen.insert(n.clone()) {
                    out.push(n.clone());
                }
            }
        }
    }
    out
}

impl Tgd {
    /// Frontier in order of first occurrence in the head.
    pub fn new(id: &str, body: Vec<Atom>, head: Vec<Atom>) -> Result<Self> {
        let body_vars: HashSet<Name> = vars_in_order(&body).into_iter().collect();
        let frontier: Vec<Name> = vars_in_order(&head)
            .into_iter()
            .filter(|v| body_vars.contains(v))
            .collect();
        Self::with_frontier(id, body, head, &frontier)
    }

    /// Like [`Tgd::new`] but with an explicit frontier order, which must list
    /// exactly the variables shared by body and head.
    pub fn with_frontier<S: AsRef<str>>(id: &str, body: Vec<Atom>, head: Vec<Atom>, frontier: &[S]) -> Result<Self> {
        let bad = |reason: String| Error::Tgd {
            tgd: id.to_string(),
            reason,
        };
        if body.is_empty() || head.is_empty() {
            return Err(bad("body and head must be nonempty".into()));
        }
        for a in body.iter().chain(&head) {
            if a.args.iter().any(|t| matches!(t, Term::Null(_))) {
                return Err(bad(format!("atom `{a}` contains a null")));
            }
        }
        let body_vars: HashSet<Name> = vars_in_order(&body).into_iter().collect();
        let head_vars = vars_in_order(&head);
        let shared: BTreeSet<Name> = head_vars.iter().filter(|v| body_vars.contains(*v)).cloned().collect();
        let frontier: Vec<Name> = frontier.iter().map(|s| Name::from(s.as_ref())).collect();
        let listed: BTreeSet<Name> = frontier.iter().cloned().collect();
        if listed.len() != frontier.len() || listed != shared {
            return Err(bad(
                "frontier must list exactly the variables shared by body and head".into()
            ));
        }
        let existentials = head_vars.into_iter().filter(|v| !body_vars.contains(v)).collect();
        Ok(Tgd {
            id: id.into(),
            body,
            head,
            frontier,
            existentials,
        })
    }

    pub fn id(&self) -> &Name {
        &self.id
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn head(&self) -> &[Atom] {
        &self.head
    }

    pub fn frontier(&self) -> &[Name] {
        &self.frontier
    }

    pub fn existentials(&self) -> &[Name] {
        &self.existentials
    }

    fn frontier_terms(&self) -> Vec<Term> {
        self.frontier.iter().map(|n| Term::Variable(n.clone())).collect()
    }
}

impl fmt::Display for Tgd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |atoms: &[Atom]| atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "{}: {} -> ", self.id, join(&self.body))?;
        if !self.existentials.is_empty() {
            let ex: Vec<&str> = self.existentials.iter().map(|n| &**n).collect();
            write!(f, "exists {}. ", ex.join(","))?;
        }
        write!(f, "{}", join(&self.head))
    }
}

/// `⟨b̄, T⟩`: a dependency (by index into the dependency list) and a frontier tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trigger {
    pub tgd: usize,
    pub binding: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Saturated,
    BudgetExhausted,
}

/// One applied trigger.
#[derive(Clone, Debug)]
pub struct ChaseStep {
    /// 1-based; continues across chained phases.
    pub step: usize,
    pub tgd: usize,
    pub tgd_id: Name,
    pub binding: Vec<Term>,
    pub added_atoms: Vec<Atom>,
    pub added_nulls: Vec<Term>,
    /// Atom count of the structure before this step.
    pub atoms_before: usize,
    body_match: Vec<ElemId>,
}

/// A trigger waiting in the queue, with the body match it was found by.
#[derive(Clone, Debug)]
pub struct PendingTrigger {
    pub tgd: usize,
    pub binding: Box<[ElemId]>,
    pub body_match: Box<[ElemId]>,
    /// Number of applied steps when the trigger was discovered.
    pub discovered_at: usize,
}

/// Hook for callers that need a specific application order.
pub trait TriggerScheduler {
    /// Index into `pending` of the trigger to try next. Inactive picks are
    /// discarded by the engine and the scheduler is asked again.
    fn select(&mut self, pending: &[PendingTrigger], structure: &Structure, tgds: &[Tgd]) -> usize;
}

pub enum Scheduler {
    Fifo,
    /// Random choice, except that a trigger waiting longer than `patience`
    /// applications is taken first. This keeps every run fair.
    Random {
        seed: u64,
        patience: usize,
    },
    Custom(Box<dyn TriggerScheduler>),
}

impl Scheduler {
    pub fn random(seed: u64) -> Self {
        Scheduler::Random { seed, patience: 64 }
    }
}

impl fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::Fifo => write!(f, "Fifo"),
            Scheduler::Random { seed, patience } => write!(f, "Random(seed={seed}, patience={patience})"),
            Scheduler::Custom(_) => write!(f, "Custom"),
        }
    }
}

enum SchedState {
    Fifo,
    Random { rng: Box<StdRng>, patience: usize },
    Custom(Box<dyn TriggerScheduler>),
}

/// The full record of a run: the start structure, every applied trigger and
/// the structure reached.
#[derive(Clone, Debug)]
pub struct ChaseTrace {
    pub tgds: Vec<Tgd>,
    pub initial: Structure,
    pub steps: Vec<ChaseStep>,
    pub final_structure: Structure,
    pub verdict: Verdict,
    /// Idempotence audit failures, one message each.
    pub violations: Vec<String>,
    body_vars: Vec<Vec<Term>>,
}

impl ChaseTrace {
    /// Stage after `k` applied steps of this trace (0 is the initial structure).
    pub fn stage(&self, k: usize) -> Structure {
        let n = if k == 0 {
            self.initial.atom_count()
        } else if k >= self.steps.len() {
            self.final_structure.atom_count()
        } else {
            self.steps[k].atoms_before
        };
        self.final_structure.prefix(n)
    }

    /// The body match that step `k` (0-based index into `steps`) was applied on.
    pub fn body_match(&self, k: usize) -> Homomorphism {
        let step = &self.steps[k];
        let mut h = Homomorphism::new();
        for (v, &e) in self.body_vars[step.tgd].iter().zip(step.body_match.iter()) {
            h.insert(v.clone(), self.final_structure.term(e).clone());
        }
        h
    }

    /// Runs a further phase from the final structure of this one.
    pub fn chain(&self, tgds: &[Tgd], budget: usize, scheduler: Scheduler) -> Result<ChaseTrace> {
        let mut engine = ChaseEngine::new(tgds, self.final_structure.clone())?
            .with_scheduler(scheduler)
            .with_step_offset(self.steps.len());
        engine.run(budget);
        Ok(engine.into_trace())
    }
}

struct Compiled {
    body: Option<Pattern>,
    head: Pattern,
    frontier_len: usize,
}

struct Goal {
    pattern: Option<Pattern>,
    seed: Vec<Option<ElemId>>,
}

/// Incremental chase state. Most callers use [`run_chase`] or [`chase_entails`].
pub struct ChaseEngine {
    tgds: Vec<Tgd>,
    compiled: Vec<Compiled>,
    by_pred: HashMap<PredId, Vec<(usize, usize)>>,
    structure: Structure,
    initial: Structure,
    pending: VecDeque<PendingTrigger>,
    seen: HashSet<(usize, Box<[ElemId]>)>,
    steps: Vec<ChaseStep>,
    sched: SchedState,
    twins: Vec<Option<usize>>,
    violations: Vec<String>,
    step_offset: usize,
    scanned: usize,
    goal: Option<Goal>,
    goal_hit: Option<(usize, Vec<ElemId>)>,
}

impl ChaseEngine {
    pub fn new(tgds: &[Tgd], d0: Structure) -> Result<Self> {
        let sig = d0.signature().clone();
        let mut ids = HashSet::new();
        let mut compiled = Vec::with_capacity(tgds.len());
        let mut by_pred: HashMap<PredId, Vec<(usize, usize)>> = HashMap::new();
        for (ti, t) in tgds.iter().enumerate() {
            if !ids.insert(t.id.clone()) {
                return Err(Error::Tgd {
                    tgd: t.id.to_string(),
                    reason: "duplicate id".into(),
                });
            }
            let leading = t.frontier_terms();
            let body = Pattern::compile(&sig, &t.body, &leading)?;
            let head = Pattern::compile(&sig, &t.head, &leading)?.ok_or_else(|| Error::Tgd {
                tgd: t.id.to_string(),
                reason: "head mentions a predicate or constant outside the signature".into(),
            })?;
            if let Some(b) = &body {
                for (pos, a) in b.atoms.iter().enumerate() {
                    by_pred.entry(a.pred).or_default().push((ti, pos));
                }
            }
            compiled.push(Compiled {
                body,
                head,
                frontier_len: leading.len(),
            });
        }
        Ok(ChaseEngine {
            tgds: tgds.to_vec(),
            compiled,
            by_pred,
            initial: d0.clone(),
            structure: d0,
            pending: VecDeque::new(),
            seen: HashSet::new(),
            steps: Vec::new(),
            sched: SchedState::Fifo,
            twins: vec![None; tgds.len()],
            violations: Vec::new(),
            step_offset: 0,
            scanned: 0,
            goal: None,
            goal_hit: None,
        })
    }

    pub fn with_scheduler(mut self, scheduler: Scheduler) -> Self {
        self.sched = match scheduler {
            Scheduler::Fifo => SchedState::Fifo,
            Scheduler::Random { seed, patience } => SchedState::Random {
                rng: Box::new(StdRng::seed_from_u64(seed)),
                patience: patience.max(1),
            },
            Scheduler::Custom(c) => SchedState::Custom(c),
        };
        self
    }

    /// Declares `twins[i]` as the twin of dependency `i`. After every step at
    /// `⟨b̄, T⟩` the engine checks that both `⟨b̄, T⟩` and `⟨b̄, twin(T)⟩` are
    /// inactive and records a violation otherwise.
    pub fn with_twins(mut self, twins: Vec<Option<usize>>) -> Self {
        assert_eq!(twins.len(), self.tgds.len());
        self.twins = twins;
        self
    }

    pub fn with_step_offset(mut self, offset: usize) -> Self {
        self.step_offset = offset;
        self
    }

    /// Enables goal tracking: after every step the engine checks whether
    /// `goal(args)` holds.
    pub fn with_goal(mut self, goal: &ConjunctiveQuery, args: &[Term]) -> Result<Self> {
        if args.len() != goal.free_vars().len() {
            return Err(Error::Query(format!(
                "goal has {} free variables, got {} arguments",
                goal.free_vars().len(),
                args.len()
            )));
        }
        let mut seed = Vec::with_capacity(args.len());
        for a in args {
            if !a.is_constant() {
                return Err(Error::Query(format!("goal argument `{a}` is not a constant")));
            }
            let e = self
                .structure
                .element(a)
                .ok_or_else(|| Error::UnknownConstant(a.to_string()))?;
            seed.push(Some(e));
        }
        let leading: Vec<Term> = goal.free_vars().iter().map(|n| Term::Variable(n.clone())).collect();
        let pattern = Pattern::compile(self.structure.signature(), goal.body(), &leading)?;
        self.goal = Some(Goal { pattern, seed });
        self.check_goal_full();
        Ok(self)
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn tgds(&self) -> &[Tgd] {
        &self.tgds
    }

    pub fn steps(&self) -> &[ChaseStep] {
        &self.steps
    }

    pub fn applied(&self) -> usize {
        self.steps.len()
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    /// Step (counting the offset) at which the goal first held, if it has.
    pub fn goal_step(&self) -> Option<usize> {
        self.goal_hit.as_ref().map(|(s, _)| *s)
    }

    fn check_goal_full(&mut self) {
        let Some(goal) = &self.goal else { return };
        let Some(p) = &goal.pattern else { return };
        if self.goal_hit.is_none() {
            if let Some(m) = Matches::new(p, &self.structure, goal.seed.clone()).next() {
                self.goal_hit = Some((self.step_offset + self.steps.len(), m));
            }
        }
    }

    fn check_goal_delta(&mut self, delta_start: usize) {
        if self.goal_hit.is_some() {
            return;
        }
        let Some(goal) = &self.goal else { return };
        let Some(p) = &goal.pattern else { return };
        for id in delta_start..self.structure.atom_count() {
            let (pred, _) = self.structure.atom_ids(id as u32);
            for (pos, pa) in p.atoms.iter().enumerate() {
                if pa.pred != pred {
                    continue;
                }
                let m = Matches::anchored(
                    p,
                    &self.structure,
                    goal.seed.clone(),
                    pos,
                    id as u32,
                    delta_start as u32,
                )
                .and_then(|mut m| m.next());
                if let Some(m) = m {
                    self.goal_hit = Some((self.step_offset + self.steps.len(), m));
                    return;
                }
            }
        }
    }

    /// The witness of the goal as a map from goal variables to elements.
    pub fn goal_witness(&self, goal: &ConjunctiveQuery) -> Option<Homomorphism> {
        let (_, m) = self.goal_hit.as_ref()?;
        let leading: Vec<Term> = goal.free_vars().iter().map(|n| Term::Variable(n.clone())).collect();
        let p = Pattern::compile(self.structure.signature(), goal.body(), &leading).ok()??;
        let mut h = Homomorphism::new();
        for (v, &e) in p.vars.iter().zip(m) {
            h.insert(v.clone(), self.structure.term(e).clone());
        }
        Some(h)
    }

    /// Queues triggers whose body match uses an atom with id ≥ `self.scanned`.
    fn discover(&mut self) {
        let delta_start = self.scanned;
        let end = self.structure.atom_count();
        let applied = self.steps.len();
        for id in delta_start..end {
            let (pred, _) = self.structure.atom_ids(id as u32);
            let Some(anchors) = self.by_pred.get(&pred) else {
                continue;
            };
            for &(ti, pos) in anchors {
                let c = &self.compiled[ti];
                let body = c.body.as_ref().expect("indexed dependency has a body");
                let Some(matches) =
                    Matches::anchored(body, &self.structure, vec![], pos, id as u32, delta_start as u32)
                else {
                    continue;
                };
                for m in matches {
                    let binding: Box<[ElemId]> = m[..c.frontier_len].into();
                    if self.seen.contains(&(ti, binding.clone())) {
                        continue;
                    }
                    self.seen.insert((ti, binding.clone()));
                    if Matches::new(&c.head, &self.structure, binding.iter().map(|&e| Some(e)).collect())
                        .next()
                        .is_some()
                    {
                        continue;
                    }
                    self.pending.push_back(PendingTrigger {
                        tgd: ti,
                        binding,
                        body_match: m.into(),
                        discovered_at: applied,
                    });
                }
            }
        }
        self.scanned = end;
    }

    fn has_witness(&self, ti: usize, binding: &[ElemId]) -> bool {
        let c = &self.compiled[ti];
        Matches::new(&c.head, &self.structure, binding.iter().map(|&e| Some(e)).collect())
            .next()
            .is_some()
    }

    fn body_matches(&self, ti: usize, binding: &[ElemId]) -> bool {
        let c = &self.compiled[ti];
        match &c.body {
            None => false,
            Some(b) => Matches::new(b, &self.structure, binding.iter().map(|&e| Some(e)).collect())
                .next()
                .is_some(),
        }
    }

    /// Conditions ① and ② for `⟨binding, tgds[ti]⟩` on the current structure.
    pub fn is_active(&self, ti: usize, binding: &[ElemId]) -> bool {
        binding.len() == self.compiled[ti].frontier_len
            && self.body_matches(ti, binding)
            && !self.has_witness(ti, binding)
    }

    fn pick(&mut self) -> Option<PendingTrigger> {
        loop {
            if self.pending.is_empty() {
                return None;
            }
            let idx = match &mut self.sched {
                SchedState::Fifo => 0,
                SchedState::Random { rng, patience } => {
                    let front = &self.pending[0];
                    if self.steps.len() - front.discovered_at >= *patience {
                        0
                    } else {
                        rng.random_range(0..self.pending.len())
                    }
                }
                SchedState::Custom(c) => {
                    let slice = self.pending.make_contiguous();
                    c.select(slice, &self.structure, &self.tgds).min(slice.len() - 1)
                }
            };
            let t = self.pending.remove(idx).expect("index in range");
            if !self.has_witness(t.tgd, &t.binding) {
                return Some(t);
            }
        }
    }

    fn apply(&mut self, t: PendingTrigger) {
        let step_no = self.step_offset + self.steps.len() + 1;
        let atoms_before = self.structure.atom_count();
        let tgd_id = self.tgds[t.tgd].id.clone();
        let head = &self.compiled[t.tgd].head;
        let mut image: Vec<ElemId> = t.binding.to_vec();
        let mut added_nulls = Vec::new();
        for v in &head.vars[image.len()..] {
            let variable = match v {
                Term::Variable(n) => n.clone(),
                other => other.to_string().into(),
            };
            let e = self.structure.fresh_null(Some(NullProvenance {
                step: step_no,
                tgd: tgd_id.clone(),
                variable,
            }));
            added_nulls.push(self.structure.term(e).clone());
            image.push(e);
        }
        let head_atoms: Vec<(PredId, Vec<ElemId>)> = head
            .atoms
            .iter()
            .map(|pa| {
                let args = pa
                    .args
                    .iter()
                    .map(|s| match *s {
                        Slot::Var(v) => image[v as usize],
                        Slot::Elem(e) => e,
                    })
                    .collect();
                (pa.pred, args)
            })
            .collect();
        for (pred, args) in &head_atoms {
            self.structure.add_atom_ids(*pred, args);
        }
        let added_atoms = (atoms_before..self.structure.atom_count())
            .map(|i| self.structure.atom(i))
            .collect();
        let binding = t.binding.iter().map(|&e| self.structure.term(e).clone()).collect();
        self.steps.push(ChaseStep {
            step: step_no,
            tgd: t.tgd,
            tgd_id,
            binding,
            added_atoms,
            added_nulls,
            atoms_before,
            body_match: t.body_match.into(),
        });
        self.audit(t.tgd, &t.binding);
    }

    fn audit(&mut self, ti: usize, binding: &[ElemId]) {
        let step = self.step_offset + self.steps.len();
        if self.is_active(ti, binding) {
            self.violations.push(format!(
                "step {step}: trigger of `{}` still active after application",
                self.tgds[ti].id
            ));
        }
        if let Some(tw) = self.twins[ti] {
            if self.is_active(tw, binding) {
                self.violations.push(format!(
                    "step {step}: twin `{}` of `{}` active on the same frontier",
                    self.tgds[tw].id, self.tgds[ti].id
                ));
            }
        }
    }

    /// Applies one trigger. Returns false when no active trigger remains.
    pub fn step(&mut self) -> bool {
        if self.scanned < self.structure.atom_count() {
            self.discover();
        }
        let Some(t) = self.pick() else {
            return false;
        };
        let delta = self.structure.atom_count();
        self.apply(t);
        self.check_goal_delta(delta);
        self.discover();
        true
    }

    /// Runs until saturation or until `budget` more triggers have been applied.
    /// With a goal set, also stops as soon as the goal holds.
    pub fn run(&mut self, budget: usize) -> Verdict {
        let mut used = 0;
        loop {
            if self.goal_hit.is_some() {
                return self.verdict_now();
            }
            if used >= budget {
                return self.verdict_now();
            }
            if !self.step() {
                return Verdict::Saturated;
            }
            used += 1;
        }
    }

    /// Saturated iff no queued trigger is still active.
    fn verdict_now(&mut self) -> Verdict {
        self.discover();
        while let Some(front) = self.pending.front() {
            if self.has_witness(front.tgd, &front.binding) {
                self.pending.pop_front();
            } else {
                return Verdict::BudgetExhausted;
            }
        }
        Verdict::Saturated
    }

    fn match_hom(&self, ti: usize, m: &[ElemId]) -> Homomorphism {
        let mut h = Homomorphism::new();
        if let Some(b) = &self.compiled[ti].body {
            for (v, &e) in b.vars.iter().zip(m) {
                h.insert(v.clone(), self.structure.term(e).clone());
            }
        }
        h
    }

    /// Body match of applied step `k` (0-based).
    pub fn step_body_match(&self, k: usize) -> Homomorphism {
        let s = &self.steps[k];
        self.match_hom(s.tgd, &s.body_match)
    }

    /// The queued active triggers with the body match each was found by.
    pub fn pending_active_matches(&mut self) -> Vec<(usize, Homomorphism)> {
        self.discover();
        self.pending
            .iter()
            .filter(|t| !self.has_witness(t.tgd, &t.binding))
            .map(|t| (t.tgd, self.match_hom(t.tgd, &t.body_match)))
            .collect()
    }

    /// The queued triggers that are still active, in queue order.
    pub fn pending_active(&mut self) -> Vec<Trigger> {
        self.discover();
        self.pending
            .iter()
            .filter(|t| !self.has_witness(t.tgd, &t.binding))
            .map(|t| Trigger {
                tgd: t.tgd,
                binding: t.binding.iter().map(|&e| self.structure.term(e).clone()).collect(),
            })
            .collect()
    }

    pub fn into_trace(mut self) -> ChaseTrace {
        let verdict = self.verdict_now();
        let body_vars = self
            .compiled
            .iter()
            .map(|c| c.body.as_ref().map(|b| b.vars.clone()).unwrap_or_default())
            .collect();
        ChaseTrace {
            tgds: self.tgds,
            initial: self.initial,
            steps: self.steps,
            final_structure: self.structure,
            verdict,
            violations: self.violations,
            body_vars,
        }
    }
}

/// All active triggers on `d`, sorted.
pub fn active_triggers(tgds: &[Tgd], d: &Structure) -> Result<Vec<Trigger>> {
    let mut engine = ChaseEngine::new(tgds, d.clone())?;
    let mut out = engine.pending_active();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Applies one trigger to a copy of `d`; returns the result and the atoms added.
pub fn apply_trigger(tgds: &[Tgd], d: &Structure, trigger: &Trigger) -> Result<(Structure, Vec<Atom>)> {
    let tgd = tgds
        .get(trigger.tgd)
        .ok_or_else(|| Error::InactiveTrigger(format!("dependency #{}", trigger.tgd)))?;
    let inactive = || Error::InactiveTrigger(tgd.id.to_string());
    let mut engine = ChaseEngine::new(tgds, d.clone())?;
    let mut binding = Vec::with_capacity(trigger.binding.len());
    for t in &trigger.binding {
        binding.push(engine.structure.element(t).ok_or_else(inactive)?);
    }
    if !engine.is_active(trigger.tgd, &binding) {
        return Err(inactive());
    }
    let body = engine.compiled[trigger.tgd].body.as_ref().ok_or_else(inactive)?;
    let body_match = Matches::new(body, &engine.structure, binding.iter().map(|&e| Some(e)).collect())
        .next()
        .ok_or_else(inactive)?;
    engine.apply(PendingTrigger {
        tgd: trigger.tgd,
        binding: binding.into(),
        body_match: body_match.into(),
        discovered_at: 0,
    });
    let added = engine.steps.pop().map(|s| s.added_atoms).unwrap_or_default();
    Ok((engine.structure, added))
}

pub fn run_chase(tgds: &[Tgd], d0: Structure, budget: usize, scheduler: Scheduler) -> Result<ChaseTrace> {
    let mut engine = ChaseEngine::new(tgds, d0)?.with_scheduler(scheduler);
    engine.run(budget);
    Ok(engine.into_trace())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// The goal held after this many applied steps.
    Entailed(usize),
    NotEntailed,
    Unknown,
}

/// Semi-decides `Chase(tgds, d0) ⊨ goal(goal_args)`.
pub fn chase_entails(
    tgds: &[Tgd],
    d0: Structure,
    goal: &ConjunctiveQuery,
    goal_args: &[Term],
    budget: usize,
    scheduler: Scheduler,
) -> Result<(Entailment, ChaseTrace)> {
    let mut engine = ChaseEngine::new(tgds, d0)?
        .with_scheduler(scheduler)
        .with_goal(goal, goal_args)?;
    let verdict = engine.run(budget);
    let e = match engine.goal_step() {
        Some(k) => Entailment::Entailed(k),
        None if verdict == Verdict::Saturated => Entailment::NotEntailed,
        None => Entailment::Unknown,
    };
    Ok((e, engine.into_trace()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cq::Signature;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn sig() -> Arc<Signature> {
        Arc::new(
            Signature::new()
                .with_predicate("R", 2)
                .unwrap()
                .with_predicate("S", 2)
                .unwrap()
                .with_constant("c")
                .unwrap(),
        )
    }

    fn r_to_s() -> Tgd {
        Tgd::new(
            "t",
            vec![Atom::new("R", vec![v("x"), v("y")])],
            vec![Atom::new("S", vec![v("y"), v("z")])],
        )
        .unwrap()
    }

    #[test]
    fn frontier_and_existentials() {
        let t = r_to_s();
        assert_eq!(t.frontier(), &[Name::from("y")]);
        assert_eq!(t.existentials(), &[Name::from("z")]);
        assert!(Tgd::with_frontier(
            "bad",
            vec![Atom::new("R", vec![v("x"), v("y")])],
            vec![Atom::new("S", vec![v("y"), v("z")])],
            &["x"],
        )
        .is_err());
    }

    #[test]
    fn single_trigger_then_witness() {
        let d = Structure::from_atoms(sig(), &[Atom::new("R", vec![v("a"), v("b")])]).unwrap();
        let tg = active_triggers(&[r_to_s()], &d).unwrap();
        assert_eq!(
            tg,
            vec![Trigger {
                tgd: 0,
                binding: vec![v("b")]
            }]
        );

        let (d2, added) = apply_trigger(&[r_to_s()], &d, &tg[0]).unwrap();
        assert_eq!(added.len(), 1);
        assert_eq!(added[0].args[0], v("b"));
        assert!(matches!(added[0].args[1], Term::Null(_)));
        assert!(active_triggers(&[r_to_s()], &d2).unwrap().is_empty());
        assert!(matches!(
            apply_trigger(&[r_to_s()], &d2, &tg[0]),
            Err(Error::InactiveTrigger(_))
        ));

        let mut d3 = d.clone();
        d3.add_atom(&Atom::new("S", vec![v("b"), Term::constant("c")])).unwrap();
        assert!(active_triggers(&[r_to_s()], &d3).unwrap().is_empty());
    }

    #[test]
    fn no_dependencies_saturates_immediately() {
        let d = Structure::from_atoms(sig(), &[Atom::new("R", vec![v("a"), v("b")])]).unwrap();
        let trace = run_chase(&[], d.clone(), 10, Scheduler::Fifo).unwrap();
        assert_eq!(trace.verdict, Verdict::Saturated);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_structure, d);
    }

    #[test]
    fn infinite_chase_exhausts_budget() {
        // S(x,y) => exists z. S(y,z) never terminates.
        let t = Tgd::new(
            "succ",
            vec![Atom::new("S", vec![v("x"), v("y")])],
            vec![Atom::new("S", vec![v("y"), v("z")])],
        )
        .unwrap();
        let d = Structure::from_atoms(sig(), &[Atom::new("S", vec![v("a"), v("b")])]).unwrap();
        let trace = run_chase(&[t], d, 25, Scheduler::Fifo).unwrap();
        assert_eq!(trace.verdict, Verdict::BudgetExhausted);
        assert_eq!(trace.steps.len(), 25);
        assert!(trace.violations.is_empty());
        for k in 0..trace.steps.len() {
            assert!(trace.stage(k).is_substructure_of(&trace.stage(k + 1)));
        }
        let p = trace.final_structure.provenance(crate::cq::NullId(0)).unwrap();
        assert_eq!((p.step, &*p.tgd, &*p.variable), (1, "succ", "z"));
    }

    #[test]
    fn entailment_verdicts() {
        let d = Structure::from_atoms(sig(), &[Atom::new("R", vec![Term::constant("c"), v("b")])]).unwrap();
        let goal_now = ConjunctiveQuery::new(&["x"], vec![Atom::new("R", vec![v("x"), v("y")])]).unwrap();
        let (e, _) = chase_entails(&[], d.clone(), &goal_now, &[Term::constant("c")], 5, Scheduler::Fifo).unwrap();
        assert_eq!(e, Entailment::Entailed(0));

        let goal_s = ConjunctiveQuery::new::<&str>(&[], vec![Atom::new("S", vec![v("x"), v("y")])]).unwrap();
        let (e, _) = chase_entails(&[], d.clone(), &goal_s, &[], 5, Scheduler::Fifo).unwrap();
        assert_eq!(e, Entailment::NotEntailed);
        let (e, _) = chase_entails(&[r_to_s()], d, &goal_s, &[], 5, Scheduler::Fifo).unwrap();
        assert_eq!(e, Entailment::Entailed(1));
    }

    #[test]
    fn chained_phase_continues_numbering() {
        let d = Structure::from_atoms(sig(), &[Atom::new("R", vec![v("a"), v("b")])]).unwrap();
        let first = run_chase(&[], d, 10, Scheduler::Fifo).unwrap();
        let second = first.chain(&[r_to_s()], 10, Scheduler::Fifo).unwrap();
        assert_eq!(second.verdict, Verdict::Saturated);
        assert_eq!(second.steps[0].step, 1);
        let third = second.chain(&[r_to_s()], 10, Scheduler::Fifo).unwrap();
        assert!(third.steps.is_empty());
    }

    #[test]
    fn random_scheduler_is_reproducible() {
        let t = Tgd::new(
            "succ",
            vec![Atom::new("R", vec![v("x"), v("y")])],
            vec![
                Atom::new("S", vec![v("y"), v("z")]),
                Atom::new("R", vec![v("z"), v("y")]),
            ],
        )
        .unwrap();
        let d = Structure::from_atoms(
            sig(),
            &[
                Atom::new("R", vec![v("a"), v("b")]),
                Atom::new("R", vec![v("b"), v("c")]),
            ],
        )
        .unwrap();
        let a = run_chase(std::slice::from_ref(&t), d.clone(), 50, Scheduler::random(7)).unwrap();
        let b = run_chase(&[t], d, 50, Scheduler::random(7)).unwrap();
        let fa: Vec<String> = a.steps.iter().map(|s| format!("{:?}", s.binding)).collect();
        let fb: Vec<String> = b.steps.iter().map(|s| format!("{:?}", s.binding)).collect();
        assert_eq!(fa, fb);
        assert_eq!(a.verdict, Verdict::Saturated);
    }
}
