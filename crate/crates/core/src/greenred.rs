//! Green-red signature, dependency generation from views, and the
//! determinacy semi-decision by chase.
//!
//! A view `Q(ȳ) = ∃x̄ Φ(x̄,ȳ)` yields the pair `Q:G->R` and `Q:R->G`, which
//! copy every match of one colored body into the other color while keeping
//! the free variables. Views determine `Q₀` iff the chase of these pairs from
//! `A[G(Q₀)(ā)]` eventually contains `R(Q₀)(ā)`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chase::{ChaseEngine, ChaseTrace, Scheduler, Tgd, Verdict};
use crate::cq::{Atom, ConjunctiveQuery, Homomorphism, Name, Signature, Structure, Term};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Green,
    Red,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Green => Color::Red,
            Color::Red => Color::Green,
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Color::Green => "G_",
            Color::Red => "R_",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Green => 'G',
            Color::Red => 'R',
        }
    }

    pub fn colored_name(self, predicate: &str) -> String {
        format!("{}{predicate}", self.prefix())
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Splits a colored predicate name into its color and base name.
pub fn color_of(predicate: &str) -> Option<(Color, &str)> {
    if let Some(base) = predicate.strip_prefix("G_") {
        Some((Color::Green, base))
    } else {
        predicate.strip_prefix("R_").map(|base| (Color::Red, base))
    }
}

/// `Σ̄`: a green and a red copy of every base predicate; constants stay shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredSignature {
    base: Arc<Signature>,
    colored: Arc<Signature>,
}

impl ColoredSignature {
    /// Base predicate names must not already carry a color prefix.
    pub fn new(base: Arc<Signature>) -> Result<Self> {
        let mut colored = Signature::new();
        for c in base.constants() {
            colored.add_constant(c)?;
        }
        for p in base.predicates() {
            if color_of(&p.name).is_some() {
                return Err(Error::Signature(format!(
                    "base predicate `{}` already looks colored",
                    p.name
                )));
            }
            for color in [Color::Green, Color::Red] {
                colored.add_predicate(&color.colored_name(&p.name), p.arity)?;
            }
        }
        Ok(ColoredSignature {
            base,
            colored: Arc::new(colored),
        })
    }

    /// Adds constants (e.g. the fresh tuple of a determinacy run) to both layers.
    pub fn with_constants<S: AsRef<str>>(&self, constants: &[S]) -> Result<Self> {
        let mut base = (*self.base).clone();
        let mut colored = (*self.colored).clone();
        for c in constants {
            base.add_constant(c.as_ref())?;
            colored.add_constant(c.as_ref())?;
        }
        Ok(ColoredSignature {
            base: Arc::new(base),
            colored: Arc::new(colored),
        })
    }

    pub fn base(&self) -> &Arc<Signature> {
        &self.base
    }

    pub fn colored(&self) -> &Arc<Signature> {
        &self.colored
    }
}

pub fn colorize_atom(atom: &Atom, color: Color) -> Result<Atom> {
    if color_of(&atom.predicate).is_some() {
        return Err(Error::AlreadyColored(atom.to_string()));
    }
    Ok(Atom {
        predicate: color.colored_name(&atom.predicate).into(),
        args: atom.args.clone(),
    })
}

pub fn colorize_atoms(atoms: &[Atom], color: Color) -> Result<Vec<Atom>> {
    atoms.iter().map(|a| colorize_atom(a, color)).collect()
}

pub fn colorize_query(q: &ConjunctiveQuery, color: Color) -> Result<ConjunctiveQuery> {
    ConjunctiveQuery::new(q.free_vars(), colorize_atoms(q.body(), color)?)
}

/// Colors every atom of a base structure, over `sig`'s colored layer.
pub fn colorize_structure(d: &Structure, color: Color, sig: &ColoredSignature) -> Result<Structure> {
    let atoms = colorize_atoms(&d.atoms().collect::<Vec<_>>(), color)?;
    Structure::from_atoms(sig.colored().clone(), &atoms)
}

/// Color erasure.
pub fn dalt_atom(atom: &Atom) -> Result<Atom> {
    let (_, base) = color_of(&atom.predicate).ok_or_else(|| Error::NotColored(atom.to_string()))?;
    Ok(Atom {
        predicate: base.into(),
        args: atom.args.clone(),
    })
}

pub fn dalt_atoms(atoms: &[Atom]) -> Result<Vec<Atom>> {
    atoms.iter().map(dalt_atom).collect()
}

pub fn dalt_query(q: &ConjunctiveQuery) -> Result<ConjunctiveQuery> {
    ConjunctiveQuery::new(q.free_vars(), dalt_atoms(q.body())?)
}

pub fn dalt_structure(d: &Structure, sig: &ColoredSignature) -> Result<Structure> {
    let atoms = dalt_atoms(&d.atoms().collect::<Vec<_>>())?;
    Structure::from_atoms(sig.base().clone(), &atoms)
}

fn fresh_name(base: &str, taken: &HashSet<Name>) -> Name {
    let mut n = format!("{base}'");
    while taken.contains(n.as_str()) {
        n.push('\'');
    }
    n.into()
}

/// Renames the bound variables of `q` to fresh primed names.
fn rename_bound(q: &ConjunctiveQuery) -> Vec<Atom> {
    let mut taken: HashSet<Name> = q.variables().into_iter().collect();
    let mut map = std::collections::HashMap::new();
    for v in q.bound_vars() {
        let fresh = fresh_name(&v, &taken);
        taken.insert(fresh.clone());
        map.insert(v, fresh);
    }
    q.body()
        .iter()
        .map(|a| Atom {
            predicate: a.predicate.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Variable(n) => Term::Variable(map.get(n).cloned().unwrap_or_else(|| n.clone())),
                    other => other.clone(),
                })
                .collect(),
        })
        .collect()
}

pub fn tgd_id(view: &str, from: Color) -> String {
    format!("{view}:{}->{}", from.letter(), from.opposite().letter())
}

/// `Q^{from→to}`: body `from(Φ)`, head `to(Φ)` with bound variables renamed.
pub fn view_tgd(name: &str, q: &ConjunctiveQuery, from: Color) -> Result<Tgd> {
    let body = colorize_atoms(q.body(), from)?;
    let head = colorize_atoms(&rename_bound(q), from.opposite())?;
    Tgd::with_frontier(&tgd_id(name, from), body, head, q.free_vars())
}

/// Two dependencies per view, `G->R` first; twins sit at adjacent indices.
pub fn generate_tgds(views: &[(Name, ConjunctiveQuery)]) -> Result<Vec<Tgd>> {
    let mut out = Vec::with_capacity(views.len() * 2);
    for (name, q) in views {
        out.push(view_tgd(name, q, Color::Green)?);
        out.push(view_tgd(name, q, Color::Red)?);
    }
    Ok(out)
}

/// Pairs each `V:G->R` with `V:R->G` by id.
pub fn twins_of(tgds: &[Tgd]) -> Vec<Option<usize>> {
    let index: std::collections::HashMap<&str, usize> = tgds.iter().enumerate().map(|(i, t)| (&**t.id(), i)).collect();
    tgds.iter()
        .map(|t| {
            let id = &**t.id();
            let twin = match id.strip_suffix(":G->R") {
                Some(v) => format!("{v}:R->G"),
                None => format!("{}:G->R", id.strip_suffix(":R->G")?),
            };
            index.get(twin.as_str()).copied()
        })
        .collect()
}

/// Views and a query over one base signature.
#[derive(Clone, Debug)]
pub struct DeterminacyInstance {
    views: Vec<(Name, ConjunctiveQuery)>,
    query: ConjunctiveQuery,
    signature: Arc<Signature>,
}

impl DeterminacyInstance {
    /// Infers the base signature from all bodies; view names must be unique.
    pub fn new(views: Vec<(Name, ConjunctiveQuery)>, query: ConjunctiveQuery) -> Result<Self> {
        let all = views.iter().flat_map(|(_, q)| q.body()).chain(query.body());
        let sig = crate::parse::infer_signature(all)?;
        Self::with_signature(Arc::new(sig), views, query)
    }

    pub fn with_signature(
        signature: Arc<Signature>,
        views: Vec<(Name, ConjunctiveQuery)>,
        query: ConjunctiveQuery,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for (n, q) in &views {
            if !names.insert(n.clone()) {
                return Err(Error::Query(format!("view `{n}` defined twice")));
            }
            q.check(&signature)?;
        }
        query.check(&signature)?;
        Ok(DeterminacyInstance {
            views,
            query,
            signature,
        })
    }

    pub fn views(&self) -> &[(Name, ConjunctiveQuery)] {
        &self.views
    }

    pub fn query(&self) -> &ConjunctiveQuery {
        &self.query
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeterminacyVerdict {
    /// The goal held after `step` applications; `witness` maps the goal's variables.
    Determined {
        step: usize,
        witness: Homomorphism,
    },
    NotDetermined,
    Unknown {
        budget: usize,
    },
}

impl DeterminacyVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            DeterminacyVerdict::Determined { .. } => "Determined",
            DeterminacyVerdict::NotDetermined => "NotDetermined",
            DeterminacyVerdict::Unknown { .. } => "Unknown",
        }
    }
}

/// Verdict plus the trace it was read off.
#[derive(Clone, Debug)]
pub struct DeterminacyReport {
    pub verdict: DeterminacyVerdict,
    pub trace: ChaseTrace,
    /// The fresh constants standing for the query's free variables.
    pub tuple: Vec<Term>,
    pub budget_used: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub verdict: String,
    pub step: Option<usize>,
    pub budget_used: usize,
}

impl DeterminacyReport {
    pub fn to_json(&self) -> VerdictJson {
        VerdictJson {
            verdict: self.verdict.name().to_string(),
            step: match &self.verdict {
                DeterminacyVerdict::Determined { step, .. } => Some(*step),
                _ => None,
            },
            budget_used: self.budget_used,
        }
    }
}

fn fresh_constants(q: &ConjunctiveQuery, sig: &Signature) -> Vec<Name> {
    let mut taken: HashSet<Name> = sig.constants().iter().cloned().collect();
    taken.extend(sig.predicates().iter().map(|p| p.name.clone()));
    q.free_vars()
        .iter()
        .map(|v| {
            let mut n = format!("a_{v}");
            while taken.contains(n.as_str()) {
                n.push('\'');
            }
            let n: Name = n.into();
            taken.insert(n.clone());
            n
        })
        .collect()
}

/// The chase run behind [`decide_determinacy`], from `start(Q₀)(ā)` towards
/// `start.opposite()(Q₀)(ā)`. With `Green` this is the standard procedure;
/// `Red` is its mirror image.
pub fn decide_determinacy_from(
    inst: &DeterminacyInstance,
    budget: usize,
    scheduler: Scheduler,
    start: Color,
) -> Result<DeterminacyReport> {
    let q0 = &inst.query;
    let consts = fresh_constants(q0, &inst.signature);
    let csig = ColoredSignature::new(inst.signature.clone())?.with_constants(&consts)?;
    let tuple: Vec<Term> = consts.iter().map(|c| Term::Constant(c.clone())).collect();
    let start_atoms = colorize_atoms(&q0.instantiate(&tuple)?, start)?;
    let d0 = Structure::from_atoms(csig.colored().clone(), &start_atoms)?;
    let tgds = generate_tgds(&inst.views)?;
    let twins = twins_of(&tgds);
    let goal = colorize_query(q0, start.opposite())?;
    let mut engine = ChaseEngine::new(&tgds, d0)?
        .with_scheduler(scheduler)
        .with_twins(twins)
        .with_goal(&goal, &tuple)?;
    let verdict = engine.run(budget);
    let used = engine.applied();
    let out = match (engine.goal_step(), engine.goal_witness(&goal)) {
        (Some(step), Some(witness)) => DeterminacyVerdict::Determined { step, witness },
        _ if verdict == Verdict::Saturated => DeterminacyVerdict::NotDetermined,
        _ => DeterminacyVerdict::Unknown { budget },
    };
    Ok(DeterminacyReport {
        verdict: out,
        trace: engine.into_trace(),
        tuple,
        budget_used: used,
    })
}

pub fn decide_determinacy(
    inst: &DeterminacyInstance,
    budget: usize,
    scheduler: Scheduler,
) -> Result<DeterminacyReport> {
    decide_determinacy_from(inst, budget, scheduler, Color::Green)
}
