use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::matcher::{Matches, Pattern};
use super::structure::{ElemId, Structure};
use super::{Atom, ConjunctiveQuery, Signature, Term};
use crate::error::{Error, Result};

/// A map between domains that fixes constants and preserves atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Homomorphism {
    map: BTreeMap<Term, Term>,
}

impl Homomorphism {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity_on(structure: &Structure) -> Self {
        Homomorphism {
            map: structure.domain().iter().map(|t| (t.clone(), t.clone())).collect(),
        }
    }

    pub fn insert(&mut self, from: Term, to: Term) {
        self.map.insert(from, to);
    }

    pub fn with(mut self, from: Term, to: Term) -> Self {
        self.insert(from, to);
        self
    }

    pub fn get(&self, from: &Term) -> Option<&Term> {
        self.map.get(from)
    }

    /// Image of `t`; constants are fixed points even when not listed.
    pub fn apply(&self, t: &Term) -> Option<Term> {
        match self.map.get(t) {
            Some(img) => Some(img.clone()),
            None if t.is_constant() => Some(t.clone()),
            None => None,
        }
    }

    pub fn apply_atom(&self, atom: &Atom) -> Option<Atom> {
        let args = atom.args.iter().map(|t| self.apply(t)).collect::<Option<Vec<_>>>()?;
        Some(Atom {
            predicate: atom.predicate.clone(),
            args,
        })
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self
                .map
                .iter()
                .filter_map(|(k, v)| other.apply(v).map(|img| (k.clone(), img)))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Checks the homomorphism conditions of `self` from `source` into `target`.
    pub fn is_homomorphism(&self, source: &Structure, target: &Structure) -> bool {
        source.domain().iter().all(|t| match self.apply(t) {
            Some(img) => !t.is_constant() || img == *t,
            None => false,
        }) && source
            .atoms()
            .all(|a| self.apply_atom(&a).is_some_and(|img| target.contains(&img)))
    }
}

/// Lazy stream of the homomorphisms extending a seed. See [`find_homomorphisms`].
pub struct Homomorphisms<'a> {
    inner: Option<Matches<'a, Pattern>>,
    target: &'a Structure,
}

impl Iterator for Homomorphisms<'_> {
    type Item = Homomorphism;

    fn next(&mut self) -> Option<Homomorphism> {
        let m = self.inner.as_mut()?;
        let binding = m.next()?;
        let vars = &m.pattern().vars;
        let mut h = Homomorphism::new();
        for c in self.target.signature().constants() {
            h.insert(Term::Constant(c.clone()), Term::Constant(c.clone()));
        }
        for (v, e) in vars.iter().zip(binding) {
            h.insert(v.clone(), self.target.term(e).clone());
        }
        Some(h)
    }
}

fn empty(target: &Structure) -> Homomorphisms<'_> {
    Homomorphisms { inner: None, target }
}

/// All homomorphisms from `source` to `target` that extend `seed`.
///
/// Enumeration order is deterministic: the matcher repeatedly picks the
/// source atom with the fewest candidate images, breaking ties by atom order,
/// and tries candidates in target insertion order. A seed that moves a
/// constant, or names an element outside either domain, yields nothing.
pub fn find_homomorphisms<'a>(source: &Structure, target: &'a Structure, seed: &Homomorphism) -> Homomorphisms<'a> {
    let atoms: Vec<Atom> = source.atoms().collect();
    // Non-constant source elements that occur in no atom cannot exist, but
    // source constants missing from the target signature would.
    for c in source.signature().constants() {
        if !target.signature().has_constant(c) {
            return empty(target);
        }
    }
    let mut leading = Vec::new();
    let mut seed_images = Vec::new();
    for (from, to) in seed.iter() {
        if source.element(from).is_none() {
            return empty(target);
        }
        let Some(img) = target.element(to) else {
            return empty(target);
        };
        if from.is_constant() {
            if from != to {
                return empty(target);
            }
            continue;
        }
        leading.push(from.clone());
        seed_images.push(Some(img));
    }
    let pattern = match Pattern::compile(target.signature(), &atoms, &leading) {
        Ok(Some(p)) => p,
        _ => return empty(target),
    };
    Homomorphisms {
        inner: Some(Matches::new(pattern, target, seed_images)),
        target,
    }
}

/// `A[Ψ]`: variables and constants of the body as elements, body atoms verbatim.
pub fn canonical_structure(q: &ConjunctiveQuery, signature: Arc<Signature>) -> Result<Structure> {
    Structure::from_atoms(signature, q.body())
}

/// The unique query whose canonical structure is `d` and whose free variables
/// are `free` (in that order). Nulls become variables named after the null.
pub fn query_of_structure(d: &Structure, free: &[Term]) -> Result<ConjunctiveQuery> {
    let rename = |t: &Term| match t {
        Term::Null(id) => Term::Variable(format!("_n{}", id.0).into()),
        other => other.clone(),
    };
    let mut names = Vec::with_capacity(free.len());
    for t in free {
        if t.is_constant() || d.element(t).is_none() {
            return Err(Error::Query(format!(
                "`{t}` is not a non-constant element of the structure"
            )));
        }
        match rename(t) {
            Term::Variable(n) => names.push(n),
            _ => unreachable!(),
        }
    }
    let body = d
        .atoms()
        .map(|a| Atom {
            predicate: a.predicate,
            args: a.args.iter().map(rename).collect(),
        })
        .collect();
    ConjunctiveQuery::new(&names, body)
}

fn compile_query(q: &ConjunctiveQuery, d: &Structure) -> Option<Pattern> {
    let leading: Vec<Term> = q.free_vars().iter().map(|n| Term::Variable(n.clone())).collect();
    Pattern::compile(d.signature(), q.body(), &leading).ok().flatten()
}

/// `Q(D) = { ā : D ⊨ Q(ā) }`.
pub fn evaluate(q: &ConjunctiveQuery, d: &Structure) -> BTreeSet<Vec<Term>> {
    let Some(pattern) = compile_query(q, d) else {
        return BTreeSet::new();
    };
    let k = q.free_vars().len();
    Matches::new(&pattern, d, vec![])
        .map(|b| b[..k].iter().map(|&e| d.term(e).clone()).collect())
        .collect()
}

/// `D ⊨ Q(ā)`. Arguments outside the domain simply make this false.
pub fn check_models(d: &Structure, q: &ConjunctiveQuery, args: &[Term]) -> bool {
    if args.len() != q.free_vars().len() {
        return false;
    }
    let mut seed: Vec<Option<ElemId>> = Vec::with_capacity(args.len());
    for a in args {
        match d.element(a) {
            Some(e) => seed.push(Some(e)),
            None => return false,
        }
    }
    let Some(pattern) = compile_query(q, d) else {
        return false;
    };
    Matches::new(&pattern, d, seed).next().is_some()
}
