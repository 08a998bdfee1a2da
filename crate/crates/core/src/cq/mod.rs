//! Relational structures, conjunctive queries and homomorphism search.
//!
//! Everything else in the crate runs on this substrate. Structures intern
//! their elements and predicates into dense ids; the public types ([`Term`],
//! [`Atom`], [`ConjunctiveQuery`]) stay name-based so that traces and text
//! formats remain readable.

mod homomorphism;
pub(crate) mod matcher;
mod structure;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use homomorphism::{
    canonical_structure, check_models, evaluate, find_homomorphisms, query_of_structure, Homomorphism, Homomorphisms,
};
pub use structure::{ElemId, NullProvenance, Structure};

/// Interned name of a predicate, variable or constant.
pub type Name = Arc<str>;

/// Identifier of a labeled null, unique within one structure (and hence one chase run).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NullId(pub u64);

/// A term: query variable, signature constant or labeled null.
///
/// In structures every kind of term may appear as a domain element. Variables
/// show up there because canonical structures keep their variables verbatim.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Variable(Name),
    Constant(Name),
    Null(NullId),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: &str) -> Self {
        Term::Constant(name.into())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Constant(_))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(name) => write!(f, "{name}"),
            Term::Constant(name) => write!(f, "{name}!"),
            Term::Null(id) => write!(f, "_n{}", id.0),
        }
    }
}

/// A positive relational atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &Term> {
        self.args.iter().filter(|t| t.is_variable())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{arg}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub(crate) u32);

impl PredId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: Name,
    pub arity: usize,
}

/// Predicate names with arities, plus the constants of the signature.
///
/// Predicate and constant names are disjoint and every arity is positive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    predicates: Vec<Predicate>,
    pred_index: HashMap<Name, PredId>,
    constants: Vec<Name>,
    const_index: HashMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a predicate. Redeclaring with the same arity is a no-op.
    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<PredId> {
        if arity == 0 {
            return Err(Error::Signature(format!("predicate `{name}` must have arity >= 1")));
        }
        if self.const_index.contains_key(name) {
            return Err(Error::Signature(format!("`{name}` is already a constant")));
        }
        if let Some(&id) = self.pred_index.get(name) {
            let declared = self.predicates[id.index()].arity;
            if declared != arity {
                return Err(Error::Arity {
                    predicate: name.to_string(),
                    expected: declared,
                    found: arity,
                });
            }
            return Ok(id);
        }
        let id = PredId(self.predicates.len() as u32);
        let name: Name = name.into();
        self.predicates.push(Predicate {
            name: name.clone(),
            arity,
        });
        self.pred_index.insert(name, id);
        Ok(id)
    }

    pub fn add_constant(&mut self, name: &str) -> Result<()> {
        if self.pred_index.contains_key(name) {
            return Err(Error::Signature(format!("`{name}` is already a predicate")));
        }
        if !self.const_index.contains_key(name) {
            self.const_index.insert(name.into(), self.constants.len());
            self.constants.push(name.into());
        }
        Ok(())
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_predicate(name, arity)?;
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self> {
        self.add_constant(name)?;
        Ok(self)
    }

    pub fn predicate_id(&self, name: &str) -> Option<PredId> {
        self.pred_index.get(name).copied()
    }

    pub fn predicate(&self, id: PredId) -> &Predicate {
        &self.predicates[id.index()]
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn constants(&self) -> &[Name] {
        &self.constants
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.const_index.get(name).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.const_index.contains_key(name)
    }

    /// Checks predicate, arity and constants of `atom`, returning its predicate id.
    pub fn check_atom(&self, atom: &Atom) -> Result<PredId> {
        let id = self
            .predicate_id(&atom.predicate)
            .ok_or_else(|| Error::UnknownPredicate(atom.predicate.to_string()))?;
        let arity = self.predicates[id.index()].arity;
        if atom.args.len() != arity {
            return Err(Error::Arity {
                predicate: atom.predicate.to_string(),
                expected: arity,
                found: atom.args.len(),
            });
        }
        for arg in &atom.args {
            if let Term::Constant(c) = arg {
                if !self.has_constant(c) {
                    return Err(Error::UnknownConstant(c.to_string()));
                }
            }
        }
        Ok(id)
    }
}

/// `Q(x̄) = ∃ȳ Ψ(ȳ, x̄)`: an ordered tuple of free variables over a body of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjunctiveQuery {
    free: Vec<Name>,
    body: Vec<Atom>,
}

impl ConjunctiveQuery {
    /// Builds a query. Free variables must be distinct and occur in the body;
    /// they are given by name, so constants can never be listed as free.
    pub fn new<S: AsRef<str>>(free: &[S], body: Vec<Atom>) -> Result<Self> {
        let free: Vec<Name> = free.iter().map(|s| Name::from(s.as_ref())).collect();
        let body_vars: BTreeSet<&str> = body
            .iter()
            .flat_map(|a| a.variables())
            .filter_map(|t| match t {
                Term::Variable(n) => Some(&**n),
                _ => None,
            })
            .collect();
        let mut seen = BTreeSet::new();
        for v in &free {
            if !body_vars.contains(&**v) {
                return Err(Error::Query(format!("free variable `{v}` does not occur in the body")));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::Query(format!("free variable `{v}` listed twice")));
            }
        }
        for atom in &body {
            if atom.args.iter().any(|t| matches!(t, Term::Null(_))) {
                return Err(Error::Query(format!("query atom `{atom}` contains a null")));
            }
        }
        Ok(ConjunctiveQuery { free, body })
    }

    /// Builds a query and checks it against `signature`.
    pub fn with_signature<S: AsRef<str>>(signature: &Signature, free: &[S], body: Vec<Atom>) -> Result<Self> {
        let q = Self::new(free, body)?;
        q.check(signature)?;
        Ok(q)
    }

    pub fn check(&self, signature: &Signature) -> Result<()> {
        for atom in &self.body {
            signature.check_atom(atom)?;
        }
        Ok(())
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.free
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn is_boolean(&self) -> bool {
        self.free.is_empty()
    }

    /// All variables of the body in order of first occurrence.
    pub fn variables(&self) -> Vec<Name> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for atom in &self.body {
            for t in &atom.args {
                if let Term::Variable(n) = t {
                    if seen.insert(n.clone()) {
                        out.push(n.clone());
                    }
                }
            }
        }
        out
    }

    pub fn bound_vars(&self) -> Vec<Name> {
        self.variables()
            .into_iter()
            .filter(|v| !self.free.contains(v))
            .collect()
    }

    /// The body with each free variable replaced by the matching term of `args`.
    pub fn instantiate(&self, args: &[Term]) -> Result<Vec<Atom>> {
        if args.len() != self.free.len() {
            return Err(Error::Query(format!(
                "expected {} arguments, got {}",
                self.free.len(),
                args.len()
            )));
        }
        let map: HashMap<&str, &Term> = self.free.iter().map(|n| &**n).zip(args.iter()).collect();
        Ok(self
            .body
            .iter()
            .map(|a| Atom {
                predicate: a.predicate.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Variable(n) => map.get(&**n).map(|t| (*t).clone()).unwrap_or_else(|| t.clone()),
                        other => other.clone(),
                    })
                    .collect(),
            })
            .collect())
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(")?;
        for (i, v) in self.free.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ") :- ")?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ".")
    }
}
