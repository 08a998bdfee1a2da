use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{Atom, Name, NullId, PredId, Signature, Term};
use crate::error::Result;

/// Dense id of a domain element inside one [`Structure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub(crate) u32);

impl ElemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) type AtomId = u32;

/// Where a labeled null came from: the chase step, the dependency and the
/// existential head variable it instantiates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullProvenance {
    pub step: usize,
    pub tgd: Name,
    pub variable: Name,
}

/// A relational structure: a set of ground atoms over a signature.
///
/// The domain is every term occurring in an atom plus every signature
/// constant. Atoms are append-only and deduplicated, so the atoms present
/// after `n` insertions form a substructure of every later state; chase stages
/// are recovered with [`Structure::prefix`].
#[derive(Clone)]
pub struct Structure {
    signature: Arc<Signature>,
    elements: Vec<Term>,
    elem_index: HashMap<Term, ElemId>,
    atoms: Vec<(PredId, Box<[ElemId]>)>,
    atom_index: HashMap<(PredId, Box<[ElemId]>), AtomId>,
    by_pred: Vec<Vec<AtomId>>,
    by_arg: HashMap<(PredId, u8, ElemId), Vec<AtomId>>,
    by_first: HashMap<ElemId, Vec<AtomId>>,
    next_null: u64,
    provenance: HashMap<NullId, NullProvenance>,
}

impl Structure {
    pub fn new(signature: Arc<Signature>) -> Self {
        let mut s = Structure {
            by_pred: vec![Vec::new(); signature.predicates().len()],
            signature,
            elements: Vec::new(),
            elem_index: HashMap::new(),
            atoms: Vec::new(),
            atom_index: HashMap::new(),
            by_arg: HashMap::new(),
            by_first: HashMap::new(),
            next_null: 0,
            provenance: HashMap::new(),
        };
        let constants: Vec<Name> = s.signature.constants().to_vec();
        for c in constants {
            s.intern(&Term::Constant(c));
        }
        s
    }

    pub fn from_atoms(signature: Arc<Signature>, atoms: &[Atom]) -> Result<Self> {
        let mut s = Structure::new(signature);
        for a in atoms {
            s.add_atom(a)?;
        }
        Ok(s)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    /// Adds an atom; returns whether it was new.
    pub fn add_atom(&mut self, atom: &Atom) -> Result<bool> {
        let pred = self.signature.check_atom(atom)?;
        let args: Vec<ElemId> = atom.args.iter().map(|t| self.intern(t)).collect();
        if let Some(max) = atom
            .args
            .iter()
            .filter_map(|t| match t {
                Term::Null(id) => Some(id.0),
                _ => None,
            })
            .max()
        {
            self.next_null = self.next_null.max(max + 1);
        }
        Ok(self.add_atom_ids(pred, &args))
    }

    pub(crate) fn add_atom_ids(&mut self, pred: PredId, args: &[ElemId]) -> bool {
        let key: Box<[ElemId]> = args.into();
        if self.atom_index.contains_key(&(pred, key.clone())) {
            return false;
        }
        let id = self.atoms.len() as AtomId;
        for (pos, &e) in args.iter().enumerate() {
            self.by_arg.entry((pred, pos as u8, e)).or_default().push(id);
        }
        self.by_pred[pred.index()].push(id);
        self.by_first.entry(args[0]).or_default().push(id);
        self.atom_index.insert((pred, key.clone()), id);
        self.atoms.push((pred, key));
        true
    }

    pub(crate) fn intern(&mut self, term: &Term) -> ElemId {
        if let Some(&id) = self.elem_index.get(term) {
            return id;
        }
        let id = ElemId(self.elements.len() as u32);
        self.elements.push(term.clone());
        self.elem_index.insert(term.clone(), id);
        id
    }

    /// Looks up an element without interning it.
    pub fn element(&self, term: &Term) -> Option<ElemId> {
        self.elem_index.get(term).copied()
    }

    pub fn term(&self, id: ElemId) -> &Term {
        &self.elements[id.index()]
    }

    pub(crate) fn fresh_null(&mut self, provenance: Option<NullProvenance>) -> ElemId {
        let null = NullId(self.next_null);
        self.next_null += 1;
        if let Some(p) = provenance {
            self.provenance.insert(null, p);
        }
        self.intern(&Term::Null(null))
    }

    pub fn provenance(&self, null: NullId) -> Option<&NullProvenance> {
        self.provenance.get(&null)
    }

    pub fn domain(&self) -> &[Term] {
        &self.elements
    }

    pub fn domain_size(&self) -> usize {
        self.elements.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub(crate) fn atom_ids(&self, id: AtomId) -> (PredId, &[ElemId]) {
        let (p, args) = &self.atoms[id as usize];
        (*p, args)
    }

    pub(crate) fn find_atom(&self, pred: PredId, args: &[ElemId]) -> Option<AtomId> {
        self.atom_index.get(&(pred, Box::from(args))).copied()
    }

    pub fn atom(&self, index: usize) -> Atom {
        let (pred, args) = &self.atoms[index];
        Atom {
            predicate: self.signature.predicate(*pred).name.clone(),
            args: args.iter().map(|&e| self.term(e).clone()).collect(),
        }
    }

    /// Atoms in insertion order.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        (0..self.atoms.len()).map(move |i| self.atom(i))
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        let Some(pred) = self.signature.predicate_id(&atom.predicate) else {
            return false;
        };
        let mut args = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match self.element(t) {
                Some(e) => args.push(e),
                None => return false,
            }
        }
        self.find_atom(pred, &args).is_some()
    }

    pub(crate) fn by_pred(&self, pred: PredId) -> &[AtomId] {
        &self.by_pred[pred.index()]
    }

    pub(crate) fn by_arg(&self, pred: PredId, pos: usize, elem: ElemId) -> &[AtomId] {
        self.by_arg
            .get(&(pred, pos as u8, elem))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Atoms of predicate `pred` with their insertion index.
    pub fn atoms_of(&self, pred: &str) -> Vec<(usize, Atom)> {
        match self.signature.predicate_id(pred) {
            Some(p) => self
                .by_pred(p)
                .iter()
                .map(|&id| (id as usize, self.atom(id as usize)))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Every atom whose first argument is `elem`, in insertion order.
    pub fn out_atoms(&self, elem: &Term) -> Vec<Atom> {
        let Some(e) = self.element(elem) else {
            return Vec::new();
        };
        self.by_first
            .get(&e)
            .map(|ids| ids.iter().map(|&id| self.atom(id as usize)).collect())
            .unwrap_or_default()
    }

    /// Atoms of predicate `pred` whose argument at `pos` is `elem`.
    pub fn atoms_with(&self, pred: &str, pos: usize, elem: &Term) -> Vec<Atom> {
        let (Some(p), Some(e)) = (self.signature.predicate_id(pred), self.element(elem)) else {
            return Vec::new();
        };
        self.by_arg(p, pos, e)
            .iter()
            .map(|&id| self.atom(id as usize))
            .collect()
    }

    /// The substructure formed by the first `n` atoms, with null provenance kept.
    pub fn prefix(&self, n: usize) -> Structure {
        let mut s = Structure::new(self.signature.clone());
        for (pred, args) in &self.atoms[..n.min(self.atoms.len())] {
            let ids: Vec<ElemId> = args.iter().map(|&e| s.intern(self.term(e))).collect();
            s.add_atom_ids(*pred, &ids);
        }
        s.next_null = self.next_null;
        s.provenance = self.provenance.clone();
        s
    }

    /// True iff every atom of `self` is an atom of `other` (identity is a homomorphism).
    pub fn is_substructure_of(&self, other: &Structure) -> bool {
        self.atoms().all(|a| other.contains(&a))
    }

    pub fn next_null_id(&self) -> u64 {
        self.next_null
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Structure")
            .field("domain", &self.elements.len())
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.atoms() {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}

impl PartialEq for Structure {
    /// Same signature and the same set of atoms.
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.atom_count() == other.atom_count() && self.is_substructure_of(other)
    }
}
