//! Backtracking matcher for conjunctions of atoms.
//!
//! The next atom to match is always the one with the fewest candidate target
//! atoms under the current partial binding (looked up through the
//! per-predicate and per-argument indexes). Ties go to the earlier pattern
//! atom; candidates are tried in insertion order, so enumeration is
//! deterministic for a given pattern and structure.

use std::borrow::Borrow;
use std::collections::HashMap;

use super::structure::{AtomId, ElemId, Structure};
use super::{Atom, PredId, Signature, Term};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Var(u32),
    Elem(ElemId),
}

#[derive(Clone, Debug)]
pub(crate) struct PatternAtom {
    pub pred: PredId,
    pub args: Vec<Slot>,
}

/// A compiled conjunction: constants resolved to element ids, every other
/// term numbered as a pattern variable.
#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    pub atoms: Vec<PatternAtom>,
    pub vars: Vec<Term>,
}

impl Pattern {
    /// Compiles `atoms` against `signature`. Variables listed in `leading`
    /// receive indices `0..leading.len()` in that order.
    ///
    /// Returns `Ok(None)` when the conjunction mentions a predicate or constant
    /// the signature lacks, in which case it can never match.
    pub fn compile(signature: &Signature, atoms: &[Atom], leading: &[Term]) -> Result<Option<Pattern>> {
        let mut index: HashMap<Term, u32> = HashMap::new();
        let mut vars = Vec::new();
        for t in leading {
            if !index.contains_key(t) {
                index.insert(t.clone(), vars.len() as u32);
                vars.push(t.clone());
            }
        }
        let mut out = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let Some(pred) = signature.predicate_id(&atom.predicate) else {
                return Ok(None);
            };
            let arity = signature.predicate(pred).arity;
            if arity != atom.args.len() {
                return Err(Error::Arity {
                    predicate: atom.predicate.to_string(),
                    expected: arity,
                    found: atom.args.len(),
                });
            }
            let mut args = Vec::with_capacity(arity);
            for t in &atom.args {
                match t {
                    Term::Constant(c) => match signature.constant_index(c) {
                        Some(i) => args.push(Slot::Elem(ElemId(i as u32))),
                        None => return Ok(None),
                    },
                    other => {
                        let v = *index.entry(other.clone()).or_insert_with(|| {
                            vars.push(other.clone());
                            (vars.len() - 1) as u32
                        });
                        args.push(Slot::Var(v));
                    }
                }
            }
            out.push(PatternAtom { pred, args });
        }
        Ok(Some(Pattern { atoms: out, vars }))
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }
}

struct Frame<'a> {
    atom: usize,
    cands: &'a [AtomId],
    next: usize,
    trail_mark: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Descend,
    Backtrack,
    Done,
}

/// Lazy enumeration of all total bindings of a pattern into a structure.
pub(crate) struct Matches<'a, P: Borrow<Pattern>> {
    pattern: P,
    target: &'a Structure,
    binding: Vec<Option<ElemId>>,
    matched: Vec<bool>,
    trail: Vec<u32>,
    frames: Vec<Frame<'a>>,
    /// Pattern atoms with index below `.0` may only match atoms with id below `.1`.
    old_only: Option<(usize, AtomId)>,
    state: State,
}

impl<'a, P: Borrow<Pattern>> Matches<'a, P> {
    pub fn new(pattern: P, target: &'a Structure, seed: Vec<Option<ElemId>>) -> Self {
        let n = pattern.borrow().var_count();
        let atoms = pattern.borrow().atoms.len();
        let mut binding = seed;
        binding.resize(n, None);
        Matches {
            pattern,
            target,
            binding,
            matched: vec![false; atoms],
            trail: Vec::new(),
            frames: Vec::new(),
            old_only: None,
            state: State::Descend,
        }
    }

    /// Matches that map pattern atom `anchor` onto target atom `atom_id`, with
    /// every earlier pattern atom mapped to an atom older than `delta_start`.
    /// Each match using at least one atom at or after `delta_start` is produced
    /// by exactly one anchor position (the first such atom in pattern order).
    pub fn anchored(
        pattern: P,
        target: &'a Structure,
        seed: Vec<Option<ElemId>>,
        anchor: usize,
        atom_id: AtomId,
        delta_start: AtomId,
    ) -> Option<Self> {
        let mut m = Matches::new(pattern, target, seed);
        m.old_only = Some((anchor, delta_start));
        if !m.unify(anchor, atom_id) {
            return None;
        }
        m.matched[anchor] = true;
        m.trail.clear();
        Some(m)
    }

    fn is_bound(&self, slot: Slot) -> Option<ElemId> {
        match slot {
            Slot::Elem(e) => Some(e),
            Slot::Var(v) => self.binding[v as usize],
        }
    }

    fn select(&self) -> Option<(usize, &'a [AtomId])> {
        let pattern = self.pattern.borrow();
        let target = self.target;
        let mut best: Option<(usize, &'a [AtomId])> = None;
        for (i, atom) in pattern.atoms.iter().enumerate() {
            if self.matched[i] {
                continue;
            }
            let mut cands: Option<&'a [AtomId]> = None;
            for (pos, &slot) in atom.args.iter().enumerate() {
                if let Some(e) = self.is_bound(slot) {
                    let c = target.by_arg(atom.pred, pos, e);
                    if cands.is_none_or(|cur| c.len() < cur.len()) {
                        cands = Some(c);
                    }
                }
            }
            let cands = cands.unwrap_or_else(|| target.by_pred(atom.pred));
            if best.is_none_or(|(_, b)| cands.len() < b.len()) {
                best = Some((i, cands));
                if cands.len() <= 1 {
                    break;
                }
            }
        }
        best
    }

    fn unify(&mut self, atom: usize, id: AtomId) -> bool {
        if let Some((limit, delta_start)) = self.old_only {
            if atom < limit && id >= delta_start {
                return false;
            }
        }
        let (pred, args) = self.target.atom_ids(id);
        let pattern = self.pattern.borrow();
        let pa = &pattern.atoms[atom];
        if pred != pa.pred {
            return false;
        }
        for (pos, &slot) in pa.args.iter().enumerate() {
            let e = args[pos];
            match slot {
                Slot::Elem(c) => {
                    if c != e {
                        return false;
                    }
                }
                Slot::Var(v) => match self.binding[v as usize] {
                    Some(b) if b != e => return false,
                    Some(_) => {}
                    None => {
                        self.binding[v as usize] = Some(e);
                        self.trail.push(v);
                    }
                },
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.binding[v as usize] = None;
        }
    }

    pub fn pattern(&self) -> &Pattern {
        self.pattern.borrow()
    }
}

impl<P: Borrow<Pattern>> Iterator for Matches<'_, P> {
    /// One element per pattern variable.
    type Item = Vec<ElemId>;

    fn next(&mut self) -> Option<Vec<ElemId>> {
        loop {
            match self.state {
                State::Done => return None,
                State::Descend => match self.select() {
                    None => {
                        self.state = State::Backtrack;
                        if self.binding.iter().all(Option::is_some) {
                            return Some(self.binding.iter().map(|b| b.unwrap()).collect());
                        }
                    }
                    Some((atom, cands)) => {
                        self.frames.push(Frame {
                            atom,
                            cands,
                            next: 0,
                            trail_mark: self.trail.len(),
                        });
                        self.matched[atom] = true;
                        self.state = State::Backtrack;
                    }
                },
                State::Backtrack => {
                    let Some(frame) = self.frames.last() else {
                        self.state = State::Done;
                        return None;
                    };
                    let (atom, cands, mark) = (frame.atom, frame.cands, frame.trail_mark);
                    let mut next = frame.next;
                    self.undo_to(mark);
                    let mut advanced = false;
                    while next < cands.len() {
                        let id = cands[next];
                        next += 1;
                        if self.unify(atom, id) {
                            advanced = true;
                            break;
                        }
                        self.undo_to(mark);
                    }
                    self.frames.last_mut().unwrap().next = next;
                    if advanced {
                        self.state = State::Descend;
                    } else {
                        self.matched[atom] = false;
                        self.frames.pop();
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn path(n: usize) -> Structure {
        let sig = Arc::new(Signature::new().with_predicate("E", 2).unwrap());
        let mut s = Structure::new(sig);
        for i in 0..n {
            s.add_atom(&Atom::new(
                "E",
                vec![Term::var(&format!("v{i}")), Term::var(&format!("v{}", i + 1))],
            ))
            .unwrap();
        }
        s
    }

    fn two_step() -> Vec<Atom> {
        vec![
            Atom::new("E", vec![Term::var("x"), Term::var("y")]),
            Atom::new("E", vec![Term::var("y"), Term::var("z")]),
        ]
    }

    #[test]
    fn enumerates_all_matches() {
        let s = path(4);
        let p = Pattern::compile(s.signature(), &two_step(), &[]).unwrap().unwrap();
        assert_eq!(Matches::new(&p, &s, vec![]).count(), 3);
    }

    #[test]
    fn anchoring_partitions_matches_by_first_new_atom() {
        let s = path(5);
        let p = Pattern::compile(s.signature(), &two_step(), &[]).unwrap().unwrap();
        // Atoms 3 and 4 are the delta; matches using at least one of them:
        // (v2,v3,v4), (v3,v4,v5).
        let mut total = 0;
        for anchor in 0..2 {
            for id in 3..5 {
                if let Some(m) = Matches::anchored(&p, &s, vec![], anchor, id, 3) {
                    total += m.count();
                }
            }
        }
        assert_eq!(total, 2);
    }

    #[test]
    fn empty_pattern_has_one_match() {
        let s = path(1);
        let p = Pattern::compile(s.signature(), &[], &[]).unwrap().unwrap();
        assert_eq!(Matches::new(&p, &s, vec![]).count(), 1);
    }
}
