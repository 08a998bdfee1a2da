//! The s-pider world: the parametric signature, `Φ_s`, ideal spiders,
//! spider queries, the wedge/vee combinators and the abstract algebra.
//!
//! Naming: `H(z, z1, z2)` links the head `z` to its tail `z1` and antenna
//! `z2`. Lower legs are `T_i(z, x_i), C_i(x_i, c_i)`, upper legs are
//! `T^i(z, y_i), C^i(y_i, c^i)`. A spider's *upper* lame index is the `C^i`
//! calf of the other color, its *lower* lame index the `C_j` calf.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chase::Tgd;
use crate::cq::{Atom, ConjunctiveQuery, Homomorphism, Name, Signature, Structure, Term};
use crate::error::{Error, Result};
use crate::greenred::{color_of, generate_tgds, Color, ColoredSignature};

pub const HEAD: &str = "H";

pub fn lower_thigh(i: usize) -> String {
    format!("T_{i}")
}

pub fn upper_thigh(i: usize) -> String {
    format!("T^{i}")
}

pub fn lower_calf(i: usize) -> String {
    format!("C_{i}")
}

pub fn upper_calf(i: usize) -> String {
    format!("C^{i}")
}

pub fn lower_const(i: usize) -> String {
    format!("c_{i}")
}

pub fn upper_const(i: usize) -> String {
    format!("c^{i}")
}

fn xv(i: usize) -> String {
    format!("x{i}")
}

fn yv(i: usize) -> String {
    format!("y{i}")
}

/// An element of `𝔸_s`: color plus at most one lame leg on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealSpider {
    pub color: Color,
    pub upper: Option<usize>,
    pub lower: Option<usize>,
}

impl IdealSpider {
    pub fn new(color: Color, upper: Option<usize>, lower: Option<usize>) -> Self {
        IdealSpider { color, upper, lower }
    }

    pub fn full(color: Color) -> Self {
        IdealSpider::new(color, None, None)
    }

    pub fn is_full(&self) -> bool {
        self.upper.is_none() && self.lower.is_none()
    }

    pub fn is_upper(&self) -> bool {
        self.upper.is_some()
    }

    pub fn is_lower(&self) -> bool {
        self.lower.is_some()
    }

    pub fn lameness(&self) -> usize {
        self.upper.is_some() as usize + self.lower.is_some() as usize
    }
}

fn write_indices(f: &mut fmt::Formatter<'_>, upper: Option<usize>, lower: Option<usize>) -> fmt::Result {
    if let Some(i) = upper {
        write!(f, "^{i}")?;
    }
    if let Some(j) = lower {
        write!(f, "_{j}")?;
    }
    Ok(())
}

/// Parses `[^i][_j]` and returns the rest of the input.
fn parse_indices(s: &str) -> Option<(Option<usize>, Option<usize>)> {
    let (upper, rest) = match s.strip_prefix('^') {
        Some(r) => {
            let end = r.find('_').unwrap_or(r.len());
            (Some(r[..end].parse().ok()?), &r[end..])
        }
        None => (None, s),
    };
    let lower = match rest.strip_prefix('_') {
        Some(r) => Some(r.parse().ok()?),
        None if rest.is_empty() => None,
        None => return None,
    };
    Some((upper, lower))
}

impl fmt::Display for IdealSpider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.color.letter())?;
        write_indices(f, self.upper, self.lower)
    }
}

impl FromStr for IdealSpider {
    type Err = Error;

    /// `G`, `R^3`, `G_5`, `R^3_5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spider(format!("bad spider label `{s}`"));
        let color = match s.chars().next() {
            Some('G') => Color::Green,
            Some('R') => Color::Red,
            _ => return Err(bad()),
        };
        let (upper, lower) = parse_indices(&s[1..]).ok_or_else(bad)?;
        Ok(IdealSpider { color, upper, lower })
    }
}

/// An element of `𝔽_s`: `f^i_j`, `f^i` or `f_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpiderQuery {
    pub upper: Option<usize>,
    pub lower: Option<usize>,
}

impl SpiderQuery {
    pub fn new(upper: Option<usize>, lower: Option<usize>) -> Result<Self> {
        if upper.is_none() && lower.is_none() {
            return Err(Error::Spider("a spider query removes at least one calf".into()));
        }
        Ok(SpiderQuery { upper, lower })
    }

    pub fn up(i: usize) -> Self {
        SpiderQuery {
            upper: Some(i),
            lower: None,
        }
    }

    pub fn low(j: usize) -> Self {
        SpiderQuery {
            upper: None,
            lower: Some(j),
        }
    }

    pub fn both(i: usize, j: usize) -> Self {
        SpiderQuery {
            upper: Some(i),
            lower: Some(j),
        }
    }

    pub fn is_upper(&self) -> bool {
        self.upper.is_some()
    }

    pub fn is_lower(&self) -> bool {
        self.lower.is_some()
    }
}

impl fmt::Display for SpiderQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f")?;
        write_indices(f, self.upper, self.lower)
    }
}

impl FromStr for SpiderQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spider(format!("bad spider query `{s}`"));
        let rest = s.strip_prefix('f').ok_or_else(bad)?;
        let (upper, lower) = parse_indices(rest).ok_or_else(bad)?;
        SpiderQuery::new(upper, lower)
    }
}

/// `f(S)` by index arithmetic: defined iff `S`'s lame indices are contained
/// in `f`'s; the result has the other color and the remaining indices.
pub fn spider_apply(f: SpiderQuery, s: IdealSpider) -> Option<IdealSpider> {
    fn side(q: Option<usize>, sp: Option<usize>) -> Option<Option<usize>> {
        match (q, sp) {
            (_, None) => Some(q),
            (Some(a), Some(b)) if a == b => Some(None),
            _ => None,
        }
    }
    Some(IdealSpider {
        color: s.color.opposite(),
        upper: side(f.upper, s.upper)?,
        lower: side(f.lower, s.lower)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Antennas identified, tails free.
    Wedge,
    /// Tails identified, antennas free.
    Vee,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Wedge => write!(f, "wedge"),
            Mode::Vee => write!(f, "vee"),
        }
    }
}

/// An element of `𝔽_s²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryQuery {
    pub left: SpiderQuery,
    pub right: SpiderQuery,
    pub mode: Mode,
}

impl BinaryQuery {
    pub fn wedge(left: SpiderQuery, right: SpiderQuery) -> Self {
        BinaryQuery {
            left,
            right,
            mode: Mode::Wedge,
        }
    }

    pub fn vee(left: SpiderQuery, right: SpiderQuery) -> Self {
        BinaryQuery {
            left,
            right,
            mode: Mode::Vee,
        }
    }
}

impl fmt::Display for BinaryQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.mode, self.right)
    }
}

impl FromStr for BinaryQuery {
    type Err = Error;

    /// `f^1_2 wedge f_3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [l, m, r] = parts[..] else {
            return Err(Error::Spider(format!("bad binary query `{s}`")));
        };
        let mode = match m {
            "wedge" => Mode::Wedge,
            "vee" => Mode::Vee,
            _ => return Err(Error::Spider(format!("unknown combinator `{m}`"))),
        };
        Ok(BinaryQuery {
            left: l.parse()?,
            right: r.parse()?,
            mode,
        })
    }
}

/// The signature, `Φ_s` and everything built over them for one `s`.
#[derive(Clone, Debug)]
pub struct SpiderWorld {
    s: usize,
    signature: ColoredSignature,
    phi: Vec<Atom>,
}

impl SpiderWorld {
    pub fn new(s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::Spider("s must be at least 1".into()));
        }
        let mut sig = Signature::new();
        for i in 1..=s {
            sig.add_constant(&lower_const(i))?;
            sig.add_constant(&upper_const(i))?;
        }
        sig.add_predicate(HEAD, 3)?;
        for i in 1..=s {
            sig.add_predicate(&lower_thigh(i), 2)?;
            sig.add_predicate(&upper_thigh(i), 2)?;
            sig.add_predicate(&lower_calf(i), 2)?;
            sig.add_predicate(&upper_calf(i), 2)?;
        }
        let mut phi = vec![Atom::new(HEAD, vec![Term::var("z"), Term::var("z1"), Term::var("z2")])];
        for i in 1..=s {
            phi.push(Atom::new(&lower_thigh(i), vec![Term::var("z"), Term::var(&xv(i))]));
            phi.push(Atom::new(&upper_thigh(i), vec![Term::var("z"), Term::var(&yv(i))]));
            phi.push(Atom::new(
                &lower_calf(i),
                vec![Term::var(&xv(i)), Term::constant(&lower_const(i))],
            ));
            phi.push(Atom::new(
                &upper_calf(i),
                vec![Term::var(&yv(i)), Term::constant(&upper_const(i))],
            ));
        }
        Ok(SpiderWorld {
            s,
            signature: ColoredSignature::new(Arc::new(sig))?,
            phi,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn base_signature(&self) -> &Arc<Signature> {
        self.signature.base()
    }

    pub fn colored(&self) -> &ColoredSignature {
        &self.signature
    }

    pub fn colored_signature(&self) -> &Arc<Signature> {
        self.signature.colored()
    }

    /// `Φ_s` as printed: the head atom, then per leg index `T_i, T^i, C_i, C^i`.
    pub fn phi(&self) -> &[Atom] {
        &self.phi
    }

    pub fn phi_query(&self) -> ConjunctiveQuery {
        ConjunctiveQuery::new::<&str>(&[], self.phi.clone()).expect("Φ_s is well formed")
    }

    fn check_index(&self, i: Option<usize>) -> Result<()> {
        match i {
            Some(i) if i < 1 || i > self.s => Err(Error::Spider(format!("leg index {i} outside 1..={}", self.s))),
            _ => Ok(()),
        }
    }

    fn is_removed(&self, atom: &Atom, upper: Option<usize>, lower: Option<usize>) -> bool {
        upper.is_some_and(|i| *atom.predicate == upper_calf(i))
            || lower.is_some_and(|j| *atom.predicate == lower_calf(j))
    }

    /// Atoms of the ideal spider, with variables of `Φ_s` as elements.
    pub fn ideal_spider_atoms(&self, spider: IdealSpider) -> Result<Vec<Atom>> {
        self.check_index(spider.upper)?;
        self.check_index(spider.lower)?;
        let mut out = Vec::with_capacity(self.phi.len());
        for a in &self.phi {
            let color = if self.is_removed(a, spider.upper, spider.lower) {
                spider.color.opposite()
            } else {
                spider.color
            };
            out.push(Atom {
                predicate: color.colored_name(&a.predicate).into(),
                args: a.args.clone(),
            });
        }
        Ok(out)
    }

    pub fn ideal_spider(&self, spider: IdealSpider) -> Result<Structure> {
        Structure::from_atoms(self.colored_signature().clone(), &self.ideal_spider_atoms(spider)?)
    }

    /// `𝔸_s` in a fixed order: color, then upper index, then lower index.
    pub fn enumerate_ideal(&self) -> Vec<IdealSpider> {
        let idx: Vec<Option<usize>> = std::iter::once(None).chain((1..=self.s).map(Some)).collect();
        let mut out = Vec::new();
        for color in [Color::Green, Color::Red] {
            for &u in &idx {
                for &l in &idx {
                    out.push(IdealSpider::new(color, u, l));
                }
            }
        }
        out
    }

    /// `𝔽_s`: every query with at least one calf removed.
    pub fn all_queries(&self) -> Vec<SpiderQuery> {
        let idx: Vec<Option<usize>> = std::iter::once(None).chain((1..=self.s).map(Some)).collect();
        let mut out = Vec::new();
        for &u in &idx {
            for &l in &idx {
                if let Ok(q) = SpiderQuery::new(u, l) {
                    out.push(q);
                }
            }
        }
        out
    }

    /// Body of `Φ_s` minus the removed calves, free variables `[x_j, y_i]`.
    pub fn spider_query(&self, q: SpiderQuery) -> Result<ConjunctiveQuery> {
        SpiderQuery::new(q.upper, q.lower)?;
        self.check_index(q.upper)?;
        self.check_index(q.lower)?;
        let body: Vec<Atom> = self
            .phi
            .iter()
            .filter(|a| !self.is_removed(a, q.upper, q.lower))
            .cloned()
            .collect();
        let mut free = Vec::new();
        if let Some(j) = q.lower {
            free.push(xv(j));
        }
        if let Some(i) = q.upper {
            free.push(yv(i));
        }
        ConjunctiveQuery::new(&free, body)
    }

    /// `f ⋏ f′` or `f ⋎ f′`: disjoint union with the right copy primed and
    /// antennas (wedge) or tails (vee) identified. Free variables are the
    /// left knees, the right knees, then the two unidentified head-adjacent
    /// variables.
    pub fn combine(&self, b: &BinaryQuery) -> Result<ConjunctiveQuery> {
        let left = self.spider_query(b.left)?;
        let right = self.spider_query(b.right)?;
        let shared = match b.mode {
            Mode::Wedge => "z2",
            Mode::Vee => "z1",
        };
        let prime = |t: &Term| match t {
            Term::Variable(n) if &**n == shared => t.clone(),
            Term::Variable(n) => Term::Variable(format!("{n}'").into()),
            other => other.clone(),
        };
        let mut body = left.body().to_vec();
        body.extend(right.body().iter().map(|a| Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(prime).collect(),
        }));
        let mut free: Vec<Name> = left.free_vars().to_vec();
        free.extend(right.free_vars().iter().map(|n| Name::from(format!("{n}'"))));
        let (a, b2) = match b.mode {
            Mode::Wedge => ("z1", "z1'"),
            Mode::Vee => ("z2", "z2'"),
        };
        free.push(a.into());
        free.push(b2.into());
        ConjunctiveQuery::new(&free, body)
    }

    /// The green-red pair of every unary query, named by its text form.
    pub fn unary_tgds(&self, queries: &[SpiderQuery]) -> Result<Vec<Tgd>> {
        let views = queries
            .iter()
            .map(|q| Ok((Name::from(q.to_string()), self.spider_query(*q)?)))
            .collect::<Result<Vec<_>>>()?;
        generate_tgds(&views)
    }

    /// The green-red pair of every named binary query.
    pub fn binary_tgds(&self, rules: &[(Name, BinaryQuery)]) -> Result<Vec<Tgd>> {
        let views = rules
            .iter()
            .map(|(n, b)| Ok((n.clone(), self.combine(b)?)))
            .collect::<Result<Vec<_>>>()?;
        generate_tgds(&views)
    }

    /// `G(Φ_s)` with tail and antenna replaced by the given terms. Used to
    /// build start structures with named vertices.
    pub fn placed_spider_atoms(
        &self,
        spider: IdealSpider,
        prefix: &str,
        tail: &Term,
        antenna: &Term,
    ) -> Result<Vec<Atom>> {
        let atoms = self.ideal_spider_atoms(spider)?;
        Ok(atoms
            .into_iter()
            .map(|a| Atom {
                predicate: a.predicate,
                args: a
                    .args
                    .into_iter()
                    .map(|t| match &t {
                        Term::Variable(n) if &**n == "z1" => tail.clone(),
                        Term::Variable(n) if &**n == "z2" => antenna.clone(),
                        Term::Variable(n) => Term::Variable(format!("{prefix}{n}").into()),
                        _ => t,
                    })
                    .collect(),
            })
            .collect())
    }

    /// Identifies the real spider headed by `head`.
    ///
    /// Returns `None` when `head` is the first argument of no `H` atom. The
    /// check reads off the leg colors directly: every head must have exactly
    /// one `H` atom and one thigh per leg in its own color and no other
    /// outgoing atom, every knee exactly one calf, and at most one lame calf
    /// per side. Anything else is a structural violation.
    pub fn classify_real_spider(&self, d: &Structure, head: &Term) -> Result<Option<(IdealSpider, Homomorphism)>> {
        let violation = |m: String| Err(Error::StructuralViolation(format!("head {head}: {m}")));
        let out = d.out_atoms(head);
        let mut h_atoms = out
            .iter()
            .filter(|a| color_of(&a.predicate).is_some_and(|(_, b)| b == HEAD))
            .collect::<Vec<_>>();
        if h_atoms.is_empty() {
            return Ok(None);
        }
        if h_atoms.len() > 1 {
            return violation(format!("{} H atoms (more than one spider on one head)", h_atoms.len()));
        }
        let h = h_atoms.pop().unwrap();
        let color = color_of(&h.predicate).unwrap().0;
        if out.len() != 1 + 2 * self.s {
            return violation(format!("out-degree {} instead of {}", out.len(), 1 + 2 * self.s));
        }
        let mut map = Homomorphism::new();
        map.insert(Term::var("z"), head.clone());
        map.insert(Term::var("z1"), h.args[1].clone());
        map.insert(Term::var("z2"), h.args[2].clone());
        let mut upper = BTreeSet::new();
        let mut lower = BTreeSet::new();
        for i in 1..=self.s {
            for (thigh, calf, cst, var, side) in [
                (lower_thigh(i), lower_calf(i), lower_const(i), xv(i), &mut lower),
                (upper_thigh(i), upper_calf(i), upper_const(i), yv(i), &mut upper),
            ] {
                let thigh_name = color.colored_name(&thigh);
                let t: Vec<&Atom> = out.iter().filter(|a| *a.predicate == thigh_name).collect();
                if t.len() != 1 {
                    return violation(format!("{} {thigh_name} atoms", t.len()));
                }
                let knee = t[0].args[1].clone();
                let calves = d.out_atoms(&knee);
                if calves.len() != 1 {
                    return violation(format!("knee {knee} has out-degree {}", calves.len()));
                }
                let a = &calves[0];
                let Some((cc, base)) = color_of(&a.predicate) else {
                    return violation(format!("knee {knee} carries uncolored `{a}`"));
                };
                if base != calf || a.args[1] != Term::constant(&cst) {
                    return violation(format!("knee {knee} carries `{a}` instead of a {calf} calf"));
                }
                if cc != color {
                    side.insert(i);
                }
                map.insert(Term::var(&var), knee);
            }
        }
        if upper.len() > 1 || lower.len() > 1 {
            return violation(format!(
                "lame upper legs {upper:?}, lower legs {lower:?}: not an ideal spider"
            ));
        }
        let spider = IdealSpider::new(color, upper.first().copied(), lower.first().copied());
        Ok(Some((spider, map)))
    }
}

/// A named binary rule of a spider ruleset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: Name,
    pub query: BinaryQuery,
    /// The rule that rewrites the married couple this rule creates.
    pub associate: Option<usize>,
}

/// A finite subset of `𝔽_s²` with names and couple associations.
///
/// Text form:
/// ```text
/// spiders 16
/// rule 1A f_1 wedge f_2
/// rule 1B f^10_1 wedge f^13_2
/// assoc 1A 1B
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ruleset {
    pub s: usize,
    pub rules: Vec<Rule>,
}

impl Ruleset {
    pub fn new(s: usize) -> Self {
        Ruleset { s, rules: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<Name>, query: BinaryQuery) -> Result<usize> {
        let name = name.into();
        if self.index_of(&name).is_some() {
            return Err(Error::Spider(format!("rule `{name}` defined twice")));
        }
        for i in [query.left.upper, query.left.lower, query.right.upper, query.right.lower]
            .into_iter()
            .flatten()
        {
            if i < 1 || i > self.s {
                return Err(Error::Spider(format!(
                    "rule `{name}`: leg index {i} outside 1..={}",
                    self.s
                )));
            }
        }
        self.rules.push(Rule {
            name,
            query,
            associate: None,
        });
        Ok(self.rules.len() - 1)
    }

    pub fn associate(&mut self, a: usize, b: usize) {
        self.rules[a].associate = Some(b);
        self.rules[b].associate = Some(a);
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| &*r.name == name)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn named(&self) -> Vec<(Name, BinaryQuery)> {
        self.rules.iter().map(|r| (r.name.clone(), r.query)).collect()
    }

    pub fn tgds(&self, world: &SpiderWorld) -> Result<Vec<Tgd>> {
        world.binary_tgds(&self.named())
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut out: Option<Ruleset> = None;
        let mut assoc = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let perr = |message: String| Error::Parse {
                line: n + 1,
                column: 1,
                message,
            };
            let line = raw.split(['#', '%']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match (kw, out.as_mut()) {
                ("spiders", None) => {
                    let s = rest.parse().map_err(|_| perr(format!("bad spider count `{rest}`")))?;
                    out = Some(Ruleset::new(s));
                }
                ("spiders", Some(_)) => return Err(perr("second `spiders` line".into())),
                (_, None) => return Err(perr("ruleset must start with `spiders N`".into())),
                ("rule", Some(rs)) => {
                    let (name, q) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr("rule needs a name and a query".into()))?;
                    let q: BinaryQuery = q.trim().parse().map_err(|e: Error| perr(e.to_string()))?;
                    rs.push(name, q).map_err(|e| perr(e.to_string()))?;
                }
                ("assoc", Some(_)) => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [a, b] = parts[..] else {
                        return Err(perr("assoc needs two rule names".into()));
                    };
                    assoc.push((n + 1, a.to_string(), b.to_string()));
                }
                (other, Some(_)) => return Err(perr(format!("unknown keyword `{other}`"))),
            }
        }
        let mut rs = out.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "empty ruleset".into(),
        })?;
        for (line, a, b) in assoc {
            let find = |x: &str| {
                rs.index_of(x).ok_or_else(|| Error::Parse {
                    line,
                    column: 1,
                    message: format!("unknown rule `{x}`"),
                })
            };
            let (ia, ib) = (find(&a)?, find(&b)?);
            rs.associate(ia, ib);
        }
        Ok(rs)
    }
}

impl fmt::Display for Ruleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spiders {}", self.s)?;
        for r in &self.rules {
            writeln!(f, "rule {} {}", r.name, r.query)?;
        }
        for (i, r) in self.rules.iter().enumerate() {
            if let Some(j) = r.associate {
                if i < j {
                    writeln!(f, "assoc {} {}", r.name, self.rules[j].name)?;
                }
            }
        }
        Ok(())
    }
}
