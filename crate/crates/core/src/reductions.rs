//! Encodings into spider rulesets: graph reachability and friendly Thue
//! systems, with the plain graph search and word-closure oracles used to
//! check them.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spider::{BinaryQuery, Ruleset, SpiderQuery, SpiderWorld};

/// An undirected graph on `v1..vt`. Vertex 1 must have degree exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    /// Edges `e1..`, each a pair of 1-based vertex numbers.
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates the degree convention; `e1` is moved to the front if needed.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::Graph("need at least two vertices".into()));
        }
        for &(a, b) in &edges {
            if a < 1 || b < 1 || a > vertices || b > vertices {
                return Err(Error::Graph(format!("edge {{v{a}, v{b}}} outside v1..v{vertices}")));
            }
            if a == b {
                return Err(Error::Graph(format!("loop at v{a}")));
            }
        }
        let at_v1: Vec<usize> = (0..edges.len())
            .filter(|&k| edges[k].0 == 1 || edges[k].1 == 1)
            .collect();
        if at_v1.len() != 1 {
            return Err(Error::Graph(format!(
                "v1 must have degree exactly 1, found {}",
                at_v1.len()
            )));
        }
        let mut edges = edges;
        edges.swap(0, at_v1[0]);
        Ok(Graph { vertices, edges })
    }

    /// `t′`, the number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge list text: optional `vertices N`, then one `a b` pair per line.
    pub fn parse(src: &str) -> Result<Self> {
        let mut vertices = None;
        let mut edges = Vec::new();
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
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[..] {
                ["vertices", k] => vertices = Some(k.parse().map_err(|_| perr(format!("bad count `{k}`")))?),
                [a, b] => {
                    let num = |x: &str| {
                        x.trim_start_matches('v')
                            .parse::<usize>()
                            .map_err(|_| perr(format!("bad vertex `{x}`")))
                    };
                    edges.push((num(a)?, num(b)?));
                }
                _ => return Err(perr(format!("expected `a b`, found `{line}`"))),
            }
        }
        let max = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
        Graph::new(vertices.unwrap_or(max), edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        for (a, b) in &self.edges {
            writeln!(f, "{a} {b}")?;
        }
        Ok(())
    }
}

/// The reachability ruleset: `f_1`, `f^2`, and `f^i_k`, `f^j_k` for every
/// edge `e_k = {v_i, v_j}`.
pub fn encode_reachability(g: &Graph) -> Result<(SpiderWorld, Vec<SpiderQuery>)> {
    let s = g.vertices.max(g.edge_count()).max(2);
    let world = SpiderWorld::new(s)?;
    let mut rules = vec![SpiderQuery::low(1), SpiderQuery::up(2)];
    for (k, &(i, j)) in g.edges.iter().enumerate() {
        rules.push(SpiderQuery::both(i, k + 1));
        rules.push(SpiderQuery::both(j, k + 1));
    }
    Ok((world, rules))
}

/// Plain breadth-first search over the undirected edges.
pub fn bfs_reachable(g: &Graph, from: usize, to: usize) -> bool {
    let mut seen = vec![false; g.vertices + 1];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            return true;
        }
        for &(a, b) in &g.edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    false
}

pub type Word = Vec<usize>;

/// The distinguished letters of a friendly system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub alpha: usize,
    pub beta0: usize,
    pub beta1: usize,
    pub eta0: usize,
    pub eta1: usize,
    pub gamma: usize,
    pub gamma_prime: usize,
}

impl Roles {
    const NAMES: [&'static str; 7] = ["alpha", "beta0", "beta1", "eta0", "eta1", "gamma", "gamma'"];

    fn values(&self) -> [usize; 7] {
        [
            self.alpha,
            self.beta0,
            self.beta1,
            self.eta0,
            self.eta1,
            self.gamma,
            self.gamma_prime,
        ]
    }

    /// The letters used by the acceptance fixture.
    pub fn fixture() -> Self {
        Roles {
            alpha: 10,
            beta1: 11,
            beta0: 12,
            eta1: 13,
            eta0: 14,
            gamma: 15,
            gamma_prime: 16,
        }
    }

    pub fn letters(&self) -> BTreeSet<usize> {
        self.values().into_iter().collect()
    }

    /// `αη₁`, the word every maximal correct word must reach.
    pub fn target(&self) -> Word {
        vec![self.alpha, self.eta1]
    }
}

impl fmt::Display for Roles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "roles")?;
        for (n, v) in Self::NAMES.iter().zip(self.values()) {
            write!(f, " {n}={v}")?;
        }
        Ok(())
    }
}

/// A Thue system over `1..=s` with symmetric productions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThueSystem {
    pub s: usize,
    pub roles: Roles,
    /// Unordered pairs; each is used in both directions.
    pub productions: Vec<(Word, Word)>,
}

fn word_text(w: &[usize]) -> String {
    w.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

impl ThueSystem {
    /// `Π_<` for the given roles plus the given equal-length productions.
    pub fn friendly(s: usize, roles: Roles, equal: Vec<(Word, Word)>) -> Self {
        let mut productions = vec![
            (vec![roles.eta0], vec![roles.beta0, roles.eta1]),
            (vec![roles.eta1], vec![roles.beta1, roles.eta0]),
        ];
        productions.extend(equal);
        ThueSystem { s, roles, productions }
    }

    /// The positive acceptance fixture: `Π_< ∪ {{β₁β₀, γγ′}}`, `s = 16`.
    pub fn fixture() -> Self {
        let r = Roles::fixture();
        ThueSystem::friendly(16, r, vec![(vec![r.beta1, r.beta0], vec![r.gamma, r.gamma_prime])])
    }

    /// Productions with two 2-letter sides.
    pub fn equal_length(&self) -> impl Iterator<Item = &(Word, Word)> {
        self.productions.iter().filter(|(a, b)| a.len() == 2 && b.len() == 2)
    }

    /// Text form:
    /// ```text
    /// alphabet 16
    /// roles alpha=10 beta1=11 beta0=12 eta1=13 eta0=14 gamma=15 gamma'=16
    /// prod 14 <-> 12 13
    /// ```
    pub fn parse(src: &str) -> Result<Self> {
        let mut s = None;
        let mut roles: [Option<usize>; 7] = [None; 7];
        let mut productions = Vec::new();
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
            let num = |x: &str| x.parse::<usize>().map_err(|_| perr(format!("bad letter `{x}`")));
            match kw {
                "alphabet" => s = Some(num(rest.trim())?),
                "roles" => {
                    for kv in rest.split_whitespace() {
                        let (k, v) = kv.split_once('=').ok_or_else(|| perr(format!("bad role `{kv}`")))?;
                        let k = k.replace("_prime", "'");
                        let pos = Roles::NAMES
                            .iter()
                            .position(|n| *n == k)
                            .ok_or_else(|| perr(format!("unknown role `{k}`")))?;
                        roles[pos] = Some(num(v)?);
                    }
                }
                "prod" => {
                    let (l, r) = rest
                        .split_once("<->")
                        .ok_or_else(|| perr("production needs `<->`".into()))?;
                    let side = |x: &str| x.split_whitespace().map(num).collect::<Result<Word>>();
                    productions.push((side(l)?, side(r)?));
                }
                other => return Err(perr(format!("unknown keyword `{other}`"))),
            }
        }
        let eof = |message: String| Error::Parse {
            line: src.lines().count().max(1),
            column: 1,
            message,
        };
        let s = s.ok_or_else(|| eof("missing `alphabet` line".into()))?;
        let mut v = [0; 7];
        for (k, r) in roles.iter().enumerate() {
            v[k] = r.ok_or_else(|| eof(format!("missing role `{}`", Roles::NAMES[k])))?;
        }
        let roles = Roles {
            alpha: v[0],
            beta0: v[1],
            beta1: v[2],
            eta0: v[3],
            eta1: v[4],
            gamma: v[5],
            gamma_prime: v[6],
        };
        for (a, b) in &productions {
            for &x in a.iter().chain(b) {
                if x < 1 || x > s {
                    return Err(Error::Thue(format!("letter {x} outside 1..={s}")));
                }
            }
        }
        Ok(ThueSystem { s, roles, productions })
    }

    /// Every word reachable from `start` by at most `max_steps` single
    /// production applications, never exceeding length `max_len`.
    pub fn step_closure(&self, start: &[usize], max_steps: usize, max_len: usize, mode: ClosureMode) -> BTreeSet<Word> {
        thue_step_closure(self, start, max_steps, max_len, mode)
    }
}

impl fmt::Display for ThueSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.s)?;
        writeln!(f, "{}", self.roles)?;
        for (a, b) in &self.productions {
            writeln!(f, "prod {} <-> {}", word_text(a), word_text(b))?;
        }
        Ok(())
    }
}

/// One failed friendliness condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FriendlyViolation {
    pub rule: String,
    pub detail: String,
}

impl fmt::Display for FriendlyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

/// Checks every friendliness condition; returns all failures.
pub fn validate_friendly(ts: &ThueSystem) -> Vec<FriendlyViolation> {
    let mut out = Vec::new();
    let mut bad = |rule: &str, detail: String| {
        out.push(FriendlyViolation {
            rule: rule.into(),
            detail,
        })
    };
    let r = ts.roles;
    let vals = r.values();
    if r.letters().len() != 7 {
        bad("distinct roles", format!("role letters {vals:?} are not distinct"));
    }
    for (k, v) in vals.iter().enumerate() {
        if *v < 1 || *v > ts.s {
            bad("alphabet", format!("{} = {v} outside 1..={}", Roles::NAMES[k], ts.s));
        }
    }
    for (name, v, even) in [
        ("alpha", r.alpha, true),
        ("beta0", r.beta0, true),
        ("eta0", r.eta0, true),
        ("gamma'", r.gamma_prime, true),
        ("beta1", r.beta1, false),
        ("eta1", r.eta1, false),
        ("gamma", r.gamma, false),
    ] {
        if (v % 2 == 0) != even {
            bad(
                "role parity",
                format!("{name} = {v} must be {}", if even { "even" } else { "odd" }),
            );
        }
    }
    let norm = |a: &Word, b: &Word| {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    };
    let less: BTreeSet<(Word, Word)> = [
        norm(&vec![r.eta0], &vec![r.beta0, r.eta1]),
        norm(&vec![r.eta1], &vec![r.beta1, r.eta0]),
    ]
    .into();
    let mut got_less = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for (a, b) in &ts.productions {
        let p = norm(a, b);
        if !pairs.insert(p.clone()) {
            bad(
                "duplicate",
                format!("production {{{}, {}}} listed twice", word_text(a), word_text(b)),
            );
        }
        let text = format!("{{{}, {}}}", word_text(a), word_text(b));
        if a.iter().chain(b).any(|&x| x == r.alpha) {
            bad("no alpha", format!("{text} involves alpha"));
        }
        if less.contains(&p) {
            got_less.insert(p);
            continue;
        }
        if a.len() != 2 || b.len() != 2 {
            bad(
                "shape",
                format!("{text} is neither in Π_< nor of the form {{ij, i'j'}}"),
            );
            continue;
        }
        let (i, j, i2, j2) = (a[0], a[1], b[0], b[1]);
        let odd_even = i % 2 == 1 && i2 % 2 == 1 && j % 2 == 0 && j2 % 2 == 0;
        let even_odd = i % 2 == 0 && i2 % 2 == 0 && j % 2 == 1 && j2 % 2 == 1;
        if !odd_even && !even_odd {
            bad(
                "parity pattern",
                format!("{text}: first letters must share a parity and second letters the other"),
            );
        }
        if i == i2 {
            bad("same-first-letter pair", text.to_string());
        }
        if j == j2 {
            bad("same-second-letter pair", text.to_string());
        }
        if [i, j, i2, j2].iter().any(|&x| x == r.eta0 || x == r.eta1) {
            bad("no eta in Π_=", format!("{text} involves eta0 or eta1"));
        }
    }
    for p in &less {
        if !got_less.contains(p) {
            bad(
                "Π_<",
                format!("missing production {{{}, {}}}", word_text(&p.0), word_text(&p.1)),
            );
        }
    }
    for (name, g) in [("gamma", r.gamma), ("gamma'", r.gamma_prime)] {
        let n = ts
            .productions
            .iter()
            .filter(|(a, b)| a.contains(&g) || b.contains(&g))
            .count();
        if n != 1 {
            bad(
                "gamma occurrences",
                format!("{name} = {g} occurs in {n} productions, expected 1"),
            );
        }
    }
    let gg = vec![r.gamma, r.gamma_prime];
    let has_gg = ts
        .productions
        .iter()
        .any(|(a, b)| (*a == gg && b.len() == 2) || (*b == gg && a.len() == 2));
    if !has_gg {
        bad("gamma production", "no production {ii', gamma gamma'}".into());
    }
    if ts.s <= 2 * ts.productions.len() {
        bad(
            "alphabet size",
            format!("s = {} must exceed 2|Π| = {}", ts.s, 2 * ts.productions.len()),
        );
    }
    out
}

/// The six rules of `Q_η`, in the order `1A 1B 2A 2B 3A 3B`, with the three
/// association pairs. Subscripts are `1..=6`.
pub fn qeta_ruleset(s: usize, roles: &Roles) -> Result<Ruleset> {
    if let Some(x) = roles.letters().into_iter().find(|x| (1..=6).contains(x)) {
        return Err(Error::Thue(format!(
            "role letter {x} collides with the Q_η subscripts 1..6"
        )));
    }
    let mut rs = Ruleset::new(s);
    let (a, b0, b1, e0, e1) = (roles.alpha, roles.beta0, roles.beta1, roles.eta0, roles.eta1);
    let r1a = rs.push("1A", BinaryQuery::wedge(SpiderQuery::low(1), SpiderQuery::low(2)))?;
    let r1b = rs.push(
        "1B",
        BinaryQuery::wedge(SpiderQuery::both(a, 1), SpiderQuery::both(e1, 2)),
    )?;
    let r2a = rs.push("2A", BinaryQuery::wedge(SpiderQuery::both(e0, 3), SpiderQuery::low(4)))?;
    let r2b = rs.push(
        "2B",
        BinaryQuery::wedge(SpiderQuery::both(b0, 3), SpiderQuery::both(e1, 4)),
    )?;
    let r3a = rs.push("3A", BinaryQuery::vee(SpiderQuery::both(e1, 5), SpiderQuery::low(6)))?;
    let r3b = rs.push(
        "3B",
        BinaryQuery::vee(SpiderQuery::both(b1, 5), SpiderQuery::both(e0, 6)),
    )?;
    rs.associate(r1a, r1b);
    rs.associate(r2a, r2b);
    rs.associate(r3a, r3b);
    Ok(rs)
}

/// Subscripts chosen for one equal-length production.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub production: (Word, Word),
    pub left: usize,
    pub right: usize,
    pub rules: (String, String),
}

#[derive(Clone, Debug)]
pub struct CompiledRuleset {
    pub q0: Ruleset,
    pub q: Ruleset,
    pub allocations: Vec<Allocation>,
    /// Subscript of the last rule.
    pub r: usize,
    /// Index in `q` of the last rule.
    pub final_rule: usize,
}

/// Compiles a friendly system; fails with the list of violations otherwise.
pub fn compile_thue(ts: &ThueSystem) -> Result<CompiledRuleset> {
    let v = validate_friendly(ts);
    if !v.is_empty() {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::Thue(format!("not friendly: {}", list.join("; "))));
    }
    compile_thue_unchecked(ts)
}

/// Compiles without the friendliness check, e.g. for negative controls
/// that drop the γγ′ production. Subscripts skip every letter used by a
/// production or role.
pub fn compile_thue_unchecked(ts: &ThueSystem) -> Result<CompiledRuleset> {
    let mut q0 = qeta_ruleset(ts.s, &ts.roles)?;
    let mut used: BTreeSet<usize> = ts.roles.letters();
    for (a, b) in &ts.productions {
        used.extend(a.iter().chain(b));
    }
    used.extend(1..=6);
    let equal: Vec<(Word, Word)> = ts.equal_length().cloned().collect();
    let need = 1 + 2 * equal.len();
    let fresh: Vec<usize> = (7..).filter(|x| !used.contains(x)).take(need).collect();
    if fresh.last().is_some_and(|&x| x > ts.s) {
        return Err(Error::Thue(format!(
            "subscripts exhausted: {} fresh subscripts outside the letters need s >= {}, have s = {}",
            need,
            fresh.last().unwrap(),
            ts.s
        )));
    }
    let mut allocations = Vec::new();
    for (k, (a, b)) in equal.iter().enumerate() {
        let (l, r) = (fresh[2 * k], fresh[2 * k + 1]);
        let (mk, tag) = if a[0] % 2 == 0 {
            (BinaryQuery::wedge as fn(SpiderQuery, SpiderQuery) -> BinaryQuery, "5")
        } else {
            (BinaryQuery::vee as fn(SpiderQuery, SpiderQuery) -> BinaryQuery, "6")
        };
        let n1 = format!("{tag}A.{}", k + 1);
        let n2 = format!("{tag}B.{}", k + 1);
        let i1 = q0.push(n1.as_str(), mk(SpiderQuery::both(a[0], l), SpiderQuery::both(a[1], r)))?;
        let i2 = q0.push(n2.as_str(), mk(SpiderQuery::both(b[0], l), SpiderQuery::both(b[1], r)))?;
        q0.associate(i1, i2);
        allocations.push(Allocation {
            production: (a.clone(), b.clone()),
            left: l,
            right: r,
            rules: (n1, n2),
        });
    }
    let r = fresh[need - 1];
    let mut q = q0.clone();
    let final_rule = q.push(
        "7",
        BinaryQuery::vee(
            SpiderQuery::up(ts.roles.gamma),
            SpiderQuery::both(ts.roles.gamma_prime, r),
        ),
    )?;
    Ok(CompiledRuleset {
        q0,
        q,
        allocations,
        r,
        final_rule,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureMode {
    Full,
    EqualLengthOnly,
}

/// Bounded breadth-first closure of `start` under single production
/// applications in both directions.
pub fn thue_step_closure(
    ts: &ThueSystem,
    start: &[usize],
    max_steps: usize,
    max_len: usize,
    mode: ClosureMode,
) -> BTreeSet<Word> {
    let mut rules: Vec<(&Word, &Word)> = Vec::new();
    for (a, b) in &ts.productions {
        if mode == ClosureMode::EqualLengthOnly && a.len() != b.len() {
            continue;
        }
        rules.push((a, b));
        rules.push((b, a));
    }
    let mut seen: HashSet<Word> = HashSet::from([start.to_vec()]);
    let mut frontier = vec![start.to_vec()];
    for _ in 0..max_steps {
        let mut next = Vec::new();
        for w in &frontier {
            for (from, to) in &rules {
                if from.is_empty() || from.len() > w.len() {
                    continue;
                }
                for p in 0..=w.len() - from.len() {
                    if w[p..p + from.len()] != from[..] {
                        continue;
                    }
                    let mut v = Vec::with_capacity(w.len() - from.len() + to.len());
                    v.extend_from_slice(&w[..p]);
                    v.extend_from_slice(to);
                    v.extend_from_slice(&w[p + from.len()..]);
                    if v.len() <= max_len && seen.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// Whether `from` reaches `to` within the bounds: `Some(true)` if found,
/// `Some(false)` if the bounded closure was exhausted without it, `None`
/// if the step bound cut the search.
pub fn thue_derives(ts: &ThueSystem, from: &[usize], to: &[usize], max_steps: usize, max_len: usize) -> Option<bool> {
    let c = thue_step_closure(ts, from, max_steps, max_len, ClosureMode::Full);
    if c.contains(to) {
        return Some(true);
    }
    let one_more = thue_step_closure(ts, from, max_steps + 1, max_len, ClosureMode::Full);
    if one_more.len() == c.len() {
        Some(false)
    } else {
        None
    }
}
