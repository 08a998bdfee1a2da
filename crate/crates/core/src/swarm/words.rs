//! Words read along swarm walks, and the structural properties of runs of
//! compiled Thue rulesets.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{active_rewrites, is_active, RewriteInput, Swarm, SwarmTrace, Vertex};
use crate::greenred::Color;
use crate::reductions::{thue_derives, Roles, ThueSystem, Word};
use crate::spider::{IdealSpider, Ruleset};

/// Letter read by an edge, if it is green and 1-lame upper.
fn letter(label: IdealSpider) -> Option<usize> {
    match (label.color, label.upper, label.lower) {
        (Color::Green, Some(i), None) => Some(i),
        _ => None,
    }
}

/// Every word of length at most `max_len` readable along a walk: even
/// letters are read walking an edge from tail to antenna, odd letters from
/// antenna to tail. The empty word is always included.
pub fn word_set(w: &Swarm, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::from([Vec::new()]);
    let mut level: HashSet<(Vertex, Word)> = (0..w.vertex_count() as Vertex).map(|v| (v, Vec::new())).collect();
    for _ in 0..max_len {
        let mut next = HashSet::new();
        for (v, word) in &level {
            let forward = w.out_edges(*v).iter().map(|&i| (w.edge(i), true));
            let backward = w.in_edges(*v).iter().map(|&i| (w.edge(i), false));
            for (e, fwd) in forward.chain(backward) {
                let Some(i) = letter(e.label) else { continue };
                if (i % 2 == 0) != fwd {
                    continue;
                }
                let to = if fwd { e.antenna } else { e.tail };
                let mut nw = word.clone();
                nw.push(i);
                out.insert(nw.clone());
                next.insert((to, nw));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    out
}

/// `α` only at the start, `η₀`/`η₁` only at the end.
pub fn is_correct_word(word: &[usize], roles: &Roles) -> bool {
    let n = word.len();
    word.iter()
        .enumerate()
        .all(|(k, &x)| (x != roles.alpha || k == 0) && ((x != roles.eta0 && x != roles.eta1) || k + 1 == n))
}

/// Correct, at least two letters, starting with `α` and ending with `η₀` or `η₁`.
pub fn is_maximal_correct(word: &[usize], roles: &Roles) -> bool {
    word.len() >= 2
        && is_correct_word(word, roles)
        && word[0] == roles.alpha
        && matches!(word.last(), Some(&x) if x == roles.eta0 || x == roles.eta1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Check {
    /// No vertex is both a tail and an antenna.
    PathLengthOne,
    /// At most two labels per vertex pair, of one color.
    AtMostTwo,
    /// Every knot has degree two.
    KnotDegree,
    /// Red edges of a couple are rewritten only together, by the associated rule.
    SpouseOnly,
    /// Couples with a 2-lame edge are never rewritten.
    SterileReds,
    /// Tails of green `α`/`η₁` edges and antennas of green `η₀` edges are
    /// exactly the dangerous ones.
    Dangerous,
    /// Maximal correct words derive `αη₁`.
    MaximalWords,
    /// No green `γ` or `γ′` edge.
    NoGreenGamma,
    /// An edge is red iff its label is lower.
    RedIffLower,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::PathLengthOne => "path-length-one",
            Check::AtMostTwo => "at-most-two",
            Check::KnotDegree => "knot-degree",
            Check::SpouseOnly => "spouse-only",
            Check::SterileReds => "sterile-reds",
            Check::Dangerous => "dangerous-vertices",
            Check::MaximalWords => "maximal-words",
            Check::NoGreenGamma => "no-green-gamma",
            Check::RedIffLower => "red-iff-lower",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct StructuralContext {
    pub roles: Roles,
    /// Needed for the maximal-word check; skipped without it.
    pub thue: Option<ThueSystem>,
    pub max_word_len: usize,
    /// Step bound for each derivation search.
    pub closure_steps: usize,
}

impl StructuralContext {
    pub fn new(roles: Roles) -> Self {
        StructuralContext {
            roles,
            thue: None,
            max_word_len: 8,
            closure_steps: 12,
        }
    }

    pub fn with_thue(mut self, ts: ThueSystem) -> Self {
        self.thue = Some(ts);
        self
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StructuralReport {
    pub checks: Vec<Check>,
    pub violations: Vec<(Check, String)>,
    /// Derivation searches cut off by their bound.
    pub inconclusive: Vec<String>,
    pub maximal_words: usize,
}

impl StructuralReport {
    pub fn passed(&self, c: Check) -> bool {
        self.checks.contains(&c) && !self.violations.iter().any(|(v, _)| *v == c)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every check on the final swarm and the history of `trace`.
pub fn check_structural(trace: &SwarmTrace, ctx: &StructuralContext) -> StructuralReport {
    let w = &trace.final_swarm;
    let roles = &ctx.roles;
    let mut rep = StructuralReport::default();
    let mut bad = |c: Check, m: String| rep.violations.push((c, m));

    for v in 0..w.vertex_count() as Vertex {
        if !w.out_edges(v).is_empty() && !w.in_edges(v).is_empty() {
            bad(Check::PathLengthOne, format!("v{v} is both a tail and an antenna"));
        }
    }

    let mut pairs = BTreeSet::new();
    for e in w.edges() {
        if pairs.insert((e.tail, e.antenna)) {
            let labels = w.labels_between(e.tail, e.antenna);
            if labels.len() > 2 || labels.iter().any(|l| l.color != labels[0].color) {
                bad(
                    Check::AtMostTwo,
                    format!("v{} -> v{} carries {labels:?}", e.tail, e.antenna),
                );
            }
        }
        if (e.label.color == Color::Red) != e.label.is_lower() {
            bad(Check::RedIffLower, format!("{e}"));
        }
        if e.label.color == Color::Green
            && e.label.lower.is_none()
            && (e.label.upper == Some(roles.gamma) || e.label.upper == Some(roles.gamma_prime))
        {
            bad(Check::NoGreenGamma, format!("{e}"));
        }
    }

    for c in &trace.couples {
        let d = w.degree(c.knot);
        if d != 2 {
            bad(
                Check::KnotDegree,
                format!("knot v{} of the couple from step {} has degree {d}", c.knot, c.step),
            );
        }
    }

    for s in &trace.steps {
        for e in [s.input.first, s.input.second] {
            let Some(c) = trace.couple_of(e) else { continue };
            if c.step >= s.step {
                continue;
            }
            let sterile = c.edges.iter().any(|&x| w.edge(x).label.lameness() == 2);
            if sterile {
                bad(
                    Check::SterileReds,
                    format!("step {}: edge {} of a sterile couple rewritten", s.step, w.edge(e)),
                );
            }
            let assoc = trace.rules.rules[c.rule].associate;
            let together = s.input.first == c.edges[0] && s.input.second == c.edges[1];
            if assoc != Some(s.input.rule) || !together {
                bad(
                    Check::SpouseOnly,
                    format!(
                        "step {}: rule {} applied to {} outside its couple's associated rewrite",
                        s.step,
                        trace.rules.rules[s.input.rule].name,
                        w.edge(e)
                    ),
                );
            }
        }
    }

    let mut dangerous = HashSet::new();
    for e in w.edges() {
        if e.label == IdealSpider::full(Color::Green) {
            dangerous.insert(e.tail);
            dangerous.insert(e.antenna);
        }
    }
    for e in w.edges() {
        let Some(i) = letter(e.label) else { continue };
        let tail_expected = i == roles.alpha || i == roles.eta1;
        let antenna_expected = i == roles.eta0;
        if dangerous.contains(&e.tail) != tail_expected {
            bad(Check::Dangerous, format!("{e}: tail dangerous = {}", !tail_expected));
        }
        if dangerous.contains(&e.antenna) != antenna_expected {
            bad(
                Check::Dangerous,
                format!("{e}: antenna dangerous = {}", !antenna_expected),
            );
        }
    }

    rep.checks = vec![
        Check::PathLengthOne,
        Check::AtMostTwo,
        Check::RedIffLower,
        Check::NoGreenGamma,
        Check::KnotDegree,
        Check::SpouseOnly,
        Check::SterileReds,
        Check::Dangerous,
    ];

    if let Some(ts) = &ctx.thue {
        rep.checks.push(Check::MaximalWords);
        let target = roles.target();
        for word in word_set(w, ctx.max_word_len) {
            if !is_maximal_correct(&word, roles) {
                continue;
            }
            rep.maximal_words += 1;
            let cap = word.len().max(target.len()) + 2;
            match thue_derives(ts, &word, &target, ctx.closure_steps, cap) {
                Some(true) => {}
                Some(false) => rep.violations.push((
                    Check::MaximalWords,
                    format!("{word:?} does not derive {target:?} within length {cap}"),
                )),
                None => rep.inconclusive.push(format!(
                    "{word:?}: derivation search cut at {} steps",
                    ctx.closure_steps
                )),
            }
        }
    }
    rep
}

/// Outcome of firing the final rule on a frozen run of the base ruleset.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PhaseTwoReport {
    /// Active rewrites of the full ruleset before firing.
    pub active_before: usize,
    pub fired: usize,
    /// Active rewrites afterwards that were not active before.
    pub new_active: Vec<RewriteInput>,
    pub red_full: bool,
}

impl PhaseTwoReport {
    pub fn holds(&self) -> bool {
        self.new_active.is_empty() && !self.red_full
    }
}

/// Fires rule `final_rule` of `q` on every input active on `w` and reports
/// which rewrites became active.
pub fn phase_two(w: &Swarm, q: &Ruleset, final_rule: usize) -> PhaseTwoReport {
    let before: BTreeSet<RewriteInput> = active_rewrites(q, w).into_iter().collect();
    let mut w2 = w.clone();
    let mut fired = 0;
    for &input in before.iter().filter(|i| i.rule == final_rule) {
        if is_active(q, &w2, input) {
            w2.rewrite(q, input).expect("checked active");
            fired += 1;
        }
    }
    let new_active = active_rewrites(q, &w2)
        .into_iter()
        .filter(|i| !before.contains(i))
        .collect();
    PhaseTwoReport {
        active_before: before.len(),
        fired,
        new_active,
        red_full: w2.has_label(IdealSpider::full(Color::Red)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run_swarm, Edge, SwarmScheduler};
    use super::*;
    use crate::reductions::qeta_ruleset;

    #[test]
    fn empty_swarm_words() {
        assert_eq!(word_set(&Swarm::new(), 5), BTreeSet::from([vec![]]));
    }

    #[test]
    fn correct_words() {
        let r = Roles::fixture();
        assert!(is_correct_word(&[10], &r));
        assert!(!is_maximal_correct(&[10], &r));
        assert!(is_maximal_correct(&[10, 13], &r));
        assert!(is_maximal_correct(&[10, 11, 12, 13], &r));
        assert!(!is_correct_word(&[11, 10, 13], &r));
        assert!(!is_correct_word(&[10, 13, 11], &r));
    }

    #[test]
    fn qeta_words_and_checks() {
        let r = Roles::fixture();
        let rs = qeta_ruleset(16, &r).unwrap();
        let t = run_swarm(&rs, Swarm::green_full(), 50, SwarmScheduler::Spouse);
        let words = word_set(&t.final_swarm, 6);
        assert!(words.contains(&vec![10, 13]));
        assert!(words.contains(&vec![10, 11, 12, 13]));
        let rep = check_structural(&t, &StructuralContext::new(r));
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn knot_of_degree_three_is_reported() {
        let r = Roles::fixture();
        let rs = qeta_ruleset(16, &r).unwrap();
        let mut t = run_swarm(&rs, Swarm::green_full(), 1, SwarmScheduler::Spouse);
        let knot = t.couples[0].knot;
        let extra = t.final_swarm.add_vertex();
        t.final_swarm
            .add_edge(Edge::new(IdealSpider::new(Color::Red, None, Some(3)), extra, knot))
            .unwrap();
        let rep = check_structural(&t, &StructuralContext::new(r));
        assert!(!rep.passed(Check::KnotDegree));
        assert!(rep.passed(Check::PathLengthOne));
    }
}
