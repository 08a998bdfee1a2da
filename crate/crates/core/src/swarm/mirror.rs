//! Low-level chase and swarm rewriting run side by side.
//!
//! The low-level chase over the spider dependencies picks each trigger; the
//! swarm applies the rewrite read off the trigger's body match. After every
//! step the swarm of the low-level structure must equal the rewritten swarm
//! under the vertex correspondence built along the way.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{active_rewrites, is_active, swarm_of, Edge, RewriteInput, Swarm, Vertex};
use crate::chase::{ChaseEngine, Scheduler};
use crate::cq::{Homomorphism, Structure, Term};
use crate::error::{Error, Result};
use crate::greenred::{color_of, twins_of, Color};
use crate::spider::{IdealSpider, Ruleset, SpiderWorld, HEAD};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MirrorReport {
    /// Low-level steps mirrored.
    pub steps: usize,
    /// Steps after which the two swarms were compared and agreed.
    pub agreeing_steps: usize,
    pub mismatches: Vec<String>,
    /// Points at which the active sets were compared.
    pub active_set_checks: usize,
    /// Largest number of `H` atoms seen on one tail/antenna pair.
    pub max_heads_per_pair: usize,
    pub saturated: bool,
    /// Idempotence audit failures of the low-level chase.
    pub low_level_violations: Vec<String>,
}

impl MirrorReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty() && self.agreeing_steps == self.steps
    }
}

struct Mirror<'a> {
    world: &'a SpiderWorld,
    rules: &'a Ruleset,
    rule_of_tgd: Vec<usize>,
    swarm: Swarm,
    vertex: HashMap<Term, Vertex>,
}

impl Mirror<'_> {
    /// Swarm edge of the spider headed by `head`.
    fn edge_of(&self, d: &Structure, head: &Term) -> Result<Edge> {
        let (label, m) = self
            .world
            .classify_real_spider(d, head)?
            .ok_or_else(|| Error::Swarm(format!("{head} is not a head")))?;
        let v = |var: &str| {
            let t = m.get(&Term::var(var)).expect("classification binds z1 and z2");
            self.vertex
                .get(t)
                .copied()
                .ok_or_else(|| Error::Swarm(format!("element {t} has no swarm vertex")))
        };
        Ok(Edge::new(label, v("z1")?, v("z2")?))
    }

    fn input_of(&self, d: &Structure, tgd: usize, h: &Homomorphism) -> Result<RewriteInput> {
        let head = |v: &str| {
            h.get(&Term::var(v))
                .cloned()
                .ok_or_else(|| Error::Swarm(format!("body match does not bind {v}")))
        };
        let e1 = self.edge_of(d, &head("z")?)?;
        let e2 = self.edge_of(d, &head("z'")?)?;
        let find = |e: Edge| {
            self.swarm
                .find(&e)
                .ok_or_else(|| Error::Swarm(format!("{e} missing from the swarm")))
        };
        Ok(RewriteInput {
            rule: self.rule_of_tgd[tgd],
            first: find(e1)?,
            second: find(e2)?,
        })
    }
}

fn heads_per_pair(d: &Structure) -> usize {
    let mut count: HashMap<(Term, Term), (usize, BTreeSet<Color>)> = HashMap::new();
    for color in [Color::Green, Color::Red] {
        for (_, a) in d.atoms_of(&color.colored_name(HEAD)) {
            let e = count.entry((a.args[1].clone(), a.args[2].clone())).or_default();
            e.0 += 1;
            e.1.insert(color);
        }
    }
    count
        .values()
        .map(|(n, colors)| if colors.len() > 1 { usize::MAX } else { *n })
        .max()
        .unwrap_or(0)
}

/// Mirrors up to `steps` low-level steps of `rules` from one green full
/// spider. Active sets are compared every `active_every` steps (0 means
/// only at the end).
pub fn mirror_run(
    world: &SpiderWorld,
    rules: &Ruleset,
    steps: usize,
    scheduler: Scheduler,
    active_every: usize,
) -> Result<MirrorReport> {
    let tgds = rules.tgds(world)?;
    let rule_of_tgd = tgds
        .iter()
        .map(|t| {
            let name = t.id().rsplit_once(':').map(|(n, _)| n).unwrap_or(t.id());
            rules
                .index_of(name)
                .ok_or_else(|| Error::Swarm(format!("dependency {} has no rule", t.id())))
        })
        .collect::<Result<Vec<_>>>()?;
    let d0 = world.ideal_spider(IdealSpider::full(Color::Green))?;
    let mut engine = ChaseEngine::new(&tgds, d0)?
        .with_scheduler(scheduler)
        .with_twins(twins_of(&tgds));
    let mut m = Mirror {
        world,
        rules,
        rule_of_tgd,
        swarm: Swarm::green_full(),
        vertex: HashMap::from([(Term::var("z1"), 0), (Term::var("z2"), 1)]),
    };
    let mut rep = MirrorReport::default();
    let compare_active = |engine: &mut ChaseEngine, m: &Mirror, rep: &mut MirrorReport, at: usize| -> Result<()> {
        rep.active_set_checks += 1;
        let low: BTreeSet<RewriteInput> = engine
            .pending_active_matches()
            .into_iter()
            .map(|(t, h)| m.input_of(engine.structure(), t, &h))
            .collect::<Result<_>>()?;
        let high: BTreeSet<RewriteInput> = active_rewrites(m.rules, &m.swarm).into_iter().collect();
        if low != high {
            rep.mismatches.push(format!(
                "after step {at}: {} active low-level triggers map to {} rewrites, swarm has {} active ({} only low, {} only swarm)",
                engine.pending_active().len(),
                low.len(),
                high.len(),
                low.difference(&high).count(),
                high.difference(&low).count()
            ));
        }
        Ok(())
    };
    for k in 0..steps {
        if !engine.step() {
            rep.saturated = true;
            break;
        }
        rep.steps += 1;
        let d = engine.structure();
        let step = &engine.steps()[k];
        let h = engine.step_body_match(k);
        let input = m.input_of(d, step.tgd, &h)?;
        if !is_active(rules, &m.swarm, input) {
            rep.mismatches.push(format!(
                "step {}: low-level trigger of {} maps to an inactive rewrite",
                k + 1,
                step.tgd_id
            ));
            break;
        }
        let out = m.swarm.rewrite(rules, input)?;
        let fresh: Vec<Term> = step
            .added_atoms
            .iter()
            .filter(|a| color_of(&a.predicate).is_some_and(|(_, b)| b == HEAD))
            .flat_map(|a| [a.args[1].clone(), a.args[2].clone()])
            .filter(|t| !m.vertex.contains_key(t))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if fresh.len() != 1 {
            rep.mismatches
                .push(format!("step {}: {} new tail/antenna elements", k + 1, fresh.len()));
            break;
        }
        m.vertex.insert(fresh[0].clone(), out.new_vertex);
        let (low, low_map) = swarm_of(world, d)?;
        let mut corr = HashMap::new();
        for (t, &lv) in &low_map {
            match m.vertex.get(t) {
                Some(&sv) => {
                    corr.insert(lv, sv);
                }
                None => {
                    rep.mismatches
                        .push(format!("step {}: element {t} unknown to the swarm", k + 1));
                }
            }
        }
        if low.matches_under(&m.swarm, &corr) {
            rep.agreeing_steps += 1;
        } else {
            rep.mismatches.push(format!(
                "step {}: swarm of the structure ({} vertices, {} edges) differs from the rewritten swarm ({} vertices, {} edges)",
                k + 1,
                low.vertex_count(),
                low.edge_count(),
                m.swarm.vertex_count(),
                m.swarm.edge_count()
            ));
            break;
        }
        if active_every > 0 && (k + 1) % active_every == 0 {
            compare_active(&mut engine, &m, &mut rep, k + 1)?;
        }
    }
    rep.max_heads_per_pair = heads_per_pair(engine.structure());
    let at = rep.steps;
    compare_active(&mut engine, &m, &mut rep, at)?;
    rep.low_level_violations = engine.violations().to_vec();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{qeta_ruleset, Roles};

    #[test]
    fn qeta_first_steps_agree() {
        let world = SpiderWorld::new(16).unwrap();
        let rs = qeta_ruleset(16, &Roles::fixture()).unwrap();
        let rep = mirror_run(&world, &rs, 12, Scheduler::Fifo, 4).unwrap();
        assert_eq!(rep.steps, 12);
        assert!(rep.agrees(), "{:?}", rep.mismatches);
        assert!(rep.max_heads_per_pair <= 2);
    }
}
