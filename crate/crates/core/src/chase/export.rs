//! Trace export.
//!
//! JSON lines carry one object per applied step:
//! `{"step": 3, "tgd": "V:G->R", "binding": ["a!", "_n4"], "added_atoms": ["R_H(_n7,a!,_n8)"], "added_nulls": ["_n7"]}`.
//! Terms and atoms use the text syntax of [`crate::parse`].

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ChaseStep;
use crate::cq::{Atom, Structure, Term};
use crate::error::{Error, Result};
use crate::parse::{parse_atom, parse_term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub tgd: String,
    pub binding: Vec<String>,
    pub added_atoms: Vec<String>,
    pub added_nulls: Vec<String>,
}

impl StepRecord {
    pub fn from_step(s: &ChaseStep) -> Self {
        StepRecord {
            step: s.step,
            tgd: s.tgd_id.to_string(),
            binding: s.binding.iter().map(Term::to_string).collect(),
            added_atoms: s.added_atoms.iter().map(Atom::to_string).collect(),
            added_nulls: s.added_nulls.iter().map(Term::to_string).collect(),
        }
    }

    pub fn binding_terms(&self) -> Result<Vec<Term>> {
        self.binding.iter().map(|t| parse_term(t)).collect()
    }

    pub fn atoms(&self) -> Result<Vec<Atom>> {
        self.added_atoms.iter().map(|a| parse_atom(a)).collect()
    }

    pub fn null_terms(&self) -> Result<Vec<Term>> {
        self.added_nulls.iter().map(|t| parse_term(t)).collect()
    }
}

pub fn trace_to_json_lines(steps: &[ChaseStep]) -> String {
    let mut out = String::new();
    for s in steps {
        let line = serde_json::to_string(&StepRecord::from_step(s)).expect("records serialize");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn trace_from_json_lines(src: &str) -> Result<Vec<StepRecord>> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: StepRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        rec.binding_terms()?;
        rec.atoms()?;
        rec.null_terms()?;
        out.push(rec);
    }
    Ok(out)
}

fn color_of(predicate: &str) -> &'static str {
    if predicate.starts_with("G_") {
        "darkgreen"
    } else if predicate.starts_with("R_") {
        "red"
    } else {
        "black"
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering: elements are nodes, binary atoms are edges, wider atoms are
/// small box nodes with numbered edges to their arguments. Green and red
/// predicates are drawn in their color.
pub fn structure_to_dot(d: &Structure) -> String {
    let mut out = String::from("digraph structure {\n  node [shape=ellipse];\n");
    for t in d.domain() {
        let shape = if t.is_constant() { "box" } else { "ellipse" };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(&t.to_string()));
    }
    for (i, a) in d.atoms().enumerate() {
        let color = color_of(&a.predicate);
        if a.args.len() == 2 {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}, color={color}, fontcolor={color}];",
                quote(&a.args[0].to_string()),
                quote(&a.args[1].to_string()),
                quote(&a.predicate)
            );
        } else {
            let node = format!("atom{i}");
            let _ = writeln!(
                out,
                "  {node} [shape=point, xlabel={}, color={color}];",
                quote(&a.predicate)
            );
            for (k, arg) in a.args.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {node} -> {} [label=\"{}\", color={color}];",
                    quote(&arg.to_string()),
                    k + 1
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chase::{run_chase, Scheduler, Tgd};
    use crate::cq::Signature;

    #[test]
    fn json_lines_round_trip() {
        let sig = Arc::new(
            Signature::new()
                .with_predicate("R", 2)
                .unwrap()
                .with_predicate("S", 2)
                .unwrap(),
        );
        let t = Tgd::new(
            "t",
            vec![parse_atom("R(x,y)").unwrap()],
            vec![parse_atom("S(y,z)").unwrap()],
        )
        .unwrap();
        let d = Structure::from_atoms(sig, &[parse_atom("R(a,b)").unwrap()]).unwrap();
        let trace = run_chase(&[t], d, 10, Scheduler::Fifo).unwrap();
        let text = trace_to_json_lines(&trace.steps);
        let back = trace_from_json_lines(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], StepRecord::from_step(&trace.steps[0]));
        assert_eq!(back[0].atoms().unwrap(), trace.steps[0].added_atoms);
        let dot = structure_to_dot(&trace.final_structure);
        assert!(dot.contains("label=\"S\""));
    }
}
