use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cqdet::chase::trace_from_json_lines;
use cqdet::greenred::VerdictJson;
use cqdet::spider::Ruleset;
use cqdet::swarm::{parse_swarm, SwarmStep};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cqdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn self_determinacy_exits_zero_at_step_one() {
    let o = cqdet(&["determinacy", path(&data("self.det"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: VerdictJson = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v.verdict, "Determined");
    assert_eq!(v.step, Some(1));
}

#[test]
fn empty_views_exit_one() {
    let o = cqdet(&["determinacy", path(&data("empty.det"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NotDetermined"));
}

#[test]
fn tiny_budget_is_unknown() {
    let o = cqdet(&[
        "determinacy",
        "--ruleset",
        path(&data("fixture.rules")),
        "--budget",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compiled_fixture_is_determined() {
    let o = cqdet(&[
        "determinacy",
        "--ruleset",
        path(&data("fixture.rules")),
        "--budget",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.det");
    std::fs::write(&f, "V(x) :- R(x,y).\nquery: Q(x) :- R(x,.").unwrap();
    let o = cqdet(&["determinacy", f.to_str().unwrap()]);
    assert!(o.status.code().unwrap() > 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"));
}

#[test]
fn compile_fixture_gives_nine_rules() {
    let o = cqdet(&["compile", "--kind", "thue", path(&data("fixture.thue"))]);
    assert_eq!(o.status.code(), Some(0));
    let rs = Ruleset::parse(&stdout(&o)).unwrap();
    assert_eq!(rs.len(), 9);
    assert_eq!(
        rs,
        Ruleset::parse(&std::fs::read_to_string(data("fixture.rules")).unwrap()).unwrap()
    );
}

#[test]
fn unfriendly_system_lists_violations() {
    let o = cqdet(&["compile", "--kind", "thue", path(&data("negative.thue"))]);
    assert!(o.status.code().unwrap() > 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma production"), "{err}");
    let o = cqdet(&["compile", "--kind", "thue", "--unchecked", path(&data("negative.thue"))]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn two_vertex_graph_gives_four_rules() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g");
    std::fs::write(&f, "1 2\n").unwrap();
    let o = cqdet(&["compile", "--kind", "reach", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("query ")).count(), 4);
}

#[test]
fn malformed_swarm_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w");
    std::fs::write(&f, "H G v0 v1\nH nonsense v0\n").unwrap();
    let o = cqdet(&["swarm", path(&data("qeta.rules")), "--start", f.to_str().unwrap()]);
    assert!(o.status.code().unwrap() > 2);
}

#[test]
fn swarm_trace_reproduces_first_rows() {
    let o = cqdet(&["swarm", path(&data("qeta.rules")), "--budget", "14", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let steps: Vec<SwarmStep> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(steps.len(), 14);
    // 1A on the green full edge, then 1B on the couple it created.
    assert_eq!((steps[0].input.rule, steps[1].input.rule), (0, 1));
    assert_eq!(steps[1].output_edges[0].label.to_string(), "G^10");
    assert_eq!(steps[1].output_edges[1].label.to_string(), "G^13");
}

#[test]
fn structural_check_passes_on_qeta() {
    let o = cqdet(&[
        "swarm",
        path(&data("qeta.rules")),
        "--budget",
        "300",
        "--check",
        "--thue",
        path(&data("fixture.thue")),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn swarm_text_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("final.swarm");
    let o = cqdet(&[
        "swarm",
        path(&data("qeta.rules")),
        "--budget",
        "30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let w = parse_swarm(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(w.edge_count(), 61);
    let words = cqdet(&["words", out.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(words.status.code(), Some(0));
    assert!(stdout(&words).lines().any(|l| l == "10 13"));
}

#[test]
fn chase_trace_round_trips_and_is_deterministic() {
    let file = data("self.det");
    let args = ["chase", path(&file), "--scheduler", "random", "--seed", "7"];
    let a = cqdet(&args);
    let b = cqdet(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let recs = trace_from_json_lines(&stdout(&a)).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(&*recs[0].tgd, "V:G->R");
}

#[test]
fn spouse_scheduler_is_rejected_for_the_chase() {
    let o = cqdet(&["chase", path(&data("self.det")), "--scheduler", "spouse"]);
    assert!(o.status.code().unwrap() > 2);
}
