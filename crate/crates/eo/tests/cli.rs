use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> PathBuf {
    repo().join("scenarios").join(name)
}

fn eo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eo"))
        .args(["--seed", "1"])
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn bench_evaluations(agents: &str) -> usize {
    let out = eo(&["bench", "--agents", agents, "--touches", "20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    text.split_whitespace()
        .find_map(|kv| kv.strip_prefix("evaluations="))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn golden_script_passes() {
    let out = eo(&["run", scenario("winter_feast_table2.script").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("> click John Doe.action_light_fire"));
    assert!(text.contains("available: [action_cook]"));
}

#[test]
fn empty_script_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.script");
    fs::write(&path, "# nothing\n").unwrap();
    assert_eq!(eo(&["run", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = scenario("winter_feast.bsl");
    let path = dir.path().join("wrong.script");
    fs::write(
        &path,
        format!(
            "load {}\nset John Doe.energy 20\nclick John Doe.action_hunt\nset John Doe.warmth 20\nexpect-available John Doe [action_hunt]\n",
            model.display()
        ),
    )
    .unwrap();
    let out = eo(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_script_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.script");
    fs::write(&path, "jump John Doe\n").unwrap();
    assert_eq!(eo(&["run", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(eo(&["run"]).status.code(), Some(2));
}

#[test]
fn analyzer_rejects_missing_attribute() {
    let dir = tempfile::tempdir().unwrap();
    let source = fs::read_to_string(scenario("winter_feast.bsl")).unwrap();
    let broken = source.replace(": Attribute: hasDeer\n", "");
    assert_ne!(broken, source);
    let path = dir.path().join("broken.bsl");
    fs::write(&path, broken).unwrap();
    let out = eo(&["analyze", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("action_hunt"));

    let clean = eo(&["analyze", scenario("winter_feast.bsl").to_str().unwrap()]);
    assert_eq!(clean.status.code(), Some(0));
}

#[test]
fn bench_cost_ignores_idle_agents() {
    assert_eq!(bench_evaluations("1"), bench_evaluations("1000"));
}

#[test]
fn exported_graph_resumes_for_trace_and_autoplay() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.jsonl");
    let script = repo().join("scenarios/winter_feast_table2.script");
    let out = eo(&[
        "run",
        script.to_str().unwrap(),
        "--graph-export",
        graph.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = eo(&["trace", "John Doe.warmth", "--graph", graph.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("John Doe.warmth := 70"), "{text}");
    assert!(text.contains("action_light_fire := 1"), "{text}");

    let out = eo(&["autoplay", "John Doe", "--graph", graph.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("John Doe is safe"));
}

#[test]
fn autoplay_from_a_cold_start() {
    let out = eo(&[
        "autoplay",
        "John Doe",
        "--set",
        "John Doe.energy=20",
        "--set",
        "John Doe.warmth=20",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gather = text.find("action_gather").unwrap();
    let hunt = text.find("action_hunt").unwrap();
    assert!(gather < hunt, "{text}");
    assert!(text.contains("John Doe is safe"));
}
