use std::path::Path;
use std::process::{Command, Output};

use fcn_cli::{Flow, Shell, ShellError};
use serde_json::Value;

const C17: &str = include_str!("../../core/tests/fixtures/c17.v");

const COMPARE: &str = "\
read c17.v
exact -ixbs 2ddwave4
ps -g
cell
show
exact -ps use
ps -g
cell
show
";

fn fcn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcn"))
        .args(args)
        .current_dir(dir)
        .env_remove("FCN_SVG_VIEWER")
        .output()
        .unwrap()
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c17.v"), C17).unwrap();
    dir
}

fn stat_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| l.contains("#G:"))
        .map(str::to_string)
        .collect()
}

/// The printed statistics line rebuilt from a log record.
fn line_from_record(name: &str, s: &Value) -> String {
    format!(
        "{name}: {} x {}, #G: {}, #W: {}, #C: {}, #L: {}, CP: {}, TP: 1/{}",
        s["w"], s["h"], s["gates"], s["wires"], s["crossings"], s["latches"], s["cp"], s["tp_denominator"]
    )
}

#[test]
fn compare_script() {
    let dir = workdir();
    std::fs::write(dir.path().join("compare.fs"), COMPARE).unwrap();
    let out = fcn(dir.path(), &["-f", "compare.fs", "-l", "log.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = stat_lines(&out);
    assert_eq!(lines.len(), 2, "{lines:?}");
    assert!(lines[0].starts_with("c17: 5 x 7, #G: 18, "), "{}", lines[0]);
    assert!(lines[0].ends_with("TP: 1/1"));
    assert!(lines[1].starts_with("c17: 4 x 5, #G: 11, "), "{}", lines[1]);
    for svg in ["c17.svg", "c17_1.svg"] {
        let text = std::fs::read_to_string(dir.path().join(svg)).unwrap();
        roxmltree::Document::parse(&text).unwrap();
    }

    let log: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("log.json")).unwrap()).unwrap();
    let cmds = log["commands"].as_array().unwrap();
    assert_eq!(cmds.len(), 9);
    let ps: Vec<&Value> = cmds.iter().filter(|c| c["cmd"] == "ps -g").collect();
    for (rec, line) in ps.iter().zip(&lines) {
        assert_eq!(&line_from_record(rec["name"].as_str().unwrap(), &rec["stats"]), line);
        let s = &rec["stats"];
        assert!(s["bbox_w"].as_u64().unwrap() <= s["w"].as_u64().unwrap());
        assert!(s["energy_slow_mev"].as_f64().unwrap() > 0.0);
    }
    assert!(cmds.iter().all(|c| c["runtime_s"].as_f64().unwrap() >= 0.0));
}

#[test]
fn inline_commands_with_log() {
    let dir = workdir();
    let out = fcn(
        dir.path(),
        &["-c", "read c17.v; ortho; ps -g; cell; qca c17.qca", "-l", "c17.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells = fcn_core::io::read_qca(&dir.path().join("c17.qca")).unwrap();
    assert!(cells.cell_count() > 0);
    let log: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c17.json")).unwrap()).unwrap();
    let cmds = log["commands"].as_array().unwrap();
    let names: Vec<&str> = cmds.iter().map(|c| c["cmd"].as_str().unwrap()).collect();
    assert_eq!(names, ["read c17.v", "ortho", "ps -g", "cell", "qca c17.qca"]);
    assert_eq!(line_from_record("c17", &cmds[2]["stats"]), stat_lines(&out)[0]);
}

#[test]
fn empty_script_writes_empty_log() {
    let dir = workdir();
    std::fs::write(dir.path().join("empty.fs"), "# nothing\n\n").unwrap();
    let out = fcn(dir.path(), &["-f", "empty.fs", "-l", "log.json"]);
    assert!(out.status.success());
    let log: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("log.json")).unwrap()).unwrap();
    assert_eq!(log["commands"].as_array().unwrap().len(), 0);
}

#[test]
fn exit_codes() {
    let dir = workdir();
    let out = fcn(dir.path(), &["-c", "read c17.v; cell"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = fcn(dir.path(), &["-c", "frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    let out = fcn(dir.path(), &["-f", "missing.fs"]);
    assert_eq!(out.status.code(), Some(1));

    let out = fcn(dir.path(), &["--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fcn(dir.path(), &["-f", "a.fs", "-c", "help"]);
    assert_eq!(out.status.code(), Some(2));

    // the log is still written after a failing command
    let out = fcn(
        dir.path(),
        &["-c", "read c17.v; ortho; exact -s nosuch", "-l", "partial.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let log: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("partial.json")).unwrap()).unwrap();
    assert_eq!(log["commands"].as_array().unwrap().len(), 2);
}

#[test]
fn scripts_are_deterministic() {
    let script = "read c17.v\northo --io\ncell\nqca\nexact -s use -p\nps -g\nsave\n";
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = workdir();
        std::fs::write(dir.path().join("s.fs"), script).unwrap();
        let out = fcn(dir.path(), &["-f", "s.fs"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let qca = std::fs::read_to_string(dir.path().join("c17.qca")).unwrap();
        let json = std::fs::read_to_string(dir.path().join("c17_1.json")).unwrap();
        runs.push((stat_lines(&out), qca, json));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn stores_and_layout_files() {
    let dir = workdir();
    let mut sh = Shell::new(dir.path());
    for cmd in ["read c17.v", "ortho", "ortho --io", "save both.json"] {
        sh.execute(cmd).unwrap();
    }
    let (_, listing) = sh.execute("store -g").unwrap();
    assert_eq!(listing, "gate layouts: 2\n  0: c17\n* 1: c17\n");
    sh.execute("store -g --set 0").unwrap();
    let (_, first) = sh.execute("ps -g").unwrap();
    sh.execute("load both.json").unwrap();
    let (_, loaded) = sh.execute("ps -g").unwrap();
    sh.execute("store -g --set 1").unwrap();
    let (_, second) = sh.execute("ps -g").unwrap();
    assert_eq!(loaded, second);
    assert_ne!(first, second);
    assert!(matches!(
        sh.execute("store -g --set 9"),
        Err(ShellError::Usage(_) | ShellError::Failed(_))
    ));
    assert!(matches!(sh.execute("quit"), Ok((Flow::Quit, _))));
}
