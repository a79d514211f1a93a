use std::path::Path;
use std::process::{Command, Output};

const MAC: &str = "ci f(opcode=0) {
  input a : signed<32>;
  input b : signed<32>;
  input c : signed<32>;
  output x : signed<32>;
  x = (a * b) + c;
}
";

fn cigen(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cigen"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace(spec: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.ci"), spec).unwrap();
    dir
}

#[test]
fn build_writes_three_files_and_reports_stages() {
    let dir = workspace(MAC);
    let o = cigen(&["build", "spec.ci", "-o", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for stage in ["[parse]", "[map]", "[generate]", "[validate]", "[verify] 256 vector(s)", "[write]"] {
        assert!(out.contains(stage), "missing {stage} in\n{out}");
    }
    for f in ["f.vhd", "ci_f.h", "report.json"] {
        assert!(dir.path().join("out").join(f).is_file(), "{f}");
    }
    let report = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    assert!(report.contains("\"ci_cycles\": 4"));
}

#[test]
fn build_options_and_config() {
    let dir = workspace(MAC);
    std::fs::write(dir.path().join("cfg.json"), r#"{"intrinsic": "my_custom", "vectors": 8}"#).unwrap();
    let o = cigen(&["build", "spec.ci", "-o", "out", "--config", "cfg.json", "--vectors", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("[verify] 12 vector(s)"));
    let header = std::fs::read_to_string(dir.path().join("out/ci_f.h")).unwrap();
    assert!(header.contains("my_custom(CI_F_OPCODE"));

    std::fs::write(dir.path().join("bad.json"), r#"{"costs": {"XOR": 2}}"#).unwrap();
    let o = cigen(&["build", "spec.ci", "-o", "out2", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("out2").exists());
}

#[test]
fn build_rejects_bad_opcode_without_writing() {
    let dir = workspace(&MAC.replace("opcode=0", "opcode=7"));
    let o = cigen(&["build", "spec.ci", "-o", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[parse]"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn simulate_prints_result_and_trace() {
    let dir = workspace(MAC);
    let o = cigen(
        &["simulate", "spec.ci", "--inputs", "a=2,b=3,c=4", "--trace", "t.jsonl", "--clk-en-gaps", "1:5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("done_cycle 3\n"), "{out}");
    assert!(out.contains("done_raw_cycle 8\n"), "{out}");
    assert!(out.contains("result 10 (0x0000000a)"), "{out}");
    let trace = std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 9);
    assert!(trace.lines().last().unwrap().contains("\"done\":true"));
}

#[test]
fn simulate_errors() {
    let dir = workspace(MAC);
    let o = cigen(&["simulate", "spec.ci", "--inputs", "a=2,b=3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`c`"));

    let o = cigen(&["simulate", "spec.ci", "--inputs", "a=2,b=3,c=4", "--restart-at", "2", "--strict"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("start asserted"), "{}", stderr(&o));

    let div = workspace("ci d(opcode=1) { input a : signed<8>; input b : signed<8>; output x : signed<8>; x = a / b; }");
    let o = cigen(&["simulate", "spec.ci", "--inputs", "a=5,b=0"], div.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("division by zero in `u_divs_1` at cycle 1"), "{}", stderr(&o));
}

#[test]
fn patch_writes_beside_source_and_is_idempotent() {
    let dir = workspace(MAC);
    std::fs::write(dir.path().join("main.c"), "#include <stdio.h>\nint x;\nvoid k(int a, int b, int c) { x = (a * b) + c; }\n").unwrap();
    let o = cigen(&["patch", "spec.ci", "main.c"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let patched = std::fs::read_to_string(dir.path().join("main.ci.c")).unwrap();
    assert_eq!(
        patched,
        "#include <stdio.h>\n#include \"ci_f.h\"\nint x;\nvoid k(int a, int b, int c) { x = CI_F(a, b, c); }\n"
    );
    assert!(dir.path().join("ci_f.h").is_file());

    let o = cigen(&["patch", "spec.ci", "main.ci.c", "--in-place"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no expression matching"), "{}", stderr(&o));
}

#[test]
fn report_with_energy() {
    let dir = workspace(MAC);
    let o = cigen(&["report", "spec.ci", "--power", "298", "--time", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("\"E\": 2980.0"), "{out}");
    assert!(out.contains("\"speedup_estimate\": 1.0"), "{out}");

    let o = cigen(&["report", "spec.ci"], dir.path());
    assert!(!stdout(&o).contains("energy"));

    let o = cigen(&["report", "spec.ci", "--power", "298"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cigen(&["report", "spec.ci", "--power", "-1", "--time", "10"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cigen(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(cigen(&["build", "missing.ci", "-o", "x"], dir.path()).status.code(), Some(1));
    assert_eq!(cigen(&["--help"], dir.path()).status.code(), Some(0));
}
