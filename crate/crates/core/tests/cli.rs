use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const Z2_FREE_Z: &str = r#"{"alphabet":["a","b","t"],"relators":["a*b*a^-1*b^-1"],
  "peripherals":[{"name":"P1","rank":2,"alphabet":["a","b"],"embedding":{"a":"a","b":"b"}}]}"#;
const STRUCTURE: &str = "builtin:abelian(a,b)*free(t)";

fn rhm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhmember")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn presentation(dir: &Path) -> String {
    let p = dir.join("z2z.json");
    fs::write(&p, Z2_FREE_Z).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn fold_summaries() {
    let o = rhm(&["fold", "--gens", "a*a,a*b"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "vertices: 2\nedges: 3\nrank: 2\nindex: ∞\n");
    let o = rhm(&["--json", "fold", "--gens", "a*a^-1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"], 1);
    assert_eq!(v["rank"], 0);
    let o = rhm(&["--json", "fold", "--gens", ""]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 0);
    assert_eq!(v["edges"], 0);
}

#[test]
fn parse_errors_exit_3_with_position() {
    let o = rhm(&["fold", "--gens", "a*b,a**b"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset"));
    let o = rhm(&["fold", "--alphabet", "a,b", "--gens", "a*c"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn seeds_do_not_change_results() {
    let base = stdout(&rhm(&["--json", "fold", "--gens", "a*b*a^-1,b*b,a*a*b"]));
    for seed in ["1", "2", "99"] {
        assert_eq!(stdout(&rhm(&["--json", "--seed", seed, "fold", "--gens", "a*b*a^-1,b*b,a*a*b"])), base);
    }
}

#[test]
fn free_group_commands() {
    let o = rhm(&["index", "--gens", "a*a,b,a*b*a^-1"]);
    assert_eq!(stdout(&o), "index: 2\n");
    let o = rhm(&["--json", "rank", "--gens", "a*a,a*b,b*a"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 3);
    let o = rhm(&["--json", "intersect", "--gens1", "a*a,b", "--gens2", "a*a*a,b"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // A 6-cycle of a-edges with one b-loop: ⟨a⁶, b⟩.
    assert_eq!(v["rank"], 2);
    assert_eq!(v["vertices"], 6);
    let o = rhm(&["--json", "conjugate", "--gens1", "a", "--gens2", "b*a*b^-1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["conjugate"], true);
    let o = rhm(&["conjugate", "--gens1", "a", "--gens2", "a*a"]);
    assert_eq!(stdout(&o), "not conjugate\n");
}

#[test]
fn graph_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let dot = dir.path().join("g.dot");
    let o = rhm(&["fold", "--gens", "a*b,b*a", "--out", out.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let json: rhmember::stallings::GraphJson = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let g = rhmember::stallings::StallingsGraph::from_json(&json, None).unwrap();
    assert_eq!(g.to_json(), json);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn member_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = presentation(dir.path());
    let o = rhm(&["member", "--presentation", &p, "--structure", STRUCTURE, "--subgroup", "t", "--element", "t*t*t"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let cert = dir.path().join("cert.json");
    let o = rhm(&[
        "member",
        "--presentation",
        &p,
        "--structure",
        STRUCTURE,
        "--subgroup",
        "t",
        "--element",
        "a",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let c: rhmember::relhyp::CertificateJson = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let (pres, peripherals) = rhmember::presentation::PresentationFile::read(Path::new(&p)).unwrap().build().unwrap();
    let s = std::sync::Arc::new(rhmember::autostruct::builtin_from_spec(STRUCTURE).unwrap());
    let inst = rhmember::relhyp::RelHypInstance::new(pres, peripherals, s).unwrap();
    assert!(c.verify(&inst).unwrap());

    let o = rhm(&[
        "member", "--presentation", &p, "--structure", STRUCTURE, "--subgroup", "a*b", "--element", "a", "--budget", "1",
    ]);
    assert_eq!(code(&o), 2);
    let o = rhm(&["member", "--presentation", &p, "--structure", "/no/bundle", "--subgroup", "t", "--element", "a"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn member_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = presentation(dir.path());
    let args = [
        "--json", "member", "--presentation", &p, "--structure", STRUCTURE, "--subgroup", "a*b", "--element", "a",
        "--schedule", "alt", "--budget", "300",
    ];
    let first = rhm(&args);
    assert_eq!(code(&first), 1);
    assert_eq!(stdout(&first), stdout(&rhm(&args)));
    let trace = dir.path().join("trace");
    let o = rhm(&[
        "--trace-dir", trace.to_str().unwrap(), "member", "--presentation", &p, "--structure", STRUCTURE,
        "--subgroup", "t", "--element", "b",
    ]);
    assert_eq!(code(&o), 1);
    assert!(trace.join("member.json").exists());
}

#[test]
fn oracle_command() {
    let o = rhm(&["oracle", "--structure", STRUCTURE, "--subgroup", "t", "--element", "a"]);
    assert_eq!((code(&o), stdout(&o)), (1, "non-member\n".to_string()));
    let o = rhm(&["oracle", "--structure", "builtin:abelian(a,b)", "--subgroup", "a^2,b", "--element", "a"]);
    assert_eq!(code(&o), 1);
    let o = rhm(&["oracle", "--structure", STRUCTURE, "--subgroup", "a*t", "--element", "1"]);
    assert_eq!(code(&o), 6);
    let o = rhm(&["oracle", "--structure", STRUCTURE, "--subgroup", "a", "--element", ""]);
    assert_eq!(code(&o), 0);

    // Bundles loaded from disk carry no oracle.
    let dir = tempfile::tempdir().unwrap();
    rhmember::autostruct::builtin_from_spec(STRUCTURE).unwrap().save(dir.path()).unwrap();
    let o = rhm(&["oracle", "--structure", dir.path().to_str().unwrap(), "--subgroup", "t", "--element", "a"]);
    assert_eq!(code(&o), 6);
}

#[test]
fn complete_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = presentation(dir.path());
    let trace = dir.path().join("rounds");
    let o = rhm(&[
        "--trace-dir", trace.to_str().unwrap(), "complete", "--presentation", &p, "--subgroup", "a", "--element",
        "b*a*b^-1",
    ]);
    assert_eq!(code(&o), 0);
    assert!(trace.join("round_000.json").exists());
    let o = rhm(&["complete", "--presentation", &p, "--subgroup", "a", "--element", "b", "--rounds", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn relative_stallings_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("h.dot");
    let o = rhm(&[
        "--json", "l-stallings", "--structure", "builtin:abelian(a,b)", "--subgroup", "a^2,b", "--element", "a,b*a^2",
        "--emit-dot", dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["graph"]["vertices"], 2);
    assert_eq!(v["membership"][0][1], false);
    assert_eq!(v["membership"][1][1], true);
    assert!(dot.exists());
    let o = rhm(&["l-stallings", "--structure", "builtin:abelian(a,b)", "--subgroup", "a^2*b", "--budget", "5"]);
    assert_eq!(code(&o), 2);

    rhmember::autostruct::builtin_from_spec("builtin:free(a,b)").unwrap().save(dir.path()).unwrap();
    let o = rhm(&["validate-structure", "--structure", dir.path().to_str().unwrap(), "--depth", "3"]);
    assert_eq!(code(&o), 0);
    fs::write(dir.path().join("M_b.json"), fs::read_to_string(dir.path().join("M_a.json")).unwrap()).unwrap();
    let o = rhm(&["validate-structure", "--structure", dir.path().to_str().unwrap(), "--depth", "3"]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("violation"));
}
