use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nok(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nok"))
        .args(args)
        .env("NOK_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn mv_of_s2_is_certified() {
    let o = nok(&["mv", "k3_s2.surface"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("mv = 7 (certified)"));
}

#[test]
fn zariski_of_l_plus_2e() {
    let o = nok(&["zariski", "f1.surface", "-D", "L + 2E"]);
    assert_eq!(stdout(&o), "P = L, N = 2·E\n");
}

#[test]
fn nob_writes_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("out.svg");
    let csv = dir.path().join("out.csv");
    let o = nok(&[
        "nob",
        "f1.surface",
        "-D",
        "3L - E",
        "--flag",
        "E",
        "--point",
        "general",
        "--svg",
        svg.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("vertices (4)"), "{out}");
    assert!(out.contains("area = 4\n"), "{out}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "t,s\n0,0\n2,0\n2,3\n0,1\n");
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.contains(r#"width="640" height="480""#));
}

#[test]
fn nob_at_a_point_on_e() {
    let o = nok(&[
        "nob", "f1", "-D", "3L - E", "--flag", "L-E", "--point", "at:E:1", "--json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"], serde_json::json!([[0, 0], [1, 0], [3, 2], [0, 2]]));
    assert_eq!(v["area"], serde_json::json!(4));
}

#[test]
fn nu_mu_and_lattice_commands() {
    assert_eq!(
        stdout(&nok(&["nu", "f1", "-D", "L + 2E", "--flag", "E"])),
        "nu_E(D) = 2\n"
    );
    assert_eq!(
        stdout(&nok(&["mu", "f1", "-D", "L + 2E", "--flag", "E"])),
        "mu_E(D) = 3\n"
    );
    let info: Value = serde_json::from_str(&stdout(&nok(&["lattice", "info", "U", "--json"]))).unwrap();
    assert_eq!(info["discriminant"], "-1");
    assert_eq!(info["signature"], serde_json::json!([1, 1, 0]));
    let e = stdout(&nok(&["lattice", "embed", "A2", "k3_s2", "--mod", "2"]));
    assert!(e.starts_with("No: no solution mod 2 (256 residue assignments"), "{e}");
    let y: Value = serde_json::from_str(&stdout(&nok(&["lattice", "embed", "A2", "k3_s1", "--json"]))).unwrap();
    assert_eq!(y["verdict"], "yes");
    let roots: Value = serde_json::from_str(&stdout(&nok(&["lattice", "info", "D4", "--json"]))).unwrap();
    assert_eq!(roots["roots"], 24);
}

#[test]
fn ellsurf_build_s1() {
    let o = nok(&["ellsurf", "build", "k3_s1", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mordell_weil_rank"], 0);
    assert_eq!(
        v["lattice"]["gram"],
        serde_json::json!([[0, 1, 0], [1, 0, 0], [0, 0, -2]])
    );
    assert_eq!(v["discriminant"], "2");
}

#[test]
fn search_on_f1() {
    for target in ["3", "4", "5"] {
        let o = nok(&["search", "f1", "--target", target, "--json"]);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["found"], true);
        assert_eq!(v["vertex_count"].to_string(), target);
    }
    let o = nok(&["search", "f1", "--target", "5", "--coeff-min", "-1", "--coeff-max", "1"]);
    assert!(stdout(&o).starts_with("exhausted: no polygon with 5 vertices"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_paper_passes_and_is_deterministic() {
    let a = nok(&["verify-paper"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).ends_with("19 rows, 19 passed, 0 failed\n"));
    assert!(!stdout(&a).contains('\x1b'));
    let b = nok(&["verify-paper"]);
    assert_eq!(a.stdout, b.stdout);
    let j: Value = serde_json::from_str(&stdout(&nok(&["verify-paper", "--json", "--seed", "7"]))).unwrap();
    let rows = j.as_array().unwrap();
    assert!(rows.iter().all(|r| r["pass"] == true));
    assert!(rows.iter().any(|r| r["id"] == "random sweeps, seed 7"));
}

#[test]
fn color_can_be_forced() {
    let o = Command::new(env!("CARGO_BIN_EXE_nok"))
        .args(["verify-paper"])
        .env("NOK_COLOR", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().contains("\x1b[32mPASS\x1b[0m"));
}

#[test]
fn tampered_s1_fixture_fails_its_rows() {
    let dir = tempfile::tempdir().unwrap();
    let src = nok_fixture("k3_s1");
    let tampered = src.replace(
        "[[-2, 1, 0], [1, -2, 2], [0, 2, -2]]",
        "[[-2, 1, 0], [1, -2, 1], [0, 1, -2]]",
    );
    assert_ne!(src, tampered);
    std::fs::write(dir.path().join("k3_s1.surface"), tampered).unwrap();
    let o = nok(&["verify-paper", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    let fail = out
        .lines()
        .position(|l| l == "FAIL  mv(S1)")
        .unwrap_or_else(|| panic!("{out}"));
    let computed = out.lines().nth(fail + 2).unwrap();
    assert!(
        computed.contains("Theta1_0·Theta1_1: file gives 1, elliptic data gives 2"),
        "{computed}"
    );
    // rows that do not read S1 still pass
    assert!(out.contains("PASS  mv(S2) via A2 bound"));
}

fn nok_fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.surface"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(nok(&[]).status.code(), Some(1));
    assert_eq!(nok(&["mv"]).status.code(), Some(1));
    assert_eq!(nok(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nok(&["--help"]).status.code(), Some(0));
    assert_eq!(nok(&["--version"]).status.code(), Some(0));

    let unknown = nok(&["zariski", "f1", "-D", "L + X"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(
        stderr(&unknown),
        "error: in divisor `L + X`: unknown label `X` at column 5\n"
    );
    let dangling = nok(&["zariski", "f1", "-D", "3L -"]);
    assert_eq!(
        stderr(&dangling),
        "error: in divisor `3L -`: expected a label at column 5\n"
    );
    assert_eq!(nok(&["zariski", "f1", "-D", "-L"]).status.code(), Some(2));
    assert_eq!(nok(&["mv", "/nonexistent.surface"]).status.code(), Some(2));
    assert_eq!(nok(&["search", "f1", "--target", "6"]).status.code(), Some(2));
    assert_eq!(nok(&["nob", "f1", "-D", "L - E", "--flag", "E"]).status.code(), Some(2));
}

#[test]
fn bad_surface_file_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.surface");
    std::fs::write(
        &path,
        r#"{
  "name": "bad",
  "basis": ["L", "E"],
  "ns_gram": [[1, 0], [0, -1]],
  "curves": [
    {"label": "E", "class": [0, 1]},
    {"label": "N", "class": [1, 1], "self_intersection": -1}
  ],
  "effective_generators": ["L", "Z"]
}"#,
    )
    .unwrap();
    let o = nok(&["mv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    let p = path.display();
    assert!(
        err.contains(&format!(
            "{p}: curves[1].self_intersection: declared -1 but the class has square 0"
        )),
        "{err}"
    );
    assert!(
        err.contains(&format!("{p}: effective_generators[1]: unknown label `Z`")),
        "{err}"
    );
    assert!(
        err.contains(&format!(
            "{p}: curves[0]: negative curve `E` is missing from effective_generators"
        )),
        "{err}"
    );
}
