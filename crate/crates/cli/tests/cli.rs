use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn gkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkm"))
        .args(args)
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
fn character_of_cp1() {
    let o = gkm(&["character", &fixture("cp1.json"), "--xi", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1*x^(-1,0) + 1 + 1*x^(1,0)\n");
    // opposite polarization, same character
    let o = gkm(&["character", &fixture("cp1.json"), "--xi", "-1,3"]);
    assert_eq!(stdout(&o), "1*x^(-1,0) + 1 + 1*x^(1,0)\n");
}

#[test]
fn qr_check_on_cp1() {
    let o = gkm(&["qr-check", &fixture("cp1.json"), "--xi", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS  chi_red = 1\n");
}

#[test]
fn qr_check_rejects_critical_zero() {
    let o = gkm(&[
        "qr-check",
        &fixture("cp2.json"),
        "--class",
        "shifted",
        "--xi",
        "1,-1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("zero must be a regular value"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn proportional_weights_violate_gkm() {
    let o = gkm(&["validate", &fixture("proportional.json")]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("E_GKM")), "{out}");
    assert!(out.contains("pairwise linearly independent"));
}

#[test]
fn incompatible_class_is_reported() {
    let o = gkm(&["validate", &fixture("cp2.json")]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("class broken: invalid"));
    assert!(out.contains("E_COMPAT at edge P0->P1"));
    assert!(out.contains("class shifted: symplectic"));
    let o = gkm(&["validate", &fixture("cp1.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_errors_carry_positions() {
    let o = gkm(&["validate", &fixture("trailing_comma.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 6, column 1"), "{}", stderr(&o));
    let o = gkm(&["validate", &fixture("missing.json")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn xi_is_checked_before_computing() {
    let cp1 = fixture("cp1.json");
    let o = gkm(&["character", &cp1, "--xi", "2,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("primitive"));
    let o = gkm(&["character", &cp1, "--xi", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not generic"));
    let o = gkm(&["character", &cp1]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("needs --xi"));
}

#[test]
fn class_selection() {
    let cp2 = fixture("cp2.json");
    let o = gkm(&["character", &cp2, "--xi", "2,-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--class"));
    let o = gkm(&["character", &cp2, "--xi", "2,-3", "--class", "shifted"]);
    assert_eq!(stdout(&o), "1*x^(1,1) + 1*x^(1,2) + 1*x^(2,1)\n");
    let o = gkm(&["character", &cp2, "--xi", "2,-3", "--class", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = gkm(&["character", &cp2, "--xi", "2,-3", "--class", "broken"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn multiplicity_reduce_and_residue() {
    let cp1 = fixture("cp1.json");
    let o = gkm(&["multiplicity", &cp1, "--xi", "1,0", "--alpha", "1,0"]);
    assert_eq!(stdout(&o), "1\n");
    let o = gkm(&["multiplicity", &cp1, "--xi", "1,0", "--alpha", "2,0"]);
    assert_eq!(stdout(&o), "0\n");
    let o = gkm(&["reduce", &cp1, "--xi", "1,0", "--c", "1/2"]);
    assert_eq!(stdout(&o), "1\n");
    let o = gkm(&["reduce", &cp1, "--xi", "1,0", "--c", "3"]);
    assert_eq!(stdout(&o), "0\n");
    let o = gkm(&["reduce", &cp1, "--xi", "1,0", "--c", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("regular value"));
    let o = gkm(&["residue", &cp1, "--xi", "1,0"]);
    assert_eq!(stdout(&o), "p: -1\nq: 1\n");
    let o = gkm(&["residue", &cp1, "--xi", "1,0", "--vertex", "q"]);
    assert_eq!(stdout(&o), "q: 1\n");
}

#[test]
fn json_output_uses_string_coefficients() {
    let o = gkm(&[
        "character",
        &fixture("cp1.json"),
        "--xi",
        "1,0",
        "--output",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let terms = v["character"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    assert_eq!(terms[0]["coeff"], "1");
    assert_eq!(terms[0]["exp"], serde_json::json!([-1, 0]));
}

#[test]
fn selftest_is_deterministic() {
    let a = gkm(&["selftest", "--seed", "42"]);
    let b = gkm(&["selftest", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = gkm(&["selftest", "--seed", "7"]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&c).ends_with("overall: PASS\n"));
}

#[test]
fn selftest_names_the_violated_law() {
    let o = gkm(&["selftest", "--seed", "42", "--inject-corrupt"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("FAIL  class-validity"));
    assert!(out.contains("[the localized character is a Laurent polynomial]"));
    assert!(out.contains("cp1 (corrupted)"));
}
