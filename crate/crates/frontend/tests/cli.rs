use std::process::{Command, Output};

use vtc_core::variational::equiv_mod_d;
use vtc_frontend::builtin::{CHIRAL, MAXWELL};

fn vtc(args: &[&str]) -> Output {
    vtc_env(args, None)
}

fn vtc_env(args: &[&str], cap: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_vtc"));
    c.args(args).env_remove("VTC_JET_ORDER_CAP");
    if let Some(v) = cap {
        c.env("VTC_JET_ORDER_CAP", v);
    }
    c.output().expect("spawn vtc")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn passing_commands_exit_zero() {
    for args in [
        &["check-master", "maxwell"][..],
        &["check-master", "chiral.vtc"],
        &["descend", "maxwell", "--steps", "2"],
        &["current", "maxwell"],
        &["homogenize", "chiral"],
    ] {
        let o = vtc(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn report_json_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = vtc(&["report", "maxwell", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, include_str!("golden/maxwell.json"));
    let o = vtc(&["report", "maxwell", "--format", "json"]);
    assert_eq!(stdout(&o), written);
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["model"], "maxwell");
}

#[test]
fn text_report_names_stages() {
    let o = vtc(&["report", "maxwell"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("[master]"), "{s}");
}

#[test]
fn violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.vtc");
    std::fs::write(&bad, CHIRAL.replace("<eta, [etabar, etabar]>/2", "<eta, [etabar, etabar]>")).unwrap();
    assert_eq!(code(&vtc(&["check-master", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&vtc(&["report", bad.to_str().unwrap(), "--format", "json"])), 1);

    // a model without a foliation cannot be reduced to leaves
    let nofol = dir.path().join("nofol.vtc");
    std::fs::write(&nofol, MAXWELL.split("foliation").next().unwrap()).unwrap();
    assert_eq!(code(&vtc(&["homogenize", nofol.to_str().unwrap()])), 1);
    assert_eq!(code(&vtc(&["report", nofol.to_str().unwrap()])), 0);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.vtc");
    std::fs::write(&broken, "dim 2\nfield u { parity even }\ndensity L = u * $").unwrap();
    let o = vtc(&["check-master", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("3:17"));
    assert_eq!(code(&vtc(&["check-master", "no-such-model"])), 2);
    assert_eq!(code(&vtc(&["frobnicate"])), 2);
    assert_eq!(code(&vtc(&["report", "maxwell", "--format", "yaml"])), 2);
    assert_eq!(code(&vtc(&["bracket", "maxwell", "--a", "C*vol"])), 2);
    assert_eq!(code(&vtc(&["bracket", "maxwell", "--a", "C*", "--b", "C*vol"])), 2);
    assert_eq!(code(&vtc(&["--help"])), 0);
}

#[test]
fn jet_order_cap_from_environment() {
    for bad in ["0", "-3", "many"] {
        assert_eq!(code(&vtc_env(&["check-master", "maxwell"], Some(bad))), 2, "{bad}");
    }
    assert_eq!(code(&vtc_env(&["check-master", "maxwell"], Some("12"))), 0);
}

#[test]
fn brackets_on_the_command_line() {
    let o = vtc(&["bracket", "chiral", "--a", "<etabar, d(phi)>", "--b", "<etabar, d(phi)>"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "0\n");

    let charge = "C*sum(i in 1..3, E[i],[i])*dx[1]*dx[2]*dx[3]";
    let o = vtc(&["bracket", "maxwell", "--a", charge, "--b", charge, "--foliated"]);
    assert_eq!(stdout(&o), "0\n");
    let energy = "(sum(i in 1..3, E[i]^2)/2 + sum(i in 1..3, sum(j in 1..3, (A[j],[i] - A[i],[j])^2))/4)*dx[1]*dx[2]*dx[3]";
    let o = vtc(&["bracket", "maxwell", "--a", energy, "--b", charge, "--foliated"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = vtc_frontend::parse_model(MAXWELL).unwrap();
    let v = m.eval_str(stdout(&o).trim()).unwrap();
    assert!(!v.is_zero());
    let leaf = m.leaves.as_ref().unwrap().ctx.spatial_frame();
    assert!(equiv_mod_d(&v, &vtc_core::Poly::zero(), leaf).unwrap());
}
