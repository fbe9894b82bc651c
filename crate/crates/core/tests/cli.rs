use std::process::Command;

use pkm::output::Table;

fn pkm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pkm"))
}

#[test]
fn ik_prints_compatible_pose() {
    let out = pkm().args(["ik", "--machine", "a3", "--psi", "20", "--theta", "10"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("machine = A3_RPS"));
    assert!(text.contains("x_mm = 5.40771138"));
    assert!(text.contains("within_stroke = true"));
}

#[test]
fn jacobian_reports_home_condition_number() {
    let out = pkm().args(["jacobian", "--machine", "z3"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("kappa = 1.41421356237"));
}

#[test]
fn map_commands_write_csv_with_expected_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("parasitic-map", "parasitic_z3.csv", "psi_deg,theta_deg,x_mm,y_mm,gamma_rad"),
        ("condition-map", "condition_z3.csv", "psi_deg,theta_deg,kappa"),
        ("workspace", "workspace_z3.csv", "psi_deg,theta_deg,z_mm,inside"),
        ("stiffness-map", "stiffness_z3.csv", "psi_deg,theta_deg,x_par_mm,y_par_mm,kpx,kpy,kpz,kax,kay,kaz"),
    ];
    for (cmd, file, header) in cases {
        let status = pkm()
            .args([cmd, "--machine", "z3", "--grid", "5", "--out"])
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        assert!(status.success(), "{cmd} failed");
        let bytes = std::fs::read(dir.path().join(file)).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().next(), Some(header));
        let table = Table::read_csv(dir.path().join(file)).unwrap();
        let rows = if cmd == "workspace" { 75 } else { 25 };
        assert_eq!(table.rows.len(), rows);
    }
    assert!(dir.path().join("condition_z3.svg").exists());
}

#[test]
fn stiffness_space_selects_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let status = pkm()
        .args(["stiffness-map", "--machine", "a3", "--grid", "5", "--space", "parasitic", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let table = Table::read_csv(dir.path().join("stiffness_parasitic_a3.csv")).unwrap();
    assert_eq!(table.header[..2], ["x_par_mm", "y_par_mm"]);
    assert_eq!(table.rows.len(), 25);
    assert!(!dir.path().join("stiffness_a3.csv").exists());

    let bad = pkm().args(["stiffness-map", "--space", "cartesian"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn z_override_changes_the_slice_height() {
    let dir = tempfile::tempdir().unwrap();
    let status = pkm()
        .args(["workspace", "--machine", "a3", "--grid", "3", "--z", "600", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let table = Table::read_csv(dir.path().join("workspace_a3.csv")).unwrap();
    assert_eq!(table.column("z_mm").unwrap()[0], Some(600.0));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "grid_n = 5\nspeed = 3\n").unwrap();
    let out = pkm().args(["compare", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("speed"));

    let out = pkm().args(["ik", "--config", "/nonexistent/pkm.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = pkm().args(["ik", "--machine", "c5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let out = pkm().args(["ik", "--psi", "75"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn shipped_config_parses() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.cfg");
    let cfg = pkm::config::Config::load(path).unwrap();
    assert_eq!(cfg, pkm::config::Config::default());
}
