use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn softpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softpack")).args(args).env_remove("SOFTPACK_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Non-comment CSV lines split into fields.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn quantity(text: &str, key: &str) -> String {
    csv_rows(text).into_iter().find(|r| r[0] == key).unwrap_or_else(|| panic!("no {key} in {text}"))[1].clone()
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn lens_volume(r: f64, s: f64) -> f64 {
    PI / 12.0 * (4.0 * r + s) * (2.0 * r - s).powi(2)
}

fn lens_area(r: f64, s: f64) -> f64 {
    2.0 * r * r * (s / (2.0 * r)).acos() - s / 2.0 * (4.0 * r * r - s * s).sqrt()
}

fn write_flower(dir: &Path) -> String {
    let h = 3f64.sqrt();
    let centers = [[0.0, 0.0], [2.0, 0.0], [1.0, h], [-1.0, h], [-2.0, 0.0], [-1.0, -h], [1.0, -h]];
    let path = dir.join("flower.json");
    let json = serde_json::json!({"dim": 2, "centers": centers});
    fs::write(&path, json.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bounds_table_in_three_dimensions() {
    let o = softpack(&["bounds", "--dim", "3", "--lambda-min", "0", "--lambda-max", "0.15", "--steps", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# version: "));
    assert!(text.contains("# seed: 1\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 17);
    let t8 = column(&rows, "theorem8");
    let v: f64 = rows[1][t8].parse().unwrap();
    assert!((v - 0.778425989398).abs() < 1e-11, "{v}");
}

#[test]
fn bounds_table_in_the_plane_has_delta2() {
    let o = softpack(&["bounds", "--dim", "2", "--lambda-max", "0.1", "--steps", "3"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let c = column(&rows, "delta2");
    // δ₂ is not defined at λ = 0
    assert_eq!(rows[1][c], "NaN");
    let v: f64 = rows[3][c].parse().unwrap();
    assert!((v - 0.915581770751).abs() < 1e-9, "{v}");
}

#[test]
fn rows_past_the_pairwise_regime_are_flagged() {
    let o = softpack(&["bounds", "--dim", "3", "--lambda-max", "0.3", "--steps", "4"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let inv = column(&rows, "invalid");
    assert!(!rows[2][inv].contains("sigma3"));
    for row in &rows[3..] {
        assert!(row[inv].contains("sigma3") && row[inv].contains("theorem8"), "{row:?}");
    }
}

#[test]
fn long_and_json_bounds() {
    let o = softpack(&["bounds", "--dim", "4", "--lambda-max", "0.1", "--steps", "2", "--long", "--samples", "20000"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["name", "d", "lambda", "value", "valid", "domain_note", "stderr"]);
    assert!(rows.iter().any(|r| r[0] == "sigma_bar_d" && !r[6].is_empty()));
    let o = softpack(&["bounds", "--dim", "3", "--lambda-max", "0.1", "--steps", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["d"], 3);
}

#[test]
fn bad_ranges_exit_with_two() {
    for args in [
        &["bounds", "--dim", "3", "--lambda-min", "0.2", "--lambda-max", "0.1"][..],
        &["bounds", "--dim", "3", "--lambda-min", "-0.1", "--lambda-max", "0.1"],
        &["bounds", "--dim", "3", "--lambda-max", "0.1", "--steps", "0"],
        &["bounds", "--dim", "1", "--lambda-max", "0.1"],
    ] {
        assert_eq!(softpack(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = softpack(&[
            "bounds",
            "--dim",
            "5",
            "--lambda-max",
            "0.2",
            "--steps",
            "3",
            "--samples",
            "30000",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        fs::read_to_string(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("a.csv"));
    assert_eq!(a, b);
    assert!(a.contains("# seed: 9\n"));
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_softpack"))
        .args(["bounds", "--dim", "2", "--lambda-max", "0.1", "--steps", "1"])
        .env("SOFTPACK_SEED", "77")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("# seed: 77\n"));
}

#[test]
fn flower_density_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let flower = write_flower(dir.path());
    let o = softpack(&["density", "--packing", &flower, "--lambda", "0.05"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lb: f64 = 1.05;
    let area = 7.0 * PI * lb * lb - 12.0 * lens_area(lb, 2.0);
    let got: f64 = quantity(&text, "measure_exact").parse().unwrap();
    assert!((got - area).abs() < 1e-9, "{got} vs {area}");
    let density: f64 = quantity(&text, "density").parse().unwrap();
    assert!((density - 7.0 * PI / area).abs() < 1e-9);
    assert_eq!(quantity(&text, "contacts"), "12");
}

#[test]
fn single_ball_density() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    fs::write(&path, "# dim=3\nx1,x2,x3\n0,0,0\n").unwrap();
    let o = softpack(&["density", "--packing", path.to_str().unwrap(), "--lambda", "0.1"]);
    assert!(o.status.success());
    let density: f64 = quantity(&stdout(&o), "density").parse().unwrap();
    assert!((density - 1.1f64.powi(-3)).abs() < 1e-11);
}

#[test]
fn monte_carlo_outside_the_pairwise_regime() {
    let dir = tempfile::tempdir().unwrap();
    let flower = write_flower(dir.path());
    let o = softpack(&["density", "--packing", &flower, "--lambda", "0.5", "--mc", "200000", "42"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains("measure_exact"));
    let se: f64 = quantity(&text, "measure_mc_stderr").parse().unwrap();
    assert!(se > 0.0);
    assert_eq!(quantity(&text, "mc_seed"), "42");
}

#[test]
fn bad_packings_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let overlap = dir.path().join("overlap.json");
    fs::write(&overlap, r#"{"dim":2,"centers":[[0,0],[1,0]]}"#).unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    let missing = dir.path().join("missing.json");
    for p in [overlap, garbage, missing] {
        let o = softpack(&["density", "--packing", p.to_str().unwrap(), "--lambda", "0.1"]);
        assert_eq!(o.status.code(), Some(3), "{}", p.display());
    }
}

#[test]
fn optimize_pair_in_space() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pair.json");
    let o = softpack(&[
        "optimize",
        "--n",
        "2",
        "--dim",
        "3",
        "--lambda",
        "0.1",
        "--restarts",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let lb: f64 = 1.1;
    let expect = 2.0 * 4.0 * PI / 3.0 * lb.powi(3) - lens_volume(lb, 2.0);
    let got: f64 = quantity(&stdout(&o), "objective").parse().unwrap();
    assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    let dump: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dump["centers"].as_array().unwrap().len(), 2);
    let history = fs::read_to_string(dir.path().join("pair.history.csv")).unwrap();
    assert_eq!(csv_rows(&history)[0], ["iteration", "objective"]);
}

#[test]
fn optimize_small_planar_clusters() {
    let o = softpack(&["optimize", "--n", "4", "--dim", "2", "--lambda", "0.01"]);
    assert_eq!(quantity(&stdout(&o), "contacts"), "5");
    let o = softpack(&["optimize", "--n", "3", "--dim", "2", "--lambda", "0.05", "--restarts", "4"]);
    let lb: f64 = 1.05;
    let expect = 3.0 * PI * lb * lb - 3.0 * lens_area(lb, 2.0);
    let got: f64 = quantity(&stdout(&o), "objective").parse().unwrap();
    assert!((got - expect).abs() < 1e-9);
}

#[test]
fn optimize_outside_pairwise_exits_with_two() {
    let o = softpack(&["optimize", "--n", "3", "--dim", "2", "--lambda", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lattice_checks() {
    let o = softpack(&["lattice", "--kind", "fcc", "--check", "density"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0.740480489693"));
    let o = softpack(&["lattice", "--kind", "hexagonal2d"]);
    assert!(stdout(&o).contains("0.906899682117"));
    let o = softpack(&["lattice", "--kind", "bcc", "--check", "covering", "--samples", "200000"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1.29099444874"));
    assert_eq!(softpack(&["lattice", "--kind", "diamond"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    for suite in ["constants", "gram", "rogersF", "groemer"] {
        let o = softpack(&["verify", "--suite", suite, "--grid", "60"]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
    }
    let o = softpack(&["verify", "--suite", "sigma-consistency", "--grid", "60", "--samples", "100000"]);
    assert!(o.status.success());
    assert_eq!(softpack(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn constants_listing() {
    let o = softpack(&["constants"]);
    let text = stdout(&o);
    assert!(text.contains("phi0 0.61547970867"));
    assert!(text.contains("lambda_bar_root 2.9269495148"));
}
