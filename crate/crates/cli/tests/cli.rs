use std::path::{Path, PathBuf};
use std::process::Command;

use maxcont_cli::input::MatrixFile;
use maxcont_core::qmatrix::{cmat, disk_with_touching_point, C64};
use maxcont_core::random::{random_matrix, seeded};
use maxcont_core::MatrixC;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn maxcont(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_maxcont")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_matrix(dir: &TempDir, name: &str, a: &MatrixC) -> PathBuf {
    let path = dir.path().join(name);
    let text = serde_json::to_string(&MatrixFile::from_matrix(a.as_matrix())).unwrap();
    std::fs::write(&path, text).unwrap();
    path
}

fn json(run: &Run) -> Value {
    assert!(run.stderr.is_empty(), "{}", run.stderr);
    serde_json::from_str(&run.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn disk(dir: &TempDir) -> PathBuf {
    write_matrix(dir, "disk.json", &disk_with_touching_point())
}

#[test]
fn boundary_of_disk_is_unit_circle() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let run = maxcont(&["boundary", "--input", p(&f), "--format", "csv"]);
    assert_eq!(run.code, 0);
    let (header, rows) = csv_rows(&run.stdout);
    assert_eq!(header, ["theta", "h", "bx", "by"]);
    assert_eq!(rows.len(), 4096);
    for r in &rows {
        assert!((num(&r[1]) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn boundary_of_zero_matrix_is_origin() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "zero.json", &MatrixC::zeros(3));
    let doc = json(&maxcont(&["boundary", "--input", p(&f), "--grid", "256"]));
    for row in doc["rows"].as_array().unwrap() {
        assert!(row["bx"].as_f64().unwrap().abs() < 1e-12);
        assert!(row["by"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn boundary_of_scalar_is_the_scalar() {
    let dir = TempDir::new().unwrap();
    let a = MatrixC::from_rows(&[vec![C64::new(0.3, -0.7)]]).unwrap();
    let f = write_matrix(&dir, "scalar.json", &a);
    let doc = json(&maxcont(&["boundary", "--input", p(&f), "--grid", "128"]));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 128);
    for row in rows {
        assert!((row["bx"].as_f64().unwrap() - 0.3).abs() < 1e-12);
        assert!((row["by"].as_f64().unwrap() + 0.7).abs() < 1e-12);
    }
}

#[test]
fn curves_contain_constant_branch() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let run = maxcont(&["curves", "--input", p(&f), "--grid", "512", "--format", "csv"]);
    assert_eq!(run.code, 0);
    let (header, rows) = csv_rows(&run.stdout);
    assert_eq!(header, ["theta", "branch", "lambda", "dlambda", "z_re", "z_im"]);
    assert_eq!(rows.len(), 3 * 512);
    let constant = (0..3).filter(|b| {
        rows.iter()
            .filter(|r| r[1] == b.to_string())
            .all(|r| (num(&r[4]) - 1.0).abs() < 1e-8 && num(&r[5]).abs() < 1e-8)
    });
    assert_eq!(constant.count(), 1);
}

#[test]
fn hermitian_curves_are_flat_at_zero() {
    let dir = TempDir::new().unwrap();
    let re: [&[f64]; 3] = [&[1.0, 0.5, 0.0], &[0.5, -1.0, 0.2], &[0.0, 0.2, 0.3]];
    let im: [&[f64]; 3] = [&[0.0; 3]; 3];
    let a = MatrixC::new(cmat(&re, &im)).unwrap();
    let f = write_matrix(&dir, "herm.json", &a);
    let (_, rows) = csv_rows(&maxcont(&["curves", "--input", p(&f), "--grid", "256", "--format", "csv"]).stdout);
    let at_zero: Vec<_> = rows.iter().filter(|r| num(&r[0]) == 0.0).collect();
    assert_eq!(at_zero.len(), 3);
    for r in at_zero {
        assert!(num(&r[3]).abs() < 1e-10);
    }
}

#[test]
fn curves_of_scalar() {
    let dir = TempDir::new().unwrap();
    let a = MatrixC::from_rows(&[vec![C64::new(-2.0, 1.5)]]).unwrap();
    let f = write_matrix(&dir, "scalar.json", &a);
    let doc = json(&maxcont(&["curves", "--input", p(&f), "--grid", "64"]));
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["branch"], 0);
        assert!((row["z_re"].as_f64().unwrap() + 2.0).abs() < 1e-12);
        assert!((row["z_im"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    }
}

#[test]
fn infer_at_touching_point() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let doc = json(&maxcont(&["infer", "--input", p(&f), "--alpha", "1,0"]));
    let expect = [[0.25, 0.25, 0.0], [0.25, 0.25, 0.0], [0.0, 0.0, 0.5]];
    for j in 0..3 {
        for k in 0..3 {
            let re = doc["state"]["re"][j][k].as_f64().unwrap();
            let im = doc["state"]["im"][j][k].as_f64().unwrap();
            assert!((re - expect[j][k]).abs() < 1e-6 && im.abs() < 1e-6, "[{j}][{k}]");
        }
    }
    assert!((doc["entropy"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-6);
    assert!(doc["residual"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn infer_at_trace_point_is_maximally_mixed() {
    let dir = TempDir::new().unwrap();
    let a = random_matrix(&mut seeded(3), 4, 1.0);
    let f = write_matrix(&dir, "a.json", &a);
    let c = a.trace() / 4.0;
    let alpha = format!("{},{}", c.re, c.im);
    let doc = json(&maxcont(&["infer", "--input", p(&f), "--alpha", &alpha]));
    for j in 0..4 {
        for k in 0..4 {
            let want = if j == k { 0.25 } else { 0.0 };
            assert!((doc["state"]["re"][j][k].as_f64().unwrap() - want).abs() < 1e-8);
            assert!(doc["state"]["im"][j][k].as_f64().unwrap().abs() < 1e-8);
        }
    }
    assert_eq!(doc["classification"]["tag"], "Interior");
}

#[test]
fn infer_outside_range_exits_4() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let run = maxcont(&["infer", "--input", p(&f), "--alpha", "2,0"]);
    assert_eq!(run.code, 4);
    assert!(run.stdout.is_empty());
    assert!(run.stderr.contains("outside"), "{}", run.stderr);
}

#[test]
fn analyze_disk_reports_single_discontinuity() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let run = maxcont(&["analyze", "--input", p(&f)]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    let verdicts = doc["report"]["verdicts"].as_array().unwrap();
    let disc: Vec<_> = verdicts.iter().filter(|v| v["status"] == "Discontinuous").collect();
    assert_eq!(disc.len(), 1);
    let re = disc[0]["alpha"]["re"].as_f64().unwrap();
    let im = disc[0]["alpha"]["im"].as_f64().unwrap();
    assert!(((re - 1.0).powi(2) + im * im).sqrt() <= 1e-6);
}

#[test]
fn analyze_with_priors_is_consistent() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let prior = dir.path().join("prior.json");
    std::fs::write(&prior, r#"{"d":3,"re":[[0.7,0,0],[0,0.2,0],[0,0,0.1]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#).unwrap();
    let run = maxcont(&["analyze", "--input", p(&f), "--prior", p(&prior), "--random-priors", "2", "--grid", "1024"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = json(&run);
    assert_eq!(doc["prior_invariance"]["consistent"], true);
}

#[test]
fn analyze_generic_matrix_has_no_discontinuity() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "g.json", &random_matrix(&mut seeded(2024), 4, 1.0));
    let run = maxcont(&["analyze", "--input", p(&f), "--format", "csv"]);
    assert_eq!(run.code, 0);
    let (_, rows) = csv_rows(&run.stdout);
    assert!(rows.iter().all(|r| r[4] != "Discontinuous"));
}

#[test]
fn analyze_duplicated_block_reports_identical_branches_only() {
    let dir = TempDir::new().unwrap();
    let b = random_matrix(&mut seeded(21), 2, 1.0);
    let f = write_matrix(&dir, "bb.json", &b.direct_sum(&b));
    let doc = json(&maxcont(&["analyze", "--input", p(&f), "--grid", "1024"]));
    let verdicts = doc["report"]["verdicts"].as_array().unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.iter().all(|v| v["status"] == "IdenticalBranches"));
}

#[test]
fn oracle_classes() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let touch = maxcont(&["oracle", "--input", p(&f), "--alpha", "1,0"]);
    assert_eq!(touch.code, 0);
    assert_eq!(json(&touch)["result"]["class"], "Discontinuous");
    let far = maxcont(&["oracle", "--input", p(&f), "--alpha", "-1,0", "--format", "csv"]);
    assert_eq!(far.code, 0);
    let (header, rows) = csv_rows(&far.stdout);
    assert_eq!(header, ["radius", "direction", "alpha_re", "alpha_im", "on_boundary", "gap"]);
    assert!(rows.iter().all(|r| num(&r[5]) <= 0.05));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let args = ["analyze", "--input", p(&f), "--grid", "1024", "--random-priors", "1", "--seed", "9"];
    let first = maxcont(&args);
    let second = maxcont(&args);
    assert_eq!(first.stdout, second.stdout);
    let c1 = maxcont(&["curves", "--input", p(&f), "--format", "csv"]);
    let c2 = maxcont(&["curves", "--input", p(&f), "--format", "csv"]);
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn reports_echo_config() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let args = ["--input", p(&f), "--grid", "320", "--radii", "0.05,0.005", "--directions", "8", "--seed", "17"];
    for cmd in ["boundary", "curves", "analyze"] {
        let doc = json(&maxcont(&[&[cmd][..], &args[..]].concat()));
        assert_eq!(doc["command"], cmd);
        let cfg = &doc["config"];
        assert_eq!(cfg["n_grid"], 320);
        assert_eq!(cfg["n_directions"], 8);
        assert_eq!(cfg["seed"], 17);
        assert_eq!(cfg["format"], "json");
        assert_eq!(cfg["radii"][1].as_f64(), Some(0.005));
        assert!(cfg["tolerances"].is_object());
        assert_eq!(doc["matrix"]["dimension"], 3);
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    let out = dir.path().join("b.csv");
    let run = maxcont(&["boundary", "--input", p(&f), "--format", "csv", "--output", p(&out)]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.is_empty());
    let direct = maxcont(&["boundary", "--input", p(&f), "--format", "csv"]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), direct.stdout);
}

#[test]
fn parse_errors_point_at_location() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"d\": 2,\n \"re\": [[1, 2], [3]],\n \"im\": [[0, 0], [0, 0]]}").unwrap();
    let run = maxcont(&["boundary", "--input", p(&bad)]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("re") && run.stderr.contains("row 1"), "{}", run.stderr);

    std::fs::write(&bad, "{\"d\": 2,\n \"re\": [[1, 2], [3, 4]]\n \"im\": []}").unwrap();
    let run = maxcont(&["boundary", "--input", p(&bad)]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("line 3"), "{}", run.stderr);
}

#[test]
fn invalid_config_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = disk(&dir);
    assert_eq!(maxcont(&["curves", "--input", p(&f), "--grid", "100"]).code, 1);
    assert_eq!(maxcont(&["analyze", "--input", p(&f), "--radii", "0.001,0.01"]).code, 1);
    assert_ne!(maxcont(&["infer", "--input", p(&f), "--alpha", "1"]).code, 0);
}
