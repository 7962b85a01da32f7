use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lipembed::germs::Axis;
use lipembed::{GermCurve, PointCloud, PuiseuxBranch};
use serde_json::Value;
use tempfile::TempDir;

fn lipembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipembed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_json<T: serde::Serialize>(dir: &TempDir, name: &str, value: &T) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn curve_r4() -> PointCloud {
    let pts = (0..40)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / 39.0;
            vec![t, t * t, t * t * t, t.powi(4)]
        })
        .collect();
    PointCloud::new("moment curve", 1, pts).unwrap()
}

fn bx(t: &[(i64, i64, f64)]) -> PuiseuxBranch {
    PuiseuxBranch::over_x(t).unwrap()
}

#[test]
fn embed_writes_result_and_plot_data() {
    let dir = TempDir::new().unwrap();
    let input = write_json(&dir, "curve.json", &curve_r4());
    let (out, csv) = (dir.path().join("out.json"), dir.path().join("steps.csv"));
    let o = lipembed(&[
        "--seed", "3", "--out", s(&out), "--emit-plot-data", s(&csv),
        "embed", "--input", s(&input), "--target-dim", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    assert_eq!(doc["run"]["command"], "embed");
    assert_eq!(doc["run"]["seed"], 3);
    assert_eq!(doc["result"]["steps"].as_array().unwrap().len(), 1);
    assert_eq!(doc["result"]["final_cloud"]["ambient_dim"], 3);
    let plot = std::fs::read_to_string(&csv).unwrap();
    assert!(plot.starts_with("step,epsilon,resulting_dim\n0,"));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let input = write_json(&dir, "curve.json", &curve_r4());
    let run = |seed: &str| {
        let o = lipembed(&["--seed", seed, "embed", "--input", s(&input), "--target-dim", "3"]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    assert_eq!(run("11"), run("11"));

    let x = write_json(&dir, "x.json", &curve_r4());
    let run_extend = || {
        let o = lipembed(&["--seed", "5", "extend", "--source", s(&x), "--target", s(&x)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    assert_eq!(run_extend(), run_extend());
}

#[test]
fn malformed_input_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"label\": \"c\", \"ambient_dim\": 2,\n \"points\": [[0, 1],").unwrap();
    let o = lipembed(&["embed", "--input", s(&bad), "--target-dim", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");

    let missing_field = dir.path().join("field.json");
    std::fs::write(&missing_field, "{\"label\": \"c\", \"points\": [[0, 1]]}").unwrap();
    let o = lipembed(&["embed", "--input", s(&missing_field), "--target-dim", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ambient_dim"));

    assert_eq!(lipembed(&["embed", "--target-dim", "x"]).status.code(), Some(1));
    assert_eq!(lipembed(&["--help"]).status.code(), Some(0));
}

#[test]
fn precondition_failures_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let input = write_json(&dir, "curve.json", &curve_r4());
    let o = lipembed(&["embed", "--input", s(&input), "--target-dim", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2k+1"));
}

#[test]
fn germ_equiv_exit_codes() {
    let dir = TempDir::new().unwrap();
    let x = GermCurve::new(vec![bx(&[(3, 2, 1.0)]), bx(&[(3, 2, 1.0), (7, 4, 1.0)])]).unwrap();
    let y = GermCurve::new(vec![bx(&[(3, 2, 1.0)]), bx(&[(5, 4, 1.0), (3, 2, 1.0)])]).unwrap();
    let (px, py) = (write_json(&dir, "x.json", &x), write_json(&dir, "y.json", &y));
    let out = dir.path().join("map.json");
    let o = lipembed(&["--out", s(&out), "germ-equiv", "--x", s(&px), "--y", s(&py)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists());

    let zero = PuiseuxBranch::zero(Axis::PosX);
    let sx = GermCurve::new(vec![zero.clone(), bx(&[(3, 2, 0.05)]), bx(&[(3, 2, 0.1), (2, 1, 0.05)])]).unwrap();
    let sy = GermCurve::new(vec![zero, bx(&[(3, 2, 0.05), (2, 1, 0.05)]), bx(&[(3, 2, 0.1)])]).unwrap();
    let (px, py) = (write_json(&dir, "sx.json", &sx), write_json(&dir, "sy.json", &sy));
    let csv = dir.path().join("h.csv");
    let o = lipembed(&["--out", s(&out), "--emit-plot-data", s(&csv), "germ-equiv", "--x", s(&px), "--y", s(&py)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(&out)["result"]["map"].is_object());
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows[0], "r,hausdorff_over_r");
    assert_eq!(rows.len(), 10);
    for row in &rows[1..] {
        let ratio: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(ratio <= 0.05, "{row}");
    }
}

#[test]
fn extend_apply_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    let x = PointCloud::new("triangle", 0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let y = PointCloud::new("image", 0, vec![vec![5.0, 5.0], vec![6.0, 7.0], vec![-1.0, 2.0]]).unwrap();
    let (px, py) = (write_json(&dir, "x.json", &x), write_json(&dir, "y.json", &y));
    let pairing = write_json(&dir, "pairing.json", &vec![0usize, 1, 2]);
    let (map, motion) = (dir.path().join("map.json"), dir.path().join("motion.csv"));
    let o = lipembed(&[
        "--out", s(&map), "--emit-plot-data", s(&motion),
        "extend", "--source", s(&px), "--target", s(&py), "--pairing", s(&pairing), "-k", "0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let motion = std::fs::read_to_string(&motion).unwrap();
    assert!(motion.starts_with("t,sup_motion\n0,0e0\n"), "{motion}");

    let applied = dir.path().join("applied.json");
    let o = lipembed(&["--out", s(&applied), "apply", "--map", s(&map), "--points", s(&px)]);
    assert_eq!(o.status.code(), Some(0));
    let pts: Vec<Vec<f64>> = serde_json::from_value(read(&applied)["result"]["points"].clone()).unwrap();
    for (p, q) in pts.iter().zip(y.points()) {
        assert!(lipembed::linalg::dist(p, q) < 1e-8, "{p:?} vs {q:?}");
    }

    let back_in = write_json(&dir, "back_in.json", &pts);
    let back = dir.path().join("back.json");
    let o = lipembed(&["--out", s(&back), "apply", "--map", s(&map), "--points", s(&back_in), "--inverse"]);
    assert_eq!(o.status.code(), Some(0));
    let back: Vec<Vec<f64>> = serde_json::from_value(read(&back)["result"]["points"].clone()).unwrap();
    for (p, q) in back.iter().zip(x.points()) {
        assert!(lipembed::linalg::dist(p, q) < 1e-8);
    }

    let start = dir.path().join("start.json");
    let o = lipembed(&["--out", s(&start), "apply", "--map", s(&map), "--points", s(&px), "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let start: Vec<Vec<f64>> = serde_json::from_value(read(&start)["result"]["points"].clone()).unwrap();
    assert_eq!(start, x.to_vecs());

    let report = dir.path().join("report.json");
    let o = lipembed(&[
        "--out", s(&report), "verify", "--what", "extension", "--map", s(&map),
        "--source", s(&px), "--target", s(&py), "--pairing", s(&pairing),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(&report)["result"]["report"]["pass"], true);
}

#[test]
fn verify_lne_and_hausdorff() {
    let dir = TempDir::new().unwrap();
    let circle = PointCloud::new(
        "circle",
        1,
        (0..360)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 360.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
    )
    .unwrap();
    let c = write_json(&dir, "circle.json", &circle);
    let o = lipembed(&["verify", "--what", "lne", "--input", s(&c), "--rho", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratio = doc["result"]["ratio"].as_f64().unwrap();
    assert!((ratio - std::f64::consts::FRAC_PI_2).abs() < 0.05);

    let shifted = PointCloud::new("shifted", 1, circle.points().map(|p| vec![p[0] + 0.5, p[1]]).collect()).unwrap();
    let d = write_json(&dir, "shifted.json", &shifted);
    let o = lipembed(&["verify", "--what", "hausdorff", "--input", s(&c), "--other", s(&d)]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let h = doc["result"]["distance"].as_f64().unwrap();
    assert!(h > 0.45 && h <= 0.5 + 1e-12, "{h}");

    let o = lipembed(&["verify", "--what", "hausdorff", "--input", s(&c)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn local_variants_reach_lower_dimensions() {
    let dir = TempDir::new().unwrap();
    let cubic = PointCloud::new(
        "twisted cubic",
        1,
        (0..101)
            .map(|i| {
                let t = -0.5 + i as f64 / 100.0;
                vec![t, t * t, t * t * t]
            })
            .collect(),
    )
    .unwrap();
    let input = write_json(&dir, "cubic.json", &cubic);
    let o = lipembed(&["embed", "--input", s(&input), "--target-dim", "2", "--local", "--schedule", "0.5,0.25,0.125"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["final_cloud"]["ambient_dim"], 2);
    assert!(doc["result"]["radius"].as_f64().unwrap() <= 0.5);

    let o = lipembed(&["embed", "--input", s(&input), "--target-dim", "2", "--local", "--schedule", "0.1,0.2"]);
    assert_eq!(o.status.code(), Some(2), "increasing schedule is rejected");

    let o = lipembed(&["extend", "--source", s(&input), "--target", s(&input), "--local"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = lipembed(&["extend", "--source", s(&input), "--target", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
}
