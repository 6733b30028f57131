use std::path::{Path, PathBuf};
use std::process::{Command, Output};

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use sdrforge::coco::{read_ground_truth, read_results};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sdrforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdrforge"))
        .args(args)
        .env_remove("SDRFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn assert_error(o: &Output, kind: &str) {
    assert!(!o.status.success());
    let e = stderr(o);
    assert_eq!(e.lines().count(), 1, "{e}");
    assert!(e.starts_with(&format!("sdrforge: error[{kind}]: ")), "{e}");
}

fn small_config(dir: &Path, style: &str, frames: usize) -> PathBuf {
    let path = dir.join(format!("{style}.json"));
    let text = format!(
        r#"{{"style":"{style}","camera_bound":30,"dataset_size":{frames},"segment_length":5,
            "image_width":160,"image_height":120,"hdri_library":["builtin:sky-0","builtin:sky-1"]}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures/eval").join(name)
}

#[test]
fn fixture_matches_golden_exactly() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("r.json");
    let o = sdrforge(&["evaluate", "--gt", p(&fixture("gt.json")), "--pred", p(&fixture("pred.json")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let golden = std::fs::read_to_string(fixture("golden.json")).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), golden.trim_end());
}

#[test]
fn golden_is_the_oracle_result() {
    let gt = read_ground_truth(&fixture("gt.json")).unwrap();
    let dets = read_results(&fixture("pred.json")).unwrap();
    let expected = serde_json::to_string_pretty(&oracle::evaluate(&gt, &dets)).unwrap();
    if std::env::var_os("SDRFORGE_WRITE_GOLDEN").is_some() {
        std::fs::write(fixture("golden.json"), format!("{expected}\n")).unwrap();
    }
    assert_eq!(std::fs::read_to_string(fixture("golden.json")).unwrap().trim_end(), expected);
}

#[test]
fn evaluate_is_idempotent() {
    let d = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = d.path().join(name);
        let o = sdrforge(&["evaluate", "--gt", p(&fixture("gt.json")), "--pred", p(&fixture("pred.json")), "--out", p(&out)]);
        (stdout(&o), std::fs::read(out).unwrap())
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn perfect_predictions_print_one() {
    let d = tempfile::tempdir().unwrap();
    let gt = read_ground_truth(&fixture("gt.json")).unwrap();
    let dets: Vec<_> = gt
        .annotations
        .iter()
        .map(|a| serde_json::json!({"image_id": a.image_id, "category_id": a.category_id, "bbox": a.bbox, "score": 1.0}))
        .collect();
    let pred = d.path().join("pred.json");
    std::fs::write(&pred, serde_json::to_string(&dets).unwrap()).unwrap();
    let o = sdrforge(&["evaluate", "--gt", p(&fixture("gt.json")), "--pred", p(&pred), "--label", "oracle"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row[0], "oracle");
    let col = header.iter().position(|h| *h == "AP50").unwrap();
    assert_eq!(row[col + 1], "1.000");
}

#[test]
fn unknown_image_id_is_reported() {
    let d = tempfile::tempdir().unwrap();
    let pred = d.path().join("pred.json");
    std::fs::write(&pred, r#"[{"image_id":99,"category_id":1,"bbox":[0,0,5,5],"score":0.5}]"#).unwrap();
    let o = sdrforge(&["evaluate", "--gt", p(&fixture("gt.json")), "--pred", p(&pred)]);
    assert_error(&o, "UnknownImageId");
    assert!(stderr(&o).contains("99"));
}

#[test]
fn missing_input_is_io_error() {
    let o = sdrforge(&["evaluate", "--gt", "/nonexistent/gt.json", "--pred", p(&fixture("pred.json"))]);
    assert_error(&o, "IoError");
    let o = sdrforge(&["augment", "--dataset", "/nonexistent/dataset"]);
    assert_error(&o, "IoError");
}

#[test]
fn unknown_config_key_names_the_key() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(&cfg, r#"{"style":"drones_only","camera_bound":40,"dataset_size":1,"hdri_library":["builtin:sky-0"],"camra_bound":3}"#).unwrap();
    let o = sdrforge(&["generate", "--config", p(&cfg), "--out", p(&d.path().join("out"))]);
    assert_error(&o, "ConfigError");
    assert!(stderr(&o).contains("camra_bound"));
}

#[test]
fn shipped_bounds40_frames_mostly_contain_drones() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("ds");
    let cfg = root().join("configs/bounds/bounds40.json");
    let o = sdrforge(&["generate", "--config", p(&cfg), "--out", p(&out), "--frames", "50", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_ground_truth(&out.join("annotations.json")).unwrap();
    assert_eq!(m.images.len(), 50);
    assert_eq!(m.categories.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["drone"]);
    let with_drone = m.images.iter().filter(|i| m.annotations.iter().any(|a| a.image_id == i.id)).count();
    assert!(with_drone * 100 >= 80 * 50, "{with_drone}/50 frames have a drone");
    for i in &m.images {
        assert!(out.join(&i.file_name).is_file());
    }
}

#[test]
fn generate_resumes_and_seed_env_is_used() {
    let d = tempfile::tempdir().unwrap();
    let cfg = small_config(d.path(), "drones_only", 6);
    let out = d.path().join("ds");
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_sdrforge"))
            .args(["generate", "--config", p(&cfg), "--out", p(&out)])
            .env("SDRFORGE_SEED", seed)
            .output()
            .unwrap()
    };
    let first = run("11");
    assert!(first.status.success(), "{}", stderr(&first));
    let before = std::fs::read(out.join("annotations.json")).unwrap();
    let second = run("11");
    assert!(stdout(&second).contains("0 rendered, 6 reused"), "{}", stdout(&second));
    assert_eq!(before, std::fs::read(out.join("annotations.json")).unwrap());
    assert_error(&run("12"), "OutputConflict");
}

fn write_run(dir: &Path, group: &str, run: usize, ap50: f64) {
    let g = dir.join(group);
    std::fs::create_dir_all(&g).unwrap();
    let r = serde_json::json!({"ap": ap50 / 2.0, "ap50": ap50, "ap75": null, "ap_s": null, "ap_m": null,
        "ap_l": null, "ar": ap50, "ar_s": null, "ar_m": null, "ar_l": null});
    std::fs::write(g.join(format!("run_{run}.json")), r.to_string()).unwrap();
}

#[test]
fn aggregate_eight_runs_and_single_run() {
    let d = tempfile::tempdir().unwrap();
    let runs = d.path().join("runs");
    for k in 0..8 {
        write_run(&runs, "b40", k, 0.5 + 0.01 * k as f64);
    }
    write_run(&runs, "b80", 0, 0.4);
    let out = d.path().join("table.csv");
    let o = sdrforge(&["aggregate", "--runs", p(&runs), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let row = |g: &str, m: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
            .find(|f| f[0] == g && f[1] == m)
            .unwrap()
    };
    assert_eq!(row("b40", "ap50")[2], "8");
    assert_ne!(row("b40", "ap50")[5], "-");
    assert_eq!(row("b80", "ap50")[2], "1");
    assert_eq!(row("b80", "ap50")[5], "-");
    assert!(out.with_extension("json").is_file());
    assert!(stdout(&o).lines().next().unwrap().contains("b40"));
}

#[test]
fn aggregate_empty_dir_is_empty_group() {
    let d = tempfile::tempdir().unwrap();
    let o = sdrforge(&["aggregate", "--runs", p(d.path()), "--out", p(&d.path().join("t.csv"))]);
    assert_error(&o, "EmptyGroup");
}

#[test]
fn preview_and_augment_a_small_dataset() {
    let d = tempfile::tempdir().unwrap();
    let cfg = small_config(d.path(), "drones_birds", 6);
    let out = d.path().join("ds");
    assert!(sdrforge(&["generate", "--config", p(&cfg), "--out", p(&out), "--seed", "1"]).status.success());
    let sheet = d.path().join("sheet.png");
    let o = sdrforge(&["preview", "--dataset", p(&out), "--out", p(&sheet), "--cells", "2"]);
    assert!(stdout(&o).starts_with("wrote 4 frames"), "{}", stderr(&o));
    assert!(sheet.is_file());

    let plan = root().join("configs/augment/jpeg_noise.json");
    let o = sdrforge(&["augment", "--dataset", p(&out), "--plan", p(&plan)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("augmented 3 of 6"), "{}", stdout(&o));
    assert!(out.join("augmentation_report.json").is_file());
    assert!(!sdrforge(&["augment", "--dataset", p(&out)]).status.success());
}

#[test]
fn preview_of_empty_dataset_is_io_error() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("annotations.json"), r#"{"images":[],"annotations":[],"categories":[]}"#).unwrap();
    let o = sdrforge(&["preview", "--dataset", p(d.path()), "--out", p(&d.path().join("s.png"))]);
    assert_error(&o, "IoError");
}
