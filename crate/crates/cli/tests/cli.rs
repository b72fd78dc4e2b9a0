use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use csei_core::WeightVector;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn csei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csei"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn config() -> String {
    fixtures().join("config.toml").display().to_string()
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.display().to_string();
    let config = config();
    let mut args = vec!["run", "-c", &config, "--out", &out];
    args.extend_from_slice(extra);
    csei(&args)
}

/// Relative path → bytes for every file under `dir`.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, acc: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, acc);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                acc.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut acc = BTreeMap::new();
    walk(dir, dir, &mut acc);
    acc
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("error record on stderr");
    serde_json::from_str(line).expect("stderr is a JSON record")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let started = Instant::now();
    ok(&run_into(a.path(), &["--plots"]));
    assert!(started.elapsed().as_secs_f64() < 10.0);
    ok(&run_into(b.path(), &["--plots"]));
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert!(sa.len() >= 17, "{:?}", sa.keys().collect::<Vec<_>>());
    assert_eq!(sa.keys().collect::<Vec<_>>(), sb.keys().collect::<Vec<_>>());
    for (k, v) in &sa {
        assert!(v == &sb[k], "{} differs", k.display());
    }
    assert!(!a.path().join(".csei.lock").exists());
}

#[test]
fn different_seed_changes_forest_scores() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run_into(a.path(), &[]));
    ok(&run_into(b.path(), &["--seed", "7"]));
    assert_ne!(
        read(a.path(), "outliers.csv"),
        read(b.path(), "outliers.csv")
    );
}

#[test]
fn stepwise_commands_match_run() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run_into(a.path(), &[]));
    let out = b.path().display().to_string();
    let config = config();
    for step in ["ingest", "build", "analyze"] {
        ok(&csei(&[step, "-c", &config, "--out", &out]));
    }
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn missing_posts_file_exits_2_and_names_path() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().display().to_string();
    let res = csei(&["ingest", "--posts", "/no/such/posts.csv", "--out", &out]);
    assert_eq!(res.status.code(), Some(2));
    let rec = stderr_json(&res);
    assert_eq!(rec["error"]["path"], "/no/such/posts.csv");
    assert_eq!(rec["error"]["kind"], "missing_input");
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "contaminaton = 0.1\n").unwrap();
    let res = csei(&["validate-config", "-c", &bad.display().to_string()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr_json(&res)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("contaminaton"));

    let res = csei(&["validate-config", "--window", "0"]);
    assert_eq!(res.status.code(), Some(2));
    let res = csei(&["validate-config", "--no-such-flag"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn validate_config_prints_resolved_values() {
    let config = config();
    let res = csei(&["validate-config", "-c", &config, "--seed", "5"]);
    ok(&res);
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("seed = 5"), "{text}");
    assert!(text.contains("n-trees = 100"), "{text}");
}

#[test]
fn ledger_reports_planted_counts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().display().to_string();
    let config = config();
    ok(&csei(&["ingest", "-c", &config, "--out", &out]));
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "metadata.json")).unwrap();
    let l = &meta["ingest"]["ledger"];
    assert_eq!(l["deleted"], 3);
    assert_eq!(l["removed"], 2);
    assert_eq!(l["bot"], 4);
    assert_eq!(l["out_of_window"], 5);
    assert_eq!(l["survivors"], 986);
    assert_eq!(read(dir.path(), "clean_posts.csv").lines().count(), 987);
}

#[test]
fn load_mode_echoes_reference_weights() {
    let dir = TempDir::new().unwrap();
    ok(&run_into(dir.path(), &["--weight-mode", "load"]));
    let used = WeightVector::read_csv(read(dir.path(), "weights.csv").as_bytes()).unwrap();
    assert_eq!(used, WeightVector::reference());
    let text = read(dir.path(), "weights.csv");
    assert!(text.contains("compound_sentiment,0.1398,"), "{text}");
    assert!(text.contains("daily_total_score,0.0057,"), "{text}");
}

#[test]
fn derived_weights_sum_to_one() {
    let dir = TempDir::new().unwrap();
    ok(&run_into(dir.path(), &[]));
    let w = WeightVector::read_csv(read(dir.path(), "weights.csv").as_bytes()).unwrap();
    assert!((w.sum() - 1.0).abs() < 1e-9);
    assert!(w.weights.iter().all(|x| *x >= 0.0));
}

#[test]
fn plots_only_when_requested() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run_into(a.path(), &[]));
    let svgs = |d: &Path| {
        snapshot(d)
            .keys()
            .filter(|p| p.extension().is_some_and(|e| e == "svg"))
            .count()
    };
    assert_eq!(svgs(a.path()), 0);
    ok(&run_into(b.path(), &["--plots"]));
    assert_eq!(svgs(b.path()), 4);
}

#[test]
fn analyze_resumes_from_hand_written_index() {
    let full = TempDir::new().unwrap();
    ok(&run_into(full.path(), &[]));
    let resumed = TempDir::new().unwrap();
    let index = resumed.path().join("my_index.csv");
    std::fs::copy(full.path().join("index.csv"), &index).unwrap();
    let out = resumed.path().join("out").display().to_string();
    let index = index.display().to_string();
    ok(&csei(&["analyze", "--index", &index, "--out", &out]));
    for name in [
        "deltas.csv",
        "smoothed.csv",
        "extrema.csv",
        "cumulative.csv",
        "event_stats.csv",
    ] {
        assert_eq!(
            read(full.path(), name),
            read(&resumed.path().join("out"), name),
            "{name}"
        );
    }
}

#[test]
fn extrema_file_on_single_bump() {
    let dir = TempDir::new().unwrap();
    let index = dir.path().join("index.csv");
    // deltas 0, 1, 0 → one peak at smoothed index 1 when w = 1
    std::fs::write(
        &index,
        "date,csei\n2020-03-09,0\n2020-03-10,0\n2020-03-11,1\n2020-03-12,1\n",
    )
    .unwrap();
    let out = dir.path().join("out").display().to_string();
    let index = index.display().to_string();
    ok(&csei(&[
        "analyze",
        "--index",
        &index,
        "--out",
        &out,
        "--window",
        "1",
        "--distance",
        "1",
        "--prominence",
        "0.5",
    ]));
    let text = read(&dir.path().join("out"), "extrema.csv");
    assert_eq!(
        text,
        "kind,index,date,value,prominence\npeak,1,2020-03-11,1,1\n"
    );
    let deltas = read(&dir.path().join("out"), "deltas.csv");
    assert!(deltas.contains("2020-03-11,1,1"), "{deltas}");
}

#[test]
fn short_series_is_a_stage_error() {
    let dir = TempDir::new().unwrap();
    let index = dir.path().join("index.csv");
    std::fs::write(
        &index,
        "date,csei\n2020-03-09,0.1\n2020-03-10,0.2\n2020-03-11,0.4\n",
    )
    .unwrap();
    let out = dir.path().join("out").display().to_string();
    let index = index.display().to_string();
    let res = csei(&["analyze", "--index", &index, "--out", &out]);
    assert_eq!(res.status.code(), Some(1));
    let rec = stderr_json(&res);
    assert_eq!(rec["error"]["stage"], "analysis");
    assert!(rec["error"]["message"].as_str().unwrap().contains("window"));
}

#[test]
fn locked_output_directory_is_refused() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join(".csei.lock"), "").unwrap();
    let res = run_into(dir.path(), &[]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(stderr_json(&res)["error"]["kind"], "locked");
}

#[test]
fn event_stats_has_the_expected_columns() {
    let dir = TempDir::new().unwrap();
    ok(&run_into(dir.path(), &[]));
    let text = read(dir.path(), "event_stats.csv");
    let header = text.lines().next().unwrap();
    for col in ["r", "p_value", "mean_event", "mean_non_event"] {
        assert!(header.split(',').any(|c| c == col), "{header}");
    }
}

#[test]
fn post_level_outliers_run() {
    let dir = TempDir::new().unwrap();
    ok(&run_into(dir.path(), &["--granularity", "post"]));
    let outliers = read(dir.path(), "outliers.csv");
    // one row per scored post plus the header
    assert_eq!(outliers.lines().count(), 987);
}
