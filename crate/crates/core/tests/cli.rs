use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_graph-union-lab");

fn lab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("GRAPH_UNION_LAB_THREADS");
    if let Some(t) = threads {
        cmd.env("GRAPH_UNION_LAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const K2_SPEC: &str = r#"{"n":3,"m":2,"kind":{"fixed_graphs":[{"vertices":2,"edges":[[1,2]]}]}}"#;

fn config(spec: &str, trials: usize, extra: &str) -> String {
    format!(
        r#"{{"spec":{spec},"trials":{trials},"master_seed":17,"statistics":["connected","delta",{{"kconn":2}},"eta_census",{{"n_counters":1}},"blossoms","event_A"]{extra}}}"#
    )
}

fn estimate(summary: &str, statistic: &str) -> f64 {
    summary
        .lines()
        .find(|l| l.starts_with(&format!("{statistic},")))
        .and_then(|l| l.split(',').nth(3))
        .expect("statistic row")
        .parse()
        .unwrap()
}

#[test]
fn sample_prints_edges_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", K2_SPEC);
    let out = lab(&["sample", "--spec", &spec, "--seed", "5"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# n=3 edges="));
    let again = lab(&["sample", "--spec", &spec, "--seed", "5"], None);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);

    let dot = lab(&["sample", "--spec", &spec, "--seed", "5", "--dot"], None);
    let dot = String::from_utf8(dot.stdout).unwrap();
    assert!(dot.starts_with("graph union {") && dot.contains(" -- "));
}

#[test]
fn forced_connection_has_probability_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"n":2,"m":1,"kind":{"fixed_graphs":[{"vertices":2,"edges":[[1,2]]}]}}"#;
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"spec":{spec},"trials":100,"master_seed":17,"statistics":["connected","delta"]}}"#),
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(estimate(&summary, "connected"), 1.0);
    assert!(summary.lines().any(|l| l == "connected,100,100,1.00000000,0.963006502,1.00000000"));
    assert!(summary.starts_with("# graph-union-lab run\n# config_sha256="));
    assert!(summary.contains("# master_seed=17\n"));
    assert!(!summary.contains('\r'));
}

#[test]
fn two_edges_on_three_vertices_connect_with_probability_two_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let trials = 100_000;
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"spec":{K2_SPEC},"trials":{trials},"master_seed":3,"statistics":["connected"]}}"#),
    );
    let out_dir = dir.path().join("out");
    assert!(lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()], None).status.success());
    let p_hat = estimate(&fs::read_to_string(out_dir.join("summary.csv")).unwrap(), "connected");
    let p = 2.0 / 3.0;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((p_hat - p).abs() <= 3.0 * sigma, "{p_hat}");
}

#[test]
fn run_output_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"n":40,"m":60,"kind":{"bernoulli_yq":{"support":[{"y":4,"q":0.5,"w":0.5},{"y":6,"q":1.0,"w":0.5}]}}}"#;
    let cfg = write(dir.path(), "c.json", &config(spec, 150, ""));
    let mut outputs = Vec::new();
    for (i, threads) in [Some("1"), Some("4"), None].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("out{i}"));
        let out = lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()], threads);
        assert!(out.status.success());
        outputs.push((
            fs::read(out_dir.join("summary.csv")).unwrap(),
            fs::read(out_dir.join("trials.jsonl")).unwrap(),
        ));
    }
    assert!(outputs.iter().all(|o| o == &outputs[0]));

    let jsonl = String::from_utf8(outputs[0].1.clone()).unwrap();
    let records: Vec<serde_json::Value> = jsonl
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 150);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["trial_index"], i);
        assert!(r.get("wall_time_micros").is_none());
        for key in ["derived_seed", "connected", "delta", "kconn_results", "eta1", "nk_summary"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"n":100,"m":1,"kind":{"fixed_graphs":[{"vertices":2,"edges":[[1,2]]}]}}"#;
    let cfg = write(
        dir.path(),
        "c.json",
        &config(spec, 50, r#","sweep":{"parameter":"lambda0","values":[-2.0,0.0,2.0,100.0]}"#),
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["sweep", "--config", &cfg, "--out", out_dir.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("parameter,value,m,lambda0,lambda_2,predicted_connected,trials,connected,"));
    assert_eq!(rows.len(), 4);
    assert!(csv.contains("# skipped lambda0=100.000000: back-solved m < 1"));
    // m = round(100 (ln 100 + 2) / 2) = 330
    assert!(rows[1].starts_with("lambda0,-2.00000000,330,"));

    let m_cfg = write(dir.path(), "m.json", &config(spec, 50, r#","sweep":{"parameter":"m","values":[100,200,400]}"#));
    let out = lab(&["sweep", "--config", &m_cfg, "--out", out_dir.to_str().unwrap()], None);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let p: Vec<f64> = csv
        .lines()
        .filter(|l| l.starts_with("m,"))
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert!(p.windows(2).all(|w| w[0] <= w[1]), "{p:?}");
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = lab(&["verify", "--suite", "formula-exact"], None);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suite"], "formula-exact");
    assert_eq!(report["passed"], true);

    let out = lab(&["verify", "--suite", "connectivity-oracle", "--budget", "50"], None);
    assert_eq!(out.status.code(), Some(0));

    let out = lab(&["verify", "--suite", "no-such-suite"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-suite"));

    let out = lab(&["verify", "--suite", "step-size-a", "--budget", "20"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &config(K2_SPEC, 0, ""));
    let out = lab(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`trials`"));

    let cfg = write(dir.path(), "d.json", &config(K2_SPEC, 5, "").replace(r#"{"kconn":2}"#, r#"{"kconn":0}"#));
    let out = lab(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("statistics[2].kconn"));

    let out = lab(&["run", "--config", "/nonexistent.json", "--out", "/tmp"], None);
    assert_eq!(out.status.code(), Some(2));

    let out = lab(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moments_of_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"n":500,"m":1102,"kind":{"clique_sizes":{"support":[{"size":3,"w":1.0}]}}}"#,
    );
    let out = lab(&["moments", "--spec", &spec], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["moments"]["kappa"], 3.0);
    assert_eq!(v["moments"]["a"], 2);
    assert_eq!(v["window_k0"]["inside"], true);
}
