use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

fn nestab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestab"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("experiment.toml");
    fs::write(&p, format!("schema_version = 1\n{body}")).unwrap();
    p
}

const PLANTED: &str = r#"
base_seed = 7
[graph.generator]
model = "planted_partition"
n = 90
blocks = 3
p_in = 0.25
p_out = 0.02
[embed]
algorithm = "node2vec"
dim = 8
runs = 3
[embed.node2vec]
walks_per_node = 4
walk_length = 20
window = 4
[compare]
k = 5
angle_samples = 20
[downstream]
sample_count = 2
reps = 2
folds = 3
cv_reps = 1
[downstream.classifier]
epochs = 30
"#;

fn run_all(config: &Path, out: &Path, workers: &str) {
    let out = out.to_str().unwrap();
    let cfg = config.to_str().unwrap();
    for stage in ["generate", "embed", "compare", "downstream", "report"] {
        let o = nestab(&[stage, "--config", cfg, "--out", out, "--workers", workers]);
        assert!(o.status.success(), "{stage} failed: {}", String::from_utf8_lossy(&o.stderr));
    }
}

/// Every output file except manifests, keyed by relative path.
fn outputs(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                if p.file_name().unwrap() != "manifests" {
                    stack.push(p);
                }
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn pipeline_is_deterministic_and_worker_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), PLANTED);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    run_all(&cfg, &a, "1");
    run_all(&cfg, &b, "4");
    run_all(&cfg, &c, "1");
    let oa = outputs(&a);
    assert!(oa.len() >= 10, "{:?}", oa.iter().map(|o| &o.0).collect::<Vec<_>>());
    let ob = outputs(&b);
    let oc = outputs(&c);
    for ((pa, xa), (pb, xb)) in oa.iter().zip(&ob) {
        assert_eq!(pa, pb);
        assert!(xa == xb, "{pa} differs between 1 and 4 workers");
    }
    assert_eq!(oa, oc, "rerun with one worker changed outputs");
    assert_eq!(oa.len(), ob.len());

    let graph = "planted_partition_n90_b3";
    let summary = read_json(&a.join(format!("compare/{graph}/node2vec/summary.json")));
    assert_eq!(summary["pair_count"], 3);
    assert_eq!(summary["measures"].as_array().unwrap().len(), 3);
    let core = read_json(&a.join(format!("downstream/{graph}/node2vec/stable_core.json")));
    for key in ["mode_i", "mode_ii", "f1_distribution"] {
        assert!(core.get(key).is_some(), "missing {key}");
    }
    assert_eq!(core["f1_distribution"].as_array().unwrap().len(), 3);
    let nodes = fs::read_to_string(a.join(format!("compare/{graph}/node2vec/nodes.csv"))).unwrap();
    assert!(nodes.starts_with("node_id,pagerank,degree,coreness,mean_aligned_cos,mean_knn_jaccard,mean_second_order_cos\n"));
    assert_eq!(nodes.lines().count(), 91);
    let report = fs::read_to_string(a.join("report.csv")).unwrap();
    assert!(report.contains(",node2vec,mean_aligned_cos,"));
    assert!(report.contains(",node2vec,stable_core_mode_ii,"));

    let manifest = read_json(&a.join("manifests/embed.json"));
    assert_eq!(manifest["run_seeds"], serde_json::json!([7, 8, 9]));
    assert_eq!(manifest["config"]["embed"]["dim"], 8);
    assert!(manifest["graphs"][0]["digest"].is_string());

    // rerunning report on the same inputs gives the same table
    let o = nestab(&["report", "--out", a.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(a.join("report.csv")).unwrap(), report);
}

#[test]
fn thirty_runs_give_435_pairs_and_distinct_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[graph.generator]
model = "watts_strogatz"
n = 60
density = 0.1
[embed]
algorithm = "hope"
dim = 4
[compare]
k = 5
angle_samples = 0
"#,
    );
    let out = dir.path().join("out");
    for stage in ["generate", "embed", "compare"] {
        let o = nestab(&[stage, "--config", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files: Vec<_> = fs::read_dir(out.join("embeddings/watts_strogatz_n60_d0.1")).unwrap().collect();
    assert_eq!(files.len(), 30);
    let summary = read_json(&out.join("compare/watts_strogatz_n60_d0.1/hope/summary.json"));
    assert_eq!(summary["pair_count"], 435);
    assert_eq!(summary["run_count"], 30);
}

#[test]
fn sweeps_write_one_graph_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[graph.generator]
model = "barabasi_albert"
sweep = "size"
sizes = [100, 200, 400]
density = 0.05
"#,
    );
    let o = nestab(&["generate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let edges = fs::read_dir(dir.path().join("out/graphs"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "edges")
        .count();
    assert_eq!(edges, 3);
}

#[test]
fn infeasible_sweep_point_is_a_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    // density 0.0001 on 100 nodes resolves to m = 0
    let cfg = write_config(
        dir.path(),
        r#"
[graph.generator]
model = "barabasi_albert"
sweep = "density"
density_sweep_n = 100
densities = [0.0001, 0.1]
"#,
    );
    let o = nestab(&["generate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("out/graphs/barabasi_albert_n100_d0.1.edges").is_file());
    let manifest = read_json(&dir.path().join("out/manifests/generate.json"));
    let statuses: Vec<_> = manifest["jobs"].as_array().unwrap().iter().map(|j| j["status"].clone()).collect();
    assert_eq!(statuses, vec!["failed", "ok"]);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[graph.generator]\nmodel = \"watts_strogatz\"\n[embed]\nalgorithm = \"sdne\"\n");
    let o = nestab(&["embed", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--external-dir"));

    let bad = write_config(dir.path(), "[graph.generator]\nmodel = \"watts_strogatz\"\n[embed]\nruns = 1\n");
    assert_eq!(nestab(&["embed", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(nestab(&["report", "--out", empty.to_str().unwrap()]).status.code(), Some(2));

    // downstream without any label source
    let cfg = write_config(
        dir.path(),
        "[graph.generator]\nmodel = \"watts_strogatz\"\nn = 50\ndensity = 0.1\n[embed]\nalgorithm = \"hope\"\ndim = 4\nruns = 2\n",
    );
    for stage in ["generate", "embed"] {
        assert!(nestab(&[stage, "--config", cfg.to_str().unwrap()]).status.success());
    }
    let o = nestab(&["downstream", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("labels"));
}

fn write_gaussian_embedding(path: &Path, n: usize, d: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = format!("{n} {d}\n");
    for i in 0..n {
        s.push_str(&i.to_string());
        for _ in 0..d {
            let x: f64 = StandardNormal.sample(&mut rng);
            s.push_str(&format!(" {x:?}"));
        }
        s.push('\n');
    }
    fs::write(path, s).unwrap();
}

fn external_setup(dir: &Path) -> PathBuf {
    let cfg = write_config(
        dir,
        "[graph.generator]\nmodel = \"watts_strogatz\"\nn = 400\ndensity = 0.02\n[compare]\nk = 10\nangle_samples = 50\n",
    );
    assert!(nestab(&["generate", "--config", cfg.to_str().unwrap()]).status.success());
    cfg
}

#[test]
fn external_random_embeddings_score_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = external_setup(dir.path());
    let ext = dir.path().join("ext");
    fs::create_dir(&ext).unwrap();
    for s in 0..3 {
        write_gaussian_embedding(&ext.join(format!("sage_{s}.emb")), 400, 32, s);
    }
    let o = nestab(&["compare", "--config", cfg.to_str().unwrap(), "--external-dir", ext.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.path().join("out/compare/watts_strogatz_n400_d0.02/external/summary.json"));
    assert_eq!(s["pair_count"], 3);
    for m in s["measures"].as_array().unwrap() {
        let mean = m["grand_mean"].as_f64().unwrap();
        match m["measure"].as_str().unwrap() {
            "aligned_cos" => assert!(mean.abs() < 0.3, "aligned {mean}"),
            "knn_jaccard" => assert!(mean < 0.05, "jaccard {mean}"),
            _ => {}
        }
    }
}

#[test]
fn identical_external_files_score_one_and_shape_offenders_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = external_setup(dir.path());
    let ext = dir.path().join("same");
    fs::create_dir(&ext).unwrap();
    write_gaussian_embedding(&ext.join("a.emb"), 400, 16, 1);
    fs::copy(ext.join("a.emb"), ext.join("b.emb")).unwrap();
    let o = nestab(&["compare", "--config", cfg.to_str().unwrap(), "--external-dir", ext.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.path().join("out/compare/watts_strogatz_n400_d0.02/external/summary.json"));
    for m in s["measures"].as_array().unwrap() {
        assert!((m["grand_mean"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{m}");
    }

    write_gaussian_embedding(&ext.join("c.emb"), 400, 8, 2);
    let o = nestab(&["compare", "--config", cfg.to_str().unwrap(), "--external-dir", ext.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let manifest = read_json(&dir.path().join("out/manifests/compare.json"));
    let err = manifest["jobs"][0]["error"].as_str().unwrap();
    assert!(err.contains("c.emb (d = 8)"), "{err}");
}
