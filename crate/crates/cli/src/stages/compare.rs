use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nestab_core::embed::{load_embedding, Embedding};
use nestab_core::geometry::{
    aggregate, angle_deviation, compare_runs, CentralityProfile, CompareOptions, LetterValues, Measure, StabilityReport,
};
use nestab_core::graph::{coreness, degree, pagerank, sample_node_pairs, PageRankParams, PairCategory};
use nestab_core::linalg::DenseMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::native_algorithm;
use crate::config::ExperimentConfig;
use crate::graphs::{graph_names, load_graph, GraphRecord, LoadedGraph};
use crate::layout::{fmt_f64, fmt_opt, write_atomic, write_json, Layout};
use crate::manifest::{JobRecord, StageLog};
use crate::CliError;

pub const NODE_CSV_HEADER: &str = "node_id,pagerank,degree,coreness,mean_aligned_cos,mean_knn_jaccard,mean_second_order_cos";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub measure: Measure,
    pub grand_mean: f64,
    pub quantiles: LetterValues,
    pub excluded_nodes: usize,
    pub undefined_values: usize,
    pub profiles: Vec<CentralityProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSummary {
    pub category: PairCategory,
    pub sampled_pairs: usize,
    pub incomplete: bool,
    pub skipped: usize,
    pub mean_abs_deviation_degrees: Option<f64>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub graph: GraphRecord,
    pub algorithm: String,
    pub files: Vec<String>,
    pub run_count: usize,
    pub pair_count: usize,
    pub node_count: usize,
    pub dim: usize,
    pub k: usize,
    pub center: bool,
    pub measures: Vec<MeasureSummary>,
    pub angle_deviation: Vec<AngleSummary>,
}

impl CompareSummary {
    pub fn measure(&self, m: Measure) -> Option<&MeasureSummary> {
        self.measures.iter().find(|s| s.measure == m)
    }
}

/// Embedding files of one graph, sorted by name for external directories
/// and by seed for native runs.
fn embedding_files(cfg: &ExperimentConfig, layout: &Layout, graph: &str) -> Result<(String, Vec<PathBuf>), CliError> {
    if let Some(dir) = &cfg.compare.external_dir {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "emb"))
            .collect();
        files.sort();
        return Ok(("external".into(), files));
    }
    let algo = native_algorithm(&cfg.embed.algorithm)?;
    let mut files = Vec::new();
    for seed in cfg.run_seeds() {
        let p = layout.embedding_file(graph, algo.name(), seed);
        if p.is_file() {
            files.push(p);
        } else {
            log::warn!("{} is missing, comparing the remaining runs", p.display());
        }
    }
    Ok((algo.name().into(), files))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_all(files: &[PathBuf], n: usize) -> Result<Vec<Embedding>, CliError> {
    files
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let f = File::open(p).map_err(|e| CliError::io(p, e))?;
            load_embedding(BufReader::new(f), Some(n), i as u64)
                .map_err(|e| CliError::Other(format!("{}: {e}", p.display())))
        })
        .collect()
}

/// Every file whose dimension differs from the first file's.
fn check_shapes(files: &[PathBuf], runs: &[Embedding]) -> Result<(), CliError> {
    let d = runs[0].dim();
    let offenders: Vec<String> = files
        .iter()
        .zip(runs)
        .filter(|(_, e)| e.dim() != d)
        .map(|(p, e)| format!("{} (d = {})", file_name(p), e.dim()))
        .collect();
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(CliError::Other(format!(
            "embedding shapes differ from {} (d = {d}): {}",
            file_name(&files[0]),
            offenders.join(", ")
        )))
    }
}

/// All configured measures on all pairs of runs of one graph.
pub fn compare_graph(cfg: &ExperimentConfig, loaded: &LoadedGraph, files: &[PathBuf], algorithm: &str) -> Result<(CompareSummary, Vec<StabilityReport>), CliError> {
    if files.len() < 2 {
        return Err(CliError::Other(format!(
            "need at least 2 embedding files to compare, found {}",
            files.len()
        )));
    }
    let g = &loaded.graph;
    let runs = load_all(files, g.node_count())?;
    check_shapes(files, &runs)?;
    let matrices: Vec<&DenseMatrix> = runs.iter().map(|e| &e.matrix).collect();
    let opts = CompareOptions {
        measures: cfg.compare.measures.clone(),
        k: cfg.compare.k,
        center: cfg.compare.center,
    };
    let scores = compare_runs(&matrices, &opts)?;

    let centralities = [pagerank(g, PageRankParams::default()), degree(g), coreness(g)];
    let cref: Vec<_> = centralities.iter().collect();
    let mut reports = Vec::new();
    for &m in &opts.measures {
        let of_measure: Vec<_> = scores.iter().filter(|s| s.measure == m).cloned().collect();
        reports.push(aggregate(&of_measure, &cref, cfg.compare.window_fraction)?);
    }

    let mut angles = Vec::new();
    if cfg.compare.angle_samples > 0 {
        let samples = sample_node_pairs(g, cfg.compare.angle_samples, cfg.base_seed);
        let report = angle_deviation(&matrices, &samples.categories())?;
        for (c, s) in report.categories.iter().zip(samples.categories()) {
            angles.push(AngleSummary {
                category: c.category,
                sampled_pairs: s.pairs.len(),
                incomplete: s.incomplete,
                skipped: c.skipped,
                mean_abs_deviation_degrees: c.mean,
            });
        }
    }

    let summary = CompareSummary {
        graph: loaded.record.clone(),
        algorithm: algorithm.to_owned(),
        files: files.iter().map(|p| file_name(p)).collect(),
        run_count: runs.len(),
        pair_count: runs.len() * (runs.len() - 1) / 2,
        node_count: g.node_count(),
        dim: runs[0].dim(),
        k: cfg.compare.k,
        center: cfg.compare.center,
        measures: reports
            .iter()
            .map(|r| MeasureSummary {
                measure: r.measure,
                grand_mean: r.grand_mean,
                quantiles: r.quantiles.clone(),
                excluded_nodes: r.excluded_nodes,
                undefined_values: r.undefined_values,
                profiles: r.profiles.clone(),
            })
            .collect(),
        angle_deviation: angles,
    };
    Ok((summary, reports))
}


fn write_nodes_csv(path: &Path, loaded: &LoadedGraph, reports: &[StabilityReport]) -> Result<(), CliError> {
    let g = &loaded.graph;
    let pr = pagerank(g, PageRankParams::default()).values;
    let deg = degree(g).values;
    let core = coreness(g).values;
    let column = |m: Measure| reports.iter().find(|r| r.measure == m).map(|r| &r.per_node_mean);
    let cols: Vec<_> = Measure::ALL.iter().map(|&m| column(m)).collect();
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(NODE_CSV_HEADER.split(','))?;
        for u in 0..g.node_count() {
            let mut rec = vec![g.node_name(u), fmt_f64(pr[u]), fmt_f64(deg[u]), fmt_f64(core[u])];
            rec.extend(cols.iter().map(|c| fmt_opt(c.and_then(|v| v[u]))));
            out.write_record(&rec)?;
        }
        out.flush()
    })
}

pub fn run_compare(cfg: &ExperimentConfig, workers: usize) -> Result<(), CliError> {
    let layout = Layout::new(&cfg.out);
    let names = graph_names(cfg);
    if cfg.compare.external_dir.is_some() && names.len() != 1 {
        return Err(CliError::Config(
            "--external-dir compares embeddings of a single graph; the config describes a sweep".into(),
        ));
    }
    let mut log = StageLog::start("compare");
    for name in names {
        let t = Instant::now();
        let result = (|| {
            let loaded = load_graph(cfg, &layout, &name)?;
            let (algo, files) = embedding_files(cfg, &layout, &name)?;
            let (summary, reports) = compare_graph(cfg, &loaded, &files, &algo)?;
            let dir = layout.compare_dir(&name, &algo);
            write_nodes_csv(&dir.join("nodes.csv"), &loaded, &reports)?;
            write_json(&dir.join("summary.json"), &summary)?;
            for m in &summary.measures {
                log::info!("{name}/{algo}: mean {} = {:.4}", m.measure.name(), m.grand_mean);
            }
            Ok::<_, CliError>(loaded.record)
        })();
        match result {
            Ok(record) => {
                log.graphs.push(record);
                log.record(JobRecord::ok(&name, t.elapsed().as_secs_f64()));
            }
            Err(e @ CliError::Config(_)) => return Err(e),
            Err(e) => log.record(JobRecord::failed(&name, &e, t.elapsed().as_secs_f64())),
        }
    }
    log.finish(cfg, &layout, workers)
}
