use std::path::{Path, PathBuf};

use super::compare::{CompareSummary, NODE_CSV_HEADER};
use super::downstream::DownstreamSummary;
use crate::graphs::GraphRecord;
use crate::layout::{fmt_f64, fmt_opt, read_json, write_atomic, Layout};
use crate::CliError;

pub const REPORT_HEADER: &str = "graph,model,n,target_density,realized_density,algorithm,metric,value,run_count,pair_count";
pub const NODE_REPORT_HEADER: &str = "graph,algorithm,node_id,pagerank,degree,coreness,metric,value";

struct Row {
    graph: GraphRecord,
    algorithm: String,
    metric: String,
    value: f64,
    run_count: usize,
    pair_count: Option<usize>,
}

/// `<root>/<graph>/<algo>` directories, sorted.
fn stage_dirs(root: &Path) -> Result<Vec<(String, String, PathBuf)>, CliError> {
    let mut out = Vec::new();
    if !root.is_dir() {
        return Ok(out);
    }
    let list = |p: &Path| -> Result<Vec<PathBuf>, CliError> {
        let mut v: Vec<PathBuf> = std::fs::read_dir(p)
            .map_err(|e| CliError::io(p, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        v.sort();
        Ok(v)
    };
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for g in list(root)? {
        for a in list(&g)? {
            out.push((name(&g), name(&a), a));
        }
    }
    Ok(out)
}

fn density_key(r: &GraphRecord) -> f64 {
    r.target_density().unwrap_or_else(|| r.realized_density())
}

/// Joins compare and downstream outputs into `report.csv` (one row per graph,
/// algorithm and metric) and `report_nodes.csv` (one row per node and
/// measure).
pub fn run_report(out: &Path) -> Result<(), CliError> {
    let layout = Layout::new(out);
    let compare = stage_dirs(&layout.compare_root())?;
    let downstream = stage_dirs(&layout.downstream_root())?;
    if compare.is_empty() && downstream.is_empty() {
        return Err(CliError::MissingInputs(vec![
            format!("{}/<graph>/<algorithm>/summary.json", layout.compare_root().display()),
            format!("{}/<graph>/<algorithm>/stable_core.json", layout.downstream_root().display()),
        ]));
    }
    let mut missing = Vec::new();
    for (_, _, dir) in &compare {
        for f in ["summary.json", "nodes.csv"] {
            if !dir.join(f).is_file() {
                missing.push(dir.join(f).display().to_string());
            }
        }
    }
    for (_, _, dir) in &downstream {
        if !dir.join("stable_core.json").is_file() {
            missing.push(dir.join("stable_core.json").display().to_string());
        }
    }
    if !missing.is_empty() {
        return Err(CliError::MissingInputs(missing));
    }

    let mut rows = Vec::new();
    for (_, algo, dir) in &compare {
        let s: CompareSummary = read_json(&dir.join("summary.json"))?;
        for m in &s.measures {
            rows.push(Row {
                graph: s.graph.clone(),
                algorithm: algo.clone(),
                metric: format!("mean_{}", m.measure.name()),
                value: m.grand_mean,
                run_count: s.run_count,
                pair_count: Some(s.pair_count),
            });
        }
        for a in &s.angle_deviation {
            if let Some(v) = a.mean_abs_deviation_degrees {
                rows.push(Row {
                    graph: s.graph.clone(),
                    algorithm: algo.clone(),
                    metric: format!("angle_mad_{}", a.category.name()),
                    value: v,
                    run_count: s.run_count,
                    pair_count: Some(s.pair_count),
                });
            }
        }
    }
    for (_, algo, dir) in &downstream {
        let s: DownstreamSummary = read_json(&dir.join("stable_core.json"))?;
        let runs = s.report.f1_distribution.len();
        let cv_mean = s.cross_validation.iter().map(|c| c.mean).sum::<f64>() / s.cross_validation.len().max(1) as f64;
        for (metric, value) in [
            ("f1_mean", s.report.f1_mean),
            ("f1_stdev", s.report.f1_stdev),
            ("stable_core_mode_i", s.report.mode_i.mean),
            ("stable_core_mode_ii", s.report.mode_ii.stable_core),
            ("cv_micro_f1_mean", cv_mean),
        ] {
            rows.push(Row {
                graph: s.graph.clone(),
                algorithm: algo.clone(),
                metric: metric.into(),
                value,
                run_count: runs,
                pair_count: None,
            });
        }
    }
    // plot order: model, then size, then density; stable within a group
    rows.sort_by(|a, b| {
        a.graph
            .model()
            .cmp(b.graph.model())
            .then(a.graph.node_count.cmp(&b.graph.node_count))
            .then(density_key(&a.graph).total_cmp(&density_key(&b.graph)))
            .then(a.graph.name.cmp(&b.graph.name))
            .then(a.algorithm.cmp(&b.algorithm))
    });
    write_atomic(&layout.report(), |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(REPORT_HEADER.split(','))?;
        for r in &rows {
            out.write_record([
                r.graph.name.clone(),
                r.graph.model().to_owned(),
                r.graph.node_count.to_string(),
                fmt_opt(r.graph.target_density()),
                fmt_f64(r.graph.realized_density()),
                r.algorithm.clone(),
                r.metric.clone(),
                fmt_f64(r.value),
                r.run_count.to_string(),
                r.pair_count.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
        out.flush()
    })?;

    let mut node_rows = Vec::new();
    for (graph, algo, dir) in &compare {
        let path = dir.join("nodes.csv");
        let bad = |e: csv::Error| CliError::Other(format!("{}: {e}", path.display()));
        let mut reader = csv::Reader::from_path(&path).map_err(bad)?;
        let header: Vec<String> = reader.headers().map_err(bad)?.iter().map(str::to_owned).collect();
        if header.join(",") != NODE_CSV_HEADER {
            return Err(CliError::Other(format!("{} has an unexpected header", path.display())));
        }
        for rec in reader.records() {
            let rec = rec.map_err(bad)?;
            for (metric, value) in header.iter().zip(rec.iter()).skip(4) {
                if !value.is_empty() {
                    node_rows.push([
                        graph.clone(),
                        algo.clone(),
                        rec[0].to_owned(),
                        rec[1].to_owned(),
                        rec[2].to_owned(),
                        rec[3].to_owned(),
                        metric.clone(),
                        value.to_owned(),
                    ]);
                }
            }
        }
    }
    write_atomic(&layout.node_report(), |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(NODE_REPORT_HEADER.split(','))?;
        for r in &node_rows {
            out.write_record(r)?;
        }
        out.flush()
    })
}
