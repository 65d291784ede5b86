//! Graph sources: generated sweep points or a single edge-list file.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use nestab_core::graph::{
    generate_barabasi_albert, generate_planted_partition, generate_watts_strogatz, load_edge_list, load_edge_list_dense,
    load_labels, write_edge_list, GeneratorInfo, Graph, NodeLabels,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, GeneratorSpec, Model, SweepPoint};
use crate::layout::{read_json, write_atomic, write_json, Layout};
use crate::CliError;

/// Everything needed to identify a graph and rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub weighted: bool,
    pub digest: String,
    pub source: GraphSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    Generated {
        info: GeneratorInfo,
        /// Planted-partition edge probabilities.
        p_in: Option<f64>,
        p_out: Option<f64>,
    },
}

impl GraphRecord {
    pub fn model(&self) -> &str {
        match &self.source {
            GraphSource::File { .. } => "file",
            GraphSource::Generated { info, .. } => &info.model,
        }
    }

    pub fn target_density(&self) -> Option<f64> {
        match &self.source {
            GraphSource::Generated { info, .. } => Some(info.target_density),
            GraphSource::File { .. } => None,
        }
    }

    pub fn realized_density(&self) -> f64 {
        let n = self.node_count as f64;
        let pairs = if self.directed { n * (n - 1.0) } else { n * (n - 1.0) / 2.0 };
        if pairs > 0.0 {
            self.edge_count as f64 / pairs
        } else {
            0.0
        }
    }
}

pub struct LoadedGraph {
    pub record: GraphRecord,
    pub graph: Graph,
}

/// Names of the graphs a config refers to, in sweep order.
pub fn graph_names(cfg: &ExperimentConfig) -> Vec<String> {
    match (&cfg.graph.generator, &cfg.graph.path) {
        (Some(g), _) => g.points().into_iter().map(|p| p.name).collect(),
        (None, Some(p)) => vec![file_graph_name(p)],
        (None, None) => Vec::new(),
    }
}

fn file_graph_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph")
        .to_owned()
}

fn record_for(name: &str, g: &Graph, weighted: bool, source: GraphSource) -> GraphRecord {
    GraphRecord {
        name: name.to_owned(),
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        directed: g.is_directed(),
        weighted,
        digest: g.digest(),
        source,
    }
}

/// Builds one sweep point. Planted-partition graphs also return labels.
pub fn generate_point(
    spec: &GeneratorSpec,
    point: &SweepPoint,
    seed: u64,
) -> Result<(Graph, GraphRecord, Option<NodeLabels>), CliError> {
    let (g, info, labels, p) = match spec.model {
        Model::BarabasiAlbert => {
            let (g, info) = generate_barabasi_albert(point.n, point.density, seed)?;
            (g, info, None, None)
        }
        Model::WattsStrogatz => {
            let (g, info) = generate_watts_strogatz(point.n, point.density, spec.rewire_p, seed)?;
            (g, info, None, None)
        }
        Model::PlantedPartition => {
            let (g, labels) = generate_planted_partition(point.n, spec.blocks, spec.p_in, spec.p_out, seed)?;
            let n = point.n as f64;
            let b = spec.blocks as f64;
            // expected density from the block probabilities
            let same = n * (n / b - 1.0) / 2.0;
            let all = n * (n - 1.0) / 2.0;
            let expected = if all > 0.0 { (spec.p_in * same + spec.p_out * (all - same)) / all } else { 0.0 };
            let info = GeneratorInfo {
                model: Model::PlantedPartition.name().to_owned(),
                n: point.n,
                target_density: expected,
                resolved_param: spec.blocks,
                rewire_p: None,
                realized_density: g.density(),
                edge_count: g.edge_count(),
                seed,
            };
            (g, info, Some(labels), Some((spec.p_in, spec.p_out)))
        }
    };
    let source = GraphSource::Generated {
        info,
        p_in: p.map(|p| p.0),
        p_out: p.map(|p| p.1),
    };
    let record = record_for(&point.name, &g, false, source);
    Ok((g, record, labels))
}

pub fn write_graph(layout: &Layout, g: &Graph, record: &GraphRecord, labels: Option<&NodeLabels>) -> Result<(), CliError> {
    write_atomic(&layout.graph_edges(&record.name), |w| write_edge_list(g, w))?;
    if let Some(labels) = labels {
        write_atomic(&layout.graph_labels(&record.name), |w| {
            for u in 0..labels.node_count() {
                let ls = labels.labels_of(u);
                if ls.is_empty() {
                    continue;
                }
                write!(w, "{u}")?;
                for l in ls {
                    write!(w, " {l}")?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
    }
    write_json(&layout.graph_record(&record.name), record)
}

/// Loads a graph by name: generated graphs from the output directory, a
/// file source from its path.
pub fn load_graph(cfg: &ExperimentConfig, layout: &Layout, name: &str) -> Result<LoadedGraph, CliError> {
    if let Some(path) = &cfg.graph.path {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let (g, stats) = load_edge_list(BufReader::new(file), cfg.graph.directed, cfg.graph.weighted)?;
        if stats.duplicates > 0 {
            log::info!("{}: merged {} duplicate edge(s)", path.display(), stats.duplicates);
        }
        let record = record_for(name, &g, cfg.graph.weighted, GraphSource::File { path: path.clone() });
        return Ok(LoadedGraph { record, graph: g });
    }
    let record_path = layout.graph_record(name);
    let edges_path = layout.graph_edges(name);
    let missing: Vec<String> = [&record_path, &edges_path]
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::MissingInputs(missing));
    }
    let record: GraphRecord = read_json(&record_path)?;
    let file = File::open(&edges_path).map_err(|e| CliError::io(&edges_path, e))?;
    let (g, _) = load_edge_list_dense(BufReader::new(file), record.node_count, record.directed, record.weighted)?;
    if g.digest() != record.digest {
        return Err(CliError::Other(format!(
            "{} does not match the digest recorded in {}",
            edges_path.display(),
            record_path.display()
        )));
    }
    Ok(LoadedGraph { record, graph: g })
}

/// Labels of a graph: the generated label file if there is one, otherwise
/// the configured label file.
pub fn load_graph_labels(cfg: &ExperimentConfig, layout: &Layout, loaded: &LoadedGraph) -> Result<NodeLabels, CliError> {
    let generated = layout.graph_labels(&loaded.record.name);
    let path = if generated.is_file() {
        generated
    } else if let Some(p) = &cfg.downstream.labels {
        p.clone()
    } else {
        return Err(CliError::MissingInputs(vec![format!(
            "labels for graph {} (set downstream.labels or use a planted_partition generator)",
            loaded.record.name
        )]));
    };
    let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
    Ok(load_labels(BufReader::new(file), cfg.downstream.multi_label, &loaded.graph)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_graphs_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let layout = Layout::new(dir.path());
        let spec = GeneratorSpec {
            model: Model::PlantedPartition,
            n: 40,
            blocks: 4,
            p_in: 0.5,
            p_out: 0.05,
            ..Default::default()
        };
        let point = &spec.points()[0];
        let (g, record, labels) = generate_point(&spec, point, 3).unwrap();
        write_graph(&layout, &g, &record, labels.as_ref()).unwrap();

        let text = format!(
            "schema_version = 1\nout = \"{}\"\n[graph.generator]\nmodel = \"planted_partition\"\nn = 40\n",
            dir.path().display()
        );
        let cfg = ExperimentConfig::from_toml(&text, dir.path(), &Default::default()).unwrap();
        let loaded = load_graph(&cfg, &layout, &point.name).unwrap();
        assert_eq!(loaded.graph, g);
        assert_eq!(loaded.record, record);
        let l = load_graph_labels(&cfg, &layout, &loaded).unwrap();
        assert_eq!(Some(&l), labels.as_ref());
        assert_eq!(record.model(), "planted_partition");
    }

    #[test]
    fn sparse_barabasi_albert_resolves_to_a_tree() {
        let spec = GeneratorSpec {
            model: Model::BarabasiAlbert,
            ..Default::default()
        };
        let point = SweepPoint {
            name: "ba".into(),
            n: 8000,
            density: 0.00025,
        };
        let (g, record, _) = generate_point(&spec, &point, 1).unwrap();
        match record.source {
            GraphSource::Generated { info, .. } => assert_eq!(info.resolved_param, 1),
            _ => unreachable!(),
        }
        assert_eq!(g.edge_count(), 7999);
    }

    #[test]
    fn missing_generated_graph_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_toml(
            "schema_version = 1\n[graph.generator]\nmodel = \"watts_strogatz\"\n",
            dir.path(),
            &Default::default(),
        )
        .unwrap();
        let layout = Layout::new(&cfg.out);
        let err = load_graph(&cfg, &layout, &graph_names(&cfg)[0]).err().unwrap();
        assert!(matches!(err, CliError::MissingInputs(ref v) if v.len() == 2));
    }
}
