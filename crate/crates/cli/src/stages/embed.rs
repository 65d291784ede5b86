use std::collections::HashSet;
use std::time::Instant;

use nestab_core::embed::{hope_embed, line_embed, node2vec_embed, save_embedding, save_embedding_binary, Algorithm, Embedding};
use nestab_core::graph::Graph;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::graphs::{graph_names, load_graph};
use crate::layout::{write_atomic, Layout};
use crate::manifest::{JobRecord, JobStatus, RunManifest, StageLog};
use crate::CliError;

/// The algorithms this tool can train itself.
pub fn native_algorithm(name: &str) -> Result<Algorithm, CliError> {
    match name.parse::<Algorithm>() {
        Ok(a) if a != Algorithm::External => Ok(a),
        _ => Err(CliError::Config(format!(
            "unknown algorithm {name:?}: embed supports hope, node2vec and line; \
             embeddings computed by other tools can be compared with `nestab compare --external-dir <dir>`"
        ))),
    }
}

pub fn embed_one(cfg: &ExperimentConfig, algo: Algorithm, g: &Graph, seed: u64) -> Result<Embedding, CliError> {
    let d = cfg.embed.dim;
    let e = match algo {
        Algorithm::Hope => hope_embed(g, d, &cfg.embed.hope, seed)?,
        Algorithm::Node2vec => node2vec_embed(g, d, &cfg.embed.node2vec, seed)?,
        Algorithm::Line => line_embed(g, d, &cfg.embed.line, seed)?,
        Algorithm::External => unreachable!("rejected by native_algorithm"),
    };
    Ok(e)
}

/// Jobs of an earlier embed manifest with the same embedding settings whose
/// files can be kept.
fn reusable_jobs(cfg: &ExperimentConfig, layout: &Layout) -> HashSet<String> {
    let Ok(text) = std::fs::read_to_string(layout.manifest("embed")) else {
        return HashSet::new();
    };
    match serde_json::from_str::<RunManifest>(&text) {
        Ok(m) if m.embed_digest == cfg.embed_digest() => m
            .jobs
            .into_iter()
            .filter(|j| j.status != JobStatus::Failed)
            .map(|j| j.id)
            .collect(),
        _ => HashSet::new(),
    }
}

/// Trains `runs` embeddings per graph, run `i` with seed `base_seed + i`.
/// Failed runs are recorded and the others still written.
pub fn run_embed(cfg: &ExperimentConfig, workers: usize) -> Result<(), CliError> {
    let algo = native_algorithm(&cfg.embed.algorithm)?;
    let layout = Layout::new(&cfg.out);
    let reusable = reusable_jobs(cfg, &layout);
    let mut log = StageLog::start("embed");
    for name in graph_names(cfg) {
        let loaded = match load_graph(cfg, &layout, &name) {
            Ok(l) => l,
            Err(e) => {
                log.record(JobRecord::failed(&name, &e, 0.0));
                continue;
            }
        };
        let jobs: Vec<JobRecord> = cfg
            .run_seeds()
            .into_par_iter()
            .map(|seed| {
                let id = format!("{name}/{}_{seed}", algo.name());
                let path = layout.embedding_file(&name, algo.name(), seed);
                if reusable.contains(&id) && path.is_file() {
                    return JobRecord {
                        id,
                        status: JobStatus::Reused,
                        error: None,
                        seconds: 0.0,
                    };
                }
                let t = Instant::now();
                let result = embed_one(cfg, algo, &loaded.graph, seed).and_then(|e| {
                    let secs = t.elapsed().as_secs_f64();
                    if let Some(limit) = cfg.embed.timeout_secs.filter(|&l| secs > l) {
                        return Err(CliError::Other(format!("run took {secs:.1} s, over the {limit} s limit")));
                    }
                    write_atomic(&path, |w| {
                        let r = if cfg.embed.binary { save_embedding_binary(&e, w) } else { save_embedding(&e, w) };
                        r.map_err(std::io::Error::other)
                    })
                });
                let secs = t.elapsed().as_secs_f64();
                match result {
                    Ok(()) => {
                        log::info!("wrote {} in {secs:.1} s", path.display());
                        JobRecord::ok(id, secs)
                    }
                    Err(e) => JobRecord::failed(id, &e, secs),
                }
            })
            .collect();
        log.graphs.push(loaded.record);
        for j in jobs {
            log.record(j);
        }
    }
    log.finish(cfg, &layout, workers)
}
