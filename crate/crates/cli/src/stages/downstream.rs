use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use nestab_core::downstream::{cross_validate, make_split, stability_experiment, ClassifierParams, SplitSpec, StableCoreReport};
use nestab_core::embed::{load_embedding, Embedding};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::native_algorithm;
use crate::config::ExperimentConfig;
use crate::graphs::{graph_names, load_graph, load_graph_labels, GraphRecord};
use crate::layout::{fmt_f64, write_atomic, write_json, Layout};
use crate::manifest::{JobRecord, StageLog};
use crate::CliError;

pub const F1_CSV_HEADER: &str = "embedding_seed,split_micro_f1,cv_mean_micro_f1,cv_stdev_micro_f1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub embedding_seed: u64,
    pub mean: f64,
    pub stdev: f64,
}

/// Contents of `stable_core.json`; the stable-core report fields sit at the
/// top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DownstreamSummary {
    pub graph: GraphRecord,
    pub algorithm: String,
    pub classifier: ClassifierParams,
    pub sample_count: usize,
    pub reps: usize,
    pub folds: usize,
    pub cv_reps: usize,
    #[serde(flatten)]
    pub report: StableCoreReport,
    pub cross_validation: Vec<CvSummary>,
    pub split: SplitSpec,
}

pub fn run_downstream(cfg: &ExperimentConfig, workers: usize) -> Result<(), CliError> {
    let algo = native_algorithm(&cfg.embed.algorithm)?;
    let layout = Layout::new(&cfg.out);
    let ds = &cfg.downstream;
    let mut log = StageLog::start("downstream");
    for name in graph_names(cfg) {
        let t = Instant::now();
        let loaded = match load_graph(cfg, &layout, &name) {
            Ok(l) => l,
            Err(e) => {
                log.record(JobRecord::failed(&name, &e, 0.0));
                continue;
            }
        };
        // a missing label source is a configuration problem, not a job failure
        let labels = load_graph_labels(cfg, &layout, &loaded)?;
        let result = (|| {
            let seeds: Vec<u64> = cfg
                .run_seeds()
                .into_iter()
                .filter(|&s| layout.embedding_file(&name, algo.name(), s).is_file())
                .collect();
            let runs: Vec<Embedding> = seeds
                .par_iter()
                .map(|&s| {
                    let p = layout.embedding_file(&name, algo.name(), s);
                    let f = File::open(&p).map_err(|e| CliError::io(&p, e))?;
                    load_embedding(BufReader::new(f), Some(loaded.graph.node_count()), s)
                        .map_err(|e| CliError::Other(format!("{}: {e}", p.display())))
                })
                .collect::<Result<_, CliError>>()?;
            let split = make_split(&labels, ds.train_fraction, cfg.base_seed)?;
            let report = stability_experiment(&runs, &labels, &split, &ds.classifier, ds.sample_count, ds.reps, cfg.base_seed)?;
            let cv: Vec<CvSummary> = runs
                .par_iter()
                .map(|e| {
                    let c = cross_validate(e, &labels, &ds.classifier, ds.folds, ds.cv_reps, cfg.base_seed)?;
                    Ok(CvSummary {
                        embedding_seed: e.seed,
                        mean: c.mean,
                        stdev: c.stdev,
                    })
                })
                .collect::<Result<_, CliError>>()?;
            let summary = DownstreamSummary {
                graph: loaded.record.clone(),
                algorithm: algo.name().into(),
                classifier: ds.classifier,
                sample_count: ds.sample_count,
                reps: ds.reps,
                folds: ds.folds,
                cv_reps: ds.cv_reps,
                report,
                cross_validation: cv,
                split,
            };
            let dir = layout.downstream_dir(&name, algo.name());
            write_atomic(&dir.join("f1.csv"), |w| {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(F1_CSV_HEADER.split(','))?;
                let report = &summary.report;
                let rows = report.mode_ii.embedding_seeds.iter().zip(&report.f1_distribution).zip(&summary.cross_validation);
                for ((seed, f1), cv) in rows {
                    out.write_record([seed.to_string(), fmt_f64(*f1), fmt_f64(cv.mean), fmt_f64(cv.stdev)])?;
                }
                out.flush()
            })?;
            write_json(&dir.join("stable_core.json"), &summary)?;
            log::info!(
                "{name}/{}: F1 {:.4} ± {:.4}, stable core (i) {:.4}, (ii) {:.4}",
                algo.name(),
                summary.report.f1_mean,
                summary.report.f1_stdev,
                summary.report.mode_i.mean,
                summary.report.mode_ii.stable_core
            );
            Ok::<_, CliError>(())
        })();
        match result {
            Ok(()) => log.record(JobRecord::ok(&name, t.elapsed().as_secs_f64())),
            Err(e) => log.record(JobRecord::failed(&name, &e, t.elapsed().as_secs_f64())),
        }
        log.graphs.push(loaded.record);
    }
    log.finish(cfg, &layout, workers)
}
