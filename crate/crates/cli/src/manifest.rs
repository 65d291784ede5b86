//! Per-stage manifests: the only outputs that carry timestamps.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::graphs::GraphRecord;
use crate::layout::{write_json, Layout};
use crate::CliError;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Ok,
    Reused,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: String,
    pub status: JobStatus,
    pub error: Option<String>,
    pub seconds: f64,
}

impl JobRecord {
    pub fn ok(id: impl Into<String>, seconds: f64) -> Self {
        Self {
            id: id.into(),
            status: JobStatus::Ok,
            error: None,
            seconds,
        }
    }

    pub fn failed(id: impl Into<String>, error: &CliError, seconds: f64) -> Self {
        Self {
            id: id.into(),
            status: JobStatus::Failed,
            error: Some(error.to_string()),
            seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub stage: String,
    pub toolkit_version: String,
    pub config_digest: String,
    pub embed_digest: String,
    /// The resolved configuration, defaults filled in.
    pub config: ExperimentConfig,
    pub graphs: Vec<GraphRecord>,
    /// `base_seed + i` for run `i`.
    pub run_seeds: Vec<u64>,
    pub workers: usize,
    pub jobs: Vec<JobRecord>,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
}

/// Collects job outcomes for one stage and writes its manifest.
pub struct StageLog {
    stage: &'static str,
    started: Instant,
    started_unix: f64,
    pub graphs: Vec<GraphRecord>,
    pub jobs: Vec<JobRecord>,
}

impl StageLog {
    pub fn start(stage: &'static str) -> Self {
        Self {
            stage,
            started: Instant::now(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            graphs: Vec::new(),
            jobs: Vec::new(),
        }
    }

    pub fn record(&mut self, job: JobRecord) {
        if let Some(e) = &job.error {
            log::error!("{} {}: {e}", self.stage, job.id);
        }
        self.jobs.push(job);
    }

    /// Writes the manifest and turns failed jobs into a partial-failure error.
    pub fn finish(self, cfg: &ExperimentConfig, layout: &Layout, workers: usize) -> Result<(), CliError> {
        let failed: Vec<&JobRecord> = self.jobs.iter().filter(|j| j.status == JobStatus::Failed).collect();
        let summary = failed.iter().map(|j| j.id.as_str()).collect::<Vec<_>>().join(", ");
        let (failed, total) = (failed.len(), self.jobs.len());
        let manifest = RunManifest {
            stage: self.stage.to_owned(),
            toolkit_version: TOOLKIT_VERSION.to_owned(),
            config_digest: cfg.digest(),
            embed_digest: cfg.embed_digest(),
            config: cfg.clone(),
            graphs: self.graphs,
            run_seeds: cfg.run_seeds(),
            workers,
            jobs: self.jobs,
            started_unix_seconds: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        write_json(&layout.manifest(self.stage), &manifest)?;
        if failed > 0 {
            return Err(CliError::Partial { failed, total, summary });
        }
        Ok(())
    }
}
