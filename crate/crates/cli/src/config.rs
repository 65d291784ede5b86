//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use nestab_core::downstream::ClassifierParams;
use nestab_core::embed::{HopeConfig, LineConfig, Node2vecConfig};
use nestab_core::geometry::Measure;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Graph sizes of the size sweep: `1000 · 2^k`, `k = 0..6`.
pub fn default_sweep_sizes() -> Vec<usize> {
    (0..7).map(|k| 1000 << k).collect()
}

pub fn default_sweep_densities() -> Vec<f64> {
    vec![0.00025, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub base_seed: u64,
    /// Worker threads; the machine's parallelism when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub graph: GraphSection,
    #[serde(default)]
    pub embed: EmbedSection,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub downstream: DownstreamSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    /// Edge list to load; exclusive with `generator`.
    pub path: Option<PathBuf>,
    pub directed: bool,
    pub weighted: bool,
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    BarabasiAlbert,
    WattsStrogatz,
    PlantedPartition,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::BarabasiAlbert => "barabasi_albert",
            Model::WattsStrogatz => "watts_strogatz",
            Model::PlantedPartition => "planted_partition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    None,
    Size,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub density: f64,
    pub rewire_p: f64,
    pub sweep: Sweep,
    /// Sizes of a size sweep, run at `density`.
    pub sizes: Vec<usize>,
    /// Densities of a density sweep, run at `density_sweep_n` nodes.
    pub densities: Vec<f64>,
    pub density_sweep_n: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            model: Model::WattsStrogatz,
            n: 1000,
            density: 0.01,
            rewire_p: 0.1,
            sweep: Sweep::None,
            sizes: default_sweep_sizes(),
            densities: default_sweep_densities(),
            density_sweep_n: 8000,
            blocks: 4,
            p_in: 0.1,
            p_out: 0.005,
        }
    }
}

/// One graph of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub name: String,
    pub n: usize,
    pub density: f64,
}

impl GeneratorSpec {
    pub fn points(&self) -> Vec<SweepPoint> {
        let point = |n: usize, density: f64| SweepPoint {
            name: match self.model {
                Model::PlantedPartition => format!("{}_n{n}_b{}", self.model.name(), self.blocks),
                _ => format!("{}_n{n}_d{density}", self.model.name()),
            },
            n,
            density,
        };
        match self.sweep {
            Sweep::None => vec![point(self.n, self.density)],
            Sweep::Size => self.sizes.iter().map(|&n| point(n, self.density)).collect(),
            Sweep::Density => self.densities.iter().map(|&d| point(self.density_sweep_n, d)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedSection {
    pub algorithm: String,
    pub dim: usize,
    pub runs: usize,
    pub hope: HopeConfig,
    pub node2vec: Node2vecConfig,
    pub line: LineConfig,
    /// Write `.emb` files in the binary format instead of text.
    pub binary: bool,
    /// Runs that take longer are recorded as failed and not written.
    pub timeout_secs: Option<f64>,
}

impl Default for EmbedSection {
    fn default() -> Self {
        Self {
            algorithm: "node2vec".into(),
            dim: 128,
            runs: 30,
            binary: false,
            timeout_secs: None,
            hope: HopeConfig::default(),
            node2vec: Node2vecConfig::default(),
            line: LineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub measures: Vec<Measure>,
    pub k: usize,
    pub center: bool,
    /// Node pairs sampled per hop-distance category.
    pub angle_samples: usize,
    pub window_fraction: f64,
    /// Directory of externally computed `.emb` files to compare instead of
    /// the native runs.
    pub external_dir: Option<PathBuf>,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            measures: Measure::ALL.to_vec(),
            k: 20,
            center: false,
            angle_samples: 1000,
            window_fraction: 0.01,
            external_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DownstreamSection {
    /// Label file; planted-partition graphs bring their own labels.
    pub labels: Option<PathBuf>,
    pub multi_label: bool,
    pub train_fraction: f64,
    pub sample_count: usize,
    pub reps: usize,
    pub folds: usize,
    pub cv_reps: usize,
    pub classifier: ClassifierParams,
}

impl Default for DownstreamSection {
    fn default() -> Self {
        Self {
            labels: None,
            multi_label: false,
            train_fraction: 0.75,
            sample_count: 5,
            reps: 10,
            folds: 10,
            cv_reps: 10,
            classifier: ClassifierParams::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses, applies overrides, makes relative paths relative to the
    /// config file's directory and validates.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base, overrides)
    }

    pub fn from_toml(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        if let Some(seed) = overrides.seed {
            cfg.base_seed = seed;
        }
        if let Some(w) = overrides.workers {
            cfg.workers = Some(w);
        }
        if let Some(out) = &overrides.out {
            cfg.out = out.clone();
        }
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if overrides.out.is_none() {
            rebase(&mut cfg.out);
        }
        if let Some(p) = cfg.graph.path.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.compare.external_dir.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.downstream.labels.as_mut() {
            rebase(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        match (&self.graph.path, &self.graph.generator) {
            (Some(_), Some(_)) => return bad("set either graph.path or graph.generator, not both".into()),
            (None, None) => return bad("set graph.path or graph.generator".into()),
            (Some(p), None) if !p.is_file() => return bad(format!("graph file {} does not exist", p.display())),
            (None, Some(g)) => {
                if g.model == Model::PlantedPartition && g.sweep != Sweep::None {
                    return bad("planted_partition graphs do not support sweeps".into());
                }
                if g.model != Model::WattsStrogatz && g.rewire_p != GeneratorSpec::default().rewire_p {
                    log::warn!("rewire_p only applies to watts_strogatz");
                }
            }
            _ => {}
        }
        if self.embed.dim == 0 {
            return bad("embed.dim must be positive".into());
        }
        if self.embed.runs < 2 {
            return bad(format!("embed.runs must be at least 2 to compare runs, got {}", self.embed.runs));
        }
        if self.compare.k == 0 {
            return bad("compare.k must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if let Some(p) = &self.downstream.labels {
            if !p.is_file() {
                return bad(format!("label file {} does not exist", p.display()));
            }
        }
        if let Some(p) = &self.compare.external_dir {
            if !p.is_dir() {
                return bad(format!("external embedding directory {} does not exist", p.display()));
            }
        }
        self.embed.node2vec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Run `i` uses seed `base_seed + i`.
    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.embed.runs as u64).map(|i| self.base_seed + i).collect()
    }

    /// Digest of the settings that determine the embedding files.
    pub fn embed_digest(&self) -> String {
        let v = serde_json::json!({
            "base_seed": self.base_seed,
            "graph": self.graph,
            "embed": self.embed,
        });
        sha256_hex(&serde_json::to_vec(&v).expect("config serializes"))
    }

    /// SHA-256 of the resolved settings that influence results (everything
    /// except the output directory and worker count).
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("out");
            obj.remove("workers");
        }
        sha256_hex(&serde_json::to_vec(&v).expect("config serializes"))
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_toml(text, Path::new("/tmp"), &Overrides::default())
    }

    const MINIMAL: &str = "schema_version = 1\n[graph.generator]\nmodel = \"watts_strogatz\"\n";

    #[test]
    fn defaults_are_filled_in() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.embed.dim, 128);
        assert_eq!(c.embed.runs, 30);
        assert_eq!(c.compare.k, 20);
        assert_eq!(c.compare.angle_samples, 1000);
        assert_eq!(c.downstream.sample_count, 5);
        assert_eq!(c.downstream.reps, 10);
        assert_eq!(c.out, PathBuf::from("/tmp/out"));
        assert_eq!(c.run_seeds().len(), 30);
    }

    #[test]
    fn sweeps_follow_the_defaults() {
        let mut g = GeneratorSpec {
            sweep: Sweep::Size,
            ..Default::default()
        };
        let sizes: Vec<usize> = g.points().iter().map(|p| p.n).collect();
        assert_eq!(sizes, vec![1000, 2000, 4000, 8000, 16000, 32000, 64000]);
        g.sweep = Sweep::Density;
        let pts = g.points();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| p.n == 8000));
        assert_eq!(pts[0].name, "watts_strogatz_n8000_d0.00025");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(parse("schema_version = 2\n[graph.generator]\n").is_err());
        assert!(parse("schema_version = 1\n[graph]\n").is_err());
        assert!(parse(&format!("{MINIMAL}[embed]\nruns = 1\n")).is_err());
        assert!(parse(&format!("{MINIMAL}[embed]\nbogus = 1\n")).is_err());
        assert!(parse(&format!("{MINIMAL}[embed.node2vec]\np = -1.0\n")).is_err());
        assert!(parse("schema_version = 1\n[graph]\npath = \"does/not/exist.txt\"\n").is_err());
    }

    #[test]
    fn overrides_win_and_digest_ignores_workers() {
        let o = Overrides {
            seed: Some(42),
            workers: Some(3),
            out: Some(PathBuf::from("elsewhere")),
        };
        let c = ExperimentConfig::from_toml(MINIMAL, Path::new("/tmp"), &o).unwrap();
        assert_eq!((c.base_seed, c.workers), (42, Some(3)));
        assert_eq!(c.out, PathBuf::from("elsewhere"));
        let mut d = c.clone();
        d.workers = Some(1);
        assert_eq!(c.digest(), d.digest());
        d.base_seed = 1;
        assert_ne!(c.digest(), d.digest());
    }
}
