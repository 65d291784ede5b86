//! Where each stage reads and writes, plus atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn graphs_dir(&self) -> PathBuf {
        self.root.join("graphs")
    }

    pub fn graph_edges(&self, graph: &str) -> PathBuf {
        self.graphs_dir().join(format!("{graph}.edges"))
    }

    pub fn graph_record(&self, graph: &str) -> PathBuf {
        self.graphs_dir().join(format!("{graph}.json"))
    }

    pub fn graph_labels(&self, graph: &str) -> PathBuf {
        self.graphs_dir().join(format!("{graph}.labels"))
    }

    pub fn embeddings_dir(&self, graph: &str) -> PathBuf {
        self.root.join("embeddings").join(graph)
    }

    pub fn embedding_file(&self, graph: &str, algo: &str, seed: u64) -> PathBuf {
        self.embeddings_dir(graph).join(format!("{algo}_{seed}.emb"))
    }

    pub fn compare_root(&self) -> PathBuf {
        self.root.join("compare")
    }

    pub fn compare_dir(&self, graph: &str, algo: &str) -> PathBuf {
        self.compare_root().join(graph).join(algo)
    }

    pub fn downstream_root(&self) -> PathBuf {
        self.root.join("downstream")
    }

    pub fn downstream_dir(&self, graph: &str, algo: &str) -> PathBuf {
        self.downstream_root().join(graph).join(algo)
    }

    pub fn manifest(&self, stage: &str) -> PathBuf {
        self.root.join("manifests").join(format!("{stage}.json"))
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.csv")
    }

    pub fn node_report(&self) -> PathBuf {
        self.root.join("report_nodes.csv")
    }
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let file = fs::File::create(&tmp)?;
        let mut w = std::io::BufWriter::new(file);
        fill(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

/// Shortest round-tripping decimal rendering, used for every float in CSVs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b/c.txt");
        write_atomic(&p, |w| w.write_all(b"hello")).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "hello");
        let failed = write_atomic(&p, |_| Err(std::io::Error::other("boom")));
        assert!(failed.is_err());
        assert_eq!(fs::read_to_string(&p).unwrap(), "hello");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn float_rendering_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_opt(None), "");
    }
}
