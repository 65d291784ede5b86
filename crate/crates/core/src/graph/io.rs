use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Graph, GraphBuilder};
use crate::{Error, Result};

/// Counts of input lines that did not become distinct edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Reads a whitespace-separated edge list.
///
/// Node tokens are arbitrary strings, remapped to dense ids in order of first
/// appearance. Lines starting with `#` and blank lines are skipped. Duplicate
/// edges collapse into one edge whose weight is the sum; self-loops are
/// dropped and counted.
pub fn load_edge_list<R: BufRead>(src: R, directed: bool, weighted: bool) -> Result<(Graph, IngestStats)> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let (edges, lines) = read_edges(src, weighted, |tok, _| {
        if let Some(&id) = ids.get(tok) {
            return Ok(id);
        }
        let id = names.len();
        ids.insert(tok.to_owned(), id);
        names.push(tok.to_owned());
        Ok(id)
    })?;
    let n = names.len();
    build(GraphBuilder::new(n, directed).with_names(names), edges, lines)
}

/// Reads an edge list whose tokens are already node ids in `0..node_count`,
/// keeping them as they are (isolated nodes included).
pub fn load_edge_list_dense<R: BufRead>(src: R, node_count: usize, directed: bool, weighted: bool) -> Result<(Graph, IngestStats)> {
    let (edges, lines) = read_edges(src, weighted, |tok, lineno| match tok.parse::<usize>() {
        Ok(id) if id < node_count => Ok(id),
        _ => Err(Error::parse(lineno, format!("node {tok:?} is not an id below {node_count}"))),
    })?;
    build(GraphBuilder::new(node_count, directed), edges, lines)
}

type Edges = Vec<(usize, usize, f64)>;

fn read_edges<R: BufRead>(src: R, weighted: bool, mut resolve: impl FnMut(&str, usize) -> Result<usize>) -> Result<(Edges, usize)> {
    let mut edges = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let w = match (fields.len(), weighted) {
            (2, _) => 1.0,
            (3, true) => {
                let w: f64 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("non-numeric weight {:?}", fields[2])))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::parse(lineno, format!("weight must be positive and finite, got {w}")));
                }
                w
            }
            (n, true) => return Err(Error::parse(lineno, format!("expected 2 or 3 fields, found {n}"))),
            (n, false) => return Err(Error::parse(lineno, format!("expected 2 fields, found {n}"))),
        };
        let u = resolve(fields[0], lineno)?;
        let v = resolve(fields[1], lineno)?;
        edges.push((u, v, w));
    }
    let lines = edges.len();
    Ok((edges, lines))
}

fn build(mut b: GraphBuilder, edges: Edges, lines: usize) -> Result<(Graph, IngestStats)> {
    for (u, v, w) in edges {
        b.add_edge(u, v, w);
    }
    let (g, built) = b.build();
    let stats = IngestStats {
        lines,
        self_loops: built.self_loops,
        duplicates: built.duplicates,
    };
    if stats.self_loops > 0 {
        log::warn!("dropped {} self-loop(s) while reading edge list", stats.self_loops);
    }
    Ok((g, stats))
}

/// Writes one line per edge, `u v` or `u v w` when any weight differs from 1.
///
/// Isolated nodes cannot be represented and are lost on reload.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    let weighted = g.arcs().any(|(_, _, w)| w != 1.0);
    writeln!(out, "# nodes {} edges {} directed {}", g.node_count(), g.edge_count(), g.is_directed())?;
    for (u, v, w) in g.edges() {
        if weighted {
            writeln!(out, "{} {} {}", g.node_name(u), g.node_name(v), w)?;
        } else {
            writeln!(out, "{} {}", g.node_name(u), g.node_name(v))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str, directed: bool, weighted: bool) -> Result<(Graph, IngestStats)> {
        load_edge_list(s.as_bytes(), directed, weighted)
    }

    #[test]
    fn dense_ids_are_kept() {
        let (g, _) = load_edge_list_dense("# nodes 4\n2 1\n1 0\n".as_bytes(), 4, false, false).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.degree(3), 0);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(load_edge_list_dense("0 4\n".as_bytes(), 4, false, false).is_err());
        assert!(load_edge_list_dense("0 a\n".as_bytes(), 4, false, false).is_err());
    }

    #[test]
    fn path_graph() {
        let (g, _) = load("0 1\n1 2\n", false, false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicates_sum_weights() {
        let (g, stats) = load("a b 2\na b 3\n", false, true).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbor_weights(0), &[5.0]);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(g.node_name(1), "b");
    }

    #[test]
    fn self_loops_are_dropped() {
        let (g, stats) = load("0 0\n0 1\n", false, false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn first_appearance_order() {
        let (g, _) = load("# header\n\nz y\ny x\n", false, false).unwrap();
        assert_eq!(g.names().unwrap(), &["z", "y", "x"]);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match load("0 1\n1 2 3 4\n", false, true) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match load("0 1\n0 2 x\n", false, true) {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("non-numeric")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0 1 -1\n", false, true), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0 1 0\n", false, true), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0 1 2\n", false, false), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0\n", false, false), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn write_then_load_round_trips() {
        let (g, _) = load("a b 2.5\nb c 1\nc a 4\n", false, true).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let (h, _) = load_edge_list(buf.as_slice(), false, true).unwrap();
        assert_eq!(g, h);
    }
}
