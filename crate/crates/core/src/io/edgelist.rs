//! Whitespace-separated `src dst` edge lists with `#` comments.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Node ids are kept as strings and indexed in first-seen order.
pub fn parse_edge_list<'a>(text: &'a str) -> Result<DirectedGraph> {
    let mut index: HashMap<&'a str, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut arcs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `src dst`, found {} field(s)", tokens.len()),
            });
        }
        if tokens[0] == tokens[1] {
            return Err(Error::SelfLoop { line });
        }
        let mut node = |id: &'a str| -> usize {
            *index.entry(id).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            })
        };
        let (s, d) = (node(tokens[0]), node(tokens[1]));
        arcs.push((s, d));
    }
    DirectedGraph::with_ids(ids, arcs)
}

/// Writes one `src dst` line per arc.
///
/// Lines are ordered so that ids appear for the first time in index order
/// whenever the graph allows it (always for a graph that was itself read
/// from an edge list), which makes read → write → read exact.
pub fn write_edge_list<W: Write>(graph: &DirectedGraph, mut w: W) -> Result<()> {
    writeln!(w, "# {} nodes, {} arcs", graph.node_count(), graph.arc_count())?;
    let ids = graph.ids();
    let mut arcs: Vec<(usize, usize)> = graph.arcs().collect();
    // group by the larger endpoint; a node with no smaller neighbour is
    // introduced through its arc to the next node
    let key = |&(i, j): &(usize, usize)| {
        let (lo, hi) = (i.min(j), i.max(j));
        let opener = hi == lo + 1 && i == lo && !graph.neighbors(lo).any(|x| x < lo);
        if opener {
            (lo, 0, 0, 0)
        } else {
            (hi, 1, lo, usize::from(i != lo))
        }
    };
    arcs.sort_by_key(key);
    for (i, j) in arcs {
        writeln!(w, "{} {}", ids[i], ids[j])?;
    }
    Ok(())
}
