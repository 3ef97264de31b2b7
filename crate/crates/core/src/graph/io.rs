//! Text formats for graphs: `u v` edge lists (0-indexed, one pair per line)
//! and symmetric 0/1 adjacency CSVs.

use super::{adjacency_from_edges, DecomposableGraph};
use crate::{Error, Result};

/// Parses an edge list. Blank lines and `#` comments are skipped. Without an
/// explicit vertex count the graph spans `0..=max index`.
pub fn parse_edge_list(text: &str, num_vertices: Option<usize>) -> Result<DecomposableGraph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!(
                "line {}: expected two vertex indices",
                lineno + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {}: bad vertex index {s:?}", lineno + 1)))
        };
        edges.push((parse(fields[0])?, parse(fields[1])?));
    }
    let q = num_vertices.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    });
    DecomposableGraph::from_adjacency(adjacency_from_edges(q, &edges)?)
}

/// Parses a square symmetric 0/1 adjacency matrix (comma separated, no header).
pub fn parse_adjacency_csv(text: &str) -> Result<DecomposableGraph> {
    let rows: Vec<Vec<u8>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(r, line)| {
            line.split(',')
                .enumerate()
                .map(|(c, cell)| match cell.trim() {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::Parse(format!(
                        "row {}, column {}: expected 0 or 1, got {other:?}",
                        r + 1,
                        c + 1
                    ))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let q = rows.len();
    let mut edges = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != q {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {q}",
                i + 1,
                row.len()
            )));
        }
        for j in 0..q {
            if row[j] != rows[j][i] {
                return Err(Error::Parse(format!("adjacency not symmetric at ({i}, {j})")));
            }
            if j > i && row[j] == 1 {
                edges.push((i, j));
            }
        }
    }
    DecomposableGraph::from_edges(q, &edges)
}

pub fn write_edge_list(graph: &DecomposableGraph) -> String {
    graph
        .edges()
        .into_iter()
        .map(|(u, v)| format!("{u} {v}\n"))
        .collect()
}
