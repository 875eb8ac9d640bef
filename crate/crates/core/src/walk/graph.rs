use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite connected simple undirected graph on vertices 0..V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    /// Sorted, each pair stored as (min, max).
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph: no self-loops, no duplicate edges,
    /// connected, every vertex of degree at least one.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least 2 vertices, got {vertices}"
            )));
        }
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        if let Some(v) = adjacency.iter().position(Vec::is_empty) {
            return Err(Error::InvalidGraph(format!("vertex {v} is isolated")));
        }
        let graph = Self {
            vertices,
            edges: normalized,
            adjacency,
        };
        let reached = graph.reachable_from(0);
        if reached < vertices {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected: only {reached} of {vertices} vertices reachable from 0"
            )));
        }
        Ok(graph)
    }

    fn reachable_from(&self, start: usize) -> usize {
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    /// The m-cycle 0 – 1 – … – (m−1) – 0.
    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidGraph(format!("a cycle needs m ≥ 3, got {m}")));
        }
        Self::new(m, (0..m).map(|i| (i, (i + 1) % m)))
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    pub fn complete(k: usize) -> Result<Self> {
        Self::new(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))
    }

    pub fn path(k: usize) -> Result<Self> {
        Self::new(k, (1..k).map(|i| (i - 1, i)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// The same graph with vertex v renamed to `relabel[v]`.
    pub fn relabeled(&self, relabel: &[usize]) -> Result<Self> {
        if relabel.len() != self.vertices {
            return Err(Error::LengthMismatch {
                expected: self.vertices,
                actual: relabel.len(),
            });
        }
        Self::new(
            self.vertices,
            self.edges.iter().map(|&(u, v)| (relabel[u], relabel[v])),
        )
    }
}

/// Text format: first line `V E`, then E lines `u v` (0-indexed).
/// Blank lines and lines starting with `#` are ignored.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `V E` header".into(),
        })?;
        let [vertices, edge_count] = parse_pair(line, header)?;
        let mut edges = Vec::with_capacity(edge_count);
        for (line, body) in lines {
            edges.push(parse_pair(line, body).map(|[u, v]| (u, v))?);
        }
        if edges.len() != edge_count {
            return Err(Error::Parse {
                line,
                message: format!("header declares {edge_count} edges, found {}", edges.len()),
            });
        }
        Graph::new(vertices, edges)
    }
}

fn parse_pair(line: usize, body: &str) -> Result<[usize; 2]> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line,
            message: format!("expected two integers, got `{body}`"),
        });
    }
    let parse = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line,
            message: format!("`{s}`: {e}"),
        })
    };
    Ok([parse(fields[0])?, parse(fields[1])?])
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.vertices, self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(Graph::new(3, [(0, 0), (1, 2)]), Err(Error::InvalidGraph(_))));
        assert!(Graph::new(3, [(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(Graph::new(4, [(0, 1), (2, 3)]).is_err());
        assert!(Graph::new(3, [(0, 1)]).is_err());
        assert!(Graph::new(2, [(0, 5)]).is_err());
        assert!(Graph::cycle(2).is_err());
    }

    #[test]
    fn parses_text_format() {
        let g: Graph = "4 4\n0 1\n1 2\n# comment\n2 3\n3 0\n".parse().unwrap();
        assert_eq!(g, Graph::cycle(4).unwrap());
        assert_eq!(g.to_string().parse::<Graph>().unwrap(), g);
        let err = "3 3\n0 1\n1 2\n".parse::<Graph>().unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = "3 2\n0 1\n1 x\n".parse::<Graph>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!("3 2\n0 1\n0 1\n".parse::<Graph>().is_err());
    }

    #[test]
    fn degrees() {
        let s = Graph::star(3).unwrap();
        assert_eq!(s.degree(0), 3);
        assert_eq!(s.degree(2), 1);
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
    }
}
