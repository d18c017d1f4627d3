//! Simple undirected graphs and the shared edge-list text format.
//!
//! The edge-list format has one edge per line, `i j` with 0-indexed node ids
//! separated by whitespace. Lines starting with `#` are comments, except a
//! header of the form `# n=<N>` which declares the node count; without it the
//! node count is the largest index plus one.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Simple undirected graph: sorted edge list plus compressed adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    /// Builds a graph from arbitrary pairs. Pairs are normalised to `i < j`
    /// and deduplicated; self-loops and out-of-range ids are rejected.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Self::from_edges_counting_duplicates(n, pairs)?.0)
    }

    /// Like [`Graph::from_edges`], also returning how many duplicate pairs
    /// were dropped.
    pub fn from_edges_counting_duplicates(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, usize)> {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            edges.push((i as u32, j as u32));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let duplicates = before - edges.len();
        Ok((Self::from_sorted_unique(n, edges), duplicates))
    }

    /// `edges` must be strictly increasing pairs with `i < j < n`.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(i, j)| i < j && (j as usize) < n));
        let mut degree = vec![0usize; n];
        for &(i, j) in &edges {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        // Row-major edge order fills each list in increasing order: lower
        // neighbours arrive while scanning earlier rows, higher ones in the
        // node's own row.
        for &(i, j) in &edges {
            neighbors[fill[i as usize]] = j;
            fill[i as usize] += 1;
            neighbors[fill[j as usize]] = i;
            fill[j as usize] += 1;
        }
        debug_assert!((0..n).all(|v| neighbors[offsets[v]..offsets[v + 1]]
            .windows(2)
            .all(|w| w[0] < w[1])));
        Graph {
            n,
            edges,
            offsets,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbour list of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }
}

/// Parsed contents of an edge-list file.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    /// Number of repeated edges (in either orientation) that were dropped.
    pub duplicates: usize,
    /// Whether the node count came from a `# n=` header.
    pub declared_n: bool,
}

fn parse_header(line: &str) -> Option<&str> {
    let body = line.trim_start_matches('#').trim();
    body.strip_prefix("n=")
        .or_else(|| body.strip_prefix("n ="))
        .map(str::trim)
}

/// Reads the shared edge-list format.
pub fn read_edge_list(reader: impl BufRead) -> Result<EdgeList> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut max_index: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if let Some(value) = parse_header(trimmed) {
                let n = value.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad node-count header {trimmed:?}"),
                })?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected two node ids".into(),
            })?;
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad node id {tok:?}"),
            })
        };
        let (a, b) = (next_id()?, next_id()?);
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "trailing fields after edge".into(),
            });
        }
        if a == b {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("self-loop at node {a}"),
            });
        }
        if let Some(n) = declared {
            if a.max(b) >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("node id {} exceeds declared n={n}", a.max(b)),
                });
            }
        }
        max_index = Some(max_index.map_or(a.max(b), |m: usize| m.max(a).max(b)));
        pairs.push((a, b));
    }
    let inferred = max_index.map_or(0, |m| m + 1);
    let n = declared.unwrap_or(inferred);
    if n < inferred {
        return Err(Error::Parse {
            line: 0,
            msg: format!("declared n={n} but node {} appears", inferred - 1),
        });
    }
    let (graph, duplicates) = Graph::from_edges_counting_duplicates(n, pairs)?;
    Ok(EdgeList {
        graph,
        duplicates,
        declared_n: declared.is_some(),
    })
}

/// Writes `g` in the shared edge-list format with a `# n=` header.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# n={}", g.n())?;
    for &(i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_consistent() {
        let g = Graph::from_edges(5, [(3, 1), (0, 1), (1, 2), (4, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 2), (1, 3)]);
        assert_eq!(g.neighbors(1), &[0, 2, 3]);
        assert_eq!(g.degrees(), vec![2, 3, 1, 1, 1]);
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        assert!(g.has_edge(3, 1) && !g.has_edge(2, 3));
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let (g, dup) = Graph::from_edges_counting_duplicates(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!((g.edge_count(), dup), (1, 2));
    }

    #[test]
    fn parse_and_write() {
        let el = read_edge_list("# comment\n# n=5\n0 1\n\n3 4\n".as_bytes()).unwrap();
        assert_eq!(el.graph.n(), 5);
        assert!(el.declared_n);
        let mut buf = Vec::new();
        write_edge_list(&el.graph, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# n=5\n0 1\n3 4\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_edge_list("0 1\n2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_edge_list("# n=2\n0 5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_edge_list("3 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
