//! Statistics of sampled graphs: components, shortest paths, clustering and
//! degree summaries.

use std::collections::VecDeque;
use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;

/// Component sizes, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub sizes: Vec<usize>,
    pub largest: usize,
    /// 0 when the graph has fewer than two components.
    pub second_largest: usize,
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Component label of every node. Labels are `0..count`, numbered in order of
/// each component's smallest node.
pub fn component_labels(g: &Graph) -> (Vec<usize>, usize) {
    let mut ds = DisjointSets::new(g.n());
    for &(i, j) in g.edges() {
        ds.union(i, j);
    }
    let mut label_of_root = vec![usize::MAX; g.n()];
    let mut labels = vec![0; g.n()];
    let mut count = 0;
    for v in 0..g.n() {
        let r = ds.find(v as u32) as usize;
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = count;
            count += 1;
        }
        labels[v] = label_of_root[r];
    }
    (labels, count)
}

pub fn components(g: &Graph) -> ComponentSummary {
    let (labels, count) = component_labels(g);
    let mut sizes = vec![0usize; count];
    for l in labels {
        sizes[l] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentSummary {
        largest: sizes.first().copied().unwrap_or(0),
        second_largest: sizes.get(1).copied().unwrap_or(0),
        sizes,
    }
}

/// Nodes of the largest component in increasing order; ties go to the
/// component containing the smallest node.
pub fn largest_component(g: &Graph) -> Vec<u32> {
    let (labels, count) = component_labels(g);
    if count == 0 {
        return Vec::new();
    }
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let best = (0..count).fold(0, |b, l| if sizes[l] > sizes[b] { l } else { b });
    (0..g.n() as u32).filter(|&v| labels[v as usize] == best).collect()
}

/// Which BFS sources [`mean_shortest_path`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceSelection {
    /// Every node of the component.
    All,
    /// `count` distinct sources drawn uniformly with the given seed.
    Sample { count: usize, seed: u64 },
    /// All sources up to [`AUTO_EXACT_LIMIT`] nodes, otherwise
    /// [`AUTO_SAMPLE_COUNT`] sampled ones.
    Auto { seed: u64 },
}

pub const AUTO_EXACT_LIMIT: usize = 2000;
pub const AUTO_SAMPLE_COUNT: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// Mean hop distance over ordered pairs of distinct nodes.
    pub mean_distance: f64,
    /// Standard error across sources; 0 for the exact all-pairs mean.
    pub stderr: f64,
    pub source_count: usize,
    pub component_size: usize,
    pub exact: bool,
}

/// Sum of BFS distances from `source` to every node it reaches.
fn bfs_distance_sum(g: &Graph, source: u32, dist: &mut [u32], queue: &mut VecDeque<u32>) -> u64 {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source as usize] = 0;
    queue.push_back(source);
    let mut total = 0u64;
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        total += d as u64;
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
    total
}

/// Mean shortest-path length on the largest component.
pub fn mean_shortest_path(g: &Graph, sources: SourceSelection) -> Result<PathStats> {
    let comp = largest_component(g);
    let size = comp.len();
    if size < 2 {
        return Err(Error::Degenerate(format!(
            "largest component has {size} node(s)"
        )));
    }
    let chosen: Vec<u32> = match sources {
        SourceSelection::All => comp.clone(),
        SourceSelection::Auto { .. } if size <= AUTO_EXACT_LIMIT => comp.clone(),
        SourceSelection::Auto { seed } => pick(&comp, AUTO_SAMPLE_COUNT, seed)?,
        SourceSelection::Sample { count, seed } => pick(&comp, count, seed)?,
    };
    let exact = chosen.len() == size;
    let sums: Vec<u64> = chosen
        .par_iter()
        .map_init(
            || (vec![u32::MAX; g.n()], VecDeque::new()),
            |(dist, queue), &s| bfs_distance_sum(g, s, dist, queue),
        )
        .collect();
    let pairs = (size - 1) as f64;
    let total: u64 = sums.iter().sum();
    let mean = total as f64 / (chosen.len() as f64 * pairs);
    let stderr = if exact || chosen.len() < 2 {
        0.0
    } else {
        let per: Vec<f64> = sums.iter().map(|&s| s as f64 / pairs).collect();
        crate::stats::mean_stderr(&per).map_or(0.0, |(_, se)| se)
    };
    Ok(PathStats {
        mean_distance: mean,
        stderr,
        source_count: chosen.len(),
        component_size: size,
        exact,
    })
}

fn pick(comp: &[u32], count: usize, seed: u64) -> Result<Vec<u32>> {
    if count == 0 {
        return Err(Error::InvalidParameter("source count must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut idx = index::sample(&mut rng, comp.len(), count.min(comp.len())).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| comp[i]).collect())
}

/// Number of triangles through each node, by intersecting the sorted
/// neighbour lists of every edge.
pub fn node_triangles(g: &Graph) -> Vec<u64> {
    let mut tri = vec![0u64; g.n()];
    for &(i, j) in g.edges() {
        let (a, b) = (g.neighbors(i as usize), g.neighbors(j as usize));
        let (mut x, mut y) = (
            a.partition_point(|&w| w <= j),
            b.partition_point(|&w| w <= j),
        );
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    tri[i as usize] += 1;
                    tri[j as usize] += 1;
                    tri[a[x] as usize] += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    tri
}

pub fn triangle_count(g: &Graph) -> u64 {
    node_triangles(g).iter().sum::<u64>() / 3
}

pub fn two_star_count(g: &Graph) -> u64 {
    (0..g.n())
        .map(|v| {
            let k = g.degree(v) as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum()
}

/// Global clustering `3 * triangles / two-stars`.
pub fn transitivity(g: &Graph) -> Result<f64> {
    let stars = two_star_count(g);
    if stars == 0 {
        return Err(Error::Degenerate("graph has no two-stars".into()));
    }
    Ok(3.0 * triangle_count(g) as f64 / stars as f64)
}

/// Per-node clustering; nodes of degree below 2 get 0.
pub fn local_clustering(g: &Graph) -> Vec<f64> {
    node_triangles(g)
        .into_iter()
        .enumerate()
        .map(|(v, t)| {
            let k = g.degree(v) as f64;
            if k < 2.0 {
                0.0
            } else {
                2.0 * t as f64 / (k * (k - 1.0))
            }
        })
        .collect()
}

/// Mean degree of each node's neighbours; isolated nodes get 0.
pub fn average_neighbor_degree(g: &Graph) -> Vec<f64> {
    (0..g.n())
        .map(|v| {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().map(|&w| g.degree(w as usize) as f64).sum::<f64>() / nb.len() as f64
            }
        })
        .collect()
}

/// `counts[k]` is the number of nodes of degree `k`.
pub fn degree_histogram(g: &Graph) -> Vec<u64> {
    let mut counts = vec![0u64; g.max_degree() + 1];
    for v in 0..g.n() {
        counts[g.degree(v)] += 1;
    }
    counts
}

/// Writes `node,degree,local_clustering,avg_neighbor_degree` rows.
pub fn write_node_stats_csv(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    let cc = local_clustering(g);
    let knn = average_neighbor_degree(g);
    writeln!(out, "node,degree,local_clustering,avg_neighbor_degree")?;
    for v in 0..g.n() {
        writeln!(out, "{v},{},{},{}", g.degree(v), cc[v], knn[v])?;
    }
    Ok(())
}
