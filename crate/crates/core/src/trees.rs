//! Uniform labelled trees via Prüfer codes, and exact rooted-subtree counts
//! in small permutahedra.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{factorial, vertex_count, Permutation, VertexRank};

/// A tree on vertices `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledTree {
    pub m: usize,
    pub edges: Vec<(u32, u32)>,
}

/// Per-tree statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub m: usize,
    pub max_degree: usize,
    pub diameter: usize,
    pub height_from_1: usize,
}

impl LabelledTree {
    /// Decodes a Prüfer sequence over `1..=m` (length `m - 2`).
    pub fn from_prufer(m: usize, code: &[u32]) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("trees need m >= 2 (got {m})")));
        }
        if code.len() != m - 2 || code.iter().any(|&c| c == 0 || c as usize > m) {
            return Err(Error::InvalidParameter("malformed Prüfer sequence".into()));
        }
        let mut degree = vec![1usize; m + 1];
        for &c in code {
            degree[c as usize] += 1;
        }
        let mut leaves: BinaryHeap<Reverse<u32>> = (1..=m as u32).filter(|&v| degree[v as usize] == 1).map(Reverse).collect();
        let mut edges = Vec::with_capacity(m - 1);
        for &c in code {
            let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
            edges.push((leaf, c));
            degree[c as usize] -= 1;
            if degree[c as usize] == 1 {
                leaves.push(Reverse(c));
            }
        }
        let Reverse(a) = leaves.pop().expect("two leaves remain");
        let Reverse(b) = leaves.pop().expect("two leaves remain");
        edges.push((a, b));
        Ok(LabelledTree { m, edges })
    }

    fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.m + 1];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.m + 1];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    fn farthest(adj: &[Vec<u32>], start: u32) -> (u32, usize) {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[start as usize] = 0;
        let mut queue = VecDeque::from([start]);
        let mut last = (start, 0);
        while let Some(x) = queue.pop_front() {
            let d = dist[x as usize];
            if d > last.1 {
                last = (x, d);
            }
            for &y in &adj[x as usize] {
                if dist[y as usize] == usize::MAX {
                    dist[y as usize] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        last
    }

    /// Longest path length, by two breadth-first sweeps.
    pub fn diameter(&self) -> usize {
        let adj = self.adjacency();
        let (far, _) = Self::farthest(&adj, 1);
        Self::farthest(&adj, far).1
    }

    pub fn stats(&self) -> TreeStats {
        let adj = self.adjacency();
        TreeStats {
            m: self.m,
            max_degree: self.max_degree(),
            diameter: self.diameter(),
            height_from_1: Self::farthest(&adj, 1).1,
        }
    }

    /// Edge set with each pair sorted, for comparisons.
    pub fn canonical_edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    }
}

/// A uniformly random tree on `1..=m` from a uniform Prüfer sequence.
pub fn sample_uniform_tree_with<R: Rng>(m: usize, rng: &mut R) -> Result<LabelledTree> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("trees need m >= 2 (got {m})")));
    }
    let code: Vec<u32> = (0..m - 2).map(|_| rng.random_range(1..=m as u32)).collect();
    LabelledTree::from_prufer(m, &code)
}

pub fn sample_uniform_tree(m: usize, seed: u64) -> Result<LabelledTree> {
    sample_uniform_tree_with(m, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `log m / log log m`, the typical maximum degree scale.
pub fn degree_scale(m: usize) -> f64 {
    let l = (m as f64).ln();
    l / l.ln()
}

pub const TREE_COUNT_MAX_N: usize = 3;
pub const TREE_COUNT_MAX_M: usize = 6;

/// Number of spanning trees of a multigraph on `vertices` by deletion–contraction.
pub fn spanning_tree_count(vertices: usize, edges: &[(usize, usize)]) -> u64 {
    fn connected(vertices: usize, edges: &[(usize, usize)]) -> bool {
        let mut dsu = crate::dsu::DisjointSets::new(vertices);
        for &(a, b) in edges {
            dsu.union(a as u32, b as u32);
        }
        dsu.sets() == 1
    }
    fn count(vertices: usize, edges: &[(usize, usize)]) -> u64 {
        if vertices == 1 {
            return 1;
        }
        if !connected(vertices, edges) {
            return 0;
        }
        let (a, b) = edges[0];
        let rest = &edges[1..];
        let deleted = count(vertices, rest);
        // contract b into a, relabel the last vertex as b, drop loops
        let last = vertices - 1;
        let relabel = |v: usize| {
            let v = if v == b { a } else { v };
            if v == last {
                b
            } else {
                v
            }
        };
        let contracted: Vec<(usize, usize)> = rest
            .iter()
            .map(|&(x, y)| (relabel(x), relabel(y)))
            .filter(|&(x, y)| x != y)
            .collect();
        deleted + count(vertices - 1, &contracted)
    }
    let edges: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| a != b).collect();
    count(vertices, &edges)
}

/// Connected vertex subsets of `Perm(n)` with exactly `m` vertices, as rank bitmasks.
fn connected_subsets(m: usize, adj: &[Vec<usize>]) -> Vec<u32> {
    let count = adj.len();
    let mut level: HashSet<u32> = (0..count).map(|v| 1u32 << v).collect();
    for _ in 1..m {
        let mut next = HashSet::new();
        for &s in &level {
            for v in (0..count).filter(|&v| s >> v & 1 == 1) {
                for &w in &adj[v] {
                    if s >> w & 1 == 0 {
                        next.insert(s | 1 << w);
                    }
                }
            }
        }
        level = next;
    }
    let mut out: Vec<u32> = level.into_iter().collect();
    out.sort_unstable();
    out
}

/// Exact number of rooted `m`-vertex trees in `Perm(n)`: every tree subgraph
/// on `m` vertices, times its `m` choices of root.
pub fn count_rooted_trees(n: usize, m: usize) -> Result<u64> {
    if n == 0 || n > TREE_COUNT_MAX_N || m == 0 || m > TREE_COUNT_MAX_M {
        return Err(Error::CostGuard(format!(
            "tree counts need 1 <= n <= {TREE_COUNT_MAX_N} and 1 <= m <= {TREE_COUNT_MAX_M} (got n = {n}, m = {m})"
        )));
    }
    let count = vertex_count(n) as usize;
    let adj: Vec<Vec<usize>> = (0..count)
        .map(|r| {
            let x = Permutation::unrank(n, VertexRank(r as u64)).expect("rank in range");
            x.neighbors().into_iter().map(|(_, y)| y.rank().0 as usize).collect()
        })
        .collect();
    let mut total = 0u64;
    for set in connected_subsets(m, &adj) {
        let members: Vec<usize> = (0..count).filter(|&v| set >> v & 1 == 1).collect();
        let index = |v: usize| members.iter().position(|&u| u == v);
        let mut edges = Vec::new();
        for (i, &v) in members.iter().enumerate() {
            for &w in &adj[v] {
                if w > v {
                    if let Some(j) = index(w) {
                        edges.push((i, j));
                    }
                }
            }
        }
        total += spanning_tree_count(m, &edges);
    }
    Ok(total * m as u64)
}

/// Bounds `(lower, upper)` on rooted `m`-vertex tree counts in a graph on
/// `vertices` vertices with minimum degree `delta` and maximum degree `big_delta`.
/// The lower bound is `None` unless `delta > m`.
pub fn tree_count_bounds(vertices: f64, delta: usize, big_delta: usize, m: usize) -> (Option<f64>, f64) {
    let mf = m as f64;
    let upper = vertices * (std::f64::consts::E * big_delta as f64).powi(m as i32 - 1);
    let lower = (delta > m).then(|| {
        vertices * mf.powi(m as i32 - 2) * ((delta - m) as f64).powi(m as i32 - 1) / factorial(m - 1) as f64
    });
    (lower, upper)
}
