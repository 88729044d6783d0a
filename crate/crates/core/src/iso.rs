//! Edge boundaries in `Perm(n)`: exact counts, witness sets, brute-force
//! `i_k` on tiny instances, and the Laplacian spectral gap.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::face::FaceChain;
use crate::perm::{check_dimension, vertex_count, Permutation, VertexRank};

/// A set of vertices of `Perm(n)`, stored as sorted distinct ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet {
    pub n: usize,
    members: Vec<u64>,
}

impl VertexSet {
    pub fn new(n: usize, mut members: Vec<u64>) -> Result<Self> {
        check_dimension(n)?;
        let count = vertex_count(n);
        if let Some(&bad) = members.iter().find(|&&r| r >= count) {
            return Err(Error::RankOutOfRange { rank: bad, n, count });
        }
        members.sort_unstable();
        members.dedup();
        Ok(VertexSet { n, members })
    }

    pub fn from_permutations(n: usize, xs: &[Permutation]) -> Result<Self> {
        if let Some(x) = xs.iter().find(|x| x.n() != n) {
            return Err(Error::SizeMismatch { expected: n, found: x.n() });
        }
        VertexSet::new(n, xs.iter().map(|x| x.rank().0).collect())
    }

    pub fn all(n: usize) -> Result<Self> {
        check_dimension(n)?;
        VertexSet::new(n, (0..vertex_count(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ranks(&self) -> &[u64] {
        &self.members
    }

    /// Ranks as lowercase hex joined by `;`.
    pub fn to_hex_list(&self) -> String {
        self.members.iter().map(|r| format!("{r:x}")).collect::<Vec<_>>().join(";")
    }
}

/// Number of edges of `Perm(n)` with exactly one endpoint in `s`.
pub fn edge_boundary(s: &VertexSet) -> u64 {
    let inside: HashSet<u64> = s.members.iter().copied().collect();
    s.members
        .iter()
        .map(|&r| {
            let x = Permutation::unrank(s.n, VertexRank(r)).expect("validated rank");
            x.neighbors().into_iter().filter(|(_, y)| !inside.contains(&y.rank().0)).count() as u64
        })
        .sum()
}

/// `{σ : σ(1) ≤ (n+1)/2}`, defined for odd `n`.
pub fn halfspace_witness(n: usize) -> Result<VertexSet> {
    check_dimension(n)?;
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("the halfspace witness needs odd n (got {n})")));
    }
    let half = n.div_ceil(2);
    let members = Permutation::all(n)?.filter(|x| x.value_at(1) as usize <= half).map(|x| x.rank().0).collect();
    VertexSet::new(n, members)
}

/// Face isomorphic to the `r`-cube: position pairs `{1,2}, …, {2r−1,2r}`
/// followed by singletons.
pub fn hypercube_face(n: usize, r: usize) -> Result<FaceChain> {
    check_dimension(n)?;
    if r == 0 || r > n.div_ceil(2) {
        return Err(Error::InvalidParameter(format!("hypercube faces need 1 <= r <= {} (got {r})", n.div_ceil(2))));
    }
    let len = (n + 1) as u8;
    let mut blocks: Vec<Vec<u8>> = (0..r as u8).map(|j| vec![2 * j + 1, 2 * j + 2]).collect();
    blocks.extend((2 * r as u8 + 1..=len).map(|p| vec![p]));
    FaceChain::new(blocks)
}

/// Member set of a face.
pub fn face_vertex_set(face: &FaceChain) -> Result<VertexSet> {
    VertexSet::from_permutations(face.n(), &face.members())
}

/// `n − log₂ k`.
pub fn harper_bound(n: usize, k: u64) -> f64 {
    n as f64 - (k as f64).log2()
}

pub const IK_MAX_K_SMALL: usize = 12;
pub const IK_MAX_K_N4: usize = 3;

fn check_ik_guard(n: usize, k: usize) -> Result<()> {
    let ok = match n {
        1 | 2 => k <= vertex_count(n) as usize,
        3 => k <= IK_MAX_K_SMALL,
        4 => k <= IK_MAX_K_N4,
        _ => false,
    };
    if !ok || k == 0 {
        return Err(Error::CostGuard(format!(
            "brute-force i_k needs n <= 3 with k <= {IK_MAX_K_SMALL}, or n = 4 with k <= {IK_MAX_K_N4} (got n = {n}, k = {k})"
        )));
    }
    Ok(())
}

/// Minimum of `|∂S|/|S|` over `k`-subsets and one minimizing set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkResult {
    pub n: usize,
    pub k: usize,
    pub boundary: u64,
    pub i_k: f64,
    pub harper_bound: f64,
    pub witness: VertexSet,
}

impl IkResult {
    /// Average degree of the subgraph induced by the witness.
    pub fn induced_average_degree(&self) -> f64 {
        self.n as f64 - self.boundary as f64 / self.k as f64
    }

    pub fn csv_row(&self) -> String {
        use crate::format::sig9;
        format!("{},{},{},{},{}", self.n, self.k, sig9(self.i_k), sig9(self.harper_bound), self.witness.to_hex_list())
    }
}

pub const IK_CSV_HEADER: &str = "n,k,i_k,harper_bound,witness_set";

struct Scan<'a> {
    nbr: &'a [u128],
    n: u32,
    kmax: usize,
    best: Vec<(u64, u128)>,
}

impl Scan<'_> {
    /// Extends `set` (size `size`, boundary `bd`) by vertices `> last`.
    fn dfs(&mut self, set: u128, size: usize, bd: u64, last: usize) {
        if bd < self.best[size].0 {
            self.best[size] = (bd, set);
        }
        if size == self.kmax {
            return;
        }
        for v in last + 1..self.nbr.len() {
            let inside = (self.nbr[v] & set).count_ones();
            let next = bd + self.n as u64 - 2 * inside as u64;
            self.dfs(set | 1u128 << v, size + 1, next, v);
        }
    }
}

/// Exact `i_k` for every `k ≤ kmax` in one scan over all subsets, split across
/// threads by smallest element.
pub fn i_k_all(n: usize, kmax: usize) -> Result<Vec<IkResult>> {
    check_ik_guard(n, kmax)?;
    let count = vertex_count(n) as usize;
    let nbr: Vec<u128> = (0..count)
        .map(|r| {
            let x = Permutation::unrank(n, VertexRank(r as u64)).expect("rank in range");
            x.neighbors().into_iter().fold(0u128, |m, (_, y)| m | 1u128 << y.rank().0)
        })
        .collect();
    let per_first: Vec<Vec<(u64, u128)>> = (0..count)
        .into_par_iter()
        .map(|first| {
            let mut scan = Scan { nbr: &nbr, n: n as u32, kmax, best: vec![(u64::MAX, 0); kmax + 1] };
            scan.dfs(1u128 << first, 1, n as u64, first);
            scan.best
        })
        .collect();
    (1..=kmax)
        .map(|k| {
            // first minimum in smallest-element order is the deterministic witness
            let (boundary, set) = per_first
                .iter()
                .map(|b| b[k])
                .fold((u64::MAX, 0u128), |acc, cur| if cur.0 < acc.0 { cur } else { acc });
            let ranks = (0..count as u64).filter(|&r| set >> r & 1 == 1).collect();
            Ok(IkResult {
                n,
                k,
                boundary,
                i_k: boundary as f64 / k as f64,
                harper_bound: harper_bound(n, k as u64),
                witness: VertexSet::new(n, ranks)?,
            })
        })
        .collect()
}

/// Exact `i_k(Perm(n))` with a minimizing set.
pub fn i_k_bruteforce(n: usize, k: usize) -> Result<IkResult> {
    Ok(i_k_all(n, k)?.pop().expect("k >= 1"))
}

pub const SPECTRAL_MAX_N: usize = 4;

/// Dense Laplacian `nI − A` of `Perm(n)`.
pub fn laplacian(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 || n > SPECTRAL_MAX_N {
        return Err(Error::CostGuard(format!("dense spectra need 1 <= n <= {SPECTRAL_MAX_N} (got {n})")));
    }
    let count = vertex_count(n) as usize;
    let mut l = DMatrix::<f64>::zeros(count, count);
    for x in Permutation::all(n)? {
        let r = x.rank().0 as usize;
        l[(r, r)] = n as f64;
        for (_, y) in x.neighbors() {
            l[(r, y.rank().0 as usize)] = -1.0;
        }
    }
    Ok(l)
}

/// Second-smallest Laplacian eigenvalue of `Perm(n)`.
pub fn laplacian_lambda1(n: usize) -> Result<f64> {
    let mut eig: Vec<f64> = SymmetricEigen::new(laplacian(n)?).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig[1])
}

/// `2 − 2cos(π/(n+1))`.
pub fn lambda1_closed_form(n: usize) -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos()
}

/// The product-of-hexagons face and its exact boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureWitness {
    pub n: usize,
    pub face: FaceChain,
    pub k: u64,
    pub dimension: usize,
    pub boundary: u64,
    pub ratio: f64,
}

/// For `n ≡ 2 (mod 3)`, the face with blocks of three consecutive positions,
/// a product of `(n+1)/3` hexagons.
pub fn conjecture_face_boundary(n: usize) -> Result<ConjectureWitness> {
    check_dimension(n)?;
    if n % 3 != 2 {
        return Err(Error::InvalidParameter(format!("the hexagon-product face needs n ≡ 2 (mod 3) (got {n})")));
    }
    let blocks: Vec<Vec<u8>> = (0..(n + 1) as u8 / 3).map(|j| vec![3 * j + 1, 3 * j + 2, 3 * j + 3]).collect();
    let face = FaceChain::new(blocks)?;
    let set = face_vertex_set(&face)?;
    let k = set.len() as u64;
    let boundary = edge_boundary(&set);
    Ok(ConjectureWitness { n, dimension: face.dimension(), face, k, boundary, ratio: boundary as f64 / k as f64 })
}
