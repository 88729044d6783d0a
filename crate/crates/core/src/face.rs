//! Faces of the permutahedron and projection into disjoint subfaces.
//!
//! A face is an ordered partition of positions `B_1, ..., B_{k+1}`; block
//! `B_j` receives the consecutive value range `c_{j-1}+1 ..= c_j` where
//! `c_j = |B_1| + ... + |B_j|`. This is the coset of the parabolic subgroup
//! generated by all `τ_v` with `v` not a cut `c_j`, so the induced subgraph
//! is a product of permutahedra of dimensions `|B_j| - 1`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{check_dimension, factorial, Permutation};

/// A face of `Perm(n)` encoded by an ordered partition of positions.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct FaceChain {
    blocks: Vec<Vec<u8>>,
    /// Index of the block containing each 0-based position.
    block_of: Vec<u8>,
    /// Cumulative block sizes `c_1 < ... < c_{k+1} = n + 1`.
    cuts: Vec<u8>,
}

impl TryFrom<Vec<Vec<u8>>> for FaceChain {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<u8>>) -> Result<Self> {
        FaceChain::new(blocks)
    }
}

impl From<FaceChain> for Vec<Vec<u8>> {
    fn from(f: FaceChain) -> Self {
        f.blocks
    }
}

impl fmt::Debug for FaceChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FaceChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.blocks).map_err(|_| fmt::Error)?)
    }
}

impl FaceChain {
    /// Builds a face from blocks of 1-based positions. Positions within a
    /// block are sorted; block order is significant.
    pub fn new(mut blocks: Vec<Vec<u8>>) -> Result<Self> {
        let len: usize = blocks.iter().map(Vec::len).sum();
        if len < 2 {
            return Err(Error::InvalidFace(format!("{blocks:?} covers fewer than two positions")));
        }
        check_dimension(len - 1)?;
        let mut block_of = vec![u8::MAX; len];
        let mut cuts = Vec::with_capacity(blocks.len());
        let mut total = 0u8;
        for (j, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidFace("empty block".into()));
            }
            block.sort_unstable();
            for &pos in block.iter() {
                if pos == 0 || pos as usize > len || block_of[pos as usize - 1] != u8::MAX {
                    return Err(Error::InvalidFace(format!("{blocks:?} is not a partition of 1..={len}")));
                }
                block_of[pos as usize - 1] = j as u8;
            }
            total += block.len() as u8;
            cuts.push(total);
        }
        Ok(FaceChain { blocks, block_of, cuts })
    }

    /// The whole permutahedron: a single block.
    pub fn full(n: usize) -> Result<Self> {
        check_dimension(n)?;
        FaceChain::new(vec![(1..=n as u8 + 1).collect()])
    }

    pub fn n(&self) -> usize {
        self.block_of.len() - 1
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    /// `Σ (|B_j| - 1)`, the regularity of the induced subgraph.
    pub fn dimension(&self) -> usize {
        self.n() + 1 - self.blocks.len()
    }

    /// Dimensions of the non-trivial permutahedron factors.
    pub fn factor_dims(&self) -> Vec<usize> {
        self.blocks.iter().filter(|b| b.len() >= 2).map(|b| b.len() - 1).collect()
    }

    /// Number of member vertices, `Π |B_j|!`.
    pub fn member_count(&self) -> u64 {
        self.blocks.iter().map(|b| factorial(b.len())).product()
    }

    /// Inclusive 1-based value range assigned to block `j`.
    pub fn value_range(&self, j: usize) -> (usize, usize) {
        let lo = if j == 0 { 1 } else { self.cuts[j - 1] as usize + 1 };
        (lo, self.cuts[j] as usize)
    }

    fn block_of_value(&self, v: usize) -> usize {
        self.cuts.iter().position(|&c| v <= c as usize).expect("value in range")
    }

    fn check_size(&self, x: &Permutation) -> Result<()> {
        if x.n() != self.n() {
            return Err(Error::SizeMismatch { expected: self.n(), found: x.n() });
        }
        Ok(())
    }

    /// Whether `x` maps every block onto its value range.
    pub fn contains(&self, x: &Permutation) -> Result<bool> {
        self.check_size(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &Permutation) -> bool {
        x.word()
            .iter()
            .zip(&self.block_of)
            .all(|(&v, &j)| self.block_of_value(v as usize) == j as usize)
    }

    /// Whether generator `τ_v` stays inside the face, i.e. values `v` and
    /// `v + 1` share a value range. Equivalently, whether `v` is an
    /// available split level.
    pub fn split_level(&self, v: usize) -> bool {
        v >= 1 && v <= self.n() && !self.cuts.contains(&(v as u8))
    }

    /// Generators admissible inside the face, ascending.
    pub fn admissible_generators(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&v| self.split_level(v)).collect()
    }

    /// Neighbours of `x` inside the face, one per admissible generator.
    pub fn face_neighbors(&self, x: &Permutation) -> Result<Vec<(usize, Permutation)>> {
        if !self.contains(x)? {
            return Err(Error::NotInFace(x.to_string()));
        }
        Ok(self
            .admissible_generators()
            .into_iter()
            .map(|v| (v, x.apply_generator_unchecked(v)))
            .collect())
    }

    /// Bitmask of positions holding the values of `v`'s range up to `v`.
    /// Two members of the face land in the same child of `refine(_, v)`
    /// exactly when these masks agree.
    fn split_key(&self, x: &Permutation, v: usize) -> u32 {
        let (lo, _) = self.value_range(self.block_of_value(v));
        x.word()
            .iter()
            .enumerate()
            .filter(|(_, &val)| (lo..=v).contains(&(val as usize)))
            .fold(0u32, |mask, (j, _)| mask | 1 << j)
    }

    /// The child face containing `x` after cutting at value level `v`.
    pub fn refine(&self, x: &Permutation, v: usize) -> Result<FaceChain> {
        if !self.contains(x)? {
            return Err(Error::NotInFace(x.to_string()));
        }
        if !self.split_level(v) {
            return Err(Error::UnavailableLevel { level: v });
        }
        Ok(self.refine_unchecked(x, v))
    }

    fn refine_unchecked(&self, x: &Permutation, v: usize) -> FaceChain {
        let j = self.block_of_value(v);
        let (lower, upper): (Vec<u8>, Vec<u8>) =
            self.blocks[j].iter().partition(|&&pos| x.value_at(pos as usize) as usize <= v);
        let mut blocks = Vec::with_capacity(self.blocks.len() + 1);
        blocks.extend_from_slice(&self.blocks[..j]);
        blocks.push(lower);
        blocks.push(upper);
        blocks.extend_from_slice(&self.blocks[j + 1..]);
        FaceChain::new(blocks).expect("refinement of a valid chain is valid")
    }

    /// All member vertices, in rank order.
    pub fn members(&self) -> Vec<Permutation> {
        let len = self.n() + 1;
        let mut out = Vec::with_capacity(self.member_count() as usize);
        let mut word = vec![0u8; len];
        self.fill_members(0, &mut word, &mut out);
        out.sort();
        out
    }

    fn fill_members(&self, j: usize, word: &mut Vec<u8>, out: &mut Vec<Permutation>) {
        if j == self.blocks.len() {
            out.push(Permutation::from_word_unchecked(word.clone()));
            return;
        }
        let (lo, hi) = self.value_range(j);
        let mut values: Vec<u8> = (lo as u8..=hi as u8).collect();
        loop {
            for (&pos, &val) in self.blocks[j].iter().zip(&values) {
                word[pos as usize - 1] = val;
            }
            self.fill_members(j + 1, word, out);
            if !crate::perm::next_lex(&mut values) {
                break;
            }
        }
    }

    /// Whether the two faces share a vertex.
    ///
    /// Each position must take a value in the intersection of the two
    /// ranges it is assigned; a bijection exists iff greedy
    /// earliest-deadline assignment of values succeeds.
    pub fn intersects(&self, other: &FaceChain) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let len = self.n() + 1;
        let mut windows: Vec<(usize, usize)> = (0..len)
            .map(|pos| {
                let (a_lo, a_hi) = self.value_range(self.block_of[pos] as usize);
                let (b_lo, b_hi) = other.value_range(other.block_of[pos] as usize);
                (a_lo.max(b_lo), a_hi.min(b_hi))
            })
            .collect();
        if windows.iter().any(|(lo, hi)| lo > hi) {
            return false;
        }
        windows.sort_unstable();
        let mut open = BinaryHeap::new();
        let mut next = 0;
        for v in 1..=len {
            while next < len && windows[next].0 <= v {
                open.push(Reverse(windows[next].1));
                next += 1;
            }
            match open.pop() {
                Some(Reverse(hi)) if hi >= v => {}
                _ => return false,
            }
        }
        true
    }
}

/// A face together with its cached dimension and product decomposition.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceGraph {
    chain: FaceChain,
    dimension: usize,
    factors: Vec<usize>,
}

impl fmt::Debug for FaceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaceGraph({}, dim {})", self.chain, self.dimension)
    }
}

impl From<FaceChain> for FaceGraph {
    fn from(chain: FaceChain) -> Self {
        FaceGraph { dimension: chain.dimension(), factors: chain.factor_dims(), chain }
    }
}

impl Deref for FaceGraph {
    type Target = FaceChain;

    fn deref(&self) -> &FaceChain {
        &self.chain
    }
}

impl FaceGraph {
    pub fn full(n: usize) -> Result<Self> {
        Ok(FaceChain::full(n)?.into())
    }

    pub fn chain(&self) -> &FaceChain {
        &self.chain
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factors
    }
}

/// Projection: assigns each vertex of `xs` a face inside `face` such
/// that the faces are pairwise disjoint, contain their vertex, and have
/// dimension at least `dim(face) - (|xs| - 1)`.
///
/// Recursively cuts at the smallest value level that separates the current
/// group; each cut costs one dimension and strictly shrinks every group.
/// The result is aligned with `xs`.
pub fn project(face: &FaceGraph, xs: &[Permutation]) -> Result<Vec<FaceGraph>> {
    if xs.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut seen = std::collections::HashSet::with_capacity(xs.len());
    for x in xs {
        if !face.contains(x)? {
            return Err(Error::NotInFace(x.to_string()));
        }
        if !seen.insert(x) {
            return Err(Error::DuplicateVertex(x.to_string()));
        }
    }
    let mut out: Vec<Option<FaceGraph>> = vec![None; xs.len()];
    let indices: Vec<usize> = (0..xs.len()).collect();
    project_rec(face.chain.clone(), &indices, xs, &mut out);
    Ok(out.into_iter().map(|f| f.expect("every vertex assigned")).collect())
}

fn project_rec(face: FaceChain, group: &[usize], xs: &[Permutation], out: &mut [Option<FaceGraph>]) {
    if let [only] = group {
        out[*only] = Some(face.into());
        return;
    }
    for v in 1..=face.n() {
        if !face.split_level(v) {
            continue;
        }
        let mut children: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &i in group {
            children.entry(face.split_key(&xs[i], v)).or_default().push(i);
        }
        if children.len() > 1 {
            for sub in children.values() {
                let child = face.refine_unchecked(&xs[sub[0]], v);
                project_rec(child, sub, xs, out);
            }
            return;
        }
    }
    unreachable!("distinct members of a face are separated by some level");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(word: &[u8]) -> Permutation {
        Permutation::new(word.to_vec()).unwrap()
    }

    fn face(blocks: &[&[u8]]) -> FaceChain {
        FaceChain::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn full_face_basics() {
        let f = FaceChain::full(2).unwrap();
        assert_eq!(f.blocks(), &[vec![1, 2, 3]]);
        assert_eq!(f.dimension(), 2);
        assert_eq!(f.members().len(), 6);
        for x in Permutation::all(2).unwrap() {
            assert!(f.contains(&x).unwrap());
            assert_eq!(f.face_neighbors(&x).unwrap(), x.neighbors());
        }
        assert!((1..=3).all(|v| FaceChain::full(3).unwrap().split_level(v)));
    }

    #[test]
    fn validation() {
        assert!(FaceChain::new(vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(FaceChain::new(vec![vec![1, 2], vec![]]).is_err());
        assert!(FaceChain::new(vec![vec![1, 4]]).is_err());
        assert!(FaceChain::new(vec![vec![1]]).is_err());
        let f: FaceChain = serde_json::from_str("[[3,1],[2,4]]").unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), "[[1,3],[2,4]]");
    }

    #[test]
    fn contains_examples() {
        let f = face(&[&[1, 2], &[3]]);
        assert!(f.contains(&p(&[2, 1, 3])).unwrap());
        assert!(!f.contains(&p(&[3, 1, 2])).unwrap());
        assert!(f.contains(&p(&[1, 2, 3, 4])).is_err());
        let interval = face(&[&[1], &[2, 3], &[4]]);
        assert!(interval.contains(&Permutation::identity(3).unwrap()).unwrap());
    }

    #[test]
    fn face_neighbor_examples() {
        let f = face(&[&[1, 2], &[3]]);
        assert_eq!(f.dimension(), 1);
        assert_eq!(f.face_neighbors(&p(&[1, 2, 3])).unwrap(), vec![(1, p(&[2, 1, 3]))]);
        assert!(f.face_neighbors(&p(&[3, 1, 2])).is_err());

        // blocks of sizes (2,2) in S_4 induce a 4-cycle
        let sq = face(&[&[1, 2], &[3, 4]]);
        let members = sq.members();
        assert_eq!(members.len(), 4);
        let mut edges = 0;
        for x in &members {
            let nb = sq.face_neighbors(x).unwrap();
            assert_eq!(nb.len(), 2);
            edges += nb.len();
        }
        assert_eq!(edges / 2, 4);
    }

    #[test]
    fn split_levels() {
        let f = face(&[&[1, 2], &[3, 4]]);
        assert!(f.split_level(1));
        assert!(!f.split_level(2));
        assert!(f.split_level(3));
        assert!(!f.split_level(0) && !f.split_level(4));
    }

    #[test]
    fn refine_examples() {
        let full = FaceChain::full(2).unwrap();
        assert_eq!(full.refine(&p(&[1, 2, 3]), 1).unwrap(), face(&[&[1], &[2, 3]]));
        assert_eq!(full.refine(&p(&[3, 1, 2]), 1).unwrap(), face(&[&[2], &[1, 3]]));
        let f = face(&[&[1, 2], &[3, 4]]);
        assert!(f.refine(&Permutation::identity(3).unwrap(), 2).is_err());
        let child = f.refine(&Permutation::identity(3).unwrap(), 3).unwrap();
        assert_eq!(child.dimension(), f.dimension() - 1);
    }

    #[test]
    fn refine_partitions_consistently() {
        for n in 1..=4 {
            let full = FaceChain::full(n).unwrap();
            let all: Vec<Permutation> = Permutation::all(n).unwrap().collect();
            for v in 1..=n {
                for x in &all {
                    let cx = full.refine(x, v).unwrap();
                    assert!(cx.contains(x).unwrap());
                    assert_eq!(cx.dimension(), n - 1);
                    for y in &all {
                        let same = full.split_key(x, v) == full.split_key(y, v);
                        assert_eq!(cx.contains(y).unwrap(), same);
                    }
                }
            }
        }
    }

    /// Every chain of S_{n+1} for small n, by brute force over ordered set partitions.
    fn all_chains(n: usize) -> Vec<FaceChain> {
        let len = n + 1;
        let mut out = Vec::new();
        // assign each position a block label, keep those whose labels are 0..k contiguous
        let total = (len as u32).pow(len as u32);
        for code in 0..total {
            let mut labels = vec![0usize; len];
            let mut c = code;
            for l in labels.iter_mut() {
                *l = (c % len as u32) as usize;
                c /= len as u32;
            }
            let k = *labels.iter().max().unwrap() + 1;
            let mut blocks = vec![Vec::new(); k];
            for (pos, &l) in labels.iter().enumerate() {
                blocks[l].push(pos as u8 + 1);
            }
            if blocks.iter().all(|b| !b.is_empty()) {
                out.push(FaceChain::new(blocks).unwrap());
            }
        }
        out
    }

    #[test]
    fn induced_subgraph_is_product_of_permutahedra() {
        for n in 1..=4 {
            let all: Vec<Permutation> = Permutation::all(n).unwrap().collect();
            for f in all_chains(n) {
                let members: Vec<&Permutation> =
                    all.iter().filter(|x| f.contains(x).unwrap()).collect();
                assert_eq!(members.len() as u64, f.member_count());
                let set: HashSet<&Permutation> = members.iter().copied().collect();
                let mut edges = 0;
                for x in &members {
                    let deg = x.neighbors().iter().filter(|(_, y)| set.contains(y)).count();
                    assert_eq!(deg, f.dimension());
                    edges += deg;
                }
                // |E| of a product = |V| * d / 2
                assert_eq!(edges as u64, f.member_count() * f.dimension() as u64);
                let mut enumerated: Vec<Permutation> = members.into_iter().cloned().collect();
                enumerated.sort();
                assert_eq!(enumerated, f.members());
                let d: usize = f.factor_dims().iter().sum();
                assert_eq!(d, f.dimension());
            }
        }
    }

    #[test]
    fn intersects_matches_member_sets() {
        let chains = all_chains(3);
        let members: Vec<HashSet<Permutation>> =
            chains.iter().map(|f| f.members().into_iter().collect()).collect();
        for (a, ma) in chains.iter().zip(&members) {
            for (b, mb) in chains.iter().zip(&members) {
                assert_eq!(a.intersects(b), !ma.is_disjoint(mb), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn project_examples() {
        let full = FaceGraph::full(2).unwrap();
        let x = p(&[1, 2, 3]);
        assert_eq!(project(&full, &[x.clone()]).unwrap(), vec![full.clone()]);
        let y = p(&[2, 1, 3]);
        let faces = project(&full, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(faces[0].chain(), &face(&[&[1], &[2, 3]]));
        assert_eq!(faces[1].chain(), &face(&[&[2], &[1, 3]]));
        assert!(faces.iter().all(|f| f.dimension() == 1));
        assert!(!faces[0].intersects(&faces[1]));

        assert_eq!(project(&full, &[]).unwrap_err(), Error::EmptySet);
        assert!(matches!(project(&full, &[x.clone(), x.clone()]), Err(Error::DuplicateVertex(_))));
        let edge = FaceGraph::from(face(&[&[1, 2], &[3]]));
        assert!(matches!(project(&edge, &[p(&[3, 1, 2])]), Err(Error::NotInFace(_))));
    }

    fn check_projection(face: &FaceGraph, xs: &[Permutation], explicit: bool) {
        let faces = project(face, xs).unwrap();
        let bound = face.dimension() as isize + 1 - xs.len() as isize;
        for (x, f) in xs.iter().zip(&faces) {
            assert!(f.contains(x).unwrap());
            assert!(f.dimension() as isize >= bound);
            // child faces are faces of the parent
            assert!(f.members_subset_hint(face));
        }
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                assert!(!faces[i].intersects(&faces[j]));
            }
        }
        if explicit {
            let sets: Vec<HashSet<Permutation>> =
                faces.iter().map(|f| f.members().into_iter().collect()).collect();
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    assert!(sets[i].is_disjoint(&sets[j]));
                }
            }
        }
    }

    impl FaceChain {
        /// Each block of `self` lies inside a block of `parent` whose value
        /// range contains its own.
        fn members_subset_hint(&self, parent: &FaceChain) -> bool {
            (0..self.blocks.len()).all(|j| {
                let (lo, hi) = self.value_range(j);
                let pj = parent.block_of_value(lo);
                let (plo, phi) = parent.value_range(pj);
                plo <= lo
                    && hi <= phi
                    && self.blocks[j].iter().all(|&pos| parent.block_of[pos as usize - 1] as usize == pj)
            })
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn projection_small(n in 1usize..=4, seeds in prop::collection::vec(any::<u64>(), 1..=5)) {
            let count = crate::perm::vertex_count(n);
            let mut ranks: Vec<u64> = seeds.iter().map(|s| s % count).collect();
            ranks.sort_unstable();
            ranks.dedup();
            let xs: Vec<Permutation> = ranks.iter()
                .map(|&r| Permutation::unrank(n, crate::perm::VertexRank(r)).unwrap())
                .collect();
            check_projection(&FaceGraph::full(n).unwrap(), &xs, true);
        }

        #[test]
        fn projection_large(n in 5usize..=8, seeds in prop::collection::vec(any::<u64>(), 1..=5)) {
            let count = crate::perm::vertex_count(n);
            let mut ranks: Vec<u64> = seeds.iter().map(|s| s % count).collect();
            ranks.sort_unstable();
            ranks.dedup();
            let xs: Vec<Permutation> = ranks.iter()
                .map(|&r| Permutation::unrank(n, crate::perm::VertexRank(r)).unwrap())
                .collect();
            check_projection(&FaceGraph::full(n).unwrap(), &xs, n <= 6);
        }
    }
}
