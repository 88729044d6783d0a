//! Permutations of `S_{n+1}` as vertices of the permutahedron `Perm(n)`.
//!
//! A [`Permutation`] is stored in one-line (word) notation with 1-based
//! values: position `j` holds `π(j)`. Generator `τ_i` acts on the left, so
//! `τ_i π` swaps the two positions holding the *values* `i` and `i + 1`.
//! Two permutations are adjacent exactly when they differ by one such swap.
//!
//! Vertices are indexed by their lexicographic Lehmer rank ([`VertexRank`]);
//! edges by [`EdgeId`], which packs the smaller endpoint rank with the
//! generator index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension. `(n+1)! * n` must fit in a `u64` edge id.
pub const MAX_N: usize = 18;

const FACTORIALS: [u64; 21] = {
    let mut table = [1u64; 21];
    let mut k = 1;
    while k < 21 {
        table[k] = table[k - 1] * k as u64;
        k += 1;
    }
    table
};

/// `k!` for `k <= 20`.
pub fn factorial(k: usize) -> u64 {
    FACTORIALS[k]
}

/// Number of vertices `(n+1)!` of `Perm(n)`.
pub fn vertex_count(n: usize) -> u64 {
    factorial(n + 1)
}

/// Number of edges `n (n+1)! / 2` of `Perm(n)`.
pub fn edge_count(n: usize) -> u64 {
    n as u64 * factorial(n + 1) / 2
}

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::DimensionOutOfRange { n, max: MAX_N });
    }
    Ok(())
}

/// Lexicographic rank of a vertex, `0 <= rank < (n+1)!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexRank(pub u64);

/// Canonical edge identifier `rank(u) * n + (i - 1)`, where `u` is the
/// endpoint with the smaller rank and `i` the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl EdgeId {
    /// Smaller endpoint rank and generator index of this edge in `Perm(n)`.
    pub fn decode(self, n: usize) -> (VertexRank, usize) {
        (VertexRank(self.0 / n as u64), (self.0 % n as u64) as usize + 1)
    }
}

/// An element of `S_{n+1}` in one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Permutation {
    word: Vec<u8>,
}

impl TryFrom<Vec<u8>> for Permutation {
    type Error = Error;

    fn try_from(word: Vec<u8>) -> Result<Self> {
        Permutation::new(word)
    }
}

impl From<Permutation> for Vec<u8> {
    fn from(p: Permutation) -> Vec<u8> {
        p.word
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, v) in self.word.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl Permutation {
    /// Validates `word` as a bijection on `1..=word.len()`.
    pub fn new(word: Vec<u8>) -> Result<Self> {
        let len = word.len();
        if !(2..=MAX_N + 1).contains(&len) {
            return Err(Error::InvalidPermutation(word));
        }
        let mut seen = 0u32;
        for &v in &word {
            if v == 0 || v as usize > len || seen & (1 << v) != 0 {
                return Err(Error::InvalidPermutation(word));
            }
            seen |= 1 << v;
        }
        Ok(Permutation { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<u8>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok());
        Permutation { word }
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Permutation { word: (1..=n as u8 + 1).collect() })
    }

    /// The word `[n+1, n, ..., 1]`, the unique vertex at maximal distance
    /// from the identity.
    pub fn reversal(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Permutation { word: (1..=n as u8 + 1).rev().collect() })
    }

    /// Dimension `n` of the permutahedron this vertex lives in.
    pub fn n(&self) -> usize {
        self.word.len() - 1
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// `π(position)` for a 1-based position.
    pub fn value_at(&self, position: usize) -> u8 {
        self.word[position - 1]
    }

    /// 0-based position of each value: `positions()[v - 1] = π⁻¹(v) - 1`.
    pub fn positions(&self) -> Vec<u8> {
        let mut pos = vec![0u8; self.word.len()];
        for (j, &v) in self.word.iter().enumerate() {
            pos[v as usize - 1] = j as u8;
        }
        pos
    }

    /// `τ_i π`: swap the positions holding values `i` and `i + 1`.
    pub fn apply_generator(&self, i: usize) -> Result<Permutation> {
        self.check_generator(i)?;
        Ok(self.apply_generator_unchecked(i))
    }

    pub(crate) fn check_generator(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n() {
            return Err(Error::GeneratorOutOfRange { index: i, n: self.n() });
        }
        Ok(())
    }

    pub(crate) fn apply_generator_unchecked(&self, i: usize) -> Permutation {
        let mut word = self.word.clone();
        let (lo, hi) = (i as u8, i as u8 + 1);
        for v in word.iter_mut() {
            if *v == lo {
                *v = hi;
            } else if *v == hi {
                *v = lo;
            }
        }
        Permutation { word }
    }

    /// All `n` neighbours in `Perm(n)`, one per generator, in generator order.
    pub fn neighbors(&self) -> Vec<(usize, Permutation)> {
        (1..=self.n()).map(|i| (i, self.apply_generator_unchecked(i))).collect()
    }

    /// Lexicographic rank via the Lehmer code.
    pub fn rank(&self) -> VertexRank {
        let len = self.word.len();
        let mut used = 0u32;
        let mut rank = 0u64;
        for (j, &v) in self.word.iter().enumerate() {
            let smaller_unused = (v as u32 - 1) - (used & ((1 << v) - 1)).count_ones();
            rank += smaller_unused as u64 * factorial(len - 1 - j);
            used |= 1 << v;
        }
        VertexRank(rank)
    }

    /// Inverse of [`Permutation::rank`].
    pub fn unrank(n: usize, rank: VertexRank) -> Result<Permutation> {
        check_dimension(n)?;
        let count = vertex_count(n);
        if rank.0 >= count {
            return Err(Error::RankOutOfRange { rank: rank.0, n, count });
        }
        let len = n + 1;
        let mut remaining: Vec<u8> = (1..=len as u8).collect();
        let mut r = rank.0;
        let mut word = Vec::with_capacity(len);
        for j in 0..len {
            let f = factorial(len - 1 - j);
            let digit = (r / f) as usize;
            r %= f;
            word.push(remaining.remove(digit));
        }
        Ok(Permutation { word })
    }

    /// Discordant position pairs `{a, b}` with `(b - a)(π(b) - π(a)) < 0`.
    pub fn inversion_set(&self) -> InversionSet {
        let len = self.word.len();
        let mut set = InversionSet::empty(self.n());
        let mut k = 0;
        for a in 0..len {
            for b in a + 1..len {
                if self.word[a] > self.word[b] {
                    set.insert_index(k);
                }
                k += 1;
            }
        }
        set
    }

    /// Number of inversions, i.e. the distance from the identity.
    pub fn inversions(&self) -> usize {
        let len = self.word.len();
        (0..len)
            .map(|a| (a + 1..len).filter(|&b| self.word[a] > self.word[b]).count())
            .sum()
    }

    /// Kendall tau distance: Hamming distance between inversion sets, which
    /// equals graph distance in `Perm(n)`.
    pub fn kendall_distance(&self, other: &Permutation) -> Result<usize> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch { expected: self.n(), found: other.n() });
        }
        Ok(self.inversion_set().hamming(&other.inversion_set()))
    }

    /// Canonical id of the edge `{π, τ_i π}`.
    pub fn edge_id(&self, i: usize) -> Result<EdgeId> {
        self.check_generator(i)?;
        let (a, b) = self.value_positions(i);
        Ok(self.edge_id_from_positions(self.rank(), i, a, b))
    }

    /// Edge id given this vertex's rank and the positions of values `i`, `i+1`.
    pub(crate) fn edge_id_from_positions(&self, rank: VertexRank, i: usize, a: usize, b: usize) -> EdgeId {
        let n = self.n() as u64;
        let low = if a < b { rank.0 } else { neighbor_rank(self.n(), rank.0, a, b) };
        EdgeId(low * n + (i as u64 - 1))
    }

    /// 0-based positions of values `i` and `i + 1`.
    pub(crate) fn value_positions(&self, i: usize) -> (usize, usize) {
        let mut a = usize::MAX;
        let mut b = usize::MAX;
        for (j, &v) in self.word.iter().enumerate() {
            if v as usize == i {
                a = j;
            } else if v as usize == i + 1 {
                b = j;
            }
        }
        (a, b)
    }

    /// Iterator over all of `S_{n+1}` in rank order.
    pub fn all(n: usize) -> Result<LexPermutations> {
        check_dimension(n)?;
        Ok(LexPermutations { next: Some((1..=n as u8 + 1).collect()) })
    }
}

/// Rank of `τ_i π` given `π`'s rank and the 0-based positions `a`, `b` of
/// values `i` and `i + 1`.
///
/// Swapping two adjacent values only changes the Lehmer digit at the earlier
/// of the two positions, by exactly one.
pub(crate) fn neighbor_rank(n: usize, rank: u64, a: usize, b: usize) -> u64 {
    if a < b {
        rank + factorial(n - a)
    } else {
        rank - factorial(n - b)
    }
}

/// Advances `word` to its lexicographic successor; `false` at the last word.
pub(crate) fn next_lex(word: &mut [u8]) -> bool {
    let len = word.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = len - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}

/// Iterator produced by [`Permutation::all`].
pub struct LexPermutations {
    next: Option<Vec<u8>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lex(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { word: current })
    }
}

/// Inversion set of a permutation as a bit vector over position pairs
/// `{a, b}`, `a < b`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InversionSet {
    n: usize,
    bits: Vec<u64>,
}

impl InversionSet {
    pub fn empty(n: usize) -> Self {
        let len = pair_count(n);
        InversionSet { n, bits: vec![0; len.div_ceil(64)] }
    }

    /// Number of bits, `(n+1) n / 2`.
    pub fn len(&self) -> usize {
        pair_count(self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    fn insert_index(&mut self, k: usize) {
        self.bits[k / 64] |= 1 << (k % 64);
    }

    fn get_index(&self, k: usize) -> bool {
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    /// Whether the 1-based position pair `{a, b}` is an inversion.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.get_index(pair_index(self.n + 1, a, b))
    }

    /// Number of set bits.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &InversionSet) -> usize {
        self.bits.iter().zip(&other.bits).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
    }

    /// The pairs as 1-based `(a, b)` with `a < b`, in canonical order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let m = self.n + 1;
        let mut out = Vec::new();
        let mut k = 0;
        for a in 1..=m {
            for b in a + 1..=m {
                if self.get_index(k) {
                    out.push((a, b));
                }
                k += 1;
            }
        }
        out
    }

    /// Hex string of the integer `Σ bit_k 2^k`, most significant digit
    /// first, zero-padded to `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nibble = 0u32;
                for t in 0..4 {
                    let k = 4 * d + t;
                    if k < self.len() && self.get_index(k) {
                        nibble |= 1 << t;
                    }
                }
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    /// Parses the format written by [`InversionSet::to_hex`].
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut set = InversionSet::empty(n);
        let len = set.len();
        let bad = || Error::InvalidParameter(format!("bad inversion-set hex {hex:?} for n = {n}"));
        if hex.len() != len.div_ceil(4) {
            return Err(bad());
        }
        for (d, ch) in hex.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(bad)?;
            for t in 0..4 {
                if nibble >> t & 1 == 1 {
                    let k = 4 * d + t;
                    if k >= len {
                        return Err(bad());
                    }
                    set.insert_index(k);
                }
            }
        }
        Ok(set)
    }
}

fn pair_count(n: usize) -> usize {
    (n + 1) * n / 2
}

/// Index of the 1-based pair `(a, b)`, `a < b <= m`, in lexicographic order.
fn pair_index(m: usize, a: usize, b: usize) -> usize {
    (a - 1) * (2 * m - a) / 2 + (b - a - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashSet, VecDeque};

    fn p(word: &[u8]) -> Permutation {
        Permutation::new(word.to_vec()).unwrap()
    }

    fn bfs_distances(n: usize, source: &Permutation) -> Vec<usize> {
        let count = vertex_count(n) as usize;
        let mut dist = vec![usize::MAX; count];
        dist[source.rank().0 as usize] = 0;
        let mut queue = VecDeque::from([source.clone()]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.rank().0 as usize];
            for (_, y) in x.neighbors() {
                let r = y.rank().0 as usize;
                if dist[r] == usize::MAX {
                    dist[r] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    #[test]
    fn generator_examples() {
        assert_eq!(p(&[1, 2, 3]).apply_generator(1).unwrap(), p(&[2, 1, 3]));
        assert_eq!(p(&[2, 1, 3]).apply_generator(2).unwrap(), p(&[3, 1, 2]));
        assert!(p(&[1, 2, 3]).apply_generator(0).is_err());
        assert!(p(&[1, 2, 3]).apply_generator(3).is_err());
    }

    #[test]
    fn generator_is_involution_and_touches_two_positions() {
        for n in 1..=4 {
            for x in Permutation::all(n).unwrap() {
                for i in 1..=n {
                    let y = x.apply_generator(i).unwrap();
                    assert_eq!(y.apply_generator(i).unwrap(), x);
                    let diff: Vec<usize> =
                        (0..=n).filter(|&j| x.word()[j] != y.word()[j]).collect();
                    assert_eq!(diff.len(), 2);
                    for j in diff {
                        assert!(x.word()[j] as usize == i || x.word()[j] as usize == i + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_words() {
        assert!(Permutation::new(vec![1]).is_err());
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![0, 1, 2]).is_err());
        assert!(Permutation::new(vec![1, 2, 4]).is_err());
    }

    #[test]
    fn neighbors_of_identity() {
        let nb: Vec<Permutation> = p(&[1, 2, 3]).neighbors().into_iter().map(|(_, y)| y).collect();
        assert_eq!(nb, vec![p(&[2, 1, 3]), p(&[1, 3, 2])]);
    }

    #[test]
    fn regular_and_symmetric() {
        for n in 1..=5 {
            let mut edges = 0u64;
            for x in Permutation::all(n).unwrap() {
                let nb = x.neighbors();
                let distinct: HashSet<_> = nb.iter().map(|(_, y)| y.clone()).collect();
                assert_eq!(distinct.len(), n);
                assert!(!distinct.contains(&x));
                for (_, y) in &nb {
                    assert!(y.neighbors().iter().any(|(_, z)| *z == x));
                }
                edges += n as u64;
            }
            assert_eq!(edges / 2, edge_count(n));
        }
    }

    #[test]
    fn rank_unrank_examples() {
        assert_eq!(Permutation::identity(4).unwrap().rank(), VertexRank(0));
        assert_eq!(Permutation::unrank(2, VertexRank(5)).unwrap(), p(&[3, 2, 1]));
        assert!(Permutation::unrank(2, VertexRank(6)).is_err());
        // lex order of S_3 by hand
        let words: Vec<Vec<u8>> = Permutation::all(2).unwrap().map(|x| x.word().to_vec()).collect();
        assert_eq!(
            words,
            vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 1, 3], vec![2, 3, 1], vec![3, 1, 2], vec![3, 2, 1]]
        );
    }

    #[test]
    fn rank_roundtrip_and_lex_monotone() {
        for n in 1..=5 {
            let mut prev: Option<Permutation> = None;
            for (r, x) in Permutation::all(n).unwrap().enumerate() {
                assert_eq!(x.rank(), VertexRank(r as u64));
                assert_eq!(Permutation::unrank(n, VertexRank(r as u64)).unwrap(), x);
                if let Some(q) = prev {
                    assert!(q.word() < x.word());
                }
                prev = Some(x);
            }
        }
    }

    #[test]
    fn inversion_set_examples() {
        assert!(Permutation::identity(3).unwrap().inversion_set().is_empty());
        let rev = Permutation::reversal(4).unwrap().inversion_set();
        assert_eq!(rev.count(), 10);
        assert_eq!(p(&[2, 1, 3]).inversion_set().pairs(), vec![(1, 2)]);
        let s = p(&[3, 1, 2]).inversion_set();
        assert!(s.contains(1, 2) && s.contains(1, 3) && !s.contains(2, 3));
        assert_eq!(s.count(), p(&[3, 1, 2]).inversions());
    }

    #[test]
    fn inversion_hex_format() {
        // bit 0 = pair {1,2}
        assert_eq!(p(&[2, 1, 3]).inversion_set().to_hex(), "1");
        // n = 3 has 6 pairs -> 2 hex digits; reversal sets all six
        assert_eq!(Permutation::reversal(3).unwrap().inversion_set().to_hex(), "3f");
        for x in Permutation::all(3).unwrap() {
            let s = x.inversion_set();
            assert_eq!(InversionSet::from_hex(3, &s.to_hex()).unwrap(), s);
        }
        assert!(InversionSet::from_hex(3, "ff").is_err());
    }

    #[test]
    fn kendall_matches_bfs() {
        for n in 1..=4 {
            let all: Vec<Permutation> = Permutation::all(n).unwrap().collect();
            for x in &all {
                let dist = bfs_distances(n, x);
                for y in &all {
                    assert_eq!(x.kendall_distance(y).unwrap(), dist[y.rank().0 as usize]);
                }
            }
            let diameter = *bfs_distances(n, &all[0]).iter().max().unwrap();
            assert_eq!(diameter, (n + 1) * n / 2);
        }
        let id = Permutation::identity(3).unwrap();
        assert_eq!(id.kendall_distance(&Permutation::reversal(3).unwrap()).unwrap(), 6);
        assert!(id.kendall_distance(&Permutation::identity(2).unwrap()).is_err());
    }

    #[test]
    fn edge_ids() {
        let id = Permutation::identity(2).unwrap();
        // identity is the smaller endpoint, rank 0, generator 1
        assert_eq!(id.edge_id(1).unwrap(), EdgeId(0));
        let mut ids = HashSet::new();
        for x in Permutation::all(3).unwrap() {
            for i in 1..=3 {
                let e = x.edge_id(i).unwrap();
                let y = x.apply_generator(i).unwrap();
                assert_eq!(e, y.edge_id(i).unwrap());
                assert!(e.0 < 3 * 24);
                let (low, g) = e.decode(3);
                assert_eq!(g, i);
                assert_eq!(low, x.rank().min(y.rank()));
                ids.insert(e);
            }
        }
        assert_eq!(ids.len() as u64, edge_count(3));
        assert_eq!(ids.len(), 36);
    }

    #[test]
    fn fast_neighbor_rank() {
        for n in 1..=5 {
            for x in Permutation::all(n).unwrap() {
                for i in 1..=n {
                    let (a, b) = x.value_positions(i);
                    let y = x.apply_generator(i).unwrap();
                    assert_eq!(neighbor_rank(n, x.rank().0, a, b), y.rank().0);
                }
            }
        }
    }

    #[test]
    fn json_is_array() {
        let x = p(&[2, 1, 3]);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[2,1,3]");
        let y: Permutation = serde_json::from_str("[3,1,2]").unwrap();
        assert_eq!(y, p(&[3, 1, 2]));
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }

    #[test]
    fn large_dimension_limits() {
        assert!(Permutation::identity(MAX_N).is_ok());
        assert!(Permutation::identity(MAX_N + 1).is_err());
        let rev = Permutation::reversal(MAX_N).unwrap();
        assert_eq!(rev.rank().0, vertex_count(MAX_N) - 1);
        let e = rev.edge_id(MAX_N).unwrap();
        assert!(e.0 < MAX_N as u64 * vertex_count(MAX_N));
    }
}
