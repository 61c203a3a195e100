//! Deduplicating stores for reported neighbor pairs.
//!
//! Pairs are canonicalized to `(min, max)` on the way in, so `contains(i, j)`
//! and `contains(j, i)` always agree. Two backends:
//!
//! * [`HashSetStore`]: one hash set per point holding the larger partner
//!   indices. Memory is linear in the number of stored pairs.
//! * [`BitMatrixStore`]: the strict upper triangle of an `n x n` bit matrix,
//!   flattened. Constant-time operations, but `n(n-1)/2` bits regardless of
//!   output size, so construction is refused above a memory cap.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};

/// A canonical neighbor pair, `0 <= .0 < .1`.
pub type Pair = (u32, u32);

pub trait PairStore {
    /// Inserts `{i, j}`. Returns `true` if the pair was not present.
    fn insert(&mut self, i: u32, j: u32) -> Result<bool>;

    fn contains(&self, i: u32, j: u32) -> bool;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of points the store was sized for.
    fn num_points(&self) -> usize;

    /// All stored pairs, canonical and sorted ascending.
    fn pairs(&self) -> Vec<Pair>;
}

#[inline]
fn canonical(i: u32, j: u32, n: usize) -> Result<Pair> {
    if i == j {
        return Err(Error::InvalidPair(i));
    }
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    if hi as usize >= n {
        return Err(Error::InvalidIndex { index: hi, len: n });
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Default)]
pub struct HashSetStore {
    sets: Vec<FxHashSet<u32>>,
    len: usize,
}

impl HashSetStore {
    pub fn new(n: usize) -> Self {
        HashSetStore { sets: vec![FxHashSet::default(); n], len: 0 }
    }
}

impl PairStore for HashSetStore {
    #[inline]
    fn insert(&mut self, i: u32, j: u32) -> Result<bool> {
        let (lo, hi) = canonical(i, j, self.sets.len())?;
        let fresh = self.sets[lo as usize].insert(hi);
        self.len += fresh as usize;
        Ok(fresh)
    }

    #[inline]
    fn contains(&self, i: u32, j: u32) -> bool {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.sets.get(lo as usize).is_some_and(|s| s.contains(&hi))
    }

    fn len(&self) -> usize {
        self.len
    }

    fn num_points(&self) -> usize {
        self.sets.len()
    }

    fn pairs(&self) -> Vec<Pair> {
        let mut out = Vec::with_capacity(self.len);
        for (i, set) in self.sets.iter().enumerate() {
            let start = out.len();
            out.extend(set.iter().map(|&j| (i as u32, j)));
            out[start..].sort_unstable();
        }
        out
    }
}

/// Default memory cap for [`BitMatrixStore`]: 256 MiB.
pub const DEFAULT_BIT_MATRIX_CAP_BYTES: u64 = 256 << 20;

#[derive(Debug, Clone)]
pub struct BitMatrixStore {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl BitMatrixStore {
    /// Fails with [`Error::MemoryCap`] when `n(n-1)/2` bits exceed `cap_bytes`.
    pub fn new(n: usize, cap_bytes: u64) -> Result<Self> {
        let bits = Self::triangle_bits(n);
        let words = bits.div_ceil(64);
        let needed = words * 8;
        if needed > cap_bytes {
            return Err(Error::MemoryCap { needed, cap: cap_bytes });
        }
        Ok(BitMatrixStore { n, words: vec![0; words as usize], len: 0 })
    }

    fn triangle_bits(n: usize) -> u64 {
        let n = n as u64;
        n * n.saturating_sub(1) / 2
    }

    /// Row-major offset of `(i, j)`, `i < j`, in the strict upper triangle.
    #[inline]
    fn bit_index(&self, i: u32, j: u32) -> u64 {
        let (i, j, n) = (i as u64, j as u64, self.n as u64);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }
}

impl PairStore for BitMatrixStore {
    #[inline]
    fn insert(&mut self, i: u32, j: u32) -> Result<bool> {
        let (lo, hi) = canonical(i, j, self.n)?;
        let bit = self.bit_index(lo, hi);
        let word = &mut self.words[(bit / 64) as usize];
        let mask = 1u64 << (bit % 64);
        let fresh = *word & mask == 0;
        *word |= mask;
        self.len += fresh as usize;
        Ok(fresh)
    }

    #[inline]
    fn contains(&self, i: u32, j: u32) -> bool {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if lo == hi || hi as usize >= self.n {
            return false;
        }
        let bit = self.bit_index(lo, hi);
        self.words[(bit / 64) as usize] & (1u64 << (bit % 64)) != 0
    }

    fn len(&self) -> usize {
        self.len
    }

    fn num_points(&self) -> usize {
        self.n
    }

    fn pairs(&self) -> Vec<Pair> {
        let mut out = Vec::with_capacity(self.len);
        let mut row_start = 0u64;
        for i in 0..self.n as u64 {
            let row_len = self.n as u64 - i - 1;
            let mut bit = row_start;
            let end = row_start + row_len;
            while bit < end {
                let word = self.words[(bit / 64) as usize] >> (bit % 64);
                if word == 0 {
                    bit += 64 - bit % 64;
                    continue;
                }
                bit += word.trailing_zeros() as u64;
                if bit >= end {
                    break;
                }
                out.push((i as u32, (i + 1 + bit - row_start) as u32));
                bit += 1;
            }
            row_start = end;
        }
        out
    }
}

/// Which [`PairStore`] backend to allocate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PairStoreKind {
    #[default]
    HashSets,
    BitMatrix {
        cap_bytes: u64,
    },
}

impl PairStoreKind {
    pub fn bit_matrix() -> Self {
        PairStoreKind::BitMatrix { cap_bytes: DEFAULT_BIT_MATRIX_CAP_BYTES }
    }

    pub fn allocate(self, n: usize) -> Result<Box<dyn PairStore + Send + Sync>> {
        Ok(match self {
            PairStoreKind::HashSets => Box::new(HashSetStore::new(n)),
            PairStoreKind::BitMatrix { cap_bytes } => Box::new(BitMatrixStore::new(n, cap_bytes)?),
        })
    }
}

/// `|reported| / |truth|`, taken as 1 when `truth` is empty.
///
/// Assumes `reported` is a subset of `truth`, which holds for every backend in
/// this crate because pairs are distance-checked before they are stored.
pub fn recall(reported: &(impl PairStore + ?Sized), truth: &(impl PairStore + ?Sized)) -> f64 {
    recall_from_counts(reported.len(), truth.len())
}

pub fn recall_from_counts(reported: usize, truth: usize) -> f64 {
    if truth == 0 {
        1.0
    } else {
        reported as f64 / truth as f64
    }
}

/// True when every pair of `a` is in `b`.
pub fn is_subset(a: &(impl PairStore + ?Sized), b: &(impl PairStore + ?Sized)) -> bool {
    a.len() <= b.len() && a.pairs().iter().all(|&(i, j)| b.contains(i, j))
}

pub fn same_pairs(a: &(impl PairStore + ?Sized), b: &(impl PairStore + ?Sized)) -> bool {
    a.len() == b.len() && a.pairs() == b.pairs()
}

/// Per-point neighbor lists with every pair stored in both directions, so
/// repeated fixed-radius queries become lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborLists {
    lists: Vec<Vec<u32>>,
}

impl NeighborLists {
    pub fn from_store(store: &(impl PairStore + ?Sized), n: usize) -> Result<Self> {
        Self::from_pairs(store.pairs(), n)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = Pair>, n: usize) -> Result<Self> {
        let mut lists = vec![Vec::new(); n];
        for (i, j) in pairs {
            for idx in [i, j] {
                if idx as usize >= n {
                    return Err(Error::InvalidIndex { index: idx, len: n });
                }
            }
            lists[i as usize].push(j);
            lists[j as usize].push(i);
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Ok(NeighborLists { lists })
    }

    /// Neighbors of `i` in ascending index order.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.lists[i]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn pair_count(&self) -> usize {
        self.lists.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Neighbor lists straight from a store; convenience for [`NeighborLists::from_store`].
pub fn neighbor_lists_from_store(store: &(impl PairStore + ?Sized), n: usize) -> Result<NeighborLists> {
    NeighborLists::from_store(store, n)
}
