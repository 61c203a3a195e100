//! One axis-parallel grid with a uniform random shift, bucketing point indices by cell.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::geometry::{PointSet, Rng};

/// Hasher for cell keys (slices of signed cell indices).
///
/// Each 8-byte lane is folded in with a multiply-rotate step and the state is
/// finalized with the splitmix64 mixer, so neighboring cells land far apart.
#[derive(Default, Clone, Copy)]
pub struct CellKeyHasher {
    state: u64,
}

const LANE_MUL: u64 = 0x9e37_79b9_7f4a_7c15;

impl CellKeyHasher {
    #[inline]
    fn fold(&mut self, lane: u64) {
        self.state = (self.state.rotate_left(23) ^ lane).wrapping_mul(LANE_MUL);
    }
}

impl Hasher for CellKeyHasher {
    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        let mut chunks = bytes.chunks_exact(8);
        for c in &mut chunks {
            self.fold(u64::from_le_bytes(c.try_into().unwrap()));
        }
        let rest = chunks.remainder();
        if !rest.is_empty() {
            let mut buf = [0u8; 8];
            buf[..rest.len()].copy_from_slice(rest);
            self.fold(u64::from_le_bytes(buf));
        }
    }

    #[inline]
    fn write_u64(&mut self, v: u64) {
        self.fold(v);
    }

    #[inline]
    fn write_usize(&mut self, v: usize) {
        self.fold(v as u64);
    }

    #[inline]
    fn finish(&self) -> u64 {
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

pub type CellMap<V> = HashMap<Box<[i64]>, V, BuildHasherDefault<CellKeyHasher>>;

/// Grid cell of coordinate `x`: `floor((x - shift) / c)`, rounding toward -inf.
#[inline]
pub fn cell_index(x: f64, shift: f64, c: f64) -> i64 {
    ((x - shift) / c).floor() as i64
}

#[derive(Debug, Clone)]
pub struct ShiftedGrid {
    cell_size: f64,
    shift: Vec<f64>,
    buckets: CellMap<Vec<u32>>,
}

impl ShiftedGrid {
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn bucket(&self, key: &[i64]) -> Option<&[u32]> {
        self.buckets.get(key).map(Vec::as_slice)
    }

    /// Non-empty cells with their point indices; indices within a bucket ascend.
    pub fn buckets(&self) -> impl Iterator<Item = (&[i64], &[u32])> {
        self.buckets.iter().map(|(k, v)| (&**k, v.as_slice()))
    }

    pub fn cell_of(&self, p: &[f64]) -> Vec<i64> {
        p.iter().zip(&self.shift).map(|(&x, &s)| cell_index(x, s, self.cell_size)).collect()
    }
}

/// Buckets every point of `points` into a grid of cell size `c` whose shift is
/// drawn uniformly from `[0, c)^d` using `rng`.
pub fn build_grid(points: &PointSet, c: f64, rng: &mut Rng) -> Result<ShiftedGrid> {
    check_cell_size(c)?;
    let shift: Vec<f64> = (0..points.dim()).map(|_| rng.random::<f64>() * c).collect();
    build_grid_with_shift(points, c, shift)
}

pub fn build_grid_with_shift(points: &PointSet, c: f64, shift: Vec<f64>) -> Result<ShiftedGrid> {
    check_cell_size(c)?;
    if shift.len() != points.dim() {
        return Err(Error::DimensionMismatch { expected: points.dim(), got: shift.len() });
    }
    let mut buckets: CellMap<Vec<u32>> = CellMap::default();
    let mut key = vec![0i64; points.dim()];
    for (i, p) in points.iter().enumerate() {
        for ((k, &x), &s) in key.iter_mut().zip(p).zip(&shift) {
            *k = cell_index(x, s, c);
        }
        match buckets.get_mut(key.as_slice()) {
            Some(bucket) => bucket.push(i as u32),
            None => {
                buckets.insert(key.clone().into_boxed_slice(), vec![i as u32]);
            }
        }
    }
    Ok(ShiftedGrid { cell_size: c, shift, buckets })
}

fn check_cell_size(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("cell size must be positive, got {c}")));
    }
    Ok(())
}
