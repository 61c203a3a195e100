//! Points in the unit hypercube, distances and seeded sampling.
//!
//! All randomness in the crate flows from [`Rng`], a ChaCha8 stream keyed by a
//! 64-bit seed. Independent streams (per grid, per trial, per worker) are split
//! off with [`derive_seed`] rather than shared.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The repository-wide generator. Same seed, same stream, on every platform.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed from `seed` and a stream id (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    /// A point with every coordinate equal to `value`.
    pub fn splat(d: usize, value: f64) -> Self {
        Point(vec![value; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `n` points of dimension `d`, stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(PointSet { dim, coords: Vec::new() })
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut set = PointSet::new(dim)?;
        for p in points {
            set.push(p.as_ref())?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<u32> {
        check_dim(self.dim, p.len())?;
        let index = self.len() as u32;
        self.coords.extend_from_slice(p);
        Ok(index)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Squared distance between stored points `i` and `j`.
    #[inline]
    pub fn squared_dist_between(&self, i: usize, j: usize) -> f64 {
        squared_dist_unchecked(self.point(i), self.point(j))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Uniform i.i.d. points in `[0,1]^d`.
pub fn sample_unit_hypercube(rng: &mut Rng, n: usize, d: usize) -> Result<PointSet> {
    let mut set = PointSet::new(d)?;
    set.coords.reserve(n * d);
    for _ in 0..n * d {
        set.coords.push(rng.random::<f64>());
    }
    Ok(set)
}

/// Appends `n` free configurations of `world` to `out`.
pub(crate) fn sample_free_into(world: &crate::world::World, rng: &mut Rng, n: usize, out: &mut PointSet) -> Result<()> {
    for _ in 0..n {
        out.push(&world.sample_free_point(rng)?)?;
    }
    Ok(())
}

#[inline]
pub(crate) fn squared_dist_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn squared_dist(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    Ok(squared_dist_unchecked(a, b))
}

pub fn euclidean_dist(a: &[f64], b: &[f64]) -> Result<f64> {
    squared_dist(a, b).map(f64::sqrt)
}

#[inline]
pub(crate) fn dist_unchecked(a: &[f64], b: &[f64]) -> f64 {
    squared_dist_unchecked(a, b).sqrt()
}
