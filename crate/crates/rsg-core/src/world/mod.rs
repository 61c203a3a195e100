//! Axis-aligned box worlds in the unit cube: point and segment collision
//! checks, free-space sampling and free-space volume.
//!
//! Obstacles are closed boxes, so a point on a face collides.

mod scenario;
mod volume;

use std::sync::OnceLock;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::geometry::{squared_dist_unchecked, PointSet, Rng};

pub use scenario::{make_scenario, Scenario, ScenarioFile, SCENARIO_NAMES};
pub use volume::{
    free_space_volume, free_space_volume_monte_carlo, FreeVolume, VolumeMethod, EXACT_VOLUME_MAX_BOXES,
    MONTE_CARLO_SAMPLES, MONTE_CARLO_SEED,
};

pub const DEFAULT_RESOLUTION: f64 = 1e-3;

/// Consecutive rejections after which free-space sampling gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(0.0 <= *l && l <= h && *h <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "box bounds must satisfy 0 <= lo <= hi <= 1, got [{l}, {h}]"
                )));
            }
        }
        Ok(Aabb { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(p).all(|((l, h), x)| l <= x && x <= h)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }
}

#[derive(Debug, Clone)]
pub struct World {
    d: usize,
    obstacles: Vec<Aabb>,
    resolution: f64,
    volume: OnceLock<FreeVolume>,
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.obstacles == other.obstacles && self.resolution == other.resolution
    }
}

impl World {
    pub fn new(d: usize, obstacles: Vec<Aabb>, resolution: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!("resolution must be positive, got {resolution}")));
        }
        for b in &obstacles {
            if b.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: b.dim() });
            }
        }
        Ok(World { d, obstacles, resolution, volume: OnceLock::new() })
    }

    pub fn empty(d: usize) -> Result<Self> {
        World::new(d, Vec::new(), DEFAULT_RESOLUTION)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn obstacles(&self) -> &[Aabb] {
        &self.obstacles
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: p.len() });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn is_free_unchecked(&self, p: &[f64]) -> bool {
        !self.obstacles.iter().any(|b| b.contains(p))
    }

    pub fn is_free(&self, p: &[f64]) -> Result<bool> {
        self.check(p)?;
        Ok(self.is_free_unchecked(p))
    }

    /// Samples the segment every `resolution` (endpoints included) and reports
    /// whether all samples are free. Endpoints are put in a canonical order
    /// first so the answer does not depend on direction.
    pub fn collision_free_segment(&self, a: &[f64], b: &[f64]) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.segment_free_unchecked(a, b))
    }

    pub(crate) fn segment_free_unchecked(&self, a: &[f64], b: &[f64]) -> bool {
        if self.obstacles.is_empty() {
            return true;
        }
        let (a, b) = if a.partial_cmp(b) == Some(std::cmp::Ordering::Greater) { (b, a) } else { (a, b) };
        let len = squared_dist_unchecked(a, b).sqrt();
        let steps = ((len / self.resolution).ceil() as usize).max(1);
        let mut p = vec![0.0; self.d];
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            for ((x, &u), &v) in p.iter_mut().zip(a).zip(b) {
                *x = u + t * (v - u);
            }
            if !self.is_free_unchecked(&p) {
                return false;
            }
        }
        true
    }

    /// Free-space volume, computed once and cached.
    pub fn free_volume(&self) -> Result<FreeVolume> {
        if let Some(v) = self.volume.get() {
            return Ok(*v);
        }
        let v = free_space_volume(self)?;
        Ok(*self.volume.get_or_init(|| v))
    }

    pub fn sample_free_point(&self, rng: &mut Rng) -> Result<Vec<f64>> {
        let mut p = vec![0.0; self.d];
        for _ in 0..MAX_CONSECUTIVE_REJECTIONS {
            p.iter_mut().for_each(|x| *x = rng.random::<f64>());
            if self.is_free_unchecked(&p) {
                return Ok(p);
            }
        }
        Err(Error::SamplingStalled(MAX_CONSECUTIVE_REJECTIONS))
    }
}

/// `n` free configurations by rejection sampling.
pub fn sample_free(world: &World, rng: &mut Rng, n: usize) -> Result<PointSet> {
    let mut set = PointSet::new(world.dim())?;
    crate::geometry::sample_free_into(world, rng, n, &mut set)?;
    Ok(set)
}
