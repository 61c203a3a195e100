use rand::Rng as _;

use super::{Aabb, World};
use crate::error::{Error, Result};
use crate::geometry::seeded_rng;

/// Worlds with at most this many boxes get an exact inclusion-exclusion volume.
pub const EXACT_VOLUME_MAX_BOXES: usize = 20;
pub const MONTE_CARLO_SAMPLES: usize = 1_000_000;
pub const MONTE_CARLO_SEED: u64 = 0x005e_ed0f_f4ee;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeMethod {
    Exact,
    MonteCarlo { seed: u64, samples: usize, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeVolume {
    pub value: f64,
    pub method: VolumeMethod,
}

impl FreeVolume {
    pub fn is_exact(&self) -> bool {
        self.method == VolumeMethod::Exact
    }
}

/// `1 - |union of obstacles|`: exact up to [`EXACT_VOLUME_MAX_BOXES`] boxes,
/// Monte Carlo with the default seed and sample count beyond that.
pub fn free_space_volume(world: &World) -> Result<FreeVolume> {
    if world.obstacles().len() > EXACT_VOLUME_MAX_BOXES {
        return free_space_volume_monte_carlo(world, MONTE_CARLO_SEED, MONTE_CARLO_SAMPLES);
    }
    let value = 1.0 - union_volume(world.obstacles(), world.dim());
    if value <= 1e-12 {
        return Err(Error::DegenerateWorld);
    }
    Ok(FreeVolume { value: value.min(1.0), method: VolumeMethod::Exact })
}

pub fn free_space_volume_monte_carlo(world: &World, seed: u64, samples: usize) -> Result<FreeVolume> {
    if samples == 0 {
        return Err(Error::InvalidParameter("Monte Carlo volume needs at least one sample".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut p = vec![0.0; world.dim()];
    let mut free = 0usize;
    for _ in 0..samples {
        p.iter_mut().for_each(|x| *x = rng.random::<f64>());
        free += world.is_free_unchecked(&p) as usize;
    }
    if free == 0 {
        return Err(Error::DegenerateWorld);
    }
    let value = free as f64 / samples as f64;
    let std_error = (value * (1.0 - value) / samples as f64).sqrt();
    Ok(FreeVolume { value, method: VolumeMethod::MonteCarlo { seed, samples, std_error } })
}

/// Inclusion-exclusion over box subsets, depth-first. A subset whose
/// intersection has zero volume is pruned along with all its supersets.
fn union_volume(boxes: &[Aabb], d: usize) -> f64 {
    fn recurse(boxes: &[Aabb], start: usize, lo: &[f64], hi: &[f64], sign: f64, total: &mut f64) {
        let mut nlo = vec![0.0; lo.len()];
        let mut nhi = vec![0.0; hi.len()];
        for (k, b) in boxes.iter().enumerate().skip(start) {
            let mut vol = 1.0;
            for a in 0..lo.len() {
                nlo[a] = lo[a].max(b.lo[a]);
                nhi[a] = hi[a].min(b.hi[a]);
                vol *= (nhi[a] - nlo[a]).max(0.0);
            }
            if vol > 0.0 {
                *total += sign * vol;
                recurse(boxes, k + 1, &nlo, &nhi, -sign, total);
            }
        }
    }
    let mut total = 0.0;
    recurse(boxes, 0, &vec![0.0; d], &vec![1.0; d], 1.0, &mut total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(d: usize, boxes: &[(&[f64], &[f64])]) -> World {
        let obs = boxes.iter().map(|(l, h)| Aabb::new(l.to_vec(), h.to_vec()).unwrap()).collect();
        World::new(d, obs, 1e-3).unwrap()
    }

    #[test]
    fn no_obstacles_is_exactly_one() {
        let v = free_space_volume(&World::empty(5).unwrap()).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.is_exact());
    }

    #[test]
    fn single_and_overlapping_boxes() {
        let w = world(2, &[(&[0.0, 0.0], &[0.5, 0.5])]);
        assert!((free_space_volume(&w).unwrap().value - 0.75).abs() < 1e-15);

        // 0.5 + 0.5 - 0.25 overlap = 0.75 covered.
        let w = world(2, &[(&[0.0, 0.0], &[0.5, 1.0]), (&[0.25, 0.0], &[0.75, 1.0])]);
        assert!((free_space_volume(&w).unwrap().value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn triple_overlap() {
        // Three unit-width slabs offset by 0.1 in 1-d: union [0.1, 0.7].
        let w = world(1, &[(&[0.1], &[0.5]), (&[0.2], &[0.6]), (&[0.3], &[0.7])]);
        assert!((free_space_volume(&w).unwrap().value - 0.4).abs() < 1e-14);
    }

    #[test]
    fn full_cover_is_degenerate() {
        let w = world(2, &[(&[0.0, 0.0], &[0.6, 1.0]), (&[0.5, 0.0], &[1.0, 1.0])]);
        assert_eq!(free_space_volume(&w), Err(Error::DegenerateWorld));
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let w = world(
            3,
            &[
                (&[0.0, 0.0, 0.0], &[0.5, 0.5, 0.5]),
                (&[0.3, 0.3, 0.3], &[0.8, 0.9, 1.0]),
                (&[0.6, 0.0, 0.2], &[1.0, 0.4, 0.7]),
            ],
        );
        let exact = free_space_volume(&w).unwrap();
        let mc = free_space_volume_monte_carlo(&w, 99, 200_000).unwrap();
        let VolumeMethod::MonteCarlo { std_error, samples, seed } = mc.method else { panic!() };
        assert_eq!((samples, seed), (200_000, 99));
        assert!((exact.value - mc.value).abs() < 3.0 * std_error, "{exact:?} vs {mc:?}");
    }

    #[test]
    fn many_boxes_switch_to_monte_carlo() {
        let boxes: Vec<Aabb> = (0..21)
            .map(|k| {
                let x = k as f64 / 21.0;
                Aabb::new(vec![x, 0.0], vec![x + 0.02, 0.5]).unwrap()
            })
            .collect();
        let w = World::new(2, boxes, 1e-3).unwrap();
        let v = free_space_volume(&w).unwrap();
        assert!(!v.is_exact());
        let VolumeMethod::MonteCarlo { std_error, .. } = v.method else { panic!() };
        assert!((v.value - (1.0 - 21.0 * 0.01)).abs() < 3.0 * std_error);
    }
}
