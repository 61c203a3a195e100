//! All-pairs fixed-radius neighbor search with randomly shifted grids.
//!
//! Each of `m` rounds overlays an axis-parallel grid of cell size
//! `c = c_tilde * r` under a fresh uniform shift, then brute-forces the pairs
//! inside every non-empty cell and stores those within distance `r`. Pairs
//! already in the store are skipped before any distance work, so later rounds
//! only pay for pairs they have not seen yet.
//!
//! The result is approximate: a neighboring pair is missed only if every one of
//! the `m` grids separates it. Nothing outside the radius is ever reported.

mod grid;
mod params;
mod store;
mod tune;

pub use grid::{build_grid, build_grid_with_shift, cell_index, CellKeyHasher, CellMap, ShiftedGrid};
pub use params::{lookup_params, GridParams, ParamTable, TableRow, SHIPPED_TABLE_CSV};
pub use store::{
    is_subset, neighbor_lists_from_store, recall, recall_from_counts, same_pairs, BitMatrixStore, HashSetStore,
    NeighborLists, Pair, PairStore, PairStoreKind, DEFAULT_BIT_MATRIX_CAP_BYTES,
};
pub use tune::{
    auto_tune, evaluate_candidates, select_best, CandidateEval, TuneConfig, TuneObjective, DEFAULT_C_TILDE_CANDIDATES,
    DEFAULT_M_CANDIDATES,
};

use crate::error::{Error, Result};
use crate::geometry::{PointSet, Rng};

/// Query radius, cell-size factor and grid count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsgParams {
    pub r: f64,
    pub c_tilde: f64,
    pub m: usize,
}

impl RsgParams {
    pub fn new(r: f64, c_tilde: f64, m: usize) -> Result<Self> {
        let p = RsgParams { r, c_tilde, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be >= 0, got {}", self.r)));
        }
        if !(self.c_tilde > 1.0 && self.c_tilde.is_finite()) {
            return Err(Error::InvalidParameter(format!("cell-size factor must be > 1, got {}", self.c_tilde)));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("grid count m must be >= 1".into()));
        }
        Ok(())
    }

    /// `c_tilde * r`. A zero radius only matches coincident points, which share
    /// a cell at any size, so it falls back to unit cells.
    pub fn cell_size(&self) -> f64 {
        if self.r > 0.0 {
            self.c_tilde * self.r
        } else {
            1.0
        }
    }
}

/// Work counters for one [`rsg_all_pairs`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RsgStats {
    pub grids: usize,
    pub buckets: usize,
    /// Same-cell pairs enumerated, over all grids.
    pub candidate_pairs: u64,
    /// Candidates skipped because the store already held them.
    pub filtered: u64,
    pub distance_checks: u64,
    /// Pairs found within the radius and handed to the store.
    pub insert_attempts: u64,
    /// Insertions that added a new pair.
    pub inserted: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsgOptions {
    /// Consult the store before computing a candidate's distance.
    pub filter_reported: bool,
}

impl Default for RsgOptions {
    fn default() -> Self {
        RsgOptions { filter_reported: true }
    }
}

/// Runs `params.m` shifted-grid rounds over `points`, adding every pair found
/// within `params.r` to `store`. Grid shifts are drawn from `rng` in order, so
/// runs with `m` and `m + 1` grids on the same seed share their first `m` grids.
pub fn rsg_all_pairs<S: PairStore + ?Sized>(
    points: &PointSet,
    params: &RsgParams,
    rng: &mut Rng,
    store: &mut S,
) -> Result<RsgStats> {
    rsg_all_pairs_with(points, params, rng, store, RsgOptions::default())
}

pub fn rsg_all_pairs_with<S: PairStore + ?Sized>(
    points: &PointSet,
    params: &RsgParams,
    rng: &mut Rng,
    store: &mut S,
    options: RsgOptions,
) -> Result<RsgStats> {
    params.validate()?;
    if store.num_points() < points.len() {
        return Err(Error::InvalidArgument(format!(
            "store sized for {} points, input has {}",
            store.num_points(),
            points.len()
        )));
    }
    let r2 = params.r * params.r;
    let c = params.cell_size();
    let mut stats = RsgStats::default();
    for _ in 0..params.m {
        let grid = build_grid(points, c, rng)?;
        stats.grids += 1;
        stats.buckets += grid.bucket_count();
        for (_, bucket) in grid.buckets() {
            for (a, &i) in bucket.iter().enumerate() {
                for &j in &bucket[a + 1..] {
                    stats.candidate_pairs += 1;
                    if options.filter_reported && store.contains(i, j) {
                        stats.filtered += 1;
                        continue;
                    }
                    stats.distance_checks += 1;
                    if points.squared_dist_between(i as usize, j as usize) <= r2 {
                        stats.insert_attempts += 1;
                        stats.inserted += store.insert(i, j)? as u64;
                    }
                }
            }
        }
    }
    Ok(stats)
}

/// Exact all-pairs result by checking every pair: `{(i, j) : i < j, |p_i - p_j| <= r}`.
pub fn brute_force_all_pairs(points: &PointSet, r: f64) -> Result<HashSetStore> {
    check_radius(r)?;
    let r2 = r * r;
    let mut store = HashSetStore::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points.squared_dist_between(i, j) <= r2 {
                store.insert(i as u32, j as u32)?;
            }
        }
    }
    Ok(store)
}

/// Size of the exact all-pairs result, without materializing it.
pub fn brute_force_count(points: &PointSet, r: f64) -> Result<usize> {
    check_radius(r)?;
    let r2 = r * r;
    let mut count = 0usize;
    for i in 0..points.len() {
        let pi = points.point(i);
        for j in i + 1..points.len() {
            count += (crate::geometry::squared_dist_unchecked(pi, points.point(j)) <= r2) as usize;
        }
    }
    Ok(count)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_unit_hypercube, seeded_rng};

    #[test]
    fn params_validation() {
        assert!(RsgParams::new(0.1, 1.0, 5).is_err());
        assert!(RsgParams::new(0.1, 1.2, 0).is_err());
        assert!(RsgParams::new(-0.1, 1.2, 5).is_err());
        let p = RsgParams::new(0.2, 1.5, 3).unwrap();
        assert!((p.cell_size() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_distinct_points_report_nothing() {
        let pts = sample_unit_hypercube(&mut seeded_rng(1), 200, 3).unwrap();
        let mut store = HashSetStore::new(pts.len());
        rsg_all_pairs(&pts, &RsgParams::new(0.0, 1.2, 4).unwrap(), &mut seeded_rng(2), &mut store).unwrap();
        assert!(store.is_empty());
    }

    #[test]
    fn zero_radius_reports_coincident_points() {
        let pts = PointSet::from_points(2, &[[0.5, 0.5], [0.5, 0.5], [0.1, 0.9]]).unwrap();
        let mut store = HashSetStore::new(3);
        rsg_all_pairs(&pts, &RsgParams::new(0.0, 1.2, 1).unwrap(), &mut seeded_rng(2), &mut store).unwrap();
        assert_eq!(store.pairs(), vec![(0, 1)]);
    }

    #[test]
    fn boundary_distance_is_inclusive() {
        let pts = PointSet::from_points(1, &[[0.25], [0.75]]).unwrap();
        let params = RsgParams::new(0.5, 4.0, 1).unwrap();
        // c = 2: the pair is reported exactly when no cell boundary falls in (0.25, 0.75].
        for seed in 0..200 {
            let shift = build_grid(&pts, params.cell_size(), &mut seeded_rng(seed)).unwrap().shift()[0];
            let together = !(0.25 < shift && shift <= 0.75);
            let mut store = HashSetStore::new(2);
            rsg_all_pairs(&pts, &params, &mut seeded_rng(seed), &mut store).unwrap();
            assert_eq!(store.pairs() == vec![(0, 1)], together, "seed {seed}, shift {shift}");
        }
        // A zero shift with c = 2 puts [0, 1] in a single cell.
        let grid = build_grid_with_shift(&pts, 2.0, vec![0.0]).unwrap();
        assert_eq!(grid.bucket_count(), 1);
    }

    #[test]
    fn unit_cube_split_probability_is_one_over_c() {
        // Under a uniform shift in [0, c), some boundary crosses [0, 1] on an
        // axis with probability 1/c, for any c >= 1.
        let pts = PointSet::from_points(1, &[[0.0], [1.0]]).unwrap();
        for c in [1.5, 3.0] {
            let trials = 20_000;
            let split =
                (0..trials).filter(|&s| build_grid(&pts, c, &mut seeded_rng(s)).unwrap().bucket_count() == 2).count();
            let p = 1.0 / c;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((split as f64 / trials as f64 - p).abs() < 6.0 * sigma, "c={c}");
        }
    }

    #[test]
    fn brute_force_examples() {
        let empty = PointSet::new(2).unwrap();
        assert!(brute_force_all_pairs(&empty, 0.5).unwrap().is_empty());

        let line = PointSet::from_points(1, &[[0.0], [0.3], [0.7]]).unwrap();
        assert_eq!(brute_force_all_pairs(&line, 0.4).unwrap().pairs(), vec![(0, 1), (1, 2)]);
        assert_eq!(brute_force_count(&line, 0.4).unwrap(), 2);

        let same = PointSet::from_points(2, &[[0.2, 0.2]; 3]).unwrap();
        assert_eq!(brute_force_all_pairs(&same, 0.0).unwrap().pairs(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn undersized_store_rejected() {
        let pts = sample_unit_hypercube(&mut seeded_rng(1), 10, 2).unwrap();
        let mut store = HashSetStore::new(5);
        let params = RsgParams::new(0.2, 1.2, 1).unwrap();
        assert!(rsg_all_pairs(&pts, &params, &mut seeded_rng(1), &mut store).is_err());
    }

    #[test]
    fn dedup_counters_are_consistent() {
        let pts = sample_unit_hypercube(&mut seeded_rng(4), 800, 3).unwrap();
        let params = RsgParams::new(0.15, 1.2, 10).unwrap();
        for filter in [true, false] {
            let mut store = HashSetStore::new(pts.len());
            let stats = rsg_all_pairs_with(
                &pts,
                &params,
                &mut seeded_rng(5),
                &mut store,
                RsgOptions { filter_reported: filter },
            )
            .unwrap();
            assert_eq!(stats.inserted as usize, store.len());
            assert!(stats.insert_attempts >= stats.inserted);
            assert_eq!(stats.candidate_pairs, stats.filtered + stats.distance_checks);
            if !filter {
                assert!(stats.insert_attempts > stats.inserted);
            }
        }
    }

    #[test]
    fn filter_does_not_change_result() {
        let pts = sample_unit_hypercube(&mut seeded_rng(4), 600, 4).unwrap();
        let params = RsgParams::new(0.25, 1.2, 8).unwrap();
        let mut a = HashSetStore::new(pts.len());
        let mut b = HashSetStore::new(pts.len());
        let sa = rsg_all_pairs(&pts, &params, &mut seeded_rng(8), &mut a).unwrap();
        let sb = rsg_all_pairs_with(&pts, &params, &mut seeded_rng(8), &mut b, RsgOptions { filter_reported: false })
            .unwrap();
        assert!(same_pairs(&a, &b));
        assert!(sa.distance_checks < sb.distance_checks);
    }
}
