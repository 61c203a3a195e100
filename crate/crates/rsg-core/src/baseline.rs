//! Neighbor-search backends behind one all-pairs interface.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{seeded_rng, squared_dist_unchecked, PointSet};
use crate::rsg::{
    brute_force_all_pairs, cell_index, recall, rsg_all_pairs, CellMap, GridParams, HashSetStore, PairStore,
    PairStoreKind, ParamTable, RsgParams,
};

pub type BoxedStore = Box<dyn PairStore + Send + Sync>;

/// An all-pairs fixed-radius neighbor query.
///
/// Every backend returns a subset of the exact answer; exact backends return it in full.
pub trait NnBackend: Send + Sync {
    fn name(&self) -> String;

    fn is_exact(&self) -> bool;

    /// Pairs of `points` within distance `r`. Randomized backends draw from `seed`.
    fn all_pairs(&self, points: &PointSet, r: f64, seed: u64) -> Result<BoxedStore>;

    /// Grid parameters the backend would use for `(n, d)`, if it is grid-based.
    fn grid_params(&self, _n: usize, _d: usize) -> Option<GridParams> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce;

impl NnBackend for BruteForce {
    fn name(&self) -> String {
        "brute".into()
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn all_pairs(&self, points: &PointSet, r: f64, _seed: u64) -> Result<BoxedStore> {
        Ok(Box::new(brute_force_all_pairs(points, r)?))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StaticGrid;

impl NnBackend for StaticGrid {
    fn name(&self) -> String {
        "static-grid".into()
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn all_pairs(&self, points: &PointSet, r: f64, _seed: u64) -> Result<BoxedStore> {
        Ok(Box::new(static_grid_all_pairs(points, r)?))
    }
}

/// Where an [`RsgBackend`] takes `(m, c_tilde)` from.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSource {
    /// Shipped table lookup; fails with [`Error::NoTableEntry`] off-table.
    Table,
    Fixed(GridParams),
}

#[derive(Debug, Clone)]
pub struct RsgBackend {
    pub params: ParamSource,
    pub store: PairStoreKind,
}

impl RsgBackend {
    pub fn table() -> Self {
        RsgBackend { params: ParamSource::Table, store: PairStoreKind::HashSets }
    }

    pub fn fixed(m: usize, c_tilde: f64) -> Self {
        RsgBackend { params: ParamSource::Fixed(GridParams { m, c_tilde }), store: PairStoreKind::HashSets }
    }

    pub fn with_store(mut self, store: PairStoreKind) -> Self {
        self.store = store;
        self
    }

    pub fn resolve(&self, n: usize, d: usize) -> Result<GridParams> {
        match &self.params {
            ParamSource::Table => ParamTable::shipped().lookup(n, d),
            ParamSource::Fixed(p) => Ok(*p),
        }
    }
}

impl NnBackend for RsgBackend {
    fn name(&self) -> String {
        let store = match self.store {
            PairStoreKind::HashSets => "",
            PairStoreKind::BitMatrix { .. } => "-bits",
        };
        match &self.params {
            ParamSource::Table => format!("rsg{store}"),
            ParamSource::Fixed(p) => format!("rsg{store}(m={},c={})", p.m, p.c_tilde),
        }
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn all_pairs(&self, points: &PointSet, r: f64, seed: u64) -> Result<BoxedStore> {
        let params: RsgParams = self.resolve(points.len(), points.dim())?.with_radius(r)?;
        let mut store = self.store.allocate(points.len())?;
        rsg_all_pairs(points, &params, &mut seeded_rng(seed), store.as_mut())?;
        Ok(store)
    }

    fn grid_params(&self, n: usize, d: usize) -> Option<GridParams> {
        self.resolve(n, d).ok()
    }
}

/// Parses a backend name as produced by [`NnBackend::name`]: `brute`,
/// `static-grid`, `rsg`, `rsg-bits`, or a fixed-parameter form such as
/// `rsg(m=20,c=1.2)` and `rsg-bits(m=20,c=1.2)`.
pub fn backend_from_name(name: &str) -> Result<Box<dyn NnBackend>> {
    let bad = || Error::InvalidArgument(format!("unknown backend '{name}'"));
    let name = name.trim();
    match name {
        "brute" => return Ok(Box::new(BruteForce)),
        "static-grid" => return Ok(Box::new(StaticGrid)),
        _ => {}
    }
    let (base, args) = match name.split_once('(') {
        Some((base, rest)) => (base, Some(rest.strip_suffix(')').ok_or_else(bad)?)),
        None => (name, None),
    };
    let store = match base {
        "rsg" => PairStoreKind::HashSets,
        "rsg-bits" => PairStoreKind::bit_matrix(),
        _ => return Err(bad()),
    };
    let Some(args) = args else {
        return Ok(Box::new(RsgBackend::table().with_store(store)));
    };
    let (mut m, mut c) = (None, None);
    for kv in args.split(',') {
        match kv.trim().split_once('=') {
            Some(("m", v)) => m = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
            Some(("c", v)) => c = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let (Some(m), Some(c)) = (m, c) else { return Err(bad()) };
    RsgParams::new(1.0, c, m)?;
    Ok(Box::new(RsgBackend::fixed(m, c).with_store(store)))
}

/// Exact all-pairs search on a fixed, unshifted grid of cell size `r`.
///
/// Any pair within `r` lies in the same cell or in Chebyshev-adjacent cells.
/// Each unordered cell pair is visited once: a cell is matched only with
/// neighbors whose offset is lexicographically positive.
pub fn static_grid_all_pairs(points: &PointSet, r: f64) -> Result<HashSetStore> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let d = points.dim();
    let r2 = r * r;
    let mut buckets: CellMap<Vec<u32>> = CellMap::default();
    for (i, p) in points.iter().enumerate() {
        let key: Box<[i64]> = p.iter().map(|&x| cell_index(x, 0.0, r)).collect();
        buckets.entry(key).or_default().push(i as u32);
    }
    let mut cells: Vec<(&[i64], &[u32])> = buckets.iter().map(|(k, v)| (&**k, v.as_slice())).collect();
    cells.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let mut store = HashSetStore::new(points.len());
    let mut check = |i: u32, j: u32| -> Result<()> {
        if squared_dist_unchecked(points.point(i as usize), points.point(j as usize)) <= r2 {
            store.insert(i, j)?;
        }
        Ok(())
    };

    for (_, bucket) in &cells {
        for (a, &i) in bucket.iter().enumerate() {
            for &j in &bucket[a + 1..] {
                check(i, j)?;
            }
        }
    }

    let half_neighborhood = (3f64.powi(d as i32) - 1.0) / 2.0;
    if half_neighborhood <= cells.len() as f64 {
        let offsets = positive_offsets(d);
        let mut probe = vec![0i64; d];
        for (key, bucket) in &cells {
            for off in &offsets {
                for ((p, &k), &o) in probe.iter_mut().zip(key.iter()).zip(off) {
                    *p = k + o;
                }
                if let Some(other) = buckets.get(probe.as_slice()) {
                    for &i in bucket.iter() {
                        for &j in other {
                            check(i, j)?;
                        }
                    }
                }
            }
        }
    } else {
        // Fewer occupied cells than neighbor offsets: compare cell pairs directly.
        for (a, (ka, ba)) in cells.iter().enumerate() {
            for (kb, bb) in &cells[a + 1..] {
                if ka.iter().zip(kb.iter()).all(|(x, y)| (x - y).abs() <= 1) {
                    for &i in ba.iter() {
                        for &j in bb.iter() {
                            check(i, j)?;
                        }
                    }
                }
            }
        }
    }
    Ok(store)
}

/// Offsets in `{-1, 0, 1}^d` whose first non-zero entry is `+1`.
fn positive_offsets(d: usize) -> Vec<Vec<i64>> {
    let total = 3usize.pow(d as u32);
    (0..total)
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let v = (code % 3) as i64 - 1;
                    code /= 3;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|off| off.iter().find(|&&v| v != 0) == Some(&1))
        .collect()
}

/// Timing and quality of one backend on one point set.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub backend: String,
    pub times_s: Vec<f64>,
    pub mean_s: f64,
    pub std_s: f64,
    pub recall: f64,
    pub pairs: usize,
    pub truth_pairs: usize,
}

/// Times `repetitions` all-pairs queries; repetition `k` uses seed `seed + k`.
///
/// The exact oracle runs once, untimed. Recall is taken from the last repetition.
pub fn benchmark_backend(
    backend: &dyn NnBackend,
    points: &PointSet,
    r: f64,
    repetitions: usize,
    seed: u64,
) -> Result<BenchRecord> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    let truth = brute_force_all_pairs(points, r)?;
    let mut times = Vec::with_capacity(repetitions);
    let mut last = None;
    for k in 0..repetitions {
        let start = Instant::now();
        let store = backend.all_pairs(points, r, seed.wrapping_add(k as u64))?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(store);
    }
    let store = last.expect("at least one repetition");
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / times.len() as f64;
    Ok(BenchRecord {
        backend: backend.name(),
        mean_s: mean,
        std_s: var.sqrt(),
        times_s: times,
        recall: recall(store.as_ref(), &truth),
        pairs: store.len(),
        truth_pairs: truth.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_unit_hypercube;
    use crate::rsg::same_pairs;

    #[test]
    fn backend_names_round_trip() {
        for name in ["brute", "static-grid", "rsg", "rsg-bits", "rsg(m=20,c=1.2)", "rsg-bits(m=5,c=1.05)"] {
            assert_eq!(backend_from_name(name).unwrap().name(), name);
        }
        assert_eq!(backend_from_name(" rsg( m=3 , c=1.5 ) ").unwrap().name(), "rsg(m=3,c=1.5)");
        for bad in ["gnat", "rsg(m=3)", "rsg(m=3,c=0.9)", "rsg(m=x,c=1.2)", "rsg(m=3,c=1.2", "brute(m=1,c=2)"] {
            assert!(backend_from_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn offsets_cover_half_neighborhood() {
        for d in 1..6 {
            let offs = positive_offsets(d);
            assert_eq!(offs.len(), (3usize.pow(d as u32) - 1) / 2);
        }
    }

    #[test]
    fn static_grid_matches_oracle() {
        for (d, seed) in [(2, 1), (3, 2), (6, 3)] {
            let pts = sample_unit_hypercube(&mut seeded_rng(seed), 500, d).unwrap();
            let r = 0.1 * d as f64;
            let exact = brute_force_all_pairs(&pts, r).unwrap();
            let grid = static_grid_all_pairs(&pts, r).unwrap();
            assert!(same_pairs(&exact, &grid), "d={d}");
        }
    }

    #[test]
    fn static_grid_edge_cases() {
        let one = PointSet::from_points(2, &[[0.5, 0.5]]).unwrap();
        assert!(static_grid_all_pairs(&one, 0.1).unwrap().is_empty());

        // Cell boundary at 0.2; points 0.05 apart on either side of it.
        let straddle = PointSet::from_points(2, &[[0.199, 0.5], [0.249, 0.5]]).unwrap();
        assert_eq!(static_grid_all_pairs(&straddle, 0.1).unwrap().pairs(), vec![(0, 1)]);

        assert!(static_grid_all_pairs(&one, 0.0).is_err());
    }

    #[test]
    fn exact_backends_have_full_recall() {
        let pts = sample_unit_hypercube(&mut seeded_rng(4), 300, 3).unwrap();
        for b in [&BruteForce as &dyn NnBackend, &StaticGrid] {
            let rec = benchmark_backend(b, &pts, 0.2, 2, 0).unwrap();
            assert_eq!(rec.recall, 1.0);
            assert_eq!(rec.times_s.len(), 2);
            assert!(rec.std_s >= 0.0);
        }
        assert!(benchmark_backend(&BruteForce, &pts, 0.2, 0, 0).is_err());
    }

    #[test]
    fn rsg_backend_names_and_params() {
        assert_eq!(RsgBackend::table().name(), "rsg");
        assert_eq!(RsgBackend::fixed(20, 1.2).name(), "rsg(m=20,c=1.2)");
        assert_eq!(RsgBackend::table().with_store(PairStoreKind::bit_matrix()).name(), "rsg-bits");
        assert_eq!(RsgBackend::table().grid_params(1600, 6), Some(GridParams { m: 25, c_tilde: 1.225 }));
        assert_eq!(RsgBackend::table().grid_params(1600, 5), None);
        let pts = sample_unit_hypercube(&mut seeded_rng(4), 30, 5).unwrap();
        assert!(matches!(RsgBackend::table().all_pairs(&pts, 0.1, 0), Err(Error::NoTableEntry { .. })));
    }
}
