use std::time::Instant;

use rand::RngCore;
use rustc_hash::FxHashSet;

use super::radius::RadiusRule;
use super::roadmap::{build_vertices, dijkstra, CdMeter, GoalRegion, PlanResult, PlanStats, Roadmap};
use crate::baseline::NnBackend;
use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, PointSet, Rng};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrmConfig {
    /// Number of free samples, not counting the start (or an injected goal).
    pub n: usize,
    pub radius: RadiusRule,
}

impl PrmConfig {
    pub fn new(n: usize) -> Self {
        PrmConfig { n, radius: RadiusRule::PrmStar }
    }
}

/// Connection radius for `n` samples in `world`.
pub(crate) fn connection_radius(world: &World, rule: RadiusRule, n: usize) -> Result<f64> {
    match rule {
        RadiusRule::Fixed(_) => rule.radius(0.0, world.dim(), 1.0),
        _ => rule.radius(n as f64, world.dim(), world.free_volume()?.value),
    }
}

/// Neighbor pairs sorted by `(i, j)`, and the time spent finding them.
pub(crate) fn timed_pairs(
    backend: &dyn NnBackend,
    points: &PointSet,
    r: f64,
    seed: u64,
) -> Result<(Vec<(u32, u32)>, f64)> {
    let start = Instant::now();
    let store = backend.all_pairs(points, r, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok((store.pairs(), elapsed))
}

/// Samples the vertex set and its neighbor pairs: the part shared by the
/// eager and lazy variants, so both see identical inputs for a given rng.
type Connected = (PointSet, Vec<(u32, u32)>, PlanStats);

fn sample_and_connect(
    world: &World,
    start: &[f64],
    goal: Option<&GoalRegion>,
    config: &PrmConfig,
    backend: &dyn NnBackend,
    rng: &mut Rng,
) -> Result<Connected> {
    let points = build_vertices(world, start, goal, config.n, rng)?;
    let r = connection_radius(world, config.radius, config.n)?;
    let (pairs, nn_time_s) = timed_pairs(backend, &points, r, rng.next_u64())?;
    let stats = PlanStats { vertices: points.len(), radius: r, pairs: pairs.len(), nn_time_s, ..PlanStats::default() };
    Ok((points, pairs, stats))
}

/// Builds a PRM* roadmap, collision-checking every neighbor pair.
///
/// Vertex 0 is `start`. When `goal` is given and no sample falls in it, the
/// goal center is appended as the last vertex.
pub fn prm_star(
    world: &World,
    start: &[f64],
    goal: Option<&GoalRegion>,
    config: &PrmConfig,
    backend: &dyn NnBackend,
    rng: &mut Rng,
) -> Result<(Roadmap, PlanStats)> {
    let t0 = Instant::now();
    let (points, pairs, mut stats) = sample_and_connect(world, start, goal, config, backend, rng)?;
    let mut cd = CdMeter::default();
    let mut roadmap = Roadmap::graph(points, stats.radius);
    for (i, j) in pairs {
        let (a, b) = (roadmap.points.point(i as usize), roadmap.points.point(j as usize));
        if cd.segment(world, a, b) {
            let w = dist_unchecked(a, b);
            roadmap.add_edge(i, j, w);
        }
    }
    stats.edges = roadmap.edge_count();
    stats.cd_calls = cd.calls;
    stats.cd_time_s = cd.time_s;
    stats.total_time_s = t0.elapsed().as_secs_f64();
    Ok((roadmap, stats))
}

/// Shortest roadmap path from the vertex equal to `start` into `goal`.
///
/// An unreachable goal gives a failed result (empty path, infinite cost).
pub fn prm_query(roadmap: &Roadmap, start: &[f64], goal: &GoalRegion) -> Result<PlanResult> {
    let t0 = Instant::now();
    if start.len() != roadmap.points.dim() {
        return Err(Error::DimensionMismatch { expected: roadmap.points.dim(), got: start.len() });
    }
    let source = roadmap
        .points
        .iter()
        .position(|p| p == start)
        .ok_or_else(|| Error::InvalidArgument("start is not a roadmap vertex".into()))? as u32;
    let points = &roadmap.points;
    let found = dijkstra(&roadmap.adjacency, source, |v| goal.contains(points.point(v as usize)), |_, _| true);
    let stats = PlanStats {
        vertices: roadmap.len(),
        radius: roadmap.radius,
        edges: roadmap.edge_count(),
        total_time_s: t0.elapsed().as_secs_f64(),
        ..PlanStats::default()
    };
    Ok(match found {
        Some((path, _)) => PlanResult::from_indices(points, path, stats),
        None => PlanResult::failure(stats),
    })
}

/// LazyB-PRM*: connects every neighbor pair without checking it, then
/// repeatedly finds a shortest path and validates only that path's edges,
/// deleting the first colliding one and searching again.
///
/// Given the same rng state, the vertex set and neighbor pairs are exactly
/// those of [`prm_star`], so both return the same optimal path cost.
pub fn lazyb_prm_star(
    world: &World,
    start: &[f64],
    goal: &GoalRegion,
    config: &PrmConfig,
    backend: &dyn NnBackend,
    rng: &mut Rng,
) -> Result<PlanResult> {
    let t0 = Instant::now();
    let (points, pairs, mut stats) = sample_and_connect(world, start, Some(goal), config, backend, rng)?;
    let mut roadmap = Roadmap::graph(points, stats.radius);
    for &(i, j) in &pairs {
        let w = dist_unchecked(roadmap.points.point(i as usize), roadmap.points.point(j as usize));
        roadmap.add_edge(i, j, w);
    }
    let total_edges = pairs.len();
    let mut validated: FxHashSet<(u32, u32)> = FxHashSet::default();
    let mut cd = CdMeter::default();
    let key = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };

    let mut outcome = None;
    loop {
        let points = &roadmap.points;
        let Some((path, _)) = dijkstra(&roadmap.adjacency, 0, |v| goal.contains(points.point(v as usize)), |_, _| true)
        else {
            break;
        };
        let mut blocked = None;
        for w in path.windows(2) {
            let e = key(w[0], w[1]);
            if validated.contains(&e) {
                continue;
            }
            if cd.segment(world, points.point(e.0 as usize), points.point(e.1 as usize)) {
                validated.insert(e);
            } else {
                blocked = Some(e);
                break;
            }
        }
        match blocked {
            None => {
                outcome = Some(path);
                break;
            }
            Some((a, b)) => {
                roadmap.remove_edge(a, b);
                stats.edge_removals += 1;
                if stats.edge_removals > total_edges {
                    return Err(Error::Internal("lazy search removed more edges than exist".into()));
                }
            }
        }
    }

    stats.edges = roadmap.edge_count();
    stats.cd_calls = cd.calls;
    stats.cd_time_s = cd.time_s;
    stats.total_time_s = t0.elapsed().as_secs_f64();
    Ok(match outcome {
        Some(path) => PlanResult::from_indices(&roadmap.points, path, stats),
        None => PlanResult::failure(stats),
    })
}
