use std::time::Instant;

use rand::RngCore;

use super::prm::{connection_radius, timed_pairs};
use super::radius::{RadiusRule, DEFAULT_ETA};
use super::roadmap::{build_vertices, CdMeter, CostHeap, GoalRegion, PlanResult, PlanStats, Roadmap};
use crate::baseline::NnBackend;
use crate::error::Result;
use crate::geometry::{dist_unchecked, PointSet, Rng};
use crate::rsg::NeighborLists;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmtConfig {
    /// Number of free samples, not counting the start (or an injected goal).
    pub n: usize,
    pub radius: RadiusRule,
}

impl FmtConfig {
    pub fn new(n: usize) -> Self {
        FmtConfig { n, radius: RadiusRule::FmtStar { eta: DEFAULT_ETA } }
    }
}

/// FMT* from `start` to `goal` over `config.n` free samples.
///
/// The returned tree holds every vertex reached before termination.
pub fn fmt_star(
    world: &World,
    start: &[f64],
    goal: &GoalRegion,
    config: &FmtConfig,
    backend: &dyn NnBackend,
    rng: &mut Rng,
) -> Result<PlanResult> {
    let t0 = Instant::now();
    let points = build_vertices(world, start, Some(goal), config.n, rng)?;
    let r = connection_radius(world, config.radius, config.n)?;
    let mut res = fmt_pass(world, points, r, goal, backend, rng.next_u64())?;
    res.stats.total_time_s = t0.elapsed().as_secs_f64();
    Ok(res)
}

/// One FMT* search over a fixed vertex set rooted at vertex 0.
pub(crate) fn fmt_pass(
    world: &World,
    points: PointSet,
    r: f64,
    goal: &GoalRegion,
    backend: &dyn NnBackend,
    nn_seed: u64,
) -> Result<PlanResult> {
    let t0 = Instant::now();
    let n = points.len();
    let (pairs, nn_time_s) = timed_pairs(backend, &points, r, nn_seed)?;
    let nbrs = NeighborLists::from_pairs(pairs.iter().copied(), n)?;
    let mut stats = PlanStats { vertices: n, radius: r, pairs: pairs.len(), nn_time_s, ..PlanStats::default() };

    let mut tree = Roadmap::tree(points, r);
    let mut unvisited = vec![true; n];
    let mut open = vec![false; n];
    unvisited[0] = false;
    open[0] = true;
    let mut heap = CostHeap::default();
    heap.push(0.0, 0);
    let mut cd = CdMeter::default();
    let mut expansion_costs = Vec::new();
    let mut goal_vertex = None;

    while let Some((cz, z)) = heap.pop() {
        expansion_costs.push(cz);
        if goal.contains(tree.points.point(z as usize)) {
            goal_vertex = Some(z);
            break;
        }
        let mut opened = Vec::new();
        for &x in nbrs.neighbors(z as usize) {
            if !unvisited[x as usize] {
                continue;
            }
            let px = tree.points.point(x as usize);
            let mut best: Option<(u32, f64)> = None;
            for &y in nbrs.neighbors(x as usize) {
                if !open[y as usize] {
                    continue;
                }
                let c = tree.cost[y as usize] + dist_unchecked(tree.points.point(y as usize), px);
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((y, c));
                }
            }
            // z itself is open and adjacent to x, so a candidate always exists.
            let Some((y, c)) = best else { continue };
            if cd.segment(world, tree.points.point(y as usize), px) {
                let w = c - tree.cost[y as usize];
                tree.parent[x as usize] = Some(y);
                tree.cost[x as usize] = c;
                tree.add_edge(y, x, w);
                unvisited[x as usize] = false;
                opened.push(x);
            }
        }
        open[z as usize] = false;
        for x in opened {
            open[x as usize] = true;
            heap.push(tree.cost[x as usize], x);
        }
    }

    stats.edges = tree.edge_count();
    stats.cd_calls = cd.calls;
    stats.cd_time_s = cd.time_s;
    stats.total_time_s = t0.elapsed().as_secs_f64();
    let mut res = match goal_vertex {
        Some(g) => PlanResult::from_indices(&tree.points, tree.tree_path(g), stats),
        None => PlanResult::failure(stats),
    };
    res.expansion_costs = expansion_costs;
    res.tree = Some(tree);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{BruteForce, RsgBackend, StaticGrid};
    use crate::geometry::{seeded_rng, Point};
    use crate::planners::prm::{prm_query, prm_star, PrmConfig};
    use crate::world::{make_scenario, Aabb};

    fn goal(p: &[f64], radius: f64) -> GoalRegion {
        GoalRegion::new(Point::new(p.to_vec()), radius).unwrap()
    }

    #[test]
    fn whole_cube_radius_connects_start_to_goal_directly() {
        let w = World::empty(2).unwrap();
        let g = goal(&[0.9, 0.9], 0.0);
        let cfg = FmtConfig { n: 50, radius: RadiusRule::Fixed(2.0) };
        let res = fmt_star(&w, &[0.1, 0.1], &g, &cfg, &BruteForce, &mut seeded_rng(1)).unwrap();
        assert!(res.success());
        assert_eq!(res.path_indices, vec![0, 51]);
        assert!((res.cost - 0.8 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tree_invariants_hold() {
        let sc = make_scenario("z-tunnel", 2).unwrap();
        let g = goal(sc.goal.coords(), 0.02);
        for seed in 0..4 {
            let res =
                fmt_star(&sc.world, sc.start.coords(), &g, &FmtConfig::new(600), &BruteForce, &mut seeded_rng(seed))
                    .unwrap();
            let tree = res.tree.as_ref().unwrap();
            for v in 1..tree.len() {
                if let Some(p) = tree.parent[v] {
                    let (a, b) = (tree.points.point(p as usize), tree.points.point(v));
                    let w = dist_unchecked(a, b);
                    assert!(w <= tree.radius);
                    assert!((tree.cost[v] - (tree.cost[p as usize] + w)).abs() < 1e-12);
                    assert!(sc.world.collision_free_segment(a, b).unwrap());
                } else {
                    assert_eq!(tree.cost[v], f64::INFINITY);
                }
            }
            assert!(res.expansion_costs.windows(2).all(|w| w[0] <= w[1]));
            if res.success() {
                assert!((res.cost - tree.cost[*res.path_indices.last().unwrap() as usize]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn z_tunnel_cost_is_close_to_the_roadmap_optimum() {
        // FMT* is asymptotically optimal, not exactly optimal at finite n; on
        // the same samples and radius it should land near Dijkstra's answer.
        let sc = make_scenario("z-tunnel", 3).unwrap();
        let g = goal(sc.goal.coords(), 0.02);
        let cfg = FmtConfig::new(2000);
        let fmt = fmt_star(&sc.world, sc.start.coords(), &g, &cfg, &BruteForce, &mut seeded_rng(11)).unwrap();
        let prm_cfg = PrmConfig { n: cfg.n, radius: RadiusRule::Fixed(fmt.stats.radius) };
        let (rm, _) =
            prm_star(&sc.world, sc.start.coords(), Some(&g), &prm_cfg, &BruteForce, &mut seeded_rng(11)).unwrap();
        let opt = prm_query(&rm, sc.start.coords(), &g).unwrap();
        assert!(fmt.success() && opt.success());
        assert!(fmt.cost >= opt.cost - 1e-9);
        assert!(fmt.cost <= 1.05 * opt.cost, "fmt {} vs dijkstra {}", fmt.cost, opt.cost);
    }

    #[test]
    fn exact_backends_agree_and_rsg_is_close() {
        let sc = make_scenario("z-tunnel", 3).unwrap();
        let g = goal(sc.goal.coords(), 0.02);
        let cfg = FmtConfig::new(2000);
        let run = |b: &dyn NnBackend| fmt_star(&sc.world, sc.start.coords(), &g, &cfg, b, &mut seeded_rng(21)).unwrap();
        let brute = run(&BruteForce);
        let grid = run(&StaticGrid);
        assert!(brute.success());
        assert_eq!(brute.path_indices, grid.path_indices);
        let rsg = run(&RsgBackend::fixed(20, 1.2));
        assert!(rsg.success());
        assert!((rsg.cost - brute.cost).abs() <= 0.02 * brute.cost, "{} vs {}", rsg.cost, brute.cost);
    }

    #[test]
    fn walled_off_goal_fails() {
        let obs = vec![
            Aabb::new(vec![0.7, 0.7], vec![1.0, 0.75]).unwrap(),
            Aabb::new(vec![0.7, 0.7], vec![0.75, 1.0]).unwrap(),
        ];
        let w = World::new(2, obs, 1e-3).unwrap();
        let res =
            fmt_star(&w, &[0.1, 0.1], &goal(&[0.9, 0.9], 0.02), &FmtConfig::new(300), &BruteForce, &mut seeded_rng(2))
                .unwrap();
        assert!(!res.success());
        assert_eq!(res.cost, f64::INFINITY);
        assert!(res.path.is_empty());
    }

    #[test]
    fn start_inside_goal_is_immediate() {
        let w = World::empty(3).unwrap();
        let res = fmt_star(&w, &[0.5; 3], &goal(&[0.5; 3], 0.1), &FmtConfig::new(10), &BruteForce, &mut seeded_rng(0))
            .unwrap();
        assert_eq!(res.path_indices, vec![0]);
        assert_eq!(res.cost, 0.0);
    }
}
