use std::time::Instant;

use rand::RngCore;

use super::fmt::fmt_pass;
use super::radius::{radius_fmt_star, DEFAULT_ETA};
use super::roadmap::{GoalRegion, PlanResult, Roadmap};
use crate::baseline::NnBackend;
use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, squared_dist_unchecked, PointSet, Rng};
use crate::world::World;

/// Moves from `from` toward `to`, stopping after at most `eps`.
pub fn steer(from: &[f64], to: &[f64], eps: f64) -> Vec<f64> {
    let d = dist_unchecked(from, to);
    if d <= eps {
        return to.to_vec();
    }
    let t = eps / d;
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Index of the tree vertex closest to `p`, lowest index on ties.
fn nearest(points: &PointSet, p: &[f64]) -> u32 {
    let mut best = (0u32, f64::INFINITY);
    for (i, q) in points.iter().enumerate() {
        let d2 = squared_dist_unchecked(p, q);
        if d2 < best.1 {
            best = (i as u32, d2);
        }
    }
    best.0
}

/// Grows an RRT from `start` for exactly `n` iterations.
///
/// Nearest-vertex lookups are a linear scan, so a run costs O(n^2) distance
/// evaluations.
pub fn rrt(world: &World, start: &[f64], n: usize, steer_eps: f64, rng: &mut Rng) -> Result<Roadmap> {
    if !(steer_eps > 0.0 && steer_eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("steer_eps must be > 0, got {steer_eps}")));
    }
    if !world.is_free(start)? {
        return Err(Error::InvalidArgument("start configuration is not free".into()));
    }
    let mut points = PointSet::new(world.dim())?;
    points.push(start)?;
    let mut tree = Roadmap::tree(points, 0.0);
    for _ in 0..n {
        let x_rand = world.sample_free_point(rng)?;
        let near = nearest(&tree.points, &x_rand);
        let x_new = steer(tree.points.point(near as usize), &x_rand, steer_eps);
        if world.segment_free_unchecked(tree.points.point(near as usize), &x_new) {
            tree.push_child(&x_new, near)?;
        }
    }
    Ok(tree)
}

/// Reparents `child` under `potential_parent` if the connecting segment is
/// free and strictly lowers the child's cost, then shifts the costs of the
/// child's whole subtree by the same amount.
pub fn rewire_rrt_star(tree: &mut Roadmap, potential_parent: u32, child: u32, world: &World) -> Result<bool> {
    if !tree.is_tree() {
        return Err(Error::InvalidArgument("roadmap is not a tree".into()));
    }
    let n = tree.len();
    for v in [potential_parent, child] {
        if v as usize >= n {
            return Err(Error::InvalidIndex { index: v, len: n });
        }
    }
    if potential_parent == child || tree.parent[child as usize] == Some(potential_parent) {
        return Ok(false);
    }
    let (pp, pc) = (tree.points.point(potential_parent as usize), tree.points.point(child as usize));
    if !world.segment_free_unchecked(pp, pc) {
        return Ok(false);
    }
    let w = dist_unchecked(pp, pc);
    let new_cost = tree.cost[potential_parent as usize] + w;
    if new_cost >= tree.cost[child as usize] {
        return Ok(false);
    }
    let mut anc = Some(potential_parent);
    while let Some(a) = anc {
        if a == child {
            return Err(Error::Internal(format!("rewiring {child} under {potential_parent} would create a cycle")));
        }
        anc = tree.parent[a as usize];
    }

    if let Some(old) = tree.parent[child as usize] {
        tree.remove_edge(old, child);
    }
    tree.add_edge(potential_parent, child, w);
    tree.parent[child as usize] = Some(potential_parent);
    let delta = new_cost - tree.cost[child as usize];
    let mut stack = vec![child];
    while let Some(v) = stack.pop() {
        tree.cost[v as usize] = match tree.parent[v as usize] {
            Some(p) if v == child => tree.cost[p as usize] + w,
            _ => tree.cost[v as usize] + delta,
        };
        stack
            .extend(tree.adjacency[v as usize].iter().map(|&(c, _)| c).filter(|&c| tree.parent[c as usize] == Some(v)));
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchedRrtConfig {
    /// RRT iterations.
    pub n: usize,
    pub steer_eps: f64,
    pub eta: f64,
}

impl BatchedRrtConfig {
    pub fn new(n: usize, steer_eps: f64) -> Self {
        BatchedRrtConfig { n, steer_eps, eta: DEFAULT_ETA }
    }
}

/// Batched RRT*: grows an RRT, then runs one FMT* pass over its vertices
/// with the FMT* radius for that many vertices.
///
/// Returns the FMT* result together with the RRT tree it was built from. If
/// no RRT vertex lies in the goal region, the goal center is appended to the
/// FMT* vertex set (after all RRT vertices).
pub fn batched_rrt_star(
    world: &World,
    start: &[f64],
    goal: &GoalRegion,
    config: &BatchedRrtConfig,
    backend: &dyn NnBackend,
    rng: &mut Rng,
) -> Result<(PlanResult, Roadmap)> {
    let t0 = Instant::now();
    let tree = rrt(world, start, config.n, config.steer_eps, rng)?;
    let mut points = tree.points.clone();
    if !points.iter().any(|p| goal.contains(p)) {
        if !world.is_free(goal.center.coords())? {
            return Err(Error::InvalidArgument("goal center is not free".into()));
        }
        points.push(goal.center.coords())?;
    }
    let r = radius_fmt_star(points.len().max(2) as f64, world.dim(), world.free_volume()?.value, config.eta)?;
    let mut res = fmt_pass(world, points, r, goal, backend, rng.next_u64())?;
    res.stats.total_time_s = t0.elapsed().as_secs_f64();
    Ok((res, tree))
}
