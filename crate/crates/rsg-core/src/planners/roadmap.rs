use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, sample_free_into, Point, PointSet, Rng};
use crate::world::World;

/// Ball-shaped goal region.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalRegion {
    pub center: Point,
    pub radius: f64,
}

impl GoalRegion {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("goal radius must be >= 0, got {radius}")));
        }
        Ok(GoalRegion { center, radius })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        dist_unchecked(self.center.coords(), p) <= self.radius
    }

    /// Length of the shortest segment from `p` into the region.
    pub fn distance_from(&self, p: &[f64]) -> f64 {
        (dist_unchecked(self.center.coords(), p) - self.radius).max(0.0)
    }
}

/// A roadmap graph or tree over sampled configurations.
///
/// Graphs (PRM*) only use `adjacency`. Trees (RRT, FMT*) also fill `parent`
/// and `cost` (cost-to-come from vertex 0, infinite when unreached) and keep
/// `adjacency` equal to the parent edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    pub points: PointSet,
    pub adjacency: Vec<Vec<(u32, f64)>>,
    pub parent: Vec<Option<u32>>,
    pub cost: Vec<f64>,
    /// Connection radius used to build it; zero for plain RRT trees.
    pub radius: f64,
}

impl Roadmap {
    pub fn graph(points: PointSet, radius: f64) -> Self {
        let n = points.len();
        Roadmap { points, adjacency: vec![Vec::new(); n], parent: Vec::new(), cost: Vec::new(), radius }
    }

    /// A tree containing only its root, vertex 0.
    pub fn tree(points: PointSet, radius: f64) -> Self {
        let n = points.len();
        let mut cost = vec![f64::INFINITY; n];
        if n > 0 {
            cost[0] = 0.0;
        }
        Roadmap { points, adjacency: vec![Vec::new(); n], parent: vec![None; n], cost, radius }
    }

    pub fn is_tree(&self) -> bool {
        !self.parent.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn add_edge(&mut self, i: u32, j: u32, w: f64) {
        self.adjacency[i as usize].push((j, w));
        self.adjacency[j as usize].push((i, w));
    }

    pub(crate) fn remove_edge(&mut self, i: u32, j: u32) {
        self.adjacency[i as usize].retain(|&(k, _)| k != j);
        self.adjacency[j as usize].retain(|&(k, _)| k != i);
    }

    /// Appends a vertex to a tree under `parent`.
    pub(crate) fn push_child(&mut self, p: &[f64], parent: u32) -> Result<u32> {
        let w = dist_unchecked(self.points.point(parent as usize), p);
        let v = self.points.push(p)?;
        self.adjacency.push(Vec::new());
        self.parent.push(Some(parent));
        self.cost.push(self.cost[parent as usize] + w);
        self.add_edge(parent, v, w);
        Ok(v)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges `(i, j, w)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32, f64)> {
        let mut out: Vec<_> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&(j, _)| j as usize > i).map(move |&(j, w)| (i as u32, j, w)))
            .collect();
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// Vertices from the root to `v` along parent links.
    pub fn tree_path(&self, v: u32) -> Vec<u32> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Lowest-cost tree vertex inside `goal`, if any.
    pub fn best_goal_vertex(&self, goal: &GoalRegion) -> Option<u32> {
        (0..self.len())
            .filter(|&v| self.cost[v].is_finite() && goal.contains(self.points.point(v)))
            .min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]).then(a.cmp(&b)))
            .map(|v| v as u32)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlanStats {
    pub vertices: usize,
    pub radius: f64,
    /// Neighbor pairs returned by the backend.
    pub pairs: usize,
    pub edges: usize,
    pub cd_calls: usize,
    pub edge_removals: usize,
    pub nn_time_s: f64,
    pub cd_time_s: f64,
    pub total_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub path: Vec<Point>,
    pub path_indices: Vec<u32>,
    /// Summed segment lengths; infinite on failure.
    pub cost: f64,
    pub stats: PlanStats,
    /// Search tree, for the tree-growing planners.
    pub tree: Option<Roadmap>,
    /// Cost-to-come of each vertex in the order it was expanded.
    pub expansion_costs: Vec<f64>,
}

impl PlanResult {
    pub fn success(&self) -> bool {
        !self.path_indices.is_empty()
    }

    pub(crate) fn failure(stats: PlanStats) -> Self {
        PlanResult {
            path: Vec::new(),
            path_indices: Vec::new(),
            cost: f64::INFINITY,
            stats,
            tree: None,
            expansion_costs: Vec::new(),
        }
    }

    pub(crate) fn from_indices(points: &PointSet, indices: Vec<u32>, stats: PlanStats) -> Self {
        let path: Vec<Point> = indices.iter().map(|&i| Point(points.point(i as usize).to_vec())).collect();
        let cost = path.windows(2).map(|w| dist_unchecked(w[0].coords(), w[1].coords())).sum();
        PlanResult { path, path_indices: indices, cost, stats, tree: None, expansion_costs: Vec::new() }
    }
}

/// Collision-check counter and timer.
#[derive(Debug, Default)]
pub(crate) struct CdMeter {
    pub calls: usize,
    pub time_s: f64,
}

impl CdMeter {
    pub fn segment(&mut self, world: &World, a: &[f64], b: &[f64]) -> bool {
        let start = Instant::now();
        let free = world.segment_free_unchecked(a, b);
        self.time_s += start.elapsed().as_secs_f64();
        self.calls += 1;
        free
    }
}

/// `start` as vertex 0, then `n` free samples. If a goal is given and no
/// vertex lands in it, its center is appended.
pub(crate) fn build_vertices(
    world: &World,
    start: &[f64],
    goal: Option<&GoalRegion>,
    n: usize,
    rng: &mut Rng,
) -> Result<PointSet> {
    if !world.is_free(start)? {
        return Err(Error::InvalidArgument("start configuration is not free".into()));
    }
    let mut points = PointSet::new(world.dim())?;
    points.push(start)?;
    sample_free_into(world, rng, n, &mut points)?;
    if let Some(goal) = goal {
        if !points.iter().any(|p| goal.contains(p)) {
            if !world.is_free(goal.center.coords())? {
                return Err(Error::InvalidArgument("goal center is not free".into()));
            }
            points.push(goal.center.coords())?;
        }
    }
    Ok(points)
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    v: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed: BinaryHeap pops the lowest cost, then the lowest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then(other.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Min-heap of `(cost, vertex)`, lowest vertex index first among equal costs.
#[derive(Default)]
pub(crate) struct CostHeap(BinaryHeap<Entry>);

impl CostHeap {
    pub fn push(&mut self, cost: f64, v: u32) {
        self.0.push(Entry { cost, v });
    }

    pub fn pop(&mut self) -> Option<(f64, u32)> {
        self.0.pop().map(|e| (e.cost, e.v))
    }
}

/// Shortest path from `source` to the nearest vertex satisfying `is_goal`,
/// over the edges of `adjacency` accepted by `usable`.
pub(crate) fn dijkstra(
    adjacency: &[Vec<(u32, f64)>],
    source: u32,
    is_goal: impl Fn(u32) -> bool,
    usable: impl Fn(u32, u32) -> bool,
) -> Option<(Vec<u32>, f64)> {
    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<u32>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = CostHeap::default();
    dist[source as usize] = 0.0;
    heap.push(0.0, source);
    while let Some((d, u)) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        if is_goal(u) {
            let mut path = vec![u];
            let mut cur = u;
            while let Some(p) = prev[cur as usize] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some((path, d));
        }
        for &(v, w) in &adjacency[u as usize] {
            if done[v as usize] || !usable(u, v) {
                continue;
            }
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                prev[v as usize] = Some(u);
                heap.push(nd, v);
            }
        }
    }
    None
}
