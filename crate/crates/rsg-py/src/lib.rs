//! Python module `rsg`: points are lists of float lists, pairs are `(i, j)`
//! tuples with `i < j`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rsg_core::baseline::{backend_from_name, NnBackend};
use rsg_core::planners::{self as pl, GoalRegion, PlanStats};
use rsg_core::rsg::{self as core_rsg, PairStore, PairStoreKind, RsgParams};
use rsg_core::world::{self as wd, Aabb};
use rsg_core::{seeded_rng, Error, Point, PointSet};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::SamplingStalled(_) | Error::TuningFailed { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for rsg_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn point_set(points: &[Vec<f64>]) -> PyResult<PointSet> {
    let d = points.first().map(Vec::len).ok_or_else(|| PyValueError::new_err("point list is empty"))?;
    PointSet::from_points(d, points).py()
}

fn to_lists(points: &PointSet) -> Vec<Vec<f64>> {
    points.iter().map(<[f64]>::to_vec).collect()
}

fn backend(name: &str) -> PyResult<Box<dyn NnBackend>> {
    backend_from_name(name).py()
}

/// `n` points uniform in the unit cube of dimension `d`.
#[pyfunction]
#[pyo3(signature = (n, d, seed=0))]
fn sample_unit_hypercube(n: usize, d: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    Ok(to_lists(&rsg_core::sample_unit_hypercube(&mut seeded_rng(seed), n, d).py()?))
}

type PairsAndStats<'py> = (Vec<(u32, u32)>, Bound<'py, PyDict>);

/// Pairs within `r` found by `m` randomly shifted grids of cell size `c_tilde * r`.
///
/// Returns `(pairs, stats)`. `store` is "hashset" or "bits".
#[pyfunction]
#[pyo3(signature = (points, r, m, c_tilde, seed=0, store="hashset"))]
fn rsg_all_pairs<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    r: f64,
    m: usize,
    c_tilde: f64,
    seed: u64,
    store: &str,
) -> PyResult<PairsAndStats<'py>> {
    let pts = point_set(&points)?;
    let kind = match store {
        "hashset" => PairStoreKind::HashSets,
        "bits" => PairStoreKind::bit_matrix(),
        other => return Err(PyValueError::new_err(format!("store must be 'hashset' or 'bits', got '{other}'"))),
    };
    let params = RsgParams::new(r, c_tilde, m).py()?;
    let mut st = kind.allocate(pts.len()).py()?;
    let s = py.detach(|| core_rsg::rsg_all_pairs(&pts, &params, &mut seeded_rng(seed), st.as_mut())).py()?;
    let stats = PyDict::new(py);
    stats.set_item("grids", s.grids)?;
    stats.set_item("buckets", s.buckets)?;
    stats.set_item("candidate_pairs", s.candidate_pairs)?;
    stats.set_item("filtered", s.filtered)?;
    stats.set_item("distance_checks", s.distance_checks)?;
    stats.set_item("inserted", s.inserted)?;
    Ok((st.pairs(), stats))
}

/// Exact pairs within `r` by checking every pair.
#[pyfunction]
fn brute_force_all_pairs(py: Python<'_>, points: Vec<Vec<f64>>, r: f64) -> PyResult<Vec<(u32, u32)>> {
    let pts = point_set(&points)?;
    Ok(py.detach(|| core_rsg::brute_force_all_pairs(&pts, r)).py()?.pairs())
}

/// Pairs within `r` from a named backend: brute, static-grid, rsg, rsg-bits or rsg(m=..,c=..).
#[pyfunction]
#[pyo3(signature = (points, r, backend_name="rsg", seed=0))]
fn all_pairs(
    py: Python<'_>,
    points: Vec<Vec<f64>>,
    r: f64,
    backend_name: &str,
    seed: u64,
) -> PyResult<Vec<(u32, u32)>> {
    let pts = point_set(&points)?;
    let b = backend(backend_name)?;
    Ok(py.detach(|| b.all_pairs(&pts, r, seed)).py()?.pairs())
}

/// Fraction of `truth` present in `reported`; 1.0 when `truth` is empty.
#[pyfunction]
fn recall(reported: Vec<(u32, u32)>, truth: Vec<(u32, u32)>) -> f64 {
    let truth: std::collections::HashSet<_> = truth.into_iter().collect();
    let hit = reported.iter().filter(|p| truth.contains(p)).count();
    core_rsg::recall_from_counts(hit, truth.len())
}

/// `(m, c_tilde)` from the shipped parameter table.
#[pyfunction]
fn lookup_params(n: usize, d: usize) -> PyResult<(usize, f64)> {
    let p = core_rsg::lookup_params(n, d).py()?;
    Ok((p.m, p.c_tilde))
}

/// Searches `(m, c_tilde)` for the cheapest pair reaching `target_recall` on uniform points.
#[pyfunction]
#[pyo3(signature = (n, d, r, target_recall=0.98, trials=3, seed=0, m_candidates=None, c_tilde_candidates=None))]
#[allow(clippy::too_many_arguments)]
fn auto_tune(
    py: Python<'_>,
    n: usize,
    d: usize,
    r: f64,
    target_recall: f64,
    trials: usize,
    seed: u64,
    m_candidates: Option<Vec<usize>>,
    c_tilde_candidates: Option<Vec<f64>>,
) -> PyResult<(usize, f64)> {
    let mut cfg = core_rsg::TuneConfig::new(r);
    cfg.target_recall = target_recall;
    cfg.trials = trials;
    cfg.base_seed = seed;
    cfg.objective = core_rsg::TuneObjective::Work;
    if let Some(m) = m_candidates {
        cfg.m_candidates = m;
    }
    if let Some(c) = c_tilde_candidates {
        cfg.c_tilde_candidates = c;
    }
    let (p, _) =
        py.detach(|| core_rsg::auto_tune(|s| rsg_core::sample_unit_hypercube(&mut seeded_rng(s), n, d), &cfg)).py()?;
    Ok((p.m, p.c_tilde))
}

#[pyfunction]
fn radius_prm_star(n: f64, d: usize, mu_free: f64) -> PyResult<f64> {
    pl::radius_prm_star(n, d, mu_free).py()
}

#[pyfunction]
#[pyo3(signature = (n, d, mu_free, eta=pl::DEFAULT_ETA))]
fn radius_fmt_star(n: f64, d: usize, mu_free: f64, eta: f64) -> PyResult<f64> {
    pl::radius_fmt_star(n, d, mu_free, eta).py()
}

#[pyfunction]
fn radius_rrt_star(i: f64, d: usize, mu_free: f64) -> PyResult<f64> {
    pl::radius_rrt_star(i, d, mu_free).py()
}

/// Unit cube with axis-aligned box obstacles, given as `(lo, hi)` corner pairs.
#[pyclass(frozen)]
struct World {
    inner: wd::World,
}

#[pymethods]
impl World {
    #[new]
    #[pyo3(signature = (d, obstacles=Vec::new(), resolution=wd::DEFAULT_RESOLUTION))]
    fn new(d: usize, obstacles: Vec<(Vec<f64>, Vec<f64>)>, resolution: f64) -> PyResult<Self> {
        let boxes =
            obstacles.into_iter().map(|(lo, hi)| Aabb::new(lo, hi)).collect::<rsg_core::Result<Vec<_>>>().py()?;
        Ok(World { inner: wd::World::new(d, boxes, resolution).py()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn obstacles(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.inner.obstacles().iter().map(|b| (b.lo.clone(), b.hi.clone())).collect()
    }

    fn is_free(&self, p: Vec<f64>) -> PyResult<bool> {
        self.inner.is_free(&p).py()
    }

    fn collision_free_segment(&self, a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
        self.inner.collision_free_segment(&a, &b).py()
    }

    /// Lebesgue measure of the free space.
    fn free_volume(&self) -> PyResult<f64> {
        Ok(self.inner.free_volume().py()?.value)
    }

    #[pyo3(signature = (n, seed=0))]
    fn sample_free(&self, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        Ok(to_lists(&wd::sample_free(&self.inner, &mut seeded_rng(seed), n).py()?))
    }
}

#[pyclass(frozen)]
struct Scenario {
    inner: wd::Scenario,
}

#[pymethods]
impl Scenario {
    /// A built-in scenario: "empty", "z-tunnel" or "grid-of-boxes".
    #[staticmethod]
    fn builtin(name: &str, d: usize) -> PyResult<Self> {
        Ok(Scenario { inner: wd::make_scenario(name, d).py()? })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Scenario { inner: wd::Scenario::load(path).py()? })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Scenario { inner: wd::Scenario::from_toml(text).py()? })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.save(path).py()
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn start(&self) -> Vec<f64> {
        self.inner.start.0.clone()
    }

    #[getter]
    fn goal(&self) -> Vec<f64> {
        self.inner.goal.0.clone()
    }

    #[getter]
    fn world(&self) -> World {
        World { inner: self.inner.world.clone() }
    }
}

/// Outcome of a planner run.
#[pyclass(frozen, get_all)]
struct PlanResult {
    path: Vec<Vec<f64>>,
    path_indices: Vec<u32>,
    cost: f64,
    success: bool,
    vertices: usize,
    radius: f64,
    pairs: usize,
    edges: usize,
    cd_calls: usize,
    edge_removals: usize,
    nn_time_s: f64,
    cd_time_s: f64,
    total_time_s: f64,
}

impl PlanResult {
    fn new(res: &pl::PlanResult) -> Self {
        let PlanStats { vertices, radius, pairs, edges, cd_calls, edge_removals, nn_time_s, cd_time_s, total_time_s } =
            res.stats;
        PlanResult {
            path: res.path.iter().map(|p| p.0.clone()).collect(),
            path_indices: res.path_indices.clone(),
            cost: res.cost,
            success: res.success(),
            vertices,
            radius,
            pairs,
            edges,
            cd_calls,
            edge_removals,
            nn_time_s,
            cd_time_s,
            total_time_s,
        }
    }
}

#[pymethods]
impl PlanResult {
    fn __repr__(&self) -> String {
        let success = if self.success { "True" } else { "False" };
        format!("PlanResult(success={success}, cost={}, vertices={})", self.cost, self.vertices)
    }
}

fn goal_region(goal: Vec<f64>, goal_radius: f64) -> PyResult<GoalRegion> {
    GoalRegion::new(Point(goal), goal_radius).py()
}

/// FMT* from `start` to the ball of `goal_radius` around `goal`.
#[pyfunction]
#[pyo3(signature = (world, start, goal, n, goal_radius=0.02, backend_name="brute", seed=0, eta=pl::DEFAULT_ETA))]
#[allow(clippy::too_many_arguments)]
fn fmt_star(
    py: Python<'_>,
    world: &World,
    start: Vec<f64>,
    goal: Vec<f64>,
    n: usize,
    goal_radius: f64,
    backend_name: &str,
    seed: u64,
    eta: f64,
) -> PyResult<PlanResult> {
    let g = goal_region(goal, goal_radius)?;
    let b = backend(backend_name)?;
    let cfg = pl::FmtConfig { n, radius: pl::RadiusRule::FmtStar { eta } };
    let res = py.detach(|| pl::fmt_star(&world.inner, &start, &g, &cfg, b.as_ref(), &mut seeded_rng(seed))).py()?;
    Ok(PlanResult::new(&res))
}

/// PRM* roadmap followed by a shortest-path query.
#[pyfunction]
#[pyo3(signature = (world, start, goal, n, goal_radius=0.02, backend_name="brute", seed=0))]
#[allow(clippy::too_many_arguments)]
fn prm_star(
    py: Python<'_>,
    world: &World,
    start: Vec<f64>,
    goal: Vec<f64>,
    n: usize,
    goal_radius: f64,
    backend_name: &str,
    seed: u64,
) -> PyResult<PlanResult> {
    let g = goal_region(goal, goal_radius)?;
    let b = backend(backend_name)?;
    let res = py
        .detach(|| {
            let (rm, stats) = pl::prm_star(
                &world.inner,
                &start,
                Some(&g),
                &pl::PrmConfig::new(n),
                b.as_ref(),
                &mut seeded_rng(seed),
            )?;
            let mut res = pl::prm_query(&rm, &start, &g)?;
            let query_time = res.stats.total_time_s;
            res.stats = stats;
            res.stats.total_time_s += query_time;
            Ok(res)
        })
        .py()?;
    Ok(PlanResult::new(&res))
}

/// PRM* with collision checks deferred to the shortest-path query.
#[pyfunction]
#[pyo3(signature = (world, start, goal, n, goal_radius=0.02, backend_name="brute", seed=0))]
#[allow(clippy::too_many_arguments)]
fn lazyb_prm_star(
    py: Python<'_>,
    world: &World,
    start: Vec<f64>,
    goal: Vec<f64>,
    n: usize,
    goal_radius: f64,
    backend_name: &str,
    seed: u64,
) -> PyResult<PlanResult> {
    let g = goal_region(goal, goal_radius)?;
    let b = backend(backend_name)?;
    let res = py
        .detach(|| {
            pl::lazyb_prm_star(&world.inner, &start, &g, &pl::PrmConfig::new(n), b.as_ref(), &mut seeded_rng(seed))
        })
        .py()?;
    Ok(PlanResult::new(&res))
}

/// RRT exploration for `n` iterations, then one FMT* pass over its vertices.
#[pyfunction]
#[pyo3(signature = (world, start, goal, n, goal_radius=0.02, steer_eps=0.1, backend_name="brute", seed=0, eta=pl::DEFAULT_ETA))]
#[allow(clippy::too_many_arguments)]
fn batched_rrt_star(
    py: Python<'_>,
    world: &World,
    start: Vec<f64>,
    goal: Vec<f64>,
    n: usize,
    goal_radius: f64,
    steer_eps: f64,
    backend_name: &str,
    seed: u64,
    eta: f64,
) -> PyResult<PlanResult> {
    let g = goal_region(goal, goal_radius)?;
    let b = backend(backend_name)?;
    let cfg = pl::BatchedRrtConfig { n, steer_eps, eta };
    let (res, _) =
        py.detach(|| pl::batched_rrt_star(&world.inner, &start, &g, &cfg, b.as_ref(), &mut seeded_rng(seed))).py()?;
    Ok(PlanResult::new(&res))
}

#[pymodule]
fn rsg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<World>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<PlanResult>()?;
    m.add_function(wrap_pyfunction!(sample_unit_hypercube, m)?)?;
    m.add_function(wrap_pyfunction!(rsg_all_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_all_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(all_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(recall, m)?)?;
    m.add_function(wrap_pyfunction!(lookup_params, m)?)?;
    m.add_function(wrap_pyfunction!(auto_tune, m)?)?;
    m.add_function(wrap_pyfunction!(radius_prm_star, m)?)?;
    m.add_function(wrap_pyfunction!(radius_fmt_star, m)?)?;
    m.add_function(wrap_pyfunction!(radius_rrt_star, m)?)?;
    m.add_function(wrap_pyfunction!(fmt_star, m)?)?;
    m.add_function(wrap_pyfunction!(prm_star, m)?)?;
    m.add_function(wrap_pyfunction!(lazyb_prm_star, m)?)?;
    m.add_function(wrap_pyfunction!(batched_rrt_star, m)?)?;
    Ok(())
}
