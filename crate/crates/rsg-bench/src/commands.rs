//! The experiments behind each subcommand. Each returns its rows unsorted;
//! the caller sorts and writes them.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use rsg_core::baseline::{backend_from_name, NnBackend, RsgBackend};
use rsg_core::planners::{
    batched_rrt_star, fmt_star, lazyb_prm_star, prm_query, prm_star, BatchedRrtConfig, FmtConfig, GoalRegion,
    PlanResult, PrmConfig, RadiusRule,
};
use rsg_core::rsg::{
    auto_tune, brute_force_all_pairs, evaluate_candidates, recall, select_best, PairStore, PairStoreKind, ParamTable,
    TuneConfig, TuneObjective,
};
use rsg_core::world::{make_scenario, Scenario};
use rsg_core::{derive_seed, sample_unit_hypercube, seeded_rng, Error, PointSet};

use crate::config::{
    nonempty, require, ConvergeSection, NnCompareSection, Objective, RadiusSource, RoadmapSection, ScenarioEmitSection,
    TuneSection,
};
use crate::error::{BenchError, BenchResult};
use crate::row::ResultRow;

/// Seeds and worker count shared by every command.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub seeds: Vec<u64>,
    pub jobs: usize,
}

impl RunContext {
    pub fn validate(&self) -> BenchResult<()> {
        nonempty(&self.seeds, "seed list")?;
        require(self.jobs >= 1, || "jobs must be >= 1".into())
    }

    fn pool(&self) -> BenchResult<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build().map_err(|e| BenchError::Runtime(e.to_string()))
    }
}

/// Rows from a run, plus the error to report after they are written.
#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub failure: Option<BenchError>,
}

impl From<Vec<ResultRow>> for Outcome {
    fn from(rows: Vec<ResultRow>) -> Self {
        Outcome { rows, failure: None }
    }
}

/// The point set used for `(seed, d, n)`, identical across backends.
pub fn uniform_points(seed: u64, n: usize, d: usize) -> rsg_core::Result<PointSet> {
    let stream = derive_seed(derive_seed(seed, d as u64), n as u64);
    sample_unit_hypercube(&mut seeded_rng(stream), n, d)
}

fn check_dims(dims: &[usize]) -> BenchResult<()> {
    nonempty(dims, "dimension list")?;
    require(dims.iter().all(|&d| d >= 1), || "dimensions must be >= 1".into())
}

fn check_sizes(ns: &[usize]) -> BenchResult<()> {
    nonempty(ns, "n list")?;
    require(ns.iter().all(|&n| n >= 2), || "every n must be >= 2".into())
}

fn tune_objective(o: Objective) -> TuneObjective {
    match o {
        Objective::Time => TuneObjective::WallTime,
        Objective::Work => TuneObjective::Work,
    }
}

pub fn tune(cfg: &TuneSection, ctx: &RunContext) -> BenchResult<Outcome> {
    ctx.validate()?;
    check_dims(&[cfg.d])?;
    check_sizes(&[cfg.n])?;
    let r = RadiusSource::parse(&cfg.radius)?.radius(cfg.n, cfg.d)?;
    let config = TuneConfig {
        r,
        target_recall: cfg.target_recall,
        m_candidates: cfg.m.clone(),
        c_tilde_candidates: cfg.c_tilde.clone(),
        trials: cfg.trials,
        base_seed: ctx.seeds[0],
        objective: tune_objective(cfg.objective),
        store: PairStoreKind::HashSets,
    };
    let (d, n) = (cfg.d, cfg.n);
    let evals = evaluate_candidates(|seed| sample_unit_hypercube(&mut seeded_rng(seed), n, d), &config).map_err(
        |e| match e {
            Error::InvalidParameter(msg) => BenchError::Config(msg),
            other => other.into(),
        },
    )?;
    let row = |experiment: &str, e: &rsg_core::rsg::CandidateEval| {
        let mut row = ResultRow::new(experiment, d, n, config.base_seed, "rsg");
        row.scenario = "uniform".into();
        row.m = Some(e.m);
        row.c_tilde = Some(e.c_tilde);
        row.r = r;
        row.nn_time_s = e.mean_time_s;
        row.total_time_s = e.mean_time_s;
        row.recall = Some(e.mean_recall);
        row.pairs = Some(e.mean_pairs.round() as u64);
        row.success = Some(e.mean_recall >= config.target_recall);
        row
    };
    let mut rows: Vec<ResultRow> = evals.iter().map(|e| row("tune", e)).collect();
    let failure = match select_best(&evals, config.target_recall, config.objective) {
        Ok(best) => {
            rows.push(row("tune-selected", &best));
            None
        }
        Err(err @ Error::TuningFailed { best_m, best_c_tilde, .. }) => {
            if let Some(closest) = evals.iter().find(|e| e.m == best_m && e.c_tilde == best_c_tilde) {
                rows.push(row("tune-selected", closest));
            }
            Some(err.into())
        }
        Err(other) => return Err(other.into()),
    };
    Ok(Outcome { rows, failure })
}

/// Resolves backend names once per `(name, n, d)`. Table-driven RSG names
/// fall back to auto-tuned parameters when the shipped table has no row.
struct BackendCache {
    backends: HashMap<(String, usize, usize), Box<dyn NnBackend>>,
}

impl BackendCache {
    fn build(
        names: &[String],
        sizes: &[(usize, usize)],
        radius: impl Fn(usize, usize) -> BenchResult<f64>,
        tune_seed: u64,
    ) -> BenchResult<Self> {
        let mut backends = HashMap::new();
        for name in names {
            for &(n, d) in sizes {
                let b = backend_from_name(name).map_err(|e| BenchError::Config(e.to_string()))?;
                let b: Box<dyn NnBackend> = match name.trim() {
                    "rsg" | "rsg-bits" if ParamTable::shipped().lookup(n, d).is_err() => {
                        let store =
                            if name.trim() == "rsg" { PairStoreKind::HashSets } else { PairStoreKind::bit_matrix() };
                        let mut cfg = TuneConfig::new(radius(n, d)?);
                        cfg.base_seed = tune_seed;
                        cfg.objective = TuneObjective::Work;
                        let (params, _) = auto_tune(|s| sample_unit_hypercube(&mut seeded_rng(s), n, d), &cfg)?;
                        Box::new(RsgBackend::fixed(params.m, params.c_tilde).with_store(store))
                    }
                    _ => b,
                };
                backends.insert((name.clone(), n, d), b);
            }
        }
        Ok(BackendCache { backends })
    }

    fn get(&self, name: &str, n: usize, d: usize) -> &dyn NnBackend {
        self.backends[&(name.to_string(), n, d)].as_ref()
    }
}

fn fill_grid_params(row: &mut ResultRow, backend: &dyn NnBackend, n: usize, d: usize) {
    if let Some(p) = backend.grid_params(n, d) {
        row.m = Some(p.m);
        row.c_tilde = Some(p.c_tilde);
    }
}

pub fn nn_compare(cfg: &NnCompareSection, ctx: &RunContext) -> BenchResult<Outcome> {
    ctx.validate()?;
    check_dims(&cfg.dims)?;
    check_sizes(&cfg.n)?;
    nonempty(&cfg.backends, "backend list")?;
    require(cfg.repetitions >= 1, || "repetitions must be >= 1".into())?;
    let source = RadiusSource::parse(&cfg.radius)?;
    let sizes: Vec<(usize, usize)> = cfg.dims.iter().flat_map(|&d| cfg.n.iter().map(move |&n| (n, d))).collect();
    let cache = BackendCache::build(&cfg.backends, &sizes, |n, d| source.radius(n, d), ctx.seeds[0])?;

    let tasks: Vec<(usize, usize, u64)> =
        sizes.iter().flat_map(|&(n, d)| ctx.seeds.iter().map(move |&s| (n, d, s))).collect();
    let per_task = ctx.pool()?.install(|| {
        tasks
            .par_iter()
            .map(|&(n, d, seed)| -> BenchResult<Vec<ResultRow>> {
                let pts = uniform_points(seed, n, d)?;
                let r = source.radius(n, d)?;
                let truth = brute_force_all_pairs(&pts, r)?;
                let mut rows = Vec::new();
                for name in &cfg.backends {
                    let backend = cache.get(name, n, d);
                    let mut total = 0.0;
                    let mut last = None;
                    for k in 0..cfg.repetitions {
                        let t = Instant::now();
                        let store = backend.all_pairs(&pts, r, derive_seed(seed, k as u64))?;
                        total += t.elapsed().as_secs_f64();
                        last = Some(store);
                    }
                    let store = last.expect("repetitions >= 1");
                    let mut row = ResultRow::new("nn-compare", d, n, seed, name);
                    row.scenario = "uniform".into();
                    fill_grid_params(&mut row, backend, n, d);
                    row.r = r;
                    row.nn_time_s = total / cfg.repetitions as f64;
                    row.total_time_s = row.nn_time_s;
                    row.recall = Some(recall(store.as_ref(), &truth));
                    row.pairs = Some(store.len() as u64);
                    row.truth_pairs = Some(truth.len() as u64);
                    rows.push(row);
                }
                Ok(rows)
            })
            .collect::<BenchResult<Vec<_>>>()
    })?;
    Ok(per_task.into_iter().flatten().collect::<Vec<_>>().into())
}

/// A built-in scenario by name, or a scenario file when `name` is a path.
pub fn load_scenario(name: &str, d: usize) -> BenchResult<Scenario> {
    let path = Path::new(name);
    if name.ends_with(".toml") || path.is_file() {
        return Scenario::load(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())));
    }
    make_scenario(name, d).map_err(|e| BenchError::Config(e.to_string()))
}

fn goal_region(sc: &Scenario, radius: f64) -> BenchResult<GoalRegion> {
    GoalRegion::new(sc.goal.clone(), radius).map_err(|e| BenchError::Config(e.to_string()))
}

// Planners add the start and possibly the goal center to the n samples.
const EXTRA_VERTICES: usize = 2;

pub fn roadmap_build(cfg: &RoadmapSection, ctx: &RunContext) -> BenchResult<Outcome> {
    ctx.validate()?;
    check_sizes(&cfg.n)?;
    nonempty(&cfg.backends, "backend list")?;
    let sc = load_scenario(&cfg.scenario, cfg.d)?;
    let d = sc.world.dim();
    let goal = goal_region(&sc, cfg.goal_radius)?;
    let mu = sc.world.free_volume()?.value;
    let sizes: Vec<(usize, usize)> = cfg.n.iter().map(|&n| (n + EXTRA_VERTICES, d)).collect();
    let cache = BackendCache::build(
        &cfg.backends,
        &sizes,
        |n, d| Ok(RadiusRule::PrmStar.radius(n as f64, d, mu)?),
        ctx.seeds[0],
    )?;

    let tasks: Vec<(usize, &String, u64)> = cfg
        .n
        .iter()
        .flat_map(|&n| cfg.backends.iter().flat_map(move |b| ctx.seeds.iter().map(move |&s| (n, b, s))))
        .collect();
    let rows = ctx.pool()?.install(|| {
        tasks
            .par_iter()
            .map(|&(n, name, seed)| -> BenchResult<ResultRow> {
                let backend = cache.get(name, n + EXTRA_VERTICES, d);
                let (roadmap, stats) = prm_star(
                    &sc.world,
                    sc.start.coords(),
                    Some(&goal),
                    &PrmConfig::new(n),
                    backend,
                    &mut seeded_rng(seed),
                )?;
                let query = prm_query(&roadmap, sc.start.coords(), &goal)?;
                let mut row = ResultRow::new("roadmap-build", d, n, seed, name);
                row.scenario = sc.name.clone();
                row.planner = "prm_star".into();
                fill_grid_params(&mut row, backend, roadmap.len(), d);
                row.r = stats.radius;
                row.build_time_s = stats.total_time_s;
                row.nn_time_s = stats.nn_time_s;
                row.cd_time_s = stats.cd_time_s;
                row.total_time_s = stats.total_time_s + query.stats.total_time_s;
                row.pairs = Some(stats.pairs as u64);
                row.edges = Some(stats.edges as u64);
                row.cd_calls = Some(stats.cd_calls as u64);
                row.path_cost = Some(query.cost);
                row.success = Some(query.success());
                Ok(row)
            })
            .collect::<BenchResult<Vec<_>>>()
    })?;
    Ok(rows.into())
}

pub const PLANNERS: [&str; 3] = ["fmt_star", "batched_rrt_star", "lazyb_prm_star"];

pub fn converge(cfg: &ConvergeSection, ctx: &RunContext) -> BenchResult<Outcome> {
    ctx.validate()?;
    check_sizes(&cfg.n)?;
    require(PLANNERS.contains(&cfg.planner.as_str()), || {
        format!("planner must be one of {}, got '{}'", PLANNERS.join(", "), cfg.planner)
    })?;
    require(cfg.eta >= 0.0, || "eta must be >= 0".into())?;
    require(cfg.steer_eps > 0.0, || "steer_eps must be > 0".into())?;
    let sc = load_scenario(&cfg.scenario, cfg.d)?;
    let d = sc.world.dim();
    let goal = goal_region(&sc, cfg.goal_radius)?;
    let mu = sc.world.free_volume()?.value;
    let radius_rule = RadiusRule::FmtStar { eta: cfg.eta };
    let sizes: Vec<(usize, usize)> = cfg.n.iter().map(|&n| (n + EXTRA_VERTICES, d)).collect();
    let names = std::slice::from_ref(&cfg.backend);
    let cache = BackendCache::build(names, &sizes, |n, d| Ok(radius_rule.radius(n as f64, d, mu)?), ctx.seeds[0])?;
    let lower_bound = goal.distance_from(sc.start.coords());

    let run = |n: usize, seed: u64| -> BenchResult<PlanResult> {
        let backend = cache.get(&cfg.backend, n + EXTRA_VERTICES, d);
        let mut rng = seeded_rng(derive_seed(seed, n as u64));
        let start = sc.start.coords();
        Ok(match cfg.planner.as_str() {
            "fmt_star" => fmt_star(&sc.world, start, &goal, &FmtConfig { n, radius: radius_rule }, backend, &mut rng)?,
            "batched_rrt_star" => {
                let bc = BatchedRrtConfig { n, steer_eps: cfg.steer_eps, eta: cfg.eta };
                batched_rrt_star(&sc.world, start, &goal, &bc, backend, &mut rng)?.0
            }
            _ => lazyb_prm_star(&sc.world, start, &goal, &PrmConfig::new(n), backend, &mut rng)?,
        })
    };

    let per_seed = ctx.pool()?.install(|| {
        ctx.seeds
            .par_iter()
            .map(|&seed| -> BenchResult<Vec<ResultRow>> {
                let mut best = f64::INFINITY;
                let mut cumulative = 0.0;
                let mut rows = Vec::new();
                for &n in &cfg.n {
                    let res = run(n, seed)?;
                    cumulative += res.stats.total_time_s;
                    best = best.min(res.cost);
                    let mut row = ResultRow::new("converge", d, n, seed, &cfg.backend);
                    row.scenario = sc.name.clone();
                    row.planner = cfg.planner.clone();
                    fill_grid_params(&mut row, cache.get(&cfg.backend, n + EXTRA_VERTICES, d), res.stats.vertices, d);
                    row.r = res.stats.radius;
                    row.nn_time_s = res.stats.nn_time_s;
                    row.cd_time_s = res.stats.cd_time_s;
                    row.total_time_s = res.stats.total_time_s;
                    row.cumulative_time_s = Some(cumulative);
                    row.pairs = Some(res.stats.pairs as u64);
                    row.cd_calls = Some(res.stats.cd_calls as u64);
                    row.path_cost = Some(res.cost);
                    row.best_cost = Some(best);
                    row.normalized_cost = (lower_bound > 0.0).then(|| best / lower_bound);
                    row.success = Some(res.success());
                    rows.push(row);
                }
                Ok(rows)
            })
            .collect::<BenchResult<Vec<_>>>()
    })?;
    Ok(per_seed.into_iter().flatten().collect::<Vec<_>>().into())
}

/// Writes each named scenario to `<dir>/<name>-d<d>.toml` and returns the paths.
pub fn scenario_emit(cfg: &ScenarioEmitSection, dir: &Path) -> BenchResult<Vec<PathBuf>> {
    nonempty(&cfg.names, "scenario list")?;
    std::fs::create_dir_all(dir).map_err(|e| BenchError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for name in &cfg.names {
        let sc = make_scenario(name, cfg.d).map_err(|e| BenchError::Config(e.to_string()))?;
        let path = dir.join(format!("{name}-d{}.toml", cfg.d));
        sc.save(&path)?;
        paths.push(path);
    }
    Ok(paths)
}
