//! Picks `(m, c_tilde)` by sweeping candidates on seeded sample sets.

use std::time::Instant;

use super::{brute_force_count, recall_from_counts, rsg_all_pairs, GridParams, PairStoreKind, RsgParams};
use crate::error::{Error, Result};
use crate::geometry::{derive_seed, seeded_rng, PointSet};

pub const DEFAULT_M_CANDIDATES: [usize; 12] = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60];

pub const DEFAULT_C_TILDE_CANDIDATES: [f64; 17] =
    [1.05, 1.075, 1.1, 1.125, 1.15, 1.175, 1.2, 1.225, 1.25, 1.275, 1.3, 1.325, 1.35, 1.375, 1.4, 1.425, 1.45];

/// What "fastest" means when ranking candidates that reach the recall target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TuneObjective {
    /// Mean measured wall time.
    #[default]
    WallTime,
    /// Deterministic work model: `d` per distance check, 1 per filtered
    /// candidate, `d` per point per grid for cell keys.
    Work,
}

#[derive(Debug, Clone)]
pub struct TuneConfig {
    pub r: f64,
    pub target_recall: f64,
    pub m_candidates: Vec<usize>,
    pub c_tilde_candidates: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub objective: TuneObjective,
    pub store: PairStoreKind,
}

impl TuneConfig {
    pub fn new(r: f64) -> Self {
        TuneConfig {
            r,
            target_recall: 0.98,
            m_candidates: DEFAULT_M_CANDIDATES.to_vec(),
            c_tilde_candidates: DEFAULT_C_TILDE_CANDIDATES.to_vec(),
            trials: 3,
            base_seed: 0,
            objective: TuneObjective::default(),
            store: PairStoreKind::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.target_recall > 0.0 && self.target_recall <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target recall must be in (0, 1], got {}",
                self.target_recall
            )));
        }
        if self.m_candidates.is_empty() || self.c_tilde_candidates.is_empty() {
            return Err(Error::InvalidParameter("candidate lists must be non-empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        for &m in &self.m_candidates {
            for &c in &self.c_tilde_candidates {
                RsgParams::new(self.r, c, m)?;
            }
        }
        Ok(())
    }
}

/// Mean outcome of one `(m, c_tilde)` candidate over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEval {
    pub m: usize,
    pub c_tilde: f64,
    pub mean_recall: f64,
    pub mean_time_s: f64,
    pub mean_work: f64,
    pub mean_pairs: f64,
    pub trial_recalls: Vec<f64>,
}

impl CandidateEval {
    fn cost(&self, objective: TuneObjective) -> f64 {
        match objective {
            TuneObjective::WallTime => self.mean_time_s,
            TuneObjective::Work => self.mean_work,
        }
    }
}

/// Runs every candidate on `config.trials` point sets drawn by `sampler`.
///
/// Trial `t` uses seed `derive_seed(base_seed, t)` for its points and a child
/// of it for grid shifts; all candidates see the same points and shift stream.
pub fn evaluate_candidates<F>(mut sampler: F, config: &TuneConfig) -> Result<Vec<CandidateEval>>
where
    F: FnMut(u64) -> Result<PointSet>,
{
    config.validate()?;
    let candidates: Vec<(usize, f64)> =
        config.m_candidates.iter().flat_map(|&m| config.c_tilde_candidates.iter().map(move |&c| (m, c))).collect();
    let mut recalls = vec![Vec::with_capacity(config.trials); candidates.len()];
    let mut times = vec![0.0; candidates.len()];
    let mut work = vec![0.0; candidates.len()];
    let mut pairs = vec![0.0; candidates.len()];

    for t in 0..config.trials {
        let trial_seed = derive_seed(config.base_seed, t as u64);
        let points = sampler(trial_seed)?;
        let truth = brute_force_count(&points, config.r)?;
        let (n, d) = (points.len() as f64, points.dim() as f64);
        for (k, &(m, c_tilde)) in candidates.iter().enumerate() {
            let params = RsgParams::new(config.r, c_tilde, m)?;
            let mut rng = seeded_rng(derive_seed(trial_seed, 1));
            let start = Instant::now();
            let mut store = config.store.allocate(points.len())?;
            let stats = rsg_all_pairs(&points, &params, &mut rng, store.as_mut())?;
            times[k] += start.elapsed().as_secs_f64();
            work[k] += stats.distance_checks as f64 * d + stats.filtered as f64 + n * m as f64 * d;
            pairs[k] += store.len() as f64;
            recalls[k].push(recall_from_counts(store.len(), truth));
        }
    }

    let trials = config.trials as f64;
    Ok(candidates
        .into_iter()
        .zip(recalls)
        .enumerate()
        .map(|(k, ((m, c_tilde), trial_recalls))| CandidateEval {
            m,
            c_tilde,
            mean_recall: trial_recalls.iter().sum::<f64>() / trials,
            mean_time_s: times[k] / trials,
            mean_work: work[k] / trials,
            mean_pairs: pairs[k] / trials,
            trial_recalls,
        })
        .collect())
}

/// Cheapest candidate whose mean recall reaches `target`; ties go to smaller `m`, then smaller `c_tilde`.
pub fn select_best(evals: &[CandidateEval], target: f64, objective: TuneObjective) -> Result<CandidateEval> {
    let best = evals.iter().filter(|e| e.mean_recall >= target).min_by(|a, b| {
        a.cost(objective).total_cmp(&b.cost(objective)).then(a.m.cmp(&b.m)).then(a.c_tilde.total_cmp(&b.c_tilde))
    });
    match best {
        Some(e) => Ok(e.clone()),
        None => {
            let closest = evals
                .iter()
                .max_by(|a, b| a.mean_recall.total_cmp(&b.mean_recall))
                .ok_or_else(|| Error::InvalidParameter("no candidates evaluated".into()))?;
            Err(Error::TuningFailed {
                best_recall: closest.mean_recall,
                best_m: closest.m,
                best_c_tilde: closest.c_tilde,
            })
        }
    }
}

/// Sweeps the candidates and returns the selected parameters with the full sweep.
pub fn auto_tune<F>(sampler: F, config: &TuneConfig) -> Result<(GridParams, Vec<CandidateEval>)>
where
    F: FnMut(u64) -> Result<PointSet>,
{
    let evals = evaluate_candidates(sampler, config)?;
    let best = select_best(&evals, config.target_recall, config.objective)?;
    Ok((GridParams { m: best.m, c_tilde: best.c_tilde }, evals))
}
