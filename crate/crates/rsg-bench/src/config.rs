//! Benchmark configuration: a TOML file with one section per command, with
//! command-line flags layered on top.

use std::path::{Path, PathBuf};

use rsg_core::planners::{RadiusRule, DEFAULT_ETA};
use serde::Deserialize;

use crate::error::{BenchError, BenchResult};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub general: GeneralSection,
    pub tune: TuneSection,
    pub nn_compare: NnCompareSection,
    pub roadmap_build: RoadmapSection,
    pub converge: ConvergeSection,
    pub scenario_emit: ScenarioEmitSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> BenchResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> BenchResult<Self> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GeneralSection {
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for GeneralSection {
    fn default() -> Self {
        GeneralSection { seeds: (0..10).collect(), out: None, jobs: 1 }
    }
}

/// How the neighbor radius is chosen: a planner formula at the unit cube's
/// volume, or a literal value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSource {
    Prm,
    Fmt { eta: f64 },
    Fixed(f64),
}

impl RadiusSource {
    pub fn parse(s: &str) -> BenchResult<Self> {
        match s {
            "prm" => Ok(RadiusSource::Prm),
            "fmt" => Ok(RadiusSource::Fmt { eta: DEFAULT_ETA }),
            other => {
                other.parse::<f64>().ok().filter(|r| *r >= 0.0 && r.is_finite()).map(RadiusSource::Fixed).ok_or_else(
                    || BenchError::Config(format!("radius must be 'prm', 'fmt' or a number >= 0, got '{other}'")),
                )
            }
        }
    }

    pub fn radius(self, n: usize, d: usize) -> BenchResult<f64> {
        let rule = match self {
            RadiusSource::Prm => RadiusRule::PrmStar,
            RadiusSource::Fmt { eta } => RadiusRule::FmtStar { eta },
            RadiusSource::Fixed(r) => RadiusRule::Fixed(r),
        };
        rule.radius(n as f64, d, 1.0).map_err(|e| BenchError::Config(e.to_string()))
    }
}

impl std::fmt::Display for RadiusSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadiusSource::Prm => write!(f, "prm"),
            RadiusSource::Fmt { .. } => write!(f, "fmt"),
            RadiusSource::Fixed(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Measured wall time; the selected row can differ between reruns.
    Time,
    /// Operation count; fully reproducible.
    #[default]
    Work,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TuneSection {
    pub d: usize,
    pub n: usize,
    pub radius: String,
    pub target_recall: f64,
    pub m: Vec<usize>,
    pub c_tilde: Vec<f64>,
    pub trials: usize,
    pub objective: Objective,
}

impl Default for TuneSection {
    fn default() -> Self {
        TuneSection {
            d: 3,
            n: 1600,
            radius: "fmt".into(),
            target_recall: 0.98,
            m: rsg_core::rsg::DEFAULT_M_CANDIDATES.to_vec(),
            c_tilde: rsg_core::rsg::DEFAULT_C_TILDE_CANDIDATES.to_vec(),
            trials: 3,
            objective: Objective::Work,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NnCompareSection {
    pub dims: Vec<usize>,
    pub n: Vec<usize>,
    pub backends: Vec<String>,
    pub radius: String,
    pub repetitions: usize,
}

impl Default for NnCompareSection {
    fn default() -> Self {
        NnCompareSection {
            dims: vec![3, 6],
            n: vec![1600, 3200],
            backends: vec!["brute".into(), "static-grid".into(), "rsg".into()],
            radius: "fmt".into(),
            repetitions: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RoadmapSection {
    pub scenario: String,
    pub d: usize,
    pub n: Vec<usize>,
    pub backends: Vec<String>,
    pub goal_radius: f64,
}

impl Default for RoadmapSection {
    fn default() -> Self {
        RoadmapSection {
            scenario: "z-tunnel".into(),
            d: 3,
            n: vec![500, 1000, 2000],
            backends: vec!["brute".into(), "rsg".into()],
            goal_radius: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    pub scenario: String,
    pub d: usize,
    pub planner: String,
    pub n: Vec<usize>,
    pub backend: String,
    pub eta: f64,
    pub steer_eps: f64,
    pub goal_radius: f64,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        ConvergeSection {
            scenario: "empty".into(),
            d: 2,
            planner: "fmt_star".into(),
            n: vec![250, 500, 1000, 2000],
            backend: "brute".into(),
            eta: DEFAULT_ETA,
            steer_eps: 0.1,
            goal_radius: 0.02,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioEmitSection {
    pub names: Vec<String>,
    pub d: usize,
}

impl Default for ScenarioEmitSection {
    fn default() -> Self {
        ScenarioEmitSection { names: rsg_core::world::SCENARIO_NAMES.iter().map(|s| s.to_string()).collect(), d: 3 }
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> BenchResult<()> {
    if cond {
        Ok(())
    } else {
        Err(BenchError::Config(msg()))
    }
}

pub(crate) fn nonempty<T>(v: &[T], what: &str) -> BenchResult<()> {
    require(!v.is_empty(), || format!("{what} must not be empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(FileConfig::parse("").unwrap(), FileConfig::default());
    }

    #[test]
    fn sections_override_defaults() {
        let cfg = FileConfig::parse(
            "[general]\nseeds = [4, 5]\njobs = 2\n[tune]\nd = 9\nm = [5, 10]\nobjective = \"time\"\n",
        )
        .unwrap();
        assert_eq!(cfg.general.seeds, vec![4, 5]);
        assert_eq!(cfg.general.jobs, 2);
        assert_eq!(cfg.tune.d, 9);
        assert_eq!(cfg.tune.m, vec![5, 10]);
        assert_eq!(cfg.tune.objective, Objective::Time);
        assert_eq!(cfg.tune.n, 1600);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(FileConfig::parse("[tune]\nbogus = 1\n"), Err(BenchError::Config(_))));
        assert!(matches!(FileConfig::parse("[nope]\n"), Err(BenchError::Config(_))));
    }

    #[test]
    fn radius_sources() {
        assert_eq!(RadiusSource::parse("prm").unwrap(), RadiusSource::Prm);
        assert_eq!(RadiusSource::parse("0.25").unwrap(), RadiusSource::Fixed(0.25));
        assert!(RadiusSource::parse("-1").is_err());
        assert!(RadiusSource::parse("big").is_err());
        assert_eq!(RadiusSource::Fixed(0.3).radius(100, 3).unwrap(), 0.3);
    }
}
