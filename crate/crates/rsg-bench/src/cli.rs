use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Outcome, RunContext};
use crate::config::{FileConfig, Objective};
use crate::error::{BenchError, BenchResult};
use crate::row::{sort_rows, write_rows_to};

#[derive(Debug, Parser)]
#[command(name = "rsg-bench", version, about = "Benchmarks for randomly shifted grids and the planners built on them")]
pub struct Cli {
    /// TOML file with [general], [tune], [nn_compare], [roadmap_build], [converge] and [scenario_emit] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV (a directory for scenario-emit). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Comma-separated seeds, e.g. 0,1,2.
    #[arg(long, global = true, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep (m, c~) candidates and select the cheapest one reaching the target recall.
    Tune(TuneArgs),
    /// Time all-pairs queries per backend and measure recall against brute force.
    NnCompare(NnCompareArgs),
    /// Build PRM* roadmaps and query them.
    RoadmapBuild(RoadmapArgs),
    /// Run a planner over a schedule of sample counts and track the best cost.
    Converge(ConvergeArgs),
    /// Write built-in scenarios as TOML files.
    ScenarioEmit(ScenarioEmitArgs),
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// `prm`, `fmt` or a literal radius.
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub target_recall: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub c_tilde: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// `work` (deterministic operation count, the default) or `time` (measured wall time).
    #[arg(long, value_parser = parse_objective)]
    pub objective: Option<Objective>,
}

#[derive(Debug, Args)]
pub struct NnCompareArgs {
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Backend names such as brute, static-grid, rsg, rsg-bits or rsg(m=20,c=1.2).
    #[arg(long, value_delimiter = ';')]
    pub backends: Option<Vec<String>>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub repetitions: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RoadmapArgs {
    /// Built-in scenario name or path to a scenario TOML file.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ';')]
    pub backends: Option<Vec<String>>,
    #[arg(long)]
    pub goal_radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// fmt_star, batched_rrt_star or lazyb_prm_star.
    #[arg(long)]
    pub planner: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub steer_eps: Option<f64>,
    #[arg(long)]
    pub goal_radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScenarioEmitArgs {
    #[arg(long, value_delimiter = ',')]
    pub names: Option<Vec<String>>,
    #[arg(long)]
    pub d: Option<usize>,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    match s {
        "time" => Ok(Objective::Time),
        "work" => Ok(Objective::Work),
        other => Err(format!("expected 'time' or 'work', got '{other}'")),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Applies command-line overrides to the file config.
pub fn merge(cli: Cli, mut file: FileConfig) -> (Command, FileConfig) {
    set(&mut file.general.seeds, cli.seed_list);
    set(&mut file.general.jobs, cli.jobs);
    if cli.out.is_some() {
        file.general.out = cli.out;
    }
    match &cli.command {
        Command::Tune(a) => {
            let t = &mut file.tune;
            set(&mut t.d, a.d);
            set(&mut t.n, a.n);
            set(&mut t.radius, a.radius.clone());
            set(&mut t.target_recall, a.target_recall);
            set(&mut t.m, a.m.clone());
            set(&mut t.c_tilde, a.c_tilde.clone());
            set(&mut t.trials, a.trials);
            set(&mut t.objective, a.objective);
        }
        Command::NnCompare(a) => {
            let c = &mut file.nn_compare;
            set(&mut c.dims, a.dims.clone());
            set(&mut c.n, a.n.clone());
            set(&mut c.backends, a.backends.clone());
            set(&mut c.radius, a.radius.clone());
            set(&mut c.repetitions, a.repetitions);
        }
        Command::RoadmapBuild(a) => {
            let c = &mut file.roadmap_build;
            set(&mut c.scenario, a.scenario.clone());
            set(&mut c.d, a.d);
            set(&mut c.n, a.n.clone());
            set(&mut c.backends, a.backends.clone());
            set(&mut c.goal_radius, a.goal_radius);
        }
        Command::Converge(a) => {
            let c = &mut file.converge;
            set(&mut c.scenario, a.scenario.clone());
            set(&mut c.d, a.d);
            set(&mut c.planner, a.planner.clone());
            set(&mut c.n, a.n.clone());
            set(&mut c.backend, a.backend.clone());
            set(&mut c.eta, a.eta);
            set(&mut c.steer_eps, a.steer_eps);
            set(&mut c.goal_radius, a.goal_radius);
        }
        Command::ScenarioEmit(a) => {
            let c = &mut file.scenario_emit;
            set(&mut c.names, a.names.clone());
            set(&mut c.d, a.d);
        }
    }
    (cli.command, file)
}

fn execute(cli: Cli) -> BenchResult<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let (command, cfg) = merge(cli, file);
    let ctx = RunContext { seeds: cfg.general.seeds.clone(), jobs: cfg.general.jobs };
    let outcome: Outcome = match command {
        Command::Tune(_) => commands::tune(&cfg.tune, &ctx)?,
        Command::NnCompare(_) => commands::nn_compare(&cfg.nn_compare, &ctx)?,
        Command::RoadmapBuild(_) => commands::roadmap_build(&cfg.roadmap_build, &ctx)?,
        Command::Converge(_) => commands::converge(&cfg.converge, &ctx)?,
        Command::ScenarioEmit(_) => {
            let dir = cfg.general.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for p in commands::scenario_emit(&cfg.scenario_emit, &dir)? {
                println!("{}", p.display());
            }
            return Ok(());
        }
    };
    let mut rows = outcome.rows;
    sort_rows(&mut rows);
    write_rows_to(cfg.general.out.as_deref(), &rows)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { BenchError::Config(String::new()).exit_code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rsg-bench: {e}");
            e.exit_code()
        }
    }
}
