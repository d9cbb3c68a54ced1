//! Benchmark harness: single tasks, instance suites, result tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behaviour::{BehaviourError, BehaviourRecord, BehaviourSpace, Feature};
use crate::domains::{DomainError, GridProblem, PentestProblem, PuzznicProblem};
use crate::model::{plan_cost, SimulatorProblem};
use crate::oracle::brute_force_behaviours;
use crate::search::{
    fbi, fbi_naive, BudgetKind, NoveltyConfig, PlanSetResult, SearchError, SearchLimits, SearchStats,
};
use crate::stats::{paired_t_test_counts, TTest};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Instance {
        path: PathBuf,
        #[source]
        source: DomainError,
    },
    #[error("fbi needs at least one diversity feature")]
    NoFeatures,
    #[error(transparent)]
    Behaviour(#[from] BehaviourError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Grid,
    Puzznic,
    Pentest,
}

impl Domain {
    pub fn from_path(path: &Path) -> Option<Domain> {
        match path.extension()?.to_str()? {
            "grid" => Some(Domain::Grid),
            "pzl" => Some(Domain::Puzznic),
            "json" => Some(Domain::Pentest),
            _ => None,
        }
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grid" => Ok(Domain::Grid),
            "puzznic" => Ok(Domain::Puzznic),
            "pentest" => Ok(Domain::Pentest),
            other => Err(format!("unknown domain `{other}`")),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Grid => "grid",
            Domain::Puzznic => "puzznic",
            Domain::Pentest => "pentest",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fbi,
    Naive,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fbi" => Ok(Mode::Fbi),
            "naive" => Ok(Mode::Naive),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fbi => "fbi",
            Mode::Naive => "naive",
        })
    }
}

/// Which diversity features to declare. The cost-bound feature uses the
/// search cost bound as its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Features {
    pub goal_order: bool,
    pub cost: bool,
}

impl Default for Features {
    fn default() -> Self {
        Features {
            goal_order: true,
            cost: false,
        }
    }
}

impl FromStr for Features {
    type Err = String;

    /// Comma-separated subset of `go` and `cb`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut f = Features {
            goal_order: false,
            cost: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "go" => f.goal_order = true,
                "cb" => f.cost = true,
                other => return Err(format!("unknown feature `{other}`; expected go or cb")),
            }
        }
        Ok(f)
    }
}

impl Features {
    pub fn is_empty(&self) -> bool {
        !self.goal_order && !self.cost
    }

    pub fn space<P: SimulatorProblem + ?Sized>(
        &self,
        problem: &P,
        cost_bound: u64,
    ) -> Result<BehaviourSpace, BehaviourError> {
        let mut features = Vec::new();
        if self.cost {
            features.push(Feature::CostBound(cost_bound));
        }
        if self.goal_order {
            features.push(Feature::GoalOrder(problem.goal_predicates().to_vec()));
        }
        BehaviourSpace::new(features)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub domain: Domain,
    pub instance: PathBuf,
    pub mode: Mode,
    pub k: usize,
    pub features: Features,
    pub novelty: NoveltyConfig,
    pub limits: SearchLimits,
    /// Where to write the plan file, if anywhere.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Search finished and found at least one plan.
    Done,
    /// Search finished without any plan.
    Exhausted,
    Timeout,
    NodeCap,
    /// The task could not run (parse error and the like).
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResultRow {
    pub instance: String,
    pub mode: Mode,
    pub k: usize,
    pub solved: bool,
    pub plans_found: usize,
    pub behaviour_count: usize,
    pub wall_time: f64,
    pub outcome: Outcome,
    #[serde(default)]
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub actions: Vec<String>,
    pub cost: u64,
    pub behaviour: BehaviourRecord,
}

/// JSON written for every task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub instance: String,
    pub mode: Mode,
    pub k: usize,
    pub plans: Vec<PlanEntry>,
    pub behaviour_count: usize,
    pub outcome: Outcome,
    pub stats: StatsRecord,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub nodes_expanded: u64,
    pub nodes_generated: u64,
    pub pruned_by_novelty: u64,
    pub pruned_by_behaviour: u64,
    pub pruned_interior: u64,
    pub pruned_by_visited: u64,
    pub pruned_by_cost: u64,
    pub width_secs: Vec<f64>,
    pub total_secs: f64,
}

impl From<&SearchStats> for StatsRecord {
    fn from(s: &SearchStats) -> Self {
        StatsRecord {
            nodes_expanded: s.nodes_expanded,
            nodes_generated: s.nodes_generated,
            pruned_by_novelty: s.pruned_by_novelty,
            pruned_by_behaviour: s.pruned_by_behaviour,
            pruned_interior: s.pruned_interior,
            pruned_by_visited: s.pruned_by_visited,
            pruned_by_cost: s.pruned_by_cost,
            width_secs: s.width_secs.clone(),
            total_secs: s.total_secs,
        }
    }
}

/// A parsed instance of any built-in domain.
#[derive(Debug, Clone)]
pub enum Instance {
    Grid(GridProblem),
    Puzznic(PuzznicProblem),
    Pentest(PentestProblem),
}

impl Instance {
    pub fn parse(domain: Domain, text: &str) -> Result<Self, DomainError> {
        Ok(match domain {
            Domain::Grid => Instance::Grid(GridProblem::parse(text)?),
            Domain::Puzznic => Instance::Puzznic(PuzznicProblem::parse(text)?),
            Domain::Pentest => Instance::Pentest(PentestProblem::parse(text)?),
        })
    }

    pub fn load(domain: Domain, path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path)?;
        Self::parse(domain, &text).map_err(|source| BenchError::Instance {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Calls `$body` with `$p` bound to the concrete problem inside an [`Instance`].
#[macro_export]
macro_rules! with_instance {
    ($instance:expr, $p:ident => $body:expr) => {
        match $instance {
            $crate::bench::Instance::Grid($p) => $body,
            $crate::bench::Instance::Puzznic($p) => $body,
            $crate::bench::Instance::Pentest($p) => $body,
        }
    };
}

/// Runs one configured search and turns its result into a plan file.
pub fn solve<P: SimulatorProblem + ?Sized>(
    problem: &P,
    spec: &TaskSpec,
) -> Result<(PlanSetResult, Outcome), BenchError> {
    if spec.mode == Mode::Fbi && spec.features.is_empty() {
        return Err(BenchError::NoFeatures);
    }
    // The naive baseline still reports behaviours; default to goal order.
    let features = if spec.features.is_empty() {
        Features::default()
    } else {
        spec.features
    };
    let space = features.space(problem, spec.limits.cost_bound)?;
    let run = match spec.mode {
        Mode::Fbi => fbi(problem, &space, spec.k, &spec.novelty, &spec.limits),
        Mode::Naive => fbi_naive(problem, &space, spec.k, &spec.novelty, &spec.limits),
    };
    match run {
        Ok(result) if result.plans.is_empty() => Ok((result, Outcome::Exhausted)),
        Ok(result) => Ok((result, Outcome::Done)),
        Err(SearchError::BudgetExceeded { kind, partial }) => {
            let outcome = match kind {
                BudgetKind::Time => Outcome::Timeout,
                BudgetKind::Nodes => Outcome::NodeCap,
            };
            Ok((*partial, outcome))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn plan_file<P: SimulatorProblem + ?Sized>(
    problem: &P,
    spec: &TaskSpec,
    result: &PlanSetResult,
    outcome: Outcome,
) -> Result<PlanFile, BenchError> {
    let plans = result
        .plans
        .iter()
        .zip(&result.behaviours)
        .map(|(plan, b)| {
            Ok(PlanEntry {
                actions: plan.names(problem),
                cost: plan_cost(problem, plan).map_err(BehaviourError::from)?,
                behaviour: b.to_record(problem.symbols()),
            })
        })
        .collect::<Result<_, BenchError>>()?;
    Ok(PlanFile {
        instance: spec.instance.display().to_string(),
        mode: spec.mode,
        k: spec.k,
        plans,
        behaviour_count: result.behaviour_count,
        outcome,
        stats: (&result.stats).into(),
    })
}

/// Loads the instance, runs the search, writes the plan file when asked, and
/// summarises the run as a table row.
pub fn run_task(spec: &TaskSpec) -> Result<(PlanSetResult, SuiteResultRow), BenchError> {
    let started = Instant::now();
    let instance = Instance::load(spec.domain, &spec.instance)?;
    let (result, file) = with_instance!(&instance, p => {
        let (result, outcome) = solve(p, spec)?;
        let file = plan_file(p, spec, &result, outcome)?;
        (result, file)
    });
    if let Some(out) = &spec.out {
        fs::write(out, serde_json::to_string_pretty(&file)?)?;
    }
    let row = SuiteResultRow {
        instance: spec.instance.display().to_string(),
        mode: spec.mode,
        k: spec.k,
        solved: file.outcome == Outcome::Done,
        plans_found: result.plans.len(),
        behaviour_count: result.behaviour_count,
        wall_time: started.elapsed().as_secs_f64(),
        outcome: file.outcome,
        error: String::new(),
    };
    Ok((result, row))
}

/// Shared settings for every task of a suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub modes: Vec<Mode>,
    pub k_list: Vec<usize>,
    pub features: Features,
    pub novelty: NoveltyConfig,
    pub limits: SearchLimits,
    /// Directory for per-task plan files.
    pub plan_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            modes: vec![Mode::Fbi, Mode::Naive],
            k_list: vec![2, 5, 10, 100],
            features: Features::default(),
            novelty: NoveltyConfig::default(),
            limits: SearchLimits::default(),
            plan_dir: None,
        }
    }
}

/// Per-k comparison over commonly solved instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KAggregate {
    pub k: usize,
    pub coverage_fbi: usize,
    pub coverage_naive: usize,
    /// Instances solved by both modes.
    pub common: usize,
    pub bc_fbi: usize,
    pub bc_naive: usize,
    /// Paired t-test of BC(fbi) against BC(naive) over common instances.
    pub t_test: Option<TTest>,
    /// Mean wall time over solved runs only.
    pub mean_time_solved_fbi: Option<f64>,
    pub mean_time_solved_naive: Option<f64>,
    /// Mean wall time over every run, unsolved included.
    pub mean_time_all_fbi: Option<f64>,
    pub mean_time_all_naive: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<SuiteResultRow>,
    pub aggregates: Vec<KAggregate>,
}

/// Instance files in `dir` with a recognised extension, sorted by name.
pub fn suite_instances(dir: &Path) -> Result<Vec<(Domain, PathBuf)>, BenchError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() {
            if let Some(d) = Domain::from_path(&path) {
                out.push((d, path));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}

/// Runs every (instance, mode, k) task in parallel. Task failures become
/// rows with outcome `error`; they never abort the suite.
pub fn run_suite(dir: &Path, config: &SuiteConfig) -> Result<SuiteReport, BenchError> {
    let instances = suite_instances(dir)?;
    if let Some(d) = &config.plan_dir {
        fs::create_dir_all(d)?;
    }
    let mut specs = Vec::new();
    for (domain, path) in &instances {
        for &k in &config.k_list {
            for &mode in &config.modes {
                let out = config.plan_dir.as_ref().map(|d| {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    d.join(format!("{stem}.{mode}.k{k}.json"))
                });
                specs.push(TaskSpec {
                    domain: *domain,
                    instance: path.clone(),
                    mode,
                    k,
                    features: config.features,
                    novelty: config.novelty.clone(),
                    limits: config.limits.clone(),
                    out,
                });
            }
        }
    }
    let rows: Vec<SuiteResultRow> = specs
        .par_iter()
        .map(|spec| match run_task(spec) {
            Ok((_, row)) => row,
            Err(e) => SuiteResultRow {
                instance: spec.instance.display().to_string(),
                mode: spec.mode,
                k: spec.k,
                solved: false,
                plans_found: 0,
                behaviour_count: 0,
                wall_time: 0.0,
                outcome: Outcome::Error,
                error: e.to_string(),
            },
        })
        .collect();
    let aggregates = aggregate(&rows);
    Ok(SuiteReport { rows, aggregates })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Recomputes the per-k aggregates from rows alone.
pub fn aggregate(rows: &[SuiteResultRow]) -> Vec<KAggregate> {
    let ks: BTreeSet<usize> = rows.iter().map(|r| r.k).collect();
    ks.into_iter()
        .map(|k| {
            let of = |mode: Mode| -> BTreeMap<&str, &SuiteResultRow> {
                rows.iter()
                    .filter(|r| r.k == k && r.mode == mode)
                    .map(|r| (r.instance.as_str(), r))
                    .collect()
            };
            let (fbi, naive) = (of(Mode::Fbi), of(Mode::Naive));
            let solved = |m: &BTreeMap<&str, &SuiteResultRow>| -> BTreeSet<String> {
                m.values().filter(|r| r.solved).map(|r| r.instance.clone()).collect()
            };
            let (sf, sn) = (solved(&fbi), solved(&naive));
            let common: Vec<&String> = sf.intersection(&sn).collect();
            let pairs: Vec<(usize, usize)> = common
                .iter()
                .map(|i| (fbi[i.as_str()].behaviour_count, naive[i.as_str()].behaviour_count))
                .collect();
            let times = |m: &BTreeMap<&str, &SuiteResultRow>, solved_only: bool| {
                mean(
                    m.values()
                        .filter(|r| !solved_only || r.solved)
                        .map(|r| r.wall_time),
                )
            };
            KAggregate {
                k,
                coverage_fbi: sf.len(),
                coverage_naive: sn.len(),
                common: common.len(),
                bc_fbi: pairs.iter().map(|p| p.0).sum(),
                bc_naive: pairs.iter().map(|p| p.1).sum(),
                t_test: paired_t_test_counts(&pairs).ok(),
                mean_time_solved_fbi: times(&fbi, true),
                mean_time_solved_naive: times(&naive, true),
                mean_time_all_fbi: times(&fbi, false),
                mean_time_all_naive: times(&naive, false),
            }
        })
        .collect()
}

/// Flat CSV form of [`KAggregate`].
#[derive(Debug, Serialize)]
struct SummaryRow {
    k: usize,
    coverage_fbi: usize,
    coverage_naive: usize,
    common: usize,
    bc_fbi: usize,
    bc_naive: usize,
    t: Option<f64>,
    p: Option<f64>,
    df: Option<usize>,
    degenerate: Option<bool>,
    mean_time_solved_fbi: Option<f64>,
    mean_time_solved_naive: Option<f64>,
    mean_time_all_fbi: Option<f64>,
    mean_time_all_naive: Option<f64>,
}

/// Path of the aggregate table written next to a rows CSV.
pub fn summary_path(rows_csv: &Path) -> PathBuf {
    let stem = rows_csv.file_stem().unwrap_or_default().to_string_lossy();
    rows_csv.with_file_name(format!("{stem}.summary.csv"))
}

/// Writes the rows to `path` and the aggregates to [`summary_path`].
pub fn write_report(report: &SuiteReport, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(summary_path(path))?;
    for a in &report.aggregates {
        w.serialize(SummaryRow {
            k: a.k,
            coverage_fbi: a.coverage_fbi,
            coverage_naive: a.coverage_naive,
            common: a.common,
            bc_fbi: a.bc_fbi,
            bc_naive: a.bc_naive,
            t: a.t_test.map(|t| t.t),
            p: a.t_test.map(|t| t.p),
            df: a.t_test.map(|t| t.df),
            degenerate: a.t_test.map(|t| t.degenerate),
            mean_time_solved_fbi: a.mean_time_solved_fbi,
            mean_time_solved_naive: a.mean_time_solved_naive,
            mean_time_all_fbi: a.mean_time_all_fbi,
            mean_time_all_naive: a.mean_time_all_naive,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<SuiteResultRow>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Shape of randomly generated grid instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSuiteParams {
    pub width: usize,
    pub height: usize,
    pub targets: usize,
    pub max_walls: usize,
    /// Oracle search depth used to keep only multi-behaviour instances.
    pub oracle_len: usize,
    /// Cost bound of the behaviour space the oracle checks against.
    pub cost_bound: u64,
}

impl Default for GridSuiteParams {
    fn default() -> Self {
        GridSuiteParams {
            width: 4,
            height: 4,
            targets: 3,
            max_walls: 3,
            oracle_len: 8,
            cost_bound: 8,
        }
    }
}

fn random_grid(rng: &mut ChaCha8Rng, params: &GridSuiteParams) -> String {
    let cells = params.width * params.height;
    let mut order: Vec<usize> = (0..cells).collect();
    for i in (1..cells).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let walls = rng.random_range(0..=params.max_walls);
    let mut map = vec!['.'; cells];
    map[order[0]] = 'S';
    for &c in &order[1..=params.targets] {
        map[c] = 'T';
    }
    for &c in order.iter().skip(1 + params.targets).take(walls) {
        map[c] = '#';
    }
    map.chunks(params.width)
        .map(|row| row.iter().collect::<String>() + "\n")
        .collect()
}

/// Deterministic suite of grid instances that the oracle confirms have at
/// least two behaviours under goal order plus cost bound. Returns
/// `(name, map text)` pairs.
pub fn generate_grid_suite(seed: u64, count: usize, params: &GridSuiteParams) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let text = random_grid(&mut rng, params);
        let Ok(problem) = GridProblem::parse(&text) else {
            continue;
        };
        let space = BehaviourSpace::new(vec![
            Feature::CostBound(params.cost_bound),
            Feature::GoalOrder(problem.goal_predicates().to_vec()),
        ])
        .expect("valid space");
        match brute_force_behaviours(&problem, &space, params.oracle_len, None) {
            Ok(found) if found.len() >= 2 => {
                out.push((format!("grid-{seed}-{:03}", out.len()), text));
            }
            _ => {}
        }
    }
    out
}

/// Writes a generated suite as `.grid` files.
pub fn write_grid_suite(dir: &Path, suite: &[(String, String)]) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    for (name, text) in suite {
        fs::write(dir.join(format!("{name}.grid")), text)?;
    }
    Ok(())
}
