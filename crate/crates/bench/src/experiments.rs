//! Benchmark runner: planner variants times repetitions on one map.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use cdt_core::geometry::{Point2, Polyline};
use cdt_core::map::CdtMap;
use cdt_core::map_ingest::{fit_components, load_grid, GridFormat, IngestConfig, OccupancyGrid};
use cdt_core::planner::{plan, Mode, PlanError, PlannerOptions, SamplerParams, Task, Termination};
use serde::{Deserialize, Serialize};

use crate::mapgen::{generate, interior_obstacles, GenParams};
use crate::oracle::{grid_dijkstra, word_string, HSignature, LatticeOracle};
use crate::rrt::{rrt_star, RrtOptions};
use crate::stats::{mean, median};

pub const C_OPT_DEFINITION: &str = "minimum final length over all planner runs of the task and the grid Dijkstra oracle";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    File(PathBuf),
    Generated(GenParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Cdt,
    CdtUndecoupled,
    CdtNoprune,
    CdtNoalpha,
    RrtStar,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 5] = [
        PlannerKind::Cdt,
        PlannerKind::CdtUndecoupled,
        PlannerKind::CdtNoprune,
        PlannerKind::CdtNoalpha,
        PlannerKind::RrtStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Cdt => "cdt",
            PlannerKind::CdtUndecoupled => "cdt-undecoupled",
            PlannerKind::CdtNoprune => "cdt-noprune",
            PlannerKind::CdtNoalpha => "cdt-noalpha",
            PlannerKind::RrtStar => "rrt-star",
        }
    }

    pub fn is_cdt(self) -> bool {
        self != PlannerKind::RrtStar
    }

    /// Planner options for this variant.
    pub fn options(self, beta: f64, alpha: f64) -> PlannerOptions {
        let mut o = PlannerOptions {
            params: SamplerParams { alpha, beta },
            ..PlannerOptions::default()
        };
        match self {
            PlannerKind::CdtUndecoupled => o.mode = Mode::Undecoupled,
            PlannerKind::CdtNoprune => o.prune = false,
            PlannerKind::CdtNoalpha => o.use_alpha = false,
            _ => {}
        }
        o
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown planner {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub start: Point2,
    pub goal: Point2,
}

fn default_epsilon() -> f64 {
    1.0
}
fn default_betas() -> Vec<f64> {
    vec![SamplerParams::default().beta]
}
fn default_alpha() -> f64 {
    SamplerParams::default().alpha
}
fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub map: MapSource,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Empty means the generator's own start and goal.
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
    pub planners: Vec<PlannerKind>,
    pub repetitions: usize,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub iterations: usize,
    /// Iterations for the baseline; defaults to `iterations`.
    #[serde(default)]
    pub rrt_iterations: Option<usize>,
    #[serde(default)]
    pub time_budget_ms: Option<u64>,
    #[serde(default)]
    pub stop_on_first_solution: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_one")]
    pub workers: usize,
    #[serde(default = "default_one")]
    pub oracle_subdivision: usize,
    /// Lattice side for per-class oracle lengths; 0 skips them.
    #[serde(default)]
    pub class_oracle_raster: usize,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.planners.is_empty() {
            bail!("no planners");
        }
        if self.betas.is_empty() || self.betas.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
            bail!("beta values must lie in (0, 1]");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            bail!("epsilon must be positive");
        }
        if self.workers == 0 || self.oracle_subdivision == 0 {
            bail!("workers and oracle_subdivision must be at least 1");
        }
        Ok(())
    }
}

/// Grid, fitted map and the simplified loops of each component.
#[derive(Debug, Clone)]
pub struct PreparedMap {
    pub grid: OccupancyGrid,
    pub map: CdtMap,
    pub loops: Vec<Vec<Vec<Point2>>>,
    pub init_us: u64,
    pub default_task: Option<TaskSpec>,
}

impl PreparedMap {
    pub fn new(grid: OccupancyGrid, epsilon: f64, default_task: Option<TaskSpec>) -> Result<Self> {
        let cfg = IngestConfig {
            epsilon_fit: epsilon,
            ..IngestConfig::default()
        };
        let t = Instant::now();
        let fitted = fit_components(&grid, &cfg)?;
        let loops = fitted
            .iter()
            .map(|f| f.simplified.iter().map(|l| l.ring().to_vec()).collect())
            .collect();
        let polygons = fitted.into_iter().map(|f| f.polygon).collect();
        let map = CdtMap::from_polygons(&grid, epsilon, polygons)?;
        let init_us = t.elapsed().as_micros() as u64;
        Ok(PreparedMap {
            grid,
            map,
            loops,
            init_us,
            default_task,
        })
    }

    pub fn load(source: &MapSource, epsilon: f64) -> Result<Self> {
        match source {
            MapSource::File(path) => {
                let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                let grid = load_grid(&bytes, GridFormat::Pgm, IngestConfig::default().occ_threshold)?;
                Self::new(grid, epsilon, None)
            }
            MapSource::Generated(p) => {
                let g = generate(p).map_err(anyhow::Error::msg)?;
                Self::new(
                    g.grid,
                    epsilon,
                    Some(TaskSpec {
                        start: g.start,
                        goal: g.goal,
                    }),
                )
            }
        }
    }

    /// h-signature of the component holding `p`.
    pub fn signature(&self, p: Point2) -> Option<HSignature> {
        let cell = self.map.locate(p).ok()?;
        let comp = self.map.dissection.cell(cell).component;
        Some(HSignature::new(self.loops.get(comp)?.clone(), 1e-7 * self.map.extent().diagonal()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: usize,
    pub planner: PlannerKind,
    pub beta: Option<f64>,
    pub rep: usize,
    pub seed: u64,
    pub success: bool,
    pub length: Option<f64>,
    pub code: Option<String>,
    pub t_init_us: Option<u64>,
    pub t_2pct_us: Option<u64>,
    pub iterations: usize,
    pub termination: Termination,
    pub budget_exceeded: bool,
    pub considered_cutlines: Option<usize>,
    pub classes: Option<usize>,
    pub elapsed_us: u64,
    pub history: Vec<(u64, f64)>,
    #[serde(skip)]
    pub path: Option<Polyline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassLength {
    pub code: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWord {
    pub code: String,
    pub word: String,
}

/// Reference values for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub dijkstra_length: Option<f64>,
    pub dijkstra_subdivision: usize,
    /// Lattice lengths of the classes the planners found.
    pub class_lengths: Vec<ClassLength>,
    pub class_raster: usize,
    /// Crossing word of each distinct best-path class.
    pub words: Vec<ClassWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub start: Point2,
    pub goal: Point2,
    pub c_opt: Option<f64>,
    pub oracle: OracleResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub task: usize,
    pub planner: PlannerKind,
    pub beta: Option<f64>,
    pub runs: usize,
    pub success_rate: f64,
    pub mean_t_init_us: Option<f64>,
    pub median_t_init_us: Option<f64>,
    pub t_2pct_rate: f64,
    pub mean_t_2pct_us: Option<f64>,
    pub median_t_2pct_us: Option<f64>,
    pub mean_length_ratio: Option<f64>,
    pub mean_elapsed_us: f64,
    pub mean_considered_cutlines: Option<f64>,
    pub budget_exceeded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub c_opt_definition: String,
    pub cells: usize,
    pub cutlines: usize,
    pub interior_obstacles: usize,
    pub init_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: BenchSpec,
    pub metadata: Metadata,
    pub tasks: Vec<TaskReport>,
    pub summary: Vec<SummaryRow>,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    task: usize,
    planner: PlannerKind,
    beta: Option<f64>,
    rep: usize,
}

fn run_job(spec: &BenchSpec, pm: &PreparedMap, tasks: &[TaskSpec], job: Job) -> Result<RunRecord, PlanError> {
    let ts = tasks[job.task];
    let seed = spec.seed.wrapping_add(job.rep as u64);
    let budget = spec.time_budget_ms.map(Duration::from_millis);
    let record = |success, length, code, t_init, iterations, termination, considered, classes, elapsed, history, path| RunRecord {
        task: job.task,
        planner: job.planner,
        beta: job.beta,
        rep: job.rep,
        seed,
        success,
        length,
        code,
        t_init_us: t_init,
        t_2pct_us: None,
        iterations,
        termination,
        budget_exceeded: termination == Termination::TimeBudget,
        considered_cutlines: considered,
        classes,
        elapsed_us: elapsed,
        history,
        path,
    };
    if job.planner == PlannerKind::RrtStar {
        let task = Task {
            x_init: ts.start,
            x_goal: ts.goal,
            iterations: spec.rrt_iterations.unwrap_or(spec.iterations),
            seed,
        };
        let opts = RrtOptions {
            stop_on_first_solution: spec.stop_on_first_solution,
            time_budget: budget,
            ..RrtOptions::default()
        };
        let r = rrt_star(&task, &pm.grid, &opts);
        return Ok(record(
            r.length.is_some(),
            r.length,
            None,
            r.t_init_us,
            r.iterations,
            r.termination,
            None,
            None,
            r.elapsed_us,
            r.history,
            r.path,
        ));
    }
    let task = Task {
        x_init: ts.start,
        x_goal: ts.goal,
        iterations: spec.iterations,
        seed,
    };
    let mut opts = job.planner.options(job.beta.unwrap_or(SamplerParams::default().beta), spec.alpha);
    opts.stop_on_first_solution = spec.stop_on_first_solution;
    opts.time_budget = budget;
    let r = plan(&task, &pm.map.dissection, &pm.map.graph, &opts)?;
    Ok(record(
        r.best.is_some(),
        r.best.as_ref().map(|b| b.length),
        r.best.as_ref().map(|b| b.code.to_string()),
        r.t_init_us,
        r.iterations,
        r.termination,
        Some(r.considered_cutlines),
        Some(r.classes.len()),
        r.elapsed_us,
        r.history,
        r.best.map(|b| b.path),
    ))
}

fn summarize(runs: &[RunRecord], tasks: &[TaskReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, PlannerKind, Option<u64>)> = runs.iter().map(|r| (r.task, r.planner, r.beta.map(f64::to_bits))).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(task, planner, beta)| {
            let group: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.task == task && r.planner == planner && r.beta.map(f64::to_bits) == beta)
                .collect();
            let n = group.len();
            let t_init: Vec<f64> = group.iter().filter_map(|r| r.t_init_us.map(|t| t as f64)).collect();
            let t_2: Vec<f64> = group.iter().filter_map(|r| r.t_2pct_us.map(|t| t as f64)).collect();
            let ratios: Vec<f64> = match tasks[task].c_opt {
                Some(c) => group.iter().filter_map(|r| r.length.map(|l| l / c)).collect(),
                None => Vec::new(),
            };
            let considered: Vec<f64> = group.iter().filter_map(|r| r.considered_cutlines.map(|c| c as f64)).collect();
            let elapsed: Vec<f64> = group.iter().map(|r| r.elapsed_us as f64).collect();
            SummaryRow {
                task,
                planner,
                beta: beta.map(f64::from_bits),
                runs: n,
                success_rate: group.iter().filter(|r| r.success).count() as f64 / n as f64,
                mean_t_init_us: mean(&t_init),
                median_t_init_us: median(&t_init),
                t_2pct_rate: t_2.len() as f64 / n as f64,
                mean_t_2pct_us: mean(&t_2),
                median_t_2pct_us: median(&t_2),
                mean_length_ratio: mean(&ratios),
                mean_elapsed_us: mean(&elapsed).unwrap_or(0.0),
                mean_considered_cutlines: mean(&considered),
                budget_exceeded: group.iter().filter(|r| r.budget_exceeded).count(),
            }
        })
        .collect()
}

/// Runs every planner variant of `spec` on an already prepared map.
pub fn run_bench_on(spec: &BenchSpec, pm: &PreparedMap) -> Result<BenchReport> {
    spec.validate()?;
    let tasks: Vec<TaskSpec> = if spec.tasks.is_empty() {
        vec![pm.default_task.context("no tasks given and the map source has no default task")?]
    } else {
        spec.tasks.clone()
    };
    let mut jobs = Vec::new();
    for t in 0..tasks.len() {
        for &planner in &spec.planners {
            let betas: Vec<Option<f64>> = if planner.is_cdt() {
                spec.betas.iter().map(|&b| Some(b)).collect()
            } else {
                vec![None]
            };
            for beta in betas {
                for rep in 0..spec.repetitions {
                    jobs.push(Job { task: t, planner, beta, rep });
                }
            }
        }
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for _ in 0..spec.workers.min(jobs.len()).max(1) {
            let tx = tx.clone();
            let (next, jobs, tasks) = (&next, &jobs, &tasks);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&job) = jobs.get(i) else { break };
                if tx.send((i, run_job(spec, pm, tasks, job))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut results: Vec<(usize, Result<RunRecord, PlanError>)> = rx.into_iter().collect();
    results.sort_by_key(|r| r.0);
    let mut runs = Vec::with_capacity(results.len());
    for (i, r) in results {
        let job = jobs[i];
        runs.push(r.with_context(|| format!("task {} planner {}", job.task, job.planner.name()))?);
    }

    let mut reports = Vec::new();
    for (t, ts) in tasks.iter().enumerate() {
        let dijkstra = grid_dijkstra(&pm.grid, ts.start, ts.goal, spec.oracle_subdivision).map(|g| g.length);
        let c_opt = runs
            .iter()
            .filter(|r| r.task == t)
            .filter_map(|r| r.length)
            .chain(dijkstra)
            .min_by(f64::total_cmp);
        if let Some(c) = c_opt {
            for r in runs.iter_mut().filter(|r| r.task == t) {
                r.t_2pct_us = r
                    .history
                    .iter()
                    .find(|&&(_, l)| l <= 1.02 * c * (1.0 + 1e-12))
                    .map(|&(time, _)| time);
            }
        }
        reports.push(TaskReport {
            start: ts.start,
            goal: ts.goal,
            c_opt,
            oracle: task_oracle(spec, pm, &runs, t, ts, dijkstra),
        });
    }
    let summary = summarize(&runs, &reports);
    let stats = pm.map.stats();
    Ok(BenchReport {
        spec: spec.clone(),
        metadata: Metadata {
            c_opt_definition: C_OPT_DEFINITION.to_string(),
            cells: stats.cells,
            cutlines: stats.cutlines,
            interior_obstacles: interior_obstacles(&pm.grid),
            init_us: pm.init_us,
        },
        tasks: reports,
        summary,
        runs,
    })
}

fn task_oracle(spec: &BenchSpec, pm: &PreparedMap, runs: &[RunRecord], t: usize, ts: &TaskSpec, dijkstra: Option<f64>) -> OracleResult {
    let mut codes: Vec<(String, Option<Polyline>)> = Vec::new();
    for r in runs.iter().filter(|r| r.task == t) {
        if let Some(code) = &r.code {
            if !codes.iter().any(|(c, _)| c == code) {
                codes.push((code.clone(), r.path.clone()));
            }
        }
    }
    codes.sort_by(|a, b| a.0.cmp(&b.0));
    let mut class_lengths = Vec::new();
    if spec.class_oracle_raster > 0 {
        let mut lo = LatticeOracle::new(&pm.map.dissection, spec.class_oracle_raster);
        for (code, _) in &codes {
            let Ok(c) = cdt_core::topology::CdtCode::parse_in(code, &pm.map.graph) else { continue };
            if let Some(o) = lo.class_path(&c, ts.start, ts.goal) {
                class_lengths.push(ClassLength {
                    code: code.clone(),
                    length: o.length,
                });
            }
        }
    }
    let mut words = Vec::new();
    if let Some(sig) = pm.signature(ts.start) {
        for (code, path) in &codes {
            if let Some(w) = path.as_ref().and_then(|p| sig.word_shifted(p)) {
                words.push(ClassWord {
                    code: code.clone(),
                    word: word_string(&w),
                });
            }
        }
    }
    OracleResult {
        dijkstra_length: dijkstra,
        dijkstra_subdivision: spec.oracle_subdivision,
        class_lengths,
        class_raster: spec.class_oracle_raster,
        words,
    }
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let pm = PreparedMap::load(&spec.map, spec.epsilon)?;
    run_bench_on(spec, &pm)
}

/// Summary table as CSV with a fixed column order.
pub fn summary_csv(report: &BenchReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "task",
        "planner",
        "beta",
        "runs",
        "success_rate",
        "mean_t_init_us",
        "median_t_init_us",
        "t_2pct_rate",
        "mean_t_2pct_us",
        "median_t_2pct_us",
        "mean_length_ratio",
        "mean_elapsed_us",
        "mean_considered_cutlines",
        "budget_exceeded",
        "c_opt",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in &report.summary {
        w.write_record([
            s.task.to_string(),
            s.planner.name().to_string(),
            opt(s.beta),
            s.runs.to_string(),
            s.success_rate.to_string(),
            opt(s.mean_t_init_us),
            opt(s.median_t_init_us),
            s.t_2pct_rate.to_string(),
            opt(s.mean_t_2pct_us),
            opt(s.median_t_2pct_us),
            opt(s.mean_length_ratio),
            s.mean_elapsed_us.to_string(),
            opt(s.mean_considered_cutlines),
            s.budget_exceeded.to_string(),
            opt(report.tasks[s.task].c_opt),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
