//! Sampling planner over cutlines with per-class shortest paths.

mod prune;
mod sampler;
mod tree;

pub use prune::{reduce_branches, PrunedGraph};
pub use sampler::{CutlineStats, SamplerParams, SumTree};
pub use tree::{PlanTree, TreeNode};

use std::collections::{HashSet, VecDeque};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::DissectionMap;
use crate::geometry::{Point2, Polyline};
use crate::shortest_path::{shortest_in_class, ClassPath, SolveError, SolverConfig};
use crate::topology::{locate, reduce, CdtCode, TopoPath, TopologyError, TopologyGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start and goal are in different free-space components")]
    Unreachable,
    #[error(transparent)]
    NotInFreeSpace(#[from] TopologyError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Solver(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub x_init: Point2,
    pub x_goal: Point2,
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Class discovery by the tree, in-class optimisation by the solver.
    Decoupled,
    /// Best path is the shortest raw tree path to the goal.
    Undecoupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub params: SamplerParams,
    pub mode: Mode,
    pub prune: bool,
    pub use_alpha: bool,
    pub solver: SolverConfig,
    pub stop_on_first_solution: bool,
    #[serde(with = "opt_duration_us")]
    pub time_budget: Option<Duration>,
    /// Check tree invariants on every touched node each iteration.
    pub debug_invariants: bool,
    /// Keep the final tree edges in the result.
    pub record_tree: bool,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            params: SamplerParams::default(),
            mode: Mode::Decoupled,
            prune: true,
            use_alpha: true,
            solver: SolverConfig::default(),
            stop_on_first_solution: false,
            time_budget: None,
            debug_invariants: false,
            record_tree: false,
        }
    }
}

mod opt_duration_us {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_some(&(d.as_micros() as u64)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        Ok(Option::<u64>::deserialize(d)?.map(Duration::from_micros))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    SameCell,
    DecidedByPruning,
    IterationsExhausted,
    FirstSolution,
    TimeBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestPath {
    pub path: Polyline,
    #[serde(with = "code_text")]
    pub code: CdtCode,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    #[serde(with = "code_text")]
    pub code: CdtCode,
    pub path: Polyline,
    pub length: f64,
    pub iteration: usize,
    pub time_us: u64,
    /// Added by splicing out a repeated cell rather than found by the tree.
    pub spliced: bool,
}

mod code_text {
    use crate::topology::CdtCode;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &CdtCode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CdtCode, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub best: Option<BestPath>,
    pub classes: Vec<ClassRecord>,
    pub t_init_us: Option<u64>,
    /// `(time, length)` at each improvement of the best path.
    pub history: Vec<(u64, f64)>,
    pub iterations: usize,
    pub termination: Termination,
    pub considered_cutlines: usize,
    pub total_cutlines: usize,
    pub tree_nodes: usize,
    pub elapsed_us: u64,
    pub invariant_violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<[Point2; 2]>>,
}

impl PlanResult {
    /// First time the best length was within `factor` of `c_opt`.
    pub fn time_within(&self, c_opt: f64, factor: f64) -> Option<u64> {
        self.history
            .iter()
            .find(|&&(_, l)| l <= factor * c_opt * (1.0 + 1e-12))
            .map(|&(t, _)| t)
    }

    pub fn t_2pct_us(&self, c_opt: f64) -> Option<u64> {
        self.time_within(c_opt, 1.02)
    }

    pub fn best_length(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.length)
    }

    /// Zeroes every wall-clock field.
    pub fn without_timing(mut self) -> Self {
        self.t_init_us = self.t_init_us.map(|_| 0);
        for h in &mut self.history {
            h.0 = 0;
        }
        for c in &mut self.classes {
            c.time_us = 0;
        }
        self.elapsed_us = 0;
        self
    }
}

/// Cutline of node `x` borders the goal cell.
pub fn near_goal(dm: &DissectionMap, cutline: usize, goal_cell: usize) -> bool {
    dm.cutline(cutline).borders(goal_cell)
}

/// Removes the stretch between the first and last visit of a repeated
/// cell until no cell repeats.
pub fn splice_repeats(code: &CdtCode, g: &TopologyGraph) -> Option<CdtCode> {
    let mut nodes = code.nodes().to_vec();
    let mut changed = false;
    'outer: loop {
        for i in 0..nodes.len() {
            if let Some(j) = nodes.iter().rposition(|&n| n == nodes[i]) {
                if j > i {
                    nodes.drain(i + 1..=j);
                    changed = true;
                    continue 'outer;
                }
            }
        }
        break;
    }
    if !changed {
        return None;
    }
    TopoPath::from_nodes(g, &nodes).ok().map(|p| reduce(&p))
}

struct Run<'a> {
    dm: &'a DissectionMap,
    g: &'a TopologyGraph,
    task: Task,
    opts: PlannerOptions,
    start: Instant,
    xi_old: HashSet<CdtCode>,
    classes: Vec<ClassRecord>,
    best: Option<BestPath>,
    history: Vec<(u64, f64)>,
    t_init: Option<u64>,
}

impl<'a> Run<'a> {
    fn now(&self) -> u64 {
        self.start.elapsed().as_micros() as u64
    }

    fn offer(&mut self, path: Polyline, code: CdtCode, length: f64) {
        if self.best.as_ref().is_none_or(|b| length < b.length) {
            let t = self.now();
            self.t_init.get_or_insert(t);
            self.history.push((t, length));
            self.best = Some(BestPath { path, code, length });
        }
    }

    fn solve(&self, code: &CdtCode) -> Result<ClassPath, PlanError> {
        Ok(shortest_in_class(
            code,
            self.task.x_init,
            self.task.x_goal,
            self.dm,
            self.g,
            &self.opts.solver,
        )?)
    }

    /// Records a newly seen class; returns its cutlines for the sampler.
    fn record(&mut self, code: CdtCode, iteration: usize, spliced: bool) -> Result<Option<Vec<usize>>, PlanError> {
        if self.xi_old.contains(&code) {
            return Ok(None);
        }
        self.xi_old.insert(code.clone());
        let sol = self.solve(&code)?;
        self.classes.push(ClassRecord {
            code: code.clone(),
            path: sol.path.clone(),
            length: sol.length,
            iteration,
            time_us: self.now(),
            spliced,
        });
        let cutlines = sol.cutlines.clone();
        self.offer(sol.path, code, sol.length);
        Ok(Some(cutlines))
    }

    fn finish(self, termination: Termination, iterations: usize, considered: usize, tree_nodes: usize, violations: usize) -> PlanResult {
        PlanResult {
            elapsed_us: self.now(),
            best: self.best,
            classes: self.classes,
            t_init_us: self.t_init,
            history: self.history,
            iterations,
            termination,
            considered_cutlines: considered,
            total_cutlines: self.dm.cutlines.len(),
            tree_nodes,
            invariant_violations: violations,
            tree: None,
        }
    }
}

pub fn plan(task: &Task, dm: &DissectionMap, g: &TopologyGraph, opts: &PlannerOptions) -> Result<PlanResult, PlanError> {
    opts.params.validate().map_err(PlanError::InvalidParams)?;
    opts.solver.validate()?;
    let start = Instant::now();
    let s = locate(dm, task.x_init)?;
    let t = locate(dm, task.x_goal)?;
    if dm.cell(s).component != dm.cell(t).component {
        return Err(PlanError::Unreachable);
    }
    let comp = dm.cell(s).component;
    let in_comp: Vec<usize> = (0..dm.cutlines.len())
        .filter(|&e| dm.cell(dm.cutline(e).left_poly).component == comp)
        .collect();
    let mut run = Run {
        dm,
        g,
        task: *task,
        opts: *opts,
        start,
        xi_old: HashSet::new(),
        classes: Vec::new(),
        best: None,
        history: Vec::new(),
        t_init: None,
    };

    if s == t {
        let code = reduce(&TopoPath::single(s));
        run.record(code, 0, false)?;
        return Ok(run.finish(Termination::SameCell, 0, 0, 1, 0));
    }
    let pruned = if opts.prune {
        let (pg, code) = reduce_branches(g, s, t);
        if let Some(code) = code {
            let considered = in_comp.iter().filter(|&&e| pg.cutline_alive(g, e)).count();
            run.record(code, 0, false)?;
            return Ok(run.finish(Termination::DecidedByPruning, 0, considered, 1, 0));
        }
        pg
    } else {
        PrunedGraph::full(g)
    };
    let active: Vec<usize> = in_comp.iter().copied().filter(|&e| pruned.cutline_alive(g, e)).collect();
    let considered = active.len();
    let mut slot = vec![usize::MAX; dm.cutlines.len()];
    for (k, &e) in active.iter().enumerate() {
        slot[e] = k;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let mut tree = PlanTree::new(task.x_init, s, dm.cells.len());
    let mut stats = CutlineStats::new(dm.cutlines.len());
    let mut weights = SumTree::new(active.len());
    let mut cell_count = vec![0u32; dm.cells.len()];
    let refresh = |e: usize, stats: &CutlineStats, weights: &mut SumTree| {
        if slot[e] != usize::MAX {
            weights.set(slot[e], stats.weight(e, &opts.params, opts.use_alpha));
        }
    };
    let add_to_cell = |c: usize, cell_count: &mut Vec<u32>, stats: &mut CutlineStats, weights: &mut SumTree| {
        cell_count[c] += 1;
        for &id in &dm.cell(c).cutline_ids {
            stats.mu[id] += 1;
            refresh(id, stats, weights);
        }
    };
    add_to_cell(s, &mut cell_count, &mut stats, &mut weights);

    let mut q_r: VecDeque<usize> = VecDeque::new();
    // (node, stamp of its root path when last encoded)
    let mut q_g: Vec<(usize, Option<u64>)> = Vec::new();
    let mut near = Vec::new();
    let mut violations = 0;
    let mut termination = Termination::IterationsExhausted;
    let mut iterations = 0;

    for it in 1..=task.iterations {
        if let Some(b) = opts.time_budget {
            if start.elapsed() >= b {
                termination = Termination::TimeBudget;
                break;
            }
        }
        iterations = it;
        let stamp = it as u64;
        let Some(k) = weights.sample(&mut rng) else { break };
        let l = active[k];
        let x = dm.cutline(l).at(rng.gen::<f64>());
        tree.near(dm, l, &mut near);
        let Some(parent) = tree.closest(x, &near) else { break };
        let id = tree.insert(dm, x, l, parent, stamp);
        stats.eta[l] += 1;
        refresh(l, &stats, &mut weights);
        let c = dm.cutline(l);
        let (cl, cr) = (c.left_poly, c.right_poly);
        add_to_cell(cl, &mut cell_count, &mut stats, &mut weights);
        add_to_cell(cr, &mut cell_count, &mut stats, &mut weights);
        q_r.push_back(id);
        let mut touched = vec![id];
        if near_goal(dm, l, t) {
            q_g.push((id, None));
        } else {
            let changed = tree.rewire(dm, &mut q_r, stamp);
            if opts.debug_invariants {
                for x in changed {
                    touched.extend(tree.subtree(x));
                }
            }
        }
        if opts.debug_invariants {
            touched.sort_unstable();
            touched.dedup();
            violations += touched
                .iter()
                .filter(|&&i| tree.repeats_cell(i) || !tree.cost_consistent(i))
                .count();
        }

        match opts.mode {
            Mode::Decoupled => {
                for qi in 0..q_g.len() {
                    let (xe, seen) = q_g[qi];
                    let st = tree.node(xe).stamp;
                    if seen == Some(st) {
                        continue;
                    }
                    q_g[qi].1 = Some(st);
                    let mut seq = tree.cell_sequence(xe);
                    if seq.last() != Some(&t) {
                        seq.push(t);
                    }
                    let code = reduce(&TopoPath::from_nodes(g, &seq).map_err(PlanError::NotInFreeSpace)?);
                    let spliced = splice_repeats(&code, g);
                    if let Some(cuts) = run.record(code, it, false)? {
                        for e in cuts {
                            stats.kappa[e] += 1;
                            refresh(e, &stats, &mut weights);
                        }
                    }
                    if let Some(sp) = spliced {
                        if let Some(cuts) = run.record(sp, it, true)? {
                            for e in cuts {
                                stats.kappa[e] += 1;
                                refresh(e, &stats, &mut weights);
                            }
                        }
                    }
                }
            }
            Mode::Undecoupled => {
                let mut cand: Option<(f64, usize)> = None;
                for &(xe, _) in &q_g {
                    let n = tree.node(xe);
                    let len = n.cost + n.point.dist(task.x_goal);
                    if cand.is_none_or(|(b, _)| len < b) {
                        cand = Some((len, xe));
                    }
                }
                if let Some((len, xe)) = cand {
                    if run.best.as_ref().is_none_or(|b| len < b.length) {
                        let mut pts = tree.backtrack(xe);
                        pts.push(task.x_goal);
                        let path = Polyline::from_points_dedup(pts).expect("non-empty");
                        let mut seq = tree.cell_sequence(xe);
                        if seq.last() != Some(&t) {
                            seq.push(t);
                        }
                        let code = reduce(&TopoPath::from_nodes(g, &seq).map_err(PlanError::NotInFreeSpace)?);
                        run.offer(path, code, len);
                    }
                }
            }
        }
        if opts.stop_on_first_solution && run.best.is_some() {
            termination = Termination::FirstSolution;
            break;
        }
    }
    let n = tree.len();
    let mut out = run.finish(termination, iterations, considered, n, violations);
    if opts.record_tree {
        out.tree = Some(
            tree.nodes
                .iter()
                .filter(|x| x.parent != tree::NONE)
                .map(|x| [tree.node(x.parent as usize).point, x.point])
                .collect(),
        );
    }
    Ok(out)
}
