use cdt_core::geometry::Point2;
use cdt_core::map::CdtMap;
use cdt_core::map_ingest::{IngestConfig, OccupancyGrid};
use cdt_core::planner::{plan, Mode, PlanError, PlannerOptions, Task, Termination};
use cdt_core::topology::{encode, homotopic};

fn grid(w: usize, h: usize, blocks: &[(usize, usize, usize, usize)]) -> OccupancyGrid {
    let mut occ = vec![false; w * h];
    for &(c0, r0, bw, bh) in blocks {
        for r in r0..(r0 + bh).min(h) {
            for c in c0..(c0 + bw).min(w) {
                occ[r * w + c] = true;
            }
        }
    }
    OccupancyGrid::from_occupancy(w, h, &occ).unwrap()
}

fn build(g: &OccupancyGrid) -> CdtMap {
    CdtMap::build(g, &IngestConfig { epsilon_fit: 1.0, ..IngestConfig::default() }).unwrap()
}

fn task(a: (f64, f64), b: (f64, f64), iterations: usize, seed: u64) -> Task {
    Task {
        x_init: Point2::new(a.0, a.1),
        x_goal: Point2::new(b.0, b.1),
        iterations,
        seed,
    }
}

#[test]
fn ring_finds_both_sides() {
    let m = build(&grid(60, 60, &[(20, 20, 20, 20)]));
    let t = task((5.0, 30.0), (55.0, 30.0), 400, 7);
    let r = plan(&t, &m.dissection, &m.graph, &PlannerOptions::default()).unwrap();
    let best = r.best.as_ref().unwrap();
    let opt = 2.0 * (15.0f64.powi(2) + 10.0f64.powi(2)).sqrt() + 20.0;
    assert!((best.length - opt).abs() < 1e-6 * opt, "{} vs {}", best.length, opt);
    assert!(r.classes.len() >= 2);
    let found: Vec<_> = r.classes.iter().filter(|c| (c.length - opt).abs() < 1e-6 * opt).collect();
    assert!(found.len() >= 2, "both sides should reach the optimum");
    assert!(!homotopic(&found[0].code, &found[1].code).unwrap());
    // the returned path lies in its class
    let code = encode(&m.dissection, &best.path).unwrap();
    assert_eq!(code, best.code);
    assert!(r.history.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 >= w[0].0));
}

#[test]
fn same_seed_same_result() {
    let m = build(&grid(80, 60, &[(15, 10, 8, 8), (40, 30, 10, 6), (20, 40, 6, 12), (60, 15, 7, 20)]));
    let t = task((3.0, 3.0), (76.0, 56.0), 600, 11);
    let o = PlannerOptions::default();
    let a = plan(&t, &m.dissection, &m.graph, &o).unwrap().without_timing();
    let b = plan(&t, &m.dissection, &m.graph, &o).unwrap().without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = plan(&Task { seed: 12, ..t }, &m.dissection, &m.graph, &o).unwrap().without_timing();
    assert!(a.best.is_some() && c.best.is_some());
}

#[test]
fn same_cell_is_a_segment() {
    let m = build(&grid(40, 40, &[]));
    let t = task((2.0, 2.0), (30.0, 35.0), 100, 1);
    let r = plan(&t, &m.dissection, &m.graph, &PlannerOptions::default()).unwrap();
    assert_eq!(r.termination, Termination::SameCell);
    let b = r.best.unwrap();
    assert_eq!(b.path.points().len(), 2);
    assert!((b.length - Point2::new(2.0, 2.0).dist(Point2::new(30.0, 35.0))).abs() < 1e-12);
}

#[test]
fn corridor_is_decided_by_pruning() {
    // an L-shaped corridor: no cycles, one class
    let m = build(&grid(40, 40, &[(10, 0, 30, 30)]));
    let t = task((5.0, 35.0), (35.0, 5.0), 100, 1);
    let r = plan(&t, &m.dissection, &m.graph, &PlannerOptions::default()).unwrap();
    assert_eq!(r.termination, Termination::DecidedByPruning);
    assert_eq!(r.classes.len(), 1);
    assert_eq!(r.iterations, 0);
    let opt = Point2::new(5.0, 35.0).dist(Point2::new(10.0, 10.0)) + Point2::new(10.0, 10.0).dist(Point2::new(35.0, 5.0));
    assert!((r.best.unwrap().length - opt).abs() < 1e-6 * opt);
}

#[test]
fn separate_components_are_unreachable() {
    let m = build(&grid(40, 40, &[(18, 0, 4, 40)]));
    let t = task((5.0, 5.0), (35.0, 35.0), 100, 1);
    assert_eq!(plan(&t, &m.dissection, &m.graph, &PlannerOptions::default()), Err(PlanError::Unreachable));
    let t = task((19.0, 5.0), (35.0, 35.0), 100, 1);
    assert!(matches!(plan(&t, &m.dissection, &m.graph, &PlannerOptions::default()), Err(PlanError::NotInFreeSpace(_))));
}

#[test]
fn modes_and_options() {
    let m = build(&grid(60, 60, &[(20, 20, 20, 20)]));
    let t = task((5.0, 30.0), (55.0, 30.0), 300, 3);
    let first = PlannerOptions { stop_on_first_solution: true, ..PlannerOptions::default() };
    let r = plan(&t, &m.dissection, &m.graph, &first).unwrap();
    assert_eq!(r.termination, Termination::FirstSolution);
    assert!(r.t_init_us.is_some());

    let und = PlannerOptions { mode: Mode::Undecoupled, ..PlannerOptions::default() };
    let r = plan(&t, &m.dissection, &m.graph, &und).unwrap();
    assert!(r.classes.is_empty());
    let opt = 2.0 * (15.0f64.powi(2) + 10.0f64.powi(2)).sqrt() + 20.0;
    assert!(r.best.unwrap().length >= opt - 1e-9);

    let dbg = PlannerOptions { debug_invariants: true, prune: false, ..PlannerOptions::default() };
    let r = plan(&t, &m.dissection, &m.graph, &dbg).unwrap();
    assert_eq!(r.invariant_violations, 0);

    let bad = PlannerOptions { params: cdt_core::planner::SamplerParams { alpha: 1.0, beta: 0.2 }, ..PlannerOptions::default() };
    assert!(matches!(plan(&t, &m.dissection, &m.graph, &bad), Err(PlanError::InvalidParams(_))));
}
