use cdt_bench::experiments::{run_bench_on, BenchSpec, MapSource, PlannerKind, PreparedMap};
use cdt_bench::mapgen::{corpus, generate, Archetype, GenParams};
use cdt_bench::oracle::grid_dijkstra;
use cdt_bench::rrt::{rrt_star, segment_free, RrtOptions};
use cdt_bench::stats::{median, sign_test};
use cdt_core::geometry::Point2;
use cdt_core::planner::Task;
use proptest::prelude::*;

fn spec(p: GenParams, planners: Vec<PlannerKind>) -> BenchSpec {
    serde_json::from_value(serde_json::json!({
        "map": {"generated": p},
        "planners": planners,
        "repetitions": 3,
        "iterations": 400,
        "rrt_iterations": 4000,
    }))
    .unwrap()
}

#[test]
fn corpus_tasks_are_free_and_connected() {
    for p in corpus() {
        let g = generate(&p).unwrap();
        let d = grid_dijkstra(&g.grid, g.start, g.goal, 1).unwrap_or_else(|| panic!("{} is disconnected", p.archetype.name()));
        assert!(d.length >= g.start.dist(g.goal) - 1e-9);
        let pm = PreparedMap::new(g.grid.clone(), 1.0, None).unwrap();
        assert!(pm.map.locate(g.start).is_ok() && pm.map.locate(g.goal).is_ok(), "{}", p.archetype.name());
    }
}

#[test]
fn rrt_paths_stay_free() {
    let g = generate(&GenParams::new(Archetype::Floorplan, 100, 100).obstacles(1).seed(4)).unwrap();
    let task = Task {
        x_init: g.start,
        x_goal: g.goal,
        iterations: 5000,
        seed: 1,
    };
    let r = rrt_star(&task, &g.grid, &RrtOptions::default());
    let path = r.path.unwrap();
    assert!(path.segments().all(|s| segment_free(&g.grid, s.a, s.b)));
    assert_eq!(path.first(), g.start);
    assert_eq!(path.last(), g.goal);
    assert!((path.length() - r.length.unwrap()).abs() < 1e-9 * path.length());
    assert!(r.history.windows(2).all(|w| w[1].1 < w[0].1));
    let d = grid_dijkstra(&g.grid, g.start, g.goal, 2).unwrap();
    assert!(r.length.unwrap() >= g.start.dist(g.goal));
    assert!(r.length.unwrap() < 1.5 * d.length);
}

#[test]
fn report_is_consistent() {
    let p = GenParams::new(Archetype::Cluttered, 80, 80).obstacles(4).seed(3);
    let s = spec(p, vec![PlannerKind::Cdt, PlannerKind::CdtUndecoupled, PlannerKind::RrtStar]);
    let pm = PreparedMap::load(&s.map, s.epsilon).unwrap();
    let r = run_bench_on(&s, &pm).unwrap();
    assert_eq!(r.runs.len(), 9);
    assert_eq!(r.summary.len(), 3);
    let c_opt = r.tasks[0].c_opt.unwrap();
    let lengths = r.runs.iter().filter_map(|x| x.length).chain(r.tasks[0].oracle.dijkstra_length);
    assert_eq!(lengths.fold(f64::INFINITY, f64::min), c_opt);
    for run in &r.runs {
        let first = run.history.iter().find(|h| h.1 <= 1.02 * c_opt * (1.0 + 1e-12)).map(|h| h.0);
        assert_eq!(run.t_2pct_us, first);
        assert_eq!(run.seed, s.seed + run.rep as u64);
        assert_eq!(run.success, run.length.is_some());
    }
}

#[test]
fn workers_do_not_change_results() {
    let p = GenParams::new(Archetype::MazeLoops, 60, 60).loops(3).seed(2);
    let mut s = spec(p, vec![PlannerKind::Cdt, PlannerKind::CdtNoprune]);
    let pm = PreparedMap::load(&s.map, s.epsilon).unwrap();
    let one = run_bench_on(&s, &pm).unwrap();
    s.workers = 3;
    let three = run_bench_on(&s, &pm).unwrap();
    let key = |r: &cdt_bench::experiments::BenchReport| -> Vec<_> {
        r.runs.iter().map(|x| (x.planner, x.rep, x.code.clone(), x.length.map(f64::to_bits), x.iterations)).collect()
    };
    assert_eq!(key(&one), key(&three));
}

#[test]
fn spec_validation() {
    let p = GenParams::new(Archetype::Maze, 40, 40);
    let mut s = spec(p, vec![PlannerKind::Cdt]);
    assert!(s.validate().is_ok());
    s.betas = vec![0.0];
    assert!(s.validate().is_err());
    let mut s = spec(p, vec![PlannerKind::Cdt]);
    s.repetitions = 0;
    assert!(s.validate().is_err());
    let bad = serde_json::json!({"map": {"generated": p}, "planners": ["cdt"], "repetitions": 1, "iterations": 1, "typo": 3});
    assert!(serde_json::from_value::<BenchSpec>(bad).is_err());
    assert!(matches!(s.map, MapSource::Generated(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segment_test_is_symmetric(seed in 0u64..50, ax in 0.0f64..60.0, ay in 0.0f64..60.0, bx in 0.0f64..60.0, by in 0.0f64..60.0) {
        let g = generate(&GenParams::new(Archetype::Cluttered, 60, 60).obstacles(5).seed(seed)).unwrap();
        let (a, b) = (Point2::new(ax, ay), Point2::new(bx, by));
        prop_assert_eq!(segment_free(&g.grid, a, b), segment_free(&g.grid, b, a));
        if segment_free(&g.grid, a, b) {
            let m = a.midpoint(b);
            prop_assert!(segment_free(&g.grid, a, m) && segment_free(&g.grid, m, b));
        }
    }

    #[test]
    fn median_and_sign_test_bounds(xs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..60)) {
        let a: Vec<f64> = xs.iter().map(|p| p.0).collect();
        let m = median(&a).unwrap();
        let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
        let st = sign_test(&xs);
        prop_assert!((0.0..=1.0).contains(&st.p_value));
        prop_assert_eq!(st.wins + st.losses + st.ties, xs.len() as u64);
        let flipped: Vec<(f64, f64)> = xs.iter().map(|&(x, y)| (y, x)).collect();
        prop_assert_eq!(sign_test(&flipped).wins, st.losses);
    }
}
