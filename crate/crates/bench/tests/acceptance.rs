//! Acceptance suite. Runs every criterion in order, prints one line each and
//! exits non-zero if any fails.

use std::collections::{HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cdt_bench::experiments::{run_bench_on, BenchReport, BenchSpec, MapSource, PlannerKind, PreparedMap};
use cdt_bench::mapgen::{corpus, generate, random_free_point, Archetype, GenParams};
use cdt_bench::oracle::LatticeOracle;
use cdt_bench::stats::{bootstrap_mean_diff, mean, median, sign_test};
use cdt_core::decomposition::decompose;
use cdt_core::geometry::{signed_area, Point2, Polyline};
use cdt_core::map::CdtMap;
use cdt_core::map_ingest::{merge_holes, BoundaryLoop, LoopKind};
use cdt_core::planner::{plan, PlanError, PlannerOptions, Task};
use cdt_core::shortest_path::{shortest_in_class, SolverConfig};
use cdt_core::topology::{encode, gamma_g, homotopic, reduce, TopoPath};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn prepared(p: GenParams) -> PreparedMap {
    PreparedMap::load(&MapSource::Generated(p), 1.0).expect("generated map")
}

fn spec(p: GenParams, planners: Vec<PlannerKind>, repetitions: usize, iterations: usize) -> BenchSpec {
    BenchSpec {
        map: MapSource::Generated(p),
        epsilon: 1.0,
        tasks: vec![],
        planners,
        repetitions,
        betas: vec![0.2],
        alpha: 1e9,
        iterations,
        rrt_iterations: None,
        time_budget_ms: None,
        stop_on_first_solution: false,
        seed: 0,
        workers: 1,
        oracle_subdivision: 1,
        class_oracle_raster: 0,
    }
}

fn bench(s: &BenchSpec) -> BenchReport {
    let pm = PreparedMap::load(&s.map, s.epsilon).expect("map");
    run_bench_on(s, &pm).expect("bench")
}

/// Values for one planner (and beta), with a missing value read as infinite.
fn t2_or_inf(r: &BenchReport, k: PlannerKind) -> Vec<f64> {
    r.runs
        .iter()
        .filter(|x| x.planner == k)
        .map(|x| x.t_2pct_us.map_or(f64::INFINITY, |t| t as f64))
        .collect()
}

fn point_in_cell(m: &CdtMap, c: usize, rng: &mut ChaCha8Rng) -> Point2 {
    let cell = m.dissection.cell(c);
    let w: Vec<f64> = cell.vertices.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    cell.vertices.iter().zip(&w).fold(Point2::default(), |acc, (v, wi)| acc + *v * (wi / s))
}

fn random_nodes(m: &CdtMap, rng: &mut ChaCha8Rng, from: usize, steps: usize) -> Vec<usize> {
    let mut nodes = vec![from];
    for _ in 0..steps {
        let nb = m.graph.neighbors(*nodes.last().unwrap());
        if nb.is_empty() {
            break;
        }
        nodes.push(nb[rng.gen_range(0..nb.len())].0);
    }
    nodes
}

fn bfs(m: &CdtMap, a: usize, b: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; m.graph.nodes];
    let mut q = VecDeque::from([a]);
    prev[a] = a;
    while let Some(x) = q.pop_front() {
        if x == b {
            let mut out = vec![b];
            while *out.last().unwrap() != a {
                out.push(prev[*out.last().unwrap()]);
            }
            out.reverse();
            return Some(out);
        }
        for &(y, _) in m.graph.neighbors(x) {
            if prev[y] == usize::MAX {
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    None
}

/// Polyline through random cutline points that visits `nodes` in order.
fn realise(m: &CdtMap, nodes: &[usize], xs: Point2, xe: Point2, rng: &mut ChaCha8Rng) -> Polyline {
    let mut pts = vec![xs];
    for (i, w) in nodes.windows(2).enumerate() {
        let e = m.graph.edge_between(w[0], w[1]).expect("adjacent");
        pts.push(m.dissection.cutline(e).at(rng.gen_range(0.1..0.9)));
        pts.push(if i + 2 == nodes.len() { xe } else { point_in_cell(m, w[1], rng) });
    }
    if nodes.len() == 1 {
        pts.push(xe);
    }
    Polyline::from_points_dedup(pts).expect("non-empty")
}

fn star(rng: &mut ChaCha8Rng, c: Point2, n: usize, r: (f64, f64)) -> Vec<Point2> {
    let step = std::f64::consts::TAU / n as f64;
    let phase = rng.gen_range(0.0..step);
    (0..n)
        .map(|k| {
            let a = phase + k as f64 * step + rng.gen_range(-0.3..0.3) * step;
            let rad = rng.gen_range(r.0..r.1);
            c + Point2::new(a.cos(), a.sin()) * rad
        })
        .collect()
}

fn c1_convex_division() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let t = Instant::now();
    let (mut ok, mut cells, mut with_holes) = (0, 0, 0);
    let total = 240;
    let mut first_bad = None;
    for case in 0..total {
        let budget = rng.gen_range(5..=200usize);
        let mut hole_sizes: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(3..=12)).collect();
        if budget < 5 + hole_sizes.iter().sum::<usize>() {
            hole_sizes.clear();
        }
        let outer_n = budget - hole_sizes.iter().sum::<usize>();
        let o = Point2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let outer = star(&mut rng, o, outer_n, (60.0, 100.0));
        let turn = rng.gen_range(0.0..std::f64::consts::TAU);
        let holes: Vec<Vec<Point2>> = hole_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let a = turn + i as f64 * std::f64::consts::TAU / 3.0;
                let mut h = star(&mut rng, o + Point2::new(a.cos(), a.sin()) * 17.0, n, (3.0, 8.0));
                h.reverse();
                h
            })
            .collect();
        let expected = signed_area(&outer) + holes.iter().map(|h| signed_area(h)).sum::<f64>();
        let loops: Vec<BoundaryLoop> = holes.iter().map(|h| BoundaryLoop::from_ring(h, LoopKind::Hole)).collect();
        let poly = merge_holes(&BoundaryLoop::from_ring(&outer, LoopKind::Outer), &loops).expect("merge");
        let dm = decompose(&poly).expect("decompose");
        let verts: HashSet<(u64, u64)> = poly.vertices.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        let convex = dm.cells.iter().all(|c| {
            let n = c.vertices.len();
            n >= 3
                && (0..n).all(|i| {
                    let (a, b, d) = (c.vertices[i], c.vertices[(i + 1) % n], c.vertices[(i + 2) % n]);
                    (b - a).cross(d - b) >= -1e-9 * (b - a).norm() * (d - b).norm()
                })
        });
        let no_new = dm.cells.iter().flat_map(|c| &c.vertices).all(|p| verts.contains(&(p.x.to_bits(), p.y.to_bits())));
        let area: f64 = dm.cells.iter().map(|c| c.area()).sum();
        let area_ok = (area - expected).abs() <= 1e-6 * expected;
        let two_cells = dm.cutlines.iter().all(|l| {
            let users: Vec<usize> = dm.cells.iter().filter(|c| c.cutline_ids.contains(&l.id)).map(|c| c.id).collect();
            l.left_poly != l.right_poly && users.len() == 2 && users.contains(&l.left_poly) && users.contains(&l.right_poly)
        });
        if dm.validate().is_ok() && convex && no_new && area_ok && two_cells {
            ok += 1;
        } else if first_bad.is_none() {
            first_bad = Some(case);
        }
        cells += dm.cells.len();
        with_holes += usize::from(!holes.is_empty());
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        ok == total && secs < 30.0,
        format!("{ok}/{total} polygons valid, {with_holes} with holes, {cells} cells, {secs:.2} s, first failure {first_bad:?}"),
    )
}

fn small_maps(n: usize, size: usize) -> Vec<PreparedMap> {
    (0..n as u64)
        .map(|s| prepared(GenParams::new(Archetype::Cluttered, size, size).obstacles(1 + s as usize % 5).seed(s + 1)))
        .collect()
}

fn c2_reduction_confluence() -> Outcome {
    let maps = small_maps(20, 80);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut ok, mut total, mut longest) = (0, 0, 0);
    for pm in &maps {
        let m = &pm.map;
        for _ in 0..500 {
            let start = rng.gen_range(0..m.graph.nodes);
            let steps = rng.gen_range(0..16);
            let nodes = random_nodes(m, &mut rng, start, steps);
            let base = TopoPath::from_nodes(&m.graph, &nodes).expect("walk");
            let mut t = base.clone();
            for _ in 0..rng.gen_range(1..12) {
                let i = rng.gen_range(0..t.nodes.len());
                let nb = m.graph.neighbors(t.nodes[i]);
                let y = (!nb.is_empty() && rng.gen_bool(0.7)).then(|| nb[rng.gen_range(0..nb.len())].0);
                t.extend_at(&m.graph, i, y).expect("extension");
            }
            longest = longest.max(t.len());
            let mut orders = Vec::new();
            for _ in 0..2 {
                let mut r = t.clone();
                loop {
                    let sites = r.contraction_sites();
                    let Some(&i) = sites.choose(&mut rng) else { break };
                    assert!(r.contract_at(i));
                }
                orders.push(r.nodes);
            }
            let code = reduce(&t);
            let again = reduce(code.path());
            if orders[0] == orders[1] && orders[0] == code.nodes() && code == reduce(&base) && again == code {
                ok += 1;
            }
            total += 1;
        }
    }
    outcome(ok == total, format!("{ok}/{total} expanded walks reduce to one code, longest {longest} nodes"))
}

fn c3_homotopy_vs_signature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut agree, mut total, mut distinct) = (0usize, 0usize, 0usize);
    let mut holes = 0;
    for s in 0..50u64 {
        let pm = prepared(GenParams::new(Archetype::Cluttered, 100, 100).obstacles(1 + s as usize % 5).seed(1000 + s));
        let m = &pm.map;
        holes += pm.loops.iter().map(|l| l.len() - 1).sum::<usize>();
        let mut pairs = 0;
        while pairs < 1000 {
            let (a, b) = (rng.gen_range(0..m.graph.nodes), rng.gen_range(0..m.graph.nodes));
            let Some(link) = bfs(m, a, b) else { continue };
            let (xs, xe) = (point_in_cell(m, a, &mut rng), point_in_cell(m, b, &mut rng));
            let sig = pm.signature(xs).expect("signature");
            let walk = |rng: &mut ChaCha8Rng| {
                let steps = rng.gen_range(0..20);
                let mut w = random_nodes(m, rng, a, steps);
                let tail = bfs(m, *w.last().unwrap(), b).expect("same component");
                w.extend_from_slice(&tail[1..]);
                realise(m, &w, xs, xe, rng)
            };
            let f1 = if rng.gen_bool(0.3) { realise(m, &link, xs, xe, &mut rng) } else { walk(&mut rng) };
            let f2 = walk(&mut rng);
            let (c1, c2) = (encode(&m.dissection, &f1).expect("f1"), encode(&m.dissection, &f2).expect("f2"));
            let same = homotopic(&c1, &c2).expect("same endpoints");
            distinct += usize::from(!same);
            agree += usize::from(same == sig.same_class(&f1, &f2));
            total += 1;
            pairs += 1;
        }
    }
    outcome(
        agree == total,
        format!("{agree}/{total} pairs agree over 50 maps with {holes} holes, {distinct} pairs in different classes"),
    )
}

fn c4_decoder_round_trip() -> Outcome {
    let maps = small_maps(20, 80);
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut ok, mut total) = (0, 0);
    for pm in &maps {
        let m = &pm.map;
        for _ in 0..500 {
            let start = rng.gen_range(0..m.graph.nodes);
            let steps = rng.gen_range(0..30);
            let nodes = random_nodes(m, &mut rng, start, steps);
            let code = reduce(&TopoPath::from_nodes(&m.graph, &nodes).expect("walk"));
            let f = gamma_g(&m.dissection, &m.graph, code.path());
            ok += usize::from(encode(&m.dissection, &f).ok() == Some(code));
            total += 1;
        }
    }
    outcome(ok == total, format!("{ok}/{total} codes survive decode and encode"))
}

fn c5_class_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut triples, mut within, mut monotone, mut in_class, mut no_oracle) = (0, 0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut s = 0u64;
    while triples < 200 {
        s += 1;
        let pm = prepared(GenParams::new(Archetype::Cluttered, 100, 100).obstacles(2 + s as usize % 5).seed(2000 + s));
        let (dm, g) = (&pm.map.dissection, &pm.map.graph);
        let mut oracle = LatticeOracle::new(dm, 200);
        for _ in 0..3 {
            let (Some(xs), Some(xe)) = (random_free_point(&pm.grid, &mut rng), random_free_point(&pm.grid, &mut rng)) else {
                continue;
            };
            let task = Task { x_init: xs, x_goal: xe, iterations: 400, seed: s };
            let Ok(r) = plan(&task, dm, g, &PlannerOptions::default()) else { continue };
            for c in r.classes.iter().take(4) {
                let Some(o) = oracle.class_path(&c.code, xs, xe) else {
                    no_oracle += 1;
                    continue;
                };
                let sp = shortest_in_class(&c.code, xs, xe, dm, g, &SolverConfig::default()).expect("solve");
                triples += 1;
                worst = worst.max(sp.length / o.length);
                within += usize::from(sp.length <= 1.02 * o.length);
                monotone += usize::from(sp.is_monotone());
                in_class += usize::from(encode(dm, &sp.path).ok().as_ref() == Some(&c.code));
            }
        }
    }
    outcome(
        within == triples && monotone == triples && in_class == triples,
        format!(
            "{triples} triples on {s} maps: {within} within 1.02 of the lattice oracle (worst ratio {worst:.4}), {monotone} monotone, {in_class} in class, {no_oracle} skipped without a lattice path"
        ),
    )
}

fn c6_code_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut runs, mut good, mut debug_runs, mut violations) = (0, 0, 0, 0);
    let mut s = 0u64;
    while runs < 1000 {
        s += 1;
        let pm = prepared(GenParams::new(Archetype::Cluttered, 100, 100).obstacles(3 + s as usize % 6).seed(3000 + s));
        let (dm, g) = (&pm.map.dissection, &pm.map.graph);
        for k in 0..25 {
            let (Some(xs), Some(xe)) = (random_free_point(&pm.grid, &mut rng), random_free_point(&pm.grid, &mut rng)) else {
                continue;
            };
            let debug = k % 5 == 0;
            let opts = PlannerOptions {
                debug_invariants: debug,
                prune: !(debug && k % 10 == 0),
                ..PlannerOptions::default()
            };
            let task = Task { x_init: xs, x_goal: xe, iterations: 300, seed: s * 100 + k };
            let r = match plan(&task, dm, g, &opts) {
                Ok(r) => r,
                Err(PlanError::Unreachable) => continue,
                Err(e) => panic!("plan failed: {e}"),
            };
            let Some(b) = &r.best else { continue };
            runs += 1;
            good += usize::from(!b.code.path().has_repeated_node() && b.code.path().is_no_rollback());
            if debug {
                debug_runs += 1;
                violations += r.invariant_violations;
            }
        }
    }
    outcome(
        good == runs && violations == 0,
        format!("{good}/{runs} best codes duplicate-free and no-rollback, {violations} tree violations over {debug_runs} debug runs"),
    )
}

fn c7_decoupling() -> Outcome {
    let t = Instant::now();
    let p = GenParams::new(Archetype::Floorplan, 120, 120).obstacles(1).seed(1);
    let r = bench(&spec(p, vec![PlannerKind::Cdt, PlannerKind::CdtUndecoupled], 100, 3000));
    let classes = r.runs.iter().filter_map(|x| x.classes).max().unwrap_or(0);
    let (a, b) = (t2_or_inf(&r, PlannerKind::Cdt), t2_or_inf(&r, PlannerKind::CdtUndecoupled));
    let pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    let st = sign_test(&pairs);
    let (ma, mb) = (median(&a).unwrap(), median(&b).unwrap());
    let secs = t.elapsed().as_secs_f64();
    outcome(
        ma < mb && st.p_value < 0.01 && secs < 120.0,
        format!(
            "median t_2pct {ma:.0} us vs {mb:.0} us, sign test {}/{} p = {:.2e}, up to {classes} classes, {secs:.1} s",
            st.wins,
            st.wins + st.losses,
            st.p_value
        ),
    )
}

fn c8_alpha_term() -> Outcome {
    let p = GenParams::new(Archetype::Trap, 400, 400).seed(1);
    let mut s = spec(p, vec![PlannerKind::Cdt, PlannerKind::CdtNoalpha], 100, 40_000);
    s.stop_on_first_solution = true;
    let r = bench(&s);
    let found = |k: PlannerKind| r.runs.iter().filter(|x| x.planner == k && x.t_init_us.is_some()).count();
    let (full, noalpha) = (found(PlannerKind::Cdt), found(PlannerKind::CdtNoalpha));
    outcome(
        full == 100 && noalpha <= 50,
        format!("initial solution in {full}/100 runs with the full sampler, {noalpha}/100 without the alpha term"),
    )
}

fn c9_beta() -> Outcome {
    let p = GenParams::new(Archetype::Cluttered, 200, 200).obstacles(5).seed(1);
    let mut s = spec(p, vec![PlannerKind::Cdt], 500, 3000);
    s.betas = vec![0.2, 1.0];
    s.seed = 1_000_000;
    let r = bench(&s);
    let opt_time = |b: f64| -> Vec<f64> {
        r.runs
            .iter()
            .filter(|x| x.beta == Some(b))
            .filter_map(|x| Some((x.t_2pct_us? - x.t_init_us?) as f64))
            .collect()
    };
    let (a, b) = (opt_time(0.2), opt_time(1.0));
    let Some(ci) = bootstrap_mean_diff(&a, &b, 0.95, 5000, 9) else {
        return outcome(false, "no runs reached 2% of the optimum".into());
    };
    outcome(
        a.len() == 500 && b.len() == 500 && ci.hi < 0.0,
        format!(
            "mean optimisation time {:.1} us at beta 0.2 vs {:.1} us at beta 1.0 ({} and {} runs reached 2%), difference CI [{:.1}, {:.1}]",
            mean(&a).unwrap(),
            mean(&b).unwrap(),
            a.len(),
            b.len(),
            ci.lo,
            ci.hi
        ),
    )
}

fn c10_pruning() -> Outcome {
    let p = GenParams::new(Archetype::MazeLoops, 200, 200).loops(6).seed(1);
    let r = bench(&spec(p, vec![PlannerKind::Cdt, PlannerKind::CdtNoprune], 100, 3000));
    let row = |k: PlannerKind| r.summary.iter().find(|x| x.planner == k).expect("row");
    let (on, off) = (row(PlannerKind::Cdt), row(PlannerKind::CdtNoprune));
    let (con, coff) = (on.mean_considered_cutlines.unwrap(), off.mean_considered_cutlines.unwrap());
    // runs that never reach 2% count with their whole run time
    let plan_time = |k: PlannerKind| -> f64 {
        let v: Vec<f64> = r
            .runs
            .iter()
            .filter(|x| x.planner == k)
            .map(|x| x.t_2pct_us.unwrap_or(x.elapsed_us) as f64)
            .collect();
        mean(&v).unwrap()
    };
    let (ton, toff) = (plan_time(PlannerKind::Cdt), plan_time(PlannerKind::CdtNoprune));
    let cut = 1.0 - con / coff;
    outcome(
        cut >= 0.30 && ton < toff,
        format!(
            "considered cutlines {con:.0} vs {coff:.0} ({:.0}% fewer) of {}, mean time to 2% {ton:.0} us vs {toff:.0} us",
            100.0 * cut,
            r.metadata.cutlines
        ),
    )
}

fn c11_init_time() -> Outcome {
    let g = generate(&GenParams::new(Archetype::Cluttered, 1000, 1000).obstacles(20).seed(1)).expect("map");
    let pm = PreparedMap::new(g.grid, 1.0, None).expect("prepare");
    let t = Duration::from_micros(pm.init_us);
    outcome(
        t < Duration::from_secs(1),
        format!("{} cells and {} cutlines in {:.1} ms", pm.map.dissection.cells.len(), pm.map.dissection.cutlines.len(), t.as_secs_f64() * 1e3),
    )
}

fn c12_baseline() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in corpus() {
        let mut s = spec(p, vec![PlannerKind::Cdt, PlannerKind::RrtStar], 9, 10_000);
        s.rrt_iterations = Some(200_000);
        s.time_budget_ms = Some(1000);
        let r = bench(&s);
        let init = |k: PlannerKind| -> Vec<f64> {
            r.runs
                .iter()
                .filter(|x| x.planner == k)
                .map(|x| x.t_init_us.map_or(f64::INFINITY, |t| t as f64))
                .collect()
        };
        let (ci, ri) = (median(&init(PlannerKind::Cdt)).unwrap(), median(&init(PlannerKind::RrtStar)).unwrap());
        let (c2, r2) = (
            median(&t2_or_inf(&r, PlannerKind::Cdt)).unwrap(),
            median(&t2_or_inf(&r, PlannerKind::RrtStar)).unwrap(),
        );
        pass &= ci < ri && c2 < r2;
        parts.push(format!("{} init {ci:.0}/{ri:.0} t2 {c2:.0}/{r2:.0}", p.archetype.name()));
    }
    outcome(pass, format!("median us, CDT/RRT*: {}", parts.join("; ")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("convex division invariants", c1_convex_division),
        ("reduction confluence and idempotence", c2_reduction_confluence),
        ("homotopy test vs h-signature", c3_homotopy_vs_signature),
        ("decoder round trip", c4_decoder_round_trip),
        ("class-optimal solver vs lattice oracle", c5_class_solver),
        ("best code and tree invariants", c6_code_invariants),
        ("decoupling ablation", c7_decoupling),
        ("alpha term ablation", c8_alpha_term),
        ("beta sweep", c9_beta),
        ("reduce-branches ablation", c10_pruning),
        ("initialisation time", c11_init_time),
        ("baseline comparison", c12_baseline),
    ];
    let only: Option<usize> = std::env::var("CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|k| k != n) {
            continue;
        }
        let t = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {n:>2} {name}: {} ({}; {:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
