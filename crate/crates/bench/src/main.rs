use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use cdt_bench::experiments::{run_bench, summary_csv, BenchSpec};
use cdt_bench::mapgen::{corpus, generate, Archetype, GenParams};
use cdt_bench::svg::Svg;
use cdt_core::geometry::{Point2, Polyline};
use cdt_core::map::CdtMap;
use cdt_core::map_ingest::{load_grid, write_pgm, GridFormat, IngestConfig};
use cdt_core::planner::{plan, Mode, PlanError, PlannerOptions, SamplerParams, Task};
use cdt_core::topology::encode;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cdt", version, about = "Convex-dissection topology maps and multi-class path planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decoupled,
    Undecoupled,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, dissect and write the map artifact.
    Init {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Plan between two points.
    Plan {
        /// Map artifact (JSON) or PGM grid.
        #[arg(long)]
        map: PathBuf,
        /// Fit tolerance when `--map` is a grid.
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_parser = parse_point)]
        start: Point2,
        #[arg(long, value_parser = parse_point)]
        goal: Point2,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SamplerParams::default().beta)]
        beta: f64,
        #[arg(long, default_value_t = SamplerParams::default().alpha)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Decoupled)]
        mode: ModeArg,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        no_alpha: bool,
        #[arg(long)]
        stop_first: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Zero all timings so equal seeds give identical output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the reduced code of a polyline.
    Encode {
        #[arg(long)]
        map: PathBuf,
        /// JSON array of points or one `x,y` pair per line.
        #[arg(long)]
        polyline: PathBuf,
    },
    /// Run a benchmark spec.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write generated grids with their default tasks.
    Genmaps {
        #[arg(long)]
        archetype: Option<Archetype>,
        #[arg(long, default_value_t = 200)]
        width: usize,
        #[arg(long, default_value_t = 200)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        obstacles: usize,
        #[arg(long, default_value_t = 0)]
        loops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The standard corpus: one map per archetype.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Unreachable(String),
    Io(anyhow::Error),
    Invalid(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Unreachable(_) => 2,
            Failure::Io(_) => 3,
            Failure::Invalid(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Unreachable(s) => write!(f, "unreachable: {s}"),
            Failure::Io(e) | Failure::Invalid(e) => write!(f, "{e:#}"),
        }
    }
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Io)
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, data).with_context(|| format!("writing {}", path.display())).map_err(Failure::Io)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Point2::try_new(x, y).map_err(|e| e.to_string())
}

fn is_grid(bytes: &[u8]) -> bool {
    bytes.starts_with(b"P2") || bytes.starts_with(b"P5")
}

fn load_map(path: &Path, epsilon: f64) -> Result<CdtMap, Failure> {
    let bytes = read(path)?;
    if is_grid(&bytes) {
        let cfg = IngestConfig {
            epsilon_fit: epsilon,
            ..IngestConfig::default()
        };
        let grid = load_grid(&bytes, GridFormat::Pgm, cfg.occ_threshold).map_err(invalid)?;
        CdtMap::build(&grid, &cfg).map_err(invalid)
    } else {
        let text = String::from_utf8(bytes).map_err(invalid)?;
        CdtMap::from_json(&text).map_err(invalid)
    }
}

#[derive(Serialize)]
struct InitReport {
    width: usize,
    height: usize,
    epsilon: f64,
    components: usize,
    polygon_vertices: usize,
    cells: usize,
    cutlines: usize,
    elapsed_us: u64,
}

fn init(map: &Path, epsilon: f64, out: &Path, svg: Option<&Path>, format: Format) -> Result<(), Failure> {
    let bytes = read(map)?;
    let cfg = IngestConfig {
        epsilon_fit: epsilon,
        ..IngestConfig::default()
    };
    cfg.validate().map_err(invalid)?;
    let grid = load_grid(&bytes, GridFormat::Pgm, cfg.occ_threshold).map_err(invalid)?;
    let t = Instant::now();
    let m = CdtMap::build(&grid, &cfg).map_err(invalid)?;
    let elapsed_us = t.elapsed().as_micros() as u64;
    write(out, m.to_json())?;
    if let Some(p) = svg {
        write(p, Svg::new(&m).dissection().finish())?;
    }
    let s = m.stats();
    let report = InitReport {
        width: m.width,
        height: m.height,
        epsilon,
        components: s.components,
        polygon_vertices: s.polygon_vertices,
        cells: s.cells,
        cutlines: s.cutlines,
        elapsed_us,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serialisable")),
        Format::Csv => {
            println!("width,height,epsilon,components,polygon_vertices,cells,cutlines,elapsed_us");
            println!(
                "{},{},{},{},{},{},{},{}",
                report.width, report.height, epsilon, s.components, s.polygon_vertices, s.cells, s.cutlines, elapsed_us
            );
        }
        Format::Text => println!(
            "{}x{} map: {} components, {} cells, {} cutlines, {} us",
            m.width, m.height, s.components, s.cells, s.cutlines, elapsed_us
        ),
    }
    Ok(())
}

fn plan_cmd(cmd: Command) -> Result<(), Failure> {
    let Command::Plan {
        map,
        epsilon,
        start,
        goal,
        iterations,
        seed,
        beta,
        alpha,
        mode,
        no_prune,
        no_alpha,
        stop_first,
        svg,
        out,
        no_timing,
    } = cmd
    else {
        unreachable!()
    };
    let m = load_map(&map, epsilon)?;
    let opts = PlannerOptions {
        params: SamplerParams { alpha, beta },
        mode: match mode {
            ModeArg::Decoupled => Mode::Decoupled,
            ModeArg::Undecoupled => Mode::Undecoupled,
        },
        prune: !no_prune,
        use_alpha: !no_alpha,
        stop_on_first_solution: stop_first,
        record_tree: svg.is_some(),
        ..PlannerOptions::default()
    };
    let task = Task {
        x_init: start,
        x_goal: goal,
        iterations,
        seed,
    };
    let mut r = plan(&task, &m.dissection, &m.graph, &opts).map_err(|e| match e {
        PlanError::Unreachable => Failure::Unreachable(e.to_string()),
        e => invalid(e),
    })?;
    if let Some(p) = &svg {
        write(p, Svg::new(&m).dissection().plan(&r, start, goal).finish())?;
    }
    r.tree = None;
    if no_timing {
        r = r.without_timing();
    }
    emit(out.as_deref(), &serde_json::to_string_pretty(&r).expect("serialisable"))
}

fn parse_polyline(bytes: &[u8]) -> Result<Polyline, Failure> {
    let text = std::str::from_utf8(bytes).map_err(invalid)?;
    let pts: Vec<Point2> = if text.trim_start().starts_with('[') {
        let v: Vec<serde_json::Value> = serde_json::from_str(text).map_err(invalid)?;
        v.into_iter()
            .map(|p| match p {
                serde_json::Value::Array(a) if a.len() == 2 => {
                    let x = a[0].as_f64().ok_or_else(|| anyhow!("bad coordinate"))?;
                    let y = a[1].as_f64().ok_or_else(|| anyhow!("bad coordinate"))?;
                    Ok(Point2::new(x, y))
                }
                p => serde_json::from_value::<Point2>(p).map_err(anyhow::Error::from),
            })
            .collect::<Result<_, _>>()
            .map_err(invalid)?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_point(&l.replace(char::is_whitespace, ",").replace(",,", ",")))
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(anyhow!(e)))?
    };
    Polyline::new(pts).map_err(invalid)
}

fn encode_cmd(map: &Path, polyline: &Path) -> Result<(), Failure> {
    let m = load_map(map, 1.0)?;
    let f = parse_polyline(&read(polyline)?)?;
    if let Some(i) = f.points().iter().position(|&p| m.locate(p).is_err()) {
        let p = f.points()[i];
        return Err(invalid(anyhow!("vertex {i} at ({}, {}) is not in free space", p.x, p.y)));
    }
    let code = encode(&m.dissection, &f).map_err(invalid)?;
    println!("{code}");
    Ok(())
}

fn bench_cmd(spec: &Path, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let text = String::from_utf8(read(spec)?).map_err(invalid)?;
    let spec: BenchSpec = serde_json::from_str(&text).map_err(invalid)?;
    spec.validate().map_err(invalid)?;
    let report = run_bench(&spec).map_err(|e| {
        if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) {
            Failure::Io(e)
        } else if e.chain().any(|c| matches!(c.downcast_ref::<PlanError>(), Some(PlanError::Unreachable))) {
            Failure::Unreachable(format!("{e:#}"))
        } else {
            Failure::Invalid(e)
        }
    })?;
    let text = match format {
        Format::Csv => summary_csv(&report).map_err(invalid)?,
        _ => serde_json::to_string_pretty(&report).expect("serialisable"),
    };
    emit(out, text.trim_end())
}

#[derive(Serialize)]
struct TaskFile {
    params: GenParams,
    start: Point2,
    goal: Point2,
}

fn write_generated(dir: &Path, name: &str, p: &GenParams) -> Result<(), Failure> {
    let g = generate(p).map_err(|e| invalid(anyhow!(e)))?;
    write(&dir.join(format!("{name}.pgm")), write_pgm(&g.grid))?;
    let task = TaskFile {
        params: *p,
        start: g.start,
        goal: g.goal,
    };
    write(
        &dir.join(format!("{name}.task.json")),
        serde_json::to_string_pretty(&task).expect("serialisable"),
    )?;
    println!("{}", dir.join(format!("{name}.pgm")).display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Init {
            map,
            epsilon,
            out,
            svg,
            format,
        } => init(&map, epsilon, &out, svg.as_deref(), format),
        cmd @ Command::Plan { .. } => plan_cmd(cmd),
        Command::Encode { map, polyline } => encode_cmd(&map, &polyline),
        Command::Bench { spec, format, out } => bench_cmd(&spec, format, out.as_deref()),
        Command::Genmaps {
            archetype,
            width,
            height,
            obstacles,
            loops,
            seed,
            all,
            out,
        } => {
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::Io)?;
            if all {
                for p in corpus() {
                    write_generated(&out, p.archetype.name(), &p)?;
                }
                return Ok(());
            }
            let a = archetype.ok_or_else(|| invalid(anyhow!("give --archetype or --all")))?;
            let p = GenParams::new(a, width, height).obstacles(obstacles).loops(loops).seed(seed);
            write_generated(&out, &format!("{}-{width}x{height}-s{seed}", a.name()), &p)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
