use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bisite_core::arrangement::{build_arrangement, hull_supporting_lines, label_outer_cells};
use bisite_core::constructions::{convex_position, gen_collinear_unit, gen_two_line_set, random_general};
use bisite_core::neighbors::convex_hull;
use bisite_core::points_file::{format_points, parse_points};
use bisite_core::raster::{
    candidate_pairs, compute_raster, compute_raster_with_candidates, pruning_applies, region_stats, with_threads, BBox,
    GridSpec, Mode, RasterDiagram, DEFAULT_GRID,
};
use bisite_core::render::write_ppm;
use bisite_core::verify::{
    check_delaunay_pruning, check_far_field_antipodal, check_line_locus_furthest_c, check_pc_limit,
    check_ppcirc_collinear, check_viewangle_outer, Report,
};
use bisite_core::{DistanceKind, DistanceSpec, GeomError, Point2, SitePair};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "bisite", version, about = "Sampled two-site Voronoi diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a diagram raster, write it as a PPM image plus region stats.
    Compute(ComputeArgs),
    /// Run one structural check and print its JSON report.
    Verify(VerifyArgs),
    /// Time pruned against full candidate sets and 1 against many threads.
    Bench(BenchArgs),
    /// Write a generated point set.
    Generate(GenerateArgs),
    /// Build the hull supporting-line arrangement and write it as SVG.
    Arrangement(ArrangementArgs),
}

#[derive(Args, Clone)]
struct DiagramOpts {
    /// circumradius | containing | viewangle | inradius | ccc-dist | ccc-area | ccc-perimeter | param-perimeter
    #[arg(long, default_value = "containing")]
    distance: DistanceKind,
    /// Parameter of param-perimeter.
    #[arg(long)]
    c: Option<f64>,
    /// nearest | furthest
    #[arg(long, default_value = "nearest")]
    mode: Mode,
    /// Raster size as WIDTHxHEIGHT.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Sampling window as XMIN,YMIN,XMAX,YMAX; default is the site box grown 25% per side.
    #[arg(long, value_parser = parse_bbox)]
    bbox: Option<BBox>,
    /// Worker threads; overrides BISITE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    opts: DiagramOpts,
    /// Output image; defaults to the input path with extension .ppm.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Output stats JSON; defaults to the input path with extension .stats.json.
    #[arg(long)]
    stats: Option<PathBuf>,
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    DelaunayPruning,
    PcLimit,
    ViewangleOuter,
    FarFieldAntipodal,
    PpcircCollinear,
    LineLocusFurthestC,
}

#[derive(Args)]
struct VerifyArgs {
    check: Check,
    #[command(flatten)]
    opts: DiagramOpts,
    /// Number of random sites when no input file is given.
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling radius in site diameters for far-field-antipodal.
    #[arg(long, default_value_t = 1e3)]
    multiplier: f64,
    /// Points file; random sites are used otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    opts: DiagramOpts,
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    TwoLine,
    CollinearUnit,
    Convex,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    construction: Construction,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Line distance of the two-line construction.
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    /// Intra-line spread of the two-line construction.
    #[arg(long, default_value_t = 0.05)]
    spread: f64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ArrangementArgs {
    input: PathBuf,
    #[arg(long)]
    svg: PathBuf,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width {w:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((w, h))
}

fn parse_bbox(s: &str) -> Result<BBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad coordinate {t:?}")))
        .collect::<Result<_, _>>()?;
    let [xmin, ymin, xmax, ymax] = v[..] else {
        return Err("expected XMIN,YMIN,XMAX,YMAX".into());
    };
    BBox::new(xmin, ymin, xmax, ymax).map_err(|e| e.to_string())
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        let code = match e {
            GeomError::Precondition(_)
            | GeomError::NoUniqueClosestPair
            | GeomError::InvalidParameter(_)
            | GeomError::GenericityFailure(_) => EXIT_PRECONDITION,
            _ => EXIT_DEGENERATE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_failure(message: String) -> Failure {
    Failure { code: EXIT_PARSE, message }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_FAILED, message: format!("{}: {e}", path.display()) }
}

fn read_points(path: &Path) -> Result<Vec<Point2>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
    parse_points(&text).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn thread_count(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(t) = flag {
        return Ok(t.max(1));
    }
    match std::env::var("BISITE_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|t| t.max(1))
            .map_err(|_| parse_failure(format!("BISITE_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(max_threads()),
    }
}

fn max_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl DiagramOpts {
    fn spec(&self) -> Result<DistanceSpec, Failure> {
        match self.c {
            Some(c) if self.distance.takes_parameter() => Ok(DistanceSpec::with_parameter(self.distance, c)?),
            Some(_) => {
                eprintln!("warning: --c is ignored for {}", self.distance);
                Ok(DistanceSpec::new(self.distance))
            }
            None => Ok(DistanceSpec::new(self.distance)),
        }
    }

    fn grid_for(&self, sites: &[Point2]) -> Result<GridSpec, Failure> {
        let (w, h) = self.grid.unwrap_or((DEFAULT_GRID, DEFAULT_GRID));
        Ok(match self.bbox {
            Some(b) => GridSpec::new(b, w, h)?,
            None => GridSpec::around_sites(sites, w, h)?,
        })
    }
}

fn spec_json(spec: DistanceSpec) -> serde_json::Value {
    json!({ "kind": spec.kind.name(), "c": spec.parameter() })
}

fn stats_json(raster: &RasterDiagram, n: usize) -> serde_json::Value {
    let stats = region_stats(raster);
    json!({
        "spec": spec_json(raster.spec),
        "mode": raster.mode.name(),
        "n": n,
        "grid": [raster.width(), raster.height()],
        "nonEmptyPairs": stats.non_empty_pairs,
        "tieCells": stats.tie_cells,
        "undefinedCells": stats.undefined_cells,
        "rasterVertices": stats.raster_vertices,
        "perPair": stats.per_pair,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize") + "\n"
}

fn cmd_compute(args: ComputeArgs) -> Result<(), Failure> {
    let sites = read_points(&args.input)?;
    let spec = args.opts.spec()?;
    let grid = args.opts.grid_for(&sites)?;
    let threads = thread_count(args.opts.threads)?;
    let raster = with_threads(threads, || compute_raster(&sites, spec, args.opts.mode, grid))?;
    let image = args.image.unwrap_or_else(|| args.input.with_extension("ppm"));
    let stats = args.stats.unwrap_or_else(|| args.input.with_extension("stats.json"));
    let mut ppm = Vec::new();
    write_ppm(&mut ppm, &raster, &sites).map_err(|e| io_failure(&image, e))?;
    write_file(&image, &ppm)?;
    write_file(&stats, pretty(&stats_json(&raster, sites.len())).as_bytes())?;
    Ok(())
}

fn verify_sites(args: &VerifyArgs) -> Result<Vec<Point2>, Failure> {
    match &args.input {
        Some(path) => read_points(path),
        None => Ok(random_general(args.n, args.seed).sites),
    }
}

fn run_check(args: &VerifyArgs) -> Result<Report, Failure> {
    let threads = thread_count(args.opts.threads)?;
    let report = match args.check {
        Check::PpcircCollinear => {
            let sites = gen_collinear_unit(args.n)?.sites;
            let grid = args.opts.grid_for(&sites)?;
            with_threads(threads, || check_ppcirc_collinear(args.n, grid))?
        }
        Check::FarFieldAntipodal => {
            let sites = verify_sites(args)?;
            with_threads(threads, || check_far_field_antipodal(&sites, args.multiplier))?
        }
        check => {
            let sites = verify_sites(args)?;
            let grid = args.opts.grid_for(&sites)?;
            let spec = match check {
                Check::DelaunayPruning => Some(args.opts.spec()?),
                _ => None,
            };
            with_threads(threads, || match (check, spec) {
                (Check::DelaunayPruning, Some(spec)) => check_delaunay_pruning(&sites, spec, grid),
                (Check::PcLimit, _) => check_pc_limit(&sites, args.opts.c.unwrap_or(1e6), grid),
                (Check::ViewangleOuter, _) => check_viewangle_outer(&sites, grid),
                _ => check_line_locus_furthest_c(&sites, grid),
            })?
        }
    };
    Ok(if args.input.is_none() { report.with_seed(args.seed) } else { report })
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, Failure> {
    let report = run_check(&args)?;
    print!("{}", pretty(&serde_json::to_value(&report).expect("reports serialize")));
    Ok(report.passed)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let sites = match &args.input {
        Some(path) => read_points(path)?,
        None => random_general(args.n, args.seed).sites,
    };
    let spec = args.opts.spec()?;
    let mode = args.opts.mode;
    let grid = args.opts.grid_for(&sites)?;
    let threads = thread_count(args.opts.threads)?;
    let full_pairs = SitePair::all(sites.len());
    let pruned_pairs = candidate_pairs(&sites, spec, mode);
    let run = |pairs: &Vec<SitePair>, t: usize| {
        timed(|| with_threads(t, || compute_raster_with_candidates(&sites, spec, mode, grid, pairs.clone())))
    };
    let (full, full_secs) = run(&full_pairs, threads);
    let (pruned, pruned_secs) = run(&pruned_pairs, threads);
    let (single, single_secs) = run(&pruned_pairs, 1);
    let (full, pruned, single) = (full?, pruned?, single?);
    let out = json!({
        "spec": spec_json(spec),
        "mode": mode.name(),
        "n": sites.len(),
        "grid": [grid.width, grid.height],
        "pruningApplies": pruning_applies(spec, mode),
        "pairsFull": full_pairs.len(),
        "pairsPruned": pruned_pairs.len(),
        "evaluationsFull": full_pairs.len() * grid.cells(),
        "evaluationsPruned": pruned_pairs.len() * grid.cells(),
        "secondsFull": full_secs,
        "secondsPruned": pruned_secs,
        "threads": threads,
        "secondsOneThread": single_secs,
        "secondsMaxThreads": pruned_secs,
        "prunedMatchesFull": full.mismatched_cells(&pruned) == 0,
        "threadRunsIdentical": single.label_bytes() == pruned.label_bytes(),
    });
    print!("{}", pretty(&out));
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let set = match args.construction {
        Construction::TwoLine => gen_two_line_set(args.n, args.d, args.spread, args.seed)?,
        Construction::CollinearUnit => gen_collinear_unit(args.n)?,
        Construction::Convex => convex_position(args.n, args.seed),
        Construction::Random => random_general(args.n, args.seed),
    };
    let text = format_points(&set.sites);
    match args.output {
        Some(path) => write_file(&path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_arrangement(args: ArrangementArgs) -> Result<(), Failure> {
    let sites = read_points(&args.input)?;
    let hull = convex_hull(&sites)?;
    let arr = label_outer_cells(&build_arrangement(&hull_supporting_lines(&sites, &hull)), &sites, &hull);
    write_file(&args.svg, arr.to_svg(&sites).as_bytes())?;
    let out = json!({
        "hullVertices": hull.k(),
        "lines": arr.lines.len() - arr.merged_lines.len(),
        "vertices": arr.vertices.len(),
        "edges": arr.edges.len(),
        "faces": arr.faces.len(),
        "labeledFaces": arr.faces.iter().filter(|f| f.label.is_some()).count(),
    });
    print!("{}", pretty(&out));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Arrangement(a) => cmd_arrangement(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
