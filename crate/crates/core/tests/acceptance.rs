//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use bisite_core::constructions::{
    convex_position, count_circle_intersections, count_line_intersections, count_segment_intersections,
    gen_two_line_set, random_general,
};
use bisite_core::distances::eval_unchecked;
use bisite_core::neighbors::{antipodal_pairs, convex_hull, delaunay, Hull};
use bisite_core::raster::{compute_raster_with_candidates, with_threads, GridSpec, Mode, RasterDiagram};
use bisite_core::verify::{
    check_delaunay_pruning, check_far_field_antipodal, check_pc_limit, check_ppcirc_collinear, check_viewangle_outer,
    unique_closest_pair,
};
use bisite_core::{DistanceKind, DistanceSpec, Point2, SitePair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn value(kind: DistanceKind, v: Point2, p: Point2, q: Point2) -> f64 {
    eval_unchecked(DistanceSpec::new(kind), v, p, q).expect("defined")
}

fn param(c: f64, v: Point2, p: Point2, q: Point2) -> f64 {
    eval_unchecked(DistanceSpec::param_perimeter(c).unwrap(), v, p, q).expect("defined")
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: got {got}, want {want}"))
}

fn distance_examples() -> Outcome {
    use DistanceKind::*;
    let (o, p, q) = (pt(0.0, 0.0), pt(3.0, 0.0), pt(0.0, 4.0));
    close(value(Circumradius, o, p, q), 2.5, 1e-12, "circumradius of right triangle")?;
    close(value(InscribedRadius, o, p, q), 1.0, 1e-12, "inradius of 3-4-5")?;
    let (a, b) = (pt(0.0, 0.0), pt(1.0, 0.0));
    for x in [0.001, 0.25, 0.5, 0.999] {
        close(value(ViewAngle, pt(x, 0.0), a, b), PI, 1e-12, "view angle on the open segment")?;
    }
    for x in [-3.0, -0.001, 1.001, 7.0] {
        close(value(ViewAngle, pt(x, 0.0), a, b), 0.0, 1e-12, "view angle beyond the segment")?;
    }
    let (l, r) = (pt(-1.0, 0.0), pt(1.0, 0.0));
    for t in [0.3, 1.0, FRAC_PI_2, 2.5, 4.0] {
        let v = pt(t.cos(), t.sin());
        close(value(ViewAngle, v, l, r), FRAC_PI_2, 1e-9, "view angle on the diameter circle")?;
        close(value(CccSegmentDist, v, l, r), 0.0, 1e-9, "segment distance on the diameter circle")?;
        close(value(CccArea, v, l, r), 0.0, 1e-9, "area on the diameter circle")?;
    }
    close(value(CccSegmentDist, o, p, q), 0.0, 1e-12, "segment distance at the right angle")?;
    close(value(CccArea, o, p, q), 0.0, 1e-12, "area at the right angle")?;
    close(value(CccPerimeter, o, p, q), 10.0, 1e-12, "circumcenter perimeter")?;
    close(param(1.0, o, p, q), 12.0, 1e-12, "perimeter c=1")?;
    close(param(0.0, o, p, q), 7.0, 1e-12, "perimeter c=0")?;
    close(param(-1.0, pt(1.5, 2.0), p, q), 0.0, 1e-12, "perimeter c=-1 on the segment")?;
    close(value(ContainingRadius, o, pt(4.0, 0.0), pt(1.0, 0.5)), 2.0, 1e-12, "containing radius, obtuse")?;
    Ok("all tagged examples".into())
}

/// Circumradius against `|pq| / (2 sin angle(pvq))`, with the angle taken
/// from atan2 of the cross and dot products.
fn law_of_sines() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut checked, mut worst) = (0usize, 0.0f64);
    while checked < 100_000 {
        let mut draw = || pt(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (v, p, q) = (draw(), draw(), draw());
        let (a, b) = (p - v, q - v);
        let angle = a.cross(b).atan2(a.dot(b)).abs();
        // nondegenerate: the angle at v is bounded away from 0 and pi
        if angle.sin() < 1e-3 {
            continue;
        }
        let oracle = p.dist(q) / (2.0 * angle.sin());
        let got = value(DistanceKind::Circumradius, v, p, q);
        worst = worst.max((got - oracle).abs() / oracle);
        checked += 1;
    }
    ensure(worst <= 1e-9, || format!("worst relative error {worst:e}"))?;
    Ok(format!("{checked} triples, worst relative error {worst:.2e}"))
}

fn pruning_specs() -> Vec<DistanceSpec> {
    let mut specs = vec![DistanceSpec::new(DistanceKind::ContainingRadius)];
    specs.extend([0.0, 0.5, 1.0, 2.0].map(|c| DistanceSpec::param_perimeter(c).unwrap()));
    specs
}

const PRUNING_SEEDS: u64 = 20;
const PRUNING_SIZES: [usize; 3] = [8, 12, 16];

fn grid256(sites: &[Point2]) -> GridSpec {
    GridSpec::around_sites(sites, 256, 256).unwrap()
}

fn delaunay_pruning() -> Outcome {
    let mut runs = 0;
    for seed in 0..PRUNING_SEEDS {
        for n in PRUNING_SIZES {
            let sites = random_general(n, seed).sites;
            for spec in pruning_specs() {
                let r = check_delaunay_pruning(&sites, spec, grid256(&sites)).map_err(|e| e.to_string())?;
                let where_ = || format!("seed {seed}, n {n}, {spec}");
                ensure(r.passed, || format!("owner outside Delaunay edges at {}", where_()))?;
                ensure(r.get("mismatchedCells") == Some(0.0), || {
                    format!("{} mismatched cells at {}", r.get("mismatchedCells").unwrap(), where_())
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} configurations: pruned = full, owners within Delaunay edges"))
}

const PC_SITES: usize = 8;

fn pc_seeds() -> Vec<u64> {
    (0..).filter(|&s| unique_closest_pair(&random_general(PC_SITES, s).sites).is_ok()).take(10).collect()
}

fn pc_collapse() -> Outcome {
    for seed in pc_seeds() {
        let sites = random_general(PC_SITES, seed).sites;
        let r = check_pc_limit(&sites, 1e6, grid256(&sites)).map_err(|e| e.to_string())?;
        ensure(r.passed, || {
            format!(
                "seed {seed}: {} of {} cells owned by the closest pair",
                r.get("closestPairCells").unwrap(),
                r.get("definedCells").unwrap()
            )
        })?;
    }
    Ok("10 seeds, every defined cell owned by the closest pair".into())
}

const OUTER_SIZES: [usize; 2] = [6, 10];

fn viewangle_outer() -> Outcome {
    let mut worst = 1.0f64;
    for seed in 0..10 {
        for n in OUTER_SIZES {
            let sites = random_general(n, seed).sites;
            let r = check_viewangle_outer(&sites, grid256(&sites)).map_err(|e| e.to_string())?;
            let agreement = r.get("agreement").unwrap_or(1.0);
            worst = worst.min(agreement);
            ensure(r.passed, || format!("seed {seed}, n {n}: agreement {agreement}"))?;
            let k = r.get("hullVertices").unwrap() as usize;
            let expected = 1 + k + binom(k, 2);
            ensure(r.get("faces") == Some(expected as f64), || {
                format!("seed {seed}, n {n}: {} faces, expected {expected}", r.get("faces").unwrap())
            })?;
        }
    }
    Ok(format!("20 site sets, lowest agreement {worst:.5}, face counts 1 + k + C(k,2)"))
}

fn ppcirc_collinear() -> Outcome {
    let sites: Vec<Point2> = (0..8).map(|k| pt(k as f64, 0.0)).collect();
    let r = check_ppcirc_collinear(8, grid256(&sites)).map_err(|e| e.to_string())?;
    ensure(r.get("consecutiveRegions") == Some(7.0), || {
        format!("{} consecutive-pair regions", r.get("consecutiveRegions").unwrap())
    })?;
    ensure(r.get("maxDeviation").unwrap() <= 1e-9, || format!("deviation {}", r.get("maxDeviation").unwrap()))?;
    ensure(r.get("controlMinValue").unwrap() > 2.0, || "control value not above 2".into())?;
    ensure(r.passed, || format!("{:?}", r.details))?;
    Ok(format!(
        "7 regions, max |value - 2| = {:.1e}, control min {:.4}",
        r.get("maxDeviation").unwrap(),
        r.get("controlMinValue").unwrap()
    ))
}

fn exact_counts() -> Outcome {
    let mut failures = Vec::new();
    for (n, want) in [(4, 1), (5, 5), (6, 15), (8, 70)] {
        let got = count_segment_intersections(&convex_position(n, n as u64).sites);
        if got != want {
            failures.push(format!("segments n={n}: {got} != {want}"));
        }
    }
    let four = count_line_intersections(&random_general(4, 11).sites);
    if four != 3 {
        failures.push(format!("lines n=4: {four} != 3"));
    }
    for n in 3..=7 {
        let m = binom(n, 2);
        let identity = binom(m, 2) - n * binom(n - 1, 2);
        let got = count_line_intersections(&random_general(n, 100 + n as u64).sites);
        if got != identity {
            failures.push(format!("lines n={n}: {got} != {identity}"));
        }
    }
    let set = gen_two_line_set(8, 10.0, 0.05, 0).map_err(|e| e.to_string())?;
    let circles = count_circle_intersections(&set).map_err(|e| e.to_string())?;
    if circles.pairs_intersecting != 120 {
        failures.push(format!("circle pairs: {} != 120", circles.pairs_intersecting));
    }
    if circles.distinct_points != 240 {
        failures.push(format!(
            "two-line n=8: {} distinct circle intersection points != 240 ({} with multiplicity; {} at sites, {} at feet of sites on the opposite line)",
            circles.distinct_points, circles.raw_points, circles.site_points, circles.foot_points
        ));
    }
    if failures.is_empty() {
        Ok("segment, line and circle counts".into())
    } else {
        Err(failures.join("; "))
    }
}

/// Antipodal pairs by sweeping the critical directions (edge normals and
/// the midpoints between them): a pair is antipodal iff some direction has
/// one vertex at the maximum and the other at the minimum projection.
fn antipodal_sweep(sites: &[Point2], hull: &Hull) -> BTreeSet<SitePair> {
    let pts = hull.points(sites);
    let k = pts.len();
    let mut angles: Vec<f64> = (0..k)
        .flat_map(|t| {
            let e = pts[(t + 1) % k] - pts[t];
            let a = e.y.atan2(e.x) - FRAC_PI_2;
            [a, a + PI]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mids: Vec<f64> = angles.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    angles.extend(mids);
    let mut pairs = BTreeSet::new();
    for a in angles {
        let u = pt(a.cos(), a.sin());
        let proj: Vec<f64> = pts.iter().map(|p| p.dot(u)).collect();
        let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (hi - lo);
        for s in (0..k).filter(|&s| proj[s] >= hi - tol) {
            for t in (0..k).filter(|&t| proj[t] <= lo + tol) {
                pairs.insert(SitePair::new(hull.vertices[s], hull.vertices[t]));
            }
        }
    }
    pairs
}

fn far_field() -> Outcome {
    for seed in 0..10 {
        let sites = random_general(12, seed).sites;
        let hull = convex_hull(&sites).map_err(|e| e.to_string())?;
        let calipers = antipodal_pairs(&sites, &hull).pairs;
        let oracle = antipodal_sweep(&sites, &hull);
        ensure(calipers == oracle, || format!("seed {seed}: calipers {calipers:?} != sweep {oracle:?}"))?;
        let r = check_far_field_antipodal(&sites, 1e3).map_err(|e| e.to_string())?;
        ensure(r.passed, || format!("seed {seed}: {:?}", r.details))?;
    }
    Ok("10 seeds x 720 directions owned by antipodal pairs; calipers = sweep".into())
}

fn threads_max() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(4)
}

fn same_bytes(f: impl Fn() -> RasterDiagram + Sync) -> bool {
    let one = with_threads(1, &f).label_bytes();
    let many = with_threads(threads_max(), &f).label_bytes();
    one == many
}

fn determinism() -> Outcome {
    let mut rasters = 0;
    let mut check = |sites: &[Point2], spec: DistanceSpec, mode: Mode, pairs: Vec<SitePair>| -> Result<(), String> {
        let grid = grid256(sites);
        let ok = same_bytes(|| compute_raster_with_candidates(sites, spec, mode, grid, pairs.clone()).unwrap());
        rasters += 1;
        ensure(ok, || format!("{spec} {} differs between thread counts", mode.name()))
    };
    for seed in 0..PRUNING_SEEDS {
        for n in PRUNING_SIZES {
            let sites = random_general(n, seed).sites;
            let edges: Vec<SitePair> = delaunay(&sites).unwrap().edges.into_iter().collect();
            for spec in pruning_specs() {
                check(&sites, spec, Mode::Nearest, SitePair::all(n))?;
                check(&sites, spec, Mode::Nearest, edges.clone())?;
            }
        }
    }
    for seed in pc_seeds() {
        let sites = random_general(PC_SITES, seed).sites;
        check(&sites, DistanceSpec::param_perimeter(1e6).unwrap(), Mode::Nearest, SitePair::all(PC_SITES))?;
    }
    for seed in 0..10 {
        for n in OUTER_SIZES {
            let sites = random_general(n, seed).sites;
            check(&sites, DistanceSpec::new(DistanceKind::ViewAngle), Mode::Furthest, SitePair::all(n))?;
        }
    }
    Ok(format!("{rasters} rasters identical with 1 and {} threads", threads_max()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "distance unit suite", limit: secs(1), run: distance_examples },
        Criterion { id: 2, name: "law of sines cross-check", limit: secs(5), run: law_of_sines },
        Criterion { id: 3, name: "Delaunay pruning equivalence", limit: secs(60), run: delaunay_pruning },
        Criterion { id: 4, name: "perimeter collapse for large c", limit: secs(10), run: pc_collapse },
        Criterion { id: 5, name: "view-angle outer structure", limit: secs(60), run: viewangle_outer },
        Criterion { id: 6, name: "collinear circumcenter perimeter", limit: secs(5), run: ppcirc_collinear },
        Criterion { id: 7, name: "exact combinatorial counts", limit: secs(10), run: exact_counts },
        Criterion { id: 8, name: "far-field antipodal owners", limit: secs(10), run: far_field },
        Criterion { id: 9, name: "thread-count determinism", limit: None, run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let limit = c.limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        let outcome = match (outcome, c.limit) {
            (Ok(msg), Some(l)) if elapsed > l => Err(format!("{msg}; too slow")),
            (o, _) => o,
        };
        let (status, msg) = match &outcome {
            Ok(msg) => ("PASS", msg),
            Err(msg) => ("FAIL", msg),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {} [{}] {status} ({:.2} s{limit}): {msg}", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
