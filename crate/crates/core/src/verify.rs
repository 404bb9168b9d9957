//! Desk-scale checks of the structural claims behind the diagram bounds.
//! Each check returns a [`Report`] whose `passed` flag follows from its
//! counts alone.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::{build_arrangement, hull_supporting_lines, label_outer_cells, Line};
use crate::constructions::gen_collinear_unit;
use crate::distances::{eval_unchecked, DistanceKind, DistanceSpec, SitePair};
use crate::error::{GeomError, Result};
use crate::geom::{orient_value, Point2};
use crate::neighbors::{antipodal_pairs, convex_hull, delaunay, HullSide};
use crate::raster::{compute_raster_with_candidates, is_tie, pruning_applies, GridSpec, Mode, RasterDiagram};

/// Minimum share of agreeing outer cells in [`check_viewangle_outer`].
pub const OUTER_AGREEMENT: f64 = 0.999;
/// Clearance from arrangement edges, in cell diagonals, for a cell to count.
pub const OUTER_CLEARANCE: f64 = 2.0;
/// Absolute tolerance on the minimum perimeter value in
/// [`check_ppcirc_collinear`].
pub const PPCIRC_TOL: f64 = 1e-9;
pub const PPCIRC_SAMPLES: usize = 64;
/// Samples closer than this angle to a site are skipped on each circle.
pub const PPCIRC_POLE_GAP: f64 = 5.0 * PI / 180.0;
pub const FAR_FIELD_DIRECTIONS: usize = 720;
/// Multipliers below this are reported as near field.
pub const FAR_FIELD_MIN_MULTIPLIER: f64 = 100.0;
pub const LINE_LOCUS_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub passed: bool,
    pub counts: BTreeMap<String, f64>,
    pub details: Vec<String>,
    pub seed: Option<u64>,
    pub n: usize,
    /// `[width, height]` of the raster, for checks that use one.
    pub grid: Option<[usize; 2]>,
}

impl Report {
    fn new(theorem: &str, n: usize, grid: Option<&GridSpec>) -> Self {
        Report {
            theorem: theorem.to_string(),
            passed: false,
            counts: BTreeMap::new(),
            details: Vec::new(),
            seed: None,
            n,
            grid: grid.map(|g| [g.width, g.height]),
        }
    }

    fn count(&mut self, name: &str, value: impl Into<f64>) {
        self.counts.insert(name.to_string(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.counts.get(name).copied()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Optimal pair at `v` over `candidates`, the lexicographically smallest
/// among tied optima, and whether a tie occurred.
pub fn optimum_at(
    sites: &[Point2],
    spec: DistanceSpec,
    mode: Mode,
    candidates: &[SitePair],
    v: Point2,
) -> Option<(SitePair, f64, bool)> {
    let values: Vec<(SitePair, f64)> =
        candidates.iter().filter_map(|&p| eval_unchecked(spec, v, sites[p.i], sites[p.j]).map(|x| (p, x))).collect();
    let best = match mode {
        Mode::Nearest => values.iter().map(|&(_, x)| x).reduce(f64::min)?,
        Mode::Furthest => values.iter().map(|&(_, x)| x).reduce(f64::max)?,
    };
    let mut tied: Vec<SitePair> = values.iter().filter(|&&(_, x)| is_tie(x, best)).map(|&(p, _)| p).collect();
    tied.sort();
    Some((tied[0], best, tied.len() > 1))
}

fn all_pairs_raster(sites: &[Point2], spec: DistanceSpec, mode: Mode, grid: GridSpec) -> Result<RasterDiagram> {
    compute_raster_with_candidates(sites, spec, mode, grid, SitePair::all(sites.len()))
}

fn admissible_for_pruning(spec: DistanceSpec) -> Result<()> {
    if pruning_applies(spec, Mode::Nearest) {
        Ok(())
    } else {
        Err(GeomError::Precondition(format!("Delaunay pruning is not claimed for {spec}")))
    }
}

/// Nearest diagram over all pairs against the Delaunay-restricted one.
/// Passes iff every pair owning cells outright is a Delaunay edge.
pub fn check_delaunay_pruning(sites: &[Point2], spec: DistanceSpec, grid: GridSpec) -> Result<Report> {
    admissible_for_pruning(spec)?;
    let tri = delaunay(sites)?;
    let edges: Vec<SitePair> = tri.edges.iter().copied().collect();
    let full = all_pairs_raster(sites, spec, Mode::Nearest, grid)?;
    let pruned = compute_raster_with_candidates(sites, spec, Mode::Nearest, grid, edges.clone())?;
    let owners = full.non_empty_pairs();
    let outside: Vec<SitePair> = owners.iter().filter(|p| !tri.has_edge(**p)).copied().collect();
    let mut r = Report::new("delaunay-pruning", sites.len(), Some(&grid));
    r.count("candidatePairsFull", full.candidates.len() as f64);
    r.count("candidatePairsPruned", edges.len() as f64);
    r.count("ownerPairs", owners.len() as f64);
    r.count("ownersOutsideDelaunay", outside.len() as f64);
    r.count("mismatchedCells", full.mismatched_cells(&pruned) as f64);
    r.details.push(format!("distance {spec}"));
    for p in &outside {
        r.details.push(format!("pair {p} owns cells but is not a Delaunay edge"));
    }
    r.passed = outside.is_empty();
    Ok(r)
}

/// Negative control for [`check_delaunay_pruning`]: the Delaunay edges are
/// replaced by a random edge set of the same size, which should fail to
/// cover the owners of the full diagram.
pub fn check_delaunay_pruning_control(
    sites: &[Point2],
    spec: DistanceSpec,
    grid: GridSpec,
    seed: u64,
) -> Result<Report> {
    admissible_for_pruning(spec)?;
    let tri = delaunay(sites)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = SitePair::all(sites.len());
    let mut random: BTreeSet<SitePair>;
    loop {
        all.shuffle(&mut rng);
        random = all[..tri.edges.len()].iter().copied().collect();
        if random != tri.edges || tri.edges.len() == all.len() {
            break;
        }
    }
    let full = all_pairs_raster(sites, spec, Mode::Nearest, grid)?;
    let owners = full.non_empty_pairs();
    let outside = owners.iter().filter(|p| !random.contains(p)).count();
    let mut r = Report::new("delaunay-pruning-control", sites.len(), Some(&grid)).with_seed(seed);
    r.count("candidatePairsPruned", random.len() as f64);
    r.count("ownerPairs", owners.len() as f64);
    r.count("ownersOutsideCandidates", outside as f64);
    r.details.push("candidate set: random pairs instead of Delaunay edges".into());
    r.passed = outside == 0;
    Ok(r)
}

/// The unique closest pair of `sites`, by brute force.
pub fn unique_closest_pair(sites: &[Point2]) -> Result<SitePair> {
    let mut pairs: Vec<(f64, SitePair)> =
        SitePair::all(sites.len()).into_iter().map(|p| (sites[p.i].dist(sites[p.j]), p)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    match pairs.as_slice() {
        [] => Err(GeomError::NoUniqueClosestPair),
        [(_, p)] => Ok(*p),
        [(a, p), (b, _), ..] if *b > *a => Ok(*p),
        _ => Err(GeomError::NoUniqueClosestPair),
    }
}

/// For large `c` the perimeter term `c |pq|` dominates, so the nearest
/// diagram should collapse to the region of the closest pair.
pub fn check_pc_limit(sites: &[Point2], c: f64, grid: GridSpec) -> Result<Report> {
    let closest = unique_closest_pair(sites)?;
    let spec = DistanceSpec::param_perimeter(c)?;
    let raster = all_pairs_raster(sites, spec, Mode::Nearest, grid)?;
    let owners = raster.non_empty_pairs();
    let defined: Vec<SitePair> = raster.pair_grid().into_iter().flatten().collect();
    let by_closest = defined.iter().filter(|&&p| p == closest).count();
    let mut r = Report::new("pc-limit", sites.len(), Some(&grid));
    r.count("c", c);
    r.count("definedCells", defined.len() as f64);
    r.count("closestPairCells", by_closest as f64);
    r.count("ownerPairs", owners.len() as f64);
    r.details.push(format!("closest pair {closest}"));
    r.passed = by_closest == defined.len();
    Ok(r)
}

fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Outside the hull, the furthest view-angle diagram should coincide with
/// the arrangement of the hull's supporting lines.
pub fn check_viewangle_outer(sites: &[Point2], grid: GridSpec) -> Result<Report> {
    let hull = convex_hull(sites)?;
    let lines = hull_supporting_lines(sites, &hull);
    let arr = label_outer_cells(&build_arrangement(&lines), sites, &hull);
    let raster = all_pairs_raster(sites, DistanceSpec::new(DistanceKind::ViewAngle), Mode::Furthest, grid)?;
    let clearance = OUTER_CLEARANCE * grid.cell_diagonal();
    let (mut compared, mut agreed) = (0usize, 0usize);
    for row in 0..grid.height {
        for col in 0..grid.width {
            let v = grid.sample_avoiding(row, col, sites);
            if hull.side_of(sites, v) != HullSide::Outside || arr.distance_to_edges(v) < clearance {
                continue;
            }
            compared += 1;
            let face_label = arr.locate(v).and_then(|f| arr.faces[f].label);
            if face_label.is_some() && face_label == raster.pair_at(row, col) {
                agreed += 1;
            }
        }
    }
    let k = hull.k();
    let expected_faces = 1 + k + binom2(k);
    let mut r = Report::new("viewangle-outer", sites.len(), Some(&grid));
    r.count("hullVertices", k as f64);
    r.count("faces", arr.faces.len() as f64);
    r.count("facesExpectedGeneric", expected_faces as f64);
    r.count("vertices", arr.vertices.len() as f64);
    r.count("comparedCells", compared as f64);
    r.count("agreeingCells", agreed as f64);
    r.count("threshold", OUTER_AGREEMENT);
    r.count("clearanceCellDiagonals", OUTER_CLEARANCE);
    if compared == 0 {
        r.details.push("no qualifying cells outside the hull; vacuous pass".into());
        r.passed = true;
    } else {
        let agreement = agreed as f64 / compared as f64;
        r.count("agreement", agreement);
        r.passed = agreement >= OUTER_AGREEMENT;
    }
    if arr.faces.len() != expected_faces {
        r.details.push(format!("{} faces instead of {expected_faces}; hull lines are not generic", arr.faces.len()));
    }
    Ok(r)
}

/// Far from the sites, the furthest inscribed-radius owner in each
/// direction should be an antipodal pair of the hull.
pub fn check_far_field_antipodal(sites: &[Point2], radius_multiplier: f64) -> Result<Report> {
    if !(radius_multiplier > 0.0 && radius_multiplier.is_finite()) {
        return Err(GeomError::InvalidParameter(format!(
            "radius multiplier must be positive, got {radius_multiplier}"
        )));
    }
    let hull = convex_hull(sites)?;
    let antipodal = antipodal_pairs(sites, &hull);
    let n = sites.len() as f64;
    let centroid = sites.iter().fold(Point2::new(0.0, 0.0), |acc, &s| acc + s * (1.0 / n));
    let diameter = SitePair::all(sites.len()).into_iter().map(|p| sites[p.i].dist(sites[p.j])).fold(0.0, f64::max);
    let radius = radius_multiplier * diameter;
    let spec = DistanceSpec::new(DistanceKind::InscribedRadius);
    let candidates = SitePair::all(sites.len());
    let mut r = Report::new("far-field-antipodal", sites.len(), None);
    let (mut antipodal_owners, mut ties) = (0usize, 0usize);
    for k in 0..FAR_FIELD_DIRECTIONS {
        let theta = TAU * k as f64 / FAR_FIELD_DIRECTIONS as f64;
        let v = centroid + Point2::new(theta.cos(), theta.sin()) * radius;
        let Some((owner, _, tied)) = optimum_at(sites, spec, Mode::Furthest, &candidates, v) else {
            continue;
        };
        ties += tied as usize;
        if antipodal.contains(owner) {
            antipodal_owners += 1;
        } else if r.details.len() < 10 {
            r.details.push(format!("direction {k}: owner {owner} is not antipodal"));
        }
    }
    r.count("directions", FAR_FIELD_DIRECTIONS as f64);
    r.count("antipodalOwners", antipodal_owners as f64);
    r.count("antipodalPairs", antipodal.len() as f64);
    r.count("tiedDirections", ties as f64);
    r.count("radiusMultiplier", radius_multiplier);
    if radius_multiplier < FAR_FIELD_MIN_MULTIPLIER {
        r.details.push("near field: the property is asymptotic, so this run is not probative".into());
    }
    r.passed = antipodal_owners == FAR_FIELD_DIRECTIONS;
    Ok(r)
}

/// Sample angles on a circle, skipping arcs near the two points on the
/// horizontal axis.
fn circle_angles(count: usize, gap: f64) -> Vec<f64> {
    let half = count / 2;
    let span = PI - 2.0 * gap;
    (0..count)
        .map(|k| {
            let t = gap + span * ((k % half) as f64 + 0.5) / half as f64;
            if k < half {
                t
            } else {
                -t
            }
        })
        .collect()
}

/// Unit-spaced collinear sites: on the diameter circle of consecutive sites
/// the circumcenter-perimeter distance attains its minimum 2, and only the
/// consecutive pair attains it.
pub fn check_ppcirc_collinear(n: usize, grid: GridSpec) -> Result<Report> {
    if n < 3 {
        return Err(GeomError::InvalidParameter(format!("need at least 3 sites, got {n}")));
    }
    let sites = gen_collinear_unit(n)?.sites;
    let spec = DistanceSpec::new(DistanceKind::CccPerimeter);
    let candidates = SitePair::all(n);
    let others: Vec<SitePair> = candidates.iter().filter(|p| p.j != p.i + 1).copied().collect();
    let (mut samples, mut good_values, mut good_owners, mut control_violations) = (0usize, 0, 0, 0);
    let (mut min_value, mut max_dev) = (f64::INFINITY, 0.0f64);
    let mut min_control = f64::INFINITY;
    for k in 0..n - 1 {
        let pair = SitePair::new(k, k + 1);
        let center = sites[k].midpoint(sites[k + 1]);
        let radius = 0.5 * sites[k].dist(sites[k + 1]);
        for theta in circle_angles(PPCIRC_SAMPLES, PPCIRC_POLE_GAP) {
            let v = center + Point2::new(theta.cos(), theta.sin()) * radius;
            samples += 1;
            if let Some((owner, value, _)) = optimum_at(&sites, spec, Mode::Nearest, &candidates, v) {
                min_value = min_value.min(value);
                max_dev = max_dev.max((value - 2.0).abs());
                good_values += ((value - 2.0).abs() <= PPCIRC_TOL) as usize;
                good_owners += (owner == pair) as usize;
            }
            if let Some((_, control, _)) = optimum_at(&sites, spec, Mode::Nearest, &others, v) {
                min_control = min_control.min(control);
                control_violations += (control <= 2.0 + PPCIRC_TOL) as usize;
            }
        }
    }
    let raster = all_pairs_raster(&sites, spec, Mode::Nearest, grid)?;
    let owners = raster.non_empty_pairs();
    let consecutive = owners.iter().filter(|p| p.j == p.i + 1).count();
    let mut r = Report::new("ppcirc-collinear", n, Some(&grid));
    r.count("samples", samples as f64);
    r.count("samplesAtTwo", good_values as f64);
    r.count("samplesOwnedByConsecutivePair", good_owners as f64);
    r.count("minValue", min_value);
    r.count("maxDeviation", max_dev);
    r.count("tolerance", PPCIRC_TOL);
    r.count("controlMinValue", min_control);
    r.count("controlViolations", control_violations as f64);
    r.count("consecutiveRegions", consecutive as f64);
    r.count("nonEmptyPairs", owners.len() as f64);
    r.passed = good_values == samples && good_owners == samples && control_violations == 0 && consecutive == n - 1;
    Ok(r)
}

fn collinear_triples(sites: &[Point2]) -> Vec<[usize; 3]> {
    let n = sites.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if orient_value(sites[a], sites[b], sites[c]) == 0.0 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Parameter interval of `p + t (q - p)` inside the grid's box.
fn clip_to_box(p: Point2, q: Point2, grid: &GridSpec) -> Option<(f64, f64)> {
    let b = grid.bbox;
    let d = q - p;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (start, delta, min, max) in [(p.x, d.x, b.xmin, b.xmax), (p.y, d.y, b.ymin, b.ymax)] {
        if delta == 0.0 {
            if start < min || start > max {
                return None;
            }
            continue;
        }
        let (t0, t1) = ((min - start) / delta, (max - start) / delta);
        lo = lo.max(t0.min(t1));
        hi = hi.min(t0.max(t1));
    }
    (lo < hi).then_some((lo, hi))
}

/// Points on the line through `p` and `q` have infinite circumradius with
/// respect to `(p, q)`, so they belong to its furthest region.
pub fn check_line_locus_furthest_c(sites: &[Point2], grid: GridSpec) -> Result<Report> {
    let mut r = Report::new("line-locus-furthest-c", sites.len(), Some(&grid));
    let triples = collinear_triples(sites);
    if sites.len() < 3 || !triples.is_empty() {
        r.count("collinearTriples", triples.len() as f64);
        r.details.push(format!(
            "precondition violated: need 3 or more sites with no three collinear, found {} collinear triples",
            triples.len()
        ));
        return Ok(r);
    }
    let spec = DistanceSpec::new(DistanceKind::Circumradius);
    let pairs = SitePair::all(sites.len());
    let lines: Vec<Line> =
        pairs.iter().map(|p| Line::through(sites[p.i], sites[p.j]).expect("distinct sites").with_source(*p)).collect();
    let clearance = grid.cell_diagonal();
    let (mut samples, mut owned, mut lines_checked) = (0usize, 0usize, 0usize);
    for (a, pair) in pairs.iter().enumerate() {
        let (p, q) = (sites[pair.i], sites[pair.j]);
        let Some((t0, t1)) = clip_to_box(p, q, &grid) else {
            continue;
        };
        let mut line_samples = 0;
        for k in 0..LINE_LOCUS_SAMPLES {
            let t = t0 + (t1 - t0) * (k as f64 + 0.5) / LINE_LOCUS_SAMPLES as f64;
            let v = p + (q - p) * t;
            let near_other = lines.iter().enumerate().any(|(b, l)| b != a && l.eval(v).abs() < clearance);
            if near_other {
                continue;
            }
            line_samples += 1;
            samples += 1;
            match optimum_at(sites, spec, Mode::Furthest, &pairs, v) {
                Some((owner, _, _)) if owner == *pair => owned += 1,
                other => {
                    if r.details.len() < 10 {
                        r.details.push(format!("sample on line {pair} owned by {:?}", other.map(|o| o.0)));
                    }
                }
            }
        }
        lines_checked += (line_samples > 0) as usize;
    }
    // Where two site-lines cross, both pairs are (near) infinite. Reported
    // for information only.
    let (mut crossings, mut crossing_ties) = (0usize, 0usize);
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            let (s, t) = (pairs[a], pairs[b]);
            if s.contains(t.i) || s.contains(t.j) {
                continue;
            }
            let Some(x) = intersect(&lines[a], &lines[b]) else {
                continue;
            };
            if !grid.bbox.contains(x) {
                continue;
            }
            crossings += 1;
            if let Some((owner, value, tied)) = optimum_at(sites, spec, Mode::Furthest, &pairs, x) {
                if (tied && value.is_infinite()) || owner == s || owner == t {
                    crossing_ties += 1;
                }
            }
        }
    }
    r.count("lines", pairs.len() as f64);
    r.count("linesChecked", lines_checked as f64);
    r.count("samples", samples as f64);
    r.count("samplesOwnedByLinePair", owned as f64);
    r.count("crossings", crossings as f64);
    r.count("crossingsOwnedByDefiningPairs", crossing_ties as f64);
    r.count("clearanceCellDiagonals", 1.0);
    r.passed = samples > 0 && owned == samples;
    Ok(r)
}

fn intersect(l: &Line, m: &Line) -> Option<Point2> {
    let det = l.a * m.b - l.b * m.a;
    if det == 0.0 {
        return None;
    }
    Some(Point2::new((l.b * m.c - m.b * l.c) / det, (m.a * l.c - l.a * m.c) / det))
}
