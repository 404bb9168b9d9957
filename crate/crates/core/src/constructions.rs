//! Point sets realizing the lower-bound constructions, and brute-force
//! counters for the intersection structures they produce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distances::SitePair;
use crate::error::{GeomError, Result};
use crate::geom::{orient_value, Circle, Point2};

/// Where a point set came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// Sites on `y = 0` (even positions) and `y = d` (odd positions).
    TwoLine {
        d: f64,
        spread: f64,
    },
    /// `(0, 0), (1, 0), ..., (n - 1, 0)`.
    CollinearUnit,
    ConvexPosition,
    RandomGeneral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSet {
    pub sites: Vec<Point2>,
    pub provenance: Provenance,
}

impl ConstructionSet {
    /// Indices of the sites on the lower line and on the upper line.
    pub fn two_line_split(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let Provenance::TwoLine { d, .. } = self.provenance else {
            return None;
        };
        let lower = (0..self.sites.len()).filter(|&k| self.sites[k].y < 0.5 * d).collect();
        let upper = (0..self.sites.len()).filter(|&k| self.sites[k].y >= 0.5 * d).collect();
        Some((lower, upper))
    }
}

/// Bounded number of rejection-sampling attempts for generic sets.
pub const MAX_RETRIES: usize = 100;

/// Tolerance for point identity after scaling the site set to the unit box.
pub const DEDUP_TOL: f64 = 1e-9;

pub fn random_general(n: usize, seed: u64) -> ConstructionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConstructionSet {
        sites: (0..n).map(|_| Point2::new(rng.gen(), rng.gen())).collect(),
        provenance: Provenance::RandomGeneral,
    }
}

/// `n` points at random angles on the unit circle, in angular order.
pub fn convex_position(n: usize, seed: u64) -> ConstructionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    ConstructionSet {
        sites: angles.iter().map(|a| Point2::new(a.cos(), a.sin())).collect(),
        provenance: Provenance::ConvexPosition,
    }
}

pub fn gen_collinear_unit(n: usize) -> Result<ConstructionSet> {
    if n < 2 {
        return Err(GeomError::InvalidParameter(format!("need at least 2 points, got {n}")));
    }
    Ok(ConstructionSet {
        sites: (0..n).map(|k| Point2::new(k as f64, 0.0)).collect(),
        provenance: Provenance::CollinearUnit,
    })
}

/// Two parallel lines at distance `d`, `ceil(n/2)` sites on the lower one and
/// `floor(n/2)` on the upper one, each spread over a window of width
/// `spread`. Sites alternate between the lines. Rejection-samples until the
/// diameter circles of cross-line pairs are generic.
pub fn gen_two_line_set(n: usize, d: f64, spread: f64, seed: u64) -> Result<ConstructionSet> {
    if n < 4 {
        return Err(GeomError::InvalidParameter(format!("need at least 4 points, got {n}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(GeomError::InvalidParameter(format!("line distance must be positive, got {d}")));
    }
    if !(spread > 0.0 && spread <= d / 100.0) {
        return Err(GeomError::InvalidParameter(format!("spread must lie in (0, d/100], got {spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let sites: Vec<Point2> = (0..n)
            .map(|k| {
                let y = if k % 2 == 0 { 0.0 } else { d };
                Point2::new(rng.gen_range(-0.5 * spread..0.5 * spread), y)
            })
            .collect();
        let set = ConstructionSet { sites, provenance: Provenance::TwoLine { d, spread } };
        if genericity(&set)?.is_generic() {
            return Ok(set);
        }
    }
    Err(GeomError::GenericityFailure(MAX_RETRIES))
}

/// Diameter circles of every cross-line pair, in lexicographic pair order.
pub fn cross_line_circles(set: &ConstructionSet) -> Result<Vec<(SitePair, Circle)>> {
    let (lower, upper) = set
        .two_line_split()
        .ok_or_else(|| GeomError::Precondition("circle counting needs a two-line construction".into()))?;
    let mut circles = Vec::with_capacity(lower.len() * upper.len());
    for &p in &lower {
        for &q in &upper {
            circles.push((SitePair::new(p, q), Circle::with_diameter(set.sites[p], set.sites[q])));
        }
    }
    circles.sort_by_key(|(pair, _)| *pair);
    Ok(circles)
}

/// Intersection points of two circles; empty for disjoint, nested or
/// identical circles.
pub fn circle_intersections(a: &Circle, b: &Circle) -> Vec<Point2> {
    let (Some(ca), Some(cb)) = (a.center, b.center) else {
        return Vec::new();
    };
    let d = ca.dist(cb);
    if d == 0.0 || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    let h = (a.radius * a.radius - along * along).max(0.0).sqrt();
    let u = (cb - ca) * (1.0 / d);
    let base = ca + u * along;
    let normal = Point2::new(-u.y, u.x);
    if h == 0.0 {
        vec![base]
    } else {
        vec![base + normal * h, base - normal * h]
    }
}

/// Affine map sending the site bounding box to the unit box (uniformly).
fn normalizer(sites: &[Point2]) -> impl Fn(Point2) -> Point2 {
    let (mut lo, mut hi) =
        (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in sites {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let scale = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    move |p: Point2| (p - lo) * (1.0 / scale)
}

/// Cluster points closer than `tol` in both coordinates. Returns cluster
/// representatives with their sizes, ordered by x.
pub fn dedup_points(points: &[Point2], tol: f64) -> Vec<(Point2, usize)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut out: Vec<(Point2, usize)> = Vec::new();
    for p in sorted {
        let hit = out.iter_mut().rev().take_while(|(q, _)| p.x - q.x <= tol).find(|(q, _)| (p.y - q.y).abs() <= tol);
        match hit {
            Some((_, count)) => *count += 1,
            None => out.push((p, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleIntersectionCount {
    pub circles: usize,
    pub circle_pairs: usize,
    pub pairs_intersecting: usize,
    /// Intersection points before merging.
    pub raw_points: usize,
    /// Geometrically distinct intersection points, sites included.
    pub distinct_points: usize,
    /// Distinct intersection points located at a site.
    pub site_points: usize,
    /// Distinct intersection points located at the foot of a site on the
    /// opposite line.
    pub foot_points: usize,
    pub warnings: Vec<String>,
}

/// Build the diameter circles of all cross-line pairs and count the circle
/// pairs that cross and the distinct points where they do.
pub fn count_circle_intersections(set: &ConstructionSet) -> Result<CircleIntersectionCount> {
    let circles = cross_line_circles(set)?;
    let norm = normalizer(&set.sites);
    let mut warnings = Vec::new();
    let mut pairs_intersecting = 0;
    let mut coincident = 0;
    let mut points = Vec::new();
    for a in 0..circles.len() {
        for b in a + 1..circles.len() {
            let (ca, cb) = (&circles[a].1, &circles[b].1);
            if same_circle(ca, cb, &norm) {
                coincident += 1;
                continue;
            }
            let hits = circle_intersections(ca, cb);
            if !hits.is_empty() {
                pairs_intersecting += 1;
                points.extend(hits.into_iter().map(&norm));
            }
        }
    }
    if coincident > 0 {
        warnings.push(format!("{coincident} circle pairs coincide and were skipped"));
    }
    let clusters = dedup_points(&points, DEDUP_TOL);
    let normalized_sites: Vec<Point2> = set.sites.iter().map(|&s| norm(s)).collect();
    let site_points = clusters
        .iter()
        .filter(|(p, _)| {
            normalized_sites.iter().any(|s| (s.x - p.x).abs() <= DEDUP_TOL && (s.y - p.y).abs() <= DEDUP_TOL)
        })
        .count();
    let feet: Vec<Point2> = opposite_feet(set)?.into_iter().map(&norm).collect();
    let foot_points = clusters
        .iter()
        .filter(|(p, _)| feet.iter().any(|f| (f.x - p.x).abs() <= DEDUP_TOL && (f.y - p.y).abs() <= DEDUP_TOL))
        .count();
    Ok(CircleIntersectionCount {
        circles: circles.len(),
        circle_pairs: circles.len() * circles.len().saturating_sub(1) / 2,
        pairs_intersecting,
        raw_points: points.len(),
        distinct_points: clusters.len(),
        site_points,
        foot_points,
        warnings,
    })
}

fn same_circle(a: &Circle, b: &Circle, norm: &impl Fn(Point2) -> Point2) -> bool {
    match (a.center, b.center) {
        (Some(ca), Some(cb)) => {
            let (na, nb) = (norm(ca), norm(cb));
            let scale = (norm(ca + Point2::new(a.radius, 0.0)) - na).x;
            let scale_b = (norm(cb + Point2::new(b.radius, 0.0)) - nb).x;
            (na.x - nb.x).abs() <= DEDUP_TOL && (na.y - nb.y).abs() <= DEDUP_TOL && (scale - scale_b).abs() <= DEDUP_TOL
        }
        _ => false,
    }
}

/// Result of the a-posteriori genericity checks on a two-line set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Genericity {
    /// Circles passing through a site other than their two defining ones.
    pub extra_site_incidences: usize,
    /// Circle pairs that do not cross.
    pub non_crossing_pairs: usize,
    /// Points shared by more than two circles, other than sites and feet.
    pub concurrent_points: usize,
}

impl Genericity {
    pub fn is_generic(&self) -> bool {
        *self == Genericity::default()
    }
}

/// Orthogonal projections of every site onto the opposite line. All
/// diameter circles through a site `p` contain its foot (right angle at the
/// foot), so these concurrencies cannot be perturbed away.
pub fn opposite_feet(set: &ConstructionSet) -> Result<Vec<Point2>> {
    let Provenance::TwoLine { d, .. } = set.provenance else {
        return Err(GeomError::Precondition("feet need a two-line construction".into()));
    };
    Ok(set.sites.iter().map(|s| Point2::new(s.x, if s.y < 0.5 * d { d } else { 0.0 })).collect())
}

pub fn genericity(set: &ConstructionSet) -> Result<Genericity> {
    let circles = cross_line_circles(set)?;
    let norm = normalizer(&set.sites);
    let mut g = Genericity::default();
    for (pair, circle) in &circles {
        let center = circle.center.expect("diameter circles are finite");
        for (k, &s) in set.sites.iter().enumerate() {
            if pair.contains(k) {
                continue;
            }
            let off = (center.dist(s) - circle.radius).abs();
            if (norm(center + Point2::new(off, 0.0)) - norm(center)).x <= DEDUP_TOL {
                g.extra_site_incidences += 1;
            }
        }
    }
    let mut non_site = Vec::new();
    let normalized_sites: Vec<Point2> = set.sites.iter().map(|&s| norm(s)).collect();
    let feet: Vec<Point2> = opposite_feet(set)?.into_iter().map(&norm).collect();
    for a in 0..circles.len() {
        for b in a + 1..circles.len() {
            let hits = circle_intersections(&circles[a].1, &circles[b].1);
            if hits.is_empty() {
                g.non_crossing_pairs += 1;
            }
            for h in hits {
                let h = norm(h);
                let at_site =
                    normalized_sites.iter().any(|s| (s.x - h.x).abs() <= DEDUP_TOL && (s.y - h.y).abs() <= DEDUP_TOL);
                if !at_site {
                    non_site.push(h);
                }
            }
        }
    }
    g.concurrent_points = dedup_points(&non_site, DEDUP_TOL)
        .iter()
        .filter(|(p, c)| {
            *c > 1 && !feet.iter().any(|f| (f.x - p.x).abs() <= DEDUP_TOL && (f.y - p.y).abs() <= DEDUP_TOL)
        })
        .count();
    Ok(g)
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orient_value(a, b, c).signum();
    let o2 = orient_value(a, b, d).signum();
    let o3 = orient_value(c, d, a).signum();
    let o4 = orient_value(c, d, b).signum();
    let on = |p: Point2, q: Point2, r: Point2| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let signed = |v: f64| if v == 0.0 { 0 } else { v as i32 };
    let (o1, o2, o3, o4) = (signed(o1), signed(o2), signed(o3), signed(o4));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on(a, b, c)) || (o2 == 0 && on(a, b, d)) || (o3 == 0 && on(c, d, a)) || (o4 == 0 && on(c, d, b))
}

/// Pairs of site-to-site segments, sharing no endpoint, that meet. Brute
/// force over all segment pairs.
pub fn count_segment_intersections(sites: &[Point2]) -> usize {
    let segments = SitePair::all(sites.len());
    (0..segments.len())
        .into_par_iter()
        .map(|x| {
            let s = segments[x];
            segments[x + 1..]
                .iter()
                .filter(|t| !s.contains(t.i) && !s.contains(t.j))
                .filter(|t| segments_intersect(sites[s.i], sites[s.j], sites[t.i], sites[t.j]))
                .count()
        })
        .sum()
}

/// Distinct intersection points of the lines through all site pairs,
/// excluding the sites themselves.
pub fn count_line_intersections(sites: &[Point2]) -> usize {
    let norm = normalizer(sites);
    let pts: Vec<Point2> = sites.iter().map(|&s| norm(s)).collect();
    let pairs = SitePair::all(pts.len());
    let points: Vec<Point2> = (0..pairs.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let s = pairs[x];
            let pts = &pts;
            pairs[x + 1..]
                .iter()
                .filter(move |t| !s.contains(t.i) && !s.contains(t.j))
                .filter_map(move |t| line_intersection(pts[s.i], pts[s.j], pts[t.i], pts[t.j]))
        })
        .collect();
    dedup_points(&points, DEDUP_TOL)
        .into_iter()
        .filter(|(p, _)| !pts.iter().any(|s| (s.x - p.x).abs() <= DEDUP_TOL && (s.y - p.y).abs() <= DEDUP_TOL))
        .count()
}

fn line_intersection(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    let (r, s) = (b - a, d - c);
    let den = r.cross(s);
    if den == 0.0 {
        return None;
    }
    let t = (c - a).cross(s) / den;
    Some(a + r * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn two_line_sizes() {
        for (n, circles) in [(4, 4), (6, 9), (8, 16)] {
            let set = gen_two_line_set(n, 10.0, 0.05, 1).unwrap();
            let (lower, upper) = set.two_line_split().unwrap();
            assert_eq!(lower.len(), n.div_ceil(2));
            assert_eq!(upper.len(), n / 2);
            assert_eq!(cross_line_circles(&set).unwrap().len(), circles);
        }
    }

    #[test]
    fn two_line_parameters_validated() {
        assert!(gen_two_line_set(3, 10.0, 0.05, 0).is_err());
        assert!(gen_two_line_set(6, 10.0, 0.5, 0).is_err());
        assert!(gen_two_line_set(6, -1.0, 0.001, 0).is_err());
    }

    #[test]
    fn circles_pass_only_through_defining_sites() {
        let set = gen_two_line_set(8, 10.0, 0.05, 3).unwrap();
        for (pair, circle) in cross_line_circles(&set).unwrap() {
            let center = circle.center.unwrap();
            for (k, &s) in set.sites.iter().enumerate() {
                let off = (center.dist(s) - circle.radius).abs();
                if pair.contains(k) {
                    assert!(off <= 1e-12 * circle.radius);
                } else {
                    assert!(off > 1e-9 * circle.radius);
                }
            }
        }
    }

    /// Independent count for n = 4: each site is on two circles, so four of
    /// the six circle pairs meet at a site and at its foot on the other line,
    /// and the other two meet at two further points.
    #[test]
    fn four_point_circle_counts() {
        let set = gen_two_line_set(4, 10.0, 0.05, 0).unwrap();
        let count = count_circle_intersections(&set).unwrap();
        assert_eq!(count.circles, 4);
        assert_eq!(count.pairs_intersecting, 6);
        assert_eq!(count.raw_points, 12);
        assert_eq!(count.site_points, 4);
        assert_eq!(count.foot_points, 4);
        assert_eq!(count.distinct_points, 4 + 4 + 2 * 2);
    }

    #[test]
    fn eight_point_circle_counts() {
        let set = gen_two_line_set(8, 10.0, 0.05, 0).unwrap();
        let count = count_circle_intersections(&set).unwrap();
        assert_eq!(count.circles, 16);
        assert_eq!(count.pairs_intersecting, 120);
        assert_eq!(count.raw_points, 240);
        // every site lies on 4 circles; the 6 pairs through a site all meet
        // there and at its foot, the other pairs meet at 2 points of their own
        assert_eq!(count.site_points, 8);
        assert_eq!(count.foot_points, 8);
        let sharing = 8 * binom(4, 2);
        assert_eq!(count.distinct_points, 8 + 8 + 2 * (120 - sharing));
        assert_eq!(count.distinct_points, 160);
    }

    #[test]
    fn feet_lie_on_all_circles_through_their_site() {
        let set = gen_two_line_set(8, 10.0, 0.05, 5).unwrap();
        let feet = opposite_feet(&set).unwrap();
        for (pair, circle) in cross_line_circles(&set).unwrap() {
            for k in [pair.i, pair.j] {
                let off = (circle.center.unwrap().dist(feet[k]) - circle.radius).abs();
                assert!(off < 1e-12 * circle.radius);
            }
        }
    }

    #[test]
    fn coincident_points_count_zero() {
        let set = ConstructionSet {
            sites: vec![pt(0.0, 0.0), pt(0.0, 10.0), pt(0.0, 0.0), pt(0.0, 10.0)],
            provenance: Provenance::TwoLine { d: 10.0, spread: 0.0 },
        };
        let count = count_circle_intersections(&set).unwrap();
        assert_eq!(count.pairs_intersecting, 0);
        assert_eq!(count.distinct_points, 0);
        assert_eq!(count.warnings.len(), 1);
    }

    #[test]
    fn counting_requires_two_line_sets() {
        assert!(matches!(count_circle_intersections(&random_general(6, 0)), Err(GeomError::Precondition(_))));
    }

    #[test]
    fn segment_examples() {
        let square = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        assert_eq!(count_segment_intersections(&square), 1);
        let hexagon: Vec<Point2> = (0..6)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 6.0;
                pt(a.cos(), a.sin())
            })
            .collect();
        assert_eq!(count_segment_intersections(&hexagon), 15);
        let nested = [pt(0.0, 0.0), pt(4.0, 0.0), pt(1.0, 3.0), pt(1.5, 1.0)];
        assert_eq!(count_segment_intersections(&nested), 0);
    }

    #[test]
    fn convex_position_segment_counts() {
        for n in 4..=10 {
            let set = convex_position(n, n as u64);
            assert_eq!(count_segment_intersections(&set.sites), binom(n, 4), "n = {n}");
        }
    }

    /// Oracle: enumerate all line pairs, intersect, drop pairs sharing a site.
    fn brute_force_lines(sites: &[Point2]) -> usize {
        let pairs = SitePair::all(sites.len());
        let mut pts = Vec::new();
        for a in 0..pairs.len() {
            for b in a + 1..pairs.len() {
                let (s, t) = (pairs[a], pairs[b]);
                if s.contains(t.i) || s.contains(t.j) {
                    continue;
                }
                if let Some(p) = line_intersection(sites[s.i], sites[s.j], sites[t.i], sites[t.j]) {
                    if !pts.iter().any(|q: &Point2| q.dist(p) < 1e-7) {
                        pts.push(p);
                    }
                }
            }
        }
        pts.len()
    }

    #[test]
    fn line_intersection_counts() {
        let tri = [pt(0.0, 0.0), pt(1.0, 0.0), pt(0.2, 1.0)];
        assert_eq!(count_line_intersections(&tri), 0);
        for n in 4..=7 {
            let sites = random_general(n, 40 + n as u64).sites;
            let m = binom(n, 2);
            let identity = binom(m, 2) - n * binom(n - 1, 2);
            assert_eq!(count_line_intersections(&sites), identity, "n = {n}");
            assert_eq!(brute_force_lines(&sites), identity, "n = {n}");
        }
        assert_eq!(count_line_intersections(&random_general(4, 1).sites), 3);
        assert_eq!(count_line_intersections(&random_general(5, 1).sites), 15);
    }

    #[test]
    fn collinear_unit_points() {
        assert_eq!(gen_collinear_unit(2).unwrap().sites, vec![pt(0.0, 0.0), pt(1.0, 0.0)]);
        let five = gen_collinear_unit(5).unwrap();
        assert!(five.sites.windows(2).all(|w| w[1].x - w[0].x == 1.0 && w[1].y == 0.0));
        assert!(gen_collinear_unit(1).is_err());
    }

    #[test]
    fn dedup_merges_within_tolerance() {
        let pts = [pt(0.0, 0.0), pt(1e-10, -1e-10), pt(1.0, 0.0), pt(0.0, 1.0)];
        let clusters = dedup_points(&pts, 1e-9);
        assert_eq!(clusters.len(), 3);
        assert_eq!(clusters[0].1, 2);
    }
}
