//! Arrangements of lines, built incrementally by splitting convex faces, and
//! labeling of the cells lying outside a convex hull by the pair seen under
//! the widest angle.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distances::{eval_unchecked, DistanceKind, DistanceSpec, SitePair};
use crate::geom::Point2;
use crate::neighbors::{Hull, HullSide};
use crate::raster::is_tie;

/// Absolute tolerance for merging intersection points of nearly concurrent
/// lines and for deciding that a line misses a face.
pub const MERGE_TOL: f64 = 1e-9;

/// `a x + b y + c = 0` with `a^2 + b^2 = 1` and the leading nonzero of
/// `(a, b)` positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Hull edge the line supports, when built from one.
    pub source: Option<SitePair>,
}

impl Line {
    pub fn new(a: f64, b: f64, c: f64) -> Option<Line> {
        let norm = a.hypot(b);
        if norm == 0.0 || !norm.is_finite() || !c.is_finite() {
            return None;
        }
        let sign = if a > 0.0 || (a == 0.0 && b > 0.0) { 1.0 } else { -1.0 };
        let k = sign / norm;
        Some(Line { a: a * k, b: b * k, c: c * k, source: None })
    }

    pub fn through(p: Point2, q: Point2) -> Option<Line> {
        Line::new(q.y - p.y, p.x - q.x, q.x * p.y - p.x * q.y)
    }

    pub fn with_source(mut self, source: SitePair) -> Line {
        self.source = Some(source);
        self
    }

    /// Signed distance from the line.
    pub fn eval(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn direction(&self) -> Point2 {
        Point2::new(-self.b, self.a)
    }

    fn foot_of_origin(&self) -> Point2 {
        Point2::new(-self.a * self.c, -self.b * self.c)
    }

    fn intersect(&self, other: &Line) -> Option<Point2> {
        let det = self.a * other.b - other.a * self.b;
        if det.abs() <= 1e-12 {
            return None;
        }
        Some(Point2::new((self.b * other.c - other.b * self.c) / det, (other.a * self.c - self.a * other.c) / det))
    }

    fn coincides(&self, other: &Line) -> bool {
        (self.a - other.a).abs() <= MERGE_TOL
            && (self.b - other.b).abs() <= MERGE_TOL
            && (self.c - other.c).abs() <= MERGE_TOL
    }
}

/// Lines through the edges of a convex hull, tagged with their edge.
pub fn hull_supporting_lines(sites: &[Point2], hull: &Hull) -> Vec<Line> {
    hull.edges()
        .filter_map(|(i, j)| Line::through(sites[i], sites[j]).map(|l| l.with_source(SitePair::new(i, j))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: Point2,
    /// Lowest-index pair of lines meeting here.
    pub witness: (usize, usize),
    pub lines: Vec<usize>,
}

/// Maximal piece of a line between consecutive vertices; `None` ends run to
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub line: usize,
    pub start: Option<usize>,
    pub end: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// The face clipped to the working box, counterclockwise.
    pub polygon: Vec<Point2>,
    pub bounded: bool,
    /// Area centroid of the clipped polygon; strictly interior.
    pub representative: Point2,
    pub label: Option<SitePair>,
    /// The label was chosen by tie-break among equal view angles.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    pub lines: Vec<Line>,
    /// Indices of lines dropped because they coincide with an earlier line.
    pub merged_lines: Vec<usize>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Working box containing every vertex with a generous margin.
    pub bounds: [Point2; 2],
    face_index: HashMap<Vec<i8>, usize>,
}

fn polygon_area_centroid(poly: &[Point2]) -> (f64, Point2) {
    let origin = poly[0];
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for w in 1..poly.len() - 1 {
        let (p, q) = (poly[w] - origin, poly[w + 1] - origin);
        let a = 0.5 * p.cross(q);
        area += a;
        cx += a * (p.x + q.x) / 3.0;
        cy += a * (p.y + q.y) / 3.0;
    }
    (area, Point2::new(origin.x + cx / area, origin.y + cy / area))
}

/// Split a convex polygon by a line; `None` when the line misses its interior.
fn split(poly: &[Point2], line: &Line, eps: f64) -> Option<(Vec<Point2>, Vec<Point2>)> {
    let s: Vec<f64> = poly.iter().map(|&p| line.eval(p)).collect();
    let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi <= eps || lo >= -eps {
        return None;
    }
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let (sp, sq) = (s[k], s[(k + 1) % poly.len()]);
        if sp >= 0.0 {
            pos.push(p);
        }
        if sp <= 0.0 {
            neg.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let t = sp / (sp - sq);
            let x = p + (q - p) * t;
            pos.push(x);
            neg.push(x);
        }
    }
    Some((pos, neg))
}

impl Arrangement {
    /// Face containing `p`, found by its side of every line. `None` when `p`
    /// lies on a line.
    pub fn locate(&self, p: Point2) -> Option<usize> {
        let key = self.sign_vector(p)?;
        self.face_index.get(&key).copied()
    }

    fn sign_vector(&self, p: Point2) -> Option<Vec<i8>> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.merged_lines.contains(k))
            .map(|(_, l)| {
                let s = l.eval(p);
                if s > 0.0 {
                    Some(1)
                } else if s < 0.0 {
                    Some(-1)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Distance from `p` to the nearest line, which is also the distance to
    /// the nearest arrangement edge.
    pub fn distance_to_edges(&self, p: Point2) -> f64 {
        self.lines.iter().map(|l| l.eval(p).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Compactified Euler characteristic `(V + 1) - E + F`; 2 for every
    /// arrangement with at least one line.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 + 1 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// SVG drawing of the lines clipped to the working box, the sites, and
    /// face labels at the representative points.
    pub fn to_svg(&self, sites: &[Point2]) -> String {
        let [lo, hi] = self.bounds;
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let stroke = 1e-3 * w.max(h);
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#, lo.x, -hi.y, w, h);
        let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
        let corners = [lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)];
        for line in &self.lines {
            let mut hits = Vec::new();
            for k in 0..4 {
                let (p, q) = (corners[k], corners[(k + 1) % 4]);
                let (sp, sq) = (line.eval(p), line.eval(q));
                if (sp <= 0.0 && sq >= 0.0) || (sp >= 0.0 && sq <= 0.0) {
                    if sp == sq {
                        continue;
                    }
                    hits.push(p + (q - p) * (sp / (sp - sq)));
                }
            }
            if hits.len() >= 2 {
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{stroke}"/>"#,
                    hits[0].x, hits[0].y, hits[1].x, hits[1].y
                );
            }
        }
        for s in sites {
            let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}" fill="red"/>"#, s.x, s.y, 4.0 * stroke);
        }
        let _ = writeln!(out, "</g>");
        for face in &self.faces {
            if let Some(label) = face.label {
                let p = face.representative;
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}-{}</text>"#,
                    p.x,
                    -p.y,
                    20.0 * stroke,
                    label.i,
                    label.j
                );
            }
        }
        let _ = writeln!(out, "</svg>");
        out
    }
}

/// Build the arrangement of `lines` by inserting them one at a time and
/// splitting every convex face each new line crosses.
pub fn build_arrangement(lines: &[Line]) -> Arrangement {
    let mut merged_lines = Vec::new();
    for k in 0..lines.len() {
        if (0..k).any(|e| !merged_lines.contains(&e) && lines[e].coincides(&lines[k])) {
            merged_lines.push(k);
        }
    }
    let active: Vec<usize> = (0..lines.len()).filter(|k| !merged_lines.contains(k)).collect();

    let mut vertices: Vec<Vertex> = Vec::new();
    for (x, &li) in active.iter().enumerate() {
        for &lj in &active[x + 1..] {
            let Some(p) = lines[li].intersect(&lines[lj]) else {
                continue;
            };
            match vertices
                .iter_mut()
                .find(|v| (v.point.x - p.x).abs() <= MERGE_TOL && (v.point.y - p.y).abs() <= MERGE_TOL)
            {
                Some(v) => {
                    for l in [li, lj] {
                        if !v.lines.contains(&l) {
                            v.lines.push(l);
                        }
                    }
                }
                None => vertices.push(Vertex { point: p, witness: (li, lj), lines: vec![li, lj] }),
            }
        }
    }
    for v in &mut vertices {
        v.lines.sort_unstable();
    }

    let mut edges = Vec::new();
    for &l in &active {
        let dir = lines[l].direction();
        let mut on_line: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].lines.contains(&l)).collect();
        on_line.sort_by(|&u, &v| vertices[u].point.dot(dir).total_cmp(&vertices[v].point.dot(dir)));
        let mut prev = None;
        for &v in &on_line {
            edges.push(Edge { line: l, start: prev, end: Some(v) });
            prev = Some(v);
        }
        edges.push(Edge { line: l, start: prev, end: None });
    }

    // working box: every vertex plus the foot of every line from the origin
    let mut anchors: Vec<Point2> = vertices.iter().map(|v| v.point).collect();
    anchors.extend(active.iter().map(|&l| lines[l].foot_of_origin()));
    if anchors.is_empty() {
        anchors.push(Point2::new(0.0, 0.0));
    }
    let (mut lo, mut hi) = (anchors[0], anchors[0]);
    for p in &anchors {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let (lo, hi) = (Point2::new(lo.x - pad, lo.y - pad), Point2::new(hi.x + pad, hi.y + pad));
    let eps = MERGE_TOL * pad.max(1.0);

    let mut polygons = vec![vec![lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)]];
    for &l in &active {
        let mut next = Vec::with_capacity(polygons.len() * 2);
        for poly in polygons {
            match split(&poly, &lines[l], eps) {
                Some((a, b)) => {
                    next.push(a);
                    next.push(b);
                }
                None => next.push(poly),
            }
        }
        polygons = next;
    }

    let on_box = |p: &Point2| {
        (p.x - lo.x).abs() <= eps || (p.x - hi.x).abs() <= eps || (p.y - lo.y).abs() <= eps || (p.y - hi.y).abs() <= eps
    };
    let faces: Vec<Face> = polygons
        .into_iter()
        .map(|polygon| {
            let (_, representative) = polygon_area_centroid(&polygon);
            let bounded = !polygon.iter().any(on_box);
            Face { polygon, bounded, representative, label: None, tied: false }
        })
        .collect();

    let mut arr = Arrangement {
        lines: lines.to_vec(),
        merged_lines,
        vertices,
        edges,
        faces,
        bounds: [lo, hi],
        face_index: HashMap::new(),
    };
    let index =
        arr.faces.iter().enumerate().filter_map(|(k, f)| arr.sign_vector(f.representative).map(|s| (s, k))).collect();
    arr.face_index = index;
    arr
}

/// Pair maximizing the view angle at `v` over every site pair, with the
/// lexicographically smallest pair winning ties. The flag reports a tie.
pub fn widest_pair(sites: &[Point2], v: Point2) -> Option<(SitePair, bool)> {
    let spec = DistanceSpec::new(DistanceKind::ViewAngle);
    let values: Vec<(SitePair, f64)> = SitePair::all(sites.len())
        .into_iter()
        .filter_map(|p| eval_unchecked(spec, v, sites[p.i], sites[p.j]).map(|x| (p, x)))
        .collect();
    let best = values.iter().map(|&(_, x)| x).reduce(f64::max)?;
    let mut tied = values.iter().filter(|&&(_, x)| is_tie(x, best)).map(|&(p, _)| p);
    let winner = tied.next()?;
    Some((winner, tied.next().is_some()))
}

/// Label every face whose representative point lies strictly outside the
/// hull with the widest-angle pair there. Faces inside the hull stay
/// unlabeled.
pub fn label_outer_cells(arr: &Arrangement, sites: &[Point2], hull: &Hull) -> Arrangement {
    let mut out = arr.clone();
    out.faces.par_iter_mut().for_each(|face| {
        face.label = None;
        face.tied = false;
        if hull.side_of(sites, face.representative) == HullSide::Outside {
            if let Some((pair, tied)) = widest_pair(sites, face.representative) {
                face.label = Some(pair);
                face.tied = tied;
            }
        }
    });
    out
}

/// Random points strictly inside a convex face: convex combinations of its
/// polygon vertices pulled toward the representative point.
pub fn interior_samples(face: &Face, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point2> {
    (0..count)
        .map(|_| {
            let weights: Vec<f64> = face.polygon.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            let mut p = Point2::new(0.0, 0.0);
            for (w, v) in weights.iter().zip(&face.polygon) {
                p = p + *v * (w / total);
            }
            let t: f64 = rng.gen_range(0.0..0.9);
            face.representative + (p - face.representative) * t
        })
        .collect()
}

/// Outcome of re-evaluating labeled faces at extra interior points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Consistency {
    pub faces_checked: usize,
    pub samples: usize,
    pub disagreements: usize,
}

/// Check that `samples_per_face` random interior points of every labeled
/// face see the face's label as their widest pair.
pub fn check_label_consistency(arr: &Arrangement, sites: &[Point2], samples_per_face: usize, seed: u64) -> Consistency {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Consistency::default();
    for face in &arr.faces {
        let Some(label) = face.label else {
            continue;
        };
        out.faces_checked += 1;
        for v in interior_samples(face, samples_per_face, &mut rng) {
            out.samples += 1;
            if widest_pair(sites, v).map(|(p, _)| p) != Some(label) {
                out.disagreements += 1;
            }
        }
    }
    out
}
