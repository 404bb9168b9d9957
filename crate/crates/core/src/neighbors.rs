//! Exact combinatorial structures over a site set: convex hull, Delaunay
//! triangulation and antipodal hull vertex pairs.

use std::collections::{BTreeSet, HashSet};

use crate::distances::SitePair;
use crate::error::{GeomError, Result};
use crate::geom::{incircle_value, orient, orient_value, Orientation, Point2};

/// Convex hull as counterclockwise site indices, without collinear vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    pub vertices: Vec<usize>,
}

/// Where a point lies relative to a hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullSide {
    Inside,
    Boundary,
    Outside,
}

impl Hull {
    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    /// Hull edges as `(from, to)` site indices in counterclockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |t| (self.vertices[t], self.vertices[(t + 1) % k]))
    }

    pub fn points(&self, sites: &[Point2]) -> Vec<Point2> {
        self.vertices.iter().map(|&i| sites[i]).collect()
    }

    pub fn side_of(&self, sites: &[Point2], x: Point2) -> HullSide {
        let mut on_line = false;
        for (a, b) in self.edges() {
            match orient(sites[a], sites[b], x) {
                Orientation::Clockwise => return HullSide::Outside,
                Orientation::Collinear => on_line = true,
                Orientation::CounterClockwise => {}
            }
        }
        if on_line {
            HullSide::Boundary
        } else {
            HullSide::Inside
        }
    }
}

fn check_sites(sites: &[Point2]) -> Result<()> {
    if sites.len() < 3 {
        return Err(GeomError::DegenerateInput(format!("need at least 3 sites, got {}", sites.len())));
    }
    if let Some(bad) = sites.iter().find(|p| !p.is_finite()) {
        return Err(GeomError::DegenerateInput(format!("non-finite site {bad:?}")));
    }
    Ok(())
}

/// Andrew's monotone chain over exact orientation.
pub fn convex_hull(sites: &[Point2]) -> Result<Hull> {
    check_sites(sites)?;
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (sites[a], sites[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
    });
    order.dedup_by(|a, b| sites[*a] == sites[*b]);

    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(order.iter()) } else { Box::new(order.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if orient_value(sites[a], sites[b], sites[i]) > 0.0 {
                    break;
                }
                hull.pop();
            }
            hull.push(i);
        }
        // the last point of each chain starts the other one
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(GeomError::DegenerateInput("all sites are collinear".into()));
    }
    Ok(Hull { vertices: hull })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub edges: BTreeSet<SitePair>,
    /// Counterclockwise index triples, sorted.
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn has_edge(&self, pair: SitePair) -> bool {
        self.edges.contains(&pair)
    }
}

const GHOST: usize = usize::MAX;

/// Exact in-circle test with ties broken by symbolic perturbation of the
/// lifted coordinates. Lower site indices receive larger perturbations.
/// `a, b, c` must be counterclockwise. Never returns zero.
fn incircle_sos(sites: &[Point2], a: usize, b: usize, c: usize, d: usize) -> f64 {
    let (pa, pb, pc, pd) = (sites[a], sites[b], sites[c], sites[d]);
    let det = incircle_value(pa, pb, pc, pd);
    if det != 0.0 {
        return det;
    }
    let mut ranked = [a, b, c, d];
    ranked.sort_unstable();
    for k in ranked {
        let partial = if k == d {
            -orient_value(pa, pb, pc)
        } else if k == a {
            orient_value(pd, pb, pc)
        } else if k == b {
            orient_value(pa, pd, pc)
        } else {
            orient_value(pa, pb, pd)
        };
        if partial != 0.0 {
            return partial;
        }
    }
    unreachable!("four distinct cocircular points cannot contain a collinear triple")
}

fn in_conflict(sites: &[Point2], tri: [usize; 3], p: usize) -> bool {
    if tri[2] == GHOST {
        let (a, b, x) = (sites[tri[0]], sites[tri[1]], sites[p]);
        let o = orient_value(a, b, x);
        o > 0.0 || (o == 0.0 && (x - a).dot(x - b) < 0.0)
    } else {
        incircle_sos(sites, tri[0], tri[1], tri[2], p) > 0.0
    }
}

/// Delaunay triangulation by incremental Bowyer-Watson insertion with ghost
/// triangles on the hull. Cocircular ties are resolved deterministically.
pub fn delaunay(sites: &[Point2]) -> Result<Triangulation> {
    check_sites(sites)?;
    let mut seen = HashSet::with_capacity(sites.len());
    for p in sites {
        if !seen.insert((p.x.to_bits(), p.y.to_bits())) {
            return Err(GeomError::DuplicatePoint);
        }
    }
    let Some(c) = (2..sites.len()).find(|&c| orient_value(sites[0], sites[1], sites[c]) != 0.0) else {
        return Err(GeomError::DegenerateInput("all sites are collinear".into()));
    };
    let (a, b) = if orient_value(sites[0], sites[1], sites[c]) > 0.0 { (0, 1) } else { (1, 0) };
    let mut tris: Vec<[usize; 3]> = vec![[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]];

    for p in (2..sites.len()).filter(|&i| i != c) {
        let (conflict, keep): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            tris.into_iter().partition(|&t| in_conflict(sites, t, p));
        let directed: HashSet<(usize, usize)> =
            conflict.iter().flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]).collect();
        tris = keep;
        for t in &conflict {
            for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                if directed.contains(&(v, u)) {
                    continue;
                }
                tris.push(if v == GHOST {
                    [p, u, GHOST]
                } else if u == GHOST {
                    [v, p, GHOST]
                } else {
                    [u, v, p]
                });
            }
        }
    }

    let mut triangles: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| t[2] != GHOST)
        .map(|t| {
            // rotate so the smallest index leads, keeping orientation
            let m = (0..3).min_by_key(|&k| t[k]).unwrap();
            [t[m], t[(m + 1) % 3], t[(m + 2) % 3]]
        })
        .collect();
    triangles.sort_unstable();
    let edges = triangles
        .iter()
        .flat_map(|t| [SitePair::new(t[0], t[1]), SitePair::new(t[1], t[2]), SitePair::new(t[0], t[2])])
        .collect();
    Ok(Triangulation { edges, triangles })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntipodalPairs {
    pub pairs: BTreeSet<SitePair>,
}

impl AntipodalPairs {
    pub fn contains(&self, pair: SitePair) -> bool {
        self.pairs.contains(&pair)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Edges whose directions differ by less than this sine count as parallel.
const PARALLEL_REL_TOL: f64 = 1e-10;

/// Rotating calipers: sweep a pair of parallel supporting lines once around
/// the hull, recording every pair of vertices touched simultaneously.
pub fn antipodal_pairs(sites: &[Point2], hull: &Hull) -> AntipodalPairs {
    let pts = hull.points(sites);
    let k = pts.len();
    let mut pairs = BTreeSet::new();
    let idx = |t: usize| hull.vertices[t % k];
    let edge = |t: usize| pts[(t + 1) % k] - pts[t % k];

    // The lower line runs along edge 0; the upper vertex is the farthest from
    // it, taking the later one when an edge is parallel to edge 0.
    let e0 = edge(0);
    let mut j = 1;
    let mut best = f64::NEG_INFINITY;
    for t in 1..k {
        let h = e0.cross(pts[t] - pts[0]);
        if h >= best {
            best = h;
            j = t;
        }
    }
    let mut i = 1;
    let mut advanced = 0;
    while advanced < k {
        pairs.insert(SitePair::new(idx(i), idx(j)));
        let (ei, ej) = (edge(i), edge(j) * -1.0);
        let turn = ei.cross(ej);
        if turn.abs() <= PARALLEL_REL_TOL * ei.norm() * ej.norm() {
            // parallel edges: all four endpoint combinations touch
            pairs.insert(SitePair::new(idx(i), idx(j + 1)));
            pairs.insert(SitePair::new(idx(i + 1), idx(j)));
            i += 1;
            j += 1;
            advanced += 1;
        } else if turn > 0.0 {
            i += 1;
            advanced += 1;
        } else {
            j += 1;
        }
    }
    AntipodalPairs { pairs }
}
