//! The eight two-site distance functions.
//!
//! Every function takes a query point `v` and an unordered site pair `(p, q)`.
//! Values live in `[0, +inf]`; a few kinds are undefined when `v` coincides
//! with one of the sites.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geom::{circumcenter, min_enclosing_circle_3, orient_value, point_segment_distance, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceKind {
    /// Radius of the circle through `v, p, q`.
    Circumradius,
    /// Radius of the smallest circle containing `v, p, q`.
    ContainingRadius,
    /// The angle `pvq`.
    ViewAngle,
    /// Radius of the circle inscribed in triangle `vpq`.
    InscribedRadius,
    /// Distance from the circumcenter of `vpq` to segment `pq`.
    CccSegmentDist,
    /// Area of the triangle formed by the circumcenter of `vpq`, `p` and `q`.
    CccArea,
    /// Perimeter of the triangle formed by the circumcenter of `vpq`, `p` and `q`.
    CccPerimeter,
    /// `|vp| + |vq| + c |pq|` with `c >= -1`.
    ParamPerimeter,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 8] = [
        DistanceKind::Circumradius,
        DistanceKind::ContainingRadius,
        DistanceKind::ViewAngle,
        DistanceKind::InscribedRadius,
        DistanceKind::CccSegmentDist,
        DistanceKind::CccArea,
        DistanceKind::CccPerimeter,
        DistanceKind::ParamPerimeter,
    ];

    /// Command-line name of the kind.
    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Circumradius => "circumradius",
            DistanceKind::ContainingRadius => "containing",
            DistanceKind::ViewAngle => "viewangle",
            DistanceKind::InscribedRadius => "inradius",
            DistanceKind::CccSegmentDist => "ccc-dist",
            DistanceKind::CccArea => "ccc-area",
            DistanceKind::CccPerimeter => "ccc-perimeter",
            DistanceKind::ParamPerimeter => "param-perimeter",
        }
    }

    pub fn takes_parameter(self) -> bool {
        self == DistanceKind::ParamPerimeter
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GeomError::InvalidParameter(format!("unknown distance kind `{s}`")))
    }
}

/// A distance kind together with its parameter. `c` is only read for
/// [`DistanceKind::ParamPerimeter`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpec {
    pub kind: DistanceKind,
    pub c: f64,
}

impl DistanceSpec {
    pub fn new(kind: DistanceKind) -> Self {
        DistanceSpec { kind, c: 0.0 }
    }

    pub fn param_perimeter(c: f64) -> Result<Self> {
        DistanceSpec::with_parameter(DistanceKind::ParamPerimeter, c)
    }

    pub fn with_parameter(kind: DistanceKind, c: f64) -> Result<Self> {
        let spec = DistanceSpec { kind, c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.takes_parameter() && !(self.c >= -1.0 && self.c.is_finite()) {
            return Err(GeomError::InvalidParameter(format!("parameter c must be finite and >= -1, got {}", self.c)));
        }
        Ok(())
    }

    /// Parameter actually in effect, `None` for kinds that ignore it.
    pub fn parameter(&self) -> Option<f64> {
        self.kind.takes_parameter().then_some(self.c)
    }
}

impl fmt::Display for DistanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(c) => write!(f, "{}(c={})", self.kind, c),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceValue {
    Defined(f64),
    /// `v` sits on a singular point of the function.
    Undefined,
}

impl DistanceValue {
    pub fn value(self) -> Option<f64> {
        match self {
            DistanceValue::Defined(v) => Some(v),
            DistanceValue::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, DistanceValue::Defined(_))
    }
}

impl From<Option<f64>> for DistanceValue {
    fn from(v: Option<f64>) -> Self {
        v.map_or(DistanceValue::Undefined, DistanceValue::Defined)
    }
}

/// Unordered pair of site indices, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SitePair {
    pub i: usize,
    pub j: usize,
}

impl SitePair {
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a site pair needs two distinct indices");
        SitePair { i: a.min(b), j: a.max(b) }
    }

    pub fn contains(self, k: usize) -> bool {
        self.i == k || self.j == k
    }

    /// All `n (n - 1) / 2` pairs in lexicographic order.
    pub fn all(n: usize) -> Vec<SitePair> {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pairs.push(SitePair { i, j });
            }
        }
        pairs
    }
}

impl fmt::Display for SitePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Evaluate `spec` at `v` for the site pair `(p, q)`.
pub fn eval(spec: DistanceSpec, v: Point2, p: Point2, q: Point2) -> Result<DistanceValue> {
    if p == q {
        return Err(GeomError::CoincidentSites);
    }
    Ok(eval_unchecked(spec, v, p, q).into())
}

/// [`eval`] without the coincident-site check. `p != q` is assumed.
#[inline]
pub fn eval_unchecked(spec: DistanceSpec, v: Point2, p: Point2, q: Point2) -> Option<f64> {
    let at_site = v == p || v == q;
    match spec.kind {
        DistanceKind::Circumradius => {
            if at_site {
                return None;
            }
            Some(circumradius(v, p, q))
        }
        DistanceKind::ContainingRadius => min_enclosing_circle_3(v, p, q).ok().map(|c| c.radius),
        DistanceKind::ViewAngle => {
            if at_site {
                return None;
            }
            Some(view_angle(v, p, q))
        }
        DistanceKind::InscribedRadius => {
            let twice_area = orient_value(v, p, q).abs();
            if twice_area == 0.0 {
                return Some(0.0);
            }
            Some(twice_area / (v.dist(p) + v.dist(q) + p.dist(q)))
        }
        DistanceKind::CccSegmentDist | DistanceKind::CccArea | DistanceKind::CccPerimeter => {
            if at_site {
                return None;
            }
            let Some(o) = circumcenter(v, p, q) else {
                return Some(f64::INFINITY);
            };
            Some(match spec.kind {
                DistanceKind::CccSegmentDist => point_segment_distance(o, p, q).unwrap_or(0.0),
                DistanceKind::CccArea => 0.5 * orient_value(o, p, q).abs(),
                _ => o.dist(p) + o.dist(q) + p.dist(q),
            })
        }
        DistanceKind::ParamPerimeter => Some((v.dist(p) + v.dist(q) + spec.c * p.dist(q)).max(0.0)),
    }
}

/// `|vp| |vq| |pq| / (4 area)`, infinite for collinear triples.
fn circumradius(v: Point2, p: Point2, q: Point2) -> f64 {
    let det = orient_value(v, p, q);
    if det == 0.0 {
        return f64::INFINITY;
    }
    (v.dist2(p) * v.dist2(q) * p.dist2(q)).sqrt() / (2.0 * det.abs())
}

/// Cosine of the angle `pvq` by the law of cosines, clamped to `[-1, 1]`.
/// Undefined at the sites.
pub fn view_angle_cos(v: Point2, p: Point2, q: Point2) -> Option<f64> {
    if v == p || v == q {
        return None;
    }
    let a2 = v.dist2(p);
    let b2 = v.dist2(q);
    let c2 = p.dist2(q);
    Some(((a2 + b2 - c2) / (2.0 * (a2 * b2).sqrt())).clamp(-1.0, 1.0))
}

fn view_angle(v: Point2, p: Point2, q: Point2) -> f64 {
    if orient_value(v, p, q) == 0.0 {
        // on the line pq: pi inside the segment, 0 beyond it
        return if (p - v).dot(q - v) < 0.0 { std::f64::consts::PI } else { 0.0 };
    }
    view_angle_cos(v, p, q).map_or(0.0, f64::acos)
}
