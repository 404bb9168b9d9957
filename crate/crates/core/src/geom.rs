//! Planar primitives: points, orientation, circles through and around three
//! points, triangle measures.
//!
//! Orientation and the in-circle test go through adaptive exact arithmetic;
//! metric quantities are plain `f64`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// A site or query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dist2(self, other: Point2) -> f64 {
        (self - other).norm2()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// A circle. An infinite radius with no center encodes the degenerate
/// "circle" through three collinear points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Option<Point2>,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        Circle { center: Some(center), radius }
    }

    pub fn degenerate() -> Self {
        Circle { center: None, radius: f64::INFINITY }
    }

    pub fn is_degenerate(&self) -> bool {
        self.center.is_none()
    }

    /// Circle having segment `ab` as a diameter.
    pub fn with_diameter(a: Point2, b: Point2) -> Self {
        Circle::new(a.midpoint(b), 0.5 * a.dist(b))
    }
}

/// Twice the signed area of `abc`, evaluated adaptively so that the sign is
/// exact. Positive for counterclockwise triples.
pub fn orient_value(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

pub fn orient(a: Point2, b: Point2, c: Point2) -> Orientation {
    let det = orient_value(a, b, c);
    if det > 0.0 {
        Orientation::CounterClockwise
    } else if det < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Exact in-circle determinant: positive when `d` lies inside the circle
/// through the counterclockwise triple `a, b, c`.
pub fn incircle_value(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    robust::incircle(a.coord(), b.coord(), c.coord(), d.coord())
}

pub fn circumcircle(p: Point2, q: Point2, r: Point2) -> Result<Circle> {
    if p == q || q == r || p == r {
        return Err(GeomError::DuplicatePoint);
    }
    match circumcenter(p, q, r) {
        Some(center) => Ok(Circle::new(center, center.dist(p))),
        None => Ok(Circle::degenerate()),
    }
}

/// Center of the circle through three points, `None` when they are collinear.
/// Computed relative to `p` to limit cancellation.
pub fn circumcenter(p: Point2, q: Point2, r: Point2) -> Option<Point2> {
    let det = orient_value(p, q, r);
    if det == 0.0 {
        return None;
    }
    let b = q - p;
    let c = r - p;
    let b2 = b.norm2();
    let c2 = c.norm2();
    let d = 2.0 * det;
    let ux = (c.y * b2 - b.y * c2) / d;
    let uy = (b.x * c2 - c.x * b2) / d;
    Some(Point2::new(p.x + ux, p.y + uy))
}

/// Relative slack used to decide whether the longest side makes the triangle
/// obtuse. Near-right triangles fall back to the circumcircle.
const OBTUSE_REL_TOL: f64 = 1e-9;

/// Smallest circle containing the three points.
pub fn min_enclosing_circle_3(p: Point2, q: Point2, r: Point2) -> Result<Circle> {
    if p == q && q == r {
        return Err(GeomError::AllCoincident);
    }
    let sides = [(p, q, r.dist2(p) + r.dist2(q)), (q, r, p.dist2(q) + p.dist2(r)), (r, p, q.dist2(r) + q.dist2(p))];
    let (mut a, mut b, mut others) = sides[0];
    let mut longest = a.dist2(b);
    for &(s, t, o) in &sides[1..] {
        let len = s.dist2(t);
        if len > longest {
            longest = len;
            a = s;
            b = t;
            others = o;
        }
    }
    let collinear = orient(p, q, r) == Orientation::Collinear;
    if collinear || longest - others > OBTUSE_REL_TOL * longest {
        return Ok(Circle::with_diameter(a, b));
    }
    // acute or right: the circumcircle is finite here
    circumcircle(p, q, r)
}

pub fn triangle_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * orient_value(a, b, c).abs()
}

pub fn point_segment_distance(x: Point2, a: Point2, b: Point2) -> Result<f64> {
    if a == b {
        return Err(GeomError::DegenerateSegment);
    }
    let ab = b - a;
    let t = ((x - a).dot(ab) / ab.norm2()).clamp(0.0, 1.0);
    Ok(x.dist(a + ab * t))
}

/// Euclidean distance from `x` to the infinite line through `a` and `b`.
pub fn point_line_distance(x: Point2, a: Point2, b: Point2) -> f64 {
    orient_value(a, b, x).abs() / a.dist(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)), Orientation::CounterClockwise);
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)), Orientation::Collinear);
        assert_eq!(orient(pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 0.0)), Orientation::Clockwise);
    }

    #[test]
    fn orientation_is_exact_near_degeneracy() {
        // classic failure case for naive floating point evaluation
        let a = pt(0.5, 0.5);
        let b = pt(12.0, 12.0);
        let c = pt(24.0, 24.0);
        assert_eq!(orient(a, b, c), Orientation::Collinear);
        let c2 = pt(24.0, 24.000000000000004);
        assert_eq!(orient(a, b, c2), Orientation::CounterClockwise);
    }

    #[test]
    fn circumcircle_examples() {
        let c = circumcircle(pt(0.0, 0.0), pt(3.0, 0.0), pt(0.0, 4.0)).unwrap();
        let center = c.center.unwrap();
        assert!((center.x - 1.5).abs() < 1e-15 && (center.y - 2.0).abs() < 1e-15);
        assert!((c.radius - 2.5).abs() < 1e-15);

        let c = circumcircle(pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, SQRT3)).unwrap();
        let center = c.center.unwrap();
        assert!((center.x - 1.0).abs() < 1e-15);
        assert!((center.y - 1.0 / SQRT3).abs() < 1e-15);
        assert!((c.radius - 2.0 / SQRT3).abs() < 1e-15);

        let c = circumcircle(pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)).unwrap();
        assert!(c.is_degenerate());
        assert_eq!(c.radius, f64::INFINITY);

        assert_eq!(circumcircle(pt(0.0, 0.0), pt(0.0, 0.0), pt(1.0, 0.0)), Err(GeomError::DuplicatePoint));
    }

    #[test]
    fn min_enclosing_examples() {
        let c = min_enclosing_circle_3(pt(0.0, 0.0), pt(3.0, 0.0), pt(0.0, 4.0)).unwrap();
        assert!((c.radius - 2.5).abs() < 1e-15);

        let c = min_enclosing_circle_3(pt(0.0, 0.0), pt(4.0, 0.0), pt(1.0, 0.5)).unwrap();
        assert_eq!(c.center, Some(pt(2.0, 0.0)));
        assert_eq!(c.radius, 2.0);

        let c = min_enclosing_circle_3(pt(0.0, 0.0), pt(0.0, 0.0), pt(2.0, 0.0)).unwrap();
        assert_eq!(c.center, Some(pt(1.0, 0.0)));
        assert_eq!(c.radius, 1.0);

        let c = min_enclosing_circle_3(pt(0.0, 0.0), pt(3.0, 0.0), pt(1.0, 0.0)).unwrap();
        assert_eq!(c.center, Some(pt(1.5, 0.0)));
        assert_eq!(c.radius, 1.5);

        assert_eq!(min_enclosing_circle_3(pt(1.0, 1.0), pt(1.0, 1.0), pt(1.0, 1.0)), Err(GeomError::AllCoincident));
    }

    #[test]
    fn area_examples() {
        assert_eq!(triangle_area(pt(0.0, 0.0), pt(3.0, 0.0), pt(0.0, 4.0)), 6.0);
        assert_eq!(triangle_area(pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)), 0.0);
        assert!((triangle_area(pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, SQRT3)) - SQRT3).abs() < 1e-15);
    }

    #[test]
    fn segment_distance_examples() {
        let d = point_segment_distance(pt(1.5, 2.0), pt(3.0, 0.0), pt(0.0, 4.0)).unwrap();
        assert!(d.abs() < 1e-15);
        assert_eq!(point_segment_distance(pt(0.0, 1.0), pt(0.0, 0.0), pt(1.0, 0.0)).unwrap(), 1.0);
        let d = point_segment_distance(pt(2.0, 1.0), pt(0.0, 0.0), pt(1.0, 0.0)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(point_segment_distance(pt(2.0, 1.0), pt(1.0, 1.0), pt(1.0, 1.0)), Err(GeomError::DegenerateSegment));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0..100.0f64
    }

    fn point() -> impl Strategy<Value = Point2> {
        (coord(), coord()).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn orient_antisymmetric_and_cyclic(a in point(), b in point(), c in point()) {
            let o = orient(a, b, c);
            prop_assert_eq!(orient(b, a, c), o.reversed());
            prop_assert_eq!(orient(a, c, b), o.reversed());
            prop_assert_eq!(orient(c, b, a), o.reversed());
            prop_assert_eq!(orient(b, c, a), o);
            prop_assert_eq!(orient(c, a, b), o);
        }

        #[test]
        fn circumcircle_passes_through_inputs(a in point(), b in point(), c in point()) {
            prop_assume!(a != b && b != c && a != c);
            let circle = circumcircle(a, b, c).unwrap();
            if let Some(center) = circle.center {
                // skip nearly flat triangles where the radius explodes
                prop_assume!(circle.radius < 1e6);
                for p in [a, b, c] {
                    let d = center.dist(p);
                    prop_assert!((d - circle.radius).abs() <= 1e-9 * circle.radius.max(1.0));
                }
            }
        }

        #[test]
        fn enclosing_circle_contains_inputs(a in point(), b in point(), c in point()) {
            prop_assume!(!(a == b && b == c));
            let mec = min_enclosing_circle_3(a, b, c).unwrap();
            let center = mec.center.unwrap();
            for p in [a, b, c] {
                prop_assert!(center.dist(p) <= mec.radius * (1.0 + 1e-12) + 1e-12);
            }
            if a != b && b != c && a != c {
                let cc = circumcircle(a, b, c).unwrap();
                prop_assert!(mec.radius <= cc.radius * (1.0 + 1e-12));
            }
        }

        #[test]
        fn enclosing_circle_ignores_non_defining_point(a in point(), b in point(), t in 0.05..0.95f64, s in -0.3..0.3f64) {
            prop_assume!(a.dist(b) > 1e-3);
            // a point well inside the diameter disk of ab never changes the result
            let mid = a.midpoint(b);
            let dir = b - a;
            let normal = Point2::new(-dir.y, dir.x);
            let inner = mid + dir * (t - 0.5) * 0.9 + normal * s * 0.5;
            let with = min_enclosing_circle_3(a, b, inner).unwrap();
            let without = Circle::with_diameter(a, b);
            prop_assert_eq!(with.center, without.center);
            prop_assert_eq!(with.radius, without.radius);
        }

        #[test]
        fn segment_distance_bounds(x in point(), a in point(), b in point()) {
            prop_assume!(a != b);
            let d = point_segment_distance(x, a, b).unwrap();
            prop_assert!(d <= x.dist(a).min(x.dist(b)) + 1e-12);
            let ab = b - a;
            let t = (x - a).dot(ab) / ab.norm2();
            if (0.0..=1.0).contains(&t) {
                let line = point_line_distance(x, a, b);
                prop_assert!((d - line).abs() <= 1e-9 * (1.0 + d));
            }
        }
    }
}
