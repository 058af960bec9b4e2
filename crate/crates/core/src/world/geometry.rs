//! Planar geometry: polylines with arc-length projection and oriented
//! rectangles for vehicle footprints.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl std::ops::Add for Point {
    type Output = Point;

    fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

/// Foot point of a projection onto a polyline.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    /// Arc length of the foot point from the start of the polyline.
    pub s: f64,
    /// Signed lateral offset: positive to the left of the travel direction.
    pub lateral: f64,
    /// Unit tangent of the segment the foot point lies on.
    pub tangent: Point,
}

/// A polyline with precomputed cumulative arc length. At least two points,
/// consecutive points distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolylineError {
    #[error("polyline needs at least 2 points, got {0}")]
    TooShort(usize),
    #[error("polyline has zero-length segment at index {0}")]
    ZeroLengthSegment(usize),
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self, PolylineError> {
        if points.len() < 2 {
            return Err(PolylineError::TooShort(points.len()));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        cumulative.push(0.0);
        for (i, pair) in points.windows(2).enumerate() {
            let step = pair[0].distance(pair[1]);
            if step <= 0.0 {
                return Err(PolylineError::ZeroLengthSegment(i));
            }
            cumulative.push(cumulative[i] + step);
        }
        Ok(Polyline { points, cumulative })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Closest point on the polyline. Ties between segments resolve to the
    /// smaller arc length, making the projection deterministic.
    pub fn project(&self, p: Point) -> Projection {
        let mut best: Option<(f64, Projection)> = None;
        for (i, pair) in self.points.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let seg = b - a;
            let seg_len = seg.norm();
            let t = ((p - a).dot(seg) / (seg_len * seg_len)).clamp(0.0, 1.0);
            let foot = a + seg.scale(t);
            let dist = p.distance(foot);
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                let tangent = seg.scale(1.0 / seg_len);
                let lateral_sign = tangent.cross(p - foot);
                best = Some((
                    dist,
                    Projection {
                        s: self.cumulative[i] + t * seg_len,
                        lateral: if lateral_sign < 0.0 { -dist } else { dist },
                        tangent,
                    },
                ));
            }
        }
        best.unwrap().1
    }

    /// Point at arc length `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Point {
        if s <= 0.0 {
            return self.points[0];
        }
        for (i, pair) in self.points.windows(2).enumerate() {
            if s <= self.cumulative[i + 1] {
                let seg = pair[1] - pair[0];
                let t = (s - self.cumulative[i]) / (self.cumulative[i + 1] - self.cumulative[i]);
                return pair[0] + seg.scale(t);
            }
        }
        *self.points.last().unwrap()
    }
}

/// Oriented rectangle: a vehicle footprint.
#[derive(Debug, Clone, Copy)]
pub struct Obb {
    pub center: Point,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl Obb {
    pub fn corners(&self) -> [Point; 4] {
        let axis = Point::new(self.heading.cos(), self.heading.sin());
        let ortho = Point::new(-axis.y, axis.x);
        let dx = axis.scale(self.length / 2.0);
        let dy = ortho.scale(self.width / 2.0);
        [
            ((self.center + dx) + dy),
            ((self.center + dx) - dy),
            ((self.center - dx) - dy),
            (self.center - dx) + dy,
        ]
    }

    /// Separating-axis intersection test against another oriented rectangle.
    pub fn overlaps(&self, other: &Obb) -> bool {
        let axes = [
            Point::new(self.heading.cos(), self.heading.sin()),
            Point::new(-self.heading.sin(), self.heading.cos()),
            Point::new(other.heading.cos(), other.heading.sin()),
            Point::new(-other.heading.sin(), other.heading.cos()),
        ];
        let mine = self.corners();
        let theirs = other.corners();
        for axis in axes {
            let (min_a, max_a) = project_onto(&mine, axis);
            let (min_b, max_b) = project_onto(&theirs, axis);
            if max_a < min_b || max_b < min_a {
                return false;
            }
        }
        true
    }
}

fn project_onto(corners: &[Point; 4], axis: Point) -> (f64, f64) {
    let mut min = corners[0].dot(axis);
    let mut max = min;
    for corner in &corners[1..] {
        let p = corner.dot(axis);
        min = min.min(p);
        max = max.max(p);
    }
    (min, max)
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}
