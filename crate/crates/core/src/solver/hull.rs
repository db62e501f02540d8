//! Exact planar convex hulls over the rationals.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::scalar::Rational;

pub type Point = [Rational; 2];

/// Twice the signed area of `(a, b, c)`; positive for a left turn.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// `p` on the closed segment `[a, b]`.
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if !orient(a, b, p).is_zero() {
        return false;
    }
    let within = |i: usize| {
        let (lo, hi) = if a[i] <= b[i] { (&a[i], &b[i]) } else { (&b[i], &a[i]) };
        lo <= &p[i] && &p[i] <= hi
    };
    within(0) && within(1)
}

/// Strict corners of the convex hull, counter-clockwise from the
/// lexicographically smallest point. Collinear points are dropped, so a
/// segment gives its two ends and a single point gives itself.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].cmp(&b[0]).then_with(|| a[1].cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Closed containment in a hull returned by [`convex_hull`].
pub fn hull_contains(hull: &[Point], p: &Point) -> bool {
    match hull.len() {
        0 => false,
        1 => &hull[0] == p,
        2 => on_segment(&hull[0], &hull[1], p),
        n => (0..n).all(|i| !orient(&hull[i], &hull[(i + 1) % n], p).is_negative()),
    }
}

/// Lexicographic order on points, for canonical output.
pub fn point_cmp(a: &Point, b: &Point) -> Ordering {
    a[0].cmp(&b[0]).then_with(|| a[1].cmp(&b[1]))
}
