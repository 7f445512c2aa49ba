//! Exact plane vectors and angle comparisons.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{Rational, RationalString};

/// A vector of the plane with rational coordinates, serialized as `["x", "y"]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(RationalString, RationalString)", into = "(RationalString, RationalString)")]
pub struct Vector {
    pub x: Rational,
    pub y: Rational,
}

impl From<(RationalString, RationalString)> for Vector {
    fn from((x, y): (RationalString, RationalString)) -> Self {
        Vector { x: x.0, y: y.0 }
    }
}

impl From<Vector> for (RationalString, RationalString) {
    fn from(v: Vector) -> Self {
        (RationalString(v.x), RationalString(v.y))
    }
}

impl Vector {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vector { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Vector::new(crate::exact::rat(x), crate::exact::rat(y))
    }

    pub fn cross(&self, other: &Vector) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &Vector) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Rotation by a quarter turn counterclockwise.
    pub fn left_normal(&self) -> Vector {
        Vector::new(-self.y.clone(), self.x.clone())
    }

    pub fn lerp(&self, other: &Vector, t: &Rational) -> Vector {
        self + &(&(other - self) * t)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

impl std::fmt::Display for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use crate::exact::format_rational;
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl<'a> Add<&'a Vector> for &'a Vector {
    type Output = Vector;
    fn add(self, o: &Vector) -> Vector {
        Vector::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Vector> for &'a Vector {
    type Output = Vector;
    fn sub(self, o: &Vector) -> Vector {
        Vector::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl<'a> Mul<&'a Rational> for &'a Vector {
    type Output = Vector;
    fn mul(self, t: &Rational) -> Vector {
        Vector::new(&self.x * t, &self.y * t)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector::new(-self.x.clone(), -self.y.clone())
    }
}

/// Half-turn class of the counterclockwise angle from `from` to `to`: 0 for angle zero, 1 for
/// `(0, π)`, 2 for `π`, 3 for `(π, 2π)`.
fn half_class(from: &Vector, to: &Vector) -> u8 {
    let c = from.cross(to);
    if c.is_zero() {
        if from.dot(to).is_positive() {
            0
        } else {
            2
        }
    } else if c.is_positive() {
        1
    } else {
        3
    }
}

/// Compares the counterclockwise angles in `[0, 2π)` from `from` to `u` and to `v`.
pub fn compare_angles(from: &Vector, u: &Vector, v: &Vector) -> Ordering {
    let (hu, hv) = (half_class(from, u), half_class(from, v));
    match hu.cmp(&hv) {
        Ordering::Equal if hu == 1 || hu == 3 => {
            let c = u.cross(v);
            if c.is_zero() {
                Ordering::Equal
            } else if c.is_positive() {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        other => other,
    }
}

/// Whether `r` lies in the half-open counterclockwise sector `[start, end)`; `start = end` is the
/// empty sector.
pub fn in_sector_closed_open(start: &Vector, end: &Vector, r: &Vector) -> bool {
    compare_angles(start, r, end) == Ordering::Less
}

/// Whether `r` lies in the half-open counterclockwise sector `(start, end]`.
pub fn in_sector_open_closed(start: &Vector, end: &Vector, r: &Vector) -> bool {
    half_class(start, r) != 0 && compare_angles(start, r, end) != Ordering::Greater
}

/// Signed number of times a direction turning by less than a half turn from `from` to `to`
/// passes the reference direction `r`. `None` for a reversal.
pub fn signed_passages(from: &Vector, to: &Vector, r: &Vector) -> Option<i64> {
    let c = from.cross(to);
    if c.is_zero() {
        return if from.dot(to).is_positive() { Some(0) } else { None };
    }
    if c.is_positive() {
        Some(i64::from(in_sector_open_closed(from, to, r)))
    } else {
        Some(-i64::from(in_sector_open_closed(to, from, r)))
    }
}

/// Twice the signed area of a closed polygon.
pub fn doubled_area(points: &[Vector]) -> Rational {
    let n = points.len();
    (0..n).fold(Rational::zero(), |acc, i| acc + points[i].cross(&points[(i + 1) % n]))
}

fn orientation(a: &Vector, b: &Vector, c: &Vector) -> i8 {
    let v = (b - a).cross(&(c - a));
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

fn on_segment(a: &Vector, b: &Vector, p: &Vector) -> bool {
    orientation(a, b, p) == 0
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_meet(a: &Vector, b: &Vector, c: &Vector, d: &Vector) -> bool {
    let (o1, o2, o3, o4) = (
        orientation(a, b, c),
        orientation(a, b, d),
        orientation(c, d, a),
        orientation(c, d, b),
    );
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Point in the closed triangle `(a, b, c)`, which is counterclockwise.
pub fn in_closed_triangle(a: &Vector, b: &Vector, c: &Vector, p: &Vector) -> bool {
    orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0
}

/// Simple polygon test: non-adjacent edges are disjoint and adjacent ones meet only at their
/// shared vertex.
pub fn is_simple(points: &[Vector]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&points[i], &points[(i + 1) % n]);
            let (c, d) = (&points[j], &points[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Edges (p, q) and (q, r) meeting at q overlap exactly when they fold back.
                let (p, q, r) = if j == i + 1 { (a, b, d) } else { (c, a, b) };
                if on_segment(p, q, r) || on_segment(q, r, p) {
                    return false;
                }
            } else if segments_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}
