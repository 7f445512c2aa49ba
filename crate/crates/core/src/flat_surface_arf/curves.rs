//! Curves as walks in the dual graph of a triangulation, realized by straight chords.
//!
//! A walk lists the sides through which it leaves successive triangles. Crossings of one side are
//! placed at distinct rational positions, so chords in a triangle meet only at interior transverse
//! points and never at a cone point.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::geometry::{signed_passages, Vector};
use super::triangulation::Triangulation;
use super::SurfaceError;
use crate::exact::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathKind {
    /// A closed curve avoiding the nodes.
    Closed,
    /// A path from the first side of a node to its second side, with tangent limits equal to the
    /// cylinder direction at both ends.
    Admissible { node: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfacePath {
    pub kind: PathKind,
    /// Sides through which the path leaves successive triangles. For an admissible path the last
    /// one is the second side of its node.
    pub exits: Vec<usize>,
}

impl SurfacePath {
    pub fn closed(exits: Vec<usize>) -> Self {
        SurfacePath {
            kind: PathKind::Closed,
            exits,
        }
    }

    pub fn admissible(node: usize, exits: Vec<usize>) -> Self {
        SurfacePath {
            kind: PathKind::Admissible { node },
            exits,
        }
    }

    /// Side through which the path enters the triangle of its `j`-th chord.
    pub fn entry(&self, tri: &Triangulation, j: usize) -> Option<usize> {
        let n = self.exits.len();
        tri.position_partner(self.exits[(j + n - 1) % n])
    }

    pub fn validate(&self, tri: &Triangulation) -> Result<(), SurfaceError> {
        let n = self.exits.len();
        if n == 0 {
            return Err(SurfaceError::InvalidPath("empty walk".into()));
        }
        if let Some(&s) = self.exits.iter().find(|&&s| s >= tri.side_count()) {
            return Err(SurfaceError::InvalidPath(format!("no side {s}")));
        }
        match self.kind {
            PathKind::Closed => {
                if self.exits.iter().any(|&s| tri.partner(s).is_none()) {
                    return Err(SurfaceError::InvalidPath("closed path crosses a node side".into()));
                }
            }
            PathKind::Admissible { node } => {
                if node >= tri.node_count() || self.exits[n - 1] != tri.node_exit_side(node) {
                    return Err(SurfaceError::InvalidPath(format!(
                        "admissible path must end at node {node}"
                    )));
                }
                if self.exits[..n - 1].iter().any(|&s| tri.partner(s).is_none()) {
                    return Err(SurfaceError::InvalidPath(
                        "admissible path crosses a node side midway".into(),
                    ));
                }
            }
        }
        for j in 0..n {
            let entry = self.entry(tri, j).expect("validated sides");
            if entry / 3 != self.exits[j] / 3 {
                return Err(SurfaceError::InvalidPath(format!(
                    "crossing {j} does not continue in the same triangle"
                )));
            }
            if entry == self.exits[j] {
                return Err(SurfaceError::InvalidPath(format!("crossing {j} backtracks")));
            }
        }
        Ok(())
    }

    /// The same closed curve traversed backwards.
    pub fn reversed(&self, tri: &Triangulation) -> Result<SurfacePath, SurfaceError> {
        if self.kind != PathKind::Closed {
            return Err(SurfaceError::InvalidPath("only closed paths are reversed".into()));
        }
        let exits = self
            .exits
            .iter()
            .rev()
            .map(|&s| {
                tri.partner(s)
                    .ok_or_else(|| SurfaceError::InvalidPath("unglued side".into()))
            })
            .collect::<Result<_, _>>()?;
        Ok(SurfacePath::closed(exits))
    }
}

/// Cancels every crossing immediately undone by the next one.
pub fn reduce_walk(tri: &Triangulation, walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for &s in walk {
        match out.last() {
            Some(&last) if tri.partner(last) == Some(s) => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    out
}

/// Reduction of a closed walk up to cyclic rotation.
pub fn reduce_cyclic(tri: &Triangulation, walk: &[usize]) -> Vec<usize> {
    let mut out = reduce_walk(tri, walk);
    let mut start = 0;
    while out.len() - start >= 2 && tri.partner(out[out.len() - 1]) == Some(out[start]) {
        start += 1;
        out.pop();
    }
    out.split_off(start)
}

#[derive(Clone, Debug)]
struct Chord {
    triangle: usize,
    start: Vector,
    end: Vector,
    /// Positions of the endpoints along the triangle boundary, in `[0, 3)`.
    perimeter: (Rational, Rational),
}

/// A set of paths drawn simultaneously, with all crossings of each side at distinct positions.
pub struct Realization<'a> {
    tri: &'a Triangulation,
    paths: Vec<SurfacePath>,
    chords: Vec<Vec<Chord>>,
}

fn strictly_between(x: &Rational, from: &Rational, to: &Rational) -> bool {
    if from < to {
        from < x && x < to
    } else {
        x > from || x < to
    }
}

impl<'a> Realization<'a> {
    pub fn new(tri: &'a Triangulation, paths: &[SurfacePath], reverse_positions: bool) -> Result<Self, SurfaceError> {
        for p in paths {
            p.validate(tri)?;
        }
        let slot = |s: usize| s.min(tri.position_partner(s).expect("validated"));
        let mut passages: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (pi, p) in paths.iter().enumerate() {
            for (j, &s) in p.exits.iter().enumerate() {
                passages.entry(slot(s)).or_default().push((pi, j));
            }
        }
        // Parameter of each passage along its canonical side, measured from the side's start.
        let mut param: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for list in passages.values_mut() {
            if reverse_positions {
                list.reverse();
            }
            let denominator = Rational::from_integer((list.len() + 1).into());
            for (i, &key) in list.iter().enumerate() {
                param.insert(key, Rational::from_integer((i + 1).into()) / &denominator);
            }
        }
        let point_on = |side: usize, key: (usize, usize)| -> (Vector, Rational) {
            let t = &param[&key];
            let t = if side == slot(side) {
                t.clone()
            } else {
                Rational::one() - t
            };
            let (a, b) = tri.side_points(side);
            let perimeter = Rational::from_integer(((side % 3) as i64).into()) + &t;
            (a.lerp(b, &t), perimeter)
        };
        let chords = paths
            .iter()
            .enumerate()
            .map(|(pi, p)| {
                let n = p.exits.len();
                (0..n)
                    .map(|j| {
                        let entry = p.entry(tri, j).expect("validated");
                        let (start, from) = point_on(entry, (pi, (j + n - 1) % n));
                        let (end, to) = point_on(p.exits[j], (pi, j));
                        Chord {
                            triangle: p.exits[j] / 3,
                            start,
                            end,
                            perimeter: (from, to),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Realization {
            tri,
            paths: paths.to_vec(),
            chords,
        })
    }

    pub fn paths(&self) -> &[SurfacePath] {
        &self.paths
    }

    fn direction(c: &Chord) -> Vector {
        &c.end - &c.start
    }

    /// Degree of the Gauss map: signed passages of the tangent direction through a fixed
    /// reference direction.
    pub fn turning_number(&self, path: usize) -> Result<i64, SurfaceError> {
        let reference = Vector::from_ints(1, 0);
        let chords = &self.chords[path];
        let n = chords.len();
        let mut total = 0;
        for j in 0..n {
            let d1 = Self::direction(&chords[j]);
            let d2 = Self::direction(&chords[(j + 1) % n]);
            let at_node = match self.paths[path].kind {
                PathKind::Admissible { node } if j == n - 1 => Some(node),
                _ => None,
            };
            match at_node {
                None => total += signed_passages(&d1, &d2, &reference).ok_or(SurfaceError::Reversal)?,
                Some(node) => {
                    let theta = self.tri.node_direction(node);
                    if !(d1.dot(theta).is_positive() && d2.dot(theta).is_positive()) {
                        return Err(SurfaceError::InvalidPath(
                            "tangent limit at the node is undefined".into(),
                        ));
                    }
                    total += signed_passages(&d1, theta, &reference).ok_or(SurfaceError::Reversal)?;
                    total += signed_passages(theta, &d2, &reference).ok_or(SurfaceError::Reversal)?;
                }
            }
        }
        Ok(total)
    }

    fn crossing(a: &Chord, b: &Chord) -> i64 {
        if a.triangle != b.triangle {
            return 0;
        }
        let (from, to) = &a.perimeter;
        let inside = strictly_between(&b.perimeter.0, from, to) != strictly_between(&b.perimeter.1, from, to);
        if !inside {
            return 0;
        }
        let c = Self::direction(a).cross(&Self::direction(b));
        if c.is_zero() {
            0
        } else if c.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Number of transverse double points of one path.
    pub fn self_crossings(&self, path: usize) -> u64 {
        let chords = &self.chords[path];
        let mut count = 0;
        for i in 0..chords.len() {
            for j in i + 1..chords.len() {
                count += Self::crossing(&chords[i], &chords[j]).unsigned_abs();
            }
        }
        count
    }

    /// Algebraic intersection number of two paths of the realization.
    pub fn intersection(&self, p: usize, q: usize) -> i64 {
        if p == q {
            return 0;
        }
        self.chords[p]
            .iter()
            .flat_map(|a| self.chords[q].iter().map(move |b| Self::crossing(a, b)))
            .sum()
    }

    /// Value of the quadratic form on the class of the path: index plus double points plus one.
    pub fn quadratic_value(&self, path: usize) -> Result<u8, SurfaceError> {
        let index = self.turning_number(path)?;
        Ok(((index + self.self_crossings(path) as i64 + 1).rem_euclid(2)) as u8)
    }
}
