//! Ear-clipping triangulation of every polygon, with sides paired across gluings and diagonals.

use std::collections::BTreeMap;

use super::geometry::{in_closed_triangle, Vector};
use super::{PolygonEdge, SurfaceError, TranslationSurface};
use crate::exact::rat;

/// What a triangle side is on the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideKind {
    /// A polygon edge, glued to another edge or part of a node pair.
    Edge(PolygonEdge),
    /// A diagonal inside a polygon.
    Diagonal,
}

/// A counterclockwise triangle; side `s` runs from `points[s]` to `points[s + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub polygon: usize,
    pub points: [Vector; 3],
}

/// Sides are numbered `3 · triangle + local side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    triangles: Vec<Triangle>,
    kinds: Vec<SideKind>,
    partner: Vec<Option<usize>>,
    /// For node sides: node index and which edge of the pair.
    node_of: Vec<Option<(usize, usize)>>,
    node_sides: Vec<[usize; 2]>,
    node_directions: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Edge(usize),
    Diagonal(usize),
}

/// Triangles as vertex-index triples with side labels; the ear search starts at `offset`.
fn clip_ears(points: &[Vector], offset: usize) -> Option<Vec<([usize; 3], [Label; 3])>> {
    let mut ring: Vec<usize> = (0..points.len()).collect();
    let mut labels: Vec<Label> = (0..points.len()).map(Label::Edge).collect();
    let mut out = Vec::new();
    let mut next_diagonal = 0;
    while ring.len() > 3 {
        let len = ring.len();
        let ear = (0..len).map(|step| (offset + step) % len).find(|&i| {
            let (p, c, n) = (ring[(i + len - 1) % len], ring[i], ring[(i + 1) % len]);
            let convex = (&points[c] - &points[p]).cross(&(&points[n] - &points[c])) > rat(0);
            convex
                && ring
                    .iter()
                    .filter(|&&v| v != p && v != c && v != n)
                    .all(|&v| !in_closed_triangle(&points[p], &points[c], &points[n], &points[v]))
        })?;
        let prev = (ear + len - 1) % len;
        let diagonal = Label::Diagonal(next_diagonal);
        next_diagonal += 1;
        out.push((
            [ring[prev], ring[ear], ring[(ear + 1) % len]],
            [labels[prev], labels[ear], diagonal],
        ));
        labels[prev] = diagonal;
        ring.remove(ear);
        labels.remove(ear);
    }
    out.push(([ring[0], ring[1], ring[2]], [labels[0], labels[1], labels[2]]));
    Some(out)
}

impl Triangulation {
    pub(super) fn new(surface: &TranslationSurface, offset: usize) -> Result<Self, SurfaceError> {
        let spec = surface.spec();
        let mut triangles = Vec::new();
        let mut kinds = Vec::new();
        let mut side_of_edge: BTreeMap<PolygonEdge, usize> = BTreeMap::new();
        let mut diagonal_sides: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (p, points) in spec.polygons.iter().enumerate() {
            let pieces = clip_ears(points, offset % points.len()).ok_or(SurfaceError::Triangulation(p))?;
            for (corners, labels) in pieces {
                let t = triangles.len();
                triangles.push(Triangle {
                    polygon: p,
                    points: corners.map(|i| points[i].clone()),
                });
                for (s, label) in labels.into_iter().enumerate() {
                    match label {
                        Label::Edge(i) => {
                            let e = PolygonEdge::from((p, i));
                            side_of_edge.insert(e, 3 * t + s);
                            kinds.push(SideKind::Edge(e));
                        }
                        Label::Diagonal(d) => {
                            diagonal_sides.entry((p, d)).or_default().push(3 * t + s);
                            kinds.push(SideKind::Diagonal);
                        }
                    }
                }
            }
        }
        let mut partner = vec![None; kinds.len()];
        for sides in diagonal_sides.values() {
            partner[sides[0]] = Some(sides[1]);
            partner[sides[1]] = Some(sides[0]);
        }
        for [a, b] in &spec.gluing {
            let (sa, sb) = (side_of_edge[a], side_of_edge[b]);
            partner[sa] = Some(sb);
            partner[sb] = Some(sa);
        }
        let mut node_of = vec![None; kinds.len()];
        let mut node_sides = Vec::new();
        for (k, pair) in spec.node_pairs.iter().enumerate() {
            let sides = pair.edges.map(|e| side_of_edge[&e]);
            node_of[sides[0]] = Some((k, 0));
            node_of[sides[1]] = Some((k, 1));
            node_sides.push(sides);
        }
        let node_directions = (0..surface.node_count())
            .map(|k| surface.node_direction(k).clone())
            .collect();
        Ok(Triangulation {
            triangles,
            kinds,
            partner,
            node_of,
            node_sides,
            node_directions,
        })
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn side_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, side: usize) -> SideKind {
        self.kinds[side]
    }

    pub fn triangle_of(side: usize) -> usize {
        side / 3
    }

    /// Start and end point of a side in its triangle's plane.
    pub fn side_points(&self, side: usize) -> (&Vector, &Vector) {
        let t = &self.triangles[side / 3];
        (&t.points[side % 3], &t.points[(side % 3 + 1) % 3])
    }

    /// The side glued to `side`, if any.
    pub fn partner(&self, side: usize) -> Option<usize> {
        self.partner[side]
    }

    /// The glued side, or for a node side the other side of the node.
    pub fn position_partner(&self, side: usize) -> Option<usize> {
        self.partner[side].or_else(|| self.node_of[side].map(|(k, which)| self.node_sides[k][1 - which]))
    }

    pub fn node_of(&self, side: usize) -> Option<(usize, usize)> {
        self.node_of[side]
    }

    /// Side through which admissible paths of node `k` enter.
    pub fn node_entry_side(&self, k: usize) -> usize {
        self.node_sides[k][0]
    }

    /// Side through which admissible paths of node `k` leave.
    pub fn node_exit_side(&self, k: usize) -> usize {
        self.node_sides[k][1]
    }

    pub fn node_direction(&self, k: usize) -> &Vector {
        &self.node_directions[k]
    }

    pub fn node_count(&self) -> usize {
        self.node_sides.len()
    }

    /// Walk around the vertex at local corner `corner` of triangle `triangle`, counterclockwise,
    /// leaving each triangle through the side ending at the vertex. `None` when the walk meets a
    /// node side.
    pub fn loop_around_corner(&self, triangle: usize, corner: usize) -> Option<Vec<usize>> {
        let mut exits = Vec::new();
        let (mut t, mut c) = (triangle, corner);
        loop {
            let exit = 3 * t + (c + 2) % 3;
            exits.push(exit);
            let next = self.partner[exit]?;
            t = next / 3;
            c = next % 3;
            if (t, c) == (triangle, corner) {
                return Some(exits);
            }
        }
    }

    /// Triangle containing polygon edge `e`, with the local side index.
    pub fn side_of_edge(&self, e: PolygonEdge) -> Option<usize> {
        self.kinds.iter().position(|k| *k == SideKind::Edge(e))
    }
}
