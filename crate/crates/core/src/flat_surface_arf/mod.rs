//! Translation surfaces glued from polygons, their curves, and the Arf invariant.
//!
//! A surface is a list of counterclockwise simple polygons with rational vertices, a perfect
//! matching of polygon edges by translations, and optionally node pairs: two unglued edges with
//! opposite vectors, each the boundary circle of a half-infinite cylinder of an irreducible stable
//! differential with simple poles. Curves are walks in the dual graph of a triangulation; the
//! index of a curve is its exact turning number modulo 2.

pub mod catalog;
mod curves;
mod geometry;
mod symplectic;
mod triangulation;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curves::{PathKind, Realization, SurfacePath};
pub use geometry::Vector;
pub use symplectic::{Generator, GeneratorKind, SymplecticSystem};
pub use triangulation::{SideKind, Triangle, Triangulation};

use crate::exact::rat;
use geometry::{doubled_area, in_sector_closed_open, is_simple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("polygon {0} is not a simple polygon")]
    NotSimple(usize),
    #[error("polygon {0} is not counterclockwise")]
    NotCounterClockwise(usize),
    #[error("edge {0} does not exist")]
    NoSuchEdge(PolygonEdge),
    #[error("edge {0} is used twice")]
    EdgeReused(PolygonEdge),
    #[error("edge {0} is neither glued nor part of a node pair")]
    EdgeUnmatched(PolygonEdge),
    #[error("edges {0} and {1} do not have opposite vectors")]
    NotTranslation(PolygonEdge, PolygonEdge),
    #[error("the polygons do not form a connected surface")]
    Disconnected,
    #[error("node pair {0}: an edge does not close up into a circle")]
    NodeNotClosed(usize),
    #[error("node pair {0}: declared direction is not the cylinder direction")]
    NodeDirection(usize),
    #[error("polygon {0} could not be triangulated")]
    Triangulation(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("path reverses direction at a crossing")]
    Reversal,
    #[error("Arf invariant needs even zero orders, found order {0}")]
    OddOrder(u64),
    #[error("intersection form is degenerate: {0}")]
    Degenerate(String),
    #[error("index computations disagree: {0}")]
    Inconsistent(String),
}

/// Edge `edge` of polygon `polygon`, running from vertex `edge` to vertex `edge + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct PolygonEdge {
    pub polygon: usize,
    pub edge: usize,
}

impl From<(usize, usize)> for PolygonEdge {
    fn from((polygon, edge): (usize, usize)) -> Self {
        PolygonEdge { polygon, edge }
    }
}

impl From<PolygonEdge> for (usize, usize) {
    fn from(e: PolygonEdge) -> Self {
        (e.polygon, e.edge)
    }
}

impl std::fmt::Display for PolygonEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.polygon, self.edge)
    }
}

/// Two unglued edges forming the two sides of a node with simple poles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePair {
    pub edges: [PolygonEdge; 2],
    /// Cylinder direction; when given it must be a positive multiple of the inward normal of the
    /// first edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vector>,
}

/// Input data of a surface, as read from a document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub polygons: Vec<Vec<Vector>>,
    pub gluing: Vec<[PolygonEdge; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_pairs: Vec<NodePair>,
}

impl SurfaceSpec {
    pub fn new(polygons: Vec<Vec<Vector>>, gluing: Vec<[PolygonEdge; 2]>) -> Self {
        SurfaceSpec {
            polygons,
            gluing,
            node_pairs: Vec::new(),
        }
    }

    pub fn with_node_pair(mut self, first: PolygonEdge, second: PolygonEdge) -> Self {
        self.node_pairs.push(NodePair {
            edges: [first, second],
            direction: None,
        });
        self
    }

    fn edge_vector(&self, e: PolygonEdge) -> Vector {
        let poly = &self.polygons[e.polygon];
        &poly[(e.edge + 1) % poly.len()] - &poly[e.edge]
    }

    fn corner_point(&self, e: PolygonEdge) -> &Vector {
        &self.polygons[e.polygon][e.edge]
    }

    /// Replaces every node pair by a flat cylinder of height one in the node direction: a
    /// parallelogram glued to both edges, its two remaining sides glued to each other.
    pub fn plumbed(&self) -> SurfaceSpec {
        let mut out = SurfaceSpec::new(self.polygons.clone(), self.gluing.clone());
        for pair in &self.node_pairs {
            let [first, second] = pair.edges;
            let theta = self.edge_vector(first).left_normal();
            let start = self.corner_point(second).clone();
            let end = &start + &self.edge_vector(second);
            let far_start = &start + &theta;
            let far_end = &end + &theta;
            let q = out.polygons.len();
            out.polygons.push(vec![end, start, far_start, far_end]);
            out.gluing.push([PolygonEdge::from((q, 0)), second]);
            out.gluing.push([PolygonEdge::from((q, 2)), first]);
            out.gluing.push([PolygonEdge::from((q, 1)), PolygonEdge::from((q, 3))]);
        }
        out
    }
}

/// A vertex class with its cone angle `2π · turns`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexClass {
    pub corners: Vec<PolygonEdge>,
    pub turns: u64,
}

impl VertexClass {
    /// Order of the differential at the point: `turns − 1`.
    pub fn order(&self) -> u64 {
        self.turns - 1
    }
}

/// A validated translation surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationSurface {
    spec: SurfaceSpec,
    classes: Vec<VertexClass>,
    corner_class: BTreeMap<PolygonEdge, usize>,
    genus: u64,
    node_directions: Vec<Vector>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut y = x;
        while self.0[y] != root {
            let next = self.0[y];
            self.0[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Corners indexed consecutively polygon by polygon.
fn corner_index(spec: &SurfaceSpec) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(spec.polygons.len());
    let mut total = 0;
    for p in &spec.polygons {
        offsets.push(total);
        total += p.len();
    }
    offsets
}

/// Union-find of corners under the gluing: edge `(p, i)` glued to `(q, j)` identifies corner
/// `(p, i)` with `(q, j + 1)` and `(p, i + 1)` with `(q, j)`.
fn corner_classes(spec: &SurfaceSpec) -> (UnionFind, Vec<usize>) {
    let offsets = corner_index(spec);
    let total = spec.polygons.iter().map(Vec::len).sum();
    let mut uf = UnionFind::new(total);
    let id = |e: PolygonEdge, shift: usize| offsets[e.polygon] + (e.edge + shift) % spec.polygons[e.polygon].len();
    for [a, b] in &spec.gluing {
        uf.union(id(*a, 0), id(*b, 1));
        uf.union(id(*a, 1), id(*b, 0));
    }
    (uf, offsets)
}

fn validate_edges(spec: &SurfaceSpec) -> Result<(), SurfaceError> {
    for (i, poly) in spec.polygons.iter().enumerate() {
        if !is_simple(poly) {
            return Err(SurfaceError::NotSimple(i));
        }
        if doubled_area(poly) <= rat(0) {
            return Err(SurfaceError::NotCounterClockwise(i));
        }
    }
    let mut used = BTreeSet::new();
    let pairs = spec
        .gluing
        .iter()
        .copied()
        .chain(spec.node_pairs.iter().map(|n| n.edges));
    for [a, b] in pairs {
        for e in [a, b] {
            if e.polygon >= spec.polygons.len() || e.edge >= spec.polygons[e.polygon].len() {
                return Err(SurfaceError::NoSuchEdge(e));
            }
            if !used.insert(e) {
                return Err(SurfaceError::EdgeReused(e));
            }
        }
        if spec.edge_vector(a) != -&spec.edge_vector(b) {
            return Err(SurfaceError::NotTranslation(a, b));
        }
    }
    for (p, poly) in spec.polygons.iter().enumerate() {
        for i in 0..poly.len() {
            let e = PolygonEdge::from((p, i));
            if !used.contains(&e) {
                return Err(SurfaceError::EdgeUnmatched(e));
            }
        }
    }
    Ok(())
}

/// Builds and validates a surface: translation gluings, connectedness, closed node circles,
/// cone angles and the Euler characteristic.
pub fn build_surface(spec: SurfaceSpec) -> Result<TranslationSurface, SurfaceError> {
    validate_edges(&spec)?;
    let mut polygon_links = UnionFind::new(spec.polygons.len());
    for [a, b] in &spec.gluing {
        polygon_links.union(a.polygon, b.polygon);
    }
    if (0..spec.polygons.len()).any(|p| polygon_links.find(p) != 0) {
        return Err(SurfaceError::Disconnected);
    }
    let (mut open_classes, open_offsets) = corner_classes(&spec);
    let mut node_directions = Vec::new();
    for (k, pair) in spec.node_pairs.iter().enumerate() {
        for e in pair.edges {
            let len = spec.polygons[e.polygon].len();
            let start = open_offsets[e.polygon] + e.edge;
            let end = open_offsets[e.polygon] + (e.edge + 1) % len;
            if open_classes.find(start) != open_classes.find(end) {
                return Err(SurfaceError::NodeNotClosed(k));
            }
        }
        let theta = spec.edge_vector(pair.edges[0]).left_normal();
        if let Some(d) = &pair.direction {
            if !(d.cross(&theta) == rat(0) && d.dot(&theta) > rat(0)) {
                return Err(SurfaceError::NodeDirection(k));
            }
        }
        node_directions.push(theta);
    }

    // Cone angles and genus are those of the surface with every node replaced by a cylinder.
    let closed = spec.plumbed();
    let (mut uf, offsets) = corner_classes(&closed);
    let reference = Vector::from_ints(1, 0);
    let mut by_root: BTreeMap<usize, VertexClass> = BTreeMap::new();
    for (p, poly) in closed.polygons.iter().enumerate() {
        let n = poly.len();
        for i in 0..n {
            let outgoing = &poly[(i + 1) % n] - &poly[i];
            let back = &poly[(i + n - 1) % n] - &poly[i];
            let class = by_root.entry(uf.find(offsets[p] + i)).or_insert(VertexClass {
                corners: Vec::new(),
                turns: 0,
            });
            if p < spec.polygons.len() {
                class.corners.push(PolygonEdge::from((p, i)));
            }
            if in_sector_closed_open(&outgoing, &back, &reference) {
                class.turns += 1;
            }
        }
    }
    let mut classes: Vec<VertexClass> = by_root.into_values().filter(|c| !c.corners.is_empty()).collect();
    classes.sort_by(|a, b| a.corners.cmp(&b.corners));
    let corner_class = classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.corners.iter().map(move |&e| (e, i)))
        .collect();
    let vertices = classes.len() as i64;
    let edges = closed.gluing.len() as i64;
    let faces = closed.polygons.len() as i64;
    let euler = vertices - edges + faces;
    let genus = (2 - euler) / 2;
    let order_sum: u64 = classes.iter().map(VertexClass::order).sum();
    debug_assert_eq!(order_sum as i64, 2 * genus - 2);
    Ok(TranslationSurface {
        spec,
        classes,
        corner_class,
        genus: genus as u64,
        node_directions,
    })
}

impl TranslationSurface {
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// Genus of the closed surface; with node pairs, the arithmetic genus of the nodal curve.
    pub fn genus(&self) -> u64 {
        self.genus
    }

    /// Genus of the normalization: the genus minus the number of nodes.
    pub fn normalization_genus(&self) -> u64 {
        self.genus - self.spec.node_pairs.len() as u64
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn class_of_corner(&self, corner: PolygonEdge) -> Option<usize> {
        self.corner_class.get(&corner).copied()
    }

    pub fn node_count(&self) -> usize {
        self.spec.node_pairs.len()
    }

    /// Cylinder direction of node `k`.
    pub fn node_direction(&self, k: usize) -> &Vector {
        &self.node_directions[k]
    }

    /// The closed surface with every node replaced by a cylinder.
    pub fn plumbed(&self) -> Result<TranslationSurface, SurfaceError> {
        build_surface(self.spec.plumbed())
    }

    pub fn triangulate(&self, offset: usize) -> Result<Triangulation, SurfaceError> {
        Triangulation::new(self, offset)
    }
}

/// Zero orders in decreasing order; regular points and node circles contribute nothing.
pub fn stratum_of(s: &TranslationSurface) -> Vec<u64> {
    let mut orders: Vec<u64> = s.classes.iter().map(VertexClass::order).filter(|&k| k > 0).collect();
    orders.sort_unstable_by(|a, b| b.cmp(a));
    orders
}

/// Options selecting among equivalent constructions of curves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CurveChoices {
    /// Rotation of the ear search in every polygon.
    pub triangulation_offset: usize,
    /// Root triangle of the spanning tree of the dual graph, reduced modulo the triangle count.
    pub tree_root: usize,
    /// Reverses the order in which crossings of one side are placed along it.
    pub reverse_positions: bool,
}

/// Arf invariant of a surface with even zero orders, through an admissible symplectic system.
pub fn arf(s: &TranslationSurface, sys: &SymplecticSystem) -> Result<u8, SurfaceError> {
    if let Some(k) = s.classes.iter().map(VertexClass::order).find(|k| k % 2 == 1) {
        return Err(SurfaceError::OddOrder(k));
    }
    sys.check()?;
    Ok(sys.arf())
}

/// Builds an admissible symplectic system with the default choices.
pub fn find_symplectic_system(s: &TranslationSurface) -> Result<SymplecticSystem, SurfaceError> {
    SymplecticSystem::find(s, CurveChoices::default())
}

/// Signed intersection number of two paths, with `horizontal · vertical = 1` on the torus.
pub fn intersection_number(tri: &Triangulation, p: &SurfacePath, q: &SurfacePath) -> Result<i64, SurfaceError> {
    let r = Realization::new(tri, &[p.clone(), q.clone()], false)?;
    Ok(r.intersection(0, 1))
}

/// Index of a path: its turning number modulo 2.
pub fn winding_index(tri: &Triangulation, p: &SurfacePath) -> Result<u8, SurfaceError> {
    let r = Realization::new(tri, std::slice::from_ref(p), false)?;
    Ok((r.turning_number(0)?.rem_euclid(2)) as u8)
}
