//! Dual graphs of marked nodal curves.
//!
//! Vertices are irreducible components weighted by their geometric genus, edges are nodes made of two
//! half-edges with stable ids, legs are marked points. Loops are allowed, which is why every convention
//! downstream refers to half-edges rather than to endpoints.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{EdgeId, HalfEdgeId, LegId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{owner} {id:?} refers to unknown vertex {vertex:?}")]
    UnknownVertex {
        owner: &'static str,
        id: String,
        vertex: String,
    },
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected: {0:?} cannot be reached")]
    Disconnected(VertexId),
    #[error("vertex {0:?} is not semi-stable")]
    NotSemistable(VertexId),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub genus: u32,
    /// Set on the rational components inserted by [`DualGraph::blow_up_all_nodes`].
    #[serde(default, skip_serializing_if = "is_false")]
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdge {
    pub id: HalfEdgeId,
    pub vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub half_edges: [HalfEdge; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.half_edges[0].vertex == self.half_edges[1].vertex
    }

    /// Index (0 or 1) of `h` inside this edge.
    pub fn side_of(&self, h: &HalfEdgeId) -> Option<usize> {
        self.half_edges.iter().position(|x| &x.id == h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub id: LegId,
    pub vertex: VertexId,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

/// Number of special points (half-edges plus legs) on a component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexValence {
    pub vertex: VertexId,
    pub n_special: usize,
}

#[derive(Serialize, Deserialize)]
struct RawDualGraph {
    vertices: Vec<Vertex>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    legs: Vec<Leg>,
}

/// Connected weighted multigraph with legs. Components are stored sorted by id.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawDualGraph", into = "RawDualGraph")]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    vertex_index: BTreeMap<VertexId, usize>,
    half_edge_index: BTreeMap<HalfEdgeId, (usize, usize)>,
}

impl PartialEq for DualGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && self.legs == other.legs
    }
}

impl Eq for DualGraph {}

impl TryFrom<RawDualGraph> for DualGraph {
    type Error = GraphError;
    fn try_from(raw: RawDualGraph) -> Result<Self, GraphError> {
        DualGraph::new(raw.vertices, raw.edges, raw.legs)
    }
}

impl From<DualGraph> for RawDualGraph {
    fn from(g: DualGraph) -> Self {
        RawDualGraph {
            vertices: g.vertices,
            edges: g.edges,
            legs: g.legs,
        }
    }
}

impl DualGraph {
    pub fn new(mut vertices: Vec<Vertex>, mut edges: Vec<Edge>, mut legs: Vec<Leg>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        legs.sort_by(|a, b| a.id.cmp(&b.id));

        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId {
                    kind: "vertex",
                    id: v.id.0.clone(),
                });
            }
        }
        let mut seen_edges = BTreeSet::new();
        let mut half_edge_index = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if !seen_edges.insert(e.id.clone()) {
                return Err(GraphError::DuplicateId {
                    kind: "edge",
                    id: e.id.0.clone(),
                });
            }
            for (side, h) in e.half_edges.iter().enumerate() {
                if !vertex_index.contains_key(&h.vertex) {
                    return Err(GraphError::UnknownVertex {
                        owner: "half-edge",
                        id: h.id.0.clone(),
                        vertex: h.vertex.0.clone(),
                    });
                }
                if half_edge_index.insert(h.id.clone(), (i, side)).is_some() {
                    return Err(GraphError::DuplicateId {
                        kind: "half-edge",
                        id: h.id.0.clone(),
                    });
                }
            }
        }
        let mut seen_legs = BTreeSet::new();
        for l in &legs {
            if !vertex_index.contains_key(&l.vertex) {
                return Err(GraphError::UnknownVertex {
                    owner: "leg",
                    id: l.id.0.clone(),
                    vertex: l.vertex.0.clone(),
                });
            }
            if !seen_legs.insert(l.id.clone()) || half_edge_index.contains_key(l.id.as_str()) {
                return Err(GraphError::DuplicateId {
                    kind: "leg",
                    id: l.id.0.clone(),
                });
            }
        }
        let graph = DualGraph {
            vertices,
            edges,
            legs,
            vertex_index,
            half_edge_index,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    pub fn builder() -> DualGraphBuilder {
        DualGraphBuilder::default()
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(GraphError::Disconnected(self.vertices[i].id.clone())),
            None => Ok(()),
        }
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let id = &self.vertices[i].id;
        self.edges.iter().filter_map(move |e| {
            let [a, b] = &e.half_edges;
            if &a.vertex == id {
                Some(self.vertex_index[&b.vertex])
            } else if &b.vertex == id {
                Some(self.vertex_index[&a.vertex])
            } else {
                None
            }
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertex_index.get(id).map(|&i| &self.vertices[i])
    }

    pub fn vertex_position(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn leg(&self, id: &str) -> Option<&Leg> {
        self.legs
            .binary_search_by(|l| l.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.legs[i])
    }

    /// Edge containing `h` and the side of `h` inside it.
    pub fn half_edge(&self, h: &str) -> Option<(&Edge, usize)> {
        self.half_edge_index.get(h).map(|&(e, side)| (&self.edges[e], side))
    }

    /// The other branch of the node containing `h`.
    pub fn partner(&self, h: &str) -> Option<&HalfEdge> {
        self.half_edge(h).map(|(e, side)| &e.half_edges[1 - side])
    }

    pub fn half_edges(&self) -> impl Iterator<Item = &HalfEdge> {
        self.edges.iter().flat_map(|e| e.half_edges.iter())
    }

    pub fn half_edges_at<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a HalfEdge> + 'a {
        self.half_edges().filter(move |h| &h.vertex == v)
    }

    pub fn legs_at<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a Leg> + 'a {
        self.legs.iter().filter(move |l| &l.vertex == v)
    }

    pub fn valence(&self, v: &VertexId) -> VertexValence {
        VertexValence {
            vertex: v.clone(),
            n_special: self.half_edges_at(v).count() + self.legs_at(v).count(),
        }
    }

    pub fn valences(&self) -> Vec<VertexValence> {
        self.vertices.iter().map(|v| self.valence(&v.id)).collect()
    }

    /// First Betti number |E| − |V| + 1 of the underlying connected graph.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn arithmetic_genus(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.genus)).sum::<u64>() + self.betti_number() as u64
    }

    pub fn is_stable(&self) -> bool {
        self.valences()
            .iter()
            .zip(&self.vertices)
            .all(|(val, v)| match v.genus {
                0 => val.n_special >= 3,
                1 => val.n_special >= 1,
                _ => true,
            })
    }

    pub fn is_compact_type(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    /// Subdivides every node by a new exceptional rational component.
    ///
    /// Edge `e = [h0, h1]` becomes `e/0 = [h0, h0#x]` and `e/1 = [h1#x, h1]` around vertex `e#exc`.
    pub fn blow_up_all_nodes(&self) -> DualGraph {
        let mut vertices = self.vertices.clone();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            let exc = VertexId(format!("{}#exc", e.id));
            vertices.push(Vertex {
                id: exc.clone(),
                genus: 0,
                exceptional: true,
            });
            let [h0, h1] = &e.half_edges;
            edges.push(Edge {
                id: EdgeId(format!("{}/0", e.id)),
                half_edges: [
                    h0.clone(),
                    HalfEdge {
                        id: HalfEdgeId(format!("{}#x", h0.id)),
                        vertex: exc.clone(),
                    },
                ],
            });
            edges.push(Edge {
                id: EdgeId(format!("{}/1", e.id)),
                half_edges: [
                    HalfEdge {
                        id: HalfEdgeId(format!("{}#x", h1.id)),
                        vertex: exc,
                    },
                    h1.clone(),
                ],
            });
        }
        DualGraph::new(vertices, edges, self.legs.clone()).expect("subdividing edges of a valid graph keeps it valid")
    }

    /// Contracts every rational component carrying exactly two special points.
    ///
    /// A two-valent leg-free component merges its two nodes into one; a rational tail with one node and one
    /// leg moves its leg onto the neighbouring component. Pointed bridges are kept.
    pub fn stabilize(&self) -> Result<DualGraph, GraphError> {
        let mut current = self.clone();
        loop {
            if let Some(v) = current
                .vertices
                .iter()
                .find(|v| v.genus == 0 && current.valence(&v.id).n_special < 2)
            {
                if current.vertices.len() > 1 || !current.edges.is_empty() {
                    return Err(GraphError::NotSemistable(v.id.clone()));
                }
            }
            match current.contract_one()? {
                Some(next) => current = next,
                None => return Ok(current),
            }
        }
    }

    fn contract_one(&self) -> Result<Option<DualGraph>, GraphError> {
        for v in &self.vertices {
            if v.genus != 0 {
                continue;
            }
            let halves: Vec<&HalfEdge> = self.half_edges_at(&v.id).collect();
            let legs: Vec<&Leg> = self.legs_at(&v.id).collect();
            if halves.len() == 2 && legs.is_empty() {
                let (ea, _) = self.half_edge(halves[0].id.as_str()).expect("indexed");
                let (eb, _) = self.half_edge(halves[1].id.as_str()).expect("indexed");
                if ea.id == eb.id {
                    continue;
                }
                let (first, second) = if ea.id <= eb.id { (ea, eb) } else { (eb, ea) };
                let outer = |e: &Edge| -> HalfEdge {
                    e.half_edges
                        .iter()
                        .find(|h| h.vertex != v.id)
                        .cloned()
                        .expect("non-loop edge has an outer half")
                };
                let merged = Edge {
                    id: merged_edge_id(&first.id, &second.id),
                    half_edges: [outer(first), outer(second)],
                };
                let edges = self
                    .edges
                    .iter()
                    .filter(|e| e.id != first.id && e.id != second.id)
                    .cloned()
                    .chain(std::iter::once(merged))
                    .collect();
                let vertices = self.vertices.iter().filter(|w| w.id != v.id).cloned().collect();
                return DualGraph::new(vertices, edges, self.legs.clone())
                    .map(Some)
                    .map_err(|e| GraphError::Internal(format!("contraction of {}: {e}", v.id)));
            }
            if halves.len() == 1 && legs.len() == 1 && self.vertices.len() > 1 {
                let (e, side) = self.half_edge(halves[0].id.as_str()).expect("indexed");
                let target = e.half_edges[1 - side].vertex.clone();
                let moved = Leg {
                    vertex: target,
                    ..legs[0].clone()
                };
                let edges = self.edges.iter().filter(|x| x.id != e.id).cloned().collect();
                let vertices = self.vertices.iter().filter(|w| w.id != v.id).cloned().collect();
                let legs = self
                    .legs
                    .iter()
                    .map(|l| if l.id == moved.id { moved.clone() } else { l.clone() })
                    .collect();
                return DualGraph::new(vertices, edges, legs)
                    .map(Some)
                    .map_err(|e| GraphError::Internal(format!("contraction of {}: {e}", v.id)));
            }
        }
        Ok(None)
    }

    /// Deterministic spanning tree: edges scanned in id order, kept when they join two new components.
    /// Returns the tree edge ids; the remaining edges each close one fundamental cycle.
    pub fn spanning_tree(&self) -> BTreeSet<EdgeId> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut tree = BTreeSet::new();
        for e in &self.edges {
            let a = find(&mut parent, self.vertex_index[&e.half_edges[0].vertex]);
            let b = find(&mut parent, self.vertex_index[&e.half_edges[1].vertex]);
            if a != b {
                parent[a] = b;
                tree.insert(e.id.clone());
            }
        }
        tree
    }
}

fn merged_edge_id(a: &EdgeId, b: &EdgeId) -> EdgeId {
    if let (Some(sa), Some(sb)) = (a.0.strip_suffix("/0"), b.0.strip_suffix("/1")) {
        if sa == sb {
            return EdgeId(sa.to_owned());
        }
    }
    EdgeId(format!("{a}+{b}"))
}

/// Fluent construction, mostly for tests and examples.
#[derive(Default, Clone, Debug)]
pub struct DualGraphBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

impl DualGraphBuilder {
    pub fn vertex(mut self, id: &str, genus: u32) -> Self {
        self.vertices.push(Vertex {
            id: id.into(),
            genus,
            exceptional: false,
        });
        self
    }

    /// Node `id` with half-edge `a.0` on vertex `a.1` and half-edge `b.0` on vertex `b.1`.
    pub fn edge(mut self, id: &str, a: (&str, &str), b: (&str, &str)) -> Self {
        self.edges.push(Edge {
            id: id.into(),
            half_edges: [
                HalfEdge {
                    id: a.0.into(),
                    vertex: a.1.into(),
                },
                HalfEdge {
                    id: b.0.into(),
                    vertex: b.1.into(),
                },
            ],
        });
        self
    }

    pub fn leg(mut self, id: &str, vertex: &str) -> Self {
        self.legs.push(Leg {
            id: id.into(),
            vertex: vertex.into(),
            label: String::new(),
        });
        self
    }

    pub fn build(self) -> Result<DualGraph, GraphError> {
        DualGraph::new(self.vertices, self.edges, self.legs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta1() -> DualGraph {
        DualGraph::builder()
            .vertex("X1", 1)
            .vertex("X2", 1)
            .edge("e", ("h1", "X1"), ("h2", "X2"))
            .build()
            .unwrap()
    }

    /// Euler characteristic oracle: genus from 1 − χ(graph) plus vertex genera.
    fn genus_oracle(g: &DualGraph) -> i64 {
        let chi = g.vertices().len() as i64 - g.edges().len() as i64;
        g.vertices().iter().map(|v| i64::from(v.genus)).sum::<i64>() + 1 - chi
    }

    #[test]
    fn arithmetic_genus_examples() {
        let smooth = DualGraph::builder().vertex("X", 3).build().unwrap();
        assert_eq!(smooth.arithmetic_genus(), 3);
        assert_eq!(delta1().arithmetic_genus(), 2);
        let looped = DualGraph::builder()
            .vertex("X", 2)
            .edge("n", ("a", "X"), ("b", "X"))
            .build()
            .unwrap();
        assert_eq!(looped.arithmetic_genus(), 3);
        assert_eq!(genus_oracle(&looped), 3);
    }

    #[test]
    fn stability_examples() {
        let bridge = DualGraph::builder()
            .vertex("X", 2)
            .vertex("P", 0)
            .edge("e1", ("a", "X"), ("b", "P"))
            .edge("e2", ("c", "X"), ("d", "P"))
            .build()
            .unwrap();
        assert!(!bridge.is_stable());
        let pointed = DualGraph::builder()
            .vertex("X", 2)
            .vertex("P", 0)
            .edge("e1", ("a", "X"), ("b", "P"))
            .edge("e2", ("c", "X"), ("d", "P"))
            .leg("Z", "P")
            .build()
            .unwrap();
        assert!(pointed.is_stable());
        let elliptic = DualGraph::builder().vertex("E", 1).leg("Z", "E").build().unwrap();
        assert!(elliptic.is_stable());
    }

    #[test]
    fn compact_type_examples() {
        let tree = DualGraph::builder()
            .vertex("A", 1)
            .vertex("B", 1)
            .vertex("C", 1)
            .edge("e1", ("a", "A"), ("b", "B"))
            .edge("e2", ("c", "B"), ("d", "C"))
            .build()
            .unwrap();
        assert!(tree.is_compact_type());
        let looped = DualGraph::builder()
            .vertex("X", 1)
            .edge("n", ("a", "X"), ("b", "X"))
            .build()
            .unwrap();
        assert!(!looped.is_compact_type());
        let banana = DualGraph::builder()
            .vertex("A", 1)
            .vertex("B", 1)
            .edge("e1", ("a", "A"), ("b", "B"))
            .edge("e2", ("c", "A"), ("d", "B"))
            .build()
            .unwrap();
        assert!(!banana.is_compact_type());
    }

    #[test]
    fn blow_up_and_stabilize_round_trip() {
        let g = delta1();
        let up = g.blow_up_all_nodes();
        assert_eq!(up.vertices().len(), 3);
        assert_eq!(up.edges().len(), 2);
        assert_eq!(up.arithmetic_genus(), g.arithmetic_genus());
        let exc = up.vertex("e#exc").unwrap();
        assert!(exc.exceptional);
        assert_eq!(up.valence(&exc.id).n_special, 2);
        assert_eq!(up.stabilize().unwrap(), g);
        assert_eq!(g.stabilize().unwrap(), g);

        let looped = DualGraph::builder()
            .vertex("X", 1)
            .edge("n", ("a", "X"), ("b", "X"))
            .build()
            .unwrap();
        let up = looped.blow_up_all_nodes();
        let exc = up.vertex("n#exc").unwrap().id.clone();
        let targets: Vec<_> = up
            .edges()
            .iter()
            .flat_map(|e| e.half_edges.iter())
            .filter(|h| h.vertex != exc)
            .map(|h| h.vertex.as_str())
            .collect();
        assert_eq!(targets, vec!["X", "X"]);
        assert_eq!(up.stabilize().unwrap(), looped);
    }

    #[test]
    fn chain_through_rational_bridge_contracts() {
        let chain = DualGraph::builder()
            .vertex("X1", 1)
            .vertex("P", 0)
            .vertex("X2", 2)
            .edge("e1", ("a", "X1"), ("b", "P"))
            .edge("e2", ("c", "P"), ("d", "X2"))
            .build()
            .unwrap();
        let st = chain.stabilize().unwrap();
        assert_eq!(st.vertices().len(), 2);
        assert_eq!(st.edges().len(), 1);
        assert_eq!(st.edges()[0].id.as_str(), "e1+e2");
        assert_eq!(st.arithmetic_genus(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let dup = DualGraph::builder().vertex("X", 1).vertex("X", 2).build();
        assert!(matches!(dup, Err(GraphError::DuplicateId { .. })));
        let disc = DualGraph::builder().vertex("X", 1).vertex("Y", 2).build();
        assert!(matches!(disc, Err(GraphError::Disconnected(_))));
        let unknown = DualGraph::builder().vertex("X", 1).leg("Z", "Y").build();
        assert!(matches!(unknown, Err(GraphError::UnknownVertex { .. })));
        let clash = DualGraph::builder()
            .vertex("X", 1)
            .edge("n", ("a", "X"), ("b", "X"))
            .leg("a", "X")
            .build();
        assert!(matches!(clash, Err(GraphError::DuplicateId { .. })));
    }

    #[test]
    fn json_round_trip_revalidates() {
        let g = delta1();
        let text = serde_json::to_string(&g).unwrap();
        let back: DualGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let broken = r#"{"vertices":[{"id":"X","genus":1}],"legs":[{"id":"Z","vertex":"Q"}]}"#;
        assert!(serde_json::from_str::<DualGraph>(broken).is_err());
    }
}
