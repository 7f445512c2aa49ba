//! Candidate differentials on dual graphs and the decision procedures around plumbing them.
//!
//! A candidate assigns a zero order to every leg and an order (plus, for poles, a residue) to every
//! branch of every node. Plumbing a node of weight `w` with parameter `ε` rescales the far side by
//! `ε^w`, so a closed path `Σ αᵢ eᵢ` in the dual graph forces `∏ ε_{eᵢ}^{αᵢ w(eᵢ)} = 1`.
//!
//! Only the moduli of the parameters matter. Taking every `ε` real and positive solves the phase
//! part of each equation identically, so the system reduces to `Σ αᵢ w(eᵢ) xᵢ = 0` on
//! `xᵢ = log |εᵢ| < 0`. The constraint set is a cone, hence strict negativity is equivalent to
//! `xᵢ ≤ −1`, which the exact simplex in [`crate::feasibility`] decides with a certificate.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve_graph::{DualGraph, GraphError};
use crate::exact::{primitive_scaling, rat, serde_rational, GaussianRational, Rational};
use crate::feasibility::{nonnegative_solution, Outcome};
use crate::ids::{EdgeId, HalfEdgeId, LegId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
    #[error("no order given for {kind} {id:?}")]
    MissingOrder { kind: &'static str, id: String },
    #[error("candidate is invalid: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("compatibility fails at edges {}", list(.0))]
    Incompatible(Vec<EdgeId>),
    #[error("graph is not of compact type")]
    NotCompactType,
    #[error("graph is not stable")]
    NotStable,
    #[error("no limit differential: {0}")]
    Impossible(String),
    #[error("every polarly related class vanishes, which is the zero differential")]
    AllVanish,
    #[error("candidate is not plumbable: {0}")]
    NotPlumbable(String),
    #[error("certificate is not feasible")]
    InfeasibleCertificate,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// A reason a candidate fails [`CandidateDifferential::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DegreeMismatch {
        vertex: VertexId,
        expected: i64,
        actual: i64,
    },
    MissingResidue {
        half_edge: HalfEdgeId,
    },
    ResidueAtRegularBranch {
        half_edge: HalfEdgeId,
    },
    LegOrderNotPositive {
        leg: LegId,
        order: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeMismatch {
                vertex,
                expected,
                actual,
            } => write!(f, "degree at {vertex} is {actual}, expected {expected}"),
            Violation::MissingResidue { half_edge } => {
                write!(f, "simple pole at {half_edge} has no residue")
            }
            Violation::ResidueAtRegularBranch { half_edge } => {
                write!(f, "nonzero residue at non-polar branch {half_edge}")
            }
            Violation::LegOrderNotPositive { leg, order } => {
                write!(f, "leg {leg} has order {order} < 1")
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawCandidate {
    graph: DualGraph,
    leg_order: BTreeMap<LegId, i64>,
    branch_order: BTreeMap<HalfEdgeId, i64>,
    #[serde(default)]
    residue: BTreeMap<HalfEdgeId, GaussianRational>,
}

/// Per-component meromorphic data on a nodal curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCandidate", into = "RawCandidate")]
pub struct CandidateDifferential {
    graph: DualGraph,
    leg_order: BTreeMap<LegId, i64>,
    branch_order: BTreeMap<HalfEdgeId, i64>,
    residue: BTreeMap<HalfEdgeId, GaussianRational>,
}

impl TryFrom<RawCandidate> for CandidateDifferential {
    type Error = DiffError;
    fn try_from(raw: RawCandidate) -> Result<Self, DiffError> {
        CandidateDifferential::new(raw.graph, raw.leg_order, raw.branch_order, raw.residue)
    }
}

impl From<CandidateDifferential> for RawCandidate {
    fn from(c: CandidateDifferential) -> Self {
        RawCandidate {
            graph: c.graph,
            leg_order: c.leg_order,
            branch_order: c.branch_order,
            residue: c.residue,
        }
    }
}

impl CandidateDifferential {
    /// Every leg and half-edge needs an order; residues may be partial (see [`Self::validate`]).
    pub fn new(
        graph: DualGraph,
        leg_order: BTreeMap<LegId, i64>,
        branch_order: BTreeMap<HalfEdgeId, i64>,
        residue: BTreeMap<HalfEdgeId, GaussianRational>,
    ) -> Result<Self, DiffError> {
        for id in leg_order.keys() {
            if graph.leg(id.as_str()).is_none() {
                return Err(DiffError::UnknownId {
                    kind: "leg",
                    id: id.to_string(),
                });
            }
        }
        for id in branch_order.keys().chain(residue.keys()) {
            if graph.half_edge(id.as_str()).is_none() {
                return Err(DiffError::UnknownId {
                    kind: "half-edge",
                    id: id.to_string(),
                });
            }
        }
        if let Some(l) = graph.legs().iter().find(|l| !leg_order.contains_key(&l.id)) {
            return Err(DiffError::MissingOrder {
                kind: "leg",
                id: l.id.to_string(),
            });
        }
        if let Some(h) = graph.half_edges().find(|h| !branch_order.contains_key(&h.id)) {
            return Err(DiffError::MissingOrder {
                kind: "half-edge",
                id: h.id.to_string(),
            });
        }
        Ok(CandidateDifferential {
            graph,
            leg_order,
            branch_order,
            residue,
        })
    }

    /// Candidate with zero residues everywhere except where given.
    pub fn from_orders(graph: DualGraph, legs: &[(&str, i64)], branches: &[(&str, i64)]) -> Result<Self, DiffError> {
        let leg_order = legs.iter().map(|&(l, k)| (LegId::from(l), k)).collect();
        let branch_order: BTreeMap<HalfEdgeId, i64> = branches.iter().map(|&(h, k)| (HalfEdgeId::from(h), k)).collect();
        let residue = branch_order
            .iter()
            .filter(|(_, &k)| k == -1)
            .map(|(h, _)| (h.clone(), GaussianRational::zero()))
            .collect();
        Self::new(graph, leg_order, branch_order, residue)
    }

    pub fn with_residue(mut self, half_edge: &str, value: GaussianRational) -> Self {
        self.residue.insert(HalfEdgeId::from(half_edge), value);
        self
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn leg_orders(&self) -> &BTreeMap<LegId, i64> {
        &self.leg_order
    }

    pub fn branch_orders(&self) -> &BTreeMap<HalfEdgeId, i64> {
        &self.branch_order
    }

    pub fn residues(&self) -> &BTreeMap<HalfEdgeId, GaussianRational> {
        &self.residue
    }

    pub fn leg_order(&self, leg: &str) -> Option<i64> {
        self.leg_order.get(leg).copied()
    }

    pub fn branch_order(&self, h: &str) -> Option<i64> {
        self.branch_order.get(h).copied()
    }

    /// Residue at a branch, zero when unset.
    pub fn residue(&self, h: &str) -> GaussianRational {
        self.residue.get(h).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Sorted multiset of leg orders.
    pub fn signature(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.leg_order.values().copied().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Sum of leg and branch orders at `v`.
    pub fn degree_at(&self, v: &VertexId) -> i64 {
        let legs: i64 = self.graph.legs_at(v).map(|l| self.leg_order[&l.id]).sum();
        let branches: i64 = self.graph.half_edges_at(v).map(|h| self.branch_order[&h.id]).sum();
        legs + branches
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in self.graph.vertices() {
            let expected = 2 * i64::from(v.genus) - 2;
            let actual = self.degree_at(&v.id);
            if actual != expected {
                out.push(Violation::DegreeMismatch {
                    vertex: v.id.clone(),
                    expected,
                    actual,
                });
            }
        }
        for (l, &k) in &self.leg_order {
            if k < 1 {
                out.push(Violation::LegOrderNotPositive {
                    leg: l.clone(),
                    order: k,
                });
            }
        }
        for (h, &k) in &self.branch_order {
            if k == -1 && !self.residue.contains_key(h) {
                out.push(Violation::MissingResidue { half_edge: h.clone() });
            }
            if k >= 0 && self.residue.get(h).is_some_and(|r| !r.is_zero()) {
                out.push(Violation::ResidueAtRegularBranch { half_edge: h.clone() });
            }
        }
        out
    }

    fn ensure_valid(&self) -> Result<(), DiffError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(DiffError::Invalid(violations))
        }
    }

    fn orders_of(&self, e: &crate::curve_graph::Edge) -> [i64; 2] {
        [
            self.branch_order[&e.half_edges[0].id],
            self.branch_order[&e.half_edges[1].id],
        ]
    }

    /// Per edge: do the branch orders sum to −2.
    pub fn check_compatibility(&self) -> BTreeMap<EdgeId, bool> {
        self.graph
            .edges()
            .iter()
            .map(|e| {
                let [a, b] = self.orders_of(e);
                (e.id.clone(), a + b == -2)
            })
            .collect()
    }

    fn incompatible_edges(&self) -> Vec<EdgeId> {
        self.check_compatibility()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(e, _)| e)
            .collect()
    }

    /// Per edge: do the residues at a pair of simple poles cancel. Other edges pass.
    pub fn check_residue(&self) -> Result<BTreeMap<EdgeId, bool>, DiffError> {
        let mut out = BTreeMap::new();
        for e in self.graph.edges() {
            let orders = self.orders_of(e);
            let pass = if orders == [-1, -1] {
                let mut sum = GaussianRational::zero();
                for h in &e.half_edges {
                    let r = self.residue.get(&h.id).ok_or_else(|| {
                        DiffError::Invalid(vec![Violation::MissingResidue {
                            half_edge: h.id.clone(),
                        }])
                    })?;
                    sum = sum + r;
                }
                sum.is_zero()
            } else {
                true
            };
            out.insert(e.id.clone(), pass);
        }
        Ok(out)
    }

    pub fn diff_dual_graph(&self) -> Result<DifferentialDualGraph, DiffError> {
        let bad = self.incompatible_edges();
        if !bad.is_empty() {
            return Err(DiffError::Incompatible(bad));
        }
        let edges = self
            .graph
            .edges()
            .iter()
            .map(|e| {
                let [a, b] = self.orders_of(e);
                let weight = (a.max(b) + 1) as u32;
                let (orientation, tail, head) = if a == b {
                    (Orientation::Unoriented, 0, 1)
                } else {
                    let (z, p) = if a > b { (0, 1) } else { (1, 0) };
                    (
                        Orientation::Directed {
                            zero_side: e.half_edges[z].id.clone(),
                            pole_side: e.half_edges[p].id.clone(),
                        },
                        z,
                        p,
                    )
                };
                WeightedEdge {
                    edge: e.id.clone(),
                    weight,
                    orientation,
                    tail: e.half_edges[tail].vertex.clone(),
                    head: e.half_edges[head].vertex.clone(),
                }
            })
            .collect();
        Ok(DifferentialDualGraph {
            base: self.graph.clone(),
            edges,
        })
    }

    /// Decides the cycle condition and returns the certificate either way.
    pub fn cycle_condition(&self) -> Result<PlumbingCertificate, DiffError> {
        Ok(self.diff_dual_graph()?.cycle_condition())
    }

    /// Residue-theorem necessity check at every node.
    pub fn residue_theorem_obstruction(&self) -> Result<BTreeMap<EdgeId, NodeCheck>, DiffError> {
        let bad = self.incompatible_edges();
        if !bad.is_empty() {
            return Err(DiffError::Incompatible(bad));
        }
        let mut out: BTreeMap<EdgeId, NodeCheck> = self
            .graph
            .edges()
            .iter()
            .map(|e| (e.id.clone(), NodeCheck::default()))
            .collect();
        for e in self.graph.edges() {
            for side in 0..2 {
                let h = &e.half_edges[side];
                let partner = &e.half_edges[1 - side];
                if self.branch_order[&h.id] > -2 || self.residue(h.id.as_str()).is_zero() {
                    continue;
                }
                let others = self
                    .graph
                    .half_edges_at(&partner.vertex)
                    .filter(|x| x.id != partner.id)
                    .count();
                if others == 0 {
                    let check = out.get_mut(&e.id).expect("edge present");
                    check.pass = false;
                    check.reasons.push(format!(
                        "pole at {} has residue {} but component {} meets no other node, so its \
                         only pole {} would carry a lone nonzero residue",
                        h.id,
                        self.residue(h.id.as_str()),
                        partner.vertex,
                        partner.id
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Advisory: on each vertex, the residues at the far branches of its non-loop nodes sum to zero.
    pub fn weak_global_residue_check(&self) -> BTreeMap<VertexId, AdvisoryCheck> {
        let mut sums: BTreeMap<VertexId, GaussianRational> = self
            .graph
            .vertices()
            .iter()
            .map(|v| (v.id.clone(), GaussianRational::zero()))
            .collect();
        for e in self.graph.edges().iter().filter(|e| !e.is_loop()) {
            for side in 0..2 {
                let near = &e.half_edges[side];
                let far = &e.half_edges[1 - side];
                let s = sums.get_mut(&near.vertex).expect("vertex present");
                *s = s.clone() + &self.residue(far.id.as_str());
            }
        }
        sums.into_iter()
            .map(|(v, sum)| {
                let pass = sum.is_zero();
                (v, AdvisoryCheck { sum, pass })
            })
            .collect()
    }

    /// True when some pole of order at least 2 carries a nonzero residue.
    pub fn has_higher_order_residue(&self) -> bool {
        self.branch_order
            .iter()
            .any(|(h, &k)| k <= -2 && !self.residue(h.as_str()).is_zero())
    }

    pub fn is_plumbable(&self) -> Result<PlumbingVerdict, DiffError> {
        self.ensure_valid()?;
        let bad = self.incompatible_edges();
        if !bad.is_empty() {
            return Ok(PlumbingVerdict::NotPlumbable(Obstruction::Compatibility(bad)));
        }
        let bad: Vec<EdgeId> = self
            .check_residue()?
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(e, _)| e)
            .collect();
        if !bad.is_empty() {
            return Ok(PlumbingVerdict::NotPlumbable(Obstruction::Residue(bad)));
        }
        let higher = self.has_higher_order_residue();
        if higher {
            let failing: Vec<(EdgeId, NodeCheck)> = self
                .residue_theorem_obstruction()?
                .into_iter()
                .filter(|(_, c)| !c.pass)
                .collect();
            if !failing.is_empty() {
                return Ok(PlumbingVerdict::NotPlumbable(Obstruction::ResidueTheorem(failing)));
            }
        }
        let cert = self.cycle_condition()?;
        if !cert.is_feasible() {
            return Ok(PlumbingVerdict::NotPlumbable(Obstruction::Cycle(cert)));
        }
        if higher {
            return Ok(PlumbingVerdict::Undecided(
                "a pole of order at least 2 has nonzero residue and every necessary check passes; \
                 the known sufficient criterion is not decidable from combinatorial data"
                    .into(),
            ));
        }
        Ok(PlumbingVerdict::Plumbable(cert))
    }

    /// Vertex classes joined through pairs of simple poles.
    pub fn polarly_related_components(&self) -> Vec<BTreeSet<VertexId>> {
        let simple = self
            .graph
            .edges()
            .iter()
            .filter(|e| self.orders_of(e) == [-1, -1])
            .map(|e| (&e.half_edges[0].vertex, &e.half_edges[1].vertex));
        partition(&self.graph, simple)
    }

    /// Forgets the classes carrying a pole of order at least 2.
    pub fn to_stable(&self, hypothesis: StableHypothesis) -> Result<StableDifferential, DiffError> {
        if hypothesis == StableHypothesis::CheckPlumbable {
            match self.is_plumbable()? {
                PlumbingVerdict::Plumbable(_) => {}
                PlumbingVerdict::NotPlumbable(o) => return Err(DiffError::NotPlumbable(o.to_string())),
                PlumbingVerdict::Undecided(r) => return Err(DiffError::NotPlumbable(r)),
            }
        } else {
            self.ensure_valid()?;
        }
        let mut components = BTreeMap::new();
        for class in self.polarly_related_components() {
            let vanishes = class
                .iter()
                .any(|v| self.graph.half_edges_at(v).any(|h| self.branch_order[&h.id] <= -2));
            for v in class {
                let form = if vanishes {
                    ComponentForm::Vanishes
                } else {
                    ComponentForm::Kept(self.component_data(&v))
                };
                components.insert(v, form);
            }
        }
        if components.values().all(|f| matches!(f, ComponentForm::Vanishes)) {
            return Err(DiffError::AllVanish);
        }
        Ok(StableDifferential {
            graph: self.graph.clone(),
            components,
        })
    }

    fn component_data(&self, v: &VertexId) -> ComponentData {
        let leg_order = self
            .graph
            .legs_at(v)
            .map(|l| (l.id.clone(), self.leg_order[&l.id]))
            .collect();
        let halves: Vec<&HalfEdgeId> = self.graph.half_edges_at(v).map(|h| &h.id).collect();
        let branch_order = halves.iter().map(|h| ((*h).clone(), self.branch_order[*h])).collect();
        let residue = halves
            .iter()
            .filter_map(|h| self.residue.get(*h).map(|r| ((*h).clone(), r.clone())))
            .collect();
        ComponentData {
            leg_order,
            branch_order,
            residue,
        }
    }

    /// Relative scalings of the components, propagated along the deterministic spanning tree.
    pub fn component_scalings(
        &self,
        cert: &PlumbingCertificate,
        base: &VertexId,
    ) -> Result<ScalingAssignment, DiffError> {
        self.component_scalings_along(cert, base, &self.graph.spanning_tree())
    }

    /// As [`Self::component_scalings`], propagating along a caller-chosen spanning tree.
    pub fn component_scalings_along(
        &self,
        cert: &PlumbingCertificate,
        base: &VertexId,
        tree: &BTreeSet<EdgeId>,
    ) -> Result<ScalingAssignment, DiffError> {
        let CycleOutcome::Feasible { exponent: x } = &cert.outcome else {
            return Err(DiffError::InfeasibleCertificate);
        };
        if self.graph.vertex(base.as_str()).is_none() {
            return Err(DiffError::UnknownId {
                kind: "vertex",
                id: base.to_string(),
            });
        }
        let dg = self.diff_dual_graph()?;
        let step = |e: &WeightedEdge| -> Result<Rational, DiffError> {
            if e.weight == 0 {
                return Ok(Rational::zero());
            }
            let xe = x
                .get(&e.edge)
                .ok_or_else(|| DiffError::Internal(format!("certificate has no exponent for {}", e.edge)))?;
            Ok(rat(i64::from(e.weight)) * xe)
        };
        let mut exponent: BTreeMap<VertexId, Rational> = BTreeMap::new();
        exponent.insert(base.clone(), Rational::zero());
        let mut queue = VecDeque::from([base.clone()]);
        while let Some(v) = queue.pop_front() {
            for e in dg.edges.iter().filter(|e| tree.contains(&e.edge)) {
                let delta = step(e)?;
                let next = if e.tail == v && !exponent.contains_key(&e.head) {
                    Some((e.head.clone(), &exponent[&v] + &delta))
                } else if e.head == v && !exponent.contains_key(&e.tail) {
                    Some((e.tail.clone(), &exponent[&v] - &delta))
                } else {
                    None
                };
                if let Some((w, value)) = next {
                    exponent.insert(w.clone(), value);
                    queue.push_back(w);
                }
            }
        }
        if exponent.len() != self.graph.vertices().len() {
            return Err(DiffError::Internal("spanning tree does not reach every vertex".into()));
        }
        for e in &dg.edges {
            if exponent[&e.head] != &exponent[&e.tail] + step(e)? {
                return Err(DiffError::Internal(format!(
                    "scalings are inconsistent across edge {}",
                    e.edge
                )));
            }
        }
        Ok(ScalingAssignment {
            base: base.clone(),
            exponent,
        })
    }
}

/// Union-find partition of the vertices by the given adjacencies, classes sorted by least element.
fn partition<'a>(
    graph: &DualGraph,
    links: impl Iterator<Item = (&'a VertexId, &'a VertexId)>,
) -> Vec<BTreeSet<VertexId>> {
    let n = graph.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (a, b) in links {
        let ia = graph.vertex_position(a.as_str()).expect("known vertex");
        let ib = graph.vertex_position(b.as_str()).expect("known vertex");
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    for (i, v) in graph.vertices().iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().insert(v.id.clone());
    }
    classes.into_values().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCheck {
    pub pass: bool,
    pub reasons: Vec<String>,
}

impl Default for NodeCheck {
    fn default() -> Self {
        NodeCheck {
            pass: true,
            reasons: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdvisoryCheck {
    pub sum: GaussianRational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Orientation {
    /// From the branch carrying the zero (or regular point) to the branch carrying the pole.
    Directed {
        zero_side: HalfEdgeId,
        pole_side: HalfEdgeId,
    },
    /// Both branches are simple poles.
    Unoriented,
}

/// Node of the differential dual graph. `tail → head` is the orientation when directed and the
/// half-edge order of the node otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub edge: EdgeId,
    pub weight: u32,
    pub orientation: Orientation,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Partially directed weighted dual graph of a compatible candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialDualGraph {
    pub base: DualGraph,
    pub edges: Vec<WeightedEdge>,
}

/// Signed edge multiplicities of a closed path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleVector {
    pub closing_edge: EdgeId,
    pub coefficients: BTreeMap<EdgeId, i64>,
}

impl DifferentialDualGraph {
    pub fn edge(&self, id: &str) -> Option<&WeightedEdge> {
        self.edges.iter().find(|e| e.edge.as_str() == id)
    }

    pub fn weights(&self) -> BTreeMap<EdgeId, u32> {
        self.edges.iter().map(|e| (e.edge.clone(), e.weight)).collect()
    }

    /// Fundamental cycles of the deterministic spanning tree, one per non-tree edge in id order.
    pub fn cycle_basis(&self) -> Vec<CycleVector> {
        self.cycle_basis_for(&self.base.spanning_tree())
    }

    pub fn cycle_basis_for(&self, tree: &BTreeSet<EdgeId>) -> Vec<CycleVector> {
        self.edges
            .iter()
            .filter(|e| !tree.contains(&e.edge))
            .map(|closing| {
                let mut coefficients: BTreeMap<EdgeId, i64> = BTreeMap::new();
                *coefficients.entry(closing.edge.clone()).or_default() += 1;
                // Return from head to tail inside the tree.
                for (e, forward) in self.tree_path(tree, &closing.head, &closing.tail) {
                    *coefficients.entry(e.edge.clone()).or_default() += if forward { 1 } else { -1 };
                }
                coefficients.retain(|_, c| *c != 0);
                CycleVector {
                    closing_edge: closing.edge.clone(),
                    coefficients,
                }
            })
            .collect()
    }

    /// Tree edges from `from` to `to`, each flagged with whether it is traversed tail to head.
    fn tree_path(&self, tree: &BTreeSet<EdgeId>, from: &VertexId, to: &VertexId) -> Vec<(&WeightedEdge, bool)> {
        let mut prev: BTreeMap<&VertexId, (&WeightedEdge, bool, &VertexId)> = BTreeMap::new();
        let mut seen: BTreeSet<&VertexId> = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for e in self.edges.iter().filter(|e| tree.contains(&e.edge)) {
                let step = if &e.tail == v {
                    Some((&e.head, true))
                } else if &e.head == v {
                    Some((&e.tail, false))
                } else {
                    None
                };
                if let Some((w, forward)) = step {
                    if seen.insert(w) {
                        prev.insert(w, (e, forward, v));
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (e, forward, p) = prev[cur];
            path.push((e, forward));
            cur = p;
        }
        path.reverse();
        path
    }

    /// Rows `α_c · w` of the logarithmic cycle equations over the weighted edges.
    fn constraint_rows(&self, basis: &[CycleVector], weighted: &[&WeightedEdge]) -> Vec<Vec<Rational>> {
        basis
            .iter()
            .map(|c| {
                weighted
                    .iter()
                    .map(|e| {
                        let alpha = c.coefficients.get(&e.edge).copied().unwrap_or(0);
                        rat(alpha * i64::from(e.weight))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn cycle_condition(&self) -> PlumbingCertificate {
        let basis = self.cycle_basis();
        let weighted: Vec<&WeightedEdge> = self.edges.iter().filter(|e| e.weight > 0).collect();
        let rows = self.constraint_rows(&basis, &weighted);
        // x = −(1 + s) with s ≥ 0 turns A x = 0 into A s = −A·1.
        let rhs: Vec<Rational> = rows.iter().map(|r| -r.iter().sum::<Rational>()).collect();
        let outcome = match nonnegative_solution(&rows, &rhs, weighted.len()) {
            Outcome::Feasible(s) => {
                let x: Vec<Rational> = s.into_iter().map(|si| -(Rational::one() + si)).collect();
                let scale = primitive_scaling(&x);
                CycleOutcome::Feasible {
                    exponent: weighted
                        .iter()
                        .zip(x)
                        .map(|(e, xe)| (e.edge.clone(), xe * &scale))
                        .collect(),
                }
            }
            Outcome::Infeasible(u) => {
                let scale = primitive_scaling(&u);
                CycleOutcome::Infeasible {
                    farkas: u.into_iter().map(|ui| ui * &scale).collect(),
                }
            }
        };
        PlumbingCertificate {
            cycle_basis: basis,
            weights: self.weights(),
            outcome,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleOutcome {
    /// Strictly negative log-moduli solving every cycle equation.
    Feasible {
        #[serde(with = "serde_rational::map")]
        exponent: BTreeMap<EdgeId, Rational>,
    },
    /// Multipliers of the basis cycles whose combination has a nonnegative nonzero weighted row.
    Infeasible {
        #[serde(with = "serde_rational::vec")]
        farkas: Vec<Rational>,
    },
}

/// Outcome of the cycle condition, self-contained so it can be checked without the candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingCertificate {
    pub cycle_basis: Vec<CycleVector>,
    pub weights: BTreeMap<EdgeId, u32>,
    pub outcome: CycleOutcome,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("edge {0} has no exponent")]
    MissingExponent(EdgeId),
    #[error("exponent of edge {0} is not negative")]
    NonNegativeExponent(EdgeId),
    #[error("cycle closed by {0} is not balanced")]
    Unbalanced(EdgeId),
    #[error("Farkas vector has {got} entries for {expected} cycles")]
    FarkasLength { expected: usize, got: usize },
    #[error("Farkas row is negative at edge {0}")]
    FarkasNegative(EdgeId),
    #[error("Farkas row vanishes")]
    FarkasZero,
}

impl PlumbingCertificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome, CycleOutcome::Feasible { .. })
    }

    /// `Σ_c u_c α_{c,e} w(e)` for every weighted edge.
    pub fn farkas_row(&self, farkas: &[Rational]) -> BTreeMap<EdgeId, Rational> {
        let mut row: BTreeMap<EdgeId, Rational> = self
            .weights
            .iter()
            .filter(|(_, &w)| w > 0)
            .map(|(e, _)| (e.clone(), Rational::zero()))
            .collect();
        for (c, u) in self.cycle_basis.iter().zip(farkas) {
            for (e, &alpha) in &c.coefficients {
                if let Some(entry) = row.get_mut(e) {
                    *entry += u * rat(alpha * i64::from(self.weights[e]));
                }
            }
        }
        row
    }

    /// Re-checks the certificate exactly against its own cycle basis and weights.
    pub fn verify(&self) -> Result<(), CertificateError> {
        match &self.outcome {
            CycleOutcome::Feasible { exponent } => {
                for (e, &w) in &self.weights {
                    if w == 0 {
                        continue;
                    }
                    let x = exponent
                        .get(e)
                        .ok_or_else(|| CertificateError::MissingExponent(e.clone()))?;
                    if !x.is_negative() {
                        return Err(CertificateError::NonNegativeExponent(e.clone()));
                    }
                }
                for c in &self.cycle_basis {
                    let total: Rational = c
                        .coefficients
                        .iter()
                        .filter(|(e, _)| self.weights.get(*e).is_some_and(|&w| w > 0))
                        .map(|(e, &alpha)| rat(alpha * i64::from(self.weights[e])) * &exponent[e])
                        .sum();
                    if !total.is_zero() {
                        return Err(CertificateError::Unbalanced(c.closing_edge.clone()));
                    }
                }
                Ok(())
            }
            CycleOutcome::Infeasible { farkas } => {
                if farkas.len() != self.cycle_basis.len() {
                    return Err(CertificateError::FarkasLength {
                        expected: self.cycle_basis.len(),
                        got: farkas.len(),
                    });
                }
                let row = self.farkas_row(farkas);
                if let Some((e, _)) = row.iter().find(|(_, v)| v.is_negative()) {
                    return Err(CertificateError::FarkasNegative(e.clone()));
                }
                if row.values().all(Zero::is_zero) {
                    return Err(CertificateError::FarkasZero);
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", content = "detail", rename_all = "snake_case")]
pub enum Obstruction {
    Compatibility(Vec<EdgeId>),
    Residue(Vec<EdgeId>),
    ResidueTheorem(Vec<(EdgeId, NodeCheck)>),
    Cycle(PlumbingCertificate),
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Compatibility(e) => write!(f, "compatibility fails at {}", list(e)),
            Obstruction::Residue(e) => write!(f, "residues do not cancel at {}", list(e)),
            Obstruction::ResidueTheorem(nodes) => {
                let ids: Vec<&EdgeId> = nodes.iter().map(|(e, _)| e).collect();
                write!(f, "residue theorem obstruction at {}", list(&ids))
            }
            Obstruction::Cycle(_) => write!(f, "cycle condition has no solution"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail")]
pub enum PlumbingVerdict {
    Plumbable(PlumbingCertificate),
    NotPlumbable(Obstruction),
    Undecided(String),
}

/// How [`CandidateDifferential::to_stable`] establishes its precondition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StableHypothesis {
    /// Run [`CandidateDifferential::is_plumbable`] and require `Plumbable`.
    CheckPlumbable,
    /// The caller asserts the sufficient criterion for poles with residues.
    CallerAsserted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentData {
    pub leg_order: BTreeMap<LegId, i64>,
    pub branch_order: BTreeMap<HalfEdgeId, i64>,
    pub residue: BTreeMap<HalfEdgeId, GaussianRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ComponentForm {
    Vanishes,
    Kept(ComponentData),
}

/// Section of the dualizing sheaf: per component either zero or data with at worst simple poles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableDifferential {
    pub graph: DualGraph,
    pub components: BTreeMap<VertexId, ComponentForm>,
}

impl StableDifferential {
    pub fn vanishes_on(&self, v: &str) -> bool {
        matches!(self.components.get(v), Some(ComponentForm::Vanishes))
    }

    fn kept_order(&self, v: &VertexId, h: &HalfEdgeId) -> Option<i64> {
        match self.components.get(v) {
            Some(ComponentForm::Kept(d)) => d.branch_order.get(h).copied(),
            _ => None,
        }
    }

    pub fn polarly_related_components(&self) -> Vec<BTreeSet<VertexId>> {
        let simple: Vec<(&VertexId, &VertexId)> = self
            .graph
            .edges()
            .iter()
            .filter(|e| {
                e.half_edges
                    .iter()
                    .all(|h| self.kept_order(&h.vertex, &h.id) == Some(-1))
            })
            .map(|e| (&e.half_edges[0].vertex, &e.half_edges[1].vertex))
            .collect();
        partition(&self.graph, simple.into_iter())
    }

    /// Classes on which the differential does not vanish.
    pub fn kept_classes(&self) -> Vec<BTreeSet<VertexId>> {
        self.polarly_related_components()
            .into_iter()
            .filter(|c| c.iter().all(|v| !self.vanishes_on(v.as_str())))
            .collect()
    }

    /// Checks the defining properties, returning the first failure.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.components.values().all(|f| matches!(f, ComponentForm::Vanishes)) {
            return Err("every component vanishes".into());
        }
        for (v, form) in &self.components {
            if let ComponentForm::Kept(d) = form {
                if let Some((h, k)) = d.branch_order.iter().find(|(_, &k)| k < -1) {
                    return Err(format!("component {v} has a pole of order {} at {h}", -k));
                }
            }
        }
        for e in self.graph.edges() {
            let [a, b] = &e.half_edges;
            if self.kept_order(&a.vertex, &a.id) == Some(-1) && self.kept_order(&b.vertex, &b.id) == Some(-1) {
                let res = |v: &VertexId, h: &HalfEdgeId| match &self.components[v] {
                    ComponentForm::Kept(d) => d.residue.get(h).cloned().unwrap_or_else(GaussianRational::zero),
                    ComponentForm::Vanishes => GaussianRational::zero(),
                };
                if !(res(&a.vertex, &a.id) + res(&b.vertex, &b.id)).is_zero() {
                    return Err(format!("residues at node {} do not cancel", e.id));
                }
            }
        }
        Ok(())
    }
}

/// Log-scale of each component relative to a base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingAssignment {
    pub base: VertexId,
    #[serde(with = "serde_rational::map")]
    pub exponent: BTreeMap<VertexId, Rational>,
}

/// The unique order assignment on a stable compact-type graph with prescribed leg orders.
///
/// The branch on the side `A` of a node has order `2g(A) − 2 − Σ legs(A)`. Residues stay unset.
pub fn unique_limit_on_compact_type(
    graph: &DualGraph,
    leg_order: &BTreeMap<LegId, i64>,
) -> Result<CandidateDifferential, DiffError> {
    if !graph.is_compact_type() {
        return Err(DiffError::NotCompactType);
    }
    if !graph.is_stable() {
        return Err(DiffError::NotStable);
    }
    let total: i64 = leg_order.values().sum();
    let genus = graph.arithmetic_genus() as i64;
    if total != 2 * genus - 2 {
        return Err(DiffError::Impossible(format!(
            "leg orders sum to {total}, not 2g - 2 = {}",
            2 * genus - 2
        )));
    }
    let mut branch_order = BTreeMap::new();
    for e in graph.edges() {
        for side in 0..2 {
            let h = &e.half_edges[side];
            let part = side_of_cut(graph, &e.id, &h.vertex);
            let g_part: i64 = part
                .iter()
                .map(|v| i64::from(graph.vertex(v.as_str()).expect("vertex").genus))
                .sum();
            let legs: i64 = graph
                .legs()
                .iter()
                .filter(|l| part.contains(&l.vertex))
                .map(|l| {
                    leg_order.get(&l.id).copied().ok_or_else(|| DiffError::MissingOrder {
                        kind: "leg",
                        id: l.id.to_string(),
                    })
                })
                .sum::<Result<i64, DiffError>>()?;
            branch_order.insert(h.id.clone(), 2 * g_part - 2 - legs);
        }
    }
    let c = CandidateDifferential::new(graph.clone(), leg_order.clone(), branch_order, BTreeMap::new())?;
    if let Some(bad) = c.incompatible_edges().first() {
        return Err(DiffError::Impossible(format!(
            "forced orders at {bad} are incompatible"
        )));
    }
    Ok(c)
}

/// Vertices reachable from `start` without crossing `cut`.
fn side_of_cut(graph: &DualGraph, cut: &EdgeId, start: &VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        for e in graph.edges().iter().filter(|e| &e.id != cut) {
            let [a, b] = &e.half_edges;
            for (x, y) in [(a, b), (b, a)] {
                if x.vertex == v && seen.insert(y.vertex.clone()) {
                    queue.push_back(y.vertex.clone());
                }
            }
        }
    }
    seen
}
