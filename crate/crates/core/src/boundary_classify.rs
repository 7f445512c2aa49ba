//! Membership of pointed boundary differentials in closures of stratum components.
//!
//! Covered: the hyperelliptic component of the minimal stratum over curves with one node (two
//! components, irreducible, or irreducible blown up at its node), and the odd component of
//! `ΩM₃(4)` over the same shapes. Inputs are candidate differentials with a single leg `Z`; facts
//! about Weierstrass points, torsion and linear equivalence come from [`GeometryFlags`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate_diff::{CandidateDifferential, DiffError, PlumbingVerdict, StableHypothesis};
use crate::curve_graph::DualGraph;
use crate::flags::{FlagError, GeometryFlags};
use crate::ids::{HalfEdgeId, PointId, VertexId};
use crate::spin_parity::{spin_of_candidate, Parity, SpinError};
use crate::strata_taxonomy::ComponentTag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Flags(#[from] FlagError),
    #[error("unsupported boundary shape: {0}")]
    Unsupported(String),
    #[error("the genus-3 classifier needs arithmetic genus 3, got {0}")]
    WrongGenus(u64),
    #[error("inconsistent flags: {0}")]
    InconsistentFlags(String),
    #[error("classifier says {tag} (parity {expected}) but the spin structure is {actual}")]
    ParityMismatch {
        tag: ComponentTag,
        expected: Parity,
        actual: Parity,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Membership {
    InClosure,
    NotInClosure,
    Undecided(String),
}

/// Per-component membership with the rules that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryVerdict {
    pub shape: Shape,
    pub membership: BTreeMap<ComponentTag, Membership>,
    pub reasons: Vec<String>,
    /// Dimension of the fibre of the forgetful map, for hyperelliptic members.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fibre_dimension: Option<usize>,
}

impl BoundaryVerdict {
    pub fn get(&self, tag: ComponentTag) -> Option<&Membership> {
        self.membership.get(&tag)
    }

    fn merge(mut self, other: BoundaryVerdict) -> Self {
        self.membership.extend(other.membership);
        for reason in other.reasons {
            if !self.reasons.contains(&reason) {
                self.reasons.push(reason);
            }
        }
        self.fibre_dimension = self.fibre_dimension.or(other.fibre_dimension);
        self
    }
}

impl fmt::Display for BoundaryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .membership
            .iter()
            .map(|(tag, m)| match m {
                Membership::InClosure => format!("InClosure({tag})"),
                Membership::NotInClosure => format!("NotInClosure({tag})"),
                Membership::Undecided(r) => format!("Undecided({tag}: {r})"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Boundary shapes the classifiers recognize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Two smooth components meeting once; `z_side` carries `Z`.
    CompactType {
        z_side: VertexId,
        other: VertexId,
        z_branch: HalfEdgeId,
        other_branch: HalfEdgeId,
    },
    /// One component with a self-node, `Z` smooth.
    Irreducible {
        vertex: VertexId,
        branches: [HalfEdgeId; 2],
    },
    /// A component joined twice to a rational bridge carrying `Z`.
    BlownUp {
        vertex: VertexId,
        bridge: VertexId,
        /// Branches on the positive-genus side.
        branches: [HalfEdgeId; 2],
        /// Their partners on the bridge.
        bridge_branches: [HalfEdgeId; 2],
    },
    Other {
        description: String,
    },
}

/// Reads off the boundary shape and the marked point.
pub fn detect_shape(graph: &DualGraph) -> (Shape, Option<PointId>) {
    let z = match graph.legs() {
        [leg] => Some(PointId::from(&leg.id)),
        _ => None,
    };
    let other = |d: &str| Shape::Other {
        description: d.to_owned(),
    };
    if z.is_none() {
        return (other("expected exactly one marked point"), None);
    }
    let z_vertex = &graph.legs()[0].vertex;
    let shape = match (graph.vertices(), graph.edges()) {
        ([v], [e]) if e.is_loop() => Shape::Irreducible {
            vertex: v.id.clone(),
            branches: [e.half_edges[0].id.clone(), e.half_edges[1].id.clone()],
        },
        ([_, _], [e]) if !e.is_loop() => {
            let zs = e.half_edges.iter().position(|h| &h.vertex == z_vertex).expect("tree");
            let (zh, oh) = (&e.half_edges[zs], &e.half_edges[1 - zs]);
            let genera_positive = graph.vertices().iter().all(|v| v.genus >= 1);
            if genera_positive {
                Shape::CompactType {
                    z_side: zh.vertex.clone(),
                    other: oh.vertex.clone(),
                    z_branch: zh.id.clone(),
                    other_branch: oh.id.clone(),
                }
            } else {
                other("two components meeting once, one of them rational")
            }
        }
        ([_, _], [e1, e2]) if !e1.is_loop() && !e2.is_loop() => {
            let bridge = graph.vertex(z_vertex.as_str()).expect("leg vertex");
            let side = |e: &crate::curve_graph::Edge| {
                let b = e.half_edges.iter().position(|h| &h.vertex == z_vertex).expect("bridge");
                (e.half_edges[1 - b].clone(), e.half_edges[b].id.clone())
            };
            let (a1, b1) = side(e1);
            let (a2, b2) = side(e2);
            if bridge.genus == 0 && a1.vertex == a2.vertex {
                Shape::BlownUp {
                    vertex: a1.vertex.clone(),
                    bridge: bridge.id.clone(),
                    branches: [a1.id, a2.id],
                    bridge_branches: [b1, b2],
                }
            } else {
                other("two components meeting twice without a rational bridge carrying Z")
            }
        }
        _ => other("more than one node or more than two components"),
    };
    (shape, z)
}

fn verdict(shape: &Shape, tag: ComponentTag, m: Membership, reasons: Vec<String>) -> BoundaryVerdict {
    BoundaryVerdict {
        shape: shape.clone(),
        membership: BTreeMap::from([(tag, m)]),
        reasons,
        fibre_dimension: None,
    }
}

fn genus_of(graph: &DualGraph, v: &VertexId) -> u32 {
    graph.vertex(v.as_str()).expect("vertex").genus
}

fn order(c: &CandidateDifferential, p: &str) -> i64 {
    c.leg_order(p)
        .or_else(|| c.branch_order(p))
        .expect("every point has an order")
}

/// Weierstrass status of a point on a component, with the genus-1 conventions: a node of an
/// elliptic component is a fixed point of the involution `x ↦ −x` centred at it, and the other
/// special point is Weierstrass for that involution exactly when the difference is 2-torsion.
fn weierstrass_on(
    graph: &DualGraph,
    flags: &GeometryFlags,
    v: &VertexId,
    p: &PointId,
    centre: Option<&PointId>,
) -> Option<bool> {
    if genus_of(graph, v) == 1 {
        match centre {
            None => return Some(true),
            Some(q) => {
                if let Some(d) = flags.torsion_between(p.as_str(), q.as_str()) {
                    return Some(d == 2);
                }
            }
        }
    }
    flags.is_weierstrass(p.as_str())
}

fn flag_status(value: Option<bool>, what: &str, reasons: &mut Vec<String>) -> Result<bool, Membership> {
    match value {
        Some(true) => Ok(true),
        Some(false) => {
            reasons.push(format!("flagged false: {what}"));
            Err(Membership::NotInClosure)
        }
        None => Err(Membership::Undecided(format!("missing flag: {what}"))),
    }
}

/// Number of kept polarly related classes minus one, through the stable differential.
fn fibre_dimension(c: &CandidateDifferential) -> Option<usize> {
    let s = c.to_stable(StableHypothesis::CallerAsserted).ok()?;
    Some(s.kept_classes().len().saturating_sub(1))
}

/// A double zero of a holomorphic differential on a genus-2 component is a Weierstrass point.
fn implied_weierstrass(
    c: &CandidateDifferential,
    flags: &GeometryFlags,
    vertex: &VertexId,
    p: &PointId,
) -> Result<bool, ClassifyError> {
    let graph = c.graph();
    let holomorphic = graph
        .edges()
        .iter()
        .flat_map(|e| e.half_edges.iter())
        .filter(|h| &h.vertex == vertex)
        .all(|h| order(c, h.id.as_str()) >= 0);
    if genus_of(graph, vertex) != 2 || !holomorphic || order(c, p.as_str()) != 2 {
        return Ok(false);
    }
    if flags.is_weierstrass(p.as_str()) == Some(false) {
        return Err(ClassifyError::InconsistentFlags(format!(
            "a double zero {p} of a holomorphic differential on a genus-2 curve is a Weierstrass point"
        )));
    }
    Ok(true)
}

/// On a genus-2 component the branches of a bridge with orders (1, 1) are conjugate and a branch
/// with order 2 is a Weierstrass point, since both are divisors of a holomorphic differential.
fn implied_on_genus_two(
    c: &CandidateDifferential,
    flags: &GeometryFlags,
    vertex: &VertexId,
    branches: &[HalfEdgeId; 2],
) -> Result<bool, ClassifyError> {
    if genus_of(c.graph(), vertex) != 2 {
        return Ok(false);
    }
    let [a, b] = branches;
    match [order(c, a.as_str()), order(c, b.as_str())] {
        [1, 1] if flags.are_conjugate(a.as_str(), b.as_str()) == Some(false) => Err(ClassifyError::InconsistentFlags(
            format!("simple zeros {a} and {b} of a holomorphic differential on a genus-2 curve are conjugate"),
        )),
        [1, 1] => Ok(true),
        [2, 0] => implied_weierstrass(c, flags, vertex, &PointId::from(a)),
        [0, 2] => implied_weierstrass(c, flags, vertex, &PointId::from(b)),
        _ => Ok(false),
    }
}

/// Membership in the closure of the hyperelliptic component of the minimal stratum.
pub fn classify_hyp_minimal(
    c: &CandidateDifferential,
    flags: &GeometryFlags,
) -> Result<BoundaryVerdict, ClassifyError> {
    let graph = c.graph();
    flags.validate(graph)?;
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(DiffError::Invalid(violations).into());
    }
    let g = graph.arithmetic_genus() as i64;
    let tag = ComponentTag::Hyp;
    let (shape, z) = detect_shape(graph);
    let Some(z) = z else {
        return Ok(verdict(&shape, tag, Membership::Undecided("shape".into()), vec![]));
    };
    let implied = match &shape {
        Shape::BlownUp { vertex, branches, .. } => implied_on_genus_two(c, flags, vertex, branches)?,
        Shape::CompactType {
            other, other_branch, ..
        } => implied_weierstrass(c, flags, other, &PointId::from(other_branch))?,
        _ => false,
    };
    let mut reasons = Vec::new();
    let outcome: Result<(), Membership> = match &shape {
        Shape::CompactType {
            z_side,
            other,
            z_branch,
            other_branch,
        } => (|| {
            let g_other = i64::from(genus_of(graph, other));
            let expected = [
                (z.as_str(), 2 * g - 2),
                (z_branch.as_str(), -2 * g_other),
                (other_branch.as_str(), 2 * g_other - 2),
            ];
            if expected.iter().any(|&(p, k)| order(c, p) != k) {
                reasons.push(format!(
                    "orders must be Z: {}, {z_branch}: {}, {other_branch}: {} so that the differential vanishes on the component of Z",
                    2 * g - 2,
                    -2 * g_other,
                    2 * g_other - 2
                ));
                return Err(Membership::NotInClosure);
            }
            reasons.push(
                "the differential vanishes on the component of Z and has its zero of maximal order at the far node"
                    .into(),
            );
            for v in [z_side, other] {
                flag_status(
                    flags.is_hyperelliptic(graph, v.as_str()),
                    &format!("{v} is hyperelliptic"),
                    &mut reasons,
                )?;
            }
            let n1 = PointId::from(z_branch);
            let n2 = PointId::from(other_branch);
            flag_status(
                weierstrass_on(graph, flags, z_side, &n1, None),
                &format!("{n1} is a Weierstrass point"),
                &mut reasons,
            )?;
            if implied {
                reasons.push(format!(
                    "{n2} is a Weierstrass point as a double zero on a genus-2 curve"
                ));
            } else {
                flag_status(
                    weierstrass_on(graph, flags, other, &n2, None),
                    &format!("{n2} is a Weierstrass point"),
                    &mut reasons,
                )?;
            }
            flag_status(
                weierstrass_on(graph, flags, z_side, &z, Some(&n1)),
                &format!("{z} is a Weierstrass point of {z_side}"),
                &mut reasons,
            )?;
            reasons.push("both nodes and Z are Weierstrass points".into());
            Ok(())
        })(),
        Shape::Irreducible { branches, .. } => (|| {
            if order(c, z.as_str()) != 2 * g - 2 || branches.iter().any(|h| order(c, h.as_str()) != -1) {
                reasons.push(format!(
                    "needs a zero of order 2g - 2 = {} at Z and simple poles at the node (the printed order 2g + 2 is read as 2g - 2)",
                    2 * g - 2
                ));
                return Err(Membership::NotInClosure);
            }
            reasons.push(format!(
                "zero of order 2g - 2 = {} at Z with simple poles at the node (the printed order 2g + 2 is read as 2g - 2)",
                2 * g - 2
            ));
            let [a, b] = branches;
            flag_status(
                flags.are_conjugate(a.as_str(), b.as_str()),
                &format!("{a} and {b} are conjugate"),
                &mut reasons,
            )?;
            Ok(())
        })(),
        Shape::BlownUp { branches, .. } => (|| {
            if branches.iter().any(|h| order(c, h.as_str()) != g - 2) {
                reasons.push(format!("needs zeros of order g - 2 = {} at both node branches", g - 2));
                return Err(Membership::NotInClosure);
            }
            reasons.push(format!("zeros of order g - 2 = {} at both node branches", g - 2));
            let [a, b] = branches;
            if implied {
                reasons.push(format!("{a} and {b} are conjugate as simple zeros on a genus-2 curve"));
                return Ok(());
            }
            flag_status(
                flags.are_conjugate(a.as_str(), b.as_str()),
                &format!("{a} and {b} are conjugate"),
                &mut reasons,
            )?;
            Ok(())
        })(),
        Shape::Other { description } => Err(Membership::Undecided(format!("shape: {description}"))),
    };
    let mut out = match outcome {
        Ok(()) => verdict(&shape, tag, Membership::InClosure, reasons),
        Err(m) => verdict(&shape, tag, m, reasons),
    };
    if out.get(tag) == Some(&Membership::InClosure) {
        out.fibre_dimension = fibre_dimension(c);
    }
    Ok(out)
}

/// Membership in the closure of the odd component of `ΩM₃(4)`.
pub fn classify_g3_odd(c: &CandidateDifferential, flags: &GeometryFlags) -> Result<BoundaryVerdict, ClassifyError> {
    let graph = c.graph();
    flags.validate(graph)?;
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(DiffError::Invalid(violations).into());
    }
    let g = graph.arithmetic_genus();
    if g != 3 {
        return Err(ClassifyError::WrongGenus(g));
    }
    let tag = ComponentTag::Odd;
    let (shape, z) = detect_shape(graph);
    let Some(z) = z else {
        return Err(ClassifyError::Unsupported("expected exactly one marked point".into()));
    };
    let far_implied = match &shape {
        Shape::CompactType {
            other, other_branch, ..
        } => implied_weierstrass(c, flags, other, &PointId::from(other_branch))?,
        _ => false,
    };
    let mut reasons = Vec::new();
    let outcome: Result<(), Membership> = match &shape {
        Shape::CompactType {
            z_side,
            other,
            z_branch,
            other_branch,
        } => {
            let n_z = PointId::from(z_branch);
            let n_other = PointId::from(other_branch);
            if genus_of(graph, z_side) == 1 {
                (|| {
                    let d = flags
                        .torsion_between(z.as_str(), n_z.as_str())
                        .ok_or_else(|| Membership::Undecided(format!("missing flag: torsion order of {z} - {n_z}")))?;
                    match d {
                        4 => reasons.push(format!("{z} - {n_z} is a primitive 4-torsion point")),
                        2 => {
                            reasons.push(format!(
                                "{z} - {n_z} is 2-torsion: the theta characteristic on the elliptic side is trivial"
                            ));
                            return Err(Membership::NotInClosure);
                        }
                        1 => {
                            reasons.push(format!("{z} - {n_z} is trivial"));
                            return Err(Membership::NotInClosure);
                        }
                        d => {
                            reasons.push(format!("{z} - {n_z} has order {d}, not a primitive 4-torsion point"));
                            return Err(Membership::NotInClosure);
                        }
                    }
                    if far_implied {
                        reasons.push(format!(
                            "{n_other} is a Weierstrass point of {other} as a double zero on a genus-2 curve"
                        ));
                        return Ok(());
                    }
                    flag_status(
                        flags.is_weierstrass(n_other.as_str()),
                        &format!("{n_other} is a Weierstrass point of {other}"),
                        &mut reasons,
                    )?;
                    Ok(())
                })()
            } else {
                (|| {
                    let terms = BTreeMap::from([(z.clone(), 4), (n_z.clone(), -2)]);
                    let lin = flags.is_canonical(&terms);
                    let z_w = flags.is_weierstrass(z.as_str());
                    if lin == Some(true) && z_w == Some(true) && flags.is_weierstrass(n_z.as_str()) == Some(false) {
                        return Err(Membership::Undecided(String::new()));
                    }
                    if z_w == Some(true) {
                        reasons.push("Z cannot be a Weierstrass point".into());
                        return Err(Membership::NotInClosure);
                    }
                    flag_status(lin, &format!("4{z} - 2{n_z} ~ K"), &mut reasons)?;
                    flag_status(
                        z_w.map(|w| !w),
                        &format!("{z} is not a Weierstrass point"),
                        &mut reasons,
                    )?;
                    Ok(())
                })()
            }
        }
        Shape::Irreducible { branches, .. } => {
            if branches.iter().all(|h| order(c, h.as_str()) == -1) {
                Err(Membership::Undecided(
                    "membership depends on the curve of admissible triples (N1, N2, Z), which flags do not describe"
                        .into(),
                ))
            } else {
                match c.is_plumbable()? {
                    PlumbingVerdict::NotPlumbable(o) => {
                        reasons.push(format!("not a limit differential: {o}"));
                        Err(Membership::NotInClosure)
                    }
                    _ => Err(Membership::Undecided("self-node without simple poles".into())),
                }
            }
        }
        Shape::BlownUp {
            vertex,
            branches,
            bridge_branches,
            ..
        } => {
            let orders = [order(c, branches[0].as_str()), order(c, branches[1].as_str())];
            debug_assert_eq!(bridge_branches.len(), 2);
            match orders {
                [2, 0] | [0, 2] => {
                    let w = if orders[0] == 2 { &branches[0] } else { &branches[1] };
                    reasons.push(format!("double zero at {w} and a pole of order 4 on the bridge"));
                    if implied_on_genus_two(c, flags, vertex, branches)? {
                        reasons.push(format!(
                            "{w} is a Weierstrass point of {vertex} as a double zero on a genus-2 curve"
                        ));
                        Ok(())
                    } else {
                        flag_status(
                            flags.is_weierstrass(w.as_str()),
                            &format!("{w} is a Weierstrass point of {vertex}"),
                            &mut reasons,
                        )
                        .map(|_| ())
                    }
                }
                [1, 1] => {
                    reasons.push("simple zeros at both node branches and two poles of order 3 on the bridge".into());
                    let [a, b] = branches;
                    if implied_on_genus_two(c, flags, vertex, branches)? {
                        reasons.push(format!("{a} and {b} are conjugate as simple zeros on a genus-2 curve"));
                        Ok(())
                    } else {
                        flag_status(
                            flags.are_conjugate(a.as_str(), b.as_str()),
                            &format!("{a} and {b} are conjugate"),
                            &mut reasons,
                        )
                        .map(|_| ())
                    }
                }
                _ => {
                    reasons.push(format!("orders {orders:?} at the node branches match neither form"));
                    Err(Membership::NotInClosure)
                }
            }
        }
        Shape::Other { description } => return Err(ClassifyError::Unsupported(description.clone())),
    };
    if let Err(Membership::Undecided(r)) = &outcome {
        if r.is_empty() {
            return Err(ClassifyError::InconsistentFlags(
                "Z Weierstrass with 4Z - 2N ~ K forces N to be a Weierstrass point".into(),
            ));
        }
    }
    Ok(match outcome {
        Ok(()) => verdict(&shape, tag, Membership::InClosure, reasons),
        Err(m) => verdict(&shape, tag, m, reasons),
    })
}

/// All classifiers that apply: hyperelliptic always, odd in genus 3.
pub fn classify(c: &CandidateDifferential, flags: &GeometryFlags) -> Result<BoundaryVerdict, ClassifyError> {
    let hyp = classify_hyp_minimal(c, flags)?;
    if c.graph().arithmetic_genus() == 3 {
        match classify_g3_odd(c, flags) {
            Ok(odd) => Ok(hyp.merge(odd)),
            Err(ClassifyError::Unsupported(shape)) => {
                let odd = verdict(
                    &hyp.shape,
                    ComponentTag::Odd,
                    Membership::Undecided(format!("shape: {shape}")),
                    vec![],
                );
                Ok(hyp.merge(odd))
            }
            Err(e) => Err(e),
        }
    } else {
        Ok(hyp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCheck {
    pub tag: ComponentTag,
    pub expected: Parity,
    pub actual: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub verdict: BoundaryVerdict,
    pub checks: Vec<ParityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Compares the classifier's parity with the spin structure of the candidate.
pub fn cross_check_parity(
    c: &CandidateDifferential,
    flags: &GeometryFlags,
) -> Result<ConsistencyReport, ClassifyError> {
    let verdict = classify(c, flags)?;
    let g = c.graph().arithmetic_genus();
    let expectations: Vec<(ComponentTag, Parity)> = verdict
        .membership
        .iter()
        .filter(|(_, m)| **m == Membership::InClosure)
        .filter_map(|(&tag, _)| match tag {
            ComponentTag::Odd => Some((tag, Parity::Odd)),
            ComponentTag::Even => Some((tag, Parity::Even)),
            ComponentTag::Hyp => Some((tag, Parity::of(g.div_ceil(2)))),
            _ => None,
        })
        .collect();
    if expectations.is_empty() {
        return Ok(ConsistencyReport {
            verdict,
            checks: Vec::new(),
            skipped: Some("no component with a parity contains this differential".into()),
        });
    }
    let spin = match spin_of_candidate(c, flags) {
        Ok(s) => s,
        Err(
            e @ (SpinError::NoBackend { .. }
            | SpinError::MissingFlag(_)
            | SpinError::NotCompactType
            | SpinError::OddOrder { .. }),
        ) => {
            return Ok(ConsistencyReport {
                verdict,
                checks: Vec::new(),
                skipped: Some(e.to_string()),
            })
        }
        Err(e) => {
            return Err(ClassifyError::InconsistentFlags(format!(
                "member of a component but no spin structure: {e}"
            )))
        }
    };
    let actual = spin.parity();
    let mut checks = Vec::new();
    for (tag, expected) in expectations {
        if expected != actual {
            return Err(ClassifyError::ParityMismatch { tag, expected, actual });
        }
        checks.push(ParityCheck { tag, expected, actual });
    }
    Ok(ConsistencyReport {
        verdict,
        checks,
        skipped: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::{CanonicalEquivalenceFlag, ConjugateFlag};

    fn delta1_elliptic() -> CandidateDifferential {
        let g = DualGraph::builder()
            .vertex("X1", 1)
            .vertex("X2", 2)
            .edge("N", ("N1", "X1"), ("N2", "X2"))
            .leg("Z", "X1")
            .build()
            .unwrap();
        CandidateDifferential::from_orders(g, &[("Z", 4)], &[("N1", -4), ("N2", 2)]).unwrap()
    }

    fn blown_up(orders: [i64; 2]) -> CandidateDifferential {
        let g = DualGraph::builder()
            .vertex("X", 2)
            .vertex("P", 0)
            .edge("A", ("N1", "X"), ("P1", "P"))
            .edge("B", ("N2", "X"), ("P2", "P"))
            .leg("Z", "P")
            .build()
            .unwrap();
        CandidateDifferential::from_orders(
            g,
            &[("Z", 4)],
            &[
                ("N1", orders[0]),
                ("N2", orders[1]),
                ("P1", -2 - orders[0]),
                ("P2", -2 - orders[1]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn four_torsion_is_odd_and_two_torsion_is_hyp() {
        let c = delta1_elliptic();
        let flags = GeometryFlags {
            torsion_order: BTreeMap::from([("Z".into(), 4)]),
            weierstrass: BTreeMap::from([("N2".into(), true)]),
            ..Default::default()
        };
        let v = classify(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::InClosure));
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::NotInClosure));
        assert_eq!(cross_check_parity(&c, &flags).unwrap().checks.len(), 1);

        let flags = GeometryFlags {
            torsion_order: BTreeMap::from([("Z".into(), 2)]),
            ..flags
        };
        let v = classify(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::NotInClosure));
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::InClosure));
        assert_eq!(v.fibre_dimension, Some(0));
        let report = cross_check_parity(&c, &flags).unwrap();
        assert_eq!(report.checks[0].actual, Parity::Even);
    }

    #[test]
    fn missing_torsion_is_undecided() {
        let v = classify_g3_odd(&delta1_elliptic(), &GeometryFlags::default()).unwrap();
        assert!(matches!(v.get(ComponentTag::Odd), Some(Membership::Undecided(_))));
    }

    #[test]
    fn genus_two_side_rejects_weierstrass_z() {
        let g = DualGraph::builder()
            .vertex("X1", 1)
            .vertex("X2", 2)
            .edge("N", ("N1", "X1"), ("N2", "X2"))
            .leg("Z", "X2")
            .build()
            .unwrap();
        let c = CandidateDifferential::from_orders(g, &[("Z", 4)], &[("N1", 0), ("N2", -2)]).unwrap();
        let lin = CanonicalEquivalenceFlag {
            terms: BTreeMap::from([("Z".into(), 4), ("N2".into(), -2)]),
            holds: true,
        };
        let flags = GeometryFlags {
            weierstrass: BTreeMap::from([("Z".into(), true), ("N2".into(), true)]),
            canonical_equivalence: vec![lin.clone()],
            ..Default::default()
        };
        let v = classify_g3_odd(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::NotInClosure));
        assert!(v.reasons.iter().any(|r| r == "Z cannot be a Weierstrass point"));
        let flags = GeometryFlags {
            weierstrass: BTreeMap::from([("Z".into(), false)]),
            canonical_equivalence: vec![lin],
            ..Default::default()
        };
        let v = classify_g3_odd(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::InClosure));
        assert_eq!(cross_check_parity(&c, &flags).unwrap().checks[0].actual, Parity::Odd);
    }

    #[test]
    fn conjugate_bridge_is_in_both_closures() {
        let c = blown_up([1, 1]);
        let flags = GeometryFlags {
            conjugate: vec![ConjugateFlag {
                points: ["N1".into(), "N2".into()],
                holds: true,
            }],
            ..Default::default()
        };
        let v = classify(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::InClosure));
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::InClosure));
        assert_eq!(v.fibre_dimension, Some(0));
    }

    #[test]
    fn weierstrass_double_zero_on_bridge_form() {
        let c = blown_up([2, 0]);
        let v = classify(&c, &GeometryFlags::default()).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::InClosure));
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::NotInClosure));
        let flags = GeometryFlags {
            weierstrass: BTreeMap::from([("N1".into(), false)]),
            ..Default::default()
        };
        assert!(matches!(classify(&c, &flags), Err(ClassifyError::InconsistentFlags(_))));
    }

    #[test]
    fn bridge_branches_with_simple_zeros_are_conjugate_on_genus_two() {
        let c = blown_up([1, 1]);
        let v = classify(&c, &GeometryFlags::default()).unwrap();
        assert_eq!(v.get(ComponentTag::Odd), Some(&Membership::InClosure));
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::InClosure));
        let flags = GeometryFlags {
            conjugate: vec![ConjugateFlag {
                points: ["N1".into(), "N2".into()],
                holds: false,
            }],
            ..Default::default()
        };
        assert!(matches!(classify(&c, &flags), Err(ClassifyError::InconsistentFlags(_))));
    }

    #[test]
    fn irreducible_with_simple_poles() {
        let g = DualGraph::builder()
            .vertex("X", 2)
            .edge("N", ("N1", "X"), ("N2", "X"))
            .leg("Z", "X")
            .build()
            .unwrap();
        let c = CandidateDifferential::from_orders(g, &[("Z", 4)], &[("N1", -1), ("N2", -1)])
            .unwrap()
            .with_residue("N1", crate::exact::GaussianRational::real(1))
            .with_residue("N2", crate::exact::GaussianRational::real(-1));
        let flags = GeometryFlags {
            conjugate: vec![ConjugateFlag {
                points: ["N1".into(), "N2".into()],
                holds: true,
            }],
            ..Default::default()
        };
        let v = classify(&c, &flags).unwrap();
        assert_eq!(v.get(ComponentTag::Hyp), Some(&Membership::InClosure));
        assert!(matches!(v.get(ComponentTag::Odd), Some(Membership::Undecided(_))));
    }
}
