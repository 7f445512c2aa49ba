//! Caller-asserted geometric facts. None of them is ever computed here.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve_graph::DualGraph;
use crate::ids::{PointId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlagError {
    #[error("flag refers to unknown point {0:?}")]
    UnknownPoint(PointId),
    #[error("flag refers to unknown vertex {0:?}")]
    UnknownVertex(VertexId),
    #[error("torsion order at {0:?} must sit on a genus-1 component with exactly two special points")]
    TorsionPlacement(PointId),
    #[error("torsion order at {0:?} must be positive")]
    ZeroTorsion(PointId),
    #[error("conjugate pair {0:?}, {1:?} must lie on one component")]
    ConjugateSplit(PointId, PointId),
}

/// Two points exchanged by the hyperelliptic involution of their component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugateFlag {
    pub points: [PointId; 2],
    pub holds: bool,
}

/// Whether `Σ coeff · point` is linearly equivalent to the canonical class of its component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalEquivalenceFlag {
    pub terms: BTreeMap<PointId, i64>,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryFlags {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weierstrass: BTreeMap<PointId, bool>,
    /// Order of `P − Q` in the Jacobian, keyed by `P`, where `Q` is the other special point of the
    /// genus-1 component of `P`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub torsion_order: BTreeMap<PointId, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conjugate: Vec<ConjugateFlag>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub canonical_equivalence: Vec<CanonicalEquivalenceFlag>,
    /// Components of genus at least 3 declared hyperelliptic. Genus 2 always is.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hyperelliptic: BTreeMap<VertexId, bool>,
}

impl GeometryFlags {
    pub fn is_weierstrass(&self, p: &str) -> Option<bool> {
        self.weierstrass.get(p).copied()
    }

    /// Torsion order of the difference of the two special points of a genus-1 component.
    pub fn torsion_between(&self, p: &str, q: &str) -> Option<u64> {
        self.torsion_order.get(p).or_else(|| self.torsion_order.get(q)).copied()
    }

    pub fn are_conjugate(&self, p: &str, q: &str) -> Option<bool> {
        self.conjugate
            .iter()
            .find(|c| {
                let [a, b] = &c.points;
                (a.as_str() == p && b.as_str() == q) || (a.as_str() == q && b.as_str() == p)
            })
            .map(|c| c.holds)
    }

    pub fn is_canonical(&self, terms: &BTreeMap<PointId, i64>) -> Option<bool> {
        self.canonical_equivalence
            .iter()
            .find(|f| &f.terms == terms)
            .map(|f| f.holds)
    }

    pub fn is_hyperelliptic(&self, graph: &DualGraph, v: &str) -> Option<bool> {
        match graph.vertex(v)?.genus {
            0..=2 => Some(true),
            _ => self.hyperelliptic.get(v).copied(),
        }
    }

    /// Checks every referenced id against `graph`.
    pub fn validate(&self, graph: &DualGraph) -> Result<(), FlagError> {
        let vertex_of = |p: &PointId| -> Result<VertexId, FlagError> {
            if let Some(l) = graph.leg(p.as_str()) {
                return Ok(l.vertex.clone());
            }
            graph
                .half_edge(p.as_str())
                .map(|(e, side)| e.half_edges[side].vertex.clone())
                .ok_or_else(|| FlagError::UnknownPoint(p.clone()))
        };
        for p in self.weierstrass.keys() {
            vertex_of(p)?;
        }
        for (p, &d) in &self.torsion_order {
            let v = vertex_of(p)?;
            if d == 0 {
                return Err(FlagError::ZeroTorsion(p.clone()));
            }
            let genus = graph.vertex(v.as_str()).map(|x| x.genus);
            if genus != Some(1) || graph.valence(&v).n_special != 2 {
                return Err(FlagError::TorsionPlacement(p.clone()));
            }
        }
        for c in &self.conjugate {
            let [a, b] = &c.points;
            if vertex_of(a)? != vertex_of(b)? {
                return Err(FlagError::ConjugateSplit(a.clone(), b.clone()));
            }
        }
        for f in &self.canonical_equivalence {
            for p in f.terms.keys() {
                vertex_of(p)?;
            }
        }
        for v in self.hyperelliptic.keys() {
            if graph.vertex(v.as_str()).is_none() {
                return Err(FlagError::UnknownVertex(v.clone()));
            }
        }
        Ok(())
    }
}
