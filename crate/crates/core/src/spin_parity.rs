//! Spin structures on decent curves of compact type and their parities.
//!
//! A spin structure restricts to a theta characteristic on every stable component and to `O(1)` on
//! every exceptional line. Its parity is the sum of the component `h⁰` modulo 2. Each component
//! kind has a backend computing `h⁰` from caller-asserted geometry:
//!
//! - genus 0: `O(−1)`, no sections;
//! - genus 1: `O(l(P − Q))` with `P − Q` of order `d`, which is trivial exactly when `d | l`;
//! - hyperelliptic genus `h`: the classical description by a set `T` of branch points with
//!   `|T| ≡ h + 1 (mod 2)`, where `h⁰ = (h + 1 − |T|)/2` once `|T| ≤ h + 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate_diff::{CandidateDifferential, DiffError};
use crate::curve_graph::DualGraph;
use crate::flags::GeometryFlags;
use crate::ids::{PointId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpinError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("graph is not of compact type")]
    NotCompactType,
    #[error("order {order} at {point} is odd")]
    OddOrder { point: PointId, order: i64 },
    #[error("no theta backend for component {vertex}: {reason}")]
    NoBackend { vertex: VertexId, reason: String },
    #[error("missing geometric flag: {0}")]
    MissingFlag(String),
    #[error("component {vertex} does not carry a theta characteristic: {reason}")]
    NotThetaCharacteristic { vertex: VertexId, reason: String },
    #[error("total degree {got} differs from g - 1 = {expected}")]
    Degree { expected: i64, got: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(h0: u64) -> Self {
        if h0.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::of(u64::from(self.bit() + rhs.bit()))
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentTheta {
    /// `O(−1)` on a rational component.
    Rational,
    /// `O(multiplier · (P − Q))` where `P − Q` has the given torsion order.
    Elliptic { multiplier: i64, torsion_order: u64 },
    /// Theta characteristic `((h − 1 − |T|)/2)·g¹₂ + Σ_T W` of a hyperelliptic component.
    Hyperelliptic {
        genus: u32,
        branch_subset: BTreeSet<String>,
    },
    /// `h⁰` settled by a named rule on caller flags.
    Derived { genus: u32, h0: u64, rule: String },
    /// `O(1)` on an exceptional line.
    ExceptionalLine,
}

impl ComponentTheta {
    pub fn genus(&self) -> u32 {
        match self {
            ComponentTheta::Rational | ComponentTheta::ExceptionalLine => 0,
            ComponentTheta::Elliptic { .. } => 1,
            ComponentTheta::Hyperelliptic { genus, .. } | ComponentTheta::Derived { genus, .. } => *genus,
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            ComponentTheta::ExceptionalLine => 1,
            other => i64::from(other.genus()) - 1,
        }
    }

    pub fn h0(&self) -> u64 {
        match self {
            ComponentTheta::Rational => 0,
            ComponentTheta::ExceptionalLine => 2,
            ComponentTheta::Elliptic {
                multiplier,
                torsion_order,
            } => u64::from(multiplier.rem_euclid(*torsion_order as i64) == 0),
            ComponentTheta::Hyperelliptic { genus, branch_subset } => hyperelliptic_h0(*genus, branch_subset.len()),
            ComponentTheta::Derived { h0, .. } => *h0,
        }
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.h0())
    }
}

/// `h⁰` of the theta characteristic attached to a branch subset of size `t` on genus `h`.
pub fn hyperelliptic_h0(genus: u32, t: usize) -> u64 {
    let h = genus as usize;
    let t = if t > h + 1 { 2 * h + 2 - t } else { t };
    ((h + 1 - t) / 2) as u64
}

/// All `2^{2h}` theta characteristics of a component of genus `h`.
pub fn enumerate_thetas(genus: u32) -> Vec<ComponentTheta> {
    match genus {
        0 => vec![ComponentTheta::Rational],
        1 => std::iter::once(ComponentTheta::Elliptic {
            multiplier: 0,
            torsion_order: 1,
        })
        .chain((0..3).map(|_| ComponentTheta::Elliptic {
            multiplier: 1,
            torsion_order: 2,
        }))
        .collect(),
        h => {
            let n = 2 * h as usize + 2;
            let half = h as usize + 1;
            (0u64..1 << n)
                .filter(|mask| {
                    let t = mask.count_ones() as usize;
                    // One representative per complementary pair.
                    t % 2 == half % 2 && (t < half || (t == half && mask & 1 == 1))
                })
                .map(|mask| ComponentTheta::Hyperelliptic {
                    genus: h,
                    branch_subset: (0..n).filter(|i| mask >> i & 1 == 1).map(|i| format!("w{i}")).collect(),
                })
                .collect()
        }
    }
}

/// `(even, odd)` counts of the thetas of one component.
pub fn component_counts(genus: u32) -> (u64, u64) {
    enumerate_thetas(genus)
        .iter()
        .fold((0, 0), |(e, o), t| match t.parity() {
            Parity::Even => (e + 1, o),
            Parity::Odd => (e, o + 1),
        })
}

/// Spin structure on the blow-up of a compact-type curve at every node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinStructure {
    pub decent: DualGraph,
    pub thetas: BTreeMap<VertexId, ComponentTheta>,
}

impl SpinStructure {
    pub fn total_degree(&self) -> i64 {
        self.thetas.values().map(ComponentTheta::degree).sum()
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.thetas.values().map(ComponentTheta::h0).sum())
    }

    pub fn check_degree(&self) -> Result<(), SpinError> {
        let expected = self.decent.arithmetic_genus() as i64 - 1;
        let got = self.total_degree();
        if got == expected {
            Ok(())
        } else {
            Err(SpinError::Degree { expected, got })
        }
    }
}

/// Half of the divisor of the differential on one component.
fn half_divisor(c: &CandidateDifferential, v: &VertexId) -> Result<BTreeMap<PointId, i64>, SpinError> {
    let g = c.graph();
    let legs = g
        .legs_at(v)
        .map(|l| (PointId::from(&l.id), c.leg_order(l.id.as_str()).expect("leg order")));
    let branches = g.half_edges_at(v).map(|h| {
        (
            PointId::from(&h.id),
            c.branch_order(h.id.as_str()).expect("branch order"),
        )
    });
    let mut out = BTreeMap::new();
    for (p, k) in legs.chain(branches) {
        if k % 2 != 0 {
            return Err(SpinError::OddOrder { point: p, order: k });
        }
        if k != 0 {
            out.insert(p, k / 2);
        }
    }
    Ok(out)
}

/// The spin structure `O(½ div ω)` of a compact-type candidate with even orders.
pub fn spin_of_candidate(c: &CandidateDifferential, flags: &GeometryFlags) -> Result<SpinStructure, SpinError> {
    let g = c.graph();
    if !g.is_compact_type() {
        return Err(SpinError::NotCompactType);
    }
    if let Some((e, _)) = c.check_compatibility().into_iter().find(|(_, ok)| !ok) {
        return Err(DiffError::Incompatible(vec![e]).into());
    }
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(DiffError::Invalid(violations).into());
    }
    let decent = g.blow_up_all_nodes();
    let mut thetas = BTreeMap::new();
    for v in g.vertices() {
        let divisor = half_divisor(c, &v.id)?;
        let theta = component_theta(g, &v.id, v.genus, &divisor, flags)?;
        thetas.insert(v.id.clone(), theta);
    }
    for v in decent.vertices().iter().filter(|v| v.exceptional) {
        thetas.insert(v.id.clone(), ComponentTheta::ExceptionalLine);
    }
    let spin = SpinStructure { decent, thetas };
    spin.check_degree()?;
    Ok(spin)
}

fn component_theta(
    graph: &DualGraph,
    v: &VertexId,
    genus: u32,
    divisor: &BTreeMap<PointId, i64>,
    flags: &GeometryFlags,
) -> Result<ComponentTheta, SpinError> {
    match genus {
        0 => Ok(ComponentTheta::Rational),
        1 => elliptic_theta(graph, v, divisor, flags),
        _ => hyperelliptic_theta(graph, v, genus, divisor, flags)
            .or_else(|first| derived_genus_two(v, genus, divisor, flags).ok_or(first)),
    }
}

fn elliptic_theta(
    graph: &DualGraph,
    v: &VertexId,
    divisor: &BTreeMap<PointId, i64>,
    flags: &GeometryFlags,
) -> Result<ComponentTheta, SpinError> {
    let support: Vec<(&PointId, i64)> = divisor.iter().map(|(p, &k)| (p, k)).collect();
    match support.as_slice() {
        [] => Ok(ComponentTheta::Elliptic {
            multiplier: 0,
            torsion_order: 1,
        }),
        [(p, l), (q, m)] if l + m == 0 => {
            let d = flags
                .torsion_between(p.as_str(), q.as_str())
                .ok_or_else(|| SpinError::MissingFlag(format!("torsion order of {p} - {q}")))?;
            let l = (*l).max(*m);
            // Squares to the trivial canonical class only when d | 2l.
            if (2 * l).rem_euclid(d as i64) != 0 {
                return Err(SpinError::NotThetaCharacteristic {
                    vertex: v.clone(),
                    reason: format!("{p} - {q} has order {d}, which does not divide {}", 2 * l),
                });
            }
            Ok(ComponentTheta::Elliptic {
                multiplier: l,
                torsion_order: d,
            })
        }
        _ => Err(SpinError::NoBackend {
            vertex: v.clone(),
            reason: format!(
                "elliptic backend needs a divisor l(P - Q), got support of size {} on a component \
                 with {} special points",
                support.len(),
                graph.valence(v).n_special
            ),
        }),
    }
}

/// Reduces a divisor supported on Weierstrass points and conjugate pairs to `m·g¹₂ + Σ_T W`.
fn hyperelliptic_theta(
    graph: &DualGraph,
    v: &VertexId,
    genus: u32,
    divisor: &BTreeMap<PointId, i64>,
    flags: &GeometryFlags,
) -> Result<ComponentTheta, SpinError> {
    let no = |reason: String| SpinError::NoBackend {
        vertex: v.clone(),
        reason,
    };
    match flags.is_hyperelliptic(graph, v.as_str()) {
        Some(true) => {}
        Some(false) => return Err(no("component is not hyperelliptic".into())),
        None => return Err(SpinError::MissingFlag(format!("hyperelliptic flag on {v}"))),
    }
    let mut branch_subset = BTreeSet::new();
    let mut paired: BTreeSet<&PointId> = BTreeSet::new();
    for (p, &c) in divisor {
        if paired.contains(p) {
            continue;
        }
        if flags.is_weierstrass(p.as_str()) == Some(true) {
            if c.rem_euclid(2) == 1 {
                branch_subset.insert(p.to_string());
            }
            continue;
        }
        let partner = divisor
            .iter()
            .find(|(q, &cq)| *q != p && cq == c && flags.are_conjugate(p.as_str(), q.as_str()) == Some(true));
        match partner {
            Some((q, _)) => {
                paired.insert(q);
            }
            None => {
                return Err(match flags.is_weierstrass(p.as_str()) {
                    None => SpinError::MissingFlag(format!("Weierstrass flag at {p}")),
                    Some(_) => no(format!(
                        "{p} is neither a Weierstrass point nor paired with its conjugate"
                    )),
                })
            }
        }
    }
    let t = branch_subset.len() as i64;
    let h = i64::from(genus);
    if t > 2 * h + 2 || (t - h - 1).rem_euclid(2) != 0 {
        return Err(SpinError::NotThetaCharacteristic {
            vertex: v.clone(),
            reason: format!("{t} branch points do not define a theta characteristic on genus {h}"),
        });
    }
    Ok(ComponentTheta::Hyperelliptic { genus, branch_subset })
}

/// `O(2Z − N)` on genus 2 with `4Z − 2N ∼ K` and `Z` not a Weierstrass point has no sections:
/// a section would force `2Z ∼ N + P`, while `|2Z|` is the single divisor `2Z`.
fn derived_genus_two(
    v: &VertexId,
    genus: u32,
    divisor: &BTreeMap<PointId, i64>,
    flags: &GeometryFlags,
) -> Option<ComponentTheta> {
    if genus != 2 || divisor.len() != 2 {
        return None;
    }
    let (z, n) = {
        let mut it = divisor.iter();
        let a = it.next()?;
        let b = it.next()?;
        match (*a.1, *b.1) {
            (2, -1) => (a.0, b.0),
            (-1, 2) => (b.0, a.0),
            _ => return None,
        }
    };
    let terms = BTreeMap::from([(z.clone(), 4), (n.clone(), -2)]);
    if flags.is_canonical(&terms) != Some(true) || flags.is_weierstrass(z.as_str()) != Some(false) {
        return None;
    }
    Some(ComponentTheta::Derived {
        genus,
        h0: 0,
        rule: format!("2{z} - {n} on genus 2 with {z} not Weierstrass has no sections ({v})"),
    })
}

/// `(even, odd)` counts of spin structures on a compact-type curve, by convolving components.
pub fn count_spin_parities(graph: &DualGraph) -> Result<(u64, u64), SpinError> {
    if !graph.is_compact_type() {
        return Err(SpinError::NotCompactType);
    }
    Ok(graph
        .vertices()
        .iter()
        .map(|v| component_counts(v.genus))
        .fold((1, 0), |(e, o), (ce, co)| (e * ce + o * co, e * co + o * ce)))
}
