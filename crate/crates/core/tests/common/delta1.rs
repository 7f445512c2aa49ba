//! Expected genus-3 odd-component verdicts over curves with one separating node, read off the
//! two forms of the limit: primitive 4-torsion with a Weierstrass far node, or `4Z − 2N2 ~ K`
//! with `Z` not a Weierstrass point.

use std::collections::BTreeMap;

use limdiff::boundary_classify::{classify, cross_check_parity, BoundaryVerdict, ClassifyError, Membership};
use limdiff::candidate_diff::CandidateDifferential;
use limdiff::curve_graph::DualGraph;
use limdiff::flags::{CanonicalEquivalenceFlag, GeometryFlags};
use limdiff::strata_taxonomy::ComponentTag;

/// What the classifier must say about the odd component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    In,
    Out,
    Open,
    Inconsistent,
}

pub struct SweepRow {
    pub label: String,
    pub expected: Expected,
    pub observed: Expected,
    /// Every decided verdict names at least one reason.
    pub reasons_cited: bool,
    /// Parity agreement with the spin structure, when the verdict has a parity.
    pub parity_agrees: bool,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.expected == self.observed && self.reasons_cited && self.parity_agrees
    }
}

fn observed(result: &Result<BoundaryVerdict, ClassifyError>) -> Expected {
    match result {
        Ok(v) => match v.get(ComponentTag::Odd).expect("genus 3 has an odd verdict") {
            Membership::InClosure => Expected::In,
            Membership::NotInClosure => Expected::Out,
            Membership::Undecided(_) => Expected::Open,
        },
        Err(ClassifyError::InconsistentFlags(_)) => Expected::Inconsistent,
        Err(e) => panic!("unexpected error {e}"),
    }
}

pub fn separating(z_on_elliptic: bool) -> CandidateDifferential {
    let z_vertex = if z_on_elliptic { "X1" } else { "X2" };
    let g = DualGraph::builder()
        .vertex("X1", 1)
        .vertex("X2", 2)
        .edge("N", ("N1", "X1"), ("N2", "X2"))
        .leg("Z", z_vertex)
        .build()
        .unwrap();
    let orders: &[(&str, i64)] = if z_on_elliptic {
        &[("N1", -4), ("N2", 2)]
    } else {
        &[("N1", 0), ("N2", -2)]
    };
    CandidateDifferential::from_orders(g, &[("Z", 4)], orders).unwrap()
}

const TRISTATE: [Option<bool>; 3] = [None, Some(true), Some(false)];

/// `N2` is a double zero of a holomorphic differential on a genus-2 curve, so a flag denying
/// that it is a Weierstrass point contradicts the orders.
pub fn elliptic_side_expectation(torsion: Option<u64>, n2_weierstrass: Option<bool>) -> Expected {
    if n2_weierstrass == Some(false) {
        return Expected::Inconsistent;
    }
    match torsion {
        None => Expected::Open,
        Some(4) => Expected::In,
        Some(_) => Expected::Out,
    }
}

pub fn genus_two_side_expectation(
    canonical: Option<bool>,
    z_weierstrass: Option<bool>,
    n2_weierstrass: Option<bool>,
) -> Expected {
    // A Weierstrass Z has 2Z ~ K, so 4Z − 2N2 ~ K forces 2N2 ~ K.
    if canonical == Some(true) && z_weierstrass == Some(true) && n2_weierstrass == Some(false) {
        return Expected::Inconsistent;
    }
    if z_weierstrass == Some(true) || canonical == Some(false) {
        return Expected::Out;
    }
    match (canonical, z_weierstrass) {
        (Some(true), Some(false)) => Expected::In,
        _ => Expected::Open,
    }
}

fn row(c: &CandidateDifferential, flags: &GeometryFlags, label: String, expected: Expected) -> SweepRow {
    let result = classify(c, flags);
    let observed = observed(&result);
    let (reasons_cited, parity_agrees) = match &result {
        Ok(v) => {
            let decided = !matches!(v.get(ComponentTag::Odd), Some(Membership::Undecided(_)));
            let parity = cross_check_parity(c, flags)
                .map(|report| report.checks.iter().all(|check| check.expected == check.actual))
                .unwrap_or(false);
            (!decided || !v.reasons.is_empty(), parity)
        }
        Err(_) => (true, true),
    };
    SweepRow {
        label,
        expected,
        observed,
        reasons_cited,
        parity_agrees,
    }
}

/// Every flag combination on both sides of the node.
pub fn sweep() -> Vec<SweepRow> {
    let mut rows = Vec::new();
    let c = separating(true);
    for torsion in [None, Some(1), Some(2), Some(3), Some(4), Some(6), Some(8)] {
        for n2 in TRISTATE {
            let mut flags = GeometryFlags::default();
            if let Some(d) = torsion {
                flags.torsion_order.insert("Z".into(), d);
            }
            if let Some(w) = n2 {
                flags.weierstrass.insert("N2".into(), w);
            }
            let label = format!("Z elliptic, torsion {torsion:?}, N2 Weierstrass {n2:?}");
            rows.push(row(&c, &flags, label, elliptic_side_expectation(torsion, n2)));
        }
    }
    let c = separating(false);
    for canonical in TRISTATE {
        for z in TRISTATE {
            for n2 in TRISTATE {
                let mut flags = GeometryFlags::default();
                if let Some(holds) = canonical {
                    flags.canonical_equivalence.push(CanonicalEquivalenceFlag {
                        terms: BTreeMap::from([("Z".into(), 4), ("N2".into(), -2)]),
                        holds,
                    });
                }
                if let Some(w) = z {
                    flags.weierstrass.insert("Z".into(), w);
                }
                if let Some(w) = n2 {
                    flags.weierstrass.insert("N2".into(), w);
                }
                let label =
                    format!("Z on genus 2, 4Z - 2N2 ~ K {canonical:?}, Z Weierstrass {z:?}, N2 Weierstrass {n2:?}");
                rows.push(row(&c, &flags, label, genus_two_side_expectation(canonical, z, n2)));
            }
        }
    }
    rows
}
