//! Named surfaces used by tests, examples and fixtures.
//!
//! Horizontal edges carrying the same label in the drawings are glued, and vertical edges are
//! glued by horizontal translation.

use super::{PolygonEdge, SurfaceSpec, Vector};
use crate::exact::parse_rational;

fn polygon(points: &[(&str, &str)]) -> Vec<Vector> {
    points
        .iter()
        .map(|(x, y)| Vector::new(parse_rational(x).expect("literal"), parse_rational(y).expect("literal")))
        .collect()
}

fn glue(pairs: &[(usize, usize)]) -> Vec<[PolygonEdge; 2]> {
    pairs
        .iter()
        .map(|&(a, b)| [PolygonEdge::from((0, a)), PolygonEdge::from((0, b))])
        .collect()
}

/// Unit square with opposite sides glued.
pub fn square_torus() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")])],
        glue(&[(0, 2), (1, 3)]),
    )
}

/// Square torus with a marked regular point in the middle of the bottom and top sides.
pub fn marked_square_torus() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1/2", "0"),
            ("1", "0"),
            ("1", "1"),
            ("1/2", "1"),
            ("0", "1"),
        ])],
        glue(&[(0, 4), (1, 3), (2, 5)]),
    )
}

/// Centrally symmetric octagon, an affine image of the regular one, opposite sides glued.
pub fn octagon() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("2", "0"),
            ("3", "1"),
            ("3", "3"),
            ("2", "4"),
            ("0", "4"),
            ("-1", "3"),
            ("-1", "1"),
        ])],
        glue(&[(0, 4), (1, 5), (2, 6), (3, 7)]),
    )
}

/// Irreducible genus-one curve: a horizontal cylinder whose two ends are the sides of a node.
pub fn nodal_cylinder() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")])],
        glue(&[(0, 2)]),
    )
    .with_node_pair(PolygonEdge::from((0, 3)), PolygonEdge::from((0, 1)))
}

/// Genus-3 staircase with one zero of order 4, before the slit `x` closes.
pub fn irreducible_weierstrass_family() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1", "0"),
            ("2", "0"),
            ("3", "0"),
            ("4", "0"),
            ("4", "1"),
            ("3", "1"),
            ("2", "1"),
            ("2", "2"),
            ("1", "2"),
            ("1", "1"),
            ("0", "1"),
        ])],
        glue(&[(0, 10), (1, 8), (2, 5), (3, 6), (4, 11), (7, 9)]),
    )
}

/// Genus-2 normalization with a double zero and a marked regular point, the two points that
/// form the node once identified.
pub fn irreducible_weierstrass_limit() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1", "0"),
            ("2", "0"),
            ("3", "0"),
            ("3", "1"),
            ("2", "1"),
            ("2", "2"),
            ("1", "2"),
            ("1", "1"),
            ("0", "1"),
        ])],
        glue(&[(0, 8), (1, 6), (2, 4), (3, 9), (5, 7)]),
    )
}

/// Genus-2 normalization with simple zeros at two conjugate points.
pub fn conjugate_node_limit() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1", "0"),
            ("1", "-1"),
            ("2", "-1"),
            ("2", "0"),
            ("2", "1"),
            ("1", "1"),
            ("1", "2"),
            ("0", "2"),
            ("0", "1"),
        ])],
        glue(&[(0, 7), (2, 5), (1, 3), (4, 9), (6, 8)]),
    )
}

/// Smoothing of [`conjugate_node_limit`] into the odd component of the minimal genus-3 stratum.
pub fn conjugate_node_odd_smoothing() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1", "0"),
            ("3/2", "0"),
            ("3/2", "-1"),
            ("5/2", "-1"),
            ("5/2", "0"),
            ("5/2", "1"),
            ("3/2", "1"),
            ("1", "1"),
            ("1", "2"),
            ("0", "2"),
            ("0", "1"),
        ])],
        glue(&[(0, 9), (1, 7), (3, 6), (2, 4), (5, 11), (8, 10)]),
    )
}

/// Smoothing of [`conjugate_node_limit`] into the hyperelliptic component of the minimal genus-3
/// stratum.
pub fn conjugate_node_hyp_smoothing() -> SurfaceSpec {
    SurfaceSpec::new(
        vec![polygon(&[
            ("0", "0"),
            ("1", "0"),
            ("1", "-1"),
            ("2", "-1"),
            ("2", "0"),
            ("2", "1"),
            ("1", "1"),
            ("1", "2"),
            ("0", "2"),
            ("-1/2", "2"),
            ("-1/2", "1"),
            ("0", "1"),
        ])],
        glue(&[(0, 7), (2, 5), (8, 10), (1, 3), (4, 11), (6, 9)]),
    )
}

/// Every named surface with its name.
pub fn all() -> Vec<(&'static str, SurfaceSpec)> {
    vec![
        ("square-torus", square_torus()),
        ("marked-square-torus", marked_square_torus()),
        ("octagon", octagon()),
        ("nodal-cylinder", nodal_cylinder()),
        ("irreducible-weierstrass-family", irreducible_weierstrass_family()),
        ("irreducible-weierstrass-limit", irreducible_weierstrass_limit()),
        ("conjugate-node-limit", conjugate_node_limit()),
        ("conjugate-node-odd", conjugate_node_odd_smoothing()),
        ("conjugate-node-hyp", conjugate_node_hyp_smoothing()),
    ]
}
