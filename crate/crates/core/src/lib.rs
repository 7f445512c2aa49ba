//! Limits of Abelian differentials on nodal curves.
//!
//! Dual graphs of stable curves carry candidate limit differentials. The crate decides whether
//! such a candidate smooths with an exact certificate, computes parities of the induced spin
//! structures, reads Arf invariants off glued polygons, tabulates the components of strata and
//! classifies genus-3 boundary points into closures of components.

pub mod boundary_classify;
pub mod candidate_diff;
pub mod cli_io;
pub mod curve_graph;
pub mod exact;
pub mod feasibility;
pub mod flags;
pub mod flat_surface_arf;
pub mod ids;
pub mod numeric_plumb;
pub mod spin_parity;
pub mod strata_taxonomy;
