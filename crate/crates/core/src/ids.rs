//! Caller-supplied string identifiers. Outputs always echo them verbatim.

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Irreducible component.
    VertexId
);
string_id!(
    /// Node of the curve.
    EdgeId
);
string_id!(
    /// One branch of a node, attached to a single vertex.
    HalfEdgeId
);
string_id!(
    /// Marked point.
    LegId
);
string_id!(
    /// Any special point: a leg or a half-edge. Legs and half-edges share one namespace.
    PointId
);

impl From<&LegId> for PointId {
    fn from(l: &LegId) -> Self {
        PointId(l.0.clone())
    }
}

impl From<&HalfEdgeId> for PointId {
    fn from(h: &HalfEdgeId) -> Self {
        PointId(h.0.clone())
    }
}
