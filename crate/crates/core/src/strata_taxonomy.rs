//! Lookup facts about strata of Abelian differentials: dimensions, connected components, the
//! dimension of the image in the moduli of curves, and known Kodaira dimensions.
//!
//! The component list follows the classical classification of Kontsevich and Zorich: in genus at
//! least 4 the minimal stratum has a hyperelliptic, an even and an odd component, `(k, k)` has a
//! hyperelliptic component plus either even and odd ones (`k` even) or a single non-hyperelliptic
//! one (`k` odd), other strata with even orders split by parity, and the rest are connected. In
//! genus 3 the even component of `(4)` and of `(2, 2)` is the hyperelliptic one; genus 2 strata
//! are connected.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spin_parity::Parity;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StratumError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u32),
    #[error("orders must be positive")]
    NonPositiveOrder,
    #[error("orders sum to {sum}, not 2g - 2 = {expected}")]
    OrderSum { sum: u32, expected: u32 },
    #[error("orders sum to an odd number {0}")]
    OddSum(u32),
    #[error("{tag} is not a component of {stratum}; components are {available}")]
    TagMismatch {
        tag: ComponentTag,
        stratum: String,
        available: String,
    },
    #[error("unknown component tag {0:?}")]
    UnknownTag(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentTag {
    Whole,
    Hyp,
    Even,
    Odd,
    Nonhyp,
}

impl fmt::Display for ComponentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentTag::Whole => "whole",
            ComponentTag::Hyp => "hyp",
            ComponentTag::Even => "even",
            ComponentTag::Odd => "odd",
            ComponentTag::Nonhyp => "nonhyp",
        })
    }
}

impl FromStr for ComponentTag {
    type Err = StratumError;
    fn from_str(s: &str) -> Result<Self, StratumError> {
        Ok(match s {
            "whole" => ComponentTag::Whole,
            "hyp" => ComponentTag::Hyp,
            "even" => ComponentTag::Even,
            "odd" => ComponentTag::Odd,
            "nonhyp" => ComponentTag::Nonhyp,
            other => return Err(StratumError::UnknownTag(other.to_owned())),
        })
    }
}

/// A stratum `ΩM_g(k₁, …, kₙ)` with orders sorted in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub genus: u32,
    pub orders: Vec<u32>,
}

impl Stratum {
    pub fn new(genus: u32, mut orders: Vec<u32>) -> Result<Self, StratumError> {
        if genus < 2 {
            return Err(StratumError::GenusTooSmall(genus));
        }
        if orders.contains(&0) {
            return Err(StratumError::NonPositiveOrder);
        }
        let sum: u32 = orders.iter().sum();
        if sum != 2 * genus - 2 {
            return Err(StratumError::OrderSum {
                sum,
                expected: 2 * genus - 2,
            });
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Stratum { genus, orders })
    }

    /// Genus read off from the orders.
    pub fn from_orders(orders: Vec<u32>) -> Result<Self, StratumError> {
        let sum: u32 = orders.iter().sum();
        if !sum.is_multiple_of(2) {
            return Err(StratumError::OddSum(sum));
        }
        Self::new(sum / 2 + 1, orders)
    }

    pub fn n(&self) -> u32 {
        self.orders.len() as u32
    }

    fn all_even(&self) -> bool {
        self.orders.iter().all(|k| k % 2 == 0)
    }

    fn is_minimal(&self) -> bool {
        self.orders.len() == 1
    }

    fn is_double(&self) -> bool {
        self.orders.len() == 2 && self.orders[0] == self.orders[1]
    }

    fn all_twos(&self) -> bool {
        self.orders.iter().all(|&k| k == 2)
    }

    /// `(affine, projective)` dimensions.
    pub fn dimension(&self) -> (u32, u32) {
        let projective = 2 * self.genus - 2 + self.n();
        (projective + 1, projective)
    }

    /// Parity of the spin structure on the hyperelliptic component, when orders are even.
    pub fn hyperelliptic_parity(&self) -> Parity {
        Parity::of(u64::from(self.genus.div_ceil(2)))
    }

    pub fn components(&self) -> Vec<ComponentInfo> {
        use ComponentTag::*;
        let g = self.genus;
        let hyp_like = self.is_minimal() || self.is_double();
        let tags: Vec<ComponentTag> = if g == 2 {
            vec![Whole]
        } else if g == 3 && hyp_like {
            vec![Hyp, Odd]
        } else if hyp_like && self.all_even() {
            vec![Hyp, Even, Odd]
        } else if self.is_double() {
            vec![Hyp, Nonhyp]
        } else if self.all_even() {
            vec![Even, Odd]
        } else {
            vec![Whole]
        };
        tags.into_iter()
            .map(|tag| ComponentInfo {
                tag,
                parity: self.parity_of(tag),
            })
            .collect()
    }

    fn parity_of(&self, tag: ComponentTag) -> Option<Parity> {
        if !self.all_even() {
            return None;
        }
        match tag {
            ComponentTag::Even => Some(Parity::Even),
            ComponentTag::Odd => Some(Parity::Odd),
            ComponentTag::Hyp => Some(self.hyperelliptic_parity()),
            ComponentTag::Whole | ComponentTag::Nonhyp => None,
        }
    }

    pub fn component(&self, tag: ComponentTag) -> Result<StratumComponent, StratumError> {
        let comps = self.components();
        if comps.iter().any(|c| c.tag == tag) {
            Ok(StratumComponent {
                stratum: self.clone(),
                tag,
            })
        } else {
            Err(StratumError::TagMismatch {
                tag,
                stratum: self.to_string(),
                available: comps.iter().map(|c| c.tag.to_string()).collect::<Vec<_>>().join(", "),
            })
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: Vec<String> = self.orders.iter().map(|k| k.to_string()).collect();
        write!(f, "g={} ({})", self.genus, orders.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub tag: ComponentTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kodaira {
    MinusInfinity,
    GeneralType,
    Unknown,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kodaira::MinusInfinity => "-infinity",
            Kodaira::GeneralType => "general type",
            Kodaira::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KodairaVerdict {
    pub value: Kodaira,
    pub rule: Cow<'static, str>,
}

/// A connected component of a stratum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumComponent {
    pub stratum: Stratum,
    pub tag: ComponentTag,
}

impl StratumComponent {
    pub fn parse(genus: u32, orders: Vec<u32>, tag: ComponentTag) -> Result<Self, StratumError> {
        Stratum::new(genus, orders)?.component(tag)
    }

    /// Dimension of the image under the map forgetting the differential.
    pub fn projection_dimension(&self) -> u32 {
        let s = &self.stratum;
        let g = s.genus;
        if self.tag == ComponentTag::Hyp {
            2 * g - 1
        } else if self.tag == ComponentTag::Even && s.all_twos() {
            3 * g - 4
        } else if s.n() < g - 1 {
            2 * g - 2 + s.n()
        } else {
            3 * g - 3
        }
    }

    /// Kodaira dimension of the projectivized component, first matching rule wins.
    pub fn kodaira_dimension(&self) -> KodairaVerdict {
        let s = &self.stratum;
        let g = s.genus;
        let verdict = |value, rule: &'static str| KodairaVerdict {
            value,
            rule: Cow::Borrowed(rule),
        };
        let mg_general = g == 22 || g >= 24;
        let heavy: u32 = s.orders.iter().filter(|&&k| k >= 2).sum();
        if heavy == 0 {
            return verdict(Kodaira::MinusInfinity, "principal stratum");
        }
        if heavy <= g - 2 {
            return verdict(Kodaira::MinusInfinity, "orders at least 2 sum to at most g - 2");
        }
        if s.is_double() && self.tag == ComponentTag::Hyp {
            return verdict(Kodaira::MinusInfinity, "hyperelliptic (g-1, g-1) is uniruled");
        }
        if s.all_twos() && self.tag == ComponentTag::Even {
            return verdict(Kodaira::MinusInfinity, "even (2, ..., 2) is uniruled");
        }
        if s.all_twos() && self.tag == ComponentTag::Odd {
            return if g <= 11 {
                verdict(Kodaira::MinusInfinity, "odd (2, ..., 2) is uniruled for g <= 11")
            } else {
                verdict(Kodaira::GeneralType, "odd (2, ..., 2) is of general type for g >= 12")
            };
        }
        if mg_general && s.n() == g - 1 && self.tag != ComponentTag::Even {
            return verdict(
                Kodaira::GeneralType,
                "n = g - 1 projects onto M_g, which is of general type for g = 22 and g >= 24",
            );
        }
        if mg_general && s.orders[0] == g - 1 && s.orders[1..].iter().all(|&k| k == 1) {
            return verdict(
                Kodaira::GeneralType,
                "(g-1, 1, ..., 1) is of general type for g = 22 and g >= 24",
            );
        }
        verdict(Kodaira::Unknown, "no result applies")
    }
}

/// Every partition of `2g − 2` into positive parts, in decreasing order.
pub fn all_strata(genus: u32) -> Vec<Stratum> {
    fn parts(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            prefix.push(k);
            parts(rest - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    parts(2 * genus - 2, 2 * genus - 2, &mut Vec::new(), &mut out);
    out.into_iter().map(|orders| Stratum { genus, orders }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ComponentTag::*;

    fn tags(g: u32, orders: &[u32]) -> Vec<ComponentTag> {
        Stratum::new(g, orders.to_vec())
            .unwrap()
            .components()
            .into_iter()
            .map(|c| c.tag)
            .collect()
    }

    #[test]
    fn dimensions() {
        assert_eq!(Stratum::new(3, vec![4]).unwrap().dimension(), (6, 5));
        assert_eq!(Stratum::new(2, vec![1, 1]).unwrap().dimension().1, 4);
        assert_eq!(Stratum::new(5, vec![1; 8]).unwrap().dimension().1, 16);
    }

    #[test]
    fn component_lists() {
        assert_eq!(tags(3, &[4]), vec![Hyp, Odd]);
        assert_eq!(tags(3, &[2, 2]), vec![Hyp, Odd]);
        assert_eq!(tags(4, &[6]), vec![Hyp, Even, Odd]);
        assert_eq!(tags(4, &[3, 3]), vec![Hyp, Nonhyp]);
        assert_eq!(tags(5, &[4, 4]), vec![Hyp, Even, Odd]);
        assert_eq!(tags(4, &[4, 2]), vec![Even, Odd]);
        assert_eq!(tags(4, &[1; 6]), vec![Whole]);
        assert_eq!(tags(2, &[2]), vec![Whole]);
        let s = Stratum::new(3, vec![2, 2]).unwrap();
        assert_eq!(s.components()[0].parity, Some(Parity::Even));
        assert!(s.component(Even).is_err());
    }

    #[test]
    fn projection_rows() {
        let c = StratumComponent::parse(5, vec![4, 4], Hyp).unwrap();
        assert_eq!(c.projection_dimension(), 9);
        let c = StratumComponent::parse(5, vec![2; 4], Even).unwrap();
        assert_eq!(c.projection_dimension(), 11);
        let c = StratumComponent::parse(5, vec![4, 4], Odd).unwrap();
        assert_eq!(c.projection_dimension(), 10);
        let c = StratumComponent::parse(5, vec![2; 4], Odd).unwrap();
        assert_eq!(c.projection_dimension(), 12);
    }

    #[test]
    fn kodaira_rows() {
        let k = |g, o: Vec<u32>, t| StratumComponent::parse(g, o, t).unwrap().kodaira_dimension().value;
        assert_eq!(k(7, vec![1; 12], Whole), Kodaira::MinusInfinity);
        assert_eq!(k(12, vec![2; 11], Odd), Kodaira::GeneralType);
        assert_eq!(k(11, vec![2; 10], Odd), Kodaira::MinusInfinity);
        assert_eq!(k(12, vec![2; 11], Even), Kodaira::MinusInfinity);
        let mut o = vec![3, 1];
        o.extend(vec![2; 21]);
        assert_eq!(k(24, o, Whole), Kodaira::GeneralType);
        let mut o = vec![22];
        o.extend(vec![1; 22]);
        assert_eq!(k(23, o, Whole), Kodaira::Unknown);
        assert_eq!(k(6, vec![5, 5], Nonhyp), Kodaira::Unknown);
        assert_eq!(k(6, vec![5, 5], Hyp), Kodaira::MinusInfinity);
    }

    #[test]
    fn partitions_are_complete() {
        assert_eq!(all_strata(3).len(), 5);
        assert_eq!(all_strata(4).len(), 11);
    }
}
