//! Exact scalars shared by every module: big rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let bad = || format!("not a rational number: {text:?}");
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(format!("zero denominator in {text:?}"));
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(text).map(Rational::from_integer).map_err(|_| bad()),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least positive multiple making every entry an integer, then divided by the gcd of the numerators.
pub fn primitive_scaling(values: &[Rational]) -> Rational {
    use num_integer::Integer;
    let lcm = values.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let gcd = values
        .iter()
        .map(|q| (q * Rational::from_integer(lcm.clone())).to_integer())
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    if gcd.is_zero() {
        Rational::one()
    } else {
        Rational::new(lcm, gcd.abs())
    }
}

/// Rational number serialized as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalString(pub Rational);

impl Serialize for RationalString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => parse_rational(&t).map(RationalString).map_err(de::Error::custom),
            Repr::Int(n) => Ok(RationalString(rat(n))),
        }
    }
}

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational(pub Complex<Rational>);

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational(Complex::new(re, im))
    }

    pub fn real(re: i64) -> Self {
        Self::new(rat(re), rat(0))
    }

    pub fn zero() -> Self {
        Self::new(rat(0), rat(0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (
            self.0.re.to_f64().unwrap_or(f64::NAN),
            self.0.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a GaussianRational> for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a GaussianRational) -> Self {
        GaussianRational(self.0 + &rhs.0)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational(self.0 - rhs.0)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational(-self.0)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = format_rational(&self.0.re);
        if self.0.im.is_zero() {
            return write!(f, "{re}");
        }
        let im = format_rational(&self.0.im.abs());
        let sign = if self.0.im.is_negative() { '-' } else { '+' };
        if self.0.re.is_zero() {
            let sign = if self.0.im.is_negative() { "-" } else { "" };
            write!(f, "{sign}{im}i")
        } else {
            write!(f, "{re}{sign}{im}i")
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    re: RationalString,
    #[serde(default = "zero_string")]
    im: RationalString,
}

fn zero_string() -> RationalString {
    RationalString(rat(0))
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GaussianRepr {
            re: RationalString(self.0.re.clone()),
            im: RationalString(self.0.im.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GaussianRepr::deserialize(d)?;
        Ok(GaussianRational::new(repr.re.0, repr.im.0))
    }
}

/// Serde adapters storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod map {
        use super::*;

        pub fn serialize<K, S>(m: &BTreeMap<K, Rational>, s: S) -> Result<S::Ok, S::Error>
        where
            K: Serialize + Ord,
            S: Serializer,
        {
            m.iter()
                .map(|(k, v)| (k, format_rational(v)))
                .collect::<BTreeMap<_, _>>()
                .serialize(s)
        }

        pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, Rational>, D::Error>
        where
            K: Deserialize<'de> + Ord,
            D: Deserializer<'de>,
        {
            BTreeMap::<K, String>::deserialize(d)?
                .into_iter()
                .map(|(k, t)| parse_rational(&t).map(|q| (k, q)).map_err(D::Error::custom))
                .collect()
        }
    }
}
