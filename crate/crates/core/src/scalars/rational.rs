use num_bigint::BigInt;
use num_rational::BigRational;

use super::ScalarError;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

#[cfg(test)]
pub(crate) fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[cfg(test)]
pub(crate) fn int(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

/// Serde adapter storing a [`Rational`] as its `"p/q"` string.
pub mod rational_serde {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = RationalLiteral::deserialize(d)?;
        match s {
            RationalLiteral::Text(t) => parse_rational(&t).map_err(D::Error::custom),
            RationalLiteral::Int(i) => Ok(Rational::from_integer(i.into())),
        }
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum RationalLiteral {
        Text(String),
        Int(i64),
    }

    /// Same adapter for `Vec<Rational>`.
    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<RationalLiteral>::deserialize(d)?;
            raw.into_iter()
                .map(|r| match r {
                    RationalLiteral::Text(t) => parse_rational(&t).map_err(D::Error::custom),
                    RationalLiteral::Int(i) => Ok(Rational::from_integer(i.into())),
                })
                .collect()
        }
    }

    /// Adapter for `[Rational; 2]`.
    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational; 2], s: S) -> Result<S::Ok, S::Error> {
            super::vec::serialize(v, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Rational; 2], D::Error> {
            let v = super::vec::deserialize(d)?;
            <[Rational; 2]>::try_from(v).map_err(|v| D::Error::custom(format!("expected 2 entries, got {}", v.len())))
        }
    }
}
