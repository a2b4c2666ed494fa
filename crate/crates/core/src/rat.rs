//! Exact rational scalars and their canonical `"num/den"` text form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Builds `num/den` as a rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

/// Canonical string: lowest terms, sign on the numerator, integers as `"7/1"`.
pub fn to_string(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}: expected NUM/DEN or an integer")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"NUM/DEN"` or a bare integer. Decimal notation is rejected.
pub fn parse(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, ParseRatError> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatError::Invalid(s.to_string()));
        }
        t.parse::<BigInt>()
            .map_err(|_| ParseRatError::Invalid(s.to_string()))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(ParseRatError::ZeroDenominator(s.to_string()));
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Exact `q^e` for a non-negative integer exponent.
pub fn pow(q: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

/// Least common multiple of the denominators, used to clear fractions from a row.
pub fn denom_lcm<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    use num_integer::Integer;
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Wrapper that prints a rational in canonical form.
pub struct Display<'a>(pub &'a Rat);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// `#[serde(with = "rat::serde_str")]` for a single rational.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "rat::serde_opt")]` for an optional rational.
pub mod serde_opt {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&to_string(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// `#[serde(with = "rat::serde_vec")]` for a list of rationals.
pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&to_string(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// JSON value for a rational, in canonical string form.
pub fn json(q: &Rat) -> serde_json::Value {
    serde_json::Value::String(to_string(q))
}

pub fn json_vec(v: &[Rat]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        assert_eq!(to_string(&rat(2, 6)), "1/3");
        assert_eq!(to_string(&rat(5, -2)), "-5/2");
        assert_eq!(to_string(&int(7)), "7/1");
        assert_eq!(to_string(&int(0)), "0/1");
    }

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse("6/1").unwrap(), int(6));
        assert_eq!(parse("-10/4").unwrap(), rat(-5, 2));
        assert_eq!(parse("12").unwrap(), int(12));
        assert_eq!(parse(" 3/9 ").unwrap(), rat(1, 3));
    }

    #[test]
    fn parse_rejects_decimals_and_garbage() {
        assert!(matches!(parse("1.5"), Err(ParseRatError::Invalid(_))));
        assert!(matches!(
            parse("1/0"),
            Err(ParseRatError::ZeroDenominator(_))
        ));
        assert!(matches!(parse(""), Err(ParseRatError::Empty)));
        assert!(parse("a/b").is_err());
        assert!(parse("1/").is_err());
        assert!(parse("1e3").is_err());
    }

    #[test]
    fn serde_round_trip() {
        #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
        struct Holder {
            #[serde(with = "serde_str")]
            q: Rat,
            #[serde(with = "serde_vec")]
            v: Vec<Rat>,
        }
        let h = Holder {
            q: rat(-5, 2),
            v: vec![int(7), rat(1, 3)],
        };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"q":"-5/2","v":["7/1","1/3"]}"#);
        let back: Holder = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn pow_and_lcm() {
        assert_eq!(pow(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(pow(&rat(2, 3), 0), int(1));
        assert_eq!(denom_lcm(&[rat(1, 4), rat(1, 6), int(3)]), BigInt::from(12));
    }
}
