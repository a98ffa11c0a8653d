//! The totally ordered value group `Q ∪ {+inf}`.
//!
//! Every valuation in this crate takes its values here. Finite values are
//! exact rationals (always stored reduced with positive denominator, so
//! equality is canonical); `Infinity` absorbs addition and dominates the
//! order. The infimum of an empty list is `Infinity`, which makes the value
//! of the zero polynomial come out of the digit formula without a special
//! case.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::Rat;

/// An element of `Q ∪ {+inf}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Rat),
    Infinity,
}

impl Value {
    pub fn finite(q: Rat) -> Self {
        Value::Finite(q)
    }

    pub fn from_int(n: i64) -> Self {
        Value::Finite(Rat::from_integer(n.into()))
    }

    /// Exact rational `n/d`. Panics if `d == 0`; intended for literals.
    pub fn rat(n: i64, d: i64) -> Self {
        Value::Finite(Rat::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Value::Finite(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Value::Finite(q) => Some(q),
            Value::Infinity => None,
        }
    }

    /// `k * self` for a term multiplicity `k >= 1`. The product `0 * inf` is
    /// undefined in the group and never formed by the evaluation formulas,
    /// which omit the scaled summand at digit index zero.
    pub fn scaled(&self, k: usize) -> Value {
        match self {
            Value::Finite(q) => Value::Finite(q * Rat::from_integer(k.into())),
            Value::Infinity => {
                assert!(k >= 1, "0 * inf is not a value");
                Value::Infinity
            }
        }
    }

    /// `self - rhs`, defined unless `rhs` is infinite.
    pub fn checked_sub(&self, rhs: &Value) -> Option<Value> {
        match (self, rhs) {
            (_, Value::Infinity) => None,
            (Value::Infinity, Value::Finite(_)) => Some(Value::Infinity),
            (Value::Finite(a), Value::Finite(b)) => Some(Value::Finite(a - b)),
        }
    }

    /// Infimum of a list of values; the empty infimum is `Infinity`.
    pub fn inf<I: IntoIterator<Item = Value>>(values: I) -> Value {
        values.into_iter().fold(Value::Infinity, |acc, v| acc.min(v))
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
            (Value::Infinity, Value::Finite(_)) => Ordering::Greater,
            (Value::Finite(_), Value::Infinity) => Ordering::Less,
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        &self + &rhs
    }
}

impl Add<&Value> for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Infinity,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Infinity => write!(f, "inf"),
            Value::Finite(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Parses `"p/q"`, `"p"`, or `"inf"`.
impl FromStr for Value {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "+inf" {
            return Ok(Value::Infinity);
        }
        let q: Rat = s.parse().map_err(|_| {
            crate::Error::Input(format!(
                "invalid value `{s}`: expected `p/q`, `p`, or `inf`"
            ))
        })?;
        Ok(Value::Finite(q))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn addition_is_exact_and_absorbing() {
        assert_eq!(Value::rat(1, 2) + Value::from_int(1), Value::rat(3, 2));
        assert_eq!(Value::Infinity + Value::from_int(3), Value::Infinity);
        assert_eq!(Value::zero() + Value::Infinity, Value::Infinity);
    }

    #[test]
    fn infimum() {
        assert_eq!(
            Value::inf([Value::from_int(1), Value::from_int(1)]),
            Value::from_int(1)
        );
        assert_eq!(Value::inf([]), Value::Infinity);
        assert_eq!(
            Value::inf([Value::rat(3, 2), Value::Infinity, Value::from_int(2)]),
            Value::rat(3, 2)
        );
    }

    #[test]
    fn total_order() {
        assert_eq!(Value::rat(1, 2), Value::finite(rat(2, 4)));
        assert!(Value::Infinity > Value::from_int(1_000_000_000));
        assert!(Value::from_int(-1) < Value::zero());
    }

    #[test]
    fn string_round_trip() {
        for s in ["1/2", "-7/3", "4", "inf", "0"] {
            let v: Value = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("one-half".parse::<Value>().is_err());
        // reduced on the way in
        assert_eq!("2/4".parse::<Value>().unwrap().to_string(), "1/2");
    }

    #[test]
    fn scaling() {
        assert_eq!(Value::rat(1, 2).scaled(3), Value::rat(3, 2));
        assert_eq!(Value::Infinity.scaled(2), Value::Infinity);
    }
}
