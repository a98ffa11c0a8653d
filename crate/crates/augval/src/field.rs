//! The valued base field: exact rationals with a p-adic or trivial valuation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::value::Value;
use crate::Error;

/// Arbitrary-precision rational, kept reduced with positive denominator.
pub type Rat = num_rational::BigRational;

/// Exact rational `n/d`. Panics if `d == 0`; intended for literals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// The valuation on the coefficient field `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseValuation {
    /// The p-adic valuation `v_p` for a prime `p`.
    PAdic(u64),
    /// `v(u) = 0` for every nonzero `u`.
    Trivial,
}

impl BaseValuation {
    /// p-adic valuation for `p`; rejects non-primes.
    pub fn p_adic(p: u64) -> Result<Self, Error> {
        if is_prime(p) {
            Ok(BaseValuation::PAdic(p))
        } else {
            Err(Error::Input(format!("`{p}` is not prime")))
        }
    }

    /// The value of a rational: order of the numerator minus order of the
    /// denominator for `PAdic(p)`, zero for `Trivial`. `value(0) = inf`.
    pub fn value(&self, a: &Rat) -> Value {
        if a.is_zero() {
            return Value::Infinity;
        }
        match self {
            BaseValuation::Trivial => Value::zero(),
            BaseValuation::PAdic(p) => {
                let num_ord = int_order(a.numer(), *p);
                let den_ord = int_order(a.denom(), *p);
                Value::from_int(num_ord as i64 - den_ord as i64)
            }
        }
    }
}

/// Multiplicity of `p` in a nonzero integer.
fn int_order(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut ord = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return ord;
        }
        ord += 1;
        m = q;
    }
}

/// Deterministic Miller-Rabin for `u64` (the fixed witness set below decides
/// primality for everything under 3.3e24).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// JSON form: {"type": "p-adic", "p": "2"} or {"type": "trivial"}.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum BaseValuationDoc {
    #[serde(rename = "p-adic")]
    PAdic { p: String },
    #[serde(rename = "trivial")]
    Trivial,
}

impl Serialize for BaseValuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = match self {
            BaseValuation::PAdic(p) => BaseValuationDoc::PAdic { p: p.to_string() },
            BaseValuation::Trivial => BaseValuationDoc::Trivial,
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BaseValuation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match BaseValuationDoc::deserialize(deserializer)? {
            BaseValuationDoc::Trivial => Ok(BaseValuation::Trivial),
            BaseValuationDoc::PAdic { p } => {
                let p: u64 = p
                    .parse()
                    .map_err(|_| D::Error::custom(format!("field `p`: `{p}` is not an integer")))?;
                BaseValuation::p_adic(p).map_err(|e| D::Error::custom(format!("field `p`: {e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_adic_orders() {
        let nu = BaseValuation::p_adic(2).unwrap();
        // 12 = 2^2 * 3
        assert_eq!(nu.value(&rat(12, 1)), Value::from_int(2));
        assert_eq!(nu.value(&rat(0, 1)), Value::Infinity);
        // v(3) - v(4) = 0 - 2
        assert_eq!(nu.value(&rat(3, 4)), Value::from_int(-2));
    }

    #[test]
    fn trivial_valuation() {
        let nu = BaseValuation::Trivial;
        assert_eq!(nu.value(&rat(-7, 3)), Value::zero());
        assert_eq!(nu.value(&Rat::zero()), Value::Infinity);
    }

    #[test]
    fn primality() {
        assert!(BaseValuation::p_adic(2).is_ok());
        assert!(BaseValuation::p_adic(97).is_ok());
        assert!(BaseValuation::p_adic(1).is_err());
        assert!(BaseValuation::p_adic(91).is_err()); // 7 * 13
        assert!(is_prime(2u64.pow(61) - 1));
        assert!(!is_prime(2u64.pow(62)));
    }

    #[test]
    fn json_round_trip() {
        let nu = BaseValuation::p_adic(2).unwrap();
        let s = serde_json::to_string(&nu).unwrap();
        assert_eq!(s, r#"{"type":"p-adic","p":"2"}"#);
        assert_eq!(serde_json::from_str::<BaseValuation>(&s).unwrap(), nu);
        assert!(serde_json::from_str::<BaseValuation>(r#"{"type":"p-adic","p":"6"}"#).is_err());
    }
}
