//! Dense exact polynomials over `Q`, Euclidean division, and the key-adic
//! digit expansion every valuation formula consumes.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::Rat;
use crate::Error;

/// A polynomial in one variable, coefficients low degree first.
///
/// Invariant: no trailing zero coefficients; the zero polynomial is the
/// empty list, so `degree()` is `None` exactly for zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn monomial(c: Rat, degree: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); degree + 1];
        coeffs[degree] = c;
        Poly { coeffs }
    }

    /// Integer coefficients, low degree first; handy for literals.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&n| Rat::from_integer(n.into())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map_or(false, One::is_one)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, mut exp: usize) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Exact evaluation at a rational point (Horner).
    pub fn eval(&self, at: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// Substitution `self(other)`.
    pub fn compose(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Substitution of a rational function: `self(fr)` as a fraction
    /// `sum c_j num^j den^(d-j) / den^d`.
    pub fn eval_ratfn(&self, fr: &RatFn) -> RatFn {
        if self.is_zero() {
            return RatFn::from_poly(Poly::zero());
        }
        let d = self.degree().unwrap();
        let mut num = Poly::zero();
        let mut den_pow = Poly::one(); // den^(d - j) built up as j descends
        for j in (0..=d).rev() {
            num = &(&num * &fr.num) + &den_pow.scale(&self.coeff(j));
            if j > 0 {
                den_pow = &den_pow * &fr.den;
            }
        }
        RatFn {
            num,
            den: fr.den.pow(d),
        }
    }

    /// Euclidean division `self = q*g + r` with `deg r < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly), Error> {
        if g.is_zero() {
            return Err(Error::Input("division by the zero polynomial".into()));
        }
        let dg = g.degree().unwrap();
        let lead = g.leading().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dg {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![Rat::zero(); r.len() - dg];
        for k in (0..q.len()).rev() {
            let c = &r[dg + k] / lead;
            if !c.is_zero() {
                for (i, gc) in g.coeffs.iter().enumerate() {
                    let t = &c * gc;
                    r[k + i] = &r[k + i] - &t;
                }
            }
            q[k] = c;
        }
        r.truncate(dg);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn fmt_with_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let term = match j {
                0 => format!("{c}"),
                _ => {
                    let pow = if j == 1 {
                        var.to_string()
                    } else {
                        format!("{var}^{j}")
                    };
                    if c.is_one() {
                        pow
                    } else if (-c).is_one() {
                        format!("-{pow}")
                    } else {
                        format!("{c}*{pow}")
                    }
                }
            };
            parts.push(term);
        }
        let mut out = String::new();
        for (i, t) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(t);
            } else if let Some(stripped) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with_var("x"))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::new(coeffs)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

// JSON form: array of rational strings, low degree first.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(rat_string).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let mut coeffs = Vec::with_capacity(strings.len());
        for (i, s) in strings.iter().enumerate() {
            let q: Rat = s.trim().parse().map_err(|_| {
                D::Error::custom(format!("coefficient {i}: `{s}` is not a rational"))
            })?;
            coeffs.push(q);
        }
        Ok(Poly::new(coeffs))
    }
}

pub(crate) fn rat_string(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// The digits of `f` along powers of a monic key `phi`:
/// `f = sum digits[j] * phi^j` with `deg digits[j] < deg phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub phi: Poly,
    pub digits: Vec<Poly>,
}

impl Expansion {
    /// Reassembles the expanded polynomial, for cross-checks.
    pub fn assemble(&self) -> Poly {
        let mut acc = Poly::zero();
        for digit in self.digits.iter().rev() {
            acc = &(&acc * &self.phi) + digit;
        }
        acc
    }
}

/// Repeated Euclidean division by `phi`, lowest digit first. The expansion
/// of zero has no digits.
pub fn phi_expand(f: &Poly, phi: &Poly) -> Result<Expansion, Error> {
    if !phi.is_monic() || phi.degree() == Some(0) {
        return Err(Error::Input(format!(
            "expansion key must be monic of degree >= 1, got `{phi}`"
        )));
    }
    let mut digits = Vec::new();
    let mut rest = f.clone();
    while !rest.is_zero() {
        let (q, r) = rest.divmod(phi)?;
        digits.push(r);
        rest = q;
    }
    while digits.last().map_or(false, Poly::is_zero) {
        digits.pop();
    }
    Ok(Expansion {
        phi: phi.clone(),
        digits,
    })
}

/// A rational function `num/den`, not necessarily in lowest terms
/// (valuations are quotient-invariant, so reduction is never needed).
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Input("rational function with zero denominator".into()));
        }
        Ok(RatFn { num, den })
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFn {
            num,
            den: Poly::one(),
        }
    }

    /// The variable as a rational function.
    pub fn var() -> Self {
        RatFn::from_poly(Poly::x())
    }

    /// Substitution `self(g)` for a non-constant `g`; the denominator stays
    /// nonzero because a rational substitution cannot kill it.
    pub fn compose(&self, g: &RatFn) -> Result<RatFn, Error> {
        let num = self.num.eval_ratfn(g);
        let den = self.den.eval_ratfn(g);
        if den.num.is_zero() {
            return Err(Error::Input(
                "composition produced a zero denominator".into(),
            ));
        }
        RatFn::new(&num.num * &den.den, &num.den * &den.num)
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct RatFnDoc {
    num: Poly,
    den: Poly,
}

impl Serialize for RatFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RatFnDoc {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = RatFnDoc::deserialize(deserializer)?;
        RatFn::new(doc.num, doc.den).map_err(|e| D::Error::custom(format!("{e}")))
    }
}
