//! Continuous families of augmentations and their limit valuations.
//!
//! A continuous family augments a fixed prefix valuation by a sequence of
//! keys of one common degree whose assigned values increase strictly and
//! without a maximum. Families are finitely presented: either an explicit
//! member list or a closed-form rule, truncated at a declared horizon.
//! Values of most polynomials stabilize along the members; the ones that
//! never do are exactly the candidates for limit keys. A limit augmentation
//! assigns a value past the whole family to such a key and evaluates through
//! stabilized digit values.

use std::fmt;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chain::{eval_rec, AugStep, Chain, ChainDocPrefix};
use crate::field::{BaseValuation, Rat};
use crate::poly::{phi_expand, Poly, RatFn};
use crate::value::Value;
use crate::Error;

/// Default truncation horizon for rule-generated families.
pub const DEFAULT_HORIZON: usize = 64;
/// Default stabilization window: this many consecutive equal member values
/// count as stabilized.
pub const DEFAULT_WINDOW: usize = 4;

/// Member presentation of a family: explicit list or generating rule.
#[derive(Clone, Debug, PartialEq)]
pub enum MemberSource {
    Explicit(Vec<AugStep>),
    /// Members `(x - c_t, t + 1)` with `c_t = p + p^2 + ... + p^t`, the
    /// truncations of the geometric series converging p-adically to
    /// `-p/(p-1)` (for `p = 2`: to `-2`).
    GeometricApprox { p: u64 },
}

/// Degree, member presentation, and horizon of a continuous family,
/// independent of the valuation it augments.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyShape {
    pub degree: usize,
    pub source: MemberSource,
    pub horizon: usize,
}

impl FamilyShape {
    pub fn explicit(members: Vec<AugStep>) -> Result<Self, Error> {
        if members.is_empty() {
            return Err(Error::Input("a family needs at least one member".into()));
        }
        let degree = members[0]
            .phi
            .degree()
            .ok_or_else(|| Error::Input("zero member key".into()))?;
        let horizon = members.len() - 1;
        Ok(FamilyShape {
            degree,
            source: MemberSource::Explicit(members),
            horizon,
        })
    }

    pub fn geometric(p: u64, horizon: usize) -> Result<Self, Error> {
        BaseValuation::p_adic(p)?;
        Ok(FamilyShape {
            degree: 1,
            source: MemberSource::GeometricApprox { p },
            horizon,
        })
    }

    /// Member `t`, if presented.
    pub fn member(&self, t: usize) -> Option<AugStep> {
        if t > self.horizon {
            return None;
        }
        match &self.source {
            MemberSource::Explicit(members) => members.get(t).cloned(),
            MemberSource::GeometricApprox { p } => {
                let p = BigInt::from(*p);
                let mut c = BigInt::from(0);
                let mut pk = p.clone();
                for _ in 0..t {
                    c += &pk;
                    pk *= &p;
                }
                let phi = Poly::new(vec![Rat::from_integer(-c), Rat::from_integer(1.into())]);
                Some(AugStep::new(phi, Value::from_int(t as i64 + 1)))
            }
        }
    }
}

/// A continuous family of augmentations over a prefix valuation.
///
/// The prefix is a chain whose step list may be empty (members then augment
/// the base valuation directly, which forces degree one).
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousFamily {
    pub prefix: Chain,
    pub shape: FamilyShape,
}

/// Result of walking member values until they repeat.
#[derive(Clone, Debug, PartialEq)]
pub struct Stabilization {
    /// The last value computed (the stabilized value when `stabilized`).
    pub value: Value,
    pub stabilized: bool,
    /// First index of the final constant run, when stabilized.
    pub first_stable: Option<usize>,
}

/// Walks `member_value(0..=horizon)` until `window` consecutive equal values
/// appear. A decrease is a hard error: member values of a family never go
/// down.
pub(crate) fn stabilize_walk<F>(
    horizon: usize,
    window: usize,
    mut member_value: F,
) -> Result<Stabilization, Error>
where
    F: FnMut(usize) -> Result<Value, Error>,
{
    if window == 0 {
        return Err(Error::Input("stabilization window must be >= 1".into()));
    }
    let mut last: Option<Value> = None;
    let mut run_start = 0;
    let mut run_len = 0;
    for t in 0..=horizon {
        let v = member_value(t)?;
        match &last {
            Some(prev) if *prev == v => run_len += 1,
            Some(prev) if v < *prev => {
                return Err(Error::InvalidFamily(format!(
                    "member value decreased from {prev} to {v} at index {t}"
                )));
            }
            _ => {
                run_start = t;
                run_len = 1;
            }
        }
        last = Some(v);
        if run_len >= window {
            return Ok(Stabilization {
                value: last.unwrap(),
                stabilized: true,
                first_stable: Some(run_start),
            });
        }
    }
    Ok(Stabilization {
        value: last.expect("horizon walk visits at least t = 0"),
        stabilized: false,
        first_stable: None,
    })
}

impl ContinuousFamily {
    pub fn new(prefix: Chain, shape: FamilyShape) -> Result<Self, Error> {
        let family = ContinuousFamily { prefix, shape };
        family.validate()?;
        Ok(family)
    }

    /// Checks the family invariants on the presented members: monic keys of
    /// the common degree, strictly increasing values, each member a valid
    /// augmentation of the prefix, and compatibility (member `t` evaluates
    /// the next key to exactly its own value).
    pub fn validate(&self) -> Result<(), Error> {
        if !self.prefix.steps.is_empty() {
            let report = self.prefix.validate();
            if !report.is_ok() {
                return Err(Error::InvalidChain(report));
            }
            if self.prefix.is_pseudo() {
                return Err(Error::InvalidFamily(
                    "family prefix must be a valuation, not a pseudo-valuation".into(),
                ));
            }
        } else if self.shape.degree != 1 {
            return Err(Error::InvalidFamily(
                "a family over the bare base valuation must have degree one".into(),
            ));
        }
        let mut prev: Option<AugStep> = None;
        for t in 0..=self.shape.horizon {
            let member = self.shape.member(t).ok_or_else(|| {
                Error::InvalidFamily(format!("member {t} missing below horizon"))
            })?;
            if !member.phi.is_monic() || member.phi.degree() != Some(self.shape.degree) {
                return Err(Error::InvalidFamily(format!(
                    "member {t} key must be monic of degree {}",
                    self.shape.degree
                )));
            }
            if member.gamma.is_infinite() {
                return Err(Error::InvalidFamily(format!(
                    "member {t} carries an infinite value"
                )));
            }
            // the first member may restate the prefix's own last step: the
            // presentations keep the head of the family among the members
            let duplicates_head = self.prefix.steps.last() == Some(&member);
            if !duplicates_head {
                let member_chain = self.member_chain_unchecked(&member);
                let report = member_chain.validate();
                if !report.is_ok() {
                    return Err(Error::InvalidFamily(format!(
                        "member {t} is not a valid augmentation: {report}"
                    )));
                }
            }
            if let Some(p) = &prev {
                if member.gamma <= p.gamma {
                    return Err(Error::InvalidFamily(format!(
                        "member values must increase strictly, violated at index {t}"
                    )));
                }
                // compatibility: the previous member valuation assigns to
                // this key exactly the previous value
                let prev_chain = self.member_chain_unchecked(p);
                let got = prev_chain.eval_unchecked(&member.phi);
                if got != p.gamma {
                    return Err(Error::InvalidFamily(format!(
                        "member {} evaluates the next key to {got}, expected {}",
                        t - 1,
                        p.gamma
                    )));
                }
            }
            prev = Some(member);
        }
        Ok(())
    }

    fn member_chain_unchecked(&self, member: &AugStep) -> Chain {
        let mut steps = self.prefix.steps.clone();
        steps.push(member.clone());
        Chain {
            base: self.prefix.base.clone(),
            steps,
        }
    }

    /// The member valuation at index `t` as a chain.
    pub fn member_chain(&self, t: usize) -> Result<Chain, Error> {
        let member = self
            .shape
            .member(t)
            .ok_or_else(|| Error::Input(format!("member {t} beyond horizon {}", self.shape.horizon)))?;
        Ok(self.member_chain_unchecked(&member))
    }

    /// Value of `f` under member `t`.
    pub fn member_value(&self, t: usize, f: &Poly) -> Result<Value, Error> {
        let member = self
            .shape
            .member(t)
            .ok_or_else(|| Error::Input(format!("member {t} beyond horizon {}", self.shape.horizon)))?;
        Ok(eval_rec(
            &self.prefix.base,
            &self.prefix.steps,
            Some(&member),
            f,
        ))
    }

    /// The eventual member value of `f`: walks members until `window`
    /// consecutive values agree. Zero stabilizes at `inf` immediately; a
    /// walk that exhausts the horizon reports the last value with
    /// `stabilized = false` (the input is then a limit-key candidate).
    pub fn stabilized_value(&self, f: &Poly, window: usize) -> Result<Stabilization, Error> {
        if f.is_zero() {
            return Ok(Stabilization {
                value: Value::Infinity,
                stabilized: true,
                first_stable: Some(0),
            });
        }
        stabilize_walk(self.shape.horizon, window, |t| self.member_value(t, f))
    }
}

/// Classification of one candidate by [`ContinuousFamily::limit_key_probe`].
#[derive(Clone, Debug)]
pub struct LimitKeyRow {
    pub candidate: Poly,
    pub outcome: Stabilization,
}

/// Pool-restricted probe for limit-key candidates.
#[derive(Clone, Debug)]
pub struct LimitKeyReport {
    pub rows: Vec<LimitKeyRow>,
    /// Minimal degree among the non-stabilizing candidates, if any.
    pub minimal_degree: Option<usize>,
    /// The monic non-stabilizing candidates of that degree: the pool's
    /// approximation of the set of limit keys.
    pub minimal_monic: Vec<Poly>,
}

impl ContinuousFamily {
    /// Classifies each candidate as stabilized (definitely not a limit-key
    /// candidate) or non-stabilized at the horizon (candidate). A finite
    /// walk can refute candidacy but never prove it, so non-stabilization is
    /// reported as candidacy, not membership.
    pub fn limit_key_probe(
        &self,
        candidates: &[Poly],
        window: usize,
    ) -> Result<LimitKeyReport, Error> {
        let mut rows = Vec::with_capacity(candidates.len());
        for cand in candidates {
            if cand.is_zero() {
                return Err(Error::Input("limit-key candidates must be nonzero".into()));
            }
            let outcome = self.stabilized_value(cand, window)?;
            rows.push(LimitKeyRow {
                candidate: cand.clone(),
                outcome,
            });
        }
        let minimal_degree = rows
            .iter()
            .filter(|r| !r.outcome.stabilized)
            .filter_map(|r| r.candidate.degree())
            .min();
        let minimal_monic = match minimal_degree {
            None => vec![],
            Some(d) => rows
                .iter()
                .filter(|r| {
                    !r.outcome.stabilized && r.candidate.degree() == Some(d) && r.candidate.is_monic()
                })
                .map(|r| r.candidate.clone())
                .collect(),
        };
        Ok(LimitKeyReport {
            rows,
            minimal_degree,
            minimal_monic,
        })
    }
}

/// Outcome of a divisibility witness computation.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessOutcome {
    /// `f` is not eventually divisible by the key: the remainder of the
    /// Euclidean division carries the stabilized value of `f`, and the
    /// `q*phi` part exceeds it from `witness_t` on.
    NotEventuallyDivisible { value: Value, witness_t: usize },
    /// `f` did not stabilize at the horizon; eventual divisibility remains
    /// possible but unproven.
    Inconclusive,
}

/// Report of [`ContinuousFamily::divisibility_witness`].
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub quotient: Poly,
    pub remainder: Poly,
    pub f_outcome: Stabilization,
    pub r_outcome: Stabilization,
    pub outcome: WitnessOutcome,
}

impl ContinuousFamily {
    /// Executable form of the division argument for limit keys: splitting
    /// `f = q*phi + r`, a stabilizing `f` must stabilize together with `r`
    /// at the same value while the member values of `q*phi` climb past it.
    pub fn divisibility_witness(
        &self,
        phi: &Poly,
        f: &Poly,
        window: usize,
    ) -> Result<WitnessReport, Error> {
        if !phi.is_monic() {
            return Err(Error::Input(format!("divisor `{phi}` is not monic")));
        }
        let (quotient, remainder) = f.divmod(phi)?;
        let f_outcome = self.stabilized_value(f, window)?;
        let r_outcome = self.stabilized_value(&remainder, window)?;
        if !f_outcome.stabilized {
            return Ok(WitnessReport {
                quotient,
                remainder,
                f_outcome,
                r_outcome,
                outcome: WitnessOutcome::Inconclusive,
            });
        }
        if !r_outcome.stabilized || r_outcome.value != f_outcome.value {
            return Err(Error::InvalidFamily(format!(
                "stabilized `{f}` disagrees with its remainder `{remainder}` \
                 ({} vs {:?} at window {window})",
                f_outcome.value, r_outcome
            )));
        }
        // find the index from which v_t(q * phi) strictly exceeds the value
        let q_phi = &quotient * phi;
        let from = f_outcome.first_stable.unwrap_or(0);
        let mut witness_t = None;
        for t in from..=self.shape.horizon {
            let v = self.member_value(t, &q_phi)?;
            if v > f_outcome.value {
                witness_t = Some(t);
                break;
            }
        }
        match witness_t {
            Some(t) => Ok(WitnessReport {
                quotient,
                remainder,
                r_outcome,
                outcome: WitnessOutcome::NotEventuallyDivisible {
                    value: f_outcome.value.clone(),
                    witness_t: t,
                },
                f_outcome,
            }),
            None => Err(Error::InvalidFamily(format!(
                "member values of q*phi never exceeded the stabilized value {} \
                 within the horizon",
                f_outcome.value
            ))),
        }
    }
}

/// A limit augmentation: a value assigned past a whole continuous family to
/// a declared limit key. With an infinite value this is the pseudo-valuation
/// whose socle is generated by the limit key.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitAugmentation {
    pub family: ContinuousFamily,
    pub limit_key: Poly,
    pub gamma: Value,
}

impl LimitAugmentation {
    pub fn new(family: ContinuousFamily, limit_key: Poly, gamma: Value) -> Result<Self, Error> {
        let aug = LimitAugmentation {
            family,
            limit_key,
            gamma,
        };
        aug.validate()?;
        Ok(aug)
    }

    /// Structural checks: monic key of degree at least the family degree,
    /// and a value strictly above every presented member value. Membership
    /// of the key in the limit-key set is the caller's declaration; the
    /// probe supplies supporting evidence, not proof.
    pub fn validate(&self) -> Result<(), Error> {
        self.family.validate()?;
        if !self.limit_key.is_monic() {
            return Err(Error::Input(format!(
                "limit key `{}` is not monic",
                self.limit_key
            )));
        }
        if self.limit_key.degree() < Some(self.family.shape.degree) {
            return Err(Error::Input(format!(
                "limit key degree must be at least the family degree {}",
                self.family.shape.degree
            )));
        }
        for t in 0..=self.family.shape.horizon {
            let member = self.family.shape.member(t).expect("validated presentation");
            if self.gamma <= member.gamma {
                return Err(Error::Input(format!(
                    "limit value {} does not exceed member value {} at index {t}",
                    self.gamma, member.gamma
                )));
            }
        }
        Ok(())
    }

    /// Stabilized family value of one digit; digits of degree below the
    /// limit key always stabilize for genuine families, larger ones may
    /// exhaust the horizon.
    fn digit_value(&self, digit: &Poly, window: usize) -> Result<Value, Error> {
        let s = self.family.stabilized_value(digit, window)?;
        if !s.stabilized {
            return Err(Error::Horizon {
                horizon: self.family.shape.horizon,
                window,
                context: format!("digit `{digit}` did not stabilize; raise the family horizon"),
            });
        }
        Ok(s.value)
    }

    /// Value of `f` under the limit augmentation: expand along the limit key
    /// and take the infimum of stabilized digit values plus `j * gamma`.
    pub fn eval(&self, f: &Poly, window: usize) -> Result<Value, Error> {
        let expansion = phi_expand(f, &self.limit_key)?;
        let mut terms = Vec::with_capacity(expansion.digits.len());
        for (j, digit) in expansion.digits.iter().enumerate() {
            if digit.is_zero() {
                continue;
            }
            let v = self.digit_value(digit, window)?;
            terms.push(if j == 0 { v } else { &v + &self.gamma.scaled(j) });
        }
        Ok(Value::inf(terms))
    }

    /// Value of `f` presented as `sum f_j * key^j` with arbitrary
    /// coefficients, each required to be provably not eventually divisible
    /// by the limit key. Equals [`Self::eval`] of the assembled polynomial.
    pub fn eval_terms(&self, terms: &[(Poly, usize)], window: usize) -> Result<Value, Error> {
        let mut seen = std::collections::BTreeSet::new();
        for (_, j) in terms {
            if !seen.insert(*j) {
                return Err(Error::Input(format!("duplicate exponent {j} in representation")));
            }
        }
        let mut vals = Vec::with_capacity(terms.len());
        for (f_j, j) in terms {
            if f_j.is_zero() {
                continue;
            }
            let witness = self.family.divisibility_witness(&self.limit_key, f_j, window)?;
            let value = match witness.outcome {
                WitnessOutcome::NotEventuallyDivisible { value, .. } => value,
                WitnessOutcome::Inconclusive => {
                    return Err(Error::Horizon {
                        horizon: self.family.shape.horizon,
                        window,
                        context: format!(
                            "coefficient `{f_j}` is not witnessed non-divisible at the horizon"
                        ),
                    })
                }
            };
            vals.push(if *j == 0 {
                value
            } else {
                &value + &self.gamma.scaled(*j)
            });
        }
        Ok(Value::inf(vals))
    }

    /// Assembles a representation into the polynomial it denotes.
    pub fn assemble_terms(&self, terms: &[(Poly, usize)]) -> Poly {
        let mut acc = Poly::zero();
        for (f_j, j) in terms {
            acc = &acc + &(f_j * &self.limit_key.pow(*j));
        }
        acc
    }

    /// Partial extension to rational functions, defined when the denominator
    /// has finite value.
    pub fn eval_ratfn(&self, fr: &RatFn, window: usize) -> Result<Value, Error> {
        let den = self.eval(&fr.den, window)?;
        if den.is_infinite() {
            return Err(Error::Domain(
                "denominator lies in the socle of the limit augmentation".into(),
            ));
        }
        let num = self.eval(&fr.num, window)?;
        Ok(num.checked_sub(&den).expect("denominator value is finite"))
    }
}

impl fmt::Display for WitnessOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessOutcome::NotEventuallyDivisible { value, witness_t } => {
                write!(f, "not eventually divisible (value {value}, witnessed at t = {witness_t})")
            }
            WitnessOutcome::Inconclusive => {
                write!(f, "inconclusive at horizon (non-stabilizing input)")
            }
        }
    }
}

// JSON form:
// {"prefix": <chain with possibly empty steps>, "degree": 1,
//  "rule": {"type": "geometric-approx", "p": "2"}, "horizon": 64}
// or with "members": [{"phi": [...], "gamma": "..."}] instead of "rule".
#[derive(Serialize, Deserialize)]
struct RuleDoc {
    #[serde(rename = "type")]
    kind: String,
    p: String,
}

#[derive(Serialize, Deserialize)]
struct MemberDoc {
    phi: Poly,
    gamma: Value,
}

#[derive(Serialize, Deserialize)]
struct FamilyDoc {
    prefix: ChainDocPrefix,
    degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<RuleDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<MemberDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
}

impl Serialize for ContinuousFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (rule, members) = match &self.shape.source {
            MemberSource::GeometricApprox { p } => (
                Some(RuleDoc {
                    kind: "geometric-approx".into(),
                    p: p.to_string(),
                }),
                None,
            ),
            MemberSource::Explicit(list) => (
                None,
                Some(
                    list.iter()
                        .map(|m| MemberDoc {
                            phi: m.phi.clone(),
                            gamma: m.gamma.clone(),
                        })
                        .collect(),
                ),
            ),
        };
        FamilyDoc {
            prefix: ChainDocPrefix::from_chain(&self.prefix),
            degree: self.shape.degree,
            rule,
            members,
            horizon: Some(self.shape.horizon),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ContinuousFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = FamilyDoc::deserialize(deserializer)?;
        let prefix = doc.prefix.into_chain().map_err(D::Error::custom)?;
        let source = match (doc.rule, doc.members) {
            (Some(rule), None) => {
                if rule.kind != "geometric-approx" {
                    return Err(D::Error::custom(format!(
                        "unknown family rule `{}`",
                        rule.kind
                    )));
                }
                let p: u64 = rule
                    .p
                    .parse()
                    .map_err(|_| D::Error::custom(format!("rule field `p`: `{}` is not an integer", rule.p)))?;
                MemberSource::GeometricApprox { p }
            }
            (None, Some(members)) => MemberSource::Explicit(
                members
                    .into_iter()
                    .map(|m| AugStep::new(m.phi, m.gamma))
                    .collect(),
            ),
            (Some(_), Some(_)) => {
                return Err(D::Error::custom(
                    "family must declare `rule` or `members`, not both",
                ))
            }
            (None, None) => {
                return Err(D::Error::custom("family must declare `rule` or `members`"))
            }
        };
        let horizon = match (&source, doc.horizon) {
            (MemberSource::Explicit(list), h) => {
                let max = list.len().saturating_sub(1);
                h.map_or(max, |h| h.min(max))
            }
            (MemberSource::GeometricApprox { .. }, h) => h.unwrap_or(DEFAULT_HORIZON),
        };
        let family = ContinuousFamily {
            prefix,
            shape: FamilyShape {
                degree: doc.degree,
                source,
                horizon,
            },
        };
        family
            .validate()
            .map_err(|e| D::Error::custom(format!("{e}")))?;
        Ok(family)
    }
}

#[derive(Serialize, Deserialize)]
struct LimitAugDoc {
    family: ContinuousFamily,
    limit_key: Poly,
    gamma: Value,
}

impl Serialize for LimitAugmentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LimitAugDoc {
            family: self.family.clone(),
            limit_key: self.limit_key.clone(),
            gamma: self.gamma.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LimitAugmentation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = LimitAugDoc::deserialize(deserializer)?;
        LimitAugmentation::new(doc.family, doc.limit_key, doc.gamma)
            .map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Exact `v(f(a))` by rational substitution; the independent oracle for
/// pseudo-valuation limits whose socle key vanishes at `a`.
pub fn substitution_value(base: &BaseValuation, f: &Poly, at: &Rat) -> Value {
    base.value(&f.eval(at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn f2() -> ContinuousFamily {
        catalog::family_geometric()
    }

    #[test]
    fn geometric_members() {
        let fam = f2();
        let m0 = fam.shape.member(0).unwrap();
        assert_eq!(m0.phi, Poly::x());
        assert_eq!(m0.gamma, Value::from_int(1));
        let m2 = fam.shape.member(2).unwrap();
        assert_eq!(m2.phi, Poly::from_ints(&[-6, 1]));
        assert_eq!(m2.gamma, Value::from_int(3));
        assert!(fam.validate().is_ok());
    }

    #[test]
    fn stabilization_examples() {
        let fam = f2();
        let s = fam.stabilized_value(&Poly::x(), 3).unwrap();
        assert_eq!(s.value, Value::from_int(1));
        assert!(s.stabilized);

        let s = fam.stabilized_value(&Poly::from_ints(&[2, 1]), 3).unwrap();
        assert!(!s.stabilized);
        assert_eq!(s.value, Value::from_int(fam.shape.horizon as i64 + 1));

        let s = fam.stabilized_value(&Poly::from_ints(&[5]), 3).unwrap();
        assert_eq!(s.value, Value::zero());
        assert!(s.stabilized);
        assert_eq!(s.first_stable, Some(0));

        let s = fam.stabilized_value(&Poly::zero(), 3).unwrap();
        assert_eq!(s.value, Value::Infinity);
        assert!(s.stabilized);
    }

    #[test]
    fn limit_key_probe_examples() {
        let fam = f2();
        let report = fam
            .limit_key_probe(
                &[
                    Poly::x(),
                    Poly::from_ints(&[2, 1]),
                    Poly::from_ints(&[4, 0, 1]),
                ],
                4,
            )
            .unwrap();
        // x stabilizes at 1, x^2 + 4 stabilizes at 3, x + 2 never stabilizes
        assert!(report.rows[0].outcome.stabilized);
        assert_eq!(report.rows[2].outcome.value, Value::from_int(3));
        assert!(report.rows[2].outcome.stabilized);
        assert!(!report.rows[1].outcome.stabilized);
        assert_eq!(report.minimal_degree, Some(1));
        assert_eq!(report.minimal_monic, vec![Poly::from_ints(&[2, 1])]);

        let constants = fam
            .limit_key_probe(&[Poly::from_ints(&[3]), Poly::from_ints(&[8])], 4)
            .unwrap();
        assert_eq!(constants.minimal_degree, None);

        let product = &Poly::from_ints(&[2, 1]) * &Poly::x();
        let report = fam
            .limit_key_probe(&[Poly::from_ints(&[2, 1]), product], 4)
            .unwrap();
        assert_eq!(report.minimal_degree, Some(1));
        assert!(report.rows.iter().all(|r| !r.outcome.stabilized));
    }

    #[test]
    fn witness_examples() {
        let fam = f2();
        let phi = Poly::from_ints(&[2, 1]);

        let report = fam
            .divisibility_witness(&phi, &Poly::from_ints(&[4, 0, 1]), 4)
            .unwrap();
        assert_eq!(report.remainder, Poly::from_ints(&[8]));
        match report.outcome {
            WitnessOutcome::NotEventuallyDivisible { ref value, .. } => {
                assert_eq!(*value, Value::from_int(3));
            }
            ref other => panic!("unexpected outcome {other:?}"),
        }

        let product = &phi * &Poly::x();
        let report = fam.divisibility_witness(&phi, &product, 4).unwrap();
        assert_eq!(report.outcome, WitnessOutcome::Inconclusive);

        // degree below the divisor: quotient is zero, trivially witnessed
        let report = fam.divisibility_witness(&phi, &Poly::from_ints(&[6]), 4).unwrap();
        assert!(report.quotient.is_zero());
        assert!(matches!(
            report.outcome,
            WitnessOutcome::NotEventuallyDivisible { .. }
        ));
    }

    #[test]
    fn limit_eval_examples() {
        let aug = catalog::limit_pseudo();
        assert_eq!(
            aug.eval(&Poly::from_ints(&[4, 0, 1]), 4).unwrap(),
            Value::from_int(3)
        );
        assert_eq!(
            aug.eval(&Poly::from_ints(&[-4, 0, 1]), 4).unwrap(),
            Value::Infinity
        );
        assert_eq!(aug.eval(&Poly::one(), 4).unwrap(), Value::zero());

        // substitution oracle
        let minus_two = Rat::from_integer((-2).into());
        for f in [
            Poly::from_ints(&[4, 0, 1]),
            Poly::from_ints(&[3, 5, 1]),
            Poly::from_ints(&[10, -3]),
        ] {
            assert_eq!(
                aug.eval(&f, 4).unwrap(),
                substitution_value(&aug.family.prefix.base, &f, &minus_two)
            );
        }
    }

    #[test]
    fn eval_terms_examples() {
        let aug = catalog::limit_pseudo();
        let rep = [
            (Poly::from_ints(&[8]), 0),
            (Poly::from_ints(&[-4]), 1),
            (Poly::one(), 2),
        ];
        assert_eq!(aug.eval_terms(&rep, 4).unwrap(), Value::from_int(3));
        assert_eq!(
            aug.eval(&aug.assemble_terms(&rep), 4).unwrap(),
            Value::from_int(3)
        );

        // oversized non-divisible coefficient
        let rep = [(Poly::from_ints(&[4, 0, 1]), 0)];
        assert_eq!(aug.eval_terms(&rep, 4).unwrap(), Value::from_int(3));

        let rep = [(Poly::one(), 0)];
        assert_eq!(aug.eval_terms(&rep, 4).unwrap(), Value::zero());

        // non-stabilizing coefficient is a precondition failure
        let rep = [(Poly::from_ints(&[2, 1]), 0)];
        assert!(matches!(
            aug.eval_terms(&rep, 4),
            Err(Error::Horizon { .. })
        ));
        // duplicate exponents are rejected
        let rep = [(Poly::one(), 1), (Poly::from_ints(&[3]), 1)];
        assert!(matches!(aug.eval_terms(&rep, 4), Err(Error::Input(_))));
    }

    #[test]
    fn family_json_round_trip() {
        let fam = f2();
        let s = serde_json::to_string(&fam).unwrap();
        let back: ContinuousFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);

        let aug = catalog::limit_pseudo();
        let s = serde_json::to_string(&aug).unwrap();
        let back: LimitAugmentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, aug);

        // rule and members are mutually exclusive
        let bad = r#"{"prefix": {"field": {"valuation": {"type":"p-adic","p":"2"}}, "steps": []},
                      "degree": 1,
                      "rule": {"type": "geometric-approx", "p": "2"},
                      "members": [{"phi": ["0","1"], "gamma": "1"}],
                      "horizon": 8}"#;
        assert!(serde_json::from_str::<ContinuousFamily>(bad).is_err());
    }
}
