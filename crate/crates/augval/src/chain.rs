//! Augmented valuation chains: a base valuation on the coefficients plus an
//! ordered list of key-polynomial augmentation steps.
//!
//! A chain with steps `(phi_1, g_1), ..., (phi_n, g_n)` evaluates a
//! polynomial recursively: expand in the last key, evaluate the digits under
//! the truncated chain, and take the infimum of `value(digit_j) + j*g_n`
//! (the summand is omitted at `j = 0`). The first key has degree one, so the
//! recursion bottoms out on constants, where the base valuation applies.
//! An infinite value in the last step turns the chain into a pseudo-valuation
//! whose socle is the ideal generated by the last key.

use std::fmt;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::BaseValuation;
use crate::poly::{phi_expand, Poly, RatFn};
use crate::sample;
use crate::value::Value;
use crate::Error;

/// One augmentation step: a monic key polynomial and its assigned value.
#[derive(Clone, Debug, PartialEq)]
pub struct AugStep {
    pub phi: Poly,
    pub gamma: Value,
}

impl AugStep {
    pub fn new(phi: Poly, gamma: Value) -> Self {
        AugStep { phi, gamma }
    }
}

/// A valuation (or pseudo-valuation) of `K[x]` presented as a chain of
/// augmentation steps over a base valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub base: BaseValuation,
    pub steps: Vec<AugStep>,
}

/// A structural rule a chain can violate; step indices are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyChain,
    FirstKeyDegree,
    KeyNotMonic { step: usize },
    InteriorInfinity { step: usize },
    DegreeDecrease { step: usize },
    GammaNotAbove { step: usize, bound: Value },
    EquivalentConsecutiveKeys { step: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyChain => write!(f, "chain must have at least one step"),
            Violation::FirstKeyDegree => write!(f, "first key must have degree 1"),
            Violation::KeyNotMonic { step } => {
                write!(f, "key must be monic of degree >= 1 at step {step}")
            }
            Violation::InteriorInfinity { step } => {
                write!(f, "gamma may be `inf` only in the final step, found at step {step}")
            }
            Violation::DegreeDecrease { step } => {
                write!(f, "key degrees must be non-decreasing, violated at step {step}")
            }
            Violation::GammaNotAbove { step, bound } => write!(
                f,
                "gamma not strictly above previous value at step {step} (requires > {bound})"
            ),
            Violation::EquivalentConsecutiveKeys { step } => write!(
                f,
                "consecutive keys of equal degree are equivalent under the previous valuation at step {step}"
            ),
        }
    }
}

/// Outcome of validating a chain; violations are data, not failures.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Core of the recursive evaluation: value of `f` under `base` augmented by
/// `steps`, optionally topped by one more step. Callers must have validated
/// the structural invariants (monic keys, first key of degree one).
pub(crate) fn eval_rec(
    base: &BaseValuation,
    steps: &[AugStep],
    top: Option<&AugStep>,
    f: &Poly,
) -> Value {
    if f.is_zero() {
        return Value::Infinity;
    }
    let (step, below) = match top {
        Some(s) => (s, steps),
        None => match steps.split_last() {
            Some((s, rest)) => (s, rest),
            None => {
                debug_assert!(f.degree() == Some(0), "base case expects a constant");
                return base.value(&f.coeff(0));
            }
        },
    };
    let expansion = phi_expand(f, &step.phi).expect("keys checked before evaluation");
    Value::inf(expansion.digits.iter().enumerate().map(|(j, digit)| {
        let v = eval_rec(base, below, None, digit);
        if j == 0 {
            v
        } else {
            &v + &step.gamma.scaled(j)
        }
    }))
}

impl Chain {
    /// Builds a chain and validates it.
    pub fn new(base: BaseValuation, steps: Vec<AugStep>) -> Result<Self, Error> {
        let chain = Chain { base, steps };
        let report = chain.validate();
        if report.is_ok() {
            Ok(chain)
        } else {
            Err(Error::InvalidChain(report))
        }
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.steps.is_empty() {
            violations.push(Violation::EmptyChain);
            return ValidationReport { violations };
        }
        for (i, step) in self.steps.iter().enumerate() {
            if !step.phi.is_monic() || step.phi.degree() == Some(0) {
                violations.push(Violation::KeyNotMonic { step: i + 1 });
            }
            if step.gamma.is_infinite() && i + 1 != self.steps.len() {
                violations.push(Violation::InteriorInfinity { step: i + 1 });
            }
        }
        if self.steps[0].phi.degree() != Some(1) {
            violations.push(Violation::FirstKeyDegree);
        }
        for i in 1..self.steps.len() {
            if self.steps[i].phi.degree() < self.steps[i - 1].phi.degree() {
                violations.push(Violation::DegreeDecrease { step: i + 1 });
            }
        }
        if !violations.is_empty() {
            // value checks need a structurally sound prefix to evaluate
            return ValidationReport { violations };
        }
        for i in 1..self.steps.len() {
            let prefix = &self.steps[..i];
            let phi = &self.steps[i].phi;
            let bound = eval_rec(&self.base, prefix, None, phi);
            if self.steps[i].gamma <= bound {
                violations.push(Violation::GammaNotAbove {
                    step: i + 1,
                    bound: bound.clone(),
                });
            }
            if phi.degree() == self.steps[i - 1].phi.degree() {
                let prev = &self.steps[i - 1].phi;
                let diff = eval_rec(&self.base, prefix, None, &(phi - prev));
                let v_prev = eval_rec(&self.base, prefix, None, prev);
                if bound == v_prev && diff > bound {
                    violations.push(Violation::EquivalentConsecutiveKeys { step: i + 1 });
                }
            }
        }
        ValidationReport { violations }
    }

    /// True when the final step carries an infinite value; the chain is then
    /// a pseudo-valuation with socle generated by the final key.
    pub fn is_pseudo(&self) -> bool {
        self.steps.last().map_or(false, |s| s.gamma.is_infinite())
    }

    /// The chain truncated to its first `n` steps.
    pub fn truncated(&self, n: usize) -> Chain {
        Chain {
            base: self.base.clone(),
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
        }
    }

    /// Value of a polynomial. Fails on structurally invalid chains.
    pub fn eval(&self, f: &Poly) -> Result<Value, Error> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        Ok(self.eval_unchecked(f))
    }

    pub(crate) fn eval_unchecked(&self, f: &Poly) -> Value {
        eval_rec(&self.base, &self.steps, None, f)
    }

    /// Value of a rational function: `value(num) - value(den)`.
    ///
    /// For a pseudo-valuation this is the partial extension away from the
    /// socle; a denominator inside the socle has no value.
    pub fn eval_ratfn(&self, fr: &RatFn) -> Result<Value, Error> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        if fr.den.is_zero() {
            return Err(Error::Input("rational function with zero denominator".into()));
        }
        let den = self.eval_unchecked(&fr.den);
        if den.is_infinite() {
            return Err(Error::Domain(
                "denominator lies in the socle of a pseudo-valuation".into(),
            ));
        }
        let num = self.eval_unchecked(&fr.num);
        Ok(num.checked_sub(&den).expect("denominator value is finite"))
    }

    /// Whether `f` and `g` are equivalent under this valuation:
    /// `value(f - g) > value(f) = value(g)`.
    pub fn equivalent(&self, f: &Poly, g: &Poly) -> Result<bool, Error> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::Input("equivalence is defined for nonzero polynomials".into()));
        }
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        let vf = self.eval_unchecked(f);
        let vg = self.eval_unchecked(g);
        Ok(vf == vg && self.eval_unchecked(&(f - g)) > vf)
    }
}

// JSON form:
// {"field": {"valuation": {"type": "p-adic", "p": "2"}},
//  "variable": "x",
//  "steps": [{"phi": ["0","1"], "gamma": "1/2"}, ...]}
#[derive(Serialize, Deserialize)]
pub(crate) struct FieldDoc {
    pub valuation: BaseValuation,
}

#[derive(Serialize, Deserialize)]
struct StepDoc {
    phi: Poly,
    gamma: Value,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ChainDoc {
    field: FieldDoc,
    #[serde(default = "default_variable", skip_serializing_if = "is_default_variable")]
    variable: String,
    steps: Vec<StepDoc>,
}

fn default_variable() -> String {
    "x".into()
}

fn is_default_variable(v: &String) -> bool {
    v == "x"
}

impl Serialize for Chain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ChainDoc {
            field: FieldDoc {
                valuation: self.base.clone(),
            },
            variable: default_variable(),
            steps: self
                .steps
                .iter()
                .map(|s| StepDoc {
                    phi: s.phi.clone(),
                    gamma: s.gamma.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = ChainDoc::deserialize(deserializer)?;
        let steps = doc
            .steps
            .into_iter()
            .map(|s| AugStep::new(s.phi, s.gamma))
            .collect();
        let chain = Chain {
            base: doc.field.valuation,
            steps,
        };
        let report = chain.validate();
        if !report.is_ok() {
            return Err(D::Error::custom(format!("invalid chain: {report}")));
        }
        Ok(chain)
    }
}

/// Chain document for positions where an empty step list is meaningful
/// (family prefixes: members then augment the base valuation directly).
#[derive(Serialize, Deserialize)]
pub(crate) struct ChainDocPrefix {
    field: FieldDoc,
    #[serde(default = "default_variable", skip_serializing_if = "is_default_variable")]
    variable: String,
    #[serde(default)]
    steps: Vec<StepDoc>,
}

impl ChainDocPrefix {
    pub(crate) fn from_chain(chain: &Chain) -> Self {
        ChainDocPrefix {
            field: FieldDoc {
                valuation: chain.base.clone(),
            },
            variable: default_variable(),
            steps: chain
                .steps
                .iter()
                .map(|s| StepDoc {
                    phi: s.phi.clone(),
                    gamma: s.gamma.clone(),
                })
                .collect(),
        }
    }

    pub(crate) fn into_chain(self) -> Result<Chain, String> {
        let chain = Chain {
            base: self.field.valuation,
            steps: self
                .steps
                .into_iter()
                .map(|s| AugStep::new(s.phi, s.gamma))
                .collect(),
        };
        if !chain.steps.is_empty() {
            let report = chain.validate();
            if !report.is_ok() {
                return Err(format!("invalid prefix chain: {report}"));
            }
        }
        Ok(chain)
    }
}

/// One counterexample found by [`multiplicativity_probe`].
#[derive(Clone, Debug)]
pub struct ProbeViolation {
    pub sample: usize,
    pub f: Poly,
    pub g: Poly,
    pub detail: String,
}

/// Outcome of a multiplicativity probe.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub samples: usize,
    pub violations: Vec<ProbeViolation>,
}

impl ProbeReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Diagnostic that a structurally valid chain behaves as a valuation: draws
/// seeded random pairs and checks `v(fg) = v(f) + v(g)` and the ultrametric
/// inequality. The zero pair is always injected. Deterministic under `seed`
/// regardless of `parallel`.
pub fn multiplicativity_probe(
    chain: &Chain,
    samples: usize,
    seed: u64,
    degree_bound: usize,
    parallel: bool,
) -> Result<ProbeReport, Error> {
    let report = chain.validate();
    if !report.is_ok() {
        return Err(Error::InvalidChain(report));
    }
    let check_pair = |i: usize| -> Option<ProbeViolation> {
        let (f, g) = if i == 0 {
            (Poly::zero(), Poly::zero())
        } else {
            let mut rng = sample::sample_rng(seed, i as u64);
            (
                sample::random_poly(&mut rng, &chain.base, degree_bound),
                sample::random_poly(&mut rng, &chain.base, degree_bound),
            )
        };
        let vf = chain.eval_unchecked(&f);
        let vg = chain.eval_unchecked(&g);
        let v_prod = chain.eval_unchecked(&(&f * &g));
        let v_sum = chain.eval_unchecked(&(&f + &g));
        let expected = &vf + &vg;
        if v_prod != expected {
            return Some(ProbeViolation {
                sample: i,
                f,
                g,
                detail: format!("v(fg) = {v_prod}, v(f) + v(g) = {expected}"),
            });
        }
        let min = vf.min(vg);
        if v_sum < min {
            return Some(ProbeViolation {
                sample: i,
                f,
                g,
                detail: format!("v(f + g) = {v_sum} below min {min}"),
            });
        }
        None
    };
    let violations: Vec<ProbeViolation> = if parallel {
        (0..=samples)
            .into_par_iter()
            .filter_map(check_pair)
            .collect()
    } else {
        (0..=samples).filter_map(check_pair).collect()
    };
    Ok(ProbeReport {
        samples: samples + 1,
        violations,
    })
}

/// One candidate's standing in a refinement probe.
#[derive(Clone, Debug)]
pub struct RefineRow {
    pub candidate: Poly,
    pub current_value: Value,
    pub target_value: Value,
    /// `current(phi) < target(phi)`: the candidate witnesses that `current`
    /// still lies strictly below `target`.
    pub member: bool,
}

/// Pool-restricted refinement sets of one valuation against a target.
#[derive(Clone, Debug)]
pub struct RefineReport {
    pub rows: Vec<RefineRow>,
    /// Minimal degree among members, if any.
    pub minimal_degree: Option<usize>,
    /// The monic members of that minimal degree.
    pub minimal_members: Vec<Poly>,
}

impl RefineReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "candidate": r.candidate,
                "current_value": r.current_value,
                "target_value": r.target_value,
                "member": r.member,
            })).collect::<Vec<_>>(),
            "minimal_degree": self.minimal_degree,
            "minimal_members": self.minimal_members,
        })
    }
}

/// For each monic candidate, decides whether `current` sits strictly below
/// `target` on it, and reports the minimal degree among such candidates with
/// its witnesses. The candidate pool stands in for the full refinement set,
/// which is never searched.
pub fn refine_probe(
    target: &Chain,
    current: &Chain,
    candidates: &[Poly],
) -> Result<RefineReport, Error> {
    if target.base != current.base {
        return Err(Error::Input(
            "refinement probe requires both chains over the same base valuation".into(),
        ));
    }
    for c in [target, current] {
        let report = c.validate();
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        if c.is_pseudo() {
            return Err(Error::Domain(
                "refinement probe requires valuations, not pseudo-valuations".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(candidates.len());
    for cand in candidates {
        if !cand.is_monic() {
            return Err(Error::Input(format!("candidate `{cand}` is not monic")));
        }
        let cv = current.eval_unchecked(cand);
        let tv = target.eval_unchecked(cand);
        rows.push(RefineRow {
            candidate: cand.clone(),
            member: cv < tv,
            current_value: cv,
            target_value: tv,
        });
    }
    let minimal_degree = rows
        .iter()
        .filter(|r| r.member)
        .filter_map(|r| r.candidate.degree())
        .min();
    let minimal_members = match minimal_degree {
        None => vec![],
        Some(d) => rows
            .iter()
            .filter(|r| r.member && r.candidate.degree() == Some(d))
            .map(|r| r.candidate.clone())
            .collect(),
    };
    Ok(RefineReport {
        rows,
        minimal_degree,
        minimal_members,
    })
}
