//! Admissible families: ordered unions of segments, each a finite run of
//! discrete augmentation steps followed by an optional continuous part.
//!
//! The first step of every segment after the first is read as a limit
//! augmentation of the previous segment's continuous part. Evaluation at an
//! index materializes the family up to that index as a tower of plain and
//! limit levels and runs the digit recursion through it; limit levels take
//! digit values by stabilization along their family's members.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chain::{AugStep, Chain};
use crate::field::BaseValuation;
use crate::limits::{stabilize_walk, ContinuousFamily, FamilyShape, MemberSource, DEFAULT_WINDOW};
use crate::poly::{phi_expand, Poly};
use crate::value::Value;
use crate::Error;

/// One simple subfamily: discrete steps, then an optional continuous part
/// whose members augment the last discrete valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub steps: Vec<AugStep>,
    pub continuous: Option<FamilyShape>,
}

/// A finitely presented admissible family over a base valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleFamily {
    pub base: BaseValuation,
    pub segments: Vec<Segment>,
}

/// Position within a segment: a discrete step (1-based) or a continuous
/// member index (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Discrete(usize),
    Continuous(usize),
}

/// An index into the family's totally ordered index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyIndex {
    /// 1-based segment number.
    pub segment: usize,
    pub position: Position,
}

impl std::fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.position {
            Position::Discrete(l) => write!(f, "({}, step {})", self.segment, l),
            Position::Continuous(t) => write!(f, "({}, member {})", self.segment, t),
        }
    }
}

/// One level of a materialized valuation tower.
enum Level {
    Step(AugStep),
    /// A limit augmentation: digit values stabilize along `members`, each
    /// member augmenting the tower below this level.
    Limit {
        members: Vec<AugStep>,
        step: AugStep,
    },
}

/// Digit recursion through a tower of plain and limit levels.
fn eval_levels(
    base: &BaseValuation,
    levels: &[Level],
    extra: Option<&AugStep>,
    f: &Poly,
    window: usize,
) -> Result<Value, Error> {
    if f.is_zero() {
        return Ok(Value::Infinity);
    }
    let (top_phi, top_gamma, below): (&Poly, &Value, &[Level]) = match extra {
        Some(s) => (&s.phi, &s.gamma, levels),
        None => match levels.split_last() {
            None => return Ok(base.value(&f.coeff(0))),
            Some((Level::Step(s), rest)) => (&s.phi, &s.gamma, rest),
            Some((Level::Limit { members, step }, rest)) => {
                let expansion = phi_expand(f, &step.phi)?;
                let mut terms = Vec::with_capacity(expansion.digits.len());
                for (j, digit) in expansion.digits.iter().enumerate() {
                    if digit.is_zero() {
                        continue;
                    }
                    let horizon = members.len().saturating_sub(1);
                    let s = stabilize_walk(horizon, window, |t| {
                        eval_levels(base, rest, Some(&members[t]), digit, window)
                    })?;
                    if !s.stabilized {
                        return Err(Error::Horizon {
                            horizon,
                            window,
                            context: format!("digit `{digit}` below a limit step did not stabilize"),
                        });
                    }
                    terms.push(if j == 0 {
                        s.value
                    } else {
                        &s.value + &step.gamma.scaled(j)
                    });
                }
                return Ok(Value::inf(terms));
            }
        },
    };
    let expansion = phi_expand(f, top_phi)?;
    let mut terms = Vec::with_capacity(expansion.digits.len());
    for (j, digit) in expansion.digits.iter().enumerate() {
        let v = eval_levels(base, below, None, digit, window)?;
        terms.push(if j == 0 { v } else { &v + &top_gamma.scaled(j) });
    }
    Ok(Value::inf(terms))
}

/// Result of walking the family's whole index set on one polynomial.
#[derive(Clone, Debug)]
pub struct SupReport {
    /// The value at the last walked index (the supremum when it is attained).
    pub value: Value,
    pub stabilized: bool,
    /// First index of the final constant run.
    pub stable_from: Option<FamilyIndex>,
}

impl AdmissibleFamily {
    pub fn new(base: BaseValuation, segments: Vec<Segment>) -> Result<Self, Error> {
        let fam = AdmissibleFamily { base, segments };
        fam.validate()?;
        Ok(fam)
    }

    /// Structural validation of segments, their continuous parts, and the
    /// limit steps joining them; evaluation-level constraints are checked
    /// with the default stabilization window.
    pub fn validate(&self) -> Result<(), Error> {
        if self.segments.is_empty() {
            return Err(Error::InvalidFamily("family has no segments".into()));
        }
        for (s, segment) in self.segments.iter().enumerate() {
            if segment.steps.is_empty() {
                return Err(Error::InvalidFamily(format!(
                    "segment {} has no discrete steps",
                    s + 1
                )));
            }
            if segment.continuous.is_none() && s + 1 != self.segments.len() {
                return Err(Error::InvalidFamily(format!(
                    "segment {} must carry a continuous part (only the last may omit it)",
                    s + 1
                )));
            }
        }
        // segment 1 with its continuous part must stand alone as a chain +
        // family; later segments are checked against the materialized tower
        let first = &self.segments[0];
        let chain = Chain {
            base: self.base.clone(),
            steps: first.steps.clone(),
        };
        let report = chain.validate();
        if !report.is_ok() {
            return Err(Error::InvalidChain(report));
        }
        if let Some(shape) = &first.continuous {
            ContinuousFamily::new(chain, shape.clone()).map_err(|e| {
                Error::InvalidFamily(format!("segment 1 continuous part: {e}"))
            })?;
        }
        for s in 1..self.segments.len() {
            let prev = &self.segments[s - 1];
            let shape = prev.continuous.as_ref().expect("checked above");
            let first_step = &self.segments[s].steps[0];
            if !first_step.phi.is_monic() || first_step.phi.degree() < Some(shape.degree) {
                return Err(Error::InvalidFamily(format!(
                    "segment {} limit key must be monic of degree >= {}",
                    s + 1,
                    shape.degree
                )));
            }
            for t in 0..=shape.horizon {
                let member = shape.member(t).ok_or_else(|| {
                    Error::InvalidFamily(format!("segment {s} member {t} missing below horizon"))
                })?;
                if first_step.gamma <= member.gamma {
                    return Err(Error::InvalidFamily(format!(
                        "segment {} limit value {} does not exceed member value {}",
                        s + 1,
                        first_step.gamma,
                        member.gamma
                    )));
                }
            }
            // steps above the limit step must be monic, of non-decreasing
            // degree, and climb strictly in value
            for i in 1..self.segments[s].steps.len() {
                let step = &self.segments[s].steps[i];
                let prev_step = &self.segments[s].steps[i - 1];
                if !step.phi.is_monic() || step.phi.degree() < prev_step.phi.degree() {
                    return Err(Error::InvalidFamily(format!(
                        "segment {} step {} must be monic with non-decreasing degree",
                        s + 1,
                        i + 1
                    )));
                }
                let below = self.levels_through(s, i)?;
                let bound = eval_levels(&self.base, &below, None, &step.phi, DEFAULT_WINDOW)?;
                if step.gamma <= bound {
                    return Err(Error::InvalidFamily(format!(
                        "segment {} step {} value {} not strictly above {bound}",
                        s + 1,
                        i + 1,
                        step.gamma
                    )));
                }
            }
            // a continuous part on a later segment augments its last step
            if let Some(shape) = &self.segments[s].continuous {
                let below = self.levels_through(s, self.segments[s].steps.len())?;
                let mut prev_member: Option<AugStep> = None;
                for t in 0..=shape.horizon {
                    let member = shape.member(t).ok_or_else(|| {
                        Error::InvalidFamily(format!("member {t} missing below horizon"))
                    })?;
                    if !member.phi.is_monic() || member.phi.degree() != Some(shape.degree) {
                        return Err(Error::InvalidFamily(format!(
                            "segment {} member {t} key must be monic of degree {}",
                            s + 1,
                            shape.degree
                        )));
                    }
                    let duplicates_head = self.segments[s].steps.last() == Some(&member);
                    if !duplicates_head {
                        let bound =
                            eval_levels(&self.base, &below, None, &member.phi, DEFAULT_WINDOW)?;
                        if member.gamma <= bound {
                            return Err(Error::InvalidFamily(format!(
                                "segment {} member {t} value {} not strictly above {bound}",
                                s + 1,
                                member.gamma
                            )));
                        }
                    }
                    if let Some(p) = &prev_member {
                        if member.gamma <= p.gamma {
                            return Err(Error::InvalidFamily(format!(
                                "segment {} member values must increase strictly at index {t}",
                                s + 1
                            )));
                        }
                        let got =
                            eval_levels(&self.base, &below, Some(p), &member.phi, DEFAULT_WINDOW)?;
                        if got != p.gamma {
                            return Err(Error::InvalidFamily(format!(
                                "segment {} member {} evaluates the next key to {got}, expected {}",
                                s + 1,
                                t - 1,
                                p.gamma
                            )));
                        }
                    }
                    prev_member = Some(member);
                }
            }
        }
        Ok(())
    }

    /// Levels for the tower containing the first `steps` steps of segment
    /// `seg` (0-based) and everything before it.
    fn levels_through(&self, seg: usize, steps: usize) -> Result<Vec<Level>, Error> {
        let mut levels = Vec::new();
        for s in 0..=seg {
            let segment = &self.segments[s];
            let take = if s == seg { steps } else { segment.steps.len() };
            for (i, step) in segment.steps.iter().take(take).enumerate() {
                if s > 0 && i == 0 {
                    let shape = self.segments[s - 1]
                        .continuous
                        .as_ref()
                        .ok_or_else(|| Error::InvalidFamily("missing continuous part".into()))?;
                    let members = (0..=shape.horizon)
                        .map(|t| {
                            shape.member(t).ok_or_else(|| {
                                Error::InvalidFamily(format!("member {t} missing below horizon"))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    levels.push(Level::Limit {
                        members,
                        step: step.clone(),
                    });
                } else {
                    levels.push(Level::Step(step.clone()));
                }
            }
        }
        Ok(levels)
    }

    /// The value of `f` at one index of the family.
    pub fn eval_at(&self, index: FamilyIndex, f: &Poly) -> Result<Value, Error> {
        if index.segment == 0 || index.segment > self.segments.len() {
            return Err(Error::Input(format!(
                "segment {} outside the presented family",
                index.segment
            )));
        }
        let seg = index.segment - 1;
        let segment = &self.segments[seg];
        match index.position {
            Position::Discrete(l) => {
                if l == 0 || l > segment.steps.len() {
                    return Err(Error::Input(format!(
                        "step {l} outside segment {}",
                        index.segment
                    )));
                }
                let levels = self.levels_through(seg, l)?;
                eval_levels(&self.base, &levels, None, f, DEFAULT_WINDOW)
            }
            Position::Continuous(t) => {
                let shape = segment.continuous.as_ref().ok_or_else(|| {
                    Error::Input(format!("segment {} has no continuous part", index.segment))
                })?;
                let member = shape.member(t).ok_or_else(|| {
                    Error::Input(format!("member {t} beyond horizon {}", shape.horizon))
                })?;
                let levels = self.levels_through(seg, segment.steps.len())?;
                eval_levels(&self.base, &levels, Some(&member), f, DEFAULT_WINDOW)
            }
        }
    }

    /// Every index of the family in order, capping each continuous part at
    /// `horizon`.
    pub fn indices(&self, horizon: usize) -> Vec<FamilyIndex> {
        let mut out = Vec::new();
        for (s, segment) in self.segments.iter().enumerate() {
            for l in 1..=segment.steps.len() {
                out.push(FamilyIndex {
                    segment: s + 1,
                    position: Position::Discrete(l),
                });
            }
            if let Some(shape) = &segment.continuous {
                for t in 0..=shape.horizon.min(horizon) {
                    out.push(FamilyIndex {
                        segment: s + 1,
                        position: Position::Continuous(t),
                    });
                }
            }
        }
        out
    }

    /// True when the index set has a greatest element (the last segment has
    /// no continuous part); the supremum is then attained there.
    pub fn is_complete(&self) -> bool {
        self.segments.last().map_or(false, |s| s.continuous.is_none())
    }

    /// Walks the whole index set on `f`: returns the last value, whether the
    /// value sequence stabilized (a `window`-long constant tail, or a
    /// complete family), and where the final constant run begins. A value
    /// decrease along the walk falsifies admissibility and is a hard error.
    pub fn sup(&self, f: &Poly, horizon: usize, window: usize) -> Result<SupReport, Error> {
        if window == 0 || horizon + 1 < window {
            return Err(Error::Input(
                "require horizon >= window >= 1 for the family walk".into(),
            ));
        }
        let indices = self.indices(horizon);
        let mut last: Option<(Value, FamilyIndex)> = None;
        let mut run_start = indices[0];
        let mut run_len = 0usize;
        for idx in &indices {
            let v = self.eval_at(*idx, f)?;
            match &last {
                Some((prev, _)) if *prev == v => run_len += 1,
                Some((prev, at)) if v < *prev => {
                    return Err(Error::InvalidFamily(format!(
                        "value of `{f}` decreased from {prev} at {at} to {v} at {idx}"
                    )));
                }
                _ => {
                    run_start = *idx;
                    run_len = 1;
                }
            }
            last = Some((v, *idx));
        }
        let (value, _) = last.expect("families have at least one index");
        let stabilized = run_len >= window || self.is_complete();
        Ok(SupReport {
            value,
            stabilized,
            stable_from: if stabilized { Some(run_start) } else { None },
        })
    }
}

// JSON form:
// {"field": {"valuation": ...},
//  "segments": [{"discrete": [{"phi": ..., "gamma": ...}],
//                "continuous": {"degree": 1, "rule": ..., "horizon": 64} | null}]}
#[derive(Serialize, Deserialize)]
struct ShapeDoc {
    degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<RuleDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<StepDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    #[serde(rename = "type")]
    kind: String,
    p: String,
}

#[derive(Serialize, Deserialize)]
struct StepDoc {
    phi: Poly,
    gamma: Value,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    discrete: Vec<StepDoc>,
    continuous: Option<ShapeDoc>,
}

#[derive(Serialize, Deserialize)]
struct AdmissibleDoc {
    field: crate::chain::FieldDoc,
    segments: Vec<SegmentDoc>,
}

fn shape_to_doc(shape: &FamilyShape) -> ShapeDoc {
    match &shape.source {
        MemberSource::GeometricApprox { p } => ShapeDoc {
            degree: shape.degree,
            rule: Some(RuleDoc {
                kind: "geometric-approx".into(),
                p: p.to_string(),
            }),
            members: None,
            horizon: Some(shape.horizon),
        },
        MemberSource::Explicit(members) => ShapeDoc {
            degree: shape.degree,
            rule: None,
            members: Some(
                members
                    .iter()
                    .map(|m| StepDoc {
                        phi: m.phi.clone(),
                        gamma: m.gamma.clone(),
                    })
                    .collect(),
            ),
            horizon: Some(shape.horizon),
        },
    }
}

fn shape_from_doc(doc: ShapeDoc) -> Result<FamilyShape, String> {
    let source = match (doc.rule, doc.members) {
        (Some(rule), None) => {
            if rule.kind != "geometric-approx" {
                return Err(format!("unknown family rule `{}`", rule.kind));
            }
            let p: u64 = rule
                .p
                .parse()
                .map_err(|_| format!("rule field `p`: `{}` is not an integer", rule.p))?;
            MemberSource::GeometricApprox { p }
        }
        (None, Some(members)) => MemberSource::Explicit(
            members
                .into_iter()
                .map(|m| AugStep::new(m.phi, m.gamma))
                .collect(),
        ),
        (Some(_), Some(_)) => return Err("declare `rule` or `members`, not both".into()),
        (None, None) => return Err("declare `rule` or `members`".into()),
    };
    let horizon = match (&source, doc.horizon) {
        (MemberSource::Explicit(list), h) => {
            let max = list.len().saturating_sub(1);
            h.map_or(max, |h| h.min(max))
        }
        (MemberSource::GeometricApprox { .. }, h) => h.unwrap_or(crate::limits::DEFAULT_HORIZON),
    };
    Ok(FamilyShape {
        degree: doc.degree,
        source,
        horizon,
    })
}

impl Serialize for AdmissibleFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AdmissibleDoc {
            field: crate::chain::FieldDoc {
                valuation: self.base.clone(),
            },
            segments: self
                .segments
                .iter()
                .map(|seg| SegmentDoc {
                    discrete: seg
                        .steps
                        .iter()
                        .map(|s| StepDoc {
                            phi: s.phi.clone(),
                            gamma: s.gamma.clone(),
                        })
                        .collect(),
                    continuous: seg.continuous.as_ref().map(shape_to_doc),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AdmissibleFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = AdmissibleDoc::deserialize(deserializer)?;
        let mut segments = Vec::with_capacity(doc.segments.len());
        for seg in doc.segments {
            let continuous = match seg.continuous {
                None => None,
                Some(shape) => Some(shape_from_doc(shape).map_err(D::Error::custom)?),
            };
            segments.push(Segment {
                steps: seg
                    .discrete
                    .into_iter()
                    .map(|s| AugStep::new(s.phi, s.gamma))
                    .collect(),
                continuous,
            });
        }
        AdmissibleFamily::new(doc.field.valuation, segments)
            .map_err(|e| D::Error::custom(format!("{e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn eval_at_examples() {
        // a single discrete step behaves as the chain it is
        let single = AdmissibleFamily::new(
            crate::field::BaseValuation::p_adic(2).unwrap(),
            vec![Segment {
                steps: vec![AugStep::new(Poly::x(), Value::rat(1, 2))],
                continuous: None,
            }],
        )
        .unwrap();
        let first = FamilyIndex {
            segment: 1,
            position: Position::Discrete(1),
        };
        assert_eq!(single.eval_at(first, &Poly::x()).unwrap(), Value::rat(1, 2));

        let fam = catalog::family_admissible();
        let idx = FamilyIndex {
            segment: 1,
            position: Position::Discrete(1),
        };
        assert_eq!(fam.eval_at(idx, &Poly::x()).unwrap(), Value::from_int(1));

        let idx = FamilyIndex {
            segment: 1,
            position: Position::Continuous(3),
        };
        assert_eq!(fam.eval_at(idx, &Poly::x()).unwrap(), Value::from_int(1));
        // member 3 assigns value 4 to its own key x - 14
        assert_eq!(
            fam.eval_at(idx, &Poly::from_ints(&[-14, 1])).unwrap(),
            Value::from_int(4)
        );
        assert_eq!(fam.eval_at(idx, &Poly::zero()).unwrap(), Value::Infinity);

        let beyond = FamilyIndex {
            segment: 7,
            position: Position::Discrete(1),
        };
        assert!(fam.eval_at(beyond, &Poly::x()).is_err());
    }

    #[test]
    fn sup_examples() {
        // a complete family: the two-step chain as a single discrete segment
        let complete = catalog::family_complete();
        let report = complete
            .sup(&Poly::from_ints(&[0, 0, 0, 1]), 20, 3)
            .unwrap();
        assert_eq!(report.value, Value::rat(3, 2));
        assert!(report.stabilized);

        let fam = catalog::family_admissible();
        let report = fam.sup(&Poly::from_ints(&[2, 1]), 20, 3).unwrap();
        assert_eq!(report.value, Value::from_int(21));
        assert!(!report.stabilized);

        let report = fam.sup(&Poly::from_ints(&[5]), 20, 3).unwrap();
        assert_eq!(report.value, Value::zero());
        assert!(report.stabilized);
        assert_eq!(
            report.stable_from,
            Some(FamilyIndex {
                segment: 1,
                position: Position::Discrete(1)
            })
        );
    }

    #[test]
    fn two_segment_family_reaches_the_socle() {
        let fam = catalog::family_two_segment();
        assert!(fam.validate().is_ok());
        assert!(fam.is_complete());

        // at the limit index, x + 2 has value inf
        let limit_idx = FamilyIndex {
            segment: 2,
            position: Position::Discrete(1),
        };
        assert_eq!(
            fam.eval_at(limit_idx, &Poly::from_ints(&[2, 1])).unwrap(),
            Value::Infinity
        );
        // and x^2 + 4 gets its stabilized digit value
        assert_eq!(
            fam.eval_at(limit_idx, &Poly::from_ints(&[4, 0, 1])).unwrap(),
            Value::from_int(3)
        );

        let report = fam.sup(&Poly::from_ints(&[2, 1]), 10, 3).unwrap();
        assert_eq!(report.value, Value::Infinity);
        assert!(report.stabilized);

        let report = fam.sup(&Poly::from_ints(&[4, 0, 1]), 10, 3).unwrap();
        assert_eq!(report.value, Value::from_int(3));
        assert!(report.stabilized);
    }

    #[test]
    fn family_json_round_trip() {
        for fam in [
            catalog::family_admissible(),
            catalog::family_complete(),
            catalog::family_two_segment(),
        ] {
            let s = serde_json::to_string(&fam).unwrap();
            let back: AdmissibleFamily = serde_json::from_str(&s).unwrap();
            assert_eq!(back, fam);
        }
    }
}
