//! Generator changes of the rational function field and transport of
//! valuation chains across them.
//!
//! Automorphisms over the base field are Möbius maps `x -> (ax+b)/(cx+d)`,
//! i.e. invertible 2x2 matrices up to scalars, generated by affine maps and
//! the inversion `x -> 1/x`. Transport rewrites a chain's keys in the new
//! generator atom by atom and recomputes every assigned value semantically,
//! by evaluating the transported key (pulled back to the old generator)
//! under the source chain. The equality harness then verifies, exactly,
//! that both chains define the same valuation on the function field.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chain::{AugStep, Chain};
use crate::field::Rat;
use crate::limits::{ContinuousFamily, FamilyShape, LimitAugmentation, MemberSource};
use crate::poly::{rat_string, Poly, RatFn};
use crate::sample;
use crate::value::Value;
use crate::Error;

/// An invertible fractional-linear map `x -> (ax+b)/(cx+d)`, considered up
/// to a common scalar on the coefficients.
#[derive(Clone, Debug)]
pub struct MobiusMap {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

impl MobiusMap {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Result<Self, Error> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::Input("singular matrix does not define a map".into()));
        }
        Ok(MobiusMap { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self, Error> {
        let r = |n: i64| Rat::from_integer(n.into());
        MobiusMap::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        MobiusMap::from_ints(1, 0, 0, 1).unwrap()
    }

    /// The inversion `x -> 1/x`.
    pub fn inversion() -> Self {
        MobiusMap::from_ints(0, 1, 1, 0).unwrap()
    }

    /// The affine map `x -> ax + b`, `a != 0`.
    pub fn affine(a: Rat, b: Rat) -> Result<Self, Error> {
        MobiusMap::new(a, b, Rat::zero(), Rat::one())
    }

    pub fn entries(&self) -> (&Rat, &Rat, &Rat, &Rat) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// The inverse map (adjugate matrix; scalars do not matter).
    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Matrix product: `self` after `other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    /// The image of the variable as a rational function.
    pub fn as_ratfn(&self) -> RatFn {
        RatFn::new(
            Poly::new(vec![self.b.clone(), self.a.clone()]),
            Poly::new(vec![self.d.clone(), self.c.clone()]),
        )
        .expect("invertible maps have nonzero denominator row")
    }

    /// Word in the generators, outermost first: the map equals the
    /// composition of the atoms applied right to left.
    pub fn decompose(&self) -> GeneratorWord {
        let mut atoms = Vec::new();
        if self.c.is_zero() {
            push_affine(&mut atoms, &self.a / &self.d, &self.b / &self.d);
        } else {
            // (ax+b)/(cx+d) = ((bc-ad)/c) * 1/(cx+d) + a/c
            let det = &self.a * &self.d - &self.b * &self.c;
            push_affine(&mut atoms, -det / &self.c, &self.a / &self.c);
            atoms.push(Atom::Inv);
            push_affine(&mut atoms, self.c.clone(), self.d.clone());
        }
        let word = GeneratorWord { atoms };
        debug_assert!(word.compose().projectively_equal(self));
        word
    }

    pub fn projectively_equal(&self, other: &MobiusMap) -> bool {
        let s = [&self.a, &self.b, &self.c, &self.d];
        let o = [&other.a, &other.b, &other.c, &other.d];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if s[i] * o[j] != s[j] * o[i] {
                    return false;
                }
            }
        }
        true
    }
}

impl PartialEq for MobiusMap {
    fn eq(&self, other: &Self) -> bool {
        self.projectively_equal(other)
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x -> ({}) / ({})",
            Poly::new(vec![self.b.clone(), self.a.clone()]).fmt_with_var("x"),
            Poly::new(vec![self.d.clone(), self.c.clone()]).fmt_with_var("x")
        )
    }
}

fn push_affine(atoms: &mut Vec<Atom>, a: Rat, b: Rat) {
    if a.is_one() && b.is_zero() {
        return; // identity atom carries nothing
    }
    atoms.push(Atom::Affine { a, b });
}

/// A generator of the automorphism group: the inversion or an affine map.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Inv,
    Affine { a: Rat, b: Rat },
}

/// A composition word over the generators, outermost first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GeneratorWord {
    pub atoms: Vec<Atom>,
}

impl GeneratorWord {
    pub fn contains_inv(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, Atom::Inv))
    }

    /// Multiplies the atoms back into a single map.
    pub fn compose(&self) -> MobiusMap {
        let mut m = MobiusMap::identity();
        for atom in &self.atoms {
            let next = match atom {
                Atom::Inv => MobiusMap::inversion(),
                Atom::Affine { a, b } => MobiusMap {
                    a: a.clone(),
                    b: b.clone(),
                    c: Rat::zero(),
                    d: Rat::one(),
                },
            };
            m = m.compose(&next);
        }
        m
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Inv => "inv".to_string(),
                Atom::Affine { a, b } => format!("affine({}, {})", rat_string(a), rat_string(b)),
            })
            .collect();
        write!(f, "{}", parts.join(" . "))
    }
}

/// Key transform for the generator change `y = 1/x`: the monic reversed
/// polynomial. `x` maps to `y`; any other key needs a nonzero constant term.
pub fn inv_transform(phi: &Poly) -> Result<Poly, Error> {
    if !phi.is_monic() || phi.degree() < Some(1) {
        return Err(Error::Input(format!("key `{phi}` must be monic of degree >= 1")));
    }
    if phi == &Poly::x() {
        return Ok(Poly::x());
    }
    let a0 = phi.coeff(0);
    if a0.is_zero() {
        return Err(Error::Input(format!(
            "key `{phi}` has zero constant term and is not the variable; \
             it is reducible and has no inverse transform"
        )));
    }
    let d = phi.degree().unwrap();
    let coeffs: Vec<Rat> = (0..=d).map(|i| phi.coeff(d - i) / &a0).collect();
    Ok(Poly::new(coeffs))
}

/// Key transform for the generator change `y = ax + b`:
/// `psi(y) = a^d * phi((y - b)/a)`, monic of the same degree.
pub fn affine_transform(phi: &Poly, a: &Rat, b: &Rat) -> Result<Poly, Error> {
    if a.is_zero() {
        return Err(Error::Input("affine map requires a != 0".into()));
    }
    if !phi.is_monic() || phi.degree() < Some(1) {
        return Err(Error::Input(format!("key `{phi}` must be monic of degree >= 1")));
    }
    let d = phi.degree().unwrap();
    let inner = Poly::new(vec![-(b / a), Rat::one() / a]); // (y - b)/a
    let psi = phi.compose(&inner).scale(&num_traits::pow::pow(a.clone(), d));
    debug_assert!(psi.is_monic() && psi.degree() == Some(d));
    Ok(psi)
}

/// Transports one key through a word, innermost atom first.
pub fn transport_key(phi: &Poly, word: &GeneratorWord) -> Result<Poly, Error> {
    let mut key = phi.clone();
    for atom in word.atoms.iter().rev() {
        key = match atom {
            Atom::Inv => inv_transform(&key)?,
            Atom::Affine { a, b } => affine_transform(&key, a, b)?,
        };
    }
    Ok(key)
}

/// Verdict of an exact equality check between a chain and its transport.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass {
        cases: usize,
    },
    Fail {
        case: usize,
        source_expr: RatFn,
        transported_expr: RatFn,
        source_value: Value,
        transported_value: Value,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass { cases } => write!(f, "pass ({cases} cases, exact equality)"),
            Verdict::Fail {
                case,
                source_expr,
                transported_expr,
                source_value,
                transported_value,
            } => write!(
                f,
                "fail at case {case}: {source_expr} has value {source_value}, \
                 transported {transported_expr} has value {transported_value}"
            ),
        }
    }
}

/// Per-step value table of a transport.
#[derive(Clone, Debug)]
pub struct TransportRow {
    pub source_phi: Poly,
    pub source_gamma: Value,
    pub transported_phi: Poly,
    pub transported_gamma: Value,
}

/// A transported chain together with the value table and a smoke verdict
/// over the structured cases (keys, pulled-back keys, and the variable).
#[derive(Clone, Debug)]
pub struct TransportReport {
    pub map: MobiusMap,
    pub word: GeneratorWord,
    pub source: Chain,
    pub transported: Chain,
    /// Degree-one step prepended at an inversion stage when the chain there
    /// did not start with the bare variable.
    pub prepended: Option<AugStep>,
    /// 1-based source steps merged away by the degree-one head
    /// normalization (a run of degree-one steps presents the same valuation
    /// as its last step alone).
    pub dropped_steps: Vec<usize>,
    pub rows: Vec<TransportRow>,
    pub verdict: Verdict,
}

/// One stage of the transport pipeline: a chain plus, for each of its
/// steps, the index of the source step it descends from (`None` for a
/// prepended head).
struct Stage {
    chain: Chain,
    origin: Vec<Option<usize>>,
}

impl Stage {
    /// Value of an element of the function field under this stage's chain.
    fn value(&self, fr: &RatFn) -> Result<Value, Error> {
        self.chain.eval_ratfn(fr)
    }
}

/// Transport across one affine stage `u = a x + b`: the polynomial ring is
/// unchanged, keys move by substitution, values are recomputed.
fn affine_stage(stage: Stage, a: &Rat, b: &Rat) -> Result<Stage, Error> {
    let m = MobiusMap::affine(a.clone(), b.clone())?;
    let fr = m.as_ratfn();
    let mut steps = Vec::with_capacity(stage.chain.steps.len());
    for step in &stage.chain.steps {
        let psi = affine_transform(&step.phi, a, b)?;
        let delta = stage.value(&psi.eval_ratfn(&fr))?;
        steps.push(AugStep::new(psi, delta));
    }
    let chain = Chain {
        base: stage.chain.base.clone(),
        steps,
    };
    let report = chain.validate();
    if !report.is_ok() {
        return Err(Error::TheoremViolation(report));
    }
    Ok(Stage {
        chain,
        origin: stage.origin,
    })
}

/// Transport across one inversion stage `v = 1/u`.
///
/// The head of the chain is normalized first: a leading run of degree-one
/// steps collapses to its last step, and a shifted head `u + c` whose value
/// equals the value of the bare variable is replaced by `u` (both rewrites
/// present the same valuation). After that either the head is `u`, whose
/// transform is `v`, or it is strictly better than `u` and a step
/// `(v, value(v))` is prepended, mirroring the insertion of the monomial
/// valuation below the shifted head.
fn inversion_stage(stage: Stage, dropped: &mut Vec<usize>) -> Result<Stage, Error> {
    let Stage { mut chain, mut origin } = stage;
    // collapse the leading degree-one run to its last step
    let run = chain
        .steps
        .iter()
        .take_while(|s| s.phi.degree() == Some(1))
        .count()
        .max(1);
    for i in 0..run - 1 {
        if let Some(src) = origin[i] {
            dropped.push(src + 1);
        }
    }
    chain.steps.drain(0..run - 1);
    origin.drain(0..run - 1);
    // a shifted head no better than the bare variable is the bare variable
    let head_value = chain.steps[0].gamma.clone();
    if chain.steps[0].phi != Poly::x()
        && chain.eval_ratfn(&RatFn::var())? == head_value
    {
        chain.steps[0].phi = Poly::x();
        debug_assert!(chain.validate().is_ok());
    }

    let inv_fr = MobiusMap::inversion().as_ratfn();
    let mut steps = Vec::with_capacity(chain.steps.len() + 1);
    let mut new_origin = Vec::with_capacity(origin.len() + 1);
    if chain.steps[0].phi != Poly::x() {
        let delta0 = chain.eval_ratfn(&inv_fr)?;
        steps.push(AugStep::new(Poly::x(), delta0));
        new_origin.push(None);
    }
    for (step, src) in chain.steps.iter().zip(&origin) {
        let psi = inv_transform(&step.phi)?;
        let delta = chain.eval_ratfn(&psi.eval_ratfn(&inv_fr))?;
        steps.push(AugStep::new(psi, delta));
        new_origin.push(*src);
    }
    let transported = Chain {
        base: chain.base.clone(),
        steps,
    };
    let report = transported.validate();
    if !report.is_ok() {
        return Err(Error::TheoremViolation(report));
    }
    Ok(Stage {
        chain: transported,
        origin: new_origin,
    })
}

/// Rewrites a valuation chain in the generator `y = m(x)`.
///
/// The map's generator word is applied stage by stage, innermost atom
/// first; every stage recomputes its values semantically, by evaluating the
/// transported keys (expressed in the stage's own generator) under the
/// stage's chain. The result is validated and smoke-checked against the
/// source on the structured case pool.
pub fn transport_chain(chain: &Chain, map: &MobiusMap) -> Result<TransportReport, Error> {
    let report = chain.validate();
    if !report.is_ok() {
        return Err(Error::InvalidChain(report));
    }
    if chain.is_pseudo() {
        return Err(Error::Domain(
            "pseudo-valuation chains do not extend to the function field; transport is undefined"
                .into(),
        ));
    }
    let word = map.decompose();
    let mut stage = Stage {
        chain: chain.clone(),
        origin: (0..chain.steps.len()).map(Some).collect(),
    };
    let mut dropped_steps = Vec::new();
    for atom in word.atoms.iter().rev() {
        stage = match atom {
            Atom::Affine { a, b } => affine_stage(stage, a, b)?,
            Atom::Inv => inversion_stage(stage, &mut dropped_steps)?,
        };
    }

    let mut rows = Vec::new();
    let mut prepended = None;
    for (step, src) in stage.chain.steps.iter().zip(&stage.origin) {
        match src {
            Some(i) => rows.push(TransportRow {
                source_phi: chain.steps[*i].phi.clone(),
                source_gamma: chain.steps[*i].gamma.clone(),
                transported_phi: step.phi.clone(),
                transported_gamma: step.gamma.clone(),
            }),
            None => prepended = Some(step.clone()),
        }
    }

    let mut out = TransportReport {
        map: map.clone(),
        word,
        source: chain.clone(),
        transported: stage.chain,
        prepended,
        dropped_steps,
        rows,
        verdict: Verdict::Pass { cases: 0 },
    };
    out.verdict = check_cases(chain, &out, structured_cases(chain, &out)?)?;
    Ok(out)
}

/// The deterministic case pool: the variable, its image, every source key,
/// every transported key pulled back, pairwise products of source keys, and
/// a couple of constants.
fn structured_cases(chain: &Chain, report: &TransportReport) -> Result<Vec<RatFn>, Error> {
    let m_fr = report.map.as_ratfn();
    let mut cases = vec![
        RatFn::var(),
        m_fr.clone(),
        RatFn::new(Poly::one(), Poly::x())?,
        RatFn::from_poly(Poly::from_ints(&[2])),
        RatFn::from_poly(Poly::one()),
    ];
    for step in &chain.steps {
        cases.push(RatFn::from_poly(step.phi.clone()));
    }
    for row in &report.rows {
        cases.push(row.transported_phi.eval_ratfn(&m_fr));
    }
    for pair in chain.steps.windows(2) {
        cases.push(RatFn::from_poly(&pair[0].phi * &pair[1].phi));
    }
    if let Some(first) = chain.steps.first() {
        cases.push(RatFn::new(Poly::one(), first.phi.clone())?);
    }
    Ok(cases)
}

fn check_cases(
    chain: &Chain,
    report: &TransportReport,
    cases: Vec<RatFn>,
) -> Result<Verdict, Error> {
    let minv = report.map.inverse().as_ratfn();
    for (i, fr_x) in cases.iter().enumerate() {
        let fr_y = fr_x.compose(&minv)?;
        let lhs = chain.eval_ratfn(fr_x)?;
        let rhs = report.transported.eval_ratfn(&fr_y)?;
        if lhs != rhs {
            return Ok(Verdict::Fail {
                case: i,
                source_expr: fr_x.clone(),
                transported_expr: fr_y,
                source_value: lhs,
                transported_value: rhs,
            });
        }
    }
    Ok(Verdict::Pass { cases: cases.len() })
}

/// Exact equality check of a chain and its transport on the structured case
/// pool plus `samples` seeded random rational functions. Each sample `i`
/// draws from its own generator, so the verdict is identical with and
/// without `parallel`.
pub fn transport_equal_check(
    chain: &Chain,
    report: &TransportReport,
    samples: usize,
    seed: u64,
    parallel: bool,
) -> Result<Verdict, Error> {
    let structured = structured_cases(chain, report)?;
    let offset = structured.len();
    let minv = report.map.inverse().as_ratfn();
    let base = &chain.base;

    let check_one = |i: usize| -> Result<Option<Verdict>, Error> {
        let fr_x = if i < offset {
            structured[i].clone()
        } else {
            let mut rng = sample::sample_rng(seed, (i - offset) as u64);
            sample::random_ratfn(&mut rng, base, 3)
        };
        let fr_y = fr_x.compose(&minv)?;
        let lhs = chain.eval_ratfn(&fr_x)?;
        let rhs = report.transported.eval_ratfn(&fr_y)?;
        if lhs != rhs {
            Ok(Some(Verdict::Fail {
                case: i,
                source_expr: fr_x,
                transported_expr: fr_y,
                source_value: lhs,
                transported_value: rhs,
            }))
        } else {
            Ok(None)
        }
    };

    let total = offset + samples;
    let failure: Option<(usize, Verdict)> = if parallel {
        let hits: Vec<(usize, Verdict)> = (0..total)
            .into_par_iter()
            .map(|i| check_one(i).map(|v| v.map(|verdict| (i, verdict))))
            .collect::<Result<Vec<_>, Error>>()?
            .into_iter()
            .flatten()
            .collect();
        hits.into_iter().min_by_key(|(i, _)| *i)
    } else {
        let mut found = None;
        for i in 0..total {
            if let Some(verdict) = check_one(i)? {
                found = Some((i, verdict));
                break;
            }
        }
        found
    };
    Ok(match failure {
        Some((_, verdict)) => verdict,
        None => Verdict::Pass { cases: total },
    })
}

/// One line of a degree-one maximizer probe.
#[derive(Clone, Debug)]
pub struct DegreeOneRow {
    pub shift: Rat,
    pub key: Poly,
    pub value: Value,
    pub transported_key: Poly,
    pub transported_value: Value,
}

/// Pool-restricted comparison of degree-one value maximizers on both sides
/// of a generator change.
#[derive(Clone, Debug)]
pub struct DegreeOneReport {
    pub rows: Vec<DegreeOneRow>,
    pub source_max: Value,
    pub transported_max: Value,
    /// The transported image of some source maximizer attains the
    /// transported pool maximum.
    pub correspondence: bool,
}

/// For each shift `c`, values `v(x + c)` and the value of the transported
/// key on the other side of `m` (both computed in the source chain, which is
/// the single valuation under two generators).
pub fn degree_one_probe(
    chain: &Chain,
    shifts: &[Rat],
    map: &MobiusMap,
) -> Result<DegreeOneReport, Error> {
    if shifts.is_empty() {
        return Err(Error::Input("degree-one probe needs at least one shift".into()));
    }
    let word = map.decompose();
    let m_fr = map.as_ratfn();
    let mut rows = Vec::with_capacity(shifts.len());
    for c in shifts {
        let key = Poly::new(vec![c.clone(), Rat::one()]);
        let value = chain.eval(&key)?;
        let transported_key = transport_key(&key, &word)?;
        let transported_value = chain.eval_ratfn(&transported_key.eval_ratfn(&m_fr))?;
        rows.push(DegreeOneRow {
            shift: c.clone(),
            key,
            value,
            transported_key,
            transported_value,
        });
    }
    let source_max = rows.iter().map(|r| r.value.clone()).max().unwrap();
    let transported_max = rows.iter().map(|r| r.transported_value.clone()).max().unwrap();
    let correspondence = rows
        .iter()
        .filter(|r| r.value == source_max)
        .any(|r| r.transported_value == transported_max);
    Ok(DegreeOneReport {
        rows,
        source_max,
        transported_max,
        correspondence,
    })
}

/// A transported limit augmentation with its equality verdict.
#[derive(Clone, Debug)]
pub struct LimitTransport {
    pub map: MobiusMap,
    pub transported: LimitAugmentation,
    pub verdict: Verdict,
}

/// Transports a limit augmentation: the family prefix as a chain, every
/// member key, and the limit key all move through the word; member values
/// and the limit value are recomputed semantically. The verdict compares
/// `samples` seeded polynomials up to the limit-key degree, pulled back
/// through the map, under exact equality.
pub fn transport_limit(
    aug: &LimitAugmentation,
    map: &MobiusMap,
    samples: usize,
    seed: u64,
    window: usize,
) -> Result<LimitTransport, Error> {
    aug.validate()?;
    let word = map.decompose();
    let m_fr = map.as_ratfn();
    let family = &aug.family;

    let prefix = if family.prefix.steps.is_empty() {
        family.prefix.clone()
    } else {
        transport_chain(&family.prefix, map)?.transported
    };

    let mut members = Vec::with_capacity(family.shape.horizon + 1);
    for t in 0..=family.shape.horizon {
        let member_chain = family.member_chain(t)?;
        let member = family.shape.member(t).expect("member below horizon");
        let psi = transport_key(&member.phi, &word)?;
        let delta = member_chain.eval_ratfn(&psi.eval_ratfn(&m_fr))?;
        members.push(AugStep::new(psi, delta));
    }
    let shape = FamilyShape {
        degree: family.shape.degree,
        source: MemberSource::Explicit(members),
        horizon: family.shape.horizon,
    };
    let transported_family = ContinuousFamily::new(prefix, shape)
        .map_err(|e| Error::InvalidFamily(format!("transported family: {e}")))?;

    let limit_key = transport_key(&aug.limit_key, &word)?;
    let gamma = if aug.gamma.is_infinite() {
        Value::Infinity
    } else {
        aug.eval_ratfn(&limit_key.eval_ratfn(&m_fr), window)?
    };
    let transported = LimitAugmentation::new(transported_family, limit_key, gamma)?;

    // equality on seeded polynomials in the new generator, pulled back
    let degree_bound = transported.limit_key.degree().unwrap_or(1);
    let mut cases: Vec<Poly> = vec![
        Poly::one(),
        Poly::x(),
        transported.limit_key.clone(),
    ];
    for i in 0..samples {
        let mut rng = sample::sample_rng(seed, i as u64);
        cases.push(sample::random_poly(&mut rng, &aug.family.prefix.base, degree_bound));
    }
    let mut verdict = Verdict::Pass { cases: cases.len() };
    for (i, g) in cases.iter().enumerate() {
        let g_y = RatFn::from_poly(g.clone());
        let pulled = g.eval_ratfn(&m_fr);
        let lhs = aug.eval_ratfn(&pulled, window)?;
        let rhs = transported.eval(g, window)?;
        if lhs != rhs {
            verdict = Verdict::Fail {
                case: i,
                source_expr: pulled,
                transported_expr: g_y,
                source_value: lhs,
                transported_value: rhs,
            };
            break;
        }
    }
    Ok(LimitTransport {
        map: map.clone(),
        transported,
        verdict,
    })
}

impl Atom {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Atom::Inv => serde_json::json!({"type": "inv"}),
            Atom::Affine { a, b } => serde_json::json!({
                "type": "affine", "a": rat_string(a), "b": rat_string(b)
            }),
        }
    }
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::Pass { cases } => serde_json::json!({"status": "pass", "cases": cases}),
            Verdict::Fail {
                case,
                source_expr,
                transported_expr,
                source_value,
                transported_value,
            } => serde_json::json!({
                "status": "fail",
                "case": case,
                "source_expr": source_expr,
                "transported_expr": transported_expr,
                "source_value": source_value,
                "transported_value": transported_value,
            }),
        }
    }
}

impl TransportReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut transported = serde_json::to_value(&self.transported).expect("chain serializes");
        transported["variable"] = serde_json::json!("y");
        serde_json::json!({
            "map": self.map,
            "word": self.word.atoms.iter().map(Atom::to_json).collect::<Vec<_>>(),
            "source": self.source,
            "transported": transported,
            "prepended": self.prepended.as_ref().map(|s| serde_json::json!({
                "phi": s.phi, "gamma": s.gamma
            })),
            "dropped_steps": self.dropped_steps,
            "table": self.rows.iter().map(|r| serde_json::json!({
                "phi": r.source_phi,
                "gamma": r.source_gamma,
                "psi": r.transported_phi,
                "delta": r.transported_gamma,
            })).collect::<Vec<_>>(),
            "verdict": self.verdict.to_json(),
        })
    }
}

impl DegreeOneReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "shift": rat_string(&r.shift),
                "key": r.key,
                "value": r.value,
                "transported_key": r.transported_key,
                "transported_value": r.transported_value,
            })).collect::<Vec<_>>(),
            "source_max": self.source_max,
            "transported_max": self.transported_max,
            "correspondence": self.correspondence,
        })
    }
}

// JSON form: {"a": "0", "b": "1", "c": "1", "d": "0"}.
#[derive(Serialize, Deserialize)]
struct MapDoc {
    a: String,
    b: String,
    c: String,
    d: String,
}

impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MapDoc {
            a: rat_string(&self.a),
            b: rat_string(&self.b),
            c: rat_string(&self.c),
            d: rat_string(&self.d),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MobiusMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = MapDoc::deserialize(deserializer)?;
        let parse = |name: &str, s: &String| -> Result<Rat, D::Error> {
            s.parse()
                .map_err(|_| D::Error::custom(format!("field `{name}`: `{s}` is not a rational")))
        };
        MobiusMap::new(
            parse("a", &doc.a)?,
            parse("b", &doc.b)?,
            parse("c", &doc.c)?,
            parse("d", &doc.d)?,
        )
        .map_err(|e| D::Error::custom(format!("{e}")))
    }
}
