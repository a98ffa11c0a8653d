//! The worked catalog over the 2-adic rationals: the chains, families, and
//! maps exercised by the test suites and shipped with the command-line
//! examples.
//!
//! Every chain here is built from genuine key polynomials, so each one is a
//! true valuation (or pseudo-valuation) and the multiplicativity probes must
//! come back clean on all of them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{AugStep, Chain};
use crate::family::{AdmissibleFamily, Segment};
use crate::field::{rat, BaseValuation, Rat};
use crate::limits::{ContinuousFamily, FamilyShape, LimitAugmentation, DEFAULT_HORIZON};
use crate::mobius::MobiusMap;
use crate::poly::Poly;
use crate::value::Value;

pub fn base2() -> BaseValuation {
    BaseValuation::p_adic(2).unwrap()
}

/// The Gauss valuation: `v(sum a_j x^j) = min v(a_j)`.
pub fn gauss() -> Chain {
    Chain::new(base2(), vec![AugStep::new(Poly::x(), Value::zero())]).unwrap()
}

/// The monomial valuation assigning `1/2` to the variable.
pub fn monomial_half() -> Chain {
    Chain::new(base2(), vec![AugStep::new(Poly::x(), Value::rat(1, 2))]).unwrap()
}

/// Two steps: `x` at `1/2`, then the key `x^2 + 2` at `2` (approximating a
/// square root of `-2`).
pub fn quadratic() -> Chain {
    Chain::new(
        base2(),
        vec![
            AugStep::new(Poly::x(), Value::rat(1, 2)),
            AugStep::new(Poly::from_ints(&[2, 0, 1]), Value::from_int(2)),
        ],
    )
    .unwrap()
}

/// A single shifted degree-one key `x + 2` at value `3`.
pub fn shifted_linear() -> Chain {
    Chain::new(
        base2(),
        vec![AugStep::new(Poly::from_ints(&[2, 1]), Value::from_int(3))],
    )
    .unwrap()
}

/// The pseudo-valuation with socle `(x^2 + 2)`: the quadratic chain with an
/// infinite final value.
pub fn socle_quadratic() -> Chain {
    Chain::new(
        base2(),
        vec![
            AugStep::new(Poly::x(), Value::rat(1, 2)),
            AugStep::new(Poly::from_ints(&[2, 0, 1]), Value::Infinity),
        ],
    )
    .unwrap()
}

/// A degree-three key: `x` at `1/3`, then `x^3 - 2` at `2` (approximating a
/// cube root of `2`).
pub fn cubic() -> Chain {
    Chain::new(
        base2(),
        vec![
            AugStep::new(Poly::x(), Value::rat(1, 3)),
            AugStep::new(Poly::from_ints(&[-2, 0, 0, 1]), Value::from_int(2)),
        ],
    )
    .unwrap()
}

/// All six catalog chains, the socle chain included.
pub fn all_chains() -> Vec<Chain> {
    vec![
        gauss(),
        monomial_half(),
        quadratic(),
        shifted_linear(),
        socle_quadratic(),
        cubic(),
    ]
}

pub fn chain_names() -> Vec<&'static str> {
    vec![
        "gauss",
        "monomial-half",
        "quadratic",
        "shifted-linear",
        "socle-quadratic",
        "cubic",
    ]
}

/// The catalog chains that are valuations (everything but the socle chain).
pub fn valuation_chains() -> Vec<Chain> {
    vec![
        gauss(),
        monomial_half(),
        quadratic(),
        shifted_linear(),
        cubic(),
    ]
}

/// The continuous family of degree-one keys `x - c_t`, `c_t = 2 + 4 + ... +
/// 2^t`, values `t + 1`: the truncations of the series converging 2-adically
/// to `-2`.
pub fn family_geometric() -> ContinuousFamily {
    ContinuousFamily::new(
        Chain {
            base: base2(),
            steps: vec![],
        },
        FamilyShape::geometric(2, DEFAULT_HORIZON).unwrap(),
    )
    .unwrap()
}

/// The pseudo-valuation limit of the geometric family: limit key `x + 2`
/// with infinite value, i.e. `f -> v(f(-2))`.
pub fn limit_pseudo() -> LimitAugmentation {
    LimitAugmentation::new(
        family_geometric(),
        Poly::from_ints(&[2, 1]),
        Value::Infinity,
    )
    .unwrap()
}

/// One segment: the discrete step `(x, 1)` (member zero of the geometric
/// family), then the family itself as continuous part.
pub fn family_admissible() -> AdmissibleFamily {
    AdmissibleFamily::new(
        base2(),
        vec![Segment {
            steps: vec![AugStep::new(Poly::x(), Value::from_int(1))],
            continuous: Some(FamilyShape::geometric(2, DEFAULT_HORIZON).unwrap()),
        }],
    )
    .unwrap()
}

/// A complete family: the quadratic chain as a single discrete segment.
pub fn family_complete() -> AdmissibleFamily {
    AdmissibleFamily::new(
        base2(),
        vec![Segment {
            steps: quadratic().steps,
            continuous: None,
        }],
    )
    .unwrap()
}

/// Two segments: the geometric family, then the limit augmentation
/// `(x + 2, inf)` as the discrete head of the second segment. Converges to
/// the pseudo-valuation `f -> v(f(-2))`.
pub fn family_two_segment() -> AdmissibleFamily {
    AdmissibleFamily::new(
        base2(),
        vec![
            Segment {
                steps: vec![AugStep::new(Poly::x(), Value::from_int(1))],
                continuous: Some(FamilyShape::geometric(2, 12).unwrap()),
            },
            Segment {
                steps: vec![AugStep::new(Poly::from_ints(&[2, 1]), Value::Infinity)],
                continuous: None,
            },
        ],
    )
    .unwrap()
}

/// All catalog admissible families.
pub fn all_families() -> Vec<AdmissibleFamily> {
    vec![family_admissible(), family_complete(), family_two_segment()]
}

/// The named maps of the transport matrix: the inversion and three affine
/// maps.
pub fn named_maps() -> Vec<(&'static str, MobiusMap)> {
    vec![
        ("inv", MobiusMap::inversion()),
        ("double", MobiusMap::affine(rat(2, 1), rat(0, 1)).unwrap()),
        ("shift", MobiusMap::affine(rat(1, 1), rat(1, 1)).unwrap()),
        ("affine-mix", MobiusMap::affine(rat(2, 1), rat(3, 1)).unwrap()),
    ]
}

/// A random invertible map with small rational entries.
pub fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusMap {
    loop {
        let mut draw = || -> Rat {
            let num = rng.gen_range(-5..=5i64);
            let den = rng.gen_range(1..=3i64);
            Rat::new(num.into(), den.into())
        };
        let (a, b, c, d) = (draw(), draw(), draw(), draw());
        if let Ok(m) = MobiusMap::new(a, b, c, d) {
            return m;
        }
    }
}
