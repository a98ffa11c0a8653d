//! Exact arithmetic for augmented valuation chains on `K[x]`.
//!
//! The base field is `Q` with a p-adic (or trivial) valuation. On top of it
//! the crate builds valuations of the polynomial ring by chains of key
//! polynomials, evaluates them on polynomials and rational functions,
//! handles continuous families and their limit augmentations, and transports
//! whole chains across generator changes of `K(x)` (Möbius maps), checking
//! by exact computation that the transported chain defines the same
//! valuation on the rational function field.
//!
//! Modules mirror the layers of the construction:
//!
//! - [`value`]: the ordered value group `Q ∪ {+inf}`.
//! - [`field`]: the valued base field `(Q, v_p)`.
//! - [`poly`]: dense exact polynomials, Euclidean division, key-adic digits.
//! - [`chain`]: augmented valuation chains, validation, probes.
//! - [`limits`]: continuous families, stabilization, limit augmentations.
//! - [`family`]: admissible families assembled from discrete and continuous parts.
//! - [`mobius`]: generator changes and the transport/equality harness.
//! - [`catalog`]: the worked catalog of chains and families used throughout
//!   the test suites and the command-line examples.

pub mod catalog;
pub mod chain;
mod error;
pub mod family;
pub mod field;
pub mod limits;
pub mod mobius;
pub mod poly;
pub mod sample;
pub mod value;

pub use chain::{AugStep, Chain, ValidationReport};
pub use error::Error;
pub use field::{BaseValuation, Rat};
pub use poly::{Expansion, Poly, RatFn};
pub use value::Value;
