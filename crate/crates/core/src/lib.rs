//! Exact-arithmetic toolkit for dendrites modelled as finite metric trees,
//! together with a symbolic model of the end-compactified Cayley tree of a
//! free group.
//!
//! Everything is computed over arbitrary-precision rationals; equality of
//! points, subsets and measures is decidable and canonical. The main pieces:
//!
//! * [`tree`] — the finite dendrite model: vertices, edges with positive
//!   rational lengths, points, orders, subdivision and suppression.
//! * [`subdendrite`] — closed connected subsets in canonical form and the
//!   arc/hull/median/Helly toolkit.
//! * [`measure`] — rational probability measures and the measure-median map.
//! * [`cocycle`] — the direction bundle over branch points and the bounded
//!   two-cocycle supported at medians.
//! * [`dynamics`] — piecewise-linear homeomorphisms, exact fixed sets,
//!   austro-boreal arcs and the tectonic decomposition.
//! * [`wazewski`] — depth-truncated universal dendrites, tuple-orbit codes
//!   and the tree/dendrite correspondence.
//! * [`words`], [`symbolic`] — free-group word arithmetic and the symbolic
//!   dendrite with its cylinder/half-space calculus.
//! * [`action`] — finitely generated actions: elementarity certificates,
//!   move-off searches, ping-pong free pairs and measure pushing.
//! * [`format`] — the shared text formats used by the command-line tools.
//!
//! ```
//! use dendrite_core::subdendrite::{hull, median};
//! use dendrite_core::tree::{Dendrite, EdgeId, Point, VertexId};
//! use dendrite_core::rat;
//!
//! let star = Dendrite::new(
//!     (0..4).map(VertexId),
//!     (0..3).map(|i| (EdgeId(i), VertexId(0), VertexId(i + 1), rat(1, 1))),
//! )?;
//! let leaves = star.ends();
//! assert_eq!(
//!     median(&star, &leaves[0], &leaves[1], &leaves[2])?,
//!     Point::Vertex(VertexId(0)),
//! );
//! assert_eq!(hull(&star, &leaves)?.full_edges().count(), 3);
//! # Ok::<(), dendrite_core::Error>(())
//! ```

pub mod action;
pub mod cocycle;
pub mod dynamics;
pub mod format;
pub mod measure;
pub mod sample;
pub mod subdendrite;
pub mod symbolic;
pub mod tree;
pub mod wazewski;
pub mod words;

/// Exact scalar used everywhere: arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    use num_bigint::BigInt;
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational zero.
pub fn rat_zero() -> Rational {
    use num_traits::Zero;
    Rational::zero()
}

/// Rational one.
pub fn rat_one() -> Rational {
    use num_traits::One;
    Rational::one()
}

/// Approximate a rational as a float, for display only.
pub fn rat_approx(v: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point not in dendrite: {0}")]
    PointNotFound(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("incompatible domains: {0}")]
    DomainMismatch(String),
    #[error("parse error at line {line}: {msg} (near `{token}`)")]
    Parse {
        line: usize,
        msg: String,
        token: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use subdendrite::{Arc, SubDendrite};
pub use tree::{Dendrite, EdgeId, Point, VertexId};
