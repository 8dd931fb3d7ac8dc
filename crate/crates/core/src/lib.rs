//! Exact computation of Fourier–Mukai partner counts for rational elliptic
//! surfaces with a single multiple fiber, and of the invariants of the
//! Schoen-type fiber-product 3-folds built from them.
//!
//! The pipeline is:
//!
//! * [`torsion`] holds local Weil–Châtelet invariants as torsion points of
//!   `(Q/Z)^r`.
//! * [`wc_action`] lets the fiberwise automorphism group of the Jacobian act
//!   on those invariants.
//! * [`fm_count`] turns the action into the unit subgroup `I'`, the partner
//!   classes and the partner count `phi(m) / |I'|`.
//! * [`surface`] validates surface configurations and feeds them to
//!   [`fm_count`].
//! * [`moebius`] bounds the image of the base-point stabilizer in `Aut P^1`.
//! * [`threefold`] derives Hodge numbers and family certificates for fiber
//!   products.
//!
//! Projective-line arithmetic is generic over an [`ExactScalar`]; the aliases
//! below fix the scalar to arbitrary-precision rationals, which is what the
//! configuration format uses.

pub mod error;
pub mod fm_count;
pub mod moebius;
pub mod scalar;
pub mod surface;
pub mod threefold;
pub mod torsion;
pub mod wc_action;

pub use error::{Error, Result};
pub use fm_count::{FmReport, UnitGroupSubset};
pub use moebius::{MoebiusMap, N1Bound, P1Point};
pub use scalar::ExactScalar;
pub use surface::{KodairaFiber, SurfaceConfig, ValidationReport};
pub use threefold::{FamilyReport, HodgeDiamond, ThreefoldReport};
pub use torsion::{TorsionPoint, WcFiberKind};
pub use wc_action::AutAction;

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;
/// Machine-word rationals; fine for small hand-written coordinates.
pub type Rational64 = num_rational::Rational64;

/// A point of `P^1` with rational coordinate.
pub type Point = P1Point<Rational>;
/// A Möbius transformation with rational coefficients.
pub type Moebius = MoebiusMap<Rational>;
/// Möbius transformations over machine-word rationals.
pub type Moebius64 = MoebiusMap<Rational64>;
