//! Local solubility of genus one curves `z^2 + h(x,y) z = f(x,y)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactmath`] exact integers, rationals, dyadics, polynomials, rational
//!   functions, Sturm root counting and outward-rounded dyadic intervals;
//! * [`fpcount`] exhaustive classification of forms over `F_p`;
//! * [`recursion`] the p-adic density recursion, solved exactly per prime or
//!   symbolically over `Q(t)`;
//! * [`padic`] an independent `Q_p` solubility decision procedure and a
//!   counter-based Monte Carlo estimator of local densities;
//! * [`realvol`] rigorous branch-and-bound bounds for the real density;
//! * [`assembly`] the Euler product with a certified tail.

pub mod assembly;
pub mod error;
pub mod exactmath;
pub mod fpcount;
pub mod model;
pub mod padic;
pub mod parallel;
pub mod primes;
pub mod realvol;
pub mod recursion;

pub use error::{Error, Result};
pub use exactmath::{Dyadic, DyadicInterval, HalfLine, Poly, RatFn, Rational};
pub use model::ModelKind;
