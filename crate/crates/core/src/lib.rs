//! Large sieve inequalities for `L^p` norms of trigonometric polynomials.
//!
//! For nodes `x_1 < … < x_r` on the circle with minimal gap δ and a degree-N
//! polynomial `s`, the sieve sum `Σ |s(x_j)|^p` is bounded by
//! `N σ(δ; N) / ∫cos^p · ‖s‖_p^p`. The modules split as follows:
//!
//! * [`trigpoly`]: polynomials, node sets, `L^p` norms and sieve sums.
//! * [`kernels`]: admissible kernels and their Fourier transforms.
//! * [`inverse_op`]: the convolution operator, its inverse as an atomic
//!   measure, and the norm/spectral-radius identities.
//! * [`bounds`]: closed-form constants, special functions, arc overlaps.
//! * [`verifier`]: randomized checks, extremal search, bound tables.

pub mod bounds;
pub mod error;
pub mod inverse_op;
pub mod kernels;
pub mod quadrature;
pub mod trigpoly;
pub mod verifier;

pub use bounds::{BoundReport, Separation};
pub use error::{Error, Result};
pub use inverse_op::{AtomicMeasure, ReciprocalSeries};
pub use kernels::Kernel;
pub use quadrature::QuadratureConfig;
pub use trigpoly::{NodeSet, TrigPoly};
