//! Numerical toolkit for the secrecy of lossy communication systems guarded
//! by the probability that an eavesdropper's single guess lands within an
//! allowed distortion of the source.
//!
//! The crate has three layers:
//!
//! * convex inner solvers for rate-distortion functions, including the
//!   conditional rate-distortion function with side information, and the
//!   max-min "worst side information" values and secrecy exponents built on
//!   top of them ([`rd`], [`exponents`]);
//! * exact method-of-types machinery at small blocklengths: type
//!   enumeration, covering codes, keyed random codebooks and the associated
//!   combinatorial bounds ([`types_lab`]);
//! * exact small-n implementations of the blur encoder, the keyed encoder
//!   with a dummy message, and the MAP / two-stage / key-guessing / blind
//!   adversaries with exact success probabilities ([`cipher`]).
//!
//! All information quantities are in bits. Solvers are pure and
//! deterministic given their explicit seeds; data-parallel sections reduce
//! order-independently so results do not depend on scheduling.

pub mod cipher;
pub mod error;
pub mod exponents;
pub mod par;
pub mod rd;
pub mod simplex;
pub mod types_lab;
pub mod verify;

pub use error::{Error, Result};
pub use simplex::{
    binary_entropy, conditional_mutual_information, counts_distortion_exact, entropy,
    expected_distortion, kl_divergence, min_distortion_levels, mutual_information, Channel, Dist,
    DistortionMatrix, DistortionSpec, Joint2, Joint3, Level,
};
