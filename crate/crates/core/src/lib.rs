//! Exact invariants of noncommutative tori and their flip orbifolds.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactnum`] exact scalars over a formal transcendental `a`
//! * [`skewpf`] skew matrices, pfaffians, minors
//! * [`schur`] the pfaffian Schur complement and the SO(n,n|Z) action
//! * [`irrational`] the super-increasing family and irrationality certificates
//! * [`intmat`] integer matrices with Smith and Hermite normal forms
//! * [`ktheory`] generator labels, the Natsume matrix, isomorphism data
//! * [`pathfield`] Bernstein certificates and integer translates
//! * [`twisted`] numeric twisted convolution and Rieffel projections

pub mod error;
pub mod exactnum;
pub mod intmat;
pub mod irrational;
pub mod ktheory;
pub mod pathfield;
pub mod schur;
pub mod skewpf;
pub mod twisted;

pub use error::{Error, Result};
pub use exactnum::{AlphaEnclosure, AlphaPoly, RatInterval, Rational, Scalar};
pub use skewpf::{MinorIndex, SkewMatrix};
