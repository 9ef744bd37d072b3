//! Computational toolkit for finitely connected circle domains.
//!
//! The crate works with a domain `D = B(0,R) ∩ Ω`, where `Ω` is the
//! complement of finitely many closed disks, and provides:
//!
//! * exact Möbius / anti-Möbius primitives and circle reflections ([`geometry`]),
//! * Whitney cube decompositions with adjacency ([`whitney`]),
//! * quasihyperbolic distances, geodesics, layers and shadows ([`quasihyperbolic`]),
//! * transboundary chains and the chain diameter estimates ([`transboundary`]),
//! * reduced words, reflected disks and the reflection extension ([`schottky`]),
//! * annulus moduli, the Grötzsch function and dilatation estimates ([`modulus`]),
//! * Beltrami coefficients and their pullbacks ([`beltrami`]).
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; results are identical.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beltrami;
pub mod error;
pub mod geometry;
pub mod modulus;
pub mod par;
pub mod quadrature;
pub mod quasihyperbolic;
pub mod schottky;
pub mod transboundary;
pub mod whitney;

pub use error::{Error, Result};
pub use geometry::{CircleDomainConfig, Complex, Disk, ImageRegion, Mobius, Violation};
