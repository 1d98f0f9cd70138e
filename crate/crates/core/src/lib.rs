//! rgkit: a numerical and combinatorial toolkit around fermionic
//! renormalization-group fixed points.
//!
//! The crate provides cutoff propagator families and their integrated kernels,
//! Pfaffian linear algebra with Gram-Hadamard verification, Steiner diameters,
//! a finite-mode antisymmetric kernel algebra with Wick ordering and flow
//! operators, scale-labelled tree expansions with their counting and integral
//! bounds, and solvers for the truncated and corrected fixed-point systems of
//! the local couplings.

pub mod checks;
pub mod error;
pub mod fixedpoint;
pub mod gram;
pub mod kernels;
pub mod params;
pub mod pfaffian;
pub mod propagator;
pub mod quad;
pub mod radial;
pub mod steiner;
pub mod trees;

pub use error::RgError;
pub use params::ModelParams;
