//! Second-order relative spectra of Hermitian matrices.
//!
//! For a Hermitian `T` and a subspace `L` with orthonormal basis `Q`, the
//! second-order spectrum is the set of `λ` where `Q*(T − λ)²Q` is singular,
//! i.e. the roots of the monic pencil `λ² − 2λB + M` with `B = Q*TQ` and
//! `M = Q*T²Q`. This crate computes those sets and builds matrices and
//! subspaces that push them around: collapsing them onto a point,
//! making them depend on the truncation window, or planting them on a
//! prescribed target inside the attainable region.
//!
//! The runnable programs in `examples/` are the best entry point.

pub mod io;
pub mod linalg;
pub mod nesting;
pub mod planting;
pub mod report;
pub mod rotation;
pub mod spectra;
pub mod svg;
pub mod symbol;
pub mod tol;

pub use num_complex::Complex64;
