//! Toolkit for monotone subsequences in locally uniform random permutations.
//!
//! A random permutation is modelled as a planar point set in general position:
//! `i` maps to `j` when the `i`th point from the left is the `j`th point from
//! below. Decreasing subsequences are decreasing point sets, and the largest
//! union of `k` of them is governed by the column lengths of the RSK Young
//! diagram (Greene's theorem). At scale, those unions concentrate around limit
//! surfaces described by a variational problem over doubly increasing
//! functions.
//!
//! The crate is organized around that pipeline:
//!
//! * [`geometry`] — density domains, seeded point-process sampling, transforms.
//! * [`chains`] — exact combinatorics: RSK shape, Greene sums, maximal
//!   k-decreasing subsets, the κ field and its inverse operator.
//! * [`analytic`] — the efficiency curve Φ and its dual, the functional F_ρ,
//!   closed-form limit surfaces for the uniform square, PDE residuals.
//! * [`maximizer`] — projected supergradient maximization of F_ρ over
//!   range-constrained doubly increasing grids.
//! * [`experiments`] — seeded, replicated Monte Carlo runs that confront the
//!   combinatorial side with the analytic predictions.

pub mod analytic;
pub mod chains;
mod error;
pub mod experiments;
pub mod geometry;
pub mod maximizer;
pub mod oracle;

pub use error::{Error, Result};
