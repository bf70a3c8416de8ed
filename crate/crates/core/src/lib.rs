//! Locally D-optimal approximate designs for the Rasch Poisson counts model.
//!
//! The crate is `no_std` (it needs `alloc`). It covers
//!
//! * the interaction model of order `d` over `k` binary rules, its intensities
//!   and Fisher information ([`model`], [`fisher`], [`combinatorics`]);
//! * the inequality system characterising optimality of the corner design, an
//!   independent Kiefer–Wolfowitz oracle and slice/redundancy tooling
//!   ([`regions`], [`slice`]);
//! * a multiplicative D-optimal weight iteration ([`optimizer`]);
//! * the information matrix polytope, its LMI relaxation and analytic
//!   centers ([`geometry`]);
//! * the rule-permutation and level-flip symmetries ([`symmetry`]).
//!
//! File formats, CSV output and the command-line front end live in the
//! `rasch-doe-cli` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod design;
pub mod error;
pub mod fisher;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod params;
pub mod regions;
pub mod slice;
pub mod symmetry;

pub use design::Design;
pub use error::{Error, Result};
pub use linalg::SymMatrix;
pub use model::{BinarySetting, InteractionModel, Subset};
pub use params::ParameterVector;
