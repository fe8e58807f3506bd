//! Dominant-strategy implementability audits for social choice functions on
//! discretized open-interval type spaces.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! * [`domain`] holds alternatives, boxes, grids, type profiles and permutations.
//! * [`mechanism`], [`payment`] and [`random`] provide evaluable social choice
//!   functions (affine maximizers, the two-agent bounded-domain counterexample,
//!   tables, shifted mechanisms) together with payment rules.
//! * [`audit`] checks cycle monotonicity on per-agent allocation graphs,
//!   synthesizes payments from shortest-path potentials and verifies incentive
//!   compatibility exhaustively on a grid.
//! * [`choice`], [`properties`] and [`pset`] implement choice sets and the
//!   structural property checkers (PAD, non-imposition, neutrality, anonymity,
//!   binary independence, P-set laws).
//! * [`ordering`], [`fit`], [`kappa`] and [`lp`] recover welfare orderings,
//!   weighted-welfare and affine-maximizer representations by linear programming.
//!
//! Every verdict is about the discretized mechanism. A grid pass is evidence,
//! not a proof, for the continuum.
#![no_std]

extern crate alloc;

pub mod audit;
pub mod choice;
pub mod domain;
pub mod error;
pub mod fit;
pub mod kappa;
pub mod lp;
pub mod mechanism;
pub mod ordering;
pub mod payment;
pub mod properties;
pub mod pset;
pub mod random;
pub mod report;
pub mod tolerance;

pub use domain::{
    Alternative, AlternativeSet, Interval, Permutation, TypeGrid, TypeProfile, TypeSpace,
    TypeVector, UtilityVector,
};
pub use error::{Error, Result};
pub use mechanism::{AffineMaximizer, Mechanism, TableMechanism};
pub use payment::PaymentRule;
pub use report::{CheckReport, Counterexample, Verdict};
pub use tolerance::Tolerances;
