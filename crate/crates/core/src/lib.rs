//! Outer parallel domains of unit-ball packings.
//!
//! A packing of unit balls is inflated to radius `λ̄ = 1 + λ`; this crate
//! measures the union of the inflated balls exactly (while no three of them
//! meet) or by Monte Carlo, evaluates density bounds for such soft packings,
//! checks the auxiliary inequalities behind them on grids, and searches for
//! finite packings with the smallest inflated union.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geom2d;
pub mod geom3d;
pub mod io;
pub mod montecarlo;
pub mod optimizer;
pub mod packing;
pub mod simplexnd;
pub mod table;

pub use error::{Error, Interval, Result};
pub use montecarlo::McEstimate;
pub use packing::{
    classify_regime, contact_count, intersection_graph, lambda_graph, lattice_patch, validate_packing, Inflation,
    IntersectionGraph, LatticeKind, Packing, Regime, ValidationReport, DEFAULT_TOL,
};
