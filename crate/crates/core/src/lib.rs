//! Weighted Bloch and Lipschitz semi-norms on domains of `R^m`.
//!
//! The crate computes weighted geodesic distances `d_w`, the Bloch
//! semi-norm `sup w(ζ)‖Df(ζ)‖`, the two-point `W`-Lipschitz semi-norm for
//! admissible kernels `W(ζ, η)`, and the closed-form hyperbolic geometry of
//! the unit ball used to calibrate the numerical solver.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod geometry;
pub mod hyperbolic;
pub mod kernels;
pub mod sampling;
pub mod seminorms;
pub mod weights;

pub use error::{Error, Result};
pub use geodesic::{geodesic_distance, DistanceProvider, GeodesicOptions, GeodesicResult};
pub use geometry::{path_cost, Domain, Path, Point};
pub use weights::Weight;
pub use kernels::{check_admissible, symmetrize, AdmissibilityOptions, AdmissibilityReport, Kernel, Verdict};
pub use seminorms::{
    bloch_seminorm, dw_quotient_seminorm, lipschitz_seminorm, verify_equality, Sampler, SeminormEstimate, SmoothMap,
};
