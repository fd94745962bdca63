//! Computational potential theory of ellipsoids.
//!
//! Exact polynomial Dirichlet solutions via the Fischer-operator
//! construction, confocal mean values, mother bodies on the focal
//! ellipsoid, Newton's shell theorem, equilibrium potentials and capacity,
//! Bergman polynomial recurrences on ellipses, and the confocal Hele-Shaw
//! shrink-down with moment conservation.

// Index loops over fixed-arity component arrays read better than zipped
// iterators in the cubature kernels.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::type_complexity)]

pub mod bergman;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod heleshaw;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod potentials;
pub mod quad;
pub mod report;
pub mod tolerances;

pub use error::{Error, Result};
pub use geometry::{ConfocalParam, Ellipsoid, FocalEllipsoid};
pub use poly::{CxPoly, Monomial, MultiPoly, RatPoly, Scalar};
pub use report::{Sample, VerificationReport};
