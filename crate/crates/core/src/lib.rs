//! Isogeometric symmetric Galerkin boundary element solver for the 2D Laplace
//! equation.
//!
//! Boundaries are B-form curves; the unknown boundary traces are sought in
//! B-spline spaces built on the geometry, in Lagrangian spaces on the exact
//! curve, or in Lagrangian spaces on an inscribed polygon. Mixed Dirichlet and
//! Neumann problems lead to a symmetric first-kind system, open arcs to a
//! single-layer equation for the density jump.

pub mod assembly;
pub mod builtin;
pub mod data;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod postprocess;
pub mod problem;
pub mod quadrature;
pub mod spaces;
pub mod spline;

pub use error::{Error, Result};
