//! Exact Ehrhart theory toolkit: lattice-point counts of dilated rational
//! polytopes, Ehrhart quasipolynomials and h*-vectors, rational cone
//! generating functions, triangulations, and checks of the classical
//! reciprocity theorems and h*-inequalities.

pub mod cones;
pub mod corpus;
pub mod enumerate;
pub mod error;
mod linalg;
pub mod polytope;
pub mod ratpoly;
pub mod report;
pub mod semimagic;
pub mod structure;
pub mod triangulate;

pub use error::{Error, Result};
