//! haarlab: a numerical laboratory for measure expansion on concrete locally
//! compact groups.
//!
//! The crate models compact sets as unions of grid cells over global charts of
//! catalog groups (lines, tori, cylinders, the affine group of the line, the
//! Heisenberg group, ℝ²⋊T), computes Haar measures with two-sided error
//! brackets, and verifies expansion statements on instances: Kemperman-type
//! product-set lower bounds, Brunn–Minkowski coefficients, Ruzsa distance
//! axioms, covering and approximate-group certificates, quotient domination,
//! inverse structure recovery, and the strict expansion gap on the affine
//! group.

pub mod affine;
pub mod catalog_check;
pub mod chart;
pub mod cover;
pub mod conv;
pub mod error;
pub mod grid;
pub mod group;
pub mod metrics;
pub mod product;
pub mod quotient;
pub mod recovery;
pub mod report;
pub mod roots;
pub mod stabilizer;
pub mod tao;

pub use error::{Error, Result};
