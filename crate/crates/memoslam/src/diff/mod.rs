//! Numerical substrate: small MLPs with exact reverse-mode gradients, dense
//! feature grids with trilinear interpolation, the Adam optimizer, and a
//! finite-difference checker used throughout the test suites.

pub mod adam;
pub mod check;
pub mod grid;
pub mod mlp;

pub use adam::{adam_step, AdamParams, AdamState};
pub use check::{finite_difference_check, GradCheckReport};
pub use grid::{Aabb, CellCorners, FeatureGrid};
pub use mlp::{sigmoid, Activation, LayerSpec, Mlp, MlpScratch};
