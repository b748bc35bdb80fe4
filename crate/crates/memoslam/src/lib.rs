//! Continual-learning dynamic RGB-D SLAM on a built-in synthetic simulator.
//!
//! The system tracks a camera against a continually trained neural map
//! (multi-resolution feature grids plus small decoders over a truncated
//! signed distance field) while an online-trained instance classifier
//! decides which observations are moving objects. Static content is
//! memorized through keyframe replay; flagged dynamic content is withheld
//! from replay and decays out of the map.
//!
//! Modules mirror the subsystems: [`diff`] holds the numerical substrate,
//! [`sim`] the synthetic RGB-D world, [`map`] the neural scene
//! representation, [`render`] volume rendering and the loss stack,
//! [`classifier`] motion-status reasoning, [`slam`] the frame loop, and
//! [`eval`] trajectory/map metrics.

pub mod diff;
pub mod error;
pub mod exec;
pub mod pose;
pub mod sim;

pub use error::{Error, Result};
