//! Periodic solutions and subsumed homoclinic connections of continuous
//! two-piece piecewise-linear maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbolic`]: words over `{L, R}` and their combinatorics
//! - [`map`]: the map itself and the three-dimensional normal form
//! - [`eigen`]: dense eigenvalues and eigenvectors
//! - [`cycle`]: word compositions and periodic solutions
//! - [`spectral`]: the saddle-cycle eigen-frame and projected scalars
//! - [`homoclinic`]: the homoclinic orbit and the unstable branch
//! - [`codim3`]: Newton solver and hypothesis verifier
//! - [`cli`]: the `pwlhc` command-line front end

pub mod cli;
pub mod codim3;
pub mod cycle;
pub mod eigen;
pub mod error;
pub mod format;
pub mod homoclinic;
pub mod map;
pub mod presets;
pub mod spectral;
pub mod symbolic;

pub use error::{Error, FrameError, Result};
pub use map::{bcnf3, make_map, BcnfParams, MapConfig, PwlMap, Side};
pub use symbolic::{Symbol, Word};
