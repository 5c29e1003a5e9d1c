//! Ray-traced back-projection imaging for reflective multipath scenes.

pub mod error;
pub mod fields;
pub mod geometry;
pub mod imaging;
pub mod propagation;
pub mod scenes;

pub use error::{Error, Result};
