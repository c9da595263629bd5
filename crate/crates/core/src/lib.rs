//! Exact computations for the competing-urns model.

pub mod conjectures;
pub mod error;
pub mod measure;
pub mod orient;
pub mod rational;
pub mod urn;
pub mod verdict;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
pub use verdict::{Status, Verdict};
