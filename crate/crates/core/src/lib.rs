//! Computational toolkit for finite metric spaces.

pub mod constructions;
pub mod error;
pub mod family;
pub mod gh;
pub mod metric;
pub mod pointed;
pub mod random;
pub mod spider;
pub mod suites;

pub use error::{Error, Result};
