//! Self-similar hyperbolic metrics for expansive systems: subshifts of
//! finite type and hyperbolic toral automorphisms, with covering numbers,
//! capacity and entropy estimators, and the intrinsic measure built from
//! stable and unstable Hausdorff measures.

pub mod dimension;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod measure;
pub mod symbolic;
pub mod torus;

pub use error::{Error, Result};
