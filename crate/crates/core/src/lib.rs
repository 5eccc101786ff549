//! Numerical workbench for the index theorem of Dirac operators on flat
//! even-dimensional tori with a domain wall, where the connection jumps
//! across a co-dimension-one slice.
//!
//! The index of the bulk operator is compared with the bulk integral of
//! the index density and the relative spectral asymmetry of the wall
//! operators; supporting identities (cylinder pasting, smoothing
//! invariance, eta variation, transgression) are checked alongside.

pub mod clifford;
pub mod dirac;
pub mod error;
pub mod forms;
pub mod gauge;
pub mod heat_kernel;
pub mod geometry;
pub mod linalg;
pub mod profile;
pub mod quadrature;
pub mod spectral;
pub mod verifier;

pub use error::{Error, Result};
