//! Campbell diagrams of weakly anisotropic rotors.
//!
//! The crate computes exact spectra of the gyroscopic pencil
//! `λ²x + λ(2ΩG + δD)x + (P + Ω²G² + κK + νN)x = 0`, first-order splitting of the
//! double eigenvalues at crossings of the isotropic spectral mesh, Krein signatures,
//! exceptional points and their branch cuts, and the closed-form rotating string.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

pub mod cli;
pub mod ep;
pub mod error;
pub mod mesh;
pub mod model;
pub mod numlin;
pub mod oracle;
pub mod perturb;
pub mod scalar;
pub mod string;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type RotorModel64 = model::RotorModel<f64>;
pub type Node64 = mesh::Node<f64>;
pub type NodeExpansion64 = perturb::NodeExpansion<f64>;
pub type ComplexMatrix64 = numlin::ComplexMatrix<f64>;
pub type RealMatrix64 = numlin::RealMatrix<f64>;
pub type Scales64 = model::Scales<f64>;
