//! Dipolar Ginzburg–Landau energies for thin pancake-shaped films.
//!
//! The crate evaluates the layered 3D energy with a stray-field term, the
//! reduced 2D energy of the thickness average (local terms plus a
//! half-Laplacian edge correction) and its sharp-interface limit, minimizes
//! them under box and pinning constraints, and ships brute-force oracles that
//! check the spectral operators against direct quadrature.

pub mod energy;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod minimize;
pub mod rng;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CutoffField, DomainSpec, Shape, SignedDistanceField};
pub use grid::{Boundary, Field2D, Field3D, Grid2D, LayerStack};
pub use spectral::{DipolarDecomposition, Spectrum2D};

/// Modica–Mortola line tension `2√2/3`.
pub const SIGMA0: f64 = 2.0 * std::f64::consts::SQRT_2 / 3.0;
/// Edge line tension per unit `λ`, `1/π`.
pub const SIGMA1: f64 = std::f64::consts::FRAC_1_PI;
/// Critical `λ_c = σ0/σ1 = 2π√2/3`.
pub const LAMBDA_C: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::SQRT_2 / 3.0;
