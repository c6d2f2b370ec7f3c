//! Spectral toolkit for the isotropic Navier-Lame operator
//! `P u = -tau Lap u - (tau + mu) grad div u`.
//!
//! Symbol algebra, small-time heat-trace coefficients, meshing and P1
//! finite elements with a shift-invert Lanczos solver, analytic spectra
//! for the interval and the clamped disk, and a heat-trace fitter that
//! recovers volume and boundary measure from eigenvalues.

pub mod complex;
pub mod dense;
pub mod error;
pub mod fem;
pub mod io;
pub mod kernel;
pub mod lanczos;
pub mod mesh;
pub mod oracles;
pub mod params;
pub mod sparse;
pub mod special;
pub mod spectrum;
pub mod symbol;
pub mod trace;

pub use complex::ComplexScalar;
pub use error::{Error, Result};
pub use kernel::{GeometricData, HeatTraceCoefficients, IsoperimetricAudit};
pub use mesh::{Domain2D, Mesh};
pub use params::{BoundaryCondition, LameParameters};
pub use spectrum::{Domain, Provenance, Spectrum};
pub use symbol::SymbolMatrix;
pub use trace::{FitResult, RecoveredGeometry, TraceSample};
