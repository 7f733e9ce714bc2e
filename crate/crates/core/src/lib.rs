//! Exponentially localized time-frequency expansions.
//!
//! Signals are expanded over the double-density lattice `{(m√π, n√π)}` of
//! the time-frequency plane using translated and modulated copies of a single
//! self-Fourier waveform built from lemniscatic Jacobi theta series. The
//! lattice splits into four parity sublattices; atoms are orthonormal within
//! each sublattice, and the union is a tight frame with bound 2:
//!
//! ```text
//! f_{m,n} = ∫ f(t) conj(a_{m,n}(t)) dt
//! f(t)    ≈ ½ Σ f_{m,n} a_{m,n}(t)        (|m| ≤ M, |n| ≤ N)
//! ‖f‖²    = ½ Σ |f_{m,n}|²
//! ```
//!
//! Module map:
//!
//! - [`theta`]: θ3, θ4 and the structure constants α_n.
//! - [`waveform`]: the base waveform a(t), lattice atoms, attenuation.
//! - [`signals`]: sampled signals, Hermite functions, lattice operators, FT.
//! - [`frame`]: analysis, synthesis, energy, displacement function.
//! - [`render`]: deterministic SVG plots of coefficient grids and curves.
//! - [`verify`]: the numerical acceptance checks.

pub mod error;
pub mod frame;
pub mod render;
pub mod signals;
pub mod theta;
pub mod verify;
pub mod waveform;

pub use error::{Error, Result};
pub use frame::{
    ambiguity, analyze, energy, estimate_displacement, reconstruction_error, synthesize,
    Ambiguity, CoeffGrid, Displacement,
};
pub use num_complex::Complex64;
pub use render::{render_curve, render_grid, Curve, RenderStyle, Svg};
pub use signals::{
    displace, fourier_transform, hermite_fn, hermite_poly, modulate, sample, translate,
    QuadratureSpec, SampledSignal, SignalSpec, Transformed,
};
pub use theta::{compute_alpha, theta3, theta4, AlphaTable, ThetaConfig};
pub use waveform::{
    atom_mn, atom_raw, atom_raw_cosh, attenuation_db, build_waveform, LatticeConstants, Waveform,
};

/// Lattice step √π, shared by the time and frequency axes.
pub const LATTICE_STEP: f64 = 1.772_453_850_905_515_9;

/// Crate version string embedded in generated files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
