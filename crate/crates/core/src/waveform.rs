//! The base waveform a(t) and its lattice atoms.
//!
//! a(t) is the unit-energy, even, self-Fourier function
//!
//! ```text
//! a(t) ∝ [e^{-t²/2} + Σ_n (−1)^n α_n e^{-πn} (e^{-(t−2n√π)²/2} + e^{-(t+2n√π)²/2})] / √θ3(t√π)
//! ```
//!
//! Each summand is a Gaussian bump bounded by one, which makes this form the
//! stable evaluator. The equivalent cosh form is kept alongside for
//! cross-checking.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signals::QuadratureSpec;
use crate::theta::{compute_alpha, AlphaTable, ThetaConfig, MAX_ALPHA_COUNT};
use crate::LATTICE_STEP;

/// Default number of bumps kept in the waveform series.
pub const DEFAULT_N_TERMS: usize = 8;

/// Default quadrature size for the α table.
pub const DEFAULT_ALPHA_QUAD_POINTS: usize = 4096;

/// Translation and modulation steps of the lattice. Their product is π, so
/// `e^{iab} = −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConstants {
    pub a_step: f64,
    pub b_step: f64,
}

impl LatticeConstants {
    pub const STANDARD: LatticeConstants = LatticeConstants {
        a_step: LATTICE_STEP,
        b_step: LATTICE_STEP,
    };
}

impl Default for LatticeConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

fn check_terms(alpha: &AlphaTable, n_terms: usize) -> Result<()> {
    if n_terms > alpha.count() {
        Err(Error::AlphaTableTooShort {
            requested: n_terms,
            available: alpha.count(),
        })
    } else {
        Ok(())
    }
}

/// (−1)^n α_n e^{-πn} for n = 1..=n_terms.
fn bump_weights(alpha: &AlphaTable, n_terms: usize) -> Vec<f64> {
    alpha.values()[..n_terms]
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let n = (i + 1) as f64;
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * a * (-PI * n).exp()
        })
        .collect()
}

fn bump_series(t: f64, weights: &[f64], theta: &ThetaConfig) -> f64 {
    let mut num = 0.0;
    // Smallest bumps first.
    for (i, w) in weights.iter().enumerate().rev() {
        let center = 2.0 * (i + 1) as f64 * LATTICE_STEP;
        let (lo, hi) = (t - center, t + center);
        num += w * ((-0.5 * lo * lo).exp() + (-0.5 * hi * hi).exp());
    }
    num += (-0.5 * t * t).exp();
    num / theta.theta3(t * LATTICE_STEP).sqrt()
}

/// Unnormalized waveform from the Gaussian-bump series with `n_terms` bumps.
pub fn atom_raw(t: f64, alpha: &AlphaTable, n_terms: usize) -> Result<f64> {
    check_terms(alpha, n_terms)?;
    Ok(bump_series(
        t,
        &bump_weights(alpha, n_terms),
        &ThetaConfig::default(),
    ))
}

/// Unnormalized waveform from the cosh series
/// `[1 + 2Σ(−1)^n α_n e^{-πn−2πn²} cosh(2nt√π)] / (e^{t²/2} √θ3(t√π))`.
///
/// Falls back to [`atom_raw`] where `e^{t²/2}` or the cosh terms would
/// overflow.
pub fn atom_raw_cosh(t: f64, alpha: &AlphaTable, n_terms: usize) -> Result<f64> {
    check_terms(alpha, n_terms)?;
    let limit = 700.0;
    if 0.5 * t * t > limit || 2.0 * n_terms as f64 * t.abs() * LATTICE_STEP > limit {
        return atom_raw(t, alpha, n_terms);
    }
    let weights = bump_weights(alpha, n_terms);
    let sum: f64 = weights
        .iter()
        .enumerate()
        .rev()
        .map(|(i, w)| {
            let n = (i + 1) as f64;
            w * (-2.0 * PI * n * n).exp() * (2.0 * n * t * LATTICE_STEP).cosh()
        })
        .sum();
    let theta = ThetaConfig::default();
    Ok((1.0 + 2.0 * sum) / ((0.5 * t * t).exp() * theta.theta3(t * LATTICE_STEP).sqrt()))
}

/// The normalized base waveform. Immutable once built.
#[derive(Debug, Clone)]
pub struct Waveform {
    alpha: AlphaTable,
    n_terms: usize,
    norm_const: f64,
    weights: Vec<f64>,
    theta: ThetaConfig,
}

/// Half-width of the default normalization grid for `n_terms` bumps.
pub fn normalization_half_width(n_terms: usize) -> f64 {
    2.0 * (n_terms + 4) as f64 * LATTICE_STEP
}

/// Measures `∫ atom_raw(t)² dt` on `quad` and returns the waveform scaled to
/// unit energy.
pub fn build_waveform(alpha: AlphaTable, n_terms: usize, quad: &QuadratureSpec) -> Result<Waveform> {
    check_terms(&alpha, n_terms)?;
    let needed = normalization_half_width(n_terms);
    if quad.t_min() > -needed + 1e-9 || quad.t_max() < needed - 1e-9 {
        return Err(Error::Config(format!(
            "normalization grid [{}, {}] must cover |t| <= {needed:.4}",
            quad.t_min(),
            quad.t_max()
        )));
    }
    let theta = ThetaConfig::default();
    let weights = bump_weights(&alpha, n_terms);
    let energy = quad.dt()
        * (0..quad.len())
            .map(|k| bump_series(quad.time(k), &weights, &theta).powi(2))
            .sum::<f64>();
    let norm_const = energy.sqrt();
    if !(norm_const.is_finite() && norm_const > 0.0) {
        return Err(Error::Normalization(norm_const));
    }
    Ok(Waveform {
        alpha,
        n_terms,
        norm_const,
        weights,
        theta,
    })
}

impl Waveform {
    /// The default waveform: α_1..α_10 from 4096-point quadrature, eight
    /// bumps, normalized on `|t| ≤ 24√π` at `dt = √π/64`.
    pub fn standard() -> Self {
        Self::with_terms(DEFAULT_N_TERMS).expect("default waveform parameters are valid")
    }

    /// Default construction with `n_terms` bumps (at most 10).
    pub fn with_terms(n_terms: usize) -> Result<Self> {
        let alpha = compute_alpha(MAX_ALPHA_COUNT, DEFAULT_ALPHA_QUAD_POINTS)?;
        let quad = QuadratureSpec::symmetric(normalization_half_width(n_terms), 64)?;
        build_waveform(alpha, n_terms, &quad)
    }

    /// a(t), unit energy.
    pub fn eval(&self, t: f64) -> f64 {
        bump_series(t, &self.weights, &self.theta) / self.norm_const
    }

    pub fn alpha(&self) -> &AlphaTable {
        &self.alpha
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// `sqrt(∫ atom_raw²)`, the divisor applied by [`Waveform::eval`].
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }
}

/// Lattice atom `a_{m,n}(t) = e^{in√π(t + m√π/2)} a(t + m√π)`.
pub fn atom_mn(t: f64, m: i64, n: i64, w: &Waveform) -> Complex64 {
    let a = LATTICE_STEP;
    let shift = m as f64 * a;
    Complex64::cis(n as f64 * a * (t + 0.5 * shift)) * w.eval(t + shift)
}

/// Power of a(t) relative to a(0), in dB. Exact zeros give −∞.
pub fn attenuation_db(t: f64, w: &Waveform) -> f64 {
    let v = w.eval(t);
    if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * (v / w.eval(0.0)).abs().log10()
    }
}
