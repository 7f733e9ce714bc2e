//! Lemniscatic Jacobi theta functions and the structure constants α_n.
//!
//! Only the real-line, nome `q = e^{-π}` case is supported:
//!
//! ```text
//! θ3(x) = 1 + 2 Σ_{n≥1} e^{-πn²} cos(2nx)
//! θ4(x) = θ3(x + π/2)
//! 1/√θ4(z) = c₀ (1 + 2 Σ_{n≥1} α_n e^{-πn} cos(2nz))
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of retained theta series terms.
pub const MAX_SERIES_ORDER: usize = 16;

/// Default number of theta series terms; e^{-64π} is far below f64 resolution.
pub const DEFAULT_SERIES_ORDER: usize = 8;

/// Largest α table `compute_alpha` will produce.
///
/// The coefficient c_n ∝ e^{-πn} is extracted from O(1) samples, so f64
/// rounding limits the relative accuracy of α_n to roughly `e^{πn}·1e-18`:
/// about 1e-6 at n = 8, 1e-2 at n = 10, and meaningless beyond 11.
pub const MAX_ALPHA_COUNT: usize = 10;

/// Evaluation parameters for the lemniscatic theta series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaConfig {
    nome: f64,
    series_order: usize,
    weights: [f64; MAX_SERIES_ORDER],
}

impl ThetaConfig {
    pub fn new(series_order: usize) -> Result<Self> {
        if !(4..=MAX_SERIES_ORDER).contains(&series_order) {
            return Err(Error::Config(format!(
                "theta series order must be in 4..={MAX_SERIES_ORDER}, got {series_order}"
            )));
        }
        let mut weights = [0.0; MAX_SERIES_ORDER];
        for (i, w) in weights.iter_mut().enumerate().take(series_order) {
            let n = (i + 1) as f64;
            *w = (-PI * n * n).exp();
        }
        Ok(Self {
            nome: (-PI).exp(),
            series_order,
            weights,
        })
    }

    /// The nome q = e^{-π}.
    pub fn nome(&self) -> f64 {
        self.nome
    }

    pub fn series_order(&self) -> usize {
        self.series_order
    }

    pub fn theta3(&self, x: f64) -> f64 {
        // cos(2nx) by the Chebyshev recurrence; the weights e^{-πn²} swamp
        // its slow error growth long before it matters.
        let c1 = (2.0 * x).cos();
        let (mut prev, mut cur) = (1.0, c1);
        let mut sum = 0.0;
        for &w in &self.weights[..self.series_order] {
            sum += w * cur;
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
        }
        1.0 + 2.0 * sum
    }

    pub fn theta4(&self, x: f64) -> f64 {
        self.theta3(x + FRAC_PI_2)
    }
}

impl Default for ThetaConfig {
    fn default() -> Self {
        Self::new(DEFAULT_SERIES_ORDER).expect("default series order is valid")
    }
}

/// θ3(x) with the default series order.
pub fn theta3(x: f64) -> f64 {
    ThetaConfig::default().theta3(x)
}

/// θ4(x) = θ3(x + π/2) with the default series order.
pub fn theta4(x: f64) -> f64 {
    ThetaConfig::default().theta4(x)
}

/// Structure constants α_1..α_K of the time-frequency lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    values: Vec<f64>,
    /// Cosine mean c₀ of 1/√θ4 over one period.
    mean: f64,
    quad_points: usize,
}

impl AlphaTable {
    /// α_1..α_K; index 0 holds α_1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// α_n for 1-based `n`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// The constant c₀ fixing the proportionality of the α expansion.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    /// Evaluates `c₀ (1 + 2 Σ α_n e^{-πn} cos(2nz))`, which approximates
    /// 1/√θ4(z) to within the dropped tail.
    pub fn inv_sqrt_theta4(&self, z: f64) -> f64 {
        let tail: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let n = (i + 1) as f64;
                a * (-PI * n).exp() * (2.0 * n * z).cos()
            })
            .sum();
        self.mean * (1.0 + 2.0 * tail)
    }
}

/// Computes α_1..α_count from the cosine-Fourier coefficients of 1/√θ4.
///
/// The coefficients are measured by the periodic trapezoidal rule with
/// `quad_points` nodes on [0, π), which converges spectrally for this
/// analytic integrand:
///
/// ```text
/// c₀ = (1/π)∫₀^π g,  c_n = (2/π)∫₀^π g(z) cos(2nz) dz,  α_n = e^{πn} c_n / (2c₀)
/// ```
/// Neumaier summation. Partial sums of the cosine-weighted samples swing
/// far above the final coefficient, and plain summation loses those digits.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + carry
}

pub fn compute_alpha(count: usize, quad_points: usize) -> Result<AlphaTable> {
    if count == 0 || count > MAX_ALPHA_COUNT {
        return Err(Error::Config(format!(
            "alpha count must be in 1..={MAX_ALPHA_COUNT}, got {count}"
        )));
    }
    if quad_points < 64 * count {
        return Err(Error::Config(format!(
            "quad_points must be at least 64·count = {}, got {quad_points}",
            64 * count
        )));
    }

    let theta = ThetaConfig::default();
    let step = PI / quad_points as f64;
    let samples = (0..quad_points)
        .map(|j| {
            let z = j as f64 * step;
            let value = theta.theta4(z);
            if value > 0.0 && value.is_finite() {
                Ok(value.sqrt().recip())
            } else {
                Err(Error::NonPositiveTheta { x: z, value })
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    let q = quad_points as f64;
    let mean = compensated_sum(samples.iter().copied()) / q;
    let values = (1..=count)
        .map(|n| {
            // 2n·z_j = 2π·(n·j mod Q)/Q, reduced exactly in integers.
            let coeff = compensated_sum(samples.iter().enumerate().map(|(j, g)| {
                let r = (n * j) % quad_points;
                g * (2.0 * PI * r as f64 / q).cos()
            })) * 2.0
                / q;
            (PI * n as f64).exp() * coeff / (2.0 * mean)
        })
        .collect();

    Ok(AlphaTable {
        values,
        mean,
        quad_points,
    })
}
