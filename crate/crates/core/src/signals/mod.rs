//! Sampled signals, the lattice operators, and the unitary Fourier transform.
//!
//! Translation `T_a: f(t) → f(t + a)` is an exact index shift, so the grid
//! step must divide every shift. Modulation `T_b: f(t) → e^{ibt} f(t)` is a
//! pointwise phase. With a = b = √π the two anticommute.

mod hermite;
mod io;
mod spec;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::LATTICE_STEP;

pub use hermite::{hermite_fn, hermite_poly};
pub use io::{read_signal_csv, write_signal_csv};
pub use spec::{sample, SignalSpec};

/// Samples per lattice step on the default grid.
pub const DEFAULT_SAMPLES_PER_STEP: usize = 64;

/// Lattice steps of padding beyond the outermost analyzed atom.
pub const DEFAULT_MARGIN_STEPS: usize = 10;

const ALIGN_TOL: f64 = 1e-9;

/// A uniform time grid whose step divides the lattice step √π.
///
/// Endpoints are snapped outward to multiples of `dt`, so every lattice
/// site `m√π` is itself a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    first: i64,
    last: i64,
    dt: f64,
}

impl QuadratureSpec {
    pub fn new(t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid needs finite bounds and a positive step, got [{t_min}, {t_max}] dt={dt}"
            )));
        }
        let per_step = LATTICE_STEP / dt;
        let k = per_step.round();
        if (per_step - k).abs() > ALIGN_TOL * per_step || k < 32.0 {
            return Err(Error::Config(format!(
                "grid step {dt} must equal √π/K for an integer K >= 32 (got K = {per_step:.6})"
            )));
        }
        let dt = LATTICE_STEP / k;
        let first = (t_min / dt - ALIGN_TOL).floor() as i64;
        let last = (t_max / dt + ALIGN_TOL).ceil() as i64;
        if last - first < 1 {
            return Err(Error::Config(format!("empty grid [{t_min}, {t_max}]")));
        }
        Ok(Self { first, last, dt })
    }

    /// The symmetric grid `[-half_width, half_width]` with `per_step`
    /// samples per lattice step.
    pub fn symmetric(half_width: f64, per_step: usize) -> Result<Self> {
        Self::new(-half_width, half_width, LATTICE_STEP / per_step as f64)
    }

    /// Default grid for analysis with |m| ≤ `m_max`:
    /// `t ∈ [-(m_max+10)√π, (m_max+10)√π]`, `dt = √π/64`.
    pub fn default_for(m_max: usize) -> Self {
        let half_steps = (m_max + DEFAULT_MARGIN_STEPS) as i64;
        let per_step = DEFAULT_SAMPLES_PER_STEP as i64;
        Self {
            first: -half_steps * per_step,
            last: half_steps * per_step,
            dt: LATTICE_STEP / per_step as f64,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_min(&self) -> f64 {
        self.first as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.last as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        (self.last - self.first + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        (self.first + k as i64) as f64 * self.dt
    }

    /// Samples `f` on the grid.
    pub fn sample_fn(&self, f: impl Fn(f64) -> Complex64 + Sync) -> SampledSignal {
        let samples = (0..self.len())
            .into_par_iter()
            .map(|k| f(self.time(k)))
            .collect();
        SampledSignal {
            t0: self.t_min(),
            dt: self.dt,
            samples,
        }
    }
}

/// A complex time series on a uniform grid `t_k = t0 + k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    t0: f64,
    dt: f64,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(t0: f64, dt: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return Err(Error::Format(format!("bad grid t0={t0} dt={dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Format(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Format("signal contains non-finite samples".into()));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn zeros_like(other: &SampledSignal) -> Self {
        Self {
            t0: other.t0,
            dt: other.dt,
            samples: vec![Complex64::new(0.0, 0.0); other.len()],
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    /// Same grid as `other` (bitwise start and step, equal length).
    pub fn same_grid(&self, other: &SampledSignal) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }

    /// `dt·Σ|f_k|²`.
    pub fn energy(&self) -> f64 {
        self.dt * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `dt·Σ f_k conj(g_k)`.
    pub fn inner(&self, other: &SampledSignal) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(f, g)| f * g.conj())
            .sum::<Complex64>()
            * self.dt)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|_, z| z * factor)
    }

    pub fn add(&self, other: &SampledSignal) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.map(|k, z| z + other.samples[k]))
    }

    pub fn sub(&self, other: &SampledSignal) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.map(|k, z| z - other.samples[k]))
    }

    /// L² distance `‖self − other‖`.
    pub fn distance(&self, other: &SampledSignal) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Rescales to unit energy. Fails on a (numerically) zero signal.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 1e-150 && norm.is_finite()) {
            return Err(Error::Argument(format!(
                "cannot normalize a signal of norm {norm:e}"
            )));
        }
        Ok(self.scale(Complex64::new(norm.recip(), 0.0)))
    }

    fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(k, &z)| f(k, z))
                .collect(),
        }
    }

    fn check_grid(&self, other: &SampledSignal) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "grid mismatch: ({}, {}, {}) vs ({}, {}, {})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.len()
            )))
        }
    }
}

/// Converts `shift` to a whole number of grid steps.
fn shift_steps(shift: f64, dt: f64) -> Result<i64> {
    let ratio = shift / dt;
    let k = ratio.round();
    if !ratio.is_finite() || (ratio - k).abs() > ALIGN_TOL * ratio.abs().max(1.0) {
        return Err(Error::Misaligned { shift, dt });
    }
    Ok(k as i64)
}

/// `f(t) → f(t + shift)` as an exact index shift. Samples entering the
/// window are zero.
pub fn translate(s: &SampledSignal, shift: f64) -> Result<SampledSignal> {
    let steps = shift_steps(shift, s.dt)?;
    let len = s.len() as i64;
    let zero = Complex64::new(0.0, 0.0);
    let samples = (0..len)
        .map(|k| {
            let src = k + steps;
            if (0..len).contains(&src) {
                s.samples[src as usize]
            } else {
                zero
            }
        })
        .collect();
    Ok(SampledSignal {
        t0: s.t0,
        dt: s.dt,
        samples,
    })
}

/// `f(t) → e^{i·freq·t} f(t)`.
pub fn modulate(s: &SampledSignal, freq: f64) -> SampledSignal {
    s.map(|k, z| z * Complex64::cis(freq * s.time(k)))
}

/// `f(t) → e^{iη(t + ξ/2)} f(t + ξ)`: translation followed by modulation
/// with the symmetric half-shift phase.
pub fn displace(s: &SampledSignal, xi: f64, eta: f64) -> Result<SampledSignal> {
    let shifted = translate(s, xi)?;
    Ok(shifted.map(|k, z| z * Complex64::cis(eta * (s.time(k) + 0.5 * xi))))
}

/// A Fourier transform together with its edge-decay diagnostic.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub signal: SampledSignal,
    /// Whether the input fell below 1e-12 at both grid edges, the condition
    /// under which the truncated integral is faithful.
    pub edge_decay_ok: bool,
}

/// Unitary Fourier transform `ĝ(ω) = (2π)^{-1/2} ∫ f(t) e^{-iωt} dt`,
/// evaluated by the trapezoidal rule at each ω of `out_grid`.
pub fn fourier_transform(s: &SampledSignal, out_grid: &QuadratureSpec) -> Transformed {
    let edge_decay_ok = s.samples[0].norm() < 1e-12 && s.samples[s.len() - 1].norm() < 1e-12;
    let last = s.len() - 1;
    let weight = s.dt / (2.0 * PI).sqrt();
    let samples = (0..out_grid.len())
        .into_par_iter()
        .map(|j| {
            let omega = out_grid.time(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, f) in s.samples.iter().enumerate() {
                let term = f * Complex64::cis(-omega * s.time(k));
                acc += if k == 0 || k == last { 0.5 * term } else { term };
            }
            acc * weight
        })
        .collect();
    Transformed {
        signal: SampledSignal {
            t0: out_grid.t_min(),
            dt: out_grid.dt(),
            samples,
        },
        edge_decay_ok,
    }
}
