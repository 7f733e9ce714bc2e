//! Analysis and synthesis on the double-density lattice.
//!
//! The atoms `a_{m,n}` form a tight frame with bound 2: analysis followed by
//! synthesis with the factor ½ reproduces the signal, and `½Σ|f_{m,n}|²` is
//! its energy. Truncation to the rectangle |m| ≤ M, |n| ≤ N is hard; no
//! tapering or thresholding is applied.

mod estimate;
mod json;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signals::{displace, sample, QuadratureSpec, SampledSignal, SignalSpec};
use crate::waveform::{LatticeConstants, Waveform};
use crate::LATTICE_STEP;

pub use estimate::{estimate_displacement, Displacement};
pub use json::{read_coeff_json, write_coeff_json, CoeffFile};

/// Default truncation for unit-scale signals.
pub const DEFAULT_TRUNCATION: usize = 8;

/// Atom tail energy allowed beyond the grid edge.
const TAIL_LIMIT: f64 = 1e-12;

/// Complex amplitudes f_{m,n} over |m| ≤ M, |n| ≤ N, stored row-major with
/// m outer.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffGrid {
    m_max: usize,
    n_max: usize,
    values: Vec<Complex64>,
    lattice: LatticeConstants,
}

impl CoeffGrid {
    pub fn zeros(m_max: usize, n_max: usize) -> Self {
        Self {
            m_max,
            n_max,
            values: vec![Complex64::new(0.0, 0.0); (2 * m_max + 1) * (2 * n_max + 1)],
            lattice: LatticeConstants::STANDARD,
        }
    }

    /// Builds a grid from row-major values. Fails on a size mismatch or a
    /// non-finite entry.
    pub fn from_values(m_max: usize, n_max: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = (2 * m_max + 1) * (2 * n_max + 1);
        if values.len() != expected {
            return Err(Error::Format(format!(
                "coefficient grid M={m_max} N={n_max} needs {expected} entries, found {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Format("coefficient grid has non-finite entries".into()));
        }
        Ok(Self {
            m_max,
            n_max,
            values,
            lattice: LatticeConstants::STANDARD,
        })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn lattice(&self) -> LatticeConstants {
        self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn contains(&self, m: i64, n: i64) -> bool {
        m.unsigned_abs() as usize <= self.m_max && n.unsigned_abs() as usize <= self.n_max
    }

    fn index(&self, m: i64, n: i64) -> usize {
        let row = (m + self.m_max as i64) as usize;
        let col = (n + self.n_max as i64) as usize;
        row * (2 * self.n_max + 1) + col
    }

    /// f_{m,n}, or `None` outside the rectangle.
    pub fn get(&self, m: i64, n: i64) -> Option<Complex64> {
        self.contains(m, n).then(|| self.values[self.index(m, n)])
    }

    /// Sets f_{m,n}. Panics outside the rectangle.
    pub fn set(&mut self, m: i64, n: i64, value: Complex64) {
        assert!(self.contains(m, n), "site ({m}, {n}) outside the grid");
        let i = self.index(m, n);
        self.values[i] = value;
    }

    /// Sites in row-major order (m outer, n inner) with their amplitudes.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let (mm, nn) = (self.m_max as i64, self.n_max as i64);
        (-mm..=mm)
            .flat_map(move |m| (-nn..=nn).map(move |n| (m, n)))
            .zip(&self.values)
            .map(|((m, n), &z)| (m, n, z))
    }

    /// `½Σ|f_{m,n}|²` restricted to one parity class.
    pub fn sublattice_energy(&self, m_parity: i64, n_parity: i64) -> f64 {
        0.5 * self
            .iter()
            .filter(|(m, n, _)| m.rem_euclid(2) == m_parity && n.rem_euclid(2) == n_parity)
            .map(|(_, _, z)| z.norm_sqr())
            .sum::<f64>()
    }
}

/// `½Σ|f_{m,n}|²`.
pub fn energy(g: &CoeffGrid) -> f64 {
    0.5 * g.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Energy of a(t) beyond distance `margin` from its center, one side.
fn tail_energy(margin: f64, w: &Waveform) -> f64 {
    if margin <= 0.0 {
        return f64::INFINITY;
    }
    let step = LATTICE_STEP / 32.0;
    (0..32 * 30)
        .map(|k| w.eval(margin + k as f64 * step).powi(2))
        .sum::<f64>()
        * step
}

fn check_margin(f: &SampledSignal, m_max: usize, w: &Waveform) -> Result<()> {
    let reach = m_max as f64 * LATTICE_STEP;
    let margin = (-reach - f.t0()).min(f.t_max() - reach);
    let tail = tail_energy(margin, w);
    if tail > TAIL_LIMIT {
        return Err(Error::GridTooSmall {
            t_min: f.t0(),
            t_max: f.t_max(),
            m_max,
            margin,
            tail,
        });
    }
    Ok(())
}

/// `a(t_k + m√π)` on the grid of `f`.
fn shifted_waveform(f: &SampledSignal, m: i64, w: &Waveform) -> Vec<f64> {
    let shift = m as f64 * LATTICE_STEP;
    f.times().map(|t| w.eval(t + shift)).collect()
}

/// Coefficients `f_{m,n} = dt·Σ_k f(t_k) conj(a_{m,n}(t_k))` over the
/// rectangle |m| ≤ `m_max`, |n| ≤ `n_max`.
pub fn analyze(f: &SampledSignal, m_max: usize, n_max: usize, w: &Waveform) -> Result<CoeffGrid> {
    check_margin(f, m_max, w)?;
    let (mm, nn) = (m_max as i64, n_max as i64);
    let b = LATTICE_STEP;
    let rows: Vec<Vec<Complex64>> = (-mm..=mm)
        .into_par_iter()
        .map(|m| {
            let env = shifted_waveform(f, m, w);
            let half_shift = 0.5 * m as f64 * LATTICE_STEP;
            (-nn..=nn)
                .map(|n| {
                    let freq = n as f64 * b;
                    let sum: Complex64 = f
                        .samples()
                        .iter()
                        .zip(&env)
                        .enumerate()
                        .map(|(k, (z, a))| {
                            z * Complex64::cis(-freq * (f.time(k) + half_shift)) * a
                        })
                        .sum();
                    sum * f.dt()
                })
                .collect()
        })
        .collect();
    CoeffGrid::from_values(m_max, n_max, rows.into_iter().flatten().collect())
}

fn synthesize_like(g: &CoeffGrid, grid: &SampledSignal, w: &Waveform) -> SampledSignal {
    let (mm, nn) = (g.m_max as i64, g.n_max as i64);
    let rows: Vec<Vec<Complex64>> = (-mm..=mm)
        .into_par_iter()
        .map(|m| {
            let env = shifted_waveform(grid, m, w);
            let half_shift = 0.5 * m as f64 * LATTICE_STEP;
            let coeffs: Vec<Complex64> = (-nn..=nn).map(|n| g.get(m, n).unwrap()).collect();
            grid.times()
                .zip(&env)
                .map(|(t, a)| {
                    if *a == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let base = Complex64::cis(LATTICE_STEP * (t + half_shift));
                    // Σ_n f_{m,n} z^n with z = e^{i√π(t + m√π/2)}, via powers.
                    let mut acc = coeffs[nn as usize];
                    let (mut up, mut down) = (base, base.conj());
                    for n in 1..=nn as usize {
                        acc += coeffs[nn as usize + n] * up + coeffs[nn as usize - n] * down;
                        up *= base;
                        down *= base.conj();
                    }
                    acc * a
                })
                .collect()
        })
        .collect();
    let mut out = SampledSignal::zeros_like(grid).into_samples();
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += 0.5 * v;
        }
    }
    SampledSignal::new(grid.t0(), grid.dt(), out).expect("synthesis keeps the grid valid")
}

/// `f̃(t) = ½ Σ_{m,n} f_{m,n} a_{m,n}(t)` on `quad`.
pub fn synthesize(g: &CoeffGrid, quad: &QuadratureSpec, w: &Waveform) -> SampledSignal {
    let grid = quad.sample_fn(|_| Complex64::new(0.0, 0.0));
    synthesize_like(g, &grid, w)
}

/// `‖f − synthesize(analyze(f, M, N))‖` on the grid of `f`.
pub fn reconstruction_error(
    f: &SampledSignal,
    m_max: usize,
    n_max: usize,
    w: &Waveform,
) -> Result<f64> {
    let g = analyze(f, m_max, n_max, w)?;
    f.distance(&synthesize_like(&g, f, w))
}

/// Displacement-function coefficients together with the grid snap applied
/// to ξ.
#[derive(Debug, Clone)]
pub struct Ambiguity {
    pub grid: CoeffGrid,
    pub xi_requested: f64,
    /// ξ rounded to the nearest multiple of the analysis step.
    pub xi: f64,
    pub eta: f64,
}

/// `C_{m,n}(ξ, η)`: the coefficients of the standard atom displaced by
/// (ξ, η), i.e. `analyze(displace(a, ξ, η))`.
///
/// ξ is snapped to the analysis grid (`dt = √π/64`); the grid is widened by
/// |ξ| so the displaced atom keeps the default margin.
pub fn ambiguity(xi: f64, eta: f64, m_max: usize, n_max: usize, w: &Waveform) -> Result<Ambiguity> {
    if !(xi.is_finite() && eta.is_finite()) {
        return Err(Error::Argument(format!("non-finite displacement ({xi}, {eta})")));
    }
    let base = QuadratureSpec::default_for(m_max);
    let dt = base.dt();
    let snapped = (xi / dt).round() * dt;
    let quad = if snapped == 0.0 {
        base
    } else {
        QuadratureSpec::new(base.t_min() - snapped.abs(), base.t_max() + snapped.abs(), dt)?
    };
    let atom = sample(&SignalSpec::Atom, &quad, w)?;
    let shifted = displace(&atom, snapped, eta)?;
    Ok(Ambiguity {
        grid: analyze(&shifted, m_max, n_max, w)?,
        xi_requested: xi,
        xi: snapped,
        eta,
    })
}
