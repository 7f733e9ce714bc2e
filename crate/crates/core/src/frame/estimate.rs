//! Recovering the displacement (ξ, η) of an atom-like signal from its
//! lattice coefficients.

use num_complex::Complex64;

use super::{analyze, energy, synthesize, CoeffGrid};
use crate::error::{Error, Result};
use crate::signals::{sample, QuadratureSpec, SampledSignal, SignalSpec};
use crate::waveform::Waveform;
use crate::LATTICE_STEP;

/// Scores below this mean the input does not look like a displaced atom.
pub const MIN_SCORE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub xi: f64,
    pub eta: f64,
    /// Normalized correlation `|½Σ g·conj(C(ξ,η))| / √(E(g)·E(C))` at the
    /// optimum; 1 for an exactly displaced atom.
    pub score: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]` to within `tol`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// |⟨f̃, d_{ξ,η}⟩| with the displaced atom evaluated analytically, so ξ
/// need not lie on the grid. By the synthesis identity this equals
/// `|½Σ g·conj(C(ξ,η))|`.
fn overlap(reconstructed: &SampledSignal, w: &Waveform, xi: f64, eta: f64) -> f64 {
    reconstructed
        .samples()
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let t = reconstructed.time(k);
            z * Complex64::cis(-eta * (t + 0.5 * xi)) * w.eval(t + xi)
        })
        .sum::<Complex64>()
        .norm()
        * reconstructed.dt()
}

/// Finds the displacement (ξ, η) whose displaced atom best matches `g`.
///
/// A coarse scan at step √π/8 over one lattice cell around the coefficient
/// centroid is followed by alternating golden-section refinement along
/// each axis, down to `resolution`.
pub fn estimate_displacement(g: &CoeffGrid, w: &Waveform, resolution: f64) -> Result<Displacement> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::Argument(format!("resolution must be positive, got {resolution}")));
    }
    let total = energy(g);
    if total == 0.0 {
        return Err(Error::FlatCorrelation { score: 0.0 });
    }
    let (cx, cy) = g.iter().fold((0.0, 0.0), |(x, y), (m, n, z)| {
        let p = z.norm_sqr();
        (x + p * m as f64, y + p * n as f64)
    });
    let weight = 2.0 * total;
    let centroid = (cx / weight * LATTICE_STEP, cy / weight * LATTICE_STEP);

    let m_max = g.m_max().max(g.n_max());
    let base = QuadratureSpec::default_for(m_max);
    let pad = centroid.0.abs() + 2.0 * LATTICE_STEP;
    let quad = QuadratureSpec::new(base.t_min() - pad, base.t_max() + pad, base.dt())?;
    let reconstructed = synthesize(g, &quad, w);
    let objective = |xi: f64, eta: f64| overlap(&reconstructed, w, xi, eta);

    let step = LATTICE_STEP / 8.0;
    let mut best = (centroid.0, centroid.1, f64::NEG_INFINITY);
    for i in -8..=8 {
        for j in -8..=8 {
            let xi = centroid.0 + i as f64 * step;
            let eta = centroid.1 + j as f64 * step;
            let v = objective(xi, eta);
            if v > best.2 {
                best = (xi, eta, v);
            }
        }
    }

    let (mut xi, mut eta) = (best.0, best.1);
    let tol = resolution * 1e-2;
    let mut half = step;
    for _ in 0..6 {
        let new_xi = golden_max(|x| objective(x, eta), xi - half, xi + half, tol);
        let new_eta = golden_max(|y| objective(new_xi, y), eta - half, eta + half, tol);
        let moved = (new_xi - xi).abs().max((new_eta - eta).abs());
        xi = new_xi;
        eta = new_eta;
        if moved < tol {
            break;
        }
        half = (half / 2.0).max(4.0 * tol);
    }

    let displaced = sample(
        &SignalSpec::Displaced { xi, eta },
        &QuadratureSpec::new(base.t_min() - xi.abs(), base.t_max() + xi.abs(), base.dt())?,
        w,
    )?;
    let c = analyze(&displaced, g.m_max(), g.n_max(), w)?;
    let cross: Complex64 = g
        .values()
        .iter()
        .zip(c.values())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        * 0.5;
    let score = cross.norm() / (total * energy(&c)).sqrt();
    if score < MIN_SCORE {
        return Err(Error::FlatCorrelation { score });
    }
    Ok(Displacement { xi, eta, score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::ambiguity;

    #[test]
    fn golden_section_finds_a_parabola_peak() {
        let x = golden_max(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn self_match_scores_one() {
        let w = Waveform::standard();
        let g = ambiguity(0.0, 0.0, 6, 6, &w).unwrap().grid;
        let d = estimate_displacement(&g, &w, 1e-3).unwrap();
        assert!(d.xi.abs() < 1e-3 && d.eta.abs() < 1e-3, "{d:?}");
        assert!((d.score - 1.0).abs() < 1e-9, "{d:?}");
    }

    #[test]
    fn recovers_a_constructed_displacement() {
        let w = Waveform::standard();
        let (xi, eta) = (0.25 * LATTICE_STEP, 0.5 * LATTICE_STEP);
        let amb = ambiguity(xi, eta, 6, 6, &w).unwrap();
        let d = estimate_displacement(&amb.grid, &w, 1e-3).unwrap();
        assert!((d.xi - amb.xi).abs() < 1e-3, "{d:?}");
        assert!((d.eta - eta).abs() < 1e-3, "{d:?}");
        assert!(d.score > 1.0 - 1e-6);
    }

    #[test]
    fn hermite_four_is_not_atom_like() {
        let w = Waveform::standard();
        let f = sample(&SignalSpec::Hermite(4), &QuadratureSpec::default_for(8), &w).unwrap();
        let g = analyze(&f, 8, 8, &w).unwrap();
        match estimate_displacement(&g, &w, 1e-3) {
            Err(Error::FlatCorrelation { score }) => assert!(score < 0.5),
            other => panic!("expected flat correlation, got {other:?}"),
        }
    }

    #[test]
    fn zero_grid_is_flat() {
        let w = Waveform::standard();
        assert!(matches!(
            estimate_displacement(&CoeffGrid::zeros(2, 2), &w, 1e-3),
            Err(Error::FlatCorrelation { .. })
        ));
        assert!(estimate_displacement(&CoeffGrid::zeros(2, 2), &w, 0.0).is_err());
    }
}
