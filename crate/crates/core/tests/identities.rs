use std::f64::consts::PI;

use proptest::prelude::*;
use tflattice::verify::non_radius_diffs;
use tflattice::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn theta_is_pi_periodic_and_positive(x in -20.0f64..20.0) {
        prop_assert!((theta3(x + PI) - theta3(x)).abs() < 1e-13);
        prop_assert!((theta4(x + PI) - theta4(x)).abs() < 1e-13);
        prop_assert!(theta3(x) > 0.0 && theta4(x) > 0.0);
    }

    #[test]
    fn theta_half_period_shift_swaps_the_pair(x in -5.0f64..5.0) {
        prop_assert!((theta4(x + PI / 2.0) - theta3(x)).abs() < 1e-13);
    }
}

#[test]
fn series_forms_agree_on_a_fine_grid() {
    let w = Waveform::standard();
    for i in 0..=4000 {
        let t = -10.0 + 0.005 * i as f64;
        let d = atom_raw(t, w.alpha(), 8).unwrap() - atom_raw_cosh(t, w.alpha(), 8).unwrap();
        assert!(d.abs() < 1e-12, "t = {t}: {d}");
    }
}

#[test]
fn hermite_functions_are_orthonormal_with_parity() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(4);
    let u: Vec<_> = (0..=6)
        .map(|l| quad.sample_fn(|t| c(hermite_fn(l, t))))
        .collect();
    for (i, a) in u.iter().enumerate() {
        for (j, b) in u.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b).unwrap() - want).norm() < 1e-12, "<u{i}, u{j}>");
        }
    }
    // The grid is symmetric, so sample k mirrors sample len−1−k.
    for (l, s) in u.iter().enumerate() {
        let n = s.len();
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..n {
            assert!((s.samples()[n - 1 - k] - sign * s.samples()[k]).norm() < 1e-12);
        }
    }
    // Sampling through the spec language normalizes on the grid, and the
    // Hermite functions are already unit-energy there.
    let direct = sample(&SignalSpec::Hermite(3), &quad, &w).unwrap();
    assert!(direct.distance(&u[3]).unwrap() < 1e-12);
}

#[test]
fn hermite_functions_are_fourier_eigenfunctions() {
    let quad = QuadratureSpec::default_for(4);
    for l in 0..=6u32 {
        let u = quad.sample_fn(|t| c(hermite_fn(l, t)));
        let ft = fourier_transform(&u, &quad);
        assert!(ft.edge_decay_ok);
        // F u_l = (−i)^l u_l with the e^{−iωt} kernel.
        let eig = Complex64::new(0.0, -1.0).powu(l);
        assert!(ft.signal.distance(&u.scale(eig)).unwrap() < 1e-10, "l = {l}");
    }
}

#[test]
fn energy_identity_for_the_catalog() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(10);
    for spec in ["atom", "gaussian", "monocycle", "hermite:2", "hermite:3", "hermite:4"] {
        let f = sample(&spec.parse().unwrap(), &quad, &w).unwrap();
        let e = energy(&analyze(&f, 10, 10, &w).unwrap());
        assert!((e - 1.0).abs() < 1e-6, "{spec}: {e}");
    }
}

#[test]
fn partial_energies_never_decrease() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(8);
    let f = sample(&SignalSpec::Hermite(2), &quad, &w).unwrap();
    let mut last = 0.0;
    for m in 0..=8 {
        for n in [m, m + 1].into_iter().filter(|&n| n <= 8) {
            let e = energy(&analyze(&f, m, n, &w).unwrap());
            assert!(e >= last - 1e-15, "M = {m}, N = {n}");
            assert!(e <= 1.0 + 1e-6);
            last = e;
        }
    }
}

#[test]
fn analysis_is_linear() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(6);
    let f = sample(&SignalSpec::Hermite(1), &quad, &w).unwrap();
    let g = sample(&SignalSpec::Displaced { xi: LATTICE_STEP, eta: 0.3 }, &quad, &w).unwrap();
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
    let combo = f.scale(a).add(&g.scale(b)).unwrap();
    let lhs = analyze(&combo, 6, 6, &w).unwrap();
    let (gf, gg) = (analyze(&f, 6, 6, &w).unwrap(), analyze(&g, 6, 6, &w).unwrap());
    for ((x, y), z) in lhs.values().iter().zip(gf.values()).zip(gg.values()) {
        assert!((x - (a * y + b * z)).norm() < 1e-13);
    }
}

#[test]
fn fourier_transform_rotates_the_lattice() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(8);
    for spec in ["gaussian", "hermite:2", "atom", "hermite:1"] {
        let f = sample(&spec.parse().unwrap(), &quad, &w).unwrap();
        let ft = fourier_transform(&f, &quad).signal;
        let (g, gt) = (analyze(&f, 8, 8, &w).unwrap(), analyze(&ft, 8, 8, &w).unwrap());
        for (m, n, z) in gt.iter() {
            assert!((z - g.get(n, -m).unwrap()).norm() < 1e-8, "{spec} ({m}, {n})");
        }
    }
}

#[test]
fn hermite_magnitudes_have_quarter_turn_symmetry() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(8);
    for l in 0..=5 {
        let g = analyze(&sample(&SignalSpec::Hermite(l), &quad, &w).unwrap(), 8, 8, &w).unwrap();
        for (m, n, z) in g.iter() {
            assert!((z.norm() - g.get(-n, m).unwrap().norm()).abs() < 1e-8);
        }
    }
}

#[test]
fn lattice_displacement_shifts_magnitudes() {
    let w = Waveform::standard();
    let base = ambiguity(0.0, 0.0, 8, 8, &w).unwrap().grid;
    for (m0, n0) in [(1, 0), (0, 1), (-1, 1)] {
        let amb = ambiguity(2.0 * m0 as f64 * LATTICE_STEP, 2.0 * n0 as f64 * LATTICE_STEP, 8, 8, &w)
            .unwrap();
        for (m, n, z) in amb.grid.iter() {
            if let Some(b) = base.get(m - 2 * m0, n - 2 * n0) {
                assert!((z.norm() - b.norm()).abs() < 1e-8, "({m0}, {n0}) at ({m}, {n})");
            }
        }
    }
}

#[test]
fn displaced_atom_matches_lattice_atom() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(4);
    let atom = quad.sample_fn(|t| c(w.eval(t)));
    let d = displace(&atom, LATTICE_STEP, LATTICE_STEP).unwrap();
    let direct = quad.sample_fn(|t| atom_mn(t, 1, 1, &w));
    let inner = quad.len() - 64;
    for k in 0..inner {
        assert!((d.samples()[k] - direct.samples()[k]).norm() < 1e-12);
    }
}

#[test]
fn truncated_waveforms_converge_rapidly() {
    let full = Waveform::standard();
    let quad = QuadratureSpec::default_for(8);
    let gap = |k: usize| {
        let w = Waveform::with_terms(k).unwrap();
        (0..quad.len())
            .map(|i| (w.eval(quad.time(i)) - full.eval(quad.time(i))).abs())
            .fold(0.0, f64::max)
    };
    let (g3, g5) = (gap(3), gap(5));
    assert!(g5 < 5e-7, "{g5}");
    assert!(g3 > 10.0 * g5);
}

#[test]
fn attenuation_envelope_is_linear_not_parabolic() {
    use tflattice::verify::{gaussian_db, lobe_peaks};
    let w = Waveform::standard();
    let peaks = lobe_peaks(&w, 1..=6);
    // Slope between successive peaks is nearly constant: roughly
    // −20·log10(e^π)/(2√π) dB per unit time.
    let slopes: Vec<f64> = peaks
        .windows(2)
        .map(|p| (p[1].1 - p[0].1) / (p[1].0 - p[0].0))
        .collect();
    let predicted = -20.0 * PI * std::f64::consts::LOG10_E / (2.0 * LATTICE_STEP);
    for s in &slopes[1..] {
        assert!((s / predicted - 1.0).abs() < 0.1, "{slopes:?} vs {predicted}");
    }
    // The Gaussian's slope keeps steepening over the same points.
    let g: Vec<f64> = peaks
        .windows(2)
        .map(|p| (gaussian_db(p[1].0) - gaussian_db(p[0].0)) / (p[1].0 - p[0].0))
        .collect();
    assert!(g.windows(2).all(|x| x[1] < x[0] - 5.0));
}

#[test]
fn magnification_only_changes_radii() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(4);
    let diff = sample(&"diff:atom,gaussian".parse().unwrap(), &quad, &w).unwrap();
    let g = analyze(&diff, 4, 4, &w).unwrap();
    let plain = render_grid(&g, &RenderStyle::default()).unwrap();
    let big = render_grid(&g, &RenderStyle { magnify: 30.0, ..RenderStyle::default() }).unwrap();
    assert_eq!(plain.elements, big.elements);
    assert_eq!(non_radius_diffs(&plain.text, &big.text), 0);
    assert_ne!(plain.text, big.text);
}

#[test]
fn global_phase_rotates_every_marker() {
    let w = Waveform::standard();
    let quad = QuadratureSpec::default_for(4);
    let f = sample(&SignalSpec::Monocycle, &quad, &w).unwrap();
    let g = analyze(&f, 4, 4, &w).unwrap();
    let turned = analyze(&f.scale(Complex64::cis(PI / 2.0)), 4, 4, &w).unwrap();
    for ((_, _, a), (_, _, b)) in g.iter().zip(turned.iter()) {
        if a.norm() > 1e-4 {
            let delta = (b.arg() - a.arg()).rem_euclid(2.0 * PI);
            assert!((delta - PI / 2.0).abs() < 1e-9);
        }
    }
    let svg = render_grid(&turned, &RenderStyle::default()).unwrap();
    assert_eq!(svg.elements, render_grid(&g, &RenderStyle::default()).unwrap().elements);
}

#[test]
fn monocycle_plot_has_empty_centre() {
    let w = Waveform::standard();
    let f = sample(&SignalSpec::Monocycle, &QuadratureSpec::default_for(4), &w).unwrap();
    let g = analyze(&f, 4, 4, &w).unwrap();
    let svg = render_grid(&g, &RenderStyle::default()).unwrap().text;
    // Origin cell centre is (220, 220); (0, 1) sits one cell above it.
    assert!(!svg.contains("translate(220 220)"));
    assert!(svg.contains("translate(220 180)"));
}
