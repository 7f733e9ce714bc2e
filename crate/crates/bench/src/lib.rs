//! Shared fixtures for the criterion benchmarks.

use tflattice::{analyze, sample, CoeffGrid, QuadratureSpec, SampledSignal, SignalSpec, Waveform};

/// A unit-energy signal on the default grid for truncation `m_max`,
/// with the waveform used to build it.
pub struct Fixture {
    pub waveform: Waveform,
    pub quad: QuadratureSpec,
    pub signal: SampledSignal,
    pub coeffs: CoeffGrid,
}

pub fn fixture(spec: &str, m_max: usize) -> Fixture {
    let waveform = Waveform::standard();
    let quad = QuadratureSpec::default_for(m_max);
    let spec: SignalSpec = spec.parse().expect("valid signal spec");
    let signal = sample(&spec, &quad, &waveform).expect("sampling succeeds");
    let coeffs = analyze(&signal, m_max, m_max, &waveform).expect("grid is large enough");
    Fixture {
        waveform,
        quad,
        signal,
        coeffs,
    }
}
