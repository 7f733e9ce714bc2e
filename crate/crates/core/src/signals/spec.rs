use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use super::{hermite_fn, read_signal_csv, QuadratureSpec, SampledSignal};
use crate::error::{Error, Result};
use crate::waveform::Waveform;

/// A signal description in the CLI mini-language:
/// `atom`, `gaussian`, `monocycle`, `hermite:L`, `displaced:XI,ETA`,
/// `diff:SPEC_A,SPEC_B`, `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    /// The base waveform a(t).
    Atom,
    /// u_0, the unit-energy Gaussian.
    Gaussian,
    /// u_1, the Gaussian monocycle.
    Monocycle,
    Hermite(u32),
    /// `e^{iη(t+ξ/2)} a(t+ξ)`.
    Displaced { xi: f64, eta: f64 },
    File(PathBuf),
    /// Normalized difference of the two normalized operands.
    Diff(Box<SignalSpec>, Box<SignalSpec>),
}

impl SignalSpec {
    fn invalid(spec: &str, reason: impl Into<String>) -> Error {
        Error::SignalSpec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }

    fn analytic(&self, w: &Waveform, t: f64) -> Option<Complex64> {
        let real = |v: f64| Some(Complex64::new(v, 0.0));
        match *self {
            SignalSpec::Atom => real(w.eval(t)),
            SignalSpec::Gaussian => real(hermite_fn(0, t)),
            SignalSpec::Monocycle => real(hermite_fn(1, t)),
            SignalSpec::Hermite(l) => real(hermite_fn(l, t)),
            SignalSpec::Displaced { xi, eta } => {
                Some(Complex64::cis(eta * (t + 0.5 * xi)) * w.eval(t + xi))
            }
            SignalSpec::File(_) | SignalSpec::Diff(..) => None,
        }
    }

    fn contains_file(&self) -> Option<&PathBuf> {
        match self {
            SignalSpec::File(p) => Some(p),
            SignalSpec::Diff(a, b) => a.contains_file().or_else(|| b.contains_file()),
            _ => None,
        }
    }
}

impl FromStr for SignalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let no_arg = |spec: SignalSpec| match arg {
            None => Ok(spec),
            Some(_) => Err(Self::invalid(s, format!("`{kind}` takes no parameters"))),
        };
        match kind {
            "atom" => no_arg(SignalSpec::Atom),
            "gaussian" => no_arg(SignalSpec::Gaussian),
            "monocycle" => no_arg(SignalSpec::Monocycle),
            "hermite" => {
                let arg = arg.ok_or_else(|| Self::invalid(s, "expected hermite:L"))?;
                arg.trim()
                    .parse()
                    .map(SignalSpec::Hermite)
                    .map_err(|_| Self::invalid(s, "order must be a non-negative integer"))
            }
            "displaced" => {
                let arg = arg.ok_or_else(|| Self::invalid(s, "expected displaced:XI,ETA"))?;
                let parts: Vec<_> = arg.split(',').map(str::trim).collect();
                let nums: Vec<f64> = parts
                    .iter()
                    .map(|p| p.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Self::invalid(s, "expected two numbers XI,ETA"))?;
                match nums[..] {
                    [xi, eta] if xi.is_finite() && eta.is_finite() => {
                        Ok(SignalSpec::Displaced { xi, eta })
                    }
                    _ => Err(Self::invalid(s, "expected two finite numbers XI,ETA")),
                }
            }
            "file" => match arg {
                Some(p) if !p.is_empty() => Ok(SignalSpec::File(PathBuf::from(p))),
                _ => Err(Self::invalid(s, "expected file:PATH")),
            },
            "diff" => {
                let arg = arg.ok_or_else(|| Self::invalid(s, "expected diff:SPEC_A,SPEC_B"))?;
                // Operands may themselves contain commas; take the first split
                // at which both halves parse.
                arg.match_indices(',')
                    .find_map(|(i, _)| {
                        let a = arg[..i].parse::<SignalSpec>().ok()?;
                        let b = arg[i + 1..].parse::<SignalSpec>().ok()?;
                        Some(SignalSpec::Diff(Box::new(a), Box::new(b)))
                    })
                    .ok_or_else(|| Self::invalid(s, "could not split into two valid operands"))
            }
            other => Err(Self::invalid(s, format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSpec::Atom => f.write_str("atom"),
            SignalSpec::Gaussian => f.write_str("gaussian"),
            SignalSpec::Monocycle => f.write_str("monocycle"),
            SignalSpec::Hermite(l) => write!(f, "hermite:{l}"),
            SignalSpec::Displaced { xi, eta } => write!(f, "displaced:{xi},{eta}"),
            SignalSpec::File(p) => write!(f, "file:{}", p.display()),
            SignalSpec::Diff(a, b) => write!(f, "diff:{a},{b}"),
        }
    }
}

/// Grid on which to evaluate analytic specs.
#[derive(Clone, Copy)]
struct Grid {
    t0: f64,
    dt: f64,
    len: usize,
}

impl From<&QuadratureSpec> for Grid {
    fn from(q: &QuadratureSpec) -> Self {
        Grid {
            t0: q.t_min(),
            dt: q.dt(),
            len: q.len(),
        }
    }
}

impl From<&SampledSignal> for Grid {
    fn from(s: &SampledSignal) -> Self {
        Grid {
            t0: s.t0(),
            dt: s.dt(),
            len: s.len(),
        }
    }
}

/// Resolves `spec` on `quad`.
///
/// Analytic kinds are normalized to unit energy on the grid. A `file`
/// operand brings its own grid, which then also hosts any analytic operand
/// of an enclosing `diff`.
pub fn sample(spec: &SignalSpec, quad: &QuadratureSpec, w: &Waveform) -> Result<SampledSignal> {
    let grid = match spec.contains_file() {
        Some(path) => Grid::from(&read_signal_csv(path)?),
        None => Grid::from(quad),
    };
    sample_on(spec, grid, w)
}

fn sample_on(spec: &SignalSpec, grid: Grid, w: &Waveform) -> Result<SampledSignal> {
    match spec {
        SignalSpec::File(path) => {
            let s = read_signal_csv(path)?;
            if Grid::from(&s).len != grid.len || s.t0() != grid.t0 || s.dt() != grid.dt {
                return Err(SignalSpec::invalid(
                    &spec.to_string(),
                    "file grid differs from the other operand's grid",
                ));
            }
            Ok(s)
        }
        SignalSpec::Diff(a, b) => {
            let a = sample_on(a, grid, w)?.normalized()?;
            let b = sample_on(b, grid, w)?.normalized()?;
            a.sub(&b)?.normalized().map_err(|_| {
                SignalSpec::invalid(&spec.to_string(), "operands coincide; difference is zero")
            })
        }
        analytic => {
            let samples = (0..grid.len)
                .map(|k| {
                    let t = grid.t0 + k as f64 * grid.dt;
                    analytic.analytic(w, t).expect("analytic kind")
                })
                .collect();
            SampledSignal::new(grid.t0, grid.dt, samples)?
                .normalized()
                .map_err(|e| SignalSpec::invalid(&spec.to_string(), e.to_string()))
        }
    }
}
