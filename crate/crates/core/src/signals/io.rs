//! Signal CSV: optional `#` comment lines, a `t,re,im` header (`im` may be
//! omitted on read), and rows on a strictly uniform time grid.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::SampledSignal;
use crate::error::{Error, Result};
use crate::LATTICE_STEP;

const SPACING_TOL: f64 = 1e-9;

pub fn read_signal_csv(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_signal_csv(file).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub(crate) fn parse_signal_csv(input: impl Read) -> Result<SampledSignal> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_im = match names[..] {
        ["t", "re"] => false,
        ["t", "re", "im"] => true,
        _ => {
            return Err(Error::Format(format!(
                "expected header `t,re,im` or `t,re`, found `{}`",
                names.join(",")
            )))
        }
    };

    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            let text = record.get(i).unwrap_or("");
            text.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::Format(format!("row {}: bad number `{text}` in column {}", row + 1, i + 1))
                })
        };
        if record.len() != names.len() {
            return Err(Error::Format(format!(
                "row {}: expected {} fields, found {}",
                row + 1,
                names.len(),
                record.len()
            )));
        }
        times.push(field(0)?);
        let im = if has_im { field(2)? } else { 0.0 };
        samples.push(Complex64::new(field(1)?, im));
    }

    if times.len() < 2 {
        return Err(Error::Format(format!(
            "need at least 2 rows, found {}",
            times.len()
        )));
    }
    let t0 = times[0];
    let mut dt = (times[times.len() - 1] - t0) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Format("time column must be increasing".into()));
    }
    // Recover the exact lattice-aligned step lost to decimal round trips.
    let per_step = (LATTICE_STEP / dt).round();
    if per_step >= 1.0 && (LATTICE_STEP / per_step - dt).abs() <= SPACING_TOL * dt {
        dt = LATTICE_STEP / per_step;
    }
    for (k, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if (step - dt).abs() > SPACING_TOL * dt {
            return Err(Error::Format(format!(
                "non-uniform spacing at row {}: step {step} vs mean {dt}",
                k + 2
            )));
        }
    }
    SampledSignal::new(t0, dt, samples)
}

/// Writes `s` as CSV, preceded by one `# ` line per entry of `comments`.
/// Numbers use the shortest representation that round-trips exactly.
pub fn write_signal_csv(mut out: impl Write, s: &SampledSignal, comments: &[String]) -> Result<()> {
    let io = |source| Error::Io {
        path: "<output>".into(),
        source,
    };
    for line in comments {
        writeln!(out, "# {line}").map_err(io)?;
    }
    writeln!(out, "t,re,im").map_err(io)?;
    for (t, z) in s.times().zip(s.samples()) {
        writeln!(out, "{t},{},{}", z.re, z.im).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_optional_imaginary_column() {
        let s = parse_signal_csv("t,re\n0,1\n0.5,2\n1.0,3\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.samples()[2], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn lattice_steps_are_recovered_exactly() {
        let dt = LATTICE_STEP / 64.0;
        let text: String = (0..200).fold("t,re\n".into(), |acc, k| {
            acc + &format!("{},0\n", -3.0 * LATTICE_STEP + k as f64 * dt)
        });
        assert_eq!(parse_signal_csv(text.as_bytes()).unwrap().dt(), dt);
    }

    #[test]
    fn skips_comment_lines() {
        let s = parse_signal_csv("# made by hand\nt,re,im\n0,1,2\n1,3,4\n".as_bytes()).unwrap();
        assert_eq!(s.samples()[1], Complex64::new(3.0, 4.0));
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "time,value\n0,1\n1,2\n",
            "t,re,im\n0,1,0\n",
            "t,re,im\n0,1,0\n1,x,0\n",
            "t,re,im\n0,1,0\n1,1\n",
            "t,re\n0,1\n1,1\n2.5,1\n",
            "t,re\n1,1\n0,1\n",
        ] {
            assert!(
                matches!(parse_signal_csv(text.as_bytes()), Err(Error::Format(_))),
                "{text:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            t0 in -50.0f64..50.0,
            dt in 1e-3f64..1.0,
            values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..64),
        ) {
            let samples = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let s = SampledSignal::new(t0, dt, samples).unwrap();
            let mut buf = Vec::new();
            write_signal_csv(&mut buf, &s, &["header".to_string()]).unwrap();
            let back = parse_signal_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.samples(), s.samples());
            prop_assert!((back.t0() - s.t0()).abs() == 0.0);
            prop_assert!((back.dt() - s.dt()).abs() < 1e-12 * dt.max(1.0));
        }
    }
}
