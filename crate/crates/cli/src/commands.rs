use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use tflattice::frame::{read_coeff_json, write_coeff_json, CoeffFile};
use tflattice::signals::write_signal_csv;
use tflattice::verify::{self, gaussian_db, Tolerances};
use tflattice::waveform::DEFAULT_ALPHA_QUAD_POINTS;
use tflattice::{
    ambiguity, analyze, attenuation_db, compute_alpha, energy, estimate_displacement, render_curve,
    render_grid, sample, synthesize, Curve, Error, QuadratureSpec, RenderStyle, SignalSpec, Waveform,
    LATTICE_STEP, VERSION,
};

use crate::{Cli, Command, GridArgs, TolArgs};

const NUMERICAL: u8 = 2;

/// Maps a failure to the exit-code contract: numerical breakdowns are 2,
/// everything else (bad flags, bad files) is 1.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<Error>(),
            Some(
                Error::GridTooSmall { .. }
                    | Error::FlatCorrelation { .. }
                    | Error::NonPositiveTheta { .. }
                    | Error::Normalization(_)
            )
        )
    });
    if numerical {
        NUMERICAL
    } else {
        1
    }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// Provenance record written into every output.
fn metadata(cli: &Cli, extra: Value) -> Value {
    let mut meta = json!({
        "command": command_line(),
        "version": VERSION,
        "config": {
            "n_terms": cli.n_terms,
            "alpha_count": tflattice::theta::MAX_ALPHA_COUNT,
            "alpha_quad_points": DEFAULT_ALPHA_QUAD_POINTS,
            "lattice_step": LATTICE_STEP,
        },
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut meta, extra) {
        base.extend(more);
    }
    meta
}

fn comment_lines(meta: &Value) -> Vec<String> {
    vec![
        format!("command: {}", meta["command"].as_str().unwrap_or_default()),
        format!("metadata: {meta}"),
    ]
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn waveform(cli: &Cli) -> Result<Waveform> {
    Ok(Waveform::with_terms(cli.n_terms)?)
}

fn grid(args: &GridArgs, m_max: usize) -> Result<QuadratureSpec> {
    match (args.t_min, args.t_max) {
        (Some(lo), Some(hi)) => {
            let dt = args.dt.unwrap_or(LATTICE_STEP / 64.0);
            Ok(QuadratureSpec::new(lo, hi, dt)?)
        }
        _ => Ok(QuadratureSpec::default_for(m_max)),
    }
}

fn grid_json(q: &QuadratureSpec) -> Value {
    json!({"t_min": q.t_min(), "t_max": q.t_max(), "dt": q.dt(), "samples": q.len()})
}

fn parse_spec(text: &str) -> Result<SignalSpec> {
    Ok(text.parse::<SignalSpec>()?)
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Alpha {
            count,
            quad_points,
            json,
        } => alpha(*count, *quad_points, *json),
        Command::Waveform {
            t_min,
            t_max,
            dt,
            attenuation,
            output,
        } => tabulate(cli, *t_min, *t_max, *dt, *attenuation, output.as_deref()),
        Command::Generate {
            signal,
            m_max,
            grid: g,
            output,
        } => generate(cli, signal, *m_max, g, output.as_deref()),
        Command::Analyze {
            signal,
            m_max,
            n_max,
            output,
        } => analyze_cmd(cli, signal, *m_max, *n_max, output),
        Command::Synthesize {
            coeffs,
            grid: g,
            output,
        } => synthesize_cmd(cli, coeffs, g, output.as_deref()),
        Command::Plot {
            coeffs,
            attenuation,
            overlay,
            t_max_steps,
            y_floor,
            magnify,
            cell_px,
            radius_scale,
            no_axes,
            output,
        } => {
            let style = RenderStyle {
                cell_px: *cell_px,
                radius_scale: *radius_scale,
                magnify: *magnify,
                show_axes: !no_axes,
                y_floor: Some(*y_floor),
                ..RenderStyle::default()
            };
            match coeffs {
                Some(path) if !attenuation => plot_grid(cli, path, &style, output.as_deref()),
                _ => plot_attenuation(cli, overlay, *t_max_steps, &style, output.as_deref()),
            }
        }
        Command::Ambiguity {
            xi,
            eta,
            m_max,
            n_max,
            estimate,
            coeffs,
            resolution,
            output,
        } => match (estimate, coeffs) {
            (true, Some(path)) => estimate_cmd(cli, path, *resolution, output.as_deref()),
            _ => ambiguity_cmd(
                cli,
                xi.unwrap_or(0.0),
                eta.unwrap_or(0.0),
                *m_max,
                *n_max,
                output.as_deref(),
            ),
        },
        Command::Verify { list, tol } => verify_cmd(*list, tol),
    }
}

fn alpha(count: usize, quad_points: usize, as_json: bool) -> Result<ExitCode> {
    let table = compute_alpha(count, quad_points)?;
    let mut out = io::stdout().lock();
    if as_json {
        writeln!(out, "{}", serde_json::to_string(table.values())?)?;
    } else {
        writeln!(out, "# alpha_n from {quad_points}-point quadrature")?;
        for (i, a) in table.values().iter().enumerate() {
            writeln!(out, "{:>2}  {a:.15}", i + 1)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn tabulate(
    cli: &Cli,
    t_min: f64,
    t_max: f64,
    dt: f64,
    attenuation: bool,
    output: Option<&Path>,
) -> Result<ExitCode> {
    if !(dt > 0.0 && t_max >= t_min && t_min.is_finite() && t_max.is_finite()) {
        bail!("need t_min <= t_max and dt > 0");
    }
    let w = waveform(cli)?;
    let meta = metadata(cli, json!({"t_min": t_min, "t_max": t_max, "dt": dt}));
    let mut out = open_output(output)?;
    for line in comment_lines(&meta) {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "t,{}", if attenuation { "db" } else { "value" })?;
    let steps = ((t_max - t_min) / dt + 1e-9).floor() as usize;
    for k in 0..=steps {
        let t = t_min + k as f64 * dt;
        let v = if attenuation {
            attenuation_db(t, &w)
        } else {
            w.eval(t)
        };
        writeln!(out, "{t},{v}")?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn generate(
    cli: &Cli,
    signal: &str,
    m_max: usize,
    args: &GridArgs,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let spec = parse_spec(signal)?;
    let quad = grid(args, m_max)?;
    let w = waveform(cli)?;
    let s = sample(&spec, &quad, &w)?;
    let meta = metadata(cli, json!({"signal": spec.to_string(), "grid": grid_json(&quad)}));
    let mut out = open_output(output)?;
    write_signal_csv(&mut out, &s, &comment_lines(&meta))?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn analyze_cmd(cli: &Cli, signal: &str, m_max: usize, n_max: usize, output: &Path) -> Result<ExitCode> {
    let spec = parse_spec(signal)?;
    let w = waveform(cli)?;
    let quad = QuadratureSpec::default_for(m_max.max(n_max));
    let f = sample(&spec, &quad, &w)?;
    let g = analyze(&f, m_max, n_max, &w)?;
    let e = energy(&g);
    let f00 = g.get(0, 0).unwrap_or_default().norm();
    let meta = metadata(
        cli,
        json!({
            "signal": spec.to_string(),
            "M": m_max,
            "N": n_max,
            "grid": grid_json(&quad),
            "signal_energy": f.energy(),
            "energy": e,
        }),
    );
    write_coeff_json(output, &CoeffFile { grid: g, metadata: Some(meta) })?;
    println!("energy  {e:.15}");
    println!("deficit {:.3e}", f.energy() - e);
    println!("|f_00|  {f00:.3e}");
    Ok(ExitCode::SUCCESS)
}

fn synthesize_cmd(cli: &Cli, coeffs: &Path, args: &GridArgs, output: Option<&Path>) -> Result<ExitCode> {
    let file = read_coeff_json(coeffs)?;
    let g = &file.grid;
    let quad = grid(args, g.m_max().max(g.n_max()))?;
    let w = waveform(cli)?;
    let s = synthesize(g, &quad, &w);
    let meta = metadata(
        cli,
        json!({"coeffs": coeffs.display().to_string(), "M": g.m_max(), "N": g.n_max(), "grid": grid_json(&quad)}),
    );
    let mut out = open_output(output)?;
    write_signal_csv(&mut out, &s, &comment_lines(&meta))?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn write_svg(mut svg: tflattice::Svg, meta: &Value, output: Option<&Path>) -> Result<()> {
    svg.annotate(&format!("command: {}", meta["command"].as_str().unwrap_or_default()));
    if svg.clipped > 0 {
        eprintln!("warning: {} markers clipped to their cell", svg.clipped);
    }
    let mut out = open_output(output)?;
    out.write_all(svg.text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn plot_grid(cli: &Cli, coeffs: &Path, style: &RenderStyle, output: Option<&Path>) -> Result<ExitCode> {
    let file = read_coeff_json(coeffs)?;
    let svg = render_grid(&file.grid, style)?;
    let meta = metadata(cli, json!({"coeffs": coeffs.display().to_string()}));
    write_svg(svg, &meta, output)?;
    Ok(ExitCode::SUCCESS)
}

fn plot_attenuation(
    cli: &Cli,
    overlays: &[String],
    t_max_steps: f64,
    style: &RenderStyle,
    output: Option<&Path>,
) -> Result<ExitCode> {
    if !(t_max_steps > 0.0) {
        bail!("--t-max-steps must be positive");
    }
    let w = waveform(cli)?;
    let dt = LATTICE_STEP / 64.0;
    let count = (t_max_steps * 64.0).round() as usize;
    let times: Vec<f64> = (0..=count).map(|k| k as f64 * dt).collect();
    let curve = |w: &Waveform| -> Vec<(f64, f64)> {
        times.iter().map(|&t| (t, attenuation_db(t, w))).collect()
    };
    let mut extra = Vec::new();
    for name in overlays {
        let points = match name.as_str() {
            "gaussian" => times.iter().map(|&t| (t, gaussian_db(t))).collect(),
            other => match other.strip_prefix("approx").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) => curve(&Waveform::with_terms(k)?),
                None => bail!("unknown overlay `{other}`; use gaussian or approxK"),
            },
        };
        extra.push(Curve {
            label: name.clone(),
            points,
            dashed: true,
        });
    }
    let style = RenderStyle {
        x_label: "t".into(),
        y_label: "attenuation (dB)".into(),
        ..style.clone()
    };
    let svg = render_curve(&curve(&w), &style, &extra)?;
    let meta = metadata(cli, json!({"overlays": overlays, "t_max_steps": t_max_steps}));
    write_svg(svg, &meta, output)?;
    Ok(ExitCode::SUCCESS)
}

fn ambiguity_cmd(
    cli: &Cli,
    xi: f64,
    eta: f64,
    m_max: usize,
    n_max: usize,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let w = waveform(cli)?;
    let amb = ambiguity(xi, eta, m_max, n_max, &w)?;
    if amb.xi != amb.xi_requested {
        eprintln!("note: xi snapped from {} to {}", amb.xi_requested, amb.xi);
    }
    let meta = metadata(
        cli,
        json!({
            "xi_requested": amb.xi_requested,
            "xi": amb.xi,
            "eta": amb.eta,
            "M": m_max,
            "N": n_max,
        }),
    );
    let file = CoeffFile {
        grid: amb.grid,
        metadata: Some(meta),
    };
    match output {
        Some(path) => write_coeff_json(path, &file)?,
        None => {
            let mut out = io::stdout().lock();
            file.to_writer(&mut out)?;
            writeln!(out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn estimate_cmd(cli: &Cli, coeffs: &Path, resolution: f64, output: Option<&Path>) -> Result<ExitCode> {
    let file = read_coeff_json(coeffs)?;
    let w = waveform(cli)?;
    let d = estimate_displacement(&file.grid, &w, resolution)?;
    let report = metadata(
        cli,
        json!({"coeffs": coeffs.display().to_string(), "xi": d.xi, "eta": d.eta, "score": d.score}),
    );
    println!("xi    {:.9}", d.xi);
    println!("eta   {:.9}", d.eta);
    println!("score {:.12}", d.score);
    if let Some(path) = output {
        let mut out = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(list: bool, args: &TolArgs) -> Result<ExitCode> {
    if list {
        for (id, name, desc) in verify::list() {
            println!("{id:>2}  {name:<16} {desc}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut tol = Tolerances::default();
    let overrides = [
        (args.tol_alpha, &mut tol.alpha),
        (args.tol_energy, &mut tol.energy),
        (args.tol_reconstruction, &mut tol.reconstruction),
        (args.tol_orthonormality, &mut tol.orthonormality),
        (args.tol_covariance, &mut tol.covariance),
        (args.tol_anticommutation, &mut tol.anticommutation),
        (args.tol_displacement, &mut tol.displacement),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerances must be positive, got {v}");
            }
            *slot = v;
        }
    }
    let checks = verify::run_all(&tol);
    println!("{:>2}  {:<16} {:<6} {:>11}  {:>9}  detail", "id", "check", "result", "measured", "tolerance");
    for c in &checks {
        println!(
            "{:>2}  {:<16} {:<6} {:>11.3e}  {:>9.1e}  {}",
            c.id,
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.measured,
            c.tolerance,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NUMERICAL)
    })
}
