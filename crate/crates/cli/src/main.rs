use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conal::geodesic::{self, GeodesicPoint, GeodesicSpec};
use conal::io;
use conal::metrics::{self, EvalPath, MetricOptions};
use conal::speech::{self, MorphConfig};
use conal::{Error, FrequencyGrid, Result, SampledSpectrum, Spectrum};
use serde_json::{json, Value};

const DEFAULT_GRID: usize = 4096;

#[derive(Parser)]
#[command(
    name = "conal",
    version,
    about = "Conal distances, geodesics and LPC morphing for spectral densities"
)]
struct Cli {
    /// Frequency grid size for sampled evaluation [default: 4096, or the size of a sampled input]
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Relative tolerance: H-infinity bisection for distance, norm and geodesic; Riccati iteration for factorize
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for the unvoiced excitation of `morph`
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (stdout if absent). For `geodesic --out-format csv` this is the stem of the
    /// per-tau files; for `morph` it is the WAV file and is required.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two spectra
    Distance {
        #[arg(long, value_enum, default_value_t = Metric::Thompson)]
        metric: Metric,
        #[arg(long, value_enum, default_value_t = PathArg::Rational)]
        path: PathArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Minimum-phase spectral factor of a spectrum
    Factorize { input: PathBuf },
    /// System norm of a stable state-space system
    Norm {
        #[arg(long, value_enum, default_value_t = NormKind::Hinf)]
        kind: NormKind,
        system: PathBuf,
    },
    /// Points on a geodesic between two spectra
    Geodesic {
        #[arg(long, value_enum, default_value_t = GeodesicKind::Finsler)]
        kind: GeodesicKind,
        /// Comma-separated list of geodesic parameters
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        tau: Vec<f64>,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        out_format: OutFormat,
        a: PathBuf,
        b: PathBuf,
    },
    /// Morph two recordings along frame-wise Finsler geodesics
    Morph {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        /// Plain-text file of key=value options
        #[arg(long)]
        config: Option<PathBuf>,
        /// linear or geometric
        #[arg(long)]
        pitch_mode: Option<String>,
        /// Extra option as key=value; may be repeated
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Thompson,
    Hilbert,
    Riemannian,
    Frobenius,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Rational,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Hinf,
    H2,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeodesicKind {
    Finsler,
    Riemannian,
    Hilbert,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

enum Status {
    Done,
    Infinite,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Infinite) => ExitCode::from(2),
        Err(e) => {
            eprintln!("conal: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() || matches!(e, Error::BoundaryRoot { .. }) {
        3
    } else {
        4
    }
}

fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Distance { metric, path, a, b } => run_distance(cli, *metric, *path, a, b),
        Command::Factorize { input } => run_factorize(cli, input),
        Command::Norm { kind, system } => run_norm(cli, *kind, system),
        Command::Geodesic {
            kind,
            tau,
            out_format,
            a,
            b,
        } => run_geodesic(cli, *kind, tau, *out_format, a, b),
        Command::Morph {
            a,
            b,
            tau,
            config,
            pitch_mode,
            set,
        } => run_morph(cli, a, b, *tau, config.as_deref(), pitch_mode.as_deref(), set),
    }
}

/// JSON number, with infinities written as the strings "inf" and "-inf".
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(v)?)
}

fn grid_for(cli: &Cli, inputs: &[&Spectrum]) -> Result<FrequencyGrid> {
    let n = cli.grid.unwrap_or_else(|| {
        inputs
            .iter()
            .find_map(|s| match s {
                Spectrum::Sampled(x) => Some(x.grid().len()),
                _ => None,
            })
            .unwrap_or(DEFAULT_GRID)
    });
    FrequencyGrid::new(n)
}

fn metric_options(cli: &Cli, path: EvalPath, inputs: &[&Spectrum]) -> Result<MetricOptions> {
    let mut opts = MetricOptions {
        path,
        grid: grid_for(cli, inputs)?,
        ..MetricOptions::default()
    };
    if let Some(t) = cli.tol {
        opts.hinf_tol = t;
    }
    Ok(opts)
}

fn read_pair(a: &Path, b: &Path) -> Result<(Spectrum, Spectrum)> {
    Ok((io::read_spectrum(a)?, io::read_spectrum(b)?))
}

fn run_distance(cli: &Cli, metric: Metric, path: PathArg, a: &Path, b: &Path) -> Result<Status> {
    let (phi1, phi2) = read_pair(a, b)?;
    let path = match path {
        PathArg::Rational => EvalPath::Rational,
        PathArg::Grid => EvalPath::Grid,
    };
    let opts = metric_options(cli, path, &[&phi1, &phi2])?;
    let (v, infinite) = match metric {
        Metric::Thompson | Metric::Hilbert => {
            let (name, d) = if matches!(metric, Metric::Thompson) {
                ("thompson", metrics::thompson_distance(&phi1, &phi2, &opts)?)
            } else {
                ("hilbert", metrics::hilbert_distance(&phi1, &phi2, &opts)?)
            };
            let v = json!({
                "metric": name,
                "value": number(d.value),
                "M12": number(d.m12),
                "M21": number(d.m21),
                "path": d.path,
                "peak_12": d.peak_12,
                "peak_21": d.peak_21,
                "fell_back": d.fell_back,
                "boundary": d.boundary,
            });
            (v, d.is_infinite())
        }
        Metric::Riemannian => {
            let d = metrics::riemannian_distance(&phi1, &phi2, &opts.grid)?;
            let v = json!({
                "metric": "riemannian",
                "value": number(d),
                "path": EvalPath::Grid,
                "grid": opts.grid.len(),
            });
            (v, d.is_infinite())
        }
        Metric::Frobenius => {
            let d = metrics::frobenius_divergence(&phi1, &phi2, &opts)?;
            let v = json!({
                "metric": "frobenius",
                "value": number(d.value),
                "path": d.path,
                "fell_back": d.fell_back,
            });
            (v, d.value.is_infinite())
        }
    };
    emit_json(cli.out.as_deref(), &v)?;
    Ok(if infinite { Status::Infinite } else { Status::Done })
}

fn run_factorize(cli: &Cli, input: &Path) -> Result<Status> {
    let phi = io::read_spectrum(input)?;
    let mut opts = conal::FactorOptions::default();
    if let Some(t) = cli.tol {
        opts.tol = t;
    }
    let f = conal::minimum_phase_factor(&phi, &opts)?;
    let mut v = io::state_space_to_json(f.factor());
    v["rank"] = json!(f.rank());
    if let Some(tf) = f.scalar() {
        v["factor_num"] = json!(tf.num);
        v["factor_den"] = json!(tf.den);
    }
    emit_json(cli.out.as_deref(), &v)?;
    Ok(Status::Done)
}

fn run_norm(cli: &Cli, kind: NormKind, system: &Path) -> Result<Status> {
    let g = io::parse_state_space(&std::fs::read_to_string(system)?)?;
    let v = match kind {
        NormKind::Hinf => {
            let r = conal::hinf_norm(&g, cli.tol.unwrap_or(1e-8))?;
            json!({
                "kind": "hinf",
                "value": number(r.value),
                "peak_frequency": r.peak_frequency,
                "interval": [number(r.interval.0), number(r.interval.1)],
                "method": match r.method {
                    conal::NormMethod::Bisection => "bisection",
                    conal::NormMethod::Grid => "grid",
                },
            })
        }
        NormKind::H2 => {
            let sq = conal::h2_norm_sq(&g)?;
            let value = sq.sqrt();
            json!({
                "kind": "h2",
                "value": number(value),
                "value_sq": number(sq),
                "peak_frequency": null,
                "interval": [number(value), number(value)],
            })
        }
    };
    emit_json(cli.out.as_deref(), &v)?;
    Ok(Status::Done)
}

fn sampled_json(s: &SampledSpectrum) -> Value {
    let p = s.dim();
    let mut columns = vec!["theta".to_string()];
    for i in 0..p {
        for j in 0..p {
            columns.push(format!("re_{i}_{j}"));
            columns.push(format!("im_{i}_{j}"));
        }
    }
    let rows: Vec<Vec<f64>> = s
        .values()
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut row = vec![s.grid().theta(k)];
            for i in 0..p {
                for j in 0..p {
                    row.push(m[(i, j)].re);
                    row.push(m[(i, j)].im);
                }
            }
            row
        })
        .collect();
    json!({ "grid": s.grid().len(), "columns": columns, "rows": rows })
}

fn point_json(tau: f64, point: &GeodesicPoint) -> Value {
    match point {
        GeodesicPoint::Factored(f) => {
            let mut v = json!({
                "tau": tau,
                "rational": true,
                "system": io::state_space_to_json(f.factor()),
            });
            if let Some(tf) = f.scalar() {
                v["factor_num"] = json!(tf.num);
                v["factor_den"] = json!(tf.den);
            }
            v
        }
        GeodesicPoint::Sampled(s) => {
            let mut v = sampled_json(s);
            v["tau"] = json!(tau);
            v["rational"] = json!(false);
            v
        }
    }
}

fn csv_path(stem: &Path, idx: usize) -> PathBuf {
    let name = stem
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "geodesic".into());
    stem.with_file_name(format!("{name}_{idx}.csv"))
}

fn run_geodesic(
    cli: &Cli,
    kind: GeodesicKind,
    taus: &[f64],
    format: OutFormat,
    a: &Path,
    b: &Path,
) -> Result<Status> {
    if let Some(t) = taus.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!("tau = {t} is not finite")));
    }
    if format == OutFormat::Csv && cli.out.is_none() && taus.len() > 1 {
        return Err(Error::InvalidInput(
            "several CSV outputs need --out to name the files".into(),
        ));
    }
    let (phi1, phi2) = read_pair(a, b)?;
    let opts = metric_options(cli, EvalPath::Rational, &[&phi1, &phi2])?;
    let grid = opts.grid;
    let mut header = json!({ "kind": kind.to_possible_value().map(|v| v.get_name().to_string()) });
    let points: Vec<GeodesicPoint> = match kind {
        GeodesicKind::Finsler => {
            let spec = GeodesicSpec::new(phi1, phi2, &opts)?;
            header["alpha"] = json!(spec.alpha());
            header["beta"] = json!(spec.beta());
            taus.iter()
                .map(|&t| geodesic::finsler_geodesic(&spec, t))
                .collect::<Result<_>>()?
        }
        GeodesicKind::Riemannian => taus
            .iter()
            .map(|&t| geodesic::riemannian_geodesic(&phi1, &phi2, t, &grid).map(GeodesicPoint::Sampled))
            .collect::<Result<_>>()?,
        GeodesicKind::Hilbert => {
            let n1 = geodesic::normalize_spectrum(&phi1)?;
            let n2 = geodesic::normalize_spectrum(&phi2)?;
            taus.iter()
                .map(|&t| geodesic::hilbert_geodesic(&n1, &n2, t, &grid).map(GeodesicPoint::Sampled))
                .collect::<Result<_>>()?
        }
    };
    match format {
        OutFormat::Json => {
            header["points"] = taus
                .iter()
                .zip(&points)
                .map(|(&t, p)| point_json(t, p))
                .collect();
            emit_json(cli.out.as_deref(), &header)?;
        }
        OutFormat::Csv => {
            let mut files = Vec::new();
            for (idx, p) in points.iter().enumerate() {
                let csv = io::sampled_to_csv(&p.sample(&grid)?);
                match &cli.out {
                    Some(stem) => {
                        let path = csv_path(stem, idx);
                        std::fs::write(&path, csv)?;
                        files.push(path.display().to_string());
                    }
                    None => print!("{csv}"),
                }
            }
            if !files.is_empty() {
                let listing = json!({ "tau": taus, "files": files });
                println!("{}", serde_json::to_string_pretty(&listing)?);
            }
        }
    }
    Ok(Status::Done)
}

fn run_morph(
    cli: &Cli,
    a: &Path,
    b: &Path,
    tau: Option<f64>,
    config: Option<&Path>,
    pitch_mode: Option<&str>,
    set: &[String],
) -> Result<Status> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("morph needs --out for the WAV file".into()))?;
    let mut cfg = match config {
        Some(p) => MorphConfig::from_key_values(&std::fs::read_to_string(p)?)?,
        None => MorphConfig::default(),
    };
    for kv in set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("--set expects key=value, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(t) = tau {
        cfg.tau = t;
    }
    if let Some(m) = pitch_mode {
        cfg.pitch_mode = m.parse()?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.grid {
        cfg.grid = n;
    }
    cfg.validate()?;
    let x = speech::read_wav(a)?;
    let y = speech::read_wav(b)?;
    let r = speech::morph(&x, &y, &cfg)?;
    speech::write_wav(out, &r.signal)?;
    let voiced = r.frames.iter().filter(|f| f.pitch.is_some()).count();
    let substituted = |an: &[speech::FrameAnalysis]| an.iter().filter(|f| f.substituted).count();
    let summary = json!({
        "output": out.display().to_string(),
        "tau": cfg.tau,
        "sample_rate": r.signal.sample_rate,
        "samples": r.signal.len(),
        "frames": r.frames.len(),
        "voiced_frames": voiced,
        "substituted_a": substituted(&r.analysis_a),
        "substituted_b": substituted(&r.analysis_b),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(Status::Done)
}
