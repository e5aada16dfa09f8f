use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use frontlab::boundedness::{blowup_probe, ProbeConfig, ProbeScalar};
use frontlab::catalog;
use frontlab::expr::ParseError;
use frontlab::frontal::{trace_both, FrontalSurface, TraceConfig};
use frontlab::par::Execution;
use frontlab::slicing::{slice_cusp_check, slice_polyline, whitney_guard_spec};
use frontlab::spec::SurfaceSpec;
use frontlab::GeometryError;
use frontlab_cli::mesh::{grid_mesh, MeshError};
use frontlab_cli::output::{cell, to_json, write_csv};
use frontlab_cli::report::{analyze, AnalysisConfig, ProfileSample, SliceTarget, Status};

#[derive(Parser)]
#[command(name = "frontlab", version, about = "Singularities and curvature of frontal surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace, classify and compute invariants and boundedness verdicts.
    Analyze(AnalyzeArgs),
    /// List the built-in surfaces or write one out as a spec file.
    Catalog(CatalogArgs),
    /// Write a triangulated parameter grid as an OBJ mesh.
    ExportMesh(MeshArgs),
    /// Sample a curvature scalar on shrinking circles around a singular point.
    Probe(ProbeArgs),
    /// Compare κ_c with the cusp of the orthogonal slice.
    Slice(SliceArgs),
}

#[derive(Args)]
struct SurfaceArgs {
    /// Spec file, or the name of a catalog entry.
    spec: String,
    /// Override a parameter, `name=value`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Jet order (3 to 6).
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Where to start tracing the singular curve.
    #[arg(long, value_parser = parse_pair)]
    seed: Option<[f64; 2]>,
    /// Extra point for a full analysis. Repeatable.
    #[arg(long = "at", value_parser = parse_pair)]
    at: Vec<[f64; 2]>,
    /// Slice at a point `u,v`, or at the traced point with the given u. Repeatable.
    #[arg(long = "slice-at")]
    slice_at: Vec<SliceTarget>,
    /// Zero threshold for the boundedness predicates.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Chord length between traced samples.
    #[arg(long)]
    step: Option<f64>,
    /// Cap on samples traced in each direction.
    #[arg(long)]
    max_samples: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the invariant profile as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Disable the parallel evaluation of samples.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CatalogArgs {
    /// Entry to materialize.
    name: Option<String>,
    /// Write every entry.
    #[arg(long, conflicts_with = "name")]
    all: bool,
    /// Output directory for spec files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print the listing as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Grid resolution `NxM`.
    #[arg(long, default_value = "100x100", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Override the parameter domain, `u0,u1,v0,v1`.
    #[arg(long, value_parser = parse_domain)]
    domain: Option<[f64; 4]>,
    /// Mesh file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also trace the singular curve from this seed and write its image as CSV.
    #[arg(long, value_parser = parse_pair)]
    seed: Option<[f64; 2]>,
    /// Path of the singular-curve CSV (defaults to the mesh path with a .csv extension).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Singular point to probe around.
    #[arg(long, value_parser = parse_pair)]
    at: [f64; 2],
    /// K, H, vK or vH.
    #[arg(long, default_value = "K")]
    scalar: ProbeScalar,
    /// Half-width in radians of the sectors skipped around the singular curve.
    #[arg(long, default_value_t = 0.05)]
    sector: f64,
    /// Angles sampled on each circle.
    #[arg(long, default_value_t = 720)]
    thetas: usize,
    /// Write the probe summary as JSON instead of printing it.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write every sample (r, theta, value) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Disable the parallel evaluation of samples.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SliceArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// First-kind singular point.
    #[arg(long, value_parser = parse_pair)]
    at: [f64; 2],
    /// Write the check as JSON instead of printing it.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the slice curve as a CSV polyline (b, x, y).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Half-width of the polyline in the transverse coordinate.
    #[arg(long, default_value_t = 0.3)]
    half: f64,
    /// Number of polyline points written to the CSV.
    #[arg(long, default_value_t = 61)]
    points: usize,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = parse_list(s)?;
    v.try_into().map_err(|_| format!("expected `u,v`, got `{s}`"))
}

fn parse_domain(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    v.try_into().map_err(|_| format!("expected `u0,u1,v0,v1`, got `{s}`"))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"))).collect()
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected `NxM`, got `{s}`"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad grid size `{x}`: {e}"));
    Ok((n(a)?, n(b)?))
}

/// Input problems that map to the parse exit code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

fn load_spec(args: &SurfaceArgs) -> Result<SurfaceSpec> {
    let path = Path::new(&args.spec);
    let mut spec = if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        SurfaceSpec::parse(&text).map_err(|e| anyhow!(e).context(format!("parsing {}", path.display())))?
    } else if let Some(entry) = catalog::get(&args.spec) {
        entry.spec()
    } else {
        return Err(InputError(format!("no spec file or catalog entry named `{}`", args.spec)).into());
    };
    for p in &args.params {
        let (k, v) = p.split_once('=').ok_or_else(|| InputError(format!("expected NAME=VALUE, got `{p}`")))?;
        let x: f64 = v.trim().parse().map_err(|_| InputError(format!("bad value in `{p}`")))?;
        spec.set_param(k.trim(), x)?;
    }
    if let Some(n) = args.order {
        if !(3..=6).contains(&n) {
            return Err(InputError(format!("--order must lie in 3..=6, got {n}")).into());
        }
    }
    Ok(spec)
}

fn resolve(spec: &SurfaceSpec, order: Option<usize>) -> Result<FrontalSurface> {
    let s = FrontalSurface::resolve(spec)?;
    Ok(match order {
        Some(n) => s.with_order(n),
        None => s,
    })
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.surface)?;
    let cfg = AnalysisConfig {
        order: a.surface.order,
        seed: a.seed,
        points: a.at,
        tolerance: a.tolerance.unwrap_or(frontlab::boundedness::DEFAULT_ZERO_TOL),
        step: a.step,
        max_samples: a.max_samples,
        slice_at: a.slice_at,
        exec: exec(a.sequential),
    };
    let report = analyze(&spec, &cfg)?;
    emit(&a.json, &to_json(&report)?)?;
    if let Some(path) = &a.csv {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(f, &ProfileSample::HEADER, report.profile.iter().map(|r| r.csv_row()))?;
    }
    for e in &report.errors {
        eprintln!("warning: {e}");
    }
    Ok(match report.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Degenerate => {
            eprintln!("error: degenerate singular point encountered; partial report written");
            ExitCode::from(3)
        }
        Status::NumericFailure => {
            eprintln!("error: numerical failure; partial report written");
            ExitCode::from(4)
        }
    })
}

fn cmd_catalog(a: CatalogArgs) -> Result<ExitCode> {
    let write = |e: &catalog::Entry| -> Result<()> {
        fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
        let path = a.out.join(format!("{}.toml", e.name));
        fs::write(&path, e.toml).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
        Ok(())
    };
    if a.all {
        catalog::entries().iter().try_for_each(write)?;
    } else if let Some(name) = &a.name {
        let e = catalog::get(name).ok_or_else(|| InputError(format!("unknown catalog entry `{name}`")))?;
        write(e)?;
    } else if a.json {
        print!("{}", to_json(&catalog::entries())?);
    } else {
        for e in catalog::entries() {
            let goldens: Vec<String> = e.goldens.iter().map(|g| format!("{}={}", g.quantity, g.value)).collect();
            println!(
                "{:<20} at ({}, {})  {}{}",
                e.name,
                e.point[0],
                e.point[1],
                e.summary,
                if goldens.is_empty() { String::new() } else { format!("  [{}]", goldens.join(", ")) }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mesh(a: MeshArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.surface)?;
    let mut domain = spec.domain;
    if let Some([u0, u1, v0, v1]) = a.domain {
        if !(u0 < u1 && v0 < v1) {
            return Err(InputError("domain bounds must satisfy lo < hi".into()).into());
        }
        domain.u = [u0, u1];
        domain.v = [v0, v1];
    }
    let mesh = grid_mesh(&spec, domain, a.grid.0, a.grid.1)?;
    let f = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    mesh.write_obj(std::io::BufWriter::new(f))?;
    println!("{} ({} vertices, {} triangles)", a.out.display(), mesh.vertices.len(), mesh.faces.len());

    let seed = a.seed.or(spec.trace.seed);
    if let Some(seed) = seed {
        let curve = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
        let traced = resolve(&spec, a.surface.order).and_then(|s| {
            let cfg = TraceConfig { step: spec.trace.step.unwrap_or(0.02), ..Default::default() };
            Ok(trace_both(&s, seed, &cfg)?)
        });
        match traced {
            Ok(t) => {
                let f = fs::File::create(&curve).with_context(|| format!("creating {}", curve.display()))?;
                let rows = t.samples.iter().map(|s| {
                    let mut r = vec![cell(Some(s.p[0])), cell(Some(s.p[1]))];
                    r.extend(s.image.iter().map(|x| cell(Some(*x))));
                    r
                });
                write_csv(f, &["u", "v", "x", "y", "z"], rows)?;
                println!("{}", curve.display());
            }
            Err(e) => eprintln!("warning: singular curve not written: {e}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(a: ProbeArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.surface)?;
    let surface = resolve(&spec, a.surface.order)?;
    let cfg = ProbeConfig { sector: a.sector, thetas: a.thetas, exec: exec(a.sequential), ..Default::default() };
    let probe = blowup_probe(&surface, a.scalar, a.at, &cfg)?;
    emit(&a.json, &to_json(&probe)?)?;
    if let Some(path) = &a.csv {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let rows = probe.samples.iter().map(|s| vec![cell(Some(s.r)), cell(Some(s.theta)), cell(s.value)]);
        write_csv(f, &["r", "theta", "value"], rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_slice(a: SliceArgs) -> Result<ExitCode> {
    let spec = load_spec(&a.surface)?;
    whitney_guard_spec(&spec, a.at)?;
    let surface = resolve(&spec, a.surface.order)?;
    let check = slice_cusp_check(&surface, a.at)?;
    emit(&a.json, &to_json(&check)?)?;
    if let Some(path) = &a.csv {
        let pts = slice_polyline(&surface, a.at, a.half, a.points)?;
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(f, &["b", "x", "y"], pts.iter().map(|p| p.iter().map(|x| cell(Some(*x))).collect()))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Exit codes: 2 for bad input, 3 for degenerate singularities, 4 for
/// numerical failures, 1 for anything else (I/O).
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<ParseError>() || cause.is::<InputError>() {
            return 2;
        }
        if let Some(MeshError::Grid(..)) = cause.downcast_ref::<MeshError>() {
            return 2;
        }
        if let Some(g) = cause.downcast_ref::<GeometryError>() {
            return if g.is_degenerate() { 3 } else { 4 };
        }
        if cause.is::<MeshError>() {
            return 4;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::ExportMesh(a) => cmd_mesh(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Slice(a) => cmd_slice(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

