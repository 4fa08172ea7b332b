//! `omega` — command-line front end for the curve-spectrum library.
//!
//! Subcommands: `gen` (example curve families to JSON), `spectrum` (grid
//! classification to spectrum JSON and optional PPM picture), `classify`
//! (one parameter pair to a verdict), `components` (complement component
//! table and PGM), `chords` (good disks, good chords, optional ruled
//! sequence), `hopf-circle` (circle coincidence roots), `hopf-torus`
//! (flat-torus coincidence pairs and direction-map degrees).
//!
//! Results go to files or standard output; diagnostics to standard error.
//! Exit codes: 0 success, 1 validation error, 2 I/O or serialization error.
//! `OMEGA_THREADS` caps the worker pool (default: hardware parallelism).

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use omega_core::complement::{
    build_component_map, build_ruled_sequence, find_good_disks, good_chords, max_index_component,
    verify_ruled, GoodChord, DEFAULT_CANDIDATES, DEFAULT_MARGIN, DEFAULT_RASTER, DEFAULT_SLACK,
    DEFAULT_THETA_MIN,
};
use omega_core::curves::{load_curve, save_curve};
use omega_core::generators::{
    aux_ellipse, default_red_total, gen_circle, gen_example1, gen_folded, gen_shielded,
    gen_torusknot,
};
use omega_core::neighbors::classify_pair;
use omega_core::spectrum::{compute_spectrum, export_torus_ppm};
use omega_core::{
    direction_map_degree, find_coincidence_family, hopf_pairs_circle, set_worker_cap,
    CircleFunction, CircleRoots, Error, NeighborKind, Parallelism, Result, Tolerances, TorusMap,
    TrigTerm,
};

#[derive(Parser)]
#[command(
    name = "omega",
    version,
    about = "Neighbor-distance spectra and coincidence solvers for sampled closed planar curves"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an example curve family to a curve JSON file.
    Gen(GenArgs),
    /// Classify an N x N parameter grid and write the distance spectrum.
    Spectrum(SpectrumArgs),
    /// Classify one parameter pair; verdict JSON on standard output.
    Classify(ClassifyArgs),
    /// Component table of the image complement; optional PGM raster.
    Components(ComponentsArgs),
    /// Good disks and good chords of a component; optional ruled sequence.
    Chords(ChordsArgs),
    /// Roots of g(x + delta) = g(x) on the circle.
    HopfCircle(HopfCircleArgs),
    /// Coincidence pairs f(p + delta u) = f(p) and direction-map degrees on
    /// the flat torus.
    HopfTorus(HopfTorusArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family: circle, example1, torusknot, shielded, folded, ellipse.
    #[arg(long)]
    family: String,
    /// Sample count (default depends on the family).
    #[arg(long)]
    n: Option<usize>,
    /// circle: winding number (may be negative); shielded: shielded arc count.
    #[arg(long)]
    k: Option<i64>,
    /// circle: phase offset in radians.
    #[arg(long)]
    phase: Option<f64>,
    /// example1: half-width of the near arcs; shielded: arc half-width.
    #[arg(long)]
    eps: Option<f64>,
    /// example1: red-to-blue image closeness.
    #[arg(long)]
    closeness: Option<f64>,
    /// torusknot: strand count q >= 3.
    #[arg(long)]
    q: Option<usize>,
    /// torusknot: total parameter length of the straight (red) arcs.
    #[arg(long)]
    red_total: Option<f64>,
    /// shielded: comb teeth per shield.
    #[arg(long)]
    fill_res: Option<usize>,
    /// folded: backtrack depth in (0, 1).
    #[arg(long)]
    depth: Option<f64>,
    /// ellipse: semi-axes.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Output curve file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Neighbor kind: plain, sph, vis, or top.
    #[arg(long)]
    kind: String,
    /// Grid size N (>= 64).
    #[arg(long)]
    grid: usize,
    /// Component-map raster (used by kind=top; must be >= 256 there).
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    /// Input curve file.
    #[arg(short, long)]
    input: PathBuf,
    /// Output spectrum JSON.
    #[arg(short, long)]
    out: PathBuf,
    /// Also write the colored grid as a PPM image.
    #[arg(long)]
    ppm: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Input curve file.
    #[arg(short, long)]
    input: PathBuf,
    /// First parameter (radians).
    #[arg(long)]
    a: f64,
    /// Second parameter (radians).
    #[arg(long)]
    b: f64,
    /// Component-map raster for the topological test.
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    /// Skip the component map (topological falls back to visual).
    #[arg(long)]
    no_map: bool,
}

#[derive(Args)]
struct ComponentsArgs {
    /// Input curve file.
    #[arg(short, long)]
    input: PathBuf,
    /// Raster side length.
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    /// Write the id raster as a PGM image.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct ChordsArgs {
    /// Input curve file.
    #[arg(short, long)]
    input: PathBuf,
    /// Raster side length.
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    /// Component id (default: the component with the largest winding index).
    #[arg(long)]
    component: Option<i32>,
    /// Also build and verify a ruled sequence of at least this many chords.
    #[arg(long)]
    sequence: Option<usize>,
}

#[derive(Args)]
struct HopfCircleArgs {
    /// Named function: cos, sin, or const:<value>.
    #[arg(long, conflicts_with = "samples")]
    func: Option<String>,
    /// JSON file with samples [[t, value], ...] (t in [0, 2*pi)).
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Arc length delta in (0, 2*pi).
    #[arg(long)]
    delta: f64,
    /// Scan grid size.
    #[arg(long, default_value_t = 512)]
    grid: usize,
}

#[derive(Args)]
struct HopfTorusArgs {
    /// JSON file with two term lists [[{amp,kx,ky,phase},...],[...]]
    /// (default: the map (sin 2*pi*x, sin 2*pi*y)).
    #[arg(long)]
    map: Option<PathBuf>,
    /// Geodesic length delta > 0.
    #[arg(long)]
    delta: f64,
    /// Report the direction-map degree instead of the pair family.
    #[arg(long, requires = "p", requires = "s")]
    degree: bool,
    /// Base point "x,y" for --degree.
    #[arg(long)]
    p: Option<String>,
    /// Geodesic shift s for --degree.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Direction samples for --degree.
    #[arg(long, default_value_t = 256)]
    dirs: usize,
    /// Coarse seed grid (family mode).
    #[arg(long, default_value_t = 32)]
    coarse: usize,
    /// Refinement residual tolerance (family mode).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Maximum pairs returned (family mode).
    #[arg(long, default_value_t = 1000)]
    cap: usize,
    /// Write pairs as JSON lines to a file instead of standard output.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print(); // clap writes usage errors to stderr
            std::process::exit(1);
        }
    };
    if let Ok(v) = std::env::var("OMEGA_THREADS") {
        let cap: usize = match v.parse() {
            Ok(c) => c,
            Err(_) => {
                eprintln!("error: OMEGA_THREADS must be a positive integer, got '{v}'");
                std::process::exit(1);
            }
        };
        if let Err(e) = set_worker_cap(cap) {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Io(_) | Error::Json(_) => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen(a) => run_gen(a),
        Cmd::Spectrum(a) => run_spectrum(a),
        Cmd::Classify(a) => run_classify(a),
        Cmd::Components(a) => run_components(a),
        Cmd::Chords(a) => run_chords(a),
        Cmd::HopfCircle(a) => run_hopf_circle(a),
        Cmd::HopfTorus(a) => run_hopf_torus(a),
    }
}

fn run_gen(a: GenArgs) -> Result<()> {
    let curve = match a.family.as_str() {
        "circle" => gen_circle(
            a.n.unwrap_or(1024),
            a.k.unwrap_or(1),
            a.phase.unwrap_or(0.0),
        )?,
        "example1" => gen_example1(
            a.n.unwrap_or(2048),
            a.eps.unwrap_or(0.35),
            a.closeness.unwrap_or(0.05),
        )?,
        "torusknot" => {
            let q = a.q.unwrap_or(4);
            gen_torusknot(
                a.n.unwrap_or(2048),
                q,
                a.red_total.unwrap_or_else(|| default_red_total(q)),
            )?
        }
        "shielded" => {
            let k = a.k.unwrap_or(3);
            let k = usize::try_from(k)
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::InvalidInput(format!("shielded arc count {k} invalid")))?;
            gen_shielded(
                a.n.unwrap_or(4096),
                k,
                a.eps.unwrap_or(0.3),
                a.fill_res.unwrap_or(6),
            )?
        }
        "folded" => gen_folded(a.n.unwrap_or(1024), a.depth.unwrap_or(0.3))?,
        "ellipse" => aux_ellipse(
            a.n.unwrap_or(512),
            a.a.unwrap_or(1.5),
            a.b.unwrap_or(0.6),
        )?,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown family '{other}' (expected circle, example1, torusknot, shielded, folded, or ellipse)"
            )))
        }
    };
    save_curve(&curve, &a.out)?;
    eprintln!(
        "wrote {} samples ({}) to {}",
        curve.len(),
        a.family,
        a.out.display()
    );
    Ok(())
}

fn run_spectrum(a: SpectrumArgs) -> Result<()> {
    let kind = NeighborKind::parse(&a.kind)?;
    let curve = load_curve(&a.input)?;
    let tol = Tolerances::for_loop(&curve);
    let (spec, grid) = compute_spectrum(
        &curve,
        kind,
        a.grid,
        &tol,
        a.raster,
        Parallelism::Parallel,
    )?;
    spec.save(&a.out)?;
    if let Some(ppm) = &a.ppm {
        export_torus_ppm(&grid, kind, ppm)?;
    }
    eprintln!(
        "{} spectrum on a {} grid: {} intervals, measure {:.6}; wrote {}",
        kind.label(),
        a.grid,
        spec.intervals.len(),
        spec.measure,
        a.out.display()
    );
    Ok(())
}

fn run_classify(a: ClassifyArgs) -> Result<()> {
    let curve = load_curve(&a.input)?;
    let tol = Tolerances::for_loop(&curve);
    let cmap = if a.no_map {
        None
    } else {
        Some(build_component_map(&curve, a.raster, DEFAULT_MARGIN)?)
    };
    let verdict = classify_pair(&curve, a.a, a.b, &tol, cmap.as_ref())?;
    println!("{}", serde_json::to_string(&verdict)?);
    Ok(())
}

fn run_components(a: ComponentsArgs) -> Result<()> {
    let curve = load_curve(&a.input)?;
    let cmap = build_component_map(&curve, a.raster, DEFAULT_MARGIN)?;
    let rows: Vec<_> = cmap
        .component_ids()
        .into_iter()
        .map(|id| {
            json!({
                "id": id,
                "cells": cmap.cell_count(id),
                "index": cmap.index_of(id),
                "unbounded": id == cmap.unbounded_id(),
            })
        })
        .collect();
    let table = json!({
        "raster": cmap.raster_size(),
        "cell": cmap.cell_size(),
        "unbounded": cmap.unbounded_id(),
        "components": rows,
    });
    println!("{table}");
    if let Some(pgm) = &a.pgm {
        cmap.export_pgm(pgm)?;
        eprintln!("wrote raster to {}", pgm.display());
    }
    Ok(())
}

fn chord_json(c: &GoodChord) -> serde_json::Value {
    json!({
        "endpoints": [[c.endpoints.0.x, c.endpoints.0.y], [c.endpoints.1.x, c.endpoints.1.y]],
        "disk_center": [c.disk_center.x, c.disk_center.y],
        "disk_radius": c.disk_radius,
        "component": c.component,
        "separation": c.separation,
        "preimages": [c.preimages.0, c.preimages.1],
    })
}

fn run_chords(a: ChordsArgs) -> Result<()> {
    let curve = load_curve(&a.input)?;
    let cmap = build_component_map(&curve, a.raster, DEFAULT_MARGIN)?;
    let comp = match a.component {
        Some(id) => id,
        None => max_index_component(&cmap)?,
    };
    let disks = find_good_disks(
        &cmap,
        &curve,
        comp,
        DEFAULT_CANDIDATES,
        DEFAULT_THETA_MIN,
        DEFAULT_SLACK,
    )?;
    let chords = good_chords(&disks, &curve);
    let mut out = json!({
        "component": comp,
        "disks": disks
            .iter()
            .map(|d| json!({
                "center": [d.center.x, d.center.y],
                "radius": d.radius,
                "tangencies": d.tangents.len(),
            }))
            .collect::<Vec<_>>(),
        "chords": chords.iter().map(chord_json).collect::<Vec<_>>(),
    });
    if let Some(len) = a.sequence {
        let seq = build_ruled_sequence(&cmap, &curve, comp, len)?;
        let verified = verify_ruled(&seq, &cmap)?;
        out["ruled"] = json!({
            "verified": verified,
            "chords": seq.iter().map(chord_json).collect::<Vec<_>>(),
        });
    }
    println!("{out}");
    eprintln!(
        "component {comp}: {} disks, {} chords",
        disks.len(),
        chords.len()
    );
    Ok(())
}

fn run_hopf_circle(a: HopfCircleArgs) -> Result<()> {
    let roots = match (&a.func, &a.samples) {
        (Some(name), None) => match name.as_str() {
            "cos" => hopf_pairs_circle(f64::cos, a.grid, a.delta)?,
            "sin" => hopf_pairs_circle(f64::sin, a.grid, a.delta)?,
            other => {
                if let Some(v) = other.strip_prefix("const:") {
                    let c: f64 = v.parse().map_err(|_| {
                        Error::InvalidInput(format!("bad constant '{v}' in --func"))
                    })?;
                    hopf_pairs_circle(move |_| c, a.grid, a.delta)?
                } else {
                    return Err(Error::InvalidInput(format!(
                        "unknown function '{other}' (expected cos, sin, or const:<value>)"
                    )));
                }
            }
        },
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let samples: Vec<(f64, f64)> = serde_json::from_str(&text)?;
            let g = CircleFunction::new(samples)?;
            hopf_pairs_circle(move |x| g.eval(x), a.grid, a.delta)?
        }
        _ => {
            return Err(Error::InvalidInput(
                "exactly one of --func or --samples is required".to_string(),
            ))
        }
    };
    match roots {
        CircleRoots::All => println!("all"),
        CircleRoots::Roots(rs) => {
            for r in rs {
                println!("{r}");
            }
        }
    }
    Ok(())
}

fn parse_point(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(x), Ok(y)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((x, y));
        }
    }
    Err(Error::InvalidInput(format!("expected \"x,y\", got '{s}'")))
}

fn load_torus_map(path: Option<&Path>) -> Result<TorusMap> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let coords: [Vec<TrigTerm>; 2] = serde_json::from_str(&text)?;
            TorusMap::new(coords)
        }
        None => TorusMap::new([
            vec![TrigTerm {
                amp: 1.0,
                kx: 1,
                ky: 0,
                phase: 0.0,
            }],
            vec![TrigTerm {
                amp: 1.0,
                kx: 0,
                ky: 1,
                phase: 0.0,
            }],
        ]),
    }
}

fn run_hopf_torus(a: HopfTorusArgs) -> Result<()> {
    let f = load_torus_map(a.map.as_deref())?;
    if a.degree {
        let p = parse_point(a.p.as_deref().expect("clap enforces --p"))?;
        let s = a.s.expect("clap enforces --s");
        let d = direction_map_degree(&f, p, s, a.delta, a.dirs)?;
        println!("{d}");
        return Ok(());
    }
    let pairs = find_coincidence_family(
        &f,
        a.delta,
        a.coarse,
        a.tol,
        a.cap,
        Parallelism::Parallel,
    )?;
    let mut lines = String::new();
    for p in &pairs {
        lines.push_str(&serde_json::to_string(p)?);
        lines.push('\n');
    }
    match &a.out {
        Some(path) => std::fs::write(path, lines)?,
        None => print!("{lines}"),
    }
    eprintln!("{} coincidence pairs at delta {}", pairs.len(), a.delta);
    Ok(())
}
