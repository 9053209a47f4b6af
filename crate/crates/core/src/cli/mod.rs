//! Command-line front end.
//!
//! Every command accepts `--config file.json`; flags given on the command
//! line override keys of the file (`-` and `_` are interchangeable in
//! keys). Outputs go to `--out` or standard output and carry a header
//! block with the tool version, the resolved configuration, the seed and
//! the scalar kind. Exit codes: 0 success, 1 precondition failure (reason
//! as JSON on standard error), 2 I/O error.

pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dirichlet::{build_kernel_table, solve_direct, solve_kernel, BoundaryData, DirectMode, SorOptions};
use crate::error::{precondition, Error, Result};
use crate::extension::{
    check_seven_bounds, extend_lshape, halfplane_construct, line_polynomial, random_lshape, DiagonalSeed,
    DiagonalSeedFile, LShapeData, LShapeFile,
};
use crate::gallery::{build_example, random_diagonal_seed, Example, ExampleName, ExampleSpec, Z_MINUS_INCLUDES_ZERO};
use crate::goodrect::{check_cover, find_good_square, vitali_select, GoodnessConfig, SquareFamily};
use crate::lattice::{doubling_report, growth_profile, portion_below, to_sloped, GridFunction, HalfInt, SlopedRect, Square};
use crate::numeric::{parse_scalar, Scalar, ScalarKind};
use crate::propagation::{propagate_with, three_circle_report, PropagationSetup, RemainderParams, ThreeCircleMode, DEFAULT_GAMMA};
use crate::remez::{poly_max, remez_bound, remez_bound_discrete, Interval, Polynomial};
use crate::verify::{run_suite, Fault, Level};
use output::{header, is_csv, merge_config, parse_list, parse_radii, read_text, write_csv, write_json};

#[derive(Parser, Debug)]
#[command(name = "harmlab", version, about = "Discrete harmonic functions on the integer lattice")]
pub struct Cli {
    /// JSON file with default values for the command's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the Dirichlet problem on Q_N.
    Solve(SolveArgs),
    /// Write the Poisson kernel table of Q_N as CSV.
    KernelDump(KernelDumpArgs),
    /// Extend L-shape data to its rectangle.
    ExtendLshape(ExtendLshapeArgs),
    /// Build a function vanishing on the half-plane n >= m.
    Halfplane(HalfplaneArgs),
    /// Build a named example function.
    Example(ExampleArgs),
    /// Fraction of Q_K where |u| <= threshold.
    Portion(PortionArgs),
    /// M(K) = max over Q_K of |u|, with the fitted log slope.
    Growth(GrowthArgs),
    /// Doubling dichotomy labels per radius.
    Doubling(DoublingArgs),
    /// Certified maximum of a polynomial against Remez bounds.
    RemezCheck(RemezCheckArgs),
    /// Propagate smallness along a horizontal line.
    Propagate(PropagateArgs),
    /// Three-square comparison of max |u| on Q_N/4, Q_N/2, Q_N.
    ThreeCircle(ThreeCircleArgs),
    /// Search for a good square.
    GoodrectScan(GoodrectScanArgs),
    /// Greedy disjoint selection from a square family.
    Vitali(VitaliArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
}

/// A grid read from a file or built from a named example.
#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct GridSource {
    /// Grid JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Example name: chelkak34, halfplane, eigen2d.
    #[arg(long)]
    pub example: Option<String>,
    /// Window radius of the example.
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Free diagonals of the half-plane example (0 means all).
    #[arg(long)]
    pub diagonals: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: Option<i64>,
    /// Boundary data as a grid JSON file on Q_N.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    /// kernel, direct (exact rational) or direct-float.
    #[arg(long)]
    pub method: Option<String>,
    /// Seed for random rational boundary data when no file is given.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct KernelDumpArgs {
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct ExtendLshapeArgs {
    /// L-shape data JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Rectangle a1,a2,b1,b2 (half-integers) for random data.
    #[arg(long)]
    pub rect: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Denominator of random values.
    #[arg(long)]
    pub den: Option<i64>,
    /// Set the two bottom lines to zero and report line polynomials.
    #[arg(long)]
    pub zero_bottom: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct HalfplaneArgs {
    #[arg(long)]
    pub n: Option<i64>,
    /// Diagonal seed JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub diagonals: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct ExampleArgs {
    /// chelkak34, halfplane, eigen2d or lift3d.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub diagonals: Option<usize>,
    /// exact (default) or float.
    #[arg(long)]
    pub kind: Option<String>,
    /// Bits for float output; defaults to HARMLAB_PRECISION or 256.
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct PortionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GridSource,
    /// Threshold in the scalar grammar; default 1.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Radius K of Q_K; default the window radius.
    #[arg(long)]
    pub radius: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct GrowthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GridSource,
    /// Radii as 1..100 or 1,2,5.
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct DoublingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GridSource,
    #[arg(long)]
    pub radii: Option<String>,
    /// Rate of the exponential branch; default 1.3.
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct RemezCheckArgs {
    /// Coefficients c0,c1,... (rationals).
    #[arg(long)]
    pub poly: Option<String>,
    /// Interval lo,hi.
    #[arg(long)]
    pub interval: Option<String>,
    /// Subset pieces "a,b;c,d" for the continuous bound.
    #[arg(long)]
    pub subset: Option<String>,
    /// Points x1,x2,... for the discrete bound.
    #[arg(long)]
    pub points: Option<String>,
    /// Bound M on |p| at the points; default the exact maximum there.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct PropagateArgs {
    #[arg(long)]
    pub n: Option<i64>,
    /// Line m0; when absent every line |m0| < N/2 is tried.
    #[arg(long)]
    pub line: Option<i64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Seed of random +-amplitude boundary data.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub amplitude: Option<i64>,
    /// Boundary data grid JSON instead of random data.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct ThreeCircleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GridSource,
    /// Smallness level; default max |u| on Q_{N/4}.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Parameters C,beta,c to test instead of fitting.
    #[arg(long)]
    pub params: Option<String>,
    /// Decay rate c used by the fit; default 2.
    #[arg(long)]
    pub fit_c: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct GoodrectScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: GridSource,
    /// Search radius K.
    #[arg(long)]
    pub k: Option<i64>,
    /// Base A (rational); default 7.
    #[arg(long)]
    pub base: Option<String>,
    /// Bad-cell fraction threshold; default 1e-3.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct VitaliArgs {
    /// Square family JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed for a random family when no file is given.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Random corners lie in [-range, range] (doubled units).
    #[arg(long)]
    pub range: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(default)]
pub struct VerifyArgs {
    /// quick (default) or full.
    #[arg(long)]
    pub level: Option<String>,
    /// Inject a fault to exercise failure reporting: kernel-sign-flip.
    #[arg(long)]
    pub inject_fault: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Precondition(format!("--{flag} is required")))
}

fn distinct(input: Option<&PathBuf>, out: Option<&PathBuf>) -> Result<()> {
    if let (Some(a), Some(b)) = (input, out) {
        if a == b {
            return precondition(format!("input and output paths must differ: {}", a.display()));
        }
    }
    Ok(())
}

fn example_name(s: &str) -> Result<ExampleName> {
    s.parse()
}

fn load_source(src: &GridSource, default_n: Option<i64>) -> Result<GridFunction> {
    match (&src.input, &src.example) {
        (Some(path), None) => GridFunction::from_json(&read_text(path)?),
        (None, Some(name)) => {
            let n = src.n.or(default_n).ok_or_else(|| Error::Precondition("--n is required".into()))?;
            let name = example_name(name)?;
            if name == ExampleName::Halfplane && src.seed.is_none() {
                return precondition("the halfplane example needs --seed");
            }
            let spec = ExampleSpec { name, radius: n, seed: src.seed.unwrap_or(0), diagonals: src.diagonals.unwrap_or(0) };
            match build_example(&spec)? {
                Example::Grid(g) => Ok(g),
                Example::Grid3(_) => precondition("this command needs a planar grid"),
            }
        }
        _ => precondition("give exactly one of --input and --example"),
    }
}

fn window_radius(u: &GridFunction) -> Result<i64> {
    u.square().map(|q| q.radius).ok_or_else(|| Error::Precondition("a standard grid is required".into()))
}

fn write_grid(out: Option<&PathBuf>, head: Value, u: &GridFunction, extra: Value) -> Result<()> {
    if is_csv(out) {
        return write_csv(out, &head, &u.to_csv());
    }
    let mut body = u.to_json_value();
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.extend(e);
    }
    write_json(out, head, body)
}

fn parse_rational(text: &str) -> Result<BigRational> {
    parse_scalar(text, ScalarKind::Rational)?
        .as_rational()
        .ok_or_else(|| Error::Precondition(format!("not a rational: {text:?}")))
}

fn parse_interval(text: &str) -> Result<Interval> {
    let (a, b) = text.split_once(',').ok_or_else(|| Error::Precondition(format!("interval must be lo,hi; got {text:?}")))?;
    Interval::new(parse_rational(a.trim())?, parse_rational(b.trim())?)
}

fn cmd_solve(a: SolveArgs, cfg: &Value) -> Result<()> {
    distinct(a.boundary.as_ref(), a.out.as_ref())?;
    let data = match &a.boundary {
        Some(p) => {
            let d = BoundaryData::from_grid(&GridFunction::from_json(&read_text(p)?)?)?;
            if a.n.is_some_and(|n| n != d.n()) {
                return precondition(format!("--n disagrees with the boundary file (N = {})", d.n()));
            }
            d
        }
        None => {
            let seed = need(&a.seed, "seed (or --boundary)")?;
            BoundaryData::random_rational(need(&a.n, "n")?, 16, &mut crate::rng::seeded(seed))?
        }
    };
    let u = match a.method.as_deref().unwrap_or("kernel") {
        "kernel" => solve_kernel(&data)?,
        "direct" => solve_direct(&data, DirectMode::ExactRational)?,
        "direct-float" => solve_direct(&data, DirectMode::FloatIterative(SorOptions::default()))?,
        m => return precondition(format!("unknown method {m:?}; expected kernel, direct or direct-float")),
    };
    let head = header("solve", cfg, a.seed.filter(|_| a.boundary.is_none()), &u.kind().to_string());
    write_grid(a.out.as_ref(), head, &u, json!({}))
}

fn cmd_kernel_dump(a: KernelDumpArgs, cfg: &Value) -> Result<()> {
    let table = build_kernel_table(need(&a.n, "n")?)?;
    let head = header("kernel-dump", cfg, None, "float(53)");
    write_csv(a.out.as_ref(), &head, &table.to_csv())
}

fn parse_rect(text: &str) -> Result<SlopedRect> {
    let v: Vec<HalfInt> = parse_list(text, "rectangle")?;
    if v.len() != 4 {
        return precondition(format!("rectangle needs a1,a2,b1,b2; got {text:?}"));
    }
    SlopedRect::new(v[0], v[1], v[2], v[3])
}

fn cmd_extend_lshape(a: ExtendLshapeArgs, cfg: &Value) -> Result<()> {
    distinct(a.input.as_ref(), a.out.as_ref())?;
    let zero_bottom = a.zero_bottom.unwrap_or(false);
    let data = match (&a.input, &a.rect) {
        (Some(p), None) => {
            let f: LShapeFile = serde_json::from_str(&read_text(p)?)?;
            LShapeData::from_file(&f)?
        }
        (None, Some(r)) => {
            let seed = need(&a.seed, "seed")?;
            random_lshape(parse_rect(r)?, a.den.unwrap_or(16), zero_bottom, &mut crate::rng::seeded(seed))?
        }
        _ => return precondition("give exactly one of --input and --rect"),
    };
    let u = extend_lshape(&data)?;
    let bounds = check_seven_bounds(&data, &u)?;
    let mut extra = json!({ "seven_bounds": bounds });
    if zero_bottom {
        let r = *data.rect();
        let lines = (r.b1.doubled() + 2..=r.b2.doubled())
            .map(|k2| {
                line_polynomial(&u, &r, k2)
                    .map(|lp| json!({"k": lp.k, "degree_bound": lp.degree_bound, "poly": lp.poly.to_string()}))
            })
            .collect::<Result<Vec<_>>>()?;
        extra["line_polynomials"] = Value::Array(lines);
    }
    let head = header("extend-lshape", cfg, a.seed.filter(|_| a.input.is_none()), &u.kind().to_string());
    write_grid(a.out.as_ref(), head, &u, extra)
}

fn cmd_halfplane(a: HalfplaneArgs, cfg: &Value) -> Result<()> {
    distinct(a.input.as_ref(), a.out.as_ref())?;
    let seed = match &a.input {
        Some(p) => {
            let f: DiagonalSeedFile = serde_json::from_str(&read_text(p)?)?;
            DiagonalSeed::from_file(&f)?
        }
        None => random_diagonal_seed(
            need(&a.n, "n")?,
            a.diagonals.unwrap_or(0),
            &mut crate::rng::seeded(need(&a.seed, "seed (or --input)")?),
        )?,
    };
    let u = halfplane_construct(&seed)?;
    let extra = json!({ "diagonal_seed": seed.to_file() });
    let head = header("halfplane", cfg, a.seed.filter(|_| a.input.is_none()), &u.kind().to_string());
    write_grid(a.out.as_ref(), head, &u, extra)
}

fn cmd_example(a: ExampleArgs, cfg: &Value) -> Result<()> {
    let name = example_name(&need(&a.name, "name")?)?;
    if name == ExampleName::Halfplane && a.seed.is_none() {
        return precondition("the halfplane example needs --seed");
    }
    let spec = ExampleSpec { name, radius: need(&a.n, "n")?, seed: a.seed.unwrap_or(0), diagonals: a.diagonals.unwrap_or(0) };
    let target = match a.kind.as_deref().unwrap_or("exact") {
        "exact" => None,
        "float" => Some(ScalarKind::Float(match a.precision {
            Some(p) => p,
            None => output::default_precision()?,
        })),
        k => return precondition(format!("unknown kind {k:?}; expected exact or float")),
    };
    let seed = (name == ExampleName::Halfplane).then_some(spec.seed);
    let meta = json!({ "example": name.to_string(), "z_minus_includes_zero": Z_MINUS_INCLUDES_ZERO });
    match build_example(&spec)? {
        Example::Grid(g) => {
            let g = match target {
                Some(k) => g.map(k, |v| v.convert(k).expect("exact values convert to floats"))?,
                None => g,
            };
            let head = header("example", cfg, seed, &g.kind().to_string());
            write_grid(a.out.as_ref(), head, &g, json!({ "example_meta": meta }))
        }
        Example::Grid3(g) => {
            let values: Vec<Scalar> = match target {
                Some(k) => g.values().iter().map(|v| v.convert(k)).collect::<std::result::Result<_, _>>()?,
                None => g.values().to_vec(),
            };
            let kind = values.first().map_or(g.kind(), Scalar::kind);
            let head = header("example", cfg, seed, &kind.to_string());
            if is_csv(a.out.as_ref()) {
                let g3 = crate::gallery::Grid3Function::from_fn(g.radius(), kind, {
                    let mut it = values.into_iter();
                    move |_, _, _| it.next().expect("value")
                })?;
                write_csv(a.out.as_ref(), &head, &g3.to_csv())
            } else {
                let strings: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                let body = json!({
                    "coords": "cube", "radius": g.radius(), "scalar_kind": kind.to_string(),
                    "values": strings, "example_meta": meta,
                });
                write_json(a.out.as_ref(), head, body)
            }
        }
    }
}

fn source_seed(src: &GridSource) -> Option<u64> {
    src.example.as_deref().filter(|e| *e == "halfplane").and(src.seed)
}

fn cmd_portion(a: PortionArgs, cfg: &Value) -> Result<()> {
    distinct(a.source.input.as_ref(), a.out.as_ref())?;
    let u = load_source(&a.source, None)?;
    let k = a.radius.unwrap_or(window_radius(&u)?);
    let threshold = parse_scalar(a.threshold.as_deref().unwrap_or("1"), ScalarKind::Rational)?;
    let q = Square::centered(k);
    let p = portion_below(&u, &threshold, &q)?;
    let body = json!({
        "radius": k, "cells": q.cell_count(), "threshold": threshold.to_string(),
        "portion": p.to_string(), "portion_f64": Scalar::rational(p).to_f64(),
        "z_minus_includes_zero": Z_MINUS_INCLUDES_ZERO,
    });
    write_json(a.out.as_ref(), header("portion", cfg, source_seed(&a.source), &u.kind().to_string()), body)
}

fn cmd_growth(a: GrowthArgs, cfg: &Value) -> Result<()> {
    distinct(a.source.input.as_ref(), a.out.as_ref())?;
    let radii = parse_radii(&need(&a.radii, "radii")?)?;
    let rmax = radii.iter().copied().max().unwrap_or(0);
    let u = load_source(&a.source, Some(rmax))?;
    let prof = growth_profile(&u, &radii)?;
    let lo = radii.iter().copied().min().unwrap_or(0);
    let slope = prof.log_slope(lo, rmax);
    let mut csv = String::from("k,max,ln_max,fitted_slope\n");
    for (k, m) in prof.radii.iter().zip(&prof.maxima) {
        let s = slope.map_or(String::new(), |s| format!("{s:.12}"));
        csv.push_str(&format!("{k},{m},{:.12},{s}\n", m.ln_abs()));
    }
    write_csv(a.out.as_ref(), &header("growth", cfg, source_seed(&a.source), &u.kind().to_string()), &csv)
}

fn cmd_doubling(a: DoublingArgs, cfg: &Value) -> Result<()> {
    distinct(a.source.input.as_ref(), a.out.as_ref())?;
    let radii = parse_radii(&need(&a.radii, "radii")?)?;
    let mut all: Vec<i64> = radii.iter().flat_map(|&k| [k, 2 * k]).collect();
    all.sort_unstable();
    all.dedup();
    let u = load_source(&a.source, all.last().copied())?;
    let prof = growth_profile(&u, &all)?;
    let rows = doubling_report(&prof, a.c1.unwrap_or(1.3))?;
    let mut csv = String::from("k,ln_m_k,ln_m_2k,power,exponential,branch\n");
    for r in rows.iter().filter(|r| radii.contains(&r.k)) {
        let branch = serde_json::to_value(r.branch)?;
        csv.push_str(&format!(
            "{},{:.12},{:.12},{},{},{}\n",
            r.k,
            r.ln_m_k,
            r.ln_m_2k,
            r.power,
            r.exponential,
            branch.as_str().unwrap_or("")
        ));
    }
    write_csv(a.out.as_ref(), &header("doubling", cfg, source_seed(&a.source), &u.kind().to_string()), &csv)
}

fn cmd_remez_check(a: RemezCheckArgs, cfg: &Value) -> Result<()> {
    let p = Polynomial::parse(&need(&a.poly, "poly")?)?;
    let iv = parse_interval(&need(&a.interval, "interval")?)?;
    let pm = poly_max(&p, &iv)?;
    let mut body = json!({ "poly": p.to_string(), "interval": iv.to_string(), "degree": p.degree(), "poly_max": pm });
    if let Some(sub) = &a.subset {
        let pieces = sub.split(';').map(parse_interval).collect::<Result<Vec<_>>>()?;
        let b = remez_bound(&p, &iv, &pieces, None)?;
        body["remez_bound"] = json!(b.to_string());
        body["remez_dominates"] = json!(b >= pm.value);
    }
    if let Some(pts) = &a.points {
        let pts = pts.split(',').map(|t| parse_rational(t.trim())).collect::<Result<Vec<_>>>()?;
        let m = match &a.m {
            Some(m) => parse_rational(m)?,
            None => pts.iter().map(|x| num_traits::Signed::abs(&p.eval(x))).max().unwrap_or_default(),
        };
        let b = remez_bound_discrete(&p, &iv, &pts, &m)?;
        body["m"] = json!(m.to_string());
        body["discrete_bound"] = json!(b.to_string());
        body["discrete_dominates"] = json!(b >= pm.value);
    }
    if a.subset.is_none() && a.points.is_none() {
        return precondition("give --subset or --points (or both)");
    }
    write_json(a.out.as_ref(), header("remez-check", cfg, None, "rational"), body)
}

fn cmd_propagate(a: PropagateArgs, cfg: &Value) -> Result<()> {
    distinct(a.boundary.as_ref(), a.out.as_ref())?;
    let data = match &a.boundary {
        Some(p) => BoundaryData::from_grid(&GridFunction::from_json(&read_text(p)?)?)?,
        None => {
            let n = need(&a.n, "n")?;
            let amp = a.amplitude.unwrap_or(1);
            let signs = BoundaryData::random_signs(n, &mut crate::rng::seeded(need(&a.seed, "seed (or --boundary)")?))?;
            BoundaryData::from_fn(n, ScalarKind::Rational, |c| {
                Scalar::integer(amp * signs.get(c).expect("same cells").to_f64() as i64)
            })?
        }
    };
    let n = data.n();
    let sigma = need(&a.sigma, "sigma")?;
    let gamma = a.gamma.unwrap_or(DEFAULT_GAMMA);
    let u = crate::dirichlet::direct::solve_direct_f64(&data, &SorOptions::default())?;
    let side = (2 * n + 1) as usize;
    let inner = (gamma * n as f64).floor() as i64;
    let lines: Vec<i64> = match a.line {
        Some(m) => vec![m],
        None => (-(n - 1) / 2..=(n - 1) / 2).collect(),
    };
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for m0 in lines {
        if 2 * m0.abs() >= n {
            return precondition(format!("line m0 = {m0} needs |m0| < N/2 with N = {n}"));
        }
        let small: Vec<i64> =
            (-inner..=inner).filter(|&x| u[(m0 + n) as usize * side + (x + n) as usize].abs() <= sigma).collect();
        if 4 * small.len() < (2 * inner + 1) as usize || small.is_empty() {
            skipped.push(m0);
            continue;
        }
        let setup = PropagationSetup::new(n, m0)?;
        reports.push(propagate_with(&setup, &data, sigma, gamma, &small)?);
    }
    let seed = a.seed.filter(|_| a.boundary.is_none());
    let head = header("propagate", cfg, seed, &data.kind().to_string());
    let body = if a.line.is_some() {
        match reports.pop() {
            Some(r) => serde_json::to_value(r)?,
            None => return precondition("too few small points on the requested line"),
        }
    } else {
        let all = reports.iter().all(|r| r.dominates);
        json!({ "reports": reports, "skipped_lines": skipped, "all_dominate": all })
    };
    write_json(a.out.as_ref(), head, body)
}

fn cmd_three_circle(a: ThreeCircleArgs, cfg: &Value) -> Result<()> {
    distinct(a.source.input.as_ref(), a.out.as_ref())?;
    let u = load_source(&a.source, None)?;
    let n = window_radius(&u)?;
    let sigma = match a.sigma {
        Some(s) => s,
        None => u.max_abs_on(&Square::centered(n / 4))?.to_f64(),
    };
    let mode = match &a.params {
        Some(p) => {
            let v: Vec<f64> = parse_list(p, "params")?;
            if v.len() != 3 {
                return precondition("--params needs C,beta,c");
            }
            ThreeCircleMode::Params(RemainderParams::new(v[0], v[1], v[2])?)
        }
        None => ThreeCircleMode::Fit { c: a.fit_c.unwrap_or(2.0) },
    };
    let rep = three_circle_report(&u, n, sigma, mode)?;
    let body = json!({ "mode": mode, "report": rep });
    write_json(a.out.as_ref(), header("three-circle", cfg, source_seed(&a.source), &u.kind().to_string()), body)
}

fn cmd_goodrect_scan(a: GoodrectScanArgs, cfg: &Value) -> Result<()> {
    distinct(a.source.input.as_ref(), a.out.as_ref())?;
    let k = need(&a.k, "k")?;
    let u = load_source(&a.source, Some(2 * k))?;
    let u = if u.rect().is_some() { u } else { to_sloped(&u)? };
    let mut gcfg = GoodnessConfig::default();
    if let Some(b) = &a.base {
        gcfg.base = parse_rational(b)?;
    }
    if let Some(t) = a.threshold {
        gcfg.bad_threshold = t;
    }
    gcfg.validate()?;
    let outcome = find_good_square(&u, k, &gcfg)?;
    let body = json!({ "goodness": gcfg, "outcome": outcome });
    write_json(a.out.as_ref(), header("goodrect-scan", cfg, source_seed(&a.source), &u.kind().to_string()), body)
}

/// A random family of squares with corners in `[−range, range]` (doubled).
pub fn random_family(seed: u64, count: usize, range: i64) -> Result<SquareFamily> {
    use rand::Rng;
    let mut rng = crate::rng::seeded(seed);
    let span = range.max(1);
    let amb = SlopedRect::from_doubled(-3 * span, 3 * span, -3 * span, 3 * span)?;
    let squares = (0..count)
        .map(|_| {
            let a1 = rng.random_range(-span..=span);
            let b1 = rng.random_range(-span..=span);
            let l = rng.random_range(0..=span);
            SlopedRect::from_doubled(a1, a1 + l, b1, b1 + l)
        })
        .collect::<Result<Vec<_>>>()?;
    SquareFamily::new(amb, squares)
}

fn cmd_vitali(a: VitaliArgs, cfg: &Value) -> Result<()> {
    distinct(a.input.as_ref(), a.out.as_ref())?;
    let fam = match &a.input {
        Some(p) => SquareFamily::from_json(&read_text(p)?)?,
        None => random_family(need(&a.seed, "seed (or --input)")?, a.count.unwrap_or(20), a.range.unwrap_or(30))?,
    };
    let sel = vitali_select(&fam);
    let check = check_cover(&fam, &sel)?;
    let selected: Value = serde_json::from_str(&sel.to_json()?)?;
    let body = json!({ "input_count": fam.squares.len(), "selected": selected, "check": check });
    write_json(a.out.as_ref(), header("vitali", cfg, a.seed.filter(|_| a.input.is_none()), "integer"), body)
}

fn cmd_verify(a: VerifyArgs, cfg: &Value) -> Result<bool> {
    let level = match a.level.as_deref().unwrap_or("quick") {
        "quick" => Level::Quick,
        "full" => Level::Full,
        l => return precondition(format!("unknown level {l:?}; expected quick or full")),
    };
    let fault = match a.inject_fault.as_deref() {
        None => None,
        Some("kernel-sign-flip") => Some(Fault::KernelSignFlip),
        Some(f) => return precondition(format!("unknown fault {f:?}; expected kernel-sign-flip")),
    };
    let results = run_suite(level, fault, |r| eprintln!("{}", r.line()));
    let passed = results.iter().all(|r| r.passed);
    let body = json!({ "level": a.level.as_deref().unwrap_or("quick"), "passed": passed, "checks": results });
    if a.out.is_some() {
        write_json(a.out.as_ref(), header("verify", cfg, None, "mixed"), body)?;
    }
    Ok(passed)
}

fn dispatch(cli: Cli) -> Result<bool> {
    let cfg = cli.config.as_deref();
    macro_rules! run {
        ($args:expr, $f:ident) => {{
            let (a, echo) = merge_config(&$args, cfg)?;
            $f(a, &echo).map(|_| true)
        }};
    }
    match cli.command {
        Command::Solve(a) => run!(a, cmd_solve),
        Command::KernelDump(a) => run!(a, cmd_kernel_dump),
        Command::ExtendLshape(a) => run!(a, cmd_extend_lshape),
        Command::Halfplane(a) => run!(a, cmd_halfplane),
        Command::Example(a) => run!(a, cmd_example),
        Command::Portion(a) => run!(a, cmd_portion),
        Command::Growth(a) => run!(a, cmd_growth),
        Command::Doubling(a) => run!(a, cmd_doubling),
        Command::RemezCheck(a) => run!(a, cmd_remez_check),
        Command::Propagate(a) => run!(a, cmd_propagate),
        Command::ThreeCircle(a) => run!(a, cmd_three_circle),
        Command::GoodrectScan(a) => run!(a, cmd_goodrect_scan),
        Command::Vitali(a) => run!(a, cmd_vitali),
        Command::Verify(a) => {
            let (a, echo) = merge_config(&a, cfg)?;
            cmd_verify(a, &echo)
        }
    }
}

/// Exit code for an error: 2 for I/O, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Numeric(_) => "numeric",
        Error::Precondition(_) => "precondition",
        Error::OutOfWindow(_) => "out_of_window",
        Error::NoConvergence { .. } => "no_convergence",
        Error::Format(_) => "format",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{}", json!({ "error": error_kind(&e), "reason": e.to_string() }));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn run(args: &[&str]) -> i32 {
        let mut v = vec!["harmlab"];
        v.extend_from_slice(args);
        run_args(v)
    }

    #[test]
    fn solve_round_trip_and_rerun() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("u.json");
        let o = out.to_str().unwrap();
        assert_eq!(run(&["solve", "--n", "4", "--seed", "3", "--out", o]), 0);
        let first = fs::read(&out).unwrap();
        assert_eq!(run(&["solve", "--n", "4", "--seed", "3", "--out", o]), 0);
        assert_eq!(first, fs::read(&out).unwrap());
        let text = String::from_utf8(first).unwrap();
        assert!(text.contains("\"header\"") && text.contains("\"seed\": 3"));
        let u = GridFunction::from_json(&text).unwrap();
        assert_eq!(u.square(), Some(Square::centered(4)));
        // The solution's boundary feeds back in as boundary data.
        let out2 = dir.path().join("v.json");
        assert_eq!(run(&["solve", "--boundary", o, "--method", "direct-float", "--out", out2.to_str().unwrap()]), 0);
        // Exact data only comes from an exact solve.
        assert_eq!(run(&["solve", "--boundary", o, "--method", "direct", "--out", out2.to_str().unwrap()]), 1);
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.json");
        let o = out.to_str().unwrap();
        assert_eq!(run(&["solve", "--n", "4", "--out", o]), 1);
        assert_eq!(run(&["solve", "--n", "4", "--seed", "1", "--method", "magic", "--out", o]), 1);
        assert_eq!(run(&["solve", "--boundary", "/nonexistent/b.json", "--out", o]), 2);
        let bad_dir = dir.path().join("missing").join("u.json");
        assert_eq!(run(&["solve", "--n", "2", "--seed", "1", "--out", bad_dir.to_str().unwrap()]), 2);
        assert_eq!(run(&["no-such-command"]), 1);
    }

    #[test]
    fn config_file_supplies_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"name": "eigen2d", "n": 3}"#).unwrap();
        let out = dir.path().join("e.csv");
        let c = cfg.to_str().unwrap();
        assert_eq!(run(&["example", "--config", c, "--n", "2", "--out", out.to_str().unwrap()]), 0);
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("# command: \"example\""));
        assert!(text.contains("n,m,value\n-2,-2,1\n"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 25);
    }

    #[test]
    fn remez_worked_example() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.json");
        let args = ["remez-check", "--poly", "0,0,1", "--interval", "0,10", "--points", "0,1,2,3,4,5", "--m", "25"];
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--out", out.to_str().unwrap()]);
        assert_eq!(run(&v), 0);
        let j: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(j["discrete_bound"], "2500");
        assert_eq!(j["poly_max"]["value"], "100");
        assert_eq!(j["discrete_dominates"], true);
    }

    #[test]
    fn propagate_example_dominates() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("p.json");
        let args = ["propagate", "--n", "64", "--line", "0", "--sigma", "1", "--gamma", "0.00006", "--seed", "7"];
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--out", out.to_str().unwrap()]);
        assert_eq!(run(&v), 0);
        let j: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(j["dominates"], true);
        assert_eq!(j["header"]["seed"], 7);
    }
}
