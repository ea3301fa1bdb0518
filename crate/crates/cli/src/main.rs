//! `starlog` command-line harness.
//!
//! Exit codes: 0 success (for `verify`: every property passed), 1 a
//! property failed or the library reported an error, 2 malformed input or
//! configuration, 3 a point outside the function domain.

mod suites;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde::Serialize;
use serde_json::json;

use starlog::bch::{bch_combine, bch_condition_at, bch_residuals};
use starlog::lift::{frak_e_preimage, lift_path, loop_monodromy, BranchIndex, SampledPath};
use starlog::slice::{slice_derivative, slice_point};
use starlog::starlog::{star_exp, star_log, star_pow, star_root, LogBranchSpec};
use starlog::{exp_slice_derivative, CQuat, Error, FnDescriptor, Quat, Slice};

use suites::{Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "starlog", version, about = "Slice-regular exponentials, logarithms and products")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of sample points.
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    /// Tolerance override, `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    tol: Vec<String>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output; only for sample grids.
    #[arg(long, global = true)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at a quaternion.
    Eval {
        #[arg(long = "f")]
        f: PathBuf,
        /// Quaternion as a JSON array `[q0, q1, q2, q3]`.
        #[arg(long)]
        at: String,
    },
    /// Sample a `*`-logarithm over the domain.
    Log {
        #[arg(long = "f")]
        f: PathBuf,
        /// Branch index `h1,h2`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        h: String,
    },
    /// Sample an `n`-th `*`-root over the domain.
    Root {
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        h: String,
    },
    /// Exponential condition for `exp_*(f) * exp_*(g)` and, when it holds, the combined exponent.
    Bch {
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long = "g")]
        g: PathBuf,
    },
    /// Slice derivative of `exp_*(f)` with a quadrature cross-check.
    Dexp {
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long)]
        at: String,
    },
    /// Lift a sampled path through the covering.
    Lift {
        #[arg(long)]
        path: PathBuf,
        /// Branch of the starting point.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        h: String,
    },
    /// Monodromy index of a sampled loop.
    Monodromy {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        h: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

/// Error classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Domain(anyhow::Error),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Domain(_) => 3,
            Self::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfDomain { .. } => Self::Domain(e.into()),
            Error::InvalidDomain(_) | Error::BadExampleInput(_) => Self::Config(e.into()),
            e => Self::Other(e.into()),
        }
    }
}

fn config(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

type Res<T> = Result<T, Failure>;

enum Output {
    Json(serde_json::Value),
    Grid { json: serde_json::Value, csv: String },
}

fn read_descriptor(path: &Path) -> Res<(FnDescriptor, Slice)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(config)?;
    let d: FnDescriptor =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(config)?;
    let f = d.build::<f64>().map_err(|e| config(anyhow!("{}: {e}", path.display())))?;
    Ok((d, f))
}

fn read_path(path: &Path) -> Res<SampledPath<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(config)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(config)
}

fn parse_quat(s: &str) -> Res<Quat> {
    serde_json::from_str(s).with_context(|| format!("quaternion `{s}` is not a JSON array of four numbers")).map_err(config)
}

fn parse_branch(s: &str) -> Res<BranchIndex> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || config(anyhow!("branch index `{s}` must look like `h1,h2`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let h1 = parts[0].parse().map_err(|_| bad())?;
    let h2 = parts[1].parse().map_err(|_| bad())?;
    Ok(BranchIndex::new(h1, h2))
}

fn parse_tolerances(items: &[String]) -> Res<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| config(anyhow!("tolerance `{item}` must be KEY=VAL")))?;
        let v: f64 = v.parse().map_err(|_| config(anyhow!("tolerance `{item}` has a non-numeric value")))?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(config(anyhow!("tolerance `{item}` must be positive")));
        }
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

const CSV_HEADER: &str = "re,im,z0_re,z0_im,z1_re,z1_im,z2_re,z2_im,z3_re,z3_im";

fn csv_row(buf: &mut String, z: Complex<f64>, v: CQuat) {
    let _ = write!(buf, "{},{}", z.re, z.im);
    for c in [v.z0, v.z1, v.z2, v.z3] {
        let _ = write!(buf, ",{},{}", c.re, c.im);
    }
}

#[derive(Serialize)]
struct GridSample {
    z: Complex<f64>,
    value: CQuat,
    residual: f64,
}

/// Samples `g` over its domain, with `residual(z, g(z))` per point.
fn grid(
    g: &Slice,
    samples: usize,
    residual: impl Fn(Complex<f64>, CQuat) -> Res<f64>,
) -> Res<(Vec<GridSample>, String)> {
    let mut rows = Vec::with_capacity(samples);
    let mut csv = format!("{CSV_HEADER},residual\n");
    for z in g.domain().sample_points(samples) {
        let v = g.stem(z)?;
        let r = residual(z, v)?;
        csv_row(&mut csv, z, v);
        let _ = writeln!(csv, ",{r}");
        rows.push(GridSample { z, value: v, residual: r });
    }
    Ok((rows, csv))
}

fn stats(rows: &[GridSample]) -> serde_json::Value {
    let n = rows.len().max(1) as f64;
    let max = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.residual).sum::<f64>() / n;
    json!({"max": max, "mean": mean})
}

fn run(cli: &Cli) -> Res<Output> {
    let g = &cli.global;
    if g.samples == 0 {
        return Err(config(anyhow!("--samples must be at least 1")));
    }
    let tolerances = parse_tolerances(&g.tol)?;
    let grid_verb = matches!(cli.cmd, Command::Log { .. } | Command::Root { .. });
    if g.csv && !grid_verb {
        return Err(config(anyhow!("--csv is only available for sample grids (log, root)")));
    }
    if !tolerances.is_empty() && !matches!(cli.cmd, Command::Verify { .. }) {
        return Err(config(anyhow!("--tol only applies to verify")));
    }
    match &cli.cmd {
        Command::Eval { f, at } => {
            let (d, func) = read_descriptor(f)?;
            let q = parse_quat(at)?;
            let v = func.eval(q)?;
            Ok(Output::Json(json!({"function": d, "q": q, "value": v})))
        }
        Command::Log { f, h } => {
            let (d, func) = read_descriptor(f)?;
            let h = parse_branch(h)?;
            let spec = LogBranchSpec::new(func.domain(), h);
            let lg = star_log(&func, &spec)?;
            let back = star_exp(&lg);
            let (rows, csv) = grid(&lg, g.samples, |z, _| Ok(back.stem(z)?.distance(func.stem(z)?)))?;
            let json = json!({
                "function": d,
                "h": h,
                "basepoint": spec.effective_basepoint(func.domain()),
                "round_trip": stats(&rows),
                "samples": rows,
            });
            Ok(Output::Grid { json, csv })
        }
        Command::Root { f, n, h } => {
            let (d, func) = read_descriptor(f)?;
            let h = parse_branch(h)?;
            let spec = LogBranchSpec::new(func.domain(), h);
            let r = star_root(&func, *n, &spec)?;
            let power = star_pow(&r, *n)?;
            let (rows, csv) = grid(&r, g.samples, |z, _| Ok(power.stem(z)?.distance(func.stem(z)?)))?;
            let json = json!({"function": d, "n": n, "h": h, "power_residual": stats(&rows), "samples": rows});
            Ok(Output::Grid { json, csv })
        }
        Command::Bch { f, g: gp } => {
            let (_, ff) = read_descriptor(f)?;
            let (_, gg) = read_descriptor(gp)?;
            let report = bch_condition_at(&ff, &gg, g.samples)?;
            let mut out = json!({"report": report});
            if report.admissible {
                match bch_combine(&ff, &gg) {
                    Ok(h) => {
                        let mut worst_c = 0.0f64;
                        let mut worst_w = 0.0f64;
                        let mut values = Vec::new();
                        for s in &report.samples {
                            let hz = h.stem(s.z)?;
                            let (dc, dw) = bch_residuals(ff.stem(s.z)?, gg.stem(s.z)?, hz)?;
                            worst_c = worst_c.max(dc);
                            worst_w = worst_w.max(dw);
                            values.push(json!({"z": s.z, "value": hz}));
                        }
                        out["combined"] = json!({"samples": values, "residual_cos": worst_c, "residual_vec": worst_w});
                    }
                    Err(e) => out["combined_error"] = json!(e.to_string()),
                }
            }
            Ok(Output::Json(out))
        }
        Command::Dexp { f, at } => {
            let (_, func) = read_descriptor(f)?;
            let q = parse_quat(at)?;
            let (v, regime) = exp_slice_derivative(&func, q)?;
            let oracle = slice_derivative(&star_exp(&func), q)?;
            let (z, _) = slice_point(q);
            Ok(Output::Json(json!({
                "q": q,
                "z": z,
                "value": v,
                "regime": regime,
                "quadrature": oracle,
                "residual": v.distance(oracle),
            })))
        }
        Command::Lift { path, h } => {
            let p = read_path(path)?;
            let start = start_point(&p, parse_branch(h)?)?;
            let lifted = lift_path(&p, &start)?;
            Ok(Output::Json(json!({"start": start, "lift": lifted})))
        }
        Command::Monodromy { path, h } => {
            let p = read_path(path)?;
            let start = start_point(&p, parse_branch(h)?)?;
            let m = loop_monodromy(&p, &start)?;
            Ok(Output::Json(json!(m)))
        }
        Command::Verify { suite } => {
            let cfg = SuiteConfig { seed: g.seed, samples: g.samples, tolerances, suite: *suite };
            let report = suites::run_suite(&cfg).map_err(config)?;
            Ok(Output::Json(serde_json::to_value(report).map_err(|e| Failure::Other(e.into()))?))
        }
    }
}

fn start_point(p: &SampledPath<f64>, h: BranchIndex) -> Res<starlog::Lift> {
    let first = p.samples.first().ok_or_else(|| config(anyhow!("path has no samples")))?;
    Ok(frak_e_preimage(first.w0, first.w1, first.s, h)?)
}

fn emit(cli: &Cli, out: &Output) -> anyhow::Result<()> {
    let text = match out {
        Output::Grid { csv, .. } if cli.global.csv => csv.clone(),
        Output::Grid { json, .. } | Output::Json(json) => serde_json::to_string_pretty(json)? + "\n",
    };
    match &cli.global.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn passed(out: &Output) -> bool {
    match out {
        Output::Json(v) => v.get("all_pass").and_then(|b| b.as_bool()).unwrap_or(true),
        Output::Grid { .. } => true,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if passed(&out) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let (Failure::Config(e) | Failure::Domain(e) | Failure::Other(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
