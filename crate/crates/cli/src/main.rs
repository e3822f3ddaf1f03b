//! `numindex`: norms, numerical radii and index estimates of finite-dimensional
//! real normed spaces, plus the scenario suite runner.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use numindex::numrange::{numerical_radius_hilbert, RadiusConfig};
use numindex::verify::{self, fixed12, sci12, RunOptions, Suite, SweepFamily};
use numindex::{
    numerical_radius, numerical_radius_exact, numerical_radius_sampled, IndexOptions, NormSpace,
    OperatorMatrix, Point, RadiusEstimate, RadiusMethod,
};

#[derive(Parser)]
#[command(
    name = "numindex",
    version,
    about = "Numerical radius and numerical index of finite-dimensional normed spaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for report, witness and plot files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall-clock runtimes in reports (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a vector, e.g. `numindex norm space.json 1,1,1`.
    Norm {
        space: PathBuf,
        #[arg(allow_hyphen_values = true)]
        vector: String,
    },
    /// Numerical radius of an operator given as CSV rows or a JSON array of rows.
    Radius {
        space: PathBuf,
        operator: PathBuf,
        /// Vertex enumeration (polytopes) or the symmetric spectrum (Euclidean).
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Sampled lower bound from this many unit vectors.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Index estimate with a certified lower bound; writes `index.json`.
    Index {
        space: PathBuf,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Ratio evaluations per restart.
        #[arg(long, default_value_t = 1500)]
        budget: usize,
    },
    /// Runs a scenario suite (a file, or `paper-core` for the bundled one);
    /// writes `report.csv` and `report.json`.
    Verify { suite: String },
    /// Index estimates over a range of `p`; writes `sweep-<family>.csv` and `.svg`.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// `a:b:steps`, inclusive and evenly spaced.
        #[arg(long)]
        p_range: String,
        /// Comma separated dimensions; the Lorentz family has 2 (planar section) and 3.
        #[arg(long, default_value = "2,3")]
        dims: String,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 1500)]
        budget: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lp,
    Lorentz,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("NUMINDEX_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("NUMINDEX_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("NUMINDEX_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    let mut out = String::new();
    let code = match cli.command {
        Command::Norm { space, vector } => {
            let x = load_space(&space)?;
            let v = Point::parse(&vector)?;
            writeln!(out, "{}", fixed12(x.norm(&v)?))?;
            ExitCode::SUCCESS
        }
        Command::Radius {
            space,
            operator,
            exact,
            samples,
        } => {
            let x = load_space(&space)?;
            let t = load_operator(&operator)?;
            let r = radius(&x, &t, exact, samples, g.seed)?;
            write_radius(&mut out, &r);
            ExitCode::SUCCESS
        }
        Command::Index {
            space,
            restarts,
            budget,
        } => {
            let x = load_space(&space)?;
            let opts = IndexOptions {
                restarts,
                budget,
                seed: g.seed,
                ..IndexOptions::default()
            };
            let e = verify::estimate_index(&x, &opts)?;
            let path = g.out.join("index.json");
            write_file(&path, &serde_json::to_string_pretty(&e)?)?;
            writeln!(out, "upper {}", fixed12(e.upper))?;
            writeln!(out, "lower {}", fixed12(e.lower))?;
            writeln!(out, "certificate {}", e.certificate.as_str())?;
            writeln!(out, "detail {}", e.certificate_detail)?;
            for row in e.witness.rows() {
                writeln!(out, "witness {}", join(&row))?;
            }
            writeln!(out, "witness_file {}", path.display())?;
            ExitCode::SUCCESS
        }
        Command::Verify { suite } => {
            let s = if suite == "paper-core" && !Path::new(&suite).exists() {
                Suite::paper_core()
            } else {
                let text = fs::read_to_string(&suite)
                    .with_context(|| format!("cannot read suite `{suite}`"))?;
                Suite::from_json(&text).with_context(|| format!("invalid suite `{suite}`"))?
            };
            let report = verify::run_suite(
                &s,
                &RunOptions {
                    seed: g.seed,
                    timings: g.timings,
                },
            )?;
            let csv = g.out.join("report.csv");
            write_file(&csv, &report.to_csv(g.timings))?;
            write_file(&g.out.join("report.json"), &report.to_json(g.timings)?)?;
            let rows: usize = report.reports.iter().map(|r| r.assertions.len()).sum();
            let failures = report.failures();
            for (sid, aid) in &failures {
                eprintln!("FAIL {sid}/{aid}");
            }
            writeln!(
                out,
                "{} scenarios, {} assertions, {} failed; report {}",
                report.reports.len(),
                rows,
                failures.len(),
                csv.display()
            )?;
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Sweep {
            family,
            p_range,
            dims,
            restarts,
            budget,
        } => {
            let ps = parse_range(&p_range)?;
            let dims = parse_dims(&dims)?;
            let fam = match family {
                Family::Lp => SweepFamily::Lp,
                Family::Lorentz => SweepFamily::Lorentz,
            };
            if restarts == 0 {
                bail!("--restarts must be >= 1");
            }
            let opts = IndexOptions {
                restarts,
                budget,
                seed: g.seed,
                ..IndexOptions::default()
            };
            let rows = verify::sweep(fam, &ps, &dims, &opts)?;
            let mut csv = String::from("family,p,dim,upper,lower,certificate\n");
            for r in &rows {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fam.as_str(),
                    sci12(r.p),
                    r.dim,
                    sci12(r.upper),
                    sci12(r.lower),
                    r.certificate
                )?;
            }
            let stem = format!("sweep-{}", fam.as_str());
            let csv_path = g.out.join(format!("{stem}.csv"));
            let svg_path = g.out.join(format!("{stem}.svg"));
            write_file(&csv_path, &csv)?;
            let title = match fam {
                SweepFamily::Lp => "index estimates of l_p^m".to_string(),
                SweepFamily::Lorentz => "index estimates of X_p and its planar section".to_string(),
            };
            write_file(&svg_path, &svg::plot(&title, &rows))?;
            for r in &rows {
                writeln!(
                    out,
                    "p {} dim {} upper {}",
                    fixed12(r.p),
                    r.dim,
                    fixed12(r.upper)
                )?;
            }
            writeln!(
                out,
                "wrote {} and {}",
                csv_path.display(),
                svg_path.display()
            )?;
            ExitCode::SUCCESS
        }
    };
    if !g.quiet {
        print!("{out}");
    }
    Ok(code)
}

fn radius(
    x: &NormSpace,
    t: &OperatorMatrix,
    exact: bool,
    samples: Option<usize>,
    seed: u64,
) -> Result<RadiusEstimate> {
    if exact {
        if x.is_hilbert() && !x.is_polytopal() {
            return Ok(numerical_radius_hilbert(x, t)?);
        }
        if !x.is_polytopal() {
            bail!("--exact needs a polytopal or Euclidean space; use --samples");
        }
        return Ok(numerical_radius_exact(x, t)?);
    }
    if let Some(n) = samples {
        return Ok(numerical_radius_sampled(x, t, n, seed)?);
    }
    Ok(numerical_radius(
        x,
        t,
        &RadiusConfig {
            seed,
            ..RadiusConfig::default()
        },
    )?)
}

fn write_radius(out: &mut String, r: &RadiusEstimate) {
    let method = match r.method {
        RadiusMethod::ExactVertex => "exact_vertex".to_string(),
        RadiusMethod::ExactHilbert => "exact_hilbert".to_string(),
        RadiusMethod::Sampled { n_samples, seed } => format!("sampled n={n_samples} seed={seed}"),
    };
    let _ = writeln!(out, "value {}", fixed12(r.value));
    let _ = writeln!(out, "method {method}");
    let _ = writeln!(out, "x {}", join(&r.witness.x));
    let _ = writeln!(out, "f {}", join(&r.witness.f));
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&a| fixed12(a)).collect::<Vec<_>>().join(",")
}

fn load_space(path: &Path) -> Result<NormSpace> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    NormSpace::from_json(&text).with_context(|| format!("invalid space `{}`", path.display()))
}

fn load_operator(path: &Path) -> Result<OperatorMatrix> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    OperatorMatrix::parse(&text).with_context(|| format!("invalid operator `{}`", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("--p-range must look like a:b:steps, got `{s}`");
    };
    let a: f64 = a
        .trim()
        .parse()
        .with_context(|| format!("bad range start `{a}`"))?;
    let b: f64 = b
        .trim()
        .parse()
        .with_context(|| format!("bad range end `{b}`"))?;
    let n: usize = n
        .trim()
        .parse()
        .with_context(|| format!("bad step count `{n}`"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() || a > b || (n > 1 && a == b) {
        bail!("empty p range `{s}`");
    }
    if a < 1.0 {
        bail!("p must be at least 1, got {a}");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims = s
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .with_context(|| format!("bad dimension `{d}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.contains(&0) {
        bail!("dimensions must be positive");
    }
    Ok(dims)
}
