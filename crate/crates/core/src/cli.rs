//! Command-line front end.
//!
//! Exit codes: 0 success, 1 user error, 2 cross-check mismatch,
//! 3 violated bound under verified hypotheses.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::caps::Caps;
use crate::covers::instantiate;
use crate::document::load_complex;
use crate::error::{Error, Result};
use crate::group_ring::EquivariantChainComplex;
use crate::groups::{quotient, short_length, FiniteQuotient, Subgroup};
use crate::pattern::betti_by_characters;
use crate::spectral::bounds::{
    betti_bound_general, eig_count_bound, eig_count_trace_bound, gap_bound, ns_bound, sublog_bound, BoundReport,
};
use crate::spectral::density::{
    density_by_quotients, density_zn, log_grid, symmetric_cyclic_density, uniform_grid, DensityEstimate,
};
use crate::spectral::ns::{estimate_ns, NsEstimate};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_VIOLATED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "l2growth", version, about = "Betti numbers of finite covers and their spectral bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Gap,
    Count,
    Ns,
    Sublog,
    Raw,
}

#[derive(clap::Args, Debug)]
struct DensityArgs {
    /// Quadrature samples over the character torus.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Uniform grid `lo:hi:step`; defaults to `0:K:0.01`.
    #[arg(long)]
    grid: Option<String>,
    /// Logarithmic grid `lo:hi:points_per_decade`, with 0 prepended.
    #[arg(long, conflicts_with = "grid")]
    log_grid: Option<String>,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    /// Estimate the density from these quotients instead of the torus.
    #[arg(long = "quotient")]
    quotients: Vec<String>,
    /// Use the closed-form density of `c - b(g + g^-1)` for `g` of infinite
    /// order, given as `c,b`.
    #[arg(long, conflicts_with = "quotients")]
    cyclic_density: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti number of one finite cover.
    Betti {
        complex: PathBuf,
        /// Rows of a lattice basis (`"2 0; 0 3"`) or `"mod m"`.
        #[arg(long)]
        subgroup: String,
        #[arg(long)]
        dim: usize,
    },
    /// Spectral density function as CSV `lambda,F`.
    Density {
        complex: PathBuf,
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        density: DensityArgs,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append the Novikov-Shubin estimate as a `# alpha_hat=` line.
        #[arg(long)]
        ns: bool,
    },
    /// Evaluate a Betti number bound; several `--subgroup`s give CSV
    /// `index,short,betti,bound`.
    Bounds {
        complex: PathBuf,
        #[arg(long, required = true)]
        subgroup: Vec<String>,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long)]
        lambda0: Option<f64>,
        /// Eigenvalue threshold for the count regime.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        c_density: Option<f64>,
        /// `z` for the raw regime.
        #[arg(long)]
        z: Option<f64>,
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized invariant suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["all", "traces", "sandwich", "stripes", "bounds"])]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

/// Parses `"mod m"` or semicolon separated rows of integers.
pub fn parse_subgroup(spec: &str) -> Result<Subgroup> {
    let spec = spec.trim();
    if let Some(level) = spec.strip_prefix("mod") {
        let level = level.trim().parse().map_err(|_| Error::Invalid(format!("bad congruence level in `{spec}`")))?;
        return Subgroup::congruence(level);
    }
    let rows = spec
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|v| v.parse::<i64>().map_err(|_| Error::Invalid(format!("`{v}` is not an integer"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Subgroup::lattice(rows)
}

fn parse_triple(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad grid `{spec}`"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(Error::Invalid(format!("grid `{spec}` must be lo:hi:step"))),
    }
}

fn grid(args: &DensityArgs, k: f64) -> Result<Vec<f64>> {
    if let Some(spec) = &args.grid {
        let (lo, hi, step) = parse_triple(spec)?;
        return uniform_grid(lo, hi, step);
    }
    if let Some(spec) = &args.log_grid {
        let (lo, hi, per) = parse_triple(spec)?;
        if !(lo > 0.0 && per >= 1.0) {
            return Err(Error::Invalid("log grid needs lo > 0 and at least one point per decade".into()));
        }
        let mut g = vec![0.0];
        g.extend(log_grid(lo, hi, per as usize));
        return Ok(g);
    }
    uniform_grid(0.0, k, 0.01)
}

fn density(cx: &EquivariantChainComplex, dim: usize, args: &DensityArgs, caps: &Caps) -> Result<DensityEstimate> {
    let k = cx.laplacian(dim)?.norm_bound();
    let grid = grid(args, k)?;
    if let Some(spec) = &args.cyclic_density {
        let parts: Vec<f64> = spec
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad --cyclic-density `{spec}`"))))
            .collect::<Result<_>>()?;
        let [c, b] = parts[..] else {
            return Err(Error::Invalid("--cyclic-density takes c,b".into()));
        };
        return symmetric_cyclic_density(c, b, k, grid);
    }
    if args.quotients.is_empty() {
        density_zn(cx, dim, args.samples as usize, &grid, args.seed)
    } else {
        let family = args
            .quotients
            .iter()
            .map(|s| quotient(cx.group(), &parse_subgroup(s)?, caps))
            .collect::<Result<Vec<_>>>()?;
        density_by_quotients(cx, dim, &family, &grid, caps)
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn write_output(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Invalid(e.to_string())),
    }
}

fn cmd_betti(out: &mut dyn Write, complex: &Path, subgroup: &str, dim: usize, caps: &Caps) -> Result<i32> {
    let cx = load_complex(complex)?;
    let sub = parse_subgroup(subgroup)?;
    let q = quotient(cx.group(), &sub, caps)?;
    let short = short_length(cx.group(), &sub, caps)?;
    let b = instantiate(&cx, &q, caps)?.betti(dim)?;
    let mut line = format!("b={b} index={} short={short}", q.order());
    let mut code = EXIT_OK;
    if cx.group().is_abelian() {
        let r = betti_by_characters(&cx, &q, dim, caps)?;
        line.push_str(&format!(" character_sum={} agrees={}", r.character_sum, r.agrees));
        for d in r.diagnostics() {
            line.push_str(&format!("\nnote: {d}"));
        }
        if !r.agrees {
            code = EXIT_MISMATCH;
        }
    }
    writeln!(out, "{line}").map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(code)
}

fn cmd_density(
    out: &mut dyn Write,
    complex: &Path,
    dim: usize,
    args: &DensityArgs,
    path: Option<&PathBuf>,
    ns: bool,
    caps: &Caps,
) -> Result<i32> {
    let cx = load_complex(complex)?;
    let d = density(&cx, dim, args, caps)?;
    let mut csv = String::from("lambda,F\n");
    for (l, v) in d.grid.iter().zip(&d.values) {
        csv.push_str(&format!("{},{}\n", fmt_f64(*l), fmt_f64(*v)));
    }
    if ns {
        match estimate_ns(&d)?.estimate {
            NsEstimate::Alpha(a) => csv.push_str(&format!("# alpha_hat={a}\n")),
            NsEstimate::GapDetected => csv.push_str("# alpha_hat=gap\n"),
        }
    }
    write_output(out, path, &csv)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn one_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    regime: RegimeArg,
    lambda0: Option<f64>,
    lambda: Option<f64>,
    beta: Option<f64>,
    c_density: Option<f64>,
    z: Option<f64>,
    dens: &mut Option<DensityEstimate>,
    args: &DensityArgs,
    caps: &Caps,
) -> Result<BoundReport> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| Error::Invalid(format!("--{name} is required for this regime")));
    let density_now = |dens: &mut Option<DensityEstimate>| -> Result<DensityEstimate> {
        if dens.is_none() {
            *dens = Some(density(cx, dim, args, caps)?);
        }
        Ok(dens.clone().expect("just set"))
    };
    match regime {
        RegimeArg::Gap => {
            let d = if args.cyclic_density.is_some() { Some(density_now(dens)?) } else { None };
            gap_bound(cx, q, dim, need("lambda0", lambda0)?, d.as_ref(), caps)
        }
        RegimeArg::Count => {
            let lambda = need("lambda", lambda)?;
            let d = if args.cyclic_density.is_some() { Some(density_now(dens)?) } else { None };
            match lambda0 {
                Some(l0) => eig_count_bound(cx, q, dim, l0, lambda, d.as_ref(), caps),
                None => eig_count_trace_bound(cx, q, dim, lambda, caps),
            }
        }
        RegimeArg::Ns => {
            let d = density_now(dens)?;
            ns_bound(cx, q, dim, need("beta", beta)?, need("c-density", c_density)?, &d, None, caps)
        }
        RegimeArg::Sublog => {
            let d = if args.cyclic_density.is_some() { Some(density_now(dens)?) } else { None };
            sublog_bound(cx, q, dim, d.as_ref(), caps)
        }
        RegimeArg::Raw => {
            let d = density_now(dens)?;
            betti_bound_general(cx, q, dim, &d, need("z", z)?, caps)
        }
    }
}

fn run_command(cmd: Command, out: &mut dyn Write, caps: &Caps) -> Result<i32> {
    match cmd {
        Command::Betti { complex, subgroup, dim } => cmd_betti(out, &complex, &subgroup, dim, caps),
        Command::Density { complex, dim, density, out: path, ns } => {
            cmd_density(out, &complex, dim, &density, path.as_ref(), ns, caps)
        }
        Command::Bounds { complex, subgroup, dim, regime, lambda0, lambda, beta, c_density, z, density, out: path } => {
            let cx = load_complex(&complex)?;
            let mut dens = None;
            let mut reports = Vec::new();
            for s in &subgroup {
                let q = quotient(cx.group(), &parse_subgroup(s)?, caps)?;
                reports.push(one_bound(
                    &cx, &q, dim, regime, lambda0, lambda, beta, c_density, z, &mut dens, &density, caps,
                )?);
            }
            let code = if reports.iter().any(BoundReport::falsified) { EXIT_VIOLATED } else { EXIT_OK };
            if reports.len() == 1 && path.is_none() {
                writeln!(out, "{}", reports[0]).map_err(|e| Error::Invalid(e.to_string()))?;
            } else {
                let mut csv = String::from("index,short,betti,bound\n");
                for r in &reports {
                    csv.push_str(&format!("{},{},{},{}\n", r.index, r.short, r.measured, fmt_f64(r.bound)));
                }
                write_output(out, path.as_ref(), &csv)?;
                if path.is_some() {
                    for r in &reports {
                        writeln!(out, "{r}").map_err(|e| Error::Invalid(e.to_string()))?;
                    }
                }
            }
            Ok(code)
        }
        Command::Verify { suite, seed } => {
            let reports = verify::run(&suite, seed, caps)?;
            for r in &reports {
                writeln!(out, "{r}").map_err(|e| Error::Invalid(e.to_string()))?;
            }
            Ok(if reports.iter().all(verify::SuiteReport::ok) { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USER,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USER;
        }
    };
    match run_command(cli.command, out, &caps) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USER
        }
    }
}
