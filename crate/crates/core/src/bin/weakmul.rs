//! Command-line driver for the sweep experiments and sphere-side checkers.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 unconverged numerics,
//! 3 failed mathematical check. Every output file begins with a header
//! block (tool version, resolved config, seed); reruns with identical flags
//! and seed are byte-identical.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakmul::{
    check_inequality_chain, linfty_probe, make_quadrature, resolve_out_dir, restriction_ratio,
    sharpness_sweep_many, weak11_sweep, write_csv_file, write_json_file,
    zygmund_functional_of_kernel, ClassAMultiplier, Error, FamilyKind, FunctionDescriptor,
    GridPolicy, KernelSource, MultiplierSpec, Result, RunConfig, SampledFunction, SweepConfig,
    UniformGrid,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNCONVERGED: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "weakmul",
    version,
    about = "Convolution-multiplier experiments: Lorentz-norm sweeps, weak-(1,1) ratios, sphere functionals, and inequality-chain checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep ‖K ∗ h_n‖_{1,r} over the flattening Gaussian family and fit
    /// the growth exponent
    Sharpness(SharpnessArgs),
    /// Weak-(1,1) operator ratios over input families
    Weak11(Weak11Args),
    /// Zygmund functional of a multiplier's kernel on the unit sphere
    Zygmund(SphereCmdArgs),
    /// Verify the six-step inequality chain for a multiplier
    Chain(SphereCmdArgs),
    /// Empirical sphere-restriction ratios over a seeded family
    Restriction(RestrictionArgs),
    /// Sup-norm probes of a multiplier on growing grids
    ProbeLinfty(ProbeArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Size grids automatically from the largest n (the default)
    #[arg(long, conflicts_with_all = ["grid_length", "grid_points"])]
    grid_auto: bool,
    /// Grid extent (side length); requires --grid-points
    #[arg(long, requires = "grid_points")]
    grid_length: Option<f64>,
    /// Grid points per axis (power of two); requires --grid-length
    #[arg(long, requires = "grid_length")]
    grid_points: Option<usize>,
}

impl GridArgs {
    fn policy(&self) -> GridPolicy {
        match (self.grid_length, self.grid_points) {
            (Some(extent), Some(points)) => GridPolicy::Explicit { extent, points },
            _ => GridPolicy::Auto,
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self.policy() {
            GridPolicy::Auto => serde_json::json!("auto"),
            GridPolicy::Explicit { extent, points } => {
                serde_json::json!({"extent": extent, "points": points})
            }
        }
    }
}

#[derive(Args)]
struct MultiplierArgs {
    /// Multiplier description file (JSON)
    #[arg(long, value_name = "FILE", conflicts_with = "paper_example")]
    multiplier: Option<PathBuf>,
    /// Use the built-in reference multiplier (Gaussian × truncated-power
    /// pair in one dimension)
    #[arg(long)]
    paper_example: bool,
}

impl MultiplierArgs {
    fn spec(&self) -> Result<MultiplierSpec> {
        if self.paper_example {
            Ok(MultiplierSpec::reference())
        } else if let Some(path) = &self.multiplier {
            MultiplierSpec::from_file(path)
        } else {
            Err(Error::InvalidConfig(
                "provide --multiplier <file> or --paper-example".into(),
            ))
        }
    }

    fn describe(&self) -> serde_json::Value {
        if self.paper_example {
            serde_json::json!("paper-example")
        } else {
            serde_json::json!(self
                .multiplier
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default())
        }
    }
}

#[derive(Args)]
struct SharpnessArgs {
    /// Lorentz second exponent r; repeat the flag for several sweeps
    #[arg(long = "r", value_name = "R", default_values_t = [1.0, 2.0, 3.0])]
    r: Vec<f64>,
    /// Smallest family parameter n
    #[arg(long, default_value_t = 1.0)]
    n_min: f64,
    /// Largest family parameter n
    #[arg(long, default_value_t = 4096.0)]
    n_max: f64,
    /// Number of geometric n values
    #[arg(long, default_value_t = 13)]
    n_count: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (default: $WEAKMUL_OUT, else "runs")
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Weak11Args {
    #[command(flatten)]
    multiplier: MultiplierArgs,
    /// Input family: gaussians, indicators, or bumps (default: all three)
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    n_min: f64,
    #[arg(long, default_value_t = 1024.0)]
    n_max: f64,
    #[arg(long, default_value_t = 11)]
    n_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SphereCmdArgs {
    #[command(flatten)]
    multiplier: MultiplierArgs,
    /// Ambient dimension (1 or 2); must match the multiplier description
    #[arg(long)]
    dim: Option<usize>,
    /// Factor integrability exponent; overrides the description's q
    #[arg(long)]
    q: Option<f64>,
    /// Sphere quadrature resolution (ignored for the two-point sphere)
    #[arg(long, default_value_t = 64)]
    quad_res: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RestrictionArgs {
    /// Ambient dimension (1 or 2)
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Lebesgue exponent of the denominator norm
    #[arg(long, default_value_t = 1.2)]
    q: f64,
    /// Probe family (known: dilated-bumps)
    #[arg(long, default_value = "dilated-bumps")]
    family: String,
    /// Number of seeded probes
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Sphere quadrature resolution (doubled for the stability re-run)
    #[arg(long, default_value_t = 64)]
    quad_res: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    multiplier: MultiplierArgs,
    /// Number of doubling grid levels
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sharpness(args) => cmd_sharpness(args),
        Command::Weak11(args) => cmd_weak11(args),
        Command::Zygmund(args) => cmd_zygmund(args),
        Command::Chain(args) => cmd_chain(args),
        Command::Restriction(args) => cmd_restriction(args),
        Command::ProbeLinfty(args) => cmd_probe_linfty(args),
    }
}

fn geometric_values(n_min: f64, n_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(n_min.is_finite() && n_max.is_finite() && n_min > 0.0 && n_min < n_max) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < n-min < n-max, got {n_min} .. {n_max}"
        )));
    }
    if count < 4 {
        return Err(Error::InvalidConfig(format!(
            "need at least 4 n values, got {count}"
        )));
    }
    let log_min = n_min.ln();
    let log_max = n_max.ln();
    Ok((0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            (log_min + t * (log_max - log_min)).exp()
        })
        .collect())
}

/// File-name tag for an exponent: integral values drop the fraction
/// (`sharpness_r2.csv`), others keep it (`sharpness_r1.5.csv`).
fn r_tag(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Default factor grid for resolving factor norms of a described
/// multiplier.
fn factor_grid(dimension: usize) -> Result<UniformGrid> {
    match dimension {
        1 => UniformGrid::new(1, 64.0, 8192),
        2 => UniformGrid::new(2, 32.0, 256),
        other => Err(Error::InvalidDimension(other)),
    }
}

/// Default sphere-evaluation grid (contains the unit sphere with margin).
fn sphere_grid(dimension: usize) -> Result<UniformGrid> {
    match dimension {
        1 => UniformGrid::new(1, 64.0, 16384),
        2 => UniformGrid::new(2, 32.0, 1024),
        other => Err(Error::InvalidDimension(other)),
    }
}

fn build_multiplier(
    args: &MultiplierArgs,
    dim: Option<usize>,
    q: Option<f64>,
) -> Result<ClassAMultiplier> {
    let mut spec = args.spec()?;
    if let Some(d) = dim {
        if d != spec.dimension {
            return Err(Error::InvalidConfig(format!(
                "--dim {d} does not match the multiplier description's dimension {}",
                spec.dimension
            )));
        }
    }
    if let Some(q) = q {
        spec.q = q;
    }
    spec.build(&factor_grid(spec.dimension)?)
}

fn cmd_sharpness(args: SharpnessArgs) -> Result<u8> {
    for &r in &args.r {
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::InvalidConfig(format!("r must be >= 1, got {r}")));
        }
    }
    let n_values = geometric_values(args.n_min, args.n_max, args.n_count)?;
    let out_dir = resolve_out_dir(args.out.clone());
    let cfg = SweepConfig {
        r: args.r[0],
        n_values,
        grid: args.grid.policy(),
        refinement_factor: 2,
        burn_in_fraction: weakmul::experiments::DEFAULT_BURN_IN_FRACTION,
        verdict_tolerance: weakmul::experiments::DEFAULT_VERDICT_TOLERANCE,
        max_rel_gap: weakmul::experiments::DEFAULT_MAX_REL_GAP,
        seed: args.seed,
    };
    let reports = sharpness_sweep_many(&args.r, &cfg)?;

    let mut all_converged = true;
    for report in &reports {
        let flags = serde_json::json!({
            "r": report.r,
            "n_min": args.n_min,
            "n_max": args.n_max,
            "n_count": args.n_count,
            "grid": args.grid.describe(),
        });
        let run = RunConfig::new("sharpness", flags, args.seed, &out_dir);
        let tag = r_tag(report.r);
        let csv_path = out_dir.join(format!("sharpness_r{tag}.csv"));
        write_csv_file(&csv_path, &run, |w| report.write_csv(w))?;
        let summary = serde_json::json!({
            "r": report.r,
            "slope": report.slope,
            "intercept": report.intercept,
            "goodness": report.goodness,
            "claimed_slope": report.claimed_slope,
            "envelope_slope": report.envelope_slope,
            "verdict": report.verdict,
            "converged": report.converged,
            "burn_in": report.burn_in,
            "rows": report.rows,
        });
        let json_path = out_dir.join(format!("sharpness_r{tag}.json"));
        write_json_file(&json_path, &run, &summary)?;
        println!("wrote {}", csv_path.display());
        println!("wrote {}", json_path.display());
        println!("r = {}: {}", report.r, report.verdict);
        all_converged &= report.converged;
    }
    Ok(if all_converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

fn cmd_weak11(args: Weak11Args) -> Result<u8> {
    let spec_described = args.multiplier.describe();
    let source = if args.multiplier.paper_example {
        args.multiplier.spec()?; // validates flag combination
        KernelSource::Reference
    } else {
        let m = build_multiplier(&args.multiplier, None, None)?;
        KernelSource::Multiplier(m)
    };
    let families = match &args.family {
        Some(name) => vec![FamilyKind::from_name(name)?],
        None => FamilyKind::ALL.to_vec(),
    };
    let n_values = geometric_values(args.n_min, args.n_max, args.n_count)?;
    let out_dir = resolve_out_dir(args.out.clone());
    let cfg = SweepConfig {
        r: 1.0,
        n_values,
        grid: GridPolicy::Auto,
        refinement_factor: 2,
        burn_in_fraction: weakmul::experiments::DEFAULT_BURN_IN_FRACTION,
        verdict_tolerance: weakmul::experiments::DEFAULT_VERDICT_TOLERANCE,
        max_rel_gap: weakmul::experiments::DEFAULT_MAX_REL_GAP,
        seed: args.seed,
    };

    let single = args.family.is_some();
    let mut all_stabilized = true;
    for kind in families {
        let report = weak11_sweep(&source, kind, &cfg)?;
        let flags = serde_json::json!({
            "multiplier": spec_described,
            "family": kind.name(),
            "n_min": args.n_min,
            "n_max": args.n_max,
            "n_count": args.n_count,
        });
        let run = RunConfig::new("weak11", flags, args.seed, &out_dir);
        let (csv_name, json_name) = if single {
            ("weak11.csv".to_string(), "weak11.json".to_string())
        } else {
            (
                format!("weak11_{}.csv", kind.name()),
                format!("weak11_{}.json", kind.name()),
            )
        };
        let csv_path = out_dir.join(csv_name);
        write_csv_file(&csv_path, &run, |w| report.write_csv(w))?;
        let json_path = out_dir.join(json_name);
        write_json_file(&json_path, &run, &report)?;
        println!("wrote {}", csv_path.display());
        println!("wrote {}", json_path.display());
        println!(
            "family {}: max ratio {:.6}, stabilization {:+.4}",
            report.family, report.max_ratio, report.stabilization
        );
        all_stabilized &= report.stabilized;
    }
    Ok(if all_stabilized {
        EXIT_OK
    } else {
        EXIT_UNCONVERGED
    })
}

fn cmd_zygmund(args: SphereCmdArgs) -> Result<u8> {
    let m = build_multiplier(&args.multiplier, args.dim, args.q)?;
    let d = m.dimension();
    let quad = make_quadrature(d - 1, args.quad_res)?;
    let grid = sphere_grid(d)?;
    let kernel = m.assemble_kernel(&grid)?;
    let value = zygmund_functional_of_kernel(&quad, &kernel)?;
    let out_dir = resolve_out_dir(args.out.clone());
    let flags = serde_json::json!({
        "multiplier": args.multiplier.describe(),
        "dim": d,
        "q": m.q(),
        "quad_res": args.quad_res,
    });
    let run = RunConfig::new("zygmund", flags, args.seed, &out_dir);
    let report = serde_json::json!({
        "dimension": d,
        "q": m.q(),
        "quad_res": args.quad_res,
        "value": value,
    });
    let path = out_dir.join("zygmund.json");
    write_json_file(&path, &run, &report)?;
    println!("wrote {}", path.display());
    println!("zygmund functional = {value:.12e}");
    Ok(EXIT_OK)
}

fn cmd_chain(args: SphereCmdArgs) -> Result<u8> {
    let m = build_multiplier(&args.multiplier, args.dim, args.q)?;
    let d = m.dimension();
    let quad = make_quadrature(d - 1, args.quad_res)?;
    let grid = sphere_grid(d)?;
    let report = check_inequality_chain(&m, &quad, &grid)?;
    let out_dir = resolve_out_dir(args.out.clone());
    let flags = serde_json::json!({
        "multiplier": args.multiplier.describe(),
        "dim": d,
        "q": m.q(),
        "quad_res": args.quad_res,
    });
    let run = RunConfig::new("chain", flags, args.seed, &out_dir);
    let path = out_dir.join("chain.json");
    write_json_file(&path, &run, &report)?;
    println!("wrote {}", path.display());
    for step in &report.steps {
        println!(
            "step {} ({}): lhs {:.6e} <= rhs {:.6e} [{}]",
            step.step,
            step.label,
            step.lhs,
            step.rhs,
            if step.pass { "pass" } else { "FAIL" }
        );
    }
    println!(
        "restriction constant {:.6}, corollary {}",
        report.restriction_constant,
        if report.corollary_pass { "pass" } else { "FAIL" }
    );
    Ok(if report.all_pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_restriction(args: RestrictionArgs) -> Result<u8> {
    if args.family != "dilated-bumps" {
        return Err(Error::InvalidConfig(format!(
            "unknown family '{}'; known families: dilated-bumps",
            args.family
        )));
    }
    if args.dim != 1 && args.dim != 2 {
        return Err(Error::InvalidDimension(args.dim));
    }
    if args.count == 0 {
        return Err(Error::InvalidConfig("count must be positive".into()));
    }
    let grid = sphere_grid(args.dim)?;
    let quad = make_quadrature(args.dim - 1, args.quad_res)?;
    let quad_fine = make_quadrature(args.dim - 1, args.quad_res * 2)?;

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    #[derive(serde::Serialize)]
    struct Row {
        index: usize,
        lambda: f64,
        ratio: f64,
    }
    let mut rows = Vec::with_capacity(args.count);
    let mut max_fine = 0.0f64;
    for index in 0..args.count {
        let lambda = f64::exp(rng.gen_range(f64::ln(0.125)..f64::ln(8.0)));
        let center: Vec<f64> = (0..args.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let descriptor = FunctionDescriptor::gaussian_at(
            std::f64::consts::PI * lambda * lambda,
            1.0,
            center,
        );
        let f = SampledFunction::sample(&descriptor, &grid)?;
        let ratio = restriction_ratio(&f, args.q, &quad)?;
        let fine = restriction_ratio(&f, args.q, &quad_fine)?;
        if !(ratio.is_finite() && fine.is_finite()) {
            return Err(Error::NonFiniteResult("restriction ratio"));
        }
        max_fine = max_fine.max(fine);
        rows.push(Row {
            index,
            lambda,
            ratio,
        });
    }
    let max_ratio = rows.iter().map(|row| row.ratio).fold(0.0, f64::max);
    let min_ratio = rows.iter().map(|row| row.ratio).fold(f64::INFINITY, f64::min);
    let stability = (max_fine - max_ratio).abs() / max_ratio;

    let out_dir = resolve_out_dir(args.out.clone());
    let flags = serde_json::json!({
        "dim": args.dim,
        "q": args.q,
        "family": args.family,
        "count": args.count,
        "quad_res": args.quad_res,
    });
    let run = RunConfig::new("restriction", flags, args.seed, &out_dir);
    let csv_path = out_dir.join("restriction.csv");
    write_csv_file(&csv_path, &run, |w| {
        use std::io::Write;
        writeln!(w, "index,lambda,ratio")?;
        for row in &rows {
            writeln!(w, "{},{:.16e},{:.16e}", row.index, row.lambda, row.ratio)?;
        }
        Ok(())
    })?;
    let report = serde_json::json!({
        "dimension": args.dim,
        "q": args.q,
        "count": args.count,
        "quad_res": args.quad_res,
        "max_ratio": max_ratio,
        "min_ratio": min_ratio,
        "spread": max_ratio / min_ratio,
        "max_ratio_refined": max_fine,
        "stability": stability,
    });
    let json_path = out_dir.join("restriction.json");
    write_json_file(&json_path, &run, &report)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    println!(
        "max ratio {max_ratio:.6} (refined {max_fine:.6}, stability {stability:.4}), spread {:.4}",
        max_ratio / min_ratio
    );
    Ok(if stability < 0.02 {
        EXIT_OK
    } else {
        EXIT_UNCONVERGED
    })
}

fn cmd_probe_linfty(args: ProbeArgs) -> Result<u8> {
    let m = if args.multiplier.paper_example {
        let spec = args.multiplier.spec()?;
        spec.build(&factor_grid(spec.dimension)?)?
    } else {
        build_multiplier(&args.multiplier, None, None)?
    };
    if args.levels == 0 || args.levels > 6 {
        return Err(Error::InvalidConfig(format!(
            "levels must lie in 1..=6, got {}",
            args.levels
        )));
    }
    let d = m.dimension();
    let grids: Result<Vec<UniformGrid>> = (0..args.levels)
        .map(|k| {
            let scale = 1usize << k;
            match d {
                1 => UniformGrid::new(1, 32.0 * scale as f64, 4096 * scale),
                _ => UniformGrid::new(2, 16.0 * scale as f64, 256 * scale),
            }
        })
        .collect();
    let rows = linfty_probe(&m, &grids?)?;

    let out_dir = resolve_out_dir(args.out.clone());
    let flags = serde_json::json!({
        "multiplier": args.multiplier.describe(),
        "levels": args.levels,
        "dim": d,
    });
    let run = RunConfig::new("probe-linfty", flags, args.seed, &out_dir);
    let csv_path = out_dir.join("probe_linfty.csv");
    write_csv_file(&csv_path, &run, |w| {
        use std::io::Write;
        writeln!(w, "extent,points_per_axis,sup_abs,sum_f_l1,sum_g_l1")?;
        for row in &rows {
            writeln!(
                w,
                "{:.16e},{},{:.16e},{:.16e},{:.16e}",
                row.extent, row.points_per_axis, row.sup_abs, row.sum_f_l1, row.sum_g_l1
            )?;
        }
        Ok(())
    })?;
    let json_path = out_dir.join("probe_linfty.json");
    write_json_file(&json_path, &run, &rows)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    for row in &rows {
        println!(
            "L = {:>8.1}, N = {:>7}: sup |kernel| = {:.8e}",
            row.extent, row.points_per_axis, row.sup_abs
        );
    }
    Ok(EXIT_OK)
}
