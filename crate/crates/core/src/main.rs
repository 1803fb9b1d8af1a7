//! Command-line front end: lattice audits, seeded error-rate sweeps,
//! non-well-roundedness estimation, PEP bounds, and rotation file export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hadlat::analysis;
use hadlat::channel::vnr_to_sigma2;
use hadlat::lattice::{enumerate_short_vectors, is_well_rounded, minimal_vectors, Lattice};
use hadlat::rng::{StreamId, SubstreamFamily};
use hadlat::rotations::{
    builtin_lattice, is_hadamard, load_rotation, save_rotation, sylvester, to_rotation,
    HadamardMatrix,
};
use hadlat::sweep::{sweep_k, sweep_vnr, vnr_grid};

#[derive(Parser)]
#[command(
    name = "hadlat",
    version,
    about = "Lattice-code workbench for Rician fading channels"
)]
struct Cli {
    /// Worker threads for Monte Carlo loops (default: all cores).
    /// Results are independent of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a lattice: norms, well-roundedness, diversity.
    Audit {
        /// Builtin name (identity|hadamard|bcc) or rotation file path.
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Squared-norm enumeration radius (default: the dimension).
        #[arg(long)]
        radius: Option<f64>,
        /// Rescale the lattice to unit volume before auditing.
        #[arg(long)]
        unit_volume: bool,
    },
    /// Error-rate sweep over a VNR grid at fixed K.
    SweepVnr {
        /// Builtin name (identity|hadamard|bcc) or rotation file path.
        #[arg(long)]
        rotation: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        q: u32,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        vnr_start: f64,
        #[arg(long)]
        vnr_stop: f64,
        #[arg(long)]
        vnr_step: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error-rate sweep over K values at fixed VNR, one or more rotations.
    SweepK {
        /// Comma-separated rotation specs.
        #[arg(long, value_delimiter = ',')]
        rotation: Vec<String>,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        vnr: f64,
        #[arg(long = "K-list", value_delimiter = ',')]
        k_list: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probability that the faded Hadamard lattice is not well-rounded.
    Nonwr {
        #[arg(long)]
        dim: usize,
        #[arg(long = "K-list", value_delimiter = ',')]
        k_list: Vec<f64>,
        /// mc (Monte Carlo) or quad (deterministic quadrature, dim 2 only).
        #[arg(long, default_value = "mc")]
        method: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PEP bound at one (rotation, K, VNR) point.
    Pep {
        /// Builtin name (identity|hadamard|bcc) or rotation file path.
        #[arg(long)]
        rotation: String,
        #[arg(long)]
        dim: usize,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        vnr: f64,
        /// Squared-norm truncation (default: 4x the minimal squared norm).
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// mc (Monte Carlo average) or approx (small-variance expansion).
        #[arg(long, default_value = "mc")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Sylvester Hadamard rotation to a rotation file.
    Hadamard {
        /// Matrix order; must be a power of two at most 4096.
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<hadlat::Error> for CliError {
    fn from(e: hadlat::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool can only be configured once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Resolves a lattice spec: a builtin name or a rotation file path.
fn resolve_lattice(
    spec: &str,
    dim: Option<usize>,
    unit_volume: bool,
) -> CliResult<(String, Lattice)> {
    let (name, lattice) = match spec {
        "identity" | "hadamard" => {
            let n = match dim {
                Some(n) => n,
                None => return usage(format!("--dim is required with builtin `{spec}`")),
            };
            let lattice =
                builtin_lattice(spec, n).map_err(|e| CliError::Usage(e.to_string()))?;
            (spec.to_string(), lattice)
        }
        "bcc" => {
            let n = dim.unwrap_or(3);
            let lattice =
                builtin_lattice(spec, n).map_err(|e| CliError::Usage(e.to_string()))?;
            (spec.to_string(), lattice)
        }
        path => {
            let rotation =
                load_rotation(Path::new(path)).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(n) = dim {
                if n != rotation.dim() {
                    return usage(format!(
                        "--dim {n} does not match the {}-dimensional file {path}",
                        rotation.dim()
                    ));
                }
            }
            let name = Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.to_string());
            (name, rotation.lattice())
        }
    };
    Ok(if unit_volume {
        (name, lattice.rescaled_to_unit_volume())
    } else {
        (name, lattice)
    })
}

/// Reconstructs the Hadamard matrix when the generator is `W / sqrt(n)`.
fn hadamard_from_generator(lattice: &Lattice) -> Option<HadamardMatrix> {
    let n = lattice.dim();
    let scale = (n as f64).sqrt();
    let mut entries = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let value = lattice.generator()[(i, j)] * scale;
            let rounded = value.round();
            if (value - rounded).abs() > 1e-6 {
                return None;
            }
            entries[(i, j)] = rounded as i64;
        }
    }
    if is_hadamard(&entries) {
        HadamardMatrix::new(entries).ok()
    } else {
        None
    }
}

fn validate_k(k: f64) -> CliResult<()> {
    if !(k >= 0.0) {
        return usage(format!("K must be nonnegative, got {k}"));
    }
    Ok(())
}

fn validate_trials(trials: u64) -> CliResult<()> {
    if trials == 0 {
        return usage("--trials must be at least 1");
    }
    Ok(())
}

/// Writes CSV to the path (atomically: temp file then rename) or stdout.
fn write_output(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let file_name = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into());
            let tmp = path.with_file_name(format!("{file_name}.tmp{}", std::process::id()));
            std::fs::write(&tmp, content)
                .map_err(|e| CliError::Runtime(format!("writing {}: {e}", tmp.display())))?;
            std::fs::rename(&tmp, path)
                .map_err(|e| CliError::Runtime(format!("renaming to {}: {e}", path.display())))?;
            Ok(())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Audit {
            lattice,
            dim,
            radius,
            unit_volume,
        } => cmd_audit(&lattice, dim, radius, unit_volume),
        Command::SweepVnr {
            rotation,
            dim,
            q,
            k,
            vnr_start,
            vnr_stop,
            vnr_step,
            trials,
            seed,
            out,
        } => {
            validate_k(k)?;
            validate_trials(trials)?;
            let grid = vnr_grid(vnr_start, vnr_stop, vnr_step)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let (name, lattice) = resolve_lattice(&rotation, Some(dim), false)?;
            let table = sweep_vnr(&name, &lattice, q, k, &grid, trials, seed)
                .map_err(usage_if_invalid)?;
            write_output(out.as_deref(), &table.to_csv_vnr())
        }
        Command::SweepK {
            rotation,
            dim,
            q,
            vnr,
            k_list,
            trials,
            seed,
            out,
        } => {
            if rotation.is_empty() {
                return usage("at least one --rotation is required");
            }
            if k_list.is_empty() {
                return usage("--K-list must not be empty");
            }
            for &k in &k_list {
                validate_k(k)?;
            }
            validate_trials(trials)?;
            let mut rotations = Vec::new();
            for spec in &rotation {
                rotations.push(resolve_lattice(spec, Some(dim), false)?);
            }
            let table =
                sweep_k(&rotations, q, vnr, &k_list, trials, seed).map_err(usage_if_invalid)?;
            write_output(out.as_deref(), &table.to_csv_k())
        }
        Command::Nonwr {
            dim,
            k_list,
            method,
            trials,
            seed,
            out,
        } => cmd_nonwr(dim, &k_list, &method, trials, seed, out.as_deref()),
        Command::Pep {
            rotation,
            dim,
            k,
            vnr,
            bound,
            trials,
            mode,
            seed,
            out,
        } => cmd_pep(&rotation, dim, k, vnr, bound, trials, &mode, seed, out.as_deref()),
        Command::Hadamard { order, out } => {
            if !order.is_power_of_two() || order > 4096 {
                return usage(format!(
                    "order must be a power of two at most 4096, got {order}"
                ));
            }
            let w = sylvester(order.trailing_zeros())?;
            save_rotation(&to_rotation(&w), &out)?;
            Ok(())
        }
    }
}

/// Carving and grid mistakes are user input problems, not runtime failures.
fn usage_if_invalid(e: hadlat::Error) -> CliError {
    match e {
        hadlat::Error::InvalidQ(_)
        | hadlat::Error::TooManyPoints(_)
        | hadlat::Error::InvalidBound(..)
        | hadlat::Error::NegativeK(_)
        | hadlat::Error::NoTrials
        | hadlat::Error::DimensionTooLarge(_) => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn cmd_audit(
    spec: &str,
    dim: Option<usize>,
    radius: Option<f64>,
    unit_volume: bool,
) -> CliResult<()> {
    let (name, lattice) = resolve_lattice(spec, dim, unit_volume)?;
    let n = lattice.dim();
    if let Some(r) = radius {
        if !(r > 0.0) {
            return usage(format!("--radius must be positive, got {r}"));
        }
    }
    let radius = radius.unwrap_or(n as f64).max(n as f64);

    let minimal = minimal_vectors(&lattice).map_err(usage_if_invalid)?;
    let wr = is_well_rounded(&lattice)?;

    // The L1 minimizer is only guaranteed inside the L2 ball once its own
    // squared L1 norm fits; grow the radius until that certificate holds.
    let mut l1_bound = radius;
    let min_l1 = loop {
        let report = enumerate_short_vectors(&lattice, l1_bound)?;
        let value = report
            .vectors
            .iter()
            .map(|v| v.l1)
            .fold(f64::INFINITY, f64::min);
        if value * value <= l1_bound + 1e-9 {
            break value;
        }
        l1_bound = value * value + 1e-9;
    };

    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for v in &minimal.minimal_vectors {
        *histogram.entry(v.diversity).or_insert(0) += 1;
    }
    let histogram = histogram
        .iter()
        .map(|(k, c)| format!("{k}:{c}"))
        .collect::<Vec<_>>()
        .join(" ");

    let mut report = String::new();
    let _ = writeln!(report, "lattice: {name}");
    let _ = writeln!(report, "dim: {n}");
    let _ = writeln!(report, "volume: {}", lattice.volume());
    let _ = writeln!(report, "min_norm_sq: {}", minimal.min_norm_sq);
    let _ = writeln!(report, "minimal_vectors: {}", minimal.minimal_vectors.len());
    let _ = writeln!(report, "well_rounded: {wr}");
    let _ = writeln!(report, "min_l1_norm: {min_l1}");
    let _ = writeln!(report, "minimal_diversity_histogram: {histogram}");
    if let Some(w) = hadamard_from_generator(&lattice) {
        let audit = analysis::local_diversity_audit(&to_rotation(&w), radius)?;
        let _ = writeln!(report, "local_diversity_min: {}", audit.min_product);
    }
    print!("{report}");
    Ok(())
}

fn cmd_nonwr(
    dim: usize,
    k_list: &[f64],
    method: &str,
    trials: u64,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    if !matches!(dim, 2 | 4 | 8) {
        return usage(format!("--dim must be one of 2, 4, 8, got {dim}"));
    }
    if k_list.is_empty() {
        return usage("--K-list must not be empty");
    }
    for &k in k_list {
        validate_k(k)?;
    }
    if !matches!(method, "mc" | "quad") {
        return usage(format!("--method must be mc or quad, got `{method}`"));
    }
    if method == "quad" && dim != 2 {
        return usage("--method quad supports --dim 2 only");
    }
    if method == "mc" {
        validate_trials(trials)?;
    }
    let w = sylvester(dim.trailing_zeros())?;
    let family = SubstreamFamily::new(seed, StreamId::NonWrTrial);
    let mut csv = String::from("dim,K,method,trials,estimate,stderr\n");
    for (row, &k) in k_list.iter().enumerate() {
        let (trials_used, estimate, stderr) = match method {
            "mc" => {
                let (p, se) =
                    analysis::nonwr_probability_mc(&w, k, trials, family, row as u64 * trials)?;
                (trials, p, se)
            }
            _ => (0, analysis::nonwr_probability_quad(&w, k)?, 0.0),
        };
        let _ = writeln!(csv, "{dim},{k},{method},{trials_used},{estimate},{stderr}");
    }
    write_output(out, &csv)
}

#[allow(clippy::too_many_arguments)]
fn cmd_pep(
    rotation: &str,
    dim: usize,
    k: f64,
    vnr: f64,
    bound: Option<f64>,
    trials: u64,
    mode: &str,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    validate_k(k)?;
    if !matches!(mode, "mc" | "approx") {
        return usage(format!("--mode must be mc or approx, got `{mode}`"));
    }
    let (name, lattice) = resolve_lattice(rotation, Some(dim), false)?;
    let minimal = minimal_vectors(&lattice).map_err(usage_if_invalid)?;
    let bound = bound.unwrap_or(4.0 * minimal.min_norm_sq);
    if bound < minimal.min_norm_sq {
        return usage(format!(
            "--bound {bound} is below the minimal squared norm {}; the sum would be empty",
            minimal.min_norm_sq
        ));
    }
    let sigma2 = vnr_to_sigma2(vnr, lattice.volume(), dim).map_err(usage_if_invalid)?;
    let estimate = match mode {
        "mc" => {
            validate_trials(trials)?;
            let family = SubstreamFamily::new(seed, StreamId::PepTrial);
            analysis::pep_bound_mc(&lattice, k, sigma2, bound, trials, family, 0)?
        }
        _ => analysis::pep_bound_approx(&lattice, k, sigma2, bound)?,
    };
    let mut csv = String::from("rotation,dim,K,vnr_db,mode,truncation_bound,terms,value,stderr\n");
    let _ = writeln!(
        csv,
        "{name},{dim},{k},{vnr},{mode},{},{},{},{}",
        estimate.truncation_bound, estimate.terms, estimate.value, estimate.stderr
    );
    write_output(out, &csv)
}
