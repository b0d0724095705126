//! Command-line front end: experiment orchestration over the library with
//! CSV/JSON emission.
//!
//! Five subcommands cover the workflows the library supports — `resonances`
//! (spectrum at one coupling), `dynamics` (reduced density-matrix time
//! traces), `spinboson` (two-level closed forms, point or sweep),
//! `oracle-validate` (the cross-check suite as a JSON report) and `sweep`
//! (re-solve the spectrum along a coupling grid). All numeric output uses 17
//! significant digits, rows are emitted in input order regardless of worker
//! scheduling, and a `<out>.meta.json` sidecar records the software version,
//! tolerances and dropped-remainder notes whenever output goes to a file.

use crate::bath::BathFunctions;
use crate::dynamics::{
    geometric_time_grid, offdiagonal_trace_norm, DephasingPropagator, PerturbativePropagator,
};
use crate::error::{Error, Result};
use crate::model::{BathParams, Config, CouplingParams, DensityMatrix, FormFactor, SystemSpec};
use crate::quad::QuadConfig;
use crate::{oracle, resonances, spin_boson, C64};
use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Array1;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Resonance spectra and reduced dynamics of an N-level system coupled to a
/// thermal Bose field.
#[derive(Debug, Parser)]
#[command(name = "resodyn", version, about)]
pub struct Cli {
    /// TOML run configuration (system, bath, form factor, couplings,
    /// quadrature).
    #[arg(long, global = true, default_value = "configs/default.toml")]
    pub config: PathBuf,

    /// Output file; stdout when omitted. File output also writes a
    /// `<out>.meta.json` sidecar.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the documentation of every output column of the chosen
    /// subcommand and exit.
    #[arg(long, global = true)]
    pub describe_output: bool,

    /// Worker threads for sweeps (flag beats the environment variable).
    #[arg(long, global = true, env = "RESODYN_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonance spectrum of the effective operator at the configured
    /// coupling (CSV, one row per label).
    Resonances,
    /// Time trace of the reduced density matrix and its distance to the
    /// decoherence manifold (CSV, one row per time).
    Dynamics {
        /// Largest time on the grid; defaults to 20 / (slowest decay rate),
        /// or 20*beta when every resonance is real.
        #[arg(long)]
        t_max: Option<f64>,
        /// Number of grid points (t = 0 plus a geometric ramp).
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Two-level closed forms: one row at the configured coupling, or a
    /// sweep over the ratio gamma = sigma/lambda^2.
    Spinboson {
        #[command(subcommand)]
        action: Option<SpinbosonAction>,
    },
    /// Run the cross-check suite and emit a pass/fail JSON report
    /// (exit status 1 if any check fails).
    OracleValidate,
    /// Re-solve the resonance spectrum along a grid of couplings (CSV, one
    /// row per grid point; points are computed in parallel, rows stay in
    /// grid order).
    Sweep {
        /// Which coupling to vary (the other is held at its configured
        /// value).
        parameter: SweepParameter,
        /// Inclusive range `min..max`.
        range: String,
        /// Grid spacing.
        scale: Scale,
        /// Number of grid points (>= 2).
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpinbosonAction {
    /// Sweep the regime ratio; `lambda` is held at its configured value and
    /// `sigma = gamma * lambda^2` at each point.
    Sweep {
        /// Only `gamma` can be swept here (use the top-level `sweep` for raw
        /// couplings).
        parameter: SpinbosonParameter,
        /// Inclusive range `min..max`.
        range: String,
        scale: Scale,
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpinbosonParameter {
    Gamma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepParameter {
    Sigma,
    Lambda,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

/// Parse the process arguments, run, and map errors to exit status 1 with a
/// diagnostic on stderr.
pub fn run() -> std::process::ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => std::process::ExitCode::SUCCESS,
        Ok(false) => std::process::ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(1)
        }
    }
}

/// Everything a subcommand needs from the configuration, built once.
struct Instance {
    spec: SystemSpec,
    bath: BathParams,
    form_factor: FormFactor,
    coupling: CouplingParams,
    quad: QuadConfig,
    bf: BathFunctions,
}

impl Instance {
    fn from_config(path: &Path) -> Result<Self> {
        let cfg = Config::from_path(path)?;
        let (spec, bath, form_factor, coupling, quad) = cfg.build()?;
        let bf = BathFunctions::new(&bath, &form_factor, &quad)?;
        Ok(Instance { spec, bath, form_factor, coupling, quad, bf })
    }

    /// The two-level closed forms need the critical infrared family and two
    /// levels; everything else is a config error.
    fn require_spin_boson(&self) -> Result<f64> {
        if self.spec.dim() != 2 {
            return Err(Error::config(
                "system.dim",
                "the spinboson subcommand needs a two-level system",
            ));
        }
        if !self.form_factor.is_critical_infrared() || self.bf.xi0() <= 0.0 {
            return Err(Error::config(
                "form_factor.p",
                "the spinboson subcommand needs the critical infrared exponent p = -1/2 \
                 (nonzero spectral density xi(0))",
            ));
        }
        Ok(self.bf.xi0())
    }
}

/// Run a parsed command line. `Ok(true)` is a clean exit; `Ok(false)` means
/// the command ran but reports failure (a failed validation check).
pub fn execute(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::config("threads", "must be >= 1"));
        }
        // Ignore the error when a pool already exists (tests call execute
        // repeatedly in one process); sizing is best-effort there.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let instance = Instance::from_config(&cli.config)?;
    if cli.describe_output {
        let mut out = output_writer(&None)?;
        out.write_all(describe_output(&cli.command, &instance).as_bytes())?;
        return Ok(true);
    }
    match &cli.command {
        Command::Resonances => run_resonances(&instance, cli),
        Command::Dynamics { t_max, points } => run_dynamics(&instance, cli, *t_max, *points),
        Command::Spinboson { action } => run_spinboson(&instance, cli, action.as_ref()),
        Command::OracleValidate => run_oracle_validate(&instance, cli),
        Command::Sweep { parameter, range, scale, points } => {
            run_sweep(&instance, cli, *parameter, range, *scale, *points)
        }
    }
}

fn output_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| {
                Error::config("out", format!("cannot create {}: {e}", p.display()))
            })?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
    }
}

/// 17 significant digits: enough to round-trip any f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(serde::Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    version: &'a str,
    config: String,
    columns: Vec<String>,
    tolerances: BTreeMap<&'a str, f64>,
    notes: Vec<&'a str>,
}

fn write_sidecar(cli: &Cli, sidecar: &Sidecar) -> Result<()> {
    let Some(out) = &cli.out else { return Ok(()) };
    let mut path = out.as_os_str().to_owned();
    path.push(".meta.json");
    let text = serde_json::to_string_pretty(sidecar)
        .map_err(|e| Error::compute("sidecar serialization", e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    Ok(())
}

fn base_tolerances(instance: &Instance) -> BTreeMap<&'static str, f64> {
    let mut t = BTreeMap::new();
    t.insert("quadrature_rel_tol", instance.quad.rel_tol);
    t.insert("quadrature_abs_tol", instance.quad.abs_tol);
    t.insert("resonance_label_collision", 1e-12);
    t
}

// ---------------------------------------------------------------------------
// resonances

fn resonance_columns() -> Vec<String> {
    vec!["a".into(), "b".into(), "re_eps".into(), "im_eps".into()]
}

fn run_resonances(instance: &Instance, cli: &Cli) -> Result<bool> {
    let op = resonances::effective_operator(&instance.spec, &instance.bf, &instance.coupling);
    let spectrum = resonances::resonances_numeric(&op)?;
    let mut out = output_writer(&cli.out)?;
    writeln!(out, "{}", resonance_columns().join(","))?;
    let n = instance.spec.dim();
    for a in 0..n {
        for b in 0..n {
            let eps = spectrum.eigenvalue(a, b).expect("labels cover the doubled space");
            writeln!(out, "{a},{b},{},{}", fmt(eps.re), fmt(eps.im))?;
        }
    }
    out.flush()?;
    let mut tol = base_tolerances(instance);
    tol.insert("biorthogonality_residual", spectrum.biortho_residual());
    write_sidecar(
        cli,
        &Sidecar {
            command: "resonances",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.config.display().to_string(),
            columns: resonance_columns(),
            tolerances: tol,
            notes: vec![
                "eigenvalues are exact for the effective operator sigma*L_S + lambda^2*diag(delta)",
                "labels (a, b) follow each eigenvalue by continuation from sigma -> 0",
            ],
        },
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// dynamics

fn dynamics_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for a in 0..n {
        for b in 0..n {
            cols.push(format!("re_rho_{a}_{b}"));
            cols.push(format!("im_rho_{a}_{b}"));
        }
    }
    cols.push("manifold_distance".to_string());
    cols
}

/// The initial state every dynamics trace starts from: the uniform pure
/// superposition (1/sqrt(N)) sum_a |a>, which populates every matrix element.
fn uniform_superposition(n: usize) -> DensityMatrix {
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    DensityMatrix::pure(&Array1::from_elem(n, amp)).expect("uniform superposition is a valid state")
}

fn run_dynamics(instance: &Instance, cli: &Cli, t_max: Option<f64>, points: usize) -> Result<bool> {
    if points < 2 {
        return Err(Error::config("dynamics.points", "need at least two grid points"));
    }
    let n = instance.spec.dim();
    let rho0 = uniform_superposition(n);
    // The perturbative propagator also supplies the decay rates that set the
    // default time horizon (its sigma = 0 limit is exact labeling).
    let prop = PerturbativePropagator::new(&instance.spec, &instance.bf, &instance.coupling)?;
    let t_max = match t_max {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(_) => return Err(Error::config("dynamics.t_max", "must be finite and > 0")),
        None => prop
            .min_positive_rate()
            .map(|r| 20.0 / r)
            .unwrap_or(20.0 * instance.bath.beta()),
    };
    let grid = geometric_time_grid(t_max, points);
    let exact = if instance.coupling.sigma() == 0.0 {
        Some(DephasingPropagator::new(&instance.spec, &instance.bf, &instance.coupling)?)
    } else {
        None
    };
    let mut out = output_writer(&cli.out)?;
    writeln!(out, "{}", dynamics_columns(n).join(","))?;
    for &t in &grid {
        let matrix = match &exact {
            Some(p) => p.propagate(&rho0, t)?.matrix().clone(),
            None => prop.propagate(&rho0, t)?,
        };
        let mut row = vec![fmt(t)];
        for a in 0..n {
            for b in 0..n {
                row.push(fmt(matrix[(a, b)].re));
                row.push(fmt(matrix[(a, b)].im));
            }
        }
        row.push(fmt(offdiagonal_trace_norm(&matrix)));
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    let notes = if instance.coupling.sigma() == 0.0 {
        vec![
            "sigma = 0: the dephasing propagator is exact to all orders in lambda",
            "initial state: uniform pure superposition (1/sqrt(N)) sum_a |a>",
        ]
    } else {
        vec![
            "leading order in sigma: O(lambda^2) additive remainders and O(sigma^3) resonance \
             corrections are dropped",
            "populations use the finite-rank relaxation surrogate exp(-2 t (sigma^2/lambda^2) T)",
            "initial state: uniform pure superposition (1/sqrt(N)) sum_a |a>",
        ]
    };
    write_sidecar(
        cli,
        &Sidecar {
            command: "dynamics",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.config.display().to_string(),
            columns: dynamics_columns(n),
            tolerances: base_tolerances(instance),
            notes,
        },
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// spinboson

fn spinboson_columns() -> Vec<String> {
    ["gamma", "re_w3", "im_w3", "re_w4", "im_w4", "re_r", "im_r", "regime"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn spinboson_row(gamma: f64, lambda: f64, xi0: f64) -> Result<String> {
    let cp = CouplingParams::new(gamma * lambda * lambda, lambda)?;
    let w = spin_boson::w_closed(&cp, xi0);
    let r = spin_boson::r_closed(&cp, xi0);
    let regime = spin_boson::classify(gamma, spin_boson::gamma_star(xi0));
    Ok([
        fmt(gamma),
        fmt(w[2].re),
        fmt(w[2].im),
        fmt(w[3].re),
        fmt(w[3].im),
        fmt(r.re),
        fmt(r.im),
        regime.as_str().to_string(),
    ]
    .join(","))
}

fn run_spinboson(instance: &Instance, cli: &Cli, action: Option<&SpinbosonAction>) -> Result<bool> {
    let xi0 = instance.require_spin_boson()?;
    let lambda = instance.coupling.lambda();
    let mut out = output_writer(&cli.out)?;
    writeln!(out, "{}", spinboson_columns().join(","))?;
    match action {
        None => {
            writeln!(out, "{}", spinboson_row(instance.coupling.gamma(), lambda, xi0)?)?;
        }
        Some(SpinbosonAction::Sweep { parameter: SpinbosonParameter::Gamma, range, scale, points }) => {
            for gamma in grid_values(range, *scale, *points)? {
                writeln!(out, "{}", spinboson_row(gamma, lambda, xi0)?)?;
            }
        }
    }
    out.flush()?;
    let mut tol = base_tolerances(instance);
    tol.insert("regime_collision_window", 1e-12);
    write_sidecar(
        cli,
        &Sidecar {
            command: "spinboson",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.config.display().to_string(),
            columns: spinboson_columns(),
            tolerances: tol,
            notes: vec![
                "w_3, w_4 and r are closed forms, exact for the 4x4 resonance matrix W",
                "reduced dynamics built on them drop O(lambda^2) additive remainders",
                "sweep holds lambda at its configured value; sigma = gamma * lambda^2",
            ],
        },
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// oracle-validate

fn run_oracle_validate(instance: &Instance, cli: &Cli) -> Result<bool> {
    let report =
        oracle::validation_suite(&instance.bf, &instance.form_factor, instance.bath.beta())?;
    let mut out = output_writer(&cli.out)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::compute("report serialization", e.to_string()))?;
    writeln!(out, "{text}")?;
    out.flush()?;
    write_sidecar(
        cli,
        &Sidecar {
            command: "oracle-validate",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.config.display().to_string(),
            columns: vec![
                "checks[].name".into(),
                "checks[].max_error".into(),
                "checks[].tolerance".into(),
                "checks[].pass".into(),
                "all_pass".into(),
            ],
            tolerances: base_tolerances(instance),
            notes: vec!["all checks are deterministic (fixed seeds and grids)"],
        },
    )?;
    Ok(report.all_pass)
}

// ---------------------------------------------------------------------------
// sweep

fn sweep_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["sigma".to_string(), "lambda".to_string()];
    for a in 0..n {
        for b in 0..n {
            cols.push(format!("re_eps_{a}_{b}"));
            cols.push(format!("im_eps_{a}_{b}"));
        }
    }
    cols.push("biortho_residual".to_string());
    cols
}

fn run_sweep(
    instance: &Instance,
    cli: &Cli,
    parameter: SweepParameter,
    range: &str,
    scale: Scale,
    points: usize,
) -> Result<bool> {
    let values = grid_values(range, scale, points)?;
    if let SweepParameter::Lambda = parameter {
        if values.iter().any(|&v| v <= 0.0) {
            return Err(Error::config("sweep.range", "lambda must stay > 0"));
        }
    }
    if let SweepParameter::Sigma = parameter {
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::config("sweep.range", "sigma must stay >= 0"));
        }
    }
    let n = instance.spec.dim();
    // Points are independent; compute in parallel, then write in grid order.
    let rows: Result<Vec<String>> = values
        .par_iter()
        .map(|&v| {
            let (sigma, lambda) = match parameter {
                SweepParameter::Sigma => (v, instance.coupling.lambda()),
                SweepParameter::Lambda => (instance.coupling.sigma(), v),
            };
            let cp = CouplingParams::new(sigma, lambda)?;
            let op = resonances::effective_operator(&instance.spec, &instance.bf, &cp);
            let spectrum = resonances::resonances_numeric(&op)?;
            let mut row = vec![fmt(sigma), fmt(lambda)];
            for a in 0..n {
                for b in 0..n {
                    let eps = spectrum.eigenvalue(a, b).expect("labels cover the doubled space");
                    row.push(fmt(eps.re));
                    row.push(fmt(eps.im));
                }
            }
            row.push(fmt(spectrum.biortho_residual()));
            Ok(row.join(","))
        })
        .collect();
    let rows = rows?;
    let mut out = output_writer(&cli.out)?;
    writeln!(out, "{}", sweep_columns(n).join(","))?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    write_sidecar(
        cli,
        &Sidecar {
            command: "sweep",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.config.display().to_string(),
            columns: sweep_columns(n),
            tolerances: base_tolerances(instance),
            notes: vec![
                "each row is an independent exact eigendecomposition of the effective operator",
                "rows are written in grid order regardless of worker scheduling",
            ],
        },
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// shared pieces

/// Parse `min..max` and lay out `points` grid values, linearly or
/// geometrically spaced, endpoints included.
fn grid_values(range: &str, scale: Scale, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::config("sweep.points", "need at least two grid points"));
    }
    let (lo, hi) = range
        .split_once("..")
        .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| {
            Error::config("sweep.range", format!("expected `min..max`, got `{range}`"))
        })?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config("sweep.range", "need finite min < max"));
    }
    if matches!(scale, Scale::Log) && lo <= 0.0 {
        return Err(Error::config("sweep.range", "log spacing needs min > 0"));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let f = k as f64 / last;
            match scale {
                Scale::Linear => lo + f * (hi - lo),
                Scale::Log => lo * (hi / lo).powf(f),
            }
        })
        .collect())
}

/// Human-readable documentation of every column the chosen subcommand emits.
fn describe_output(command: &Command, instance: &Instance) -> String {
    let n = instance.spec.dim();
    let mut s = String::new();
    let mut push = |col: &str, doc: &str| {
        s.push_str(&format!("{col:<24}{doc}\n"));
    };
    match command {
        Command::Resonances => {
            push("a", "row label of the resonance (0-based level index)");
            push("b", "column label of the resonance (0-based level index)");
            push("re_eps", "real part of eps_{a,b}: frequency shift of the (a,b) coherence");
            push("im_eps", "imaginary part of eps_{a,b}: decay rate of the (a,b) coherence");
        }
        Command::Dynamics { .. } => {
            push("t", "time");
            for a in 0..n {
                for b in 0..n {
                    push(
                        &format!("re_rho_{a}_{b}"),
                        &format!("Re [rho_t]_({a},{b}) in the interaction eigenbasis"),
                    );
                    push(
                        &format!("im_rho_{a}_{b}"),
                        &format!("Im [rho_t]_({a},{b}) in the interaction eigenbasis"),
                    );
                }
            }
            push(
                "manifold_distance",
                "trace norm of the off-diagonal part: distance to the decoherence manifold",
            );
        }
        Command::Spinboson { .. } => {
            push("gamma", "regime ratio sigma / lambda^2");
            push("re_w3", "Re w_3: frequency shift of the first mixing resonance");
            push("im_w3", "Im w_3: decay rate of the first mixing resonance");
            push("re_w4", "Re w_4: frequency shift of the second mixing resonance");
            push("im_w4", "Im w_4: decay rate of the second mixing resonance");
            push("re_r", "Re r: eigenvector mixing ratio");
            push("im_r", "Im r: eigenvector mixing ratio (r = -i at the exceptional point)");
            push("regime", "overlapping | critical | isolated, against gamma* = pi xi(0)/4");
        }
        Command::OracleValidate => {
            push("checks[].name", "which independent cross-check ran");
            push("checks[].max_error", "worst normalized error observed");
            push("checks[].tolerance", "pass threshold for that check");
            push("checks[].pass", "max_error <= tolerance");
            push("all_pass", "conjunction of all checks (exit status 1 when false)");
        }
        Command::Sweep { .. } => {
            push("sigma", "energy-exchange coupling at this grid point");
            push("lambda", "dephasing coupling at this grid point");
            for a in 0..n {
                for b in 0..n {
                    push(&format!("re_eps_{a}_{b}"), &format!("Re eps_({a},{b})"));
                    push(&format!("im_eps_{a}_{b}"), &format!("Im eps_({a},{b})"));
                }
            }
            push("biortho_residual", "max | left^H right - identity | of the eigenbasis pair");
        }
    }
    s
}
