//! The `ns-apriori` command line.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 solver divergence,
//! 3 verification failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::function_spaces::io::FieldFile;
pub use config::RunConfig;

/// Environment variable holding the default output directory.
pub const OUTPUT_ENV: &str = "NS_APRIORI_OUT";
/// Output directory when neither flag, config nor environment name one.
pub const DEFAULT_OUTPUT_DIR: &str = "ns-apriori-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

const CONFIG_HELP: &str = "\
Configuration file keys (TOML, all optional, unknown keys rejected):
  seed = 1592590337            RNG seed of families, pair samples, test fields
  grid.n = 17                  nodes per axis, 2^k + 1 with n >= 5
  fluid.nu = 1.0               viscosity
  forcing.kind = manufactured  trig | bump | manufactured
  forcing.amplitude = 1.0      forcing amplitude of `solve` and `mms`
  sweep.amplitudes = [0.1, 0.2, 0.5, 1.0]
  norms.alpha = 0.5            Holder exponent in (0, 1)
  norms.q = 6.0                Lebesgue exponent in (1, inf)
  solver.tol = 1e-8            Picard update tolerance
  solver.inner_tol = 1e-10     linear solve tolerance
  solver.div_tol = 1e-8        discrete divergence tolerance
  solver.max_picard = 200
  solver.damping = 1.0         Picard relaxation in (0, 1]
  output.dir                   default: $NS_APRIORI_OUT, else ./ns-apriori-out
  verify.stability_tol = 0.1   max relative change of C_emp under refinement
  verify.family_size = 50      members of the mixed test family
  verify.median_factor = 10.0  no ratio may exceed this multiple of the median
  verify.scaling_tol = 0.15    max slope mismatch of the scaling balance
  verify.pair_budget = 2097152 Holder pair budget
  verify.q_stability_tol = 0.2 max relative change of max Q under refinement
  verify.epsilons = [0.5, 0.1, 0.02]
  verify.refine = true         repeat sweeps on the refined grid
  verify.young_trials = 10000
  verify.min_order = 1.7       least acceptable manufactured-solution order
  verify.levels = [9, 17, 33]  grids of `mms`

Flags override the file. Every CSV file starts with a `# generated_unix=<t>`
line unless --no-timestamp is given.";

#[derive(Debug, Parser)]
#[command(
    name = "ns-apriori",
    version,
    about = "Numerical checks of a priori Holder estimates for stationary Navier-Stokes",
    after_help = CONFIG_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the interpolation and Young exponents.
    Exponents(ExponentsArgs),
    /// Norm report of every component of an NSFLD1 file.
    #[command(after_help = "CSV columns: component, sup_0..sup_m (sup norms of all derivatives \
of order k), holder_0..holder_m (Holder seminorms of order-k derivatives), c_norm (C^{m,alpha} \
norm), lq_norm, sobolev_norm (W^{m,q}).")]
    Norms(NormsArgs),
    /// Interpolation inequality on a mixed test family.
    #[command(after_help = "Writes interp_l<l>_n<n>.csv per exponent l and grid with columns \
kind, param, seed, l, q, alpha, lhs (||u||_l), norm_2a (||u||_{2+alpha}), norm_q (||u||_q), \
omega, ratio, followed by a `C_emp,<max ratio>` line; and interp_summary.csv with columns \
check, l, value, threshold, pass.")]
    VerifyInterp(RunArgs),
    /// Solve the Stokes or Navier-Stokes problem.
    #[command(after_help = "Writes velocity.nsfld, pressure.nsfld, forcing.nsfld (nodal values) \
and, for navier-stokes, trace.csv with columns iter, update_sup, residual_sup, div_max.")]
    Solve(SolveArgs),
    /// Manufactured-solution convergence study.
    #[command(after_help = "Writes mms_<model>.csv with columns n, velocity_error \
(discrete L2 error on faces), pressure_error (discrete L2 error, mean removed), div_max, picard_iterations, \
order (observed order against the previous level, empty on the first).")]
    Mms(MmsArgs),
    /// Amplitude sweep through the a priori estimate chain.
    #[command(after_help = "Writes estimate.csv (and estimate_refined.csv on the refined grid) with columns amplitude, f_alpha \
(||f||_alpha), v_2a (||v||_{2+alpha}), gradp_a (||grad p||_alpha), v_w12, v_l6, nlterm_a \
(||(v.grad)v||_alpha), g_alpha (||f - (v.grad)v||_alpha), B, Q (v_2a / (f_alpha + v_w12^B)), \
C_nl, C_schauder, converged; and estimate_summary.csv with columns check, value, threshold, \
pass.")]
    VerifyEstimate(RunArgs),
    /// Young split with epsilon: fitted slope of the minimal constant.
    #[command(after_help = "Writes young.csv with columns eps, c_closed (closed-form minimal \
constant), c_search (random-search estimate).")]
    Young(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExponentsArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Also print omega_l for this l in [0, 2 + alpha].
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct NormsArgs {
    /// NSFLD1 input file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Highest derivative order, 0 to 2.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = crate::function_spaces::DEFAULT_PAIR_BUDGET)]
    pub pair_budget: usize,
    #[arg(long, default_value_t = crate::function_spaces::DEFAULT_SEED)]
    pub seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

/// Config file plus per-key overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// grid.n
    #[arg(long)]
    pub n: Option<usize>,
    /// fluid.nu
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// forcing.kind
    #[arg(long)]
    pub forcing: Option<String>,
    /// forcing.amplitude
    #[arg(long, allow_negative_numbers = true)]
    pub amplitude: Option<f64>,
    /// sweep.amplitudes, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub amplitudes: Option<Vec<f64>>,
    /// norms.alpha
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// norms.q
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// solver.tol
    #[arg(long)]
    pub tol: Option<f64>,
    /// solver.inner_tol
    #[arg(long)]
    pub inner_tol: Option<f64>,
    /// solver.div_tol
    #[arg(long)]
    pub div_tol: Option<f64>,
    /// solver.max_picard
    #[arg(long)]
    pub max_picard: Option<usize>,
    /// solver.damping
    #[arg(long)]
    pub damping: Option<f64>,
    /// seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// output.dir
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// verify.family_size
    #[arg(long)]
    pub family_size: Option<usize>,
    /// verify.stability_tol
    #[arg(long)]
    pub stability_tol: Option<f64>,
    /// verify.refine
    #[arg(long)]
    pub refine: Option<bool>,
    /// Omit the `# generated_unix=` line from CSV files.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Stokes,
    NavierStokes,
}

impl From<ModelArg> for crate::ns_solver::Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Stokes => crate::ns_solver::Model::Stokes,
            ModelArg::NavierStokes => crate::ns_solver::Model::NavierStokes,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = ModelArg::NavierStokes)]
    pub model: ModelArg,
}

#[derive(Debug, Clone, Args)]
pub struct MmsArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = ModelArg::NavierStokes)]
    pub model: ModelArg,
    /// Grid sizes, comma separated (verify.levels).
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
}

impl RunArgs {
    /// Loads the config file, applies the overrides and validates.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($path:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { c.$($path).+ = v.clone(); })*
            };
        }
        set!(
            n => grid.n,
            nu => fluid.nu,
            forcing => forcing.kind,
            amplitude => forcing.amplitude,
            amplitudes => sweep.amplitudes,
            alpha => norms.alpha,
            q => norms.q,
            tol => solver.tol,
            inner_tol => solver.inner_tol,
            div_tol => solver.div_tol,
            max_picard => solver.max_picard,
            damping => solver.damping,
            seed => seed,
            family_size => verify.family_size,
            stability_tol => verify.stability_tol,
            refine => verify.refine,
        );
        if let Some(d) = &self.output_dir {
            c.output.dir = Some(d.clone());
        }
        c.validate()?;
        Ok(c)
    }

    fn sink(&self, config: &RunConfig) -> Sink {
        let dir = config
            .output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        Sink {
            dir,
            timestamp: !self.no_timestamp,
        }
    }
}

/// Where reports go.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: PathBuf,
    pub timestamp: bool,
}

impl Sink {
    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|source| Error::Io {
            path: self.dir.clone(),
            source,
        })
    }

    pub fn csv(&self, name: &str, body: &str) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        write_csv(&path, body, self.timestamp)?;
        Ok(path)
    }

    pub fn field(&self, name: &str, file: &FieldFile) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        file.write(&path)?;
        Ok(path)
    }
}

pub fn timestamp_line() -> String {
    let t = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# generated_unix={t}\n")
}

fn write_csv(path: &Path, body: &str, timestamp: bool) -> Result<()> {
    let text = if timestamp {
        timestamp_line() + body
    } else {
        body.to_string()
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Exit code of a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonlinearDivergence { .. } | Error::LinearSolverStall { .. } => EXIT_DIVERGED,
        _ => EXIT_INVALID,
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Finished, but the solver diverged somewhere that made the checks
    /// meaningless.
    Diverged,
}

impl Verdict {
    fn code(self) -> i32 {
        match self {
            Verdict::Pass => EXIT_OK,
            Verdict::Fail => EXIT_VERIFY_FAILED,
            Verdict::Diverged => EXIT_DIVERGED,
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing
/// human-readable output to `out` and diagnostics to `err`. Returns the
/// exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INVALID
                }
            };
        }
    };
    match commands::dispatch(&cli.command, out) {
        Ok(v) => v.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
