//! Run configuration: a TOML file with the sections below, every key
//! optional, unknown keys rejected.
//!
//! ```toml
//! seed = 1592590337
//! [grid]
//! n = 17
//! [fluid]
//! nu = 1.0
//! [forcing]
//! kind = "manufactured"   # trig | bump | manufactured
//! amplitude = 1.0
//! [sweep]
//! amplitudes = [0.1, 0.2, 0.5, 1.0]
//! [norms]
//! alpha = 0.5
//! q = 6.0
//! [solver]
//! tol = 1e-8
//! inner_tol = 1e-10
//! div_tol = 1e-8
//! max_picard = 200
//! damping = 1.0
//! [output]
//! dir = "out"
//! [verify]
//! stability_tol = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::function_spaces::{Grid, DEFAULT_PAIR_BUDGET, DEFAULT_SEED};
use crate::ns_solver::{ForcingKind, SolverConfig};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub grid: GridSection,
    pub fluid: FluidSection,
    pub forcing: ForcingSection,
    pub sweep: SweepSection,
    pub norms: NormsSection,
    pub solver: SolverSection,
    pub output: OutputSection,
    pub verify: VerifySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            grid: GridSection::default(),
            fluid: FluidSection::default(),
            forcing: ForcingSection::default(),
            sweep: SweepSection::default(),
            norms: NormsSection::default(),
            solver: SolverSection::default(),
            output: OutputSection::default(),
            verify: VerifySection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n: 17 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidSection {
    pub nu: f64,
}

impl Default for FluidSection {
    fn default() -> Self {
        FluidSection { nu: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingSection {
    pub kind: String,
    pub amplitude: f64,
}

impl Default for ForcingSection {
    fn default() -> Self {
        ForcingSection {
            kind: ForcingKind::Manufactured.name().into(),
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub amplitudes: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            amplitudes: vec![0.1, 0.2, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsSection {
    pub alpha: f64,
    pub q: f64,
}

impl Default for NormsSection {
    fn default() -> Self {
        NormsSection { alpha: 0.5, q: 6.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: f64,
    pub inner_tol: f64,
    pub div_tol: f64,
    pub max_picard: usize,
    pub damping: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        SolverSection {
            tol: c.tol,
            inner_tol: c.inner_tol,
            div_tol: c.div_tol,
            max_picard: c.max_picard,
            damping: c.damping,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Thresholds of the verification commands.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Allowed relative change of `C_emp` under refinement.
    pub stability_tol: f64,
    pub family_size: usize,
    /// No member may exceed this multiple of the family median.
    pub median_factor: f64,
    /// Allowed slope mismatch of the scaling balance.
    pub scaling_tol: f64,
    pub pair_budget: usize,
    /// Allowed relative change of max `Q` under refinement.
    pub q_stability_tol: f64,
    /// Epsilons of the intermediate bound.
    pub epsilons: Vec<f64>,
    /// Also run the sweep on the refined grid.
    pub refine: bool,
    pub young_trials: usize,
    pub min_order: f64,
    pub levels: Vec<usize>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            stability_tol: 0.1,
            family_size: 50,
            median_factor: 10.0,
            scaling_tol: 0.15,
            pair_budget: DEFAULT_PAIR_BUDGET,
            q_stability_tol: 0.2,
            epsilons: vec![0.5, 0.1, 0.02],
            refine: true,
            young_trials: 10_000,
            min_order: 1.7,
            levels: vec![9, 17, 33],
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_toml(&text)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n)
    }

    pub fn forcing_kind(&self) -> Result<ForcingKind> {
        ForcingKind::parse(&self.forcing.kind)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            tol: s.tol,
            inner_tol: s.inner_tol,
            div_tol: s.div_tol,
            max_picard: s.max_picard,
            damping: s.damping,
            ..SolverConfig::default()
        }
    }

    /// Schema checks that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.fluid.nu > 0.0 && self.fluid.nu.is_finite()) {
            return Err(Error::domain("fluid.nu", self.fluid.nu, "(0, inf)"));
        }
        self.forcing_kind()?;
        if !self.forcing.amplitude.is_finite() {
            return Err(Error::domain("forcing.amplitude", self.forcing.amplitude, "finite"));
        }
        if self.sweep.amplitudes.is_empty() {
            return Err(Error::Precondition("sweep.amplitudes is empty".into()));
        }
        if let Some(&a) = self.sweep.amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::domain("sweep.amplitudes", a, "[0, inf)"));
        }
        let alpha = self.norms.alpha;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain("norms.alpha", alpha, "(0, 1)"));
        }
        if !(self.norms.q > 1.0 && self.norms.q.is_finite()) {
            return Err(Error::domain("norms.q", self.norms.q, "(1, inf)"));
        }
        self.solver_config().validate()?;
        let v = &self.verify;
        for (name, x) in [
            ("verify.stability_tol", v.stability_tol),
            ("verify.median_factor", v.median_factor),
            ("verify.scaling_tol", v.scaling_tol),
            ("verify.q_stability_tol", v.q_stability_tol),
            ("verify.min_order", v.min_order),
        ] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::domain(name, x, "[0, inf)"));
            }
        }
        if v.family_size == 0 {
            return Err(Error::Precondition("verify.family_size must be positive".into()));
        }
        if let Some(&e) = v.epsilons.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(Error::domain("verify.epsilons", e, "(0, 1]"));
        }
        for &n in &v.levels {
            Grid::new(n)?;
        }
        Ok(())
    }
}
