//! Stationary Stokes and Navier–Stokes solver on the unit cube with
//! homogeneous Dirichlet velocity.
//!
//! Second-order staggered (MAC) finite differences. The Stokes system is
//! solved by conjugate gradients on the pressure Schur complement with
//! exact velocity solves; Navier–Stokes by damped Picard iteration that
//! moves `(v . grad) v`, evaluated on the grid nodes, to the right-hand side.

mod checks;
mod forcing;
mod mac;
mod manufactured;
mod picard;
mod poisson;

use std::fmt::Write as _;

pub use checks::{energy_check, random_solenoidal, weak_residual, EnergyRatios, WeakResidual};
pub use forcing::ForcingKind;
pub use mac::{face_position, CellField, MacVelocity};
pub use manufactured::{mms_convergence, Manufactured, MmsReport, MmsRow, RandomSolution};
pub use picard::{advect, solve_navier_stokes, PicardStep, PicardTrace};
pub use poisson::VelocitySolver;

use crate::error::{Error, Result};
use crate::function_spaces::{Grid, ScalarField, VectorField};
use poisson::LaplaceInverse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Picard stopping tolerance on the sup norm of the update.
    pub tol: f64,
    /// Momentum residual tolerance, relative to `1 + sup |g|`.
    pub inner_tol: f64,
    /// Bound on the discrete divergence at every cell.
    pub div_tol: f64,
    pub max_picard: usize,
    /// Picard damping in `(0, 1]`.
    pub damping: f64,
    pub velocity_solver: VelocitySolver,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            inner_tol: 1e-10,
            div_tol: 1e-8,
            max_picard: 200,
            damping: 1.0,
            velocity_solver: VelocitySolver::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol", self.tol), ("inner_tol", self.inner_tol), ("div_tol", self.div_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "(0, inf)"));
            }
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::domain("damping", self.damping, "(0, 1]"));
        }
        if self.max_picard == 0 {
            return Err(Error::Precondition("max_picard must be positive".into()));
        }
        Ok(())
    }
}

/// Which equations a state is meant to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Stokes,
    NavierStokes,
}

/// Viscosity and forcing. The forcing is kept both at the nodes and at
/// the velocity faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidProblem {
    nu: f64,
    forcing: VectorField,
    faces: MacVelocity,
}

impl FluidProblem {
    /// Face forcing is interpolated from the nodes.
    pub fn new(nu: f64, forcing: VectorField) -> Result<Self> {
        check_nu(nu)?;
        let faces = MacVelocity::from_nodes(&forcing);
        Ok(FluidProblem { nu, forcing, faces })
    }

    /// Forcing sampled from a closed form at nodes and faces.
    pub fn from_fn(grid: Grid, nu: f64, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Result<Self> {
        check_nu(nu)?;
        let forcing = VectorField::from_fn(grid, &f);
        forcing.max_abs().is_finite().then_some(()).ok_or_else(|| {
            Error::InvalidField("forcing is not finite".into())
        })?;
        let faces = MacVelocity::from_fn(grid, f);
        Ok(FluidProblem { nu, forcing, faces })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid(&self) -> Grid {
        self.forcing.grid()
    }

    pub fn forcing(&self) -> &VectorField {
        &self.forcing
    }

    pub fn face_forcing(&self) -> &MacVelocity {
        &self.faces
    }

    pub fn scaled(&self, s: f64) -> Self {
        FluidProblem {
            nu: self.nu,
            forcing: self.forcing.scale(s),
            faces: self.faces.scale(s),
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("nu", nu, "(0, inf)"))
    }
}

/// Diagnostics of the last linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual_sup: f64,
    pub div_max: f64,
}

/// Staggered velocity and mean-zero cell pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub velocity: MacVelocity,
    pub pressure: CellField,
    pub stats: SolveStats,
}

impl FlowState {
    pub fn zero(grid: Grid) -> Self {
        FlowState {
            velocity: MacVelocity::zeros(grid),
            pressure: CellField::zeros(grid),
            stats: SolveStats {
                iterations: 0,
                residual_sup: 0.0,
                div_max: 0.0,
            },
        }
    }

    pub fn grid(&self) -> Grid {
        self.velocity.grid()
    }

    pub fn nodal_velocity(&self) -> VectorField {
        self.velocity.to_nodes()
    }

    pub fn nodal_pressure(&self) -> ScalarField {
        self.pressure.to_nodes()
    }

    pub fn divergence_max(&self) -> f64 {
        self.velocity.divergence().max_abs()
    }
}

/// `-nu Lap v + grad p + [advection] - g` on the faces.
pub fn momentum_residual(state: &FlowState, nu: f64, g: &MacVelocity, model: Model) -> Result<MacVelocity> {
    let mut r = state
        .velocity
        .neg_laplacian(nu)
        .add(&state.pressure.gradient())
        .sub(g);
    if model == Model::NavierStokes {
        let adv = advect(&state.nodal_velocity())?;
        r = r.add(&MacVelocity::from_nodes(&adv));
    }
    Ok(r)
}

pub fn solve_stokes(problem: &FluidProblem, cfg: &SolverConfig) -> Result<FlowState> {
    solve_stokes_faces(problem.face_forcing(), problem.nu(), cfg)
}

/// Stokes solve for a right-hand side given on the faces.
pub fn solve_stokes_faces(g: &MacVelocity, nu: f64, cfg: &SolverConfig) -> Result<FlowState> {
    check_nu(nu)?;
    cfg.validate()?;
    let inv = LaplaceInverse::new(g.grid(), nu, cfg.velocity_solver);
    stokes_with(&inv, g, nu, cfg)
}

pub(crate) fn stokes_with(inv: &LaplaceInverse, g: &MacVelocity, nu: f64, cfg: &SolverConfig) -> Result<FlowState> {
    let grid = g.grid();
    if g.max_abs() == 0.0 {
        return Ok(FlowState::zero(grid));
    }
    let target = 0.1 * cfg.div_tol;
    let cap = 50 + 10 * grid.cells();
    let mut p = CellField::zeros(grid);
    let mut u = inv.solve(g)?;
    // residual of the Schur system: -div u
    let residual = |u: &MacVelocity| {
        let mut r = u.divergence();
        r.values_mut().iter_mut().for_each(|x| *x = -*x);
        r.remove_mean();
        r
    };
    let mut r = residual(&u);
    let mut d = r.clone();
    let mut rr = r.dot(&r);
    let mut iterations = 0;
    while r.max_abs() > target {
        if iterations == cap {
            return Err(Error::LinearSolverStall {
                iterations,
                residual: r.max_abs(),
            });
        }
        iterations += 1;
        let w = inv.solve(&d.gradient())?;
        let sd = -d.dot(&w.divergence());
        let alpha = rr / sd;
        p.axpy_in_place(alpha, &d);
        u = u.axpy(-alpha, &w);
        r = residual(&u);
        let rr_new = r.dot(&r);
        let beta = rr_new / rr;
        rr = rr_new;
        let mut next = r.clone();
        next.axpy_in_place(beta, &d);
        d = next;
    }
    p.remove_mean();
    // recompute the velocity from the final pressure so the momentum
    // equation holds to rounding
    let u = inv.solve(&g.sub(&p.gradient()))?;
    let mut state = FlowState {
        velocity: u,
        pressure: p,
        stats: SolveStats {
            iterations,
            residual_sup: 0.0,
            div_max: 0.0,
        },
    };
    let res = momentum_residual(&state, nu, g, Model::Stokes)?.max_abs();
    let div = state.divergence_max();
    state.stats.residual_sup = res;
    state.stats.div_max = div;
    if res > cfg.inner_tol * (1.0 + g.max_abs()) || div > cfg.div_tol {
        return Err(Error::LinearSolverStall {
            iterations,
            residual: res.max(div),
        });
    }
    Ok(state)
}

/// CSV of a Picard trace: `iter,update_sup,residual_sup,div_max`.
pub fn trace_csv(trace: &PicardTrace) -> String {
    let mut s = String::from("iter,update_sup,residual_sup,div_max\n");
    for t in &trace.steps {
        writeln!(s, "{},{},{},{}", t.iter, t.update_sup, t.residual_sup, t.div_max).unwrap();
    }
    s
}
