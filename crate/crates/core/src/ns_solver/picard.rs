use super::mac::MacVelocity;
use super::poisson::LaplaceInverse;
use super::{momentum_residual, stokes_with, FlowState, FluidProblem, Model, SolverConfig};
use crate::error::{Error, Result};
use crate::function_spaces::{first_derivative, ScalarField, VectorField};

/// Update norm beyond which the iteration is declared divergent.
const BLOW_UP: f64 = 1e6;

/// `(v . grad) v` on the nodes, componentwise.
pub fn advect(v: &VectorField) -> Result<VectorField> {
    let grads: Vec<[Vec<f64>; 3]> = (0..3)
        .map(|i| [0, 1, 2].map(|l| first_derivative(v.component(i), l).into_values()))
        .collect();
    let comps = [0, 1, 2].map(|i| {
        let vals = (0..v.grid().node_count())
            .map(|idx| {
                (0..3)
                    .map(|l| v.component(l).values()[idx] * grads[i][l][idx])
                    .sum()
            })
            .collect();
        ScalarField::from_raw(v.grid(), vals)
    });
    VectorField::new(comps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardStep {
    pub iter: usize,
    pub update_sup: f64,
    pub residual_sup: f64,
    pub div_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PicardTrace {
    pub steps: Vec<PicardStep>,
}

impl PicardTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Whether the update norm decreases strictly from step `from` (1-based) on.
    pub fn decreasing_from(&self, from: usize) -> bool {
        self.steps
            .windows(2)
            .filter(|w| w[0].iter >= from)
            .all(|w| w[1].update_sup < w[0].update_sup)
    }
}

/// Damped Picard iteration
/// `v <- v + theta (Stokes(f - (v . grad) v) - v)`, starting from `v = 0`.
///
/// Stops once the update is below `tol` and the full nonlinear momentum
/// residual is below `10 inner_tol (1 + sup |f|)`.
pub fn solve_navier_stokes(problem: &FluidProblem, cfg: &SolverConfig) -> Result<(FlowState, PicardTrace)> {
    cfg.validate()?;
    let grid = problem.grid();
    let nu = problem.nu();
    let f = problem.face_forcing();
    let inv = LaplaceInverse::new(grid, nu, cfg.velocity_solver);
    let mut state = FlowState::zero(grid);
    let mut trace = PicardTrace::default();
    let res_bound = 10.0 * cfg.inner_tol * (1.0 + f.max_abs());
    for iter in 1..=cfg.max_picard {
        let adv = MacVelocity::from_nodes(&advect(&state.nodal_velocity())?);
        let next = match stokes_with(&inv, &f.sub(&adv), nu, cfg) {
            // the right-hand side grew until the divergence bound sits
            // below rounding: the iteration is running away
            Err(Error::LinearSolverStall { .. }) if iter > 1 => {
                let update = trace.steps.last().map_or(f64::NAN, |s| s.update_sup);
                return Err(Error::NonlinearDivergence { iteration: iter, update });
            }
            r => r?,
        };
        let dv = next.velocity.sub(&state.velocity);
        let update = cfg.damping * dv.max_abs();
        if !update.is_finite() || update > BLOW_UP {
            return Err(Error::NonlinearDivergence { iteration: iter, update });
        }
        let theta = cfg.damping;
        let velocity = if theta == 1.0 {
            next.velocity
        } else {
            state.velocity.axpy(theta, &dv)
        };
        let mut pressure = state.pressure.clone();
        let mut dp = next.pressure.clone();
        dp.axpy_in_place(-1.0, &state.pressure);
        pressure.axpy_in_place(theta, &dp);
        state = FlowState {
            velocity,
            pressure,
            stats: next.stats,
        };
        let residual = momentum_residual(&state, nu, f, Model::NavierStokes)?.max_abs();
        let div = state.divergence_max();
        state.stats.residual_sup = residual;
        state.stats.div_max = div;
        trace.steps.push(PicardStep {
            iter,
            update_sup: update,
            residual_sup: residual,
            div_max: div,
        });
        if update < cfg.tol && residual <= res_bound {
            return Ok((state, trace));
        }
    }
    let last = trace.steps.last().map_or(f64::NAN, |s| s.update_sup);
    Err(Error::NonlinearDivergence {
        iteration: cfg.max_picard,
        update: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::Grid;

    #[test]
    fn advect_rotation_field() {
        let g = Grid::new(9).unwrap();
        let v = VectorField::from_fn(g, |x, y, _| [y, x, 0.0]);
        let a = advect(&v).unwrap();
        let exact = VectorField::from_fn(g, |x, y, _| [x, y, 0.0]);
        assert!((&a - &exact).max_abs() < 1e-13);
    }

    #[test]
    fn advect_constant_and_bilinearity() {
        let g = Grid::new(9).unwrap();
        let c = VectorField::from_fn(g, |_, _, _| [1.0, -2.0, 0.5]);
        assert!(advect(&c).unwrap().is_zero());
        let v = VectorField::from_fn(g, |x, y, z| [(x * y).sin(), z * z, x - y]);
        let a = advect(&v).unwrap();
        let b = advect(&v.scale(3.0)).unwrap();
        assert!((&b - &a.scale(9.0)).max_abs() < 1e-12 * b.max_abs());
    }

    #[test]
    fn zero_forcing_converges_in_one_step() {
        let g = Grid::new(9).unwrap();
        let p = FluidProblem::new(1.0, VectorField::zeros(g)).unwrap();
        let (s, t) = solve_navier_stokes(&p, &SolverConfig::default()).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(s.velocity.max_abs(), 0.0);
    }

    #[test]
    fn small_data_trace_decreases() {
        let g = Grid::new(9).unwrap();
        let p = FluidProblem::from_fn(g, 1.0, |_, y, _| {
            [0.1 * (2.0 * std::f64::consts::PI * y).sin(), 0.0, 0.0]
        })
        .unwrap();
        let cfg = SolverConfig::default();
        let (s, t) = solve_navier_stokes(&p, &cfg).unwrap();
        assert!(t.decreasing_from(2), "{t:?}");
        assert!(s.divergence_max() <= cfg.div_tol);
        assert!(s.stats.residual_sup <= 10.0 * cfg.inner_tol * (1.0 + p.face_forcing().max_abs()));
    }

    #[test]
    fn large_data_diverges() {
        let g = Grid::new(9).unwrap();
        let p = FluidProblem::from_fn(g, 0.01, |x, y, z| {
            let s = 1e6 * (x * y * z * (1.0 - x) * (1.0 - y) * (1.0 - z));
            [s * (7.0 * y).sin(), s * (5.0 * z).cos(), s * x]
        })
        .unwrap();
        let cfg = SolverConfig {
            max_picard: 30,
            ..SolverConfig::default()
        };
        let r = solve_navier_stokes(&p, &cfg);
        assert!(matches!(r, Err(Error::NonlinearDivergence { .. })), "{:?}", r.map(|x| x.1));
    }
}
