use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mac::MacVelocity;
use super::{advect, FlowState, FluidProblem, Model};
use crate::error::{Error, Result};
use crate::function_spaces::{FieldNorms, Grid, VectorField};

/// Terms of the weak form `nu (grad v, grad eta) + ((v . grad) v, eta) = (f, eta)`,
/// evaluated with the discrete operators of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    pub viscous: f64,
    pub convective: f64,
    pub forcing: f64,
    /// `|viscous + convective - forcing|`.
    pub residual: f64,
    /// `W^1_2` norm of the test field.
    pub eta_norm: f64,
}

pub fn weak_residual(
    problem: &FluidProblem,
    model: Model,
    state: &FlowState,
    eta: &MacVelocity,
    div_tol: f64,
) -> Result<WeakResidual> {
    let div = eta.divergence().max_abs();
    if div > div_tol {
        return Err(Error::Precondition(format!(
            "test field has divergence {div:e} > {div_tol:e}"
        )));
    }
    let v = &state.velocity;
    let viscous = problem.nu() * v.dirichlet_form(eta);
    let convective = match model {
        Model::Stokes => 0.0,
        Model::NavierStokes => MacVelocity::from_nodes(&advect(&v.to_nodes())?).dot(eta),
    };
    let forcing = problem.face_forcing().dot(eta);
    Ok(WeakResidual {
        viscous,
        convective,
        forcing,
        residual: (viscous + convective - forcing).abs(),
        eta_norm: (eta.dot(eta) + eta.dirichlet_form(eta)).sqrt(),
    })
}

/// Discrete curl of random edge potentials
/// `sum c sin(pi k1 x) sin(pi k2 y) sin(pi k3 z)`. The potentials vanish on
/// the walls, so the field is solenoidal to rounding and has zero normal
/// component on the boundary.
pub fn random_solenoidal(grid: Grid, modes: usize, seed: u64) -> MacVelocity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pot: [Vec<([f64; 3], f64)>; 3] = [0, 1, 2].map(|_| {
        (0..modes)
            .map(|_| {
                let k = [0; 3].map(|_| rng.gen_range(1..=3) as f64);
                (k, rng.gen_range(-1.0..1.0))
            })
            .collect()
    });
    let a = |c: usize, p: [f64; 3]| -> f64 {
        pot[c]
            .iter()
            .map(|(k, w)| w * (0..3).map(|i| (PI * k[i] * p[i]).sin()).product::<f64>())
            .sum()
    };
    let h = grid.spacing();
    // difference of potential c across direction d, centred at p
    let diff = |c: usize, d: usize, p: [f64; 3]| {
        let mut lo = p;
        let mut hi = p;
        lo[d] -= 0.5 * h;
        hi[d] += 0.5 * h;
        (a(c, hi) - a(c, lo)) / h
    };
    MacVelocity::from_fn(grid, |x, y, z| {
        let p = [x, y, z];
        [
            diff(2, 1, p) - diff(1, 2, p),
            diff(0, 2, p) - diff(2, 0, p),
            diff(1, 0, p) - diff(0, 1, p),
        ]
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRatios {
    pub v_w12: f64,
    pub v_l6: f64,
    pub f_l2: f64,
    /// `||v||_{W^1_2} / max(||f||_2, tiny)`.
    pub energy: f64,
    /// `||v||_6 / ||v||_{W^1_2}`, zero for a zero velocity.
    pub embedding: f64,
}

/// Norms of the nodal velocity against the nodal forcing.
pub fn energy_check(state: &FlowState, forcing: &VectorField) -> Result<EnergyRatios> {
    let v = state.nodal_velocity();
    let v_w12 = v.sobolev_norm(1, 2.0)?;
    let v_l6 = v.lq_norm(6.0)?;
    let f_l2 = forcing.lq_norm(2.0)?;
    Ok(EnergyRatios {
        v_w12,
        v_l6,
        f_l2,
        energy: v_w12 / f_l2.max(f64::MIN_POSITIVE),
        embedding: if v_w12 == 0.0 { 0.0 } else { v_l6 / v_w12 },
    })
}
