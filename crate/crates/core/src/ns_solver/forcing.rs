use std::f64::consts::PI;

use super::{FluidProblem, Manufactured};
use crate::error::{Error, Result};
use crate::function_spaces::Grid;

/// Built-in forcing shapes, all scaled by an amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    /// `(sin 2 pi y, 0, 0)`.
    Trig,
    /// Smooth compact bump of radius 0.4 at the centre, pushing along
    /// `(1, -1/2, 1/4)`.
    Bump,
    /// Navier–Stokes forcing of the manufactured solution with velocity
    /// amplitude equal to the forcing amplitude.
    Manufactured,
}

impl ForcingKind {
    pub const ALL: [ForcingKind; 3] = [ForcingKind::Trig, ForcingKind::Bump, ForcingKind::Manufactured];

    pub fn name(&self) -> &'static str {
        match self {
            ForcingKind::Trig => "trig",
            ForcingKind::Bump => "bump",
            ForcingKind::Manufactured => "manufactured",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ForcingKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown forcing kind `{s}`")))
    }

    pub fn problem(&self, grid: Grid, nu: f64, amplitude: f64) -> Result<FluidProblem> {
        match self {
            ForcingKind::Trig => FluidProblem::from_fn(grid, nu, move |_, y, _| {
                [amplitude * (2.0 * PI * y).sin(), 0.0, 0.0]
            }),
            ForcingKind::Bump => FluidProblem::from_fn(grid, nu, move |x, y, z| {
                let r2 = ((x - 0.5).powi(2) + (y - 0.5).powi(2) + (z - 0.5).powi(2)) / 0.16;
                let b = if r2 < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                };
                [b, -0.5 * b, 0.25 * b]
            }),
            ForcingKind::Manufactured => {
                let m = Manufactured { nu, amplitude };
                m.problem(grid, super::Model::NavierStokes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ForcingKind::ALL {
            assert_eq!(ForcingKind::parse(k.name()).unwrap(), k);
        }
        assert!(ForcingKind::parse("vortex").is_err());
    }

    #[test]
    fn linear_kinds_scale_with_amplitude() {
        let g = Grid::new(9).unwrap();
        for k in [ForcingKind::Trig, ForcingKind::Bump] {
            let a = k.problem(g, 1.0, 1.0).unwrap();
            let b = k.problem(g, 1.0, 2.5).unwrap();
            assert!((&a.forcing().scale(2.5) - b.forcing()).max_abs() < 1e-14);
        }
        let z = ForcingKind::Manufactured.problem(g, 1.0, 0.0).unwrap();
        assert!(z.forcing().is_zero());
    }
}
