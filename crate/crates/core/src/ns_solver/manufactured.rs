//! Closed-form solution for convergence tests:
//! `v = a (d_y psi, -d_x psi, 0)` with `psi = [x(1-x) y(1-y) z(1-z)]^2` and
//! `p = a sin(pi x) cos(pi y)`. The forcing is obtained by differentiating
//! by hand.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mac::{CellField, MacVelocity};
use super::{solve_navier_stokes, solve_stokes, FluidProblem, Model, SolverConfig};
use crate::error::Result;
use crate::function_spaces::Grid;

/// `X = t(1-t)` and the first three derivatives of `X^2`.
fn profile(t: f64) -> [f64; 4] {
    let x = t - t * t;
    let xp = 1.0 - 2.0 * t;
    [x * x, 2.0 * x * xp, 2.0 * xp * xp - 4.0 * x, -12.0 * xp]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub nu: f64,
    pub amplitude: f64,
}

impl Manufactured {
    pub fn velocity(&self, x: f64, y: f64, z: f64) -> [f64; 3] {
        let (a, b, c) = (profile(x), profile(y), profile(z));
        [
            self.amplitude * a[0] * b[1] * c[0],
            -self.amplitude * a[1] * b[0] * c[0],
            0.0,
        ]
    }

    pub fn pressure(&self, x: f64, y: f64, _z: f64) -> f64 {
        self.amplitude * (PI * x).sin() * (PI * y).cos()
    }

    pub fn forcing(&self, model: Model) -> impl Fn(f64, f64, f64) -> [f64; 3] + Sync + '_ {
        move |x, y, z| {
            let (a, b, c) = (profile(x), profile(y), profile(z));
            let s = self.amplitude;
            let lap1 = s * (a[2] * b[1] * c[0] + a[0] * b[3] * c[0] + a[0] * b[1] * c[2]);
            let lap2 = -s * (a[3] * b[0] * c[0] + a[1] * b[2] * c[0] + a[1] * b[0] * c[2]);
            let gp = [
                s * PI * (PI * x).cos() * (PI * y).cos(),
                -s * PI * (PI * x).sin() * (PI * y).sin(),
            ];
            let mut f = [-self.nu * lap1 + gp[0], -self.nu * lap2 + gp[1], 0.0];
            if model == Model::NavierStokes {
                let v = self.velocity(x, y, z);
                f[0] += v[0] * s * a[1] * b[1] * c[0] + v[1] * s * a[0] * b[2] * c[0];
                f[1] += v[0] * (-s * a[2] * b[0] * c[0]) + v[1] * (-s * a[1] * b[1] * c[0]);
            }
            f
        }
    }

    pub fn problem(&self, grid: Grid, model: Model) -> Result<FluidProblem> {
        FluidProblem::from_fn(grid, self.nu, self.forcing(model))
    }
}

/// Random smooth solution `v = curl(w Phi)`, `w = [x(1-x) y(1-y) z(1-z)]^2`,
/// with trigonometric potentials `Phi` and pressure `p` built from a few
/// cosine modes. `v` and its first derivatives vanish on the walls, so the
/// data satisfy every compatibility condition at edges and corners.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSolution {
    /// Per potential component: `(wave numbers, phases, weight)`.
    potential: [Vec<([f64; 3], [f64; 3], f64)>; 3],
    pressure: Vec<([f64; 3], f64, f64)>,
}

/// `W(t) = (t(1-t))^2` and `W'(t)`.
fn weight(t: f64) -> (f64, f64) {
    let x = t - t * t;
    (x * x, 2.0 * x * (1.0 - 2.0 * t))
}

impl RandomSolution {
    pub fn new(modes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let potential = [0, 1, 2].map(|_| {
            (0..modes)
                .map(|_| {
                    let k = [0; 3].map(|_| rng.gen_range(1..=3) as f64);
                    let ph = [0; 3].map(|_| rng.gen_range(0.0..2.0 * PI));
                    (k, ph, rng.gen_range(-1.0..1.0))
                })
                .collect()
        });
        let pressure = (0..modes)
            .map(|_| {
                let k = [0; 3].map(|_| rng.gen_range(0..=2) as f64);
                (k, rng.gen_range(0.0..2.0 * PI), rng.gen_range(-0.01..0.01))
            })
            .collect();
        RandomSolution { potential, pressure }
    }

    /// `Phi_c` and its gradient.
    fn phi(&self, c: usize, p: [f64; 3]) -> (f64, [f64; 3]) {
        let mut val = 0.0;
        let mut grad = [0.0; 3];
        for (k, ph, a) in &self.potential[c] {
            let s = [0, 1, 2].map(|i| (PI * k[i] * p[i] + ph[i]).sin());
            let d = [0, 1, 2].map(|i| PI * k[i] * (PI * k[i] * p[i] + ph[i]).cos());
            val += a * s[0] * s[1] * s[2];
            grad[0] += a * d[0] * s[1] * s[2];
            grad[1] += a * s[0] * d[1] * s[2];
            grad[2] += a * s[0] * s[1] * d[2];
        }
        (val, grad)
    }

    pub fn velocity(&self, x: f64, y: f64, z: f64) -> [f64; 3] {
        let p = [x, y, z];
        let w1 = [weight(x), weight(y), weight(z)];
        let w = w1[0].0 * w1[1].0 * w1[2].0;
        let gw = [
            w1[0].1 * w1[1].0 * w1[2].0,
            w1[0].0 * w1[1].1 * w1[2].0,
            w1[0].0 * w1[1].0 * w1[2].1,
        ];
        let phis = [0, 1, 2].map(|c| self.phi(c, p));
        // d_a (w Phi_c)
        let d = |a: usize, c: usize| gw[a] * phis[c].0 + w * phis[c].1[a];
        [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
    }

    pub fn pressure(&self, x: f64, y: f64, z: f64) -> f64 {
        self.pressure
            .iter()
            .map(|(k, ph, a)| a * (PI * (k[0] * x + k[1] * y + k[2] * z) + ph).cos())
            .sum()
    }

    /// Forcing by fourth-order central differences of the closed forms.
    pub fn forcing(&self, nu: f64, model: Model) -> impl Fn(f64, f64, f64) -> [f64; 3] + Sync + '_ {
        const D: f64 = 1e-3;
        move |x, y, z| {
            let at = |a: usize, t: f64| {
                let mut q = [x, y, z];
                q[a] += t;
                q
            };
            let v0 = self.velocity(x, y, z);
            let mut lap = [0.0; 3];
            let mut grad_v = [[0.0; 3]; 3];
            let mut grad_p = [0.0; 3];
            for a in 0..3 {
                let v = |t: f64| {
                    let q = at(a, t);
                    self.velocity(q[0], q[1], q[2])
                };
                let p = |t: f64| {
                    let q = at(a, t);
                    self.pressure(q[0], q[1], q[2])
                };
                let (m2, m1, p1, p2) = (v(-2.0 * D), v(-D), v(D), v(2.0 * D));
                for c in 0..3 {
                    lap[c] += (-m2[c] + 16.0 * m1[c] - 30.0 * v0[c] + 16.0 * p1[c] - p2[c]) / (12.0 * D * D);
                    grad_v[c][a] = (m2[c] - 8.0 * m1[c] + 8.0 * p1[c] - p2[c]) / (12.0 * D);
                }
                grad_p[a] = (p(-2.0 * D) - 8.0 * p(-D) + 8.0 * p(D) - p(2.0 * D)) / (12.0 * D);
            }
            [0, 1, 2].map(|c| {
                let mut f = -nu * lap[c] + grad_p[c];
                if model == Model::NavierStokes {
                    f += (0..3).map(|a| v0[a] * grad_v[c][a]).sum::<f64>();
                }
                f
            })
        }
    }

    pub fn problem(&self, grid: Grid, nu: f64, model: Model) -> Result<FluidProblem> {
        FluidProblem::from_fn(grid, nu, self.forcing(nu, model))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsRow {
    pub n: usize,
    /// `L_2` velocity error over the faces.
    pub velocity_error: f64,
    /// `L_2` error of the mean-zero pressure over the cells.
    pub pressure_error: f64,
    pub div_max: f64,
    pub picard_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsReport {
    pub model: Model,
    pub rows: Vec<MmsRow>,
}

impl MmsReport {
    /// Observed velocity orders between consecutive grids.
    pub fn orders(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| {
                let r = (w[1].n - 1) as f64 / (w[0].n - 1) as f64;
                (w[0].velocity_error / w[1].velocity_error).ln() / r.ln()
            })
            .collect()
    }

    pub fn min_order(&self) -> f64 {
        self.orders().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,velocity_error,pressure_error,div_max,picard_iterations,order\n");
        let orders = self.orders();
        for (i, r) in self.rows.iter().enumerate() {
            let order = if i == 0 { String::new() } else { orders[i - 1].to_string() };
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.velocity_error, r.pressure_error, r.div_max, r.picard_iterations, order
            ));
        }
        s
    }
}

/// Solves the manufactured problem on every grid size in `ns`.
pub fn mms_convergence(
    mms: &Manufactured,
    model: Model,
    ns: &[usize],
    cfg: &SolverConfig,
) -> Result<MmsReport> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let grid = Grid::new(n)?;
        let problem = mms.problem(grid, model)?;
        let (state, iterations) = match model {
            Model::Stokes => (solve_stokes(&problem, cfg)?, 0),
            Model::NavierStokes => {
                let (s, t) = solve_navier_stokes(&problem, cfg)?;
                (s, t.iterations())
            }
        };
        let exact_v = MacVelocity::from_fn(grid, |x, y, z| mms.velocity(x, y, z));
        let mut exact_p = CellField::from_fn(grid, |x, y, z| mms.pressure(x, y, z));
        exact_p.remove_mean();
        let mut dp = state.pressure.clone();
        dp.axpy_in_place(-1.0, &exact_p);
        rows.push(MmsRow {
            n,
            velocity_error: state.velocity.sub(&exact_v).l2_norm(),
            pressure_error: dp.dot(&dp).sqrt(),
            div_max: state.divergence_max(),
            picard_iterations: iterations,
        });
    }
    Ok(MmsReport { model, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::{Grid, VectorField};
    use crate::ns_solver::advect;

    #[test]
    fn profile_derivatives_match_differences() {
        let h = 1e-5;
        for t in [0.1, 0.37, 0.8] {
            let p = profile(t);
            for d in 0..3 {
                let fd = (profile(t + h)[d] - profile(t - h)[d]) / (2.0 * h);
                assert!((fd - p[d + 1]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn velocity_is_solenoidal_and_vanishes_on_walls() {
        let m = Manufactured { nu: 1.0, amplitude: 3.0 };
        let h = 1e-5;
        for &(x, y, z) in &[(0.2, 0.3, 0.7), (0.5, 0.9, 0.1)] {
            let dx = (m.velocity(x + h, y, z)[0] - m.velocity(x - h, y, z)[0]) / (2.0 * h);
            let dy = (m.velocity(x, y + h, z)[1] - m.velocity(x, y - h, z)[1]) / (2.0 * h);
            assert!((dx + dy).abs() < 1e-8);
        }
        for t in [0.0, 0.3, 1.0] {
            for v in [m.velocity(0.0, t, 0.5), m.velocity(t, 1.0, 0.5), m.velocity(0.4, t, 0.0)] {
                assert!(v.iter().all(|c| c.abs() < 1e-15));
            }
        }
    }

    #[test]
    fn forcing_matches_finite_differences() {
        // -nu lap v + grad p (+ adv) by central differences of the closed forms
        let m = Manufactured { nu: 0.7, amplitude: 40.0 };
        let h = 1e-4;
        let (x, y, z) = (0.31, 0.62, 0.45);
        for model in [Model::Stokes, Model::NavierStokes] {
            let f = m.forcing(model)(x, y, z);
            for c in 0..2 {
                let mut lap = 0.0;
                let mut grad_p = 0.0;
                for a in 0..3 {
                    let mut lo = [x, y, z];
                    let mut hi = [x, y, z];
                    lo[a] -= h;
                    hi[a] += h;
                    let v = |p: [f64; 3]| m.velocity(p[0], p[1], p[2])[c];
                    lap += (v(hi) - 2.0 * v([x, y, z]) + v(lo)) / (h * h);
                    if a == c {
                        grad_p = (m.pressure(hi[0], hi[1], hi[2]) - m.pressure(lo[0], lo[1], lo[2])) / (2.0 * h);
                    }
                }
                let mut want = -m.nu * lap + grad_p;
                if model == Model::NavierStokes {
                    let v0 = m.velocity(x, y, z);
                    for (l, vl) in v0.iter().enumerate() {
                        let mut lo = [x, y, z];
                        let mut hi = [x, y, z];
                        lo[l] -= h;
                        hi[l] += h;
                        let d = (m.velocity(hi[0], hi[1], hi[2])[c] - m.velocity(lo[0], lo[1], lo[2])[c]) / (2.0 * h);
                        want += vl * d;
                    }
                }
                assert!((f[c] - want).abs() < 1e-4 * (1.0 + want.abs()), "{model:?} {c}: {} {want}", f[c]);
            }
            assert_eq!(f[2], 0.0);
        }
    }

    #[test]
    fn advection_term_agrees_with_grid_advection() {
        let m = Manufactured { nu: 1.0, amplitude: 100.0 };
        let g = Grid::new(33).unwrap();
        let v = VectorField::from_fn(g, |x, y, z| m.velocity(x, y, z));
        let adv = advect(&v).unwrap();
        let ns = m.forcing(Model::NavierStokes);
        let st = m.forcing(Model::Stokes);
        let exact = VectorField::from_fn(g, |x, y, z| {
            let (a, b) = (ns(x, y, z), st(x, y, z));
            [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
        });
        assert!((&adv - &exact).max_abs() < 0.02 * exact.max_abs());
    }

    #[test]
    fn stokes_converges_on_small_grids() {
        let m = Manufactured { nu: 1.0, amplitude: 1.0 };
        let rep = mms_convergence(&m, Model::Stokes, &[9, 17], &SolverConfig::default()).unwrap();
        assert!(rep.orders()[0] > 1.7, "{:?}", rep);
        assert!(rep.to_csv().lines().count() == 3);
    }

    #[test]
    fn random_solution_is_solenoidal_and_vanishes_on_walls() {
        let r = RandomSolution::new(3, 11);
        let h = 1e-5;
        for &(x, y, z) in &[(0.2, 0.3, 0.7), (0.55, 0.9, 0.15)] {
            let div: f64 = (0..3)
                .map(|a| {
                    let mut lo = [x, y, z];
                    let mut hi = [x, y, z];
                    lo[a] -= h;
                    hi[a] += h;
                    (r.velocity(hi[0], hi[1], hi[2])[a] - r.velocity(lo[0], lo[1], lo[2])[a]) / (2.0 * h)
                })
                .sum();
            assert!(div.abs() < 1e-7, "{div}");
        }
        assert!(r.velocity(0.0, 0.4, 0.6).iter().all(|c| c.abs() < 1e-15));
        assert!(r.velocity(0.3, 1.0, 0.6).iter().all(|c| c.abs() < 1e-15));
        assert!(r.velocity(0.3, 0.4, 0.5).iter().any(|c| c.abs() > 0.0));
    }

    #[test]
    fn random_solution_is_recovered() {
        let r = RandomSolution::new(3, 5);
        let cfg = SolverConfig::default();
        let err = |n: usize| {
            let g = Grid::new(n).unwrap();
            let s = solve_stokes(&r.problem(g, 1.0, Model::Stokes).unwrap(), &cfg).unwrap();
            let exact = MacVelocity::from_fn(g, |x, y, z| r.velocity(x, y, z));
            s.velocity.sub(&exact).l2_norm() / exact.l2_norm()
        };
        let (a, b) = (err(9), err(17));
        assert!(a / b > 3.0, "{a} {b}");
    }
}
