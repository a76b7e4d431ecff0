//! Velocity solves `(-nu Laplacian) u = b` for all three staggered
//! components at once.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::mac::{face_dims, MacVelocity};
use crate::error::{Error, Result};
use crate::function_spaces::Grid;

/// Inner solver for the velocity Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocitySolver {
    /// Exact inverse through the analytic sine eigenbases of the separable
    /// operator.
    #[default]
    FastDiagonalization,
    /// Matrix-free conjugate gradients.
    ConjugateGradient,
}

/// Orthonormal eigenbasis of a 1D second-difference matrix.
#[derive(Debug, Clone)]
struct Basis {
    m: usize,
    /// `q[r * m + col]`: entry `r` of eigenvector `col`.
    q: Vec<f64>,
    /// Eigenvalues of `-d^2/dx^2` (times `h^2` removed).
    lambda: Vec<f64>,
}

impl Basis {
    fn from_columns(m: usize, column: impl Fn(usize, usize) -> f64, lambda: Vec<f64>) -> Basis {
        let mut q = vec![0.0; m * m];
        for col in 0..m {
            let norm = (0..m).map(|r| column(r, col).powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            for r in 0..m {
                q[r * m + col] = column(r, col) / norm;
            }
        }
        Basis { m, q, lambda }
    }

    /// Normal direction: wall values at positions `0` and `N` are pinned to
    /// zero; interior eigenvectors `sin(pi k i / N)`, `k = 1..N-1`.
    fn normal(cells: usize, h: f64) -> Basis {
        let m = cells + 1;
        let lambda = (0..m)
            .map(|k| {
                if k == 0 || k == cells {
                    1.0
                } else {
                    (2.0 - 2.0 * (PI * k as f64 / cells as f64).cos()) / (h * h)
                }
            })
            .collect();
        Basis::from_columns(
            m,
            |r, k| {
                if r == 0 || r == cells || k == 0 || k == cells {
                    0.0
                } else {
                    (PI * (k * r) as f64 / cells as f64).sin()
                }
            },
            lambda,
        )
    }

    /// Tangential direction with reflected ghosts: `sin(pi k (j + 1/2) / N)`,
    /// `k = 1..N`.
    fn tangential(cells: usize, h: f64) -> Basis {
        let m = cells;
        let lambda = (0..m)
            .map(|c| (2.0 - 2.0 * (PI * (c + 1) as f64 / cells as f64).cos()) / (h * h))
            .collect();
        Basis::from_columns(
            m,
            |r, c| (PI * (c + 1) as f64 * (r as f64 + 0.5) / cells as f64).sin(),
            lambda,
        )
    }
}

/// `out[.., r, ..] = sum_m M[r, m] src[.., m, ..]` along `axis`, with `M = Q`
/// or `Q^T`.
fn transform(src: &[f64], d: [usize; 3], axis: usize, b: &Basis, transpose: bool) -> Vec<f64> {
    let m = b.m;
    debug_assert_eq!(d[axis], m);
    let coef = |r: usize, s: usize| {
        if transpose {
            b.q[s * m + r]
        } else {
            b.q[r * m + s]
        }
    };
    let plane = d[0] * d[1];
    let mut out = vec![0.0; src.len()];
    match axis {
        0 => out.par_chunks_mut(d[0]).enumerate().for_each(|(line, o)| {
            let s = &src[line * d[0]..(line + 1) * d[0]];
            for (r, x) in o.iter_mut().enumerate() {
                *x = (0..m).map(|t| coef(r, t) * s[t]).sum();
            }
        }),
        1 => out.par_chunks_mut(plane).enumerate().for_each(|(k, o)| {
            let s = &src[k * plane..(k + 1) * plane];
            for r in 0..m {
                let row = &mut o[r * d[0]..(r + 1) * d[0]];
                for t in 0..m {
                    let c = coef(r, t);
                    if c == 0.0 {
                        continue;
                    }
                    let line = &s[t * d[0]..(t + 1) * d[0]];
                    row.iter_mut().zip(line).for_each(|(a, b)| *a += c * b);
                }
            }
        }),
        _ => out.par_chunks_mut(plane).enumerate().for_each(|(r, o)| {
            for t in 0..m {
                let c = coef(r, t);
                if c == 0.0 {
                    continue;
                }
                let s = &src[t * plane..(t + 1) * plane];
                o.iter_mut().zip(s).for_each(|(a, b)| *a += c * b);
            }
        }),
    }
    out
}

/// Inverse of `-nu Laplacian` on staggered velocities.
#[derive(Debug, Clone)]
pub(crate) struct LaplaceInverse {
    grid: Grid,
    nu: f64,
    solver: VelocitySolver,
    normal: Basis,
    tangential: Basis,
}

/// Relative residual target of the conjugate-gradient path.
const CG_REL_TOL: f64 = 1e-13;

impl LaplaceInverse {
    pub(crate) fn new(grid: Grid, nu: f64, solver: VelocitySolver) -> Self {
        let n = grid.cells();
        let h = grid.spacing();
        LaplaceInverse {
            grid,
            nu,
            solver,
            normal: Basis::normal(n, h),
            tangential: Basis::tangential(n, h),
        }
    }

    pub(crate) fn solve(&self, b: &MacVelocity) -> Result<MacVelocity> {
        match self.solver {
            VelocitySolver::FastDiagonalization => Ok(self.diagonalized(b)),
            VelocitySolver::ConjugateGradient => self.conjugate_gradient(b),
        }
    }

    fn bases(&self, c: usize) -> [&Basis; 3] {
        [0, 1, 2].map(|a| if a == c { &self.normal } else { &self.tangential })
    }

    fn diagonalized(&self, b: &MacVelocity) -> MacVelocity {
        let n = self.grid.cells();
        let mut out = MacVelocity::zeros(self.grid);
        for c in 0..3 {
            let d = face_dims(n, c);
            let bs = self.bases(c);
            let mut x = b.component(c).to_vec();
            for (axis, basis) in bs.iter().enumerate() {
                x = transform(&x, d, axis, basis, true);
            }
            let nu = self.nu;
            x.par_chunks_mut(d[0] * d[1]).enumerate().for_each(|(k, plane)| {
                for j in 0..d[1] {
                    for i in 0..d[0] {
                        let l = bs[0].lambda[i] + bs[1].lambda[j] + bs[2].lambda[k];
                        plane[i + d[0] * j] /= nu * l;
                    }
                }
            });
            for axis in (0..3).rev() {
                x = transform(&x, d, axis, bs[axis], false);
            }
            *out.component_mut(c) = x;
        }
        out
    }

    fn conjugate_gradient(&self, b: &MacVelocity) -> Result<MacVelocity> {
        let bnorm = b.l2_norm();
        let mut x = MacVelocity::zeros(self.grid);
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.clone();
        let mut p = r.clone();
        let mut rr = r.dot(&r);
        let cap = 20 * self.grid.n() * 3 + 100;
        for _ in 0..cap {
            let ap = p.neg_laplacian(self.nu);
            let a = rr / p.dot(&ap);
            x = x.axpy(a, &p);
            r = r.axpy(-a, &ap);
            let rr_new = r.dot(&r);
            if rr_new.sqrt() <= CG_REL_TOL * bnorm {
                return Ok(x);
            }
            p = r.axpy(rr_new / rr, &p);
            rr = rr_new;
        }
        Err(Error::LinearSolverStall {
            iterations: cap,
            residual: rr.sqrt() / bnorm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhs(g: Grid) -> MacVelocity {
        MacVelocity::from_fn(g, |x, y, z| [(5.0 * x * y).sin() + z, x - y * z, (x + y).cos() * z])
    }

    #[test]
    fn bases_are_orthonormal_eigenvectors() {
        let n = 8;
        let h = 1.0 / n as f64;
        for (b, normal) in [(Basis::normal(n, h), true), (Basis::tangential(n, h), false)] {
            let m = b.m;
            for c in 0..m {
                if normal && (c == 0 || c == n) {
                    continue;
                }
                let v: Vec<f64> = (0..m).map(|r| b.q[r * m + c]).collect();
                // second difference with the matching boundary closure
                for r in 0..m {
                    if normal && (r == 0 || r == n) {
                        continue;
                    }
                    let lo = if r == 0 { -v[0] } else { v[r - 1] };
                    let hi = if r == m - 1 { -v[m - 1] } else { v[r + 1] };
                    let av = (2.0 * v[r] - lo - hi) / (h * h);
                    assert!((av - b.lambda[c] * v[r]).abs() < 1e-9 * b.lambda[c]);
                }
                for c2 in 0..m {
                    let d: f64 = (0..m).map(|r| b.q[r * m + c] * b.q[r * m + c2]).sum();
                    let want = if c == c2 { 1.0 } else { 0.0 };
                    if !(normal && (c2 == 0 || c2 == n)) {
                        assert!((d - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn diagonalized_inverse_inverts() {
        let g = Grid::new(9).unwrap();
        let b = rhs(g);
        let inv = LaplaceInverse::new(g, 0.7, VelocitySolver::FastDiagonalization);
        let x = inv.solve(&b).unwrap();
        let back = x.neg_laplacian(0.7);
        assert!(back.sub(&b).max_abs() < 1e-11 * b.max_abs());
    }

    #[test]
    fn conjugate_gradient_agrees_with_diagonalization() {
        let g = Grid::new(9).unwrap();
        let b = rhs(g);
        let a = LaplaceInverse::new(g, 1.3, VelocitySolver::FastDiagonalization)
            .solve(&b)
            .unwrap();
        let c = LaplaceInverse::new(g, 1.3, VelocitySolver::ConjugateGradient)
            .solve(&b)
            .unwrap();
        assert!(a.sub(&c).max_abs() < 1e-10 * a.max_abs());
    }
}
