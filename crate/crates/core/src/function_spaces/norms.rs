use rayon::prelude::*;

use super::derivative::{all_derivatives, MultiIndex};
use super::field::{ScalarField, VectorField};
use super::holder::{check_alpha, PairSet};
use crate::error::{Error, Result};

/// Norms of one field (or the component sum for a vector field).
///
/// `sup_norms[k]` is `sum_{|beta| = k} max |D^beta u|` and
/// `holder_seminorms[k]` is `sum_{|beta| = k} <D^beta u>^(alpha)`, so that
/// `c_norm = sum_{k <= m} sup_norms[k] + holder_seminorms[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub m: u32,
    pub alpha: f64,
    pub sup_norms: Vec<f64>,
    pub holder_seminorms: Vec<f64>,
    pub c_norm: f64,
    pub lebesgue: Option<LebesgueNorms>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueNorms {
    pub q: f64,
    pub lq_norm: f64,
    /// `W^m_q` norm with the same `m` as the report.
    pub sobolev_norm: f64,
}

impl NormReport {
    /// `|u|^(k) = sum_{|beta| <= k} max |D^beta u|`.
    pub fn integer_norm(&self, k: u32) -> f64 {
        self.sup_norms[..=k as usize].iter().sum()
    }

    /// `|u|^(k + alpha)`, the full Hölder norm of order `k + alpha`, for `k <= m`.
    pub fn holder_norm(&self, k: u32) -> f64 {
        self.integer_norm(k) + self.holder_seminorms[k as usize]
    }

    fn accumulate(mut self, other: &NormReport) -> NormReport {
        for (a, b) in self.sup_norms.iter_mut().zip(&other.sup_norms) {
            *a += b;
        }
        for (a, b) in self.holder_seminorms.iter_mut().zip(&other.holder_seminorms) {
            *a += b;
        }
        self.c_norm += other.c_norm;
        if let (Some(a), Some(b)) = (self.lebesgue.as_mut(), other.lebesgue.as_ref()) {
            a.lq_norm += b.lq_norm;
            a.sobolev_norm += b.sobolev_norm;
        }
        self
    }
}

/// Norm operations shared by scalar and vector fields. For vector fields
/// every norm is the sum of the component norms.
pub trait FieldNorms {
    fn sup_norm(&self) -> Result<f64>;
    fn lq_norm(&self, q: f64) -> Result<f64>;
    fn sobolev_norm(&self, m: u32, q: f64) -> Result<f64>;
    fn c_norm(&self, m: u32, alpha: f64, pairs: &PairSet) -> Result<NormReport>;
    /// [`FieldNorms::c_norm`] plus the `L_q` and `W^m_q` norms.
    fn full_report(&self, m: u32, alpha: f64, q: f64, pairs: &PairSet) -> Result<NormReport>;
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("q", q, "(1, inf)"))
    }
}

fn check_m(m: u32) -> Result<()> {
    if m > 2 {
        Err(Error::UnsupportedOrder(m))
    } else {
        Ok(())
    }
}

/// Trapezoidal weight of node `i` on a line of `n` nodes.
#[inline]
fn trap(i: usize, n: usize, h: f64) -> f64 {
    if i == 0 || i == n - 1 {
        0.5 * h
    } else {
        h
    }
}

/// Composite trapezoidal integral of `f(value)` over the cube.
pub(crate) fn integrate(u: &ScalarField, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let g = u.grid();
    let n = g.n();
    let h = g.spacing();
    let vals = u.values();
    // one partial sum per z-plane, summed in plane order
    let planes: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut s = 0.0;
            for j in 0..n {
                let wj = trap(j, n, h);
                let row = g.index(0, j, k);
                let mut r = 0.0;
                for i in 0..n {
                    r += trap(i, n, h) * f(vals[row + i]);
                }
                s += wj * r;
            }
            s * trap(k, n, h)
        })
        .collect();
    planes.iter().sum()
}

fn scalar_sup(u: &ScalarField) -> Result<f64> {
    u.check_finite()?;
    Ok(u.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

fn scalar_lq(u: &ScalarField, q: f64) -> Result<f64> {
    check_q(q)?;
    let s = scalar_sup(u)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    // normalise by the sup so large q cannot overflow
    let inv = 1.0 / s;
    Ok(s * integrate(u, |v| (v.abs() * inv).powf(q)).powf(1.0 / q))
}

fn scalar_report(
    u: &ScalarField,
    m: u32,
    alpha: f64,
    q: Option<f64>,
    pairs: &PairSet,
) -> Result<NormReport> {
    check_m(m)?;
    check_alpha(alpha)?;
    if let Some(q) = q {
        check_q(q)?;
    }
    u.check_finite()?;
    let derivs = all_derivatives(u, m)?;
    let mut sup_norms = vec![0.0; m as usize + 1];
    let mut holder_seminorms = vec![0.0; m as usize + 1];
    let mut lq = 0.0;
    let mut sobolev = 0.0;
    for (beta, d) in &derivs {
        let k = beta.order() as usize;
        sup_norms[k] += scalar_sup(d)?;
        holder_seminorms[k] += pairs.seminorm(d, alpha)?;
        if let Some(q) = q {
            let v = scalar_lq(d, q)?;
            if *beta == MultiIndex::ZERO {
                lq = v;
            }
            sobolev += v;
        }
    }
    let c_norm = sup_norms.iter().sum::<f64>() + holder_seminorms[m as usize];
    Ok(NormReport {
        m,
        alpha,
        sup_norms,
        holder_seminorms,
        c_norm,
        lebesgue: q.map(|q| LebesgueNorms {
            q,
            lq_norm: lq,
            sobolev_norm: sobolev,
        }),
    })
}

impl FieldNorms for ScalarField {
    fn sup_norm(&self) -> Result<f64> {
        scalar_sup(self)
    }

    fn lq_norm(&self, q: f64) -> Result<f64> {
        scalar_lq(self, q)
    }

    fn sobolev_norm(&self, m: u32, q: f64) -> Result<f64> {
        check_m(m)?;
        check_q(q)?;
        all_derivatives(self, m)?
            .iter()
            .map(|(_, d)| scalar_lq(d, q))
            .sum()
    }

    fn c_norm(&self, m: u32, alpha: f64, pairs: &PairSet) -> Result<NormReport> {
        scalar_report(self, m, alpha, None, pairs)
    }

    fn full_report(&self, m: u32, alpha: f64, q: f64, pairs: &PairSet) -> Result<NormReport> {
        scalar_report(self, m, alpha, Some(q), pairs)
    }
}

impl FieldNorms for VectorField {
    fn sup_norm(&self) -> Result<f64> {
        self.components().iter().map(scalar_sup).sum()
    }

    fn lq_norm(&self, q: f64) -> Result<f64> {
        self.components().iter().map(|c| scalar_lq(c, q)).sum()
    }

    fn sobolev_norm(&self, m: u32, q: f64) -> Result<f64> {
        self.components().iter().map(|c| c.sobolev_norm(m, q)).sum()
    }

    fn c_norm(&self, m: u32, alpha: f64, pairs: &PairSet) -> Result<NormReport> {
        let [a, b, c] = self.components();
        Ok(a.c_norm(m, alpha, pairs)?
            .accumulate(&b.c_norm(m, alpha, pairs)?)
            .accumulate(&c.c_norm(m, alpha, pairs)?))
    }

    fn full_report(&self, m: u32, alpha: f64, q: f64, pairs: &PairSet) -> Result<NormReport> {
        let [a, b, c] = self.components();
        Ok(a.full_report(m, alpha, q, pairs)?
            .accumulate(&b.full_report(m, alpha, q, pairs)?)
            .accumulate(&c.full_report(m, alpha, q, pairs)?))
    }
}

pub fn sup_norm<F: FieldNorms + ?Sized>(u: &F) -> Result<f64> {
    u.sup_norm()
}

pub fn lq_norm<F: FieldNorms + ?Sized>(u: &F, q: f64) -> Result<f64> {
    u.lq_norm(q)
}

pub fn sobolev_norm<F: FieldNorms + ?Sized>(u: &F, m: u32, q: f64) -> Result<f64> {
    u.sobolev_norm(m, q)
}

pub fn c_norm<F: FieldNorms + ?Sized>(
    u: &F,
    m: u32,
    alpha: f64,
    pairs: &PairSet,
) -> Result<NormReport> {
    u.c_norm(m, alpha, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::{holder_seminorm, Grid, PairSpec};
    use std::f64::consts::PI;

    fn pairs(n: usize) -> PairSet {
        PairSet::build(Grid::new(n).unwrap(), PairSpec::default()).unwrap()
    }

    #[test]
    fn sup_of_constant_and_coordinate() {
        let g = Grid::new(9).unwrap();
        assert_eq!(sup_norm(&ScalarField::constant(g, 3.0)).unwrap(), 3.0);
        assert_eq!(sup_norm(&ScalarField::constant(g, -3.0)).unwrap(), 3.0);
        assert_eq!(sup_norm(&ScalarField::from_fn(g, |x, _, _| x)).unwrap(), 1.0);
    }

    #[test]
    fn sup_matches_scan() {
        let g = Grid::new(17).unwrap();
        let u = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
        let mut scan = 0.0_f64;
        for k in 0..17 {
            for j in 0..17 {
                for i in 0..17 {
                    scan = scan.max(u.at(i, j, k).abs());
                }
            }
        }
        assert_eq!(sup_norm(&u).unwrap(), scan);
    }

    #[test]
    fn sup_rejects_non_finite() {
        let g = Grid::new(5).unwrap();
        let u = ScalarField::constant(g, f64::MAX).scale(10.0);
        assert!(matches!(sup_norm(&u), Err(Error::InvalidField(_))));
    }

    #[test]
    fn c_norm_of_constant() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::constant(g, -1.75);
        for m in 0..=2 {
            let r = c_norm(&u, m, 0.3, &pairs(9)).unwrap();
            assert!((r.c_norm - 1.75).abs() < 1e-12, "m={m}: {}", r.c_norm);
        }
    }

    #[test]
    fn c_norm_of_coordinate() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, _, _| x);
        let r = c_norm(&u, 0, 0.5, &pairs(9)).unwrap();
        assert!((r.c_norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn c_norm_of_bilinear_product() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, y, _| x * y);
        let r = c_norm(&u, 1, 0.5, &pairs(9)).unwrap();
        assert!((r.sup_norms[0] - 1.0).abs() < 1e-12);
        assert!((r.sup_norms[1] - 2.0).abs() < 1e-12);
        assert!((r.holder_seminorms[1] - 2.0).abs() < 1e-12);
        assert!((r.c_norm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn c_norm_m0_is_sup_plus_seminorm() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, y, z| (x * 3.0).sin() * (y - z).cos());
        let r = c_norm(&u, 0, 0.7, &pairs(9)).unwrap();
        let direct = sup_norm(&u).unwrap() + holder_seminorm(&u, 0.7, PairSpec::default()).unwrap();
        assert_eq!(r.c_norm, direct);
    }

    #[test]
    fn lq_of_constant_and_coordinate() {
        let g = Grid::new(17).unwrap();
        assert!((lq_norm(&ScalarField::constant(g, 2.0), 3.0).unwrap() - 2.0).abs() < 1e-14);
        let u = ScalarField::from_fn(g, |x, _, _| x);
        let h = g.spacing();
        let exact = (1.0_f64 / 3.0).sqrt();
        assert!((lq_norm(&u, 2.0).unwrap() - exact).abs() < h * h);
        assert_eq!(lq_norm(&u, 2.0).unwrap(), lq_norm(&u.scale(-1.0), 2.0).unwrap());
    }

    #[test]
    fn lq_rejects_small_q() {
        let g = Grid::new(5).unwrap();
        for q in [1.0, 0.5, -2.0] {
            assert!(lq_norm(&ScalarField::zeros(g), q).is_err());
        }
    }

    #[test]
    fn sobolev_of_coordinate_and_sine() {
        let g = Grid::new(33).unwrap();
        let h2 = g.spacing().powi(2);
        assert_eq!(sobolev_norm(&ScalarField::zeros(g), 1, 2.0).unwrap(), 0.0);
        let u = ScalarField::from_fn(g, |x, _, _| x);
        let exact = (1.0_f64 / 3.0).sqrt() + 1.0;
        assert!((sobolev_norm(&u, 1, 2.0).unwrap() - exact).abs() < h2);
        let s = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
        let exact = 0.5_f64.sqrt() * (1.0 + 2.0 * PI);
        // O(h^2) with the constant of the one-sided derivative closure
        assert!((sobolev_norm(&s, 1, 2.0).unwrap() - exact).abs() < 40.0 * h2);
    }

    #[test]
    fn vector_norms_sum_components() {
        let g = Grid::new(9).unwrap();
        let v = VectorField::from_fn(g, |x, y, _| [y, x, 0.0]);
        assert_eq!(sup_norm(&v).unwrap(), 2.0);
        let r = v.full_report(2, 0.5, 6.0, &pairs(9)).unwrap();
        let s0 = v.component(0).full_report(2, 0.5, 6.0, &pairs(9)).unwrap();
        let s1 = v.component(1).full_report(2, 0.5, 6.0, &pairs(9)).unwrap();
        assert!((r.c_norm - s0.c_norm - s1.c_norm).abs() < 1e-12);
        let lq = r.lebesgue.unwrap();
        assert!((lq.lq_norm - 2.0 * s0.lebesgue.unwrap().lq_norm).abs() < 1e-12);
    }
}
