//! Empirical checks of the Hölder/Lebesgue interpolation inequality
//!
//! ```text
//! |u|^(l) <= C (|u|^(2+alpha))^omega (||u||_q)^(1-omega),
//! omega = (q l + 3) / (q (2 + alpha) + 3),
//! ```
//!
//! and of the Young split that follows it. The constant `C` is existential,
//! so the checks only ever assert boundedness, stability under grid
//! refinement and exact scaling behaviour.

mod family;
mod young;

use std::fmt::Write as _;

use rayon::prelude::*;

pub use family::{
    random_fourier_vector, FamilyKind, FamilyMember, FamilyParams, FunctionFamily, TestFunction,
};
pub use young::{fit_slope, log_space, minimal_constant, young_prefactor, young_split_check, YoungFit};

use crate::error::{Error, Result};
use crate::exponents::omega;
use crate::function_spaces::{FieldNorms, Grid, NormReport, PairSet, PairSpec, ScalarField};

/// The four pieces of one interpolation ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioTerms {
    pub lhs: f64,
    pub norm_2a: f64,
    pub norm_q: f64,
    pub omega: f64,
    pub ratio: f64,
}

/// `|u|^(l)`: the integer norm `sum_{|beta| <= l} max |D^beta u|` for
/// integer `l`, otherwise the full Hölder norm of order `l`.
///
/// `report` must hold orders up to two for the given `alpha`; fractional
/// parts other than `alpha` are evaluated separately.
pub fn l_norm(u: &ScalarField, l: f64, alpha: f64, report: &NormReport, pairs: &PairSet) -> Result<f64> {
    if !(0.0..2.0 + alpha).contains(&l) {
        return Err(Error::domain("l", l, "[0, 2 + alpha)"));
    }
    let k = l.floor();
    let frac = l - k;
    let k = k as u32;
    if frac == 0.0 {
        return Ok(report.integer_norm(k));
    }
    if (frac - alpha).abs() <= 1e-12 {
        return Ok(report.holder_norm(k));
    }
    Ok(u.c_norm(k, frac, pairs)?.c_norm)
}

fn ratio_from(lhs: f64, report: &NormReport, q: f64, l: f64, alpha: f64) -> Result<RatioTerms> {
    let w = omega(l, q, alpha)?;
    let norm_2a = report.c_norm;
    let norm_q = report
        .lebesgue
        .map(|x| x.lq_norm)
        .expect("report built with a Lebesgue exponent");
    let ratio = lhs / (norm_2a.powf(w) * norm_q.powf(1.0 - w));
    Ok(RatioTerms {
        lhs,
        norm_2a,
        norm_q,
        omega: w,
        ratio,
    })
}

/// `R = |u|^(l) / ((|u|^(2+alpha))^omega (||u||_q)^(1-omega))`.
pub fn interpolation_ratio(
    u: &ScalarField,
    l: f64,
    q: f64,
    alpha: f64,
    pairs: &PairSet,
) -> Result<RatioTerms> {
    if u.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    let report = u.full_report(2, alpha, q, pairs)?;
    let lhs = l_norm(u, l, alpha, &report, pairs)?;
    ratio_from(lhs, &report, q, l, alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpRow {
    pub kind: String,
    pub param: String,
    pub seed: u64,
    pub terms: RatioTerms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpReport {
    pub l: f64,
    pub q: f64,
    pub alpha: f64,
    pub grid_n: usize,
    pub seed: u64,
    pub rows: Vec<InterpRow>,
    /// Largest ratio over the family.
    pub c_emp: f64,
}

impl InterpReport {
    pub fn median_ratio(&self) -> f64 {
        let mut r: Vec<f64> = self.rows.iter().map(|x| x.terms.ratio).collect();
        r.sort_by(f64::total_cmp);
        let n = r.len();
        if n % 2 == 1 {
            r[n / 2]
        } else {
            0.5 * (r[n / 2 - 1] + r[n / 2])
        }
    }

    /// Members whose ratio exceeds `factor` times the family median.
    pub fn outliers(&self, factor: f64) -> Vec<&InterpRow> {
        let cap = factor * self.median_ratio();
        self.rows.iter().filter(|r| r.terms.ratio > cap).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.terms.ratio.is_finite() && r.terms.ratio > 0.0)
    }

    /// CSV with header `kind,param,seed,l,q,alpha,lhs,norm_2a,norm_q,omega,ratio`
    /// and a closing `C_emp,<value>` line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,param,seed,l,q,alpha,lhs,norm_2a,norm_q,omega,ratio\n");
        for r in &self.rows {
            let t = &r.terms;
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.kind, r.param, r.seed, self.l, self.q, self.alpha, t.lhs, t.norm_2a, t.norm_q, t.omega, t.ratio
            )
            .unwrap();
        }
        writeln!(s, "C_emp,{}", self.c_emp).unwrap();
        s
    }
}

/// Evaluates the ratio for every member and every `l`, sharing the norm
/// computation per member. Returns one report per `l`.
pub fn family_sweep_multi(
    family: &FunctionFamily,
    ls: &[f64],
    q: f64,
    alpha: f64,
    grid: Grid,
    pairs: PairSpec,
) -> Result<Vec<InterpReport>> {
    let members = family.members()?;
    for &l in ls {
        omega(l, q, alpha)?;
    }
    let pairs = PairSet::build(grid, pairs)?;
    let per_member: Vec<Vec<InterpRow>> = members
        .par_iter()
        .map(|m| {
            let u = m.function.sample(grid);
            if u.is_zero() {
                return Err(Error::UndefinedRatio);
            }
            let report = u.full_report(2, alpha, q, &pairs)?;
            ls.iter()
                .map(|&l| {
                    let lhs = l_norm(&u, l, alpha, &report, &pairs)?;
                    Ok(InterpRow {
                        kind: m.kind.name().to_string(),
                        param: m.param.clone(),
                        seed: m.seed,
                        terms: ratio_from(lhs, &report, q, l, alpha)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(ls
        .iter()
        .enumerate()
        .map(|(li, &l)| {
            let rows: Vec<InterpRow> = per_member.iter().map(|r| r[li].clone()).collect();
            let c_emp = rows.iter().map(|r| r.terms.ratio).fold(0.0, f64::max);
            InterpReport {
                l,
                q,
                alpha,
                grid_n: grid.n(),
                seed: family.seed,
                rows,
                c_emp,
            }
        })
        .collect())
}

pub fn family_sweep(
    family: &FunctionFamily,
    l: f64,
    q: f64,
    alpha: f64,
    grid: Grid,
    pairs: PairSpec,
) -> Result<InterpReport> {
    Ok(family_sweep_multi(family, &[l], q, alpha, grid, pairs)?.remove(0))
}

/// `C_emp` on `grid` and on its nested refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementCheck {
    pub l: f64,
    pub coarse: InterpReport,
    pub fine: InterpReport,
}

impl RefinementCheck {
    /// `|C_emp(coarse) - C_emp(fine)| / C_emp(fine)`.
    pub fn relative_change(&self) -> f64 {
        (self.coarse.c_emp - self.fine.c_emp).abs() / self.fine.c_emp
    }
}

pub fn refinement_check(
    family: &FunctionFamily,
    ls: &[f64],
    q: f64,
    alpha: f64,
    grid: Grid,
    pairs: PairSpec,
) -> Result<Vec<RefinementCheck>> {
    let coarse = family_sweep_multi(family, ls, q, alpha, grid, pairs)?;
    let fine = family_sweep_multi(family, ls, q, alpha, grid.refine(), pairs)?;
    Ok(coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| RefinementCheck { l: c.l, coarse: c, fine: f })
        .collect())
}

/// Log–log slopes of both sides of the interpolation inequality along a
/// family of dilated compact bumps.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub l: f64,
    pub scales: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub s_lhs: f64,
    pub s_rhs: f64,
}

impl ScalingFit {
    pub fn mismatch(&self) -> f64 {
        (self.s_lhs - self.s_rhs).abs()
    }
}

/// Configuration of the dilated bump `amp * phi(mu |x - x0| / radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFamily {
    pub center: [f64; 3],
    pub radius: f64,
    pub amp: f64,
}

impl Default for BumpFamily {
    fn default() -> Self {
        BumpFamily {
            center: [0.5; 3],
            radius: 0.45,
            amp: 1.0,
        }
    }
}

/// Where the dilated bumps are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BumpSampling {
    /// Every dilation on the same unit-cube grid; narrow bumps lose
    /// resolution.
    Cube,
    /// Each bump on a grid spanning its own support box. The bump vanishes
    /// outside that box, so sup, Hölder and `L_q` norms over the box equal
    /// those over the cube; derivative and Hölder terms are converted with
    /// the box side.
    #[default]
    SupportWindow,
}

/// Norm pieces of one sampled bump, read on a box of side `side`.
struct BumpNorms {
    sup: Vec<f64>,
    holder: Vec<f64>,
    lq: f64,
}

impl BumpNorms {
    fn from_report(report: &NormReport, side: f64, alpha: f64) -> BumpNorms {
        let sup = report
            .sup_norms
            .iter()
            .enumerate()
            .map(|(k, s)| s * side.powi(-(k as i32)))
            .collect();
        let holder = report
            .holder_seminorms
            .iter()
            .enumerate()
            .map(|(k, s)| s * side.powf(-(k as f64 + alpha)))
            .collect();
        let lq = report.lebesgue.map(|x| x.lq_norm).unwrap();
        BumpNorms {
            sup,
            holder,
            lq: lq * side.powf(3.0 / report.lebesgue.unwrap().q),
        }
    }

    fn integer(&self, k: usize) -> f64 {
        self.sup[..=k].iter().sum()
    }
}

/// `|u|^(l)` from norm pieces; `extra` holds the seminorm of order
/// `floor(l)` at exponent `frac(l)` when that differs from `alpha`.
fn bump_l_norm(b: &BumpNorms, l: f64, alpha: f64, extra: Option<f64>) -> f64 {
    let k = l.floor() as usize;
    let frac = l - l.floor();
    if frac == 0.0 {
        b.integer(k)
    } else if let Some(e) = extra {
        b.integer(k) + e
    } else {
        debug_assert!((frac - alpha).abs() <= 1e-12);
        b.integer(k) + b.holder[k]
    }
}

pub fn scaling_balance_test(
    bump: BumpFamily,
    scales: &[f64],
    l: f64,
    q: f64,
    alpha: f64,
    grid: Grid,
    pairs: PairSpec,
    sampling: BumpSampling,
) -> Result<ScalingFit> {
    if scales.len() < 2 {
        return Err(Error::InvalidFamily("need at least two dilation factors".into()));
    }
    for &mu in scales {
        let r = bump.radius / mu;
        let inside = mu > 0.0 && bump.center.iter().all(|&c| c - r >= 0.0 && c + r <= 1.0);
        if !inside {
            return Err(Error::InvalidFamily(format!(
                "bump of radius {r} around {:?} leaves the cube",
                bump.center
            )));
        }
    }
    let w = omega(l, q, alpha)?;
    if l >= 2.0 + alpha {
        return Err(Error::domain("l", l, "[0, 2 + alpha)"));
    }
    let frac = l - l.floor();
    let needs_extra = frac != 0.0 && (frac - alpha).abs() > 1e-12;
    let pairs = PairSet::build(grid, pairs)?;
    let evaluate = |u: &ScalarField, side: f64| -> Result<(f64, f64)> {
        let report = u.full_report(2, alpha, q, &pairs)?;
        let b = BumpNorms::from_report(&report, side, alpha);
        let extra = if needs_extra {
            let k = l.floor() as u32;
            let s = u.c_norm(k, frac, &pairs)?.holder_seminorms[k as usize];
            Some(s * side.powf(-(k as f64 + frac)))
        } else {
            None
        };
        let lhs = bump_l_norm(&b, l, alpha, extra);
        let top = b.integer(2) + b.holder[2];
        Ok((lhs, top.powf(w) * b.lq.powf(1.0 - w)))
    };
    let values: Vec<(f64, f64)> = match sampling {
        BumpSampling::Cube => scales
            .iter()
            .map(|&mu| {
                let u = TestFunction::CompactBump {
                    center: bump.center,
                    radius: bump.radius,
                    mu,
                    amp: bump.amp,
                }
                .sample(grid);
                evaluate(&u, 1.0)
            })
            .collect::<Result<_>>()?,
        BumpSampling::SupportWindow => {
            // the sampled profile is the same for every dilation; only the
            // box side changes
            let u = TestFunction::CompactBump {
                center: [0.5; 3],
                radius: 0.5,
                mu: 1.0,
                amp: bump.amp,
            }
            .sample(grid);
            scales
                .iter()
                .map(|&mu| evaluate(&u, 2.0 * bump.radius / mu))
                .collect::<Result<_>>()?
        }
    };
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    let log_mu: Vec<f64> = scales.iter().map(|m| m.ln()).collect();
    let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
    Ok(ScalingFit {
        l,
        scales: scales.to_vec(),
        s_lhs: fit_slope(&log_mu, &ln(&lhs)),
        s_rhs: fit_slope(&log_mu, &ln(&rhs)),
        lhs,
        rhs,
    })
}
