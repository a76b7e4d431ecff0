//! Young's inequality with epsilon: `X^a1 Y^a2 <= eps X + C(eps) Y^B`.
//!
//! For fixed `eps` the smallest admissible constant is
//! `C_min(eps) = sup_{X > 0} (X^a1 - eps X) = (1 - a1) a1^(a1/(1-a1)) eps^(-a1/(1-a1))`
//! (take `Y = 1`; the general case follows from the scaling
//! `X = Y^B Z`), so `log C_min` is linear in `log eps` with slope
//! `-a1 / (1 - a1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponents::young_exponents;

/// Closed-form minimal constant for one `eps`.
pub fn minimal_constant(a1: f64, eps: f64) -> f64 {
    let r = a1 / (1.0 - a1);
    (1.0 - a1) * a1.powf(r) * eps.powf(-r)
}

/// Prefactor `K` in `C_min(eps) = K eps^(-a1/(1-a1))`.
pub fn young_prefactor(a1: f64) -> f64 {
    minimal_constant(a1, 1.0)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungFit {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
    pub epsilons: Vec<f64>,
    pub c_closed: Vec<f64>,
    pub c_search: Vec<f64>,
    pub slope_closed: f64,
    pub slope_search: f64,
    pub neg_a_young: f64,
    pub neg_a_stated: f64,
    /// Sampled `(X, Y, eps)` triples checked against the split inequality.
    pub samples: usize,
    pub violations: usize,
}

impl YoungFit {
    pub fn closed_form_matches(&self, tol: f64) -> bool {
        (self.slope_closed - self.neg_a_young).abs() <= tol
    }

    pub fn search_matches(&self, tol: f64) -> bool {
        (self.slope_search - self.neg_a_young).abs() <= tol
    }
}

/// Confirms the Young split numerically.
///
/// For each `eps`, `C_min(eps)` is taken from the closed form and separately
/// from a random log-uniform search over `X` in `[1e-8, 1e40]` with
/// `trials` draws. Then `trials` random `(X, Y, eps)` triples are checked
/// against `X^a1 Y^a2 <= eps X + C_min(eps) Y^B` up to `1e-12` relative.
pub fn young_split_check(
    a1: f64,
    a2: f64,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
) -> Result<YoungFit> {
    let exps = young_exponents(a1, a2)?;
    if epsilons.len() < 2 {
        return Err(Error::Precondition("need at least two epsilons to fit a slope".into()));
    }
    if let Some(&e) = epsilons.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::domain("eps", e, "(0, 1]"));
    }
    if trials < 100 {
        return Err(Error::Precondition(format!("{trials} trials, need at least 100")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c_closed: Vec<f64> = epsilons.iter().map(|&e| minimal_constant(a1, e)).collect();
    let (log_lo, log_hi) = (-8.0_f64 * std::f64::consts::LN_10, 40.0 * std::f64::consts::LN_10);
    let c_search: Vec<f64> = epsilons
        .iter()
        .map(|&eps| {
            (0..trials)
                .map(|_| {
                    let x = rng.gen_range(log_lo..log_hi).exp();
                    x.powf(a1) - eps * x
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let log_eps: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ln = |v: &[f64]| v.iter().map(|c| c.ln()).collect::<Vec<_>>();
    let slope_closed = fit_slope(&log_eps, &ln(&c_closed));
    let slope_search = fit_slope(&log_eps, &ln(&c_search));

    let (e_lo, e_hi) = (
        epsilons.iter().cloned().fold(f64::INFINITY, f64::min).ln(),
        epsilons.iter().cloned().fold(0.0, f64::max).ln(),
    );
    let mut violations = 0;
    for t in 0..trials {
        let x = rng.gen_range(-6.0..6.0_f64).exp();
        // every 50th triple exercises Y = 0
        let y = if t % 50 == 0 {
            0.0
        } else {
            rng.gen_range(-6.0..6.0_f64).exp()
        };
        let eps = if e_hi > e_lo {
            rng.gen_range(e_lo..=e_hi).exp()
        } else {
            e_hi.exp()
        };
        let lhs = x.powf(a1) * y.powf(a2);
        let rhs = eps * x + minimal_constant(a1, eps) * y.powf(exps.b);
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(YoungFit {
        a1,
        a2,
        b: exps.b,
        epsilons: epsilons.to_vec(),
        c_closed,
        c_search,
        slope_closed,
        slope_search,
        neg_a_young: -exps.a_young,
        neg_a_stated: -exps.a_stated,
        samples: trials,
        violations,
    })
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
