//! The a-priori estimate chain evaluated on solver output: product-rule
//! bounds for the convective term, its interpolation bound, the empirical
//! Schauder constant of the Stokes solve, and the final ratio
//!
//! ```text
//! Q = |v|^(2+alpha) / (|f|^(alpha) + ||v||_{W^1_2}^B).
//! ```
//!
//! All constants are reported, never compared against absolute targets.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentSet;
use crate::function_spaces::{first_derivative, FieldNorms, PairSet, ScalarField, VectorField};
use crate::interp_verify::young_prefactor;
use crate::ns_solver::{
    advect, solve_navier_stokes, solve_stokes, FlowState, FluidProblem, ForcingKind, SolverConfig,
};

/// Both sides of the sup and Hölder product-rule bounds for `(v . grad) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductRule {
    pub lhs0: f64,
    pub rhs0: f64,
    pub lhs_alpha: f64,
    pub rhs_alpha: f64,
}

impl ProductRule {
    /// `lhs <= rhs (1 + slack)` for both bounds.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs0 <= self.rhs0 * (1.0 + slack) && self.lhs_alpha <= self.rhs_alpha * (1.0 + slack)
    }
}

/// Evaluates
/// `sum_k max|((v.grad)v)_k| <= sum_{i,k,l} max|v_i| max|d_l v_k|` and
/// `sum_k <((v.grad)v)_k> <= sum_{i,k,l} (max|v_i| <d_l v_k> + <v_i> max|d_l v_k|)`
/// with every seminorm taken over the same pair set.
pub fn product_rule_check(v: &VectorField, alpha: f64, pairs: &PairSet) -> Result<ProductRule> {
    let adv = advect(v)?;
    let mut sup_v = 0.0;
    let mut hol_v = 0.0;
    let mut sup_d = 0.0;
    let mut hol_d = 0.0;
    for i in 0..3 {
        let c = v.component(i);
        sup_v += c.sup_norm()?;
        hol_v += pairs.seminorm(c, alpha)?;
        for l in 0..3 {
            let d = first_derivative(c, l);
            sup_d += d.sup_norm()?;
            hol_d += pairs.seminorm(&d, alpha)?;
        }
    }
    let mut lhs0 = 0.0;
    let mut lhs_alpha = 0.0;
    for k in 0..3 {
        lhs0 += adv.component(k).sup_norm()?;
        lhs_alpha += pairs.seminorm(adv.component(k), alpha)?;
    }
    Ok(ProductRule {
        lhs0,
        rhs0: sup_v * sup_d,
        lhs_alpha,
        rhs_alpha: sup_v * hol_d + hol_v * sup_d,
    })
}

/// Pieces of `|(v.grad)v|^(alpha) <= C_nl (|v|^(2+alpha))^a1 (||v||_6)^a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearEstimate {
    pub nlterm_alpha: f64,
    pub v_2a: f64,
    pub v_l6: f64,
    pub a1: f64,
    pub a2: f64,
    pub c_nl: f64,
}

pub fn nonlinear_holder_estimate(v: &VectorField, alpha: f64, pairs: &PairSet) -> Result<NonlinearEstimate> {
    if v.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    let exps = ExponentSet::new(6.0, alpha)?;
    let nlterm_alpha = advect(v)?.c_norm(0, alpha, pairs)?.c_norm;
    let v_2a = v.c_norm(2, alpha, pairs)?.c_norm;
    let v_l6 = v.lq_norm(6.0)?;
    Ok(NonlinearEstimate {
        nlterm_alpha,
        v_2a,
        v_l6,
        a1: exps.a1,
        a2: exps.a2,
        c_nl: nlterm_alpha / (v_2a.powf(exps.a1) * v_l6.powf(exps.a2)),
    })
}

/// Nodal pressure gradient.
pub fn pressure_gradient(p: &ScalarField) -> VectorField {
    VectorField::new([0, 1, 2].map(|a| first_derivative(p, a))).expect("same grid")
}

/// `(|v|^(2+alpha) + |grad p|^(alpha)) / |g|^(alpha)` for a state solving
/// the Stokes problem with right-hand side `g`.
pub fn schauder_ratio(state: &FlowState, g: &VectorField, alpha: f64, pairs: &PairSet) -> Result<f64> {
    let v = state.nodal_velocity();
    let grad_p = pressure_gradient(&state.nodal_pressure());
    let g_alpha = g.c_norm(0, alpha, pairs)?.c_norm;
    let top = v.c_norm(2, alpha, pairs)?.c_norm + grad_p.c_norm(0, alpha, pairs)?.c_norm;
    if g_alpha == 0.0 {
        return if top == 0.0 { Ok(0.0) } else { Err(Error::Inconsistent) };
    }
    Ok(top / g_alpha)
}

/// Schauder ratios of the Stokes solves of `problems`, each measured
/// against its nodal forcing.
pub fn schauder_ratios(
    problems: &[FluidProblem],
    alpha: f64,
    pairs: &PairSet,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    problems
        .par_iter()
        .map(|problem| {
            let state = solve_stokes(problem, cfg)?;
            schauder_ratio(&state, problem.forcing(), alpha, pairs)
        })
        .collect()
}

/// Norms of one solve of the sweep. Non-converged entries carry `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub amplitude: f64,
    pub f_alpha: f64,
    pub v_2a: f64,
    pub gradp_alpha: f64,
    pub v_w12: f64,
    pub v_l6: f64,
    pub nlterm_alpha: f64,
    pub g_alpha: f64,
    pub b: f64,
    pub q: f64,
    /// `Q` with the exponent 2 in place of `B`.
    pub q_b2: f64,
    pub c_nl: f64,
    pub c_schauder: f64,
    pub converged: bool,
    pub picard_iterations: usize,
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl EstimateReport {
    fn diverged(amplitude: f64, b: f64) -> Self {
        let nan = f64::NAN;
        EstimateReport {
            amplitude,
            f_alpha: nan,
            v_2a: nan,
            gradp_alpha: nan,
            v_w12: nan,
            v_l6: nan,
            nlterm_alpha: nan,
            g_alpha: nan,
            b,
            q: nan,
            q_b2: nan,
            c_nl: nan,
            c_schauder: nan,
            converged: false,
            picard_iterations: 0,
        }
    }

    /// Evaluates every entry from the nodal fields of a converged state.
    pub fn evaluate(
        amplitude: f64,
        forcing: &VectorField,
        state: &FlowState,
        exps: &ExponentSet,
        pairs: &PairSet,
    ) -> Result<Self> {
        let alpha = exps.alpha;
        let v = state.nodal_velocity();
        let adv = advect(&v)?;
        let g = forcing - &adv;
        let f_alpha = forcing.c_norm(0, alpha, pairs)?.c_norm;
        let v_2a = v.c_norm(2, alpha, pairs)?.c_norm;
        let gradp_alpha = pressure_gradient(&state.nodal_pressure()).c_norm(0, alpha, pairs)?.c_norm;
        let v_w12 = v.sobolev_norm(1, 2.0)?;
        let v_l6 = v.lq_norm(6.0)?;
        let nlterm_alpha = adv.c_norm(0, alpha, pairs)?.c_norm;
        let g_alpha = g.c_norm(0, alpha, pairs)?.c_norm;
        let b = exps.b();
        Ok(EstimateReport {
            amplitude,
            f_alpha,
            v_2a,
            gradp_alpha,
            v_w12,
            v_l6,
            nlterm_alpha,
            g_alpha,
            b,
            q: ratio_or_zero(v_2a, f_alpha + v_w12.powf(b)),
            q_b2: ratio_or_zero(v_2a, f_alpha + v_w12.powi(2)),
            c_nl: ratio_or_zero(nlterm_alpha, v_2a.powf(exps.a1) * v_l6.powf(exps.a2)),
            c_schauder: ratio_or_zero(v_2a + gradp_alpha, g_alpha),
            converged: true,
            picard_iterations: 0,
        })
    }
}

/// Outcome of `|g| <= eps |v|^(2+alpha) + |f| + C eps^(-A) ||v||_6^B` at one
/// `eps` over all converged sweep members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateBound {
    pub eps: f64,
    pub constant: f64,
    /// Smallest `rhs - lhs` over the members.
    pub min_margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremSweep {
    pub forcing: ForcingKind,
    pub nu: f64,
    pub grid_n: usize,
    pub exponents: ExponentSet,
    pub rows: Vec<EstimateReport>,
}

pub const CSV_HEADER: &str =
    "amplitude,f_alpha,v_2a,gradp_a,v_w12,v_l6,nlterm_a,g_alpha,B,Q,C_nl,C_schauder,converged";

impl TheoremSweep {
    fn converged(&self) -> impl Iterator<Item = &EstimateReport> {
        self.rows.iter().filter(|r| r.converged)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn max_q(&self) -> f64 {
        self.converged().map(|r| r.q).fold(0.0, f64::max)
    }

    pub fn max_c_nl(&self) -> f64 {
        self.converged().map(|r| r.c_nl).fold(0.0, f64::max)
    }

    pub fn max_c_schauder(&self) -> f64 {
        self.converged().map(|r| r.c_schauder).fold(0.0, f64::max)
    }

    /// Checks the intermediate bound with the constant
    /// `K C_nl^(1 + A)`, `K` the Young prefactor for `a1` and `C_nl` the
    /// largest over the sweep.
    pub fn intermediate_bound(&self, eps: &[f64]) -> Vec<IntermediateBound> {
        let e = &self.exponents;
        let a = e.young.a_young;
        let constant = young_prefactor(e.a1) * self.max_c_nl().powf(1.0 + a);
        eps.iter()
            .map(|&eps| {
                let min_margin = self
                    .converged()
                    .map(|r| {
                        let rhs = eps * r.v_2a + r.f_alpha + constant * eps.powf(-a) * r.v_l6.powf(r.b);
                        rhs - r.g_alpha
                    })
                    .fold(f64::INFINITY, f64::min);
                IntermediateBound {
                    eps,
                    constant,
                    min_margin,
                    holds: min_margin >= 0.0,
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.amplitude,
                r.f_alpha,
                r.v_2a,
                r.gradp_alpha,
                r.v_w12,
                r.v_l6,
                r.nlterm_alpha,
                r.g_alpha,
                r.b,
                r.q,
                r.c_nl,
                r.c_schauder,
                r.converged
            )
            .unwrap();
        }
        s
    }
}

/// Solves the Navier–Stokes problem for each amplitude and evaluates the
/// estimate chain. A divergent solve yields a flagged row instead of an
/// error.
pub fn theorem_sweep(
    amplitudes: &[f64],
    forcing: ForcingKind,
    nu: f64,
    exponents: ExponentSet,
    pairs: &PairSet,
    cfg: &SolverConfig,
) -> Result<TheoremSweep> {
    let grid = pairs.grid();
    let rows = amplitudes
        .par_iter()
        .map(|&amp| {
            let problem = forcing.problem(grid, nu, amp)?;
            match solve_navier_stokes(&problem, cfg) {
                Ok((state, trace)) => {
                    let mut r = EstimateReport::evaluate(amp, problem.forcing(), &state, &exponents, pairs)?;
                    r.picard_iterations = trace.iterations();
                    Ok(r)
                }
                Err(Error::NonlinearDivergence { .. }) => Ok(EstimateReport::diverged(amp, exponents.b())),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremSweep {
        forcing,
        nu,
        grid_n: grid.n(),
        exponents,
        rows,
    })
}
