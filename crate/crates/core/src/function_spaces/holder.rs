//! Discrete Hölder seminorm `sup |w(x) - w(y)| / |x - y|^alpha`.
//!
//! The supremum runs over a finite pair set that depends only on the grid,
//! the pair budget and the seed:
//!
//! * when `node_count^2 <= budget`, every unordered node pair;
//! * otherwise every pair lying on a common grid line, plus a seeded uniform
//!   sample of general pairs filling the rest of the budget.
//!
//! The result is always a lower bound for the seminorm of any function
//! interpolating the nodal values. Because the pair set is fixed before any
//! field is seen, seminorms of different fields on one grid are taken over
//! the same pairs, so product and triangle inequalities hold literally.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::field::ScalarField;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Default number of evaluated pairs: exhaustive up to `n = 9`.
pub const DEFAULT_PAIR_BUDGET: usize = 1 << 21;
pub const DEFAULT_SEED: u64 = 0x5EED_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSpec {
    pub budget: usize,
    pub seed: u64,
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec {
            budget: DEFAULT_PAIR_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

impl PairSpec {
    pub fn new(budget: usize, seed: u64) -> Self {
        PairSpec { budget, seed }
    }

    /// All axis-aligned pairs of `grid` plus `extra` sampled pairs.
    pub fn axis_plus(grid: Grid, extra: usize, seed: u64) -> Self {
        PairSpec {
            budget: grid.axis_aligned_pairs() + extra,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStrategy {
    Exhaustive,
    AxisPlusSample,
}

/// Frozen set of node pairs for one grid.
#[derive(Debug, Clone)]
pub struct PairSet {
    grid: Grid,
    spec: PairSpec,
    strategy: PairStrategy,
    sampled: Vec<(u32, u32)>,
}

impl PairSet {
    pub fn build(grid: Grid, spec: PairSpec) -> Result<Self> {
        if spec.budget < grid.nearest_neighbor_pairs() {
            return Err(Error::Precondition(format!(
                "pair budget {} is below the {} axis-aligned nearest-neighbour pairs",
                spec.budget,
                grid.nearest_neighbor_pairs()
            )));
        }
        let nodes = grid.node_count();
        let exhaustive = nodes
            .checked_mul(nodes)
            .is_some_and(|sq| sq <= spec.budget);
        if exhaustive {
            return Ok(PairSet {
                grid,
                spec,
                strategy: PairStrategy::Exhaustive,
                sampled: Vec::new(),
            });
        }
        let extra = spec.budget.saturating_sub(grid.axis_aligned_pairs());
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut sampled = Vec::with_capacity(extra);
        while sampled.len() < extra {
            let a = rng.gen_range(0..nodes) as u32;
            let b = rng.gen_range(0..nodes) as u32;
            if a != b {
                sampled.push((a, b));
            }
        }
        Ok(PairSet {
            grid,
            spec,
            strategy: PairStrategy::AxisPlusSample,
            sampled,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn spec(&self) -> PairSpec {
        self.spec
    }

    pub fn strategy(&self) -> PairStrategy {
        self.strategy
    }

    pub fn len(&self) -> usize {
        match self.strategy {
            PairStrategy::Exhaustive => {
                let n = self.grid.node_count();
                n * (n - 1) / 2
            }
            PairStrategy::AxisPlusSample => self.grid.axis_aligned_pairs() + self.sampled.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|x - y|^{-alpha}` indexed by the squared lattice distance in units of `h^2`.
    fn inverse_distance_table(&self, alpha: f64) -> Vec<f64> {
        let m = self.grid.cells();
        let h = self.grid.spacing();
        (0..=3 * m * m)
            .map(|d2| {
                if d2 == 0 {
                    0.0
                } else {
                    (h * (d2 as f64).sqrt()).powf(-alpha)
                }
            })
            .collect()
    }

    pub fn seminorm(&self, u: &ScalarField, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        if u.grid() != self.grid {
            return Err(Error::InvalidField(format!(
                "field on n={} evaluated with pair set for n={}",
                u.grid().n(),
                self.grid.n()
            )));
        }
        u.check_finite()?;
        let table = self.inverse_distance_table(alpha);
        Ok(match self.strategy {
            PairStrategy::Exhaustive => self.exhaustive(u.values(), &table),
            PairStrategy::AxisPlusSample => {
                let axis = self.axis_lines(u.values(), &table);
                let sampled = self.sampled_pairs(u.values(), &table);
                axis.max(sampled)
            }
        })
    }

    fn exhaustive(&self, w: &[f64], table: &[f64]) -> f64 {
        let g = self.grid;
        (0..w.len())
            .into_par_iter()
            .map(|a| {
                let [ai, aj, ak] = g.unravel(a);
                let mut best = 0.0_f64;
                for b in a + 1..w.len() {
                    let [bi, bj, bk] = g.unravel(b);
                    let d2 = sq_diff(ai, bi) + sq_diff(aj, bj) + sq_diff(ak, bk);
                    best = best.max((w[a] - w[b]).abs() * table[d2]);
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    fn axis_lines(&self, w: &[f64], table: &[f64]) -> f64 {
        let g = self.grid;
        let n = g.n();
        (0..3 * n * n)
            .into_par_iter()
            .map(|line| {
                let axis = line / (n * n);
                let p = line % n;
                let q = (line / n) % n;
                let base = match axis {
                    0 => g.index(0, p, q),
                    1 => g.index(p, 0, q),
                    _ => g.index(p, q, 0),
                };
                let stride = g.stride(axis);
                let vals: Vec<f64> = (0..n).map(|i| w[base + i * stride]).collect();
                let mut best = 0.0_f64;
                for k in 1..n {
                    let mut diff = 0.0_f64;
                    for i in 0..n - k {
                        diff = diff.max((vals[i + k] - vals[i]).abs());
                    }
                    best = best.max(diff * table[k * k]);
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    fn sampled_pairs(&self, w: &[f64], table: &[f64]) -> f64 {
        let g = self.grid;
        self.sampled
            .par_chunks(4096)
            .map(|chunk| {
                chunk.iter().fold(0.0_f64, |best, &(a, b)| {
                    let (a, b) = (a as usize, b as usize);
                    let [ai, aj, ak] = g.unravel(a);
                    let [bi, bj, bk] = g.unravel(b);
                    let d2 = sq_diff(ai, bi) + sq_diff(aj, bj) + sq_diff(ak, bk);
                    best.max((w[a] - w[b]).abs() * table[d2])
                })
            })
            .reduce(|| 0.0, f64::max)
    }
}

#[inline]
fn sq_diff(a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d * d
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, "(0, 1)"))
    }
}

/// Hölder seminorm of `u` over the pair set described by `spec`.
pub fn holder_seminorm(u: &ScalarField, alpha: f64, spec: PairSpec) -> Result<f64> {
    check_alpha(alpha)?;
    PairSet::build(u.grid(), spec)?.seminorm(u, alpha)
}
