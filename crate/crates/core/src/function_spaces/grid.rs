use crate::error::{Error, Result};

/// Uniform node lattice over the unit cube `[0,1]^3`.
///
/// The number of nodes per axis has the nested form `2^k + 1`, so the spacing
/// is a power of two and node coordinates are exact in `f64`. Refining with
/// [`Grid::refine`] (`n -> 2n - 1`) keeps every existing node in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 5;

    pub fn new(n_per_axis: usize) -> Result<Self> {
        if n_per_axis < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "{n_per_axis} nodes per axis, need at least {}",
                Self::MIN_NODES
            )));
        }
        if !(n_per_axis - 1).is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{n_per_axis} nodes per axis is not of the nested form 2^k+1"
            )));
        }
        Ok(Grid { n: n_per_axis })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of cells per axis.
    #[inline]
    pub fn cells(&self) -> usize {
        self.n - 1
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Memory stride of one step along `axis` (x fastest).
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    pub fn refine(&self) -> Grid {
        Grid { n: 2 * self.n - 1 }
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let last = self.n - 1;
        self.unravel(idx).iter().any(|&c| c == 0 || c == last)
    }

    /// Number of axis-aligned nearest-neighbour node pairs.
    pub fn nearest_neighbor_pairs(&self) -> usize {
        3 * self.n * self.n * (self.n - 1)
    }

    /// Number of node pairs lying on a common grid line.
    pub fn axis_aligned_pairs(&self) -> usize {
        3 * self.n * self.n * (self.n * (self.n - 1) / 2)
    }
}
