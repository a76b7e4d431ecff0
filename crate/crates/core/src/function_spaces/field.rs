use std::ops::{Add, Sub};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real values sampled at every node of a [`Grid`], x index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite value {} at node {pos}",
                values[pos]
            )));
        }
        Ok(ScalarField { grid, values })
    }

    /// Builds a field without the finiteness check. Norm operations still
    /// reject non-finite values.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        ScalarField { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField::from_raw(grid, vec![0.0; grid.node_count()])
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField::from_raw(grid, vec![c; grid.node_count()])
    }

    /// Samples `f(x, y, z)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|idx| {
                let [x, y, z] = grid.position(idx);
                f(x, y, z)
            })
            .collect();
        ScalarField::from_raw(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, j, k)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|v| lambda * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(ScalarField::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(pos) => Err(Error::InvalidField(format!(
                "non-finite value {} at node {pos}",
                self.values[pos]
            ))),
            None => Ok(()),
        }
    }

    fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidField(format!(
                "grid mismatch: {} vs {} nodes per axis",
                self.grid.n(),
                other.grid.n()
            )));
        }
        Ok(())
    }

    /// Restriction to the coarse grid of a nested pair (every other node).
    pub fn restrict(&self) -> Result<Self> {
        let coarse = Grid::new((self.grid.n() + 1) / 2)?;
        let n = coarse.n();
        let mut values = Vec::with_capacity(coarse.node_count());
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    values.push(self.at(2 * i, 2 * j, 2 * k));
                }
            }
        }
        Ok(ScalarField::from_raw(coarse, values))
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;

    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b)
            .expect("adding fields on different grids")
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;

    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b)
            .expect("subtracting fields on different grids")
    }
}

/// Three scalar components on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        let g = components[0].grid();
        if components.iter().any(|c| c.grid() != g) {
            return Err(Error::InvalidField(
                "vector components live on different grids".into(),
            ));
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            components: [
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
            ],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let mut comps = [
            Vec::with_capacity(grid.node_count()),
            Vec::with_capacity(grid.node_count()),
            Vec::with_capacity(grid.node_count()),
        ];
        for idx in 0..grid.node_count() {
            let [x, y, z] = grid.position(idx);
            let v = f(x, y, z);
            for c in 0..3 {
                comps[c].push(v[c]);
            }
        }
        let [a, b, c] = comps;
        VectorField {
            components: [
                ScalarField::from_raw(grid, a),
                ScalarField::from_raw(grid, b),
                ScalarField::from_raw(grid, c),
            ],
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    #[inline]
    pub fn component(&self, c: usize) -> &ScalarField {
        &self.components[c]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn scale(&self, lambda: f64) -> Self {
        VectorField {
            components: self.components.clone().map(|c| c.scale(lambda)),
        }
    }

    pub fn zip_with(&self, other: &VectorField, f: impl Fn(f64, f64) -> f64 + Copy) -> Result<Self> {
        Ok(VectorField {
            components: [
                self.components[0].zip_with(&other.components[0], f)?,
                self.components[1].zip_with(&other.components[1], f)?,
                self.components[2].zip_with(&other.components[2], f)?,
            ],
        })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarField::is_zero)
    }

    /// Largest pointwise component magnitude.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.values().iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for &VectorField {
    type Output = VectorField;

    fn add(self, rhs: &VectorField) -> VectorField {
        self.zip_with(rhs, |a, b| a + b)
            .expect("adding fields on different grids")
    }
}

impl Sub for &VectorField {
    type Output = VectorField;

    fn sub(self, rhs: &VectorField) -> VectorField {
        self.zip_with(rhs, |a, b| a - b)
            .expect("subtracting fields on different grids")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(5).unwrap();
        let mut v = vec![0.0; g.node_count()];
        v[7] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::InvalidField(_))));
    }

    #[test]
    fn rejects_wrong_length() {
        let g = Grid::new(5).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 10]).is_err());
    }

    #[test]
    fn restriction_picks_shared_nodes() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, y, z| x + 10.0 * y + 100.0 * z);
        let c = u.restrict().unwrap();
        let expect = ScalarField::from_fn(c.grid(), |x, y, z| x + 10.0 * y + 100.0 * z);
        assert_eq!(c, expect);
    }

    #[test]
    fn vector_components_share_grid() {
        let a = ScalarField::zeros(Grid::new(5).unwrap());
        let b = ScalarField::zeros(Grid::new(9).unwrap());
        assert!(VectorField::new([a.clone(), a, b]).is_err());
    }
}
