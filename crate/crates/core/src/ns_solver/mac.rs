//! Staggered (marker-and-cell) storage on the cells of a [`Grid`].
//!
//! Component `c` of the velocity lives on the faces normal to axis `c`:
//! `N + 1` positions along axis `c` (the first and last on the walls) and
//! `N` cell-centred positions along the other two axes. Pressure lives at
//! the `N^3` cell centres.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_spaces::{Grid, ScalarField, VectorField};

/// Array shape of component `c` on a grid with `cells` cells per axis.
pub(crate) fn face_dims(cells: usize, c: usize) -> [usize; 3] {
    let mut d = [cells; 3];
    d[c] += 1;
    d
}

#[inline]
pub(crate) fn lin(d: &[usize; 3], i: usize, j: usize, k: usize) -> usize {
    i + d[0] * (j + d[1] * k)
}

/// Velocity with one value per face.
#[derive(Debug, Clone, PartialEq)]
pub struct MacVelocity {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

impl MacVelocity {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.cells();
        let comps = [0, 1, 2].map(|c| vec![0.0; face_dims(n, c).iter().product()]);
        MacVelocity { grid, comps }
    }

    /// Validates shapes, finiteness and zero normal velocity on the walls.
    pub fn new(grid: Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        let n = grid.cells();
        for (c, v) in comps.iter().enumerate() {
            let d = face_dims(n, c);
            if v.len() != d.iter().product::<usize>() {
                return Err(Error::InvalidField(format!(
                    "component {c} has {} values, expected {:?}",
                    v.len(),
                    d
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidField(format!("component {c} is not finite")));
            }
        }
        let u = MacVelocity { grid, comps };
        for c in 0..3 {
            let d = face_dims(n, c);
            let mut wall_nonzero = false;
            u.for_each_face(c, |idx, [i, j, k]| {
                let ijk = [i, j, k];
                if (ijk[c] == 0 || ijk[c] == d[c] - 1) && u.comps[c][idx] != 0.0 {
                    wall_nonzero = true;
                }
            });
            if wall_nonzero {
                return Err(Error::InvalidField(format!(
                    "component {c} has nonzero normal velocity on a wall"
                )));
            }
        }
        Ok(u)
    }

    /// Samples `f` at the face positions; wall faces are set to zero.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        let mut u = MacVelocity::zeros(grid);
        let n = grid.cells();
        for c in 0..3 {
            let d = face_dims(n, c);
            u.comps[c].par_iter_mut().enumerate().for_each(|(idx, out)| {
                let ijk = unravel(&d, idx);
                if ijk[c] == 0 || ijk[c] == n {
                    return;
                }
                let p = face_position(grid, c, ijk);
                *out = f(p[0], p[1], p[2])[c];
            });
        }
        u
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dims(&self, c: usize) -> [usize; 3] {
        face_dims(self.grid.cells(), c)
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub(crate) fn component_mut(&mut self, c: usize) -> &mut Vec<f64> {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    fn for_each_face(&self, c: usize, mut f: impl FnMut(usize, [usize; 3])) {
        let d = self.dims(c);
        let mut idx = 0;
        for k in 0..d[2] {
            for j in 0..d[1] {
                for i in 0..d[0] {
                    f(idx, [i, j, k]);
                    idx += 1;
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map2(self, |a, _| s * a)
    }

    fn map2(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        assert_eq!(self.grid, other.grid, "staggered fields on different grids");
        let comps = [0, 1, 2].map(|c| {
            self.comps[c]
                .par_iter()
                .zip(&other.comps[c])
                .map(|(&a, &b)| f(a, b))
                .collect()
        });
        MacVelocity {
            grid: self.grid,
            comps,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.map2(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.map2(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.map2(other, |a, b| a + s * b)
    }

    /// `sum over faces of self * other * h^3`.
    pub fn dot(&self, other: &Self) -> f64 {
        let h3 = self.grid.spacing().powi(3);
        (0..3)
            .map(|c| {
                self.comps[c]
                    .par_iter()
                    .zip(&other.comps[c])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .sum::<f64>()
            * h3
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Discrete divergence at every cell centre.
    pub fn divergence(&self) -> CellField {
        let n = self.grid.cells();
        let h = self.grid.spacing();
        let dims = [0, 1, 2].map(|c| face_dims(n, c));
        let mut out = vec![0.0; n * n * n];
        out.par_chunks_mut(n * n).enumerate().for_each(|(k, plane)| {
            for j in 0..n {
                for i in 0..n {
                    let mut s = 0.0;
                    for (c, d) in dims.iter().enumerate() {
                        let mut hi = [i, j, k];
                        hi[c] += 1;
                        s += self.comps[c][lin(d, hi[0], hi[1], hi[2])] - self.comps[c][lin(d, i, j, k)];
                    }
                    plane[i + n * j] = s / h;
                }
            }
        });
        CellField {
            grid: self.grid,
            values: out,
        }
    }

    /// Velocity at the grid nodes. Every boundary node lies on a wall and
    /// gets exactly zero; interior nodes average the four surrounding faces.
    pub fn to_nodes(&self) -> VectorField {
        let g = self.grid;
        let n = g.cells();
        let comps = [0, 1, 2].map(|c| {
            let d = face_dims(n, c);
            let (a, b) = others(c);
            let vals = (0..g.node_count())
                .into_par_iter()
                .map(|idx| {
                    let p = g.unravel(idx);
                    if p.iter().any(|&x| x == 0 || x == n) {
                        return 0.0;
                    }
                    let mut s = 0.0;
                    for da in 0..2 {
                        for db in 0..2 {
                            let mut q = p;
                            q[a] = p[a] - da;
                            q[b] = p[b] - db;
                            s += self.comps[c][lin(&d, q[0], q[1], q[2])];
                        }
                    }
                    0.25 * s
                })
                .collect();
            ScalarField::from_raw(g, vals)
        });
        VectorField::new(comps).expect("components share the grid")
    }

    /// Face values from nodal values by averaging the four nodes of each
    /// face; wall faces are zero.
    pub fn from_nodes(v: &VectorField) -> Self {
        let g = v.grid();
        let n = g.cells();
        let mut out = MacVelocity::zeros(g);
        for c in 0..3 {
            let d = face_dims(n, c);
            let (a, b) = others(c);
            let src = v.component(c).values();
            out.comps[c].par_iter_mut().enumerate().for_each(|(idx, o)| {
                let f = unravel(&d, idx);
                if f[c] == 0 || f[c] == n {
                    return;
                }
                let mut s = 0.0;
                for da in 0..2 {
                    for db in 0..2 {
                        let mut q = f;
                        q[a] += da;
                        q[b] += db;
                        s += src[g.index(q[0], q[1], q[2])];
                    }
                }
                *o = 0.25 * s;
            });
        }
        out
    }

    /// `-nu * Laplacian` with homogeneous Dirichlet conditions: the normal
    /// direction uses the stored zero wall values, tangential directions the
    /// reflected ghost value `-u`.
    pub(crate) fn neg_laplacian(&self, nu: f64) -> Self {
        let n = self.grid.cells();
        let h2 = self.grid.spacing().powi(2);
        let mut out = MacVelocity::zeros(self.grid);
        for c in 0..3 {
            let d = face_dims(n, c);
            let u = &self.comps[c];
            out.comps[c].par_iter_mut().enumerate().for_each(|(idx, o)| {
                let f = unravel(&d, idx);
                if f[c] == 0 || f[c] == n {
                    return;
                }
                let centre = u[idx];
                let mut s = 0.0;
                for axis in 0..3 {
                    let stride = match axis {
                        0 => 1,
                        1 => d[0],
                        _ => d[0] * d[1],
                    };
                    let lo = if f[axis] == 0 { -centre } else { u[idx - stride] };
                    let hi = if f[axis] == d[axis] - 1 {
                        -centre
                    } else {
                        u[idx + stride]
                    };
                    s += 2.0 * centre - lo - hi;
                }
                *o = nu * s / h2;
            });
        }
        out
    }

    /// `sum_c sum_axis integral of d_axis u_c * d_axis eta_c` with the
    /// differences of the discrete Laplacian; wall half-cells use the
    /// one-sided difference to the zero wall value.
    pub fn dirichlet_form(&self, eta: &Self) -> f64 {
        assert_eq!(self.grid, eta.grid);
        let n = self.grid.cells();
        let h = self.grid.spacing();
        let mut total = 0.0;
        for c in 0..3 {
            let d = face_dims(n, c);
            let (u, e) = (&self.comps[c], &eta.comps[c]);
            for axis in 0..3 {
                let stride = match axis {
                    0 => 1,
                    1 => d[0],
                    _ => d[0] * d[1],
                };
                let s: f64 = (0..u.len())
                    .into_par_iter()
                    .map(|idx| {
                        let f = unravel(&d, idx);
                        let mut acc = 0.0;
                        if f[axis] + 1 < d[axis] {
                            acc += (u[idx + stride] - u[idx]) * (e[idx + stride] - e[idx]);
                        }
                        if axis != c && (f[axis] == 0 || f[axis] == d[axis] - 1) {
                            // gradient u/(h/2) over a half cell
                            acc += 2.0 * u[idx] * e[idx];
                        }
                        acc
                    })
                    .sum();
                total += s * h;
            }
        }
        total
    }
}

fn others(c: usize) -> (usize, usize) {
    match c {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[inline]
pub(crate) fn unravel(d: &[usize; 3], idx: usize) -> [usize; 3] {
    [idx % d[0], (idx / d[0]) % d[1], idx / (d[0] * d[1])]
}

/// Position of face `ijk` of component `c`.
pub fn face_position(grid: Grid, c: usize, ijk: [usize; 3]) -> [f64; 3] {
    let h = grid.spacing();
    let mut p = [0.0; 3];
    for a in 0..3 {
        p[a] = if a == c {
            ijk[a] as f64 * h
        } else {
            (ijk[a] as f64 + 0.5) * h
        };
    }
    p
}

/// Cell-centred scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    grid: Grid,
    values: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.cells();
        CellField {
            grid,
            values: vec![0.0; n * n * n],
        }
    }

    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let n = grid.cells();
        if values.len() != n * n * n {
            return Err(Error::InvalidField(format!(
                "{} cell values, expected {}",
                values.len(),
                n * n * n
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidField("cell values are not finite".into()));
        }
        Ok(CellField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Self {
        let n = grid.cells();
        let h = grid.spacing();
        let values = (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let [i, j, k] = unravel(&[n; 3], idx);
                f((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h)
            })
            .collect();
        CellField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn remove_mean(&mut self) {
        let m = self.mean();
        self.values.iter_mut().for_each(|x| *x -= m);
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values
            .par_iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.spacing().powi(3)
    }

    pub(crate) fn axpy_in_place(&mut self, s: f64, other: &Self) {
        self.values
            .par_iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += s * b);
    }

    /// Discrete gradient on interior faces; wall faces are zero.
    pub fn gradient(&self) -> MacVelocity {
        let n = self.grid.cells();
        let h = self.grid.spacing();
        let p = &self.values;
        let cd = [n; 3];
        let mut out = MacVelocity::zeros(self.grid);
        for c in 0..3 {
            let d = face_dims(n, c);
            out.comps[c].par_iter_mut().enumerate().for_each(|(idx, o)| {
                let f = unravel(&d, idx);
                if f[c] == 0 || f[c] == n {
                    return;
                }
                let mut lo = f;
                lo[c] -= 1;
                *o = (p[lin(&cd, f[0], f[1], f[2])] - p[lin(&cd, lo[0], lo[1], lo[2])]) / h;
            });
        }
        out
    }

    /// Nodal values: averages of neighbouring cells, linear extrapolation
    /// at boundary nodes, applied axis by axis.
    pub fn to_nodes(&self) -> ScalarField {
        let n = self.grid.cells();
        // cells -> nodes along one axis
        let widen = |src: &[f64], dims: [usize; 3], axis: usize| -> (Vec<f64>, [usize; 3]) {
            let mut od = dims;
            od[axis] = n + 1;
            let total = od.iter().product();
            let out = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let q = unravel(&od, idx);
                    let at = |m: usize| {
                        let mut r = q;
                        r[axis] = m;
                        src[lin(&dims, r[0], r[1], r[2])]
                    };
                    match q[axis] {
                        0 => 1.5 * at(0) - 0.5 * at(1),
                        m if m == n => 1.5 * at(n - 1) - 0.5 * at(n - 2),
                        m => 0.5 * (at(m - 1) + at(m)),
                    }
                })
                .collect();
            (out, od)
        };
        let (a, d) = widen(&self.values, [n; 3], 0);
        let (b, d) = widen(&a, d, 1);
        let (c, _) = widen(&b, d, 2);
        ScalarField::from_raw(self.grid, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn smooth(g: Grid) -> MacVelocity {
        MacVelocity::from_fn(g, |x, y, z| {
            [
                (x * (1.0 - x)) * (2.0 * y + z).cos(),
                (y * (1.0 - y)) * (x - z).sin(),
                (z * (1.0 - z)) * (x * y + 1.0),
            ]
        })
    }

    #[test]
    fn shapes_and_wall_faces() {
        let g = grid(9);
        let u = smooth(g);
        assert_eq!(u.dims(0), [9, 8, 8]);
        assert_eq!(u.dims(2), [8, 8, 9]);
        assert_eq!(u.component(1).len(), 8 * 9 * 8);
        let d = u.dims(0);
        for k in 0..8 {
            for j in 0..8 {
                assert_eq!(u.component(0)[lin(&d, 0, j, k)], 0.0);
                assert_eq!(u.component(0)[lin(&d, 8, j, k)], 0.0);
            }
        }
        assert!(MacVelocity::new(g, u.components().clone()).is_ok());
        let mut bad = u.components().clone();
        bad[0][0] = 1.0;
        assert!(MacVelocity::new(g, bad).is_err());
    }

    #[test]
    fn divergence_is_minus_adjoint_of_gradient() {
        let g = grid(9);
        let u = smooth(g);
        let p = CellField::from_fn(g, |x, y, z| (x + 2.0 * y).sin() * z.exp());
        let lhs = u.dot(&p.gradient());
        let rhs = -p.dot(&u.divergence());
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = grid(9);
        let p = CellField::from_fn(g, |_, _, _| 3.0);
        assert_eq!(p.gradient().max_abs(), 0.0);
    }

    #[test]
    fn dirichlet_form_matches_laplacian() {
        let g = grid(9);
        let u = smooth(g);
        let e = MacVelocity::from_fn(g, |x, y, z| [(3.0 * y).sin() * z, x * x - y, (x + y + z).cos()]);
        let a = u.neg_laplacian(1.0).dot(&e);
        let b = u.dirichlet_form(&e);
        assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0), "{a} {b}");
        // symmetric and positive
        assert!((u.dirichlet_form(&e) - e.dirichlet_form(&u)).abs() < 1e-11);
        assert!(u.dirichlet_form(&u) > 0.0);
    }

    #[test]
    fn laplacian_is_second_order_in_the_interior() {
        // u = sin(pi x) sin(pi y) sin(pi z) on every component; -lap = 3 pi^2 u
        let err = |n: usize| {
            let g = grid(n);
            let f = |x: f64, y: f64, z: f64| {
                let s = (std::f64::consts::PI * x).sin()
                    * (std::f64::consts::PI * y).sin()
                    * (std::f64::consts::PI * z).sin();
                [s; 3]
            };
            let u = MacVelocity::from_fn(g, f);
            let lap = u.neg_laplacian(1.0);
            let exact = u.scale(3.0 * std::f64::consts::PI.powi(2));
            lap.sub(&exact).l2_norm()
        };
        let r = err(17) / err(33);
        assert!(r > 3.0, "ratio {r}");
    }

    #[test]
    fn nodal_round_trip_is_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let v = VectorField::from_fn(g, |x, y, z| {
                let b = x * (1.0 - x) * y * (1.0 - y) * z * (1.0 - z);
                [b, 2.0 * b, -b]
            });
            let back = MacVelocity::from_nodes(&v).to_nodes();
            for c in 0..3 {
                for idx in 0..g.node_count() {
                    if g.is_boundary(idx) {
                        assert_eq!(back.component(c).values()[idx], 0.0);
                    }
                }
            }
            (&back - &v).max_abs()
        };
        let r = err(9) / err(17);
        assert!(r > 3.5, "{r}");
    }

    #[test]
    fn pressure_to_nodes_is_exact_on_linears() {
        let g = grid(9);
        let f = |x: f64, y: f64, z: f64| 1.0 + 2.0 * x - y + 0.5 * z;
        let p = CellField::from_fn(g, f);
        let nodal = p.to_nodes();
        let exact = ScalarField::from_fn(g, f);
        assert!((&nodal - &exact).values().iter().all(|d| d.abs() < 1e-13));
    }

    #[test]
    fn divergence_of_discrete_gradient_field() {
        let g = grid(9);
        let u = MacVelocity::from_fn(g, |x, _, z| [x * (1.0 - x), 0.0, z * z * (1.0 - z)]);
        let div = u.divergence();
        let exact = CellField::from_fn(g, |x, _, z| 1.0 - 2.0 * x + 2.0 * z - 3.0 * z * z);
        let err = div.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 0.01, "{err}");
    }
}
