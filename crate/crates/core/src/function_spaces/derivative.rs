//! Second-order finite differences on the node lattice.
//!
//! First derivatives use central differences in the interior and the
//! three-point one-sided formula `(-3u0 + 4u1 - u2) / 2h` at the faces.
//! Pure second derivatives use the central three-point formula with the
//! four-point one-sided closure `(2u0 - 5u1 + 4u2 - u3) / h^2`. Mixed
//! derivatives compose first derivatives in axis order x1, x2, x3. Every
//! stencil is exact on polynomials of total degree two.

use std::fmt;

use super::field::ScalarField;
use crate::error::{Error, Result};

/// Multi-index `(b1, b2, b3)` selecting the partial derivative
/// `d^{b1+b2+b3} / dx1^{b1} dx2^{b2} dx3^{b3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub [u32; 3]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0, 0]);

    pub fn new(b1: u32, b2: u32, b3: u32) -> Self {
        MultiIndex([b1, b2, b3])
    }

    /// Unit multi-index along `axis`.
    pub fn unit(axis: usize) -> Self {
        let mut b = [0; 3];
        b[axis] = 1;
        MultiIndex(b)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All distinct multi-indices of exactly the given order, in
    /// lexicographically decreasing order of `(b1, b2, b3)`.
    pub fn of_order(order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for b1 in (0..=order).rev() {
            for b2 in (0..=order - b1).rev() {
                out.push(MultiIndex([b1, b2, order - b1 - b2]));
            }
        }
        out
    }

    /// All distinct multi-indices with order at most `m`, grouped by order.
    pub fn up_to(m: u32) -> Vec<MultiIndex> {
        (0..=m).flat_map(MultiIndex::of_order).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Derivative `D^beta u` for `|beta| <= 2`.
pub fn derivative(u: &ScalarField, beta: MultiIndex) -> Result<ScalarField> {
    let order = beta.order();
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let b = beta.0;
    Ok(match order {
        0 => u.clone(),
        1 => first(u, b.iter().position(|&x| x == 1).unwrap()),
        _ => match b.iter().position(|&x| x == 2) {
            Some(axis) => second(u, axis),
            None => {
                let mut axes = (0..3).filter(|&a| b[a] == 1);
                let a0 = axes.next().unwrap();
                let a1 = axes.next().unwrap();
                first(&first(u, a0), a1)
            }
        },
    })
}

/// Every derivative of order at most `m`, in [`MultiIndex::up_to`] order.
/// First derivatives are computed once and reused for the mixed ones.
pub fn all_derivatives(u: &ScalarField, m: u32) -> Result<Vec<(MultiIndex, ScalarField)>> {
    if m > 2 {
        return Err(Error::UnsupportedOrder(m));
    }
    let mut out = vec![(MultiIndex::ZERO, u.clone())];
    if m == 0 {
        return Ok(out);
    }
    let firsts: Vec<ScalarField> = (0..3).map(|a| first(u, a)).collect();
    for (a, d) in firsts.iter().enumerate() {
        out.push((MultiIndex::unit(a), d.clone()));
    }
    if m == 2 {
        for beta in MultiIndex::of_order(2) {
            let b = beta.0;
            let d = match b.iter().position(|&x| x == 2) {
                Some(axis) => second(u, axis),
                None => {
                    let a0 = (0..3).find(|&a| b[a] == 1).unwrap();
                    let a1 = (a0 + 1..3).find(|&a| b[a] == 1).unwrap();
                    first(&firsts[a0], a1)
                }
            };
            out.push((beta, d));
        }
    }
    Ok(out)
}

fn for_each_line(
    u: &ScalarField,
    axis: usize,
    mut f: impl FnMut(&mut dyn FnMut(usize) -> f64, &mut dyn FnMut(usize, f64)),
) -> Vec<f64> {
    let g = u.grid();
    let n = g.n();
    let stride = g.stride(axis);
    let src = u.values();
    let mut out = vec![0.0; src.len()];
    let (oa, ob) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    for q in 0..n {
        for p in 0..n {
            let mut base_idx = [0usize; 3];
            base_idx[oa] = p;
            base_idx[ob] = q;
            let base = g.index(base_idx[0], base_idx[1], base_idx[2]);
            let mut get = |i: usize| src[base + i * stride];
            let mut set = |i: usize, v: f64| out[base + i * stride] = v;
            f(&mut get, &mut set);
        }
    }
    out
}

pub(crate) fn first(u: &ScalarField, axis: usize) -> ScalarField {
    let g = u.grid();
    let n = g.n();
    let inv2h = 0.5 / g.spacing();
    let out = for_each_line(u, axis, |get, set| {
        set(0, (-3.0 * get(0) + 4.0 * get(1) - get(2)) * inv2h);
        for i in 1..n - 1 {
            set(i, (get(i + 1) - get(i - 1)) * inv2h);
        }
        set(
            n - 1,
            (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) * inv2h,
        );
    });
    ScalarField::from_raw(g, out)
}

pub(crate) fn second(u: &ScalarField, axis: usize) -> ScalarField {
    let g = u.grid();
    let n = g.n();
    let h = g.spacing();
    let inv_h2 = 1.0 / (h * h);
    let out = for_each_line(u, axis, |get, set| {
        set(
            0,
            (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3)) * inv_h2,
        );
        for i in 1..n - 1 {
            set(i, (get(i + 1) - 2.0 * get(i) + get(i - 1)) * inv_h2);
        }
        set(
            n - 1,
            (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) - get(n - 4)) * inv_h2,
        );
    });
    ScalarField::from_raw(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_spaces::Grid;
    use std::f64::consts::PI;

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::of_order(0).len(), 1);
        assert_eq!(MultiIndex::of_order(1).len(), 3);
        assert_eq!(MultiIndex::of_order(2).len(), 6);
        assert_eq!(MultiIndex::up_to(2).len(), 10);
        assert!(MultiIndex::of_order(2).iter().all(|b| b.order() == 2));
    }

    #[test]
    fn rejects_third_order() {
        let u = ScalarField::zeros(Grid::new(5).unwrap());
        assert!(matches!(
            derivative(&u, MultiIndex::new(1, 1, 1)),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn exact_on_square() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, _, _| x * x);
        let d = derivative(&u, MultiIndex::new(1, 0, 0)).unwrap();
        let exact = ScalarField::from_fn(g, |x, _, _| 2.0 * x);
        assert!(max_diff(&d, &exact) < 1e-12);
    }

    #[test]
    fn exact_on_mixed_product() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, y, _| x * y);
        let d = derivative(&u, MultiIndex::new(1, 1, 0)).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn exact_on_all_quadratic_monomials() {
        let g = Grid::new(9).unwrap();
        // monomial exponents (a,b,c) with a+b+c <= 2
        for mono in MultiIndex::up_to(2) {
            let [a, b, c] = mono.0;
            let u = ScalarField::from_fn(g, |x, y, z| {
                x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32)
            });
            for beta in MultiIndex::up_to(2) {
                let d = derivative(&u, beta).unwrap();
                let exact = ScalarField::from_fn(g, |x, y, z| {
                    let p = [x, y, z];
                    let e = [a, b, c];
                    let mut v = 1.0;
                    for ax in 0..3 {
                        let (ea, ba) = (e[ax] as i32, beta.0[ax] as i32);
                        if ba > ea {
                            return 0.0;
                        }
                        let coeff: i32 = (0..ba).map(|t| ea - t).product();
                        v *= coeff as f64 * p[ax].powi(ea - ba);
                    }
                    v
                });
                assert!(
                    max_diff(&d, &exact) < 1e-10,
                    "monomial {mono} derivative {beta}"
                );
            }
        }
    }

    #[test]
    fn all_derivatives_matches_single_calls() {
        let g = Grid::new(9).unwrap();
        let u = ScalarField::from_fn(g, |x, y, z| (x + 2.0 * y).sin() * (z - x).cos());
        for (beta, d) in all_derivatives(&u, 2).unwrap() {
            assert_eq!(d, derivative(&u, beta).unwrap(), "{beta}");
        }
    }

    #[test]
    fn second_derivative_converges_at_second_order() {
        let err = |n: usize| {
            let g = Grid::new(n).unwrap();
            let u = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
            let d = derivative(&u, MultiIndex::new(2, 0, 0)).unwrap();
            let exact = ScalarField::from_fn(g, |x, _, _| -4.0 * PI * PI * (2.0 * PI * x).sin());
            max_diff(&d, &exact)
        };
        let ratio = err(17) / err(33);
        assert!(ratio >= 3.0, "ratio {ratio}");
    }
}
