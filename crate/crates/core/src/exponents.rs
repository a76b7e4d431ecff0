//! Closed-form exponent calculus for the Hölder estimate of the stationary
//! Navier–Stokes nonlinearity.
//!
//! The interpolation weight
//!
//! ```text
//! omega(l) = (q l + 3) / (q (2 + alpha) + 3)
//! ```
//!
//! balances `|u|^(l) <= C (|u|^(2+alpha))^omega (||u||_q)^(1-omega)` under the
//! dilation `u(x) -> u(mu x)` in three dimensions. With `q = 6` the four
//! weights at `l = 0, alpha, 1, 1 + alpha` pair up to the common total
//! `a1 = 6(2+alpha) / (6(2+alpha) + 3)`, and Young's inequality with epsilon
//! turns `X^a1 Y^a2` into `eps X + C eps^-A Y^B` with `B = a2 / (1 - a1)`.

use crate::error::{Error, Result};

/// Lebesgue exponent reached by the `W^1_2` energy bound in three dimensions.
pub const EMBEDDING_Q: f64 = 6.0;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, "(0, 1)"))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("q", q, "(1, inf)"))
    }
}

/// Interpolation weight `(q l + 3) / (q (2 + alpha) + 3)` for `l` in `[0, 2 + alpha]`.
pub fn omega(l: f64, q: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_q(q)?;
    if !(0.0..=2.0 + alpha).contains(&l) {
        return Err(Error::domain("l", l, "[0, 2 + alpha]"));
    }
    Ok((q * l + 3.0) / (q * (2.0 + alpha) + 3.0))
}

/// The four weights at `l = 0, alpha, 1, 1 + alpha` with `q = 6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialOmegas {
    pub omega_0: f64,
    pub omega_alpha: f64,
    pub omega_1: f64,
    pub omega_1alpha: f64,
}

pub fn special_omegas(alpha: f64) -> Result<SpecialOmegas> {
    check_alpha(alpha)?;
    let den = 6.0 * (2.0 + alpha) + 3.0;
    Ok(SpecialOmegas {
        omega_0: 3.0 / den,
        omega_alpha: (6.0 * alpha + 3.0) / den,
        omega_1: (6.0 * 1.0 + 3.0) / den,
        omega_1alpha: (6.0 * (1.0 + alpha) + 3.0) / den,
    })
}

/// `(a1, a2)` with `a1 = 6(2+alpha) / (6(2+alpha)+3) < 1` and `a2 = 2 - a1`.
pub fn a_exponents(alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let a1 = 6.0 * (2.0 + alpha) / (6.0 * (2.0 + alpha) + 3.0);
    Ok((a1, 2.0 - a1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungExponents {
    /// `a1 / ((1 - a1) a2)`, as written alongside `B` in the source estimate.
    pub a_stated: f64,
    /// `a1 / (1 - a1)`, the exponent produced by optimising the split.
    pub a_young: f64,
    /// `a2 / (1 - a1)`.
    pub b: f64,
}

/// Young-with-epsilon exponents for `X^a1 Y^a2 <= eps X + C eps^-A Y^B`.
pub fn young_exponents(a1: f64, a2: f64) -> Result<YoungExponents> {
    if !(a1 > 0.0 && a1 < 1.0) {
        return Err(Error::domain("a1", a1, "(0, 1)"));
    }
    if !(a2 > 0.0 && a2.is_finite()) {
        return Err(Error::domain("a2", a2, "(0, inf)"));
    }
    let b = a2 / (1.0 - a1);
    if a2 == 2.0 - a1 {
        debug_assert!((b - (2.0 - a1) / (1.0 - a1)).abs() <= 1e-14 * b);
    }
    Ok(YoungExponents {
        a_stated: a1 / ((1.0 - a1) * a2),
        a_young: a1 / (1.0 - a1),
        b,
    })
}

/// Critical Sobolev exponent `d p / (d - p)`.
pub fn sobolev_critical_exponent(space_dim: u32, p: f64) -> Result<f64> {
    let d = space_dim as f64;
    if !(p > 0.0 && p < d) {
        return Err(Error::NoEmbedding { dim: space_dim, p });
    }
    Ok(d * p / (d - p))
}

/// Every exponent of the estimate chain for one `(q, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub q: f64,
    pub alpha: f64,
    pub specials: SpecialOmegas,
    pub a1: f64,
    pub a2: f64,
    pub young: YoungExponents,
}

impl ExponentSet {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        check_q(q)?;
        let specials = special_omegas(alpha)?;
        let (a1, a2) = a_exponents(alpha)?;
        let young = young_exponents(a1, a2)?;
        Ok(ExponentSet {
            q,
            alpha,
            specials,
            a1,
            a2,
            young,
        })
    }

    /// Weight for this set's `q` and `alpha`.
    pub fn omega(&self, l: f64) -> Result<f64> {
        omega(l, self.q, self.alpha)
    }

    pub fn b(&self) -> f64 {
        self.young.b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn omega_examples() {
        assert_eq!(omega(2.5, 6.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(omega(0.0, 6.0, 0.5).unwrap(), 3.0 / 18.0, max_relative = 1e-15);
        assert_relative_eq!(omega(1.0, 6.0, 0.5).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn omega_domain_errors() {
        assert!(omega(-0.1, 6.0, 0.5).is_err());
        assert!(omega(2.6, 6.0, 0.5).is_err());
        assert!(omega(1.0, 1.0, 0.5).is_err());
        assert!(omega(1.0, 6.0, 1.0).is_err());
        assert!(omega(1.0, 6.0, 0.0).is_err());
    }

    #[test]
    fn specials_at_half() {
        let s = special_omegas(0.5).unwrap();
        assert_relative_eq!(s.omega_0, 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(s.omega_alpha, 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(s.omega_1, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.omega_1alpha, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn specials_agree_with_general_weight() {
        for alpha in [0.05, 0.3, 0.5, 0.77, 0.95] {
            let s = special_omegas(alpha).unwrap();
            let w = |l| omega(l, 6.0, alpha).unwrap();
            assert_relative_eq!(s.omega_0, w(0.0), max_relative = 1e-14);
            assert_relative_eq!(s.omega_alpha, w(alpha), max_relative = 1e-14);
            assert_relative_eq!(s.omega_1, w(1.0), max_relative = 1e-14);
            assert_relative_eq!(s.omega_1alpha, w(1.0 + alpha), max_relative = 1e-14);
        }
    }

    #[test]
    fn a_and_young_at_half() {
        let (a1, a2) = a_exponents(0.5).unwrap();
        assert_relative_eq!(a1, 5.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(a2, 7.0 / 6.0, max_relative = 1e-15);
        let y = young_exponents(a1, a2).unwrap();
        assert_relative_eq!(y.a_stated, 30.0 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(y.a_young, 5.0, max_relative = 1e-14);
        assert_relative_eq!(y.b, 7.0, max_relative = 1e-14);
    }

    #[test]
    fn young_limits_and_errors() {
        let y = young_exponents(1e-12, 1.7).unwrap();
        assert!(y.a_young < 1e-11);
        assert_relative_eq!(y.b, 1.7, max_relative = 1e-11);
        assert!(young_exponents(1.0, 1.0).is_err());
        assert!(young_exponents(1.2, 0.8).is_err());
        assert!(young_exponents(0.5, 0.0).is_err());
    }

    #[test]
    fn sobolev_exponent() {
        assert_eq!(sobolev_critical_exponent(3, 2.0).unwrap(), 6.0);
        assert_eq!(sobolev_critical_exponent(3, 1.0).unwrap(), 1.5);
        assert!(matches!(
            sobolev_critical_exponent(2, 2.0),
            Err(Error::NoEmbedding { dim: 2, .. })
        ));
    }

    #[test]
    fn alpha_sweep_identities() {
        for i in 1..=19 {
            let alpha = 0.05 * i as f64;
            let e = ExponentSet::new(EMBEDDING_Q, alpha).unwrap();
            let s = e.specials;
            assert_relative_eq!(s.omega_0 + s.omega_1alpha, e.a1, max_relative = 1e-14);
            assert_relative_eq!(s.omega_alpha + s.omega_1, e.a1, max_relative = 1e-14);
            assert_relative_eq!(e.b(), (2.0 - e.a1) / (1.0 - e.a1), max_relative = 1e-14);
            // both product terms carry the same total exponent on ||v||_6
            assert_relative_eq!(
                (1.0 - s.omega_0) + (1.0 - s.omega_1alpha),
                e.a2,
                max_relative = 1e-14
            );
            assert!(e.b() > 2.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn omega_is_increasing_and_bounded(
            q in 1.01f64..50.0,
            alpha in 0.001f64..0.999,
            t1 in 0.0f64..1.0,
            t2 in 0.0f64..1.0,
        ) {
            let top = 2.0 + alpha;
            let (l1, l2) = (t1.min(t2) * top, t1.max(t2) * top);
            let w1 = omega(l1, q, alpha).unwrap();
            let w2 = omega(l2, q, alpha).unwrap();
            prop_assert!(w1 > 0.0 && w1 < 1.0 || l1 == top);
            if l2 > l1 {
                prop_assert!(w2 > w1);
            }
            prop_assert!((omega(top, q, alpha).unwrap() - 1.0).abs() <= 1e-14);
        }
    }
}
