use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function_spaces::{Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Polynomial,
    Trig,
    GaussianBump,
    RandomFourier,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Polynomial,
        FamilyKind::Trig,
        FamilyKind::GaussianBump,
        FamilyKind::RandomFourier,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Polynomial => "polynomial",
            FamilyKind::Trig => "trig",
            FamilyKind::GaussianBump => "gaussian_bump",
            FamilyKind::RandomFourier => "random_fourier",
        }
    }
}

/// Parameter ranges shared by all members of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    /// Highest total degree of the polynomial members, at most 4.
    pub max_degree: u32,
    /// Highest wave number per axis of the trig members, at most 3.
    pub max_wave: u32,
    /// Width range of the Gaussian bumps, inside `[0.05, 0.5]`.
    pub sigma: (f64, f64),
    /// Highest wave number per axis of the random Fourier members.
    pub fourier_cap: u32,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            max_degree: 4,
            max_wave: 3,
            sigma: (0.05, 0.5),
            fourier_cap: 3,
        }
    }
}

impl FamilyParams {
    fn validate(&self) -> Result<()> {
        if self.max_degree > 4 {
            return Err(Error::InvalidFamily(format!(
                "polynomial degree {} exceeds 4",
                self.max_degree
            )));
        }
        if self.max_wave == 0 || self.max_wave > 3 {
            return Err(Error::InvalidFamily(format!(
                "trig wave number cap {} is outside 1..=3",
                self.max_wave
            )));
        }
        let (lo, hi) = self.sigma;
        if !(0.05 <= lo && lo <= hi && hi <= 0.5) {
            return Err(Error::InvalidFamily(format!(
                "bump width range [{lo}, {hi}] is outside [0.05, 0.5]"
            )));
        }
        if self.fourier_cap == 0 {
            return Err(Error::InvalidFamily("Fourier mode cap must be positive".into()));
        }
        Ok(())
    }
}

/// Smooth test function with a closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// Sum of `coeff * x^a y^b z^c`.
    Polynomial(Vec<([u32; 3], f64)>),
    /// `amp * prod_a cos(k_a pi x_a + phase_a)`.
    Trig { k: [u32; 3], phase: [f64; 3], amp: f64 },
    /// `exp(-|x - c|^2 / (2 sigma^2))`.
    GaussianBump { center: [f64; 3], sigma: f64 },
    /// Sum of `amp * cos(pi k.x + phase)`.
    Fourier(Vec<([u32; 3], f64, f64)>),
    /// `amp * phi(mu |x - c| / radius)` with the compact bump
    /// `phi(s) = exp(1 - 1/(1 - s^2))` for `s < 1`, zero otherwise.
    CompactBump {
        center: [f64; 3],
        radius: f64,
        mu: f64,
        amp: f64,
    },
}

impl TestFunction {
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let p = [x, y, z];
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Polynomial(terms) => terms
                .iter()
                .map(|(e, c)| c * x.powi(e[0] as i32) * y.powi(e[1] as i32) * z.powi(e[2] as i32))
                .sum(),
            TestFunction::Trig { k, phase, amp } => {
                amp * (0..3)
                    .map(|a| (k[a] as f64 * PI * p[a] + phase[a]).cos())
                    .product::<f64>()
            }
            TestFunction::GaussianBump { center, sigma } => {
                let r2: f64 = (0..3).map(|a| (p[a] - center[a]).powi(2)).sum();
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
            TestFunction::Fourier(modes) => modes
                .iter()
                .map(|(k, amp, phase)| {
                    let arg: f64 = (0..3).map(|a| k[a] as f64 * p[a]).sum();
                    amp * (PI * arg + phase).cos()
                })
                .sum(),
            TestFunction::CompactBump {
                center,
                radius,
                mu,
                amp,
            } => {
                let r2: f64 = (0..3).map(|a| (p[a] - center[a]).powi(2)).sum();
                let s2 = r2 * (mu / radius).powi(2);
                if s2 < 1.0 {
                    amp * (1.0 - 1.0 / (1.0 - s2)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample(&self, grid: Grid) -> ScalarField {
        ScalarField::from_fn(grid, |x, y, z| self.eval(x, y, z))
    }
}

/// One generated member with the bookkeeping written to reports.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub index: usize,
    pub kind: FamilyKind,
    /// Short comma-free description of the drawn parameters.
    pub param: String,
    pub seed: u64,
    pub function: TestFunction,
}

/// Deterministic family of smooth test functions on the closed cube.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFamily {
    pub kinds: Vec<FamilyKind>,
    pub params: FamilyParams,
    pub count: usize,
    pub seed: u64,
}

impl FunctionFamily {
    /// Members cycle through all four kinds.
    pub fn mixed(count: usize, seed: u64) -> Self {
        FunctionFamily {
            kinds: FamilyKind::ALL.to_vec(),
            params: FamilyParams::default(),
            count,
            seed,
        }
    }

    pub fn single(kind: FamilyKind, count: usize, seed: u64) -> Self {
        FunctionFamily {
            kinds: vec![kind],
            params: FamilyParams::default(),
            count,
            seed,
        }
    }

    pub fn with_params(mut self, params: FamilyParams) -> Self {
        self.params = params;
        self
    }

    pub fn members(&self) -> Result<Vec<FamilyMember>> {
        if self.count == 0 || self.kinds.is_empty() {
            return Err(Error::InvalidFamily("family is empty".into()));
        }
        self.params.validate()?;
        Ok((0..self.count).map(|i| self.member(i)).collect())
    }

    fn member(&self, index: usize) -> FamilyMember {
        let kind = self.kinds[index % self.kinds.len()];
        let seed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = &self.params;
        let (param, function) = match kind {
            FamilyKind::Polynomial => {
                let degree = rng.gen_range(1..=p.max_degree.max(1));
                let mut terms = Vec::new();
                for a in 0..=degree {
                    for b in 0..=degree - a {
                        for c in 0..=degree - a - b {
                            terms.push(([a, b, c], rng.gen_range(-1.0..1.0)));
                        }
                    }
                }
                (format!("deg={degree}"), TestFunction::Polynomial(terms))
            }
            FamilyKind::Trig => {
                let k = [0; 3].map(|_| rng.gen_range(1..=p.max_wave));
                let phase = [0; 3].map(|_| rng.gen_range(0.0..2.0 * PI));
                let amp = rng.gen_range(0.5..2.0);
                (
                    format!("k={}-{}-{}", k[0], k[1], k[2]),
                    TestFunction::Trig { k, phase, amp },
                )
            }
            FamilyKind::GaussianBump => {
                let sigma = rng.gen_range(p.sigma.0..=p.sigma.1);
                let center = [0; 3].map(|_| rng.gen_range(0.2..0.8));
                (
                    format!("sigma={sigma:.4}"),
                    TestFunction::GaussianBump { center, sigma },
                )
            }
            FamilyKind::RandomFourier => {
                let cap = p.fourier_cap;
                let mut modes = Vec::new();
                for k0 in 0..=cap {
                    for k1 in 0..=cap {
                        for k2 in 0..=cap {
                            let k2sum = (k0 * k0 + k1 * k1 + k2 * k2) as f64;
                            let amp = rng.gen_range(-1.0..1.0) / (1.0 + k2sum);
                            let phase = rng.gen_range(0.0..2.0 * PI);
                            modes.push(([k0, k1, k2], amp, phase));
                        }
                    }
                }
                (format!("cap={cap}"), TestFunction::Fourier(modes))
            }
        };
        FamilyMember {
            index,
            kind,
            param,
            seed,
            function,
        }
    }
}

/// Seeded random Fourier vector field, one independent draw per component.
pub fn random_fourier_vector(
    grid: Grid,
    cap: u32,
    seed: u64,
) -> Result<crate::function_spaces::VectorField> {
    let fam = FunctionFamily::single(FamilyKind::RandomFourier, 3, seed).with_params(FamilyParams {
        fourier_cap: cap,
        ..FamilyParams::default()
    });
    let [a, b, c]: [FamilyMember; 3] = fam.members()?.try_into().unwrap();
    crate::function_spaces::VectorField::new([
        a.function.sample(grid),
        b.function.sample(grid),
        c.function.sample(grid),
    ])
}
