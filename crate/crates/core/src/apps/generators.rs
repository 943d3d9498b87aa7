use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apps::{tt_svd, Truncation};
use crate::error::{Error, Result};
use crate::linalg::FlopLedger;
use crate::tensor::{tt_add, DenseTensor, Limits, Shape, TtCore, TtTensor};
use crate::Scalar;

/// Sampled Fourier pair `y(t) = Σ a_j sin(jt)`, `z(t) = Σ b_j cos(jt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpec {
    pub shape: Shape,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub const FOURIER_COEFF_RANGE: (f64, f64) = (0.1, 10.1);

impl FourierSpec {
    /// `harmonics` coefficients for each series, uniform on `[0.1, 10.1]`.
    pub fn random(shape: Shape, harmonics: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = FOURIER_COEFF_RANGE;
        let a = (0..harmonics).map(|_| rng.random_range(lo..=hi)).collect();
        let b = (0..harmonics).map(|_| rng.random_range(lo..=hi)).collect();
        Self { shape, a, b }
    }

    pub fn num_samples(&self) -> usize {
        self.shape.num_elements().unwrap_or(usize::MAX)
    }

    /// Sample time of the 1-based sample number `i`.
    pub fn time(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.num_samples() as f64
    }

    pub fn y(&self, t: f64) -> f64 {
        self.a
            .iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * t).sin())
            .sum()
    }

    pub fn z(&self, t: f64) -> f64 {
        self.b
            .iter()
            .enumerate()
            .map(|(j, b)| b * ((j + 1) as f64 * t).cos())
            .sum()
    }

    /// Both sample vectors folded into tensors by the multi-index.
    pub fn samples<T: Scalar>(&self, limits: &Limits) -> Result<(DenseTensor<T>, DenseTensor<T>)> {
        let mut pos = 0usize;
        let y = DenseTensor::from_fn(self.shape.clone(), limits, |_| {
            pos += 1;
            T::of(self.y(self.time(pos)))
        })?;
        pos = 0;
        let z = DenseTensor::from_fn(self.shape.clone(), limits, |_| {
            pos += 1;
            T::of(self.z(self.time(pos)))
        })?;
        Ok((y, z))
    }
}

/// Fourier pair in TT form via TT-SVD at relative tolerance `1e−12`.
pub fn fourier_tt<T: Scalar>(
    spec: &FourierSpec,
    limits: &Limits,
    ledger: &mut FlopLedger,
) -> Result<(TtTensor<T>, TtTensor<T>)> {
    let (y, z) = spec.samples::<T>(limits)?;
    let tol = Truncation::RelTol(1e-12);
    let ty = tt_svd(&y, &tol, ledger)?;
    let tz = tt_svd(&z, &tol, ledger)?;
    log::info!("fourier pair ranks: y {} z {}", ty.ranks(), tz.ranks());
    Ok((ty, tz))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    /// `Σ_i (x_i − i)²` on `[−500, 500]^d`.
    Qing,
    /// `Σ_i |x_i sin x_i + 0.1 x_i|` on `[−2.5π, 2.5π]^d`.
    Alpine,
}

impl FunctionKind {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Self::Qing => (-500.0, 500.0),
            Self::Alpine => (-2.5 * PI, 2.5 * PI),
        }
    }

    /// Term for the 1-based coordinate `i`.
    pub fn term(self, i: usize, x: f64) -> f64 {
        match self {
            Self::Qing => (x - i as f64).powi(2),
            Self::Alpine => (x * x.sin() + 0.1 * x).abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Qing => "qing",
            Self::Alpine => "alpine",
        }
    }
}

impl FromStr for FunctionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qing" => Ok(Self::Qing),
            "alpine" => Ok(Self::Alpine),
            other => Err(Error::Usage(format!("unknown function {other:?}"))),
        }
    }
}

/// A separable test function sampled on a uniform grid of `n` points per
/// coordinate, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparableSpec {
    pub kind: FunctionKind,
    pub d: usize,
    pub n: usize,
}

impl SeparableSpec {
    /// Grid point for the 1-based index `j`.
    pub fn grid(&self, j: usize) -> f64 {
        let (lo, hi) = self.kind.bounds();
        lo + (j - 1) as f64 * (hi - lo) / (self.n - 1) as f64
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .enumerate()
            .map(|(k, &j)| self.kind.term(k + 1, self.grid(j)))
            .sum()
    }

    pub fn dense<T: Scalar>(&self, limits: &Limits) -> Result<DenseTensor<T>> {
        DenseTensor::from_fn(Shape::uniform(self.d, self.n)?, limits, |idx| {
            T::of(self.value(idx))
        })
    }
}

/// Sum of `d` rank-1 TT terms, so the rank chain is `{1, d, …, d, 1}`.
pub fn separable_tt<T: Scalar>(spec: &SeparableSpec) -> Result<TtTensor<T>> {
    if spec.n < 2 || spec.d == 0 {
        return Err(Error::Domain(format!("need d ≥ 1 and n ≥ 2, got {spec:?}")));
    }
    let mut sum: Option<TtTensor<T>> = None;
    for term in 1..=spec.d {
        let cores = (1..=spec.d)
            .map(|k| {
                TtCore::from_fn(1, spec.n, 1, |_, j, _| {
                    if k == term {
                        T::of(spec.kind.term(k, spec.grid(j)))
                    } else {
                        T::one()
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let t = TtTensor::new(cores)?;
        sum = Some(match sum {
            None => t,
            Some(acc) => tt_add(&acc, &t)?,
        });
    }
    Ok(sum.expect("d ≥ 1"))
}

/// TT tensor with cores `Y(α, i, β) = 1/(α + i + β − 1)`, ranks `r` inside.
pub fn hilbert_tt<T: Scalar>(d: usize, n: usize, r: usize) -> Result<TtTensor<T>> {
    if d == 0 || n == 0 || r == 0 {
        return Err(Error::Domain(format!(
            "need positive d, n, r; got {d}, {n}, {r}"
        )));
    }
    let cores = (0..d)
        .map(|k| {
            let left = if k == 0 { 1 } else { r };
            let right = if k == d - 1 { 1 } else { r };
            TtCore::from_fn(left, n, right, |a, i, b| {
                T::one() / T::of((a + i + b - 1) as f64)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TtTensor::new(cores)
}
