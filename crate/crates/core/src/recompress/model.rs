use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::SVD_FLOP_CONSTANT;

/// Algorithms covered by the closed-form cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    TtRounding,
    OrthRand,
    RandOrth,
    TwoSided,
    /// HaTT driven by SVD-based sketch splitting.
    Hatt1,
    /// HaTT driven by the direct sketch splitting.
    Hatt2,
    /// Right-to-left partial contraction of an explicit product.
    Pcrl,
    Hpcrl1,
    Hpcrl2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Self::TtRounding,
        Self::OrthRand,
        Self::RandOrth,
        Self::TwoSided,
        Self::Hatt1,
        Self::Hatt2,
        Self::Pcrl,
        Self::Hpcrl1,
        Self::Hpcrl2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::TtRounding => "tt-rounding",
            Self::OrthRand => "orth-rand",
            Self::RandOrth => "rand-orth",
            Self::TwoSided => "two-sided",
            Self::Hatt1 => "hatt-1",
            Self::Hatt2 => "hatt-2",
            Self::Pcrl => "pcrl",
            Self::Hpcrl1 => "hpcrl-1",
            Self::Hpcrl2 => "hpcrl-2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::Usage(format!("unknown algorithm {s:?}")))
    }
}

/// Problem size for the cost model: order `d`, mode size `n`, factor ranks
/// `r` and `s`, target rank `ell`, and the retained term count `terms` of
/// the SVD-based variants (defaults to `ell`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub d: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub ell: usize,
    pub terms: Option<usize>,
}

/// Leading-order flop count. SVD work of the SVD-based variants is not
/// included; see [`flop_model_svd`].
pub fn flop_model(algorithm: Algorithm, p: &ModelParams) -> Result<u64> {
    if p.d == 0 || p.n == 0 || p.r == 0 || p.s == 0 || p.ell == 0 || p.terms == Some(0) {
        return Err(Error::Domain(format!(
            "cost model needs positive sizes, got {p:?}"
        )));
    }
    let inner = p.d.saturating_sub(2) as f64;
    let (n, r, s, l) = (p.n as f64, p.r as f64, p.s as f64, p.ell as f64);
    let big_r = p.terms.unwrap_or(p.ell) as f64;
    let m = r * s;
    let per = match algorithm {
        Algorithm::TtRounding => n * (5.0 * m.powi(3) + 6.0 * m * m * l + 2.0 * m * l * l),
        Algorithm::OrthRand => n * (5.0 * m.powi(3) + 2.0 * m * m * l + 4.0 * m * l * l),
        Algorithm::RandOrth => n * (4.0 * m * m * l + 6.0 * m * l * l),
        Algorithm::TwoSided => n * (6.0 * m * m * l + 6.0 * m * l * l),
        Algorithm::Hatt2 => n * m * l * (4.0 * r + 4.0 * s + 6.0 * l),
        Algorithm::Hatt1 => {
            let r_hat = (big_r + l) / 2.0;
            n * m * r_hat * (4.0 * r + 4.0 * s + 4.0 * l + 2.0 * l * l / r_hat)
        }
        Algorithm::Pcrl => n * (2.0 * m * l * l + 2.0 * m * m * l),
        Algorithm::Hpcrl1 => {
            n * big_r * (2.0 * r * r * s + 2.0 * s * s * r + 2.0 * m * l + 2.0 * l * l - 2.0 * m)
                - m * l
        }
        Algorithm::Hpcrl2 => {
            n * l * (2.0 * r * r * s + 2.0 * s * s * r + 2.0 * m * l + l - 2.0 * m) - m * l
        }
    };
    Ok((inner * per).round().max(0.0) as u64)
}

/// The SVD bucket charged by the SVD-based variants: one `rs × ℓ` thin SVD
/// per interior core, at the same constant the kernels use.
pub fn flop_model_svd(algorithm: Algorithm, p: &ModelParams) -> u64 {
    match algorithm {
        Algorithm::Hatt1 | Algorithm::Hpcrl1 => {
            let (big, small) = {
                let m = (p.r * p.s) as u64;
                let l = p.ell as u64;
                if m >= l {
                    (m, l)
                } else {
                    (l, m)
                }
            };
            p.d.saturating_sub(2) as u64 * SVD_FLOP_CONSTANT * big * small * small
        }
        _ => 0,
    }
}

/// Smallest `ℓ` in `1..=limit` for which HaTT-1 is predicted cheaper than
/// HaTT-2 when `terms` sketch terms are kept.
pub fn hatt_crossover(
    d: usize,
    n: usize,
    r: usize,
    s: usize,
    terms: usize,
    limit: usize,
) -> Option<usize> {
    (1..=limit).find(|&ell| {
        let p = ModelParams {
            d,
            n,
            r,
            s,
            ell,
            terms: Some(terms),
        };
        flop_model(Algorithm::Hatt1, &p).unwrap() < flop_model(Algorithm::Hatt2, &p).unwrap()
    })
}
