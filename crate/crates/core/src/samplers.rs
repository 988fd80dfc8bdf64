//! Row ensembles of independent sub-Gaussian vectors with analytic second
//! moments.
//!
//! Rows are generated from counter-based streams: row `j` of an ensemble with
//! seed `s` is drawn from `rng::stream(s, j)`. Regenerating with the same
//! `(family, N, seed)` is bit-identical, and for identically distributed
//! families a shorter ensemble is the leading block of a longer one.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

/// Moment-definition sub-Gaussian norm of a standard Gaussian scalar,
/// `sup_p p^{-1/2} (E|g|^p)^{1/p}`. The supremum is attained at `p = 1`,
/// where it equals `E|g| = sqrt(2/pi)`.
pub const GAUSSIAN_PHI2: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `N(0, I)`.
    StandardGaussian,
    /// `N(0, diag(lambda))`.
    AnisotropicGaussian(Vec<f64>),
    /// Independent uniform signs.
    Rademacher,
    /// Block `k` of `m = N / q` rows is `f_k * N(0, I)`.
    ScaledGaussian(Vec<f64>),
    /// Every row equals the given vector; zero variance.
    PointMass(Vec<f64>),
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::StandardGaussian => "standard_gaussian",
            FamilyKind::AnisotropicGaussian(_) => "anisotropic_gaussian",
            FamilyKind::Rademacher => "rademacher",
            FamilyKind::ScaledGaussian(_) => "scaled_gaussian",
            FamilyKind::PointMass(_) => "point_mass",
        }
    }

    fn params(&self) -> Option<&[f64]> {
        match self {
            FamilyKind::AnisotropicGaussian(v) | FamilyKind::ScaledGaussian(v) | FamilyKind::PointMass(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        if let Some(params) = self.params() {
            f.write_str("(")?;
            for (i, p) in params.iter().enumerate() {
                if i > 0 {
                    f.write_str(";")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    /// Parses the descriptor written by `Display`, e.g. `scaled_gaussian(1;3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::invalid("family descriptor missing ')'"))?;
                let params = inner
                    .split(';')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::invalid("bad number in family descriptor"))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                (s[..open].trim(), Some(params))
            }
            None => (s, None),
        };
        match (name, params) {
            ("standard_gaussian", None) => Ok(FamilyKind::StandardGaussian),
            ("rademacher", None) => Ok(FamilyKind::Rademacher),
            ("anisotropic_gaussian", Some(p)) => Ok(FamilyKind::AnisotropicGaussian(p)),
            ("scaled_gaussian", Some(p)) => Ok(FamilyKind::ScaledGaussian(p)),
            ("point_mass", Some(p)) => Ok(FamilyKind::PointMass(p)),
            _ => Err(Error::invalid({
                let mut m = String::from("unknown family descriptor: ");
                m.push_str(s);
                m
            })),
        }
    }
}

/// A row distribution together with its analytic second moment and its
/// sub-Gaussian norm bound `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub dim: usize,
    /// Sub-Gaussian norm bound. Zero only for the degenerate all-zero
    /// families (zero scales, zero point mass).
    pub k_bound: f64,
    /// Diagonal of the (block-averaged) second moment `E[w w']`.
    pub second_moment_diag: Vec<f64>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let (k_bound, second_moment_diag) = match &kind {
            FamilyKind::StandardGaussian => (GAUSSIAN_PHI2, vec![1.0; dim]),
            FamilyKind::Rademacher => (1.0, vec![1.0; dim]),
            FamilyKind::AnisotropicGaussian(diag) => {
                if diag.len() != dim {
                    return Err(Error::invalid("anisotropic diagonal length must equal dim"));
                }
                if diag.iter().any(|&d| !(d.is_finite() && d >= 0.0)) {
                    return Err(Error::invalid("covariance diagonal must be finite and >= 0"));
                }
                let lam_max = diag.iter().copied().fold(0.0, f64::max);
                (GAUSSIAN_PHI2 * libm::sqrt(lam_max), diag.clone())
            }
            FamilyKind::ScaledGaussian(scales) => {
                if scales.is_empty() {
                    return Err(Error::invalid("scaled family needs at least one scale"));
                }
                if scales.iter().any(|f| !f.is_finite()) {
                    return Err(Error::invalid("scales must be finite"));
                }
                let q = scales.len() as f64;
                let mean_sq = scales.iter().map(|f| f * f).sum::<f64>() / q;
                let f_max = scales.iter().map(|f| libm::fabs(*f)).fold(0.0, f64::max);
                (GAUSSIAN_PHI2 * f_max, vec![mean_sq; dim])
            }
            FamilyKind::PointMass(v) => {
                if v.len() != dim {
                    return Err(Error::invalid("point-mass vector length must equal dim"));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("point-mass vector must be finite"));
                }
                let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
                (norm, v.iter().map(|x| x * x).collect())
            }
        };
        Ok(FamilySpec {
            kind,
            dim,
            k_bound,
            second_moment_diag,
        })
    }

    pub fn standard_gaussian(dim: usize) -> Result<Self> {
        Self::new(FamilyKind::StandardGaussian, dim)
    }

    /// Replaces the analytic `K` by another convention (e.g. an estimate).
    pub fn with_k_bound(mut self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid("k_bound must be finite and > 0"));
        }
        self.k_bound = k;
        Ok(self)
    }

    /// Number of scale blocks `q` (1 for identically distributed families).
    pub fn blocks(&self) -> usize {
        match &self.kind {
            FamilyKind::ScaledGaussian(f) => f.len(),
            _ => 1,
        }
    }

    pub fn is_identically_distributed(&self) -> bool {
        !matches!(self.kind, FamilyKind::ScaledGaussian(_))
    }

    /// Draws row `j` of an ensemble with `n_rows` rows into `out`.
    pub fn fill_row(&self, seed: u64, j: usize, n_rows: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        match &self.kind {
            FamilyKind::PointMass(v) => out.copy_from_slice(v),
            FamilyKind::Rademacher => {
                let mut r = rng::stream(seed, j as u64);
                out.iter_mut().for_each(|x| *x = rng::rademacher(&mut r));
            }
            FamilyKind::StandardGaussian => {
                let mut r = rng::stream(seed, j as u64);
                out.iter_mut().for_each(|x| *x = rng::gaussian(&mut r));
            }
            FamilyKind::AnisotropicGaussian(diag) => {
                let mut r = rng::stream(seed, j as u64);
                for (x, &lam) in out.iter_mut().zip(diag) {
                    *x = libm::sqrt(lam) * rng::gaussian(&mut r);
                }
            }
            FamilyKind::ScaledGaussian(scales) => {
                let m = (n_rows / scales.len()).max(1);
                let f = scales[(j / m).min(scales.len() - 1)];
                let mut r = rng::stream(seed, j as u64);
                out.iter_mut().for_each(|x| *x = f * rng::gaussian(&mut r));
            }
        }
    }

    /// Diagonal of `E[w_j w_j']` for row `j` of an `n_rows`-row ensemble.
    pub fn row_moment_diag(&self, j: usize, n_rows: usize) -> Vec<f64> {
        match &self.kind {
            FamilyKind::ScaledGaussian(scales) => {
                let m = (n_rows / scales.len()).max(1);
                let f = scales[(j / m).min(scales.len() - 1)];
                vec![f * f; self.dim]
            }
            _ => self.second_moment_diag.clone(),
        }
    }

    /// Exact average second moment `(1/N) Σ E[w_j w_j']`.
    pub fn mean_second_moment(&self) -> Matrix {
        match &self.kind {
            FamilyKind::PointMass(v) => {
                let mut m = Matrix::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m[(i, j)] = v[i] * v[j];
                    }
                }
                m
            }
            _ => Matrix::from_diag(&self.second_moment_diag),
        }
    }

    /// Extreme eigenvalues `(min, max)` of [`Self::mean_second_moment`].
    pub fn second_moment_extremes(&self) -> (f64, f64) {
        match &self.kind {
            // v v' has eigenvalues ||v||^2 and 0 (multiplicity dim - 1).
            FamilyKind::PointMass(v) => {
                let sq: f64 = v.iter().map(|x| x * x).sum();
                if self.dim == 1 {
                    (sq, sq)
                } else {
                    (0.0, sq)
                }
            }
            _ => {
                let d = &self.second_moment_diag;
                let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// An `N x n` realization of independent rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEnsemble {
    pub rows: Matrix,
    pub family: FamilySpec,
    pub seed: u64,
}

impl RowEnsemble {
    pub fn n_rows(&self) -> usize {
        self.rows.rows()
    }

    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn row_moment_diag(&self, j: usize) -> Vec<f64> {
        self.family.row_moment_diag(j, self.n_rows())
    }

    /// Block index `k` and in-block index `i` of flat row `j` (`j = k*m + i`).
    pub fn block_of(&self, j: usize) -> (usize, usize) {
        let m = self.n_rows() / self.family.blocks();
        (j / m, j % m)
    }

    pub fn descriptor(&self) -> String {
        self.family.to_string()
    }
}

/// Draws `n_rows` independent rows from `family`.
pub fn sample_ensemble(family: &FamilySpec, n_rows: usize, seed: u64) -> Result<RowEnsemble> {
    if n_rows == 0 {
        return Err(Error::invalid("number of rows must be at least 1"));
    }
    if family.dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !n_rows.is_multiple_of(family.blocks()) {
        return Err(Error::invalid(
            "scaled family needs N divisible by the number of scales",
        ));
    }
    let mut rows = Matrix::zeros(n_rows, family.dim);
    for j in 0..n_rows {
        family.fill_row(seed, j, n_rows, rows.row_mut(j));
    }
    Ok(RowEnsemble {
        rows,
        family: family.clone(),
        seed,
    })
}

/// Exact `(1/N) Σ_j E[w_j w_j']` of the ensemble's family.
pub fn mean_second_moment(ensemble: &RowEnsemble) -> Matrix {
    ensemble.family.mean_second_moment()
}
