//! The deviation matrix `D = (1/N) W'W - (1/N) Σ E[w_j w_j']`, its forms and
//! spectral summaries, the Weyl eigenvalue corollary and the singular-value
//! interval of the isotropic special case.

use crate::error::{Error, Result};
use crate::linalg::{gram, norm_sq, sym_eigen, CompensatedSum, Matrix};
use crate::samplers::{FamilySpec, RowEnsemble};

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMatrix {
    /// Symmetric `n x n` matrix.
    pub d: Matrix,
    pub source_n: usize,
    pub source_family: FamilySpec,
}

impl DeviationMatrix {
    /// Wraps a raw symmetric matrix (for checking forms and norms directly).
    pub fn from_symmetric(d: Matrix, family: FamilySpec) -> Result<Self> {
        if !d.is_square() || d.rows() != family.dim {
            return Err(Error::invalid("matrix shape does not match the family dimension"));
        }
        if d.asymmetry() > 1e-10 {
            return Err(Error::invalid("matrix is not symmetric"));
        }
        Ok(DeviationMatrix {
            d,
            source_n: 0,
            source_family: family,
        })
    }

    pub fn dim(&self) -> usize {
        self.d.rows()
    }
}

/// Empirical second moment `(1/N) W'W`.
pub fn empirical_second_moment(ensemble: &RowEnsemble) -> Matrix {
    let mut g = gram(&ensemble.rows);
    g.scale(1.0 / ensemble.n_rows() as f64);
    g
}

pub fn deviation_matrix(ensemble: &RowEnsemble) -> DeviationMatrix {
    let mut d = empirical_second_moment(ensemble);
    d.sub_assign(&ensemble.family.mean_second_moment());
    d.symmetrize();
    DeviationMatrix {
        d,
        source_n: ensemble.n_rows(),
        source_family: ensemble.family.clone(),
    }
}

/// `z' D z`, compensated.
pub fn quad_form(dev: &DeviationMatrix, z: &[f64]) -> Result<f64> {
    bilinear_form(dev, z, z)
}

/// `z1' D z2`, compensated.
pub fn bilinear_form(dev: &DeviationMatrix, z1: &[f64], z2: &[f64]) -> Result<f64> {
    let n = dev.dim();
    if z1.len() != n || z2.len() != n {
        return Err(Error::invalid("vector length does not match the matrix dimension"));
    }
    let mut acc = CompensatedSum::default();
    for (i, &a) in z1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in z2.iter().enumerate() {
            acc.add(a * dev.d[(i, j)] * b);
        }
    }
    Ok(acc.value())
}

/// Exact `‖D‖` from the Jacobi eigensolver.
pub fn spectral_norm(dev: &DeviationMatrix) -> Result<f64> {
    Ok(sym_eigen(&dev.d)?.abs_max())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    pub spec_norm_d: f64,
    /// Extreme eigenvalues of `(1/N) W'W`.
    pub lam_min_gram: f64,
    pub lam_max_gram: f64,
    /// Extreme singular values of `W`.
    pub sigma_min_w: f64,
    pub sigma_max_w: f64,
}

pub fn spectral_summary(ensemble: &RowEnsemble) -> Result<SpectralSummary> {
    let gram_eig = sym_eigen(&empirical_second_moment(ensemble))?;
    let dev = deviation_matrix(ensemble);
    let n_rows = ensemble.n_rows() as f64;
    let (lo, hi) = (gram_eig.min(), gram_eig.max());
    Ok(SpectralSummary {
        spec_norm_d: spectral_norm(&dev)?,
        lam_min_gram: lo,
        lam_max_gram: hi,
        sigma_min_w: libm::sqrt(n_rows * lo.max(0.0)),
        sigma_max_w: libm::sqrt(n_rows * hi.max(0.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCheck {
    /// `λmax((1/N)W'W) <= λmax(mean moment) + 4 eps K²`.
    pub lam_max_ok: bool,
    /// `λmin((1/N)W'W) >= λmin(mean moment) - 4 eps K²`.
    pub lam_min_ok: bool,
    pub margin_max: f64,
    pub margin_min: f64,
    pub lam_max_emp: f64,
    pub lam_min_emp: f64,
    pub lam_max_exp: f64,
    pub lam_min_exp: f64,
    /// `‖D‖`; always `|λ_emp - λ_exp| <= spec_norm_d` up to rounding.
    pub spec_norm_d: f64,
    pub threshold: f64,
}

pub fn weyl_bounds(ensemble: &RowEnsemble, eps: f64) -> Result<WeylCheck> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be > 0"));
    }
    let emp = sym_eigen(&empirical_second_moment(ensemble))?;
    let (lam_min_exp, lam_max_exp) = ensemble.family.second_moment_extremes();
    let k = ensemble.family.k_bound;
    let threshold = 4.0 * eps * k * k;
    let margin_max = lam_max_exp + threshold - emp.max();
    let margin_min = emp.min() - (lam_min_exp - threshold);
    Ok(WeylCheck {
        lam_max_ok: margin_max >= 0.0,
        lam_min_ok: margin_min >= 0.0,
        margin_max,
        margin_min,
        lam_max_emp: emp.max(),
        lam_min_emp: emp.min(),
        lam_max_exp,
        lam_min_exp,
        spec_norm_d: spectral_norm(&deviation_matrix(ensemble))?,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValueInterval {
    /// `sqrt(N) - (C_K sqrt(n) + t)`, possibly negative.
    pub lo_raw: f64,
    /// `max(lo_raw, 0)`.
    pub lo: f64,
    pub hi: f64,
}

impl SingularValueInterval {
    pub fn contains(&self, sigma: f64) -> bool {
        self.lo_raw <= sigma && sigma <= self.hi
    }
}

/// `[sqrt(N) - (C_K sqrt(n) + t), sqrt(N) + (C_K sqrt(n) + t)]`.
pub fn singular_value_interval(n_rows: usize, dim: usize, t: f64, c_k: f64) -> Result<SingularValueInterval> {
    if n_rows == 0 || dim == 0 {
        return Err(Error::invalid("N and n must be at least 1"));
    }
    if !(t >= 0.0) || !(c_k >= 0.0) {
        return Err(Error::invalid("t and C_K must be >= 0"));
    }
    let root = libm::sqrt(n_rows as f64);
    let half_width = c_k * libm::sqrt(dim as f64) + t;
    let lo_raw = root - half_width;
    Ok(SingularValueInterval {
        lo_raw,
        lo: lo_raw.max(0.0),
        hi: root + half_width,
    })
}

/// `ε = ln(9) sqrt(n) / (sqrt(2) ĉ sqrt(N)) + t / (4 K² sqrt(N))`.
///
/// With this ε the operator-norm threshold `4 ε K²` becomes an additive
/// `(C sqrt(n) + t) / sqrt(N)` deviation of `(1/N) W'W` from the identity.
pub fn eps_for_singular_values(n_rows: usize, dim: usize, t: f64, k: f64, c_hat: f64) -> Result<f64> {
    if n_rows == 0 || dim == 0 || !(k > 0.0) || !(c_hat > 0.0) || !(t >= 0.0) {
        return Err(Error::invalid("N, n, K and c must be positive and t >= 0"));
    }
    let root_n = libm::sqrt(n_rows as f64);
    Ok(
        libm::log(9.0) * libm::sqrt(dim as f64) / (core::f64::consts::SQRT_2 * c_hat * root_n)
            + t / (4.0 * k * k * root_n),
    )
}

/// `‖z‖²`-scaled claim-one threshold `4 eps K² ‖z‖²`.
pub fn quad_threshold(family: &FamilySpec, eps: f64, z: &[f64]) -> f64 {
    4.0 * eps * family.k_bound * family.k_bound * norm_sq(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::samplers::{sample_ensemble, FamilyKind};
    use alloc::vec;
    use alloc::vec::Vec;

    fn gaussian_vec(n: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::stream(seed, 5);
        (0..n).map(|_| rng::gaussian(&mut r)).collect()
    }

    #[test]
    fn point_mass_rows_have_zero_deviation() {
        let fam = FamilySpec::new(FamilyKind::PointMass(vec![2.5, 0.0, 0.0]), 3).unwrap();
        let e = sample_ensemble(&fam, 37, 0).unwrap();
        let dev = deviation_matrix(&e);
        assert!(dev.d.as_slice().iter().all(|&x| x == 0.0));
        let w = weyl_bounds(&e, 0.1).unwrap();
        assert!(w.lam_max_ok && w.lam_min_ok);
        let k2 = fam.k_bound * fam.k_bound;
        assert!((w.margin_max - 0.4 * k2).abs() < 1e-12);
        assert!((w.margin_min - 0.4 * k2).abs() < 1e-12);
    }

    #[test]
    fn scaled_family_subtracts_the_averaged_moment() {
        let fam = FamilySpec::new(FamilyKind::ScaledGaussian(vec![1.0, 3.0]), 4).unwrap();
        let e = sample_ensemble(&fam, 2_000, 2).unwrap();
        let dev = deviation_matrix(&e);
        let mut expected = empirical_second_moment(&e);
        expected.sub_assign(&Matrix::from_diag(&[5.0; 4]));
        for (a, b) in dev.d.as_slice().iter().zip(expected.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn raw_forms() {
        let fam = FamilySpec::standard_gaussian(3).unwrap();
        let dev = DeviationMatrix::from_symmetric(Matrix::identity(3), fam.clone()).unwrap();
        assert_eq!(quad_form(&dev, &[0.0; 3]).unwrap(), 0.0);
        assert_eq!(quad_form(&dev, &[0.0, 1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(bilinear_form(&dev, &[1.0, 2.0, 3.0], &[0.0; 3]).unwrap(), 0.0);
        assert!(quad_form(&dev, &[1.0, 0.0]).is_err());
        assert!(bilinear_form(&dev, &[1.0, 0.0, 0.0], &[1.0]).is_err());
        let diag = DeviationMatrix::from_symmetric(
            Matrix::from_diag(&[3.0, -5.0]),
            FamilySpec::standard_gaussian(2).unwrap(),
        )
        .unwrap();
        assert_eq!(spectral_norm(&diag).unwrap(), 5.0);
        let zero = DeviationMatrix::from_symmetric(Matrix::zeros(3, 3), fam).unwrap();
        assert_eq!(spectral_norm(&zero).unwrap(), 0.0);
    }

    #[test]
    fn quad_form_matches_double_loop() {
        let fam = FamilySpec::standard_gaussian(7).unwrap();
        let e = sample_ensemble(&fam, 50, 3).unwrap();
        let dev = deviation_matrix(&e);
        for seed in 0..20 {
            let z = gaussian_vec(7, seed);
            let mut naive = 0.0;
            for i in 0..7 {
                for j in 0..7 {
                    naive += z[i] * dev.d[(i, j)] * z[j];
                }
            }
            let q = quad_form(&dev, &z).unwrap();
            assert!((q - naive).abs() <= 1e-10 * naive.abs().max(1.0));
        }
    }

    #[test]
    fn gram_identity_ties_the_form_to_row_projections() {
        let fam = FamilySpec::new(FamilyKind::AnisotropicGaussian(vec![1.0, 2.0, 0.5, 3.0]), 4).unwrap();
        let e = sample_ensemble(&fam, 300, 8).unwrap();
        let dev = deviation_matrix(&e);
        let sigma = fam.mean_second_moment();
        for seed in 0..10 {
            let z = gaussian_vec(4, seed);
            let wz = e.rows.matvec(&z);
            let direct = norm_sq(&wz) / 300.0 - crate::linalg::dot(&z, &sigma.matvec(&z));
            let q = quad_form(&dev, &z).unwrap();
            assert!((q - direct).abs() <= 1e-8 * direct.abs().max(1e-3), "{q} vs {direct}");
        }
    }

    #[test]
    fn summary_singular_values_match_gram_eigenvalues() {
        let fam = FamilySpec::standard_gaussian(5).unwrap();
        let e = sample_ensemble(&fam, 40, 4).unwrap();
        let s = spectral_summary(&e).unwrap();
        assert!((s.sigma_min_w * s.sigma_min_w / (40.0 * s.lam_min_gram) - 1.0).abs() < 1e-8);
        assert!((s.sigma_max_w * s.sigma_max_w / (40.0 * s.lam_max_gram) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn singular_value_interval_arithmetic() {
        let iv = singular_value_interval(100, 4, 2.0, 1.0).unwrap();
        assert_eq!((iv.lo, iv.hi), (6.0, 14.0));
        let iv = singular_value_interval(100, 4, 0.0, 1e-300).unwrap();
        assert!((iv.lo - 10.0).abs() < 1e-12 && (iv.hi - 10.0).abs() < 1e-12);
        let iv = singular_value_interval(4, 100, 1.0, 1.0).unwrap();
        assert_eq!(iv.lo_raw, -9.0);
        assert_eq!(iv.lo, 0.0);
        assert!(singular_value_interval(0, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn eps_mapping_homogeneity() {
        let c = 0.7;
        let e0 = eps_for_singular_values(10_000, 16, 0.0, 0.8, c).unwrap();
        let expected = libm::log(9.0) * 4.0 / (core::f64::consts::SQRT_2 * c * 100.0);
        assert!((e0 - expected).abs() < 1e-15);
        let e1 = eps_for_singular_values(100, 16, 2.0, 0.8, c).unwrap();
        let e4 = eps_for_singular_values(400, 16, 2.0, 0.8, c).unwrap();
        assert!((e4 / e1 - 0.5).abs() < 1e-14);
        assert!(eps_for_singular_values(100, 16, 1.0, 0.8, 0.0).is_err());
    }
}
