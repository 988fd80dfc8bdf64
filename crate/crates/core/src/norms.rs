//! Moment-growth estimators of the sub-Gaussian (ψ₂) and sub-exponential (ψ₁)
//! norms.
//!
//! For a scalar `x` the estimate is `max_{p = 1..p_max} p^{-1/α} (Ê|x|^p)^{1/p}`
//! with `α = 2` (sub-Gaussian) or `α = 1` (sub-exponential) and `Ê` the
//! empirical mean. Powers are evaluated as `exp(p · ln(|x| / M))` with `M` the
//! largest sample magnitude, so `p = 16` never overflows.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, CompensatedSum};
use crate::rng::{self, StreamRng};
use crate::samplers::FamilySpec;

pub const DEFAULT_P_MAX: u32 = 16;
pub const MIN_SAMPLES: usize = 1_000;
/// Slack on the `‖(w'z)² - E(w'z)²‖_ψ₁ <= 4 ‖w'z‖_ψ₂²` check.
pub const SQUARE_CHECK_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// ψ₂: exponent `α = 2`.
    SubGaussian,
    /// ψ₁: exponent `α = 1`.
    SubExponential,
}

impl NormKind {
    fn inv_alpha(self) -> f64 {
        match self {
            NormKind::SubGaussian => 0.5,
            NormKind::SubExponential => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    /// `max(per_p_values)`.
    pub value: f64,
    pub p_max: u32,
    pub samples: usize,
    /// `p^{-1/α} (Ê|x|^p)^{1/p}` for `p = 1..=p_max`.
    pub per_p_values: Vec<f64>,
    /// Delta-method standard error of `value` at the maximizing `p`.
    pub stderr: f64,
    /// The `p` attaining `value` (first maximizer).
    pub argmax_p: u32,
}

/// Source of scalar draws.
pub trait ScalarSampler: Sync {
    fn sample(&self, rng: &mut StreamRng) -> f64;
}

impl<F> ScalarSampler for F
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        self(rng)
    }
}

/// Named scalar laws, used by the command line front-end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarLaw {
    Gaussian { scale: f64 },
    GaussianSquared { scale: f64 },
    Rademacher,
    Constant(f64),
}

impl ScalarSampler for ScalarLaw {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            ScalarLaw::Gaussian { scale } => scale * rng::gaussian(rng),
            ScalarLaw::GaussianSquared { scale } => {
                let g = scale * rng::gaussian(rng);
                g * g
            }
            ScalarLaw::Rademacher => rng::rademacher(rng),
            ScalarLaw::Constant(c) => c,
        }
    }
}

fn check_args(p_max: u32, samples: usize) -> Result<()> {
    if p_max == 0 {
        return Err(Error::invalid("p_max must be at least 1"));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::invalid("at least 1000 samples are required"));
    }
    Ok(())
}

fn draw_samples<S: ScalarSampler + ?Sized>(draw: &S, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut r = rng::stream(seed, 0);
    let mut xs = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = draw.sample(&mut r);
        if !x.is_finite() {
            return Err(Error::numeric("non-finite draw", Some(i)));
        }
        xs.push(x);
    }
    Ok(xs)
}

/// Moment-growth norm of a fixed sample.
pub fn moment_norm(xs: &[f64], p_max: u32, kind: NormKind) -> Result<NormEstimate> {
    if p_max == 0 {
        return Err(Error::invalid("p_max must be at least 1"));
    }
    if xs.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::numeric("non-finite sample", Some(i)));
    }
    let n = xs.len() as f64;
    let scale = xs.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max);
    let mut estimate = NormEstimate {
        value: 0.0,
        p_max,
        samples: xs.len(),
        per_p_values: vec![0.0; p_max as usize],
        stderr: 0.0,
        argmax_p: 1,
    };
    if scale == 0.0 {
        return Ok(estimate);
    }

    let pm = p_max as usize;
    let mut first = vec![CompensatedSum::default(); pm];
    let mut second = vec![CompensatedSum::default(); pm];
    for &x in xs {
        let a = libm::fabs(x);
        if a == 0.0 {
            continue;
        }
        let log_ratio = libm::log(a / scale);
        for p in 1..=pm {
            first[p - 1].add(libm::exp(p as f64 * log_ratio));
            second[p - 1].add(libm::exp(2.0 * p as f64 * log_ratio));
        }
    }

    let mut stderrs = vec![0.0; pm];
    for p in 1..=pm {
        let pf = p as f64;
        let mean = first[p - 1].value() / n;
        let mean_sq = second[p - 1].value() / n;
        let value = libm::pow(pf, -kind.inv_alpha()) * scale * libm::pow(mean, 1.0 / pf);
        if !value.is_finite() {
            return Err(Error::numeric("non-finite moment", Some(p)));
        }
        let se_mean = libm::sqrt(libm::fmax(mean_sq - mean * mean, 0.0) / n);
        estimate.per_p_values[p - 1] = value;
        stderrs[p - 1] = if mean > 0.0 { value * se_mean / (pf * mean) } else { 0.0 };
    }
    let (best, &value) =
        estimate.per_p_values.iter().enumerate().fold(
            (0, &f64::NEG_INFINITY),
            |acc, cur| if cur.1 > acc.1 { cur } else { acc },
        );
    estimate.value = value;
    estimate.argmax_p = best as u32 + 1;
    estimate.stderr = stderrs[best];
    Ok(estimate)
}

/// Sub-Gaussian norm estimate of a scalar law.
pub fn subgaussian_norm_scalar<S: ScalarSampler + ?Sized>(
    draw: &S,
    p_max: u32,
    samples: usize,
    seed: u64,
) -> Result<NormEstimate> {
    check_args(p_max, samples)?;
    moment_norm(&draw_samples(draw, samples, seed)?, p_max, NormKind::SubGaussian)
}

/// Sub-exponential norm estimate of a scalar law.
pub fn subexponential_norm_scalar<S: ScalarSampler + ?Sized>(
    draw: &S,
    p_max: u32,
    samples: usize,
    seed: u64,
) -> Result<NormEstimate> {
    check_args(p_max, samples)?;
    moment_norm(&draw_samples(draw, samples, seed)?, p_max, NormKind::SubExponential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareCheck {
    /// Estimated `‖w'z‖_ψ₂`.
    pub phi2_of_wz: f64,
    /// Estimated `‖(w'z)² - E(w'z)²‖_ψ₁`.
    pub phi1_of_sq: f64,
    /// `phi1_of_sq <= 4 phi2_of_wz² (1 + SQUARE_CHECK_SLACK)`.
    pub ratio_ok: bool,
}

/// Checks numerically that the centered square of a sub-Gaussian projection
/// is sub-exponential with norm at most `4 ‖w'z‖_ψ₂²`.
///
/// For scaled families the draws cycle evenly through all scale blocks, so the
/// projection follows the block mixture and is centered by its averaged
/// second moment.
pub fn verify_square_subexp(
    family: &FamilySpec,
    z: &[f64],
    p_max: u32,
    samples: usize,
    seed: u64,
) -> Result<SquareCheck> {
    check_args(p_max, samples)?;
    if z.len() != family.dim {
        return Err(Error::invalid("z length must equal the family dimension"));
    }
    if norm_sq(z) == 0.0 {
        return Err(Error::invalid("z must be nonzero"));
    }
    let q = family.blocks();
    let n_rows = samples.div_ceil(q) * q;
    let mut row = vec![0.0; family.dim];
    let mut projections = Vec::with_capacity(n_rows);
    for j in 0..n_rows {
        family.fill_row(seed, j, n_rows, &mut row);
        projections.push(dot(&row, z));
    }
    let sigma = family.mean_second_moment();
    let expected_sq = dot(z, &sigma.matvec(z));
    let centered: Vec<f64> = projections.iter().map(|p| p * p - expected_sq).collect();

    let phi2 = moment_norm(&projections, p_max, NormKind::SubGaussian)?.value;
    let phi1 = moment_norm(&centered, p_max, NormKind::SubExponential)?.value;
    Ok(SquareCheck {
        phi2_of_wz: phi2,
        phi1_of_sq: phi1,
        ratio_ok: phi1 <= 4.0 * phi2 * phi2 * (1.0 + SQUARE_CHECK_SLACK),
    })
}

/// `E|g|^p = 2^{p/2} Γ((p+1)/2) / sqrt(pi)` for a standard Gaussian `g`.
pub fn gaussian_abs_moment(p: u32) -> f64 {
    let pf = p as f64;
    libm::exp(
        0.5 * pf * core::f64::consts::LN_2 + libm::lgamma(0.5 * (pf + 1.0)) - 0.5 * libm::log(core::f64::consts::PI),
    )
}

/// Closed-form moment-growth norm of a standard Gaussian truncated at `p_max`.
pub fn gaussian_moment_norm(p_max: u32, kind: NormKind) -> f64 {
    (1..=p_max)
        .map(|p| {
            let pf = p as f64;
            libm::pow(pf, -kind.inv_alpha()) * libm::pow(gaussian_abs_moment(p), 1.0 / pf)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::FamilyKind;

    const GAUSS: ScalarLaw = ScalarLaw::Gaussian { scale: 1.0 };

    #[test]
    fn rademacher_norm_is_one_at_first_moment() {
        for p_max in [1, 4, 16] {
            let est = subgaussian_norm_scalar(&ScalarLaw::Rademacher, p_max, 2_000, 5).unwrap();
            assert_eq!(est.value, 1.0);
            assert_eq!(est.argmax_p, 1);
            let est = subexponential_norm_scalar(&ScalarLaw::Rademacher, p_max, 2_000, 5).unwrap();
            assert_eq!(est.value, 1.0);
            assert_eq!(est.argmax_p, 1);
        }
    }

    #[test]
    fn zero_law_has_zero_norm() {
        let est = subexponential_norm_scalar(&ScalarLaw::Constant(0.0), 16, 1_000, 0).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.per_p_values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn value_is_max_of_per_p_values() {
        let est = subgaussian_norm_scalar(&GAUSS, 16, 20_000, 3).unwrap();
        let max = est.per_p_values.iter().copied().fold(0.0, f64::max);
        assert_eq!(est.value, max);
        assert_eq!(est.per_p_values.len(), 16);
        assert!(est.per_p_values.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(est.stderr > 0.0);
    }

    #[test]
    fn estimates_are_homogeneous() {
        let base = subgaussian_norm_scalar(&GAUSS, 16, 50_000, 8).unwrap().value;
        let tripled = subgaussian_norm_scalar(&ScalarLaw::Gaussian { scale: 3.0 }, 16, 50_000, 8)
            .unwrap()
            .value;
        assert!((tripled / base - 3.0).abs() < 1e-12);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            subgaussian_norm_scalar(&GAUSS, 0, 5_000, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            subgaussian_norm_scalar(&GAUSS, 4, 999, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn non_finite_draw_reports_its_index() {
        let counter = core::sync::atomic::AtomicUsize::new(0);
        let draw = |_: &mut StreamRng| {
            let i = counter.fetch_add(1, core::sync::atomic::Ordering::Relaxed);
            if i == 17 {
                f64::INFINITY
            } else {
                1.0
            }
        };
        let err = subgaussian_norm_scalar(&draw, 4, 1_000, 0).unwrap_err();
        assert_eq!(err, Error::numeric("non-finite draw", Some(17)));
    }

    #[test]
    fn square_check_scales_with_z() {
        let fam = FamilySpec::standard_gaussian(3).unwrap();
        let e1 = [1.0, 0.0, 0.0];
        let two_e1 = [2.0, 0.0, 0.0];
        let a = verify_square_subexp(&fam, &e1, 16, 20_000, 4).unwrap();
        let b = verify_square_subexp(&fam, &two_e1, 16, 20_000, 4).unwrap();
        assert!(a.ratio_ok && b.ratio_ok);
        assert!((b.phi2_of_wz / a.phi2_of_wz - 2.0).abs() < 1e-12);
        assert!((b.phi1_of_sq / a.phi1_of_sq - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rademacher_square_is_degenerate() {
        let fam = FamilySpec::new(FamilyKind::Rademacher, 4).unwrap();
        let check = verify_square_subexp(&fam, &[1.0, 0.0, 0.0, 0.0], 16, 2_000, 1).unwrap();
        assert_eq!(check.phi2_of_wz, 1.0);
        assert_eq!(check.phi1_of_sq, 0.0);
        assert!(check.ratio_ok);
    }

    #[test]
    fn square_check_rejects_zero_z() {
        let fam = FamilySpec::standard_gaussian(2).unwrap();
        assert!(verify_square_subexp(&fam, &[0.0, 0.0], 16, 2_000, 1).is_err());
        assert!(verify_square_subexp(&fam, &[1.0], 16, 2_000, 1).is_err());
    }

    #[test]
    fn closed_form_gaussian_moments_match_double_factorials() {
        // E|g|^p = (p-1)!! for even p, sqrt(2/pi) (p-1)!! for odd p.
        let mut dfact = [1.0f64; 17];
        for p in 2..17 {
            dfact[p] = dfact[p - 2] * (p - 1) as f64;
        }
        for p in 1..=16u32 {
            let df = if p >= 2 { dfact[p as usize] } else { 1.0 };
            let expected = if p % 2 == 0 {
                df
            } else {
                libm::sqrt(2.0 / core::f64::consts::PI) * df
            };
            let got = gaussian_abs_moment(p);
            assert!((got / expected - 1.0).abs() < 1e-12, "p={p}: {got} vs {expected}");
        }
    }
}
