//! Monte Carlo failure probabilities for the two concentration events,
//! log-linear decay fits, Wilson intervals and the union-bound gap between
//! the fixed-direction and operator-norm events.
//!
//! Trial `τ` at sample size `N` uses the seed `derive_seed(master, [N, τ])`,
//! so every outcome is a pure function of its indices and the executor only
//! affects wall-clock time.

use alloc::vec;
use alloc::vec::Vec;

use crate::deviation::{deviation_matrix, quad_form, spectral_norm, spectral_summary};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::norm_sq;
use crate::rng;
use crate::samplers::{sample_ensemble, FamilySpec};

/// Success threshold used for `N*` in the union-bound table.
pub const N_STAR_LEVEL: f64 = 0.01;
pub const MIN_TRIALS: usize = 100;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub enum ZMode {
    FixedUnit(Vec<f64>),
    /// Fresh uniform unit vector per trial, drawn after the ensemble.
    RandomUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    /// `|z'Dz| > 4 eps K² ‖z‖²`.
    QuadForm,
    /// `‖D‖ > 4 eps K²`.
    SpecNorm,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::QuadForm => "quad",
            Claim::SpecNorm => "spec",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    pub n_grid: Vec<usize>,
    pub eps: f64,
    pub z_mode: ZMode,
    pub trials: usize,
    pub master_seed: u64,
    pub claim: Claim,
    /// Replaces `family.k_bound` in the threshold.
    pub k_override: Option<f64>,
}

impl ExperimentConfig {
    pub fn k(&self) -> f64 {
        self.k_override.unwrap_or(self.family.k_bound)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid("trials must be at least 100"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps must be finite and > 0"));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("N grid must be non-empty and strictly increasing"));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::invalid("N grid entries must be at least 1"));
        }
        if let Some(k) = self.k_override {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::invalid("K override must be finite and > 0"));
            }
        }
        if let ZMode::FixedUnit(z) = &self.z_mode {
            if z.len() != self.family.dim {
                return Err(Error::invalid("fixed z must have length n"));
            }
            if !(norm_sq(z) > 0.0) {
                return Err(Error::invalid("fixed z must be nonzero"));
            }
        }
        Ok(())
    }

    /// Threshold for a direction `z` (ignored for the operator-norm claim).
    pub fn threshold(&self, z: &[f64]) -> f64 {
        let k = self.k();
        match self.claim {
            Claim::QuadForm => 4.0 * self.eps * k * k * norm_sq(z),
            Claim::SpecNorm => 4.0 * self.eps * k * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub n_rows: usize,
    pub failures: usize,
    pub trials: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `4 eps K² ‖z‖²` or `4 eps K²`; for random unit `z` both coincide.
    pub threshold: f64,
}

impl McEstimate {
    pub fn new(n_rows: usize, failures: usize, trials: usize, threshold: f64) -> Result<Self> {
        let (ci_lo, ci_hi) = wilson_interval(failures, trials, DEFAULT_CONFIDENCE)?;
        Ok(McEstimate {
            n_rows,
            failures,
            trials,
            p_hat: failures as f64 / trials as f64,
            ci_lo,
            ci_hi,
            threshold,
        })
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }

    /// `p_hat`, or the rule-of-three bound `3 / trials` when nothing failed.
    pub fn plotting_value(&self) -> f64 {
        if self.failures == 0 {
            3.0 / self.trials as f64
        } else {
            self.p_hat
        }
    }
}

fn trial_direction(mode: &ZMode, dim: usize, trial_seed: u64) -> Vec<f64> {
    match mode {
        ZMode::FixedUnit(z) => z.clone(),
        ZMode::RandomUnit => {
            let mut z = vec![0.0; dim];
            rng::unit_vector(&mut rng::stream(trial_seed, rng::AUX_STREAM), &mut z);
            z
        }
    }
}

/// Statistic of one trial: `|z'Dz|` or `‖D‖`.
pub fn trial_statistic(config: &ExperimentConfig, n_rows: usize, trial: usize) -> Result<(f64, f64)> {
    let seed = rng::derive_seed(config.master_seed, &[n_rows as u64, trial as u64]);
    let ensemble = sample_ensemble(&config.family, n_rows, seed)?;
    let dev = deviation_matrix(&ensemble);
    let z = trial_direction(&config.z_mode, config.family.dim, seed);
    let stat = match config.claim {
        Claim::QuadForm => libm::fabs(quad_form(&dev, &z)?),
        Claim::SpecNorm => spectral_norm(&dev)?,
    };
    if !stat.is_finite() {
        return Err(Error::numeric("non-finite trial statistic", Some(trial)));
    }
    Ok((stat, config.threshold(&z)))
}

fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// One estimate per entry of `config.n_grid`.
pub fn mc_failure<E: Executor>(config: &ExperimentConfig, exec: &E) -> Result<Vec<McEstimate>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.n_grid.len());
    for &n_rows in &config.n_grid {
        let outcomes = first_error(exec.map_indexed(config.trials, |t| trial_statistic(config, n_rows, t)))?;
        let failures = outcomes.iter().filter(|(stat, thr)| stat > thr).count();
        let threshold = outcomes.first().map_or(0.0, |o| o.1);
        out.push(McEstimate::new(n_rows, failures, config.trials, threshold)?);
    }
    Ok(out)
}

/// Standard normal quantile by bisection on `erfc`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("probability must lie in (0, 1)"));
    }
    let cdf = |x: f64| 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: usize, trials: usize, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if failures > trials {
        return Err(Error::invalid("failures cannot exceed trials"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid("confidence must lie in (0, 1)"));
    }
    let z = normal_quantile(0.5 + 0.5 * confidence)?;
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    let lo = if failures == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let hi = if failures == trials {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `-slope / min(eps, eps²)`.
    pub c_hat: f64,
    pub points_used: usize,
}

pub const MIN_FIT_POINTS: usize = 3;

/// Least squares of `ln p_hat` on `N` over the points with `0 < p_hat < 1`.
pub fn fit_decay(estimates: &[McEstimate], eps: f64) -> Result<DecayFit> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be > 0"));
    }
    let pts: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.p_hat > 0.0 && e.p_hat < 1.0)
        .map(|e| (e.n_rows as f64, libm::log(e.p_hat)))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("fit needs at least two distinct N values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        c_hat: -slope / eps.min(eps * eps),
        points_used: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCell {
    pub dim: usize,
    pub n_rows: usize,
    pub quad: McEstimate,
    pub spec: McEstimate,
    /// Trials where `|z'Dz| > ‖D‖ ‖z‖²` beyond rounding; always zero.
    pub domination_violations: usize,
}

impl GapCell {
    /// `p_spec >= p_quad - 2 * (quad CI width)`.
    pub fn ordering_ok(&self) -> bool {
        self.spec.p_hat >= self.quad.p_hat - 2.0 * self.quad.ci_width()
    }
}

/// Smallest grid `N` whose estimate is at most [`N_STAR_LEVEL`], or `None`
/// when the grid is exhausted (saturated).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NStar(pub Option<usize>);

impl NStar {
    pub fn saturated(self) -> bool {
        self.0.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub dim: usize,
    pub cells: Vec<GapCell>,
    pub n_star_quad: NStar,
    pub n_star_spec: NStar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionGapConfig {
    pub dims: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub eps: f64,
    pub trials: usize,
    pub master_seed: u64,
}

/// Doubling grid `start, 2 start, ...` up to and including `max`.
pub fn doubling_grid(start: usize, max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut v = start.max(1);
    while v <= max {
        grid.push(v);
        v = match v.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    grid
}

fn first_below(cells: &[GapCell], pick: impl Fn(&GapCell) -> f64) -> NStar {
    NStar(cells.iter().find(|c| pick(c) <= N_STAR_LEVEL).map(|c| c.n_rows))
}

/// Both events on the same ensemble and a random unit `z` per trial, at the
/// common threshold `4 eps K²`.
pub fn union_bound_gap<E, F>(config: &UnionGapConfig, family_for: F, exec: &E) -> Result<Vec<GapRow>>
where
    E: Executor,
    F: Fn(usize) -> Result<FamilySpec>,
{
    if config.trials < MIN_TRIALS {
        return Err(Error::invalid("trials must be at least 100"));
    }
    if !(config.eps > 0.0 && config.eps.is_finite()) {
        return Err(Error::invalid("eps must be finite and > 0"));
    }
    if config.dims.is_empty() || config.dims.contains(&0) {
        return Err(Error::invalid("dimension grid must be non-empty with entries >= 1"));
    }
    if config.n_grid.is_empty() || config.n_grid[0] == 0 || config.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "N grid must be non-empty, positive and strictly increasing",
        ));
    }
    let mut rows = Vec::with_capacity(config.dims.len());
    for &dim in &config.dims {
        let family = family_for(dim)?;
        if family.dim != dim {
            return Err(Error::invalid("family dimension does not match the grid"));
        }
        let k = family.k_bound;
        let threshold = 4.0 * config.eps * k * k;
        let mut cells = Vec::with_capacity(config.n_grid.len());
        for &n_rows in &config.n_grid {
            let outcomes = first_error(exec.map_indexed(config.trials, |t| -> Result<(f64, f64)> {
                let seed = rng::derive_seed(config.master_seed, &[dim as u64, n_rows as u64, t as u64]);
                let ensemble = sample_ensemble(&family, n_rows, seed)?;
                let dev = deviation_matrix(&ensemble);
                let z = trial_direction(&ZMode::RandomUnit, dim, seed);
                let quad = libm::fabs(quad_form(&dev, &z)?);
                let spec = spectral_norm(&dev)?;
                if !(quad.is_finite() && spec.is_finite()) {
                    return Err(Error::numeric("non-finite trial statistic", Some(t)));
                }
                Ok((quad, spec))
            }))?;
            let quad_fail = outcomes.iter().filter(|o| o.0 > threshold).count();
            let spec_fail = outcomes.iter().filter(|o| o.1 > threshold).count();
            let domination_violations = outcomes.iter().filter(|(q, s)| *q > s * (1.0 + 1e-10) + 1e-14).count();
            cells.push(GapCell {
                dim,
                n_rows,
                quad: McEstimate::new(n_rows, quad_fail, config.trials, threshold)?,
                spec: McEstimate::new(n_rows, spec_fail, config.trials, threshold)?,
                domination_violations,
            });
        }
        rows.push(GapRow {
            dim,
            n_star_quad: first_below(&cells, |c| c.quad.p_hat),
            n_star_spec: first_below(&cells, |c| c.spec.p_hat),
            cells,
        });
    }
    Ok(rows)
}

/// Empirical constant for the singular-value interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularCalibration {
    /// Median of `max(sqrt(N) - σmin, σmax - sqrt(N)) / sqrt(n)`.
    pub c_k: f64,
    /// Upper `coverage` quantile of the deviation minus `c_k sqrt(n)`.
    pub t: f64,
    pub deviations: Vec<f64>,
}

pub fn calibrate_singular_values<E: Executor>(
    family: &FamilySpec,
    n_rows: usize,
    trials: usize,
    coverage: f64,
    seed: u64,
    exec: &E,
) -> Result<SingularCalibration> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid("trials must be at least 100"));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::invalid("coverage must lie in (0, 1)"));
    }
    let root = libm::sqrt(n_rows as f64);
    let deviations = first_error(exec.map_indexed(trials, |t| -> Result<f64> {
        let ensemble = sample_ensemble(family, n_rows, rng::derive_seed(seed, &[n_rows as u64, t as u64]))?;
        let s = spectral_summary(&ensemble)?;
        Ok((root - s.sigma_min_w).max(s.sigma_max_w - root))
    }))?;
    let mut sorted = deviations.clone();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| sorted[((q * (sorted.len() - 1) as f64) as usize).min(sorted.len() - 1)];
    let root_n = libm::sqrt(family.dim as f64);
    let c_k = quantile(0.5) / root_n;
    let upper = (libm::ceil(coverage * trials as f64) as usize).clamp(1, trials) - 1;
    let t = (sorted[upper] - c_k * root_n).max(0.0);
    Ok(SingularCalibration { c_k, t, deviations })
}
