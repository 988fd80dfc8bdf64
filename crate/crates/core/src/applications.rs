//! Quantities from the pooled-measurement example: per-vector deviations
//! `b_k`, the pooled deviation `b̃`, the bilinear-form bound and sweeps over
//! the number of measurements per vector.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::deviation::{bilinear_form, deviation_matrix, spectral_norm};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::{gram_range, norm_sq, sym_spectral_norm, CompensatedSum, Matrix};
use crate::montecarlo::{wilson_interval, DEFAULT_CONFIDENCE};
use crate::rng;
use crate::samplers::{sample_ensemble, FamilyKind, FamilySpec, RowEnsemble};

pub const MIN_SWEEP_TRIALS: usize = 200;
const X_VECTOR_TAG: u64 = 0x78_6b;

/// `|(1/m) Σ_i (a_i'x)² - ‖x‖²|` with `a_i` standard Gaussian rows of the
/// ensemble `(StandardGaussian(n), m, seed)`.
pub fn compute_bk(x: &[f64], m: usize, seed: u64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::invalid("x must have length at least 1"));
    }
    let ens = sample_ensemble(&FamilySpec::standard_gaussian(x.len())?, m, seed)?;
    Ok(block_bk(&ens.rows, 0, m, x))
}

fn block_bk(rows: &Matrix, lo: usize, hi: usize, x: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for r in lo..hi {
        let v: f64 = rows.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        acc.add(v * v);
    }
    libm::fabs(acc.value() / (hi - lo) as f64 - norm_sq(x))
}

/// `‖(1/m) Σ_{i in block} a a' - I‖` for the rows `lo..hi`.
fn block_spectral(rows: &Matrix, lo: usize, hi: usize) -> Result<f64> {
    let mut g = gram_range(rows, lo, hi);
    g.scale(1.0 / (hi - lo) as f64);
    g.sub_assign(&Matrix::identity(rows.cols()));
    g.symmetrize();
    sym_spectral_norm(&g)
}

/// Default `x_k`: unit vectors from a stream shared by every trial.
pub fn default_x_vectors(n: usize, q: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::stream(rng::derive_seed(seed, &[X_VECTOR_TAG]), rng::AUX_STREAM);
    (0..q)
        .map(|_| {
            let mut x = vec![0.0; n];
            rng::unit_vector(&mut r, &mut x);
            x
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledSpec {
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub scales: Vec<f64>,
    pub x_vectors: Option<Vec<Vec<f64>>>,
    pub seed: u64,
}

impl PooledSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.q == 0 || self.m == 0 {
            return Err(Error::invalid("n, q and m must be at least 1"));
        }
        if self.scales.len() != self.q {
            return Err(Error::invalid("need exactly q scales"));
        }
        if let Some(xs) = &self.x_vectors {
            if xs.len() != self.q || xs.iter().any(|x| x.len() != self.n) {
                return Err(Error::invalid("need q vectors x_k of length n"));
            }
        }
        Ok(())
    }

    /// Soft diagnostics; `q > n²` only weakens the log q <= 2 log n step.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.q > self.n.saturating_mul(self.n) {
            w.push(format!("q = {} exceeds n^2 = {}", self.q, self.n * self.n));
        }
        w
    }

    pub fn family(&self) -> Result<FamilySpec> {
        FamilySpec::new(FamilyKind::ScaledGaussian(self.scales.clone()), self.n)
    }

    /// All `m q` measurement vectors `a_{i,k} f_k` in block layout.
    pub fn ensemble(&self) -> Result<RowEnsemble> {
        self.validate()?;
        sample_ensemble(&self.family()?, self.m * self.q, self.seed)
    }

    pub fn x_vectors(&self) -> Vec<Vec<f64>> {
        self.x_vectors
            .clone()
            .unwrap_or_else(|| default_x_vectors(self.n, self.q, self.seed))
    }
}

/// `‖(1/mq) Σ_k Σ_i a a' f_k² - (1/q) Σ_k f_k² I‖`.
pub fn compute_btilde(spec: &PooledSpec) -> Result<f64> {
    spectral_norm(&deviation_matrix(&spec.ensemble()?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledComparison {
    pub btilde: f64,
    /// `(1/q) Σ_k ‖(1/m) Σ_i a a' - I‖ f_k²`.
    pub naive_bound: f64,
    pub per_block: Vec<f64>,
}

impl PooledComparison {
    /// The triangle inequality, with room for the rounding of two eigensolves.
    pub fn holds(&self) -> bool {
        self.btilde <= self.naive_bound * (1.0 + 1e-12) + 1e-14
    }
}

/// `b̃` next to the blockwise upper bound, on the same Gaussian draws.
pub fn pooled_vs_naive(spec: &PooledSpec) -> Result<PooledComparison> {
    let btilde = compute_btilde(spec)?;
    let raw = sample_ensemble(&FamilySpec::standard_gaussian(spec.n)?, spec.m * spec.q, spec.seed)?;
    let mut per_block = Vec::with_capacity(spec.q);
    let mut acc = CompensatedSum::default();
    for (k, f) in spec.scales.iter().enumerate() {
        let norm = block_spectral(&raw.rows, k * spec.m, (k + 1) * spec.m)?;
        acc.add(norm * f * f);
        per_block.push(norm);
    }
    Ok(PooledComparison {
        btilde,
        naive_bound: acc.value() / spec.q as f64,
        per_block,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearCheck {
    pub trials: usize,
    /// Failures against `4 eps² K² (‖z1‖² + ‖z2‖²)`.
    pub failures_eps_sq: usize,
    /// Failures against `4 eps K² (‖z1‖² + ‖z2‖²)`.
    pub failures_eps: usize,
    pub p_fail_eps_sq: f64,
    pub p_fail_eps: f64,
    pub threshold_eps_sq: f64,
    pub threshold_eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearConfig {
    pub family: FamilySpec,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub n_rows: usize,
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `|z1' D z2|` against the bound with `eps²` and with `eps`.
pub fn bilinear_bound_check<E: Executor>(config: &BilinearConfig, exec: &E) -> Result<BilinearCheck> {
    let BilinearConfig {
        family,
        z1,
        z2,
        n_rows,
        eps,
        trials,
        seed,
    } = config;
    let (n_rows, eps, trials, seed) = (*n_rows, *eps, *trials, *seed);
    if z1.len() != family.dim || z2.len() != family.dim {
        return Err(Error::invalid("z1 and z2 must have length n"));
    }
    if !(norm_sq(z1) > 0.0 && norm_sq(z2) > 0.0) {
        return Err(Error::invalid("z1 and z2 must be nonzero"));
    }
    if !(eps > 0.0) || trials == 0 {
        return Err(Error::invalid("eps must be > 0 and trials >= 1"));
    }
    let k2 = family.k_bound * family.k_bound;
    let scale = 4.0 * k2 * (norm_sq(z1) + norm_sq(z2));
    let threshold_eps_sq = scale * eps * eps;
    let threshold_eps = scale * eps;
    let stats: Result<Vec<f64>> = exec
        .map_indexed(trials, |t| {
            let ens = sample_ensemble(family, n_rows, rng::derive_seed(seed, &[n_rows as u64, t as u64]))?;
            let v = libm::fabs(bilinear_form(&deviation_matrix(&ens), z1, z2)?);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::numeric("non-finite bilinear statistic", Some(t)))
            }
        })
        .into_iter()
        .collect();
    let stats = stats?;
    let failures_eps_sq = stats.iter().filter(|&&s| s > threshold_eps_sq).count();
    let failures_eps = stats.iter().filter(|&&s| s > threshold_eps).count();
    Ok(BilinearCheck {
        trials,
        failures_eps_sq,
        failures_eps,
        p_fail_eps_sq: failures_eps_sq as f64 / trials as f64,
        p_fail_eps: failures_eps as f64 / trials as f64,
        threshold_eps_sq,
        threshold_eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `b_k <= eps ‖x_k‖²` for every `k`.
    PerVectorQuad,
    /// `‖(1/m) Σ_i a a' - I‖ <= eps` for every `k`.
    PerVectorSpec,
    /// `b̃ <= eps max_k f_k²`.
    PooledSpec,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::PerVectorQuad => "per_vector_quad",
            Regime::PerVectorSpec => "per_vector_spec",
            Regime::PooledSpec => "pooled_spec",
        }
    }
}

impl core::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_vector_quad" => Ok(Regime::PerVectorQuad),
            "per_vector_spec" => Ok(Regime::PerVectorSpec),
            "pooled_spec" => Ok(Regime::PooledSpec),
            other => Err(Error::invalid(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub regime: Regime,
    pub n: usize,
    pub q: usize,
    pub eps_target: f64,
    /// Defaults to `n^-2`.
    pub delta: Option<f64>,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Defaults to all ones.
    pub scales: Option<Vec<f64>>,
    pub x_vectors: Option<Vec<Vec<f64>>>,
}

impl SweepConfig {
    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / (self.n * self.n) as f64)
    }

    pub fn scales(&self) -> Vec<f64> {
        self.scales.clone().unwrap_or_else(|| vec![1.0; self.q])
    }

    fn validate(&self) -> Result<()> {
        if self.m_grid.is_empty() {
            return Err(Error::invalid("m grid must not be empty"));
        }
        if self.m_grid[0] == 0 || self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("m grid must be positive and strictly increasing"));
        }
        let delta = self.delta();
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if self.trials < MIN_SWEEP_TRIALS {
            return Err(Error::invalid("sweeps need at least 200 trials"));
        }
        if !(self.eps_target > 0.0) {
            return Err(Error::invalid("eps_target must be > 0"));
        }
        if self.scales.as_ref().is_some_and(|s| s.len() != self.q) {
            return Err(Error::invalid("need exactly q scales"));
        }
        PooledSpec {
            n: self.n,
            q: self.q,
            m: 1,
            scales: self.scales(),
            x_vectors: self.x_vectors.clone(),
            seed: self.seed,
        }
        .validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub regime: Regime,
    pub n: usize,
    pub q: usize,
    pub grid: Vec<usize>,
    pub successes: Vec<usize>,
    pub success_prob: Vec<f64>,
    pub ci: Vec<(f64, f64)>,
    /// First grid `m` with success at least `1 - delta`; `None` if saturated.
    pub m_star: Option<usize>,
    pub eps_target: f64,
    pub delta: f64,
    pub trials: usize,
    pub warnings: Vec<String>,
}

/// Success of one trial at `m` measurements per vector.
fn sweep_trial(config: &SweepConfig, scales: &[f64], xs: &[Vec<f64>], m: usize, trial: usize) -> Result<bool> {
    let seed = rng::derive_seed(config.seed, &[m as u64, trial as u64]);
    let q = config.q;
    match config.regime {
        Regime::PooledSpec => {
            let spec = PooledSpec {
                n: config.n,
                q,
                m,
                scales: scales.to_vec(),
                x_vectors: None,
                seed,
            };
            let f_max = scales.iter().map(|f| f * f).fold(0.0, f64::max);
            Ok(compute_btilde(&spec)? <= config.eps_target * f_max)
        }
        Regime::PerVectorQuad | Regime::PerVectorSpec => {
            let raw = sample_ensemble(&FamilySpec::standard_gaussian(config.n)?, m * q, seed)?;
            for (k, x) in xs.iter().enumerate() {
                let ok = if config.regime == Regime::PerVectorQuad {
                    block_bk(&raw.rows, k * m, (k + 1) * m, x) <= config.eps_target * norm_sq(x)
                } else {
                    block_spectral(&raw.rows, k * m, (k + 1) * m)? <= config.eps_target
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

pub fn sweep_min_m<E: Executor>(config: &SweepConfig, exec: &E) -> Result<SweepResult> {
    config.validate()?;
    let delta = config.delta();
    let scales = config.scales();
    let xs = config
        .x_vectors
        .clone()
        .unwrap_or_else(|| default_x_vectors(config.n, config.q, config.seed));
    let mut successes = Vec::with_capacity(config.m_grid.len());
    let mut ci = Vec::with_capacity(config.m_grid.len());
    for &m in &config.m_grid {
        let outcomes: Result<Vec<bool>> = exec
            .map_indexed(config.trials, |t| sweep_trial(config, &scales, &xs, m, t))
            .into_iter()
            .collect();
        let s = outcomes?.into_iter().filter(|&ok| ok).count();
        successes.push(s);
        ci.push(wilson_interval(s, config.trials, DEFAULT_CONFIDENCE)?);
    }
    let success_prob: Vec<f64> = successes.iter().map(|&s| s as f64 / config.trials as f64).collect();
    let m_star = config
        .m_grid
        .iter()
        .zip(&success_prob)
        .find(|(_, &p)| p >= 1.0 - delta)
        .map(|(&m, _)| m);
    let warnings = PooledSpec {
        n: config.n,
        q: config.q,
        m: 1,
        scales,
        x_vectors: None,
        seed: config.seed,
    }
    .warnings();
    Ok(SweepResult {
        regime: config.regime,
        n: config.n,
        q: config.q,
        grid: config.m_grid.clone(),
        successes,
        success_prob,
        ci,
        m_star,
        eps_target: config.eps_target,
        delta,
        trials: config.trials,
        warnings,
    })
}
