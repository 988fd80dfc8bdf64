//! Concentration of sums of outer products of independent sub-Gaussian rows.
//!
//! The crate is `no_std` (it needs `alloc`) and carries every numerical piece
//! of the laboratory: row samplers with analytic second moments, moment-based
//! sub-Gaussian / sub-exponential norm estimators, randomized ε-nets on the
//! unit sphere, the deviation matrix
//! `D = (1/N) Σ w_j w_j' - (1/N) Σ E[w_j w_j']` with its spectral summaries,
//! Monte Carlo failure-probability experiments and the sample-complexity
//! sweeps built on top of them.
//!
//! File formats, configuration and the thread pool live in the `subgauss-lab`
//! companion crate; parallel work is injected here through [`exec::Executor`].
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod applications;
pub mod deviation;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod montecarlo;
pub mod nets;
pub mod norms;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use linalg::Matrix;
