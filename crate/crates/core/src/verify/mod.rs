//! Numerical checks of the inequalities around the discrete Hilbert
//! transform, driven by a [`RunConfig`] and collected into a [`Report`].
//!
//! A check row records both sides of `lhs <= rhs`; it passes when
//! `lhs <= rhs (1 + 1e-9)`. Stability rows compare a measured constant at
//! a window and at twice that window. Rows tagged observational are
//! reported without being asserted, e.g. exponents on the edge of the
//! admissible range or weights outside the Muckenhoupt class.

pub mod checks;
pub mod config;
pub mod family;
pub mod opnorm;
pub mod report;

pub use config::RunConfig;
pub use report::{Report, Row, SCHEMA_VERSION};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs every enabled check on a pool of `parallelism` threads.
///
/// Rows come back in canonical order, so the report is identical for any
/// thread count.
pub fn sweep(cfg: &RunConfig, parallelism: usize) -> Result<Report> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let jobs = checks::plan(cfg);
    let rows = pool.install(|| {
        jobs.into_par_iter()
            .map(|job| job())
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let mut echo = cfg.clone();
    echo.output = Default::default();
    let echo = serde_json::to_value(&echo).expect("config serializes");
    Ok(Report::new(cfg.seed, echo, rows))
}
