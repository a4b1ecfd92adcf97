//! Experiment runners behind the command-line tool: figure datasets,
//! parameter sweeps and the validation suite.

pub mod config;
pub mod curves;
pub mod dataset;
pub mod figures;
pub mod validate;

pub use config::{Engine, ExperimentConfig, Observable, RateConfig, StateConfig, SweepConfig, TimeGrid};
pub use curves::{compute_curves, run_sweep, write_curves};
pub use dataset::{format_number, CurveDataset, Table};
pub use figures::{
    fig4_configs, fig4_datasets, run_fig2, run_fig3, run_fig4, Fig2Options, Fig3Options, Fig4Options, Panel,
};
pub use validate::{run_validate, ValidationReport};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers, or the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}"))),
    }
}
