//! Curve datasets: fidelity and photon number against time, from any engine.

use std::path::{Path, PathBuf};

use super::config::{Engine, ExperimentConfig, Observable, SweepConfig};
use super::dataset::{write_file, CurveDataset};
use crate::channel::{clamp_fidelity, fidelity_curve, photon_number_curve};
use crate::error::{Error, Result};
use crate::feedback::{effective_rate, FeedbackParams};
use crate::fock::{make_state, overlap_fidelity, DensityMatrix, FockSpace};
use crate::oracle::{evolve_adiabatic, evolve_joint, EvolutionRecord, IntegratorConfig};

/// Step for the single-mode integrator: `dt * rate * (d - 1) <= 0.1`, and at most `0.05/gamma1`.
pub fn adiabatic_dt(params: &FeedbackParams, space: FockSpace) -> f64 {
    let fastest = effective_rate(params) * space.max_level() as f64;
    let base = 0.05 / params.gamma1();
    if fastest > 0.0 {
        base.min(0.1 / fastest)
    } else {
        base
    }
}

fn record_columns(rec: &EvolutionRecord, rho0: &DensityMatrix, observables: &[Observable]) -> Result<Vec<Vec<f64>>> {
    if !rec.all_within_bounds() {
        return Err(Error::Stability(format!("integrator diagnostics out of bounds: {:?}, step trace {:e}", rec.diagnostics, rec.max_step_trace_deviation)));
    }
    observables
        .iter()
        .map(|o| {
            rec.reduced_states
                .iter()
                .map(|rho| match o {
                    Observable::Fidelity => clamp_fidelity(overlap_fidelity(rho, rho0)?),
                    Observable::PhotonNumber => rho.mean_photon_number(),
                })
                .collect()
        })
        .collect()
}

/// Evaluates every observable of `cfg` on its time grid.
pub fn compute_curves(cfg: &ExperimentConfig) -> Result<CurveDataset> {
    cfg.validate()?;
    let spec = cfg.state.spec()?;
    let space = FockSpace::new(cfg.truncation)?;
    let times = cfg.time.times()?;
    let params = cfg.params.params()?;
    let values = match cfg.engine {
        Engine::Analytic => {
            let env = cfg.params.envelope()?;
            cfg.observables
                .iter()
                .map(|o| match o {
                    Observable::Fidelity => fidelity_curve(&spec, &env, &times, Some(space)),
                    Observable::PhotonNumber => photon_number_curve(&spec, &env, &times, Some(space)),
                })
                .collect::<Result<Vec<_>>>()?
        }
        Engine::Oracle => {
            let rho0 = make_state(&spec, space)?;
            let rec = evolve_joint(&rho0, &params, &IntegratorConfig::for_params(&params, times.clone()))?;
            record_columns(&rec, &rho0, &cfg.observables)?
        }
        Engine::Adiabatic => {
            let rho0 = make_state(&spec, space)?;
            let icfg = IntegratorConfig::new(adiabatic_dt(&params, space), times.clone());
            let rec = evolve_adiabatic(&rho0, &params, &icfg)?;
            record_columns(&rec, &rho0, &cfg.observables)?
        }
    };
    let data = CurveDataset {
        label: cfg.label.clone(),
        columns: cfg.observables.iter().map(|o| o.column().to_string()).collect(),
        t: times,
        values,
        metadata: cfg.metadata()?,
    };
    data.validate()?;
    Ok(data)
}

/// Computes and writes `<experiment>_<label>.csv` into `out_dir`.
pub fn write_curves(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    let data = compute_curves(cfg)?;
    write_file(out_dir, &cfg.file_name(), &data.to_csv())
}

/// Runs every point of a sweep file. An empty product writes nothing and succeeds.
pub fn run_sweep(config_path: &Path, out_dir: &Path, truncation: Option<usize>) -> Result<Vec<PathBuf>> {
    let sweep = SweepConfig::from_path(config_path)?;
    let runs = sweep.expand(truncation)?;
    if runs.is_empty() {
        log::warn!("sweep `{}`: parameter product is empty, no files written", sweep.name);
        return Ok(vec![]);
    }
    runs.iter().map(|cfg| write_curves(cfg, out_dir)).collect()
}
