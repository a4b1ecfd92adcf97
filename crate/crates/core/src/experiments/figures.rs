//! The three figure protocols: cat Wigner panels, Fock-superposition Wigner
//! panels, and fidelity curves under efficiency and ratio sweeps.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{comment_block, Engine, ExperimentConfig, Observable, RateConfig, StateConfig, TimeGrid};
use super::curves::{compute_curves, write_curves};
use super::dataset::{grid_csv, write_file, CurveDataset};
use crate::channel::{apply_channel, cat_wigner, state_wigner, ChannelSnapshot, GridSpec, WignerGrid};
use crate::error::{Error, Result};
use crate::feedback::decoherence_time;
use crate::fock::{make_state, FockSpace, C64};

/// One Wigner snapshot at `t = t_multiple * t_dec`, with its own coupling `g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    pub label: String,
    pub t_multiple: f64,
    pub g: f64,
}

impl Panel {
    pub fn new(label: &str, t_multiple: f64, g: f64) -> Self {
        Self { label: label.into(), t_multiple, g }
    }
}

/// Initial state, twice and twenty times `t_dec` with feedback, twice `t_dec` without.
pub fn default_panels() -> Vec<Panel> {
    vec![Panel::new("a", 0.0, -1.0), Panel::new("b", 2.0, -1.0), Panel::new("c", 20.0, -1.0), Panel::new("d", 2.0, 0.0)]
}

fn default_rates() -> RateConfig {
    RateConfig { gamma1: 1.0, ratio: 1e-3, eta: 0.95, g: -1.0 }
}

/// Header record for one Wigner panel.
#[derive(Debug, Clone, Serialize)]
struct GridRun<'a> {
    experiment: &'a str,
    label: &'a str,
    engine: Engine,
    t: f64,
    t_dec: f64,
    envelope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<usize>,
    params: RateConfig,
    state: &'a StateConfig,
    grid: GridSpec,
}

impl GridRun<'_> {
    fn metadata(&self) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))?;
        Ok(comment_block(&body))
    }
}

/// A computed panel and the file it was written to.
#[derive(Debug, Clone)]
pub struct PanelOutput {
    pub label: String,
    pub t: f64,
    pub envelope: f64,
    pub grid: WignerGrid,
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Fig2Options {
    pub alpha0: C64,
    pub phi: f64,
    /// `g` here is ignored; each panel carries its own.
    pub rates: RateConfig,
    /// Defaults to `121 x 121` over `+-(|alpha0| + 2.5)`.
    pub grid: Option<GridSpec>,
    pub panels: Vec<Panel>,
}

impl Default for Fig2Options {
    fn default() -> Self {
        Self { alpha0: C64::new(0.0, 2.0), phi: 0.0, rates: default_rates(), grid: None, panels: default_panels() }
    }
}

/// Cat-state Wigner panels from the closed form.
pub fn run_fig2(opts: &Fig2Options, out_dir: &Path) -> Result<Vec<PanelOutput>> {
    let state = StateConfig::cat(opts.alpha0, opts.phi);
    let spec = state.spec()?;
    let grid = opts.grid.unwrap_or_else(|| GridSpec::square(opts.alpha0.norm() + 2.5, 121));
    grid.validate()?;
    let t_dec = decoherence_time(&opts.rates.params()?, &spec)?;
    opts.panels
        .iter()
        .map(|panel| {
            let rates = RateConfig { g: panel.g, ..opts.rates };
            let t = panel.t_multiple * t_dec;
            let envelope = rates.envelope()?.envelope(t);
            let w = cat_wigner(opts.alpha0, opts.phi, envelope, &grid)?;
            let meta = GridRun {
                experiment: "fig2",
                label: &panel.label,
                engine: Engine::Analytic,
                t,
                t_dec,
                envelope,
                truncation: None,
                params: rates,
                state: &state,
                grid,
            }
            .metadata()?;
            let path = write_file(out_dir, &format!("fig2_{}.csv", panel.label), &grid_csv(&w, &meta))?;
            Ok(PanelOutput { label: panel.label.clone(), t, envelope, grid: w, path })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Fig3Options {
    pub state: StateConfig,
    pub rates: RateConfig,
    /// Defaults to `121 x 121` over `+-4.5`.
    pub grid: Option<GridSpec>,
    pub panels: Vec<Panel>,
    pub truncation: Option<usize>,
}

impl Default for Fig3Options {
    fn default() -> Self {
        Self {
            state: StateConfig::Fock { levels: vec![2, 4], amplitudes: vec![[1.0, 0.0], [2f64.sqrt(), 0.0]] },
            rates: default_rates(),
            grid: None,
            panels: default_panels(),
            truncation: None,
        }
    }
}

/// Wigner panels of an arbitrary state pushed through the attenuation channel.
pub fn run_fig3(opts: &Fig3Options, out_dir: &Path) -> Result<Vec<PanelOutput>> {
    let spec = opts.state.spec()?;
    let space = match opts.truncation {
        Some(d) => FockSpace::new(d)?,
        None => spec.default_space(),
    };
    let grid = opts.grid.unwrap_or_else(|| GridSpec::square(4.5, 121));
    grid.validate()?;
    let rho0 = make_state(&spec, space)?;
    let t_dec = decoherence_time(&opts.rates.params()?, &spec)?;
    opts.panels
        .iter()
        .map(|panel| {
            let rates = RateConfig { g: panel.g, ..opts.rates };
            let t = panel.t_multiple * t_dec;
            let env = rates.envelope()?;
            let envelope = env.envelope(t);
            let rho = apply_channel(&rho0, ChannelSnapshot::at(&env, t)?)?;
            let w = state_wigner(&rho, &grid)?;
            let meta = GridRun {
                experiment: "fig3",
                label: &panel.label,
                engine: Engine::Analytic,
                t,
                t_dec,
                envelope,
                truncation: Some(space.dim()),
                params: rates,
                state: &opts.state,
                grid,
            }
            .metadata()?;
            let path = write_file(out_dir, &format!("fig3_{}.csv", panel.label), &grid_csv(&w, &meta))?;
            Ok(PanelOutput { label: panel.label.clone(), t, envelope, grid: w, path })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Fig4Options {
    pub state: StateConfig,
    pub gamma1: f64,
    pub g: f64,
    /// Panel (a): efficiencies at `ratio_a`.
    pub etas: Vec<f64>,
    pub ratio_a: f64,
    /// Panel (a) no-feedback reference, labelled `g<value>`.
    pub reference_g: Option<f64>,
    /// Panel (b): ratios `gamma1/gamma2` at `eta_b`.
    pub ratios: Vec<f64>,
    pub eta_b: f64,
    pub time: TimeGrid,
    pub engine: Engine,
    pub truncation: Option<usize>,
}

impl Default for Fig4Options {
    fn default() -> Self {
        Self {
            state: StateConfig::cat(C64::new(5.0, 0.0), 0.0),
            gamma1: 1.0,
            g: -1.0,
            etas: vec![1.0, 0.99, 0.97, 0.95, 0.90],
            ratio_a: 1e-3,
            reference_g: Some(0.0),
            ratios: vec![0.0, 1e-3, 1e-2, 1e-1],
            eta_b: 1.0,
            time: TimeGrid::log(400, 1e-4, 1e2),
            engine: Engine::Analytic,
            truncation: None,
        }
    }
}

/// Resolved configs of every curve, panel (a) first.
pub fn fig4_configs(opts: &Fig4Options) -> Result<Vec<ExperimentConfig>> {
    let run = |experiment: &str, label: String, ratio: f64, eta: f64, g: f64| {
        ExperimentConfig::new(
            experiment,
            &label,
            opts.engine,
            vec![Observable::Fidelity],
            RateConfig { gamma1: opts.gamma1, ratio, eta, g },
            opts.state.clone(),
            opts.time.clone(),
            opts.truncation,
        )
    };
    let mut out = vec![];
    for &eta in &opts.etas {
        out.push(run("fig4a", format!("eta{eta}"), opts.ratio_a, eta, opts.g)?);
    }
    if let Some(g0) = opts.reference_g {
        // the envelope does not depend on eta without feedback
        out.push(run("fig4a", format!("g{g0}"), opts.ratio_a, 1.0, g0)?);
    }
    for &ratio in &opts.ratios {
        out.push(run("fig4b", format!("ratio{ratio}"), ratio, opts.eta_b, opts.g)?);
    }
    Ok(out)
}

/// Computes every curve without touching the filesystem.
pub fn fig4_datasets(opts: &Fig4Options) -> Result<Vec<(ExperimentConfig, CurveDataset)>> {
    fig4_configs(opts)?
        .into_iter()
        .map(|cfg| compute_curves(&cfg).map(|d| (cfg, d)))
        .collect()
}

pub fn run_fig4(opts: &Fig4Options, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fig4_configs(opts)?.iter().map(|cfg| write_curves(cfg, out_dir)).collect()
}
