//! Experiment configuration: the TOML schema read by `sweep`, and the fully
//! resolved single-run record embedded in every dataset header.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::{DecayEnvelope, FeedbackParams};
use crate::fock::{FockSpace, StateSpec, C64};

/// Mean photon number above which the two-mode oracle is refused.
pub const ORACLE_MAX_MEAN_PHOTONS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Attenuation channel with the exact envelope.
    #[default]
    Analytic,
    /// RK4 integration of the two-mode master equation.
    Oracle,
    /// RK4 integration of the single-mode renormalized-loss equation.
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Fidelity,
    PhotonNumber,
}

impl Observable {
    pub fn column(&self) -> &'static str {
        match self {
            Observable::Fidelity => "fidelity",
            Observable::PhotonNumber => "photon_number",
        }
    }
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Fidelity]
}

/// Rates as `(gamma1, gamma1/gamma2, eta, g)`. `ratio = 0` is the adiabatic limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub gamma1: f64,
    pub ratio: f64,
    pub eta: f64,
    pub g: f64,
}

impl RateConfig {
    pub fn params(&self) -> Result<FeedbackParams> {
        FeedbackParams::from_ratio(self.gamma1, self.ratio, self.eta, self.g)
    }

    /// Exact envelope, or the adiabatic one when `gamma2` is infinite.
    pub fn envelope(&self) -> Result<DecayEnvelope> {
        let p = self.params()?;
        Ok(if self.ratio == 0.0 { DecayEnvelope::adiabatic(p) } else { DecayEnvelope::new(p) })
    }
}

/// Serializable mirror of [`StateSpec`]. Complex numbers are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Cat {
        alpha0: [f64; 2],
        #[serde(default)]
        phi: f64,
    },
    Coherent {
        alpha: [f64; 2],
    },
    Fock {
        levels: Vec<usize>,
        amplitudes: Vec<[f64; 2]>,
    },
}

impl StateConfig {
    pub fn cat(alpha0: C64, phi: f64) -> Self {
        StateConfig::Cat { alpha0: [alpha0.re, alpha0.im], phi }
    }

    pub fn spec(&self) -> Result<StateSpec> {
        let spec = match self {
            StateConfig::Cat { alpha0, phi } => StateSpec::cat(C64::new(alpha0[0], alpha0[1]), *phi),
            StateConfig::Coherent { alpha } => StateSpec::coherent(C64::new(alpha[0], alpha[1])),
            StateConfig::Fock { levels, amplitudes } => {
                if levels.len() != amplitudes.len() {
                    return Err(Error::Config(format!(
                        "state.amplitudes: {} entries for {} levels",
                        amplitudes.len(),
                        levels.len()
                    )));
                }
                StateSpec::FockSuperposition(
                    amplitudes.iter().zip(levels).map(|(a, &n)| (C64::new(a[0], a[1]), n)).collect(),
                )
            }
        };
        spec.validate().map_err(|e| Error::Config(format!("state: {e}")))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Time axis as written in a config file; see [`RawTime::resolve`] for defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTime {
    pub points: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub spacing: Option<Spacing>,
    pub prepend_zero: Option<bool>,
}

impl RawTime {
    /// Either an explicit `points` list, or `count` + `t_max` with
    /// `spacing = linear` (default, `t_min = 0`) or `log` (`t_min = 1e-6 t_max`).
    /// `prepend_zero` defaults to true for log spacing so curves start at `t = 0`.
    pub fn resolve(&self) -> Result<TimeGrid> {
        if let Some(points) = &self.points {
            if self.count.is_some() || self.t_min.is_some() || self.t_max.is_some() || self.spacing.is_some() {
                return Err(Error::Config("time: `points` excludes count/t_min/t_max/spacing".into()));
            }
            let grid = TimeGrid::Points { points: points.clone() };
            grid.times()?;
            return Ok(grid);
        }
        let count = self.count.ok_or_else(|| Error::Config("time.count: required without `points`".into()))?;
        let t_max = self.t_max.ok_or_else(|| Error::Config("time.t_max: required without `points`".into()))?;
        let spacing = self.spacing.unwrap_or(Spacing::Linear);
        let t_min = self.t_min.unwrap_or(match spacing {
            Spacing::Linear => 0.0,
            Spacing::Log => 1e-6 * t_max,
        });
        let grid = TimeGrid::Range {
            count,
            t_min,
            t_max,
            spacing,
            prepend_zero: self.prepend_zero.unwrap_or(spacing == Spacing::Log),
        };
        grid.times()?;
        Ok(grid)
    }
}

/// Fully resolved time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    Points { points: Vec<f64> },
    Range { count: usize, t_min: f64, t_max: f64, spacing: Spacing, prepend_zero: bool },
}

impl TimeGrid {
    pub fn log(count: usize, t_min: f64, t_max: f64) -> Self {
        TimeGrid::Range { count, t_min, t_max, spacing: Spacing::Log, prepend_zero: true }
    }

    /// Sample times, checked to be finite, nonnegative and strictly increasing.
    pub fn times(&self) -> Result<Vec<f64>> {
        let times = match self {
            TimeGrid::Points { points } => points.clone(),
            &TimeGrid::Range { count, t_min, t_max, spacing, prepend_zero } => {
                if count == 0 {
                    return Err(Error::Config("time.count: must be positive".into()));
                }
                if !(t_max >= t_min) || !(t_min >= 0.0) {
                    return Err(Error::Config(format!("time: need 0 <= t_min <= t_max, got [{t_min}, {t_max}]")));
                }
                let frac = |i: usize| if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                let mut ts: Vec<f64> = match spacing {
                    Spacing::Linear => (0..count).map(|i| t_min + (t_max - t_min) * frac(i)).collect(),
                    Spacing::Log => {
                        if t_min <= 0.0 {
                            return Err(Error::Config("time.t_min: must be positive for log spacing".into()));
                        }
                        let (a, b) = (t_min.log10(), t_max.log10());
                        (0..count).map(|i| 10f64.powf(a + (b - a) * frac(i))).collect()
                    }
                };
                if prepend_zero && ts[0] > 0.0 {
                    ts.insert(0, 0.0);
                }
                ts
            }
        };
        if times.is_empty() {
            return Err(Error::Config("time: no sample times".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Config("time: samples must be finite and nonnegative".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("time: samples must be strictly increasing".into()));
        }
        Ok(times)
    }
}

/// One fully resolved curve run. Serialized verbatim into the dataset header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub label: String,
    pub engine: Engine,
    pub observables: Vec<Observable>,
    /// Source-mode Fock dimension.
    pub truncation: usize,
    pub params: RateConfig,
    pub state: StateConfig,
    pub time: TimeGrid,
}

impl ExperimentConfig {
    /// Fills in the truncation from the state when not given.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: &str,
        label: &str,
        engine: Engine,
        observables: Vec<Observable>,
        params: RateConfig,
        state: StateConfig,
        time: TimeGrid,
        truncation: Option<usize>,
    ) -> Result<Self> {
        let spec = state.spec()?;
        let truncation = truncation.unwrap_or_else(|| spec.default_space().dim());
        let cfg = Self {
            experiment: experiment.to_string(),
            label: label.to_string(),
            engine,
            observables,
            truncation,
            params,
            state,
            time,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.observables.is_empty() {
            return Err(Error::Config("observables: at least one required".into()));
        }
        self.params.params().map_err(|e| Error::Config(format!("params: {e}")))?;
        let spec = self.state.spec()?;
        FockSpace::new(self.truncation).map_err(|e| Error::Config(format!("truncation: {e}")))?;
        self.time.times()?;
        if self.engine == Engine::Oracle {
            let nbar = spec.mean_photon_number();
            if nbar > ORACLE_MAX_MEAN_PHOTONS {
                return Err(Error::Config(format!(
                    "engine=oracle is limited to mean photon number <= {ORACLE_MAX_MEAN_PHOTONS}; state has {nbar:.6}"
                )));
            }
            if self.params.ratio == 0.0 {
                return Err(Error::Config("engine=oracle needs a finite gamma2 (params.ratio > 0)".into()));
            }
        }
        Ok(())
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.csv", self.experiment, self.label)
    }

    /// `#`-prefixed TOML rendering of the whole config.
    pub fn metadata(&self) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))?;
        Ok(comment_block(&body))
    }
}

pub(crate) fn comment_block(body: &str) -> String {
    body.lines().filter(|l| !l.trim().is_empty()).map(|l| format!("# {l}\n")).collect()
}

/// A scalar or a list of values to sweep.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    fn as_slice(&self) -> &[f64] {
        match self {
            Values::One(v) => std::slice::from_ref(v),
            Values::Many(v) => v,
        }
    }

    fn swept(&self) -> bool {
        matches!(self, Values::Many(_))
    }
}

fn one() -> Values {
    Values::One(1.0)
}

fn minus_one() -> Values {
    Values::One(-1.0)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamLists {
    #[serde(default = "one")]
    pub gamma1: Values,
    pub ratio: Values,
    #[serde(default = "one")]
    pub eta: Values,
    #[serde(default = "minus_one")]
    pub g: Values,
}

/// Contents of a `sweep --config` file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    pub truncation: Option<usize>,
    pub params: ParamLists,
    pub state: StateConfig,
    pub time: RawTime,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        if cfg.name.is_empty() || cfg.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("name: `{}` is not a usable file prefix", cfg.name)));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Cartesian product of the parameter lists, in a fixed order. Keys given
    /// as lists form the label, sorted by key name (`eta`, `g`, `gamma1`, `ratio`).
    pub fn expand(&self, truncation_override: Option<usize>) -> Result<Vec<ExperimentConfig>> {
        let p = &self.params;
        let keys: [(&str, &Values); 4] = [("eta", &p.eta), ("g", &p.g), ("gamma1", &p.gamma1), ("ratio", &p.ratio)];
        let time = self.time.resolve()?;
        let truncation = truncation_override.or(self.truncation);
        let mut combos: Vec<Vec<f64>> = vec![vec![]];
        for (_, vals) in &keys {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    vals.as_slice().iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .map(|c| {
                let label: Vec<String> = keys
                    .iter()
                    .zip(&c)
                    .filter(|((_, vals), _)| vals.swept())
                    .map(|((k, _), v)| format!("{k}{v}"))
                    .collect();
                let label = if label.is_empty() { "base".to_string() } else { label.join("_") };
                let rates = RateConfig { eta: c[0], g: c[1], gamma1: c[2], ratio: c[3] };
                ExperimentConfig::new(
                    &self.name,
                    &label,
                    self.engine,
                    self.observables.clone(),
                    rates,
                    self.state.clone(),
                    time.clone(),
                    truncation,
                )
                .map_err(|e| Error::Config(format!("{label}: {}", strip_prefix(e))))
            })
            .collect()
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
name = "demo"
observables = ["fidelity", "photon_number"]

[params]
ratio = 1e-3
eta = [1.0, 0.95]
g = [-1.0, 0.0]

[state]
kind = "cat"
alpha0 = [2.0, 0.0]

[time]
count = 5
t_max = 10.0
"#;

    #[test]
    fn sweep_expands_in_sorted_order() {
        let cfg = SweepConfig::from_toml_str(SWEEP).unwrap();
        let runs = cfg.expand(None).unwrap();
        let names: Vec<_> = runs.iter().map(|r| r.file_name()).collect();
        assert_eq!(
            names,
            ["demo_eta1_g-1.csv", "demo_eta1_g0.csv", "demo_eta0.95_g-1.csv", "demo_eta0.95_g0.csv"]
        );
        assert_eq!(runs[0].time.times().unwrap(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(runs[0].truncation, StateSpec::cat(C64::new(2.0, 0.0), 0.0).default_space().dim());
    }

    #[test]
    fn metadata_round_trips() {
        let run = SweepConfig::from_toml_str(SWEEP).unwrap().expand(Some(30)).unwrap().remove(0);
        let meta = run.metadata().unwrap();
        assert!(meta.lines().all(|l| l.starts_with("# ")));
        let body: String = meta.lines().map(|l| format!("{}\n", &l[2..])).collect();
        let back: ExperimentConfig = toml::from_str(&body).unwrap();
        assert_eq!(back, run);
        assert_eq!(back.truncation, 30);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let bad = SWEEP.replace("ratio = 1e-3", "ratio = 1e-3\nrato = 2");
        let err = SweepConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("rato") && err.contains("line"), "{err}");
        let bad = SWEEP.replace("kind = \"cat\"", "kind = \"cat\"\nalpha = [1.0, 0.0]");
        assert!(SweepConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn invalid_values_name_the_field() {
        let bad = SWEEP.replace("eta = [1.0, 0.95]", "eta = [1.5]");
        let err = SweepConfig::from_toml_str(&bad).unwrap().expand(None).unwrap_err().to_string();
        assert!(err.contains("params") && err.contains("eta1.5"), "{err}");
        let bad = SWEEP.replace("count = 5", "");
        let err = SweepConfig::from_toml_str(&bad).unwrap().expand(None).unwrap_err().to_string();
        assert!(err.contains("time.count"), "{err}");
    }

    #[test]
    fn empty_list_gives_no_runs() {
        let cfg = SweepConfig::from_toml_str(&SWEEP.replace("eta = [1.0, 0.95]", "eta = []")).unwrap();
        assert!(cfg.expand(None).unwrap().is_empty());
    }

    #[test]
    fn oracle_guard_on_photon_number() {
        let cfg = SWEEP.replace("name = \"demo\"", "name = \"demo\"\nengine = \"oracle\"").replace("[2.0, 0.0]", "[5.0, 0.0]");
        let err = SweepConfig::from_toml_str(&cfg).unwrap().expand(None).unwrap_err().to_string();
        assert!(err.contains("mean photon number <= 6"), "{err}");
    }

    #[test]
    fn log_grid_starts_at_zero() {
        let t = TimeGrid::log(400, 1e-4, 1e2).times().unwrap();
        assert_eq!(t.len(), 401);
        assert_eq!(t[0], 0.0);
        assert!((t[1] - 1e-4).abs() < 1e-18 && (t[400] - 100.0).abs() < 1e-10);
    }

    #[test]
    fn fock_state_config() {
        let s = StateConfig::Fock { levels: vec![2, 4], amplitudes: vec![[1.0, 0.0], [2f64.sqrt(), 0.0]] };
        assert_eq!(s.spec().unwrap(), StateSpec::fock_two_four());
        let s = StateConfig::Fock { levels: vec![2], amplitudes: vec![] };
        assert!(s.spec().is_err());
    }
}
