//! Exact reduced dynamics of the source mode.
//!
//! With vacuum inputs and the driven mode starting in vacuum, the source mode
//! evolves through a pure-loss (attenuation) channel whose amplitude
//! transmissivity is the decay envelope `F(t)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::DecayEnvelope;
use crate::fock::{make_state, overlap_fidelity, DensityMatrix, FockSpace, Modes, StateSpec, WignerEvaluator, C64};

/// Envelope value at one instant together with the energy transmissivity `F^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSnapshot {
    envelope_value: f64,
    transmissivity: f64,
}

impl ChannelSnapshot {
    /// `|F| <= 1` is required; a negative `F` adds a phase flip `exp(i pi n)`.
    pub fn new(envelope_value: f64) -> Result<Self> {
        if !envelope_value.is_finite() || envelope_value.abs() > 1.0 + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "envelope value {envelope_value} outside [-1, 1]"
            )));
        }
        let f = envelope_value.clamp(-1.0, 1.0);
        Ok(Self { envelope_value: f, transmissivity: f * f })
    }

    pub fn at(env: &DecayEnvelope, t: f64) -> Result<Self> {
        Self::new(env.envelope(t))
    }

    pub fn envelope_value(&self) -> f64 {
        self.envelope_value
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        out.push(out[k - 1] + (k as f64).ln());
    }
    out
}

/// `sum_k E_k rho E_k†` with `E_k = sqrt((1-tau)^k / k!) tau^{n/2} a^k`.
pub fn apply_channel(rho0: &DensityMatrix, snap: ChannelSnapshot) -> Result<DensityMatrix> {
    let space = rho0
        .space()
        .ok_or_else(|| Error::Shape("attenuation channel acts on a single mode".into()))?;
    let d = space.dim();
    let tau = snap.transmissivity;
    let flip = snap.envelope_value < 0.0;
    let m0 = rho0.matrix();
    let out = if tau == 1.0 {
        m0.clone()
    } else if tau == 0.0 {
        let mut m = DMatrix::zeros(d, d);
        m[(0, 0)] = m0.trace();
        m
    } else {
        let lf = ln_factorials(2 * d);
        let (ln_tau, ln_loss) = (tau.ln(), (1.0 - tau).ln());
        // ln sqrt(C(n+k, k))
        let half_ln_binom = |n: usize, k: usize| 0.5 * (lf[n + k] - lf[n] - lf[k]);
        DMatrix::from_fn(d, d, |n, m| {
            let kmax = d - n.max(m);
            let mut s = C64::new(0.0, 0.0);
            for k in 0..kmax {
                let w = (0.5 * (n + m) as f64 * ln_tau
                    + k as f64 * ln_loss
                    + half_ln_binom(n, k)
                    + half_ln_binom(m, k))
                .exp();
                s += m0[(n + k, m + k)] * w;
            }
            if flip && (n + m) % 2 == 1 {
                -s
            } else {
                s
            }
        })
    };
    let rho = DensityMatrix::from_parts(Modes::Single(space), out)?;
    let drift = (rho.trace() - rho0.trace()).norm();
    if drift > 1e-10 {
        return Err(Error::Numerical(format!("channel changed the trace by {drift:e}")));
    }
    Ok(rho)
}

/// Which cross-term phase to use in the closed-form cat Wigner function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossPhase {
    /// `cos(4 F (x ^ a0) - phi)`: the form produced by the attenuation channel.
    EnvelopeScaled,
    /// `cos(4 (x ^ a0) - phi)`, without the envelope; kept for arbitration runs.
    Unscaled,
}

/// Closed-form Wigner function of the evolved cat `|a0> + e^{i phi}|-a0>` at `x`.
pub fn cat_wigner_value(alpha0: C64, phi: f64, envelope_value: f64, x: C64, phase: CrossPhase) -> f64 {
    let f = envelope_value;
    let shifted = alpha0 * f;
    let a2 = alpha0.norm_sqr();
    let norm = PI * (1.0 + (-2.0 * a2).exp() * phi.cos());
    let lobe_p = (-2.0 * (x - shifted).norm_sqr()).exp();
    let lobe_m = (-2.0 * (x + shifted).norm_sqr()).exp();
    // (x ^ a0) . z
    let wedge = x.re * alpha0.im - x.im * alpha0.re;
    let arg = match phase {
        CrossPhase::EnvelopeScaled => 4.0 * f * wedge - phi,
        CrossPhase::Unscaled => 4.0 * wedge - phi,
    };
    let fringe = 2.0 * (-2.0 * (x.norm_sqr() - shifted.norm_sqr() + a2)).exp() * arg.cos();
    (lobe_p + lobe_m + fringe) / norm
}

/// Rectangular phase-space sampling, `Re alpha` along x and `Im alpha` along y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Square grid over `[-half_width, half_width]^2`.
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, y_min: -half_width, y_max: half_width, nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::Config(format!("grid bounds not ordered: {self:?}")));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config("grid needs at least 2 samples per axis".into()));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.x(i), self.y(j))
    }

    /// Largest `|alpha|` on the grid.
    pub fn max_radius(&self) -> f64 {
        let xm = self.x_min.abs().max(self.x_max.abs());
        let ym = self.y_min.abs().max(self.y_max.abs());
        xm.hypot(ym)
    }

    pub fn cell_area(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64 * (self.y_max - self.y_min) / (self.ny - 1) as f64
    }
}

/// Real Wigner samples on a [`GridSpec`], stored row by row (`j` outer, `i` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

impl WignerGrid {
    /// Every point is evaluated independently, so results do not depend on scheduling.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(C64) -> Result<f64> + Sync,
    {
        spec.validate()?;
        let rows: Vec<Vec<f64>> = (0..spec.ny)
            .into_par_iter()
            .map(|j| (0..spec.nx).map(|i| f(spec.point(i, j))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite Wigner sample {bad}")));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// Riemann sum of the samples times the cell area.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form cat Wigner function on a grid.
pub fn cat_wigner(alpha0: C64, phi: f64, envelope_value: f64, grid: &GridSpec) -> Result<WignerGrid> {
    cat_wigner_with(alpha0, phi, envelope_value, grid, CrossPhase::EnvelopeScaled)
}

pub fn cat_wigner_with(
    alpha0: C64,
    phi: f64,
    envelope_value: f64,
    grid: &GridSpec,
    phase: CrossPhase,
) -> Result<WignerGrid> {
    if !(0.0..=1.0).contains(&envelope_value) {
        return Err(Error::InvalidParams(format!("envelope value {envelope_value} outside [0, 1]")));
    }
    WignerGrid::from_fn(*grid, |x| Ok(cat_wigner_value(alpha0, phi, envelope_value, x, phase)))
}

/// Displaced-parity Wigner function of a truncated state on a grid.
pub fn state_wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    let space = rho
        .space()
        .ok_or_else(|| Error::Shape("Wigner grid needs a single-mode state".into()))?;
    let eval = WignerEvaluator::new(space, grid.max_radius())?;
    WignerGrid::from_fn(*grid, |x| eval.eval(rho, x))
}

/// How the second argument of the first R factor in the fidelity integral is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityReading {
    /// `(1 - F^2) b + F a`, which reproduces the channel path.
    Balanced,
    /// `1 - F^2 b + F a`, the literal token order of the unbalanced expression.
    Literal,
}

/// Overlap fidelity `tr[rho(t) rho(0)]` for a coherent superposition, by
/// Gaussian integration of the R-function fidelity integral.
pub fn fidelity_closed_form_coherent_superposition(spec: &StateSpec, envelope_value: f64) -> Result<f64> {
    let val = fidelity_integral(spec, envelope_value, FidelityReading::Balanced)?;
    if val.im.abs() > 1e-9 * val.norm().max(1.0) {
        return Err(Error::Numerical(format!("closed-form fidelity has imaginary part {:e}", val.im)));
    }
    Ok(val.re)
}

/// The fidelity integral evaluated in closed form under either reading.
/// Only the balanced reading is guaranteed to be real.
pub fn fidelity_integral(spec: &StateSpec, envelope_value: f64, reading: FidelityReading) -> Result<C64> {
    let StateSpec::CoherentSuperposition(terms) = spec else {
        return Err(Error::WrongVariant { expected: "coherent-superposition" });
    };
    spec.validate()?;
    let f = envelope_value;
    // Second argument of the first R factor: p b + q a + c.
    let (p, q, c) = match reading {
        FidelityReading::Balanced => (1.0 - f * f, f, 0.0),
        FidelityReading::Literal => (-f * f, f, 1.0),
    };
    // With R(b*, x) = sum c_j c_k* exp(b* a_j + a_k* x - (|a_j|^2 + |a_k|^2)/2), the
    // integral over a gives exp(q a_k* a_p) and over b gives exp(a_j (p a_k* + F a_q*)).
    let mut s = C64::new(0.0, 0.0);
    for &(cj, aj) in terms {
        for &(ck, ak) in terms {
            for &(cp, ap) in terms {
                for &(cq, aq) in terms {
                    let quad = -(aj.norm_sqr() + ak.norm_sqr() + ap.norm_sqr() + aq.norm_sqr()) / 2.0;
                    let expo = quad
                        + ak.conj() * c
                        + q * ak.conj() * ap
                        + aj * (p * ak.conj() + f * aq.conj());
                    s += cj * ck.conj() * cp * cq.conj() * expo.exp();
                }
            }
        }
    }
    let n2 = spec.norm_sqr();
    Ok(s / (n2 * n2))
}

pub(crate) fn clamp_fidelity(f: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&f) {
        return Err(Error::Numerical(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `F(t_i) = tr[rho(t_i) rho(0)]` along the attenuation channel.
///
/// `space` overrides the default truncation of `spec`.
pub fn fidelity_curve(
    spec: &StateSpec,
    env: &DecayEnvelope,
    times: &[f64],
    space: Option<FockSpace>,
) -> Result<Vec<f64>> {
    check_times(times)?;
    let rho0 = make_state(spec, space.unwrap_or_else(|| spec.default_space()))?;
    times
        .par_iter()
        .map(|&t| {
            let rho = apply_channel(&rho0, ChannelSnapshot::at(env, t)?)?;
            clamp_fidelity(overlap_fidelity(&rho, &rho0)?)
        })
        .collect()
}

/// `<a†a>(t_i)` along the attenuation channel.
pub fn photon_number_curve(
    spec: &StateSpec,
    env: &DecayEnvelope,
    times: &[f64],
    space: Option<FockSpace>,
) -> Result<Vec<f64>> {
    check_times(times)?;
    let rho0 = make_state(spec, space.unwrap_or_else(|| spec.default_space()))?;
    times
        .par_iter()
        .map(|&t| apply_channel(&rho0, ChannelSnapshot::at(env, t)?)?.mean_photon_number())
        .collect()
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::Config("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("times must be sorted".into()));
    }
    Ok(())
}
