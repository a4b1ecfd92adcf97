//! Loop parameters and the decay envelope `F(t)` of the source-mode amplitude.
//!
//! With a vacuum-initialized driven mode the reduced source dynamics depends
//! on the rates only through `F(t)`:
//!
//! ```text
//! F(t) = (m + g1 - g2)/(2m) exp(-(g1 + g2 + m) t/4)
//!      + (m - g1 + g2)/(2m) exp(-(g1 + g2 - m) t/4)
//! m^2  = (g1 - g2)^2 - 4 g1 g2 eta^2 (2 + g) g
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::StateSpec;

/// Rates of the two-mode loop. `g` is the dimensionless mode-conversion coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    gamma1p: f64,
    gamma2p: f64,
    eta1: f64,
    eta2: f64,
    g: f64,
}

impl FeedbackParams {
    /// `gamma1p`, `gamma2p`: decay into the cascade channel; `eta1`, `eta2`:
    /// unwanted losses of the source and driven mode.
    pub fn new(gamma1p: f64, gamma2p: f64, eta1: f64, eta2: f64, g: f64) -> Result<Self> {
        let rates = [gamma1p, gamma2p, eta1, eta2];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) || !g.is_finite() {
            return Err(Error::InvalidParams(format!(
                "rates must be finite and nonnegative, got {rates:?}, g = {g}"
            )));
        }
        if gamma1p + eta1 <= 0.0 {
            return Err(Error::InvalidParams("source mode must decay (gamma1 > 0)".into()));
        }
        Ok(Self { gamma1p, gamma2p, eta1, eta2, g })
    }

    /// Rates from `(gamma1, gamma1/gamma2, eta, g)` with losses split
    /// symmetrically: `gamma_i' = eta gamma_i`, `eta_i = (1 - eta) gamma_i`.
    ///
    /// A ratio of 0 stands for the adiabatic limit; the driven rates are then
    /// set equal to the source rates and must be paired with
    /// [`DecayEnvelope::adiabatic`], which ignores them.
    pub fn from_ratio(gamma1: f64, ratio: f64, eta: f64, g: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParams(format!("efficiency {eta} outside [0, 1]")));
        }
        if !(ratio >= 0.0) || !ratio.is_finite() {
            return Err(Error::InvalidParams(format!("rate ratio {ratio} must be >= 0")));
        }
        if !(gamma1 > 0.0) {
            return Err(Error::InvalidParams(format!("gamma1 = {gamma1} must be > 0")));
        }
        let gamma2 = if ratio == 0.0 { gamma1 } else { gamma1 / ratio };
        Self::new(eta * gamma1, eta * gamma2, (1.0 - eta) * gamma1, (1.0 - eta) * gamma2, g)
    }

    pub fn gamma1p(&self) -> f64 {
        self.gamma1p
    }
    pub fn gamma2p(&self) -> f64 {
        self.gamma2p
    }
    pub fn eta1(&self) -> f64 {
        self.eta1
    }
    pub fn eta2(&self) -> f64 {
        self.eta2
    }
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Total source decay rate.
    pub fn gamma1(&self) -> f64 {
        self.gamma1p + self.eta1
    }

    /// Total driven decay rate.
    pub fn gamma2(&self) -> f64 {
        self.gamma2p + self.eta2
    }

    /// `sqrt(gamma1' gamma2')`, the cascade coupling rate.
    pub fn cascade_rate(&self) -> f64 {
        (self.gamma1p * self.gamma2p).sqrt()
    }

    /// `eta = sqrt(gamma1' gamma2' / (gamma1 gamma2))`, 0 when the driven mode does not decay.
    pub fn efficiency(&self) -> f64 {
        let denom = self.gamma1() * self.gamma2();
        if denom == 0.0 {
            0.0
        } else {
            (self.gamma1p * self.gamma2p / denom).sqrt()
        }
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }
}

/// Renormalized source decay rate `gamma1 [1 + g (2 + g) eta^2]`.
pub fn effective_rate(params: &FeedbackParams) -> f64 {
    let eta = params.efficiency();
    params.gamma1() * (1.0 + params.g * (2.0 + params.g) * eta * eta)
}

/// Coupling that minimizes the effective rate: `g (2 + g)` is smallest at -1.
pub fn optimal_coupling() -> f64 {
    -1.0
}

/// Evaluator of `F(t)`, either exact or in the adiabatic limit `gamma2 -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    params: FeedbackParams,
    m: Complex64,
    adiabatic: bool,
}

/// `|m|` below this fraction of `gamma1 + gamma2` uses the double-root formula.
const DEGENERATE_M: f64 = 1e-9;

impl DecayEnvelope {
    pub fn new(params: FeedbackParams) -> Self {
        Self { params, m: discriminant(&params), adiabatic: false }
    }

    pub fn adiabatic(params: FeedbackParams) -> Self {
        Self { params, m: discriminant(&params), adiabatic: true }
    }

    pub fn params(&self) -> &FeedbackParams {
        &self.params
    }

    pub fn is_adiabatic(&self) -> bool {
        self.adiabatic
    }

    /// Complex `m`; purely imaginary when the envelope oscillates.
    pub fn m(&self) -> Complex64 {
        self.m
    }

    /// `F(t)` in complex arithmetic, before taking the real part.
    pub fn envelope_complex(&self, t: f64) -> Complex64 {
        let p = &self.params;
        let (g1, g2) = (p.gamma1(), p.gamma2());
        if self.adiabatic {
            return Complex64::new((-effective_rate(p) * t / 2.0).exp(), 0.0);
        }
        let sum = g1 + g2;
        if self.m.norm() < DEGENERATE_M * sum {
            return Complex64::new((-sum * t / 4.0).exp() * (1.0 + (g2 - g1) * t / 4.0), 0.0);
        }
        let m = self.m;
        let fast = (m + g1 - g2) / (2.0 * m) * (-(m + sum) * t / 4.0).exp();
        let slow = (m - g1 + g2) / (2.0 * m) * ((m - sum) * t / 4.0).exp();
        fast + slow
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.envelope_complex(t).re
    }
}

fn discriminant(p: &FeedbackParams) -> Complex64 {
    let (g1, g2) = (p.gamma1(), p.gamma2());
    let eta = p.efficiency();
    let m2 = (g1 - g2).powi(2) - 4.0 * g1 * g2 * eta * eta * (2.0 + p.g) * p.g;
    Complex64::new(m2, 0.0).sqrt()
}

pub fn envelope(env: &DecayEnvelope, t: f64) -> f64 {
    env.envelope(t)
}

/// Fringe-suppression time: `1/(2 gamma1 |alpha0|^2)` for a cat, `1/(gamma1 nbar)` otherwise.
pub fn decoherence_time(params: &FeedbackParams, spec: &StateSpec) -> Result<f64> {
    let g1 = params.gamma1();
    if let Some((alpha0, _)) = spec.as_cat() {
        return Ok(1.0 / (2.0 * g1 * alpha0.norm_sqr()));
    }
    let nbar = spec.mean_photon_number();
    if nbar <= 0.0 {
        return Err(Error::DegenerateState("state has no photons to lose".into()));
    }
    Ok(1.0 / (g1 * nbar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ideal(ratio: f64, eta: f64, g: f64) -> FeedbackParams {
        FeedbackParams::from_ratio(1.0, ratio, eta, g).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(FeedbackParams::new(-1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(FeedbackParams::new(0.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(FeedbackParams::new(1.0, 1.0, 0.0, 0.0, f64::NAN).is_err());
        assert!(FeedbackParams::from_ratio(1.0, 1e-3, 1.2, -1.0).is_err());
        let p = ideal(1e-3, 0.95, -1.0);
        assert!((p.efficiency() - 0.95).abs() < 1e-14);
        assert!((p.gamma2() - 1000.0).abs() < 1e-9);
        assert!((ideal(0.1, 0.0, -1.0).efficiency()).abs() < 1e-15);
    }

    #[test]
    fn effective_rate_examples() {
        assert_eq!(effective_rate(&ideal(1e-3, 1.0, -1.0)), 0.0);
        assert_eq!(effective_rate(&ideal(1e-3, 0.7, 0.0)), 1.0);
        assert!((effective_rate(&ideal(1e-3, 0.95, -1.0)) - 0.0975).abs() < 1e-14);
    }

    #[test]
    fn optimal_coupling_is_minimum() {
        assert_eq!(optimal_coupling(), -1.0);
        let base = ideal(1e-2, 0.9, 0.0);
        let at_opt = effective_rate(&base.with_g(-1.0));
        for i in 0..=400 {
            let g = -3.0 + 0.01 * i as f64;
            assert!(at_opt <= effective_rate(&base.with_g(g)) + 1e-15);
        }
        for d in [0.1, 0.5, 1.3] {
            let lo = effective_rate(&base.with_g(-1.0 - d));
            let hi = effective_rate(&base.with_g(-1.0 + d));
            assert!((lo - hi).abs() < 1e-13);
        }
    }

    #[test]
    fn envelope_without_feedback() {
        let env = DecayEnvelope::new(ideal(1e-3, 0.95, 0.0));
        assert!((env.envelope(2.0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!((env.envelope(2.0) - 0.3678794).abs() < 1e-7);
    }

    #[test]
    fn envelope_ideal_loop_limit() {
        let env = DecayEnvelope::new(ideal(0.1, 1.0, -1.0));
        assert!((env.m().re - 11.0).abs() < 1e-12);
        for t in [0.0f64, 0.3, 1.0, 4.0] {
            let want = (-5.5 * t).exp() / 11.0 + 10.0 / 11.0;
            assert!((env.envelope(t) - want).abs() < 1e-14, "t={t}");
        }
        assert!((env.envelope(10.0) - 10.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn adiabatic_freezing() {
        let env = DecayEnvelope::adiabatic(ideal(0.0, 1.0, -1.0));
        for t in [0.0, 1.0, 100.0, 1e6] {
            assert_eq!(env.envelope(t), 1.0);
        }
    }

    #[test]
    fn degenerate_discriminant_matches_nearby() {
        // eta = 0: m = |g1 - g2|, zero at g1 = g2.
        let p = FeedbackParams::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let deg = DecayEnvelope::new(p);
        assert!(deg.m().norm() < 1e-12);
        let near = DecayEnvelope::new(FeedbackParams::new(1.0, 1.0 + 1e-5, 0.0, 0.0, 0.0).unwrap());
        for t in [0.0, 0.5, 2.0, 8.0] {
            assert!((deg.envelope(t) - near.envelope(t)).abs() < 1e-5);
            assert!((deg.envelope(t) - (-t / 2.0f64).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn oscillatory_regime_is_real() {
        for g in [0.5, 1.0, -2.5, -3.0, 4.0] {
            let env = DecayEnvelope::new(ideal(0.2, 0.9, g));
            assert!(env.m().re.abs() < 1e-12 || env.m().im == 0.0);
            for i in 0..200 {
                let z = env.envelope_complex(0.05 * i as f64);
                assert!(z.im.abs() < 1e-12, "g={g}: {z}");
            }
        }
    }

    #[test]
    fn adiabatic_limit_consistency() {
        for eta in [0.9, 0.95, 1.0] {
            let p = ideal(1e-4, eta, -1.0);
            let (exact, adia) = (DecayEnvelope::new(p), DecayEnvelope::adiabatic(p));
            let rate = effective_rate(&p);
            let t_max = if rate > 0.0 { 10.0 / rate } else { 1e3 };
            for i in 0..=2000 {
                let t = t_max * i as f64 / 2000.0;
                let d = (exact.envelope(t) - adia.envelope(t)).abs();
                assert!(d < 1e-3, "eta={eta} t={t} diff={d}");
            }
        }
    }

    #[test]
    fn decoherence_times() {
        use num_complex::Complex64 as C;
        let p = ideal(1e-3, 0.95, -1.0);
        let t = decoherence_time(&p, &StateSpec::cat(C::new(0.0, 2.0), 0.0)).unwrap();
        assert!((t - 0.125).abs() < 1e-15);
        let t = decoherence_time(&p, &StateSpec::cat(C::new(5.0, 0.0), 0.0)).unwrap();
        assert!((t - 0.02).abs() < 1e-15);
        let t = decoherence_time(&p, &StateSpec::fock_two_four()).unwrap();
        assert!((t - 0.3).abs() < 1e-14);
        assert!(matches!(
            decoherence_time(&p, &StateSpec::fock(0)),
            Err(Error::DegenerateState(_))
        ));
    }

    proptest! {
        #[test]
        fn envelope_starts_at_one(
            g1p in 0.01f64..5.0, g2p in 0.0f64..500.0, e1 in 0.0f64..2.0,
            e2 in 0.0f64..50.0, g in -4.0f64..3.0,
        ) {
            let p = FeedbackParams::new(g1p, g2p, e1, e2, g).unwrap();
            let env = DecayEnvelope::new(p);
            prop_assert!((env.envelope(0.0) - 1.0).abs() < 1e-12);
            prop_assert!(env.envelope_complex(0.7).im.abs() < 1e-12);
        }

        #[test]
        fn envelope_monotone_in_physical_regime(
            ratio in 1e-4f64..2.0, eta in 0.0f64..=1.0, g in -2.0f64..=0.0,
        ) {
            let env = DecayEnvelope::new(ideal(ratio, eta, g));
            let mut prev = env.envelope(0.0);
            for i in 1..300 {
                let t = 1e-3 * 1.05f64.powi(i);
                let f = env.envelope(t);
                prop_assert!(f <= prev + 1e-12, "t={} f={} prev={}", t, f, prev);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
                prev = f;
            }
        }
    }
}
