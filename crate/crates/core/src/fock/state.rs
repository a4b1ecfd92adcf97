use std::collections::BTreeMap;

use nalgebra::DVector;

use super::ops::coherent_amplitudes;
use super::{DensityMatrix, FockSpace, C64, TOL_TAIL};
use crate::error::{Error, Result};

/// Symbolic pure single-mode state. Amplitudes are unnormalized weights.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// `sum_k c_k |alpha_k>` as `(c_k, alpha_k)` pairs.
    CoherentSuperposition(Vec<(C64, C64)>),
    /// `sum_k c_k |n_k>` as `(c_k, n_k)` pairs.
    FockSuperposition(Vec<(C64, usize)>),
}

fn coherent_overlap(bra: C64, ket: C64) -> C64 {
    (bra.conj() * ket - (bra.norm_sqr() + ket.norm_sqr()) / 2.0).exp()
}

impl StateSpec {
    pub fn coherent(alpha: C64) -> Self {
        StateSpec::CoherentSuperposition(vec![(C64::new(1.0, 0.0), alpha)])
    }

    /// `|alpha0> + exp(i phi) |-alpha0>`.
    pub fn cat(alpha0: C64, phi: f64) -> Self {
        StateSpec::CoherentSuperposition(vec![
            (C64::new(1.0, 0.0), alpha0),
            (C64::from_polar(1.0, phi), -alpha0),
        ])
    }

    pub fn fock(n: usize) -> Self {
        StateSpec::FockSuperposition(vec![(C64::new(1.0, 0.0), n)])
    }

    /// `(|2> + sqrt(2) |4>) / sqrt(3)`.
    pub fn fock_two_four() -> Self {
        StateSpec::FockSuperposition(vec![
            (C64::new(1.0, 0.0), 2),
            (C64::new(2f64.sqrt(), 0.0), 4),
        ])
    }

    /// Fock amplitudes with repeated levels merged, ascending by level.
    fn fock_weights(&self) -> Option<BTreeMap<usize, C64>> {
        match self {
            StateSpec::FockSuperposition(terms) => {
                let mut w = BTreeMap::new();
                for &(c, n) in terms {
                    *w.entry(n).or_insert(C64::new(0.0, 0.0)) += c;
                }
                Some(w)
            }
            StateSpec::CoherentSuperposition(_) => None,
        }
    }

    /// Squared norm of the unnormalized state.
    pub fn norm_sqr(&self) -> f64 {
        match self {
            StateSpec::CoherentSuperposition(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for &(cj, aj) in terms {
                    for &(ck, ak) in terms {
                        s += cj.conj() * ck * coherent_overlap(aj, ak);
                    }
                }
                s.re
            }
            StateSpec::FockSuperposition(_) => {
                self.fock_weights().unwrap().values().map(|c| c.norm_sqr()).sum()
            }
        }
    }

    /// Factor that normalizes the weights; `1/sqrt(2(1 + exp(-2|a|^2) cos phi))` for a cat.
    pub fn normalization(&self) -> f64 {
        1.0 / self.norm_sqr().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let (len, finite) = match self {
            StateSpec::CoherentSuperposition(t) => (
                t.len(),
                t.iter().all(|(c, a)| c.is_finite() && a.is_finite()),
            ),
            StateSpec::FockSuperposition(t) => (t.len(), t.iter().all(|(c, _)| c.is_finite())),
        };
        if len == 0 {
            return Err(Error::InvalidSpec("state needs at least one term".into()));
        }
        if !finite {
            return Err(Error::InvalidSpec("non-finite amplitude or center".into()));
        }
        let n2 = self.norm_sqr();
        if !(n2 > 1e-300) || !n2.is_finite() {
            return Err(Error::InvalidSpec(format!("state has vanishing norm ({n2:e})")));
        }
        Ok(())
    }

    /// `<psi|a†a|psi>` of the normalized state.
    pub fn mean_photon_number(&self) -> f64 {
        match self {
            StateSpec::CoherentSuperposition(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for &(cj, aj) in terms {
                    for &(ck, ak) in terms {
                        s += cj.conj() * ck * aj.conj() * ak * coherent_overlap(aj, ak);
                    }
                }
                s.re / self.norm_sqr()
            }
            StateSpec::FockSuperposition(_) => {
                let w = self.fock_weights().unwrap();
                let num: f64 = w.iter().map(|(&n, c)| n as f64 * c.norm_sqr()).sum();
                num / self.norm_sqr()
            }
        }
    }

    /// `(alpha0, phi)` when the spec is a two-branch cat `|a> + e^{i phi}|-a>`, `a != 0`.
    pub fn as_cat(&self) -> Option<(C64, f64)> {
        match self {
            StateSpec::CoherentSuperposition(t) if t.len() == 2 => {
                let ((c0, a0), (c1, a1)) = (t[0], t[1]);
                let scale = a0.norm().max(1.0);
                if a0.norm() == 0.0
                    || (a0 + a1).norm() > 1e-12 * scale
                    || (c0.norm() - c1.norm()).abs() > 1e-12 * c0.norm()
                {
                    return None;
                }
                Some((a0, (c1 / c0).arg()))
            }
            _ => None,
        }
    }

    pub fn max_fock_level(&self) -> Option<usize> {
        self.fock_weights().and_then(|w| w.keys().next_back().copied())
    }

    /// Truncation from the mean-photon rule, enlarged to hold every Fock level.
    pub fn default_space(&self) -> FockSpace {
        let rule = FockSpace::for_mean_photons(self.mean_photon_number());
        match self.max_fock_level() {
            Some(n) if n + 1 > rule.dim() => FockSpace::new(n + 1).unwrap(),
            _ => rule,
        }
    }

    /// `R(beta*, alpha) = <beta|rho|alpha> exp((|alpha|^2 + |beta|^2)/2)`, exact.
    pub fn r_function(&self, beta_conj: C64, alpha: C64) -> C64 {
        let norm = self.norm_sqr();
        match self {
            StateSpec::CoherentSuperposition(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for &(cj, aj) in terms {
                    for &(ck, ak) in terms {
                        let expo = beta_conj * aj + ak.conj() * alpha
                            - (aj.norm_sqr() + ak.norm_sqr()) / 2.0;
                        s += cj * ck.conj() * expo.exp();
                    }
                }
                s / norm
            }
            StateSpec::FockSuperposition(_) => {
                let w = self.fock_weights().unwrap();
                let mut s = C64::new(0.0, 0.0);
                for (&n, &cn) in &w {
                    for (&m, &cm) in &w {
                        s += cn * cm.conj() * scaled_power(beta_conj, n) * scaled_power(alpha, m);
                    }
                }
                s / norm
            }
        }
    }

    /// Normalized Fock-basis state vector in `space`, with the truncated tail
    /// population it leaves out.
    fn state_vector(&self, space: FockSpace) -> Result<(DVector<C64>, f64)> {
        self.validate()?;
        let d = space.dim();
        let norm2 = self.norm_sqr();
        let psi = match self {
            StateSpec::CoherentSuperposition(terms) => {
                let mut psi = DVector::zeros(d);
                for &(c, a) in terms {
                    psi += coherent_amplitudes(space, a) * c;
                }
                psi
            }
            StateSpec::FockSuperposition(_) => {
                let w = self.fock_weights().unwrap();
                let mut psi = DVector::zeros(d);
                for (&n, &c) in &w {
                    if n >= d {
                        if c.norm_sqr() > 0.0 {
                            return Err(Error::Truncation(format!(
                                "Fock level {n} does not fit in {space}"
                            )));
                        }
                        continue;
                    }
                    psi[n] = c;
                }
                psi
            }
        };
        let kept = psi.norm_squared();
        let tail = (1.0 - kept / norm2).max(0.0);
        Ok((psi / C64::new(kept.sqrt(), 0.0), tail))
    }
}

/// `z^n / sqrt(n!)`, accumulated incrementally.
fn scaled_power(z: C64, n: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for k in 1..=n {
        acc *= z / (k as f64).sqrt();
    }
    acc
}

/// Pure-state density matrix of `spec` in `space`; fails if more than
/// `1e-10` of the population lies beyond the truncation.
pub fn make_state(spec: &StateSpec, space: FockSpace) -> Result<DensityMatrix> {
    let (psi, tail) = spec.state_vector(space)?;
    if tail > TOL_TAIL {
        return Err(Error::Truncation(format!(
            "tail population {tail:e} beyond {space} exceeds {TOL_TAIL:e}"
        )));
    }
    DensityMatrix::from_pure(space, &psi)
}

pub fn r_function(spec: &StateSpec, beta_conj: C64, alpha: C64) -> C64 {
    spec.r_function(beta_conj, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_amplitudes;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cat_normalization_factor() {
        let spec = StateSpec::cat(c(0.0, 2.0), 0.0);
        let want = 1.0 / (2.0 * (1.0 + (-8.0f64).exp())).sqrt();
        assert!((spec.normalization() - want).abs() < 1e-14);
        assert!((spec.normalization() - 0.70698).abs() < 1e-5);
    }

    #[test]
    fn fock_two_four_mean_photons() {
        let spec = StateSpec::fock_two_four();
        assert!((spec.mean_photon_number() - 10.0 / 3.0).abs() < 1e-14);
        let rho = make_state(&spec, spec.default_space()).unwrap();
        assert!((rho.mean_photon_number().unwrap() - 10.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn zero_cat_is_vacuum() {
        let spec = StateSpec::cat(c(0.0, 0.0), 0.0);
        let s = FockSpace::new(8).unwrap();
        let rho = make_state(&spec, s).unwrap();
        assert!((rho.matrix() - DensityMatrix::vacuum(s).matrix()).norm() < 1e-15);
        assert!(spec.as_cat().is_none());
    }

    #[test]
    fn odd_cat_at_zero_is_invalid() {
        assert!(matches!(
            StateSpec::cat(c(0.0, 0.0), std::f64::consts::PI).validate(),
            Err(Error::InvalidSpec(_))
        ));
        assert!(StateSpec::FockSuperposition(vec![]).validate().is_err());
    }

    #[test]
    fn truncation_errors() {
        let s = FockSpace::new(5).unwrap();
        assert!(matches!(
            make_state(&StateSpec::fock_two_four(), FockSpace::new(4).unwrap()),
            Err(Error::Truncation(_))
        ));
        assert!(make_state(&StateSpec::fock_two_four(), s).is_ok());
        assert!(matches!(
            make_state(&StateSpec::coherent(c(3.0, 0.0)), FockSpace::new(12).unwrap()),
            Err(Error::Truncation(_))
        ));
        let big = StateSpec::cat(c(5.0, 0.0), 0.0);
        assert!(make_state(&big, big.default_space()).is_ok());
    }

    #[test]
    fn cat_detection() {
        let (a, phi) = StateSpec::cat(c(0.0, 2.0), 0.3).as_cat().unwrap();
        assert_eq!(a, c(0.0, 2.0));
        assert!((phi - 0.3).abs() < 1e-15);
        assert!(StateSpec::coherent(c(1.0, 0.0)).as_cat().is_none());
    }

    #[test]
    fn r_function_vacuum_is_one() {
        let vac = StateSpec::fock(0);
        let vac_coh = StateSpec::coherent(c(0.0, 0.0));
        for (b, a) in [(c(0.3, -1.0), c(2.0, 0.5)), (c(-2.0, 1.0), c(0.0, 0.0))] {
            assert!((vac.r_function(b, a) - c(1.0, 0.0)).norm() < 1e-15);
            assert!((vac_coh.r_function(b, a) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn r_function_coherent_and_fock_closed_forms() {
        let a0 = c(0.7, -0.4);
        let (b, a) = (c(0.2, 0.9), c(-1.1, 0.3));
        let want = (b * a0 + a0.conj() * a - a0.norm_sqr()).exp();
        assert!((StateSpec::coherent(a0).r_function(b, a) - want).norm() < 1e-14);
        let want = (b * a).powu(3) / 6.0;
        assert!((StateSpec::fock(3).r_function(b, a) - want).norm() < 1e-14);
    }

    #[test]
    fn r_function_matches_matrix_elements() {
        let specs = [
            StateSpec::cat(c(0.0, 1.5), 0.4),
            StateSpec::fock_two_four(),
            StateSpec::CoherentSuperposition(vec![(c(1.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.5), c(-0.5, 1.0))]),
        ];
        let s = FockSpace::new(90).unwrap();
        let pts = [c(0.0, 0.0), c(1.0, -2.0), c(-3.0, 0.0), c(2.0, 2.0), c(0.5, 1.7)];
        for spec in &specs {
            let rho = make_state(spec, s).unwrap();
            for &beta in &pts {
                for &alpha in &pts {
                    let kb = coherent_amplitudes(s, beta);
                    let ka = coherent_amplitudes(s, alpha);
                    let elem = (kb.adjoint() * rho.matrix() * ka)[(0, 0)];
                    let r = spec.r_function(beta.conj(), alpha)
                        * (-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0).exp();
                    assert!((elem - r).norm() < 1e-8, "{spec:?} {beta} {alpha}");
                }
            }
        }
    }
}
