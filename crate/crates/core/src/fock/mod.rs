//! Truncated Fock-space linear algebra for one or two bosonic modes.
//!
//! Two-mode operators and states use the tensor ordering
//! `index = n_source * dim_driven + n_driven`.

mod metrics;
mod ops;
mod state;
mod wigner;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use metrics::{overlap_fidelity, partial_trace_source, trace_distance};
pub use ops::{
    annihilation, coherent_amplitudes, creation, displacement, identity, kron, number,
    phase_rotation,
};
pub use state::{make_state, r_function, StateSpec};
pub use wigner::{wigner_point, WignerEvaluator};

pub type C64 = Complex64;

/// Maximum deviation `max |M - M†|` accepted for a density matrix.
pub const TOL_HERMITICITY: f64 = 1e-10;
/// Maximum `|tr M - 1|` accepted for a density matrix.
pub const TOL_TRACE: f64 = 1e-8;
/// Most negative eigenvalue accepted for a density matrix.
pub const TOL_POSITIVITY: f64 = 1e-8;
/// Largest population allowed beyond the truncation of a constructed state.
pub const TOL_TAIL: f64 = 1e-10;

/// A single bosonic mode truncated to Fock levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("Fock space dimension must be at least 1".into()));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> usize {
        self.dim - 1
    }

    /// Default truncation for a state with mean photon number `nbar`:
    /// `ceil(nbar + 6 sqrt(nbar + 1)) + 10`.
    pub fn for_mean_photons(nbar: f64) -> Self {
        let nbar = nbar.max(0.0);
        let dim = (nbar + 6.0 * (nbar + 1.0).sqrt()).ceil() as usize + 10;
        Self { dim }
    }
}

impl fmt::Display for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.dim)
    }
}

/// Mode structure of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modes {
    Single(FockSpace),
    /// Source mode first, driven mode second.
    Joint(FockSpace, FockSpace),
}

impl Modes {
    pub fn total_dim(&self) -> usize {
        match self {
            Modes::Single(s) => s.dim(),
            Modes::Joint(a, b) => a.dim() * b.dim(),
        }
    }
}

/// Hermitian, unit-trace, positive matrix on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    modes: Modes,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Builds a density matrix and checks Hermiticity, trace and positivity.
    pub fn new(modes: Modes, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_parts(modes, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked constructor without the physical validity checks.
    pub(crate) fn from_parts(modes: Modes, matrix: DMatrix<C64>) -> Result<Self> {
        let d = modes.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, modes require {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { modes, matrix })
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn from_pure(space: FockSpace, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::Shape(format!(
                "state vector has {} entries, space has {}",
                psi.len(),
                space.dim()
            )));
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateState("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::new(Modes::Single(space), &psi * psi.adjoint())
    }

    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::Truncation(format!("level {n} outside {space}")));
        }
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        m[(n, n)] = C64::new(1.0, 0.0);
        Ok(Self { modes: Modes::Single(space), matrix: m })
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::fock(space, 0).expect("level 0 always fits")
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    /// Single-mode space, or `None` for a joint state.
    pub fn space(&self) -> Option<FockSpace> {
        match self.modes {
            Modes::Single(s) => Some(s),
            Modes::Joint(..) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitized matrix `(M + M†)/2`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > TOL_HERMITICITY {
            return Err(Error::InvalidState(format!("hermiticity deviation {herm:e}")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -TOL_POSITIVITY {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Real part of `tr(O rho)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.shape() != self.matrix.shape() {
            return Err(Error::Shape("operator and state dimensions differ".into()));
        }
        Ok((op * &self.matrix).trace())
    }

    /// `<a†a>` of a single-mode state.
    pub fn mean_photon_number(&self) -> Result<f64> {
        let space = self
            .space()
            .ok_or_else(|| Error::Shape("mean photon number needs a single-mode state".into()))?;
        Ok((0..space.dim()).map(|n| n as f64 * self.matrix[(n, n)].re).sum())
    }

    /// `<a>` of a single-mode state.
    pub fn mean_amplitude(&self) -> Result<C64> {
        let space = self
            .space()
            .ok_or_else(|| Error::Shape("mean amplitude needs a single-mode state".into()))?;
        self.expectation(&annihilation(space))
    }

    /// Product state `self ⊗ other`, both single-mode.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        match (self.modes, other.modes) {
            (Modes::Single(a), Modes::Single(b)) => Ok(DensityMatrix {
                modes: Modes::Joint(a, b),
                matrix: kron(&self.matrix, &other.matrix),
            }),
            _ => Err(Error::Shape("tensor product needs two single-mode states".into())),
        }
    }

    /// `U rho U†` with `U = exp(i theta n)`; maps a state with amplitude `alpha`
    /// to one with amplitude `exp(i theta) alpha`.
    pub fn rotated(&self, theta: f64) -> Result<DensityMatrix> {
        let space = self
            .space()
            .ok_or_else(|| Error::Shape("phase rotation needs a single-mode state".into()))?;
        let d = space.dim();
        let mut m = self.matrix.clone();
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] *= C64::from_polar(1.0, theta * (i as f64 - j as f64));
            }
        }
        Ok(DensityMatrix { modes: self.modes, matrix: m })
    }

    /// Same state in a larger (or equal) truncation, zero-padded.
    pub fn embed(&self, space: FockSpace) -> Result<DensityMatrix> {
        let own = self
            .space()
            .ok_or_else(|| Error::Shape("embedding needs a single-mode state".into()))?;
        if space.dim() < own.dim() {
            return Err(Error::Shape(format!("cannot embed {own} into smaller {space}")));
        }
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        m.view_mut((0, 0), (own.dim(), own.dim())).copy_from(&self.matrix);
        Ok(DensityMatrix { modes: Modes::Single(space), matrix: m })
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    // Exactly-zero rows are exact zero eigenvalues; nalgebra's Householder step
    // turns them into 0/0, so diagonalize only the supported block.
    let zero = C64::new(0.0, 0.0);
    let support: Vec<usize> = (0..h.nrows()).filter(|&i| h.row(i).iter().any(|z| *z != zero)).collect();
    let mut ev: Vec<f64> = if support.is_empty() {
        vec![]
    } else {
        let block = h.select_rows(&support).select_columns(&support);
        block.symmetric_eigenvalues().iter().copied().collect()
    };
    ev.resize(h.nrows(), 0.0);
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_with_zero_pivots() {
        let spec = StateSpec::cat(C64::new(0.8, 0.0), 0.0);
        let rho = make_state(&spec, spec.default_space()).unwrap();
        let joint = rho.tensor(&DensityMatrix::vacuum(spec.default_space())).unwrap();
        let ev = joint.eigenvalues();
        assert!(ev.iter().all(|v| v.is_finite()));
        assert!((ev.last().unwrap() - 1.0).abs() < 1e-12 && ev[0] > -1e-15);
        // block-sparse Hermitian matrix with exactly zero leading columns
        let mut m = DMatrix::<C64>::zeros(6, 6);
        m[(3, 3)] = C64::new(0.5, 0.0);
        m[(5, 5)] = C64::new(0.25, 0.0);
        m[(3, 5)] = C64::new(0.1, 0.2);
        m[(5, 3)] = C64::new(0.1, -0.2);
        let ev = hermitian_eigenvalues(&m);
        assert_eq!(ev.len(), 6);
        assert!(ev.iter().all(|v| v.is_finite()));
        let disc = ((0.5f64 - 0.25).powi(2) / 4.0 + 0.05).sqrt();
        assert!((ev[5] - (0.375 + disc)).abs() < 1e-12);
        assert!((ev[0] - (0.375 - disc).min(0.0)).abs() < 1e-12);
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(FockSpace::for_mean_photons(0.0).dim(), 16);
        // nbar = 25: ceil(25 + 6 sqrt 26) = 56
        assert_eq!(FockSpace::for_mean_photons(25.0).dim(), 66);
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let s = FockSpace::new(2).unwrap();
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(Modes::Single(s), m),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn rejects_negative_and_bad_trace() {
        let s = FockSpace::new(2).unwrap();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.1, 0.0),
            C64::new(-0.1, 0.0),
        ]));
        assert!(DensityMatrix::new(Modes::Single(s), m).is_err());
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(0.4, 0.0),
        ]));
        assert!(DensityMatrix::new(Modes::Single(s), m).is_err());
    }

    #[test]
    fn rotation_moves_amplitude_phase() {
        let s = FockSpace::new(30).unwrap();
        let rho = make_state(&StateSpec::coherent(C64::new(1.0, 0.0)), s).unwrap();
        let rot = rho.rotated(std::f64::consts::FRAC_PI_2).unwrap();
        let a = rot.mean_amplitude().unwrap();
        assert!((a - C64::new(0.0, 1.0)).norm() < 1e-10);
    }
}
