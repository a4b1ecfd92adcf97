use std::f64::consts::FRAC_2_PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::ops::{annihilation, displacement};
use super::{DensityMatrix, FockSpace, C64};
use crate::error::{Error, Result};

/// Largest working truncation used to displace a state.
pub const MAX_WORK_DIM: usize = 800;

/// Working truncation that keeps `D(shift)|n>` accurate for every `n < dim`.
fn padded_dim(dim: usize, shift: f64) -> Result<usize> {
    let reach = ((dim - 1) as f64).sqrt() + shift;
    let work = FockSpace::for_mean_photons(reach * reach).dim().max(dim);
    if work > MAX_WORK_DIM {
        return Err(Error::Truncation(format!(
            "displacement by {shift} of a {dim}-level state needs {work} levels (max {MAX_WORK_DIM})"
        )));
    }
    Ok(work)
}

fn single_space(rho: &DensityMatrix) -> Result<FockSpace> {
    rho.space()
        .ok_or_else(|| Error::Shape("Wigner function needs a single-mode state".into()))
}

/// `W(alpha) = (2/pi) tr[D†(alpha) rho D(alpha) P]`, with `P` the parity operator.
///
/// The displacement is exponentiated in a zero-padded working space large
/// enough that the result does not see the truncation edge.
pub fn wigner_point(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    let space = single_space(rho)?;
    let d = space.dim();
    let work = FockSpace::new(padded_dim(d, alpha.norm())?)?;
    let disp = displacement(work, alpha);
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..work.dim() {
        let col = disp.view((0, j), (d, 1));
        let diag = (col.adjoint() * m * col)[(0, 0)];
        if j % 2 == 0 {
            acc += diag;
        } else {
            acc -= diag;
        }
    }
    finish(acc)
}

fn finish(acc: C64) -> Result<f64> {
    let w = acc * FRAC_2_PI;
    if w.im.abs() > 1e-9 {
        return Err(Error::Numerical(format!("Wigner value has imaginary part {:e}", w.im)));
    }
    Ok(w.re)
}

/// Reusable displaced-parity evaluator for many phase-space points.
///
/// Uses `D(a) P D†(a) = D(2a) P` and a single eigendecomposition of the
/// quadrature `a + a†` in a padded space, so each point costs one
/// `dim x dim x work` contraction instead of a matrix exponential.
#[derive(Debug, Clone)]
pub struct WignerEvaluator {
    space: FockSpace,
    max_radius: f64,
    eigenvalues: DVector<f64>,
    /// First `dim` rows of the eigenvector matrix.
    vectors: DMatrix<C64>,
}

impl WignerEvaluator {
    /// Evaluator for states on `space` at points with `|alpha| <= max_radius`.
    pub fn new(space: FockSpace, max_radius: f64) -> Result<Self> {
        let work = FockSpace::new(padded_dim(space.dim(), 2.0 * max_radius)?)?;
        let a = annihilation(work).map(|z| z.re);
        let q = &a + a.transpose();
        let eig = SymmetricEigen::new(q);
        let vectors = eig.eigenvectors.rows(0, space.dim()).map(|v| C64::new(v, 0.0));
        Ok(Self {
            space,
            max_radius,
            eigenvalues: eig.eigenvalues,
            vectors,
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn eval(&self, rho: &DensityMatrix, alpha: C64) -> Result<f64> {
        let space = single_space(rho)?;
        if space != self.space {
            return Err(Error::Shape(format!(
                "evaluator built for {}, state on {space}",
                self.space
            )));
        }
        if alpha.norm() > self.max_radius * (1.0 + 1e-12) {
            return Err(Error::Truncation(format!(
                "|alpha| = {} beyond evaluator radius {}",
                alpha.norm(),
                self.max_radius
            )));
        }
        let d = space.dim();
        let shift = 2.0 * alpha.norm();
        // D(2a) = U exp(i s Q) U† with U = exp(i theta n), theta = arg(a) - pi/2.
        let theta = if alpha.norm() == 0.0 { 0.0 } else { alpha.arg() - std::f64::consts::FRAC_PI_2 };
        let m = rho.matrix();
        let phase: Vec<C64> = (0..d).map(|n| C64::from_polar(1.0, theta * n as f64)).collect();
        // A_nm = rho_mn (-1)^m exp(i theta (n - m))
        let a = DMatrix::from_fn(d, d, |n, mm| {
            let z = m[(mm, n)] * phase[n] * phase[mm].conj();
            if mm % 2 == 0 {
                z
            } else {
                -z
            }
        });
        // w_k = sum_nm V_nk A_nm V_mk
        let b = a * &self.vectors;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.eigenvalues.len() {
            let wk: C64 = b.column(k).iter().zip(self.vectors.column(k).iter()).map(|(x, v)| x * v).sum();
            acc += wk * C64::from_polar(1.0, shift * self.eigenvalues[k]);
        }
        finish(acc)
    }
}
