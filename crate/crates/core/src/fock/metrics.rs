use nalgebra::DMatrix;

use super::{hermitian_eigenvalues, DensityMatrix, Modes, C64};
use crate::error::{Error, Result};

fn same_shape(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.modes() != b.modes() {
        return Err(Error::Shape(format!(
            "states live on different spaces: {:?} vs {:?}",
            a.modes(),
            b.modes()
        )));
    }
    Ok(())
}

/// Overlap fidelity `Re tr(a b)`.
pub fn overlap_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_shape(a, b)?;
    let (ma, mb) = (a.matrix(), b.matrix());
    let d = a.dim();
    // tr(AB) = sum_ij A_ij B_ji without forming the product.
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += ma[(i, j)] * mb[(j, i)];
        }
    }
    if s.im.abs() > 1e-10 {
        return Err(Error::Numerical(format!("tr(ab) has imaginary part {:e}", s.im)));
    }
    Ok(s.re)
}

/// `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_shape(a, b)?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>())
}

/// Reduced state of the source mode, tracing out the driven mode.
pub fn partial_trace_source(joint: &DensityMatrix) -> Result<DensityMatrix> {
    let Modes::Joint(src, drv) = joint.modes() else {
        return Err(Error::Shape("partial trace needs a two-mode state".into()));
    };
    let (d1, d2) = (src.dim(), drv.dim());
    let m = joint.matrix();
    let reduced = DMatrix::from_fn(d1, d1, |i, j| {
        (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum::<C64>()
    });
    DensityMatrix::from_parts(Modes::Single(src), reduced)
}
