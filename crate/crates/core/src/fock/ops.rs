use nalgebra::{DMatrix, DVector};

use super::{FockSpace, C64};

/// Ladder operator with `<n-1|a|n> = sqrt(n)`.
pub fn annihilation(space: FockSpace) -> DMatrix<C64> {
    let d = space.dim();
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(space: FockSpace) -> DMatrix<C64> {
    annihilation(space).adjoint()
}

pub fn number(space: FockSpace) -> DMatrix<C64> {
    let d = space.dim();
    DMatrix::from_diagonal(&DVector::from_fn(d, |n, _| C64::new(n as f64, 0.0)))
}

pub fn identity(space: FockSpace) -> DMatrix<C64> {
    DMatrix::identity(space.dim(), space.dim())
}

/// `exp(i theta n)` as a diagonal matrix.
pub fn phase_rotation(space: FockSpace, theta: f64) -> DMatrix<C64> {
    let d = space.dim();
    DMatrix::from_diagonal(&DVector::from_fn(d, |n, _| C64::from_polar(1.0, theta * n as f64)))
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `D(alpha) = exp(alpha a† - alpha* a)` in the truncated space, by Padé
/// scaling-and-squaring.
pub fn displacement(space: FockSpace, alpha: C64) -> DMatrix<C64> {
    let a = annihilation(space);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    gen.exp()
}

/// Fock amplitudes `<n|alpha>` for `n < dim`, via the recurrence
/// `c_n = c_{n-1} alpha / sqrt(n)` from `c_0 = exp(-|alpha|^2 / 2)`.
pub fn coherent_amplitudes(space: FockSpace, alpha: C64) -> DVector<C64> {
    let d = space.dim();
    let mut c = DVector::zeros(d);
    c[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..d {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    #[test]
    fn ladder_small() {
        let a = annihilation(space(2));
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 1)], C64::new(0.0, 0.0));
        let a3 = annihilation(space(3));
        assert!((a3[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn number_from_ladder() {
        let s = space(4);
        let n = creation(s) * annihilation(s);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { i as f64 } else { 0.0 };
                assert!((n[(i, j)] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!((n - number(s)).camax() < 1e-15);
    }

    #[test]
    fn ladder_matrix_elements() {
        let s = space(12);
        let a = annihilation(s);
        for m in 0..12 {
            for n in 0..12 {
                let want = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
                assert_eq!(a[(m, n)].re, want);
                assert_eq!(a[(m, n)].im, 0.0);
            }
        }
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let s = space(60);
        let alpha = C64::new(1.2, -0.7);
        let d = displacement(s, alpha);
        let coh = coherent_amplitudes(s, alpha);
        for n in 0..20 {
            assert!((d[(n, 0)] - coh[n]).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn coherent_recurrence_no_overflow() {
        let c = coherent_amplitudes(space(400), C64::new(12.0, 0.0));
        assert!(c.iter().all(|z| z.re.is_finite()));
        assert!((c.norm() - 1.0).abs() < 1e-12);
    }
}
