use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to within `tol` (entrywise). Each rotation
/// zeroes one off-diagonal pair `(p, q)`; sweeps repeat until the
/// off-diagonal Frobenius mass falls below machine precision relative to the
/// whole matrix.
pub fn hermitian_eigensystem(h: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    if !h.is_square() {
        return Err(Error::Contract(format!(
            "eigensystem of a non-square {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let dev = h.max_abs_diff(&h.adjoint());
    if dev > tol {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (max |H - H^dagger| = {dev:.3e})"
        )));
    }
    let n = h.rows();
    // symmetrize so rounding in the input cannot bias the rotations
    let mut a = &(h + &h.adjoint()) * C64::new(0.5, 0.0);
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= f64::EPSILON * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) > 1e3 * f64::EPSILON * total.max(f64::MIN_POSITIVE) {
        return Err(Error::Construction("Jacobi iteration did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Coefficients `(c, s, e^{i phi})` of the rotation that diagonalizes the
/// Hermitian 2x2 block `[[app, apq], [conj(apq), aqq]]`. The rotation acts on
/// columns as `J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]`.
pub(super) fn jacobi_coefficients(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let g = apq.norm();
    let ph = apq / g;
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, ph)
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == ZERO {
        return;
    }
    let n = a.rows();
    let (c, s, ph) = jacobi_coefficients(a[(p, p)].re, a[(q, q)].re, apq);
    let jpp = C64::new(c, 0.0);
    let jpq = ph * s;
    let jqp = -ph.conj() * s;
    let jqq = C64::new(c, 0.0);

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn diagonal_input_sorted() {
        let h = ComplexMatrix::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
        let es = hermitian_eigensystem(&h, 1e-10).unwrap();
        assert_eq!(es.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let es = hermitian_eigensystem(&h, 1e-10).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-15);
        assert!((es.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eigensystem(&h, 1e-10), Err(Error::Contract(_))));
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let h = ComplexMatrix::from_rows(&[[ONE, C64::new(0.0, 1.0)], [C64::new(0.0, -1.0), ONE]]);
        let es = hermitian_eigensystem(&h, 1e-10).unwrap();
        assert!(es.values[0].abs() < 1e-15);
        assert!((es.values[1] - 2.0).abs() < 1e-15);
        let recon = &(&es.vectors * &ComplexMatrix::from_diagonal(&[ZERO, C64::new(2.0, 0.0)])) * &es.vectors.adjoint();
        assert!(recon.max_abs_diff(&h) < 1e-14);
    }
}
