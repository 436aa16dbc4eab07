use super::eigen::jacobi_coefficients;
use super::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi: rotates column pairs of `a` until they are
/// mutually orthogonal, accumulating the rotations into `v`. On return the
/// column norms of `a` are the singular values and `v` holds the right
/// singular vectors.
fn orthogonalize_columns(a: &mut [Vec<C64>], v: &mut [Vec<C64>]) {
    let n = a.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_coefficients(alpha, beta, gamma);
                let jpq = ph * s;
                let jqp = -ph.conj() * s;
                for cols in [&mut *a, &mut *v] {
                    let (left, right) = cols.split_at_mut(q);
                    for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                        let (x, y) = (*xp, *xq);
                        *xp = x * c + y * jqp;
                        *xq = x * jpq + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

fn columns_of(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect())
        .collect()
}

fn identity_columns(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect()
}

/// The `min(rows, cols)` singular values of `m`, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let work = if m.rows() < m.cols() { m.adjoint() } else { m.clone() };
    let mut a = columns_of(&work);
    let mut v = identity_columns(work.cols());
    orthogonalize_columns(&mut a, &mut v);
    let mut sv: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values `σ ≤ tol·σ_max`, out of `min(rows, cols)`.
///
/// A zero matrix counts every direction as singular.
pub fn nullspace_dimension(m: &ComplexMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    let cutoff = tol * sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s <= cutoff).count()
}

pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    m.rows().min(m.cols()) - nullspace_dimension(m, tol)
}

/// Orthonormal basis (as columns) of the right kernel of `m`, using the same
/// relative cutoff as [`nullspace_dimension`]. Wide matrices are padded with
/// zero rows, so the full kernel is returned.
pub fn nullspace_basis(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.cols();
    let mut a = columns_of(m);
    if m.rows() < n {
        for col in &mut a {
            col.resize(n, ZERO);
        }
    }
    let mut v = identity_columns(n);
    orthogonalize_columns(&mut a, &mut v);
    let norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let cutoff = tol * norms.iter().copied().fold(0.0, f64::max);
    let kernel: Vec<usize> = (0..n).filter(|&j| norms[j] <= cutoff).collect();
    let mut out = ComplexMatrix::zeros(n, kernel.len());
    for (k, &j) in kernel.iter().enumerate() {
        for i in 0..n {
            out[(i, k)] = v[j][i];
        }
    }
    out
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> C64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = ONE;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        if a[(pivot, k)] == ZERO {
            return ZERO;
        }
        if pivot != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
            }
            det = -det;
        }
        let akk = a[(k, k)];
        det *= akk;
        for i in k + 1..n {
            let f = a[(i, k)] / akk;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_trivial_kernel() {
        assert_eq!(nullspace_dimension(&ComplexMatrix::identity(4), 1e-10), 0);
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        assert_eq!(nullspace_dimension(&ComplexMatrix::zeros(5, 5), 1e-10), 5);
        assert_eq!(nullspace_basis(&ComplexMatrix::zeros(3, 3), 1e-10).cols(), 3);
    }

    #[test]
    fn rank_one_kernel_vectors_are_annihilated() {
        let m = ComplexMatrix::from_rows(&[
            [ONE, C64::new(0.0, 1.0), C64::new(2.0, 0.0)],
            [C64::new(2.0, 0.0), C64::new(0.0, 2.0), C64::new(4.0, 0.0)],
        ]);
        assert_eq!(singular_values(&m).len(), 2);
        let kernel = nullspace_basis(&m, 1e-12);
        assert_eq!(kernel.cols(), 2);
        assert!((&m * &kernel).max_abs() < 1e-14);
        assert!((&kernel.adjoint() * &kernel).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn determinant_small_cases() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 2.0], [3.0, 1.0]]);
        assert_eq!(determinant(&m), C64::new(-6.0, 0.0));
        let rot = ComplexMatrix::from_rows(&[[ZERO, C64::new(0.0, 1.0)], [C64::new(0.0, 1.0), ZERO]]);
        assert_eq!(determinant(&rot), ONE);
    }
}
