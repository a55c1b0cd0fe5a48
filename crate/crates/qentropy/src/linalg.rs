//! Log-determinants of small symmetric matrices via Cholesky pivots.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Symmetry check tolerance for [`logdet_pd`] inputs.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Minus log-determinant of a symmetric positive definite matrix, or `None`
/// when the matrix is not positive definite (detected by a non-positive
/// Cholesky pivot).  Accumulates in log space so tiny pivots do not underflow
/// the determinant.
pub fn neg_logdet_pd(m: &DMatrix<f64>) -> Option<f64> {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let mut a = m.clone_owned();
    let mut logdet = 0.0;
    for k in 0..n {
        let mut pivot = a[(k, k)];
        for j in 0..k {
            pivot -= a[(k, j)] * a[(k, j)];
        }
        if pivot <= 0.0 || pivot.is_nan() {
            return None;
        }
        let l = pivot.sqrt();
        logdet += l.ln();
        a[(k, k)] = l;
        for i in (k + 1)..n {
            let mut v = a[(i, k)];
            for j in 0..k {
                v -= a[(i, j)] * a[(k, j)];
            }
            a[(i, k)] = v / l;
        }
    }
    Some(-2.0 * logdet)
}

/// [`neg_logdet_pd`] with a symmetry guard: asymmetric input is an error,
/// a non-PD symmetric matrix is a normal `Ok(None)`.
pub fn logdet_pd_checked(m: &DMatrix<f64>) -> Result<Option<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "matrix is {}x{}, expected square",
            n,
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    Ok(neg_logdet_pd(m))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Assembles a symmetric block matrix from an upper-triangular block layout.
/// `blocks[i][j]` for `j >= i` supplies the block; lower blocks are the
/// transposes.
pub fn assemble_blocks(
    sizes: &[usize],
    upper: &dyn Fn(usize, usize) -> DMatrix<f64>,
) -> DMatrix<f64> {
    let n: usize = sizes.iter().sum();
    let mut out = DMatrix::<f64>::zeros(n, n);
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    for bi in 0..sizes.len() {
        for bj in bi..sizes.len() {
            let blk = upper(bi, bj);
            debug_assert_eq!(blk.nrows(), sizes[bi]);
            debug_assert_eq!(blk.ncols(), sizes[bj]);
            for r in 0..sizes[bi] {
                for c in 0..sizes[bj] {
                    out[(offsets[bi] + r, offsets[bj] + c)] = blk[(r, c)];
                    out[(offsets[bj] + c, offsets[bi] + r)] = blk[(r, c)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_logdet_is_zero() {
        let m = DMatrix::<f64>::identity(4, 4);
        assert_abs_diff_eq!(neg_logdet_pd(&m).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn third_identity_gives_three_log_three() {
        let m = DMatrix::<f64>::identity(3, 3).scale(1.0 / 3.0);
        assert_abs_diff_eq!(
            neg_logdet_pd(&m).unwrap(),
            3.0 * 3.0f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn slightly_negative_eigenvalue_is_rejected() {
        // eigenvalues {1, -1e-8} via a rotation of diag(1, -1e-8)
        let c = 0.6f64;
        let s = 0.8f64;
        let d = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-8]);
        let r = nalgebra::DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let m = &r * d * r.transpose();
        assert!(neg_logdet_pd(&m).is_none());
        let ev = sym_eigenvalues(&m);
        assert!(ev[0] < 0.0);
    }

    #[test]
    fn asymmetric_input_is_an_error() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(logdet_pd_checked(&m).is_err());
    }

    #[test]
    fn tiny_pivots_do_not_overflow() {
        let m = DMatrix::<f64>::identity(3, 3).scale(1e-300);
        let v = neg_logdet_pd(&m).unwrap();
        assert!(v > 2000.0 && v.is_finite());
    }
}
