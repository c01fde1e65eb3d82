//! LU factorization with partial pivoting.
//!
//! This is the oracle side of every determinant and inverse comparison in
//! the crate, so it deliberately knows nothing about trees.

use super::{max_abs, DenseMatrix};
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `PIVOT_TOL * max_abs(A)` means
/// the matrix is treated as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// 1-norm condition estimates above this are rejected by [`lu_inverse`].
pub const COND_LIMIT: f64 = 1e14;

/// Determinant carried as sign and natural log of the magnitude.
///
/// `sign` is `0.0` exactly when the determinant is zero, in which case
/// `ln_abs` is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogDet = LogDet {
        sign: 1.0,
        ln_abs: 0.0,
    };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn mul(self, other: LogDet) -> LogDet {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogDet {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn powi(self, k: i64) -> LogDet {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        LogDet {
            sign: if k % 2 == 0 { 1.0 } else { self.sign },
            ln_abs: self.ln_abs * k as f64,
        }
    }

    /// Plain value, with a flag set when the magnitude over- or underflows
    /// binary64.
    pub fn value(&self) -> (f64, bool) {
        if self.is_zero() {
            return (0.0, false);
        }
        let mag = self.ln_abs.exp();
        let saturated = mag.is_infinite() || (mag == 0.0 && self.ln_abs.is_finite());
        (self.sign * mag, saturated)
    }
}

/// Packed `PA = LU` factorization.
#[derive(Debug, Clone)]
pub struct Lu {
    /// Unit-lower L below the diagonal, U on and above it.
    packed: DenseMatrix,
    /// `perm[k]` is the original row now at position `k`.
    perm: Vec<usize>,
    perm_sign: f64,
    /// `max_abs` of the input, the reference scale for pivot decisions.
    scale: f64,
}

impl Lu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut perm_sign = 1.0;

        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, m[(r, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if p != k {
                for c in 0..n {
                    let tmp = m[(k, c)];
                    m[(k, c)] = m[(p, c)];
                    m[(p, c)] = tmp;
                }
                perm.swap(k, p);
                perm_sign = -perm_sign;
            }
            if best == 0.0 {
                // exact zero column: nothing to eliminate
                continue;
            }
            let pivot = m[(k, k)];
            for r in k + 1..n {
                let f = m[(r, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                m[(r, k)] = f;
                for c in k + 1..n {
                    m[(r, c)] -= f * m[(k, c)];
                }
            }
        }

        Ok(Self {
            packed: m,
            perm,
            perm_sign,
            scale: max_abs(a),
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Diagonal of U in elimination order.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.packed[(k, k)]).collect()
    }

    /// Smallest `|u_kk|` divided by `max_abs(A)`; 0 for the zero matrix.
    pub fn min_pivot_ratio(&self) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.pivots()
            .iter()
            .fold(f64::INFINITY, |m, p| m.min(p.abs()))
            / self.scale
    }

    /// True when some pivot falls below `PIVOT_TOL * max_abs(A)`.
    pub fn is_singular(&self) -> bool {
        self.dim() > 0 && self.min_pivot_ratio() < PIVOT_TOL
    }

    pub fn log_det(&self) -> LogDet {
        let mut acc = LogDet {
            sign: self.perm_sign,
            ln_abs: 0.0,
        };
        for p in self.pivots() {
            acc = acc.mul(LogDet::from_value(p));
        }
        acc
    }

    pub fn det(&self) -> f64 {
        self.log_det().value().0
    }

    /// Solves `A x = b` for every column of `b`.
    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side has {} rows, system has {n}",
                b.rows()
            )));
        }
        self.check_pivots()?;
        let mut x = DenseMatrix::zeros(n, b.cols());
        for col in 0..b.cols() {
            let mut y: Vec<f64> = self.perm.iter().map(|&r| b[(r, col)]).collect();
            for i in 0..n {
                let mut acc = y[i];
                for k in 0..i {
                    acc -= self.packed[(i, k)] * y[k];
                }
                y[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = y[i];
                for k in i + 1..n {
                    acc -= self.packed[(i, k)] * y[k];
                }
                y[i] = acc / self.packed[(i, i)];
            }
            for (i, v) in y.into_iter().enumerate() {
                x[(i, col)] = v;
            }
        }
        Ok(x)
    }

    /// Inverse together with the 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
    pub fn inverse_with_cond(&self, a: &DenseMatrix) -> Result<(DenseMatrix, f64)> {
        let inv = self.solve(&DenseMatrix::identity(self.dim()))?;
        let cond = a.norm_1() * inv.norm_1();
        Ok((inv, cond))
    }

    fn check_pivots(&self) -> Result<()> {
        let tolerance = PIVOT_TOL * self.scale;
        let smallest = self
            .pivots()
            .iter()
            .fold(f64::INFINITY, |m, p| m.min(p.abs()));
        if self.dim() > 0 && (smallest < tolerance || smallest == 0.0) {
            return Err(Error::Singular {
                pivot: smallest,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Determinant by partially pivoted LU.
pub fn lu_det(a: &DenseMatrix) -> Result<f64> {
    Ok(Lu::factor(a)?.det())
}

/// Determinant as sign and log-magnitude.
pub fn lu_log_det(a: &DenseMatrix) -> Result<LogDet> {
    Ok(Lu::factor(a)?.log_det())
}

/// Inverse by LU. Fails with `Singular` on a pivot below [`PIVOT_TOL`]
/// (relative) and with `IllConditioned` above [`COND_LIMIT`].
pub fn lu_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let lu = Lu::factor(a)?;
    let (inv, cond) = lu.inverse_with_cond(a)?;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails too
    if !(cond <= COND_LIMIT) {
        return Err(Error::IllConditioned { cond });
    }
    Ok(inv)
}

/// Determinant of `[[a11, a12], [a21, a22]]` via the Schur complement of
/// `a11`.
pub fn schur_det(
    a11: &DenseMatrix,
    a12: &DenseMatrix,
    a21: &DenseMatrix,
    a22: &DenseMatrix,
) -> Result<f64> {
    if !a11.is_square() {
        return Err(Error::NonSquare {
            rows: a11.rows(),
            cols: a11.cols(),
        });
    }
    if !a22.is_square() {
        return Err(Error::NonSquare {
            rows: a22.rows(),
            cols: a22.cols(),
        });
    }
    let (k, m) = (a11.rows(), a22.rows());
    if a12.shape() != (k, m) || a21.shape() != (m, k) {
        return Err(Error::ShapeMismatch(format!(
            "off-diagonal blocks {:?} and {:?} do not fit {k}+{m} partition",
            a12.shape(),
            a21.shape()
        )));
    }
    let lu11 = Lu::factor(a11)?;
    let x = lu11.solve(a12)?;
    let complement = a22 - &(a21 * &x);
    Ok(lu11.det() * lu_det(&complement)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn det_identity_and_permutation() {
        assert_eq!(lu_det(&DenseMatrix::identity(5)).unwrap(), 1.0);
        assert_eq!(lu_det(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(), -1.0);
    }

    #[test]
    fn det_non_square_errors() {
        assert!(matches!(
            lu_det(&DenseMatrix::zeros(2, 3)),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn det_of_zero_column_is_zero() {
        let a = m(&[&[0.0, 1.0], &[0.0, 2.0]]);
        let lu = Lu::factor(&a).unwrap();
        assert_eq!(lu.det(), 0.0);
        assert!(lu.log_det().is_zero());
        assert!(lu.is_singular());
    }

    #[test]
    fn inverse_simple() {
        assert_eq!(lu_inverse(&DenseMatrix::identity(3)).unwrap(), DenseMatrix::identity(3));
        let inv = lu_inverse(&DenseMatrix::diag(&[2.0, 4.0])).unwrap();
        assert_eq!(inv, DenseMatrix::diag(&[0.5, 0.25]));
    }

    #[test]
    fn inverse_singular_errors() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(lu_inverse(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn inverse_ill_conditioned_errors() {
        // unit upper triangular with -1 above the diagonal: every pivot is 1
        // but the 1-norm condition number grows like n 2^(n-1)
        let n = 45;
        let mut a = DenseMatrix::identity(n);
        for r in 0..n {
            for c in r + 1..n {
                a[(r, c)] = -1.0;
            }
        }
        assert!(matches!(lu_inverse(&a), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn schur_trivial_blocks() {
        let a22 = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let d = schur_det(
            &DenseMatrix::identity(2),
            &DenseMatrix::zeros(2, 2),
            &DenseMatrix::zeros(2, 2),
            &a22,
        )
        .unwrap();
        assert!((d - 5.0).abs() < 1e-14);
    }

    #[test]
    fn schur_singular_leading_block() {
        let z = DenseMatrix::zeros(1, 1);
        let one = DenseMatrix::identity(1);
        assert!(matches!(
            schur_det(&z, &one, &one, &z),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn logdet_arithmetic() {
        let a = LogDet::from_value(-2.0);
        let b = LogDet::from_value(8.0);
        assert!((a.mul(b).value().0 + 16.0).abs() < 1e-12);
        assert!((a.powi(3).value().0 + 8.0).abs() < 1e-12);
        assert_eq!(a.powi(0), LogDet::ONE);
        assert!(a.mul(LogDet::ZERO).is_zero());
        let huge = LogDet {
            sign: 1.0,
            ln_abs: 1000.0,
        };
        assert!(huge.value().1);
    }
}
