//! Minimum-norm least squares through orthogonal factorizations.
//!
//! Mathematically the output weights are `theta = A^+ r` with `A^+` the
//! Moore-Penrose pseudoinverse (`(A^T A)^{-1} A^T` when `A` has full column
//! rank). The normal equations are never formed: tall systems are reduced
//! by a Householder QR, `A = Q R`, and the small triangle is then split by
//! an SVD, `R = U S V^T`, giving `theta = V S^+ U^T (Q^T r)`. Singular values
//! below `rcond * sigma_max` are treated as zero.

use std::time::{Duration, Instant};

use faer::{Mat, MatRef};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Scalar;

/// Relative singular-value cutoff used when none is configured. The random
/// `tanh` features are nearly collinear, and the 1D benchmarks only reach
/// their best accuracy when almost the whole spectrum is kept.
pub const DEFAULT_RCOND: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveDiagnostics<T> {
    pub rank: usize,
    pub sigma_max: T,
    /// Smallest singular value that was kept (zero when `rank == 0`).
    pub sigma_min_kept: T,
    pub rcond_used: T,
    pub residual_norm: T,
    pub solve_time: Duration,
}

/// The singular-value decomposition of `A` in thin form, `A = U S V^T`,
/// with `U` only ever applied to the right-hand side.
struct Factorization<T: Scalar> {
    /// `U^T r` where `r` is the vector it was built for.
    projected: Option<DVector<T>>,
    /// Descending.
    singular_values: DVector<T>,
    /// `V`, one column per singular value.
    v: Option<DMatrix<T>>,
}

fn to_faer<T: Scalar>(a: &DMatrix<T>) -> Mat<T::Dense> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].to_dense())
}

fn to_nalgebra<T: Scalar>(m: MatRef<'_, T::Dense>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| T::from_dense(m[(i, j)]))
}

fn apply_transpose<T: Scalar>(u: MatRef<'_, T::Dense>, r: &DVector<T>) -> DVector<T> {
    let r = Mat::from_fn(r.len(), 1, |i, _| r[i].to_dense());
    let product = u.transpose() * &r;
    DVector::from_fn(product.nrows(), |i, _| T::from_dense(product[(i, 0)]))
}

fn factorize<T: Scalar>(
    a: &DMatrix<T>,
    r: Option<&DVector<T>>,
    vectors: bool,
) -> Result<Factorization<T>> {
    let (m, n) = a.shape();
    let a = to_faer(a);
    // Tall systems are first compressed to the n x n triangle; Q^T r carries
    // the right-hand side along.
    let (core, reduced) = if m > n {
        let qr = a.qr();
        let reduced = r.map(|r| apply_transpose(qr.compute_thin_Q().as_ref(), r));
        (qr.thin_R().to_owned(), reduced)
    } else {
        (a, r.cloned())
    };
    if !vectors {
        let values = core.singular_values().map_err(|_| Error::NoConvergence)?;
        return Ok(Factorization {
            projected: None,
            singular_values: DVector::from_iterator(
                values.len(),
                values.into_iter().map(T::from_dense),
            ),
            v: None,
        });
    }
    let svd = core.thin_svd().map_err(|_| Error::NoConvergence)?;
    let s = svd.S().column_vector();
    Ok(Factorization {
        projected: reduced.map(|c| apply_transpose(svd.U(), &c)),
        singular_values: DVector::from_fn(s.nrows(), |i, _| T::from_dense(s[i])),
        v: Some(to_nalgebra(svd.V())),
    })
}

/// Solves `min ||A theta - r||` and, among minimisers, minimises `||theta||`.
pub fn solve_min_norm<T: Scalar>(
    a: &DMatrix<T>,
    r: &DVector<T>,
    rcond: T,
) -> Result<(DVector<T>, SolveDiagnostics<T>)> {
    let start = Instant::now();
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::EmptySystem);
    }
    if r.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: r.len(),
        });
    }
    if !(rcond > T::zero() && rcond < T::one()) {
        return Err(Error::InvalidRcond(rcond.as_f64()));
    }
    if a.iter().chain(r.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    if a.iter().all(|v| *v == T::zero()) {
        return Ok((
            DVector::zeros(n),
            SolveDiagnostics {
                rank: 0,
                sigma_max: T::zero(),
                sigma_min_kept: T::zero(),
                rcond_used: rcond,
                residual_norm: r.norm(),
                solve_time: start.elapsed(),
            },
        ));
    }

    let fact = factorize(a, Some(r), true)?;
    let sigma = &fact.singular_values;
    let projected = fact.projected.expect("vectors requested");
    let v = fact.v.expect("vectors requested");
    let sigma_max = sigma[0];
    let cutoff = rcond * sigma_max;

    let mut rank = 0;
    let mut sigma_min_kept = sigma_max;
    let mut coeffs = DVector::zeros(sigma.len());
    for (i, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            coeffs[i] = projected[i] / s;
            rank += 1;
            sigma_min_kept = sigma_min_kept.min(s);
        }
    }
    let theta = v * coeffs;
    let residual_norm = (a * &theta - r).norm();
    Ok((
        theta,
        SolveDiagnostics {
            rank,
            sigma_max,
            sigma_min_kept,
            rcond_used: rcond,
            residual_norm,
            solve_time: start.elapsed(),
        },
    ))
}

/// Full singular spectrum of `A` (length `min(rows, cols)`), descending.
pub fn singular_values<T: Scalar>(a: &DMatrix<T>) -> Result<DVector<T>> {
    if a.is_empty() {
        return Ok(DVector::zeros(0));
    }
    Ok(factorize(a, None, false)?.singular_values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport<T> {
    pub sigma_max: T,
    pub sigma_min: T,
    /// `sigma_max / sigma_min`; infinite for singular matrices.
    pub ratio: T,
}

pub fn condition_report<T: Scalar>(a: &DMatrix<T>) -> Result<ConditionReport<T>> {
    let sigma = singular_values(a)?;
    let (sigma_max, sigma_min) = match (sigma.iter().next(), sigma.iter().last()) {
        (Some(&hi), Some(&lo)) => (hi, lo),
        _ => (T::zero(), T::zero()),
    };
    let ratio = if sigma_min > T::zero() {
        sigma_max / sigma_min
    } else {
        T::lit(f64::INFINITY)
    };
    Ok(ConditionReport {
        sigma_max,
        sigma_min,
        ratio,
    })
}
