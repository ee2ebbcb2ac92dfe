//! Small dense helpers shared by the solvers. Matrices here are desk-sized
//! (n, m, p of order ten), so clarity wins over blocking or BLAS calls.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub fn symmetrize(x: &Mat) -> Mat {
    (x + x.transpose()) * 0.5
}

pub fn hermitian_part(x: &CMat) -> CMat {
    (x + x.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn fro(x: &Mat) -> f64 {
    x.norm()
}

pub fn to_complex(x: &Mat) -> CMat {
    x.map(|v| Complex64::new(v, 0.0))
}

pub fn eigenvalues(a: &Mat) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    a.clone().complex_eigenvalues().iter().copied().collect()
}

pub fn spectral_radius(a: &Mat) -> f64 {
    eigenvalues(a).iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Largest real part of the spectrum; `-inf` for the empty matrix.
pub fn spectral_abscissa(a: &Mat) -> f64 {
    eigenvalues(a)
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Symmetric eigendecomposition of `(x + xᵀ)/2`, eigenvalues ascending.
pub fn sym_eig(x: &Mat) -> (Vec<f64>, Mat) {
    let n = x.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(x));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_sym_eigenvalue(x: &Mat) -> f64 {
    sym_eig(x).0.first().copied().unwrap_or(f64::INFINITY)
}

/// Applies `f` to the spectrum of a symmetric matrix.
pub fn sym_fn(values: &[f64], vectors: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    symmetrize(&(scaled * vectors.transpose()))
}

fn one_norm(x: &Mat) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn one_norm_c(x: &CMat) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse together with its 1-norm condition number. `None` when the LU
/// factorization breaks down outright.
pub fn inverse_with_condition(x: &Mat) -> Option<(Mat, f64)> {
    let n = x.nrows();
    if n == 0 {
        return Some((Mat::zeros(0, 0), 1.0));
    }
    let inv = x.clone().lu().try_inverse()?;
    let cond = one_norm(x) * one_norm(&inv);
    if !cond.is_finite() {
        return None;
    }
    Some((inv, cond))
}

pub fn inverse_with_condition_c(x: &CMat) -> Option<(CMat, f64)> {
    let n = x.nrows();
    if n == 0 {
        return Some((CMat::zeros(0, 0), 1.0));
    }
    let inv = x.clone().lu().try_inverse()?;
    let cond = one_norm_c(x) * one_norm_c(&inv);
    if !cond.is_finite() {
        return None;
    }
    Some((inv, cond))
}

/// Frobenius inner product `Re Tr(x* y)` of two complex matrices.
pub fn frobenius_inner(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn trace_re(x: &CMat) -> f64 {
    (0..x.nrows().min(x.ncols())).map(|i| x[(i, i)].re).sum()
}

/// Real part of the determinant of a Hermitian matrix via pivoted LU.
pub fn hermitian_det(x: &CMat) -> f64 {
    if x.nrows() == 0 {
        return 1.0;
    }
    x.clone().lu().determinant().re
}

/// Singular values in descending order.
pub fn singular_values(x: &CMat) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = x.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn max_singular_value(x: &CMat) -> f64 {
    singular_values(x).first().copied().unwrap_or(0.0)
}

pub fn is_finite(x: &Mat) -> bool {
    x.iter().all(|v| v.is_finite())
}
