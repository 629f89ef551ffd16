//! Small dense complex matrix helpers used throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type RMat = DMatrix<f64>;

pub fn czero() -> C {
    C::new(0.0, 0.0)
}

pub fn cone() -> C {
    C::new(1.0, 0.0)
}

/// Largest entry magnitude, 0.0 for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry-wise difference |a - b|.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius inner product tr(a† b).
pub fn frobenius_inner(a: &CMat, b: &CMat) -> C {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// Orthonormal basis of the column space of `m`, via modified Gram-Schmidt
/// with largest-pivot column ordering. Columns whose residual norm falls
/// below `tol` (relative to the largest original column norm) are dropped.
pub fn orthonormal_column_space(m: &CMat, tol: f64) -> Vec<DVector<C>> {
    let mut cols: Vec<DVector<C>> = (0..m.ncols()).map(|j| m.column(j).into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<C>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    loop {
        // Largest remaining pivot keeps the ordering reproducible; exact
        // ties go to the earliest column.
        let mut best = usize::MAX;
        let mut best_norm = -1.0;
        for (i, c) in cols.iter().enumerate() {
            let norm = c.norm();
            if norm > best_norm * (1.0 + 1e-12) {
                best = i;
                best_norm = norm;
            }
        }
        if best == usize::MAX || best_norm < tol * scale {
            break;
        }
        let v = cols.remove(best).unscale(best_norm);
        for c in cols.iter_mut() {
            let coeff = v.dotc(c);
            *c -= v.scale(1.0) * coeff;
        }
        basis.push(v);
    }
    basis
}

/// Result of a real SVD null-space computation.
pub struct Nullspace {
    /// Orthonormal basis vectors of the kernel (columns).
    pub basis: Vec<DVector<f64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// The absolute cut `rel_tol * sigma_max` that separated kernel from range.
    pub cut: f64,
    /// Singular values within a factor 10 of the cut on either side.
    pub ambiguous: Vec<f64>,
}

/// Null space of a real matrix via SVD with a relative rank threshold.
///
/// Singular values below `rel_tol * sigma_max` count as zero. Values within
/// a factor of 10 of the cut are reported as ambiguous rather than silently
/// assigned to one side.
pub fn nullspace_real(a: &RMat, rel_tol: f64) -> Nullspace {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("SVD requested V^T");
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax;
    let ambiguous: Vec<f64> = sv
        .iter()
        .copied()
        .filter(|&s| s > cut / 10.0 && s < cut * 10.0)
        .collect();
    let mut basis = Vec::new();
    // v_t rows beyond the numerical rank span the kernel. nalgebra returns a
    // v_t with min(m, n) rows; for wide matrices the remaining kernel
    // directions would be missing, so insist on m >= n here.
    assert!(
        a.nrows() >= n,
        "nullspace_real expects a tall or square matrix"
    );
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            basis.push(v_t.row(i).transpose());
        }
    }
    Nullspace {
        basis,
        singular_values: sv,
        cut,
        ambiguous,
    }
}

/// Least-squares solve of `a x = b` for small dense complex systems via the
/// SVD pseudoinverse. Returns the minimum-norm solution.
pub fn lstsq(a: &CMat, b: &CMat, rel_tol: f64) -> CMat {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("SVD requested U");
    let v_t = svd.v_t.as_ref().expect("SVD requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rel_tol * smax;
    let mut core = u.adjoint() * b;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let inv = if s > cut { 1.0 / s } else { 0.0 };
        for j in 0..core.ncols() {
            core[(i, j)] *= C::new(inv, 0.0);
        }
    }
    v_t.adjoint() * core
}

/// Multiply the matrix by a global phase making its largest-magnitude entry
/// real and positive. Entry ties are broken by position order.
pub fn fix_phase(m: &mut CMat) {
    let mut best = czero();
    let mut best_norm = 0.0;
    for z in m.iter() {
        if z.norm() > best_norm + 1e-14 {
            best_norm = z.norm();
            best = *z;
        }
    }
    if best_norm > 0.0 {
        let phase = best.conj() / best.norm();
        for z in m.iter_mut() {
            *z *= phase;
        }
    }
}
