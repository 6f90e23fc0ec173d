//! Small dense linear algebra helpers shared by the other modules.

use nalgebra::{DMatrix, DVector};

/// Relative threshold below which a smallest singular value is treated as zero
/// when deciding ill-posedness.
pub const SING_TOL: f64 = 1e-12;

/// Compact QR factorization `J = Q R` with `diag(R) >= 0`.
///
/// `J` must have at least as many rows as columns. `Q` is `n × m` with
/// orthonormal columns and `R` is `m × m` upper triangular.
pub fn compact_qr(j: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(j.nrows() >= j.ncols(), "compact QR needs a tall matrix");
    let qr = j.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Full SVD with singular values sorted descending: `(U, σ, Vᵀ)`.
pub fn svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    (
        svd.u.expect("U requested"),
        svd.singular_values,
        svd.v_t.expect("Vᵀ requested"),
    )
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry of `M − Mᵀ`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Solve `R X = B` for upper-triangular `R`. Returns `None` when `R` has a
/// zero (relative to its largest diagonal entry) on the diagonal.
pub fn solve_upper(r: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !triangular_invertible(r) {
        return None;
    }
    r.solve_upper_triangular(b)
}

fn triangular_invertible(r: &DMatrix<f64>) -> bool {
    let d = r.diagonal();
    let scale = d.amax();
    scale > 0.0 && d.iter().all(|v| v.abs() > f64::EPSILON * scale)
}

/// Upper Cholesky factor `R_G` with `G = R_Gᵀ R_G`, or `None` if `G` is not
/// symmetric positive definite.
pub fn cholesky_upper(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !g.is_square() {
        return None;
    }
    let scale = g.amax().max(1.0);
    if asymmetry(g) > 1e-12 * scale {
        return None;
    }
    g.clone().cholesky().map(|c| c.l().transpose())
}

pub fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}
