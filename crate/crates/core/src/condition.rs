//! Condition numbers of critical point problems.
//!
//! For the critical point problem (find `x ∈ I` with `a − x ⟂ T_x I`) the
//! condition number is `‖H_η⁻¹‖`. When an output manifold is attached via a
//! solution manifold with derivative `A = Dπ_O (Dπ_I)⁻¹`, it becomes
//! `‖A H_η⁻¹‖_{I→O}`, where the output norm is induced by a metric `G`.
//! Both are `∞` exactly when `H_η` is singular, i.e. when `‖η‖` equals a
//! critical radius of `I`.

use nalgebra::{DMatrix, DVector};

use crate::curvature::WeingartenData;
use crate::linalg::{self, SING_TOL};
use crate::{Error, Result};

/// Relative discrepancy between the σ-based and curvature-based condition
/// numbers above which a diagnostic is attached to a report.
pub const DISCREPANCY_TOL: f64 = 1e-8;

/// Singular values and auxiliary quantities behind a [`ConditionReport`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Components {
    /// Singular values of `H_η`, descending.
    pub hessian_sigma: Vec<f64>,
    /// `‖A‖_G`, the condition number of the idealized problem, when an output
    /// map is involved.
    pub derivative_norm: Option<f64>,
    /// `max_i 1/|1 − c_i‖η‖|` when curvatures were available.
    pub kappa_from_curvatures: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub kappa: f64,
    pub ill_posed: bool,
    /// Unit vector in orthonormal tangent coordinates of the input manifold
    /// along which a perturbation is amplified by `kappa`. Absent when
    /// `kappa = ∞`.
    pub worst_input_direction: Option<DVector<f64>>,
    pub bounds: Option<(f64, f64)>,
    pub components: Components,
    pub diagnostics: Vec<String>,
}

impl ConditionReport {
    fn ill_posed(components: Components) -> Self {
        Self {
            kappa: f64::INFINITY,
            ill_posed: true,
            worst_input_direction: None,
            bounds: None,
            components,
            diagnostics: Vec::new(),
        }
    }
}

/// Derivative of the solution map in orthonormal input coordinates and
/// caller-chosen output coordinates with metric `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDerivative {
    /// `p × m`.
    pub a: DMatrix<f64>,
    /// `p × p` symmetric positive definite.
    pub g: DMatrix<f64>,
}

impl ProblemDerivative {
    pub fn new(a: DMatrix<f64>, g: DMatrix<f64>) -> Result<Self> {
        if g.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "derivative has {} rows but metric is {:?}",
                a.nrows(),
                g.shape()
            )));
        }
        linalg::cholesky_upper(&g).ok_or(Error::NotSpd)?;
        Ok(Self { a, g })
    }

    /// Euclidean output metric.
    pub fn euclidean(a: DMatrix<f64>) -> Self {
        let p = a.nrows();
        Self {
            a,
            g: DMatrix::identity(p, p),
        }
    }
}

/// `σ₁(R_G M)` with `G = R_Gᵀ R_G`, and the corresponding right singular
/// vector.
pub fn spectral_norm_metric(m: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    if g.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but metric is {:?}",
            m.nrows(),
            g.shape()
        )));
    }
    let rg = linalg::cholesky_upper(g).ok_or(Error::NotSpd)?;
    let (_, sigma, vt) = linalg::svd(&(rg * m));
    Ok((sigma[0], vt.row(0).transpose()))
}

/// `H = I − S` has unit scale, so its singular values are compared against
/// `max(1, σ_max)`.
fn is_singular(sigma: &DVector<f64>) -> bool {
    let smax = sigma[0];
    let smin = sigma[sigma.len() - 1];
    !smin.is_finite() || smin <= SING_TOL * smax.max(1.0)
}

/// `κ = ‖H⁻¹‖ = 1/σ_min(H)`.
pub fn kappa_cpp(h: &DMatrix<f64>) -> ConditionReport {
    let (u, sigma, _) = linalg::svd(h);
    let components = Components {
        hessian_sigma: sigma.iter().copied().collect(),
        ..Default::default()
    };
    if is_singular(&sigma) {
        return ConditionReport::ill_posed(components);
    }
    let k = sigma.len() - 1;
    ConditionReport {
        kappa: 1.0 / sigma[k],
        ill_posed: false,
        worst_input_direction: Some(u.column(k).into_owned()),
        bounds: None,
        components,
        diagnostics: Vec::new(),
    }
}

fn curvature_factors(curvatures: &[f64], eta_norm: f64) -> Option<(f64, f64)> {
    if eta_norm == 0.0 || curvatures.is_empty() {
        return None;
    }
    let d: Vec<f64> = curvatures
        .iter()
        .map(|c| (1.0 - c * eta_norm).abs())
        .collect();
    let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
    let dmax = d.iter().copied().fold(0.0, f64::max);
    Some((dmin, dmax))
}

fn factor_singular(dmin: f64, dmax: f64) -> bool {
    dmin <= SING_TOL * dmax.max(1.0)
}

/// `max_i 1/|1 − c_i‖η‖|`, or `∞` when a factor vanishes.
pub fn kappa_cpp_curvatures(curvatures: &[f64], eta_norm: f64) -> f64 {
    match curvature_factors(curvatures, eta_norm) {
        None => 1.0,
        Some((dmin, dmax)) if factor_singular(dmin, dmax) => f64::INFINITY,
        Some((dmin, _)) => 1.0 / dmin,
    }
}

/// [`kappa_cpp`] cross-checked against [`kappa_cpp_curvatures`].
pub fn kappa_cpp_checked(wd: &WeingartenData) -> ConditionReport {
    let mut report = kappa_cpp(&wd.h);
    let from_c = kappa_cpp_curvatures(&wd.curvatures, wd.eta_norm);
    report.components.kappa_from_curvatures = Some(from_c);
    if let Some(msg) = discrepancy(report.kappa, from_c) {
        log::warn!("{msg}");
        report.diagnostics.push(msg);
    }
    report
}

fn discrepancy(sigma_based: f64, curvature_based: f64) -> Option<String> {
    if sigma_based.is_infinite() && curvature_based.is_infinite() {
        return None;
    }
    let rel = (sigma_based - curvature_based).abs() / sigma_based.abs().max(curvature_based.abs());
    (!(rel <= DISCREPANCY_TOL)).then(|| {
        format!("condition number mismatch: sigma-based {sigma_based:e}, curvature-based {curvature_based:e}")
    })
}

/// `κ = ‖A H⁻¹‖_G`; `∞` if `H` is singular.
pub fn kappa_gcpp(pd: &ProblemDerivative, h: &DMatrix<f64>) -> Result<ConditionReport> {
    if !h.is_square() || h.ncols() != pd.a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "derivative is {:?} but Hessian is {:?}",
            pd.a.shape(),
            h.shape()
        )));
    }
    let sigma_h = linalg::singular_values(h);
    let (derivative_norm, _) = spectral_norm_metric(&pd.a, &pd.g)?;
    let components = Components {
        hessian_sigma: sigma_h.iter().copied().collect(),
        derivative_norm: Some(derivative_norm),
        kappa_from_curvatures: None,
    };
    if is_singular(&sigma_h) {
        return Ok(ConditionReport::ill_posed(components));
    }
    // A H⁻¹ = (H⁻ᵀ Aᵀ)ᵀ
    let h_inv_t_at = h
        .transpose()
        .lu()
        .solve(&pd.a.transpose())
        .ok_or_else(|| Error::DimensionMismatch("Hessian factorization failed".into()))?;
    let (kappa, dir) = spectral_norm_metric(&h_inv_t_at.transpose(), &pd.g)?;
    Ok(ConditionReport {
        kappa,
        ill_posed: false,
        worst_input_direction: Some(dir),
        bounds: None,
        components,
        diagnostics: Vec::new(),
    })
}

/// [`kappa_gcpp`] with curvature bounds attached.
pub fn kappa_gcpp_with_bounds(
    pd: &ProblemDerivative,
    wd: &WeingartenData,
) -> Result<ConditionReport> {
    let mut report = kappa_gcpp(pd, &wd.h)?;
    let kappa_s = report.components.derivative_norm.unwrap_or(0.0);
    let (lo, hi) = kappa_bounds(kappa_s, &wd.curvatures, wd.eta_norm);
    report.bounds = Some((lo, hi));
    if report.kappa.is_finite() && hi.is_finite() {
        let slack = 1e-10 * hi.max(1.0);
        if report.kappa < lo - slack || report.kappa > hi + slack {
            let msg = format!(
                "kappa {:e} outside curvature bounds [{lo:e}, {hi:e}]",
                report.kappa
            );
            log::warn!("{msg}");
            report.diagnostics.push(msg);
        }
    }
    Ok(report)
}

/// Lower and upper bounds on `‖A H⁻¹‖` from `κ[S] = ‖A‖` and the principal
/// curvatures in direction `η`.
pub fn kappa_bounds(kappa_s: f64, curvatures: &[f64], eta_norm: f64) -> (f64, f64) {
    match curvature_factors(curvatures, eta_norm) {
        None => (kappa_s, kappa_s),
        Some((dmin, dmax)) => {
            let hi = if factor_singular(dmin, dmax) {
                f64::INFINITY
            } else {
                kappa_s / dmin
            };
            let lo = if dmax > 0.0 {
                kappa_s / dmax
            } else {
                f64::INFINITY
            };
            (lo, hi)
        }
    }
}

/// `κ_abs · ‖x‖ / ‖y‖`.
pub fn kappa_relative(kappa_abs: f64, x_norm: f64, y_norm: f64) -> Result<f64> {
    if !(y_norm > 0.0) {
        return Err(Error::ZeroOutput);
    }
    if kappa_abs == 0.0 {
        return Ok(0.0);
    }
    Ok(kappa_abs * x_norm / y_norm)
}

/// Signed offsets `t` along the unit normal ray `x + t w` at which the
/// problem becomes ill-posed: `{1/c_i : c_i ≠ 0}`, ascending, duplicates kept.
pub fn ill_posedness_certificate(curvatures: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = curvatures
        .iter()
        .filter(|c| **c != 0.0)
        .map(|c| 1.0 / c)
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(r: usize, c: usize, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(r, c, x)
    }

    #[test]
    fn spectral_norm_examples() {
        let (s, _) =
            spectral_norm_metric(&DMatrix::identity(3, 3), &DMatrix::identity(3, 3)).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let (s, _) = spectral_norm_metric(&m(1, 1, &[3.0]), &m(1, 1, &[4.0])).unwrap();
        assert!((s - 6.0).abs() < 1e-14);
        let (s, dir) =
            spectral_norm_metric(&m(2, 2, &[5.0, 0.0, 0.0, 2.0]), &DMatrix::identity(2, 2))
                .unwrap();
        assert!((s - 5.0).abs() < 1e-14);
        assert!((dir[0].abs() - 1.0).abs() < 1e-14 && dir[1].abs() < 1e-14);
        assert_eq!(
            spectral_norm_metric(&DMatrix::identity(2, 2), &m(2, 2, &[1.0, 2.0, 2.0, 1.0])),
            Err(Error::NotSpd)
        );
    }

    #[test]
    fn kappa_cpp_examples() {
        let r = kappa_cpp(&DMatrix::identity(2, 2));
        assert_eq!(r.kappa, 1.0);
        assert!(!r.ill_posed);
        assert!((kappa_cpp(&m(1, 1, &[0.5])).kappa - 2.0).abs() < 1e-15);
        assert!((kappa_cpp(&(DMatrix::identity(2, 2) * 2.0)).kappa - 0.5).abs() < 1e-15);
        let sing = kappa_cpp(&m(1, 1, &[0.0]));
        assert!(sing.ill_posed && sing.kappa.is_infinite() && sing.worst_input_direction.is_none());
    }

    #[test]
    fn kappa_cpp_worst_direction_is_small_eigenvector() {
        let r = kappa_cpp(&m(2, 2, &[3.0, 0.0, 0.0, 0.25]));
        assert!((r.kappa - 4.0).abs() < 1e-14);
        let d = r.worst_input_direction.unwrap();
        assert!(d[0].abs() < 1e-14 && (d[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn curvature_formula_examples() {
        assert!((kappa_cpp_curvatures(&[2.0], 0.25) - 2.0).abs() < 1e-15);
        let t = 0.7;
        assert!((kappa_cpp_curvatures(&[-1.0, -1.0], t) - 1.0 / (1.0 + t)).abs() < 1e-15);
        assert_eq!(kappa_cpp_curvatures(&[3.0, -2.0], 0.0), 1.0);
        assert!(kappa_cpp_curvatures(&[2.0], 0.5).is_infinite());
    }

    #[test]
    fn gcpp_reduces_to_cpp_and_to_kappa_s() {
        let h = m(2, 2, &[0.8, 0.1, 0.1, 0.4]);
        let cpp = kappa_cpp(&h);
        let gcpp = kappa_gcpp(&ProblemDerivative::euclidean(DMatrix::identity(2, 2)), &h).unwrap();
        assert!((cpp.kappa - gcpp.kappa).abs() < 1e-13 * cpp.kappa);

        let a = m(3, 2, &[1.0, 2.0, 0.0, 1.0, -1.0, 0.5]);
        let sigma1 = linalg::singular_values(&a)[0];
        let at_zero =
            kappa_gcpp(&ProblemDerivative::euclidean(a), &DMatrix::identity(2, 2)).unwrap();
        assert!((at_zero.kappa - sigma1).abs() < 1e-13 * sigma1);

        let sing = kappa_gcpp(
            &ProblemDerivative::euclidean(DMatrix::identity(2, 2)),
            &m(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        )
        .unwrap();
        assert!(sing.ill_posed);
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(kappa_bounds(3.0, &[2.0, -1.0], 0.0), (3.0, 3.0));
        let (lo, hi) = kappa_bounds(3.0, &[2.0], 0.25);
        assert!((lo - 6.0).abs() < 1e-14 && (hi - 6.0).abs() < 1e-14);
        let (lo, hi) = kappa_bounds(1.0, &[-1.0, 3.0], 0.1);
        assert!((lo - 1.0 / 1.1).abs() < 1e-14);
        assert!((hi - 1.0 / 0.7).abs() < 1e-13);
        assert!(kappa_bounds(1.0, &[2.0], 0.5).1.is_infinite());
    }

    #[test]
    fn relative_condition() {
        assert_eq!(kappa_relative(2.0, 3.0, 6.0).unwrap(), 1.0);
        assert_eq!(kappa_relative(0.0, 3.0, 6.0).unwrap(), 0.0);
        assert_eq!(kappa_relative(1.0, 5.0, 5.0).unwrap(), 1.0);
        assert_eq!(kappa_relative(1.0, 5.0, 0.0), Err(Error::ZeroOutput));
    }

    #[test]
    fn certificates() {
        assert_eq!(ill_posedness_certificate(&[2.0]), vec![0.5]);
        assert!(ill_posedness_certificate(&[0.0, 0.0]).is_empty());
        assert_eq!(ill_posedness_certificate(&[-1.0, -1.0]), vec![-1.0, -1.0]);
    }

    #[test]
    fn problem_derivative_rejects_indefinite_metric() {
        let a = DMatrix::identity(2, 2);
        assert_eq!(
            ProblemDerivative::new(a.clone(), m(2, 2, &[1.0, 0.0, 0.0, -1.0])),
            Err(Error::NotSpd)
        );
        assert!(ProblemDerivative::new(a, m(2, 2, &[2.0, 0.5, 0.5, 1.0])).is_ok());
    }

    #[test]
    fn checked_report_flags_inconsistent_curvatures() {
        let wd = WeingartenData {
            s_hat: m(1, 1, &[0.5]),
            s: m(1, 1, &[0.5]),
            h: m(1, 1, &[0.5]),
            curvatures: vec![3.0],
            eta_norm: 0.25,
        };
        let r = kappa_cpp_checked(&wd);
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.kappa, 2.0);
    }
}
