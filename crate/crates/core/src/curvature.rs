//! Weingarten maps and principal curvatures of parametrized manifolds.
//!
//! For a normal vector `η` at `x = φ(u)`, the contraction of the second
//! fundamental form with `η` in the (non-orthonormal) coordinate frame
//! `∂φ/∂u_i` is `Ŝ_ij = ⟨∂²φ/∂u_i∂u_j, η⟩`. With `Dφ(u) = Q R`, the Weingarten
//! map in the orthonormal frame `Q` is `S = R⁻ᵀ Ŝ R⁻¹`, and the Riemannian
//! Hessian of `½‖x − a‖²` at a critical point with `a − x = η` is
//! `H = I − S`.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::manifold::{
    check_normal, check_param_dim, fd_second_derivative, tangent_frame, NormalVector,
    Parametrization, TangentFrame, FD_STEP_FIRST, FD_STEP_SECOND,
};
use crate::{Error, Result};

/// Which second derivatives feed the contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivatives {
    /// Analytic when the parametrization provides them, else finite differences.
    #[default]
    Auto,
    /// Always central finite differences (step [`FD_STEP_SECOND`]).
    FiniteDifference,
}

/// `[⟨∂²φ/∂u_i∂u_j, η⟩]_{ij}` without symmetrization.
pub fn contraction_unsymmetrized<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &DVector<f64>,
    route: Derivatives,
) -> DMatrix<f64> {
    let m = param.intrinsic_dim();
    DMatrix::from_fn(m, m, |i, j| {
        let d2 = match route {
            Derivatives::Auto => param.second_derivative(u, i, j),
            Derivatives::FiniteDifference => fd_second_derivative(param, u, i, j, FD_STEP_SECOND),
        };
        d2.dot(eta)
    })
}

/// Contraction `Ŝ` of the second fundamental form with the normal vector
/// `eta`, in the coordinate frame of the parametrization.
pub fn second_fundamental_contraction<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &NormalVector,
) -> Result<DMatrix<f64>> {
    second_fundamental_contraction_with(param, u, eta, Derivatives::Auto)
}

pub fn second_fundamental_contraction_with<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &NormalVector,
    route: Derivatives,
) -> Result<DMatrix<f64>> {
    let frame = tangent_frame(param, u)?;
    check_normal(&frame, &eta.eta)?;
    Ok(linalg::symmetrize(&contraction_unsymmetrized(
        param, u, &eta.eta, route,
    )))
}

/// Change of basis `S = R⁻ᵀ Ŝ R⁻¹`, symmetrized.
pub fn weingarten(s_hat: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !r.is_square() || r.nrows() != s_hat.nrows() || !s_hat.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Ŝ is {:?}, R is {:?}",
            s_hat.shape(),
            r.shape()
        )));
    }
    // Z = R⁻ᵀ Ŝ, then S = Z R⁻¹ via Rᵀ Sᵀ = Zᵀ.
    let rt = r.transpose();
    let d = r.diagonal();
    let scale = d.amax();
    if !(scale > 0.0) || d.iter().any(|v| v.abs() <= f64::EPSILON * scale) {
        return Err(Error::SingularR);
    }
    let z = rt.solve_lower_triangular(s_hat).ok_or(Error::SingularR)?;
    let st = rt
        .solve_lower_triangular(&z.transpose())
        .ok_or(Error::SingularR)?;
    Ok(linalg::symmetrize(&st.transpose()))
}

/// `H = I − S`.
pub fn hessian(s: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::identity(s.nrows(), s.ncols()) - s
}

/// Reciprocal absolute curvatures; zero curvature maps to `∞`.
pub fn critical_radii(curvatures: &[f64]) -> Vec<f64> {
    curvatures
        .iter()
        .map(|&c| {
            if c == 0.0 {
                f64::INFINITY
            } else {
                1.0 / c.abs()
            }
        })
        .collect()
}

/// Weingarten map of a manifold at a point in a fixed normal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenData {
    /// Frame coordinates.
    pub s_hat: DMatrix<f64>,
    /// Orthonormal coordinates.
    pub s: DMatrix<f64>,
    /// Riemannian Hessian `I − S`.
    pub h: DMatrix<f64>,
    /// Eigenvalues of `S / ‖η‖`, ascending; empty when `‖η‖ = 0`.
    pub curvatures: Vec<f64>,
    pub eta_norm: f64,
}

impl WeingartenData {
    pub fn new(s_hat: DMatrix<f64>, r: &DMatrix<f64>, eta_norm: f64) -> Result<Self> {
        let s = weingarten(&s_hat, r)?;
        let h = hessian(&s);
        let curvatures = if eta_norm > 0.0 {
            linalg::sym_eigenvalues(&(&s / eta_norm))
        } else {
            Vec::new()
        };
        Ok(Self {
            s_hat,
            s,
            h,
            curvatures,
            eta_norm,
        })
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Principal curvatures in the direction `η / ‖η‖`, ascending.
    pub fn principal_curvatures(&self) -> Result<Vec<f64>> {
        if self.eta_norm > 0.0 {
            Ok(self.curvatures.clone())
        } else {
            Err(Error::ZeroNormal)
        }
    }

    pub fn critical_radii(&self) -> Result<Vec<f64>> {
        self.principal_curvatures().map(|c| critical_radii(&c))
    }
}

/// Weingarten data of `param` at `u` in the normal direction `eta`.
pub fn weingarten_data<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &NormalVector,
) -> Result<(TangentFrame, WeingartenData)> {
    weingarten_data_with(param, u, eta, Derivatives::Auto)
}

pub fn weingarten_data_with<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &NormalVector,
    route: Derivatives,
) -> Result<(TangentFrame, WeingartenData)> {
    let frame = tangent_frame(param, u)?;
    check_normal(&frame, &eta.eta)?;
    let s_hat = linalg::symmetrize(&contraction_unsymmetrized(param, u, &eta.eta, route));
    let wd = WeingartenData::new(s_hat, &frame.r, eta.norm())?;
    Ok((frame, wd))
}

/// Weingarten map in orthonormal coordinates from its definition as the
/// tangential part of `−∇_v N`, where `N(u') = P_{N_{φ(u')}} η` extends `eta`
/// to a normal field. Derivatives of `N` are central differences.
pub fn shape_operator_via_normal_extension<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    eta: &NormalVector,
) -> Result<DMatrix<f64>> {
    check_param_dim(param, u)?;
    let frame = tangent_frame(param, u)?;
    check_normal(&frame, &eta.eta)?;
    let m = param.intrinsic_dim();
    let h = FD_STEP_FIRST;
    let normal_field = |v: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(tangent_frame(param, v)?.project_normal(&eta.eta))
    };
    let mut minus_dn = DMatrix::zeros(param.ambient_dim(), m);
    for k in 0..m {
        let mut up = u.clone();
        let mut um = u.clone();
        up[k] += h;
        um[k] -= h;
        let dn = (normal_field(&up)? - normal_field(&um)?) / (2.0 * h);
        minus_dn.set_column(k, &(-dn));
    }
    // S (Q R e_k) = P_T(−∂_k N)  ⇒  S R = Qᵀ(−∂N)  ⇒  Rᵀ Sᵀ = (Qᵀ(−∂N))ᵀ
    let sr = frame.q.tr_mul(&minus_dn);
    let st = frame
        .r
        .transpose()
        .solve_lower_triangular(&sr.transpose())
        .ok_or(Error::SingularR)?;
    Ok(linalg::symmetrize(&st.transpose()))
}
