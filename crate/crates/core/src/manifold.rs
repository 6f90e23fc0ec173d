//! Embedded submanifolds of ℝⁿ given by local parametrizations.
//!
//! A [`Parametrization`] is a smooth immersion `u ∈ ℝ^m ↦ φ(u) ∈ ℝⁿ`. Its
//! image is the piece of the input manifold under study, and its Jacobian
//! spans the tangent space. Derivatives fall back to central finite
//! differences when no analytic expression is supplied.
//!
//! [`TangentFrame`] holds the compact QR factorization `Q R = Dφ(u)`; `Q` is
//! an orthonormal tangent basis and `R` converts parameter coordinates to
//! orthonormal tangent coordinates.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result};

/// Default relative rank tolerance for the Jacobian (`σ_m > RANK_TOL · σ_1`).
pub const RANK_TOL: f64 = 1e-10;
/// Central-difference step for first derivatives.
pub const FD_STEP_FIRST: f64 = 1e-5;
/// Central-difference step for second derivatives.
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Relative tolerance on `‖Qᵀη‖ / ‖η‖` for accepting a normal vector.
pub const NORMAL_TOL: f64 = 1e-8;

/// A local smooth immersion `φ: ℝ^m → ℝⁿ`.
pub trait Parametrization: Send + Sync {
    fn ambient_dim(&self) -> usize;

    fn intrinsic_dim(&self) -> usize;

    fn eval(&self, u: &DVector<f64>) -> DVector<f64>;

    /// Analytic `n × m` Jacobian, if known.
    fn analytic_jacobian(&self, _u: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }

    /// Analytic `∂²φ/∂u_i∂u_j`, if known.
    fn analytic_second_derivative(
        &self,
        _u: &DVector<f64>,
        _i: usize,
        _j: usize,
    ) -> Option<DVector<f64>> {
        None
    }

    fn in_domain(&self, _u: &DVector<f64>) -> bool {
        true
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        self.analytic_jacobian(u)
            .unwrap_or_else(|| fd_jacobian(self, u, FD_STEP_FIRST))
    }

    fn second_derivative(&self, u: &DVector<f64>, i: usize, j: usize) -> DVector<f64> {
        self.analytic_second_derivative(u, i, j)
            .unwrap_or_else(|| fd_second_derivative(self, u, i, j, FD_STEP_SECOND))
    }
}

/// Central-difference Jacobian of `φ` at `u`.
pub fn fd_jacobian<P: Parametrization + ?Sized>(p: &P, u: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let m = p.intrinsic_dim();
    let mut jac = DMatrix::zeros(p.ambient_dim(), m);
    for k in 0..m {
        let mut up = u.clone();
        let mut um = u.clone();
        up[k] += h;
        um[k] -= h;
        let col = (p.eval(&up) - p.eval(&um)) / (2.0 * h);
        jac.set_column(k, &col);
    }
    jac
}

/// Central-difference `∂²φ/∂u_i∂u_j` at `u`.
pub fn fd_second_derivative<P: Parametrization + ?Sized>(
    p: &P,
    u: &DVector<f64>,
    i: usize,
    j: usize,
    h: f64,
) -> DVector<f64> {
    let shifted = |di: f64, dj: f64| {
        let mut v = u.clone();
        v[i] += di;
        v[j] += dj;
        p.eval(&v)
    };
    if i == j {
        let mut up = u.clone();
        let mut um = u.clone();
        up[i] += h;
        um[i] -= h;
        (p.eval(&up) - p.eval(u) * 2.0 + p.eval(&um)) / (h * h)
    } else {
        (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
    }
}

/// Orthonormal tangent frame at `φ(u)` from the compact QR of the Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    /// `n × m`, orthonormal columns.
    pub q: DMatrix<f64>,
    /// `m × m`, upper triangular with positive diagonal.
    pub r: DMatrix<f64>,
    pub base_point: DVector<f64>,
}

impl TangentFrame {
    /// Factor a Jacobian. Fails with [`Error::RankDeficient`] when
    /// `σ_m ≤ rank_tol · σ_1`.
    pub fn from_jacobian(
        jacobian: &DMatrix<f64>,
        base_point: DVector<f64>,
        rank_tol: f64,
    ) -> Result<Self> {
        let (n, m) = jacobian.shape();
        if m == 0 || m > n {
            return Err(Error::DimensionMismatch(format!(
                "jacobian must be n x m with 0 < m <= n, got {n} x {m}"
            )));
        }
        if base_point.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "base point has length {}, ambient dimension is {n}",
                base_point.len()
            )));
        }
        let sv = linalg::singular_values(jacobian);
        let tol = rank_tol * sv[0];
        let sigma_min = sv[m - 1];
        if !(sigma_min > tol) {
            return Err(Error::RankDeficient { sigma_min, tol });
        }
        let (q, r) = linalg::compact_qr(jacobian);
        Ok(Self { q, r, base_point })
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.q.ncols()
    }

    /// Coordinates `Qᵀv` of the tangential part of `v`.
    pub fn project_tangent(&self, v: &DVector<f64>) -> DVector<f64> {
        self.q.tr_mul(v)
    }

    /// Tangential part `QQᵀv` as an ambient vector.
    pub fn tangent_component(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.q * self.project_tangent(v)
    }

    /// Normal part `v − QQᵀv`.
    pub fn project_normal(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.tangent_component(v)
    }

    /// Ambient vector with tangent coordinates `w`.
    pub fn lift(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.q * w
    }
}

/// Tangent frame of `param` at `u` with the default rank tolerance.
pub fn tangent_frame<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
) -> Result<TangentFrame> {
    tangent_frame_with_tol(param, u, RANK_TOL)
}

pub fn tangent_frame_with_tol<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    rank_tol: f64,
) -> Result<TangentFrame> {
    check_param_dim(param, u)?;
    if !param.in_domain(u) {
        return Err(Error::OutsideDomain(format!(
            "parameter {:?}",
            u.as_slice()
        )));
    }
    TangentFrame::from_jacobian(&param.jacobian(u), param.eval(u), rank_tol)
}

pub(crate) fn check_param_dim<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
) -> Result<()> {
    if u.len() != param.intrinsic_dim() {
        return Err(Error::DimensionMismatch(format!(
            "parameter has length {}, intrinsic dimension is {}",
            u.len(),
            param.intrinsic_dim()
        )));
    }
    Ok(())
}

/// A vector in the normal space `N_x I` at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalVector {
    pub base_point: DVector<f64>,
    pub eta: DVector<f64>,
}

impl NormalVector {
    /// Wrap `eta`, checking `‖Qᵀη‖ ≤ NORMAL_TOL · ‖η‖`.
    pub fn new(frame: &TangentFrame, eta: DVector<f64>) -> Result<Self> {
        check_normal(frame, &eta)?;
        Ok(Self {
            base_point: frame.base_point.clone(),
            eta,
        })
    }

    /// Normal part of an arbitrary ambient vector.
    pub fn from_projection(frame: &TangentFrame, v: &DVector<f64>) -> Self {
        Self {
            base_point: frame.base_point.clone(),
            eta: frame.project_normal(v),
        }
    }

    pub fn norm(&self) -> f64 {
        self.eta.norm()
    }
}

pub(crate) fn check_normal(frame: &TangentFrame, eta: &DVector<f64>) -> Result<()> {
    if eta.len() != frame.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "normal vector has length {}, ambient dimension is {}",
            eta.len(),
            frame.ambient_dim()
        )));
    }
    let tangential = frame.project_tangent(eta).norm();
    let tol = NORMAL_TOL * eta.norm();
    if tangential > tol {
        return Err(Error::NotNormal { tangential, tol });
    }
    Ok(())
}

/// Round sphere of radius `r` about `center` in ℝ³, charted by longitude and
/// latitude: `φ(u) = center + r (cos u₁ cos u₂, sin u₁ cos u₂, sin u₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub radius: f64,
    pub center: DVector<f64>,
}

impl Sphere {
    pub fn new(radius: f64, center: DVector<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        if center.len() != 3 {
            return Err(Error::InvalidGeometry(format!(
                "sphere center must lie in R^3, got length {}",
                center.len()
            )));
        }
        Ok(Self { radius, center })
    }

    pub fn unit() -> Self {
        Self {
            radius: 1.0,
            center: DVector::zeros(3),
        }
    }
}

impl Parametrization for Sphere {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn intrinsic_dim(&self) -> usize {
        2
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        &self.center + DVector::from_vec(vec![c1 * c2, s1 * c2, s2]) * self.radius
    }

    fn analytic_jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        let r = self.radius;
        Some(DMatrix::from_row_slice(
            3,
            2,
            &[
                -r * s1 * c2,
                -r * c1 * s2,
                r * c1 * c2,
                -r * s1 * s2,
                0.0,
                r * c2,
            ],
        ))
    }

    fn analytic_second_derivative(
        &self,
        u: &DVector<f64>,
        i: usize,
        j: usize,
    ) -> Option<DVector<f64>> {
        let (s1, c1) = u[0].sin_cos();
        let (s2, c2) = u[1].sin_cos();
        let v = match (i.min(j), i.max(j)) {
            (0, 0) => vec![-c1 * c2, -s1 * c2, 0.0],
            (0, 1) => vec![s1 * s2, -c1 * s2, 0.0],
            (1, 1) => vec![-c1 * c2, -s1 * c2, -s2],
            _ => return None,
        };
        Some(DVector::from_vec(v) * self.radius)
    }

    fn in_domain(&self, u: &DVector<f64>) -> bool {
        u[1].cos().abs() > 1e-8
    }
}

/// Planar curve `φ(u) = (u, c·u²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Graph2d {
    pub coeff: f64,
}

impl Parametrization for Graph2d {
    fn ambient_dim(&self) -> usize {
        2
    }

    fn intrinsic_dim(&self) -> usize {
        1
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![u[0], self.coeff * u[0] * u[0]])
    }

    fn analytic_jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_column_slice(
            2,
            1,
            &[1.0, 2.0 * self.coeff * u[0]],
        ))
    }

    fn analytic_second_derivative(
        &self,
        _u: &DVector<f64>,
        _i: usize,
        _j: usize,
    ) -> Option<DVector<f64>> {
        Some(DVector::from_vec(vec![0.0, 2.0 * self.coeff]))
    }
}

/// Elliptic paraboloid `φ(u) = (u₁, u₂, a·u₁² + b·u₂²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paraboloid {
    pub a: f64,
    pub b: f64,
}

impl Default for Paraboloid {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

impl Parametrization for Paraboloid {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn intrinsic_dim(&self) -> usize {
        2
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![
            u[0],
            u[1],
            self.a * u[0] * u[0] + self.b * u[1] * u[1],
        ])
    }

    fn analytic_jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_row_slice(
            3,
            2,
            &[1.0, 0.0, 0.0, 1.0, 2.0 * self.a * u[0], 2.0 * self.b * u[1]],
        ))
    }

    fn analytic_second_derivative(
        &self,
        _u: &DVector<f64>,
        i: usize,
        j: usize,
    ) -> Option<DVector<f64>> {
        let z = match (i, j) {
            (0, 0) => 2.0 * self.a,
            (1, 1) => 2.0 * self.b,
            _ => 0.0,
        };
        Some(DVector::from_vec(vec![0.0, 0.0, z]))
    }
}

/// Affine subspace `φ(u) = offset + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub basis: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl Affine {
    pub fn new(basis: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let (n, m) = basis.shape();
        if m == 0 || m > n || offset.len() != n {
            return Err(Error::InvalidGeometry(format!(
                "affine basis {n} x {m} incompatible with offset of length {}",
                offset.len()
            )));
        }
        let sv = linalg::singular_values(&basis);
        if !(sv[m - 1] > RANK_TOL * sv[0]) {
            return Err(Error::InvalidGeometry(
                "affine basis is rank deficient".into(),
            ));
        }
        Ok(Self { basis, offset })
    }
}

impl Parametrization for Affine {
    fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    fn intrinsic_dim(&self) -> usize {
        self.basis.ncols()
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.basis * u
    }

    fn analytic_jacobian(&self, _u: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(self.basis.clone())
    }

    fn analytic_second_derivative(
        &self,
        _u: &DVector<f64>,
        _i: usize,
        _j: usize,
    ) -> Option<DVector<f64>> {
        Some(DVector::zeros(self.ambient_dim()))
    }
}

type EvalFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type JacFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;
type HessFn = dyn Fn(&DVector<f64>, usize, usize) -> DVector<f64> + Send + Sync;
type DomainFn = dyn Fn(&DVector<f64>) -> bool + Send + Sync;

/// Parametrization assembled from closures.
pub struct FnParametrization {
    ambient_dim: usize,
    intrinsic_dim: usize,
    eval: Box<EvalFn>,
    jac: Option<Box<JacFn>>,
    hess: Option<Box<HessFn>>,
    domain: Option<Box<DomainFn>>,
}

impl FnParametrization {
    pub fn new(
        ambient_dim: usize,
        intrinsic_dim: usize,
        eval: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if intrinsic_dim == 0 || intrinsic_dim > ambient_dim {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < m <= n, got m = {intrinsic_dim}, n = {ambient_dim}"
            )));
        }
        Ok(Self {
            ambient_dim,
            intrinsic_dim,
            eval: Box::new(eval),
            jac: None,
            hess: None,
            domain: None,
        })
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jac = Some(Box::new(jac));
        self
    }

    pub fn with_second_derivative(
        mut self,
        hess: impl Fn(&DVector<f64>, usize, usize) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hess = Some(Box::new(hess));
        self
    }

    pub fn with_domain(
        mut self,
        domain: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.domain = Some(Box::new(domain));
        self
    }
}

impl Parametrization for FnParametrization {
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        (self.eval)(u)
    }

    fn analytic_jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.jac.as_ref().map(|f| f(u))
    }

    fn analytic_second_derivative(
        &self,
        u: &DVector<f64>,
        i: usize,
        j: usize,
    ) -> Option<DVector<f64>> {
        self.hess.as_ref().map(|f| f(u, i, j))
    }

    fn in_domain(&self, u: &DVector<f64>) -> bool {
        self.domain.as_ref().is_none_or(|f| f(u))
    }
}

/// Named built-in manifolds.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Sphere {
        radius: f64,
        center: [f64; 3],
    },
    Graph2d {
        coeff: f64,
    },
    Paraboloid {
        a: f64,
        b: f64,
    },
    Affine {
        basis: DMatrix<f64>,
        offset: DVector<f64>,
    },
}

impl Builtin {
    pub fn build(&self) -> Result<Box<dyn Parametrization>> {
        Ok(match self {
            Builtin::Sphere { radius, center } => {
                Box::new(Sphere::new(*radius, DVector::from_column_slice(center))?)
            }
            Builtin::Graph2d { coeff } => {
                if !coeff.is_finite() {
                    return Err(Error::InvalidGeometry(
                        "graph coefficient must be finite".into(),
                    ));
                }
                Box::new(Graph2d { coeff: *coeff })
            }
            Builtin::Paraboloid { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidGeometry(
                        "paraboloid coefficients must be finite".into(),
                    ));
                }
                Box::new(Paraboloid { a: *a, b: *b })
            }
            Builtin::Affine { basis, offset } => {
                Box::new(Affine::new(basis.clone(), offset.clone())?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn affine_plane_frame_is_identity() {
        let basis = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let plane = Affine::new(basis, DVector::zeros(3)).unwrap();
        let f = tangent_frame(&plane, &v(&[0.3, -2.0])).unwrap();
        assert!((&f.r - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);
        assert!((f.q.column(0) - v(&[1.0, 0.0, 0.0])).amax() < 1e-15);
        assert!((f.q.column(1) - v(&[0.0, 1.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn parabola_vertex_frame() {
        let p = Graph2d { coeff: 1.0 };
        let f = tangent_frame(&p, &v(&[0.0])).unwrap();
        assert!((f.q.column(0) - v(&[1.0, 0.0])).amax() < 1e-15);
        assert!((f.r[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(f.project_normal(&v(&[3.0, 5.0])), v(&[0.0, 5.0]));
    }

    #[test]
    fn sphere_chart_origin_frame() {
        let s = Sphere::unit();
        let f = tangent_frame(&s, &v(&[0.0, 0.0])).unwrap();
        assert!((f.q.column(0) - v(&[0.0, 1.0, 0.0])).amax() < 1e-15);
        assert!((f.q.column(1) - v(&[0.0, 0.0, 1.0])).amax() < 1e-15);
        assert!((&f.r - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);
        assert!((f.q.tr_mul(&f.q) - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
        assert!(f.project_tangent(&v(&[1.0, 0.0, 0.0])).amax() < 1e-15);
        assert!((f.project_tangent(&v(&[0.0, 1.0, 0.0])) - v(&[1.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn tangent_vector_has_zero_normal_part_and_normal_is_kept() {
        let f = tangent_frame(&Sphere::unit(), &v(&[0.4, 0.2])).unwrap();
        let w = v(&[0.7, -1.3]);
        assert!(f.project_normal(&f.lift(&w)).norm() < 1e-15);
        let x = f.base_point.clone();
        assert!((f.project_normal(&x) - &x).norm() < 1e-15);
    }

    #[test]
    fn builtins_evaluate() {
        let g = Builtin::Graph2d { coeff: 1.0 }.build().unwrap();
        assert_eq!(g.eval(&v(&[0.5])), v(&[0.5, 0.25]));
        let s = Builtin::Sphere {
            radius: 1.0,
            center: [0.0; 3],
        }
        .build()
        .unwrap();
        assert!((s.eval(&v(&[0.0, 0.0])) - v(&[1.0, 0.0, 0.0])).norm() < 1e-15);
        let a = Builtin::Affine {
            basis: DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]),
            offset: v(&[1.0, 1.0, 1.0]),
        }
        .build()
        .unwrap();
        assert_eq!(a.second_derivative(&v(&[4.0]), 0, 0), DVector::zeros(3));
    }

    #[test]
    fn invalid_builtins_are_rejected() {
        assert!(matches!(
            Builtin::Sphere {
                radius: 0.0,
                center: [0.0; 3]
            }
            .build(),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            Builtin::Affine {
                basis: DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]),
                offset: DVector::zeros(3)
            }
            .build(),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn rank_deficient_jacobian_is_reported() {
        // cusp: φ(u) = (u², u³) has zero velocity at u = 0
        let cusp = FnParametrization::new(2, 1, |u| v(&[u[0] * u[0], u[0] * u[0] * u[0]]))
            .unwrap()
            .with_jacobian(|u| DMatrix::from_column_slice(2, 1, &[2.0 * u[0], 3.0 * u[0] * u[0]]));
        assert!(matches!(
            tangent_frame(&cusp, &v(&[0.0])),
            Err(Error::RankDeficient { .. })
        ));
        assert!(tangent_frame(&cusp, &v(&[0.5])).is_ok());
    }

    #[test]
    fn sphere_pole_is_outside_domain() {
        let s = Sphere::unit();
        assert!(matches!(
            tangent_frame(&s, &v(&[0.0, std::f64::consts::FRAC_PI_2])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn normal_vector_check() {
        let f = tangent_frame(&Graph2d { coeff: 1.0 }, &v(&[0.0])).unwrap();
        assert!(NormalVector::new(&f, v(&[0.0, 2.0])).is_ok());
        assert!(matches!(
            NormalVector::new(&f, v(&[1e-3, 2.0])),
            Err(Error::NotNormal { .. })
        ));
        let n = NormalVector::from_projection(&f, &v(&[4.0, -1.0]));
        assert_eq!(n.eta, v(&[0.0, -1.0]));
    }
}
