//! The pinhole multiview manifold and the condition of triangulation.
//!
//! A rig of `r` projective cameras `P_ℓ = [A_ℓ b_ℓ; c_ℓᵀ d_ℓ]` maps a world
//! point `y ∈ ℝ³` to the stacked image points
//! `μ_r(y) = [(A_ℓ y + b_ℓ) / α_ℓ(y)]_ℓ` with `α_ℓ(y) = c_ℓᵀ y + d_ℓ`.
//! Off the principal planes and the baseline of the first two cameras, `μ_r`
//! is a diffeomorphism onto a 3-dimensional submanifold of `ℝ^{2r}`, so the
//! rig itself is a [`Parametrization`].
//!
//! The condition number of triangulating `y` from `a = μ_r(y) + η`, with `η`
//! normal, is `1/σ₃((I − S_η) R)` where `Dμ_r(y) = Q R`.

use nalgebra::{DMatrix, DVector, Matrix2x3, Matrix3, Matrix3x4, Vector2, Vector3, Vector4};

use crate::condition::{kappa_bounds, Components, ConditionReport};
use crate::curvature::WeingartenData;
use crate::linalg::{self, SING_TOL};
use crate::manifold::{check_normal, Parametrization, TangentFrame, RANK_TOL};
use crate::{Error, Result};

/// Absolute tolerance on `|α_ℓ(y)|` and on the distance to the baseline.
pub const DOM_TOL: f64 = 1e-8;
/// Relative gap between the two smallest singular values of the linear
/// triangulation system below which the kernel is considered ambiguous.
pub const KERNEL_GAP_TOL: f64 = 1e-8;
/// Smallest admissible homogeneous weight of a unit-norm kernel vector.
pub const INFINITY_TOL: f64 = 1e-12;

/// Finite projective camera, split into blocks of its `3 × 4` matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub a: Matrix2x3<f64>,
    pub b: Vector2<f64>,
    pub c: Vector3<f64>,
    pub d: f64,
}

impl Camera {
    pub fn from_matrix(p: &Matrix3x4<f64>) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGeometry(
                "camera matrix has non-finite entries".into(),
            ));
        }
        let sv = p.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 1e-12 * smax) {
            return Err(Error::InvalidGeometry(
                "camera matrix must have rank 3".into(),
            ));
        }
        Ok(Self {
            a: p.fixed_view::<2, 3>(0, 0).into_owned(),
            b: p.fixed_view::<2, 1>(0, 3).into_owned(),
            c: p.fixed_view::<1, 3>(2, 0).transpose(),
            d: p[(2, 3)],
        })
    }

    /// Row-major 12-vector.
    pub fn from_row_major(v: &[f64]) -> Result<Self> {
        if v.len() != 12 {
            return Err(Error::InvalidGeometry(format!(
                "camera needs 12 numbers, got {}",
                v.len()
            )));
        }
        Self::from_matrix(&Matrix3x4::from_row_slice(v))
    }

    pub fn to_matrix(&self) -> Matrix3x4<f64> {
        let mut p = Matrix3x4::zeros();
        p.fixed_view_mut::<2, 3>(0, 0).copy_from(&self.a);
        p.fixed_view_mut::<2, 1>(0, 3).copy_from(&self.b);
        p.fixed_view_mut::<1, 3>(2, 0)
            .copy_from(&self.c.transpose());
        p[(2, 3)] = self.d;
        p
    }

    pub fn to_row_major(&self) -> [f64; 12] {
        let p = self.to_matrix();
        std::array::from_fn(|k| p[(k / 4, k % 4)])
    }

    /// Depth-like denominator `α(y) = cᵀy + d`.
    pub fn alpha(&self, y: &Vector3<f64>) -> f64 {
        self.c.dot(y) + self.d
    }

    pub fn project(&self, y: &Vector3<f64>) -> Vector2<f64> {
        (self.a * y + self.b) / self.alpha(y)
    }

    /// Unit-norm homogeneous camera center (right null vector of `P`).
    pub fn center_homogeneous(&self) -> Vector4<f64> {
        let p = self.to_matrix();
        // Cofactor expansion: C_k = (−1)^k det(P with column k removed).
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            Matrix3::from_fn(|i, j| p[(i, cols[j])]).determinant()
        };
        let c = Vector4::new(minor(0), -minor(1), minor(2), -minor(3));
        c / c.norm()
    }

    /// Camera center in world coordinates, `None` for cameras centered at
    /// infinity (affine cameras).
    pub fn center(&self) -> Option<Vector3<f64>> {
        let c = self.center_homogeneous();
        (c[3].abs() > INFINITY_TOL).then(|| c.xyz() / c[3])
    }
}

/// Ordered list of at least two cameras.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraRig {
    cameras: Vec<Camera>,
}

impl CameraRig {
    pub fn new(cameras: Vec<Camera>) -> Result<Self> {
        if cameras.len() < 2 {
            return Err(Error::InvalidGeometry(format!(
                "a rig needs at least 2 cameras, got {}",
                cameras.len()
            )));
        }
        let c1 = cameras[0].center_homogeneous();
        let c2 = cameras[1].center_homogeneous();
        if 1.0 - c1.dot(&c2).abs() <= 1e-14 {
            return Err(Error::InvalidGeometry(
                "first two camera centers coincide".into(),
            ));
        }
        Ok(Self { cameras })
    }

    pub fn cameras(&self) -> &[Camera] {
        &self.cameras
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    /// Rig formed by the first `k` cameras.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.len() {
            return Err(Error::InvalidGeometry(format!(
                "rig has {} cameras, cannot take {k}",
                self.len()
            )));
        }
        Self::new(self.cameras[..k].to_vec())
    }

    /// Distance from `y` to the line through the first two camera centers;
    /// `∞` when both centers are at infinity.
    pub fn baseline_distance(&self, y: &Vector3<f64>) -> f64 {
        let h1 = self.cameras[0].center_homogeneous();
        let h2 = self.cameras[1].center_homogeneous();
        let (p0, dir) = match (self.cameras[0].center(), self.cameras[1].center()) {
            (Some(a), Some(b)) => (a, b - a),
            (Some(a), None) => (a, h2.xyz()),
            (None, Some(b)) => (b, h1.xyz()),
            (None, None) => return f64::INFINITY,
        };
        let w = y - p0;
        let dn = dir.norm();
        if dn == 0.0 {
            return w.norm();
        }
        w.cross(&dir).norm() / dn
    }
}

/// Point of `ℝ^{2r}`, split into `r` image points.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence(pub DVector<f64>);

impl Correspondence {
    pub fn num_views(&self) -> usize {
        self.0.len() / 2
    }

    pub fn block(&self, l: usize) -> Vector2<f64> {
        Vector2::new(self.0[2 * l], self.0[2 * l + 1])
    }
}

fn as_vec3(y: &DVector<f64>) -> Result<Vector3<f64>> {
    if y.len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "world point needs 3 coordinates, got {}",
            y.len()
        )));
    }
    Ok(Vector3::new(y[0], y[1], y[2]))
}

/// True iff every camera sees `y` with `|α_ℓ(y)| > DOM_TOL` and `y` is off
/// the baseline of the first two cameras.
pub fn mv_domain_check(rig: &CameraRig, y: &Vector3<f64>) -> bool {
    y.iter().all(|v| v.is_finite())
        && rig.cameras.iter().all(|cam| cam.alpha(y).abs() > DOM_TOL)
        && rig.baseline_distance(y) > DOM_TOL
}

fn require_domain(rig: &CameraRig, y: &Vector3<f64>) -> Result<()> {
    if mv_domain_check(rig, y) {
        return Ok(());
    }
    let which = rig
        .cameras
        .iter()
        .position(|cam| cam.alpha(y).abs() <= DOM_TOL)
        .map(|l| {
            format!(
                "y = {:?} lies on the principal plane of camera {l}",
                y.as_slice()
            )
        })
        .unwrap_or_else(|| {
            format!(
                "y = {:?} lies on the baseline of the first two cameras",
                y.as_slice()
            )
        });
    Err(Error::OutsideDomain(which))
}

/// `μ_r(y)`.
pub fn mv_project(rig: &CameraRig, y: &Vector3<f64>) -> Result<Correspondence> {
    require_domain(rig, y)?;
    Ok(Correspondence(project_unchecked(rig, y)))
}

fn project_unchecked(rig: &CameraRig, y: &Vector3<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(2 * rig.len());
    for (l, cam) in rig.cameras.iter().enumerate() {
        x.fixed_rows_mut::<2>(2 * l).copy_from(&cam.project(y));
    }
    x
}

/// `Dμ_r(y)`, a `2r × 3` matrix with blocks `A/α − (Ay + b)cᵀ/α²`.
pub fn mv_jacobian(rig: &CameraRig, y: &Vector3<f64>) -> Result<DMatrix<f64>> {
    require_domain(rig, y)?;
    Ok(jacobian_unchecked(rig, y))
}

fn jacobian_unchecked(rig: &CameraRig, y: &Vector3<f64>) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * rig.len(), 3);
    for (l, cam) in rig.cameras.iter().enumerate() {
        let alpha = cam.alpha(y);
        let num = cam.a * y + cam.b;
        let block = cam.a / alpha - num * cam.c.transpose() / (alpha * alpha);
        j.fixed_view_mut::<2, 3>(2 * l, 0).copy_from(&block);
    }
    j
}

/// Pushed-forward frame `E_i = [A_ℓ e_i / α_ℓ − c_{ℓ,i}(A_ℓ y + b_ℓ)/α_ℓ²]_ℓ`,
/// evaluated vector by vector.
pub fn frame_vectors(rig: &CameraRig, y: &Vector3<f64>) -> Result<[DVector<f64>; 3]> {
    require_domain(rig, y)?;
    Ok(std::array::from_fn(|i| {
        let mut e = DVector::zeros(2 * rig.len());
        for (l, cam) in rig.cameras.iter().enumerate() {
            let alpha = cam.alpha(y);
            let v = cam.a.column(i) / alpha - (cam.a * y + cam.b) * (cam.c[i] / (alpha * alpha));
            e.fixed_rows_mut::<2>(2 * l).copy_from(&v);
        }
        e
    }))
}

/// Which cameras enter the linear triangulation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DltCameras {
    /// All `r` cameras (a `2r × 4` system).
    #[default]
    All,
    /// The first two cameras only (the minimal `4 × 4` system).
    FirstTwo,
}

/// Linear triangulation: dehomogenized right singular vector of the smallest
/// singular value of the stacked rows `(x_ℓ e₃ᵀ − e₁ᵀ)P_ℓ`, `(y_ℓ e₃ᵀ − e₂ᵀ)P_ℓ`.
pub fn triangulate_linear(
    rig: &CameraRig,
    x: &Correspondence,
    cameras: DltCameras,
) -> Result<Vector3<f64>> {
    if x.0.len() != 2 * rig.len() {
        return Err(Error::DimensionMismatch(format!(
            "correspondence has {} entries, rig needs {}",
            x.0.len(),
            2 * rig.len()
        )));
    }
    let used = match cameras {
        DltCameras::All => rig.len(),
        DltCameras::FirstTwo => 2,
    };
    let mut sys = DMatrix::zeros(2 * used, 4);
    for l in 0..used {
        let p = rig.cameras[l].to_matrix();
        let pt = x.block(l);
        for k in 0..2 {
            let row = p.row(2) * pt[k] - p.row(k);
            sys.row_mut(2 * l + k).copy_from(&row);
        }
    }
    let (_, sigma, vt) = linalg::svd(&sys);
    let n = sigma.len();
    if sigma[n - 2] - sigma[n - 1] <= KERNEL_GAP_TOL * sigma[0] {
        return Err(Error::DegenerateKernel {
            sigma_a: sigma[n - 2],
            sigma_b: sigma[n - 1],
        });
    }
    let kernel = vt.row(n - 1).transpose();
    let kernel = &kernel / kernel.norm();
    if kernel[3].abs() < INFINITY_TOL {
        return Err(Error::AtInfinity(kernel[3]));
    }
    Ok(Vector3::new(kernel[0], kernel[1], kernel[2]) / kernel[3])
}

fn check_eta_len(rig: &CameraRig, eta: &DVector<f64>) -> Result<()> {
    if eta.len() != 2 * rig.len() {
        return Err(Error::DimensionMismatch(format!(
            "normal vector has {} entries, rig needs {}",
            eta.len(),
            2 * rig.len()
        )));
    }
    Ok(())
}

fn hat_unchecked(rig: &CameraRig, y: &Vector3<f64>, eta: &DVector<f64>) -> Matrix3<f64> {
    let mut s = Matrix3::zeros();
    for (l, cam) in rig.cameras.iter().enumerate() {
        let alpha = cam.alpha(y);
        let eta_l = Vector2::new(eta[2 * l], eta[2 * l + 1]);
        let proj = eta_l.dot(&(cam.a * y + cam.b));
        let eta_a = cam.a.transpose() * eta_l; // (η_ℓᵀ A_ℓ e_j)_j
        let a2 = alpha * alpha;
        for i in 0..3 {
            for j in 0..3 {
                s[(i, j)] += 2.0 * cam.c[i] * cam.c[j] / (a2 * alpha) * proj
                    - cam.c[i] / a2 * eta_a[j]
                    - cam.c[j] / a2 * eta_a[i];
            }
        }
    }
    s
}

/// Closed-form `Ŝ_η` in the frame `(E_1, E_2, E_3)`.
pub fn mv_weingarten_hat(
    rig: &CameraRig,
    y: &Vector3<f64>,
    eta: &DVector<f64>,
) -> Result<Matrix3<f64>> {
    check_eta_len(rig, eta)?;
    let j = mv_jacobian(rig, y)?;
    let frame = TangentFrame::from_jacobian(&j, project_unchecked(rig, y), RANK_TOL)?;
    check_normal(&frame, eta)?;
    Ok(hat_unchecked(rig, y, eta))
}

/// Condition of triangulation at `(μ_r(y) + η, μ_r(y), y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MvCondition {
    pub report: ConditionReport,
    pub frame: TangentFrame,
    pub weingarten: WeingartenData,
    /// Singular values of `(I − S_η) R`, descending.
    pub sigma: [f64; 3],
    /// `Q u`, the worst ambient perturbation direction (unit norm).
    pub worst_ambient_direction: Option<DVector<f64>>,
}

impl MvCondition {
    pub fn kappa(&self) -> f64 {
        self.report.kappa
    }

    pub fn sigma3(&self) -> f64 {
        self.sigma[2]
    }

    /// `κ` of the idealized problem, `1/σ₃(R)`.
    pub fn kappa_ideal(&self) -> Option<f64> {
        self.report.components.derivative_norm
    }
}

/// `κ = 1/σ₃((I − S_η) R)` together with the worst perturbation direction.
pub fn mv_kappa(rig: &CameraRig, y: &Vector3<f64>, eta: &DVector<f64>) -> Result<MvCondition> {
    check_eta_len(rig, eta)?;
    let j = mv_jacobian(rig, y)?;
    let frame = TangentFrame::from_jacobian(&j, project_unchecked(rig, y), RANK_TOL)?;
    check_normal(&frame, eta)?;
    let s_hat = DMatrix::from_iterator(3, 3, hat_unchecked(rig, y, eta).iter().copied());
    let wd = WeingartenData::new(linalg::symmetrize(&s_hat), &frame.r, eta.norm())?;

    let m = &wd.h * &frame.r;
    let (u, sigma, _) = linalg::svd(&m);
    let sigma = [sigma[0], sigma[1], sigma[2]];
    let r_sigma = linalg::singular_values(&frame.r);
    let kappa_ideal = 1.0 / r_sigma[2];
    let bounds = kappa_bounds(kappa_ideal, &wd.curvatures, wd.eta_norm);
    let components = Components {
        hessian_sigma: linalg::singular_values(&wd.h).iter().copied().collect(),
        derivative_norm: Some(kappa_ideal),
        kappa_from_curvatures: None,
    };

    let ill_posed = !(sigma[0] > 0.0) || sigma[2] <= SING_TOL * sigma[0];
    let (kappa, worst, worst_ambient) = if ill_posed {
        (f64::INFINITY, None, None)
    } else {
        let dir = u.column(2).into_owned();
        let amb = frame.lift(&dir);
        (1.0 / sigma[2], Some(dir), Some(amb))
    };
    Ok(MvCondition {
        report: ConditionReport {
            kappa,
            ill_posed,
            worst_input_direction: worst,
            bounds: Some(bounds),
            components,
            diagnostics: Vec::new(),
        },
        frame,
        weingarten: wd,
        sigma,
        worst_ambient_direction: worst_ambient,
    })
}

impl Parametrization for CameraRig {
    fn ambient_dim(&self) -> usize {
        2 * self.len()
    }

    fn intrinsic_dim(&self) -> usize {
        3
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        project_unchecked(self, &Vector3::new(u[0], u[1], u[2]))
    }

    fn analytic_jacobian(&self, u: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(jacobian_unchecked(self, &Vector3::new(u[0], u[1], u[2])))
    }

    fn analytic_second_derivative(
        &self,
        u: &DVector<f64>,
        i: usize,
        j: usize,
    ) -> Option<DVector<f64>> {
        let y = Vector3::new(u[0], u[1], u[2]);
        let mut out = DVector::zeros(2 * self.len());
        for (l, cam) in self.cameras.iter().enumerate() {
            let alpha = cam.alpha(&y);
            let a2 = alpha * alpha;
            let v = (cam.a * y + cam.b) * (2.0 * cam.c[i] * cam.c[j] / (a2 * alpha))
                - cam.a.column(j) * (cam.c[i] / a2)
                - cam.a.column(i) * (cam.c[j] / a2);
            out.fixed_rows_mut::<2>(2 * l).copy_from(&v);
        }
        Some(out)
    }

    fn in_domain(&self, u: &DVector<f64>) -> bool {
        u.len() == 3 && mv_domain_check(self, &Vector3::new(u[0], u[1], u[2]))
    }
}

/// `y` as a parameter vector for the [`Parametrization`] impl.
pub fn param_of(y: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(y.as_slice())
}

/// Inverse of [`param_of`].
pub fn point_of(u: &DVector<f64>) -> Result<Vector3<f64>> {
    as_vec3(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> Camera {
        Camera::from_matrix(&Matrix3x4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ))
        .unwrap()
    }

    fn shifted(tx: f64) -> Camera {
        Camera::from_matrix(&Matrix3x4::new(
            1.0, 0.0, 0.0, -tx, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ))
        .unwrap()
    }

    fn affine(seed: f64) -> Camera {
        Camera::from_matrix(&Matrix3x4::new(
            1.0, seed, 0.0, 0.5, //
            0.0, 1.0, seed, -0.2, //
            0.0, 0.0, 0.0, 1.0,
        ))
        .unwrap()
    }

    fn stereo() -> CameraRig {
        CameraRig::new(vec![canonical(), shifted(1.0)]).unwrap()
    }

    #[test]
    fn canonical_projection() {
        let rig = stereo();
        let x = mv_project(&rig, &Vector3::new(2.0, 4.0, 2.0)).unwrap();
        assert_eq!(x.block(0), Vector2::new(1.0, 2.0));
        assert_eq!(x.block(1), Vector2::new(0.5, 2.0));
    }

    #[test]
    fn affine_rig_is_flat() {
        let rig = CameraRig::new(vec![affine(0.1), affine(-0.3), affine(0.7)]).unwrap();
        let y = Vector3::new(0.3, -1.0, 2.0);
        let x = mv_project(&rig, &y).unwrap();
        for (l, cam) in rig.cameras().iter().enumerate() {
            assert!((x.block(l) - (cam.a * y + cam.b)).norm() < 1e-15);
        }
        let j = mv_jacobian(&rig, &y).unwrap();
        let j2 = mv_jacobian(&rig, &Vector3::new(5.0, 1.0, -3.0)).unwrap();
        assert_eq!(j, j2);
        let frame = TangentFrame::from_jacobian(&j, x.0.clone(), RANK_TOL).unwrap();
        let eta = frame.project_normal(&DVector::from_fn(6, |k, _| (k as f64).sin()));
        assert_eq!(mv_weingarten_hat(&rig, &y, &eta).unwrap(), Matrix3::zeros());
    }

    #[test]
    fn domain_check_excludes_principal_plane_and_baseline() {
        let rig = stereo();
        assert!(!mv_domain_check(&rig, &Vector3::new(0.3, 0.2, 0.0)));
        assert!(!mv_domain_check(&rig, &Vector3::new(0.5, 0.0, 0.0)));
        assert!(mv_domain_check(&rig, &Vector3::new(0.5, 0.3, 3.0)));
        assert!(matches!(
            mv_project(&rig, &Vector3::new(0.3, 0.2, 0.0)),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn baseline_points_are_excluded_even_off_principal_plane() {
        let c1 = canonical();
        let c2 = Camera::from_matrix(&Matrix3x4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, -1.0,
        ))
        .unwrap(); // center (0, 0, 1): baseline is the optical axis
        let rig = CameraRig::new(vec![c1, c2]).unwrap();
        assert!(!mv_domain_check(&rig, &Vector3::new(0.0, 0.0, 3.0)));
        assert!(mv_domain_check(&rig, &Vector3::new(0.1, 0.0, 3.0)));
    }

    #[test]
    fn rig_rejects_coincident_centers_and_single_camera() {
        assert!(CameraRig::new(vec![canonical()]).is_err());
        let twice = Camera::from_matrix(&(canonical().to_matrix() * 2.0)).unwrap();
        assert!(matches!(
            CameraRig::new(vec![canonical(), twice]),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn rank_two_camera_is_rejected() {
        let p = Matrix3x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0);
        assert!(Camera::from_matrix(&p).is_err());
    }

    #[test]
    fn camera_row_major_round_trip_and_center() {
        let cam = shifted(2.5);
        let back = Camera::from_row_major(&cam.to_row_major()).unwrap();
        assert_eq!(cam, back);
        let c = cam.center().unwrap();
        assert!((c - Vector3::new(2.5, 0.0, 0.0)).norm() < 1e-14);
        assert!(affine(0.2).center().is_none());
    }

    #[test]
    fn stereo_round_trip_both_modes() {
        let rig = stereo();
        let y = Vector3::new(0.3, -0.7, 4.0);
        let x = mv_project(&rig, &y).unwrap();
        for mode in [DltCameras::All, DltCameras::FirstTwo] {
            let yh = triangulate_linear(&rig, &x, mode).unwrap();
            assert!((yh - y).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_vectors_match_jacobian_columns() {
        let rig = CameraRig::new(vec![canonical(), shifted(1.0), shifted(-0.4)]).unwrap();
        let y = Vector3::new(0.2, 0.1, 2.0);
        let j = mv_jacobian(&rig, &y).unwrap();
        let e = frame_vectors(&rig, &y).unwrap();
        for i in 0..3 {
            assert!((j.column(i) - &e[i]).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_normal_gives_ideal_condition() {
        let rig = CameraRig::new(vec![canonical(), shifted(1.0), shifted(-0.4)]).unwrap();
        let y = Vector3::new(0.2, 0.1, 2.0);
        let mv = mv_kappa(&rig, &y, &DVector::zeros(6)).unwrap();
        let r_sigma = linalg::singular_values(&mv.frame.r);
        assert!((mv.kappa() - 1.0 / r_sigma[2]).abs() <= 1e-12 * mv.kappa());
        let (lo, hi) = mv.report.bounds.unwrap();
        assert_eq!(lo, hi);
    }

    #[test]
    fn tangential_eta_is_rejected() {
        let rig = stereo();
        let y = Vector3::new(0.2, 0.1, 2.0);
        let j = mv_jacobian(&rig, &y).unwrap();
        let eta = j.column(0).into_owned();
        assert!(matches!(
            mv_kappa(&rig, &y, &eta),
            Err(Error::NotNormal { .. })
        ));
        assert!(matches!(
            mv_weingarten_hat(&rig, &y, &eta),
            Err(Error::NotNormal { .. })
        ));
    }
}
