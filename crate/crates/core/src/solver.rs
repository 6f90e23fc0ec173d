//! Levenberg–Marquardt for small dense nonlinear least-squares problems.
//!
//! Minimizes `½‖r(u)‖²` with the classic multiplicative damping schedule:
//! the damped normal equations `(JᵀJ + λ diag(JᵀJ)) δ = −Jᵀr` are solved, a
//! step is accepted if it lowers the cost (then `λ ← λ·down`), and
//! rejected otherwise (`λ ← λ·up`). Once the cost no longer changes in
//! floating point, a step that changes it only at rounding level is still
//! accepted when it shrinks `‖Jᵀr‖`. Accepted residual norms decrease up to
//! that rounding level.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::manifold::{check_param_dim, tangent_frame, Parametrization, FD_STEP_FIRST};
use crate::multiview::{param_of, triangulate_linear, CameraRig, Correspondence, DltCameras};
use crate::{Error, Result};

/// Relative Jacobian/finite-difference discrepancy that triggers a warning.
/// Relative cost change treated as floating-point noise.
const COST_ROUNDING: f64 = 1e3 * f64::EPSILON;
pub const JACOBIAN_CHECK_TOL: f64 = 1e-5;
/// Damping beyond which the solver gives up on finding a descent step.
const MAX_DAMPING: f64 = 1e16;
const MIN_DAMPING: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub initial_damping: f64,
    pub damping_up: f64,
    pub damping_down: f64,
    /// Consecutive damping increases allowed while trial points leave the
    /// domain.
    pub domain_retries: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-12,
            step_tol: 1e-14,
            initial_damping: 1e-3,
            damping_up: 10.0,
            damping_down: 0.1,
            domain_retries: 10,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.grad_tol,
            self.step_tol,
            self.initial_damping,
            self.damping_up,
            self.damping_down,
        ];
        if self.max_iters == 0 || positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidGeometry(format!(
                "invalid solver options {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub u_star: DVector<f64>,
    pub residual_norm: f64,
    pub status: SolveStatus,
    /// Number of trial steps (accepted or rejected).
    pub iterations: usize,
    /// `‖Jᵀr‖` at exit.
    pub first_order_norm: f64,
    /// Residual norms after each accepted step, starting with `‖r(u0)‖`.
    pub residual_history: Vec<f64>,
    /// Largest relative discrepancy between the supplied Jacobian and
    /// central differences at `u0`.
    pub jacobian_discrepancy: f64,
}

/// Minimize `½‖residual(u)‖²` from `u0`.
pub fn lm_minimize<R, J>(
    residual: R,
    jacobian: J,
    u0: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<SolveResult>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    lm_minimize_in_domain(residual, jacobian, |_| true, u0, opts)
}

/// [`lm_minimize`] restricted to points where `in_domain` holds.
pub fn lm_minimize_in_domain<R, J, D>(
    residual: R,
    jacobian: J,
    in_domain: D,
    u0: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<SolveResult>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
    D: Fn(&DVector<f64>) -> bool,
{
    opts.validate()?;
    if !in_domain(u0) {
        return Err(Error::OutsideDomain(format!(
            "initial point {:?}",
            u0.as_slice()
        )));
    }
    let mut u = u0.clone();
    let mut r = residual(&u);
    let mut jac = jacobian(&u);
    if jac.nrows() != r.len() || jac.ncols() != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "jacobian is {:?}, expected {} x {}",
            jac.shape(),
            r.len(),
            u.len()
        )));
    }
    let jacobian_discrepancy = check_jacobian(&residual, &jac, &u);
    if jacobian_discrepancy > JACOBIAN_CHECK_TOL {
        log::warn!("supplied jacobian differs from finite differences by {jacobian_discrepancy:e} (relative)");
    }

    let mut cost = 0.5 * r.norm_squared();
    let mut grad = jac.tr_mul(&r);
    let mut history = vec![r.norm()];
    let mut lambda = opts.initial_damping;
    let mut domain_failures = 0;
    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;

    let finish =
        |u: DVector<f64>, r: &DVector<f64>, grad: &DVector<f64>, status, iterations, history| {
            SolveResult {
                u_star: u,
                residual_norm: r.norm(),
                status,
                iterations,
                first_order_norm: grad.norm(),
                residual_history: history,
                jacobian_discrepancy,
            }
        };

    while iterations < opts.max_iters {
        if r.norm() == 0.0 || grad.norm() <= opts.grad_tol * (1.0 + r.norm()) {
            status = SolveStatus::Converged;
            break;
        }
        iterations += 1;

        let jtj = jac.tr_mul(&jac);
        let mut damped = jtj.clone();
        for k in 0..damped.nrows() {
            damped[(k, k)] += lambda * jtj[(k, k)].max(f64::MIN_POSITIVE);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&(-&grad))) else {
            lambda *= opts.damping_up;
            if lambda > MAX_DAMPING {
                status = SolveStatus::Stalled;
                break;
            }
            continue;
        };
        let trial = &u + &step;
        if !in_domain(&trial) {
            domain_failures += 1;
            if domain_failures > opts.domain_retries {
                return Err(Error::DomainEscape {
                    retries: opts.domain_retries,
                });
            }
            lambda *= opts.damping_up;
            continue;
        }
        domain_failures = 0;
        let r_trial = residual(&trial);
        let cost_trial = 0.5 * r_trial.norm_squared();
        // When even the model's predicted decrease is below the rounding
        // floor of the cost, progress is judged by the gradient instead.
        let noise = COST_ROUNDING * cost;
        let predicted = -grad.dot(&step) - 0.5 * (&jac * &step).norm_squared();
        let accepted = if cost_trial < cost {
            Some(jacobian(&trial))
        } else if predicted <= noise && cost_trial - cost <= noise {
            let jac_trial = jacobian(&trial);
            (jac_trial.tr_mul(&r_trial).norm() < grad.norm()).then_some(jac_trial)
        } else {
            None
        };
        if let Some(jac_trial) = accepted {
            let small_step = step.norm() <= opts.step_tol * (1.0 + u.norm());
            u = trial;
            r = r_trial;
            cost = cost_trial;
            jac = jac_trial;
            grad = jac.tr_mul(&r);
            history.push(r.norm());
            lambda = (lambda * opts.damping_down).max(MIN_DAMPING);
            if small_step {
                status = SolveStatus::Converged;
                break;
            }
        } else {
            if step.norm() <= opts.step_tol * (1.0 + u.norm()) {
                // No representable descent left along the Gauss-Newton direction.
                status = SolveStatus::Converged;
                break;
            }
            lambda *= opts.damping_up;
            if lambda > MAX_DAMPING {
                status = SolveStatus::Stalled;
                break;
            }
        }
    }
    Ok(finish(u, &r, &grad, status, iterations, history))
}

fn check_jacobian<R>(residual: &R, jac: &DMatrix<f64>, u: &DVector<f64>) -> f64
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut fd = DMatrix::zeros(jac.nrows(), jac.ncols());
    for k in 0..u.len() {
        let h = FD_STEP_FIRST * u[k].abs().max(1.0);
        let mut up = u.clone();
        let mut um = u.clone();
        up[k] += h;
        um[k] -= h;
        fd.set_column(k, &((residual(&up) - residual(&um)) / (2.0 * h)));
    }
    let scale = jac.norm();
    if scale == 0.0 {
        fd.norm()
    } else {
        (jac - fd).norm() / scale
    }
}

/// Local projection of `a` onto the parametrized manifold, started at `u0`.
pub fn project_point<P: Parametrization + ?Sized>(
    param: &P,
    a: &DVector<f64>,
    u0: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    check_param_dim(param, u0)?;
    if a.len() != param.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient point has length {}, manifold lives in R^{}",
            a.len(),
            param.ambient_dim()
        )));
    }
    lm_minimize_in_domain(
        |u| param.eval(u) - a,
        |u| param.jacobian(u),
        |u| param.in_domain(u),
        u0,
        opts,
    )
}

/// `‖Qᵀ(a − φ(u))‖`: zero exactly when `a − φ(u)` is normal at `φ(u)`.
pub fn tangential_residual<P: Parametrization + ?Sized>(
    param: &P,
    u: &DVector<f64>,
    a: &DVector<f64>,
) -> Result<f64> {
    let frame = tangent_frame(param, u)?;
    Ok(frame.project_tangent(&(a - param.eval(u))).norm())
}

/// Triangulate `a` by linear triangulation followed by LM refinement of
/// `½‖μ_r(y) − a‖²`.
pub fn triangulate(rig: &CameraRig, a: &DVector<f64>, opts: &SolverOptions) -> Result<SolveResult> {
    let y0 = triangulate_linear(rig, &Correspondence(a.clone()), DltCameras::All)?;
    triangulate_from(rig, a, &y0, opts)
}

/// LM refinement of triangulation started at `y0`.
pub fn triangulate_from(
    rig: &CameraRig,
    a: &DVector<f64>,
    y0: &Vector3<f64>,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    project_point(rig, a, &param_of(y0), opts)
}
