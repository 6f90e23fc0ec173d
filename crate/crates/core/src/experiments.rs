//! Synthetic camera rigs and the normal-ray experiments.
//!
//! Along the ray `a(t) = x + t‖x‖η`, with `x = μ_r(y)` and `η` a unit normal,
//! the pair `(a(t), x)` stays a critical pair, so the condition of
//! triangulation can be traced as a function of `t` ([`experiment_sweep`])
//! and compared with the displacement of the refined solution under a small
//! worst-case perturbation ([`experiment_validate`]).

use std::io::{self, Write};

use nalgebra::{DVector, Matrix3, Matrix3x4, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::manifold::{check_normal, TangentFrame, RANK_TOL};
use crate::multiview::{mv_domain_check, mv_jacobian, mv_kappa, mv_project, Camera, CameraRig};
use crate::solver::{triangulate_from, SolveStatus, SolverOptions};
use crate::{Error, Result};

/// A validation row is flagged when the refined solution moved more than
/// this multiple of the first-order prediction `κ‖E‖`.
pub const BASIN_FACTOR: f64 = 1e3;
/// Tolerance on `‖η‖ = 1` for sweep directions.
const UNIT_TOL: f64 = 1e-10;

/// Synthetic rig layout: `k` cameras on a horizontal circular arc of the
/// given radius and angular extent around `look_at`, all aimed at it.
#[derive(Debug, Clone, PartialEq)]
pub struct RigSpec {
    pub k: usize,
    pub radius: f64,
    pub arc_degrees: f64,
    pub look_at: [f64; 3],
    /// Drives small per-camera height, distance and roll jitter.
    pub seed: u64,
    pub focal: f64,
    pub principal_point: [f64; 2],
}

impl Default for RigSpec {
    fn default() -> Self {
        Self {
            k: 10,
            radius: 10.0,
            arc_degrees: 60.0,
            look_at: [0.0, 0.0, 0.0],
            seed: 0,
            focal: 800.0,
            principal_point: [320.0, 240.0],
        }
    }
}

impl RigSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidGeometry(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.focal > 0.0 && self.focal.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "focal must be positive, got {}",
                self.focal
            )));
        }
        if !(self.arc_degrees > 0.0 && self.arc_degrees < 360.0) {
            return Err(Error::InvalidGeometry(format!(
                "arc must lie in (0, 360) degrees, got {}",
                self.arc_degrees
            )));
        }
        if self
            .look_at
            .iter()
            .chain(&self.principal_point)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidGeometry(
                "look_at and principal point must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Point `look_at + (0.3, −0.2, 0.4)·radius/10` used by the default
    /// experiments.
    pub fn default_point(&self) -> Vector3<f64> {
        Vector3::from(self.look_at) + Vector3::new(0.3, -0.2, 0.4) * (self.radius / 10.0)
    }
}

/// Position along the arc of camera `l`, in `[0, 1]`: both ends first, then
/// successive midpoints (0, 1, ½, ¼, ¾, ⅛, …). Rigs built from the same spec
/// with growing `k` are therefore nested.
fn arc_fraction(l: usize) -> f64 {
    match l {
        0 => 0.0,
        1 => 1.0,
        _ => {
            // van der Corput sequence in base 2, starting at ½
            let mut n = l - 1;
            let (mut f, mut base) = (0.0, 0.5);
            while n > 0 {
                if n & 1 == 1 {
                    f += base;
                }
                n >>= 1;
                base *= 0.5;
            }
            f
        }
    }
}

fn look_at_camera(
    center: &Vector3<f64>,
    target: &Vector3<f64>,
    roll: f64,
    focal: f64,
    pp: [f64; 2],
) -> Result<Camera> {
    let forward = target - center;
    let forward = Unit::try_new(forward, 1e-12)
        .ok_or_else(|| Error::InvalidGeometry("camera center coincides with look_at".into()))?;
    let down = Vector3::new(0.0, -1.0, 0.0);
    let right = Unit::try_new(down.cross(&forward), 1e-12)
        .ok_or_else(|| Error::InvalidGeometry("optical axis is vertical".into()))?;
    let r1 = Rotation3::from_axis_angle(&forward, roll) * right.into_inner();
    let r3 = forward.into_inner();
    let r2 = r3.cross(&r1);
    let rot = Matrix3::from_rows(&[r1.transpose(), r2.transpose(), r3.transpose()]);
    let k = Matrix3::new(focal, 0.0, pp[0], 0.0, focal, pp[1], 0.0, 0.0, 1.0);
    let mut ext = Matrix3x4::zeros();
    ext.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
    ext.set_column(3, &(-rot * center));
    Camera::from_matrix(&(k * ext))
}

/// Deterministic synthetic rig.
pub fn gen_rig(spec: &RigSpec) -> Result<CameraRig> {
    spec.validate()?;
    let target = Vector3::from(spec.look_at);
    let arc = spec.arc_degrees.to_radians();
    let cameras = (0..spec.k)
        .map(|l| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(l as u64);
            let height: f64 = rng.random_range(-0.05..0.05) * spec.radius;
            let dist: f64 = spec.radius * (1.0 + rng.random_range(-0.05..0.05));
            let roll: f64 = rng.random_range(-0.05..0.05);
            let theta = -0.5 * arc + arc * arc_fraction(l);
            let center = target + Vector3::new(dist * theta.sin(), height, -dist * theta.cos());
            look_at_camera(&center, &target, roll, spec.focal, spec.principal_point)
        })
        .collect::<Result<Vec<_>>>()?;
    let rig = CameraRig::new(cameras)?;
    if !mv_domain_check(&rig, &target) {
        return Err(Error::InvalidGeometry(
            "look_at is outside the rig's domain".into(),
        ));
    }
    Ok(rig)
}

/// Unit normal at `μ_r(y)` from a projected standard Gaussian vector.
pub fn random_unit_normal(rig: &CameraRig, y: &Vector3<f64>, seed: u64) -> Result<DVector<f64>> {
    let frame = frame_at(rig, y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = DVector::from_fn(2 * rig.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let eta = frame.project_normal(&g);
        let n = eta.norm();
        // Guard against a draw that is (numerically) tangent.
        if n > 1e-6 * g.norm() {
            return Ok(eta / n);
        }
    }
}

fn frame_at(rig: &CameraRig, y: &Vector3<f64>) -> Result<TangentFrame> {
    let x = mv_project(rig, y)?;
    TangentFrame::from_jacobian(&mv_jacobian(rig, y)?, x.0, RANK_TOL)
}

/// `count` values `10^e` with exponents evenly spaced in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..count)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// Mirror a positive grid to negative values; result ascending.
pub fn two_sided(grid: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = grid.iter().rev().map(|t| -t).collect();
    out.extend_from_slice(grid);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// `t / ‖x‖`, signed.
    pub t_rel: f64,
    pub kappa: f64,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub sigma3: f64,
    pub ill_posed: bool,
    pub kappa_est: Option<f64>,
    pub ratio: Option<f64>,
    pub flagged: bool,
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(t_rel: f64, err: &Error) -> Self {
        Self {
            t_rel,
            kappa: f64::NAN,
            kappa_lo: f64::NAN,
            kappa_hi: f64::NAN,
            sigma3: f64::NAN,
            ill_posed: false,
            kappa_est: None,
            ratio: None,
            flagged: true,
            error: Some(err.to_string()),
        }
    }
}

fn check_sweep_inputs(
    rig: &CameraRig,
    y: &Vector3<f64>,
    eta: &DVector<f64>,
) -> Result<DVector<f64>> {
    let frame = frame_at(rig, y)?;
    check_normal(&frame, eta)?;
    if (eta.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidGeometry(format!(
            "sweep direction must be unit norm, got {}",
            eta.norm()
        )));
    }
    Ok(frame.base_point)
}

fn sweep_row(
    rig: &CameraRig,
    y: &Vector3<f64>,
    eta: &DVector<f64>,
    x_norm: f64,
    t_rel: f64,
) -> SweepRecord {
    match mv_kappa(rig, y, &(eta * (t_rel * x_norm))) {
        Ok(mv) => {
            let (lo, hi) = mv.report.bounds.unwrap_or((f64::NAN, f64::NAN));
            SweepRecord {
                t_rel,
                kappa: mv.kappa(),
                kappa_lo: lo,
                kappa_hi: hi,
                sigma3: mv.sigma3(),
                ill_posed: mv.report.ill_posed,
                kappa_est: None,
                ratio: None,
                flagged: false,
                error: None,
            }
        }
        Err(e) => SweepRecord::failed(t_rel, &e),
    }
}

/// Condition number along `a(t) = x + t‖x‖η` for each `t` in `t_grid`
/// (relative offsets). Rows come back in grid order.
pub fn experiment_sweep(
    rig: &CameraRig,
    y: &Vector3<f64>,
    eta: &DVector<f64>,
    t_grid: &[f64],
) -> Result<Vec<SweepRecord>> {
    let x = check_sweep_inputs(rig, y, eta)?;
    let x_norm = x.norm();
    Ok(t_grid
        .par_iter()
        .map(|&t| sweep_row(rig, y, eta, x_norm, t))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    /// Relative size of the worst-case perturbation, `‖E‖ = perturb_rel·‖a‖`.
    pub perturb_rel: f64,
    pub basin_factor: f64,
    pub solver: SolverOptions,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            perturb_rel: 1e-6,
            basin_factor: BASIN_FACTOR,
            solver: SolverOptions {
                max_iters: 10_000,
                ..SolverOptions::default()
            },
        }
    }
}

/// Sweep rows plus an empirical condition estimate `‖y − y_est‖ / ‖E‖`,
/// where `y_est` refines triangulation of `a(t) + E` from `y` and `E` is a
/// perturbation of relative size `perturb_rel` along the worst direction.
pub fn experiment_validate(
    rig: &CameraRig,
    y: &Vector3<f64>,
    eta: &DVector<f64>,
    t_grid: &[f64],
    opts: &ValidateOptions,
) -> Result<Vec<SweepRecord>> {
    if !(opts.perturb_rel > 0.0 && opts.perturb_rel.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "perturb_rel must be positive, got {}",
            opts.perturb_rel
        )));
    }
    opts.solver.validate()?;
    let x = check_sweep_inputs(rig, y, eta)?;
    let x_norm = x.norm();
    Ok(t_grid
        .par_iter()
        .map(|&t_rel| {
            let mut row = sweep_row(rig, y, eta, x_norm, t_rel);
            if row.error.is_some() {
                return row;
            }
            if row.ill_posed {
                row.flagged = true;
                return row;
            }
            let mv = match mv_kappa(rig, y, &(eta * (t_rel * x_norm))) {
                Ok(mv) => mv,
                Err(e) => return SweepRecord::failed(t_rel, &e),
            };
            let a = &x + eta * (t_rel * x_norm);
            let dir = mv
                .worst_ambient_direction
                .expect("finite kappa has a worst direction");
            let e = dir * (opts.perturb_rel * a.norm());
            match triangulate_from(rig, &(&a + &e), y, &opts.solver) {
                Ok(res) => {
                    let y_est = Vector3::new(res.u_star[0], res.u_star[1], res.u_star[2]);
                    let moved = (y - y_est).norm();
                    let kappa_est = moved / e.norm();
                    row.kappa_est = Some(kappa_est);
                    row.ratio = Some(row.kappa / kappa_est);
                    row.flagged = moved > opts.basin_factor * row.kappa * e.norm()
                        || res.status != SolveStatus::Converged;
                    if res.status != SolveStatus::Converged {
                        row.error = Some(format!("solver stopped with status {:?}", res.status));
                    }
                }
                Err(err) => {
                    row.flagged = true;
                    row.error = Some(err.to_string());
                }
            }
            row
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub arith_mean: f64,
    pub geo_mean: f64,
    pub count_excluded: usize,
    pub count_used: usize,
}

/// Arithmetic and geometric means of `kappa / kappa_est` over unflagged rows.
pub fn ratio_stats(records: &[SweepRecord]) -> Result<RatioStats> {
    let used: Vec<f64> = records
        .iter()
        .filter(|r| !r.flagged)
        .filter_map(|r| r.ratio)
        .collect();
    if used.is_empty() {
        return Err(Error::Empty);
    }
    let n = used.len() as f64;
    Ok(RatioStats {
        arith_mean: used.iter().sum::<f64>() / n,
        geo_mean: (used.iter().map(|r| r.ln()).sum::<f64>() / n).exp(),
        count_excluded: records.iter().filter(|r| r.flagged).count(),
        count_used: used.len(),
    })
}

/// Indices of local minima of `sigma3` along the grid, searched separately
/// on the negative and positive `t` runs. A singular offset between grid
/// points shows up as such a dip.
pub fn singular_dips(records: &[SweepRecord]) -> Vec<usize> {
    let mut dips = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let positive = records[start].t_rel > 0.0;
        let mut end = start;
        while end < records.len() && (records[end].t_rel > 0.0) == positive {
            end += 1;
        }
        for i in start + 1..end.saturating_sub(1) {
            let (prev, cur, next) = (
                records[i - 1].sigma3,
                records[i].sigma3,
                records[i + 1].sigma3,
            );
            if cur < prev && cur <= next {
                dips.push(i);
            }
        }
        start = end;
    }
    dips
}

pub const CSV_HEADER: &str =
    "t_rel,kappa,kappa_lo,kappa_hi,sigma3,ill_posed,kappa_est,ratio,flagged";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Write records as CSV with [`CSV_HEADER`]. Absent values are empty fields;
/// numbers use the shortest representation that round-trips.
pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.t_rel,
            num(r.kappa),
            num(r.kappa_lo),
            num(r.kappa_hi),
            num(r.sigma3),
            r.ill_posed,
            opt(r.kappa_est),
            opt(r.ratio),
            r.flagged
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ratio: Option<f64>, flagged: bool) -> SweepRecord {
        SweepRecord {
            t_rel: 1.0,
            kappa: 1.0,
            kappa_lo: 1.0,
            kappa_hi: 1.0,
            sigma3: 1.0,
            ill_posed: false,
            kappa_est: ratio.map(|r| 1.0 / r),
            ratio,
            flagged,
            error: None,
        }
    }

    #[test]
    fn arc_fraction_sequence() {
        let f: Vec<f64> = (0..7).map(arc_fraction).collect();
        assert_eq!(f, vec![0.0, 1.0, 0.5, 0.25, 0.75, 0.125, 0.625]);
    }

    #[test]
    fn two_camera_baseline() {
        let spec = RigSpec {
            k: 2,
            arc_degrees: 30.0,
            seed: 3,
            ..Default::default()
        };
        let rig = gen_rig(&spec).unwrap();
        let c0 = rig.cameras()[0].center().unwrap();
        let c1 = rig.cameras()[1].center().unwrap();
        // chord of the arc, up to the height/distance jitter of at most 5%
        let horizontal = ((c0.x - c1.x).powi(2) + (c0.z - c1.z).powi(2)).sqrt();
        let chord = 2.0 * spec.radius * 15f64.to_radians().sin();
        assert!(
            (horizontal - chord).abs() < 0.1 * chord,
            "{horizontal} vs {chord}"
        );
    }

    #[test]
    fn exact_chord_without_jitter_in_distance() {
        // The camera built by look_at_camera sits exactly where asked.
        let target = Vector3::zeros();
        let c = Vector3::new(3.0, 0.5, -4.0);
        let cam = look_at_camera(&c, &target, 0.02, 500.0, [0.0, 0.0]).unwrap();
        assert!((cam.center().unwrap() - c).norm() < 1e-12);
        assert!(cam.alpha(&target) > 0.0);
        assert!(cam.project(&target).norm() < 1e-9);
    }

    #[test]
    fn rigs_are_deterministic_and_nested() {
        let spec = RigSpec::default();
        assert_eq!(gen_rig(&spec).unwrap(), gen_rig(&spec).unwrap());
        let big = gen_rig(&spec).unwrap();
        let small = gen_rig(&RigSpec {
            k: 3,
            ..spec.clone()
        })
        .unwrap();
        assert_eq!(big.prefix(3).unwrap(), small);
        let other = gen_rig(&RigSpec { seed: 1, ..spec }).unwrap();
        assert_ne!(big, other);
    }

    #[test]
    fn all_cameras_see_look_at() {
        let spec = RigSpec::default();
        let rig = gen_rig(&spec).unwrap();
        let target = Vector3::from(spec.look_at);
        for cam in rig.cameras() {
            assert!(cam.alpha(&target) > 0.0);
        }
        for d in [Vector3::new(0.1, 0.0, 0.0), Vector3::new(0.0, -0.1, 0.1)] {
            assert!(mv_domain_check(&rig, &(target + d)));
            assert!(mv_domain_check(&rig, &(target - d)));
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        for spec in [
            RigSpec {
                k: 1,
                ..Default::default()
            },
            RigSpec {
                radius: 0.0,
                ..Default::default()
            },
            RigSpec {
                focal: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(gen_rig(&spec), Err(Error::InvalidGeometry(_))));
        }
    }

    #[test]
    fn unit_normals() {
        let spec = RigSpec::default();
        let rig = gen_rig(&spec).unwrap();
        let y = spec.default_point();
        let frame = frame_at(&rig, &y).unwrap();
        let a = random_unit_normal(&rig, &y, 1).unwrap();
        let b = random_unit_normal(&rig, &y, 2).unwrap();
        for eta in [&a, &b] {
            assert!(frame.project_tangent(eta).norm() <= 1e-10);
            assert!((eta.norm() - 1.0).abs() <= 1e-12);
        }
        assert!((&a - &b).norm() > 1e-3);
        assert_eq!(a, random_unit_normal(&rig, &y, 1).unwrap());

        let stereo = rig.prefix(2).unwrap();
        let n1 = random_unit_normal(&stereo, &y, 5).unwrap();
        let n2 = random_unit_normal(&stereo, &y, 6).unwrap();
        assert!((n1.dot(&n2).abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grids() {
        assert_eq!(log_grid(0.0, 2.0, 3), vec![1.0, 10.0, 100.0]);
        assert_eq!(two_sided(&[1.0, 10.0]), vec![-10.0, -1.0, 1.0, 10.0]);
        assert!(log_grid(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn ratio_stats_examples() {
        let s = ratio_stats(&[row(Some(1.0), false), row(Some(1.0), false)]).unwrap();
        assert_eq!((s.arith_mean, s.geo_mean, s.count_excluded), (1.0, 1.0, 0));
        let s = ratio_stats(&[row(Some(2.0), false), row(Some(0.5), false)]).unwrap();
        assert!((s.arith_mean - 1.25).abs() < 1e-15 && (s.geo_mean - 1.0).abs() < 1e-15);
        let s = ratio_stats(&[
            row(Some(2.0), false),
            row(Some(100.0), true),
            row(None, true),
        ])
        .unwrap();
        assert_eq!(
            (s.arith_mean, s.geo_mean, s.count_excluded, s.count_used),
            (2.0, 2.0, 2, 1)
        );
        assert_eq!(ratio_stats(&[row(Some(3.0), true)]), Err(Error::Empty));
    }

    #[test]
    fn dips_are_found_per_sign() {
        let mk = |t: f64, s: f64| SweepRecord {
            t_rel: t,
            sigma3: s,
            ..row(None, false)
        };
        let rows = vec![
            mk(-3.0, 1.0),
            mk(-2.0, 0.1),
            mk(-1.0, 0.5),
            mk(1.0, 0.4),
            mk(2.0, 0.5),
            mk(3.0, 0.01),
            mk(4.0, 0.01),
            mk(5.0, 0.3),
        ];
        assert_eq!(singular_dips(&rows), vec![1, 5]);
    }

    #[test]
    fn csv_layout() {
        let mut r = row(Some(2.0), false);
        r.kappa_lo = f64::INFINITY;
        let mut buf = Vec::new();
        write_csv(&[r, row(None, true)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "1,1,inf,1,1,false,0.5,2,false");
        assert_eq!(lines[2], "1,1,1,1,1,false,,,true");
    }
}
