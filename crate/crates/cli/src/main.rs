//! `riemcond` command-line tool.
//!
//! Exit codes: 0 on success, 1 on domain errors (degenerate geometry,
//! ill-posed inputs where a finite answer was required), 2 on I/O, parse
//! and usage errors.

mod files;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DVector, Vector3};
use serde::Serialize;

use riemcond::experiments::{
    experiment_sweep, experiment_validate, gen_rig, log_grid, random_unit_normal, ratio_stats,
    two_sided, write_csv, RigSpec, ValidateOptions, BASIN_FACTOR,
};
use riemcond::multiview::{
    mv_jacobian, mv_kappa, mv_project, point_of, triangulate_linear, CameraRig, DltCameras,
};
use riemcond::solver::{triangulate_from, SolverOptions};

use files::{load_correspondence, load_point, load_rig, rig_file, to_json, write_atomic};

#[derive(Debug)]
pub enum Failure {
    /// Well-formed input the computation cannot handle.
    Domain(String),
    /// Unreadable, unparsable or inconsistent input, or failed output.
    Input(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Input(m) => m,
        }
    }
}

impl From<riemcond::Error> for Failure {
    fn from(e: riemcond::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "riemcond",
    version,
    about = "Condition numbers of triangulation and other Riemannian least-squares problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic camera rig.
    GenRig(GenRigArgs),
    /// Project a world point into every camera.
    Project(ProjectArgs),
    /// Triangulate a world point from image correspondences.
    Triangulate(TriangulateArgs),
    /// Condition number of triangulation at a point.
    Kappa(KappaArgs),
    /// Condition number along a normal ray, as CSV.
    Sweep(SweepArgs),
    /// Condition number against perturbed re-triangulation, as CSV.
    Validate(ValidateArgs),
    /// Log-log SVG plot of a sweep or validation CSV.
    Svg(SvgArgs),
}

#[derive(Args)]
struct GenRigArgs {
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    /// Angular extent of the camera arc in degrees.
    #[arg(long, default_value_t = 60.0)]
    arc: f64,
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0], allow_hyphen_values = true)]
    look_at: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 800.0)]
    focal: f64,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [320.0, 240.0], allow_hyphen_values = true)]
    principal_point: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the rig's reference point.
    #[arg(long)]
    point_out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    rig: PathBuf,
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    step_tol: Option<f64>,
    #[arg(long)]
    initial_damping: Option<f64>,
}

impl SolverArgs {
    fn options(&self, base: SolverOptions) -> Result<SolverOptions, Failure> {
        let opts = SolverOptions {
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            grad_tol: self.grad_tol.unwrap_or(base.grad_tol),
            step_tol: self.step_tol.unwrap_or(base.step_tol),
            initial_damping: self.initial_damping.unwrap_or(base.initial_damping),
            ..base
        };
        opts.validate()
            .map_err(|e| Failure::Input(format!("solver options: {e}")))?;
        Ok(opts)
    }
}

#[derive(Args)]
struct TriangulateArgs {
    #[arg(long)]
    rig: PathBuf,
    #[arg(long)]
    correspondences: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Stop after linear triangulation.
    #[arg(long)]
    linear: bool,
    /// Use only the first two cameras for linear triangulation.
    #[arg(long)]
    first_two: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SceneArgs {
    /// Camera rig; the default synthetic rig when omitted.
    #[arg(long)]
    rig: Option<PathBuf>,
    /// World point; required with --rig, the rig's reference point otherwise.
    #[arg(long)]
    point: Option<PathBuf>,
}

impl SceneArgs {
    fn load(&self) -> Result<(CameraRig, Vector3<f64>), Failure> {
        match (&self.rig, &self.point) {
            (Some(rig), Some(point)) => Ok((load_rig(rig)?, load_point(point)?)),
            (Some(_), None) => Err(Failure::Input("--point is required with --rig".into())),
            (None, point) => {
                let spec = RigSpec::default();
                let y = match point {
                    Some(p) => load_point(p)?,
                    None => spec.default_point(),
                };
                Ok((gen_rig(&spec)?, y))
            }
        }
    }
}

#[derive(Args)]
struct KappaArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Observed correspondences; the point is then triangulated and the
    /// normal offset is the residual.
    #[arg(long, conflicts_with_all = ["point", "eta_scale"])]
    correspondences: Option<PathBuf>,
    /// Normal offset `t/‖x‖` along a random unit normal.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eta_scale: f64,
    /// Seed of the random unit normal.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with a domain error when the problem is ill-posed.
    #[arg(long)]
    require_finite: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GridArgs {
    /// `lo:hi:count`, exponents of 10 for |t|/‖x‖.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Only positive offsets.
    #[arg(long)]
    one_sided: bool,
}

impl GridArgs {
    fn values(&self, default: &str) -> Result<Vec<f64>, Failure> {
        let text = self.grid.as_deref().unwrap_or(default);
        let grid = parse_grid(text)?;
        Ok(if self.one_sided {
            grid
        } else {
            two_sided(&grid)
        })
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Input(format!("--grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected lo:hi:count"));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| bad("hi is not a number"))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad("count is not a positive integer"))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad("bounds must be finite"));
    }
    if lo > hi {
        return Err(bad("lo exceeds hi"));
    }
    if count == 0 {
        return Err(bad("count must be positive"));
    }
    Ok(log_grid(lo, hi, count))
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Seed of the random unit normal.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    /// Size of the worst-case perturbation relative to ‖a(t)‖.
    #[arg(long, default_value_t = 1e-6)]
    perturb_rel: f64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SvgArgs {
    #[arg(long)]
    csv: PathBuf,
    /// Comma-separated columns to plot against t_rel.
    #[arg(long, value_delimiter = ',', default_value = "kappa")]
    columns: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct PointOut {
    y: [f64; 3],
}

#[derive(Serialize)]
struct CorrespondenceOut {
    x: Vec<f64>,
}

#[derive(Serialize)]
struct TriangulationOut {
    y: [f64; 3],
    status: String,
    residual_norm: f64,
    iterations: usize,
    first_order_norm: f64,
}

/// Infinite values are written as `null`.
#[derive(Serialize)]
struct KappaOut {
    kappa: Option<f64>,
    ill_posed: bool,
    kappa_ideal: Option<f64>,
    bounds: [Option<f64>; 2],
    sigma: [f64; 3],
    y: [f64; 3],
    x_norm: f64,
    eta_norm: f64,
    /// Principal curvatures for the unit normal `η/‖η‖`.
    curvatures: Vec<f64>,
    /// Offsets `t` along `η/‖η‖` where the problem is ill-posed.
    singular_offsets: Vec<f64>,
    worst_direction: Option<Vec<f64>>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn arr3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn cmd_gen_rig(args: &GenRigArgs) -> Result<(), Failure> {
    let spec = RigSpec {
        k: args.k,
        radius: args.radius,
        arc_degrees: args.arc,
        look_at: [args.look_at[0], args.look_at[1], args.look_at[2]],
        seed: args.seed,
        focal: args.focal,
        principal_point: [args.principal_point[0], args.principal_point[1]],
    };
    let rig = gen_rig(&spec)?;
    write_atomic(&args.out, &to_json(&rig_file(&rig)))?;
    if let Some(p) = &args.point_out {
        write_atomic(
            p,
            &to_json(&PointOut {
                y: arr3(&spec.default_point()),
            }),
        )?;
    }
    Ok(())
}

fn cmd_project(args: &ProjectArgs) -> Result<(), Failure> {
    let rig = load_rig(&args.rig)?;
    let y = load_point(&args.point)?;
    let x = mv_project(&rig, &y)?;
    write_atomic(
        &args.out,
        &to_json(&CorrespondenceOut {
            x: x.0.as_slice().to_vec(),
        }),
    )
}

fn cmd_triangulate(args: &TriangulateArgs) -> Result<(), Failure> {
    let rig = load_rig(&args.rig)?;
    let x = load_correspondence(&args.correspondences, rig.len())?;
    let mode = if args.first_two {
        DltCameras::FirstTwo
    } else {
        DltCameras::All
    };
    let y0 = triangulate_linear(&rig, &x, mode)?;
    let out = if args.linear {
        let r = (mv_project(&rig, &y0)?.0 - &x.0).norm();
        TriangulationOut {
            y: arr3(&y0),
            status: "Linear".into(),
            residual_norm: r,
            iterations: 0,
            first_order_norm: f64::NAN,
        }
    } else {
        let res = triangulate_from(
            &rig,
            &x.0,
            &y0,
            &args.solver.options(SolverOptions::default())?,
        )?;
        TriangulationOut {
            y: arr3(&point_of(&res.u_star)?),
            status: format!("{:?}", res.status),
            residual_norm: res.residual_norm,
            iterations: res.iterations,
            first_order_norm: res.first_order_norm,
        }
    };
    let mut json = serde_json::to_value(&out).expect("serializable");
    if args.linear {
        json.as_object_mut().unwrap().remove("first_order_norm");
    }
    write_atomic(&args.out, &to_json(&json))
}

fn cmd_kappa(args: &KappaArgs) -> Result<(), Failure> {
    let (rig, y, eta) = match &args.correspondences {
        Some(path) => {
            let rig = match &args.scene.rig {
                Some(r) => load_rig(r)?,
                None => gen_rig(&RigSpec::default())?,
            };
            let a = load_correspondence(path, rig.len())?;
            let y0 = triangulate_linear(&rig, &a, DltCameras::All)?;
            let res = triangulate_from(
                &rig,
                &a.0,
                &y0,
                &args.solver.options(SolverOptions::default())?,
            )?;
            let y = point_of(&res.u_star)?;
            let eta = normal_part(&rig, &y, &a.0 - mv_project(&rig, &y)?.0)?;
            (rig, y, eta)
        }
        None => {
            if !args.eta_scale.is_finite() {
                return Err(Failure::Input("--eta-scale must be finite".into()));
            }
            let (rig, y) = args.scene.load()?;
            let x_norm = mv_project(&rig, &y)?.0.norm();
            let eta = if args.eta_scale == 0.0 {
                DVector::zeros(2 * rig.len())
            } else {
                random_unit_normal(&rig, &y, args.seed)? * (args.eta_scale * x_norm)
            };
            (rig, y, eta)
        }
    };
    let mv = mv_kappa(&rig, &y, &eta)?;
    let (lo, hi) = mv.report.bounds.unwrap_or((f64::NAN, f64::NAN));
    let curvatures = mv.weingarten.curvatures.clone();
    let out = KappaOut {
        kappa: finite(mv.kappa()),
        ill_posed: mv.report.ill_posed,
        kappa_ideal: mv.kappa_ideal(),
        bounds: [finite(lo), finite(hi)],
        sigma: mv.sigma,
        y: arr3(&y),
        x_norm: mv.frame.base_point.norm(),
        eta_norm: eta.norm(),
        singular_offsets: riemcond::condition::ill_posedness_certificate(&curvatures),
        curvatures,
        worst_direction: mv
            .worst_ambient_direction
            .as_ref()
            .map(|d| d.as_slice().to_vec()),
    };
    let json = to_json(&out);
    match &args.out {
        Some(p) => write_atomic(p, &json)?,
        None => print!("{}", String::from_utf8_lossy(&json)),
    }
    if args.require_finite && mv.report.ill_posed {
        return Err(Failure::Domain(
            "problem is ill-posed: kappa is infinite".into(),
        ));
    }
    Ok(())
}

/// Component of `v` orthogonal to the tangent space of the image manifold
/// at `y`. A converged residual is normal only up to solver accuracy.
fn normal_part(
    rig: &CameraRig,
    y: &Vector3<f64>,
    v: DVector<f64>,
) -> Result<DVector<f64>, Failure> {
    let q = mv_jacobian(rig, y)?.qr().q();
    let tangential = &q * (q.tr_mul(&v));
    Ok(v - tangential)
}

fn sweep_direction(rig: &CameraRig, y: &Vector3<f64>, seed: u64) -> Result<DVector<f64>, Failure> {
    Ok(random_unit_normal(rig, y, seed)?)
}

fn csv_bytes(rows: &[riemcond::experiments::SweepRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    buf
}

fn report_row_errors(rows: &[riemcond::experiments::SweepRecord]) {
    for (i, r) in rows.iter().enumerate() {
        if let Some(e) = &r.error {
            eprintln!("row {} (t_rel = {}): {e}", i + 1, r.t_rel);
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let grid = args.grid.values("-3:4:400")?;
    let (rig, y) = args.scene.load()?;
    let eta = sweep_direction(&rig, &y, args.seed)?;
    let rows = experiment_sweep(&rig, &y, &eta, &grid)?;
    report_row_errors(&rows);
    write_atomic(&args.out, &csv_bytes(&rows))
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let grid = args.grid.values("-3:2:100")?;
    if !(args.perturb_rel > 0.0 && args.perturb_rel.is_finite()) {
        return Err(Failure::Input(
            "--perturb-rel must be a positive number".into(),
        ));
    }
    let (rig, y) = args.scene.load()?;
    let eta = sweep_direction(&rig, &y, args.seed)?;
    let opts = ValidateOptions {
        perturb_rel: args.perturb_rel,
        basin_factor: BASIN_FACTOR,
        solver: args.solver.options(ValidateOptions::default().solver)?,
    };
    let rows = experiment_validate(&rig, &y, &eta, &grid, &opts)?;
    report_row_errors(&rows);
    write_atomic(&args.out, &csv_bytes(&rows))?;
    match ratio_stats(&rows) {
        Ok(s) => println!(
            "arith_mean_ratio={} geo_mean_ratio={} used={} excluded={}",
            s.arith_mean, s.geo_mean, s.count_used, s.count_excluded
        ),
        Err(_) => {
            return Err(Failure::Domain(format!(
                "all {} rows were excluded; no ratio statistics",
                rows.len()
            )))
        }
    }
    Ok(())
}

fn cmd_svg(args: &SvgArgs) -> Result<(), Failure> {
    let svg = plot::svg_from_csv(&args.csv, &args.columns)?;
    write_atomic(&args.out, svg.as_bytes())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RIEMCOND_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            Failure::Input(format!(
                "RIEMCOND_THREADS={value:?} is not a positive integer"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("RIEMCOND_THREADS: {e}")))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::GenRig(a) => cmd_gen_rig(a),
        Command::Project(a) => cmd_project(a),
        Command::Triangulate(a) => cmd_triangulate(a),
        Command::Kappa(a) => cmd_kappa(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Svg(a) => cmd_svg(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
