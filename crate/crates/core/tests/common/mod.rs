//! Random scene generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DVector, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use riemcond::experiments::{gen_rig, random_unit_normal, RigSpec};
use riemcond::multiview::{mv_domain_check, mv_project, CameraRig};

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random synthetic rig and a point near the middle of its view. `wide`
/// varies focal length, distance and principal point over a broad range;
/// otherwise those stay near the default rig.
pub fn random_scene(rng: &mut ChaCha8Rng, wide: bool) -> (CameraRig, Vector3<f64>) {
    loop {
        let base = RigSpec::default();
        let spec = RigSpec {
            k: rng.random_range(2..=10),
            arc_degrees: rng.random_range(20.0..120.0),
            look_at: [
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            ],
            seed: rng.random(),
            ..if wide {
                RigSpec {
                    radius: rng.random_range(5.0..20.0),
                    focal: rng.random_range(300.0..1500.0),
                    principal_point: [rng.random_range(0.0..640.0), rng.random_range(0.0..480.0)],
                    ..base
                }
            } else {
                RigSpec {
                    radius: rng.random_range(8.0..12.0),
                    focal: rng.random_range(600.0..1000.0),
                    ..base
                }
            }
        };
        let rig = gen_rig(&spec).expect("valid spec");
        let offset = gaussian(rng, 3) * (0.1 * spec.radius);
        let y = Vector3::from(spec.look_at) + Vector3::new(offset[0], offset[1], offset[2]);
        if mv_domain_check(&rig, &y) && rig.baseline_distance(&y) > 0.05 * spec.radius {
            return (rig, y);
        }
    }
}

/// Random `(rig, y, η)` with `‖η‖ = t‖x‖`, `t` log-uniform in `[1e−3, 1]`.
pub fn random_mv_instance(rng: &mut ChaCha8Rng) -> (CameraRig, Vector3<f64>, DVector<f64>) {
    let (rig, y) = random_scene(rng, false);
    let x = mv_project(&rig, &y).unwrap();
    let t = 10f64.powf(rng.random_range(-3.0..0.0));
    let eta = random_unit_normal(&rig, &y, rng.random()).unwrap() * (t * x.0.norm());
    (rig, y, eta)
}
