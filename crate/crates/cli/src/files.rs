//! JSON file formats and atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DVector, Vector3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use riemcond::multiview::{Camera, CameraRig, Correspondence};

use crate::Failure;

#[derive(Debug, Serialize, Deserialize)]
pub struct RigFile {
    /// Row-major `3 × 4` camera matrices.
    pub cameras: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PointFile {
    Object { y: Vec<f64> },
    Bare(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CorrespondenceFile {
    Object { x: Vec<f64> },
    Bare(Vec<f64>),
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("cannot parse {what} file {}: {e}", path.display())))
}

pub fn load_rig(path: &Path) -> Result<CameraRig, Failure> {
    let file: RigFile = read_json(path, "rig")?;
    let cameras = file
        .cameras
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != 12 {
                return Err(Failure::Input(format!(
                    "{}: cameras[{i}] has {} numbers, expected 12",
                    path.display(),
                    row.len()
                )));
            }
            Camera::from_row_major(row)
                .map_err(|e| Failure::Domain(format!("{}: cameras[{i}]: {e}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    CameraRig::new(cameras)
        .map_err(|e| Failure::Domain(format!("{}: cameras: {e}", path.display())))
}

pub fn rig_file(rig: &CameraRig) -> RigFile {
    RigFile {
        cameras: rig
            .cameras()
            .iter()
            .map(|c| c.to_row_major().to_vec())
            .collect(),
    }
}

fn check_finite(values: &[f64], path: &Path, field: &str) -> Result<(), Failure> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Failure::Input(format!(
            "{}: {field}[{i}] is not a finite number",
            path.display()
        ))),
        None => Ok(()),
    }
}

pub fn load_point(path: &Path) -> Result<Vector3<f64>, Failure> {
    let y = match read_json(path, "point")? {
        PointFile::Object { y } | PointFile::Bare(y) => y,
    };
    if y.len() != 3 {
        return Err(Failure::Input(format!(
            "{}: field y has {} numbers, expected 3",
            path.display(),
            y.len()
        )));
    }
    check_finite(&y, path, "y")?;
    Ok(Vector3::new(y[0], y[1], y[2]))
}

pub fn load_correspondence(path: &Path, views: usize) -> Result<Correspondence, Failure> {
    let x = match read_json(path, "correspondence")? {
        CorrespondenceFile::Object { x } | CorrespondenceFile::Bare(x) => x,
    };
    if x.len() != 2 * views {
        return Err(Failure::Input(format!(
            "{}: field x has {} numbers, expected {} for a rig of {views} cameras",
            path.display(),
            x.len(),
            2 * views
        )));
    }
    check_finite(&x, path, "x")?;
    Ok(Correspondence(DVector::from_vec(x)))
}

/// Write `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err =
        |e: std::io::Error| Failure::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Pretty JSON; floats use the shortest representation that parses back to
/// the same bits.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable value");
    out.push(b'\n');
    out
}
