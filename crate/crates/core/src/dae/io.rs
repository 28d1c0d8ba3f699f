//! System directories (MatrixMarket files plus a JSON manifest) and CSV
//! renderings of trajectories.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DaeError, DiscreteMixedSystem, Load, LoadTerm, SystemParts, TimeProfile, Trajectory};
use crate::linalg::mtx::{self, MtxError};
use crate::linalg::{DenseMatrix, LinalgError, SparseMatrix, Vector};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_HEADER: &str = "t,norm_u_X,norm_lambda_M,constraint_residual";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error(transparent)]
    System(#[from] DaeError),
    #[error("{0}")]
    Format(String),
}

impl From<LinalgError> for IoError {
    fn from(e: LinalgError) -> Self {
        IoError::Mtx(MtxError::Matrix(e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadEntry {
    pub profile: TimeProfile,
    pub file: String,
}

/// Contents of `manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub problem: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub g_regular: bool,
    /// Matrix and initial-datum file names keyed by `R`, `A`, `B`, `Mx`,
    /// `My`, `Mm`, `u0`.
    pub files: BTreeMap<String, String>,
    pub f: Vec<LoadEntry>,
    pub g: Vec<LoadEntry>,
}

fn column(v: &Vector) -> DenseMatrix {
    DenseMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn load_entries(dir: &Path, load: &Load, prefix: &str) -> Result<Vec<LoadEntry>, IoError> {
    let Load::Separable { terms, .. } = load else {
        return Err(IoError::Format(format!(
            "load `{prefix}` is given by callbacks and cannot be written to disk"
        )));
    };
    terms
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let file = format!("{prefix}_{i}.mtx");
            mtx::write(&dir.join(&file), &SparseMatrix::from_dense(&column(&term.vector))?)?;
            Ok(LoadEntry {
                profile: term.profile,
                file,
            })
        })
        .collect()
}

/// Writes every matrix as MatrixMarket and the metadata as `manifest.json`.
pub fn write_system_dir(sys: &DiscreteMixedSystem, dir: &Path) -> Result<Manifest, IoError> {
    fs::create_dir_all(dir)?;
    let mut files = BTreeMap::new();
    let matrices: [(&str, &DenseMatrix); 6] = [
        ("R", sys.r()),
        ("A", sys.a()),
        ("B", sys.b()),
        ("Mx", sys.mx()),
        ("My", sys.my()),
        ("Mm", sys.mm()),
    ];
    for (key, matrix) in matrices {
        let file = format!("{key}.mtx");
        mtx::write(&dir.join(&file), &SparseMatrix::from_dense(matrix)?)?;
        files.insert(key.to_string(), file);
    }
    mtx::write(&dir.join("u0.mtx"), &SparseMatrix::from_dense(&column(sys.u0()))?)?;
    files.insert("u0".to_string(), "u0.mtx".to_string());
    let manifest = Manifest {
        problem: sys.name().to_string(),
        n: sys.n(),
        m: sys.m(),
        t_final: sys.t_final(),
        g_regular: sys.g_regular(),
        files,
        f: load_entries(dir, sys.f(), "f")?,
        g: load_entries(dir, sys.g(), "g")?,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

fn read_matrix(dir: &Path, manifest: &Manifest, key: &str, rows: usize, cols: usize) -> Result<DenseMatrix, IoError> {
    let file = manifest
        .files
        .get(key)
        .ok_or_else(|| IoError::Format(format!("manifest lists no file for `{key}`")))?;
    let a = mtx::read(&dir.join(file))?;
    if a.rows() != rows || a.cols() != cols {
        return Err(IoError::Format(format!(
            "{file} is {}x{}, expected {rows}x{cols}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.to_dense())
}

fn read_vector(dir: &Path, file: &str, len: usize) -> Result<Vector, IoError> {
    let a = mtx::read(&dir.join(file))?;
    if a.rows() != len || a.cols() != 1 {
        return Err(IoError::Format(format!(
            "{file} is {}x{}, expected a column of length {len}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.to_dense().column(0).into_owned())
}

fn read_load(dir: &Path, entries: &[LoadEntry], dim: usize) -> Result<Load, IoError> {
    let terms = entries
        .iter()
        .map(|e| {
            Ok(LoadTerm {
                profile: e.profile,
                vector: read_vector(dir, &e.file, dim)?,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Load::separable(dim, terms))
}

/// Reads a directory written by [`write_system_dir`].
pub fn read_system_dir(dir: &Path) -> Result<DiscreteMixedSystem, IoError> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let (n, m) = (manifest.n, manifest.m);
    let u0_file = manifest
        .files
        .get("u0")
        .ok_or_else(|| IoError::Format("manifest lists no file for `u0`".into()))?;
    let parts = SystemParts {
        name: manifest.problem.clone(),
        r: read_matrix(dir, &manifest, "R", n, n)?,
        a: read_matrix(dir, &manifest, "A", n, n)?,
        b: read_matrix(dir, &manifest, "B", m, n)?,
        mx: read_matrix(dir, &manifest, "Mx", n, n)?,
        my: read_matrix(dir, &manifest, "My", n, n)?,
        mm: read_matrix(dir, &manifest, "Mm", m, m)?,
        f: read_load(dir, &manifest.f, n)?,
        g: read_load(dir, &manifest.g, m)?,
        u0: read_vector(dir, u0_file, n)?,
        t_final: manifest.t_final,
        g_regular: manifest.g_regular,
    };
    Ok(DiscreteMixedSystem::new(parts)?)
}

/// `t,norm_u_X,norm_lambda_M,constraint_residual`, one row per time level.
pub fn trajectory_csv(sys: &DiscreteMixedSystem, traj: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for row in traj.norms(sys) {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            row.t, row.norm_u_x, row.norm_lambda_m, row.constraint_residual
        );
    }
    out
}

/// Every coefficient of `uⁿ` and `λⁿ`, one row per time level.
pub fn full_state_csv(traj: &Trajectory) -> String {
    let n = traj.u.first().map_or(0, |u| u.len());
    let m = traj.lambda.first().map_or(0, |l| l.len());
    let mut out = String::from("t");
    for i in 0..n {
        let _ = write!(out, ",u_{i}");
    }
    for i in 0..m {
        let _ = write!(out, ",lambda_{i}");
    }
    out.push('\n');
    for (k, t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{t:e}");
        for v in traj.u[k].iter().chain(traj.lambda[k].iter()) {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}
