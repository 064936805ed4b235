//! Matrix and prior files.
//!
//! A matrix file is a JSON document `{"d": n, "re": [[..]], "im": [[..]]}`
//! holding the real and imaginary parts of every entry `A[j][k]`.

use std::fs;
use std::path::Path;

use maxcont_core::qmatrix::{CMat, C64};
use maxcont_core::{DensityMatrix, HermitianMatrix, MatrixC, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let d = m.nrows();
        Self {
            d,
            re: (0..d).map(|j| (0..d).map(|k| m[(j, k)].re).collect()).collect(),
            im: (0..d).map(|j| (0..d).map(|k| m[(j, k)].im).collect()).collect(),
        }
    }

    /// Parses and validates; errors carry the JSON line/column or the offending field.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let file: Self = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        file.validate().map_err(|message| CliError::Parse {
            path: origin.to_string(),
            message,
        })?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), String> {
        if self.d == 0 {
            return Err("field `d` must be at least 1".into());
        }
        for (name, plane) in [("re", &self.re), ("im", &self.im)] {
            if plane.len() != self.d {
                return Err(format!("field `{name}`: expected {} rows, found {}", self.d, plane.len()));
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != self.d {
                    return Err(format!(
                        "field `{name}` row {j}: expected {} entries, found {}",
                        self.d,
                        row.len()
                    ));
                }
                if let Some(k) = row.iter().position(|v| !v.is_finite()) {
                    return Err(format!("field `{name}` entry [{j}][{k}] is not finite"));
                }
            }
        }
        Ok(())
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_fn(self.d, self.d, |j, k| C64::new(self.re[j][k], self.im[j][k]))
    }
}

fn read(path: &Path) -> Result<(String, String), CliError> {
    let origin = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: origin.clone(),
        source,
    })?;
    Ok((text, origin))
}

pub fn read_matrix(path: &Path) -> Result<MatrixC, CliError> {
    let (text, origin) = read(path)?;
    Ok(MatrixC::new(MatrixFile::parse(&text, &origin)?.to_cmat())?)
}

/// Reads a prior state; the matrix must be Hermitian and positive semidefinite
/// and is divided by its trace.
pub fn read_prior(path: &Path, d: usize, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
    let (text, origin) = read(path)?;
    let file = MatrixFile::parse(&text, &origin)?;
    if file.d != d {
        return Err(CliError::Parse {
            path: origin,
            message: format!("prior has dimension {} but the matrix has dimension {d}", file.d),
        });
    }
    let m = file.to_cmat();
    let asym = (&m - m.adjoint()).norm();
    if asym > 1e-10 * (1.0 + m.norm()) {
        return Err(CliError::Parse {
            path: origin,
            message: format!("prior is not Hermitian (‖P − P*‖ = {asym:e})"),
        });
    }
    DensityMatrix::normalized(HermitianMatrix::new(m), tol).map_err(|e| CliError::Parse {
        path: origin,
        message: e.to_string(),
    })
}
