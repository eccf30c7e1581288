//! Matrix files and all-or-nothing output.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pseudounitary::CMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// JSON matrix file. Entries are `[re, im]` pairs in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub data: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix, tol: Option<f64>) -> Self {
        Self { n: m.n(), data: m.rows(), tol }
    }

    pub fn to_matrix(&self, tol: f64) -> Result<CMatrix, CliError> {
        if self.data.len() != self.n || self.data.iter().any(|r| r.len() != self.n) {
            return Err(CliError::Input(format!("data is not {0}×{0}", self.n)));
        }
        let m = CMatrix::from_rows(&self.data).map_err(|e| CliError::Input(e.to_string()))?;
        m.with_tol(tol).map_err(|e| CliError::Input(e.to_string()))
    }

    /// Serialized with the shortest decimal that reads back to the same
    /// `f64`, never more than 17 significant digits.
    pub fn to_json(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(self).expect("matrix files serialize");
        s.push('\n');
        s.into_bytes()
    }
}

/// A parsed input with its raw bytes, for digests.
pub struct Loaded {
    pub file: MatrixFile,
    pub bytes: Vec<u8>,
}

pub fn parse_json(bytes: &[u8]) -> Result<MatrixFile, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Input(format!("matrix file: {e}")))
}

/// Two columns `re,im` in row-major order; a header row is optional.
pub fn parse_csv(bytes: &[u8]) -> Result<MatrixFile, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(bytes);
    let mut values = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("csv: {e}")))?;
        if rec.len() != 2 {
            return Err(CliError::Input(format!("csv row {}: expected 2 columns, found {}", k + 1, rec.len())));
        }
        if k == 0 && rec[0].eq_ignore_ascii_case("re") && rec[1].eq_ignore_ascii_case("im") {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| CliError::Input(format!("csv row {}: {s:?}: {e}", k + 1)));
        values.push(Complex64::new(num(&rec[0])?, num(&rec[1])?));
    }
    let n = (values.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != values.len() {
        return Err(CliError::Input(format!("csv holds {} entries, not a square count", values.len())));
    }
    let data = values.chunks(n).map(|r| r.to_vec()).collect();
    Ok(MatrixFile { n, data, tol: None })
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let file = if is_csv { parse_csv(&bytes)? } else { parse_json(&bytes)? };
    Ok(Loaded { file, bytes })
}

/// Files written together or not at all.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Stages every file next to its target, then renames them into place.
    /// On failure the staged files are removed.
    pub fn commit(self) -> Result<(), CliError> {
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
        let cleanup = |staged: &[(PathBuf, PathBuf)]| {
            for (tmp, _) in staged {
                let _ = fs::remove_file(tmp);
            }
        };
        for (path, bytes) in &self.files {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let tmp = path.with_file_name(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, bytes) {
                let _ = fs::remove_file(&tmp);
                cleanup(&staged);
                return Err(CliError::Input(format!("{}: {e}", path.display())));
            }
            staged.push((tmp, path.clone()));
        }
        for (k, (tmp, path)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, path) {
                cleanup(&staged[k..]);
                return Err(CliError::Input(format!("{}: {e}", path.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_exact() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 1e308, std::f64::consts::PI, 5e-324];
        let data = vec![
            vec![Complex64::new(vals[0], vals[1]), Complex64::new(vals[2], vals[3])],
            vec![Complex64::new(vals[4], vals[5]), Complex64::new(-0.0, 7.0)],
        ];
        let f = MatrixFile { n: 2, data, tol: Some(1e-10) };
        let back = parse_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        for (a, b) in back.data.iter().flatten().zip(f.data.iter().flatten()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn csv_import() {
        let f = parse_csv(b"re,im\n1,0\n0,2\n0,-1\n3.5,0\n").unwrap();
        assert_eq!(f.n, 2);
        assert_eq!(f.data[0][1], Complex64::new(0.0, 2.0));
        assert_eq!(f.data[1][0], Complex64::new(0.0, -1.0));
        assert!(parse_csv(b"1,0\n2,0\n3,0\n").is_err());
        assert!(parse_csv(b"1,0,4\n").is_err());
    }

    #[test]
    fn ragged_data_is_rejected() {
        let f = parse_json(br#"{"n": 2, "data": [[[1,0],[0,0]], [[0,0]]]}"#).unwrap();
        assert!(matches!(f.to_matrix(1e-9), Err(CliError::Input(_))));
        assert!(parse_json(br#"{"n": 1, "data": [[[1,0]]], "extra": 1}"#).is_err());
    }
}
