//! CSV ingestion and emission, and the versioned model file.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::simkit::FaultSchedule;
use crate::stat_core::GaussianModel;
use crate::Time;

pub const MODEL_FORMAT: &str = "ifdetect-gaussian-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: row {row}, column {column}: {message}")]
    Parse { path: PathBuf, row: usize, column: String, message: String },
    #[error("{path}: missing column '{column}'")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn open(path: &Path) -> IoResult<File> {
    File::open(path).map_err(|source| IoError::File { path: path.into(), source })
}

fn create(path: &Path) -> IoResult<File> {
    File::create(path).map_err(|source| IoError::File { path: path.into(), source })
}

fn csv_err(path: &Path, e: csv::Error) -> IoError {
    let row = e.position().map_or(0, |p| p.line() as usize);
    IoError::Parse { path: path.into(), row, column: String::new(), message: e.to_string() }
}

/// Numeric samples read from a CSV file with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    /// Variable names, excluding a leading `k` index column.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a sample CSV. A first column named `k` is treated as the time index
/// and dropped. With `expected`, the variable columns must be exactly those.
pub fn read_samples(path: &Path, expected: Option<&[String]>) -> IoResult<SampleTable> {
    read_samples_from(open(path)?, path, expected)
}

pub fn read_samples_from<R: Read>(reader: R, path: &Path, expected: Option<&[String]>) -> IoResult<SampleTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(|e| csv_err(path, e))?.iter().map(str::to_owned).collect();
    let skip = usize::from(header.first().is_some_and(|h| h == "k"));
    let columns: Vec<String> = header[skip..].to_vec();
    if columns.is_empty() {
        return Err(IoError::Format { path: path.into(), message: "no variable columns".into() });
    }
    if let Some(want) = expected {
        if let Some(missing) = want.iter().find(|c| !columns.contains(c)) {
            return Err(IoError::MissingColumn { path: path.into(), column: missing.clone() });
        }
        if columns.len() != want.len() {
            return Err(IoError::Format {
                path: path.into(),
                message: format!("expected {} variable columns, found {}", want.len(), columns.len()),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != header.len() {
            return Err(IoError::Parse {
                path: path.into(),
                row: line,
                column: header.get(rec.len()).cloned().unwrap_or_default(),
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let mut row = Vec::with_capacity(columns.len());
        for (j, field) in rec.iter().enumerate().skip(skip) {
            let v: f64 = field.parse().map_err(|_| IoError::Parse {
                path: path.into(),
                row: line,
                column: header[j].clone(),
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(IoError::Parse {
                    path: path.into(),
                    row: line,
                    column: header[j].clone(),
                    message: "value is not finite".into(),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(SampleTable { columns, rows })
}

pub fn default_columns(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("var_{j}")).collect()
}

/// Writes `k,var_1..var_p` rows with `k` starting at 1.
pub fn write_samples<W: Write>(writer: W, columns: &[String], rows: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["k".to_string()];
    header.extend_from_slice(columns);
    w.write_record(&header)?;
    for (i, row) in rows.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_samples_file(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> IoResult<()> {
    write_samples(create(path)?, columns, rows).map_err(|e| csv_err(path, e))
}

/// One ground-truth row `q,mu,nu,f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub q: usize,
    pub mu: Time,
    pub nu: Time,
    pub f: f64,
}

pub fn truth_rows(schedule: &FaultSchedule<f64>) -> Vec<TruthRow> {
    schedule
        .episodes()
        .iter()
        .enumerate()
        .map(|(i, e)| TruthRow { q: i + 1, mu: e.mu, nu: e.nu, f: e.magnitude })
        .collect()
}

pub fn write_truth_file(path: &Path, rows: &[TruthRow]) -> IoResult<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| IoError::File { path: path.into(), source })
}

pub fn read_truth_file(path: &Path) -> IoResult<Vec<TruthRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    rdr.deserialize().map(|r| r.map_err(|e| csv_err(path, e))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    format_version: u32,
    n_train: usize,
    dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    columns: Vec<String>,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

/// A trained model together with the variable names it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub columns: Vec<String>,
    pub model: GaussianModel<f64>,
}

pub fn model_to_json(model: &GaussianModel<f64>, columns: &[String]) -> String {
    let doc = ModelDoc {
        format: MODEL_FORMAT.into(),
        format_version: MODEL_FORMAT_VERSION,
        n_train: model.n_train(),
        dim: model.dim(),
        columns: columns.to_vec(),
        mean: model.mean().to_vec(),
        cov: model.cov().rows(),
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

pub fn model_from_json(text: &str, path: &Path) -> IoResult<ModelFile> {
    let fmt = |message: String| IoError::Format { path: path.into(), message };
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| fmt(e.to_string()))?;
    if doc.format != MODEL_FORMAT {
        return Err(fmt(format!("not a model file (format '{}')", doc.format)));
    }
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(fmt(format!("unsupported model format version {}", doc.format_version)));
    }
    if doc.mean.len() != doc.dim || (!doc.columns.is_empty() && doc.columns.len() != doc.dim) {
        return Err(fmt(format!("dimension {} disagrees with the stored vectors", doc.dim)));
    }
    let cov = Matrix::from_rows(&doc.cov)?;
    let model = GaussianModel::from_parts(doc.mean, cov, doc.n_train)?;
    let columns = if doc.columns.is_empty() { default_columns(doc.dim) } else { doc.columns };
    Ok(ModelFile { columns, model })
}

pub fn save_model(path: &Path, model: &GaussianModel<f64>, columns: &[String]) -> IoResult<()> {
    let mut f = create(path)?;
    f.write_all(model_to_json(model, columns).as_bytes())
        .map_err(|source| IoError::File { path: path.into(), source })
}

pub fn load_model(path: &Path) -> IoResult<ModelFile> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| IoError::File { path: path.into(), source })?;
    model_from_json(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem.csv")
    }

    #[test]
    fn reads_with_and_without_index_column() {
        let t = read_samples_from("k,a,b\n1,1.5,2\n2,3,4e-1\n".as_bytes(), p(), None).unwrap();
        assert_eq!(t.columns, vec!["a", "b"]);
        assert_eq!(t.rows, vec![vec![1.5, 2.0], vec![3.0, 0.4]]);
        let t = read_samples_from("a,b\n1,2\n".as_bytes(), p(), None).unwrap();
        assert_eq!(t.rows, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let err = read_samples_from("k,a,b\n1,1,2\n2,x,4\n".as_bytes(), p(), None).unwrap_err();
        match err {
            IoError::Parse { row, column, .. } => assert_eq!((row, column.as_str()), (3, "a")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn short_row_is_reported() {
        let err = read_samples_from("a,b\n1,2\n3\n".as_bytes(), p(), None).unwrap_err();
        assert!(matches!(err, IoError::Parse { row: 3, .. }), "{err}");
    }

    #[test]
    fn missing_expected_column_is_named() {
        let want = vec!["a".to_string(), "c".to_string()];
        let err = read_samples_from("a,b\n1,2\n".as_bytes(), p(), Some(&want)).unwrap_err();
        assert!(matches!(err, IoError::MissingColumn { ref column, .. } if column == "c"), "{err}");
    }

    #[test]
    fn model_round_trips_exactly() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64).sin() * 3.1, (i as f64 * 0.37).cos() / 7.0]).collect();
        let model = GaussianModel::fit(&rows).unwrap();
        let cols = default_columns(2);
        let back = model_from_json(&model_to_json(&model, &cols), p()).unwrap();
        assert_eq!(back.model, model);
        assert_eq!(back.columns, cols);
    }

    #[test]
    fn wrong_version_is_rejected() {
        let model = GaussianModel::from_parts(vec![0.0], Matrix::identity(1), 10).unwrap();
        let text = model_to_json(&model, &[]).replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(model_from_json(&text, p()), Err(IoError::Format { .. })));
    }

    #[test]
    fn written_samples_read_back() {
        let mut buf = Vec::new();
        let rows = vec![vec![0.1, -2.5e-7], vec![1e10, 3.0]];
        write_samples(&mut buf, &default_columns(2), &rows).unwrap();
        let t = read_samples_from(buf.as_slice(), p(), None).unwrap();
        assert_eq!(t.rows, rows);
        assert_eq!(t.columns, default_columns(2));
    }
}
