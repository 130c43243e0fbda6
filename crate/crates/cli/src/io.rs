//! Matrix and label file formats.
//!
//! Two matrix formats are supported, selected by file extension:
//!
//! * **Dense CSV** (any extension other than `.mtx`): one row per feature,
//!   one comma-separated column per sample, no header. Floats are written
//!   with Rust's shortest round-trip formatting, so a write/read cycle
//!   reproduces the matrix bit for bit.
//! * **Matrix Market** (`.mtx`): the standard `%%MatrixMarket` text format.
//!   Both `array` and `coordinate` layouts are read; writes use the dense
//!   `array` layout (column-major, like the format specifies).
//!
//! Label files are one non-negative integer per line. Outlier-indicator
//! files are one `0`/`1` per line.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use subseg_core::{DataMatrix, Labels};

use crate::error::{io_err, CliError, Result};

/// Reads a matrix, choosing the format from the file extension.
pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let parsed = if has_mtx_extension(path) {
        parse_matrix_market(&text)
    } else {
        parse_dense_csv(&text)
    };
    let array = parsed.map_err(|msg| CliError::Validation(format!("{}: {msg}", path.display())))?;
    DataMatrix::new(array).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Writes a matrix, choosing the format from the file extension.
pub fn write_matrix(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let text = if has_mtx_extension(path) {
        render_matrix_market(matrix)
    } else {
        render_dense_csv(matrix)
    };
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn has_mtx_extension(path: &Path) -> bool {
    path.extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("mtx"))
}

fn parse_dense_csv(text: &str) -> std::result::Result<Array2<f64>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row =
            line.split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| {
                        format!("line {}: invalid number {:?}", line_no + 1, field.trim())
                    })
                })
                .collect::<std::result::Result<Vec<f64>, String>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "line {}: expected {} columns, found {}",
                    line_no + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("matrix file contains no data rows".to_string());
    }
    let (m, n) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((m, n), flat).map_err(|e| e.to_string())
}

fn render_dense_csv(matrix: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in matrix.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn parse_matrix_market(text: &str) -> std::result::Result<Array2<f64>, String> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or("empty matrix market file")?;
    let banner_fields: Vec<String> = banner
        .split_whitespace()
        .map(|f| f.to_ascii_lowercase())
        .collect();
    if banner_fields.len() < 4
        || banner_fields[0] != "%%matrixmarket"
        || banner_fields[1] != "matrix"
    {
        return Err("missing %%MatrixMarket matrix banner".to_string());
    }
    let layout = banner_fields[2].as_str();
    let field = banner_fields[3].as_str();
    if field != "real" && field != "double" && field != "integer" {
        return Err(format!("unsupported matrix market field type {field:?}"));
    }
    if let Some(symmetry) = banner_fields.get(4) {
        if symmetry != "general" {
            return Err(format!("unsupported matrix market symmetry {symmetry:?}"));
        }
    }

    let mut body = lines.filter(|l| !l.trim_start().starts_with('%') && !l.trim().is_empty());
    let size_line = body.next().ok_or("missing size line")?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| format!("invalid size entry {f:?}"))
        })
        .collect::<std::result::Result<_, String>>()?;

    match layout {
        "array" => {
            let [m, n] = dims[..] else {
                return Err("array size line must be `rows cols`".to_string());
            };
            let mut values = Vec::with_capacity(m * n);
            for line in body {
                for f in line.split_whitespace() {
                    values.push(
                        f.parse::<f64>()
                            .map_err(|_| format!("invalid entry {f:?}"))?,
                    );
                }
            }
            if values.len() != m * n {
                return Err(format!(
                    "expected {} entries for a {m}x{n} array, found {}",
                    m * n,
                    values.len()
                ));
            }
            // Array layout is column-major.
            let mut out = Array2::zeros((m, n));
            for (idx, v) in values.into_iter().enumerate() {
                out[[idx % m, idx / m]] = v;
            }
            Ok(out)
        }
        "coordinate" => {
            let [m, n, nnz] = dims[..] else {
                return Err("coordinate size line must be `rows cols nnz`".to_string());
            };
            let mut out = Array2::zeros((m, n));
            let mut seen = 0usize;
            for line in body {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let [i, j, v] = fields[..] else {
                    return Err(format!("invalid coordinate entry {line:?}"));
                };
                let i: usize = i.parse().map_err(|_| format!("invalid row index {i:?}"))?;
                let j: usize = j
                    .parse()
                    .map_err(|_| format!("invalid column index {j:?}"))?;
                let v: f64 = v.parse().map_err(|_| format!("invalid value {v:?}"))?;
                if i == 0 || i > m || j == 0 || j > n {
                    return Err(format!("coordinate ({i}, {j}) outside {m}x{n} matrix"));
                }
                out[[i - 1, j - 1]] = v;
                seen += 1;
            }
            if seen != nnz {
                return Err(format!("expected {nnz} coordinate entries, found {seen}"));
            }
            Ok(out)
        }
        other => Err(format!("unsupported matrix market layout {other:?}")),
    }
}

fn render_matrix_market(matrix: &Array2<f64>) -> String {
    let (m, n) = matrix.dim();
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{m} {n}\n"));
    for j in 0..n {
        for i in 0..m {
            out.push_str(&format!("{}\n", matrix[[i, j]]));
        }
    }
    out
}

/// Reads a label file: one non-negative integer per line.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut labels = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim().trim_end_matches(',');
        if trimmed.is_empty() {
            continue;
        }
        let value: usize = trimmed.parse().map_err(|_| {
            CliError::Validation(format!(
                "{}: line {}: invalid label {:?}",
                path.display(),
                line_no + 1,
                trimmed
            ))
        })?;
        labels.push(value);
    }
    if labels.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: label file contains no entries",
            path.display()
        )));
    }
    Ok(labels)
}

/// Writes labels, one per line.
pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::new();
    for l in labels {
        out.push_str(&format!("{l}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Writes an outlier-indicator vector, one `0`/`1` per line.
pub fn write_indicators(path: &Path, flags: &[bool]) -> Result<()> {
    let mut out = String::new();
    for f in flags {
        out.push_str(if *f { "1\n" } else { "0\n" });
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Loads a preprocessed sequence directory containing `X.csv` (features x
/// samples) and `labels.csv` (one ground-truth label per sample).
///
/// A missing directory or missing file is an I/O error; files that exist but
/// are malformed or inconsistent with each other are validation errors.
pub fn load_sequence_dir(dir: &Path) -> Result<(DataMatrix, Labels)> {
    let x_path = dir.join("X.csv");
    let labels_path = dir.join("labels.csv");
    for p in [&x_path, &labels_path] {
        if !p.is_file() {
            return Err(CliError::Io(format!("{}: file not found", p.display())));
        }
    }
    let x = read_matrix(&x_path)?;
    let raw = read_labels(&labels_path)?;
    if raw.len() != x.ncols() {
        return Err(CliError::Validation(format!(
            "{}: {} labels for {} samples",
            labels_path.display(),
            raw.len(),
            x.ncols()
        )));
    }
    let labels = Labels::new(raw)
        .map_err(|e| CliError::Validation(format!("{}: {e}", labels_path.display())))?;
    Ok((x, labels))
}
