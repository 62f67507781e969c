//! CSV input for data matrices: one row per sample, one column per
//! dimension. A header line is detected automatically (any field in the
//! first record that does not parse as a number marks it as a header).
//! Parse failures report the line and column they occurred at.

use std::path::Path;

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};

fn parse_record(fields: &[String], line: usize, out: &mut Vec<f64>) -> Result<()> {
    for (col, field) in fields.iter().enumerate() {
        let trimmed = field.trim();
        if trimmed.is_empty() {
            return Err(RbigError::Parse(format!(
                "line {line}, column {}: empty field",
                col + 1
            )));
        }
        let v: f64 = trimmed.parse().map_err(|_| {
            RbigError::Parse(format!(
                "line {line}, column {}: cannot parse {trimmed:?} as a number",
                col + 1
            ))
        })?;
        out.push(v);
    }
    Ok(())
}

/// Reads a numeric CSV file into a data matrix.
pub fn read_data_csv(path: &Path) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| RbigError::Parse(format!("{}: {e}", path.display())))?;

    let mut values: Vec<f64> = Vec::new();
    let mut dims: Option<usize> = None;
    let mut n_rows = 0usize;

    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record =
            record.map_err(|e| RbigError::Parse(format!("{}: line {line}: {e}", path.display())))?;
        let fields: Vec<String> = record.iter().map(|s| s.to_string()).collect();
        if fields.is_empty() || (fields.len() == 1 && fields[0].trim().is_empty()) {
            continue; // skip blank lines
        }
        if idx == 0 {
            // Header detection: if any field fails to parse as a number,
            // the first line is a header and is skipped.
            let mut probe = Vec::with_capacity(fields.len());
            if parse_record(&fields, line, &mut probe).is_err() {
                dims = Some(fields.len());
                continue;
            }
            dims = Some(fields.len());
            values.extend_from_slice(&probe);
            n_rows += 1;
            continue;
        }
        let d = dims.expect("dims set on first record");
        if fields.len() != d {
            return Err(RbigError::Parse(format!(
                "{}: line {line}: expected {d} columns, found {}",
                path.display(),
                fields.len()
            )));
        }
        parse_record(&fields, line, &mut values)
            .map_err(|e| RbigError::Parse(format!("{}: {e}", path.display())))?;
        n_rows += 1;
    }

    let d = dims.ok_or_else(|| {
        RbigError::Parse(format!("{}: file contains no data rows", path.display()))
    })?;
    if n_rows == 0 {
        return Err(RbigError::Parse(format!(
            "{}: file contains no data rows",
            path.display()
        )));
    }
    DataMatrix::from_row_major(n_rows, d, &values)
}

/// Writes a data matrix as headerless numeric CSV to any sink. Floats use
/// 17 significant digits, so a read-back reproduces them bit-exactly.
pub fn write_data_csv_to<W: std::io::Write>(sink: W, data: &DataMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let m = &data.0;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writer
            .write_record(&row)
            .map_err(|e| RbigError::Parse(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a data matrix as a headerless numeric CSV file.
pub fn write_data_csv(path: &Path, data: &DataMatrix) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_data_csv_to(file, data).map_err(|e| RbigError::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn reads_headerless_csv() {
        let f = write_temp("1.0,2.0\n3.0,4.0\n");
        let m = read_data_csv(f.path()).unwrap();
        assert_eq!(m.n_samples(), 2);
        assert_eq!(m.dims(), 2);
        assert_eq!(m.0[(1, 0)], 3.0);
    }

    #[test]
    fn detects_and_skips_header() {
        let f = write_temp("x,y\n1.0,2.0\n3.0,4.0\n");
        let m = read_data_csv(f.path()).unwrap();
        assert_eq!(m.n_samples(), 2);
        assert_eq!(m.0[(0, 1)], 2.0);
    }

    #[test]
    fn parse_error_reports_line_and_column() {
        let f = write_temp("1.0,2.0\n3.0,oops\n");
        let err = read_data_csv(f.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("column 2"), "{msg}");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let f = write_temp("1.0,2.0\n3.0\n");
        let err = read_data_csv(f.path()).unwrap_err();
        assert!(err.to_string().contains("expected 2 columns"));
    }

    #[test]
    fn empty_field_is_rejected() {
        let f = write_temp("1.0,2.0\n3.0,\n");
        let err = read_data_csv(f.path()).unwrap_err();
        assert!(err.to_string().contains("empty field"), "{err}");
    }

    #[test]
    fn empty_file_is_rejected() {
        let f = write_temp("");
        assert!(read_data_csv(f.path()).is_err());
    }

    #[test]
    fn round_trips_through_write() {
        let data = DataMatrix::from_row_major(2, 3, &[0.1, 0.2, 0.3, -1.5, 2.5e-8, 7.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        write_data_csv(&path, &data).unwrap();
        let back = read_data_csv(&path).unwrap();
        assert_eq!(data.0, back.0);
    }

    #[test]
    fn scientific_notation_and_whitespace_are_accepted() {
        let f = write_temp(" 1e-3 , -2.5E4 \n0.0,3\n");
        let m = read_data_csv(f.path()).unwrap();
        assert_eq!(m.0[(0, 0)], 1e-3);
        assert_eq!(m.0[(0, 1)], -2.5e4);
    }
}
