//! Matrix file ingestion and serialization.
//!
//! Two text formats are accepted, chosen by the first non-blank line:
//!
//! * Matrix Market `array` files, starting with `%%MatrixMarket`. Entries are
//!   listed in column-major order after the `rows cols` size line.
//! * Plain whitespace-delimited rows, one matrix row per line. Blank lines and
//!   lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Plain,
    MatrixMarket,
}

pub fn detect_format(text: &str) -> MatrixFormat {
    match text.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some(l) if l.starts_with("%%MatrixMarket") => MatrixFormat::MatrixMarket,
        _ => MatrixFormat::Plain,
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, &path.display().to_string())
}

/// Parses `text` in whichever format [`detect_format`] reports. `source_name`
/// is only used in error messages.
pub fn parse_matrix(text: &str, source_name: &str) -> Result<DMatrix<f64>> {
    match detect_format(text) {
        MatrixFormat::Plain => parse_plain(text, source_name),
        MatrixFormat::MatrixMarket => parse_matrix_market(text, source_name),
    }
}

fn parse_entry(token: &str, source_name: &str, row: usize, column: usize) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        source_name: source_name.to_string(),
        row,
        column,
        message: format!("non-numeric entry {token:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            source_name: source_name.to_string(),
            row,
            column,
            message: format!("non-finite entry {token:?}"),
        });
    }
    Ok(value)
}

fn parse_plain(text: &str, source_name: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = rows.len() + 1;
        let values = line
            .split_whitespace()
            .enumerate()
            .map(|(j, tok)| parse_entry(tok, source_name, row, j + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::Format {
                    source_name: source_name.to_string(),
                    message: format!(
                        "row {row} has {} entries, expected {}",
                        values.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Format {
            source_name: source_name.to_string(),
            message: "no matrix rows".into(),
        });
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn parse_matrix_market(text: &str, source_name: &str) -> Result<DMatrix<f64>> {
    let format_err = |message: String| Error::Format {
        source_name: source_name.to_string(),
        message,
    };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().unwrap_or_default();
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() != 5 || fields[1] != "matrix" {
        return Err(format_err(format!("bad header {header:?}")));
    }
    if fields[2] != "array" {
        return Err(format_err(format!(
            "only the array layout is supported, got {:?}",
            fields[2]
        )));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(format_err(format!("unsupported field type {:?}", fields[3])));
    }
    if fields[4] != "general" {
        return Err(format_err(format!("unsupported symmetry {:?}", fields[4])));
    }

    let mut body = lines.filter(|l| !l.starts_with('%'));
    let size_line = body
        .next()
        .ok_or_else(|| format_err("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format_err(format!("bad size line {size_line:?}")))?;
    let [nrows, ncols] = dims[..] else {
        return Err(format_err(format!("bad size line {size_line:?}")));
    };

    let mut values = Vec::with_capacity(nrows * ncols);
    for token in body.flat_map(str::split_whitespace) {
        let k = values.len();
        if k == nrows * ncols {
            return Err(format_err(format!(
                "more than {} entries",
                nrows * ncols
            )));
        }
        // column-major
        values.push(parse_entry(token, source_name, k % nrows + 1, k / nrows + 1)?);
    }
    if values.len() != nrows * ncols {
        return Err(format_err(format!(
            "expected {} entries, found {}",
            nrows * ncols,
            values.len()
        )));
    }
    Ok(DMatrix::from_column_slice(nrows, ncols, &values))
}

/// Shortest representation that parses back to the same `f64`.
fn format_value(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_plain(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_value(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix_market(m: &DMatrix<f64>) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for v in m.iter() {
        out.push_str(&format_value(*v));
        out.push('\n');
    }
    out
}

pub fn write_matrix(m: &DMatrix<f64>, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Plain => write_plain(m),
        MatrixFormat::MatrixMarket => write_matrix_market(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_rows() {
        let m = parse_matrix("# comment\n1 2\n\n3 -4.5\n", "t").unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, -4.5]));
    }

    #[test]
    fn matrix_market_is_column_major() {
        let text = "%%MatrixMarket matrix array real general\n% c\n2 3\n1\n4\n2\n5\n3 6\n";
        let m = parse_matrix(text, "t").unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]));
    }

    #[test]
    fn non_numeric_entry_reports_location() {
        let err = parse_matrix("1 2\n3 x\n", "t").unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (2, 2)),
            e => panic!("unexpected {e:?}"),
        }
        let err = parse_matrix(
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\nnan?\n4\n",
            "t",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (1, 2)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_infinite_and_ragged() {
        assert!(matches!(parse_matrix("1 inf\n", "t"), Err(Error::Parse { .. })));
        assert!(matches!(parse_matrix("1 2\n3\n", "t"), Err(Error::Format { .. })));
        assert!(matches!(parse_matrix("\n\n", "t"), Err(Error::Format { .. })));
    }

    #[test]
    fn rejects_unsupported_matrix_market_variants() {
        let coord = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 3\n";
        assert!(matches!(parse_matrix(coord, "t"), Err(Error::Format { .. })));
        let short = "%%MatrixMarket matrix array real general\n2 2\n1 2 3\n";
        assert!(matches!(parse_matrix(short, "t"), Err(Error::Format { .. })));
    }

    fn matrix_strategy() -> impl Strategy<Value = DMatrix<f64>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                prop_oneof![
                    any::<f64>().prop_filter("finite", |v| v.is_finite()),
                    -1e3..1e3f64,
                ],
                r * c,
            )
            .prop_map(move |v| DMatrix::from_vec(r, c, v))
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(m in matrix_strategy()) {
            for format in [MatrixFormat::Plain, MatrixFormat::MatrixMarket] {
                let text = write_matrix(&m, format);
                prop_assert_eq!(detect_format(&text), format);
                let back = parse_matrix(&text, "rt").unwrap();
                prop_assert_eq!(back.shape(), m.shape());
                for (a, b) in back.iter().zip(m.iter()) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }
    }
}
