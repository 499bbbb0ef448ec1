//! Result files: per-point CSV and the `key: value` summary.

use crate::error::CliError;
use std::io::{Read, Write};
use std::path::Path;

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "scheme",
    "p",
    "estimate",
    "std_error",
    "M",
    "master_seed",
];

/// One ladder point of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub n: usize,
    pub scheme: String,
    pub p: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub master_seed: u64,
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sort by `(scheme, n)`.
pub fn sort_rows(rows: &mut [CsvRow]) {
    rows.sort_by(|a, b| a.scheme.cmp(&b.scheme).then(a.n.cmp(&b.n)));
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), CliError> {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &rows {
        w.write_record([
            r.n.to_string(),
            r.scheme.clone(),
            format_real(r.p),
            format_real(r.estimate),
            format_real(r.std_error),
            r.samples.to_string(),
            r.master_seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::Csv(e.to_string()))?;
    Ok(())
}

pub fn csv_string(rows: &[CsvRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| CliError::Csv(e.to_string()))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Csv(format!("unexpected header {header:?}")));
    }
    let field = |rec: &csv::StringRecord, i: usize| rec.get(i).unwrap_or_default().to_string();
    let bad = |what: &str, e: &dyn std::fmt::Display| CliError::Csv(format!("bad {what}: {e}"));
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(CsvRow {
                n: field(&rec, 0).parse().map_err(|e| bad("n", &e))?,
                scheme: field(&rec, 1),
                p: field(&rec, 2).parse().map_err(|e| bad("p", &e))?,
                estimate: field(&rec, 3).parse().map_err(|e| bad("estimate", &e))?,
                std_error: field(&rec, 4).parse().map_err(|e| bad("std_error", &e))?,
                samples: field(&rec, 5).parse().map_err(|e| bad("M", &e))?,
                master_seed: field(&rec, 6).parse().map_err(|e| bad("master_seed", &e))?,
            })
        })
        .collect()
}

/// Ordered `key: value` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub lines: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, scheme: &str, estimate: f64) -> CsvRow {
        CsvRow {
            n,
            scheme: scheme.into(),
            p: 2.0,
            estimate,
            std_error: estimate / 37.0,
            samples: 500,
            master_seed: u64::MAX,
        }
    }

    #[test]
    fn empty_ladder_is_header_only() {
        assert_eq!(
            csv_string(&[]).unwrap(),
            "n,scheme,p,estimate,std_error,M,master_seed\n"
        );
    }

    #[test]
    fn rows_are_sorted_by_scheme_then_n() {
        let text = csv_string(&[
            row(64, "standard", 0.1),
            row(16, "randomised", 0.3),
            row(32, "randomised", 0.2),
        ])
        .unwrap();
        let parsed = parse_csv(text.as_bytes()).unwrap();
        let keys: Vec<(String, usize)> = parsed.iter().map(|r| (r.scheme.clone(), r.n)).collect();
        assert_eq!(
            keys,
            vec![
                ("randomised".into(), 16),
                ("randomised".into(), 32),
                ("standard".into(), 64)
            ]
        );
        let three = csv_string(&[row(64, "r", 0.1), row(16, "r", 0.3), row(32, "r", 0.2)]).unwrap();
        assert_eq!(three.lines().count(), 4);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let rows: Vec<CsvRow> = (0..40)
            .map(|i| {
                row(
                    1 << (i % 12),
                    if i % 3 == 0 { "standard" } else { "randomised" },
                    (i as f64 + 0.1).sqrt() * 1e-7 / 3.0,
                )
            })
            .collect();
        let text = csv_string(&rows).unwrap();
        let again = csv_string(&parse_csv(text.as_bytes()).unwrap()).unwrap();
        assert_eq!(text, again);
        for x in [0.0, 1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -2.5e-17] {
            assert_eq!(
                format_real(x).parse::<f64>().unwrap().to_bits(),
                x.to_bits()
            );
        }
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
