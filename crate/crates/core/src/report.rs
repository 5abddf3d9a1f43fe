//! Tabular study results and their CSV form.
//!
//! A report is a list of column labels, numeric rows and free-form metadata.
//! The CSV rendering writes metadata as `# key=value` comment lines (sorted
//! by key), then one header line, then one line per row. Numbers use
//! scientific notation with 17 significant digits, which round-trips every
//! finite `f64` exactly; non-finite values are written as `NaN`, `inf` or
//! `-inf`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyReport {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: BTreeMap<String, String>,
}

impl StudyReport {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.labels.len() {
            return Err(Error::Domain(format!(
                "row has {} values for {} columns",
                row.len(),
                self.labels.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "{}", self.labels.join(","));
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format_number(*v));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut metadata = BTreeMap::new();
        let labels = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::Domain("missing header line".into()));
            };
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::Domain(format!("line {}: malformed metadata", i + 1)))?;
                metadata.insert(k.to_string(), v.to_string());
            } else {
                break line.split(',').map(str::to_string).collect::<Vec<_>>();
            }
        };
        let mut report = StudyReport {
            labels,
            rows: Vec::new(),
            metadata,
        };
        for (i, line) in lines {
            let row = line
                .split(',')
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Domain(format!("line {}: bad number {t:?}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            report.push_row(row)?;
        }
        Ok(report)
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = StudyReport::new(["t", "value"]);
        assert_eq!(r.to_csv_string(), "t,value\n");
    }

    #[test]
    fn one_row() {
        let mut r = StudyReport::new(["x", "y"]);
        r.push_row(vec![1.0, 0.5]).unwrap();
        let s = r.to_csv_string();
        assert_eq!(s, "x,y\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert!(!s.contains(';'));
    }

    #[test]
    fn wrong_row_length_is_rejected() {
        let mut r = StudyReport::new(["x", "y"]);
        assert!(r.push_row(vec![1.0]).is_err());
    }

    #[test]
    fn metadata_comes_first_and_sorted() {
        let mut r = StudyReport::new(["a"]);
        r.set_meta("z", 1);
        r.set_meta("b", "two");
        assert_eq!(r.to_csv_string(), "# b=two\n# z=1\na\n");
    }

    #[test]
    fn non_finite_values_are_flagged_and_survive() {
        let mut r = StudyReport::new(["a", "b", "c"]);
        r.push_row(vec![f64::NAN, f64::INFINITY, f64::NEG_INFINITY])
            .unwrap();
        let back = StudyReport::parse_csv(&r.to_csv_string()).unwrap();
        assert!(back.rows()[0][0].is_nan());
        assert_eq!(back.rows()[0][1], f64::INFINITY);
        assert_eq!(back.rows()[0][2], f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bitwise(
            rows in proptest::collection::vec(proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 0..20),
        ) {
            let mut r = StudyReport::new(["a", "b", "c"]);
            r.set_meta("scheme", "split");
            for row in rows {
                r.push_row(row).unwrap();
            }
            let back = StudyReport::parse_csv(&r.to_csv_string()).unwrap();
            prop_assert_eq!(back.labels(), r.labels());
            prop_assert_eq!(back.metadata(), r.metadata());
            for (x, y) in back.rows().iter().flatten().zip(r.rows().iter().flatten()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
