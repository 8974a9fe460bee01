//! Deterministic file output: fixed-format floats (15 significant
//! digits, lowercase scientific), LF line endings, byte-stable across
//! reruns.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.14e}")
}

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let columns = header.split(',').count();
        let mut buf = String::new();
        let _ = writeln!(buf, "{header}");
        Self { buf, columns }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&fmt_f64(*v));
            first = false;
        }
        self.buf.push('\n');
    }

    /// Row with a leading integer column (run indices, seeds).
    pub fn row_mixed(&mut self, ints: &[u64], values: &[f64]) {
        assert_eq!(
            ints.len() + values.len(),
            self.columns,
            "row width mismatch"
        );
        let mut parts: Vec<String> = ints.iter().map(|i| i.to_string()).collect();
        parts.extend(values.iter().map(|v| fmt_f64(*v)));
        self.buf.push_str(&parts.join(","));
        self.buf.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.buf.as_bytes())
    }
}

/// `key: value` summary lines, in the order given.
pub fn write_summary(path: &Path, entries: &[(&str, f64)]) -> io::Result<()> {
    let mut buf = String::new();
    for (k, v) in entries {
        let _ = writeln!(buf, "{k}: {}", fmt_f64(*v));
    }
    fs::write(path, buf.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_precise_and_lowercase() {
        let s = fmt_f64(0.9987312345678901);
        assert!(s.contains('e') && !s.contains('E'));
        let back: f64 = s.parse().unwrap();
        assert!((back - 0.9987312345678901).abs() < 1e-15);
        assert_eq!(fmt_f64(0.0), "0");
    }

    #[test]
    fn csv_shape_checked() {
        let mut c = Csv::new("a,b");
        c.row(&[1.0, 2.0]);
        c.row_mixed(&[3], &[4.0]);
        assert_eq!(c.buf.lines().count(), 3);
    }
}
