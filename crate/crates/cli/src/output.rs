use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

/// One titled block of rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: Option<&str>, headers: &[&str]) -> Self {
        Self {
            title: title.map(str::to_owned),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Everything a command prints: `# key=value` header lines, tables for csv
/// and plain output, and a JSON document for json output.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub json: Value,
}

impl Report {
    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_owned(), value.to_string()));
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(CliError::input)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
            Format::Plain => Ok(self.render_plain()),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if let Some(title) = &t.title {
                let _ = writeln!(out, "# {title}");
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.headers).map_err(CliError::input)?;
            for row in &t.rows {
                w.write_record(row).map_err(CliError::input)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
        }
        Ok(out)
    }

    fn render_plain(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        for t in &self.tables {
            out.push('\n');
            if let Some(title) = &t.title {
                let _ = writeln!(out, "{title}");
            }
            let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
            for row in &t.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let mut s = String::new();
                for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
                    if i > 0 {
                        s.push_str("  ");
                    }
                    let _ = write!(s, "{c:<w$}");
                }
                s.trim_end().to_owned()
            };
            let _ = writeln!(out, "{}", line(&t.headers));
            for row in &t.rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        out
    }
}

/// Shortest round-trip form; exponent notation for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::input)?;
    s.push('\n');
    emit(&s, Some(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::default();
        r.meta("seed", 3);
        let mut t = Table::new(Some("atoms"), &["m", "tau"]);
        t.push(vec!["0".into(), "1.5".into()]);
        t.push(vec!["1".into(), "-0.25".into()]);
        r.tables.push(t);
        r
    }

    #[test]
    fn csv_has_header_lines_and_rows() {
        let s = sample().render(Format::Csv).unwrap();
        assert_eq!(s, "# seed=3\n# atoms\nm,tau\n0,1.5\n1,-0.25\n");
    }

    #[test]
    fn plain_aligns_columns() {
        let s = sample().render(Format::Plain).unwrap();
        assert!(s.contains("m  tau\n0  1.5\n1  -0.25\n"), "{s}");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1f64 + 0.2, 3.979e-11, -2.5e-300, 7e20, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(3.5e-11), "3.5e-11");
    }
}
