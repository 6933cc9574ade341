use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use super::CliError;

/// Twelve significant digits in scientific notation.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>, missing: &str) -> String {
    x.map_or_else(|| missing.to_string(), num)
}

/// CSV text; `#` metadata lines go ahead of the header whenever they are added.
#[derive(Debug, Default)]
pub struct Csv {
    meta: String,
    header: String,
    rows: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv { header: header.to_string(), ..Csv::default() }
    }

    pub fn meta(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.meta, "# {}", line.as_ref());
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.rows, "{}", fields.join(","));
    }

    pub fn finish(self) -> String {
        format!("{}{}\n{}", self.meta, self.header, self.rows)
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(0.5), "5.00000000000e-1");
        assert_eq!(num(std::f64::consts::PI / 3.0), "1.04719755120e0");
    }

    #[test]
    fn meta_before_header() {
        let mut csv = Csv::new("a,b");
        csv.row(&["1".into(), "2".into()]);
        csv.meta("seed=3");
        assert_eq!(csv.finish(), "# seed=3\na,b\n1,2\n");
    }
}
