//! CSV ingestion and table emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use taildep::BivariateSample;

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .with_context(|| format!("{}: no column named {name:?}", path.display()))
}

fn parse_field(rec: &csv::StringRecord, idx: usize, line: u64, path: &Path) -> Result<f64> {
    let raw = rec
        .get(idx)
        .with_context(|| format!("{}:{line}: missing field {}", path.display(), idx + 1))?;
    let v: f64 = raw
        .parse()
        .with_context(|| format!("{}:{line}: {raw:?} is not a number", path.display()))?;
    if !v.is_finite() {
        bail!("{}:{line}: non-finite value {raw:?}", path.display());
    }
    Ok(v)
}

/// Raw `(x, y)` pairs from two columns, by name or the first two.
pub fn read_pairs(path: &Path, cols: Option<&(String, String)>) -> Result<Vec<(f64, f64)>> {
    let mut rdr = open_reader(path)?;
    let headers = rdr.headers().with_context(|| format!("reading header of {}", path.display()))?;
    let (ix, iy) = match cols {
        Some((x, y)) => (column_index(headers, x, path)?, column_index(headers, y, path)?),
        None if headers.len() >= 2 => (0, 1),
        None => bail!("{}: need at least two columns", path.display()),
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("parsing {}", path.display()))?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((parse_field(&rec, ix, line, path)?, parse_field(&rec, iy, line, path)?));
    }
    if out.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(out)
}

/// Read a sample, optionally taking absolute values first.
pub fn read_sample(
    path: &Path,
    cols: Option<&(String, String)>,
    abs: bool,
) -> Result<BivariateSample> {
    let mut pairs = read_pairs(path, cols)?;
    if abs {
        for p in &mut pairs {
            *p = (p.0.abs(), p.1.abs());
        }
    }
    BivariateSample::from_pairs(pairs).with_context(|| {
        format!("{}: values must be nonnegative (try --abs)", path.display())
    })
}

/// One numeric column, by name or the last one.
pub fn read_column(path: &Path, name: Option<&str>) -> Result<Vec<f64>> {
    let mut rdr = open_reader(path)?;
    let headers = rdr.headers().with_context(|| format!("reading header of {}", path.display()))?;
    let idx = match name {
        Some(n) => column_index(headers, n, path)?,
        None if !headers.is_empty() => headers.len() - 1,
        None => bail!("{}: empty header", path.display()),
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("parsing {}", path.display()))?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push(parse_field(&rec, idx, line, path)?);
    }
    Ok(out)
}

/// Destination for one or more output tables.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<&Path>) -> Self {
        Self { path: path.map(Path::to_path_buf) }
    }

    fn open(&self, suffix: Option<&str>) -> Result<Box<dyn Write>> {
        match &self.path {
            None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
            Some(p) => {
                let p = match suffix {
                    Some(s) => companion(p, s),
                    None => p.clone(),
                };
                let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                Ok(Box::new(BufWriter::new(f)))
            }
        }
    }

    /// Write the primary table followed by companion tables. On stdout the
    /// tables are separated by a blank line; with a file path each companion
    /// goes to `<stem>.<suffix>.csv`.
    pub fn write_csv_tables(&self, tables: &[(Option<&str>, Table)]) -> Result<()> {
        for (i, (suffix, table)) in tables.iter().enumerate() {
            let mut w = self.open(*suffix)?;
            if self.path.is_none() && i > 0 {
                writeln!(w)?;
            }
            table.write(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut w = self.open(None)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// A header and rows of already formatted fields.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    fn write(&self, w: &mut dyn Write) -> Result<()> {
        let mut cw = csv::Writer::from_writer(w);
        cw.write_record(&self.header)?;
        for r in &self.rows {
            cw.write_record(r)?;
        }
        cw.flush()?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_names() {
        assert_eq!(companion(Path::new("/tmp/out.csv"), "acf"), PathBuf::from("/tmp/out.acf.csv"));
        assert_eq!(companion(Path::new("out"), "hist"), PathBuf::from("out.hist.csv"));
    }

    #[test]
    fn formatted_numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
