//! CSV signal files: one sample per row, `re` or `re,im`, `#` comments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ccpt::Complex64;

use crate::CliError;

pub struct Signal {
    pub samples: Vec<Complex64>,
    pub real: bool,
}

pub fn read_signal(path: &Path) -> Result<Signal, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut samples = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w || !(1..=2).contains(&w) {
            return Err(CliError::Io(format!(
                "{}:{line}: expected {} column(s), found {}",
                path.display(),
                if (1..=2).contains(&w) { w } else { 2 },
                record.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::Io(format!("{}:{line}: not a number: {s:?}", path.display()))
            })
        };
        let re = parse(&record[0])?;
        let im = if w == 2 { parse(&record[1])? } else { 0.0 };
        samples.push(Complex64::new(re, im));
    }
    if samples.is_empty() {
        return Err(CliError::Io(format!("{}: no samples", path.display())));
    }
    Ok(Signal {
        samples,
        real: width == Some(1),
    })
}

pub fn write_signal(path: &Path, samples: &[Complex64], real: bool, comment: &str) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let result = (|| {
        writeln!(out, "# {comment}")?;
        for v in samples {
            if real {
                writeln!(out, "{:.16e}", v.re)?;
            } else {
                writeln!(out, "{:.16e},{:.16e}", v.re, v.im)?;
            }
        }
        out.flush()
    })();
    result.map_err(|e| CliError::io(path, e))
}

/// Header plus rows, every field already formatted.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let fail = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
