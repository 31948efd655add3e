use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// Columns read from an input file.
pub enum SeriesInput {
    /// `x` and `y` columns.
    Series { x: Vec<f64>, y: Vec<f64> },
    /// `x1..xk` and `y1..yk` columns, one vector pair per row.
    Vectors { x: Vec<Vec<f64>>, y: Vec<Vec<f64>> },
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn vector_columns(headers: &csv::StringRecord, prefix: &str) -> Vec<usize> {
    (1..)
        .map_while(|k| column(headers, &format!("{prefix}{k}")))
        .collect()
}

fn parse_cell(record: &csv::StringRecord, idx: usize, name: &str) -> Result<f64, CliError> {
    let line = record.position().map_or(0, |p| p.line());
    let cell = record
        .get(idx)
        .ok_or_else(|| CliError::Input(format!("line {line}: missing column `{name}`")))?;
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Input(format!(
            "line {line}: column `{name}`: `{cell}` is not a finite number"
        ))),
    }
}

/// Reads a CSV with a header row. Columns `x` and `y` give a series pair;
/// otherwise `x1.., y1..` give vector pairs. Other columns are ignored.
pub fn read_input(path: &Path) -> Result<SeriesInput, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    let records = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let (Some(ix), Some(iy)) = (column(&headers, "x"), column(&headers, "y")) {
        let mut x = Vec::with_capacity(records.len());
        let mut y = Vec::with_capacity(records.len());
        for r in &records {
            x.push(parse_cell(r, ix, "x")?);
            y.push(parse_cell(r, iy, "y")?);
        }
        return Ok(SeriesInput::Series { x, y });
    }
    let (cx, cy) = (vector_columns(&headers, "x"), vector_columns(&headers, "y"));
    if cx.is_empty() || cx.len() != cy.len() {
        return Err(CliError::Input(format!(
            "{}: header needs columns `x,y` or matching `x1..xk,y1..yk`",
            path.display()
        )));
    }
    let read = |r: &csv::StringRecord, cols: &[usize], prefix: &str| {
        cols.iter()
            .enumerate()
            .map(|(k, &i)| parse_cell(r, i, &format!("{prefix}{}", k + 1)))
            .collect::<Result<Vec<f64>, CliError>>()
    };
    let mut x = Vec::with_capacity(records.len());
    let mut y = Vec::with_capacity(records.len());
    for r in &records {
        x.push(read(r, &cx, "x")?);
        y.push(read(r, &cy, "y")?);
    }
    Ok(SeriesInput::Vectors { x, y })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Writes rows under `header`; values use the shortest round-trip form.
pub fn write_rows<'a>(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>> + 'a) -> Result<(), CliError> {
    let mut w = create(path)?;
    let emit = || -> std::io::Result<()> {
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    };
    emit().map_err(|e| write_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| write_err(path, e))
}
