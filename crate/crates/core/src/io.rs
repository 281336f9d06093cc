//! Coreset CSV files: `id,weight,provenance,x0,...,x{d-1}`.
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a file
//! back gives bit-identical values. Lines starting with `#` are comments.

use std::io::{Read, Write};

use crate::coreset::{Provenance, WeightedCoreset};
use crate::error::{invalid, CoresetError, Result};
use crate::types::Dataset;

fn csv_err(row: usize, e: impl std::fmt::Display) -> CoresetError {
    CoresetError::Csv { row, message: e.to_string() }
}

/// Writes `coreset`, preceded by `comment` as a `#` line when given.
pub fn write_coreset_csv<W: Write>(mut writer: W, coreset: &WeightedCoreset, comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        writeln!(writer, "# {}", c.replace('\n', " "))?;
    }
    let mut w = csv::Writer::from_writer(writer);
    let d = coreset.points.dim();
    let mut header = vec!["id".to_string(), "weight".to_string(), "provenance".to_string()];
    header.extend((0..d).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(|e| csv_err(0, e))?;
    for (row, p) in coreset.points.points().enumerate() {
        let mut rec = vec![
            coreset.points.id(row).to_string(),
            coreset.points.weight(row).to_string(),
            coreset.provenance[row].as_str().to_string(),
        ];
        rec.extend(p.iter().map(f64::to_string));
        w.write_record(&rec).map_err(|e| csv_err(row + 1, e))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a coreset file. Source rows are not stored, so they are set to the ids.
pub fn read_coreset_csv<R: Read>(reader: R) -> Result<WeightedCoreset> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_err(0, e))?.clone();
    if header.len() < 4 || &header[0] != "id" || &header[1] != "weight" || &header[2] != "provenance" {
        return Err(invalid("coreset header must start with id,weight,provenance and have coordinates"));
    }
    let dim = header.len() - 3;
    let (mut coords, mut weights, mut ids, mut provenance) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(row, e))?;
        ids.push(rec[0].parse::<u64>().map_err(|e| csv_err(row, e))?);
        weights.push(rec[1].parse::<f64>().map_err(|e| csv_err(row, e))?);
        provenance.push(Provenance::parse(&rec[2]).ok_or_else(|| csv_err(row, "unknown provenance"))?);
        for j in 0..dim {
            coords.push(rec[3 + j].parse::<f64>().map_err(|e| csv_err(row, e))?);
        }
    }
    let source_rows = ids.iter().map(|&i| i as usize).collect();
    let points = Dataset::new(dim, coords, weights, ids)?;
    Ok(WeightedCoreset { points, provenance, source_rows })
}
