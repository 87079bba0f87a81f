//! Field snapshots: one line of UTF-8 JSON `{"n":…,"L":…,"name":…,"t":…}`
//! followed by `n²` little-endian `f64` values in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Grid, ScalarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub name: String,
    pub t: f64,
}

pub fn write_snapshot<W: Write>(mut out: W, field: &ScalarField, name: &str, t: f64) -> Result<()> {
    let grid = field.grid();
    let header = SnapshotHeader {
        n: grid.n(),
        length: grid.length(),
        name: name.to_owned(),
        t,
    };
    let mut buf = serde_json::to_vec(&header)?;
    buf.push(b'\n');
    buf.reserve(8 * grid.len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
        .map_err(|e| Error::io("<snapshot stream>", e))
}

pub fn read_snapshot<R: Read>(input: R) -> Result<(SnapshotHeader, ScalarField)> {
    let mut reader = BufReader::new(input);
    let mut line = Vec::new();
    reader
        .read_until(b'\n', &mut line)
        .map_err(|e| Error::io("<snapshot stream>", e))?;
    if line.last() != Some(&b'\n') {
        return Err(Error::Snapshot("missing header terminator".into()));
    }
    line.pop();
    let header: SnapshotHeader =
        serde_json::from_slice(&line).map_err(|e| Error::Snapshot(format!("bad header: {e}")))?;
    let grid = Grid::new(header.n, header.length)?;
    let mut raw = Vec::with_capacity(8 * grid.len());
    reader
        .read_to_end(&mut raw)
        .map_err(|e| Error::io("<snapshot stream>", e))?;
    if raw.len() != 8 * grid.len() {
        return Err(Error::Snapshot(format!(
            "expected {} payload bytes, found {}",
            8 * grid.len(),
            raw.len()
        )));
    }
    let values = raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    let field = ScalarField::new(grid, values)?;
    Ok((header, field))
}

pub fn save_snapshot(path: &Path, field: &ScalarField, name: &str, t: f64) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_snapshot(&mut out, field, name, t)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<(SnapshotHeader, ScalarField)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_snapshot(file)
}
