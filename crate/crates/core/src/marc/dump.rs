//! Little-endian debug dumps of frame matrices.
//!
//! Layout: 8-byte magic, `u32` rows, `u32` cols, one label byte per row
//! (0 = MU1, 1 = MU2, 2 = relay parity), then `rows·cols` values row-major.
//! LLR dumps (`STNCLLR1`) store `f64` values; bit dumps (`STNCBIT1`) store one
//! byte per bit. The format is for inspection and may change.

use std::io::{Read, Write};

use super::{LlrMatrix, RowKind};
use crate::error::{Error, Result};

pub const LLR_MAGIC: &[u8; 8] = b"STNCLLR1";
pub const BIT_MAGIC: &[u8; 8] = b"STNCBIT1";

fn io_err(e: std::io::Error) -> Error {
    Error::MalformedDump(e.to_string())
}

fn write_header(w: &mut impl Write, magic: &[u8; 8], rows: usize, cols: usize, labels: &[RowKind]) -> Result<()> {
    let dim = |v: usize| u32::try_from(v).map_err(|_| Error::MalformedDump(format!("dimension {v} too large")));
    w.write_all(magic).map_err(io_err)?;
    w.write_all(&dim(rows)?.to_le_bytes()).map_err(io_err)?;
    w.write_all(&dim(cols)?.to_le_bytes()).map_err(io_err)?;
    let codes: Vec<u8> = labels.iter().map(|l| l.code()).collect();
    w.write_all(&codes).map_err(io_err)
}

fn read_header(r: &mut impl Read, magic: &[u8; 8]) -> Result<(usize, usize, Vec<RowKind>)> {
    let mut m = [0u8; 8];
    r.read_exact(&mut m).map_err(io_err)?;
    if &m != magic {
        return Err(Error::MalformedDump("bad magic".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word).map_err(io_err)?;
    let rows = u32::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(io_err)?;
    let cols = u32::from_le_bytes(word) as usize;
    let mut codes = vec![0u8; rows];
    r.read_exact(&mut codes).map_err(io_err)?;
    let labels = codes
        .into_iter()
        .map(|c| RowKind::from_code(c).ok_or_else(|| Error::MalformedDump(format!("unknown row label {c}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, cols, labels))
}

pub fn write_llr(w: &mut impl Write, m: &LlrMatrix) -> Result<()> {
    write_header(w, LLR_MAGIC, m.rows(), m.cols(), m.labels())?;
    for v in m.data() {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_llr(r: &mut impl Read) -> Result<LlrMatrix> {
    let (rows, cols, labels) = read_header(r, LLR_MAGIC)?;
    let mut bytes = vec![0u8; rows * cols * 8];
    r.read_exact(&mut bytes).map_err(io_err)?;
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    LlrMatrix::from_data(rows, cols, data, labels)
}

pub fn write_bits(w: &mut impl Write, rows: &[Vec<u8>], labels: &[RowKind]) -> Result<()> {
    if labels.len() != rows.len() {
        return Err(Error::LengthMismatch { expected: rows.len(), actual: labels.len() });
    }
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::LengthMismatch { expected: cols, actual: bad.len() });
    }
    write_header(w, BIT_MAGIC, rows.len(), cols, labels)?;
    for row in rows {
        w.write_all(row).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_bits(r: &mut impl Read) -> Result<(Vec<Vec<u8>>, Vec<RowKind>)> {
    let (rows, cols, labels) = read_header(r, BIT_MAGIC)?;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = vec![0u8; cols];
        r.read_exact(&mut row).map_err(io_err)?;
        if row.iter().any(|&b| b > 1) {
            return Err(Error::MalformedDump("bit value above 1".into()));
        }
        out.push(row);
    }
    Ok((out, labels))
}
