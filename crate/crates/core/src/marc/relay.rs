use super::FrameConfig;
use crate::error::{Error, Result};

/// Parity rows produced by the relay.
///
/// The source rows are stacked in [`FrameConfig::row_order`]; every column of
/// the stack is fed through the recursive systematic encoder and the parity
/// stream is punctured. Row `q` of the result holds the `q`-th surviving
/// parity bit of every column.
pub fn relay_network_encode(cfg: &FrameConfig, frames: [&[Vec<u8>]; 2]) -> Result<Vec<Vec<u8>>> {
    let width = cfg.row_bits();
    for (s, f) in frames.iter().enumerate() {
        if f.len() != cfg.rows_of(s) {
            return Err(Error::LengthMismatch { expected: cfg.rows_of(s), actual: f.len() });
        }
        if let Some(bad) = f.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch { expected: width, actual: bad.len() });
        }
    }
    let order = cfg.row_order();
    let mut parity_rows = vec![vec![0u8; width]; cfg.parity_rows()];
    let mut column = vec![0u8; order.len()];
    for j in 0..width {
        for (slot, &(s, r)) in order.iter().enumerate() {
            column[slot] = frames[s][r][j];
        }
        let kept = cfg.puncture.puncture(&cfg.conv.encode(&column));
        for (q, bit) in kept.into_iter().enumerate() {
            parity_rows[q][j] = bit;
        }
    }
    Ok(parity_rows)
}
