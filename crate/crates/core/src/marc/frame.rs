use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FrameConfig;
use crate::error::{Error, Result};
use crate::rs::{bits_to_symbols, symbols_to_bits};

/// Seeded bit permutation; `out[q] = in[perm[q]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn new(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Interleaver { perm }
    }

    /// Interleaver of source `source` for the given frame geometry.
    pub fn for_source(cfg: &FrameConfig, source: usize) -> Self {
        Interleaver::new(cfg.rows_of(source) * cfg.row_bits(), cfg.interleaver_seeds[source])
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.perm.len());
        self.perm.iter().map(|&p| input[p]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.perm.len());
        let mut out = vec![T::default(); input.len()];
        for (q, &p) in self.perm.iter().enumerate() {
            out[p] = input[q];
        }
        out
    }
}

/// RS-encodes a user's message bits and returns the concatenated codeword bits
/// (codeword domain, before interleaving).
pub(crate) fn encode_codewords(cfg: &FrameConfig, source: usize, message: &[u8]) -> Result<Vec<u8>> {
    let expected = cfg.message_bits(source);
    if message.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: message.len() });
    }
    let m = cfg.rs.m();
    let mut out = Vec::with_capacity(cfg.rows_of(source) * cfg.row_bits());
    for chunk in message.chunks(cfg.rs.message_bits()) {
        let cw = cfg.rs.encode(&bits_to_symbols(chunk, m))?;
        out.extend(symbols_to_bits(&cw, m));
    }
    Ok(out)
}

/// Packet rows (`L_i` × `N·m`) sent by user `source` for the given message bits.
pub fn build_source_frame(cfg: &FrameConfig, source: usize, message: &[u8]) -> Result<Vec<Vec<u8>>> {
    let coded = encode_codewords(cfg, source, message)?;
    let packets = Interleaver::for_source(cfg, source).interleave(&coded);
    Ok(packets.chunks(cfg.row_bits()).map(<[u8]>::to_vec).collect())
}
