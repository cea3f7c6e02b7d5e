//! Shared inputs for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use stnc_core::llr::antipodal;
use stnc_core::{symbols_to_bits, FieldElement, RsCode};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_llrs(n: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// A random codeword's bits observed as BPSK in Gaussian noise with the given
/// LLR mean; roughly one bit in `e^{mean/2}` arrives with the wrong sign.
pub fn noisy_codeword(rs: &RsCode, mean: f64, rng: &mut impl Rng) -> Vec<f64> {
    let q = rs.field().size() as u16;
    let msg: Vec<FieldElement> = (0..rs.k()).map(|_| FieldElement(rng.random_range(0..q))).collect();
    let bits = symbols_to_bits(&rs.encode(&msg).expect("k symbols"), rs.m());
    let noise = Normal::new(0.0, (2.0 * mean).sqrt()).expect("positive mean");
    bits.iter().map(|&b| mean * antipodal(b) + noise.sample(rng)).collect()
}
