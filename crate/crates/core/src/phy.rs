//! BPSK, Alamouti space-time coding, Rayleigh block fading and soft demodulation.
//!
//! Signals are at unit symbol energy. Noise is circularly symmetric complex
//! Gaussian with variance `N0` (`N0/2` per real dimension), so the LLR of a
//! BPSK symbol seen through gain `h` is `4·Re(h*·y)/N0`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexSample = Complex64;

/// Per-trial random stream derived from a master seed.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Bit 0 ↦ +1, bit 1 ↦ −1.
pub fn bpsk_map(bits: &[u8]) -> Vec<ComplexSample> {
    bits.iter().map(|&b| Complex64::new(if b & 1 == 0 { 1.0 } else { -1.0 }, 0.0)).collect()
}

/// Single-path LLR, `(|y + h|² − |y − h|²) / N0`.
#[inline]
pub fn llr_demod(y: ComplexSample, h: Complex64, n0: f64) -> f64 {
    ((y + h).norm_sqr() - (y - h).norm_sqr()) / n0
}

/// Second-use transmissions `(−s2*, s1*)` of the two cooperating users.
#[inline]
pub fn alamouti_encode(s1: ComplexSample, s2: ComplexSample) -> (ComplexSample, ComplexSample) {
    (-s2.conj(), s1.conj())
}

/// Destination observations over the two channel uses of one Alamouti block.
///
/// First use: `y1 = h1·s1 + h2·s2 + n1`; second use: `y2 = h1·(−s2*) + h2·s1* + n2`.
/// Conjugating the second observation gives the matrix form
/// `[y1; y2*] = [[h1, h2], [h2*, −h1*]]·[s1; s2] + [n1; n2*]`.
#[inline]
pub fn alamouti_receive(
    s1: ComplexSample,
    s2: ComplexSample,
    h1: Complex64,
    h2: Complex64,
    n1: Complex64,
    n2: Complex64,
) -> (ComplexSample, ComplexSample) {
    let (t1, t2) = alamouti_encode(s1, s2);
    (h1 * s1 + h2 * s2 + n1, h1 * t1 + h2 * t2 + n2)
}

/// Matched-filter combining followed by BPSK LLRs for both symbols.
///
/// `s̃1 = h1*·y1 + h2·y2*`, `s̃2 = h2*·y1 − h1·y2*`; each carries gain
/// `|h1|² + |h2|²` and noise variance `(|h1|² + |h2|²)·N0`.
#[inline]
pub fn alamouti_soft_decode(
    y1: ComplexSample,
    y2: ComplexSample,
    h1: Complex64,
    h2: Complex64,
    n0: f64,
) -> (f64, f64) {
    let (c1, c2) = alamouti_combine(y1, y2, h1, h2);
    (4.0 * c1.re / n0, 4.0 * c2.re / n0)
}

/// The combined statistics `(s̃1, s̃2)`.
#[inline]
pub fn alamouti_combine(y1: ComplexSample, y2: ComplexSample, h1: Complex64, h2: Complex64) -> (Complex64, Complex64) {
    (h1.conj() * y1 + h2 * y2.conj(), h2.conj() * y1 - h1 * y2.conj())
}

/// Unit-power circularly symmetric complex Gaussian draw scaled to `variance`.
#[inline]
pub fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Adds complex AWGN of variance `n0` in place.
pub fn awgn(samples: &mut [ComplexSample], n0: f64, rng: &mut impl Rng) {
    for s in samples {
        *s += complex_gaussian(rng, n0);
    }
}

/// Physical links of the relay channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    Mu1Bs,
    Mu2Bs,
    RnBs,
    Mu1Rn,
    Mu2Rn,
}

impl Link {
    pub const ALL: [Link; 5] = [Link::Mu1Bs, Link::Mu2Bs, Link::RnBs, Link::Mu1Rn, Link::Mu2Rn];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Block-fading coefficients, one per (row, link), held for a whole packet.
#[derive(Clone, Debug, PartialEq)]
pub struct FadingDraw {
    rows: usize,
    links: usize,
    h: Vec<Complex64>,
}

impl FadingDraw {
    #[inline]
    pub fn get(&self, row: usize, link: usize) -> Complex64 {
        self.h[row * self.links + link]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.h
    }

    /// Unit gain on every link, for AWGN-only runs.
    pub fn unit(rows: usize, links: usize) -> Self {
        FadingDraw { rows, links, h: vec![Complex64::new(1.0, 0.0); rows * links] }
    }
}

/// Independent Rayleigh coefficients with `E|h|² = 1`.
pub fn rayleigh_block_fading(rows: usize, links: usize, rng: &mut impl Rng) -> FadingDraw {
    let h = (0..rows * links).map(|_| complex_gaussian(rng, 1.0)).collect();
    FadingDraw { rows, links, h }
}

/// Noise level for a target Eb/N0 at unit symbol energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    pub n0: f64,
}

impl NoiseConfig {
    pub fn new(n0: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidConfig(format!("N0 = {n0} must be positive")));
        }
        Ok(NoiseConfig { n0 })
    }

    /// `rate` is information bits per transmitted symbol, so `Es = rate·Eb`.
    pub fn from_eb_n0_db(eb_n0_db: f64, rate: f64) -> Self {
        NoiseConfig { n0: 1.0 / (rate * db_to_linear(eb_n0_db)) }
    }

    /// Noise on a link whose SNR is `offset_db` better than the reference.
    pub fn offset(&self, offset_db: f64) -> Self {
        NoiseConfig { n0: self.n0 / db_to_linear(offset_db) }
    }
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
