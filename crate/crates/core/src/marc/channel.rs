use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::{build_source_frame, Interleaver};
use super::relay::relay_network_encode;
use super::{FrameConfig, LlrMatrix, RelayMode};
use crate::error::{Error, Result};
use crate::llr::hard_decisions;
use crate::phy::{
    alamouti_receive, alamouti_soft_decode, complex_gaussian, llr_demod, rayleigh_block_fading, trial_rng,
    FadingDraw, Link, NoiseConfig,
};
use crate::rs::{bits_to_symbols, symbols_to_bits};

/// Link budget of one simulated round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Eb/N0 on the user → destination links, under the cooperative-rate convention.
    pub eb_n0_db: f64,
    /// SNR advantage of the relay → destination link.
    pub relay_offset_db: f64,
    /// SNR advantage of the user → relay links (decode-and-forward only).
    pub source_relay_offset_db: f64,
    /// Rayleigh block fading on the user → relay links.
    pub source_relay_fading: bool,
    /// Rayleigh block fading on the links into the destination
    /// (false: unit gains, AWGN only).
    pub fading: bool,
    /// Fixed noise variance on every link, overriding `eb_n0_db`.
    pub n0_override: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            eb_n0_db: 7.0,
            relay_offset_db: 0.0,
            source_relay_offset_db: 10.0,
            source_relay_fading: false,
            fading: true,
            n0_override: None,
        }
    }
}

impl ChannelConfig {
    pub fn at(eb_n0_db: f64) -> Self {
        ChannelConfig { eb_n0_db, ..ChannelConfig::default() }
    }

    /// Near-noiseless links (`N0 = 1e-6`).
    pub fn noiseless() -> Self {
        ChannelConfig { n0_override: Some(1e-6), ..ChannelConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.eb_n0_db, self.relay_offset_db, self.source_relay_offset_db].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("SNR values must be finite".into()));
        }
        if let Some(n0) = self.n0_override {
            NoiseConfig::new(n0)?;
        }
        Ok(())
    }

    /// Noise on the user → destination links.
    pub fn direct_noise(&self, cfg: &FrameConfig) -> NoiseConfig {
        match self.n0_override {
            Some(n0) => NoiseConfig { n0 },
            None => NoiseConfig { n0: cfg.rates().n0(self.eb_n0_db) },
        }
    }

    /// Noise on the relay → destination link.
    pub fn relay_noise(&self, cfg: &FrameConfig) -> NoiseConfig {
        match self.n0_override {
            Some(n0) => NoiseConfig { n0 },
            None => self.direct_noise(cfg).offset(self.relay_offset_db),
        }
    }

    /// Noise on the user → relay links.
    pub fn source_relay_noise(&self, cfg: &FrameConfig) -> NoiseConfig {
        match self.n0_override {
            Some(n0) => NoiseConfig { n0 },
            None => self.direct_noise(cfg).offset(self.source_relay_offset_db),
        }
    }
}

/// What was actually sent in one round.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    /// Information bits of each user.
    pub messages: [Vec<u8>; 2],
    /// Interleaved packet rows of each user.
    pub frames: [Vec<Vec<u8>>; 2],
    /// Parity rows transmitted by the relay.
    pub parity: Vec<Vec<u8>>,
}

/// Destination observations of one round together with the ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedRound {
    pub llr: LlrMatrix,
    pub truth: GroundTruth,
    /// Codewords the relay failed to decode (decode-and-forward only).
    pub relay_failures: usize,
}

/// Randomness shared by the proposed scheme and the XOR baseline.
pub(crate) struct SourcePhase {
    pub messages: [Vec<u8>; 2],
    pub frames: [Vec<Vec<u8>>; 2],
    /// Frames as reconstructed by the relay.
    pub relay_frames: [Vec<Vec<u8>>; 2],
    pub relay_failures: usize,
    /// Alamouti soft outputs at the destination, one LLR row per packet row.
    pub direct: [Vec<Vec<f64>>; 2],
    pub fading: FadingDraw,
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

#[inline]
fn bpsk(bit: u8) -> Complex64 {
    Complex64::new(if bit == 0 { 1.0 } else { -1.0 }, 0.0)
}

/// Broadcast phase at the relay, Alamouti phase at the destination.
pub(crate) fn source_phase(
    cfg: &FrameConfig,
    ch: &ChannelConfig,
    relay_rows: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SourcePhase> {
    cfg.validate()?;
    ch.validate()?;
    let width = cfg.row_bits();
    let messages = [random_bits(rng, cfg.message_bits(0)), random_bits(rng, cfg.message_bits(1))];
    let frames = [build_source_frame(cfg, 0, &messages[0])?, build_source_frame(cfg, 1, &messages[1])?];

    let fading_rows = cfg.l1.max(cfg.l2).max(relay_rows);
    let fading = if ch.fading {
        rayleigh_block_fading(fading_rows, Link::ALL.len(), rng)
    } else {
        FadingDraw::unit(fading_rows, Link::ALL.len())
    };

    let relay_n0 = ch.source_relay_noise(cfg).n0;
    let mut relay_failures = 0;
    let relay_frames = match cfg.relay_mode {
        RelayMode::Ideal => frames.clone(),
        RelayMode::DecodeAndForward => {
            let mut out: [Vec<Vec<u8>>; 2] = [Vec::new(), Vec::new()];
            for s in 0..2 {
                let link = [Link::Mu1Rn, Link::Mu2Rn][s].index();
                let mut heard = Vec::with_capacity(cfg.rows_of(s) * width);
                for (r, row) in frames[s].iter().enumerate() {
                    let h = if ch.source_relay_fading { fading.get(r, link) } else { Complex64::new(1.0, 0.0) };
                    for &b in row {
                        let y = h * bpsk(b) + complex_gaussian(rng, relay_n0);
                        heard.push(llr_demod(y, h, relay_n0));
                    }
                }
                let (rows, failures) = relay_reconstruct(cfg, s, &heard)?;
                relay_failures += failures;
                out[s] = rows;
            }
            out
        }
    };

    let n0 = ch.direct_noise(cfg).n0;
    let pairs = cfg.l1.max(cfg.l2);
    let mut direct: [Vec<Vec<f64>>; 2] = [vec![Vec::new(); cfg.l1], vec![Vec::new(); cfg.l2]];
    for r in 0..pairs {
        let h1 = fading.get(r, Link::Mu1Bs.index());
        let h2 = fading.get(r, Link::Mu2Bs.index());
        let row1 = frames[0].get(r);
        let row2 = frames[1].get(r);
        let mut l1 = Vec::with_capacity(width);
        let mut l2 = Vec::with_capacity(width);
        for j in 0..width {
            // A user without a row in this slot stays silent.
            let s1 = row1.map_or(Complex64::new(0.0, 0.0), |row| bpsk(row[j]));
            let s2 = row2.map_or(Complex64::new(0.0, 0.0), |row| bpsk(row[j]));
            let n1 = complex_gaussian(rng, n0);
            let n2 = complex_gaussian(rng, n0);
            let (y1, y2) = alamouti_receive(s1, s2, h1, h2, n1, n2);
            let (g1, g2) = alamouti_soft_decode(y1, y2, h1, h2, n0);
            l1.push(g1);
            l2.push(g2);
        }
        if r < cfg.l1 {
            direct[0][r] = l1;
        }
        if r < cfg.l2 {
            direct[1][r] = l2;
        }
    }

    Ok(SourcePhase { messages, frames, relay_frames, relay_failures, direct, fading })
}

/// Hard BM decoding of one user's frame at the relay; undecodable codewords
/// are forwarded as raw hard decisions.
fn relay_reconstruct(cfg: &FrameConfig, source: usize, heard: &[f64]) -> Result<(Vec<Vec<u8>>, usize)> {
    let il = Interleaver::for_source(cfg, source);
    let coded = il.deinterleave(&hard_decisions(heard));
    let m = cfg.rs.m();
    let mut failures = 0;
    let mut repaired = Vec::with_capacity(coded.len());
    for cw in coded.chunks(cfg.row_bits()) {
        match cfg.rs.bm_decode(&bits_to_symbols(cw, m)) {
            Ok(d) => repaired.extend(symbols_to_bits(&d.codeword, m)),
            Err(_) => {
                failures += 1;
                repaired.extend_from_slice(cw);
            }
        }
    }
    let rows = il.interleave(&repaired).chunks(cfg.row_bits()).map(<[u8]>::to_vec).collect();
    Ok((rows, failures))
}

/// Relay transmissions over the relay → destination link.
pub(crate) fn relay_phase(
    ch: &ChannelConfig,
    cfg: &FrameConfig,
    rows: &[Vec<u8>],
    fading: &FadingDraw,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let n0 = ch.relay_noise(cfg).n0;
    rows.iter()
        .enumerate()
        .map(|(q, row)| {
            let h = fading.get(q, Link::RnBs.index());
            row.iter()
                .map(|&b| {
                    let y = h * bpsk(b) + complex_gaussian(rng, n0);
                    llr_demod(y, h, n0)
                })
                .collect()
        })
        .collect()
}

/// One round of the cooperative protocol with trial stream `trial` of `master_seed`.
pub fn simulate_round(cfg: &FrameConfig, ch: &ChannelConfig, master_seed: u64, trial: u64) -> Result<SimulatedRound> {
    simulate_round_with(cfg, ch, &mut trial_rng(master_seed, trial))
}

/// [`simulate_round`] drawing from a caller-provided generator.
pub fn simulate_round_with(cfg: &FrameConfig, ch: &ChannelConfig, rng: &mut ChaCha8Rng) -> Result<SimulatedRound> {
    let src = source_phase(cfg, ch, cfg.parity_rows(), rng)?;
    let parity = relay_network_encode(cfg, [&src.relay_frames[0], &src.relay_frames[1]])?;
    let relay_llr = relay_phase(ch, cfg, &parity, &src.fading, rng);

    let mut llr = LlrMatrix::new(cfg.nn(), cfg.row_bits(), cfg.row_labels())?;
    for (slot, (s, r)) in cfg.row_order().into_iter().enumerate() {
        llr.row_mut(slot).copy_from_slice(&src.direct[s][r]);
    }
    for (q, row) in relay_llr.iter().enumerate() {
        llr.row_mut(cfg.source_rows() + q).copy_from_slice(row);
    }
    // In decode-and-forward mode the transmitted parity may disagree with the
    // users' true frames; the truth records what was actually sent.
    let truth = GroundTruth { messages: src.messages, frames: src.frames, parity };
    Ok(SimulatedRound { llr, truth, relay_failures: src.relay_failures })
}
