use super::channel::{relay_phase, source_phase};
use super::frame::Interleaver;
use super::{ChannelConfig, DecodeReport, FrameConfig};
use crate::error::{Error, Result};
use crate::llr::{boxplus, hard_decisions};
use crate::phy::trial_rng;
use crate::rs::{bits_to_symbols, symbols_to_bits};

/// LLR of a bit observed directly and through `partner ⊕ bit` via the relay.
#[inline]
pub fn xor_combine(direct: f64, partner: f64, relay: f64) -> f64 {
    direct + boxplus(partner, relay)
}

/// One round of the XOR network-coding baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct XorRound {
    pub report: DecodeReport,
    pub messages: [Vec<u8>; 2],
    pub relay_failures: usize,
}

/// Same users and Alamouti phase as the proposed scheme; the relay sends the
/// XOR of paired rows and the destination hard-decodes each codeword once.
pub fn xor_baseline(cfg: &FrameConfig, ch: &ChannelConfig, master_seed: u64, trial: u64) -> Result<XorRound> {
    if cfg.l1 != cfg.l2 {
        return Err(Error::InvalidConfig("XOR baseline needs l1 == l2".into()));
    }
    let rng = &mut trial_rng(master_seed, trial);
    let src = source_phase(cfg, ch, cfg.l1, rng)?;
    let xored: Vec<Vec<u8>> = src.relay_frames[0]
        .iter()
        .zip(&src.relay_frames[1])
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x ^ y).collect())
        .collect();
    let relay = relay_phase(ch, cfg, &xored, &src.fading, rng);

    let m = cfg.rs.m();
    let k_bits = cfg.rs.message_bits();
    let mut decisions: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
    let mut flags: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
    for s in 0..2 {
        let partner = 1 - s;
        let aided: Vec<f64> = (0..cfg.l1)
            .flat_map(|r| {
                let d = &src.direct[s][r];
                let p = &src.direct[partner][r];
                let q = &relay[r];
                (0..d.len()).map(move |j| xor_combine(d[j], p[j], q[j]))
            })
            .collect();
        let coded = Interleaver::for_source(cfg, s).deinterleave(&hard_decisions(&aided));
        for cw in coded.chunks(cfg.row_bits()) {
            match cfg.rs.bm_decode(&bits_to_symbols(cw, m)) {
                Ok(d) => {
                    decisions[s].extend_from_slice(&symbols_to_bits(&d.codeword, m)[..k_bits]);
                    flags[s].push(true);
                }
                Err(_) => {
                    decisions[s].extend_from_slice(&cw[..k_bits]);
                    flags[s].push(false);
                }
            }
        }
    }
    Ok(XorRound {
        report: DecodeReport { iterations_used: 1, max_iterations: 1, decisions: vec![decisions], codeword_decoded: flags },
        messages: src.messages,
        relay_failures: src.relay_failures,
    })
}
