//! Soft-in soft-out Reed-Solomon decoding by adaptive belief propagation.
//!
//! Each round re-triangularizes the binary parity-check matrix so that the
//! least reliable bits each sit in exactly one check, runs one sum-product
//! pass on the adapted graph and adds the damped extrinsic to the running LLR.
//! After the rounds, hard decisions are checked against the parity matrix and,
//! failing that, handed to Berlekamp-Massey.

use serde::{Deserialize, Serialize};

use crate::bitmat::BitMatrix;
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::llr::{clip, hard_decisions, DEFAULT_LLR_CLIP};
use crate::rs::{bits_to_symbols, BinaryParityCheck, RsCode};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbpConfig {
    /// Adapt + sum-product rounds per invocation.
    pub inner_iterations: usize,
    /// Scale applied to each round's extrinsic, in (0, 1].
    pub damping: f64,
    pub llr_clip: f64,
}

impl AbpConfig {
    /// Settings used inside the joint network-channel loop.
    pub fn joint() -> Self {
        AbpConfig { inner_iterations: 5, damping: 0.1, llr_clip: DEFAULT_LLR_CLIP }
    }

    /// Settings for a standalone decoder fed straight from the channel.
    pub fn standalone() -> Self {
        AbpConfig { inner_iterations: 20, damping: 0.1, llr_clip: DEFAULT_LLR_CLIP }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner_iterations == 0 {
            return Err(Error::InvalidConfig("abp inner_iterations must be >= 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!("abp damping {} outside (0, 1]", self.damping)));
        }
        if !(self.llr_clip > 0.0 && self.llr_clip.is_finite()) {
            return Err(Error::InvalidConfig(format!("abp llr_clip {} must be positive", self.llr_clip)));
        }
        Ok(())
    }
}

impl Default for AbpConfig {
    fn default() -> Self {
        AbpConfig::joint()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbpResult {
    /// Accumulated damped extrinsic, one value per codeword bit.
    pub extrinsic: Vec<f64>,
    /// Decoded message symbols, when a codeword was found.
    pub decoded: Option<Vec<FieldElement>>,
    /// Full codeword behind `decoded`.
    pub codeword: Option<Vec<FieldElement>>,
    /// Whether the hard decisions on the updated LLR satisfied every check.
    pub parity_satisfied: bool,
    /// Rounds actually run.
    pub rounds: usize,
}

/// Row-reduces `h` so that unit columns land on the least reliable positions.
///
/// Columns are visited in increasing `|llr|` (ties by lower index); a column
/// that is dependent on the already-reduced ones is skipped. Returns the
/// adapted matrix and the pivot columns in selection order.
pub fn adapt_parity_matrix(h: &BitMatrix, llr: &[f64]) -> (BitMatrix, Vec<usize>) {
    assert_eq!(llr.len(), h.cols(), "llr length must match parity-check columns");
    let mut order: Vec<usize> = (0..llr.len()).collect();
    order.sort_by(|&a, &b| llr[a].abs().total_cmp(&llr[b].abs()).then(a.cmp(&b)));

    let mut m = h.clone();
    let mut pivots = Vec::with_capacity(h.rows());
    let mut next = 0;
    for &c in &order {
        if next == m.rows() {
            break;
        }
        let Some(p) = (next..m.rows()).find(|&r| m.get(r, c)) else {
            continue;
        };
        m.swap_rows(next, p);
        for r in 0..m.rows() {
            if r != next && m.get(r, c) {
                m.xor_row(r, next);
            }
        }
        pivots.push(c);
        next += 1;
    }
    (m, pivots)
}

/// One sum-product pass on the Tanner graph of `h`.
///
/// Variable-to-check messages are the input LLRs, so each output value is the
/// sum of check messages that exclude the variable's own input. Returns
/// `damping` times that sum.
pub fn spa_extrinsic(h: &BitMatrix, llr: &[f64], damping: f64, llr_clip: f64) -> Vec<f64> {
    assert_eq!(llr.len(), h.cols());
    let t: Vec<f64> = llr.iter().map(|&l| (clip(l, llr_clip) / 2.0).tanh()).collect();
    let mut ext = vec![0.0; llr.len()];
    let mut support = Vec::with_capacity(h.cols());
    let mut suffix = Vec::with_capacity(h.cols());
    for r in 0..h.rows() {
        support.clear();
        h.for_each_one(r, |c| support.push(c));
        if support.len() < 2 {
            continue;
        }
        suffix.clear();
        suffix.resize(support.len() + 1, 1.0);
        for i in (0..support.len()).rev() {
            suffix[i] = suffix[i + 1] * t[support[i]];
        }
        let mut prefix = 1.0;
        for (i, &c) in support.iter().enumerate() {
            let p = prefix * suffix[i + 1];
            ext[c] += clip(2.0 * p.atanh(), llr_clip);
            prefix *= t[c];
        }
    }
    for e in &mut ext {
        *e = clip(*e * damping, llr_clip);
    }
    ext
}

/// Adaptive belief propagation decoder for one RS code.
#[derive(Clone, Debug)]
pub struct AbpDecoder {
    code: RsCode,
    parity: BinaryParityCheck,
    cfg: AbpConfig,
}

impl AbpDecoder {
    pub fn new(code: RsCode, cfg: AbpConfig) -> Self {
        let parity = code.binary_parity_check();
        AbpDecoder { code, parity, cfg }
    }

    pub fn code(&self) -> &RsCode {
        &self.code
    }

    pub fn config(&self) -> &AbpConfig {
        &self.cfg
    }

    pub fn parity_check(&self) -> &BinaryParityCheck {
        &self.parity
    }

    /// Decodes one codeword from channel and a-priori LLRs.
    ///
    /// Stops early once the hard decisions satisfy the parity checks. The
    /// returned extrinsic never includes `channel_llr` or `prior_llr`.
    pub fn decode(&self, channel_llr: &[f64], prior_llr: &[f64]) -> AbpResult {
        let nbits = self.code.codeword_bits();
        assert_eq!(channel_llr.len(), nbits, "channel LLR length");
        assert_eq!(prior_llr.len(), nbits, "prior LLR length");
        let lim = self.cfg.llr_clip;
        let input: Vec<f64> = channel_llr.iter().zip(prior_llr).map(|(c, p)| clip(c + p, lim)).collect();
        let mut acc = vec![0.0; nbits];
        let mut updated = input.clone();
        let mut rounds = 0;
        let mut satisfied = false;
        for _ in 0..self.cfg.inner_iterations {
            rounds += 1;
            let (adapted, _) = adapt_parity_matrix(&self.parity.matrix, &updated);
            let ext = spa_extrinsic(&adapted, &updated, self.cfg.damping, lim);
            for i in 0..nbits {
                acc[i] = clip(acc[i] + ext[i], lim);
                updated[i] = clip(input[i] + acc[i], lim);
            }
            if self.parity.matrix.annihilates(&hard_decisions(&updated)) {
                satisfied = true;
                break;
            }
        }

        let symbols = bits_to_symbols(&hard_decisions(&updated), self.code.m());
        let codeword = if satisfied {
            Some(symbols)
        } else {
            self.code.bm_decode(&symbols).ok().map(|d| d.codeword)
        };
        AbpResult {
            extrinsic: acc,
            decoded: codeword.as_ref().map(|c| c[..self.code.k()].to_vec()),
            codeword,
            parity_satisfied: satisfied,
            rounds,
        }
    }
}

/// Convenience wrapper building a decoder for a single call.
pub fn abp_decode(code: &RsCode, channel_llr: &[f64], prior_llr: &[f64], cfg: AbpConfig) -> AbpResult {
    AbpDecoder::new(code.clone(), cfg).decode(channel_llr, prior_llr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llr::antipodal;
    use crate::rs::symbols_to_bits;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_codeword(code: &RsCode, rng: &mut impl Rng) -> Vec<FieldElement> {
        let msg: Vec<_> =
            (0..code.k()).map(|_| FieldElement(rng.random_range(0..code.field().size() as u16))).collect();
        code.encode(&msg).unwrap()
    }

    fn is_unit_column(m: &BitMatrix, c: usize) -> bool {
        (0..m.rows()).filter(|&r| m.get(r, c)).count() == 1
    }

    /// Greedy oracle: walk columns in `order`, keeping each one that is
    /// independent of those kept so far in the original matrix.
    fn greedy_independent(h: &BitMatrix, order: &[usize]) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for &c in order {
            if chosen.len() == h.rows() {
                break;
            }
            let mut stacked = BitMatrix::zeros(chosen.len() + 1, h.rows());
            for (i, &cc) in chosen.iter().chain(std::iter::once(&c)).enumerate() {
                for r in 0..h.rows() {
                    stacked.set(i, r, h.get(r, cc));
                }
            }
            if stacked.rank() == chosen.len() + 1 {
                chosen.push(c);
            }
        }
        chosen
    }

    #[test]
    fn equal_reliabilities_pick_lowest_independent_indices() {
        let h = RsCode::rs_15_7().binary_parity_check().matrix;
        let (a, pivots) = adapt_parity_matrix(&h, &[1.0; 60]);
        assert_eq!(pivots.len(), 32);
        assert!(pivots.iter().all(|&c| is_unit_column(&a, c)));
        let order: Vec<usize> = (0..60).collect();
        assert_eq!(pivots, greedy_independent(&h, &order));
    }

    #[test]
    fn pivots_follow_reliability_order_and_rank_condition() {
        let code = RsCode::rs_15_7();
        let h = code.binary_parity_check().matrix;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let llr: Vec<f64> = (0..60).map(|_| rng.random_range(-8.0..8.0)).collect();
        let (a, pivots) = adapt_parity_matrix(&h, &llr);
        assert_eq!(pivots.len(), 32);
        let mut order: Vec<usize> = (0..60).collect();
        order.sort_by(|&x, &y| llr[x].abs().total_cmp(&llr[y].abs()));
        assert_eq!(pivots, greedy_independent(&h, &order));
        assert!(pivots.iter().all(|&c| is_unit_column(&a, c)));
    }

    #[test]
    fn adaptation_preserves_row_space() {
        let h = RsCode::rs_31_25().binary_parity_check().matrix;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let llr: Vec<f64> = (0..155).map(|_| rng.random_range(-5.0..5.0)).collect();
        let (a, _) = adapt_parity_matrix(&h, &llr);
        assert_eq!(a.rank(), 30);
        assert_eq!(h.vstack(&a).rank(), 30);
    }

    #[test]
    fn spa_zero_in_zero_out() {
        let h = RsCode::rs_15_7().binary_parity_check().matrix;
        let (a, _) = adapt_parity_matrix(&h, &[0.0; 60]);
        assert!(spa_extrinsic(&a, &[0.0; 60], 1.0, 30.0).iter().all(|&e| e == 0.0));
    }

    #[test]
    fn spa_saturated_all_zero_word_gives_nonnegative_extrinsic() {
        let h = RsCode::rs_15_7().binary_parity_check().matrix;
        let llr = [30.0; 60];
        let (a, _) = adapt_parity_matrix(&h, &llr);
        assert!(spa_extrinsic(&a, &llr, 0.5, 30.0).iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn spa_is_odd() {
        // Every check of an RS binary image has even weight (the all-ones
        // word is a codeword), so negating all inputs negates all outputs.
        let h = RsCode::rs_15_7().binary_parity_check().matrix;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let llr: Vec<f64> = (0..60).map(|_| rng.random_range(-6.0..6.0)).collect();
        let neg: Vec<f64> = llr.iter().map(|l| -l).collect();
        let (a, _) = adapt_parity_matrix(&h, &llr);
        let e1 = spa_extrinsic(&a, &llr, 0.3, 30.0);
        let e2 = spa_extrinsic(&a, &neg, 0.3, 30.0);
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x + y).abs() < 1e-12);
        }
    }

    #[test]
    fn extrinsic_does_not_depend_on_own_prior() {
        let code = RsCode::rs_15_7();
        let cfg = AbpConfig { inner_iterations: 1, damping: 0.5, llr_clip: 30.0 };
        let dec = AbpDecoder::new(code.clone(), cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        // Well separated magnitudes so a tiny perturbation keeps the ordering.
        let mut mags: Vec<f64> = (0..60).map(|i| 0.1 + 0.1 * i as f64).collect();
        for i in (1..60).rev() {
            mags.swap(i, rng.random_range(0..=i));
        }
        let channel: Vec<f64> = mags.iter().map(|&m| if rng.random_bool(0.5) { m } else { -m }).collect();
        let prior = vec![0.0; 60];
        let base = dec.decode(&channel, &prior);
        for i in [0, 17, 42, 59] {
            let mut p = prior.clone();
            p[i] = 1e-4 * channel[i].signum();
            let out = dec.decode(&channel, &p);
            assert_eq!(out.extrinsic[i], base.extrinsic[i]);
        }
    }

    #[test]
    fn noiseless_input_decodes_in_one_round() {
        let code = RsCode::rs_15_7();
        let cw = random_codeword(&code, &mut ChaCha8Rng::seed_from_u64(15));
        let bits = symbols_to_bits(&cw, 4);
        let channel: Vec<f64> = bits.iter().map(|&b| 30.0 * antipodal(b)).collect();
        let out = abp_decode(&code, &channel, &[0.0; 60], AbpConfig::standalone());
        assert_eq!(out.rounds, 1);
        assert!(out.parity_satisfied);
        assert_eq!(out.decoded.as_deref(), Some(&cw[..7]));
        for (e, &b) in out.extrinsic.iter().zip(&bits) {
            assert!(e * antipodal(b) >= 0.0);
        }
    }

    #[test]
    fn decoded_output_is_always_a_codeword() {
        let code = RsCode::rs_15_7();
        let dec = AbpDecoder::new(code.clone(), AbpConfig::standalone());
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let llr: Vec<f64> = (0..60).map(|_| rng.random_range(-3.0..3.0)).collect();
            let out = dec.decode(&llr, &[0.0; 60]);
            if let Some(cw) = out.codeword {
                assert!(code.is_codeword(&cw));
            }
        }
    }

    #[test]
    fn deterministic() {
        let code = RsCode::rs_31_25();
        let dec = AbpDecoder::new(code, AbpConfig::joint());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let llr: Vec<f64> = (0..155).map(|_| rng.random_range(-4.0..4.0)).collect();
        let prior: Vec<f64> = (0..155).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert_eq!(dec.decode(&llr, &prior), dec.decode(&llr, &prior));
    }

    #[test]
    fn config_validation() {
        assert!(AbpConfig::joint().validate().is_ok());
        assert!(AbpConfig { inner_iterations: 0, ..AbpConfig::joint() }.validate().is_err());
        assert!(AbpConfig { damping: 0.0, ..AbpConfig::joint() }.validate().is_err());
        assert!(AbpConfig { damping: 1.5, ..AbpConfig::joint() }.validate().is_err());
        assert!(AbpConfig { llr_clip: -1.0, ..AbpConfig::joint() }.validate().is_err());
    }
}
