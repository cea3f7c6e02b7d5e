use super::frame::Interleaver;
use super::{FrameConfig, LlrMatrix};
use crate::abp::AbpDecoder;
use crate::error::{Error, Result};
use crate::llr::{antipodal, hard_bit};
use crate::rs::symbols_to_bits;

/// Outcome of decoding one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeReport {
    /// Joint iterations actually run.
    pub iterations_used: usize,
    pub max_iterations: usize,
    /// Message-bit decisions of both users after each iteration run.
    pub decisions: Vec<[Vec<u8>; 2]>,
    /// Per-codeword parity flags after the last iteration.
    pub codeword_decoded: [Vec<bool>; 2],
}

impl DecodeReport {
    /// Decisions after iteration `iteration` (1-based). Iterations past the
    /// stopping point repeat the final decisions.
    pub fn decisions_at(&self, iteration: usize) -> &[Vec<u8>; 2] {
        let i = iteration.clamp(1, self.decisions.len());
        &self.decisions[i - 1]
    }

    pub fn messages(&self) -> &[Vec<u8>; 2] {
        self.decisions.last().expect("at least one iteration")
    }

    pub fn bit_errors_at(&self, iteration: usize, truth: &[Vec<u8>; 2]) -> [usize; 2] {
        let d = self.decisions_at(iteration);
        [0, 1].map(|s| d[s].iter().zip(&truth[s]).filter(|(a, b)| a != b).count())
    }

    pub fn ber_at(&self, iteration: usize, truth: &[Vec<u8>; 2]) -> [f64; 2] {
        let e = self.bit_errors_at(iteration, truth);
        [0, 1].map(|s| e[s] as f64 / truth[s].len().max(1) as f64)
    }

    pub fn frame_error_at(&self, iteration: usize, truth: &[Vec<u8>; 2]) -> [bool; 2] {
        self.bit_errors_at(iteration, truth).map(|e| e > 0)
    }

    pub fn all_decoded(&self) -> bool {
        self.codeword_decoded.iter().flatten().all(|&d| d)
    }
}

/// Iterative column-BCJR / row-ABP decoder for a fixed frame geometry.
#[derive(Clone, Debug)]
pub struct JointDecoder {
    cfg: FrameConfig,
    abp: AbpDecoder,
    interleavers: [Interleaver; 2],
    /// Stacked row index of each user's packet rows.
    slots: [Vec<usize>; 2],
}

impl JointDecoder {
    pub fn new(cfg: &FrameConfig) -> Result<Self> {
        cfg.validate()?;
        let mut slots = [Vec::new(), Vec::new()];
        for (slot, (s, _)) in cfg.row_order().into_iter().enumerate() {
            slots[s].push(slot);
        }
        Ok(JointDecoder {
            abp: AbpDecoder::new(cfg.rs.clone(), cfg.abp),
            interleavers: [Interleaver::for_source(cfg, 0), Interleaver::for_source(cfg, 1)],
            slots,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    fn check_shape(&self, gamma: &LlrMatrix) -> Result<()> {
        if gamma.rows() != self.cfg.nn() {
            return Err(Error::LengthMismatch { expected: self.cfg.nn(), actual: gamma.rows() });
        }
        if gamma.cols() != self.cfg.row_bits() {
            return Err(Error::LengthMismatch { expected: self.cfg.row_bits(), actual: gamma.cols() });
        }
        Ok(())
    }

    /// Column BCJR over the stacked matrix. `prior` and the result are the
    /// source rows in stacked order, row-major (`(L1+L2) × N·m`).
    pub fn column_extrinsic(&self, gamma: &LlrMatrix, prior: &[f64]) -> Result<Vec<f64>> {
        self.check_shape(gamma)?;
        let rows = self.cfg.source_rows();
        let width = self.cfg.row_bits();
        if prior.len() != rows * width {
            return Err(Error::LengthMismatch { expected: rows * width, actual: prior.len() });
        }
        let parity_rows = self.cfg.parity_rows();
        let mut out = vec![0.0; rows * width];
        let mut sys = vec![0.0; rows];
        let mut pri = vec![0.0; rows];
        let mut kept = vec![0.0; parity_rows];
        for j in 0..width {
            for r in 0..rows {
                sys[r] = gamma.get(r, j);
                pri[r] = prior[r * width + j];
            }
            for (q, v) in kept.iter_mut().enumerate() {
                *v = gamma.get(rows + q, j);
            }
            let par = self.cfg.puncture.depuncture(&kept, rows)?;
            let siso = self.cfg.conv.bcjr(&sys, &par, &pri);
            for r in 0..rows {
                out[r * width + j] = siso.extrinsic_systematic[r];
            }
        }
        Ok(out)
    }

    /// Stacked packet-domain rows → per-user codeword-domain vectors.
    pub fn split(&self, stacked: &[f64]) -> [Vec<f64>; 2] {
        let width = self.cfg.row_bits();
        [0, 1].map(|s| {
            let packets: Vec<f64> =
                self.slots[s].iter().flat_map(|&slot| stacked[slot * width..(slot + 1) * width].iter().copied()).collect();
            self.interleavers[s].deinterleave(&packets)
        })
    }

    /// Inverse of [`JointDecoder::split`].
    pub fn merge(&self, per_source: &[Vec<f64>; 2]) -> Vec<f64> {
        let width = self.cfg.row_bits();
        let mut stacked = vec![0.0; self.cfg.source_rows() * width];
        for s in 0..2 {
            let packets = self.interleavers[s].interleave(&per_source[s]);
            for (r, &slot) in self.slots[s].iter().enumerate() {
                stacked[slot * width..(slot + 1) * width].copy_from_slice(&packets[r * width..(r + 1) * width]);
            }
        }
        stacked
    }

    pub fn decode(&self, gamma: &LlrMatrix) -> Result<DecodeReport> {
        self.check_shape(gamma)?;
        let cfg = &self.cfg;
        let width = cfg.row_bits();
        let k_bits = cfg.rs.message_bits();
        let m = cfg.rs.m();
        let clip = cfg.abp.llr_clip;

        let channel_stacked: Vec<f64> = gamma.data()[..cfg.source_rows() * width].to_vec();
        let channel = self.split(&channel_stacked);

        let mut feedback: [Vec<f64>; 2] = [0, 1].map(|s| vec![0.0; channel[s].len()]);
        let mut decoded: [Vec<Option<Vec<u8>>>; 2] = [0, 1].map(|s| vec![None; cfg.rows_of(s)]);
        let mut frozen: [Vec<bool>; 2] = [0, 1].map(|s| vec![false; cfg.rows_of(s)]);
        let mut decisions = Vec::new();
        let mut prior_stacked = vec![0.0; cfg.source_rows() * width];

        for _ in 0..cfg.max_joint_iterations {
            let ext = self.column_extrinsic(gamma, &prior_stacked)?;
            let apriori = self.split(&ext);
            let mut iteration_decisions: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
            for s in 0..2 {
                for c in 0..cfg.rows_of(s) {
                    let span = c * width..(c + 1) * width;
                    if frozen[s][c] {
                        iteration_decisions[s].extend_from_slice(&decoded[s][c].as_ref().unwrap()[..k_bits]);
                        continue;
                    }
                    let res = self.abp.decode(&channel[s][span.clone()], &apriori[s][span.clone()]);
                    match res.codeword {
                        Some(cw) => {
                            let bits = symbols_to_bits(&cw, m);
                            // Only rows whose soft decisions satisfy every check
                            // are clamped; a hard-decision fallback can miscorrect.
                            if cfg.freeze_decoded_rows && res.parity_satisfied {
                                for (f, &b) in feedback[s][span.clone()].iter_mut().zip(&bits) {
                                    *f = clip * antipodal(b);
                                }
                                frozen[s][c] = true;
                            } else {
                                feedback[s][span.clone()].copy_from_slice(&res.extrinsic);
                            }
                            iteration_decisions[s].extend_from_slice(&bits[..k_bits]);
                            decoded[s][c] = Some(bits);
                        }
                        None => {
                            feedback[s][span.clone()].copy_from_slice(&res.extrinsic);
                            let start = span.start;
                            iteration_decisions[s].extend((0..k_bits).map(|i| {
                                let p = start + i;
                                hard_bit(channel[s][p] + apriori[s][p] + res.extrinsic[i])
                            }));
                            decoded[s][c] = None;
                        }
                    }
                }
            }
            decisions.push(iteration_decisions);
            if decoded.iter().flatten().all(Option::is_some) {
                break;
            }
            prior_stacked = self.merge(&feedback);
        }

        Ok(DecodeReport {
            iterations_used: decisions.len(),
            max_iterations: cfg.max_joint_iterations,
            decisions,
            codeword_decoded: decoded.map(|v| v.iter().map(Option::is_some).collect()),
        })
    }
}

/// One-shot form of [`JointDecoder::decode`].
pub fn iterative_joint_decode(cfg: &FrameConfig, gamma: &LlrMatrix) -> Result<DecodeReport> {
    JointDecoder::new(cfg)?.decode(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marc::{simulate_round, ChannelConfig, RelayMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> FrameConfig {
        FrameConfig { l1: 2, l2: 2, ..FrameConfig::default_15_7() }
    }

    #[test]
    fn split_merge_round_trip() {
        let cfg = FrameConfig { l1: 3, l2: 2, ..FrameConfig::default_15_7() };
        let dec = JointDecoder::new(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let stacked: Vec<f64> = (0..cfg.source_rows() * cfg.row_bits()).map(|_| rng.random_range(-5.0..5.0)).collect();
        assert_eq!(dec.merge(&dec.split(&stacked)), stacked);
        let per = dec.split(&stacked);
        assert_eq!(dec.split(&dec.merge(&per)), per);
    }

    #[test]
    fn noiseless_decodes_in_one_iteration() {
        for cfg in [small(), FrameConfig { l1: 2, l2: 2, ..FrameConfig::default_31_25() }] {
            let round = simulate_round(&cfg, &ChannelConfig::noiseless(), 3, 0).unwrap();
            let report = iterative_joint_decode(&cfg, &round.llr).unwrap();
            assert_eq!(report.iterations_used, 1);
            assert!(report.all_decoded());
            assert_eq!(report.bit_errors_at(1, &round.truth.messages), [0, 0]);
            assert_eq!(report.bit_errors_at(20, &round.truth.messages), [0, 0]);
        }
    }

    #[test]
    fn single_iteration_is_one_bcjr_and_one_abp_pass() {
        let cfg = FrameConfig { max_joint_iterations: 1, relay_mode: RelayMode::Ideal, ..small() };
        let round = simulate_round(&cfg, &ChannelConfig::at(2.0), 17, 1).unwrap();
        let report = iterative_joint_decode(&cfg, &round.llr).unwrap();
        assert_eq!(report.iterations_used, 1);

        let dec = JointDecoder::new(&cfg).unwrap();
        let width = cfg.row_bits();
        let zero = vec![0.0; cfg.source_rows() * width];
        let apriori = dec.split(&dec.column_extrinsic(&round.llr, &zero).unwrap());
        let channel = dec.split(&round.llr.data()[..cfg.source_rows() * width]);
        let abp = AbpDecoder::new(cfg.rs.clone(), cfg.abp);
        let k_bits = cfg.rs.message_bits();
        for s in 0..2 {
            let mut expect = Vec::new();
            for c in 0..cfg.rows_of(s) {
                let span = c * width..(c + 1) * width;
                let res = abp.decode(&channel[s][span.clone()], &apriori[s][span.clone()]);
                assert_eq!(res.codeword.is_some(), report.codeword_decoded[s][c]);
                match res.codeword {
                    Some(cw) => expect.extend_from_slice(&symbols_to_bits(&cw, cfg.rs.m())[..k_bits]),
                    None => expect.extend(
                        (0..k_bits).map(|i| hard_bit(channel[s][span.start + i] + apriori[s][span.start + i] + res.extrinsic[i])),
                    ),
                }
            }
            assert_eq!(report.messages()[s], expect);
        }
    }

    #[test]
    fn apriori_excludes_own_channel_value() {
        let cfg = small();
        let dec = JointDecoder::new(&cfg).unwrap();
        let width = cfg.row_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gamma: Vec<f64> = (0..cfg.nn() * width).map(|_| rng.random_range(-3.0..3.0)).collect();
        let gamma = LlrMatrix::from_data(cfg.nn(), width, gamma, cfg.row_labels()).unwrap();
        let prior: Vec<f64> = (0..cfg.source_rows() * width).map(|_| rng.random_range(-2.0..2.0)).collect();
        let base = dec.split(&dec.column_extrinsic(&gamma, &prior).unwrap());

        // Perturb one systematic channel value; trace where it lands after the split.
        let (slot, col) = (1, 17);
        let mut data = gamma.data().to_vec();
        data[slot * width + col] += 2.5;
        let bumped = LlrMatrix::from_data(gamma.rows(), width, data, gamma.labels().to_vec()).unwrap();
        let moved = dec.split(&dec.column_extrinsic(&bumped, &prior).unwrap());

        let mut marker = vec![0.0; cfg.source_rows() * width];
        marker[slot * width + col] = 1.0;
        let where_ = dec.split(&marker);
        let s = cfg.row_order()[slot].0;
        let p = where_[s].iter().position(|&v| v == 1.0).unwrap();
        assert!((moved[s][p] - base[s][p]).abs() < 1e-9);
        let others_changed = (0..2).any(|t| moved[t].iter().zip(&base[t]).any(|(a, b)| (a - b).abs() > 1e-7));
        assert!(others_changed);
    }

    #[test]
    fn rejects_wrong_shape() {
        let cfg = small();
        let bad = LlrMatrix::new(3, cfg.row_bits(), cfg.row_labels()[..3].to_vec()).unwrap();
        assert!(iterative_joint_decode(&cfg, &bad).is_err());
    }

    #[test]
    fn report_accessors_clamp() {
        let report = DecodeReport {
            iterations_used: 1,
            max_iterations: 5,
            decisions: vec![[vec![0, 1], vec![1, 1]]],
            codeword_decoded: [vec![false], vec![true]],
        };
        let truth = [vec![0, 0], vec![1, 1]];
        assert_eq!(report.bit_errors_at(4, &truth), [1, 0]);
        assert_eq!(report.ber_at(1, &truth), [0.5, 0.0]);
        assert_eq!(report.frame_error_at(9, &truth), [true, false]);
        assert!(!report.all_decoded());
    }
}
