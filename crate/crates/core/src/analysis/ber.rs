//! Monte Carlo BER sweeps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llr::hard_bit;
use crate::marc::{simulate_round, xor_baseline, ChannelConfig, FrameConfig, JointDecoder};
use crate::phy::{alamouti_receive, alamouti_soft_decode, complex_gaussian, db_to_linear, trial_rng};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Error statistics at one (Eb/N0, iteration) point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BerPoint {
    pub eb_n0_db: f64,
    pub iteration: usize,
    pub bit_errors: u64,
    pub total_bits: u64,
    pub frame_errors: u64,
    /// Frames simulated.
    pub trials: u64,
    pub ber: f64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean joint iterations actually run per frame.
    pub mean_iterations: f64,
}

impl BerPoint {
    /// Accumulates per-frame error counts, each frame carrying `bits_per_frame`
    /// bits. The interval treats frames as independent clusters, since errors
    /// inside a frame are strongly correlated; with no errors it falls back to
    /// the rule of three on bits.
    pub fn from_frames(
        eb_n0_db: f64,
        iteration: usize,
        frame_bit_errors: &[u64],
        bits_per_frame: u64,
        mean_iterations: f64,
    ) -> Self {
        let trials = frame_bit_errors.len() as u64;
        let bit_errors: u64 = frame_bit_errors.iter().sum();
        let frame_errors = frame_bit_errors.iter().filter(|&&e| e > 0).count() as u64;
        let total_bits = trials * bits_per_frame;
        let ber = if total_bits == 0 { 0.0 } else { bit_errors as f64 / total_bits as f64 };
        let fer = if trials == 0 { 0.0 } else { frame_errors as f64 / trials as f64 };
        let (ci_low, ci_high) = if trials < 2 {
            (0.0, 1.0)
        } else if bit_errors == 0 {
            (0.0, (3.0 / total_bits as f64).min(1.0))
        } else {
            let n = trials as f64;
            let rates: Vec<f64> = frame_bit_errors.iter().map(|&e| e as f64 / bits_per_frame as f64).collect();
            let var = rates.iter().map(|r| (r - ber).powi(2)).sum::<f64>() / (n - 1.0);
            let half = Z95 * (var / n).sqrt();
            ((ber - half).max(0.0), (ber + half).min(1.0))
        };
        BerPoint {
            eb_n0_db,
            iteration,
            bit_errors,
            total_bits,
            frame_errors,
            trials,
            ber,
            fer,
            ci_low,
            ci_high,
            mean_iterations,
        }
    }

    /// True when this point's interval lies entirely below `other`'s.
    pub fn significantly_below(&self, other: &BerPoint) -> bool {
        self.ci_high < other.ci_low
    }

    pub fn overlaps(&self, other: &BerPoint) -> bool {
        !(self.significantly_below(other) || other.significantly_below(self))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Convolutional network code with iterative joint decoding.
    #[default]
    Proposed,
    /// XOR network code, one-shot hard decoding.
    Xor,
}

/// Grid and stopping rule of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub eb_n0_db: Vec<f64>,
    /// Joint iterations to report; the decoder runs up to the largest.
    pub iterations: Vec<usize>,
    /// Stop a point once every reported iteration has this many frame errors.
    pub min_frame_errors: u64,
    pub max_frames: u64,
    /// Frames per batch; the stopping rule is checked between batches.
    pub batch: u64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            eb_n0_db: (0..=10).map(f64::from).collect(),
            iterations: vec![1, 2, 5, 10, 20],
            min_frame_errors: 100,
            max_frames: 10_000,
            batch: 64,
            seed: 1,
            scheme: Scheme::Proposed,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eb_n0_db.is_empty() || self.eb_n0_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("Eb/N0 grid must be non-empty and finite".into()));
        }
        if self.iterations.is_empty() || self.iterations.contains(&0) {
            return Err(Error::InvalidConfig("iteration counts must be at least 1".into()));
        }
        if self.batch == 0 || self.max_frames == 0 {
            return Err(Error::InvalidConfig("batch and max_frames must be positive".into()));
        }
        Ok(())
    }

    /// Iterations reported for `scheme` (the baseline has a single pass).
    pub fn reported_iterations(&self) -> Vec<usize> {
        match self.scheme {
            Scheme::Proposed => self.iterations.clone(),
            Scheme::Xor => vec![1],
        }
    }
}

/// Per-frame outcome: bit errors at each reported iteration, iterations used.
type FrameOutcome = (Vec<u64>, usize);

fn run_frame(
    cfg: &FrameConfig,
    decoder: &JointDecoder,
    ch: &ChannelConfig,
    sweep: &SweepConfig,
    reported: &[usize],
    stream: u64,
) -> Result<FrameOutcome> {
    match sweep.scheme {
        Scheme::Proposed => {
            let round = simulate_round(cfg, ch, sweep.seed, stream)?;
            let report = decoder.decode(&round.llr)?;
            let errors = reported
                .iter()
                .map(|&it| report.bit_errors_at(it, &round.truth.messages).iter().sum::<usize>() as u64)
                .collect();
            Ok((errors, report.iterations_used))
        }
        Scheme::Xor => {
            let round = xor_baseline(cfg, ch, sweep.seed, stream)?;
            let e = round.report.bit_errors_at(1, &round.messages);
            Ok((vec![(e[0] + e[1]) as u64], 1))
        }
    }
}

/// Sweeps `sweep.eb_n0_db`, reporting every requested iteration at each point.
///
/// Frame `t` of grid point `g` always uses random stream `(g << 32) | t` of
/// the master seed, and batches are reduced in order, so results do not depend
/// on the thread count.
pub fn ber_sweep(cfg: &FrameConfig, base: &ChannelConfig, sweep: &SweepConfig) -> Result<Vec<BerPoint>> {
    sweep.validate()?;
    cfg.validate()?;
    let decoder = JointDecoder::new(&FrameConfig {
        max_joint_iterations: sweep.iterations.iter().copied().max().unwrap_or(1),
        ..cfg.clone()
    })?;
    let dcfg = decoder.config().clone();
    let reported = sweep.reported_iterations();
    let bits_per_frame = (dcfg.message_bits(0) + dcfg.message_bits(1)) as u64;
    let mut out = Vec::new();
    for (g, &db) in sweep.eb_n0_db.iter().enumerate() {
        let ch = ChannelConfig { eb_n0_db: db, ..*base };
        let mut frames: Vec<FrameOutcome> = Vec::new();
        while (frames.len() as u64) < sweep.max_frames {
            let start = frames.len() as u64;
            let end = (start + sweep.batch).min(sweep.max_frames);
            let batch: Vec<FrameOutcome> = (start..end)
                .into_par_iter()
                .map(|t| run_frame(&dcfg, &decoder, &ch, sweep, &reported, ((g as u64) << 32) | t))
                .collect::<Result<_>>()?;
            frames.extend(batch);
            let enough = (0..reported.len())
                .all(|i| frames.iter().filter(|f| f.0[i] > 0).count() as u64 >= sweep.min_frame_errors);
            if enough {
                break;
            }
        }
        let mean_iterations = frames.iter().map(|f| f.1 as f64).sum::<f64>() / frames.len() as f64;
        for (i, &it) in reported.iter().enumerate() {
            let errors: Vec<u64> = frames.iter().map(|f| f.0[i]).collect();
            out.push(BerPoint::from_frames(db, it, &errors, bits_per_frame, mean_iterations));
        }
    }
    Ok(out)
}

/// Points of one iteration, in grid order.
pub fn curve(points: &[BerPoint], iteration: usize) -> Vec<BerPoint> {
    points.iter().filter(|p| p.iteration == iteration).copied().collect()
}

/// Lowest grid Eb/N0 from which iteration `later` is significantly better
/// than iteration `first` at every higher point. Points where `first` has
/// fewer than `min_frame_errors` frame errors are inconclusive and skipped.
pub fn iteration_gain_onset(points: &[BerPoint], first: usize, later: usize, min_frame_errors: u64) -> Option<f64> {
    let a = curve(points, first);
    let b = curve(points, later);
    let mut onset = None;
    for (pa, pb) in a.iter().zip(&b).rev() {
        if pa.frame_errors < min_frame_errors {
            continue;
        }
        if pb.significantly_below(pa) {
            onset = Some(pa.eb_n0_db);
        } else {
            break;
        }
    }
    onset
}

/// Eb/N0 at which a BER curve crosses `target`, interpolating log10(BER)
/// linearly between the bracketing grid points.
pub fn eb_n0_at_ber(curve: &[BerPoint], target: f64) -> Option<f64> {
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.ber >= target && b.ber <= target {
            if b.ber <= 0.0 {
                return Some(b.eb_n0_db);
            }
            if a.ber == b.ber {
                return Some(a.eb_n0_db);
            }
            let t = (a.ber.log10() - target.log10()) / (a.ber.log10() - b.ber.log10());
            return Some(a.eb_n0_db + t * (b.eb_n0_db - a.eb_n0_db));
        }
    }
    None
}

/// BER of uncoded BPSK over the two-user Alamouti link with independent
/// Rayleigh draws per symbol pair, at per-transmitter SNR `1/N0`.
pub fn alamouti_uncoded_ber(snr_db: f64, min_bit_errors: u64, max_bits: u64, seed: u64) -> BerPoint {
    let n0 = 1.0 / db_to_linear(snr_db);
    let pairs_per_block = 4096u64;
    let mut blocks: Vec<u64> = Vec::new();
    let mut errors = 0u64;
    let mut t = 0u64;
    while errors < min_bit_errors && (blocks.len() as u64 + 1) * pairs_per_block * 2 <= max_bits {
        let mut rng = trial_rng(seed, t);
        t += 1;
        let mut e = 0u64;
        for _ in 0..pairs_per_block {
            let b1 = rand::Rng::random_range(&mut rng, 0..2u8);
            let b2 = rand::Rng::random_range(&mut rng, 0..2u8);
            let s = |b: u8| Complex64::new(if b == 0 { 1.0 } else { -1.0 }, 0.0);
            let h1 = complex_gaussian(&mut rng, 1.0);
            let h2 = complex_gaussian(&mut rng, 1.0);
            let n1 = complex_gaussian(&mut rng, n0);
            let n2 = complex_gaussian(&mut rng, n0);
            let (y1, y2) = alamouti_receive(s(b1), s(b2), h1, h2, n1, n2);
            let (l1, l2) = alamouti_soft_decode(y1, y2, h1, h2, n0);
            e += (hard_bit(l1) != b1) as u64 + (hard_bit(l2) != b2) as u64;
        }
        errors += e;
        blocks.push(e);
    }
    BerPoint::from_frames(snr_db, 0, &blocks, pairs_per_block * 2, 0.0)
}

/// Least-squares slope of log10(BER) against SNR/10 (decades per decade).
pub fn diversity_slope(points: &[BerPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.eb_n0_db / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ber.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(db: f64, it: usize, errors: &[u64]) -> BerPoint {
        BerPoint::from_frames(db, it, errors, 100, 1.0)
    }

    #[test]
    fn point_statistics() {
        let p = point(1.0, 1, &[0, 10, 0, 30]);
        assert_eq!(p.bit_errors, 40);
        assert_eq!(p.total_bits, 400);
        assert_eq!(p.frame_errors, 2);
        assert_eq!(p.ber, 0.1);
        assert_eq!(p.fer, 0.5);
        assert!(p.ci_low <= p.ber && p.ber <= p.ci_high);
        let clean = point(1.0, 1, &[0; 300]);
        assert_eq!((clean.ci_low, clean.ci_high), (0.0, 1e-4));
    }

    #[test]
    fn onset_requires_persistent_gain() {
        let mk = |db: f64, it: usize, e: u64| point(db, it, &vec![e; 50]);
        let mut pts = Vec::new();
        for (db, e1, e20) in [(0.0, 30, 30), (1.0, 20, 5), (2.0, 10, 9), (3.0, 8, 1), (4.0, 6, 0)] {
            pts.push(mk(db, 1, e1));
            pts.push(mk(db, 20, e20));
        }
        // Constant per-frame errors give zero-width intervals; 2 dB has a
        // strict but tiny gain, so every point from 1 dB on counts.
        assert_eq!(iteration_gain_onset(&pts, 1, 20, 10), Some(1.0));
        pts[5] = mk(2.0, 20, 10);
        assert_eq!(iteration_gain_onset(&pts, 1, 20, 10), Some(3.0));
    }

    #[test]
    fn interpolated_crossing() {
        let c = vec![point(0.0, 1, &[10]), point(2.0, 1, &[0]), point(4.0, 1, &[0])];
        assert_eq!(eb_n0_at_ber(&c, 1e-3), Some(2.0));
        let c = vec![
            BerPoint { ber: 1e-2, ..point(0.0, 1, &[1]) },
            BerPoint { ber: 1e-4, ..point(2.0, 1, &[1]) },
        ];
        assert!((eb_n0_at_ber(&c, 1e-3).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(eb_n0_at_ber(&c, 1e-6), None);
    }

    #[test]
    fn noiseless_sweep_is_error_free() {
        let cfg = FrameConfig { l1: 2, l2: 2, ..FrameConfig::default_15_7() };
        let sweep = SweepConfig {
            eb_n0_db: vec![0.0],
            iterations: vec![1, 3],
            max_frames: 8,
            batch: 4,
            ..SweepConfig::default()
        };
        let pts = ber_sweep(&cfg, &ChannelConfig::noiseless(), &sweep).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.bit_errors == 0 && p.trials == 8));
        let xor = ber_sweep(&cfg, &ChannelConfig::noiseless(), &SweepConfig { scheme: Scheme::Xor, ..sweep }).unwrap();
        assert_eq!(xor.len(), 1);
        assert_eq!(xor[0].bit_errors, 0);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = FrameConfig { l1: 2, l2: 2, ..FrameConfig::default_15_7() };
        let sweep = SweepConfig {
            eb_n0_db: vec![1.0, 2.0],
            iterations: vec![1, 2],
            min_frame_errors: 3,
            max_frames: 40,
            batch: 8,
            ..SweepConfig::default()
        };
        let a = ber_sweep(&cfg, &ChannelConfig::default(), &sweep).unwrap();
        let b = ber_sweep(&cfg, &ChannelConfig::default(), &sweep).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alamouti_diversity_slope_is_about_two() {
        let pts: Vec<BerPoint> = [10.0, 15.0, 20.0].iter().map(|&db| alamouti_uncoded_ber(db, 200, 1 << 26, 9)).collect();
        assert!(pts.iter().all(|p| p.bit_errors >= 200));
        let slope = diversity_slope(&pts);
        assert!((slope + 2.0).abs() < 0.3, "slope {slope}");
    }
}
