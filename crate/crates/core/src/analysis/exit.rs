//! EXIT characteristics of the column (Alamouti + BCJR) and row (ABP) decoders.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mi::{gen_apriori, mutual_information};
use crate::abp::{AbpConfig, AbpDecoder};
use crate::error::{Error, Result};
use crate::llr::antipodal;
use crate::marc::{simulate_round_with, ChannelConfig, FrameConfig, JointDecoder};
use crate::phy::trial_rng;
use crate::rs::{bits_to_symbols, symbols_to_bits, RsCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Inner,
    Outer,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Inner => "inner",
            DecoderKind::Outer => "outer",
        }
    }
}

/// Transfer curve `I_e = T(I_a)` sampled on an increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExitCurve {
    pub decoder: DecoderKind,
    /// Eb/N0 of the channel (inner curves only).
    pub eb_n0_db: Option<f64>,
    pub code: String,
    pub trials: usize,
    pub points: Vec<(f64, f64)>,
}

impl ExitCurve {
    /// Piecewise-linear `T(x)`, held constant outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let p = &self.points;
        if x <= p[0].0 {
            return p[0].1;
        }
        for w in p.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        p[p.len() - 1].1
    }

    /// Largest drop between consecutive grid points (0 for a monotone curve).
    pub fn max_decrease(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0, f64::max)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty I_a grid".into()));
    }
    if grid.iter().any(|&x| !(0.0..=1.0).contains(&x)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("I_a grid must be strictly increasing within [0, 1]".into()));
    }
    Ok(())
}

/// Inner transfer curve: Gaussian priors on the source bits enter the column
/// BCJR; the output is the destination's channel LLR plus the BCJR extrinsic,
/// i.e. everything the row decoders receive. Averaged over `trials` rounds.
pub fn exit_inner(
    cfg: &FrameConfig,
    ch: &ChannelConfig,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ExitCurve> {
    check_grid(grid)?;
    let dec = JointDecoder::new(cfg)?;
    let width = cfg.row_bits();
    let rows = cfg.source_rows();
    let order = cfg.row_order();
    let points = grid
        .iter()
        .enumerate()
        .map(|(g, &ia)| -> Result<(f64, f64)> {
            let per_trial: Vec<(f64, usize)> = (0..trials)
                .into_par_iter()
                .map(|t| -> Result<(f64, usize)> {
                    let mut rng = trial_rng(seed, ((g as u64) << 32) | t as u64);
                    let round = simulate_round_with(cfg, ch, &mut rng)?;
                    let truth: Vec<u8> =
                        order.iter().flat_map(|&(s, r)| round.truth.frames[s][r].iter().copied()).collect();
                    let prior = gen_apriori(&truth, ia, &mut rng);
                    let ext = dec.column_extrinsic(&round.llr, &prior)?;
                    let out: Vec<f64> = (0..rows * width).map(|i| round.llr.data()[i] + ext[i]).collect();
                    Ok((mutual_information(&out, &truth) * out.len() as f64, out.len()))
                })
                .collect::<Result<_>>()?;
            let (sum, n) = per_trial.iter().fold((0.0, 0), |(a, b), &(s, k)| (a + s, b + k));
            Ok((ia, sum / n as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExitCurve {
        decoder: DecoderKind::Inner,
        eb_n0_db: Some(ch.eb_n0_db),
        code: format!("rs({},{})", cfg.rs.n(), cfg.rs.k()),
        trials,
        points,
    })
}

/// Outer transfer curve: Gaussian LLRs of random codewords are the only ABP
/// input; rows whose soft decisions satisfy every check report ±clip, as in
/// the joint decoder. `trials` codewords per grid point.
pub fn exit_outer(rs: &RsCode, abp: AbpConfig, grid: &[f64], trials: usize, seed: u64) -> Result<ExitCurve> {
    check_grid(grid)?;
    abp.validate()?;
    let dec = AbpDecoder::new(rs.clone(), abp);
    let m = rs.m();
    let points = grid
        .iter()
        .enumerate()
        .map(|(g, &ia)| -> Result<(f64, f64)> {
            let per_trial: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| -> Result<f64> {
                    let mut rng = trial_rng(seed, ((g as u64) << 32) | t as u64);
                    let msg: Vec<u8> = (0..rs.message_bits()).map(|_| rng.random_range(0..2u8)).collect();
                    let cw = symbols_to_bits(&rs.encode(&bits_to_symbols(&msg, m))?, m);
                    let apriori = gen_apriori(&cw, ia, &mut rng);
                    let res = dec.decode(&apriori, &vec![0.0; cw.len()]);
                    let ext = match (&res.codeword, res.parity_satisfied) {
                        (Some(c), true) => {
                            symbols_to_bits(c, m).iter().map(|&b| abp.llr_clip * antipodal(b)).collect()
                        }
                        _ => res.extrinsic,
                    };
                    Ok(mutual_information(&ext, &cw))
                })
                .collect::<Result<_>>()?;
            Ok((ia, per_trial.iter().sum::<f64>() / trials as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExitCurve {
        decoder: DecoderKind::Outer,
        eb_n0_db: None,
        code: format!("rs({},{})", rs.n(), rs.k()),
        trials,
        points,
    })
}

/// Result of overlaying an inner curve and an inverted outer curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunnelReport {
    pub open: bool,
    /// Best reachable information, `T_out(T_in(1))`; the inner curve ends
    /// below 1 whenever the channel leaves bits without parity coverage.
    pub reachable: f64,
    /// Smallest margin `T_out(T_in(x)) − x` over the checked range.
    pub min_margin: f64,
    /// Where that margin occurs.
    pub at: f64,
}

/// The tunnel is open when the iteration `x ↦ T_out(T_in(x))` makes progress
/// at every `x` up to `reachable − delta`, i.e. a decoding trajectory started
/// at zero information gets within `delta` of the best reachable point.
pub fn tunnel_open(inner: &ExitCurve, outer: &ExitCurve, delta: f64) -> TunnelReport {
    let steps = 1000;
    let reachable = outer.eval(inner.eval(1.0));
    let top = (reachable - delta).max(0.0);
    let mut report = TunnelReport { open: true, reachable, min_margin: f64::INFINITY, at: 0.0 };
    for i in 0..=steps {
        let x = top * i as f64 / steps as f64;
        let margin = outer.eval(inner.eval(x)) - x;
        if margin < report.min_margin {
            report.min_margin = margin;
            report.at = x;
        }
    }
    report.open = report.min_margin > 0.0;
    report
}
