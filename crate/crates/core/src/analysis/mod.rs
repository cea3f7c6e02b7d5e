//! EXIT charts, mutual information and Monte Carlo BER sweeps.

mod ber;
pub mod csv;
mod exit;
mod mi;

pub use ber::{
    alamouti_uncoded_ber, ber_sweep, curve, diversity_slope, eb_n0_at_ber, iteration_gain_onset, BerPoint, Scheme,
    SweepConfig,
};
pub use exit::{exit_inner, exit_outer, tunnel_open, DecoderKind, ExitCurve, TunnelReport};
pub use mi::{
    gen_apriori, j_function, j_inverse, mutual_information, mutual_information_histogram, AprioriModel, SIGMA_MAX,
};
