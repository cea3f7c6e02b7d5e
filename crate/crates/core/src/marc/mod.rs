//! Two-user multiple-access relay channel with Alamouti cooperation and a
//! convolutional network code at the relay.
//!
//! Each user RS-encodes `L_i` codewords, bit-interleaves the frame and splits it
//! into `L_i` packet rows. Rows of the two users are stacked alternately; the
//! relay runs the recursive systematic code down every column of that stack and
//! transmits the punctured parity as extra rows. The destination decodes by
//! exchanging extrinsic LLRs between a column-wise BCJR and row-wise ABP.

mod channel;
mod decoder;
pub mod dump;
mod frame;
mod relay;
mod xor;

use serde::{Deserialize, Serialize};

use crate::abp::AbpConfig;
use crate::conv::{ConvCode, PuncturePattern};
use crate::error::{Error, Result};
use crate::rs::RsCode;

pub use channel::{simulate_round, simulate_round_with, ChannelConfig, GroundTruth, SimulatedRound};
pub use decoder::{iterative_joint_decode, DecodeReport, JointDecoder};
pub use frame::{build_source_frame, Interleaver};
pub use relay::relay_network_encode;
pub use xor::{xor_baseline, xor_combine};

/// How the relay obtains the users' data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelayMode {
    /// The relay knows both frames exactly.
    Ideal,
    /// The relay hard-decodes its own noisy reception with Berlekamp-Massey
    /// and forwards whatever it decoded, right or wrong.
    #[default]
    DecodeAndForward,
}

/// Provenance of a row in the stacked frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    Mu1,
    Mu2,
    RnParity,
}

impl RowKind {
    pub fn code(self) -> u8 {
        match self {
            RowKind::Mu1 => 0,
            RowKind::Mu2 => 1,
            RowKind::RnParity => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(RowKind::Mu1),
            1 => Some(RowKind::Mu2),
            2 => Some(RowKind::RnParity),
            _ => None,
        }
    }

    pub fn source(self) -> Option<usize> {
        match self {
            RowKind::Mu1 => Some(0),
            RowKind::Mu2 => Some(1),
            RowKind::RnParity => None,
        }
    }
}

/// Transmission slots of one cooperative round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSchedule {
    pub slots: Vec<Slot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub t: usize,
    pub transmitter: &'static str,
    pub message: &'static str,
}

impl SlotSchedule {
    /// Broadcast by each user, Alamouti retransmission by each user, relay parity.
    pub fn standard() -> Self {
        let slots = [("MS1", "S1"), ("MS2", "S2"), ("MS1", "S3"), ("MS2", "S4"), ("RN", "S5")]
            .into_iter()
            .enumerate()
            .map(|(i, (transmitter, message))| Slot { t: i + 1, transmitter, message })
            .collect();
        SlotSchedule { slots }
    }
}

/// Geometry and coding parameters of one MARC frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameConfig {
    pub l1: usize,
    pub l2: usize,
    pub rs: RsCode,
    pub conv: ConvCode,
    pub puncture: PuncturePattern,
    pub interleaver_seeds: [u64; 2],
    pub relay_mode: RelayMode,
    pub max_joint_iterations: usize,
    pub abp: AbpConfig,
    /// Replace the extrinsic of decoded rows by ±clip and stop re-decoding them.
    pub freeze_decoded_rows: bool,
}

impl FrameConfig {
    /// (31,25) RS, (7,5) RSCC punctured to 2/3, 20 joint iterations.
    pub fn default_31_25() -> Self {
        FrameConfig {
            l1: 8,
            l2: 8,
            rs: RsCode::rs_31_25(),
            conv: ConvCode::rsc_7_5(),
            puncture: PuncturePattern::rate_two_thirds(),
            interleaver_seeds: [0x5eed_0001, 0x5eed_0002],
            relay_mode: RelayMode::DecodeAndForward,
            max_joint_iterations: 20,
            abp: AbpConfig::joint(),
            freeze_decoded_rows: true,
        }
    }

    /// Same system with the (15,7) code over GF(16).
    pub fn default_15_7() -> Self {
        FrameConfig { rs: RsCode::rs_15_7(), ..FrameConfig::default_31_25() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l1 == 0 || self.l2 == 0 {
            return Err(Error::InvalidConfig("l1 and l2 must be at least 1".into()));
        }
        if self.parity_rows() == 0 {
            return Err(Error::InvalidConfig("puncture pattern leaves no parity rows".into()));
        }
        if self.max_joint_iterations == 0 {
            return Err(Error::InvalidConfig("max_joint_iterations must be at least 1".into()));
        }
        if self.interleaver_seeds[0] == self.interleaver_seeds[1] {
            return Err(Error::InvalidConfig("interleaver seeds must differ between sources".into()));
        }
        self.abp.validate()
    }

    pub fn source_rows(&self) -> usize {
        self.l1 + self.l2
    }

    pub fn rows_of(&self, source: usize) -> usize {
        [self.l1, self.l2][source]
    }

    /// Relay parity rows, `N_N − L1 − L2`.
    pub fn parity_rows(&self) -> usize {
        self.puncture.kept_count(self.source_rows())
    }

    /// Total rows of the network-code matrix, `N_N`.
    pub fn nn(&self) -> usize {
        self.source_rows() + self.parity_rows()
    }

    /// Bits per packet row, `N·m`.
    pub fn row_bits(&self) -> usize {
        self.rs.codeword_bits()
    }

    /// Information bits carried by one frame of source `i`.
    pub fn message_bits(&self, source: usize) -> usize {
        self.rows_of(source) * self.rs.message_bits()
    }

    /// Network code rate `(L1 + L2) / N_N`.
    pub fn network_rate(&self) -> f64 {
        self.source_rows() as f64 / self.nn() as f64
    }

    /// Stacking order of source rows: alternate users while both have rows left.
    pub fn row_order(&self) -> Vec<(usize, usize)> {
        let mut order = Vec::with_capacity(self.source_rows());
        for r in 0..self.l1.max(self.l2) {
            if r < self.l1 {
                order.push((0, r));
            }
            if r < self.l2 {
                order.push((1, r));
            }
        }
        order
    }

    /// Provenance label of every row of the stacked matrix.
    pub fn row_labels(&self) -> Vec<RowKind> {
        self.row_order()
            .into_iter()
            .map(|(s, _)| if s == 0 { RowKind::Mu1 } else { RowKind::Mu2 })
            .chain(std::iter::repeat_n(RowKind::RnParity, self.parity_rows()))
            .collect()
    }

    pub fn rates(&self) -> RateAccounting {
        let data_rows = self.source_rows() as f64;
        let parity_rows = self.parity_rows() as f64;
        // Row-times: broadcast and Alamouti take one each per source row.
        let cooperative = data_rows / (2.0 * data_rows + parity_rows);
        let rs = self.rs.k() as f64 / self.rs.n() as f64;
        // Unit energy per transmitted symbol: each source row is sent once when
        // broadcast and twice inside the Alamouti block (once by each user).
        let energy_per_coded_bit = (3.0 * data_rows + parity_rows) / data_rows;
        RateAccounting { cooperative, overall: cooperative * rs, energy_per_coded_bit }
    }
}

/// Bits-per-symbol conventions and the energy spent per RS-coded bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateAccounting {
    /// RS-coded bits per row-time; 2/5 for the standard geometry. Labels the
    /// Eb/N0 axis.
    pub cooperative: f64,
    /// Information bits per row-time, including the RS rate.
    pub overall: f64,
    /// Total transmitted energy per RS-coded bit, in units of symbol energy.
    pub energy_per_coded_bit: f64,
}

impl RateAccounting {
    /// Eb/N0 when Eb counts information bits rather than RS-coded bits.
    pub fn overall_eb_n0_db(&self, axis_eb_n0_db: f64) -> f64 {
        axis_eb_n0_db + 10.0 * (self.cooperative / self.overall).log10()
    }

    /// Noise variance per complex sample at unit symbol energy.
    pub fn n0(&self, axis_eb_n0_db: f64) -> f64 {
        self.energy_per_coded_bit / crate::phy::db_to_linear(axis_eb_n0_db)
    }
}

/// LLRs of the stacked frame, rows × `N·m`, with row provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    labels: Vec<RowKind>,
}

impl LlrMatrix {
    pub fn new(rows: usize, cols: usize, labels: Vec<RowKind>) -> Result<Self> {
        if labels.len() != rows {
            return Err(Error::LengthMismatch { expected: rows, actual: labels.len() });
        }
        Ok(LlrMatrix { rows, cols, data: vec![0.0; rows * cols], labels })
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>, labels: Vec<RowKind>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        let mut m = LlrMatrix::new(rows, cols, labels)?;
        m.data = data;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[RowKind] {
        &self.labels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
}
