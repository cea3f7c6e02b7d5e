//! Space-time and network coded cooperation over a two-user multiple-access
//! relay channel: GF(2^m) arithmetic, Reed-Solomon coding with adaptive belief
//! propagation, recursive systematic convolutional coding with BCJR, Alamouti
//! links, the iterative joint decoder and its EXIT/BER analysis.

pub mod abp;
pub mod analysis;
pub mod bitmat;
pub mod conv;
pub mod error;
pub mod gf;
pub mod llr;
pub mod marc;
pub mod oracle;
pub mod phy;
pub mod rs;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use abp::{abp_decode, AbpConfig, AbpDecoder, AbpResult};
pub use bitmat::BitMatrix;
pub use conv::{bcjr_decode, rscc_encode, ConvCode, PuncturePattern, SisoOutput};
pub use error::{Error, Result};
pub use gf::{Field, FieldElement, Poly};
pub use marc::{
    iterative_joint_decode, simulate_round, xor_baseline, ChannelConfig, DecodeReport, FrameConfig, LlrMatrix,
    RelayMode, RowKind,
};
pub use phy::{trial_rng, NoiseConfig};
pub use rs::{RsCode, bits_to_symbols, symbols_to_bits};
