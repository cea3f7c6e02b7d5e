//! Subcommand bodies and the artifact/sidecar writers shared by all of them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stnc_core::analysis::csv::{write_ber, write_exit};
use stnc_core::analysis::{ber_sweep, exit_inner, exit_outer, DecoderKind};
use stnc_core::llr::antipodal;
use stnc_core::marc::dump::{read_bits, read_llr, write_bits, BIT_MAGIC, LLR_MAGIC};
use stnc_core::marc::{build_source_frame, relay_network_encode, JointDecoder};
use stnc_core::{ChannelConfig, FrameConfig, LlrMatrix};

use crate::config::RunConfig;
use crate::CliError;

pub const BER_FILE: &str = "ber.csv";
pub const EXIT_FILE: &str = "exit.csv";
pub const FRAME_FILE: &str = "frame.bits";
pub const DECODED_FILE: &str = "decoded.bin";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub command: String,
    pub artifact: String,
    pub version: String,
    pub core_version: String,
    pub seed: u64,
    pub threads_used: usize,
}

/// Both rate conventions of the configured geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateInfo {
    /// RS-coded bits per row-time; the Eb/N0 axis of every CSV uses this.
    pub cooperative: f64,
    /// Information bits per row-time.
    pub overall: f64,
    pub energy_per_coded_bit: f64,
    pub network: f64,
    /// Add to an axis value to get Eb/N0 per information bit.
    pub overall_eb_n0_shift_db: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub run: RunInfo,
    pub rates: RateInfo,
    pub config: RunConfig,
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.out_dir).join(name)
}

/// Writes `name` and its `name.meta.toml` sidecar into the output directory.
pub fn emit(command: &str, cfg: &RunConfig, frame: &FrameConfig, name: &str, body: &[u8]) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| runtime(format!("cannot create {}: {e}", cfg.out_dir)))?;
    let path = out_path(cfg, name);
    fs::write(&path, body).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    let r = frame.rates();
    let sidecar = Sidecar {
        run: RunInfo {
            command: command.to_string(),
            artifact: name.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: stnc_core::VERSION.to_string(),
            seed: cfg.seed,
            threads_used: rayon::current_num_threads(),
        },
        rates: RateInfo {
            cooperative: r.cooperative,
            overall: r.overall,
            energy_per_coded_bit: r.energy_per_coded_bit,
            network: frame.network_rate(),
            overall_eb_n0_shift_db: r.overall_eb_n0_db(0.0),
        },
        config: cfg.clone(),
    };
    let text = toml::to_string(&sidecar).map_err(runtime)?;
    let meta = out_path(cfg, &format!("{name}.meta.toml"));
    fs::write(&meta, text).map_err(|e| runtime(format!("cannot write {}: {e}", meta.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn ber(command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let frame = cfg.frame_config()?;
    let sweep = cfg.sweep_config()?;
    let points = ber_sweep(&frame, &cfg.channel, &sweep).map_err(runtime)?;
    let mut body = Vec::new();
    write_ber(&mut body, &points).map_err(runtime)?;
    emit(command, cfg, &frame, BER_FILE, &body)
}

pub fn exit(command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let frame = cfg.frame_config()?;
    let e = &cfg.exit;
    let mut curves = Vec::new();
    if e.decoder.includes(DecoderKind::Inner) {
        for &db in &e.eb_n0_db {
            let ch = ChannelConfig { eb_n0_db: db, ..cfg.channel };
            curves.push(exit_inner(&frame, &ch, &e.i_a, e.trials, cfg.seed).map_err(runtime)?);
        }
    }
    if e.decoder.includes(DecoderKind::Outer) {
        curves.push(exit_outer(&frame.rs, frame.abp, &e.i_a, e.trials, cfg.seed).map_err(runtime)?);
    }
    let mut body = Vec::new();
    write_exit(&mut body, &curves).map_err(runtime)?;
    emit(command, cfg, &frame, EXIT_FILE, &body)
}

fn unpack_lsb_first(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| (b >> i) & 1)).collect()
}

fn pack_lsb_first(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8).map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b & 1) << i))).collect()
}

/// Stacked frame (user rows then relay parity) for a message file whose bits,
/// LSB first, fill MU1's frame and then MU2's; short input is zero-padded.
pub fn encode_message(frame: &FrameConfig, bytes: &[u8]) -> Result<Vec<Vec<u8>>, CliError> {
    let (b0, b1) = (frame.message_bits(0), frame.message_bits(1));
    let mut bits = unpack_lsb_first(bytes);
    if bits.len() > b0 + b1 {
        if bits[b0 + b1..].iter().any(|&b| b != 0) || bits.len() - (b0 + b1) >= 8 {
            return Err(runtime(format!(
                "message of {} bytes exceeds frame capacity of {} bits",
                bytes.len(),
                b0 + b1
            )));
        }
        bits.truncate(b0 + b1);
    }
    bits.resize(b0 + b1, 0);
    let f0 = build_source_frame(frame, 0, &bits[..b0]).map_err(runtime)?;
    let f1 = build_source_frame(frame, 1, &bits[b0..]).map_err(runtime)?;
    let parity = relay_network_encode(frame, [&f0, &f1]).map_err(runtime)?;
    let frames = [&f0, &f1];
    let mut rows: Vec<Vec<u8>> = frame.row_order().into_iter().map(|(s, r)| frames[s][r].clone()).collect();
    rows.extend(parity);
    Ok(rows)
}

pub fn encode(command: &str, cfg: &RunConfig, input: &Path) -> Result<(), CliError> {
    let frame = cfg.frame_config()?;
    let bytes = fs::read(input).map_err(|e| runtime(format!("cannot read {}: {e}", input.display())))?;
    let rows = encode_message(&frame, &bytes)?;
    let mut body = Vec::new();
    write_bits(&mut body, &rows, &frame.row_labels()).map_err(runtime)?;
    emit(command, cfg, &frame, FRAME_FILE, &body)
}

/// Reads either dump kind; bit dumps become ±`llr_clip` observations.
fn read_observations(frame: &FrameConfig, bytes: &[u8]) -> Result<LlrMatrix, CliError> {
    let llr = if bytes.starts_with(LLR_MAGIC) {
        read_llr(&mut &bytes[..]).map_err(runtime)?
    } else if bytes.starts_with(BIT_MAGIC) {
        let (rows, labels) = read_bits(&mut &bytes[..]).map_err(runtime)?;
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flatten().map(|&b| frame.abp.llr_clip * antipodal(b)).collect();
        LlrMatrix::from_data(rows.len(), cols, data, labels).map_err(runtime)?
    } else {
        return Err(runtime("input is neither an LLR nor a bit dump"));
    };
    if llr.rows() != frame.nn() || llr.cols() != frame.row_bits() || llr.labels() != frame.row_labels() {
        return Err(runtime(format!(
            "dump is {}x{}, configuration expects {}x{} with matching row labels",
            llr.rows(),
            llr.cols(),
            frame.nn(),
            frame.row_bits()
        )));
    }
    Ok(llr)
}

pub fn decode(command: &str, cfg: &RunConfig, input: &Path) -> Result<(), CliError> {
    let frame = cfg.frame_config()?;
    let bytes = fs::read(input).map_err(|e| runtime(format!("cannot read {}: {e}", input.display())))?;
    let llr = read_observations(&frame, &bytes)?;
    let report = JointDecoder::new(&frame).map_err(runtime)?.decode(&llr).map_err(runtime)?;
    let [m0, m1] = report.messages();
    let bits: Vec<u8> = m0.iter().chain(m1).copied().collect();
    println!(
        "{} joint iterations, all codewords decoded: {}",
        report.iterations_used,
        report.all_decoded()
    );
    emit(command, cfg, &frame, DECODED_FILE, &pack_lsb_first(&bits))
}
