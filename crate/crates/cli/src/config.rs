//! Run configuration: TOML file, dotted `--set` overrides, cross-field checks.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stnc_core::analysis::{DecoderKind, Scheme, SweepConfig};
use stnc_core::{AbpConfig, ChannelConfig, ConvCode, Field, FrameConfig, PuncturePattern, RelayMode, RsCode};
use toml::{Table, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CodePreset {
    #[default]
    #[serde(rename = "rs31-25")]
    Rs31_25,
    #[serde(rename = "rs15-7")]
    Rs15_7,
    #[serde(rename = "custom")]
    Custom,
}

/// Outer Reed-Solomon code. `n`, `k`, `m` and `primitive_poly` are only
/// consulted for `preset = "custom"`; with a preset they must be absent or agree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeSection {
    pub preset: CodePreset,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<u32>,
    pub primitive_poly: Option<u32>,
}

/// Relay convolutional code, generators in octal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvSection {
    pub feedback: String,
    pub feedforward: String,
    /// Parity keep mask, one entry (0 or 1) per stacked row, repeated.
    pub puncture: Vec<u8>,
}

impl Default for ConvSection {
    fn default() -> Self {
        ConvSection { feedback: "7".into(), feedforward: "5".into(), puncture: vec![1, 0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub l1: usize,
    pub l2: usize,
    pub relay_mode: RelayMode,
    pub max_iterations: usize,
    pub freeze_decoded_rows: bool,
    pub interleaver_seeds: [u64; 2],
}

impl Default for FrameSection {
    fn default() -> Self {
        let f = FrameConfig::default_31_25();
        FrameSection {
            l1: f.l1,
            l2: f.l2,
            relay_mode: f.relay_mode,
            max_iterations: f.max_joint_iterations,
            freeze_decoded_rows: f.freeze_decoded_rows,
            interleaver_seeds: f.interleaver_seeds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerSection {
    pub eb_n0_db: Vec<f64>,
    /// Iterations to report; empty means every iteration up to `frame.max_iterations`.
    pub iterations: Vec<usize>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub batch: u64,
    pub scheme: Scheme,
}

impl Default for BerSection {
    fn default() -> Self {
        let s = SweepConfig::default();
        BerSection {
            eb_n0_db: s.eb_n0_db,
            iterations: Vec::new(),
            min_frame_errors: s.min_frame_errors,
            max_frames: s.max_frames,
            batch: s.batch,
            scheme: s.scheme,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExitSelection {
    Inner,
    Outer,
    #[default]
    Both,
}

impl ExitSelection {
    pub fn includes(self, kind: DecoderKind) -> bool {
        matches!(
            (self, kind),
            (ExitSelection::Both, _) | (ExitSelection::Inner, DecoderKind::Inner) | (ExitSelection::Outer, DecoderKind::Outer)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExitSection {
    pub decoder: ExitSelection,
    pub i_a: Vec<f64>,
    /// Channel Eb/N0 of each inner curve.
    pub eb_n0_db: Vec<f64>,
    pub trials: usize,
}

impl Default for ExitSection {
    fn default() -> Self {
        ExitSection {
            decoder: ExitSelection::Both,
            i_a: (0..=10).map(|i| i as f64 / 10.0).collect(),
            eb_n0_db: vec![2.0, 4.0, 6.0],
            trials: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses the available parallelism.
    pub threads: usize,
    pub out_dir: String,
    pub code: CodeSection,
    pub conv: ConvSection,
    pub frame: FrameSection,
    pub abp: AbpConfig,
    pub channel: ChannelConfig,
    pub ber: BerSection,
    pub exit: ExitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            threads: 0,
            out_dir: "out".into(),
            code: CodeSection::default(),
            conv: ConvSection::default(),
            frame: FrameSection::default(),
            abp: AbpConfig::joint(),
            channel: ChannelConfig::default(),
            ber: BerSection::default(),
            exit: ExitSection::default(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Parses the right-hand side of `--set key=value` as a TOML value, falling
/// back to a bare string so that `code.preset=rs15-7` works unquoted.
pub fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Writes `value` at a dotted path, creating intermediate tables.
pub fn set_dotted(root: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(format!("malformed key '{key}'")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut table = root;
    for p in path {
        let entry = table.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        table = match entry {
            Value::Table(t) => t,
            _ => return Err(config_err(format!("'{p}' in '{key}' is not a section"))),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

impl RunConfig {
    /// Defaults, then the file, then each `key=value` override in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = Table::try_from(RunConfig::default()).map_err(config_err)?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            let parsed: Table = toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            merge(&mut table, parsed);
        }
        for o in overrides {
            let (key, raw) =
                o.split_once('=').ok_or_else(|| config_err(format!("override '{o}' is not key=value")))?;
            set_dotted(&mut table, key.trim(), parse_value(raw.trim()))?;
        }
        let cfg: RunConfig = Value::Table(table).try_into().map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rs_code(&self) -> Result<RsCode, CliError> {
        let c = &self.code;
        let (n, k, default_m) = match c.preset {
            CodePreset::Rs31_25 => (31, 25, 5),
            CodePreset::Rs15_7 => (15, 7, 4),
            CodePreset::Custom => {
                let n = c.n.ok_or_else(|| config_err("code.n is required for a custom code"))?;
                let k = c.k.ok_or_else(|| config_err("code.k is required for a custom code"))?;
                let m = (n + 1).trailing_zeros();
                if n < 3 || (n + 1) != 1 << m {
                    return Err(config_err(format!("code.n = {n} is not 2^m - 1")));
                }
                (n, k, m)
            }
        };
        if c.preset != CodePreset::Custom {
            if c.n.is_some_and(|v| v != n) || c.k.is_some_and(|v| v != k) {
                return Err(config_err(format!("code.n/code.k disagree with preset ({n},{k})")));
            }
        }
        if let Some(m) = c.m {
            if m != default_m {
                return Err(config_err(format!("code.m = {m} inconsistent with n = {n}")));
            }
        }
        let field = match (c.preset, c.primitive_poly) {
            (CodePreset::Rs31_25, None) => return Ok(RsCode::rs_31_25()),
            (CodePreset::Rs15_7, None) => return Ok(RsCode::rs_15_7()),
            (_, Some(poly)) => Field::new(default_m, poly),
            (_, None) => Field::with_default_poly(default_m),
        }
        .map_err(config_err)?;
        RsCode::new(field, n, k).map_err(config_err)
    }

    pub fn frame_config(&self) -> Result<FrameConfig, CliError> {
        let conv = ConvCode::from_octal(&self.conv.feedback, &self.conv.feedforward).map_err(config_err)?;
        if let Some(bad) = self.conv.puncture.iter().find(|&&b| b > 1) {
            return Err(config_err(format!("conv.puncture entries must be 0 or 1, got {bad}")));
        }
        let puncture =
            PuncturePattern::new(self.conv.puncture.iter().map(|&b| b == 1).collect()).map_err(config_err)?;
        let f = &self.frame;
        let cfg = FrameConfig {
            l1: f.l1,
            l2: f.l2,
            rs: self.rs_code()?,
            conv,
            puncture,
            interleaver_seeds: f.interleaver_seeds,
            relay_mode: f.relay_mode,
            max_joint_iterations: f.max_iterations,
            abp: self.abp,
            freeze_decoded_rows: f.freeze_decoded_rows,
        };
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        let b = &self.ber;
        let iterations =
            if b.iterations.is_empty() { (1..=self.frame.max_iterations).collect() } else { b.iterations.clone() };
        if let Some(&i) = iterations.iter().find(|&&i| i > self.frame.max_iterations) {
            return Err(config_err(format!(
                "ber.iterations contains {i}, above frame.max_iterations = {}",
                self.frame.max_iterations
            )));
        }
        let sweep = SweepConfig {
            eb_n0_db: b.eb_n0_db.clone(),
            iterations,
            min_frame_errors: b.min_frame_errors,
            max_frames: b.max_frames,
            batch: b.batch,
            seed: self.seed,
            scheme: b.scheme,
        };
        sweep.validate().map_err(config_err)?;
        Ok(sweep)
    }

    /// Every cross-field check, so that a bad run fails before any simulation.
    pub fn validate(&self) -> Result<(), CliError> {
        self.frame_config()?;
        self.sweep_config()?;
        self.channel.validate().map_err(config_err)?;
        let e = &self.exit;
        if e.trials == 0 {
            return Err(config_err("exit.trials must be at least 1"));
        }
        if e.i_a.is_empty() || e.i_a.iter().any(|x| !(0.0..=1.0).contains(x)) || e.i_a.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(config_err("exit.i_a must be strictly increasing within [0, 1]"));
        }
        if e.eb_n0_db.iter().any(|v| !v.is_finite()) {
            return Err(config_err("exit.eb_n0_db must be finite"));
        }
        if e.decoder.includes(DecoderKind::Inner) && e.eb_n0_db.is_empty() {
            return Err(config_err("exit.eb_n0_db is empty but inner curves were requested"));
        }
        if self.out_dir.is_empty() {
            return Err(config_err("out_dir must not be empty"));
        }
        Ok(())
    }
}
