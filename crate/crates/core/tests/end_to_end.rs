use stnc_core::analysis::{ber_sweep, SweepConfig};
use stnc_core::{ChannelConfig, FrameConfig};

#[test]
fn rs15_7_at_12_db_stays_below_one_percent_fer() {
    let cfg = FrameConfig { max_joint_iterations: 5, ..FrameConfig::default_15_7() };
    let sweep = SweepConfig {
        eb_n0_db: vec![12.0],
        iterations: vec![5],
        min_frame_errors: u64::MAX,
        max_frames: 1000,
        seed: 12,
        ..SweepConfig::default()
    };
    let p = ber_sweep(&cfg, &ChannelConfig::default(), &sweep).unwrap();
    assert_eq!(p[0].trials, 1000);
    assert!(p[0].fer < 1e-2, "fer {}", p[0].fer);
}

/// Strict per-step monotonicity does not hold on every seed: a few frames that
/// never decode settle into short limit cycles worth a handful of bits. No
/// later iteration may be significantly worse than an earlier one, and the
/// full run must beat the first pass.
#[test]
fn rs31_25_ber_does_not_grow_with_iterations_at_7_db() {
    let cfg = FrameConfig::default_31_25();
    let sweep = SweepConfig {
        eb_n0_db: vec![7.0],
        iterations: (1..=20).collect(),
        min_frame_errors: u64::MAX,
        max_frames: 200,
        seed: 7,
        ..SweepConfig::default()
    };
    let p = ber_sweep(&cfg, &ChannelConfig::default(), &sweep).unwrap();
    for (i, early) in p.iter().enumerate() {
        for late in &p[i + 1..] {
            assert!(!early.significantly_below(late), "iteration {} vs {}", early.iteration, late.iteration);
        }
    }
    assert!(p[19].significantly_below(&p[0]), "{} vs {}", p[19].ber, p[0].ber);
}
