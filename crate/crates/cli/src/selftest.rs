//! Fast code paths against brute-force oracles, on the configured code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stnc_core::analysis::j_function;
use stnc_core::marc::{xor_combine, JointDecoder};
use stnc_core::oracle::{
    gaussian_llr_mi_by_quadrature, map_extrinsic_by_enumeration, rsc_parity_by_register, xor_posterior_by_enumeration,
};
use stnc_core::{simulate_round, symbols_to_bits, ChannelConfig, FieldElement, FrameConfig, RelayMode, RsCode};

use crate::commands::emit;
use crate::config::RunConfig;
use crate::CliError;

pub const SELFTEST_FILE: &str = "selftest.txt";

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Schoolbook multiplication in GF(2)[x] reduced modulo `poly`.
fn gf_mul_by_shifting(a: u16, b: u16, m: u32, poly: u32) -> u16 {
    let (mut a, mut b, mut acc) = (a as u32, b as u32, 0u32);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << m) != 0 {
            a ^= poly;
        }
    }
    acc as u16
}

fn field_arithmetic(rs: &RsCode, rng: &mut ChaCha8Rng) -> Check {
    let f = rs.field();
    let q = f.size() as u16;
    let pairs: Vec<(u16, u16)> = if q <= 256 {
        (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect()
    } else {
        (0..100_000).map(|_| (rng.random_range(0..q), rng.random_range(0..q))).collect()
    };
    let mul_bad = pairs
        .iter()
        .filter(|&&(a, b)| f.mul(FieldElement(a), FieldElement(b)).0 != gf_mul_by_shifting(a, b, f.m(), f.primitive_poly()))
        .count();
    let inv_bad = (1..q)
        .filter(|&a| f.inv(FieldElement(a)).map(|i| f.mul(FieldElement(a), i) != FieldElement::ONE).unwrap_or(true))
        .count();
    Check {
        name: "gf_mul_inv",
        pass: mul_bad == 0 && inv_bad == 0,
        detail: format!("{} products, {mul_bad} mismatches, {inv_bad} bad inverses", pairs.len()),
    }
}

fn random_codeword(rs: &RsCode, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let q = rs.field().size() as u16;
    let msg: Vec<FieldElement> = (0..rs.k()).map(|_| FieldElement(rng.random_range(0..q))).collect();
    rs.encode(&msg).expect("message length is k")
}

fn rs_bounded_distance(rs: &RsCode, rng: &mut ChaCha8Rng) -> Check {
    let q = rs.field().size() as u16;
    let trials = 500;
    let corrected = (0..trials)
        .filter(|_| {
            let cw = random_codeword(rs, rng);
            let mut rx = cw.clone();
            let mut positions: Vec<usize> = (0..rs.n()).collect();
            for i in (1..positions.len()).rev() {
                positions.swap(i, rng.random_range(0..=i));
            }
            for &p in &positions[..rng.random_range(0..=rs.t())] {
                rx[p] = FieldElement(rx[p].0 ^ rng.random_range(1..q));
            }
            rs.bm_decode(&rx).map(|d| d.codeword == cw).unwrap_or(false)
        })
        .count();
    Check {
        name: "rs_bm_up_to_t",
        pass: corrected == trials,
        detail: format!("{corrected}/{trials} words with <= {} symbol errors corrected", rs.t()),
    }
}

fn rs_binary_image(rs: &RsCode, rng: &mut ChaCha8Rng) -> Check {
    let h = rs.binary_parity_check().matrix;
    let rank = h.rank();
    let full = rs.redundancy() * rs.m();
    let annihilated = (0..200).filter(|_| h.annihilates(&symbols_to_bits(&random_codeword(rs, rng), rs.m()))).count();
    Check {
        name: "rs_binary_parity_check",
        pass: rank == full && annihilated == 200,
        detail: format!("rank {rank}/{full}, {annihilated}/200 codewords annihilated"),
    }
}

fn rsc_encoder(frame: &FrameConfig, rng: &mut ChaCha8Rng) -> Check {
    let c = &frame.conv;
    let mismatches = (0..200)
        .filter(|_| {
            let bits: Vec<u8> = (0..48).map(|_| rng.random_range(0..2u8)).collect();
            let fast: Vec<u8> = c.encode(&bits);
            fast != rsc_parity_by_register(c.feedback(), c.feedforward(), &bits)
        })
        .count();
    Check {
        name: "rsc_parity",
        pass: mismatches == 0,
        detail: format!("200 length-48 inputs, {mismatches} mismatches"),
    }
}

fn bcjr(frame: &FrameConfig, rng: &mut ChaCha8Rng) -> Check {
    let c = &frame.conv;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut draw = || (0..8).map(|_| rng.random_range(-6.0..6.0)).collect::<Vec<f64>>();
        let (sys, par, pri) = (draw(), draw(), draw());
        let fast = c.bcjr(&sys, &par, &pri).extrinsic_systematic;
        let slow = map_extrinsic_by_enumeration(c.feedback(), c.feedforward(), &sys, &par, &pri);
        worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    Check { name: "bcjr_vs_enumeration", pass: worst < 1e-9, detail: format!("max |diff| = {worst:.2e}") }
}

fn xor(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut l = || rng.random_range(-12.0..12.0);
        let (d, p, r) = (l(), l(), l());
        worst = worst.max((xor_combine(d, p, r) - xor_posterior_by_enumeration(d, p, r)).abs());
    }
    Check { name: "xor_vs_enumeration", pass: worst < 1e-12, detail: format!("max |diff| = {worst:.2e}") }
}

fn j_curve() -> Check {
    let worst = [0.3, 1.0, 2.0, 3.5, 6.0]
        .iter()
        .map(|&s| (j_function(s) - gaussian_llr_mi_by_quadrature(s)).abs())
        .fold(0.0, f64::max);
    Check { name: "j_vs_quadrature", pass: worst < 1e-6, detail: format!("max |diff| = {worst:.2e}") }
}

fn noiseless_frames(frame: &FrameConfig, seed: u64) -> Result<Check, CliError> {
    let cfg = FrameConfig { relay_mode: RelayMode::Ideal, ..frame.clone() };
    let dec = JointDecoder::new(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut errors = 0;
    for t in 0..4 {
        let round = simulate_round(&cfg, &ChannelConfig::noiseless(), seed, t)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let report = dec.decode(&round.llr).map_err(|e| CliError::Runtime(e.to_string()))?;
        errors += report.bit_errors_at(report.iterations_used, &round.truth.messages).iter().sum::<usize>();
    }
    Ok(Check {
        name: "noiseless_joint_decode",
        pass: errors == 0,
        detail: format!("4 frames, {errors} bit errors"),
    })
}

pub fn run(command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let frame = cfg.frame_config()?;
    let rs = &frame.rs;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let checks = vec![
        field_arithmetic(rs, &mut rng),
        rs_bounded_distance(rs, &mut rng),
        rs_binary_image(rs, &mut rng),
        rsc_encoder(&frame, &mut rng),
        bcjr(&frame, &mut rng),
        xor(&mut rng),
        j_curve(),
        noiseless_frames(&frame, cfg.seed)?,
    ];
    let mut body = String::new();
    for c in &checks {
        let line = format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        print!("{line}");
        body.push_str(&line);
    }
    emit(command, cfg, &frame, SELFTEST_FILE, body.as_bytes())?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::Runtime(format!("selftest: {failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
