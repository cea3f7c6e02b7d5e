use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use std::hint::black_box;

use stnc_bench::{noisy_codeword, rng, uniform_llrs};
use stnc_core::{
    abp_decode, simulate_round, AbpConfig, ChannelConfig, ConvCode, FieldElement, FrameConfig, RsCode,
};
use stnc_core::marc::JointDecoder;

fn gf(c: &mut Criterion) {
    let field = RsCode::rs_31_25().field().clone();
    let mut r = rng(1);
    let pairs: Vec<(FieldElement, FieldElement)> =
        (0..1024).map(|_| (FieldElement(r.random_range(1..32)), FieldElement(r.random_range(1..32)))).collect();
    c.bench_function("gf32_mul_1024", |b| {
        b.iter(|| pairs.iter().fold(FieldElement(0), |acc, &(x, y)| field.add(acc, field.mul(x, y))))
    });
    c.bench_function("gf32_inv_1024", |b| {
        b.iter(|| pairs.iter().map(|&(x, _)| field.inv(x).unwrap().0 as u32).sum::<u32>())
    });
}

fn rs(c: &mut Criterion) {
    let code = RsCode::rs_31_25();
    let mut r = rng(2);
    let msg: Vec<FieldElement> = (0..code.k()).map(|_| FieldElement(r.random_range(0..32))).collect();
    let cw = code.encode(&msg).unwrap();
    let mut rx = cw.clone();
    rx[3] = FieldElement(rx[3].0 ^ 7);
    rx[20] = FieldElement(rx[20].0 ^ 1);
    c.bench_function("rs31_25_encode", |b| b.iter(|| code.encode(black_box(&msg)).unwrap()));
    c.bench_function("rs31_25_bm_two_errors", |b| b.iter(|| code.bm_decode(black_box(&rx)).unwrap()));
}

fn bcjr(c: &mut Criterion) {
    let code = ConvCode::rsc_7_5();
    let mut r = rng(3);
    // One column of the standard 16-row stack, unpunctured.
    let (sys, par, pri) = (uniform_llrs(16, 4.0, &mut r), uniform_llrs(16, 4.0, &mut r), uniform_llrs(16, 4.0, &mut r));
    c.bench_function("bcjr_rsc75_len16", |b| b.iter(|| code.bcjr(black_box(&sys), &par, &pri)));
    let long: Vec<Vec<f64>> = (0..3).map(|_| uniform_llrs(1024, 4.0, &mut r)).collect();
    c.bench_function("bcjr_rsc75_len1024", |b| b.iter(|| code.bcjr(black_box(&long[0]), &long[1], &long[2])));
}

fn abp(c: &mut Criterion) {
    let mut group = c.benchmark_group("abp");
    for (name, code) in [("rs15_7", RsCode::rs_15_7()), ("rs31_25", RsCode::rs_31_25())] {
        let mut r = rng(4);
        let llr = noisy_codeword(&code, 2.5, &mut r);
        let zeros = vec![0.0; llr.len()];
        for (label, cfg) in [("joint", AbpConfig::joint()), ("standalone", AbpConfig::standalone())] {
            group.bench_function(format!("{name}_{label}"), |b| {
                b.iter(|| abp_decode(&code, black_box(&llr), &zeros, cfg))
            });
        }
    }
    group.finish();
}

fn joint(c: &mut Criterion) {
    let mut group = c.benchmark_group("joint_decode");
    group.sample_size(20);
    for (name, cfg, db) in [("rs15_7_2db", FrameConfig::default_15_7(), 2.0), ("rs31_25_5db", FrameConfig::default_31_25(), 5.0)] {
        let dec = JointDecoder::new(&cfg).unwrap();
        let ch = ChannelConfig::at(db);
        let mut t = 0;
        group.bench_function(name, |b| {
            b.iter_batched(
                || {
                    t += 1;
                    simulate_round(&cfg, &ch, 9, t).unwrap().llr
                },
                |llr| dec.decode(&llr).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, gf, rs, bcjr, abp, joint);
criterion_main!(benches);
