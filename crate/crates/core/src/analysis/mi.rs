//! Mutual information between bits and LLRs, and consistent Gaussian priors.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::llr::antipodal;

/// Upper end of the σ search; `J(12) > 1 − 1e-8`.
pub const SIGMA_MAX: f64 = 12.0;

/// Consistent Gaussian a-priori model `a = μ·x + n`, `n ~ N(0, σ²)`, `μ = σ²/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AprioriModel {
    pub sigma: f64,
}

impl AprioriModel {
    pub fn new(sigma: f64) -> Self {
        AprioriModel { sigma: sigma.clamp(0.0, SIGMA_MAX) }
    }

    /// Model whose LLRs carry mutual information `ia` about the bits.
    pub fn for_information(ia: f64) -> Self {
        AprioriModel::new(j_inverse(ia))
    }

    pub fn mu(&self) -> f64 {
        self.sigma * self.sigma / 2.0
    }

    pub fn sample(&self, bits: &[u8], rng: &mut impl Rng) -> Vec<f64> {
        if self.sigma == 0.0 {
            return vec![0.0; bits.len()];
        }
        let noise = Normal::new(0.0, self.sigma).expect("finite sigma");
        bits.iter().map(|&b| self.mu() * antipodal(b) + noise.sample(rng)).collect()
    }
}

/// `log2(1 + e^{-z})` without overflow.
#[inline]
fn log2_1p_exp_neg(z: f64) -> f64 {
    let v = if z > 0.0 { (-z).exp().ln_1p() } else { -z + z.exp().ln_1p() };
    v / std::f64::consts::LN_2
}

/// `J(σ) = 1 − E[log2(1 + e^{−a})]` for `a ~ N(σ²/2, σ²)`, by Simpson's rule.
pub fn j_function(sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let mu = sigma * sigma / 2.0;
    let half_width = 10.0 * sigma;
    let steps = 2000;
    let h = 2.0 * half_width / steps as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut acc = 0.0;
    for i in 0..=steps {
        let u = -half_width + i as f64 * h;
        let w = match i {
            0 => 1.0,
            i if i == steps => 1.0,
            i if i % 2 == 1 => 4.0,
            _ => 2.0,
        };
        acc += w * norm * (-(u * u) / (2.0 * sigma * sigma)).exp() * log2_1p_exp_neg(mu + u);
    }
    (1.0 - acc * h / 3.0).clamp(0.0, 1.0)
}

/// Inverse of [`j_function`] by bisection, capped at [`SIGMA_MAX`].
pub fn j_inverse(info: f64) -> f64 {
    if info <= 0.0 {
        return 0.0;
    }
    if info >= j_function(SIGMA_MAX) {
        return SIGMA_MAX;
    }
    let (mut lo, mut hi) = (0.0, SIGMA_MAX);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if j_function(mid) < info {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A-priori LLRs for `bits` carrying mutual information `ia`.
pub fn gen_apriori(bits: &[u8], ia: f64, rng: &mut impl Rng) -> Vec<f64> {
    AprioriModel::for_information(ia).sample(bits, rng)
}

/// Averaging estimator `1 − E[log2(1 + e^{−x·L})]`, clamped to `[0, 1]`.
pub fn mutual_information(llr: &[f64], bits: &[u8]) -> f64 {
    assert_eq!(llr.len(), bits.len(), "llr/bit length");
    if llr.is_empty() {
        return 0.0;
    }
    let loss: f64 = llr.iter().zip(bits).map(|(&l, &b)| log2_1p_exp_neg(antipodal(b) * l)).sum();
    (1.0 - loss / llr.len() as f64).clamp(0.0, 1.0)
}

/// Histogram estimate of `½ Σ_x ∫ f(ξ|x) log2(2 f(ξ|x) / (f(ξ|+1) + f(ξ|−1))) dξ`.
pub fn mutual_information_histogram(llr: &[f64], bits: &[u8], bins: usize) -> f64 {
    assert_eq!(llr.len(), bits.len(), "llr/bit length");
    assert!(bins > 0);
    let lo = llr.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = llr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return 0.0;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![[0usize; 2]; bins];
    let mut totals = [0usize; 2];
    for (&l, &b) in llr.iter().zip(bits) {
        let k = (((l - lo) / width) as usize).min(bins - 1);
        counts[k][(b & 1) as usize] += 1;
        totals[(b & 1) as usize] += 1;
    }
    if totals[0] == 0 || totals[1] == 0 {
        return 0.0;
    }
    let mut info = 0.0;
    for c in &counts {
        let p = [c[0] as f64 / totals[0] as f64, c[1] as f64 / totals[1] as f64];
        for x in 0..2 {
            if p[x] > 0.0 {
                info += 0.5 * p[x] * (2.0 * p[x] / (p[0] + p[1])).log2();
            }
        }
    }
    info.clamp(0.0, 1.0)
}
