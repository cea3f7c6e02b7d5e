//! Brute-force reference computations.
//!
//! These deliberately avoid the fast code paths (trellis tables, forward-backward
//! recursions, closed-form combining) so that the fast paths can be checked
//! against them. They are exponential or quadrature-heavy and meant for tests
//! and the `selftest` command only.

/// Parity stream of a recursive systematic encoder by explicit register shifting.
///
/// `feedback` and `feedforward` are generator bit patterns with the most
/// significant bit on the current tap.
pub fn rsc_parity_by_register(feedback: u32, feedforward: u32, bits: &[u8]) -> Vec<u8> {
    let memory = (32 - feedback.max(feedforward).leading_zeros()) as usize - 1;
    let tap = |poly: u32, i: usize| (poly >> (memory - i)) & 1 == 1;
    // history[i] holds w_{k-i}; history[0] is the value being computed.
    let mut history = vec![0u8; memory + 1];
    let mut out = Vec::with_capacity(bits.len());
    for &x in bits {
        for i in (1..=memory).rev() {
            history[i] = history[i - 1];
        }
        let mut w = x & 1;
        for i in 1..=memory {
            if tap(feedback, i) {
                w ^= history[i];
            }
        }
        history[0] = w;
        let mut p = 0;
        for (i, &h) in history.iter().enumerate() {
            if tap(feedforward, i) {
                p ^= h;
            }
        }
        out.push(p);
    }
    out
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Symbol-wise MAP extrinsic of an unterminated RSC code by summing over all
/// 2^n information sequences.
pub fn map_extrinsic_by_enumeration(
    feedback: u32,
    feedforward: u32,
    systematic_llr: &[f64],
    parity_llr: &[f64],
    prior_llr: &[f64],
) -> Vec<f64> {
    let n = systematic_llr.len();
    assert!(n <= 20, "enumeration is exponential in n");
    let sign = |b: u8| if b == 0 { 1.0 } else { -1.0 };
    let mut zero_terms: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut one_terms: Vec<Vec<f64>> = vec![Vec::new(); n];
    for word in 0u32..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|k| ((word >> k) & 1) as u8).collect();
        let parity = rsc_parity_by_register(feedback, feedforward, &bits);
        let metric: f64 = (0..n)
            .map(|k| {
                0.5 * sign(bits[k]) * (systematic_llr[k] + prior_llr[k]) + 0.5 * sign(parity[k]) * parity_llr[k]
            })
            .sum();
        for k in 0..n {
            if bits[k] == 0 {
                zero_terms[k].push(metric);
            } else {
                one_terms[k].push(metric);
            }
        }
    }
    (0..n)
        .map(|k| log_sum_exp(&zero_terms[k]) - log_sum_exp(&one_terms[k]) - systematic_llr[k] - prior_llr[k])
        .collect()
}

/// Posterior LLR of `x1` given independent observations of `x1`, `x2` and
/// `x3 = x1 ⊕ x2`, by enumerating the four consistent configurations.
pub fn xor_posterior_by_enumeration(direct: f64, partner: f64, relay: f64) -> f64 {
    // p(bit = 0) = e^{L/2} / (e^{L/2} + e^{-L/2}); common factors cancel.
    let half = |l: f64, b: u8| if b == 0 { l / 2.0 } else { -l / 2.0 };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            let x3 = x1 ^ x2;
            let m = half(direct, x1) + half(partner, x2) + half(relay, x3);
            if x1 == 0 {
                num.push(m);
            } else {
                den.push(m);
            }
        }
    }
    log_sum_exp(&num) - log_sum_exp(&den)
}

/// Mutual information between a BPSK bit and a consistent Gaussian LLR with
/// standard deviation `sigma`, by trapezoidal quadrature of the definition
/// I = ½ Σ_x ∫ f(ξ|x) log2( 2 f(ξ|x) / (f(ξ|−1) + f(ξ|+1)) ) dξ.
pub fn gaussian_llr_mi_by_quadrature(sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let mu = sigma * sigma / 2.0;
    let pdf = |xi: f64, mean: f64| {
        (-(xi - mean).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let lo = -mu - 12.0 * sigma;
    let hi = mu + 12.0 * sigma;
    let steps = 40_000;
    let h = (hi - lo) / steps as f64;
    let mut total = 0.0;
    for i in 0..=steps {
        let xi = lo + i as f64 * h;
        let fp = pdf(xi, mu);
        let fm = pdf(xi, -mu);
        let mut v = 0.0;
        for f in [fp, fm] {
            if f > 0.0 {
                v += 0.5 * f * (2.0 * f / (fp + fm)).log2();
            }
        }
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        total += w * v;
    }
    total * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_reduces_to_boxplus_shape() {
        // With no direct observation the posterior is symmetric in the partner/relay roles.
        let a = xor_posterior_by_enumeration(0.0, 1.3, -2.1);
        let b = xor_posterior_by_enumeration(0.0, -2.1, 1.3);
        assert!((a - b).abs() < 1e-14);
        assert!(a < 0.0);
    }

    #[test]
    fn quadrature_limits() {
        assert_eq!(gaussian_llr_mi_by_quadrature(0.0), 0.0);
        assert!(gaussian_llr_mi_by_quadrature(0.01) < 1e-3);
        assert!(gaussian_llr_mi_by_quadrature(12.0) > 0.9999);
    }
}
