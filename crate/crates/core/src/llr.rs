//! Log-likelihood ratio helpers.
//!
//! LLRs are `ln P(bit = 0) / P(bit = 1)` throughout, with BPSK mapping bit 0 to +1.

/// Default magnitude cap on LLRs.
pub const DEFAULT_LLR_CLIP: f64 = 30.0;

#[inline]
pub fn clip(llr: f64, limit: f64) -> f64 {
    llr.clamp(-limit, limit)
}

/// Hard decision: 0 for non-negative LLR, 1 otherwise.
#[inline]
pub fn hard_bit(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

pub fn hard_decisions(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| hard_bit(l)).collect()
}

/// Antipodal value of a bit: 0 ↦ +1, 1 ↦ −1.
#[inline]
pub fn antipodal(bit: u8) -> f64 {
    if bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// LLR of the XOR of two independent bits, 2·atanh(tanh(a/2)·tanh(b/2)).
///
/// Evaluated as `sgn·min(|a|,|b|) + ln(1+e^{−|a+b|}) − ln(1+e^{−|a−b|})`,
/// which stays accurate when either input is large.
pub fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Jacobian logarithm ln(e^a + e^b), exact.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}
