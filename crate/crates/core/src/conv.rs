//! Recursive systematic convolutional network code: encoder, parity
//! puncturing, and a log-domain BCJR decoder.
//!
//! Generators are given as octal-style integers with the most significant bit
//! on the current register tap, e.g. `(0o7, 0o5)` for feedback 1+D+D² and
//! feedforward 1+D². The trellis starts in the zero state and is left
//! unterminated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llr::{antipodal, max_star};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvCode {
    feedback: u32,
    feedforward: u32,
    memory: usize,
    /// `next_state[2*s + u]`
    next_state: Vec<usize>,
    /// `parity[2*s + u]`
    parity: Vec<u8>,
}

impl ConvCode {
    pub fn new(feedback: u32, feedforward: u32) -> Result<Self> {
        if feedback < 2 || feedforward == 0 {
            return Err(Error::InvalidCode(format!(
                "generators ({feedback:o}, {feedforward:o}) must have memory >= 1"
            )));
        }
        let memory = (32 - feedback.max(feedforward).leading_zeros()) as usize - 1;
        if feedback >> memory != 1 {
            return Err(Error::InvalidCode(format!(
                "feedback {feedback:o} must have the current tap set at memory {memory}"
            )));
        }
        if memory > 12 {
            return Err(Error::InvalidCode(format!("memory {memory} too large")));
        }
        let states = 1usize << memory;
        let fb_taps = feedback & !(1 << memory);
        let mut next_state = vec![0; 2 * states];
        let mut parity = vec![0; 2 * states];
        for s in 0..states {
            for u in 0..2u32 {
                let w = u ^ ((fb_taps & s as u32).count_ones() & 1);
                let reg = (w << memory) | s as u32;
                parity[2 * s + u as usize] = ((feedforward & reg).count_ones() & 1) as u8;
                next_state[2 * s + u as usize] = (reg >> 1) as usize;
            }
        }
        Ok(ConvCode { feedback, feedforward, memory, next_state, parity })
    }

    /// The memory-2 code with feedback 7 and feedforward 5 (octal).
    pub fn rsc_7_5() -> Self {
        ConvCode::new(0o7, 0o5).expect("valid generators")
    }

    /// Parses octal digit strings such as `"7"` and `"5"`.
    pub fn from_octal(feedback: &str, feedforward: &str) -> Result<Self> {
        let parse = |s: &str| {
            u32::from_str_radix(s.trim().trim_start_matches("0o"), 8)
                .map_err(|_| Error::InvalidCode(format!("'{s}' is not an octal generator")))
        };
        ConvCode::new(parse(feedback)?, parse(feedforward)?)
    }

    pub fn feedback(&self) -> u32 {
        self.feedback
    }

    pub fn feedforward(&self) -> u32 {
        self.feedforward
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn constraint_length(&self) -> usize {
        self.memory + 1
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    /// Next state and parity bit for input `u` in state `s`.
    #[inline]
    pub fn transition(&self, s: usize, u: u8) -> (usize, u8) {
        let i = 2 * s + (u & 1) as usize;
        (self.next_state[i], self.parity[i])
    }

    /// Parity stream for `bits`, starting from the zero state.
    pub fn encode(&self, bits: &[u8]) -> Vec<u8> {
        let mut s = 0;
        bits.iter()
            .map(|&u| {
                let (next, p) = self.transition(s, u);
                s = next;
                p
            })
            .collect()
    }

    /// Log-domain BCJR with exact max*.
    ///
    /// `parity_llr` must already be depunctured to the systematic length. The
    /// extrinsic output excludes both the systematic channel LLR and the prior
    /// at each position.
    pub fn bcjr(&self, systematic_llr: &[f64], parity_llr: &[f64], prior_llr: &[f64]) -> SisoOutput {
        let n = systematic_llr.len();
        assert_eq!(parity_llr.len(), n, "parity LLR length");
        assert_eq!(prior_llr.len(), n, "prior LLR length");
        let ns = self.num_states();
        let ninf = f64::NEG_INFINITY;

        // Branch metric split: input part is shared by all edges with the same
        // input, parity part depends on the edge label.
        let branch = |k: usize, s: usize, u: u8| -> (usize, f64, f64) {
            let (next, p) = self.transition(s, u);
            let input = 0.5 * antipodal(u) * (systematic_llr[k] + prior_llr[k]);
            let par = 0.5 * antipodal(p) * parity_llr[k];
            (next, input, par)
        };

        let mut alpha = vec![ninf; (n + 1) * ns];
        alpha[0] = 0.0;
        for k in 0..n {
            let (cur, rest) = alpha.split_at_mut((k + 1) * ns);
            let cur = &cur[k * ns..];
            let nxt = &mut rest[..ns];
            for s in 0..ns {
                if cur[s] == ninf {
                    continue;
                }
                for u in 0..2u8 {
                    let (t, gi, gp) = branch(k, s, u);
                    nxt[t] = max_star(nxt[t], cur[s] + gi + gp);
                }
            }
            let top = nxt.iter().copied().fold(ninf, f64::max);
            for v in nxt.iter_mut() {
                *v -= top;
            }
        }

        let mut beta_next = vec![0.0; ns];
        let mut beta = vec![ninf; ns];
        let mut extrinsic = vec![0.0; n];
        for k in (0..n).rev() {
            let a = &alpha[k * ns..(k + 1) * ns];
            let mut num = [ninf; 2];
            beta.fill(ninf);
            for s in 0..ns {
                for u in 0..2u8 {
                    let (t, gi, gp) = branch(k, s, u);
                    num[u as usize] = max_star(num[u as usize], a[s] + gp + beta_next[t]);
                    beta[s] = max_star(beta[s], gi + gp + beta_next[t]);
                }
            }
            extrinsic[k] = num[0] - num[1];
            let top = beta.iter().copied().fold(ninf, f64::max);
            for (bn, b) in beta_next.iter_mut().zip(&beta) {
                *bn = b - top;
            }
        }

        let aposteriori = (0..n).map(|k| systematic_llr[k] + prior_llr[k] + extrinsic[k]).collect();
        SisoOutput { extrinsic_systematic: extrinsic, aposteriori }
    }
}

/// Output of the column decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct SisoOutput {
    pub extrinsic_systematic: Vec<f64>,
    pub aposteriori: Vec<f64>,
}

/// Free-function form of [`ConvCode::encode`].
pub fn rscc_encode(code: &ConvCode, bits: &[u8]) -> Vec<u8> {
    code.encode(bits)
}

/// Free-function form of [`ConvCode::bcjr`].
pub fn bcjr_decode(code: &ConvCode, systematic_llr: &[f64], parity_llr: &[f64], prior_llr: &[f64]) -> SisoOutput {
    code.bcjr(systematic_llr, parity_llr, prior_llr)
}

/// Periodic keep-mask applied to the parity stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PuncturePattern {
    mask: Vec<bool>,
}

impl TryFrom<Vec<u8>> for PuncturePattern {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        if v.iter().any(|&b| b > 1) {
            return Err(Error::InvalidConfig("puncture mask entries must be 0 or 1".into()));
        }
        PuncturePattern::new(v.into_iter().map(|b| b == 1).collect())
    }
}

impl From<PuncturePattern> for Vec<u8> {
    fn from(p: PuncturePattern) -> Vec<u8> {
        p.mask.into_iter().map(u8::from).collect()
    }
}

impl PuncturePattern {
    pub fn new(mask: Vec<bool>) -> Result<Self> {
        if !mask.iter().any(|&b| b) {
            return Err(Error::InvalidConfig("puncture mask must keep at least one position".into()));
        }
        Ok(PuncturePattern { mask })
    }

    /// No puncturing.
    pub fn none() -> Self {
        PuncturePattern { mask: vec![true] }
    }

    /// Keeps every other parity bit, starting with the first: a rate-1/2
    /// systematic code becomes rate 2/3.
    pub fn rate_two_thirds() -> Self {
        PuncturePattern { mask: vec![true, false] }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn period(&self) -> usize {
        self.mask.len()
    }

    #[inline]
    pub fn keeps(&self, i: usize) -> bool {
        self.mask[i % self.mask.len()]
    }

    /// Surviving positions out of a stream of `len`.
    pub fn kept_count(&self, len: usize) -> usize {
        (0..len).filter(|&i| self.keeps(i)).count()
    }

    pub fn puncture<T: Copy>(&self, stream: &[T]) -> Vec<T> {
        stream.iter().enumerate().filter(|(i, _)| self.keeps(*i)).map(|(_, &v)| v).collect()
    }

    /// Re-expands surviving LLRs to `full_len`, with 0 at punctured positions.
    pub fn depuncture(&self, llr: &[f64], full_len: usize) -> Result<Vec<f64>> {
        let expected = self.kept_count(full_len);
        if llr.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: llr.len() });
        }
        let mut it = llr.iter();
        Ok((0..full_len).map(|i| if self.keeps(i) { *it.next().unwrap() } else { 0.0 }).collect())
    }
}

pub fn puncture<T: Copy>(stream: &[T], pattern: &PuncturePattern) -> Vec<T> {
    pattern.puncture(stream)
}

pub fn depuncture(llr: &[f64], pattern: &PuncturePattern, full_len: usize) -> Result<Vec<f64>> {
    pattern.depuncture(llr, full_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_input_zero_parity() {
        assert!(ConvCode::rsc_7_5().encode(&[0; 40]).iter().all(|&p| p == 0));
    }

    #[test]
    fn impulse_response_matches_register_simulation() {
        let input = [1, 0, 0, 0, 0, 0];
        let reference = oracle::rsc_parity_by_register(0o7, 0o5, &input);
        assert_eq!(reference, vec![1, 1, 1, 0, 1, 1]);
        assert_eq!(ConvCode::rsc_7_5().encode(&input), reference);
        // Feedback keeps the response alive indefinitely.
        let mut long = vec![0u8; 60];
        long[0] = 1;
        assert!(ConvCode::rsc_7_5().encode(&long)[50..].contains(&1));
    }

    #[test]
    fn trellis_matches_register_for_other_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (fb, ff) in [(0o7, 0o5), (0o5, 0o7), (0o13, 0o15), (0o23, 0o35)] {
            let code = ConvCode::new(fb, ff).unwrap();
            let bits: Vec<u8> = (0..50).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(code.encode(&bits), oracle::rsc_parity_by_register(fb, ff, &bits));
        }
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(ConvCode::new(1, 1).is_err());
        assert!(ConvCode::new(0o3, 0o7).is_err());
        assert!(ConvCode::from_octal("7", "9").is_err());
        assert_eq!(ConvCode::from_octal("7", "5").unwrap(), ConvCode::rsc_7_5());
        assert_eq!(ConvCode::rsc_7_5().constraint_length(), 3);
    }

    #[test]
    fn puncture_identity_and_rate() {
        let none = PuncturePattern::new(vec![true, true]).unwrap();
        let s = [1u8, 0, 1, 1, 0];
        assert_eq!(none.puncture(&s), s.to_vec());
        let p = PuncturePattern::rate_two_thirds();
        // Two info bits produce two parity bits, one survives: rate 2/3.
        assert_eq!(p.kept_count(2), 1);
        assert_eq!(p.puncture(&[7, 8, 9, 10]), vec![7, 9]);
        let d = p.depuncture(&[1.0, 1.0, 1.0], 6).unwrap();
        assert_eq!(d, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(p.depuncture(&[1.0; 2], 6), Err(Error::LengthMismatch { .. })));
        assert!(PuncturePattern::new(vec![false, false]).is_err());
    }

    #[test]
    fn bcjr_matches_exhaustive_map_on_length_8() {
        let code = ConvCode::rsc_7_5();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..8).map(|_| rng.random_range(-6.0..6.0)).collect() };
            let (sys, par, pri) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let out = code.bcjr(&sys, &par, &pri);
            let reference = oracle::map_extrinsic_by_enumeration(0o7, 0o5, &sys, &par, &pri);
            for (a, b) in out.extrinsic_systematic.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn saturated_zero_word_gives_nonnegative_extrinsic() {
        let out = ConvCode::rsc_7_5().bcjr(&[30.0; 12], &[30.0; 12], &[30.0; 12]);
        assert!(out.extrinsic_systematic.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn codeword_sign_flip_negates_extrinsic() {
        // Negating the LLRs on the support of a codeword maps the likelihoods
        // of every word c' onto those of c' ⊕ c.
        let code = ConvCode::rsc_7_5();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let sys: Vec<f64> = (0..20).map(|_| rng.random_range(-4.0..4.0)).collect();
        let par: Vec<f64> = (0..20).map(|_| rng.random_range(-4.0..4.0)).collect();
        let u: Vec<u8> = (0..20).map(|_| rng.random_range(0..2)).collect();
        let p = code.encode(&u);
        let flip = |v: &[f64], mask: &[u8]| v.iter().zip(mask).map(|(x, &b)| x * antipodal(b)).collect::<Vec<_>>();
        let a = code.bcjr(&sys, &par, &[0.0; 20]);
        let b = code.bcjr(&flip(&sys, &u), &flip(&par, &p), &[0.0; 20]);
        for k in 0..20 {
            let expect = a.extrinsic_systematic[k] * antipodal(u[k]);
            assert!((b.extrinsic_systematic[k] - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn extrinsic_independent_of_own_prior() {
        let code = ConvCode::rsc_7_5();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let sys: Vec<f64> = (0..16).map(|_| rng.random_range(-4.0..4.0)).collect();
        let par: Vec<f64> = (0..16).map(|_| rng.random_range(-4.0..4.0)).collect();
        let pri: Vec<f64> = (0..16).map(|_| rng.random_range(-2.0..2.0)).collect();
        let base = code.bcjr(&sys, &par, &pri);
        for i in 0..16 {
            let mut p = pri.clone();
            p[i] += 3.7;
            let out = code.bcjr(&sys, &par, &p);
            assert!((out.extrinsic_systematic[i] - base.extrinsic_systematic[i]).abs() < 1e-9);
        }
        for k in 0..16 {
            let sum = sys[k] + pri[k] + base.extrinsic_systematic[k];
            assert!((base.aposteriori[k] - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn metrics_stay_finite_at_clip() {
        let code = ConvCode::rsc_7_5();
        let n = 400;
        let sys: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 30.0 } else { -30.0 }).collect();
        let out = code.bcjr(&sys, &vec![-30.0; n], &vec![30.0; n]);
        assert!(out.extrinsic_systematic.iter().all(|e| e.is_finite()));
    }

    proptest! {
        #[test]
        fn encoder_is_linear(a in prop::collection::vec(0u8..2, 1..64), seed in any::<u64>()) {
            let code = ConvCode::rsc_7_5();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<u8> = (0..a.len()).map(|_| rng.random_range(0..2)).collect();
            let x: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            let lhs = code.encode(&x);
            let rhs: Vec<u8> = code.encode(&a).iter().zip(code.encode(&b)).map(|(p, q)| p ^ q).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn bcjr_equals_brute_force_map(
            sys in prop::collection::vec(-8.0f64..8.0, 1..=10),
            seed in any::<u64>(),
        ) {
            let n = sys.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let par: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
            let pri: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
            let out = ConvCode::rsc_7_5().bcjr(&sys, &par, &pri);
            let reference = oracle::map_extrinsic_by_enumeration(0o7, 0o5, &sys, &par, &pri);
            for (a, b) in out.extrinsic_systematic.iter().zip(&reference) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn depuncture_restores_survivors(v in prop::collection::vec(-10.0f64..10.0, 0..40), period in 1usize..5) {
            let mut mask = vec![false; period];
            mask[0] = true;
            let p = PuncturePattern::new(mask).unwrap();
            let full = p.depuncture(&p.puncture(&v), v.len()).unwrap();
            for (i, (a, b)) in full.iter().zip(&v).enumerate() {
                if p.keeps(i) { prop_assert_eq!(a, b); } else { prop_assert_eq!(*a, 0.0); }
            }
        }
    }
}
