//! Narrow-sense Reed-Solomon codes over GF(2^m).
//!
//! Codewords are systematic with the message first: symbol `j` of a length-`n`
//! codeword is the coefficient of `x^(n-1-j)`, so the `k` message symbols occupy
//! the high-degree terms and the `n-k` parity symbols the low-degree ones. The
//! generator polynomial has roots α^1 … α^(n-k).
//!
//! Symbols expand to bits least-significant bit first: bit `j*m + c` of a binary
//! image is bit `c` of symbol `j`.

use crate::bitmat::BitMatrix;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsCode {
    field: Field,
    n: usize,
    k: usize,
    generator: Poly,
}

/// Result of a successful hard-decision decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BmDecoded {
    pub codeword: Vec<FieldElement>,
    pub corrected: usize,
    k: usize,
}

impl BmDecoded {
    pub fn message(&self) -> &[FieldElement] {
        &self.codeword[..self.k]
    }
}

impl RsCode {
    pub fn new(field: Field, n: usize, k: usize) -> Result<Self> {
        if n != field.order() {
            return Err(Error::InvalidCode(format!(
                "n = {n} must equal 2^m - 1 = {}",
                field.order()
            )));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("k = {k} must satisfy 0 < k < n = {n}")));
        }
        let mut generator = Poly::one();
        for i in 1..=(n - k) as i64 {
            generator = generator.mul(&field, &Poly::new(vec![field.alpha_pow(i), FieldElement::ONE]));
        }
        Ok(RsCode { field, n, k, generator })
    }

    /// The (31,25) code over GF(32) with x^5+x^2+1.
    pub fn rs_31_25() -> Self {
        RsCode::new(Field::with_default_poly(5).expect("default poly"), 31, 25).expect("valid code")
    }

    /// The (15,7) code over GF(16) with x^4+x+1.
    pub fn rs_15_7() -> Self {
        RsCode::new(Field::with_default_poly(4).expect("default poly"), 15, 7).expect("valid code")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.field.m() as usize
    }

    /// Number of parity symbols.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Guaranteed symbol-error correction radius.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn generator(&self) -> &Poly {
        &self.generator
    }

    /// Generator roots α^1 … α^(n-k).
    pub fn generator_roots(&self) -> Vec<FieldElement> {
        (1..=self.redundancy() as i64).map(|i| self.field.alpha_pow(i)).collect()
    }

    /// Codeword length in bits.
    pub fn codeword_bits(&self) -> usize {
        self.n * self.m()
    }

    /// Message length in bits.
    pub fn message_bits(&self) -> usize {
        self.k * self.m()
    }

    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: message.len() });
        }
        let r = self.redundancy();
        let g = self.generator.coeffs();
        // Dividend M(x)·x^r, lowest degree first.
        let mut d = vec![FieldElement::ZERO; self.n];
        for (j, &s) in message.iter().enumerate() {
            d[self.n - 1 - j] = s;
        }
        for deg in (r..self.n).rev() {
            let coef = d[deg];
            if coef.is_zero() {
                continue;
            }
            for (i, &gi) in g.iter().enumerate() {
                d[deg - r + i] += self.field.mul(coef, gi);
            }
        }
        let mut codeword = message.to_vec();
        codeword.extend((0..r).map(|j| d[r - 1 - j]));
        Ok(codeword)
    }

    /// Syndromes S_1 … S_(n-k) of a received word.
    pub fn syndromes(&self, received: &[FieldElement]) -> Vec<FieldElement> {
        self.generator_roots()
            .into_iter()
            .map(|x| received.iter().fold(FieldElement::ZERO, |acc, &c| self.field.mul(acc, x) + c))
            .collect()
    }

    pub fn is_codeword(&self, word: &[FieldElement]) -> bool {
        word.len() == self.n && self.syndromes(word).iter().all(|s| s.is_zero())
    }

    /// Berlekamp-Massey decoding with Chien search and Forney's formula.
    ///
    /// Succeeds whenever at most `t` symbols are in error. Beyond that it
    /// reports [`Error::DecodingFailure`] or, undetectably, lands on another
    /// codeword.
    pub fn bm_decode(&self, received: &[FieldElement]) -> Result<BmDecoded> {
        if received.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: received.len() });
        }
        let f = &self.field;
        let synd = self.syndromes(received);
        if synd.iter().all(|s| s.is_zero()) {
            return Ok(BmDecoded { codeword: received.to_vec(), corrected: 0, k: self.k });
        }

        let locator = berlekamp_massey(f, &synd);
        let nu = locator.degree().unwrap_or(0);
        if nu == 0 || nu > self.t() {
            return Err(Error::DecodingFailure);
        }

        // Chien search over degree positions p; X = α^p, root at X^-1.
        let positions: Vec<usize> = (0..self.n)
            .filter(|&p| f.poly_eval(&locator, f.alpha_pow(-(p as i64))).is_zero())
            .collect();
        if positions.len() != nu {
            return Err(Error::DecodingFailure);
        }

        let s_poly = Poly::new(synd.clone());
        let omega = s_poly.mul(f, &locator).truncate(self.redundancy());
        let lambda_prime = locator.derivative();
        let mut codeword = received.to_vec();
        for &p in &positions {
            let x_inv = f.alpha_pow(-(p as i64));
            let den = f.poly_eval(&lambda_prime, x_inv);
            let value = f.div(f.poly_eval(&omega, x_inv), den).map_err(|_| Error::DecodingFailure)?;
            if value.is_zero() {
                return Err(Error::DecodingFailure);
            }
            codeword[self.n - 1 - p] += value;
        }
        if !self.is_codeword(&codeword) {
            return Err(Error::DecodingFailure);
        }
        Ok(BmDecoded { codeword, corrected: nu, k: self.k })
    }

    /// Binary image of the symbol-level parity-check matrix.
    ///
    /// Each entry `h` of the (n-k)×n matrix over GF(2^m) becomes the m×m
    /// binary matrix of the linear map `v ↦ h·v` in the polynomial basis.
    pub fn binary_parity_check(&self) -> BinaryParityCheck {
        let f = &self.field;
        let (n, m, r) = (self.n, self.m(), self.redundancy());
        let mut h = BitMatrix::zeros(r * m, n * m);
        for i in 0..r {
            let root_exp = (i + 1) as i64;
            for j in 0..n {
                let entry = f.alpha_pow(root_exp * (n - 1 - j) as i64);
                for c in 0..m {
                    let image = f.mul(entry, FieldElement(1 << c)).value();
                    for b in 0..m {
                        if (image >> b) & 1 == 1 {
                            h.set(i * m + b, j * m + c, true);
                        }
                    }
                }
            }
        }
        BinaryParityCheck { matrix: h }
    }
}

/// Connection polynomial Λ(x) = 1 + Λ_1 x + … from syndromes S_1, S_2, ….
fn berlekamp_massey(f: &Field, synd: &[FieldElement]) -> Poly {
    let mut c = vec![FieldElement::ONE];
    let mut b = vec![FieldElement::ONE];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last_d = FieldElement::ONE;
    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=l.min(c.len() - 1) {
            d += f.mul(c[i], synd[n - i]);
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last_d).expect("nonzero discrepancy");
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, FieldElement::ZERO);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + shift] += f.mul(coef, bi);
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = std::mem::replace(&mut c, next);
            last_d = d;
            shift = 1;
        } else {
            c = next;
            shift += 1;
        }
    }
    Poly::new(c)
}

/// Binary parity-check matrix of an RS code, (n-k)·m × n·m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryParityCheck {
    pub matrix: BitMatrix,
}

/// Expands symbols into bits, least-significant bit first.
pub fn symbols_to_bits(symbols: &[FieldElement], m: usize) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|s| (0..m).map(move |c| ((s.value() >> c) & 1) as u8))
        .collect()
}

/// Packs bits into symbols, least-significant bit first.
pub fn bits_to_symbols(bits: &[u8], m: usize) -> Vec<FieldElement> {
    bits.chunks(m)
        .map(|chunk| {
            FieldElement(chunk.iter().enumerate().fold(0u16, |acc, (c, &b)| acc | (((b & 1) as u16) << c)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_message(code: &RsCode, rng: &mut impl Rng) -> Vec<FieldElement> {
        (0..code.k()).map(|_| FieldElement(rng.random_range(0..code.field().size() as u16))).collect()
    }

    fn corrupt(code: &RsCode, word: &mut [FieldElement], errors: usize, rng: &mut impl Rng) {
        for pos in sample(rng, code.n(), errors) {
            let e = rng.random_range(1..code.field().size() as u16);
            word[pos] += FieldElement(e);
        }
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let code = RsCode::rs_15_7();
        let cw = code.encode(&[FieldElement::ZERO; 7]).unwrap();
        assert!(cw.iter().all(|s| s.is_zero()));
    }

    #[test]
    fn encode_is_systematic_with_zero_syndromes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for code in [RsCode::rs_15_7(), RsCode::rs_31_25()] {
            assert_eq!(code.generator().degree(), Some(code.redundancy()));
            for _ in 0..50 {
                let msg = random_message(&code, &mut rng);
                let cw = code.encode(&msg).unwrap();
                assert_eq!(&cw[..code.k()], &msg[..]);
                for root in code.generator_roots() {
                    let v = cw.iter().fold(FieldElement::ZERO, |acc, &c| code.field().mul(acc, root) + c);
                    assert!(v.is_zero());
                }
            }
        }
    }

    #[test]
    fn encode_is_deterministic() {
        let code = RsCode::rs_31_25();
        let msg = random_message(&code, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(code.encode(&msg).unwrap(), code.encode(&msg).unwrap());
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let code = RsCode::rs_15_7();
        assert_eq!(
            code.encode(&[FieldElement::ZERO; 6]),
            Err(Error::LengthMismatch { expected: 7, actual: 6 })
        );
        assert!(matches!(code.bm_decode(&[FieldElement::ZERO; 14]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn rejects_invalid_geometry() {
        let f = Field::with_default_poly(4).unwrap();
        assert!(RsCode::new(f.clone(), 14, 7).is_err());
        assert!(RsCode::new(f.clone(), 15, 15).is_err());
        assert!(RsCode::new(f, 15, 0).is_err());
    }

    #[test]
    fn error_free_word_decodes_with_zero_corrections() {
        let code = RsCode::rs_15_7();
        let msg = random_message(&code, &mut ChaCha8Rng::seed_from_u64(4));
        let cw = code.encode(&msg).unwrap();
        let out = code.bm_decode(&cw).unwrap();
        assert_eq!(out.corrected, 0);
        assert_eq!(out.message(), &msg[..]);
    }

    #[test]
    fn corrects_exactly_t_errors() {
        let code = RsCode::rs_15_7();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let msg = random_message(&code, &mut rng);
            let mut word = code.encode(&msg).unwrap();
            corrupt(&code, &mut word, 4, &mut rng);
            let out = code.bm_decode(&word).unwrap();
            assert_eq!(out.corrected, 4);
            assert_eq!(out.message(), &msg[..]);
        }
    }

    #[test]
    fn beyond_t_mostly_fails_and_never_returns_a_noncodeword() {
        let code = RsCode::rs_15_7();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut failures = 0;
        for _ in 0..1000 {
            let msg = random_message(&code, &mut rng);
            let mut word = code.encode(&msg).unwrap();
            corrupt(&code, &mut word, 5, &mut rng);
            match code.bm_decode(&word) {
                Err(Error::DecodingFailure) => failures += 1,
                Ok(out) => assert!(code.is_codeword(&out.codeword)),
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(failures > 500, "failures = {failures}");
    }

    #[test]
    fn binary_parity_check_dimensions_and_rank() {
        let h = RsCode::rs_15_7().binary_parity_check().matrix;
        assert_eq!((h.rows(), h.cols()), (32, 60));
        assert_eq!(h.rank(), 32);
        let h = RsCode::rs_31_25().binary_parity_check().matrix;
        assert_eq!((h.rows(), h.cols()), (30, 155));
        assert_eq!(h.rank(), 30);
    }

    #[test]
    fn binary_parity_check_annihilates_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for code in [RsCode::rs_15_7(), RsCode::rs_31_25()] {
            let h = code.binary_parity_check().matrix;
            for _ in 0..200 {
                let cw = code.encode(&random_message(&code, &mut rng)).unwrap();
                assert!(h.annihilates(&symbols_to_bits(&cw, code.m())));
            }
            // A single flipped bit is always detected.
            let cw = code.encode(&random_message(&code, &mut rng)).unwrap();
            let mut bits = symbols_to_bits(&cw, code.m());
            bits[3] ^= 1;
            assert!(!h.annihilates(&bits));
        }
    }

    #[test]
    fn bit_symbol_round_trip() {
        let syms = vec![FieldElement(1), FieldElement(6), FieldElement(31)];
        let bits = symbols_to_bits(&syms, 5);
        assert_eq!(&bits[..10], &[1, 0, 0, 0, 0, 0, 1, 1, 0, 0]);
        assert_eq!(bits_to_symbols(&bits, 5), syms);
    }
}
