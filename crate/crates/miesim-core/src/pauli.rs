//! Signed Hermitian Pauli strings.
//!
//! A string with bits `(x, z)` and sign `s` denotes
//! `s · ∏_j i^{x_j z_j} X^{x_j} Z^{z_j}`, so `x_j = z_j = 1` is `Y_j` and every
//! representable operator is Hermitian.

use std::fmt;

use crate::bits::{self, words_for};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    /// `true` for sign −1.
    pub(crate) neg: bool,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            neg: false,
        }
    }

    /// Build from raw words. Bits at positions ≥ n must be zero.
    pub fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, neg: bool) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        PauliString { n, x, z, neg }
    }

    /// `letter` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(q, letter);
        p
    }

    /// Product of `Z_j` over `s_j = 1`.
    pub fn z_of(n: usize, s: &[bool]) -> Self {
        let mut p = Self::identity(n);
        for (j, &b) in s.iter().enumerate() {
            bits::set(&mut p.z, j, b);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn set_negative(&mut self, neg: bool) {
        self.neg = neg;
    }

    pub fn x_bit(&self, q: usize) -> bool {
        bits::get(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        bits::get(&self.z, q)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        bits::set(&mut self.x, q, x);
        bits::set(&mut self.z, q, z);
    }

    /// Identity up to sign.
    pub fn is_identity_unsigned(&self) -> bool {
        bits::is_zero(&self.x) && bits::is_zero(&self.z)
    }

    pub fn is_identity(&self) -> bool {
        !self.neg && self.is_identity_unsigned()
    }

    /// Tensor product of `I` and `Z` factors only (any sign).
    pub fn is_z_type(&self) -> bool {
        bits::is_zero(&self.x)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut c = 0u32;
        for w in 0..self.x.len() {
            c ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        c & 1 == 0
    }

    /// Multiply `self ← self · rhs` and return log_i of the resulting scalar,
    /// signs included. The result is Hermitian exactly when the return value is
    /// even; in that case the sign has been folded into `self`.
    pub fn mul_assign_log_i(&mut self, rhs: &PauliString) -> u8 {
        assert_eq!(self.n, rhs.n, "Pauli size mismatch");
        let mut log = bits::mul_log_i(&mut self.x, &mut self.z, &rhs.x, &rhs.z);
        log = (log + 2 * self.neg as u8 + 2 * rhs.neg as u8) & 3;
        self.neg = false;
        if log & 1 == 0 {
            self.neg = log == 2;
        }
        log
    }

    /// Product of two commuting Paulis.
    pub fn mul_commuting(&self, rhs: &PauliString) -> Result<PauliString> {
        let mut p = self.clone();
        if p.mul_assign_log_i(rhs) & 1 == 1 {
            return Err(Error::InvalidParameter(
                "product of anticommuting Paulis is not Hermitian".into(),
            ));
        }
        Ok(p)
    }

    /// Restriction to the listed qubits, in that order (sign dropped).
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            bits::set(&mut p.x, i, self.x_bit(q));
            bits::set(&mut p.z, i, self.z_bit(q));
        }
        p
    }

    /// Parse `+XYZI`, `-X_Z` (underscore = identity). A missing sign means `+`.
    pub fn parse(s: &str) -> Result<PauliString> {
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let mut p = PauliString::identity(body.chars().count());
        for (i, ch) in body.chars().enumerate() {
            let l = match ch {
                'I' | '_' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => {
                    return Err(Error::parse(
                        1,
                        i + 1 + (s.len() - body.len()),
                        format!("bad Pauli letter {ch:?}"),
                    ))
                }
            };
            p.set(i, l);
        }
        p.neg = neg;
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.neg { "-" } else { "+" })?;
        for q in 0..self.n {
            let c = match self.letter(q) {
                Letter::I => '_',
                Letter::X => 'X',
                Letter::Y => 'Y',
                Letter::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["+XYZ_", "-Z", "+____", "-YYYY"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn products() {
        let mut a = p("+XX");
        assert_eq!(a.mul_assign_log_i(&p("+ZZ")), 2);
        assert_eq!(a, p("-YY"));
        let mut b = p("+X");
        assert_eq!(b.mul_assign_log_i(&p("+Z")), 3); // XZ = -iY
        assert!(p("+XX").commutes_with(&p("+ZZ")));
        assert!(!p("+X_").commutes_with(&p("+Z_")));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(0u8..4, n), any::<bool>()).prop_map(move |(ls, neg)| {
            let mut q = PauliString::identity(n);
            for (i, l) in ls.into_iter().enumerate() {
                q.set(i, [Letter::I, Letter::X, Letter::Y, Letter::Z][l as usize]);
            }
            q.neg = neg;
            q
        })
    }

    proptest! {
        // the multi-qubit phase is the sum of per-qubit phases
        #[test]
        fn phase_is_additive((a, b) in (1usize..150).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n)))) {
            let mut expected = 2 * (a.neg as u32 + b.neg as u32);
            for q in 0..a.n {
                let mut x = [a.x_bit(q) as u64];
                let mut z = [a.z_bit(q) as u64];
                expected += bits::mul_log_i(&mut x, &mut z, &[b.x_bit(q) as u64], &[b.z_bit(q) as u64]) as u32;
            }
            let mut c = a.clone();
            let got = c.mul_assign_log_i(&b);
            prop_assert_eq!(got as u32, expected & 3);
            prop_assert_eq!(got & 1 == 0, a.commutes_with(&b));
        }
    }
}
