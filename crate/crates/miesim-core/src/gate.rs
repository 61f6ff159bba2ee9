//! Clifford gates stored by their conjugation images.

use crate::bits::{self, words_for};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// A k-qubit Clifford unitary `U`, modulo global phase, stored as the images
/// `U X_j U†` (entries `0..k`) and `U Z_j U†` (entries `k..2k`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CliffordGate {
    k: usize,
    images: Vec<PauliString>,
}

impl CliffordGate {
    /// Build from the `2k` images, checking the commutation relations.
    pub fn from_images(images: Vec<PauliString>) -> Result<Self> {
        let g = Self::from_images_unchecked(images)?;
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_images_unchecked(images: Vec<PauliString>) -> Result<Self> {
        if images.is_empty() || !images.len().is_multiple_of(2) {
            return Err(Error::InvalidGate(format!(
                "expected 2k images, got {}",
                images.len()
            )));
        }
        let k = images.len() / 2;
        if let Some(bad) = images.iter().find(|p| p.num_qubits() != k) {
            return Err(Error::InvalidGate(format!(
                "image has {} qubits, expected {k}",
                bad.num_qubits()
            )));
        }
        Ok(CliffordGate { k, images })
    }

    pub fn identity(k: usize) -> Self {
        let mut images = Vec::with_capacity(2 * k);
        for j in 0..k {
            images.push(PauliString::single(k, j, crate::pauli::Letter::X));
        }
        for j in 0..k {
            images.push(PauliString::single(k, j, crate::pauli::Letter::Z));
        }
        CliffordGate { k, images }
    }

    fn one_qubit(x: &str, z: &str) -> Self {
        CliffordGate {
            k: 1,
            images: vec![
                PauliString::parse(x).unwrap(),
                PauliString::parse(z).unwrap(),
            ],
        }
    }

    pub fn h() -> Self {
        Self::one_qubit("+Z", "+X")
    }

    pub fn s() -> Self {
        Self::one_qubit("+Y", "+Z")
    }

    pub fn s_dag() -> Self {
        Self::one_qubit("-Y", "+Z")
    }

    pub fn pauli_x() -> Self {
        Self::one_qubit("+X", "-Z")
    }

    pub fn pauli_y() -> Self {
        Self::one_qubit("-X", "-Z")
    }

    pub fn pauli_z() -> Self {
        Self::one_qubit("-X", "+Z")
    }

    /// CNOT with control on local qubit 0, target on local qubit 1.
    pub fn cnot() -> Self {
        let p = |s| PauliString::parse(s).unwrap();
        CliffordGate {
            k: 2,
            images: vec![p("+XX"), p("+_X"), p("+Z_"), p("+ZZ")],
        }
    }

    pub fn cz() -> Self {
        let p = |s| PauliString::parse(s).unwrap();
        CliffordGate {
            k: 2,
            images: vec![p("+XZ"), p("+ZX"), p("+Z_"), p("+_Z")],
        }
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn image_x(&self, j: usize) -> &PauliString {
        &self.images[j]
    }

    pub fn image_z(&self, j: usize) -> &PauliString {
        &self.images[self.k + j]
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// Check that the images obey the canonical commutation relations.
    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        for a in 0..2 * k {
            if self.images[a].is_identity_unsigned() {
                return Err(Error::InvalidGate(format!("image {a} is the identity")));
            }
            for b in a + 1..2 * k {
                let should_anti = b == a + k && a < k;
                if self.images[a].commutes_with(&self.images[b]) == should_anti {
                    return Err(Error::InvalidGate(format!(
                        "images {a} and {b} have the wrong commutation"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `U p U†`.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        assert_eq!(
            p.num_qubits(),
            self.k,
            "Pauli size does not match gate arity"
        );
        let w = words_for(self.k);
        let mut ax = vec![0u64; w];
        let mut az = vec![0u64; w];
        let mut log: u32 = 2 * p.is_negative() as u32;
        for j in 0..self.k {
            let (x, z) = (p.x_bit(j), p.z_bit(j));
            if x {
                let im = self.image_x(j);
                log += bits::mul_log_i(&mut ax, &mut az, &im.x, &im.z) as u32 + 2 * im.neg as u32;
            }
            if z {
                let im = self.image_z(j);
                log += bits::mul_log_i(&mut ax, &mut az, &im.x, &im.z) as u32 + 2 * im.neg as u32;
            }
            if x && z {
                log += 1;
            }
        }
        debug_assert_eq!(log & 1, 0);
        PauliString::from_words(self.k, ax, az, log & 3 == 2)
    }

    /// `U† p U`. The unsigned preimage comes from the transposed symplectic
    /// matrix: it contains `X_j` iff `p` anticommutes with `U Z_j U†`, and
    /// `Z_j` iff `p` anticommutes with `U X_j U†`. The sign is fixed by one
    /// forward conjugation.
    pub fn conjugate_backward(&self, p: &PauliString) -> PauliString {
        assert_eq!(
            p.num_qubits(),
            self.k,
            "Pauli size does not match gate arity"
        );
        let mut q = PauliString::identity(self.k);
        for j in 0..self.k {
            bits::set(&mut q.x, j, !p.commutes_with(self.image_z(j)));
            bits::set(&mut q.z, j, !p.commutes_with(self.image_x(j)));
        }
        let fwd = self.conjugate(&q);
        debug_assert_eq!(fwd.x, p.x);
        debug_assert_eq!(fwd.z, p.z);
        q.neg = fwd.neg != p.neg;
        q
    }

    /// The gate `next ∘ self` (apply `self` first).
    pub fn then(&self, next: &CliffordGate) -> CliffordGate {
        assert_eq!(self.k, next.k);
        CliffordGate {
            k: self.k,
            images: self.images.iter().map(|im| next.conjugate(im)).collect(),
        }
    }

    pub fn inverse(&self) -> CliffordGate {
        let k = self.k;
        let mut images = Vec::with_capacity(2 * k);
        for j in 0..k {
            images.push(self.conjugate_backward(&PauliString::single(
                k,
                j,
                crate::pauli::Letter::X,
            )));
        }
        for j in 0..k {
            images.push(self.conjugate_backward(&PauliString::single(
                k,
                j,
                crate::pauli::Letter::Z,
            )));
        }
        CliffordGate { k, images }
    }

    /// Tensor product `self ⊗ other` (self on the low qubits).
    pub fn tensor(&self, other: &CliffordGate) -> CliffordGate {
        let k = self.k + other.k;
        let embed = |p: &PauliString, off: usize| {
            let mut q = PauliString::identity(k);
            for j in 0..p.num_qubits() {
                q.set(off + j, p.letter(j));
            }
            q.set_negative(p.is_negative());
            q
        };
        let mut images = Vec::with_capacity(2 * k);
        images.extend((0..self.k).map(|j| embed(self.image_x(j), 0)));
        images.extend((0..other.k).map(|j| embed(other.image_x(j), self.k)));
        images.extend((0..self.k).map(|j| embed(self.image_z(j), 0)));
        images.extend((0..other.k).map(|j| embed(other.image_z(j), self.k)));
        CliffordGate { k, images }
    }

    pub fn is_identity(&self) -> bool {
        *self == CliffordGate::identity(self.k)
    }

    /// Row-major bits `(x | z | sign)` of the 2k images.
    pub fn to_bits(&self) -> Vec<bool> {
        let k = self.k;
        let mut out = Vec::with_capacity(2 * k * (2 * k + 1));
        for im in &self.images {
            out.extend((0..k).map(|j| im.x_bit(j)));
            out.extend((0..k).map(|j| im.z_bit(j)));
            out.push(im.is_negative());
        }
        out
    }

    pub fn from_bits(k: usize, b: &[bool]) -> Result<CliffordGate> {
        if b.len() != 2 * k * (2 * k + 1) {
            return Err(Error::InvalidGate(format!(
                "expected {} bits, got {}",
                2 * k * (2 * k + 1),
                b.len()
            )));
        }
        let images = b
            .chunks(2 * k + 1)
            .map(|row| {
                let mut p = PauliString::identity(k);
                for j in 0..k {
                    bits::set(&mut p.x, j, row[j]);
                    bits::set(&mut p.z, j, row[k + j]);
                }
                p.neg = row[2 * k];
                p
            })
            .collect();
        CliffordGate::from_images(images)
    }

    pub(crate) fn kernel(&self) -> GateKernel {
        GateKernel::new(self)
    }
}

/// Precomputed form of a gate for applying it to many tableau rows.
pub(crate) enum GateKernel {
    /// Lookup table over local `(x, z)` patterns, index `x | z << k`.
    Table {
        k: usize,
        out: Vec<(u32, u32, bool)>,
    },
    /// Images of X_j, Z_j, Y_j (in that order) with their signs.
    Images {
        k: usize,
        imgs: [Vec<PauliString>; 3],
    },
}

pub(crate) const TABLE_MAX_ARITY: usize = 4;

impl GateKernel {
    fn new(g: &CliffordGate) -> Self {
        let k = g.k;
        if k <= TABLE_MAX_ARITY {
            let mut out = Vec::with_capacity(1 << (2 * k));
            for idx in 0..1u32 << (2 * k) {
                let mut p = PauliString::identity(k);
                p.x[0] = (idx & ((1 << k) - 1)) as u64;
                p.z[0] = (idx >> k) as u64;
                let im = g.conjugate(&p);
                out.push((im.x[0] as u32, im.z[0] as u32, im.neg));
            }
            GateKernel::Table { k, out }
        } else {
            let xs: Vec<PauliString> = (0..k).map(|j| g.image_x(j).clone()).collect();
            let zs: Vec<PauliString> = (0..k).map(|j| g.image_z(j).clone()).collect();
            let ys: Vec<PauliString> = (0..k)
                .map(|j| {
                    let mut p = PauliString::single(k, j, crate::pauli::Letter::Y);
                    p.neg = false;
                    g.conjugate(&p)
                })
                .collect();
            GateKernel::Images {
                k,
                imgs: [xs, zs, ys],
            }
        }
    }

    pub(crate) fn arity(&self) -> usize {
        match self {
            GateKernel::Table { k, .. } | GateKernel::Images { k, .. } => *k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn named_gates_are_valid() {
        for g in [
            CliffordGate::h(),
            CliffordGate::s(),
            CliffordGate::s_dag(),
            CliffordGate::cnot(),
            CliffordGate::cz(),
            CliffordGate::pauli_x(),
        ] {
            g.validate().unwrap();
            assert!(g.then(&g.inverse()).is_identity());
            assert!(g.inverse().then(&g).is_identity());
        }
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(CliffordGate::h().conjugate(&p("+Y")), p("-Y"));
        assert_eq!(CliffordGate::s().conjugate(&p("+Y")), p("-X"));
        assert_eq!(CliffordGate::cnot().conjugate(&p("+YZ")), p("+XY"));
        assert_eq!(CliffordGate::cnot().conjugate_backward(&p("+_Z")), p("+ZZ"));
        assert_eq!(
            CliffordGate::s().then(&CliffordGate::s()),
            CliffordGate::pauli_z()
        );
    }

    #[test]
    fn invalid_images_rejected() {
        assert!(CliffordGate::from_images(vec![p("+X"), p("+X")]).is_err());
        assert!(CliffordGate::from_images(vec![p("+X"), p("+_")]).is_err());
        assert!(CliffordGate::from_images(vec![p("+XZ"), p("+Z_")]).is_err());
    }

    #[test]
    fn bits_roundtrip() {
        let g = CliffordGate::cnot().then(&CliffordGate::h().tensor(&CliffordGate::s()));
        assert_eq!(CliffordGate::from_bits(2, &g.to_bits()).unwrap(), g);
    }
}
