//! Destabilizer/stabilizer tableau (Aaronson–Gottesman layout).
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. All row products
//! performed here are between commuting rows, so every sign stays exact.

use rand::Rng;

use crate::bits::{self, words_for};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gate::{CliffordGate, GateKernel};
use crate::gf2::SplitEliminator;
use crate::pauli::PauliString;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabilizerTableau {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    neg: Vec<bool>,
}

/// Result of a measurement whose outcome is imposed rather than sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forced {
    /// The outcome was already determined and agrees.
    Deterministic,
    /// The outcome was random (probability 1/2); the state is collapsed onto it.
    Random,
    /// The outcome was determined and disagrees: probability 0, state untouched.
    Impossible,
}

fn split_rows(v: &mut [u64], w: usize, dst: usize, src: usize) -> (&mut [u64], &[u64]) {
    debug_assert_ne!(dst, src);
    if dst < src {
        let (lo, hi) = v.split_at_mut(src * w);
        (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
    } else {
        let (lo, hi) = v.split_at_mut(dst * w);
        (&mut hi[..w], &lo[src * w..(src + 1) * w])
    }
}

pub(crate) fn check_support(n: usize, support: &[usize]) -> Result<()> {
    for (i, &q) in support.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if support[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

impl StabilizerTableau {
    /// `|0…0⟩`: stabilizers `+Z_j`, destabilizers `+X_j`.
    pub fn new_zero_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        let w = words_for(n);
        let mut t = StabilizerTableau {
            n,
            w,
            x: vec![0; 2 * n * w],
            z: vec![0; 2 * n * w],
            neg: vec![false; 2 * n],
        };
        for j in 0..n {
            bits::set(&mut t.x[j * w..(j + 1) * w], j, true);
            bits::set(&mut t.z[(n + j) * w..(n + j + 1) * w], j, true);
        }
        Ok(t)
    }

    /// Tableau of the state stabilized by `gens` (n independent commuting
    /// Paulis on n qubits). Destabilizers are found by solving
    /// `⟨d_i, g_j⟩ = δ_ij` and then made mutually commuting by multiplying in
    /// stabilizers.
    pub fn from_stabilizers(gens: &[PauliString]) -> Result<Self> {
        let n = gens.len();
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        for g in gens {
            if g.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: g.num_qubits(),
                });
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if !gens[a].commutes_with(&gens[b]) {
                    return Err(Error::InvalidParameter(
                        "stabilizer generators must commute".into(),
                    ));
                }
            }
        }
        // row j of `a` is g_j with x and z swapped, so a·d = symplectic products
        let mut a = crate::gf2::Gf2Matrix::zeros(n, 2 * n);
        for (j, g) in gens.iter().enumerate() {
            for q in 0..n {
                a.set(j, q, g.z_bit(q));
                a.set(j, n + q, g.x_bit(q));
            }
        }
        let w = words_for(n);
        let mut t = StabilizerTableau {
            n,
            w,
            x: vec![0; 2 * n * w],
            z: vec![0; 2 * n * w],
            neg: vec![false; 2 * n],
        };
        for i in 0..n {
            let e: Vec<bool> = (0..n).map(|j| j == i).collect();
            let d = a.solve(&e).ok_or_else(|| {
                Error::InvalidParameter("stabilizer generators are dependent".into())
            })?;
            let mut dp = PauliString::identity(n);
            for q in 0..n {
                bits::set(&mut dp.x, q, d[q]);
                bits::set(&mut dp.z, q, d[n + q]);
            }
            t.set_row(i, &dp);
            t.set_row(n + i, &gens[i]);
        }
        for a in 0..n {
            for b in 0..a {
                if !t.row(a).commutes_with(&t.row(b)) {
                    let mut d = t.row(a);
                    mul_unsigned(&mut d, &t.row(n + b));
                    t.set_row(a, &d);
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub(crate) fn row(&self, r: usize) -> PauliString {
        let w = self.w;
        PauliString::from_words(
            self.n,
            self.x[r * w..(r + 1) * w].to_vec(),
            self.z[r * w..(r + 1) * w].to_vec(),
            self.neg[r],
        )
    }

    fn set_row(&mut self, r: usize, p: &PauliString) {
        let w = self.w;
        self.x[r * w..(r + 1) * w].copy_from_slice(p.x_words());
        self.z[r * w..(r + 1) * w].copy_from_slice(p.z_words());
        self.neg[r] = p.is_negative();
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    #[inline]
    fn xbit(&self, r: usize, q: usize) -> bool {
        (self.x[r * self.w + (q >> 6)] >> (q & 63)) & 1 == 1
    }

    /// `dst ← dst · src` for commuting rows.
    fn rowmul(&mut self, dst: usize, src: usize) {
        let w = self.w;
        let (dx, sx) = split_rows(&mut self.x, w, dst, src);
        let (dz, sz) = split_rows(&mut self.z, w, dst, src);
        let log = bits::mul_log_i(dx, dz, sx, sz) as u32
            + 2 * (self.neg[dst] as u32 + self.neg[src] as u32);
        debug_assert_eq!(log & 1, 0, "row product of anticommuting rows");
        self.neg[dst] = log & 3 == 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.w;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.neg[dst] = self.neg[src];
    }

    /// Conjugate every row by `gate` embedded on `support`.
    pub fn apply_gate(&mut self, gate: &CliffordGate, support: &[usize]) -> Result<()> {
        if gate.arity() != support.len() {
            return Err(Error::ArityMismatch {
                arity: gate.arity(),
                support: support.len(),
            });
        }
        check_support(self.n, support)?;
        self.apply_kernel(&gate.kernel(), support);
        Ok(())
    }

    pub(crate) fn apply_kernel(&mut self, kern: &GateKernel, support: &[usize]) {
        apply_kernel_rows(
            &mut self.x,
            &mut self.z,
            &mut self.neg,
            self.w,
            kern,
            support,
            true,
        );
    }

    /// Sample a computational-basis measurement of `q`.
    /// Returns `(outcome, deterministic)`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<(bool, bool)> {
        self.check_qubit(q)?;
        match self.peek_z(q) {
            Some(b) => Ok((b, true)),
            None => {
                let b = rng.gen::<bool>();
                self.collapse(q, b);
                Ok((b, false))
            }
        }
    }

    /// Measure `q` and impose `outcome`.
    pub fn measure_z_forced(&mut self, q: usize, outcome: bool) -> Result<Forced> {
        self.check_qubit(q)?;
        Ok(match self.peek_z(q) {
            Some(b) if b == outcome => Forced::Deterministic,
            Some(_) => Forced::Impossible,
            None => {
                self.collapse(q, outcome);
                Forced::Random
            }
        })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n: self.n,
            });
        }
        Ok(())
    }

    /// The deterministic outcome of measuring `Z_q`, or `None` if it is random.
    pub fn peek_z(&self, q: usize) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|r| self.xbit(r, q)) {
            return None;
        }
        // Z_q = ± ∏ stabilizer_i over destabilizers i anticommuting with Z_q
        let w = self.w;
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut log = 0u32;
        for i in 0..n {
            if self.xbit(i, q) {
                let r = n + i;
                log += bits::mul_log_i(
                    &mut sx,
                    &mut sz,
                    &self.x[r * w..(r + 1) * w],
                    &self.z[r * w..(r + 1) * w],
                ) as u32
                    + 2 * self.neg[r] as u32;
            }
        }
        debug_assert_eq!(log & 1, 0);
        Some(log & 3 == 2)
    }

    fn collapse(&mut self, q: usize, outcome: bool) {
        let n = self.n;
        let p = (n..2 * n)
            .find(|&r| self.xbit(r, q))
            .expect("collapse on deterministic qubit");
        for r in 0..2 * n {
            if r != p && self.xbit(r, q) {
                if r == p - n {
                    continue;
                }
                self.rowmul(r, p);
            }
        }
        self.copy_row(p - n, p);
        let w = self.w;
        self.x[p * w..(p + 1) * w].fill(0);
        self.z[p * w..(p + 1) * w].fill(0);
        bits::set(&mut self.z[p * w..(p + 1) * w], q, true);
        self.neg[p] = outcome;
    }

    /// `Some(sign)` if `±p` (that sign, `true` = −) belongs to the stabilizer
    /// group, `None` otherwise. The sign of `p` itself is ignored.
    pub fn group_sign(&self, p: &PauliString) -> Option<bool> {
        assert_eq!(p.num_qubits(), self.n);
        let n = self.n;
        let w = self.w;
        let anti = |r: usize| {
            let mut c = 0u32;
            for k in 0..w {
                c ^= ((self.x[r * w + k] & p.z[k]) ^ (self.z[r * w + k] & p.x[k])).count_ones();
            }
            c & 1 == 1
        };
        if (n..2 * n).any(anti) {
            return None;
        }
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut log = 0u32;
        for i in 0..n {
            if anti(i) {
                let r = n + i;
                log += bits::mul_log_i(
                    &mut sx,
                    &mut sz,
                    &self.x[r * w..(r + 1) * w],
                    &self.z[r * w..(r + 1) * w],
                ) as u32
                    + 2 * self.neg[r] as u32;
            }
        }
        debug_assert!(sx == p.x && sz == p.z);
        Some(log & 3 == 2)
    }

    /// `⟨p⟩ ∈ {+1, −1, 0}`.
    pub fn expectation(&self, p: &PauliString) -> i8 {
        match self.group_sign(p) {
            None => 0,
            Some(neg) => {
                if neg == p.is_negative() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Same stabilizer group (signs included).
    pub fn same_state(&self, other: &StabilizerTableau) -> bool {
        self.n == other.n && (0..self.n).all(|i| other.expectation(&self.stabilizer(i)) == 1)
    }

    /// `Tr ρ_R²` as an exact dyadic rational: `2^{dim G_R} / 2^{|R|}` where
    /// `G_R` is the subgroup of stabilizers supported inside `R`.
    pub fn region_purity(&self, region: &[usize]) -> Result<Dyadic> {
        check_support(self.n, region)?;
        if region.is_empty() {
            return Ok(Dyadic::ONE);
        }
        let dim = self.subgroup_dim_inside(region);
        Ok(Dyadic::inv_pow2((region.len() - dim) as u32))
    }

    /// Dimension of the subgroup of stabilizers supported inside `region`.
    pub fn subgroup_dim_inside(&self, region: &[usize]) -> usize {
        let n = self.n;
        let w = self.w;
        let inside = bits::mask_of(n, region.iter().copied());
        let mut e = SplitEliminator::new(2 * w, 2 * w);
        for i in 0..n {
            let r = n + i;
            let mut row = Vec::with_capacity(2 * w);
            for k in 0..w {
                let m = !inside[k] & tail_mask(n, k);
                row.push(self.x[r * w + k] & m);
            }
            for k in 0..w {
                let m = !inside[k] & tail_mask(n, k);
                row.push(self.z[r * w + k] & m);
            }
            e.insert(row);
        }
        e.kernel_dim()
    }

    /// Check the commutation pattern and invertibility of the tableau.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let rows: Vec<PauliString> = (0..2 * n).map(|r| self.row(r)).collect();
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let should_anti = b == a + n && a < n;
                if rows[a].commutes_with(&rows[b]) == should_anti {
                    return Err(Error::InvalidParameter(format!(
                        "tableau rows {a} and {b} have the wrong commutation"
                    )));
                }
            }
        }
        // the pattern above already forces the 2n rows to be independent
        Ok(())
    }

    /// Sample all qubits in order.
    pub fn sample_all<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<bool> {
        (0..self.n)
            .map(|q| self.measure_z(q, rng).unwrap().0)
            .collect()
    }

    /// Probability of measuring `bits` on `qubits` (as exact dyadic).
    pub fn outcome_probability(&self, qubits: &[usize], outcome: &[bool]) -> Result<Dyadic> {
        let mut t = self.clone();
        let mut p = Dyadic::ONE;
        for (&q, &b) in qubits.iter().zip(outcome) {
            match t.measure_z_forced(q, b)? {
                Forced::Deterministic => {}
                Forced::Random => p = p.checked_mul(Dyadic::inv_pow2(1)).unwrap(),
                Forced::Impossible => return Ok(Dyadic::ZERO),
            }
        }
        Ok(p)
    }

    /// Full output distribution over all qubits by branching on each random
    /// measurement. Feasible for small n only.
    pub fn output_distribution(&self) -> Vec<(u64, Dyadic)> {
        assert!(self.n <= 24, "exhaustive distribution limited to 24 qubits");
        let mut out = Vec::new();
        branch(self.clone(), 0, 0, Dyadic::ONE, &mut out);
        out.sort_by_key(|e| e.0);
        out
    }
}

fn branch(t: StabilizerTableau, q: usize, acc: u64, p: Dyadic, out: &mut Vec<(u64, Dyadic)>) {
    if q == t.n {
        out.push((acc, p));
        return;
    }
    match t.peek_z(q) {
        Some(b) => branch(t, q + 1, acc | (b as u64) << q, p, out),
        None => {
            let half = p.checked_mul(Dyadic::inv_pow2(1)).unwrap();
            let mut t1 = t.clone();
            t1.collapse(q, true);
            let mut t0 = t;
            t0.collapse(q, false);
            branch(t0, q + 1, acc, half, out);
            branch(t1, q + 1, acc | 1 << q, half, out);
        }
    }
}

#[inline]
fn tail_mask(n: usize, k: usize) -> u64 {
    let lo = k * 64;
    if lo + 64 <= n {
        !0
    } else {
        (1u64 << (n - lo)) - 1
    }
}

fn mul_unsigned(a: &mut PauliString, b: &PauliString) {
    a.mul_assign_log_i(b);
    a.set_negative(false);
}

/// Apply a gate kernel to every row of a row-major Pauli store.
///
/// With `signs == false` only the bits are updated (signs are left stale),
/// which skips the phase bookkeeping of the image-product path.
pub(crate) fn apply_kernel_rows(
    xs: &mut [u64],
    zs: &mut [u64],
    neg: &mut [bool],
    w: usize,
    kern: &GateKernel,
    support: &[usize],
    signs: bool,
) {
    let rows = neg.len();
    debug_assert_eq!(kern.arity(), support.len());
    match kern {
        GateKernel::Table { k, out } => {
            let k = *k;
            let pos: Vec<(usize, u32)> =
                support.iter().map(|&q| (q >> 6, (q & 63) as u32)).collect();
            for r in 0..rows {
                let rx = &mut xs[r * w..(r + 1) * w];
                let rz = &mut zs[r * w..(r + 1) * w];
                let mut idx = 0u32;
                for (j, &(wi, sh)) in pos.iter().enumerate() {
                    idx |= (((rx[wi] >> sh) & 1) as u32) << j;
                    idx |= (((rz[wi] >> sh) & 1) as u32) << (j + k);
                }
                if idx == 0 {
                    continue;
                }
                let (ox, oz, flip) = out[idx as usize];
                for (j, &(wi, sh)) in pos.iter().enumerate() {
                    let m = 1u64 << sh;
                    rx[wi] = (rx[wi] & !m) | (((ox >> j) & 1) as u64) << sh;
                    rz[wi] = (rz[wi] & !m) | (((oz >> j) & 1) as u64) << sh;
                }
                neg[r] ^= flip;
            }
        }
        GateKernel::Images { k, imgs } => {
            let lw = words_for(*k);
            // support as (word, mask) pairs plus a global -> local index map
            let mut touch: Vec<(usize, u64)> = Vec::new();
            let lo = support.iter().min().map_or(0, |&q| q & !63);
            let hi = support.iter().max().map_or(0, |&q| q + 1);
            let mut local = vec![u32::MAX; hi - lo];
            for (j, &q) in support.iter().enumerate() {
                local[q - lo] = j as u32;
                match touch.iter_mut().find(|t| t.0 == q >> 6) {
                    Some(t) => t.1 |= 1 << (q & 63),
                    None => touch.push((q >> 6, 1 << (q & 63))),
                }
            }
            touch.sort_unstable();
            let mut ax = vec![0u64; lw];
            let mut az = vec![0u64; lw];
            for r in 0..rows {
                let rx = &mut xs[r * w..(r + 1) * w];
                let rz = &mut zs[r * w..(r + 1) * w];
                if touch.iter().all(|&(wi, m)| (rx[wi] | rz[wi]) & m == 0) {
                    continue;
                }
                ax.fill(0);
                az.fill(0);
                let mut log = 0u32;
                for &(wi, m) in &touch {
                    let (bx, bz) = (rx[wi] & m, rz[wi] & m);
                    let mut v = bx | bz;
                    while v != 0 {
                        let b = v.trailing_zeros();
                        v &= v - 1;
                        // 1 = X, 2 = Z, 3 = Y
                        let l = ((bx >> b) & 1) | (((bz >> b) & 1) << 1);
                        let j = local[wi * 64 + b as usize - lo] as usize;
                        let im = &imgs[(l as usize) - 1][j];
                        if signs {
                            log += bits::mul_log_i(&mut ax, &mut az, &im.x, &im.z) as u32
                                + 2 * im.neg as u32;
                        } else {
                            bits::xor_into(&mut ax, &im.x);
                            bits::xor_into(&mut az, &im.z);
                        }
                    }
                    rx[wi] &= !m;
                    rz[wi] &= !m;
                }
                debug_assert_eq!(log & 1, 0);
                for (wj, (&x, &z)) in ax.iter().zip(&az).enumerate() {
                    let mut v = x | z;
                    while v != 0 {
                        let b = v.trailing_zeros();
                        v &= v - 1;
                        let q = support[wj * 64 + b as usize];
                        rx[q >> 6] |= ((x >> b) & 1) << (q & 63);
                        rz[q >> 6] |= ((z >> b) & 1) << (q & 63);
                    }
                }
                neg[r] ^= log & 3 == 2;
            }
        }
    }
}
