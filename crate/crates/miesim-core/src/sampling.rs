//! Uniform sampling of Clifford gates and Pauli strings, and exhaustive
//! enumeration of the one- and two-qubit Clifford groups.

use std::collections::{HashSet, VecDeque};

use rand::Rng;

use crate::bits::{self, words_for};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::PauliString;

/// Largest arity accepted by [`sample_uniform_clifford`].
pub const MAX_SAMPLED_ARITY: usize = 4096;

/// Rng-carrying sampler of k-qubit Clifford gates.
pub struct CliffordSampler<R> {
    k: usize,
    rng: R,
}

impl<R: Rng> CliffordSampler<R> {
    pub fn new(k: usize, rng: R) -> Result<Self> {
        check_arity(k)?;
        Ok(CliffordSampler { k, rng })
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn sample(&mut self) -> CliffordGate {
        sample_uniform_clifford(self.k, &mut self.rng).expect("arity checked at construction")
    }
}

fn check_arity(k: usize) -> Result<()> {
    if k == 0 || k > MAX_SAMPLED_ARITY {
        return Err(Error::InvalidParameter(format!(
            "Clifford arity {k} outside 1..={MAX_SAMPLED_ARITY}"
        )));
    }
    Ok(())
}

/// `⟨a, b⟩` for rows stored as `[x words | z words]`.
#[inline]
fn symp(a: &[u64], b: &[u64], lw: usize) -> bool {
    let mut c = 0u64;
    for w in 0..lw {
        c ^= (a[w] & b[lw + w]) ^ (a[lw + w] & b[w]);
    }
    c.count_ones() & 1 == 1
}

#[inline]
fn xor_row(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Uniformly random k-qubit Clifford gate (modulo global phase).
///
/// The images of `X_i, Z_i` are chosen one pair at a time: `a` uniform over the
/// nonzero vectors of the current symplectic subspace, `b` uniform over the
/// vectors in it with `⟨a, b⟩ = 1`. The remaining basis is then projected onto
/// the symplectic complement of `{a, b}`. Signs are independent fair coins.
pub fn sample_uniform_clifford<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<CliffordGate> {
    check_arity(k)?;
    let lw = words_for(k);
    let rw = 2 * lw;
    // basis rows, row t at [t * rw, (t + 1) * rw)
    let mut basis = vec![0u64; 2 * k * rw];
    for j in 0..k {
        bits::set(&mut basis[2 * j * rw..], j, true);
        bits::set(&mut basis[(2 * j + 1) * rw + lw..], j, true);
    }
    let mut m = 2 * k;
    let mut xs = Vec::with_capacity(k);
    let mut zs = Vec::with_capacity(k);
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut a = vec![0u64; rw];
    let mut c = vec![0u64; rw];
    for _ in 0..k {
        random_bits(rng, m, &mut alpha);
        while alpha.iter().all(|&w| w == 0) {
            random_bits(rng, m, &mut alpha);
        }
        random_bits(rng, m, &mut beta);
        a.fill(0);
        c.fill(0);
        for_each_set(&alpha, |t| xor_row(&mut a, &basis[t * rw..(t + 1) * rw]));
        for_each_set(&beta, |t| xor_row(&mut c, &basis[t * rw..(t + 1) * rw]));
        if !symp(&a, &c, lw) {
            // shift b by a fixed basis vector with ⟨a, c⟩ = 1: a bijection onto
            // the vectors with ⟨a, b⟩ = 1
            let tc = (0..m)
                .find(|&t| symp(&a, &basis[t * rw..], lw))
                .expect("nondegenerate subspace");
            xor_row(&mut c, &basis[tc * rw..(tc + 1) * rw]);
            let v = !bits::get(&beta, tc);
            bits::set(&mut beta, tc, v);
        }
        // drop two basis vectors to make room for a and b
        let t0 = (0..m).find(|&t| bits::get(&alpha, t)).unwrap();
        let b0 = bits::get(&beta, t0);
        let t1 = (0..m)
            .find(|&t| t != t0 && (bits::get(&beta, t) ^ (b0 && bits::get(&alpha, t))))
            .expect("b independent of a");
        for t in [t0.max(t1), t0.min(t1)] {
            m -= 1;
            if t != m {
                basis.copy_within(m * rw..(m + 1) * rw, t * rw);
            }
        }
        for row in basis[..m * rw].chunks_exact_mut(rw) {
            let (mut pa, mut pc) = (0u64, 0u64);
            for w in 0..lw {
                pa ^= (row[w] & a[lw + w]) ^ (row[lw + w] & a[w]);
                pc ^= (row[w] & c[lw + w]) ^ (row[lw + w] & c[w]);
            }
            if pc.count_ones() & 1 == 1 {
                xor_row(row, &a);
            }
            if pa.count_ones() & 1 == 1 {
                xor_row(row, &c);
            }
        }
        xs.push(PauliString::from_words(
            k,
            a[..lw].to_vec(),
            a[lw..].to_vec(),
            rng.gen(),
        ));
        zs.push(PauliString::from_words(
            k,
            c[..lw].to_vec(),
            c[lw..].to_vec(),
            rng.gen(),
        ));
    }
    xs.extend(zs);
    CliffordGate::from_images_unchecked(xs)
}

fn for_each_set(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut v = w;
        while v != 0 {
            f(wi * 64 + v.trailing_zeros() as usize);
            v &= v - 1;
        }
    }
}

fn random_bits<R: Rng + ?Sized>(rng: &mut R, m: usize, out: &mut Vec<u64>) {
    out.clear();
    let w = words_for(m);
    out.extend((0..w).map(|_| rng.gen::<u64>()));
    if !m.is_multiple_of(64) {
        out[w - 1] &= (1u64 << (m % 64)) - 1;
    }
}

/// Uniform over the `4^k − 1` non-identity unsigned Paulis, sign `+`.
pub fn sample_nonidentity_pauli<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<PauliString> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "Pauli length must be at least 1".into(),
        ));
    }
    let w = words_for(k);
    loop {
        let mut x = Vec::new();
        let mut z = Vec::new();
        random_bits(rng, k, &mut x);
        random_bits(rng, k, &mut z);
        if x.iter().chain(&z).any(|&v| v != 0) {
            debug_assert_eq!(x.len(), w);
            return Ok(PauliString::from_words(k, x, z, false));
        }
    }
}

/// Every element of the k-qubit Clifford group modulo phase, `k ∈ {1, 2}`,
/// by breadth-first closure over `H`, `S` on each qubit and `CNOT`.
pub fn enumerate_clifford_group(k: usize) -> Result<Vec<CliffordGate>> {
    let gens: Vec<CliffordGate> = match k {
        1 => vec![CliffordGate::h(), CliffordGate::s()],
        2 => {
            let id = CliffordGate::identity(1);
            vec![
                CliffordGate::h().tensor(&id),
                id.tensor(&CliffordGate::h()),
                CliffordGate::s().tensor(&id),
                id.tensor(&CliffordGate::s()),
                CliffordGate::cnot(),
            ]
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "group enumeration supports k ∈ {{1, 2}}, got {k}"
            )))
        }
    };
    let start = CliffordGate::identity(k);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(g) = queue.pop_front() {
        for h in &gens {
            let next = g.then(h);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
        out.push(g);
    }
    Ok(out)
}
