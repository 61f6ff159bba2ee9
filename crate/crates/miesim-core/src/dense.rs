//! Small exact statevector simulator, used as a cross-check for the tableau
//! engine and as the marginal engine of the gate-by-gate sampler.
//!
//! Qubit `q` is bit `q` of the basis index. A `k`-qubit matrix acting on
//! `support` is indexed the same way locally: bit `j` is `support[j]`.

use num_complex::Complex64;
use rand::Rng;

use crate::arch::{
    brickwork_template, CircuitTemplate, CliffordCircuit, GateSupport, SamplerPolicy,
};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::PauliString;
use crate::seed::{mix, par_trials, rng_from_seed};
use crate::tableau::check_support;

/// Largest state the oracle will allocate.
pub const DENSE_CAP: usize = 20;
/// Largest gate arity accepted by [`DenseState::apply_unitary`].
pub const MAX_DENSE_ARITY: usize = 4;
pub const MAX_MARGINAL_QUBITS: usize = 16;
pub const MAX_PURITY_REGION: usize = 10;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    if n > DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense qubits",
            got: n,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// Bits of `b` at `positions`, packed in order.
#[inline]
fn gather(b: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | ((b >> q) & 1) << i)
}

#[inline]
fn scatter(v: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | ((v >> i) & 1) << q)
}

impl DenseState {
    /// `|0ⁿ⟩`.
    pub fn new_zero(n: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(n)?;
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        let s = DenseState { n, amps };
        if (s.norm_sqr() - 1.0).abs() > UNITARY_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm² is {}, expected 1",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply a `2^k × 2^k` row-major unitary to `support`.
    pub fn apply_unitary(&mut self, m: &[Complex64], support: &[usize]) -> Result<()> {
        let k = support.len();
        if k == 0 || k > MAX_DENSE_ARITY {
            return Err(Error::CapExceeded {
                what: "dense gate arity",
                got: k,
                cap: MAX_DENSE_ARITY,
            });
        }
        check_support(self.n, support)?;
        let dim = 1 << k;
        if m.len() != dim * dim {
            return Err(Error::SizeMismatch {
                expected: dim * dim,
                got: m.len(),
            });
        }
        let dev = unitarity_defect(m, dim);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.apply_unchecked(m, support);
        Ok(())
    }

    fn apply_unchecked(&mut self, m: &[Complex64], support: &[usize]) {
        let dim = 1 << support.len();
        let mask = scatter(dim - 1, support);
        let offs: Vec<usize> = (0..dim).map(|v| scatter(v, support)).collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (v, &o) in offs.iter().enumerate() {
                buf[v] = self.amps[base | o];
            }
            for (r, &o) in offs.iter().enumerate() {
                let row = &m[r * dim..(r + 1) * dim];
                self.amps[base | o] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
            }
        }
    }

    pub fn apply_clifford(&mut self, g: &CliffordGate, support: &[usize]) -> Result<()> {
        if g.arity() != support.len() {
            return Err(Error::ArityMismatch {
                arity: g.arity(),
                support: support.len(),
            });
        }
        let m = clifford_to_matrix(g)?;
        check_support(self.n, support)?;
        self.apply_unchecked(&m, support);
        Ok(())
    }

    /// `P|ψ⟩` for an n-qubit Pauli.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: p.num_qubits(),
            });
        }
        self.amps = pauli_times_vec(p, &self.amps);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` (real for Hermitian `P`).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: p.num_qubits(),
            });
        }
        let pv = pauli_times_vec(p, &self.amps);
        Ok(self
            .amps
            .iter()
            .zip(&pv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    /// `|⟨a|ψ⟩|²` for every basis state `a`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal over `subset`; entry index bit `i` is qubit `subset[i]`.
    pub fn marginal_distribution(&self, subset: &[usize]) -> Result<Vec<f64>> {
        if subset.len() > MAX_MARGINAL_QUBITS {
            return Err(Error::CapExceeded {
                what: "marginal qubits",
                got: subset.len(),
                cap: MAX_MARGINAL_QUBITS,
            });
        }
        if !subset.is_empty() {
            check_support(self.n, subset)?;
        }
        let mut out = vec![0.0; 1 << subset.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[gather(b, subset)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// `ψ` reshaped as `2^|R| × 2^{n−|R|}` (row = bits on `region`).
    fn split_matrix(&self, region: &[usize]) -> (Vec<Complex64>, usize, usize) {
        let rest: Vec<usize> = (0..self.n).filter(|q| !region.contains(q)).collect();
        let (dr, dc) = (1 << region.len(), 1 << rest.len());
        let mut m = vec![Complex64::new(0.0, 0.0); dr * dc];
        for (b, a) in self.amps.iter().enumerate() {
            m[gather(b, region) * dc + gather(b, &rest)] = *a;
        }
        (m, dr, dc)
    }

    /// `Tr_{rest} |ψ⟩⟨ψ|`, row-major with index bit `i` = `region[i]`.
    pub fn reduced_density_matrix(&self, region: &[usize]) -> Result<Vec<Complex64>> {
        if region.len() > MAX_PURITY_REGION {
            return Err(Error::CapExceeded {
                what: "reduced-state qubits",
                got: region.len(),
                cap: MAX_PURITY_REGION,
            });
        }
        if !region.is_empty() {
            check_support(self.n, region)?;
        }
        let (m, dr, dc) = self.split_matrix(region);
        let mut rho = vec![Complex64::new(0.0, 0.0); dr * dr];
        for i in 0..dr {
            for j in 0..dr {
                rho[i * dr + j] = (0..dc).map(|c| m[i * dc + c] * m[j * dc + c].conj()).sum();
            }
        }
        Ok(rho)
    }

    /// `Tr ρ_R²`, from whichever Gram matrix of the split is smaller.
    pub fn reduced_purity(&self, region: &[usize]) -> Result<f64> {
        if region.len() > MAX_PURITY_REGION {
            return Err(Error::CapExceeded {
                what: "purity region",
                got: region.len(),
                cap: MAX_PURITY_REGION,
            });
        }
        if !region.is_empty() {
            check_support(self.n, region)?;
        }
        let (m, dr, dc) = self.split_matrix(region);
        let mut s = 0.0;
        if dr <= dc {
            for i in 0..dr {
                for j in 0..dr {
                    let g: Complex64 = (0..dc).map(|c| m[i * dc + c] * m[j * dc + c].conj()).sum();
                    s += g.norm_sqr();
                }
            }
        } else {
            for i in 0..dc {
                for j in 0..dc {
                    let g: Complex64 = (0..dr).map(|r| m[r * dc + i].conj() * m[r * dc + j]).sum();
                    s += g.norm_sqr();
                }
            }
        }
        Ok(s)
    }

    /// Project `qubits` onto `outcome` and renormalize; returns the
    /// probability of the outcome.
    pub fn postselect(&mut self, qubits: &[usize], outcome: &[bool]) -> Result<f64> {
        if qubits.len() != outcome.len() {
            return Err(Error::SizeMismatch {
                expected: qubits.len(),
                got: outcome.len(),
            });
        }
        check_support(self.n, qubits)?;
        let want = outcome
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as usize) << i);
        let mut p = 0.0;
        for (b, a) in self.amps.iter_mut().enumerate() {
            if gather(b, qubits) == want {
                p += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if p == 0.0 {
            return Err(Error::ImpossibleOutcome);
        }
        let s = 1.0 / p.sqrt();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(p)
    }

    /// Sample a full computational-basis outcome.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (b, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return b;
            }
        }
        self.amps.len() - 1
    }
}

/// `max |(M M†)_{ij} − δ_{ij}|`.
pub fn unitarity_defect(m: &[Complex64], dim: usize) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s: Complex64 = (0..dim)
                .map(|k| m[i * dim + k] * m[j * dim + k].conj())
                .sum();
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((s - Complex64::new(want, 0.0)).norm());
        }
    }
    dev
}

/// `P v` with `P = ±∏ i^{x_q z_q} X^{x_q} Z^{z_q}` acting on qubits `0..k`.
fn pauli_times_vec(p: &PauliString, v: &[Complex64]) -> Vec<Complex64> {
    let k = p.num_qubits();
    let (mut x, mut z) = (0usize, 0usize);
    for q in 0..k {
        x |= (p.x_bit(q) as usize) << q;
        z |= (p.z_bit(q) as usize) << q;
    }
    let i_pow = ((x & z).count_ones() + if p.is_negative() { 2 } else { 0 }) % 4;
    let phase = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][i_pow as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        let s = if (z & b).count_ones() % 2 == 1 {
            -phase
        } else {
            phase
        };
        out[b ^ x] = s * a;
    }
    out
}

/// A unitary implementing `g` (up to global phase), row-major,
/// `2^k × 2^k`, `k ≤ 4`.
///
/// `U|0⟩` is the common `+1` eigenvector of the `Z` images; column `x` is
/// then `∏_j (U X_j U†)^{x_j} U|0⟩`.
pub fn clifford_to_matrix(g: &CliffordGate) -> Result<Vec<Complex64>> {
    let k = g.arity();
    if k > MAX_DENSE_ARITY {
        return Err(Error::CapExceeded {
            what: "dense gate arity",
            got: k,
            cap: MAX_DENSE_ARITY,
        });
    }
    let dim = 1 << k;
    let mut v0 = None;
    for b in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[b] = Complex64::new(1.0, 0.0);
        for j in 0..k {
            let pv = pauli_times_vec(g.image_z(j), &v);
            for (a, p) in v.iter_mut().zip(pv) {
                *a = (*a + p) * 0.5;
            }
        }
        let nrm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            v.iter_mut().for_each(|a| *a /= nrm);
            v0 = Some(v);
            break;
        }
    }
    let v0 = v0.expect("stabilizer projector is nonzero on some basis state");
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for x in 0..dim {
        let mut col = v0.clone();
        for j in 0..k {
            if x >> j & 1 == 1 {
                col = pauli_times_vec(g.image_x(j), &col);
            }
        }
        for (r, a) in col.into_iter().enumerate() {
            m[r * dim + x] = a;
        }
    }
    Ok(m)
}

/// Statevector of `D|0ⁿ⟩` for a circuit of gates with arity ≤ 4.
pub fn run_clifford_circuit(c: &CliffordCircuit) -> Result<DenseState> {
    let mut s = DenseState::new_zero(c.n())?;
    for (g, sup) in c.gates().iter().zip(c.template().gates()) {
        s.apply_clifford(g, &sup.qubits)?;
    }
    Ok(s)
}

/// Total variation distance `½ Σ |p − q|`.
pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Unstructured template: up to 10 qubits, gates of arity 1 to 3 on random
/// qubit sets.
fn random_template<R: Rng + ?Sized>(rng: &mut R) -> Result<CircuitTemplate> {
    let n = rng.gen_range(1..=10);
    let count = rng.gen_range(0..16);
    let gates = (0..count)
        .map(|i| {
            let k = rng.gen_range(1..=n.min(3));
            let qubits = rand::seq::index::sample(rng, n, k).into_vec();
            GateSupport {
                layer: i + 1,
                qubits,
            }
        })
        .collect();
    CircuitTemplate::new(n, None, gates, count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineCheckReport {
    pub circuits: usize,
    pub max_tvd: f64,
    pub max_purity_diff: f64,
    pub pass: bool,
}

/// Random brickwork and unstructured circuits on at most 10 qubits: compare the
/// tableau's exact output distribution and region purities with the
/// statevector's.
pub fn engine_equivalence_check(circuits: usize, seed: u64) -> Result<EngineCheckReport> {
    const SHAPES: [(usize, usize); 6] = [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4), (2, 5)];
    let res: Vec<Result<(f64, f64)>> = par_trials(circuits, |i| {
        let mut rng = rng_from_seed(mix(seed, "engine-check", i as u64));
        let t = if i % 2 == 0 {
            let (r, c) = SHAPES[rng.gen_range(0..SHAPES.len())];
            brickwork_template(r, c, rng.gen_range(0..7))?
        } else {
            random_template(&mut rng)?
        };
        let circ = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, rng.gen());
        let tab = circ.run();
        let dense = run_clifford_circuit(&circ)?;
        let n = circ.n();
        let mut exact = vec![0.0; 1 << n];
        for (b, p) in tab.output_distribution() {
            exact[b as usize] = p.to_f64();
        }
        let t = tvd(&exact, &dense.probabilities());
        let mut pd: f64 = 0.0;
        for _ in 0..3 {
            let region: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let a = tab.region_purity(&region)?.to_f64();
            let b = dense.reduced_purity(&region)?;
            pd = pd.max((a - b).abs());
        }
        Ok((t, pd))
    });
    let mut max_tvd: f64 = 0.0;
    let mut max_purity_diff: f64 = 0.0;
    for r in res {
        let (t, p) = r?;
        max_tvd = max_tvd.max(t);
        max_purity_diff = max_purity_diff.max(p);
    }
    Ok(EngineCheckReport {
        circuits,
        max_tvd,
        max_purity_diff,
        pass: max_tvd < 1e-9 && max_purity_diff < 1e-9,
    })
}
