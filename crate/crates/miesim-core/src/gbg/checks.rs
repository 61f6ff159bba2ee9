//! Exact distributions for small gate-by-gate instances, the trace-distance
//! bound and the fidelity/purity identity.

use num_complex::Complex64;

use crate::dense::DENSE_CAP;
use crate::error::{Error, Result};
use crate::mie::Tripartition;

use super::{Backend, Conditioning, GbgCircuit, GbgConfig, GbgGate, GbgSampler};

/// Largest `n` for which whole distributions are propagated.
const MAX_EXACT_QUBITS: usize = 16;

#[inline]
fn gather(b: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | ((b >> q) & 1) << i)
}

/// `P_m`: the output distribution of the circuit, indexed by basis state
/// (bit `q` = qubit `q`).
pub fn ideal_distribution(circuit: &GbgCircuit) -> Result<Vec<f64>> {
    Ok(circuit.dense_prefix(circuit.gates().len())?.probabilities())
}

/// The distribution the sampler draws from, by pushing the whole
/// distribution of `x` through the loop: CNOTs permute it, and a
/// single-qubit gate on `a` replaces `W(x)` by
/// `(W(x) + W(x ⊕ e_a)) · q̃(x_a | x_B)`. The conditionals always come from
/// the dense backend.
pub fn exact_gbg_distribution(circuit: &GbgCircuit, config: GbgConfig) -> Result<Vec<f64>> {
    let n = circuit.n();
    if n > MAX_EXACT_QUBITS {
        return Err(Error::CapExceeded {
            what: "exact distribution qubits",
            cap: MAX_EXACT_QUBITS,
            got: n,
        });
    }
    let sampler = GbgSampler::new(
        circuit,
        GbgConfig {
            backend: Backend::DenseLightcone,
            ..config
        },
    )?;
    let mut w = vec![0.0; 1 << n];
    w[0] = 1.0;
    for (i, g) in circuit.gates().iter().enumerate() {
        match *g {
            GbgGate::Cnot { control, target } => {
                for x in 0..w.len() {
                    // swap each pair once, from the member with target bit 0
                    if x >> control & 1 == 1 && x >> target & 1 == 0 {
                        w.swap(x, x | 1 << target);
                    }
                }
            }
            GbgGate::U1 { qubit: a, .. } => {
                let tbl = sampler.tables[i]
                    .as_ref()
                    .expect("dense backend builds every table");
                for x in 0..w.len() {
                    if x >> a & 1 == 1 {
                        continue;
                    }
                    let y = x | 1 << a;
                    let total = w[x] + w[y];
                    if total == 0.0 {
                        continue;
                    }
                    let mut p1 = tbl.p1[tbl.index_bits(x)];
                    if p1.is_nan() {
                        // only rounding noise can put weight here
                        if total > 1e-12 {
                            return Err(Error::ImpossibleOutcome);
                        }
                        p1 = 0.5;
                    }
                    w[x] = total * (1.0 - p1);
                    w[y] = total * p1;
                }
            }
        }
    }
    Ok(w)
}

/// Outcome of [`tvd_bound_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct TvdReport {
    pub n: usize,
    pub l: usize,
    /// `|Γ|`.
    pub single_qubit_gates: usize,
    /// `2 Σ_{t∈Γ} (1 − E Tr ρ̃_t²)^{1/2}`.
    pub rhs: f64,
    /// `‖P̃ − P_m‖₁` with `P̃` propagated exactly.
    pub exact_lhs: f64,
    /// `‖P̂ − P_m‖₁` for the empirical distribution of the samples.
    pub empirical_lhs: f64,
    /// Sampling scale of the empirical L1 distance,
    /// `Σ_x (P_m(x)(1 − P_m(x)) / N)^{1/2}`.
    pub sigma: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Average purity `E_{z_B} Tr ρ̃(z_B)²` of qubit `a` in `state` after
/// measuring `b` and tracing out the rest.
fn average_conditional_purity(amps: &[Complex64], a: usize, b: &[usize]) -> f64 {
    // unnormalized 2x2 blocks ⟨z_B| Tr_C ψψ† |z_B⟩: (m00, m11, m01)
    let mut blocks = vec![(0.0f64, 0.0f64, Complex64::new(0.0, 0.0)); 1 << b.len()];
    for x in 0..amps.len() {
        if x >> a & 1 == 1 {
            continue;
        }
        let (a0, a1) = (amps[x], amps[x | 1 << a]);
        let e = &mut blocks[gather(x, b)];
        e.0 += a0.norm_sqr();
        e.1 += a1.norm_sqr();
        e.2 += a0 * a1.conj();
    }
    // P_B(z) Tr ρ̃² = Tr M² / Tr M
    blocks
        .iter()
        .filter(|e| e.0 + e.1 > 0.0)
        .map(|e| (e.0 * e.0 + e.1 * e.1 + 2.0 * e.2.norm_sqr()) / (e.0 + e.1))
        .sum()
}

/// Compare the sampler's error with the trace-distance bound. The right
/// side is computed exactly from the dense state after each single-qubit
/// gate; the left side both exactly (propagation) and from `samples`
/// independent runs seeded by `seed`. Passes when the exact left side is
/// within 1e-9 of the bound and the empirical one within `3σ`.
pub fn tvd_bound_check(
    circuit: &GbgCircuit,
    l: usize,
    samples: usize,
    seed: u64,
) -> Result<TvdReport> {
    let n = circuit.n();
    if n > DENSE_CAP.min(MAX_EXACT_QUBITS) {
        return Err(Error::CapExceeded {
            what: "bound-check qubits",
            cap: MAX_EXACT_QUBITS,
            got: n,
        });
    }
    let config = GbgConfig::new(l);
    config.validate()?;
    let mut state = circuit.dense_prefix(0)?;
    let mut rhs = 0.0;
    for g in circuit.gates() {
        state.apply_unitary(&g.matrix(), &g.qubits())?;
        if let GbgGate::U1 { qubit: a, .. } = *g {
            let b = super::shield(circuit.grid(), a, l);
            let avg = average_conditional_purity(state.amplitudes(), a, &b);
            rhs += 2.0 * (1.0 - avg).max(0.0).sqrt();
        }
    }
    let p = state.probabilities();
    let exact = exact_gbg_distribution(circuit, config)?;
    let exact_lhs = l1(&exact, &p);

    let sampler = GbgSampler::new(circuit, config)?;
    let mut counts = vec![0u64; 1 << n];
    for x in sampler.sample_many(samples, seed) {
        counts[x
            .iter()
            .enumerate()
            .fold(0, |acc, (q, &b)| acc | (b as usize) << q)] += 1;
    }
    let ns = samples.max(1) as f64;
    let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / ns).collect();
    let empirical_lhs = l1(&emp, &p);
    let sigma: f64 = p
        .iter()
        .map(|&v| (v * (1.0 - v) / ns).max(0.0).sqrt())
        .sum();
    let pass = exact_lhs <= rhs + 1e-9 && empirical_lhs <= rhs + 3.0 * sigma;
    Ok(TvdReport {
        n,
        l,
        single_qubit_gates: circuit.gamma().len(),
        rhs,
        exact_lhs,
        empirical_lhs,
        sigma,
        samples,
        pass,
    })
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PurityFidelityReport {
    /// `E_{z ~ P_BC} F(ρ_t(z), ρ̃_t(z_B))`.
    pub fidelity_side: f64,
    /// `E_{z_B ~ P_B} Tr ρ̃_t(z_B)²`.
    pub purity_side: f64,
    pub diff: f64,
    pub pass: bool,
}

/// Largest `n` accepted by [`purity_fidelity_identity_check`].
pub const MAX_IDENTITY_QUBITS: usize = 12;

/// Both sides of the fidelity/purity identity for `ψ_t` and the
/// tripartition, by enumerating every `z ∈ {0,1}^{|BC|}`. `ρ_t(z)` is pure,
/// so its fidelity with `ρ̃` is `⟨φ_z|ρ̃|φ_z⟩`. Passes within 1e-8.
pub fn purity_fidelity_identity_check(
    circuit: &GbgCircuit,
    t: usize,
    part: &Tripartition,
) -> Result<PurityFidelityReport> {
    let n = circuit.n();
    if part.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: part.n(),
        });
    }
    if n > MAX_IDENTITY_QUBITS {
        return Err(Error::CapExceeded {
            what: "identity-check qubits",
            cap: MAX_IDENTITY_QUBITS,
            got: n,
        });
    }
    if t > circuit.gates().len() {
        return Err(Error::InvalidParameter(format!(
            "prefix length {t} exceeds {} gates",
            circuit.gates().len()
        )));
    }
    let amps = circuit.dense_prefix(t)?.amplitudes().to_vec();
    let (a, b, c) = (part.a(), part.b(), part.c());
    let (da, db, dc) = (1usize << a.len(), 1usize << b.len(), 1usize << c.len());
    // phi[(zb, zc)] is the unnormalized vector on A
    let mut phi = vec![Complex64::new(0.0, 0.0); db * dc * da];
    for (x, amp) in amps.iter().enumerate() {
        let (xa, xb, xc) = (gather(x, a), gather(x, b), gather(x, c));
        phi[(xb * dc + xc) * da + xa] = *amp;
    }
    let mut fidelity_side = 0.0;
    let mut purity_side = 0.0;
    let mut m = vec![Complex64::new(0.0, 0.0); da * da];
    for zb in 0..db {
        // M = Σ_{z_C} φ φ†, so P_B = Tr M and ρ̃ = M / P_B
        m.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for zc in 0..dc {
            let v = &phi[(zb * dc + zc) * da..][..da];
            for i in 0..da {
                for j in 0..da {
                    m[i * da + j] += v[i] * v[j].conj();
                }
            }
        }
        let pb: f64 = (0..da).map(|i| m[i * da + i].re).sum();
        if pb <= 0.0 {
            continue;
        }
        let tr_m2: f64 = m.iter().map(|v| v.norm_sqr()).sum();
        purity_side += tr_m2 / pb;
        for zc in 0..dc {
            let v = &phi[(zb * dc + zc) * da..][..da];
            // P_BC(z) F = ⟨φ|M|φ⟩ / P_B
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    s += v[i].conj() * m[i * da + j] * v[j];
                }
            }
            fidelity_side += s.re / pb;
        }
    }
    let diff = (fidelity_side - purity_side).abs();
    Ok(PurityFidelityReport {
        fidelity_side,
        purity_side,
        diff,
        pass: diff <= 1e-8,
    })
}

/// `max_x |P̃(x) − P_m(x)|` for the sampler with full conditioning, which
/// should vanish.
pub fn full_conditioning_error(circuit: &GbgCircuit) -> Result<f64> {
    let cfg = GbgConfig {
        conditioning: Conditioning::Full,
        ..GbgConfig::new(1)
    };
    let w = exact_gbg_distribution(circuit, cfg)?;
    let p = ideal_distribution(circuit)?;
    Ok(w.iter()
        .zip(&p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
