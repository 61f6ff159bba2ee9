//! Gate-by-gate sampling for circuits of nearest-neighbour CNOTs and
//! single-qubit unitaries on a grid.
//!
//! The sampler keeps a bit string `x`, starting from `0ⁿ`. A CNOT updates
//! `x` by parity. A single-qubit gate `U_t` on qubit `a` resamples `x_a` from
//! the conditional distribution of `a` given the bits of the shield
//! `B = Square_L(a) \ {a}` in the state `ψ_t = U_t ⋯ U_1 |0ⁿ⟩`, with the rest
//! of the lattice traced out. Conditioning on every other qubit instead
//! ([`Conditioning::Full`]) makes the sampler exact.

mod checks;
mod schedule;
mod suite;
pub mod text;

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::arch::{GridGeometry, DEFAULT_BRICK_ORDER};
use crate::dense::{
    clifford_to_matrix, unitarity_defect, DenseState, DENSE_CAP, MAX_MARGINAL_QUBITS,
};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::sampling::{enumerate_clifford_group, sample_uniform_clifford};
use crate::seed::{par_trials, trial_rng};
use crate::tableau::StabilizerTableau;

pub use checks::{
    exact_gbg_distribution, full_conditioning_error, ideal_distribution,
    purity_fidelity_identity_check, tvd_bound_check, PurityFidelityReport, TvdReport,
};
pub use schedule::{
    asap_layers, plan_parallel_schedule, validate_schedule, LayerSchedule, ParallelSchedule,
    UpdateGroup, UpdateRegion,
};
pub use suite::{
    exactness_suite, identity_suite, random_grid, schedule_suite, tvd_suite, SuiteCase,
    SuiteReport, SUITE_DENSITY,
};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Probabilities below this are treated as zero when conditioning.
const ZERO_PROB: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GbgGate {
    Cnot {
        control: usize,
        target: usize,
    },
    /// Row-major 2×2 unitary.
    U1 {
        qubit: usize,
        matrix: [Complex64; 4],
    },
}

impl GbgGate {
    pub fn u1_clifford(qubit: usize, g: &CliffordGate) -> Result<GbgGate> {
        if g.arity() != 1 {
            return Err(Error::ArityMismatch {
                arity: g.arity(),
                support: 1,
            });
        }
        let m = clifford_to_matrix(g)?;
        Ok(GbgGate::U1 {
            qubit,
            matrix: [m[0], m[1], m[2], m[3]],
        })
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GbgGate::Cnot { control, target } => vec![control, target],
            GbgGate::U1 { qubit, .. } => vec![qubit],
        }
    }

    pub fn is_single(&self) -> bool {
        matches!(self, GbgGate::U1 { .. })
    }

    /// The Clifford gate this equals up to a global phase, on the support
    /// [`GbgGate::qubits`].
    pub fn clifford(&self) -> Option<CliffordGate> {
        match self {
            GbgGate::Cnot { .. } => Some(CliffordGate::cnot()),
            GbgGate::U1 { matrix, .. } => single_qubit_cliffords()
                .iter()
                .find(|(_, m)| {
                    // |tr(M† U)| = 2 iff U = e^{iφ} M
                    let tr: Complex64 = (0..4).map(|i| m[i].conj() * matrix[i]).sum();
                    (tr.norm() - 2.0).abs() < 1e-9
                })
                .map(|(g, _)| g.clone()),
        }
    }

    fn matrix(&self) -> Vec<Complex64> {
        match self {
            // local bit 0 = control, bit 1 = target
            GbgGate::Cnot { .. } => vec![
                C1, C0, C0, C0, C0, C0, C0, C1, C0, C0, C1, C0, C0, C1, C0, C0,
            ],
            GbgGate::U1 { matrix, .. } => matrix.to_vec(),
        }
    }
}

fn single_qubit_cliffords() -> &'static [(CliffordGate, [Complex64; 4])] {
    static TABLE: OnceLock<Vec<(CliffordGate, [Complex64; 4])>> = OnceLock::new();
    TABLE.get_or_init(|| {
        enumerate_clifford_group(1)
            .expect("one-qubit group")
            .into_iter()
            .map(|g| {
                let m = clifford_to_matrix(&g).expect("one-qubit matrix");
                (g, [m[0], m[1], m[2], m[3]])
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbgCircuit {
    grid: GridGeometry,
    gates: Vec<GbgGate>,
}

impl GbgCircuit {
    /// Checks that CNOTs join grid neighbours and single-qubit matrices are
    /// unitary within 1e-10.
    pub fn new(grid: GridGeometry, gates: Vec<GbgGate>) -> Result<Self> {
        let n = grid.n();
        for (i, g) in gates.iter().enumerate() {
            for q in g.qubits() {
                if q >= n {
                    return Err(Error::QubitOutOfRange { index: q, n });
                }
            }
            match *g {
                GbgGate::Cnot { control, target } => {
                    if !grid.adjacent(control, target) {
                        return Err(Error::InvalidGate(format!(
                            "gate {i}: CNOT {control}->{target} does not join grid neighbours"
                        )));
                    }
                }
                GbgGate::U1 { matrix, .. } => {
                    let d = unitarity_defect(&matrix, 2);
                    // written negated so NaN entries are rejected too
                    if !(d <= 1e-10) {
                        return Err(Error::NotUnitary(d));
                    }
                }
            }
        }
        Ok(GbgCircuit { grid, gates })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> GridGeometry {
        self.grid
    }

    pub fn gates(&self) -> &[GbgGate] {
        &self.gates
    }

    /// Indices of the single-qubit gates.
    pub fn gamma(&self) -> Vec<usize> {
        (0..self.gates.len())
            .filter(|&i| self.gates[i].is_single())
            .collect()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| g.clifford().is_some())
    }

    /// `ψ_t` on all qubits, `t` gates applied.
    pub fn dense_prefix(&self, t: usize) -> Result<DenseState> {
        let mut s = DenseState::new_zero(self.n())?;
        for g in &self.gates[..t] {
            s.apply_unitary(&g.matrix(), &g.qubits())?;
        }
        Ok(s)
    }

    /// `ψ_t` restricted to the backward lightcone of `targets`: the state of
    /// the lightcone qubits (in increasing order) after the gates of the
    /// first `t` that can influence `targets`. Its marginal on `targets`
    /// equals that of the full `ψ_t`.
    pub fn lightcone_prefix(
        &self,
        t: usize,
        targets: &[usize],
        cap: usize,
    ) -> Result<(Vec<usize>, DenseState)> {
        let n = self.n();
        let mut inside = vec![false; n];
        for &q in targets {
            inside[q] = true;
        }
        let mut kept = Vec::new();
        for i in (0..t).rev() {
            let qs = self.gates[i].qubits();
            if qs.iter().any(|&q| inside[q]) {
                qs.iter().for_each(|&q| inside[q] = true);
                kept.push(i);
            }
        }
        let qubits: Vec<usize> = (0..n).filter(|&q| inside[q]).collect();
        let cap = cap.min(DENSE_CAP);
        if qubits.len() > cap {
            return Err(Error::CapExceeded {
                what: "lightcone qubits",
                cap,
                got: qubits.len(),
            });
        }
        let mut local = vec![usize::MAX; n];
        for (j, &q) in qubits.iter().enumerate() {
            local[q] = j;
        }
        let mut s = DenseState::new_zero(qubits.len())?;
        for &i in kept.iter().rev() {
            let g = &self.gates[i];
            let sup: Vec<usize> = g.qubits().iter().map(|&q| local[q]).collect();
            s.apply_unitary(&g.matrix(), &sup)?;
        }
        Ok((qubits, s))
    }

    /// `ψ_t` as a tableau; every one of the first `t` gates must be Clifford.
    fn tableau_prefix(&self, t: usize) -> Result<StabilizerTableau> {
        let mut tab = StabilizerTableau::new_zero_state(self.n())?;
        for (i, g) in self.gates[..t].iter().enumerate() {
            let c = g.clifford().ok_or(Error::NotClifford(i))?;
            tab.apply_gate(&c, &g.qubits())?;
        }
        Ok(tab)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Dense simulation of the lightcone of `A ∪ B`, up to a qubit cap.
    DenseLightcone,
    /// Stabilizer arithmetic on the full state; all gates must be Clifford.
    CliffordExact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conditioning {
    /// Condition on the shield square only (trace out the rest).
    Shield,
    /// Condition on every other qubit.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GbgConfig {
    /// Side of the shield square; odd.
    pub l: usize,
    pub backend: Backend,
    /// Largest lightcone the dense backend will simulate.
    pub cap: usize,
    pub conditioning: Conditioning,
}

impl GbgConfig {
    pub fn new(l: usize) -> Self {
        GbgConfig {
            l,
            backend: Backend::DenseLightcone,
            cap: DENSE_CAP,
            conditioning: Conditioning::Shield,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "shield side L must be odd and positive, got {}",
                self.l
            )));
        }
        if self.cap == 0 {
            return Err(Error::InvalidParameter(
                "lightcone cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `Square_L(a) \ {a}`: qubits at horizontal and vertical distance at most
/// `L/2` from `a`, clipped at the grid boundary.
pub fn shield(grid: GridGeometry, a: usize, l: usize) -> Vec<usize> {
    grid.square_around(a, l / 2)
        .into_iter()
        .filter(|&q| q != a)
        .collect()
}

/// `[q̃(0), q̃(1)]` for qubit `a` in `ψ_t` given bits `x_b` on `b`, with
/// everything outside `{a} ∪ b` traced out. Returns
/// [`Error::ImpossibleOutcome`] if `x_b` has probability zero.
pub fn conditional_dist(
    circuit: &GbgCircuit,
    t: usize,
    a: usize,
    b: &[usize],
    x_b: &[bool],
    backend: Backend,
    cap: usize,
) -> Result<[f64; 2]> {
    if b.len() != x_b.len() {
        return Err(Error::SizeMismatch {
            expected: b.len(),
            got: x_b.len(),
        });
    }
    if t > circuit.gates.len() {
        return Err(Error::InvalidParameter(format!(
            "prefix length {t} exceeds {} gates",
            circuit.gates.len()
        )));
    }
    let mut targets = vec![a];
    targets.extend_from_slice(b);
    crate::tableau::check_support(circuit.n(), &targets)?;
    let (p0, p1) = match backend {
        Backend::DenseLightcone => {
            let mut s = dense_marginal_state(circuit, t, &targets, cap)?;
            let pb = match s.0.postselect(&s.1[1..], x_b) {
                Ok(p) => p,
                Err(Error::ImpossibleOutcome) => 0.0,
                Err(e) => return Err(e),
            };
            if pb <= ZERO_PROB {
                return Err(Error::ImpossibleOutcome);
            }
            let m = s.0.marginal_distribution(&s.1[..1])?;
            (m[0], m[1])
        }
        Backend::CliffordExact => {
            let tab = circuit.tableau_prefix(t)?;
            let mut bits = vec![false];
            bits.extend_from_slice(x_b);
            let p0 = tab.outcome_probability(&targets, &bits)?.to_f64();
            bits[0] = true;
            let p1 = tab.outcome_probability(&targets, &bits)?.to_f64();
            if p0 + p1 == 0.0 {
                return Err(Error::ImpossibleOutcome);
            }
            (p0, p1)
        }
    };
    let s = p0 + p1;
    Ok([p0 / s, p1 / s])
}

/// Lightcone state and the local positions of `targets` in it.
fn dense_marginal_state(
    circuit: &GbgCircuit,
    t: usize,
    targets: &[usize],
    cap: usize,
) -> Result<(DenseState, Vec<usize>)> {
    let (qubits, s) = circuit.lightcone_prefix(t, targets, cap)?;
    let pos = targets
        .iter()
        .map(|q| {
            qubits
                .binary_search(q)
                .expect("target in its own lightcone")
        })
        .collect();
    Ok((s, pos))
}

/// Precomputed conditional for one single-qubit gate: `p1[x_B] = q̃(1|x_B)`,
/// NaN where `x_B` has probability zero.
#[derive(Clone, Debug)]
struct CondTable {
    b: Vec<usize>,
    p1: Vec<f64>,
}

impl CondTable {
    fn index(&self, x: &[bool]) -> usize {
        self.b
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (x[q] as usize) << i)
    }

    fn index_bits(&self, x: usize) -> usize {
        self.b
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | ((x >> q) & 1) << i)
    }
}

fn conditioning_set(circuit: &GbgCircuit, config: &GbgConfig, a: usize) -> Vec<usize> {
    match config.conditioning {
        Conditioning::Shield => shield(circuit.grid, a, config.l),
        Conditioning::Full => (0..circuit.n()).filter(|&q| q != a).collect(),
    }
}

fn build_table(circuit: &GbgCircuit, config: &GbgConfig, i: usize) -> Result<CondTable> {
    let GbgGate::U1 { qubit: a, .. } = circuit.gates[i] else {
        unreachable!("tables are built for single-qubit gates")
    };
    let b = conditioning_set(circuit, config, a);
    let mut targets = vec![a];
    targets.extend_from_slice(&b);
    if targets.len() > MAX_MARGINAL_QUBITS {
        return Err(Error::CapExceeded {
            what: "conditioning qubits",
            cap: MAX_MARGINAL_QUBITS,
            got: targets.len(),
        });
    }
    let (s, pos) = dense_marginal_state(circuit, i + 1, &targets, config.cap)?;
    let m = s.marginal_distribution(&pos)?;
    let p1 = (0..1usize << b.len())
        .map(|xb| {
            let (p0, p1) = (m[xb << 1], m[xb << 1 | 1]);
            if p0 + p1 <= ZERO_PROB {
                f64::NAN
            } else {
                p1 / (p0 + p1)
            }
        })
        .collect();
    Ok(CondTable { b, p1 })
}

/// A sampler for one circuit and configuration. With the dense backend all
/// conditional tables are built up front, so sampling is a table walk.
#[derive(Clone, Debug)]
pub struct GbgSampler {
    circuit: GbgCircuit,
    config: GbgConfig,
    /// Indexed by gate; `None` for CNOTs and for the Clifford backend.
    tables: Vec<Option<CondTable>>,
    cliffords: Vec<Option<CliffordGate>>,
}

impl GbgSampler {
    pub fn new(circuit: &GbgCircuit, config: GbgConfig) -> Result<Self> {
        config.validate()?;
        let m = circuit.gates.len();
        let mut tables = vec![None; m];
        let mut cliffords = vec![None; m];
        match config.backend {
            Backend::DenseLightcone => {
                for i in circuit.gamma() {
                    tables[i] = Some(build_table(circuit, &config, i)?);
                }
            }
            Backend::CliffordExact => {
                for (i, g) in circuit.gates.iter().enumerate() {
                    cliffords[i] = Some(g.clifford().ok_or(Error::NotClifford(i))?);
                }
            }
        }
        Ok(GbgSampler {
            circuit: circuit.clone(),
            config,
            tables,
            cliffords,
        })
    }

    pub fn circuit(&self) -> &GbgCircuit {
        &self.circuit
    }

    pub fn config(&self) -> GbgConfig {
        self.config
    }

    /// One run of the sampler.
    ///
    /// # Panics
    /// If a conditioning string of probability zero is reached, which exact
    /// arithmetic rules out.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let n = self.circuit.n();
        let mut x = vec![false; n];
        let mut tab = match self.config.backend {
            Backend::CliffordExact => Some(StabilizerTableau::new_zero_state(n).expect("n >= 1")),
            Backend::DenseLightcone => None,
        };
        for (i, g) in self.circuit.gates.iter().enumerate() {
            if let Some(t) = tab.as_mut() {
                t.apply_gate(self.cliffords[i].as_ref().unwrap(), &g.qubits())
                    .expect("validated support");
            }
            match *g {
                GbgGate::Cnot { control, target } => x[target] ^= x[control],
                GbgGate::U1 { qubit: a, .. } => {
                    let p1 = match &self.tables[i] {
                        Some(tbl) => tbl.p1[tbl.index(&x)],
                        None => clifford_conditional(
                            tab.as_ref().unwrap(),
                            &self.circuit,
                            &self.config,
                            a,
                            &x,
                        ),
                    };
                    assert!(
                        !p1.is_nan(),
                        "gate {i}: sampler reached a conditioning string of probability zero"
                    );
                    x[a] = rng.gen::<f64>() < p1;
                }
            }
        }
        x
    }

    /// `count` independent runs; run `i` draws from `trial_rng(seed, "gbg", i)`,
    /// so the result does not depend on the worker count.
    pub fn sample_many(&self, count: usize, seed: u64) -> Vec<Vec<bool>> {
        par_trials(count, |i| {
            self.sample(&mut trial_rng(seed, "gbg", i as u64))
        })
    }
}

fn clifford_conditional(
    tab: &StabilizerTableau,
    circuit: &GbgCircuit,
    config: &GbgConfig,
    a: usize,
    x: &[bool],
) -> f64 {
    let b = conditioning_set(circuit, config, a);
    let mut targets = vec![a];
    targets.extend_from_slice(&b);
    let mut bits: Vec<bool> = targets.iter().map(|&q| x[q]).collect();
    bits[0] = false;
    let p0 = tab
        .outcome_probability(&targets, &bits)
        .expect("valid support")
        .to_f64();
    bits[0] = true;
    let p1 = tab
        .outcome_probability(&targets, &bits)
        .expect("valid support")
        .to_f64();
    if p0 + p1 == 0.0 {
        f64::NAN
    } else {
        p1 / (p0 + p1)
    }
}

/// One sample from the gate-by-gate distribution; equal to the first sample
/// of [`GbgSampler::sample_many`] with the same seed.
pub fn run_gbg(circuit: &GbgCircuit, config: GbgConfig, seed: u64) -> Result<Vec<bool>> {
    let s = GbgSampler::new(circuit, config)?;
    Ok(s.sample(&mut trial_rng(seed, "gbg", 0)))
}

/// Haar-random 2×2 unitary (a uniform unit quaternion).
pub fn haar_u1<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    let mut q = [0.0f64; 4];
    let mut nrm = 0.0;
    while nrm < 1e-12 {
        for v in q.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        nrm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let [a, b, c, d] = q.map(|v| v / nrm);
    let (u, v) = (Complex64::new(a, b), Complex64::new(c, d));
    [u, -v.conj(), v, u.conj()]
}

/// A random circuit with `layers` rounds. Each round puts a single-qubit
/// gate on every qubit with probability `density`, then CNOTs of random
/// orientation along one brick colour (cycling through the four).
pub fn random_gbg_circuit<R: Rng + ?Sized>(
    grid: GridGeometry,
    layers: usize,
    density: f64,
    clifford_only: bool,
    rng: &mut R,
) -> GbgCircuit {
    let mut gates = Vec::new();
    for layer in 0..layers {
        for q in 0..grid.n() {
            if rng.gen::<f64>() < density {
                let g = if clifford_only {
                    let c = sample_uniform_clifford(1, rng).expect("k = 1");
                    GbgGate::u1_clifford(q, &c).expect("one-qubit Clifford")
                } else {
                    GbgGate::U1 {
                        qubit: q,
                        matrix: haar_u1(rng),
                    }
                };
                gates.push(g);
            }
        }
        for [p, q] in DEFAULT_BRICK_ORDER[layer % 4].edges(grid) {
            let (control, target) = if rng.gen() { (p, q) } else { (q, p) };
            gates.push(GbgGate::Cnot { control, target });
        }
    }
    GbgCircuit::new(grid, gates).expect("generated circuit is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn h_at(q: usize) -> GbgGate {
        GbgGate::u1_clifford(q, &CliffordGate::h()).unwrap()
    }

    fn grid(r: usize, c: usize) -> GridGeometry {
        GridGeometry::new(r, c).unwrap()
    }

    #[test]
    fn circuit_validation() {
        let g = grid(2, 2);
        assert!(GbgCircuit::new(
            g,
            vec![GbgGate::Cnot {
                control: 0,
                target: 3
            }]
        )
        .is_err());
        assert!(GbgCircuit::new(
            g,
            vec![GbgGate::Cnot {
                control: 0,
                target: 4
            }]
        )
        .is_err());
        let bad = [C1, C1, C0, C1];
        assert!(matches!(
            GbgCircuit::new(
                g,
                vec![GbgGate::U1 {
                    qubit: 0,
                    matrix: bad
                }]
            ),
            Err(Error::NotUnitary(_))
        ));
        let c = GbgCircuit::new(
            g,
            vec![
                h_at(0),
                GbgGate::Cnot {
                    control: 0,
                    target: 1,
                },
                h_at(3),
            ],
        )
        .unwrap();
        assert_eq!(c.gamma(), vec![0, 2]);
        assert!(c.is_clifford());
        assert!(GbgConfig {
            l: 2,
            ..GbgConfig::new(1)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn clifford_detection() {
        for (g, _) in single_qubit_cliffords() {
            let u = GbgGate::u1_clifford(0, g).unwrap();
            assert_eq!(u.clifford().as_ref(), Some(g));
        }
        let mut rng = rng_from_seed(3);
        assert!(GbgGate::U1 {
            qubit: 0,
            matrix: haar_u1(&mut rng)
        }
        .clifford()
        .is_none());
        // a phase does not change the gate
        let GbgGate::U1 { matrix, .. } = h_at(0) else {
            unreachable!()
        };
        let ph = Complex64::from_polar(1.0, 0.7);
        assert_eq!(
            GbgGate::U1 {
                qubit: 0,
                matrix: matrix.map(|v| v * ph)
            }
            .clifford(),
            Some(CliffordGate::h())
        );
    }

    #[test]
    fn shield_is_clipped_square_without_center() {
        let g = grid(5, 5);
        assert!(shield(g, 12, 1).is_empty());
        assert_eq!(shield(g, 12, 3), vec![6, 7, 8, 11, 13, 16, 17, 18]);
        assert_eq!(shield(g, 0, 3), vec![1, 5, 6]);
        assert_eq!(shield(g, 12, 5).len(), 24);
    }

    #[test]
    fn cnot_only_circuit_gives_zeros() {
        let g = grid(3, 3);
        let gates = vec![
            GbgGate::Cnot {
                control: 0,
                target: 1,
            },
            GbgGate::Cnot {
                control: 4,
                target: 5,
            },
            GbgGate::Cnot {
                control: 1,
                target: 4,
            },
        ];
        let c = GbgCircuit::new(g, gates).unwrap();
        let s = GbgSampler::new(&c, GbgConfig::new(1)).unwrap();
        assert!(s.sample_many(50, 1).iter().all(|x| x.iter().all(|&b| !b)));
    }

    #[test]
    fn single_hadamard_bit_is_uniform() {
        let c = GbgCircuit::new(grid(2, 3), vec![h_at(4)]).unwrap();
        for backend in [Backend::DenseLightcone, Backend::CliffordExact] {
            let cfg = GbgConfig {
                backend,
                ..GbgConfig::new(3)
            };
            let xs = GbgSampler::new(&c, cfg).unwrap().sample_many(4000, 2);
            let ones = xs.iter().filter(|x| x[4]).count();
            assert!(xs
                .iter()
                .all(|x| x.iter().enumerate().all(|(q, &b)| q == 4 || !b)));
            assert!((ones as f64 / 4000.0 - 0.5).abs() < 0.04, "{ones}");
            assert_eq!(exact_gbg_distribution(&c, cfg).unwrap()[1 << 4], 0.5);
        }
    }

    #[test]
    fn conditional_examples() {
        let g = grid(2, 2);
        let empty = GbgCircuit::new(g, vec![]).unwrap();
        let q = conditional_dist(
            &empty,
            0,
            0,
            &[1, 2],
            &[false, false],
            Backend::DenseLightcone,
            20,
        )
        .unwrap();
        assert_eq!(q, [1.0, 0.0]);
        // Bell pair between 0 and 1
        let bell = GbgCircuit::new(
            g,
            vec![
                h_at(0),
                GbgGate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        for backend in [Backend::DenseLightcone, Backend::CliffordExact] {
            let q = conditional_dist(&bell, 2, 0, &[1], &[true], backend, 20).unwrap();
            assert!((q[1] - 1.0).abs() < 1e-12);
            // partner traced out: uniform whatever is seen on B
            for xb in [[false, false], [true, false]] {
                let q = conditional_dist(&bell, 2, 0, &[2, 3], &xb, backend, 20);
                if xb[0] {
                    assert_eq!(q, Err(Error::ImpossibleOutcome));
                } else {
                    let q = q.unwrap();
                    assert!((q[0] - 0.5).abs() < 1e-12 && (q[1] - 0.5).abs() < 1e-12);
                }
            }
            assert_eq!(
                conditional_dist(&bell, 2, 0, &[1], &[false], backend, 20).unwrap(),
                [1.0, 0.0]
            );
        }
        let mut rng = rng_from_seed(1);
        let t = GbgCircuit::new(
            g,
            vec![GbgGate::U1 {
                qubit: 0,
                matrix: haar_u1(&mut rng),
            }],
        )
        .unwrap();
        assert_eq!(
            conditional_dist(&t, 1, 0, &[], &[], Backend::CliffordExact, 20),
            Err(Error::NotClifford(0))
        );
    }

    #[test]
    fn lightcone_cap_is_enforced() {
        let mut rng = rng_from_seed(5);
        let c = random_gbg_circuit(grid(4, 4), 4, 0.5, false, &mut rng);
        let cfg = GbgConfig {
            cap: 3,
            ..GbgConfig::new(3)
        };
        assert!(matches!(
            GbgSampler::new(&c, cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn backends_agree_on_clifford_circuits() {
        let mut rng = rng_from_seed(8);
        for _ in 0..5 {
            let c = random_gbg_circuit(grid(3, 3), 3, 0.6, true, &mut rng);
            let cfg = GbgConfig::new(3);
            let dense = GbgSampler::new(&c, cfg).unwrap();
            let cliff = GbgSampler::new(
                &c,
                GbgConfig {
                    backend: Backend::CliffordExact,
                    ..cfg
                },
            )
            .unwrap();
            // both backends compute the same conditionals, so seeded runs coincide
            assert_eq!(dense.sample_many(200, 4), cliff.sample_many(200, 4));
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let mut rng = rng_from_seed(9);
        let c = random_gbg_circuit(grid(3, 3), 2, 0.5, false, &mut rng);
        let cfg = GbgConfig::new(3);
        let s = GbgSampler::new(&c, cfg).unwrap();
        assert_eq!(run_gbg(&c, cfg, 11).unwrap(), s.sample_many(3, 11)[0]);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        assert_eq!(
            one.install(|| s.sample_many(100, 11)),
            s.sample_many(100, 11)
        );
    }

    #[test]
    fn haar_gates_are_unitary() {
        let mut rng = rng_from_seed(2);
        for _ in 0..100 {
            assert!(unitarity_defect(&haar_u1(&mut rng), 2) < 1e-12);
        }
    }
}
