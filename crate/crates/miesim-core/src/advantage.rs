//! Local classical strategies against GHZ-type states.
//!
//! A basis choice `b ∈ {0,1,2}³` rotates the triple `(h, i, j)` by
//! `W(b) = Q(b_h) ⊗ Q(b_i) ⊗ Q(b_j)` with `Q(0) = (X+Z)/√2`,
//! `Q(1) = (Y+Z)/√2`, `Q(2) = I`, before a computational-basis measurement.
//! A [`LocalFunction`] guesses the outcome string from `b`, each output bit
//! seeing at most one of `b_h, b_i, b_j`. It fails on `b` when its guess has
//! amplitude zero. For a GHZ-type triple every such function fails on at
//! least one of the 27 choices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::ghz::{extract_triple_state, ghz_witness, is_ghz_type, Triple};
use crate::pauli::PauliString;
use crate::sampling::sample_uniform_clifford;
use crate::seed::rng_from_seed;
use crate::tableau::StabilizerTableau;

/// `b = (b_h, b_i, b_j)`, each in `{0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisChoice(pub [u8; 3]);

impl BasisChoice {
    pub fn new(bh: u8, bi: u8, bj: u8) -> Result<Self> {
        if bh > 2 || bi > 2 || bj > 2 {
            return Err(Error::InvalidParameter(format!(
                "basis choice ({bh}, {bi}, {bj}) outside {{0,1,2}}³"
            )));
        }
        Ok(BasisChoice([bh, bi, bj]))
    }

    /// All 27 choices, `b_h` slowest.
    pub fn all() -> impl Iterator<Item = BasisChoice> {
        (0..27u8).map(|k| BasisChoice([k / 9, k / 3 % 3, k % 3]))
    }

    fn index(self) -> usize {
        let [a, b, c] = self.0;
        (a as usize) * 9 + (b as usize) * 3 + c as usize
    }
}

/// `Q(v)` as a Clifford. `Q(0)` is the Hadamard; `Q(1)` fixes `Y+Z` and
/// sends `X ↦ −X`, `Z ↦ Y`.
pub fn q_gate(v: u8) -> CliffordGate {
    match v {
        0 => CliffordGate::h(),
        1 => CliffordGate::from_images(vec![
            PauliString::parse("-X").unwrap(),
            PauliString::parse("+Y").unwrap(),
        ])
        .expect("valid images"),
        _ => CliffordGate::identity(1),
    }
}

/// `⟨m| W(b) |ψ⟩ = 0`, decided exactly: rotate the triple, then force every
/// qubit's Z outcome to `m`.
pub fn amplitude_is_zero(
    psi: &StabilizerTableau,
    triple: Triple,
    b: BasisChoice,
    m: &[bool],
) -> Result<bool> {
    let n = psi.num_qubits();
    Triple::new(n, triple.h, triple.i, triple.j)?;
    if m.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: m.len(),
        });
    }
    let mut t = psi.clone();
    for (&q, &v) in triple.qubits().iter().zip(&b.0) {
        t.apply_gate(&q_gate(v), &[q])?;
    }
    let all: Vec<usize> = (0..n).collect();
    Ok(t.outcome_probability(&all, m)?.is_zero())
}

/// Which of `b_h, b_i, b_j` an output bit reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dependency {
    None,
    H,
    I,
    J,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutputBit {
    pub dep: Dependency,
    /// Value for input 0, 1, 2. A bit with no dependency uses entry 0 and
    /// must have all three equal.
    pub table: [bool; 3],
}

impl OutputBit {
    pub fn constant(v: bool) -> Self {
        OutputBit {
            dep: Dependency::None,
            table: [v; 3],
        }
    }
}

/// `m : {0,1,2}³ → {0,1}ⁿ` in which every output bit depends on at most one
/// input, and the bits on `h`, `i`, `j` do not read the other two inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalFunction {
    triple: Triple,
    bits: Vec<OutputBit>,
}

impl LocalFunction {
    pub fn new(triple: Triple, bits: Vec<OutputBit>) -> Result<Self> {
        Triple::new(bits.len(), triple.h, triple.i, triple.j)?;
        for (r, b) in bits.iter().enumerate() {
            if b.dep == Dependency::None && (b.table[1] != b.table[0] || b.table[2] != b.table[0]) {
                return Err(Error::InvalidParameter(format!(
                    "output bit {r} has no dependency but is not constant"
                )));
            }
            let own = [
                (triple.h, Dependency::H),
                (triple.i, Dependency::I),
                (triple.j, Dependency::J),
            ];
            if let Some(&(_, d)) = own.iter().find(|(q, _)| *q == r) {
                if b.dep != Dependency::None && b.dep != d {
                    return Err(Error::InvalidParameter(format!(
                        "output bit {r} on the triple reads another party's input"
                    )));
                }
            }
        }
        Ok(LocalFunction { triple, bits })
    }

    pub fn constant(triple: Triple, value: &[bool]) -> Result<Self> {
        Self::new(
            triple,
            value.iter().map(|&v| OutputBit::constant(v)).collect(),
        )
    }

    /// The 512 functions on three qubits in which bit `k` of the triple is
    /// an arbitrary function of its own input (`8 = 2³` tables each,
    /// constants included). Function `id` uses table `id & 7` for `h`,
    /// `(id >> 3) & 7` for `i`, `id >> 6` for `j`; bit `v` of a table is
    /// the value on input `v`.
    pub fn own_input(id: usize) -> LocalFunction {
        assert!(id < 512);
        let t = Triple { h: 0, i: 1, j: 2 };
        let bits = [Dependency::H, Dependency::I, Dependency::J]
            .iter()
            .enumerate()
            .map(|(k, &dep)| {
                let tt = id >> (3 * k) & 7;
                OutputBit {
                    dep,
                    table: [tt & 1 == 1, tt & 2 == 2, tt & 4 == 4],
                }
            })
            .collect();
        LocalFunction { triple: t, bits }
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn triple(&self) -> Triple {
        self.triple
    }

    pub fn bits(&self) -> &[OutputBit] {
        &self.bits
    }

    pub fn eval(&self, b: BasisChoice) -> Vec<bool> {
        self.bits
            .iter()
            .map(|o| match o.dep {
                Dependency::None => o.table[0],
                Dependency::H => o.table[b.0[0] as usize],
                Dependency::I => o.table[b.0[1] as usize],
                Dependency::J => o.table[b.0[2] as usize],
            })
            .collect()
    }
}

/// Failures out of 27, and whether the GHZ-type premise was confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FailureRate {
    pub failures: u32,
    pub verified: bool,
}

impl FailureRate {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / 27.0
    }
}

/// The triple is in a GHZ-type state once every other qubit is measured.
/// The outcomes only change signs, so one fixed run decides it.
pub fn has_ghz_mie(psi: &StabilizerTableau, triple: Triple) -> Result<bool> {
    let n = psi.num_qubits();
    Triple::new(n, triple.h, triple.i, triple.j)?;
    let mut t = psi.clone();
    let mut rng = rng_from_seed(0);
    for q in (0..n).filter(|q| !triple.qubits().contains(q)) {
        t.measure_z(q, &mut rng)?;
    }
    is_ghz_type(&extract_triple_state(&t, triple)?)
}

pub fn failure_rate(psi: &StabilizerTableau, f: &LocalFunction) -> Result<FailureRate> {
    if f.n() != psi.num_qubits() {
        return Err(Error::SizeMismatch {
            expected: psi.num_qubits(),
            got: f.n(),
        });
    }
    let verified = has_ghz_mie(psi, f.triple)?;
    let mut failures = 0;
    for b in BasisChoice::all() {
        failures += amplitude_is_zero(psi, f.triple, b, &f.eval(b))? as u32;
    }
    Ok(FailureRate { failures, verified })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveResult {
    pub functions: usize,
    pub min_failures: u32,
    pub argmin: LocalFunction,
    /// Failures of every function, indexed by [`LocalFunction::own_input`] id.
    pub failures: Vec<u32>,
    pub verified: bool,
}

impl ExhaustiveResult {
    pub fn min_rate(&self) -> f64 {
        self.min_failures as f64 / 27.0
    }
}

/// Minimum failure rate over all 512 own-input functions on a 3-qubit
/// state, triple `(0, 1, 2)`. Zero amplitudes are tabulated once per
/// `(b, m)` pair.
pub fn exhaustive_minimum_failure(psi: &StabilizerTableau) -> Result<ExhaustiveResult> {
    if psi.num_qubits() != 3 {
        return Err(Error::SizeMismatch {
            expected: 3,
            got: psi.num_qubits(),
        });
    }
    let triple = Triple { h: 0, i: 1, j: 2 };
    let mut zero = [[false; 8]; 27];
    for b in BasisChoice::all() {
        for m in 0..8usize {
            let bits = [m & 1 == 1, m & 2 == 2, m & 4 == 4];
            zero[b.index()][m] = amplitude_is_zero(psi, triple, b, &bits)?;
        }
    }
    let failures: Vec<u32> = (0..512)
        .map(|id| {
            let f = LocalFunction::own_input(id);
            BasisChoice::all()
                .filter(|&b| {
                    let m = f
                        .eval(b)
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (k, &v)| acc | (v as usize) << k);
                    zero[b.index()][m]
                })
                .count() as u32
        })
        .collect();
    let (id, &min_failures) = failures
        .iter()
        .enumerate()
        .min_by_key(|e| *e.1)
        .expect("512 functions");
    Ok(ExhaustiveResult {
        functions: failures.len(),
        min_failures,
        argmin: LocalFunction::own_input(id),
        failures,
        verified: has_ghz_mie(psi, triple)?,
    })
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz3() -> StabilizerTableau {
    let mut t = StabilizerTableau::new_zero_state(3).expect("3 qubits");
    t.apply_gate(&CliffordGate::h(), &[0]).expect("valid");
    t.apply_gate(&CliffordGate::cnot(), &[0, 1]).expect("valid");
    t.apply_gate(&CliffordGate::cnot(), &[1, 2]).expect("valid");
    t
}

/// `(C_h ⊗ C_i ⊗ C_j)|GHZ₃⟩` for uniform single-qubit Cliffords.
pub fn rotated_ghz3<R: Rng + ?Sized>(rng: &mut R) -> StabilizerTableau {
    let mut t = ghz3();
    for q in 0..3 {
        t.apply_gate(&sample_uniform_clifford(1, rng).expect("k = 1"), &[q])
            .expect("valid");
    }
    t
}

/// One row of the `state,function_id,rate` report.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageRow {
    pub state: String,
    pub function_id: usize,
    pub failures: u32,
}

impl AdvantageRow {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / 27.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSummary {
    pub state: String,
    pub min_failures: u32,
    pub argmin_id: usize,
    /// A local Clifford witness to GHZ form was found and checked.
    pub witness: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageReport {
    pub rows: Vec<AdvantageRow>,
    pub summaries: Vec<StateSummary>,
}

impl AdvantageReport {
    /// Every state has a verified witness and minimum rate at least 1/27.
    pub fn pass(&self) -> bool {
        self.summaries
            .iter()
            .all(|s| s.witness && s.min_failures >= 1)
    }

    pub fn min_failures(&self) -> u32 {
        self.summaries
            .iter()
            .map(|s| s.min_failures)
            .min()
            .unwrap_or(0)
    }
}

/// Exhaustive search on GHZ₃ and on `rotations` random local-Clifford
/// rotations of it (drawn from `seed`).
pub fn advantage_report(rotations: usize, seed: u64) -> Result<AdvantageReport> {
    let mut rng = rng_from_seed(seed);
    let mut states = vec![("ghz3".to_string(), ghz3())];
    for k in 0..rotations {
        states.push((format!("ghz3-rot{k}"), rotated_ghz3(&mut rng)));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (name, psi) in states {
        let res = exhaustive_minimum_failure(&psi)?;
        let witness = match ghz_witness(&psi) {
            Ok(w) => w.verify(&psi)?,
            Err(Error::NotGhzType) => false,
            Err(e) => return Err(e),
        };
        let argmin_id = res
            .failures
            .iter()
            .position(|&f| f == res.min_failures)
            .expect("minimum is attained");
        rows.extend(
            res.failures
                .iter()
                .enumerate()
                .map(|(id, &failures)| AdvantageRow {
                    state: name.clone(),
                    function_id: id,
                    failures,
                }),
        );
        summaries.push(StateSummary {
            state: name,
            min_failures: res.min_failures,
            argmin_id,
            witness,
        });
    }
    Ok(AdvantageReport { rows, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t012() -> Triple {
        Triple { h: 0, i: 1, j: 2 }
    }

    #[test]
    fn q_gates_conjugate_as_stated() {
        let q1 = q_gate(1);
        q1.validate().unwrap();
        assert_eq!(
            q1.conjugate(&PauliString::parse("Z").unwrap()).to_string(),
            "+Y"
        );
        assert_eq!(
            q1.conjugate(&PauliString::parse("Y").unwrap()).to_string(),
            "+Z"
        );
        assert_eq!(
            q1.conjugate(&PauliString::parse("X").unwrap()).to_string(),
            "-X"
        );
        // Q(b) squares to the identity
        for v in 0..3 {
            assert!(q_gate(v).then(&q_gate(v)).is_identity());
        }
    }

    #[test]
    fn q1_matches_its_matrix() {
        use crate::dense::clifford_to_matrix;
        use num_complex::Complex64;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (Y + Z)/√2
        let want = [
            Complex64::new(s, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, s),
            Complex64::new(-s, 0.0),
        ];
        let m = clifford_to_matrix(&q_gate(1)).unwrap();
        let tr: Complex64 = (0..4).map(|k| want[k].conj() * m[k]).sum();
        assert!((tr.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_examples() {
        let g = ghz3();
        let b = |x, y, z| BasisChoice::new(x, y, z).unwrap();
        assert!(amplitude_is_zero(&g, t012(), b(2, 2, 2), &[true, false, false]).unwrap());
        assert!(!amplitude_is_zero(&g, t012(), b(2, 2, 2), &[true, true, true]).unwrap());
        assert!(!amplitude_is_zero(&g, t012(), b(0, 0, 0), &[false, false, false]).unwrap());
        // ⟨+++|GHZ⟩ ≠ 0 but odd parity in the X basis vanishes
        assert!(amplitude_is_zero(&g, t012(), b(0, 0, 0), &[true, false, false]).unwrap());
        let zero = StabilizerTableau::new_zero_state(3).unwrap();
        assert!(!amplitude_is_zero(&zero, t012(), b(2, 2, 2), &[false, false, false]).unwrap());
        assert!(BasisChoice::new(3, 0, 0).is_err());
        assert_eq!(BasisChoice::all().count(), 27);
    }

    #[test]
    fn function_validation() {
        let t = t012();
        let bad = OutputBit {
            dep: Dependency::I,
            table: [false, true, false],
        };
        assert!(LocalFunction::new(
            t,
            vec![bad, OutputBit::constant(false), OutputBit::constant(false)]
        )
        .is_err());
        let nonconst = OutputBit {
            dep: Dependency::None,
            table: [false, true, false],
        };
        assert!(LocalFunction::new(t, vec![nonconst; 3]).is_err());
        // an extra output bit may read anything
        let t4 = Triple { h: 1, i: 2, j: 3 };
        let extra = OutputBit {
            dep: Dependency::J,
            table: [true, false, true],
        };
        let f = LocalFunction::new(
            t4,
            vec![
                extra,
                OutputBit::constant(true),
                OutputBit::constant(false),
                OutputBit::constant(false),
            ],
        )
        .unwrap();
        assert_eq!(
            f.eval(BasisChoice([0, 0, 1])),
            vec![false, true, false, false]
        );
    }

    #[test]
    fn constant_zero_on_ghz() {
        let f = LocalFunction::constant(t012(), &[false; 3]).unwrap();
        let r = failure_rate(&ghz3(), &f).unwrap();
        assert!(r.verified);
        // the 27-case enumeration is the reference
        let direct = BasisChoice::all()
            .filter(|&b| amplitude_is_zero(&ghz3(), t012(), b, &[false; 3]).unwrap())
            .count() as u32;
        assert_eq!(r.failures, direct);
        assert!(r.failures >= 1);
    }

    #[test]
    fn product_state_can_be_beaten() {
        let zero = StabilizerTableau::new_zero_state(3).unwrap();
        let f = LocalFunction::constant(t012(), &[false; 3]).unwrap();
        let r = failure_rate(&zero, &f).unwrap();
        assert!(!r.verified);
        assert_eq!(r.failures, 0);
        assert_eq!(exhaustive_minimum_failure(&zero).unwrap().min_failures, 0);
    }

    #[test]
    fn exhaustive_on_ghz() {
        let res = exhaustive_minimum_failure(&ghz3()).unwrap();
        assert_eq!(res.functions, 512);
        assert!(res.verified);
        assert!(res.min_failures >= 1, "{res:?}");
        // constants are in the family: ids 0 and 511
        assert!(LocalFunction::own_input(0)
            .bits()
            .iter()
            .all(|b| b.table == [false; 3]));
        assert!(LocalFunction::own_input(511)
            .bits()
            .iter()
            .all(|b| b.table == [true; 3]));
        let f0 = failure_rate(&ghz3(), &LocalFunction::own_input(0)).unwrap();
        assert_eq!(f0.failures, res.failures[0]);
    }

    #[test]
    fn report_on_rotations() {
        let r = advantage_report(5, 1).unwrap();
        assert_eq!(r.rows.len(), 6 * 512);
        assert!(r.pass(), "{:?}", r.summaries);
    }

    #[test]
    fn larger_state_with_ghz_mie() {
        // path graph 0-1-2-3: measuring qubit 3 leaves a GHZ-type triple
        let mut t = StabilizerTableau::new_zero_state(4).unwrap();
        for q in 0..4 {
            t.apply_gate(&CliffordGate::h(), &[q]).unwrap();
        }
        for q in 0..3 {
            t.apply_gate(&CliffordGate::cz(), &[q, q + 1]).unwrap();
        }
        let tr = Triple { h: 0, i: 1, j: 2 };
        assert!(has_ghz_mie(&t, tr).unwrap());
        let f = LocalFunction::constant(tr, &[false; 4]).unwrap();
        let r = failure_rate(&t, &f).unwrap();
        assert!(r.verified && r.failures >= 1);
    }

    proptest! {
        #[test]
        fn relabeling_the_triple_preserves_rate(perm in 0usize..6, id in 0usize..512, seed in any::<u64>()) {
            let psi = rotated_ghz3(&mut rng_from_seed(seed));
            let f = LocalFunction::own_input(id);
            let base = failure_rate(&psi, &f).unwrap();
            // move qubit k of the state to position p[k], relabel the
            // triple and output bits the same way
            let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let mut gens = Vec::new();
            for s in psi.stabilizers() {
                let mut q = PauliString::identity(3);
                for k in 0..3 {
                    q.set(p[k], s.letter(k));
                }
                q.set_negative(s.is_negative());
                gens.push(q);
            }
            let moved = StabilizerTableau::from_stabilizers(&gens).unwrap();
            let mut bits = vec![OutputBit::constant(false); 3];
            for k in 0..3 {
                bits[p[k]] = f.bits()[k];
            }
            let g = LocalFunction::new(Triple { h: p[0], i: p[1], j: p[2] }, bits).unwrap();
            prop_assert_eq!(failure_rate(&moved, &g).unwrap(), base);
        }
    }
}
