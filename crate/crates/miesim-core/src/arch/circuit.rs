use crate::bits::words_for;
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::PauliString;
use crate::sampling::sample_uniform_clifford;
use crate::seed::{mix, rng_from_seed};
use crate::tableau::{apply_kernel_rows, check_support, StabilizerTableau};

use super::template::CircuitTemplate;

/// How gates are drawn when a template is instantiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerPolicy {
    /// Independent uniform Cliffords on each support.
    Uniform,
    /// Every gate is the identity (a non-random control).
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `D p D†`
    Forward,
    /// `D† p D`
    Backward,
}

/// A template together with one Clifford gate per support. The circuit is
/// `D = U_R ⋯ U_1` with `U_1` applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordCircuit {
    template: CircuitTemplate,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(template: CircuitTemplate, gates: Vec<CliffordGate>) -> Result<Self> {
        if gates.len() != template.gates().len() {
            return Err(Error::SizeMismatch {
                expected: template.gates().len(),
                got: gates.len(),
            });
        }
        for (g, s) in gates.iter().zip(template.gates()) {
            if g.arity() != s.qubits.len() {
                return Err(Error::ArityMismatch {
                    arity: g.arity(),
                    support: s.qubits.len(),
                });
            }
        }
        Ok(CliffordCircuit { template, gates })
    }

    /// Draw every gate independently. Gate `i` uses its own stream seeded by
    /// `mix(seed, "gate", i)`, so any single gate can be regenerated with
    /// [`CliffordCircuit::sample_gate`] without building the others.
    pub fn instantiate(
        template: &CircuitTemplate,
        policy: SamplerPolicy,
        seed: u64,
    ) -> CliffordCircuit {
        let gates = (0..template.gates().len())
            .map(|i| Self::sample_gate(template, policy, seed, i))
            .collect();
        CliffordCircuit {
            template: template.clone(),
            gates,
        }
    }

    pub fn sample_gate(
        template: &CircuitTemplate,
        policy: SamplerPolicy,
        seed: u64,
        i: usize,
    ) -> CliffordGate {
        let k = template.gates()[i].qubits.len();
        match policy {
            SamplerPolicy::Identity => CliffordGate::identity(k),
            SamplerPolicy::Uniform => {
                let mut rng = rng_from_seed(mix(seed, "gate", i as u64));
                sample_uniform_clifford(k, &mut rng).expect("template arity within sampler cap")
            }
        }
    }

    pub fn n(&self) -> usize {
        self.template.n()
    }

    pub fn template(&self) -> &CircuitTemplate {
        &self.template
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    /// `D|0ⁿ⟩`.
    pub fn run(&self) -> StabilizerTableau {
        let mut t = StabilizerTableau::new_zero_state(self.n()).expect("template has n >= 1");
        for (g, s) in self.gates.iter().zip(self.template.gates()) {
            t.apply_kernel(&g.kernel(), &s.qubits);
        }
        t
    }

    /// The generators `D Z_j D†` without signs, as row-major bit rows
    /// (`n` rows of `words_for(n)` words each, x part and z part).
    pub(crate) fn unsigned_stabilizer_rows(&self) -> (Vec<u64>, Vec<u64>) {
        let n = self.n();
        let w = words_for(n);
        let mut xs = vec![0u64; n * w];
        let mut zs = vec![0u64; n * w];
        for j in 0..n {
            zs[j * w + j / 64] |= 1 << (j % 64);
        }
        let mut neg = vec![false; n];
        for (g, s) in self.gates.iter().zip(self.template.gates()) {
            apply_kernel_rows(&mut xs, &mut zs, &mut neg, w, &g.kernel(), &s.qubits, false);
        }
        (xs, zs)
    }

    pub fn conjugate_pauli(&self, p: &PauliString, direction: Direction) -> Result<PauliString> {
        if p.num_qubits() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                got: p.num_qubits(),
            });
        }
        let mut p = p.clone();
        match direction {
            Direction::Forward => {
                for (g, s) in self.gates.iter().zip(self.template.gates()) {
                    conjugate_local(&mut p, g, &s.qubits, Direction::Forward);
                }
            }
            Direction::Backward => {
                for (g, s) in self.gates.iter().zip(self.template.gates()).rev() {
                    conjugate_local(&mut p, g, &s.qubits, Direction::Backward);
                }
            }
        }
        Ok(p)
    }
}

/// A template with a gate-sampling policy: the random circuit family the
/// experiments draw from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ensemble {
    pub template: CircuitTemplate,
    pub policy: SamplerPolicy,
}

impl Ensemble {
    pub fn new(template: CircuitTemplate, policy: SamplerPolicy) -> Self {
        Ensemble { template, policy }
    }

    pub fn uniform(template: CircuitTemplate) -> Self {
        Ensemble {
            template,
            policy: SamplerPolicy::Uniform,
        }
    }

    /// Circuit instance for trial `index` of the experiment `tag`.
    pub fn instance(&self, seed: u64, tag: &str, index: usize) -> CliffordCircuit {
        CliffordCircuit::instantiate(&self.template, self.policy, mix(seed, tag, index as u64))
    }

    pub fn n(&self) -> usize {
        self.template.n()
    }
}

/// Conjugate `p` by `gate` acting on `support`, in place. The sign convention
/// factorizes over qubits, so the local part can be conjugated on its own.
pub(crate) fn conjugate_local(
    p: &mut PauliString,
    gate: &CliffordGate,
    support: &[usize],
    direction: Direction,
) {
    debug_assert!(check_support(p.num_qubits(), support).is_ok());
    if support.iter().all(|&q| !p.x_bit(q) && !p.z_bit(q)) {
        return;
    }
    let mut local = p.restrict(support);
    local.set_negative(p.is_negative());
    let img = match direction {
        Direction::Forward => gate.conjugate(&local),
        Direction::Backward => gate.conjugate_backward(&local),
    };
    for (j, &q) in support.iter().enumerate() {
        p.set(q, img.letter(j));
    }
    p.set_negative(img.is_negative());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::template::{brickwork_template, coarse_grained_template, GateSupport};
    use crate::pauli::Letter;
    use proptest::prelude::*;

    fn single(n: usize, gate: CliffordGate, qubits: Vec<usize>) -> CliffordCircuit {
        let t = CircuitTemplate::new(n, None, vec![GateSupport { layer: 1, qubits }], 1).unwrap();
        CliffordCircuit::new(t, vec![gate]).unwrap()
    }

    #[test]
    fn conjugation_examples() {
        let c = single(1, CliffordGate::h(), vec![0]);
        let p = c
            .conjugate_pauli(&PauliString::parse("Z").unwrap(), Direction::Forward)
            .unwrap();
        assert_eq!(p.to_string(), "+X");
        let c = single(2, CliffordGate::cnot(), vec![0, 1]);
        let p = c
            .conjugate_pauli(&PauliString::parse("_Z").unwrap(), Direction::Backward)
            .unwrap();
        assert_eq!(p.to_string(), "+ZZ");
        let c = single(1, CliffordGate::s(), vec![0]);
        let p = c
            .conjugate_pauli(&PauliString::parse("X").unwrap(), Direction::Forward)
            .unwrap();
        assert_eq!(p.to_string(), "+Y");
        assert!(c
            .conjugate_pauli(&PauliString::identity(2), Direction::Forward)
            .is_err());
    }

    #[test]
    fn instantiate_is_deterministic() {
        let t = brickwork_template(4, 4, 2).unwrap();
        let a = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, 9);
        assert_eq!(
            a,
            CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, 9)
        );
        assert_ne!(
            a,
            CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, 10)
        );
        assert!(a.gates().iter().all(|g| g.arity() == 2));
        let t = coarse_grained_template(2, 4).unwrap();
        let c = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, 1);
        assert!(c.gates().iter().all(|g| g.arity() == 16));
        assert_eq!(
            c.gates()[3],
            CliffordCircuit::sample_gate(&t, SamplerPolicy::Uniform, 1, 3)
        );
    }

    #[test]
    fn run_matches_forward_conjugation() {
        let t = brickwork_template(3, 3, 3).unwrap();
        let c = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, 4);
        let st = c.run();
        st.validate().unwrap();
        let (xs, zs) = c.unsigned_stabilizer_rows();
        for j in 0..9 {
            let img = c
                .conjugate_pauli(&PauliString::single(9, j, Letter::Z), Direction::Forward)
                .unwrap();
            assert_eq!(st.stabilizer(j), img);
            assert_eq!(&xs[j..j + 1], img.x_words());
            assert_eq!(&zs[j..j + 1], img.z_words());
        }
    }

    proptest! {
        #[test]
        fn forward_then_backward_is_identity(seed in any::<u64>(), letters in proptest::collection::vec(0u8..4, 9), neg in any::<bool>(), big in any::<bool>()) {
            let t = if big { coarse_grained_template(2, 2).unwrap() } else { brickwork_template(3, 3, 4).unwrap() };
            let c = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, seed);
            let n = t.n();
            let mut p = PauliString::identity(n);
            for (q, &l) in letters.iter().enumerate() {
                p.set(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][l as usize]);
            }
            p.set_negative(neg);
            let f = c.conjugate_pauli(&p, Direction::Forward).unwrap();
            prop_assert_eq!(c.conjugate_pauli(&f, Direction::Backward).unwrap(), p);
        }
    }
}
