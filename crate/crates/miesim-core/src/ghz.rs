//! Tripartite (GHZ-type) measurement-induced entanglement and graph states.

use rand::Rng;

use crate::arch::{CliffordCircuit, Ensemble};
use crate::bits::{self, words_for};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::gf2::{rank_u64, span_u64, SplitEliminator};
use crate::pauli::{Letter, PauliString};
use crate::sampling::enumerate_clifford_group;
use crate::seed::{par_trials, trial_rng};
use crate::stats::{proportion, MeanStderr};
use crate::tableau::StabilizerTableau;
use crate::Dyadic;

/// Three distinct qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub h: usize,
    pub i: usize,
    pub j: usize,
}

impl Triple {
    pub fn new(n: usize, h: usize, i: usize, j: usize) -> Result<Self> {
        crate::tableau::check_support(n, &[h, i, j])?;
        Ok(Triple { h, i, j })
    }

    pub fn qubits(&self) -> [usize; 3] {
        [self.h, self.i, self.j]
    }

    /// Uniform over all `C(n, 3)` triples.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 qubits, got {n}"
            )));
        }
        let v = rand::seq::index::sample(rng, n, 3);
        Ok(Triple {
            h: v.index(0),
            i: v.index(1),
            j: v.index(2),
        })
    }
}

/// The 3-qubit state left on `triple` once every other qubit of `state` has
/// been measured, read off the stabilizer group.
pub fn extract_triple_state(
    state: &StabilizerTableau,
    triple: Triple,
) -> Result<StabilizerTableau> {
    let n = state.num_qubits();
    let qs = triple.qubits();
    let mut gens: Vec<PauliString> = Vec::new();
    let mut codes: Vec<u64> = Vec::new();
    for code in 1u64..64 {
        let mut p = PauliString::identity(n);
        for (k, &q) in qs.iter().enumerate() {
            p.set(
                q,
                Letter::from_bits(code >> k & 1 == 1, code >> (k + 3) & 1 == 1),
            );
        }
        if let Some(neg) = state.group_sign(&p) {
            codes.push(code);
            if rank_u64(&codes) > gens.len() {
                let mut local = p.restrict(&qs);
                local.set_negative(neg);
                gens.push(local);
            } else {
                codes.pop();
            }
        }
    }
    if gens.len() != 3 {
        return Err(Error::InvalidParameter(
            "the triple is entangled with the other qubits".into(),
        ));
    }
    StabilizerTableau::from_stabilizers(&gens)
}

/// Run `circuit`, measure every qubit outside `triple`, return the 3-qubit
/// state on `(h, i, j)`.
pub fn postmeasurement_triple_state<R: Rng + ?Sized>(
    circuit: &CliffordCircuit,
    triple: Triple,
    rng: &mut R,
) -> Result<StabilizerTableau> {
    let n = circuit.n();
    Triple::new(n, triple.h, triple.i, triple.j)?;
    let mut t = circuit.run();
    for q in 0..n {
        if !triple.qubits().contains(&q) {
            t.measure_z(q, rng)?;
        }
    }
    extract_triple_state(&t, triple)
}

/// All three single-qubit purities equal 1/2.
pub fn is_ghz_type(state: &StabilizerTableau) -> Result<bool> {
    if state.num_qubits() != 3 {
        return Err(Error::SizeMismatch {
            expected: 3,
            got: state.num_qubits(),
        });
    }
    let half = Dyadic::inv_pow2(1);
    for q in 0..3 {
        if state.region_purity(&[q])? != half {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unsigned postmeasurement group on the triple, without simulating the
/// measurements: the restrictions to the triple of the stabilizers that are
/// Z-type everywhere else. Elements are 6-bit codes, x bits in 0..3 and z
/// bits in 3..6 (in `h, i, j` order).
pub fn triple_group_unsigned(circuit: &CliffordCircuit, triple: Triple) -> Result<Vec<u64>> {
    let n = circuit.n();
    Triple::new(n, triple.h, triple.i, triple.j)?;
    let w = words_for(n);
    let qs = triple.qubits();
    let lead = bits::mask_of(n, (0..n).filter(|q| !qs.contains(q)));
    let (xs, zs) = circuit.unsigned_stabilizer_rows();
    let mut e = SplitEliminator::new(w, w + 1);
    for r in 0..n {
        let xr = &xs[r * w..(r + 1) * w];
        let zr = &zs[r * w..(r + 1) * w];
        let mut row: Vec<u64> = xr.iter().zip(&lead).map(|(a, b)| a & b).collect();
        let mut payload = 0u64;
        for (k, &q) in qs.iter().enumerate() {
            payload |= (bits::get(xr, q) as u64) << k | (bits::get(zr, q) as u64) << (k + 3);
        }
        row.push(payload);
        e.insert(row);
    }
    let tails: Vec<u64> = e.tails().iter().map(|t| t[0]).collect();
    Ok(span_u64(&tails))
}

/// GHZ-type test on an unsigned 3-qubit group: no non-identity element acts
/// on a single qubit.
pub fn group_is_ghz_type(group: &[u64]) -> bool {
    let single = |g: u64| {
        let on = (g | g >> 3) & 7;
        on.count_ones() == 1
    };
    rank_u64(group) == 3 && !group.iter().any(|&g| single(g))
}

/// Whether measuring everything outside `triple` leaves a GHZ-type state.
/// The answer does not depend on the outcomes.
pub fn ghz_trial(circuit: &CliffordCircuit, triple: Triple) -> Result<bool> {
    Ok(group_is_ghz_type(&triple_group_unsigned(circuit, triple)?))
}

/// Frequency of GHZ-type MIE over fresh (circuit, uniform triple) pairs.
pub fn ghz_scan(ens: &Ensemble, trials: usize, seed: u64) -> Result<MeanStderr> {
    let hits: Vec<Result<bool>> = par_trials(trials, |i| {
        let c = ens.instance(seed, "ghz-scan", i);
        let mut rng = trial_rng(seed, "ghz-scan/triple", i as u64);
        ghz_trial(&c, Triple::sample(c.n(), &mut rng)?)
    });
    let mut k = 0;
    for h in hits {
        k += h? as usize;
    }
    Ok(proportion(k, trials))
}

/// Local Cliffords `C_h ⊗ C_i ⊗ C_j` taking a state to the GHZ state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzWitness {
    pub gates: [CliffordGate; 3],
}

fn ghz_target() -> [PauliString; 3] {
    ["+XXX", "+ZZ_", "+_ZZ"].map(|s| PauliString::parse(s).unwrap())
}

impl GhzWitness {
    pub fn apply(&self, state: &StabilizerTableau) -> Result<StabilizerTableau> {
        let mut t = state.clone();
        for (q, g) in self.gates.iter().enumerate() {
            t.apply_gate(g, &[q])?;
        }
        Ok(t)
    }

    /// Exact check that the witness maps `state` onto `⟨+XXX, +ZZI, +IZZ⟩`.
    pub fn verify(&self, state: &StabilizerTableau) -> Result<bool> {
        let t = self.apply(state)?;
        Ok(ghz_target().iter().all(|p| t.expectation(p) == 1))
    }
}

/// Search the `24³` local Clifford combinations. Pairs `(C_h, C_i)` are
/// pruned on `+ZZI`, which `C_j` cannot affect.
pub fn ghz_witness(state: &StabilizerTableau) -> Result<GhzWitness> {
    if !is_ghz_type(state)? {
        return Err(Error::NotGhzType);
    }
    let group = enumerate_clifford_group(1)?;
    let [xxx, zzi, izz] = ghz_target();
    for a in &group {
        let mut ta = state.clone();
        ta.apply_gate(a, &[0])?;
        for b in &group {
            let mut tb = ta.clone();
            tb.apply_gate(b, &[1])?;
            if tb.expectation(&zzi) != 1 {
                continue;
            }
            for c in &group {
                let mut tc = tb.clone();
                tc.apply_gate(c, &[2])?;
                if tc.expectation(&xxx) == 1 && tc.expectation(&izz) == 1 {
                    return Ok(GhzWitness {
                        gates: [a.clone(), b.clone(), c.clone()],
                    });
                }
            }
        }
    }
    Err(Error::NotGhzType)
}

/// A graph state with single-qubit corrections: the represented state is
/// `(⊗_v C_v)|G⟩` with `|G⟩` stabilized by `X_v ∏_{u~v} Z_u`. Vertices carry
/// labels so that measured vertices can be removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphState {
    labels: Vec<usize>,
    adj: Vec<Vec<bool>>,
    corrections: Vec<CliffordGate>,
}

impl GraphState {
    /// Graph on vertices `0..n` with identity corrections.
    pub fn new(adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = adj.len();
        for (u, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Graph(format!(
                    "adjacency row {u} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[u] {
                return Err(Error::Graph(format!("self-loop at {u}")));
            }
            for v in 0..n {
                if row[v] != adj[v][u] {
                    return Err(Error::Graph(format!(
                        "adjacency not symmetric at ({u}, {v})"
                    )));
                }
            }
        }
        Ok(GraphState {
            labels: (0..n).collect(),
            adj,
            corrections: vec![CliffordGate::identity(1); n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::Graph(format!(
                    "bad edge ({u}, {v}) for {n} vertices"
                )));
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Self::new(adj)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn corrections(&self) -> &[CliffordGate] {
        &self.corrections
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|r| r.iter().filter(|&&b| b).count())
            .sum::<usize>()
            / 2
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.adj[v][u]).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The corrected graph state as a tableau (vertex positions as qubits).
    pub fn to_tableau(&self) -> Result<StabilizerTableau> {
        let n = self.len();
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        let gens: Vec<PauliString> = (0..n)
            .map(|v| {
                let mut p = PauliString::single(n, v, Letter::X);
                for u in self.neighbors(v) {
                    p.set(u, Letter::Z);
                }
                p
            })
            .collect();
        let mut t = StabilizerTableau::from_stabilizers(&gens)?;
        for (v, c) in self.corrections.iter().enumerate() {
            if !c.is_identity() {
                t.apply_gate(c, &[v])?;
            }
        }
        Ok(t)
    }
}

/// Local-Clifford reduction of a stabilizer state to graph form.
///
/// After row reduction of the X block with pivot columns `P`, the Z-only rows
/// restricted to the other columns `N` are invertible, so Hadamards on `N`
/// make the X block full rank. Reducing it to the identity leaves generators
/// `±X_v Z^{Γ_v}`, with a Y on the diagonal where `Γ_vv = 1`; `S†` and `Z`
/// clear those. The corrections are the inverses, applied in reverse.
pub fn to_graph_state(state: &StabilizerTableau) -> Result<GraphState> {
    let n = state.num_qubits();
    let mut gens = state.stabilizers();
    let pivots = reduce_x(&mut gens);
    let mut hadamard = vec![true; n];
    for &c in &pivots {
        hadamard[c] = false;
    }
    let mut t = state.clone();
    for q in (0..n).filter(|&q| hadamard[q]) {
        t.apply_gate(&CliffordGate::h(), &[q])?;
    }
    let mut gens = t.stabilizers();
    let pivots = reduce_x(&mut gens);
    debug_assert_eq!(
        pivots.len(),
        n,
        "X block must be full rank after the Hadamards"
    );
    // row v now has X part e_v
    gens.sort_by_key(|g| (0..n).position(|q| g.x_bit(q)));
    let mut phase_s = vec![false; n];
    let mut flip = vec![false; n];
    let mut adj = vec![vec![false; n]; n];
    for (v, g) in gens.iter().enumerate() {
        phase_s[v] = g.z_bit(v);
        flip[v] = g.is_negative();
        for u in 0..n {
            if u != v {
                adj[v][u] = g.z_bit(u);
            }
        }
    }
    let mut graph = GraphState::new(adj)
        .map_err(|e| Error::Graph(format!("reduction produced an invalid graph: {e}")))?;
    for v in 0..n {
        let mut c = CliffordGate::identity(1);
        if flip[v] {
            c = c.then(&CliffordGate::pauli_z());
        }
        if phase_s[v] {
            c = c.then(&CliffordGate::s());
        }
        if hadamard[v] {
            c = c.then(&CliffordGate::h());
        }
        graph.corrections[v] = c;
    }
    Ok(graph)
}

/// Row-reduce the X block of commuting generators (signs kept exact);
/// returns the pivot columns in order. Pivot rows come first.
fn reduce_x(gens: &mut [PauliString]) -> Vec<usize> {
    let n = gens.len();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        let Some(r) = (rank..n).find(|&r| gens[r].x_bit(c)) else {
            continue;
        };
        gens.swap(rank, r);
        let p = gens[rank].clone();
        for (r2, g) in gens.iter_mut().enumerate() {
            if r2 != rank && g.x_bit(c) {
                *g = g.mul_commuting(&p).expect("stabilizers commute");
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Measure `Z` on the vertex labelled `v` with the given outcome. The vertex
/// must carry a correction that maps `Z` to `±Z`; its neighbours pick up a `Z`
/// correction when the graph-frame outcome is 1.
pub fn measure_graph_vertex_z(graph: &GraphState, v: usize, outcome: bool) -> Result<GraphState> {
    let pos = graph
        .labels
        .iter()
        .position(|&l| l == v)
        .ok_or_else(|| Error::Graph(format!("vertex {v} not in graph")))?;
    let zimg = graph.corrections[pos].image_z(0);
    if zimg.letter(0) != Letter::Z {
        return Err(Error::Graph(format!(
            "correction on vertex {v} does not preserve the Z basis"
        )));
    }
    let y = outcome ^ zimg.is_negative();
    let keep: Vec<usize> = (0..graph.len()).filter(|&u| u != pos).collect();
    let mut out = GraphState {
        labels: keep.iter().map(|&u| graph.labels[u]).collect(),
        adj: keep
            .iter()
            .map(|&u| keep.iter().map(|&w| graph.adj[u][w]).collect())
            .collect(),
        corrections: keep.iter().map(|&u| graph.corrections[u].clone()).collect(),
    };
    if y {
        for (k, &u) in keep.iter().enumerate() {
            if graph.adj[pos][u] {
                out.corrections[k] = CliffordGate::pauli_z().then(&graph.corrections[u]);
            }
        }
    }
    Ok(out)
}

/// A vertex with two neighbours and those neighbours: the induced subgraph is
/// connected. Indices are vertex positions.
pub fn ghz_triple_from_connected_graph(graph: &GraphState) -> Result<Triple> {
    let n = graph.len();
    if n < 3 {
        return Err(Error::Graph(format!("need at least 3 vertices, got {n}")));
    }
    if !graph.is_connected() {
        return Err(Error::Graph("graph is not connected".into()));
    }
    for v in 0..n {
        if let [a, b, ..] = graph.neighbors(v)[..] {
            return Triple::new(n, a, v, b);
        }
    }
    unreachable!("a connected graph on 3+ vertices has a vertex of degree 2")
}

/// Random connected graph on `n` vertices: Erdős–Rényi with an edge density
/// drawn from `[0.2, 0.8)`, resampled until connected.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GraphState {
    loop {
        let p = rng.gen_range(0.2..0.8);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = GraphState::from_edges(n, &edges).expect("edges in range");
        if g.is_connected() {
            return g;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphTripleReport {
    pub graphs: usize,
    /// Outcome strings checked, summed over graphs.
    pub outcomes: usize,
    pub failures: usize,
}

/// On random connected graphs with `vertices` in the given range, take the
/// triple from [`ghz_triple_from_connected_graph`] and check every outcome
/// string of the other vertices leaves a GHZ-type state.
pub fn graph_triple_check(
    graphs: usize,
    vertices: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<GraphTripleReport> {
    if *vertices.start() < 3 || vertices.is_empty() || *vertices.end() > 20 {
        return Err(Error::InvalidParameter(format!(
            "vertex range {vertices:?} must lie in 3..=20"
        )));
    }
    let res: Vec<Result<(usize, usize)>> = par_trials(graphs, |i| {
        let mut rng = trial_rng(seed, "graph-triple", i as u64);
        let n = rng.gen_range(vertices.clone());
        let g = random_connected_graph(n, &mut rng);
        let tr = ghz_triple_from_connected_graph(&g)?;
        let others: Vec<usize> = (0..n).filter(|q| !tr.qubits().contains(q)).collect();
        let base = g.to_tableau()?;
        let mut bad = 0;
        for x in 0u32..1 << others.len() {
            let mut t = base.clone();
            let mut possible = true;
            for (k, &q) in others.iter().enumerate() {
                possible &= !matches!(
                    t.measure_z_forced(q, x >> k & 1 == 1)?,
                    crate::tableau::Forced::Impossible
                );
            }
            bad += !(possible && is_ghz_type(&extract_triple_state(&t, tr)?)?) as usize;
        }
        Ok((1 << others.len(), bad))
    });
    let mut rep = GraphTripleReport {
        graphs,
        outcomes: 0,
        failures: 0,
    };
    for r in res {
        let (k, bad) = r?;
        rep.outcomes += k;
        rep.failures += bad;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{coarse_grained_template, CircuitTemplate, GateSupport, SamplerPolicy};
    use crate::mie::tests::{fixed, ghz3_circuit};
    use crate::seed::rng_from_seed;
    use crate::tableau::tests::ghz3;
    use proptest::prelude::*;
    use rand::Rng;

    /// Linear cluster state `0 - 1 - ... - (n-1)`.
    fn path_circuit(n: usize) -> CliffordCircuit {
        let mut g: Vec<_> = (0..n).map(|q| (CliffordGate::h(), vec![q])).collect();
        for q in 0..n - 1 {
            g.push((CliffordGate::cz(), vec![q, q + 1]));
        }
        fixed(n, g)
    }

    #[test]
    fn triple_state_examples() {
        let mut rng = rng_from_seed(3);
        let id = CliffordCircuit::instantiate(
            &CircuitTemplate::empty(4, None),
            SamplerPolicy::Uniform,
            0,
        );
        let t =
            postmeasurement_triple_state(&id, Triple::new(4, 0, 1, 2).unwrap(), &mut rng).unwrap();
        assert!(t.same_state(&StabilizerTableau::new_zero_state(3).unwrap()));
        assert!(!is_ghz_type(&t).unwrap());

        let c = path_circuit(5);
        for _ in 0..4 {
            let t = postmeasurement_triple_state(&c, Triple::new(5, 1, 2, 3).unwrap(), &mut rng)
                .unwrap();
            assert!(is_ghz_type(&t).unwrap());
            // path graph on three vertices up to Z corrections
            assert_eq!(t.expectation(&PauliString::parse("ZXZ").unwrap()), 1);
            assert_eq!(t.expectation(&PauliString::parse("XZ_").unwrap()).abs(), 1);
        }
        // Z measurements collapse a larger GHZ state
        let g5 = fixed(
            5,
            std::iter::once((CliffordGate::h(), vec![0]))
                .chain((0..4).map(|q| (CliffordGate::cnot(), vec![q, q + 1])))
                .collect(),
        );
        let t =
            postmeasurement_triple_state(&g5, Triple::new(5, 0, 1, 2).unwrap(), &mut rng).unwrap();
        assert!(!is_ghz_type(&t).unwrap());

        let bell = fixed(
            4,
            vec![
                (CliffordGate::h(), vec![0]),
                (CliffordGate::cnot(), vec![0, 1]),
            ],
        );
        let t = postmeasurement_triple_state(&bell, Triple::new(4, 0, 1, 3).unwrap(), &mut rng)
            .unwrap();
        assert_eq!(t.expectation(&PauliString::parse("XX_").unwrap()), 1);
        assert_eq!(t.expectation(&PauliString::parse("__Z").unwrap()), 1);
        assert!(!is_ghz_type(&t).unwrap());
    }

    #[test]
    fn witness_examples() {
        let g = ghz3();
        let w = ghz_witness(&g).unwrap();
        assert!(w.verify(&g).unwrap());
        assert!(w.gates.iter().all(|c| c.is_identity()));

        let mut hhh = ghz3();
        for q in 0..3 {
            hhh.apply_gate(&CliffordGate::h(), &[q]).unwrap();
        }
        assert!(ghz_witness(&hhh).unwrap().verify(&hhh).unwrap());
        let hw = GhzWitness {
            gates: [CliffordGate::h(), CliffordGate::h(), CliffordGate::h()],
        };
        assert!(hw.verify(&hhh).unwrap());

        let tri = GraphState::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .to_tableau()
            .unwrap();
        assert!(ghz_witness(&tri).unwrap().verify(&tri).unwrap());

        assert_eq!(
            ghz_witness(&StabilizerTableau::new_zero_state(3).unwrap()),
            Err(Error::NotGhzType)
        );
    }

    #[test]
    fn graph_reduction_examples() {
        let mut plus = StabilizerTableau::new_zero_state(3).unwrap();
        for q in 0..3 {
            plus.apply_gate(&CliffordGate::h(), &[q]).unwrap();
        }
        let g = to_graph_state(&plus).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.corrections().iter().all(|c| c.is_identity()));

        let bell = fixed(
            2,
            vec![
                (CliffordGate::h(), vec![0]),
                (CliffordGate::cnot(), vec![0, 1]),
            ],
        )
        .run();
        let g = to_graph_state(&bell).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.to_tableau().unwrap().same_state(&bell));

        let g = to_graph_state(&ghz3()).unwrap();
        assert!(g.is_connected());
        assert!(g.to_tableau().unwrap().same_state(&ghz3()));
    }

    #[test]
    fn vertex_measurement_examples() {
        let path = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let m = measure_graph_vertex_z(&path, 1, false).unwrap();
        assert_eq!((m.len(), m.edge_count()), (2, 0));
        assert!(m.corrections().iter().all(|c| c.is_identity()));
        assert_eq!(m.labels(), &[0, 2]);

        let tri = GraphState::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        for v in 0..3 {
            assert_eq!(
                measure_graph_vertex_z(&tri, v, true).unwrap().edge_count(),
                1
            );
        }

        let star = GraphState::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let m = measure_graph_vertex_z(&star, 0, true).unwrap();
        assert!(m
            .corrections()
            .iter()
            .all(|c| *c == CliffordGate::pauli_z()));
        assert!(measure_graph_vertex_z(&star, 7, true).is_err());
    }

    #[test]
    fn vertex_measurement_matches_tableau() {
        let mut rng = rng_from_seed(5);
        for _ in 0..30 {
            let n = rng.gen_range(2..7);
            let g = random_connected_graph(n, &mut rng);
            let v = rng.gen_range(0..n);
            let b = rng.gen_bool(0.5);
            let mut t = g.to_tableau().unwrap();
            assert_eq!(
                t.measure_z_forced(v, b).unwrap(),
                crate::tableau::Forced::Random
            );
            let m = measure_graph_vertex_z(&g, v, b).unwrap();
            // compare on the surviving vertices: the measured qubit is |b>
            let mt = m.to_tableau();
            let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            if keep.is_empty() {
                continue;
            }
            let mt = mt.unwrap();
            for s in mt.stabilizers() {
                let mut p = PauliString::identity(n);
                for (k, &u) in keep.iter().enumerate() {
                    p.set(u, s.letter(k));
                }
                p.set_negative(s.is_negative());
                assert_eq!(t.expectation(&p), 1);
            }
        }
    }

    #[test]
    fn triple_from_graph_examples() {
        let path = GraphState::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let t = ghz_triple_from_connected_graph(&path).unwrap();
        assert_eq!(t.qubits(), [0, 1, 2]);
        let star = GraphState::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(ghz_triple_from_connected_graph(&star).unwrap().i, 0);
        let split = GraphState::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(ghz_triple_from_connected_graph(&split).is_err());
        assert!(
            ghz_triple_from_connected_graph(&GraphState::from_edges(2, &[(0, 1)]).unwrap())
                .is_err()
        );
    }

    #[test]
    fn ghz_scan_controls() {
        let ens = Ensemble::new(
            coarse_grained_template(2, 2).unwrap(),
            SamplerPolicy::Identity,
        );
        assert_eq!(ghz_scan(&ens, 20, 1).unwrap().mean, 0.0);
        let c = path_circuit(6);
        for h in 0..6 {
            for i in h + 1..6 {
                for j in i + 1..6 {
                    // only consecutive triples survive Z measurement of the rest
                    let want = i == h + 1 && j == i + 1;
                    assert_eq!(
                        ghz_trial(&c, Triple::new(6, h, i, j).unwrap()).unwrap(),
                        want,
                        "{h} {i} {j}"
                    );
                }
            }
        }
        assert!(ghz_trial(&ghz3_circuit(), Triple::new(3, 0, 1, 2).unwrap()).unwrap());
    }

    #[test]
    fn graph_triples_on_random_graphs() {
        let mut rng = rng_from_seed(17);
        for _ in 0..100 {
            let n = rng.gen_range(3..=8);
            let g = random_connected_graph(n, &mut rng);
            let tr = ghz_triple_from_connected_graph(&g).unwrap();
            let others: Vec<usize> = (0..n).filter(|q| !tr.qubits().contains(q)).collect();
            for x in 0u32..1 << others.len() {
                let mut t = g.to_tableau().unwrap();
                let mut m = g.clone();
                for (k, &q) in others.iter().enumerate() {
                    t.measure_z_forced(q, x >> k & 1 == 1).unwrap();
                    m = measure_graph_vertex_z(&m, q, x >> k & 1 == 1).unwrap();
                }
                assert!(is_ghz_type(&extract_triple_state(&t, tr).unwrap()).unwrap());
                assert!(m.is_connected());
                assert!(is_ghz_type(&m.to_tableau().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn graph_triple_check_small() {
        let r = graph_triple_check(10, 3..=6, 2).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.outcomes >= 10);
        assert!(graph_triple_check(1, 2..=4, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn graph_round_trip(seed in any::<u64>(), n in 1usize..7) {
            let t = crate::arch::brickwork_template(1.max(n / 2).max(2), 3, 4).unwrap();
            let st = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, seed).run();
            let g = to_graph_state(&st).unwrap();
            prop_assert!(g.to_tableau().unwrap().same_state(&st));
        }

        #[test]
        fn algebraic_route_matches_measurement(seed in any::<u64>(), d in 0usize..6, tri in 0u64..1000) {
            let t = crate::arch::brickwork_template(3, 3, d).unwrap();
            let c = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, seed);
            let mut rng = rng_from_seed(tri);
            let triple = Triple::sample(9, &mut rng).unwrap();
            let st = postmeasurement_triple_state(&c, triple, &mut rng).unwrap();
            prop_assert_eq!(ghz_trial(&c, triple).unwrap(), is_ghz_type(&st).unwrap());
        }

        #[test]
        fn ghz_type_is_local_clifford_invariant(seed in any::<u64>(), q in 0usize..3) {
            let tmpl = CircuitTemplate::new(3, None, vec![GateSupport { layer: 1, qubits: vec![0, 1, 2] }], 1).unwrap();
            let st = CliffordCircuit::instantiate(&tmpl, SamplerPolicy::Uniform, seed).run();
            let mut rng = rng_from_seed(seed ^ 1);
            let c = crate::sampling::sample_uniform_clifford(1, &mut rng).unwrap();
            let mut st2 = st.clone();
            st2.apply_gate(&c, &[q]).unwrap();
            prop_assert_eq!(is_ghz_type(&st).unwrap(), is_ghz_type(&st2).unwrap());
            if is_ghz_type(&st).unwrap() {
                prop_assert!(ghz_witness(&st).unwrap().verify(&st).unwrap());
            }
        }
    }
}
