//! Pauli clusters on the coarse-grained block grid and the Monte Carlo
//! checks of the Z-type conjugation bounds.

use std::collections::BTreeMap;

use rand::Rng;

use crate::arch::{
    coarse_grained_template, compiled_template, conjugate_local, CircuitTemplate, CliffordCircuit,
    Direction, Ensemble, SamplerPolicy,
};
use crate::error::{Error, Result};
use crate::mie::{compute_s, s_members, Tripartition};
use crate::pauli::{Letter, PauliString};
use crate::sampling::{
    enumerate_clifford_group, sample_nonidentity_pauli, sample_uniform_clifford,
};
use crate::seed::{mix, par_trials, rng_from_seed, trial_rng};
use crate::stats::{mean_stderr, proportion, MeanStderr};

/// A set of second-layer blocks of the `m × m` block grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cluster {
    m: usize,
    cells: Vec<bool>,
}

impl Cluster {
    pub fn empty(m: usize) -> Self {
        Cluster {
            m,
            cells: vec![false; m * m],
        }
    }

    /// Cells given as `(row, col)`.
    pub fn from_cells(m: usize, cells: &[(usize, usize)]) -> Result<Self> {
        let mut c = Self::empty(m);
        for &(r, col) in cells {
            if r >= m || col >= m {
                return Err(Error::InvalidParameter(format!(
                    "cell ({r}, {col}) outside the {m}x{m} grid"
                )));
            }
            c.cells[r * m + col] = true;
        }
        Ok(c)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.m + c]
    }

    pub fn cells(&self) -> Vec<(usize, usize)> {
        (0..self.m * self.m)
            .filter(|&i| self.cells[i])
            .map(|i| (i / self.m, i % self.m))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClusterStats {
    /// Number of cells, `a`.
    pub size: usize,
    /// Interior grid edges between a cluster cell and a non-cluster cell, `l`.
    pub perimeter: usize,
}

/// Blocks of side `tau` touched by the support of `p` on the `mτ × mτ` grid.
pub fn cluster_of(p: &PauliString, m: usize, tau: usize) -> Result<Cluster> {
    let side = m * tau;
    if p.num_qubits() != side * side {
        return Err(Error::SizeMismatch {
            expected: side * side,
            got: p.num_qubits(),
        });
    }
    let mut c = Cluster::empty(m);
    for q in p.support() {
        let (r, col) = (q / side, q % side);
        c.cells[(r / tau) * m + col / tau] = true;
    }
    Ok(c)
}

pub fn stats_of(cluster: &Cluster) -> ClusterStats {
    let m = cluster.m;
    let mut perimeter = 0;
    for r in 0..m {
        for c in 0..m {
            if c + 1 < m && cluster.contains(r, c) != cluster.contains(r, c + 1) {
                perimeter += 1;
            }
            if r + 1 < m && cluster.contains(r, c) != cluster.contains(r + 1, c) {
                perimeter += 1;
            }
        }
    }
    ClusterStats {
        size: cluster.cells.iter().filter(|&&b| b).count(),
        perimeter,
    }
}

/// `2^{−(aτ² + l(τ²/12 − 1)/4)}`; exceeds 1 for small `τ`.
pub fn ztype_cluster_bound(stats: ClusterStats, tau: usize) -> f64 {
    let t2 = (tau * tau) as f64;
    2f64.powf(-(stats.size as f64 * t2 + stats.perimeter as f64 * (t2 / 12.0 - 1.0) / 4.0))
}

/// The compiled-circuit version, `2^{−(aτ² + l(τ²/12 − 2)/4 − 1)}`.
pub fn compiled_bound(stats: ClusterStats, tau: usize) -> f64 {
    let t2 = (tau * tau) as f64;
    2f64.powf(-(stats.size as f64 * t2 + stats.perimeter as f64 * (t2 / 12.0 - 2.0) / 4.0 - 1.0))
}

/// Per-perimeter bound on the expected number of `S` members,
/// `2^{l(2 log₂ m − τ²/48 + 5)}`.
pub fn perimeter_bound(l: usize, m: usize, tau: usize) -> f64 {
    2f64.powf(l as f64 * (2.0 * (m as f64).log2() - (tau * tau) as f64 / 48.0 + 5.0))
}

/// Whether `τ ≥ √(1000 log₂ m)`, the regime where the `E|S|` bound is proven.
pub fn tau_in_proven_regime(m: usize, tau: usize) -> bool {
    (tau * tau) as f64 >= 1000.0 * (m as f64).log2()
}

/// Whether `D† p D` is Z-type for the circuit with gates drawn lazily from
/// `seed`: only gates that touch the current support are sampled.
fn backward_is_ztype(
    template: &CircuitTemplate,
    policy: SamplerPolicy,
    seed: u64,
    p: &PauliString,
) -> bool {
    let mut p = p.clone();
    for (i, s) in template.gates().iter().enumerate().rev() {
        if s.qubits.iter().any(|&q| p.x_bit(q) || p.z_bit(q)) {
            let g = CliffordCircuit::sample_gate(template, policy, seed, i);
            conjugate_local(&mut p, &g, &s.qubits, Direction::Backward);
        }
    }
    p.is_z_type()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZTypeEstimate {
    pub estimate: MeanStderr,
    pub stats: ClusterStats,
    pub bound: f64,
    /// Estimate within three standard errors of the bound; always true when
    /// the bound is at least 1.
    pub pass: bool,
}

fn ztype_mc(
    template: &CircuitTemplate,
    pattern: &PauliString,
    stats: ClusterStats,
    bound: f64,
    trials: usize,
    seed: u64,
) -> ZTypeEstimate {
    let hits = par_trials(trials, |i| {
        backward_is_ztype(
            template,
            SamplerPolicy::Uniform,
            mix(seed, "ztype", i as u64),
            pattern,
        )
    });
    let estimate = proportion(hits.into_iter().filter(|&h| h).count(), trials);
    let pass = bound >= 1.0 || estimate.mean <= bound + 3.0 * estimate.stderr;
    ZTypeEstimate {
        estimate,
        stats,
        bound,
        pass,
    }
}

/// Monte Carlo `Pr[D† P D is Z-type]` over random coarse-grained Clifford
/// circuits, with the cluster bound for `P`.
pub fn ztype_probability_mc(
    pattern: &PauliString,
    m: usize,
    tau: usize,
    trials: usize,
    seed: u64,
) -> Result<ZTypeEstimate> {
    let stats = stats_of(&cluster_of(pattern, m, tau)?);
    let t = coarse_grained_template(m, tau)?;
    Ok(ztype_mc(
        &t,
        pattern,
        stats,
        ztype_cluster_bound(stats, tau),
        trials,
        seed,
    ))
}

/// The same estimate on compiled circuits of the given snake depth, against
/// the compiled-circuit bound.
pub fn ztype_probability_mc_compiled(
    pattern: &PauliString,
    m: usize,
    tau: usize,
    snake_depth: usize,
    trials: usize,
    seed: u64,
) -> Result<ZTypeEstimate> {
    let stats = stats_of(&cluster_of(pattern, m, tau)?);
    let t = compiled_template(m, tau, snake_depth)?;
    Ok(ztype_mc(
        &t,
        pattern,
        stats,
        compiled_bound(stats, tau),
        trials,
        seed,
    ))
}

/// How the Pauli outside `Q` is treated in the block-Pauli checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    /// Blocks drawn unconditionally.
    None,
    /// The complement of `Q` fixed to the identity.
    ComplementIdentity,
    /// The complement of `Q` fixed to `X` on every qubit.
    ComplementX,
}

impl Conditioning {
    pub fn name(self) -> &'static str {
        match self {
            Conditioning::None => "none",
            Conditioning::ComplementIdentity => "complement=I",
            Conditioning::ComplementX => "complement=X",
        }
    }
}

/// Blocks of three consecutive qubits (the last may be shorter) over `n`
/// qubits. `Q = 1..=q` then straddles block boundaries.
fn block_layout(n: usize) -> Vec<std::ops::Range<usize>> {
    (0..n).step_by(3).map(|s| s..(s + 3).min(n)).collect()
}

fn random_letter<R: Rng + ?Sized>(rng: &mut R) -> Letter {
    [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)]
}

/// Draw `P_Q` for `Q = 1..=q` inside `n = q + 2` qubits of random
/// non-identity blocks, conditioned as requested.
fn sample_block_restriction<R: Rng + ?Sized>(
    q: usize,
    cond: Conditioning,
    rng: &mut R,
) -> PauliString {
    let n = q + 2;
    let in_q = |i: usize| (1..=q).contains(&i);
    let mut out = PauliString::identity(q);
    for blk in block_layout(n) {
        let inside: Vec<usize> = blk.clone().filter(|&i| in_q(i)).collect();
        let outside_fixed = match cond {
            Conditioning::None => None,
            Conditioning::ComplementIdentity => Some(Letter::I),
            Conditioning::ComplementX => Some(Letter::X),
        };
        let letters: Vec<Letter> = match outside_fixed {
            None => {
                let p = sample_nonidentity_pauli(blk.len(), rng).expect("block is non-empty");
                inside.iter().map(|&i| p.letter(i - blk.start)).collect()
            }
            Some(k) => {
                let outside_nonidentity = k != Letter::I && blk.clone().any(|i| !in_q(i));
                if inside.is_empty() {
                    Vec::new()
                } else if outside_nonidentity {
                    inside.iter().map(|_| random_letter(rng)).collect()
                } else {
                    let p =
                        sample_nonidentity_pauli(inside.len(), rng).expect("inside is non-empty");
                    (0..inside.len()).map(|j| p.letter(j)).collect()
                }
            }
        };
        for (&i, l) in inside.iter().zip(letters) {
            out.set(i - 1, l);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPauliRow {
    /// `"a"` for `|Q| = t`, `"b"` for `|Q| = k < t` padded with identity.
    pub part: &'static str,
    pub t: usize,
    pub k: usize,
    pub conditioning: Conditioning,
    pub bound: f64,
    pub estimate: MeanStderr,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPauliReport {
    pub rows: Vec<BlockPauliRow>,
    /// `t = 2` part (a) exact probability as a reduced fraction, from the
    /// full 2-qubit Clifford group and exact block statistics.
    pub exhaustive_t2: (i128, i128),
}

impl BlockPauliReport {
    pub fn pass(&self) -> bool {
        let (num, den) = self.exhaustive_t2;
        self.rows.iter().all(|r| r.pass) && 4 * num <= den
    }
}

fn block_check_mc(
    t: usize,
    k: usize,
    cond: Conditioning,
    trials: usize,
    seed: u64,
) -> Result<MeanStderr> {
    let tag = format!("block-pauli/t={t}/k={k}/{}", cond.name());
    let hits: Vec<Result<bool>> = par_trials(trials, |i| {
        let mut rng = trial_rng(seed, &tag, i as u64);
        let pq = sample_block_restriction(k, cond, &mut rng);
        let mut p = PauliString::identity(t);
        for j in 0..k {
            p.set(j, pq.letter(j));
        }
        let c = sample_uniform_clifford(t, &mut rng)?;
        Ok(c.conjugate_backward(&p).is_z_type())
    });
    let mut n = 0;
    for h in hits {
        n += h? as usize;
    }
    Ok(proportion(n, trials))
}

/// Both parts of the block-Pauli bounds for `t`-qubit Cliffords: part (a) with
/// `|Q| = t` against `2^{−t}`, part (b) for every `k < t` against
/// `4^{−k} + 2^{−t}`, each unconditioned and under two fixed complements.
pub fn appendix_b_lemma_checks(t: usize, trials: usize, seed: u64) -> Result<BlockPauliReport> {
    if !(1..=8).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "t must be in 1..=8, got {t}"
        )));
    }
    let conds = [
        Conditioning::None,
        Conditioning::ComplementIdentity,
        Conditioning::ComplementX,
    ];
    let mut rows = Vec::new();
    for k in (1..=t).rev() {
        let (part, bound) = if k == t {
            ("a", 0.5f64.powi(t as i32))
        } else {
            ("b", 0.25f64.powi(k as i32) + 0.5f64.powi(t as i32))
        };
        for cond in conds {
            let estimate = block_check_mc(t, k, cond, trials, seed)?;
            let pass = estimate.mean <= bound + 3.0 * estimate.stderr;
            rows.push(BlockPauliRow {
                part,
                t,
                k,
                conditioning: cond,
                bound,
                estimate,
                pass,
            });
        }
    }
    Ok(BlockPauliReport {
        rows,
        exhaustive_t2: exhaustive_t2_part_a()?,
    })
}

/// Exact part (a) probability for `t = 2` with two-qubit blocks `{0,1}`,
/// `{2,3}` and `Q = {1, 2}` straddling them.
pub fn exhaustive_t2_part_a() -> Result<(i128, i128)> {
    let group = enumerate_clifford_group(2)?;
    // ztype[code] = number of Cliffords taking the 2-qubit Pauli `code` to Z-type
    let mut ztype = [0i128; 16];
    for (code, count) in ztype.iter_mut().enumerate() {
        let p = pauli_from_code(2, code);
        *count = group
            .iter()
            .filter(|c| c.conjugate_backward(&p).is_z_type())
            .count() as i128;
    }
    // P_Q = (second letter of block 1, first letter of block 2); each block
    // uniform over its 15 non-identity values
    let mut num = 0i128;
    for b1 in 1..16usize {
        for b2 in 1..16usize {
            let q0 = (b1 >> 2) & 3;
            let q1 = b2 & 3;
            num += ztype[q0 | q1 << 2];
        }
    }
    let den = 225 * group.len() as i128;
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

/// Two bits per qubit, qubit `j` at bits `2j..2j+2` as `[I, X, Y, Z]`.
fn pauli_from_code(k: usize, code: usize) -> PauliString {
    let mut p = PauliString::identity(k);
    for j in 0..k {
        p.set(
            j,
            [Letter::I, Letter::X, Letter::Y, Letter::Z][(code >> (2 * j)) & 3],
        );
    }
    p
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerimeterBin {
    pub perimeter: usize,
    /// Representative S members observed with this perimeter.
    pub count: usize,
    pub perimeter_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SBoundReport {
    pub m: usize,
    pub tau: usize,
    pub c_size: usize,
    /// `3/2^{|C|+1} + 2·2^{−τ²/100}`.
    pub bound: f64,
    pub expected_s: MeanStderr,
    pub nonempty_trials: usize,
    pub trials: usize,
    /// Largest count of non-empty trials consistent with the bound:
    /// `⌈N·bound + 3√(N·bound)⌉`.
    pub allowance: usize,
    pub perimeters: Vec<PerimeterBin>,
    /// Outside the proven regime or the bound is at least 1.
    pub informational: bool,
    /// Gates were not random (identity control).
    pub control: bool,
    pub pass: bool,
}

/// Monte Carlo `E|S|` over coarse-grained circuits with the given policy,
/// compared with the expected-size bound. `pass` holds when the number of
/// trials with `S ≠ ∅` fits the Markov allowance, and is vacuous for
/// informational settings.
pub fn expected_s_bound_mc(
    m: usize,
    tau: usize,
    part: &Tripartition,
    policy: SamplerPolicy,
    trials: usize,
    seed: u64,
) -> Result<SBoundReport> {
    let ens = Ensemble::new(coarse_grained_template(m, tau)?, policy);
    if part.n() != ens.n() {
        return Err(Error::SizeMismatch {
            expected: ens.n(),
            got: part.n(),
        });
    }
    let res: Vec<Result<(f64, Vec<usize>)>> = par_trials(trials, |i| {
        let c = ens.instance(seed, "s-bound", i);
        let s = compute_s(&c, part)?;
        let mut per = Vec::new();
        if !s.is_empty() {
            for sm in s_members(&c, part)?.into_iter().flatten() {
                let img = c.conjugate_pauli(&PauliString::z_of(c.n(), &sm), Direction::Forward)?;
                per.push(stats_of(&cluster_of(&img, m, tau)?).perimeter);
            }
        }
        Ok((s.total(), per))
    });
    let res: Vec<(f64, Vec<usize>)> = res.into_iter().collect::<Result<_>>()?;
    let expected_s = mean_stderr(&res.iter().map(|r| r.0).collect::<Vec<_>>());
    let nonempty_trials = res.iter().filter(|r| r.0 > 0.0).count();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for p in res.iter().flat_map(|r| &r.1) {
        *hist.entry(*p).or_default() += 1;
    }
    let perimeters = hist
        .into_iter()
        .map(|(l, count)| PerimeterBin {
            perimeter: l,
            count,
            perimeter_bound: perimeter_bound(l, m, tau),
        })
        .collect();
    let c_size = part.c().len();
    let bound = 3.0 / 2f64.powi(c_size as i32 + 1) + 2.0 * 2f64.powf(-((tau * tau) as f64) / 100.0);
    let nb = trials as f64 * bound;
    let allowance = (nb + 3.0 * nb.sqrt()).ceil() as usize;
    let informational = !tau_in_proven_regime(m, tau) || bound >= 1.0;
    let control = policy != SamplerPolicy::Uniform;
    let pass = informational || nonempty_trials <= allowance;
    Ok(SBoundReport {
        m,
        tau,
        c_size,
        bound,
        expected_s,
        nonempty_trials,
        trials,
        allowance,
        perimeters,
        informational,
        control,
        pass,
    })
}

/// One CSV row of `check,m,tau,a,l,bound,estimate,stderr,trials,seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterCheckRow {
    pub check: String,
    pub m: usize,
    pub tau: usize,
    pub a: usize,
    pub l: usize,
    pub bound: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Single-cell patterns for the cluster-bound check: `Z` on one qubit, and a random
/// non-identity Pauli filling the block, for every cell of the grid.
pub fn single_cell_patterns(m: usize, tau: usize, seed: u64) -> Vec<PauliString> {
    let side = m * tau;
    let mut rng = rng_from_seed(mix(seed, "single-cell", 0));
    let mut out = Vec::new();
    for br in 0..m {
        for bc in 0..m {
            let q0 = br * tau * side + bc * tau;
            out.push(PauliString::single(side * side, q0, Letter::Z));
            let fill = sample_nonidentity_pauli(tau * tau, &mut rng).expect("tau >= 1");
            let mut p = PauliString::identity(side * side);
            for i in 0..tau {
                for j in 0..tau {
                    p.set(q0 + i * side + j, fill.letter(i * tau + j));
                }
            }
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::GridGeometry;
    use crate::mie::square_tripartition;
    use proptest::prelude::*;
    use rand::Rng;

    fn fig5() -> Cluster {
        let cells = [
            (0, 0),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 0),
            (1, 2),
            (1, 4),
            (2, 4),
            (3, 4),
            (2, 3),
            (3, 1),
        ];
        Cluster::from_cells(5, &cells).unwrap()
    }

    #[test]
    fn stats_examples() {
        assert_eq!(
            stats_of(&fig5()),
            ClusterStats {
                size: 11,
                perimeter: 19
            }
        );
        assert_eq!(
            stats_of(&Cluster::from_cells(3, &[(1, 1)]).unwrap()),
            ClusterStats {
                size: 1,
                perimeter: 4
            }
        );
        assert_eq!(
            stats_of(&Cluster::from_cells(2, &[(0, 0)]).unwrap()),
            ClusterStats {
                size: 1,
                perimeter: 2
            }
        );
        assert_eq!(stats_of(&Cluster::empty(4)).perimeter, 0);
        let all: Vec<_> = (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).collect();
        assert_eq!(
            stats_of(&Cluster::from_cells(4, &all).unwrap()),
            ClusterStats {
                size: 16,
                perimeter: 0
            }
        );
        assert!(Cluster::from_cells(2, &[(2, 0)]).is_err());
    }

    #[test]
    fn cluster_examples() {
        let (m, tau) = (3, 2);
        let n = 36;
        assert_eq!(
            cluster_of(&PauliString::identity(n), m, tau).unwrap(),
            Cluster::empty(m)
        );
        let c = cluster_of(&PauliString::single(n, 6 * 3 + 4, Letter::X), m, tau).unwrap();
        assert_eq!(c.cells(), vec![(1, 2)]);
        let mut row = PauliString::identity(n);
        for col in 0..6 {
            row.set(6 * 2 + col, Letter::Y);
        }
        assert_eq!(
            cluster_of(&row, m, tau).unwrap().cells(),
            vec![(1, 0), (1, 1), (1, 2)]
        );
        assert!(cluster_of(&PauliString::identity(35), m, tau).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(
            ztype_cluster_bound(
                ClusterStats {
                    size: 0,
                    perimeter: 0
                },
                4
            ),
            1.0
        );
        // a = 1 interior cell of a 3x3 grid at tau = 4: 16 + 4*(16/12 - 1)/4 = 16 + 1/3
        let b = ztype_cluster_bound(
            ClusterStats {
                size: 1,
                perimeter: 4,
            },
            4,
        );
        assert!((b.log2() + 16.0 + 1.0 / 3.0).abs() < 1e-12);
        assert!(tau_in_proven_regime(2, 32));
        assert!(!tau_in_proven_regime(2, 8));
        assert!(tau_in_proven_regime(1, 1));
    }

    #[test]
    fn identity_pattern_is_always_ztype() {
        let r = ztype_probability_mc(&PauliString::identity(16), 2, 2, 50, 1).unwrap();
        assert_eq!(r.estimate.mean, 1.0);
        assert_eq!(r.bound, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn lazy_matches_full_circuit() {
        let t = coarse_grained_template(2, 2).unwrap();
        for seed in 0..40 {
            let p = PauliString::single(16, (seed % 16) as usize, Letter::Z);
            let c = CliffordCircuit::instantiate(&t, SamplerPolicy::Uniform, seed);
            let full = c
                .conjugate_pauli(&p, Direction::Backward)
                .unwrap()
                .is_z_type();
            assert_eq!(
                backward_is_ztype(&t, SamplerPolicy::Uniform, seed, &p),
                full
            );
        }
    }

    #[test]
    fn single_qubit_z_small_grid() {
        let p = PauliString::single(16, 0, Letter::Z);
        let r = ztype_probability_mc(&p, 2, 2, 20_000, 5).unwrap();
        assert_eq!(
            r.stats,
            ClusterStats {
                size: 1,
                perimeter: 2
            }
        );
        assert!(r.bound < 1.0);
        assert!(r.pass, "{r:?}");
        // worked value: (7 + 24·15/255)/255
        let exact = (7.0 + 24.0 * 15.0 / 255.0) / 255.0;
        assert!(
            (r.estimate.mean - exact).abs() < 4.0 * r.estimate.stderr + 1e-3,
            "{r:?}"
        );
    }

    #[test]
    fn exhaustive_t2() {
        let (num, den) = exhaustive_t2_part_a().unwrap();
        // P_Q = I with probability 1/25, otherwise Z-type with probability 3/15
        assert_eq!((num, den), (29, 125));
        assert!(4 * num <= den);
    }

    #[test]
    fn conditioned_sampler_respects_blocks() {
        let mut rng = rng_from_seed(2);
        for _ in 0..200 {
            // q = 1: Q = {1} inside block {0,1,2}; with complement I the block
            // must be non-identity on Q
            let p = sample_block_restriction(1, Conditioning::ComplementIdentity, &mut rng);
            assert!(!p.is_identity_unsigned());
        }
        let ids = (0..4000)
            .filter(|_| {
                sample_block_restriction(1, Conditioning::ComplementX, &mut rng)
                    .is_identity_unsigned()
            })
            .count();
        assert!((ids as f64 / 4000.0 - 0.25).abs() < 0.04);
    }

    #[test]
    fn block_pauli_checks_small() {
        let r = appendix_b_lemma_checks(3, 4000, 8).unwrap();
        assert_eq!(r.rows.len(), 9);
        assert!(r.pass(), "{r:?}");
        assert!(appendix_b_lemma_checks(9, 10, 0).is_err());
    }

    #[test]
    fn s_bound_control_and_informational() {
        let (m, tau) = (2, 4);
        let grid = GridGeometry::square(m * tau).unwrap();
        let part = square_tripartition(grid, grid.index(4, 4), 5).unwrap();
        let ctl = expected_s_bound_mc(m, tau, &part, SamplerPolicy::Identity, 5, 1).unwrap();
        assert!(ctl.control && ctl.informational);
        assert_eq!(ctl.expected_s.mean, 2f64.powi(part.b().len() as i32));
        assert!(ctl.expected_s.mean > ctl.bound);
        let r = expected_s_bound_mc(m, tau, &part, SamplerPolicy::Uniform, 20, 1).unwrap();
        assert!(r.informational && r.pass && !r.control);
        let seen: usize = r.perimeters.iter().map(|b| b.count).sum();
        assert!(seen <= 3 * r.nonempty_trials);
    }

    proptest! {
        #[test]
        fn cluster_ignores_letters_and_signs(seed in any::<u64>(), neg in any::<bool>()) {
            let (m, tau) = (3, 2);
            let mut rng = rng_from_seed(seed);
            let p = sample_nonidentity_pauli(36, &mut rng).unwrap();
            let mut q = PauliString::identity(36);
            for i in p.support() {
                q.set(i, [Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..3)]);
            }
            q.set_negative(neg);
            prop_assert_eq!(cluster_of(&p, m, tau).unwrap(), cluster_of(&q, m, tau).unwrap());
        }

        #[test]
        fn perimeter_zero_only_for_trivial(m in 1usize..5, bits in any::<u32>()) {
            let cells: Vec<_> = (0..m * m).filter(|i| bits >> i & 1 == 1).map(|i| (i / m, i % m)).collect();
            let c = Cluster::from_cells(m, &cells).unwrap();
            let s = stats_of(&c);
            prop_assert!(s.perimeter <= 2 * m * (m - 1));
            prop_assert_eq!(s.perimeter == 0, s.size == 0 || s.size == m * m);
        }
    }
}
