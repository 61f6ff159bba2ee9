//! Randomized batches of the sampler checks on small circuits.
//!
//! Case `i` of a suite draws its grid and circuit from
//! `trial_rng(seed, <suite tag>, i)`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arch::GridGeometry;
use crate::error::{Error, Result};
use crate::mie::Tripartition;
use crate::seed::{mix, par_trials, trial_rng, TrialRng};

use super::checks::{full_conditioning_error, purity_fidelity_identity_check, tvd_bound_check};
use super::schedule::{plan_parallel_schedule, validate_schedule};
use super::{random_gbg_circuit, GbgCircuit};

/// Fraction of qubits that get a single-qubit gate in each random layer.
pub const SUITE_DENSITY: f64 = 0.6;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteCase {
    pub index: usize,
    pub rows: usize,
    pub cols: usize,
    pub gates: usize,
    /// Shield side, where the check has one.
    pub l: Option<usize>,
    /// The checked quantity and the largest value that passes.
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: Vec<SuiteCase>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    /// Largest `value − bound` over the cases.
    pub fn worst_margin(&self) -> f64 {
        self.cases
            .iter()
            .map(|c| c.value - c.bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Uniform grid shape with `2 ≤ rows·cols ≤ max_qubits`.
pub fn random_grid<R: Rng + ?Sized>(max_qubits: usize, rng: &mut R) -> Result<GridGeometry> {
    let mut shapes = Vec::new();
    for r in 1..=max_qubits {
        for c in 1..=max_qubits / r {
            if r * c >= 2 {
                shapes.push((r, c));
            }
        }
    }
    let &(r, c) = shapes.choose(rng).ok_or_else(|| {
        Error::InvalidParameter(format!("max_qubits must be at least 2, got {max_qubits}"))
    })?;
    GridGeometry::new(r, c)
}

fn case_circuit(
    tag: &str,
    i: usize,
    max_qubits: usize,
    layers: usize,
    seed: u64,
) -> Result<(GbgCircuit, TrialRng)> {
    let mut rng = trial_rng(seed, tag, i as u64);
    let grid = random_grid(max_qubits, &mut rng)?;
    let c = random_gbg_circuit(grid, layers, SUITE_DENSITY, false, &mut rng);
    Ok((c, rng))
}

fn case(
    i: usize,
    c: &GbgCircuit,
    l: Option<usize>,
    value: f64,
    bound: f64,
    pass: bool,
) -> SuiteCase {
    SuiteCase {
        index: i,
        rows: c.grid().rows,
        cols: c.grid().cols,
        gates: c.gates().len(),
        l,
        value,
        bound,
        pass,
    }
}

fn collect(name: &'static str, cases: Vec<Result<SuiteCase>>) -> Result<SuiteReport> {
    Ok(SuiteReport {
        name,
        cases: cases.into_iter().collect::<Result<_>>()?,
    })
}

/// With every other qubit as the conditioning set the sampler must reproduce
/// the ideal distribution; `value` is the largest pointwise deviation.
pub fn exactness_suite(
    circuits: usize,
    max_qubits: usize,
    layers: usize,
    seed: u64,
) -> Result<SuiteReport> {
    const TOL: f64 = 1e-9;
    let cases = par_trials(circuits, |i| {
        let (c, _) = case_circuit("gbg-exactness", i, max_qubits, layers, seed)?;
        let err = full_conditioning_error(&c)?;
        Ok(case(i, &c, None, err, TOL, err < TOL))
    });
    collect("exactness", cases)
}

/// Fidelity/purity identity at a random time step for a random `A` of one or
/// two qubits and a random `B`.
pub fn identity_suite(
    circuits: usize,
    max_qubits: usize,
    layers: usize,
    seed: u64,
) -> Result<SuiteReport> {
    const TOL: f64 = 1e-8;
    let cases = par_trials(circuits, |i| {
        let (c, mut rng) = case_circuit("gbg-identity", i, max_qubits, layers, seed)?;
        let n = c.n();
        let t = rng.gen_range(0..=c.gates().len());
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(&mut rng);
        let na = rng.gen_range(1..=2.min(n - 1));
        let nb = rng.gen_range(0..=n - na);
        let part = Tripartition::from_a_b(n, qs[..na].to_vec(), qs[na..na + nb].to_vec())?;
        let r = purity_fidelity_identity_check(&c, t, &part)?;
        Ok(case(i, &c, None, r.diff, TOL, r.diff <= TOL))
    });
    collect("identity", cases)
}

/// Error bound of the shielded sampler; case `i` uses `shields[i % len]`.
/// `value` is the empirical L1 distance of `samples` draws and `bound` the
/// exact right-hand side plus three sampling σ.
pub fn tvd_suite(
    circuits: usize,
    max_qubits: usize,
    layers: usize,
    shields: &[usize],
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    if shields.is_empty() {
        return Err(Error::InvalidParameter("no shield sides given".into()));
    }
    // one case at a time: the sampler itself fans out over samples
    let cases = (0..circuits)
        .map(|i| {
            let (c, _) = case_circuit("gbg-tvd", i, max_qubits, layers, seed)?;
            let l = shields[i % shields.len()];
            let r = tvd_bound_check(&c, l, samples, mix(seed, "gbg-tvd/sample", i as u64))?;
            Ok(case(
                i,
                &c,
                Some(l),
                r.empirical_lhs,
                r.rhs + 3.0 * r.sigma,
                r.pass,
            ))
        })
        .collect();
    collect("tvd", cases)
}

/// Plan and machine-check parallel schedules on a fixed grid; `value` is the
/// largest number of groups in a layer.
pub fn schedule_suite(
    grid: GridGeometry,
    layers: usize,
    shields: &[usize],
    seed: u64,
) -> Result<SuiteReport> {
    let cases = shields
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let mut rng = trial_rng(seed, "gbg-schedule", i as u64);
            let c = random_gbg_circuit(grid, layers, SUITE_DENSITY, false, &mut rng);
            let s = plan_parallel_schedule(&c, l)?;
            let groups = s.max_groups();
            let valid = validate_schedule(&c, &s).is_ok();
            Ok(case(
                i,
                &c,
                Some(l),
                groups as f64,
                9.0,
                valid && groups <= 9,
            ))
        })
        .collect();
    collect("schedule", cases)
}
