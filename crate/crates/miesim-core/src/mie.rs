//! Tripartitions, the set `S`, postmeasurement purities and the
//! anticoncentration estimator χ.
//!
//! For a circuit `D` and a tripartition with `|A| = 1`, `S` collects the
//! strings `s` for which `D Z(s) D† = ±P_A ⊗ (Z-type)_B ⊗ I_C` with
//! `P ∈ {X, Y, Z}`. The postmeasurement state of `A` (after measuring `B`)
//! is entangled with `C` exactly when `S` is empty.
//!
//! `S` is counted without enumeration: with generators `r_j = D Z_j D†`, the
//! map `s ↦ ∏ r_j^{s_j}` is linear over GF(2) in the Pauli bits. The strings
//! whose product has no X/Y on `B ∪ C` and no Z on `C` form a subspace `K`
//! (dimension `k`); restricted to `K`, the `A`-letter is a linear map into
//! GF(2)² of rank `j`. Each letter in its image has `2^{k−j}` preimages.

use rand::Rng;

use crate::arch::{BrickColor, CliffordCircuit, Ensemble, GridGeometry};
use crate::bits::{self, words_for};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gate::CliffordGate;
use crate::gf2::{rank_u64, span_u64, SplitEliminator};
use crate::pauli::{Letter, PauliString};
use crate::seed::{mix, par_trials, rng_from_seed};
use crate::stats::{mean_stderr, MeanStderr};

/// Disjoint `A`, `B`, `C` covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tripartition {
    n: usize,
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
}

impl Tripartition {
    pub fn new(n: usize, mut a: Vec<usize>, mut b: Vec<usize>, mut c: Vec<usize>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidTripartition("A must be nonempty".into()));
        }
        let mut seen = vec![false; n];
        for &q in a.iter().chain(&b).chain(&c) {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            if seen[q] {
                return Err(Error::InvalidTripartition(format!(
                    "qubit {q} appears twice"
                )));
            }
            seen[q] = true;
        }
        if let Some(q) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidTripartition(format!(
                "qubit {q} is in none of A, B, C"
            )));
        }
        a.sort_unstable();
        b.sort_unstable();
        c.sort_unstable();
        Ok(Tripartition { n, a, b, c })
    }

    /// Build from `A` and `B`; `C` is everything else.
    pub fn from_a_b(n: usize, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        let mut used = vec![false; n];
        for &q in a.iter().chain(&b) {
            if q < n {
                used[q] = true;
            }
        }
        let c = (0..n).filter(|&q| !used[q]).collect();
        Self::new(n, a, b, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn c(&self) -> &[usize] {
        &self.c
    }

    /// Long-range statements need `C` nonempty.
    pub fn c_is_empty(&self) -> bool {
        self.c.is_empty()
    }

    fn single_a(&self) -> Result<usize> {
        match self.a.as_slice() {
            [q] => Ok(*q),
            _ => Err(Error::InvalidTripartition(format!(
                "A must be a single qubit, got {}",
                self.a.len()
            ))),
        }
    }
}

/// `A = {center}`, `B` = the side-`L` square around it (clipped at the grid
/// edge) minus `A`, `C` = the rest.
pub fn square_tripartition(grid: GridGeometry, center: usize, l: usize) -> Result<Tripartition> {
    if center >= grid.n() {
        return Err(Error::QubitOutOfRange {
            index: center,
            n: grid.n(),
        });
    }
    if l.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "shield side must be odd, got {l}"
        )));
    }
    let b = grid
        .square_around(center, l / 2)
        .into_iter()
        .filter(|&q| q != center)
        .collect();
    Tripartition::from_a_b(grid.n(), vec![center], b)
}

/// `A` = the grid center, `C` = the boundary ring, `B` = everything else.
pub fn boundary_tripartition(grid: GridGeometry) -> Result<Tripartition> {
    let center = grid.center();
    if grid.is_boundary(center) {
        return Err(Error::InvalidParameter(format!(
            "grid {}x{} has no interior",
            grid.rows, grid.cols
        )));
    }
    let b = (0..grid.n())
        .filter(|&q| q != center && !grid.is_boundary(q))
        .collect();
    Tripartition::from_a_b(grid.n(), vec![center], b)
}

/// Sizes of `S_X`, `S_Y`, `S_Z` as base-2 logarithms (`None` = empty).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SSetSummary {
    pub log2_sx: Option<usize>,
    pub log2_sy: Option<usize>,
    pub log2_sz: Option<usize>,
}

impl SSetSummary {
    pub fn is_empty(&self) -> bool {
        self.log2_sx.is_none() && self.log2_sy.is_none() && self.log2_sz.is_none()
    }

    pub fn log2_size(&self, letter: Letter) -> Option<usize> {
        match letter {
            Letter::X => self.log2_sx,
            Letter::Y => self.log2_sy,
            Letter::Z => self.log2_sz,
            Letter::I => None,
        }
    }

    /// `|S|` as a float; saturates to infinity past `2^1023`.
    pub fn total(&self) -> f64 {
        [self.log2_sx, self.log2_sy, self.log2_sz]
            .iter()
            .flatten()
            .map(|&k| pow2(k))
            .sum()
    }
}

fn pow2(k: usize) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else {
        2f64.powi(k as i32)
    }
}

/// Payload code of a letter on `A`: bit 0 = x, bit 1 = z.
fn letter_code(l: Letter) -> u64 {
    let (x, z) = l.bits();
    x as u64 | (z as u64) << 1
}

/// Rows `[x on B∪C | z on C | payload…]` of the unsigned generators.
fn s_rows(
    circuit: &CliffordCircuit,
    part: &Tripartition,
    a: usize,
    extra: usize,
) -> (SplitEliminator, usize) {
    let n = circuit.n();
    let w = words_for(n);
    let (xs, zs) = circuit.unsigned_stabilizer_rows();
    let mx = bits::mask_of(n, part.b.iter().chain(&part.c).copied());
    let mz = bits::mask_of(n, part.c.iter().copied());
    let mut e = SplitEliminator::new(2 * w, 2 * w + 1 + extra);
    for j in 0..n {
        let mut row = Vec::with_capacity(2 * w + 1 + extra);
        row.extend((0..w).map(|k| xs[j * w + k] & mx[k]));
        row.extend((0..w).map(|k| zs[j * w + k] & mz[k]));
        row.push(bits::get(&xs[j * w..], a) as u64 | (bits::get(&zs[j * w..], a) as u64) << 1);
        if extra > 0 {
            let mut id = vec![0u64; extra];
            bits::set(&mut id, j, true);
            row.extend(id);
        }
        e.insert(row);
    }
    (e, w)
}

/// Count `S_X`, `S_Y`, `S_Z` for a single-qubit `A`.
pub fn compute_s(circuit: &CliffordCircuit, part: &Tripartition) -> Result<SSetSummary> {
    check_part(circuit, part)?;
    let a = part.single_a()?;
    let (e, _) = s_rows(circuit, part, a, 0);
    let payloads: Vec<u64> = e.tails().iter().map(|t| t[0]).collect();
    let k = e.kernel_dim();
    let j = rank_u64(&payloads);
    let image = span_u64(&payloads);
    let size = |l: Letter| image.contains(&letter_code(l)).then_some(k - j);
    Ok(SSetSummary {
        log2_sx: size(Letter::X),
        log2_sy: size(Letter::Y),
        log2_sz: size(Letter::Z),
    })
}

/// One member of each nonempty `S_P`, as the bit vector `s`.
pub fn s_members(circuit: &CliffordCircuit, part: &Tripartition) -> Result<[Option<Vec<bool>>; 3]> {
    check_part(circuit, part)?;
    let a = part.single_a()?;
    let n = circuit.n();
    let (e, _) = s_rows(circuit, part, a, words_for(n));
    // tails are [payload, s…]; keep those with independent payloads
    let mut basis: Vec<&Vec<u64>> = Vec::new();
    for t in e.tails() {
        let mut p: Vec<u64> = basis.iter().map(|b| b[0]).collect();
        p.push(t[0]);
        if rank_u64(&p) > basis.len() {
            basis.push(t);
        }
    }
    let find = |code: u64| {
        for mask in 1u32..(1 << basis.len()) {
            let mut acc = vec![0u64; 1 + words_for(n)];
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    bits::xor_into(&mut acc, b);
                }
            }
            if acc[0] == code {
                return Some((0..n).map(|q| bits::get(&acc[1..], q)).collect());
            }
        }
        None
    };
    Ok([
        find(letter_code(Letter::X)),
        find(letter_code(Letter::Y)),
        find(letter_code(Letter::Z)),
    ])
}

fn check_part(circuit: &CliffordCircuit, part: &Tripartition) -> Result<()> {
    if circuit.n() != part.n {
        return Err(Error::SizeMismatch {
            expected: circuit.n(),
            got: part.n,
        });
    }
    Ok(())
}

/// Entanglement between `A` and `C` after measuring `B`: `S = ∅`.
pub fn mie_present(circuit: &CliffordCircuit, part: &Tripartition) -> Result<bool> {
    Ok(compute_s(circuit, part)?.is_empty())
}

/// Run the circuit, measure all of `B` with `rng`, return `Tr ρ_A²`.
pub fn sampled_postmeasurement_purity<R: Rng + ?Sized>(
    circuit: &CliffordCircuit,
    part: &Tripartition,
    rng: &mut R,
) -> Result<Dyadic> {
    check_part(circuit, part)?;
    let mut t = circuit.run();
    for &q in &part.b {
        t.measure_z(q, rng)?;
    }
    t.region_purity(&part.a)
}

/// Shield geometry of a scan point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanGeometry {
    /// `A` = center, `C` = boundary ring, `B` = the rest.
    Boundary,
    /// Odd-side square shield around the center.
    Square(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MieScanRow {
    pub arch: String,
    pub depth: usize,
    /// Shield side; for the boundary geometry this is `grid − 2`.
    pub l: usize,
    pub grid: usize,
    pub trials: usize,
    pub mean_purity: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Brickwork MIE scan over square grids of the given sides.
pub fn mie_scan(
    grids: &[usize],
    depths: &[usize],
    geometries: &[ScanGeometry],
    order: [BrickColor; 4],
    trials: usize,
    seed: u64,
) -> Result<Vec<MieScanRow>> {
    let mut rows = Vec::new();
    for &d in depths {
        for &side in grids {
            let grid = GridGeometry::square(side)?;
            let ens = Ensemble::uniform(crate::arch::brickwork_template_with_order(
                side, side, d, order,
            )?);
            for &geo in geometries {
                let (part, l) = match geo {
                    ScanGeometry::Boundary => (boundary_tripartition(grid)?, side - 2),
                    ScanGeometry::Square(l) => (square_tripartition(grid, grid.center(), l)?, l),
                };
                let tag = format!("mie-scan/d={d}/grid={side}/L={l}");
                let pur = par_trials(trials, |i| {
                    let c = ens.instance(seed, &tag, i);
                    let mut rng = rng_from_seed(mix(seed, &tag, i as u64) ^ 0x5555);
                    sampled_postmeasurement_purity(&c, &part, &mut rng).map(|p| p.to_f64())
                });
                let pur: Vec<f64> = pur.into_iter().collect::<Result<_>>()?;
                let m = mean_stderr(&pur);
                rows.push(MieScanRow {
                    arch: "brickwork".into(),
                    depth: d,
                    l,
                    grid: side,
                    trials,
                    mean_purity: m.mean,
                    stderr: m.stderr,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Thresholds for the qualitative shape of a boundary scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanShapeCriteria {
    /// Depths at or below this must stay near-pure at the largest grid.
    pub shallow_max_depth: usize,
    pub shallow_min_purity: f64,
    pub deep_depths: Vec<usize>,
    pub deep_max_purity: f64,
    /// Smallest grid at which the deep-depth ceiling applies.
    pub deep_min_grid: usize,
    /// The two largest grids must agree within this many combined σ.
    pub plateau_sigmas: f64,
}

impl Default for ScanShapeCriteria {
    fn default() -> Self {
        ScanShapeCriteria {
            shallow_max_depth: 4,
            shallow_min_purity: 0.99,
            deep_depths: vec![6, 7, 8],
            deep_max_purity: 0.95,
            deep_min_grid: 13,
            plateau_sigmas: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanShapeVerdict {
    /// One line per failed condition.
    pub failures: Vec<String>,
}

impl ScanShapeVerdict {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check scan rows against `crit`. Depths absent from `rows` are skipped; a
/// scan with fewer than two grids cannot show a plateau and fails that part.
pub fn scan_shape_check(rows: &[MieScanRow], crit: &ScanShapeCriteria) -> ScanShapeVerdict {
    let mut failures = Vec::new();
    let mut depths: Vec<usize> = rows.iter().map(|r| r.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    for d in depths {
        let mut at: Vec<&MieScanRow> = rows.iter().filter(|r| r.depth == d).collect();
        at.sort_by_key(|r| r.grid);
        let last = at[at.len() - 1];
        if d <= crit.shallow_max_depth && last.mean_purity < crit.shallow_min_purity {
            failures.push(format!(
                "d={d}: purity {:.4} at grid {} is below {}",
                last.mean_purity, last.grid, crit.shallow_min_purity
            ));
        }
        if !crit.deep_depths.contains(&d) {
            continue;
        }
        for r in at
            .iter()
            .filter(|r| r.grid >= crit.deep_min_grid && r.mean_purity > crit.deep_max_purity)
        {
            failures.push(format!(
                "d={d}: purity {:.4} at grid {} is above {}",
                r.mean_purity, r.grid, crit.deep_max_purity
            ));
        }
        match at.len() {
            0 | 1 => failures.push(format!("d={d}: need two grids for the plateau test")),
            k => {
                let (a, b) = (at[k - 2], at[k - 1]);
                let sigma = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                let diff = (a.mean_purity - b.mean_purity).abs();
                // identical means with zero spread count as a plateau
                if diff > 0.0 && diff >= crit.plateau_sigmas * sigma {
                    failures.push(format!(
                        "d={d}: grids {} and {} differ by {diff:.4} (σ = {sigma:.4})",
                        a.grid, b.grid
                    ));
                }
            }
        }
    }
    ScanShapeVerdict { failures }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub instances: usize,
    pub measurements: usize,
    /// Instances with `S ≠ ∅`.
    pub nonempty_s: usize,
    /// Measurement runs where `Tr ρ_A² = 1` disagrees with `S ≠ ∅`.
    pub exceptions: usize,
}

/// For `instances` circuits, measure `B` `repetitions` times and compare the
/// exact post-measurement purity with the `S` test.
pub fn purity_exactness_check(
    ens: &Ensemble,
    part: &Tripartition,
    instances: usize,
    repetitions: usize,
    seed: u64,
) -> Result<ExactnessReport> {
    let res: Vec<Result<(bool, usize)>> = par_trials(instances, |i| {
        let c = ens.instance(seed, "exactness", i);
        let nonempty = !compute_s(&c, part)?.is_empty();
        let mut bad = 0;
        for r in 0..repetitions {
            let mut rng =
                rng_from_seed(mix(seed, "exactness/measure", (i * repetitions + r) as u64));
            let p = sampled_postmeasurement_purity(&c, part, &mut rng)?;
            bad += (p.is_one() != nonempty) as usize;
        }
        Ok((nonempty, bad))
    });
    let mut rep = ExactnessReport {
        instances,
        measurements: instances * repetitions,
        nonempty_s: 0,
        exceptions: 0,
    };
    for r in res {
        let (nonempty, bad) = r?;
        rep.nonempty_s += nonempty as usize;
        rep.exceptions += bad;
    }
    Ok(rep)
}

/// `P_AB(0)` exactly, by forced zero outcomes.
pub fn zero_probability(circuit: &CliffordCircuit, ab: &[usize]) -> Result<Dyadic> {
    let t = circuit.run();
    t.outcome_probability(ab, &vec![false; ab.len()])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiEstimate {
    pub chi: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Monte Carlo `χ = 4^{|AB|} E[P_AB(0)²] − 1`.
pub fn chi_estimate(ens: &Ensemble, ab: &[usize], trials: usize, seed: u64) -> Result<ChiEstimate> {
    crate::tableau::check_support(ens.n(), ab)?;
    let sq: Vec<f64> = par_trials(trials, |i| {
        let p = zero_probability(&ens.instance(seed, "chi", i), ab)
            .expect("support checked")
            .to_f64();
        p * p
    });
    let m = mean_stderr(&sq);
    let scale = 4f64.powi(ab.len() as i32);
    Ok(ChiEstimate {
        chi: scale * m.mean - 1.0,
        stderr: scale * m.stderr,
        trials,
    })
}

/// Exact χ of the state `g|0^k⟩` averaged over the listed `k`-qubit gates, as
/// a reduced fraction `(numerator, denominator)`.
pub fn chi_exhaustive(gates: &[CliffordGate], ab: &[usize]) -> Result<(i128, i128)> {
    let Some(first) = gates.first() else {
        return Err(Error::InvalidParameter("no gates to average over".into()));
    };
    let k = first.arity();
    crate::tableau::check_support(k, ab)?;
    if ab.len() > 30 {
        return Err(Error::CapExceeded {
            what: "|AB| for exact chi",
            cap: 30,
            got: ab.len(),
        });
    }
    let support: Vec<usize> = (0..k).collect();
    let mut sum: i128 = 0;
    for g in gates {
        let mut t = crate::tableau::StabilizerTableau::new_zero_state(k)?;
        t.apply_gate(g, &support)?;
        let p = t.outcome_probability(ab, &vec![false; ab.len()])?;
        // p · 2^{|AB|} is an integer
        let scaled = p
            .scale_pow2(ab.len() as u32)
            .expect("probability times 2^|AB| fits")
            .mantissa() as i128;
        sum += scaled * scaled;
    }
    let den = gates.len() as i128;
    let num = sum - den;
    let g = gcd(num.unsigned_abs(), den as u128) as i128;
    Ok((num / g, den / g))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PurityBoundReport {
    /// Mean sampled purity of `A`.
    pub lhs: MeanStderr,
    /// Monte Carlo `E|S|`.
    pub expected_s: MeanStderr,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// The bound is at least 1 and so says nothing.
    pub vacuous: bool,
    pub pass: bool,
}

/// Check `E[Tr ρ_A²] ≤ 1/2 + (1/2)√(3 E|S|)` within three combined standard
/// errors. The RHS error is propagated with the delta method.
pub fn theorem3_bound_check(
    ens: &Ensemble,
    part: &Tripartition,
    trials: usize,
    seed: u64,
) -> Result<PurityBoundReport> {
    part.single_a()?;
    let res: Vec<Result<(f64, f64)>> = par_trials(trials, |i| {
        let c = ens.instance(seed, "purity-bound", i);
        let s = compute_s(&c, part)?.total();
        let mut rng = rng_from_seed(mix(seed, "purity-bound/measure", i as u64));
        let p = sampled_postmeasurement_purity(&c, part, &mut rng)?.to_f64();
        Ok((p, s))
    });
    let res: Vec<(f64, f64)> = res.into_iter().collect::<Result<_>>()?;
    let lhs = mean_stderr(&res.iter().map(|r| r.0).collect::<Vec<_>>());
    let expected_s = mean_stderr(&res.iter().map(|r| r.1).collect::<Vec<_>>());
    let e = expected_s.mean;
    let rhs = 0.5 + 0.5 * (3.0 * e).sqrt();
    let rhs_stderr = if e > 0.0 && e.is_finite() {
        0.75 * expected_s.stderr / (3.0 * e).sqrt()
    } else {
        0.0
    };
    let sigma = (lhs.stderr.powi(2) + rhs_stderr.powi(2)).sqrt();
    let pass = !rhs.is_finite() || lhs.mean <= rhs + 3.0 * sigma;
    Ok(PurityBoundReport {
        lhs,
        expected_s,
        rhs,
        rhs_stderr,
        vacuous: rhs >= 1.0,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiDepthRow {
    pub depth: usize,
    pub estimate: MeanStderr,
    pub bound: f64,
    pub pass: bool,
}

/// Estimate `E[⟨0|D† Z_A D|0⟩²]` on brickwork circuits and compare with
/// `(1/3)(2/5)^d`.
pub fn chi_depth_lower_bound_check(
    rows: usize,
    cols: usize,
    depths: &[usize],
    a: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<ChiDepthRow>> {
    let mut out = Vec::new();
    for &d in depths {
        let ens = Ensemble::uniform(crate::arch::brickwork_template(rows, cols, d)?);
        let n = ens.n();
        if a >= n {
            return Err(Error::QubitOutOfRange { index: a, n });
        }
        let za = PauliString::single(n, a, Letter::Z);
        let tag = format!("chi-depth/d={d}");
        let v: Vec<f64> = par_trials(trials, |i| {
            let e = ens.instance(seed, &tag, i).run().expectation(&za) as f64;
            e * e
        });
        let estimate = mean_stderr(&v);
        let bound = (0.4f64).powi(d as i32) / 3.0;
        out.push(ChiDepthRow {
            depth: d,
            estimate,
            bound,
            pass: estimate.mean >= bound - 3.0 * estimate.stderr,
        });
    }
    Ok(out)
}
