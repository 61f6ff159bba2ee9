//! Execute a parsed configuration: produce CSV bytes and named pass/fail checks.

use serde::Serialize;

use miesim_core::advantage::advantage_report;
use miesim_core::arch::{
    coarse_grained_template, Architecture, CircuitTemplate, Ensemble, GateSupport, GridGeometry,
};
use miesim_core::cluster::{
    appendix_b_lemma_checks, expected_s_bound_mc, single_cell_patterns, stats_of,
    ztype_probability_mc, Cluster,
};
use miesim_core::dense::engine_equivalence_check;
use miesim_core::gbg::{exactness_suite, identity_suite, schedule_suite, tvd_suite, SuiteReport};
use miesim_core::ghz::{ghz_scan, graph_triple_check};
use miesim_core::mie::{
    boundary_tripartition, chi_depth_lower_bound_check, chi_estimate, chi_exhaustive, mie_scan,
    purity_exactness_check, scan_shape_check, square_tripartition, theorem3_bound_check,
    ScanGeometry, Tripartition,
};
use miesim_core::sampling::enumerate_clifford_group;
use miesim_core::seed::mix;
use miesim_core::{Error, Result};

use crate::config::{Experiment, ExperimentConfig, Shield};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub csv: Vec<u8>,
    pub checks: Vec<Check>,
}

/// Schema read back by `plot --kind mie-scan`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanRow {
    pub arch: String,
    pub depth: usize,
    pub l: usize,
    pub grid: usize,
    pub trials: usize,
    pub mean_purity: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Schema read back by `plot --kind chi-depth`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ChiDepthCsvRow {
    pub depth: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub trials: usize,
    pub pass: bool,
}

/// Generic row for checks that compare one value with one bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub value: f64,
    pub stderr: f64,
    pub bound: f64,
    pub trials: usize,
    pub pass: bool,
}

impl CheckRow {
    fn new(
        check: &str,
        case: impl Into<String>,
        value: f64,
        stderr: f64,
        bound: f64,
        trials: usize,
        pass: bool,
    ) -> Self {
        CheckRow {
            check: check.into(),
            case: case.into(),
            value,
            stderr,
            bound,
            trials,
            pass,
        }
    }
}

#[derive(Serialize)]
struct ExactnessRow {
    ensemble: String,
    params: String,
    n: usize,
    instances: usize,
    measurements: usize,
    nonempty_s: usize,
    exceptions: usize,
}

#[derive(Serialize)]
struct BoundRow {
    ensemble: String,
    params: String,
    n: usize,
    trials: usize,
    lhs: f64,
    lhs_stderr: f64,
    expected_s: f64,
    expected_s_stderr: f64,
    rhs: f64,
    rhs_stderr: f64,
    vacuous: bool,
    pass: bool,
}

#[derive(Serialize)]
struct AdvantageCsvRow {
    state: String,
    function_id: usize,
    failures: u32,
    rate: f64,
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn partition(arch: &Architecture, shield: Shield) -> Result<(Ensemble, Tripartition)> {
    let t = arch.template()?;
    let grid = t
        .grid()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no grid", arch.name())))?;
    let part = match shield {
        Shield::Boundary => boundary_tripartition(grid)?,
        Shield::Square(l) => square_tripartition(grid, grid.center(), l)?,
    };
    Ok((Ensemble::uniform(t), part))
}

fn suite_rows(r: &SuiteReport) -> Vec<CheckRow> {
    r.cases
        .iter()
        .map(|c| {
            let l = c.l.map(|l| format!(" L={l}")).unwrap_or_default();
            let case = format!("{} {}x{} gates={}{l}", c.index, c.rows, c.cols, c.gates);
            CheckRow::new(r.name, case, c.value, 0.0, c.bound, 1, c.pass)
        })
        .collect()
}

fn suite_check(r: &SuiteReport) -> Check {
    Check::new(
        format!("gbg-{}", r.name),
        r.pass(),
        format!(
            "{} of {} cases fail; worst value − bound = {:.3e}",
            r.failures(),
            r.cases.len(),
            r.worst_margin()
        ),
    )
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

/// Run the experiment. Output depends only on the configuration, not on the
/// worker count.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let seed = cfg.seed;
    let mut checks = Vec::new();
    let csv = match &cfg.experiment {
        Experiment::PurityScan { grids, depths, shields, order, trials, shape } => {
            let mut rows = Vec::new();
            for &sh in shields {
                let geo = match sh {
                    Shield::Boundary => ScanGeometry::Boundary,
                    Shield::Square(l) => ScanGeometry::Square(l),
                };
                let part = mie_scan(grids, depths, &[geo], *order, *trials, seed)?;
                if let Some(crit) = shape {
                    let v = scan_shape_check(&part, crit);
                    let name = match sh {
                        Shield::Boundary => "scan-shape boundary".to_string(),
                        Shield::Square(l) => format!("scan-shape L={l}"),
                    };
                    let detail = if v.pass() { "all conditions hold".to_string() } else { v.failures.join("; ") };
                    checks.push(Check::new(name, v.pass(), detail));
                }
                rows.extend(part);
            }
            let rows: Vec<ScanRow> = rows
                .into_iter()
                .map(|r| ScanRow {
                    arch: r.arch,
                    depth: r.depth,
                    l: r.l,
                    grid: r.grid,
                    trials: r.trials,
                    mean_purity: r.mean_purity,
                    stderr: r.stderr,
                    seed: r.seed,
                })
                .collect();
            to_csv(&rows)
        }
        Experiment::PurityExactness { ensembles, shield, instances, repetitions } => {
            let mut rows = Vec::new();
            let k = ensembles.len();
            for (i, arch) in ensembles.iter().enumerate() {
                let share = instances / k + usize::from(i < instances % k);
                let (ens, part) = partition(arch, *shield)?;
                let r = purity_exactness_check(&ens, &part, share, *repetitions, mix(seed, "exactness/ensemble", i as u64))?;
                checks.push(Check::new(
                    format!("exactness {} {}", arch.name(), arch.params()),
                    r.exceptions == 0,
                    format!("{} exceptions in {} measurements; S nonempty in {} of {}", r.exceptions, r.measurements, r.nonempty_s, r.instances),
                ));
                rows.push(ExactnessRow {
                    ensemble: arch.name().into(),
                    params: arch.params(),
                    n: ens.n(),
                    instances: r.instances,
                    measurements: r.measurements,
                    nonempty_s: r.nonempty_s,
                    exceptions: r.exceptions,
                });
            }
            to_csv(&rows)
        }
        Experiment::PurityBound { ensembles, shield, trials } => {
            let mut rows = Vec::new();
            for arch in ensembles {
                let (ens, part) = partition(arch, *shield)?;
                let r = theorem3_bound_check(&ens, &part, *trials, seed)?;
                checks.push(Check::new(
                    format!("purity-bound {} {}", arch.name(), arch.params()),
                    r.pass,
                    format!("LHS {:.5} ± {:.5}, RHS {:.5} ± {:.5}{}", r.lhs.mean, r.lhs.stderr, r.rhs, r.rhs_stderr, if r.vacuous { " (vacuous)" } else { "" }),
                ));
                rows.push(BoundRow {
                    ensemble: arch.name().into(),
                    params: arch.params(),
                    n: ens.n(),
                    trials: *trials,
                    lhs: r.lhs.mean,
                    lhs_stderr: r.lhs.stderr,
                    expected_s: r.expected_s.mean,
                    expected_s_stderr: r.expected_s.stderr,
                    rhs: r.rhs,
                    rhs_stderr: r.rhs_stderr,
                    vacuous: r.vacuous,
                    pass: r.pass,
                });
            }
            to_csv(&rows)
        }
        Experiment::ChiExhaustive { ab, trials } => {
            if *ab > 2 {
                return Err(Error::InvalidParameter(format!("|AB| = {ab} exceeds the two gate qubits")));
            }
            let ab: Vec<usize> = (0..*ab).collect();
            let (num, den) = chi_exhaustive(&enumerate_clifford_group(2)?, &ab)?;
            // two-design value (2^|AB| − 1)/(2^2 + 1)
            let (hn, hd) = ((1i128 << ab.len()) - 1, 5i128);
            let exact_ok = num * hd == hn * den;
            let t = CircuitTemplate::new(2, None, vec![GateSupport { layer: 1, qubits: vec![0, 1] }], 1)?;
            let mc = chi_estimate(&Ensemble::uniform(t), &ab, *trials, seed)?;
            let exact = num as f64 / den as f64;
            let mc_ok = (mc.chi - exact).abs() <= 3.0 * mc.stderr;
            checks.push(Check::new("chi-exhaustive", exact_ok, format!("{num}/{den}, expected {hn}/{hd}")));
            checks.push(Check::new("chi-monte-carlo", mc_ok, format!("{:.5} ± {:.5} vs {exact:.5}", mc.chi, mc.stderr)));
            to_csv(&[
                CheckRow::new("chi", "exhaustive", exact, 0.0, hn as f64 / hd as f64, 11520, exact_ok),
                CheckRow::new("chi", "monte-carlo", mc.chi, mc.stderr, exact, *trials, mc_ok),
            ])
        }
        Experiment::ChiDepth { rows, cols, depths, a, trials } => {
            let a = match a {
                Some(a) => *a,
                None => GridGeometry::new(*rows, *cols)?.center(),
            };
            let res = chi_depth_lower_bound_check(*rows, *cols, depths, a, *trials, seed)?;
            let out: Vec<ChiDepthCsvRow> = res
                .iter()
                .map(|r| {
                    checks.push(Check::new(
                        format!("chi-depth d={}", r.depth),
                        r.pass,
                        format!("{:.5} ± {:.5} vs bound {:.5}", r.estimate.mean, r.estimate.stderr, r.bound),
                    ));
                    ChiDepthCsvRow { depth: r.depth, estimate: r.estimate.mean, stderr: r.estimate.stderr, bound: r.bound, trials: *trials, pass: r.pass }
                })
                .collect();
            to_csv(&out)
        }
        Experiment::ClusterStats { m, cells, expect_size, expect_perimeter } => {
            let s = stats_of(&Cluster::from_cells(*m, cells)?);
            let mut rows = Vec::new();
            for (what, got, want) in [("size", s.size, expect_size), ("perimeter", s.perimeter, expect_perimeter)] {
                let ok = want.is_none_or(|w| w == got);
                if let Some(w) = want {
                    checks.push(Check::new(format!("cluster-{what}"), ok, format!("{got}, expected {w}")));
                }
                rows.push(CheckRow::new("cluster-stats", what, got as f64, 0.0, want.map_or(f64::NAN, |w| w as f64), 1, ok));
            }
            to_csv(&rows)
        }
        Experiment::BlockPaulis { ts, trials } => {
            let mut rows = Vec::new();
            let mut exhaustive = None;
            for &t in ts {
                let r = appendix_b_lemma_checks(t, *trials, seed)?;
                exhaustive = Some(r.exhaustive_t2);
                for row in &r.rows {
                    let case = format!("t={} k={} {}", row.t, row.k, row.conditioning.name());
                    rows.push(CheckRow::new(&format!("part-{}", row.part), case, row.estimate.mean, row.estimate.stderr, row.bound, *trials, row.pass));
                }
                let failed = r.rows.iter().filter(|x| !x.pass).count();
                checks.push(Check::new(format!("block-paulis t={t}"), failed == 0, format!("{failed} of {} rows above bound + 3σ", r.rows.len())));
            }
            if let Some((num, den)) = exhaustive {
                let ok = 4 * num <= den;
                checks.push(Check::new("block-paulis t=2 exhaustive", ok, format!("{num}/{den} vs 1/4")));
                rows.push(CheckRow::new("part-a", "t=2 exhaustive", num as f64 / den as f64, 0.0, 0.25, 0, ok));
            }
            to_csv(&rows)
        }
        Experiment::SingleCell { m, tau, trials } => {
            let mut rows = Vec::new();
            let mut failed = 0;
            let mut informative = 0;
            for (i, p) in single_cell_patterns(*m, *tau, seed).iter().enumerate() {
                let r = ztype_probability_mc(p, *m, *tau, *trials, mix(seed, "single-cell/mc", i as u64))?;
                failed += usize::from(!r.pass);
                informative += usize::from(r.bound < 1.0);
                let case = format!("pattern {i} size={} perimeter={}", r.stats.size, r.stats.perimeter);
                rows.push(CheckRow::new("single-cell", case, r.estimate.mean, r.estimate.stderr, r.bound, *trials, r.pass));
            }
            checks.push(Check::new(
                "single-cell",
                failed == 0,
                format!("{failed} of {} patterns above bound + 3σ; {informative} with bound < 1", rows.len()),
            ));
            to_csv(&rows)
        }
        Experiment::SBound { m, tau, l, trials, policy, min_c, max_nonempty } => {
            let grid = GridGeometry::square(m * tau)?;
            let part = square_tripartition(grid, grid.center(), *l)?;
            let r = expected_s_bound_mc(*m, *tau, &part, *policy, *trials, seed)?;
            let mut ok = r.pass;
            let mut detail = format!(
                "S nonempty in {} of {} trials (allowance {}); E|S| = {:.3e}; bound {:.3e}; |C| = {}{}",
                r.nonempty_trials,
                r.trials,
                r.allowance,
                r.expected_s.mean,
                r.bound,
                r.c_size,
                if r.informational { "; informational only" } else { "" }
            );
            if r.c_size < *min_c {
                ok = false;
                detail.push_str(&format!("; |C| below {min_c}"));
            }
            if let Some(k) = max_nonempty {
                if r.nonempty_trials > *k {
                    ok = false;
                    detail.push_str(&format!("; more than {k} nonempty"));
                }
            }
            checks.push(Check::new("s-bound", ok, detail));
            let mut rows = vec![
                CheckRow::new("s-bound", "nonempty trials", r.nonempty_trials as f64, 0.0, r.allowance as f64, r.trials, r.pass),
                CheckRow::new("s-bound", "E|S|", r.expected_s.mean, r.expected_s.stderr, r.bound, r.trials, r.pass),
            ];
            for b in &r.perimeters {
                rows.push(CheckRow::new("s-perimeter", format!("l={}", b.perimeter), b.count as f64, 0.0, b.perimeter_bound, r.trials, true));
            }
            to_csv(&rows)
        }
        Experiment::GhzFrequency { m, tau, trials, threshold, policy } => {
            let ens = Ensemble::new(coarse_grained_template(*m, *tau)?, *policy);
            let f = ghz_scan(&ens, *trials, seed)?;
            let ok = f.mean >= threshold - 3.0 * f.stderr;
            checks.push(Check::new("ghz-frequency", ok, format!("{:.5} ± {:.5} vs threshold {threshold}", f.mean, f.stderr)));
            to_csv(&[CheckRow::new("ghz-frequency", format!("m={m} tau={tau}"), f.mean, f.stderr, *threshold, *trials, ok)])
        }
        Experiment::GraphTriples { graphs, min_vertices, max_vertices } => {
            let r = graph_triple_check(*graphs, *min_vertices..=*max_vertices, seed)?;
            let ok = r.failures == 0;
            checks.push(Check::new("graph-triples", ok, format!("{} failures over {} outcome strings on {} graphs", r.failures, r.outcomes, r.graphs)));
            to_csv(&[CheckRow::new("graph-triples", "failures", r.failures as f64, 0.0, 0.0, r.outcomes, ok)])
        }
        Experiment::GbgExactness { circuits, max_qubits, layers } => {
            let r = exactness_suite(*circuits, *max_qubits, *layers, seed)?;
            checks.push(suite_check(&r));
            to_csv(&suite_rows(&r))
        }
        Experiment::GbgIdentity { circuits, max_qubits, layers } => {
            let r = identity_suite(*circuits, *max_qubits, *layers, seed)?;
            checks.push(suite_check(&r));
            to_csv(&suite_rows(&r))
        }
        Experiment::GbgTvd { circuits, max_qubits, layers, shields, samples } => {
            let r = tvd_suite(*circuits, *max_qubits, *layers, shields, *samples, seed)?;
            checks.push(suite_check(&r));
            to_csv(&suite_rows(&r))
        }
        Experiment::GbgSchedule { rows, cols, layers, shields } => {
            let r = schedule_suite(GridGeometry::new(*rows, *cols)?, *layers, shields, seed)?;
            checks.push(suite_check(&r));
            to_csv(&suite_rows(&r))
        }
        Experiment::Advantage { rotations } => {
            let r = advantage_report(*rotations, seed)?;
            for s in &r.summaries {
                checks.push(Check::new(
                    format!("advantage {}", s.state),
                    s.witness && s.min_failures >= 1,
                    format!("minimum failures {}/27 (function {}); witness {}", s.min_failures, s.argmin_id, if s.witness { "verified" } else { "missing" }),
                ));
            }
            let rows: Vec<AdvantageCsvRow> = r
                .rows
                .iter()
                .map(|x| AdvantageCsvRow { state: x.state.clone(), function_id: x.function_id, failures: x.failures, rate: x.rate() })
                .collect();
            to_csv(&rows)
        }
        Experiment::EngineCheck { circuits } => {
            let r = engine_equivalence_check(*circuits, seed)?;
            checks.push(Check::new(
                "engine-equivalence",
                r.pass,
                format!("max TVD {:.3e}, max purity difference {:.3e} over {} circuits", r.max_tvd, r.max_purity_diff, r.circuits),
            ));
            to_csv(&[
                CheckRow::new("engine", "max tvd", r.max_tvd, 0.0, 1e-9, r.circuits, r.max_tvd < 1e-9),
                CheckRow::new("engine", "max purity diff", r.max_purity_diff, 0.0, 1e-9, r.circuits, r.max_purity_diff < 1e-9),
            ])
        }
    }
    .map_err(csv_err)?;
    Ok(RunOutput { csv, checks })
}
