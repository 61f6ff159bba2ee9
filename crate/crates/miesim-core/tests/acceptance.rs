//! Acceptance run: every criterion at its stated size and tolerance, one
//! PASS/FAIL line each. Parameters and seeds match the files in `configs/`.
//!
//! `cargo test --release -p miesim-core --test acceptance`; pass criterion
//! numbers as arguments to run a subset, e.g. `-- 4 6 13`.

use std::process::ExitCode;
use std::time::Instant;

use miesim_core::advantage::advantage_report;
use miesim_core::arch::{
    coarse_grained_template, Architecture, CircuitTemplate, Ensemble, GateSupport, GridGeometry,
    SamplerPolicy, DEFAULT_BRICK_ORDER,
};
use miesim_core::cluster::{
    appendix_b_lemma_checks, exhaustive_t2_part_a, expected_s_bound_mc, single_cell_patterns,
    stats_of, ztype_probability_mc, Cluster,
};
use miesim_core::dense::engine_equivalence_check;
use miesim_core::gbg::{exactness_suite, identity_suite, schedule_suite, tvd_suite, SuiteReport};
use miesim_core::ghz::{ghz_scan, graph_triple_check};
use miesim_core::mie::{
    boundary_tripartition, chi_depth_lower_bound_check, chi_estimate, chi_exhaustive, mie_scan,
    purity_exactness_check, scan_shape_check, square_tripartition, theorem3_bound_check,
    ScanGeometry, ScanShapeCriteria, Tripartition,
};
use miesim_core::sampling::enumerate_clifford_group;
use miesim_core::seed::mix;
use miesim_core::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn boundary(arch: Architecture) -> Result<(Ensemble, Tripartition)> {
    let t = arch.template()?;
    let part = boundary_tripartition(t.grid().expect("grid architectures"))?;
    Ok((Ensemble::uniform(t), part))
}

fn c1_scan() -> Result<Outcome> {
    let grids: Vec<usize> = (9..=25).step_by(2).collect();
    let depths: Vec<usize> = (1..=8).collect();
    let rows = mie_scan(
        &grids,
        &depths,
        &[ScanGeometry::Boundary],
        DEFAULT_BRICK_ORDER,
        1040,
        1040,
    )?;
    let v = scan_shape_check(&rows, &ScanShapeCriteria::default());
    let last: Vec<String> = depths
        .iter()
        .map(|&d| {
            let r = rows
                .iter()
                .filter(|r| r.depth == d)
                .max_by_key(|r| r.grid)
                .unwrap();
            format!("d{d}={:.4}", r.mean_purity)
        })
        .collect();
    let detail = format!(
        "purity at grid 25: {}{}",
        last.join(" "),
        if v.pass() {
            String::new()
        } else {
            format!("; {}", v.failures.join("; "))
        }
    );
    outcome(v.pass(), detail)
}

fn c2_exactness() -> Result<Outcome> {
    let ensembles = [
        Architecture::brickwork(15, 15, 3),
        Architecture::brickwork(19, 19, 6),
        Architecture::CoarseGrained { m: 2, tau: 8 },
        Architecture::Compiled {
            m: 2,
            tau: 4,
            snake_depth: miesim_core::arch::default_snake_depth(4),
        },
    ];
    let (mut exceptions, mut measurements, mut nonempty) = (0, 0, 0);
    for (i, arch) in ensembles.iter().enumerate() {
        let share = 1000 / ensembles.len() + usize::from(i < 1000 % ensembles.len());
        let (ens, part) = boundary(*arch)?;
        assert!(ens.n() <= 400);
        let r = purity_exactness_check(
            &ens,
            &part,
            share,
            5,
            mix(2, "exactness/ensemble", i as u64),
        )?;
        exceptions += r.exceptions;
        measurements += r.measurements;
        nonempty += r.nonempty_s;
    }
    outcome(exceptions == 0, format!("{exceptions} exceptions in {measurements} measurements; S nonempty in {nonempty} of 1000"))
}

fn c3_bound() -> Result<Outcome> {
    let ensembles = [
        Architecture::CoarseGrained { m: 2, tau: 4 },
        Architecture::CoarseGrained { m: 2, tau: 8 },
        Architecture::brickwork(9, 9, 2),
        Architecture::brickwork(9, 9, 4),
        Architecture::brickwork(9, 9, 6),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for arch in ensembles {
        let (ens, part) = boundary(arch)?;
        let r = theorem3_bound_check(&ens, &part, 10_000, 3)?;
        pass &= r.pass;
        parts.push(format!(
            "{} {}: {:.4} vs {:.4}",
            arch.name(),
            arch.params(),
            r.lhs.mean,
            r.rhs
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c4_chi() -> Result<Outcome> {
    let (num, den) = chi_exhaustive(&enumerate_clifford_group(2)?, &[0])?;
    let t = CircuitTemplate::new(
        2,
        None,
        vec![GateSupport {
            layer: 1,
            qubits: vec![0, 1],
        }],
        1,
    )?;
    let mc = chi_estimate(&Ensemble::uniform(t), &[0], 100_000, 4)?;
    let mc_ok = (mc.chi - 0.2).abs() <= 3.0 * mc.stderr;
    outcome(
        (num, den) == (1, 5) && mc_ok,
        format!(
            "exhaustive {num}/{den}; Monte Carlo {:.5} ± {:.5}",
            mc.chi, mc.stderr
        ),
    )
}

fn c5_chi_depth() -> Result<Outcome> {
    let a = GridGeometry::new(6, 6)?.center();
    let rows = chi_depth_lower_bound_check(6, 6, &[1, 2, 3], a, 100_000, 5)?;
    let detail: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "d{}: {:.4} ± {:.4} ≥ {:.4}",
                r.depth, r.estimate.mean, r.estimate.stderr, r.bound
            )
        })
        .collect();
    outcome(rows.iter().all(|r| r.pass), detail.join("; "))
}

fn c6_cluster() -> Result<Outcome> {
    let cells = [
        (0, 0),
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 0),
        (1, 2),
        (1, 4),
        (2, 3),
        (2, 4),
        (3, 1),
        (3, 4),
    ];
    let s = stats_of(&Cluster::from_cells(5, &cells)?);
    outcome(
        s.size == 11 && s.perimeter == 19,
        format!("size {}, perimeter {}", s.size, s.perimeter),
    )
}

fn c7_cluster_bounds() -> Result<Outcome> {
    let (num, den) = exhaustive_t2_part_a()?;
    let a_ok = 4 * num <= den;
    let r = appendix_b_lemma_checks(4, 1_000_000, 7)?;
    let part_a: Vec<_> = r.rows.iter().filter(|x| x.part == "a").collect();
    let b_ok = part_a.iter().all(|x| x.pass);
    let worst_a = part_a.iter().map(|x| x.estimate.mean).fold(0.0, f64::max);
    let mut c_ok = true;
    let mut informative = 0;
    for (i, p) in single_cell_patterns(2, 2, 77).iter().enumerate() {
        let e = ztype_probability_mc(p, 2, 2, 100_000, mix(77, "single-cell/mc", i as u64))?;
        c_ok &= e.pass;
        informative += usize::from(e.bound < 1.0);
    }
    outcome(
        a_ok && b_ok && c_ok,
        format!(
            "(a) t=2 exhaustive {num}/{den} ≤ 1/4: {a_ok}; (b) t=4 max estimate {worst_a:.5} vs 1/16: {b_ok}; (c) single-cell, {informative} informative patterns: {c_ok}"
        ),
    )
}

fn c8_s_bound() -> Result<Outcome> {
    let grid = GridGeometry::square(64)?;
    let part = square_tripartition(grid, grid.center(), 61)?;
    let r = expected_s_bound_mc(2, 32, &part, SamplerPolicy::Uniform, 200, 8)?;
    outcome(
        r.c_size >= 100 && r.nonempty_trials <= 3,
        format!(
            "|C| = {}; S nonempty in {} of {} trials; E|S| = {:.3e}",
            r.c_size, r.nonempty_trials, r.trials, r.expected_s.mean
        ),
    )
}

fn c9_ghz() -> Result<Outcome> {
    let f = ghz_scan(&Ensemble::uniform(coarse_grained_template(2, 32)?), 2000, 9)?;
    outcome(
        f.mean >= 0.005 - 3.0 * f.stderr,
        format!("frequency {:.5} ± {:.5}", f.mean, f.stderr),
    )
}

fn c10_graphs() -> Result<Outcome> {
    let r = graph_triple_check(100, 3..=8, 10)?;
    outcome(
        r.failures == 0,
        format!(
            "{} failures over {} outcome strings",
            r.failures, r.outcomes
        ),
    )
}

fn c11_gbg() -> Result<Outcome> {
    let reports: Vec<SuiteReport> = vec![
        exactness_suite(20, 8, 4, 111)?,
        identity_suite(20, 8, 4, 112)?,
        tvd_suite(10, 12, 3, &[1, 3], 20_000, 113)?,
        schedule_suite(GridGeometry::square(12)?, 6, &[1, 3, 5], 114)?,
    ];
    let detail: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "({}) {}/{} pass",
                r.name,
                r.cases.len() - r.failures(),
                r.cases.len()
            )
        })
        .collect();
    outcome(reports.iter().all(|r| r.pass()), detail.join("; "))
}

fn c12_advantage() -> Result<Outcome> {
    let r = advantage_report(20, 12)?;
    outcome(
        r.pass(),
        format!(
            "{} states; minimum failure rate {}/27",
            r.summaries.len(),
            r.min_failures()
        ),
    )
}

fn c13_engines() -> Result<Outcome> {
    let r = engine_equivalence_check(500, 13)?;
    outcome(
        r.pass,
        format!(
            "max TVD {:.2e}; max purity difference {:.2e}",
            r.max_tvd, r.max_purity_diff
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 13] = [
    (1, "purity scan shape", c1_scan),
    (2, "purity exactness", c2_exactness),
    (3, "purity bound", c3_bound),
    (4, "chi two-design value", c4_chi),
    (5, "chi depth lower bound", c5_chi_depth),
    (6, "cluster geometry", c6_cluster),
    (7, "cluster bounds", c7_cluster_bounds),
    (8, "expected |S|", c8_s_bound),
    (9, "GHZ frequency", c9_ghz),
    (10, "graph-state triples", c10_graphs),
    (11, "gate-by-gate sampler", c11_gbg),
    (12, "local-function failure rate", c12_advantage),
    (13, "engine equivalence", c13_engines),
];

fn main() -> ExitCode {
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, f) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {id} ({name}) [{:.1}s]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
