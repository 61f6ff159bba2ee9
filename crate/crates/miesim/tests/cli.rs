use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use miesim::config::{parse, Experiment};
use miesim::plot::{plot_csv, PlotKind};
use miesim::run;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("miesim-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn miesim(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_miesim"));
    c.args(args);
    match threads {
        Some(t) => c.env("MIESIM_THREADS", t),
        None => c.env_remove("MIESIM_THREADS"),
    };
    c.output().unwrap()
}

fn small_scan(csv: &Path) -> String {
    format!(
        "[experiment]\nname = small\nkind = mie-scan\ncheck = shape\nseed = 3\n\n[params]\ngrids = 5, 7\ndepths = 1..8\ntrials = 12\n\n[output]\ncsv = {}\n",
        csv.display()
    )
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "conf") {
            let text = std::fs::read_to_string(&p).unwrap();
            parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 13, "only {n} configs shipped");
}

#[test]
fn scan_has_one_row_per_depth_and_grid() {
    let cfg = parse(&small_scan(Path::new("unused.csv"))).unwrap();
    let out = run(&cfg).unwrap();
    let text = String::from_utf8(out.csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 * 2);
    assert!(text.starts_with("arch,depth,l,grid,trials,mean_purity,stderr,seed\n"));
    assert_eq!(out.checks.len(), 1);
    let Experiment::PurityScan { trials, .. } = cfg.experiment else {
        panic!()
    };
    assert_eq!(trials, 12);
}

#[test]
fn run_is_byte_identical_across_repeats_and_thread_counts() {
    let d = scratch("determinism");
    let mut csvs = Vec::new();
    for (i, threads) in [Some("1"), Some("1"), Some("3"), None]
        .into_iter()
        .enumerate()
    {
        let csv = d.join(format!("scan{i}.csv"));
        let conf = d.join(format!("scan{i}.conf"));
        std::fs::write(&conf, small_scan(&csv)).unwrap();
        let out = miesim(&["run", conf.to_str().unwrap()], threads);
        assert!(
            matches!(out.status.code(), Some(0 | 1)),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        csvs.push(std::fs::read(&csv).unwrap());
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(csv.with_extension("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["seed"], 3);
        assert_eq!(manifest["config"]["params"]["trials"], "12");
        assert!(manifest["wall_time_secs"].as_f64().unwrap() >= 0.0);
        assert_eq!(manifest["code_version"], env!("CARGO_PKG_VERSION"));
        if let Some(t) = threads {
            assert_eq!(manifest["threads"].to_string(), t);
        }
    }
    assert!(csvs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn exit_codes() {
    let d = scratch("exit");
    // failed check
    let conf = d.join("bad-expect.conf");
    let csv = d.join("stats.csv");
    std::fs::write(
        &conf,
        format!(
            "[experiment]\nname = s\nkind = cluster-checks\ncheck = stats\nseed = 1\n[params]\nm = 2\ncells = 0:0, 1:1\nexpect_size = 3\n[output]\ncsv = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let out = miesim(&["run", conf.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL cluster-size"));
    // passing check
    std::fs::write(
        &conf,
        std::fs::read_to_string(&conf)
            .unwrap()
            .replace("expect_size = 3", "expect_size = 2"),
    )
    .unwrap();
    assert_eq!(
        miesim(&["run", conf.to_str().unwrap()], None).status.code(),
        Some(0)
    );
    // unknown key: usage error naming the key and its position
    std::fs::write(
        &conf,
        std::fs::read_to_string(&conf)
            .unwrap()
            .replace("m = 2\n", "m = 2\nmm = 3\n"),
    )
    .unwrap();
    let out = miesim(&["run", conf.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":8:1:") && err.contains("`mm`"), "{err}");
    // bad thread count, missing file, bad subcommand
    assert_eq!(
        miesim(&["run", conf.to_str().unwrap()], Some("zero"))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        miesim(&["run", "/nonexistent/x.conf"], None).status.code(),
        Some(2)
    );
    assert_eq!(miesim(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(
        miesim(&["plot", "x.csv", "--kind", "pie", "-o", "x.svg"], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn plot_command() {
    let d = scratch("plot");
    let csv = d.join("scan.csv");
    let conf = d.join("scan.conf");
    std::fs::write(&conf, small_scan(&csv)).unwrap();
    miesim(&["run", conf.to_str().unwrap()], None);
    let svg = d.join("scan.svg");
    let out = miesim(
        &[
            "plot",
            csv.to_str().unwrap(),
            "--kind",
            "mie-scan",
            "-o",
            svg.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches(r#"class="series""#).count(), 8);
    // schema mismatch and empty input
    let empty = d.join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        miesim(
            &[
                "plot",
                empty.to_str().unwrap(),
                "--kind",
                "mie-scan",
                "-o",
                svg.to_str().unwrap()
            ],
            None
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        miesim(
            &[
                "plot",
                csv.to_str().unwrap(),
                "--kind",
                "chi-depth",
                "-o",
                svg.to_str().unwrap()
            ],
            None
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn chi_depth_csv_plots() {
    let cfg = parse("[experiment]\nname = c\nkind = chi\ncheck = depth\nseed = 1\n[params]\nrows = 3\ncols = 3\ndepths = 1..2\ntrials = 50\n[output]\ncsv = c.csv\n").unwrap();
    let out = run(&cfg).unwrap();
    let svg = plot_csv(&out.csv, PlotKind::ChiDepth).unwrap();
    assert!(svg.contains("lower bound"));
}

#[test]
fn validate_command() {
    let d = scratch("validate");
    let good = d.join("c.txt");
    std::fs::write(&good, "QUBITS 4 GRID 2 2\nGATE 1 0 1 | c2086\n").unwrap();
    let out = miesim(&["validate", good.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("4 qubits"));
    assert_eq!(
        miesim(
            &["validate", "--format", "gbg", good.to_str().unwrap()],
            None
        )
        .status
        .code(),
        Some(0)
    );
    let bad = d.join("bad.txt");
    std::fs::write(&bad, "QUBITS 4 GRID 2 2\nGATE 1 0 9 | c2086\n").unwrap();
    let out = miesim(&["validate", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let u1 = d.join("u1.txt");
    std::fs::write(
        &u1,
        format!(
            "QUBITS 2 GRID 1 2\nU1 0 | {}\n",
            "0000000000000000 ".repeat(8)
        ),
    )
    .unwrap();
    assert_eq!(
        miesim(&["validate", u1.to_str().unwrap()], None)
            .status
            .code(),
        Some(1)
    );
}
