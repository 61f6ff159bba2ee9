use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use miesim::{parse_config, plot_csv, run, PlotKind, RunManifest};

/// Exit statuses: all checks passed, a check failed, bad usage or input.
const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "miesim",
    version,
    about = "Run MIE experiments, plot their results and validate circuit files"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Render a result CSV as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long, value_parser = PlotKind::NAMES)]
        kind: String,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Parse a circuit file and report what it contains.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Gate-by-gate if the file has `U1` records, else Clifford.
    Auto,
    Clifford,
    Gbg,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("miesim: {msg}");
    ExitCode::from(USAGE)
}

fn read(path: &Path) -> Result<Vec<u8>, ExitCode> {
    std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), ExitCode> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Size the global pool from `MIESIM_THREADS`; results do not depend on it.
fn init_threads() -> Result<usize, ExitCode> {
    if let Ok(v) = std::env::var("MIESIM_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            usage(format!(
                "MIESIM_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(usage)?;
    }
    Ok(rayon::current_num_threads())
}

fn cmd_run(path: &Path) -> Result<u8, ExitCode> {
    let text = read(path)?;
    let text =
        String::from_utf8(text).map_err(|_| usage(format!("{}: not UTF-8", path.display())))?;
    let cfg = parse_config(&text).map_err(|e| usage(format!("{}:{e}", path.display())))?;
    let threads = init_threads()?;
    let t0 = Instant::now();
    let out = run(&cfg).map_err(|e| usage(format!("{}: {e}", cfg.name)))?;
    let manifest = RunManifest::new(&cfg, out.checks, t0.elapsed().as_secs_f64(), threads);
    write(&cfg.csv, &out.csv)?;
    write(&cfg.manifest, manifest.to_json().as_bytes())?;
    for c in &manifest.checks {
        println!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!("wrote {} and {}", cfg.csv.display(), cfg.manifest.display());
    Ok(if manifest.pass { PASS } else { FAIL })
}

fn cmd_plot(csv: &Path, kind: &str, output: &Path) -> Result<u8, ExitCode> {
    let kind = PlotKind::parse(kind).expect("clap restricts the kind");
    let svg = plot_csv(&read(csv)?, kind).map_err(|e| usage(format!("{}: {e}", csv.display())))?;
    write(output, svg.as_bytes())?;
    Ok(PASS)
}

fn cmd_validate(path: &Path, format: Format) -> Result<u8, ExitCode> {
    let text = String::from_utf8(read(path)?)
        .map_err(|_| usage(format!("{}: not UTF-8", path.display())))?;
    let gbg = match format {
        Format::Gbg => true,
        Format::Clifford => false,
        Format::Auto => text.lines().any(|l| l.trim_start().starts_with("U1")),
    };
    let res = if gbg {
        miesim_core::gbg::text::parse(&text).map(|c| {
            format!(
                "gate-by-gate circuit: {} qubits, {} gates, {} single-qubit",
                c.n(),
                c.gates().len(),
                c.gamma().len()
            )
        })
    } else {
        miesim_core::arch::text::parse(&text).map(|c| {
            let t = c.template();
            format!(
                "Clifford circuit: {} qubits, {} gates, depth {}",
                c.n(),
                t.gates().len(),
                t.depth()
            )
        })
    };
    match res {
        Ok(summary) => {
            println!("{}: {summary}", path.display());
            Ok(PASS)
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            Ok(FAIL)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { PASS });
        }
    };
    let res = match &cli.cmd {
        Cmd::Run { config } => cmd_run(config),
        Cmd::Plot { csv, kind, output } => cmd_plot(csv, kind, output),
        Cmd::Validate { file, format } => cmd_validate(file, *format),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(code) => code,
    }
}
