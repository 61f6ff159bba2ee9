//! Experiment configuration: flat `key = value` lines grouped in `[section]`s.
//!
//! ```text
//! # purity scan over grid sizes
//! [experiment]
//! name = purity-scan
//! kind = mie-scan
//! check = shape
//! seed = 1
//!
//! [params]
//! grids = 9..25:2
//! depths = 1..8
//! trials = 1040
//!
//! [output]
//! csv = out/purity-scan.csv
//! ```
//!
//! `#` starts a comment. Integer lists are comma separated and may contain
//! inclusive ranges `a..b` or stepped ranges `a..b:s`. Every key is checked
//! against the chosen kind and check; unknown keys are errors.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;

use miesim_core::arch::{Architecture, BrickColor, SamplerPolicy, DEFAULT_BRICK_ORDER};
use miesim_core::mie::ScanShapeCriteria;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        column,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub key_col: usize,
    pub value_col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

/// Syntax-level parse: sections and entries with positions, no schema.
pub fn parse_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.chars().take_while(|c| c.is_whitespace()).count();
        let col0 = indent + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(
                    ln,
                    col0 + trimmed.chars().count(),
                    "expected ']' to close the section name",
                );
            };
            let name = name.trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return err(ln, col0 + 1, format!("bad section name {name:?}"));
            }
            if let Some(prev) = sections.iter().find(|s| s.name == name) {
                return err(
                    ln,
                    col0,
                    format!("section [{name}] already opened on line {}", prev.line),
                );
            }
            sections.push(Section {
                name: name.to_string(),
                line: ln,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return err(ln, col0, "expected `key = value` or `[section]`");
        };
        let key = trimmed[..eq].trim_end();
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return err(ln, col0, format!("bad key {key:?}"));
        }
        let after = &trimmed[eq + 1..];
        let value = after.trim();
        let value_col = col0
            + trimmed[..eq + 1].chars().count()
            + (after.chars().count() - after.trim_start().chars().count());
        if value.is_empty() {
            return err(ln, value_col, format!("key `{key}` has no value"));
        }
        let Some(sec) = sections.last_mut() else {
            return err(ln, col0, format!("key `{key}` outside any section"));
        };
        if let Some(prev) = sec.entries.iter().find(|e| e.key == key) {
            return err(
                ln,
                col0,
                format!("key `{key}` already set on line {}", prev.line),
            );
        }
        sec.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line: ln,
            key_col: col0,
            value_col,
        });
    }
    Ok(sections)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    MieScan,
    GhzScan,
    Chi,
    ClusterChecks,
    Gbg,
    Advantage,
    EngineCheck,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::MieScan,
        Kind::GhzScan,
        Kind::Chi,
        Kind::ClusterChecks,
        Kind::Gbg,
        Kind::Advantage,
        Kind::EngineCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::MieScan => "mie-scan",
            Kind::GhzScan => "ghz-scan",
            Kind::Chi => "chi",
            Kind::ClusterChecks => "cluster-checks",
            Kind::Gbg => "gbg",
            Kind::Advantage => "advantage",
            Kind::EngineCheck => "engine-check",
        }
    }

    /// Accepted `check` values; the first is the default.
    pub fn checks(self) -> &'static [&'static str] {
        match self {
            Kind::MieScan => &["scan", "shape", "exactness", "bound"],
            Kind::GhzScan => &["frequency", "graph-triples"],
            Kind::Chi => &["exhaustive", "depth"],
            Kind::ClusterChecks => &["stats", "block-paulis", "single-cell", "s-bound"],
            Kind::Gbg => &["exactness", "identity", "tvd", "schedule"],
            Kind::Advantage => &["minimum-failure"],
            Kind::EngineCheck => &["equivalence"],
        }
    }
}

/// Tripartition used by the purity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shield {
    /// `C` = boundary ring.
    Boundary,
    /// Odd-side square around the center.
    Square(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    PurityScan {
        grids: Vec<usize>,
        depths: Vec<usize>,
        shields: Vec<Shield>,
        order: [BrickColor; 4],
        trials: usize,
        /// Present for `check = shape`.
        shape: Option<ScanShapeCriteria>,
    },
    PurityExactness {
        ensembles: Vec<Architecture>,
        shield: Shield,
        instances: usize,
        repetitions: usize,
    },
    PurityBound {
        ensembles: Vec<Architecture>,
        shield: Shield,
        trials: usize,
    },
    ChiExhaustive {
        ab: usize,
        trials: usize,
    },
    ChiDepth {
        rows: usize,
        cols: usize,
        depths: Vec<usize>,
        a: Option<usize>,
        trials: usize,
    },
    ClusterStats {
        m: usize,
        cells: Vec<(usize, usize)>,
        expect_size: Option<usize>,
        expect_perimeter: Option<usize>,
    },
    BlockPaulis {
        ts: Vec<usize>,
        trials: usize,
    },
    SingleCell {
        m: usize,
        tau: usize,
        trials: usize,
    },
    SBound {
        m: usize,
        tau: usize,
        l: usize,
        trials: usize,
        policy: SamplerPolicy,
        min_c: usize,
        max_nonempty: Option<usize>,
    },
    GhzFrequency {
        m: usize,
        tau: usize,
        trials: usize,
        threshold: f64,
        policy: SamplerPolicy,
    },
    GraphTriples {
        graphs: usize,
        min_vertices: usize,
        max_vertices: usize,
    },
    GbgExactness {
        circuits: usize,
        max_qubits: usize,
        layers: usize,
    },
    GbgIdentity {
        circuits: usize,
        max_qubits: usize,
        layers: usize,
    },
    GbgTvd {
        circuits: usize,
        max_qubits: usize,
        layers: usize,
        shields: Vec<usize>,
        samples: usize,
    },
    GbgSchedule {
        rows: usize,
        cols: usize,
        layers: usize,
        shields: Vec<usize>,
    },
    Advantage {
        rotations: usize,
    },
    EngineCheck {
        circuits: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: Kind,
    pub check: String,
    pub seed: u64,
    pub experiment: Experiment,
    pub csv: PathBuf,
    pub manifest: PathBuf,
    /// Every section and entry, for the manifest.
    pub echo: BTreeMap<String, BTreeMap<String, String>>,
}

/// Typed access to one section that remembers which keys were read.
struct Keys<'a> {
    section: &'a str,
    line: usize,
    entries: &'a [Entry],
    used: HashSet<&'a str>,
}

impl<'a> Keys<'a> {
    fn new(sections: &'a [Section], name: &'a str) -> Self {
        match sections.iter().find(|s| s.name == name) {
            Some(s) => Keys {
                section: name,
                line: s.line,
                entries: &s.entries,
                used: HashSet::new(),
            },
            None => Keys {
                section: name,
                line: 1,
                entries: &[],
                used: HashSet::new(),
            },
        }
    }

    fn entry(&mut self, key: &'a str) -> Option<&'a Entry> {
        self.used.insert(key);
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&mut self, key: &'a str) -> Result<&'a Entry, ConfigError> {
        let (section, line) = (self.section, self.line);
        self.entry(key).map_or_else(
            || err(line, 1, format!("missing key `{key}` in [{section}]")),
            Ok,
        )
    }

    fn get<T>(
        &mut self,
        key: &'a str,
        parse: impl Fn(&Entry) -> Result<T, ConfigError>,
    ) -> Result<Option<T>, ConfigError> {
        self.entry(key).map(parse).transpose()
    }

    fn req<T>(
        &mut self,
        key: &'a str,
        parse: impl Fn(&Entry) -> Result<T, ConfigError>,
    ) -> Result<T, ConfigError> {
        parse(self.require(key)?)
    }

    fn finish(&self, context: &str) -> Result<(), ConfigError> {
        match self
            .entries
            .iter()
            .find(|e| !self.used.contains(e.key.as_str()))
        {
            Some(e) => err(
                e.line,
                e.key_col,
                format!("unknown key `{}` in [{}] {context}", e.key, self.section),
            ),
            None => Ok(()),
        }
    }
}

fn int(e: &Entry) -> Result<usize, ConfigError> {
    e.value.parse().or_else(|_| {
        err(
            e.line,
            e.value_col,
            format!(
                "`{}` must be a non-negative integer, got {:?}",
                e.key, e.value
            ),
        )
    })
}

fn positive(e: &Entry) -> Result<usize, ConfigError> {
    match int(e)? {
        0 => err(e.line, e.value_col, format!("`{}` must be positive", e.key)),
        v => Ok(v),
    }
}

fn odd(e: &Entry) -> Result<usize, ConfigError> {
    match positive(e)? {
        v if v % 2 == 1 => Ok(v),
        v => err(
            e.line,
            e.value_col,
            format!("`{}` must be odd, got {v}", e.key),
        ),
    }
}

fn float(e: &Entry) -> Result<f64, ConfigError> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(
            e.line,
            e.value_col,
            format!("`{}` must be a finite number, got {:?}", e.key, e.value),
        ),
    }
}

/// Comma-separated items, each with the column it starts at.
fn items(e: &Entry) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut off = 0;
    for part in e.value.split(',') {
        let lead = part.chars().count() - part.trim_start().chars().count();
        out.push((e.value_col + off + lead, part.trim()));
        off += part.chars().count() + 1;
    }
    out
}

fn int_list(e: &Entry) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for (col, item) in items(e) {
        let bad = || {
            err(
                e.line,
                col,
                format!(
                    "bad item {item:?} in `{}`: expected n, a..b or a..b:step",
                    e.key
                ),
            )
        };
        let num = |s: &str| s.trim().parse::<usize>().ok();
        if let Some((a, rest)) = item.split_once("..") {
            let (b, step) = match rest.split_once(':') {
                Some((b, s)) => (b, num(s)),
                None => (rest, Some(1)),
            };
            let (Some(a), Some(b), Some(step)) = (num(a), num(b), step) else {
                return bad();
            };
            if step == 0 || a > b {
                return bad();
            }
            out.extend((a..=b).step_by(step));
        } else {
            match num(item) {
                Some(v) => out.push(v),
                None => return bad(),
            }
        }
    }
    Ok(out)
}

fn odd_list(e: &Entry) -> Result<Vec<usize>, ConfigError> {
    let v = int_list(e)?;
    match v.iter().find(|&&l| l % 2 == 0) {
        Some(l) => err(
            e.line,
            e.value_col,
            format!("`{}` entries must be odd, got {l}", e.key),
        ),
        None => Ok(v),
    }
}

fn shield(e: &Entry) -> Result<Shield, ConfigError> {
    if e.value == "boundary" {
        return Ok(Shield::Boundary);
    }
    odd(e).map(Shield::Square).or_else(|_| {
        err(
            e.line,
            e.value_col,
            format!(
                "`{}` must be `boundary` or an odd side, got {:?}",
                e.key, e.value
            ),
        )
    })
}

fn policy(e: &Entry) -> Result<SamplerPolicy, ConfigError> {
    match e.value.as_str() {
        "uniform" => Ok(SamplerPolicy::Uniform),
        "identity" => Ok(SamplerPolicy::Identity),
        other => err(
            e.line,
            e.value_col,
            format!("`{}` must be `uniform` or `identity`, got {other:?}", e.key),
        ),
    }
}

fn order(e: &Entry) -> Result<[BrickColor; 4], ConfigError> {
    let it = items(e);
    if it.len() != 4 {
        return err(
            e.line,
            e.value_col,
            format!("`{}` needs four colours, got {}", e.key, it.len()),
        );
    }
    let mut out = DEFAULT_BRICK_ORDER;
    for (slot, (col, name)) in out.iter_mut().zip(it) {
        *slot = BrickColor::parse(name).map_or_else(
            || err(e.line, col, format!("unknown brick colour {name:?}")),
            Ok,
        )?;
    }
    Ok(out)
}

fn cells(e: &Entry) -> Result<Vec<(usize, usize)>, ConfigError> {
    items(e)
        .into_iter()
        .map(|(col, item)| {
            let rc = item
                .split_once(':')
                .and_then(|(r, c)| Some((r.trim().parse().ok()?, c.trim().parse().ok()?)));
            rc.map_or_else(
                || err(e.line, col, format!("bad cell {item:?}: expected row:col")),
                Ok,
            )
        })
        .collect()
}

/// `brickwork RxC d=D [order=...]`, `coarse-grained m=M tau=T` or
/// `compiled m=M tau=T [sd=S]`, comma separated.
fn architectures(e: &Entry) -> Result<Vec<Architecture>, ConfigError> {
    items(e)
        .into_iter()
        .map(|(col, item)| architecture(e, col, item))
        .collect()
}

fn architecture(e: &Entry, col: usize, item: &str) -> Result<Architecture, ConfigError> {
    let bad = |m: String| err(e.line, col, format!("bad architecture {item:?}: {m}"));
    let mut words = item.split_whitespace();
    let name = words.next().unwrap_or("");
    let mut shape = None;
    let mut kv = BTreeMap::new();
    for w in words {
        if let Some((k, v)) = w.split_once('=') {
            let Ok(v) = v.parse::<usize>() else {
                return bad(format!("{k} must be an integer"));
            };
            kv.insert(k, v);
        } else if let Some((r, c)) = w.split_once('x') {
            match (r.parse::<usize>(), c.parse::<usize>()) {
                (Ok(r), Ok(c)) => shape = Some((r, c)),
                _ => return bad(format!("bad grid shape {w:?}")),
            }
        } else {
            return bad(format!("unexpected word {w:?}"));
        }
    }
    let mut take = |k: &str| kv.remove(k);
    let arch = match name {
        "brickwork" => {
            let Some((rows, cols)) = shape else {
                return bad("missing RxC shape".into());
            };
            let Some(d) = take("d") else {
                return bad("missing d=".into());
            };
            Architecture::brickwork(rows, cols, d)
        }
        "coarse-grained" | "compiled" => {
            let (Some(m), Some(tau)) = (take("m"), take("tau")) else {
                return bad("needs m= and tau=".into());
            };
            if shape.is_some() {
                return bad("takes no RxC shape".into());
            }
            if name == "compiled" {
                let snake_depth =
                    take("sd").unwrap_or_else(|| miesim_core::arch::default_snake_depth(tau));
                Architecture::Compiled {
                    m,
                    tau,
                    snake_depth,
                }
            } else {
                Architecture::CoarseGrained { m, tau }
            }
        }
        _ => return bad("expected brickwork, coarse-grained or compiled".into()),
    };
    if let Some(k) = kv.keys().next() {
        return bad(format!("unknown parameter {k}"));
    }
    if let Err(x) = arch.template() {
        return bad(x.to_string());
    }
    Ok(arch)
}

/// Parse and validate a whole configuration.
pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let sections = parse_sections(text)?;
    for s in &sections {
        if !["experiment", "params", "output"].contains(&s.name.as_str()) {
            return err(
                s.line,
                2,
                format!(
                    "unknown section [{}]; expected [experiment], [params] or [output]",
                    s.name
                ),
            );
        }
    }
    let mut exp = Keys::new(&sections, "experiment");
    let name = exp.require("name")?.value.clone();
    let kind_entry = exp.require("kind")?;
    let Some(kind) = Kind::ALL.into_iter().find(|k| k.name() == kind_entry.value) else {
        let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
        return err(
            kind_entry.line,
            kind_entry.value_col,
            format!(
                "unknown kind {:?}; expected one of {}",
                kind_entry.value,
                names.join(", ")
            ),
        );
    };
    let seed = exp.req("seed", |e| {
        e.value.parse::<u64>().or_else(|_| {
            err(
                e.line,
                e.value_col,
                format!(
                    "`seed` must be a 64-bit unsigned integer, got {:?}",
                    e.value
                ),
            )
        })
    })?;
    let check = match exp.entry("check") {
        None => kind.checks()[0].to_string(),
        Some(e) if kind.checks().contains(&e.value.as_str()) => e.value.clone(),
        Some(e) => {
            return err(
                e.line,
                e.value_col,
                format!(
                    "kind {} has no check {:?}; expected one of {}",
                    kind.name(),
                    e.value,
                    kind.checks().join(", ")
                ),
            )
        }
    };
    exp.finish("")?;

    let mut p = Keys::new(&sections, "params");
    let experiment = params(kind, &check, &mut p)?;
    p.finish(&format!("for kind {} with check {check}", kind.name()))?;

    let mut out = Keys::new(&sections, "output");
    let csv = PathBuf::from(&out.require("csv")?.value);
    let manifest = match out.entry("manifest") {
        Some(e) => PathBuf::from(&e.value),
        None => csv.with_extension("manifest.json"),
    };
    out.finish("")?;

    let echo = sections
        .iter()
        .map(|s| {
            (
                s.name.clone(),
                s.entries
                    .iter()
                    .map(|e| (e.key.clone(), e.value.clone()))
                    .collect(),
            )
        })
        .collect();
    Ok(ExperimentConfig {
        name,
        kind,
        check,
        seed,
        experiment,
        csv,
        manifest,
        echo,
    })
}

fn params<'a>(kind: Kind, check: &str, p: &mut Keys<'a>) -> Result<Experiment, ConfigError> {
    Ok(match (kind, check) {
        (Kind::MieScan, "scan" | "shape") => {
            let grids = p.req("grids", int_list)?;
            let depths = p.req("depths", int_list)?;
            let shields = match p.get("shields", |e| {
                items(e)
                    .into_iter()
                    .map(|(col, s)| {
                        shield(&Entry {
                            value: s.to_string(),
                            value_col: col,
                            ..e.clone()
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })? {
                Some(v) => v,
                None => vec![Shield::Boundary],
            };
            let order = p.get("order", order)?.unwrap_or(DEFAULT_BRICK_ORDER);
            let trials = p.req("trials", positive)?;
            let shape = if check == "shape" {
                let d = ScanShapeCriteria::default();
                Some(ScanShapeCriteria {
                    shallow_max_depth: p
                        .get("shallow_max_depth", int)?
                        .unwrap_or(d.shallow_max_depth),
                    shallow_min_purity: p
                        .get("shallow_min_purity", float)?
                        .unwrap_or(d.shallow_min_purity),
                    deep_depths: p.get("deep_depths", int_list)?.unwrap_or(d.deep_depths),
                    deep_max_purity: p
                        .get("deep_max_purity", float)?
                        .unwrap_or(d.deep_max_purity),
                    deep_min_grid: p.get("deep_min_grid", int)?.unwrap_or(d.deep_min_grid),
                    plateau_sigmas: p.get("plateau_sigmas", float)?.unwrap_or(d.plateau_sigmas),
                })
            } else {
                None
            };
            Experiment::PurityScan {
                grids,
                depths,
                shields,
                order,
                trials,
                shape,
            }
        }
        (Kind::MieScan, "exactness") => Experiment::PurityExactness {
            ensembles: p.req("ensembles", architectures)?,
            shield: p.get("shield", shield)?.unwrap_or(Shield::Boundary),
            instances: p.req("instances", positive)?,
            repetitions: p.req("repetitions", positive)?,
        },
        (Kind::MieScan, _) => Experiment::PurityBound {
            ensembles: p.req("ensembles", architectures)?,
            shield: p.get("shield", shield)?.unwrap_or(Shield::Boundary),
            trials: p.req("trials", positive)?,
        },
        (Kind::Chi, "exhaustive") => Experiment::ChiExhaustive {
            ab: p.get("ab", positive)?.unwrap_or(1),
            trials: p.req("trials", positive)?,
        },
        (Kind::Chi, _) => Experiment::ChiDepth {
            rows: p.req("rows", positive)?,
            cols: p.req("cols", positive)?,
            depths: p.req("depths", int_list)?,
            a: p.get("a", int)?,
            trials: p.req("trials", positive)?,
        },
        (Kind::ClusterChecks, "stats") => Experiment::ClusterStats {
            m: p.req("m", positive)?,
            cells: p.req("cells", cells)?,
            expect_size: p.get("expect_size", int)?,
            expect_perimeter: p.get("expect_perimeter", int)?,
        },
        (Kind::ClusterChecks, "block-paulis") => Experiment::BlockPaulis {
            ts: p.req("t", int_list)?,
            trials: p.req("trials", positive)?,
        },
        (Kind::ClusterChecks, "single-cell") => Experiment::SingleCell {
            m: p.req("m", positive)?,
            tau: p.req("tau", positive)?,
            trials: p.req("trials", positive)?,
        },
        (Kind::ClusterChecks, _) => Experiment::SBound {
            m: p.req("m", positive)?,
            tau: p.req("tau", positive)?,
            l: p.req("shield", odd)?,
            trials: p.req("trials", positive)?,
            policy: p.get("policy", policy)?.unwrap_or(SamplerPolicy::Uniform),
            min_c: p.get("min_c", int)?.unwrap_or(0),
            max_nonempty: p.get("max_nonempty", int)?,
        },
        (Kind::GhzScan, "frequency") => Experiment::GhzFrequency {
            m: p.req("m", positive)?,
            tau: p.req("tau", positive)?,
            trials: p.req("trials", positive)?,
            threshold: p.get("threshold", float)?.unwrap_or(0.0),
            policy: p.get("policy", policy)?.unwrap_or(SamplerPolicy::Uniform),
        },
        (Kind::GhzScan, _) => Experiment::GraphTriples {
            graphs: p.req("graphs", positive)?,
            min_vertices: p.get("min_vertices", int)?.unwrap_or(3),
            max_vertices: p.get("max_vertices", int)?.unwrap_or(8),
        },
        (Kind::Gbg, "exactness" | "identity") => {
            let circuits = p.req("circuits", positive)?;
            let max_qubits = p.get("max_qubits", int)?.unwrap_or(8);
            let layers = p.req("layers", int)?;
            if check == "exactness" {
                Experiment::GbgExactness {
                    circuits,
                    max_qubits,
                    layers,
                }
            } else {
                Experiment::GbgIdentity {
                    circuits,
                    max_qubits,
                    layers,
                }
            }
        }
        (Kind::Gbg, "tvd") => Experiment::GbgTvd {
            circuits: p.req("circuits", positive)?,
            max_qubits: p.get("max_qubits", int)?.unwrap_or(12),
            layers: p.req("layers", int)?,
            shields: p.req("shields", odd_list)?,
            samples: p.req("samples", positive)?,
        },
        (Kind::Gbg, _) => Experiment::GbgSchedule {
            rows: p.req("rows", positive)?,
            cols: p.req("cols", positive)?,
            layers: p.req("layers", int)?,
            shields: p.req("shields", odd_list)?,
        },
        (Kind::Advantage, _) => Experiment::Advantage {
            rotations: p.req("rotations", int)?,
        },
        (Kind::EngineCheck, _) => Experiment::EngineCheck {
            circuits: p.req("circuits", positive)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCAN: &str = "[experiment]\nname = s\nkind = mie-scan\nseed = 7\n\n[params]\ngrids = 9..13:2, 17\ndepths = 1..3\ntrials = 4\n\n[output]\ncsv = out/s.csv\n";

    #[test]
    fn scan_config() {
        let c = parse(SCAN).unwrap();
        assert_eq!(c.kind, Kind::MieScan);
        assert_eq!(c.check, "scan");
        assert_eq!(c.manifest, PathBuf::from("out/s.manifest.json"));
        match c.experiment {
            Experiment::PurityScan {
                grids,
                depths,
                shields,
                ..
            } => {
                assert_eq!(grids, vec![9, 11, 13, 17]);
                assert_eq!(depths, vec![1, 2, 3]);
                assert_eq!(shields, vec![Shield::Boundary]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.echo["params"]["trials"], "4");
    }

    #[test]
    fn unknown_key_is_named_with_position() {
        let text = SCAN.replace("trials = 4", "trials = 4\n  trails = 5");
        let e = parse(&text).unwrap_err();
        assert_eq!((e.line, e.column), (10, 3));
        assert!(e.message.contains("`trails`"), "{e}");
    }

    #[test]
    fn syntax_errors() {
        let e = parse_sections("[experiment\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(parse_sections("x = 1\n").unwrap_err().column, 1);
        assert_eq!(parse_sections("[a]\nkey\n").unwrap_err().line, 2);
        assert_eq!(parse_sections("[a]\nk =   \n").unwrap_err().column, 4);
        assert!(parse_sections("[a]\nk = 1\nk = 2\n").is_err());
        assert!(parse_sections("[a]\n[a]\n").is_err());
    }

    #[test]
    fn value_errors_point_at_value() {
        let e = parse(&SCAN.replace("trials = 4", "trials = four")).unwrap_err();
        assert_eq!((e.line, e.column), (9, 10));
        let e = parse(&SCAN.replace("depths = 1..3", "depths = 1, 3..2")).unwrap_err();
        assert_eq!((e.line, e.column), (8, 13));
        let e = parse(&SCAN.replace("seed = 7\n", "")).unwrap_err();
        assert!(e.message.contains("`seed`"));
        let e =
            parse(&SCAN.replace("kind = mie-scan", "kind = mie-scan\ncheck = nope")).unwrap_err();
        assert!(e.message.contains("nope"));
        let e = parse(&SCAN.replace("kind = mie-scan", "kind = scan")).unwrap_err();
        assert_eq!(e.column, 8);
    }

    #[test]
    fn architectures_parse() {
        let text = "[experiment]\nname = x\nkind = mie-scan\ncheck = exactness\nseed = 1\n[params]\nensembles = brickwork 5x5 d=3, coarse-grained m=2 tau=4, compiled m=2 tau=4 sd=3\ninstances = 3\nrepetitions = 2\n[output]\ncsv = x.csv\n";
        let c = parse(text).unwrap();
        let Experiment::PurityExactness { ensembles, .. } = c.experiment else {
            panic!()
        };
        assert_eq!(
            ensembles[2],
            Architecture::Compiled {
                m: 2,
                tau: 4,
                snake_depth: 3
            }
        );
        let e = parse(&text.replace("d=3", "q=3")).unwrap_err();
        assert!(e.message.contains("d="), "{e}");
        assert_eq!(
            parse(&text.replace("tau=4 sd", "tau=4 xx=1 sd"))
                .unwrap_err()
                .column,
            58
        );
    }
}
