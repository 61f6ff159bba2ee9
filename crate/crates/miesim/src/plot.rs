//! Self-contained SVG line plots of result CSVs.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::de::DeserializeOwned;

use crate::run::{ChiDepthCsvRow, ScanRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean purity against grid side, one curve per depth.
    MieScan,
    /// `E⟨Z_A⟩²` estimate and its lower bound against depth.
    ChiDepth,
}

impl PlotKind {
    pub const NAMES: [&'static str; 2] = ["mie-scan", "chi-depth"];

    pub fn parse(s: &str) -> Option<PlotKind> {
        match s {
            "mie-scan" => Some(PlotKind::MieScan),
            "chi-depth" => Some(PlotKind::ChiDepth),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlotError {
    /// Header or record does not fit the schema of the plot kind.
    Schema(String),
    Empty,
}

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlotError::Schema(m) => write!(f, "CSV does not match the schema: {m}"),
            PlotError::Empty => write!(f, "CSV has no data rows"),
        }
    }
}

impl std::error::Error for PlotError {}

/// Deserialize every record, requiring the header to carry exactly the
/// schema's columns in some order.
pub fn read_rows<T: DeserializeOwned>(bytes: &[u8], columns: &[&str]) -> Result<Vec<T>, PlotError> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r
        .headers()
        .map_err(|e| PlotError::Schema(e.to_string()))?
        .clone();
    if header.is_empty() {
        return Err(PlotError::Empty);
    }
    let mut got: Vec<&str> = header.iter().collect();
    let mut want = columns.to_vec();
    got.sort_unstable();
    want.sort_unstable();
    if got != want {
        return Err(PlotError::Schema(format!(
            "expected columns {}, got {}",
            columns.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec.map_err(|e: csv::Error| PlotError::Schema(e.to_string()))?);
    }
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok(rows)
}

pub const SCAN_COLUMNS: [&str; 8] = [
    "arch",
    "depth",
    "l",
    "grid",
    "trials",
    "mean_purity",
    "stderr",
    "seed",
];
pub const CHI_DEPTH_COLUMNS: [&str; 6] = ["depth", "estimate", "stderr", "bound", "trials", "pass"];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(x, y, error)` triples, drawn in order.
    pub points: Vec<(f64, f64, f64)>,
    pub dashed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

pub fn figure_from_csv(bytes: &[u8], kind: PlotKind) -> Result<Figure, PlotError> {
    match kind {
        PlotKind::MieScan => {
            let rows: Vec<ScanRow> = read_rows(bytes, &SCAN_COLUMNS)?;
            let mut by_depth: BTreeMap<usize, Vec<(f64, f64, f64)>> = BTreeMap::new();
            for r in &rows {
                by_depth
                    .entry(r.depth)
                    .or_default()
                    .push((r.grid as f64, r.mean_purity, r.stderr));
            }
            let series = by_depth
                .into_iter()
                .map(|(d, mut pts)| {
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Series {
                        label: format!("d = {d}"),
                        points: pts,
                        dashed: false,
                    }
                })
                .collect();
            Ok(Figure {
                title: format!(
                    "Post-measurement purity of A ({} trials/point)",
                    rows[0].trials
                ),
                x_label: "grid side".into(),
                y_label: "mean Tr ρ_A²".into(),
                series,
            })
        }
        PlotKind::ChiDepth => {
            let mut rows: Vec<ChiDepthCsvRow> = read_rows(bytes, &CHI_DEPTH_COLUMNS)?;
            rows.sort_by_key(|r| r.depth);
            Ok(Figure {
                title: format!("Squared Z expectation ({} trials/point)", rows[0].trials),
                x_label: "depth".into(),
                y_label: "E ⟨Z_A⟩²".into(),
                series: vec![
                    Series {
                        label: "estimate".into(),
                        points: rows
                            .iter()
                            .map(|r| (r.depth as f64, r.estimate, r.stderr))
                            .collect(),
                        dashed: false,
                    },
                    Series {
                        label: "lower bound".into(),
                        points: rows
                            .iter()
                            .map(|r| (r.depth as f64, r.bound, 0.0))
                            .collect(),
                        dashed: true,
                    },
                ],
            })
        }
    }
}

pub fn plot_csv(bytes: &[u8], kind: PlotKind) -> Result<String, PlotError> {
    Ok(render_svg(&figure_from_csv(bytes, kind)?))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Tick positions covering `[lo, hi]` with a 1-2-5 step, roughly `target`
/// of them.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Data range with a margin; a single value gets a unit window.
fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let w = if lo.abs() > 1e-12 {
            lo.abs() * 0.1
        } else {
            0.5
        };
        return (lo - w, hi + w);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render_svg(fig: &Figure) -> String {
    let pts = || fig.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(pts().map(|p| p.0));
    let (y0, y1) = range(pts().flat_map(|p| [p.1 - p.2, p.1 + p.2]));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&fig.title)
    );

    // grid lines and ticks
    for t in nice_ticks(x0, x1, 8) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e5e5e5"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"##,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 19.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e5e5e5"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"##,
            LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&fig.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        escape(&fig.y_label)
    );

    for (k, ser) in fig.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if ser.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<g class="series" data-label="{}">"#,
            escape(&ser.label)
        );
        if ser.points.len() > 1 {
            let path: Vec<String> = ser
                .points
                .iter()
                .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                path.join(" ")
            );
        }
        for &(x, y, e) in &ser.points {
            let (px, py) = (sx(x), sy(y));
            if e > 0.0 {
                let (lo, hi) = (sy(y - e), sy(y + e));
                let _ = writeln!(
                    s,
                    r#"<path d="M{px:.2},{lo:.2}V{hi:.2}M{:.2},{lo:.2}h8M{:.2},{hi:.2}h8" stroke="{color}" class="errorbar"/>"#,
                    px - 4.0,
                    px - 4.0
                );
            }
            if !ser.dashed {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#
                );
            }
        }
        let _ = writeln!(s, "</g>");
        // legend
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_csv(depths: &[usize], grids: &[usize]) -> String {
        let mut s = "arch,depth,l,grid,trials,mean_purity,stderr,seed\n".to_string();
        for &d in depths {
            for &g in grids {
                s += &format!(
                    "brickwork,{d},{},{g},10,{},0.01,1\n",
                    g - 2,
                    1.0 - 0.05 * d as f64
                );
            }
        }
        s
    }

    #[test]
    fn eight_depth_curves() {
        let svg = plot_csv(
            scan_csv(&[1, 2, 3, 4, 5, 6, 7, 8], &[9, 11, 13]).as_bytes(),
            PlotKind::MieScan,
        )
        .unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 8);
        assert_eq!(svg.matches("<polyline").count(), 8);
        assert_eq!(svg.matches("errorbar").count(), 24);
        assert!(svg.contains("d = 8"));
    }

    #[test]
    fn single_row_is_a_point() {
        let svg = plot_csv(scan_csv(&[3], &[9]).as_bytes(), PlotKind::MieScan).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn empty_and_mismatched_csv() {
        assert_eq!(plot_csv(b"", PlotKind::MieScan), Err(PlotError::Empty));
        let header = "arch,depth,l,grid,trials,mean_purity,stderr,seed\n";
        assert_eq!(
            plot_csv(header.as_bytes(), PlotKind::MieScan),
            Err(PlotError::Empty)
        );
        assert!(matches!(
            plot_csv(b"depth,estimate\n1,2\n", PlotKind::MieScan),
            Err(PlotError::Schema(_))
        ));
        let bad = format!("{header}brickwork,x,1,3,1,1,0,1\n");
        assert!(matches!(
            plot_csv(bad.as_bytes(), PlotKind::MieScan),
            Err(PlotError::Schema(_))
        ));
        assert!(matches!(
            plot_csv(scan_csv(&[1], &[9]).as_bytes(), PlotKind::ChiDepth),
            Err(PlotError::Schema(_))
        ));
    }

    #[test]
    fn chi_depth_plot() {
        let csv = "depth,estimate,stderr,bound,trials,pass\n1,0.3,0.01,0.13,100,true\n2,0.1,0.01,0.05,100,true\n";
        let svg = plot_csv(csv.as_bytes(), PlotKind::ChiDepth).unwrap();
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("lower bound"));
    }

    #[test]
    fn ticks() {
        assert_eq!(
            nice_ticks(0.0, 1.0, 5),
            vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]
        );
        assert_eq!(nice_ticks(8.2, 25.8, 8), vec![10.0, 15.0, 20.0, 25.0]);
        assert_eq!(fmt_tick(0.6000000000000001), "0.6");
        assert_eq!(fmt_tick(-0.0), "0");
    }
}
