//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! QUBITS 16 GRID 4 4 DEPTH 2
//! GATE 1 0 1 | 4a3...
//! ```
//!
//! `GRID r c` and `DEPTH d` are optional; without `DEPTH` the depth is the
//! largest layer used. Each gate carries its 2k image rows of `2k + 1` bits
//! (`x | z | sign`), packed most-significant-bit first into hex digits and
//! zero-padded to a whole digit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gate::CliffordGate;

use super::circuit::CliffordCircuit;
use super::grid::GridGeometry;
use super::template::{CircuitTemplate, GateSupport};

/// Largest qubit count accepted in a header.
pub const MAX_TEXT_QUBITS: usize = 1 << 20;

pub fn serialize(c: &CliffordCircuit) -> String {
    let t = c.template();
    let mut s = String::new();
    write_header(&mut s, t.n(), t.grid(), t.depth());
    for (g, sup) in c.gates().iter().zip(t.gates()) {
        write_gate_line(&mut s, "GATE", sup);
        s.push_str(&hex_encode(&g.to_bits()));
        s.push('\n');
    }
    s
}

pub(crate) fn write_header(s: &mut String, n: usize, grid: Option<GridGeometry>, depth: usize) {
    let _ = write!(s, "QUBITS {n}");
    if let Some(g) = grid {
        let _ = write!(s, " GRID {} {}", g.rows, g.cols);
    }
    let _ = writeln!(s, " DEPTH {depth}");
}

fn write_gate_line(s: &mut String, tag: &str, sup: &GateSupport) {
    let _ = write!(s, "{tag} {}", sup.layer);
    for q in &sup.qubits {
        let _ = write!(s, " {q}");
    }
    s.push_str(" | ");
}

pub fn parse(text: &str) -> Result<CliffordCircuit> {
    let mut header: Option<Header> = None;
    let mut supports = Vec::new();
    let mut gates = Vec::new();
    for (ln, line) in lines(text) {
        let toks = tokens(line);
        let Some(&(col, first)) = toks.first() else {
            continue;
        };
        match first {
            "QUBITS" => {
                if header.is_some() {
                    return Err(Error::parse(ln, col, "duplicate QUBITS header"));
                }
                header = Some(parse_header(ln, &toks)?);
            }
            "GATE" => {
                let h = header
                    .as_ref()
                    .ok_or_else(|| Error::parse(ln, col, "GATE before QUBITS header"))?;
                let (sup, hex_col, hex) = parse_gate_line(ln, line, &toks, h.n)?;
                let k = sup.qubits.len();
                let nbits = 2 * k * (2 * k + 1);
                let bits = hex_decode(hex, nbits).map_err(|m| Error::parse(ln, hex_col, m))?;
                let g = CliffordGate::from_bits(k, &bits)
                    .map_err(|e| Error::parse(ln, hex_col, e.to_string()))?;
                supports.push(sup);
                gates.push(g);
            }
            other => return Err(Error::parse(ln, col, format!("unknown record {other:?}"))),
        }
    }
    let h = header.ok_or_else(|| Error::parse(1, 1, "missing QUBITS header"))?;
    let template = build_template(h, supports)?;
    CliffordCircuit::new(template, gates)
}

pub(crate) struct Header {
    pub n: usize,
    pub grid: Option<GridGeometry>,
    pub depth: Option<usize>,
    pub line: usize,
}

pub(crate) fn build_template(h: Header, supports: Vec<GateSupport>) -> Result<CircuitTemplate> {
    let depth = h
        .depth
        .unwrap_or_else(|| supports.iter().map(|s| s.layer).max().unwrap_or(0));
    CircuitTemplate::new(h.n, h.grid, supports, depth).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(h.line, 1, other.to_string()),
    })
}

/// Numbered lines with comments stripped.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
}

/// Whitespace-separated tokens with their 1-based byte columns.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub(crate) fn parse_usize(
    ln: usize,
    tok: Option<&(usize, &str)>,
    what: &str,
    end_col: usize,
) -> Result<usize> {
    let &(col, s) = tok.ok_or_else(|| Error::parse(ln, end_col, format!("missing {what}")))?;
    s.parse::<usize>().map_err(|_| {
        Error::parse(
            ln,
            col,
            format!("{what} must be a non-negative integer, got {s:?}"),
        )
    })
}

pub(crate) fn parse_header(ln: usize, toks: &[(usize, &str)]) -> Result<Header> {
    let end = toks.last().map(|t| t.0 + t.1.len()).unwrap_or(1);
    let n = parse_usize(ln, toks.get(1), "qubit count", end)?;
    if n == 0 || n > MAX_TEXT_QUBITS {
        return Err(Error::parse(
            ln,
            toks[1].0,
            format!("qubit count must be in 1..={MAX_TEXT_QUBITS}"),
        ));
    }
    let mut grid = None;
    let mut depth = None;
    let mut i = 2;
    while i < toks.len() {
        match toks[i].1 {
            "GRID" if grid.is_none() => {
                let r = parse_usize(ln, toks.get(i + 1), "grid rows", end)?;
                let c = parse_usize(ln, toks.get(i + 2), "grid cols", end)?;
                let g = GridGeometry::new(r, c)
                    .map_err(|e| Error::parse(ln, toks[i].0, e.to_string()))?;
                if r.checked_mul(c) != Some(n) {
                    return Err(Error::parse(
                        ln,
                        toks[i].0,
                        format!("grid {r}x{c} does not hold {n} qubits"),
                    ));
                }
                grid = Some(g);
                i += 3;
            }
            "DEPTH" if depth.is_none() => {
                depth = Some(parse_usize(ln, toks.get(i + 1), "depth", end)?);
                i += 2;
            }
            other => {
                return Err(Error::parse(
                    ln,
                    toks[i].0,
                    format!("unexpected header token {other:?}"),
                ))
            }
        }
    }
    Ok(Header {
        n,
        grid,
        depth,
        line: ln,
    })
}

/// Parse `TAG <layer> q... | payload`; returns the support, the payload's
/// column and the payload text.
pub(crate) fn parse_gate_line<'a>(
    ln: usize,
    line: &'a str,
    toks: &[(usize, &'a str)],
    n: usize,
) -> Result<(GateSupport, usize, &'a str)> {
    let bar = toks
        .iter()
        .position(|t| t.1 == "|")
        .ok_or_else(|| Error::parse(ln, toks[0].0, "missing '|' separator"))?;
    let layer = parse_usize(ln, toks.get(1).filter(|_| bar > 1), "layer", toks[bar].0)?;
    if layer == 0 {
        return Err(Error::parse(ln, toks[1].0, "layers are numbered from 1"));
    }
    let mut qubits = Vec::with_capacity(bar.saturating_sub(2));
    for t in &toks[2.min(bar)..bar] {
        let q = parse_usize(ln, Some(t), "qubit index", t.0)?;
        if q >= n {
            return Err(Error::parse(
                ln,
                t.0,
                format!("qubit {q} out of range for {n} qubits"),
            ));
        }
        if qubits.contains(&q) {
            return Err(Error::parse(ln, t.0, format!("qubit {q} repeated")));
        }
        qubits.push(q);
    }
    if qubits.is_empty() {
        return Err(Error::parse(ln, toks[bar].0, "gate has no qubits"));
    }
    let payload = &toks[bar + 1..];
    let (col, text) = match payload {
        [] => (line.len() + 1, ""),
        [one] => *one,
        [_, extra, ..] => return Err(Error::parse(ln, extra.0, "unexpected token after payload")),
    };
    Ok((GateSupport { layer, qubits }, col, text))
}

pub(crate) fn hex_encode(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &b)| acc | (b as u32) << (3 - i));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

pub(crate) fn hex_decode(s: &str, nbits: usize) -> std::result::Result<Vec<bool>, String> {
    let want = nbits.div_ceil(4);
    if s.len() != want {
        return Err(format!("expected {want} hex digits, got {}", s.len()));
    }
    let mut out = Vec::with_capacity(want * 4);
    for ch in s.chars() {
        let v = ch
            .to_digit(16)
            .ok_or_else(|| format!("bad hex digit {ch:?}"))?;
        out.extend((0..4).map(|i| (v >> (3 - i)) & 1 == 1));
    }
    if out[nbits..].iter().any(|&b| b) {
        return Err("nonzero padding bits".into());
    }
    out.truncate(nbits);
    Ok(out)
}
