//! Text format for [`GbgCircuit`]s: the circuit format with a mandatory
//! `GRID`, plus `U1` rows for arbitrary single-qubit unitaries.
//!
//! ```text
//! QUBITS 4 GRID 2 2
//! GATE 1 0 1 | c2086        # must be a CNOT (control first) ...
//! GATE 1 3 | 50             # ... or a single-qubit Clifford
//! U1 2 | 3fe6a09e667f3bcd 0000000000000000 3fe6a09e667f3bcd 0000000000000000 3fe6a09e667f3bcd 0000000000000000 bfe6a09e667f3bcd 0000000000000000
//! ```
//!
//! A `U1` row lists the matrix entries `u00 u01 u10 u11`, each as real then
//! imaginary part, every double written as the 16 hex digits of its IEEE-754
//! bits. Gates run in file order. `GATE` layer numbers are checked but the
//! sampler does not use them; [`serialize`] writes ASAP layers.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::arch::text::{
    hex_decode, hex_encode, lines, parse_gate_line, parse_header, parse_usize, tokens, write_header,
};
use crate::error::{Error, Result};
use crate::gate::CliffordGate;

use super::schedule::asap_layers;
use super::{GbgCircuit, GbgGate};

pub fn serialize(c: &GbgCircuit) -> String {
    let mut s = String::new();
    let layers = asap_layers(c);
    write_header(
        &mut s,
        c.n(),
        Some(c.grid()),
        layers.iter().copied().max().unwrap_or(0),
    );
    let cnot_hex = hex_encode(&CliffordGate::cnot().to_bits());
    for (g, layer) in c.gates().iter().zip(layers) {
        match g {
            GbgGate::Cnot { control, target } => {
                let _ = writeln!(s, "GATE {layer} {control} {target} | {cnot_hex}");
            }
            GbgGate::U1 { qubit, matrix } => {
                let _ = write!(s, "U1 {qubit} |");
                for v in matrix {
                    let _ = write!(s, " {:016x} {:016x}", v.re.to_bits(), v.im.to_bits());
                }
                s.push('\n');
            }
        }
    }
    s
}

pub fn parse(text: &str) -> Result<GbgCircuit> {
    let mut header = None;
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
                let h = parse_header(ln, &toks)?;
                if h.grid.is_none() {
                    return Err(Error::parse(ln, col, "gate-by-gate circuits need a GRID"));
                }
                header = Some(h);
            }
            "GATE" => {
                let h = header
                    .as_ref()
                    .ok_or_else(|| Error::parse(ln, col, "GATE before QUBITS header"))?;
                let (sup, hex_col, hex) = parse_gate_line(ln, line, &toks, h.n)?;
                let k = sup.qubits.len();
                if k > 2 {
                    return Err(Error::parse(
                        ln,
                        col,
                        format!("gate on {k} qubits; only CNOTs and single-qubit gates"),
                    ));
                }
                let bits = hex_decode(hex, 2 * k * (2 * k + 1))
                    .map_err(|m| Error::parse(ln, hex_col, m))?;
                let g = CliffordGate::from_bits(k, &bits)
                    .map_err(|e| Error::parse(ln, hex_col, e.to_string()))?;
                if k == 2 {
                    if g != CliffordGate::cnot() {
                        return Err(Error::parse(ln, hex_col, "two-qubit gate is not a CNOT"));
                    }
                    gates.push((
                        ln,
                        GbgGate::Cnot {
                            control: sup.qubits[0],
                            target: sup.qubits[1],
                        },
                    ));
                } else {
                    gates.push((ln, GbgGate::u1_clifford(sup.qubits[0], &g)?));
                }
            }
            "U1" => {
                let h = header
                    .as_ref()
                    .ok_or_else(|| Error::parse(ln, col, "U1 before QUBITS header"))?;
                gates.push((ln, parse_u1(ln, line, &toks, h.n)?));
            }
            other => return Err(Error::parse(ln, col, format!("unknown record {other:?}"))),
        }
    }
    let h = header.ok_or_else(|| Error::parse(1, 1, "missing QUBITS header"))?;
    let grid = h.grid.expect("checked when parsed");
    // report circuit-level problems against the offending line
    for (i, &(ln, g)) in gates.iter().enumerate() {
        GbgCircuit::new(grid, vec![g])
            .map_err(|e| Error::parse(ln, 1, format!("gate {i}: {e}")))?;
    }
    GbgCircuit::new(grid, gates.into_iter().map(|(_, g)| g).collect())
}

fn parse_u1(ln: usize, line: &str, toks: &[(usize, &str)], n: usize) -> Result<GbgGate> {
    let bar = toks
        .iter()
        .position(|t| t.1 == "|")
        .ok_or_else(|| Error::parse(ln, toks[0].0, "missing '|' separator"))?;
    if bar != 2 {
        let col = toks.get(2).map_or(toks[0].0, |t| t.0);
        return Err(Error::parse(
            ln,
            col,
            "U1 takes exactly one qubit before '|'",
        ));
    }
    let qubit = parse_usize(ln, toks.get(1), "qubit index", toks[bar].0)?;
    if qubit >= n {
        return Err(Error::parse(
            ln,
            toks[1].0,
            format!("qubit {qubit} out of range for {n} qubits"),
        ));
    }
    let vals = &toks[bar + 1..];
    if vals.len() != 8 {
        let col = vals.get(8).map_or(line.len() + 1, |t| t.0);
        return Err(Error::parse(
            ln,
            col,
            format!("U1 needs 8 hex doubles, got {}", vals.len()),
        ));
    }
    let mut d = [0f64; 8];
    for (v, &(col, s)) in d.iter_mut().zip(vals) {
        if s.len() != 16 {
            return Err(Error::parse(
                ln,
                col,
                format!("expected 16 hex digits, got {}", s.len()),
            ));
        }
        let bits = u64::from_str_radix(s, 16)
            .map_err(|_| Error::parse(ln, col, format!("bad hex double {s:?}")))?;
        *v = f64::from_bits(bits);
        if !v.is_finite() {
            return Err(Error::parse(ln, col, "matrix entry is not finite"));
        }
    }
    let matrix = [0, 1, 2, 3].map(|i| Complex64::new(d[2 * i], d[2 * i + 1]));
    Ok(GbgGate::U1 { qubit, matrix })
}
