//! Static plan for running the sampler's updates in parallel.
//!
//! The grid is cut into `L × L` tiles. The update for a single-qubit gate on
//! qubit `a` reads `Square_L(a)`, which stays inside the `3L × 3L` region made
//! of the tile of `a` and its eight neighbours. Tiles whose coordinates agree
//! mod 3 have disjoint regions, so each of the nine residue classes is one
//! parallel step.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{shield, GbgCircuit, GbgGate};

/// 1-based ASAP layer of every gate: one more than the latest earlier gate
/// sharing a qubit.
pub fn asap_layers(circuit: &GbgCircuit) -> Vec<usize> {
    let mut last = vec![0usize; circuit.n()];
    circuit
        .gates()
        .iter()
        .map(|g| {
            let qs = g.qubits();
            let layer = qs.iter().map(|&q| last[q]).max().unwrap_or(0) + 1;
            qs.iter().for_each(|&q| last[q] = layer);
            layer
        })
        .collect()
}

/// Half-open row and column ranges of a `3L` update region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateRegion {
    pub tile: (usize, usize),
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    /// Gate indices updated inside this region, in circuit order.
    pub updates: Vec<usize>,
}

impl UpdateRegion {
    fn contains(&self, r: usize, c: usize) -> bool {
        (self.rows.0..self.rows.1).contains(&r) && (self.cols.0..self.cols.1).contains(&c)
    }

    fn overlaps(&self, other: &UpdateRegion) -> bool {
        self.rows.0 < other.rows.1
            && other.rows.0 < self.rows.1
            && self.cols.0 < other.cols.1
            && other.cols.0 < self.cols.1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateGroup {
    /// Tile coordinates mod 3.
    pub residue: (usize, usize),
    pub regions: Vec<UpdateRegion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSchedule {
    pub layer: usize,
    /// CNOT gate indices; their parity updates touch disjoint bits.
    pub cnots: Vec<usize>,
    pub groups: Vec<UpdateGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelSchedule {
    pub l: usize,
    pub layers: Vec<LayerSchedule>,
}

impl ParallelSchedule {
    pub fn max_groups(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.groups.len())
            .max()
            .unwrap_or(0)
    }
}

pub fn plan_parallel_schedule(circuit: &GbgCircuit, l: usize) -> Result<ParallelSchedule> {
    if l == 0 {
        return Err(Error::InvalidParameter(
            "shield side L must be positive".into(),
        ));
    }
    let grid = circuit.grid();
    let layer_of = asap_layers(circuit);
    let depth = layer_of.iter().copied().max().unwrap_or(0);
    let mut layers: Vec<LayerSchedule> = (1..=depth)
        .map(|layer| LayerSchedule {
            layer,
            cnots: Vec::new(),
            groups: Vec::new(),
        })
        .collect();
    let mut buckets: Vec<BTreeMap<(usize, usize), BTreeMap<(usize, usize), Vec<usize>>>> =
        vec![BTreeMap::new(); depth];
    for (i, g) in circuit.gates().iter().enumerate() {
        let li = layer_of[i] - 1;
        match *g {
            GbgGate::Cnot { .. } => layers[li].cnots.push(i),
            GbgGate::U1 { qubit, .. } => {
                let (r, c) = grid.coords(qubit);
                let tile = (r / l, c / l);
                buckets[li]
                    .entry((tile.0 % 3, tile.1 % 3))
                    .or_default()
                    .entry(tile)
                    .or_default()
                    .push(i);
            }
        }
    }
    for (ls, groups) in layers.iter_mut().zip(buckets) {
        ls.groups = groups
            .into_iter()
            .map(|(residue, tiles)| UpdateGroup {
                residue,
                regions: tiles
                    .into_iter()
                    .map(|((ti, tj), updates)| UpdateRegion {
                        tile: (ti, tj),
                        rows: (ti.saturating_sub(1) * l, ((ti + 2) * l).min(grid.rows)),
                        cols: (tj.saturating_sub(1) * l, ((tj + 2) * l).min(grid.cols)),
                        updates,
                    })
                    .collect(),
            })
            .collect();
    }
    Ok(ParallelSchedule { l, layers })
}

/// Machine check of a schedule: each gate placed once, in its ASAP layer;
/// at most nine groups per layer; regions of a group pairwise disjoint; and
/// each update's square inside its region.
pub fn validate_schedule(circuit: &GbgCircuit, schedule: &ParallelSchedule) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidParameter(format!("schedule: {m}")));
    let grid = circuit.grid();
    let layer_of = asap_layers(circuit);
    let mut seen = vec![false; circuit.gates().len()];
    let mut place = |i: usize, layer: usize, single: bool| -> Result<()> {
        if i >= seen.len() || seen[i] {
            return bad(format!("gate {i} missing from the circuit or placed twice"));
        }
        seen[i] = true;
        if layer_of[i] != layer || circuit.gates()[i].is_single() != single {
            return bad(format!(
                "gate {i} placed in layer {layer} as the wrong kind"
            ));
        }
        Ok(())
    };
    for ls in &schedule.layers {
        if ls.groups.len() > 9 {
            return bad(format!("layer {} has {} groups", ls.layer, ls.groups.len()));
        }
        for &i in &ls.cnots {
            place(i, ls.layer, false)?;
        }
        for grp in &ls.groups {
            for (x, rx) in grp.regions.iter().enumerate() {
                for ry in &grp.regions[x + 1..] {
                    if rx.overlaps(ry) {
                        return bad(format!(
                            "layer {}: regions of tiles {:?} and {:?} overlap",
                            ls.layer, rx.tile, ry.tile
                        ));
                    }
                }
                for &i in &rx.updates {
                    place(i, ls.layer, true)?;
                    let a = circuit.gates()[i].qubits()[0];
                    let mut read = shield(grid, a, schedule.l);
                    read.push(a);
                    if let Some(q) = read
                        .into_iter()
                        .find(|&q| !rx.contains(grid.coords(q).0, grid.coords(q).1))
                    {
                        return bad(format!(
                            "update of gate {i} reads qubit {q} outside its region"
                        ));
                    }
                }
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return bad(format!("gate {i} is not scheduled"));
    }
    Ok(())
}
