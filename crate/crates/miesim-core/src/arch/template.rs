use crate::error::{Error, Result};

use super::grid::GridGeometry;

/// One gate position: its layer (1-based) and ordered qubit support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateSupport {
    pub layer: usize,
    pub qubits: Vec<usize>,
}

/// Ordered list of gate supports `m_1..m_R` with layer structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitTemplate {
    n: usize,
    grid: Option<GridGeometry>,
    gates: Vec<GateSupport>,
    depth: usize,
}

impl CircuitTemplate {
    pub fn new(
        n: usize,
        grid: Option<GridGeometry>,
        gates: Vec<GateSupport>,
        depth: usize,
    ) -> Result<Self> {
        let t = CircuitTemplate {
            n,
            grid,
            gates,
            depth,
        };
        t.validate()?;
        Ok(t)
    }

    /// A template with no gates.
    pub fn empty(n: usize, grid: Option<GridGeometry>) -> Self {
        CircuitTemplate {
            n,
            grid,
            gates: Vec::new(),
            depth: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> Option<GridGeometry> {
        self.grid
    }

    pub fn gates(&self) -> &[GateSupport] {
        &self.gates
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `Some(k)` if every gate acts on exactly k qubits.
    pub fn locality(&self) -> Option<usize> {
        let k = self.gates.first()?.qubits.len();
        self.gates.iter().all(|g| g.qubits.len() == k).then_some(k)
    }

    /// Number of gates in each layer `1..=depth`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.depth];
        for g in &self.gates {
            s[g.layer - 1] += 1;
        }
        s
    }

    /// Supports in range and duplicate-free, layers ordered and within the
    /// declared depth, gates of one layer pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroQubits);
        }
        if let Some(g) = self.grid {
            if g.n() != self.n {
                return Err(Error::InvalidTemplate(format!(
                    "grid {}x{} does not hold {} qubits",
                    g.rows, g.cols, self.n
                )));
            }
        }
        let mut owner = vec![0usize; self.n];
        let mut prev_layer = 0;
        for (i, g) in self.gates.iter().enumerate() {
            if g.qubits.is_empty() {
                return Err(Error::InvalidTemplate(format!(
                    "gate {i} has empty support"
                )));
            }
            if g.layer == 0 || g.layer > self.depth {
                return Err(Error::InvalidTemplate(format!(
                    "gate {i} in layer {} outside 1..={}",
                    g.layer, self.depth
                )));
            }
            if g.layer < prev_layer {
                return Err(Error::InvalidTemplate(format!(
                    "gate {i} breaks layer order"
                )));
            }
            prev_layer = g.layer;
            crate::tableau::check_support(self.n, &g.qubits)?;
            for &q in &g.qubits {
                if owner[q] == g.layer {
                    return Err(Error::InvalidTemplate(format!(
                        "qubit {q} used twice in layer {}",
                        g.layer
                    )));
                }
                owner[q] = g.layer;
            }
        }
        Ok(())
    }
}

/// Edge-colour classes of the brickwork pattern. "Vertical" edges join
/// `(r, c)` and `(r + 1, c)`; "odd" means the first of the two rows (or
/// columns) is odd when counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BrickColor {
    VerticalOdd,
    VerticalEven,
    HorizontalOdd,
    HorizontalEven,
}

impl BrickColor {
    pub fn name(self) -> &'static str {
        match self {
            BrickColor::VerticalOdd => "vertical-odd",
            BrickColor::VerticalEven => "vertical-even",
            BrickColor::HorizontalOdd => "horizontal-odd",
            BrickColor::HorizontalEven => "horizontal-even",
        }
    }

    pub fn parse(s: &str) -> Option<BrickColor> {
        [
            BrickColor::VerticalOdd,
            BrickColor::VerticalEven,
            BrickColor::HorizontalOdd,
            BrickColor::HorizontalEven,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }

    pub(crate) fn edges(self, grid: GridGeometry) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        match self {
            BrickColor::VerticalOdd | BrickColor::VerticalEven => {
                let start = (self == BrickColor::VerticalEven) as usize;
                for r in (start..grid.rows.saturating_sub(1)).step_by(2) {
                    for c in 0..grid.cols {
                        out.push([grid.index(r, c), grid.index(r + 1, c)]);
                    }
                }
            }
            BrickColor::HorizontalOdd | BrickColor::HorizontalEven => {
                let start = (self == BrickColor::HorizontalEven) as usize;
                for r in 0..grid.rows {
                    for c in (start..grid.cols.saturating_sub(1)).step_by(2) {
                        out.push([grid.index(r, c), grid.index(r, c + 1)]);
                    }
                }
            }
        }
        out
    }
}

pub const DEFAULT_BRICK_ORDER: [BrickColor; 4] = [
    BrickColor::VerticalOdd,
    BrickColor::VerticalEven,
    BrickColor::HorizontalOdd,
    BrickColor::HorizontalEven,
];

/// Depth-`d` brickwork on a `rows × cols` grid; layer `t` uses colour
/// `(t − 1) mod 4` of [`DEFAULT_BRICK_ORDER`].
pub fn brickwork_template(rows: usize, cols: usize, d: usize) -> Result<CircuitTemplate> {
    brickwork_template_with_order(rows, cols, d, DEFAULT_BRICK_ORDER)
}

pub fn brickwork_template_with_order(
    rows: usize,
    cols: usize,
    d: usize,
    order: [BrickColor; 4],
) -> Result<CircuitTemplate> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter(format!(
            "brickwork needs at least a 2x2 grid, got {rows}x{cols}"
        )));
    }
    let grid = GridGeometry::new(rows, cols)?;
    let mut gates = Vec::new();
    for t in 1..=d {
        for e in order[(t - 1) % 4].edges(grid) {
            gates.push(GateSupport {
                layer: t,
                qubits: e.to_vec(),
            });
        }
    }
    CircuitTemplate::new(grid.n(), Some(grid), gates, d)
}

fn check_block_params(m: usize, tau: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "coarse-grained grid needs m >= 2, got {m}"
        )));
    }
    if tau < 2 || !tau.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "block side tau must be even and >= 2, got {tau}"
        )));
    }
    Ok(())
}

/// Qubits of the `tau × tau` block with top-left corner `(r0, c0)`, row-major.
fn block(grid: GridGeometry, r0: usize, c0: usize, tau: usize) -> Vec<usize> {
    let mut q = Vec::with_capacity(tau * tau);
    for r in r0..r0 + tau {
        for c in c0..c0 + tau {
            q.push(grid.index(r, c));
        }
    }
    q
}

/// Top-left corners of the first-layer blocks (offset by `tau/2`) and of the
/// second-layer blocks.
fn block_corners(m: usize, tau: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let h = tau / 2;
    let first = (0..m - 1)
        .flat_map(|i| (0..m - 1).map(move |j| (h + i * tau, h + j * tau)))
        .collect();
    let second = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i * tau, j * tau)))
        .collect();
    (first, second)
}

/// Two layers of `tau × tau` block gates on an `mτ × mτ` grid. Layer 1 holds
/// the `(m−1)²` blocks offset by `(τ/2, τ/2)`; qubits outside them are idle.
/// Layer 2 holds the `m²` aligned blocks.
pub fn coarse_grained_template(m: usize, tau: usize) -> Result<CircuitTemplate> {
    check_block_params(m, tau)?;
    let grid = GridGeometry::square(m * tau)?;
    let (first, second) = block_corners(m, tau);
    let mut gates = Vec::new();
    for (r, c) in first {
        gates.push(GateSupport {
            layer: 1,
            qubits: block(grid, r, c, tau),
        });
    }
    for (r, c) in second {
        gates.push(GateSupport {
            layer: 2,
            qubits: block(grid, r, c, tau),
        });
    }
    CircuitTemplate::new(grid.n(), Some(grid), gates, 2)
}

pub fn default_snake_depth(tau: usize) -> usize {
    5 * tau * tau
}

/// Boustrophedon path through the `tau × tau` block at `(r0, c0)`: even rows
/// left to right, odd rows right to left.
pub fn snake_path(grid: GridGeometry, r0: usize, c0: usize, tau: usize) -> Vec<usize> {
    let mut p = Vec::with_capacity(tau * tau);
    for i in 0..tau {
        if i % 2 == 0 {
            p.extend((0..tau).map(|j| grid.index(r0 + i, c0 + j)));
        } else {
            p.extend((0..tau).rev().map(|j| grid.index(r0 + i, c0 + j)));
        }
    }
    p
}

/// The coarse-grained layout with each block gate replaced by a depth
/// `snake_depth` 1D brickwork of 2-qubit gates along the block's snake path.
pub fn compiled_template(m: usize, tau: usize, snake_depth: usize) -> Result<CircuitTemplate> {
    check_block_params(m, tau)?;
    if snake_depth == 0 {
        return Err(Error::InvalidParameter(
            "snake_depth must be at least 1".into(),
        ));
    }
    let grid = GridGeometry::square(m * tau)?;
    let (first, second) = block_corners(m, tau);
    let mut gates = Vec::new();
    for (phase, corners) in [first, second].into_iter().enumerate() {
        let paths: Vec<Vec<usize>> = corners
            .iter()
            .map(|&(r, c)| snake_path(grid, r, c, tau))
            .collect();
        for l in 0..snake_depth {
            let layer = phase * snake_depth + l + 1;
            for path in &paths {
                for i in (l % 2..path.len().saturating_sub(1)).step_by(2) {
                    gates.push(GateSupport {
                        layer,
                        qubits: vec![path[i], path[i + 1]],
                    });
                }
            }
        }
    }
    CircuitTemplate::new(grid.n(), Some(grid), gates, 2 * snake_depth)
}

/// A named architecture with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Architecture {
    Brickwork {
        rows: usize,
        cols: usize,
        depth: usize,
        order: [BrickColor; 4],
    },
    CoarseGrained {
        m: usize,
        tau: usize,
    },
    Compiled {
        m: usize,
        tau: usize,
        snake_depth: usize,
    },
}

impl Architecture {
    pub fn brickwork(rows: usize, cols: usize, depth: usize) -> Self {
        Architecture::Brickwork {
            rows,
            cols,
            depth,
            order: DEFAULT_BRICK_ORDER,
        }
    }

    pub fn template(&self) -> Result<CircuitTemplate> {
        match *self {
            Architecture::Brickwork {
                rows,
                cols,
                depth,
                order,
            } => brickwork_template_with_order(rows, cols, depth, order),
            Architecture::CoarseGrained { m, tau } => coarse_grained_template(m, tau),
            Architecture::Compiled {
                m,
                tau,
                snake_depth,
            } => compiled_template(m, tau, snake_depth),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Brickwork { .. } => "brickwork",
            Architecture::CoarseGrained { .. } => "coarse-grained",
            Architecture::Compiled { .. } => "compiled",
        }
    }

    /// Short parameter string, e.g. `d=4` or `m=2;tau=8`.
    pub fn params(&self) -> String {
        match *self {
            Architecture::Brickwork {
                rows, cols, depth, ..
            } => format!("{rows}x{cols};d={depth}"),
            Architecture::CoarseGrained { m, tau } => format!("m={m};tau={tau}"),
            Architecture::Compiled {
                m,
                tau,
                snake_depth,
            } => format!("m={m};tau={tau};sd={snake_depth}"),
        }
    }
}

/// Backward lightcone of `targets`: every qubit whose initial value can reach
/// a target through the gate supports, and the gates that connect them (in
/// original order, layers preserved).
pub fn lightcone(
    template: &CircuitTemplate,
    targets: &[usize],
) -> Result<(Vec<usize>, CircuitTemplate)> {
    crate::tableau::check_support(template.n, targets)?;
    let kept = lightcone_gate_indices(template, targets);
    let mut inside = vec![false; template.n];
    for &q in targets
        .iter()
        .chain(kept.iter().flat_map(|&i| &template.gates[i].qubits))
    {
        inside[q] = true;
    }
    let qubits = (0..template.n).filter(|&q| inside[q]).collect();
    let gates = kept
        .into_iter()
        .map(|i| template.gates[i].clone())
        .collect();
    Ok((
        qubits,
        CircuitTemplate {
            n: template.n,
            grid: template.grid,
            gates,
            depth: template.depth,
        },
    ))
}

/// Indices of the template's gates inside the lightcone of `targets`.
pub(crate) fn lightcone_gate_indices(template: &CircuitTemplate, targets: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; template.n];
    for &q in targets {
        inside[q] = true;
    }
    let mut kept = Vec::new();
    for (i, g) in template.gates.iter().enumerate().rev() {
        if g.qubits.iter().any(|&q| inside[q]) {
            for &q in &g.qubits {
                inside[q] = true;
            }
            kept.push(i);
        }
    }
    kept.reverse();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn brickwork_layer_sizes() {
        assert_eq!(
            brickwork_template(6, 6, 4).unwrap().layer_sizes(),
            vec![18, 12, 18, 12]
        );
        assert_eq!(
            brickwork_template(2, 2, 2).unwrap().layer_sizes(),
            vec![2, 0]
        );
        let t = brickwork_template(5, 5, 0).unwrap();
        assert!(t.gates().is_empty());
        assert!(brickwork_template(1, 5, 2).is_err());
        assert_eq!(brickwork_template(4, 4, 5).unwrap().locality(), Some(2));
    }

    #[test]
    fn coarse_grained_counts() {
        let t = coarse_grained_template(4, 4).unwrap();
        assert_eq!(t.n(), 256);
        assert_eq!(t.layer_sizes(), vec![9, 16]);
        let t = coarse_grained_template(2, 2).unwrap();
        assert_eq!(t.n(), 16);
        assert_eq!(t.layer_sizes(), vec![1, 4]);
        // central 2x2 block of the 4x4 grid
        assert_eq!(t.gates()[0].qubits, vec![5, 6, 9, 10]);
        assert!(coarse_grained_template(1, 4).is_err());
        assert!(coarse_grained_template(2, 3).is_err());
    }

    #[test]
    fn compiled_counts_and_snake() {
        let t = compiled_template(2, 2, 1).unwrap();
        assert_eq!(t.gates().len(), 10);
        assert_eq!(t.locality(), Some(2));
        assert!(compiled_template(2, 2, 0).is_err());
        let g = GridGeometry::square(8).unwrap();
        let mut p = snake_path(g, 0, 0, 4);
        for w in p.windows(2) {
            assert!(g.adjacent(w[0], w[1]));
        }
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 16);
        assert_eq!(default_snake_depth(4), 80);
    }

    #[test]
    fn lightcone_examples() {
        let empty = CircuitTemplate::empty(3, None);
        assert_eq!(lightcone(&empty, &[1]).unwrap().0, vec![1]);
        let cnot = CircuitTemplate::new(
            3,
            None,
            vec![GateSupport {
                layer: 1,
                qubits: vec![0, 1],
            }],
            1,
        )
        .unwrap();
        assert_eq!(lightcone(&cnot, &[1]).unwrap().0, vec![0, 1]);
        let d = 4;
        let t = brickwork_template(11, 11, d).unwrap();
        let g = t.grid().unwrap();
        let (cone, _) = lightcone(&t, &[g.center()]).unwrap();
        assert!(cone.iter().all(|&q| g.chebyshev(q, g.center()) <= d));
    }

    #[test]
    fn coarse_lightcone_fits_two_tau_square() {
        let (m, tau) = (3, 4);
        let t = coarse_grained_template(m, tau).unwrap();
        let g = t.grid().unwrap();
        for q in 0..t.n() {
            let (cone, _) = lightcone(&t, &[q]).unwrap();
            let rows: Vec<usize> = cone.iter().map(|&c| g.coords(c).0).collect();
            let cols: Vec<usize> = cone.iter().map(|&c| g.coords(c).1).collect();
            assert!(rows.iter().max().unwrap() - rows.iter().min().unwrap() < 2 * tau);
            assert!(cols.iter().max().unwrap() - cols.iter().min().unwrap() < 2 * tau);
        }
    }

    proptest! {
        #[test]
        fn generated_templates_validate(rows in 2usize..9, cols in 2usize..9, d in 0usize..10, m in 2usize..4, half in 1usize..3, sd in 1usize..4) {
            prop_assert!(brickwork_template(rows, cols, d).unwrap().validate().is_ok());
            prop_assert!(coarse_grained_template(m, 2 * half).unwrap().validate().is_ok());
            prop_assert!(compiled_template(m, 2 * half, sd).unwrap().validate().is_ok());
        }

        #[test]
        fn lightcone_is_monotone(a in proptest::collection::vec(0usize..49, 1..4), b in proptest::collection::vec(0usize..49, 1..4), d in 0usize..6) {
            let t = brickwork_template(7, 7, d).unwrap();
            let mut a = a; a.sort(); a.dedup();
            let mut ab: Vec<usize> = a.iter().chain(&b).copied().collect(); ab.sort(); ab.dedup();
            let (ca, _) = lightcone(&t, &a).unwrap();
            let (cab, _) = lightcone(&t, &ab).unwrap();
            prop_assert!(ca.iter().all(|q| cab.contains(q)));
        }
    }
}
