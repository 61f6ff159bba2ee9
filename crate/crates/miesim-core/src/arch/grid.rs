use crate::error::{Error, Result};

/// Row-major square-lattice layout: qubit `(r, c)` has index `r * cols + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridGeometry {
    pub rows: usize,
    pub cols: usize,
}

impl GridGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "degenerate grid {rows}x{cols}"
            )));
        }
        Ok(GridGeometry { rows, cols })
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn n(&self) -> usize {
        self.rows * self.cols
    }

    pub fn index(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn center(&self) -> usize {
        self.index(self.rows / 2, self.cols / 2)
    }

    /// Qubits within Chebyshev distance `radius` of `q`, clipped at the edges.
    pub fn square_around(&self, q: usize, radius: usize) -> Vec<usize> {
        let (r, c) = self.coords(q);
        let (r0, r1) = (r.saturating_sub(radius), (r + radius).min(self.rows - 1));
        let (c0, c1) = (c.saturating_sub(radius), (c + radius).min(self.cols - 1));
        let mut out = Vec::with_capacity((r1 - r0 + 1) * (c1 - c0 + 1));
        for rr in r0..=r1 {
            for cc in c0..=c1 {
                out.push(self.index(rr, cc));
            }
        }
        out
    }

    pub fn chebyshev(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        ra.abs_diff(rb).max(ca.abs_diff(cb))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    }

    pub fn is_boundary(&self, q: usize) -> bool {
        let (r, c) = self.coords(q);
        r == 0 || c == 0 || r + 1 == self.rows || c + 1 == self.cols
    }
}
