//! Dense bit matrices over GF(2).

use crate::bits::{self, words_for};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        Gf2Matrix {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        bits::get(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let wpr = self.wpr;
        bits::set(&mut self.data[r * wpr..(r + 1) * wpr], c, v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.wpr..(r + 1) * self.wpr]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        let wpr = self.wpr;
        &mut self.data[r * wpr..(r + 1) * wpr]
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let wpr = self.wpr;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * wpr);
            (&mut lo[dst * wpr..(dst + 1) * wpr], &hi[..wpr])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * wpr);
            (&mut hi[..wpr], &lo[src * wpr..(src + 1) * wpr])
        };
        bits::xor_into(a, b);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.wpr {
            self.data.swap(a * self.wpr + w, b * self.wpr + w);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut e = SplitEliminator::new(self.wpr, self.wpr);
        for r in 0..self.rows {
            e.insert(self.row(r).to_vec());
        }
        e.rank()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![false; self.cols];
            v[free] = true;
            for (i, &p) in pivots.iter().enumerate() {
                if m.get(i, free) {
                    v[p] = true;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `M v = b`, if one exists.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Gf2Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![false; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = aug.get(i, self.cols);
        }
        Some(v)
    }

    pub fn mul_vec(&self, v: &[bool]) -> Vec<bool> {
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| v[c] && self.get(r, c)).count() % 2 == 1)
            .collect()
    }
}

/// Incremental elimination on rows split into a leading region and a tail.
///
/// Rows are reduced against earlier pivots on the leading words only; a row
/// whose leading region vanishes is a left-kernel element of the leading
/// block, and its tail (the same combination applied to the tail columns) is
/// recorded. Pivot rows remember their last nonzero word so sparse rows stay
/// cheap to apply.
pub struct SplitEliminator {
    lead_words: usize,
    wpr: usize,
    pivot_of: Vec<u32>,
    pivots: Vec<(Vec<u64>, usize)>,
    tails: Vec<Vec<u64>>,
}

impl SplitEliminator {
    pub fn new(lead_words: usize, wpr: usize) -> Self {
        assert!(lead_words <= wpr);
        SplitEliminator {
            lead_words,
            wpr,
            pivot_of: vec![u32::MAX; lead_words * 64],
            pivots: Vec::new(),
            tails: Vec::new(),
        }
    }

    pub fn insert(&mut self, mut row: Vec<u64>) {
        debug_assert_eq!(row.len(), self.wpr);
        let mut w = 0;
        loop {
            while w < self.lead_words && row[w] == 0 {
                w += 1;
            }
            if w == self.lead_words {
                self.tails.push(row[self.lead_words..].to_vec());
                return;
            }
            let col = w * 64 + row[w].trailing_zeros() as usize;
            let p = self.pivot_of[col];
            if p == u32::MAX {
                let end = row.iter().rposition(|&x| x != 0).map_or(0, |e| e + 1);
                self.pivot_of[col] = self.pivots.len() as u32;
                self.pivots.push((row, end));
                return;
            }
            let (prow, end) = &self.pivots[p as usize];
            for k in w..*end {
                row[k] ^= prow[k];
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Tails of the rows that reduced to zero on the leading region; they span
    /// the image of the left kernel in the tail columns.
    pub fn tails(&self) -> &[Vec<u64>] {
        &self.tails
    }

    pub fn kernel_dim(&self) -> usize {
        self.tails.len()
    }
}

/// Rank of a small set of bit-rows (≤ 64 columns each).
pub fn rank_u64(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut v = r;
        while v != 0 {
            let b = v.trailing_zeros() as usize;
            if basis[b] == 0 {
                basis[b] = v;
                rank += 1;
                break;
            }
            v ^= basis[b];
        }
    }
    rank
}

/// All elements of the span of small bit-rows.
pub fn span_u64(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut out = vec![0u64];
    for b in basis {
        let cur = out.clone();
        out.extend(cur.into_iter().map(|x| x ^ b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_rank(rows: &[Vec<bool>]) -> usize {
        // plain Gaussian elimination on Vec<bool> rows
        let mut m: Vec<Vec<bool>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&i| m[i][c]) {
                m.swap(rank, p);
                for i in 0..m.len() {
                    if i != rank && m[i][c] {
                        let pr = m[rank].clone();
                        for (a, b) in m[i].iter_mut().zip(pr) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn small_cases() {
        let m = Gf2Matrix::from_rows(
            3,
            &[
                vec![true, true, false],
                vec![false, true, true],
                vec![true, false, true],
            ],
        );
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k, vec![vec![true, true, true]]);
        assert!(m.solve(&[true, true, false]).is_some());
        assert!(m.solve(&[true, false, false]).is_none());
        assert_eq!(rank_u64(&[0b011, 0b110, 0b101]), 2);
        assert_eq!(span_u64(&[0b011, 0b110, 0b101]).len(), 4);
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in (1usize..12, 1usize..150).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r))) {
            let cols = rows[0].len();
            let m = Gf2Matrix::from_rows(cols, &rows);
            let rank = m.rank();
            prop_assert_eq!(rank, dense_rank(&rows));
            let k = m.kernel();
            prop_assert_eq!(k.len() + rank, cols);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|&b| !b));
            }
        }

        #[test]
        fn split_tails_span_left_kernel_image(rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 70), 1..40)) {
            // lead = first 64 columns, tail = last 6
            let mut e = SplitEliminator::new(1, 2);
            for r in &rows {
                let mut w = vec![0u64; 2];
                for (c, &b) in r.iter().enumerate() {
                    bits::set(&mut w, c, b);
                }
                e.insert(w);
            }
            let lead: Vec<Vec<bool>> = rows.iter().map(|r| r[..64].to_vec()).collect();
            prop_assert_eq!(e.rank(), dense_rank(&lead));
            prop_assert_eq!(e.kernel_dim(), rows.len() - e.rank());
            // tail span dimension = rank(full) - rank(lead)
            let tails: Vec<u64> = e.tails().iter().map(|t| t[0]).collect();
            prop_assert_eq!(rank_u64(&tails), dense_rank(&rows) - dense_rank(&lead));
        }
    }
}
