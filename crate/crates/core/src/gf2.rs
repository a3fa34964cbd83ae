//! Bit-packed linear algebra over GF(2).
//!
//! The only operation the simulator needs is the rank of the biadjacency
//! matrix between two regions of a graph, which equals the entanglement
//! entropy (in bits) of the corresponding graph state.

use crate::{Error, Result};

const WORD: usize = 64;

/// Dense GF(2) matrix with rows packed into `u64` words.
///
/// Bits past `cols` in the last word of a row are always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of booleans. All rows must have equal length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &bit) in row.iter().enumerate() {
                m.set(i, j, bit);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        let w = self.data[row * self.words_per_row + col / WORD];
        (w >> (col % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        let w = &mut self.data[row * self.words_per_row + col / WORD];
        let mask = 1u64 << (col % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, row: usize, col: usize) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.words_per_row + col / WORD] ^= 1u64 << (col % WORD);
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Packed words of row `r`. Callers must leave bits past `cols` clear.
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        let w = self.words_per_row;
        &mut self.data[r * w..(r + 1) * w]
    }

    pub fn rank(&self) -> usize {
        self.clone().rank_in_place()
    }

    /// Row-reduces the matrix in place and returns its rank. The matrix is
    /// left in row-echelon form.
    pub fn rank_in_place(&mut self) -> usize {
        let wpr = self.words_per_row;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let word = col / WORD;
            let mask = 1u64 << (col % WORD);
            let Some(pivot) = (rank..self.rows).find(|&r| self.data[r * wpr + word] & mask != 0)
            else {
                continue;
            };
            if pivot != rank {
                for k in 0..wpr {
                    self.data.swap(pivot * wpr + k, rank * wpr + k);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * wpr);
            let pivot_row = &head[rank * wpr..];
            for row in tail.chunks_exact_mut(wpr) {
                if row[word] & mask != 0 {
                    // words before `word` are already zero in the pivot row
                    for k in word..wpr {
                        row[k] ^= pivot_row[k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Biadjacency matrix between two disjoint vertex sets: entry `(i, j)` is set
/// iff `region_a[i]` and `region_b[j]` are adjacent.
pub fn biadjacency<N: AsRef<[usize]>>(
    adjacency: &[N],
    region_a: &[usize],
    region_b: &[usize],
) -> Result<BitMatrix> {
    let n = adjacency.len();
    let mut column = vec![usize::MAX; n];
    for (j, &b) in region_b.iter().enumerate() {
        if b >= n {
            return Err(Error::QubitOutOfRange { index: b, len: n });
        }
        column[b] = j;
    }
    let mut m = BitMatrix::zeros(region_a.len(), region_b.len());
    for (i, &a) in region_a.iter().enumerate() {
        if a >= n {
            return Err(Error::QubitOutOfRange { index: a, len: n });
        }
        if column[a] != usize::MAX {
            return Err(Error::OverlappingRegions(a));
        }
        for &nb in adjacency[a].as_ref() {
            let j = column[nb];
            if j != usize::MAX {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

pub fn gf2_rank(m: &BitMatrix) -> usize {
    m.rank()
}
