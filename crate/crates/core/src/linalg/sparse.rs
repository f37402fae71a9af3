//! Column-major sparse integer matrices.

use std::collections::BTreeMap;

/// Sparse `nrows x ncols` integer matrix; `cols[c]` lists `(row, value)`
/// sorted by row with no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMat {
    pub nrows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMat { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { nrows: n, cols: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); ncols];
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) out of bounds");
            *acc[c].entry(r).or_insert(0) += v;
        }
        let cols = acc.into_iter().map(|m| m.into_iter().filter(|&(_, v)| v != 0).collect()).collect();
        SparseMat { nrows, cols }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.cols[c].binary_search_by_key(&r, |&(row, _)| row) {
            Ok(k) => self.cols[c][k].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> SparseMat {
        SparseMat::from_triplets(self.ncols(), self.nrows, self.entries().map(|(r, c, v)| (c, r, v)))
    }

    /// Apply to a sparse column vector.
    pub fn apply(&self, v: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(c, x) in v {
            for &(r, y) in &self.cols[c] {
                *acc.entry(r).or_insert(0) += x * y;
            }
        }
        acc.into_iter().filter(|&(_, v)| v != 0).collect()
    }

    /// `self * other`
    pub fn compose(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch in compose");
        SparseMat { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn add(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        SparseMat::from_triplets(self.nrows, self.ncols(), self.entries().chain(other.entries()))
    }

    pub fn scale(&self, s: i64) -> SparseMat {
        SparseMat::from_triplets(self.nrows, self.ncols(), self.entries().map(|(r, c, v)| (r, c, v * s)))
    }

    /// Entries reduced to `{0, 1}`.
    pub fn mod2(&self) -> SparseMat {
        SparseMat::from_triplets(self.nrows, self.ncols(), self.entries().map(|(r, c, v)| (r, c, v.rem_euclid(2))))
    }

    pub fn abs(&self) -> SparseMat {
        SparseMat::from_triplets(self.nrows, self.ncols(), self.entries().map(|(r, c, v)| (r, c, v.abs())))
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMat {
        let mut row_pos = vec![usize::MAX; self.nrows];
        for (k, &r) in rows.iter().enumerate() {
            row_pos[r] = k;
        }
        let cols = cols
            .iter()
            .map(|&c| {
                self.cols[c]
                    .iter()
                    .filter(|&&(r, _)| row_pos[r] != usize::MAX)
                    .map(|&(r, v)| (row_pos[r], v))
                    .collect::<Vec<_>>()
            })
            .map(|mut col| {
                col.sort_unstable();
                col
            })
            .collect();
        SparseMat { nrows: rows.len(), cols }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.ncols()]; self.nrows];
        for (r, c, v) in self.entries() {
            m[r][c] = v;
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> SparseMat {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        SparseMat::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_transpose() {
        let a = SparseMat::from_dense(&[vec![1, 2], vec![0, 3]]);
        let b = SparseMat::from_dense(&[vec![1, 0], vec![-1, 1]]);
        assert_eq!(a.compose(&b).to_dense(), vec![vec![-1, 2], vec![-3, 3]]);
        assert_eq!(a.transpose().to_dense(), vec![vec![1, 0], vec![2, 3]]);
        assert_eq!(a.submatrix(&[1], &[1, 0]).to_dense(), vec![vec![3, 0]]);
    }
}
