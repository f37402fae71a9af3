//! Dense linear algebra over the field with two elements.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        if b {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, o: &BitVec) {
        debug_assert_eq!(self.len, o.len);
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// First set bit at index `>= from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut k = from / 64;
        let mut w = self.words[k] & (u64::MAX << (from % 64));
        loop {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
            k += 1;
            if k >= self.words.len() {
                return None;
            }
            w = self.words[k];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(k * 64 + i)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn dot(&self, o: &BitVec) -> bool {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A matrix over F2 stored by columns; column `c` is the image of basis vector `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    pub nrows: usize,
    pub cols: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        F2Matrix { nrows, cols: vec![BitVec::zeros(nrows); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix { nrows: n, cols: (0..n).map(|i| BitVec::unit(n, i)).collect() }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.nrows);
        for c in v.ones() {
            out.xor_assign(&self.cols[c]);
        }
        out
    }

    /// `self * other`
    pub fn compose(&self, other: &F2Matrix) -> F2Matrix {
        F2Matrix { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn rank(&self) -> usize {
        let mut basis = Echelon::new(self.nrows, 0);
        self.cols.iter().filter(|c| basis.insert((*c).clone(), BitVec::zeros(0))).count()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(BitVec::is_zero)
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<BitVec> {
        let n = self.ncols();
        let mut basis = Echelon::new(self.nrows, n);
        let mut out = Vec::new();
        for (c, col) in self.cols.iter().enumerate() {
            let tag = BitVec::unit(n, c);
            if let Err(combo) = basis.try_insert(col.clone(), tag) {
                out.push(combo);
            }
        }
        out
    }
}

/// Incrementally built echelon basis. Every stored vector carries a tag
/// recording which inserted vectors were combined to produce it.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    tag_len: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
    pivot_of: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(dim: usize, tag_len: usize) -> Self {
        Echelon { dim, tag_len, rows: Vec::new(), pivot_of: vec![None; dim] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduce `v` against the basis; returns the residue and the tag
    /// combination that was subtracted.
    pub fn reduce(&self, mut v: BitVec) -> (BitVec, BitVec) {
        let mut tag = BitVec::zeros(self.tag_len);
        let mut from = 0;
        // a stored row with pivot p has no ones before p, so one forward pass suffices
        while let Some(p) = v.next_one(from) {
            if let Some(r) = self.pivot_of[p] {
                v.xor_assign(&self.rows[r].1);
                tag.xor_assign(&self.rows[r].2);
            }
            from = p + 1;
        }
        (v, tag)
    }

    /// Insert `v` with tag `tag`. Returns `Ok(())` if it increased the rank,
    /// otherwise `Err(tag combination)` of a dependency that sums to zero.
    pub fn try_insert(&mut self, v: BitVec, mut tag: BitVec) -> Result<(), BitVec> {
        let (residue, sub) = self.reduce(v);
        tag.xor_assign(&sub);
        match residue.first_one() {
            None => Err(tag),
            Some(p) => {
                self.pivot_of[p] = Some(self.rows.len());
                self.rows.push((p, residue, tag));
                Ok(())
            }
        }
    }

    pub fn insert(&mut self, v: BitVec, tag: BitVec) -> bool {
        self.try_insert(v, tag).is_ok()
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).0.is_zero()
    }
}

/// Solve the affine system `rows . x = rhs` (each row a bit vector over the
/// variables), choosing pivots at the earliest variables and setting every
/// free variable to zero. Returns `None` if inconsistent.
pub fn solve_affine(nvars: usize, equations: &[(BitVec, bool)]) -> Option<BitVec> {
    // augmented rows: variable bits followed by the right-hand side
    let mut rows: Vec<BitVec> = equations
        .iter()
        .map(|(r, b)| {
            let mut v = BitVec::zeros(nvars + 1);
            for i in r.ones() {
                v.set(i, true);
            }
            v.set(nvars, *b);
            v
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..nvars {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    if rows[next..].iter().any(|r| r.get(nvars)) {
        return None;
    }
    let mut x = BitVec::zeros(nvars);
    for (r, col) in pivots {
        x.set(col, rows[r].get(nvars));
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        // columns: e0, e1, e0+e1
        let m = F2Matrix {
            nrows: 2,
            cols: vec![BitVec::unit(2, 0), BitVec::unit(2, 1), BitVec::from_indices(2, [0, 1])],
        };
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());
    }

    #[test]
    fn affine_solution_prefers_early_pivots() {
        // x0 + x1 + x2 + x3 = 1
        let eq = (BitVec::from_indices(4, [0, 1, 2, 3]), true);
        let x = solve_affine(4, &[eq]).unwrap();
        assert_eq!(x.ones().collect::<Vec<_>>(), vec![0]);
        let bad = [(BitVec::unit(1, 0), true), (BitVec::unit(1, 0), false)];
        assert!(solve_affine(1, &bad).is_none());
    }
}
