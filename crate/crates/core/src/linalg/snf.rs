//! Smith normal form over the integers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::sparse::SparseMat;

pub type Dense = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn to_big(m: &SparseMat) -> Dense {
    m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
}

pub fn mat_mul(a: &Dense, b: &Dense, inner: usize) -> Dense {
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// non-negative entries, each dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub nrows: usize,
    pub ncols: usize,
    pub diag: Vec<BigInt>,
    pub u: Dense,
    pub u_inv: Dense,
    pub v: Dense,
    pub v_inv: Dense,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn d_matrix(&self) -> Dense {
        let mut d = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
        for (i, x) in self.diag.iter().enumerate() {
            d[i][i] = x.clone();
        }
        d
    }
}

struct Work {
    a: Dense,
    m: usize,
    n: usize,
    track: bool,
    u: Dense,
    u_inv: Dense,
    v: Dense,
    v_inv: Dense,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            for row in self.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if self.track {
            for row in self.v.iter_mut() {
                row.swap(i, j);
            }
            self.v_inv.swap(i, j);
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let (src, dst) = if i < t {
            let (lo, hi) = self.a.split_at_mut(t);
            (&hi[0], &mut lo[i])
        } else {
            let (lo, hi) = self.a.split_at_mut(i);
            (&lo[t], &mut hi[0])
        };
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            if !s.is_zero() {
                *d -= q * s;
            }
        }
        if self.track {
            let src = self.u[t].clone();
            for (d, s) in self.u[i].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *d -= q * s;
                }
            }
            for row in self.u_inv.iter_mut() {
                if !row[i].is_zero() {
                    let add = q * &row[i];
                    row[t] += add;
                }
            }
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            if !row[t].is_zero() {
                let sub = q * &row[t];
                row[j] -= sub;
            }
        }
        if self.track {
            for row in self.v.iter_mut() {
                if !row[t].is_zero() {
                    let sub = q * &row[t];
                    row[j] -= sub;
                }
            }
            let src = self.v_inv[j].clone();
            for (d, s) in self.v_inv[t].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *d += q * s;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = -&*x;
            }
            for row in self.u_inv.iter_mut() {
                row[i] = -&row[i];
            }
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let k = self.m.min(self.n);
        for t in 0..k {
            let Some((pi, pj)) = self.min_entry(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_sub(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..self.n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_sub(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // move the smallest entry of row/column t into the pivot slot
                    let mut best = (t, t);
                    for i in t + 1..self.m {
                        if !self.a[i][t].is_zero() && self.a[i][t].abs() < self.a[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.n {
                        if !self.a[t][j].is_zero() && self.a[t][j].abs() < self.a[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // divisibility of the remaining block
                let p = self.a[t][t].clone();
                let bad = (t + 1..self.m)
                    .find(|&i| (t + 1..self.n).any(|j| !(&self.a[i][j] % &p).is_zero()));
                match bad {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        self.row_sub(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn run_snf(a: Dense, m: usize, n: usize, track: bool) -> Work {
    let (u, u_inv, v, v_inv) = if track {
        (identity(m), identity(m), identity(n), identity(n))
    } else {
        (Vec::new(), Vec::new(), Vec::new(), Vec::new())
    };
    let mut w = Work { a, m, n, track, u, u_inv, v, v_inv };
    w.run();
    w
}

/// Full Smith normal form with transformation matrices.
pub fn smith_normal_form(a: &Dense, ncols: usize) -> Snf {
    let m = a.len();
    let n = ncols;
    let w = run_snf(a.clone(), m, n, true);
    let diag = (0..m.min(n)).map(|i| w.a[i][i].clone()).collect();
    Snf { nrows: m, ncols: n, diag, u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv }
}

/// Rank and the invariant factors greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Invariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Invariant factors of a sparse matrix. Unit pivots are eliminated
/// sparsely first; the remaining block goes through dense SNF.
pub fn invariant_factors(mat: &SparseMat) -> Invariants {
    let mut cols: Vec<BTreeMap<usize, i64>> = mat.cols.iter().map(|c| c.iter().copied().collect()).collect();
    let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mat.nrows];
    for (c, col) in cols.iter().enumerate() {
        for &r in col.keys() {
            rows[r].insert(c);
        }
    }
    let mut alive_cols: BTreeSet<usize> = (0..cols.len()).filter(|&c| !cols[c].is_empty()).collect();
    let mut rank = 0;
    let mut overflow = false;
    'outer: loop {
        // cheapest unit pivot by Markowitz count
        let mut best: Option<(usize, usize, usize)> = None;
        for &c in &alive_cols {
            for (&r, &v) in &cols[c] {
                if v.abs() == 1 {
                    let cost = (cols[c].len() - 1) * (rows[r].len() - 1);
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, r, c));
                        if cost == 0 {
                            break;
                        }
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        rank += 1;
        let pivot_col = std::mem::take(&mut cols[pc]);
        alive_cols.remove(&pc);
        for &r in pivot_col.keys() {
            rows[r].remove(&pc);
        }
        let pv = pivot_col[&pr];
        let others: Vec<usize> = rows[pr].iter().copied().collect();
        for c in others {
            // col_c -= (a[pr][c] / pv) * pivot_col
            let f = cols[c][&pr] * pv;
            for (&r, &v) in &pivot_col {
                let e = cols[c].entry(r).or_insert(0);
                let Some(nv) = v.checked_mul(f).and_then(|x| e.checked_sub(x)) else {
                    overflow = true;
                    break 'outer;
                };
                *e = nv;
                if nv == 0 {
                    cols[c].remove(&r);
                    rows[r].remove(&c);
                } else {
                    rows[r].insert(c);
                }
            }
            if cols[c].is_empty() {
                alive_cols.remove(&c);
            }
        }
    }
    if overflow {
        let w = run_snf(to_big(mat), mat.nrows, mat.ncols(), false);
        return collect_invariants(&w, 0);
    }
    let rem_cols: Vec<usize> = alive_cols.into_iter().collect();
    if rem_cols.is_empty() {
        return Invariants { rank, torsion: Vec::new() };
    }
    let rem_rows: Vec<usize> = (0..mat.nrows).filter(|&r| !rows[r].is_empty()).collect();
    let mut row_pos = vec![usize::MAX; mat.nrows];
    for (k, &r) in rem_rows.iter().enumerate() {
        row_pos[r] = k;
    }
    let mut dense = vec![vec![BigInt::zero(); rem_cols.len()]; rem_rows.len()];
    for (k, &c) in rem_cols.iter().enumerate() {
        for (&r, &v) in &cols[c] {
            dense[row_pos[r]][k] = BigInt::from(v);
        }
    }
    let w = run_snf(dense, rem_rows.len(), rem_cols.len(), false);
    collect_invariants(&w, rank)
}

fn collect_invariants(w: &Work, base_rank: usize) -> Invariants {
    let mut inv = Invariants { rank: base_rank, torsion: Vec::new() };
    for i in 0..w.m.min(w.n) {
        let d = &w.a[i][i];
        if !d.is_zero() {
            inv.rank += 1;
            if !d.is_one() {
                inv.torsion.push(d.clone());
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> Dense {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(a: &Dense, n: usize) -> Snf {
        let s = smith_normal_form(a, n);
        let m = a.len();
        let uav = mat_mul(&mat_mul(&s.u, a, m), &s.v, n);
        assert_eq!(uav, s.d_matrix());
        assert_eq!(mat_mul(&s.u, &s.u_inv, m), identity(m));
        assert_eq!(mat_mul(&s.v, &s.v_inv, n), identity(n));
        for w in s.diag.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        s
    }

    #[test]
    fn examples() {
        let s = check(&big(&[vec![2, 0], vec![0, 3]]), 2);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
        let s = check(&big(&[vec![0, 0], vec![0, 0]]), 2);
        assert_eq!(s.rank(), 0);
        let s = check(&big(&[vec![1, 1], vec![1, 1]]), 2);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn sparse_invariants_match() {
        let m = SparseMat::from_dense(&[vec![2, 0, 1], vec![0, 3, 0], vec![4, 0, 2]]);
        let inv = invariant_factors(&m);
        assert_eq!(inv, Invariants { rank: 2, torsion: vec![BigInt::from(3)] });
        let m = SparseMat::from_dense(&[vec![2, 4], vec![6, 8]]);
        let inv = invariant_factors(&m);
        assert_eq!(inv, Invariants { rank: 2, torsion: vec![BigInt::from(2), BigInt::from(4)] });
    }

    proptest! {
        #[test]
        fn snf_random(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-4i64..5, 25)) {
            let a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            let s = check(&big(&a), cols);
            let inv = invariant_factors(&SparseMat::from_dense(&a));
            prop_assert_eq!(inv.rank, s.rank());
            let tors: Vec<BigInt> = s.diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
            prop_assert_eq!(inv.torsion, tors);
        }
    }
}
