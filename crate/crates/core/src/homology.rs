//! Homology of bigraded complexes over Z, F2 and Q, induced maps and the
//! mod-2 Bockstein.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Ring;
use crate::complexes::{Bigrading, Complex};
use crate::error::{Error, Result};
use crate::jones::Laurent;
use crate::linalg::f2::{BitVec, Echelon, F2Matrix};
use crate::linalg::snf::{invariant_factors, mat_mul, smith_normal_form, to_big, Dense, Invariants};
use crate::linalg::sparse::SparseMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coeffs {
    Z,
    F2,
    Q,
}

/// Free rank, torsion invariant factors and representative cycles
/// (torsion generators first, then free ones) in block coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
    pub reps: Vec<Vec<BigInt>>,
}

impl HomologyGroup {
    pub fn invariants(&self) -> Invariants {
        Invariants { rank: self.rank, torsion: self.torsion.clone() }
    }
}

pub(crate) fn to_f2(m: &SparseMat) -> F2Matrix {
    F2Matrix {
        nrows: m.nrows,
        cols: m.cols.iter().map(|c| BitVec::from_indices(m.nrows, c.iter().filter(|e| e.1 % 2 != 0).map(|e| e.0))).collect(),
    }
}

fn incoming(c: &Complex, b: Bigrading) -> SparseMat {
    c.differential(Bigrading { i: b.i - 1, j: b.j })
}

fn effective(c: &Complex, coeffs: Coeffs) -> Coeffs {
    if c.ring == Ring::Mod2 {
        Coeffs::F2
    } else {
        coeffs
    }
}

/// Homology groups of every bigrading, without representatives.
pub fn homology(c: &Complex, coeffs: Coeffs) -> BTreeMap<Bigrading, Invariants> {
    let coeffs = effective(c, coeffs);
    let blocks: Vec<Bigrading> = c.bigradings().into_iter().collect();
    blocks
        .into_par_iter()
        .map(|b| {
            let dim = c.block(b).len();
            let (dout, din) = (c.differential(b), incoming(c, b));
            let inv = match coeffs {
                Coeffs::F2 => {
                    let r = to_f2(&dout).rank() + to_f2(&din).rank();
                    Invariants { rank: dim - r, torsion: Vec::new() }
                }
                _ => {
                    let o = invariant_factors(&dout);
                    let i = invariant_factors(&din);
                    let torsion = if coeffs == Coeffs::Z { i.torsion } else { Vec::new() };
                    Invariants { rank: dim - o.rank - i.rank, torsion }
                }
            };
            (b, inv)
        })
        .filter(|(_, inv)| inv.rank > 0 || !inv.torsion.is_empty())
        .collect()
}

/// Graded Euler characteristic of homology.
pub fn euler_of(h: &BTreeMap<Bigrading, Invariants>) -> Laurent {
    let mut p = Laurent::default();
    for (b, inv) in h {
        p.add_term(b.j, if b.i % 2 == 0 { inv.rank as i64 } else { -(inv.rank as i64) });
    }
    p
}

/// Integral presentation of homology at one bigrading, with coordinates.
struct ZPresentation {
    group: HomologyGroup,
    /// Rows of `V^{-1}` spanning kernel coordinates.
    kin: Dense,
    /// `U` of the SNF of the incoming map in kernel coordinates.
    u2: Dense,
    /// Generator index in `u2` coordinates and its order (0 = free).
    gens: Vec<(usize, BigInt)>,
}

impl ZPresentation {
    fn new(c: &Complex, b: Bigrading) -> Self {
        let dim = c.block(b).len();
        let dout = c.differential(b);
        let din = incoming(c, b);
        let s1 = smith_normal_form(&to_big(&dout), dim);
        let r = s1.rank();
        let k = dim - r;
        let kin: Dense = s1.v_inv[r..].to_vec();
        let kernel_cols: Dense = s1.v.iter().map(|row| row[r..].to_vec()).collect();
        // incoming image in kernel coordinates
        let a = mat_mul(&kin, &to_big(&din), dim);
        let m = din.ncols();
        let s2 = smith_normal_form(&a, m);
        let mut gens = Vec::new();
        let mut torsion = Vec::new();
        for t in 0..k {
            let d = s2.diag.get(t).cloned().unwrap_or_else(BigInt::zero);
            if d.is_one() {
                continue;
            }
            if !d.is_zero() {
                torsion.push(d.clone());
            }
            gens.push((t, d));
        }
        gens.sort_by_key(|(t, d)| (d.is_zero(), *t));
        let reps = gens
            .iter()
            .map(|&(t, _)| (0..dim).map(|row| (0..k).map(|s| &kernel_cols[row][s] * &s2.u_inv[s][t]).sum()).collect())
            .collect();
        let rank = gens.iter().filter(|g| g.1.is_zero()).count();
        ZPresentation { group: HomologyGroup { rank, torsion, reps }, kin, u2: s2.u, gens }
    }

    /// Coordinates of a cycle; torsion coordinates reduced mod their order.
    fn coords(&self, z: &[BigInt]) -> Vec<BigInt> {
        let y: Vec<BigInt> = self.kin.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect();
        self.gens
            .iter()
            .map(|(t, d)| {
                let w: BigInt = self.u2[*t].iter().zip(&y).map(|(a, b)| a * b).sum();
                if d.is_zero() {
                    w
                } else {
                    w.mod_floor(d)
                }
            })
            .collect()
    }
}

/// F2 presentation at one bigrading.
struct F2Presentation {
    reps: Vec<BitVec>,
    basis: Echelon,
}

impl F2Presentation {
    fn new(c: &Complex, b: Bigrading) -> Self {
        let dim = c.block(b).len();
        let dout = to_f2(&c.differential(b));
        let din = to_f2(&incoming(c, b));
        let kernel: Vec<BitVec> = dout.kernel();
        let mut image = Echelon::new(dim, 0);
        for col in &din.cols {
            image.insert(col.clone(), BitVec::zeros(0));
        }
        let mut reps = Vec::new();
        for z in kernel {
            if image.insert(z.clone(), BitVec::zeros(0)) {
                reps.push(z);
            }
        }
        let mut basis = Echelon::new(dim, reps.len());
        for col in &din.cols {
            basis.insert(col.clone(), BitVec::zeros(reps.len()));
        }
        for (k, z) in reps.iter().enumerate() {
            basis.insert(z.clone(), BitVec::unit(reps.len(), k));
        }
        F2Presentation { reps, basis }
    }

    fn coords(&self, z: &BitVec) -> Result<BitVec> {
        let (res, tag) = self.basis.reduce(z.clone());
        if !res.is_zero() {
            return Err(Error::Internal("vector is not a cycle".into()));
        }
        Ok(tag)
    }
}

/// Homology at one bigrading with representative cycles.
pub fn homology_at(c: &Complex, b: Bigrading, coeffs: Coeffs) -> HomologyGroup {
    match effective(c, coeffs) {
        Coeffs::F2 => {
            let p = F2Presentation::new(c, b);
            let dim = c.block(b).len();
            let reps = p.reps.iter().map(|z| (0..dim).map(|k| BigInt::from(z.get(k) as u8)).collect()).collect();
            HomologyGroup { rank: p.reps.len(), torsion: Vec::new(), reps }
        }
        Coeffs::Z => ZPresentation::new(c, b).group,
        Coeffs::Q => {
            let g = ZPresentation::new(c, b).group;
            let t = g.torsion.len();
            HomologyGroup { rank: g.rank, torsion: Vec::new(), reps: g.reps[t..].to_vec() }
        }
    }
}

/// Check `f: src -> dst` commutes with the differentials and preserves bigradings.
pub fn check_chain_map(f: &SparseMat, src: &Complex, dst: &Complex) -> Result<()> {
    if f.ncols() != src.len() || f.nrows != dst.len() {
        return Err(Error::NotChainMap("dimension mismatch".into()));
    }
    let mod2 = src.ring == Ring::Mod2 || dst.ring == Ring::Mod2;
    let lhs = dst.d.compose(f);
    let rhs = f.compose(&src.d);
    let diff = lhs.add(&rhs.scale(-1));
    let diff = if mod2 { diff.mod2() } else { diff };
    if !diff.is_zero() {
        return Err(Error::NotChainMap("does not commute with the differentials".into()));
    }
    for (r, c, v) in f.entries() {
        if (!mod2 || v % 2 != 0) && src.grading[c] != dst.grading[r] {
            return Err(Error::NotChainMap(format!("moves bigrading {:?} to {:?}", src.grading[c], dst.grading[r])));
        }
    }
    Ok(())
}

/// The map induced on homology at bigrading `b`, in the bases of
/// [`homology_at`]: entry `[t][s]` is the coordinate of the image of
/// source generator `s` along target generator `t`.
pub fn induced_map(f: &SparseMat, src: &Complex, dst: &Complex, b: Bigrading, coeffs: Coeffs) -> Result<Vec<Vec<BigInt>>> {
    check_chain_map(f, src, dst)?;
    let (sb, tb) = (src.block(b), dst.block(b));
    let fb = f.submatrix(&tb, &sb);
    let coeffs = if src.ring == Ring::Mod2 || dst.ring == Ring::Mod2 { Coeffs::F2 } else { coeffs };
    match coeffs {
        Coeffs::F2 => {
            let (ps, pt) = (F2Presentation::new(src, b), F2Presentation::new(dst, b));
            let fm = to_f2(&fb);
            let cols: Vec<BitVec> = ps.reps.iter().map(|z| pt.coords(&fm.apply(z))).collect::<Result<_>>()?;
            Ok((0..pt.reps.len()).map(|t| cols.iter().map(|c| BigInt::from(c.get(t) as u8)).collect()).collect())
        }
        _ => {
            let (ps, pt) = (ZPresentation::new(src, b), ZPresentation::new(dst, b));
            let fd = to_big(&fb);
            let skip_s = if coeffs == Coeffs::Q { ps.group.torsion.len() } else { 0 };
            let skip_t = if coeffs == Coeffs::Q { pt.group.torsion.len() } else { 0 };
            let cols: Vec<Vec<BigInt>> = ps.group.reps[skip_s..]
                .iter()
                .map(|z| {
                    let img: Vec<BigInt> = fd.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect();
                    pt.coords(&img)
                })
                .collect();
            Ok((skip_t..pt.gens.len()).map(|t| cols.iter().map(|c| c[t].clone()).collect()).collect())
        }
    }
}

/// Mod-2 Bockstein `H^{i,j}(C; F2) -> H^{i+1,j}(C; F2)` of an integral
/// complex, as a matrix in the F2 homology bases.
pub fn bockstein(c: &Complex, b: Bigrading) -> Result<Vec<Vec<u8>>> {
    if c.ring == Ring::Mod2 || c.xi.is_some() {
        return Err(Error::Internal("the Bockstein needs an integral even or odd complex".into()));
    }
    let next = Bigrading { i: b.i + 1, j: b.j };
    let mut m2 = c.clone();
    m2.ring = Ring::Mod2;
    m2.d = c.d.mod2();
    let (ps, pt) = (F2Presentation::new(&m2, b), F2Presentation::new(&m2, next));
    let dout = c.differential(b);
    let dim_next = c.block(next).len();
    let cols: Vec<BitVec> = ps
        .reps
        .iter()
        .map(|z| {
            let lift: Vec<(usize, i64)> = z.ones().map(|k| (k, 1)).collect();
            let dz = dout.apply(&lift);
            if dz.iter().any(|e| e.1 % 2 != 0) {
                return Err(Error::Internal("lift is not a mod-2 cycle".into()));
            }
            let half = BitVec::from_indices(dim_next, dz.iter().filter(|e| (e.1 / 2) % 2 != 0).map(|e| e.0));
            pt.coords(&half)
        })
        .collect::<Result<_>>()?;
    Ok((0..pt.reps.len()).map(|t| cols.iter().map(|c| c.get(t) as u8).collect()).collect())
}

/// Ranks and torsion per bigrading for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct BigradingEntry {
    pub i: i64,
    pub j: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub theory: String,
    pub reduced: bool,
    pub bigradings: Vec<BigradingEntry>,
    pub euler: String,
}

pub fn report(c: &Complex, coeffs: Coeffs) -> HomologyReport {
    let h = homology(c, coeffs);
    let bigradings = h
        .iter()
        .map(|(b, inv)| BigradingEntry {
            i: b.i,
            j: b.j,
            rank: inv.rank,
            torsion: inv.torsion.iter().map(|t| t.abs().to_u64().unwrap_or(u64::MAX)).collect(),
        })
        .collect();
    HomologyReport { theory: c.ring.name().to_string(), reduced: c.reduced, bigradings, euler: euler_of(&h).to_string() }
}

/// `rank_F2 H^i = rank_Q H^i + #even(H^i) + #even(H^{i+1})` at every bigrading.
pub fn universal_coefficients_hold(c: &Complex) -> bool {
    let hz = homology(c, Coeffs::Z);
    let hf = homology(c, Coeffs::F2);
    let even = |b: &Bigrading| hz.get(b).map_or(0, |inv| inv.torsion.iter().filter(|t| t.is_even()).count());
    c.bigradings().iter().all(|b| {
        let next = Bigrading { i: b.i + 1, j: b.j };
        let lhs = hf.get(b).map_or(0, |i| i.rank);
        let rhs = hz.get(b).map_or(0, |i| i.rank) + even(b) + even(&next);
        lhs == rhs
    })
}
