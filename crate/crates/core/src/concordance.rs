//! The F2 Bar-Natan filtered complex of a knot, the s-invariant and the
//! Bockstein-refined invariants r_±, s_±.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Monomial, Ring};
use crate::complexes::{bigrading, build_complex, Bigrading, Complex, Generator};
use crate::cube::{self, Vertex};
use crate::diagram::OrientedDiagram;
use crate::error::{Error, Result};
use crate::homology::{bockstein, homology_at, to_f2, Coeffs};
use crate::linalg::f2::{BitVec, Echelon, F2Matrix};
use crate::linalg::sparse::SparseMat;
use crate::resolution::{edge_cobordism, resolve, Cobordism};

/// Bar-Natan complex over F2 with generators and gradings of the Khovanov
/// complex; the differential never lowers `j`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub gens: Vec<Generator>,
    pub grading: Vec<Bigrading>,
    pub d: SparseMat,
}

impl FilteredComplex {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degree(&self, i: i64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.grading[k].i == i).collect()
    }

    /// Indices spanning `F_q`.
    pub fn level(&self, q: i64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.grading[k].j >= q).collect()
    }

    /// The part of `d` that preserves `j`.
    pub fn associated_graded(&self) -> SparseMat {
        let t = self.d.entries().filter(|&(r, c, _)| self.grading[r].j == self.grading[c].j);
        SparseMat::from_triplets(self.len(), self.len(), t)
    }

    pub fn is_filtered_complex(&self) -> bool {
        self.d.compose(&self.d).mod2().is_zero()
            && self.d.entries().all(|(r, c, _)| self.grading[r].i == self.grading[c].i + 1 && self.grading[r].j >= self.grading[c].j)
    }

    /// Odd filtration levels from below the support to above it.
    pub fn levels(&self) -> Vec<i64> {
        let lo = self.grading.iter().map(|b| b.j).min().unwrap_or(0);
        let hi = self.grading.iter().map(|b| b.j).max().unwrap_or(0);
        let start = lo - 2 - (lo - 2).rem_euclid(2) + 1;
        (start..=hi + 2).step_by(2).collect()
    }

    fn sub(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        to_f2(&self.d.submatrix(rows, cols))
    }

    /// Total F2 homology dimension.
    pub fn total_dimension(&self) -> usize {
        let degrees: std::collections::BTreeSet<i64> = self.grading.iter().map(|b| b.i).collect();
        degrees
            .into_iter()
            .map(|i| {
                let (prev, here, next) = (self.degree(i - 1), self.degree(i), self.degree(i + 1));
                here.len() - self.sub(&next, &here).rank() - self.sub(&here, &prev).rank()
            })
            .sum()
    }
}

pub fn barnatan_complex(d: &OrientedDiagram) -> Result<FilteredComplex> {
    let comps = d.components();
    if comps != 1 {
        return Err(Error::NotAKnot(comps));
    }
    let n = d.n();
    let res: Vec<_> = (0..1u32 << n).into_par_iter().map(|v| resolve(d, v)).collect();
    let mut gens = Vec::new();
    let mut grading = Vec::new();
    let mut pos: Vec<usize> = Vec::with_capacity(res.len());
    for (v, r) in res.iter().enumerate() {
        pos.push(gens.len());
        for m in Monomial::all(r.len() as u32) {
            gens.push(Generator { vertex: v as Vertex, mono: m, xi: false });
            grading.push(bigrading(d, v as Vertex, r.len(), m.degree(), false));
        }
    }
    let mut trip = Vec::new();
    for e in cube::edges(n) {
        let (lo, up) = (&res[e.lower as usize], &res[e.upper() as usize]);
        let (kind, relabel) = edge_cobordism(d, lo, up, e.coord);
        let touched: Vec<usize> = match kind {
            Cobordism::Merge { a1, a2, .. } => vec![a1, a2],
            Cobordism::Split { from, .. } => vec![from],
        };
        for m in Monomial::all(lo.len() as u32) {
            let mut base = Monomial::EMPTY;
            for c in m.ids().filter(|c| !touched.contains(&(*c as usize))) {
                base = base.with(relabel[c as usize]);
            }
            // a set bit is the class x; x^2 = x and Delta(1) = 1x + x1 + 11
            let images = match kind {
                Cobordism::Merge { a1, a2, into } => {
                    vec![if m.contains(a1 as u32) || m.contains(a2 as u32) { base.with(into as u32) } else { base }]
                }
                Cobordism::Split { from, tail, head } => {
                    let (t, h) = (tail as u32, head as u32);
                    if m.contains(from as u32) {
                        vec![base.with(t).with(h)]
                    } else {
                        vec![base.with(h), base.with(t), base]
                    }
                }
            };
            let src = pos[e.lower as usize] + m.0 as usize;
            trip.extend(images.into_iter().map(|img| (pos[e.upper() as usize] + img.0 as usize, src, 1)));
        }
    }
    let len = gens.len();
    Ok(FilteredComplex { gens, grading, d: SparseMat::from_triplets(len, len, trip) })
}

/// Degree-zero homology data shared by the s and alpha computations.
struct DegreeZero<'a> {
    f: &'a FilteredComplex,
    c0: Vec<usize>,
    local: HashMap<usize, usize>,
    d0: F2Matrix,
    boundaries: Echelon,
}

impl<'a> DegreeZero<'a> {
    fn new(f: &'a FilteredComplex) -> Self {
        let (cm, c0, c1) = (f.degree(-1), f.degree(0), f.degree(1));
        let local = c0.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let d0 = f.sub(&c1, &c0);
        let mut boundaries = Echelon::new(c0.len(), 0);
        for col in f.sub(&c0, &cm).cols {
            boundaries.insert(col, BitVec::zeros(0));
        }
        DegreeZero { f, c0, local, d0, boundaries }
    }

    /// Basis of degree-zero cycles lying in `F_q`.
    fn cycles(&self, q: i64) -> Vec<BitVec> {
        let keep: Vec<usize> = (0..self.c0.len()).filter(|&k| self.f.grading[self.c0[k]].j >= q).collect();
        let m = F2Matrix { nrows: self.d0.nrows, cols: keep.iter().map(|&k| self.d0.cols[k].clone()).collect() };
        m.kernel().into_iter().map(|z| BitVec::from_indices(self.c0.len(), z.ones().map(|t| keep[t]))).collect()
    }

    /// Dimension of the image of `span(vs)` in `H^0` of the whole complex.
    fn image_dim(&self, vs: &[BitVec]) -> usize {
        let mut e = self.boundaries.clone();
        vs.iter().filter(|v| e.insert((*v).clone(), BitVec::zeros(0))).count()
    }

    fn total(&self) -> usize {
        self.c0.len() - self.d0.rank() - self.boundaries.rank()
    }

    /// Part of `v` in quantum grading exactly `q`.
    fn top(&self, v: &BitVec, q: i64) -> BitVec {
        BitVec::from_indices(v.len(), v.ones().filter(|&k| self.f.grading[self.c0[k]].j == q))
    }
}

/// Both formulas for s: the largest surjective level plus one and the
/// largest nonzero level minus one.
pub fn s_formulas(d: &OrientedDiagram) -> Result<(i64, i64)> {
    let f = barnatan_complex(d)?;
    let h = DegreeZero::new(&f);
    if h.total() != 2 || f.total_dimension() != 2 {
        return Err(Error::Internal(format!("Bar-Natan homology has dimension {}", f.total_dimension())));
    }
    let dims: Vec<(i64, usize)> = f.levels().into_par_iter().map(|q| (q, h.image_dim(&h.cycles(q)))).collect();
    let surj = dims.iter().filter(|p| p.1 == 2).map(|p| p.0).max().unwrap();
    let nonzero = dims.iter().filter(|p| p.1 > 0).map(|p| p.0).max().unwrap();
    Ok((surj + 1, nonzero - 1))
}

pub fn s_invariant(d: &OrientedDiagram) -> Result<i64> {
    let (a, b) = s_formulas(d)?;
    if a != b {
        return Err(Error::Internal(format!("s formulas disagree: {a} vs {b}")));
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    BocksteinEven,
    BocksteinOdd,
}

impl Alpha {
    pub fn ring(self) -> Ring {
        match self {
            Alpha::BocksteinEven => Ring::Even,
            Alpha::BocksteinOdd => Ring::Odd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaInvariants {
    pub r_plus: i64,
    pub s_plus: i64,
    pub r_minus: i64,
    pub s_minus: i64,
}

/// Per level `q`: whether it is alpha-half full and alpha-full.
pub fn fullness(d: &OrientedDiagram, alpha: Alpha) -> Result<Vec<(i64, bool, bool)>> {
    let f = barnatan_complex(d)?;
    let c = build_complex(d, alpha.ring())?;
    if c.gens != f.gens {
        return Err(Error::Internal("generator orders differ".into()));
    }
    let mut m2: Complex = c.clone();
    m2.ring = Ring::Mod2;
    m2.d = c.d.mod2();
    let h = DegreeZero::new(&f);
    f.levels()
        .into_par_iter()
        .map(|q| {
            let (src, dst) = (Bigrading { i: -1, j: q }, Bigrading { i: 0, j: q });
            let (sb, tb) = (c.block(src), c.block(dst));
            let to_local = |block_vec: &[usize]| BitVec::from_indices(h.c0.len(), block_vec.iter().map(|k| h.local[&tb[*k]]));
            // boundaries of the associated graded plus the image of alpha
            let mut w = Echelon::new(h.c0.len(), 0);
            for col in to_f2(&m2.d.submatrix(&tb, &sb)).cols {
                w.insert(to_local(&col.ones().collect::<Vec<_>>()), BitVec::zeros(0));
            }
            if !sb.is_empty() && !tb.is_empty() {
                let beta = bockstein(&c, src)?;
                let reps = homology_at(&m2, dst, Coeffs::F2).reps;
                for s in 0..beta.first().map_or(0, |r| r.len()) {
                    let mut v = BitVec::zeros(h.c0.len());
                    for (t, rep) in reps.iter().enumerate() {
                        if beta[t][s] == 1 {
                            let support: Vec<usize> = (0..rep.len()).filter(|&k| rep[k] != 0.into()).collect();
                            v.xor_assign(&to_local(&support));
                        }
                    }
                    w.insert(v, BitVec::zeros(0));
                }
            }
            // cycles of F_q whose top part lies in w
            let zs = h.cycles(q);
            let mut residues = Echelon::new(h.c0.len(), zs.len());
            let mut good = Vec::new();
            for (k, z) in zs.iter().enumerate() {
                let r = w.reduce(h.top(z, q)).0;
                if let Err(tag) = residues.try_insert(r, BitVec::unit(zs.len(), k)) {
                    let mut v = BitVec::zeros(h.c0.len());
                    for t in tag.ones() {
                        v.xor_assign(&zs[t]);
                    }
                    good.push(v);
                }
            }
            let dim = h.image_dim(&good);
            Ok((q, dim >= 1, dim == 2))
        })
        .collect()
}

/// `(r_+, s_+)` of the diagram.
pub fn alpha_plus(d: &OrientedDiagram, alpha: Alpha) -> Result<(i64, i64)> {
    let levels = fullness(d, alpha)?;
    let half = levels.iter().filter(|l| l.1).map(|l| l.0).max();
    let full = levels.iter().filter(|l| l.2).map(|l| l.0).max();
    match (half, full) {
        (Some(h), Some(f)) => Ok((h + 1, f + 3)),
        _ => Err(Error::Internal("no full level".into())),
    }
}

pub fn alpha_invariants(d: &OrientedDiagram, alpha: Alpha) -> Result<AlphaInvariants> {
    let (r_plus, s_plus) = alpha_plus(d, alpha)?;
    let (rm, sm) = alpha_plus(&d.mirror(), alpha)?;
    Ok(AlphaInvariants { r_plus, s_plus, r_minus: -rm, s_minus: -sm })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcordanceReport {
    pub s: i64,
    pub r_plus: i64,
    pub s_plus: i64,
    pub r_minus: i64,
    pub s_minus: i64,
    pub alpha: Alpha,
}

pub fn report(d: &OrientedDiagram, alpha: Alpha) -> Result<ConcordanceReport> {
    let s = s_invariant(d)?;
    let a = alpha_invariants(d, alpha)?;
    Ok(ConcordanceReport { s, r_plus: a.r_plus, s_plus: a.s_plus, r_minus: a.r_minus, s_minus: a.s_minus, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{named, random_corpus};

    fn knots() -> Vec<OrientedDiagram> {
        let mut v: Vec<_> = ["unknot", "kinked_unknot", "trefoil_right", "trefoil_left", "figure_eight", "cinquefoil", "three_twist"]
            .iter()
            .map(|n| named(n).unwrap())
            .collect();
        v.extend(random_corpus(5, 30, 6).into_iter().filter(|d| d.components() == 1));
        v
    }

    #[test]
    fn filtration_and_graded_piece() {
        for d in knots() {
            let f = barnatan_complex(&d).unwrap();
            assert!(f.is_filtered_complex());
            let kh = build_complex(&d, Ring::Mod2).unwrap();
            assert_eq!(kh.gens, f.gens);
            assert_eq!(f.associated_graded().mod2(), kh.d.mod2(), "{d}");
            assert_eq!(f.total_dimension(), 2, "{d}");
        }
    }

    #[test]
    fn rejects_links() {
        assert_eq!(barnatan_complex(&named("hopf").unwrap()).unwrap_err(), Error::NotAKnot(2));
    }

    #[test]
    fn s_values() {
        assert_eq!(s_invariant(&named("unknot").unwrap()), Ok(0));
        assert_eq!(s_invariant(&named("kinked_unknot").unwrap()), Ok(0));
        assert_eq!(s_invariant(&named("trefoil_right").unwrap()), Ok(2));
        assert_eq!(s_invariant(&named("trefoil_left").unwrap()), Ok(-2));
        assert_eq!(s_invariant(&named("figure_eight").unwrap()), Ok(0));
        assert_eq!(s_invariant(&named("cinquefoil").unwrap()), Ok(4));
    }

    #[test]
    fn s_mirror() {
        for d in knots() {
            let s = s_invariant(&d).unwrap();
            assert_eq!(s_invariant(&d.mirror()).unwrap(), -s, "{d}");
            assert_eq!(s % 2, 0);
        }
    }

    #[test]
    fn alpha_unknot_and_trefoil() {
        for a in [Alpha::BocksteinEven, Alpha::BocksteinOdd] {
            let u = alpha_invariants(&named("unknot").unwrap(), a).unwrap();
            assert_eq!(u, AlphaInvariants { r_plus: 0, s_plus: 0, r_minus: 0, s_minus: 0 });
            for k in ["trefoil_right", "trefoil_left"] {
                let t = alpha_invariants(&named(k).unwrap(), a).unwrap();
                for v in [t.r_plus, t.s_plus, t.r_minus, t.s_minus] {
                    assert!(v.abs() <= 2, "{k} {t:?}");
                }
            }
        }
    }

    #[test]
    fn alpha_mirror_duality() {
        let d = named("trefoil_right").unwrap();
        let a = alpha_invariants(&d, Alpha::BocksteinOdd).unwrap();
        let m = alpha_invariants(&d.mirror(), Alpha::BocksteinOdd).unwrap();
        assert_eq!((a.r_minus, a.s_minus), (-m.r_plus, -m.s_plus));
    }
}
