//! Even, odd and unified Khovanov chain complexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::algebra::{Monomial, Ring, Zu};
use crate::cube::{self, Vertex};
use crate::diagram::OrientedDiagram;
use crate::error::{Error, Result};
use crate::jones::Laurent;
use crate::linalg::snf::invariant_factors;
use crate::linalg::sparse::SparseMat;
use crate::resolution::Assigned;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Bigrading {
    pub i: i64,
    pub j: i64,
}

/// A Khovanov generator; `xi` marks the second copy in the doubled
/// Z-basis of the unified complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Generator {
    pub vertex: Vertex,
    pub mono: Monomial,
    pub xi: bool,
}

/// A chain complex over Z (or F2 for [`Ring::Mod2`]) with differential of
/// bidegree (1, 0). Generators are sorted by (vertex, monomial, xi).
#[derive(Clone, Debug)]
pub struct Complex {
    pub ring: Ring,
    pub reduced: bool,
    pub gens: Vec<Generator>,
    pub grading: Vec<Bigrading>,
    /// Rows index targets, columns sources.
    pub d: SparseMat,
    /// Action of xi on the doubled basis (unified only).
    pub xi: Option<SparseMat>,
    index: HashMap<Generator, usize>,
}

impl Complex {
    pub fn new(ring: Ring, reduced: bool, gens: Vec<Generator>, grading: Vec<Bigrading>, d: SparseMat) -> Self {
        let index = gens.iter().enumerate().map(|(k, g)| (*g, k)).collect();
        Complex { ring, reduced, gens, grading, d, xi: None, index }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, g: &Generator) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn bigradings(&self) -> BTreeSet<Bigrading> {
        self.grading.iter().copied().collect()
    }

    pub fn block(&self, b: Bigrading) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.grading[k] == b).collect()
    }

    /// Blocks of every bigrading.
    pub fn blocks(&self) -> BTreeMap<Bigrading, Vec<usize>> {
        let mut out: BTreeMap<Bigrading, Vec<usize>> = BTreeMap::new();
        for (k, &b) in self.grading.iter().enumerate() {
            out.entry(b).or_default().push(k);
        }
        out
    }

    /// Differential out of bigrading `b`.
    pub fn differential(&self, b: Bigrading) -> SparseMat {
        let next = Bigrading { i: b.i + 1, j: b.j };
        self.d.submatrix(&self.block(next), &self.block(b))
    }

    pub fn d_squared(&self) -> SparseMat {
        let dd = self.d.compose(&self.d);
        if self.ring == Ring::Mod2 {
            dd.mod2()
        } else {
            dd
        }
    }

    pub fn is_chain_complex(&self) -> bool {
        self.d_squared().is_zero() && self.d.entries().all(|(r, c, _)| self.grading[r] == Bigrading { i: self.grading[c].i + 1, j: self.grading[c].j })
    }

    /// `sum (-1)^i q^j` over generators; equals the graded Euler
    /// characteristic of the homology.
    pub fn euler(&self) -> Laurent {
        let mut p = Laurent::default();
        for (g, b) in self.gens.iter().zip(&self.grading) {
            if !g.xi {
                p.add_term(b.j, if b.i % 2 == 0 { 1 } else { -1 });
            }
        }
        p
    }
}

/// Bigrading of a generator with `k` circles chosen at vertex `v` of a
/// resolution with `circles` circles.
pub fn bigrading(d: &OrientedDiagram, v: Vertex, circles: usize, k: u32, reduced: bool) -> Bigrading {
    let n = d.n() as i64;
    let nm = d.n_minus() as i64;
    let w = cube::weight(v) as i64;
    let j = circles as i64 - 2 * k as i64 + w + n - 3 * nm + reduced as i64;
    Bigrading { i: w - nm, j }
}

pub fn build_complex(d: &OrientedDiagram, ring: Ring) -> Result<Complex> {
    build_with(d, &Assigned::new(d, None)?, ring, false)
}

pub fn build_reduced(d: &OrientedDiagram, ring: Ring) -> Result<Complex> {
    build_with(d, &Assigned::new(d, None)?, ring, true)
}

/// Assemble the complex from precomputed resolutions and edge assignment.
pub fn build_with(d: &OrientedDiagram, a: &Assigned, ring: Ring, reduced: bool) -> Result<Complex> {
    if reduced && d.basepoint().is_none() {
        return Err(Error::NoBasepoint);
    }
    let res = &a.cube.resolutions;
    let doubled = ring == Ring::Unified;
    let keep = |v: Vertex, m: Monomial| !reduced || m.contains(res[v as usize].len() as u32 - 1);
    let mut gens = Vec::new();
    let mut grading = Vec::new();
    // position of (vertex, mask) in gens, for the non-xi copy
    let mut pos: Vec<Vec<usize>> = Vec::with_capacity(res.len());
    for (v, r) in res.iter().enumerate() {
        let v = v as Vertex;
        let mut row = vec![usize::MAX; 1 << r.len()];
        for m in Monomial::all(r.len() as u32) {
            if !keep(v, m) {
                continue;
            }
            row[m.0 as usize] = gens.len();
            for xi in [false, true].into_iter().take(1 + doubled as usize) {
                gens.push(Generator { vertex: v, mono: m, xi });
                grading.push(bigrading(d, v, r.len(), m.degree(), reduced));
            }
        }
        pos.push(row);
    }
    let mut trip = Vec::new();
    for (k, e) in a.cube.edges.iter().enumerate() {
        let sign = Zu::new(cube::edge_sign(*e), 0) * a.eps(*e);
        let (lo, up) = (&pos[e.lower as usize], &pos[e.upper() as usize]);
        for (c, col) in a.cube.maps[k].cols.iter().enumerate() {
            if lo[c] == usize::MAX {
                continue;
            }
            for &(r, z) in col {
                if up[r] == usize::MAX {
                    return Err(Error::Internal("reduced subcomplex is not preserved".into()));
                }
                let z = (sign * z).specialize(ring);
                let (src, dst) = (lo[c], up[r]);
                if doubled {
                    // z * g = m g + n xi g, z * xi g = n g + m xi g
                    trip.extend([(dst, src, z.m), (dst + 1, src, z.n), (dst, src + 1, z.n), (dst + 1, src + 1, z.m)]);
                } else {
                    trip.push((dst, src, z.m));
                }
            }
        }
    }
    let len = gens.len();
    let mut c = Complex::new(ring, reduced, gens, grading, SparseMat::from_triplets(len, len, trip));
    if doubled {
        c.xi = Some(SparseMat::from_triplets(len, len, (0..len).map(|k| (k ^ 1, k, 1))));
    }
    Ok(c)
}

/// Per-bigrading outcome of a structural check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub per_bigrading: Vec<(Bigrading, bool)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.per_bigrading.iter().all(|p| p.1)
    }
}

/// Even and odd complexes with generators matching the unified one.
fn specializations(d: &OrientedDiagram) -> Result<(Complex, Complex, Complex)> {
    let a = Assigned::new(d, None)?;
    Ok((build_with(d, &a, Ring::Unified, false)?, build_with(d, &a, Ring::Even, false)?, build_with(d, &a, Ring::Odd, false)?))
}

/// Check that `g |-> (g, g)`, `xi g |-> (g, -g)` identifies the unified
/// complex with the pullback of the even and odd complexes over F2.
pub fn unified_pullback_check(d: &OrientedDiagram) -> Result<Report> {
    let (u, e, o) = specializations(d)?;
    let mut per = Vec::new();
    for (b, idx) in u.blocks() {
        let next = Bigrading { i: b.i + 1, j: b.j };
        let du = u.d.submatrix(&u.block(next), &idx);
        let (de, dd) = (e.differential(b), o.differential(b));
        // images of the unified differential under both specializations
        let mut ok = true;
        for (c, col) in du.cols.iter().enumerate().step_by(2) {
            let (ce, co) = (&de.cols[c / 2], &dd.cols[c / 2]);
            let mut fe: BTreeMap<usize, i64> = BTreeMap::new();
            let mut fo: BTreeMap<usize, i64> = BTreeMap::new();
            for &(r, v) in col {
                *fe.entry(r / 2).or_insert(0) += v;
                *fo.entry(r / 2).or_insert(0) += if r % 2 == 0 { v } else { -v };
            }
            fe.retain(|_, v| *v != 0);
            fo.retain(|_, v| *v != 0);
            ok &= fe.into_iter().collect::<Vec<_>>() == *ce && fo.into_iter().collect::<Vec<_>>() == *co;
        }
        // the generator-wise map has determinant -2 with both entries congruent mod 2
        ok &= idx.len() == 2 * e.block(b).len() && idx.len() == 2 * o.block(b).len();
        per.push((b, ok));
    }
    Ok(Report { per_bigrading: per })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SesVariant {
    /// `0 -> Kc_e --(1+xi)--> Kc_u --(xi=-1)--> Kc_o -> 0`
    EvenUnifiedOdd,
    /// `0 -> Kc_o --(1-xi)--> Kc_u --(xi=+1)--> Kc_e -> 0`
    OddUnifiedEven,
}

/// The two maps of a short exact sequence and the exactness report.
pub struct Ses {
    pub first: SparseMat,
    pub second: SparseMat,
    pub report: Report,
}

pub fn ses_even_unified_odd(d: &OrientedDiagram, variant: SesVariant) -> Result<Ses> {
    let (u, e, o) = specializations(d)?;
    let (left, right, s) = match variant {
        SesVariant::EvenUnifiedOdd => (&e, &o, 1),
        SesVariant::OddUnifiedEven => (&o, &e, -1),
    };
    let n = left.len();
    let first = SparseMat::from_triplets(u.len(), n, (0..n).flat_map(|k| [(2 * k, k, 1), (2 * k + 1, k, s)]));
    let second = SparseMat::from_triplets(n, u.len(), (0..n).flat_map(|k| [(k, 2 * k, 1), (k, 2 * k + 1, -s)]));
    let chain1 = u.d.compose(&first) == first.compose(&left.d);
    let chain2 = right.d.compose(&second) == second.compose(&u.d);
    let mut per = Vec::new();
    for (b, idx) in u.blocks() {
        let li = left.block(b);
        let ri = right.block(b);
        let f = first.submatrix(&idx, &li);
        let g = second.submatrix(&ri, &idx);
        let fi = invariant_factors(&f);
        let gi = invariant_factors(&g);
        let ok = chain1
            && chain2
            && g.compose(&f).is_zero()
            && fi.rank == li.len()
            && fi.torsion.is_empty()
            && gi.rank == ri.len()
            && gi.torsion.is_empty()
            && idx.len() == li.len() + ri.len();
        per.push((b, ok));
    }
    Ok(Ses { first, second, report: Report { per_bigrading: per } })
}

/// `Kh_o^{i,j} = Kh~_o^{i,j-1} + Kh~_o^{i,j+1}` as abelian groups for every (i, j).
pub fn odd_splitting_check(d: &OrientedDiagram) -> Result<Report> {
    use crate::homology::{homology, Coeffs};
    let a = Assigned::new(d, None)?;
    let full = homology(&build_with(d, &a, Ring::Odd, false)?, Coeffs::Z);
    let red = homology(&build_with(d, &a, Ring::Odd, true)?, Coeffs::Z);
    let mut keys: BTreeSet<Bigrading> = full.keys().copied().collect();
    for b in red.keys() {
        keys.insert(Bigrading { i: b.i, j: b.j + 1 });
        keys.insert(Bigrading { i: b.i, j: b.j - 1 });
    }
    let per = keys
        .into_iter()
        .map(|b| {
            let get = |m: &BTreeMap<Bigrading, crate::linalg::snf::Invariants>, j: i64| {
                m.get(&Bigrading { i: b.i, j }).cloned().unwrap_or_default()
            };
            let (lo, hi) = (get(&red, b.j - 1), get(&red, b.j + 1));
            let mut torsion = [lo.torsion, hi.torsion].concat();
            torsion.sort();
            let mut lhs = get(&full, b.j);
            lhs.torsion.sort();
            (b, lhs.rank == lo.rank + hi.rank && lhs.torsion == torsion)
        })
        .collect();
    Ok(Report { per_bigrading: per })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, named};
    use crate::jones::unnormalized_jones;

    #[test]
    fn unknot_complex() {
        let c = build_complex(&OrientedDiagram::unknot(), Ring::Odd).unwrap();
        assert_eq!(c.grading, vec![Bigrading { i: 0, j: 1 }, Bigrading { i: 0, j: -1 }]);
        assert!(c.d.is_zero());
        let u = OrientedDiagram::unknot().with_basepoint(Some(1)).unwrap();
        let r = build_reduced(&u, Ring::Odd).unwrap();
        assert_eq!(r.grading, vec![Bigrading { i: 0, j: 0 }]);
        assert_eq!(build_reduced(&OrientedDiagram::unknot(), Ring::Odd).unwrap_err(), Error::NoBasepoint);
    }

    #[test]
    fn d_squared_and_euler() {
        let mut ds: Vec<_> = corpus::NAMED.iter().map(|n| named(n).unwrap()).collect();
        ds.extend(corpus::random_corpus(5, 15, 6));
        for d in ds {
            let jones = unnormalized_jones(&d);
            for ring in [Ring::Even, Ring::Odd, Ring::Unified, Ring::Mod2] {
                let c = build_complex(&d, ring).unwrap();
                assert!(c.is_chain_complex(), "{d} {ring:?}");
                assert_eq!(c.euler(), jones, "{d}");
            }
            let e = build_complex(&d, Ring::Even).unwrap();
            let o = build_complex(&d, Ring::Odd).unwrap();
            assert_eq!(e.d.mod2(), o.d.mod2());
        }
    }

    #[test]
    fn reduced_is_half() {
        let d = named("trefoil_right").unwrap().with_basepoint(Some(1)).unwrap();
        let full = build_complex(&d, Ring::Odd).unwrap();
        let red = build_reduced(&d, Ring::Odd).unwrap();
        assert_eq!(2 * red.len(), full.len());
        assert!(red.is_chain_complex());
    }

    #[test]
    fn pullback_and_ses() {
        for name in ["unknot", "hopf", "trefoil_right", "figure_eight"] {
            let d = named(name).unwrap();
            assert!(unified_pullback_check(&d).unwrap().passed(), "{name}");
            let bp = d.edges().first().copied().or(d.free_loops().first().copied());
            assert!(odd_splitting_check(&d.with_basepoint(bp).unwrap()).unwrap().passed(), "{name}");
            for v in [SesVariant::EvenUnifiedOdd, SesVariant::OddUnifiedEven] {
                assert!(ses_even_unified_odd(&d, v).unwrap().report.passed(), "{name} {v:?}");
            }
        }
    }
}
