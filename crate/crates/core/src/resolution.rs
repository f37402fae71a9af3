//! Complete resolutions, the unified edge maps between them, face types and
//! edge assignments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::algebra::{merge, split, AlgebraElement, Monomial, Ring, Zu};
use crate::cube::{self, Cochain, Edge, PartialCochain, Square, Vertex};
use crate::diagram::{Label, OrientedDiagram};
use crate::error::{Error, Result};

/// A circle of a resolution as the cyclic list of edge labels it runs through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub labels: Vec<Label>,
}

impl Circle {
    pub fn min_label(&self) -> Label {
        *self.labels.iter().min().unwrap()
    }
}

/// Arc at a crossing; endpoints are `(circle id, position on the circle)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirectedArc {
    pub crossing: usize,
    pub tail: (usize, usize),
    pub head: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub vertex: Vertex,
    pub circles: Vec<Circle>,
    pub arcs: Vec<DirectedArc>,
    circle_of: BTreeMap<Label, usize>,
}

impl Resolution {
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Circle through edge `l`.
    pub fn circle_of(&self, l: Label) -> usize {
        self.circle_of[&l]
    }

    pub fn try_circle_of(&self, l: Label) -> Option<usize> {
        self.circle_of.get(&l).copied()
    }

    fn position(&self, l: Label) -> (usize, usize) {
        let c = self.circle_of(l);
        (c, self.circles[c].labels.iter().position(|&x| x == l).unwrap())
    }
}

fn partner(leg: usize, bit: bool) -> usize {
    if bit {
        3 - leg
    } else {
        leg ^ 1
    }
}

/// Legs of the strand through leg 0 and of the other strand after smoothing.
fn strands(bit: bool) -> ([usize; 2], [usize; 2]) {
    if bit {
        ([0, 3], [1, 2])
    } else {
        ([0, 1], [2, 3])
    }
}

pub fn resolve(d: &OrientedDiagram, v: Vertex) -> Resolution {
    let planar = d.planar();
    let occ = planar.occurrences();
    let bit = |x: usize| v & (1 << x) != 0;
    let mut circles: Vec<Circle> = Vec::new();
    let mut seen: BTreeMap<Label, ()> = BTreeMap::new();
    for (&l0, o) in &occ {
        if seen.contains_key(&l0) {
            continue;
        }
        let mut labels = vec![l0];
        seen.insert(l0, ());
        let mut at = o[1];
        loop {
            let q = partner(at.1, bit(at.0));
            let l = planar.tuples[at.0][q];
            if l == l0 {
                break;
            }
            labels.push(l);
            seen.insert(l, ());
            let os = &occ[&l];
            at = if os[0] == (at.0, q) { os[1] } else { os[0] };
        }
        circles.push(Circle { labels });
    }
    circles.extend(planar.free_loops.iter().map(|&u| Circle { labels: vec![u] }));
    circles.sort_by_key(|c| c.min_label());
    if let Some(b) = d.basepoint() {
        let k = circles.iter().position(|c| c.labels.contains(&b)).unwrap();
        let c = circles.remove(k);
        circles.push(c);
    }
    let mut circle_of = BTreeMap::new();
    for (i, c) in circles.iter().enumerate() {
        for &l in &c.labels {
            circle_of.insert(l, i);
        }
    }
    let mut res = Resolution { vertex: v, circles, arcs: Vec::new(), circle_of };
    for (x, t) in planar.tuples.iter().enumerate() {
        let (s0, s1) = strands(bit(x));
        let (tl, hl) = if d.arrows()[x] { (t[s0[0]], t[s1[0]]) } else { (t[s1[0]], t[s0[0]]) };
        res.arcs.push(DirectedArc { crossing: x, tail: res.position(tl), head: res.position(hl) });
    }
    res
}

/// Line-oriented listing of a resolution; crossings are 1-based.
pub fn debug_listing(r: &Resolution) -> String {
    let mut s = String::new();
    for (i, c) in r.circles.iter().enumerate() {
        let ls: Vec<String> = c.labels.iter().map(|l| l.to_string()).collect();
        writeln!(s, "circle {i}: {}", ls.join(" ")).unwrap();
    }
    for a in &r.arcs {
        writeln!(s, "arc {}: {}@{} -> {}@{}", a.crossing + 1, a.tail.0, a.tail.1, a.head.0, a.head.1).unwrap();
    }
    s
}

/// Sparse matrix over `Z_u` (or a specialization), stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZuMatrix {
    pub nrows: usize,
    pub cols: Vec<Vec<(usize, Zu)>>,
}

impl ZuMatrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Zu {
        self.cols[c].iter().find(|e| e.0 == r).map_or(Zu::ZERO, |e| e.1)
    }

    fn column_from(acc: BTreeMap<usize, Zu>) -> Vec<(usize, Zu)> {
        acc.into_iter().filter(|(_, z)| !z.is_zero()).collect()
    }

    /// `self * other`.
    pub fn compose(&self, other: &ZuMatrix) -> ZuMatrix {
        assert_eq!(self.ncols(), other.nrows);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc = BTreeMap::new();
                for &(k, a) in col {
                    for &(r, b) in &self.cols[k] {
                        *acc.entry(r).or_insert(Zu::ZERO) += b * a;
                    }
                }
                Self::column_from(acc)
            })
            .collect();
        ZuMatrix { nrows: self.nrows, cols }
    }

    pub fn scale(&self, c: Zu) -> ZuMatrix {
        let cols = self.cols.iter().map(|col| col.iter().map(|&(r, z)| (r, z * c)).filter(|e| !e.1.is_zero()).collect()).collect();
        ZuMatrix { nrows: self.nrows, cols }
    }

    pub fn specialize(&self, ring: Ring) -> ZuMatrix {
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|&(r, z)| (r, z.specialize(ring))).filter(|e| !e.1.is_zero()).collect())
            .collect();
        ZuMatrix { nrows: self.nrows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }
}

/// Merge or split along an edge, from the lower to the upper resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cobordism {
    Merge { a1: usize, a2: usize, into: usize },
    Split { from: usize, tail: usize, head: usize },
}

/// The elementary cobordism along the edge `lower -> lower + e_coord`
/// and the induced identification of the untouched circles.
pub fn edge_cobordism(d: &OrientedDiagram, lower: &Resolution, upper: &Resolution, coord: usize) -> (Cobordism, Vec<u32>) {
    let t = d.tuples()[coord];
    let relabel: Vec<u32> = lower.circles.iter().map(|c| upper.circle_of(c.labels[0]) as u32).collect();
    let (a, b) = (lower.circle_of(t[0]), lower.circle_of(t[2]));
    let kind = if a != b {
        Cobordism::Merge { a1: a.min(b), a2: a.max(b), into: upper.circle_of(t[0]) }
    } else {
        let (tl, hl) = if d.arrows()[coord] { (t[0], t[1]) } else { (t[1], t[0]) };
        Cobordism::Split { from: a, tail: upper.circle_of(tl), head: upper.circle_of(hl) }
    };
    (kind, relabel)
}

/// The unified map `Lambda(Z(L_lower)) -> Lambda(Z(L_upper))` on Khovanov
/// generators; monomial masks index rows and columns.
pub fn edge_map(d: &OrientedDiagram, lower: &Resolution, upper: &Resolution, coord: usize) -> ZuMatrix {
    let (kind, relabel) = edge_cobordism(d, lower, upper, coord);
    let ring = Ring::Unified;
    let cols = Monomial::all(lower.len() as u32)
        .map(|m| {
            let x = AlgebraElement::monomial(m, Zu::ONE, ring);
            let img = match kind {
                Cobordism::Merge { .. } => merge(&x, &relabel),
                Cobordism::Split { from, tail, head } => split(&x, from as u32, tail as u32, head as u32, &relabel, tail as u32),
            };
            img.terms.into_iter().map(|(m, z)| (m.0 as usize, z)).collect()
        })
        .collect();
    ZuMatrix { nrows: 1 << upper.len(), cols }
}

/// Matrix of the edge map from `v` to `u` (`u` covers `v`) over `ring`;
/// rows are indexed by `Kg(u)` and columns by `Kg(v)`.
pub fn edge_matrix_raw(d: &OrientedDiagram, u: Vertex, v: Vertex, ring: Ring) -> Result<ZuMatrix> {
    cube::standard_sign(u, v)?;
    let coord = (u ^ v).trailing_zeros() as usize;
    Ok(edge_map(d, &resolve(d, v), &resolve(d, u), coord).specialize(ring))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum FaceType {
    C,
    A,
    X,
    Y,
}

/// All resolutions and unified edge maps of a diagram.
pub struct ResolvedCube {
    pub n: usize,
    pub resolutions: Vec<Resolution>,
    /// Indexed like [`cube::edges`].
    pub edges: Vec<Edge>,
    pub maps: Vec<ZuMatrix>,
    edge_index: std::collections::HashMap<Edge, usize>,
    diagram: OrientedDiagram,
}

impl ResolvedCube {
    pub fn new(d: &OrientedDiagram) -> Self {
        let n = d.n();
        let resolutions: Vec<Resolution> = (0..1u32 << n).into_par_iter().map(|v| resolve(d, v)).collect();
        let edges = cube::edges(n);
        let maps = edges
            .par_iter()
            .map(|e| edge_map(d, &resolutions[e.lower as usize], &resolutions[e.upper() as usize], e.coord))
            .collect();
        let edge_index = cube::edge_index(n);
        ResolvedCube { n, resolutions, edges, maps, edge_index, diagram: d.clone() }
    }

    pub fn map(&self, e: Edge) -> &ZuMatrix {
        &self.maps[self.edge_index[&e]]
    }

    pub fn edge_id(&self, e: Edge) -> usize {
        self.edge_index[&e]
    }

    pub fn classify(&self, s: Square) -> Result<FaceType> {
        let [e1, e2, e3, e4] = s.edges();
        let p = self.map(e2).compose(self.map(e1));
        let q = self.map(e4).compose(self.map(e3));
        let plain = p == q;
        let twisted = p == q.scale(Zu::XI);
        match (plain, twisted) {
            (true, false) => Ok(FaceType::C),
            (false, true) => Ok(FaceType::A),
            (true, true) => ladybug_type(&self.diagram, &self.resolutions[s.lower as usize], s),
            (false, false) => Err(Error::Unclassifiable { bottom: s.lower, i: s.i, j: s.j }),
        }
    }

    pub fn face_types(&self) -> Result<Vec<FaceType>> {
        cube::squares(self.n).into_par_iter().map(|s| self.classify(s)).collect()
    }
}

pub fn classify_face(d: &OrientedDiagram, s: Square) -> Result<FaceType> {
    let [e1, e2, e3, e4] = s.edges();
    let r = |v: Vertex| resolve(d, v);
    let m = |e: Edge| edge_map(d, &r(e.lower), &r(e.upper()), e.coord);
    let p = m(e2).compose(&m(e1));
    let q = m(e4).compose(&m(e3));
    match (p == q, p == q.scale(Zu::XI)) {
        (true, false) => Ok(FaceType::C),
        (false, true) => Ok(FaceType::A),
        (true, true) => ladybug_type(d, &r(s.lower), s),
        (false, false) => Err(Error::Unclassifiable { bottom: s.lower, i: s.i, j: s.j }),
    }
}

/// Crossing, entry leg and exit leg of each passage along the circle through `l0`.
fn walk(d: &OrientedDiagram, v: Vertex, l0: Label) -> Vec<(usize, usize, usize)> {
    let planar = d.planar();
    let occ = planar.occurrences();
    let mut out = Vec::new();
    let mut at = occ[&l0][1];
    loop {
        let q = partner(at.1, v & (1 << at.0) != 0);
        out.push((at.0, at.1, q));
        let l = planar.tuples[at.0][q];
        if l == l0 {
            return out;
        }
        let os = &occ[&l];
        at = if os[0] == (at.0, q) { os[1] } else { os[0] };
    }
}

/// X or Y for a ladybug at the bottom of `s`. Orient the circle so the arc at
/// `s.i` lies on its left; starting from that arc's tail, the face is X when
/// the other arc's tail comes next.
fn ladybug_type(d: &OrientedDiagram, r: &Resolution, s: Square) -> Result<FaceType> {
    let bad = Error::Unclassifiable { bottom: s.lower, i: s.i, j: s.j };
    let t = d.tuples()[s.i];
    let z = r.circle_of(t[0]);
    if [t[1], t[2], t[3]].iter().chain(d.tuples()[s.j].iter()).any(|&l| r.circle_of(l) != z) {
        return Err(bad);
    }
    let mut w = walk(d, s.lower, r.circles[z].labels[0]);
    let on_i: Vec<_> = w.iter().filter(|p| p.0 == s.i).map(|p| p.2 == (p.1 + 1) % 4).collect();
    if on_i.len() != 2 || on_i[0] != on_i[1] {
        return Err(bad);
    }
    if !on_i[0] {
        w.reverse();
    }
    // 0 = tail at i, 1 = tail at j, 2 = head at i, 3 = head at j
    let ends: Vec<usize> = w
        .iter()
        .filter(|p| p.0 == s.i || p.0 == s.j)
        .map(|&(x, a, b)| {
            let through0 = a == 0 || b == 0;
            let tail = through0 == d.arrows()[x];
            (if tail { 0 } else { 2 }) + usize::from(x == s.j)
        })
        .collect();
    let k = ends.iter().position(|&e| e == 0).ok_or(bad.clone())?;
    match ends[(k + 1) % ends.len()] {
        1 => Ok(FaceType::X),
        3 => Ok(FaceType::Y),
        _ => Err(bad),
    }
}

pub fn psi_from_types(n: usize, types: &[FaceType]) -> PartialCochain {
    let values = types
        .iter()
        .map(|t| match t {
            FaceType::C => Some(false),
            FaceType::A => Some(true),
            FaceType::X => Some(true),
            FaceType::Y => Some(false),
        })
        .collect();
    PartialCochain { n, values }
}

pub fn psi_constraints(d: &OrientedDiagram) -> Result<PartialCochain> {
    let rc = ResolvedCube::new(d);
    Ok(psi_from_types(d.n(), &rc.face_types()?))
}

/// Resolutions, edge maps, face types and a chosen edge assignment.
pub struct Assigned {
    pub cube: ResolvedCube,
    pub types: Vec<FaceType>,
    pub eps: Cochain,
}

impl Assigned {
    /// Solve the edge assignment with the variables ranked by `order`.
    pub fn new(d: &OrientedDiagram, order: Option<&[usize]>) -> Result<Self> {
        let cube = ResolvedCube::new(d);
        let types = cube.face_types()?;
        let eps = cube::solve_coboundary(&psi_from_types(d.n(), &types), order)?;
        Ok(Assigned { cube, types, eps })
    }

    pub fn eps(&self, e: Edge) -> Zu {
        if self.eps.values[self.cube.edge_id(e)] {
            Zu::XI
        } else {
            Zu::ONE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn hopf() -> OrientedDiagram {
        OrientedDiagram::parse("PD[X(1,4,2,3),X(3,2,4,1)]").unwrap()
    }

    #[test]
    fn circle_counts() {
        let u = OrientedDiagram::unknot();
        let r = resolve(&u, 0);
        assert_eq!((r.len(), r.arcs.len()), (1, 0));
        let h = hopf();
        assert_eq!(resolve(&h, 0b00).len(), 2);
        assert_eq!(resolve(&h, 0b01).len(), 1);
        assert_eq!(resolve(&h, 0b11).len(), 2);
    }

    #[test]
    fn circles_partition_half_edges() {
        for d in corpus::random_corpus(3, 20, 6) {
            for v in 0..1u32 << d.n() {
                let r = resolve(&d, v);
                let total: usize = r.circles.iter().map(|c| c.labels.len()).sum();
                assert_eq!(total, d.edges().len());
                for a in &r.arcs {
                    assert!(a.tail.1 < r.circles[a.tail.0].labels.len());
                }
            }
        }
    }

    #[test]
    fn basepoint_circle_is_last() {
        let h = hopf().with_basepoint(Some(1)).unwrap();
        let r = resolve(&h, 0);
        assert!(r.circles.last().unwrap().labels.contains(&1));
    }

    #[test]
    fn split_and_merge_matrices() {
        // positive kink: the 0-resolution has two circles
        let k = corpus::named("kinked_unknot").unwrap();
        let m = edge_matrix_raw(&k, 1, 0, Ring::Unified).unwrap();
        let n0 = resolve(&k, 0).len();
        assert_eq!(m.ncols(), 1 << n0);
        assert!(edge_matrix_raw(&k, 0, 1, Ring::Unified).is_err());
        for ring in [Ring::Odd, Ring::Even] {
            let m = edge_matrix_raw(&k, 1, 0, ring).unwrap();
            assert!(m.cols.iter().flatten().all(|e| e.1.as_unit().is_some()));
        }
        let l = corpus::named("kinked_unknot_neg").unwrap();
        let s = edge_matrix_raw(&l, 1, 0, Ring::Unified).unwrap();
        // empty monomial splits into tail + xi head
        let mut col: Vec<Zu> = s.cols[0].iter().map(|e| e.1).collect();
        col.sort_by_key(|z| (z.m, z.n));
        assert_eq!(col, vec![Zu::XI, Zu::ONE]);
        assert_eq!(s.cols[0].len(), 2);
    }

    #[test]
    fn hopf_faces_are_constrained() {
        assert_eq!(psi_constraints(&OrientedDiagram::unknot()).unwrap().values.len(), 0);
        assert!(psi_constraints(&hopf()).unwrap().values.iter().all(|v| v.is_some()));
    }

    #[test]
    fn classification_never_fails() {
        for d in corpus::random_corpus(11, 30, 6) {
            let a = Assigned::new(&d, None).unwrap();
            let rc = &a.cube;
            for (s, t) in cube::squares(d.n()).into_iter().zip(&a.types) {
                if matches!(t, FaceType::X | FaceType::Y) {
                    let [e1, e2, ..] = s.edges();
                    assert!(rc.map(e2).compose(rc.map(e1)).specialize(Ring::Odd).is_zero());
                }
            }
            let de = cube::coboundary(&a.eps);
            for (v, t) in de.values.iter().zip(&a.types) {
                match t {
                    FaceType::C => assert!(!v),
                    FaceType::A | FaceType::X => assert!(v),
                    FaceType::Y => assert!(!v),
                }
            }
        }
    }

    #[test]
    fn ladybug_has_free_face() {
        // a 3-crossing diagram whose all-zero resolution is a ladybug configuration somewhere
        let found = corpus::NAMED.iter().filter_map(|n| corpus::named(n)).any(|d| {
            ResolvedCube::new(&d).face_types().unwrap().iter().any(|t| matches!(t, FaceType::X | FaceType::Y))
        });
        assert!(found);
    }
}
