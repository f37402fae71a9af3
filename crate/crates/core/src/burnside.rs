//! Signed Burnside functors on the cube: the odd Khovanov functor as
//! explicit correspondences, square matchings, hexagon checks,
//! totalization, doubling, sign reassignment and sub/quotient functors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::{Monomial, Ring};
use crate::complexes::{build_with, Complex, Generator};
use crate::cube::{self, Edge, Square, Vertex};
use crate::diagram::OrientedDiagram;
use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMat;
use crate::resolution::Assigned;

/// An element of a generator set: a monomial plus a copy tag
/// (0/1 for the two copies of a doubled functor or a coproduct).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Key {
    pub tag: u8,
    pub mono: Monomial,
}

impl Key {
    pub fn plain(mono: Monomial) -> Self {
        Key { tag: 0, mono }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Element {
    /// Generator at the upper vertex.
    pub source: Key,
    /// Generator at the lower vertex.
    pub target: Key,
    pub sign: i8,
}

/// Correspondence `F(upper) -> F(lower)` along a cube edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub edge: Edge,
    pub elements: Vec<Element>,
}

/// Matched pair of two-step paths `x -> mid -> z` around a square: `via_i`
/// passes through `lower + e_i`, `via_j` through `lower + e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Matched {
    pub x: Key,
    pub z: Key,
    pub sign: i8,
    pub via_i: Key,
    pub via_j: Key,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareMatching {
    pub square: Square,
    pub pairs: Vec<Matched>,
}

#[derive(Clone, Debug)]
pub struct SignedBurnsideFunctor {
    pub n: usize,
    /// Generator set of each vertex, sorted.
    pub objects: Vec<Vec<Key>>,
    /// Indexed like [`cube::edges`].
    pub edges: Vec<Correspondence>,
    pub squares: Vec<SquareMatching>,
    /// Formal desuspension carried along with the functor.
    pub shift: i64,
    edge_index: HashMap<Edge, usize>,
}

/// Two-step paths from `x` at the top of the square to `z` at the bottom
/// through `mid`, keyed by `(x, z)`.
type Paths = BTreeMap<(Key, Key), Vec<(Key, i8)>>;

impl SignedBurnsideFunctor {
    /// Assemble from objects and edges, constructing the square matchings.
    pub fn from_parts(n: usize, objects: Vec<Vec<Key>>, edges: Vec<Correspondence>, shift: i64) -> Result<Self> {
        let edge_index = cube::edge_index(n);
        let mut f = SignedBurnsideFunctor { n, objects, edges, squares: Vec::new(), shift, edge_index };
        f.squares = cube::squares(n).into_iter().map(|s| f.match_square(s)).collect::<Result<_>>()?;
        Ok(f)
    }

    pub fn correspondence(&self, e: Edge) -> &Correspondence {
        &self.edges[self.edge_index[&e]]
    }

    fn out_of(&self, e: Edge) -> HashMap<Key, Vec<(Key, i8)>> {
        let mut m: HashMap<Key, Vec<(Key, i8)>> = HashMap::new();
        for el in &self.correspondence(e).elements {
            m.entry(el.source).or_default().push((el.target, el.sign));
        }
        m
    }

    /// Paths `upper -> upper - e_first -> lower` of a square.
    fn paths(&self, s: Square, mid: Vertex) -> Paths {
        let upper = s.upper();
        let top = Edge { lower: mid, coord: (upper ^ mid).trailing_zeros() as usize };
        let bottom = Edge { lower: s.lower, coord: (mid ^ s.lower).trailing_zeros() as usize };
        let (a, b) = (self.out_of(top), self.out_of(bottom));
        let mut out: Paths = BTreeMap::new();
        for (&x, outs) in &a {
            for &(m, s1) in outs {
                for &(z, s2) in b.get(&m).map_or(&[][..], |v| &v[..]) {
                    out.entry((x, z)).or_default().push((m, s1 * s2));
                }
            }
        }
        out
    }

    fn match_square(&self, s: Square) -> Result<SquareMatching> {
        let pi = self.paths(s, s.lower | (1 << s.i));
        let pj = self.paths(s, s.lower | (1 << s.j));
        let bad = |msg: &str| Error::Burnside(format!("square {:?}: {msg}", s));
        let keys: BTreeSet<(Key, Key)> = pi.keys().chain(pj.keys()).copied().collect();
        let mut pairs = Vec::new();
        for k in keys {
            let (a, b) = (pi.get(&k).cloned().unwrap_or_default(), pj.get(&k).cloned().unwrap_or_default());
            for sign in [1i8, -1] {
                let ma: Vec<Key> = a.iter().filter(|p| p.1 == sign).map(|p| p.0).collect();
                let mb: Vec<Key> = b.iter().filter(|p| p.1 == sign).map(|p| p.0).collect();
                if ma.len() > 1 || mb.len() > 1 {
                    return Err(bad("two paths of the same sign; matching not unique"));
                }
                if ma.len() != mb.len() {
                    return Err(bad("no sign-respecting bijection"));
                }
                if let (Some(&via_i), Some(&via_j)) = (ma.first(), mb.first()) {
                    pairs.push(Matched { x: k.0, z: k.1, sign, via_i, via_j });
                }
            }
        }
        Ok(SquareMatching { square: s, pairs })
    }

    /// Squares with an `(x, z)` pair matched in both signs.
    pub fn ladybug_count(&self) -> usize {
        self.squares
            .iter()
            .map(|sq| {
                let mut seen: BTreeMap<(Key, Key), Vec<i8>> = BTreeMap::new();
                for p in &sq.pairs {
                    seen.entry((p.x, p.z)).or_default().push(p.sign);
                }
                seen.values().filter(|v| v.len() == 2).count()
            })
            .sum()
    }

    fn matching(&self, s: Square) -> HashMap<(Key, Key, i8), (Key, Key)> {
        let idx = cube::squares(self.n).iter().position(|&q| q == s).unwrap();
        self.squares[idx].pairs.iter().map(|p| ((p.x, p.z, p.sign), (p.via_i, p.via_j))).collect()
    }

    /// Compose the six square bijections around every hexagon; returns
    /// the number of hexagons checked.
    pub fn check_hexagons(&self) -> Result<usize> {
        let squares = cube::squares(self.n);
        let sq_index: HashMap<Square, usize> = squares.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let matching: Vec<HashMap<(Key, Key, i8), (Key, Key)>> = self
            .squares
            .iter()
            .map(|sq| sq.pairs.iter().map(|p| ((p.x, p.z, p.sign), (p.via_i, p.via_j))).collect())
            .collect();
        let mut count = 0;
        for c in cube::cubes3(self.n) {
            count += 1;
            let upper = c.lower | c.coords.iter().map(|&k| 1u32 << k).sum::<u32>();
            // path as (order of coordinates removed, generators after each step)
            let start_order = [c.coords[0], c.coords[1], c.coords[2]];
            for path in self.triple_paths(upper, start_order) {
                let mut order = start_order;
                let mut gens = path;
                for step in 0..6 {
                    // even steps swap the first two removals, odd steps the last two
                    let (a, b) = if step % 2 == 0 { (0, 1) } else { (1, 2) };
                    let top = if a == 0 { upper } else { upper & !(1 << order[0]) };
                    let bottom = top & !(1 << order[a]) & !(1 << order[b]);
                    let (ci, cj) = (order[a].min(order[b]), order[a].max(order[b]));
                    let sq = Square { lower: bottom, i: ci, j: cj };
                    let x = gens[a];
                    let mid = gens[a + 1];
                    let z = gens[b + 1];
                    let sign = self.sign_of(top, order[a], x, mid) * self.sign_of(top & !(1 << order[a]), order[b], mid, z);
                    let (vi, vj) = *matching[sq_index[&sq]]
                        .get(&(x, z, sign))
                        .ok_or_else(|| Error::Burnside(format!("hexagon at {:?}: missing matched path", c)))?;
                    // current path removes order[a] first, i.e. passes through top - e_{order[a]} = bottom + e_{order[b]}
                    let (now, other) = if order[b] == ci { (vi, vj) } else { (vj, vi) };
                    if now != mid {
                        return Err(Error::Burnside(format!("hexagon at {:?}: inconsistent matching", c)));
                    }
                    gens[a + 1] = other;
                    order.swap(a, b);
                }
                if order != start_order || gens != path {
                    return Err(Error::Burnside(format!("hexagon at {:?} does not commute", c)));
                }
            }
        }
        Ok(count)
    }

    fn sign_of(&self, top: Vertex, coord: usize, x: Key, y: Key) -> i8 {
        let e = Edge { lower: top & !(1 << coord), coord };
        self.correspondence(e).elements.iter().find(|el| el.source == x && el.target == y).map_or(0, |el| el.sign)
    }

    /// All paths `[x, m1, m2, z]` removing coordinates in `order`.
    fn triple_paths(&self, upper: Vertex, order: [usize; 3]) -> Vec<[Key; 4]> {
        let mut v = upper;
        let mut layers: Vec<HashMap<Key, Vec<(Key, i8)>>> = Vec::new();
        for &c in &order {
            layers.push(self.out_of(Edge { lower: v & !(1 << c), coord: c }));
            v &= !(1 << c);
        }
        let mut out = Vec::new();
        for x in &self.objects[upper as usize] {
            for &(m1, _) in layers[0].get(x).map_or(&[][..], |v| &v[..]) {
                for &(m2, _) in layers[1].get(&m1).map_or(&[][..], |v| &v[..]) {
                    for &(z, _) in layers[2].get(&m2).map_or(&[][..], |v| &v[..]) {
                        out.push([*x, m1, m2, z]);
                    }
                }
            }
        }
        out
    }

    /// Totalization: generators `(vertex, key)` in sorted order and the
    /// differential from each vertex to the vertices it covers, with
    /// standard signs.
    pub fn totalize(&self) -> Totalization {
        let mut gens = Vec::new();
        let mut index = HashMap::new();
        for (v, objs) in self.objects.iter().enumerate() {
            for &k in objs {
                index.insert((v as Vertex, k), gens.len());
                gens.push((v as Vertex, k));
            }
        }
        let mut trip = Vec::new();
        for c in &self.edges {
            let s = cube::edge_sign(c.edge);
            for el in &c.elements {
                let src = index[&(c.edge.upper(), el.source)];
                let dst = index[&(c.edge.lower, el.target)];
                trip.push((dst, src, s * el.sign as i64));
            }
        }
        let len = gens.len();
        Totalization { gens, d: SparseMat::from_triplets(len, len, trip) }
    }

    /// The doubled functor: objects `{1, xi} x F(v)`, unsigned, with the
    /// sign of each element absorbed into the copy of its target.
    pub fn double(&self) -> Result<SignedBurnsideFunctor> {
        if self.objects.iter().flatten().any(|k| k.tag != 0) {
            return Err(Error::Burnside("can only double an untagged functor".into()));
        }
        let objects = self.objects.iter().map(|o| o.iter().flat_map(|k| [0u8, 1].map(|tag| Key { tag, mono: k.mono })).collect()).collect();
        let edges = self
            .edges
            .iter()
            .map(|c| Correspondence {
                edge: c.edge,
                elements: c
                    .elements
                    .iter()
                    .flat_map(|el| {
                        let flip = (el.sign < 0) as u8;
                        [0u8, 1].map(|t| Element {
                            source: Key { tag: t, mono: el.source.mono },
                            target: Key { tag: t ^ flip, mono: el.target.mono },
                            sign: 1,
                        })
                    })
                    .collect(),
            })
            .collect();
        SignedBurnsideFunctor::from_parts(self.n, objects, edges, self.shift)
    }

    /// Rescale every element by `zeta(upper, source) * zeta(lower, target)`.
    pub fn sign_reassign(&self, zeta: impl Fn(Vertex, Key) -> i8) -> Result<SignedBurnsideFunctor> {
        let edges = self
            .edges
            .iter()
            .map(|c| Correspondence {
                edge: c.edge,
                elements: c
                    .elements
                    .iter()
                    .map(|el| Element { sign: el.sign * zeta(c.edge.upper(), el.source) * zeta(c.edge.lower, el.target), ..*el })
                    .collect(),
            })
            .collect();
        SignedBurnsideFunctor::from_parts(self.n, self.objects.clone(), edges, self.shift)
    }

    fn restrict(&self, keep: &dyn Fn(Vertex, Key) -> bool) -> Result<SignedBurnsideFunctor> {
        let objects = self
            .objects
            .iter()
            .enumerate()
            .map(|(v, o)| o.iter().copied().filter(|&k| keep(v as Vertex, k)).collect())
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|c| Correspondence {
                edge: c.edge,
                elements: c
                    .elements
                    .iter()
                    .copied()
                    .filter(|el| keep(c.edge.upper(), el.source) && keep(c.edge.lower, el.target))
                    .collect(),
            })
            .collect();
        SignedBurnsideFunctor::from_parts(self.n, objects, edges, self.shift)
    }

    /// Split along a closed generator subset `S` into the subfunctor on `S`
    /// and the quotient on its complement.
    pub fn subfunctor(&self, s: &dyn Fn(Vertex, Key) -> bool) -> Result<(SignedBurnsideFunctor, SignedBurnsideFunctor)> {
        for c in &self.edges {
            for el in &c.elements {
                if s(c.edge.upper(), el.source) && !s(c.edge.lower, el.target) {
                    return Err(Error::Burnside(format!("subset is not closed along edge {:?}", c.edge)));
                }
            }
        }
        Ok((self.restrict(s)?, self.restrict(&|v, k| !s(v, k))?))
    }

    /// Disjoint union of two functors on cubes of the same dimension; the
    /// second summand is tagged 1.
    pub fn coproduct(&self, other: &SignedBurnsideFunctor) -> Result<SignedBurnsideFunctor> {
        if self.n != other.n || self.objects.iter().chain(&other.objects).flatten().any(|k| k.tag != 0) {
            return Err(Error::Burnside("coproduct needs untagged functors on the same cube".into()));
        }
        let tagged = |k: Key| Key { tag: 1, ..k };
        let objects = self
            .objects
            .iter()
            .zip(&other.objects)
            .map(|(a, b)| a.iter().copied().chain(b.iter().copied().map(tagged)).collect())
            .collect();
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| Correspondence {
                edge: a.edge,
                elements: a
                    .elements
                    .iter()
                    .copied()
                    .chain(b.elements.iter().map(|el| Element { source: tagged(el.source), target: tagged(el.target), sign: el.sign }))
                    .collect(),
            })
            .collect();
        SignedBurnsideFunctor::from_parts(self.n, objects, edges, self.shift)
    }

    /// Correspondence and matching listing.
    pub fn debug_listing(&self) -> String {
        let key = |k: Key| if k.tag == 0 { k.mono.to_string() } else { format!("{}'{}", k.mono, k.tag) };
        let sgn = |s: i8| if s > 0 { '+' } else { '-' };
        let mut s = String::new();
        for c in &self.edges {
            writeln!(s, "edge {:b} -> {:b}", c.edge.upper(), c.edge.lower).unwrap();
            for el in &c.elements {
                writeln!(s, "  ({} -> {}, {})", key(el.source), key(el.target), sgn(el.sign)).unwrap();
            }
        }
        for sq in &self.squares {
            writeln!(s, "square {:b} -> {:b}", sq.square.upper(), sq.square.lower).unwrap();
            for p in &sq.pairs {
                writeln!(s, "  {} -> {} ({}): via {} ~ via {}", key(p.x), key(p.z), sgn(p.sign), key(p.via_i), key(p.via_j)).unwrap();
            }
        }
        s
    }

    /// Look up the square matching of `s` (for inspection).
    pub fn square_matching(&self, s: Square) -> Vec<((Key, Key, i8), (Key, Key))> {
        let mut v: Vec<_> = self.matching(s).into_iter().collect();
        v.sort();
        v
    }
}

/// Totalization of a functor: differential from each vertex down to the
/// vertices it covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Totalization {
    pub gens: Vec<(Vertex, Key)>,
    pub d: SparseMat,
}

/// The odd Khovanov Burnside functor with a given edge assignment.
pub fn build_functor_with(d: &OrientedDiagram, a: &Assigned) -> Result<SignedBurnsideFunctor> {
    let n = d.n();
    let objects = a
        .cube
        .resolutions
        .iter()
        .map(|r| Monomial::all(r.len() as u32).map(Key::plain).collect())
        .collect();
    let edges = a
        .cube
        .edges
        .iter()
        .zip(&a.cube.maps)
        .map(|(&e, m)| {
            let eps = a.eps(e);
            let mut elements = Vec::new();
            for (c, col) in m.cols.iter().enumerate() {
                for &(r, z) in col {
                    let s = (eps * z).specialize(Ring::Odd).m;
                    if s.abs() != 1 {
                        return Err(Error::Burnside(format!("odd edge entry {s} is not a unit")));
                    }
                    elements.push(Element {
                        source: Key::plain(Monomial(r as u64)),
                        target: Key::plain(Monomial(c as u64)),
                        sign: s as i8,
                    });
                }
            }
            Ok(Correspondence { edge: e, elements })
        })
        .collect::<Result<_>>()?;
    SignedBurnsideFunctor::from_parts(n, objects, edges, -(d.n_minus() as i64))
}

pub fn build_functor(d: &OrientedDiagram) -> Result<SignedBurnsideFunctor> {
    build_functor_with(d, &Assigned::new(d, None)?)
}

/// Does `tot` list the same generators as `c` with transposed differential?
pub fn transpose_equals(tot: &Totalization, c: &Complex) -> bool {
    tot.gens.len() == c.len()
        && tot.gens.iter().zip(&c.gens).all(|(&(v, k), g)| {
            v == g.vertex && k.mono == g.mono && (k.tag == 1) == g.xi
        })
        && tot.d.transpose() == c.d
}

/// Outcome of the functor-level checks on one diagram.
#[derive(Clone, Debug, Serialize)]
pub struct BurnsideReport {
    pub squares: usize,
    pub ladybugs: usize,
    pub hexagons: usize,
    pub odd_transpose: bool,
    pub doubled_matches_unified: bool,
    pub forgets_to_even: bool,
}

impl BurnsideReport {
    pub fn passed(&self) -> bool {
        self.odd_transpose && self.doubled_matches_unified && self.forgets_to_even
    }
}

pub fn verify(d: &OrientedDiagram) -> Result<BurnsideReport> {
    let a = Assigned::new(d, None)?;
    let f = build_functor_with(d, &a)?;
    let hexagons = f.check_hexagons()?;
    let odd = build_with(d, &a, Ring::Odd, false)?;
    let even = build_with(d, &a, Ring::Even, false)?;
    let unified = build_with(d, &a, Ring::Unified, false)?;
    let tot = f.totalize();
    Ok(BurnsideReport {
        squares: f.squares.len(),
        ladybugs: f.ladybug_count(),
        hexagons,
        odd_transpose: transpose_equals(&tot, &odd),
        doubled_matches_unified: transpose_equals(&f.double()?.totalize(), &unified),
        forgets_to_even: tot.d.transpose().abs() == even.d.abs(),
    })
}

/// Generator of a complex as a functor key.
pub fn key_of(g: &Generator) -> (Vertex, Key) {
    (g.vertex, Key { tag: g.xi as u8, mono: g.mono })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, named};
    use crate::homology::{homology, Coeffs};
    use crate::linalg::snf::invariant_factors;

    #[test]
    fn unknot_functor() {
        let f = build_functor(&OrientedDiagram::unknot()).unwrap();
        assert_eq!(f.objects.len(), 1);
        assert!(f.edges.is_empty());
        assert_eq!(f.check_hexagons().unwrap(), 0);
        let t = f.totalize();
        assert_eq!(t.gens.len(), 2);
        assert!(t.d.is_zero());
    }

    #[test]
    fn corpus_verifies() {
        let mut ds: Vec<_> = corpus::NAMED.iter().map(|n| named(n).unwrap()).collect();
        ds.extend(corpus::random_corpus(9, 12, 6));
        let mut ladybugs = 0;
        for d in ds {
            let r = verify(&d).unwrap();
            assert!(r.passed(), "{d}: {r:?}");
            if d.n() >= 3 {
                assert!(r.hexagons > 0);
            }
            ladybugs += r.ladybugs;
        }
        assert!(ladybugs > 0);
    }

    #[test]
    fn hexagon_count() {
        let f = build_functor(&named("figure_eight").unwrap()).unwrap();
        assert_eq!(f.check_hexagons().unwrap(), 4 * 2);
    }

    #[test]
    fn doubling_a_negative_element() {
        let f = build_functor(&named("hopf").unwrap()).unwrap();
        let dbl = f.double().unwrap();
        for (c, dc) in f.edges.iter().zip(&dbl.edges) {
            for el in &c.elements {
                let t = (el.sign < 0) as u8;
                assert!(dc.elements.iter().any(|x| x.source == Key { tag: 0, mono: el.source.mono } && x.target == Key { tag: t, mono: el.target.mono }));
            }
        }
    }

    #[test]
    fn sign_reassignment() {
        let d = named("trefoil_right").unwrap();
        let f = build_functor(&d).unwrap();
        let same = f.sign_reassign(|_, _| 1).unwrap();
        assert_eq!(same.edges, f.edges);
        let flip = Key::plain(Monomial::EMPTY);
        let g = f.sign_reassign(|v, k| if v == 0b011 && k == flip { -1 } else { 1 }).unwrap();
        for (a, b) in f.edges.iter().zip(&g.edges) {
            for (x, y) in a.elements.iter().zip(&b.elements) {
                let touches = (a.edge.upper() == 0b011 && x.source == flip) || (a.edge.lower == 0b011 && x.target == flip);
                assert_eq!(x.sign == y.sign, !touches);
            }
        }
        // homology of the totalization is unchanged by a random reassignment
        let mut rng = corpus::rng(4);
        use rand::Rng;
        let signs: Vec<i8> = (0..64).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let h = f.sign_reassign(|v, k| signs[(v as usize * 8 + k.mono.0 as usize) % 64]).unwrap();
        let (t0, t1) = (f.totalize().d, h.totalize().d);
        assert_eq!(invariant_factors(&t0), invariant_factors(&t1));
        assert_eq!(t0.abs(), t1.abs());
    }

    #[test]
    fn reduced_sub_and_quotient() {
        let d = named("trefoil_right").unwrap().with_basepoint(Some(1)).unwrap();
        let a = Assigned::new(&d, None).unwrap();
        let f = build_functor_with(&d, &a).unwrap();
        let p = |v: Vertex| a.cube.resolutions[v as usize].len() as u32 - 1;
        let (plus, minus) = f.subfunctor(&|v, k| !k.mono.contains(p(v))).unwrap();
        assert_eq!(plus.objects.iter().map(Vec::len).sum::<usize>(), minus.objects.iter().map(Vec::len).sum::<usize>());
        // the bijection dropping the basepoint circle preserves every sign
        for (cp, cm) in plus.edges.iter().zip(&minus.edges) {
            let e = cp.edge;
            let strip = |k: Key, v: Vertex| Key::plain(k.mono.without(p(v)));
            let mut a: Vec<_> = cm.elements.iter().map(|el| (strip(el.source, e.upper()), strip(el.target, e.lower), el.sign)).collect();
            let mut b: Vec<_> = cp.elements.iter().map(|el| (el.source, el.target, el.sign)).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
        assert!(f.subfunctor(&|v, k| k.mono.contains(p(v))).is_err());
        let (all, none) = f.subfunctor(&|_, _| true).unwrap();
        assert_eq!(all.edges, f.edges);
        assert!(none.objects.iter().all(Vec::is_empty));
        // totalizations form a short exact sequence with matching homology ranks
        let odd = build_with(&d, &a, Ring::Odd, false).unwrap();
        let h = homology(&odd, Coeffs::Q);
        let total: usize = h.values().map(|i| i.rank).sum();
        let tp = plus.totalize();
        let rank = tp.gens.len() - 2 * invariant_factors(&tp.d).rank;
        assert_eq!(2 * rank, total);
    }

    #[test]
    fn coproduct_totalizes_to_sum() {
        let (a, b) = (build_functor(&named("hopf").unwrap()).unwrap(), build_functor(&named("kinked_unknot").unwrap().disjoint_union(&named("kinked_unknot_neg").unwrap())).unwrap());
        let c = a.coproduct(&b).unwrap();
        let (ta, tb, tc) = (a.totalize(), b.totalize(), c.totalize());
        assert_eq!(tc.gens.len(), ta.gens.len() + tb.gens.len());
        assert_eq!(tc.d.nnz(), ta.d.nnz() + tb.d.nnz());
        let pos: HashMap<(Vertex, Key), usize> = tc.gens.iter().enumerate().map(|(k, g)| (*g, k)).collect();
        for (t, tag) in [(&ta, 0u8), (&tb, 1)] {
            for (r, col, v) in t.d.entries() {
                let g = |k: usize| (t.gens[k].0, Key { tag, ..t.gens[k].1 });
                assert_eq!(tc.d.get(pos[&g(r)], pos[&g(col)]), v);
            }
        }
    }
}
