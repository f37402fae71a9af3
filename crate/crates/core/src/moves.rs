//! Chain maps for Reidemeister moves, built by Gaussian elimination, and
//! for births, deaths and saddles; composition along movies.
//!
//! Maps run in the complex direction (from the source frame to the next
//! one). Reidemeister maps cancel the generators supported near the local
//! crossings and identify what survives with the other diagram's complex by
//! a signed permutation found by propagating signs along the differential.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::ToPrimitive;

use crate::algebra::{normalize, Monomial, Ring, Zu};
use crate::complexes::{build_complex, build_with, Bigrading, Complex, Generator};
use crate::cube::{self, Edge, Vertex};
use crate::diagram::rewrite::{self, Rewrite};
use crate::diagram::{Label, Move, MovieScript, OrientedDiagram};
use crate::error::{Error, Result};
use crate::homology::{homology_at, induced_map, Coeffs};
use crate::linalg::f2::{BitVec, F2Matrix};
use crate::linalg::snf::invariant_factors;
use crate::linalg::sparse::SparseMat;
use crate::resolution::{resolve, Assigned, Resolution};

fn shifted(b: Bigrading, s: Bigrading) -> Bigrading {
    Bigrading { i: b.i + s.i, j: b.j + s.j }
}

fn reduce(ring: Ring, m: SparseMat) -> SparseMat {
    if ring == Ring::Mod2 {
        m.mod2()
    } else {
        m
    }
}

fn commutes(f: &SparseMat, src: &Complex, dst: &Complex, shift: Bigrading) -> bool {
    if f.ncols() != src.len() || f.nrows != dst.len() {
        return false;
    }
    let diff = dst.d.compose(f).add(&f.compose(&src.d).scale(-1));
    if !reduce(src.ring, diff).is_zero() {
        return false;
    }
    let mod2 = src.ring == Ring::Mod2;
    f.entries().all(|(r, c, v)| (mod2 && v % 2 == 0) || dst.grading[r] == shifted(src.grading[c], shift))
}

/// A chain map between two Khovanov complexes with its checks.
#[derive(Clone, Debug)]
pub struct ChainMapWitness {
    pub source: Complex,
    pub target: Complex,
    /// Rows index target generators, columns source generators.
    pub map: SparseMat,
    /// Bidegree of the map.
    pub shift: Bigrading,
    pub is_chain_map: bool,
    /// `None` when not checked.
    pub is_quasi_iso: Option<bool>,
}

impl ChainMapWitness {
    pub fn new(source: Complex, target: Complex, map: SparseMat, shift: Bigrading) -> Self {
        let map = reduce(source.ring, map);
        let is_chain_map = commutes(&map, &source, &target, shift);
        ChainMapWitness { source, target, map, shift, is_chain_map, is_quasi_iso: None }
    }

    pub fn identity(c: Complex) -> Self {
        let map = SparseMat::identity(c.len());
        let mut w = ChainMapWitness::new(c.clone(), c, map, Bigrading { i: 0, j: 0 });
        w.is_quasi_iso = Some(w.is_chain_map);
        w
    }

    /// The map restricted to each source bigrading.
    pub fn blocks(&self) -> BTreeMap<Bigrading, SparseMat> {
        self.source
            .blocks()
            .into_iter()
            .map(|(b, cols)| (b, self.map.submatrix(&self.target.block(shifted(b, self.shift)), &cols)))
            .collect()
    }

    /// `next` after `self`.
    pub fn then(&self, next: &ChainMapWitness) -> Result<ChainMapWitness> {
        if self.target.gens != next.source.gens || self.target.d != next.source.d {
            return Err(Error::NotChainMap("composed witnesses do not share a complex".into()));
        }
        let map = next.map.compose(&self.map);
        let shift = shifted(self.shift, next.shift);
        let mut w = ChainMapWitness::new(self.source.clone(), next.target.clone(), map, shift);
        w.is_quasi_iso = match (self.is_quasi_iso, next.is_quasi_iso) {
            (Some(a), Some(b)) => Some(a && b),
            _ => None,
        };
        Ok(w)
    }

    /// Check that the map induces isomorphisms on homology in every
    /// bigrading and record the outcome.
    pub fn verify_quasi_iso(&mut self) -> bool {
        let ok = self.is_chain_map && self.shift == Bigrading { i: 0, j: 0 } && quasi_iso(&self.map, &self.source, &self.target);
        self.is_quasi_iso = Some(ok);
        ok
    }

    pub fn mod2(&self) -> SparseMat {
        self.map.mod2()
    }
}

fn big_to_i64(x: &num_bigint::BigInt) -> i64 {
    x.to_i64().expect("homology coordinate overflow")
}

/// Whether `f` (a degree-zero chain map) is an isomorphism on homology at
/// every bigrading.
pub fn quasi_iso(f: &SparseMat, src: &Complex, dst: &Complex) -> bool {
    let all: BTreeSet<Bigrading> = src.bigradings().union(&dst.bigradings()).copied().collect();
    let mod2 = src.ring == Ring::Mod2;
    for b in all {
        let coeffs = if mod2 { Coeffs::F2 } else { Coeffs::Z };
        let (hs, ht) = (homology_at(src, b, coeffs), homology_at(dst, b, coeffs));
        if hs.rank != ht.rank || hs.torsion != ht.torsion {
            return false;
        }
        if hs.reps.is_empty() {
            continue;
        }
        let m = match induced_map(f, src, dst, b, coeffs) {
            Ok(m) => m,
            Err(_) => return false,
        };
        if mod2 {
            let k = hs.reps.len();
            let fm = F2Matrix {
                nrows: k,
                cols: (0..k).map(|c| BitVec::from_indices(k, (0..k).filter(|&r| m[r][c].bit(0)))).collect(),
            };
            if fm.rank() != k {
                return false;
            }
        } else {
            // surjective onto Z^r + torsion, hence bijective between
            // isomorphic finitely generated groups
            let rows = m.len();
            let ncols = hs.reps.len();
            let mut trip = Vec::new();
            for (r, row) in m.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    trip.push((r, c, big_to_i64(x)));
                }
            }
            for (t, order) in ht.torsion.iter().enumerate() {
                trip.push((t, ncols + t, big_to_i64(order)));
            }
            let pres = SparseMat::from_triplets(rows, ncols + ht.torsion.len(), trip);
            let inv = invariant_factors(&pres);
            if inv.rank != rows || !inv.torsion.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Result of cancelling pairs of generators.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub complex: Complex,
    /// Projection from the original complex onto the survivors.
    pub f: SparseMat,
    /// Inclusion of the survivors into the original complex.
    pub g: SparseMat,
    /// Original index of each surviving generator.
    pub survivors: Vec<usize>,
}

impl Reduction {
    /// `f` and `g` are chain maps and `f g = id`.
    pub fn verify(&self, original: &Complex) -> bool {
        let zero = Bigrading { i: 0, j: 0 };
        commutes(&self.f, original, &self.complex, zero)
            && commutes(&self.g, &self.complex, original, zero)
            && reduce(original.ring, self.f.compose(&self.g)) == SparseMat::identity(self.complex.len())
    }
}

fn add_scaled(dst: &mut HashMap<usize, i64>, src: &HashMap<usize, i64>, s: i64, m2: bool) {
    for (&k, &v) in src {
        let e = dst.entry(k).or_insert(0);
        *e += s * v;
        if m2 {
            *e = e.rem_euclid(2);
        }
        if *e == 0 {
            dst.remove(&k);
        }
    }
}

/// Gaussian elimination: cancel each pair `(x, y)` in turn along the
/// (current) unit entry `d[y][x]`.
pub fn eliminate(c: &Complex, pairs: &[(usize, usize)]) -> Result<Reduction> {
    let n = c.len();
    let m2 = c.ring == Ring::Mod2;
    let norm = |v: i64| if m2 { v.rem_euclid(2) } else { v };
    let mut col: Vec<HashMap<usize, i64>> = vec![HashMap::new(); n];
    let mut row: Vec<HashMap<usize, i64>> = vec![HashMap::new(); n];
    for (r, s, v) in c.d.entries() {
        let v = norm(v);
        if v != 0 {
            col[s].insert(r, v);
            row[r].insert(s, v);
        }
    }
    let unit = |k: usize| HashMap::from([(k, 1i64)]);
    let mut fr: Vec<HashMap<usize, i64>> = (0..n).map(unit).collect();
    let mut gc: Vec<HashMap<usize, i64>> = (0..n).map(unit).collect();
    let mut alive = vec![true; n];
    for &(x, y) in pairs {
        if x == y || !alive[x] || !alive[y] {
            return Err(Error::Cancellation(format!("generator cancelled twice at {:?}", c.gens[x])));
        }
        let u = col[x].get(&y).copied().unwrap_or(0);
        if u != 1 && u != -1 {
            return Err(Error::Cancellation(format!("entry {:?} -> {:?} is {u}, not a unit", c.gens[x], c.gens[y])));
        }
        let outs: Vec<(usize, i64)> = col[x].iter().filter(|e| *e.0 != y).map(|(&r, &a)| (r, a)).collect();
        let ins: Vec<(usize, i64)> = row[y].iter().filter(|e| *e.0 != x).map(|(&z, &b)| (z, b)).collect();
        for &(r, a) in &outs {
            for &(z, b) in &ins {
                let e = col[z].entry(r).or_insert(0);
                *e = norm(*e - a * u * b);
                if *e == 0 {
                    col[z].remove(&r);
                    row[r].remove(&z);
                } else {
                    let v = *e;
                    row[r].insert(z, v);
                }
            }
        }
        let fy = fr[y].clone();
        for &(r, a) in &outs {
            add_scaled(&mut fr[r], &fy, -a * u, m2);
        }
        let gx = gc[x].clone();
        for &(z, b) in &ins {
            add_scaled(&mut gc[z], &gx, -u * b, m2);
        }
        for k in [x, y] {
            for (r, _) in std::mem::take(&mut col[k]) {
                row[r].remove(&k);
            }
            for (s, _) in std::mem::take(&mut row[k]) {
                col[s].remove(&k);
            }
            alive[k] = false;
        }
    }
    let survivors: Vec<usize> = (0..n).filter(|&k| alive[k]).collect();
    let mut pos = vec![usize::MAX; n];
    for (p, &k) in survivors.iter().enumerate() {
        pos[k] = p;
    }
    let m = survivors.len();
    let (mut td, mut tf, mut tg) = (Vec::new(), Vec::new(), Vec::new());
    for &s in &survivors {
        td.extend(col[s].iter().map(|(&r, &v)| (pos[r], pos[s], v)));
        tf.extend(fr[s].iter().map(|(&o, &v)| (pos[s], o, v)));
        tg.extend(gc[s].iter().map(|(&o, &v)| (o, pos[s], v)));
    }
    let d = SparseMat::from_triplets(m, m, td);
    let f = SparseMat::from_triplets(m, n, tf);
    let g = SparseMat::from_triplets(n, m, tg);
    let gens = survivors.iter().map(|&k| c.gens[k]).collect();
    let grading = survivors.iter().map(|&k| c.grading[k]).collect();
    let complex = Complex::new(c.ring, c.reduced, gens, grading, d);
    Ok(Reduction { complex, f, g, survivors })
}

/// Signed permutation `P` with `P[pi[x]][x] = +-1` and `b.d P = P a.d`,
/// with signs propagated along the differential of `a`.
pub fn signed_iso(a: &Complex, b: &Complex, pi: &[usize]) -> Result<SparseMat> {
    let n = a.len();
    if b.len() != n || pi.len() != n {
        return Err(Error::NotChainMap(format!("sizes differ: {n} and {}", b.len())));
    }
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || seen[p] {
            return Err(Error::NotChainMap("correspondence is not a bijection".into()));
        }
        seen[p] = true;
    }
    let mod2 = a.ring == Ring::Mod2;
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (y, x, v) in a.d.entries() {
        let w = b.d.get(pi[y], pi[x]);
        let s = if mod2 {
            if w % 2 == 0 {
                return Err(Error::NotChainMap("differentials have different supports".into()));
            }
            1
        } else if w == v {
            1
        } else if w == -v {
            -1
        } else {
            return Err(Error::NotChainMap(format!("entries {v} and {w} do not match up to sign")));
        };
        adj[x].push((y, s));
        adj[y].push((x, s));
    }
    let mut eta = vec![0i64; n];
    for root in 0..n {
        if eta[root] != 0 {
            continue;
        }
        eta[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, s) in &adj[x] {
                let want = eta[x] * s;
                if eta[y] == 0 {
                    eta[y] = want;
                    queue.push_back(y);
                } else if eta[y] != want {
                    return Err(Error::NotChainMap("no consistent signs for the correspondence".into()));
                }
            }
        }
    }
    let p = SparseMat::from_triplets(n, n, (0..n).map(|x| (pi[x], x, eta[x])));
    if !commutes(&p, a, b, Bigrading { i: 0, j: 0 }) {
        return Err(Error::NotChainMap("signed correspondence does not commute with the differentials".into()));
    }
    Ok(p)
}

fn check_ring(ring: Ring) -> Result<()> {
    if ring == Ring::Unified {
        return Err(Error::Internal("chain-map witnesses are built over the even, odd and mod-2 rings".into()));
    }
    Ok(())
}

/// Generator indices of `c` grouped by vertex.
fn by_vertex(c: &Complex) -> HashMap<Vertex, Vec<usize>> {
    let mut out: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (k, g) in c.gens.iter().enumerate() {
        out.entry(g.vertex).or_default().push(k);
    }
    out
}

/// Where to cancel: the edges from `lower` along `coord`, and a label on
/// the designated circle (at the lower end for a merge, the upper end for
/// a split).
#[derive(Clone, Debug)]
pub struct CancelSite {
    pub coord: usize,
    pub lower: Vec<Vertex>,
    pub label: Label,
}

/// Pairs cancelling every generator without the designated circle `a1`
/// against its image under the merge `a1, a2 -> a`.
fn merge_pairs(d: &OrientedDiagram, c: &Complex, site: &CancelSite) -> Result<Vec<(usize, usize)>> {
    let at = by_vertex(c);
    let mut pairs = Vec::new();
    for &v in &site.lower {
        let up = v | 1 << site.coord;
        let (lo, hi) = (resolve(d, v), resolve(d, up));
        if lo.len() != hi.len() + 1 {
            return Err(Error::Cancellation(format!("edge {v:#b} -> {up:#b} is not a merge")));
        }
        let a1 = lo.circle_of(site.label) as u32;
        let targets: BTreeSet<usize> = at.get(&up).into_iter().flatten().copied().collect();
        for &x in at.get(&v).into_iter().flatten() {
            if c.gens[x].mono.contains(a1) {
                continue;
            }
            let img: Vec<usize> = c.d.cols[x].iter().map(|e| e.0).filter(|r| targets.contains(r)).collect();
            match img[..] {
                [y] => pairs.push((x, y)),
                _ => return Err(Error::Cancellation(format!("merge image of {:?} is not a single generator", c.gens[x]))),
            }
        }
    }
    Ok(pairs)
}

/// Pairs cancelling every generator against the term of its split image
/// containing the designated new circle.
fn split_pairs(d: &OrientedDiagram, c: &Complex, site: &CancelSite) -> Result<Vec<(usize, usize)>> {
    let at = by_vertex(c);
    let mut pairs = Vec::new();
    for &v in &site.lower {
        let up = v | 1 << site.coord;
        let (lo, hi) = (resolve(d, v), resolve(d, up));
        if lo.len() + 1 != hi.len() {
            return Err(Error::Cancellation(format!("edge {v:#b} -> {up:#b} is not a split")));
        }
        let a = hi.circle_of(site.label) as u32;
        let targets: BTreeSet<usize> = at.get(&up).into_iter().flatten().copied().collect();
        for &z in at.get(&v).into_iter().flatten() {
            let img: Vec<usize> = c.d.cols[z]
                .iter()
                .map(|e| e.0)
                .filter(|r| targets.contains(r) && c.gens[*r].mono.contains(a))
                .collect();
            match img[..] {
                [y] => pairs.push((z, y)),
                _ => return Err(Error::Cancellation(format!("split image of {:?} has no single term on the new circle", c.gens[z]))),
            }
        }
    }
    Ok(pairs)
}

fn checked(c: &Complex, pairs: &[(usize, usize)]) -> Result<Reduction> {
    let red = eliminate(c, pairs)?;
    if !red.verify(c) {
        return Err(Error::Internal("elimination maps failed their checks".into()));
    }
    Ok(red)
}

/// Cancel along merges as in (c-1): the quotient complex and the projection.
pub fn cancel_merge(d: &OrientedDiagram, c: &Complex, site: &CancelSite) -> Result<(Complex, ChainMapWitness)> {
    let red = checked(c, &merge_pairs(d, c, site)?)?;
    let mut w = ChainMapWitness::new(c.clone(), red.complex.clone(), red.f, Bigrading { i: 0, j: 0 });
    w.verify_quasi_iso();
    Ok((red.complex, w))
}

/// Cancel along splits as in (c-2): the reduced complex and its inclusion.
pub fn cancel_split(d: &OrientedDiagram, c: &Complex, site: &CancelSite) -> Result<(Complex, ChainMapWitness)> {
    let red = checked(c, &split_pairs(d, c, site)?)?;
    let mut w = ChainMapWitness::new(red.complex.clone(), c.clone(), red.g, Bigrading { i: 0, j: 0 });
    w.verify_quasi_iso();
    Ok((red.complex, w))
}

/// Resolutions of a diagram, computed on demand.
struct Resolutions<'a> {
    d: &'a OrientedDiagram,
    cache: HashMap<Vertex, Resolution>,
}

impl<'a> Resolutions<'a> {
    fn new(d: &'a OrientedDiagram) -> Self {
        Resolutions { d, cache: HashMap::new() }
    }

    fn get(&mut self, v: Vertex) -> &Resolution {
        let d = self.d;
        self.cache.entry(v).or_insert_with(|| resolve(d, v))
    }
}

/// Vertices of an `n`-cube with the given bits fixed.
fn vertices_with(n: usize, fixed: &[(usize, bool)]) -> Vec<Vertex> {
    (0..1u32 << n)
        .filter(|v| fixed.iter().all(|&(k, b)| (v >> k & 1 == 1) == b))
        .collect()
}

fn is_local(r: &Resolution, circle: usize, local: &BTreeSet<Label>) -> bool {
    r.circles[circle].labels.iter().all(|l| local.contains(l))
}

fn local_circle_label(r: &Resolution, local: &BTreeSet<Label>) -> Option<Label> {
    (0..r.len()).find(|&k| is_local(r, k, local)).map(|k| r.circles[k].labels[0])
}

/// Cancel the generators near the local crossings `xs` (one for a kink,
/// two for a bigon) inside the face where `fixed` holds. Returns the pairs
/// and the pattern of the surviving local bits.
fn local_pairs(
    d: &OrientedDiagram,
    c: &Complex,
    xs: &[usize],
    local: &BTreeSet<Label>,
    fixed: Option<(usize, bool)>,
) -> Result<(Vec<(usize, usize)>, Vec<bool>)> {
    let n = d.n();
    let base: Vec<(usize, bool)> = fixed.into_iter().collect();
    let with = |extra: &[(usize, bool)]| -> Vec<Vertex> {
        let mut f = base.clone();
        f.extend_from_slice(extra);
        vertices_with(n, &f)
    };
    let probe = |pattern: &[bool]| -> Option<Label> {
        let mut v: Vertex = 0;
        for &(k, b) in base.iter().chain(xs.iter().zip(pattern).map(|(&k, &b)| (k, b)).collect::<Vec<_>>().iter()) {
            if b {
                v |= 1 << k;
            }
        }
        local_circle_label(&resolve(d, v), local)
    };
    match xs {
        [x] => {
            let x = *x;
            if let Some(l) = probe(&[false]) {
                let site = CancelSite { coord: x, lower: with(&[(x, false)]), label: l };
                Ok((merge_pairs(d, c, &site)?, vec![false]))
            } else if let Some(l) = probe(&[true]) {
                let site = CancelSite { coord: x, lower: with(&[(x, false)]), label: l };
                Ok((split_pairs(d, c, &site)?, vec![true]))
            } else {
                Err(Error::Move("no local circle at the kink".into()))
            }
        }
        [x, y] => {
            let (x, y) = (*x, *y);
            let patterns = [[false, false], [false, true], [true, false], [true, true]];
            let with_circle: Vec<([bool; 2], Label)> = patterns.iter().filter_map(|p| probe(p).map(|l| (*p, l))).collect();
            let (pa, l) = match with_circle[..] {
                [(p, l)] if p[0] != p[1] => (p, l),
                _ => return Err(Error::Move("bigon does not have a single mixed local circle".into())),
            };
            // merge coordinate is the one at 0 in the local-circle pattern
            let (mc, sc) = if pa[0] { (y, x) } else { (x, y) };
            let merge = CancelSite { coord: mc, lower: with(&[(x, pa[0]), (y, pa[1])]), label: l };
            let lo = [(x, pa[0]), (y, pa[1])].map(|(k, b)| (k, if k == sc { false } else { b }));
            let split = CancelSite { coord: sc, lower: with(&lo), label: l };
            let mut pairs = merge_pairs(d, c, &merge)?;
            pairs.extend(split_pairs(d, c, &split)?);
            Ok((pairs, vec![!pa[0], !pa[1]]))
        }
        _ => Err(Error::Internal("local cancellation needs one or two crossings".into())),
    }
}

/// A Reidemeister I or II move seen from its larger diagram.
struct Local {
    big: OrientedDiagram,
    small: OrientedDiagram,
    /// Label of `small` on the same strand piece, for non-local labels of `big`.
    key: HashMap<Label, Label>,
    /// Big crossing of each small crossing.
    crossing: Vec<usize>,
    /// Crossings of `big` with no counterpart.
    xs: Vec<usize>,
    local: BTreeSet<Label>,
}

impl Local {
    fn from_add(input: &OrientedDiagram, rw: Rewrite, local: BTreeSet<Label>) -> Local {
        let key = rw.links.iter().filter(|(_, r)| !local.contains(r)).map(|&(a, r)| (r, a)).collect();
        let mut crossing = vec![usize::MAX; input.n()];
        let mut xs = Vec::new();
        for (k, o) in rw.crossing_origin.iter().enumerate() {
            match o {
                Some(j) => crossing[*j] = k,
                None => xs.push(k),
            }
        }
        Local { big: rw.diagram, small: input.clone(), key, crossing, xs, local }
    }

    fn from_remove(input: &OrientedDiagram, rw: Rewrite, local: BTreeSet<Label>) -> Local {
        let key = rw.links.iter().filter(|(a, _)| !local.contains(a)).map(|&(a, r)| (a, r)).collect();
        let crossing: Vec<usize> = rw.crossing_origin.iter().map(|o| o.expect("removal keeps crossings")).collect();
        let xs = (0..input.n()).filter(|k| !crossing.contains(k)).collect();
        Local { big: input.clone(), small: rw.diagram, key, crossing, xs, local }
    }

    /// Reduce the big complex and identify the survivors with the small
    /// complex: returns the reduction and the signed isomorphism onto it.
    fn reduce(&self, big_c: &Complex, small_c: &Complex) -> Result<(Reduction, SparseMat)> {
        let (pairs, _) = local_pairs(&self.big, big_c, &self.xs, &self.local, None)?;
        let red = checked(big_c, &pairs)?;
        let mut rb = Resolutions::new(&self.big);
        let mut rs = Resolutions::new(&self.small);
        let mut pi = Vec::with_capacity(red.complex.len());
        for g in &red.complex.gens {
            let v = g.vertex;
            let vs: Vertex = self.crossing.iter().enumerate().filter(|&(_, &k)| v >> k & 1 == 1).map(|(j, _)| 1 << j).sum();
            let res = rb.get(v).clone();
            let small_res = rs.get(vs);
            let mut ids = Vec::new();
            for i in g.mono.ids() {
                if is_local(&res, i as usize, &self.local) {
                    continue;
                }
                let l = res.circles[i as usize].labels.iter().find(|l| !self.local.contains(l)).unwrap();
                let k = self.key.get(l).ok_or_else(|| Error::Internal(format!("label {l} has no counterpart")))?;
                ids.push(small_res.circle_of(*k) as u32);
            }
            let mono = Monomial::from_ids(&ids).ok_or_else(|| Error::Internal("two circles share a counterpart".into()))?;
            let t = Generator { vertex: vs, mono, xi: false };
            pi.push(small_c.index_of(&t).ok_or_else(|| Error::Internal(format!("no counterpart for {g:?}")))?);
        }
        let p = signed_iso(&red.complex, small_c, &pi)?;
        Ok((red, p))
    }
}

fn zero() -> Bigrading {
    Bigrading { i: 0, j: 0 }
}

/// Chain homotopy equivalence `C(d) -> C(mv(d))` for a Reidemeister move,
/// checked to be a chain map and a quasi-isomorphism.
pub fn reidemeister_map(d: &OrientedDiagram, mv: &Move, ring: Ring) -> Result<ChainMapWitness> {
    check_ring(ring)?;
    let mut w = match *mv {
        Move::R1Add { edge, positive } => {
            let rw = rewrite::r1_add(d, edge, positive)?;
            let linked: BTreeSet<Label> = rw.links.iter().map(|l| l.1).collect();
            let local = rw.diagram.edges().into_iter().filter(|l| !linked.contains(l)).collect();
            added(d, Local::from_add(d, rw, local), ring)?
        }
        Move::R1Remove { edge } => {
            let rw = rewrite::r1_remove(d, edge)?;
            removed(Local::from_remove(d, rw, BTreeSet::from([edge])), ring)?
        }
        Move::R2Add { over, under } => {
            let rw = rewrite::r2_add(d, over, under)?;
            let n = rw.diagram.n();
            let t = rw.diagram.tuples();
            let local = t[n - 2].iter().filter(|l| t[n - 1].contains(l)).copied().collect();
            added(d, Local::from_add(d, rw, local), ring)?
        }
        Move::R2Remove { e1, e2 } => {
            let rw = rewrite::r2_remove(d, e1, e2)?;
            removed(Local::from_remove(d, rw, BTreeSet::from([e1, e2])), ring)?
        }
        Move::R3 { crossings } => r3_map(d, crossings, ring)?,
        _ => return Err(Error::Move(format!("{mv} is not a Reidemeister move"))),
    };
    if !w.is_chain_map {
        return Err(Error::NotChainMap(format!("{mv}")));
    }
    w.verify_quasi_iso();
    Ok(w)
}

fn added(d: &OrientedDiagram, loc: Local, ring: Ring) -> Result<ChainMapWitness> {
    let small_c = build_complex(d, ring)?;
    let big_c = build_complex(&loc.big, ring)?;
    let (red, p) = loc.reduce(&big_c, &small_c)?;
    let map = red.g.compose(&p.transpose());
    Ok(ChainMapWitness::new(small_c, big_c, map, zero()))
}

fn removed(loc: Local, ring: Ring) -> Result<ChainMapWitness> {
    let big_c = build_complex(&loc.big, ring)?;
    let small_c = build_complex(&loc.small, ring)?;
    let (red, p) = loc.reduce(&big_c, &small_c)?;
    let map = p.compose(&red.f);
    Ok(ChainMapWitness::new(big_c, small_c, map, zero()))
}

/// Labels of the triangular face bounded by `cs`.
fn triangle_sides(d: &OrientedDiagram, cs: [usize; 3]) -> Result<BTreeSet<Label>> {
    let planar = d.planar();
    let mut want = cs;
    want.sort_unstable();
    planar
        .faces()
        .into_iter()
        .find(|f| {
            let mut xs: Vec<usize> = f.iter().map(|o| o.0).collect();
            xs.sort_unstable();
            xs == want
        })
        .map(|f| f.iter().map(|&o| planar.label_at(o)).collect())
        .ok_or_else(|| Error::Move(format!("crossings {cs:?} do not bound a triangle")))
}

/// One side of a Reidemeister III move reduced by cancelling the bigon that
/// appears in one resolution of the crossing `c` under the top strand.
struct R3Side {
    complex: Complex,
    red: Reduction,
    bigon_bit: bool,
    keys: Vec<(Vertex, Vec<Label>)>,
    top: [usize; 2],
}

impl R3Side {
    /// Keys with the bits of the two top-strand crossings exchanged.
    fn swapped_keys(&self) -> Vec<(Vertex, Vec<Label>)> {
        let [x, y] = self.top;
        let swap = |v: Vertex| (v & !(1 << x | 1 << y)) | (v >> x & 1) << y | (v >> y & 1) << x;
        self.keys.iter().map(|(v, ls)| (swap(*v), ls.clone())).collect()
    }
}

fn r3_side(d: &OrientedDiagram, cs: [usize; 3], ring: Ring) -> Result<R3Side> {
    let (c, [x, y]) = rewrite::r3_roles(d, cs)?;
    let sides = triangle_sides(d, cs)?;
    let complex = build_complex(d, ring)?;
    let has_bigon = |b: bool| {
        vertices_with(d.n(), &[(c, b)])
            .into_iter()
            .filter(|v| v & !(1 << c | 1 << x | 1 << y) == 0)
            .any(|v| local_circle_label(&resolve(d, v), &sides).is_some())
    };
    let bigon_bit = match (has_bigon(false), has_bigon(true)) {
        (true, false) => false,
        (false, true) => true,
        _ => return Err(Error::Move("triangle resolutions are not of braid type".into())),
    };
    let (pairs, _) = local_pairs(d, &complex, &[x, y], &sides, Some((c, bigon_bit)))?;
    let red = checked(&complex, &pairs)?;
    let mut rs = Resolutions::new(d);
    let keys = red
        .complex
        .gens
        .iter()
        .map(|g| {
            let v = g.vertex;
            let in_bigon = (v >> c & 1 == 1) == bigon_bit;
            let vk = if in_bigon { v & !(1 << x | 1 << y) } else { v };
            let res = rs.get(v);
            let mut ls: Vec<Label> = g
                .mono
                .ids()
                .map(|i| res.circles[i as usize].labels.iter().filter(|l| !sides.contains(l)).min().copied().unwrap_or(Label::MAX))
                .collect();
            ls.sort_unstable();
            (vk, ls)
        })
        .collect();
    Ok(R3Side { complex, red, bigon_bit, keys, top: [x, y] })
}

fn r3_map(d: &OrientedDiagram, cs: [usize; 3], ring: Ring) -> Result<ChainMapWitness> {
    let after = rewrite::r3(d, cs)?.diagram;
    let a = r3_side(d, cs, ring)?;
    let b = r3_side(&after, cs, ring)?;
    if a.bigon_bit != b.bigon_bit {
        return Err(Error::Internal("the two sides of R3 cancel different resolutions".into()));
    }
    // the isotopic half may identify the top-strand crossings either way
    let want: BTreeSet<&(Vertex, Vec<Label>)> = a.keys.iter().collect();
    let keys = [b.keys.clone(), b.swapped_keys()]
        .into_iter()
        .find(|ks| ks.len() == want.len() && ks.iter().collect::<BTreeSet<_>>() == want)
        .ok_or_else(|| Error::Internal("R3 survivors do not correspond".into()))?;
    let index: HashMap<&(Vertex, Vec<Label>), usize> = keys.iter().enumerate().map(|(k, key)| (key, k)).collect();
    let pi = a.keys.iter().map(|k| index[k]).collect::<Vec<_>>();
    let p = signed_iso(&a.red.complex, &b.red.complex, &pi)?;
    let map = b.red.g.compose(&p.compose(&a.red.f));
    Ok(ChainMapWitness::new(a.complex, b.complex, map, zero()))
}

/// Identify circles of `from` at `v` with circles of `to` at the same vertex
/// through a label map, and translate a monomial with its reordering sign.
fn translate(from: &Resolution, to: &Resolution, label: impl Fn(Label) -> Option<Label>, ids: &[u32], ring: Ring) -> Result<(Monomial, i64)> {
    let mut word = Vec::with_capacity(ids.len());
    for &i in ids {
        let l = from.circles[i as usize].labels[0];
        let m = label(l).ok_or_else(|| Error::Internal(format!("label {l} has no image")))?;
        let k = to.try_circle_of(m).ok_or_else(|| Error::Internal(format!("label {m} is missing after the move")))?;
        word.push(k as u32);
    }
    let e = normalize(&word, Zu::ONE, Ring::Unified);
    let (&mono, &z) = e.terms.iter().next().ok_or_else(|| Error::Internal("repeated circle".into()))?;
    Ok((mono, z.value_in(ring)))
}

/// Unit cobordism `C(d) -> C(d + U)`: `x |-> x`, of bidegree (0, 1).
pub fn birth_map(d: &OrientedDiagram, ring: Ring) -> Result<ChainMapWitness> {
    check_ring(ring)?;
    let big = rewrite::birth(d)?.diagram;
    let (src, dst) = (build_complex(d, ring)?, build_complex(&big, ring)?);
    let (mut rs, mut rb) = (Resolutions::new(d), Resolutions::new(&big));
    let mut trip = Vec::new();
    for (k, g) in src.gens.iter().enumerate() {
        let from = rs.get(g.vertex).clone();
        let ids: Vec<u32> = g.mono.ids().collect();
        let (mono, s) = translate(&from, rb.get(g.vertex), Some, &ids, ring)?;
        let t = dst.index_of(&Generator { vertex: g.vertex, mono, xi: false }).unwrap();
        trip.push((t, k, s));
    }
    let map = SparseMat::from_triplets(dst.len(), src.len(), trip);
    finish(ChainMapWitness::new(src, dst, map, Bigrading { i: 0, j: 1 }), "birth")
}

/// Counit cobordism `C(d) -> C(d - U)` removing the crossingless circle `u`
/// (the last one if `None`): contraction `y U |-> y`, of bidegree (0, 1).
pub fn death_map(d: &OrientedDiagram, u: Option<Label>, ring: Ring) -> Result<ChainMapWitness> {
    check_ring(ring)?;
    let small = rewrite::death(d, u)?.diagram;
    let u = u.or_else(|| d.free_loops().last().copied()).unwrap();
    let (src, dst) = (build_complex(d, ring)?, build_complex(&small, ring)?);
    let (mut rb, mut rs) = (Resolutions::new(d), Resolutions::new(&small));
    let mut trip = Vec::new();
    for (k, g) in src.gens.iter().enumerate() {
        let from = rb.get(g.vertex).clone();
        let iu = from.circle_of(u) as u32;
        if !g.mono.contains(iu) {
            continue;
        }
        // move U to the end before removing it
        let after = g.mono.ids().filter(|&i| i > iu).count();
        let pre = if after % 2 == 1 { Zu::XI.value_in(ring) } else { 1 };
        let ids: Vec<u32> = g.mono.ids().filter(|&i| i != iu).collect();
        let (mono, s) = translate(&from, rs.get(g.vertex), Some, &ids, ring)?;
        let t = dst.index_of(&Generator { vertex: g.vertex, mono, xi: false }).unwrap();
        trip.push((t, k, pre * s));
    }
    let map = SparseMat::from_triplets(dst.len(), src.len(), trip);
    finish(ChainMapWitness::new(src, dst, map, Bigrading { i: 0, j: 1 }), "death")
}

fn finish(w: ChainMapWitness, what: &str) -> Result<ChainMapWitness> {
    if w.is_chain_map {
        Ok(w)
    } else {
        Err(Error::NotChainMap(what.into()))
    }
}

/// Saddle cobordism along edges `e`, `f`: the last-coordinate edge maps of
/// the diagram whose last crossing resolves to `d` and to the result,
/// transported to the standard complexes of both. Bidegree (0, -1).
pub fn saddle_map(d: &OrientedDiagram, e: Label, f: Label, ring: Ring) -> Result<ChainMapWitness> {
    check_ring(ring)?;
    let s = rewrite::saddle(d, e, f)?;
    let n = d.n();
    let mut dirs = d.dirs().to_vec();
    dirs.push([false, true, true, false]);
    let big = OrientedDiagram::with_dirs(s.big.clone(), s.big_arrows.clone(), dirs)?;
    let cl = build_with(&big, &Assigned::new(&big, None)?, ring, false)?;
    let ends = [d.clone(), s.after.clone()];
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (k, g) in cl.gens.iter().enumerate() {
        parts[(g.vertex >> n & 1) as usize].push(k);
    }
    let mut isos = Vec::new();
    let mut complexes = Vec::new();
    for b in 0..2 {
        let target = build_complex(&ends[b], ring)?;
        let rep = rewrite::resolve_crossing(&s.big, n, b == 1).rep;
        let (mut rl, mut rt) = (Resolutions::new(&big), Resolutions::new(&ends[b]));
        let mut pi = Vec::new();
        for &k in &parts[b] {
            let g = cl.gens[k];
            let v = g.vertex & !(1 << n);
            let from = rl.get(g.vertex).clone();
            let ids: Vec<u32> = g.mono.ids().collect();
            let (mono, _) = translate(&from, rt.get(v), |l| rep.get(&l).copied(), &ids, ring)?;
            pi.push(target.index_of(&Generator { vertex: v, mono, xi: false }).ok_or_else(|| Error::Internal("saddle end mismatch".into()))?);
        }
        let face = Complex::new(
            ring,
            false,
            parts[b].iter().map(|&k| cl.gens[k]).collect(),
            pi.iter().map(|&t| target.grading[t]).collect(),
            cl.d.submatrix(&parts[b], &parts[b]),
        );
        isos.push(signed_iso(&face, &target, &pi)?);
        complexes.push(target);
    }
    let t = cl.d.submatrix(&parts[1], &parts[0]);
    let t = SparseMat::from_triplets(
        t.nrows,
        t.ncols(),
        t.entries().map(|(r, c, v)| (r, c, v * cube::edge_sign(Edge { lower: cl.gens[parts[0][c]].vertex, coord: n }))),
    );
    let map = isos[1].compose(&t.compose(&isos[0].transpose()));
    let [c0, c1]: [Complex; 2] = complexes.try_into().unwrap();
    finish(ChainMapWitness::new(c0, c1, map, Bigrading { i: 0, j: -1 }), "saddle")
}

/// Witness for one elementary move starting at `d`.
pub fn move_map(d: &OrientedDiagram, mv: &Move, ring: Ring) -> Result<ChainMapWitness> {
    match *mv {
        Move::Birth => birth_map(d, ring),
        Move::Death { circle } => death_map(d, circle, ring),
        Move::Saddle { e, f } => saddle_map(d, e, f, ring),
        _ => reidemeister_map(d, mv, ring),
    }
}

/// Composite witness of a movie starting at `start`.
pub fn movie_map(start: &OrientedDiagram, script: &MovieScript, ring: Ring) -> Result<ChainMapWitness> {
    check_ring(ring)?;
    let mut d = start.clone();
    let mut acc = ChainMapWitness::identity(build_complex(&d, ring)?);
    for (line, mv) in &script.moves {
        let w = move_map(&d, mv, ring).map_err(|e| Error::Movie { line: *line, msg: e.to_string() })?;
        acc = acc.then(&w)?;
        d = mv.apply(&d)?;
    }
    Ok(acc)
}

/// Whether two witnesses have the same mod-2 reduction.
pub fn same_mod2(a: &ChainMapWitness, b: &ChainMapWitness) -> bool {
    a.map.nrows == b.map.nrows && a.map.ncols() == b.map.ncols() && a.mod2() == b.mod2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named;
    use crate::homology::homology;

    fn u() -> OrientedDiagram {
        OrientedDiagram::unknot()
    }

    #[test]
    fn elimination_identities() {
        let d = named("trefoil_right").unwrap();
        let c = build_complex(&d, Ring::Odd).unwrap();
        // greedily cancel unit entries
        let mut used = vec![false; c.len()];
        let mut pairs = Vec::new();
        for (r, s, v) in c.d.entries() {
            if v.abs() == 1 && !used[r] && !used[s] {
                used[r] = true;
                used[s] = true;
                pairs.push((s, r));
                break;
            }
        }
        let red = eliminate(&c, &pairs).unwrap();
        assert_eq!(red.complex.len() + 2 * pairs.len(), c.len());
        assert!(red.verify(&c));
        assert_eq!(homology(&red.complex, Coeffs::Z), homology(&c, Coeffs::Z));
    }

    #[test]
    fn non_unit_is_rejected() {
        let c = build_complex(&named("hopf").unwrap(), Ring::Even).unwrap();
        let zero_entry = (0..c.len()).flat_map(|s| (0..c.len()).map(move |r| (s, r))).find(|&(s, r)| c.d.get(r, s) == 0).unwrap();
        assert!(matches!(eliminate(&c, &[zero_entry]), Err(Error::Cancellation(_))));
    }

    #[test]
    fn r1_kinks() {
        for ring in [Ring::Even, Ring::Odd, Ring::Mod2] {
            for positive in [true, false] {
                let w = reidemeister_map(&u(), &Move::R1Add { edge: 1, positive }, ring).unwrap();
                assert!(w.is_chain_map && w.is_quasi_iso == Some(true), "{ring:?} {positive}");
                let d = Move::R1Add { edge: 1, positive }.apply(&u()).unwrap();
                let loop_edge = d.edges().into_iter().find(|&l| rewrite::kink_at(&d, l).is_ok() && l != 1).unwrap();
                let w = reidemeister_map(&d, &Move::R1Remove { edge: loop_edge }, ring).unwrap();
                assert_eq!(w.is_quasi_iso, Some(true));
            }
        }
        let t = named("trefoil_right").unwrap();
        for positive in [true, false] {
            for e in t.edges() {
                let w = reidemeister_map(&t, &Move::R1Add { edge: e, positive }, Ring::Odd).unwrap();
                assert_eq!(w.is_quasi_iso, Some(true));
            }
        }
    }

    #[test]
    fn r2_moves() {
        let t = named("trefoil_right").unwrap();
        for ring in [Ring::Even, Ring::Odd] {
            for &(a, b) in &[(1, 2), (2, 1), (1, 4), (3, 6)] {
                let mv = Move::R2Add { over: a, under: b };
                let Ok(after) = mv.apply(&t) else { continue };
                let w = reidemeister_map(&t, &mv, ring).unwrap();
                assert_eq!(w.is_quasi_iso, Some(true), "{mv}");
                let n = after.n();
                let tt = after.tuples();
                let shared: Vec<Label> = tt[n - 2].iter().filter(|l| tt[n - 1].contains(l)).copied().collect();
                let back = Move::R2Remove { e1: shared[0], e2: shared[1] };
                let w = reidemeister_map(&after, &back, ring).unwrap();
                assert_eq!(w.is_quasi_iso, Some(true), "{back}");
            }
        }
    }

    #[test]
    fn r3_braid() {
        let d = named("braid_r3").unwrap();
        let mut found = 0;
        for cs in [[0, 1, 2], [1, 2, 3], [2, 3, 4], [0, 2, 3], [0, 1, 3]] {
            let mv = Move::R3 { crossings: cs };
            if mv.apply(&d).is_err() {
                continue;
            }
            for ring in [Ring::Even, Ring::Odd] {
                let w = reidemeister_map(&d, &mv, ring).unwrap();
                assert_eq!(w.is_quasi_iso, Some(true), "{mv} {ring:?}");
            }
            found += 1;
        }
        assert!(found > 0);
    }

    #[test]
    fn birth_and_death() {
        for ring in [Ring::Even, Ring::Odd] {
            let b = birth_map(&u(), ring).unwrap();
            assert_eq!((b.source.len(), b.target.len()), (2, 4));
            let after = Move::Birth.apply(&u()).unwrap();
            let dm = death_map(&after, None, ring).unwrap();
            assert!(b.then(&dm).unwrap().map.is_zero());
            let t = named("hopf").unwrap();
            let b = birth_map(&t, ring).unwrap();
            let dm = death_map(&Move::Birth.apply(&t).unwrap(), None, ring).unwrap();
            assert!(b.is_chain_map && dm.is_chain_map);
        }
        let odd = birth_map(&named("trefoil_right").unwrap(), Ring::Odd).unwrap();
        let even = birth_map(&named("trefoil_right").unwrap(), Ring::Even).unwrap();
        assert!(same_mod2(&odd, &even));
    }

    #[test]
    fn saddles() {
        let unlink = OrientedDiagram::parse("U U").unwrap();
        let ls = unlink.free_loops().to_vec();
        for ring in [Ring::Even, Ring::Odd] {
            let w = saddle_map(&unlink, ls[0], ls[1], ring).unwrap();
            assert_eq!((w.source.len(), w.target.len()), (4, 2));
            let w = saddle_map(&u(), 1, 1, ring).unwrap();
            assert_eq!((w.source.len(), w.target.len()), (2, 4));
            assert_eq!(w.shift, Bigrading { i: 0, j: -1 });
        }
        let h = named("hopf").unwrap();
        let t = named("trefoil_right").unwrap();
        for d in [h, t] {
            for c in 0..d.n() {
                let tup = d.tuples()[c];
                let over_out = if d.sign(c) > 0 { tup[1] } else { tup[3] };
                let odd = saddle_map(&d, tup[0], over_out, Ring::Odd).unwrap();
                let even = saddle_map(&d, tup[0], over_out, Ring::Even).unwrap();
                assert!(same_mod2(&odd, &even));
            }
        }
    }

    #[test]
    fn movies() {
        let empty = MovieScript::default();
        let w = movie_map(&u(), &empty, Ring::Odd).unwrap();
        assert_eq!(w.map, SparseMat::identity(2));
        let tube = MovieScript::parse("birth\nsaddle e1 e2").unwrap();
        let w = movie_map(&u(), &tube, Ring::Mod2).unwrap();
        assert!(w.is_chain_map);
        assert!(quasi_iso(&w.map, &w.source, &w.target));
        let t = named("trefoil_right").unwrap();
        let (moves, _) = crate::corpus::oriented_smoothing(&t, 0).unwrap();
        let script = MovieScript { start: None, moves: moves.into_iter().enumerate().map(|(k, m)| (k + 1, m)).collect() };
        let odd = movie_map(&t, &script, Ring::Odd).unwrap();
        let even = movie_map(&t, &script, Ring::Even).unwrap();
        assert!(odd.is_chain_map && even.is_chain_map);
        assert!(same_mod2(&odd, &even));
    }

    #[test]
    fn edge_assignments_agree_up_to_signs() {
        for d in crate::corpus::random_corpus(3, 30, 6) {
            let m = cube::edges(d.n()).len();
            let rev: Vec<usize> = (0..m).rev().collect();
            let a1 = Assigned::new(&d, None).unwrap();
            let a2 = Assigned::new(&d, Some(&rev)).unwrap();
            let c1 = build_with(&d, &a1, Ring::Odd, false).unwrap();
            let c2 = build_with(&d, &a2, Ring::Odd, false).unwrap();
            let pi: Vec<usize> = (0..c1.len()).collect();
            assert!(signed_iso(&c1, &c2, &pi).is_ok(), "{d}");
        }
    }
}
