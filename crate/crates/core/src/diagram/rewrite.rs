//! Local rewrites of PD codes: partial resolutions, Reidemeister moves,
//! births, deaths and saddles.

use std::collections::BTreeMap;

use super::{Label, Occ, OrientedDiagram, Planar};
use crate::error::{Error, Result};

/// Union-find over edge labels; the representative is the least label.
#[derive(Default)]
struct Classes(BTreeMap<Label, Label>);

impl Classes {
    fn find(&mut self, x: Label) -> Label {
        let p = *self.0.get(&x).unwrap_or(&x);
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0.insert(x, r);
        r
    }

    fn union(&mut self, a: Label, b: Label) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0.insert(hi, lo);
        }
    }
}

/// Result of deleting crossings and splicing their legs together.
#[derive(Clone, Debug)]
pub struct Spliced {
    pub planar: Planar,
    /// New crossing index -> old crossing index.
    pub origin: Vec<usize>,
    /// Old label -> label in the result.
    pub rep: BTreeMap<Label, Label>,
}

/// Remove the crossings in `remove`, identify the label pairs in `joins`,
/// and turn label classes left without occurrences into free loops.
pub fn splice(planar: &Planar, remove: &[usize], joins: &[(Label, Label)]) -> Spliced {
    let mut cl = Classes::default();
    for &(a, b) in joins {
        cl.union(a, b);
    }
    let mut tuples = Vec::new();
    let mut origin = Vec::new();
    for (x, t) in planar.tuples.iter().enumerate() {
        if !remove.contains(&x) {
            tuples.push(t.map(|l| cl.find(l)));
            origin.push(x);
        }
    }
    let mut free_loops: Vec<Label> = planar.free_loops.iter().map(|&u| cl.find(u)).collect();
    let used: std::collections::BTreeSet<Label> = tuples.iter().flatten().copied().collect();
    let mut fresh: Vec<Label> = remove
        .iter()
        .flat_map(|&x| planar.tuples[x])
        .map(|l| cl.find(l))
        .filter(|r| !used.contains(r) && !free_loops.contains(r))
        .collect();
    fresh.sort_unstable();
    fresh.dedup();
    free_loops.extend(fresh);
    let rep = planar.labels().into_iter().map(|l| (l, cl.find(l))).collect();
    Spliced { planar: Planar { tuples, free_loops }, origin, rep }
}

/// Smooth crossing `k` with its 0- or 1-resolution.
pub fn resolve_crossing(planar: &Planar, k: usize, bit: bool) -> Spliced {
    let [a, b, c, d] = planar.tuples[k];
    let joins = if bit { [(a, d), (b, c)] } else { [(a, b), (c, d)] };
    splice(planar, &[k], &joins)
}

/// A rewritten diagram with provenance of its crossings and labels.
#[derive(Clone, Debug)]
pub struct Rewrite {
    pub diagram: OrientedDiagram,
    /// Crossing of the input each crossing of the result came from.
    pub crossing_origin: Vec<Option<usize>>,
    /// Pairs `(input label, result label)` lying on the same strand piece.
    pub links: Vec<(Label, Label)>,
}

fn build(
    d: &OrientedDiagram,
    planar: Planar,
    crossing_origin: Vec<Option<usize>>,
    links: Vec<(Label, Label)>,
    hint_ok: &[bool],
    basepoint: Option<Label>,
) -> Result<Rewrite> {
    let hinted: Vec<Option<usize>> =
        crossing_origin.iter().zip(hint_ok).map(|(&o, &ok)| if ok { o } else { None }).collect();
    let hint = d.hint_from(&hinted);
    let arrows = crossing_origin.iter().map(|o| o.map_or(true, |x| d.arrows()[x])).collect();
    let diagram = OrientedDiagram::with_hint(planar, Some(arrows), basepoint, Some(&hint))?;
    Ok(Rewrite { diagram, crossing_origin, links })
}

fn identity_links(d: &OrientedDiagram) -> Vec<(Label, Label)> {
    d.edges().into_iter().map(|l| (l, l)).collect()
}

fn from_splice(d: &OrientedDiagram, s: Spliced) -> Result<Rewrite> {
    let origin: Vec<Option<usize>> = s.origin.iter().map(|&x| Some(x)).collect();
    let links = s.rep.iter().map(|(&a, &b)| (a, b)).collect();
    let ok = vec![true; origin.len()];
    let bp = d.basepoint().map(|b| s.rep[&b]);
    build(d, s.planar, origin, links, &ok, bp)
}

/// Insert a kink on edge `e`. The new crossing is appended last.
pub fn r1_add(d: &OrientedDiagram, e: Label, positive: bool) -> Result<Rewrite> {
    let mut planar = d.planar().clone();
    let f = planar.max_label() + 1;
    let mut links = identity_links(d);
    if let Some(k) = planar.free_loops.iter().position(|&u| u == e) {
        planar.free_loops.remove(k);
        planar.tuples.push(if positive { [e, e, f, f] } else { [e, f, f, e] });
    } else {
        let (y, q) = d.head(e).ok_or_else(|| Error::Move(format!("no edge {e}")))?;
        let g = f + 1;
        planar.tuples[y][q] = g;
        planar.tuples.push(if positive { [e, g, f, f] } else { [e, f, f, g] });
        links.push((e, g));
    }
    let mut origin: Vec<Option<usize>> = (0..d.n()).map(Some).collect();
    origin.push(None);
    let ok = vec![true; origin.len()];
    build(d, planar, origin, links, &ok, d.basepoint())
}

/// Crossing index and loop legs of the kink whose loop edge is `f`.
pub fn kink_at(d: &OrientedDiagram, f: Label) -> Result<(usize, usize)> {
    let occ = d.planar().occurrences();
    let o = occ.get(&f).ok_or_else(|| Error::Move(format!("no edge {f}")))?;
    let ((x, p), (y, q)) = (o[0], o[1]);
    if x != y || (p + 2) % 4 == q {
        return Err(Error::Move(format!("edge {f} is not the loop of a kink")));
    }
    // the loop occupies legs p0, p0+1
    let p0 = if (p + 1) % 4 == q { p } else { q };
    Ok((x, p0))
}

/// Remove the kink whose loop edge is `f`.
pub fn r1_remove(d: &OrientedDiagram, f: Label) -> Result<Rewrite> {
    let (x, p0) = kink_at(d, f)?;
    let t = d.tuples()[x];
    let r = t[(p0 + 2) % 4];
    let s = t[(p0 + 3) % 4];
    from_splice(d, splice(d.planar(), &[x], &[(r, s), (r, f)]))
}

fn face_with(planar: &Planar, e: Label, f: Label, prefer: impl Fn(Occ, Occ) -> bool) -> Option<(Occ, Occ)> {
    let mut fallback = None;
    for face in planar.faces() {
        let de = face.iter().find(|&&o| planar.label_at(o) == e);
        let df = face.iter().find(|&&o| planar.label_at(o) == f);
        if let (Some(&a), Some(&c)) = (de, df) {
            if prefer(a, c) {
                return Some((a, c));
            }
            fallback.get_or_insert((a, c));
        }
    }
    fallback
}

/// Push edge `over` across edge `under`, creating a bigon. The two new
/// crossings are appended last.
pub fn r2_add(d: &OrientedDiagram, over: Label, under: Label) -> Result<Rewrite> {
    if over == under {
        return Err(Error::Move("R2 needs two distinct edges".into()));
    }
    let planar0 = d.planar();
    if planar0.free_loops.contains(&over) || planar0.free_loops.contains(&under) {
        return Err(Error::Move("R2 on a free loop".into()));
    }
    let occ = planar0.occurrences();
    let (alpha, gamma) = face_with(planar0, over, under, |_, _| true)
        .ok_or_else(|| Error::Move(format!("edges {over} and {under} share no face")))?;
    let beta = planar0.twin(&occ, alpha);
    let delta = planar0.twin(&occ, gamma);
    let mut planar = planar0.clone();
    let m = planar.max_label();
    let (m1, e2, m2, f2) = (m + 1, m + 2, m + 3, m + 4);
    planar.tuples[beta.0][beta.1] = e2;
    planar.tuples[delta.0][delta.1] = f2;
    let along = d.dirs()[gamma.0][gamma.1];
    let start = if along { 3 } else { 1 };
    let rot = |legs: [Label; 4]| -> [Label; 4] { std::array::from_fn(|k| legs[(k + start) % 4]) };
    planar.tuples.push(rot([over, f2, m1, m2]));
    planar.tuples.push(rot([e2, m2, m1, under]));
    let mut links = identity_links(d);
    links.extend([(over, m1), (over, e2), (under, m2), (under, f2)]);
    let mut origin: Vec<Option<usize>> = (0..d.n()).map(Some).collect();
    origin.extend([None, None]);
    let ok = vec![true; origin.len()];
    build(d, planar, origin, links, &ok, d.basepoint())
}

/// The two crossings and positions of a removable bigon bounded by `e1`, `e2`.
pub fn bigon_at(d: &OrientedDiagram, e1: Label, e2: Label) -> Result<[(usize, usize, usize); 2]> {
    let planar = d.planar();
    let occ = planar.occurrences();
    let bad = || Error::Move(format!("edges {e1} and {e2} do not bound an R2 bigon"));
    let face = planar
        .faces()
        .into_iter()
        .find(|f| {
            f.len() == 2 && {
                let mut ls = [planar.label_at(f[0]), planar.label_at(f[1])];
                ls.sort_unstable();
                let mut want = [e1, e2];
                want.sort_unstable();
                ls == want
            }
        })
        .ok_or_else(bad)?;
    let _ = occ;
    // (crossing, leg of e1, leg of e2) for both crossings
    let mut out = [(0, 0, 0); 2];
    let crossings = [face[0].0, face[1].0];
    if crossings[0] == crossings[1] {
        return Err(bad());
    }
    for (k, &x) in crossings.iter().enumerate() {
        let t = d.tuples()[x];
        let p1 = (0..4).find(|&p| t[p] == e1).ok_or_else(bad)?;
        let p2 = (0..4).find(|&p| t[p] == e2).ok_or_else(bad)?;
        out[k] = (x, p1, p2);
    }
    // the strand through e1 must be on the same level at both crossings
    if (out[0].1 % 2) != (out[1].1 % 2) {
        return Err(bad());
    }
    Ok(out)
}

/// Remove the bigon bounded by edges `e1` and `e2`.
pub fn r2_remove(d: &OrientedDiagram, e1: Label, e2: Label) -> Result<Rewrite> {
    let [(x, p1, p2), (y, q1, q2)] = bigon_at(d, e1, e2)?;
    let (tx, ty) = (d.tuples()[x], d.tuples()[y]);
    let joins = [
        (tx[(p1 + 2) % 4], e1),
        (e1, ty[(q1 + 2) % 4]),
        (tx[(p2 + 2) % 4], e2),
        (e2, ty[(q2 + 2) % 4]),
    ];
    from_splice(d, splice(d.planar(), &[x, y], &joins))
}

#[derive(Clone, Copy, Debug)]
struct Strand {
    input: Label,
    side: Label,
    output: Label,
    first: usize,
}

/// Triangle data for an R3 move: the three strands and, per crossing,
/// the (under, over) strand indices.
fn triangle(d: &OrientedDiagram, cs: [usize; 3]) -> Result<([Strand; 3], Vec<(usize, usize, usize)>)> {
    let planar = d.planar();
    let occ = planar.occurrences();
    let mut want = cs;
    want.sort_unstable();
    let face = planar
        .faces()
        .into_iter()
        .find(|f| {
            let mut xs: Vec<usize> = f.iter().map(|o| o.0).collect();
            xs.sort_unstable();
            xs == want
        })
        .ok_or_else(|| Error::Move(format!("crossings {cs:?} do not bound a triangle")))?;
    let mut strands = Vec::new();
    let mut legs: Vec<(usize, usize, usize)> = Vec::new(); // (crossing, leg, strand)
    for (k, &(x, p)) in face.iter().enumerate() {
        let (y, q) = planar.twin(&occ, (x, p));
        let side = planar.label_at((x, p));
        let ext_x = planar.label_at((x, (p + 2) % 4));
        let ext_y = planar.label_at((y, (q + 2) % 4));
        let s = if d.dirs()[x][p] {
            Strand { input: ext_x, side, output: ext_y, first: x }
        } else {
            Strand { input: ext_y, side, output: ext_x, first: y }
        };
        strands.push(s);
        legs.push((x, p, k));
        legs.push((y, q, k));
    }
    let strands: [Strand; 3] = strands.try_into().unwrap();
    let mut per_crossing = Vec::new();
    let mut over_count = [0; 3];
    for &c in &cs {
        let here: Vec<(usize, usize)> = legs.iter().filter(|l| l.0 == c).map(|l| (l.1, l.2)).collect();
        if here.len() != 2 || here[0].1 == here[1].1 {
            return Err(Error::Move("degenerate triangle".into()));
        }
        let (under, over) = if here[0].0 % 2 == 0 { (here[0].1, here[1].1) } else { (here[1].1, here[0].1) };
        if here[0].0 % 2 == here[1].0 % 2 {
            return Err(Error::Move("degenerate triangle".into()));
        }
        over_count[over] += 1;
        per_crossing.push((c, under, over));
    }
    let mut sorted = over_count;
    sorted.sort_unstable();
    if sorted != [0, 1, 2] {
        return Err(Error::Move("triangle has no strand passing over both others".into()));
    }
    Ok((strands, per_crossing))
}

/// Reidemeister III across the triangular face bounded by three crossings.
/// Crossing indices are preserved: crossing `c` of the result joins the
/// same pair of strands as crossing `c` of the input.
pub fn r3(d: &OrientedDiagram, cs: [usize; 3]) -> Result<Rewrite> {
    if cs.iter().any(|&c| c >= d.n()) || cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
        return Err(Error::Move(format!("bad R3 crossings {cs:?}")));
    }
    let (strands, per_crossing) = triangle(d, cs)?;
    let mut planar = d.planar().clone();
    for (c, u, o) in per_crossing {
        let ends = |s: &Strand| if s.first == c { (s.side, s.output) } else { (s.input, s.side) };
        let (u_in, u_out) = ends(&strands[u]);
        let (o_in, o_out) = ends(&strands[o]);
        planar.tuples[c] = if d.sign(c) > 0 { [u_in, o_out, u_out, o_in] } else { [u_in, o_in, u_out, o_out] };
    }
    let origin: Vec<Option<usize>> = (0..d.n()).map(Some).collect();
    let ok: Vec<bool> = (0..d.n()).map(|x| !cs.contains(&x)).collect();
    let r = build(d, planar, origin, identity_links(d), &ok, d.basepoint())?;
    for &c in &cs {
        if r.diagram.sign(c) != d.sign(c) {
            return Err(Error::Internal("R3 changed a crossing sign".into()));
        }
    }
    Ok(r)
}

/// Which strand passes over both others in the triangle, as
/// `(crossing between the other two strands, [crossings on the top strand])`.
pub fn r3_roles(d: &OrientedDiagram, cs: [usize; 3]) -> Result<(usize, [usize; 2])> {
    let (_, per_crossing) = triangle(d, cs)?;
    let mut over_count = [0; 3];
    for &(_, _, o) in &per_crossing {
        over_count[o] += 1;
    }
    let top = (0..3).find(|&s| over_count[s] == 2).unwrap();
    let mut on_top = per_crossing.iter().filter(|p| p.2 == top).map(|p| p.0);
    let pair = [on_top.next().unwrap(), on_top.next().unwrap()];
    let other = per_crossing.iter().find(|p| p.2 != top).unwrap().0;
    Ok((other, pair))
}

pub fn birth(d: &OrientedDiagram) -> Result<Rewrite> {
    let mut planar = d.planar().clone();
    let u = planar.max_label() + 1;
    planar.free_loops.push(u);
    let origin: Vec<Option<usize>> = (0..d.n()).map(Some).collect();
    let ok = vec![true; d.n()];
    build(d, planar, origin, identity_links(d), &ok, d.basepoint())
}

/// Remove the free loop `u` (the last one if `None`).
pub fn death(d: &OrientedDiagram, u: Option<Label>) -> Result<Rewrite> {
    let mut planar = d.planar().clone();
    let k = match u {
        Some(u) => planar.free_loops.iter().position(|&l| l == u),
        None => planar.free_loops.len().checked_sub(1),
    }
    .ok_or_else(|| Error::Move("death needs a crossingless circle".into()))?;
    let u = planar.free_loops.remove(k);
    let mut links = identity_links(d);
    links.retain(|&(a, _)| a != u);
    let origin: Vec<Option<usize>> = (0..d.n()).map(Some).collect();
    let ok = vec![true; d.n()];
    let bp = d.basepoint().filter(|&b| b != u);
    build(d, planar, origin, links, &ok, bp)
}

/// A saddle presented as an `(n+1)`-crossing diagram whose last crossing
/// has the input as its 0-resolution and the result as its 1-resolution.
#[derive(Clone, Debug)]
pub struct Saddle {
    pub big: Planar,
    pub big_arrows: Vec<bool>,
    pub after: OrientedDiagram,
}

pub fn saddle(d: &OrientedDiagram, e: Label, f: Label) -> Result<Saddle> {
    let p0 = d.planar();
    let labels = p0.labels();
    for l in [e, f] {
        if !labels.contains(&l) {
            return Err(Error::Move(format!("no edge {l}")));
        }
    }
    let mut big = p0.clone();
    let m = big.max_label();
    let is_free = |l: Label| p0.free_loops.contains(&l);
    let drop_free = |big: &mut Planar, l: Label| big.free_loops.retain(|&u| u != l);
    match (is_free(e), is_free(f)) {
        (true, true) if e == f => {
            drop_free(&mut big, e);
            big.tuples.push([e, m + 1, m + 1, e]);
        }
        (true, true) => {
            drop_free(&mut big, e);
            drop_free(&mut big, f);
            big.tuples.push([f, f, e, e]);
        }
        (false, true) | (true, false) => {
            let (edge, u) = if is_free(f) { (e, f) } else { (f, e) };
            let (y, q) = d.head(edge).unwrap();
            big.tuples[y][q] = m + 1;
            drop_free(&mut big, u);
            big.tuples.push([edge, m + 1, u, u]);
        }
        (false, false) if e == f => {
            let (y, q) = d.head(e).unwrap();
            big.tuples[y][q] = m + 2;
            big.tuples.push([e, m + 1, m + 1, m + 2]);
        }
        (false, false) => {
            let occ = p0.occurrences();
            let coherent = |a: Occ, c: Occ| d.dirs()[a.0][a.1] == d.dirs()[c.0][c.1];
            let (alpha, gamma) = face_with(p0, e, f, coherent)
                .ok_or_else(|| Error::Move(format!("edges {e} and {f} share no face")))?;
            let beta = p0.twin(&occ, alpha);
            let delta = p0.twin(&occ, gamma);
            let (e2, f2) = (m + 1, m + 2);
            big.tuples[beta.0][beta.1] = e2;
            big.tuples[delta.0][delta.1] = f2;
            big.tuples.push([f2, f, e2, e]);
        }
    }
    let last = big.tuples.len() - 1;
    let s = resolve_crossing(&big, last, true);
    let origin: Vec<Option<usize>> = s.origin.iter().map(|&x| Some(x)).collect();
    let hint = d.hint_from(&origin);
    let bp = d.basepoint().map(|b| s.rep[&b]);
    let after = OrientedDiagram::with_hint(s.planar, Some(d.arrows().to_vec()), bp, Some(&hint))
        .map_err(|_| Error::Move(format!("saddle at {e},{f} is not orientable")))?;
    if after.dirs() != d.dirs() {
        return Err(Error::Move(format!("saddle at {e},{f} is not orientable")));
    }
    let mut big_arrows = d.arrows().to_vec();
    big_arrows.push(true);
    Ok(Saddle { big, big_arrows, after })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL: &str = "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]";

    fn connected_faces_ok(d: &OrientedDiagram) {
        if d.n() > 0 && d.free_loops().is_empty() && d.components() == 1 {
            assert_eq!(d.planar().faces().len(), d.n() + 2, "{d}");
        }
    }

    #[test]
    fn resolve_hopf() {
        let d = OrientedDiagram::parse("PD[X(1,4,2,3),X(3,2,4,1)]").unwrap();
        let s = resolve_crossing(d.planar(), 1, false);
        assert_eq!(s.planar.tuples, vec![[1, 4, 2, 3].map(|l| s.rep[&l])]);
    }

    #[test]
    fn kinks_round_trip() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        for positive in [true, false] {
            let r = r1_add(&d, 3, positive).unwrap();
            assert_eq!(r.diagram.n(), 4);
            assert_eq!(r.diagram.sign(3) > 0, positive);
            assert_eq!(r.diagram.components(), 1);
            connected_faces_ok(&r.diagram);
            let loop_edge = d.planar().max_label() + 1;
            let back = r1_remove(&r.diagram, loop_edge).unwrap();
            assert_eq!(back.diagram.n(), 3);
            for x in 0..3 {
                assert_eq!(back.diagram.sign(x), d.sign(x));
            }
        }
        let u = OrientedDiagram::unknot();
        let k = r1_add(&u, 1, true).unwrap().diagram;
        assert_eq!(k.to_string(), "PD[X(1,1,2,2)]");
        let back = r1_remove(&k, 2).unwrap().diagram;
        assert_eq!(back.n(), 0);
        assert_eq!(back.free_loops().len(), 1);
    }

    #[test]
    fn bigon_round_trip() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let faces = d.planar().faces();
        let mut done = 0;
        for face in faces {
            for i in 0..face.len() {
                for j in 0..face.len() {
                    let (e, f) = (d.planar().label_at(face[i]), d.planar().label_at(face[j]));
                    if e == f {
                        continue;
                    }
                    let r = r2_add(&d, e, f).unwrap();
                    let n = r.diagram.n();
                    assert_eq!(n, 5);
                    assert_eq!(r.diagram.sign(3), -r.diagram.sign(4));
                    connected_faces_ok(&r.diagram);
                    let m = d.planar().max_label();
                    let back = r2_remove(&r.diagram, m + 1, m + 3).unwrap();
                    assert_eq!(back.diagram.n(), 3);
                    done += 1;
                }
            }
        }
        assert!(done > 0);
    }

    #[test]
    fn r3_on_braid_closure() {
        // closure of s1 s2 s1 on three strands
        let d = crate::corpus::braid_closure(3, &[1, 2, 1]).unwrap();
        let r = r3(&d, [0, 1, 2]).unwrap();
        assert_eq!(r.diagram.n(), 3);
        connected_faces_ok(&r.diagram);
        let back = r3(&r.diagram, [0, 1, 2]).unwrap();
        assert_eq!(back.diagram.planar().faces().len(), d.planar().faces().len());
    }

    #[test]
    fn saddles() {
        let u2 = OrientedDiagram::parse("U U").unwrap();
        let s = saddle(&u2, 1, 2).unwrap();
        assert_eq!(s.after.free_loops().len(), 1);
        let u = OrientedDiagram::unknot();
        let s = saddle(&u, 1, 1).unwrap();
        assert_eq!(s.after.free_loops().len(), 2);
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let s = saddle(&d, 1, 1).unwrap();
        assert_eq!(s.after.components(), 2);
        assert_eq!(s.big.tuples.len(), 4);
        let z = resolve_crossing(&s.big, 3, false);
        assert_eq!(z.planar.tuples, d.tuples());
    }

    #[test]
    fn birth_death() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let b = birth(&d).unwrap().diagram;
        assert_eq!(b.components(), 2);
        let back = death(&b, None).unwrap().diagram;
        assert_eq!(back, d);
        assert!(death(&d, None).is_err());
    }
}
