//! Oriented link diagrams in PD notation.

mod pd;
pub mod movie;
pub mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use movie::{Move, MovieScript};

pub type Label = u32;

/// A position in a PD code: `(crossing index, leg 0..4)`.
pub type Occ = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    /// Counterclockwise, starting from the incoming under-strand.
    pub ends: [Label; 4],
    pub sign: i8,
}

/// Unoriented planar data: crossing tuples plus crossingless circles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Planar {
    pub tuples: Vec<[Label; 4]>,
    pub free_loops: Vec<Label>,
}

impl Planar {
    pub fn occurrences(&self) -> BTreeMap<Label, Vec<Occ>> {
        let mut occ: BTreeMap<Label, Vec<Occ>> = BTreeMap::new();
        for (x, t) in self.tuples.iter().enumerate() {
            for (p, &l) in t.iter().enumerate() {
                occ.entry(l).or_default().push((x, p));
            }
        }
        occ
    }

    pub fn label_at(&self, o: Occ) -> Label {
        self.tuples[o.0][o.1]
    }

    pub fn max_label(&self) -> Label {
        self.tuples.iter().flatten().chain(&self.free_loops).copied().max().unwrap_or(0)
    }

    /// Every label used, crossing edges and free loops.
    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.tuples.iter().flatten().chain(&self.free_loops).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        let occ = self.occurrences();
        for (&l, o) in &occ {
            if l == 0 {
                return Err(Error::Syntax { pos: 0, msg: "edge labels must be positive".into() });
            }
            if o.len() != 2 {
                return Err(Error::EdgeMultiplicity { label: l, count: o.len() });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &u in &self.free_loops {
            if occ.contains_key(&u) || !seen.insert(u) {
                return Err(Error::EdgeMultiplicity { label: u, count: 3 });
            }
        }
        Ok(())
    }

    /// The other occurrence of the label at `o`.
    pub fn twin(&self, occ: &BTreeMap<Label, Vec<Occ>>, o: Occ) -> Occ {
        let v = &occ[&self.label_at(o)];
        if v[0] == o {
            v[1]
        } else {
            v[0]
        }
    }

    /// Faces of the planar projection as cycles of darts. A dart `(x, p)`
    /// leaves crossing `x` along leg `p`; each face lies to the right.
    pub fn faces(&self) -> Vec<Vec<Occ>> {
        let occ = self.occurrences();
        let mut seen = vec![[false; 4]; self.tuples.len()];
        let mut out = Vec::new();
        for x in 0..self.tuples.len() {
            for p in 0..4 {
                if seen[x][p] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = (x, p);
                while !seen[d.0][d.1] {
                    seen[d.0][d.1] = true;
                    face.push(d);
                    let (y, q) = self.twin(&occ, d);
                    d = (y, (q + 1) % 4);
                }
                out.push(face);
            }
        }
        out
    }
}

/// Optional orientation hint: `Some(true)` if leg `p` of crossing `x` is outgoing.
pub type Hint<'a> = &'a dyn Fn(usize, usize) -> Option<bool>;

/// Orient every strand. Strands through an under-crossing are forced by
/// the PD convention; the rest follow `hint` or default to entering at
/// the first unassigned leg.
fn orient(planar: &Planar, hint: Option<Hint>) -> Result<Vec<[bool; 4]>> {
    let n = planar.tuples.len();
    let occ = planar.occurrences();
    let mut dir: Vec<[Option<bool>; 4]> = vec![[None; 4]; n];
    let walk = |dir: &mut Vec<[Option<bool>; 4]>, start: Occ| {
        let mut s = start;
        loop {
            dir[s.0][s.1] = Some(false);
            let out = (s.0, (s.1 + 2) % 4);
            dir[out.0][out.1] = Some(true);
            s = planar.twin(&occ, out);
            if s == start {
                break;
            }
        }
    };
    for x in 0..n {
        if dir[x][0].is_none() {
            walk(&mut dir, (x, 0));
        }
    }
    for x in 0..n {
        for p in 0..4 {
            if dir[x][p].is_none() {
                let outgoing = hint.and_then(|h| h(x, p)).unwrap_or(false);
                walk(&mut dir, if outgoing { (x, (p + 2) % 4) } else { (x, p) });
            }
        }
    }
    let dirs: Vec<[bool; 4]> = dir.iter().map(|d| d.map(|b| b.unwrap_or(false))).collect();
    for (x, d) in dirs.iter().enumerate() {
        if d[0] || !d[2] {
            return Err(Error::Orientation(format!(
                "crossing {} has no incoming under-strand at its first leg",
                x + 1
            )));
        }
    }
    Ok(dirs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedDiagram {
    planar: Planar,
    /// `dirs[x][p]`: leg `p` of crossing `x` is outgoing.
    dirs: Vec<[bool; 4]>,
    arrows: Vec<bool>,
    basepoint: Option<Label>,
}

impl OrientedDiagram {
    pub fn new(planar: Planar, arrows: Option<Vec<bool>>, basepoint: Option<Label>) -> Result<Self> {
        Self::with_hint(planar, arrows, basepoint, None)
    }

    pub fn with_hint(
        planar: Planar,
        arrows: Option<Vec<bool>>,
        basepoint: Option<Label>,
        hint: Option<Hint>,
    ) -> Result<Self> {
        planar.validate()?;
        let n = planar.tuples.len();
        let arrows = arrows.unwrap_or_else(|| vec![true; n]);
        if arrows.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: arrows.len() });
        }
        if let Some(b) = basepoint {
            if !planar.labels().contains(&b) {
                return Err(Error::BadBasepoint(b));
            }
        }
        let dirs = orient(&planar, hint)?;
        Ok(OrientedDiagram { planar, dirs, arrows, basepoint })
    }

    /// A diagram with prescribed leg directions that need not come from a
    /// global orientation. Only its resolutions and edge maps are meaningful.
    pub fn with_dirs(planar: Planar, arrows: Vec<bool>, dirs: Vec<[bool; 4]>) -> Result<Self> {
        planar.validate()?;
        let n = planar.tuples.len();
        if arrows.len() != n || dirs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: arrows.len().min(dirs.len()) });
        }
        Ok(OrientedDiagram { planar, dirs, arrows, basepoint: None })
    }

    pub fn unknot() -> Self {
        OrientedDiagram::new(Planar { tuples: Vec::new(), free_loops: vec![1] }, None, None).unwrap()
    }

    pub fn parse(text: &str) -> Result<Self> {
        pd::parse(text)
    }

    pub fn planar(&self) -> &Planar {
        &self.planar
    }

    pub fn n(&self) -> usize {
        self.planar.tuples.len()
    }

    pub fn tuples(&self) -> &[[Label; 4]] {
        &self.planar.tuples
    }

    pub fn free_loops(&self) -> &[Label] {
        &self.planar.free_loops
    }

    pub fn dirs(&self) -> &[[bool; 4]] {
        &self.dirs
    }

    pub fn sign(&self, x: usize) -> i8 {
        if self.dirs[x][1] {
            1
        } else {
            -1
        }
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        (0..self.n()).map(|x| Crossing { ends: self.planar.tuples[x], sign: self.sign(x) }).collect()
    }

    pub fn n_plus(&self) -> usize {
        (0..self.n()).filter(|&x| self.sign(x) > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.n() - self.n_plus()
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus() as i64 - self.n_minus() as i64
    }

    pub fn arrows(&self) -> &[bool] {
        &self.arrows
    }

    pub fn basepoint(&self) -> Option<Label> {
        self.basepoint
    }

    pub fn edges(&self) -> Vec<Label> {
        self.planar.labels()
    }

    /// Occurrence where the crossing edge `l` leaves a crossing.
    pub fn tail(&self, l: Label) -> Option<Occ> {
        self.find_leg(l, true)
    }

    /// Occurrence where the crossing edge `l` enters a crossing.
    pub fn head(&self, l: Label) -> Option<Occ> {
        self.find_leg(l, false)
    }

    fn find_leg(&self, l: Label, outgoing: bool) -> Option<Occ> {
        for (x, t) in self.planar.tuples.iter().enumerate() {
            for p in 0..4 {
                if t[p] == l && self.dirs[x][p] == outgoing {
                    return Some((x, p));
                }
            }
        }
        None
    }

    /// Number of link components.
    pub fn components(&self) -> usize {
        let occ = self.planar.occurrences();
        let mut seen = vec![[false; 4]; self.n()];
        let mut count = self.planar.free_loops.len();
        for x in 0..self.n() {
            for p in 0..4 {
                if seen[x][p] {
                    continue;
                }
                count += 1;
                let mut s = (x, p);
                while !seen[s.0][s.1] {
                    let o = (s.0, (s.1 + 2) % 4);
                    seen[s.0][s.1] = true;
                    seen[o.0][o.1] = true;
                    s = self.planar.twin(&occ, o);
                }
            }
        }
        count
    }

    pub fn set_crossing_orientations(&self, arrows: &[bool]) -> Result<Self> {
        if arrows.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: arrows.len() });
        }
        let mut d = self.clone();
        d.arrows = arrows.to_vec();
        Ok(d)
    }

    pub fn with_basepoint(&self, bp: Option<Label>) -> Result<Self> {
        if let Some(b) = bp {
            if !self.edges().contains(&b) {
                return Err(Error::BadBasepoint(b));
            }
        }
        let mut d = self.clone();
        d.basepoint = bp;
        Ok(d)
    }

    /// Exchange over and under at every crossing.
    pub fn mirror(&self) -> Self {
        let mut planar = self.planar.clone();
        let mut dirs = self.dirs.clone();
        for x in 0..self.n() {
            let [a, b, c, d] = self.planar.tuples[x];
            let old = self.dirs[x];
            if self.sign(x) > 0 {
                planar.tuples[x] = [d, a, b, c];
                dirs[x] = [old[3], old[0], old[1], old[2]];
            } else {
                planar.tuples[x] = [b, c, d, a];
                dirs[x] = [old[1], old[2], old[3], old[0]];
            }
        }
        OrientedDiagram { planar, dirs, arrows: self.arrows.clone(), basepoint: self.basepoint }
    }

    /// Reverse the orientation of every component; crossing signs are unchanged.
    pub fn reverse(&self) -> Self {
        let mut planar = self.planar.clone();
        let mut dirs = self.dirs.clone();
        for x in 0..self.n() {
            let [a, b, c, d] = self.planar.tuples[x];
            planar.tuples[x] = [c, d, a, b];
            let o = self.dirs[x];
            dirs[x] = [!o[2], !o[3], !o[0], !o[1]];
        }
        OrientedDiagram { planar, dirs, arrows: self.arrows.clone(), basepoint: self.basepoint }
    }

    /// Permute the crossing order: crossing `k` of the result is crossing `perm[k]`.
    pub fn reorder(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: perm.len() });
        }
        let mut planar = self.planar.clone();
        planar.tuples = perm.iter().map(|&k| self.planar.tuples[k]).collect();
        Ok(OrientedDiagram {
            planar,
            dirs: perm.iter().map(|&k| self.dirs[k]).collect(),
            arrows: perm.iter().map(|&k| self.arrows[k]).collect(),
            basepoint: self.basepoint,
        })
    }

    /// Relabel free loops to follow the crossing labels, as parsing does.
    pub fn canonical(&self) -> Self {
        let base = self.planar.tuples.iter().flatten().copied().max().unwrap_or(0);
        let mut d = self.clone();
        for (k, u) in d.planar.free_loops.iter_mut().enumerate() {
            let new = base + 1 + k as Label;
            if d.basepoint == Some(*u) {
                d.basepoint = Some(new);
            }
            *u = new;
        }
        d
    }

    /// Disjoint union; labels of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &OrientedDiagram) -> Self {
        let shift = self.planar.max_label();
        let mut planar = self.planar.clone();
        planar.tuples.extend(other.planar.tuples.iter().map(|t| t.map(|l| l + shift)));
        planar.free_loops.extend(other.planar.free_loops.iter().map(|l| l + shift));
        let mut dirs = self.dirs.clone();
        dirs.extend_from_slice(&other.dirs);
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        OrientedDiagram { planar, dirs, arrows, basepoint: self.basepoint }
    }

    /// Direction hint reproducing this diagram's orientation on legs that
    /// keep their crossing (via `old_of`) and position.
    pub(crate) fn hint_from<'a>(&'a self, old_of: &'a [Option<usize>]) -> impl Fn(usize, usize) -> Option<bool> + 'a {
        move |x, p| old_of.get(x).copied().flatten().map(|o| self.dirs[o][p])
    }
}

impl fmt::Display for OrientedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pd::serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL: &str = "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]";

    #[test]
    fn hopf_parses() {
        let d = OrientedDiagram::parse("PD[X(1,4,2,3),X(3,2,4,1)]").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.components(), 2);
        assert_eq!(d.n_plus() + d.n_minus(), 2);
        assert_eq!(d.sign(0), d.sign(1));
    }

    #[test]
    fn bad_multiplicity() {
        let e = OrientedDiagram::parse("PD[X(1,4,2,3),X(1,4,2,1)]").unwrap_err();
        assert_eq!(e, Error::EdgeMultiplicity { label: 1, count: 3 });
    }

    #[test]
    fn basepoint_annotation() {
        let d = OrientedDiagram::parse("PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)] bp=1").unwrap();
        assert_eq!(d.basepoint(), Some(1));
        assert!(OrientedDiagram::parse("PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)] bp=9").is_err());
        // a single crossing with edges 1..4 each used once is not a diagram
        assert!(OrientedDiagram::parse("PD[X(1,4,2,3)] bp=1").is_err());
        let k = OrientedDiagram::parse("PD[X(1,1,2,2)] bp=1").unwrap();
        assert_eq!(k.basepoint(), Some(1));
    }

    #[test]
    fn trefoil_signs_and_mirror() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        assert_eq!(d.components(), 1);
        let m = d.mirror();
        assert_eq!(d.n_minus(), m.n_plus());
        assert_eq!(d.n_plus(), m.n_minus());
        assert_eq!(m.mirror(), d);
        assert!(d.n_plus() == 3 || d.n_minus() == 3);
        let u = OrientedDiagram::parse("U").unwrap();
        assert_eq!(u.mirror(), u);
    }

    #[test]
    fn arrows_length() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let e = d.set_crossing_orientations(&[false, true, true]).unwrap();
        assert_eq!(e.arrows(), &[false, true, true]);
        assert_eq!(d.set_crossing_orientations(&[true, true, true]).unwrap(), d);
        assert!(d.set_crossing_orientations(&[true, true]).is_err());
    }

    #[test]
    fn sign_invariant_under_cyclic_relabel() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let shift = |l: Label| l % 6 + 1;
        let planar = Planar { tuples: d.tuples().iter().map(|t| t.map(shift)).collect(), free_loops: vec![] };
        let e = OrientedDiagram::new(planar, None, None).unwrap();
        for x in 0..3 {
            assert_eq!(d.sign(x), e.sign(x));
        }
    }

    #[test]
    fn faces_of_trefoil() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let faces = d.planar().faces();
        assert_eq!(faces.len(), d.n() + 2);
        assert_eq!(faces.iter().map(Vec::len).sum::<usize>(), 4 * d.n());
    }

    #[test]
    fn reverse_keeps_signs() {
        let d = OrientedDiagram::parse(TREFOIL).unwrap();
        let r = d.reverse();
        for x in 0..3 {
            assert_eq!(d.sign(x), r.sign(x));
        }
    }
}
