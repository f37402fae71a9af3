//! Test diagrams: braid closures, a few named knots and links, seeded
//! random corpora, random Reidemeister moves and cobordism movies.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::rewrite;
use crate::diagram::{Label, Move, OrientedDiagram, Planar};
use crate::error::{Error, Result};

/// Closure of a braid on `strands` strands. Generator `k > 0` is a
/// positive crossing between positions `k` and `k+1`, `-k` its inverse.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<OrientedDiagram> {
    let mut current: Vec<Label> = (1..=strands as Label).collect();
    let mut next = strands as Label + 1;
    let mut tuples = Vec::new();
    for &g in word {
        let i = g.unsigned_abs() as usize;
        if g == 0 || i >= strands {
            return Err(Error::Move(format!("bad braid generator {g}")));
        }
        let (a1, a2) = (current[i - 1], current[i]);
        let (b1, b2) = (next, next + 1);
        next += 2;
        tuples.push(if g > 0 { [a2, b2, b1, a1] } else { [a1, a2, b2, b1] });
        current[i - 1] = b1;
        current[i] = b2;
    }
    let mut glue: BTreeMap<Label, Label> = BTreeMap::new();
    let mut free = Vec::new();
    for (p, &last) in current.iter().enumerate() {
        let first = p as Label + 1;
        if last == first {
            free.push(first);
        } else {
            glue.insert(last, first);
        }
    }
    for t in tuples.iter_mut() {
        for l in t.iter_mut() {
            if let Some(&g) = glue.get(l) {
                *l = g;
            }
        }
    }
    // compact labels in order of first appearance
    let mut relabel: BTreeMap<Label, Label> = BTreeMap::new();
    for l in tuples.iter().flatten().chain(&free) {
        let k = relabel.len() as Label + 1;
        relabel.entry(*l).or_insert(k);
    }
    let planar = Planar {
        tuples: tuples.iter().map(|t| t.map(|l| relabel[&l])).collect(),
        free_loops: free.iter().map(|l| relabel[l]).collect(),
    };
    OrientedDiagram::new(planar, None, None)
}

/// Named diagrams used throughout the tests.
pub fn named(name: &str) -> Option<OrientedDiagram> {
    let (s, w): (usize, &[i32]) = match name {
        "unknot" => return Some(OrientedDiagram::unknot()),
        "unlink2" => return OrientedDiagram::parse("U U").ok(),
        "kinked_unknot" => (2, &[1]),
        "kinked_unknot_neg" => (2, &[-1]),
        "doubly_kinked_unknot" => (3, &[1, -2]),
        "hopf" => (2, &[1, 1]),
        "hopf_neg" => (2, &[-1, -1]),
        "trefoil_right" | "trefoil" => (2, &[1, 1, 1]),
        "trefoil_left" => (2, &[-1, -1, -1]),
        "figure_eight" => (3, &[1, -2, 1, -2]),
        "cinquefoil" => (2, &[1, 1, 1, 1, 1]),
        "three_twist" => (3, &[1, 1, 1, 2, -1, 2]),
        "whitehead" => (3, &[1, 1, -2, 1, -2]),
        "torus_3_4" => (3, &[1, 2, 1, 2, 1, 2, 1, 2]),
        "braid_r3" => (3, &[1, 2, 1, 2, 2]),
        _ => return None,
    };
    braid_closure(s, w).ok()
}

pub const NAMED: &[&str] = &[
    "unknot",
    "unlink2",
    "kinked_unknot",
    "kinked_unknot_neg",
    "doubly_kinked_unknot",
    "hopf",
    "hopf_neg",
    "trefoil_right",
    "trefoil_left",
    "figure_eight",
    "cinquefoil",
    "three_twist",
    "whitehead",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random braid closure with at most `max_n` crossings.
pub fn random_braid(rng: &mut impl Rng, max_strands: usize, max_n: usize) -> OrientedDiagram {
    let strands = rng.gen_range(2..=max_strands.max(2));
    let len = rng.gen_range(1..=max_n.max(1));
    let word: Vec<i32> = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..strands) as i32;
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    braid_closure(strands, &word).expect("generated braid word is valid")
}

/// Random diagrams: braid closures, occasionally followed by a few
/// Reidemeister moves so that non-braid-like PD codes also occur.
pub fn random_corpus(seed: u64, count: usize, max_n: usize) -> Vec<OrientedDiagram> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut d = random_braid(&mut r, 4, max_n);
        for _ in 0..r.gen_range(0..3) {
            if let Some(m) = random_reidemeister(&d, &mut r) {
                let next = m.apply(&d).expect("random move applies");
                if next.n() <= max_n {
                    d = next;
                }
            }
        }
        out.push(d);
    }
    out
}

/// Every R1/R2 removal and R3 move applicable to `d`.
pub fn simplifying_moves(d: &OrientedDiagram) -> Vec<Move> {
    let mut out = Vec::new();
    for l in d.edges() {
        if rewrite::kink_at(d, l).is_ok() {
            out.push(Move::R1Remove { edge: l });
        }
    }
    for face in d.planar().faces() {
        if face.len() == 2 {
            let (e1, e2) = (d.planar().label_at(face[0]), d.planar().label_at(face[1]));
            if rewrite::bigon_at(d, e1, e2).is_ok() {
                out.push(Move::R2Remove { e1, e2 });
            }
        }
        if face.len() == 3 {
            let cs = [face[0].0, face[1].0, face[2].0];
            if rewrite::r3(d, cs).is_ok() {
                out.push(Move::R3 { crossings: cs });
            }
        }
    }
    out
}

/// A random applicable Reidemeister move.
pub fn random_reidemeister(d: &OrientedDiagram, rng: &mut impl Rng) -> Option<Move> {
    let edges = d.edges();
    let mut candidates = simplifying_moves(d);
    for _ in 0..2 {
        let &e = edges.choose(rng)?;
        candidates.push(Move::R1Add { edge: e, positive: rng.gen_bool(0.5) });
    }
    let faces = d.planar().faces();
    for _ in 0..3 {
        if let Some(face) = faces.choose(rng) {
            if face.len() >= 2 {
                let mut pair: Vec<_> = face.choose_multiple(rng, 2).collect();
                pair.sort();
                let (e, f) = (d.planar().label_at(*pair[0]), d.planar().label_at(*pair[1]));
                if e != f {
                    candidates.push(Move::R2Add { over: e, under: f });
                }
            }
        }
    }
    candidates.shuffle(rng);
    candidates.into_iter().find(|m| m.apply(d).is_ok())
}

/// Moves realizing the oriented smoothing of crossing `c` as a saddle
/// followed by removal of the resulting kink.
pub fn oriented_smoothing(d: &OrientedDiagram, c: usize) -> Result<(Vec<Move>, OrientedDiagram)> {
    let t = d.tuples()[c];
    // the legs a (incoming under) and the outgoing over-leg are adjacent
    let over_out = if d.sign(c) > 0 { t[1] } else { t[3] };
    let sad = Move::Saddle { e: t[0], f: over_out };
    let mid = sad.apply(d)?;
    let kink = mid
        .edges()
        .into_iter()
        .find(|&l| rewrite::kink_at(&mid, l).map(|(x, _)| x == c).unwrap_or(false))
        .ok_or_else(|| Error::Internal("oriented smoothing left no kink".into()))?;
    let rm = Move::R1Remove { edge: kink };
    let end = rm.apply(&mid)?;
    Ok((vec![sad, rm], end))
}

/// Movies from a knot to a knot: `(moves, end, genus)`. Genus 0 from
/// Reidemeister moves and from a birth absorbed by a saddle, genus 1 from two
/// oriented smoothings.
pub fn knot_movies(d: &OrientedDiagram, rng: &mut impl Rng) -> Vec<(Vec<Move>, OrientedDiagram, i64)> {
    let mut out = Vec::new();
    if d.components() != 1 {
        return out;
    }
    let mut cur = d.clone();
    let mut moves = Vec::new();
    for _ in 0..2 {
        if let Some(m) = random_reidemeister(&cur, rng) {
            cur = m.apply(&cur).expect("random move applies");
            moves.push(m);
        }
    }
    if !moves.is_empty() {
        out.push((moves, cur, 0));
    }
    if let Ok(born) = Move::Birth.apply(d) {
        let u = *born.free_loops().last().unwrap();
        for e in d.edges().into_iter().chain(d.free_loops().iter().copied()) {
            let sad = Move::Saddle { e, f: u };
            if let Ok(end) = sad.apply(&born) {
                if end.components() == 1 {
                    out.push((vec![Move::Birth, sad], end, 0));
                    break;
                }
            }
        }
    }
    'outer: for c1 in 0..d.n() {
        let Ok((first, mid)) = oriented_smoothing(d, c1) else { continue };
        for c2 in 0..mid.n() {
            if let Ok((second, end)) = oriented_smoothing(&mid, c2) {
                if end.components() == 1 {
                    out.push(([first, second].concat(), end, 1));
                    break 'outer;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn braid_signs() {
        let t = named("trefoil_right").unwrap();
        assert_eq!(t.n_plus(), 3);
        assert_eq!(t.components(), 1);
        let l = named("trefoil_left").unwrap();
        assert_eq!(l.n_minus(), 3);
        assert_eq!(named("hopf").unwrap().components(), 2);
        assert_eq!(named("figure_eight").unwrap().components(), 1);
        assert_eq!(named("figure_eight").unwrap().writhe(), 0);
        for n in NAMED {
            assert!(named(n).is_some(), "{n}");
        }
        let free = braid_closure(3, &[1]).unwrap();
        assert_eq!(free.free_loops().len(), 1);
        assert_eq!(free.components(), 2);
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = random_corpus(7, 10, 8);
        let b = random_corpus(7, 10, 8);
        assert_eq!(a, b);
        assert!(a.iter().all(|d| d.n() <= 8));
    }

    #[test]
    fn smoothing_trefoil_gives_hopf() {
        let t = named("trefoil_right").unwrap();
        let (moves, end) = oriented_smoothing(&t, 0).unwrap();
        assert_eq!(moves.len(), 2);
        assert_eq!(end.n(), 2);
        assert_eq!(end.components(), 2);
    }

    #[test]
    fn knot_movies_end_in_knots() {
        let mut r = rng(3);
        let ms = knot_movies(&named("trefoil_right").unwrap(), &mut r);
        assert_eq!(ms.iter().map(|m| m.2).collect::<Vec<_>>(), vec![0, 0, 1]);
        for (moves, end, g) in ms {
            let chi: i64 = moves.iter().map(|m| m.euler()).sum();
            assert_eq!(chi, -2 * g);
            assert_eq!(end.components(), 1);
        }
    }
}
