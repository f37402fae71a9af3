//! The cube `{0,1}^n`: vertices, faces, the standard sign assignment and
//! low-degree F2 cellular cochains.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::f2::{solve_affine, BitVec};

/// A cube vertex; bit `i` is the resolution of crossing `i` (0-based).
pub type Vertex = u32;

pub fn weight(v: Vertex) -> u32 {
    v.count_ones()
}

/// `u >= v` coordinatewise.
pub fn dominates(u: Vertex, v: Vertex) -> bool {
    u & v == v
}

/// An edge `upper = lower + e_coord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Edge {
    pub lower: Vertex,
    pub coord: usize,
}

impl Edge {
    pub fn upper(self) -> Vertex {
        self.lower | (1 << self.coord)
    }
}

/// A square spanned by coordinates `i < j` above `lower`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Square {
    pub lower: Vertex,
    pub i: usize,
    pub j: usize,
}

impl Square {
    pub fn upper(self) -> Vertex {
        self.lower | (1 << self.i) | (1 << self.j)
    }

    /// The four edges: lower->lower+e_i, lower+e_i->upper, lower->lower+e_j, lower+e_j->upper.
    pub fn edges(self) -> [Edge; 4] {
        let mi = self.lower | (1 << self.i);
        let mj = self.lower | (1 << self.j);
        [
            Edge { lower: self.lower, coord: self.i },
            Edge { lower: mi, coord: self.j },
            Edge { lower: self.lower, coord: self.j },
            Edge { lower: mj, coord: self.i },
        ]
    }
}

/// A three-dimensional face spanned by coordinates `i < j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube3 {
    pub lower: Vertex,
    pub coords: [usize; 3],
}

/// Standard sign `s_{upper,lower}`: the number of ones of `upper` before
/// the flipped coordinate, mod 2.
pub fn standard_sign(upper: Vertex, lower: Vertex) -> Result<u8> {
    let diff = upper ^ lower;
    if diff.count_ones() != 1 || !dominates(upper, lower) {
        return Err(Error::NotAnEdge(upper, lower));
    }
    let k = diff.trailing_zeros();
    let below = upper & ((1u32 << k) - 1);
    Ok((below.count_ones() % 2) as u8)
}

/// `(-1)^{s}` for an edge.
pub fn edge_sign(e: Edge) -> i64 {
    if (e.upper() & ((1u32 << e.coord) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Face {
    Vertex(Vertex),
    Edge(Edge),
    Square(Square),
}

/// Enumerate all faces of dimension `d` (0, 1 or 2) of the `n`-cube,
/// ordered by lower vertex, then by coordinates.
pub fn faces(n: usize, d: usize) -> Vec<Face> {
    match d {
        0 => (0..1u32 << n).map(Face::Vertex).collect(),
        1 => edges(n).into_iter().map(Face::Edge).collect(),
        2 => squares(n).into_iter().map(Face::Square).collect(),
        _ => panic!("faces of degree {d} are not supported"),
    }
}

pub fn edges(n: usize) -> Vec<Edge> {
    let mut out = Vec::with_capacity(n << n.saturating_sub(1));
    for lower in 0..1u32 << n {
        for coord in 0..n {
            if lower & (1 << coord) == 0 {
                out.push(Edge { lower, coord });
            }
        }
    }
    out
}

pub fn squares(n: usize) -> Vec<Square> {
    let mut out = Vec::new();
    for lower in 0..1u32 << n {
        for i in 0..n {
            if lower & (1 << i) != 0 {
                continue;
            }
            for j in i + 1..n {
                if lower & (1 << j) == 0 {
                    out.push(Square { lower, i, j });
                }
            }
        }
    }
    out
}

pub fn cubes3(n: usize) -> Vec<Cube3> {
    let mut out = Vec::new();
    for lower in 0..1u32 << n {
        let free: Vec<usize> = (0..n).filter(|&c| lower & (1 << c) == 0).collect();
        for a in 0..free.len() {
            for b in a + 1..free.len() {
                for c in b + 1..free.len() {
                    out.push(Cube3 { lower, coords: [free[a], free[b], free[c]] });
                }
            }
        }
    }
    out
}

/// F2-valued cochain of degree 0, 1 or 2. Values are indexed like the
/// output of [`faces`]; multiplicatively `false = 1`, `true = xi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub n: usize,
    pub degree: usize,
    pub values: Vec<bool>,
}

impl Cochain {
    pub fn zero(n: usize, degree: usize) -> Self {
        let len = faces(n, degree).len();
        Cochain { n, degree, values: vec![false; len] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&b| !b)
    }
}

/// Index of every edge of the `n`-cube in [`edges`] order.
pub fn edge_index(n: usize) -> HashMap<Edge, usize> {
    edges(n).into_iter().enumerate().map(|(i, e)| (e, i)).collect()
}

pub fn coboundary(c: &Cochain) -> Cochain {
    let n = c.n;
    match c.degree {
        0 => {
            let values = edges(n)
                .into_iter()
                .map(|e| c.values[e.lower as usize] ^ c.values[e.upper() as usize])
                .collect();
            Cochain { n, degree: 1, values }
        }
        1 => {
            let idx = edge_index(n);
            let values = squares(n)
                .into_iter()
                .map(|s| s.edges().iter().fold(false, |acc, e| acc ^ c.values[idx[e]]))
                .collect();
            Cochain { n, degree: 2, values }
        }
        d => panic!("coboundary of degree {d} cochains is not supported"),
    }
}

/// Target for [`solve_coboundary`]: per square (in [`squares`] order) either a
/// required value or `None` for a free face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCochain {
    pub n: usize,
    pub values: Vec<Option<bool>>,
}

/// Find a 1-cochain `eps` with `(d eps)(f) = target(f)` on every constrained face.
///
/// Variables are ranked by `order` (default: [`edges`] order). Among all
/// solutions the one returned is least when read as a binary number whose
/// low bit is the first-ranked edge.
pub fn solve_coboundary(target: &PartialCochain, order: Option<&[usize]>) -> Result<Cochain> {
    let n = target.n;
    let idx = edge_index(n);
    let nvars = idx.len();
    let default: Vec<usize> = (0..nvars).collect();
    let order = order.unwrap_or(&default);
    assert_eq!(order.len(), nvars);
    // rank[e] = position of edge e in the variable order
    let mut rank = vec![0; nvars];
    for (pos, &e) in order.iter().enumerate() {
        rank[e] = pos;
    }
    let mut eqs = Vec::new();
    for (s, t) in squares(n).into_iter().zip(&target.values) {
        if let Some(b) = t {
            let row = BitVec::from_indices(nvars, s.edges().iter().map(|e| rank[idx[e]]));
            eqs.push((row, *b));
        }
    }
    let x = solve_affine(nvars, &eqs).ok_or(Error::Inconsistent)?;
    let mut values = vec![false; nvars];
    for pos in x.ones() {
        values[order[pos]] = true;
    }
    Ok(Cochain { n, degree: 1, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_sign_examples() {
        // n=2 with bit 0 = first coordinate: (1,1)->(0,1) flips coordinate 1
        assert_eq!(standard_sign(0b11, 0b10).unwrap(), 0);
        assert_eq!(standard_sign(0b11, 0b01).unwrap(), 1);
        // n=3: (1,0,1)->(1,0,0)
        assert_eq!(standard_sign(0b101, 0b001).unwrap(), 1);
        assert!(standard_sign(0b11, 0b00).is_err());
    }

    #[test]
    fn face_counts() {
        assert_eq!(faces(2, 1).len(), 4);
        assert_eq!(faces(2, 2).len(), 1);
        assert_eq!(faces(3, 2).len(), 6);
        assert_eq!(cubes3(4).len(), 8);
    }

    #[test]
    fn face_parity_of_standard_sign() {
        for n in 2..=6 {
            for s in squares(n) {
                let total: u8 = s
                    .edges()
                    .iter()
                    .map(|e| standard_sign(e.upper(), e.lower).unwrap())
                    .sum();
                assert_eq!(total % 2, 1, "{s:?}");
            }
        }
    }

    #[test]
    fn coboundary_examples() {
        assert!(coboundary(&Cochain::zero(3, 1)).is_zero());
        let mut c = Cochain::zero(2, 1);
        c.values[0] = true;
        assert_eq!(coboundary(&c).values, vec![true]);
    }

    #[test]
    fn delta_squared_vanishes() {
        for n in 1..=6 {
            let len = 1usize << n;
            for seed in 0..20u64 {
                let values = (0..len).map(|v| (v as u64 * 2654435761 + seed * 97) % 7 < 3).collect();
                let c = Cochain { n, degree: 0, values };
                assert!(coboundary(&coboundary(&c)).is_zero());
            }
        }
    }

    #[test]
    fn solve_examples() {
        let t = PartialCochain { n: 3, values: vec![Some(false); 6] };
        assert!(solve_coboundary(&t, None).unwrap().is_zero());

        let t = PartialCochain { n: 2, values: vec![Some(true)] };
        let eps = solve_coboundary(&t, None).unwrap();
        assert_eq!(eps.values, vec![true, false, false, false]);
        assert_eq!(edges(2)[0], Edge { lower: 0, coord: 0 });
    }

    #[test]
    fn solve_with_permuted_order_still_solves() {
        let n = 3;
        let values: Vec<Option<bool>> = (0..6).map(|i| if i == 2 { None } else { Some(i % 2 == 0) }).collect();
        // make the target a genuine coboundary on constrained faces
        let mut c = Cochain::zero(n, 1);
        c.values[1] = true;
        c.values[5] = true;
        let d = coboundary(&c);
        let target = PartialCochain {
            n,
            values: values.iter().zip(&d.values).map(|(v, &b)| v.map(|_| b)).collect(),
        };
        let order: Vec<usize> = (0..12).rev().collect();
        for o in [None, Some(order.as_slice())] {
            let eps = solve_coboundary(&target, o).unwrap();
            let de = coboundary(&eps);
            for (t, v) in target.values.iter().zip(&de.values) {
                if let Some(b) = t {
                    assert_eq!(b, v);
                }
            }
        }
    }
}
