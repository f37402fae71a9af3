//! Kauffman bracket state sum, used as an oracle for graded Euler
//! characteristics. Deliberately shares no code with the cube machinery.

use std::collections::BTreeMap;
use std::fmt;

use crate::diagram::OrientedDiagram;

/// Integer Laurent polynomial in one variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent(pub BTreeMap<i64, i64>);

impl Laurent {
    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut p = Laurent::default();
        p.add_term(exp, coeff);
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        let c = self.0.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn add(&mut self, o: &Laurent) {
        for (&e, &c) in &o.0 {
            self.add_term(e, c);
        }
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (&e1, &c1) in &self.0 {
            for (&e2, &c2) in &o.0 {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Laurent {
        (0..k).fold(Laurent::monomial(0, 1), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (&e, &c)) in self.0.iter().enumerate() {
            let sign = if c < 0 { "-" } else if k > 0 { "+" } else { "" };
            if k > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let a = c.abs();
            let var = match e {
                0 => String::new(),
                1 => "q".into(),
                _ => format!("q^{e}"),
            };
            match (a, var.is_empty()) {
                (_, true) => write!(f, "{a}")?,
                (1, false) => write!(f, "{var}")?,
                _ => write!(f, "{a}{var}")?,
            }
        }
        Ok(())
    }
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Number of loops in the state where crossings with a set bit take the
/// B-smoothing (joining legs 0-3 and 1-2) and the others the A-smoothing.
fn state_loops(d: &OrientedDiagram, state: u32) -> usize {
    let tuples = d.tuples();
    // nodes: half-edges (crossing, leg)
    let m = 4 * tuples.len();
    let mut p: Vec<usize> = (0..m).collect();
    let join = |p: &mut [usize], a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        p[ra] = rb;
    };
    let mut first: BTreeMap<u32, usize> = BTreeMap::new();
    for (x, t) in tuples.iter().enumerate() {
        for (leg, &l) in t.iter().enumerate() {
            let h = 4 * x + leg;
            if let Some(&o) = first.get(&l) {
                join(&mut p, h, o);
            } else {
                first.insert(l, h);
            }
        }
        if state & (1 << x) != 0 {
            join(&mut p, 4 * x, 4 * x + 3);
            join(&mut p, 4 * x + 1, 4 * x + 2);
        } else {
            join(&mut p, 4 * x, 4 * x + 1);
            join(&mut p, 4 * x + 2, 4 * x + 3);
        }
    }
    let roots = (0..m).filter(|&h| find(&mut p, h) == h).count();
    roots + d.free_loops().len()
}

/// Kauffman bracket in the variable `A`, normalized so the empty diagram is 1.
pub fn kauffman_bracket(d: &OrientedDiagram) -> Laurent {
    let n = d.n();
    let delta = {
        let mut p = Laurent::monomial(2, -1);
        p.add_term(-2, -1);
        p
    };
    let mut out = Laurent::default();
    for s in 0..1u32 << n {
        let b = s.count_ones() as i64;
        let term = Laurent::monomial(n as i64 - 2 * b, 1).mul(&delta.pow(state_loops(d, s)));
        out.add(&term);
    }
    out
}

/// Unnormalized Jones polynomial in `q`, normalized so the unknot gives
/// `q + q^-1`.
pub fn unnormalized_jones(d: &OrientedDiagram) -> Laurent {
    let w = d.writhe();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    let framed = kauffman_bracket(d).mul(&Laurent::monomial(-3 * w, sign));
    // A^e -> (-1)^{e/2} q^{-e/2}
    let mut out = Laurent::default();
    for (&e, &c) in &framed.0 {
        assert!(e % 2 == 0, "odd power of A in a link bracket");
        let h = e / 2;
        out.add_term(-h, if h % 2 == 0 { c } else { -c });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named;

    fn poly(terms: &[(i64, i64)]) -> Laurent {
        let mut p = Laurent::default();
        for &(e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    #[test]
    fn known_values() {
        assert_eq!(unnormalized_jones(&OrientedDiagram::unknot()), poly(&[(-1, 1), (1, 1)]));
        assert_eq!(unnormalized_jones(&named("kinked_unknot").unwrap()), poly(&[(-1, 1), (1, 1)]));
        assert_eq!(unnormalized_jones(&named("kinked_unknot_neg").unwrap()), poly(&[(-1, 1), (1, 1)]));
        assert_eq!(unnormalized_jones(&named("trefoil_right").unwrap()), poly(&[(1, 1), (3, 1), (5, 1), (9, -1)]));
        assert_eq!(
            unnormalized_jones(&named("trefoil_left").unwrap()),
            poly(&[(-1, 1), (-3, 1), (-5, 1), (-9, -1)])
        );
        assert_eq!(unnormalized_jones(&named("hopf").unwrap()), poly(&[(0, 1), (2, 1), (4, 1), (6, 1)]));
        let fig8 = unnormalized_jones(&named("figure_eight").unwrap());
        assert_eq!(fig8, poly(&[(-5, 1), (5, 1)]));
        assert_eq!(unnormalized_jones(&OrientedDiagram::parse("U U").unwrap()), poly(&[(-2, 1), (0, 2), (2, 1)]));
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[(1, 1), (3, 1), (5, 1), (9, -1)]).to_string(), "q + q^3 + q^5 - q^9");
        assert_eq!(poly(&[(-1, 2), (0, 3)]).to_string(), "2q^-1 + 3");
        assert_eq!(Laurent::default().to_string(), "0");
    }
}
