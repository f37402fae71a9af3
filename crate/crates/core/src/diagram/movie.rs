//! Movie scripts: one elementary move per line.
//!
//! ```text
//! start PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]
//! R1+ e5
//! R2- e3 e7
//! R3 c1 c2 c3
//! birth
//! death e9
//! saddle e2 e9
//! ```

use std::fmt;

use super::rewrite;
use super::{Label, OrientedDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    R1Add { edge: Label, positive: bool },
    R1Remove { edge: Label },
    R2Add { over: Label, under: Label },
    R2Remove { e1: Label, e2: Label },
    /// Zero-based crossing indices.
    R3 { crossings: [usize; 3] },
    Birth,
    Death { circle: Option<Label> },
    Saddle { e: Label, f: Label },
}

impl Move {
    pub fn is_reidemeister(&self) -> bool {
        !matches!(self, Move::Birth | Move::Death { .. } | Move::Saddle { .. })
    }

    /// Euler characteristic contribution of the cobordism.
    pub fn euler(&self) -> i64 {
        match self {
            Move::Birth | Move::Death { .. } => 1,
            Move::Saddle { .. } => -1,
            _ => 0,
        }
    }

    pub fn apply(&self, d: &OrientedDiagram) -> Result<OrientedDiagram> {
        Ok(match *self {
            Move::R1Add { edge, positive } => rewrite::r1_add(d, edge, positive)?.diagram,
            Move::R1Remove { edge } => rewrite::r1_remove(d, edge)?.diagram,
            Move::R2Add { over, under } => rewrite::r2_add(d, over, under)?.diagram,
            Move::R2Remove { e1, e2 } => rewrite::r2_remove(d, e1, e2)?.diagram,
            Move::R3 { crossings } => rewrite::r3(d, crossings)?.diagram,
            Move::Birth => rewrite::birth(d)?.diagram,
            Move::Death { circle } => rewrite::death(d, circle)?.diagram,
            Move::Saddle { e, f } => rewrite::saddle(d, e, f)?.after,
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1Add { edge, positive: true } => write!(f, "R1+ e{edge}"),
            Move::R1Add { edge, positive: false } => write!(f, "R1+ e{edge} -"),
            Move::R1Remove { edge } => write!(f, "R1- e{edge}"),
            Move::R2Add { over, under } => write!(f, "R2+ e{over} e{under}"),
            Move::R2Remove { e1, e2 } => write!(f, "R2- e{e1} e{e2}"),
            Move::R3 { crossings: [a, b, c] } => write!(f, "R3 c{} c{} c{}", a + 1, b + 1, c + 1),
            Move::Birth => write!(f, "birth"),
            Move::Death { circle: None } => write!(f, "death"),
            Move::Death { circle: Some(c) } => write!(f, "death e{c}"),
            Move::Saddle { e, f: g } => write!(f, "saddle e{e} e{g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MovieScript {
    pub start: Option<String>,
    /// Moves with their 1-based source line numbers.
    pub moves: Vec<(usize, Move)>,
}

fn arg(tok: Option<&str>, prefix: char, line: usize) -> Result<u32> {
    let bad = |msg: String| Error::Movie { line, msg };
    let t = tok.ok_or_else(|| bad(format!("missing {prefix}<number> argument")))?;
    let rest = t.strip_prefix(prefix).ok_or_else(|| bad(format!("expected {prefix}<number>, got '{t}'")))?;
    match rest.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(bad(format!("expected {prefix}<number>, got '{t}'"))),
    }
}

impl MovieScript {
    pub fn parse(text: &str) -> Result<Self> {
        let mut script = MovieScript::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            if let Some(pd) = body.strip_prefix("start") {
                if script.start.is_some() || !script.moves.is_empty() {
                    return Err(Error::Movie { line, msg: "start must come first and only once".into() });
                }
                script.start = Some(pd.trim().to_string());
                continue;
            }
            let mut toks = body.split_whitespace();
            let cmd = toks.next().unwrap();
            let mv = match cmd {
                "R1+" => {
                    let edge = arg(toks.next(), 'e', line)?;
                    let positive = match toks.next() {
                        None | Some("+") => true,
                        Some("-") => false,
                        Some(t) => return Err(Error::Movie { line, msg: format!("bad kink sign '{t}'") }),
                    };
                    Move::R1Add { edge, positive }
                }
                "R1-" => Move::R1Remove { edge: arg(toks.next(), 'e', line)? },
                "R2+" => Move::R2Add { over: arg(toks.next(), 'e', line)?, under: arg(toks.next(), 'e', line)? },
                "R2-" => Move::R2Remove { e1: arg(toks.next(), 'e', line)?, e2: arg(toks.next(), 'e', line)? },
                "R3" => {
                    let mut cs = [0; 3];
                    for c in cs.iter_mut() {
                        *c = arg(toks.next(), 'c', line)? as usize - 1;
                    }
                    Move::R3 { crossings: cs }
                }
                "birth" => Move::Birth,
                "death" => Move::Death { circle: toks.next().map(|t| arg(Some(t), 'e', line)).transpose()? },
                "saddle" => Move::Saddle { e: arg(toks.next(), 'e', line)?, f: arg(toks.next(), 'e', line)? },
                other => return Err(Error::Movie { line, msg: format!("unknown move '{other}'") }),
            };
            if let Some(extra) = toks.next() {
                return Err(Error::Movie { line, msg: format!("unexpected argument '{extra}'") });
            }
            script.moves.push((line, mv));
        }
        Ok(script)
    }

    /// Every intermediate diagram, starting with `d`.
    pub fn frames(&self, d: &OrientedDiagram) -> Result<Vec<OrientedDiagram>> {
        let mut out = vec![d.clone()];
        for (line, mv) in &self.moves {
            let next = mv
                .apply(out.last().unwrap())
                .map_err(|e| Error::Movie { line: *line, msg: e.to_string() })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn euler(&self) -> i64 {
        self.moves.iter().map(|(_, m)| m.euler()).sum()
    }
}

impl fmt::Display for MovieScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.start {
            writeln!(f, "start {s}")?;
        }
        for (_, m) in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_all_moves() {
        let text = "start U\nR1+ e5\nR1+ e5 -\nR1- e5\nR2+ e3 e7\nR2- e3 e7\nR3 c1 c2 c3\nbirth\n# note\n\ndeath\ndeath e4\nsaddle e2 e9\n";
        let s = MovieScript::parse(text).unwrap();
        assert_eq!(s.start.as_deref(), Some("U"));
        assert_eq!(s.moves.len(), 10);
        assert_eq!(s.moves[5].1, Move::R3 { crossings: [0, 1, 2] });
        let again = MovieScript::parse(&s.to_string()).unwrap();
        assert_eq!(again.moves.iter().map(|m| &m.1).collect::<Vec<_>>(), s.moves.iter().map(|m| &m.1).collect::<Vec<_>>());
    }

    #[test]
    fn errors_report_lines() {
        assert_eq!(
            MovieScript::parse("birth\nsaddle e2\n").unwrap_err(),
            Error::Movie { line: 2, msg: "missing e<number> argument".into() }
        );
        assert!(matches!(MovieScript::parse("twist e1"), Err(Error::Movie { line: 1, .. })));
        let s = MovieScript::parse("birth\ndeath e9").unwrap();
        assert!(matches!(s.frames(&OrientedDiagram::unknot()), Err(Error::Movie { line: 2, .. })));
    }

    #[test]
    fn birth_then_saddle() {
        let s = MovieScript::parse("birth\nsaddle e1 e2").unwrap();
        let frames = s.frames(&OrientedDiagram::unknot()).unwrap();
        assert_eq!(frames[2].components(), 1);
        assert_eq!(s.euler(), 0);
    }
}
