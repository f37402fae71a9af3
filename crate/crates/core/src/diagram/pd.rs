use super::{Label, OrientedDiagram, Planar};
use crate::error::{Error, Result};

struct Scanner<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        self.skip_ws();
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected '{tok}'"))
        }
    }

    fn number(&mut self) -> Result<Label> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an edge label");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        match text.parse::<Label>() {
            Ok(0) => Err(Error::Syntax { pos: start, msg: "edge labels must be positive".into() }),
            Ok(v) => Ok(v),
            Err(_) => Err(Error::Syntax { pos: start, msg: "edge label out of range".into() }),
        }
    }

    fn at_token_end(&self) -> bool {
        self.pos >= self.s.len() || self.s[self.pos].is_ascii_whitespace()
    }
}

pub(super) fn parse(text: &str) -> Result<OrientedDiagram> {
    let mut sc = Scanner { s: text.as_bytes(), pos: 0 };
    let mut tuples: Option<Vec<[Label; 4]>> = None;
    let mut loops = 0usize;
    let mut bp: Option<Label> = None;
    let mut arrows: Option<Vec<bool>> = None;
    loop {
        sc.skip_ws();
        if sc.pos >= sc.s.len() {
            break;
        }
        let start = sc.pos;
        if sc.eat("PD[") {
            if tuples.is_some() {
                return Err(Error::Syntax { pos: start, msg: "duplicate PD block".into() });
            }
            let mut v = Vec::new();
            sc.skip_ws();
            if !sc.eat("]") {
                loop {
                    sc.expect("X(")?;
                    let mut t = [0; 4];
                    for (k, slot) in t.iter_mut().enumerate() {
                        if k > 0 {
                            sc.expect(",")?;
                        }
                        *slot = sc.number()?;
                    }
                    sc.expect(")")?;
                    v.push(t);
                    sc.skip_ws();
                    if sc.eat("]") {
                        break;
                    }
                    sc.expect(",")?;
                }
            }
            tuples = Some(v);
        } else if sc.eat("bp=") {
            if bp.is_some() {
                return Err(Error::Syntax { pos: start, msg: "duplicate bp".into() });
            }
            bp = Some(sc.number()?);
        } else if sc.eat("arrows=") {
            if arrows.is_some() {
                return Err(Error::Syntax { pos: start, msg: "duplicate arrows".into() });
            }
            let mut v = Vec::new();
            while !sc.at_token_end() {
                match sc.s[sc.pos] {
                    b'T' => v.push(true),
                    b'F' => v.push(false),
                    _ => return sc.err("arrows must be a string of T and F"),
                }
                sc.pos += 1;
            }
            arrows = Some(v);
        } else if sc.eat("U") && sc.at_token_end() {
            loops += 1;
        } else {
            return Err(Error::Syntax { pos: start, msg: "unexpected token".into() });
        }
        if !sc.at_token_end() {
            return sc.err("expected whitespace between tokens");
        }
    }
    let tuples = tuples.unwrap_or_default();
    if tuples.is_empty() && loops == 0 && bp.is_some() {
        return Err(Error::BadBasepoint(bp.unwrap()));
    }
    let base = tuples.iter().flatten().copied().max().unwrap_or(0);
    let free_loops = (0..loops).map(|k| base + 1 + k as Label).collect();
    OrientedDiagram::new(Planar { tuples, free_loops }, arrows, bp)
}

pub(super) fn serialize(d: &OrientedDiagram) -> String {
    let mut parts = Vec::new();
    if d.n() > 0 || d.free_loops().is_empty() {
        let xs: Vec<String> =
            d.tuples().iter().map(|t| format!("X({},{},{},{})", t[0], t[1], t[2], t[3])).collect();
        parts.push(format!("PD[{}]", xs.join(",")));
    }
    parts.extend(d.free_loops().iter().map(|_| "U".to_string()));
    if let Some(b) = d.basepoint() {
        parts.push(format!("bp={b}"));
    }
    if d.arrows().iter().any(|a| !a) {
        parts.push(format!("arrows={}", d.arrows().iter().map(|&a| if a { 'T' } else { 'F' }).collect::<String>()));
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for text in [
            "PD[X(1,4,2,3),X(3,2,4,1)]",
            "U",
            "U U bp=2",
            "PD[]",
            "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)] U bp=7 arrows=TFT",
        ] {
            let d = parse(text).unwrap();
            assert_eq!(serialize(&d), text);
            assert_eq!(parse(&serialize(&d)).unwrap(), d);
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("PD[X(1,2,3)]") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("PD[X(1,1,2,2)] foo"), Err(Error::Syntax { pos: 15, .. })));
        assert!(matches!(parse("PD[X(0,0,2,2)]"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("PD[X(1,1,2,2)] arrows=TT"), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn whitespace_tolerated() {
        let d = parse("  PD[ X(1, 1, 2, 2) ]   bp=2 ").unwrap();
        assert_eq!(serialize(&d), "PD[X(1,1,2,2)] bp=2");
    }
}
