//! Recursive-descent parser for the class-expression DSL.
//!
//! ```text
//! expr := "full" | "ex3" | "ex6" | "ahomdiag"
//!       | "point(" [word] ("*" | "(" word ")*") ")"
//!       | "sft{" word ("," word)* "}"
//!       | "sep(" natlist ";" natlist ")"
//!       | "prod(" expr "," expr ")" | "dsum(" expr "," expr ")"
//!       | "union(" expr "," expr ")" | "cyl(" word "," expr ")"
//!       | "diag(" nat ")"
//! word := [01]+ | "e"
//! ```
//!
//! In `point(01*)` the star repeats the last bit, so the preperiod is `0` and
//! the period `1`. Whitespace is skipped between tokens but not inside words.

use super::{BlockSet, ClassExpr, PeriodicPoint, Separation};
use crate::error::{Error, Result};
use crate::word::Word;

pub fn parse(text: &str) -> Result<ClassExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const EXPR_START: &[&str] = &[
    "full", "ex3", "ex6", "ahomdiag", "point(", "sft{", "sep(", "prod(", "dsum(", "union(",
    "cyl(", "diag(",
];

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn unexpected(&self, expected: &[&str]) -> Error {
        let found = match self.rest().chars().next() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        };
        Error::Syntax {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn semantic(position: usize, err: Error) -> Error {
        match err {
            Error::Semantic { message, .. } => Error::Semantic { position, message },
            other => other,
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.unexpected(&[token]))
        }
    }

    /// Keyword followed by an opening delimiter, whitespace allowed between.
    fn head(&mut self, head: &str) -> bool {
        let (name, open) = head.split_at(head.len() - 1);
        let saved = self.pos;
        if self.keyword(name) && self.eat(open) {
            true
        } else {
            self.pos = saved;
            false
        }
    }

    /// Identifier-like keyword, which must not run into further letters or digits.
    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ClassExpr> {
        self.skip_ws();
        let start = self.pos;
        for (kw, e) in [
            ("full", ClassExpr::Full),
            ("ex3", ClassExpr::Ex3),
            ("ex6", ClassExpr::Ex6),
            ("ahomdiag", ClassExpr::AHomDiag),
        ] {
            if self.keyword(kw) {
                return Ok(e);
            }
        }
        if self.head("point(") {
            return self.point(start);
        }
        if self.head("sft{") {
            let mut blocks = vec![self.word(false)?];
            while self.eat(",") {
                blocks.push(self.word(false)?);
            }
            self.expect("}")?;
            return BlockSet::new(blocks)
                .map(ClassExpr::Sft)
                .map_err(|e| Self::semantic(start, e));
        }
        if self.head("sep(") {
            let ones = self.natlist()?;
            self.expect(";")?;
            let zeros = self.natlist()?;
            self.expect(")")?;
            return Separation::new(ones, zeros)
                .map(ClassExpr::Sep)
                .map_err(|e| Self::semantic(start, e));
        }
        for (head, build) in [
            ("prod(", ClassExpr::prod as fn(ClassExpr, ClassExpr) -> ClassExpr),
            ("dsum(", ClassExpr::dsum),
            ("union(", ClassExpr::union),
        ] {
            if self.head(head) {
                let l = self.expr()?;
                self.expect(",")?;
                let r = self.expr()?;
                self.expect(")")?;
                return Ok(build(l, r));
            }
        }
        if self.head("cyl(") {
            let p = self.word(true)?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            return Ok(ClassExpr::cyl(p, b));
        }
        if self.head("diag(") {
            let n = self.nat()?;
            self.expect(")")?;
            return ClassExpr::diag(n).map_err(|e| Self::semantic(start, e));
        }
        Err(self.unexpected(EXPR_START))
    }

    fn point(&mut self, start: usize) -> Result<ClassExpr> {
        self.skip_ws();
        let pre = if self.rest().starts_with('(') {
            Word::empty()
        } else {
            self.word(true)?
        };
        let (pre, period) = if self.eat("*") {
            if pre.is_empty() {
                return Err(Error::Semantic {
                    position: start,
                    message: "empty period: '*' needs a preceding bit".into(),
                });
            }
            let last = pre.bit(pre.len() - 1);
            (pre.prefix(pre.len() - 1), Word::from_bits([last]))
        } else if self.eat("(") {
            let period = self.word(true)?;
            self.expect(")")?;
            if !self.rest().starts_with('*') {
                return Err(self.unexpected(&["*"]));
            }
            self.pos += 1;
            (pre, period)
        } else if self.rest().trim_start().starts_with(')') {
            return Err(Error::Semantic {
                position: start,
                message: "empty period: a point needs a starred period".into(),
            });
        } else {
            return Err(self.unexpected(&["*", "("]));
        };
        self.expect(")")?;
        PeriodicPoint::new(pre, period)
            .map(ClassExpr::Point)
            .map_err(|e| Self::semantic(start, e))
    }

    /// `[01]+`, or `e` when `allow_empty`.
    fn word(&mut self, allow_empty: bool) -> Result<Word> {
        self.skip_ws();
        if allow_empty && self.keyword("e") {
            return Ok(Word::empty());
        }
        let len = self
            .rest()
            .bytes()
            .take_while(|b| *b == b'0' || *b == b'1')
            .count();
        if len == 0 {
            let expected: &[&str] = if allow_empty {
                &["[01]+", "e"]
            } else {
                &["[01]+"]
            };
            return Err(self.unexpected(expected));
        }
        let w = Word::from_bits(self.rest()[..len].bytes().map(|b| b == b'1'));
        self.pos += len;
        Ok(w)
    }

    fn nat(&mut self) -> Result<usize> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.unexpected(&["natural number"]));
        }
        let digits = &self.rest()[..len];
        let n = digits.parse().map_err(|_| Error::Semantic {
            position: self.pos,
            message: format!("number {digits} is too large"),
        })?;
        self.pos += len;
        Ok(n)
    }

    fn natlist(&mut self) -> Result<Vec<usize>> {
        self.skip_ws();
        let mut out = Vec::new();
        if !self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            return Ok(out);
        }
        out.push(self.nat()?);
        while self.eat(",") {
            out.push(self.nat()?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn direct_constructors() {
        assert_eq!(
            parse("sft{00,11}").unwrap(),
            ClassExpr::sft([w("00"), w("11")]).unwrap()
        );
        assert_eq!(
            parse("dsum(full, point(0*))").unwrap(),
            ClassExpr::dsum(ClassExpr::Full, ClassExpr::point(w(""), w("0")).unwrap())
        );
        assert_eq!(
            parse("sep(0,2; 1)").unwrap(),
            ClassExpr::sep([0, 2], [1]).unwrap()
        );
    }

    #[test]
    fn point_forms() {
        assert_eq!(
            parse("point(01(10)*)").unwrap(),
            ClassExpr::point(w("01"), w("10")).unwrap()
        );
        assert_eq!(
            parse("point(011*)").unwrap(),
            ClassExpr::point(w("01"), w("1")).unwrap()
        );
        assert_eq!(
            parse("point((10)*)").unwrap(),
            parse("point(e(10)*)").unwrap()
        );
    }

    #[test]
    fn empty_separation_lists() {
        assert_eq!(parse("sep(;)").unwrap(), ClassExpr::sep([], []).unwrap());
        assert_eq!(parse("sep( ; 4)").unwrap(), ClassExpr::sep([], [4]).unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("prod(full; full)") {
            Err(Error::Syntax {
                position, expected, ..
            }) => {
                assert_eq!(position, 9);
                assert_eq!(expected, vec![",".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("fullx") {
            Err(Error::Syntax { position: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("full full"), Err(Error::Syntax { position: 5, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { position: 0, .. })));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(parse("sep(1;1)"), Err(Error::Semantic { .. })));
        assert!(matches!(parse("sft{0,11}"), Err(Error::Semantic { .. })));
        assert!(matches!(parse("point(01)"), Err(Error::Semantic { .. })));
        assert!(matches!(parse("point(0(e)*)"), Err(Error::Semantic { .. })));
        assert!(matches!(parse("diag(0)"), Err(Error::Semantic { .. })));
    }

    #[test]
    fn whitespace_is_not_allowed_inside_words() {
        assert!(parse("sft{0 0}").is_err());
        assert!(parse(" union ( full , cyl( 1 , ex6 ) ) ").is_ok());
        assert!(parse("sft {00, 11}").is_ok());
    }
}
