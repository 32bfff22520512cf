//! Recursive-descent parser for the concrete term syntax.
//!
//! ```text
//! term  := sum
//! sum   := prod ('+' prod)*
//! prod  := unary ('*' unary)*
//! unary := '~' unary | 'd' INT '(' term ')' | 's' DECIMAL '(' term ')' | atom
//! atom  := '0' | '1' | 'x' INT? | '(' term ')'
//! ```
//!
//! Whitespace is insignificant and a bare `x` means `x1`.

use super::Term;
use crate::error::{Error, Result};

pub fn parse_term(text: &str, arity: usize) -> Result<Term> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        arity,
    };
    let t = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Term> {
        let mut acc = self.prod()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.prod()?;
            acc = Term::oplus(acc, rhs);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Term> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Term::odot(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Term::negation(self.unary()?))
            }
            Some(b'd') => {
                self.pos += 1;
                let start = self.pos;
                let k = self.integer()?;
                if k == 0 {
                    self.pos = start;
                    return Err(self.error("division operator needs a positive divisor"));
                }
                let inner = self.parenthesized()?;
                Ok(Term::delta(k as u64, inner))
            }
            Some(b's') => {
                self.pos += 1;
                let r = self.decimal()?;
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::ScaleOutOfRange(r));
                }
                let inner = self.parenthesized()?;
                Ok(Term::scale(r, inner))
            }
            _ => self.atom(),
        }
    }

    fn parenthesized(&mut self) -> Result<Term> {
        self.expect(b'(')?;
        let t = self.sum()?;
        self.expect(b')')?;
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Term::zero())
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::one())
            }
            Some(b'x') => {
                self.pos += 1;
                let index = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.integer()?
                } else {
                    1
                };
                if index == 0 || index > self.arity {
                    return Err(Error::VariableOutOfRange {
                        index,
                        arity: self.arity,
                    });
                }
                Ok(Term::var(index))
            }
            Some(b'(') => self.parenthesized(),
            Some(_) => Err(self.error("expected a term")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Syntax {
                pos: start,
                msg: "integer too large".into(),
            })
    }

    fn decimal(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map_err(|_| Error::Syntax {
            pos: start,
            msg: "expected a decimal".into(),
        })
    }
}
