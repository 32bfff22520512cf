//! Canonical printing: ASCII operators, minimal parentheses, left-associative
//! flattening. Precedence is `~ d s` > `*` > `+`.

use std::fmt::{self, Write};

use super::{Node, Term};

const SUM: u8 = 0;
const PROD: u8 = 1;
const UNARY: u8 = 2;

fn precedence(t: &Term) -> u8 {
    match t.node() {
        Node::Oplus(..) => SUM,
        Node::Odot(..) => PROD,
        _ => UNARY,
    }
}

fn write_term(t: &Term, required: u8, out: &mut impl Write) -> fmt::Result {
    let paren = precedence(t) < required;
    if paren {
        out.write_char('(')?;
    }
    match t.node() {
        Node::Zero => out.write_char('0')?,
        Node::Var(i) => write!(out, "x{}", i)?,
        Node::Not(inner) if inner.is_zero() => out.write_char('1')?,
        Node::Not(inner) => {
            out.write_char('~')?;
            write_term(inner, UNARY, out)?;
        }
        Node::Oplus(a, b) => {
            write_term(a, SUM, out)?;
            out.write_str(" + ")?;
            write_term(b, PROD, out)?;
        }
        Node::Odot(a, b) => {
            write_term(a, PROD, out)?;
            out.write_str(" * ")?;
            write_term(b, UNARY, out)?;
        }
        Node::Delta(k, inner) => {
            write!(out, "d{}(", k)?;
            write_term(inner, SUM, out)?;
            out.write_char(')')?;
        }
        Node::Scale(r, inner) => {
            write!(out, "s{}(", r)?;
            write_term(inner, SUM, out)?;
            out.write_char(')')?;
        }
    }
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, SUM, f)
    }
}

/// Canonical string of a term.
pub fn format_term(t: &Term) -> String {
    t.to_string()
}
