//! Structural operations: substitution, simplification, lattice encodings.

use std::collections::HashMap;

use super::{Node, Term};

/// Replaces variables by terms, preserving sharing.
///
/// One substituter can be applied to many terms; results for shared
/// subterms are reused across calls.
pub struct Substituter {
    bindings: HashMap<usize, Term>,
    // input node id -> (input, output); the input handle pins the id
    memo: HashMap<usize, (Term, Term)>,
}

impl Substituter {
    pub fn new(bindings: HashMap<usize, Term>) -> Substituter {
        Substituter {
            bindings,
            memo: HashMap::new(),
        }
    }

    pub fn apply(&mut self, t: &Term) -> Term {
        if let Some((_, out)) = self.memo.get(&t.id()) {
            return out.clone();
        }
        let out = match t.node() {
            Node::Zero => t.clone(),
            Node::Var(i) => self.bindings.get(i).cloned().unwrap_or_else(|| t.clone()),
            Node::Not(a) => {
                let a2 = self.apply(a);
                rebuild1(t, a, a2, Term::negation)
            }
            Node::Delta(k, a) => {
                let k = *k;
                let a2 = self.apply(a);
                rebuild1(t, a, a2, |x| Term::delta(k, x))
            }
            Node::Scale(r, a) => {
                let r = *r;
                let a2 = self.apply(a);
                rebuild1(t, a, a2, |x| Term::scale(r, x))
            }
            Node::Oplus(a, b) => {
                let (a2, b2) = (self.apply(a), self.apply(b));
                rebuild2(t, (a, b), (a2, b2), Term::oplus)
            }
            Node::Odot(a, b) => {
                let (a2, b2) = (self.apply(a), self.apply(b));
                rebuild2(t, (a, b), (a2, b2), Term::odot)
            }
        };
        self.memo.insert(t.id(), (t.clone(), out.clone()));
        out
    }
}

fn rebuild1(orig: &Term, old: &Term, new: Term, make: impl FnOnce(Term) -> Term) -> Term {
    if old.ptr_eq(&new) {
        orig.clone()
    } else {
        make(new)
    }
}

fn rebuild2(
    orig: &Term,
    old: (&Term, &Term),
    new: (Term, Term),
    make: impl FnOnce(Term, Term) -> Term,
) -> Term {
    if old.0.ptr_eq(&new.0) && old.1.ptr_eq(&new.1) {
        orig.clone()
    } else {
        make(new.0, new.1)
    }
}

/// Replaces every `x_i` bound in `bindings` by its term.
pub fn substitute(t: &Term, bindings: &HashMap<usize, Term>) -> Term {
    if bindings.is_empty() {
        return t.clone();
    }
    Substituter::new(bindings.clone()).apply(t)
}

/// One rewrite step at the root, assuming the children are already in
/// normal form.
fn reduce(t: Term) -> Term {
    let out = match t.node() {
        Node::Not(a) => match a.node() {
            Node::Not(b) => Some(b.clone()),
            _ => None,
        },
        Node::Oplus(a, b) => {
            if a.is_one() || b.is_one() {
                Some(Term::one())
            } else if a.is_zero() {
                Some(b.clone())
            } else if b.is_zero() {
                Some(a.clone())
            } else {
                None
            }
        }
        Node::Odot(a, b) => {
            if a.is_zero() || b.is_zero() {
                Some(Term::zero())
            } else if a.is_one() {
                Some(b.clone())
            } else if b.is_one() {
                Some(a.clone())
            } else {
                None
            }
        }
        Node::Delta(k, a) => {
            if a.is_zero() {
                Some(Term::zero())
            } else if *k == 1 {
                Some(a.clone())
            } else {
                None
            }
        }
        Node::Scale(r, a) => {
            if *r == 0.0 || a.is_zero() {
                Some(Term::zero())
            } else if *r == 1.0 {
                Some(a.clone())
            } else {
                None
            }
        }
        Node::Zero | Node::Var(_) => None,
    };
    out.unwrap_or(t)
}

/// Rewrites to the fixpoint of the identity-element rules:
/// `x ⊕ 0 = x`, `x ⊕ 1 = 1`, `x ⊙ 1 = x`, `x ⊙ 0 = 0`, `¬¬x = x`,
/// `δ_1 x = x`, `δ_k 0 = 0`, `Δ_1 x = x`, `Δ_0 x = Δ_r 0 = 0`.
pub fn simplify(t: &Term) -> Term {
    t.fold(&mut |node: &Term, kids: &[Term]| {
        let rebuilt = match node.node() {
            Node::Zero | Node::Var(_) => node.clone(),
            Node::Not(a) => rebuild1(node, a, kids[0].clone(), Term::negation),
            Node::Delta(k, a) => {
                let k = *k;
                rebuild1(node, a, kids[0].clone(), |x| Term::delta(k, x))
            }
            Node::Scale(r, a) => {
                let r = *r;
                rebuild1(node, a, kids[0].clone(), |x| Term::scale(r, x))
            }
            Node::Oplus(a, b) => rebuild2(node, (a, b), (kids[0].clone(), kids[1].clone()), Term::oplus),
            Node::Odot(a, b) => rebuild2(node, (a, b), (kids[0].clone(), kids[1].clone()), Term::odot),
        };
        reduce(rebuilt)
    })
}

/// Local simplification of a freshly built node whose children are already
/// simplified.
pub(crate) fn simplify_root(t: Term) -> Term {
    reduce(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinMax {
    Min,
    Max,
}

/// `min{a,b} = ¬(¬a ⊙ b) ⊙ b` and `max{a,b} = ¬(¬a ⊕ b) ⊕ b`.
pub fn min_max_encode(kind: MinMax, a: Term, b: Term) -> Term {
    match kind {
        MinMax::Min => Term::odot(
            Term::negation(Term::odot(Term::negation(a), b.clone())),
            b,
        ),
        MinMax::Max => Term::oplus(
            Term::negation(Term::oplus(Term::negation(a), b.clone())),
            b,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{eval_term, format::format_term, parse_term};
    use crate::Scalar;

    fn p(s: &str) -> Term {
        parse_term(s, 3).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let t = p("x1 * ~x2");
        let b = HashMap::from([(1, p("x1 + x1")), (2, p("x1 * x1"))]);
        let s = substitute(&t, &b);
        assert_eq!(format_term(&s), "(x1 + x1) * ~(x1 * x1)");
        assert_eq!(substitute(&t, &HashMap::new()), t);

        let g = s.clone();
        let g2 = substitute(&g, &HashMap::from([(1, g.clone())]));
        assert_eq!(g2.length(), 16);
    }

    #[test]
    fn unbound_variables_untouched() {
        let t = p("x1 + x3");
        let s = substitute(&t, &HashMap::from([(1, p("x2"))]));
        assert_eq!(format_term(&s), "x2 + x3");
    }

    #[test]
    fn simplification_examples() {
        assert_eq!(format_term(&simplify(&p("(0 + x1) * 1"))), "x1");
        assert_eq!(format_term(&simplify(&p("x1 * 0"))), "0");
        assert_eq!(format_term(&simplify(&p("~~(x1 + x2)"))), "x1 + x2");
        assert_eq!(format_term(&simplify(&p("d1(x1) + s1(x2)"))), "x1 + x2");
        assert_eq!(format_term(&simplify(&p("d3(0) + s0(x2) + s0.5(0)"))), "0");
        assert_eq!(format_term(&simplify(&p("x1 + ~0"))), "1");
        assert_eq!(format_term(&simplify(&p("~1"))), "0");
        assert_eq!(format_term(&simplify(&p("~~~x1"))), "~x1");
    }

    #[test]
    fn simplify_keeps_unchanged_terms_shared() {
        let t = p("x1 * ~x2 + x3");
        assert!(simplify(&t).ptr_eq(&t));
    }

    #[test]
    fn min_max_shapes() {
        let (x1, x2) = (Term::var(1), Term::var(2));
        assert_eq!(
            format_term(&min_max_encode(MinMax::Min, x1.clone(), x2.clone())),
            "~(~x1 * x2) * x2"
        );
        assert_eq!(
            format_term(&min_max_encode(MinMax::Max, x1.clone(), x2)),
            "~(~x1 + x2) + x2"
        );
        let m = min_max_encode(MinMax::Min, x1.clone(), x1);
        for k in 0..=10 {
            let pt = [Scalar::ratio(k, 10)];
            assert_eq!(eval_term(&m, &pt).unwrap(), pt[0]);
        }
    }
}
