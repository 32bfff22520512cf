//! Terms of MV logic and its divisible (DMV) and Riesz (RMV) extensions.
//!
//! A [`Term`] is an immutable, reference-counted syntax tree. Subterms may be
//! shared, so a term is really a DAG; every traversal in this module memoizes
//! on node identity, which keeps terms with exponentially long expansions
//! (e.g. iterated self-substitution) cheap to build, evaluate and measure.
//! Reported lengths always refer to the fully expanded tree.

mod eval;
mod format;
mod ops;
mod parse;
mod random;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use eval::{eval_term, mv, TermProgram};
pub use format::format_term;
pub(crate) use ops::simplify_root;
pub use ops::{min_max_encode, simplify, substitute, MinMax, Substituter};
pub use parse::parse_term;
pub use random::{random_term, random_term_with};

/// Syntax node. Children are [`Term`] handles.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Zero,
    /// 1-based variable index.
    Var(usize),
    Not(Term),
    Oplus(Term, Term),
    Odot(Term, Term),
    /// Division by a positive integer, `x / k`.
    Delta(u64, Term),
    /// Multiplication by a real factor in `[0,1]`.
    Scale(f64, Term),
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

/// The logic a term belongs to, ordered by expressiveness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Logic {
    Mv,
    Dmv,
    Rmv,
}

impl Logic {
    pub fn as_str(self) -> &'static str {
        match self {
            Logic::Mv => "mv",
            Logic::Dmv => "dmv",
            Logic::Rmv => "rmv",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Logic {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Logic> {
        match s {
            "mv" => Ok(Logic::Mv),
            "dmv" => Ok(Logic::Dmv),
            "rmv" => Ok(Logic::Rmv),
            other => Err(crate::Error::InvalidParameter(format!("unknown logic {other:?}"))),
        }
    }
}

impl Term {
    fn new(node: Node) -> Term {
        Term(Arc::new(node))
    }

    pub fn zero() -> Term {
        Term::new(Node::Zero)
    }

    pub fn one() -> Term {
        Term::negation(Term::zero())
    }

    /// Variable `x_index`; indices are 1-based.
    pub fn var(index: usize) -> Term {
        assert!(index >= 1, "variable indices start at 1");
        Term::new(Node::Var(index))
    }

    pub fn negation(t: Term) -> Term {
        Term::new(Node::Not(t))
    }

    pub fn oplus(a: Term, b: Term) -> Term {
        Term::new(Node::Oplus(a, b))
    }

    pub fn odot(a: Term, b: Term) -> Term {
        Term::new(Node::Odot(a, b))
    }

    pub fn delta(divisor: u64, t: Term) -> Term {
        assert!(divisor >= 1, "division operator needs a positive divisor");
        Term::new(Node::Delta(divisor, t))
    }

    pub fn scale(factor: f64, t: Term) -> Term {
        assert!(
            (0.0..=1.0).contains(&factor),
            "scale factor {factor} outside [0,1]"
        );
        Term::new(Node::Scale(factor, t))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Identity of the underlying node; equal ids imply equal terms.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Not(t) if t.is_zero())
    }

    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Zero | Node::Var(_) => vec![],
            Node::Not(t) | Node::Delta(_, t) | Node::Scale(_, t) => vec![t],
            Node::Oplus(a, b) | Node::Odot(a, b) => vec![a, b],
        }
    }

    /// Bottom-up fold over the DAG, visiting each distinct node once.
    pub fn fold<R: Clone>(&self, f: &mut impl FnMut(&Term, &[R]) -> R) -> R {
        let mut memo = HashMap::new();
        self.fold_with(&mut memo, f)
    }

    pub(crate) fn fold_with<R: Clone>(
        &self,
        memo: &mut HashMap<usize, R>,
        f: &mut impl FnMut(&Term, &[R]) -> R,
    ) -> R {
        if let Some(r) = memo.get(&self.id()) {
            return r.clone();
        }
        let kids: Vec<R> = self
            .children()
            .into_iter()
            .map(|c| c.fold_with(memo, f))
            .collect();
        let r = f(self, &kids);
        memo.insert(self.id(), r.clone());
        r
    }

    /// Number of variable occurrences in the expanded tree (saturating).
    pub fn length(&self) -> u64 {
        self.fold(&mut |t, kids: &[u64]| match t.node() {
            Node::Var(_) => 1,
            _ => kids.iter().fold(0u64, |a, &b| a.saturating_add(b)),
        })
    }

    /// Largest variable index occurring in the term (0 for closed terms).
    pub fn max_var(&self) -> usize {
        self.fold(&mut |t, kids: &[usize]| match t.node() {
            Node::Var(i) => *i,
            _ => kids.iter().copied().max().unwrap_or(0),
        })
    }

    /// Least logic containing the term: any `Scale` makes it RMV, otherwise
    /// any `Delta` makes it DMV.
    pub fn logic(&self) -> Logic {
        self.fold(&mut |t, kids: &[Logic]| {
            let own = match t.node() {
                Node::Delta(..) => Logic::Dmv,
                Node::Scale(..) => Logic::Rmv,
                _ => Logic::Mv,
            };
            kids.iter().copied().fold(own, Logic::max)
        })
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut count = 0usize;
        self.fold(&mut |_, _: &[()]| count += 1);
        count
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.ptr_eq(other) || self.node() == other.node()
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({})", self)
    }
}

/// Length of a term, as in [`Term::length`].
pub fn term_length(t: &Term) -> u64 {
    t.length()
}
