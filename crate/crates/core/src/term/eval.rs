//! Term functions in the standard algebra on `[0,1]`.

use num_rational::BigRational;

use super::{Logic, Node, Term};
use crate::error::{Error, Result};
use crate::scalar::{Number, Scalar};

/// The connectives of the standard MV algebra and its extensions.
pub mod mv {
    use crate::scalar::{relu, Number};

    /// `min{1, x + y}`
    pub fn oplus<N: Number>(x: &N, y: &N) -> N {
        x.add(y).min_of(&N::one())
    }

    /// `max{0, x + y - 1}`
    pub fn odot<N: Number>(x: &N, y: &N) -> N {
        relu(&x.add(y).sub(&N::one()))
    }

    /// `1 - x`
    pub fn not<N: Number>(x: &N) -> N {
        N::one().sub(x)
    }

    /// `x / k`
    pub fn delta<N: Number>(k: u64, x: &N) -> N {
        x.div_int(k)
    }

    /// `r x`
    pub fn scale<N: Number>(r: f64, x: &N) -> N {
        x.mul_f64(r)
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Zero,
    Var(usize),
    Not(usize),
    Oplus(usize, usize),
    Odot(usize, usize),
    Delta(u64, usize),
    Scale(f64, usize),
}

/// A term flattened into a straight-line program over its distinct nodes.
///
/// Evaluation cost is proportional to the DAG size, not the expanded length.
#[derive(Debug, Clone)]
pub struct TermProgram {
    instrs: Vec<Instr>,
    arity: usize,
    logic: Logic,
}

impl TermProgram {
    pub fn new(t: &Term) -> TermProgram {
        let mut instrs = Vec::new();
        t.fold(&mut |node: &Term, kids: &[usize]| {
            let ins = match node.node() {
                Node::Zero => Instr::Zero,
                Node::Var(i) => Instr::Var(i - 1),
                Node::Not(_) => Instr::Not(kids[0]),
                Node::Oplus(..) => Instr::Oplus(kids[0], kids[1]),
                Node::Odot(..) => Instr::Odot(kids[0], kids[1]),
                Node::Delta(k, _) => Instr::Delta(*k, kids[0]),
                Node::Scale(r, _) => Instr::Scale(*r, kids[0]),
            };
            instrs.push(ins);
            instrs.len() - 1
        });
        TermProgram {
            instrs,
            arity: t.max_var(),
            logic: t.logic(),
        }
    }

    /// Largest variable index read by the program.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    /// Evaluates at `point`; `point.len()` must be at least [`Self::arity`].
    pub fn eval<N: Number>(&self, point: &[N]) -> N {
        let mut vals: Vec<N> = Vec::with_capacity(self.instrs.len());
        for ins in &self.instrs {
            let v = match *ins {
                Instr::Zero => N::zero(),
                Instr::Var(i) => point[i].clone(),
                Instr::Not(a) => mv::not(&vals[a]),
                Instr::Oplus(a, b) => mv::oplus(&vals[a], &vals[b]),
                Instr::Odot(a, b) => mv::odot(&vals[a], &vals[b]),
                Instr::Delta(k, a) => mv::delta(k, &vals[a]),
                Instr::Scale(r, a) => mv::scale(r, &vals[a]),
            };
            vals.push(v);
        }
        vals.pop().expect("program is never empty")
    }

    /// Exact evaluation of an MV term at the point `nums / den`, returning the
    /// numerator of the value over the same denominator.
    ///
    /// MV term functions have integer coefficients, so every intermediate
    /// value at such a point is again a multiple of `1/den`. Returns `None`
    /// for DMV/RMV programs.
    pub fn eval_fixed(&self, nums: &[i64], den: i64, buf: &mut Vec<i64>) -> Option<i64> {
        if self.logic != Logic::Mv {
            return None;
        }
        buf.clear();
        for ins in &self.instrs {
            let v = match *ins {
                Instr::Zero => 0,
                Instr::Var(i) => nums[i],
                Instr::Not(a) => den - buf[a],
                Instr::Oplus(a, b) => (buf[a] + buf[b]).min(den),
                Instr::Odot(a, b) => (buf[a] + buf[b] - den).max(0),
                Instr::Delta(..) | Instr::Scale(..) => unreachable!("MV program"),
            };
            buf.push(v);
        }
        buf.last().copied()
    }
}

/// Evaluates `t` at `point`.
///
/// MV and DMV terms at exact points are evaluated exactly and return a
/// rational; RMV terms, or points with real components, use doubles.
pub fn eval_term(t: &Term, point: &[Scalar]) -> Result<Scalar> {
    let needed = t.max_var();
    if point.len() < needed {
        return Err(Error::DimensionMismatch {
            expected: needed,
            got: point.len(),
        });
    }
    for p in point {
        if !p.is_finite() || p < &Scalar::int(0) || p > &Scalar::int(1) {
            return Err(Error::PointOutOfRange(p.to_string()));
        }
    }
    let program = TermProgram::new(t);
    let exact = t.logic() != Logic::Rmv && point.iter().all(|p| p.to_exact().is_some());
    if exact {
        let pt: Vec<BigRational> = point.iter().map(|p| p.to_exact().unwrap()).collect();
        Ok(Scalar::Rational(program.eval(&pt)))
    } else {
        let pt: Vec<f64> = point.iter().map(Scalar::to_f64).collect();
        Ok(Scalar::Real(program.eval(&pt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn hat_function_peak() {
        let t = parse_term("(x + x) * ~(x * x)", 1).unwrap();
        assert_eq!(eval_term(&t, &[q(1, 2)]).unwrap(), Scalar::int(1));
        assert_eq!(eval_term(&t, &[q(1, 4)]).unwrap(), q(1, 2));
        assert_eq!(eval_term(&t, &[q(3, 4)]).unwrap(), q(1, 2));
    }

    #[test]
    fn constants_and_division() {
        let one = Term::one();
        assert_eq!(eval_term(&one, &[q(1, 7)]).unwrap(), Scalar::int(1));
        let d = parse_term("d2(x)", 1).unwrap();
        assert_eq!(eval_term(&d, &[q(1, 3)]).unwrap(), q(1, 6));
    }

    #[test]
    fn real_terms_use_doubles() {
        let t = parse_term("s0.5(x1)", 1).unwrap();
        let v = eval_term(&t, &[q(1, 2)]).unwrap();
        assert!(matches!(v, Scalar::Real(x) if (x - 0.25).abs() < 1e-12));
    }

    #[test]
    fn errors() {
        let t = parse_term("x1 + x2", 2).unwrap();
        assert!(matches!(
            eval_term(&t, &[q(1, 2)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            eval_term(&t, &[q(1, 2), q(3, 2)]),
            Err(Error::PointOutOfRange(_))
        ));
    }

    #[test]
    fn fixed_point_agrees_with_rationals() {
        let t = parse_term("(x1 + x2 * ~x1) * ~(x2 * x2 + x1)", 2).unwrap();
        let prog = TermProgram::new(&t);
        let mut buf = Vec::new();
        for a in 0..=9 {
            for b in 0..=9 {
                let k = prog.eval_fixed(&[a, b], 9, &mut buf).unwrap();
                let exact = eval_term(&t, &[q(a, 9), q(b, 9)]).unwrap();
                assert_eq!(exact, q(k, 9));
            }
        }
    }
}
