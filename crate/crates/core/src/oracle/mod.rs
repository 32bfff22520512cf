//! Functional equivalence checks.
//!
//! One-dimensional MV and DMV functions are compared exactly through their
//! minimal breakpoint representation ([`Pwl1D`]). Functions of several
//! variables are compared on a rational grid, which can refute equality but
//! not prove it.

mod polyline;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{Scalar};
use crate::term::{Logic, Term, TermProgram};

pub(crate) use polyline::{network_polylines, term_polyline, Polyline};

type Q = BigRational;

/// Budget, in instruction evaluations, above which [`term_pwl`] traces the
/// term symbolically instead of sampling it.
const SAMPLING_BUDGET: u128 = 100_000_000;

/// A continuous piecewise-linear function `[0,1] → [0,1]` in minimal form:
/// its vertices, from `x = 0` to `x = 1`, without collinear triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pwl1D {
    points: Vec<(Q, Q)>,
}

impl Pwl1D {
    /// Builds the minimal representation of the polyline through `points`.
    pub fn new(points: Vec<(Q, Q)>) -> Result<Pwl1D> {
        if points.len() < 2 || !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
            return Err(Error::Malformed("breakpoints must span [0,1]".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Malformed("breakpoints must strictly increase".into()));
        }
        if let Some((_, y)) = points.iter().find(|(_, y)| y.is_negative_or_above_one()) {
            return Err(Error::Malformed(format!("value {y} outside [0,1]")));
        }
        Ok(Pwl1D {
            points: Polyline { pts: points }.minimal().pts,
        })
    }

    pub(crate) fn from_polyline(p: Polyline) -> Result<Pwl1D> {
        Pwl1D::new(p.pts)
    }

    /// All vertices, including the endpoints.
    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.points
    }

    /// Number of kinks strictly inside `(0,1)`.
    pub fn interior_breakpoints(&self) -> usize {
        self.points.len() - 2
    }

    pub fn eval(&self, x: &Q) -> Q {
        Polyline {
            pts: self.points.clone(),
        }
        .eval(x)
    }
}

trait UnitRange {
    fn is_negative_or_above_one(&self) -> bool;
}

impl UnitRange for Q {
    fn is_negative_or_above_one(&self) -> bool {
        *self < Q::zero() || *self > Q::one()
    }
}

/// The Farey sequence of order `order` as `(numerator, denominator)` pairs,
/// in increasing order.
fn farey(order: u64) -> impl Iterator<Item = (u64, u64)> {
    let n = order.max(1);
    let mut state = Some(((0u64, 1u64), (1u64, n)));
    std::iter::from_fn(move || {
        let ((a, b), (c, d)) = state?;
        state = if a == 1 && b == 1 {
            None
        } else {
            let k = (n + b) / d;
            Some(((c, d), (k * c - a, k * d - b)))
        };
        Some((a, b))
    })
}

fn farey_len_estimate(order: u64) -> u128 {
    // |F_n| ~ 3n²/π²
    (order as u128 * order as u128) * 304 / 1000 + 2
}

/// Keeps the sample points where the left and right secant slopes differ.
fn breakpoints_from_samples(samples: impl Iterator<Item = (Q, Q)>) -> Vec<(Q, Q)> {
    let mut out: Vec<(Q, Q)> = Vec::new();
    let mut prev: Option<(Q, Q)> = None;
    for p in samples {
        if let Some(mid) = prev.take() {
            match out.last() {
                None => out.push(mid.clone()),
                Some(left) => {
                    let s1 = (&mid.1 - &left.1) * (&p.0 - &mid.0);
                    let s2 = (&p.1 - &mid.1) * (&mid.0 - &left.0);
                    if s1 != s2 {
                        out.push(mid.clone());
                    }
                }
            }
            prev = Some(p);
        } else {
            prev = Some(p);
        }
    }
    out.extend(prev);
    out
}

/// Reconstructs `f` from its values at all rationals in `[0,1]` with
/// denominator at most `order`.
///
/// Exact whenever every breakpoint of `f` has such a denominator; for the
/// term function of an MV term that holds with `order` = its length.
pub fn sample_pwl(f: impl Fn(&Q) -> Q, order: u64) -> Result<Pwl1D> {
    let samples = farey(order).map(|(a, b)| {
        let x = Q::new(BigInt::from(a), BigInt::from(b));
        let y = f(&x);
        (x, y)
    });
    Pwl1D::new(breakpoints_from_samples(samples))
}

/// [`sample_pwl`] for an MV term, in fixed-point integer arithmetic.
pub fn sample_term_pwl(t: &Term, order: u64) -> Result<Pwl1D> {
    if t.max_var() > 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: t.max_var(),
        });
    }
    let prog = TermProgram::new(t);
    if prog.logic() != Logic::Mv {
        return sample_pwl(|x| prog.eval(std::slice::from_ref(x)), order);
    }
    if order > 1 << 40 {
        return Err(Error::InvalidParameter(format!("sampling order {order} too large")));
    }
    let mut buf = Vec::new();
    // a point is (a, b, v) meaning (a/b, v/b)
    let mut pts: Vec<(i64, i64, i64)> = Vec::new();
    let mut prev: Option<(i64, i64, i64)> = None;
    let slope = |p: (i64, i64, i64), q: (i64, i64, i64)| -> (i128, i128) {
        let (a0, b0, v0) = (p.0 as i128, p.1 as i128, p.2 as i128);
        let (a1, b1, v1) = (q.0 as i128, q.1 as i128, q.2 as i128);
        (v1 * b0 - v0 * b1, a1 * b0 - a0 * b1)
    };
    for (a, b) in farey(order) {
        let (a, b) = (a as i64, b as i64);
        let v = prog.eval_fixed(&[a], b, &mut buf).expect("MV program");
        let cur = (a, b, v);
        if let Some(mid) = prev {
            match pts.last() {
                None => pts.push(mid),
                Some(&left) => {
                    let (n1, d1) = slope(left, mid);
                    let (n2, d2) = slope(mid, cur);
                    if n1 * d2 != n2 * d1 {
                        pts.push(mid);
                    }
                }
            }
        }
        prev = Some(cur);
    }
    pts.extend(prev);
    let q = |n: i64, d: i64| Q::new(BigInt::from(n), BigInt::from(d));
    Pwl1D::new(pts.into_iter().map(|(a, b, v)| (q(a, b), q(v, b))).collect())
}

/// Exact minimal representation of a one-variable MV or DMV term function.
///
/// MV terms are sampled at denominators up to their length when that is
/// affordable; DMV terms, whose breakpoints may have larger denominators,
/// and very long terms are traced symbolically.
pub fn term_pwl(t: &Term) -> Result<Pwl1D> {
    match t.logic() {
        Logic::Rmv => Err(Error::Unsupported(
            "breakpoint comparison of real-coefficient terms".into(),
        )),
        Logic::Mv if farey_len_estimate(t.length()) * t.dag_size() as u128 <= SAMPLING_BUDGET => {
            sample_term_pwl(t, t.length().max(1))
        }
        _ => Pwl1D::from_polyline(term_polyline(t)?),
    }
}

/// `true` iff the two minimal representations coincide.
pub fn pwl_equal(a: &Pwl1D, b: &Pwl1D) -> bool {
    a == b
}

/// Number of interior breakpoints of a one-variable term function.
pub fn count_breakpoints(t: &Term) -> Result<usize> {
    Ok(term_pwl(t)?.interior_breakpoints())
}

/// First point where two one-variable functions differ, if any.
pub fn pwl_witness(a: &Pwl1D, b: &Pwl1D) -> Option<Q> {
    let mut xs: Vec<&Q> = a.points.iter().chain(&b.points).map(|(x, _)| x).collect();
    xs.sort();
    xs.dedup();
    xs.into_iter().find(|x| a.eval(x) != b.eval(x)).cloned()
}

/// Compares `f` and `g` at points of `{0, 1/d, …, 1}^dim`.
///
/// If the grid has at most `samples` points all of them are checked, in
/// lexicographic order; otherwise `samples` points are drawn from a generator
/// seeded with `seed`. Returns the first point where the values differ
/// (exactly for rationals, by more than `EPS` for doubles).
pub fn grid_witness<N: crate::scalar::Number>(
    f: impl Fn(&[N]) -> N,
    g: impl Fn(&[N]) -> N,
    dim: usize,
    denominator: u64,
    samples: usize,
    seed: u64,
) -> Option<Vec<N>> {
    let d = denominator.max(1);
    let coords: Vec<N> = (0..=d)
        .map(|a| N::from_scalar(&Scalar::Rational(Q::new(BigInt::from(a), BigInt::from(d)))))
        .collect();
    let differs = |idx: &[usize]| -> Option<Vec<N>> {
        let p: Vec<N> = idx.iter().map(|&i| coords[i].clone()).collect();
        (!f(&p).same(&g(&p))).then_some(p)
    };
    let total = (d as u128 + 1).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total <= samples as u128 {
        let mut idx = vec![0usize; dim];
        loop {
            if let Some(p) = differs(&idx) {
                return Some(p);
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] <= d as usize {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let idx: Vec<usize> = (0..dim).map(|_| rng.gen_range(0..=d as usize)).collect();
        if let Some(p) = differs(&idx) {
            return Some(p);
        }
    }
    None
}

/// `true` iff [`grid_witness`] finds no difference.
pub fn grid_equal<N: crate::scalar::Number>(
    f: impl Fn(&[N]) -> N,
    g: impl Fn(&[N]) -> N,
    dim: usize,
    denominator: u64,
    samples: usize,
    seed: u64,
) -> bool {
    grid_witness(f, g, dim, denominator, samples, seed).is_none()
}
