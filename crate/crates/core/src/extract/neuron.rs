//! Terms for single CReLU neurons `σ(m·x + b)` on `[0,1]^n`.
//!
//! All three tiers peel one variable at a time with
//! `σ(f) = (σ(f - m x_i) ⊕ m x_i) ⊙ σ(f - m x_i + 1)`, valid for `0 < m ≤ 1`,
//! and fold to `0` or `1` as soon as `f` is known to stay below 0 or above 1.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::network::AffineRow;
use crate::scalar::{Scalar, ScalarKind};
use crate::term::{simplify_root, Term};

/// Caps and tolerance for extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Largest common denominator accepted for rational rows.
    pub max_lcm: u64,
    /// Largest coefficient magnitude accepted for real rows.
    pub max_magnitude: f64,
    /// Real values within `eps` of 0 or 1 are treated as such.
    pub eps: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            max_lcm: 10_000,
            max_magnitude: 1e3,
            eps: crate::scalar::EPS,
        }
    }
}

fn oplus(a: Term, b: Term) -> Term {
    simplify_root(Term::oplus(a, b))
}

fn odot(a: Term, b: Term) -> Term {
    simplify_root(Term::odot(a, b))
}

fn not(a: Term) -> Term {
    simplify_root(Term::negation(a))
}

/// Memo for integer rows, keyed by `(coefficients, bias)`.
#[derive(Default)]
pub(crate) struct IntMemo {
    table: HashMap<(Vec<i64>, i64), Term>,
}

impl IntMemo {
    pub fn extract(&mut self, m: &[i64], b: i64) -> Term {
        let key = (m.to_vec(), b);
        if let Some(t) = self.table.get(&key) {
            return t.clone();
        }
        let t = self.compute(m, b);
        self.table.insert(key, t.clone());
        t
    }

    fn compute(&mut self, m: &[i64], b: i64) -> Term {
        let lo = b + m.iter().filter(|&&c| c < 0).sum::<i64>();
        let hi = b + m.iter().filter(|&&c| c > 0).sum::<i64>();
        if hi <= 0 {
            return Term::zero();
        }
        if lo >= 1 {
            return Term::one();
        }
        // largest magnitude, then positive, then lowest index
        let (i, &c) = m
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| {
                a.abs()
                    .cmp(&b.abs())
                    .then(a.signum().cmp(&b.signum()))
                    .then(j.cmp(i))
            })
            .expect("non-constant row has a coefficient");
        if c < 0 {
            let neg: Vec<i64> = m.iter().map(|v| -v).collect();
            return not(self.extract(&neg, 1 - b));
        }
        let mut rest = m.to_vec();
        rest[i] -= 1;
        let low = self.extract(&rest, b);
        let high = self.extract(&rest, b + 1);
        odot(oplus(low, Term::var(i + 1)), high)
    }
}

fn integer_entries(row: &AffineRow) -> Result<(Vec<i64>, i64)> {
    let conv = |s: &Scalar| -> Result<i64> {
        let q = s
            .to_exact()
            .filter(BigRational::is_integer)
            .ok_or_else(|| Error::KindMismatch(format!("non-integer entry {s}")))?;
        q.to_integer()
            .to_i64()
            .filter(|v| v.abs() <= 1 << 40)
            .ok_or_else(|| Error::MagnitudeCapExceeded {
                magnitude: s.to_f64(),
                cap: (1u64 << 40) as f64,
            })
    };
    Ok((
        row.coeffs.iter().map(conv).collect::<Result<_>>()?,
        conv(&row.bias)?,
    ))
}

/// MV term for `σ(row)` with integer entries.
pub fn extract_neuron_integer(row: &AffineRow) -> Result<Term> {
    let (m, b) = integer_entries(row)?;
    Ok(IntMemo::default().extract(&m, b))
}

pub(crate) fn rational_with(row: &AffineRow, opts: &ExtractOptions, memo: &mut IntMemo) -> Result<Term> {
    let entries: Vec<BigRational> = row
        .entries()
        .map(|s| {
            if s.kind() == ScalarKind::Real {
                return Err(Error::KindMismatch(format!("real entry {s} in a rational row")));
            }
            Ok(s.to_exact().expect("exact scalar"))
        })
        .collect::<Result<_>>()?;
    let lcm = entries
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let s = match lcm.to_u64() {
        Some(s) if s <= opts.max_lcm => s,
        _ => {
            return Err(Error::LcmCapExceeded {
                required: lcm.to_string(),
                cap: opts.max_lcm,
            })
        }
    };
    let scaled: Vec<AffineRow> = vec![AffineRow::new(
        entries[..entries.len() - 1]
            .iter()
            .map(|q| Scalar::Rational(q * &lcm))
            .collect(),
        Scalar::Rational(&entries[entries.len() - 1] * &lcm),
    )];
    let (m, b) = integer_entries(&scaled[0])?;
    if s == 1 {
        return Ok(memo.extract(&m, b));
    }
    let mut acc = Term::zero();
    for i in 0..s as i64 {
        let tau = memo.extract(&m, b - i);
        if tau.is_zero() {
            continue;
        }
        acc = oplus(acc, Term::delta(s, tau));
    }
    Ok(acc)
}

/// DMV term for `σ(row)` with rational entries, as `⊕_i δ_s τ_i` where `s`
/// is the common denominator and `τ_i` is the MV term of `σ(s·row - i)`.
pub fn extract_neuron_rational(row: &AffineRow, opts: &ExtractOptions) -> Result<Term> {
    rational_with(row, opts, &mut IntMemo::default())
}

/// Memo for real rows, keyed by the bit patterns of the entries.
pub(crate) struct RealMemo {
    eps: f64,
    table: HashMap<(Vec<u64>, u64), Term>,
}

impl RealMemo {
    pub fn new(eps: f64) -> RealMemo {
        RealMemo {
            eps,
            table: HashMap::new(),
        }
    }

    pub fn extract(&mut self, m: &[f64], b: f64) -> Term {
        let key = (m.iter().map(|v| v.to_bits()).collect(), b.to_bits());
        if let Some(t) = self.table.get(&key) {
            return t.clone();
        }
        let t = self.compute(m, b);
        self.table.insert(key, t.clone());
        t
    }

    fn compute(&mut self, m: &[f64], b: f64) -> Term {
        let eps = self.eps;
        let lo = b + m.iter().filter(|&&c| c < -eps).sum::<f64>();
        let hi = b + m.iter().filter(|&&c| c > eps).sum::<f64>();
        if hi <= eps {
            return Term::zero();
        }
        if lo >= 1.0 - eps {
            return Term::one();
        }
        // largest positive coefficient, lowest index on ties
        let mut pick: Option<(usize, f64)> = None;
        for (i, &c) in m.iter().enumerate() {
            if c > eps && pick.is_none_or(|(_, p)| c > p) {
                pick = Some((i, c));
            }
        }
        let Some((i, c)) = pick else {
            if m.iter().any(|&c| c < -eps) {
                let neg: Vec<f64> = m.iter().map(|v| -v).collect();
                return not(self.extract(&neg, 1.0 - b));
            }
            // constant in (0,1)
            return Term::scale(b, Term::one());
        };
        let step = c.min(1.0);
        let mut rest = m.to_vec();
        rest[i] = if step == c { 0.0 } else { c - step };
        let low = self.extract(&rest, b);
        let high = self.extract(&rest, b + 1.0);
        let peeled = simplify_root(Term::scale(step, Term::var(i + 1)));
        odot(oplus(low, peeled), high)
    }
}

pub(crate) fn real_entries(row: &AffineRow, opts: &ExtractOptions) -> Result<(Vec<f64>, f64)> {
    let mut vals = Vec::with_capacity(row.coeffs.len() + 1);
    for s in row.entries() {
        let v = s.to_f64();
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        vals.push(v);
    }
    let b = vals.pop().expect("bias");
    if let Some(&big) = vals.iter().find(|v| v.abs() > opts.max_magnitude) {
        return Err(Error::MagnitudeCapExceeded {
            magnitude: big.abs(),
            cap: opts.max_magnitude,
        });
    }
    Ok((vals, b))
}

/// RMV term for `σ(row)`, accurate to within `opts.eps`.
///
/// Peels the largest positive coefficient by `min(1, m_i)` per step; a row
/// without positive coefficients is handled through `σ(f) = ¬σ(1 - f)`.
pub fn extract_neuron_real(row: &AffineRow, opts: &ExtractOptions) -> Result<Term> {
    let (m, b) = real_entries(row, opts)?;
    Ok(RealMemo::new(opts.eps).extract(&m, b))
}
