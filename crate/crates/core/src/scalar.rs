//! Scalars carried by networks and produced by term evaluation.
//!
//! A [`Scalar`] is an exact big integer, an exact rational in lowest terms,
//! or a double. Arithmetic between scalars promotes to the wider kind
//! (`Int < Rational < Real`). The [`Number`] trait is the numeric interface
//! used by the evaluators: it is implemented for [`BigRational`] (exact) and
//! `f64` (tolerance-based comparisons).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Tolerance used when comparing real (double precision) values.
pub const EPS: f64 = 1e-9;

/// The coefficient class of a network or a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScalarKind {
    #[serde(rename = "int")]
    Integer,
    #[serde(rename = "rational")]
    Rational,
    #[serde(rename = "real")]
    Real,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Integer => "int",
            ScalarKind::Rational => "rational",
            ScalarKind::Real => "real",
        }
    }

    pub fn join(self, other: ScalarKind) -> ScalarKind {
        self.max(other)
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub enum Scalar {
    Int(BigInt),
    Rational(BigRational),
    Real(f64),
}

impl Scalar {
    pub fn int(v: i64) -> Scalar {
        Scalar::Int(BigInt::from(v))
    }

    /// Rational `num/den`, reduced. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn real(v: f64) -> Scalar {
        Scalar::Real(v)
    }

    pub fn zero_of(kind: ScalarKind) -> Scalar {
        match kind {
            ScalarKind::Integer => Scalar::Int(BigInt::zero()),
            ScalarKind::Rational => Scalar::Rational(Zero::zero()),
            ScalarKind::Real => Scalar::Real(0.0),
        }
    }

    pub fn one_of(kind: ScalarKind) -> Scalar {
        match kind {
            ScalarKind::Integer => Scalar::Int(BigInt::one()),
            ScalarKind::Rational => Scalar::Rational(One::one()),
            ScalarKind::Real => Scalar::Real(1.0),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Int(_) => ScalarKind::Integer,
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Real(_) => ScalarKind::Real,
        }
    }

    /// Exact value, if the scalar is an integer or a rational.
    pub fn to_exact(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(i) => Some(BigRational::from_integer(i.clone())),
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Real(_) => None,
        }
    }

    /// Exact value of any scalar; doubles convert to their dyadic value.
    pub fn to_dyadic(&self) -> Option<BigRational> {
        match self {
            Scalar::Real(v) => BigRational::from_float(*v),
            other => other.to_exact(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Int(i) => i.to_f64().unwrap_or(f64::NAN),
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Real(v) => *v,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Real(v) => v.is_finite(),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(i) => i.is_zero(),
            Scalar::Rational(r) => Zero::is_zero(r),
            Scalar::Real(v) => *v == 0.0,
        }
    }

    /// Converts to `kind`. Narrowing succeeds only when the value is
    /// representable exactly (a rational with denominator 1 becomes an int).
    pub fn convert(&self, kind: ScalarKind) -> Result<Scalar, Error> {
        let fail = || Error::KindMismatch(format!("{} is not representable as {}", self, kind));
        Ok(match (self, kind) {
            (Scalar::Int(i), ScalarKind::Integer) => Scalar::Int(i.clone()),
            (Scalar::Int(i), ScalarKind::Rational) => {
                Scalar::Rational(BigRational::from_integer(i.clone()))
            }
            (Scalar::Rational(r), ScalarKind::Integer) if r.is_integer() => {
                Scalar::Int(r.to_integer())
            }
            (Scalar::Rational(_), ScalarKind::Integer) => return Err(fail()),
            (Scalar::Rational(r), ScalarKind::Rational) => Scalar::Rational(r.clone()),
            (Scalar::Real(v), ScalarKind::Real) => Scalar::Real(*v),
            (Scalar::Real(_), _) => return Err(fail()),
            (s, ScalarKind::Real) => Scalar::Real(s.to_f64()),
        })
    }

    /// The narrowest kind that represents this value exactly.
    pub fn narrowest_kind(&self) -> ScalarKind {
        match self {
            Scalar::Int(_) => ScalarKind::Integer,
            Scalar::Rational(r) if r.is_integer() => ScalarKind::Integer,
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Real(_) => ScalarKind::Real,
        }
    }

    fn promote(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        let kind = a.kind().join(b.kind());
        (
            a.convert(kind).expect("widening never fails"),
            b.convert(kind).expect("widening never fails"),
        )
    }

    fn binary(
        &self,
        rhs: &Scalar,
        int: impl Fn(&BigInt, &BigInt) -> BigInt,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        real: impl Fn(f64, f64) -> f64,
    ) -> Scalar {
        match Scalar::promote(self, rhs) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(int(&a, &b)),
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(rat(&a, &b)),
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(real(a, b)),
            _ => unreachable!("promotion yields equal kinds"),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a + b, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a - b, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a * b, |a, b| a * b, |a, b| a * b)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(i) => Scalar::Int(-i),
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Real(v) => Scalar::Real(-v),
        }
    }

    /// Division by a positive integer; integers widen to rationals.
    pub fn div_int(&self, k: u64) -> Scalar {
        match self {
            Scalar::Int(i) => Scalar::Rational(BigRational::new(i.clone(), BigInt::from(k))),
            Scalar::Rational(r) => Scalar::Rational(r / BigInt::from(k)),
            Scalar::Real(v) => Scalar::Real(v / k as f64),
        }
    }
}

impl PartialEq for Scalar {
    /// Numeric equality across kinds (`Int(2) == Rational(2/1)`).
    fn eq(&self, other: &Scalar) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match Scalar::promote(self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Some(a.cmp(&b)),
            (Scalar::Rational(a), Scalar::Rational(b)) => Some(a.cmp(&b)),
            (Scalar::Real(a), Scalar::Real(b)) => a.partial_cmp(&b),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{}", i),
            Scalar::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Real(v) => write!(f, "{}", v),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"p"` (integer), `"p/q"` (rational) and decimals (real).
    fn from_str(s: &str) -> Result<Scalar, Error> {
        let s = s.trim();
        let bad = || Error::Malformed(format!("invalid scalar {:?}", s));
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Scalar::Rational(BigRational::new(p, q)));
        }
        if let Ok(i) = BigInt::from_str(s) {
            return Ok(Scalar::Int(i));
        }
        let v = f64::from_str(s).map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Scalar::Real(v))
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Scalar {
        Scalar::Rational(r)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Scalar {
        Scalar::Real(v)
    }
}

/// Numeric interface shared by the exact (`BigRational`) and inexact (`f64`)
/// evaluation paths.
pub trait Number: Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_int(&self, k: u64) -> Self;
    fn mul_f64(&self, r: f64) -> Self;
    /// Smallest integer `>= self`, saturating.
    fn ceil_i64(&self) -> i64;
    fn from_scalar(s: &Scalar) -> Self;
    fn to_scalar(&self) -> Scalar;
    /// Exact equality for rationals, `|a - b| <= EPS` for doubles.
    fn same(&self, rhs: &Self) -> bool;

    fn is_zero(&self) -> bool {
        self.same(&Self::zero())
    }

    fn max_of(&self, rhs: &Self) -> Self {
        if rhs > self {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    fn min_of(&self, rhs: &Self) -> Self {
        if rhs < self {
            rhs.clone()
        } else {
            self.clone()
        }
    }
}

impl Number for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_int(&self, k: u64) -> Self {
        self / BigInt::from(k)
    }
    fn mul_f64(&self, r: f64) -> Self {
        self * BigRational::from_float(r).expect("finite scale factor")
    }
    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer().to_i64().unwrap_or(if self.is_negative() {
            i64::MIN
        } else {
            i64::MAX
        })
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.to_dyadic().expect("finite scalar")
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Rational(self.clone())
    }
    fn same(&self, rhs: &Self) -> bool {
        self == rhs
    }
}

impl Number for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_int(&self, k: u64) -> Self {
        self / k as f64
    }
    fn mul_f64(&self, r: f64) -> Self {
        self * r
    }
    fn ceil_i64(&self) -> i64 {
        // `as` saturates
        self.ceil() as i64
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.to_f64()
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Real(*self)
    }
    fn same(&self, rhs: &Self) -> bool {
        (self - rhs).abs() <= EPS
    }
}

/// `max{0, x}`
pub fn relu<N: Number>(x: &N) -> N {
    x.max_of(&N::zero())
}

/// `min{1, max{0, x}}`
pub fn crelu<N: Number>(x: &N) -> N {
    relu(x).min_of(&N::one())
}

/// Least common multiple of the denominators of `values`, or `None` on
/// overflow of `u64`.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> Option<u64> {
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
    }
    acc.to_u64()
}

pub(crate) fn rational_from_f64_checked(v: f64) -> Option<BigRational> {
    if v.is_finite() {
        BigRational::from_float(v)
    } else {
        None
    }
}

pub(crate) fn rational_from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from_u64(v).expect("u64 fits"))
}
