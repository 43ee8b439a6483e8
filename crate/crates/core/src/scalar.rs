//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Every algebraic routine in the crate (Lie brackets, BCH, polynomial and
//! jet arithmetic, the Taylor solver's right-hand sides) is written against
//! [`Scalar`]. Exact rationals drive the symbolic identities; `f64`/`f32`
//! drive sampling. Polynomials themselves implement [`Scalar`], which is how
//! group-law polynomials and formal-λ identities are derived with the same
//! code that evaluates points.

use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Comparison tolerance for the floating-point regime. Exact scalars ignore it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn with_rel(rel: f64) -> Self {
        Tolerance { rel, ..Default::default() }
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

/// A commutative ring with rational constants.
///
/// The transcendental hooks return `None` when the value cannot be
/// represented in this scalar type (e.g. `exp(1)` as a rational).
pub trait Scalar:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
    fn from_rational(q: &Rational) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    /// Size used to scale tolerances.
    fn magnitude(&self) -> f64;

    /// Zero test in this scalar's regime: exact for rationals and polynomials
    /// over them, tolerance-based for floats.
    fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool;

    fn try_exp(&self) -> Option<Self>;
    fn try_sin(&self) -> Option<Self>;
    fn try_cos(&self) -> Option<Self>;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Scalars with a real value.
pub trait RealScalar: Scalar {
    fn to_f64(&self) -> f64;
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }

    fn is_negligible(&self, _tol: &Tolerance, _scale: f64) -> bool {
        self.is_zero()
    }

    fn try_exp(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }

    fn try_sin(&self) -> Option<Self> {
        self.is_zero().then(Self::zero)
    }

    fn try_cos(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(q: &Rational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }

            fn magnitude(&self) -> f64 {
                (*self as f64).abs()
            }

            fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool {
                (*self as f64).abs() <= tol.abs + tol.rel * scale
            }

            fn try_exp(&self) -> Option<Self> {
                Some(self.exp())
            }

            fn try_sin(&self) -> Option<Self> {
                Some(self.sin())
            }

            fn try_cos(&self) -> Option<Self> {
                Some(self.cos())
            }
        }

        impl RealScalar for $t {
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Parses `p`, `p/q`, or a finite decimal such as `-0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().ok()?,
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac_num: BigInt = frac.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let frac_q = Rational::new(frac_num, den);
        let base = Rational::from_integer(int_part);
        return Some(if neg { base - frac_q } else { base + frac_q });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
