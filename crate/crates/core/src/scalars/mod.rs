//! Exact coefficient rings carrying a non-archimedean valuation.
//!
//! Two rings are provided: the rationals with the trivial valuation, and
//! [`ValuedScalar`], truncated formal Laurent series in one parameter `t`
//! over the rationals with the `t`-adic valuation. Everything downstream is
//! generic over [`Coefficient`].

mod axioms;
pub(crate) mod rational;
mod valued;

pub use axioms::{ring_axiom_suite, AxiomViolation};
pub use rational::{format_rational, parse_rational, rational_serde, Rational};
pub use valued::{ValuedScalar, DEFAULT_RELATIVE_PRECISION};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A value in `T ∪ {+∞}`.
///
/// `Finite` sorts below `Infinity`, so the derived order is the usual order
/// on the extended line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

impl<T> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl<T: Add<Output = T>> Add for Extended<T> {
    type Output = Extended<T>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => write!(f, "+inf"),
        }
    }
}

/// Valuation of a scalar: an integer, or `+∞` for zero.
pub type Valuation = Extended<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("series does not converge in this ring: {0}")]
    Divergent(&'static str),
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
}

/// A commutative ring of characteristic zero with a valuation.
///
/// Equality of truncated elements is only meaningful up to their precision;
/// use [`Coefficient::agrees`] for comparisons that should ignore the
/// discarded tail.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn val(&self) -> Valuation;

    /// Multiplicative inverse, if `self` is a unit.
    fn try_inverse(&self) -> Option<Self>;

    /// Image of a rational number under the structure map `Q → R`.
    fn from_rational(q: &Rational) -> Self;

    /// True when every rational number stored in `self` is an integer.
    fn is_integral(&self) -> bool;

    /// Precision of the element (`None` when exact).
    fn precision(&self) -> Option<i64> {
        None
    }

    /// Drop everything at or beyond `order` (no-op for exact rings).
    fn truncated(self, _order: i64) -> Self {
        self
    }

    fn from_integer(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// Equality modulo the precision of both operands.
    fn agrees(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroDivision);
        }
        self.try_inverse().ok_or(ScalarError::ZeroDivision)
    }

    fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base.clone();
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// `exp(self)` as a convergent series; needs `val(self) > 0` unless zero.
    fn exp_series(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Ok(Self::one());
        }
        let v = match self.val() {
            Extended::Finite(v) if v > 0 => v,
            _ => return Err(ScalarError::Divergent("exp needs positive valuation")),
        };
        let order = self.precision().unwrap_or(v * DEFAULT_RELATIVE_PRECISION);
        let x = self.clone().truncated(order);
        let mut sum = Self::one();
        let mut term = Self::one();
        let mut n: i64 = 1;
        while n * v < order {
            let inv_n = Self::from_rational(&Rational::new(1.into(), n.into()));
            term = term * x.clone() * inv_n;
            sum = sum + term.clone();
            n += 1;
        }
        Ok(sum.truncated(order))
    }
}

impl Coefficient for Rational {
    fn val(&self) -> Valuation {
        if self.is_zero() {
            Extended::Infinity
        } else {
            Extended::Finite(0)
        }
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Coefficients with a JSON form (rationals as `"p/q"` strings).
pub trait JsonScalar: Coefficient {
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self, String>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|i| Rational::from_integer(i.into()))
                .ok_or_else(|| format!("expected an integer or \"p/q\", got {n}")),
            other => Err(format!("expected a rational, got {other}")),
        }
    }
}

impl JsonScalar for ValuedScalar {
    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("valued scalar serializes")
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::Object(_) => serde_json::from_value(v.clone()).map_err(|e| e.to_string()),
            // a bare rational is an exact constant
            _ => Rational::from_json(v).map(ValuedScalar::constant),
        }
    }
}
