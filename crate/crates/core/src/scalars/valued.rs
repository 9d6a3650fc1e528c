use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, parse_rational, Rational};
use super::{Coefficient, Extended, Valuation};

/// Number of significant `t`-adic digits kept when an exact element has to
/// be expanded into an infinite series (inverse of a non-monomial, `exp`).
pub const DEFAULT_RELATIVE_PRECISION: i64 = 16;

const EXACT: i64 = i64::MAX;

/// A truncated Laurent series `Σ c_e t^e` with rational coefficients.
///
/// Terms with exponent at or above `order` are unknown and never stored.
/// Elements built from finitely many exact terms carry no truncation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValuedScalar {
    terms: BTreeMap<i64, Rational>,
    order: i64,
}

impl ValuedScalar {
    pub fn new(terms: impl IntoIterator<Item = (i64, Rational)>, order: Option<i64>) -> Self {
        let order = order.unwrap_or(EXACT);
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e >= order || c.is_zero() {
                continue;
            }
            let slot = map.entry(e).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                map.remove(&e);
            }
        }
        ValuedScalar { terms: map, order }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new([(0, c)], None)
    }

    /// `c · t^e`, exact.
    pub fn monomial(c: Rational, e: i64) -> Self {
        Self::new([(e, c)], None)
    }

    /// The uniformizer `t`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn with_order(mut self, order: i64) -> Self {
        if order < self.order {
            self.order = order;
            self.terms.retain(|&e, _| e < order);
        }
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Truncation order, `None` for exact elements.
    pub fn order(&self) -> Option<i64> {
        (self.order != EXACT).then_some(self.order)
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    pub(crate) fn leading(&self) -> Option<(i64, &Rational)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }
}

impl fmt::Display for ValuedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(o) = self.order() {
            write!(f, " + O(t^{o})")?;
        }
        Ok(())
    }
}

impl Zero for ValuedScalar {
    fn zero() -> Self {
        ValuedScalar { terms: BTreeMap::new(), order: EXACT }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ValuedScalar {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add for ValuedScalar {
    type Output = ValuedScalar;

    fn add(self, rhs: Self) -> Self {
        let order = self.order.min(rhs.order);
        Self::new(self.terms.into_iter().chain(rhs.terms), Some(order))
    }
}

impl Sub for ValuedScalar {
    type Output = ValuedScalar;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ValuedScalar {
    type Output = ValuedScalar;

    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for ValuedScalar {
    type Output = ValuedScalar;

    /// `(a + O(t^A))(b + O(t^B))` is known modulo `t^min(A + val b, B + val a)`.
    fn mul(self, rhs: Self) -> Self {
        let order = error_order(self.order, &rhs).min(error_order(rhs.order, &self));
        let mut out = BTreeMap::<i64, Rational>::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea + eb;
                if e >= order {
                    // exponents are sorted, so the rest of this row is also out
                    break;
                }
                *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        ValuedScalar { terms: out, order }
    }
}

/// Order of `O(t^order) · x`; an exact zero absorbs everything.
fn error_order(order: i64, x: &ValuedScalar) -> i64 {
    let low = x.leading().map_or(x.order, |(e, _)| e);
    if order == EXACT || low == EXACT {
        EXACT
    } else {
        order.saturating_add(low).min(EXACT - 1)
    }
}

impl Coefficient for ValuedScalar {
    fn val(&self) -> Valuation {
        match self.leading() {
            Some((e, _)) => Extended::Finite(e),
            None => Extended::Infinity,
        }
    }

    /// Factors out the leading term `c t^v` and expands the remaining unit
    /// `1 + w` as a geometric series. The result is known modulo
    /// `t^(T - 2v)`; exact non-monomial inputs are expanded to
    /// [`DEFAULT_RELATIVE_PRECISION`] significant digits.
    fn try_inverse(&self) -> Option<Self> {
        let (v, c) = self.leading()?;
        let c_inv = c.recip();
        if self.terms.len() == 1 {
            let order = if self.is_exact() { EXACT } else { self.order - 2 * v };
            return Some(ValuedScalar::new([(-v, c_inv)], Some(order)));
        }
        let rel = if self.is_exact() { DEFAULT_RELATIVE_PRECISION } else { self.order - v };
        // w = self / (c t^v) - 1, known mod t^rel
        let w = ValuedScalar::new(
            self.terms.iter().skip(1).map(|(e, x)| (e - v, x * &c_inv)),
            Some(rel),
        );
        let mut sum = ValuedScalar::one().with_order(rel);
        let mut power = ValuedScalar::one().with_order(rel);
        let minus_w = -w;
        loop {
            power = (power * minus_w.clone()).with_order(rel);
            if power.is_zero() {
                break;
            }
            sum = sum + power.clone();
        }
        Some(ValuedScalar::new(
            sum.terms.into_iter().map(|(e, x)| (e - v, x * &c_inv)),
            Some(rel - v),
        ))
    }

    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }

    fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn precision(&self) -> Option<i64> {
        self.order()
    }

    fn truncated(self, order: i64) -> Self {
        self.with_order(order)
    }
}

/// JSON form: `{"terms": [[exponent, "p/q"], ...], "order": T}` with a
/// missing or `null` order meaning exact.
#[derive(Serialize, Deserialize)]
struct ValuedScalarRepr {
    terms: Vec<(i64, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<i64>,
}

impl Serialize for ValuedScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ValuedScalarRepr {
            terms: self.terms.iter().map(|(e, c)| (*e, format_rational(c))).collect(),
            order: self.order(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValuedScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ValuedScalarRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (e, c) in repr.terms {
            terms.push((e, parse_rational(&c).map_err(D::Error::custom)?));
        }
        Ok(ValuedScalar::new(terms, repr.order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::{int, rat};

    fn series(terms: &[(i64, i64)], order: Option<i64>) -> ValuedScalar {
        ValuedScalar::new(terms.iter().map(|&(e, c)| (e, int(c))), order)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(series(&[(2, 1), (3, 3)], None).val(), Extended::Finite(2));
        assert_eq!(ValuedScalar::zero().val(), Extended::Infinity);
        assert_eq!(series(&[(0, 5)], None).val(), Extended::Finite(0));
    }

    #[test]
    fn product_precision_follows_valuations() {
        // (-t^3 + O(t^4)) t = -t^4 + O(t^5)
        let p = series(&[(3, -1)], Some(4)) * ValuedScalar::t();
        assert_eq!(p, series(&[(4, -1)], Some(5)));
        // O(t^2) t^-1 = O(t)
        let q = series(&[], Some(2)) * ValuedScalar::monomial(int(1), -1);
        assert_eq!(q.order(), Some(1));
        assert!((series(&[], Some(2)) * ValuedScalar::zero()).is_exact());
    }

    #[test]
    fn invert_monomials() {
        let t_inv = ValuedScalar::t().try_inverse().unwrap();
        assert_eq!(t_inv, ValuedScalar::monomial(int(1), -1));
        let half = series(&[(0, 2)], None).try_inverse().unwrap();
        assert_eq!(half, ValuedScalar::constant(rat(1, 2)));
        assert!(ValuedScalar::zero().try_inverse().is_none());
        assert!(ValuedScalar::zero().inverse().is_err());
    }

    #[test]
    fn invert_one_minus_t_is_geometric() {
        let x = series(&[(0, 1), (1, -1)], Some(8));
        let inv = x.try_inverse().unwrap();
        assert_eq!(inv.order(), Some(8));
        for e in 0..8 {
            assert_eq!(inv.coeff(e), int(1), "coefficient of t^{e}");
        }
        assert!((x * inv).agrees(&ValuedScalar::one()));
    }

    #[test]
    fn invert_negative_valuation() {
        // t^-1 (1 + t) known mod t^4: inverse t (1 - t + t^2 - ...) known mod t^6
        let x = series(&[(-1, 1), (0, 1)], Some(4));
        let inv = x.try_inverse().unwrap();
        assert_eq!(inv.order(), Some(6));
        assert_eq!(inv, series(&[(1, 1), (2, -1), (3, 1), (4, -1), (5, 1)], Some(6)));
    }

    #[test]
    fn invert_shifts_precision_by_twice_the_valuation() {
        // t^2 (1 + t) known mod t^10: inverse known mod t^6
        let x = series(&[(2, 1), (3, 1)], Some(10));
        let inv = x.try_inverse().unwrap();
        assert_eq!(inv.order(), Some(6));
        assert_eq!(inv.val(), Extended::Finite(-2));
        assert!((x * inv).agrees(&ValuedScalar::one()));
    }

    #[test]
    fn mixed_precision_truncates_to_minimum() {
        let a = series(&[(0, 1), (4, 1)], Some(5));
        let b = series(&[(0, 1), (2, 1)], Some(3));
        let s = a.clone() + b.clone();
        assert_eq!(s.order(), Some(3));
        assert_eq!(s, series(&[(0, 2), (2, 1)], Some(3)));
        assert_eq!((a * b).order(), Some(3));
    }

    #[test]
    fn exp_of_t() {
        let e = ValuedScalar::t().with_order(6).exp_series().unwrap();
        assert_eq!(e.coeff(3), rat(1, 6));
        assert_eq!(e.coeff(5), rat(1, 120));
        assert_eq!(e.order(), Some(6));
        assert!(ValuedScalar::one().exp_series().is_err());
    }

    #[test]
    fn json_shape() {
        let x = ValuedScalar::new([(1, rat(3, 4)), (-2, int(1))], Some(5));
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(j, r#"{"terms":[[-2,"1"],[1,"3/4"]],"order":5}"#);
        let back: ValuedScalar = serde_json::from_str(&j).unwrap();
        assert_eq!(back, x);
    }
}
