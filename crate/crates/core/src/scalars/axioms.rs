use thiserror::Error;

use super::{Coefficient, Extended};

/// First law that failed in [`ring_axiom_suite`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{law} violated: {detail}")]
pub struct AxiomViolation {
    pub law: &'static str,
    pub detail: String,
}

fn check(ok: bool, law: &'static str, detail: impl FnOnce() -> String) -> Result<(), AxiomViolation> {
    if ok {
        Ok(())
    } else {
        Err(AxiomViolation { law, detail: detail() })
    }
}

/// Checks the ring axioms and valuation laws on every pair (and triple, for
/// associativity and distributivity) drawn from `samples`.
pub fn ring_axiom_suite<C: Coefficient>(samples: &[C]) -> Result<(), AxiomViolation> {
    let zero = C::zero();
    let one = C::one();
    check(zero.val() == Extended::Infinity, "val(0) = +inf", || format!("got {}", zero.val()))?;

    for x in samples {
        check((x.clone() + zero.clone()).agrees(x), "additive identity", || format!("{x}"))?;
        check((x.clone() * one.clone()).agrees(x), "multiplicative identity", || format!("{x}"))?;
        check((x.clone() + (-x.clone())).is_zero(), "additive inverse", || format!("{x}"))?;
        if !x.is_zero() {
            if let Some(inv) = x.try_inverse() {
                check((x.clone() * inv.clone()).agrees(&one), "two-sided inverse", || {
                    format!("{x} * {inv}")
                })?;
                check((inv.clone() * x.clone()).agrees(&one), "two-sided inverse", || {
                    format!("{inv} * {x}")
                })?;
            }
        }
    }

    for x in samples {
        for y in samples {
            let xy = x.clone() * y.clone();
            check(xy.agrees(&(y.clone() * x.clone())), "commutativity of *", || format!("{x}, {y}"))?;
            check(
                (x.clone() + y.clone()).agrees(&(y.clone() + x.clone())),
                "commutativity of +",
                || format!("{x}, {y}"),
            )?;
            check(xy.val() == x.val() + y.val(), "val(xy) = val(x) + val(y)", || {
                format!("x = {x}, y = {y}: {} vs {} + {}", xy.val(), x.val(), y.val())
            })?;
            let s = x.clone() + y.clone();
            let lower = x.val().min(y.val());
            check(s.val() >= lower, "val(x+y) >= min(val(x), val(y))", || {
                format!("x = {x}, y = {y}: {}", s.val())
            })?;
            if x.val() != y.val() {
                check(s.val() == lower, "val(x+y) = min when valuations differ", || {
                    format!("x = {x}, y = {y}: {}", s.val())
                })?;
            }
            for z in samples {
                check(
                    ((x.clone() * y.clone()) * z.clone()).agrees(&(x.clone() * (y.clone() * z.clone()))),
                    "associativity of *",
                    || format!("{x}, {y}, {z}"),
                )?;
                check(
                    ((x.clone() + y.clone()) + z.clone()).agrees(&(x.clone() + (y.clone() + z.clone()))),
                    "associativity of +",
                    || format!("{x}, {y}, {z}"),
                )?;
                check(
                    (x.clone() * (y.clone() + z.clone()))
                        .agrees(&(x.clone() * y.clone() + x.clone() * z.clone())),
                    "distributivity",
                    || format!("{x}, {y}, {z}"),
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::{int, rat};
    use crate::scalars::{Rational, ValuedScalar, Valuation};
    use num_traits::{One, Zero};
    use std::fmt;
    use std::ops::{Add, Mul, Neg, Sub};

    #[test]
    fn rationals_pass() {
        ring_axiom_suite(&[int(0), int(1), int(-2), rat(3, 4)]).unwrap();
    }

    #[test]
    fn valued_scalars_pass() {
        let t = ValuedScalar::t();
        let one_plus_t = ValuedScalar::one() + t.clone();
        ring_axiom_suite(&[t, one_plus_t, ValuedScalar::zero()]).unwrap();
    }

    #[test]
    fn truncated_valued_scalars_pass() {
        let t = ValuedScalar::t().with_order(6);
        let u = (ValuedScalar::one() - ValuedScalar::t() * ValuedScalar::t()).with_order(6);
        let w = ValuedScalar::monomial(rat(1, 3), -1);
        ring_axiom_suite(&[t, u, w]).unwrap();
    }

    /// Rationals whose valuation is the (wrong) constant 1.
    #[derive(Clone, Debug, PartialEq)]
    struct Skewed(Rational);

    impl fmt::Display for Skewed {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{}", self.0)
        }
    }
    impl Zero for Skewed {
        fn zero() -> Self {
            Skewed(Rational::zero())
        }
        fn is_zero(&self) -> bool {
            self.0.is_zero()
        }
    }
    impl One for Skewed {
        fn one() -> Self {
            Skewed(Rational::one())
        }
    }
    impl Add for Skewed {
        type Output = Self;
        fn add(self, r: Self) -> Self {
            Skewed(self.0 + r.0)
        }
    }
    impl Sub for Skewed {
        type Output = Self;
        fn sub(self, r: Self) -> Self {
            Skewed(self.0 - r.0)
        }
    }
    impl Mul for Skewed {
        type Output = Self;
        fn mul(self, r: Self) -> Self {
            Skewed(self.0 * r.0)
        }
    }
    impl Neg for Skewed {
        type Output = Self;
        fn neg(self) -> Self {
            Skewed(-self.0)
        }
    }
    impl Coefficient for Skewed {
        fn val(&self) -> Valuation {
            if self.0.is_zero() {
                Extended::Infinity
            } else {
                Extended::Finite(1)
            }
        }
        fn try_inverse(&self) -> Option<Self> {
            self.0.try_inverse().map(Skewed)
        }
        fn from_rational(q: &Rational) -> Self {
            Skewed(q.clone())
        }
        fn is_integral(&self) -> bool {
            self.0.is_integer()
        }
    }

    #[test]
    fn adversarial_ring_is_caught() {
        let err = ring_axiom_suite(&[Skewed(int(2)), Skewed(int(3))]).unwrap_err();
        assert_eq!(err.law, "val(xy) = val(x) + val(y)");
    }
}
