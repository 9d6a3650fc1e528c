use std::collections::BTreeMap;

use num_traits::Signed;

use super::{PoissonError, TruncSeries2};
use crate::lattice::{origin_in_hull, Exponent2};
use crate::scalars::{Coefficient, Extended, Rational, DEFAULT_RELATIVE_PRECISION};

/// Point `x ∈ R²` at which norms `|ξ^I| = exp(⟨I, x⟩)` are evaluated.
pub type EvalPoint = [Rational; 2];

/// Constant term against `Ω^can = (dξ/ξ)∧(dη/η)`.
pub fn residue<C: Coefficient>(f: &TruncSeries2<C>) -> C {
    f.constant_term()
}

fn weight<C: Coefficient>(e: Exponent2, c: &C, x: &EvalPoint) -> Option<Rational> {
    c.val().finite().map(|v| Rational::from_integer(v.into()) - e.pair(x))
}

/// `p_Ω(a(1 + r)) = a · exp(Res(log(1 + r)))` with `Ω = Ω^can`.
///
/// `a` is the constant term. When the support of `r` misses a half-plane
/// through the origin no power of `r` has a constant term and the answer
/// is `a` exactly; otherwise every term of `r` must be small at `x`
/// (`val(c) − ⟨I, x⟩ > 0`) and the logarithm is summed until the weights
/// pass the working precision.
pub fn p_omega<C: Coefficient>(f: &TruncSeries2<C>, x: &EvalPoint) -> Result<C, PoissonError> {
    let a = f.constant_term();
    if a.val() != Extended::Finite(0) {
        return Err(PoissonError::NotAUnit(format!("constant term {a} does not have valuation 0")));
    }
    let a_inv = a.inverse()?;
    let r: BTreeMap<Exponent2, C> =
        f.terms().filter(|(e, _)| !e.is_zero()).map(|(e, c)| (e, c.clone() * a_inv.clone())).collect();
    let support: Vec<Exponent2> = r.keys().copied().collect();
    if !origin_in_hull(&support) {
        return Ok(a);
    }

    let mut min_weight: Option<Rational> = None;
    for (e, c) in &r {
        let w = weight(*e, c, x).expect("stored coefficients are non-zero");
        if !w.is_positive() {
            return Err(PoissonError::NotAUnit(format!("term with exponent {e} is not small at the evaluation point")));
        }
        min_weight = Some(match min_weight {
            Some(m) if m <= w => m,
            _ => w,
        });
    }
    let min_weight = min_weight.expect("support is non-empty");
    let precision = r
        .values()
        .filter_map(|c| c.precision())
        .chain(a.precision())
        .min()
        .unwrap_or(DEFAULT_RELATIVE_PRECISION);
    let cap = Rational::from_integer(precision.into());

    // log(1 + r) = Σ (−1)^{n+1} rⁿ / n, constant terms only
    let mut log_const = C::zero();
    let mut power = r.clone();
    let mut n: i64 = 1;
    while !power.is_empty() {
        if let Some(c0) = power.get(&Exponent2::ZERO) {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            log_const = log_const + c0.clone() * C::from_rational(&Rational::new(sign.into(), n.into()));
        }
        if min_weight.clone() * Rational::from_integer((n + 1).into()) >= cap {
            break;
        }
        let mut next: BTreeMap<Exponent2, C> = BTreeMap::new();
        for (e1, c1) in &power {
            for (e2, c2) in &r {
                let c = c1.clone() * c2.clone();
                if c.is_zero() {
                    continue;
                }
                let e = *e1 + *e2;
                if matches!(weight(e, &c, x), Some(w) if w >= cap) {
                    continue;
                }
                let slot = next.entry(e).or_insert_with(C::zero);
                *slot = slot.clone() + c;
            }
        }
        next.retain(|_, c| !c.is_zero());
        power = next;
        n += 1;
    }
    // the sum stopped at weight `cap`, so nothing beyond it is known
    let log_const = log_const.truncated(precision);
    if log_const.is_zero() {
        return Ok(a);
    }
    Ok(a * log_const.exp_series()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Covector;
    use crate::poisson::Basis;
    use crate::scalars::rational::{int, rat};
    use crate::scalars::ValuedScalar;
    use num_traits::One;

    fn origin() -> EvalPoint {
        [int(0), int(0)]
    }

    fn series<C: Coefficient>(terms: Vec<((i64, i64), C)>) -> TruncSeries2<C> {
        TruncSeries2::from_terms(Basis::standard(), 64, terms.into_iter().map(|((a, b), c)| (Covector::new(a, b), c)))
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&series(vec![((0, 0), int(1))])), int(1));
        assert_eq!(residue(&series(vec![((0, 0), int(1)), ((0, -1), int(1))])), int(1));
        assert_eq!(residue(&series(vec![((-1, 1), int(3)), ((0, 0), int(7))])), int(7));
    }

    #[test]
    fn one_plus_eta_projects_to_one() {
        let f = series(vec![((0, 0), int(1)), ((0, 1), int(1))]);
        assert_eq!(p_omega(&f, &origin()).unwrap(), int(1));
        let g = series(vec![((0, 0), rat(2, 3))]);
        assert_eq!(p_omega(&g, &origin()).unwrap(), rat(2, 3));
    }

    #[test]
    fn two_sided_support_needs_small_terms() {
        // 1 + t ξ + t ξ⁻¹: log has constant term −t² + O(t⁴)
        let t = ValuedScalar::t().with_order(6);
        let f = series(vec![((0, 0), ValuedScalar::one()), ((1, 0), t.clone()), ((-1, 0), t.clone())]);
        let p = p_omega(&f, &origin()).unwrap();
        // [r²]₀ = 2t², [r⁴]₀ = 6t⁴ so log const = −t² − 3t⁴/2
        let expected = (ValuedScalar::monomial(int(-1), 2) + ValuedScalar::monomial(rat(-3, 2), 4))
            .with_order(6)
            .exp_series()
            .unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.coeff(2), int(-1));
        assert_eq!(p.coeff(4), rat(-1, 1));

        let bad = series(vec![((0, 0), int(1)), ((1, 0), int(1)), ((-1, 0), int(1))]);
        assert!(matches!(p_omega(&bad, &origin()), Err(PoissonError::NotAUnit(_))));
    }

    #[test]
    fn wrong_constant_is_not_a_unit() {
        let t = ValuedScalar::t();
        let f = series(vec![((0, 0), t)]);
        assert!(p_omega(&f, &origin()).is_err());
    }
}
