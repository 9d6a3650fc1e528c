use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::PoissonError;
use crate::lattice::{Covector, Exponent2};
use crate::scalars::{rational_serde, Rational};

/// Ordered pair of covectors `(α₁, α₂)` with `α₁ ∧ α₂ > 0`.
///
/// The pro-nilpotent algebra is spanned by `R_{α₁}^{-n₁} R_{α₂}^{-n₂}`,
/// `n₁ + n₂ ≥ 1`; in graded coordinates that monomial is `u^{n₁} v^{n₂}`
/// with `u = R_{-α₁}`, `v = R_{-α₂}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Covector; 2]", into = "[Covector; 2]")]
pub struct Basis {
    first: Covector,
    second: Covector,
}

impl Basis {
    pub fn new(first: Covector, second: Covector) -> Result<Self, PoissonError> {
        if first.wedge(second) <= 0 {
            return Err(PoissonError::DegenerateBasis(first, second));
        }
        Ok(Basis { first, second })
    }

    /// `(dx, dy)`: `u = ξ⁻¹`, `v = η⁻¹`.
    pub fn standard() -> Self {
        Basis { first: Covector::DX, second: Covector::DY }
    }

    pub fn first(&self) -> Covector {
        self.first
    }

    pub fn second(&self) -> Covector {
        self.second
    }

    pub fn det(&self) -> i64 {
        self.first.wedge(self.second)
    }

    /// Covector `n₁α₁ + n₂α₂`.
    pub fn combine(&self, n1: i64, n2: i64) -> Covector {
        n1 * self.first + n2 * self.second
    }

    /// Exponent of `u^{n₁} v^{n₂}`, i.e. `−(n₁α₁ + n₂α₂)`.
    pub fn exponent(&self, n1: i64, n2: i64) -> Exponent2 {
        -self.combine(n1, n2)
    }

    /// Graded coordinates of an exponent, as rationals (they are integers
    /// exactly when the exponent lies in the lattice spanned by the basis).
    pub fn graded(&self, e: Exponent2) -> (Rational, Rational) {
        let d = Rational::from_integer(self.det().into());
        let n1 = Rational::from_integer((-e.wedge(self.second)).into()) / &d;
        let n2 = Rational::from_integer((-self.first.wedge(e)).into()) / &d;
        (n1, n2)
    }

    /// Integral, non-negative graded coordinates, if the exponent lies in
    /// the cone monoid of the basis.
    pub fn cone_coords(&self, e: Exponent2) -> Option<(usize, usize)> {
        let (n1, n2) = self.graded(e);
        if !n1.is_integer() || !n2.is_integer() || n1.is_negative() || n2.is_negative() {
            return None;
        }
        Some((to_usize(&n1), to_usize(&n2)))
    }

    /// Decomposes a covector as `n₁α₁ + n₂α₂` with integer `n₁, n₂ ≥ 0`.
    pub fn covector_coords(&self, c: Covector) -> Option<(usize, usize)> {
        self.cone_coords(-c)
    }
}

fn to_usize(q: &Rational) -> usize {
    use num_traits::ToPrimitive;
    q.to_integer().to_usize().expect("graded coordinate out of range")
}

impl TryFrom<[Covector; 2]> for Basis {
    type Error = PoissonError;
    fn try_from(v: [Covector; 2]) -> Result<Self, PoissonError> {
        Basis::new(v[0], v[1])
    }
}

impl From<Basis> for [Covector; 2] {
    fn from(b: Basis) -> Self {
        [b.first, b.second]
    }
}

/// Which graded monomials survive truncation.
///
/// A monomial `u^{n₁} v^{n₂}` is kept when `n₁ + n₂ < order` and, for a
/// weighted filtration, `w₁n₁ + w₂n₂ ≤ bound`. The discarded set is closed
/// under multiplication by monomials, so every truncation is a quotient by
/// an ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filtration {
    order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Weights>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weights {
    #[serde(with = "rational_serde")]
    pub first: Rational,
    #[serde(with = "rational_serde")]
    pub second: Rational,
    #[serde(with = "rational_serde")]
    pub bound: Rational,
}

impl Filtration {
    /// Plain total-degree truncation: keep `n₁ + n₂ < order`.
    pub fn degree(order: usize) -> Self {
        Filtration { order, weights: None }
    }

    /// Degree truncation intersected with a weight bound; weights must be
    /// positive.
    pub fn weighted(order: usize, first: Rational, second: Rational, bound: Rational) -> Self {
        assert!(
            first > Rational::zero() && second > Rational::zero(),
            "filtration weights must be positive"
        );
        Filtration { order, weights: Some(Weights { first, second, bound }) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same weights, different degree cutoff.
    pub fn with_order(&self, order: usize) -> Self {
        Filtration { order, weights: self.weights.clone() }
    }

    pub fn weights(&self) -> Option<&Weights> {
        self.weights.as_ref()
    }

    pub fn keeps(&self, n1: usize, n2: usize) -> bool {
        if n1 + n2 >= self.order {
            return false;
        }
        match &self.weights {
            None => true,
            Some(w) => {
                let weight = &w.first * Rational::from_integer(n1.into())
                    + &w.second * Rational::from_integer(n2.into());
                weight <= w.bound
            }
        }
    }

    /// Same test for rational graded coordinates (general Laurent terms).
    pub fn keeps_rational(&self, n1: &Rational, n2: &Rational) -> bool {
        if n1 + n2 >= Rational::from_integer(self.order.into()) {
            return false;
        }
        match &self.weights {
            None => true,
            Some(w) => &w.first * n1 + &w.second * n2 <= w.bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::int;

    #[test]
    fn graded_coordinates_standard() {
        let b = Basis::standard();
        // ξ^{-1} η^{-2} = u v^2
        assert_eq!(b.cone_coords(Covector::new(-1, -2)), Some((1, 2)));
        assert_eq!(b.cone_coords(Covector::new(1, 0)), None);
        assert_eq!(b.exponent(2, 3), Covector::new(-2, -3));
    }

    #[test]
    fn non_unimodular_basis() {
        let b = Basis::new(Covector::new(1, 0), Covector::new(1, 2)).unwrap();
        assert_eq!(b.det(), 2);
        assert_eq!(b.covector_coords(Covector::new(2, 2)), Some((1, 1)));
        // (1,1) = (1/2)(1,0) + (1/2)(1,2) is not an integral combination
        assert_eq!(b.covector_coords(Covector::new(1, 1)), None);
        assert!(Basis::new(Covector::DY, Covector::DX).is_err());
    }

    #[test]
    fn weighted_keeps() {
        let f = Filtration::weighted(10, int(1), int(2), int(5));
        assert!(f.keeps(1, 2));
        assert!(!f.keeps(0, 3));
        assert!(f.keeps(5, 0));
        assert!(!Filtration::degree(3).keeps(2, 1));
    }
}
