use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{Basis, Filtration, GradedSeries, PoissonError};
use crate::lattice::Exponent2;
use crate::scalars::{Coefficient, JsonScalar, Rational};

/// Sparse Laurent series `Σ c_{a,b} ξ^a η^b`, truncated in the grading of a
/// basis: a term survives when its total graded degree is below `cutoff`.
///
/// Terms of negative or fractional graded degree are allowed; they only
/// matter for the residue and `p_Ω` computations.
#[derive(Clone, PartialEq)]
pub struct TruncSeries2<C> {
    basis: Basis,
    cutoff: usize,
    terms: BTreeMap<Exponent2, C>,
}

impl<C: Coefficient> TruncSeries2<C> {
    pub fn zero(basis: Basis, cutoff: usize) -> Self {
        TruncSeries2 { basis, cutoff, terms: BTreeMap::new() }
    }

    pub fn from_terms(basis: Basis, cutoff: usize, terms: impl IntoIterator<Item = (Exponent2, C)>) -> Self {
        let mut s = Self::zero(basis, cutoff);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn monomial(basis: Basis, cutoff: usize, e: Exponent2, c: C) -> Self {
        Self::from_terms(basis, cutoff, [(e, c)])
    }

    pub fn constant(basis: Basis, cutoff: usize, c: C) -> Self {
        Self::monomial(basis, cutoff, Exponent2::ZERO, c)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent2, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Exponent2) -> C {
        self.terms.get(&e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(Exponent2::ZERO)
    }

    /// Total graded degree `n₁ + n₂` of a monomial.
    pub fn degree_of(&self, e: Exponent2) -> Rational {
        let (n1, n2) = self.basis.graded(e);
        n1 + n2
    }

    pub fn keeps(&self, e: Exponent2) -> bool {
        self.degree_of(e) < Rational::from_integer(self.cutoff.into())
    }

    pub fn add_term(&mut self, e: Exponent2, c: C) {
        if c.is_zero() || !self.keeps(e) {
            return;
        }
        let sum = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), PoissonError> {
        if self.basis != other.basis || self.cutoff != other.cutoff {
            return Err(PoissonError::BasisMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PoissonError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect();
        TruncSeries2 { basis: self.basis, cutoff: self.cutoff, terms }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PoissonError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.basis, self.cutoff, self.terms().map(|(e, c)| (e, c.clone() * k.clone())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PoissonError> {
        self.check_same(other)?;
        let mut out = Self::zero(self.basis, self.cutoff);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    /// Bilinear extension of `{ξ^a η^b, ξ^c η^d} = (ad − bc) ξ^{a+c} η^{b+d}`.
    pub fn bracket(&self, other: &Self) -> Result<Self, PoissonError> {
        self.check_same(other)?;
        let mut out = Self::zero(self.basis, self.cutoff);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let w = e1.wedge(e2);
                if w != 0 {
                    out.add_term(e1 + e2, C::from_integer(w) * c1.clone() * c2.clone());
                }
            }
        }
        Ok(out)
    }

    /// Whether every term is `u^{n₁} v^{n₂}` with integers `n₁, n₂ ≥ 0` and
    /// `n₁ + n₂ ≥ 1`.
    pub fn is_algebra_element(&self) -> bool {
        self.terms.keys().all(|e| matches!(self.basis.cone_coords(*e), Some((n1, n2)) if n1 + n2 >= 1))
    }

    /// Lowest graded degree present; `None` for zero.
    pub fn min_degree(&self) -> Option<Rational> {
        self.terms.keys().map(|e| self.degree_of(*e)).min()
    }

    /// Dense graded form; fails if some term leaves the cone.
    pub fn to_graded(&self, filtration: &Filtration) -> Result<GradedSeries<C>, PoissonError> {
        let mut out = GradedSeries::zero(filtration);
        for (e, c) in self.terms() {
            let (n1, n2) = self.basis.cone_coords(e).ok_or(PoissonError::NotInCone(e))?;
            out.add_to(n1, n2, c.clone());
        }
        Ok(out)
    }

    pub fn from_graded(basis: Basis, g: &GradedSeries<C>) -> Self {
        Self::from_terms(
            basis,
            g.order(),
            g.terms().map(|(n1, n2, c)| (basis.exponent(n1 as i64, n2 as i64), c.clone())),
        )
    }

    /// Multiplies by a monomial (no truncation change beyond the usual).
    pub fn shift(&self, e: Exponent2) -> Self {
        Self::from_terms(self.basis, self.cutoff, self.terms().map(|(x, c)| (x + e, c.clone())))
    }

    /// Equality after discarding what the coefficient precision can't see.
    pub fn agrees(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.terms.values().all(|c| c.is_zero()),
            Err(_) => false,
        }
    }
}

impl<C: Coefficient> fmt::Display for TruncSeries2<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if e.a != 0 {
                write!(f, "ξ^{}", e.a)?;
            }
            if e.b != 0 {
                write!(f, "η^{}", e.b)?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for TruncSeries2<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries2[{} | basis {:?}, cutoff {}]", self, self.basis, self.cutoff)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    a: i64,
    b: i64,
    coeff: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    basis: Basis,
    cutoff: usize,
    terms: Vec<TermRepr>,
}

impl<C: JsonScalar> Serialize for TruncSeries2<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            basis: self.basis,
            cutoff: self.cutoff,
            terms: self.terms().map(|(e, c)| TermRepr { a: e.a, b: e.b, coeff: c.to_json() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de, C: JsonScalar> Deserialize<'de> for TruncSeries2<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SeriesRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            terms.push((Exponent2::new(t.a, t.b), C::from_json(&t.coeff).map_err(D::Error::custom)?));
        }
        Ok(TruncSeries2::from_terms(repr.basis, repr.cutoff, terms))
    }
}

/// An element of the pro-nilpotent Lie algebra: a series in `u, v` with no
/// constant term.
#[derive(Clone, PartialEq)]
pub struct Hamiltonian<C> {
    series: TruncSeries2<C>,
}

impl<C: Coefficient> fmt::Debug for Hamiltonian<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hamiltonian({})", self.series)
    }
}

impl<C: Coefficient> Hamiltonian<C> {
    pub fn new(series: TruncSeries2<C>) -> Result<Self, PoissonError> {
        for (e, _) in series.terms() {
            match series.basis().cone_coords(e) {
                Some((0, 0)) => return Err(PoissonError::BelowFiltration(1)),
                Some(_) => {}
                None => return Err(PoissonError::NotInCone(e)),
            }
        }
        Ok(Hamiltonian { series })
    }

    pub fn zero(basis: Basis, cutoff: usize) -> Self {
        Hamiltonian { series: TruncSeries2::zero(basis, cutoff) }
    }

    /// `c · u^{n₁} v^{n₂}`.
    pub fn monomial(basis: Basis, cutoff: usize, n1: usize, n2: usize, c: C) -> Self {
        assert!(n1 + n2 >= 1, "Hamiltonians have no constant term");
        Hamiltonian { series: TruncSeries2::monomial(basis, cutoff, basis.exponent(n1 as i64, n2 as i64), c) }
    }

    pub fn from_graded(basis: Basis, g: &GradedSeries<C>) -> Self {
        let mut g = g.clone();
        g.set(0, 0, C::zero());
        Hamiltonian { series: TruncSeries2::from_graded(basis, &g) }
    }

    pub fn series(&self) -> &TruncSeries2<C> {
        &self.series
    }

    pub fn into_series(self) -> TruncSeries2<C> {
        self.series
    }

    pub fn basis(&self) -> Basis {
        self.series.basis()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_empty()
    }

    pub fn neg(&self) -> Self {
        Hamiltonian { series: self.series.neg() }
    }

    pub fn to_graded(&self, filtration: &Filtration) -> GradedSeries<C> {
        self.series.to_graded(filtration).expect("Hamiltonian terms lie in the cone")
    }
}

/// `Σ_{n ≥ 1} (−1)ⁿ zⁿ / n²` up to `zᵏ⁻¹`: the dilogarithm-type Hamiltonian
/// whose flow multiplies by `1 + z`.
pub fn dilog_coefficients(k: usize) -> Vec<Rational> {
    (1..k)
        .map(|n| {
            let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
            sign / Rational::from_integer((n * n).into())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Covector;
    use crate::scalars::rational::int;

    fn mono(a: i64, b: i64, c: i64) -> TruncSeries2<Rational> {
        TruncSeries2::monomial(Basis::standard(), 8, Covector::new(a, b), int(c))
    }

    #[test]
    fn xi_eta_bracket() {
        // cutoff is measured in inverse monomials, so ξη has degree -2 and survives
        assert_eq!(mono(1, 0, 1).bracket(&mono(0, 1, 1)).unwrap(), mono(1, 1, 1));
        assert_eq!(mono(-1, -1, 1).bracket(&mono(1, 0, 1)).unwrap(), mono(0, -1, 1));
    }

    #[test]
    fn self_bracket_vanishes() {
        let f = mono(-1, -2, 3).add(&mono(-2, 0, 5)).unwrap();
        assert!(f.bracket(&f).unwrap().is_empty());
    }

    #[test]
    fn degree_cutoff_drops_terms() {
        let s = TruncSeries2::from_terms(Basis::standard(), 3, [(Covector::new(-2, -1), int(1))]);
        assert!(s.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let f = mono(-1, -2, 3).add(&mono(0, 1, -1)).unwrap();
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(j, r#"{"basis":[[1,0],[0,1]],"cutoff":8,"terms":[{"a":-1,"b":-2,"coeff":"3"},{"a":0,"b":1,"coeff":"-1"}]}"#);
        let back: TruncSeries2<Rational> = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn hamiltonian_rejects_constants_and_outside_terms() {
        assert!(Hamiltonian::new(mono(0, 0, 1)).is_err());
        assert!(matches!(Hamiltonian::new(mono(1, 0, 1)), Err(PoissonError::NotInCone(_))));
        assert!(Hamiltonian::new(mono(-1, 0, 1)).is_ok());
    }
}
