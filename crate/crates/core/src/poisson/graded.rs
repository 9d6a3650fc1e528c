use std::fmt;
use std::sync::Arc;

use super::grading::Filtration;
use crate::scalars::Coefficient;

#[derive(Debug, PartialEq, Eq, Hash)]
struct Table {
    filtration: Filtration,
    mask: Vec<bool>,
    // kept slots in increasing total degree
    order: Vec<(usize, usize)>,
}

impl Table {
    fn new(filtration: Filtration) -> Self {
        let k = filtration.order();
        let mut mask = vec![false; k * (k + 1) / 2];
        let mut order = Vec::new();
        for d in 0..k {
            for n2 in 0..=d {
                let n1 = d - n2;
                if filtration.keeps(n1, n2) {
                    mask[index(n1, n2)] = true;
                    order.push((n1, n2));
                }
            }
        }
        Table { filtration, mask, order }
    }
}

#[inline]
fn index(n1: usize, n2: usize) -> usize {
    let d = n1 + n2;
    d * (d + 1) / 2 + n2
}

/// Truncated power series in the graded variables `u, v`.
///
/// Stored densely over the triangle `n₁ + n₂ < k`; slots dropped by the
/// filtration stay zero.
#[derive(Clone)]
pub struct GradedSeries<C> {
    table: Arc<Table>,
    coeffs: Vec<C>,
}

impl<C: Coefficient> GradedSeries<C> {
    pub fn zero(filtration: &Filtration) -> Self {
        let table = Arc::new(Table::new(filtration.clone()));
        let n = table.mask.len();
        GradedSeries { table, coeffs: vec![C::zero(); n] }
    }

    fn zero_like(&self) -> Self {
        GradedSeries { table: self.table.clone(), coeffs: vec![C::zero(); self.coeffs.len()] }
    }

    pub fn constant(c: C, filtration: &Filtration) -> Self {
        let mut s = Self::zero(filtration);
        s.set(0, 0, c);
        s
    }

    pub fn one(filtration: &Filtration) -> Self {
        Self::constant(C::one(), filtration)
    }

    pub fn monomial(n1: usize, n2: usize, c: C, filtration: &Filtration) -> Self {
        let mut s = Self::zero(filtration);
        s.set(n1, n2, c);
        s
    }

    pub fn filtration(&self) -> &Filtration {
        &self.table.filtration
    }

    pub fn order(&self) -> usize {
        self.table.filtration.order()
    }

    pub fn keeps(&self, n1: usize, n2: usize) -> bool {
        n1 + n2 < self.order() && self.table.mask[index(n1, n2)]
    }

    pub fn coeff(&self, n1: usize, n2: usize) -> C {
        if self.keeps(n1, n2) {
            self.coeffs[index(n1, n2)].clone()
        } else {
            C::zero()
        }
    }

    pub(crate) fn coeff_ref(&self, n1: usize, n2: usize) -> Option<&C> {
        self.keeps(n1, n2).then(|| &self.coeffs[index(n1, n2)])
    }

    /// Sets a coefficient; silently ignored for truncated slots.
    pub fn set(&mut self, n1: usize, n2: usize, c: C) {
        if self.keeps(n1, n2) {
            self.coeffs[index(n1, n2)] = c;
        }
    }

    pub fn add_to(&mut self, n1: usize, n2: usize, c: C) {
        if self.keeps(n1, n2) {
            let i = index(n1, n2);
            let old = std::mem::replace(&mut self.coeffs[i], C::zero());
            self.coeffs[i] = old + c;
        }
    }

    /// Non-zero terms in increasing total degree.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &C)> + '_ {
        self.table
            .order
            .iter()
            .map(move |&(n1, n2)| (n1, n2, &self.coeffs[index(n1, n2)]))
            .filter(|(_, _, c)| !c.is_zero())
    }

    pub fn constant_term(&self) -> C {
        self.coeff(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest total degree carrying a non-zero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms().map(|(n1, n2, _)| n1 + n2).next()
    }

    pub fn homogeneous_part(&self, degree: usize) -> Self {
        let mut out = self.zero_like();
        for (n1, n2, c) in self.terms() {
            if n1 + n2 == degree {
                out.set(n1, n2, c.clone());
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.table, &other.table) || self.table == other.table,
            "graded series with different filtrations"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        GradedSeries { table: self.table.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        GradedSeries { table: self.table.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| -a.clone()).collect();
        GradedSeries { table: self.table.clone(), coeffs }
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c.clone()).collect();
        GradedSeries { table: self.table.clone(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let k = self.order();
        let mut out = self.zero_like();
        let rhs: Vec<_> = other.terms().collect();
        for (a1, a2, ca) in self.terms() {
            for &(b1, b2, cb) in &rhs {
                let (n1, n2) = (a1 + b1, a2 + b2);
                if n1 + n2 >= k {
                    // rhs is sorted by degree
                    break;
                }
                if self.table.mask[index(n1, n2)] {
                    out.add_to(n1, n2, ca.clone() * cb.clone());
                }
            }
        }
        out
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Option<Self> {
        let c0_inv = self.constant_term().try_inverse()?;
        let mut out = self.zero_like();
        out.set(0, 0, c0_inv.clone());
        let tail: Vec<_> = self.terms().filter(|(n1, n2, _)| n1 + n2 > 0).collect();
        for &(m1, m2) in self.table.order.iter().skip(1) {
            let mut acc = C::zero();
            for &(a1, a2, ca) in &tail {
                if a1 > m1 || a2 > m2 {
                    continue;
                }
                if let Some(b) = out.coeff_ref(m1 - a1, m2 - a2) {
                    if !b.is_zero() {
                        acc = acc + ca.clone() * b.clone();
                    }
                }
            }
            if !acc.is_zero() {
                out.set(m1, m2, -(acc * c0_inv.clone()));
            }
        }
        Some(out)
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow(&self, exp: i64) -> Option<Self> {
        let (mut base, mut e) = if exp < 0 { (self.inverse()?, exp.unsigned_abs()) } else { (self.clone(), exp as u64) };
        let mut acc = Self::one(self.filtration());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Some(acc)
    }

    /// `self(U, V)` for series `U`, `V` without constant term.
    pub fn substitute(&self, u: &Self, v: &Self) -> Self {
        debug_assert!(u.constant_term().is_zero() && v.constant_term().is_zero());
        let k = self.order();
        let mut v_pows = vec![Self::one(self.filtration())];
        for j in 1..k {
            let next = v_pows[j - 1].mul(v);
            v_pows.push(next);
        }
        // Horner in u over rows of fixed n₁
        let mut result = self.zero_like();
        for n1 in (0..k).rev() {
            let mut row = self.zero_like();
            for (n2, vp) in v_pows.iter().enumerate().take(k - n1) {
                if let Some(c) = self.coeff_ref(n1, n2) {
                    if !c.is_zero() {
                        row = row.add(&vp.scale(c));
                    }
                }
            }
            result = result.mul(u).add(&row);
        }
        result
    }

    /// Univariate evaluation `Σ cₙ wⁿ` (index = power) by Horner.
    pub fn eval_univariate(coeffs: &[C], w: &Self) -> Self {
        let mut acc = w.zero_like();
        for c in coeffs.iter().rev() {
            acc = acc.mul(w);
            acc.add_to(0, 0, c.clone());
        }
        acc
    }

    /// Equality modulo the precision of the coefficients.
    pub fn agrees(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Leading part of degree `≥ lo`: zero out everything below.
    pub fn drop_below(&self, lo: usize) -> Self {
        let mut out = self.clone();
        for &(n1, n2) in &self.table.order {
            if n1 + n2 < lo {
                out.coeffs[index(n1, n2)] = C::zero();
            }
        }
        out
    }
}

impl<C: Coefficient> PartialEq for GradedSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.coeffs == other.coeffs
    }
}

impl<C: Coefficient> fmt::Debug for GradedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coefficient> fmt::Display for GradedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n1, n2, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if n1 > 0 {
                write!(f, "u^{n1}")?;
            }
            if n2 > 0 {
                write!(f, "v^{n2}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(deg {})", self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::{int, rat};
    use crate::scalars::Rational;

    fn filt() -> Filtration {
        Filtration::degree(6)
    }

    fn s(terms: &[(usize, usize, i64)]) -> GradedSeries<Rational> {
        let mut out = GradedSeries::zero(&filt());
        for &(a, b, c) in terms {
            out.set(a, b, int(c));
        }
        out
    }

    #[test]
    fn inverse_of_one_plus_u() {
        let x = s(&[(0, 0, 1), (1, 0, 1)]);
        let inv = x.inverse().unwrap();
        for n in 0..6 {
            assert_eq!(inv.coeff(n, 0), int(if n % 2 == 0 { 1 } else { -1 }));
        }
        assert!(x.mul(&inv).agrees(&GradedSeries::one(&filt())));
    }

    #[test]
    fn negative_power() {
        let x = s(&[(0, 0, 1), (1, 1, 2)]);
        let y = x.pow(-3).unwrap().mul(&x.pow(3).unwrap());
        assert!(y.agrees(&GradedSeries::one(&filt())));
    }

    #[test]
    fn substitution_matches_expansion() {
        // (1 + u)^2 evaluated at u -> u + v is 1 + 2u + 2v + u^2 + 2uv + v^2
        let h = s(&[(0, 0, 1), (1, 0, 2), (2, 0, 1)]);
        let u = s(&[(1, 0, 1), (0, 1, 1)]);
        let v = s(&[(0, 1, 1)]);
        let got = h.substitute(&u, &v);
        assert_eq!(got, s(&[(0, 0, 1), (1, 0, 2), (0, 1, 2), (2, 0, 1), (1, 1, 2), (0, 2, 1)]));
    }

    #[test]
    fn weighted_mask_drops_heavy_terms() {
        let f = Filtration::weighted(6, int(1), int(3), int(4));
        let mut x: GradedSeries<Rational> = GradedSeries::one(&f);
        x.set(0, 1, rat(1, 2));
        let sq = x.mul(&x);
        assert_eq!(sq.coeff(0, 1), int(1));
        assert_eq!(sq.coeff(0, 2), int(0));
        assert!(!sq.keeps(0, 2));
    }
}
