use std::fmt;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{Basis, Filtration, GradedSeries, Hamiltonian, PoissonError, TruncSeries2};
use crate::lattice::{Covector, Exponent2};
use crate::scalars::{Coefficient, Extended, JsonScalar, Rational};

/// A formal symplectomorphism `(ξ, η) ↦ (ξA, ηB)` with `A, B ∈ 1 + (u, v)`.
///
/// The multipliers are truncated power series in the graded variables of a
/// fixed basis. `compose(g, h)` is composition of point maps, `h` first.
#[derive(Clone)]
pub struct SympAuto<C> {
    basis: Basis,
    a: GradedSeries<C>,
    b: GradedSeries<C>,
}

impl<C: Coefficient> PartialEq for SympAuto<C> {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.a == other.a && self.b == other.b
    }
}

/// `{u^i v^j, ξ} = s_ξ(i, j) · u^i v^j ξ` and likewise for `η`.
fn xi_weight(basis: Basis, i: usize, j: usize) -> i64 {
    let mu = basis.combine(i as i64, j as i64);
    mu.b
}

fn eta_weight(basis: Basis, i: usize, j: usize) -> i64 {
    let mu = basis.combine(i as i64, j as i64);
    -mu.a
}

/// Poisson bracket of two series in the graded variables:
/// `{u^i v^j, u^k v^l} = (il − jk)(α₁ ∧ α₂) u^{i+k} v^{j+l}`.
pub(crate) fn graded_bracket<C: Coefficient>(basis: Basis, x: &GradedSeries<C>, y: &GradedSeries<C>) -> GradedSeries<C> {
    let det = basis.det();
    let k = x.order();
    let mut out = GradedSeries::zero(x.filtration());
    let rhs: Vec<_> = y.terms().collect();
    for (i, j, cx) in x.terms() {
        for &(p, q, cy) in &rhs {
            if i + j + p + q >= k {
                break;
            }
            let w = (i as i64 * q as i64 - j as i64 * p as i64) * det;
            if w != 0 {
                out.add_to(i + p, j + q, C::from_integer(w) * cx.clone() * cy.clone());
            }
        }
    }
    out
}

/// Multiplies each `u^i v^j` term by `weight(i, j)`.
fn weighted<C: Coefficient>(x: &GradedSeries<C>, weight: impl Fn(usize, usize) -> i64) -> GradedSeries<C> {
    let mut out = GradedSeries::zero(x.filtration());
    for (i, j, c) in x.terms() {
        let w = weight(i, j);
        if w != 0 {
            out.set(i, j, C::from_integer(w) * c.clone());
        }
    }
    out
}

impl<C: Coefficient> SympAuto<C> {
    pub fn identity(basis: Basis, filtration: &Filtration) -> Self {
        SympAuto { basis, a: GradedSeries::one(filtration), b: GradedSeries::one(filtration) }
    }

    /// Builds from the two multipliers; both must have constant term one.
    pub fn from_multipliers(basis: Basis, a: GradedSeries<C>, b: GradedSeries<C>) -> Result<Self, PoissonError> {
        if a.filtration() != b.filtration() {
            return Err(PoissonError::BasisMismatch);
        }
        for (name, m) in [("ξ", &a), ("η", &b)] {
            if !m.constant_term().agrees(&C::one()) {
                return Err(PoissonError::NotUnipotent(format!("{name}-multiplier starts with {}", m.constant_term())));
            }
        }
        Ok(SympAuto { basis, a, b })
    }

    /// Builds from the images of `ξ` and `η`.
    pub fn from_images(xi: &TruncSeries2<C>, eta: &TruncSeries2<C>, filtration: &Filtration) -> Result<Self, PoissonError> {
        if xi.basis() != eta.basis() {
            return Err(PoissonError::BasisMismatch);
        }
        let a = xi.shift(-Covector::DX).to_graded(filtration)?;
        let b = eta.shift(-Covector::DY).to_graded(filtration)?;
        Self::from_multipliers(xi.basis(), a, b)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn filtration(&self) -> &Filtration {
        self.a.filtration()
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// `(A, B)` with `ξ ↦ ξA`, `η ↦ ηB`.
    pub fn multipliers(&self) -> (&GradedSeries<C>, &GradedSeries<C>) {
        (&self.a, &self.b)
    }

    /// Images of `ξ` and `η` as Laurent series.
    pub fn images(&self) -> (TruncSeries2<C>, TruncSeries2<C>) {
        let slack = |e: Exponent2| -> usize {
            let (n1, n2) = self.basis.graded(e);
            let d = n1 + n2;
            if d.is_positive() {
                d.ceil().to_integer().to_usize().unwrap_or(0)
            } else {
                0
            }
        };
        let cutoff = self.order() + slack(Covector::DX).max(slack(Covector::DY));
        let lift = |m: &GradedSeries<C>, shift: Exponent2| {
            TruncSeries2::from_terms(
                self.basis,
                cutoff,
                m.terms().map(|(i, j, c)| (self.basis.exponent(i as i64, j as i64) + shift, c.clone())),
            )
        };
        (lift(&self.a, Covector::DX), lift(&self.b, Covector::DY))
    }

    fn check_same(&self, other: &Self) -> Result<(), PoissonError> {
        if self.basis != other.basis || self.filtration() != other.filtration() {
            return Err(PoissonError::BasisMismatch);
        }
        Ok(())
    }

    /// `A^{ν_a} B^{ν_b}`: the factor picked up by the monomial `R_ν`.
    pub fn monomial_factor(&self, nu: Covector) -> GradedSeries<C> {
        let pa = self.a.pow(nu.a).expect("multiplier is a unit");
        let pb = self.b.pow(nu.b).expect("multiplier is a unit");
        pa.mul(&pb)
    }

    /// Pull-back of a function of `u, v` along the point map.
    pub fn pullback(&self, h: &GradedSeries<C>) -> GradedSeries<C> {
        let u = GradedSeries::monomial(1, 0, C::one(), self.filtration()).mul(&self.monomial_factor(-self.basis.first()));
        let v = GradedSeries::monomial(0, 1, C::one(), self.filtration()).mul(&self.monomial_factor(-self.basis.second()));
        h.substitute(&u, &v)
    }

    /// Point-map composition `self ∘ other`: substitute `other`'s images
    /// into `self`.
    pub fn compose(&self, other: &Self) -> Result<Self, PoissonError> {
        self.check_same(other)?;
        let a = other.a.mul(&other.pullback(&self.a));
        let b = other.b.mul(&other.pullback(&self.b));
        Ok(SympAuto { basis: self.basis, a, b })
    }

    /// Two-sided inverse modulo the filtration, by the fixed-point
    /// iteration `A_h = 1 / h^*(A_g)`; each round fixes one more degree.
    pub fn invert(&self) -> Self {
        let mut h = SympAuto::identity(self.basis, self.filtration());
        for _ in 0..self.order() {
            let a = h.pullback(&self.a).inverse().expect("unit");
            let b = h.pullback(&self.b).inverse().expect("unit");
            let next = SympAuto { basis: self.basis, a, b };
            if next == h {
                break;
            }
            h = next;
        }
        h
    }

    /// `exp({F, ·})` applied to `ξ` and `η`.
    pub fn exp_ham(f: &Hamiltonian<C>, filtration: &Filtration) -> Self {
        let basis = f.basis();
        let fg = f.to_graded(filtration);
        let flow = |weight: &dyn Fn(usize, usize) -> i64| {
            let fc = weighted(&fg, weight);
            let mut x = GradedSeries::one(filtration);
            let mut sum = x.clone();
            for n in 1..filtration.order().max(1) {
                let step = fc.mul(&x).add(&graded_bracket(basis, &fg, &x));
                let inv_n = C::from_rational(&Rational::new(1.into(), (n as i64).into()));
                x = step.scale(&inv_n);
                if x.is_zero() {
                    break;
                }
                sum = sum.add(&x);
            }
            sum
        };
        let a = flow(&|i, j| xi_weight(basis, i, j));
        let b = flow(&|i, j| eta_weight(basis, i, j));
        SympAuto { basis, a, b }
    }

    /// The degree-`k_low` Hamiltonian of an element of `G^{≥k_low}`, read
    /// off the lowest part of each multiplier.
    pub fn log_ham(&self, k_low: usize) -> Result<Hamiltonian<C>, PoissonError> {
        let one = GradedSeries::one(self.filtration());
        let da = self.a.sub(&one);
        let db = self.b.sub(&one);
        for d in [&da, &db] {
            if matches!(d.min_degree(), Some(m) if m < k_low) {
                return Err(PoissonError::BelowFiltration(k_low));
            }
        }
        let mut h = GradedSeries::zero(self.filtration());
        for j in 0..=k_low {
            let i = k_low - j;
            if !h.keeps(i, j) {
                continue;
            }
            let (ca, cb) = (da.coeff(i, j), db.coeff(i, j));
            let (sa, sb) = (xi_weight(self.basis, i, j), eta_weight(self.basis, i, j));
            let from_a = (sa != 0).then(|| ca.clone() * C::from_rational(&Rational::new(1.into(), sa.into())));
            let from_b = (sb != 0).then(|| cb.clone() * C::from_rational(&Rational::new(1.into(), sb.into())));
            let c = match (from_a, from_b) {
                (Some(x), Some(y)) if x.agrees(&y) => x,
                (Some(x), None) if cb.is_zero() => x,
                (None, Some(y)) if ca.is_zero() => y,
                _ => return Err(PoissonError::InconsistentDefect(i, j)),
            };
            h.set(i, j, c);
        }
        Ok(Hamiltonian::from_graded(self.basis, &h))
    }

    /// Whether `dξ∧dη/(ξη)` is preserved: with `θ` the Euler derivations,
    /// `(A + θ_ξA)(B + θ_ηB) − θ_ηA · θ_ξB = AB`.
    pub fn preserves_omega(&self) -> bool {
        let basis = self.basis;
        let theta_xi = |x: &GradedSeries<C>| weighted(x, |i, j| -basis.combine(i as i64, j as i64).a);
        let theta_eta = |x: &GradedSeries<C>| weighted(x, |i, j| -basis.combine(i as i64, j as i64).b);
        let lhs = self
            .a
            .add(&theta_xi(&self.a))
            .mul(&self.b.add(&theta_eta(&self.b)))
            .sub(&theta_eta(&self.a).mul(&theta_xi(&self.b)));
        lhs.agrees(&self.a.mul(&self.b))
    }

    /// Largest `r` with `g ∈ Symp^{≥r}` at the evaluation point `x`: the
    /// minimum of `val(c) − ⟨I, x⟩` over the correction terms `c ξ^I` of
    /// `A − 1` and `B − 1`.
    pub fn filtration_degree(&self, x: &[Rational; 2]) -> Extended<Rational> {
        let one = GradedSeries::one(self.filtration());
        let mut best = Extended::Infinity;
        for d in [self.a.sub(&one), self.b.sub(&one)] {
            for (i, j, c) in d.terms() {
                if let Extended::Finite(v) = c.val() {
                    let w = Rational::from_integer(v.into()) - self.basis.exponent(i as i64, j as i64).pair(x);
                    best = best.min(Extended::Finite(w));
                }
            }
        }
        best
    }

    pub fn is_identity(&self) -> bool {
        let one = GradedSeries::one(self.filtration());
        self.a.agrees(&one) && self.b.agrees(&one)
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.basis == other.basis && self.a.agrees(&other.a) && self.b.agrees(&other.b)
    }

    /// Re-truncates to a coarser filtration over the same basis.
    pub fn project(&self, filtration: &Filtration) -> Self {
        let down = |m: &GradedSeries<C>| {
            let mut out = GradedSeries::zero(filtration);
            for (i, j, c) in m.terms() {
                out.set(i, j, c.clone());
            }
            out
        };
        SympAuto { basis: self.basis, a: down(&self.a), b: down(&self.b) }
    }
}

impl<C: Coefficient> fmt::Debug for SympAuto<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SympAuto {{ ξ ↦ ξ·[{}], η ↦ η·[{}] }}", self.a, self.b)
    }
}

#[derive(Serialize, Deserialize)]
struct SympRepr<C: JsonScalar> {
    filtration: Filtration,
    #[serde(bound = "")]
    xi_image: TruncSeries2<C>,
    #[serde(bound = "")]
    eta_image: TruncSeries2<C>,
}

impl<C: JsonScalar> Serialize for SympAuto<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (xi_image, eta_image) = self.images();
        SympRepr { filtration: self.filtration().clone(), xi_image, eta_image }.serialize(s)
    }
}

impl<'de, C: JsonScalar> Deserialize<'de> for SympAuto<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SympRepr::<C>::deserialize(d)?;
        SympAuto::from_images(&repr.xi_image, &repr.eta_image, &repr.filtration).map_err(D::Error::custom)
    }
}
