//! Slope decomposition of the pro-nilpotent group and the degree-by-degree
//! factorization of an element into an ordered product of elementary walls.
//!
//! Every element `g` factors uniquely, modulo the cutoff, as
//! `g = g_{λ₁} ∘ g_{λ₂} ∘ … ∘ g_{λ_N}` with `λ₁ < λ₂ < …` and `g_λ` the
//! automorphism of a one-variable wall function at slope `λ`. The leftmost
//! (smallest slope) factor is applied last.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Covector;
use crate::poisson::{Basis, Filtration, GradedSeries, PoissonError, SympAuto};
use crate::scalars::{Coefficient, JsonScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorizeError {
    #[error("({0}, {1}) is not a primitive non-negative slope")]
    BadSlope(i64, i64),
    #[error("walls are not listed in counterclockwise order")]
    NotCyclic,
    #[error("malformed wall: {0}")]
    BadWall(String),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
}

/// A primitive vector `(n₁, n₂)` of the positive quadrant, ordered by
/// `n₂/n₁` via integer cross products: `(1, 0)` is slope 0 and smallest,
/// `(0, 1)` is slope ∞ and largest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Slope {
    n1: usize,
    n2: usize,
}

impl Slope {
    pub const ZERO: Slope = Slope { n1: 1, n2: 0 };
    pub const INFINITY: Slope = Slope { n1: 0, n2: 1 };

    pub fn new(n1: i64, n2: i64) -> Result<Self, FactorizeError> {
        if n1 < 0 || n2 < 0 || n1.gcd(&n2) != 1 {
            return Err(FactorizeError::BadSlope(n1, n2));
        }
        Ok(Slope { n1: n1 as usize, n2: n2 as usize })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn degree(&self) -> usize {
        self.n1 + self.n2
    }

    /// Covector `n₁α₁ + n₂α₂` in the given basis.
    pub fn covector(&self, basis: Basis) -> Covector {
        basis.combine(self.n1 as i64, self.n2 as i64)
    }

    /// All slopes of degree below `k`, in increasing order.
    pub fn all_below(k: usize) -> Vec<Slope> {
        let mut out: Vec<Slope> = (1..k)
            .flat_map(|d| (0..=d).map(move |n2| (d - n2, n2)))
            .filter(|&(n1, n2)| n1.gcd(&n2) == 1)
            .map(|(n1, n2)| Slope { n1, n2 })
            .collect();
        out.sort();
        out
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n2 * other.n1).cmp(&(self.n1 * other.n2))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<[i64; 2]> for Slope {
    type Error = FactorizeError;
    fn try_from(v: [i64; 2]) -> Result<Self, FactorizeError> {
        Slope::new(v[0], v[1])
    }
}

impl From<Slope> for [i64; 2] {
    fn from(s: Slope) -> Self {
        [s.n1 as i64, s.n2 as i64]
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

/// `f(z) = 1 + c₁z + c₂z² + …`; `coeffs[n - 1]` holds `cₙ`. Trailing zeros
/// are never stored.
#[derive(Clone, PartialEq)]
pub struct WallFunction<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> WallFunction<C> {
    pub fn one() -> Self {
        WallFunction { coeffs: Vec::new() }
    }

    pub fn new(coeffs: Vec<C>) -> Self {
        let mut w = WallFunction { coeffs };
        w.trim();
        w
    }

    /// `1 + c·zⁿ`.
    pub fn binomial(n: usize, c: C) -> Self {
        assert!(n >= 1);
        let mut coeffs = vec![C::zero(); n];
        coeffs[n - 1] = c;
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// `cₙ`, with `c₀ = 1`.
    pub fn coeff(&self, n: usize) -> C {
        match n {
            0 => C::one(),
            _ => self.coeffs.get(n - 1).cloned().unwrap_or_else(C::zero),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power present.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Product, keeping powers below `max_power`.
    pub fn mul(&self, other: &Self, max_power: usize) -> Self {
        let mut out = vec![C::zero(); max_power.saturating_sub(1)];
        for i in 0..=self.degree() {
            for j in 0..=other.degree() {
                let n = i + j;
                if n == 0 || n >= max_power {
                    continue;
                }
                let c = self.coeff(i) * other.coeff(j);
                out[n - 1] = out[n - 1].clone() + c;
            }
        }
        Self::new(out)
    }

    pub fn truncated(&self, max_power: usize) -> Self {
        Self::new(self.coeffs.iter().take(max_power.saturating_sub(1)).cloned().collect())
    }

    /// Coefficients `c₀, c₁, …` including the leading one.
    pub fn full(&self) -> Vec<C> {
        std::iter::once(C::one()).chain(self.coeffs.iter().cloned()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integral())
    }
}

impl<C: Coefficient> fmt::Debug for WallFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " + ({c})z^{}", i + 1)?;
            }
        }
        Ok(())
    }
}

impl<C: JsonScalar> Serialize for WallFunction<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de, C: JsonScalar> Deserialize<'de> for WallFunction<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        let coeffs = raw.iter().map(C::from_json).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        Ok(WallFunction::new(coeffs))
    }
}

/// Ordered map slope → wall function; trivial walls are not stored.
#[derive(Clone, PartialEq)]
pub struct SlopeFactorization<C> {
    factors: BTreeMap<Slope, WallFunction<C>>,
    order: usize,
}

impl<C: Coefficient> SlopeFactorization<C> {
    pub fn new(order: usize) -> Self {
        SlopeFactorization { factors: BTreeMap::new(), order }
    }

    pub fn from_factors(order: usize, factors: impl IntoIterator<Item = (Slope, WallFunction<C>)>) -> Self {
        let mut sf = Self::new(order);
        for (s, f) in factors {
            sf.insert(s, f);
        }
        sf
    }

    /// Sets the wall at `s`, dropping powers that fall outside the cutoff.
    pub fn insert(&mut self, s: Slope, f: WallFunction<C>) {
        let f = f.truncated(max_power(s, self.order));
        if f.is_trivial() {
            self.factors.remove(&s);
        } else {
            self.factors.insert(s, f);
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, s: Slope) -> WallFunction<C> {
        self.factors.get(&s).cloned().unwrap_or_else(WallFunction::one)
    }

    /// Non-trivial factors in increasing slope order.
    pub fn factors(&self) -> impl Iterator<Item = (Slope, &WallFunction<C>)> {
        self.factors.iter().map(|(s, f)| (*s, f))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies the wall at `s` by `1 + c·zⁿ`.
    fn absorb(&mut self, s: Slope, n: usize, c: C) {
        let cap = max_power(s, self.order);
        let f = self.get(s).mul(&WallFunction::binomial(n, c), cap);
        self.insert(s, f);
    }
}

impl<C: Coefficient> fmt::Debug for SlopeFactorization<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.factors.iter().map(|(s, w)| (s.to_string(), w))).finish()
    }
}

/// Powers `zⁿ` of a slope-`s` wall that survive degree cutoff `k`.
fn max_power(s: Slope, k: usize) -> usize {
    k.saturating_sub(1) / s.degree() + 1
}

#[derive(Serialize, Deserialize)]
struct FactorRepr<C: JsonScalar> {
    slope: Slope,
    #[serde(bound = "")]
    coeffs: WallFunction<C>,
}

#[derive(Serialize, Deserialize)]
struct FactorizationRepr<C: JsonScalar> {
    order: usize,
    #[serde(bound = "")]
    factors: Vec<FactorRepr<C>>,
}

impl<C: JsonScalar> Serialize for SlopeFactorization<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FactorizationRepr {
            order: self.order,
            factors: self.factors().map(|(slope, f)| FactorRepr { slope, coeffs: f.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de, C: JsonScalar> Deserialize<'de> for SlopeFactorization<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FactorizationRepr::<C>::deserialize(d)?;
        Ok(SlopeFactorization::from_factors(repr.order, repr.factors.into_iter().map(|f| (f.slope, f.coeffs))))
    }
}

/// `F(z)` with `z = u^{n₁} v^{n₂}`, as a graded series.
fn wall_series<C: Coefficient>(s: Slope, f: &WallFunction<C>, filtration: &Filtration) -> GradedSeries<C> {
    let mut out = GradedSeries::zero(filtration);
    for n in 0..=f.degree() {
        out.set(n * s.n1, n * s.n2, f.coeff(n));
    }
    out
}

/// The wall automorphism `ξ ↦ ξ f(z)^{μ_b}`, `η ↦ η f(z)^{−μ_a}` with
/// `μ = n₁α₁ + n₂α₂` and `z = u^{n₁} v^{n₂}`. In the standard basis this is
/// `(ξ f^q, η f^{−p})` for slope `(p, q)` and `z = ξ^{−p} η^{−q}`.
pub fn slope_auto<C: Coefficient>(s: Slope, f: &WallFunction<C>, basis: Basis, filtration: &Filtration) -> SympAuto<C> {
    let mu = s.covector(basis);
    let fz = wall_series(s, f, filtration);
    let a = fz.pow(mu.b).expect("wall functions are units");
    let b = fz.pow(-mu.a).expect("wall functions are units");
    SympAuto::from_multipliers(basis, a, b).expect("wall automorphisms are unipotent")
}

/// `wall ∘ rest` without a general substitution: only `z` has to be pulled
/// back, and `rest^*(z) = z · A^{−μ_a} B^{−μ_b}`.
fn compose_wall_left<C: Coefficient>(s: Slope, f: &WallFunction<C>, rest: &SympAuto<C>) -> SympAuto<C> {
    let basis = rest.basis();
    let filtration = rest.filtration();
    let mu = s.covector(basis);
    let z = GradedSeries::monomial(s.n1, s.n2, C::one(), filtration).mul(&rest.monomial_factor(-mu));
    let fz = GradedSeries::eval_univariate(&f.full(), &z);
    let (ra, rb) = rest.multipliers();
    let a = ra.mul(&fz.pow(mu.b).expect("unit"));
    let b = rb.mul(&fz.pow(-mu.a).expect("unit"));
    SympAuto::from_multipliers(basis, a, b).expect("wall automorphisms are unipotent")
}

/// `g_{λ₁} ∘ g_{λ₂} ∘ … ∘ g_{λ_N}` in increasing slope order.
pub fn ordered_product<C: Coefficient>(sf: &SlopeFactorization<C>, basis: Basis, filtration: &Filtration) -> SympAuto<C> {
    let mut acc = SympAuto::identity(basis, filtration);
    for (s, f) in sf.factors.iter().rev() {
        acc = compose_wall_left(*s, f, &acc);
    }
    acc
}

/// Factors `g` into walls of increasing slope, degree by degree.
///
/// At degree `d` the current product `P` agrees with `g` below `d`, so
/// `P⁻¹ ∘ g` is central modulo `d + 1` and its Hamiltonian `Σ c u^i v^j`
/// is read off `[A_g − A_P]_d`. The term `c u^i v^j` with `n = gcd(i, j)`
/// is the first-order part of the wall `1 + n c zⁿ` at slope
/// `(i/n, j/n)`, which is absorbed there.
pub fn factorize<C: Coefficient>(g: &SympAuto<C>) -> Result<SlopeFactorization<C>, FactorizeError> {
    let basis = g.basis();
    let k = g.order();
    let mut sf = SlopeFactorization::new(k);
    for d in 1..k {
        let fd = g.filtration().with_order(d + 1);
        let p = ordered_product(&sf, basis, &fd);
        let gd = g.project(&fd);
        let (ga, gb) = gd.multipliers();
        let (pa, pb) = p.multipliers();
        let defect_a = ga.sub(pa).homogeneous_part(d).add(&GradedSeries::one(&fd));
        let defect_b = gb.sub(pb).homogeneous_part(d).add(&GradedSeries::one(&fd));
        let lower_a = ga.sub(pa).sub(&ga.sub(pa).drop_below(d));
        let lower_b = gb.sub(pb).sub(&gb.sub(pb).drop_below(d));
        if !lower_a.is_zero() || !lower_b.is_zero() {
            return Err(PoissonError::BelowFiltration(d).into());
        }
        let central = SympAuto::from_multipliers(basis, defect_a, defect_b)?;
        let h = central.log_ham(d)?.to_graded(&fd);
        for (i, j, c) in h.terms() {
            let n = i.gcd(&j);
            let s = Slope { n1: i / n, n2: j / n };
            let e = C::from_integer(n as i64) * c.clone();
            sf.absorb(s, n, e);
        }
    }
    Ok(sf)
}

/// Table of wall coefficients produced by factorizing `F_∞ ∘ F_0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralityReport {
    pub order: usize,
    pub walls: Vec<ProbeRow>,
    /// `(slope, n, coefficient)` for every non-integer `cₙ`.
    pub counterexamples: Vec<(Slope, usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub slope: Slope,
    pub coeffs: Vec<String>,
}

impl IntegralityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `F_s` for a wall at slope `s` in the standard basis with degree cutoff.
pub fn standard_wall<C: Coefficient>(s: Slope, f: &WallFunction<C>, k: usize) -> SympAuto<C> {
    slope_auto(s, f, Basis::standard(), &Filtration::degree(k))
}

/// Factorizes `F_∞ ∘ F_0` and checks every produced coefficient is an
/// integer.
pub fn integrality_probe<C: Coefficient>(
    f0: &WallFunction<C>,
    finf: &WallFunction<C>,
    k: usize,
) -> Result<IntegralityReport, FactorizeError> {
    let g = standard_wall(Slope::INFINITY, finf, k).compose(&standard_wall(Slope::ZERO, f0, k))?;
    let sf = factorize(&g)?;
    let mut walls = Vec::new();
    let mut counterexamples = Vec::new();
    for (s, f) in sf.factors() {
        for (i, c) in f.coeffs().iter().enumerate() {
            if !c.is_integral() {
                counterexamples.push((s, i + 1, c.to_string()));
            }
        }
        walls.push(ProbeRow { slope: s, coeffs: f.coeffs().iter().map(|c| c.to_string()).collect() });
    }
    Ok(IntegralityReport { order: k, walls, counterexamples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Outgoing,
    Incoming,
}

/// A wall meeting a vertex: the ray from the vertex along `direction`,
/// carrying `auto` (inverted when the wall is incoming).
#[derive(Clone)]
pub struct VertexWall<C> {
    pub direction: Covector,
    pub orientation: Orientation,
    pub auto: SympAuto<C>,
}

/// Half-plane then cross-product order on directions, starting from the
/// positive x axis.
fn angle_cmp(p: Covector, q: Covector) -> Ordering {
    let half = |v: Covector| if v.b > 0 || (v.b == 0 && v.a > 0) { 0 } else { 1 };
    half(p).cmp(&half(q)).then_with(|| 0.cmp(&p.wedge(q)))
}

/// Whether `dirs` is a strictly counterclockwise cyclic sequence.
pub fn is_counterclockwise(dirs: &[Covector]) -> bool {
    if dirs.iter().any(|d| d.is_zero()) {
        return false;
    }
    let Some(start) = (0..dirs.len()).min_by(|&i, &j| angle_cmp(dirs[i], dirs[j])) else {
        return true;
    };
    (1..dirs.len()).all(|step| {
        let prev = dirs[(start + step - 1) % dirs.len()];
        let next = dirs[(start + step) % dirs.len()];
        angle_cmp(prev, next) == Ordering::Less
    })
}

/// Composes the walls around a vertex in the listed counterclockwise
/// order, incoming walls inverted, and tests for the identity.
pub fn vertex_consistency<C: Coefficient>(walls: &[VertexWall<C>]) -> Result<bool, FactorizeError> {
    let dirs: Vec<_> = walls.iter().map(|w| w.direction).collect();
    if !is_counterclockwise(&dirs) {
        return Err(FactorizeError::NotCyclic);
    }
    let Some(first) = walls.first() else {
        return Ok(true);
    };
    let mut acc = SympAuto::identity(first.auto.basis(), first.auto.filtration());
    for w in walls.iter().rev() {
        let g = match w.orientation {
            Orientation::Outgoing => w.auto.clone(),
            Orientation::Incoming => w.auto.invert(),
        };
        acc = g.compose(&acc)?;
    }
    Ok(acc.is_identity())
}

/// Counterclockwise arrangement of a factorization of `g_∞ ∘ g_0` around
/// the vertex where the slope-0 and slope-∞ walls cross: outgoing walls
/// from slope 0 up to slope ∞, then the two incoming walls. Directions are
/// the wall covectors `μ` themselves (incoming ones reversed).
pub fn arrange_vertex<C: Coefficient>(
    g0: &SympAuto<C>,
    ginf: &SympAuto<C>,
    sf: &SlopeFactorization<C>,
) -> Vec<VertexWall<C>> {
    let basis = g0.basis();
    let filtration = g0.filtration();
    let mut walls = Vec::new();
    let outgoing = |s: Slope, auto: SympAuto<C>| VertexWall { direction: s.covector(basis), orientation: Orientation::Outgoing, auto };
    walls.push(outgoing(Slope::ZERO, g0.clone()));
    for (s, f) in sf.factors() {
        if s != Slope::ZERO && s != Slope::INFINITY {
            walls.push(outgoing(s, slope_auto(s, f, basis, filtration)));
        }
    }
    walls.push(outgoing(Slope::INFINITY, ginf.clone()));
    walls.push(VertexWall { direction: -basis.first(), orientation: Orientation::Incoming, auto: g0.clone() });
    walls.push(VertexWall { direction: -basis.second(), orientation: Orientation::Incoming, auto: ginf.clone() });
    walls
}
