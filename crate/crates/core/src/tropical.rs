//! Tropicalization of Laurent polynomials with valued coefficients.
//!
//! `Val(ψ)(x) = min_I (val(c_I) − ⟨I, x⟩)` is a concave piecewise-linear
//! function, stored as the finite family of its affine pieces. Pieces that
//! never attain the minimum alone are pruned: a piece survives exactly
//! when `(I, q)` is a vertex of the lower convex hull of all `(I, q_I)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{rational_serde, Coefficient, Extended, JsonScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("Val of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("region has no vertices")]
    EmptyRegion,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unsupported dimension {0} (only 1 and 2)")]
    UnsupportedDimension(usize),
}

fn pair(i: &[i64], x: &[Rational]) -> Rational {
    i.iter().zip(x).map(|(a, b)| b * Rational::from_integer((*a).into())).sum()
}

/// `Σ c_I z^I` in one or two variables.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C> {
    dim: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero(dim: usize) -> Result<Self, TropicalError> {
        if !(1..=2).contains(&dim) {
            return Err(TropicalError::UnsupportedDimension(dim));
        }
        Ok(LaurentPoly { dim, terms: BTreeMap::new() })
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, C)>) -> Result<Self, TropicalError> {
        let mut p = Self::zero(dim)?;
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: C) -> Result<(), TropicalError> {
        if e.len() != self.dim {
            return Err(TropicalError::Dimension { expected: self.dim, got: e.len() });
        }
        let sum = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &C)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TropicalError> {
        if self.dim != other.dim {
            return Err(TropicalError::Dimension { expected: self.dim, got: other.dim });
        }
        let mut out = Self::zero(self.dim)?;
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone())?;
            }
        }
        Ok(out)
    }
}

impl<C: Coefficient> std::fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({c})z^{e:?}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<i64>,
    coeff: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

impl<C: JsonScalar> Serialize for LaurentPoly<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| TermRepr { exp: e.clone(), coeff: c.to_json() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de, C: JsonScalar> Deserialize<'de> for LaurentPoly<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            terms.push((t.exp, C::from_json(&t.coeff).map_err(D::Error::custom)?));
        }
        LaurentPoly::from_terms(repr.dim, terms).map_err(D::Error::custom)
    }
}

/// The affine function `x ↦ q − ⟨I, x⟩`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub slope: Vec<i64>,
    #[serde(with = "rational_serde")]
    pub constant: Rational,
}

impl Piece {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        &self.constant - pair(&self.slope, x)
    }
}

/// Concave PL function `min` of finitely many pieces, kept pruned and
/// sorted so that equal functions have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

impl PLFunction {
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self, TropicalError> {
        if !(1..=2).contains(&dim) {
            return Err(TropicalError::UnsupportedDimension(dim));
        }
        if let Some(p) = pieces.iter().find(|p| p.slope.len() != dim) {
            return Err(TropicalError::Dimension { expected: dim, got: p.slope.len() });
        }
        Ok(PLFunction { dim, pieces: prune(pieces) })
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: Rational) -> Self {
        PLFunction { dim, pieces: vec![Piece { slope: vec![0; dim], constant: c }] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.pieces.iter().map(|p| p.eval(x)).min().expect("a PL function has at least one piece")
    }

    /// A piece attaining the minimum at every vertex of the region (hence,
    /// by concavity, on the whole convex hull).
    pub fn affine_piece_on(&self, region: &[Vec<Rational>]) -> Result<Option<&Piece>, TropicalError> {
        if region.is_empty() {
            return Err(TropicalError::EmptyRegion);
        }
        let mins: Vec<Rational> = region.iter().map(|x| self.eval(x)).collect();
        Ok(self.pieces.iter().find(|p| region.iter().zip(&mins).all(|(x, m)| &p.eval(x) == m)))
    }

    pub fn is_affine_on(&self, region: &[Vec<Rational>]) -> Result<bool, TropicalError> {
        Ok(self.affine_piece_on(region)?.is_some())
    }

    /// SVG of the graph (1-d) or of the linearity domains (2-d) over the
    /// box `[lo, hi]` in every coordinate.
    pub fn to_svg(&self, lo: i64, hi: i64) -> String {
        let size = 400.0;
        let span = (hi - lo).max(1) as f64;
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
        let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
        let to_f = |q: &Rational| q.to_f64().unwrap_or(0.0);
        match self.dim {
            1 => {
                let steps = 200;
                let samples: Vec<(f64, f64)> = (0..=steps)
                    .map(|i| {
                        let x = Rational::from_integer(lo.into()) + Rational::new((i as i64 * (hi - lo)).into(), steps.into());
                        (to_f(&x), to_f(&self.eval(&[x])))
                    })
                    .collect();
                let ymin = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
                let ymax = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
                let yspan = (ymax - ymin).max(1.0);
                let pts: Vec<String> = samples
                    .iter()
                    .map(|(x, y)| format!("{:.2},{:.2}", (x - lo as f64) / span * size, size - (y - ymin) / yspan * size))
                    .collect();
                let _ = writeln!(out, r#"<polyline fill="none" stroke="black" stroke-width="2" points="{}"/>"#, pts.join(" "));
            }
            _ => {
                let cells = 80;
                let cell = size / cells as f64;
                for i in 0..cells {
                    for j in 0..cells {
                        let c = |k: i64| Rational::from_integer(lo.into()) + Rational::new((2 * k + 1).into(), 2.into()) * Rational::new((hi - lo).into(), (cells as i64).into());
                        let x = vec![c(i as i64), c(j as i64)];
                        let m = self.eval(&x);
                        let idx = self.pieces.iter().position(|p| p.eval(&x) == m).unwrap_or(0);
                        let hue = (idx * 137) % 360;
                        let _ = writeln!(
                            out,
                            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="hsl({hue},60%,70%)"/>"#,
                            i as f64 * cell,
                            size - (j + 1) as f64 * cell,
                            cell + 0.5,
                            cell + 0.5
                        );
                    }
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Keeps the vertices of the lower hull of `{(I, q)}`. A point is dropped
/// when some convex combination of at most `dim + 1` other points has the
/// same `I` and no larger `q`; by Carathéodory that covers every convex
/// combination.
fn prune(mut pieces: Vec<Piece>) -> Vec<Piece> {
    // same slope: keep the smallest constant
    pieces.sort_by(|a, b| a.slope.cmp(&b.slope).then(a.constant.cmp(&b.constant)));
    pieces.dedup_by(|later, earlier| later.slope == earlier.slope);
    let n = pieces.len();
    let keep: Vec<bool> = (0..n).map(|i| !dominated(&pieces, i)).collect();
    pieces.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}

fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn dominated(pieces: &[Piece], i: usize) -> bool {
    let target = &pieces[i];
    let others: Vec<&Piece> = pieces.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
    let dim = target.slope.len();
    // pairs: target on the segment
    for (a_idx, a) in others.iter().enumerate() {
        for b in &others[a_idx + 1..] {
            if let Some(q) = interpolate_segment(a, b, &target.slope) {
                if q <= target.constant {
                    return true;
                }
            }
        }
    }
    if dim == 2 {
        for (a_idx, a) in others.iter().enumerate() {
            for (b_idx, b) in others.iter().enumerate().skip(a_idx + 1) {
                for c in &others[b_idx + 1..] {
                    if let Some(q) = interpolate_triangle(a, b, c, &target.slope) {
                        if q <= target.constant {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Value at `p` of the affine interpolation along segment `ab`, if `p`
/// lies on it.
fn interpolate_segment(a: &Piece, b: &Piece, p: &[i64]) -> Option<Rational> {
    let d: Vec<i64> = a.slope.iter().zip(&b.slope).map(|(x, y)| y - x).collect();
    let r: Vec<i64> = a.slope.iter().zip(p).map(|(x, y)| y - x).collect();
    // collinearity
    if d.len() == 2 && d[0] * r[1] - d[1] * r[0] != 0 {
        return None;
    }
    let dd: i64 = d.iter().map(|x| x * x).sum();
    if dd == 0 {
        return None;
    }
    let s = Rational::new(d.iter().zip(&r).map(|(x, y)| x * y).sum::<i64>().into(), dd.into());
    if s.is_negative() || s > rat(1) {
        return None;
    }
    Some(&a.constant + s * (&b.constant - &a.constant))
}

fn interpolate_triangle(a: &Piece, b: &Piece, c: &Piece, p: &[i64]) -> Option<Rational> {
    let cross = |o: &[i64], x: &[i64], y: &[i64]| (x[0] - o[0]) * (y[1] - o[1]) - (x[1] - o[1]) * (y[0] - o[0]);
    let area = cross(&a.slope, &b.slope, &c.slope);
    if area == 0 {
        return None;
    }
    let wa = cross(p, &b.slope, &c.slope);
    let wb = cross(&a.slope, p, &c.slope);
    let wc = cross(&a.slope, &b.slope, p);
    let same_sign = |w: i64| (w >= 0) == (area > 0) || w == 0;
    if !(same_sign(wa) && same_sign(wb) && same_sign(wc)) {
        return None;
    }
    let area = rat(area);
    Some((rat(wa) * &a.constant + rat(wb) * &b.constant + rat(wc) * &c.constant) / area)
}

/// `Val(ψ)`: one piece `val(c_I) − ⟨I, x⟩` per term, pruned.
pub fn val_function<C: Coefficient>(f: &LaurentPoly<C>) -> Result<PLFunction, TropicalError> {
    if f.is_zero() {
        return Err(TropicalError::ZeroPolynomial);
    }
    let pieces = f
        .terms()
        .map(|(e, c)| Piece { slope: e.to_vec(), constant: rat(c.val().finite().expect("non-zero coefficient")) })
        .collect();
    PLFunction::new(f.dim(), pieces)
}

/// Pointwise sum: all pairwise sums of pieces, pruned.
pub fn pl_add(u: &PLFunction, v: &PLFunction) -> Result<PLFunction, TropicalError> {
    if u.dim != v.dim {
        return Err(TropicalError::Dimension { expected: u.dim, got: v.dim });
    }
    let mut pieces = Vec::with_capacity(u.pieces.len() * v.pieces.len());
    for p in &u.pieces {
        for q in &v.pieces {
            pieces.push(Piece {
                slope: p.slope.iter().zip(&q.slope).map(|(a, b)| a + b).collect(),
                constant: &p.constant + &q.constant,
            });
        }
    }
    PLFunction::new(u.dim, pieces)
}

/// `min_I (val(c_I) − ⟨I, x⟩)`: the Gauss seminorm at the fiber over `x`
/// on the valuation side; `+∞` for the zero polynomial.
pub fn gauss_seminorm<C: Coefficient>(f: &LaurentPoly<C>, x: &[Rational]) -> Extended<Rational> {
    f.terms()
        .map(|(e, c)| rat(c.val().finite().expect("non-zero coefficient")) - pair(e, x))
        .min()
        .map_or(Extended::Infinity, Extended::Finite)
}

/// Deck transformation of the Tate curve: `q^m z^n ↦ q^{m + kn} z^n` on
/// polynomials in `(q, z)`.
pub fn tate_deck_transform<C: Coefficient>(f: &LaurentPoly<C>, k: i64) -> Result<LaurentPoly<C>, TropicalError> {
    if f.dim() != 2 {
        return Err(TropicalError::Dimension { expected: 2, got: f.dim() });
    }
    LaurentPoly::from_terms(2, f.terms().map(|(e, c)| (vec![e[0] + k * e[1], e[1]], c.clone())))
}

/// `inf (m + n·x)` over the support of `f(q, z)`: the functional whose
/// finiteness defines the toy sheaf. Under the deck transformation it
/// moves by `x ↦ x + k`.
pub fn tate_functional<C: Coefficient>(f: &LaurentPoly<C>, x: &Rational) -> Extended<Rational> {
    f.terms()
        .map(|(e, _)| rat(e[0]) + rat(e[1]) * x)
        .min()
        .map_or(Extended::Infinity, Extended::Finite)
}

/// Whether `Val(f) + Val(g)` vanishes identically on the region.
pub fn sum_vanishes_on(u: &PLFunction, v: &PLFunction, region: &[Vec<Rational>]) -> Result<bool, TropicalError> {
    let s = pl_add(u, v)?;
    Ok(matches!(s.affine_piece_on(region)?, Some(p) if p.constant.is_zero() && p.slope.iter().all(|x| *x == 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::{int, rat as q};
    use crate::scalars::ValuedScalar;

    fn t_pow(e: i64) -> ValuedScalar {
        ValuedScalar::monomial(int(1), e)
    }

    fn poly1(terms: &[(i64, i64)]) -> LaurentPoly<ValuedScalar> {
        LaurentPoly::from_terms(1, terms.iter().map(|&(e, v)| (vec![e], t_pow(v)))).unwrap()
    }

    fn piece(slope: &[i64], c: i64) -> Piece {
        Piece { slope: slope.to_vec(), constant: int(c) }
    }

    #[test]
    fn val_examples() {
        let u = val_function(&poly1(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(u.pieces(), &[piece(&[0], 0), piece(&[1], 0)]);
        // t + z + z²: min(1, −x, −2x), breakpoints at −1 and 0
        let w = val_function(&poly1(&[(0, 1), (1, 0), (2, 0)])).unwrap();
        assert_eq!(w.pieces().len(), 3);
        assert_eq!(w.eval(&[int(-2)]), int(1));
        assert_eq!(w.eval(&[int(-1)]), int(1));
        assert_eq!(w.eval(&[q(-1, 2)]), q(1, 2));
        assert_eq!(w.eval(&[int(0)]), int(0));
        assert_eq!(w.eval(&[int(3)]), int(-6));
        assert!(val_function(&LaurentPoly::<ValuedScalar>::zero(1).unwrap()).is_err());
    }

    #[test]
    fn redundant_piece_is_pruned() {
        // z with val 1 never wins against 1 and z² both at val 0
        let w = val_function(&poly1(&[(0, 0), (1, 1), (2, 0)])).unwrap();
        assert_eq!(w.pieces(), &[piece(&[0], 0), piece(&[2], 0)]);
    }

    #[test]
    fn addition() {
        let u = val_function(&poly1(&[(0, 0), (1, 0)])).unwrap();
        let s = pl_add(&u, &u).unwrap();
        // the pairwise sum -x never wins alone, so min(0, -x, -2x) prunes to min(0, -2x)
        assert_eq!(s.pieces(), &[piece(&[0], 0), piece(&[2], 0)]);
        let unpruned = [piece(&[0], 0), piece(&[1], 0), piece(&[2], 0)];
        for x in [int(-3), q(-1, 2), int(0), q(5, 7), int(4)] {
            let direct = unpruned.iter().map(|p| p.eval(std::slice::from_ref(&x))).min().unwrap();
            assert_eq!(s.eval(&[x]), direct);
        }
        assert_eq!(pl_add(&u, &PLFunction::constant(1, int(0))).unwrap(), u);
    }

    #[test]
    fn two_dimensional_pruning() {
        // interior point of the triangle with a large constant is dropped
        let f = PLFunction::new(2, vec![piece(&[0, 0], 0), piece(&[2, 0], 0), piece(&[0, 2], 0), piece(&[1, 1], 1)]).unwrap();
        assert_eq!(f.pieces().len(), 3);
        let g = PLFunction::new(2, vec![piece(&[0, 0], 0), piece(&[2, 0], 0), piece(&[0, 2], 0), piece(&[1, 1], -1)]).unwrap();
        assert_eq!(g.pieces().len(), 4);
    }

    #[test]
    fn affine_detection() {
        let u = val_function(&poly1(&[(0, 0), (1, 0)])).unwrap();
        let square = vec![vec![int(-1)], vec![int(1)]];
        assert!(!u.is_affine_on(&square).unwrap());
        assert!(u.is_affine_on(&[vec![int(-3)], vec![int(-1)]]).unwrap());
        let mono = val_function(&poly1(&[(3, 2)])).unwrap();
        assert!(mono.is_affine_on(&square).unwrap());
        assert!(u.is_affine_on(&[]).is_err());

        let u2 = PLFunction::new(2, vec![piece(&[0, 0], 0), piece(&[1, 0], 0)]).unwrap();
        let sq2: Vec<Vec<Rational>> = [(-1, -1), (1, -1), (1, 1), (-1, 1)].iter().map(|&(a, b)| vec![int(a), int(b)]).collect();
        assert!(!u2.is_affine_on(&sq2).unwrap());
    }

    #[test]
    fn unit_and_inverse() {
        // f = z(1 + t z), g = z⁻¹(1 − t z + t² z²): Val(f) + Val(g) = 0 for x < 1
        let f = LaurentPoly::from_terms(1, [(vec![1], t_pow(0)), (vec![2], t_pow(1))]).unwrap();
        let g = LaurentPoly::from_terms(
            1,
            [(vec![-1], t_pow(0)), (vec![0], -t_pow(1)), (vec![1], t_pow(2))],
        )
        .unwrap();
        let (vf, vg) = (val_function(&f).unwrap(), val_function(&g).unwrap());
        let region = vec![vec![int(-2)], vec![q(1, 2)]];
        assert!(sum_vanishes_on(&vf, &vg, &region).unwrap());
        assert!(vf.is_affine_on(&region).unwrap());
        assert!(vg.is_affine_on(&region).unwrap());
        // past the breakpoint neither holds
        let wide = vec![vec![int(0)], vec![int(3)]];
        assert!(!sum_vanishes_on(&vf, &vg, &wide).unwrap());
    }

    #[test]
    fn seminorm() {
        let one = poly1(&[(0, 0)]);
        assert_eq!(gauss_seminorm(&one, &[int(5)]), Extended::Finite(int(0)));
        let z = poly1(&[(1, 0)]);
        assert_eq!(gauss_seminorm(&z, &[int(3)]), Extended::Finite(int(-3)));
    }

    #[test]
    fn tate_curve() {
        let c = |m: i64, n: i64| (vec![m, n], ValuedScalar::constant(int(1)));
        let z = LaurentPoly::from_terms(2, [c(0, 1)]).unwrap();
        assert_eq!(tate_deck_transform(&z, 2).unwrap(), LaurentPoly::from_terms(2, [c(2, 1)]).unwrap());
        assert_eq!(tate_deck_transform(&z, 0).unwrap(), z);
        let f = LaurentPoly::from_terms(2, [c(0, 0), c(0, 1), c(1, 2)]).unwrap();
        for k in -2..=3 {
            let g = tate_deck_transform(&f, k).unwrap();
            for x in [q(-3, 2), int(0), q(1, 3), int(2)] {
                assert_eq!(tate_functional(&g, &x), tate_functional(&f, &(x.clone() + int(k))));
            }
        }
    }

    #[test]
    fn json_and_svg() {
        let f = poly1(&[(0, 1), (1, 0)]);
        let j = serde_json::to_string(&f).unwrap();
        let back: LaurentPoly<ValuedScalar> = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
        let u = val_function(&f).unwrap();
        assert!(u.to_svg(-2, 2).contains("<polyline"));
        let v = PLFunction::new(2, vec![piece(&[0, 0], 0), piece(&[1, 0], 0)]).unwrap();
        assert!(v.to_svg(-2, 2).contains("hsl("));
    }
}
