//! K-affine monodromy `v ↦ λ · A(v)` on `(K^×)²` and its fixed vectors.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{det, mat_mul, AffineError, AffineTransform, Mat2, IDENTITY};
use crate::scalars::{Coefficient, Extended, Rational, ValuedScalar, DEFAULT_RELATIVE_PRECISION};

/// `(A(v))_i = Π_j v_j^{A_ij}`, then multiplied by `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KAffineTransform {
    pub linear: Mat2,
    pub lambda: [ValuedScalar; 2],
}

impl KAffineTransform {
    pub fn new(linear: Mat2, lambda: [ValuedScalar; 2]) -> Result<Self, AffineError> {
        let d = det(&linear);
        if d != 1 && d != -1 {
            return Err(AffineError::NotUnimodular(d));
        }
        Ok(KAffineTransform { linear, lambda })
    }

    pub fn apply(&self, v: &[ValuedScalar; 2]) -> Option<[ValuedScalar; 2]> {
        let row = |i: usize| -> Option<ValuedScalar> {
            Some(self.lambda[i].clone() * zpow(&v[0], self.linear[i][0])? * zpow(&v[1], self.linear[i][1])?)
        };
        Some([row(0)?, row(1)?])
    }

    pub fn is_fixed(&self, v: &[ValuedScalar; 2]) -> bool {
        match self.apply(v) {
            Some([a, b]) => a.agrees(&v[0]) && b.agrees(&v[1]),
            None => false,
        }
    }

    /// The real affine map `x ↦ A x + val(λ)` it induces on valuations.
    pub fn to_affine(&self) -> Option<AffineTransform> {
        let v = |s: &ValuedScalar| s.val().finite().map(|e| Rational::from_integer(e.into()));
        AffineTransform::new(self.linear, [v(&self.lambda[0])?, v(&self.lambda[1])?]).ok()
    }
}

fn zpow(x: &ValuedScalar, e: i64) -> Option<ValuedScalar> {
    let base = if e < 0 { x.try_inverse()? } else { x.clone() };
    Some(base.pow(e.unsigned_abs()))
}

/// `u · n · v = diag(d)` with `u`, `v` unimodular, `d₀ | d₁`, `d ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: Mat2,
    pub d: [i64; 2],
    pub v: Mat2,
}

pub fn smith_normal_form(n: &Mat2) -> Smith {
    let mut a = *n;
    let mut u = IDENTITY;
    let mut v = IDENTITY;
    let swap_rows = |m: &mut Mat2| m.swap(0, 1);
    let swap_cols = |m: &mut Mat2| {
        for row in m.iter_mut() {
            row.swap(0, 1);
        }
    };
    loop {
        let pivot = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs());
        let Some((i, j)) = pivot else { break };
        if i == 1 {
            swap_rows(&mut a);
            swap_rows(&mut u);
        }
        if j == 1 {
            swap_cols(&mut a);
            swap_cols(&mut v);
        }
        let p = a[0][0];
        let q = a[1][0] / p;
        for k in 0..2 {
            a[1][k] -= q * a[0][k];
            u[1][k] -= q * u[0][k];
        }
        let q = a[0][1] / p;
        for k in 0..2 {
            a[k][1] -= q * a[k][0];
            v[k][1] -= q * v[k][0];
        }
        if a[1][0] != 0 || a[0][1] != 0 {
            continue;
        }
        if a[1][1] % p != 0 {
            for k in 0..2 {
                a[0][k] += a[1][k];
                u[0][k] += u[1][k];
            }
            continue;
        }
        break;
    }
    for k in 0..2 {
        if a[k][k] < 0 {
            for c in 0..2 {
                a[k][c] = -a[k][c];
                u[k][c] = -u[k][c];
            }
        }
    }
    debug_assert_eq!(mat_mul(&mat_mul(&u, n), &v), [[a[0][0], 0], [0, a[1][1]]]);
    Smith { u, d: [a[0][0], a[1][1]], v }
}

/// Solutions `v = p · (s₁^{δ₁}, s₂^{δ₂}…)`: one of the particular vectors
/// times arbitrary units `s_k` raised along the free directions.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedVectorFamily {
    pub particular: Vec<[ValuedScalar; 2]>,
    pub free_directions: Vec<[i64; 2]>,
}

impl FixedVectorFamily {
    /// The member with parameters `s`.
    pub fn member(&self, choice: usize, s: &[ValuedScalar]) -> Option<[ValuedScalar; 2]> {
        let mut v = self.particular.get(choice)?.clone();
        for (dir, s) in self.free_directions.iter().zip(s) {
            v = [v[0].clone() * zpow(s, dir[0])?, v[1].clone() * zpow(s, dir[1])?];
        }
        Some(v)
    }
}

fn integer_root(n: &BigInt, d: u32) -> Option<BigInt> {
    let r = n.nth_root(d);
    (r.pow(d) == *n).then_some(r)
}

/// All `d`-th roots of `x` in `K = Q((t))`, to the precision of `x`.
fn roots(x: &ValuedScalar, d: u32) -> Vec<ValuedScalar> {
    if d == 1 {
        return vec![x.clone()];
    }
    let Some((v, c)) = x.leading() else { return vec![] };
    let (v, c) = (v, c.clone());
    if v % d as i64 != 0 || (c.is_negative() && d.is_multiple_of(2)) {
        return vec![];
    }
    let (Some(num), Some(den)) = (integer_root(&c.numer().abs(), d), integer_root(c.denom(), d)) else {
        return vec![];
    };
    let sign = if c.is_negative() { -BigInt::one() } else { BigInt::one() };
    let lead = ValuedScalar::monomial(Rational::new(sign * num, den), v / d as i64);
    let lead_inv = ValuedScalar::monomial(c.recip(), -v);
    let mut y = x.clone() * lead_inv - ValuedScalar::one();
    if x.is_exact() && !y.is_zero() {
        y = y.with_order(DEFAULT_RELATIVE_PRECISION);
    }
    // (1 + y)^{1/d} by the binomial series
    let alpha = Rational::new(1.into(), (d as i64).into());
    let mut sum = ValuedScalar::one();
    let mut term = ValuedScalar::one();
    let mut n: i64 = 0;
    loop {
        let coef = (alpha.clone() - Rational::from_integer(n.into())) / Rational::from_integer((n + 1).into());
        term = term * y.clone() * ValuedScalar::constant(coef);
        if term.is_zero() {
            break;
        }
        sum = sum + term.clone();
        n += 1;
    }
    if let Some(o) = y.order() {
        sum = sum.with_order(o);
    }
    let root = lead * sum;
    if d.is_multiple_of(2) {
        vec![root.clone(), -root]
    } else {
        vec![root]
    }
}

/// Solve `λ · A(v) = v`: with `N = A − 1 = U⁻¹ D V⁻¹` the system splits
/// into `w_k^{d_k} = ν_k` for `w = V⁻¹v`. `None` when there is no
/// solution at the working precision.
pub fn k_fixed_vectors(m: &KAffineTransform) -> Option<FixedVectorFamily> {
    let n = [[m.linear[0][0] - 1, m.linear[0][1]], [m.linear[1][0], m.linear[1][1] - 1]];
    let Smith { u, d, v } = smith_normal_form(&n);
    let lambda_inv = [m.lambda[0].try_inverse()?, m.lambda[1].try_inverse()?];
    let nu: Vec<ValuedScalar> =
        (0..2).map(|k| Some(zpow(&lambda_inv[0], u[k][0])? * zpow(&lambda_inv[1], u[k][1])?)).collect::<Option<_>>()?;

    let mut choices: Vec<Vec<ValuedScalar>> = Vec::new();
    let mut free = Vec::new();
    for k in 0..2 {
        if d[k] == 0 {
            if !nu[k].agrees(&ValuedScalar::one()) {
                return None;
            }
            choices.push(vec![ValuedScalar::one()]);
            free.push([v[0][k], v[1][k]]);
        } else {
            let r = roots(&nu[k], d[k] as u32);
            if r.is_empty() {
                return None;
            }
            choices.push(r);
        }
    }
    let mut particular = Vec::new();
    for w0 in &choices[0] {
        for w1 in &choices[1] {
            let comp = |j: usize| Some(zpow(w0, v[j][0])? * zpow(w1, v[j][1])?);
            particular.push([comp(0)?, comp(1)?]);
        }
    }
    Some(FixedVectorFamily { particular, free_directions: free })
}

/// Fixed points `{p + Σ r_k δ_k}` of a real affine map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealFixedSet {
    pub point: [Rational; 2],
    pub directions: Vec<[i64; 2]>,
}

impl RealFixedSet {
    pub fn contains(&self, t: &AffineTransform, x: &[Rational; 2]) -> bool {
        t.apply(x) == *x
    }
}

pub fn real_fixed_points(t: &AffineTransform) -> Option<RealFixedSet> {
    let n = [[t.linear[0][0] - 1, t.linear[0][1]], [t.linear[1][0], t.linear[1][1] - 1]];
    let Smith { u, d, v } = smith_normal_form(&n);
    let rhs = |k: usize| -(&t.translation[0] * Rational::from(BigInt::from(u[k][0])) + &t.translation[1] * Rational::from(BigInt::from(u[k][1])));
    let mut y = [Rational::zero(), Rational::zero()];
    let mut directions = Vec::new();
    for k in 0..2 {
        let r = rhs(k);
        if d[k] == 0 {
            if !r.is_zero() {
                return None;
            }
            directions.push([v[0][k], v[1][k]]);
        } else {
            y[k] = r / Rational::from(BigInt::from(d[k]));
        }
    }
    let point = [
        &y[0] * Rational::from(BigInt::from(v[0][0])) + &y[1] * Rational::from(BigInt::from(v[0][1])),
        &y[0] * Rational::from(BigInt::from(v[1][0])) + &y[1] * Rational::from(BigInt::from(v[1][1])),
    ];
    Some(RealFixedSet { point, directions })
}

/// Whether valuations of the fixed-vector family fill out exactly the
/// fixed-point set of the induced real affine map.
pub fn valuations_match_fixed_points(m: &KAffineTransform) -> bool {
    let Some(t) = m.to_affine() else { return false };
    match (k_fixed_vectors(m), real_fixed_points(&t)) {
        (None, None) => true,
        (Some(fam), Some(real)) => {
            if fam.free_directions.len() != real.directions.len() {
                return false;
            }
            let val_point = |p: &[ValuedScalar; 2]| -> Option<[Rational; 2]> {
                let f = |s: &ValuedScalar| match s.val() {
                    Extended::Finite(e) => Some(Rational::from_integer(e.into())),
                    Extended::Infinity => None,
                };
                Some([f(&p[0])?, f(&p[1])?])
            };
            let zero = [Rational::zero(), Rational::zero()];
            let lin = AffineTransform { linear: t.linear, translation: zero };
            fam.particular.iter().all(|p| val_point(p).is_some_and(|x| real.contains(&t, &x)))
                && fam.free_directions.iter().all(|dir| {
                    let x = [Rational::from(BigInt::from(dir[0])), Rational::from(BigInt::from(dir[1]))];
                    lin.apply(&x) == x
                })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::int;

    fn one() -> ValuedScalar {
        ValuedScalar::one()
    }

    #[test]
    fn smith_forms() {
        for n in [[[0, 1], [0, 0]], [[2, 4], [6, 8]], [[0, 0], [0, 0]], [[3, 0], [0, 2]], [[-1, 1], [1, 1]]] {
            let s = smith_normal_form(&n);
            assert_eq!(mat_mul(&mat_mul(&s.u, &n), &s.v), [[s.d[0], 0], [0, s.d[1]]]);
            assert!(det(&s.u).abs() == 1 && det(&s.v).abs() == 1);
            assert!(s.d[0] == 0 && s.d[1] == 0 || s.d[0] != 0 && s.d[1] % s.d[0] == 0);
        }
        assert_eq!(smith_normal_form(&[[3, 0], [0, 2]]).d, [1, 6]);
    }

    #[test]
    fn identity_fixes_everything() {
        let m = KAffineTransform::new(IDENTITY, [one(), one()]).unwrap();
        let fam = k_fixed_vectors(&m).unwrap();
        assert_eq!(fam.free_directions.len(), 2);
        assert!(valuations_match_fixed_points(&m));
    }

    #[test]
    fn unipotent_family() {
        let m = KAffineTransform::new([[1, 1], [0, 1]], [one(), one()]).unwrap();
        let fam = k_fixed_vectors(&m).unwrap();
        assert_eq!(fam.free_directions.len(), 1);
        let dir = fam.free_directions[0];
        assert!(dir == [1, 0] || dir == [-1, 0]);
        let s = ValuedScalar::t() * ValuedScalar::constant(int(3)) + one();
        let v = fam.member(0, &[s]).unwrap();
        assert!(m.is_fixed(&v));
        assert!(v[1].agrees(&one()));
        assert!(valuations_match_fixed_points(&m));

        let shifted = KAffineTransform::new([[1, 1], [0, 1]], [one(), ValuedScalar::t()]).unwrap();
        assert!(k_fixed_vectors(&shifted).is_none());
        assert!(valuations_match_fixed_points(&shifted));
    }

    #[test]
    fn isolated_fixed_vectors() {
        // A − 1 = [[1, 1], [1, 0]] is invertible: a unique fixed vector
        let m = KAffineTransform::new([[2, 1], [1, 1]], [ValuedScalar::t(), one() + ValuedScalar::t()]).unwrap();
        let fam = k_fixed_vectors(&m).unwrap();
        assert!(fam.free_directions.is_empty());
        for p in &fam.particular {
            assert!(m.is_fixed(p), "{p:?}");
        }
        assert!(valuations_match_fixed_points(&m));
        // −1: A − 1 = −2, squares roots appear
        let neg = KAffineTransform::new([[-1, 0], [0, -1]], [ValuedScalar::monomial(int(4), 2), one()]).unwrap();
        let fam = k_fixed_vectors(&neg).unwrap();
        assert_eq!(fam.particular.len(), 4);
        assert!(fam.particular.iter().all(|p| neg.is_fixed(p)));
    }
}
