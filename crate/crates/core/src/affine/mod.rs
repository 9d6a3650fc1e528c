//! Integral affine structures presented by chart transitions: loop
//! monodromy, the pairing of a closed chain with a covector, the
//! focus-focus model, lifted monodromy words with their Gauss-Bonnet
//! invariant, and fixed vectors of K-affine monodromy.

mod fixed;
mod lift;

pub use fixed::{
    k_fixed_vectors, real_fixed_points, smith_normal_form, valuations_match_fixed_points, FixedVectorFamily,
    KAffineTransform, RealFixedSet, Smith,
};
pub use lift::{gauss_bonnet_check, i_homomorphism, matrix_to_lift, GaussBonnetReport, Letter, LiftedWord};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Covector;
use crate::scalars::{rational_serde, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("linear part has determinant {0}, expected ±1")]
    NotUnimodular(i64),
    #[error("covector {start} comes back as {end}: chain is not closed")]
    NotClosed { start: Covector, end: Covector },
    #[error("point is the singular point")]
    AtSingularPoint,
    #[error("malformed lifted word: {0}")]
    BadWord(String),
}

/// `2 × 2` integer matrix, rows first.
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Inverse of a unimodular matrix.
pub fn mat_inv(a: &Mat2) -> Mat2 {
    let d = det(a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    [[d * a[1][1], -d * a[0][1]], [-d * a[1][0], d * a[0][0]]]
}

pub fn mat_pow(a: &Mat2, n: u32) -> Mat2 {
    (0..n).fold(IDENTITY, |acc, _| mat_mul(&acc, a))
}

fn apply_linear(a: &Mat2, v: &[Rational; 2]) -> [Rational; 2] {
    let r = |i: usize| &v[0] * Rational::from_integer(a[i][0].into()) + &v[1] * Rational::from_integer(a[i][1].into());
    [r(0), r(1)]
}

/// Covector (row vector) pulled back through a linear map: `α ∘ A`.
pub fn pull_covector(alpha: Covector, a: &Mat2) -> Covector {
    Covector::new(alpha.a * a[0][0] + alpha.b * a[1][0], alpha.a * a[0][1] + alpha.b * a[1][1])
}

/// `x ↦ A x + b` with `A ∈ GL(2, Z)` and rational `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineTransform {
    pub linear: Mat2,
    #[serde(with = "rational_serde::pair")]
    pub translation: [Rational; 2],
}

impl AffineTransform {
    pub fn new(linear: Mat2, translation: [Rational; 2]) -> Result<Self, AffineError> {
        let d = det(&linear);
        if d != 1 && d != -1 {
            return Err(AffineError::NotUnimodular(d));
        }
        Ok(AffineTransform { linear, translation })
    }

    pub fn linear(linear: Mat2) -> Result<Self, AffineError> {
        Self::new(linear, [Rational::zero(), Rational::zero()])
    }

    pub fn identity() -> Self {
        AffineTransform { linear: IDENTITY, translation: [Rational::zero(), Rational::zero()] }
    }

    pub fn apply(&self, x: &[Rational; 2]) -> [Rational; 2] {
        let [a, b] = apply_linear(&self.linear, x);
        [a + &self.translation[0], b + &self.translation[1]]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let [a, b] = self.apply(&other.translation);
        AffineTransform { linear: mat_mul(&self.linear, &other.linear), translation: [a, b] }
    }

    pub fn inverse(&self) -> Self {
        let inv = mat_inv(&self.linear);
        let [a, b] = apply_linear(&inv, &self.translation);
        AffineTransform { linear: inv, translation: [-a, -b] }
    }
}

/// Chart transitions met along a loop; entry `i` maps coordinates of chart
/// `i + 1` into chart `i`, the last chart being the first again.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopWord {
    pub transitions: Vec<AffineTransform>,
}

impl LoopWord {
    pub fn new(transitions: Vec<AffineTransform>) -> Self {
        LoopWord { transitions }
    }

    /// Concatenation: traverse `self`, then `other`.
    pub fn then(&self, other: &LoopWord) -> LoopWord {
        LoopWord { transitions: self.transitions.iter().chain(&other.transitions).cloned().collect() }
    }
}

/// `t₁ ∘ t₂ ∘ … ∘ t_n`.
pub fn monodromy(w: &LoopWord) -> AffineTransform {
    w.transitions.iter().fold(AffineTransform::identity(), |acc, t| acc.compose(t))
}

/// A piece of a chain: a straight displacement inside one chart, then the
/// transition from the next chart's coordinates into this one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSegment {
    #[serde(with = "rational_serde::pair")]
    pub displacement: [Rational; 2],
    pub transition: AffineTransform,
}

/// Closed chain with a covector `α₀` at its start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWithCovector {
    pub alpha: Covector,
    pub segments: Vec<ChainSegment>,
}

impl ChainWithCovector {
    /// Concatenation at the common base point.
    pub fn then(&self, other: &ChainWithCovector) -> ChainWithCovector {
        ChainWithCovector { alpha: self.alpha, segments: self.segments.iter().chain(&other.segments).cloned().collect() }
    }

    pub fn loop_word(&self) -> LoopWord {
        LoopWord::new(self.segments.iter().map(|s| s.transition.clone()).collect())
    }
}

/// `j(c) = ⟨α₀, γ̄(1)⟩`: develop the chain into the first chart and pair
/// the endpoint with `α₀`. The covector must come back to itself.
pub fn rho_pairing(c: &ChainWithCovector) -> Result<Rational, AffineError> {
    let mut lin = IDENTITY;
    let mut end = [Rational::zero(), Rational::zero()];
    for s in &c.segments {
        let [a, b] = apply_linear(&lin, &s.displacement);
        end = [&end[0] + a, &end[1] + b];
        lin = mat_mul(&lin, &s.transition.linear);
    }
    let back = pull_covector(c.alpha, &lin);
    if back != c.alpha {
        return Err(AffineError::NotClosed { start: c.alpha, end: back });
    }
    Ok(c.alpha.pair(&end))
}

/// Which chart of the focus-focus model to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Plain coordinates `(y, x)`, valid off the cut.
    Standard,
    /// Coordinates `(y, x + max(y, 0))`, valid across the cut.
    Across,
}

/// Coordinates of `p` in a chart of the focus-focus model at the origin.
pub fn focus_focus_chart(p: &[Rational; 2], side: Side) -> Result<[Rational; 2], AffineError> {
    let [x, y] = p;
    if x.is_zero() && y.is_zero() {
        return Err(AffineError::AtSingularPoint);
    }
    Ok(match side {
        Side::Standard => [y.clone(), x.clone()],
        Side::Across => {
            let lift = if y > &Rational::zero() { y.clone() } else { Rational::zero() };
            [y.clone(), x + lift]
        }
    })
}

/// The gluing `(x, y) ↦ (x + y, y)` across the cut, in `(x, y)` order.
pub fn focus_focus_transition() -> AffineTransform {
    AffineTransform::linear([[1, 1], [0, 1]]).expect("unimodular")
}

/// Counterclockwise loop around one focus-focus point: cross the cut from
/// below (trivial gluing), then come back into the cut chart from above.
pub fn focus_focus_loop() -> LoopWord {
    LoopWord::new(vec![AffineTransform::identity(), focus_focus_transition()])
}

/// The same loop as a chain based at `(1, −1)`, with the square path
/// `(1,−1) → (1,1) → (−1,1) → (−1,−1) → (1,−1)`.
pub fn focus_focus_chain(alpha: Covector) -> ChainWithCovector {
    let r = |a: i64, b: i64| [Rational::from_integer(a.into()), Rational::from_integer(b.into())];
    ChainWithCovector {
        alpha,
        segments: vec![
            // in the cut chart (x + max(y,0), y): from (1,−1) to (2,1)
            ChainSegment { displacement: r(1, 2), transition: focus_focus_transition() },
            // in the plain chart: around the other three sides
            ChainSegment { displacement: r(0, -2), transition: AffineTransform::identity() },
        ],
    }
}

/// Four focus-focus points sharing one invariant direction, encircled
/// together: the vertex loop of the quartic degeneration.
pub fn k3_vertex_loop() -> LoopWord {
    (0..4).fold(LoopWord::default(), |acc, _| acc.then(&focus_focus_loop()))
}

/// Whether `m ∈ SL(2, Z)` is conjugate to `[[1, n], [0, 1]]`, `n ≠ 0`.
///
/// With `w` a primitive invariant vector and `(w, w')` a positive basis,
/// `m w' = w' + n w` and `n` does not depend on the choices.
pub fn unipotent_conjugacy_class(m: &Mat2) -> Option<i64> {
    use num_integer::Integer;
    if det(m) != 1 || m[0][0] + m[1][1] != 2 || *m == IDENTITY {
        return None;
    }
    // kernel of m − I
    let (p, q) = (m[0][0] - 1, m[0][1]);
    let (r, s) = (m[1][0], m[1][1] - 1);
    let (wa, wb) = if p != 0 || q != 0 { (q, -p) } else { (s, -r) };
    let g = wa.gcd(&wb);
    let w = (wa / g, wb / g);
    // w' with det(w, w') = 1
    let ext = w.0.extended_gcd(&w.1);
    let (x, y) = (ext.x, ext.y);
    let w2 = if ext.gcd == 1 { (-y, x) } else { (y, -x) };
    debug_assert_eq!(w.0 * w2.1 - w.1 * w2.0, 1);
    let img = (m[0][0] * w2.0 + m[0][1] * w2.1 - w2.0, m[1][0] * w2.0 + m[1][1] * w2.1 - w2.1);
    // img = n w
    let n = if w.0 != 0 { img.0 / w.0 } else { img.1 / w.1 };
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::{int, rat};

    fn pt(a: i64, b: i64) -> [Rational; 2] {
        [int(a), int(b)]
    }

    #[test]
    fn monodromy_basics() {
        assert_eq!(monodromy(&LoopWord::default()), AffineTransform::identity());
        assert_eq!(monodromy(&focus_focus_loop()).linear, [[1, 1], [0, 1]]);
        let k3 = monodromy(&k3_vertex_loop()).linear;
        assert_eq!(k3, [[1, 4], [0, 1]]);
        assert_eq!(unipotent_conjugacy_class(&k3), Some(4));
        // a conjugate by S is still in the class of [[1,4],[0,1]]
        let s = [[0, -1], [1, 0]];
        let conj = mat_mul(&mat_mul(&s, &k3), &mat_inv(&s));
        assert_eq!(unipotent_conjugacy_class(&conj), Some(4));
        assert_eq!(unipotent_conjugacy_class(&[[1, 1], [0, 1]]), Some(1));
        assert_eq!(unipotent_conjugacy_class(&IDENTITY), None);
    }

    #[test]
    fn monodromy_is_a_homomorphism() {
        let t1 = AffineTransform::new([[2, 1], [1, 1]], [rat(1, 2), int(0)]).unwrap();
        let t2 = AffineTransform::new([[0, -1], [1, 0]], [int(3), int(-1)]).unwrap();
        let w = LoopWord::new(vec![t1.clone()]);
        let v = LoopWord::new(vec![t2.clone()]);
        assert_eq!(monodromy(&w.then(&v)), monodromy(&w).compose(&monodromy(&v)));
        assert_eq!(t1.compose(&t1.inverse()), AffineTransform::identity());
        assert!(AffineTransform::linear([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn chart_examples() {
        assert_eq!(focus_focus_chart(&pt(1, 2), Side::Across).unwrap(), pt(2, 3));
        assert_eq!(focus_focus_chart(&pt(3, -2), Side::Across).unwrap(), pt(-2, 3));
        assert_eq!(focus_focus_chart(&pt(3, -2), Side::Standard).unwrap(), pt(-2, 3));
        assert!(focus_focus_chart(&pt(0, 0), Side::Standard).is_err());
    }

    #[test]
    fn pairing() {
        // constant loop
        let c = ChainWithCovector { alpha: Covector::DX, segments: vec![] };
        assert_eq!(rho_pairing(&c).unwrap(), int(0));
        // flat torus loop along v = (2, 3)
        let torus = ChainWithCovector {
            alpha: Covector::new(1, 1),
            segments: vec![ChainSegment {
                displacement: pt(2, 3),
                transition: AffineTransform::new(IDENTITY, [int(-2), int(-3)]).unwrap(),
            }],
        };
        assert_eq!(rho_pairing(&torus).unwrap(), int(5));
        // focus-focus: dy is invariant, dx is not
        let ff = focus_focus_chain(Covector::DY);
        assert_eq!(rho_pairing(&ff).unwrap(), int(0));
        assert!(matches!(rho_pairing(&focus_focus_chain(Covector::DX)), Err(AffineError::NotClosed { .. })));
        // additivity
        assert_eq!(rho_pairing(&torus.then(&torus)).unwrap(), int(10));
        // boundary of a triangle in one chart
        let tri = ChainWithCovector {
            alpha: Covector::new(2, -1),
            segments: [pt(1, 0), pt(-1, 1), pt(0, -1)]
                .into_iter()
                .map(|d| ChainSegment { displacement: d, transition: AffineTransform::identity() })
                .collect(),
        };
        assert_eq!(rho_pairing(&tri).unwrap(), int(0));
    }
}
