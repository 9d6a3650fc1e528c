//! Integer vectors in `Z²`: covectors `a·dx + b·dy`, and exponents of the
//! torus monomials `ξ^a η^b` (the monomial `R_μ` attached to a covector `μ`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::scalars::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Covector {
    pub a: i64,
    pub b: i64,
}

/// Exponent `(a, b)` of the monomial `ξ^a η^b`.
pub type Exponent2 = Covector;

impl Covector {
    pub const DX: Covector = Covector { a: 1, b: 0 };
    pub const DY: Covector = Covector { a: 0, b: 1 };
    pub const ZERO: Covector = Covector { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Covector { a, b }
    }

    /// `self ∧ other = a·b' − b·a'`.
    pub fn wedge(self, other: Covector) -> i64 {
        self.a * other.b - self.b * other.a
    }

    pub fn gcd(self) -> i64 {
        self.a.gcd(&self.b)
    }

    pub fn is_primitive(self) -> bool {
        self.gcd() == 1
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Pairing with a rational vector.
    pub fn pair(self, v: &[Rational; 2]) -> Rational {
        &v[0] * Rational::from_integer(self.a.into()) + &v[1] * Rational::from_integer(self.b.into())
    }

    /// Euclidean squared norm; used for the time normalization along lines.
    pub fn norm2(self) -> i64 {
        self.a * self.a + self.b * self.b
    }
}

/// Whether the origin lies in the convex hull of a finite point set.
///
/// Exact: by Carathéodory it suffices to look at single points, opposite
/// collinear pairs and triangles.
pub fn origin_in_hull(points: &[Covector]) -> bool {
    if points.iter().any(|p| p.is_zero()) {
        return true;
    }
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            if p.wedge(*q) == 0 && p.a * q.a + p.b * q.b < 0 {
                return true;
            }
            for r in &points[j + 1..] {
                let w = [p.wedge(*q), q.wedge(*r), r.wedge(*p)];
                if w.iter().all(|&x| x == 0) {
                    continue;
                }
                if w.iter().all(|&x| x >= 0) || w.iter().all(|&x| x <= 0) {
                    return true;
                }
            }
        }
    }
    false
}

impl From<[i64; 2]> for Covector {
    fn from(v: [i64; 2]) -> Self {
        Covector::new(v[0], v[1])
    }
}

impl From<Covector> for [i64; 2] {
    fn from(c: Covector) -> Self {
        [c.a, c.b]
    }
}

impl Add for Covector {
    type Output = Covector;
    fn add(self, o: Covector) -> Covector {
        Covector::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Covector {
    type Output = Covector;
    fn sub(self, o: Covector) -> Covector {
        Covector::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Covector {
    type Output = Covector;
    fn neg(self) -> Covector {
        Covector::new(-self.a, -self.b)
    }
}

impl Mul<Covector> for i64 {
    type Output = Covector;
    fn mul(self, c: Covector) -> Covector {
        Covector::new(self * c.a, self * c.b)
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_orientation() {
        assert_eq!(Covector::DX.wedge(Covector::DY), 1);
        assert_eq!(Covector::DY.wedge(Covector::DX), -1);
        assert_eq!(Covector::new(2, 4).gcd(), 2);
        assert!(Covector::new(-3, 2).is_primitive());
    }

    #[test]
    fn hull_membership() {
        let c = Covector::new;
        assert!(!origin_in_hull(&[c(1, 0), c(0, 1), c(1, 1)]));
        assert!(origin_in_hull(&[c(1, 0), c(-2, 0)]));
        assert!(origin_in_hull(&[c(1, 0), c(-1, 1), c(-1, -1)]));
        assert!(!origin_in_hull(&[c(1, 0), c(-1, 1), c(0, 1)]));
        assert!(!origin_in_hull(&[]));
    }
}
