//! Words in the universal central extension of `SL(2, Z)` generated by
//! `a₂`, `a₃` with `a₂² = a₃³` central and `u = a₂⁴ = a₃⁶`.
//!
//! Projection to `SL(2, Z)` uses `a₂ ↦ S⁻¹`, `a₃ ↦ (ST)⁻¹`, under which the
//! focus-focus lift `a₂ a₃⁻¹` maps to `T = [[1, 1], [0, 1]]` and has
//! `i = 1/12`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{det, mat_mul, AffineError, Mat2, IDENTITY};
use crate::scalars::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A2,
    A2Inv,
    A3,
    A3Inv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A2 => Letter::A2Inv,
            Letter::A2Inv => Letter::A2,
            Letter::A3 => Letter::A3Inv,
            Letter::A3Inv => Letter::A3,
        }
    }

    fn generator(self) -> (&'static str, i64) {
        match self {
            Letter::A2 => ("a2", 1),
            Letter::A2Inv => ("a2", -1),
            Letter::A3 => ("a3", 1),
            Letter::A3Inv => ("a3", -1),
        }
    }

    fn matrix(self) -> Mat2 {
        match self {
            Letter::A2 => [[0, 1], [-1, 0]],
            Letter::A2Inv => [[0, -1], [1, 0]],
            Letter::A3 => [[1, 1], [-1, 0]],
            Letter::A3Inv => [[0, -1], [1, 1]],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LiftedWord {
    pub letters: Vec<Letter>,
}

impl LiftedWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        LiftedWord { letters }
    }

    /// `u = a₃⁶`.
    pub fn u() -> Self {
        LiftedWord::new(vec![Letter::A3; 6])
    }

    /// The positively oriented focus-focus lift `a₂ a₃⁻¹`.
    pub fn focus_focus() -> Self {
        LiftedWord::new(vec![Letter::A2, Letter::A3Inv])
    }

    pub fn then(&self, other: &LiftedWord) -> LiftedWord {
        LiftedWord::new(self.letters.iter().chain(&other.letters).copied().collect())
    }

    pub fn pow(&self, n: u32) -> LiftedWord {
        (0..n).fold(LiftedWord::default(), |acc, _| acc.then(self))
    }

    pub fn inverse(&self) -> LiftedWord {
        LiftedWord::new(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Exponent sums `(e₂, e₃)`.
    pub fn exponent_sums(&self) -> (i64, i64) {
        self.letters.iter().fold((0, 0), |(e2, e3), l| match l {
            Letter::A2 => (e2 + 1, e3),
            Letter::A2Inv => (e2 - 1, e3),
            Letter::A3 => (e2, e3 + 1),
            Letter::A3Inv => (e2, e3 - 1),
        })
    }

    /// Cancel adjacent inverse pairs.
    pub fn free_reduce(&self) -> LiftedWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        LiftedWord::new(out)
    }

    /// Image in `SL(2, Z)`.
    pub fn project(&self) -> Mat2 {
        self.letters.iter().fold(IDENTITY, |acc, l| mat_mul(&acc, &l.matrix()))
    }
}

impl fmt::Display for LiftedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut runs: Vec<(&str, i64)> = Vec::new();
        for l in &self.letters {
            let (g, e) = l.generator();
            match runs.last_mut() {
                Some((h, n)) if *h == g && (*n > 0) == (e > 0) => *n += e,
                _ => runs.push((g, e)),
            }
        }
        let parts: Vec<String> =
            runs.iter().map(|(g, n)| if *n == 1 { g.to_string() } else { format!("{g}^{n}") }).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Parses whitespace- or `*`-separated powers of `a2`, `a3` and `u`, e.g.
/// `"a2 a3^-1"` or `"u^2"`; `"1"` is the empty word.
impl FromStr for LiftedWord {
    type Err = AffineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*' || c == '·').filter(|t| !t.is_empty()) {
            if tok == "1" {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let n: i64 = e.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| AffineError::BadWord(tok.into()))?;
                    (b, n)
                }
                None => (tok, 1),
            };
            let (letter, mult) = match base {
                "a2" => (Letter::A2, 1),
                "a3" => (Letter::A3, 1),
                "u" => (Letter::A3, 6),
                _ => return Err(AffineError::BadWord(tok.into())),
            };
            let count = exp.unsigned_abs() as usize * mult;
            let l = if exp < 0 { letter.inverse() } else { letter };
            letters.extend(std::iter::repeat_n(l, count));
        }
        Ok(LiftedWord::new(letters))
    }
}

impl Serialize for LiftedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LiftedWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `i(w) = (3e₂ + 2e₃) / 12`.
pub fn i_homomorphism(w: &LiftedWord) -> Rational {
    let (e2, e3) = w.exponent_sums();
    Rational::new((3 * e2 + 2 * e3).into(), 12.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussBonnetReport {
    #[serde(with = "crate::scalars::rational_serde")]
    pub sum: Rational,
    pub euler_characteristic: i64,
    pub passed: bool,
}

/// Compare `Σ i(w)` with `χ = 2 − 2g`.
pub fn gauss_bonnet_check(singularities: &[LiftedWord], genus: i64) -> GaussBonnetReport {
    let sum: Rational = singularities.iter().map(i_homomorphism).sum();
    let chi = 2 - 2 * genus;
    GaussBonnetReport { passed: sum == Rational::from_integer(chi.into()), sum, euler_characteristic: chi }
}

enum Step {
    T(i64),
    S,
    MinusOne,
}

/// Lift of `M ∈ SL(2, Z)` times `u^winding`.
///
/// `M` is written as `T^{q₁} S T^{q₂} S ⋯ T^{q_r} (−1)^ε` by the Euclidean
/// algorithm on its first column; letters lift as `T ↦ a₂a₃⁻¹`,
/// `S ↦ a₂⁻¹`, `−1 ↦ a₂²`. The result projects exactly to `M`.
pub fn matrix_to_lift(m: &Mat2, winding: i64) -> LiftedWord {
    assert_eq!(det(m), 1, "matrix_to_lift needs determinant 1");
    let mut steps = Vec::new();
    let [[mut a, mut b], [mut c, mut d]] = *m;
    while c != 0 {
        let q = a.div_euclid(c);
        let (r, b1) = (a - q * c, b - q * d);
        steps.push(Step::T(q));
        steps.push(Step::S);
        // S⁻¹ [[r, b1], [c, d]]
        (a, b, c, d) = (c, d, -r, -b1);
    }
    if a == 1 {
        steps.push(Step::T(b));
    } else {
        steps.push(Step::T(-b));
        steps.push(Step::MinusOne);
    }
    let mut letters = Vec::new();
    for s in steps {
        match s {
            Step::T(q) if q >= 0 => (0..q).for_each(|_| letters.extend([Letter::A2, Letter::A3Inv])),
            Step::T(q) => (0..-q).for_each(|_| letters.extend([Letter::A3, Letter::A2Inv])),
            Step::S => letters.push(Letter::A2Inv),
            Step::MinusOne => letters.extend([Letter::A2, Letter::A2]),
        }
    }
    let u = if winding >= 0 { Letter::A3 } else { Letter::A3Inv };
    letters.extend(std::iter::repeat_n(u, 6 * winding.unsigned_abs() as usize));
    LiftedWord::new(letters).free_reduce()
}
