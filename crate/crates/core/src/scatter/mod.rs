//! Order-truncated scattering diagrams of straight lines.
//!
//! Every focus-focus point sends out two rays along `±α_s`. Whenever two
//! rays cross at a point where their orders add up to at most the cutoff
//! `C`, new rays with covectors `n₁α₁ + n₂α₂` are born there, and their
//! walls are read off the factorization of `g_{α₂} ∘ g_{α₁}`.
//!
//! Conventions:
//! * a line with covector `α = (a, b)` runs in direction `(a, b)` and its
//!   time is `t = ⟨α, p − base⟩`, so `ord = ord₀ + t` and `d(ord) = α`;
//! * the wall `f` on a line with covector `μ` is the automorphism
//!   `ξ ↦ ξ f(z)^{μ_b}`, `η ↦ η f(z)^{−μ_a}` with `z = R_{−μ}`;
//! * a path crossing a line with `det(direction, velocity) > 0` picks up
//!   the wall, otherwise its inverse, and the automorphisms met along a
//!   path are composed with the first one leftmost.

mod export;
mod transport;

pub use export::{export, import, to_svg};
pub use transport::{
    cone_basis, crossings, kaffine_invariance_check, kaffine_projection, path_independent, transport, wall_auto,
    Crossing, Frame,
};

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factorize::{
    factorize, slope_auto, vertex_consistency, FactorizeError, Orientation, Slope, VertexWall, WallFunction,
};
use crate::lattice::Covector;
use crate::poisson::{Basis, Filtration, PoissonError};
use crate::scalars::{rational_serde, Coefficient, JsonScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScatterError {
    #[error("singular point {0} is listed twice")]
    DuplicateSingularPoint(String),
    #[error("three or more lines meet at {0}")]
    TripleCollision(String),
    #[error("path passes through a vertex or the start of a line at {0}")]
    PathThroughVertex(String),
    #[error("path endpoint or corner {0} lies on a line")]
    EndpointOnLine(String),
    #[error("path runs along line {0}")]
    PathAlongLine(usize),
    #[error("covector {0} is outside the frame cone")]
    NotInCone(Covector),
    #[error("crossed covectors do not lie in a common half-plane")]
    NoCommonCone,
    #[error("paths are not homotopic: the loop they form winds around {0}")]
    NotHomotopic(String),
    #[error("walls have not been attached")]
    MissingWalls,
    #[error("factorization produced a wall at slope {0} with no line")]
    MissingLine(Slope),
    #[error("more than {0} lines; lower the order cutoff")]
    TooManyLines(usize),
    #[error("unsupported export format {0:?}")]
    UnsupportedFormat(String),
    #[error("invalid diagram document: {0}")]
    Import(String),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
}

pub type Point = [Rational; 2];

/// Hard cap on the number of lines `evolve` will create.
pub const LINE_BUDGET: usize = 20_000;

pub(crate) fn fmt_point(p: &Point) -> String {
    format!("({}, {})", crate::scalars::format_rational(&p[0]), crate::scalars::format_rational(&p[1]))
}

pub(crate) fn to_vec(c: Covector) -> Point {
    [Rational::from_integer(c.a.into()), Rational::from_integer(c.b.into())]
}

pub(crate) fn cross(p: &Point, q: &Point) -> Rational {
    &p[0] * &q[1] - &p[1] * &q[0]
}

pub(crate) fn sub(p: &Point, q: &Point) -> Point {
    [&p[0] - &q[0], &p[1] - &q[1]]
}

/// A focus-focus point with the covector its two rays carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    #[serde(with = "rational_serde::pair")]
    pub point: Point,
    #[serde(default = "default_alpha")]
    pub alpha: Covector,
}

fn default_alpha() -> Covector {
    Covector::DY
}

impl SingularPoint {
    pub fn new(point: Point) -> Self {
        SingularPoint { point, alpha: Covector::DY }
    }

    pub fn with_alpha(point: Point, alpha: Covector) -> Self {
        SingularPoint { point, alpha }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Initial,
    Composite,
}

/// Birth data of a composite line: `α = n₁α_{l₁} + n₂α_{l₂}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parents {
    pub lines: [usize; 2],
    pub n: [usize; 2],
    pub event: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "C: JsonScalar", deserialize = "C: JsonScalar"))]
pub struct Line<C: Coefficient> {
    pub id: usize,
    #[serde(with = "rational_serde::pair")]
    pub base: Point,
    pub alpha: Covector,
    #[serde(with = "rational_serde")]
    pub ord0: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Parents>,
    pub generation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<WallFunction<C>>,
}

impl<C: Coefficient> Line<C> {
    pub fn kind(&self) -> LineKind {
        if self.parents.is_some() {
            LineKind::Composite
        } else {
            LineKind::Initial
        }
    }

    /// `t = ⟨α, p − base⟩`.
    pub fn time_at(&self, p: &Point) -> Rational {
        self.alpha.pair(&sub(p, &self.base))
    }

    pub fn ord_at(&self, p: &Point) -> Rational {
        &self.ord0 + self.time_at(p)
    }

    /// Ray parameter `s ≥ 0` with `p = base + s·α`, if `p` is on the ray.
    pub fn param_of(&self, p: &Point) -> Option<Rational> {
        let d = sub(p, &self.base);
        if !cross(&to_vec(self.alpha), &d).is_zero() {
            return None;
        }
        let s = self.time_at(p) / Rational::from_integer(self.alpha.norm2().into());
        (!s.is_negative()).then_some(s)
    }

    fn has_wall(&self) -> bool {
        matches!(&self.wall, Some(w) if !w.is_trivial())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionEvent {
    #[serde(with = "rational_serde::pair")]
    pub point: Point,
    /// Incoming lines ordered so that `α₁ ∧ α₂ > 0`.
    pub lines: [usize; 2],
    #[serde(with = "rational_serde::vec")]
    pub times: Vec<Rational>,
    #[serde(with = "rational_serde::vec")]
    pub ords: Vec<Rational>,
    /// `(line id, [n₁, n₂])` for each line born here.
    pub newborn: Vec<(usize, [usize; 2])>,
}

/// Closed axis-parallel box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "rational_serde::pair")]
    pub lo: Point,
    #[serde(with = "rational_serde::pair")]
    pub hi: Point,
}

impl Window {
    pub fn contains(&self, p: &Point) -> bool {
        (0..2).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "C: JsonScalar", deserialize = "C: JsonScalar"))]
pub struct Diagram<C: Coefficient> {
    pub singular_points: Vec<SingularPoint>,
    pub lines: Vec<Line<C>>,
    pub events: Vec<CollisionEvent>,
    #[serde(with = "rational_serde")]
    pub order_cutoff: Rational,
    pub series_order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

/// Two rays `l_±` per singular point, with covectors `±α_s` and wall `1 + z`.
pub fn initial_lines<C: Coefficient>(points: &[SingularPoint]) -> Result<Vec<Line<C>>, ScatterError> {
    let mut seen = BTreeSet::new();
    let mut lines = Vec::with_capacity(2 * points.len());
    for sp in points {
        if !seen.insert(sp.point.clone()) {
            return Err(ScatterError::DuplicateSingularPoint(fmt_point(&sp.point)));
        }
        for alpha in [sp.alpha, -sp.alpha] {
            lines.push(Line {
                id: lines.len(),
                base: sp.point.clone(),
                alpha,
                ord0: Rational::zero(),
                parents: None,
                generation: 0,
                wall: Some(WallFunction::new(vec![C::one()])),
            });
        }
    }
    Ok(lines)
}

impl<C: Coefficient> Diagram<C> {
    /// Diagram with only the initial lines.
    pub fn new(
        singular_points: Vec<SingularPoint>,
        order_cutoff: Rational,
        series_order: usize,
        window: Option<Window>,
    ) -> Result<Self, ScatterError> {
        let lines = initial_lines(&singular_points)?;
        Ok(Diagram { singular_points, lines, events: Vec::new(), order_cutoff, series_order, window })
    }

    pub fn line(&self, id: usize) -> &Line<C> {
        &self.lines[id]
    }

    /// Basis `(α₁, α₂)` and weighted filtration used at an event.
    pub fn event_frame(&self, e: &CollisionEvent) -> Result<(Basis, Filtration), ScatterError> {
        let [l1, l2] = e.lines;
        let basis = Basis::new(self.lines[l1].alpha, self.lines[l2].alpha)?;
        let filt = Filtration::weighted(self.series_order, e.ords[0].clone(), e.ords[1].clone(), self.order_cutoff.clone());
        Ok((basis, filt))
    }
}

/// Crossing of two rays away from both base points.
fn ray_intersection<C: Coefficient>(l: &Line<C>, m: &Line<C>) -> Option<Point> {
    let (a, b) = (to_vec(l.alpha), to_vec(m.alpha));
    let det = cross(&a, &b);
    if det.is_zero() {
        return None;
    }
    let d = sub(&m.base, &l.base);
    let s = cross(&d, &b) / &det;
    let r = cross(&d, &a) / &det;
    if !s.is_positive() || !r.is_positive() {
        return None;
    }
    Some([&l.base[0] + &s * &a[0], &l.base[1] + &s * &a[1]])
}

type Candidate = (Rational, Point, usize, usize);

fn candidate<C: Coefficient>(d: &Diagram<C>, i: usize, j: usize) -> Option<Candidate> {
    let (l, m) = (&d.lines[i], &d.lines[j]);
    let p = ray_intersection(l, m)?;
    if d.window.as_ref().is_some_and(|w| !w.contains(&p)) {
        return None;
    }
    let key = l.ord_at(&p) + m.ord_at(&p);
    Some((key, p, i.min(j), i.max(j)))
}

/// Traces all collisions with `ord₁ + ord₂ ≤ C`, in increasing order of
/// that sum (which is causal: a newborn's order already exceeds the sum at
/// its birth), creating the newborn lines of each.
///
/// Newborns are enumerated for coprime `n₁, n₂ ≥ 1` with
/// `n₁ord₁ + n₂ord₂ ≤ C` and `n₁ + n₂ < k`; anything else carries a trivial
/// wall modulo the truncation. Walls already attached are discarded.
pub fn evolve<C: Coefficient>(d: &Diagram<C>) -> Result<Diagram<C>, ScatterError> {
    let mut out = Diagram::new(d.singular_points.clone(), d.order_cutoff.clone(), d.series_order, d.window.clone())?;
    let mut queue: BTreeSet<Candidate> = BTreeSet::new();
    for i in 0..out.lines.len() {
        for j in i + 1..out.lines.len() {
            queue.extend(candidate(&out, i, j));
        }
    }
    let c = out.order_cutoff.clone();
    let k = out.series_order;
    while let Some((key, p, i, j)) = queue.pop_first() {
        if key > c {
            break;
        }
        if let Some(third) = out.lines.iter().find(|l| l.id != i && l.id != j && l.param_of(&p).is_some()) {
            return Err(ScatterError::TripleCollision(format!("{} (lines {i}, {j}, {})", fmt_point(&p), third.id)));
        }
        let (first, second) = if out.lines[i].alpha.wedge(out.lines[j].alpha) > 0 { (i, j) } else { (j, i) };
        let (l1, l2) = (&out.lines[first], &out.lines[second]);
        let times = vec![l1.time_at(&p), l2.time_at(&p)];
        let ords = vec![l1.ord_at(&p), l2.ord_at(&p)];
        let (a1, a2) = (l1.alpha, l2.alpha);
        let generation = l1.generation.max(l2.generation) + 1;
        let event = out.events.len();
        let mut newborn = Vec::new();
        for total in 2..k {
            for n1 in 1..total {
                let n2 = total - n1;
                if n1.gcd(&n2) != 1 {
                    continue;
                }
                let ord0 = &ords[0] * Rational::from_integer(n1.into()) + &ords[1] * Rational::from_integer(n2.into());
                if ord0 > c {
                    continue;
                }
                let id = out.lines.len();
                if id >= LINE_BUDGET {
                    return Err(ScatterError::TooManyLines(LINE_BUDGET));
                }
                out.lines.push(Line {
                    id,
                    base: p.clone(),
                    alpha: n1 as i64 * a1 + n2 as i64 * a2,
                    ord0,
                    parents: Some(Parents { lines: [first, second], n: [n1, n2], event }),
                    generation,
                    wall: None,
                });
                newborn.push((id, [n1, n2]));
            }
        }
        for &(id, _) in &newborn {
            for other in 0..out.lines.len() {
                if out.lines[other].base != p || out.lines[other].parents.as_ref().map(|q| q.event) != Some(event) {
                    queue.extend(candidate(&out, id, other));
                }
            }
        }
        out.events.push(CollisionEvent { point: p, lines: [first, second], times, ords, newborn });
    }
    Ok(out)
}

/// Assigns walls event by event: factorize `g_{α₂} ∘ g_{α₁}` in the local
/// basis and weighted filtration, and give each newborn the factor at its
/// slope.
pub fn attach_walls<C: Coefficient>(d: &Diagram<C>) -> Result<Diagram<C>, ScatterError> {
    let mut out = d.clone();
    for line in &mut out.lines {
        line.wall = match line.kind() {
            LineKind::Initial => Some(WallFunction::new(vec![C::one()])),
            LineKind::Composite => None,
        };
    }
    for e in &d.events {
        let (basis, filt) = out.event_frame(e)?;
        let [l1, l2] = e.lines;
        let f1 = out.lines[l1].wall.clone().ok_or(ScatterError::MissingWalls)?;
        let f2 = out.lines[l2].wall.clone().ok_or(ScatterError::MissingWalls)?;
        let g0 = slope_auto(Slope::ZERO, &f1, basis, &filt);
        let ginf = slope_auto(Slope::INFINITY, &f2, basis, &filt);
        let sf = factorize(&ginf.compose(&g0)?)?;
        for (s, _) in sf.factors() {
            let born = e.newborn.iter().any(|(_, n)| n[0] == s.n1() && n[1] == s.n2());
            if !born && s != Slope::ZERO && s != Slope::INFINITY {
                return Err(ScatterError::MissingLine(s));
            }
        }
        for (id, n) in &e.newborn {
            let s = Slope::new(n[0] as i64, n[1] as i64).map_err(ScatterError::Factorize)?;
            out.lines[*id].wall = Some(sf.get(s));
        }
    }
    Ok(out)
}

/// `evolve` then `attach_walls`.
pub fn build<C: Coefficient>(d: &Diagram<C>) -> Result<Diagram<C>, ScatterError> {
    attach_walls(&evolve(d)?)
}

/// Walls around an event, counterclockwise, in its local frame.
pub fn event_walls<C: Coefficient>(d: &Diagram<C>, e: &CollisionEvent) -> Result<Vec<VertexWall<C>>, ScatterError> {
    let (basis, filt) = d.event_frame(e)?;
    let wall = |id: usize| -> Result<_, ScatterError> {
        let line = &d.lines[id];
        let f = line.wall.as_ref().ok_or(ScatterError::MissingWalls)?;
        Ok((line.alpha, transport::wall_auto_in(line.alpha, f, basis, &filt)?))
    };
    let [l1, l2] = e.lines;
    let mut out = Vec::new();
    let (a1, g1) = wall(l1)?;
    let (a2, g2) = wall(l2)?;
    out.push(VertexWall { direction: a1, orientation: Orientation::Outgoing, auto: g1.clone() });
    let mut born = Vec::new();
    for (id, n) in &e.newborn {
        born.push((Slope::new(n[0] as i64, n[1] as i64)?, *id));
    }
    born.sort_by_key(|x| x.0);
    for (_, id) in born {
        let (a, g) = wall(id)?;
        out.push(VertexWall { direction: a, orientation: Orientation::Outgoing, auto: g });
    }
    out.push(VertexWall { direction: a2, orientation: Orientation::Outgoing, auto: g2.clone() });
    out.push(VertexWall { direction: -a1, orientation: Orientation::Incoming, auto: g1 });
    out.push(VertexWall { direction: -a2, orientation: Orientation::Incoming, auto: g2 });
    Ok(out)
}

/// Whether the loop around every event is the identity in its frame.
pub fn check_vertices<C: Coefficient>(d: &Diagram<C>) -> Result<Vec<bool>, ScatterError> {
    d.events.iter().map(|e| Ok(vertex_consistency(&event_walls(d, e)?)?)).collect()
}

/// Line count bound from the finiteness argument: every event raises the
/// order by at least the smallest birth order `δ`, so there are at most
/// `C/δ` generations.
pub fn generation_bound<C: Coefficient>(d: &Diagram<C>) -> Option<Rational> {
    let delta = d.events.iter().map(|e| &e.ords[0] + &e.ords[1]).min()?;
    Some(&d.order_cutoff / delta + Rational::one())
}
