//! Path transport through a diagram and the K-affine check on walls.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{cross, fmt_point, ray_intersection, sub, to_vec, Diagram, Line, Point, ScatterError};
use crate::factorize::WallFunction;
use crate::lattice::Covector;
use crate::poisson::{p_omega, Basis, EvalPoint, Filtration, GradedSeries, SympAuto, TruncSeries2};
use crate::scalars::{Coefficient, Rational};

/// Where transports are computed: a unimodular basis whose cone holds every
/// covector met, and a filtration coarse enough that each vertex inside the
/// region is consistent modulo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub basis: Basis,
    pub filtration: Filtration,
}

/// A unimodular basis `(β₁, β₂)` such that every covector is a
/// non-negative integer combination, if they fit in an open half-plane.
pub fn cone_basis(covectors: &[Covector]) -> Option<Basis> {
    if covectors.iter().any(|c| c.is_zero()) {
        return None;
    }
    if covectors.is_empty() {
        return Some(Basis::standard());
    }
    // clockwise-most: everything else is weakly to its left, never opposite
    let lower = covectors.iter().copied().find(|&e| {
        covectors.iter().all(|&v| {
            let w = e.wedge(v);
            w > 0 || (w == 0 && e.a * v.a + e.b * v.b > 0)
        })
    })?;
    // counterclockwise-most
    let upper = covectors
        .iter()
        .copied()
        .filter(|&v| lower.wedge(v) > 0)
        .find(|&e| covectors.iter().all(|&v| e.wedge(v) <= 0));
    let g = lower.gcd();
    let e1 = Covector::new(lower.a / g, lower.b / g);
    let ext = e1.a.extended_gcd(&e1.b);
    // det(e1, w0) = a·x + b·y = 1
    let w0 = Covector::new(-ext.y, ext.x);
    debug_assert_eq!(e1.wedge(w0), 1);
    let w = match upper {
        Some(e2) => {
            let y = e1.wedge(e2);
            let t = Integer::div_floor(&e2.wedge(w0), &y);
            w0 + t * e1
        }
        None => w0,
    };
    let basis = Basis::new(e1, w).ok()?;
    covectors.iter().all(|&c| basis.covector_coords(c).is_some()).then_some(basis)
}

/// `ξ ↦ ξ f(z)^{μ_b}`, `η ↦ η f(z)^{−μ_a}` with `z = R_{−μ}`, in the given
/// basis and filtration.
pub(crate) fn wall_auto_in<C: Coefficient>(
    mu: Covector,
    f: &WallFunction<C>,
    basis: Basis,
    filtration: &Filtration,
) -> Result<SympAuto<C>, ScatterError> {
    let (m1, m2) = basis.covector_coords(mu).ok_or(ScatterError::NotInCone(mu))?;
    let z = GradedSeries::monomial(m1, m2, C::one(), filtration);
    let fz = GradedSeries::eval_univariate(&f.full(), &z);
    let a = fz.pow(mu.b).expect("wall functions are units");
    let b = fz.pow(-mu.a).expect("wall functions are units");
    Ok(SympAuto::from_multipliers(basis, a, b)?)
}

/// The wall automorphism of a line in a frame.
pub fn wall_auto<C: Coefficient>(line: &Line<C>, frame: &Frame) -> Result<SympAuto<C>, ScatterError> {
    let f = line.wall.as_ref().ok_or(ScatterError::MissingWalls)?;
    wall_auto_in(line.alpha, f, frame.basis, &frame.filtration)
}

/// A transversal crossing of a line with a non-trivial wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub line: usize,
    pub point: Point,
    /// `+1` when `det(direction, velocity) > 0`.
    pub sign: i8,
}

/// Crossings along a polyline, in order. Lines with trivial walls are
/// ignored.
pub fn crossings<C: Coefficient>(d: &Diagram<C>, path: &[Point]) -> Result<Vec<Crossing>, ScatterError> {
    if d.lines.iter().any(|l| l.wall.is_none()) {
        return Err(ScatterError::MissingWalls);
    }
    let walls: Vec<&Line<C>> = d.lines.iter().filter(|l| l.has_wall()).collect();
    for p in path {
        if walls.iter().any(|l| l.param_of(p).is_some()) {
            return Err(ScatterError::EndpointOnLine(fmt_point(p)));
        }
    }
    let mut out = Vec::new();
    for seg in path.windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        let dir = sub(b, a);
        let mut here: Vec<(Rational, Crossing)> = Vec::new();
        for l in &walls {
            let alpha = to_vec(l.alpha);
            let denom = cross(&dir, &alpha);
            let off = sub(&l.base, a);
            if denom.is_zero() {
                if cross(&off, &alpha).is_zero() {
                    // on the supporting line: trouble if it touches the ray
                    let s_a = l.alpha.pair(&sub(a, &l.base));
                    let s_b = l.alpha.pair(&sub(b, &l.base));
                    if !s_a.is_negative() || !s_b.is_negative() {
                        return Err(ScatterError::PathAlongLine(l.id));
                    }
                }
                continue;
            }
            let tau = cross(&off, &alpha) / &denom;
            let s = cross(&off, &dir) / &denom;
            if tau.is_negative() || tau > Rational::one() || s.is_negative() {
                continue;
            }
            let point = [&a[0] + &tau * &dir[0], &a[1] + &tau * &dir[1]];
            if s.is_zero() {
                return Err(ScatterError::PathThroughVertex(fmt_point(&point)));
            }
            let sign = if cross(&alpha, &dir).is_positive() { 1 } else { -1 };
            here.push((tau, Crossing { line: l.id, point, sign }));
        }
        here.sort_by(|x, y| x.0.cmp(&y.0));
        for pair in here.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ScatterError::PathThroughVertex(fmt_point(&pair[0].1.point)));
            }
        }
        out.extend(here.into_iter().map(|(_, c)| c));
    }
    Ok(out)
}

/// Winding number of a closed polygon around `p`; `None` if `p` is on it.
fn winding_number(poly: &[Point], p: &Point) -> Option<i64> {
    let mut wn = 0;
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let left = cross(&sub(b, a), &sub(p, a));
        let within = |k: usize| a[k].clone().min(b[k].clone()) <= p[k] && p[k] <= a[k].clone().max(b[k].clone());
        if left.is_zero() && within(0) && within(1) {
            return None;
        }
        if a[1] <= p[1] {
            if b[1] > p[1] && left.is_positive() {
                wn += 1;
            }
        } else if b[1] <= p[1] && left.is_negative() {
            wn -= 1;
        }
    }
    Some(wn)
}

/// Positive weights `(w₁, w₂)` meeting every constraint `m₁w₁ + m₂w₂ ≥ o`
/// and keeping as many monomials below order `k` as possible. The kept set
/// shrinks as the weights grow, so only corners of the feasible region are
/// candidates; a weight pinned at zero is replaced by a tiny positive one.
fn frame_weights(constraints: &[(usize, usize, Rational)], k: usize, bound: &Rational) -> Option<(Rational, Rational)> {
    if constraints.is_empty() {
        return None;
    }
    let r = |n: usize| Rational::from_integer(n.into());
    let tiny = bound / Rational::from_integer((1000 * k.max(1)).into());
    let feasible = |w1: &Rational, w2: &Rational| constraints.iter().all(|(m1, m2, o)| r(*m1) * w1 + r(*m2) * w2 >= *o);
    let mut candidates: Vec<(Rational, Rational)> = Vec::new();
    for (i, (a1, a2, o)) in constraints.iter().enumerate() {
        // corners on the axes
        if *a1 > 0 {
            candidates.push((o / r(*a1), tiny.clone()));
        }
        if *a2 > 0 {
            candidates.push((tiny.clone(), o / r(*a2)));
        }
        for (b1, b2, p) in &constraints[i + 1..] {
            let det = r(*a1) * r(*b2) - r(*a2) * r(*b1);
            if det.is_zero() {
                continue;
            }
            let w1 = (o * r(*b2) - p * r(*a2)) / &det;
            let w2 = (p * r(*a1) - o * r(*b1)) / &det;
            candidates.push((w1, w2));
        }
    }
    // raising both weights uniformly always works
    let phi = constraints.iter().map(|(m1, m2, o)| o / r(m1 + m2)).max()?;
    candidates.push((phi.clone(), phi));
    let kept = |w1: &Rational, w2: &Rational| {
        let f = Filtration::weighted(k, w1.clone(), w2.clone(), bound.clone());
        (0..k).flat_map(|n1| (0..k - n1).map(move |n2| (n1, n2))).filter(|&(n1, n2)| f.keeps(n1, n2)).count()
    };
    candidates
        .into_iter()
        .map(|(w1, w2)| (if w1.is_positive() { w1 } else { tiny.clone() }, if w2.is_positive() { w2 } else { tiny.clone() }))
        .filter(|(w1, w2)| feasible(w1, w2))
        .max_by(|a, b| kept(&a.0, &a.1).cmp(&kept(&b.0, &b.1)).then_with(|| b.cmp(a)))
}

impl Frame {
    pub fn new(basis: Basis, filtration: Filtration) -> Self {
        Frame { basis, filtration }
    }

    /// Frame for comparing transports along the given paths.
    ///
    /// The basis is fitted to the crossed covectors. With two or more
    /// paths, every crossing of two walls enclosed by the loop
    /// `paths[0] · paths[i]⁻¹` constrains the filtration: the frame weight
    /// of each wall covector must be at least that line's order there, so
    /// the truncation of the vertex is finer than the frame's.
    pub fn for_paths<C: Coefficient>(d: &Diagram<C>, paths: &[&[Point]]) -> Result<Frame, ScatterError> {
        let mut covs = Vec::new();
        for p in paths {
            for c in crossings(d, p)? {
                covs.push(d.lines[c.line].alpha);
            }
        }
        let basis = cone_basis(&covs).ok_or(ScatterError::NoCommonCone)?;
        let coords = |c: Covector| basis.covector_coords(c).ok_or(ScatterError::NotInCone(c));
        // (m₁, m₂, ord): the frame weight m₁w₁ + m₂w₂ must reach ord
        let mut constraints: Vec<(usize, usize, Rational)> = Vec::new();
        let walls: Vec<&Line<C>> = d.lines.iter().filter(|l| l.has_wall()).collect();
        for other in paths.iter().skip(1) {
            let mut poly: Vec<Point> = paths[0].to_vec();
            poly.extend(other.iter().rev().skip(1).cloned());
            for sp in &d.singular_points {
                match winding_number(&poly, &sp.point) {
                    Some(0) => {}
                    Some(_) => return Err(ScatterError::NotHomotopic(fmt_point(&sp.point))),
                    None => return Err(ScatterError::PathThroughVertex(fmt_point(&sp.point))),
                }
            }
            for (i, l) in walls.iter().enumerate() {
                for m in &walls[i + 1..] {
                    let Some(p) = ray_intersection(l, m) else { continue };
                    match winding_number(&poly, &p) {
                        Some(0) => continue,
                        Some(_) => {}
                        None => return Err(ScatterError::PathThroughVertex(fmt_point(&p))),
                    }
                    for line in [l, m] {
                        let (m1, m2) = coords(line.alpha)?;
                        constraints.push((m1, m2, line.ord_at(&p)));
                    }
                }
            }
        }
        let k = d.series_order;
        let filtration = match frame_weights(&constraints, k, &d.order_cutoff) {
            Some((w1, w2)) => Filtration::weighted(k, w1, w2, d.order_cutoff.clone()),
            None => Filtration::degree(k),
        };
        Ok(Frame { basis, filtration })
    }
}

/// `i_{x,y}` along a polyline: walls met, first one leftmost, each
/// inverted when crossed negatively.
pub fn transport<C: Coefficient>(d: &Diagram<C>, path: &[Point], frame: &Frame) -> Result<SympAuto<C>, ScatterError> {
    let mut acc = SympAuto::identity(frame.basis, &frame.filtration);
    for c in crossings(d, path)? {
        let g = wall_auto(&d.lines[c.line], frame)?;
        let g = if c.sign > 0 { g } else { g.invert() };
        acc = acc.compose(&g)?;
    }
    Ok(acc)
}

/// Transports along two paths with common endpoints, in a shared frame.
pub fn path_independent<C: Coefficient>(d: &Diagram<C>, p: &[Point], q: &[Point]) -> Result<bool, ScatterError> {
    if p.first() != q.first() || p.last() != q.last() {
        return Err(ScatterError::NotHomotopic("paths have different endpoints".into()));
    }
    let frame = Frame::for_paths(d, &[p, q])?;
    Ok(transport(d, p, &frame)?.agrees(&transport(d, q, &frame)?))
}

fn poly_mul<C: Coefficient>(a: &[C], b: &[C], n: usize) -> Vec<C> {
    let mut out = vec![C::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn poly_inverse<C: Coefficient>(a: &[C], n: usize) -> Result<Vec<C>, ScatterError> {
    let c0 = a.first().cloned().unwrap_or_else(C::zero);
    let inv0 = c0.inverse().map_err(|e| ScatterError::Poisson(e.into()))?;
    let mut out = vec![C::zero(); n];
    out[0] = inv0.clone();
    for m in 1..n {
        let mut s = C::zero();
        for i in 1..=m.min(a.len() - 1) {
            s = s + a[i].clone() * out[m - i].clone();
        }
        out[m] = -(s * inv0.clone());
    }
    Ok(out)
}

/// `p_Ω` of the `ξ`-multiplier `f(R_{−μ})^{μ_b}` of a wall; `coeffs` are
/// `c₀, c₁, …` (a `c₀ ≠ 1` is allowed, as a control).
pub fn kaffine_projection<C: Coefficient>(
    mu: Covector,
    coeffs: &[C],
    k: usize,
    x: &EvalPoint,
) -> Result<C, ScatterError> {
    let basis = cone_basis(&[mu]).ok_or(ScatterError::NotInCone(mu))?;
    let (m1, m2) = basis.covector_coords(mu).ok_or(ScatterError::NotInCone(mu))?;
    let n = (k.saturating_sub(1)) / (m1 + m2) + 1;
    let base = if mu.b >= 0 { coeffs.to_vec() } else { poly_inverse(coeffs, n)? };
    let mut power = vec![C::one()];
    for _ in 0..mu.b.unsigned_abs() {
        power = poly_mul(&power, &base, n);
    }
    let series = TruncSeries2::from_terms(
        basis,
        k,
        power.into_iter().enumerate().map(|(m, c)| (-(m as i64 * mu), c)),
    );
    Ok(p_omega(&series, x)?)
}

/// Whether a wall leaves the K-affine structure alone: `p_Ω` of its
/// `ξ`-multiplier is one.
pub fn kaffine_invariance_check<C: Coefficient>(mu: Covector, wall: &WallFunction<C>, k: usize) -> Result<bool, ScatterError> {
    let origin = [Rational::zero(), Rational::zero()];
    Ok(kaffine_projection(mu, &wall.full(), k, &origin)?.agrees(&C::one()))
}

#[cfg(test)]
mod tests {
    use super::super::{build, SingularPoint};
    use super::*;
    use crate::scalars::rational::int;
    use crate::scalars::ValuedScalar;

    fn pt(a: i64, b: i64) -> Point {
        [int(a), int(b)]
    }

    fn ptq(a: Rational, b: Rational) -> Point {
        [a, b]
    }

    #[test]
    fn cone_bases() {
        let b = cone_basis(&[Covector::DX, Covector::DY]).unwrap();
        assert_eq!((b.first(), b.second()), (Covector::DX, Covector::DY));
        let b = cone_basis(&[Covector::new(2, 1), Covector::new(1, 3), Covector::new(1, 1)]).unwrap();
        assert_eq!(b.det(), 1);
        assert!(cone_basis(&[Covector::DY, -Covector::DY]).is_none());
        assert!(cone_basis(&[Covector::DX, Covector::DY, Covector::new(-1, -1)]).is_none());
        let single = cone_basis(&[Covector::new(0, -1)]).unwrap();
        assert!(single.covector_coords(Covector::new(0, -1)).is_some());
    }

    fn pentagon() -> Diagram<Rational> {
        let d = Diagram::new(
            vec![SingularPoint::new(pt(0, 0)), SingularPoint::with_alpha(pt(-1, 1), Covector::DX)],
            int(3),
            6,
            None,
        )
        .unwrap();
        build(&d).unwrap()
    }

    #[test]
    fn transport_around_an_event() {
        let d = pentagon();
        let h = Rational::new(1.into(), 2.into());
        let x = ptq(-h.clone(), int(1) - &h);
        let y = ptq(int(1), int(3));
        // below-right of the vertex versus above-left of it
        let p = vec![x.clone(), ptq(int(2), h.clone()), y.clone()];
        let q = vec![x.clone(), ptq(-h.clone(), int(3)), y.clone()];
        assert!(!crossings(&d, &p).unwrap().is_empty());
        assert!(path_independent(&d, &p, &q).unwrap());
        // a path that sees no wall
        let quiet = vec![pt(-3, -3), pt(-2, -3)];
        let frame = Frame::for_paths(&d, &[&quiet]).unwrap();
        assert!(transport(&d, &quiet, &frame).unwrap().is_identity());
        // composition law
        let z = ptq(int(3), int(2) + &h);
        let xy = vec![x.clone(), ptq(int(2), h.clone()), y.clone()];
        let yz = vec![y.clone(), z.clone()];
        let xz: Vec<Point> = xy.iter().chain(yz.iter().skip(1)).cloned().collect();
        let frame = Frame::for_paths(&d, &[&xz, &[x.clone(), z.clone()]]).unwrap();
        let lhs = transport(&d, &xy, &frame).unwrap().compose(&transport(&d, &yz, &frame).unwrap()).unwrap();
        assert!(lhs.agrees(&transport(&d, &xz, &frame).unwrap()));
        assert!(lhs.agrees(&transport(&d, &[x, z], &frame).unwrap()));
    }

    #[test]
    fn path_errors() {
        let d = pentagon();
        assert!(matches!(crossings(&d, &[pt(0, 3), pt(1, 3)]), Err(ScatterError::EndpointOnLine(_))));
        assert!(matches!(crossings(&d, &[pt(-1, 2), pt(1, 0)]), Err(ScatterError::PathThroughVertex(_))));
        let around = [pt(1, -1), pt(1, 1)];
        let other = [pt(1, -1), pt(-1, -1), pt(-1, 1) , pt(1, 1)];
        let r = path_independent(&d, &around, &other);
        assert!(r.is_err(), "{r:?}");
    }

    #[test]
    fn kaffine() {
        let wall = WallFunction::new(vec![int(1)]);
        assert!(kaffine_invariance_check(Covector::DY, &wall, 8).unwrap());
        assert!(kaffine_invariance_check(-Covector::DY, &wall, 8).unwrap());
        let w2 = WallFunction::new(vec![int(3), int(1)]);
        assert!(kaffine_invariance_check(Covector::DY, &w2, 8).unwrap());
        assert!(kaffine_invariance_check(Covector::new(2, 1), &w2, 8).unwrap());
        // 1 + t + z: p_Ω = 1 + t
        let t = ValuedScalar::t();
        let c = [ValuedScalar::one() + t.clone(), ValuedScalar::one()];
        let origin = [int(0), int(0)];
        let p = kaffine_projection(Covector::DY, &c, 8, &origin).unwrap();
        assert!(!p.agrees(&ValuedScalar::one()));
        assert!(p.agrees(&(ValuedScalar::one() + t)));
        for l in &pentagon().lines {
            assert!(kaffine_invariance_check(l.alpha, l.wall.as_ref().unwrap(), 6).unwrap());
        }
    }
}
