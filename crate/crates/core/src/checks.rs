//! Seeded property suites behind `check-all` and the acceptance tests.
//!
//! Each suite draws from its own ChaCha stream derived from the seed, so
//! reports are reproducible and independent of which suites run.

use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{
    gauss_bonnet_check, i_homomorphism, k3_vertex_loop, k_fixed_vectors, mat_inv, mat_mul, matrix_to_lift, monodromy,
    real_fixed_points, valuations_match_fixed_points, KAffineTransform, LiftedWord, Mat2,
};
use crate::factorize::{
    factorize, integrality_probe, ordered_product, slope_auto, standard_wall, Slope, SlopeFactorization, WallFunction,
};
use crate::lattice::Covector;
use crate::poisson::{Basis, Filtration, Hamiltonian, SympAuto, TruncSeries2};
use crate::scalars::{Coefficient, Rational, ValuedScalar};
use crate::scatter::{
    build, check_vertices, Frame, kaffine_invariance_check, path_independent, Diagram, Point, ScatterError, SingularPoint,
};
use crate::tropical::{pl_add, sum_vanishes_on, val_function, LaurentPoly, PLFunction};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

/// Suite sizes and orders. The defaults are the acceptance settings.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    pub factorization_cases: usize,
    pub factorization_order: usize,
    pub pentagon_order: usize,
    pub integrality_cases: usize,
    pub integrality_order: usize,
    pub tropical_pairs: usize,
    pub concavity_points: usize,
    pub unit_pairs: usize,
    pub scatter_order: usize,
    pub path_pairs: usize,
    pub poisson_triples: usize,
    pub poisson_order: usize,
}

impl CheckConfig {
    pub fn new(seed: u64) -> Self {
        CheckConfig {
            seed,
            factorization_cases: 200,
            factorization_order: 8,
            pentagon_order: 12,
            integrality_cases: 50,
            integrality_order: 8,
            tropical_pairs: 100,
            concavity_points: 1000,
            unit_pairs: 20,
            scatter_order: 6,
            path_pairs: 20,
            poisson_triples: 100,
            poisson_order: 6,
        }
    }

    /// Uses `k` as the series order of every suite that takes one.
    pub fn with_order(mut self, k: usize) -> Self {
        self.factorization_order = k;
        self.pentagon_order = k;
        self.integrality_order = k;
        self.scatter_order = k;
        self.poisson_order = k;
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub const SUITES: [&str; 8] =
    ["factorization", "pentagon", "integrality", "gauss-bonnet", "tropical", "scattering", "poisson", "fixed-vectors"];

/// Runs the named suite.
pub fn run_suite(name: &str, cfg: &CheckConfig) -> Option<SuiteReport> {
    let stream = SUITES.iter().position(|s| *s == name)? as u64;
    let mut rng = cfg.rng(stream);
    Some(match name {
        "factorization" => factorization_round_trip(&mut rng, cfg.factorization_cases, cfg.factorization_order),
        "pentagon" => pentagon(cfg.pentagon_order),
        "integrality" => integrality(&mut rng, cfg.integrality_cases, cfg.integrality_order),
        "gauss-bonnet" => gauss_bonnet(),
        "tropical" => tropical(&mut rng, cfg.tropical_pairs, cfg.concavity_points, cfg.unit_pairs),
        "scattering" => scattering(&mut rng, cfg.scatter_order, cfg.path_pairs),
        "poisson" => poisson(&mut rng, cfg.poisson_triples, cfg.poisson_order),
        "fixed-vectors" => fixed_vectors(&mut rng),
        _ => unreachable!(),
    })
}

pub fn check_all(cfg: &CheckConfig) -> CheckReport {
    let suites = SUITES.iter().filter_map(|s| run_suite(s, cfg)).collect();
    CheckReport { seed: cfg.seed, suites }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn random_wall(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> WallFunction<Rational> {
    WallFunction::new((0..len).map(|_| int(rng.gen_range(-bound..=bound))).collect())
}

/// `factorize ∘ ordered_product` is the identity on random factorizations.
pub fn factorization_round_trip(rng: &mut ChaCha8Rng, cases: usize, k: usize) -> SuiteReport {
    let mut report = SuiteReport::new("factorization");
    let slopes = Slope::all_below(k);
    let basis = Basis::standard();
    let filt = Filtration::degree(k);
    for case in 0..cases {
        let n = rng.gen_range(1..=5.min(slopes.len()));
        let chosen: Vec<Slope> = slopes.choose_multiple(rng, n).copied().collect();
        let sf = SlopeFactorization::from_factors(
            k,
            chosen.iter().map(|&s| (s, random_wall(rng, (k - 1) / s.degree(), 5))).collect::<Vec<_>>(),
        );
        let back = ordered_product(&sf, basis, &filt);
        let ok = matches!(factorize(&back), Ok(ref g) if *g == sf);
        report.record(ok, || format!("case {case}: {sf:?}"));
    }
    report
}

/// `F_∞ ∘ F_0` with both walls `1 + z` factors as the three walls of the
/// pentagon identity, and the product of those walls matches it exactly.
pub fn pentagon(k: usize) -> SuiteReport {
    let mut report = SuiteReport::new("pentagon");
    let one_plus = WallFunction::new(vec![int(1)]);
    let g = standard_wall(Slope::INFINITY, &one_plus, k).compose(&standard_wall(Slope::ZERO, &one_plus, k));
    let g = match g {
        Ok(g) => g,
        Err(e) => {
            report.record(false, || format!("composition failed: {e}"));
            return report;
        }
    };
    let walls = [Slope::ZERO, Slope::new(1, 1).expect("primitive"), Slope::INFINITY];
    let expected = SlopeFactorization::from_factors(k, walls.iter().map(|&s| (s, one_plus.clone())));
    match factorize(&g) {
        Ok(sf) => {
            for s in Slope::all_below(k) {
                let want = if walls.contains(&s) { one_plus.clone() } else { WallFunction::one() };
                let got = sf.get(s);
                report.record(got == want, || format!("slope {s}: got {got:?}"));
            }
        }
        Err(e) => report.record(false, || format!("factorize failed: {e}")),
    }
    let direct = ordered_product(&expected, Basis::standard(), &Filtration::degree(k));
    report.record(direct.agrees(&g), || "ordered product of the three walls differs from F_inf F_0".into());
    report
}

/// Every wall of `F_∞ ∘ F_0` has integer coefficients for integer inputs.
pub fn integrality(rng: &mut ChaCha8Rng, cases: usize, k: usize) -> SuiteReport {
    let mut report = SuiteReport::new("integrality");
    for case in 0..cases {
        let (n0, ninf) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f0 = random_wall(rng, n0, 3);
        let finf = random_wall(rng, ninf, 3);
        match integrality_probe(&f0, &finf, k) {
            Ok(r) => report.record(r.passed(), || format!("case {case}: {f0:?}, {finf:?}: {:?}", r.counterexamples)),
            Err(e) => report.record(false, || format!("case {case}: {e}")),
        }
    }
    report
}

/// Local indices sum to the Euler characteristic.
pub fn gauss_bonnet() -> SuiteReport {
    let mut report = SuiteReport::new("gauss-bonnet");
    let ff = LiftedWord::focus_focus();
    let cases = [
        ("24 focus-focus points on a sphere", vec![ff.clone(); 24], 0),
        ("6 quadruple points on a sphere", vec![ff.pow(4); 6], 0),
        ("torus", vec![], 1),
    ];
    for (what, words, genus) in cases {
        let r = gauss_bonnet_check(&words, genus);
        report.record(r.passed, || format!("{what}: sum {} against {}", r.sum, r.euler_characteristic));
    }
    // the lift of the quadruple vertex monodromy has index 4/12
    let m = monodromy(&k3_vertex_loop()).linear;
    let lift = matrix_to_lift(&m, 0);
    report.record(lift.project() == m && i_homomorphism(&lift) == i_homomorphism(&ff.pow(4)), || {
        format!("vertex lift {lift} of {m:?}")
    });
    report
}

fn random_vs(rng: &mut ChaCha8Rng) -> ValuedScalar {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-4..=4);
    }
    ValuedScalar::monomial(int(c), rng.gen_range(-3..=3))
}

fn random_laurent(rng: &mut ChaCha8Rng, dim: usize) -> LaurentPoly<ValuedScalar> {
    let n = rng.gen_range(1..=5);
    let terms: Vec<_> = (0..n).map(|_| ((0..dim).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>(), random_vs(rng))).collect();
    let p = LaurentPoly::from_terms(dim, terms).expect("dimension matches");
    if p.is_zero() {
        LaurentPoly::from_terms(dim, [(vec![0; dim], ValuedScalar::one())]).expect("dimension matches")
    } else {
        p
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| Rational::new(rng.gen_range(-60..=60).into(), rng.gen_range(1..=12).into())).collect()
}

fn is_concave_at(f: &PLFunction, x: &[Rational], y: &[Rational]) -> bool {
    let half = Rational::new(1.into(), 2.into());
    let mid: Vec<Rational> = x.iter().zip(y).map(|(a, b)| (a + b) * &half).collect();
    f.eval(&mid) >= (f.eval(x) + f.eval(y)) * half
}

/// Additivity of `Val`, concavity, and affineness of `Val` for units.
pub fn tropical(rng: &mut ChaCha8Rng, pairs: usize, points: usize, units: usize) -> SuiteReport {
    let mut report = SuiteReport::new("tropical");
    let mut vals = Vec::new();
    for case in 0..pairs {
        let dim = 1 + case % 2;
        let (f, g) = (random_laurent(rng, dim), random_laurent(rng, dim));
        let lhs = f.mul(&g).and_then(|fg| val_function(&fg));
        let rhs = val_function(&f).and_then(|vf| val_function(&g).and_then(|vg| pl_add(&vf, &vg)));
        report.record(matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b), || format!("Val(fg) for {f:?} and {g:?}"));
        if let Ok(v) = rhs {
            vals.push(v);
        }
    }
    for case in 0..points {
        let Some(f) = vals.get(case % vals.len().max(1)) else { break };
        let (x, y) = (random_point(rng, f.dim()), random_point(rng, f.dim()));
        report.record(is_concave_at(f, &x, &y), || format!("concavity of {f:?} at {x:?}, {y:?}"));
    }
    for case in 0..units {
        report.record(unit_pair(rng, 1 + case % 2), || format!("unit pair {case}"));
    }
    report
}

/// `f = m (1 + t^b z^J)` and its truncated inverse `g`: on a region where
/// `t^b z^J` is small both `Val`s are affine and sum to zero; on a region
/// reaching past the bend `Val(f)` is not affine.
fn unit_pair(rng: &mut ChaCha8Rng, dim: usize) -> bool {
    let m_exp: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
    let m_coeff = random_vs(rng);
    let b = rng.gen_range(1..=3);
    let mut j: Vec<i64> = vec![0; dim];
    while j.iter().all(|x| *x == 0) {
        j = (0..dim).map(|_| rng.gen_range(-2..=2)).collect();
    }
    let shift = |e: &[i64], n: i64, sign: i64| -> Vec<i64> { e.iter().zip(&j).map(|(a, b)| sign * a + n * b).collect() };
    let f = LaurentPoly::from_terms(
        dim,
        [(m_exp.clone(), m_coeff.clone()), (shift(&m_exp, 1, 1), m_coeff.clone() * ValuedScalar::monomial(int(1), b))],
    )
    .expect("dimension matches");
    let inv = m_coeff.inverse().expect("monomials are units");
    let terms = 4;
    let g = LaurentPoly::from_terms(
        dim,
        (0..terms).map(|n| {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            (shift(&m_exp, n, -1), inv.clone() * ValuedScalar::monomial(int(sign), b * n))
        }),
    )
    .expect("dimension matches");
    // b − ⟨J, x⟩ measures how small t^b z^J is at x
    let small = |x: &[Rational]| int(b) - x.iter().zip(&j).map(|(a, c)| a * int(*c)).sum::<Rational>();
    let mut inside = Vec::new();
    let mut outside = None;
    for _ in 0..1000 {
        let x = random_point(rng, dim);
        let s = small(&x);
        if s >= Rational::new(1.into(), 2.into()) && inside.len() < dim + 1 {
            inside.push(x);
        } else if s <= Rational::new((-1).into(), 2.into()) && outside.is_none() {
            outside = Some(x);
        }
        if inside.len() == dim + 1 && outside.is_some() {
            break;
        }
    }
    let (Some(out), false) = (outside, inside.is_empty()) else { return false };
    let (Ok(vf), Ok(vg)) = (val_function(&f), val_function(&g)) else { return false };
    let mut wide = inside.clone();
    wide.push(out);
    sum_vanishes_on(&vf, &vg, &inside).unwrap_or(false)
        && vf.is_affine_on(&inside).unwrap_or(false)
        && vg.is_affine_on(&inside).unwrap_or(false)
        && !vf.is_affine_on(&wide).unwrap_or(true)
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Diagrams with one to four singular points used by the scattering suite.
pub fn sample_configurations() -> Vec<Vec<SingularPoint>> {
    let a = SingularPoint::new([q(0, 1), q(0, 1)]);
    let b = SingularPoint::with_alpha([q(-1, 1), q(1, 1)], Covector::DX);
    let c = SingularPoint::with_alpha([q(3, 1), q(-1, 2)], Covector::new(-1, 1));
    let d = SingularPoint::with_alpha([q(1, 2), q(7, 2)], Covector::new(1, -2));
    // meets the ray from `a` at (0, 1) with a covector of determinant 2
    let e = SingularPoint::with_alpha([q(-1, 1), q(3, 2)], Covector::new(2, -1));
    vec![
        vec![a.clone()],
        vec![a.clone(), b.clone()],
        vec![a.clone(), e],
        vec![a.clone(), b.clone(), c.clone()],
        vec![a, b, c, d],
    ]
}

fn random_offset(rng: &mut ChaCha8Rng) -> Point {
    [q(rng.gen_range(-97..=97), 101), q(rng.gen_range(-97..=97), 103)]
}

fn add(p: &Point, v: &Point, s: &Rational) -> Point {
    [&p[0] + &v[0] * s, &p[1] + &v[1] * s]
}

/// Two paths from `a` to `b` on either side of `center`, forming a loop
/// around it.
fn path_pair(rng: &mut ChaCha8Rng, center: &Point) -> (Vec<Point>, Vec<Point>) {
    let mut o = random_offset(rng);
    while o[0].abs() < q(1, 2) && o[1].abs() < q(1, 2) {
        o = random_offset(rng);
    }
    let perp = [-o[1].clone(), o[0].clone()];
    let jitter = random_offset(rng);
    let small = q(1, 20);
    let a = add(center, &o, &q(1, 1));
    let b = add(&add(center, &o, &q(-1, 1)), &jitter, &small);
    let s1 = q(rng.gen_range(5..=15), 10);
    let s2 = q(-rng.gen_range(5..=15), 10);
    let m1 = add(&add(center, &perp, &s1), &random_offset(rng), &small);
    let m2 = add(&add(center, &perp, &s2), &random_offset(rng), &small);
    (vec![a.clone(), m1, b.clone()], vec![a, m2, b])
}

fn geometric_rejection(e: &ScatterError) -> bool {
    matches!(
        e,
        ScatterError::NotHomotopic(_)
            | ScatterError::PathThroughVertex(_)
            | ScatterError::EndpointOnLine(_)
            | ScatterError::PathAlongLine(_)
            | ScatterError::NoCommonCone
    )
}

/// Vertex consistency, path independence of transport, and `p_Ω = 1` on
/// every wall, for each sample configuration with `C = k`.
pub fn scattering(rng: &mut ChaCha8Rng, k: usize, path_pairs: usize) -> SuiteReport {
    let mut report = SuiteReport::new("scattering");
    for (n, points) in sample_configurations().into_iter().enumerate() {
        let d = match Diagram::<Rational>::new(points, int(k as i64), k, None).and_then(|d| build(&d)) {
            Ok(d) => d,
            Err(e) => {
                report.record(false, || format!("diagram {n}: {e}"));
                continue;
            }
        };
        match check_vertices(&d) {
            Ok(v) => {
                for (i, ok) in v.into_iter().enumerate() {
                    report.record(ok, || format!("diagram {n}: vertex {i} inconsistent"));
                }
            }
            Err(e) => report.record(false, || format!("diagram {n}: {e}")),
        }
        for l in &d.lines {
            let Some(w) = &l.wall else { continue };
            let ok = kaffine_invariance_check(l.alpha, w, k).unwrap_or(false);
            report.record(ok, || format!("diagram {n}: p_omega of line {} is not 1", l.id));
        }
        if d.events.is_empty() {
            continue;
        }
        let mut accepted = 0;
        for _ in 0..50 * path_pairs {
            if accepted == path_pairs {
                break;
            }
            let center = d.events.choose(rng).expect("events exist").point.clone();
            let (p, r) = path_pair(rng, &center);
            match path_independent(&d, &p, &r) {
                Err(e) if geometric_rejection(&e) => continue,
                res => {
                    accepted += 1;
                    report.record(matches!(res, Ok(true)), || format!("diagram {n}: paths {p:?} and {r:?}: {res:?}"));
                }
            }
        }
        report.record(accepted == path_pairs, || format!("diagram {n}: only {accepted} usable path pairs"));
        if let Some(ok) = tampering_is_detected(rng, &d) {
            report.record(ok, || format!("diagram {n}: a damaged wall went unnoticed"));
        }
    }
    report
}

/// Negative control: multiplying the first newborn wall by `1 + z` must
/// break path independence around its event. `None` when no sampled frame
/// is fine enough to see `z` on that line.
fn tampering_is_detected(rng: &mut ChaCha8Rng, d: &Diagram<Rational>) -> Option<bool> {
    let (event, id) = d.events.iter().find_map(|e| e.newborn.first().map(|(id, _)| (e, *id)))?;
    let mut bad = d.clone();
    let w = bad.lines[id].wall.as_mut()?;
    *w = w.mul(&WallFunction::new(vec![int(1)]), w.degree() + 2);
    let alpha = bad.lines[id].alpha;
    for _ in 0..200 {
        let (p, r) = path_pair(rng, &event.point);
        let visible = match Frame::for_paths(&bad, &[&p, &r]) {
            Err(e) if geometric_rejection(&e) => continue,
            Err(_) => return Some(false),
            Ok(f) => f.basis.covector_coords(alpha).is_some_and(|(m1, m2)| f.filtration.keeps(m1, m2)),
        };
        if visible {
            return Some(matches!(path_independent(&bad, &p, &r), Ok(false)));
        }
    }
    None
}

const BASES: [((i64, i64), (i64, i64)); 3] = [((1, 0), (0, 1)), ((1, 1), (0, 1)), ((2, 1), (1, 1))];

fn random_basis(rng: &mut ChaCha8Rng) -> Basis {
    let ((a, b), (c, d)) = *BASES.choose(rng).expect("non-empty");
    Basis::new(Covector::new(a, b), Covector::new(c, d)).expect("positive determinant")
}

fn random_series(rng: &mut ChaCha8Rng, basis: Basis, k: usize, constant: bool) -> TruncSeries2<Rational> {
    let n = rng.gen_range(1..=4);
    let lo = if constant { 0 } else { 1 };
    let terms: Vec<_> = (0..n)
        .map(|_| {
            let d = rng.gen_range(lo..k);
            let i = rng.gen_range(0..=d);
            (basis.exponent(i as i64, (d - i) as i64), int(rng.gen_range(-3..=3)))
        })
        .collect();
    TruncSeries2::from_terms(basis, k, terms)
}

/// Jacobi and Leibniz on random triples, `exp`/`invert` round trips, and
/// preservation of `Ω` by everything generated.
pub fn poisson(rng: &mut ChaCha8Rng, triples: usize, k: usize) -> SuiteReport {
    let mut report = SuiteReport::new("poisson");
    let filt = Filtration::degree(k);
    for case in 0..triples {
        let basis = random_basis(rng);
        let [f, g, h] = [0, 1, 2].map(|_| random_series(rng, basis, k, true));
        let jacobi = (|| {
            let a = f.bracket(&g.bracket(&h)?)?;
            let b = g.bracket(&h.bracket(&f)?)?;
            let c = h.bracket(&f.bracket(&g)?)?;
            Ok::<_, crate::poisson::PoissonError>(a.add(&b)?.add(&c)?.is_empty())
        })();
        report.record(matches!(jacobi, Ok(true)), || format!("Jacobi {case}: {f:?}, {g:?}, {h:?}"));
        let leibniz = (|| {
            let lhs = f.bracket(&g.mul(&h)?)?;
            let rhs = f.bracket(&g)?.mul(&h)?.add(&g.mul(&f.bracket(&h)?)?)?;
            Ok::<_, crate::poisson::PoissonError>(lhs == rhs)
        })();
        report.record(matches!(leibniz, Ok(true)), || format!("Leibniz {case}: {f:?}, {g:?}, {h:?}"));

        let ham = random_series(rng, basis, k, false);
        let Ok(ham) = Hamiltonian::new(ham) else {
            report.record(false, || format!("Hamiltonian {case} rejected"));
            continue;
        };
        let e = SympAuto::exp_ham(&ham, &filt);
        let e_neg = SympAuto::exp_ham(&ham.neg(), &filt);
        let inv = e.invert();
        let round = e.compose(&e_neg).is_ok_and(|x| x.is_identity())
            && inv.agrees(&e_neg)
            && inv.compose(&e).is_ok_and(|x| x.is_identity());
        report.record(round, || format!("exp/invert {case}: {ham:?}"));
        let wall = random_slope_wall(rng, basis, k);
        let generated = [Some(e.clone()), Some(inv), e.compose(&wall).ok(), Some(wall)];
        for (i, a) in generated.iter().enumerate() {
            report.record(a.as_ref().is_some_and(|a| a.preserves_omega()), || format!("omega {case}.{i}: {ham:?}"));
        }
    }
    report
}

fn random_slope_wall(rng: &mut ChaCha8Rng, basis: Basis, k: usize) -> SympAuto<Rational> {
    let slopes = Slope::all_below(k);
    let s = *slopes.choose(rng).expect("k ≥ 2");
    let f = random_wall(rng, (k - 1) / s.degree(), 5);
    slope_auto(s, &f, basis, &Filtration::degree(k))
}

fn conjugate(m: &Mat2, by: &Mat2) -> Mat2 {
    mat_mul(&mat_mul(by, m), &mat_inv(by))
}

/// The focus-focus examples of the fixed-vector solver and the match
/// between valuations of solutions and the real fixed axis.
pub fn fixed_vectors(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut report = SuiteReport::new("fixed-vectors");
    let one = ValuedScalar::one();
    let t_mat: Mat2 = [[1, 1], [0, 1]];
    let m = KAffineTransform::new(t_mat, [one.clone(), one.clone()]).expect("unimodular");
    match k_fixed_vectors(&m) {
        Some(fam) => {
            let dir_ok = fam.free_directions.len() == 1 && matches!(fam.free_directions[0], [1, 0] | [-1, 0]);
            report.record(dir_ok, || format!("free directions {:?}", fam.free_directions));
            for _ in 0..5 {
                let s = random_vs(rng) + ValuedScalar::monomial(int(rng.gen_range(1..=5)), rng.gen_range(-3..=3) + 4);
                let ok = fam.member(0, std::slice::from_ref(&s)).is_some_and(|v| m.is_fixed(&v) && v[1].agrees(&one));
                report.record(ok, || format!("member at {s} is not fixed"));
            }
        }
        None => report.record(false, || "no fixed vectors for lambda = (1, 1)".into()),
    }
    report.record(valuations_match_fixed_points(&m), || "valuations against the real axis for lambda = (1, 1)".into());
    let axis = m.to_affine().and_then(|t| real_fixed_points(&t));
    report.record(axis.is_some_and(|a| a.directions.len() == 1), || "real fixed set of T is not a line".into());

    let shifted = KAffineTransform::new(t_mat, [one.clone(), ValuedScalar::t()]).expect("unimodular");
    report.record(k_fixed_vectors(&shifted).is_none(), || "fixed vectors for lambda = (1, t)".into());
    report.record(valuations_match_fixed_points(&shifted), || "valuations against the real axis for lambda = (1, t)".into());

    // conjugates of the focus-focus monodromy
    let gens: [Mat2; 3] = [[[1, 1], [0, 1]], [[1, 0], [1, 1]], [[0, -1], [1, 0]]];
    for case in 0..10 {
        let mut p: Mat2 = [[1, 0], [0, 1]];
        for _ in 0..rng.gen_range(1..=4) {
            p = mat_mul(&p, gens.choose(rng).expect("non-empty"));
        }
        let c = conjugate(&t_mat, &p);
        let lambda = [one.clone(), one.clone()];
        let m = KAffineTransform::new(c, lambda).expect("unimodular");
        let ok = k_fixed_vectors(&m).is_some_and(|f| f.free_directions.len() == 1) && valuations_match_fixed_points(&m);
        report.record(ok, || format!("conjugate {case}: {c:?}"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> CheckConfig {
        let mut cfg = CheckConfig::new(seed).with_order(5);
        cfg.factorization_cases = 5;
        cfg.integrality_cases = 5;
        cfg.tropical_pairs = 10;
        cfg.concavity_points = 20;
        cfg.unit_pairs = 4;
        cfg.path_pairs = 3;
        cfg.poisson_triples = 5;
        cfg
    }

    #[test]
    fn small_run_passes() {
        let r = check_all(&small(3));
        for s in &r.suites {
            assert!(s.passed(), "{s:?}");
        }
        assert_eq!(r.suites.len(), SUITES.len());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&check_all(&small(11))).unwrap();
        let b = serde_json::to_string(&check_all(&small(11))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &CheckConfig::new(0)).is_none());
    }
}
