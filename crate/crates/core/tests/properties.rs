use std::sync::OnceLock;

use num_traits::{One, Zero};
use proptest::prelude::*;

use wallcross::affine::{
    focus_focus_loop, i_homomorphism, matrix_to_lift, monodromy, AffineTransform, Letter, LiftedWord, LoopWord, Mat2,
};
use wallcross::factorize::{factorize, ordered_product, Slope, SlopeFactorization, WallFunction};
use wallcross::lattice::Covector;
use wallcross::poisson::{p_omega, Basis, Filtration, Hamiltonian, SympAuto, TruncSeries2};
use wallcross::scalars::{ring_axiom_suite, Coefficient, Extended, Rational, ValuedScalar};
use wallcross::scatter::{build, path_independent, Diagram, Point, ScatterError, SingularPoint};
use wallcross::tropical::{pl_add, val_function, LaurentPoly};

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=8).prop_map(|(a, b)| q(a, b))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("non-zero", |x| !x.is_zero())
}

fn valued() -> impl Strategy<Value = ValuedScalar> {
    (prop::collection::vec((-3i64..4, rational()), 0..4), prop::option::of(4i64..8))
        .prop_map(|(terms, order)| ValuedScalar::new(terms, order))
}

fn int_wall(len: usize) -> impl Strategy<Value = WallFunction<Rational>> {
    prop::collection::vec(-5i64..=5, len).prop_map(|cs| WallFunction::new(cs.into_iter().map(|c| q(c, 1)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_ring_laws(xs in prop::collection::vec(rational(), 1..5)) {
        prop_assert!(ring_axiom_suite(&xs).is_ok());
    }

    #[test]
    fn valued_ring_laws(xs in prop::collection::vec(valued(), 1..4)) {
        let r = ring_axiom_suite(&xs);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn valuation_is_additive(x in valued(), y in valued()) {
        prop_assert_eq!((x.clone() * y.clone()).val(), x.val() + y.val());
        let (vx, vy, vs) = (x.val(), y.val(), (x.clone() + y.clone()).val());
        let min = match (vx, vy) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.min(b)),
            (Extended::Finite(a), _) | (_, Extended::Finite(a)) => Extended::Finite(a),
            _ => Extended::Infinity,
        };
        let ultrametric = match (vs, min) {
            (Extended::Infinity, _) => true,
            (Extended::Finite(_), Extended::Infinity) => false,
            (Extended::Finite(s), Extended::Finite(m)) => s >= m,
        };
        prop_assert!(ultrametric);
    }
}

fn series(basis: Basis, k: usize) -> impl Strategy<Value = TruncSeries2<Rational>> {
    prop::collection::vec((0..k as i64, 0..k as i64, -3i64..=3), 1..5).prop_map(move |terms| {
        TruncSeries2::from_terms(basis, k, terms.into_iter().map(|(i, j, c)| (basis.exponent(i, j), q(c, 1))))
    })
}

fn hamiltonian(k: usize) -> impl Strategy<Value = Hamiltonian<Rational>> {
    series(Basis::standard(), k)
        .prop_map(move |s| {
            let mut t = s.clone();
            t.add_term(Covector::new(0, 0), -s.constant_term());
            t
        })
        .prop_filter_map("Hamiltonians are non-constant", |s| Hamiltonian::new(s).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_identity(f in series(Basis::standard(), 6), g in series(Basis::standard(), 6), h in series(Basis::standard(), 6)) {
        let a = f.bracket(&g.bracket(&h).unwrap()).unwrap();
        let b = g.bracket(&h.bracket(&f).unwrap()).unwrap();
        let c = h.bracket(&f.bracket(&g).unwrap()).unwrap();
        prop_assert!(a.add(&b).unwrap().add(&c).unwrap().is_empty());
    }

    #[test]
    fn leibniz_rule(f in series(Basis::standard(), 6), g in series(Basis::standard(), 6), h in series(Basis::standard(), 6)) {
        let lhs = f.bracket(&g.mul(&h).unwrap()).unwrap();
        let rhs = f.bracket(&g).unwrap().mul(&h).unwrap().add(&g.mul(&f.bracket(&h).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_and_invert(h in hamiltonian(6)) {
        let filt = Filtration::degree(6);
        let e = SympAuto::exp_ham(&h, &filt);
        prop_assert!(e.preserves_omega());
        prop_assert!(e.invert().agrees(&SympAuto::exp_ham(&h.neg(), &filt)));
        prop_assert!(e.compose(&e.invert()).unwrap().is_identity());
    }

    #[test]
    fn composition_is_associative(a in hamiltonian(5), b in hamiltonian(5), c in hamiltonian(5)) {
        let filt = Filtration::degree(5);
        let [x, y, z] = [a, b, c].map(|h| SympAuto::exp_ham(&h, &filt));
        let left = x.compose(&y).unwrap().compose(&z).unwrap();
        let right = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!(left.agrees(&right));
    }
}

fn factorization(k: usize) -> impl Strategy<Value = SlopeFactorization<Rational>> {
    let slopes = Slope::all_below(k);
    prop::sample::subsequence(slopes, 1..=5)
        .prop_flat_map(move |chosen| {
            let walls: Vec<_> = chosen.iter().map(|s| int_wall((k - 1) / s.degree())).collect();
            (Just(chosen), walls)
        })
        .prop_map(move |(chosen, walls)| SlopeFactorization::from_factors(k, chosen.into_iter().zip(walls)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn factorization_round_trip(sf in factorization(6)) {
        let g = ordered_product(&sf, Basis::standard(), &Filtration::degree(6));
        prop_assert_eq!(factorize(&g).unwrap(), sf);
    }

    #[test]
    fn factors_of_walls_are_symplectic(sf in factorization(5)) {
        prop_assert!(ordered_product(&sf, Basis::standard(), &Filtration::degree(5)).preserves_omega());
    }
}

fn laurent(dim: usize) -> impl Strategy<Value = LaurentPoly<ValuedScalar>> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, dim), -3i64..=3, 1i64..=4), 1..5).prop_map(move |terms| {
        let p = LaurentPoly::from_terms(dim, terms.into_iter().map(|(e, v, c)| (e, ValuedScalar::monomial(q(c, 1), v)))).unwrap();
        if p.is_zero() {
            LaurentPoly::from_terms(dim, [(vec![0; dim], ValuedScalar::one())]).unwrap()
        } else {
            p
        }
    })
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn val_is_additive((f, g) in (1usize..=2).prop_flat_map(|d| (laurent(d), laurent(d)))) {
        let lhs = val_function(&f.mul(&g).unwrap()).unwrap();
        let rhs = pl_add(&val_function(&f).unwrap(), &val_function(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn val_is_concave(f in laurent(2), x in point(2), y in point(2)) {
        let v = val_function(&f).unwrap();
        let mid: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| (a + b) / q(2, 1)).collect();
        prop_assert!(v.eval(&mid) * q(2, 1) >= v.eval(&x) + v.eval(&y));
    }
}

/// `a (1 + r)` with every term of `r` small at the origin.
fn small_unit() -> impl Strategy<Value = TruncSeries2<ValuedScalar>> {
    (nonzero_rational(), prop::collection::vec((-2i64..=2, -2i64..=2, 1i64..=3, -3i64..=3), 0..4)).prop_map(|(a, terms)| {
        let a = ValuedScalar::constant(a).with_order(6);
        let mut s = TruncSeries2::zero(Basis::standard(), 64);
        s.add_term(Covector::new(0, 0), a.clone());
        for (i, j, v, c) in terms {
            if (i, j) != (0, 0) {
                s.add_term(Covector::new(i, j), a.clone() * ValuedScalar::monomial(q(c, 1), v));
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn p_omega_is_multiplicative(f in small_unit(), g in small_unit()) {
        let origin = [q(0, 1), q(0, 1)];
        let fg = f.mul(&g).unwrap();
        let lhs = p_omega(&fg, &origin).unwrap();
        let rhs = p_omega(&f, &origin).unwrap() * p_omega(&g, &origin).unwrap();
        prop_assert!(lhs.agrees(&rhs), "{} vs {}", lhs, rhs);
    }
}

fn sl2() -> impl Strategy<Value = Mat2> {
    let gens: [Mat2; 4] = [[[1, 1], [0, 1]], [[1, -1], [0, 1]], [[0, -1], [1, 0]], [[0, 1], [-1, 0]]];
    prop::collection::vec(prop::sample::select(gens.to_vec()), 0..8).prop_map(|ms| {
        ms.iter().fold([[1, 0], [0, 1]], |acc, m| wallcross::affine::mat_mul(&acc, m))
    })
}

fn transition() -> impl Strategy<Value = AffineTransform> {
    (sl2(), rational(), rational()).prop_map(|(m, a, b)| AffineTransform::new(m, [a, b]).unwrap())
}

fn word() -> impl Strategy<Value = LiftedWord> {
    prop::collection::vec(prop::sample::select(vec![Letter::A2, Letter::A2Inv, Letter::A3, Letter::A3Inv]), 0..12)
        .prop_map(LiftedWord::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn monodromy_is_a_homomorphism(a in prop::collection::vec(transition(), 0..4), b in prop::collection::vec(transition(), 0..4)) {
        let (wa, wb) = (LoopWord::new(a), LoopWord::new(b));
        prop_assert_eq!(monodromy(&wa.then(&wb)), monodromy(&wa).compose(&monodromy(&wb)));
    }

    #[test]
    fn lift_projection_is_a_homomorphism(a in word(), b in word()) {
        let prod = wallcross::affine::mat_mul(&a.project(), &b.project());
        prop_assert_eq!(a.then(&b).project(), prod);
        prop_assert_eq!(i_homomorphism(&a.then(&b)), i_homomorphism(&a) + i_homomorphism(&b));
    }

    #[test]
    fn i_respects_the_relations(w in word(), g in word(), at in 0usize..12) {
        // a₂⁴ a₃⁻⁶ is trivial, and conjugation and free reduction change nothing
        let mut letters = w.letters.clone();
        let at = at.min(letters.len());
        let rel = [vec![Letter::A2; 4], vec![Letter::A3Inv; 6]].concat();
        letters.splice(at..at, rel);
        let with_rel = LiftedWord::new(letters);
        prop_assert_eq!(i_homomorphism(&with_rel), i_homomorphism(&w));
        prop_assert_eq!(with_rel.project(), w.project());
        let conj = g.then(&w).then(&g.inverse());
        prop_assert_eq!(i_homomorphism(&conj), i_homomorphism(&w));
        prop_assert_eq!(i_homomorphism(&w.free_reduce()), i_homomorphism(&w));
    }

    #[test]
    fn matrix_lift_projects_back(m in sl2(), winding in -2i64..=2) {
        let lift = matrix_to_lift(&m, winding);
        prop_assert_eq!(lift.project(), m);
        let base = matrix_to_lift(&m, 0);
        prop_assert_eq!(i_homomorphism(&lift) - i_homomorphism(&base), q(winding, 1));
    }

    #[test]
    fn focus_focus_loops_are_unipotent(n in 0u32..6) {
        let w = (0..n).fold(LoopWord::default(), |acc, _| acc.then(&focus_focus_loop()));
        prop_assert_eq!(monodromy(&w).linear, [[1, n as i64], [0, 1]]);
    }
}

fn diagram() -> &'static Diagram<Rational> {
    static D: OnceLock<Diagram<Rational>> = OnceLock::new();
    D.get_or_init(|| {
        let points = vec![
            SingularPoint::new([q(0, 1), q(0, 1)]),
            SingularPoint::with_alpha([q(-1, 1), q(1, 1)], Covector::DX),
            SingularPoint::with_alpha([q(3, 1), q(-1, 2)], Covector::new(-1, 1)),
        ];
        build(&Diagram::new(points, q(6, 1), 6, None).unwrap()).unwrap()
    })
}

fn near(c: (i64, i64)) -> impl Strategy<Value = Point> {
    (-150i64..=150, -150i64..=150).prop_map(move |(a, b)| [q(c.0, 1) + q(a, 101), q(c.1, 1) + q(b, 103)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transport_is_path_independent(a in near((0, 1)), b in near((0, 1)), m1 in near((0, 1)), m2 in near((0, 1))) {
        let d = diagram();
        let p = vec![a.clone(), m1, b.clone()];
        let r = vec![a, m2, b];
        match path_independent(d, &p, &r) {
            Ok(same) => prop_assert!(same),
            Err(
                ScatterError::NotHomotopic(_)
                | ScatterError::PathThroughVertex(_)
                | ScatterError::EndpointOnLine(_)
                | ScatterError::PathAlongLine(_)
                | ScatterError::NoCommonCone,
            ) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn wall_functions_have_unit_constant() {
    let w: WallFunction<Rational> = WallFunction::new(vec![q(2, 1)]);
    assert!(w.coeff(0).is_one());
}
