use proptest::prelude::*;

use nchopf::algebra::{Element, Pres, Presentation};
use nchopf::forms::{Calculus, Form};
use nchopf::hopf::{antipode, coproduct, counit};
use nchopf::scalars::Scalar;
use nchopf::split::{eval_clock_shift, sample_points, GENERIC_THETA};

const CASES: u32 = 200;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (prop_oneof![-4i64..=-1, 1i64..=4], -3i32..=3, 0usize..3).prop_map(|(c, k, r)| {
        let base = Scalar::int(c).mul(&Scalar::mu(k));
        match r {
            0 => base,
            1 => base.mul(&Scalar::sqrt(2)),
            _ => base.mul(&Scalar::i()),
        }
    })
}

fn element(pres: Pres, terms: usize, len: usize) -> impl Strategy<Value = Element> {
    let n = pres.ngens();
    prop::collection::vec((scalar(), prop::collection::vec(0..n, 0..=len)), 1..=terms)
        .prop_map(move |words| Element::from_words(pres, &words))
}

fn sphere() -> impl Strategy<Value = Pres> {
    prop_oneof![Just(Presentation::s7()), Just(Presentation::s4())]
}

fn any_pres() -> impl Strategy<Value = Pres> {
    prop_oneof![
        Just(Presentation::s7()),
        Just(Presentation::s4()),
        Just(Presentation::su2()),
        Just(Presentation::t2()),
    ]
}

fn triple(terms: usize, len: usize) -> impl Strategy<Value = (Element, Element, Element)> {
    any_pres().prop_flat_map(move |p| (element(p, terms, len), element(p, terms, len), element(p, terms, len)))
}

fn sphere_pair(terms: usize, len: usize) -> impl Strategy<Value = (Element, Element)> {
    sphere().prop_flat_map(move |p| (element(p, terms, len), element(p, terms, len)))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn scalar_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        prop_assert!(a.sub(&a).is_zero());
        let lhs = a.mul(&b).eval(GENERIC_THETA);
        let rhs = a.eval(GENERIC_THETA) * b.eval(GENERIC_THETA);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn algebra_ring_laws((a, b, c) in triple(3, 3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.mul(&Element::one(a.pres)), a.clone());
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn normal_form_is_a_homomorphism(p in any_pres(), word in prop::collection::vec(0usize..16, 0..=6), cut in 0usize..7) {
        let n = p.ngens();
        let word: Vec<usize> = word.into_iter().map(|g| g % n).collect();
        let whole = Element::from_words(p, &[(Scalar::one(), word.clone())]);
        let by_gens = word.iter().fold(Element::one(p), |acc, g| acc.mul(&Element::generator(p, *g)));
        prop_assert_eq!(&whole, &by_gens);
        let cut = cut.min(word.len());
        let left = Element::from_words(p, &[(Scalar::one(), word[..cut].to_vec())]);
        let right = Element::from_words(p, &[(Scalar::one(), word[cut..].to_vec())]);
        prop_assert_eq!(whole, left.mul(&right));
    }

    #[test]
    fn d_squared_vanishes(e in sphere().prop_flat_map(|p| element(p, 3, 3))) {
        prop_assert!(Form::d(&e, Calculus::Exterior).ext_d().unwrap().is_zero_mod_sphere().unwrap());
    }

    #[test]
    fn leibniz_rule((a, b) in sphere_pair(3, 2)) {
        for calc in [Calculus::FirstOrder, Calculus::Exterior] {
            let lhs = Form::d(&a.mul(&b), calc);
            let rhs = Form::d(&a, calc).rmul(&b).add(&Form::d(&b, calc).lmul(&a));
            prop_assert!(lhs.eq_mod_sphere(&rhs).unwrap());
        }
    }

    #[test]
    fn graded_leibniz_on_one_forms((a, b) in sphere_pair(2, 2), (c, e) in sphere_pair(2, 2)) {
        prop_assume!(std::ptr::eq(a.pres, c.pres));
        let omega = Form::d(&b, Calculus::Exterior).lmul(&a);
        let eta = Form::d(&e, Calculus::Exterior).lmul(&c);
        let lhs = omega.mul(&eta).ext_d().unwrap();
        let rhs = omega.ext_d().unwrap().mul(&eta).sub(&omega.mul(&eta.ext_d().unwrap()));
        prop_assert!(lhs.eq_mod_sphere(&rhs).unwrap());
    }

    #[test]
    fn involution_laws((a, b) in sphere_pair(3, 3)) {
        prop_assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        for calc in [Calculus::FirstOrder, Calculus::Exterior] {
            let da = Form::d(&a, calc);
            prop_assert!(da.adjoint().eq_mod_sphere(&Form::d(&a.adjoint(), calc)).unwrap());
            prop_assert_eq!(da.adjoint().adjoint(), da);
        }
    }

    #[test]
    fn hopf_structure_is_multiplicative(
        x in element(Presentation::su2(), 3, 2),
        y in element(Presentation::su2(), 3, 2),
    ) {
        prop_assert_eq!(coproduct(&x.mul(&y)), coproduct(&x).mul(&coproduct(&y)));
        prop_assert_eq!(counit(&x.mul(&y)), counit(&x).mul(&counit(&y)));
        prop_assert_eq!(antipode(&x.mul(&y)), antipode(&y).mul(&antipode(&x)));
        prop_assert_eq!(antipode(&antipode(&x).adjoint()).adjoint(), x);
    }

    #[test]
    fn exact_and_numeric_agree((a, b) in sphere_pair(3, 3), which in 0usize..6) {
        let pts = sample_points(a.pres, 6, 13).unwrap();
        let pt = &pts[which].point;
        let ab = eval_clock_shift(&a.mul(&b), pt).unwrap();
        let prod = eval_clock_shift(&a, pt).unwrap().mul(&eval_clock_shift(&b, pt).unwrap());
        prop_assert!(ab.max_abs_diff(&prod) <= 1e-9);
        let sum = eval_clock_shift(&a.add(&b), pt).unwrap();
        let mut parts = eval_clock_shift(&a, pt).unwrap();
        parts.add_scaled(&eval_clock_shift(&b, pt).unwrap(), num_complex::Complex64::new(1.0, 0.0));
        prop_assert!(sum.max_abs_diff(&parts) <= 1e-9);
    }
}
