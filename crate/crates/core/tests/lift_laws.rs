use proptest::prelude::*;

use lnlab_core::gder::{build_drt, build_drtstar, FramedBundle, GenDer};
use lnlab_core::lifts::{
    cotangent_lift_oracle, delinearize, derivation_from_linear_fields, linear_field, linearize,
    tangent_lift, tangent_lift_oracle, verify_correspondence,
};
use lnlab_core::sample::{self, Shape};
use lnlab_core::{Chart, VVForm};

fn plane() -> std::sync::Arc<Chart> {
    Chart::new(["x", "y"]).unwrap()
}

fn shape() -> Shape {
    Shape {
        max_degree: 1,
        max_abs: 2,
        sparsity: 0.3,
    }
}

#[test]
fn correspondence_holds_for_random_derivations() {
    let e = FramedBundle::trivial(plane(), 2, "u", "phi");
    let mut g = sample::rng(3);
    for degree in [0, 1, 2] {
        for _ in 0..4 {
            let d = sample::gender(&mut g, &e, degree, shape());
            let k = linearize(&d).unwrap();
            assert!(verify_correspondence(&k, &d).unwrap().verdict());
            assert_eq!(delinearize(&k.total, &k.form).unwrap(), d);
        }
    }
}

#[test]
fn linearization_is_a_graded_lie_morphism() {
    let e = FramedBundle::trivial(plane(), 2, "u", "phi");
    let mut g = sample::rng(5);
    for (k1, k2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for _ in 0..3 {
            let d1 = sample::gender(&mut g, &e, k1, shape());
            let d2 = sample::gender(&mut g, &e, k2, shape());
            let lhs = linearize(&d1)
                .unwrap()
                .form
                .fn_bracket(&linearize(&d2).unwrap().form);
            let rhs = linearize(&d1.bracket(&d2).unwrap()).unwrap().form;
            assert_eq!(lhs, rhs, "degrees ({k1},{k2})");
        }
    }
}

#[test]
fn linear_forms_are_determined_by_linear_fields() {
    // generating family: lifts of coordinate derivations, xi^a d/dxi^b, d/dxi^a, and x-scaled copies
    let e = FramedBundle::trivial(plane(), 2, "u", "phi");
    let mut g = sample::rng(9);
    for _ in 0..4 {
        let d1 = sample::gender(&mut g, &e, 1, shape());
        let d2 = sample::gender(&mut g, &e, 1, shape());
        let (k1, k2) = (linearize(&d1).unwrap(), linearize(&d2).unwrap());
        let t = &k1.total;
        let mut family = Vec::new();
        for i in 0..2 {
            family.push(t.base_field(i));
            let mut xs = t.base_field(i);
            xs[i] = t.pull_poly(&lnlab_core::Poly::var(2, 0));
            family.push(xs);
        }
        for a in 0..2 {
            family.push(t.fiber_field(a));
            for b in 0..2 {
                let mut f = t.fiber_field(b);
                f[2 + b] = t.xi(a);
                family.push(f);
                let mut fx = t.fiber_field(b);
                fx[2 + b] = &t.xi(a) * &t.pull_poly(&lnlab_core::Poly::var(2, 1));
                family.push(fx);
            }
        }
        let agree = |a: &VVForm, b: &VVForm| family.iter().all(|u| a.apply(u) == b.apply(u));
        assert_eq!(agree(&k1.form, &k2.form), k1.form == k2.form);
        // perturb a single coefficient and confirm some family member sees it
        let mut bumped = k1.form.clone();
        bumped = &bumped + &VVForm::decomposable(&t.dxi(1), &t.base_field(0)).scale(&t.xi(0));
        assert!(!agree(&k1.form, &bumped));
    }
}

#[test]
fn derivation_of_evaluated_form_matches_symbol_formula() {
    let tm = FramedBundle::tangent(plane());
    let mut g = sample::rng(13);
    for _ in 0..4 {
        let d = sample::gender(&mut g, &tm, 1, shape());
        let k = linearize(&d).unwrap();
        let d1: GenDer = sample::gender(&mut g, &tm, 0, shape());
        let u1 = linear_field(&d1).unwrap();
        let du = derivation_from_linear_fields(&k.total, &k.form, &[u1]).unwrap();
        let x1 = d1.r().as_field();
        for a in 0..2 {
            let s = tm.unit(a);
            let expected = lnlab_core::forms::add_fields(
                &d.l_apply(&d1.apply(&s).unwrap().as_field()).as_field(),
                &d.apply_along(&x1, &s),
            );
            assert_eq!(du.apply(&s).unwrap().as_field(), expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lifts_match_decomposable_formulas(seed in any::<u64>()) {
        let mut g = sample::rng(seed);
        let r: VVForm = sample::endomorphism(&mut g, 2, shape());
        let k = tangent_lift(plane(), &r).unwrap();
        prop_assert_eq!(&k.form, &tangent_lift_oracle(&k.total, &r));
        let c = linearize(&build_drtstar(FramedBundle::cotangent(plane()), &r).unwrap()).unwrap();
        prop_assert_eq!(&c.form, &cotangent_lift_oracle(&c.total, &r).unwrap());
        let t = linearize(&build_drt(FramedBundle::tangent(plane()), &r).unwrap()).unwrap();
        prop_assert_eq!(t.form, k.form);
    }

    #[test]
    fn correspondence_and_graded_bracket(seed in any::<u64>(), k1 in 0usize..2, k2 in 0usize..2) {
        let e = FramedBundle::trivial(plane(), 2, "u", "phi");
        let mut g = sample::rng(seed);
        let d1 = sample::gender(&mut g, &e, k1, shape());
        let d2 = sample::gender(&mut g, &e, k2, shape());
        let l1 = linearize(&d1).unwrap();
        prop_assert!(verify_correspondence(&l1, &d1).unwrap().verdict());
        let lhs = l1.form.fn_bracket(&linearize(&d2).unwrap().form);
        prop_assert_eq!(lhs, linearize(&d1.bracket(&d2).unwrap()).unwrap().form);
    }
}
