use std::sync::Arc;

use proptest::prelude::*;

use lnlab_core::algebroid::Algebroid;
use lnlab_core::forms::Multivector;
use lnlab_core::gder::{build_drt, FramedBundle};
use lnlab_core::lnb::{base_pn, check_lnb, deform_hierarchy, LnCandidate};
use lnlab_core::pn::{check_pn, PnCandidate};
use lnlab_core::sample::{self, Shape};
use lnlab_core::{Chart, Poly, VVForm};

fn plane() -> Arc<Chart> {
    Chart::new(["x", "y"]).unwrap()
}

fn pi0() -> Multivector {
    Multivector::bivector(2, [(0, 1, Poly::one(2))])
}

fn candidate(r: &VVForm) -> LnCandidate {
    let tm = FramedBundle::tangent(plane());
    let astar = Algebroid::cotangent_of_poisson(tm.dual(), &pi0()).unwrap();
    LnCandidate::new(
        Algebroid::tangent(tm.clone()),
        astar,
        build_drt(tm, r).unwrap(),
    )
    .unwrap()
}

fn random_r(seed: u64) -> VVForm {
    let mut g = sample::rng(seed);
    sample::endomorphism(
        &mut g,
        2,
        Shape {
            max_degree: 1,
            max_abs: 2,
            sparsity: 0.5,
        },
    )
}

/// `f id` is PN with the constant symplectic structure for every `f`.
fn scalar_r(seed: u64) -> VVForm {
    let mut g = sample::rng(seed);
    VVForm::scalar_endomorphism(
        2,
        &sample::poly(
            &mut g,
            2,
            Shape {
                max_degree: 1,
                max_abs: 2,
                sparsity: 0.0,
            },
        ),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lnb_on_tangent_matches_pn(seed in any::<u64>()) {
        for r in [random_r(seed), scalar_r(seed)] {
            let lnb = check_lnb(&candidate(&r)).unwrap().verdict();
            let pn = check_pn(&PnCandidate::new(plane(), pi0(), r).unwrap()).verdict();
            prop_assert_eq!(lnb, pn);
        }
    }

    #[test]
    fn lnb_is_symmetric_under_duality(seed in any::<u64>()) {
        let c = candidate(&random_r(seed));
        prop_assert_eq!(check_lnb(&c).unwrap().verdict(), check_lnb(&c.swapped()).unwrap().verdict());
    }

    #[test]
    fn passing_seeds_give_pn_bases_and_hierarchies(seed in any::<u64>()) {
        let c = candidate(&scalar_r(seed));
        prop_assert!(check_lnb(&c).unwrap().verdict());
        let (_, rep) = base_pn(&c).unwrap();
        prop_assert!(rep.verdict());
        let (members, rep) = deform_hierarchy(&c, 2).unwrap();
        prop_assert_eq!(members.len(), 3);
        prop_assert!(rep.verdict());
    }
}
