use proptest::prelude::*;

use lnlab_core::forms::{Multivector, VVForm};
use lnlab_core::pn::{
    check_pn, concomitants, im_on_cotangent, kosmann_equivalence, mm1_identity, pn_via_im,
    PnCandidate,
};
use lnlab_core::sample::{self, Shape};
use lnlab_core::Chart;

fn candidate(seed: u64, dim: usize) -> PnCandidate {
    let chart = Chart::new(["x", "y", "z"].into_iter().take(dim)).unwrap();
    let mut g = sample::rng(seed);
    let s = Shape {
        max_degree: 1,
        max_abs: 2,
        sparsity: 0.4,
    };
    let pi: Multivector = sample::bivector(&mut g, dim, s);
    let r: VVForm = sample::endomorphism(&mut g, dim, s);
    PnCandidate::new(chart, pi, r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn c_and_r_are_dual(seed in any::<u64>()) {
        let c = concomitants(&candidate(seed, 3));
        prop_assert!(c.report.entry("C-R duality").unwrap().is_zero());
        let via_gder = c.report.entry("R via D^{r,T*}").unwrap().is_zero();
        prop_assert!(via_gder);
    }

    #[test]
    fn c_pairs_with_r_on_the_second_slot_when_self_adjoint(seed in any::<u64>()) {
        // f id is self-adjoint for every pi
        let base = candidate(seed, 3);
        let mut g = sample::rng(seed ^ 0x5eed);
        let f = sample::poly(&mut g, 3, Shape::default());
        let c = PnCandidate::new(base.chart.clone(), base.pi.clone(), VVForm::scalar_endomorphism(3, &f)).unwrap();
        let k = concomitants(&c);
        for a in 0..3 {
            for b in 0..3 {
                for i in 0..3 {
                    prop_assert_eq!(&k.c[a][b][i], &k.r_mm[a][i][b]);
                }
            }
        }
    }

    #[test]
    fn kosmann_agrees_on_random_planar_pairs(seed in any::<u64>()) {
        let k = kosmann_equivalence(&candidate(seed, 2)).unwrap();
        prop_assert!(k.entry("agreement").unwrap().is_zero());
    }

    #[test]
    fn im_on_cotangent_iff_compatible(seed in any::<u64>()) {
        let c = candidate(seed, 2);
        let conc = concomitants(&c);
        let compatible =
            conc.report.entry("C").unwrap().is_zero() && conc.report.entry("self-adjoint").unwrap().is_zero();
        prop_assert_eq!(im_on_cotangent(&c).unwrap().verdict(), compatible);
        let pn = check_pn(&c);
        prop_assert_eq!(pn.verdict(), compatible && pn.entry("torsion").unwrap().is_zero());
        prop_assert_eq!(pn_via_im(&c).unwrap().verdict(), pn.verdict());
    }

    #[test]
    fn mm1_holds(seed in any::<u64>(), dim in 2usize..4) {
        let c = candidate(seed, dim);
        let mut g = sample::rng(seed.wrapping_add(1));
        let x = sample::field(&mut g, dim, dim, Shape::default());
        prop_assert!(mm1_identity(&c, &x).unwrap().verdict());
    }
}
