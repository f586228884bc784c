//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lnlab::scene::{CheckSpec, Scene};
use lnlab::{catalog, parse_scene};
use lnlab_core::algebroid::check_bialgebroid;
use lnlab_core::forms::{nijenhuis_torsion, VVForm};
use lnlab_core::gder::{build_drt, build_drtstar, FramedBundle};
use lnlab_core::lifts::{
    cotangent_lift, cotangent_lift_oracle, tangent_lift, tangent_lift_oracle, verify_correspondence,
};
use lnlab_core::lnb::{base_pn, check_lnb, deform_hierarchy, LnCandidate};
use lnlab_core::pn::{check_pn, kosmann_equivalence, mm1_identity, pn_via_im, PnCandidate};
use lnlab_core::sample::{self, Shape};
use lnlab_core::{Chart, Multivector, Poly, Rational};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn plane() -> Arc<Chart> {
    Chart::new(["x", "y"]).unwrap()
}

fn space() -> Arc<Chart> {
    Chart::new(["x", "y", "z"]).unwrap()
}

fn linear() -> Shape {
    Shape {
        max_degree: 1,
        max_abs: 3,
        sparsity: 0.25,
    }
}

fn scene(name: &str) -> Scene {
    parse_scene(
        catalog::get(name).expect("shipped example"),
        Default::default(),
    )
    .expect("shipped example parses")
}

fn only_lnb(s: &Scene) -> LnCandidate {
    s.lnb
        .values()
        .next()
        .expect("scene defines an lnb candidate")
        .clone()
}

fn j2() -> VVForm {
    let m = 2;
    VVForm::endomorphism(&[
        vec![Poly::zero(m), Poly::integer(m, -1)],
        vec![Poly::one(m), Poly::zero(m)],
    ])
}

fn pi0() -> Multivector {
    Multivector::bivector(2, [(0, 1, Poly::one(2))])
}

fn duality() -> Outcome {
    let e = FramedBundle::trivial(plane(), 2, "u", "v");
    let mut g = sample::rng(1001);
    let mut n = 0;
    for degs in [(0, 0), (0, 1), (1, 1)] {
        for _ in 0..20 {
            let a = sample::gender(&mut g, &e, degs.0, linear());
            let b = sample::gender(&mut g, &e, degs.1, linear());
            if a.dual().dual() != a || b.dual().dual() != b {
                return fail(format!("dual o dual != id at pair {n} of degrees {degs:?}"));
            }
            let lhs = a.bracket(&b).unwrap().dual();
            let rhs = a.dual().bracket(&b.dual()).unwrap();
            if lhs != rhs {
                return fail(format!(
                    "dual does not preserve the bracket at pair {n} of degrees {degs:?}"
                ));
            }
            n += 1;
        }
    }
    pass(format!("{n} pairs"))
}

fn fn_monomorphism() -> Outcome {
    let tm = FramedBundle::tangent(plane());
    let mut g = sample::rng(2002);
    for i in 0..50 {
        let r1 = sample::endomorphism(&mut g, 2, linear());
        let r2 = sample::endomorphism(&mut g, 2, linear());
        let lhs = build_drt(tm.clone(), &r1)
            .unwrap()
            .bracket(&build_drt(tm.clone(), &r2).unwrap())
            .unwrap();
        let rhs = build_drt(tm.clone(), &r1.fn_bracket(&r2)).unwrap();
        if lhs != rhs {
            return fail(format!("pair {i}"));
        }
    }
    pass("50 pairs")
}

fn lifts() -> Outcome {
    let c = plane();
    let x = Poly::var(2, 0);
    let zero = Poly::zero(2);
    let n = VVForm::endomorphism(&[vec![zero.clone(), zero.clone()], vec![x.clone(), zero]]);
    let cases = [
        ("J2", j2()),
        ("x id", VVForm::scalar_endomorphism(2, &x)),
        ("x dx d/dy", n),
    ];
    for (name, r) in &cases {
        let kt = tangent_lift(c.clone(), r).unwrap();
        let dt = build_drt(FramedBundle::tangent(c.clone()), r).unwrap();
        if !verify_correspondence(&kt, &dt).unwrap().verdict() {
            return fail(format!("tangent correspondence for {name}"));
        }
        if kt.form != tangent_lift_oracle(&kt.total, r) {
            return fail(format!("tangent oracle for {name}"));
        }
        let kc = cotangent_lift(c.clone(), r).unwrap();
        let dc = build_drtstar(FramedBundle::cotangent(c.clone()), r).unwrap();
        if !verify_correspondence(&kc, &dc).unwrap().verdict() {
            return fail(format!("cotangent correspondence for {name}"));
        }
        if kc.form != cotangent_lift_oracle(&kc.total, r).unwrap() {
            return fail(format!("cotangent oracle for {name}"));
        }
    }
    pass("J2, x id, x dx d/dy on TM and T*M")
}

fn pn_verdicts(c: &PnCandidate) -> (bool, bool, bool) {
    (
        check_pn(c).verdict(),
        pn_via_im(c).unwrap().verdict(),
        kosmann_equivalence(c).unwrap().verdict(),
    )
}

fn pn_equivalences() -> Outcome {
    let c = plane();
    let x = Poly::var(2, 0);
    let corpus = [
        ("x id", VVForm::scalar_endomorphism(2, &x), true),
        ("J2", j2(), false),
        ("id", VVForm::identity(2), true),
        ("0", VVForm::zero(2, 1, 2), true),
    ];
    for (name, r, want) in corpus {
        let v = pn_verdicts(&PnCandidate::new(c.clone(), pi0(), r).unwrap());
        if v != (want, want, want) {
            return fail(format!("(pi0, {name}) gave {v:?}, expected all {want}"));
        }
    }
    let mut g = sample::rng(4004);
    let mut passing = 0;
    for i in 0..30 {
        let pi = sample::bivector(&mut g, 2, linear());
        // alternate generic r with scalar multiples of the identity
        let r = if i % 2 == 0 {
            sample::endomorphism(&mut g, 2, linear())
        } else {
            VVForm::scalar_endomorphism(2, &sample::poly(&mut g, 2, linear()))
        };
        let v = pn_verdicts(&PnCandidate::new(c.clone(), pi, r).unwrap());
        if v.0 != v.1 || v.0 != v.2 {
            return fail(format!("random pair {i} gave {v:?}"));
        }
        passing += v.0 as usize;
    }
    pass(format!("corpus of 4 and 30 random pairs ({passing} PN)"))
}

fn mm1() -> Outcome {
    let mut g = sample::rng(5005);
    let mut n = 0;
    for (chart, count) in [(plane(), 15), (space(), 15)] {
        let m = chart.dim();
        for _ in 0..count {
            let pi = sample::bivector(&mut g, m, linear());
            let r = sample::endomorphism(&mut g, m, linear());
            let x = sample::field(&mut g, m, m, linear());
            let c = PnCandidate::new(chart.clone(), pi, r).unwrap();
            if !mm1_identity(&c, &x).unwrap().verdict() {
                return fail(format!("triple {n} in dimension {m}"));
            }
            n += 1;
        }
    }
    pass(format!("{n} triples in dimensions 2 and 3"))
}

fn lnb_corpus() -> Outcome {
    for name in ["lnb-tangent-xid", "lnb-holomorphic-J2"] {
        let c = only_lnb(&scene(name));
        if !check_lnb(&c).unwrap().verdict() {
            return fail(format!("check_lnb fails on {name}"));
        }
        if !base_pn(&c).unwrap().1.verdict() {
            return fail(format!("base_pn fails on {name}"));
        }
        if !deform_hierarchy(&c, 2).unwrap().1.verdict() {
            return fail(format!("deform_hierarchy fails on {name}"));
        }
    }
    let bad = only_lnb(&scene("lnb-pi0-J2"));
    let r = check_lnb(&bad).unwrap();
    if r.verdict() {
        return fail("(TM, T*M_pi0, D^{J2,T}) passes");
    }
    let failing: Vec<&str> = r
        .subreports
        .iter()
        .filter(|s| !s.verdict())
        .map(|s| s.title.as_str())
        .collect();
    if failing != ["dual im"] || !r.entries.iter().all(|e| e.is_zero()) {
        return fail(format!(
            "failure not localized to the dual IM sub-report: {:?}",
            r.failures()
        ));
    }
    pass("two passing candidates, (pi0, J2) fails in dual im only")
}

fn bialgebroid_pair(s: &Scene) -> lnlab_core::Result<lnlab_core::report::CheckReport> {
    let spec = s
        .checks
        .iter()
        .find(|c| c.kind == "bialgebroid")
        .expect("scene has a bialgebroid check");
    match &spec.spec {
        CheckSpec::Bialgebroid(a, b) => check_bialgebroid(a, b),
        _ => unreachable!(),
    }
}

fn aff2() -> Outcome {
    if !bialgebroid_pair(&scene("bialgebra-aff2"))
        .unwrap()
        .verdict()
    {
        return fail("bialgebra-aff2 does not pass");
    }
    let r = bialgebroid_pair(&scene("bialgebra-aff2-perturbed")).unwrap();
    if r.verdict() {
        return fail(
            "perturbed cobracket delta(e1) = e1^e2, delta(e2) = 0 passes the cocycle check",
        );
    }
    let coc = r.entry("cocycle").unwrap();
    if coc.defect.is_empty() || !coc.defect.iter().all(|(l, _)| l.starts_with("(e1,e2)")) {
        return fail(format!("defect not confined to (e1,e2): {:?}", coc.defect));
    }
    pass("aff2 passes, perturbed variant fails on (e1,e2)")
}

fn torsion() -> Outcome {
    let half = Rational::new(1.into(), 2.into());
    let mut g = sample::rng(8008);
    let mut n = 0;
    for m in [2, 3] {
        for _ in 0..30 {
            let r = sample::endomorphism(
                &mut g,
                m,
                Shape {
                    max_degree: 2,
                    ..linear()
                },
            );
            let rhs = r.fn_bracket(&r).scale(&Poly::constant(m, half.clone()));
            if nijenhuis_torsion(&r) != rhs {
                return fail(format!("endomorphism {n} in dimension {m}"));
            }
            n += 1;
        }
    }
    pass(format!("{n} endomorphisms"))
}

fn table_run(name: &str) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lnlab"))
        .args(["examples", "run", name, "--format", "table"])
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 report"),
    )
}

fn without_timing(s: &str) -> String {
    s.lines()
        .filter(|l| l.split('\t').nth(2) != Some("time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli_corpus() -> Outcome {
    let mut n = 0;
    for name in catalog::names() {
        let (code1, first) = table_run(name);
        let (code2, second) = table_run(name);
        if code1 != code2 || without_timing(&first) != without_timing(&second) {
            return fail(format!("{name} is not deterministic"));
        }
        let all_pass = first
            .lines()
            .filter(|l| l.split('\t').nth(2) == Some("status"))
            .all(|l| l.ends_with("\tPASS"));
        if (code1 == 0) != all_pass {
            return fail(format!("{name} exited {code1} with all_pass = {all_pass}"));
        }
        n += 1;
    }
    pass(format!("{n} examples, each run twice"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 duality isomorphism", Duration::from_secs(60), duality),
        (
            "2 FN monomorphism",
            Duration::from_secs(30),
            fn_monomorphism,
        ),
        ("3 lifts", Duration::from_secs(30), lifts),
        (
            "4 PN equivalences",
            Duration::from_secs(60),
            pn_equivalences,
        ),
        ("5 MM1 identity", Duration::from_secs(60), mm1),
        (
            "6 Lie-Nijenhuis corpus",
            Duration::from_secs(60),
            lnb_corpus,
        ),
        ("7 bialgebroid checker", Duration::from_secs(5), aff2),
        ("8 torsion cross-check", Duration::from_secs(30), torsion),
        ("9 CLI corpus", Duration::from_secs(120), cli_corpus),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| fail("panicked"));
        let t = start.elapsed();
        let ok = out.ok && t <= budget;
        let timing = if t <= budget {
            String::new()
        } else {
            format!("; over budget {budget:?}")
        };
        println!(
            "{} criterion {name}: {} [{:.2} s]{timing}",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            t.as_secs_f64()
        );
        failed += !ok as usize;
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
