//! Executing a scene's checks and collecting a [`Report`].

use std::panic::{self, AssertUnwindSafe};
use std::sync::Once;
use std::time::{Duration, Instant};

use lnlab_core::algebroid::{check_bialgebroid, check_im};
use lnlab_core::forms::{nijenhuis_torsion, VVForm};
use lnlab_core::lifts::{
    check_linearity, cotangent_lift_oracle, linearize, tangent_lift_oracle, verify_correspondence,
};
use lnlab_core::lnb::{base_pn, check_lnb, courant_operator, deform_hierarchy, holomorphic_detect};
use lnlab_core::pn::{
    check_pn, concomitants, hierarchy, im_on_cotangent, kosmann_equivalence, mm1_identity,
    pn_via_im, PnCandidate,
};
use lnlab_core::poly::ResourceExceeded;
use lnlab_core::report::{CheckReport, Defect};
use lnlab_core::{sample, Chart, Limits, Poly, Rational};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::scene::{CheckSpec, GderObject, GderOrigin, Scene};

pub const ENGINE_VERSION: &str = concat!("lnlab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
    Resource,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
            Status::Resource => "RESOURCE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub report: Option<CheckReport>,
    /// Set for `Error` and `Resource` outcomes.
    pub message: Option<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub engine: String,
    /// Hex sha256 of the scene source.
    pub digest: String,
    pub title: Option<String>,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// 0 all pass, 3 any resource bound hit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Resource) {
            3
        } else if self.passed() {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub limits: Limits,
    /// Overrides the seed of every randomized check.
    pub seed: Option<u64>,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            limits: Limits::default(),
            seed: None,
            parallel: true,
        }
    }
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Keep resource-bound unwinds off stderr; they are reported per check.
pub fn install_quiet_hook() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        let prev = panic::take_hook();
        panic::set_hook(Box::new(move |info| {
            if info.payload().downcast_ref::<ResourceExceeded>().is_none() {
                prev(info);
            }
        }));
    });
}

pub fn run(scene: &Scene, opts: &RunOptions) -> Report {
    install_quiet_hook();
    let one = |i: usize| {
        let check = &scene.checks[i];
        let start = Instant::now();
        let out = panic::catch_unwind(AssertUnwindSafe(|| {
            lnlab_core::poly::with_limits(opts.limits, || {
                execute(&scene.chart, &check.spec, opts.seed)
            })
        }));
        let elapsed = start.elapsed();
        let (status, report, message) = match out {
            Ok(Ok(r)) => (
                if r.verdict() {
                    Status::Pass
                } else {
                    Status::Fail
                },
                Some(r),
                None,
            ),
            Ok(Err(e)) => (Status::Error, None, Some(e.to_string())),
            Err(payload) => match payload.downcast::<ResourceExceeded>() {
                Ok(re) => (Status::Resource, None, Some(re.what)),
                Err(other) => {
                    let msg = other
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| other.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "unknown panic".into());
                    (Status::Error, None, Some(format!("internal error: {msg}")))
                }
            },
        };
        CheckOutcome {
            name: check.name.clone(),
            kind: check.kind.clone(),
            status,
            report,
            message,
            elapsed,
        }
    };
    let checks = if opts.parallel {
        (0..scene.checks.len()).into_par_iter().map(one).collect()
    } else {
        (0..scene.checks.len()).map(one).collect()
    };
    Report {
        engine: ENGINE_VERSION.into(),
        digest: digest(&scene.source),
        title: scene.title.clone(),
        checks,
    }
}

fn execute(
    chart: &std::sync::Arc<Chart>,
    spec: &CheckSpec,
    seed: Option<u64>,
) -> lnlab_core::Result<CheckReport> {
    match spec {
        CheckSpec::Validate(a) => Ok(a.validate()),
        CheckSpec::Bialgebroid(a, b) => check_bialgebroid(a, b),
        CheckSpec::Im(a, d) => check_im(a, d),
        CheckSpec::Torsion(r) => Ok(torsion_report(chart, r)),
        CheckSpec::Pn(c) => Ok(check_pn(c)),
        CheckSpec::Concomitants(c) => Ok(concomitants(c).report),
        CheckSpec::Kosmann(c) => kosmann_equivalence(c),
        CheckSpec::ImCotangent(c) => im_on_cotangent(c),
        CheckSpec::PnViaIm(c) => pn_via_im(c),
        CheckSpec::Hierarchy(c, depth) => Ok(hierarchy(c, *depth)?.1),
        CheckSpec::Mm1(c, x) => mm1_identity(c, x),
        CheckSpec::Mm1Random { samples, seed: s } => {
            mm1_random(chart, *samples, seed.unwrap_or(*s))
        }
        CheckSpec::Lnb(c) => check_lnb(c),
        CheckSpec::BasePn(c) => Ok(base_pn(c)?.1),
        CheckSpec::DeformHierarchy(c, depth) => Ok(deform_hierarchy(c, *depth)?.1),
        CheckSpec::Holomorphic(c) => holomorphic_detect(c),
        CheckSpec::Courant(c) => {
            let op = courant_operator(c)?;
            let mut report = CheckReport::new("courant");
            report.fact("lambda", op.lambda.to_string());
            let names = c.a.bundle().chart().names();
            let mut frame: Vec<String> = c.a.bundle().frame().to_vec();
            frame.extend(c.a.bundle().dual_frame().iter().cloned());
            for (j, col) in frame.iter().enumerate() {
                let image: Vec<String> = op.block.iter().map(|row| row[j].render(names)).collect();
                report.fact(format!("T({col})"), format!("({})", image.join(", ")));
            }
            Ok(report)
        }
        CheckSpec::Lift(g) => lift_report(g),
    }
}

fn torsion_report(chart: &Chart, r: &VVForm) -> CheckReport {
    let names = chart.names();
    let values: Vec<String> = names.iter().map(|n| format!("d/d{n}")).collect();
    let n = nijenhuis_torsion(r);
    let half = Poly::constant(chart.dim(), Rational::new(1.into(), 2.into()));
    let mut report = CheckReport::new("torsion");
    report.fact("N_r", n.render(names, &values));
    let mut d = Defect::new(names);
    d.vvform(
        "N_r - [r,r]/2",
        &values,
        &(&n - &r.fn_bracket(r).scale(&half)),
    );
    report.push("frolicher-nijenhuis", "N_r = [r,r]_FN / 2", d);
    let mut z = Defect::new(names);
    z.vvform("N_r", &values, &n);
    report.push_evidence("nijenhuis", "N_r = 0", z);
    report
}

fn mm1_random(
    chart: &std::sync::Arc<Chart>,
    samples: usize,
    seed: u64,
) -> lnlab_core::Result<CheckReport> {
    let m = chart.dim();
    let mut rng = sample::rng(seed);
    let shape = sample::Shape::default();
    let mut report = CheckReport::new("mm1 random");
    report.fact("seed", seed.to_string());
    report.fact("samples", samples.to_string());
    for i in 0..samples {
        let pi = sample::bivector(&mut rng, m, shape);
        let r = sample::endomorphism(&mut rng, m, shape);
        let x = sample::field(&mut rng, m, m, shape);
        let c = PnCandidate::new(chart.clone(), pi, r)?;
        let mut sub = mm1_identity(&c, &x)?;
        sub.title = format!("sample {i}");
        report.sub(sub);
    }
    Ok(report)
}

fn lift_report(g: &GderObject) -> lnlab_core::Result<CheckReport> {
    let k = linearize(&g.der)?;
    let mut report = CheckReport::new("lift");
    report.fact("chart", k.total.chart().names().join(" "));
    report.fact("K", k.render());
    report.sub(verify_correspondence(&k, &g.der)?);
    report.sub(check_linearity(&k.total, &k.form)?);
    let oracle = match &g.origin {
        GderOrigin::Tangent(r) => Some(tangent_lift_oracle(&k.total, r)),
        GderOrigin::Cotangent(r) => Some(cotangent_lift_oracle(&k.total, r)?),
        GderOrigin::Other => None,
    };
    if let Some(o) = oracle {
        let names = k.total.chart().names();
        let values: Vec<String> = names.iter().map(|n| format!("d/d{n}")).collect();
        let mut d = Defect::new(names);
        d.vvform("K - oracle", &values, &(&k.form - &o));
        report.push("oracle", "K equals the decomposable lift formula", d);
    }
    Ok(report)
}
