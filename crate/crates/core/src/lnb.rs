//! Lie-Nijenhuis bialgebroids: verification, the induced PN pair on the base,
//! deformation hierarchies and holomorphic structures.

use crate::algebroid::{check_bialgebroid, check_im, Algebroid};
use crate::error::{Error, Result};
use crate::forms::{add_fields, coord_field, sharp_field, DiffForm, VectorField};
use crate::gder::GenDer;
use crate::pn::{bivector_from_sharp, check_pn, PnCandidate};
use crate::poly::{Poly, Rational};
use crate::report::{CheckReport, Defect};

/// `(A, A*, D)` with `D` of degree 1 on `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LnCandidate {
    pub a: Algebroid,
    pub astar: Algebroid,
    pub d: GenDer,
}

impl LnCandidate {
    pub fn new(a: Algebroid, astar: Algebroid, d: GenDer) -> Result<Self> {
        a.bundle().ensure_same(d.bundle())?;
        astar.bundle().ensure_same(&a.bundle().dual())?;
        if d.degree() != 1 {
            return Err(Error::DegreeMismatch(
                "expected a generalized derivation of degree 1".into(),
            ));
        }
        Ok(LnCandidate { a, astar, d })
    }

    /// `(A*, A, D^T)`.
    pub fn swapped(&self) -> LnCandidate {
        LnCandidate {
            a: self.astar.clone(),
            astar: self.a.clone(),
            d: self.d.dual(),
        }
    }

    fn l_on(&self, s: &[Poly]) -> VectorField {
        self.d.l_apply(s).as_field()
    }
}

fn require_bialgebroid(c: &LnCandidate) -> Result<()> {
    if !c.a.validate().verdict() || c.a.is_pre_lie_only() {
        return Err(Error::Precondition("A is not a Lie algebroid".into()));
    }
    if !c.astar.validate().verdict() || c.astar.is_pre_lie_only() {
        return Err(Error::Precondition("A* is not a Lie algebroid".into()));
    }
    if !check_bialgebroid(&c.a, &c.astar)?.verdict() {
        return Err(Error::Precondition(
            "(A, A*) is not a Lie bialgebroid".into(),
        ));
    }
    Ok(())
}

/// `[D, D] = 0`, component by component.
fn square_report(d: &GenDer) -> Result<CheckReport> {
    let sq = d.bracket(d)?;
    let bundle = d.bundle();
    let names = bundle.chart().names();
    let mut dd = Defect::new(names);
    for (a, v) in sq.d_on_frame().iter().enumerate() {
        dd.vvform(&format!("D({})", bundle.frame()[a]), bundle.frame(), v);
    }
    let mut ld = Defect::new(names);
    for (a, v) in sq.l_on_frame().iter().enumerate() {
        ld.vvform(&format!("l({})", bundle.frame()[a]), bundle.frame(), v);
    }
    let tangent: Vec<String> = names.iter().map(|n| format!("d/d{n}")).collect();
    let mut rd = Defect::new(names);
    rd.vvform("r", &tangent, sq.r());
    let mut report = CheckReport::new("[D,D]");
    report.push("D", "D-component of [D,D] = 0", dd);
    report.push("l", "l-component of [D,D] = 0", ld);
    report.push("r", "r-component of [D,D] = 0", rd);
    Ok(report)
}

pub fn check_lnb(c: &LnCandidate) -> Result<CheckReport> {
    require_bialgebroid(c)?;
    let mut report = CheckReport::new("lnb");
    let mut im = check_im(&c.a, &c.d)?;
    im.title = "im".into();
    let mut dual = check_im(&c.astar, &c.d.dual())?;
    dual.title = "dual im".into();
    report.sub(im);
    report.sub(dual);
    report.sub(square_report(&c.d)?);
    Ok(report)
}

fn lnb_report_or_failure(c: &LnCandidate, title: String) -> CheckReport {
    match check_lnb(c) {
        Ok(mut r) => {
            r.title = title;
            r
        }
        Err(e) => {
            let mut r = CheckReport::new(title);
            let mut d = Defect::new(c.a.bundle().chart().names());
            d.flag("precondition", e.to_string());
            r.push("inputs", "member is a Lie bialgebroid", d);
            r
        }
    }
}

/// `pi# = rho_* o rho^*` and `r` from the symbol of `D`.
pub fn base_pn(c: &LnCandidate) -> Result<(PnCandidate, CheckReport)> {
    if !check_lnb(c)?.verdict() {
        return Err(Error::Precondition(
            "candidate is not a Lie-Nijenhuis bialgebroid".into(),
        ));
    }
    let chart = c.a.bundle().chart().clone();
    let m = chart.dim();
    let sharp = |alpha: &DiffForm| -> VectorField {
        let mut out = vec![Poly::zero(m); m];
        for (a, rho_a) in c.a.anchor().iter().enumerate() {
            let coeff = alpha.interior(rho_a).as_function();
            if !coeff.is_zero() {
                out = add_fields(
                    &out,
                    &c.astar.anchor()[a]
                        .iter()
                        .map(|p| p * &coeff)
                        .collect::<Vec<_>>(),
                );
            }
        }
        out
    };
    let pi = bivector_from_sharp(m, &sharp);
    let mut skew = Defect::new(chart.names());
    for i in 0..m {
        let dxi = DiffForm::dx(m, i);
        let v: VectorField = sharp(&dxi)
            .iter()
            .zip(sharp_field(&pi, &dxi))
            .map(|(a, b)| a - &b)
            .collect();
        skew.section(&format!("(d{})", chart.names()[i]), chart.names(), &v);
    }
    let cand = PnCandidate::new(chart, pi, c.d.r().clone())?;
    let mut report = check_pn(&cand);
    report.title = "base pn".into();
    report.push("skew", "rho_* o rho^* is skew", skew);
    report.fact("pi", cand.pi.render(cand.chart.names()));
    Ok((cand, report))
}

fn nijenhuis_defect(a: &Algebroid, n_map: &[VectorField], defect: &mut Defect, prefix: &str) {
    let rank = a.rank();
    let apply = |s: &[Poly]| -> VectorField {
        let mut out = vec![Poly::zero(a.dim()); rank];
        for (b, sb) in s.iter().enumerate() {
            out = add_fields(&out, &n_map[b].iter().map(|p| p * sb).collect::<Vec<_>>());
        }
        out
    };
    let frame = a.bundle().frame();
    for i in 0..rank {
        for j in i + 1..rank {
            let (ei, ej) = (a.unit(i), a.unit(j));
            let inner = add_fields(&a.bracket(&n_map[i], &ej), &a.bracket(&ei, &n_map[j]));
            let inner: VectorField = inner
                .iter()
                .zip(apply(a.structure(i, j)))
                .map(|(x, y)| x - &y)
                .collect();
            let v: VectorField = a
                .bracket(&n_map[i], &n_map[j])
                .iter()
                .zip(apply(&inner))
                .map(|(x, y)| x - &y)
                .collect();
            defect.section(&format!("{prefix}({},{})", frame[i], frame[j]), frame, &v);
        }
    }
}

fn power_map(base: &[VectorField], k: usize, rank: usize, nvars: usize) -> Vec<VectorField> {
    let mut cur: Vec<VectorField> = (0..rank)
        .map(|a| {
            (0..rank)
                .map(|b| {
                    if a == b {
                        Poly::one(nvars)
                    } else {
                        Poly::zero(nvars)
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..k {
        cur = cur
            .iter()
            .map(|s| {
                let mut out = vec![Poly::zero(nvars); rank];
                for (b, sb) in s.iter().enumerate() {
                    out = add_fields(&out, &base[b].iter().map(|p| p * sb).collect::<Vec<_>>());
                }
                out
            })
            .collect();
    }
    cur
}

/// `(A_l, A*, D)` and `(A, A*_{(l*)^i}, D)` for `i = 1..depth`, each re-verified.
pub fn deform_hierarchy(c: &LnCandidate, depth: usize) -> Result<(Vec<LnCandidate>, CheckReport)> {
    if depth < 1 {
        return Err(Error::Precondition(
            "hierarchy depth must be at least 1".into(),
        ));
    }
    if !check_lnb(c)?.verdict() {
        return Err(Error::Precondition(
            "seed is not a Lie-Nijenhuis bialgebroid".into(),
        ));
    }
    let (rank, m) = (c.a.rank(), c.a.dim());
    let names = c.a.bundle().chart().names();
    let l_map: Vec<VectorField> = (0..rank).map(|a| c.l_on(&c.a.unit(a))).collect();
    let dual = c.d.dual();
    let lstar_map: Vec<VectorField> = (0..rank)
        .map(|a| dual.l_apply(&c.astar.unit(a)).as_field())
        .collect();

    let mut report = CheckReport::new("hierarchy");
    let mut nt = Defect::new(names);
    nijenhuis_defect(&c.a, &l_map, &mut nt, "N_l");
    nijenhuis_defect(&c.astar, &lstar_map, &mut nt, "N_l*");
    report.push("torsion", "N_l = 0 and N_l* = 0", nt);

    let mut members = Vec::new();
    let al = c.a.deform(&l_map);
    let frame = c.a.bundle().frame();
    for i in 0..rank {
        for j in i + 1..rank {
            let b = al.structure(i, j);
            if b.iter().any(|p| !p.is_zero()) {
                let rendered: Vec<String> = b
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(k, p)| format!("({}) {}", p.render(names), frame[k]))
                    .collect();
                report.fact(
                    format!("[{},{}]_l", frame[i], frame[j]),
                    rendered.join(" + "),
                );
            }
        }
    }
    members.push(LnCandidate {
        a: al,
        astar: c.astar.clone(),
        d: c.d.clone(),
    });
    for k in 1..=depth {
        let nk = power_map(&lstar_map, k, rank, m);
        members.push(LnCandidate {
            a: c.a.clone(),
            astar: c.astar.deform(&nk),
            d: c.d.clone(),
        });
    }
    for (idx, mem) in members.iter().enumerate() {
        let title = if idx == 0 {
            "(A_l, A*)".to_string()
        } else {
            format!("(A, A*_(l*)^{idx})")
        };
        report.sub(lnb_report_or_failure(mem, title));
    }
    Ok((members, report))
}

fn endo_square_defect(
    apply: &dyn Fn(&[Poly]) -> VectorField,
    rank: usize,
    nvars: usize,
) -> Vec<VectorField> {
    (0..rank)
        .map(|a| {
            let e: VectorField = (0..rank)
                .map(|b| {
                    if a == b {
                        Poly::one(nvars)
                    } else {
                        Poly::zero(nvars)
                    }
                })
                .collect();
            add_fields(&apply(&apply(&e)), &e)
        })
        .collect()
}

/// `r^2 = -id`, `l^2 = -id` and `D_{rX} + l o D_X = 0`.
pub fn holomorphic_detect(c: &LnCandidate) -> Result<CheckReport> {
    if !check_lnb(c)?.verdict() {
        return Err(Error::Precondition(
            "candidate is not a Lie-Nijenhuis bialgebroid".into(),
        ));
    }
    let m = c.a.dim();
    let rank = c.a.rank();
    let names = c.a.bundle().chart().names();
    let frame = c.a.bundle().frame();
    let r = c.d.r();
    let mut rd = Defect::new(names);
    for (j, v) in endo_square_defect(&|s| r.apply(s), m, m).iter().enumerate() {
        rd.section(&format!("(d/d{})", names[j]), names, v);
    }
    let mut ld = Defect::new(names);
    for (a, v) in endo_square_defect(&|s| c.l_on(s), rank, m)
        .iter()
        .enumerate()
    {
        ld.section(&format!("({})", frame[a]), frame, v);
    }
    let mut dd = Defect::new(names);
    for a in 0..rank {
        let u = c.a.unit(a);
        for i in 0..m {
            let x = coord_field(m, i);
            let v = add_fields(
                &c.d.apply_along(&r.apply(&x), &u),
                &c.l_on(&c.d.apply_along(&x, &u)),
            );
            dd.section(&format!("({}, d/d{})", frame[a], names[i]), frame, &v);
        }
    }
    let mut report = CheckReport::new("holomorphic");
    report.push("r^2", "r^2 = -id", rd);
    report.push("l^2", "l^2 = -id", ld);
    report.push("dolbeault", "D_{rX}(u) + l(D_X(u)) = 0", dd);
    let verdict = report.verdict();
    report.fact("holomorphic", if verdict { "yes" } else { "no" });
    Ok(report)
}

/// `T = diag(l, -l*)` on `A + A*`, for `l^2 = lambda id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantOperator {
    pub lambda: Rational,
    /// `block[i][j]` = component `i` of `T(e_j)` in the frame `(e, eps)`.
    pub block: Vec<Vec<Poly>>,
}

pub fn courant_operator(c: &LnCandidate) -> Result<CourantOperator> {
    if !check_lnb(c)?.verdict() {
        return Err(Error::Precondition(
            "candidate is not a Lie-Nijenhuis bialgebroid".into(),
        ));
    }
    let (rank, m) = (c.a.rank(), c.a.dim());
    let not_scalar = || Error::Precondition("l^2 is not a scalar multiple of the identity".into());
    let squares: Vec<VectorField> = (0..rank).map(|a| c.l_on(&c.l_on(&c.a.unit(a)))).collect();
    let lambda = match squares.first() {
        Some(sq) => sq[0].as_constant().ok_or_else(not_scalar)?,
        None => Rational::from_integer(0.into()),
    };
    for (a, sq) in squares.iter().enumerate() {
        for (b, p) in sq.iter().enumerate() {
            let want = if a == b {
                Poly::constant(m, lambda.clone())
            } else {
                Poly::zero(m)
            };
            if *p != want {
                return Err(not_scalar());
            }
        }
    }
    let dual = c.d.dual();
    let mut block = vec![vec![Poly::zero(m); 2 * rank]; 2 * rank];
    for j in 0..rank {
        for (i, p) in c.l_on(&c.a.unit(j)).into_iter().enumerate() {
            block[i][j] = p;
        }
        for (i, p) in dual
            .l_apply(&c.astar.unit(j))
            .as_field()
            .into_iter()
            .enumerate()
        {
            block[rank + i][rank + j] = -&p;
        }
    }
    Ok(CourantOperator { lambda, block })
}
