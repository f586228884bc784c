//! Poisson-Nijenhuis pairs: concomitants, the PN check, the bialgebroid
//! characterization and the hierarchy of compatible bivectors.

use std::sync::Arc;

use crate::algebroid::{bialgebroid_report, check_im, drt_along, Algebroid};
use crate::error::{Error, Result};
use crate::forms::{
    coord_field, nijenhuis_torsion, one_form, one_form_coeffs, sharp_field, sub_fields, DiffForm,
    Multivector, VVForm, VectorField,
};
use crate::gder::{build_drt, build_drtstar, FramedBundle};
use crate::poly::{Chart, Poly};
use crate::report::{CheckReport, Defect};

/// A bivector and a tangent-valued 1-form on the same chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PnCandidate {
    pub chart: Arc<Chart>,
    pub pi: Multivector,
    pub r: VVForm,
}

impl PnCandidate {
    pub fn new(chart: Arc<Chart>, pi: Multivector, r: VVForm) -> Result<Self> {
        let m = chart.dim();
        if pi.dim() != m || r.dim() != m {
            return Err(Error::ChartMismatch(
                "bivector and endomorphism must live on the given chart".into(),
            ));
        }
        if pi.degree() != 2 {
            return Err(Error::DegreeMismatch("expected a bivector".into()));
        }
        if r.degree() != 1 || r.rank() != m {
            return Err(Error::DegreeMismatch(
                "expected a tangent-valued 1-form".into(),
            ));
        }
        Ok(PnCandidate { chart, pi, r })
    }

    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn names(&self) -> &[String] {
        self.chart.names()
    }

    fn coframe(&self) -> Vec<DiffForm> {
        (0..self.dim())
            .map(|a| DiffForm::dx(self.dim(), a))
            .collect()
    }
}

/// `[a, b]_B = L_{B# a} b - i_{B# b} da` for a (possibly non-skew) sharp map.
pub fn form_bracket(
    sharp: &dyn Fn(&DiffForm) -> VectorField,
    a: &DiffForm,
    b: &DiffForm,
) -> DiffForm {
    &b.lie(&sharp(a)) - &a.d().interior(&sharp(b))
}

/// Bivector with `B(dx_i, dx_j)` read from a sharp map above the diagonal.
pub fn bivector_from_sharp(dim: usize, sharp: &dyn Fn(&DiffForm) -> VectorField) -> Multivector {
    let mut entries = Vec::new();
    for i in 0..dim {
        let v = sharp(&DiffForm::dx(dim, i));
        for (j, c) in v.into_iter().enumerate().skip(i + 1) {
            entries.push((i, j, c));
        }
    }
    Multivector::bivector(dim, entries)
}

/// Concomitant `C(a,b) = [a,b]_{pi_r} - [r*a,b]_pi - [a,r*b]_pi + r*[a,b]_pi`.
pub fn concomitant(pi: &Multivector, r: &VVForm, a: &DiffForm, b: &DiffForm) -> DiffForm {
    let pis = |x: &DiffForm| sharp_field(pi, x);
    let pirs = |x: &DiffForm| r.apply(&sharp_field(pi, x));
    let t1 = form_bracket(&pirs, a, b);
    let t2 = form_bracket(&pis, &r.pullback_1form(a), b);
    let t3 = form_bracket(&pis, a, &r.pullback_1form(b));
    let t4 = r.pullback_1form(&form_bracket(&pis, a, b));
    &(&(&t1 - &t2) - &t3) + &t4
}

/// Magri-Morosi concomitant `R(a, X) = pi#(L_X r*a - L_{rX} a) - [pi# a, r](X)`.
pub fn magri_morosi(pi: &Multivector, r: &VVForm, a: &DiffForm, x: &[Poly]) -> VectorField {
    let inner = &r.pullback_1form(a).lie(x) - &a.lie(&r.apply(x));
    sub_fields(
        &sharp_field(pi, &inner),
        &drt_along(r, x, &sharp_field(pi, a)),
    )
}

/// Self-adjointness defect `r o pi# - pi# o r*`, one vector per coframe element.
pub fn selfadjoint_defect(pi: &Multivector, r: &VVForm) -> Vec<VectorField> {
    let m = pi.dim();
    (0..m)
        .map(|a| {
            let dxa = DiffForm::dx(m, a);
            sub_fields(
                &r.apply(&sharp_field(pi, &dxa)),
                &sharp_field(pi, &r.pullback_1form(&dxa)),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concomitants {
    /// Present when `r o pi# = pi# o r*`.
    pub pi_r: Option<Multivector>,
    /// `composite[a] = r(pi#(dx_a))`.
    pub composite: Vec<VectorField>,
    /// `c[a][b]` = coefficients of `C(dx_a, dx_b)`.
    pub c: Vec<Vec<Vec<Poly>>>,
    /// `r_mm[a][i] = R(dx_a, d/dx_i)`.
    pub r_mm: Vec<Vec<VectorField>>,
    pub selfadj: Vec<VectorField>,
    pub report: CheckReport,
}

pub fn concomitants(c: &PnCandidate) -> Concomitants {
    let m = c.dim();
    let names = c.names();
    let (pi, r) = (&c.pi, &c.r);
    let coframe = c.coframe();
    let selfadj = selfadjoint_defect(pi, r);
    let is_selfadj = selfadj.iter().flatten().all(Poly::is_zero);
    let composite: Vec<VectorField> = coframe
        .iter()
        .map(|a| r.apply(&sharp_field(pi, a)))
        .collect();
    let pi_r = is_selfadj.then(|| bivector_from_sharp(m, &|a| r.apply(&sharp_field(pi, a))));
    let ctab: Vec<Vec<Vec<Poly>>> = coframe
        .iter()
        .map(|a| {
            coframe
                .iter()
                .map(|b| one_form_coeffs(&concomitant(pi, r, a, b)))
                .collect()
        })
        .collect();
    let rtab: Vec<Vec<VectorField>> = coframe
        .iter()
        .map(|a| {
            (0..m)
                .map(|i| magri_morosi(pi, r, a, &coord_field(m, i)))
                .collect()
        })
        .collect();

    let mut report = CheckReport::new("concomitants");
    if let Some(p) = &pi_r {
        report.fact("pi_r", p.render(names));
    }
    let mut sd = Defect::new(names);
    for (a, v) in selfadj.iter().enumerate() {
        sd.section(&format!("(d{})", names[a]), names, v);
    }
    report.push("self-adjoint", "r o pi# = pi# o r*", sd);
    let mut cd = Defect::new(names);
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                cd.poly(
                    format!("C(d{},d{}) [d{}]", names[a], names[b], names[i]),
                    &ctab[a][b][i],
                );
            }
        }
    }
    report.push("C", "concomitant vanishes", cd);
    let mut rd = Defect::new(names);
    for a in 0..m {
        for i in 0..m {
            rd.section(
                &format!("R(d{}, d/d{})", names[a], names[i]),
                names,
                &rtab[a][i],
            );
        }
    }
    report.push("R", "Magri-Morosi concomitant vanishes", rd);

    let mut dual = Defect::new(names);
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                let v = &ctab[a][b][i] + &rtab[b][i][a];
                dual.poly(format!("(d{},d{},d/d{})", names[a], names[b], names[i]), &v);
            }
        }
    }
    report.push_evidence("C-R duality", "<C(a,b),X> = -<a,R(b,X)>", dual);

    // R through the generalized derivations D^{r,T*} and D^{r,T}
    let mut alt = Defect::new(names);
    if let (Ok(dts), Ok(dt)) = (
        build_drtstar(FramedBundle::cotangent(c.chart.clone()), r),
        build_drt(FramedBundle::tangent(c.chart.clone()), r),
    ) {
        for a in 0..m {
            for i in 0..m {
                let x = coord_field(m, i);
                let lhs = sharp_field(
                    pi,
                    &one_form(&dts.apply_along(&x, &one_form_coeffs(&coframe[a]))),
                );
                let rhs = dt.apply_along(&x, &sharp_field(pi, &coframe[a]));
                let v = sub_fields(&sub_fields(&lhs, &rhs), &rtab[a][i]);
                alt.section(&format!("(d{}, d/d{})", names[a], names[i]), names, &v);
            }
        }
    }
    report.push(
        "R via D^{r,T*}",
        "R(a,X) = pi#(D^{r,T*}_X a) - D^{r,T}_X(pi# a)",
        alt,
    );

    Concomitants {
        pi_r,
        composite,
        c: ctab,
        r_mm: rtab,
        selfadj,
        report,
    }
}

pub fn check_pn(c: &PnCandidate) -> CheckReport {
    let names = c.names();
    let mut report = CheckReport::new("pn");
    let mut pd = Defect::new(names);
    pd.multivector("[pi,pi]", &c.pi.schouten(&c.pi));
    report.push("poisson", "[pi, pi] = 0", pd);
    let conc = concomitants(c);
    report
        .entries
        .push(conc.report.entry("self-adjoint").expect("present").clone());
    report
        .entries
        .push(conc.report.entry("C").expect("present").clone());
    let mut nd = Defect::new(names);
    nd.vvform("N_r", names, &nijenhuis_torsion(&c.r));
    report.push("torsion", "N_r = 0", nd);
    if let Some(p) = &conc.pi_r {
        report.fact("pi_r", p.render(names));
        let mut e = Defect::new(names);
        e.multivector("[pi_r,pi_r]", &p.schouten(p));
        report.push_evidence("pi_r poisson", "[pi_r, pi_r] = 0", e);
    }
    report
}

/// `TM_r`: anchor `r` and bracket `[X,Y]_r = [rX,Y] + [X,rY] - r[X,Y]`.
pub fn tangent_deformed(chart: Arc<Chart>, r: &VVForm) -> Algebroid {
    let m = chart.dim();
    let tm = Algebroid::tangent(FramedBundle::tangent(chart));
    let cols: Vec<VectorField> = (0..m).map(|a| r.apply(&coord_field(m, a))).collect();
    tm.deform(&cols)
}

/// PN check alongside the bialgebroid criterion for `(TM_r, T*M_pi)`; the
/// verdicts are required to agree.
pub fn kosmann_equivalence(c: &PnCandidate) -> Result<CheckReport> {
    if !c.pi.schouten(&c.pi).is_zero() {
        return Err(Error::Precondition("pi is not Poisson".into()));
    }
    let pn = check_pn(c);
    let tmr = tangent_deformed(c.chart.clone(), &c.r);
    let tstar = Algebroid::cotangent_of_poisson(FramedBundle::cotangent(c.chart.clone()), &c.pi)?;
    let mut v = tmr.validate();
    v.title = "TM_r".into();
    let mut fwd = bialgebroid_report(&tmr, &tstar);
    fwd.title = "(TM_r, T*M_pi)".into();
    let mut rev = bialgebroid_report(&tstar, &tmr);
    rev.title = "(T*M_pi, TM_r)".into();
    let bialg = v.verdict() && fwd.verdict() && rev.verdict();
    let pn_ok = pn.verdict();
    let mut report = CheckReport::new("kosmann");
    report.fact("pn verdict", if pn_ok { "pass" } else { "fail" });
    report.fact("bialgebroid verdict", if bialg { "pass" } else { "fail" });
    let mut ag = Defect::new(c.names());
    if bialg != pn_ok {
        ag.flag("verdicts", format!("pn = {pn_ok}, bialgebroid = {bialg}"));
    }
    report.push("agreement", "PN <=> (TM_r, T*M_pi) Lie bialgebroid", ag);
    report.sub(pn);
    report.sub(v);
    report.sub(fwd);
    report.sub(rev);
    Ok(report)
}

/// `L_X C^r_pi = C^r_{[X,pi]} + C^{[X,r]}_pi` on coframe pairs.
pub fn mm1_identity(c: &PnCandidate, x: &[Poly]) -> Result<CheckReport> {
    let m = c.dim();
    if x.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "vector field needs {m} components"
        )));
    }
    let names = c.names();
    let (pi, r) = (&c.pi, &c.r);
    let lx_pi = Multivector::vector(x).schouten(pi);
    let lx_r = VVForm::from_field(m, x).fn_bracket(r);
    let coframe = c.coframe();
    let mut d = Defect::new(names);
    for a in &coframe {
        for b in &coframe {
            let lhs = &(&concomitant(pi, r, a, b).lie(x) - &concomitant(pi, r, &a.lie(x), b))
                - &concomitant(pi, r, a, &b.lie(x));
            let rhs = &concomitant(&lx_pi, r, a, b) + &concomitant(pi, &lx_r, a, b);
            let label = format!("({},{})", a.render(names), b.render(names));
            d.form(&label, &(&lhs - &rhs));
        }
    }
    let mut report = CheckReport::new("mm1");
    report.push("mm1", "L_X C^r_pi = C^r_[X,pi] + C^[X,r]_pi", d);
    Ok(report)
}

/// `pi, pi_r, pi_{r^2}, ..., pi_{r^depth}` with pairwise Schouten compatibility.
pub fn hierarchy(c: &PnCandidate, depth: usize) -> Result<(Vec<Multivector>, CheckReport)> {
    if !check_pn(c).verdict() {
        return Err(Error::Precondition(
            "the pair is not Poisson-Nijenhuis".into(),
        ));
    }
    let m = c.dim();
    let names = c.names();
    let mut members = vec![c.pi.clone()];
    let mut power = VVForm::identity(m);
    for _ in 0..depth {
        power = crate::forms::compose_endo(&c.r, &power);
        let pw = power.clone();
        members.push(bivector_from_sharp(m, &|a| {
            pw.apply(&sharp_field(&c.pi, a))
        }));
    }
    let mut report = CheckReport::new("hierarchy");
    for (i, p) in members.iter().enumerate() {
        report.fact(format!("pi_{i}"), p.render(names));
    }
    let mut d = Defect::new(names);
    for i in 0..members.len() {
        for j in i..members.len() {
            d.multivector(
                &format!("[pi_{i},pi_{j}]"),
                &members[i].schouten(&members[j]),
            );
        }
    }
    report.push("compatibility", "[pi_i, pi_j] = 0", d);
    Ok((members, report))
}

/// The infinitesimal PN characterization: `D^{r,T*}` is IM on `(T*M, [.,.]_pi, pi#)`.
pub fn im_on_cotangent(c: &PnCandidate) -> Result<CheckReport> {
    let tstar = Algebroid::cotangent_of_poisson(FramedBundle::cotangent(c.chart.clone()), &c.pi)?;
    let d = build_drtstar(FramedBundle::cotangent(c.chart.clone()), &c.r)?;
    let mut r = check_im(&tstar, &d)?;
    r.title = "im on T*M_pi".into();
    Ok(r)
}

/// PN through derivations: `D^{r,T*}` IM on `T*M_pi`, `[pi, pi] = 0` and `[D^{r,T}, D^{r,T}] = 0`.
pub fn pn_via_im(c: &PnCandidate) -> Result<CheckReport> {
    let names = c.names();
    let mut report = CheckReport::new("pn via im");
    let mut p = Defect::new(names);
    p.multivector("[pi,pi]", &c.pi.schouten(&c.pi));
    report.push("poisson", "[pi, pi] = 0", p);
    let drt = build_drt(FramedBundle::tangent(c.chart.clone()), &c.r)?;
    let sq = drt.bracket(&drt)?;
    let values: Vec<String> = names.iter().map(|n| format!("d/d{n}")).collect();
    let mut n = Defect::new(names);
    n.vvform("symbol of [D,D]", &values, sq.r());
    if n.is_zero() && !sq.is_zero() {
        n.flag("[D,D]", "nonzero with vanishing symbol");
    }
    report.push("nijenhuis", "[D^{r,T}, D^{r,T}] = 0", n);
    report.sub(im_on_cotangent(c)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Limits};

    fn chart() -> Arc<Chart> {
        Chart::new(["x", "y"]).unwrap()
    }
    fn p(s: &str) -> Poly {
        parse_poly(s, &chart(), &Limits::default()).unwrap()
    }
    fn pi0() -> Multivector {
        Multivector::bivector(2, [(0, 1, p("1"))])
    }
    fn xid() -> VVForm {
        VVForm::scalar_endomorphism(2, &p("x"))
    }
    fn j2() -> VVForm {
        VVForm::endomorphism(&[vec![p("0"), p("-1")], vec![p("1"), p("0")]])
    }
    fn cand(pi: Multivector, r: VVForm) -> PnCandidate {
        PnCandidate::new(chart(), pi, r).unwrap()
    }

    #[test]
    fn concomitants_of_pi0_xid() {
        let c = concomitants(&cand(pi0(), xid()));
        assert_eq!(c.pi_r, Some(Multivector::bivector(2, [(0, 1, p("x"))])));
        assert!(c.c.iter().flatten().flatten().all(Poly::is_zero));
        assert!(c.r_mm.iter().flatten().flatten().all(Poly::is_zero));
        assert!(c.selfadj.iter().flatten().all(Poly::is_zero));
        assert!(c.report.verdict());
    }

    #[test]
    fn concomitants_of_pi0_j2() {
        let c = concomitants(&cand(pi0(), j2()));
        assert!(c.pi_r.is_none());
        assert!(!c.selfadj.iter().flatten().all(Poly::is_zero));
        // r pi# = - pi# r*
        for a in 0..2 {
            let dxa = DiffForm::dx(2, a);
            let lhs = j2().apply(&sharp_field(&pi0(), &dxa));
            let rhs: Vec<Poly> = sharp_field(&pi0(), &j2().pullback_1form(&dxa))
                .iter()
                .map(|q| -q)
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn concomitants_of_zero_bivector() {
        let c = concomitants(&cand(Multivector::zero(2, 2), j2()));
        assert!(c.report.verdict());
        assert!(c.c.iter().flatten().flatten().all(Poly::is_zero));
    }

    #[test]
    fn pn_examples() {
        assert!(check_pn(&cand(pi0(), xid())).verdict());
        let j = check_pn(&cand(pi0(), j2()));
        assert!(!j.verdict());
        assert!(j.entry("torsion").unwrap().is_zero());
        assert!(!j.entry("self-adjoint").unwrap().is_zero());
        assert!(check_pn(&cand(pi0(), VVForm::identity(2))).verdict());
    }

    #[test]
    fn kosmann_examples() {
        let k = kosmann_equivalence(&cand(pi0(), xid())).unwrap();
        assert!(k.verdict(), "{k}");
        let k = kosmann_equivalence(&cand(pi0(), j2())).unwrap();
        assert!(!k.verdict());
        assert!(k.entry("agreement").unwrap().is_zero(), "{k}");
        let k = kosmann_equivalence(&cand(pi0(), VVForm::zero(2, 1, 2))).unwrap();
        assert!(k.verdict(), "{k}");
    }

    #[test]
    fn kosmann_rejects_non_poisson() {
        let c3 = Chart::new(["x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &c3, &Limits::default()).unwrap();
        let pi = Multivector::bivector(3, [(0, 1, q("1")), (1, 2, q("y"))]);
        let c = PnCandidate::new(c3, pi, VVForm::identity(3)).unwrap();
        assert!(matches!(
            kosmann_equivalence(&c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn mm1_examples() {
        assert!(mm1_identity(&cand(pi0(), xid()), &coord_field(2, 0))
            .unwrap()
            .verdict());
        assert!(mm1_identity(&cand(pi0(), j2()), &[p("y"), p("0")])
            .unwrap()
            .verdict());
        assert!(
            mm1_identity(&cand(Multivector::zero(2, 2), xid()), &[p("x*y"), p("1")])
                .unwrap()
                .verdict()
        );
    }

    #[test]
    fn hierarchy_examples() {
        let (h, r) = hierarchy(&cand(pi0(), xid()), 2).unwrap();
        assert_eq!(
            h,
            vec![
                pi0(),
                Multivector::bivector(2, [(0, 1, p("x"))]),
                Multivector::bivector(2, [(0, 1, p("x^2"))])
            ]
        );
        assert!(r.verdict());
        let (h, _) = hierarchy(&cand(pi0(), VVForm::identity(2)), 3).unwrap();
        assert!(h.iter().all(|m| *m == pi0()));
        let (h, _) = hierarchy(&cand(pi0(), VVForm::zero(2, 1, 2)), 2).unwrap();
        assert!(h[1].is_zero() && h[2].is_zero());
        assert!(hierarchy(&cand(pi0(), j2()), 1).is_err());
    }

    #[test]
    fn im_on_cotangent_matches_compatibility() {
        assert!(im_on_cotangent(&cand(pi0(), xid())).unwrap().verdict());
        assert!(!im_on_cotangent(&cand(pi0(), j2())).unwrap().verdict());
    }

    #[test]
    fn pn_via_im_needs_a_nijenhuis_operator() {
        let zero = Multivector::zero(2, 2);
        // r = y dx (x) d/dx + x dy (x) d/dy is compatible with pi = 0 but has torsion
        let r = VVForm::endomorphism(&[vec![p("y"), p("0")], vec![p("0"), p("x")]]);
        let c = cand(zero, r);
        assert!(im_on_cotangent(&c).unwrap().verdict());
        let via = pn_via_im(&c).unwrap();
        assert_eq!(via.failures(), ["nijenhuis"]);
        assert!(!check_pn(&c).verdict());
        assert!(pn_via_im(&cand(pi0(), xid())).unwrap().verdict());
    }
}
