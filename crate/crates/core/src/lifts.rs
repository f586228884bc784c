//! Calculus on the total space of a framed bundle: vertical lifts, the Euler
//! field, and the correspondence between generalized derivations and linear
//! vector-valued forms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{coord_field, lie_bracket, DiffForm, VVForm, VectorField};
use crate::gder::{build_drt, build_drtstar, BundleKind, FramedBundle, GenDer};
use crate::poly::{Chart, Poly};
use crate::report::{CheckReport, Defect};

/// Coordinates `(x, xi)` on the total space of a framed bundle, base first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalChart {
    bundle: FramedBundle,
    chart: Arc<Chart>,
}

impl TotalChart {
    /// Fiber coordinates are `x'` on `TM`, `p_x` on `T*M` and `xi_<frame>` otherwise.
    pub fn new(bundle: &FramedBundle) -> Result<Self> {
        let base = bundle.chart();
        let fiber: Vec<String> = match bundle.kind() {
            BundleKind::Tangent => base.names().iter().map(|n| format!("{n}'")).collect(),
            BundleKind::Cotangent => base.names().iter().map(|n| format!("p_{n}")).collect(),
            BundleKind::Generic => (0..bundle.rank()).map(|a| format!("xi{}", a + 1)).collect(),
        };
        let chart = base.extended(fiber)?;
        Ok(TotalChart {
            bundle: bundle.clone(),
            chart,
        })
    }

    pub fn bundle(&self) -> &FramedBundle {
        &self.bundle
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> BundleKind {
        self.bundle.kind()
    }

    pub fn base_dim(&self) -> usize {
        self.bundle.dim()
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    /// Dimension of the total space.
    pub fn dim(&self) -> usize {
        self.base_dim() + self.rank()
    }

    /// Fiber coordinate `xi^a` as a polynomial on the total space.
    pub fn xi(&self, a: usize) -> Poly {
        Poly::var(self.dim(), self.base_dim() + a)
    }

    pub fn pull_poly(&self, f: &Poly) -> Poly {
        f.embed(self.dim(), 0)
    }

    pub fn pull_form(&self, a: &DiffForm) -> DiffForm {
        a.embed(self.dim(), 0)
    }

    /// Coordinate vector field `d/dx_i` on the total space.
    pub fn base_field(&self, i: usize) -> VectorField {
        coord_field(self.dim(), i)
    }

    pub fn fiber_field(&self, a: usize) -> VectorField {
        coord_field(self.dim(), self.base_dim() + a)
    }

    /// `d xi^a`.
    pub fn dxi(&self, a: usize) -> DiffForm {
        DiffForm::dx(self.dim(), self.base_dim() + a)
    }

    /// Tangent vectors with every component in the base block.
    pub fn horizontal(&self, x: &[Poly]) -> VectorField {
        let mut out: VectorField = x.iter().map(|p| self.pull_poly(p)).collect();
        out.extend((0..self.rank()).map(|_| Poly::zero(self.dim())));
        out
    }

    /// Fiberwise linear function `l_s = <xi, s>` for a section `s` of the dual bundle.
    pub fn linear_function(&self, s: &[Poly]) -> Poly {
        s.iter()
            .enumerate()
            .fold(Poly::zero(self.dim()), |acc, (a, c)| {
                &acc + &(&self.xi(a) * &self.pull_poly(c))
            })
    }

    fn ensure_form(&self, k: &VVForm) -> Result<()> {
        if k.dim() != self.dim() || k.rank() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected a tangent-valued form on the {}-dimensional total space",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// A tangent-valued form on a total space, with the derivation it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinVVForm {
    pub total: TotalChart,
    pub form: VVForm,
    pub source: Option<GenDer>,
}

impl LinVVForm {
    pub fn render(&self) -> String {
        let names = self.total.chart().names();
        let values: Vec<String> = names.iter().map(|n| format!("d/d{n}")).collect();
        self.form.render(names, &values)
    }
}

/// `u^ = sum u^a d/dxi^a`.
pub fn vertical_lift(total: &TotalChart, u: &[Poly]) -> Result<VectorField> {
    if u.len() != total.rank() {
        return Err(Error::BundleMismatch(format!(
            "section of rank {} on a rank-{} bundle",
            u.len(),
            total.rank()
        )));
    }
    let mut out: VectorField = (0..total.base_dim())
        .map(|_| Poly::zero(total.dim()))
        .collect();
    out.extend(u.iter().map(|c| total.pull_poly(c)));
    Ok(out)
}

/// `E = sum xi^a d/dxi^a`.
pub fn euler(total: &TotalChart) -> VectorField {
    let mut out: VectorField = (0..total.base_dim())
        .map(|_| Poly::zero(total.dim()))
        .collect();
    out.extend((0..total.rank()).map(|a| total.xi(a)));
    out
}

/// `V(gamma)` for a bundle-valued form `gamma`.
pub fn v_map(total: &TotalChart, gamma: &VVForm) -> Result<VVForm> {
    if gamma.dim() != total.base_dim() || gamma.rank() != total.rank() {
        return Err(Error::BundleMismatch(
            "form does not take values in the bundle".into(),
        ));
    }
    Ok(gamma.embed(total.dim(), 0, total.dim(), total.base_dim()))
}

/// `Phi^` for an `End(E)`-valued form given on the frame, `phi[a] = Phi(u_a)`.
pub fn phi_up(total: &TotalChart, phi: &[VVForm]) -> Result<LinVVForm> {
    if phi.len() != total.rank() {
        return Err(Error::BundleMismatch(
            "endomorphism must be given on every frame element".into(),
        ));
    }
    let deg = phi.first().map(VVForm::degree).unwrap_or(0);
    let mut form = VVForm::zero(total.dim(), deg, total.dim());
    for (a, p) in phi.iter().enumerate() {
        if p.degree() != deg {
            return Err(Error::DegreeMismatch(
                "mixed degrees in endomorphism".into(),
            ));
        }
        form = &form + &v_map(total, p)?.scale(&total.xi(a));
    }
    Ok(LinVVForm {
        total: total.clone(),
        form,
        source: None,
    })
}

/// The linear vector-valued form `K` in three-block local form.
pub fn linearize(d: &GenDer) -> Result<LinVVForm> {
    let total = TotalChart::new(d.bundle())?;
    let n = total.dim();
    let mut form = d.r().embed(n, 0, n, 0);
    for (a, da) in d.d_on_frame().iter().enumerate() {
        form = &form + &v_map(&total, da)?.scale(&total.xi(a));
    }
    for (a, la) in d.l_on_frame().iter().enumerate() {
        form = &form + &v_map(&total, la)?.wedge_left(&total.dxi(a));
    }
    Ok(LinVVForm {
        total,
        form,
        source: Some(d.clone()),
    })
}

/// `L_E K`, in the form whose vanishing characterizes linearity.
pub fn check_linearity(total: &TotalChart, k: &VVForm) -> Result<CheckReport> {
    total.ensure_form(k)?;
    let names = total.chart().names();
    let e = VVForm::from_field(total.dim(), &euler(total));
    let mut d = Defect::new(names);
    let values: Vec<String> = names.iter().map(|v| format!("d/d{v}")).collect();
    d.vvform("L_E K", &values, &e.fn_bracket(k));
    let mut report = CheckReport::new("linearity");
    report.push("euler", "L_E K = 0", d);
    Ok(report)
}

/// Generalized derivation of a linear form, read off its three blocks.
pub fn delinearize(total: &TotalChart, k: &VVForm) -> Result<GenDer> {
    total.ensure_form(k)?;
    if !check_linearity(total, k)?.verdict() {
        return Err(Error::Precondition("form is not linear".into()));
    }
    let (n, m, rank) = (total.dim(), total.base_dim(), total.rank());
    let deg = k.degree();
    let base = |f: &DiffForm| -> Result<DiffForm> {
        f.restrict(m, 0)
            .ok_or_else(|| Error::Precondition("coefficient depends on the fiber".into()))
    };
    // a form on the total space splits as
    //   sum_I f_I dx_I + sum_a dxi^a ^ g_a + (higher in dxi)
    let split = |f: &DiffForm| -> (DiffForm, Vec<DiffForm>) {
        let mut hor = DiffForm::zero(n, deg);
        let mut mixed = vec![DiffForm::zero(n, deg.saturating_sub(1)); rank];
        for (idx, c) in f.terms() {
            let fib: Vec<usize> = idx.iter().copied().filter(|&i| i >= m).collect();
            if fib.is_empty() {
                hor = &hor + &DiffForm::basis(n, idx.clone(), c.clone());
            } else if fib.len() == 1 {
                let pos = idx.iter().position(|&i| i >= m).expect("present");
                let rest: Vec<usize> = idx.iter().copied().filter(|&i| i < m).collect();
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                mixed[fib[0] - m] =
                    &mixed[fib[0] - m] + &DiffForm::basis(n, rest, c.scale_int(sign));
            }
        }
        (hor, mixed)
    };
    let mut r_comps = Vec::with_capacity(m);
    for j in 0..m {
        let (hor, _) = split(k.comp(j));
        r_comps.push(base(&hor)?);
    }
    let r = VVForm::from_comps(m, deg, r_comps);
    let mut dcomps = vec![vec![DiffForm::zero(m, deg); rank]; rank];
    let mut lcomps = vec![vec![DiffForm::zero(m, deg.saturating_sub(1)); rank]; rank];
    for b in 0..rank {
        let (hor, mixed) = split(k.comp(m + b));
        for a in 0..rank {
            // coefficient of xi^a in the horizontal block
            let coeff = hor.map_coeffs(|p| p.partial(m + a));
            dcomps[a][b] = base(&coeff)?;
            if deg > 0 {
                lcomps[a][b] = base(&mixed[a])?;
            }
        }
    }
    let d = dcomps
        .into_iter()
        .map(|c| VVForm::from_comps(m, deg, c))
        .collect();
    let l = if deg == 0 {
        Vec::new()
    } else {
        lcomps
            .into_iter()
            .map(|c| VVForm::from_comps(m, deg - 1, c))
            .collect()
    };
    GenDer::new(total.bundle().clone(), deg, d, l, r)
}

/// Degree-0 generalized derivation of `K(U_1, ..., U_k)` for linear fields `U_i`.
pub fn derivation_from_linear_fields(
    total: &TotalChart,
    k: &VVForm,
    us: &[VectorField],
) -> Result<GenDer> {
    total.ensure_form(k)?;
    if us.len() != k.degree() {
        return Err(Error::ShapeMismatch(format!(
            "{} fields for a {}-form",
            us.len(),
            k.degree()
        )));
    }
    let e = euler(total);
    for u in us {
        if u.len() != total.dim() {
            return Err(Error::ShapeMismatch("field on another chart".into()));
        }
        if !lie_bracket(&e, u).iter().all(Poly::is_zero) {
            return Err(Error::Precondition(
                "supplied vector field is not linear".into(),
            ));
        }
    }
    let u = k.evaluate(us);
    delinearize(total, &VVForm::from_field(total.dim(), &u))
}

/// The linear vector field of a degree-0 generalized derivation.
pub fn linear_field(d: &GenDer) -> Result<VectorField> {
    if d.degree() != 0 {
        return Err(Error::DegreeMismatch("expected degree 0".into()));
    }
    Ok(linearize(d)?.form.as_field())
}

fn scaled_sections(bundle: &FramedBundle) -> Vec<(String, VectorField)> {
    let m = bundle.dim();
    let names = bundle.chart().names();
    let mut out = Vec::new();
    for a in 0..bundle.rank() {
        out.push((bundle.frame()[a].clone(), bundle.unit(a)));
        for v in 0..m {
            let s = bundle
                .unit(a)
                .iter()
                .map(|c| c * &Poly::var(m, v))
                .collect();
            out.push((format!("{}*{}", names[v], bundle.frame()[a]), s));
        }
    }
    out
}

/// `V(D(u)) = L_{u^} K`, `V(l(u)) = K(u^, .)` and `q*<b, r> = <K, q*b>`.
pub fn verify_correspondence(k: &LinVVForm, d: &GenDer) -> Result<CheckReport> {
    let total = &k.total;
    total.bundle().ensure_same(d.bundle())?;
    total.ensure_form(&k.form)?;
    if k.form.degree() != d.degree() {
        return Err(Error::DegreeMismatch(
            "form and derivation have different degrees".into(),
        ));
    }
    let n = total.dim();
    let names = total.chart().names();
    let values: Vec<String> = names.iter().map(|v| format!("d/d{v}")).collect();
    let mut dd = Defect::new(names);
    let mut ld = Defect::new(names);
    for (label, s) in scaled_sections(d.bundle()) {
        let up = VVForm::from_field(n, &vertical_lift(total, &s)?);
        let lhs = v_map(total, &d.apply(&s)?)?;
        dd.vvform(
            &format!("({label})"),
            &values,
            &(&lhs - &up.fn_bracket(&k.form)),
        );
        if d.degree() > 0 {
            let lhs = v_map(total, &d.l_apply(&s))?;
            ld.vvform(
                &format!("({label})"),
                &values,
                &(&lhs - &k.form.interior(&up.as_field())),
            );
        }
    }
    let mut rd = Defect::new(names);
    for j in 0..total.base_dim() {
        let v = &total.pull_form(d.r().comp(j)) - k.form.comp(j);
        rd.form(&format!("<K, d{}>", names[j]), &v);
    }
    let mut report = CheckReport::new("correspondence");
    report.push("D", "V(D(u)) = L_{u^} K", dd);
    report.push("l", "V(l(u)) = K(u^, .)", ld);
    report.push("r", "q*<b, r> = <K, q*b>", rd);
    Ok(report)
}

/// `r^tg`, the linear form of `D^{r,T}`.
pub fn tangent_lift(chart: Arc<Chart>, r: &VVForm) -> Result<LinVVForm> {
    linearize(&build_drt(FramedBundle::tangent(chart), r)?)
}

/// `r^ctg`, the linear form of `D^{r,T*}`; degree 1 only.
pub fn cotangent_lift(chart: Arc<Chart>, r: &VVForm) -> Result<LinVVForm> {
    linearize(&build_drtstar(FramedBundle::cotangent(chart), r)?)
}

/// Complete lift `X^tg = X^i d/dx_i + x'^j d_j X^i d/dx'_i` on `TM`.
pub fn field_tangent_lift(total: &TotalChart, x: &[Poly]) -> VectorField {
    let m = total.base_dim();
    let mut out = total.horizontal(x);
    for i in 0..m {
        for j in 0..m {
            out[m + i] = &out[m + i] + &(&total.xi(j) * &total.pull_poly(&x[i].partial(j)));
        }
    }
    out
}

/// Cotangent lift `X^ctg = X^i d/dx_i - p_j d_i X^j d/dp_i` on `T*M`.
pub fn field_cotangent_lift(total: &TotalChart, x: &[Poly]) -> VectorField {
    let m = total.base_dim();
    let mut out = total.horizontal(x);
    for i in 0..m {
        for j in 0..m {
            out[m + i] = &out[m + i] - &(&total.xi(j) * &total.pull_poly(&x[j].partial(i)));
        }
    }
    out
}

/// Complete lift of a form from its coordinate expression:
/// `(d_j a_I) x'^j dx_I + sum_s a_I dx_{i_1} ^ .. ^ dx'_{i_s} ^ .. ^ dx_{i_k}`.
pub fn form_tangent_lift(total: &TotalChart, alpha: &DiffForm) -> DiffForm {
    let (n, m) = (total.dim(), total.base_dim());
    let mut out = DiffForm::zero(n, alpha.degree());
    for (idx, c) in alpha.terms() {
        let mut deriv = Poly::zero(n);
        for j in 0..m {
            deriv = &deriv + &(&total.xi(j) * &total.pull_poly(&c.partial(j)));
        }
        out = &out + &DiffForm::basis(n, idx.clone(), deriv);
        for s in 0..idx.len() {
            let mut f = DiffForm::function(total.pull_poly(c));
            for (t, &i) in idx.iter().enumerate() {
                let one = if t == s {
                    total.dxi(i)
                } else {
                    DiffForm::dx(n, i)
                };
                f = f.wedge(&one);
            }
            out = &out + &f;
        }
    }
    out
}

/// `(a (x) X)^tg = q*a (x) X^tg + a^tg (x) X^`, summed over a decomposition of `r`.
pub fn tangent_lift_oracle(total: &TotalChart, r: &VVForm) -> VVForm {
    let (n, m) = (total.dim(), total.base_dim());
    let mut out = VVForm::zero(n, r.degree(), n);
    for (j, alpha) in r.comps().iter().enumerate() {
        let x = coord_field(m, j);
        let xtg = field_tangent_lift(total, &x);
        let xup = vertical_lift(total, &x).expect("tangent bundle");
        out = &out + &VVForm::decomposable(&total.pull_form(alpha), &xtg);
        out = &out + &VVForm::decomposable(&form_tangent_lift(total, alpha), &xup);
    }
    out
}

/// `(a (x) X)^ctg = p*a (x) X^ctg + d l_X ^ V(a~) - l_X V((da)~)` for 1-forms `a`.
pub fn cotangent_lift_oracle(total: &TotalChart, r: &VVForm) -> Result<VVForm> {
    if r.degree() != 1 {
        return Err(Error::DegreeMismatch(
            "cotangent lift oracle is for degree 1".into(),
        ));
    }
    let (n, m) = (total.dim(), total.base_dim());
    let mut out = VVForm::zero(n, 1, n);
    for (j, alpha) in r.comps().iter().enumerate() {
        let x = coord_field(m, j);
        let lx = total.linear_function(&x);
        out =
            &out + &VVForm::decomposable(&total.pull_form(alpha), &field_cotangent_lift(total, &x));
        // a~ is a as a T*M-valued 0-form; (da)~ has value d/dx_b-slot i_{d/dx_b} da
        let atilde: VectorField = (0..m).map(|b| alpha.coeff(&[b])).collect();
        let va = VVForm::from_field(n, &vertical_lift(total, &atilde)?);
        out = &out + &va.wedge_left(&DiffForm::function(lx.clone()).d());
        let da = alpha.d();
        let comps = (0..m).map(|b| da.interior(&coord_field(m, b))).collect();
        let dtilde = VVForm::from_comps(m, 1, comps);
        out = &out - &v_map(total, &dtilde)?.scale(&lx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gder::build_drt;
    use crate::poly::{parse_poly, Limits};

    fn chart() -> Arc<Chart> {
        Chart::new(["x", "y"]).unwrap()
    }
    fn p(s: &str) -> Poly {
        parse_poly(s, &chart(), &Limits::default()).unwrap()
    }
    fn j2() -> VVForm {
        VVForm::endomorphism(&[vec![p("0"), p("-1")], vec![p("1"), p("0")]])
    }
    fn xid() -> VVForm {
        VVForm::scalar_endomorphism(2, &p("x"))
    }

    #[test]
    fn total_chart_names() {
        let t = TotalChart::new(&FramedBundle::tangent(chart())).unwrap();
        assert_eq!(t.chart().names(), &["x", "y", "x'", "y'"]);
        let c = TotalChart::new(&FramedBundle::cotangent(chart())).unwrap();
        assert_eq!(c.chart().names(), &["x", "y", "p_x", "p_y"]);
        let g = TotalChart::new(&FramedBundle::trivial(chart(), 3, "u", "phi")).unwrap();
        assert_eq!(g.dim(), 5);
    }

    #[test]
    fn vertical_lift_and_euler() {
        let t = TotalChart::new(&FramedBundle::tangent(chart())).unwrap();
        assert_eq!(
            vertical_lift(&t, &coord_field(2, 0)).unwrap(),
            t.fiber_field(0)
        );
        let id: Vec<VVForm> = (0..2)
            .map(|a| VVForm::from_field(2, &coord_field(2, a)))
            .collect();
        assert_eq!(phi_up(&t, &id).unwrap().form.as_field(), euler(&t));
        let g = VVForm::decomposable(&DiffForm::dx(2, 0), &coord_field(2, 0));
        let v = v_map(&t, &g).unwrap();
        assert_eq!(
            v,
            VVForm::decomposable(&DiffForm::dx(4, 0), &t.fiber_field(0))
        );
        assert!(vertical_lift(&t, &[p("1")]).is_err());
    }

    #[test]
    fn linearize_lie_derivative_is_constant_field() {
        let tm = FramedBundle::tangent(chart());
        // D = -L_{d/dx}
        let d = build_drt(tm, &VVForm::from_field(2, &coord_field(2, 0))).unwrap();
        let k = linearize(&d).unwrap();
        assert_eq!(k.form.as_field(), k.total.base_field(0));
    }

    #[test]
    fn linearize_j2_is_constant_complex_structure() {
        let k = tangent_lift(chart(), &j2()).unwrap();
        let t = &k.total;
        let ap = |i: usize| k.form.apply(&coord_field(4, i));
        assert_eq!(ap(0), t.base_field(1));
        assert_eq!(ap(2), t.fiber_field(1));
        assert_eq!(
            ap(1),
            coord_field(4, 0).iter().map(|c| -c).collect::<Vec<_>>()
        );
        assert_eq!(
            ap(3),
            coord_field(4, 2).iter().map(|c| -c).collect::<Vec<_>>()
        );
    }

    #[test]
    fn linearize_zero() {
        let d = GenDer::zero(FramedBundle::trivial(chart(), 2, "u", "phi"), 1);
        let k = linearize(&d).unwrap();
        assert!(k.form.is_zero());
        assert!(verify_correspondence(&k, &d).unwrap().verdict());
    }

    #[test]
    fn correspondence_examples() {
        let tm = FramedBundle::tangent(chart());
        let dx = build_drt(tm.clone(), &xid()).unwrap();
        let kx = linearize(&dx).unwrap();
        assert!(verify_correspondence(&kx, &dx).unwrap().verdict());
        let kj = tangent_lift(chart(), &j2()).unwrap();
        let rep = verify_correspondence(&kj, &dx).unwrap();
        assert!(!rep.entry("D").unwrap().is_zero());
        assert!(!rep.verdict());
    }

    #[test]
    fn linearity_examples() {
        let kx = tangent_lift(chart(), &xid()).unwrap();
        assert!(check_linearity(&kx.total, &kx.form).unwrap().verdict());
        let line = Chart::new(["x"]).unwrap();
        let t = TotalChart::new(&FramedBundle::tangent(line)).unwrap();
        let q = &t.xi(0) * &t.xi(0);
        let bad = VVForm::decomposable(&DiffForm::dx(2, 0), &[Poly::zero(2), q]);
        assert!(!check_linearity(&t, &bad).unwrap().verdict());
        assert!(delinearize(&t, &bad).is_err());
    }

    #[test]
    fn delinearize_inverts_linearize() {
        let tm = FramedBundle::tangent(chart());
        for r in [
            xid(),
            j2(),
            VVForm::decomposable(&DiffForm::dx(2, 0).scale(&p("x")), &coord_field(2, 1)),
        ] {
            let d = build_drt(tm.clone(), &r).unwrap();
            let k = linearize(&d).unwrap();
            assert_eq!(delinearize(&k.total, &k.form).unwrap(), d);
        }
        let x = VVForm::from_field(2, &[p("x*y"), p("1")]);
        let d0 = build_drt(tm, &x).unwrap();
        let k0 = linearize(&d0).unwrap();
        assert_eq!(
            derivation_from_linear_fields(&k0.total, &k0.form, &[]).unwrap(),
            d0
        );
    }

    #[test]
    fn derivation_rejects_nonlinear_fields() {
        let k = tangent_lift(chart(), &xid()).unwrap();
        let t = &k.total;
        let mut u = t.fiber_field(0);
        u[2] = &t.xi(0) * &t.xi(0);
        assert!(matches!(
            derivation_from_linear_fields(t, &k.form, &[u]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lift_oracles_on_examples() {
        let r3 = VVForm::decomposable(&DiffForm::dx(2, 0).scale(&p("x")), &coord_field(2, 1));
        for r in [xid(), j2(), r3] {
            let k = tangent_lift(chart(), &r).unwrap();
            assert_eq!(k.form, tangent_lift_oracle(&k.total, &r));
            let c = cotangent_lift(chart(), &r).unwrap();
            assert_eq!(c.form, cotangent_lift_oracle(&c.total, &r).unwrap());
        }
        assert!(tangent_lift(chart(), &VVForm::zero(2, 1, 2))
            .unwrap()
            .form
            .is_zero());
    }
}
