//! Lie algebroids in a global frame: anchor plus structure functions.

use crate::error::{Error, Result};
use crate::forms::{
    add_fields, apply_vf, coord_field, lie_bracket, one_form_coeffs, scale_field, sharp_field,
    sub_fields, DiffForm, Multivector, VVForm, VectorField,
};
use crate::gder::{FramedBundle, GenDer};
use crate::poly::Poly;
use crate::report::{CheckReport, Defect};

/// Section of `A ^ A` as a skew matrix `P[b][c] = P(eps^b, eps^c)`.
pub type BiSection = Vec<Vec<Poly>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebroid {
    bundle: FramedBundle,
    anchor: Vec<VectorField>,
    structure: Vec<Vec<VectorField>>,
    pre_lie_only: bool,
}

impl Algebroid {
    /// `anchor[a] = rho(e_a)`, `structure[a][b] = [e_a, e_b]` in frame coordinates.
    pub fn new(
        bundle: FramedBundle,
        anchor: Vec<VectorField>,
        structure: Vec<Vec<VectorField>>,
    ) -> Result<Self> {
        let (m, n) = (bundle.dim(), bundle.rank());
        if anchor.len() != n || anchor.iter().any(|v| v.len() != m) {
            return Err(Error::ShapeMismatch(format!(
                "anchor must be {n} vectors with {m} components"
            )));
        }
        if structure.len() != n
            || structure
                .iter()
                .any(|row| row.len() != n || row.iter().any(|s| s.len() != n))
        {
            return Err(Error::ShapeMismatch(format!(
                "structure functions must be {n} x {n} x {n}"
            )));
        }
        for a in 0..n {
            for b in 0..n {
                let sum = add_fields(&structure[a][b], &structure[b][a]);
                if sum.iter().any(|p| !p.is_zero()) {
                    return Err(Error::ShapeMismatch(format!(
                        "structure functions are not skew in ({}, {})",
                        bundle.frame()[a],
                        bundle.frame()[b]
                    )));
                }
            }
        }
        Ok(Algebroid {
            bundle,
            anchor,
            structure,
            pre_lie_only: false,
        })
    }

    /// Build from the brackets `[e_a, e_b]` with `a < b`; the rest follows by skew-symmetry.
    pub fn from_brackets(
        bundle: FramedBundle,
        anchor: Vec<VectorField>,
        brackets: impl IntoIterator<Item = (usize, usize, VectorField)>,
    ) -> Result<Self> {
        let (m, n) = (bundle.dim(), bundle.rank());
        let mut structure = vec![vec![vec![Poly::zero(m); n]; n]; n];
        for (a, b, s) in brackets {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    bound: n,
                });
            }
            if a == b {
                return Err(Error::ShapeMismatch(
                    "bracket of a frame element with itself must vanish".into(),
                ));
            }
            if s.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "bracket value needs {n} components"
                )));
            }
            structure[b][a] = s.iter().map(|p| -p).collect();
            structure[a][b] = s;
        }
        Algebroid::new(bundle, anchor, structure)
    }

    pub fn tangent(tm: FramedBundle) -> Self {
        let m = tm.dim();
        let anchor = (0..m).map(|a| coord_field(m, a)).collect();
        let structure = vec![vec![vec![Poly::zero(m); m]; m]; m];
        Algebroid {
            bundle: tm,
            anchor,
            structure,
            pre_lie_only: false,
        }
    }

    /// `(T^*M, [.,.]_pi, pi^sharp)`; flagged pre-Lie when `[pi, pi] != 0`.
    pub fn cotangent_of_poisson(tstar: FramedBundle, pi: &Multivector) -> Result<Self> {
        let m = tstar.dim();
        if pi.dim() != m || pi.degree() != 2 || tstar.rank() != m {
            return Err(Error::ShapeMismatch(
                "expected a bivector on the cotangent bundle's chart".into(),
            ));
        }
        let anchor: Vec<VectorField> = (0..m)
            .map(|a| sharp_field(pi, &DiffForm::dx(m, a)))
            .collect();
        let mut structure = vec![vec![vec![Poly::zero(m); m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                // [dx_a, dx_b]_pi = d pi^{ab}
                structure[a][b] = one_form_coeffs(&DiffForm::function(pi.entry(a, b)).d());
            }
        }
        Ok(Algebroid {
            bundle: tstar,
            anchor,
            structure,
            pre_lie_only: !pi.schouten(pi).is_zero(),
        })
    }

    pub fn bundle(&self) -> &FramedBundle {
        &self.bundle
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn dim(&self) -> usize {
        self.bundle.dim()
    }

    pub fn anchor(&self) -> &[VectorField] {
        &self.anchor
    }

    pub fn structure(&self, a: usize, b: usize) -> &VectorField {
        &self.structure[a][b]
    }

    pub fn is_pre_lie_only(&self) -> bool {
        self.pre_lie_only
    }

    pub fn unit(&self, a: usize) -> VectorField {
        self.bundle.unit(a)
    }

    pub fn anchor_apply(&self, s: &[Poly]) -> VectorField {
        let mut out = vec![Poly::zero(self.dim()); self.dim()];
        for (a, sa) in s.iter().enumerate() {
            if !sa.is_zero() {
                out = add_fields(&out, &scale_field(sa, &self.anchor[a]));
            }
        }
        out
    }

    /// Bracket of arbitrary sections.
    pub fn bracket(&self, s: &[Poly], t: &[Poly]) -> VectorField {
        let n = self.rank();
        let mut out = vec![Poly::zero(self.dim()); n];
        for a in 0..n {
            if s[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if t[b].is_zero() {
                    continue;
                }
                let f = &s[a] * &t[b];
                out = add_fields(&out, &scale_field(&f, &self.structure[a][b]));
            }
        }
        let (rs, rt) = (self.anchor_apply(s), self.anchor_apply(t));
        for k in 0..n {
            out[k] += &(&apply_vf(&rs, &t[k]) - &apply_vf(&rt, &s[k]));
        }
        out
    }

    /// Jacobi identity on frame triples and the anchor morphism on frame pairs.
    pub fn validate(&self) -> CheckReport {
        let n = self.rank();
        let names = self.bundle.chart().names();
        let frame = self.bundle.frame();
        let mut report = CheckReport::new("algebroid");
        if self.pre_lie_only {
            report.fact("structure", "pre-Lie only (bivector is not Poisson)");
        }
        let mut jac = Defect::new(names);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (ea, eb, ec) = (self.unit(a), self.unit(b), self.unit(c));
                    let j1 = self.bracket(&self.bracket(&ea, &eb), &ec);
                    let j2 = self.bracket(&self.bracket(&eb, &ec), &ea);
                    let j3 = self.bracket(&self.bracket(&ec, &ea), &eb);
                    let total = add_fields(&add_fields(&j1, &j2), &j3);
                    jac.section(
                        &format!("({},{},{})", frame[a], frame[b], frame[c]),
                        frame,
                        &total,
                    );
                }
            }
        }
        report.push("jacobi", "[[a,b],c] + cyclic = 0", jac);
        let mut mor = Defect::new(names);
        for a in 0..n {
            for b in a + 1..n {
                let lhs = self.anchor_apply(&self.structure[a][b]);
                let rhs = lie_bracket(&self.anchor[a], &self.anchor[b]);
                mor.section(
                    &format!("({},{})", frame[a], frame[b]),
                    names,
                    &sub_fields(&lhs, &rhs),
                );
            }
        }
        report.push("anchor", "rho[a,b] = [rho a, rho b]", mor);
        report
    }

    /// Nijenhuis deformation `[a,b]_N = [Na,b] + [a,Nb] - N[a,b]` with anchor `rho o N`.
    /// `n[a]` is the image `N(e_a)`.
    pub fn deform(&self, n_map: &[VectorField]) -> Algebroid {
        let n = self.rank();
        let apply_n = |s: &[Poly]| -> VectorField {
            let mut out = vec![Poly::zero(self.dim()); n];
            for (a, sa) in s.iter().enumerate() {
                if !sa.is_zero() {
                    out = add_fields(&out, &scale_field(sa, &n_map[a]));
                }
            }
            out
        };
        let mut structure = vec![vec![vec![Poly::zero(self.dim()); n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                let (ea, eb) = (self.unit(a), self.unit(b));
                let t1 = self.bracket(&n_map[a], &eb);
                let t2 = self.bracket(&ea, &n_map[b]);
                let t3 = apply_n(&self.structure[a][b]);
                structure[a][b] = sub_fields(&add_fields(&t1, &t2), &t3);
            }
        }
        let anchor = (0..n).map(|a| self.anchor_apply(&n_map[a])).collect();
        Algebroid {
            bundle: self.bundle.clone(),
            anchor,
            structure,
            pre_lie_only: self.pre_lie_only,
        }
    }

    /// Algebroid Lie derivative of a section of `A ^ A` along `a`.
    pub fn lie_bisection(&self, a: &[Poly], p: &BiSection) -> BiSection {
        let n = self.rank();
        let ra = self.anchor_apply(a);
        let ad: Vec<VectorField> = (0..n).map(|d| self.bracket(a, &self.unit(d))).collect();
        let mut out = vec![vec![Poly::zero(self.dim()); n]; n];
        for b in 0..n {
            for c in 0..n {
                let mut v = apply_vf(&ra, &p[b][c]);
                for d in 0..n {
                    v += &(&ad[d][b] * &p[d][c]);
                    v += &(&ad[d][c] * &p[b][d]);
                }
                out[b][c] = v;
            }
        }
        out
    }
}

fn ensure_dual(a: &Algebroid, astar: &Algebroid) -> Result<()> {
    if a.bundle.chart() != astar.bundle.chart() {
        return Err(Error::ChartMismatch(
            "A and A* live on different charts".into(),
        ));
    }
    if a.bundle.frame() != astar.bundle.dual_frame()
        || a.bundle.dual_frame() != astar.bundle.frame()
    {
        return Err(Error::BundleMismatch(
            "A* is not defined on the dual frame of A".into(),
        ));
    }
    Ok(())
}

/// `delta(a)(mu1, mu2) = rho_*(mu1)<mu2,a> - rho_*(mu2)<mu1,a> - <[mu1,mu2]_*, a>`.
pub fn ce_differential(astar: &Algebroid, a: &[Poly]) -> Result<BiSection> {
    let n = astar.rank();
    if a.len() != n {
        return Err(Error::BundleMismatch(format!(
            "section has {} components, A* has rank {n}",
            a.len()
        )));
    }
    let mut out = vec![vec![Poly::zero(astar.dim()); n]; n];
    for b in 0..n {
        for c in 0..n {
            let mut v = &apply_vf(&astar.anchor[b], &a[c]) - &apply_vf(&astar.anchor[c], &a[b]);
            for (k, ak) in a.iter().enumerate() {
                v -= &(&astar.structure[b][c][k] * ak);
            }
            out[b][c] = v;
        }
    }
    Ok(out)
}

fn bisection_defect(d: &mut Defect, label: &str, frame: &[String], p: &BiSection) {
    for b in 0..p.len() {
        for c in b + 1..p.len() {
            d.poly(format!("{label} [{}^{}]", frame[b], frame[c]), &p[b][c]);
        }
    }
}

fn sub_bisection(p: &BiSection, q: &BiSection) -> BiSection {
    p.iter().zip(q).map(|(r, s)| sub_fields(r, s)).collect()
}

fn scale_bisection(f: &Poly, p: &BiSection) -> BiSection {
    p.iter().map(|r| scale_field(f, r)).collect()
}

/// Cocycle defect `delta[a,b] - [delta a, b] - [a, delta b]`.
fn cocycle_defect(a: &Algebroid, astar: &Algebroid, s: &[Poly], t: &[Poly]) -> BiSection {
    let lhs = ce_differential(astar, &a.bracket(s, t)).expect("ranks checked");
    let ds = ce_differential(astar, s).expect("ranks checked");
    let dt = ce_differential(astar, t).expect("ranks checked");
    // [P, b] = -L_b P for a bivector P
    let rhs1 = a.lie_bisection(t, &ds);
    let rhs2 = a.lie_bisection(s, &dt);
    let sum: BiSection = lhs
        .iter()
        .zip(&rhs1)
        .map(|(x, y)| add_fields(x, y))
        .collect();
    sub_bisection(&sum, &rhs2)
}

/// Lie bialgebroid compatibility of `(A, A*)`; both structures must validate.
pub fn check_bialgebroid(a: &Algebroid, astar: &Algebroid) -> Result<CheckReport> {
    ensure_dual(a, astar)?;
    if !a.validate().verdict() || a.pre_lie_only {
        return Err(Error::Precondition("A is not a Lie algebroid".into()));
    }
    if !astar.validate().verdict() || astar.pre_lie_only {
        return Err(Error::Precondition("A* is not a Lie algebroid".into()));
    }
    Ok(bialgebroid_report(a, astar))
}

/// Same as [`check_bialgebroid`] without validating the inputs.
pub fn bialgebroid_report(a: &Algebroid, astar: &Algebroid) -> CheckReport {
    let n = a.rank();
    let m = a.dim();
    let names = a.bundle.chart().names();
    let frame = a.bundle.frame();
    let mut report = CheckReport::new("bialgebroid");
    let mut coc = Defect::new(names);
    for i in 0..n {
        for j in i + 1..n {
            let d = cocycle_defect(a, astar, &a.unit(i), &a.unit(j));
            bisection_defect(&mut coc, &format!("({},{})", frame[i], frame[j]), frame, &d);
        }
    }
    report.push("cocycle", "delta[a,b] = [delta a, b] + [a, delta b]", coc);
    // The defect is a skew bidifferential operator of order at most two in
    // each slot, so monomial multipliers of degree <= 2 and <= 1 decide it.
    let one = Poly::one(m);
    let lin: Vec<(String, Poly)> = (0..m)
        .map(|v| (names[v].clone(), Poly::var(m, v)))
        .collect();
    let mut first = vec![("1".to_string(), one.clone())];
    first.extend(lin.iter().cloned());
    for v in 0..m {
        for w in v..m {
            first.push((format!("{}*{}", names[v], names[w]), &lin[v].1 * &lin[w].1));
        }
    }
    let mut second = vec![("1".to_string(), one)];
    second.extend(lin.iter().cloned());
    let mut ten = Defect::new(names);
    for i in 0..n {
        for j in 0..n {
            let base = cocycle_defect(a, astar, &a.unit(i), &a.unit(j));
            for (fl, f) in &first {
                for (gl, g) in &second {
                    if f.as_constant().is_some() && g.as_constant().is_some() {
                        continue;
                    }
                    let s = scale_field(f, &a.unit(i));
                    let t = scale_field(g, &a.unit(j));
                    let d = sub_bisection(
                        &cocycle_defect(a, astar, &s, &t),
                        &scale_bisection(&(f * g), &base),
                    );
                    let label = format!("({fl}*{},{gl}*{})", frame[i], frame[j]);
                    bisection_defect(&mut ten, &label, frame, &d);
                }
            }
        }
    }
    report.push(
        "cocycle tensoriality",
        "defect(f a, b) = f defect(a, b)",
        ten,
    );
    report
}

/// The bracket `[a,b]_D = [l a, b] + D_{rho b}(a)` on frame pairs, with its anchors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedBracket {
    /// `bracket[a][b] = [e_a, e_b]_D`.
    pub bracket: Vec<Vec<VectorField>>,
    pub anchor_l: Vec<VectorField>,
    pub anchor_r: Vec<VectorField>,
    pub skew: bool,
    /// Agreement with `[la,b] + [a,lb] - l[a,b]` on all frame pairs.
    pub matches_symmetric_form: bool,
}

fn ensure_on(a: &Algebroid, d: &GenDer) -> Result<()> {
    a.bundle.ensure_same(d.bundle())?;
    if d.degree() != 1 {
        return Err(Error::DegreeMismatch(
            "expected a generalized derivation of degree 1".into(),
        ));
    }
    Ok(())
}

fn l_section(d: &GenDer, s: &[Poly]) -> VectorField {
    d.l_apply(s).as_field()
}

pub fn deformed_bracket(a: &Algebroid, d: &GenDer) -> Result<DeformedBracket> {
    ensure_on(a, d)?;
    let n = a.rank();
    let mut bracket = vec![vec![Vec::new(); n]; n];
    let mut matches = true;
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (a.unit(i), a.unit(j));
            let li = l_section(d, &ei);
            let v = add_fields(&a.bracket(&li, &ej), &d.apply_along(&a.anchor[j], &ei));
            let alt = sub_fields(
                &add_fields(&a.bracket(&li, &ej), &a.bracket(&ei, &l_section(d, &ej))),
                &l_section(d, &a.structure[i][j]),
            );
            matches &= v == alt;
            bracket[i][j] = v;
        }
    }
    let skew = (0..n).all(|i| {
        (0..n).all(|j| {
            add_fields(&bracket[i][j], &bracket[j][i])
                .iter()
                .all(Poly::is_zero)
        })
    });
    let anchor_l = (0..n)
        .map(|i| a.anchor_apply(&l_section(d, &a.unit(i))))
        .collect();
    let anchor_r = (0..n).map(|i| d.r().apply(&a.anchor[i])).collect();
    Ok(DeformedBracket {
        bracket,
        anchor_l,
        anchor_r,
        skew,
        matches_symmetric_form: matches,
    })
}

/// `D^{r,T}_X(Y) = [Y, rX] - r[Y, X]`.
pub fn drt_along(r: &VVForm, x: &[Poly], y: &[Poly]) -> VectorField {
    sub_fields(&lie_bracket(y, &r.apply(x)), &r.apply(&lie_bracket(y, x)))
}

struct ImDefects<'a> {
    a: &'a Algebroid,
    d: &'a GenDer,
}

impl ImDefects<'_> {
    fn dx(&self, x: &[Poly], s: &[Poly]) -> VectorField {
        self.d.apply_along(x, s)
    }

    fn im1(&self, s: &[Poly], t: &[Poly], x: &[Poly]) -> VectorField {
        let a = self.a;
        let lhs = self.dx(x, &a.bracket(s, t));
        let mut rhs = sub_fields(&a.bracket(s, &self.dx(x, t)), &a.bracket(t, &self.dx(x, s)));
        rhs = add_fields(&rhs, &self.dx(&lie_bracket(&a.anchor_apply(t), x), s));
        rhs = sub_fields(&rhs, &self.dx(&lie_bracket(&a.anchor_apply(s), x), t));
        sub_fields(&lhs, &rhs)
    }

    fn im2(&self, s: &[Poly], t: &[Poly]) -> VectorField {
        let a = self.a;
        let lhs = l_section(self.d, &a.bracket(s, t));
        let rhs = sub_fields(
            &a.bracket(s, &l_section(self.d, t)),
            &self.dx(&a.anchor_apply(t), s),
        );
        sub_fields(&lhs, &rhs)
    }

    fn im3(&self, s: &[Poly], x: &[Poly]) -> VectorField {
        let a = self.a;
        sub_fields(
            &drt_along(self.d.r(), x, &a.anchor_apply(s)),
            &a.anchor_apply(&self.dx(x, s)),
        )
    }
}

/// The IM equations for a degree-1 generalized derivation on an algebroid.
pub fn check_im(a: &Algebroid, d: &GenDer) -> Result<CheckReport> {
    ensure_on(a, d)?;
    let (m, n) = (a.dim(), a.rank());
    let names = a.bundle.chart().names();
    let frame = a.bundle.frame();
    let im = ImDefects { a, d };
    let mut report = CheckReport::new("im");
    let coords: Vec<VectorField> = (0..m).map(|i| coord_field(m, i)).collect();
    let vars: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
    let mut ten = Defect::new(names);

    let mut d1 = Defect::new(names);
    for i in 0..n {
        for j in i + 1..n {
            for (c, x) in coords.iter().enumerate() {
                let (ei, ej) = (a.unit(i), a.unit(j));
                let base = im.im1(&ei, &ej, x);
                let label = format!("({},{}; d/d{})", frame[i], frame[j], names[c]);
                d1.section(&label, frame, &base);
                for (v, xv) in vars.iter().enumerate() {
                    let fb = scale_field(xv, &base);
                    for (slot, val) in [
                        ("a", im.im1(&scale_field(xv, &ei), &ej, x)),
                        ("b", im.im1(&ei, &scale_field(xv, &ej), x)),
                        ("X", im.im1(&ei, &ej, &scale_field(xv, x))),
                    ] {
                        ten.section(
                            &format!("IM1 {label} {slot}*{}", names[v]),
                            frame,
                            &sub_fields(&val, &fb),
                        );
                    }
                }
            }
        }
    }
    report.push(
        "IM1",
        "D_X[a,b] = [a,D_X b] - [b,D_X a] + D_[rho b,X] a - D_[rho a,X] b",
        d1,
    );

    let mut d2 = Defect::new(names);
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (a.unit(i), a.unit(j));
            let base = im.im2(&ei, &ej);
            let label = format!("({},{})", frame[i], frame[j]);
            d2.section(&label, frame, &base);
            for (v, xv) in vars.iter().enumerate() {
                let fb = scale_field(xv, &base);
                for (slot, val) in [
                    ("a", im.im2(&scale_field(xv, &ei), &ej)),
                    ("b", im.im2(&ei, &scale_field(xv, &ej))),
                ] {
                    ten.section(
                        &format!("IM2 {label} {slot}*{}", names[v]),
                        frame,
                        &sub_fields(&val, &fb),
                    );
                }
            }
        }
    }
    report.push("IM2", "l[a,b] = [a, l b] - D_{rho b} a", d2);

    let mut d3 = Defect::new(names);
    for i in 0..n {
        for (c, x) in coords.iter().enumerate() {
            let ei = a.unit(i);
            let base = im.im3(&ei, x);
            let label = format!("({}; d/d{})", frame[i], names[c]);
            d3.section(&label, names, &base);
            for (v, xv) in vars.iter().enumerate() {
                let fb = scale_field(xv, &base);
                for (slot, val) in [
                    ("a", im.im3(&scale_field(xv, &ei), x)),
                    ("X", im.im3(&ei, &scale_field(xv, x))),
                ] {
                    ten.section(
                        &format!("IM3 {label} {slot}*{}", names[v]),
                        names,
                        &sub_fields(&val, &fb),
                    );
                }
            }
        }
    }
    report.push("IM3", "D^{r,T}_X(rho a) = rho(D_X a)", d3);

    let mut d4 = Defect::new(names);
    for i in 0..n {
        let ei = a.unit(i);
        let v = sub_fields(
            &d.r().apply(&a.anchor[i]),
            &a.anchor_apply(&l_section(d, &ei)),
        );
        d4.section(&format!("({})", frame[i]), names, &v);
    }
    report.push("IM4", "r o rho = rho o l", d4);
    report.push("tensoriality", "IM defects scale linearly", ten);
    Ok(report)
}

/// `D^theta_X(a) = [a, theta X] - theta[rho a, X]`, `l = theta o rho`, `r = rho o theta`.
/// `theta[i]` is `theta(d/dx_i)` as a section of `A`.
pub fn build_from_theta(a: &Algebroid, theta: &[VectorField]) -> Result<GenDer> {
    let (m, n) = (a.dim(), a.rank());
    if theta.len() != m || theta.iter().any(|s| s.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "theta must map {m} coordinate fields to sections of rank {n}"
        )));
    }
    let theta_of = |y: &[Poly]| -> VectorField {
        let mut out = vec![Poly::zero(m); n];
        for (i, yi) in y.iter().enumerate() {
            if !yi.is_zero() {
                out = add_fields(&out, &scale_field(yi, &theta[i]));
            }
        }
        out
    };
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let ei = a.unit(i);
        let mut comps = vec![DiffForm::zero(m, 1); n];
        for c in 0..m {
            let x = coord_field(m, c);
            let v = sub_fields(
                &a.bracket(&ei, &theta[c]),
                &theta_of(&lie_bracket(&a.anchor[i], &x)),
            );
            for b in 0..n {
                comps[b] = &comps[b] + &DiffForm::basis(m, vec![c], v[b].clone());
            }
        }
        d.push(VVForm::from_comps(m, 1, comps));
    }
    let l = (0..n)
        .map(|i| VVForm::from_field(m, &theta_of(&a.anchor[i])))
        .collect();
    let rm: Vec<Vec<Poly>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|c| a.anchor_apply(&theta[c])[j].clone())
                .collect()
        })
        .collect();
    let r = if m == 0 {
        VVForm::zero(0, 1, 0)
    } else {
        VVForm::endomorphism(&rm)
    };
    GenDer::new(a.bundle.clone(), 1, d, l, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gder::{build_drt, build_drtstar, build_from_connection};
    use crate::poly::{parse_poly, Chart, Limits};
    use std::sync::Arc;

    fn chart() -> Arc<Chart> {
        Chart::new(["x", "y"]).unwrap()
    }
    fn p(s: &str) -> Poly {
        parse_poly(s, &chart(), &Limits::default()).unwrap()
    }
    fn c0(s: i64) -> Poly {
        Poly::integer(0, s)
    }
    fn pi0() -> Multivector {
        Multivector::bivector(2, [(0, 1, p("1"))])
    }
    fn tm() -> Algebroid {
        Algebroid::tangent(FramedBundle::tangent(chart()))
    }
    fn tstar(pi: &Multivector) -> Algebroid {
        Algebroid::cotangent_of_poisson(FramedBundle::cotangent(chart()), pi).unwrap()
    }
    fn point_bundle(rank: usize, name: &str, dual: &str) -> FramedBundle {
        FramedBundle::trivial(Chart::point(), rank, name, dual)
    }
    fn aff2() -> (Algebroid, Algebroid) {
        let g = Algebroid::from_brackets(
            point_bundle(2, "e", "eps"),
            vec![vec![]; 2],
            [(0, 1, vec![c0(0), c0(1)])],
        )
        .unwrap();
        let gs = Algebroid::from_brackets(
            point_bundle(2, "eps", "e"),
            vec![vec![]; 2],
            [(0, 1, vec![c0(0), c0(-1)])],
        )
        .unwrap();
        (g, gs)
    }
    fn xid() -> VVForm {
        VVForm::scalar_endomorphism(2, &p("x"))
    }
    fn j2() -> VVForm {
        VVForm::endomorphism(&[vec![p("0"), p("-1")], vec![p("1"), p("0")]])
    }

    #[test]
    fn validate_examples() {
        assert!(tm().validate().verdict());
        let (g, _) = aff2();
        assert!(g.validate().verdict());
        let bad = Algebroid::from_brackets(
            point_bundle(3, "e", "eps"),
            vec![vec![]; 3],
            [
                (0, 1, vec![c0(1), c0(0), c0(0)]),
                (0, 2, vec![c0(0), c0(1), c0(0)]),
                (1, 2, vec![c0(0), c0(0), c0(1)]),
            ],
        )
        .unwrap();
        // this triple does satisfy Jacobi
        assert!(bad.validate().verdict());
        let bad = Algebroid::from_brackets(
            point_bundle(3, "e", "eps"),
            vec![vec![]; 3],
            [
                (0, 1, vec![c0(0), c0(0), c0(1)]),
                (0, 2, vec![c0(1), c0(0), c0(0)]),
            ],
        )
        .unwrap();
        let r = bad.validate();
        assert!(!r.verdict());
        assert!(!r.entry("jacobi").unwrap().is_zero());
    }

    #[test]
    fn cotangent_examples() {
        let a = tstar(&pi0());
        assert!(a.structure(0, 1).iter().all(Poly::is_zero));
        assert_eq!(a.anchor()[0], vec![p("0"), p("1")]);
        assert_eq!(a.anchor()[1], vec![p("-1"), p("0")]);
        let z = tstar(&Multivector::zero(2, 2));
        assert!(z.anchor().iter().all(|v| v.iter().all(Poly::is_zero)));
        let px = tstar(&Multivector::bivector(2, [(0, 1, p("x"))]));
        // [dx, dy] = d(x) = dx
        assert_eq!(px.structure(0, 1), &vec![p("1"), p("0")]);
        assert!(px.validate().verdict());
        assert!(!px.is_pre_lie_only());
    }

    #[test]
    fn bracket_oracle_on_cotangent() {
        // [a,b]_pi = L_{pi# a} b - i_{pi# b} da on arbitrary 1-forms
        let pi = Multivector::bivector(2, [(0, 1, p("x*y + 1"))]);
        let a = tstar(&pi);
        let s = vec![p("y"), p("x^2")];
        let t = vec![p("1"), p("x*y")];
        let (fs, ft) = (crate::forms::one_form(&s), crate::forms::one_form(&t));
        let oracle = &ft.lie(&sharp_field(&pi, &fs)) - &fs.d().interior(&sharp_field(&pi, &ft));
        assert_eq!(a.bracket(&s, &t), one_form_coeffs(&oracle));
    }

    #[test]
    fn non_poisson_is_flagged() {
        let c3 = Chart::new(["x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &c3, &Limits::default()).unwrap();
        let pi = Multivector::bivector(3, [(0, 1, q("1")), (1, 2, q("y"))]);
        let a = Algebroid::cotangent_of_poisson(FramedBundle::cotangent(c3), &pi).unwrap();
        assert!(a.is_pre_lie_only());
        assert!(!a.validate().verdict());
    }

    #[test]
    fn ce_differential_examples() {
        let (g, gs) = aff2();
        let d1 = ce_differential(&gs, &g.unit(0)).unwrap();
        let d2 = ce_differential(&gs, &g.unit(1)).unwrap();
        assert!(d1.iter().flatten().all(Poly::is_zero));
        assert_eq!(d2[0][1], c0(1));
        assert_eq!(d2[1][0], c0(-1));
        let ab =
            Algebroid::from_brackets(point_bundle(2, "eps", "e"), vec![vec![]; 2], []).unwrap();
        assert!(ce_differential(&ab, &g.unit(1))
            .unwrap()
            .iter()
            .flatten()
            .all(Poly::is_zero));
        let ts = tstar(&pi0());
        assert!(ce_differential(&ts, &[p("1"), p("0")])
            .unwrap()
            .iter()
            .flatten()
            .all(Poly::is_zero));
    }

    #[test]
    fn ce_differential_is_a_derivation() {
        let pi = Multivector::bivector(2, [(0, 1, p("x + y^2"))]);
        let ts = tstar(&pi);
        let a = vec![p("y"), p("x*y")];
        let f = p("x^2 + y");
        let fa = scale_field(&f, &a);
        let lhs = ce_differential(&ts, &fa).unwrap();
        let da = ce_differential(&ts, &a).unwrap();
        // d_* f = sum_b rho_*(eps^b)(f) eps... as a section of A: component b
        let dsf: Vec<Poly> = (0..2).map(|b| apply_vf(&ts.anchor()[b], &f)).collect();
        for b in 0..2 {
            for c in 0..2 {
                let wedge = &(&dsf[b] * &a[c]) - &(&dsf[c] * &a[b]);
                assert_eq!(lhs[b][c], &(&f * &da[b][c]) + &wedge);
            }
        }
    }

    #[test]
    fn bialgebroid_examples() {
        let r = check_bialgebroid(&tm(), &tstar(&pi0())).unwrap();
        assert!(r.verdict(), "{r}");
        let (g, gs) = aff2();
        assert!(check_bialgebroid(&g, &gs).unwrap().verdict());
        let px = tstar(&Multivector::bivector(2, [(0, 1, p("x^2 + y"))]));
        assert!(check_bialgebroid(&tm(), &px).unwrap().verdict());
    }

    #[test]
    fn bialgebra_checker_detects_failure() {
        // sl2-like bracket on a 3-dimensional algebra with a non-cocycle cobracket
        let e = point_bundle(3, "e", "eps");
        let g = Algebroid::from_brackets(
            e,
            vec![vec![]; 3],
            [
                (0, 1, vec![c0(0), c0(1), c0(0)]),
                (0, 2, vec![c0(0), c0(0), c0(-1)]),
                (1, 2, vec![c0(1), c0(0), c0(0)]),
            ],
        )
        .unwrap();
        assert!(g.validate().verdict());
        // cobracket dual to [eps1, eps2] = eps1 (Jacobi holds: only one nonzero bracket)
        let gs = Algebroid::from_brackets(
            point_bundle(3, "eps", "e"),
            vec![vec![]; 3],
            [(0, 1, vec![c0(1), c0(0), c0(0)])],
        )
        .unwrap();
        assert!(gs.validate().verdict());
        let r = check_bialgebroid(&g, &gs).unwrap();
        assert!(!r.verdict());
    }

    #[test]
    fn bialgebroid_requires_lie_inputs() {
        let c3 = Chart::new(["x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &c3, &Limits::default()).unwrap();
        let pi = Multivector::bivector(3, [(0, 1, q("1")), (1, 2, q("y"))]);
        let a = Algebroid::cotangent_of_poisson(FramedBundle::cotangent(c3.clone()), &pi).unwrap();
        let t = Algebroid::tangent(FramedBundle::tangent(c3));
        assert!(matches!(
            check_bialgebroid(&t, &a),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn deformed_bracket_examples() {
        let d = build_drt(FramedBundle::tangent(chart()), &xid()).unwrap();
        let b = deformed_bracket(&tm(), &d).unwrap();
        assert_eq!(b.bracket[0][1], vec![p("0"), p("1")]);
        assert!(b.skew && b.matches_symmetric_form);
        let z = deformed_bracket(&tm(), &GenDer::zero(FramedBundle::tangent(chart()), 1)).unwrap();
        assert!(z.bracket.iter().flatten().flatten().all(Poly::is_zero));
        let dj = build_drt(FramedBundle::tangent(chart()), &j2()).unwrap();
        assert!(deformed_bracket(&tm(), &dj).unwrap().bracket[0][1]
            .iter()
            .all(Poly::is_zero));
    }

    #[test]
    fn im_examples() {
        let d = build_drt(FramedBundle::tangent(chart()), &xid()).unwrap();
        let r = check_im(&tm(), &d).unwrap();
        assert!(r.verdict(), "{r}");
        let gamma = vec![vec![vec![p("0"); 2]; 2]; 2];
        let l = (0..2)
            .map(|a| VVForm::from_field(2, &coord_field(2, a)))
            .collect();
        let conn = build_from_connection(
            FramedBundle::tangent(chart()),
            &gamma,
            l,
            VVForm::zero(2, 1, 2),
        )
        .unwrap();
        let r = check_im(&tm(), &conn).unwrap();
        assert!(!r.verdict());
        assert!(!r.entry("IM4").unwrap().is_zero());
        let ds = build_drtstar(FramedBundle::cotangent(chart()), &xid()).unwrap();
        let r = check_im(&tstar(&pi0()), &ds).unwrap();
        assert!(r.verdict(), "{r}");
    }

    #[test]
    fn im_on_tangent_forces_drt() {
        let r = VVForm::endomorphism(&[vec![p("x*y"), p("y^2")], vec![p("x + 1"), p("x^2")]]);
        let d = build_drt(FramedBundle::tangent(chart()), &r).unwrap();
        assert!(check_im(&tm(), &d).unwrap().verdict());
        // same symbol, different D
        let gamma = vec![vec![vec![p("0"); 2]; 2]; 2];
        let l = d.l_on_frame().to_vec();
        let other = build_from_connection(FramedBundle::tangent(chart()), &gamma, l, r).unwrap();
        assert!(!check_im(&tm(), &other).unwrap().verdict());
    }

    #[test]
    fn theta_construction() {
        let d = build_from_theta(&tm(), &[vec![p("x"), p("0")], vec![p("0"), p("x")]]).unwrap();
        assert_eq!(
            d,
            build_drt(FramedBundle::tangent(chart()), &xid()).unwrap()
        );
        let z = build_from_theta(&tm(), &[vec![p("0"); 2], vec![p("0"); 2]]).unwrap();
        assert!(z.is_zero());
        let (g, _) = aff2();
        assert!(build_from_theta(&g, &[]).unwrap().is_zero());
        let a = tstar(&Multivector::bivector(2, [(0, 1, p("x"))]));
        let th = build_from_theta(&a, &[vec![p("y"), p("1")], vec![p("x"), p("0")]]).unwrap();
        assert!(check_im(&a, &th).unwrap().verdict());
    }

    #[test]
    fn nijenhuis_deformation() {
        let n_map: Vec<VectorField> = (0..2)
            .map(|a| scale_field(&p("x"), &coord_field(2, a)))
            .collect();
        let d = tm().deform(&n_map);
        assert_eq!(d.structure(0, 1), &vec![p("0"), p("1")]);
        assert!(d.validate().verdict());
    }
}
