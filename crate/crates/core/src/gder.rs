//! Generalized derivations `(D, l, r)` of degree `k` on framed bundles.
//!
//! `D` is stored on frame sections only and extended by the Leibniz rule
//! `D(f u) = f D(u) + df ^ l(u) - r^*(df) (x) u`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{coord_field, multi_indices, DiffForm, VVForm, VectorField};
use crate::poly::{Chart, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BundleKind {
    Tangent,
    Cotangent,
    Generic,
}

/// A vector bundle over a chart with a global frame `u_1..u_n` and its dual frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FramedBundle {
    chart: Arc<Chart>,
    frame: Vec<String>,
    dual_frame: Vec<String>,
    kind: BundleKind,
}

impl FramedBundle {
    pub fn new(chart: Arc<Chart>, frame: Vec<String>, dual_frame: Vec<String>) -> Result<Self> {
        if frame.len() != dual_frame.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} frame names but {} dual frame names",
                frame.len(),
                dual_frame.len()
            )));
        }
        Ok(FramedBundle {
            chart,
            frame,
            dual_frame,
            kind: BundleKind::Generic,
        })
    }

    /// Bundle of the given rank with frame `name_1..` and dual frame `dual_1..`.
    pub fn trivial(chart: Arc<Chart>, rank: usize, name: &str, dual: &str) -> Self {
        FramedBundle {
            chart,
            frame: (1..=rank).map(|i| format!("{name}{i}")).collect(),
            dual_frame: (1..=rank).map(|i| format!("{dual}{i}")).collect(),
            kind: BundleKind::Generic,
        }
    }

    pub fn tangent(chart: Arc<Chart>) -> Self {
        let frame = chart.names().iter().map(|n| format!("d/d{n}")).collect();
        let dual_frame = chart.names().iter().map(|n| format!("d{n}")).collect();
        FramedBundle {
            chart,
            frame,
            dual_frame,
            kind: BundleKind::Tangent,
        }
    }

    pub fn cotangent(chart: Arc<Chart>) -> Self {
        FramedBundle::tangent(chart).dual()
    }

    pub fn dual(&self) -> Self {
        FramedBundle {
            chart: self.chart.clone(),
            frame: self.dual_frame.clone(),
            dual_frame: self.frame.clone(),
            kind: match self.kind {
                BundleKind::Tangent => BundleKind::Cotangent,
                BundleKind::Cotangent => BundleKind::Tangent,
                BundleKind::Generic => BundleKind::Generic,
            },
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn dual_frame(&self) -> &[String] {
        &self.dual_frame
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    /// Frame element `u_a` as a coefficient vector.
    pub fn unit(&self, a: usize) -> VectorField {
        let n = self.dim();
        (0..self.rank())
            .map(|b| if a == b { Poly::one(n) } else { Poly::zero(n) })
            .collect()
    }

    pub fn ensure_same(&self, other: &FramedBundle) -> Result<()> {
        if self.chart != other.chart || self.frame != other.frame {
            return Err(Error::BundleMismatch(format!(
                "frame ({}) vs ({})",
                self.frame.join(", "),
                other.frame.join(", ")
            )));
        }
        Ok(())
    }

    fn ensure_section(&self, s: &[Poly]) -> Result<()> {
        if s.len() != self.rank() {
            return Err(Error::BundleMismatch(format!(
                "section has {} components, bundle rank is {}",
                s.len(),
                self.rank()
            )));
        }
        if s.iter().any(|p| p.nvars() != self.dim()) {
            return Err(Error::ChartMismatch(
                "section coefficients on another chart".into(),
            ));
        }
        Ok(())
    }
}

/// `r^*(df) = sum_j d_j f r^j` for a tangent-valued form `r`.
pub fn pullback_df(r: &VVForm, f: &Poly) -> DiffForm {
    let mut out = DiffForm::zero(r.dim(), r.degree());
    for j in 0..r.dim() {
        let dj = f.partial(j);
        if !dj.is_zero() {
            out = &out + &r.comp(j).scale(&dj);
        }
    }
    out
}

/// Generalized derivation of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenDer {
    bundle: FramedBundle,
    degree: usize,
    d: Vec<VVForm>,
    l: Vec<VVForm>,
    r: VVForm,
}

impl GenDer {
    /// Assemble from `D(u_a)`, `l(u_a)` and `r`. For `k = 0`, `l` must be empty.
    pub fn new(
        bundle: FramedBundle,
        degree: usize,
        d: Vec<VVForm>,
        l: Vec<VVForm>,
        r: VVForm,
    ) -> Result<Self> {
        let n = bundle.rank();
        let m = bundle.dim();
        if d.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "D given on {} sections, rank is {n}",
                d.len()
            )));
        }
        for x in &d {
            if x.degree() != degree || x.rank() != n || x.dim() != m {
                return Err(Error::DegreeMismatch(format!(
                    "D(u) must be a {degree}-form with {n} components on a {m}-dimensional chart"
                )));
            }
        }
        if degree == 0 {
            if !l.is_empty() {
                return Err(Error::DegreeMismatch(
                    "degree-0 derivations carry no l".into(),
                ));
            }
        } else {
            if l.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "l given on {} sections, rank is {n}",
                    l.len()
                )));
            }
            for x in &l {
                if x.degree() != degree - 1 || x.rank() != n || x.dim() != m {
                    return Err(Error::DegreeMismatch(format!(
                        "l(u) must be a {}-form with {n} components",
                        degree - 1
                    )));
                }
            }
        }
        if r.degree() != degree || r.rank() != m || r.dim() != m {
            return Err(Error::DegreeMismatch(format!(
                "r must be a tangent-valued {degree}-form"
            )));
        }
        Ok(GenDer {
            bundle,
            degree,
            d,
            l,
            r,
        })
    }

    pub fn zero(bundle: FramedBundle, degree: usize) -> Self {
        let (n, m) = (bundle.rank(), bundle.dim());
        let l = if degree == 0 {
            Vec::new()
        } else {
            vec![VVForm::zero(m, degree - 1, n); n]
        };
        GenDer {
            d: vec![VVForm::zero(m, degree, n); n],
            l,
            r: VVForm::zero(m, degree, m),
            bundle,
            degree,
        }
    }

    pub fn bundle(&self) -> &FramedBundle {
        &self.bundle
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `D(u_a)`.
    pub fn d_on_frame(&self) -> &[VVForm] {
        &self.d
    }

    /// `l(u_a)`; empty in degree 0.
    pub fn l_on_frame(&self) -> &[VVForm] {
        &self.l
    }

    pub fn r(&self) -> &VVForm {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(VVForm::is_zero) && self.l.iter().all(VVForm::is_zero) && self.r.is_zero()
    }

    fn dim(&self) -> usize {
        self.bundle.dim()
    }

    fn rank(&self) -> usize {
        self.bundle.rank()
    }

    /// `l` applied to a section (zero-degree form in degree 0 is never requested).
    pub fn l_apply(&self, s: &[Poly]) -> VVForm {
        assert!(self.degree > 0);
        let mut out = VVForm::zero(self.dim(), self.degree - 1, self.rank());
        for (a, sa) in s.iter().enumerate() {
            if !sa.is_zero() {
                out = &out + &self.l[a].scale(sa);
            }
        }
        out
    }

    /// `l` extended to `E`-valued forms: `l(eta^b u_b) = eta^b ^ l(u_b)`.
    pub fn l_extend(&self, eta: &VVForm) -> VVForm {
        assert!(self.degree > 0);
        let mut out = VVForm::zero(self.dim(), eta.degree() + self.degree - 1, self.rank());
        for (b, eb) in eta.comps().iter().enumerate() {
            if !eb.is_zero() {
                out = &out + &self.l[b].wedge_left(eb);
            }
        }
        out
    }

    /// `D(s)` for a section given in frame coefficients.
    pub fn apply(&self, s: &[Poly]) -> Result<VVForm> {
        self.bundle.ensure_section(s)?;
        Ok(self.apply_unchecked(s))
    }

    pub(crate) fn apply_unchecked(&self, s: &[Poly]) -> VVForm {
        let eta = VVForm::from_field(self.dim(), s);
        self.extend_unchecked(&eta)
    }

    /// Extension to `E`-valued forms:
    /// `D(a (x) u) = a ^ D(u) + (-1)^j (da ^ l(u) - (-1)^{j(k-1)} L_r a (x) u)`.
    pub fn extend(&self, eta: &VVForm) -> Result<VVForm> {
        if eta.rank() != self.rank() {
            return Err(Error::BundleMismatch(format!(
                "form with {} value components on a rank-{} bundle",
                eta.rank(),
                self.rank()
            )));
        }
        if eta.dim() != self.dim() {
            return Err(Error::ChartMismatch("form on another chart".into()));
        }
        Ok(self.extend_unchecked(eta))
    }

    pub(crate) fn extend_unchecked(&self, eta: &VVForm) -> VVForm {
        let j = eta.degree();
        let k = self.degree;
        let (m, n) = (self.dim(), self.rank());
        let mut out = VVForm::zero(m, j + k, n);
        let sign_j = j % 2 == 1;
        let sign_lie = (j * (k + 1)) % 2 == 1; // (-1)^{j(k-1)}
        for (b, alpha) in eta.comps().iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            out = &out + &self.d[b].wedge_left(alpha);
            let mut tail = VVForm::zero(m, j + k, n);
            if k > 0 {
                tail = &tail + &self.l[b].wedge_left(&alpha.d());
            }
            let lie = self.r.lie_of(alpha);
            let mut unit = VVForm::zero(m, j + k, n);
            unit = &unit + &VVForm::decomposable(&lie, &self.bundle.unit(b));
            tail = if sign_lie {
                &tail + &unit
            } else {
                &tail - &unit
            };
            out = if sign_j { &out - &tail } else { &out + &tail };
        }
        out
    }

    /// Graded bracket.
    pub fn bracket(&self, other: &GenDer) -> Result<GenDer> {
        self.bundle.ensure_same(&other.bundle)?;
        Ok(self.bracket_unchecked(other))
    }

    pub(crate) fn bracket_unchecked(&self, other: &GenDer) -> GenDer {
        let (k1, k2) = (self.degree, other.degree);
        let k = k1 + k2;
        let n = self.rank();
        let swap_neg = (k1 * k2) % 2 == 1;
        let combine = |a: VVForm, b: VVForm| if swap_neg { &a + &b } else { &a - &b };
        let mut d = Vec::with_capacity(n);
        for a in 0..n {
            let d21 = other.extend_unchecked(&self.d[a]);
            let d12 = self.extend_unchecked(&other.d[a]);
            d.push(combine(d21, d12));
        }
        let mut l = Vec::new();
        if k > 0 {
            for a in 0..n {
                // [D2, l1] - (-1)^{k1 k2} [D1, l2]
                let c1 = if k1 > 0 {
                    graded_commutator(other, self, a)
                } else {
                    None
                };
                let c2 = if k2 > 0 {
                    graded_commutator(self, other, a)
                } else {
                    None
                };
                let zero = VVForm::zero(self.dim(), k - 1, n);
                l.push(combine(
                    c1.unwrap_or_else(|| zero.clone()),
                    c2.unwrap_or(zero),
                ));
            }
        }
        GenDer {
            bundle: self.bundle.clone(),
            degree: k,
            d,
            l,
            r: self.r.fn_bracket(&other.r),
        }
    }

    /// Dual generalized derivation on `E^*`.
    pub fn dual(&self) -> GenDer {
        let (m, n, k) = (self.dim(), self.rank(), self.degree);
        let mut d = Vec::with_capacity(n);
        for a in 0..n {
            let comps: Vec<DiffForm> = (0..n)
                .map(|b| {
                    let mut c = -self.d[b].comp(a);
                    if k > 0 {
                        c = &c + &self.l[b].comp(a).d();
                    }
                    c
                })
                .collect();
            d.push(VVForm::from_comps(m, k, comps));
        }
        let l = if k == 0 {
            Vec::new()
        } else {
            (0..n)
                .map(|a| {
                    VVForm::from_comps(
                        m,
                        k - 1,
                        (0..n).map(|b| self.l[b].comp(a).clone()).collect(),
                    )
                })
                .collect()
        };
        GenDer {
            bundle: self.bundle.dual(),
            degree: k,
            d,
            l,
            r: self.r.clone(),
        }
    }

    /// Symbol `(l, r)`.
    pub fn symbol(&self) -> (&[VVForm], &VVForm) {
        (&self.l, &self.r)
    }

    /// `D_X(s)` for degree 1.
    pub fn apply_along(&self, x: &[Poly], s: &[Poly]) -> VectorField {
        assert_eq!(self.degree, 1);
        self.apply_unchecked(s).apply(x)
    }

    /// Scalar multiple by a constant.
    pub fn scale_int(&self, c: i64) -> GenDer {
        GenDer {
            bundle: self.bundle.clone(),
            degree: self.degree,
            d: self.d.iter().map(|x| x.scale_int(c)).collect(),
            l: self.l.iter().map(|x| x.scale_int(c)).collect(),
            r: self.r.scale_int(c),
        }
    }

    pub fn add(&self, other: &GenDer) -> Result<GenDer> {
        self.bundle.ensure_same(&other.bundle)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(
                "adding derivations of different degree".into(),
            ));
        }
        Ok(GenDer {
            bundle: self.bundle.clone(),
            degree: self.degree,
            d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect(),
            l: self.l.iter().zip(&other.l).map(|(a, b)| a + b).collect(),
            r: &self.r + &other.r,
        })
    }

    /// Componentwise difference, used to report defects.
    pub fn difference(&self, other: &GenDer) -> Result<GenDer> {
        self.add(&other.scale_int(-1))
    }
}

/// `[Dp, lq](u_a) = Dp(lq(u_a)) - (-1)^{kp (kq - 1)} lq(Dp(u_a))`.
fn graded_commutator(p: &GenDer, q: &GenDer, a: usize) -> Option<VVForm> {
    let lq = &q.l[a];
    let first = p.extend_unchecked(lq);
    let second = q.l_extend(&p.d[a]);
    let neg = (p.degree * (q.degree - 1)) % 2 == 1;
    Some(if neg {
        &first + &second
    } else {
        &first - &second
    })
}

/// `D^{r,T}(Y) = [Y, r]` on the tangent bundle, with symbol `(r(., ...), r)`.
pub fn build_drt(tm: FramedBundle, r: &VVForm) -> Result<GenDer> {
    let m = tm.dim();
    if r.dim() != m || r.rank() != m {
        return Err(Error::ChartMismatch(
            "r does not live on the bundle's chart".into(),
        ));
    }
    let k = r.degree();
    let d = (0..m)
        .map(|a| VVForm::from_field(m, &coord_field(m, a)).fn_bracket(r))
        .collect();
    let l = if k == 0 {
        Vec::new()
    } else {
        (0..m).map(|a| r.interior(&coord_field(m, a))).collect()
    };
    GenDer::new(tm, k, d, l, r.clone())
}

/// `D^{r,T*}_X(a) = L_X(r^* a) - L_{rX} a` on the cotangent bundle, symbol `(r^*, r)`.
pub fn build_drtstar(tstar: FramedBundle, r: &VVForm) -> Result<GenDer> {
    let m = tstar.dim();
    if r.degree() != 1 {
        return Err(Error::Unsupported(
            "D^{r,T*} is built directly only in degree 1".into(),
        ));
    }
    if r.dim() != m || r.rank() != m {
        return Err(Error::ChartMismatch(
            "r does not live on the bundle's chart".into(),
        ));
    }
    let rm = r.matrix();
    let mut d = Vec::with_capacity(m);
    let mut l = Vec::with_capacity(m);
    for a in 0..m {
        // D(dx_a)^b = sum_c (d_c r^a_b - d_b r^a_c) dx_c
        let comps: Vec<DiffForm> = (0..m)
            .map(|b| {
                let coeffs: Vec<Poly> = (0..m)
                    .map(|c| rm[a][b].partial(c) - rm[a][c].partial(b))
                    .collect();
                crate::forms::one_form(&coeffs)
            })
            .collect();
        d.push(VVForm::from_comps(m, 1, comps));
        l.push(VVForm::from_field(m, &rm[a]));
    }
    GenDer::new(tstar, 1, d, l, r.clone())
}

/// Connection coefficients: `gamma[i][a]` is `nabla_{d/dx_i} u_a` in frame coordinates.
pub type Connection = Vec<Vec<VectorField>>;

/// `nabla_X s`.
pub fn covariant(gamma: &Connection, x: &[Poly], s: &[Poly]) -> VectorField {
    let n = s.len();
    let nv = x.first().map(Poly::nvars).unwrap_or(0);
    let mut out = vec![Poly::zero(nv); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for b in 0..n {
            out[b] += &(xi * &s[b].partial(i));
        }
        for (a, sa) in s.iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            let f = xi * sa;
            for b in 0..n {
                out[b] += &(&f * &gamma[i][a][b]);
            }
        }
    }
    out
}

/// `D^nabla_{(X_1..X_k)}(u) = sum_i (-1)^{i+1} l_{(.. X_i omitted ..)}(nabla_{X_i} u) - nabla_{r(X_1..X_k)} u`.
pub fn build_from_connection(
    bundle: FramedBundle,
    gamma: &Connection,
    l: Vec<VVForm>,
    r: VVForm,
) -> Result<GenDer> {
    let (m, n) = (bundle.dim(), bundle.rank());
    let k = r.degree();
    if gamma.len() != m
        || gamma
            .iter()
            .any(|g| g.len() != n || g.iter().any(|s| s.len() != n))
    {
        return Err(Error::ShapeMismatch(
            "connection coefficients must be dim x rank x rank".into(),
        ));
    }
    if k == 0 && !l.is_empty() {
        return Err(Error::DegreeMismatch("degree-0 symbol carries no l".into()));
    }
    if k > 0 && (l.len() != n || l.iter().any(|x| x.degree() + 1 != k)) {
        return Err(Error::DegreeMismatch(format!(
            "l must have degree {}",
            k.saturating_sub(1)
        )));
    }
    let probe = GenDer::new(
        bundle.clone(),
        k,
        vec![VVForm::zero(m, k, n); n],
        l.clone(),
        r.clone(),
    )?;
    let mut d = Vec::with_capacity(n);
    for a in 0..n {
        let ua = bundle.unit(a);
        let mut comps = vec![DiffForm::zero(m, k); n];
        for idx in multi_indices(m, k) {
            let fields: Vec<VectorField> = idx.iter().map(|i| coord_field(m, *i)).collect();
            let mut val = vec![Poly::zero(m); n];
            if k > 0 {
                for t in 0..k {
                    let nab = covariant(gamma, &fields[t], &ua);
                    let rest: Vec<VectorField> = fields
                        .iter()
                        .enumerate()
                        .filter(|(s, _)| *s != t)
                        .map(|(_, f)| f.clone())
                        .collect();
                    let lv = probe.l_apply(&nab).evaluate(&rest);
                    for b in 0..n {
                        if t % 2 == 0 {
                            val[b] += &lv[b];
                        } else {
                            val[b] -= &lv[b];
                        }
                    }
                }
            }
            let rx = r.evaluate(&fields);
            let nab = covariant(gamma, &rx, &ua);
            for b in 0..n {
                val[b] -= &nab[b];
                comps[b] = &comps[b] + &DiffForm::basis(m, idx.clone(), val[b].clone());
            }
        }
        d.push(VVForm::from_comps(m, k, comps));
    }
    GenDer::new(bundle, k, d, l, r)
}
