//! Scene files: a TOML object tree of named geometric objects and checks.
//!
//! Every polynomial is a string in the coordinate names of `[chart]`.
//! References between objects are by name and are resolved while parsing,
//! so a parsed [`Scene`] never contains a dangling reference.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use lnlab_core::algebroid::Algebroid;
use lnlab_core::forms::{DiffForm, Multivector, VVForm, VectorField};
use lnlab_core::gder::{build_drt, build_drtstar, build_from_connection, FramedBundle, GenDer};
use lnlab_core::lnb::LnCandidate;
use lnlab_core::pn::PnCandidate;
use lnlab_core::{parse_poly, Chart, Limits, Poly};
use serde::Deserialize;
use toml::Spanned;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for SceneError {}

/// How a generalized derivation was built; drives the oracle used by `lift`.
#[derive(Clone, Debug)]
pub enum GderOrigin {
    Tangent(VVForm),
    Cotangent(VVForm),
    Other,
}

#[derive(Clone, Debug)]
pub struct GderObject {
    pub der: GenDer,
    pub origin: GderOrigin,
}

#[derive(Clone, Debug)]
pub enum CheckSpec {
    Validate(Algebroid),
    Bialgebroid(Algebroid, Algebroid),
    Im(Algebroid, GenDer),
    Torsion(VVForm),
    Pn(PnCandidate),
    Concomitants(PnCandidate),
    Kosmann(PnCandidate),
    ImCotangent(PnCandidate),
    PnViaIm(PnCandidate),
    Hierarchy(PnCandidate, usize),
    Mm1(PnCandidate, VectorField),
    Mm1Random { samples: usize, seed: u64 },
    Lnb(LnCandidate),
    BasePn(LnCandidate),
    DeformHierarchy(LnCandidate, usize),
    Holomorphic(LnCandidate),
    Courant(LnCandidate),
    Lift(GderObject),
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub kind: String,
    pub spec: CheckSpec,
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub title: Option<String>,
    pub chart: Arc<Chart>,
    pub fields: BTreeMap<String, VectorField>,
    pub bivectors: BTreeMap<String, Multivector>,
    pub endomorphisms: BTreeMap<String, VVForm>,
    pub bundles: BTreeMap<String, FramedBundle>,
    pub algebroids: BTreeMap<String, Algebroid>,
    pub gders: BTreeMap<String, GderObject>,
    pub pn: BTreeMap<String, PnCandidate>,
    pub lnb: BTreeMap<String, LnCandidate>,
    pub checks: Vec<Check>,
    /// The text the scene was parsed from.
    pub source: String,
}

impl Scene {
    /// Vector fields, bivectors and endomorphisms.
    pub fn tensor_count(&self) -> usize {
        self.fields.len() + self.bivectors.len() + self.endomorphisms.len()
    }
}

pub const CHECK_KINDS: &[&str] = &[
    "validate",
    "bialgebroid",
    "im",
    "torsion",
    "pn",
    "concomitants",
    "kosmann",
    "im_cotangent",
    "pn_via_im",
    "hierarchy",
    "mm1",
    "mm1_random",
    "lnb",
    "base_pn",
    "deform_hierarchy",
    "holomorphic",
    "courant",
    "lift",
];

type Name = Spanned<String>;
type Expr = Spanned<String>;
/// `d[a][b]` lists the `(basis, coefficient)` terms of component `b` of `D(u_a)`.
type FormTable = Vec<Vec<Vec<(Name, Expr)>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    title: Option<String>,
    chart: Spanned<RawChart>,
    #[serde(default)]
    field: BTreeMap<String, Spanned<RawField>>,
    #[serde(default)]
    bivector: BTreeMap<String, Spanned<RawBivector>>,
    #[serde(default)]
    endomorphism: BTreeMap<String, Spanned<RawEndo>>,
    #[serde(default)]
    bundle: BTreeMap<String, Spanned<RawBundle>>,
    #[serde(default)]
    algebroid: BTreeMap<String, Spanned<RawAlgebroid>>,
    #[serde(default)]
    gder: BTreeMap<String, Spanned<RawGder>>,
    #[serde(default)]
    pn: BTreeMap<String, Spanned<RawPn>>,
    #[serde(default)]
    lnb: BTreeMap<String, Spanned<RawLnb>>,
    #[serde(default)]
    check: Vec<Spanned<RawCheck>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    coords: Vec<Name>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    components: Vec<Expr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBivector {
    #[serde(default)]
    entries: Vec<(Name, Name, Expr)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEndo {
    matrix: Option<Vec<Vec<Expr>>>,
    scalar: Option<Expr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    kind: Name,
    frame: Option<Vec<String>>,
    dual: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    a: Name,
    b: Name,
    value: Vec<Expr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebroid {
    kind: Name,
    bundle: Option<Name>,
    bivector: Option<Name>,
    anchor: Option<Vec<Vec<Expr>>>,
    #[serde(default)]
    brackets: Vec<Spanned<RawBracket>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGder {
    kind: Name,
    bundle: Option<Name>,
    r: Option<Name>,
    algebroid: Option<Name>,
    theta: Option<Vec<Vec<Expr>>>,
    gamma: Option<Vec<Vec<Vec<Expr>>>>,
    l: Option<Vec<Vec<Expr>>>,
    degree: Option<Spanned<usize>>,
    d: Option<FormTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPn {
    bivector: Name,
    endomorphism: Name,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLnb {
    a: Name,
    astar: Name,
    gder: Name,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    name: Name,
    kind: Name,
    algebroid: Option<Name>,
    a: Option<Name>,
    astar: Option<Name>,
    gder: Option<Name>,
    r: Option<Name>,
    pn: Option<Name>,
    lnb: Option<Name>,
    field: Option<Name>,
    depth: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
}

struct Ctx<'a> {
    text: &'a str,
    limits: Limits,
    chart: Arc<Chart>,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> SceneError {
        locate(self.text, span.start, message.into())
    }

    fn poly(&self, e: &Expr) -> Result<Poly, SceneError> {
        parse_poly(e.get_ref(), &self.chart, &self.limits).map_err(|err| {
            let offset = match &err {
                lnlab_core::Error::Parse { offset, .. } => e.span().start + 1 + offset,
                _ => e.span().start,
            };
            locate(self.text, offset, format!("in `{}`: {err}", e.get_ref()))
        })
    }

    fn polys(&self, es: &[Expr]) -> Result<Vec<Poly>, SceneError> {
        es.iter().map(|e| self.poly(e)).collect()
    }

    fn coord(&self, n: &Name) -> Result<usize, SceneError> {
        self.chart
            .index_of(n.get_ref())
            .ok_or_else(|| self.err(n.span(), format!("unknown coordinate `{}`", n.get_ref())))
    }

    fn lookup<'m, T>(
        &self,
        map: &'m BTreeMap<String, T>,
        what: &str,
        n: &Name,
    ) -> Result<&'m T, SceneError> {
        map.get(n.get_ref())
            .ok_or_else(|| self.err(n.span(), format!("undefined {what} `{}`", n.get_ref())))
    }

    fn need<'n>(
        &self,
        n: &'n Option<Name>,
        key: &str,
        span: Range<usize>,
    ) -> Result<&'n Name, SceneError> {
        n.as_ref()
            .ok_or_else(|| self.err(span, format!("missing key `{key}`")))
    }

    fn one_form_basis(&self, n: &Name) -> Result<Vec<usize>, SceneError> {
        let s = n.get_ref().trim();
        if s == "1" {
            return Ok(Vec::new());
        }
        let mut idx = Vec::new();
        for part in s.split('^') {
            let v = part.trim().strip_prefix('d').ok_or_else(|| {
                self.err(
                    n.span(),
                    format!("basis `{s}` must be `1` or a wedge of differentials like `dx^dy`"),
                )
            })?;
            let i = self.chart.index_of(v).ok_or_else(|| {
                self.err(n.span(), format!("unknown coordinate `{v}` in basis `{s}`"))
            })?;
            idx.push(i);
        }
        Ok(idx)
    }

    fn form(&self, degree: usize, terms: &[(Name, Expr)]) -> Result<DiffForm, SceneError> {
        let m = self.chart.dim();
        let mut out = DiffForm::zero(m, degree);
        for (basis, coeff) in terms {
            let idx = self.one_form_basis(basis)?;
            if idx.len() != degree {
                return Err(self.err(
                    basis.span(),
                    format!("basis `{}` is not of degree {degree}", basis.get_ref()),
                ));
            }
            let f = self.poly(coeff)?;
            out = &out + &DiffForm::basis(m, idx, f);
        }
        Ok(out)
    }

    fn square(
        &self,
        rows: &[Vec<Expr>],
        n: usize,
        what: &str,
        span: Range<usize>,
    ) -> Result<Vec<Vec<Poly>>, SceneError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(self.err(span, format!("{what} must be a {n} x {n} table")));
        }
        rows.iter().map(|r| self.polys(r)).collect()
    }
}

fn locate(text: &str, offset: usize, message: String) -> SceneError {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rsplit('\n')
        .next()
        .map(|l| l.chars().count())
        .unwrap_or(0)
        + 1;
    SceneError {
        message,
        line,
        column,
    }
}

/// Parse and resolve a scene, canonicalizing every polynomial under `limits`.
pub fn parse_scene(text: &str, limits: Limits) -> Result<Scene, SceneError> {
    let raw: RawScene = toml::from_str(text).map_err(|e| {
        let start = e.span().map(|s| s.start).unwrap_or(0);
        locate(text, start, e.message().to_string())
    })?;
    let coords: Vec<String> = raw
        .chart
        .get_ref()
        .coords
        .iter()
        .map(|c| c.get_ref().clone())
        .collect();
    let chart =
        Chart::new(coords).map_err(|e| locate(text, raw.chart.span().start, e.to_string()))?;
    let cx = Ctx {
        text,
        limits,
        chart: chart.clone(),
    };
    let m = chart.dim();

    let mut fields = BTreeMap::new();
    for (name, f) in &raw.field {
        let comps = &f.get_ref().components;
        if comps.len() != m {
            return Err(cx.err(f.span(), format!("field `{name}` needs {m} components")));
        }
        fields.insert(name.clone(), cx.polys(comps)?);
    }

    let mut bivectors = BTreeMap::new();
    for (name, b) in &raw.bivector {
        let mut pi = Multivector::zero(m, 2);
        for (i, j, v) in &b.get_ref().entries {
            let (i, j) = (cx.coord(i)?, cx.coord(j)?);
            if i == j {
                return Err(cx.err(v.span(), format!("bivector `{name}` has a diagonal entry")));
            }
            pi = &pi + &Multivector::bivector(m, [(i, j, cx.poly(v)?)]);
        }
        bivectors.insert(name.clone(), pi);
    }

    let mut endomorphisms = BTreeMap::new();
    for (name, e) in &raw.endomorphism {
        let r = match (&e.get_ref().matrix, &e.get_ref().scalar) {
            (Some(rows), None) => VVForm::endomorphism(&cx.square(
                rows,
                m,
                &format!("endomorphism `{name}`"),
                e.span(),
            )?),
            (None, Some(s)) => VVForm::scalar_endomorphism(m, &cx.poly(s)?),
            _ => {
                return Err(cx.err(
                    e.span(),
                    format!("endomorphism `{name}` needs exactly one of `matrix`, `scalar`"),
                ))
            }
        };
        endomorphisms.insert(name.clone(), r);
    }

    let mut bundles = BTreeMap::new();
    bundles.insert("TM".to_string(), FramedBundle::tangent(chart.clone()));
    bundles.insert("T*M".to_string(), FramedBundle::cotangent(chart.clone()));
    for (name, b) in &raw.bundle {
        let rb = b.get_ref();
        let bundle = match rb.kind.get_ref().as_str() {
            "tangent" => FramedBundle::tangent(chart.clone()),
            "cotangent" => FramedBundle::cotangent(chart.clone()),
            "framed" => {
                let frame = rb
                    .frame
                    .clone()
                    .ok_or_else(|| cx.err(b.span(), "missing key `frame`"))?;
                let dual = rb
                    .dual
                    .clone()
                    .unwrap_or_else(|| frame.iter().map(|f| format!("{f}*")).collect());
                FramedBundle::new(chart.clone(), frame, dual)
                    .map_err(|e| cx.err(b.span(), e.to_string()))?
            }
            other => {
                return Err(cx.err(
                    rb.kind.span(),
                    format!("unknown bundle kind `{other}` (tangent, cotangent, framed)"),
                ))
            }
        };
        bundles.insert(name.clone(), bundle);
    }

    let mut algebroids = BTreeMap::new();
    for (name, a) in &raw.algebroid {
        let ra = a.get_ref();
        let alg = match ra.kind.get_ref().as_str() {
            "tangent" => {
                let b = match &ra.bundle {
                    Some(n) => cx.lookup(&bundles, "bundle", n)?.clone(),
                    None => FramedBundle::tangent(chart.clone()),
                };
                Algebroid::tangent(b)
            }
            "cotangent_of_poisson" => {
                let pi = cx.lookup(
                    &bivectors,
                    "bivector",
                    cx.need(&ra.bivector, "bivector", a.span())?,
                )?;
                let b = match &ra.bundle {
                    Some(n) => cx.lookup(&bundles, "bundle", n)?.clone(),
                    None => FramedBundle::cotangent(chart.clone()),
                };
                Algebroid::cotangent_of_poisson(b, pi)
                    .map_err(|e| cx.err(a.span(), e.to_string()))?
            }
            "explicit" => {
                let b = cx
                    .lookup(&bundles, "bundle", cx.need(&ra.bundle, "bundle", a.span())?)?
                    .clone();
                let n = b.rank();
                let anchor = match &ra.anchor {
                    Some(rows) => {
                        if rows.len() != n || rows.iter().any(|r| r.len() != m) {
                            return Err(cx.err(
                                a.span(),
                                format!("anchor must list {n} fields of {m} components"),
                            ));
                        }
                        rows.iter()
                            .map(|r| cx.polys(r))
                            .collect::<Result<Vec<_>, _>>()?
                    }
                    None => vec![vec![Poly::zero(m); m]; n],
                };
                let frame_index = |x: &Name| {
                    b.frame()
                        .iter()
                        .position(|f| f == x.get_ref())
                        .ok_or_else(|| {
                            cx.err(x.span(), format!("unknown frame element `{}`", x.get_ref()))
                        })
                };
                let mut brackets = Vec::new();
                for br in &ra.brackets {
                    let rb = br.get_ref();
                    if rb.value.len() != n {
                        return Err(
                            cx.err(br.span(), format!("bracket value needs {n} components"))
                        );
                    }
                    brackets.push((
                        frame_index(&rb.a)?,
                        frame_index(&rb.b)?,
                        cx.polys(&rb.value)?,
                    ));
                }
                Algebroid::from_brackets(b, anchor, brackets)
                    .map_err(|e| cx.err(a.span(), e.to_string()))?
            }
            other => return Err(cx.err(
                ra.kind.span(),
                format!(
                    "unknown algebroid kind `{other}` (tangent, cotangent_of_poisson, explicit)"
                ),
            )),
        };
        algebroids.insert(name.clone(), alg);
    }

    let mut gders = BTreeMap::new();
    for (name, g) in &raw.gder {
        let rg = g.get_ref();
        let endo = |key: &Option<Name>| -> Result<VVForm, SceneError> {
            Ok(cx
                .lookup(&endomorphisms, "endomorphism", cx.need(key, "r", g.span())?)?
                .clone())
        };
        let wrap = |e: lnlab_core::Error| cx.err(g.span(), format!("gder `{name}`: {e}"));
        let obj = match rg.kind.get_ref().as_str() {
            "drT" => {
                let r = endo(&rg.r)?;
                GderObject {
                    der: build_drt(FramedBundle::tangent(chart.clone()), &r).map_err(wrap)?,
                    origin: GderOrigin::Tangent(r),
                }
            }
            "drTstar" => {
                let r = endo(&rg.r)?;
                GderObject {
                    der: build_drtstar(FramedBundle::cotangent(chart.clone()), &r).map_err(wrap)?,
                    origin: GderOrigin::Cotangent(r),
                }
            }
            "theta" => {
                let alg = cx.lookup(
                    &algebroids,
                    "algebroid",
                    cx.need(&rg.algebroid, "algebroid", g.span())?,
                )?;
                let rows = rg
                    .theta
                    .as_ref()
                    .ok_or_else(|| cx.err(g.span(), "missing key `theta`"))?;
                if rows.len() != m || rows.iter().any(|r| r.len() != alg.rank()) {
                    return Err(cx.err(
                        g.span(),
                        format!("theta must list {m} sections of rank {}", alg.rank()),
                    ));
                }
                let theta = rows
                    .iter()
                    .map(|r| cx.polys(r))
                    .collect::<Result<Vec<_>, _>>()?;
                GderObject {
                    der: lnlab_core::algebroid::build_from_theta(alg, &theta).map_err(wrap)?,
                    origin: GderOrigin::Other,
                }
            }
            "connection" | "explicit" => {
                let b = match &rg.bundle {
                    Some(n) => cx.lookup(&bundles, "bundle", n)?.clone(),
                    None => FramedBundle::tangent(chart.clone()),
                };
                let n = b.rank();
                let degree = rg.degree.as_ref().map(|d| *d.get_ref()).unwrap_or(1);
                if degree > 1 {
                    return Err(cx.err(g.span(), "scene gders have degree 0 or 1"));
                }
                let r = match &rg.r {
                    Some(_) => endo(&rg.r)?,
                    None => VVForm::zero(m, degree, m),
                };
                if r.degree() != degree {
                    return Err(cx.err(g.span(), "r must have the derivation's degree"));
                }
                let l: Vec<VVForm> = if degree == 0 {
                    if rg.l.is_some() {
                        return Err(cx.err(g.span(), "a degree-0 derivation has no `l`"));
                    }
                    Vec::new()
                } else {
                    match &rg.l {
                        Some(rows) => {
                            let mat = cx.square(rows, n, "l", g.span())?;
                            mat.iter()
                                .map(|row| {
                                    VVForm::from_comps(
                                        m,
                                        0,
                                        row.iter().cloned().map(DiffForm::function).collect(),
                                    )
                                })
                                .collect()
                        }
                        None => vec![VVForm::zero(m, 0, n); n],
                    }
                };
                if rg.kind.get_ref() == "connection" {
                    let gamma = match &rg.gamma {
                        Some(t) => {
                            if t.len() != m
                                || t.iter()
                                    .any(|g| g.len() != n || g.iter().any(|s| s.len() != n))
                            {
                                return Err(
                                    cx.err(g.span(), format!("gamma must be {m} x {n} x {n}"))
                                );
                            }
                            t.iter()
                                .map(|gi| {
                                    gi.iter()
                                        .map(|s| cx.polys(s))
                                        .collect::<Result<Vec<_>, _>>()
                                })
                                .collect::<Result<Vec<_>, _>>()?
                        }
                        None => vec![vec![vec![Poly::zero(m); n]; n]; m],
                    };
                    GderObject {
                        der: build_from_connection(b, &gamma, l, r).map_err(wrap)?,
                        origin: GderOrigin::Other,
                    }
                } else {
                    let table =
                        rg.d.as_ref()
                            .ok_or_else(|| cx.err(g.span(), "missing key `d`"))?;
                    if table.len() != n || table.iter().any(|row| row.len() != n) {
                        return Err(
                            cx.err(g.span(), format!("d must be a {n} x {n} table of forms"))
                        );
                    }
                    let mut d = Vec::with_capacity(n);
                    for row in table {
                        let comps = row
                            .iter()
                            .map(|terms| cx.form(degree, terms))
                            .collect::<Result<Vec<_>, _>>()?;
                        d.push(VVForm::from_comps(m, degree, comps));
                    }
                    GderObject {
                        der: GenDer::new(b, degree, d, l, r).map_err(wrap)?,
                        origin: GderOrigin::Other,
                    }
                }
            }
            other => {
                return Err(cx.err(
                    rg.kind.span(),
                    format!(
                        "unknown gder kind `{other}` (drT, drTstar, connection, theta, explicit)"
                    ),
                ))
            }
        };
        gders.insert(name.clone(), obj);
    }

    let mut pn = BTreeMap::new();
    for (name, p) in &raw.pn {
        let rp = p.get_ref();
        let pi = cx.lookup(&bivectors, "bivector", &rp.bivector)?.clone();
        let r = cx
            .lookup(&endomorphisms, "endomorphism", &rp.endomorphism)?
            .clone();
        let c = PnCandidate::new(chart.clone(), pi, r)
            .map_err(|e| cx.err(p.span(), format!("pn `{name}`: {e}")))?;
        pn.insert(name.clone(), c);
    }

    let mut lnb = BTreeMap::new();
    for (name, l) in &raw.lnb {
        let rl = l.get_ref();
        let a = cx.lookup(&algebroids, "algebroid", &rl.a)?.clone();
        let astar = cx.lookup(&algebroids, "algebroid", &rl.astar)?.clone();
        let d = cx.lookup(&gders, "gder", &rl.gder)?.der.clone();
        let c = LnCandidate::new(a, astar, d)
            .map_err(|e| cx.err(l.span(), format!("lnb `{name}`: {e}")))?;
        lnb.insert(name.clone(), c);
    }

    let mut checks = Vec::with_capacity(raw.check.len());
    let mut seen = std::collections::BTreeSet::new();
    for c in &raw.check {
        let rc = c.get_ref();
        if !seen.insert(rc.name.get_ref().clone()) {
            return Err(cx.err(
                rc.name.span(),
                format!("duplicate check name `{}`", rc.name.get_ref()),
            ));
        }
        let sp = c.span();
        let alg = |key: &Option<Name>, k: &str| -> Result<Algebroid, SceneError> {
            Ok(cx
                .lookup(&algebroids, "algebroid", cx.need(key, k, sp.clone())?)?
                .clone())
        };
        let pair = || -> Result<PnCandidate, SceneError> {
            Ok(cx
                .lookup(&pn, "pn", cx.need(&rc.pn, "pn", sp.clone())?)?
                .clone())
        };
        let ln = || -> Result<LnCandidate, SceneError> {
            Ok(cx
                .lookup(&lnb, "lnb", cx.need(&rc.lnb, "lnb", sp.clone())?)?
                .clone())
        };
        let depth = rc.depth.unwrap_or(2);
        let spec = match rc.kind.get_ref().as_str() {
            "validate" => CheckSpec::Validate(alg(&rc.algebroid, "algebroid")?),
            "bialgebroid" => CheckSpec::Bialgebroid(alg(&rc.a, "a")?, alg(&rc.astar, "astar")?),
            "im" => {
                let g = cx.lookup(&gders, "gder", cx.need(&rc.gder, "gder", sp.clone())?)?;
                CheckSpec::Im(alg(&rc.algebroid, "algebroid")?, g.der.clone())
            }
            "torsion" => CheckSpec::Torsion(
                cx.lookup(
                    &endomorphisms,
                    "endomorphism",
                    cx.need(&rc.r, "r", sp.clone())?,
                )?
                .clone(),
            ),
            "pn" => CheckSpec::Pn(pair()?),
            "concomitants" => CheckSpec::Concomitants(pair()?),
            "kosmann" => CheckSpec::Kosmann(pair()?),
            "im_cotangent" => CheckSpec::ImCotangent(pair()?),
            "pn_via_im" => CheckSpec::PnViaIm(pair()?),
            "hierarchy" => CheckSpec::Hierarchy(pair()?, depth),
            "mm1" => {
                let x = cx.lookup(&fields, "field", cx.need(&rc.field, "field", sp.clone())?)?;
                CheckSpec::Mm1(pair()?, x.clone())
            }
            "mm1_random" => CheckSpec::Mm1Random {
                samples: rc.samples.unwrap_or(8),
                seed: rc.seed.unwrap_or(0),
            },
            "lnb" => CheckSpec::Lnb(ln()?),
            "base_pn" => CheckSpec::BasePn(ln()?),
            "deform_hierarchy" => CheckSpec::DeformHierarchy(ln()?, depth),
            "holomorphic" => CheckSpec::Holomorphic(ln()?),
            "courant" => CheckSpec::Courant(ln()?),
            "lift" => CheckSpec::Lift(
                cx.lookup(&gders, "gder", cx.need(&rc.gder, "gder", sp.clone())?)?
                    .clone(),
            ),
            other => {
                return Err(cx.err(
                    rc.kind.span(),
                    format!(
                        "unknown check kind `{other}` (one of: {})",
                        CHECK_KINDS.join(", ")
                    ),
                ))
            }
        };
        checks.push(Check {
            name: rc.name.get_ref().clone(),
            kind: rc.kind.get_ref().clone(),
            spec,
        });
    }

    Ok(Scene {
        title: raw.title,
        chart,
        fields,
        bivectors,
        endomorphisms,
        bundles,
        algebroids,
        gders,
        pn,
        lnb,
        checks,
        source: text.to_string(),
    })
}
