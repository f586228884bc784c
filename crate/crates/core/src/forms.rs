//! Exterior calculus on a coordinate chart.
//!
//! Forms and multivectors store one polynomial coefficient per strictly
//! increasing multi-index. The evaluation convention is the determinant one:
//! `(dx_1 ^ ... ^ dx_k)(d/dx_1, ..., d/dx_k) = 1`. Vector-valued forms are
//! stored as one form per value-frame element, so a tangent-valued form
//! `K = sum_j K^j (x) d/dx_j` keeps `K^j` at position `j`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A vector field (or any section in frame coordinates).
pub type VectorField = Vec<Poly>;

type Coeffs = BTreeMap<Vec<usize>, Poly>;

/// Merge two disjoint increasing index lists, returning the sorted union and
/// the sign of the shuffle. `None` if they share an index.
fn merge_indices(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((inversions % 2 == 1, out))
}

fn add_into(map: &mut Coeffs, key: Vec<usize>, value: Poly) {
    if value.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &value;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn wedge_coeffs(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = Coeffs::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            if let Some((neg, idx)) = merge_indices(ia, ib) {
                let prod = ca * cb;
                add_into(&mut out, idx, if neg { -prod } else { prod });
            }
        }
    }
    out
}

/// Remove the entry at position `pos` from an index list. The sign is that
/// of moving it to the front.
fn remove_at(idx: &[usize], pos: usize) -> (bool, Vec<usize>) {
    let mut rest = idx.to_vec();
    rest.remove(pos);
    (pos % 2 == 1, rest)
}

fn render_coeffs(map: &Coeffs, names: &[String], symbol: &dyn Fn(&str) -> String) -> String {
    if map.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (idx, c) in map {
        let basis: Vec<String> = idx
            .iter()
            .map(|i| symbol(names.get(*i).map(String::as_str).unwrap_or("?")))
            .collect();
        let coeff = c.render(names);
        if basis.is_empty() {
            parts.push(coeff);
        } else {
            parts.push(format!("({coeff}) {}", basis.join("^")));
        }
    }
    parts.join(" + ")
}

/// All strictly increasing multi-indices of length `k` drawn from `0..n`.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Derivative of a function along a vector field.
pub fn apply_vf(x: &[Poly], f: &Poly) -> Poly {
    let mut out = Poly::zero(f.nvars());
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            out += &(xi * &f.partial(i));
        }
    }
    out
}

/// Lie bracket of vector fields.
pub fn lie_bracket(x: &[Poly], y: &[Poly]) -> VectorField {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| apply_vf(x, yi) - apply_vf(y, xi))
        .collect()
}

/// Coordinate vector field `d/dx_i`.
pub fn coord_field(dim: usize, i: usize) -> VectorField {
    (0..dim)
        .map(|j| {
            if i == j {
                Poly::one(dim)
            } else {
                Poly::zero(dim)
            }
        })
        .collect()
}

pub fn zero_field(nvars: usize, rank: usize) -> VectorField {
    vec![Poly::zero(nvars); rank]
}

pub fn add_fields(a: &[Poly], b: &[Poly]) -> VectorField {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

pub fn sub_fields(a: &[Poly], b: &[Poly]) -> VectorField {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

pub fn scale_field(f: &Poly, a: &[Poly]) -> VectorField {
    a.iter().map(|p| f * p).collect()
}

pub fn field_is_zero(a: &[Poly]) -> bool {
    a.iter().all(Poly::is_zero)
}

// ---------------------------------------------------------------------------

/// Differential form of fixed degree on a chart of dimension `dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffForm {
    dim: usize,
    degree: usize,
    coeffs: Coeffs,
}

impl DiffForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        DiffForm {
            dim,
            degree,
            coeffs: Coeffs::new(),
        }
    }

    pub fn function(f: Poly) -> Self {
        let mut a = DiffForm::zero(f.nvars(), 0);
        add_into(&mut a.coeffs, Vec::new(), f);
        a
    }

    /// `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        Self::basis(dim, vec![i], Poly::one(dim))
    }

    /// `f dx_{i_1} ^ ... ^ dx_{i_k}` for an arbitrary (not necessarily sorted) index list.
    pub fn basis(dim: usize, idx: Vec<usize>, f: Poly) -> Self {
        let degree = idx.len();
        let mut form = DiffForm::zero(dim, degree);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != idx.len() || idx.iter().any(|i| *i >= dim) {
            return form;
        }
        // parity of the sorting permutation
        let mut inv = 0;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                if idx[a] > idx[b] {
                    inv += 1;
                }
            }
        }
        add_into(&mut form.coeffs, sorted, if inv % 2 == 1 { -f } else { f });
        form
    }

    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Poly)>,
    ) -> Self {
        let mut form = DiffForm::zero(dim, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree);
            form = &form + &DiffForm::basis(dim, idx, c);
        }
        form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> Poly {
        assert_eq!(self.degree, 0);
        self.coeff(&[])
    }

    pub fn max_poly_degree(&self) -> u32 {
        self.coeffs
            .values()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            add_into(&mut out.coeffs, i.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> DiffForm {
        self.map_coeffs(|c| c * f)
    }

    pub fn scale_int(&self, k: i64) -> DiffForm {
        self.map_coeffs(|c| c.scale_int(k))
    }

    fn check_same(&self, other: &DiffForm) {
        assert_eq!(self.dim, other.dim, "forms live on different charts");
    }

    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        self.check_same(other);
        DiffForm {
            dim: self.dim,
            degree: self.degree + other.degree,
            coeffs: wedge_coeffs(&self.coeffs, &other.coeffs),
        }
    }

    /// Exterior derivative.
    pub fn d(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.degree + 1);
        for (idx, c) in &self.coeffs {
            for j in 0..self.dim {
                let dc = c.partial(j);
                if dc.is_zero() {
                    continue;
                }
                if let Some((neg, k)) = merge_indices(&[j], idx) {
                    add_into(&mut out.coeffs, k, if neg { -dc } else { dc });
                }
            }
        }
        out
    }

    /// Lie derivative along the constant field `d/dx_j`: coefficientwise derivative.
    pub fn partial(&self, j: usize) -> DiffForm {
        self.map_coeffs(|c| c.partial(j))
    }

    /// Interior product `i_X` (insertion into the first slot).
    pub fn interior(&self, x: &[Poly]) -> DiffForm {
        assert_eq!(x.len(), self.dim);
        if self.degree == 0 {
            return DiffForm::zero(self.dim, 0);
        }
        let mut out = DiffForm::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for (pos, i) in idx.iter().enumerate() {
                if x[*i].is_zero() {
                    continue;
                }
                let (neg, rest) = remove_at(idx, pos);
                let v = c * &x[*i];
                add_into(&mut out.coeffs, rest, if neg { -v } else { v });
            }
        }
        out
    }

    /// Interior product with a coordinate field `d/dx_i`.
    pub fn interior_coord(&self, i: usize) -> DiffForm {
        if self.degree == 0 {
            return DiffForm::zero(self.dim, 0);
        }
        let mut out = DiffForm::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            if let Some(pos) = idx.iter().position(|j| *j == i) {
                let (neg, rest) = remove_at(idx, pos);
                add_into(
                    &mut out.coeffs,
                    rest,
                    if neg { -c.clone() } else { c.clone() },
                );
            }
        }
        out
    }

    /// Lie derivative along a vector field (Cartan formula).
    pub fn lie(&self, x: &[Poly]) -> DiffForm {
        &self.d().interior(x) + &self.interior(x).d()
    }

    /// Evaluate on a list of vector fields (as many as the degree).
    pub fn evaluate(&self, fields: &[VectorField]) -> Poly {
        assert_eq!(fields.len(), self.degree);
        let mut cur = self.clone();
        for x in fields {
            cur = cur.interior(x);
        }
        cur.as_function()
    }

    /// Move to a chart of dimension `dim` where this chart's coordinates start at `offset`.
    pub fn embed(&self, dim: usize, offset: usize) -> DiffForm {
        let mut out = DiffForm::zero(dim, self.degree);
        for (idx, c) in &self.coeffs {
            let k: Vec<usize> = idx.iter().map(|i| i + offset).collect();
            add_into(&mut out.coeffs, k, c.embed(dim, offset));
        }
        out
    }

    /// Inverse of [`DiffForm::embed`]; `None` if the form involves other coordinates.
    pub fn restrict(&self, dim: usize, offset: usize) -> Option<DiffForm> {
        let mut out = DiffForm::zero(dim, self.degree);
        for (idx, c) in &self.coeffs {
            if idx.iter().any(|i| *i < offset || *i >= offset + dim) {
                return None;
            }
            let k: Vec<usize> = idx.iter().map(|i| i - offset).collect();
            add_into(&mut out.coeffs, k, c.restrict(dim, offset)?);
        }
        Some(out)
    }

    pub fn render(&self, names: &[String]) -> String {
        render_coeffs(&self.coeffs, names, &|n| format!("d{n}"))
    }
}

impl<'a> std::ops::Add<&'a DiffForm> for &'a DiffForm {
    type Output = DiffForm;
    fn add(self, rhs: &'a DiffForm) -> DiffForm {
        self.check_same(rhs);
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (i, c) in &rhs.coeffs {
            add_into(&mut out.coeffs, i.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a DiffForm> for &'a DiffForm {
    type Output = DiffForm;
    fn sub(self, rhs: &'a DiffForm) -> DiffForm {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &DiffForm {
    type Output = DiffForm;
    fn neg(self) -> DiffForm {
        self.map_coeffs(|c| -c)
    }
}

// ---------------------------------------------------------------------------

/// Multivector field of fixed degree, stored like a form in the odd
/// coordinates `theta_i = d/dx_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multivector {
    dim: usize,
    degree: usize,
    coeffs: Coeffs,
}

impl Multivector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Multivector {
            dim,
            degree,
            coeffs: Coeffs::new(),
        }
    }

    /// `f d/dx_{i_1} ^ ... ^ d/dx_{i_q}` for any index order.
    pub fn basis(dim: usize, idx: Vec<usize>, f: Poly) -> Self {
        let form = DiffForm::basis(dim, idx, f);
        Multivector {
            dim,
            degree: form.degree,
            coeffs: form.coeffs,
        }
    }

    pub fn vector(x: &[Poly]) -> Self {
        let dim = x.len();
        let mut m = Multivector::zero(dim, 1);
        for (i, c) in x.iter().enumerate() {
            add_into(&mut m.coeffs, vec![i], c.clone());
        }
        m
    }

    /// Bivector with the given upper-triangular entries `(i, j, pi^{ij})`, `i < j`.
    pub fn bivector(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Poly)>) -> Self {
        let mut m = Multivector::zero(dim, 2);
        for (i, j, c) in entries {
            m = &m + &Multivector::basis(dim, vec![i, j], c);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// `pi(dx_i, dx_j)` for a bivector, with skew-symmetry applied.
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        assert_eq!(self.degree, 2);
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeff(&[i, j]),
            std::cmp::Ordering::Greater => -self.coeff(&[j, i]),
            std::cmp::Ordering::Equal => Poly::zero(self.dim),
        }
    }

    pub fn as_vector(&self) -> VectorField {
        assert_eq!(self.degree, 1);
        (0..self.dim).map(|i| self.coeff(&[i])).collect()
    }

    pub fn max_poly_degree(&self) -> u32 {
        self.coeffs
            .values()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Multivector {
        let mut out = Multivector::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            add_into(&mut out.coeffs, i.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> Multivector {
        self.map_coeffs(|c| c * f)
    }

    pub fn wedge(&self, other: &Multivector) -> Multivector {
        assert_eq!(self.dim, other.dim);
        Multivector {
            dim: self.dim,
            degree: self.degree + other.degree,
            coeffs: wedge_coeffs(&self.coeffs, &other.coeffs),
        }
    }

    /// Right derivative with respect to `theta_i`.
    fn right_theta_derivative(&self, i: usize) -> Multivector {
        let mut out = Multivector::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (idx, c) in &self.coeffs {
            if let Some(pos) = idx.iter().position(|j| *j == i) {
                let mut rest = idx.clone();
                rest.remove(pos);
                let neg = (idx.len() - 1 - pos) % 2 == 1;
                add_into(
                    &mut out.coeffs,
                    rest,
                    if neg { -c.clone() } else { c.clone() },
                );
            }
        }
        out
    }

    fn partial(&self, j: usize) -> Multivector {
        self.map_coeffs(|c| c.partial(j))
    }

    /// Schouten bracket, normalized so that `[X, P]` is the Lie derivative of `P` along `X`.
    pub fn schouten(&self, other: &Multivector) -> Multivector {
        assert_eq!(self.dim, other.dim, "multivectors live on different charts");
        let (p, q) = (self.degree, other.degree);
        let deg = (p + q).saturating_sub(1);
        let mut out = Multivector::zero(self.dim, deg);
        if p == 0 && q == 0 {
            return out;
        }
        let sign_neg = ((p + 1) * (q + 1)) % 2 == 1; // (-1)^{(p-1)(q-1)}
        for i in 0..self.dim {
            let a = self.right_theta_derivative(i).wedge(&other.partial(i));
            let b = other.right_theta_derivative(i).wedge(&self.partial(i));
            if a.degree == deg {
                out = &out + &a;
            }
            if b.degree == deg {
                out = if sign_neg { &out + &b } else { &out - &b };
            }
        }
        out
    }

    pub fn embed(&self, dim: usize, offset: usize) -> Multivector {
        let form = DiffForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.clone(),
        }
        .embed(dim, offset);
        Multivector {
            dim,
            degree: self.degree,
            coeffs: form.coeffs,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        render_coeffs(&self.coeffs, names, &|n| format!("d/d{n}"))
    }
}

impl<'a> std::ops::Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn add(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(
            self.degree, rhs.degree,
            "adding multivectors of different degree"
        );
        let mut out = self.clone();
        for (i, c) in &rhs.coeffs {
            add_into(&mut out.coeffs, i.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        self + &rhs.map_coeffs(|c| -c)
    }
}

// ---------------------------------------------------------------------------

/// Vector-valued differential form: one `degree`-form per value-frame element.
///
/// With `rank == dim` and the coordinate frame this is a tangent-valued form;
/// otherwise the values are sections of a framed bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VVForm {
    dim: usize,
    degree: usize,
    comps: Vec<DiffForm>,
}

impl VVForm {
    pub fn zero(dim: usize, degree: usize, rank: usize) -> Self {
        VVForm {
            dim,
            degree,
            comps: vec![DiffForm::zero(dim, degree); rank],
        }
    }

    pub fn from_comps(dim: usize, degree: usize, comps: Vec<DiffForm>) -> Self {
        for c in &comps {
            assert_eq!(c.dim, dim);
            assert_eq!(c.degree, degree, "component degree mismatch");
        }
        VVForm { dim, degree, comps }
    }

    /// A section / vector field as a 0-form.
    pub fn from_field(dim: usize, x: &[Poly]) -> Self {
        VVForm {
            dim,
            degree: 0,
            comps: x.iter().map(|p| DiffForm::function(p.clone())).collect(),
        }
    }

    /// Tangent-valued 1-form from a matrix `m[i][j] = <dx_i, r(d/dx_j)>`.
    pub fn endomorphism(m: &[Vec<Poly>]) -> Self {
        let dim = m.len();
        let comps = m
            .iter()
            .map(|row| {
                let mut f = DiffForm::zero(dim, 1);
                for (j, c) in row.iter().enumerate() {
                    add_into(&mut f.coeffs, vec![j], c.clone());
                }
                f
            })
            .collect();
        VVForm {
            dim,
            degree: 1,
            comps,
        }
    }

    /// `f * identity` as a tangent-valued 1-form.
    pub fn scalar_endomorphism(dim: usize, f: &Poly) -> Self {
        let m: Vec<Vec<Poly>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { f.clone() } else { Poly::zero(dim) })
                    .collect()
            })
            .collect();
        VVForm::endomorphism(&m)
    }

    pub fn identity(dim: usize) -> Self {
        VVForm::scalar_endomorphism(dim, &Poly::one(dim))
    }

    /// `alpha (x) X` with `X` given in the value frame.
    pub fn decomposable(alpha: &DiffForm, x: &[Poly]) -> Self {
        VVForm {
            dim: alpha.dim,
            degree: alpha.degree,
            comps: x.iter().map(|c| alpha.scale(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[DiffForm] {
        &self.comps
    }

    pub fn comp(&self, b: usize) -> &DiffForm {
        &self.comps[b]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(DiffForm::is_zero)
    }

    pub fn max_poly_degree(&self) -> u32 {
        self.comps
            .iter()
            .map(DiffForm::max_poly_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn as_field(&self) -> VectorField {
        assert_eq!(self.degree, 0);
        self.comps.iter().map(DiffForm::as_function).collect()
    }

    /// Matrix `m[i][j] = <dx_i, r(d/dx_j)>` of a vector-valued 1-form.
    pub fn matrix(&self) -> Vec<Vec<Poly>> {
        assert_eq!(self.degree, 1);
        self.comps
            .iter()
            .map(|c| (0..self.dim).map(|j| c.coeff(&[j])).collect())
            .collect()
    }

    pub fn map_comps(&self, f: impl Fn(&DiffForm) -> DiffForm) -> VVForm {
        let comps: Vec<DiffForm> = self.comps.iter().map(f).collect();
        let degree = comps.first().map(|c| c.degree).unwrap_or(self.degree);
        VVForm {
            dim: self.dim,
            degree,
            comps,
        }
    }

    pub fn scale(&self, f: &Poly) -> VVForm {
        self.map_comps(|c| c.scale(f))
    }

    pub fn scale_int(&self, k: i64) -> VVForm {
        self.map_comps(|c| c.scale_int(k))
    }

    /// `alpha ^ self`.
    pub fn wedge_left(&self, alpha: &DiffForm) -> VVForm {
        VVForm {
            dim: self.dim,
            degree: self.degree + alpha.degree,
            comps: self.comps.iter().map(|c| alpha.wedge(c)).collect(),
        }
    }

    /// Insert a vector field into the first slot.
    pub fn interior(&self, x: &[Poly]) -> VVForm {
        VVForm {
            dim: self.dim,
            degree: self.degree.saturating_sub(1),
            comps: self.comps.iter().map(|c| c.interior(x)).collect(),
        }
    }

    /// Evaluate on vector fields, giving a section in the value frame.
    pub fn evaluate(&self, fields: &[VectorField]) -> VectorField {
        self.comps.iter().map(|c| c.evaluate(fields)).collect()
    }

    /// Value of a vector-valued 1-form on one vector field.
    pub fn apply(&self, x: &[Poly]) -> VectorField {
        assert_eq!(self.degree, 1);
        self.evaluate(&[x.to_vec()])
    }

    /// `r^*(beta) = <beta, r>` for a tangent-valued `r` and a 1-form `beta`.
    pub fn pullback_1form(&self, beta: &DiffForm) -> DiffForm {
        assert_eq!(beta.degree, 1);
        let mut out = DiffForm::zero(self.dim, self.degree);
        for (j, c) in self.comps.iter().enumerate() {
            let bj = beta.coeff(&[j]);
            if !bj.is_zero() {
                out = &out + &c.scale(&bj);
            }
        }
        out
    }

    /// Contraction `i_K alpha = sum_j K^j ^ i_{d/dx_j} alpha` for tangent-valued `K`.
    pub fn interior_of(&self, alpha: &DiffForm) -> DiffForm {
        assert_eq!(
            self.rank(),
            self.dim,
            "interior product needs a tangent-valued form"
        );
        let deg = (alpha.degree + self.degree).saturating_sub(1);
        let mut out = DiffForm::zero(self.dim, deg);
        if alpha.degree == 0 {
            return out;
        }
        for (j, kj) in self.comps.iter().enumerate() {
            if kj.is_zero() {
                continue;
            }
            out = &out + &kj.wedge(&alpha.interior_coord(j));
        }
        out
    }

    /// Lie derivative `L_K = i_K d - (-1)^{k-1} d i_K` on scalar forms.
    pub fn lie_of(&self, alpha: &DiffForm) -> DiffForm {
        let a = self.interior_of(&alpha.d());
        let b = self.interior_of(alpha).d();
        let b = if b.degree != a.degree {
            DiffForm::zero(self.dim, a.degree)
        } else {
            b
        };
        // k - 1 odd  <=>  k even
        if self.degree.is_multiple_of(2) {
            &a + &b
        } else {
            &a - &b
        }
    }

    /// Frolicher-Nijenhuis bracket of tangent-valued forms.
    pub fn fn_bracket(&self, other: &VVForm) -> VVForm {
        assert_eq!(self.dim, other.dim, "forms live on different charts");
        assert_eq!(
            self.rank(),
            self.dim,
            "FN bracket needs tangent-valued forms"
        );
        assert_eq!(
            other.rank(),
            other.dim,
            "FN bracket needs tangent-valued forms"
        );
        let n = self.dim;
        let k = self.degree;
        let deg = k + other.degree;
        let mut out = VVForm::zero(n, deg, n);
        let odd = k % 2 == 1;
        let d_self: Vec<DiffForm> = self.comps.iter().map(DiffForm::d).collect();
        let d_other: Vec<DiffForm> = other.comps.iter().map(DiffForm::d).collect();
        for j in 0..n {
            let kj = &self.comps[j];
            for i in 0..n {
                let li = &other.comps[i];
                // K^j ^ d_j(L^i) (x) d_i
                if !kj.is_zero() {
                    let t = kj.wedge(&li.partial(j));
                    out.comps[i] = &out.comps[i] + &t;
                }
                // - d_i(K^j) ^ L^i (x) d_j
                if !li.is_zero() {
                    let t = kj.partial(i).wedge(li);
                    out.comps[j] = &out.comps[j] - &t;
                }
                // (-1)^k (dK^j ^ i_j L^i (x) d_i + i_i K^j ^ dL^i (x) d_j)
                let t1 = if other.degree > 0 {
                    d_self[j].wedge(&li.interior_coord(j))
                } else {
                    DiffForm::zero(n, deg)
                };
                let t2 = if k > 0 {
                    kj.interior_coord(i).wedge(&d_other[i])
                } else {
                    DiffForm::zero(n, deg)
                };
                if odd {
                    out.comps[i] = &out.comps[i] - &t1;
                    out.comps[j] = &out.comps[j] - &t2;
                } else {
                    out.comps[i] = &out.comps[i] + &t1;
                    out.comps[j] = &out.comps[j] + &t2;
                }
            }
        }
        out
    }

    /// Move to a chart of dimension `dim` with coordinates shifted by `offset`
    /// and values shifted to positions `value_offset..` of a frame of size `rank`.
    pub fn embed(&self, dim: usize, offset: usize, rank: usize, value_offset: usize) -> VVForm {
        let mut out = VVForm::zero(dim, self.degree, rank);
        for (b, c) in self.comps.iter().enumerate() {
            out.comps[value_offset + b] = c.embed(dim, offset);
        }
        out
    }

    pub fn render(&self, names: &[String], value_names: &[String]) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| {
                let v = value_names
                    .get(b)
                    .cloned()
                    .unwrap_or_else(|| format!("v{b}"));
                format!("[{}] (x) {v}", c.render(names))
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<'a> std::ops::Add<&'a VVForm> for &'a VVForm {
    type Output = VVForm;
    fn add(self, rhs: &'a VVForm) -> VVForm {
        assert_eq!(self.rank(), rhs.rank(), "value ranks differ");
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        VVForm {
            dim: self.dim,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> std::ops::Sub<&'a VVForm> for &'a VVForm {
    type Output = VVForm;
    fn sub(self, rhs: &'a VVForm) -> VVForm {
        assert_eq!(self.rank(), rhs.rank(), "value ranks differ");
        assert_eq!(
            self.degree, rhs.degree,
            "subtracting forms of different degree"
        );
        VVForm {
            dim: self.dim,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Neg for &VVForm {
    type Output = VVForm;
    fn neg(self) -> VVForm {
        self.map_comps(|c| -c)
    }
}

/// Nijenhuis torsion `N_r(X,Y) = [rX,rY] - r([rX,Y] + [X,rY] - r[X,Y])` as a tangent-valued 2-form.
pub fn nijenhuis_torsion(r: &VVForm) -> VVForm {
    assert_eq!(r.degree, 1);
    let n = r.dim;
    let mut comps = vec![DiffForm::zero(n, 2); n];
    let mut images = Vec::with_capacity(n);
    for a in 0..n {
        images.push(r.apply(&coord_field(n, a)));
    }
    for a in 0..n {
        for b in a + 1..n {
            let ea = coord_field(n, a);
            let eb = coord_field(n, b);
            let t1 = lie_bracket(&images[a], &images[b]);
            let inner = add_fields(&lie_bracket(&images[a], &eb), &lie_bracket(&ea, &images[b]));
            // [d_a, d_b] = 0
            let t2 = r.apply(&inner);
            let val = sub_fields(&t1, &t2);
            for (i, c) in val.into_iter().enumerate() {
                comps[i] = &comps[i] + &DiffForm::basis(n, vec![a, b], c);
            }
        }
    }
    VVForm {
        dim: n,
        degree: 2,
        comps,
    }
}

/// Composition `r o s` of two tangent-valued 1-forms (as endomorphisms).
pub fn compose_endo(r: &VVForm, s: &VVForm) -> VVForm {
    let (mr, ms) = (r.matrix(), s.matrix());
    let n = r.dim;
    let m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Poly::zero(n);
                    for k in 0..n {
                        acc += &(&mr[i][k] * &ms[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    VVForm::endomorphism(&m)
}

/// `pi^sharp(alpha) = pi(alpha, .)`.
pub fn sharp_field(pi: &Multivector, alpha: &DiffForm) -> VectorField {
    assert_eq!(pi.degree, 2);
    assert_eq!(alpha.degree, 1);
    let n = pi.dim;
    (0..n)
        .map(|j| {
            let mut acc = Poly::zero(n);
            for i in 0..n {
                let ai = alpha.coeff(&[i]);
                if !ai.is_zero() {
                    acc += &(&ai * &pi.entry(i, j));
                }
            }
            acc
        })
        .collect()
}

/// Pairing of a 1-form with a vector field.
pub fn pair(alpha: &DiffForm, x: &[Poly]) -> Poly {
    alpha.interior(x).as_function()
}

/// 1-form with the given coefficients.
pub fn one_form(coeffs: &[Poly]) -> DiffForm {
    let dim = coeffs.len();
    let mut f = DiffForm::zero(dim, 1);
    for (i, c) in coeffs.iter().enumerate() {
        add_into(&mut f.coeffs, vec![i], c.clone());
    }
    f
}

/// Coefficients of a 1-form.
pub fn one_form_coeffs(alpha: &DiffForm) -> Vec<Poly> {
    assert_eq!(alpha.degree, 1);
    (0..alpha.dim).map(|i| alpha.coeff(&[i])).collect()
}

// ---------------------------------------------------------------------------
// Checked entry points

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::ChartMismatch(format!("dimension {a} vs {b}")));
    }
    Ok(())
}

fn tangent(k: &VVForm) -> Result<()> {
    if k.rank() != k.dim() {
        return Err(Error::ShapeMismatch(format!(
            "expected a tangent-valued form, got value rank {} on a {}-dimensional chart",
            k.rank(),
            k.dim()
        )));
    }
    Ok(())
}

pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm> {
    same_dim(a.dim, b.dim)?;
    Ok(a.wedge(b))
}

pub fn exterior_d(a: &DiffForm) -> DiffForm {
    a.d()
}

pub fn interior_vvf(k: &VVForm, a: &DiffForm) -> Result<DiffForm> {
    same_dim(k.dim, a.dim)?;
    tangent(k)?;
    Ok(k.interior_of(a))
}

pub fn lie_derivative_vvf(k: &VVForm, a: &DiffForm) -> Result<DiffForm> {
    same_dim(k.dim, a.dim)?;
    tangent(k)?;
    Ok(k.lie_of(a))
}

pub fn frolicher_nijenhuis(k: &VVForm, l: &VVForm) -> Result<VVForm> {
    same_dim(k.dim, l.dim)?;
    tangent(k)?;
    tangent(l)?;
    Ok(k.fn_bracket(l))
}

pub fn schouten(p: &Multivector, q: &Multivector) -> Result<Multivector> {
    same_dim(p.dim, q.dim)?;
    Ok(p.schouten(q))
}

pub fn sharp(p: &Multivector, a: &DiffForm) -> Result<VVForm> {
    same_dim(p.dim, a.dim)?;
    if p.degree != 2 || a.degree != 1 {
        return Err(Error::DegreeMismatch(
            "sharp needs a bivector and a 1-form".into(),
        ));
    }
    Ok(VVForm::from_field(p.dim, &sharp_field(p, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Chart, Limits, Rational};

    fn p(s: &str) -> Poly {
        parse_poly(s, &Chart::new(["x", "y"]).unwrap(), &Limits::default()).unwrap()
    }
    fn p3(s: &str) -> Poly {
        parse_poly(s, &Chart::new(["x", "y", "z"]).unwrap(), &Limits::default()).unwrap()
    }
    fn dx() -> DiffForm {
        DiffForm::dx(2, 0)
    }
    fn dy() -> DiffForm {
        DiffForm::dx(2, 1)
    }
    fn j2() -> VVForm {
        // J(d/dx) = d/dy, J(d/dy) = -d/dx
        VVForm::endomorphism(&[vec![p("0"), p("-1")], vec![p("1"), p("0")]])
    }

    #[test]
    fn wedge_examples() {
        let area = dx().wedge(&dy());
        assert_eq!(area.coeff(&[0, 1]), p("1"));
        assert!(dx().wedge(&dx()).is_zero());
        let a = dx().scale(&p("x"));
        let b = &dy().scale(&p("y")) + &dx();
        assert_eq!(a.wedge(&b), area.scale(&p("x*y")));
        assert_eq!(dy().wedge(&dx()), -&area);
    }

    #[test]
    fn exterior_derivative_examples() {
        let f = DiffForm::function(p("x^2*y"));
        assert_eq!(f.d(), &dx().scale(&p("2*x*y")) + &dy().scale(&p("x^2")));
        assert!(dx().d().is_zero());
        assert_eq!(dy().scale(&p("x")).d(), dx().wedge(&dy()));
    }

    #[test]
    fn interior_examples() {
        let id = VVForm::identity(2);
        let a = dx().wedge(&dy()).scale(&p("x + y^2"));
        assert_eq!(id.interior_of(&a), a.scale_int(2));
        let r = VVForm::scalar_endomorphism(2, &p("x"));
        assert_eq!(r.interior_of(&dx()), dx().scale(&p("x")));
        let ddx = VVForm::from_field(2, &coord_field(2, 0));
        assert_eq!(ddx.interior_of(&dx().wedge(&dy())), dy());
    }

    #[test]
    fn lie_derivative_examples() {
        let ddx = VVForm::from_field(2, &coord_field(2, 0));
        let f = DiffForm::function(p("x^2*y"));
        assert_eq!(ddx.lie_of(&f).as_function(), p("2*x*y"));
        // L_id = d on forms
        let alpha = dy().scale(&p("x"));
        assert_eq!(VVForm::identity(2).lie_of(&alpha), alpha.d());
        let r = VVForm::scalar_endomorphism(2, &p("x"));
        let alpha = dx().scale(&p("y"));
        // d L_r = (-1)^k L_r d with k = 1
        let lhs = &r.lie_of(&alpha).d() + &r.lie_of(&alpha.d());
        assert!(lhs.is_zero());
    }

    #[test]
    fn fn_bracket_examples() {
        let ex = VVForm::from_field(2, &coord_field(2, 0));
        let ey = VVForm::from_field(2, &coord_field(2, 1));
        let xex = VVForm::from_field(2, &[p("x"), p("0")]);
        assert!(ex.fn_bracket(&ey).is_zero());
        assert!(ey.fn_bracket(&xex).is_zero());
        assert_eq!(ex.fn_bracket(&xex), ex);
        assert!(j2().fn_bracket(&j2()).is_zero());
    }

    #[test]
    fn torsion_examples() {
        assert!(nijenhuis_torsion(&VVForm::identity(2)).is_zero());
        assert!(nijenhuis_torsion(&j2()).is_zero());
        assert!(nijenhuis_torsion(&VVForm::scalar_endomorphism(2, &p("x"))).is_zero());
        // a non-integrable example: r = y dx (x) d/dy + x dy (x) d/dx ... check ½[r,r]
        let r = VVForm::endomorphism(&[vec![p("0"), p("x^2")], vec![p("y"), p("x")]]);
        let n = nijenhuis_torsion(&r);
        let half = r
            .fn_bracket(&r)
            .map_comps(|c| c.map_coeffs(|q| q.scale(&Rational::new(1.into(), 2.into()))));
        assert_eq!(n, half);
    }

    #[test]
    fn schouten_examples() {
        let pi0 = Multivector::bivector(2, [(0, 1, p("1"))]);
        assert!(pi0.schouten(&pi0).is_zero());
        let pix = Multivector::bivector(2, [(0, 1, p("x"))]);
        assert!(pix.schouten(&pix).is_zero());
        let ddx = Multivector::vector(&coord_field(2, 0));
        assert_eq!(ddx.schouten(&pix), pi0);
        // a non-Poisson bivector in dimension 3
        let pi = Multivector::bivector(3, [(0, 1, p3("1")), (1, 2, p3("y"))]);
        assert!(!pi.schouten(&pi).is_zero());
        // [X, Y] is the Lie bracket
        let x = vec![p("y"), p("x^2")];
        let y = vec![p("x*y"), p("1")];
        assert_eq!(
            Multivector::vector(&x)
                .schouten(&Multivector::vector(&y))
                .as_vector(),
            lie_bracket(&x, &y)
        );
    }

    #[test]
    fn sharp_examples() {
        let pi0 = Multivector::bivector(2, [(0, 1, p("1"))]);
        assert_eq!(sharp_field(&pi0, &dx()), vec![p("0"), p("1")]);
        assert_eq!(sharp_field(&pi0, &dy()), vec![p("-1"), p("0")]);
        let zero = Multivector::zero(2, 2);
        assert!(field_is_zero(&sharp_field(&zero, &dx())));
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = DiffForm::dx(2, 0);
        let b = DiffForm::dx(3, 0);
        assert!(matches!(wedge(&a, &b), Err(Error::ChartMismatch(_))));
        let pi = Multivector::zero(3, 2);
        assert!(sharp(&pi, &a).is_err());
    }

    #[test]
    fn degree_overflow_gives_zero() {
        let pi = Multivector::bivector(2, [(0, 1, p("x"))]);
        let s = pi.schouten(&pi);
        assert_eq!(s.degree(), 3);
        assert!(s.is_zero());
        assert!(dx().wedge(&dy()).wedge(&dx()).is_zero());
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(
            multi_indices(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(multi_indices(2, 0), vec![Vec::<usize>::new()]);
        assert!(multi_indices(2, 3).is_empty());
    }
}
