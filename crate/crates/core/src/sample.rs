//! Seeded random generators for property tests and randomized checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::forms::{multi_indices, DiffForm, Multivector, VVForm, VectorField};
use crate::gder::{FramedBundle, GenDer};
use crate::poly::{Poly, Rational};

pub use rand::SeedableRng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficient range and degree used by the generators.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_degree: u32,
    pub max_abs: i64,
    /// Probability that a generated coefficient is zero.
    pub sparsity: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_degree: 1,
            max_abs: 3,
            sparsity: 0.3,
        }
    }
}

fn small_rational(rng: &mut SampleRng, max_abs: i64) -> Rational {
    let num = rng.gen_range(-max_abs..=max_abs);
    let den = if rng.gen_bool(0.2) { 2 } else { 1 };
    Rational::new(num.into(), den.into())
}

/// Polynomial with every monomial of total degree `<= max_degree` drawn independently.
pub fn poly(rng: &mut SampleRng, nvars: usize, shape: Shape) -> Poly {
    if rng.gen_bool(shape.sparsity) {
        return Poly::zero(nvars);
    }
    let mut out = Poly::zero(nvars);
    for exps in exponents_up_to(nvars, shape.max_degree) {
        if rng.gen_bool(0.5) {
            out += &Poly::monomial(small_rational(rng, shape.max_abs), exps);
        }
    }
    out
}

fn exponents_up_to(nvars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; nvars]];
    for i in 0..nvars {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=(max_degree - used) {
                let mut f = e.clone();
                f[i] = k;
                next.push(f);
            }
        }
        out = next;
    }
    out
}

pub fn field(rng: &mut SampleRng, nvars: usize, rank: usize, shape: Shape) -> VectorField {
    (0..rank).map(|_| poly(rng, nvars, shape)).collect()
}

pub fn form(rng: &mut SampleRng, dim: usize, degree: usize, shape: Shape) -> DiffForm {
    let terms: Vec<_> = multi_indices(dim, degree)
        .into_iter()
        .map(|i| (i, poly(rng, dim, shape)))
        .collect();
    DiffForm::from_terms(dim, degree, terms)
}

pub fn vvform(rng: &mut SampleRng, dim: usize, degree: usize, rank: usize, shape: Shape) -> VVForm {
    let comps = (0..rank).map(|_| form(rng, dim, degree, shape)).collect();
    VVForm::from_comps(dim, degree, comps)
}

pub fn endomorphism(rng: &mut SampleRng, dim: usize, shape: Shape) -> VVForm {
    vvform(rng, dim, 1, dim, shape)
}

pub fn bivector(rng: &mut SampleRng, dim: usize, shape: Shape) -> Multivector {
    let mut entries = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            entries.push((i, j, poly(rng, dim, shape)));
        }
    }
    Multivector::bivector(dim, entries)
}

/// Random generalized derivation: independent `D` on the frame, `l` and `r`.
pub fn gender(rng: &mut SampleRng, bundle: &FramedBundle, degree: usize, shape: Shape) -> GenDer {
    let (m, n) = (bundle.dim(), bundle.rank());
    let d = (0..n).map(|_| vvform(rng, m, degree, n, shape)).collect();
    let l = if degree == 0 {
        Vec::new()
    } else {
        (0..n)
            .map(|_| vvform(rng, m, degree - 1, n, shape))
            .collect()
    };
    let r = vvform(rng, m, degree, m, shape);
    GenDer::new(bundle.clone(), degree, d, l, r).expect("generated shapes are consistent")
}
