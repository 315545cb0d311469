//! Seeded generators for desk-scale random instances.
//!
//! Sampling draws small integer data (coefficients in -3..=3, total degree
//! at most 2) from a deterministic ChaCha stream, so a seed pins every
//! generated object exactly and all verification on the samples stays an
//! exact rational computation.

use rand::Rng;

use crate::forms::{MixedForm, TlaElement, Value, ValueSpace};
use crate::lie::{AlgebraRef, GammaField};
use crate::matrix::{GroupElementField, PolyMatrix, RatMatrix};
use crate::poly::{rat, PolyScalar, PolyVectorField, Rat};

/// A small integer coefficient, biased away from zero.
pub fn coefficient<R: Rng>(rng: &mut R) -> Rat {
    rat(*[-3, -2, -1, 1, 1, 2, 3].get(rng.gen_range(0..7)).unwrap())
}

/// A polynomial with up to `terms` monomials of total degree <= `max_deg`.
pub fn poly_of_degree<R: Rng>(
    rng: &mut R,
    n_vars: usize,
    terms: usize,
    max_deg: usize,
) -> PolyScalar {
    let mut out = PolyScalar::zero(n_vars);
    for _ in 0..terms {
        let mut exps = vec![0u16; n_vars];
        for _ in 0..rng.gen_range(0..=max_deg) {
            if n_vars > 0 {
                exps[rng.gen_range(0..n_vars)] += 1;
            }
        }
        out = out.add(&PolyScalar::monomial(n_vars, exps, coefficient(rng)));
    }
    out
}

/// A polynomial with up to `terms` monomials of total degree <= 2.
pub fn poly<R: Rng>(rng: &mut R, n_vars: usize, terms: usize) -> PolyScalar {
    poly_of_degree(rng, n_vars, terms, 2)
}

/// An affine polynomial (total degree <= 1).
pub fn linear_poly<R: Rng>(rng: &mut R, n_vars: usize) -> PolyScalar {
    poly_of_degree(rng, n_vars, 2, 1)
}

pub fn gamma_of_degree<R: Rng>(rng: &mut R, m: usize, n_vars: usize, max_deg: usize) -> GammaField {
    GammaField::from_components((0..m).map(|_| poly_of_degree(rng, n_vars, 2, max_deg)).collect())
}

pub fn gamma<R: Rng>(rng: &mut R, m: usize, n_vars: usize) -> GammaField {
    gamma_of_degree(rng, m, n_vars, 2)
}

pub fn vector_field<R: Rng>(rng: &mut R, d: usize) -> PolyVectorField {
    PolyVectorField::from_components((0..d).map(|_| poly(rng, d, 2)).collect())
}

pub fn tla<R: Rng>(rng: &mut R, d: usize, m: usize) -> TlaElement {
    TlaElement::new(vector_field(rng, d), gamma(rng, m, d))
}

/// A value in the given space over `n_vars` coordinates, with polynomial
/// entries of total degree <= `max_deg`.
pub fn value_of_degree<R: Rng>(
    rng: &mut R,
    space: &ValueSpace,
    m: usize,
    n_vars: usize,
    max_deg: usize,
) -> Value {
    match space {
        ValueSpace::Scalar => Value::Scalar(poly_of_degree(rng, n_vars, 2, max_deg)),
        ValueSpace::Kernel => Value::Kernel(gamma_of_degree(rng, m, n_vars, max_deg)),
        ValueSpace::Endo(rep) => Value::Endo(poly_matrix_of_degree(rng, rep.n, n_vars, max_deg)),
    }
}

/// A value in the given space over `n_vars` coordinates.
pub fn value<R: Rng>(rng: &mut R, space: &ValueSpace, m: usize, n_vars: usize) -> Value {
    value_of_degree(rng, space, m, n_vars, 2)
}

/// A form of bidegree (p, q) with a random value of degree <= `max_deg` in
/// every component slot.
pub fn form_of_degree<R: Rng>(
    rng: &mut R,
    d: usize,
    algebra: AlgebraRef,
    space: ValueSpace,
    p: usize,
    q: usize,
    max_deg: usize,
) -> MixedForm {
    let m = algebra.dim;
    let mut out = MixedForm::zero(d, algebra, space.clone(), p + q);
    for i_mask in 0u64..(1 << d) {
        if i_mask.count_ones() as usize != p {
            continue;
        }
        for j_mask in 0u64..(1 << m) {
            if j_mask.count_ones() as usize != q {
                continue;
            }
            out.add_to_component(i_mask, j_mask, value_of_degree(rng, &space, m, d, max_deg));
        }
    }
    out
}

/// A form of bidegree (p, q) with a random value in every component slot.
pub fn form<R: Rng>(
    rng: &mut R,
    d: usize,
    algebra: AlgebraRef,
    space: ValueSpace,
    p: usize,
    q: usize,
) -> MixedForm {
    form_of_degree(rng, d, algebra, space, p, q, 2)
}

/// A general 1-form: random values on both the coordinate and kernel legs.
pub fn one_form<R: Rng>(
    rng: &mut R,
    d: usize,
    algebra: AlgebraRef,
    space: ValueSpace,
    max_deg: usize,
) -> MixedForm {
    form_of_degree(rng, d, algebra.clone(), space.clone(), 1, 0, max_deg)
        .add(&form_of_degree(rng, d, algebra, space, 0, 1, max_deg))
}

pub fn rat_matrix<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut out = RatMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, coefficient(rng));
        }
    }
    out
}

pub fn poly_matrix_of_degree<R: Rng>(
    rng: &mut R,
    n: usize,
    n_vars: usize,
    max_deg: usize,
) -> PolyMatrix {
    PolyMatrix::from_entries(
        n,
        (0..n * n)
            .map(|_| poly_of_degree(rng, n_vars, 2, max_deg))
            .collect(),
    )
}

pub fn poly_matrix<R: Rng>(rng: &mut R, n: usize, n_vars: usize) -> PolyMatrix {
    poly_matrix_of_degree(rng, n, n_vars, 2)
}

/// A shear group element I + p E_{ij} at a random off-diagonal position.
pub fn shear<R: Rng>(rng: &mut R, n: usize, n_vars: usize) -> GroupElementField {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    GroupElementField::shear(n, i, j, poly(rng, n_vars, 1)).expect("off-diagonal position")
}

/// A shear with an affine entry; products of a few of these keep every
/// gauge-transformed curvature inside the default degree cap.
pub fn linear_shear<R: Rng>(rng: &mut R, n: usize, n_vars: usize) -> GroupElementField {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    GroupElementField::shear(n, i, j, linear_poly(rng, n_vars)).expect("off-diagonal position")
}
