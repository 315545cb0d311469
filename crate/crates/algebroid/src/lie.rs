//! Finite-dimensional Lie algebras by structure constants, matrix
//! realizations, representations, and polynomial Lie-algebra-valued fields.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::poly::{rat, PolyScalar, PolyVectorField, Rat};

/// Lie algebra given by structure constants c[i][j][k] with
/// [e_i, e_j] = sum_k c[i][j][k] e_k, and an optional matrix realization.
///
/// Basis order is fixed lexicographically by the constructors and documented
/// on each of them; all component indexing in the crate refers to that
/// order.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub dim: usize,
    c: Vec<Vec<Vec<Rat>>>,
    pub matrix_basis: Option<Vec<RatMatrix>>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.c == other.c
    }
}

impl LieAlgebra {
    /// Build from structure constants, validating antisymmetry and, when a
    /// matrix basis is given, that commutators reproduce the constants.
    pub fn new(
        dim: usize,
        c: Vec<Vec<Vec<Rat>>>,
        matrix_basis: Option<Vec<RatMatrix>>,
    ) -> Result<Self> {
        if c.len() != dim || c.iter().any(|p| p.len() != dim || p.iter().any(|q| q.len() != dim)) {
            return Err(Error::DimensionMismatch(format!(
                "structure constant table is not {dim} x {dim} x {dim}"
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if c[i][j][k] != -&c[j][i][k] {
                        return Err(Error::InvalidInput(format!(
                            "structure constants not antisymmetric at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        let alg = LieAlgebra {
            dim,
            c,
            matrix_basis,
        };
        if let Some(basis) = &alg.matrix_basis {
            if basis.len() != dim {
                return Err(Error::DimensionMismatch(
                    "matrix basis length differs from dimension".into(),
                ));
            }
            for i in 0..dim {
                for j in 0..dim {
                    let mut expect = RatMatrix::zero(basis[0].n);
                    for k in 0..dim {
                        expect = expect.add(&basis[k].scale(&alg.c[i][j][k]));
                    }
                    if basis[i].commutator(&basis[j]) != expect {
                        return Err(Error::InvalidInput(format!(
                            "matrix commutator [e_{}, e_{}] does not match structure constants",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Derive structure constants from matrix commutators. Every commutator
    /// must expand over the basis; returns an error otherwise.
    pub fn from_matrix_basis(basis: Vec<RatMatrix>) -> Result<Self> {
        let dim = basis.len();
        let mut c = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let comm = basis[i].commutator(&basis[j]);
                let coeffs = expand_over_basis(&comm, &basis)?;
                c[i][j] = coeffs;
            }
        }
        LieAlgebra::new(dim, c, Some(basis))
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.c[i][j][k]
    }

    /// Coefficients of [e_i, e_j].
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rat] {
        &self.c[i][j]
    }

    /// Serialize as a structured record: dimension, nonzero structure
    /// constants as [i, j, k, "p/q"] triples (1-based), optional matrix basis.
    pub fn to_record(&self) -> serde_json::Value {
        let mut triples = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    if !self.c[i][j][k].is_zero() {
                        triples.push(serde_json::json!([
                            i + 1,
                            j + 1,
                            k + 1,
                            self.c[i][j][k].to_string()
                        ]));
                    }
                }
            }
        }
        let basis = self.matrix_basis.as_ref().map(|b| {
            b.iter()
                .map(|m| {
                    (0..m.n)
                        .map(|i| {
                            (0..m.n)
                                .map(|j| m.get(i, j).to_string())
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        });
        match basis {
            Some(b) => serde_json::json!({
                "dim": self.dim,
                "structure_constants": triples,
                "matrix_basis": b,
            }),
            None => serde_json::json!({
                "dim": self.dim,
                "structure_constants": triples,
            }),
        }
    }
}

fn expand_over_basis(m: &RatMatrix, basis: &[RatMatrix]) -> Result<Vec<Rat>> {
    // Desk-scale solve: the bases used here (elementary positions, traceless
    // combinations) have entrywise-triangular support, so greedy elimination
    // over the support positions suffices.
    let mut rem = m.clone();
    let mut coeffs = vec![Rat::zero(); basis.len()];
    let mut progress = true;
    while progress && !rem.is_zero() {
        progress = false;
        for (idx, b) in basis.iter().enumerate() {
            // find a support position of b that no other unused basis element shares
            for pos in 0..b.entries.len() {
                if b.entries[pos].is_zero() {
                    continue;
                }
                let unique = basis
                    .iter()
                    .enumerate()
                    .all(|(l, other)| l == idx || other.entries[pos].is_zero());
                if unique && !rem.entries[pos].is_zero() {
                    let coef = &rem.entries[pos] / &b.entries[pos];
                    coeffs[idx] = &coeffs[idx] + &coef;
                    rem = rem.sub(&b.scale(&coef));
                    progress = true;
                    break;
                }
            }
        }
    }
    if !rem.is_zero() {
        return Err(Error::InvalidInput(
            "matrix does not expand over the given basis".into(),
        ));
    }
    Ok(coeffs)
}

/// Check the Jacobi identity over all basis triples. Total function: returns
/// false on failure rather than erroring.
pub fn validate_jacobi(alg: &LieAlgebra) -> bool {
    let m = alg.dim;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j], coefficient of e_l
                    let mut sum = Rat::zero();
                    for p in 0..m {
                        sum += alg.c(i, j, p) * alg.c(p, k, l);
                        sum += alg.c(j, k, p) * alg.c(p, i, l);
                        sum += alg.c(k, i, p) * alg.c(p, j, l);
                    }
                    if !sum.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Traceless n x n matrices with the commutator bracket.
///
/// Basis order: elementary matrices E_{ij} (i != j) in lexicographic (row,
/// column) order, then the diagonal differences H_k = E_kk - E_{k+1,k+1}.
/// For n = 2 this gives e_1 = E_12, e_2 = E_21, e_3 = H = diag(1, -1).
pub fn make_sl(n: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "sl_n needs n >= 2, got {n}"
        )));
    }
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(RatMatrix::elementary(n, i, j));
            }
        }
    }
    for k in 0..n - 1 {
        let mut h = RatMatrix::zero(n);
        h.set(k, k, rat(1));
        h.set(k + 1, k + 1, rat(-1));
        basis.push(h);
    }
    LieAlgebra::from_matrix_basis(basis)
}

/// The 3-dimensional Heisenberg algebra: [e_1, e_2] = e_3, everything else
/// zero. Matrix basis E_12, E_23, E_13 in the strictly upper 3 x 3 matrices.
pub fn make_heisenberg() -> LieAlgebra {
    let basis = vec![
        RatMatrix::elementary(3, 0, 1),
        RatMatrix::elementary(3, 1, 2),
        RatMatrix::elementary(3, 0, 2),
    ];
    LieAlgebra::from_matrix_basis(basis).expect("heisenberg basis closes")
}

/// Abelian algebra of the given dimension (all brackets zero).
pub fn make_abelian(dim: usize) -> LieAlgebra {
    LieAlgebra::new(dim, vec![vec![vec![Rat::zero(); dim]; dim]; dim], None)
        .expect("zero constants are antisymmetric")
}

/// A representation of the algebra: one matrix per basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub n: usize,
    pub mats: Vec<RatMatrix>,
}

impl Representation {
    /// Adjoint representation: (ad e_i) e_j = [e_i, e_j].
    pub fn adjoint(alg: &LieAlgebra) -> Self {
        let m = alg.dim;
        let mats = (0..m)
            .map(|i| {
                let mut a = RatMatrix::zero(m);
                for j in 0..m {
                    for k in 0..m {
                        a.set(k, j, alg.c(i, j, k).clone());
                    }
                }
                a
            })
            .collect();
        Representation { n: m, mats }
    }

    /// Defining representation from the matrix basis.
    pub fn defining(alg: &LieAlgebra) -> Result<Self> {
        let basis = alg.matrix_basis.as_ref().ok_or_else(|| {
            Error::InvalidRepresentation("algebra has no matrix basis".into())
        })?;
        Ok(Representation {
            n: basis[0].n,
            mats: basis.clone(),
        })
    }

    /// Zero representation on k x k matrices (valid for any algebra).
    pub fn zero(alg: &LieAlgebra, k: usize) -> Self {
        Representation {
            n: k,
            mats: (0..alg.dim).map(|_| RatMatrix::zero(k)).collect(),
        }
    }

    /// Check rep([e_i, e_j]) = [rep(e_i), rep(e_j)] for all basis pairs.
    pub fn validate(&self, alg: &LieAlgebra) -> Result<()> {
        if self.mats.len() != alg.dim {
            return Err(Error::InvalidRepresentation(format!(
                "representation has {} matrices for a dimension {} algebra",
                self.mats.len(),
                alg.dim
            )));
        }
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                let mut expect = RatMatrix::zero(self.n);
                for k in 0..alg.dim {
                    expect = expect.add(&self.mats[k].scale(alg.c(i, j, k)));
                }
                if self.mats[i].commutator(&self.mats[j]) != expect {
                    return Err(Error::InvalidRepresentation(format!(
                        "bracket relation fails on basis pair ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Polynomial map from the base into the Lie algebra, as coefficients over
/// the fixed basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaField {
    pub components: Vec<PolyScalar>,
}

impl GammaField {
    pub fn zero(dim: usize, n_vars: usize) -> Self {
        GammaField {
            components: (0..dim).map(|_| PolyScalar::zero(n_vars)).collect(),
        }
    }

    /// Constant basis element e_{a+1} (0-based index).
    pub fn basis(dim: usize, a: usize, n_vars: usize) -> Self {
        let mut g = Self::zero(dim, n_vars);
        g.components[a] = PolyScalar::one(n_vars);
        g
    }

    pub fn from_components(components: Vec<PolyScalar>) -> Self {
        assert!(!components.is_empty());
        let n_vars = components[0].n_vars();
        for c in &components {
            assert_eq!(c.n_vars(), n_vars);
        }
        GammaField { components }
    }

    pub fn constant(coeffs: &[Rat], n_vars: usize) -> Self {
        GammaField {
            components: coeffs
                .iter()
                .map(|c| PolyScalar::constant(n_vars, c.clone()))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn n_vars(&self) -> usize {
        self.components[0].n_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        GammaField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GammaField {
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &PolyScalar) -> Self {
        GammaField {
            components: self.components.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        GammaField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Componentwise derivation action of a vector field.
    pub fn apply_field(&self, x: &PolyVectorField) -> Self {
        GammaField {
            components: self.components.iter().map(|c| x.apply(c)).collect(),
        }
    }

    /// Realize as a polynomial matrix through the algebra's matrix basis.
    pub fn to_matrix(&self, alg: &LieAlgebra) -> Result<crate::matrix::PolyMatrix> {
        let basis = alg.matrix_basis.as_ref().ok_or_else(|| {
            Error::InvalidInput("algebra has no matrix basis".into())
        })?;
        let n = basis[0].n;
        let n_vars = self.n_vars();
        let mut out = crate::matrix::PolyMatrix::zero(n, n_vars);
        for (a, coeff) in self.components.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            out = out.add(&basis[a].to_poly(n_vars).scale(coeff));
        }
        Ok(out)
    }

    pub fn pad_vars(&self, new_n_vars: usize) -> Self {
        GammaField {
            components: self
                .components
                .iter()
                .map(|c| c.pad_vars(new_n_vars))
                .collect(),
        }
    }

    pub fn restrict_vars(&self, keep: usize) -> Self {
        GammaField {
            components: self
                .components
                .iter()
                .map(|c| c.restrict_vars(keep))
                .collect(),
        }
    }

    pub fn max_total_degree(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.total_degree())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for GammaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) e{}", c, a + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Pointwise bracket of two Lie-algebra-valued fields.
pub fn bracket_gamma(alg: &LieAlgebra, a: &GammaField, b: &GammaField) -> Result<GammaField> {
    if a.dim() != alg.dim || b.dim() != alg.dim {
        return Err(Error::DimensionMismatch(format!(
            "gamma fields of dimensions {} and {} over a dimension {} algebra",
            a.dim(),
            b.dim(),
            alg.dim
        )));
    }
    let n_vars = a.n_vars();
    let mut out = GammaField::zero(alg.dim, n_vars);
    for i in 0..alg.dim {
        if a.components[i].is_zero() {
            continue;
        }
        for j in 0..alg.dim {
            if b.components[j].is_zero() {
                continue;
            }
            let prod = a.components[i].mul(&b.components[j]);
            for k in 0..alg.dim {
                let c = alg.c(i, j, k);
                if c.is_zero() {
                    continue;
                }
                out.components[k] = out.components[k].add(&prod.scale(c));
            }
        }
    }
    Ok(out)
}

/// Shared handle used by forms and downstream modules.
pub type AlgebraRef = Arc<LieAlgebra>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn sl2_structure_constants_from_commutators() {
        let sl2 = make_sl(2).unwrap();
        assert_eq!(sl2.dim, 3);
        // basis: e1 = E12 (E), e2 = E21 (F), e3 = H
        // [E, F] = H
        assert_eq!(sl2.bracket_basis(0, 1), &[rat(0), rat(0), rat(1)][..]);
        // [H, E] = 2E
        assert_eq!(sl2.bracket_basis(2, 0), &[rat(2), rat(0), rat(0)][..]);
        // [H, F] = -2F
        assert_eq!(sl2.bracket_basis(2, 1), &[rat(0), rat(-2), rat(0)][..]);
        assert!(validate_jacobi(&sl2));
    }

    #[test]
    fn sl3_dimension() {
        let sl3 = make_sl(3).unwrap();
        assert_eq!(sl3.dim, 8);
        assert!(validate_jacobi(&sl3));
        assert!(make_sl(1).is_err());
    }

    #[test]
    fn abelian_jacobi_trivially_true() {
        assert!(validate_jacobi(&make_abelian(4)));
    }

    #[test]
    fn perturbed_sl2_fails_jacobi() {
        let sl2 = make_sl(2).unwrap();
        let mut c = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j][k] = sl2.c(i, j, k).clone();
                }
            }
        }
        // change c[H][E][E] from 2 to 3 (and its antisymmetric partner)
        c[2][0][0] = rat(3);
        c[0][2][0] = rat(-3);
        let bad = LieAlgebra::new(3, c, None).unwrap();
        assert!(!validate_jacobi(&bad));
    }

    #[test]
    fn heisenberg_brackets() {
        let h = make_heisenberg();
        assert_eq!(h.dim, 3);
        assert_eq!(h.bracket_basis(0, 1), &[rat(0), rat(0), rat(1)][..]);
        assert_eq!(h.bracket_basis(0, 2), &[rat(0), rat(0), rat(0)][..]);
        assert!(validate_jacobi(&h));
    }

    #[test]
    fn bracket_gamma_oracles() {
        let sl2 = make_sl(2).unwrap();
        // a = x1 E, b = F -> x1 H
        let a = GammaField::from_components(vec![
            parse_poly("x1", 2).unwrap(),
            PolyScalar::zero(2),
            PolyScalar::zero(2),
        ]);
        let b = GammaField::basis(3, 1, 2);
        let ab = bracket_gamma(&sl2, &a, &b).unwrap();
        let expect = GammaField::from_components(vec![
            PolyScalar::zero(2),
            PolyScalar::zero(2),
            parse_poly("x1", 2).unwrap(),
        ]);
        assert_eq!(ab, expect);
        // antisymmetry: [a, a] = 0
        assert!(bracket_gamma(&sl2, &a, &a).unwrap().is_zero());
        // abelian: everything brackets to zero
        let ab2 = make_abelian(3);
        assert!(bracket_gamma(&ab2, &a, &b).unwrap().is_zero());
    }

    #[test]
    fn adjoint_rep_is_valid() {
        for alg in [make_sl(2).unwrap(), make_heisenberg(), make_abelian(2)] {
            Representation::adjoint(&alg).validate(&alg).unwrap();
        }
    }

    #[test]
    fn defining_rep_is_valid() {
        let sl3 = make_sl(3).unwrap();
        Representation::defining(&sl3).unwrap().validate(&sl3).unwrap();
    }

    #[test]
    fn gamma_to_matrix_round_trip() {
        let sl2 = make_sl(2).unwrap();
        let g = GammaField::from_components(vec![
            parse_poly("x1", 2).unwrap(),
            parse_poly("2", 2).unwrap(),
            parse_poly("x2", 2).unwrap(),
        ]);
        let m = g.to_matrix(&sl2).unwrap();
        // matrix is x1 E12 + 2 E21 + x2 H
        assert_eq!(*m.get(0, 0), parse_poly("x2", 2).unwrap());
        assert_eq!(*m.get(0, 1), parse_poly("x1", 2).unwrap());
        assert_eq!(*m.get(1, 0), parse_poly("2", 2).unwrap());
        assert_eq!(*m.get(1, 1), parse_poly("-x2", 2).unwrap());
        assert!(m.trace().is_zero());
    }

    #[test]
    fn record_serialization_shape() {
        let h = make_heisenberg();
        let rec = h.to_record();
        assert_eq!(rec["dim"], 3);
        let triples = rec["structure_constants"].as_array().unwrap();
        // [e1,e2]=e3 and [e2,e1]=-e3
        assert_eq!(triples.len(), 2);
    }
}
