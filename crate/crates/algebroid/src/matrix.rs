//! Square matrices over Q and over the polynomial ring, and polynomial
//! group element fields with exact inverses.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{PolyScalar, PolyVectorField, Rat};

/// Square matrix with rational entries (row major).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    pub n: usize,
    pub entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(n: usize) -> Self {
        RatMatrix {
            n,
            entries: vec![Rat::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Rat::one();
        }
        m
    }

    /// Elementary matrix E_{ij} (0-based indices).
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.entries[i * n + j] = Rat::one();
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        RatMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        RatMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let e = &mut out.entries[i * n + j];
                    *e += a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Rat {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Lift to a polynomial matrix with constant entries.
    pub fn to_poly(&self, n_vars: usize) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|c| PolyScalar::constant(n_vars, c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Square matrix with polynomial entries (row major).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    pub n: usize,
    pub entries: Vec<PolyScalar>,
}

impl PolyMatrix {
    pub fn zero(n: usize, n_vars: usize) -> Self {
        PolyMatrix {
            n,
            entries: (0..n * n).map(|_| PolyScalar::zero(n_vars)).collect(),
        }
    }

    pub fn identity(n: usize, n_vars: usize) -> Self {
        let mut m = Self::zero(n, n_vars);
        for i in 0..n {
            m.entries[i * n + i] = PolyScalar::one(n_vars);
        }
        m
    }

    pub fn from_entries(n: usize, entries: Vec<PolyScalar>) -> Self {
        assert_eq!(entries.len(), n * n);
        let n_vars = entries[0].n_vars();
        for e in &entries {
            assert_eq!(e.n_vars(), n_vars);
        }
        PolyMatrix { n, entries }
    }

    pub fn n_vars(&self) -> usize {
        self.entries[0].n_vars()
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyScalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PolyScalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &PolyScalar) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a.mul(f)).collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let n_vars = self.n_vars();
        let mut out = Self::zero(n, n_vars);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let e = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, e);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> PolyScalar {
        let mut t = PolyScalar::zero(self.n_vars());
        for i in 0..self.n {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Entrywise partial derivative.
    pub fn partial(&self, i: usize) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.partial(i)).collect(),
        }
    }

    /// Entrywise derivation action of a vector field.
    pub fn apply_field(&self, x: &PolyVectorField) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| x.apply(e)).collect(),
        }
    }

    /// Determinant by cofactor expansion (desk-scale n).
    pub fn det(&self) -> PolyScalar {
        let n = self.n;
        if n == 1 {
            return self.entries[0].clone();
        }
        let mut acc = PolyScalar::zero(self.n_vars());
        for j in 0..n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let minor = self.minor(0, j);
            let term = a.mul(&minor.det());
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == row {
                continue;
            }
            for j in 0..n {
                if j == col {
                    continue;
                }
                entries.push(self.get(i, j).clone());
            }
        }
        PolyMatrix {
            n: n - 1,
            entries,
        }
    }

    pub fn pad_vars(&self, new_n_vars: usize) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.pad_vars(new_n_vars)).collect(),
        }
    }

    pub fn restrict_vars(&self, keep: usize) -> Self {
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|e| e.restrict_vars(keep))
                .collect(),
        }
    }

    pub fn max_total_degree(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.total_degree())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Subtract the trace part: M - (tr M / n) I. The result has zero trace.
pub fn traceless_projection(m: &PolyMatrix) -> PolyMatrix {
    let n = m.n;
    let t = m.trace().scale(&crate::poly::ratq(1, n as i64));
    let mut out = m.clone();
    for i in 0..n {
        out.set(i, i, out.get(i, i).sub(&t));
    }
    out
}

/// Polynomial group element with an exact polynomial inverse.
///
/// Built from products of elementary shears I + p(x) E_{ij} (i != j), which
/// guarantees determinant 1 and a polynomial inverse without rational
/// functions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupElementField {
    pub matrix: PolyMatrix,
    pub inverse_matrix: PolyMatrix,
}

impl GroupElementField {
    pub fn identity(n: usize, n_vars: usize) -> Self {
        GroupElementField {
            matrix: PolyMatrix::identity(n, n_vars),
            inverse_matrix: PolyMatrix::identity(n, n_vars),
        }
    }

    /// Elementary shear I + p E_{ij} with inverse I - p E_{ij} (0-based i, j).
    pub fn shear(n: usize, i: usize, j: usize, p: PolyScalar) -> Result<Self> {
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidInput(format!(
                "shear position ({i}, {j}) invalid for {n} x {n}"
            )));
        }
        let n_vars = p.n_vars();
        let mut matrix = PolyMatrix::identity(n, n_vars);
        matrix.set(i, j, p.clone());
        let mut inverse_matrix = PolyMatrix::identity(n, n_vars);
        inverse_matrix.set(i, j, p.neg());
        Ok(GroupElementField {
            matrix,
            inverse_matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n
    }

    pub fn n_vars(&self) -> usize {
        self.matrix.n_vars()
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupElementField {
            matrix: self.matrix.mul(&other.matrix),
            inverse_matrix: other.inverse_matrix.mul(&self.inverse_matrix),
        }
    }

    pub fn inverse(&self) -> Self {
        GroupElementField {
            matrix: self.inverse_matrix.clone(),
            inverse_matrix: self.matrix.clone(),
        }
    }

    pub fn pad_vars(&self, new_n_vars: usize) -> Self {
        GroupElementField {
            matrix: self.matrix.pad_vars(new_n_vars),
            inverse_matrix: self.inverse_matrix.pad_vars(new_n_vars),
        }
    }

    /// Check the two-sided inverse and determinant 1 identities.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let n_vars = self.n_vars();
        let id = PolyMatrix::identity(n, n_vars);
        if self.matrix.mul(&self.inverse_matrix) != id
            || self.inverse_matrix.mul(&self.matrix) != id
        {
            return Err(Error::InvalidInput(
                "group element inverse is not two-sided".into(),
            ));
        }
        if self.matrix.det() != PolyScalar::one(n_vars) {
            return Err(Error::InvalidInput(
                "group element determinant is not 1".into(),
            ));
        }
        Ok(())
    }
}
