//! Exact multivariate polynomials over Q and polynomial vector fields.
//!
//! Coefficients are `num_rational::BigRational`; monomials are exponent
//! vectors of a fixed length (the number of base coordinates). Storage is a
//! sorted map with no zero coefficients, so equality is structural and
//! deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Rational from numerator and denominator.
pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Models a smooth function on the base at desk scale: every identity in
/// scope becomes an exact polynomial identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyScalar {
    n_vars: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl PolyScalar {
    /// The zero polynomial in `n_vars` variables.
    pub fn zero(n_vars: usize) -> Self {
        PolyScalar {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Rat::one())
    }

    /// A constant polynomial.
    pub fn constant(n_vars: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; n_vars], c);
        }
        PolyScalar { n_vars, terms }
    }

    /// The coordinate polynomial `x_{i+1}` (0-based index).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable index {i} out of range {n_vars}");
        let mut exps = vec![0u16; n_vars];
        exps[i] = 1;
        Self::monomial(n_vars, exps, Rat::one())
    }

    /// A single monomial `c * x^exps`.
    pub fn monomial(n_vars: usize, exps: Vec<u16>, c: Rat) -> Self {
        assert_eq!(exps.len(), n_vars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        PolyScalar { n_vars, terms }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&vec![0u16; self.n_vars])
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn assert_same_vars(&self, other: &Self) {
        assert_eq!(
            self.n_vars, other.n_vars,
            "polynomials over different variable counts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        PolyScalar {
            n_vars: self.n_vars,
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PolyScalar {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut terms: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        PolyScalar {
            n_vars: self.n_vars,
            terms,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n_vars);
        }
        PolyScalar {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n_vars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.n_vars);
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            terms.insert(e2, c * rat(e[i] as i64));
        }
        PolyScalar {
            n_vars: self.n_vars,
            terms,
        }
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.n_vars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute a polynomial for each variable.  All images must share a
    /// common variable count, which becomes the variable count of the result.
    pub fn substitute(&self, images: &[PolyScalar]) -> Self {
        assert_eq!(images.len(), self.n_vars);
        let out_vars = images
            .first()
            .map(|p| p.n_vars())
            .unwrap_or(0);
        for p in images {
            assert_eq!(p.n_vars(), out_vars, "images over different variable counts");
        }
        let mut acc = PolyScalar::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = PolyScalar::constant(out_vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&images[i].pow(k as u32));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Reinterpret over a larger variable set; new variables are unused.
    pub fn pad_vars(&self, new_n_vars: usize) -> Self {
        assert!(new_n_vars >= self.n_vars);
        let extra = new_n_vars - self.n_vars;
        PolyScalar {
            n_vars: new_n_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.extend(std::iter::repeat(0).take(extra));
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Substitute 0 for all variables with index >= `keep`, dropping them.
    pub fn restrict_vars(&self, keep: usize) -> Self {
        assert!(keep <= self.n_vars);
        let mut terms: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[keep..].iter().any(|&k| k > 0) {
                continue;
            }
            let e2 = e[..keep].to_vec();
            let entry = terms.entry(e2.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(&e2);
            }
        }
        PolyScalar {
            n_vars: keep,
            terms,
        }
    }
}

impl fmt::Display for PolyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = e.iter().all(|&k| k == 0);
            if !abs.is_one() || is_const {
                write!(f, "{}", abs)?;
                if !is_const {
                    write!(f, " ")?;
                }
            }
            let mut first_var = true;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, " ")?;
                }
                first_var = false;
                write!(f, "x{}", i + 1)?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

/// Parse a polynomial from a plain text expression.
///
/// Grammar: signed terms separated by `+`/`-`; a term is an optional exact
/// rational (`3`, `-1/2`) followed by variable factors `x1`, `x2^3`.
/// Juxtaposition and `*` both mean multiplication.
pub fn parse_poly(input: &str, n_vars: usize) -> Result<PolyScalar> {
    let tokens = tokenize(input)?;
    let mut result = PolyScalar::zero(n_vars);
    let mut pos = 0usize;
    let mut sign = 1i64;
    let mut expect_term = true;
    let mut coeff = Rat::one();
    let mut exps = vec![0u16; n_vars];
    let mut have_factor = false;

    let flush = |result: &mut PolyScalar,
                 sign: i64,
                 coeff: &Rat,
                 exps: &[u16],
                 have_factor: bool|
     -> Result<()> {
        if !have_factor {
            return Err(Error::InvalidInput(format!(
                "empty term in polynomial '{input}'"
            )));
        }
        let c = coeff * rat(sign);
        *result = result.add(&PolyScalar::monomial(n_vars, exps.to_vec(), c));
        Ok(())
    };

    while pos < tokens.len() {
        match &tokens[pos] {
            Token::Plus | Token::Minus => {
                let s = if matches!(tokens[pos], Token::Minus) { -1 } else { 1 };
                if expect_term {
                    sign *= s;
                } else {
                    flush(&mut result, sign, &coeff, &exps, have_factor)?;
                    sign = s;
                    coeff = Rat::one();
                    exps = vec![0; n_vars];
                    have_factor = false;
                    expect_term = true;
                }
                pos += 1;
            }
            Token::Number(r) => {
                coeff *= r;
                have_factor = true;
                expect_term = false;
                pos += 1;
            }
            Token::Var(i) => {
                let i = *i;
                if i == 0 || i > n_vars {
                    return Err(Error::InvalidInput(format!(
                        "variable x{i} out of range 1..={n_vars} in '{input}'"
                    )));
                }
                let mut power = 1u16;
                if pos + 1 < tokens.len() {
                    if let Token::Caret = tokens[pos + 1] {
                        if let Some(Token::Number(r)) = tokens.get(pos + 2) {
                            if !r.is_integer() || r.is_negative() {
                                return Err(Error::InvalidInput(format!(
                                    "exponent must be a nonnegative integer in '{input}'"
                                )));
                            }
                            power = r.to_integer().try_into().map_err(|_| {
                                Error::InvalidInput(format!("exponent too large in '{input}'"))
                            })?;
                            pos += 2;
                        } else {
                            return Err(Error::InvalidInput(format!(
                                "expected exponent after '^' in '{input}'"
                            )));
                        }
                    }
                }
                exps[i - 1] += power;
                have_factor = true;
                expect_term = false;
                pos += 1;
            }
            Token::Caret => {
                return Err(Error::InvalidInput(format!(
                    "unexpected '^' in '{input}'"
                )));
            }
        }
    }
    if expect_term && !have_factor {
        return Err(Error::InvalidInput(format!(
            "trailing sign or empty polynomial '{input}'"
        )));
    }
    flush(&mut result, sign, &coeff, &exps, have_factor)?;
    Ok(result)
}

enum Token {
    Number(Rat),
    Var(usize),
    Plus,
    Minus,
    Caret,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b' ' | b'\t' | b'*' => i += 1,
            b'+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            b'-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            b'^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let num: i64 = input[start..i].parse().map_err(|_| {
                    Error::InvalidInput(format!("number too large in '{input}'"))
                })?;
                let mut value = rat(num);
                if i < bytes.len() && bytes[i] == b'/' {
                    i += 1;
                    let dstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(Error::InvalidInput(format!(
                            "expected denominator in '{input}'"
                        )));
                    }
                    let den: i64 = input[dstart..i].parse().map_err(|_| {
                        Error::InvalidInput(format!("number too large in '{input}'"))
                    })?;
                    if den == 0 {
                        return Err(Error::InvalidInput(format!(
                            "zero denominator in '{input}'"
                        )));
                    }
                    value = ratq(num, den);
                }
                tokens.push(Token::Number(value));
            }
            b'x' => {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(Error::InvalidInput(format!(
                        "expected variable index after 'x' in '{input}'"
                    )));
                }
                let idx: usize = input[start..i].parse().map_err(|_| {
                    Error::InvalidInput(format!("variable index too large in '{input}'"))
                })?;
                tokens.push(Token::Var(idx));
            }
            c => {
                return Err(Error::InvalidInput(format!(
                    "unexpected character '{}' in '{input}'",
                    c as char
                )));
            }
        }
    }
    Ok(tokens)
}

/// Polynomial vector field: coefficients of the coordinate derivations.
///
/// Acts on [`PolyScalar`] as a derivation: `X.apply(fg) = X.apply(f) g + f
/// X.apply(g)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVectorField {
    pub components: Vec<PolyScalar>,
}

impl PolyVectorField {
    /// The zero field over `d` coordinates.
    pub fn zero(d: usize) -> Self {
        PolyVectorField {
            components: (0..d).map(|_| PolyScalar::zero(d)).collect(),
        }
    }

    /// The coordinate derivation along `x_{i+1}`.
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.components[i] = PolyScalar::one(d);
        v
    }

    pub fn from_components(components: Vec<PolyScalar>) -> Self {
        assert!(!components.is_empty());
        let d = components.len();
        for c in &components {
            assert_eq!(c.n_vars(), d, "vector field component variable mismatch");
        }
        PolyVectorField { components }
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Derivation action on a scalar.
    pub fn apply(&self, f: &PolyScalar) -> PolyScalar {
        assert_eq!(f.n_vars(), self.d());
        let mut acc = PolyScalar::zero(self.d());
        for (i, c) in self.components.iter().enumerate() {
            acc = acc.add(&c.mul(&f.partial(i)));
        }
        acc
    }

    /// Commutator of vector fields.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.d(), other.d());
        let components = (0..self.d())
            .map(|k| {
                self.apply(&other.components[k])
                    .sub(&other.apply(&self.components[k]))
            })
            .collect();
        PolyVectorField { components }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d(), other.d());
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &PolyScalar) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Extend to a larger coordinate set; new components are zero.
    pub fn pad_vars(&self, new_d: usize) -> Self {
        assert!(new_d >= self.d());
        let mut components: Vec<PolyScalar> = self
            .components
            .iter()
            .map(|c| c.pad_vars(new_d))
            .collect();
        components.extend((self.d()..new_d).map(|_| PolyScalar::zero(new_d)));
        PolyVectorField { components }
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) d{}", c, i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
