//! Bigraded forms on the trivial Lie algebroid TM + (M x g).
//!
//! A form of total degree r is stored componentwise: a map from a pair of
//! leg sets (I over the base coordinates, J over the fiber basis) with
//! |I| + |J| = r to a coefficient in the chosen value space. The convention
//! is "all dx legs before all theta legs", and evaluation pairs legs with
//! arguments through an exact determinant, which fixes every sign in the
//! calculus. The componentwise differential must agree with the direct
//! Koszul evaluation [`MixedForm::differential_via_koszul`]; that agreement
//! is checked as a property, with the evaluation form serving as the
//! semantic oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::check_degree;
use crate::error::{Error, Result};
use crate::lie::{bracket_gamma, AlgebraRef, GammaField, Representation};
use crate::matrix::PolyMatrix;
use crate::poly::{PolyScalar, PolyVectorField, Rat};

/// Coefficient space of a form: plain scalars, the kernel g with its
/// adjoint action, or a matrix algebra on which g acts by commutators
/// through a representation.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueSpace {
    Scalar,
    Kernel,
    Endo(Representation),
}

impl ValueSpace {
    pub fn zero_value(&self, m: usize, n_vars: usize) -> Value {
        match self {
            ValueSpace::Scalar => Value::Scalar(PolyScalar::zero(n_vars)),
            ValueSpace::Kernel => Value::Kernel(GammaField::zero(m, n_vars)),
            ValueSpace::Endo(rep) => Value::Endo(PolyMatrix::zero(rep.n, n_vars)),
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            ValueSpace::Scalar => "scalar",
            ValueSpace::Kernel => "kernel",
            ValueSpace::Endo(_) => "endo",
        }
    }
}

/// A value-space element.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(PolyScalar),
    Kernel(GammaField),
    Endo(PolyMatrix),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Scalar(p) => p.is_zero(),
            Value::Kernel(g) => g.is_zero(),
            Value::Endo(m) => m.is_zero(),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a.add(b)),
            (Value::Kernel(a), Value::Kernel(b)) => Value::Kernel(a.add(b)),
            (Value::Endo(a), Value::Endo(b)) => Value::Endo(a.add(b)),
            _ => panic!("adding values from different spaces"),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(p.neg()),
            Value::Kernel(g) => Value::Kernel(g.neg()),
            Value::Endo(m) => Value::Endo(m.neg()),
        }
    }

    pub fn scale(&self, f: &PolyScalar) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(p.mul(f)),
            Value::Kernel(g) => Value::Kernel(g.scale(f)),
            Value::Endo(m) => Value::Endo(m.scale(f)),
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(p.scale(c)),
            Value::Kernel(g) => Value::Kernel(g.scale_rat(c)),
            Value::Endo(m) => Value::Endo(m.scale_rat(c)),
        }
    }

    /// Derivation action of a vector field, componentwise.
    pub fn apply_field(&self, x: &PolyVectorField) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(x.apply(p)),
            Value::Kernel(g) => Value::Kernel(g.apply_field(x)),
            Value::Endo(m) => Value::Endo(m.apply_field(x)),
        }
    }

    pub fn max_total_degree(&self) -> usize {
        match self {
            Value::Scalar(p) => p.total_degree(),
            Value::Kernel(g) => g.max_total_degree(),
            Value::Endo(m) => m.max_total_degree(),
        }
    }

    pub fn pad_vars(&self, new_n_vars: usize) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(p.pad_vars(new_n_vars)),
            Value::Kernel(g) => Value::Kernel(g.pad_vars(new_n_vars)),
            Value::Endo(m) => Value::Endo(m.pad_vars(new_n_vars)),
        }
    }

    pub fn restrict_vars(&self, keep: usize) -> Value {
        match self {
            Value::Scalar(p) => Value::Scalar(p.restrict_vars(keep)),
            Value::Kernel(g) => Value::Kernel(g.restrict_vars(keep)),
            Value::Endo(m) => Value::Endo(m.restrict_vars(keep)),
        }
    }

    pub fn as_scalar(&self) -> Option<&PolyScalar> {
        match self {
            Value::Scalar(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_kernel(&self) -> Option<&GammaField> {
        match self {
            Value::Kernel(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_endo(&self) -> Option<&PolyMatrix> {
        match self {
            Value::Endo(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(p) => write!(f, "{p}"),
            Value::Kernel(g) => write!(f, "{g}"),
            Value::Endo(m) => write!(f, "{m}"),
        }
    }
}

/// Generic algebroid element X + gamma: a polynomial vector field together
/// with a polynomial g-valued map. The anchor is the projection onto X.
#[derive(Clone, Debug, PartialEq)]
pub struct TlaElement {
    pub x: PolyVectorField,
    pub gamma: GammaField,
}

impl TlaElement {
    pub fn new(x: PolyVectorField, gamma: GammaField) -> Self {
        TlaElement { x, gamma }
    }

    pub fn zero(d: usize, m: usize) -> Self {
        TlaElement {
            x: PolyVectorField::zero(d),
            gamma: GammaField::zero(m, d),
        }
    }

    /// The kernel inclusion of a g-valued map: 0 + l.
    pub fn iota(l: GammaField, d: usize) -> Self {
        TlaElement {
            x: PolyVectorField::zero(d),
            gamma: l,
        }
    }

    /// Pure vector field: X + 0.
    pub fn from_field(x: PolyVectorField, m: usize) -> Self {
        let d = x.d();
        TlaElement {
            x,
            gamma: GammaField::zero(m, d),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        TlaElement {
            x: self.x.add(&other.x),
            gamma: self.gamma.add(&other.gamma),
        }
    }

    pub fn scale(&self, f: &PolyScalar) -> Self {
        TlaElement {
            x: self.x.scale(f),
            gamma: self.gamma.scale(f),
        }
    }

    pub fn pad_vars(&self, new_d: usize) -> Self {
        TlaElement {
            x: self.x.pad_vars(new_d),
            gamma: self.gamma.pad_vars(new_d),
        }
    }
}

/// The algebroid bracket [X + gamma, Y + eta] = [X, Y] + (X.eta - Y.gamma +
/// [gamma, eta]).
pub fn tla_bracket(
    alg: &crate::lie::LieAlgebra,
    a: &TlaElement,
    b: &TlaElement,
) -> Result<TlaElement> {
    if a.x.d() != b.x.d() {
        return Err(Error::DimensionMismatch(format!(
            "base dimensions {} and {}",
            a.x.d(),
            b.x.d()
        )));
    }
    if a.gamma.dim() != alg.dim || b.gamma.dim() != alg.dim {
        return Err(Error::DimensionMismatch(format!(
            "gamma dimensions {} and {} over a dimension {} algebra",
            a.gamma.dim(),
            b.gamma.dim(),
            alg.dim
        )));
    }
    let x = a.x.bracket(&b.x);
    let gamma = b
        .gamma
        .apply_field(&a.x)
        .sub(&a.gamma.apply_field(&b.x))
        .add(&bracket_gamma(alg, &a.gamma, &b.gamma)?);
    Ok(TlaElement { x, gamma })
}

fn bits(mask: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        out.push(k);
        m &= m - 1;
    }
    out
}

/// Sign picked up when inserting leg `k` in front of the sorted legs `mask`
/// and moving it into sorted position: (-1)^(number of legs below k).
fn insert_sign(mask: u64, k: usize) -> i64 {
    let below = (mask & ((1u64 << k) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of inversions between two disjoint sorted leg sets, i.e. pairs
/// (a in `a`, b in `b`) with a > b.
fn merge_inversions(a: u64, b: u64) -> u32 {
    let mut inv = 0;
    let mut m = b;
    while m != 0 {
        let k = m.trailing_zeros();
        inv += (a >> (k + 1)).count_ones();
        m &= m - 1;
    }
    inv
}

/// Sort an explicit theta leg sequence, returning the permutation sign and
/// the resulting mask, or None when two legs coincide.
fn normalize_legs(seq: &[usize]) -> Option<(i64, u64)> {
    let mut v = seq.to_vec();
    let mut sign = 1i64;
    for i in 0..v.len() {
        for j in (i + 1..v.len()).rev() {
            if v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    let mut mask = 0u64;
    for k in v {
        mask |= 1u64 << k;
    }
    Some((sign, mask))
}

#[derive(Clone, Copy)]
enum Leg {
    Dx(usize),
    Theta(usize),
}

fn leg_pairing(leg: Leg, arg: &TlaElement) -> &PolyScalar {
    match leg {
        Leg::Dx(i) => &arg.x.components[i],
        Leg::Theta(a) => &arg.gamma.components[a],
    }
}

/// Homogeneous form of total degree r with components over dx^I wedge
/// theta^J.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedForm {
    d: usize,
    algebra: AlgebraRef,
    value_space: ValueSpace,
    degree: usize,
    components: BTreeMap<(u64, u64), Value>,
}

impl MixedForm {
    pub fn zero(d: usize, algebra: AlgebraRef, value_space: ValueSpace, degree: usize) -> Self {
        MixedForm {
            d,
            algebra,
            value_space,
            degree,
            components: BTreeMap::new(),
        }
    }

    /// Degree-0 form from a bare value.
    pub fn from_value(d: usize, algebra: AlgebraRef, value_space: ValueSpace, v: Value) -> Self {
        let mut f = Self::zero(d, algebra, value_space, 0);
        f.add_to_component(0, 0, v);
        f
    }

    /// The tautological kernel-valued 1-form theta = sum_a theta^a e_a,
    /// with theta(0 + gamma) = gamma.
    pub fn tautological_theta(d: usize, algebra: AlgebraRef) -> Self {
        let m = algebra.dim;
        let mut f = Self::zero(d, algebra, ValueSpace::Kernel, 1);
        for a in 0..m {
            f.add_to_component(0, 1 << a, Value::Kernel(GammaField::basis(m, a, d)));
        }
        f
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.algebra.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn value_space(&self) -> &ValueSpace {
        &self.value_space
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&(u64, u64), &Value)> {
        self.components.iter()
    }

    pub fn component(&self, i_legs: &[usize], j_legs: &[usize]) -> Option<&Value> {
        let i_mask = i_legs.iter().fold(0u64, |m, &k| m | (1 << k));
        let j_mask = j_legs.iter().fold(0u64, |m, &k| m | (1 << k));
        self.components.get(&(i_mask, j_mask))
    }

    /// Accumulate into a component, dropping it if the sum vanishes.
    pub fn add_to_component(&mut self, i_mask: u64, j_mask: u64, v: Value) {
        if v.is_zero() {
            return;
        }
        debug_assert_eq!(
            (i_mask.count_ones() + j_mask.count_ones()) as usize,
            self.degree,
            "component legs do not match form degree"
        );
        match self.components.get_mut(&(i_mask, j_mask)) {
            Some(existing) => {
                let sum = existing.add(&v);
                if sum.is_zero() {
                    self.components.remove(&(i_mask, j_mask));
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.components.insert((i_mask, j_mask), v);
            }
        }
    }

    /// Builder for tests and scenarios: legs must be strictly increasing.
    pub fn with_term(mut self, i_legs: &[usize], j_legs: &[usize], v: Value) -> Self {
        assert!(i_legs.windows(2).all(|w| w[0] < w[1]));
        assert!(j_legs.windows(2).all(|w| w[0] < w[1]));
        assert!(i_legs.iter().all(|&k| k < self.d));
        assert!(j_legs.iter().all(|&k| k < self.m()));
        let i_mask = i_legs.iter().fold(0u64, |m, &k| m | (1 << k));
        let j_mask = j_legs.iter().fold(0u64, |m, &k| m | (1 << k));
        self.add_to_component(i_mask, j_mask, v);
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (&(i, j), v) in &other.components {
            out.add_to_component(i, j, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            *v = v.neg();
        }
        out
    }

    pub fn scale(&self, f: &PolyScalar) -> Self {
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree,
        );
        for (&(i, j), v) in &self.components {
            out.add_to_component(i, j, v.scale(f));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree,
        );
        for (&(i, j), v) in &self.components {
            out.add_to_component(i, j, v.scale_rat(c));
        }
        out
    }

    /// Restrict to the components of bidegree (p, q).
    pub fn bidegree_part(&self, p: usize, q: usize) -> Self {
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree,
        );
        for (&(i, j), v) in &self.components {
            if i.count_ones() as usize == p && j.count_ones() as usize == q {
                out.add_to_component(i, j, v.clone());
            }
        }
        out
    }

    pub fn max_total_degree(&self) -> usize {
        self.components
            .values()
            .map(|v| v.max_total_degree())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn check_cap(self) -> Result<Self> {
        check_degree(self.max_total_degree())?;
        Ok(self)
    }

    /// Action of basis element e_a on a value: zero on scalars, the adjoint
    /// bracket on kernel values, the representation commutator on matrices.
    fn basis_action(&self, a: usize, v: &Value) -> Value {
        match (&self.value_space, v) {
            (ValueSpace::Scalar, Value::Scalar(p)) => Value::Scalar(PolyScalar::zero(p.n_vars())),
            (ValueSpace::Kernel, Value::Kernel(g)) => {
                let m = self.m();
                let n_vars = g.n_vars();
                let mut out = GammaField::zero(m, n_vars);
                for j in 0..m {
                    if g.components[j].is_zero() {
                        continue;
                    }
                    for k in 0..m {
                        let c = self.algebra.c(a, j, k);
                        if c.is_zero() {
                            continue;
                        }
                        out.components[k] = out.components[k].add(&g.components[j].scale(c));
                    }
                }
                Value::Kernel(out)
            }
            (ValueSpace::Endo(rep), Value::Endo(mat)) => {
                let r = rep.mats[a].to_poly(mat.n_vars());
                Value::Endo(r.commutator(mat))
            }
            _ => panic!("value does not belong to the form's value space"),
        }
    }

    /// Action of a polynomial g-valued map: sum_a gamma_a (e_a action).
    fn gamma_action(&self, gamma: &GammaField, v: &Value) -> Value {
        let mut out = self.value_space.zero_value(self.m(), gamma.n_vars());
        for a in 0..self.m() {
            if gamma.components[a].is_zero() {
                continue;
            }
            out = out.add(&self.basis_action(a, v).scale(&gamma.components[a]));
        }
        out
    }

    /// Full action of an algebroid element: X on coefficients plus the
    /// fiber action of gamma.
    pub fn phi_action(&self, x: &TlaElement, v: &Value) -> Value {
        v.apply_field(&x.x).add(&self.gamma_action(&x.gamma, v))
    }

    fn legs_of(&self, i_mask: u64, j_mask: u64) -> Vec<Leg> {
        let mut legs: Vec<Leg> = bits(i_mask).into_iter().map(Leg::Dx).collect();
        legs.extend(bits(j_mask).into_iter().map(Leg::Theta));
        legs
    }

    fn check_args(&self, args: &[TlaElement]) -> Result<()> {
        for arg in args {
            if arg.x.d() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "argument over {} coordinates, form over {}",
                    arg.x.d(),
                    self.d
                )));
            }
            if arg.gamma.dim() != self.m() {
                return Err(Error::DimensionMismatch(format!(
                    "argument gamma dimension {}, algebra dimension {}",
                    arg.gamma.dim(),
                    self.m()
                )));
            }
        }
        Ok(())
    }

    /// Evaluate on exactly `degree` arguments. Multilinear over scalars and
    /// totally antisymmetric by construction (determinant pairing).
    pub fn evaluate(&self, args: &[TlaElement]) -> Result<Value> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch {
                degree: self.degree,
                args: args.len(),
            });
        }
        self.check_args(args)?;
        let mut acc = self.value_space.zero_value(self.m(), self.d);
        for (&(i_mask, j_mask), v) in &self.components {
            let legs = self.legs_of(i_mask, j_mask);
            let det = pairing_det(&legs, args, (1u64 << args.len()) - 1, self.d);
            if det.is_zero() {
                continue;
            }
            acc = acc.add(&v.scale(&det));
        }
        Ok(acc)
    }

    /// Componentwise total differential. Matches the Koszul evaluation on
    /// all arguments; see `differential_via_koszul`.
    pub fn differential(&self) -> Result<Self> {
        self.differential_raw().check_cap()
    }

    pub(crate) fn differential_raw(&self) -> Self {
        let m = self.m();
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree + 1,
        );
        for (&(i_mask, j_mask), v) in &self.components {
            // de Rham part: insert dx^k with the coefficient's k-derivative
            for k in 0..self.d {
                if i_mask & (1 << k) != 0 {
                    continue;
                }
                let dv = match v {
                    Value::Scalar(p) => Value::Scalar(p.partial(k)),
                    Value::Kernel(g) => Value::Kernel(GammaField {
                        components: g.components.iter().map(|c| c.partial(k)).collect(),
                    }),
                    Value::Endo(mat) => Value::Endo(mat.partial(k)),
                };
                if dv.is_zero() {
                    continue;
                }
                let sign = insert_sign(i_mask, k);
                out.add_to_component(
                    i_mask | (1 << k),
                    j_mask,
                    if sign > 0 { dv } else { dv.neg() },
                );
            }
            // fiber part, crossing the dx block: (-1)^{|I|}
            let block_sign = if i_mask.count_ones() % 2 == 0 { 1i64 } else { -1 };
            // action part: insert theta^a with the e_a action on the value
            for a in 0..m {
                if j_mask & (1 << a) != 0 {
                    continue;
                }
                let av = self.basis_action(a, v);
                if av.is_zero() {
                    continue;
                }
                let sign = block_sign * insert_sign(j_mask, a);
                out.add_to_component(
                    i_mask,
                    j_mask | (1 << a),
                    if sign > 0 { av } else { av.neg() },
                );
            }
            // structural part: replace theta^k by -sum_{a<b} c_ab^k theta^a theta^b,
            // acting as an odd derivation over the theta legs
            for (t, k) in bits(j_mask).into_iter().enumerate() {
                let pos_sign = if t % 2 == 0 { 1i64 } else { -1 };
                let rest: Vec<usize> = bits(j_mask).into_iter().filter(|&x| x != k).collect();
                for a in 0..m {
                    for b in (a + 1)..m {
                        let c = self.algebra.c(a, b, k);
                        if c.is_zero() {
                            continue;
                        }
                        // legs: rest with (a, b) at position t
                        let mut seq = Vec::with_capacity(rest.len() + 2);
                        seq.extend_from_slice(&rest[..t]);
                        seq.push(a);
                        seq.push(b);
                        seq.extend_from_slice(&rest[t..]);
                        if let Some((perm_sign, new_mask)) = normalize_legs(&seq) {
                            let total = block_sign * pos_sign * perm_sign;
                            // contribution: total * (-c) * v
                            let coeff = if total > 0 { -c.clone() } else { c.clone() };
                            out.add_to_component(i_mask, new_mask, v.scale_rat(&coeff));
                        }
                    }
                }
            }
        }
        out
    }

    /// Direct Koszul evaluation of the differential on degree + 1 arguments:
    /// the alternating sum of actions plus the alternating sum over bracket
    /// insertions. Serves as the semantic oracle for `differential`.
    pub fn differential_via_koszul(&self, args: &[TlaElement]) -> Result<Value> {
        if args.len() != self.degree + 1 {
            return Err(Error::ArityMismatch {
                degree: self.degree + 1,
                args: args.len(),
            });
        }
        self.check_args(args)?;
        let mut acc = self.value_space.zero_value(self.m(), self.d);
        for i in 0..args.len() {
            let rest: Vec<TlaElement> = args
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != i)
                .map(|(_, a)| a.clone())
                .collect();
            let inner = self.evaluate(&rest)?;
            let term = self.phi_action(&args[i], &inner);
            acc = if i % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        for i in 0..args.len() {
            for j in (i + 1)..args.len() {
                let br = tla_bracket(&self.algebra, &args[i], &args[j])?;
                let mut rest = vec![br];
                rest.extend(
                    args.iter()
                        .enumerate()
                        .filter(|(t, _)| *t != i && *t != j)
                        .map(|(_, a)| a.clone()),
                );
                let term = self.evaluate(&rest)?;
                acc = if (i + j) % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
        }
        Ok(acc)
    }

    /// Interior product: (i_x w)(...) = w(x, ...). Degree 0 forms contract
    /// to zero by convention.
    pub fn interior(&self, x: &TlaElement) -> Self {
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree.saturating_sub(1),
        );
        if self.degree == 0 {
            return out;
        }
        for (&(i_mask, j_mask), v) in &self.components {
            let legs = self.legs_of(i_mask, j_mask);
            for (t, &leg) in legs.iter().enumerate() {
                let p = leg_pairing(leg, x);
                if p.is_zero() {
                    continue;
                }
                let (ni, nj) = match leg {
                    Leg::Dx(i) => (i_mask & !(1u64 << i), j_mask),
                    Leg::Theta(a) => (i_mask, j_mask & !(1u64 << a)),
                };
                let term = v.scale(p);
                out.add_to_component(ni, nj, if t % 2 == 0 { term } else { term.neg() });
            }
        }
        out
    }

    /// Lie derivative by the Cartan magic formula L_x = d i_x + i_x d.
    pub fn lie_derivative(&self, x: &TlaElement) -> Self {
        let b = self.differential_raw().interior(x);
        if self.degree == 0 {
            return b;
        }
        let a = self.interior(x).differential_raw();
        a.add(&b)
    }

    /// Wedge product. Scalars compose with everything; matrix values
    /// compose with matrix values (same representation).
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.wedge_raw(other)?.check_cap()
    }

    pub(crate) fn wedge_raw(&self, other: &Self) -> Result<Self> {
        let value_space = match (&self.value_space, &other.value_space) {
            (ValueSpace::Scalar, vs) => vs.clone(),
            (vs, ValueSpace::Scalar) => vs.clone(),
            (ValueSpace::Endo(r1), ValueSpace::Endo(r2)) => {
                if r1 != r2 {
                    return Err(Error::ValueSpaceMismatch(
                        "matrix factors carry different representations".into(),
                    ));
                }
                ValueSpace::Endo(r1.clone())
            }
            (a, b) => {
                return Err(Error::ValueSpaceMismatch(format!(
                    "cannot multiply {} values by {} values; kernel forms compose \
                     through the graded bracket",
                    a.describe(),
                    b.describe()
                )));
            }
        };
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            value_space,
            self.degree + other.degree,
        );
        for (&(i1, j1), v1) in &self.components {
            for (&(i2, j2), v2) in &other.components {
                if i1 & i2 != 0 || j1 & j2 != 0 {
                    continue;
                }
                let cm1 = i1 | (j1 << self.d);
                let cm2 = i2 | (j2 << self.d);
                let sign = if merge_inversions(cm1, cm2) % 2 == 0 {
                    1i64
                } else {
                    -1
                };
                let prod = value_mul(v1, v2);
                if prod.is_zero() {
                    continue;
                }
                out.add_to_component(
                    i1 | i2,
                    j1 | j2,
                    if sign > 0 { prod } else { prod.neg() },
                );
            }
        }
        Ok(out)
    }

    /// Graded Lie bracket of kernel-valued forms: values compose through
    /// the pointwise bracket, legs through the same shuffle as the wedge.
    pub fn graded_bracket(&self, other: &Self) -> Result<Self> {
        self.graded_bracket_raw(other)?.check_cap()
    }

    pub(crate) fn graded_bracket_raw(&self, other: &Self) -> Result<Self> {
        if !matches!(self.value_space, ValueSpace::Kernel)
            || !matches!(other.value_space, ValueSpace::Kernel)
        {
            return Err(Error::ValueSpaceMismatch(
                "graded bracket needs kernel-valued forms on both sides".into(),
            ));
        }
        let mut out = Self::zero(
            self.d,
            self.algebra.clone(),
            ValueSpace::Kernel,
            self.degree + other.degree,
        );
        for (&(i1, j1), v1) in &self.components {
            for (&(i2, j2), v2) in &other.components {
                if i1 & i2 != 0 || j1 & j2 != 0 {
                    continue;
                }
                let cm1 = i1 | (j1 << self.d);
                let cm2 = i2 | (j2 << self.d);
                let sign = if merge_inversions(cm1, cm2) % 2 == 0 {
                    1i64
                } else {
                    -1
                };
                let br = bracket_gamma(
                    &self.algebra,
                    v1.as_kernel().expect("kernel value"),
                    v2.as_kernel().expect("kernel value"),
                )?;
                if br.is_zero() {
                    continue;
                }
                let term = Value::Kernel(br);
                out.add_to_component(
                    i1 | i2,
                    j1 | j2,
                    if sign > 0 { term } else { term.neg() },
                );
            }
        }
        Ok(out)
    }

    /// Extend the base coordinate count; leg indices are unchanged.
    pub fn extend_base(&self, new_d: usize) -> Self {
        assert!(new_d >= self.d);
        let mut out = Self::zero(
            new_d,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree,
        );
        for (&(i, j), v) in &self.components {
            out.add_to_component(i, j, v.pad_vars(new_d));
        }
        out
    }

    /// Drop components with coordinate legs >= keep and set those
    /// variables to zero in the remaining coefficients.
    pub fn restrict_base(&self, keep: usize) -> Self {
        assert!(keep <= self.d);
        let mut out = Self::zero(
            keep,
            self.algebra.clone(),
            self.value_space.clone(),
            self.degree,
        );
        let keep_mask = (1u64 << keep) - 1;
        for (&(i, j), v) in &self.components {
            if i & !keep_mask != 0 {
                continue;
            }
            out.add_to_component(i, j, v.restrict_vars(keep));
        }
        out
    }

    /// Serializable component records: leg index lists (1-based) and the
    /// rendered value.
    pub fn to_records(&self) -> Vec<FormRecord> {
        self.components
            .iter()
            .map(|(&(i, j), v)| FormRecord {
                i: bits(i).into_iter().map(|k| k + 1).collect(),
                j: bits(j).into_iter().map(|k| k + 1).collect(),
                value: v.to_string(),
            })
            .collect()
    }
}

fn value_mul(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Scalar(p), other) => other.scale(p),
        (other, Value::Scalar(p)) => other.scale(p),
        (Value::Endo(m1), Value::Endo(m2)) => Value::Endo(m1.mul(m2)),
        _ => panic!("value multiplication outside scalar/endo composition"),
    }
}

fn pairing_det(legs: &[Leg], args: &[TlaElement], col_mask: u64, d: usize) -> PolyScalar {
    if legs.is_empty() {
        return PolyScalar::one(d);
    }
    let mut acc = PolyScalar::zero(d);
    let mut seen = 0u32;
    for (t, arg) in args.iter().enumerate() {
        if col_mask & (1 << t) == 0 {
            continue;
        }
        let this_col = seen;
        seen += 1;
        let p = leg_pairing(legs[0], arg);
        if p.is_zero() {
            continue;
        }
        let sub = pairing_det(&legs[1..], args, col_mask & !(1 << t), d);
        if sub.is_zero() {
            continue;
        }
        let term = p.mul(&sub);
        acc = if this_col % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// Serializable form component.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FormRecord {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub value: String,
}

impl fmt::Display for MixedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i_mask, j_mask), v) in &self.components {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut legs = Vec::new();
            for i in bits(i_mask) {
                legs.push(format!("dx{}", i + 1));
            }
            for a in bits(j_mask) {
                legs.push(format!("th{}", a + 1));
            }
            if legs.is_empty() {
                write!(f, "[{v}]")?;
            } else {
                write!(f, "{} [{v}]", legs.join("^"))?;
            }
        }
        Ok(())
    }
}

/// A finite family of algebroid elements acting by interior products; used
/// for horizontality, invariance, and basic-form tests.
#[derive(Clone, Debug)]
pub struct CartanOperation {
    pub generators: Vec<TlaElement>,
}

impl CartanOperation {
    /// The kernel operation: generators 0 + e_a over the algebra basis.
    pub fn kernel_operation(algebra: &crate::lie::LieAlgebra, d: usize) -> Self {
        let m = algebra.dim;
        CartanOperation {
            generators: (0..m)
                .map(|a| TlaElement::iota(GammaField::basis(m, a, d), d))
                .collect(),
        }
    }
}

/// Exact componentwise check: interior product by every generator vanishes.
/// Scalar multiples follow from i_{f x} = f i_x.
pub fn is_horizontal(w: &MixedForm, op: &CartanOperation) -> bool {
    op.generators.iter().all(|x| w.interior(x).is_zero())
}

/// Exact componentwise check: Lie derivative by every generator vanishes.
pub fn is_invariant(w: &MixedForm, op: &CartanOperation) -> bool {
    op.generators.iter().all(|x| w.lie_derivative(x).is_zero())
}

/// Horizontal and invariant.
pub fn is_basic(w: &MixedForm, op: &CartanOperation) -> bool {
    is_horizontal(w, op) && is_invariant(w, op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{make_abelian, make_heisenberg, make_sl, LieAlgebra};
    use crate::poly::{parse_poly, rat};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn sl2() -> AlgebraRef {
        Arc::new(make_sl(2).unwrap())
    }

    fn p2(s: &str) -> PolyScalar {
        parse_poly(s, 2).unwrap()
    }

    fn dx(alg: &AlgebraRef, i: usize, f: &str) -> MixedForm {
        MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 1).with_term(
            &[i],
            &[],
            Value::Scalar(p2(f)),
        )
    }

    fn coord(i: usize) -> TlaElement {
        TlaElement::from_field(PolyVectorField::coordinate(2, i), 3)
    }

    fn kernel_basis(a: usize) -> TlaElement {
        TlaElement::iota(GammaField::basis(3, a, 2), 2)
    }

    #[test]
    fn tla_bracket_oracles() {
        let alg = sl2();
        // [(d1, 0), (0, E)] = (0, 0): constant gamma
        let a = coord(0);
        let b = kernel_basis(0);
        let ab = tla_bracket(&alg, &a, &b).unwrap();
        assert!(ab.x.is_zero() && ab.gamma.is_zero());
        // [(d1, 0), (0, x1 E)] = (0, E)
        let x1e = TlaElement::iota(
            GammaField::from_components(vec![p2("x1"), p2("0"), p2("0")]),
            2,
        );
        let ab = tla_bracket(&alg, &a, &x1e).unwrap();
        assert_eq!(ab.gamma, GammaField::basis(3, 0, 2));
        // [(0, E), (0, F)] = (0, H)
        let ef = tla_bracket(&alg, &kernel_basis(0), &kernel_basis(1)).unwrap();
        assert_eq!(ef.gamma, GammaField::basis(3, 2, 2));
    }

    #[test]
    fn evaluate_oracles() {
        let alg = sl2();
        // dx1 on (x2 d1, gamma) -> x2
        let w = dx(&alg, 0, "1");
        let arg = TlaElement::new(
            PolyVectorField::from_components(vec![p2("x2"), p2("0")]),
            GammaField::basis(3, 2, 2),
        );
        assert_eq!(w.evaluate(&[arg]).unwrap(), Value::Scalar(p2("x2")));
        // theta^3 on (0, H) -> 1 (basis order E, F, H)
        let th3 = MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 1).with_term(
            &[],
            &[2],
            Value::Scalar(p2("1")),
        );
        assert_eq!(
            th3.evaluate(&[kernel_basis(2)]).unwrap(),
            Value::Scalar(p2("1"))
        );
        // theta^1 wedge theta^2 on (e1, e2) -> 1
        let th12 = MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 2).with_term(
            &[],
            &[0, 1],
            Value::Scalar(p2("1")),
        );
        assert_eq!(
            th12.evaluate(&[kernel_basis(0), kernel_basis(1)]).unwrap(),
            Value::Scalar(p2("1"))
        );
        // repeated argument -> 0
        assert!(th12
            .evaluate(&[kernel_basis(0), kernel_basis(0)])
            .unwrap()
            .is_zero());
        // arity mismatch is an error
        assert!(th12.evaluate(&[kernel_basis(0)]).is_err());
    }

    #[test]
    fn wedge_oracles() {
        let alg = sl2();
        let a = dx(&alg, 0, "1");
        let b = dx(&alg, 1, "1");
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, ba.neg());
        assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn differential_oracles() {
        let alg = sl2();
        // d(x1) = dx1
        let f = MixedForm::from_value(2, alg.clone(), ValueSpace::Scalar, Value::Scalar(p2("x1")));
        let df = f.differential().unwrap();
        assert_eq!(df, dx(&alg, 0, "1"));
        // d(constant E) on (0, gamma) = [gamma, E]
        let e0 = MixedForm::from_value(
            2,
            alg.clone(),
            ValueSpace::Kernel,
            Value::Kernel(GammaField::basis(3, 0, 2)),
        );
        let de = e0.differential().unwrap();
        let gamma = GammaField::from_components(vec![p2("x2"), p2("1"), p2("x1")]);
        let got = de
            .evaluate(&[TlaElement::iota(gamma.clone(), 2)])
            .unwrap();
        let expect = bracket_gamma(&alg, &gamma, &GammaField::basis(3, 0, 2)).unwrap();
        assert_eq!(got, Value::Kernel(expect));
        // d(x2 dx1) on ((d1,0),(d2,0)) = -1
        let w = dx(&alg, 0, "x2");
        let val = w
            .differential()
            .unwrap()
            .evaluate(&[coord(0), coord(1)])
            .unwrap();
        assert_eq!(val, Value::Scalar(p2("-1")));
        // direct Koszul evaluation agrees
        let val2 = w.differential_via_koszul(&[coord(0), coord(1)]).unwrap();
        assert_eq!(val2, Value::Scalar(p2("-1")));
    }

    #[test]
    fn structural_differential_oracle() {
        // over the Heisenberg algebra, d theta^3 = -theta^1 theta^2
        let alg = Arc::new(make_heisenberg());
        let th3 = MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 1).with_term(
            &[],
            &[2],
            Value::Scalar(p2("1")),
        );
        let d = th3.differential().unwrap();
        let expect = MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 2).with_term(
            &[],
            &[0, 1],
            Value::Scalar(p2("-1")),
        );
        assert_eq!(d, expect);
    }

    #[test]
    fn graded_bracket_oracles() {
        let alg = sl2();
        // [dx1 E, dx2 F] evaluated on ((d1,0),(d2,0)) = [E,F] = H
        let w1 = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 1).with_term(
            &[0],
            &[],
            Value::Kernel(GammaField::basis(3, 0, 2)),
        );
        let w2 = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 1).with_term(
            &[1],
            &[],
            Value::Kernel(GammaField::basis(3, 1, 2)),
        );
        let br = w1.graded_bracket(&w2).unwrap();
        let got = br.evaluate(&[coord(0), coord(1)]).unwrap();
        assert_eq!(got, Value::Kernel(GammaField::basis(3, 2, 2)));
        // graded antisymmetry for two odd forms: [w1,w2] = [w2,w1] would have
        // sign -(-1)^{1*1} = +1
        let br2 = w2.graded_bracket(&w1).unwrap();
        assert_eq!(br, br2);
        // bracket with zero
        let z = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 1);
        assert!(w1.graded_bracket(&z).unwrap().is_zero());
    }

    #[test]
    fn interior_oracles() {
        let alg = sl2();
        let dx12 = dx(&alg, 0, "1").wedge(&dx(&alg, 1, "1")).unwrap();
        let i1 = dx12.interior(&coord(0));
        assert_eq!(i1, dx(&alg, 1, "1"));
        // i_x i_x = 0
        assert!(i1.interior(&coord(0)).is_zero());
        // i_{f x} = f i_x
        let f = p2("x1 x2");
        let fx = coord(0).scale(&f);
        assert_eq!(dx12.interior(&fx), dx12.interior(&coord(0)).scale(&f));
    }

    #[test]
    fn lie_derivative_oracles() {
        let alg = sl2();
        // on a 0-form, L_{(X,0)} f = X.f
        let f = MixedForm::from_value(
            2,
            alg.clone(),
            ValueSpace::Scalar,
            Value::Scalar(p2("x1^2 x2")),
        );
        let lx = f.lie_derivative(&coord(0));
        assert_eq!(
            lx,
            MixedForm::from_value(2, alg.clone(), ValueSpace::Scalar, Value::Scalar(p2("2 x1 x2")))
        );
        // L_{(0,xi)} on a constant kernel value v = [xi, v]
        let v = MixedForm::from_value(
            2,
            alg.clone(),
            ValueSpace::Kernel,
            Value::Kernel(GammaField::basis(3, 0, 2)),
        );
        let lxi = v.lie_derivative(&kernel_basis(2));
        let expect = bracket_gamma(
            &alg,
            &GammaField::basis(3, 2, 2),
            &GammaField::basis(3, 0, 2),
        )
        .unwrap();
        assert_eq!(
            lxi,
            MixedForm::from_value(2, alg.clone(), ValueSpace::Kernel, Value::Kernel(expect))
        );
    }

    #[test]
    fn horizontality_oracles() {
        let alg = sl2();
        let op = CartanOperation::kernel_operation(&alg, 2);
        let dx12 = dx(&alg, 0, "x2").wedge(&dx(&alg, 1, "1")).unwrap();
        assert!(is_horizontal(&dx12, &op));
        let th1 = MixedForm::zero(2, alg.clone(), ValueSpace::Scalar, 1).with_term(
            &[],
            &[0],
            Value::Scalar(p2("1")),
        );
        assert!(!is_horizontal(&th1, &op));
    }

    #[test]
    fn theta_is_invariant_for_kernel_operation() {
        let alg = sl2();
        let theta = MixedForm::tautological_theta(2, alg.clone());
        let op = CartanOperation::kernel_operation(&alg, 2);
        assert!(is_invariant(&theta, &op));
        assert!(!is_horizontal(&theta, &op));
    }

    fn arb_algebra() -> impl Strategy<Value = AlgebraRef> {
        prop_oneof![
            Just(Arc::new(make_sl(2).unwrap())),
            Just(Arc::new(make_heisenberg())),
            Just(Arc::new(make_abelian(3))),
        ]
    }

    fn arb_poly() -> impl Strategy<Value = PolyScalar> {
        proptest::collection::vec((0u16..2, 0u16..2, -2i64..3), 0..3).prop_map(|terms| {
            let mut acc = PolyScalar::zero(2);
            for (e1, e2, c) in terms {
                acc = acc.add(&PolyScalar::monomial(2, vec![e1, e2], rat(c)));
            }
            acc
        })
    }

    fn arb_tla(m: usize) -> impl Strategy<Value = TlaElement> {
        (
            proptest::collection::vec(arb_poly(), 2),
            proptest::collection::vec(arb_poly(), m),
        )
            .prop_map(|(xs, gs)| {
                TlaElement::new(
                    PolyVectorField::from_components(xs),
                    GammaField::from_components(gs),
                )
            })
    }

    fn arb_form(alg: AlgebraRef, vs: ValueSpace, p: usize, q: usize) -> BoxedStrategy<MixedForm> {
        let d = 2usize;
        let m = alg.dim;
        let i_masks: Vec<u64> = (0u64..(1 << d)).filter(|x| x.count_ones() as usize == p).collect();
        let j_masks: Vec<u64> = (0u64..(1 << m)).filter(|x| x.count_ones() as usize == q).collect();
        let pairs: Vec<(u64, u64)> = i_masks
            .iter()
            .flat_map(|&i| j_masks.iter().map(move |&j| (i, j)))
            .collect();
        let n = pairs.len();
        let vs2 = vs.clone();
        proptest::collection::vec(arb_value(alg.clone(), vs.clone()), n)
            .prop_map(move |vals| {
                let mut f = MixedForm::zero(2, alg.clone(), vs2.clone(), p + q);
                for (idx, v) in vals.into_iter().enumerate() {
                    let (i, j) = pairs[idx];
                    f.add_to_component(i, j, v);
                }
                f
            })
            .boxed()
    }

    fn arb_value(alg: AlgebraRef, vs: ValueSpace) -> BoxedStrategy<Value> {
        match vs {
            ValueSpace::Scalar => arb_poly().prop_map(Value::Scalar).boxed(),
            ValueSpace::Kernel => {
                let m = alg.dim;
                proptest::collection::vec(arb_poly(), m)
                    .prop_map(|cs| Value::Kernel(GammaField::from_components(cs)))
                    .boxed()
            }
            ValueSpace::Endo(rep) => {
                let n = rep.n;
                proptest::collection::vec(arb_poly(), n * n)
                    .prop_map(move |cs| Value::Endo(PolyMatrix::from_entries(n, cs)))
                    .boxed()
            }
        }
    }

    fn endo_space(alg: &LieAlgebra) -> ValueSpace {
        ValueSpace::Endo(Representation::adjoint(alg))
    }

    fn arb_d2_case() -> impl Strategy<Value = Vec<MixedForm>> {
        let bidegrees = prop_oneof![
            Just((0usize, 0usize)),
            Just((1, 0)),
            Just((0, 1)),
            Just((1, 1)),
        ];
        (arb_algebra(), bidegrees).prop_flat_map(|(alg, (p, q))| {
            let scalar = arb_form(alg.clone(), ValueSpace::Scalar, p, q);
            let kernel = arb_form(alg.clone(), ValueSpace::Kernel, p, q);
            let endo = arb_form(alg.clone(), endo_space(&alg), p, q);
            (scalar, kernel, endo).prop_map(|(a, b, c)| vec![a, b, c])
        })
    }

    fn arb_koszul_case() -> impl Strategy<Value = (MixedForm, Vec<TlaElement>)> {
        let spaces = prop_oneof![Just(ValueSpace::Scalar), Just(ValueSpace::Kernel)];
        (arb_algebra(), spaces).prop_flat_map(|(alg, vs)| {
            let args = proptest::collection::vec(arb_tla(alg.dim), 3);
            (arb_form(alg, vs, 1, 1), args)
        })
    }

    type CartanCase = (AlgebraRef, MixedForm, TlaElement, TlaElement, PolyScalar);

    fn arb_cartan_case() -> impl Strategy<Value = CartanCase> {
        arb_algebra().prop_flat_map(|alg| {
            (
                Just(alg.clone()),
                arb_form(alg.clone(), ValueSpace::Kernel, 1, 1),
                arb_tla(alg.dim),
                arb_tla(alg.dim),
                arb_poly(),
            )
        })
    }

    fn arb_assoc_case() -> impl Strategy<Value = (MixedForm, MixedForm, MixedForm)> {
        arb_algebra().prop_flat_map(|alg| {
            (
                arb_form(alg.clone(), ValueSpace::Scalar, 1, 0),
                arb_form(alg.clone(), ValueSpace::Scalar, 0, 1),
                arb_form(alg.clone(), endo_space(&alg), 1, 0),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn d_squared_is_zero(ws in arb_d2_case()) {
            for w in ws {
                let dd = w.differential_raw().differential_raw();
                prop_assert!(dd.is_zero(), "d^2 != 0 on {}", w);
            }
        }

        #[test]
        fn koszul_agreement((w, args) in arb_koszul_case()) {
            let lhs = w.differential_raw().evaluate(&args).unwrap();
            let rhs = w.differential_via_koszul(&args).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_associative((a, b, c) in arb_assoc_case()) {
            let lhs = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let rhs = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn cartan_relations((alg, w, x, y, f) in arb_cartan_case()) {
            // i_{f x} = f i_x
            prop_assert_eq!(w.interior(&x.scale(&f)), w.interior(&x).scale(&f));
            // i_x i_y + i_y i_x = 0
            let s = w.interior(&x).interior(&y).add(&w.interior(&y).interior(&x));
            prop_assert!(s.is_zero());
            // [L_x, i_y] = i_{[x,y]}
            let br = tla_bracket(&alg, &x, &y).unwrap();
            let lhs = w.interior(&y).lie_derivative(&x)
                .sub(&w.lie_derivative(&x).interior(&y));
            prop_assert_eq!(lhs, w.interior(&br));
            // [L_x, L_y] = L_{[x,y]}
            let lhs = w.lie_derivative(&y).lie_derivative(&x)
                .sub(&w.lie_derivative(&x).lie_derivative(&y));
            prop_assert_eq!(lhs, w.lie_derivative(&br));
        }
    }
}
