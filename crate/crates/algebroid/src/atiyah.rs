//! Equivariant model over a trivial principal bundle P = M x G with a
//! unipotent structure group.
//!
//! Coordinates on P are the base coordinates x_1..x_d followed by global
//! group coordinates y_1..y_K attached to the strictly upper matrix
//! positions, so everything stays polynomial: the group law, the inverse,
//! the adjoint action, and the fundamental vector fields of the right
//! action. Forms on P live over the algebroid TM ⊕ (P x g) with the same
//! structure algebra g, and the diagonal generators ξ^P_a ⊕ e_a span an
//! operation whose basic forms correspond exactly to forms over the base
//! algebroid. [`lambda_restrict`] and [`reconstruct`] realize the two
//! directions of that correspondence.

use std::sync::Arc;

use crate::connections::{ConnectionForm, GaugePotential};
use crate::error::{Error, Result};
use crate::forms::{is_basic, CartanOperation, MixedForm, TlaElement, Value, ValueSpace};
use crate::lie::{AlgebraRef, GammaField, LieAlgebra};
use crate::matrix::{PolyMatrix, RatMatrix};
use crate::poly::{PolyScalar, PolyVectorField};

/// Invert I + N for nilpotent N by the terminating geometric series.
pub fn unipotent_inverse(g: &PolyMatrix) -> Result<PolyMatrix> {
    let n = g.n;
    let n_vars = g.n_vars();
    let nil = g.sub(&PolyMatrix::identity(n, n_vars));
    let mut inv = PolyMatrix::identity(n, n_vars);
    let mut power = PolyMatrix::identity(n, n_vars);
    for step in 0..n {
        power = power.mul(&nil);
        if power.is_zero() {
            return Ok(inv);
        }
        if step == n - 1 {
            break;
        }
        inv = if step % 2 == 0 {
            inv.sub(&power)
        } else {
            inv.add(&power)
        };
    }
    Err(Error::InvalidInput(
        "matrix is not unipotent: I - g is not nilpotent".into(),
    ))
}

/// The full upper-triangular unipotent group in n x n matrices, with global
/// coordinates y_k attached to the strictly upper positions.
///
/// Positions are ordered by distance to the diagonal (j - i), then by row,
/// so the n = 3 instance lines up with the Heisenberg basis E12, E23, E13.
#[derive(Clone, Debug)]
pub struct UnipotentGroup {
    pub n: usize,
    pub positions: Vec<(usize, usize)>,
    algebra: AlgebraRef,
}

impl UnipotentGroup {
    pub fn full_upper(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "unipotent group needs matrix size >= 2".into(),
            ));
        }
        let mut positions = Vec::new();
        for diff in 1..n {
            for i in 0..n - diff {
                positions.push((i, i + diff));
            }
        }
        let basis = positions
            .iter()
            .map(|&(i, j)| RatMatrix::elementary(n, i, j))
            .collect();
        let algebra = Arc::new(LieAlgebra::from_matrix_basis(basis)?);
        Ok(UnipotentGroup {
            n,
            positions,
            algebra,
        })
    }

    /// Group dimension: the number of strictly upper positions.
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    /// The nilpotent Lie algebra spanned by the elementary matrices at the
    /// strictly upper positions.
    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    /// The coordinate group element I + Σ_k y_k E_{pos_k}, with y_k the
    /// variables offset..offset+dim inside a total of `n_vars` variables.
    pub fn coordinate_matrix(&self, n_vars: usize, offset: usize) -> PolyMatrix {
        let mut g = PolyMatrix::identity(self.n, n_vars);
        for (k, &(i, j)) in self.positions.iter().enumerate() {
            g.set(i, j, PolyScalar::var(n_vars, offset + k));
        }
        g
    }

    /// Coefficients of a strictly upper matrix in the position basis.
    pub fn coefficients(&self, mat: &PolyMatrix) -> GammaField {
        debug_assert!(self.spans(mat), "matrix has entries off the strictly upper positions");
        GammaField::from_components(
            self.positions
                .iter()
                .map(|&(i, j)| mat.get(i, j).clone())
                .collect(),
        )
    }

    fn spans(&self, mat: &PolyMatrix) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if j <= i && !mat.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// The group law: coordinates of g(y)·g(y') as polynomials in the 2K
    /// variables (y_1..y_K, y'_1..y'_K).
    pub fn group_law(&self) -> Vec<PolyScalar> {
        let k = self.dim();
        let left = self.coordinate_matrix(2 * k, 0);
        let right = self.coordinate_matrix(2 * k, k);
        let product = left.mul(&right);
        self.positions
            .iter()
            .map(|&(i, j)| product.get(i, j).clone())
            .collect()
    }

    /// Coordinates of g(y)⁻¹ as polynomials in y.
    pub fn inverse_law(&self) -> Vec<PolyScalar> {
        let k = self.dim();
        let g = self.coordinate_matrix(k, 0);
        let inv = unipotent_inverse(&g).expect("coordinate matrix is unipotent");
        self.positions
            .iter()
            .map(|&(i, j)| inv.get(i, j).clone())
            .collect()
    }

    /// The adjoint action of g(y) as a dim x dim matrix over the y
    /// variables: column a holds the coefficients of g E_a g⁻¹.
    pub fn adjoint_matrix(&self) -> PolyMatrix {
        let k = self.dim();
        let g = self.coordinate_matrix(k, 0);
        let inv = unipotent_inverse(&g).expect("coordinate matrix is unipotent");
        let mut ad = PolyMatrix::zero(k, k);
        for (a, &(i, j)) in self.positions.iter().enumerate() {
            let mut e = PolyMatrix::zero(self.n, k);
            e.set(i, j, PolyScalar::one(k));
            let image = g.mul(&e).mul(&inv);
            for (b, &(bi, bj)) in self.positions.iter().enumerate() {
                ad.set(b, a, image.get(bi, bj).clone());
            }
        }
        ad
    }
}

/// The product bundle P = M x G: base coordinates x_1..x_d followed by the
/// group coordinates y_1..y_K.
#[derive(Clone, Debug)]
pub struct BundleModel {
    pub base_dim: usize,
    pub group: UnipotentGroup,
}

impl BundleModel {
    pub fn new(base_dim: usize, group: UnipotentGroup) -> Self {
        BundleModel { base_dim, group }
    }

    /// Total coordinate count d + K.
    pub fn total_dim(&self) -> usize {
        self.base_dim + self.group.dim()
    }

    /// The tautological group element field over the P coordinates.
    pub fn g_matrix(&self) -> PolyMatrix {
        self.group
            .coordinate_matrix(self.total_dim(), self.base_dim)
    }

    /// Its pointwise inverse.
    pub fn g_inverse(&self) -> PolyMatrix {
        unipotent_inverse(&self.g_matrix()).expect("coordinate matrix is unipotent")
    }

    /// Fundamental vector field of the right action: ξ^P_a has y-components
    /// [g(y) E_a] read off at the coordinate positions, and no x-components.
    pub fn fundamental_field(&self, a: usize) -> PolyVectorField {
        let total = self.total_dim();
        let g = self.g_matrix();
        let (i, j) = self.group.positions[a];
        let mut e = PolyMatrix::zero(self.group.n, total);
        e.set(i, j, PolyScalar::one(total));
        let ge = g.mul(&e);
        let mut components = vec![PolyScalar::zero(total); total];
        for (k, &(ki, kj)) in self.group.positions.iter().enumerate() {
            components[self.base_dim + k] = ge.get(ki, kj).clone();
        }
        PolyVectorField::from_components(components)
    }

    /// Diagonal generator ξ^P_a ⊕ e_a of the equivariance operation.
    pub fn equ_generator(&self, a: usize) -> TlaElement {
        TlaElement::new(
            self.fundamental_field(a),
            GammaField::basis(self.group.dim(), a, self.total_dim()),
        )
    }

    /// The equivariance operation spanned by all diagonal generators.
    pub fn equ_operation(&self) -> CartanOperation {
        CartanOperation {
            generators: (0..self.group.dim()).map(|a| self.equ_generator(a)).collect(),
        }
    }

    /// The dy part of the Maurer-Cartan form: Σ_k dy^k ⊗ g⁻¹ (∂_{y_k} g).
    pub fn theta_dy(&self) -> MixedForm {
        let total = self.total_dim();
        let inv = self.g_inverse();
        let mut out = MixedForm::zero(
            total,
            self.group.algebra.clone(),
            ValueSpace::Kernel,
            1,
        );
        for (k, &(i, j)) in self.group.positions.iter().enumerate() {
            let mut e = PolyMatrix::zero(self.group.n, total);
            e.set(i, j, PolyScalar::one(total));
            let gamma = self.group.coefficients(&inv.mul(&e));
            out.add_to_component(1 << (self.base_dim + k), 0, Value::Kernel(gamma));
        }
        out
    }

    /// The full invariant Maurer-Cartan form on P: the dy part plus the
    /// tautological theta part.
    pub fn maurer_cartan(&self) -> MixedForm {
        self.theta_dy().add(&MixedForm::tautological_theta(
            self.total_dim(),
            self.group.algebra.clone(),
        ))
    }

    /// Conjugate every kernel value of a form by the coordinate group
    /// element: v ↦ g⁻¹ v g.
    fn ad_inverse(&self, w: &MixedForm) -> MixedForm {
        let g = self.g_matrix();
        let inv = self.g_inverse();
        let mut out = MixedForm::zero(
            w.d(),
            w.algebra().clone(),
            w.value_space().clone(),
            w.degree(),
        );
        for (&(i, j), v) in w.components() {
            let gamma = match v {
                Value::Kernel(gamma) => gamma,
                _ => panic!("adjoint conjugation expects kernel values"),
            };
            let mat = self.matrix_of(gamma);
            let conj = self.group.coefficients(&inv.mul(&mat).mul(&g));
            out.add_to_component(i, j, Value::Kernel(conj));
        }
        out
    }

    /// Σ_a γ_a E_{pos_a} over the P coordinates.
    fn matrix_of(&self, gamma: &GammaField) -> PolyMatrix {
        let total = self.total_dim();
        let mut mat = PolyMatrix::zero(self.group.n, total);
        for (a, &(i, j)) in self.group.positions.iter().enumerate() {
            mat.set(i, j, gamma.components[a].clone());
        }
        mat
    }
}

/// Lift a gauge potential on the base to the invariant connection form on
/// P: Ad_{g⁻¹}(A) + θ_dy − θ_taut. The result is normalized (its theta
/// part is −θ_taut), horizontal, and invariant for the equivariance
/// operation.
pub fn connection_hat(bundle: &BundleModel, potential: &GaugePotential) -> Result<ConnectionForm> {
    if potential.algebra != bundle.group.algebra {
        return Err(Error::InvalidInput(
            "potential is valued in a different algebra than the structure group".into(),
        ));
    }
    if potential.d() != bundle.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "potential over {} base coordinates, bundle has {}",
            potential.d(),
            bundle.base_dim
        )));
    }
    let total = bundle.total_dim();
    let lifted = bundle.ad_inverse(&potential.to_form().extend_base(total));
    let theta = MixedForm::tautological_theta(total, bundle.group.algebra.clone());
    ConnectionForm::new(lifted.add(&bundle.theta_dy()).sub(&theta))
}

/// Restrict a basic form on P to the base: drop every component with a dy
/// leg and substitute y = 0.
pub fn lambda_restrict(bundle: &BundleModel, w: &MixedForm) -> Result<MixedForm> {
    if !is_basic(w, &bundle.equ_operation()) {
        return Err(Error::InvalidInput(
            "form is not basic for the equivariance operation".into(),
        ));
    }
    Ok(w.restrict_base(bundle.base_dim))
}

/// The inverse of [`lambda_restrict`]: extend a form over the base to the
/// basic form on P with the same restriction.
///
/// Componentwise, the value at a set of P legs is Ad_{g⁻¹} of the extended
/// base form evaluated on substituted arguments: coordinate fields ∂_i stay
/// themselves, vertical coordinate fields ∂_{y_k} become the kernel element
/// −(∂_{y_k}g) g⁻¹ (fundamental fields are killed against the matching
/// kernel generator), and kernel legs e_a become g E_a g⁻¹. Supports scalar
/// and kernel values.
pub fn reconstruct(bundle: &BundleModel, w: &MixedForm) -> Result<MixedForm> {
    if w.d() != bundle.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "form over {} base coordinates, bundle has {}",
            w.d(),
            bundle.base_dim
        )));
    }
    let kernel_valued = match w.value_space() {
        ValueSpace::Kernel => true,
        ValueSpace::Scalar => false,
        ValueSpace::Endo(_) => {
            return Err(Error::ValueSpaceMismatch(
                "reconstruction supports scalar and kernel values only".into(),
            ))
        }
    };
    let total = bundle.total_dim();
    let m = w.m();
    let g = bundle.g_matrix();
    let inv = bundle.g_inverse();
    let lifted = w.extend_base(total);

    // Substituted arguments for each leg kind.
    let mut x_args = Vec::new();
    for i in 0..total {
        if i < bundle.base_dim {
            x_args.push(TlaElement::from_field(
                PolyVectorField::coordinate(total, i),
                m,
            ));
        } else {
            let (pi, pj) = bundle.group.positions[i - bundle.base_dim];
            let mut e = PolyMatrix::zero(bundle.group.n, total);
            e.set(pi, pj, PolyScalar::one(total));
            let gamma = bundle.group.coefficients(&e.mul(&inv));
            x_args.push(TlaElement::iota(gamma.neg(), total));
        }
    }
    let mut theta_args = Vec::new();
    for a in 0..m {
        let (pi, pj) = bundle.group.positions[a];
        let mut e = PolyMatrix::zero(bundle.group.n, total);
        e.set(pi, pj, PolyScalar::one(total));
        let gamma = bundle.group.coefficients(&g.mul(&e).mul(&inv));
        theta_args.push(TlaElement::iota(gamma, total));
    }

    let mut out = MixedForm::zero(
        total,
        w.algebra().clone(),
        w.value_space().clone(),
        w.degree(),
    );
    for i_mask in 0u64..(1 << total) {
        let i_count = i_mask.count_ones() as usize;
        if i_count > w.degree() {
            continue;
        }
        for j_mask in 0u64..(1 << m) {
            if i_count + j_mask.count_ones() as usize != w.degree() {
                continue;
            }
            let mut args = Vec::new();
            for i in 0..total {
                if i_mask & (1 << i) != 0 {
                    args.push(x_args[i].clone());
                }
            }
            for a in 0..m {
                if j_mask & (1 << a) != 0 {
                    args.push(theta_args[a].clone());
                }
            }
            let value = lifted.evaluate(&args)?;
            let value = if kernel_valued {
                let gamma = value.as_kernel().expect("kernel-valued evaluation");
                let conj = bundle
                    .group
                    .coefficients(&inv.mul(&bundle.matrix_of(gamma)).mul(&g));
                Value::Kernel(conj)
            } else {
                value
            };
            out.add_to_component(i_mask, j_mask, value);
        }
    }
    out.check_cap()
}

/// Split a degree-1 form on P into its coordinate part (dx and dy legs) and
/// its kernel part (theta legs); on a basic form both parts are invariant.
pub fn generalized_split(w: &MixedForm) -> Result<(MixedForm, MixedForm)> {
    if w.degree() != 1 {
        return Err(Error::InvalidInput(format!(
            "split expects a degree-1 form, got degree {}",
            w.degree()
        )));
    }
    Ok((w.bidegree_part(1, 0), w.bidegree_part(0, 1)))
}
