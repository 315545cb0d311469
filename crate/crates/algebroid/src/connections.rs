//! Connections on the trivial algebroid: ordinary connection 1-forms with
//! the normalization alpha(0 + l) = -l, generalized connection 1-forms
//! (arbitrary kernel-valued 1-forms), and representation-valued connection
//! 1-forms acting on a matrix module. Curvatures, the Bianchi identity,
//! covariant differentials, and both infinitesimal and finite gauge
//! actions.

use crate::error::{Error, Result};
use crate::forms::{MixedForm, Value, ValueSpace};
use crate::lie::{AlgebraRef, GammaField, Representation};
use crate::matrix::{GroupElementField, PolyMatrix};
use crate::poly::ratq;

/// Shared view of the two kernel-valued connection kinds, so curvature and
/// gauge formulas are written once.
pub trait KernelConnection: Sized {
    fn form(&self) -> &MixedForm;
    /// Wrap a transformed 1-form back into the same kind.
    fn rebuild(&self, form: MixedForm) -> Self;
}

/// Ordinary connection 1-form: kernel-valued, degree 1, with the pure
/// theta part pinned to -theta (so alpha(0 + l) = -l for every l).
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    pub alpha: MixedForm,
}

impl ConnectionForm {
    pub fn new(alpha: MixedForm) -> Result<Self> {
        check_kernel_one_form(&alpha)?;
        if !normalization_holds(&alpha) {
            return Err(Error::InvalidInput(
                "connection 1-form is not normalized: alpha(0 + l) != -l".into(),
            ));
        }
        Ok(ConnectionForm { alpha })
    }
}

impl KernelConnection for ConnectionForm {
    fn form(&self) -> &MixedForm {
        &self.alpha
    }

    fn rebuild(&self, form: MixedForm) -> Self {
        debug_assert!(normalization_holds(&form));
        ConnectionForm { alpha: form }
    }
}

/// Generalized connection 1-form: any kernel-valued 1-form.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedConnectionForm {
    pub omega: MixedForm,
}

impl GeneralizedConnectionForm {
    pub fn new(omega: MixedForm) -> Result<Self> {
        check_kernel_one_form(&omega)?;
        Ok(GeneralizedConnectionForm { omega })
    }
}

impl KernelConnection for GeneralizedConnectionForm {
    fn form(&self) -> &MixedForm {
        &self.omega
    }

    fn rebuild(&self, form: MixedForm) -> Self {
        GeneralizedConnectionForm { omega: form }
    }
}

/// Representation-valued connection 1-form on the module of matrix maps.
#[derive(Clone, Debug, PartialEq)]
pub struct RepConnectionForm {
    pub omega_e: MixedForm,
}

impl RepConnectionForm {
    pub fn new(omega_e: MixedForm) -> Result<Self> {
        if omega_e.degree() != 1 {
            return Err(Error::InvalidInput(format!(
                "connection 1-form must have degree 1, got {}",
                omega_e.degree()
            )));
        }
        match omega_e.value_space() {
            ValueSpace::Endo(_) => Ok(RepConnectionForm { omega_e }),
            vs => Err(Error::ValueSpaceMismatch(format!(
                "representation connection needs endo values, got {vs:?}"
            ))),
        }
    }

    pub fn zero(d: usize, algebra: AlgebraRef, rep: Representation) -> Self {
        RepConnectionForm {
            omega_e: MixedForm::zero(d, algebra, ValueSpace::Endo(rep), 1),
        }
    }

    pub fn rep(&self) -> &Representation {
        match self.omega_e.value_space() {
            ValueSpace::Endo(rep) => rep,
            _ => unreachable!("rep connection carries endo values"),
        }
    }
}

/// Local gauge potential: the dx coefficients of a kernel-valued (1,0)
/// form, one g-valued map per base coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential {
    pub algebra: AlgebraRef,
    pub a: Vec<GammaField>,
}

impl GaugePotential {
    pub fn new(algebra: AlgebraRef, a: Vec<GammaField>) -> Result<Self> {
        let d = a.len();
        for coeff in &a {
            if coeff.dim() != algebra.dim {
                return Err(Error::DimensionMismatch(format!(
                    "potential coefficient has dimension {}, algebra has {}",
                    coeff.dim(),
                    algebra.dim
                )));
            }
            if coeff.n_vars() != d {
                return Err(Error::DimensionMismatch(format!(
                    "potential coefficient over {} variables, base has {}",
                    coeff.n_vars(),
                    d
                )));
            }
        }
        Ok(GaugePotential { algebra, a })
    }

    pub fn zero(d: usize, algebra: AlgebraRef) -> Self {
        let m = algebra.dim;
        GaugePotential {
            algebra,
            a: (0..d).map(|_| GammaField::zero(m, d)).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    /// The potential as a kernel-valued form of bidegree (1,0).
    pub fn to_form(&self) -> MixedForm {
        let d = self.d();
        let mut f = MixedForm::zero(d, self.algebra.clone(), ValueSpace::Kernel, 1);
        for (k, coeff) in self.a.iter().enumerate() {
            f = f.with_term(&[k], &[], Value::Kernel(coeff.clone()));
        }
        f
    }
}

fn check_kernel_one_form(form: &MixedForm) -> Result<()> {
    if form.degree() != 1 {
        return Err(Error::InvalidInput(format!(
            "connection 1-form must have degree 1, got {}",
            form.degree()
        )));
    }
    if !matches!(form.value_space(), ValueSpace::Kernel) {
        return Err(Error::ValueSpaceMismatch(
            "connection 1-form must be kernel-valued".into(),
        ));
    }
    Ok(())
}

/// Exact componentwise normalization test: the theta part of the form is
/// -theta, equivalently alpha(0 + l) = -l for every l including scalar
/// multiples.
pub fn normalization_holds(alpha: &MixedForm) -> bool {
    let m = alpha.m();
    let d = alpha.d();
    for a in 0..m {
        let expect = GammaField::basis(m, a, d).neg();
        match alpha.component(&[], &[a]) {
            Some(Value::Kernel(g)) if *g == expect => {}
            _ => return false,
        }
    }
    true
}

/// alpha = A - theta. Always satisfies the normalization.
pub fn connection_from_potential(potential: &GaugePotential) -> ConnectionForm {
    let d = potential.d();
    let theta = MixedForm::tautological_theta(d, potential.algebra.clone());
    ConnectionForm {
        alpha: potential.to_form().sub(&theta),
    }
}

/// Curvature 2-form d omega + (1/2)[omega, omega].
pub fn curvature<C: KernelConnection>(c: &C) -> Result<MixedForm> {
    let omega = c.form();
    let half_bracket = omega.graded_bracket(omega)?.scale_rat(&ratq(1, 2));
    Ok(omega.differential()?.add(&half_bracket))
}

/// Bianchi defect d R + [omega, R]; identically zero for every connection.
pub fn bianchi_defect<C: KernelConnection>(c: &C) -> Result<MixedForm> {
    let omega = c.form();
    let r = curvature(c)?;
    Ok(r.differential()?.add(&omega.graded_bracket(&r)?))
}

/// Covariant differential D eta = d eta + [omega, eta] on kernel-valued
/// forms. Satisfies D D eta = [R, eta].
pub fn covariant_differential(c: &ConnectionForm, eta: &MixedForm) -> Result<MixedForm> {
    if !matches!(eta.value_space(), ValueSpace::Kernel) {
        return Err(Error::ValueSpaceMismatch(
            "covariant differential acts on kernel-valued forms".into(),
        ));
    }
    Ok(eta.differential()?.add(&c.alpha.graded_bracket(eta)?))
}

/// First-order gauge transform omega + (d xi + [omega, xi]) by a kernel
/// element xi. For normalized connections the added term is horizontal, so
/// the result is again normalized; the exact relation to the Lie
/// derivative is L_{0 + xi} omega = -(d xi + [omega, xi]).
pub fn infinitesimal_gauge<C: KernelConnection>(c: &C, xi: &GammaField) -> C {
    let omega = c.form();
    let xi_form = MixedForm::from_value(
        omega.d(),
        omega.algebra().clone(),
        ValueSpace::Kernel,
        Value::Kernel(xi.clone()),
    );
    let shift = xi_form
        .differential_raw()
        .add(&omega.graded_bracket_raw(&xi_form).expect("kernel values"));
    c.rebuild(omega.add(&shift))
}

/// Push a kernel-valued form through a representation, componentwise.
pub(crate) fn kernel_to_endo(form: &MixedForm, rep: &Representation) -> MixedForm {
    let d = form.d();
    let mut out = MixedForm::zero(
        d,
        form.algebra().clone(),
        ValueSpace::Endo(rep.clone()),
        form.degree(),
    );
    for (&(i, j), v) in form.components() {
        let g = v.as_kernel().expect("kernel-valued form");
        let mut mat = PolyMatrix::zero(rep.n, d);
        for (a, coeff) in g.components.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            mat = mat.add(&rep.mats[a].to_poly(d).scale(coeff));
        }
        out.add_to_component(i, j, Value::Endo(mat));
    }
    out
}

/// Induce a representation-valued connection from a generalized one:
/// componentwise application of the morphism. Its curvature is the image
/// of the kernel curvature under the same map.
pub fn induce_rep_connection(
    w: &GeneralizedConnectionForm,
    phi_l: &Representation,
) -> Result<RepConnectionForm> {
    phi_l.validate(w.omega.algebra())?;
    Ok(RepConnectionForm {
        omega_e: kernel_to_endo(&w.omega, phi_l),
    })
}

/// Image of a kernel-valued curvature form under the representation; the
/// second leg of the commuting square for `induce_rep_connection`.
pub fn push_curvature(r: &MixedForm, phi_l: &Representation) -> Result<MixedForm> {
    phi_l.validate(r.algebra())?;
    Ok(kernel_to_endo(r, phi_l))
}

/// Curvature R = d omega + omega wedge omega of a representation-valued
/// connection; evaluation on (X, Y) gives (d omega)(X,Y) +
/// [omega(X), omega(Y)].
pub fn rep_curvature(w: &RepConnectionForm) -> Result<MixedForm> {
    let omega = &w.omega_e;
    Ok(omega.differential()?.add(&omega.wedge(omega)?))
}

/// Bianchi defect d R + omega R - R omega for a representation-valued
/// connection; identically zero.
pub fn rep_bianchi_defect(w: &RepConnectionForm) -> Result<MixedForm> {
    let omega = &w.omega_e;
    let r = rep_curvature(w)?;
    Ok(r.differential()?
        .add(&omega.wedge(&r)?)
        .sub(&r.wedge(omega)?))
}

/// Differential of a group element as an endo-valued 1-form: the de Rham
/// part plus theta legs carrying the representation commutator.
fn group_differential(
    g: &GroupElementField,
    rep: &Representation,
    algebra: &AlgebraRef,
) -> MixedForm {
    let d = g.n_vars();
    let g0 = MixedForm::from_value(
        d,
        algebra.clone(),
        ValueSpace::Endo(rep.clone()),
        Value::Endo(g.matrix.clone()),
    );
    g0.differential_raw()
}

/// Multiply every component value on both sides: left * v * right.
fn conjugate_endo_form(form: &MixedForm, left: &PolyMatrix, right: &PolyMatrix) -> MixedForm {
    let mut out = MixedForm::zero(
        form.d(),
        form.algebra().clone(),
        form.value_space().clone(),
        form.degree(),
    );
    for (&(i, j), v) in form.components() {
        let mat = v.as_endo().expect("endo-valued form");
        out.add_to_component(i, j, Value::Endo(left.mul(mat).mul(right)));
    }
    out
}

/// Finite gauge action omega^g = g^-1 omega g + g^-1 dg. Curvature is
/// conjugated: rep_curvature(omega^g) = g^-1 R g.
pub fn finite_gauge(w: &RepConnectionForm, g: &GroupElementField) -> RepConnectionForm {
    let rep = w.rep().clone();
    assert_eq!(g.n(), rep.n, "gauge element size must match the module");
    assert_eq!(g.n_vars(), w.omega_e.d(), "gauge element over the wrong base");
    let algebra = w.omega_e.algebra().clone();
    let conjugated = conjugate_endo_form(&w.omega_e, &g.inverse_matrix, &g.matrix);
    let dg = group_differential(g, &rep, &algebra);
    let inhomogeneous = conjugate_endo_form(&dg, &g.inverse_matrix, &PolyMatrix::identity(rep.n, g.n_vars()));
    RepConnectionForm {
        omega_e: conjugated.add(&inhomogeneous),
    }
}

/// Conjugate an endo-valued form by a group element: g^-1 R g. Used to
/// state the finite-gauge curvature law.
pub fn conjugate_by(form: &MixedForm, g: &GroupElementField) -> MixedForm {
    conjugate_endo_form(form, &g.inverse_matrix, &g.matrix)
}

/// Forgetful inclusion of ordinary connections into generalized ones; the
/// curvature is computed by the same formula on both sides.
pub fn embed_ordinary_as_a_connection(c: &ConnectionForm) -> GeneralizedConnectionForm {
    GeneralizedConnectionForm {
        omega: c.alpha.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{is_horizontal, CartanOperation, TlaElement};
    use crate::lie::{make_abelian, make_sl};
    use crate::poly::{parse_poly, PolyScalar, PolyVectorField};
    use std::sync::Arc;

    fn p2(s: &str) -> PolyScalar {
        parse_poly(s, 2).unwrap()
    }

    fn sl2() -> AlgebraRef {
        Arc::new(make_sl(2).unwrap())
    }

    fn sl2_potential() -> GaugePotential {
        // A = x1 dx2 (x) E over sl(2)
        let alg = sl2();
        GaugePotential::new(
            alg.clone(),
            vec![
                GammaField::zero(3, 2),
                GammaField::from_components(vec![p2("x1"), p2("0"), p2("0")]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn potential_zero_gives_minus_theta() {
        let alg = sl2();
        let c = connection_from_potential(&GaugePotential::zero(2, alg.clone()));
        assert!(normalization_holds(&c.alpha));
        let gamma = GammaField::from_components(vec![p2("x2"), p2("3"), p2("x1 x2")]);
        let got = c
            .alpha
            .evaluate(&[TlaElement::iota(gamma.clone(), 2)])
            .unwrap();
        assert_eq!(got, Value::Kernel(gamma.neg()));
    }

    #[test]
    fn potential_pairs_against_fields() {
        // abelian, A = x2 dx1 (x) e1: alpha((d1, 0)) = x2 e1
        let alg = Arc::new(make_abelian(1));
        let pot = GaugePotential::new(
            alg.clone(),
            vec![
                GammaField::from_components(vec![p2("x2")]),
                GammaField::zero(1, 2),
            ],
        )
        .unwrap();
        let c = connection_from_potential(&pot);
        let arg = TlaElement::from_field(PolyVectorField::coordinate(2, 0), 1);
        let got = c.alpha.evaluate(&[arg]).unwrap();
        assert_eq!(
            got,
            Value::Kernel(GammaField::from_components(vec![p2("x2")]))
        );
        // alpha((X, gamma)) = A(X) - gamma on a mixed argument
        let x = PolyVectorField::from_components(vec![p2("x1"), p2("x2")]);
        let gamma = GammaField::from_components(vec![p2("x1 x2")]);
        let got = c
            .alpha
            .evaluate(&[TlaElement::new(x, gamma.clone())])
            .unwrap();
        let expect = GammaField::from_components(vec![p2("x1 x2")]) // A(X) = x2 * x1
            .sub(&gamma);
        assert_eq!(got, Value::Kernel(expect));
    }

    #[test]
    fn flat_connection_has_zero_curvature() {
        let alg = sl2();
        let c = connection_from_potential(&GaugePotential::zero(2, alg));
        assert!(curvature(&c).unwrap().is_zero());
        assert!(bianchi_defect(&c).unwrap().is_zero());
    }

    #[test]
    fn curvature_oracles() {
        // abelian, A = x2 dx1 (x) e1: R = -dx1 dx2 (x) e1
        let alg = Arc::new(make_abelian(1));
        let pot = GaugePotential::new(
            alg.clone(),
            vec![
                GammaField::from_components(vec![p2("x2")]),
                GammaField::zero(1, 2),
            ],
        )
        .unwrap();
        let r = curvature(&connection_from_potential(&pot)).unwrap();
        let expect = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 2).with_term(
            &[0, 1],
            &[],
            Value::Kernel(GammaField::from_components(vec![p2("-1")])),
        );
        assert_eq!(r, expect);
        // sl2, A = x1 dx2 (x) E: R = dx1 dx2 (x) E
        let alg = sl2();
        let r = curvature(&connection_from_potential(&sl2_potential())).unwrap();
        let expect = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 2).with_term(
            &[0, 1],
            &[],
            Value::Kernel(GammaField::basis(3, 0, 2)),
        );
        assert_eq!(r, expect);
    }

    #[test]
    fn curvature_is_horizontal_and_bianchi_holds() {
        let alg = sl2();
        let c = connection_from_potential(&sl2_potential());
        let r = curvature(&c).unwrap();
        let op = CartanOperation::kernel_operation(&alg, 2);
        assert!(is_horizontal(&r, &op));
        assert!(bianchi_defect(&c).unwrap().is_zero());
        // D(R) = 0 restates Bianchi
        assert!(covariant_differential(&c, &r).unwrap().is_zero());
    }

    #[test]
    fn covariant_square_is_curvature_bracket() {
        let alg = sl2();
        let c = connection_from_potential(&sl2_potential());
        let r = curvature(&c).unwrap();
        let eta = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 1)
            .with_term(
                &[0],
                &[],
                Value::Kernel(GammaField::from_components(vec![
                    p2("x2"),
                    p2("1"),
                    p2("x1"),
                ])),
            )
            .with_term(
                &[],
                &[1],
                Value::Kernel(GammaField::from_components(vec![
                    p2("0"),
                    p2("x1"),
                    p2("2"),
                ])),
            );
        let dd = covariant_differential(&c, &covariant_differential(&c, &eta).unwrap()).unwrap();
        assert_eq!(dd, r.graded_bracket(&eta).unwrap());
    }

    #[test]
    fn infinitesimal_gauge_matches_lie_derivative() {
        let c = connection_from_potential(&sl2_potential());
        let xi = GammaField::from_components(vec![p2("x2"), p2("x1"), p2("1")]);
        // unchanged for xi = 0
        let same = infinitesimal_gauge(&c, &GammaField::zero(3, 2));
        assert_eq!(same.alpha, c.alpha);
        // normalization survives the transform
        let moved = infinitesimal_gauge(&c, &xi);
        assert!(normalization_holds(&moved.alpha));
        // L_{0 + xi} alpha = -(d xi + [alpha, xi])
        let shift = moved.alpha.sub(&c.alpha);
        let lie = c.alpha.lie_derivative(&TlaElement::iota(xi, 2));
        assert_eq!(lie, shift.neg());
    }

    #[test]
    fn rep_connection_commuting_square() {
        let alg = sl2();
        let rep = Representation::adjoint(&alg);
        let w = embed_ordinary_as_a_connection(&connection_from_potential(&sl2_potential()));
        let we = induce_rep_connection(&w, &rep).unwrap();
        let via_rep = rep_curvature(&we).unwrap();
        let via_kernel = push_curvature(&curvature(&w).unwrap(), &rep).unwrap();
        assert_eq!(via_rep, via_kernel);
        assert!(rep_bianchi_defect(&we).unwrap().is_zero());
    }

    #[test]
    fn finite_gauge_oracles() {
        let alg = sl2();
        // zero representation so the fiber action vanishes
        let rep = Representation::zero(&alg, 2);
        let w = RepConnectionForm::zero(2, alg.clone(), rep.clone());
        let g = GroupElementField::shear(2, 0, 1, p2("x1")).unwrap();
        let moved = finite_gauge(&w, &g);
        // omega^g = g^-1 dg: the single dx1 component is E12
        let expect = MixedForm::zero(2, alg.clone(), ValueSpace::Endo(rep.clone()), 1).with_term(
            &[0],
            &[],
            Value::Endo(crate::matrix::RatMatrix::elementary(2, 0, 1).to_poly(2)),
        );
        assert_eq!(moved.omega_e, expect);
        // identity gauge leaves a connection alone
        let id = GroupElementField::identity(2, 2);
        let w2 = RepConnectionForm::new(expect.clone()).unwrap();
        assert_eq!(finite_gauge(&w2, &id).omega_e, w2.omega_e);
    }

    #[test]
    fn finite_gauge_composes_and_conjugates_curvature() {
        let alg = sl2();
        let rep = Representation::adjoint(&alg);
        let base = embed_ordinary_as_a_connection(&connection_from_potential(&sl2_potential()));
        let w = induce_rep_connection(&base, &rep).unwrap();
        let g = GroupElementField::shear(3, 0, 1, p2("x2")).unwrap();
        let h = GroupElementField::shear(3, 1, 2, p2("x1")).unwrap();
        let gh = g.mul(&h);
        let lhs = finite_gauge(&finite_gauge(&w, &g), &h);
        let rhs = finite_gauge(&w, &gh);
        assert_eq!(lhs.omega_e, rhs.omega_e);
        // curvature conjugates
        let r = rep_curvature(&w).unwrap();
        let rg = rep_curvature(&finite_gauge(&w, &g)).unwrap();
        assert_eq!(rg, conjugate_by(&r, &g));
    }

    #[test]
    fn embedding_commutes_with_gauge_and_curvature() {
        let c = connection_from_potential(&sl2_potential());
        let w = embed_ordinary_as_a_connection(&c);
        assert_eq!(w.omega, c.alpha);
        assert_eq!(curvature(&c).unwrap(), curvature(&w).unwrap());
        let xi = GammaField::from_components(vec![p2("x1"), p2("0"), p2("x2")]);
        let lhs = embed_ordinary_as_a_connection(&infinitesimal_gauge(&c, &xi));
        let rhs = infinitesimal_gauge(&w, &xi);
        assert_eq!(lhs.omega, rhs.omega);
    }

    #[test]
    fn rejects_malformed_connections() {
        let alg = sl2();
        // not normalized: missing theta part
        let bare = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 1);
        assert!(ConnectionForm::new(bare.clone()).is_err());
        assert!(GeneralizedConnectionForm::new(bare).is_ok());
        // wrong degree
        let two = MixedForm::zero(2, alg.clone(), ValueSpace::Kernel, 2);
        assert!(GeneralizedConnectionForm::new(two).is_err());
        // wrong value space
        let scalar = MixedForm::zero(2, alg, ValueSpace::Scalar, 1);
        assert!(GeneralizedConnectionForm::new(scalar).is_err());
    }
}
