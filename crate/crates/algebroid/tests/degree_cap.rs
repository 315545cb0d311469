//! The degree cap is a process-wide guard on the polynomial degree of
//! freshly assembled forms: products and differentials respect it, while
//! evaluations and contractions never do. One sequential test keeps the
//! global setting race-free.

use std::sync::Arc;

use algebroid::forms::{MixedForm, TlaElement, Value, ValueSpace};
use algebroid::lie::{make_heisenberg, GammaField};
use algebroid::poly::{parse_poly, PolyVectorField};
use algebroid::{set_degree_cap, Error, DEFAULT_DEGREE_CAP};

fn scalar_one_form(poly: &str, leg: usize) -> MixedForm {
    let alg = Arc::new(make_heisenberg());
    MixedForm::zero(2, alg, ValueSpace::Scalar, 1).with_term(
        &[leg],
        &[],
        Value::Scalar(parse_poly(poly, 2).unwrap()),
    )
}

fn kernel_zero_form(poly: &str, basis: usize) -> MixedForm {
    let alg = Arc::new(make_heisenberg());
    let value = GammaField::basis(3, basis, 2).scale(&parse_poly(poly, 2).unwrap());
    MixedForm::from_value(2, alg, ValueSpace::Kernel, Value::Kernel(value))
}

#[test]
fn cap_gates_capped_operations_only() {
    let w1 = scalar_one_form("x1^2", 0);
    let w2 = scalar_one_form("x2^2", 1);
    let deep = MixedForm::from_value(
        2,
        Arc::new(make_heisenberg()),
        ValueSpace::Scalar,
        Value::Scalar(parse_poly("x1^5", 2).unwrap()),
    );

    // wedge: degree 4 result fails under cap 3, passes at 4 and unlimited
    set_degree_cap(3);
    match w1.wedge(&w2) {
        Err(Error::DegreeCap { degree, cap }) => {
            assert_eq!((degree, cap), (4, 3));
        }
        other => panic!("expected a degree cap error, got {other:?}"),
    }
    set_degree_cap(4);
    assert!(w1.wedge(&w2).is_ok());
    set_degree_cap(0);
    assert!(w1.wedge(&w2).is_ok());

    // differential: the derivative of x1^5 has degree 4
    set_degree_cap(3);
    assert!(matches!(deep.differential(), Err(Error::DegreeCap { .. })));
    set_degree_cap(0);
    assert!(deep.differential().is_ok());

    // graded bracket: [x1^2 e1, x2^2 e2] = x1^2 x2^2 e3 has degree 4
    let a = kernel_zero_form("x1^2", 0);
    let b = kernel_zero_form("x2^2", 1);
    set_degree_cap(3);
    assert!(matches!(a.graded_bracket(&b), Err(Error::DegreeCap { .. })));
    set_degree_cap(4);
    assert!(a.graded_bracket(&b).is_ok());

    // evaluation and contraction side never consult the cap
    set_degree_cap(1);
    let u = TlaElement::new(
        PolyVectorField::coordinate(2, 0).scale(&parse_poly("x2^3", 2).unwrap()),
        GammaField::zero(3, 2),
    );
    let one = scalar_one_form("x1^4", 0);
    assert!(!one.evaluate(&[u.clone()]).unwrap().is_zero());
    assert!(one.interior(&u).evaluate(&[]).is_ok());
    assert!(!one.lie_derivative(&u).is_zero());
    assert!(one.differential_via_koszul(&[u.clone(), u]).is_ok());

    set_degree_cap(DEFAULT_DEGREE_CAP);
}
