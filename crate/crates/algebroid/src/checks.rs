//! Named check registry: every identity of the library as a seeded check
//! over a scenario instance. Each check draws its own random data from a
//! per-check stream, verifies exactly (zero tolerance), and reports the
//! first defect as a rendered witness.
//!
//! Checks come in two flavours: one-shot structural facts that ignore the
//! sample count, and sampled properties that repeat `samples` times with
//! fresh random forms, fields, and gauge elements. Errors returned by a
//! check signal a configuration problem (an unmet requirement or a degree
//! cap overflow), never a failed identity.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::atiyah::{
    connection_hat, generalized_split, lambda_restrict, reconstruct, BundleModel,
};
use crate::atlas::{
    alpha_is_automorphism, chi_via_differential, chi_via_field, expand_in_basis, glue,
    validate_cocycle, CocycleReport, TransitionData,
};
use crate::connections::{
    bianchi_defect, conjugate_by, connection_from_potential, covariant_differential, curvature,
    finite_gauge, induce_rep_connection, infinitesimal_gauge, normalization_holds,
    push_curvature, rep_bianchi_defect, rep_curvature, ConnectionForm, GaugePotential,
    GeneralizedConnectionForm, RepConnectionForm,
};
use crate::error::{Error, Result};
use crate::forms::{
    is_basic, is_horizontal, is_invariant, tla_bracket, MixedForm, TlaElement, Value, ValueSpace,
};
use crate::lie::{bracket_gamma, AlgebraRef, GammaField, Representation};
use crate::matrix::{traceless_projection, GroupElementField, PolyMatrix, RatMatrix};
use crate::ncg::{
    canonical_itheta, convert_connection, degree_zero_defect, embed_kernel_as_traceless,
    endo_infinitesimal_gauge, extract_traceless, higher_degree_witness,
    inner_derivations_faithful, is_traceless, maurer_cartan_defect, nc_connection_apply,
    nc_curvature, nc_differential, nc_gauge, nc_operator_curvature, ConnectionSpace, EndoNCForm,
    NCConnection, NCDerivation,
};
use crate::poly::{PolyScalar, PolyVectorField};
use crate::poly::ratq;
use crate::sample;
use crate::scenario::Instance;

/// Result of one executed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub witness: Option<String>,
}

/// Scenario features a check depends on beyond the base and algebra.
#[derive(Clone, Copy, Debug, Default)]
pub struct Needs {
    pub sl: bool,
    pub group: bool,
    pub atlas: bool,
}

const NONE: Needs = Needs {
    sl: false,
    group: false,
    atlas: false,
};
const SL: Needs = Needs { sl: true, ..NONE };
const GROUP: Needs = Needs { group: true, ..NONE };
const ATLAS: Needs = Needs { atlas: true, ..NONE };

type CheckFn = fn(&Instance, &mut ChaCha8Rng, usize) -> Result<CheckOutcome>;

/// A registered check: its name, the statement it verifies, the scenario
/// features it needs, and its body.
pub struct CheckDef {
    pub name: &'static str,
    pub statement: &'static str,
    pub needs: Needs,
    run: CheckFn,
}

impl CheckDef {
    pub fn execute(
        &self,
        inst: &Instance,
        rng: &mut ChaCha8Rng,
        samples: usize,
    ) -> Result<CheckOutcome> {
        (self.run)(inst, rng, samples)
    }

    /// Configuration message when the instance lacks a required feature.
    pub fn unmet_requirement(&self, inst: &Instance) -> Option<String> {
        if self.needs.sl && inst.matrix_n.is_none() {
            return Some(format!("check {} needs an sl(n) lie_algebra", self.name));
        }
        if self.needs.group && inst.group.is_none() {
            return Some(format!("check {} needs a [group] section", self.name));
        }
        if self.needs.atlas && inst.atlas.is_none() {
            return Some(format!("check {} needs an [atlas] section", self.name));
        }
        None
    }
}

/// All checks, in report order.
pub fn registry() -> &'static [CheckDef] {
    REGISTRY
}

pub fn find(name: &str) -> Option<&'static CheckDef> {
    REGISTRY.iter().find(|c| c.name == name)
}

/// Independent stream per (scenario seed, check name), so reports do not
/// depend on registry order or on which other checks run.
pub fn seed_for(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

static REGISTRY: &[CheckDef] = &[
    CheckDef {
        name: "d_squared",
        statement: "d\u{0302} \u{2218} d\u{0302} = 0",
        needs: NONE,
        run: check_d_squared,
    },
    CheckDef {
        name: "koszul_agreement",
        statement: "the differential agrees with the alternating Koszul sum on arguments",
        needs: NONE,
        run: check_koszul_agreement,
    },
    CheckDef {
        name: "wedge_associative",
        statement: "the wedge product is associative, and graded commutative on scalar forms",
        needs: NONE,
        run: check_wedge_associative,
    },
    CheckDef {
        name: "cartan_relations",
        statement: "[L_X, i_Y] = i_{[X,Y]}, L = i\u{2218}d\u{0302} + d\u{0302}\u{2218}i, [L_X, L_Y] = L_{[X,Y]}, i_X i_Y = \u{2212}i_Y i_X",
        needs: NONE,
        run: check_cartan_relations,
    },
    CheckDef {
        name: "maurer_cartan_theta",
        statement: "d\u{0302}\u{03b8} = \u{00bd}[\u{03b8}, \u{03b8}]",
        needs: NONE,
        run: check_maurer_cartan_theta,
    },
    CheckDef {
        name: "theta_invariant",
        statement: "\u{03b8} is invariant for the kernel operation, with i_{\u{03b9}(\u{2113})}\u{03b8} = \u{2113}",
        needs: NONE,
        run: check_theta_invariant,
    },
    CheckDef {
        name: "normalization",
        statement: "\u{03b1}(\u{03b9}(\u{2113})) = \u{2212}\u{2113}",
        needs: NONE,
        run: check_normalization,
    },
    CheckDef {
        name: "curvature_koszul",
        statement: "R\u{0302}(X, Y) = (d\u{0302}\u{03b1})(X, Y) + [\u{03b1}(X), \u{03b1}(Y)]",
        needs: NONE,
        run: check_curvature_koszul,
    },
    CheckDef {
        name: "curvature_horizontal",
        statement: "the curvature 2-form is horizontal",
        needs: NONE,
        run: check_curvature_horizontal,
    },
    CheckDef {
        name: "bianchi",
        statement: "It satisfies the Bianchi identity",
        needs: NONE,
        run: check_bianchi,
    },
    CheckDef {
        name: "covariant_square",
        statement: "D\u{2218}D \u{03b7} = [R\u{0302}, \u{03b7}]",
        needs: NONE,
        run: check_covariant_square,
    },
    CheckDef {
        name: "flat_splitting",
        statement: "\u{03b1} = \u{2212}\u{03b8} is flat: the trivial algebroid splits canonically",
        needs: NONE,
        run: check_flat_splitting,
    },
    CheckDef {
        name: "gauge_infinitesimal",
        statement: "\u{03b1}^\u{03be} = \u{03b1} + (d\u{0302}\u{03be} + [\u{03b1}, \u{03be}]) = \u{03b1} \u{2212} L_{\u{03b9}(\u{03be})}\u{03b1}",
        needs: NONE,
        run: check_gauge_infinitesimal,
    },
    CheckDef {
        name: "rep_square",
        statement: "d\u{0302}\u{03c9}_E + \u{03c9}_E \u{2227} \u{03c9}_E = \u{03c6}_L(R\u{0302})",
        needs: NONE,
        run: check_rep_square,
    },
    CheckDef {
        name: "finite_gauge",
        statement: "\u{03c9}^g = g\u{207b}\u{00b9}\u{03c9}g + g\u{207b}\u{00b9}d\u{0302}g, with (\u{03c9}^g)^h = \u{03c9}^{gh} and R^g = g\u{207b}\u{00b9}Rg",
        needs: SL,
        run: check_finite_gauge,
    },
    CheckDef {
        name: "maurer_cartan_matrix",
        statement: "d\u{2032}(i\u{03b8}) \u{2212} (i\u{03b8})\u{00b2} = 0",
        needs: SL,
        run: check_maurer_cartan_matrix,
    },
    CheckDef {
        name: "degree_zero_derivation",
        statement: "d\u{2032}a = [i\u{03b8}, a] for every matrix a in degree 0",
        needs: SL,
        run: check_degree_zero_derivation,
    },
    CheckDef {
        name: "higher_degree_witness",
        statement: "the degree-0 relation d\u{2032}\u{03c9} = [i\u{03b8}, \u{03c9}] stops in degree 1",
        needs: SL,
        run: check_higher_degree_witness,
    },
    CheckDef {
        name: "inner_faithful",
        statement: "every derivation of M_n is inner, through a unique traceless matrix",
        needs: SL,
        run: check_inner_faithful,
    },
    CheckDef {
        name: "itheta_reproduces",
        statement: "i\u{03b8}(ad_\u{03b3}) is the traceless part of \u{03b3}",
        needs: SL,
        run: check_itheta_reproduces,
    },
    CheckDef {
        name: "nc_leibniz",
        statement: "\u{2207}_X(ma) = (\u{2207}_X m)a + m X(a)",
        needs: SL,
        run: check_nc_leibniz,
    },
    CheckDef {
        name: "nc_operator_curvature",
        statement: "R(X, Y)m = (d\u{0302}\u{03c9} + \u{03c9} \u{2227} \u{03c9})(X, Y) m",
        needs: SL,
        run: check_nc_operator_curvature,
    },
    CheckDef {
        name: "nc_gauge",
        statement: "\u{03a9}^g = g\u{207b}\u{00b9}\u{03a9}g",
        needs: SL,
        run: check_nc_gauge,
    },
    CheckDef {
        name: "theorem_three_spaces",
        statement: "The following three spaces are isomorphic",
        needs: SL,
        run: check_theorem_three_spaces,
    },
    CheckDef {
        name: "theorem_generalized_roundtrip",
        statement: "generalized connections correspond to traceless matrix-valued 1-forms",
        needs: SL,
        run: check_theorem_generalized_roundtrip,
    },
    CheckDef {
        name: "theorem_commuting_squares",
        statement: "curvature and gauge transformations commute with the identifications",
        needs: SL,
        run: check_theorem_commuting_squares,
    },
    CheckDef {
        name: "group_law",
        statement: "the unipotent coordinate law is an associative group law with exact inverse",
        needs: GROUP,
        run: check_group_law,
    },
    CheckDef {
        name: "fundamental_fields",
        statement: "\u{03be}^P represents the right action: [\u{03be}^P_a, \u{03be}^P_b] = \u{03be}^P_{[e_a, e_b]}",
        needs: GROUP,
        run: check_fundamental_fields,
    },
    CheckDef {
        name: "equ_cartan",
        statement: "the equivariance generators close and satisfy the Cartan relations",
        needs: GROUP,
        run: check_equ_cartan,
    },
    CheckDef {
        name: "mc_invariant",
        statement: "the bundle form \u{03b8}_P is invariant but not horizontal",
        needs: GROUP,
        run: check_mc_invariant,
    },
    CheckDef {
        name: "connection_hat_basic",
        statement: "\u{03c9}\u{0302} = Ad_{g\u{207b}\u{00b9}}A + \u{03b8}_dy \u{2212} \u{03b8} is a basic normalized connection",
        needs: GROUP,
        run: check_connection_hat_basic,
    },
    CheckDef {
        name: "lambda_roundtrip",
        statement: "\u{03bb}(\u{03c9}\u{0302}(A)) = A \u{2212} \u{03b8}, and reconstruction inverts \u{03bb} on basic forms",
        needs: GROUP,
        run: check_lambda_roundtrip,
    },
    CheckDef {
        name: "atiyah_curvature",
        statement: "\u{03bb}(R\u{0302}_P) = d\u{0302}A + \u{00bd}[A, A] in bidegree (2, 0)",
        needs: GROUP,
        run: check_atiyah_curvature,
    },
    CheckDef {
        name: "generalized_split",
        statement: "a kernel-valued 1-form splits into its coordinate and kernel legs",
        needs: NONE,
        run: check_generalized_split,
    },
    CheckDef {
        name: "cocycle_validation",
        statement: "\u{03b1}_ik = \u{03b1}_ij \u{2218} \u{03b1}_jk and \u{03c7}_ik = \u{03b1}_ij(\u{03c7}_jk) + \u{03c7}_ij on every triple",
        needs: ATLAS,
        run: check_cocycle_validation,
    },
    CheckDef {
        name: "alpha_automorphism",
        statement: "every \u{03b1}_ij is a Lie algebra automorphism of g",
        needs: ATLAS,
        run: check_alpha_automorphism,
    },
    CheckDef {
        name: "chi_two_routes",
        statement: "\u{03c7} from g\u{00b7}\u{2202}(g\u{207b}\u{00b9}) agrees with the field-contraction route",
        needs: SL,
        run: check_chi_two_routes,
    },
    CheckDef {
        name: "glue_family",
        statement: "\u{03b3}_i = \u{03b1}_ij(\u{03b3}_j) + \u{03c7}_ij(X) glues local data into a family",
        needs: ATLAS,
        run: check_glue_family,
    },
    CheckDef {
        name: "perturbed_cocycle_fails",
        statement: "a perturbed transition family fails validation at a named triple",
        needs: ATLAS,
        run: check_perturbed_cocycle_fails,
    },
];

fn pass() -> Result<CheckOutcome> {
    Ok(CheckOutcome {
        pass: true,
        witness: None,
    })
}

fn fail(witness: String) -> Result<CheckOutcome> {
    Ok(CheckOutcome {
        pass: false,
        witness: Some(witness),
    })
}

fn sl_n(inst: &Instance) -> Result<usize> {
    inst.matrix_n
        .ok_or_else(|| Error::InvalidInput("this check needs an sl(n) lie_algebra".into()))
}

fn atlas_of(inst: &Instance) -> Result<&TransitionData> {
    inst.atlas
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this check needs an [atlas] section".into()))
}

fn bundle_of(inst: &Instance) -> Result<BundleModel> {
    let group = inst
        .group
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this check needs a [group] section".into()))?;
    Ok(BundleModel::new(inst.d, group.clone()))
}

/// The sl(n) algebra of the instance together with its defining
/// representation, the pair every matrix-calculus check works over.
fn defining_rep(inst: &Instance) -> Result<(AlgebraRef, Representation)> {
    sl_n(inst)?;
    let alg = inst.algebra.clone();
    let rep = Representation::defining(&alg)?;
    Ok((alg, rep))
}

/// Scalar, kernel, and adjoint-endomorphism value spaces of the instance.
fn value_spaces(inst: &Instance) -> Vec<ValueSpace> {
    vec![
        ValueSpace::Scalar,
        ValueSpace::Kernel,
        ValueSpace::Endo(Representation::adjoint(&inst.algebra)),
    ]
}

fn space_label(space: &ValueSpace) -> &'static str {
    match space {
        ValueSpace::Scalar => "scalar",
        ValueSpace::Kernel => "kernel",
        ValueSpace::Endo(_) => "endo",
    }
}

/// The scenario potential if present, topped up with random ones.
fn potentials_for(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Result<Vec<GaugePotential>> {
    let mut out = Vec::with_capacity(count);
    if let Some(p) = &inst.potential {
        out.push(p.clone());
    }
    let m = inst.algebra.dim;
    while out.len() < count {
        let coeffs = (0..inst.d).map(|_| sample::gamma(rng, m, inst.d)).collect();
        out.push(GaugePotential::new(inst.algebra.clone(), coeffs)?);
    }
    out.truncate(count.max(1));
    Ok(out)
}

/// Scenario gauge elements first (paired up), then random affine shears.
fn shear_pairs(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    n: usize,
    count: usize,
) -> Vec<(GroupElementField, GroupElementField)> {
    let usable: Vec<GroupElementField> = inst
        .gauge
        .iter()
        .filter(|g| g.n() == n && g.n_vars() == inst.d)
        .cloned()
        .collect();
    let mut pairs: Vec<(GroupElementField, GroupElementField)> = usable
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    while pairs.len() < count {
        pairs.push((
            sample::linear_shear(rng, n, inst.d),
            sample::linear_shear(rng, n, inst.d),
        ));
    }
    pairs.truncate(count.max(1));
    pairs
}

fn half_bracket(w: &MixedForm) -> Result<MixedForm> {
    Ok(w.graded_bracket(w)?.scale_rat(&ratq(1, 2)))
}

// ---------------------------------------------------------------------------
// differential calculus

fn check_d_squared(inst: &Instance, rng: &mut ChaCha8Rng, samples: usize) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    for space in value_spaces(inst) {
        for p in 0..=d.min(3) {
            for q in 0..=(3 - p).min(m) {
                for s in 0..samples {
                    let w = sample::form(rng, d, inst.algebra.clone(), space.clone(), p, q);
                    let dd = w.differential()?.differential()?;
                    if !dd.is_zero() {
                        return fail(format!(
                            "sample {s}: d(d w) of a ({p},{q})-form with {} values is {dd}",
                            space_label(&space)
                        ));
                    }
                }
            }
        }
    }
    pass()
}

fn check_koszul_agreement(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let spaces = value_spaces(inst);
    for s in 0..samples {
        let p = rng.gen_range(0..=d.min(2));
        let q = rng.gen_range(0..=(2 - p).min(m));
        let space = spaces[s % spaces.len()].clone();
        let w = sample::form(rng, d, inst.algebra.clone(), space.clone(), p, q);
        let args: Vec<TlaElement> = (0..=p + q).map(|_| sample::tla(rng, d, m)).collect();
        let direct = w.differential()?.evaluate(&args)?;
        let koszul = w.differential_via_koszul(&args)?;
        if direct != koszul {
            return fail(format!(
                "sample {s}: componentwise and Koszul differentials of a ({p},{q})-form \
                 with {} values disagree by {}",
                space_label(&space),
                direct.sub(&koszul)
            ));
        }
    }
    pass()
}

fn check_wedge_associative(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let endo = ValueSpace::Endo(Representation::adjoint(&inst.algebra));
    let one = |rng: &mut ChaCha8Rng, space: &ValueSpace| {
        if m >= 1 && rng.gen_range(0..2) == 1 {
            sample::form(rng, d, inst.algebra.clone(), space.clone(), 0, 1)
        } else {
            sample::form(rng, d, inst.algebra.clone(), space.clone(), 1, 0)
        }
    };
    for s in 0..samples {
        let triples = [
            [
                one(rng, &ValueSpace::Scalar),
                one(rng, &ValueSpace::Scalar),
                one(rng, &ValueSpace::Scalar),
            ],
            [one(rng, &endo), one(rng, &endo), one(rng, &endo)],
            [
                one(rng, &ValueSpace::Scalar),
                one(rng, &ValueSpace::Scalar),
                one(rng, &ValueSpace::Kernel),
            ],
        ];
        for [w1, w2, w3] in &triples {
            let left = w1.wedge(w2)?.wedge(w3)?;
            let right = w1.wedge(&w2.wedge(w3)?)?;
            if left != right {
                return fail(format!(
                    "sample {s}: (w1 \u{2227} w2) \u{2227} w3 differs from w1 \u{2227} (w2 \u{2227} w3) by {}",
                    left.sub(&right)
                ));
            }
        }
        // graded commutativity on scalar 1-forms: w1 ^ w2 = -w2 ^ w1
        let w1 = one(rng, &ValueSpace::Scalar);
        let w2 = one(rng, &ValueSpace::Scalar);
        let defect = w1.wedge(&w2)?.add(&w2.wedge(&w1)?);
        if !defect.is_zero() {
            return fail(format!(
                "sample {s}: scalar 1-forms fail graded commutativity by {defect}"
            ));
        }
    }
    pass()
}

fn check_cartan_relations(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let spaces = value_spaces(inst);
    for s in 0..samples {
        let u = sample::tla(rng, d, m);
        let v = sample::tla(rng, d, m);
        let uv = tla_bracket(&inst.algebra, &u, &v)?;
        let p = rng.gen_range(0..=d.min(2));
        let q = rng.gen_range(0..=(2 - p).min(m));
        let space = spaces[s % spaces.len()].clone();
        let w = sample::form(rng, d, inst.algebra.clone(), space, p, q);

        let anti = w.interior(&u).interior(&v).add(&w.interior(&v).interior(&u));
        if !anti.is_zero() {
            return fail(format!("sample {s}: i_X i_Y + i_Y i_X = {anti}"));
        }
        let mixed = w
            .interior(&v)
            .lie_derivative(&u)
            .sub(&w.lie_derivative(&u).interior(&v))
            .sub(&w.interior(&uv));
        if !mixed.is_zero() {
            return fail(format!("sample {s}: [L_X, i_Y] - i_{{[X,Y]}} = {mixed}"));
        }
        let lie2 = w
            .lie_derivative(&u)
            .lie_derivative(&v)
            .sub(&w.lie_derivative(&v).lie_derivative(&u))
            .add(&w.lie_derivative(&uv));
        if !lie2.is_zero() {
            return fail(format!("sample {s}: [L_Y, L_X] - L_{{[Y,X]}} = {lie2}"));
        }
        // Lie derivative as a derivation on evaluations, independently of
        // the Cartan formula used to compute it.
        let args: Vec<TlaElement> = (0..p + q).map(|_| sample::tla(rng, d, m)).collect();
        let lhs = w.lie_derivative(&u).evaluate(&args)?;
        let mut rhs = w.phi_action(&u, &w.evaluate(&args)?);
        for i in 0..args.len() {
            let mut moved = args.clone();
            moved[i] = tla_bracket(&inst.algebra, &u, &args[i])?;
            rhs = rhs.sub(&w.evaluate(&moved)?);
        }
        if lhs != rhs {
            return fail(format!(
                "sample {s}: L_X as a derivation on evaluations differs by {}",
                lhs.sub(&rhs)
            ));
        }
    }
    pass()
}

fn check_maurer_cartan_theta(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let theta = MixedForm::tautological_theta(d, inst.algebra.clone());
    let defect = theta.differential()?.sub(&half_bracket(&theta)?);
    if !defect.is_zero() {
        return fail(format!("d\u{03b8} - \u{00bd}[\u{03b8},\u{03b8}] = {defect}"));
    }
    let dtheta = theta.differential()?;
    for s in 0..samples {
        let u = sample::tla(rng, d, m);
        let v = sample::tla(rng, d, m);
        let direct = dtheta.evaluate(&[u.clone(), v.clone()])?;
        let expect = Value::Kernel(bracket_gamma(&inst.algebra, &u.gamma, &v.gamma)?);
        if direct != expect {
            return fail(format!(
                "sample {s}: (d\u{03b8})(X, Y) - [\u{03b3}_X, \u{03b3}_Y] = {}",
                direct.sub(&expect)
            ));
        }
    }
    pass()
}

fn check_theta_invariant(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let theta = MixedForm::tautological_theta(d, inst.algebra.clone());
    let op = crate::forms::CartanOperation::kernel_operation(&inst.algebra, d);
    if !is_invariant(&theta, &op) {
        return fail("\u{03b8} is not invariant for the kernel operation".into());
    }
    if m >= 1 && is_horizontal(&theta, &op) {
        return fail("\u{03b8} is horizontal, so the interior products vanish".into());
    }
    for s in 0..samples {
        let gamma = sample::gamma(rng, m, d);
        let contracted = theta.interior(&TlaElement::iota(gamma.clone(), d));
        let expect = MixedForm::from_value(
            d,
            inst.algebra.clone(),
            ValueSpace::Kernel,
            Value::Kernel(gamma),
        );
        if contracted != expect {
            return fail(format!(
                "sample {s}: i_{{\u{03b9}(\u{2113})}}\u{03b8} - \u{2113} = {}",
                contracted.sub(&expect)
            ));
        }
    }
    pass()
}

// ---------------------------------------------------------------------------
// connections on the trivial algebroid

fn check_normalization(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let m = inst.algebra.dim;
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let c = connection_from_potential(a);
        if !normalization_holds(&c.alpha) {
            return fail(format!("sample {s}: A - \u{03b8} is not normalized"));
        }
        if ConnectionForm::new(c.alpha.clone()).is_err() {
            return fail(format!(
                "sample {s}: the constructor rejects a normalized 1-form"
            ));
        }
        if m >= 1 {
            // the bare potential misses the theta part, so it must be rejected
            if normalization_holds(&a.to_form()) || ConnectionForm::new(a.to_form()).is_ok() {
                return fail(format!(
                    "sample {s}: a 1-form without the \u{2212}\u{03b8} part passes normalization"
                ));
            }
        }
    }
    pass()
}

fn check_curvature_koszul(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let c = connection_from_potential(a);
        let r = curvature(&c)?;
        let u = sample::tla(rng, d, m);
        let v = sample::tla(rng, d, m);
        let direct = r.evaluate(&[u.clone(), v.clone()])?;
        let au = c.alpha.evaluate(&[u.clone()])?;
        let av = c.alpha.evaluate(&[v.clone()])?;
        let bracket = bracket_gamma(
            &inst.algebra,
            au.as_kernel().expect("kernel-valued connection"),
            av.as_kernel().expect("kernel-valued connection"),
        )?;
        let koszul = c
            .alpha
            .differential_via_koszul(&[u, v])?
            .add(&Value::Kernel(bracket));
        if direct != koszul {
            return fail(format!(
                "sample {s}: R\u{0302}(X, Y) and the Koszul expansion disagree by {}",
                direct.sub(&koszul)
            ));
        }
    }
    pass()
}

fn check_curvature_horizontal(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    let op = crate::forms::CartanOperation::kernel_operation(&inst.algebra, d);
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let r = curvature(&connection_from_potential(a))?;
        if !is_horizontal(&r, &op) {
            return fail(format!("sample {s}: i_{{\u{03b9}(e_a)}}R\u{0302} \u{2260} 0"));
        }
        let gamma = sample::gamma(rng, m, d);
        let contracted = r.interior(&TlaElement::iota(gamma, d));
        if !contracted.is_zero() {
            return fail(format!(
                "sample {s}: contraction with a random kernel element gives {contracted}"
            ));
        }
    }
    pass()
}

fn check_bianchi(inst: &Instance, rng: &mut ChaCha8Rng, samples: usize) -> Result<CheckOutcome> {
    let d = inst.d;
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let defect = bianchi_defect(&connection_from_potential(a))?;
        if !defect.is_zero() {
            return fail(format!(
                "sample {s}: d\u{0302}R\u{0302} + [\u{03b1}, R\u{0302}] = {defect}"
            ));
        }
        // the identity needs no normalization: generalized connections too
        let omega = sample::one_form(rng, d, inst.algebra.clone(), ValueSpace::Kernel, 2);
        let defect = bianchi_defect(&GeneralizedConnectionForm::new(omega)?)?;
        if !defect.is_zero() {
            return fail(format!(
                "sample {s}: a generalized connection violates Bianchi by {defect}"
            ));
        }
    }
    pass()
}

fn check_covariant_square(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let c = connection_from_potential(a);
        let r = curvature(&c)?;
        let (p, q) = match s % 3 {
            0 => (0, 0),
            1 => (1, 0),
            _ if m >= 1 => (0, 1),
            _ => (1, 0),
        };
        let eta = sample::form(rng, d, inst.algebra.clone(), ValueSpace::Kernel, p, q);
        let lhs = covariant_differential(&c, &covariant_differential(&c, &eta)?)?;
        let rhs = r.graded_bracket(&eta)?;
        if lhs != rhs {
            return fail(format!(
                "sample {s}: D\u{00b2}\u{03b7} - [R\u{0302}, \u{03b7}] = {}",
                lhs.sub(&rhs)
            ));
        }
    }
    pass()
}

fn check_flat_splitting(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let theta = MixedForm::tautological_theta(d, inst.algebra.clone());
    let c = ConnectionForm::new(theta.neg())?;
    let r = curvature(&c)?;
    if !r.is_zero() {
        return fail(format!("R\u{0302}(\u{2212}\u{03b8}) = {r}"));
    }
    if connection_from_potential(&GaugePotential::zero(d, inst.algebra.clone())).alpha
        != theta.neg()
    {
        return fail("the zero potential does not give \u{03b1} = \u{2212}\u{03b8}".into());
    }
    pass()
}

fn check_gauge_infinitesimal(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    for (s, a) in potentials_for(inst, rng, samples)?.iter().enumerate() {
        let c = connection_from_potential(a);
        let xi = sample::gamma(rng, m, d);
        let moved = infinitesimal_gauge(&c, &xi);
        if !normalization_holds(&moved.alpha) {
            return fail(format!("sample {s}: \u{03b1}^\u{03be} lost the normalization"));
        }
        let shift = moved.alpha.sub(&c.alpha);
        let lie = c.alpha.lie_derivative(&TlaElement::iota(xi.clone(), d));
        if shift != lie.neg() {
            return fail(format!(
                "sample {s}: \u{03b1}^\u{03be} - \u{03b1} + L_{{\u{03b9}(\u{03be})}}\u{03b1} = {}",
                shift.add(&lie)
            ));
        }
        // the same shift through the covariant differential of the parameter
        let xi_form = MixedForm::from_value(
            d,
            inst.algebra.clone(),
            ValueSpace::Kernel,
            Value::Kernel(xi),
        );
        let dxi = covariant_differential(&c, &xi_form)?;
        if shift != dxi {
            return fail(format!(
                "sample {s}: \u{03b1}^\u{03be} - \u{03b1} - D\u{03be} = {}",
                shift.sub(&dxi)
            ));
        }
    }
    pass()
}

fn check_rep_square(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let mut reps = vec![Representation::adjoint(&inst.algebra)];
    if inst.matrix_n.is_some() {
        reps.push(Representation::defining(&inst.algebra)?);
    }
    for s in 0..samples {
        let omega = sample::one_form(rng, d, inst.algebra.clone(), ValueSpace::Kernel, 2);
        let gc = GeneralizedConnectionForm::new(omega)?;
        let r = curvature(&gc)?;
        for rep in &reps {
            let induced = induce_rep_connection(&gc, rep)?;
            let direct = rep_curvature(&induced)?;
            let pushed = push_curvature(&r, rep)?;
            if direct != pushed {
                return fail(format!(
                    "sample {s}: module curvature and \u{03c6}_L(R\u{0302}) disagree by {}",
                    direct.sub(&pushed)
                ));
            }
            let defect = rep_bianchi_defect(&induced)?;
            if !defect.is_zero() {
                return fail(format!(
                    "sample {s}: module Bianchi defect is {defect}"
                ));
            }
        }
    }
    pass()
}

fn check_finite_gauge(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, rep) = defining_rep(inst)?;
    for (s, (g, h)) in shear_pairs(inst, rng, n, samples).iter().enumerate() {
        let omega = sample::one_form(rng, d, alg.clone(), ValueSpace::Endo(rep.clone()), 1);
        let w = RepConnectionForm::new(omega)?;
        let once = finite_gauge(&w, g);
        let twice = finite_gauge(&once, h);
        let direct = finite_gauge(&w, &g.mul(h));
        if twice.omega_e != direct.omega_e {
            return fail(format!(
                "sample {s}: (\u{03c9}^g)^h - \u{03c9}^{{gh}} = {}",
                twice.omega_e.sub(&direct.omega_e)
            ));
        }
        let r = rep_curvature(&w)?;
        let moved = rep_curvature(&once)?;
        let conjugated = conjugate_by(&r, g);
        if moved != conjugated {
            return fail(format!(
                "sample {s}: R^g - g\u{207b}\u{00b9}Rg = {}",
                moved.sub(&conjugated)
            ));
        }
    }
    pass()
}

// ---------------------------------------------------------------------------
// matrix calculus

fn check_maurer_cartan_matrix(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let defect = maurer_cartan_defect(n)?;
    if !defect.is_zero() {
        return fail(format!("d\u{2032}(i\u{03b8}) \u{2212} (i\u{03b8})\u{00b2} = {defect}"));
    }
    // the equation is not vacuous: both terms are nonzero
    let itheta = canonical_itheta(n)?;
    if nc_differential(&itheta).is_zero() {
        return fail("d\u{2032}(i\u{03b8}) vanishes identically".into());
    }
    pass()
}

fn check_degree_zero_derivation(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let mut mats = vec![RatMatrix::identity(n)];
    for i in 0..n {
        for j in 0..n {
            mats.push(RatMatrix::elementary(n, i, j));
        }
    }
    for _ in 0..samples {
        mats.push(sample::rat_matrix(rng, n));
    }
    for (s, a) in mats.iter().enumerate() {
        let defect = degree_zero_defect(a)?;
        if !defect.is_zero() {
            return fail(format!("matrix {s}: d\u{2032}a \u{2212} [i\u{03b8}, a] = {defect}"));
        }
    }
    pass()
}

fn check_higher_degree_witness(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let (w, defect) = higher_degree_witness(n)?;
    if w.degree() != 1 {
        return fail(format!("witness has degree {}", w.degree()));
    }
    if defect.is_zero() {
        return fail("the claimed witness has a zero defect".into());
    }
    pass()
}

fn check_inner_faithful(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    if inner_derivations_faithful(n)? {
        pass()
    } else {
        fail(format!("ad has a kernel on the traceless part of M_{n}"))
    }
}

fn check_itheta_reproduces(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let itheta = canonical_itheta(n)?;
    let mut mats = vec![RatMatrix::identity(n)];
    for i in 0..n {
        for j in 0..n {
            mats.push(RatMatrix::elementary(n, i, j));
        }
    }
    for _ in 0..samples {
        mats.push(sample::rat_matrix(rng, n));
    }
    for (s, a) in mats.iter().enumerate() {
        let evaluated = itheta.evaluate(&[a.clone()])?;
        let expect_poly = traceless_projection(&a.to_poly(0));
        if evaluated.to_poly(0) != expect_poly {
            return fail(format!(
                "matrix {s}: i\u{03b8}(ad_a) differs from the traceless part of a"
            ));
        }
    }
    pass()
}

// ---------------------------------------------------------------------------
// noncommutative connections

fn check_nc_leibniz(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, rep) = defining_rep(inst)?;
    let m = alg.dim;
    for s in 0..samples {
        let omega = sample::one_form(rng, d, alg.clone(), ValueSpace::Endo(rep.clone()), 2);
        let c = NCConnection::new(EndoNCForm::new(omega)?)?;
        let x = NCDerivation::new(sample::vector_field(rng, d), sample::gamma(rng, m, d));
        let mmat = sample::poly_matrix(rng, n, d);
        let amat = sample::poly_matrix(rng, n, d);
        let lhs = nc_connection_apply(&c, &x, &mmat.mul(&amat))?;
        let rhs = nc_connection_apply(&c, &x, &mmat)?
            .mul(&amat)
            .add(&mmat.mul(&x.apply(&alg, &amat)?));
        if lhs != rhs {
            return fail(format!(
                "sample {s}: \u{2207}_X(ma) - (\u{2207}_X m)a - m X(a) = {}",
                lhs.sub(&rhs)
            ));
        }
    }
    pass()
}

fn check_nc_operator_curvature(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, rep) = defining_rep(inst)?;
    let m = alg.dim;
    for s in 0..samples {
        let omega = sample::one_form(rng, d, alg.clone(), ValueSpace::Endo(rep.clone()), 1);
        let c = NCConnection::new(EndoNCForm::new(omega)?)?;
        let x = NCDerivation::new(sample::vector_field(rng, d), sample::gamma(rng, m, d));
        let y = NCDerivation::new(sample::vector_field(rng, d), sample::gamma(rng, m, d));
        let a = sample::poly_matrix(rng, n, d);
        let operator = nc_operator_curvature(&c, &x, &y, &a)?;
        let two_form = nc_curvature(&c)?;
        let value = two_form.form.evaluate(&[x.to_tla(), y.to_tla()])?;
        let through_form = value.as_endo().expect("endo value").mul(&a);
        if operator != through_form {
            return fail(format!(
                "sample {s}: operator and 2-form curvatures disagree by {}",
                operator.sub(&through_form)
            ));
        }
    }
    pass()
}

fn check_nc_gauge(inst: &Instance, rng: &mut ChaCha8Rng, samples: usize) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, rep) = defining_rep(inst)?;
    for (s, (g, h)) in shear_pairs(inst, rng, n, samples).iter().enumerate() {
        let omega = sample::one_form(rng, d, alg.clone(), ValueSpace::Endo(rep.clone()), 1);
        let c = NCConnection::new(EndoNCForm::new(omega)?)?;
        let cg = nc_gauge(&c, g);
        let cgh = nc_gauge(&cg, h);
        let direct = nc_gauge(&c, &g.mul(h));
        if cgh.omega.form != direct.omega.form {
            return fail(format!(
                "sample {s}: (\u{03c9}^g)^h - \u{03c9}^{{gh}} = {}",
                cgh.omega.form.sub(&direct.omega.form)
            ));
        }
        let before = nc_curvature(&c)?;
        let after = nc_curvature(&cg)?;
        let conjugated = conjugate_by(&before.form, g);
        if after.form != conjugated {
            return fail(format!(
                "sample {s}: \u{03a9}^g - g\u{207b}\u{00b9}\u{03a9}g = {}",
                after.form.sub(&conjugated)
            ));
        }
    }
    pass()
}

// ---------------------------------------------------------------------------
// the two structure theorems

fn check_theorem_three_spaces(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let (alg, rep) = defining_rep(inst)?;
    let triple = [
        ConnectionSpace::DerAConnection,
        ConnectionSpace::AtiyahConnection,
        ConnectionSpace::NcConnection,
    ];
    for s in 0..samples {
        let w = sample::one_form(rng, d, alg.clone(), ValueSpace::Endo(rep.clone()), 2);
        for &from in &triple {
            for &to in &triple {
                let moved = convert_connection(from, to, &w)?;
                if moved != w {
                    return fail(format!(
                        "sample {s}: {from} \u{2192} {to} moved the payload by {}",
                        moved.sub(&w)
                    ));
                }
            }
        }
        if convert_connection(
            ConnectionSpace::DerAConnection,
            ConnectionSpace::GeneralizedDerA,
            &w,
        )
        .is_ok()
        {
            return fail(format!(
                "sample {s}: a cross-theorem conversion was accepted"
            ));
        }
        let kernel_payload = sample::one_form(rng, d, alg.clone(), ValueSpace::Kernel, 2);
        if convert_connection(
            ConnectionSpace::DerAConnection,
            ConnectionSpace::NcConnection,
            &kernel_payload,
        )
        .is_ok()
        {
            return fail(format!(
                "sample {s}: a kernel-valued payload was accepted where endo values are required"
            ));
        }
    }
    pass()
}

fn check_theorem_generalized_roundtrip(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, _rep) = defining_rep(inst)?;
    for s in 0..samples {
        let w = sample::one_form(rng, d, alg.clone(), ValueSpace::Kernel, 2);
        let embedded = convert_connection(
            ConnectionSpace::GeneralizedDerA,
            ConnectionSpace::TracelessNc,
            &w,
        )?;
        if !is_traceless(&EndoNCForm::new(embedded.clone())?) {
            return fail(format!("sample {s}: the embedding is not traceless"));
        }
        let back = convert_connection(
            ConnectionSpace::TracelessNc,
            ConnectionSpace::GeneralizedAtiyah,
            &embedded,
        )?;
        if back != w {
            return fail(format!(
                "sample {s}: the round trip moved the payload by {}",
                back.sub(&w)
            ));
        }
        let retag = convert_connection(
            ConnectionSpace::GeneralizedDerA,
            ConnectionSpace::GeneralizedAtiyah,
            &w,
        )?;
        if retag != w {
            return fail(format!("sample {s}: a kernel-side retag moved the payload"));
        }
        // a component with nonzero trace must be rejected on the way back
        let mut bad = embedded;
        bad.add_to_component(1, 0, Value::Endo(PolyMatrix::identity(n, d)));
        if convert_connection(
            ConnectionSpace::TracelessNc,
            ConnectionSpace::GeneralizedDerA,
            &bad,
        )
        .is_ok()
        {
            return fail(format!("sample {s}: a traced payload was extracted"));
        }
    }
    pass()
}

fn check_theorem_commuting_squares(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let (alg, _rep) = defining_rep(inst)?;
    let m = alg.dim;
    for s in 0..samples {
        let w = sample::one_form(rng, d, alg.clone(), ValueSpace::Kernel, 1);
        let gc = GeneralizedConnectionForm::new(w.clone())?;
        let w_e = embed_kernel_as_traceless(&w)?;

        let r = curvature(&gc)?;
        let r_e = rep_curvature(&RepConnectionForm::new(w_e.clone())?)?;
        if embed_kernel_as_traceless(&r)? != r_e {
            return fail(format!(
                "sample {s}: curvature does not commute with the embedding"
            ));
        }
        if extract_traceless(&r_e)? != r {
            return fail(format!(
                "sample {s}: curvature does not commute with the extraction"
            ));
        }

        let xi = sample::gamma(rng, m, d);
        let moved = infinitesimal_gauge(&gc, &xi);
        let moved_e = endo_infinitesimal_gauge(&w_e, &xi.to_matrix(&alg)?)?;
        if embed_kernel_as_traceless(&moved.omega)? != moved_e {
            return fail(format!(
                "sample {s}: the gauge action does not commute with the embedding"
            ));
        }
    }
    pass()
}

// ---------------------------------------------------------------------------
// the unipotent bundle model

fn check_group_law(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let group = &bundle.group;
    let k = group.dim();
    let mu = group.group_law();
    let inv = group.inverse_law();

    let substitute = |law: &[PolyScalar], a: &[PolyScalar], b: &[PolyScalar]| -> Vec<PolyScalar> {
        let images: Vec<PolyScalar> = a.iter().chain(b.iter()).cloned().collect();
        law.iter().map(|p| p.substitute(&images)).collect()
    };

    let var_block = |n_vars: usize, offset: usize| -> Vec<PolyScalar> {
        (0..k).map(|a| PolyScalar::var(n_vars, offset + a)).collect()
    };
    let x3 = var_block(3 * k, 0);
    let y3 = var_block(3 * k, k);
    let z3 = var_block(3 * k, 2 * k);
    let left = substitute(&mu, &substitute(&mu, &x3, &y3), &z3);
    let right = substitute(&mu, &x3, &substitute(&mu, &y3, &z3));
    if left != right {
        return fail("\u{03bc}(\u{03bc}(x, y), z) \u{2260} \u{03bc}(x, \u{03bc}(y, z))".into());
    }

    let xk = var_block(k, 0);
    let zeros: Vec<PolyScalar> = (0..k).map(|_| PolyScalar::zero(k)).collect();
    if substitute(&mu, &xk, &zeros) != xk || substitute(&mu, &zeros, &xk) != xk {
        return fail("the origin is not a two-sided unit".into());
    }
    if substitute(&mu, &xk, &inv) != zeros || substitute(&mu, &inv, &xk) != zeros {
        return fail("the inverse law does not invert".into());
    }

    // Ad is a homomorphism for the same law
    let ad = group.adjoint_matrix();
    let sub_mat = |images: &[PolyScalar]| -> PolyMatrix {
        PolyMatrix::from_entries(ad.n, ad.entries.iter().map(|p| p.substitute(images)).collect())
    };
    let x2 = var_block(2 * k, 0);
    let y2 = var_block(2 * k, k);
    let ad_xy = sub_mat(&substitute(&mu, &x2, &y2));
    if sub_mat(&x2).mul(&sub_mat(&y2)) != ad_xy {
        return fail("Ad_x Ad_y \u{2260} Ad_{\u{03bc}(x, y)}".into());
    }
    pass()
}

fn check_fundamental_fields(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let group = &bundle.group;
    let k = group.dim();
    let total = bundle.total_dim();
    let g = bundle.g_matrix();
    for a in 0..k {
        let xi_a = bundle.fundamental_field(a);
        // right-invariance law: xi_a applied to the entries of g gives g E_a
        let (i, j) = group.positions[a];
        let e_a = RatMatrix::elementary(group.n, i, j).to_poly(total);
        if g.apply_field(&xi_a) != g.mul(&e_a) {
            return fail(format!("\u{03be}_{a} \u{00b7} g \u{2260} g E_{a}"));
        }
        for b in 0..k {
            let xi_b = bundle.fundamental_field(b);
            let mut expect = PolyVectorField::zero(total);
            for (c, coeff) in group.algebra().bracket_basis(a, b).iter().enumerate() {
                expect = expect.add(
                    &bundle
                        .fundamental_field(c)
                        .scale(&PolyScalar::constant(total, coeff.clone())),
                );
            }
            if xi_a.bracket(&xi_b) != expect {
                return fail(format!(
                    "[\u{03be}_{a}, \u{03be}_{b}] \u{2260} \u{03be}_{{[e_{a}, e_{b}]}}"
                ));
            }
        }
    }
    pass()
}

fn check_equ_cartan(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let op = bundle.equ_operation();
    let alg = bundle.group.algebra().clone();
    let k = bundle.group.dim();
    let total = bundle.total_dim();

    // the generators close on the structure constants
    for a in 0..k {
        for b in 0..k {
            let br = tla_bracket(&alg, &op.generators[a], &op.generators[b])?;
            let mut expect = TlaElement::zero(total, k);
            for (c, coeff) in alg.bracket_basis(a, b).iter().enumerate() {
                expect = expect.add(
                    &bundle
                        .equ_generator(c)
                        .scale(&PolyScalar::constant(total, coeff.clone())),
                );
            }
            if br != expect {
                return fail(format!("the generators do not close at the pair ({a}, {b})"));
            }
        }
    }

    for s in 0..samples {
        let p = rng.gen_range(0..=total.min(1));
        let q = rng.gen_range(0..=(2 - p).min(k));
        let w = sample::form(rng, total, alg.clone(), ValueSpace::Kernel, p, q);
        for a in 0..k {
            for b in 0..k {
                let u = &op.generators[a];
                let v = &op.generators[b];
                let uv = tla_bracket(&alg, u, v)?;
                let anti = w.interior(u).interior(v).add(&w.interior(v).interior(u));
                if !anti.is_zero() {
                    return fail(format!("sample {s}: i_{a} i_{b} + i_{b} i_{a} = {anti}"));
                }
                let mixed = w
                    .interior(v)
                    .lie_derivative(u)
                    .sub(&w.lie_derivative(u).interior(v))
                    .sub(&w.interior(&uv));
                if !mixed.is_zero() {
                    return fail(format!(
                        "sample {s}: [L_{a}, i_{b}] - i_{{[{a},{b}]}} = {mixed}"
                    ));
                }
                let lie2 = w
                    .lie_derivative(u)
                    .lie_derivative(v)
                    .sub(&w.lie_derivative(v).lie_derivative(u))
                    .add(&w.lie_derivative(&uv));
                if !lie2.is_zero() {
                    return fail(format!(
                        "sample {s}: [L_{b}, L_{a}] - L_{{[{b},{a}]}} = {lie2}"
                    ));
                }
            }
        }
    }
    pass()
}

fn check_mc_invariant(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let op = bundle.equ_operation();
    let theta_p = bundle.maurer_cartan();
    let k = bundle.group.dim();
    let total = bundle.total_dim();
    if !is_invariant(&theta_p, &op) {
        return fail("L_{u_a}\u{03b8}_P \u{2260} 0 for an equivariance generator".into());
    }
    if is_horizontal(&theta_p, &op) {
        return fail("\u{03b8}_P is horizontal, so it cannot see the fibre".into());
    }
    // on pure kernel elements the bundle form is tautological
    for a in 0..k {
        let ell = GammaField::basis(k, a, total);
        let contracted = theta_p.interior(&TlaElement::iota(ell.clone(), total));
        let expect = MixedForm::from_value(
            total,
            bundle.group.algebra().clone(),
            ValueSpace::Kernel,
            Value::Kernel(ell),
        );
        if contracted != expect {
            return fail(format!("\u{03b8}_P(\u{03b9}(e_{a})) \u{2260} e_{a}"));
        }
    }
    pass()
}

fn random_bundle_potential(
    bundle: &BundleModel,
    rng: &mut ChaCha8Rng,
    d: usize,
) -> Result<GaugePotential> {
    let k = bundle.group.dim();
    let coeffs = (0..d).map(|_| sample::gamma(rng, k, d)).collect();
    GaugePotential::new(bundle.group.algebra().clone(), coeffs)
}

fn check_connection_hat_basic(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let op = bundle.equ_operation();
    for s in 0..samples {
        let a = random_bundle_potential(&bundle, rng, inst.d)?;
        let what = connection_hat(&bundle, &a)?;
        if !normalization_holds(&what.alpha) {
            return fail(format!("sample {s}: \u{03c9}\u{0302} is not normalized"));
        }
        if !is_basic(&what.alpha, &op) {
            return fail(format!("sample {s}: \u{03c9}\u{0302} is not basic"));
        }
    }
    pass()
}

fn check_lambda_roundtrip(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    for s in 0..samples {
        let a = random_bundle_potential(&bundle, rng, inst.d)?;
        let what = connection_hat(&bundle, &a)?;
        let restricted = lambda_restrict(&bundle, &what.alpha)?;
        let base = connection_from_potential(&a);
        if restricted != base.alpha {
            return fail(format!(
                "sample {s}: \u{03bb}(\u{03c9}\u{0302}) - (A - \u{03b8}) = {}",
                restricted.sub(&base.alpha)
            ));
        }
        let rebuilt = reconstruct(&bundle, &restricted)?;
        if rebuilt != what.alpha {
            return fail(format!(
                "sample {s}: reconstruction differs from \u{03c9}\u{0302} by {}",
                rebuilt.sub(&what.alpha)
            ));
        }
    }
    if lambda_restrict(&bundle, &bundle.maurer_cartan()).is_ok() {
        return fail("the non-basic \u{03b8}_P slipped through the basic gate".into());
    }
    pass()
}

fn check_atiyah_curvature(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let bundle = bundle_of(inst)?;
    let op = bundle.equ_operation();
    for s in 0..samples {
        let a = random_bundle_potential(&bundle, rng, inst.d)?;
        let what = connection_hat(&bundle, &a)?;
        let r_p = curvature(&what)?;
        if !is_basic(&r_p, &op) {
            return fail(format!("sample {s}: R\u{0302}_P is not basic"));
        }
        let f = lambda_restrict(&bundle, &r_p)?;
        if f != curvature(&connection_from_potential(&a))? {
            return fail(format!(
                "sample {s}: \u{03bb}(R\u{0302}_P) differs from the base curvature"
            ));
        }
        if f != f.bidegree_part(2, 0) {
            return fail(format!(
                "sample {s}: the restricted curvature has mixed components: {f}"
            ));
        }
        let af = a.to_form();
        let field_strength = af
            .differential()?
            .add(&half_bracket(&af)?)
            .bidegree_part(2, 0);
        if f != field_strength {
            return fail(format!(
                "sample {s}: F - (d\u{0302}A + \u{00bd}[A, A])_{{(2,0)}} = {}",
                f.sub(&field_strength)
            ));
        }
    }
    pass()
}

fn check_generalized_split(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let d = inst.d;
    let m = inst.algebra.dim;
    for s in 0..samples {
        let w = sample::one_form(rng, d, inst.algebra.clone(), ValueSpace::Kernel, 2);
        let (coord, kern) = generalized_split(&w)?;
        if coord != w.bidegree_part(1, 0)
            || kern != w.bidegree_part(0, 1)
            || coord.add(&kern) != w
        {
            return fail(format!("sample {s}: the split does not recompose"));
        }
    }
    // for a normalized connection the kernel part is exactly -theta
    let a = potentials_for(inst, rng, 1)?.remove(0);
    let c = connection_from_potential(&a);
    let (coord, kern) = generalized_split(&c.alpha)?;
    let theta = MixedForm::tautological_theta(d, inst.algebra.clone());
    if kern != theta.neg() || coord != a.to_form() {
        return fail("\u{03b1} = A \u{2212} \u{03b8} does not split into (A, \u{2212}\u{03b8})".into());
    }
    let two_form = sample::form(rng, d, inst.algebra.clone(), ValueSpace::Kernel, 1, m.min(1));
    if two_form.degree() == 2 && generalized_split(&two_form).is_ok() {
        return fail("a 2-form was split as a connection".into());
    }
    pass()
}

// ---------------------------------------------------------------------------
// atlases of trivializations

fn cocycle_witness(report: &CocycleReport) -> String {
    report
        .failures
        .iter()
        .take(3)
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn check_cocycle_validation(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let t = atlas_of(inst)?;
    let report = validate_cocycle(t);
    if report.ok {
        pass()
    } else {
        fail(cocycle_witness(&report))
    }
}

fn check_alpha_automorphism(
    inst: &Instance,
    _rng: &mut ChaCha8Rng,
    _samples: usize,
) -> Result<CheckOutcome> {
    let t = atlas_of(inst)?;
    for (&(i, j), tr) in &t.pairs {
        if !alpha_is_automorphism(&t.algebra, tr) {
            return fail(format!("\u{03b1}_({i},{j}) does not respect the bracket"));
        }
    }
    pass()
}

fn check_chi_two_routes(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let n = sl_n(inst)?;
    let d = inst.d;
    let (alg, _rep) = defining_rep(inst)?;
    for s in 0..samples {
        let g = sample::linear_shear(rng, n, d).mul(&sample::linear_shear(rng, n, d));
        for k in 0..d {
            let via_diff = chi_via_differential(&g, k);
            let via_field = chi_via_field(&g, &PolyVectorField::coordinate(d, k));
            if via_diff != via_field {
                return fail(format!(
                    "sample {s}: the two \u{03c7}(\u{2202}_{k}) formulas disagree by {}",
                    via_diff.sub(&via_field)
                ));
            }
            // chi lands in the algebra and the expansion is faithful
            let expanded = expand_in_basis(&alg, &via_diff)?;
            if expanded.to_matrix(&alg)? != via_diff {
                return fail(format!(
                    "sample {s}: expanding \u{03c7}(\u{2202}_{k}) in the basis loses information"
                ));
            }
        }
        let x = sample::vector_field(rng, d);
        let mut linear = PolyMatrix::zero(n, d);
        for k in 0..d {
            linear = linear.add(&chi_via_differential(&g, k).scale(&x.components[k]));
        }
        if chi_via_field(&g, &x) != linear {
            return fail(format!(
                "sample {s}: \u{03c7}(X) is not the contraction of the coordinate values"
            ));
        }
    }
    pass()
}

fn check_glue_family(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let t = atlas_of(inst)?;
    let m = t.algebra.dim;
    // Propagation follows the direction of the stored overlaps, so not every
    // chart can seed the whole atlas; pick one that reaches everything.
    let seed_chart = (0..t.charts.len())
        .map(|offset| t.charts[offset].id)
        .find(|&c| {
            let mut seeds = BTreeMap::new();
            seeds.insert(c, GammaField::zero(m, t.d));
            !matches!(
                glue(t, &PolyVectorField::zero(t.d), &seeds),
                Err(Error::InvalidInput(_))
            )
        })
        .ok_or_else(|| {
            Error::InvalidInput("no single chart reaches the whole atlas by propagation".into())
        })?;
    for s in 0..samples {
        let x = sample::vector_field(rng, t.d);
        let mut seeds = BTreeMap::new();
        seeds.insert(seed_chart, sample::gamma(rng, m, t.d));
        let family = match glue(t, &x, &seeds) {
            Ok(f) => f,
            Err(Error::GluingConflict { i, j, defect }) => {
                return fail(format!(
                    "sample {s}: propagation from chart {seed_chart} conflicts on ({i}, {j}): {defect}"
                ));
            }
            Err(e) => return Err(e),
        };
        // gluing again from the full family must agree with itself
        match glue(t, &x, &family.gammas) {
            Ok(again) => {
                if again.gammas != family.gammas {
                    return fail(format!("sample {s}: regluing moved the family"));
                }
            }
            Err(Error::GluingConflict { i, j, defect }) => {
                return fail(format!(
                    "sample {s}: the glued family is not self-consistent on ({i}, {j}): {defect}"
                ));
            }
            Err(e) => return Err(e),
        }
    }
    pass()
}

fn check_perturbed_cocycle_fails(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckOutcome> {
    let t = atlas_of(inst)?;
    let m = t.algebra.dim;
    let d = t.d;
    // ordered triples whose three overlaps are all present
    let mut triples = Vec::new();
    for (&(i, j), _) in &t.pairs {
        if i == j {
            continue;
        }
        for chart in &t.charts {
            let k = chart.id;
            if k == i || k == j {
                continue;
            }
            if t.pairs.contains_key(&(j, k)) && t.pairs.contains_key(&(i, k)) {
                triples.push((i, j, k));
            }
        }
    }
    if triples.is_empty() {
        return Err(Error::InvalidInput(
            "perturbed_cocycle_fails needs a chart triple with all three overlaps".into(),
        ));
    }
    for s in 0..samples.min(triples.len().max(3)) {
        let (i, j, k) = triples[s % triples.len()];
        let mut broken = t.clone();
        let tr = broken.pairs.get_mut(&(i, j)).expect("pair from the triple");
        let coord = rng.gen_range(0..d);
        let dir = rng.gen_range(0..m);
        tr.chi[coord] = tr.chi[coord].add(&GammaField::basis(m, dir, d));
        let report = validate_cocycle(&broken);
        if report.ok {
            return fail(format!(
                "perturbing \u{03c7}_({i},{j}) went undetected"
            ));
        }
        let names_pair = report
            .failures
            .iter()
            .any(|f| {
                let (a, b, c) = f.triple;
                [a, b, c].contains(&i) && [a, b, c].contains(&j)
            });
        if !names_pair {
            return fail(format!(
                "the failure does not name the perturbed pair ({i}, {j}); first defect: {}",
                cocycle_witness(&report)
            ));
        }
        // the witness triple we forged must be among the reported ones
        if !report.failures.iter().any(|f| {
            f.triple == (i, j, k)
                || f.triple == (i, k, j)
                || f.triple == (k, i, j)
                || f.triple == (j, i, k)
                || f.triple == (j, k, i)
                || f.triple == (k, j, i)
        }) {
            return fail(format!(
                "no reported triple involves ({i}, {j}, {k}); first defect: {}",
                cocycle_witness(&report)
            ));
        }
    }
    pass()
}
