//! Lie algebroid atlases: transition data over a family of formal charts,
//! cocycle validation, and gluing of local representatives.
//!
//! Charts share one global coordinate ring (overlaps are formal at desk
//! scale), so the cocycle relations α_ik = α_ij ∘ α_jk and
//! χ_ik = α_ij ∘ χ_jk + χ_ij, and the gluing rule γ_i = α_ij(γ_j) + χ_ij(X),
//! are exact polynomial identities over the full ring.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lie::{bracket_gamma, AlgebraRef, GammaField, LieAlgebra};
use crate::matrix::{GroupElementField, PolyMatrix};
use crate::poly::{rat, PolyScalar, PolyVectorField, Rat};

/// A formal chart label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub id: usize,
    pub label: String,
}

impl Chart {
    pub fn new(id: usize, label: impl Into<String>) -> Self {
        Chart {
            id,
            label: label.into(),
        }
    }
}

/// Transition maps on one ordered overlap (i, j): a pointwise Lie algebra
/// automorphism α given by its basis images, and the inhomogeneous term χ
/// given on coordinate fields. Both extend linearly over polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// alpha[a] = α(e_a); algebra-dimension many entries.
    pub alpha: Vec<GammaField>,
    /// chi[k] = χ(∂_k); base-dimension many entries.
    pub chi: Vec<GammaField>,
}

impl Transition {
    pub fn identity(d: usize, m: usize) -> Self {
        Transition {
            alpha: (0..m).map(|a| GammaField::basis(m, a, d)).collect(),
            chi: (0..d).map(|_| GammaField::zero(m, d)).collect(),
        }
    }

    pub fn apply_alpha(&self, gamma: &GammaField) -> GammaField {
        let mut out = GammaField::zero(self.alpha.len(), gamma.n_vars());
        for (a, image) in self.alpha.iter().enumerate() {
            out = out.add(&image.scale(&gamma.components[a]));
        }
        out
    }

    pub fn apply_chi(&self, x: &PolyVectorField) -> GammaField {
        let m = self.alpha.len();
        let d = self.chi.len();
        let mut out = GammaField::zero(m, d);
        for (k, image) in self.chi.iter().enumerate() {
            out = out.add(&image.scale(&x.components[k]));
        }
        out
    }

    /// Composite transition: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Transition {
            alpha: other
                .alpha
                .iter()
                .map(|image| self.apply_alpha(image))
                .collect(),
            chi: other
                .chi
                .iter()
                .enumerate()
                .map(|(k, image)| self.apply_alpha(image).add(&self.chi[k]))
                .collect(),
        }
    }

    fn is_identity(&self, d: usize, m: usize) -> bool {
        *self == Self::identity(d, m)
    }
}

/// α respects the bracket on basis pairs (hence everywhere by linearity).
pub fn alpha_is_automorphism(alg: &LieAlgebra, t: &Transition) -> bool {
    let m = alg.dim;
    let d = t.chi.len();
    for a in 0..m {
        for b in 0..m {
            let lhs = t.apply_alpha(&GammaField::constant(alg.bracket_basis(a, b), d));
            let rhs = bracket_gamma(alg, &t.alpha[a], &t.alpha[b]).expect("dimensions agree");
            if !lhs.sub(&rhs).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Atlas transition data over a chart family.
#[derive(Clone, Debug)]
pub struct TransitionData {
    pub algebra: AlgebraRef,
    pub d: usize,
    pub charts: Vec<Chart>,
    pub pairs: BTreeMap<(usize, usize), Transition>,
}

/// One failed cocycle relation, named by its triple.
#[derive(Clone, Debug)]
pub struct CocycleDefect {
    pub triple: (usize, usize, usize),
    pub relation: &'static str,
    pub defect: String,
}

impl std::fmt::Display for CocycleDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "triple ({}, {}, {}): {} relation fails with defect {}",
            self.triple.0, self.triple.1, self.triple.2, self.relation, self.defect
        )
    }
}

/// Outcome of a full cocycle validation pass.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub ok: bool,
    pub failures: Vec<CocycleDefect>,
}

/// Check α_ii = id and χ_ii = 0 on every chart, and the two cocycle
/// relations on every ordered triple whose three overlaps are present.
pub fn validate_cocycle(t: &TransitionData) -> CocycleReport {
    let m = t.algebra.dim;
    let mut failures = Vec::new();
    for chart in &t.charts {
        let i = chart.id;
        if let Some(tr) = t.pairs.get(&(i, i)) {
            if !tr.is_identity(t.d, m) {
                failures.push(CocycleDefect {
                    triple: (i, i, i),
                    relation: "identity",
                    defect: "transition on a self-overlap is not the identity".into(),
                });
            }
        }
    }
    let ids: Vec<usize> = t.charts.iter().map(|c| c.id).collect();
    for &i in &ids {
        for &j in &ids {
            for &k in &ids {
                if i == j || j == k || i == k {
                    continue;
                }
                let (Some(t_ij), Some(t_jk), Some(t_ik)) = (
                    t.pairs.get(&(i, j)),
                    t.pairs.get(&(j, k)),
                    t.pairs.get(&(i, k)),
                ) else {
                    continue;
                };
                let composite = t_ij.compose(t_jk);
                for a in 0..m {
                    let defect = composite.alpha[a].sub(&t_ik.alpha[a]);
                    if !defect.is_zero() {
                        failures.push(CocycleDefect {
                            triple: (i, j, k),
                            relation: "alpha",
                            defect: format!("on basis element {}: {defect}", a + 1),
                        });
                        break;
                    }
                }
                for k_coord in 0..t.d {
                    let defect = composite.chi[k_coord].sub(&t_ik.chi[k_coord]);
                    if !defect.is_zero() {
                        failures.push(CocycleDefect {
                            triple: (i, j, k),
                            relation: "chi",
                            defect: format!("on coordinate field {}: {defect}", k_coord + 1),
                        });
                        break;
                    }
                }
            }
        }
    }
    CocycleReport {
        ok: failures.is_empty(),
        failures,
    }
}

/// χ from the matrix partial derivative: χ(∂_k) = g · ∂_k(g⁻¹).
pub fn chi_via_differential(g: &GroupElementField, k: usize) -> PolyMatrix {
    g.matrix.mul(&g.inverse_matrix.partial(k))
}

/// χ from entrywise application of a vector field: χ(X) = g · (X · g⁻¹).
pub fn chi_via_field(g: &GroupElementField, x: &PolyVectorField) -> PolyMatrix {
    g.matrix.mul(&g.inverse_matrix.apply_field(x))
}

/// Expand a polynomial matrix in the algebra's matrix basis, solving the
/// underlying rational linear system exactly; errors when the matrix lies
/// outside the span.
pub fn expand_in_basis(alg: &LieAlgebra, mat: &PolyMatrix) -> Result<GammaField> {
    let basis = alg.matrix_basis.as_ref().ok_or_else(|| {
        Error::InvalidInput("algebra carries no matrix basis to expand against".into())
    })?;
    let n = mat.n;
    let m = basis.len();
    let rows = n * n;
    let mut b: Vec<Vec<Rat>> = (0..rows)
        .map(|r| (0..m).map(|c| basis[c].get(r / n, r % n).clone()).collect())
        .collect();
    let mut v: Vec<PolyScalar> = mat.entries.clone();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(pivot) = (row..rows).find(|&r| !b[r][col].is_zero()) else {
            continue;
        };
        b.swap(row, pivot);
        v.swap(row, pivot);
        let inv = rat(1) / b[row][col].clone();
        for c in 0..m {
            b[row][c] = &b[row][c] * &inv;
        }
        v[row] = v[row].scale(&inv);
        for r in 0..rows {
            if r == row || b[r][col].is_zero() {
                continue;
            }
            let factor = b[r][col].clone();
            for c in 0..m {
                let scaled = &factor * &b[row][c];
                b[r][c] = &b[r][c] - &scaled;
            }
            v[r] = v[r].sub(&v[row].scale(&factor));
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }

    let mut components = vec![PolyScalar::zero(mat.n_vars()); m];
    for &(r, c) in &pivots {
        components[c] = v[r].clone();
    }
    for r in 0..rows {
        if pivots.iter().any(|&(pr, _)| pr == r) {
            continue;
        }
        if !v[r].is_zero() {
            return Err(Error::InvalidInput(
                "matrix lies outside the span of the algebra basis".into(),
            ));
        }
    }
    Ok(GammaField::from_components(components))
}

/// Build transition data from bundle transition functions:
/// α_ij(γ) = g_ij γ g_ij⁻¹ and χ_ij(∂_k) = g_ij ∂_k(g_ij⁻¹).
///
/// The input family must be multiplicative (g_ij g_jk = g_ik whenever all
/// three overlaps are present, g_ii = I); the resulting data then passes
/// cocycle validation by construction.
pub fn transitions_from_bundle(
    algebra: AlgebraRef,
    d: usize,
    charts: Vec<Chart>,
    g: &BTreeMap<(usize, usize), GroupElementField>,
) -> Result<TransitionData> {
    let m = algebra.dim;
    let basis = algebra.matrix_basis.as_ref().ok_or_else(|| {
        Error::InvalidInput("algebra carries no matrix basis to expand against".into())
    })?;
    let n = basis[0].n;
    for ((i, j), gij) in g {
        if gij.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "transition function on ({i}, {j}) has matrix size {}, basis has {n}",
                gij.n()
            )));
        }
        if gij.n_vars() != d {
            return Err(Error::DimensionMismatch(format!(
                "transition function on ({i}, {j}) uses {} coordinates, atlas has {d}",
                gij.n_vars()
            )));
        }
        if i == j && gij.matrix != PolyMatrix::identity(n, d) {
            return Err(Error::InvalidInput(format!(
                "transition function on the self-overlap ({i}, {i}) is not the identity"
            )));
        }
    }
    let ids: Vec<usize> = charts.iter().map(|c| c.id).collect();
    for &i in &ids {
        for &j in &ids {
            for &k in &ids {
                if i == j || j == k || i == k {
                    continue;
                }
                let (Some(gij), Some(gjk), Some(gik)) =
                    (g.get(&(i, j)), g.get(&(j, k)), g.get(&(i, k)))
                else {
                    continue;
                };
                if gij.matrix.mul(&gjk.matrix) != gik.matrix {
                    return Err(Error::InvalidInput(format!(
                        "transition family is not multiplicative on charts ({i}, {j}, {k})"
                    )));
                }
            }
        }
    }

    let mut pairs = BTreeMap::new();
    for &i in &ids {
        pairs.insert((i, i), Transition::identity(d, m));
    }
    for (&(i, j), gij) in g {
        if i == j {
            continue;
        }
        let mut alpha = Vec::with_capacity(m);
        for basis_mat in basis {
            let conj = gij
                .matrix
                .mul(&basis_mat.to_poly(d))
                .mul(&gij.inverse_matrix);
            alpha.push(expand_in_basis(&algebra, &conj)?);
        }
        let mut chi = Vec::with_capacity(d);
        for k in 0..d {
            chi.push(expand_in_basis(&algebra, &chi_via_differential(gij, k))?);
        }
        pairs.insert((i, j), Transition { alpha, chi });
    }
    Ok(TransitionData {
        algebra,
        d,
        charts,
        pairs,
    })
}

/// A family of local representatives of one algebroid element: a common
/// base field X and a kernel part per chart.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalElementFamily {
    pub x: PolyVectorField,
    pub gammas: BTreeMap<usize, GammaField>,
}

/// Verify γ_i = α_ij(γ_j) + χ_ij(X) on every overlap where both sides are
/// defined.
pub fn verify_family(t: &TransitionData, family: &LocalElementFamily) -> Result<()> {
    for (&(i, j), tr) in &t.pairs {
        let (Some(gi), Some(gj)) = (family.gammas.get(&i), family.gammas.get(&j)) else {
            continue;
        };
        let expected = tr.apply_alpha(gj).add(&tr.apply_chi(&family.x));
        let defect = gi.sub(&expected);
        if !defect.is_zero() {
            return Err(Error::GluingConflict {
                i,
                j,
                defect: defect.to_string(),
            });
        }
    }
    Ok(())
}

/// Propagate seed representatives across overlaps until the family is
/// complete, then verify the gluing rule on every overlap.
///
/// Seeds on several charts are allowed; any inconsistency (between seeds or
/// between propagation routes) is reported with the offending overlap and
/// the polynomial defect.
pub fn glue(
    t: &TransitionData,
    x: &PolyVectorField,
    seeds: &BTreeMap<usize, GammaField>,
) -> Result<LocalElementFamily> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput("gluing needs at least one seed chart".into()));
    }
    let mut family = LocalElementFamily {
        x: x.clone(),
        gammas: seeds.clone(),
    };
    loop {
        let mut grew = false;
        for (&(i, j), tr) in &t.pairs {
            if family.gammas.contains_key(&i) {
                continue;
            }
            let Some(gj) = family.gammas.get(&j) else {
                continue;
            };
            let gi = tr.apply_alpha(gj).add(&tr.apply_chi(x));
            family.gammas.insert(i, gi);
            grew = true;
        }
        if !grew {
            break;
        }
    }
    for chart in &t.charts {
        if !family.gammas.contains_key(&chart.id) {
            return Err(Error::InvalidInput(format!(
                "transition data does not reach chart {} from the seeds",
                chart.id
            )));
        }
    }
    verify_family(t, &family)?;
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{make_sl, GammaField};
    use crate::poly::{parse_poly, rat};
    use std::sync::Arc;

    fn sl2() -> AlgebraRef {
        Arc::new(make_sl(2).unwrap())
    }

    fn shear(p: &str, i: usize, j: usize) -> GroupElementField {
        GroupElementField::shear(2, i, j, parse_poly(p, 2).unwrap()).unwrap()
    }

    fn three_chart_family() -> (AlgebraRef, Vec<Chart>, BTreeMap<(usize, usize), GroupElementField>) {
        let alg = sl2();
        let charts = vec![
            Chart::new(0, "U0"),
            Chart::new(1, "U1"),
            Chart::new(2, "U2"),
        ];
        let g01 = shear("x1", 0, 1);
        let g12 = shear("x2", 1, 0);
        let g02 = g01.mul(&g12);
        let mut g = BTreeMap::new();
        g.insert((0, 1), g01);
        g.insert((1, 2), g12);
        g.insert((0, 2), g02);
        (alg, charts, g)
    }

    #[test]
    fn shear_family_passes_cocycle_validation() {
        let (alg, charts, g) = three_chart_family();
        let t = transitions_from_bundle(alg.clone(), 2, charts, &g).unwrap();
        let report = validate_cocycle(&t);
        assert!(report.ok, "unexpected failures: {:?}", report.failures);
        for tr in t.pairs.values() {
            assert!(alpha_is_automorphism(&alg, tr));
        }
    }

    #[test]
    fn chi_oracle_for_a_single_shear() {
        // g = I + x1 E12 on two charts: χ(∂_1) = g ∂_1(g⁻¹) = -E12.
        let g = shear("x1", 0, 1);
        let chi = chi_via_differential(&g, 0);
        let mut expected = PolyMatrix::zero(2, 2);
        expected.set(0, 1, PolyScalar::constant(2, rat(-1)));
        assert_eq!(chi, expected);
        assert!(chi_via_differential(&g, 1).is_zero());

        // In the sl(2) basis E12, E21, H the expansion is -e_1.
        let alg = sl2();
        let gamma = expand_in_basis(&alg, &chi).unwrap();
        assert_eq!(gamma, GammaField::basis(3, 0, 2).neg());
    }

    #[test]
    fn chi_routes_agree_after_contraction() {
        let g = shear("x1*x2 + 2*x1", 0, 1);
        let x = PolyVectorField::from_components(vec![
            parse_poly("x2", 2).unwrap(),
            parse_poly("x1 - 1", 2).unwrap(),
        ]);
        let mut contracted = PolyMatrix::zero(2, 2);
        for k in 0..2 {
            contracted = contracted.add(&chi_via_differential(&g, k).scale(&x.components[k]));
        }
        assert_eq!(contracted, chi_via_field(&g, &x));
    }

    #[test]
    fn perturbed_chi_fails_with_named_triple() {
        let (alg, charts, g) = three_chart_family();
        let mut t = transitions_from_bundle(alg, 2, charts, &g).unwrap();
        let tr = t.pairs.get_mut(&(0, 1)).unwrap();
        tr.chi[0] = tr.chi[0].add(&GammaField::basis(3, 0, 2));
        let report = validate_cocycle(&t);
        assert!(!report.ok);
        assert!(report
            .failures
            .iter()
            .any(|f| f.triple == (0, 1, 2) && f.relation == "chi"));
    }

    #[test]
    fn rejects_non_multiplicative_family() {
        let (alg, charts, mut g) = three_chart_family();
        g.insert((0, 2), shear("x1 + 1", 0, 1));
        let err = transitions_from_bundle(alg, 2, charts, &g).unwrap_err();
        assert!(err.to_string().contains("not multiplicative"));
    }

    #[test]
    fn expand_rejects_matrices_outside_the_span() {
        let alg = sl2();
        let not_traceless = PolyMatrix::identity(2, 2);
        assert!(expand_in_basis(&alg, &not_traceless).is_err());
    }

    #[test]
    fn glue_identity_transitions_copies_the_seed() {
        let alg = sl2();
        let charts = vec![Chart::new(0, "U0"), Chart::new(1, "U1")];
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 0), Transition::identity(2, 3));
        pairs.insert((1, 1), Transition::identity(2, 3));
        pairs.insert((0, 1), Transition::identity(2, 3));
        let t = TransitionData {
            algebra: alg,
            d: 2,
            charts,
            pairs,
        };
        let seed = GammaField::basis(3, 2, 2).scale(&parse_poly("x1", 2).unwrap());
        let mut seeds = BTreeMap::new();
        seeds.insert(1, seed.clone());
        let family = glue(&t, &PolyVectorField::coordinate(2, 0), &seeds).unwrap();
        assert_eq!(family.gammas[&0], seed);
        assert_eq!(family.gammas[&1], seed);
    }

    #[test]
    fn glue_reproduces_the_shear_rule() {
        // Two charts, g01 = I + x1 E12, seed γ_1 = 0, X = ∂_1:
        // γ_0 = χ_01(∂_1) = -e_1.
        let alg = sl2();
        let charts = vec![Chart::new(0, "U0"), Chart::new(1, "U1")];
        let mut g = BTreeMap::new();
        g.insert((0, 1), shear("x1", 0, 1));
        let t = transitions_from_bundle(alg, 2, charts, &g).unwrap();
        let mut seeds = BTreeMap::new();
        seeds.insert(1, GammaField::zero(3, 2));
        let family = glue(&t, &PolyVectorField::coordinate(2, 0), &seeds).unwrap();
        assert_eq!(family.gammas[&0], GammaField::basis(3, 0, 2).neg());
    }

    #[test]
    fn glue_accepts_consistent_overdetermined_seeds_and_rejects_conflicts() {
        let (alg, charts, g) = three_chart_family();
        let t = transitions_from_bundle(alg, 2, charts.clone(), &g).unwrap();
        let x = PolyVectorField::coordinate(2, 0);

        // Propagate from a single seed, then re-glue seeding two charts with
        // the consistent values.
        let mut seeds = BTreeMap::new();
        seeds.insert(2, GammaField::basis(3, 1, 2));
        let family = glue(&t, &x, &seeds).unwrap();
        verify_family(&t, &family).unwrap();

        let mut over = BTreeMap::new();
        over.insert(2, family.gammas[&2].clone());
        over.insert(0, family.gammas[&0].clone());
        assert_eq!(glue(&t, &x, &over).unwrap(), family);

        // A tampered seed is reported with the overlap that exposes it.
        let mut bad = over.clone();
        bad.insert(0, family.gammas[&0].add(&GammaField::basis(3, 2, 2)));
        match glue(&t, &x, &bad) {
            Err(Error::GluingConflict { .. }) => {}
            other => panic!("expected a gluing conflict, got {other:?}"),
        }

        // Unreachable charts are rejected.
        let mut island = BTreeMap::new();
        island.insert(0, GammaField::zero(3, 2));
        let t2 = TransitionData {
            pairs: BTreeMap::new(),
            charts,
            ..t
        };
        assert!(glue(&t2, &x, &island).is_err());
    }
}
