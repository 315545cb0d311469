//! Scenario files: structured descriptions of one desk-scale instance plus
//! the list of named checks to run against it.
//!
//! Scenarios are TOML: line-oriented, diffable, with exact rational and
//! polynomial payloads carried as strings. Everything referenced by a
//! scenario is built and validated before any check runs, so malformed
//! input is a configuration error, never a failed identity.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::atiyah::UnipotentGroup;
use crate::atlas::{transitions_from_bundle, Chart, Transition, TransitionData};
use crate::connections::GaugePotential;
use crate::error::{Error, Result};
use crate::lie::{
    make_abelian, make_heisenberg, make_sl, validate_jacobi, AlgebraRef, GammaField, LieAlgebra,
};
use crate::matrix::GroupElementField;
use crate::poly::{parse_poly, Rat};

fn default_seed() -> u64 {
    0
}

fn default_samples() -> usize {
    25
}

fn default_cap() -> u32 {
    crate::DEFAULT_DEGREE_CAP
}

/// Top-level scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub checks: Vec<String>,
    pub base: BaseSpec,
    pub lie_algebra: AlgebraSpec,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub atlas: Option<AtlasSpec>,
    #[serde(default)]
    pub gauge: Option<GaugeSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub dim: usize,
    #[serde(default = "default_cap")]
    pub degree_cap: u32,
}

/// Named constructor or explicit structure constants.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub kind: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub constants: Option<Vec<ConstantEntry>>,
}

/// One structure constant c^k_{ij} as an exact rational string.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub entries: Vec<PotentialEntry>,
}

/// A_leg gets `poly`·e_basis added (1-based leg and basis indices).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialEntry {
    pub leg: usize,
    pub basis: usize,
    pub poly: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub n: usize,
}

/// Chart count plus either generating shears or direct transition payloads.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasSpec {
    pub charts: usize,
    #[serde(default)]
    pub shears: Option<Vec<AtlasShear>>,
    #[serde(default)]
    pub transitions: Option<Vec<TransitionSpec>>,
}

/// g_{from,to} = I + poly · E_{row,col} (all indices 1-based).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasShear {
    pub from: usize,
    pub to: usize,
    pub row: usize,
    pub col: usize,
    pub poly: String,
}

/// Direct (α, χ) payload on one ordered overlap; α defaults to the
/// identity, and entries add on top of the defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub alpha: Vec<AlphaEntry>,
    #[serde(default)]
    pub chi: Vec<ChiEntry>,
}

/// α(e_source) += poly · e_target (1-based basis indices).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub source: usize,
    pub target: usize,
    pub poly: String,
}

/// χ(∂_coord) += poly · e_basis (1-based indices).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiEntry {
    pub coord: usize,
    pub basis: usize,
    pub poly: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub shears: Vec<GaugeShear>,
}

/// I + poly · E_{row,col} (1-based matrix indices).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeShear {
    pub row: usize,
    pub col: usize,
    pub poly: String,
}

impl Scenario {
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario parse error: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidInput(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        Self::from_str(&text)
    }
}

/// Fully built and validated scenario objects.
#[derive(Debug)]
pub struct Instance {
    pub name: String,
    pub d: usize,
    pub degree_cap: u32,
    pub algebra: AlgebraRef,
    /// Matrix size when the algebra is sl(n); enables the matrix calculus
    /// and the defining representation.
    pub matrix_n: Option<usize>,
    pub potential: Option<GaugePotential>,
    pub group: Option<UnipotentGroup>,
    pub atlas: Option<TransitionData>,
    pub gauge: Vec<GroupElementField>,
}

fn parse_rat(text: &str) -> Result<Rat> {
    let p = parse_poly(text, 0)?;
    if p.total_degree() > 0 {
        return Err(Error::InvalidInput(format!(
            "expected a rational constant, got {text}"
        )));
    }
    Ok(p.constant_term())
}

fn build_algebra(spec: &AlgebraSpec) -> Result<(AlgebraRef, Option<usize>)> {
    match spec.kind.as_str() {
        "sl" => {
            let n = spec.n.ok_or_else(|| {
                Error::InvalidInput("lie_algebra kind \"sl\" needs a matrix size n".into())
            })?;
            Ok((Arc::new(make_sl(n)?), Some(n)))
        }
        "heisenberg" => Ok((Arc::new(make_heisenberg()), None)),
        "abelian" => {
            let dim = spec.dim.ok_or_else(|| {
                Error::InvalidInput("lie_algebra kind \"abelian\" needs a dim".into())
            })?;
            Ok((Arc::new(make_abelian(dim)), None))
        }
        "custom" => {
            let dim = spec.dim.ok_or_else(|| {
                Error::InvalidInput("lie_algebra kind \"custom\" needs a dim".into())
            })?;
            let entries = spec.constants.as_deref().unwrap_or(&[]);
            let mut c = vec![vec![vec![Rat::from_integer(0.into()); dim]; dim]; dim];
            for e in entries {
                let (i, j, k) = (e.i, e.j, e.k);
                for (label, idx) in [("i", i), ("j", j), ("k", k)] {
                    if idx == 0 || idx > dim {
                        return Err(Error::InvalidInput(format!(
                            "structure constant index {label} = {idx} out of range 1..={dim}"
                        )));
                    }
                }
                let value = parse_rat(&e.c)?;
                c[i - 1][j - 1][k - 1] = value.clone();
                c[j - 1][i - 1][k - 1] = -value;
            }
            Ok((Arc::new(LieAlgebra::new(dim, c, None)?), None))
        }
        other => Err(Error::InvalidInput(format!(
            "unknown lie_algebra kind {other:?} (expected sl, heisenberg, abelian, or custom)"
        ))),
    }
}

fn build_potential(
    spec: &PotentialSpec,
    d: usize,
    algebra: &AlgebraRef,
) -> Result<GaugePotential> {
    let m = algebra.dim;
    let mut legs = vec![GammaField::zero(m, d); d];
    for entry in &spec.entries {
        if entry.leg == 0 || entry.leg > d {
            return Err(Error::InvalidInput(format!(
                "potential leg {} out of range 1..={d}",
                entry.leg
            )));
        }
        if entry.basis == 0 || entry.basis > m {
            return Err(Error::InvalidInput(format!(
                "potential basis index {} out of range 1..={m}",
                entry.basis
            )));
        }
        let p = parse_poly(&entry.poly, d)?;
        legs[entry.leg - 1] =
            legs[entry.leg - 1].add(&GammaField::basis(m, entry.basis - 1, d).scale(&p));
    }
    GaugePotential::new(algebra.clone(), legs)
}

fn matrix_size(algebra: &AlgebraRef) -> Result<usize> {
    algebra
        .matrix_basis
        .as_ref()
        .map(|b| b[0].n)
        .ok_or_else(|| Error::InvalidInput("algebra carries no matrix basis".into()))
}

fn build_shear(n: usize, d: usize, row: usize, col: usize, poly: &str) -> Result<GroupElementField> {
    if row == 0 || row > n || col == 0 || col > n {
        return Err(Error::InvalidInput(format!(
            "shear position ({row}, {col}) out of range 1..={n}"
        )));
    }
    GroupElementField::shear(n, row - 1, col - 1, parse_poly(poly, d)?)
}

fn build_atlas(spec: &AtlasSpec, d: usize, algebra: &AlgebraRef) -> Result<TransitionData> {
    if spec.charts == 0 {
        return Err(Error::InvalidInput("atlas needs at least one chart".into()));
    }
    let charts: Vec<Chart> = (0..spec.charts)
        .map(|i| Chart::new(i, format!("U{}", i + 1)))
        .collect();
    match (&spec.shears, &spec.transitions) {
        (Some(shears), None) => {
            let n = matrix_size(algebra)?;
            let mut g: BTreeMap<(usize, usize), GroupElementField> = BTreeMap::new();
            for s in shears {
                for (label, id) in [("from", s.from), ("to", s.to)] {
                    if id == 0 || id > spec.charts {
                        return Err(Error::InvalidInput(format!(
                            "atlas shear chart {label} = {id} out of range 1..={}",
                            spec.charts
                        )));
                    }
                }
                let key = (s.from - 1, s.to - 1);
                if g.contains_key(&key) {
                    return Err(Error::InvalidInput(format!(
                        "duplicate atlas shear on charts ({}, {})",
                        s.from, s.to
                    )));
                }
                g.insert(key, build_shear(n, d, s.row, s.col, &s.poly)?);
            }
            // Complete composites along chains so a generating set such as
            // (1,2), (2,3) induces (1,3).
            loop {
                let mut added = Vec::new();
                for (&(i, j), gij) in &g {
                    for (&(j2, k), gjk) in &g {
                        if j2 != j || i == k || g.contains_key(&(i, k)) {
                            continue;
                        }
                        if added.iter().any(|(key, _)| *key == (i, k)) {
                            continue;
                        }
                        added.push(((i, k), gij.mul(gjk)));
                    }
                }
                if added.is_empty() {
                    break;
                }
                g.extend(added);
            }
            transitions_from_bundle(algebra.clone(), d, charts, &g)
        }
        (None, Some(transitions)) => {
            let m = algebra.dim;
            let mut pairs: BTreeMap<(usize, usize), Transition> = BTreeMap::new();
            for i in 0..spec.charts {
                pairs.insert((i, i), Transition::identity(d, m));
            }
            for t in transitions {
                for (label, id) in [("from", t.from), ("to", t.to)] {
                    if id == 0 || id > spec.charts {
                        return Err(Error::InvalidInput(format!(
                            "atlas transition chart {label} = {id} out of range 1..={}",
                            spec.charts
                        )));
                    }
                }
                let mut tr = Transition::identity(d, m);
                for e in &t.alpha {
                    for (label, idx) in [("source", e.source), ("target", e.target)] {
                        if idx == 0 || idx > m {
                            return Err(Error::InvalidInput(format!(
                                "alpha entry {label} = {idx} out of range 1..={m}"
                            )));
                        }
                    }
                    let p = parse_poly(&e.poly, d)?;
                    tr.alpha[e.source - 1] = tr.alpha[e.source - 1]
                        .add(&GammaField::basis(m, e.target - 1, d).scale(&p));
                }
                for e in &t.chi {
                    if e.coord == 0 || e.coord > d {
                        return Err(Error::InvalidInput(format!(
                            "chi entry coord = {} out of range 1..={d}",
                            e.coord
                        )));
                    }
                    if e.basis == 0 || e.basis > m {
                        return Err(Error::InvalidInput(format!(
                            "chi entry basis = {} out of range 1..={m}",
                            e.basis
                        )));
                    }
                    let p = parse_poly(&e.poly, d)?;
                    tr.chi[e.coord - 1] =
                        tr.chi[e.coord - 1].add(&GammaField::basis(m, e.basis - 1, d).scale(&p));
                }
                pairs.insert((t.from - 1, t.to - 1), tr);
            }
            Ok(TransitionData {
                algebra: algebra.clone(),
                d,
                charts,
                pairs,
            })
        }
        (Some(_), Some(_)) => Err(Error::InvalidInput(
            "atlas gives both shears and direct transitions; pick one".into(),
        )),
        (None, None) => Err(Error::InvalidInput(
            "atlas needs either shears or direct transitions".into(),
        )),
    }
}

impl Instance {
    /// Build and validate every object the scenario references.
    pub fn build(scenario: &Scenario) -> Result<Self> {
        let d = scenario.base.dim;
        if d == 0 || d > 6 {
            return Err(Error::InvalidInput(format!(
                "base dim {d} out of the supported range 1..=6"
            )));
        }
        let (algebra, matrix_n) = build_algebra(&scenario.lie_algebra)?;
        if !validate_jacobi(&algebra) {
            return Err(Error::InvalidInput(
                "lie_algebra structure constants violate the Jacobi identity".into(),
            ));
        }
        let potential = scenario
            .potential
            .as_ref()
            .map(|p| build_potential(p, d, &algebra))
            .transpose()?;
        let group = scenario
            .group
            .as_ref()
            .map(|g| UnipotentGroup::full_upper(g.n))
            .transpose()?;
        let atlas = scenario
            .atlas
            .as_ref()
            .map(|a| build_atlas(a, d, &algebra))
            .transpose()?;
        let gauge = match &scenario.gauge {
            None => Vec::new(),
            Some(spec) => {
                let n = matrix_size(&algebra)?;
                spec.shears
                    .iter()
                    .map(|s| build_shear(n, d, s.row, s.col, &s.poly))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Instance {
            name: scenario.name.clone(),
            d,
            degree_cap: scenario.base.degree_cap,
            algebra,
            matrix_n,
            potential,
            group,
            atlas,
            gauge,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_a_full_scenario() {
        let text = r#"
name = "demo"
seed = 7
samples = 5
checks = ["d_squared"]

[base]
dim = 2
degree_cap = 6

[lie_algebra]
kind = "sl"
n = 2

[potential]
entries = [{ leg = 2, basis = 1, poly = "x1" }]

[group]
n = 3

[atlas]
charts = 3
shears = [
    { from = 1, to = 2, row = 1, col = 2, poly = "x1" },
    { from = 2, to = 3, row = 2, col = 1, poly = "x2" },
]

[gauge]
shears = [{ row = 1, col = 2, poly = "x2" }]
"#;
        let scenario = Scenario::from_str(text).unwrap();
        assert_eq!(scenario.seed, 7);
        let instance = Instance::build(&scenario).unwrap();
        assert_eq!(instance.d, 2);
        assert_eq!(instance.matrix_n, Some(2));
        assert!(instance.potential.is_some());
        assert_eq!(instance.group.as_ref().unwrap().dim(), 3);
        let atlas = instance.atlas.as_ref().unwrap();
        // The chain (1,2), (2,3) induces the composite overlap (1,3).
        assert!(atlas.pairs.contains_key(&(0, 2)));
        assert_eq!(instance.gauge.len(), 1);
    }

    #[test]
    fn defaults_and_parse_errors() {
        let minimal = r#"
name = "tiny"
checks = []

[base]
dim = 2

[lie_algebra]
kind = "heisenberg"
"#;
        let scenario = Scenario::from_str(minimal).unwrap();
        assert_eq!(scenario.seed, 0);
        assert_eq!(scenario.samples, 25);
        let instance = Instance::build(&scenario).unwrap();
        assert_eq!(instance.degree_cap, crate::DEFAULT_DEGREE_CAP);
        assert!(instance.potential.is_none());

        let err = Scenario::from_str("name = \"broken\"").unwrap_err();
        assert!(err.to_string().contains("parse error"));
    }

    #[test]
    fn custom_algebra_requires_jacobi() {
        // [e1,e2] = e3 with [e2,e3] = e2 leaves a Jacobi defect -e3.
        let text = r#"
name = "bad_jacobi"
checks = []

[base]
dim = 2

[lie_algebra]
kind = "custom"
dim = 3
constants = [
    { i = 1, j = 2, k = 3, c = "1" },
    { i = 2, j = 3, k = 2, c = "1" },
]
"#;
        let scenario = Scenario::from_str(text).unwrap();
        let err = Instance::build(&scenario).unwrap_err();
        assert!(err.to_string().contains("Jacobi"));

        // Dropping the second bracket leaves a Heisenberg-type algebra.
        let good = text.replace("    { i = 2, j = 3, k = 2, c = \"1\" },\n", "");
        let scenario = Scenario::from_str(&good).unwrap();
        assert!(Instance::build(&scenario).is_ok());
    }

    #[test]
    fn direct_transition_payloads_build() {
        let text = r#"
name = "direct"
checks = []

[base]
dim = 2

[lie_algebra]
kind = "sl"
n = 2

[atlas]
charts = 2
transitions = [
    { from = 1, to = 2, chi = [{ coord = 1, basis = 1, poly = "-1" }] },
]
"#;
        let scenario = Scenario::from_str(text).unwrap();
        let instance = Instance::build(&scenario).unwrap();
        let atlas = instance.atlas.as_ref().unwrap();
        let tr = &atlas.pairs[&(0, 1)];
        assert!(!tr.chi[0].is_zero());
        assert!(tr.chi[1].is_zero());
    }
}
