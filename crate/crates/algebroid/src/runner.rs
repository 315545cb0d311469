//! Scenario runner: resolve a scenario's check list, execute every check
//! against the built instance, and render a deterministic report.
//!
//! Configuration problems — unparseable scenarios, unknown check names,
//! unmet requirements, degree-cap overflows — surface as errors before or
//! during the run. A failed identity is never an error: it lands in the
//! report as a fail line with a witness.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checks::{find, seed_for, CheckDef};
use crate::error::{Error, Result};
use crate::parallel::maybe_par_map;
use crate::scenario::{Instance, Scenario};

/// Command-line overrides layered on top of the scenario file.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub degree_cap: Option<u32>,
    pub jobs: Option<usize>,
}

/// Outcome of one check. The elapsed time is kept out of the serialized
/// report so repeated runs stay byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    pub elapsed_micros: u128,
}

/// Full deterministic report for one scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// Resolve every requested check name and verify the instance provides
/// what each check needs; all resolution problems are configuration errors.
pub fn resolve_checks(scenario: &Scenario, inst: &Instance) -> Result<Vec<&'static CheckDef>> {
    if scenario.checks.is_empty() {
        return Err(Error::InvalidInput(format!(
            "scenario {:?} lists no checks",
            scenario.name
        )));
    }
    let defs = scenario
        .checks
        .iter()
        .map(|name| {
            find(name).ok_or_else(|| Error::InvalidInput(format!("unknown check name {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    for def in &defs {
        if let Some(msg) = def.unmet_requirement(inst) {
            return Err(Error::InvalidInput(msg));
        }
    }
    Ok(defs)
}

/// Run every check of the scenario and collect the report, in the order
/// the scenario lists them.
pub fn run_scenario(scenario: &Scenario, config: &RunConfig) -> Result<Report> {
    let inst = Instance::build(scenario)?;
    let defs = resolve_checks(scenario, &inst)?;
    let seed = config.seed.unwrap_or(scenario.seed);
    let samples = config.samples.unwrap_or(scenario.samples);
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    crate::set_degree_cap(config.degree_cap.unwrap_or(inst.degree_cap));

    let outcomes = maybe_par_map(defs, config.jobs, |def| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(seed, def.name));
        let outcome = def.execute(&inst, &mut rng, samples);
        (def.name, outcome, start.elapsed().as_micros())
    });

    let mut checks = Vec::with_capacity(outcomes.len());
    for (name, outcome, elapsed_micros) in outcomes {
        let outcome = outcome.map_err(|e| match e {
            Error::DegreeCap { degree, cap } => Error::InvalidInput(format!(
                "check {name} exceeds the degree cap: total degree {degree}, cap {cap}"
            )),
            other => other,
        })?;
        checks.push(CheckReport {
            name,
            pass: outcome.pass,
            witness: outcome.witness,
            elapsed_micros,
        });
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(Report {
        scenario: scenario.name.clone(),
        seed,
        samples,
        checks,
        passed,
    })
}

/// Line-oriented plain-text rendering; stable across runs with the same
/// inputs.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", report.scenario));
    out.push_str(&format!("seed: {}\n", report.seed));
    out.push_str(&format!("samples: {}\n", report.samples));
    for check in &report.checks {
        let status = if check.pass { "pass" } else { "fail" };
        out.push_str(&format!("check: {} status: {}\n", check.name, status));
        if let Some(witness) = &check.witness {
            out.push_str(&format!("  witness: {witness}\n"));
        }
    }
    let verdict = if report.passed { "pass" } else { "fail" };
    out.push_str(&format!("result: {verdict}\n"));
    out
}

/// JSON rendering of the same report.
pub fn render_json(report: &Report) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms_scenario(checks: &str) -> Scenario {
        let text = format!(
            r#"
name = "runner"
seed = 9
samples = 2
checks = [{checks}]

[base]
dim = 2

[lie_algebra]
kind = "heisenberg"
"#
        );
        Scenario::from_str(&text).unwrap()
    }

    #[test]
    fn reports_are_deterministic_and_job_independent() {
        let scenario = forms_scenario("\"d_squared\", \"cartan_relations\", \"maurer_cartan_theta\"");
        let first = run_scenario(&scenario, &RunConfig::default()).unwrap();
        let second = run_scenario(&scenario, &RunConfig::default()).unwrap();
        assert_eq!(render_text(&first), render_text(&second));
        assert_eq!(render_json(&first), render_json(&second));
        let sequential = run_scenario(
            &scenario,
            &RunConfig {
                jobs: Some(1),
                ..RunConfig::default()
            },
        )
        .unwrap();
        assert_eq!(render_text(&first), render_text(&sequential));
        assert!(first.passed);
        assert_eq!(first.checks.len(), 3);
        assert_eq!(first.checks[0].name, "d_squared");
    }

    #[test]
    fn unknown_names_and_unmet_needs_are_errors() {
        let scenario = forms_scenario("\"no_such_check\"");
        let err = run_scenario(&scenario, &RunConfig::default()).unwrap_err();
        assert!(err.to_string().contains("unknown check name"));

        let scenario = forms_scenario("\"maurer_cartan_matrix\"");
        let err = run_scenario(&scenario, &RunConfig::default()).unwrap_err();
        assert!(err.to_string().contains("sl(n)"));

        let scenario = forms_scenario("");
        let err = run_scenario(&scenario, &RunConfig::default()).unwrap_err();
        assert!(err.to_string().contains("lists no checks"));
    }

    #[test]
    fn witnesses_render_on_failures() {
        let report = Report {
            scenario: "demo".into(),
            seed: 0,
            samples: 1,
            checks: vec![CheckReport {
                name: "bianchi",
                pass: false,
                witness: Some("defect e1".into()),
                elapsed_micros: 0,
            }],
            passed: false,
        };
        let text = render_text(&report);
        assert!(text.contains("check: bianchi status: fail"));
        assert!(text.contains("  witness: defect e1"));
        assert!(text.ends_with("result: fail\n"));
        assert!(!render_json(&report).contains("elapsed"));
    }
}
