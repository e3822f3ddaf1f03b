//! Scenario harness: each scenario rebuilds a statement about sums,
//! sections or a named example on concrete spaces and records one row per
//! asserted relation, together with the witnesses needed to re-check it.

mod format;
mod params;
mod scenarios;
mod sweep;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use format::{fixed12, sci12};
pub use scenarios::estimate_index;
pub use sweep::{sweep, SweepFamily, SweepRow};

use crate::error::{Error, Result};
use crate::parallel::par_map;

/// The bundled suite reproducing every in-scope statement.
pub const PAPER_CORE: &str = include_str!("../../suites/paper-core.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// Lifting a summand's witness bounds the index of the sum from above.
    #[serde(rename = "thm_2_1_upper")]
    LiftUpper,
    /// `ℓ1`/`ℓ∞` sums have the minimum index of their summands.
    #[serde(rename = "cor_2_7_equality")]
    L1LinfEquality,
    /// Sums over an outer norm of index one have the minimum index.
    #[serde(rename = "cor_2_9a_equality")]
    IndexOneOuterEquality,
    /// The `Φ`/`Ψ`/`S` construction moving operators to a summand.
    #[serde(rename = "thm_2_5_transfer")]
    Transfer,
    /// Index of a space against an increasing chain of coordinate sections.
    #[serde(rename = "thm_4_1_limsup")]
    ChainLimsup,
    /// `n(ℓ_p^m(X))` is non-increasing in `m`.
    #[serde(rename = "prop_6_1a_monotone")]
    LpMonotone,
    /// Max-of-Euclidean-pairs norm on `R³`.
    #[serde(rename = "example_3_2")]
    MaxPairs,
    /// Five-dimensional polyhedral norm and its four-dimensional section.
    #[serde(rename = "example_3_3")]
    Polyhedral5,
    /// Lorentz-type family `X_p` and its planar sections.
    #[serde(rename = "example_3_4_sweep")]
    LorentzSweep,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::LiftUpper => "thm_2_1_upper",
            ScenarioKind::L1LinfEquality => "cor_2_7_equality",
            ScenarioKind::IndexOneOuterEquality => "cor_2_9a_equality",
            ScenarioKind::Transfer => "thm_2_5_transfer",
            ScenarioKind::ChainLimsup => "thm_4_1_limsup",
            ScenarioKind::LpMonotone => "prop_6_1a_monotone",
            ScenarioKind::MaxPairs => "example_3_2",
            ScenarioKind::Polyhedral5 => "example_3_3",
            ScenarioKind::LorentzSweep => "example_3_4_sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub parameters: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub scenarios: Vec<Scenario>,
}

impl Suite {
    pub fn from_json(text: &str) -> Result<Self> {
        let suite: Suite = serde_json::from_str(text)?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &suite.scenarios {
            if s.id.is_empty() || s.id.contains(',') || s.id.contains('/') {
                return Err(Error::InvalidArgument(format!(
                    "bad scenario id `{}`",
                    s.id
                )));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate scenario id `{}`",
                    s.id
                )));
            }
        }
        Ok(suite)
    }

    pub fn paper_core() -> Self {
        Self::from_json(PAPER_CORE).expect("bundled suite parses")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs + tolerance`
    Le,
    /// `lhs ≥ rhs − tolerance`
    Ge,
    /// `|lhs − rhs| ≤ tolerance`
    Eq,
    /// `lhs > rhs + tolerance`
    Gt,
    /// `lhs < rhs − tolerance`
    Lt,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
            Relation::Gt => "gt",
            Relation::Lt => "lt",
        }
    }

    pub fn holds(&self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Gt => lhs > rhs + tol,
            Relation::Lt => lhs < rhs - tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub id: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Key into the report's witness map.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub id: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub runtime_ms: u64,
    pub assertions: Vec<Assertion>,
    /// Named numeric results (estimates, bounds, ranks).
    pub values: BTreeMap<String, f64>,
    /// Operators, pairs and estimates referenced by the assertions.
    pub witnesses: BTreeMap<String, Value>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// Collects assertions and witnesses while a scenario runs.
#[derive(Debug)]
pub(crate) struct Recorder {
    assertions: Vec<Assertion>,
    values: BTreeMap<String, f64>,
    witnesses: BTreeMap<String, Value>,
}

impl Recorder {
    fn new() -> Self {
        Self {
            assertions: Vec::new(),
            values: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        id: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tol: f64,
        witness: Option<&str>,
    ) -> bool {
        let pass = relation.holds(lhs, rhs, tol);
        self.assertions.push(Assertion {
            id: id.into(),
            relation,
            lhs,
            rhs,
            tolerance: tol,
            pass,
            witness: witness.map(str::to_string),
        });
        pass
    }

    pub(crate) fn value(&mut self, key: impl Into<String>, v: f64) {
        self.values.insert(key.into(), v);
    }

    pub(crate) fn witness<T: Serialize>(&mut self, key: impl Into<String>, w: &T) {
        let v = serde_json::to_value(w).expect("witness serializes");
        self.witnesses.insert(key.into(), v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Seed for scenarios that do not set their own.
    pub seed: u64,
    /// Fill the `runtime_ms` CSV column (makes the CSV run-dependent).
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub reports: Vec<ScenarioReport>,
}

pub fn run_scenario(s: &Scenario, default_seed: u64) -> Result<ScenarioReport> {
    let seed = params::seed(&s.parameters, default_seed)?;
    let start = Instant::now();
    let mut rec = Recorder::new();
    scenarios::run(s.kind, &s.parameters, seed, &mut rec).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("scenario {}: {m}", s.id)),
        Error::Descriptor(m) => Error::Descriptor(format!("scenario {}: {m}", s.id)),
        other => other,
    })?;
    Ok(ScenarioReport {
        id: s.id.clone(),
        kind: s.kind,
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        assertions: rec.assertions,
        values: rec.values,
        witnesses: rec.witnesses,
    })
}

/// Runs every scenario (in parallel when enabled) and orders the reports
/// by id.
pub fn run_suite(suite: &Suite, opts: &RunOptions) -> Result<SuiteReport> {
    let results = par_map(&suite.scenarios, |s| run_scenario(s, opts.seed));
    let mut reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SuiteReport {
        seed: opts.seed,
        reports,
    })
}

pub const CSV_HEADER: &str =
    "scenario_id,assertion_id,kind,lhs,rhs,tolerance,pass,witness_path,seed,runtime_ms";

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ScenarioReport::passed)
    }

    /// `(scenario id, assertion id)` of every failing row.
    pub fn failures(&self) -> Vec<(String, String)> {
        self.reports
            .iter()
            .flat_map(|r| {
                r.assertions
                    .iter()
                    .filter(|a| !a.pass)
                    .map(move |a| (r.id.clone(), a.id.clone()))
            })
            .collect()
    }

    /// One row per assertion. `kind` is the relation; `witness_path` points
    /// into the JSON sidecar as `<scenario id>/<witness key>`.
    pub fn to_csv(&self, timings: bool) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.reports {
            for a in &r.assertions {
                let path = a
                    .witness
                    .as_ref()
                    .map(|w| format!("{}/{}", r.id, w))
                    .unwrap_or_default();
                let runtime = if timings {
                    r.runtime_ms.to_string()
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.id,
                    a.id,
                    a.relation.as_str(),
                    sci12(a.lhs),
                    sci12(a.rhs),
                    sci12(a.tolerance),
                    a.pass,
                    path,
                    r.seed,
                    runtime
                );
            }
        }
        out
    }

    /// Full report with values and witnesses. Runtimes are dropped unless
    /// `timings` is set, so the sidecar is as reproducible as the CSV.
    pub fn to_json(&self, timings: bool) -> Result<String> {
        let mut copy = self.clone();
        if !timings {
            copy.reports.iter_mut().for_each(|r| r.runtime_ms = 0);
        }
        Ok(serde_json::to_string_pretty(&copy)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_suite_parses_and_covers_every_kind() {
        let s = Suite::paper_core();
        for k in [
            ScenarioKind::LiftUpper,
            ScenarioKind::L1LinfEquality,
            ScenarioKind::IndexOneOuterEquality,
            ScenarioKind::Transfer,
            ScenarioKind::ChainLimsup,
            ScenarioKind::LpMonotone,
            ScenarioKind::MaxPairs,
            ScenarioKind::Polyhedral5,
            ScenarioKind::LorentzSweep,
        ] {
            assert!(s.scenarios.iter().any(|x| x.kind == k), "{}", k.as_str());
        }
    }

    #[test]
    fn suite_validation() {
        assert!(Suite::from_json(r#"{"scenarios":[{"id":"a","kind":"nope"}]}"#).is_err());
        let dup =
            r#"{"scenarios":[{"id":"a","kind":"example_3_3"},{"id":"a","kind":"example_3_3"}]}"#;
        assert!(Suite::from_json(dup).is_err());
        let bad = r#"{"scenarios":[{"id":"a,b","kind":"example_3_3"}]}"#;
        assert!(Suite::from_json(bad).is_err());
    }

    #[test]
    fn relations() {
        assert!(Relation::Le.holds(1.0, 1.0, 0.0));
        assert!(!Relation::Le.holds(1.1, 1.0, 0.05));
        assert!(Relation::Ge.holds(0.96, 1.0, 0.05));
        assert!(Relation::Eq.holds(1.0, 1.04, 0.05));
        assert!(!Relation::Gt.holds(1.0, 1.0, 0.0));
    }
}
