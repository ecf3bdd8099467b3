//! Randomized and curated lemma suites with replayable JSON reports.

pub mod corpus;
pub mod json;
pub mod random;
mod suites;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::caps::Caps;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    /// Every check is supposed to hold.
    Pass,
    /// The suite demonstrates a statement that is false; it must produce
    /// failures.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureRecord {
    pub claim: String,
    /// `None` for curated instances.
    pub trial: Option<usize>,
    pub instance: Value,
    pub witness: Value,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite_name: String,
    pub seed: u64,
    pub trials: usize,
    pub expectation: Expectation,
    /// Number of checks that were actually evaluated.
    pub checks: usize,
    pub failures: Vec<FailureRecord>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn as_expected(&self) -> bool {
        match self.expectation {
            Expectation::Pass => self.failures.is_empty(),
            Expectation::Fail => !self.failures.is_empty(),
        }
    }
}

#[derive(Serialize)]
struct ReportView<'a> {
    schema_version: &'static str,
    suite: &'a str,
    seed: u64,
    trials: usize,
    expectation: Expectation,
    as_expected: bool,
    checks: usize,
    failures: &'a [FailureRecord],
}

/// Pretty JSON with a fixed field order. The elapsed time is left out so that
/// equal runs give identical bytes.
pub fn emit_report(report: &SuiteReport) -> String {
    let view = ReportView {
        schema_version: SCHEMA_VERSION,
        suite: &report.suite_name,
        seed: report.seed,
        trials: report.trials,
        expectation: report.expectation,
        as_expected: report.as_expected(),
        checks: report.checks,
        failures: &report.failures,
    };
    serde_json::to_string_pretty(&view).expect("plain data serializes")
}

/// Collects the outcome of the checks made in one trial.
pub(crate) struct Trial {
    index: Option<usize>,
    checks: usize,
    failures: Vec<FailureRecord>,
}

impl Trial {
    fn new(index: Option<usize>) -> Trial {
        Trial { index, checks: 0, failures: Vec::new() }
    }

    /// Records one check; the instance and witness are only built on failure.
    pub(crate) fn check(
        &mut self,
        claim: &str,
        ok: bool,
        instance: impl FnOnce() -> Value,
        witness: impl FnOnce() -> Value,
    ) {
        self.checks += 1;
        if !ok {
            self.failures.push(FailureRecord {
                claim: claim.to_string(),
                trial: self.index,
                instance: instance(),
                witness: witness(),
            });
        }
    }

    fn engine_error(&mut self, err: &Error) {
        self.failures.push(FailureRecord {
            claim: "engine-error".to_string(),
            trial: self.index,
            instance: Value::Null,
            witness: Value::from(err.to_string()),
        });
    }
}

type RandomTrial = fn(&mut random::TrialRng, &Caps, &mut Trial) -> Result<()>;
type FixedCases = fn(&Caps, &mut Trial) -> Result<()>;

pub(crate) struct Suite {
    pub name: &'static str,
    pub default_trials: usize,
    pub expectation: Expectation,
    pub random: Option<RandomTrial>,
    pub fixed: Option<FixedCases>,
}

pub fn suite_names() -> Vec<&'static str> {
    suites::SUITES.iter().map(|s| s.name).collect()
}

pub fn default_trials(name: &str) -> Option<usize> {
    suites::SUITES.iter().find(|s| s.name == name).map(|s| s.default_trials)
}

/// Runs the curated cases of a suite and `trials` random trials. Trials run
/// in parallel; failures are ordered by trial index.
pub fn run_suite(name: &str, seed: u64, trials: usize, caps: &Caps) -> Result<SuiteReport> {
    let suite = suites::SUITES.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownSuite {
        name: name.to_string(),
        available: suite_names().iter().map(|s| s.to_string()).collect(),
    })?;
    let start = Instant::now();
    let mut outcomes = Vec::new();
    if let Some(fixed) = suite.fixed {
        let mut t = Trial::new(None);
        if let Err(e) = fixed(caps, &mut t) {
            t.engine_error(&e);
        }
        outcomes.push(t);
    }
    let trials = if suite.random.is_some() { trials } else { 0 };
    if let Some(random_trial) = suite.random {
        let results: Vec<Trial> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = random::trial_rng(seed, i);
                let mut t = Trial::new(Some(i));
                if let Err(e) = random_trial(&mut rng, caps, &mut t) {
                    t.engine_error(&e);
                }
                t
            })
            .collect();
        outcomes.extend(results);
    }
    Ok(SuiteReport {
        suite_name: suite.name.to_string(),
        seed,
        trials,
        expectation: suite.expectation,
        checks: outcomes.iter().map(|t| t.checks).sum(),
        failures: outcomes.into_iter().flat_map(|t| t.failures).collect(),
        elapsed: start.elapsed(),
    })
}
