//! Experiment configurations and their JSON reports.
//!
//! A report is a pure function of its [`RunConfig`] except for the
//! `timings` block. Trials run in parallel; trial `t` uses the seed
//! [`trial_seed`]`(seed, t)` and results are stored in trial order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{is_prime, FieldCtx, FieldElem};
use crate::sampler::{self, default_precision, Mode, SampleConfig, SamplePoint, VerifyReport};
use crate::seeds::{rng_from_seed, trial_seed};
use crate::semilinear::{self, is_fp2_independent, level_exponents, unknown_count, SemilinearSystem};
use crate::stabilizer::{self, AutContext, ClaimConfig, DigitGrid, StabilizerReport, DEFAULT_BUDGET};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Verify,
    Stabilizer,
    Claim,
    Count,
    Scalars,
}

impl Command {
    pub fn default_trials(self) -> u64 {
        match self {
            Command::Claim => 50,
            Command::Scalars => 20,
            _ => 1,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Sample => "sample",
            Command::Verify => "verify",
            Command::Stabilizer => "stabilizer",
            Command::Claim => "claim",
            Command::Count => "count",
            Command::Scalars => "scalars",
        })
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Command> {
        Ok(match s {
            "sample" => Command::Sample,
            "verify" => Command::Verify,
            "stabilizer" => Command::Stabilizer,
            "claim" => Command::Claim,
            "count" => Command::Count,
            "scalars" => Command::Scalars,
            other => return Err(Error::InvalidArgument(format!("unknown command {other}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub g: usize,
    pub p: u64,
    pub k: usize,
    pub s: u32,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    /// Pi-precision of the model; `g + 1` when absent.
    pub precision: Option<u32>,
    /// Enumeration budget, `log_2` of the candidates per layer.
    pub budget: u32,
    /// Random `x` per sample for `scalars`.
    pub scalar_draws: usize,
}

impl RunConfig {
    pub fn new(command: Command, g: usize, p: u64) -> RunConfig {
        RunConfig {
            command,
            g,
            p,
            k: g,
            s: 2.min(g as u32),
            mode: Mode::Polarized,
            trials: command.default_trials(),
            seed: 0,
            precision: None,
            budget: DEFAULT_BUDGET,
            scalar_draws: 100,
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision.unwrap_or(default_precision(self.g))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.g < 2 {
            return bad(format!("g = {} must be at least 2", self.g));
        }
        if !is_prime(self.p) {
            return bad(format!("p = {} is not prime", self.p));
        }
        if self.k < self.g {
            return bad(format!("k = {} must be at least g = {}", self.k, self.g));
        }
        if self.s == 0 || self.s + 1 > self.precision() {
            return bad(format!(
                "s = {} must lie in 1..={}",
                self.s,
                self.precision() - 1
            ));
        }
        if self.precision() < self.g as u32 {
            return bad(format!("precision {} is below g", self.precision()));
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.budget > 40 {
            return bad(format!("budget {} exceeds 40", self.budget));
        }
        Ok(())
    }

    fn sample_config(&self) -> SampleConfig {
        SampleConfig {
            precision: self.precision,
            ..SampleConfig::default()
        }
    }

    fn claim_config(&self) -> ClaimConfig {
        ClaimConfig {
            k: self.k,
            budget: self.budget,
            sample: self.sample_config(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub coeffs: Vec<FieldElem>,
    pub exps: Vec<u32>,
    pub count: u128,
    /// `prod_j p^j`.
    pub expected: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarsResult {
    pub checked: usize,
    pub failures: usize,
    /// Pi-adic digits of the first failing `x`.
    pub first_failure: Option<Vec<FieldElem>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<SamplePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<StabilizerReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<CountResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalars: Option<ScalarsResult>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialResult {
    fn new(trial: u64, seed: u64) -> TrialResult {
        TrialResult {
            trial,
            seed,
            ..TrialResult::default()
        }
    }

    /// Short label used for the class histogram.
    pub fn label(&self) -> String {
        if self.error.is_some() {
            return "error".into();
        }
        match &self.stabilizer {
            Some(r) if r.enumeration_skipped => "skipped".into(),
            Some(r) => r.classification.name().into(),
            None if self.pass => "pass".into(),
            None => "fail".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: u64,
    pub passes: u64,
    pub pass_fraction: f64,
    pub first_witness: Option<u64>,
    pub class_counts: Vec<(String, u64)>,
    /// Group orders of the stabilizer trials, in trial order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<Option<u64>>,
}

/// Wall-clock data; not covered by the determinism contract.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u64,
    pub trial_ms: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    /// Coefficients (low degree first) of the modulus of `F_{p^{2k}}`.
    pub field_modulus: Vec<u64>,
    pub pass: bool,
    pub summary: Summary,
    pub results: Vec<TrialResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing block; identical configs give identical bytes.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.timings = None;
        r.to_json()
    }

    pub fn from_json(s: &str) -> Result<Report> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }

    /// One line per fact, for standard output.
    pub fn text_summary(&self) -> String {
        let c = &self.config;
        if c.command == Command::Count {
            let counts: Vec<u128> = self
                .results
                .iter()
                .filter_map(|r| r.count.as_ref().map(|x| x.count))
                .collect();
            if !counts.is_empty() && counts.iter().all(|&x| x == counts[0]) {
                return format!("{}\n", counts[0]);
            }
        }
        let mut out = format!(
            "{} g={} p={} k={} s={} mode={} seed={}: {}/{} pass",
            c.command, c.g, c.p, c.k, c.s, c.mode, c.seed, self.summary.passes, self.summary.trials
        );
        let hist: Vec<String> = self
            .summary
            .class_counts
            .iter()
            .map(|(n, k)| format!("{n}: {k}"))
            .collect();
        out.push_str(&format!(" ({})", hist.join(", ")));
        if let Some(w) = self.summary.first_witness {
            out.push_str(&format!(", first witness trial {w}"));
        }
        out.push('\n');
        for r in &self.results {
            if let Some(e) = &r.error {
                out.push_str(&format!("trial {}: {e}\n", r.trial));
            }
        }
        out
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let t = Instant::now();
    let x = f();
    (x, t.elapsed().as_millis() as u64)
}

fn fail(mut r: TrialResult, e: Error) -> TrialResult {
    r.pass = false;
    r.error = Some(e.to_string());
    r
}

fn sample_trial(cfg: &RunConfig, t: u64) -> TrialResult {
    let seed = trial_seed(cfg.seed, t);
    let r = TrialResult::new(t, seed);
    match sampler::sample(cfg.g, cfg.p, cfg.k, cfg.mode, seed, &cfg.sample_config()) {
        Ok(pt) => TrialResult {
            point: Some(pt),
            pass: true,
            ..r
        },
        Err(e) => fail(r, e),
    }
}

fn verify_point(pt: &SamplePoint) -> Result<VerifyReport> {
    let model = pt.model()?;
    let v = pt.vector(&model)?;
    Ok(sampler::verify_point(&model, &v, pt.mode))
}

fn verify_trial(cfg: &RunConfig, t: u64) -> TrialResult {
    let mut r = sample_trial(cfg, t);
    if let Some(pt) = &r.point {
        match verify_point(pt) {
            Ok(rep) => {
                r.pass = rep.pass;
                r.verify = Some(rep);
            }
            Err(e) => return fail(r, e),
        }
    }
    r
}

fn stabilizer_trial(cfg: &RunConfig, t: u64) -> TrialResult {
    let seed = trial_seed(cfg.seed, t);
    let r = TrialResult::new(t, seed);
    match stabilizer::run_trial(cfg.g, cfg.p, cfg.s, cfg.mode, seed, &cfg.claim_config()) {
        Ok((pt, rep)) => TrialResult {
            point: Some(pt),
            pass: rep.pass,
            stabilizer: Some(rep),
            ..r
        },
        Err(e) => fail(r, e),
    }
}

fn count_trial(cfg: &RunConfig, f: &FieldCtx, t: u64) -> TrialResult {
    let seed = trial_seed(cfg.seed, t);
    let r = TrialResult::new(t, seed);
    let mut rng = rng_from_seed(seed);
    let n = unknown_count(cfg.g);
    let coeffs = loop {
        let xs: Vec<FieldElem> = (0..n).map(|_| f.random(&mut rng)).collect();
        if is_fp2_independent(f, &xs) {
            break xs;
        }
    };
    let sys = SemilinearSystem::homogeneous(f, cfg.g, coeffs.clone());
    let exps = level_exponents(cfg.g, 0);
    let expected = exps.iter().map(|&j| (cfg.p as u128).pow(j)).product();
    match semilinear::count_homogeneous(f, &sys) {
        Ok(count) => TrialResult {
            pass: count == expected,
            count: Some(CountResult {
                coeffs,
                exps,
                count,
                expected,
            }),
            ..r
        },
        Err(e) => fail(r, e),
    }
}

fn scalars_trial(cfg: &RunConfig, t: u64) -> TrialResult {
    let mut r = sample_trial(cfg, t);
    let Some(pt) = r.point.clone() else {
        return r;
    };
    let run = || -> Result<ScalarsResult> {
        let model = pt.model()?;
        let v = pt.vector(&model)?;
        let m = model.dieudonne_span(&v)?;
        let ctx = AutContext::new(&model)?;
        let w = ctx.small().clone();
        let n = model.precision();
        let p = w.pc_int(cfg.p as i64, n);
        let one = w.pc_int(1, n);
        let mut rng = rng_from_seed(r.seed ^ 0x5ca1a75);
        let mut failures = 0;
        let mut first_failure = None;
        for _ in 0..cfg.scalar_draws {
            let x = ctx.random_od(n, &mut rng);
            let lambda = w.pc_add(&one, &w.pc_mul(&p, &x));
            if !stabilizer::scalar_action_check(&ctx, &m, &lambda, &v) {
                failures += 1;
                first_failure.get_or_insert_with(|| w.pi_digits(&x));
            }
        }
        Ok(ScalarsResult {
            checked: cfg.scalar_draws,
            failures,
            first_failure,
        })
    };
    match run() {
        Ok(s) => {
            r.pass = s.failures == 0;
            r.scalars = Some(s);
            r
        }
        Err(e) => fail(r, e),
    }
}

fn summarize(cfg: &RunConfig, results: &[TrialResult]) -> (Summary, bool) {
    let trials = results.len() as u64;
    let passes = results.iter().filter(|r| r.pass).count() as u64;
    let mut class_counts: Vec<(String, u64)> = vec![];
    for r in results {
        let l = r.label();
        match class_counts.iter_mut().find(|(n, _)| *n == l) {
            Some((_, c)) => *c += 1,
            None => class_counts.push((l, 1)),
        }
    }
    class_counts.sort();
    let orders = results
        .iter()
        .filter_map(|r| r.stabilizer.as_ref().map(|s| s.order))
        .collect();
    let pass = match cfg.command {
        Command::Claim => passes > 0,
        _ => passes == trials,
    };
    let summary = Summary {
        trials,
        passes,
        pass_fraction: if trials == 0 { 0.0 } else { passes as f64 / trials as f64 },
        first_witness: results.iter().find(|r| r.pass).map(|r| r.trial),
        class_counts,
        orders,
    };
    (summary, pass)
}

fn assemble(cfg: &RunConfig, modulus: Vec<u64>, timed_results: Vec<(TrialResult, u64)>, total_ms: u64) -> Report {
    let (results, trial_ms): (Vec<TrialResult>, Vec<u64>) = timed_results.into_iter().unzip();
    let (summary, pass) = summarize(cfg, &results);
    Report {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        field_modulus: modulus,
        pass,
        summary,
        results,
        timings: Some(Timings { total_ms, trial_ms }),
    }
}

/// Run an experiment. `verify` samples fresh points; use [`verify_report`]
/// to re-check the points stored in an earlier report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let f = FieldCtx::new(cfg.p, cfg.k)?;
    let (results, total) = timed(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                timed(|| match cfg.command {
                    Command::Sample => sample_trial(cfg, t),
                    Command::Verify => verify_trial(cfg, t),
                    Command::Stabilizer | Command::Claim => stabilizer_trial(cfg, t),
                    Command::Count => count_trial(cfg, &f, t),
                    Command::Scalars => scalars_trial(cfg, t),
                })
            })
            .collect::<Vec<_>>()
    });
    Ok(assemble(cfg, f.modulus().to_vec(), results, total))
}

/// Re-run `verify_point` on every stored point of `old` (optionally one
/// trial only).
pub fn verify_report(old: &Report, trial: Option<u64>) -> Result<Report> {
    if old.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "schema version {} is not {SCHEMA_VERSION}",
            old.schema_version
        )));
    }
    let points: Vec<(u64, u64, SamplePoint)> = old
        .results
        .iter()
        .filter(|r| trial.is_none_or(|t| t == r.trial))
        .filter_map(|r| r.point.clone().map(|p| (r.trial, r.seed, p)))
        .collect();
    if points.is_empty() {
        return Err(Error::InvalidArgument("report holds no matching sample points".into()));
    }
    let mut cfg = old.config.clone();
    cfg.command = Command::Verify;
    cfg.trials = points.len() as u64;
    let (results, total) = timed(|| {
        points
            .par_iter()
            .map(|(t, seed, pt)| {
                timed(|| {
                    let r = TrialResult {
                        point: Some(pt.clone()),
                        ..TrialResult::new(*t, *seed)
                    };
                    match verify_point(pt) {
                        Ok(rep) => TrialResult {
                            pass: rep.pass,
                            verify: Some(rep),
                            ..r
                        },
                        Err(e) => fail(r, e),
                    }
                })
            })
            .collect::<Vec<_>>()
    });
    Ok(assemble(&cfg, old.field_modulus.clone(), results, total))
}

/// Digit grids of the stabilizer elements of a trial, for offline checks.
pub fn element_grids(r: &TrialResult) -> Vec<DigitGrid> {
    r.stabilizer
        .as_ref()
        .map(|s| s.elements.iter().map(|e| e.grid.clone()).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_prints_p_to_the_fourth_for_g5() {
        let rep = run(&RunConfig::new(Command::Count, 5, 2)).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.text_summary(), "16\n");
    }

    #[test]
    fn reports_are_deterministic_and_reverifiable() {
        let mut cfg = RunConfig::new(Command::Sample, 4, 3);
        cfg.trials = 3;
        cfg.seed = 5;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        let back = Report::from_json(&a.to_json()).unwrap();
        assert_eq!(back.deterministic_json(), a.deterministic_json());
        let v = verify_report(&back, Some(1)).unwrap();
        assert_eq!(v.results.len(), 1);
        assert_eq!(v.results[0].trial, 1);
        assert!(v.pass);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = RunConfig::new(Command::Claim, 4, 4);
        assert!(c.validate().is_err());
        c.p = 3;
        assert!(c.validate().is_ok());
        c.s = 5;
        assert!(c.validate().is_err());
        c.s = 2;
        c.k = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn g2_claim_fails() {
        let mut c = RunConfig::new(Command::Claim, 2, 2);
        c.s = 1;
        c.trials = 4;
        let rep = run(&c).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.summary.class_counts, vec![("larger".to_string(), 4)]);
    }
}
