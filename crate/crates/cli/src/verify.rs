//! The `verify` suites.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use qmac::channels::NoiseParameter;
use qmac::search::SearchConfig;
use qmac::{cmac, infoq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EntropyMax,
    MinOutput,
    ClassicalAdditivity,
    GammaBound,
    DenseCoding,
    ChiConsistency,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::EntropyMax => "entropy-max",
            Suite::MinOutput => "min-output",
            Suite::ClassicalAdditivity => "classical-additivity",
            Suite::GammaBound => "gamma-bound",
            Suite::DenseCoding => "dense-coding",
            Suite::ChiConsistency => "chi-consistency",
        }
    }
}

/// Knobs shared by all suites; `None` means the suite's own default.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub p: Option<f64>,
    pub trials: Option<usize>,
    pub restarts: Option<usize>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub pass: bool,
    pub max_deviation: f64,
    pub details: Value,
}

const DEFAULT_PS: [f64; 3] = [0.25, 0.5, 0.75];
const DERIVATIVE_TOL: f64 = 1e-7;
const GAMMA_LIMIT: f64 = 1.81;
const DENSE_CODING_TOL: f64 = 1e-12;
const CHI_BELOW: f64 = 1e-4;
const CHI_ABOVE: f64 = 1e-6;
const PROTOCOL_TOL: f64 = 1e-9;

fn np(p: f64) -> NoiseParameter {
    NoiseParameter::new(p).expect("validated before use")
}

impl VerifyConfig {
    fn ps(&self) -> Vec<f64> {
        self.p.map_or_else(|| DEFAULT_PS.to_vec(), |p| vec![p])
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteResult, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let (pass, max_deviation, details) = match suite {
        Suite::EntropyMax => {
            let trials = cfg.trials.unwrap_or(1000);
            let mut pass = true;
            let mut dev = f64::NEG_INFINITY;
            let mut rows = Vec::new();
            for (i, p) in cfg.ps().into_iter().enumerate() {
                let r =
                    infoq::entropy_max_check(np(p), trials, cfg.seed.wrapping_add(i as u64)).map_err(|e| err(&e))?;
                pass &= r.passed(DERIVATIVE_TOL);
                dev = dev.max(r.max_violation).max(r.max_derivative);
                rows.push(serde_json::to_value(&r).expect("serializable"));
            }
            (pass, dev, json!({ "trials": trials, "reports": rows }))
        }
        Suite::MinOutput => {
            let trials = cfg.trials.unwrap_or(10_000);
            let mut pass = true;
            let mut dev = f64::NEG_INFINITY;
            let mut rows = Vec::new();
            for (i, p) in cfg.ps().into_iter().enumerate() {
                let r = infoq::min_output_entropy_scan(np(p), trials, cfg.seed.wrapping_add(i as u64))
                    .map_err(|e| err(&e))?;
                pass &= r.passed();
                dev = dev.max(r.max_violation).max(r.equality_deviation);
                rows.push(serde_json::to_value(&r).expect("serializable"));
            }
            (pass, dev, json!({ "trials": trials, "reports": rows }))
        }
        Suite::ClassicalAdditivity => {
            let trials = cfg.trials.unwrap_or(1000);
            let r = cmac::random_additivity_check(trials, cfg.seed, 4).map_err(|e| err(&e))?;
            (r.pass, r.max_violation, serde_json::to_value(&r).expect("serializable"))
        }
        Suite::GammaBound => {
            let steps = cfg.steps.unwrap_or(50);
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
            for k in 1..=steps {
                let p = 0.5 * k as f64 / steps as f64;
                let b = cmac::gamma_rb_bound(np(p));
                if b > best {
                    best = b;
                    arg = p;
                }
            }
            let entangled = cmac::gamma_entangled_rb(np(0.5)).map_err(|e| err(&e))?;
            (
                best < GAMMA_LIMIT,
                best - GAMMA_LIMIT,
                json!({ "steps": steps, "max_bound": best, "argmax_p": arg, "limit": GAMMA_LIMIT,
                        "entangled_rate_p05": entangled }),
            )
        }
        Suite::DenseCoding => {
            let direct = infoq::dense_coding_rate().map_err(|e| err(&e))?;
            let mut dev = (direct - 2.0).abs();
            let mut remote = Vec::new();
            for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let r = infoq::remote_dc_rate(np(p)).map_err(|e| err(&e))?;
                dev = dev.max((r - 2.0).abs());
                remote.push(json!({ "p": p, "rate": r }));
            }
            (dev <= DENSE_CODING_TOL, dev, json!({ "dense_coding_rate": direct, "remote": remote }))
        }
        Suite::ChiConsistency => {
            let search = SearchConfig::new(cfg.restarts.unwrap_or(200), cfg.seed);
            let mut pass = true;
            let mut dev: f64 = 0.0;
            let mut rows = Vec::new();
            for p in cfg.ps() {
                let closed = infoq::chi1_closed_form(np(p));
                let found = infoq::chi1_bruteforce(np(p), &search).map_err(|e| err(&e))?;
                let d = found.value - closed;
                pass &= (-CHI_BELOW..=CHI_ABOVE).contains(&d);
                dev = dev.max(d.abs());
                rows.push(json!({ "p": p, "closed_form": closed, "bruteforce": found.value,
                                  "restart": found.restart }));
            }
            let mut protocol_dev: f64 = 0.0;
            for k in 0..=20 {
                let p = np(k as f64 / 20.0);
                let v = infoq::chi2_prime_protocol(p).map_err(|e| err(&e))?;
                protocol_dev = protocol_dev.max((v - infoq::chi2_prime_closed_form(p)).abs());
            }
            pass &= protocol_dev <= PROTOCOL_TOL;
            (
                pass,
                dev.max(protocol_dev),
                json!({ "restarts": search.restarts, "chi1": rows, "chi2_prime_protocol_deviation": protocol_dev }),
            )
        }
    };
    Ok(SuiteResult { suite: suite.name(), pass, max_deviation, details })
}
