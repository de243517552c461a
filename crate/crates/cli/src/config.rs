//! Run configuration: defaults, then a flat `key = value` file, then
//! command-line overrides.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use rdsnet_core::eval::Convention;
use rdsnet_core::likelihood::PenaltyConfig;
use rdsnet_core::sim::{Coupons, RdsConfig, SeedEntry, SeedNodes};
use rdsnet_core::submodular::MinimizeOptions;
use rdsnet_core::timing::TimingFamily;
use rdsnet_core::vine::{BoundChoice, InferOptions, PendantRule};
use rdsnet_core::TimingModel;

use crate::error::{CliError, Result};
use crate::format::read_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    Posterior,
    Truth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub n: usize,
    pub coupons: u32,
    pub seeds: usize,
    pub family: TimingFamily,
    /// Parameters the data are simulated with.
    pub theta: Vec<f64>,
    /// Starting parameters for inference; `theta` when unset.
    pub theta0: Option<Vec<f64>>,
    pub degree_noise: Option<f64>,
    pub omega: f64,
    pub p: f64,
    pub bound: BoundChoice,
    pub rounds: usize,
    pub selection: SelectionRule,
    pub max_major: Option<usize>,
    pub pendants: PendantRule,
    pub convention: Convention,
    pub replicates: usize,
    pub jobs: usize,
    pub out: PathBuf,
    pub seed: u64,
    /// Simulation draws per replicate before giving up on a stalled chain.
    pub attempts: usize,
    pub anneal: bool,
    pub anneal_stages: usize,
    pub anneal_steps: Option<usize>,
    pub anneal_cooling: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: None,
            n: 50,
            coupons: 3,
            seeds: 1,
            family: TimingFamily::Exponential,
            theta: vec![1.0],
            theta0: None,
            degree_noise: None,
            omega: 1.0,
            p: 2.0,
            bound: BoundChoice::Upper,
            rounds: 1,
            selection: SelectionRule::Posterior,
            max_major: None,
            pendants: PendantRule::DegreeResidual,
            convention: Convention::Standard,
            replicates: 20,
            jobs: 0,
            out: PathBuf::from("."),
            seed: 0,
            attempts: 100,
            anneal: false,
            anneal_stages: 30,
            anneal_steps: None,
            anneal_cooling: 0.8,
        }
    }
}

/// Every recognised key, in canonical order.
pub const KEYS: &[&str] = &[
    "graph",
    "n",
    "coupons",
    "seeds",
    "family",
    "theta",
    "theta0",
    "degree_noise",
    "omega",
    "p",
    "bound",
    "rounds",
    "selection",
    "max_major",
    "pendants",
    "convention",
    "replicates",
    "jobs",
    "out",
    "seed",
    "attempts",
    "anneal",
    "anneal_stages",
    "anneal_steps",
    "anneal_cooling",
];

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::Validation(format!("invalid value `{value}` for `{key}`: {why}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "not a number"))
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x: f64 = num(key, value)?;
    if x > 0.0 && !x.is_nan() {
        Ok(x)
    } else {
        Err(bad(key, value, "must be positive"))
    }
}

fn reals(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| positive(key, v.trim())).collect()
}

fn optional<T>(value: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if value == "none" {
        Ok(None)
    } else {
        f(value).map(Some)
    }
}

fn render_reals(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn render_opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("none".to_string(), |v| v.to_string())
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "graph" if v == "none" => self.graph = None,
            "graph" => {
                let p = PathBuf::from(v);
                if !p.exists() {
                    return Err(bad(key, v, "file does not exist"));
                }
                self.graph = Some(p);
            }
            "n" => self.n = num(key, v)?,
            "coupons" => self.coupons = num(key, v)?,
            "seeds" => self.seeds = num(key, v)?,
            "family" => {
                self.family = match v {
                    "exponential" => TimingFamily::Exponential,
                    "weibull" => TimingFamily::Weibull,
                    _ => return Err(bad(key, v, "expected exponential or weibull")),
                }
            }
            "theta" => self.theta = reals(key, v)?,
            "rate" => {
                self.family = TimingFamily::Exponential;
                self.theta = vec![positive(key, v)?];
            }
            "theta0" => self.theta0 = optional(v, |v| reals(key, v))?,
            "degree_noise" => self.degree_noise = optional(v, |v| positive(key, v))?,
            "omega" => self.omega = positive(key, v)?,
            "p" => self.p = if v == "inf" { f64::INFINITY } else { num(key, v)? },
            "bound" => self.bound = BoundChoice::from_name(v).ok_or_else(|| bad(key, v, "expected upper or lower"))?,
            "rounds" => self.rounds = num(key, v)?,
            "selection" => {
                self.selection = match v {
                    "posterior" => SelectionRule::Posterior,
                    "truth" => SelectionRule::Truth,
                    _ => return Err(bad(key, v, "expected posterior or truth")),
                }
            }
            "max_major" => self.max_major = optional(v, |v| num(key, v))?,
            "pendants" => {
                self.pendants =
                    PendantRule::from_name(v).ok_or_else(|| bad(key, v, "expected degree-residual or marginal"))?
            }
            "convention" => {
                self.convention =
                    Convention::from_name(v).ok_or_else(|| bad(key, v, "expected standard or paper-literal"))?
            }
            "replicates" => self.replicates = num(key, v)?,
            "jobs" => self.jobs = num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(key, v)?,
            "attempts" => self.attempts = num(key, v)?,
            "anneal" => self.anneal = v.parse().map_err(|_| bad(key, v, "expected true or false"))?,
            "anneal_stages" => self.anneal_stages = num(key, v)?,
            "anneal_steps" => self.anneal_steps = optional(v, |v| num(key, v))?,
            "anneal_cooling" => {
                let c: f64 = num(key, v)?;
                if !(c > 0.0 && c < 1.0) {
                    return Err(bad(key, v, "must lie in (0, 1)"));
                }
                self.anneal_cooling = c;
            }
            _ => return Err(CliError::Validation(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = read_file(path)?;
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                msg: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "graph" => self.graph.as_ref().map_or("none".into(), |p| p.display().to_string()),
            "n" => self.n.to_string(),
            "coupons" => self.coupons.to_string(),
            "seeds" => self.seeds.to_string(),
            "family" => self.family.name().into(),
            "theta" => render_reals(&self.theta),
            "theta0" => self.theta0.as_deref().map_or("none".into(), render_reals),
            "degree_noise" => render_opt(&self.degree_noise),
            "omega" => self.omega.to_string(),
            "p" => self.p.to_string(),
            "bound" => self.bound.name().into(),
            "rounds" => self.rounds.to_string(),
            "selection" => match self.selection {
                SelectionRule::Posterior => "posterior".into(),
                SelectionRule::Truth => "truth".into(),
            },
            "max_major" => render_opt(&self.max_major),
            "pendants" => self.pendants.name().into(),
            "convention" => self.convention.name().into(),
            "replicates" => self.replicates.to_string(),
            "jobs" => self.jobs.to_string(),
            "out" => self.out.display().to_string(),
            "seed" => self.seed.to_string(),
            "attempts" => self.attempts.to_string(),
            "anneal" => self.anneal.to_string(),
            "anneal_stages" => self.anneal_stages.to_string(),
            "anneal_steps" => render_opt(&self.anneal_steps),
            "anneal_cooling" => self.anneal_cooling.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// `key = value` lines for every key, in canonical order. Reading this
    /// back reproduces the configuration.
    pub fn render(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.get(k))).collect()
    }

    /// SHA-256 of the canonical rendering, minus the keys that only affect
    /// where and how fast results are produced.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for k in KEYS.iter().filter(|k| !matches!(**k, "out" | "jobs")) {
            h.update(format!("{k} = {}\n", self.get(k)));
        }
        format!("{:x}", h.finalize())
    }

    pub fn timing(&self) -> Result<TimingModel> {
        self.family.with_params(&self.theta).map_err(|e| CliError::Validation(format!("theta: {e}")))
    }

    pub fn initial_timing(&self) -> Result<TimingModel> {
        let p = self.theta0.as_ref().unwrap_or(&self.theta);
        self.family.with_params(p).map_err(|e| CliError::Validation(format!("theta0: {e}")))
    }

    pub fn penalty(&self) -> Result<PenaltyConfig> {
        PenaltyConfig::new(self.omega, self.p).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn rds(&self) -> Result<RdsConfig> {
        let cfg = RdsConfig {
            sample_size: self.n,
            coupons: Coupons::Uniform(self.coupons),
            seeds: vec![SeedEntry { time: 0.0, nodes: SeedNodes::Uniform(self.seeds) }],
            timing: self.timing()?,
            degree_noise: self.degree_noise,
        };
        cfg.check().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(cfg)
    }

    pub fn infer_options(&self) -> InferOptions {
        InferOptions {
            bound: self.bound,
            minimize: MinimizeOptions { max_major: self.max_major, ..Default::default() },
            both_partitions: true,
            pendants: self.pendants,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_roundtrips() {
        let mut c = RunConfig::default();
        c.set("theta", "1.5, 2").unwrap();
        c.set("family", "weibull").unwrap();
        c.set("p", "inf").unwrap();
        c.set("anneal_steps", "77").unwrap();
        c.set("convention", "paper-literal").unwrap();
        let mut d = RunConfig::default();
        for line in c.render().lines() {
            let (k, v) = line.split_once('=').unwrap();
            d.set(k.trim(), v).unwrap();
        }
        assert_eq!(c, d);
        assert_eq!(c.hash(), d.hash());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.set("out", "/elsewhere").unwrap();
        b.set("jobs", "3").unwrap();
        assert_eq!(a.hash(), b.hash());
        b.set("omega", "10").unwrap();
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::default();
        for (k, v) in [("omega", "0"), ("bound", "middle"), ("nope", "1"), ("graph", "/no/such/file"), ("anneal_cooling", "1")] {
            assert!(matches!(c.set(k, v), Err(CliError::Validation(_))), "{k}={v}");
        }
    }
}
