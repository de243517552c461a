//! One replicate is simulate → infer → evaluate under a seed derived from
//! the master seed; a pipeline runs `R` of them in parallel and aggregates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rdsnet_core::baseline::{simanneal, AnnealSchedule};
use rdsnet_core::eval::{confusion, corner_distance, rates, to_csv, to_svg, Convention, Curve, RocResult};
use rdsnet_core::graph::{parse_edge_list, AdjacencyMatrix, Graph};
use rdsnet_core::rng::split;
use rdsnet_core::sim::{simulate, validate, ObservedData, SimOutcome};
use rdsnet_core::vine::{alternate, infer, InferenceResult, Selection};

use crate::config::{RunConfig, SelectionRule};
use crate::error::{CliError, Result};
use crate::format::{self, AlternationMeta, Provenance, TruthFile};

pub fn load_graph(path: &Path) -> Result<Graph> {
    let text = format::read_file(path)?;
    let parsed = parse_edge_list(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(parsed.graph)
}

pub fn config_graph(cfg: &RunConfig) -> Result<Graph> {
    let path = cfg.graph.as_ref().ok_or_else(|| CliError::Validation("a graph edge list is required".into()))?;
    load_graph(path)
}

/// Simulates until a run reaches the target size, for at most
/// `cfg.attempts` draws from the stream seeded by `seed`.
pub fn draw(g: &Graph, cfg: &RunConfig, seed: u64) -> Result<(ObservedData, TruthFile)> {
    let rds = cfg.rds()?;
    if cfg.n > g.node_count() {
        return Err(CliError::EarlyTermination(format!(
            "sample size {} exceeds the {} graph nodes",
            cfg.n,
            g.node_count()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = 0;
    for _ in 0..cfg.attempts.max(1) {
        match simulate(g, &rds, &mut rng).map_err(|e| CliError::Validation(e.to_string()))? {
            SimOutcome::Complete { observed, truth } => {
                let file = TruthFile {
                    nodes: truth.sample_nodes.iter().map(|&v| g.label(v)).collect(),
                    pendants: truth.pendants(g),
                    adjacency: truth.adjacency,
                    events: truth.events,
                };
                return Ok((observed, file));
            }
            SimOutcome::Stalled { enrolled } => last = enrolled,
        }
    }
    Err(CliError::EarlyTermination(format!(
        "recruitment stalled after {last} of {} subjects in {} attempt(s)",
        cfg.n,
        cfg.attempts.max(1)
    )))
}

/// Runs the configured inference. With more than one round this is the
/// A/θ alternation, which needs `truth` when `selection = truth`.
pub fn run_inference(
    cfg: &RunConfig,
    obs: &ObservedData,
    truth: Option<&AdjacencyMatrix>,
) -> Result<(InferenceResult, Option<AlternationMeta>)> {
    let v = validate(obs);
    if let Some(first) = v.first() {
        return Err(CliError::Validation(format!("invalid observed data: {first} ({} violation(s))", v.len())));
    }
    let penalty = cfg.penalty()?;
    let theta0 = cfg.initial_timing()?;
    let opts = cfg.infer_options();
    if cfg.rounds <= 1 {
        return Ok((infer(obs, &penalty, &theta0, &opts)?, None));
    }
    let selection = match cfg.selection {
        SelectionRule::Posterior => Selection::Posterior,
        SelectionRule::Truth => Selection::Truth(
            truth.ok_or_else(|| CliError::Validation("selection = truth needs the true graph".into()))?,
        ),
    };
    let alt = alternate(obs, &penalty, cfg.family, theta0, cfg.rounds, selection, &opts)?;
    let meta = AlternationMeta { rounds: alt.rounds, zeta: alt.zeta, theta_failed: alt.theta_failed };
    Ok((alt.inference, Some(meta)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub roc: RocResult,
    pub baseline: RocResult,
    /// Smallest corner distance on the curve and its threshold.
    pub corner: (f64, f64),
    pub corner_gr: f64,
}

pub fn evaluate(res: &InferenceResult, truth: &AdjacencyMatrix, convention: Convention) -> Result<Evaluation> {
    if truth.dim() != res.n {
        return Err(CliError::Validation(format!("truth has {} subjects, inference has {}", truth.dim(), res.n)));
    }
    let revealed = res.revealed_adjacency();
    let roc = res.roc(truth, convention)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let baseline = rdsnet_core::eval::revealed_baseline(&revealed, truth).map_err(|e| CliError::Validation(e.to_string()))?;
    let r = rates(&confusion(&revealed, truth).map_err(|e| CliError::Validation(e.to_string()))?, convention);
    Ok(Evaluation { corner: roc.min_corner_distance(), corner_gr: corner_distance(r.tpr, r.fpr), roc, baseline })
}

/// Corner distance of the annealer's single estimate.
pub fn anneal_corner(cfg: &RunConfig, obs: &ObservedData, truth: &AdjacencyMatrix, seed: u64) -> Result<f64> {
    let sched = AnnealSchedule {
        t0: None,
        cooling: cfg.anneal_cooling,
        stages: cfg.anneal_stages,
        steps_per_stage: cfg.anneal_steps,
        seed,
    };
    let res = simanneal(obs, &cfg.penalty()?, &cfg.initial_timing()?, &sched)?;
    let c = confusion(&res.adjacency, truth).map_err(|e| CliError::Validation(e.to_string()))?;
    let r = rates(&c, cfg.convention);
    Ok(corner_distance(r.tpr, r.fpr))
}

/// Writes `roc.csv`, `roc.svg` and `eval.txt` into `dir` and returns the
/// one-line summary.
pub fn write_eval(dir: &Path, ev: &Evaluation, prov: &Provenance) -> Result<String> {
    let err = |e: rdsnet_core::eval::EvalError| CliError::Validation(e.to_string());
    let csv = to_csv(&ev.roc).map_err(err)?;
    format::write_file(&dir.join("roc.csv"), &format!("# {}\n{csv}", prov.comment()))?;
    let svg = to_svg(&[
        Curve { label: "VINE", color: "#1f4fd1", roc: &ev.roc },
        Curve { label: "G_R", color: "#d12f1f", roc: &ev.baseline },
    ])
    .map_err(err)?;
    let svg = svg.replacen("\n", &format!("\n<!-- {} -->\n", prov.comment()), 1);
    format::write_file(&dir.join("roc.svg"), &svg)?;
    let line = format!(
        "auc_vine={:.6} auc_gr={:.6} min_corner={:.6} corner_gr={:.6} convention={}",
        ev.roc.auc,
        ev.baseline.auc,
        ev.corner.0,
        ev.corner_gr,
        ev.roc.convention.name()
    );
    let mut s = String::from("rdsnet-eval 1\n");
    let _ = writeln!(s, "version {}\nconfig {}\nseed {}", prov.version, prov.config, prov.seed);
    let _ = writeln!(s, "convention {}", ev.roc.convention.name());
    let _ = writeln!(s, "auc_vine {}", ev.roc.auc);
    let _ = writeln!(s, "auc_gr {}", ev.baseline.auc);
    let _ = writeln!(s, "min_corner {} {}", ev.corner.0, ev.corner.1);
    let _ = writeln!(s, "corner_gr {}", ev.corner_gr);
    let _ = writeln!(s, "degenerate {}", ev.roc.degenerate);
    format::write_file(&dir.join("eval.txt"), &s)?;
    Ok(line)
}

/// Per-replicate numbers that feed the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub replicate: usize,
    pub seed: u64,
    pub auc_vine: f64,
    pub auc_gr: f64,
    pub corner_vine: f64,
    pub corner_gr: f64,
    pub corner_anneal: Option<f64>,
    pub converged: bool,
    /// Final timing parameters.
    pub theta: Vec<f64>,
}

pub const METRIC_COLUMNS: [&str; 5] = ["auc_vine", "auc_gr", "corner_vine", "corner_gr", "corner_anneal"];

impl Metrics {
    fn column(&self, k: usize) -> Option<f64> {
        match k {
            0 => Some(self.auc_vine),
            1 => Some(self.auc_gr),
            2 => Some(self.corner_vine),
            3 => Some(self.corner_gr),
            _ => self.corner_anneal,
        }
    }

    fn to_text(&self, config: &str) -> String {
        let theta: Vec<String> = self.theta.iter().map(|x| x.to_string()).collect();
        format!(
            "config {config}\nreplicate {}\nseed {}\nauc_vine {}\nauc_gr {}\ncorner_vine {}\ncorner_gr {}\ncorner_anneal {}\nconverged {}\ntheta {}\n",
            self.replicate,
            self.seed,
            self.auc_vine,
            self.auc_gr,
            self.corner_vine,
            self.corner_gr,
            self.corner_anneal.map_or("none".into(), |x| x.to_string()),
            self.converged,
            theta.join(",")
        )
    }

    /// Parses a `DONE` marker; `None` if it is malformed or was written
    /// under another configuration.
    fn from_text(text: &str, config: &str) -> Option<Metrics> {
        let mut f = std::collections::HashMap::new();
        for line in text.lines() {
            let (k, v) = line.split_once(' ')?;
            f.insert(k, v);
        }
        if f.get("config")? != &config {
            return None;
        }
        let real = |k: &str| f.get(k)?.parse::<f64>().ok();
        Some(Metrics {
            replicate: f.get("replicate")?.parse().ok()?,
            seed: f.get("seed")?.parse().ok()?,
            auc_vine: real("auc_vine")?,
            auc_gr: real("auc_gr")?,
            corner_vine: real("corner_vine")?,
            corner_gr: real("corner_gr")?,
            corner_anneal: match *f.get("corner_anneal")? {
                "none" => None,
                v => Some(v.parse().ok()?),
            },
            converged: f.get("converged")?.parse().ok()?,
            theta: f.get("theta")?.split(',').map(|x| x.parse().ok()).collect::<Option<_>>()?,
        })
    }
}

pub fn replicate_dir(out: &Path, k: usize) -> PathBuf {
    out.join(format!("rep-{k:03}"))
}

/// Runs replicate `k`, writing its artifacts under `rep-NNN/`. A directory
/// whose `DONE` marker matches the configuration is reused as is.
pub fn run_replicate(cfg: &RunConfig, g: &Graph, k: usize) -> Result<Metrics> {
    let dir = replicate_dir(&cfg.out, k);
    let hash = cfg.hash();
    let done = dir.join("DONE");
    if let Ok(text) = std::fs::read_to_string(&done) {
        if let Some(m) = Metrics::from_text(&text, &hash) {
            return Ok(m);
        }
    }
    let seed = split(cfg.seed, k as u64);
    let prov = Provenance::new(hash.clone(), seed);
    let (obs, truth) = draw(g, cfg, seed)?;
    format::write_file(&dir.join("observed.txt"), &format::write_observed(&obs, &prov))?;
    format::write_file(&dir.join("truth.txt"), &format::write_truth(&truth, &prov))?;
    let (res, alt) = run_inference(cfg, &obs, Some(&truth.adjacency))?;
    format::write_file(&dir.join("inference.txt"), &format::write_inference(&res, alt.as_ref(), &prov))?;
    let ev = evaluate(&res, &truth.adjacency, cfg.convention)?;
    write_eval(&dir, &ev, &prov)?;
    let corner_anneal = if cfg.anneal { Some(anneal_corner(cfg, &obs, &truth.adjacency, split(seed, 1))?) } else { None };
    let m = Metrics {
        replicate: k,
        seed,
        auc_vine: ev.roc.auc,
        auc_gr: ev.baseline.auc,
        corner_vine: ev.corner.0,
        corner_gr: ev.corner_gr,
        corner_anneal,
        converged: res.converged,
        theta: res.theta.last().map(|t| t.params()).unwrap_or_default(),
    };
    format::write_file(&done, &m.to_text(&hash))?;
    Ok(m)
}

/// Linearly interpolated sample quantile (`q ∈ [0, 1]`) of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub metrics: Vec<Metrics>,
    pub failed: Vec<(usize, String)>,
}

fn fmt_stat(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// `replicates.csv`: one row per completed replicate.
pub fn replicates_csv(metrics: &[Metrics], prov: &Provenance) -> String {
    let mut s = format!("# {}\nreplicate,seed,{},converged,theta\n", prov.comment(), METRIC_COLUMNS.join(","));
    for m in metrics {
        let cols: Vec<String> = (0..METRIC_COLUMNS.len()).map(|k| m.column(k).map_or(String::new(), fmt_stat)).collect();
        let theta: Vec<String> = m.theta.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{},{},{},{},{}", m.replicate, m.seed, cols.join(","), m.converged, theta.join(";"));
    }
    s
}

/// `summary.csv`: boxplot statistics per metric column.
pub fn summary_csv(metrics: &[Metrics], prov: &Provenance) -> String {
    let mut s = format!("# {}\nstatistic,{}\n", prov.comment(), METRIC_COLUMNS.join(","));
    let columns: Vec<Vec<f64>> = (0..METRIC_COLUMNS.len())
        .map(|k| {
            let mut v: Vec<f64> = metrics.iter().filter_map(|m| m.column(k)).collect();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    for (name, q) in [("min", 0.0), ("q1", 0.25), ("median", 0.5), ("q3", 0.75), ("max", 1.0)] {
        let row: Vec<String> = columns.iter().map(|c| fmt_stat(quantile(c, q))).collect();
        let _ = writeln!(s, "{name},{}", row.join(","));
    }
    let counts: Vec<String> = columns.iter().map(|c| c.len().to_string()).collect();
    let _ = writeln!(s, "count,{}", counts.join(","));
    s
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineSummary> {
    let g = config_graph(cfg)?;
    cfg.rds()?;
    cfg.penalty()?;
    cfg.initial_timing()?;
    std::fs::create_dir_all(&cfg.out).map_err(CliError::io(&cfg.out))?;
    format::write_file(&cfg.out.join("config.txt"), &cfg.render())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.jobs > 0 {
        builder = builder.num_threads(cfg.jobs);
    }
    let pool = builder.build().map_err(|e| CliError::Validation(e.to_string()))?;
    let results: Vec<(usize, Result<Metrics>)> =
        pool.install(|| (0..cfg.replicates).into_par_iter().map(|k| (k, run_replicate(cfg, &g, k))).collect());
    let mut metrics = Vec::new();
    let mut failed = Vec::new();
    let mut hard = None;
    for (k, r) in results {
        match r {
            Ok(m) => metrics.push(m),
            Err(e @ CliError::EarlyTermination(_)) => failed.push((k, e.to_string())),
            Err(e) => {
                hard.get_or_insert(e);
            }
        }
    }
    if let Some(e) = hard {
        return Err(e);
    }
    let prov = Provenance::new(cfg.hash(), cfg.seed);
    format::write_file(&cfg.out.join("replicates.csv"), &replicates_csv(&metrics, &prov))?;
    format::write_file(&cfg.out.join("summary.csv"), &summary_csv(&metrics, &prov))?;
    Ok(PipelineSummary { metrics, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!(quantile(&[], 0.5).is_nan());
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn metrics_marker_roundtrips() {
        let m = Metrics {
            replicate: 4,
            seed: 99,
            auc_vine: 0.875,
            auc_gr: 0.1 + 0.2,
            corner_vine: 0.25,
            corner_gr: 0.5,
            corner_anneal: None,
            converged: true,
            theta: vec![1.5, 0.3],
        };
        assert_eq!(Metrics::from_text(&m.to_text("abc"), "abc"), Some(m.clone()));
        assert_eq!(Metrics::from_text(&m.to_text("abc"), "abd"), None);
    }
}
