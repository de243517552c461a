//! Subcommand implementations, independent of argument parsing.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rdsnet_core::graph::barabasi_albert;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::{self, Provenance};
use crate::pipeline::{self, median, PipelineSummary};

/// Writes a Barabási–Albert graph as an edge list.
pub fn generate_graph(nodes: usize, m: usize, seed: u64, out: &Path) -> Result<()> {
    if m == 0 || nodes <= m {
        return Err(CliError::Validation(format!("need 0 < m < nodes, got m={m}, nodes={nodes}")));
    }
    let g = barabasi_albert(nodes, m, &mut ChaCha8Rng::seed_from_u64(seed));
    let text = format!("# {} barabasi-albert nodes={nodes} m={m} seed={seed}\n{}", format::VERSION, g.to_edge_list());
    format::write_file(out, &text)
}

/// Simulates one RDS run from `cfg.seed` and writes `observed.txt` and
/// `truth.txt` into `cfg.out`.
pub fn simulate(cfg: &RunConfig) -> Result<(PathBuf, PathBuf)> {
    let g = pipeline::config_graph(cfg)?;
    let (obs, truth) = pipeline::draw(&g, cfg, cfg.seed)?;
    let prov = Provenance::new(cfg.hash(), cfg.seed);
    let (o, t) = (cfg.out.join("observed.txt"), cfg.out.join("truth.txt"));
    format::write_file(&o, &format::write_observed(&obs, &prov))?;
    format::write_file(&t, &format::write_truth(&truth, &prov))?;
    Ok((o, t))
}

/// Runs inference on an observed-data file. The result is written even
/// when the minimizer did not converge, in which case `Unconverged` is
/// returned.
pub fn infer(cfg: &RunConfig, observed: &Path, truth: Option<&Path>, output: &Path) -> Result<()> {
    let (obs, prov) = format::read_observed(observed, &format::read_file(observed)?)?;
    let truth = match truth {
        Some(p) => Some(format::read_truth(p, &format::read_file(p)?)?.0.adjacency),
        None => None,
    };
    let start = std::time::Instant::now();
    let (res, alt) = pipeline::run_inference(cfg, &obs, truth.as_ref())?;
    eprintln!("inference took {:.3}s", start.elapsed().as_secs_f64());
    let prov = Provenance::new(cfg.hash(), prov.seed);
    format::write_file(output, &format::write_inference(&res, alt.as_ref(), &prov))?;
    if res.converged {
        Ok(())
    } else {
        Err(CliError::Unconverged(output.to_path_buf()))
    }
}

/// Scores an inference file against the truth and writes the ROC CSV, SVG
/// and `eval.txt` into `cfg.out`. Returns the one-line summary.
pub fn eval(cfg: &RunConfig, inference: &Path, truth: &Path) -> Result<String> {
    let (res, _, prov) = format::read_inference(inference, &format::read_file(inference)?)?;
    let (t, _) = format::read_truth(truth, &format::read_file(truth)?)?;
    let ev = pipeline::evaluate(&res, &t.adjacency, cfg.convention)?;
    pipeline::write_eval(&cfg.out, &ev, &Provenance::new(cfg.hash(), prov.seed))
}

/// Runs the replicate sweep. Early-terminated replicates are reported via
/// `EarlyTermination` and unconverged ones via `Unconverged`, after the
/// summaries have been written.
pub fn pipeline(cfg: &RunConfig) -> Result<(PipelineSummary, String)> {
    let s = pipeline::run_pipeline(cfg)?;
    let col = |f: fn(&pipeline::Metrics) -> f64| median(&s.metrics.iter().map(f).collect::<Vec<_>>());
    let mut line = format!(
        "replicates={} median_auc_vine={:.6} median_auc_gr={:.6} median_corner_vine={:.6} median_corner_gr={:.6}",
        s.metrics.len(),
        col(|m| m.auc_vine),
        col(|m| m.auc_gr),
        col(|m| m.corner_vine),
        col(|m| m.corner_gr),
    );
    if cfg.anneal {
        line += &format!(" median_corner_anneal={:.6}", col(|m| m.corner_anneal.unwrap_or(f64::NAN)));
    }
    if !s.failed.is_empty() {
        let list: Vec<String> = s.failed.iter().map(|(k, e)| format!("rep-{k:03}: {e}")).collect();
        return Err(CliError::EarlyTermination(format!("{line}\n{}", list.join("\n"))));
    }
    if s.metrics.iter().any(|m| !m.converged) {
        return Err(CliError::Unconverged(cfg.out.clone()));
    }
    Ok((s, line))
}
