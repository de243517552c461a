//! Comparators for the bound-based reconstruction: the recruitment graph on
//! its own, and a Metropolis annealer over the same objective.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::eval::{revealed_baseline, EvalError, RocResult};
use crate::graph::AdjacencyMatrix;
use crate::likelihood::{LikelihoodError, Objective, PenaltyConfig};
use crate::sim::ObservedData;
use crate::submodular::{SetCursor, SetFunction};
use crate::timing::TimingModel;

/// ROC polyline of `Â = A_R`: `(0,0) → (0, TPR) → (1,1)`.
pub fn gr_baseline(obs: &ObservedData, truth: &AdjacencyMatrix) -> Result<RocResult, EvalError> {
    revealed_baseline(&obs.recruitment_adjacency(), truth)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    /// Initial temperature; `None` derives it from the objective.
    pub t0: Option<f64>,
    pub cooling: f64,
    pub stages: usize,
    /// Proposals per temperature; `None` means `50·N`.
    pub steps_per_stage: Option<usize>,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule { t0: None, cooling: 0.8, stages: 30, steps_per_stage: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub temperature: f64,
    /// Best value seen up to the end of the stage.
    pub best: f64,
    pub accepted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub best: BitSet,
    pub best_value: f64,
    pub t0: f64,
    pub steps: usize,
    pub stages: Vec<StageRecord>,
}

/// Interquartile range of `|ΔF|` along a 100-step random toggle walk from
/// the empty set. Falls back to the median, then to 1, when the spread is
/// degenerate.
pub fn default_temperature<F: SetFunction>(f: &F, rng: &mut ChaCha8Rng) -> f64 {
    let n = f.len();
    if n == 0 {
        return 1.0;
    }
    let mut c = f.cursor();
    let mut samples: Vec<f64> = Vec::with_capacity(100);
    for _ in 0..100 {
        let i = rng.gen_range(0..n);
        let g = c.toggle_gain(i).abs();
        if g.is_finite() {
            samples.push(g);
        }
        c.toggle(i);
    }
    if samples.is_empty() {
        return 1.0;
    }
    samples.sort_by(f64::total_cmp);
    let q = |p: f64| samples[((samples.len() - 1) as f64 * p) as usize];
    [q(0.75) - q(0.25), q(0.5)].into_iter().find(|&t| t > 0.0 && t.is_finite()).unwrap_or(1.0)
}

/// Maximizes `f` by single-bit toggles with Metropolis acceptance
/// `min(1, exp(ΔF/T))`, starting from the empty set and cooling
/// geometrically after each stage.
pub fn anneal<F: SetFunction>(f: &F, sched: &AnnealSchedule) -> AnnealOutcome {
    let n = f.len();
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    let t0 = match sched.t0 {
        Some(t) => t,
        None => default_temperature(f, &mut rng),
    };
    let steps = sched.steps_per_stage.unwrap_or(50 * n);
    let mut c = f.cursor();
    let mut best = c.set().clone();
    let mut best_value = c.value();
    let mut stages = Vec::with_capacity(sched.stages);
    let mut temp = t0;
    let mut total = 0;
    for _ in 0..sched.stages {
        let mut accepted = 0;
        for _ in 0..if n == 0 { 0 } else { steps } {
            let i = rng.gen_range(0..n);
            let g = c.toggle_gain(i);
            let take = g >= 0.0 || rng.gen::<f64>() < crate::math::exp(g / temp);
            if take {
                let v = c.toggle(i);
                accepted += 1;
                if v > best_value {
                    best_value = v;
                    best = c.set().clone();
                }
            }
            total += 1;
        }
        stages.push(StageRecord { temperature: temp, best: best_value, accepted });
        temp *= sched.cooling;
    }
    AnnealOutcome { best, best_value, t0, steps: total, stages }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealResult {
    /// Always contains every recruitment edge.
    pub adjacency: AdjacencyMatrix,
    pub pendants: Vec<u64>,
    /// Unnormalized log-posterior `ln p(t | A, u, θ) + ln p(u, A)` at the best state.
    pub objective: f64,
    pub outcome: AnnealOutcome,
}

/// Annealing over the full `γ = (α, μ)` encoding of `(A, u)`.
pub fn simanneal(
    obs: &ObservedData,
    penalty: &PenaltyConfig,
    tm: &TimingModel,
    sched: &AnnealSchedule,
) -> Result<AnnealResult, LikelihoodError> {
    let obj = Objective::new(obs, tm, *penalty)?;
    Ok(simanneal_objective(&obj, sched))
}

pub fn simanneal_objective(obj: &Objective, sched: &AnnealSchedule) -> AnnealResult {
    let outcome = anneal(obj, sched);
    let (adjacency, pendants) = obj.codec().decode(&outcome.best);
    AnnealResult { adjacency, pendants, objective: outcome.best_value + obj.base_value(), outcome }
}

/// Best of several results by objective, earliest on ties.
pub fn best_of(results: Vec<AnnealResult>) -> Option<AnnealResult> {
    results.into_iter().reduce(|a, b| if b.objective > a.objective { b } else { a })
}

/// `sched` with the seed replaced, one per chain.
pub fn chain_schedules(sched: &AnnealSchedule, chains: usize) -> Vec<AnnealSchedule> {
    (0..chains as u64)
        .map(|k| AnnealSchedule { seed: crate::rng::split(sched.seed, k), ..sched.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::FnSetFunction;

    fn bumpy(len: usize, seed: u64) -> FnSetFunction<impl Fn(&BitSet) -> f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pair: Vec<f64> = (0..len * len).map(|_| rng.gen_range(-0.6..0.6)).collect();
        FnSetFunction::new(len, move |s: &BitSet| {
            let items: Vec<usize> = s.iter().collect();
            let mut v: f64 = items.iter().map(|&i| w[i]).sum();
            for (k, &i) in items.iter().enumerate() {
                for &j in &items[k + 1..] {
                    v += pair[i * len + j];
                }
            }
            v
        })
    }

    fn brute_max<F: SetFunction>(f: &F) -> f64 {
        (0..1u64 << f.len()).map(|m| f.evaluate(&BitSet::from_mask(f.len(), m))).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn reaches_exhaustive_maximum() {
        let mut hits = 0;
        for seed in 0..20 {
            let f = bumpy(12, 100 + seed);
            let opt = brute_max(&f);
            let sched = AnnealSchedule { steps_per_stage: Some(400), seed, ..Default::default() };
            let out = anneal(&f, &sched);
            assert!(out.best_value <= opt + 1e-12);
            assert!((f.evaluate(&out.best) - out.best_value).abs() < 1e-9);
            if out.best_value >= opt - 1e-6 {
                hits += 1;
            }
        }
        assert!(hits >= 18, "{hits}/20");
    }

    #[test]
    fn schedule_invariants_and_determinism() {
        let f = bumpy(10, 3);
        let sched = AnnealSchedule { seed: 9, ..Default::default() };
        let a = anneal(&f, &sched);
        assert_eq!(a, anneal(&f, &sched));
        assert_eq!(a.steps, 30 * 50 * 10);
        assert!(a.t0 > 0.0);
        for w in a.stages.windows(2) {
            assert!(w[1].temperature < w[0].temperature);
            assert!(w[1].best >= w[0].best);
        }
    }

    #[test]
    fn zero_temperature_only_climbs() {
        let f = bumpy(10, 4);
        let sched = AnnealSchedule { t0: Some(1e-300), stages: 1, steps_per_stage: Some(2000), ..Default::default() };
        let out = anneal(&f, &sched);
        for i in 0..10 {
            let mut s = out.best.clone();
            s.set(i, !s.contains(i));
            assert!(f.evaluate(&s) <= out.best_value + 1e-12, "not a local maximum");
        }
    }

    #[test]
    fn keeps_recruitment_edges() {
        use crate::sim::{simulate, RdsConfig};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = crate::graph::barabasi_albert(40, 2, &mut rng);
        let tm = TimingModel::exponential(1.0).unwrap();
        let (obs, truth) = simulate(&g, &RdsConfig::single_seed(10, 3, tm), &mut rng).unwrap().complete().unwrap();
        let sched = AnnealSchedule { stages: 5, steps_per_stage: Some(500), ..Default::default() };
        let r = simanneal(&obs, &PenaltyConfig::default(), &tm, &sched).unwrap();
        assert!(r.adjacency.dominates(&obs.recruitment_adjacency()));
        let direct = crate::likelihood::log_likelihood_direct(&obs, &r.adjacency, &r.pendants, &tm).unwrap()
            + crate::likelihood::log_prior(&r.adjacency, &r.pendants, &obs.degrees, &PenaltyConfig::default());
        assert!((direct - r.objective).abs() < 1e-8 * direct.abs().max(1.0));
        let roc = gr_baseline(&obs, &truth.adjacency).unwrap();
        assert_eq!(roc.points.len(), 3);
        let chains: Vec<AnnealResult> =
            chain_schedules(&sched, 3).iter().map(|s| simanneal(&obs, &PenaltyConfig::default(), &tm, s).unwrap()).collect();
        let best = best_of(chains.clone()).unwrap();
        assert!(chains.iter().all(|c| c.objective <= best.objective));
    }
}
