//! Bound-and-threshold reconstruction of the induced subgraph.
//!
//! [`infer`] builds the objective from observed data, computes a modular
//! bound and splits its weights into edge weights `s^α` and pendant-bit
//! weights `s^μ`. [`InferenceResult::threshold`] then turns any `ζ` into an
//! adjacency estimate. [`alternate`] interleaves this with refits of the
//! timing parameters.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::eval::{roc_from_scores, Convention, EvalError, RocResult};
use crate::graph::AdjacencyMatrix;
use crate::likelihood::{theta_step, GammaCodec, LikelihoodError, Objective, PenaltyConfig};
use crate::sim::{validate, ObservedData, Violation};
use crate::submodular::{
    greedy_lower_bound, upper_bound, BoundKind, MinimizeOptions, SetCursor, SetFunction,
};
use crate::timing::{TimingFamily, TimingModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VineError {
    #[error("invalid observed data: {} violation(s), first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("at least one alternation round is required")]
    NoRounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundChoice {
    #[default]
    Upper,
    Lower,
}

impl BoundChoice {
    pub fn name(self) -> &'static str {
        match self {
            BoundChoice::Upper => "upper",
            BoundChoice::Lower => "lower",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "upper" => Some(BoundChoice::Upper),
            "lower" => Some(BoundChoice::Lower),
            _ => None,
        }
    }
}

/// How a concrete pendant vector `û` accompanies an estimate `Â`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PendantRule {
    /// `û_i = d_i − (Â·1)_i`, clamped to `[0, u_max]`: every reported
    /// contact not explained by `Â` is a pendant edge.
    #[default]
    DegreeResidual,
    /// Bits whose surrogate marginal `logistic(s^μ)` is at least one half.
    Marginal,
}

impl PendantRule {
    pub fn name(self) -> &'static str {
        match self {
            PendantRule::DegreeResidual => "degree-residual",
            PendantRule::Marginal => "marginal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "degree-residual" => Some(PendantRule::DegreeResidual),
            "marginal" => Some(PendantRule::Marginal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferOptions {
    pub bound: BoundChoice,
    pub minimize: MinimizeOptions,
    /// Also compute the other bound so both log-partition values are known.
    pub both_partitions: bool,
    pub pendants: PendantRule,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            bound: BoundChoice::Upper,
            minimize: MinimizeOptions::default(),
            both_partitions: true,
            pendants: PendantRule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub n: usize,
    /// Edges of `A_R`, `i < j`.
    pub revealed: Vec<(usize, usize)>,
    /// Free pairs in codec order, `i < j`.
    pub free_edges: Vec<(usize, usize)>,
    /// `s^α`, one per free pair.
    pub edge_weights: Vec<f64>,
    pub pendant_bits: u32,
    pub u_max: u64,
    /// Reported degrees `d`.
    pub degrees: Vec<u32>,
    /// `s^μ`, subject-major: bit `q` of subject `s` at `s · pendant_bits + q`.
    pub pendant_weights: Vec<f64>,
    pub kind: BoundKind,
    /// Anchor of an upper bound, as codec indices.
    pub anchor: Option<BitSet>,
    pub offset: f64,
    pub log_partition_lower: Option<f64>,
    pub log_partition_upper: Option<f64>,
    /// Log-partition of grow, shrink and bar at the anchor.
    pub upper_candidates: Option<[(BoundKind, f64); 3]>,
    pub converged: bool,
    pub oracle_calls: usize,
    /// Timing models used, one per alternation round.
    pub theta: Vec<TimingModel>,
}

impl InferenceResult {
    pub fn revealed_adjacency(&self) -> AdjacencyMatrix {
        let mut a = AdjacencyMatrix::new(self.n);
        for &(i, j) in &self.revealed {
            a.set(i, j, true);
        }
        a
    }

    /// `Â(ζ)`: every revealed edge plus the free pairs with weight `≥ ζ`.
    pub fn threshold(&self, zeta: f64) -> AdjacencyMatrix {
        let mut a = self.revealed_adjacency();
        for (&(i, j), &w) in self.free_edges.iter().zip(&self.edge_weights) {
            if w >= zeta {
                a.set(i, j, true);
            }
        }
        a
    }

    /// `+∞`, the distinct edge weights in decreasing order, `−∞`.
    pub fn threshold_grid(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.edge_weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w.dedup();
        let mut grid = Vec::with_capacity(w.len() + 2);
        grid.push(f64::INFINITY);
        grid.extend(w);
        grid.push(f64::NEG_INFINITY);
        grid
    }

    /// `logistic(s^α)` per free pair.
    pub fn edge_marginals(&self) -> Vec<f64> {
        self.edge_weights.iter().map(|&w| crate::math::logistic(w)).collect()
    }

    /// ROC of the threshold family against the true subgraph.
    pub fn roc(&self, truth: &AdjacencyMatrix, convention: Convention) -> Result<RocResult, EvalError> {
        roc_from_scores(&self.revealed_adjacency(), &self.free_edges, &self.edge_weights, truth, convention)
    }

    /// `û` accompanying the estimate `a` under `rule`.
    pub fn pendants(&self, a: &AdjacencyMatrix, rule: PendantRule) -> Vec<u64> {
        match rule {
            PendantRule::Marginal => self.marginal_pendants(),
            PendantRule::DegreeResidual => (0..self.n).map(|i| self.residual(i, a.degree(i))).collect(),
        }
    }

    fn residual(&self, i: usize, degree: usize) -> u64 {
        (self.degrees[i] as u64).saturating_sub(degree as u64).min(self.u_max)
    }

    /// Pendant counts from the bits whose surrogate marginal is at least
    /// one half, clamped to `u_max`.
    pub fn marginal_pendants(&self) -> Vec<u64> {
        let b = self.pendant_bits as usize;
        (0..self.n)
            .map(|s| {
                let u = (0..b).filter(|&q| self.pendant_weights[s * b + q] >= 0.0).fold(0u64, |u, q| u | (1 << q));
                u.min(self.u_max)
            })
            .collect()
    }
}

fn check(obs: &ObservedData) -> Result<(), VineError> {
    let v = validate(obs);
    if v.is_empty() {
        Ok(())
    } else {
        Err(VineError::Invalid(v))
    }
}

/// Bound-based inference with timing model `tm`.
pub fn infer(
    obs: &ObservedData,
    penalty: &PenaltyConfig,
    tm: &TimingModel,
    opts: &InferOptions,
) -> Result<InferenceResult, VineError> {
    check(obs)?;
    let obj = Objective::new(obs, tm, *penalty)?;
    Ok(infer_with(&obj, tm, opts))
}

fn infer_with(obj: &Objective, tm: &TimingModel, opts: &InferOptions) -> InferenceResult {
    let codec = obj.codec();
    let want_lower = opts.bound == BoundChoice::Lower || opts.both_partitions;
    let want_upper = opts.bound == BoundChoice::Upper || opts.both_partitions;
    let lower = want_lower.then(|| greedy_lower_bound(obj));
    let upper = want_upper.then(|| upper_bound(obj, &opts.minimize));
    let mut oracle_calls = 0;
    oracle_calls += lower.as_ref().map_or(0, |l| l.oracle_calls);
    oracle_calls += upper.as_ref().map_or(0, |u| u.oracle_calls);
    let converged = upper.as_ref().is_none_or(|u| u.minimizer.converged);
    let log_partition_lower = lower.as_ref().map(|l| l.bound.log_partition());
    let log_partition_upper = upper.as_ref().map(|u| u.bound.log_partition());
    let upper_candidates = upper.as_ref().map(|u| u.log_partitions);
    let bound = match opts.bound {
        BoundChoice::Lower => lower.expect("computed").bound,
        BoundChoice::Upper => upper.expect("computed").bound,
    };
    let n1 = codec.edge_count();
    InferenceResult {
        n: codec.n(),
        revealed: codec.revealed().edges().collect(),
        free_edges: codec.edge_slots().map(|(_, i, j)| (i, j)).collect(),
        edge_weights: bound.weights[..n1].to_vec(),
        pendant_bits: codec.bits(),
        u_max: codec.u_max(),
        degrees: obj.degrees().to_vec(),
        pendant_weights: bound.weights[n1..].to_vec(),
        kind: bound.kind,
        anchor: bound.anchor,
        offset: bound.offset,
        log_partition_lower,
        log_partition_upper,
        upper_candidates,
        converged,
        oracle_calls,
        theta: vec![*tm],
    }
}

/// How the alternation picks `ζ` in each A-step.
#[derive(Debug, Clone, Copy)]
pub enum Selection<'a> {
    /// Minimize the distance to the ROC corner against a known graph.
    Truth(&'a AdjacencyMatrix),
    /// Maximize the exact objective `F(Â(ζ), û)` over the grid.
    Posterior,
}

/// `ζ` maximizing `F(Â(ζ), û(ζ))` over the grid; the sparsest estimate
/// wins ties.
fn posterior_zeta(obj: &Objective, res: &InferenceResult, rule: PendantRule) -> f64 {
    let codec: &GammaCodec = obj.codec();
    let n1 = codec.edge_count();
    let bits = codec.bits() as usize;
    let mut c = obj.cursor();
    let mut degree: Vec<usize> = (0..res.n).map(|i| res.revealed_adjacency().degree(i)).collect();
    let mut current = vec![0u64; res.n];
    let set_pendant = |c: &mut crate::likelihood::ObjectiveCursor<'_>, s: usize, u: u64, current: &mut [u64]| {
        let flip = current[s] ^ u;
        for q in (0..bits).filter(|&q| (flip >> q) & 1 == 1) {
            c.toggle(n1 + s * bits + q);
        }
        current[s] = u;
    };
    let start = res.pendants(&res.revealed_adjacency(), rule);
    for (s, &u) in start.iter().enumerate() {
        set_pendant(&mut c, s, u, &mut current);
    }
    let mut order: Vec<usize> = (0..n1).collect();
    order.sort_by(|&a, &b| res.edge_weights[b].total_cmp(&res.edge_weights[a]).then(a.cmp(&b)));
    let mut best = (c.value(), f64::INFINITY);
    let mut k = 0;
    while k < order.len() {
        let zeta = res.edge_weights[order[k]];
        while k < order.len() && res.edge_weights[order[k]] == zeta {
            c.toggle(order[k]);
            if rule == PendantRule::DegreeResidual {
                let (i, j) = res.free_edges[order[k]];
                for s in [i, j] {
                    degree[s] += 1;
                    set_pendant(&mut c, s, res.residual(s, degree[s]), &mut current);
                }
            }
            k += 1;
        }
        if c.value() > best.0 {
            best = (c.value(), zeta);
        }
    }
    best.1
}

fn truth_zeta(res: &InferenceResult, truth: &AdjacencyMatrix) -> Result<f64, VineError> {
    let roc = res.roc(truth, Convention::Standard)?;
    // skip the origin anchor, which is not an estimate
    let zeta = roc.points[1..]
        .iter()
        .map(|p| (crate::eval::corner_distance(p.tpr, p.fpr), p.zeta))
        .fold((f64::INFINITY, f64::INFINITY), |b, x| if x.0 < b.0 { x } else { b })
        .1;
    Ok(zeta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternationResult {
    pub adjacency: AdjacencyMatrix,
    pub pendants: Vec<u64>,
    pub model: TimingModel,
    /// `θ₀` followed by the estimate after every round.
    pub trajectory: Vec<TimingModel>,
    pub inference: InferenceResult,
    pub zeta: f64,
    pub rounds: usize,
    /// Some θ-step failed and the previous θ was kept.
    pub theta_failed: bool,
}

/// Alternates A-steps (bound, threshold, select `ζ`) with θ-steps (refit of
/// the timing parameters at the selected `(Â, û)`), for at most `rounds`
/// rounds. Stops early once `Â` repeats and every parameter moved by less
/// than `1e−6` relative.
pub fn alternate(
    obs: &ObservedData,
    penalty: &PenaltyConfig,
    family: TimingFamily,
    theta0: TimingModel,
    rounds: usize,
    selection: Selection<'_>,
    opts: &InferOptions,
) -> Result<AlternationResult, VineError> {
    if rounds == 0 {
        return Err(VineError::NoRounds);
    }
    check(obs)?;
    let mut model = theta0;
    let mut trajectory = vec![theta0];
    let mut theta_failed = false;
    let mut previous: Option<AdjacencyMatrix> = None;
    let mut done = 0;
    loop {
        let obj = Objective::new(obs, &model, *penalty)?;
        let mut res = infer_with(&obj, &model, opts);
        let zeta = match selection {
            Selection::Truth(t) => truth_zeta(&res, t)?,
            Selection::Posterior => posterior_zeta(&obj, &res, opts.pendants),
        };
        let adjacency = res.threshold(zeta);
        let pendants = res.pendants(&adjacency, opts.pendants);
        done += 1;
        let next = match theta_step(obs, &adjacency, &pendants, family) {
            Ok(fit) => fit.model,
            Err(_) => {
                theta_failed = true;
                model
            }
        };
        let still = next.params().iter().zip(model.params()).all(|(a, b)| (a - b).abs() <= 1e-6 * b.abs());
        let same_graph = previous.as_ref() == Some(&adjacency);
        model = next;
        trajectory.push(model);
        if done == rounds || (still && same_graph) {
            res.theta = trajectory.clone();
            return Ok(AlternationResult {
                adjacency,
                pendants,
                model,
                trajectory,
                inference: res,
                zeta,
                rounds: done,
                theta_failed,
            });
        }
        previous = Some(adjacency);
    }
}
