//! Event-driven simulation of coupon-limited chain-referral recruitment over
//! a known graph.
//!
//! When subject `u` enters at `t_u` it draws one waiting time `W_uv` for every
//! neighbour `v` not yet in the study. The pair fires at `t_u + W_uv` unless,
//! by then, `u` has spent its coupons or `v` has already entered. The earliest
//! pending event fires first. Subjects are indexed `0..n` in entry order.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use rand::Rng;

use crate::graph::{AdjacencyMatrix, BitMatrix, Graph};
use crate::math;
use crate::timing::TimingModel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Coupons handed to each subject on entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coupons {
    Uniform(u32),
    /// Indexed by entry order; must cover the whole sample.
    PerSubject(Vec<u32>),
}

impl Coupons {
    fn for_subject(&self, k: usize) -> u32 {
        match self {
            Coupons::Uniform(c) => *c,
            Coupons::PerSubject(v) => v[k],
        }
    }
}

/// How the nodes of one seed batch are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedNodes {
    /// `count` nodes drawn uniformly among those not yet in the study.
    Uniform(usize),
    /// Fixed nodes; any already enrolled are skipped.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedEntry {
    pub time: f64,
    pub nodes: SeedNodes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdsConfig {
    pub sample_size: usize,
    pub coupons: Coupons,
    /// Seed batches; the first must enter at time 0.
    pub seeds: Vec<SeedEntry>,
    pub timing: TimingModel,
    /// Log-scale σ of a multiplicative lognormal error on reported degrees.
    /// `None` reports exact degrees.
    pub degree_noise: Option<f64>,
}

impl RdsConfig {
    /// One uniformly chosen seed at time 0, the same coupon count for all.
    pub fn single_seed(sample_size: usize, coupons: u32, timing: TimingModel) -> Self {
        RdsConfig {
            sample_size,
            coupons: Coupons::Uniform(coupons),
            seeds: vec![SeedEntry { time: 0.0, nodes: SeedNodes::Uniform(1) }],
            timing,
            degree_noise: None,
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.into()));
        if self.sample_size == 0 {
            return bad("sample size must be positive");
        }
        let Some(first) = self.seeds.first() else {
            return bad("seed schedule is empty");
        };
        if first.time != 0.0 {
            return bad("the first seed batch must enter at time 0");
        }
        let batch_len = |e: &SeedEntry| match &e.nodes {
            SeedNodes::Uniform(c) => *c,
            SeedNodes::Explicit(v) => v.len(),
        };
        if batch_len(first) == 0 {
            return bad("at least one seed must enter at time 0");
        }
        if self.seeds.windows(2).any(|w| !(w[0].time < w[1].time)) || self.seeds.iter().any(|e| !e.time.is_finite()) {
            return bad("seed batch times must be finite and strictly increasing");
        }
        let total: usize = self.seeds.iter().map(batch_len).sum();
        if total > self.sample_size {
            return bad("more seeds than the sample size");
        }
        if let Coupons::PerSubject(v) = &self.coupons {
            if v.len() < self.sample_size {
                return bad("per-subject coupon vector shorter than the sample size");
            }
        }
        if let Some(s) = self.degree_noise {
            if !(s.is_finite() && s >= 0.0) {
                return bad("degree noise must be finite and non-negative");
            }
        }
        Ok(())
    }
}

/// Everything one RDS realization reveals: `Y = (C, d, t, G_R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedData {
    /// `C[i][j] = 1` iff subject `i` holds a coupon just before event `j`.
    /// The diagonal records whether a subject received any coupon; entries
    /// with `j < i` are zero.
    pub coupons: BitMatrix,
    /// Reported degrees in the full graph.
    pub degrees: Vec<u32>,
    /// Entry times, strictly increasing.
    pub times: Vec<f64>,
    /// Recruitment graph `G_R` as (recruiter, recruitee) pairs.
    pub recruitments: Vec<(usize, usize)>,
    /// Seed set `M`, sorted.
    pub seeds: Vec<usize>,
}

impl ObservedData {
    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn is_seed(&self, i: usize) -> bool {
        self.seeds.binary_search(&i).is_ok()
    }

    /// Undirected adjacency `A_R` of the recruitment graph.
    pub fn recruitment_adjacency(&self) -> AdjacencyMatrix {
        let mut a = AdjacencyMatrix::new(self.n());
        for &(u, v) in &self.recruitments {
            a.set(u, v, true);
        }
        a
    }

    /// Recruiter of every subject (`None` for seeds).
    pub fn recruiters(&self) -> Vec<Option<usize>> {
        let mut r = vec![None; self.n()];
        for &(u, v) in &self.recruitments {
            r[v] = Some(u);
        }
        r
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }
}

/// One invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension { what: &'static str, expected: usize, got: usize },
    EmptySample,
    NonMonotoneTimes { index: usize },
    NonFiniteTime { index: usize },
    NotForest { detail: String },
    RecruiterAfterRecruitee { recruiter: usize, recruitee: usize },
    CouponBeforeEntry { subject: usize, event: usize },
    CouponResupplied { subject: usize, event: usize },
    RecruiterWithoutCoupon { recruiter: usize, recruitee: usize },
    DegreeBelowRevealed { subject: usize, reported: u32, revealed: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { what, expected, got } => write!(f, "{what} has size {got}, expected {expected}"),
            Violation::EmptySample => write!(f, "empty sample"),
            Violation::NonMonotoneTimes { index } => write!(f, "non-monotone times at index {index}"),
            Violation::NonFiniteTime { index } => write!(f, "non-finite time at index {index}"),
            Violation::NotForest { detail } => write!(f, "not an arborescence forest: {detail}"),
            Violation::RecruiterAfterRecruitee { recruiter, recruitee } => {
                write!(f, "recruiter {recruiter} entered after recruitee {recruitee}")
            }
            Violation::CouponBeforeEntry { subject, event } => {
                write!(f, "subject {subject} holds a coupon before entering (event {event})")
            }
            Violation::CouponResupplied { subject, event } => {
                write!(f, "subject {subject} regains a coupon at event {event}")
            }
            Violation::RecruiterWithoutCoupon { recruiter, recruitee } => {
                write!(f, "recruiter {recruiter} had no coupon before recruiting {recruitee}")
            }
            Violation::DegreeBelowRevealed { subject, reported, revealed } => {
                write!(f, "subject {subject} reports degree {reported} below its {revealed} revealed links")
            }
        }
    }
}

/// Checks every structural invariant of `obs`; an empty list means valid.
pub fn validate(obs: &ObservedData) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = obs.n();
    if n == 0 {
        out.push(Violation::EmptySample);
        return out;
    }
    if obs.degrees.len() != n {
        out.push(Violation::Dimension { what: "degree vector", expected: n, got: obs.degrees.len() });
    }
    if obs.coupons.dim() != n {
        out.push(Violation::Dimension { what: "coupon matrix", expected: n, got: obs.coupons.dim() });
    }
    for (k, &t) in obs.times.iter().enumerate() {
        if !t.is_finite() {
            out.push(Violation::NonFiniteTime { index: k });
        }
    }
    for k in 1..n {
        if !(obs.times[k] > obs.times[k - 1]) {
            out.push(Violation::NonMonotoneTimes { index: k });
        }
    }

    let mut indeg = vec![0usize; n];
    let mut parent = vec![usize::MAX; n];
    let mut revealed = vec![0usize; n];
    let mut forest_ok = true;
    for &(u, v) in &obs.recruitments {
        if u >= n || v >= n || u == v {
            out.push(Violation::NotForest { detail: alloc::format!("bad edge ({u}, {v})") });
            forest_ok = false;
            continue;
        }
        indeg[v] += 1;
        parent[v] = u;
        revealed[u] += 1;
        revealed[v] += 1;
        if u > v {
            out.push(Violation::RecruiterAfterRecruitee { recruiter: u, recruitee: v });
        }
    }
    for (v, &d) in indeg.iter().enumerate() {
        if d > 1 {
            out.push(Violation::NotForest { detail: alloc::format!("node {v} has in-degree {d}") });
            forest_ok = false;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    if roots != obs.seeds {
        out.push(Violation::NotForest { detail: "roots differ from the seed set".into() });
    }
    if forest_ok {
        // every node must reach a root without revisiting
        for start in 0..n {
            let (mut v, mut steps) = (start, 0);
            while parent[v] != usize::MAX && steps <= n {
                v = parent[v];
                steps += 1;
            }
            if steps > n {
                out.push(Violation::NotForest { detail: alloc::format!("cycle through node {start}") });
                break;
            }
        }
    }

    if obs.coupons.dim() == n {
        for i in 0..n {
            for j in 0..i {
                if obs.coupons.get(i, j) {
                    out.push(Violation::CouponBeforeEntry { subject: i, event: j });
                }
            }
            for j in (i + 1)..n {
                if obs.coupons.get(i, j) && !obs.coupons.get(i, j - 1) {
                    out.push(Violation::CouponResupplied { subject: i, event: j });
                }
            }
        }
        for &(u, v) in &obs.recruitments {
            if u < n && v < n && u < v && !obs.coupons.get(u, v) {
                out.push(Violation::RecruiterWithoutCoupon { recruiter: u, recruitee: v });
            }
        }
    }
    if obs.degrees.len() == n {
        for i in 0..n {
            if (obs.degrees[i] as usize) < revealed[i] {
                out.push(Violation::DegreeBelowRevealed { subject: i, reported: obs.degrees[i], revealed: revealed[i] });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecruitmentEvent {
    /// Recruiting subject, `None` for a seed.
    pub recruiter: Option<usize>,
    pub recruitee: usize,
    pub time: f64,
}

/// Simulator-only information withheld from inference.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTruth {
    /// Graph node of every subject, by entry order.
    pub sample_nodes: Vec<usize>,
    /// Induced subgraph `G_S` on the sample.
    pub induced: Graph,
    pub adjacency: AdjacencyMatrix,
    pub events: Vec<RecruitmentEvent>,
}

impl SimulationTruth {
    /// Edges from each subject to population members outside the sample.
    pub fn pendants(&self, g: &Graph) -> Vec<u64> {
        self.sample_nodes
            .iter()
            .enumerate()
            .map(|(i, &v)| (g.degree(v) - self.adjacency.degree(i)) as u64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimOutcome {
    Complete { observed: ObservedData, truth: SimulationTruth },
    /// No pending recruitments and no remaining seeds before the target size.
    Stalled { enrolled: usize },
}

impl SimOutcome {
    pub fn complete(self) -> Option<(ObservedData, SimulationTruth)> {
        match self {
            SimOutcome::Complete { observed, truth } => Some((observed, truth)),
            SimOutcome::Stalled { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    recruiter: usize,
    node: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    // ties on time go to the lower recruiter index, then the lower node id
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.recruiter.cmp(&other.recruiter))
            .then(self.node.cmp(&other.node))
    }
}

struct Run<'g> {
    g: &'g Graph,
    cfg: &'g RdsConfig,
    subject_of: Vec<Option<usize>>,
    nodes: Vec<usize>,
    times: Vec<f64>,
    coupons_left: Vec<u32>,
    coupon_matrix: BitMatrix,
    recruitments: Vec<(usize, usize)>,
    seeds: Vec<usize>,
    events: Vec<RecruitmentEvent>,
    heap: BinaryHeap<Reverse<Pending>>,
}

impl Run<'_> {
    fn enrolled(&self) -> usize {
        self.nodes.len()
    }

    fn enroll<R: Rng + ?Sized>(&mut self, node: usize, at: f64, recruiter: Option<usize>, rng: &mut R) {
        let k = self.enrolled();
        let time = match self.times.last() {
            Some(&last) if at <= last => math::next_up(last),
            _ => at,
        };
        for i in 0..k {
            if self.coupons_left[i] > 0 {
                self.coupon_matrix.set(i, k, true);
            }
        }
        let given = self.cfg.coupons.for_subject(k);
        if given > 0 {
            self.coupon_matrix.set(k, k, true);
        }
        match recruiter {
            Some(r) => {
                self.coupons_left[r] -= 1;
                self.recruitments.push((r, k));
            }
            None => self.seeds.push(k),
        }
        self.subject_of[node] = Some(k);
        self.nodes.push(node);
        self.times.push(time);
        self.coupons_left.push(given);
        self.events.push(RecruitmentEvent { recruiter, recruitee: k, time });
        if given > 0 {
            for &v in self.g.neighbors(node) {
                if self.subject_of[v].is_none() {
                    let w = self.cfg.timing.sample_waiting_time(rng);
                    self.heap.push(Reverse(Pending { time: time + w, recruiter: k, node: v }));
                }
            }
        }
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Runs one RDS realization on `g`.
pub fn simulate<R: Rng + ?Sized>(g: &Graph, cfg: &RdsConfig, rng: &mut R) -> Result<SimOutcome, SimError> {
    cfg.check()?;
    for e in &cfg.seeds {
        if let SeedNodes::Explicit(v) = &e.nodes {
            if let Some(&bad) = v.iter().find(|&&x| x >= g.node_count()) {
                return Err(SimError::InvalidConfig(alloc::format!("seed node {bad} not in graph")));
            }
        }
    }
    let n = cfg.sample_size;
    let mut run = Run {
        g,
        cfg,
        subject_of: vec![None; g.node_count()],
        nodes: Vec::with_capacity(n),
        times: Vec::with_capacity(n),
        coupons_left: Vec::with_capacity(n),
        coupon_matrix: BitMatrix::new(n),
        recruitments: Vec::new(),
        seeds: Vec::new(),
        events: Vec::with_capacity(n),
        heap: BinaryHeap::new(),
    };
    let mut next_batch = 0;
    while run.enrolled() < n {
        let seed_time = cfg.seeds.get(next_batch).map(|e| e.time);
        let event_time = run.heap.peek().map(|Reverse(p)| p.time);
        let take_seed = match (seed_time, event_time) {
            (None, None) => return Ok(SimOutcome::Stalled { enrolled: run.enrolled() }),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(s), Some(e)) => s <= e,
        };
        if take_seed {
            let entry = &cfg.seeds[next_batch];
            next_batch += 1;
            match &entry.nodes {
                SeedNodes::Explicit(list) => {
                    for &v in list {
                        if run.enrolled() < n && run.subject_of[v].is_none() {
                            run.enroll(v, entry.time, None, rng);
                        }
                    }
                }
                SeedNodes::Uniform(count) => {
                    for _ in 0..*count {
                        if run.enrolled() >= n {
                            break;
                        }
                        let free: Vec<usize> = (0..g.node_count()).filter(|&v| run.subject_of[v].is_none()).collect();
                        if free.is_empty() {
                            break;
                        }
                        let v = free[rng.gen_range(0..free.len())];
                        run.enroll(v, entry.time, None, rng);
                    }
                }
            }
            continue;
        }
        let Reverse(p) = run.heap.pop().expect("peeked");
        if run.subject_of[p.node].is_some() || run.coupons_left[p.recruiter] == 0 {
            continue;
        }
        run.enroll(p.node, p.time, Some(p.recruiter), rng);
    }

    let mut degrees: Vec<u32> = run.nodes.iter().map(|&v| g.degree(v) as u32).collect();
    if let Some(sigma) = cfg.degree_noise {
        let mut revealed = vec![0u32; n];
        for &(u, v) in &run.recruitments {
            revealed[u] += 1;
            revealed[v] += 1;
        }
        for (d, &floor) in degrees.iter_mut().zip(&revealed) {
            let noisy = libm::round(*d as f64 * math::exp(sigma * standard_normal(rng)));
            *d = (noisy as u32).max(floor);
        }
    }
    let induced = g.induced_subgraph(&run.nodes)?;
    let adjacency = induced.to_adjacency();
    let observed = ObservedData {
        coupons: run.coupon_matrix,
        degrees,
        times: run.times,
        recruitments: run.recruitments,
        seeds: run.seeds,
    };
    let truth = SimulationTruth { sample_nodes: run.nodes, induced, adjacency, events: run.events };
    Ok(SimOutcome::Complete { observed, truth })
}
