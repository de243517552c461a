use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{log_likelihood_matrix, log_prior, build_matrices, GammaCodec, LikelihoodError, ObservedMatrices, PenaltyConfig, Slot};
use crate::bitset::BitSet;
use crate::math;
use crate::sim::ObservedData;
use crate::submodular::{SetCursor, SetFunction};
use crate::timing::TimingModel;

/// Normalized log-posterior `F(γ) = log L̃(γ) − log L̃(0)` over a codec.
///
/// Switching on an edge `(a, c)`, `a < c`, adds `B[a][i]` to `b_i` and
/// `D[a][i]` to `δ` for `a < i ≤ c`. Switching on pendant bit `q` of
/// subject `s` adds `2^q B[s][i]` and `2^q D[s][i]` for every `i > s`.
/// Gains and commits are therefore `O(n)`.
#[derive(Debug, Clone)]
pub struct Objective {
    codec: GammaCodec,
    mats: ObservedMatrices,
    penalty: PenaltyConfig,
    degrees: Vec<u32>,
    d_prefix: Vec<f64>,
    base_b: Vec<f64>,
    base_delta: f64,
    base_load: Vec<u64>,
    base_value: f64,
}

#[derive(Debug, Clone, Copy)]
struct Effect {
    row: usize,
    lo: usize,
    hi: usize,
    scale: f64,
    delta: f64,
    load: [(usize, u64); 2],
}

impl Objective {
    pub fn new(obs: &ObservedData, tm: &TimingModel, penalty: PenaltyConfig) -> Result<Self, LikelihoodError> {
        Self::with_codec(obs, GammaCodec::new(obs), tm, penalty)
    }

    pub fn with_codec(
        obs: &ObservedData,
        codec: GammaCodec,
        tm: &TimingModel,
        penalty: PenaltyConfig,
    ) -> Result<Self, LikelihoodError> {
        if codec.n() != obs.n() {
            return Err(LikelihoodError::Dimension(format!("codec is {}, sample is {}", codec.n(), obs.n())));
        }
        let mats = build_matrices(obs, tm)?;
        Self::from_parts(codec, mats, obs.degrees.clone(), penalty)
    }

    pub fn from_parts(
        codec: GammaCodec,
        mats: ObservedMatrices,
        degrees: Vec<u32>,
        penalty: PenaltyConfig,
    ) -> Result<Self, LikelihoodError> {
        let n = mats.n();
        if codec.n() != n || degrees.len() != n {
            return Err(LikelihoodError::Dimension(format!(
                "codec is {}, degrees {}, matrices {n}",
                codec.n(),
                degrees.len()
            )));
        }
        let mut d_prefix = vec![0.0; n * n];
        for u in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += mats.d(u, i);
                d_prefix[u * n + i] = acc;
            }
        }
        let mut obj = Objective {
            codec,
            mats,
            penalty,
            degrees,
            d_prefix,
            base_b: vec![0.0; n],
            base_delta: 0.0,
            base_load: vec![0; n],
            base_value: 0.0,
        };
        let revealed: Vec<(usize, usize)> = obj.codec.revealed().edges().collect();
        let (mut b, mut delta, mut load) = (vec![0.0; n], 0.0, vec![0u64; n]);
        for (a, c) in revealed {
            obj.apply(&obj.edge_effect(a, c), 1.0, &mut b, &mut delta, &mut load);
        }
        if let Some(subject) = (0..n).find(|&i| obj.mats.non_seed()[i] && !(b[i] > 0.0)) {
            return Err(LikelihoodError::InfeasibleBase { subject });
        }
        obj.base_value = obj.raw_value(&b, delta, obj.penalty.accumulate(obj.excesses(&load)));
        obj.base_b = b;
        obj.base_delta = delta;
        obj.base_load = load;
        Ok(obj)
    }

    pub fn codec(&self) -> &GammaCodec {
        &self.codec
    }

    pub fn matrices(&self) -> &ObservedMatrices {
        &self.mats
    }

    pub fn penalty(&self) -> &PenaltyConfig {
        &self.penalty
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Unnormalized `log L̃(0)`, the value at `A = A_R`, `u = 0`.
    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    /// `F(γ)` from scratch through the literal matrix form; used to check
    /// the incremental path.
    pub fn evaluate_scratch(&self, gamma: &BitSet) -> Result<f64, LikelihoodError> {
        let (a, u) = self.codec.decode(gamma);
        let l = log_likelihood_matrix(&a, &u, &self.mats)?;
        Ok(l + log_prior(&a, &u, &self.degrees, &self.penalty) - self.base_value)
    }

    fn edge_effect(&self, a: usize, c: usize) -> Effect {
        let n = self.mats.n();
        Effect {
            row: a,
            lo: a + 1,
            hi: c,
            scale: 1.0,
            delta: self.d_prefix[a * n + c] - self.d_prefix[a * n + a],
            load: [(a, 1), (c, 1)],
        }
    }

    fn effect(&self, k: usize) -> Effect {
        match self.codec.slot(k) {
            Slot::Edge { i, j } => self.edge_effect(i, j),
            Slot::Pendant { subject: s, bit } => {
                let n = self.mats.n();
                let w = 1u64 << bit;
                let wf = w as f64;
                Effect {
                    row: s,
                    lo: s + 1,
                    hi: n - 1,
                    scale: wf,
                    delta: wf * (self.d_prefix[s * n + n - 1] - self.d_prefix[s * n + s]),
                    load: [(s, w), (s, 0)],
                }
            }
        }
    }

    fn apply(&self, e: &Effect, sign: f64, b: &mut [f64], delta: &mut f64, load: &mut [u64]) {
        let row = self.mats.b_row(e.row);
        for i in e.lo..=e.hi.min(b.len().saturating_sub(1)) {
            b[i] += sign * e.scale * row[i];
        }
        *delta += sign * e.delta;
        for &(s, w) in &e.load {
            if sign > 0.0 {
                load[s] += w;
            } else {
                load[s] -= w;
            }
        }
    }

    fn excesses<'a>(&'a self, load: &'a [u64]) -> impl Iterator<Item = u64> + 'a {
        load.iter().zip(&self.degrees).map(|(&l, &d)| l.saturating_sub(d as u64))
    }

    fn raw_value(&self, b: &[f64], delta: f64, acc: f64) -> f64 {
        let mut v = delta;
        for (i, &bi) in b.iter().enumerate() {
            if self.mats.non_seed()[i] {
                v += math::ln(bi);
            }
        }
        v - self.penalty.finish(acc)
    }
}

/// Incremental state of [`Objective`] at one `γ`.
#[derive(Debug, Clone)]
pub struct ObjectiveCursor<'a> {
    obj: &'a Objective,
    set: BitSet,
    b: Vec<f64>,
    delta: f64,
    load: Vec<u64>,
    acc: f64,
    value: f64,
}

impl ObjectiveCursor<'_> {
    /// The β-argument vector `b` at the current state.
    pub fn intensities(&self) -> &[f64] {
        &self.b
    }

    /// `u + A·1` at the current state.
    pub fn loads(&self) -> &[u64] {
        &self.load
    }

    fn penalty_change(&self, e: &Effect, sign: f64) -> f64 {
        let pc = &self.obj.penalty;
        if pc.omega == 0.0 {
            return 0.0;
        }
        let d = &self.obj.degrees;
        let shifted = |s: usize| -> u64 {
            let mut l = self.load[s];
            for &(t, w) in &e.load {
                if t == s {
                    l = if sign > 0.0 { l + w } else { l - w };
                }
            }
            l.saturating_sub(d[s] as u64)
        };
        let new_acc = if pc.p == f64::INFINITY {
            (0..self.load.len()).map(shifted).max().unwrap_or(0) as f64
        } else {
            let mut acc = self.acc;
            let subjects = [e.load[0].0, e.load[1].0];
            let distinct = if subjects[0] == subjects[1] { 1 } else { 2 };
            for &s in &subjects[..distinct] {
                acc += pc.power(shifted(s)) - pc.power(self.load[s].saturating_sub(d[s] as u64));
            }
            acc
        };
        pc.finish(new_acc) - pc.finish(self.acc)
    }
}

impl SetCursor for ObjectiveCursor<'_> {
    fn set(&self) -> &BitSet {
        &self.set
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn toggle_gain(&self, k: usize) -> f64 {
        let e = self.obj.effect(k);
        let sign = if self.set.contains(k) { -1.0 } else { 1.0 };
        let row = self.obj.mats.b_row(e.row);
        let non_seed = self.obj.mats.non_seed();
        let mut g = sign * e.delta;
        for i in e.lo..=e.hi.min(self.b.len().saturating_sub(1)) {
            let x = e.scale * row[i];
            if x != 0.0 && non_seed[i] {
                g += math::ln_1p(sign * x / self.b[i]);
            }
        }
        g - self.penalty_change(&e, sign)
    }

    fn toggle(&mut self, k: usize) -> f64 {
        let e = self.obj.effect(k);
        let sign = if self.set.contains(k) { -1.0 } else { 1.0 };
        self.obj.apply(&e, sign, &mut self.b, &mut self.delta, &mut self.load);
        self.set.set(k, sign > 0.0);
        self.acc = self.obj.penalty.accumulate(self.obj.excesses(&self.load));
        self.value = self.obj.raw_value(&self.b, self.delta, self.acc) - self.obj.base_value;
        self.value
    }
}

impl SetFunction for Objective {
    type Cursor<'a> = ObjectiveCursor<'a>;

    fn len(&self) -> usize {
        self.codec.len()
    }

    fn cursor(&self) -> ObjectiveCursor<'_> {
        ObjectiveCursor {
            obj: self,
            set: BitSet::new(self.codec.len()),
            b: self.base_b.clone(),
            delta: self.base_delta,
            load: self.base_load.clone(),
            acc: self.penalty.accumulate(self.excesses(&self.base_load)),
            value: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::sim::{simulate, Coupons, RdsConfig, SeedEntry, SeedNodes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn instance(seed: u64, n: usize, p: f64) -> (ObservedData, Objective) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = crate::graph::barabasi_albert(40, 2, &mut rng);
        let cfg = RdsConfig::single_seed(n, 2, TimingModel::exponential(1.0).unwrap());
        let (obs, _) = simulate(&g, &cfg, &mut rng).unwrap().complete().unwrap();
        let obj = Objective::new(&obs, &TimingModel::exponential(1.3).unwrap(), PenaltyConfig::new(0.7, p).unwrap()).unwrap();
        (obs, obj)
    }

    #[test]
    fn empty_set_is_zero() {
        let (_, obj) = instance(1, 8, 2.0);
        assert_eq!(obj.cursor().value(), 0.0);
        assert!(obj.evaluate_scratch(&BitSet::new(obj.len())).unwrap().abs() < 1e-12);
    }

    #[test]
    fn incremental_matches_scratch_under_random_walks() {
        for (seed, p) in [(2, 1.0), (3, 2.0), (4, f64::INFINITY), (5, 1.5)] {
            let (_, obj) = instance(seed, 9, p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = obj.cursor();
            for _ in 0..300 {
                let k = rng.gen_range(0..obj.len());
                let before = c.value();
                let gain = c.toggle_gain(k);
                let after = c.toggle(k);
                assert!((after - before - gain).abs() < 1e-9, "p={p} gain {gain} vs {}", after - before);
                let scratch = obj.evaluate_scratch(c.set()).unwrap();
                assert!((after - scratch).abs() < 1e-9, "p={p}: {after} vs {scratch}");
            }
        }
    }

    #[test]
    fn full_gamma_matches_scratch() {
        let (_, obj) = instance(6, 10, 2.0);
        let full = BitSet::full(obj.len());
        let v = obj.evaluate(&full);
        assert!((v - obj.evaluate_scratch(&full).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn seeds_and_intensities_stay_positive() {
        let (obs, obj) = instance(7, 10, 2.0);
        let c = obj.cursor();
        for i in 0..obs.n() {
            if !obs.is_seed(i) {
                assert!(c.intensities()[i] > 0.0);
            }
        }
    }

    #[test]
    fn infeasible_base_is_reported() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cfg = RdsConfig {
            sample_size: 3,
            coupons: Coupons::Uniform(1),
            seeds: alloc::vec![SeedEntry { time: 0.0, nodes: SeedNodes::Explicit(alloc::vec![0]) }],
            timing: TimingModel::exponential(1.0).unwrap(),
            degree_noise: None,
        };
        let (mut obs, _) = simulate(&g, &cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().complete().unwrap();
        obs.coupons.set(1, 2, false);
        let err = Objective::new(&obs, &TimingModel::exponential(1.0).unwrap(), PenaltyConfig::default()).unwrap_err();
        assert_eq!(err, LikelihoodError::InfeasibleBase { subject: 2 });
    }
}
