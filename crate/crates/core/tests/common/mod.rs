#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdsnet_core::graph::{barabasi_albert, Graph};
use rdsnet_core::likelihood::{GammaCodec, Objective, PenaltyConfig, Slot};
use rdsnet_core::sim::{simulate, ObservedData, RdsConfig, SimulationTruth};
use rdsnet_core::submodular::SetFunction;
use rdsnet_core::{BitSet, TimingModel};

pub fn expo(rate: f64) -> TimingModel {
    TimingModel::exponential(rate).unwrap()
}

/// A completed RDS draw of `n` subjects from a fresh BA graph.
pub fn draw(seed: u64, nodes: usize, m: usize, n: usize, coupons: u32) -> (Graph, ObservedData, SimulationTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = barabasi_albert(nodes, m, &mut rng);
    let cfg = RdsConfig::single_seed(n, coupons, expo(1.0));
    loop {
        if let Some((obs, truth)) = simulate(&g, &cfg, &mut rng).unwrap().complete() {
            return (g, obs, truth);
        }
    }
}

/// Objective over a random subset of `len` slots mixing free edges and
/// pendant bits, at a perturbed timing rate.
pub fn restricted(seed: u64, n: usize, len: usize, penalty: PenaltyConfig) -> (ObservedData, Objective) {
    let (_, obs, _) = draw(seed, 30, 2, n, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let mut slots: Vec<Slot> = GammaCodec::new(&obs).slots().to_vec();
    slots.shuffle(&mut rng);
    slots.truncate(len);
    let codec = GammaCodec::restricted(&obs, slots).unwrap();
    let rate = rng.gen_range(0.5..2.0);
    let obj = Objective::with_codec(&obs, codec, &expo(rate), penalty).unwrap();
    (obs, obj)
}

pub fn all_subsets(len: usize) -> impl Iterator<Item = BitSet> {
    (0..1u64 << len).map(move |m| BitSet::from_mask(len, m))
}

pub fn values<F: SetFunction>(f: &F) -> Vec<f64> {
    all_subsets(f.len()).map(|s| f.evaluate(&s)).collect()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn random_set(rng: &mut impl Rng, len: usize) -> BitSet {
    BitSet::from_indices(len, (0..len).filter(|_| rng.gen_bool(0.5)))
}
