mod common;

use std::time::Instant;

use common::*;
use rdsnet_core::likelihood::PenaltyConfig;
use rdsnet_core::timing::TimingFamily;
use rdsnet_core::vine::{alternate, BoundChoice, InferOptions, PendantRule, Selection};

fn trajectory(seed: u64, opts: &InferOptions) -> Vec<f64> {
    let (_, obs, _) = draw(seed, 250, 3, 100, 3);
    let r = alternate(&obs, &PenaltyConfig::default(), TimingFamily::Exponential, expo(5.0), 4, Selection::Posterior, opts)
        .unwrap();
    assert!(!r.theta_failed);
    r.trajectory.iter().map(|m| m.params()[0]).collect()
}

#[test]
fn rate_moves_from_far_start_toward_truth() {
    for seed in [500, 501, 502] {
        let t = trajectory(seed, &InferOptions::default());
        assert!(t[1] < t[0], "seed {seed}: {t:?}");
        let last = *t.last().unwrap();
        assert!((0.6..1.5).contains(&last), "seed {seed}: {t:?}");
    }
}

#[test]
fn marginal_pendants_stay_bounded_in_time() {
    // non-submodular L2 penalty; the stall guard keeps min-norm short
    let opts = InferOptions { bound: BoundChoice::Upper, pendants: PendantRule::Marginal, ..Default::default() };
    let start = Instant::now();
    let t = trajectory(0, &opts);
    assert!(t.iter().all(|x| x.is_finite() && *x > 0.0));
    assert!(start.elapsed().as_secs() < 60, "{:?}", start.elapsed());
}
