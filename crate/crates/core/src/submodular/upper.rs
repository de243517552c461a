use super::{
    m_function, minimize_submodular, supergradients, BoundKind, MinNormResult, MinimizeOptions, ModularBound,
    PlusModular, SetFunction,
};

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundResult {
    /// The supergradient with the smallest log-partition.
    pub bound: ModularBound,
    /// Log-partition of every kind at the anchor.
    pub log_partitions: [(BoundKind, f64); 3],
    pub minimizer: MinNormResult,
    pub oracle_calls: usize,
}

/// Anchors at `argmin F + m`, then keeps whichever of the grow, shrink and
/// bar supergradients there has the smallest log-partition (grow first on
/// ties).
pub fn upper_bound<F: SetFunction>(f: &F, opts: &MinimizeOptions) -> UpperBoundResult {
    let m = m_function(f);
    let g = PlusModular::new(f, m);
    let minimizer = minimize_submodular(&g, opts);
    let (all, calls) = supergradients(f, &minimizer.set);
    let log_partitions = [
        (all[0].kind, all[0].log_partition()),
        (all[1].kind, all[1].log_partition()),
        (all[2].kind, all[2].log_partition()),
    ];
    let best = (0..3).fold(0, |b, k| if log_partitions[k].1 < log_partitions[b].1 { k } else { b });
    let [grow, shrink, bar] = all;
    let bound = [grow, shrink, bar].into_iter().nth(best).expect("three kinds");
    let oracle_calls = 2 * f.len() + minimizer.oracle_calls + calls;
    UpperBoundResult { bound, log_partitions, minimizer, oracle_calls }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::Modular;
    use alloc::vec;

    #[test]
    fn modular_bound_is_exact() {
        let m = Modular::new(vec![0.5, -1.0, 2.0]);
        let r = upper_bound(&m, &MinimizeOptions::default());
        let exact = crate::submodular::log_partition(&m.weights, 0.0);
        for (_, lz) in r.log_partitions {
            assert!((lz - exact).abs() < 1e-12);
        }
        assert_eq!(r.bound.weights, m.weights);
    }
}
