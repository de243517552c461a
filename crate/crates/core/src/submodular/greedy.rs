use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{BoundKind, ModularBound, SetCursor, SetFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    pub bound: ModularBound,
    /// Elements in the order they were added.
    pub order: Vec<usize>,
    pub oracle_calls: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    index: usize,
    round: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // larger gain first, then smaller index
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.total_cmp(&other.gain).then(other.index.cmp(&self.index))
    }
}

/// Greedy modular lower bound: repeatedly add the element of largest
/// marginal gain (lowest index on ties) and record that gain as its weight.
///
/// Lazy evaluation keeps stale gains in a max-heap; by diminishing returns a
/// stale gain bounds the current one, so the first fresh entry popped is the
/// true maximizer.
pub fn greedy_lower_bound<F: SetFunction>(f: &F) -> GreedyResult {
    let n = f.len();
    let mut cursor = f.cursor();
    let mut heap: BinaryHeap<Candidate> =
        (0..n).map(|index| Candidate { gain: cursor.toggle_gain(index), index, round: 0 }).collect();
    let mut oracle_calls = n;
    let mut weights = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut round = 0;
    while let Some(top) = heap.pop() {
        if top.round == round {
            weights[top.index] = top.gain;
            order.push(top.index);
            cursor.toggle(top.index);
            round += 1;
        } else {
            heap.push(Candidate { gain: cursor.toggle_gain(top.index), index: top.index, round });
            oracle_calls += 1;
        }
    }
    GreedyResult {
        bound: ModularBound { weights, offset: 0.0, kind: BoundKind::Lower, anchor: None },
        order,
        oracle_calls,
    }
}

/// The same permutation as [`greedy_lower_bound`], rescanning every
/// remaining element at every step.
pub fn greedy_lower_bound_naive<F: SetFunction>(f: &F) -> GreedyResult {
    let n = f.len();
    let mut cursor = f.cursor();
    let mut weights = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut oracle_calls = 0;
    for _ in 0..n {
        let mut best: Option<Candidate> = None;
        for index in (0..n).filter(|&i| !cursor.contains(i)) {
            let c = Candidate { gain: cursor.toggle_gain(index), index, round: 0 };
            oracle_calls += 1;
            if best.is_none_or(|b| c > b) {
                best = Some(c);
            }
        }
        let b = best.expect("remaining element");
        weights[b.index] = b.gain;
        order.push(b.index);
        cursor.toggle(b.index);
    }
    GreedyResult {
        bound: ModularBound { weights, offset: 0.0, kind: BoundKind::Lower, anchor: None },
        order,
        oracle_calls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;
    use crate::math;
    use crate::submodular::{FnSetFunction, Modular};

    #[test]
    fn modular_weights_are_recovered() {
        let m = Modular::new(vec![0.3, -1.0, 2.0, 0.3]);
        let r = greedy_lower_bound(&m);
        assert_eq!(r.bound.weights, m.weights);
        assert_eq!(r.order, [2, 0, 3, 1]);
        assert_eq!(greedy_lower_bound_naive(&m), GreedyResult { oracle_calls: 10, ..r.clone() });
    }

    #[test]
    fn concave_of_cardinality() {
        // F(X) = sqrt(|X|): gains 1, √2−1, √3−√2 in index order
        let f = FnSetFunction::new(3, |s: &BitSet| math::sqrt(s.count() as f64));
        let r = greedy_lower_bound(&f);
        assert_eq!(r.order, [0, 1, 2]);
        assert!((r.bound.weights[1] - (math::sqrt(2.0) - 1.0)).abs() < 1e-15);
        for mask in 0..8 {
            let s = BitSet::from_mask(3, mask);
            assert!(r.bound.value(&s) <= f.evaluate(&s) + 1e-15);
        }
    }

    #[test]
    fn empty_ground_set() {
        let m = Modular::new(vec![]);
        let r = greedy_lower_bound(&m);
        assert!(r.order.is_empty() && r.bound.weights.is_empty());
    }
}
