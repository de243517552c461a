use alloc::vec;
use alloc::vec::Vec;

use super::{BoundKind, ModularBound, SetCursor, SetFunction};
use crate::bitset::BitSet;
use crate::math;

/// Marginal quantities shared by the three supergradients at `x`.
struct Margins {
    at_x: f64,
    /// `Δ_j F(x∖j)` for `j ∈ x`, `Δ_j F(x)` for `j ∉ x`.
    local: Vec<f64>,
    /// `Δ_j F(V∖j)`.
    top: Vec<f64>,
    /// `F({j})`.
    single: Vec<f64>,
    oracle_calls: usize,
}

fn singletons<F: SetFunction>(f: &F) -> Vec<f64> {
    let c = f.cursor();
    (0..f.len()).map(|j| c.toggle_gain(j)).collect()
}

fn tops<F: SetFunction>(f: &F) -> Vec<f64> {
    let mut c = f.cursor();
    c.move_to(&BitSet::full(f.len()));
    (0..f.len()).map(|j| -c.toggle_gain(j)).collect()
}

fn margins<F: SetFunction>(f: &F, x: &BitSet) -> Margins {
    let n = f.len();
    let mut c = f.cursor();
    c.move_to(x);
    let local = (0..n).map(|j| if x.contains(j) { -c.toggle_gain(j) } else { c.toggle_gain(j) }).collect();
    Margins { at_x: c.value(), local, top: tops(f), single: singletons(f), oracle_calls: 3 * n + 1 }
}

fn build(m: &Margins, x: &BitSet, kind: BoundKind) -> ModularBound {
    let weights: Vec<f64> = (0..m.local.len())
        .map(|j| match (kind, x.contains(j)) {
            (BoundKind::Grow, true) | (BoundKind::Bar, true) => m.top[j],
            (BoundKind::Grow, false) | (BoundKind::Shrink, true) => m.local[j],
            (BoundKind::Shrink, false) | (BoundKind::Bar, false) => m.single[j],
            (BoundKind::Lower, _) => unreachable!("not a supergradient"),
        })
        .collect();
    let sx: f64 = x.iter().map(|j| weights[j]).sum();
    ModularBound { offset: m.at_x - sx, weights, kind, anchor: Some(x.clone()) }
}

/// Modular upper bound of a submodular `F`, tight at `x`:
///
/// | kind   | `j ∈ x`        | `j ∉ x`   |
/// |--------|----------------|-----------|
/// | grow   | `Δ_j F(V∖j)`   | `Δ_j F(x)` |
/// | shrink | `Δ_j F(x∖j)`   | `F({j})`  |
/// | bar    | `Δ_j F(V∖j)`   | `F({j})`  |
pub fn supergradient<F: SetFunction>(f: &F, x: &BitSet, kind: BoundKind) -> ModularBound {
    assert!(kind.is_upper(), "supergradient kind must be grow, shrink or bar");
    build(&margins(f, x), x, kind)
}

/// All three supergradients at `x` from one set of oracle calls.
pub fn supergradients<F: SetFunction>(f: &F, x: &BitSet) -> ([ModularBound; 3], usize) {
    let m = margins(f, x);
    let all = [build(&m, x, BoundKind::Grow), build(&m, x, BoundKind::Shrink), build(&m, x, BoundKind::Bar)];
    (all, m.oracle_calls)
}

/// `m_i = log(1 + e^{−Δ_i F(V∖i)}) − log(1 + e^{F({i})})`. Minimizing
/// `F + m` minimizes the log-partition of the bar supergradient over anchors.
pub fn m_function<F: SetFunction>(f: &F) -> Vec<f64> {
    let top = tops(f);
    let single = singletons(f);
    let mut m = vec![0.0; f.len()];
    for i in 0..f.len() {
        m[i] = math::softplus(-top[i]) - math::softplus(single[i]);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{FnSetFunction, Modular};

    #[test]
    fn modular_function_is_its_own_supergradient() {
        let m = Modular::new(vec![1.5, -0.5, 0.25]);
        let x = BitSet::from_indices(3, [0, 2]);
        for kind in [BoundKind::Grow, BoundKind::Shrink, BoundKind::Bar] {
            let b = supergradient(&m, &x, kind);
            assert_eq!(b.weights, m.weights);
            assert_eq!(b.offset, 0.0);
        }
        let mf = m_function(&m);
        for (mi, wi) in mf.iter().zip(&m.weights) {
            assert!((mi + wi).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_function_has_zero_m() {
        let z = FnSetFunction::new(4, |_: &BitSet| 0.0);
        assert_eq!(m_function(&z), [0.0; 4]);
    }

    #[test]
    fn tight_at_anchor_and_bounding() {
        let f = FnSetFunction::new(4, |s: &BitSet| math::ln(1.0 + s.count() as f64) + if s.contains(1) { 0.5 } else { 0.0 });
        for xm in 0..16 {
            let x = BitSet::from_mask(4, xm);
            let (all, _) = supergradients(&f, &x);
            for b in &all {
                assert!((b.value(&x) - f.evaluate(&x)).abs() < 1e-12);
                for ym in 0..16 {
                    let y = BitSet::from_mask(4, ym);
                    assert!(f.evaluate(&y) <= b.value(&y) + 1e-12, "{:?} at {xm} fails at {ym}", b.kind);
                }
            }
        }
    }
}
