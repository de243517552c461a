use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Lower,
    Grow,
    Shrink,
    Bar,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Lower => "lower",
            BoundKind::Grow => "grow",
            BoundKind::Shrink => "shrink",
            BoundKind::Bar => "bar",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [BoundKind::Lower, BoundKind::Grow, BoundKind::Shrink, BoundKind::Bar].into_iter().find(|k| k.name() == s)
    }

    pub fn is_upper(self) -> bool {
        self != BoundKind::Lower
    }
}

/// Affine set function `s(X) + c`, bounding `F` from below or above.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularBound {
    pub weights: Vec<f64>,
    pub offset: f64,
    pub kind: BoundKind,
    /// Set where an upper bound is tight.
    pub anchor: Option<BitSet>,
}

impl ModularBound {
    pub fn value(&self, set: &BitSet) -> f64 {
        self.offset + set.iter().map(|i| self.weights[i]).sum::<f64>()
    }

    /// `log Σ_X e^{s(X) + c} = c + Σ_i log(1 + e^{s_i})`.
    pub fn log_partition(&self) -> f64 {
        log_partition(&self.weights, self.offset)
    }

    /// `Pr(i ∈ X)` under `p(X) ∝ e^{s(X)}`, i.e. `logistic(s_i)`.
    pub fn marginals(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| math::logistic(w)).collect()
    }
}

pub fn log_partition(weights: &[f64], offset: f64) -> f64 {
    offset + weights.iter().map(|&w| math::softplus(w)).sum::<f64>()
}

/// The interval `[(s_l({i}) + c_l) / Z_u, (s_u({i}) + c_u) / Z_l]` taken
/// literally, for diagnostics only. It is not a probability in general.
pub fn marginal_bound_expression(lower: &ModularBound, upper: &ModularBound) -> Vec<(f64, f64)> {
    let (zl, zu) = (lower.log_partition(), upper.log_partition());
    lower
        .weights
        .iter()
        .zip(&upper.weights)
        .map(|(&sl, &su)| ((sl + lower.offset) * math::exp(-zu), (su + upper.offset) * math::exp(-zl)))
        .collect()
}
