use alloc::format;

use super::LikelihoodError;
use crate::graph::AdjacencyMatrix;
use crate::math;

/// `ψ(x) = ω‖x‖_p` for `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub omega: f64,
    pub p: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig { omega: 1.0, p: 2.0 }
    }
}

impl PenaltyConfig {
    pub fn new(omega: f64, p: f64) -> Result<Self, LikelihoodError> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(LikelihoodError::Penalty(format!("omega must be finite and >= 0, got {omega}")));
        }
        if !(p >= 1.0) {
            return Err(LikelihoodError::Penalty(format!("p must be in [1, inf], got {p}")));
        }
        Ok(PenaltyConfig { omega, p })
    }

    /// `Σ x_i^p`, or `max x_i` when `p = ∞`.
    pub fn accumulate(&self, excess: impl IntoIterator<Item = u64>) -> f64 {
        if self.p == f64::INFINITY {
            excess.into_iter().max().unwrap_or(0) as f64
        } else {
            excess.into_iter().map(|x| self.power(x)).sum()
        }
    }

    /// Contribution of one excess entry to [`accumulate`](Self::accumulate)
    /// for finite `p`.
    #[inline]
    pub fn power(&self, x: u64) -> f64 {
        match x {
            0 => 0.0,
            1 => 1.0,
            _ if self.p == 1.0 => x as f64,
            _ if self.p == 2.0 => (x as f64) * (x as f64),
            _ => math::powf(x as f64, self.p),
        }
    }

    /// `ψ` from an accumulated value.
    #[inline]
    pub fn finish(&self, acc: f64) -> f64 {
        if acc == 0.0 || self.omega == 0.0 {
            return 0.0;
        }
        let norm = if self.p == f64::INFINITY || self.p == 1.0 {
            acc
        } else if self.p == 2.0 {
            math::sqrt(acc)
        } else {
            math::powf(acc, 1.0 / self.p)
        };
        self.omega * norm
    }

    pub fn psi(&self, excess: impl IntoIterator<Item = u64>) -> f64 {
        self.finish(self.accumulate(excess))
    }
}

/// `−ψ(max(u + A·1 − d, 0))`.
pub fn log_prior(a: &AdjacencyMatrix, u: &[u64], d: &[u32], pc: &PenaltyConfig) -> f64 {
    let excess = (0..a.dim()).map(|i| (u[i] + a.degree(i) as u64).saturating_sub(d[i] as u64));
    -pc.psi(excess)
}
