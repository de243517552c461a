use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::LikelihoodError;
use crate::graph::AdjacencyMatrix;
use crate::math;
use crate::sim::ObservedData;
use crate::timing::TimingModel;

/// Dense `n × n` matrices of the likelihood, row-major, indexed `[u][i]`
/// with `u` the potential recruiter and `i` the event. Only `u < i` is
/// populated.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedMatrices {
    n: usize,
    h: Vec<f64>,
    s: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
    tau: Vec<f64>,
    non_seed: Vec<bool>,
}

impl ObservedMatrices {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self, u: usize, i: usize) -> f64 {
        self.h[u * self.n + i]
    }

    #[inline]
    pub fn s(&self, u: usize, i: usize) -> f64 {
        self.s[u * self.n + i]
    }

    /// `B = C ∘ H`.
    #[inline]
    pub fn b(&self, u: usize, i: usize) -> f64 {
        self.b[u * self.n + i]
    }

    /// `D = C ∘ S`.
    #[inline]
    pub fn d(&self, u: usize, i: usize) -> f64 {
        self.d[u * self.n + i]
    }

    pub fn b_row(&self, u: usize) -> &[f64] {
        &self.b[u * self.n..(u + 1) * self.n]
    }

    pub fn d_row(&self, u: usize) -> &[f64] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    /// `τ(u; i) = t_{i−1} − t_u`.
    pub fn tau(&self, u: usize, i: usize) -> f64 {
        self.tau[u * self.n + i]
    }

    /// `m_i = 1{i ∉ M}`.
    pub fn non_seed(&self) -> &[bool] {
        &self.non_seed
    }
}

pub fn build_matrices(obs: &ObservedData, tm: &TimingModel) -> Result<ObservedMatrices, LikelihoodError> {
    let n = obs.n();
    if obs.coupons.dim() != n || obs.degrees.len() != n {
        return Err(LikelihoodError::Dimension(format!(
            "{n} times, {} degrees, coupon matrix {}",
            obs.degrees.len(),
            obs.coupons.dim()
        )));
    }
    let t = &obs.times;
    let mut m = ObservedMatrices {
        n,
        h: vec![0.0; n * n],
        s: vec![0.0; n * n],
        b: vec![0.0; n * n],
        d: vec![0.0; n * n],
        tau: vec![0.0; n * n],
        non_seed: (0..n).map(|i| !obs.is_seed(i)).collect(),
    };
    for i in 1..n {
        for u in 0..i {
            let tau = t[i - 1] - t[u];
            let gap = t[i] - t[u];
            if !(tau >= 0.0 && gap >= tau) {
                return Err(LikelihoodError::InconsistentTimes { u, i });
            }
            let k = u * n + i;
            m.tau[k] = tau;
            m.h[k] = tm.conditional_hazard(tau, gap)?;
            m.s[k] = tm.log_conditional_survival(tau, gap)?;
            if obs.coupons.get(u, i) {
                m.b[k] = m.h[k];
                m.d[k] = m.s[k];
            }
        }
    }
    Ok(m)
}

/// `m'β + 1'δ` evaluated literally: form `AB` and `AD`, keep the lower
/// triangle (diagonal included) and sum columns. Returns `−∞` when some
/// non-seed has zero intensity.
pub fn log_likelihood_matrix(a: &AdjacencyMatrix, u: &[u64], mats: &ObservedMatrices) -> Result<f64, LikelihoodError> {
    let n = mats.n();
    if a.dim() != n || u.len() != n {
        return Err(LikelihoodError::Dimension(format!("A is {}, u has {}, matrices are {n}", a.dim(), u.len())));
    }
    let mut ab = vec![0.0; n * n];
    let mut ad = vec![0.0; n * n];
    for k in 0..n {
        for v in 0..n {
            if a.get(k, v) {
                for i in 0..n {
                    ab[k * n + i] += mats.b(v, i);
                    ad[k * n + i] += mats.d(v, i);
                }
            }
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        let (mut beta_arg, mut delta) = (0.0, 0.0);
        for v in 0..n {
            beta_arg += mats.b(v, i) * u[v] as f64;
            delta += mats.d(v, i) * u[v] as f64;
        }
        for k in i..n {
            beta_arg += ab[k * n + i];
            delta += ad[k * n + i];
        }
        if mats.non_seed()[i] {
            if beta_arg <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            total += math::ln(beta_arg);
        }
        total += delta;
    }
    Ok(total)
}
